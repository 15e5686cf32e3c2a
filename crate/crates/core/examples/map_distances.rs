//! Bounded map distances and the IFS metric on three two-map systems of the
//! unit interval, printed as exact fractions.
//!
//! ```text
//! cargo run --example map_distances
//! ```

use ifsmetric::rational::describe;
use ifsmetric::{big_d, cost_matrix, dbar_inf, optimal_matching, Ifs};

fn main() -> ifsmetric::Result<()> {
    let halves = Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.5)])?;
    let thirds = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let mixed = Ifs::unit_interval(&[(0.5, 0.5), (0.75, 0.0)])?;

    let f = &halves.maps()[0];
    let g = &thirds.maps()[1];
    println!("dbar(x/2, 2/3 + x/3) = {}", describe(dbar_inf(f, g, halves.domain())?.get()));

    for (name, other) in [("thirds", &thirds), ("mixed", &mixed)] {
        let c = cost_matrix(&halves, other)?;
        let (sigma, _) = optimal_matching(&c);
        println!("\nhalves vs {name}");
        for row in c.rows() {
            let cells: Vec<String> = row.iter().map(|v| describe(*v)).collect();
            println!("  [{}]", cells.join(", "));
        }
        println!("  D = {}, sigma = {sigma}", describe(big_d(&halves, other)?));
    }
    Ok(())
}
