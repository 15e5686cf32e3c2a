//! Recovers the Cantor system from a rendered point set by collage fitting,
//! and shows the collage bound on the distance to the fitted attractor.
//!
//! ```text
//! cargo run --release --example collage_fit -- 3
//! ```

use ifsmetric::attractor::{attractor_points, default_seed};
use ifsmetric::collage::{collage_bound, fit_ifs, FitConfig};
use ifsmetric::{hausdorff, minimal_order, Ifs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(0), |a| a.parse())?;
    let truth = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let target = attractor_points(&truth, 8, &default_seed(&truth, 1e-4)?)?;

    let cfg = FitConfig { seed, ..FitConfig::default() };
    let fit = fit_ifs(&target, truth.domain(), &cfg)?;
    let (ordered, _) = minimal_order(&truth, &fit.ifs)?;
    for (i, m) in ordered.maps().iter().enumerate() {
        println!("map {}: {:.5} x + {:.5}", i + 1, m.matrix()[0], m.translation()[0]);
    }
    let t = fit.ifs.contractivity();
    println!("collage distance {:.3e} (baseline {:.3e}), restart {}", fit.collage_distance, fit.baseline_distance, fit.restart);
    println!("bound on h(target, attractor): {:.3e}", collage_bound(fit.collage_distance, t)?);
    let attractor = attractor_points(&fit.ifs, 10, &default_seed(&fit.ifs, 1e-4)?)?;
    println!("measured h(target, attractor): {:.3e}", hausdorff(&target, &attractor)?);
    Ok(())
}
