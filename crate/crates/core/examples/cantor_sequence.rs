//! Sequence analysis of `S_j = {x/3 + 1/(3j), 2/3 + x/3}`, which converges to
//! the Cantor system at rate `1/(3j + 1)`.
//!
//! ```text
//! cargo run --example cantor_sequence -- 12 0.05
//! ```

use ifsmetric::rational::describe;
use ifsmetric::sequence::{converges_to, limit_candidate, IfsSequence};
use ifsmetric::{big_d, Ifs};

fn term(j: usize) -> ifsmetric::Result<Ifs> {
    Ifs::unit_interval(&[(1.0 / 3.0, 1.0 / (3.0 * j as f64)), (1.0 / 3.0, 2.0 / 3.0)])
}

fn index(i: Option<usize>) -> String {
    i.map_or_else(|| "none".into(), |k| k.to_string())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().map_or(Ok(12), |a| a.parse())?;
    let eps: f64 = args.next().map_or(Ok(0.05), |a| a.parse())?;

    let cantor = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let seq = IfsSequence::new((1..=m).map(term).collect::<ifsmetric::Result<_>>()?)?;
    for (j, s) in seq.terms().iter().enumerate() {
        println!("D(S_{}, C) = {}", j + 1, describe(big_d(s, &cantor)?));
    }

    let report = limit_candidate(&seq, eps)?;
    println!("\ndecreasing: {}", report.decreasing);
    println!("cauchy from term {} at eps {eps}", index(report.cauchy_at));
    println!("within {eps} of the Cantor system from term {}", index(converges_to(&seq, &cantor, eps)?));
    println!("limit contractivity bounds: {:?}", report.factor_bounds);
    println!("residual: {}", describe(report.residual));
    Ok(())
}
