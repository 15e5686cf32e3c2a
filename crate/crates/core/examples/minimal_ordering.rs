//! Minimal ordering is symmetric but not transitive: three pairs of constant
//! maps in the plane where each consecutive pair aligns under the identity
//! while the outer pair needs a swap.
//!
//! ```text
//! cargo run --example minimal_ordering
//! ```

use ifsmetric::{is_minimally_ordered, is_mo_set, minimal_order, sup_distance, AffineMap, BoxDomain, Ifs};

fn constants(points: [[f64; 2]; 2]) -> ifsmetric::Result<Ifs> {
    let domain = BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0])?;
    Ifs::new(domain, points.iter().map(|p| AffineMap::constant(p.to_vec())).collect())
}

fn main() -> ifsmetric::Result<()> {
    let s = constants([[0.0, 0.0], [1.0, 0.0]])?;
    let t = constants([[0.0, 1.0], [1.0, -1.0]])?;
    let u = constants([[1.0, 1.0], [0.0, -1.0]])?;

    for (name, a, b) in [("T wrt S", &s, &t), ("U wrt T", &t, &u), ("U wrt S", &s, &u)] {
        let d = |i: usize, j: usize| sup_distance(&a.maps()[i], &b.maps()[j], a.domain());
        let identity = d(0, 0)? + d(1, 1)?;
        let swap = d(0, 1)? + d(1, 0)?;
        let (_, sigma) = minimal_order(a, b)?;
        println!(
            "{name}: identity sum {identity:.6}, swap sum {swap:.6}, minimally ordered: {}, minimal order {sigma}",
            is_minimally_ordered(b, a)?
        );
    }
    println!("{{S, T, U}} is a minimally ordered set: {}", is_mo_set(&[s, t, u])?);
    Ok(())
}
