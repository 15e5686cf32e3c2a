//! Hutchinson operator, attractor rendering, chaos game and code-space points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::metric::check_dim;
use crate::pointset::{hausdorff, PointSet};
use crate::sequence::IfsSequence;

/// Largest point count deterministic iteration may produce.
pub const POINT_CAP: usize = 5_000_000;

/// Default snapping pitch in one dimension.
pub const DEFAULT_DELTA_1D: f64 = 1e-4;
/// Default snapping pitch per axis in two or more dimensions.
pub const DEFAULT_DELTA_2D: f64 = 1e-3;

pub fn default_resolution(dim: usize) -> f64 {
    if dim == 1 {
        DEFAULT_DELTA_1D
    } else {
        DEFAULT_DELTA_2D
    }
}

fn membership_tol(set: &PointSet) -> f64 {
    set.resolution() * (set.dim() as f64).sqrt()
}

fn check_set(s: &Ifs, b: &PointSet) -> Result<()> {
    check_dim(s.dim(), b.dim())?;
    if !b.within(s.domain(), membership_tol(b)) {
        return Err(Error::OutsideDomain);
    }
    Ok(())
}

/// `W(B) = ∪_i f_i(B)`, snapped to `B`'s resolution.
pub fn hutchinson(s: &Ifs, b: &PointSet) -> Result<PointSet> {
    check_set(s, b)?;
    hutchinson_unchecked(s, b, POINT_CAP)
}

pub(crate) fn hutchinson_unchecked(s: &Ifs, b: &PointSet, cap: usize) -> Result<PointSet> {
    let count = b.len() * s.arity();
    if count > cap {
        return Err(Error::ResourceCap { count, cap });
    }
    let mut raw = Vec::with_capacity(count * b.dim());
    for m in s.maps() {
        for p in b.iter() {
            raw.extend(m.apply(p));
        }
    }
    PointSet::from_flat(b.dim(), b.resolution(), &raw)
}

/// The `2^d` domain corners, snapped at `resolution`.
pub fn default_seed(s: &Ifs, resolution: f64) -> Result<PointSet> {
    PointSet::from_points(s.dim(), resolution, &s.domain().vertices()?)
}

/// `W^depth(seed)`.
pub fn attractor_points(s: &Ifs, depth: usize, seed: &PointSet) -> Result<PointSet> {
    check_set(s, seed)?;
    let mut cur = seed.clone();
    for _ in 0..depth {
        cur = hutchinson_unchecked(s, &cur, POINT_CAP)?;
    }
    Ok(cur)
}

/// `t^depth / (1 - t) · h(seed, W(seed))`: how far `W^depth(seed)` can be
/// from the attractor, ignoring snapping.
pub fn attractor_error_bound(s: &Ifs, depth: usize, seed: &PointSet) -> Result<f64> {
    let t = s.contractivity();
    let first = hausdorff(seed, &hutchinson(s, seed)?)?;
    Ok(t.powi(depth as i32) / (1.0 - t) * first)
}

/// Random-iteration rendering with uniform map choice.
///
/// The orbit starts at the lower domain corner; the first `burn_in` iterates
/// are dropped and the next `count` are kept.
pub fn chaos_game(s: &Ifs, count: usize, burn_in: usize, seed: u64, resolution: f64) -> Result<PointSet> {
    if count == 0 {
        return Err(Error::Invalid("chaos game needs count > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = s.domain().lo().to_vec();
    let n = s.arity();
    let mut raw = Vec::with_capacity(count * s.dim());
    for step in 0..burn_in + count {
        x = s.maps()[rng.gen_range(0..n)].apply(&x);
        if step >= burn_in {
            raw.extend_from_slice(&x);
        }
    }
    PointSet::from_flat(s.dim(), resolution, &raw)
}

/// Finite prefix of a code-space word, symbols `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Address(Vec<usize>);

impl Address {
    pub fn new(symbols: Vec<usize>, arity: usize) -> Result<Self> {
        if let Some(s) = symbols.iter().find(|&&s| s >= arity) {
            return Err(Error::Invalid(format!("address symbol {s} out of range for {arity} maps")));
        }
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `(… ∘ f_{γ2} ∘ f_{γ1})(x)`: the first symbol is applied first.
pub fn code_point(s: &Ifs, addr: &Address, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(s.dim(), x.len())?;
    if !s.domain().contains(x, 0.0) {
        return Err(Error::OutsideDomain);
    }
    if let Some(&bad) = addr.symbols().iter().find(|&&g| g >= s.arity()) {
        return Err(Error::Invalid(format!("address symbol {bad} out of range")));
    }
    Ok(addr
        .symbols()
        .iter()
        .fold(x.to_vec(), |y, &g| s.maps()[g].apply(&y)))
}

/// Smallest distance between the images `f_i(B)` and `f_k(B)`, `i != k`.
///
/// Zero for just-touching or overlapping first-level pieces when `B` samples
/// the domain; positive when the pieces are disjoint.
pub fn piece_gap(s: &Ifs, b: &PointSet) -> Result<f64> {
    check_set(s, b)?;
    let pieces = s
        .maps()
        .iter()
        .map(|m| {
            let raw: Vec<f64> = b.iter().flat_map(|p| m.apply(p)).collect();
            PointSet::from_flat(b.dim(), b.resolution(), &raw)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gap = f64::INFINITY;
    for i in 0..pieces.len() {
        for k in i + 1..pieces.len() {
            let idx = crate::pointset::NearestIndex::new(&pieces[k]);
            for p in pieces[i].iter() {
                gap = gap.min(idx.nearest_dist2(p).sqrt());
            }
        }
    }
    Ok(gap)
}

/// Hausdorff distances between rendered attractors of a sequence and of a
/// reference IFS.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub depth: usize,
    pub resolution: f64,
    /// `h(A_j, A)` per term.
    pub distances: Vec<f64>,
    /// Rendering error allowance per term: the iteration bounds of both
    /// renders plus `2δ` for snapping.
    pub error_bounds: Vec<f64>,
}

pub fn attractor_convergence_report(
    seq: &IfsSequence,
    s: &Ifs,
    depth: usize,
    resolution: f64,
) -> Result<ConvergenceReport> {
    let first = seq.terms().first().ok_or(Error::Empty("sequence"))?;
    if first.domain() != s.domain() {
        return Err(Error::DomainMismatch);
    }
    let seed = default_seed(s, resolution)?;
    let target = attractor_points(s, depth, &seed)?;
    let target_err = attractor_error_bound(s, depth, &seed)?;
    let mut distances = Vec::with_capacity(seq.len());
    let mut error_bounds = Vec::with_capacity(seq.len());
    for term in seq.terms() {
        let rendered = attractor_points(term, depth, &seed)?;
        distances.push(hausdorff(&rendered, &target)?);
        error_bounds.push(attractor_error_bound(term, depth, &seed)? + target_err + 2.0 * resolution);
    }
    Ok(ConvergenceReport {
        depth,
        resolution,
        distances,
        error_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{AffineMap, BoxDomain};

    fn cantor() -> Ifs {
        Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
    }

    fn endpoints(delta: f64) -> PointSet {
        PointSet::from_flat(1, delta, &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn hutchinson_on_endpoints() {
        let w = hutchinson(&cantor(), &endpoints(1e-4)).unwrap();
        let want = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        assert_eq!(w.len(), 4);
        for (got, want) in w.iter().zip(want) {
            assert!((got[0] - want).abs() <= 5e-5);
        }
    }

    #[test]
    fn constant_maps_collapse() {
        let s = Ifs::unit_interval(&[(0.0, 0.25), (0.0, 0.75)]).unwrap();
        let b = PointSet::lattice(&BoxDomain::unit(1), 0.125).unwrap();
        assert_eq!(hutchinson(&s, &b).unwrap().flat(), &[0.25, 0.75]);
    }

    #[test]
    fn just_touching_grid_is_invariant() {
        let s = Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.5)]).unwrap();
        let grid = PointSet::lattice(&BoxDomain::unit(1), 1.0 / 64.0).unwrap();
        let image = hutchinson(&s, &grid).unwrap();
        // W of the 1/64 grid is the 1/128 grid resnapped; at pitch 1/64 the
        // images of the grid points hit every grid point.
        assert!(grid.iter().all(|p| image.distance_to(p) == 0.0));
    }

    #[test]
    fn depth_zero_is_seed_and_outside_points_rejected() {
        let seed = endpoints(1e-4);
        assert_eq!(attractor_points(&cantor(), 0, &seed).unwrap(), seed);
        let out = PointSet::from_flat(1, 1e-4, &[2.0]).unwrap();
        assert!(matches!(hutchinson(&cantor(), &out), Err(Error::OutsideDomain)));
    }

    #[test]
    fn resource_cap() {
        let s = Ifs::unit_interval(&[(0.1, 0.0), (0.1, 0.3), (0.1, 0.6), (0.1, 0.85)]).unwrap();
        let seed = endpoints(1e-12);
        assert!(matches!(
            attractor_points(&s, 12, &seed),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn chaos_game_basics() {
        let konst = Ifs::unit_interval(&[(0.0, 0.4)]).unwrap();
        let one = chaos_game(&konst, 1, 0, 7, 1e-4).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one.point(0)[0] - 0.4).abs() < 1e-12);
        let a = chaos_game(&cantor(), 1000, 20, 42, 1e-4).unwrap();
        let b = chaos_game(&cantor(), 1000, 20, 42, 1e-4).unwrap();
        assert_eq!(a, b);
        assert!(chaos_game(&cantor(), 0, 0, 1, 1e-4).is_err());
    }

    #[test]
    fn code_points() {
        let s = cantor();
        let addr = Address::new(vec![0; 5], 2).unwrap();
        let y = code_point(&s, &addr, &[1.0]).unwrap();
        assert!((y[0] - 3f64.powi(-5)).abs() < 1e-15);
        assert_eq!(code_point(&s, &Address::new(vec![], 2).unwrap(), &[0.7]).unwrap(), vec![0.7]);
        assert!(Address::new(vec![2], 2).is_err());
        // first symbol innermost: f_2(f_1(1)) = 2/3 + 1/9
        let y = code_point(&s, &Address::new(vec![0, 1], 2).unwrap(), &[1.0]).unwrap();
        assert!((y[0] - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn piece_gaps() {
        let grid = PointSet::lattice(&BoxDomain::unit(1), 1.0 / 300.0).unwrap();
        let s1 = Ifs::unit_interval(&[(1.0 / 3.0, 1.0 / 3.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        assert!(piece_gap(&s1, &grid).unwrap() < 1e-12);
        let s2 = Ifs::unit_interval(&[(1.0 / 3.0, 1.0 / 6.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap();
        assert!((piece_gap(&s2, &grid).unwrap() - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_render() {
        let d = BoxDomain::unit(2);
        let maps = vec![
            AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![0.0, 0.0]).unwrap(),
            AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![0.5, 0.0]).unwrap(),
            AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![0.25, 0.5]).unwrap(),
        ];
        let s = Ifs::new(d, maps).unwrap();
        let seed = default_seed(&s, 1e-3).unwrap();
        assert_eq!(seed.len(), 4);
        let a = attractor_points(&s, 6, &seed).unwrap();
        assert!(a.len() > 100);
        let again = hutchinson(&s, &a).unwrap();
        assert!(hausdorff(&a, &again).unwrap() < 0.02);
    }
}
