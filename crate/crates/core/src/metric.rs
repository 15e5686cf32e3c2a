//! Affine contractions on box domains and the bounded sup-metric between them.
//!
//! For maps `f, g` on a compact box `X` the bounded sup-metric is
//!
//! ```text
//! dbar(f, g) = sup_{x in X} d(f(x), g(x)) / (1 + d(f(x), g(x)))
//! ```
//!
//! with `d` Euclidean. Because `t -> t / (1 + t)` is increasing, the supremum
//! commutes with the transform, and for affine maps the inner supremum is
//! attained at a vertex of the box (the norm of an affine function is convex).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Largest dimension for which vertex enumeration (`2^d` vertices) is allowed.
pub const MAX_VERTEX_DIM: usize = 20;

/// Total sample budget for the grid-sampled sup estimator.
pub const SAMPLE_BUDGET: usize = 1_000_000;
/// Per-axis sample cap for the grid-sampled sup estimator.
pub const SAMPLES_PER_AXIS: usize = 10_000;

/// Tolerance used when checking that a map sends its box into itself.
pub const CONTAINMENT_TOL: f64 = 1e-12;

/// Axis-aligned compact box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidBox("dimension must be at least 1".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() {
                return Err(Error::InvalidBox(format!("axis {i} has a non-finite bound")));
            }
            if l > h {
                return Err(Error::InvalidBox(format!("axis {i}: lo {l} > hi {h}")));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[0, 1]^d`.
    pub fn unit(dim: usize) -> Self {
        Self {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    /// All `2^d` corners, in binary counting order over the axes.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        if d > MAX_VERTEX_DIM {
            return Err(Error::Invalid(format!(
                "vertex enumeration limited to d <= {MAX_VERTEX_DIM}, got d = {d}"
            )));
        }
        Ok((0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|k| if mask >> k & 1 == 1 { self.hi[k] } else { self.lo[k] })
                    .collect()
            })
            .collect())
    }

    pub(crate) fn scale(&self) -> f64 {
        self.lo
            .iter()
            .chain(&self.hi)
            .fold(1.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A map `x -> A x + b` with `A` stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    dim: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl AffineMap {
    /// Builds a map and rejects it unless its contractivity is below 1.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let map = Self::unchecked(a, b)?;
        let c = map.contractivity();
        if !(c < 1.0) {
            return Err(Error::NotContraction(c));
        }
        Ok(map)
    }

    /// Shape checks only; the contractivity condition is not enforced.
    /// Used for the identity and other limit objects that live outside Con(X).
    pub fn unchecked(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let dim = b.len();
        if dim == 0 {
            return Err(Error::Invalid("affine map needs dimension >= 1".into()));
        }
        if a.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: a.len(),
            });
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite map coefficient".into()));
        }
        Ok(Self { dim, a, b })
    }

    /// 1-D map `x -> slope * x + offset`.
    pub fn line(slope: f64, offset: f64) -> Result<Self> {
        Self::new(vec![slope], vec![offset])
    }

    pub fn constant(b: Vec<f64>) -> Self {
        let dim = b.len();
        Self {
            dim,
            a: vec![0.0; dim * dim],
            b,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            a: linalg::identity(dim),
            b: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn translation(&self) -> &[f64] {
        &self.b
    }

    /// Coefficients as one flat vector: `A` row-major followed by `b`.
    pub fn coefficients(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub(crate) fn from_coefficients(dim: usize, coeffs: &[f64]) -> Self {
        Self {
            dim,
            a: coeffs[..dim * dim].to_vec(),
            b: coeffs[dim * dim..dim * dim + dim].to_vec(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.apply(x))
    }

    #[inline]
    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                self.a[i * d..(i + 1) * d]
                    .iter()
                    .zip(x)
                    .fold(self.b[i], |acc, (p, q)| acc + p * q)
            })
            .collect()
    }

    /// Lipschitz constant under the Euclidean metric: the largest singular
    /// value of `A`.
    pub fn contractivity(&self) -> f64 {
        linalg::spectral_norm(&self.a, self.dim)
    }

    /// `self ∘ inner`, i.e. `inner` is applied first.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        if inner.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: inner.dim,
            });
        }
        let a = linalg::matmul(&self.a, &inner.a, self.dim);
        let b = self.apply(&inner.b);
        Ok(AffineMap { dim: self.dim, a, b })
    }

    /// Whether every box vertex lands inside the box (within `CONTAINMENT_TOL`
    /// scaled to the box). Vertex containment is equivalent to image
    /// containment for convex targets.
    pub fn maps_into(&self, domain: &BoxDomain) -> Result<bool> {
        check_dim(self.dim, domain.dim())?;
        let tol = CONTAINMENT_TOL * domain.scale();
        let (lo, hi) = self.image_bounds(domain);
        Ok(lo
            .iter()
            .zip(&hi)
            .zip(domain.lo().iter().zip(domain.hi()))
            .all(|((a, b), (l, h))| *a >= l - tol && *b <= h + tol))
    }

    /// Axis-aligned bounding box of the image of `domain`.
    pub(crate) fn image_bounds(&self, domain: &BoxDomain) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut lo = self.b.clone();
        let mut hi = self.b.clone();
        for i in 0..d {
            for j in 0..d {
                let c = self.a[i * d + j];
                let (p, q) = (c * domain.lo()[j], c * domain.hi()[j]);
                lo[i] += p.min(q);
                hi[i] += p.max(q);
            }
        }
        (lo, hi)
    }

    /// Coefficient-wise comparison within `tol` (0 for exact).
    pub fn approx_eq(&self, other: &AffineMap, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .a
                .iter()
                .chain(&self.b)
                .zip(other.a.iter().chain(&other.b))
                .all(|(x, y)| (x - y).abs() <= tol)
    }
}

/// A value of the bounded metric, always in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MetricValue(f64);

impl MetricValue {
    pub fn new(v: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&v) {
            return Err(Error::Invalid(format!("metric value {v} outside [0, 1)")));
        }
        Ok(MetricValue(v))
    }

    /// Maps a raw distance `s >= 0` to `s / (1 + s)`.
    pub fn from_raw(s: f64) -> Self {
        MetricValue(s / (1.0 + s))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<MetricValue> for f64 {
    fn from(v: MetricValue) -> f64 {
        v.0
    }
}

impl std::fmt::Display for MetricValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn diff_norm(f: &AffineMap, g: &AffineMap, x: &[f64]) -> f64 {
    f.apply(x)
        .iter()
        .zip(g.apply(x))
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Exact `sup_{x in domain} |f(x) - g(x)|` by vertex enumeration.
pub fn sup_distance(f: &AffineMap, g: &AffineMap, domain: &BoxDomain) -> Result<f64> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), domain.dim())?;
    Ok(domain
        .vertices()?
        .iter()
        .map(|v| diff_norm(f, g, v))
        .fold(0.0, f64::max))
}

/// Bounded sup-metric `s / (1 + s)` with `s = sup_distance(f, g, domain)`.
pub fn dbar_inf(f: &AffineMap, g: &AffineMap, domain: &BoxDomain) -> Result<MetricValue> {
    sup_distance(f, g, domain).map(MetricValue::from_raw)
}

/// Regular sampling grid over a box.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    per_axis: Vec<usize>,
    domain: BoxDomain,
}

impl SampleGrid {
    /// Default grid: up to 10^4 points per axis, at most 10^6 in total.
    pub fn default_for(domain: &BoxDomain) -> Self {
        let d = domain.dim() as i32;
        let mut per = (SAMPLE_BUDGET as f64).powf(1.0 / d as f64).floor() as usize;
        while per.saturating_pow(d as u32) > SAMPLE_BUDGET {
            per -= 1;
        }
        Self::with_per_axis(domain, per.clamp(2, SAMPLES_PER_AXIS))
    }

    pub fn with_per_axis(domain: &BoxDomain, per_axis: usize) -> Self {
        let per_axis = domain
            .widths()
            .iter()
            .map(|&w| if w == 0.0 { 1 } else { per_axis.max(2) })
            .collect();
        Self {
            per_axis,
            domain: domain.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.per_axis.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest distance from a box point to the nearest grid point.
    pub fn covering_radius(&self) -> f64 {
        self.domain
            .widths()
            .iter()
            .zip(&self.per_axis)
            .map(|(w, &m)| if m <= 1 { 0.0 } else { w / (m - 1) as f64 / 2.0 })
            .map(|h| h * h)
            .sum::<f64>()
            .sqrt()
    }

    pub fn for_each_point(&self, mut visit: impl FnMut(&[f64])) {
        let d = self.domain.dim();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        for _ in 0..self.len() {
            for k in 0..d {
                let m = self.per_axis[k];
                x[k] = if m <= 1 {
                    self.domain.lo()[k]
                } else {
                    let t = idx[k] as f64 / (m - 1) as f64;
                    self.domain.lo()[k] + t * (self.domain.hi()[k] - self.domain.lo()[k])
                };
            }
            visit(&x);
            for (i, &m) in idx.iter_mut().zip(&self.per_axis) {
                *i += 1;
                if *i < m {
                    break;
                }
                *i = 0;
            }
        }
    }
}

/// Grid-sampled estimate of `sup |f(x) - g(x)|` for arbitrary maps.
///
/// This is the cross-check for [`sup_distance`]; the estimate is below the
/// true sup by at most `L * grid.covering_radius()` where `L` is the
/// Lipschitz constant of `x -> |f(x) - g(x)|`.
pub fn sampled_sup_distance_fn<F, G>(f: F, g: G, grid: &SampleGrid) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut best = 0.0_f64;
    grid.for_each_point(|x| {
        let d = f(x)
            .iter()
            .zip(g(x))
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        best = best.max(d);
    });
    best
}

pub fn sampled_sup_distance(
    f: &AffineMap,
    g: &AffineMap,
    domain: &BoxDomain,
    grid: Option<&SampleGrid>,
) -> Result<f64> {
    check_dim(f.dim(), g.dim())?;
    check_dim(f.dim(), domain.dim())?;
    let default;
    let grid = match grid {
        Some(g) => g,
        None => {
            default = SampleGrid::default_for(domain);
            &default
        }
    };
    Ok(sampled_sup_distance_fn(|x| f.apply(x), |x| g.apply(x), grid))
}

/// Lipschitz constant of `x -> |f(x) - g(x)|`, i.e. the spectral norm of
/// `A_f - A_g`.
pub fn difference_lipschitz(f: &AffineMap, g: &AffineMap) -> f64 {
    let diff: Vec<f64> = f.a.iter().zip(&g.a).map(|(p, q)| p - q).collect();
    linalg::spectral_norm(&diff, f.dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoxDomain {
        BoxDomain::unit(1)
    }

    #[test]
    fn eval_examples() {
        let f = AffineMap::line(1.0 / 3.0, 0.0).unwrap();
        assert!((f.eval(&[0.9]).unwrap()[0] - 0.3).abs() < 1e-15);
        let f2 = AffineMap::line(0.5, 0.5).unwrap();
        assert_eq!(f2.eval(&[1.0]).unwrap(), vec![1.0]);
        let t1 = AffineMap::constant(vec![0.0, 1.0]);
        assert_eq!(t1.eval(&[5.0, 5.0]).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            t1.eval(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn contractivity_examples() {
        assert!((AffineMap::line(1.0 / 3.0, 0.0).unwrap().contractivity() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(AffineMap::constant(vec![0.3, 0.2]).contractivity(), 0.0);
        assert!(matches!(AffineMap::line(1.0, 0.0), Err(Error::NotContraction(_))));
        assert!(matches!(
            AffineMap::new(vec![0.9, 0.9, 0.0, 0.1], vec![0.0, 0.0]),
            Err(Error::NotContraction(_))
        ));
    }

    #[test]
    fn sup_distance_examples() {
        let d = unit();
        let f1 = AffineMap::line(0.5, 0.0).unwrap();
        let g1 = AffineMap::line(1.0 / 3.0, 0.0).unwrap();
        let g2 = AffineMap::line(1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!((sup_distance(&f1, &g1, &d).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(sup_distance(&f1, &f1, &d).unwrap(), 0.0);
        assert!((sup_distance(&f1, &g2, &d).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dbar_examples() {
        let d = unit();
        let f1 = AffineMap::line(0.5, 0.0).unwrap();
        let g1 = AffineMap::line(1.0 / 3.0, 0.0).unwrap();
        assert!((dbar_inf(&f1, &g1, &d).unwrap().get() - 1.0 / 7.0).abs() < 1e-15);
        let f2 = AffineMap::line(0.5, 0.5).unwrap();
        assert_eq!(dbar_inf(&f2, &f2.clone(), &d).unwrap().get(), 0.0);
        let f3 = AffineMap::line(1.0 - 1.0 / 3.0, 0.0).unwrap();
        let id = AffineMap::identity(1);
        assert!((dbar_inf(&f3, &id, &d).unwrap().get() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn box_validation() {
        assert!(BoxDomain::new(vec![], vec![]).is_err());
        assert!(BoxDomain::new(vec![1.0], vec![0.0]).is_err());
        assert!(BoxDomain::new(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(BoxDomain::new(vec![0.0; 21], vec![1.0; 21]).unwrap().vertices().is_err());
        assert_eq!(BoxDomain::unit(3).vertices().unwrap().len(), 8);
    }

    #[test]
    fn maps_into_checks_vertices() {
        let d = BoxDomain::unit(2);
        let rot = AffineMap::new(vec![0.0, -0.5, 0.5, 0.0], vec![0.5, 0.0]).unwrap();
        assert!(rot.maps_into(&d).unwrap());
        let off = AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![0.6, 0.0]).unwrap();
        assert!(!off.maps_into(&d).unwrap());
    }

    #[test]
    fn sampled_grid_matches_exact_in_2d() {
        let d = BoxDomain::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        let f = AffineMap::new(vec![0.3, 0.2, -0.1, 0.4], vec![0.1, -0.2]).unwrap();
        let g = AffineMap::new(vec![-0.2, 0.1, 0.3, 0.0], vec![0.0, 0.5]).unwrap();
        let grid = SampleGrid::default_for(&d);
        assert_eq!(grid.len(), 1_000_000);
        let exact = sup_distance(&f, &g, &d).unwrap();
        let sampled = sampled_sup_distance(&f, &g, &d, Some(&grid)).unwrap();
        let slack = difference_lipschitz(&f, &g) * grid.covering_radius();
        assert!(sampled <= exact + 1e-12);
        assert!(exact - sampled <= slack + 1e-12);
    }

    #[test]
    fn degenerate_axis_grid() {
        let d = BoxDomain::new(vec![0.0, 0.5], vec![1.0, 0.5]).unwrap();
        let grid = SampleGrid::with_per_axis(&d, 11);
        assert_eq!(grid.len(), 11);
        let mut ys = Vec::new();
        grid.for_each_point(|x| ys.push(x[1]));
        assert!(ys.iter().all(|&y| y == 0.5));
    }
}
