//! The space of n-map IFSs on a fixed box with the permutation-matched metric
//!
//! ```text
//! D(S, T) = min_{σ ∈ S_n} Σ_i dbar(f_i, g_σ(i))
//! ```
//!
//! together with minimal ordering, the contractivity partial order and the
//! minimally-ordered-set check.

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::{Error, Result};
use crate::metric::{check_dim, dbar_inf, AffineMap, BoxDomain, MetricValue};

/// A hyperbolic IFS: `n >= 1` affine contractions of a box into itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ifs {
    domain: BoxDomain,
    maps: Vec<AffineMap>,
}

impl Ifs {
    pub fn new(domain: BoxDomain, maps: Vec<AffineMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Empty("IFS needs at least one map"));
        }
        for (index, m) in maps.iter().enumerate() {
            check_dim(domain.dim(), m.dim())?;
            let c = m.contractivity();
            if !(c < 1.0) {
                return Err(Error::NotContraction(c));
            }
            if !m.maps_into(&domain)? {
                return Err(Error::NotInvariant { index });
            }
        }
        Ok(Self { domain, maps })
    }

    /// 1-D IFS on `[0, 1]` from `(slope, offset)` pairs.
    pub fn unit_interval(maps: &[(f64, f64)]) -> Result<Self> {
        let maps = maps
            .iter()
            .map(|&(a, b)| AffineMap::line(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(BoxDomain::unit(1), maps)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    /// Number of maps.
    pub fn arity(&self) -> usize {
        self.maps.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Largest contractivity factor over the maps.
    pub fn contractivity(&self) -> f64 {
        self.factors().into_iter().fold(0.0, f64::max)
    }

    /// Per-slot contractivity factors.
    pub fn factors(&self) -> Vec<f64> {
        self.maps.iter().map(AffineMap::contractivity).collect()
    }

    /// The IFS whose slot `i` holds the current map `σ(i)`.
    pub fn reindexed(&self, sigma: &Permutation) -> Result<Ifs> {
        if sigma.len() != self.arity() {
            return Err(Error::ArityMismatch(self.arity(), sigma.len()));
        }
        Ok(Ifs {
            domain: self.domain.clone(),
            maps: sigma.image().iter().map(|&j| self.maps[j].clone()).collect(),
        })
    }

    pub fn check_compatible(&self, other: &Ifs) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch(self.arity(), other.arity()));
        }
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }
}

/// Bijection on `{0, …, n-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Invalid(format!("{image:?} is not a permutation")));
            }
        }
        Ok(Self(image))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ inner`: `i -> self(inner(i))`.
    pub fn compose(&self, inner: &Permutation) -> Permutation {
        Permutation(inner.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

impl std::fmt::Display for Permutation {
    /// `identity`, or the 1-based image list such as `(2 1)`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return f.write_str("identity");
        }
        let parts: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// `entry(i, j) = dbar(f_i, g_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<MetricValue>,
}

impl CostMatrix {
    pub fn from_entries(n: usize, entries: Vec<MetricValue>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    /// Builds from raw values, which must already lie in `[0, 1)`.
    pub fn from_values(n: usize, values: &[f64]) -> Result<Self> {
        let entries = values
            .iter()
            .map(|&v| MetricValue::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j].get()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|v| v.get()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values().chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> CostMatrix {
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        CostMatrix { n, entries }
    }

    pub fn assignment_cost(&self, sigma: &Permutation) -> f64 {
        assignment::assignment_cost(&self.values(), self.n, sigma.image())
    }
}

pub fn cost_matrix(s: &Ifs, t: &Ifs) -> Result<CostMatrix> {
    s.check_compatible(t)?;
    let entries = s
        .maps()
        .iter()
        .flat_map(|f| t.maps().iter().map(move |g| (f, g)))
        .map(|(f, g)| dbar_inf(f, g, s.domain()))
        .collect::<Result<Vec<_>>>()?;
    CostMatrix::from_entries(s.arity(), entries)
}

/// Minimum-cost permutation (lexicographically smallest among ties) and its cost.
pub fn optimal_matching(c: &CostMatrix) -> (Permutation, f64) {
    let (assign, cost) = assignment::lexicographic_optimum(&c.values(), c.n());
    (Permutation(assign), cost)
}

/// The IFS-space metric `D(S, T)`.
pub fn big_d(s: &Ifs, t: &Ifs) -> Result<f64> {
    let c = cost_matrix(s, t)?;
    let (assign, _) = assignment::hungarian(&c.values(), c.n());
    // Summing the matched entries in sorted order makes D(S,T) and D(T,S)
    // bit-identical.
    let mut matched: Vec<f64> = assign.iter().enumerate().map(|(i, &j)| c.get(i, j)).collect();
    matched.sort_by(f64::total_cmp);
    Ok(matched.iter().sum())
}

/// Reindexes `t` so the identity matching against `s` is optimal.
pub fn minimal_order(s: &Ifs, t: &Ifs) -> Result<(Ifs, Permutation)> {
    let (sigma, _) = optimal_matching(&cost_matrix(s, t)?);
    Ok((t.reindexed(&sigma)?, sigma))
}

/// Whether the identity matching of `t` against `s` attains `D(s, t)`.
pub fn is_minimally_ordered(t: &Ifs, wrt: &Ifs) -> Result<bool> {
    let c = cost_matrix(wrt, t)?;
    let (_, best) = assignment::hungarian(&c.values(), c.n());
    let id = c.assignment_cost(&Permutation::identity(c.n()));
    Ok(id <= best + assignment::TIE_TOL * best.abs().max(1.0))
}

/// `s <= t`: after aligning `t` to `s`, every factor of `s` is at most the
/// matching factor of `t`.
pub fn leq(s: &Ifs, t: &Ifs) -> Result<bool> {
    let (aligned, _) = minimal_order(s, t)?;
    Ok(s
        .factors()
        .iter()
        .zip(aligned.factors())
        .all(|(fs, ft)| *fs <= ft))
}

/// Whether "is minimally ordered with respect to" is transitive on `set`
/// (it is always reflexive and symmetric), checked over all ordered triples.
pub fn is_mo_set(set: &[Ifs]) -> Result<bool> {
    for w in set.windows(2) {
        w[0].check_compatible(&w[1])?;
    }
    let m = set.len();
    let mut rel = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            rel[a * m + b] = a == b || is_minimally_ordered(&set[b], &set[a])?;
        }
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if rel[a * m + b] && rel[b * m + c] && !rel[a * m + c] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Ifs {
        Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.5)]).unwrap()
    }
    fn t() -> Ifs {
        Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
    }
    fn u() -> Ifs {
        Ifs::unit_interval(&[(0.5, 0.5), (0.75, 0.0)]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            Ifs::new(BoxDomain::unit(1), vec![]),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.6)]),
            Err(Error::NotInvariant { index: 1 })
        ));
        let two_d = Ifs::new(BoxDomain::unit(2), vec![AffineMap::constant(vec![0.0, 0.0])]).unwrap();
        assert!(matches!(s().check_compatible(&two_d), Err(Error::ArityMismatch(2, 1))));
    }

    #[test]
    fn contractivity_examples() {
        assert!(close(t().contractivity(), 1.0 / 3.0));
        assert!(close(u().contractivity(), 0.75));
        let consts = Ifs::unit_interval(&[(0.0, 0.2), (0.0, 0.9)]).unwrap();
        assert_eq!(consts.contractivity(), 0.0);
    }

    #[test]
    fn cost_matrices_match_worked_example() {
        let st = cost_matrix(&s(), &t()).unwrap().values();
        for (got, want) in st.iter().zip([1.0 / 7.0, 2.0 / 5.0, 2.0 / 5.0, 1.0 / 7.0]) {
            assert!(close(*got, want));
        }
        let su = cost_matrix(&s(), &u()).unwrap().values();
        for (got, want) in su.iter().zip([1.0 / 3.0, 1.0 / 5.0, 0.0, 1.0 / 3.0]) {
            assert!(close(*got, want));
        }
        let ss = cost_matrix(&s(), &s()).unwrap();
        assert_eq!((ss.get(0, 0), ss.get(1, 1)), (0.0, 0.0));
    }

    #[test]
    fn matching_and_distance() {
        let (sigma, cost) = optimal_matching(&cost_matrix(&s(), &t()).unwrap());
        assert!(sigma.is_identity());
        assert!(close(cost, 2.0 / 7.0));
        let (sigma, cost) = optimal_matching(&cost_matrix(&s(), &u()).unwrap());
        assert_eq!(sigma.image(), &[1, 0]);
        assert_eq!(sigma.to_string(), "(2 1)");
        assert!(close(cost, 0.2));
        assert_eq!(big_d(&s(), &s()).unwrap(), 0.0);
        let flat = CostMatrix::from_values(3, &[0.3; 9]).unwrap();
        let (sigma, cost) = optimal_matching(&flat);
        assert!(sigma.is_identity());
        assert!(close(cost, 0.9));
    }

    #[test]
    fn minimal_order_examples() {
        let (reordered, sigma) = minimal_order(&s(), &u()).unwrap();
        assert_eq!(reordered.maps(), &[u().maps()[1].clone(), u().maps()[0].clone()]);
        assert_eq!(sigma.image(), &[1, 0]);
        let (same, sigma) = minimal_order(&s(), &t()).unwrap();
        assert_eq!(same, t());
        assert!(sigma.is_identity());
        assert!(is_minimally_ordered(&reordered, &s()).unwrap());
        assert!(!is_minimally_ordered(&u(), &s()).unwrap());
    }

    #[test]
    fn order_examples() {
        assert!(leq(&t(), &s()).unwrap());
        assert!(!leq(&s(), &t()).unwrap());
        assert!(leq(&s(), &s()).unwrap());
    }

    #[test]
    fn mo_set_with_common_shift() {
        let shifted = Ifs::unit_interval(&[(0.5, 0.1), (0.5, 0.4)]).unwrap();
        assert!(is_mo_set(&[s(), shifted]).unwrap());
        assert!(is_mo_set(&[s()]).unwrap());
        assert!(is_mo_set(&[]).unwrap());
    }

    #[test]
    fn permutation_algebra() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert_eq!(p.to_string(), "(3 1 2)");
        assert_eq!(Permutation::identity(3).to_string(), "identity");
    }
}
