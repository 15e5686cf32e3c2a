//! Finite sequences of n-map IFSs and of single contractions.
//!
//! The asymptotic notions (decreasing from some index on, Cauchy, convergent)
//! are evaluated on the finite prefix at hand: each predicate reports the
//! smallest term index that witnesses it inside the data. Term indices are
//! 1-based throughout this module so they line up with `j` in `S_j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{big_d, is_mo_set, leq, minimal_order, Ifs, Permutation};
use crate::metric::{dbar_inf, AffineMap, BoxDomain};

/// Terms sharing one arity and one domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsSequence {
    terms: Vec<Ifs>,
    aligned: bool,
}

impl IfsSequence {
    pub fn new(terms: Vec<Ifs>) -> Result<Self> {
        let first = terms.first().ok_or(Error::Empty("IFS sequence"))?;
        for (frame, t) in terms.iter().enumerate().skip(1) {
            first.check_compatible(t).map_err(|e| Error::Frame {
                frame: frame + 1,
                source: Box::new(e),
            })?;
        }
        Ok(Self {
            terms,
            aligned: false,
        })
    }

    pub fn terms(&self) -> &[Ifs] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_aligned(&self) -> bool {
        self.aligned
    }

    pub fn last(&self) -> &Ifs {
        self.terms.last().expect("sequence is nonempty")
    }

    pub fn domain(&self) -> &BoxDomain {
        self.terms[0].domain()
    }

    pub fn arity(&self) -> usize {
        self.terms[0].arity()
    }

    /// Maps in slot `i` across all terms.
    pub fn slot(&self, i: usize) -> Vec<AffineMap> {
        self.terms.iter().map(|t| t.maps()[i].clone()).collect()
    }

    /// `D(S_j, S_k)` for all pairs, row-major `len x len`.
    pub fn pairwise_distances(&self) -> Result<Vec<f64>> {
        let m = self.len();
        let upper: Vec<(usize, usize, f64)> = (0..m)
            .flat_map(|j| (j + 1..m).map(move |k| (j, k)))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(j, k)| big_d(&self.terms[j], &self.terms[k]).map(|d| (j, k, d)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![0.0; m * m];
        for (j, k, d) in upper {
            out[j * m + k] = d;
            out[k * m + j] = d;
        }
        Ok(out)
    }
}

/// Reindexes each term to be minimally ordered with respect to the
/// (already reindexed) previous term. Returns the permutation applied to each
/// term; the first is always the identity.
pub fn align_chain_with_permutations(seq: &IfsSequence) -> Result<(IfsSequence, Vec<Permutation>)> {
    let mut terms: Vec<Ifs> = Vec::with_capacity(seq.len());
    let mut perms = Vec::with_capacity(seq.len());
    terms.push(seq.terms[0].clone());
    perms.push(Permutation::identity(seq.arity()));
    for t in &seq.terms[1..] {
        let (aligned, sigma) = minimal_order(terms.last().unwrap(), t)?;
        terms.push(aligned);
        perms.push(sigma);
    }
    Ok((IfsSequence { terms, aligned: true }, perms))
}

pub fn align_chain(seq: &IfsSequence) -> Result<IfsSequence> {
    align_chain_with_permutations(seq).map(|(s, _)| s)
}

fn aligned(seq: &IfsSequence) -> Result<std::borrow::Cow<'_, IfsSequence>> {
    if seq.aligned {
        Ok(std::borrow::Cow::Borrowed(seq))
    } else {
        align_chain(seq).map(std::borrow::Cow::Owned)
    }
}

/// Whether `S_{j+1} <= S_j` for each consecutive pair (index `j`).
fn step_flags(seq: &IfsSequence) -> Result<Vec<bool>> {
    let seq = aligned(seq)?;
    seq.terms
        .windows(2)
        .map(|w| leq(&w[1], &w[0]))
        .collect()
}

/// Smallest 1-based `k` whose pairs `j >= k` all satisfy `ok`, with at least
/// one pair in that tail. A sequence with no pairs yields `Some(1)`.
fn tail_start(ok: &[bool]) -> Option<usize> {
    if ok.is_empty() {
        return Some(1);
    }
    let mut k = ok.len();
    while k > 0 && ok[k - 1] {
        k -= 1;
    }
    (k < ok.len()).then_some(k + 1)
}

pub fn is_decreasing(seq: &IfsSequence) -> Result<bool> {
    Ok(step_flags(seq)?.into_iter().all(|b| b))
}

pub fn eventually_decreasing_at(seq: &IfsSequence) -> Result<Option<usize>> {
    Ok(tail_start(&step_flags(seq)?))
}

/// Smallest `N` such that every pair drawn from the terms with index `>= N`
/// is closer than `eps` under `dist` (`len x len`, row-major). The tail must
/// contain at least two terms unless the whole sequence has one.
fn cauchy_from(dist: &[f64], m: usize, eps: f64) -> Option<usize> {
    if m == 1 {
        return Some(1);
    }
    let mut tail_max = 0.0_f64;
    let mut best = None;
    for n in (0..m - 1).rev() {
        for k in n + 1..m {
            tail_max = tail_max.max(dist[n * m + k]);
        }
        if tail_max < eps {
            best = Some(n + 1);
        } else {
            break;
        }
    }
    best
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

pub fn cauchy_index(seq: &IfsSequence, eps: f64) -> Result<Option<usize>> {
    check_eps(eps)?;
    Ok(cauchy_from(&seq.pairwise_distances()?, seq.len(), eps))
}

/// Smallest `N` with `D(S_j, s) < eps` for every `j >= N`.
pub fn converges_to(seq: &IfsSequence, s: &Ifs, eps: f64) -> Result<Option<usize>> {
    check_eps(eps)?;
    let d = seq
        .terms
        .par_iter()
        .map(|t| big_d(t, s))
        .collect::<Result<Vec<_>>>()?;
    let mut start = None;
    for (j, v) in d.iter().enumerate().rev() {
        if *v < eps {
            start = Some(j + 1);
        } else {
            break;
        }
    }
    Ok(start)
}

/// Outcome of [`limit_of_contractions`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionLimit {
    /// The final term: affine Cauchy sequences are coefficient-wise Cauchy,
    /// so the last coefficients are the best available estimate.
    pub map: AffineMap,
    /// `min` of the contractivity factors over the decreasing tail.
    pub factor_bound: f64,
    pub decreasing_from: usize,
    pub cauchy_from: usize,
}

/// Limit candidate of an eventually decreasing, Cauchy sequence of
/// contractions.
pub fn limit_of_contractions(maps: &[AffineMap], domain: &BoxDomain, eps: f64) -> Result<ContractionLimit> {
    limit_in_slot(maps, domain, eps, 0)
}

fn limit_in_slot(maps: &[AffineMap], domain: &BoxDomain, eps: f64, slot: usize) -> Result<ContractionLimit> {
    check_eps(eps)?;
    let last = maps.last().ok_or(Error::Empty("contraction sequence"))?;
    let factors: Vec<f64> = maps.iter().map(AffineMap::contractivity).collect();
    let steps: Vec<bool> = factors.windows(2).map(|w| w[1] <= w[0]).collect();
    let decreasing_from = tail_start(&steps).ok_or(Error::NotEventuallyDecreasing { slot })?;

    let m = maps.len();
    let mut dist = vec![0.0; m * m];
    for j in 0..m {
        for k in j + 1..m {
            let d = dbar_inf(&maps[j], &maps[k], domain)?.get();
            dist[j * m + k] = d;
            dist[k * m + j] = d;
        }
    }
    let cauchy_from = cauchy_from(&dist, m, eps).ok_or(Error::NotCauchy { slot, eps })?;

    let factor_bound = factors[decreasing_from - 1..].iter().copied().fold(f64::INFINITY, f64::min);
    debug_assert!(last.contractivity() <= factor_bound + eps);
    Ok(ContractionLimit {
        map: last.clone(),
        factor_bound,
        decreasing_from,
        cauchy_from,
    })
}

/// Everything the sequence analysis found out about a finite IFS sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    /// Permutation applied to each term by chain alignment.
    pub permutations: Vec<Permutation>,
    /// `D(S_j, S_{j+1})` for consecutive aligned terms.
    pub consecutive_distances: Vec<f64>,
    /// `D(S_j, S_last)`.
    pub distances_to_last: Vec<f64>,
    /// `factor_traces[i][j]`: contractivity of slot `i` in term `j`.
    pub factor_traces: Vec<Vec<f64>>,
    pub decreasing: bool,
    pub eventually_decreasing_at: Option<usize>,
    pub cauchy_at: Option<usize>,
    /// Whether the terms form a minimally ordered set (the minimal-ordering
    /// relation is transitive on them).
    pub minimally_ordered_set: bool,
    pub limit_candidate: Option<Ifs>,
    /// Per-slot limiting contractivity bounds.
    pub factor_bounds: Vec<f64>,
    /// `max_{j >= cauchy_at} D(S_j, limit)`.
    pub residual: f64,
    pub notes: Vec<String>,
}

fn factor_traces(seq: &IfsSequence) -> Vec<Vec<f64>> {
    (0..seq.arity())
        .map(|i| seq.terms.iter().map(|t| t.maps()[i].contractivity()).collect())
        .collect()
}

fn base_report(seq: &IfsSequence, eps: f64) -> Result<(IfsSequence, SequenceReport)> {
    check_eps(eps)?;
    let (al, permutations) = align_chain_with_permutations(seq)?;
    let m = al.len();
    let dist = al.pairwise_distances()?;
    let steps = step_flags(&al)?;
    let report = SequenceReport {
        permutations,
        consecutive_distances: (0..m.saturating_sub(1)).map(|j| dist[j * m + j + 1]).collect(),
        distances_to_last: (0..m).map(|j| dist[j * m + m - 1]).collect(),
        factor_traces: factor_traces(&al),
        decreasing: steps.iter().all(|b| *b),
        eventually_decreasing_at: tail_start(&steps),
        cauchy_at: cauchy_from(&dist, m, eps),
        minimally_ordered_set: is_mo_set(al.terms())?,
        limit_candidate: None,
        factor_bounds: Vec::new(),
        residual: 0.0,
        notes: Vec::new(),
    };
    Ok((al, report))
}

fn attach_limit(al: &IfsSequence, report: &mut SequenceReport, eps: f64) -> Result<()> {
    let mut maps = Vec::with_capacity(al.arity());
    let mut bounds = Vec::with_capacity(al.arity());
    for slot in 0..al.arity() {
        let lim = limit_in_slot(&al.slot(slot), al.domain(), eps, slot)?;
        maps.push(lim.map);
        bounds.push(lim.factor_bound);
    }
    let limit = Ifs::new(al.domain().clone(), maps)?;
    let from = report.cauchy_at.unwrap_or(al.len()) - 1;
    let mut residual = 0.0_f64;
    for t in &al.terms[from..] {
        residual = residual.max(big_d(t, &limit)?);
    }
    report.limit_candidate = Some(limit);
    report.factor_bounds = bounds;
    report.residual = residual;
    Ok(())
}

fn structural_notes(report: &mut SequenceReport) {
    if !report.minimally_ordered_set {
        report
            .notes
            .push("minimal ordering is not transitive on these terms (not a minimally ordered set)".into());
    }
    if !report.decreasing {
        let note = match report.eventually_decreasing_at {
            Some(k) => format!("contractivity factors are non-monotone; decreasing from term {k}"),
            None => "contractivity factors are non-monotone and never settle into a decreasing tail".into(),
        };
        report.notes.push(note);
    }
}

/// Full analysis including the slotwise limit; fails if any slot violates
/// the limit preconditions.
pub fn limit_candidate(seq: &IfsSequence, eps: f64) -> Result<SequenceReport> {
    let (al, mut report) = base_report(seq, eps)?;
    attach_limit(&al, &mut report, eps)?;
    structural_notes(&mut report);
    Ok(report)
}

/// Like [`limit_candidate`] but records a failed limit construction as a
/// note instead of returning an error.
pub fn analyze(seq: &IfsSequence, eps: f64) -> Result<SequenceReport> {
    let (al, mut report) = base_report(seq, eps)?;
    if let Err(e) = attach_limit(&al, &mut report, eps) {
        report.notes.push(format!("no limit candidate: {e}"));
    }
    structural_notes(&mut report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_factors(factors: &[(f64, f64)]) -> IfsSequence {
        IfsSequence::new(
            factors
                .iter()
                .map(|&(a, b)| Ifs::unit_interval(&[(a, 0.0), (b, 1.0 - b)]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn tail_start_cases() {
        assert_eq!(tail_start(&[]), Some(1));
        assert_eq!(tail_start(&[true, true]), Some(1));
        assert_eq!(tail_start(&[true, false, true, true]), Some(3));
        assert_eq!(tail_start(&[false, false]), None);
        assert_eq!(tail_start(&[true, false]), None);
    }

    #[test]
    fn monotonicity_examples() {
        let s = with_factors(&[(0.5, 0.5)]);
        let constant = IfsSequence::new(vec![s.terms[0].clone(); 3]).unwrap();
        assert!(is_decreasing(&constant).unwrap());
        assert!(is_decreasing(&with_factors(&[(0.5, 0.5), (0.4, 0.45), (0.3, 0.4)])).unwrap());
        assert!(!is_decreasing(&with_factors(&[(0.3, 0.3), (0.5, 0.2)])).unwrap());
        let bump = with_factors(&[(0.5, 0.5), (0.4, 0.4), (0.45, 0.45), (0.3, 0.3), (0.2, 0.2)]);
        assert_eq!(eventually_decreasing_at(&bump).unwrap(), Some(3));
        let up = with_factors(&[(0.1, 0.1), (0.2, 0.2), (0.3, 0.3)]);
        assert_eq!(eventually_decreasing_at(&up).unwrap(), None);
    }

    #[test]
    fn cauchy_with_fixed_gap_never_settles() {
        // consecutive terms alternate between two IFSs at distance >= 0.5/1.5
        let a = Ifs::unit_interval(&[(0.0, 0.0)]).unwrap();
        let b = Ifs::unit_interval(&[(0.0, 0.5)]).unwrap();
        let seq = IfsSequence::new(vec![a.clone(), b.clone(), a, b]).unwrap();
        assert_eq!(cauchy_index(&seq, 0.1).unwrap(), None);
        assert!(cauchy_index(&seq, 0.0).is_err());
    }

    #[test]
    fn limit_preconditions() {
        let d = BoxDomain::unit(1);
        let rising: Vec<AffineMap> = (1..=100)
            .map(|n| AffineMap::line(1.0 - 1.0 / n as f64, 0.0).unwrap())
            .collect();
        assert!(matches!(
            limit_of_contractions(&rising, &d, 1e-3),
            Err(Error::NotEventuallyDecreasing { slot: 0 })
        ));
        let jumpy = vec![AffineMap::line(0.5, 0.0).unwrap(), AffineMap::line(0.4, 0.5).unwrap()];
        assert!(matches!(
            limit_of_contractions(&jumpy, &d, 1e-3),
            Err(Error::NotCauchy { slot: 0, .. })
        ));
        let f = AffineMap::line(0.25, 0.1).unwrap();
        let lim = limit_of_contractions(&[f.clone(), f.clone(), f.clone()], &d, 1e-6).unwrap();
        assert_eq!(lim.map, f);
        assert_eq!(lim.factor_bound, 0.25);
        assert_eq!((lim.decreasing_from, lim.cauchy_from), (1, 1));
    }

    #[test]
    fn mixed_arity_rejected() {
        let a = Ifs::unit_interval(&[(0.5, 0.0)]).unwrap();
        let b = Ifs::unit_interval(&[(0.5, 0.0), (0.5, 0.5)]).unwrap();
        assert!(matches!(
            IfsSequence::new(vec![a, b]),
            Err(Error::Frame { frame: 2, .. })
        ));
        assert!(IfsSequence::new(vec![]).is_err());
    }
}
