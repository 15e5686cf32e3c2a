//! Collage distances and bounds, collage fitting of affine IFSs to point sets,
//! and extrapolation of fitted sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attractor::{hutchinson, POINT_CAP};
use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::linalg;
use crate::metric::{check_dim, AffineMap, BoxDomain};
use crate::pointset::{hausdorff, NearestIndex, PointSet};
use crate::sequence::{align_chain, align_chain_with_permutations, IfsSequence};

/// Search images are snapped this much finer than the target.
const SEARCH_REFINEMENT: f64 = 1e-3;
/// Weight of the mean nearest distance in the search score.
const MEAN_WEIGHT: f64 = 0.1;

/// `h(L, W(L))`.
pub fn collage_distance(s: &Ifs, target: &PointSet) -> Result<f64> {
    hausdorff(target, &hutchinson(s, target)?)
}

/// Upper bound `eps / (1 - t)` on `h(L, A)` given collage distance `eps` and
/// contractivity `t`.
pub fn collage_bound(eps: f64, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Invalid(format!("contractivity must lie in [0, 1), got {t}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::Invalid(format!("collage distance must be >= 0, got {eps}")));
    }
    Ok(eps / (1.0 - t))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Number of maps to fit.
    pub n: usize,
    pub restarts: usize,
    /// Coordinate-descent sweeps per restart.
    pub max_iters: usize,
    /// Initial step as a fraction of the domain diameter.
    pub initial_step: f64,
    /// Step multiplier after a sweep without improvement.
    pub decay: f64,
    /// Contractivity cap enforced on every candidate.
    pub s_max: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n: 2,
            restarts: 8,
            max_iters: 200,
            initial_step: 0.1,
            decay: 0.7,
            s_max: 0.95,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("fit needs n >= 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Invalid("fit needs restarts >= 1".into()));
        }
        if !(self.s_max > 0.0 && self.s_max < 1.0) {
            return Err(Error::Invalid(format!("s_max must lie in (0, 1), got {}", self.s_max)));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) || !(self.initial_step > 0.0) {
            return Err(Error::Invalid("step schedule needs step > 0 and decay in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub ifs: Ifs,
    pub collage_distance: f64,
    /// Collage distance of the all-constant-maps baseline.
    pub baseline_distance: f64,
    /// Set when no candidate beat the baseline and the baseline was returned.
    pub used_baseline: bool,
    /// Index of the restart that produced the result.
    pub restart: usize,
    /// Search score (see [`fit_ifs`]) after each sweep of the winning restart.
    pub trace: Vec<f64>,
}

/// Projects a raw map onto the feasible set: spectral norm at most `s_max`
/// and image of `domain` inside `domain`.
pub fn project_map(map: &AffineMap, domain: &BoxDomain, s_max: f64) -> Result<AffineMap> {
    check_dim(map.dim(), domain.dim())?;
    let d = map.dim();
    let mut a = linalg::clamp_singular_values(map.matrix(), d, s_max);
    let widths = domain.widths();
    // Row k of the image spans sum_j |a_kj| w_j; shrink rows that overflow.
    for k in 0..d {
        let extent: f64 = (0..d).map(|j| a[k * d + j].abs() * widths[j]).sum();
        if extent > widths[k] {
            let f = if extent > 0.0 { widths[k] / extent * (1.0 - 1e-12) } else { 0.0 };
            for j in 0..d {
                a[k * d + j] *= f;
            }
        }
    }
    let mut out = AffineMap::unchecked(a, map.translation().to_vec())?;
    let (lo, hi) = out.image_bounds(domain);
    let mut b = out.translation().to_vec();
    for k in 0..d {
        if lo[k] < domain.lo()[k] {
            b[k] += domain.lo()[k] - lo[k];
        } else if hi[k] > domain.hi()[k] {
            b[k] -= hi[k] - domain.hi()[k];
        }
    }
    out = AffineMap::unchecked(out.matrix().to_vec(), b)?;
    Ok(out)
}

struct Objective<'a> {
    target: &'a PointSet,
    index: NearestIndex<'a>,
    domain: &'a BoxDomain,
    dim: usize,
}

impl<'a> Objective<'a> {
    fn new(target: &'a PointSet, domain: &'a BoxDomain) -> Self {
        Self {
            target,
            index: NearestIndex::new(target),
            domain,
            dim: target.dim(),
        }
    }

    fn maps_of(&self, params: &[f64]) -> Vec<AffineMap> {
        let stride = self.dim * self.dim + self.dim;
        params
            .chunks_exact(stride)
            .map(|c| AffineMap::from_coefficients(self.dim, c))
            .collect()
    }

    /// Search score `(eps + w·mean) / (1 - t)`: the collage bound on
    /// `h(L, A)`, with `eps` the collage distance of the unsnapped image and
    /// a small mean-distance term. Without the `1 - t` factor near-identity
    /// maps win (`W(L)` then barely moves `L`); snapping at the target pitch
    /// would make the score flat under small steps; the mean term breaks ties
    /// between candidates with the same worst point.
    fn eval(&self, params: &[f64]) -> f64 {
        let maps = self.maps_of(params);
        let mut raw = Vec::with_capacity(self.target.len() * maps.len() * self.dim);
        for m in &maps {
            for p in self.target.iter() {
                raw.extend(m.apply(p));
            }
        }
        let fine = self.target.resolution() * SEARCH_REFINEMENT;
        let image = PointSet::from_flat(self.dim, fine, &raw).expect("image of a nonempty set is nonempty");
        let (fwd_max, fwd_mean) = NearestIndex::new(&image).distance_stats(self.target);
        let (bwd_max, bwd_mean) = self.index.distance_stats(&image);
        let t = maps.iter().map(AffineMap::contractivity).fold(0.0, f64::max);
        (fwd_max.max(bwd_max) + MEAN_WEIGHT * 0.5 * (fwd_mean + bwd_mean)) / (1.0 - t)
    }

    fn project(&self, params: &mut [f64], s_max: f64) {
        let stride = self.dim * self.dim + self.dim;
        for chunk in params.chunks_exact_mut(stride) {
            let m = AffineMap::from_coefficients(self.dim, chunk);
            let p = project_map(&m, self.domain, s_max).expect("dimensions checked");
            chunk.copy_from_slice(&p.coefficients());
        }
    }
}

/// Maps tiling the target's bounding box: a `k x k` grid when `d = 2` and
/// `n = k²`, otherwise `n` equal strips along the longest axis.
fn tiling_init(bounds: &BoxDomain, n: usize) -> Vec<f64> {
    let d = bounds.dim();
    let widths = bounds.widths();
    let k = (n as f64).sqrt().round() as usize;
    let mut params = Vec::new();
    if d == 2 && k * k == n {
        let s = 1.0 / k as f64;
        for i in 0..n {
            let (gx, gy) = ((i % k) as f64, (i / k) as f64);
            let a = [s, 0.0, 0.0, s];
            let b = [
                bounds.lo()[0] * (1.0 - s) + gx * widths[0] * s,
                bounds.lo()[1] * (1.0 - s) + gy * widths[1] * s,
            ];
            params.extend(a.iter().chain(&b));
        }
        return params;
    }
    let axis = (0..d).max_by(|&x, &y| widths[x].total_cmp(&widths[y])).unwrap_or(0);
    let s = 1.0 / n as f64;
    for i in 0..n {
        let mut a = linalg::identity(d);
        a.iter_mut().for_each(|v| *v *= s);
        let b: Vec<f64> = (0..d)
            .map(|j| {
                let shift = if j == axis { i as f64 * widths[j] * s } else { 0.5 * widths[j] * (1.0 - s) };
                bounds.lo()[j] * (1.0 - s) + shift
            })
            .collect();
        params.extend(a.iter().chain(&b));
    }
    params
}

/// Orientation-preserving near-similitudes with random scale and placement.
fn random_init(bounds: &BoxDomain, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = bounds.dim();
    let mut params = Vec::new();
    for _ in 0..n {
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = if i == j { rng.gen_range(0.2..0.6) } else { rng.gen_range(-0.1..0.1) };
            }
        }
        let b: Vec<f64> = (0..d)
            .map(|j| bounds.lo()[j] + rng.gen_range(0.0..1.0) * bounds.widths()[j])
            .collect();
        params.extend(a.iter().chain(&b));
    }
    params
}

/// Search directions in parameter space, each a sparse list of
/// `(coordinate, weight)`. Besides single coefficients (matrix entries scaled
/// by the widest axis), every map gets "anchored" moves that shift the image
/// of the lower domain corner along one axis while the images of its
/// neighbouring corners stay put.
fn moves(domain: &BoxDomain, n: usize) -> Vec<Vec<(usize, f64)>> {
    let d = domain.dim();
    let stride = d * d + d;
    let widths: Vec<f64> = domain.widths().into_iter().map(|w| w.max(f64::MIN_POSITIVE)).collect();
    let max_width = widths.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for m in 0..n {
        let base = m * stride;
        for c in 0..stride {
            let w = if c < d * d { 1.0 / max_width } else { 1.0 };
            out.push(vec![(base + c, w)]);
        }
        for i in 0..d {
            let mut mv = vec![(base + d * d + i, 1.0)];
            mv.extend((0..d).map(|k| (base + i * d + k, -1.0 / widths[k])));
            out.push(mv);
        }
    }
    out
}

fn descend(obj: &Objective<'_>, mut params: Vec<f64>, cfg: &FitConfig) -> (Vec<f64>, f64, Vec<f64>) {
    obj.project(&mut params, cfg.s_max);
    let mut best = obj.eval(&params);
    let mut trace = vec![best];
    let diameter = obj.domain.diameter().max(f64::MIN_POSITIVE);
    let directions = moves(obj.domain, params.len() / (obj.dim * obj.dim + obj.dim));
    let mut step = cfg.initial_step * diameter;
    let floor = 1e-9 * diameter;
    for _ in 0..cfg.max_iters {
        let mut improved = false;
        for mv in &directions {
            for dir in [1.0, -1.0] {
                let mut cand = params.clone();
                for &(c, w) in mv {
                    cand[c] += dir * step * w;
                }
                obj.project(&mut cand, cfg.s_max);
                let v = obj.eval(&cand);
                if v < best {
                    params = cand;
                    best = v;
                    improved = true;
                    break;
                }
            }
        }
        trace.push(best);
        if !improved {
            step *= cfg.decay;
            if step < floor {
                break;
            }
        }
    }
    (params, best, trace)
}

fn baseline(obj: &Objective<'_>, n: usize) -> (Vec<f64>, f64) {
    let center: Vec<f64> = {
        let b = obj.target.bounds();
        b.lo().iter().zip(b.hi()).map(|(l, h)| 0.5 * (l + h)).collect()
    };
    let anchor = obj
        .target
        .iter()
        .min_by(|p, q| {
            let dp: f64 = p.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum();
            let dq: f64 = q.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum();
            dp.total_cmp(&dq)
        })
        .expect("nonempty target")
        .to_vec();
    let d = obj.dim;
    let mut params = Vec::new();
    for _ in 0..n {
        params.extend(std::iter::repeat_n(0.0, d * d));
        params.extend_from_slice(&anchor);
    }
    let v = obj.eval(&params);
    (params, v)
}

/// Fits `cfg.n` affine maps to `target` by random-restart coordinate descent.
///
/// The search minimizes the collage bound `(eps + 0.1·mean) / (1 - t)`
/// rather than the bare collage distance `eps`, which near-identity maps
/// drive towards zero without resembling the target's attractor.
/// `FitResult::collage_distance` is the snapped `h(L, W(L))` of the result.
pub fn fit_ifs(target: &PointSet, domain: &BoxDomain, cfg: &FitConfig) -> Result<FitResult> {
    fit_ifs_warm(target, domain, cfg, None)
}

/// [`fit_ifs`] with an optional warm start used as restart 0.
pub fn fit_ifs_warm(target: &PointSet, domain: &BoxDomain, cfg: &FitConfig, warm: Option<&Ifs>) -> Result<FitResult> {
    cfg.validate()?;
    check_dim(domain.dim(), target.dim())?;
    if !target.within(domain, target.resolution() * (target.dim() as f64).sqrt()) {
        return Err(Error::OutsideDomain);
    }
    let count = target.len() * cfg.n;
    if count > POINT_CAP {
        return Err(Error::ResourceCap { count, cap: POINT_CAP });
    }
    if let Some(w) = warm {
        if w.arity() != cfg.n {
            return Err(Error::ArityMismatch(cfg.n, w.arity()));
        }
        check_dim(domain.dim(), w.dim())?;
    }
    let obj = Objective::new(target, domain);
    let bounds = target.bounds();

    let mut inits: Vec<Vec<f64>> = Vec::with_capacity(cfg.restarts);
    if let Some(w) = warm {
        inits.push(w.maps().iter().flat_map(AffineMap::coefficients).collect());
    }
    inits.push(tiling_init(&bounds, cfg.n));
    for r in inits.len()..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        inits.push(random_init(&bounds, cfg.n, &mut rng));
    }
    inits.truncate(cfg.restarts);

    let runs: Vec<(Vec<f64>, f64, Vec<f64>)> = inits
        .into_par_iter()
        .map(|p| descend(&obj, p, cfg))
        .collect();
    // lowest objective, ties to the lowest restart index
    let (restart, (params, best, trace)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .expect("restarts >= 1");

    let (base_params, base_score) = baseline(&obj, cfg.n);
    let used_baseline = !(best < base_score);
    let (params, trace) = if used_baseline {
        (base_params.clone(), vec![base_score])
    } else {
        (params, trace)
    };
    let ifs = Ifs::new(domain.clone(), obj.maps_of(&params))?;
    let base_ifs = Ifs::new(domain.clone(), obj.maps_of(&base_params))?;
    Ok(FitResult {
        collage_distance: collage_distance(&ifs, target)?,
        baseline_distance: collage_distance(&base_ifs, target)?,
        ifs,
        used_baseline,
        restart,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceFit {
    /// Chain-aligned fitted sequence.
    pub sequence: IfsSequence,
    pub collage_distances: Vec<f64>,
    pub frames: Vec<FitResult>,
}

/// Fits every frame, warm-starting each from the previous fit, then aligns
/// the fitted terms as a chain.
pub fn fit_sequence(targets: &[PointSet], domain: &BoxDomain, cfg: &FitConfig) -> Result<SequenceFit> {
    if targets.is_empty() {
        return Err(Error::Empty("frame list"));
    }
    let mut frames: Vec<FitResult> = Vec::with_capacity(targets.len());
    for (i, target) in targets.iter().enumerate() {
        let warm = frames.last().map(|f| &f.ifs);
        let fit = fit_ifs_warm(target, domain, cfg, warm).map_err(|e| Error::Frame {
            frame: i + 1,
            source: Box::new(e),
        })?;
        frames.push(fit);
    }
    let sequence = align_chain(&IfsSequence::new(frames.iter().map(|f| f.ifs.clone()).collect())?)?;
    Ok(SequenceFit {
        sequence,
        collage_distances: frames.iter().map(|f| f.collage_distance).collect(),
        frames,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    HoldLast,
    Linear,
    GeometricDecay,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "last" | "hold-last" => Ok(ModelKind::HoldLast),
            "linear" | "linear-in-j" => Ok(ModelKind::Linear),
            "geometric" | "geometric-decay" => Ok(ModelKind::GeometricDecay),
            other => Err(Error::Invalid(format!("unknown extrapolation model '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationModel {
    pub kind: ModelKind,
    /// Steps past the last term; 0 reproduces the last term.
    pub horizon: usize,
    pub s_max: f64,
}

impl ExtrapolationModel {
    pub fn new(kind: ModelKind, horizon: usize) -> Self {
        Self {
            kind,
            horizon,
            s_max: FitConfig::default().s_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub ifs: Ifs,
    pub warnings: Vec<String>,
}

/// Least-squares slope of `values` against `j = 1, 2, …`.
fn ls_slope(values: &[f64]) -> f64 {
    let m = values.len() as f64;
    let mean_j = (m + 1.0) / 2.0;
    let mean_v = values.iter().sum::<f64>() / m;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let dj = (i + 1) as f64 - mean_j;
        num += dj * (v - mean_v);
        den += dj * dj;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn linear_forecast(values: &[f64], horizon: f64) -> f64 {
    values[values.len() - 1] + ls_slope(values) * horizon
}

/// `c + β ρ^j` through the last three values, evaluated `horizon` steps on.
/// `None` when the ratio is undefined or `|ρ| >= 1`.
fn geometric_forecast(values: &[f64], horizon: usize) -> Option<f64> {
    let m = values.len();
    let (a1, a2, a3) = (values[m - 3], values[m - 2], values[m - 1]);
    let (d1, d2) = (a2 - a1, a3 - a2);
    if d2 == 0.0 {
        return Some(a3);
    }
    if d1 == 0.0 {
        return None;
    }
    let rho = d2 / d1;
    if !(rho.abs() < 1.0) {
        return None;
    }
    Some(a3 + d2 * rho * (1.0 - rho.powi(horizon as i32)) / (1.0 - rho))
}

/// Per-slot, per-coefficient forecast of an aligned sequence.
pub fn extrapolate(seq: &IfsSequence, model: &ExtrapolationModel) -> Result<Extrapolation> {
    let needed = if model.kind == ModelKind::GeometricDecay { 3 } else { 2 };
    if seq.len() < needed {
        return Err(Error::Invalid(format!(
            "{:?} extrapolation needs at least {needed} terms, got {}",
            model.kind,
            seq.len()
        )));
    }
    if !(model.s_max > 0.0 && model.s_max < 1.0) {
        return Err(Error::Invalid(format!("s_max must lie in (0, 1), got {}", model.s_max)));
    }
    let seq = if seq.is_aligned() { seq.clone() } else { align_chain_with_permutations(seq)?.0 };
    let dim = seq.domain().dim();
    let mut warnings = Vec::new();
    let mut maps = Vec::with_capacity(seq.arity());
    for slot in 0..seq.arity() {
        let coeffs: Vec<Vec<f64>> = seq.slot(slot).iter().map(AffineMap::coefficients).collect();
        let forecast: Vec<f64> = (0..coeffs[0].len())
            .map(|c| {
                let series: Vec<f64> = coeffs.iter().map(|v| v[c]).collect();
                match model.kind {
                    ModelKind::HoldLast => series[series.len() - 1],
                    ModelKind::Linear => linear_forecast(&series, model.horizon as f64),
                    ModelKind::GeometricDecay => geometric_forecast(&series, model.horizon).unwrap_or_else(|| {
                        warnings.push(format!(
                            "slot {} coefficient {c}: no decaying geometric fit, used linear",
                            slot + 1
                        ));
                        linear_forecast(&series, model.horizon as f64)
                    }),
                }
            })
            .collect();
        let raw = AffineMap::from_coefficients(dim, &forecast);
        let last = &seq.slot(slot)[seq.len() - 1];
        // Keep the final term untouched when nothing moved.
        let m = if raw.approx_eq(last, 0.0) {
            last.clone()
        } else {
            project_map(&raw, seq.domain(), model.s_max)?
        };
        maps.push(m);
    }
    Ok(Extrapolation {
        ifs: Ifs::new(seq.domain().clone(), maps)?,
        warnings,
    })
}
