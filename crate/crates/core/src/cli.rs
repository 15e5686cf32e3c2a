//! Command implementations behind the `ifsmetric` binary.
//!
//! Each `cmd_*` function does the work of one subcommand and returns the text
//! to print plus an exit status; [`run`] adds argument handling and maps
//! errors to exit codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::attractor::{attractor_error_bound, attractor_points, default_resolution, default_seed};
use crate::collage::{collage_bound, extrapolate, fit_ifs, fit_sequence, ExtrapolationModel, FitConfig, ModelKind};
use crate::error::{Error, Result};
use crate::ifs::{big_d, cost_matrix, optimal_matching, Ifs};
use crate::io::{self, csv, netpbm};
use crate::metric::{difference_lipschitz, sampled_sup_distance, sup_distance, BoxDomain, SampleGrid};
use crate::pointset::PointSet;
use crate::rational::describe;
use crate::sequence::{align_chain, analyze, IfsSequence};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Environment variable that replaces the default RNG seed.
pub const SEED_ENV: &str = "IFSSEQ_SEED";

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::ResourceCap { .. } => EXIT_RESOURCE,
        Error::NotEventuallyDecreasing { .. } | Error::NotCauchy { .. } => EXIT_PRECONDITION,
        _ => EXIT_INPUT,
    }
}

/// Shared knobs of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Values below this print as exact zero.
    pub exact_tol: f64,
    /// Extra allowance when comparing against sampled estimates.
    pub sampled_tol: f64,
    /// Snapping pitch; `None` picks the per-dimension default.
    pub resolution: Option<f64>,
    pub depth: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            exact_tol: 1e-12,
            sampled_tol: 1e-6,
            resolution: None,
            depth: 10,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.exact_tol > 0.0 && self.sampled_tol > 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        if let Some(d) = self.resolution {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Invalid(format!("--delta must be positive, got {d}")));
            }
        }
        Ok(())
    }

    fn resolution_for(&self, dim: usize) -> f64 {
        self.resolution.unwrap_or_else(|| default_resolution(dim))
    }
}

/// Text to print and the exit status it should end with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self { report, code: EXIT_OK }
    }
}

fn exact(x: f64, cfg: &RunConfig) -> String {
    if x.abs() < cfg.exact_tol {
        "0".into()
    } else {
        describe(x)
    }
}

pub fn cmd_dist(a: &Path, b: &Path, cfg: &RunConfig) -> Result<Outcome> {
    let s = io::read_ifs(a)?;
    let t = io::read_ifs(b)?;
    s.check_compatible(&t)?;
    let c = cost_matrix(&s, &t)?;
    let (sigma, _) = optimal_matching(&c);
    let d = big_d(&s, &t)?;

    let mut out = format!("D = {}, sigma = {sigma}\n", exact(d, cfg));
    out.push_str("cost matrix (dbar_inf, rows: maps of A, columns: maps of B):\n");
    for row in c.rows() {
        let cells: Vec<String> = row.iter().map(|v| exact(*v, cfg)).collect();
        writeln!(out, "  [{}]", cells.join(", ")).unwrap();
    }
    // Sampled cross-check of the vertex-exact sup.
    let grid = SampleGrid::default_for(s.domain());
    let mut worst = 0.0_f64;
    let mut allowed = true;
    for f in s.maps() {
        for g in t.maps() {
            let exact_sup = sup_distance(f, g, s.domain())?;
            let sampled = sampled_sup_distance(f, g, s.domain(), Some(&grid))?;
            let gap = exact_sup - sampled;
            worst = worst.max(gap.abs());
            allowed &= gap >= -cfg.sampled_tol
                && gap <= difference_lipschitz(f, g) * grid.covering_radius() + cfg.sampled_tol;
        }
    }
    writeln!(
        out,
        "sampled check: {} points, max |exact - sampled| sup = {:.3e} ({})",
        grid.len(),
        worst,
        if allowed { "within grid allowance" } else { "OUTSIDE grid allowance" }
    )
    .unwrap();
    Ok(Outcome::ok(out))
}

fn render(s: &Ifs, cfg: &RunConfig) -> Result<(PointSet, f64)> {
    let seed = default_seed(s, cfg.resolution_for(s.dim()))?;
    let points = attractor_points(s, cfg.depth, &seed)?;
    let bound = attractor_error_bound(s, cfg.depth, &seed)?;
    Ok((points, bound))
}

fn write_image(path: &Path, points: &PointSet, domain: &BoxDomain, px: usize) -> Result<()> {
    let grid = netpbm::PixelGrid::covering(domain, px)?;
    let mask = grid.points_to_mask(points);
    let is_pbm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pbm"));
    let bytes = if is_pbm { netpbm::encode_pbm(&mask) } else { netpbm::encode_pgm(&mask) };
    io::write_atomic(path, &bytes)
}

pub fn cmd_attractor(spec: &Path, out: &Path, image: Option<(&Path, usize)>, cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let s = io::read_ifs(spec)?;
    let (points, bound) = render(&s, cfg)?;
    csv::write_points(out, &points)?;
    let mut report = format!(
        "points: {}\ndepth: {}, delta: {}\niteration error bound: {:.6e}\nwrote {}\n",
        points.len(),
        cfg.depth,
        points.resolution(),
        bound,
        out.display()
    );
    if let Some((img, px)) = image {
        write_image(img, &points, s.domain(), px)?;
        writeln!(report, "wrote {}", img.display()).unwrap();
    }
    Ok(Outcome::ok(report))
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| describe(*v)).collect::<Vec<_>>().join(", ")
}

fn term_index(i: Option<usize>) -> String {
    i.map_or_else(|| "none".into(), |k| format!("term {k}"))
}

/// Prints the sequence report. Exits with the precondition status when no
/// limit candidate exists.
pub fn cmd_analyze(seq_path: &Path, eps: f64, limit_out: Option<&Path>) -> Result<Outcome> {
    let seq = io::read_sequence(seq_path)?;
    let r = analyze(&seq, eps)?;
    let mut out = format!("terms: {}, maps per term: {}, eps: {eps}\n", seq.len(), seq.arity());
    let perms: Vec<String> = r.permutations.iter().map(ToString::to_string).collect();
    writeln!(out, "alignment permutations: {}", perms.join("; ")).unwrap();
    writeln!(out, "consecutive D: [{}]", join(&r.consecutive_distances)).unwrap();
    writeln!(out, "D to last term: [{}]", join(&r.distances_to_last)).unwrap();
    for (i, trace) in r.factor_traces.iter().enumerate() {
        writeln!(out, "slot {} contractivity: [{}]", i + 1, join(trace)).unwrap();
    }
    writeln!(out, "decreasing: {}", r.decreasing).unwrap();
    writeln!(out, "eventually decreasing from: {}", term_index(r.eventually_decreasing_at)).unwrap();
    writeln!(out, "cauchy from: {}", term_index(r.cauchy_at)).unwrap();
    writeln!(out, "minimally ordered set: {}", r.minimally_ordered_set).unwrap();
    let mut code = EXIT_OK;
    match &r.limit_candidate {
        Some(limit) => {
            match limit_out {
                Some(p) => {
                    io::write_ifs(p, limit)?;
                    writeln!(out, "limit candidate: wrote {}", p.display()).unwrap();
                }
                None => write!(out, "limit candidate:\n{}", io::ifs_to_json(limit)).unwrap(),
            }
            writeln!(out, "limit contractivity bounds: [{}]", join(&r.factor_bounds)).unwrap();
            writeln!(out, "residual: {}", describe(r.residual)).unwrap();
        }
        None => {
            out.push_str("limit candidate: none\n");
            code = EXIT_PRECONDITION;
        }
    }
    for note in &r.notes {
        writeln!(out, "note: {note}").unwrap();
    }
    Ok(Outcome { report: out, code })
}

fn has_csv_extension(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// A fitting target and the box it lives in.
#[derive(Clone, Debug)]
pub struct Target {
    pub points: PointSet,
    pub domain: BoxDomain,
}

/// Loads a raster (foreground pixels on the unit-scale pixel grid) or CSV
/// points (domain = their bounding box unless given).
pub fn load_target(path: &Path, threshold: Option<u16>, cfg: &RunConfig, domain: Option<&BoxDomain>) -> Result<Target> {
    if has_csv_extension(path) {
        let text = std::fs::read_to_string(path)?;
        let probe = csv::parse_points(&text, path, 1.0)?;
        let points = csv::parse_points(&text, path, cfg.resolution_for(probe.dim()))?;
        let domain = domain.cloned().unwrap_or_else(|| points.bounds());
        Ok(Target { points, domain })
    } else {
        let (points, grid) = netpbm::read_points(path, threshold)?;
        let domain = domain.cloned().unwrap_or_else(|| grid.domain());
        Ok(Target { points, domain })
    }
}

/// Parses `lo,hi[,lo,hi…]` into a box.
pub fn parse_domain(text: &str) -> Result<BoxDomain> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Invalid(format!("--domain '{text}': {e}")))?;
    if values.is_empty() || values.len() % 2 != 0 {
        return Err(Error::Invalid(format!("--domain '{text}': expected lo,hi pairs")));
    }
    let (lo, hi) = values.chunks(2).map(|p| (p[0], p[1])).unzip();
    BoxDomain::new(lo, hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub bytes: u64,
    /// FNV-1a 64 of the file contents.
    pub fnv1a64: String,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn record_input(path: &Path) -> Result<InputRecord> {
    let bytes = std::fs::read(path)?;
    Ok(InputRecord {
        path: path.display().to_string(),
        bytes: bytes.len() as u64,
        fnv1a64: format!("{:016x}", fnv1a64(&bytes)),
    })
}

/// Provenance record written next to the outputs of randomized commands.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub flags: serde_json::Value,
    pub seed: u64,
    pub seed_source: String,
    pub inputs: Vec<InputRecord>,
    pub run: RunConfig,
    pub fit: Option<FitConfig>,
    pub model: Option<ExtrapolationModel>,
    pub collage_distances: Vec<f64>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

impl Manifest {
    fn new(command: &str, flags: serde_json::Value, seed: &Seed, run: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            flags,
            seed: seed.value,
            seed_source: seed.source.into(),
            inputs: Vec::new(),
            run: run.clone(),
            fit: None,
            model: None,
            collage_distances: Vec::new(),
            outputs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        io::write_atomic(path, text.as_bytes())
    }
}

/// RNG seed and where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seed {
    pub value: u64,
    pub source: &'static str,
}

/// `--seed` wins, then `IFSSEQ_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<Seed> {
    if let Some(value) = flag {
        return Ok(Seed { value, source: "flag" });
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map(|value| Seed { value, source: "env" })
            .map_err(|_| Error::Invalid(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        None => Ok(Seed { value: 0, source: "default" }),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub struct CollageFitRequest<'a> {
    pub input: &'a Path,
    pub out: &'a Path,
    pub threshold: Option<u16>,
    pub domain: Option<BoxDomain>,
    pub fit: FitConfig,
}

pub fn cmd_collage_fit(req: &CollageFitRequest, cfg: &RunConfig, seed: &Seed, flags: serde_json::Value) -> Result<Outcome> {
    cfg.validate()?;
    let target = load_target(req.input, req.threshold, cfg, req.domain.as_ref())?;
    let fit = fit_ifs(&target.points, &target.domain, &req.fit)?;
    let t = fit.ifs.contractivity();
    io::write_ifs(req.out, &fit.ifs)?;

    let mut manifest = Manifest::new("collage-fit", flags, seed, cfg);
    manifest.inputs.push(record_input(req.input)?);
    manifest.fit = Some(req.fit.clone());
    manifest.collage_distances.push(fit.collage_distance);
    manifest.outputs.push(req.out.display().to_string());
    let mpath = manifest_path(req.out);
    manifest.write(&mpath)?;

    let mut out = format!(
        "target: {} points, dim {}, pitch {}\n",
        target.points.len(),
        target.points.dim(),
        target.points.resolution()
    );
    writeln!(out, "maps: {}, restarts: {}, seed: {}", req.fit.n, req.fit.restarts, req.fit.seed).unwrap();
    writeln!(out, "collage distance: {:.6e}", fit.collage_distance).unwrap();
    writeln!(out, "contractivity: {:.6}", t).unwrap();
    writeln!(out, "collage bound h(L, A) <= {:.6e}", collage_bound(fit.collage_distance, t)?).unwrap();
    if fit.used_baseline {
        writeln!(out, "note: no restart beat the constant-map baseline; returned the baseline").unwrap();
    }
    writeln!(out, "wrote {}\nwrote {}", req.out.display(), mpath.display()).unwrap();
    Ok(Outcome::ok(out))
}

pub struct PredictRequest<'a> {
    /// Directory of frames or a sequence file.
    pub input: &'a Path,
    pub out_dir: &'a Path,
    pub model: ExtrapolationModel,
    pub threshold: Option<u16>,
    pub domain: Option<BoxDomain>,
    pub fit: FitConfig,
    pub image_px: Option<usize>,
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| ["pgm", "pbm", "pnm", "csv"].contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Loads frames in file-name order. All frames share one box: the explicit
/// one, the common pixel grid, or the union of CSV bounding boxes.
pub fn load_frames(paths: &[PathBuf], threshold: Option<u16>, cfg: &RunConfig, domain: Option<&BoxDomain>) -> Result<(Vec<PointSet>, BoxDomain)> {
    let mut targets = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let t = load_target(p, threshold, cfg, domain).map_err(|e| Error::Frame {
            frame: i + 1,
            source: Box::new(e),
        })?;
        targets.push(t);
    }
    let first = targets.first().ok_or(Error::Empty("frame list"))?;
    let mut lo = first.domain.lo().to_vec();
    let mut hi = first.domain.hi().to_vec();
    for (i, t) in targets.iter().enumerate() {
        if t.points.dim() != lo.len() {
            return Err(Error::Frame {
                frame: i + 1,
                source: Box::new(Error::DimensionMismatch {
                    expected: lo.len(),
                    got: t.points.dim(),
                }),
            });
        }
        if domain.is_none() && !has_csv_extension(&paths[i]) && t.domain != first.domain {
            return Err(Error::Frame {
                frame: i + 1,
                source: Box::new(Error::Invalid("raster size differs from frame 1".into())),
            });
        }
        for k in 0..lo.len() {
            lo[k] = lo[k].min(t.domain.lo()[k]);
            hi[k] = hi[k].max(t.domain.hi()[k]);
        }
    }
    let domain = BoxDomain::new(lo, hi)?;
    Ok((targets.into_iter().map(|t| t.points).collect(), domain))
}

pub fn cmd_predict(req: &PredictRequest, cfg: &RunConfig, seed: &Seed, flags: serde_json::Value) -> Result<Outcome> {
    cfg.validate()?;
    let mut manifest = Manifest::new("predict", flags, seed, cfg);
    let mut out = String::new();
    let seq: IfsSequence = if req.input.is_dir() {
        let paths = frame_paths(req.input)?;
        if paths.len() < 2 {
            return Err(Error::Invalid(format!(
                "prediction needs at least 2 frames in {}, found {}",
                req.input.display(),
                paths.len()
            )));
        }
        for p in &paths {
            manifest.inputs.push(record_input(p)?);
        }
        let (frames, domain) = load_frames(&paths, req.threshold, cfg, req.domain.as_ref())?;
        let fitted = fit_sequence(&frames, &domain, &req.fit)?;
        writeln!(out, "frames: {}, fitted with {} maps each", frames.len(), req.fit.n).unwrap();
        writeln!(out, "collage distances: [{}]", fitted.collage_distances.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")).unwrap();
        manifest.fit = Some(req.fit.clone());
        manifest.collage_distances = fitted.collage_distances;
        fitted.sequence
    } else {
        manifest.inputs.push(record_input(req.input)?);
        let seq = io::read_sequence(req.input)?;
        if seq.len() < 2 {
            return Err(Error::Invalid("prediction needs at least 2 terms".into()));
        }
        writeln!(out, "terms: {}", seq.len()).unwrap();
        align_chain(&seq)?
    };
    let ext = extrapolate(&seq, &req.model)?;
    manifest.model = Some(req.model.clone());
    manifest.warnings = ext.warnings.clone();

    std::fs::create_dir_all(req.out_dir)?;
    let spec_path = req.out_dir.join("predicted.json");
    io::write_ifs(&spec_path, &ext.ifs)?;
    let (points, bound) = render(&ext.ifs, cfg)?;
    let csv_path = req.out_dir.join("attractor.csv");
    csv::write_points(&csv_path, &points)?;
    manifest.outputs.push(spec_path.display().to_string());
    manifest.outputs.push(csv_path.display().to_string());
    if let Some(px) = req.image_px {
        let img = req.out_dir.join("attractor.pgm");
        write_image(&img, &points, ext.ifs.domain(), px)?;
        manifest.outputs.push(img.display().to_string());
    }
    let mpath = req.out_dir.join("manifest.json");
    manifest.write(&mpath)?;

    writeln!(out, "model: {:?}, horizon: {}", req.model.kind, req.model.horizon).unwrap();
    writeln!(out, "predicted contractivity: {:.6}", ext.ifs.contractivity()).unwrap();
    writeln!(out, "rendered {} points (iteration error bound {:.3e})", points.len(), bound).unwrap();
    for w in &ext.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    for p in &manifest.outputs {
        writeln!(out, "wrote {p}").unwrap();
    }
    writeln!(out, "wrote {}", mpath.display()).unwrap();
    Ok(Outcome::ok(out))
}

/// IFS metrics, sequence analysis, attractors and collage fitting.
#[derive(Debug, Parser)]
#[command(name = "ifsmetric", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// D between two IFS spec files, with the optimal matching and cost matrix.
    Dist(DistArgs),
    /// Render an attractor by deterministic iteration.
    Attractor(AttractorArgs),
    /// Analyze a sequence file: alignment, monotonicity, Cauchy index, limit.
    Analyze(AnalyzeArgs),
    /// Fit an IFS to a raster or CSV point set.
    CollageFit(CollageFitArgs),
    /// Fit a frame sequence, extrapolate it and render the prediction.
    Predict(PredictArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct AttractorArgs {
    pub spec: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Snapping pitch (default 1e-4 in 1-D, 1e-3 otherwise).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a raster (.pgm or .pbm).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Raster size along the widest axis.
    #[arg(long, default_value_t = 512)]
    pub px: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    pub seq: PathBuf,
    #[arg(long)]
    pub eps: f64,
    /// Write the limit candidate here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// RNG seed; falls back to IFSSEQ_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0.95)]
    pub s_max: f64,
    /// Foreground threshold (default: nonzero for PBM, >= 128 for 8-bit PGM).
    #[arg(long)]
    pub threshold: Option<u16>,
    /// Box as lo,hi pairs per axis, e.g. 0,1 or 0,1,0,1.
    #[arg(long)]
    pub domain: Option<String>,
    /// Snapping pitch for CSV input.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct CollageFitArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value = "fit.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Directory of frames (.pgm/.pbm/.csv, file-name order) or a sequence file.
    pub input: PathBuf,
    #[arg(long, default_value = "geometric")]
    pub model: String,
    #[arg(long, default_value_t = 1)]
    pub horizon: usize,
    #[command(flatten)]
    pub fit: FitArgs,
    /// Render depth of the predicted attractor.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Also write attractor.pgm with this many pixels along the widest axis.
    #[arg(long)]
    pub px: Option<usize>,
    #[arg(long, default_value = "prediction")]
    pub out_dir: PathBuf,
}

fn fit_config(args: &FitArgs, seed: &Seed) -> FitConfig {
    FitConfig {
        n: args.n,
        restarts: args.restarts,
        max_iters: args.max_iters,
        s_max: args.s_max,
        seed: seed.value,
        ..FitConfig::default()
    }
}

fn flags_json<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or_default()
}

fn dispatch(cli: &Cli, env_seed: Option<&str>) -> Result<Outcome> {
    let base = RunConfig::default();
    match &cli.command {
        Command::Dist(a) => cmd_dist(&a.a, &a.b, &base),
        Command::Attractor(a) => {
            let cfg = RunConfig {
                resolution: a.delta,
                depth: a.depth,
                ..base
            };
            cmd_attractor(&a.spec, &a.out, a.image.as_deref().map(|p| (p, a.px)), &cfg)
        }
        Command::Analyze(a) => cmd_analyze(&a.seq, a.eps, a.out.as_deref()),
        Command::CollageFit(a) => {
            let seed = resolve_seed(a.fit.seed, env_seed)?;
            let cfg = RunConfig {
                resolution: a.fit.delta,
                seed: seed.value,
                ..base
            };
            let req = CollageFitRequest {
                input: &a.input,
                out: &a.out,
                threshold: a.fit.threshold,
                domain: a.fit.domain.as_deref().map(parse_domain).transpose()?,
                fit: fit_config(&a.fit, &seed),
            };
            cmd_collage_fit(&req, &cfg, &seed, flags_json(a))
        }
        Command::Predict(a) => {
            let seed = resolve_seed(a.fit.seed, env_seed)?;
            let cfg = RunConfig {
                resolution: a.fit.delta,
                depth: a.depth,
                seed: seed.value,
                ..base
            };
            let fit = fit_config(&a.fit, &seed);
            let mut model = ExtrapolationModel::new(a.model.parse::<ModelKind>()?, a.horizon);
            model.s_max = fit.s_max;
            let req = PredictRequest {
                input: &a.input,
                out_dir: &a.out_dir,
                model,
                threshold: a.fit.threshold,
                domain: a.fit.domain.as_deref().map(parse_domain).transpose()?,
                fit,
                image_px: a.px,
            };
            cmd_predict(&req, &cfg, &seed, flags_json(a))
        }
    }
}

/// Runs a parsed command line, printing the report or the error, and returns
/// the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    match dispatch(cli, env_seed.as_deref()) {
        Ok(o) => {
            print!("{}", o.report);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(5), Some("7")).unwrap(), Seed { value: 5, source: "flag" });
        assert_eq!(resolve_seed(None, Some("7")).unwrap(), Seed { value: 7, source: "env" });
        assert_eq!(resolve_seed(None, None).unwrap().value, 0);
        assert!(resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::ResourceCap { count: 9, cap: 1 }), EXIT_RESOURCE);
        let nested = Error::Frame {
            frame: 2,
            source: Box::new(Error::NotEventuallyDecreasing { slot: 1 }),
        };
        assert_eq!(exit_code(&nested), EXIT_PRECONDITION);
        assert_eq!(exit_code(&Error::Invalid("x".into())), EXIT_INPUT);
    }

    #[test]
    fn domain_flag() {
        assert_eq!(parse_domain("0,1").unwrap(), BoxDomain::unit(1));
        assert_eq!(parse_domain("0, 1, 0, 1").unwrap(), BoxDomain::unit(2));
        assert!(parse_domain("0,1,2").is_err());
        assert!(parse_domain("a,b").is_err());
    }

    #[test]
    fn manifest_path_sits_next_to_output() {
        assert_eq!(manifest_path(Path::new("out/fit.json")), PathBuf::from("out/fit.manifest.json"));
    }
}
