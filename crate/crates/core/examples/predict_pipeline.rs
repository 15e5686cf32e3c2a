//! Fits a run of frames, extrapolates the fitted coefficients and renders the
//! forecast. Frames come from `S_j = {x/3 + 1/(3j), 2/3 + x/3}`.
//!
//! ```text
//! cargo run --release --example predict_pipeline -- geometric 100
//! ```

use ifsmetric::attractor::{attractor_points, default_seed};
use ifsmetric::collage::{extrapolate, fit_sequence, ExtrapolationModel, FitConfig, ModelKind};
use ifsmetric::{big_d, hausdorff, Ifs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind: ModelKind = args.next().as_deref().unwrap_or("geometric").parse()?;
    let horizon: usize = args.next().map_or(Ok(100), |a| a.parse())?;

    let delta = 1e-4;
    let terms: Vec<Ifs> = (1..=5)
        .map(|j| Ifs::unit_interval(&[(1.0 / 3.0, 1.0 / (3.0 * j as f64)), (1.0 / 3.0, 2.0 / 3.0)]))
        .collect::<ifsmetric::Result<_>>()?;
    let frames = terms
        .iter()
        .map(|s| attractor_points(s, 8, &default_seed(s, delta)?))
        .collect::<ifsmetric::Result<Vec<_>>>()?;

    let fitted = fit_sequence(&frames, terms[0].domain(), &FitConfig::default())?;
    for (j, (fit, truth)) in fitted.sequence.terms().iter().zip(&terms).enumerate() {
        println!("frame {}: collage {:.2e}, D(fit, truth) = {:.2e}", j + 1, fitted.collage_distances[j], big_d(fit, truth)?);
    }

    let forecast = extrapolate(&fitted.sequence, &ExtrapolationModel::new(kind, horizon))?;
    for w in &forecast.warnings {
        println!("warning: {w}");
    }
    let cantor = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let rendered = attractor_points(&forecast.ifs, 10, &default_seed(&forecast.ifs, delta)?)?;
    let limit = attractor_points(&cantor, 10, &default_seed(&cantor, delta)?)?;
    println!("{kind:?} at horizon {horizon}: D to Cantor system {:.4}, h to Cantor set {:.4}", big_d(&forecast.ifs, &cantor)?, hausdorff(&rendered, &limit)?);
    Ok(())
}
