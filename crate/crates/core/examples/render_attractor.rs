//! Renders attractors three ways: deterministic iteration, the chaos game and
//! code-space points, then writes a PGM of the Sierpinski triangle.
//!
//! ```text
//! cargo run --release --example render_attractor -- sierpinski.pgm
//! ```

use std::path::PathBuf;

use ifsmetric::attractor::{attractor_error_bound, attractor_points, chaos_game, code_point, default_seed, piece_gap, Address};
use ifsmetric::io::netpbm::{encode_pgm, PixelGrid};
use ifsmetric::io::write_atomic;
use ifsmetric::{hausdorff, AffineMap, BoxDomain, Ifs, PointSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("sierpinski.pgm"), PathBuf::from);

    let cantor = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let delta = 1e-4;
    let seed = default_seed(&cantor, delta)?;
    let render = attractor_points(&cantor, 12, &seed)?;
    let orbit = chaos_game(&cantor, 100_000, 50, 7, delta)?;
    println!("Cantor depth 12: {} points, iteration bound {:.2e}", render.len(), attractor_error_bound(&cantor, 12, &seed)?);
    println!("chaos game vs iteration: h = {:.2e}", hausdorff(&render, &orbit)?);
    let left = code_point(&cantor, &Address::new(vec![0; 5], 2)?, &[1.0])?;
    println!("code point 00000 from x = 1: {:.6} (3^-5 = {:.6})", left[0], 3f64.powi(-5));
    let grid = PointSet::lattice(cantor.domain(), 1e-3)?;
    println!("first-level gap: {:.4}", piece_gap(&cantor, &grid)?);

    let half = |bx: f64, by: f64| AffineMap::new(vec![0.5, 0.0, 0.0, 0.5], vec![bx, by]);
    let triangle = Ifs::new(BoxDomain::unit(2), vec![half(0.0, 0.0)?, half(0.5, 0.0)?, half(0.25, 0.5)?])?;
    let points = attractor_points(&triangle, 9, &default_seed(&triangle, 1e-3)?)?;
    let grid = PixelGrid::covering(triangle.domain(), 512)?;
    write_atomic(&out, &encode_pgm(&grid.points_to_mask(&points)))?;
    println!("Sierpinski depth 9: {} points, wrote {}", points.len(), out.display());
    Ok(())
}
