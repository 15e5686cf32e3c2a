//! Spec files, sequence files, CSV point sets and netpbm rasters: writes one
//! of each into a directory and reads them back.
//!
//! ```text
//! cargo run --example file_formats -- out/
//! ```

use std::path::PathBuf;

use ifsmetric::attractor::{attractor_points, default_seed};
use ifsmetric::io::{self, csv, netpbm};
use ifsmetric::sequence::IfsSequence;
use ifsmetric::Ifs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("ifsmetric-formats"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;

    let cantor = Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)])?;
    let spec = dir.join("cantor.json");
    io::write_ifs(&spec, &cantor)?;
    assert_eq!(io::read_ifs(&spec)?, cantor);
    println!("{}", std::fs::read_to_string(&spec)?);

    let seq = IfsSequence::new(vec![cantor.clone(), cantor.clone()])?;
    io::write_sequence(&dir.join("pair.json"), &seq)?;

    let points = attractor_points(&cantor, 4, &default_seed(&cantor, 1e-6)?)?;
    let points_csv = dir.join("cantor.csv");
    csv::write_points(&points_csv, &points)?;
    println!("{} points:\n{}", points.len(), csv::points_to_csv(&points));

    let grid = netpbm::PixelGrid::covering(cantor.domain(), 82)?;
    let raster = dir.join("cantor.pbm");
    io::write_atomic(&raster, &netpbm::encode_pbm(&grid.points_to_mask(&points)))?;
    let (back, back_grid) = netpbm::read_points(&raster, None)?;
    println!("raster: {} foreground pixels at pitch {:.6}", back.len(), back_grid.pitch);
    println!("wrote {}", dir.display());
    Ok(())
}
