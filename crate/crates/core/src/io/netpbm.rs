//! Netpbm rasters (PBM `P1`/`P4`, PGM `P2`/`P5`) and their conversion to
//! point sets.

use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::BoxDomain;
use crate::pointset::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Bitmap,
    Graymap,
}

/// A decoded raster, row 0 at the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub kind: Kind,
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples. For bitmaps 1 means ink.
    pub samples: Vec<u16>,
}

/// Boolean foreground grid, row 0 at the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<u32> {
        self.skip_space();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok()
    }

    /// Single `0`/`1` digit, as plain PBM allows them unseparated.
    fn bit(&mut self) -> Option<u16> {
        self.skip_space();
        let v = match self.bytes.get(self.pos)? {
            b'0' => 0,
            b'1' => 1,
            _ => return None,
        };
        self.pos += 1;
        Some(v)
    }

    fn line(&self) -> usize {
        1 + self.bytes[..self.pos.min(self.bytes.len())].iter().filter(|b| **b == b'\n').count()
    }
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Raster> {
    let mut cur = Cursor { bytes, pos: 0 };
    let fail = |cur: &Cursor, msg: &str| Error::Parse {
        path: path.display().to_string(),
        line: cur.line(),
        msg: msg.into(),
    };
    let magic = bytes.get(..2).ok_or_else(|| fail(&cur, "file too short for a Netpbm header"))?;
    let (kind, binary) = match magic {
        b"P1" => (Kind::Bitmap, false),
        b"P4" => (Kind::Bitmap, true),
        b"P2" => (Kind::Graymap, false),
        b"P5" => (Kind::Graymap, true),
        _ => return Err(fail(&cur, "unsupported format: expected PBM (P1/P4) or PGM (P2/P5)")),
    };
    cur.pos = 2;
    let width = cur.number().ok_or_else(|| fail(&cur, "bad width"))? as usize;
    let height = cur.number().ok_or_else(|| fail(&cur, "bad height"))? as usize;
    if width == 0 || height == 0 {
        return Err(fail(&cur, "image has zero area"));
    }
    let maxval = match kind {
        Kind::Bitmap => 1,
        Kind::Graymap => match cur.number() {
            Some(m @ 1..=65535) => m as u16,
            _ => return Err(fail(&cur, "maxval must lie in 1..=65535")),
        },
    };
    let n = width * height;
    let mut samples = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates the header from the data.
        cur.pos += 1;
        let data = bytes.get(cur.pos..).unwrap_or_default();
        match kind {
            Kind::Bitmap => {
                let stride = width.div_ceil(8);
                if data.len() < stride * height {
                    return Err(fail(&cur, "truncated bitmap data"));
                }
                for r in 0..height {
                    for c in 0..width {
                        samples.push(((data[r * stride + c / 8] >> (7 - c % 8)) & 1) as u16);
                    }
                }
            }
            Kind::Graymap => {
                let wide = maxval > 255;
                let need = if wide { 2 * n } else { n };
                if data.len() < need {
                    return Err(fail(&cur, "truncated graymap data"));
                }
                if wide {
                    samples.extend(data[..need].chunks_exact(2).map(|p| u16::from_be_bytes([p[0], p[1]])));
                } else {
                    samples.extend(data[..n].iter().map(|&v| v as u16));
                }
            }
        }
    } else {
        for _ in 0..n {
            let v = match kind {
                Kind::Bitmap => cur.bit(),
                Kind::Graymap => cur.number().and_then(|v| u16::try_from(v).ok()),
            };
            samples.push(v.ok_or_else(|| fail(&cur, "missing or malformed sample"))?);
        }
    }
    if samples.iter().any(|&v| v > maxval) {
        return Err(fail(&cur, "sample exceeds maxval"));
    }
    Ok(Raster {
        kind,
        width,
        height,
        maxval,
        samples,
    })
}

pub fn read(path: &Path) -> Result<Raster> {
    decode(&std::fs::read(path)?, path)
}

impl Raster {
    /// Default foreground threshold: any ink for bitmaps, the upper half of
    /// the range (128 for 8-bit) for graymaps.
    pub fn default_threshold(&self) -> u16 {
        match self.kind {
            Kind::Bitmap => 1,
            Kind::Graymap => self.maxval / 2 + 1,
        }
    }

    /// Foreground is every sample `>= threshold`.
    pub fn mask(&self, threshold: Option<u16>) -> Mask {
        let t = threshold.unwrap_or_else(|| self.default_threshold());
        Mask {
            width: self.width,
            height: self.height,
            cells: self.samples.iter().map(|&v| v >= t).collect(),
        }
    }
}

/// Binary PGM with foreground at 255 on a 0 background.
pub fn encode_pgm(mask: &Mask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.cells.iter().map(|&c| if c { 255u8 } else { 0 }));
    out
}

/// Plain PBM with foreground as ink.
pub fn encode_pbm(mask: &Mask) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", mask.width, mask.height);
    for row in mask.cells.chunks(mask.width) {
        let line: Vec<&str> = row.iter().map(|&c| if c { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Pixel geometry of a raster placed on a box: pixel `(row, col)` sits at
/// `x = lo_x + col·pitch`, `y = lo_y + (height-1-row)·pitch`.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelGrid {
    pub width: usize,
    pub height: usize,
    pub pitch: f64,
    pub origin: Vec<f64>,
    /// Upper corner of the box the grid spans.
    pub extent: Vec<f64>,
}

impl PixelGrid {
    /// Unit-scale grid for an ingested raster: the longer side spans `[0, 1]`.
    /// Single-row images become 1-D.
    pub fn for_raster(width: usize, height: usize) -> Self {
        let longest = width.max(height);
        let pitch = if longest > 1 { 1.0 / (longest - 1) as f64 } else { 1.0 };
        // Divide once per axis so the longer side ends at exactly 1.
        let span = |cells: usize| if longest > 1 { (cells.max(2) - 1) as f64 / (longest - 1) as f64 } else { 1.0 };
        let mut extent = vec![span(width)];
        if height > 1 {
            extent.push(span(height));
        }
        Self {
            width,
            height,
            pitch,
            origin: vec![0.0; extent.len()],
            extent,
        }
    }

    /// Grid covering `domain` with `px` pixels along its widest axis.
    pub fn covering(domain: &BoxDomain, px: usize) -> Result<Self> {
        if px < 2 {
            return Err(Error::Invalid("image size must be at least 2 pixels".into()));
        }
        if domain.dim() > 2 {
            return Err(Error::Invalid(format!("cannot rasterize {}-d points", domain.dim())));
        }
        let widths = domain.widths();
        let widest = widths.iter().copied().fold(0.0, f64::max);
        if !(widest > 0.0) {
            return Err(Error::Invalid("cannot rasterize a zero-size domain".into()));
        }
        let pitch = widest / (px - 1) as f64;
        let cells = |w: f64| (w / pitch).round() as usize + 1;
        Ok(Self {
            width: cells(widths[0]),
            height: if domain.dim() == 2 { cells(widths[1]) } else { 1 },
            pitch,
            origin: domain.lo().to_vec(),
            extent: domain.hi().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// Box spanned by the pixel centers, never thinner than one pitch.
    pub fn domain(&self) -> BoxDomain {
        BoxDomain::new(self.origin.clone(), self.extent.clone()).expect("pixel grid spans a valid box")
    }

    /// Foreground pixel centers snapped to the pitch lattice.
    pub fn mask_to_points(&self, mask: &Mask) -> Result<PointSet> {
        let mut flat = Vec::new();
        for r in 0..mask.height {
            for c in 0..mask.width {
                if mask.cells[r * mask.width + c] {
                    flat.push(self.origin[0] + c as f64 * self.pitch);
                    if self.dim() == 2 {
                        flat.push(self.origin[1] + (mask.height - 1 - r) as f64 * self.pitch);
                    }
                }
            }
        }
        if flat.is_empty() {
            return Err(Error::Empty("image foreground"));
        }
        PointSet::from_flat(self.dim(), self.pitch, &flat)
    }

    /// Marks the pixel nearest to every point; points off the grid are
    /// dropped.
    pub fn points_to_mask(&self, points: &PointSet) -> Mask {
        let mut cells = vec![false; self.width * self.height];
        for p in points.iter() {
            let c = ((p[0] - self.origin[0]) / self.pitch).round();
            let rr = if self.dim() == 2 { ((p[1] - self.origin[1]) / self.pitch).round() } else { 0.0 };
            if c < 0.0 || rr < 0.0 || c >= self.width as f64 || rr >= self.height as f64 {
                continue;
            }
            let row = self.height - 1 - rr as usize;
            cells[row * self.width + c as usize] = true;
        }
        Mask {
            width: self.width,
            height: self.height,
            cells,
        }
    }
}

/// Reads a raster and turns its foreground into a point set on the unit-scale
/// grid.
pub fn read_points(path: &Path, threshold: Option<u16>) -> Result<(PointSet, PixelGrid)> {
    let raster = read(path)?;
    let grid = PixelGrid::for_raster(raster.width, raster.height);
    let points = grid.mask_to_points(&raster.mask(threshold)).map_err(|e| match e {
        Error::Empty(_) => Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: "image has no foreground pixels at this threshold".into(),
        },
        e => e,
    })?;
    Ok((points, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Raster {
        decode(s.as_bytes(), Path::new("t")).unwrap()
    }

    #[test]
    fn plain_formats() {
        let r = p("P1\n# c\n3 2\n1 0 1\n010\n");
        assert_eq!(r.samples, vec![1, 0, 1, 0, 1, 0]);
        assert_eq!(r.mask(None).count(), 3);
        let g = p("P2 2 2 255 0 127 128 255");
        assert_eq!(g.mask(None).cells, vec![false, false, true, true]);
        assert_eq!(g.mask(Some(1)).count(), 3);
    }

    #[test]
    fn binary_formats() {
        let mut pbm = b"P4\n10 2\n".to_vec();
        pbm.extend([0b1000_0000, 0b0100_0000, 0xff, 0xc0]);
        let r = decode(&pbm, Path::new("t")).unwrap();
        assert_eq!(r.mask(None).count(), 1 + 1 + 10);
        assert!(r.samples[0] == 1 && r.samples[9] == 1 && r.samples[8] == 0);

        let mask = Mask {
            width: 3,
            height: 2,
            cells: vec![true, false, true, false, false, true],
        };
        assert_eq!(decode(&encode_pgm(&mask), Path::new("t")).unwrap().mask(None), mask);
        assert_eq!(decode(&encode_pbm(&mask), Path::new("t")).unwrap().mask(None), mask);
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["P3 1 1 255 0", "P2 2 2 255 1 2 3", "P5\n2 2\n255\n\x01", "P2 1 1 10 11", "P1 0 3"] {
            assert!(decode(bad.as_bytes(), Path::new("t")).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn mask_points_round_trip() {
        let mask = Mask {
            width: 4,
            height: 3,
            cells: vec![true, false, false, true, false, true, false, false, true, true, false, true],
        };
        let grid = PixelGrid::for_raster(4, 3);
        let pts = grid.mask_to_points(&mask).unwrap();
        assert_eq!(pts.len(), mask.count());
        assert!(pts.within(&grid.domain(), 1e-12));
        assert_eq!(grid.points_to_mask(&pts), mask);
    }

    #[test]
    fn single_row_is_one_dimensional() {
        let grid = PixelGrid::for_raster(5, 1);
        let mask = Mask {
            width: 5,
            height: 1,
            cells: vec![true, false, false, false, true],
        };
        let pts = grid.mask_to_points(&mask).unwrap();
        assert_eq!(pts.dim(), 1);
        assert_eq!(pts.flat(), &[0.0, 1.0]);
        assert_eq!(grid.domain(), BoxDomain::unit(1));
        assert_eq!(PixelGrid::for_raster(730, 1).domain(), BoxDomain::unit(1));
        assert_eq!(PixelGrid::for_raster(3, 1000).domain().hi()[1], 1.0);
    }
}
