//! Point sets as CSV: one point per line, comma-separated coordinates.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Number formatted with 12 significant digits, trailing zeros dropped.
/// Plain decimal notation for moderate exponents, scientific otherwise.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if !(-7..16).contains(&exp) {
        let m = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{sign}{m}e{exp}");
    } else if exp >= 11 {
        format!("{digits}{}", "0".repeat((exp - 11) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    format!("{sign}{body}")
}

pub fn points_to_csv(points: &PointSet) -> String {
    let mut out = String::with_capacity(points.len() * points.dim() * 14);
    for p in points.iter() {
        for (k, v) in p.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&sig12(*v));
        }
        out.push('\n');
    }
    out
}

pub fn write_points(path: &Path, points: &PointSet) -> Result<()> {
    super::write_atomic(path, points_to_csv(points).as_bytes())
}

/// Parses CSV points and snaps them to `resolution`. Blank lines and lines
/// starting with `#` are skipped; a non-numeric first row is taken as a
/// header.
pub fn parse_points(text: &str, path: &Path, resolution: f64) -> Result<PointSet> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    let mut dim = None;
    let mut flat = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        if std::mem::take(&mut first) && parsed.iter().all(Option::is_none) {
            continue;
        }
        let d = *dim.get_or_insert(fields.len());
        if fields.len() != d {
            return Err(err(i + 1, format!("expected {d} coordinates, got {}", fields.len())));
        }
        for (f, v) in fields.iter().zip(parsed) {
            match v {
                Some(v) if v.is_finite() => flat.push(v),
                _ => return Err(err(i + 1, format!("'{f}' is not a finite number"))),
            }
        }
    }
    let dim = dim.ok_or_else(|| err(0, "no points".into()))?;
    PointSet::from_flat(dim, resolution, &flat)
}

pub fn read_points(path: &Path, resolution: f64) -> Result<PointSet> {
    parse_points(&std::fs::read_to_string(path)?, path, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(-0.001953125), "-0.001953125");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(123456789012345.0), "123456789012000");
        assert_eq!(sig12(1e-9), "1e-9");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn parse_and_write_round_trip() {
        let text = "# comment\nx,y\n0.5, 0.25\n\n1,0\n";
        let p = parse_points(text, Path::new("p.csv"), 1e-6).unwrap();
        assert_eq!(p.len(), 2);
        let again = parse_points(&points_to_csv(&p), Path::new("q.csv"), 1e-6).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn ragged_rows_are_rejected_with_line() {
        let err = parse_points("0,1\n0.5\n", Path::new("p.csv"), 1e-3).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_points("0,1\n0.5,abc\n", Path::new("p.csv"), 1e-3).unwrap_err();
        assert!(err.to_string().contains("abc"));
    }
}
