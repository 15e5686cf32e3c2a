//! File formats: JSON IFS specs and sequences, CSV point sets, Netpbm rasters.
//!
//! Every writer goes through [`write_atomic`], so a crashed run never leaves
//! a half-written output behind.

pub mod csv;
pub mod netpbm;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::Ifs;
use crate::metric::{AffineMap, BoxDomain};
use crate::sequence::IfsSequence;

/// Writes `bytes` to a sibling temp file, syncs it, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Invalid(format!("'{}' is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    /// Row-major `d x d` matrix.
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// On-disk form of an IFS.
///
/// ```json
/// {"dim": 1, "domain": {"lo": [0], "hi": [1]},
///  "maps": [{"A": [0.5], "b": [0]}, {"A": [0.5], "b": [0.5]}]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpecFile {
    pub dim: usize,
    pub domain: DomainSpec,
    pub maps: Vec<MapSpec>,
}

impl IfsSpecFile {
    pub fn from_ifs(s: &Ifs) -> Self {
        Self {
            dim: s.dim(),
            domain: DomainSpec {
                lo: s.domain().lo().to_vec(),
                hi: s.domain().hi().to_vec(),
            },
            maps: s
                .maps()
                .iter()
                .map(|m| MapSpec {
                    a: m.matrix().to_vec(),
                    b: m.translation().to_vec(),
                })
                .collect(),
        }
    }

    /// Validates shapes, contractivity and invariance. Errors name the
    /// offending field, e.g. `maps[1].A`.
    pub fn to_ifs(&self) -> std::result::Result<Ifs, String> {
        let d = self.dim;
        if d == 0 {
            return Err("dim: must be at least 1".into());
        }
        for (field, v) in [("domain.lo", &self.domain.lo), ("domain.hi", &self.domain.hi)] {
            if v.len() != d {
                return Err(format!("{field}: expected {d} entries, got {}", v.len()));
            }
        }
        let domain = BoxDomain::new(self.domain.lo.clone(), self.domain.hi.clone()).map_err(|e| format!("domain: {e}"))?;
        if self.maps.is_empty() {
            return Err("maps: an IFS needs at least one map".into());
        }
        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, m) in self.maps.iter().enumerate() {
            if m.a.len() != d * d {
                return Err(format!("maps[{i}].A: expected {} entries, got {}", d * d, m.a.len()));
            }
            if m.b.len() != d {
                return Err(format!("maps[{i}].b: expected {d} entries, got {}", m.b.len()));
            }
            maps.push(AffineMap::new(m.a.clone(), m.b.clone()).map_err(|e| format!("maps[{i}]: {e}"))?);
        }
        Ifs::new(domain, maps).map_err(|e| match e {
            Error::NotInvariant { index } => format!("maps[{index}]: does not send the domain into itself"),
            e => e.to_string(),
        })
    }
}

fn json_error(path: &Path, e: serde_json::Error) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        msg: e.to_string(),
    }
}

fn field_error(path: &Path, msg: String) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line: 0,
        msg,
    }
}

pub fn parse_ifs(text: &str, path: &Path) -> Result<Ifs> {
    let spec: IfsSpecFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    spec.to_ifs().map_err(|m| field_error(path, m))
}

pub fn read_ifs(path: &Path) -> Result<Ifs> {
    parse_ifs(&fs::read_to_string(path)?, path)
}

/// Pretty JSON. Floats are written in shortest round-trip form, so reading
/// the file back reproduces every coefficient bit for bit.
pub fn ifs_to_json(s: &Ifs) -> String {
    let mut text = serde_json::to_string_pretty(&IfsSpecFile::from_ifs(s)).expect("spec serializes");
    text.push('\n');
    text
}

pub fn write_ifs(path: &Path, s: &Ifs) -> Result<()> {
    write_atomic(path, ifs_to_json(s).as_bytes())
}

/// `{"terms": [spec, …]}` or a bare `[spec, …]`.
#[derive(Deserialize)]
#[serde(untagged)]
enum SequenceFile {
    Object { terms: Vec<IfsSpecFile> },
    Bare(Vec<IfsSpecFile>),
}

#[derive(Serialize)]
struct SequenceOut {
    terms: Vec<IfsSpecFile>,
}

pub fn parse_sequence(text: &str, path: &Path) -> Result<IfsSequence> {
    // Untagged enums swallow serde's position info; parse to a value first so
    // syntax errors keep their line number.
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    let specs = match serde_json::from_value::<SequenceFile>(value) {
        Ok(SequenceFile::Object { terms }) | Ok(SequenceFile::Bare(terms)) => terms,
        Err(e) => return Err(field_error(path, format!("expected {{\"terms\": [...]}} of IFS specs: {e}"))),
    };
    if specs.is_empty() {
        return Err(field_error(path, "terms: sequence is empty".into()));
    }
    let terms = specs
        .iter()
        .enumerate()
        .map(|(j, s)| s.to_ifs().map_err(|m| field_error(path, format!("terms[{j}].{m}"))))
        .collect::<Result<Vec<_>>>()?;
    IfsSequence::new(terms)
}

pub fn read_sequence(path: &Path) -> Result<IfsSequence> {
    parse_sequence(&fs::read_to_string(path)?, path)
}

pub fn sequence_to_json(seq: &IfsSequence) -> String {
    let out = SequenceOut {
        terms: seq.terms().iter().map(IfsSpecFile::from_ifs).collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("sequence serializes");
    text.push('\n');
    text
}

pub fn write_sequence(path: &Path, seq: &IfsSequence) -> Result<()> {
    write_atomic(path, sequence_to_json(seq).as_bytes())
}
