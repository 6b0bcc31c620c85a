//! Line-oriented field catalog.
//!
//! ```text
//! [field]
//! name = Q(sqrt(-5))
//! degree = 2
//! r1 = 0
//! r2 = 1
//! minpoly = 5, 0, 1        # constant term first
//! basis = 1, 0; 0, 1       # power-basis coordinates, rationals as p/q
//! disc = -20
//!
//! [ideal]                  # belongs to the preceding field
//! name = (2, 1+sqrt(-5))
//! basis = 2, 0; 1, 1
//! norm = 2
//! class = c1
//! principal = false
//! ```
//!
//! `#` starts a comment. Keys are `name, degree, r1, r2, minpoly, basis,
//! disc` for fields and `name, basis, norm, class, principal` for ideals.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;

use super::rational::Q;
use super::{FieldSpec, IdealSpec};
use crate::{Error, Result};

const BUILTIN: &str = include_str!("../../data/catalog.txt");

#[derive(Debug)]
enum Kind {
    Field,
    Ideal,
}

#[derive(Debug)]
struct Section {
    kind: Kind,
    line: usize,
    keys: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Result<(usize, String)> {
        self.keys.remove(key).ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("missing key `{key}`"),
        })
    }

    fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, raw) = self.take(key)?;
        raw.parse().map_err(|_| Error::Parse { line, message: format!("bad value for `{key}`: `{raw}`") })
    }

    fn finish(self) -> Result<()> {
        match self.keys.into_iter().next() {
            Some((key, (line, _))) => Err(Error::Parse { line, message: format!("unknown key `{key}`") }),
            None => Ok(()),
        }
    }
}

fn parse_rational(raw: &str, line: usize) -> Result<Q> {
    let bad = || Error::Parse { line, message: format!("bad rational `{raw}`") };
    let raw = raw.trim();
    match raw.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Q::new(p, q))
        }
        None => Ok(Q::from_integer(raw.parse().map_err(|_| bad())?)),
    }
}

fn parse_vectors(raw: &str, line: usize) -> Result<Vec<Vec<Q>>> {
    raw.split(';')
        .map(|v| v.split(',').map(|x| parse_rational(x, line)).collect())
        .collect()
}

fn parse_integers(raw: &str, line: usize) -> Result<Vec<i64>> {
    raw.split(',')
        .map(|x| {
            x.trim().parse().map_err(|_| Error::Parse { line, message: format!("bad integer `{}`", x.trim()) })
        })
        .collect()
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        match content {
            "[field]" => out.push(Section { kind: Kind::Field, line, keys: BTreeMap::new() }),
            "[ideal]" => {
                if !out.iter().any(|s| matches!(s.kind, Kind::Field)) {
                    return Err(Error::Parse { line, message: "[ideal] before any [field]".into() });
                }
                out.push(Section { kind: Kind::Ideal, line, keys: BTreeMap::new() })
            }
            _ if content.starts_with('[') => {
                return Err(Error::Parse { line, message: format!("unknown section `{content}`") });
            }
            _ => {
                let Some((key, value)) = content.split_once('=') else {
                    return Err(Error::Parse { line, message: format!("expected `key = value`, got `{content}`") });
                };
                let Some(section) = out.last_mut() else {
                    return Err(Error::Parse { line, message: "key outside of a section".into() });
                };
                let key = key.trim().to_string();
                if section.keys.insert(key.clone(), (line, value.trim().to_string())).is_some() {
                    return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
                }
            }
        }
    }
    Ok(out)
}

struct RawField {
    name: String,
    degree: usize,
    r1: usize,
    r2: usize,
    min_poly: Vec<i64>,
    basis: Vec<Vec<Q>>,
    disc: i64,
    ideals: Vec<IdealSpec>,
}

/// Parses and validates a catalog.
pub fn parse_catalog(text: &str) -> Result<Vec<FieldSpec>> {
    let mut raw: Vec<RawField> = Vec::new();
    for mut s in sections(text)? {
        match s.kind {
            Kind::Field => {
                let name = s.take("name")?.1;
                let degree = s.take_parsed("degree")?;
                let r1 = s.take_parsed("r1")?;
                let r2 = s.take_parsed("r2")?;
                let (l, v) = s.take("minpoly")?;
                let min_poly = parse_integers(&v, l)?;
                let (l, v) = s.take("basis")?;
                let basis = parse_vectors(&v, l)?;
                let disc = s.take_parsed("disc")?;
                s.finish()?;
                raw.push(RawField { name, degree, r1, r2, min_poly, basis, disc, ideals: Vec::new() });
            }
            Kind::Ideal => {
                let label = s.take("name")?.1;
                let (l, v) = s.take("basis")?;
                let z_basis = parse_vectors(&v, l)?;
                let norm = s.take_parsed("norm")?;
                let class_label = s.take("class")?.1;
                let principal = s.take_parsed("principal")?;
                s.finish()?;
                let field = raw.last_mut().expect("checked while sectioning");
                field.ideals.push(IdealSpec { label, z_basis, norm, class_label, principal });
            }
        }
    }
    raw.into_iter()
        .map(|f| FieldSpec::new(f.name, f.degree, (f.r1, f.r2), f.min_poly, f.basis, f.disc, f.ideals))
        .collect()
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Vec<FieldSpec>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

/// The catalog shipped with the crate.
pub fn builtin_catalog() -> Vec<FieldSpec> {
    parse_catalog(BUILTIN).expect("built-in catalog is valid")
}

pub fn builtin_catalog_text() -> &'static str {
    BUILTIN
}
