//! On-disk cache of structure constants, one file per simple factor.
//!
//! File format (text, one nonzero bracket per line):
//!
//! ```text
//! # skt-holonomy chevalley constants
//! format chevalley-v1
//! type G2
//! E 2 0 1
//! N 1,0 0,1 1
//! N -1,0 1,1 -3
//! ```
//!
//! `E ξ α β` records an extraspecial pair by positive-root indices;
//! `N x y n` means `[E_x, E_y] = n·E_{x+y}` with roots given by signed
//! coordinates over the factor's simple roots.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::chevalley::{chevalley_constants, find_signed, root_sum, ExtraspecialPair};
use super::{build_root_system, CartanSpec, ChevalleyConstants, RootRef, RootSystem, SimpleFactor};
use crate::error::{Error, Result};

pub const CONVENTION_VERSION: &str = "chevalley-v1";
pub const CACHE_ENV_VAR: &str = "SKT_HOLONOMY_CACHE_DIR";

pub fn cache_dir_from_env() -> PathBuf {
    std::env::var_os(CACHE_ENV_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("skt-holonomy-cache"))
}

fn coords_text(c: &[i64]) -> String {
    c.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

impl ChevalleyConstants {
    /// Cache text for a single-factor root system.
    pub fn to_cache_text(&self, rs: &RootSystem) -> String {
        let mut out = String::from("# skt-holonomy chevalley constants\n");
        out.push_str(&format!("format {CONVENTION_VERSION}\n"));
        out.push_str(&format!("type {}\n", rs.spec()));
        for p in self.extraspecial_pairs() {
            out.push_str(&format!("E {} {} {}\n", p.root, p.alpha, p.beta));
        }
        for (&(x, y), &n) in self.iter() {
            out.push_str(&format!("N {} {} {n}\n", coords_text(&x.coords(rs)), coords_text(&y.coords(rs))));
        }
        out
    }

    /// Parses cache text and checks it against `rs`: every root pair with a
    /// root sum must be present with `|N| = p + 1`.
    pub fn from_cache_text(rs: &RootSystem, text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Cache(msg);
        let mut table = BTreeMap::new();
        let mut extraspecial = Vec::new();
        let mut format_ok = false;
        let mut type_ok = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["format", v] => format_ok = *v == CONVENTION_VERSION,
                ["type", t] => type_ok = *t == rs.spec().to_string(),
                ["E", xi, a, b] => {
                    let p = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("line {}: bad index", lineno + 1)));
                    extraspecial.push(ExtraspecialPair {
                        root: p(xi)?,
                        alpha: p(a)?,
                        beta: p(b)?,
                    });
                }
                ["N", x, y, n] => {
                    let parse_root = |s: &str| -> Result<RootRef> {
                        let c: Vec<i64> = s
                            .split(',')
                            .map(|t| t.parse::<i64>())
                            .collect::<Result<_, _>>()
                            .map_err(|_| bad(format!("line {}: bad coordinates {s:?}", lineno + 1)))?;
                        if c.len() != rs.rank() {
                            return Err(bad(format!("line {}: wrong rank", lineno + 1)));
                        }
                        find_signed(rs, &c).ok_or_else(|| bad(format!("line {}: {s} is not a root", lineno + 1)))
                    };
                    let n: i64 = n.parse().map_err(|_| bad(format!("line {}: bad constant", lineno + 1)))?;
                    table.insert((parse_root(x)?, parse_root(y)?), n);
                }
                _ => return Err(bad(format!("line {}: unrecognized {line:?}", lineno + 1))),
            }
        }
        if !format_ok || !type_ok {
            return Err(bad("header does not match format version or root system type".into()));
        }
        let m = rs.num_positive();
        let all: Vec<RootRef> = (0..m).map(RootRef::pos).chain((0..m).map(RootRef::neg)).collect();
        let mut expected = 0;
        for &x in &all {
            for &y in &all {
                if root_sum(rs, x, y).is_some() {
                    expected += 1;
                    let n = table.get(&(x, y)).ok_or_else(|| bad(format!("missing constant for {x:?},{y:?}")))?;
                    if n.abs() != super::chevalley::string_depth(rs, x, y) + 1 {
                        return Err(bad(format!("wrong magnitude for {x:?},{y:?}")));
                    }
                }
            }
        }
        if expected != table.len() {
            return Err(bad("constants for pairs whose sum is not a root".into()));
        }
        Ok(ChevalleyConstants::from_parts(table, extraspecial))
    }
}

fn cache_file(dir: &Path, factor: SimpleFactor) -> PathBuf {
    dir.join(format!("{CONVENTION_VERSION}-{factor}.txt"))
}

/// Constants for `rs`, loading and storing per-factor tables under `dir`.
/// Unreadable or stale cache files are recomputed and overwritten.
pub fn chevalley_constants_cached(rs: &RootSystem, dir: &Path) -> Result<ChevalleyConstants> {
    std::fs::create_dir_all(dir)?;
    let mut table = BTreeMap::new();
    let mut extraspecial = Vec::new();
    let mut offset = 0;
    for &factor in &rs.spec().factors {
        let local = build_root_system(&CartanSpec::new(vec![factor]))?;
        let path = cache_file(dir, factor);
        let cached = std::fs::read_to_string(&path)
            .ok()
            .and_then(|text| ChevalleyConstants::from_cache_text(&local, &text).ok());
        let cc = match cached {
            Some(cc) => cc,
            None => {
                let cc = chevalley_constants(&local);
                let tmp = path.with_extension("tmp");
                std::fs::write(&tmp, cc.to_cache_text(&local))?;
                std::fs::rename(&tmp, &path)?;
                log::debug!("wrote structure constants to {}", path.display());
                cc
            }
        };
        let embed = |r: RootRef| -> RootRef {
            let mut c = vec![0; rs.rank()];
            c[offset..offset + factor.rank].copy_from_slice(&r.coords(&local));
            find_signed(rs, &c).expect("factor roots embed")
        };
        for (&(x, y), &n) in cc.iter() {
            table.insert((embed(x), embed(y)), n);
        }
        for p in cc.extraspecial_pairs() {
            let g = |i: usize| embed(RootRef::pos(i)).index;
            extraspecial.push(ExtraspecialPair {
                root: g(p.root),
                alpha: g(p.alpha),
                beta: g(p.beta),
            });
        }
        offset += factor.rank;
    }
    extraspecial.sort_by_key(|p| p.root);
    Ok(ChevalleyConstants::from_parts(table, extraspecial))
}
