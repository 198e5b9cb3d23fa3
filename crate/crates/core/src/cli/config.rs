//! TOML run configuration.
//!
//! ```toml
//! [group]
//! factors = "A2"                 # or ["A1", "A1"]
//!
//! [complex_structure]
//! j_torus = "auto"               # or [["0", "-1"], ["1", "0"]]
//!
//! [metric]
//! lambda = ["1"]                 # one per simple factor, default all 1
//! c_simple = { a1 = "2", a2 = "1" }
//!
//! [submersion]
//! sets = "all"                   # or [[], ["a2"]]
//! max_subsets = 64
//!
//! [output]
//! path = "report.json"
//!
//! [mode]
//! skip_holonomy = false
//! checks_only = false
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::rootsys::{CartanSpec, SimpleFactor};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Factors {
    Joined(String),
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TorusStructure {
    Keyword(String),
    Matrix(Vec<Vec<Scalar>>),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SubmersionSets {
    Keyword(String),
    List(Vec<Vec<String>>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub factors: Factors,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexStructureSection {
    #[serde(default = "auto")]
    pub j_torus: TorusStructure,
}

fn auto() -> TorusStructure {
    TorusStructure::Keyword("auto".into())
}

impl Default for ComplexStructureSection {
    fn default() -> Self {
        Self { j_torus: auto() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    #[serde(default)]
    pub lambda: Option<Vec<Scalar>>,
    pub c_simple: BTreeMap<String, Scalar>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SubmersionSection {
    #[serde(default)]
    pub sets: Option<SubmersionSets>,
    #[serde(default = "default_max_subsets")]
    pub max_subsets: usize,
}

fn default_max_subsets() -> usize {
    64
}

impl Default for SubmersionSection {
    fn default() -> Self {
        Self {
            sets: None,
            max_subsets: default_max_subsets(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    #[serde(default)]
    pub skip_holonomy: bool,
    #[serde(default)]
    pub checks_only: bool,
}

/// File-level layout; see [`RunConfig`] for the validated form.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub group: GroupSection,
    #[serde(default)]
    pub complex_structure: ComplexStructureSection,
    pub metric: MetricSection,
    #[serde(default)]
    pub submersion: SubmersionSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub mode: ModeSection,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SubsetChoice {
    All,
    Listed(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub group: CartanSpec,
    /// `None` for the automatic compatible choice.
    pub j_torus: Option<Matrix>,
    pub lambda: Option<Vec<Scalar>>,
    /// Simple-root label (`a1`, `a2`, …) to coefficient.
    pub c_simple: BTreeMap<String, Scalar>,
    pub submersion_sets: Option<SubsetChoice>,
    pub max_subsets: usize,
    pub output: Option<PathBuf>,
    pub skip_holonomy: bool,
    pub checks_only: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let names: Vec<String> = match raw.group.factors {
            Factors::Joined(s) => s.split('+').map(|p| p.trim().to_string()).collect(),
            Factors::List(v) => v,
        };
        let factors = names
            .iter()
            .map(|s| s.parse::<SimpleFactor>().map_err(|e| ConfigError::Invalid(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if factors.is_empty() {
            return Err(ConfigError::Invalid("group.factors is empty".into()));
        }
        let j_torus = match raw.complex_structure.j_torus {
            TorusStructure::Keyword(k) if k == "auto" => None,
            TorusStructure::Keyword(k) => {
                return Err(ConfigError::Invalid(format!(
                    "complex_structure.j_torus must be \"auto\" or a matrix, got {k:?}"
                )))
            }
            TorusStructure::Matrix(rows) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(ConfigError::Invalid("complex_structure.j_torus is not square".into()));
                }
                Some(Matrix::from_rows(rows))
            }
        };
        let submersion_sets = match raw.submersion.sets {
            None => None,
            Some(SubmersionSets::Keyword(k)) if k == "all" => Some(SubsetChoice::All),
            Some(SubmersionSets::Keyword(k)) => {
                return Err(ConfigError::Invalid(format!("submersion.sets must be \"all\" or a list, got {k:?}")))
            }
            Some(SubmersionSets::List(v)) => Some(SubsetChoice::Listed(v)),
        };
        Ok(Self {
            group: CartanSpec::new(factors),
            j_torus,
            lambda: raw.metric.lambda,
            c_simple: raw.metric.c_simple,
            submersion_sets,
            max_subsets: raw.submersion.max_subsets,
            output: raw.output.path,
            skip_holonomy: raw.mode.skip_holonomy,
            checks_only: raw.mode.checks_only,
        })
    }

    /// The configuration in file layout, with every number as an exact string.
    pub fn to_raw(&self) -> RawConfig {
        let j_torus = match &self.j_torus {
            None => auto(),
            Some(m) => TorusStructure::Matrix((0..m.rows()).map(|i| m.row(i).to_vec()).collect()),
        };
        RawConfig {
            group: GroupSection {
                factors: Factors::List(self.group.factors.iter().map(ToString::to_string).collect()),
            },
            complex_structure: ComplexStructureSection { j_torus },
            metric: MetricSection {
                lambda: self.lambda.clone(),
                c_simple: self.c_simple.clone(),
            },
            submersion: SubmersionSection {
                sets: self.submersion_sets.as_ref().map(|s| match s {
                    SubsetChoice::All => SubmersionSets::Keyword("all".into()),
                    SubsetChoice::Listed(v) => SubmersionSets::List(v.clone()),
                }),
                max_subsets: self.max_subsets,
            },
            output: OutputSection {
                path: self.output.clone(),
            },
            mode: ModeSection {
                skip_holonomy: self.skip_holonomy,
                checks_only: self.checks_only,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A2: &str = r#"
[group]
factors = "A2"

[metric]
lambda = ["1"]
c_simple = { a1 = "2", a2 = "1" }

[submersion]
sets = "all"
"#;

    #[test]
    fn parses_minimal() {
        let c = RunConfig::from_toml(A2).unwrap();
        assert_eq!(c.group.to_string(), "A2");
        assert_eq!(c.j_torus, None);
        assert_eq!(c.c_simple["a1"], Scalar::from_int(2));
        assert_eq!(c.submersion_sets, Some(SubsetChoice::All));
        assert_eq!(c.max_subsets, 64);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = A2.replace("[submersion]", "[submersion]\nfoo = 1");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Toml(_))));
        let text = format!("{A2}\n[extra]\nx = 1\n");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn explicit_matrix_and_lists() {
        let text = r#"
[group]
factors = ["A1", "A1"]
[complex_structure]
j_torus = [["0", "-1"], ["1", "0"]]
[metric]
lambda = ["3/2", "3/2"]
c_simple = { a1 = "1", a2 = "7/3" }
[submersion]
sets = [[], ["a1"]]
[mode]
checks_only = true
"#;
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.j_torus, Some(Matrix::from_int_rows(&[&[0, -1], &[1, 0]])));
        assert_eq!(c.c_simple["a2"], Scalar::from_ratio(7, 3));
        assert_eq!(c.submersion_sets, Some(SubsetChoice::Listed(vec![vec![], vec!["a1".into()]])));
        assert!(c.checks_only);
    }

    #[test]
    fn roundtrip_is_lossless() {
        let c = RunConfig::from_toml(A2.replace("\"2\"", "\"-7/9+1/3*sqrt(5)\"").as_str()).unwrap();
        let text = toml::to_string(&c.to_raw()).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn bad_values() {
        assert!(RunConfig::from_toml(&A2.replace("\"2\"", "\"2/0\"")).is_err());
        assert!(RunConfig::from_toml(&A2.replace("\"A2\"", "\"Q2\"")).is_err());
        assert!(RunConfig::from_toml(&A2.replace("\"all\"", "\"some\"")).is_err());
    }
}
