//! JSON report. Field order is fixed by declaration order; every exact number
//! is a string (`"p/q"`, or with a `sqrt(d)` part). Timings come last and are
//! the only run-dependent field.

use serde::Serialize;

use super::config::{RawConfig, RunConfig};
use super::RunOptions;
use crate::compactform::CompactAlgebra;
use crate::hermitian::{Compatibility, SktParameters};
use crate::holonomy::{BlockLabel, ComparisonReport, HolonomyDecomposition, OperatorSpan};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::submersion::{CheckRecord, SubmersionReport};

#[derive(Clone, Debug, Serialize)]
pub struct RootEntry {
    pub label: String,
    pub coords: Vec<i64>,
    pub height: i64,
    pub c: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraSummary {
    #[serde(rename = "type")]
    pub kind: String,
    pub dim: usize,
    pub rank: usize,
    pub positive_roots: Vec<RootEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexStructureSummary {
    pub j_torus: Vec<Vec<Scalar>>,
    pub compatibility: Compatibility,
}

#[derive(Clone, Debug, Serialize)]
pub struct SktVerdict {
    /// `c_{α+β} = c_α + c_β − 1` on every root pair.
    pub recursion_holds: bool,
    pub recursion_violation: Option<[String; 2]>,
    /// `dT = 0`, computed with the Chevalley–Eilenberg differential.
    pub torsion_closed: bool,
    pub max_dt: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct SktSummary {
    #[serde(flatten)]
    pub verdict: SktVerdict,
    pub i_max: Vec<String>,
    pub delta_i_max: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockEntry {
    pub label: BlockLabel,
    pub description: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyReport {
    pub span_dim: usize,
    pub generation_log: Vec<usize>,
    pub trivial_part_dim: usize,
    /// Blocks are invariant and pairwise orthogonal; no further splitting was
    /// found, which does not certify irreducibility.
    pub blocks: Vec<BlockEntry>,
    pub comparison: ComparisonReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: RawConfig,
    pub algebra: AlgebraSummary,
    pub complex_structure: ComplexStructureSummary,
    pub skt: SktSummary,
    pub identities: Vec<CheckRecord>,
    pub holonomy: Option<HolonomyReport>,
    pub submersions: Vec<SubmersionReport>,
    pub negative_controls: Vec<SubmersionReport>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub timings: Vec<Timing>,
}

fn rows(m: &Matrix) -> Vec<Vec<Scalar>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

impl Report {
    #[allow(clippy::too_many_arguments)]
    pub(super) fn new(
        cfg: &RunConfig,
        opts: &RunOptions,
        alg: &CompactAlgebra,
        skt: &SktParameters,
        j_torus: &Matrix,
        compatibility: Compatibility,
        verdict: SktVerdict,
        identities: Vec<CheckRecord>,
    ) -> Self {
        let rs = alg.root_system();
        let positive_roots = (0..rs.num_positive())
            .map(|a| RootEntry {
                label: rs.root_label(a),
                coords: rs.root(a).to_vec(),
                height: rs.height(a),
                c: skt.c_all[a].clone(),
            })
            .collect();
        Report {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: opts.command.name(),
            input: cfg.to_raw(),
            algebra: AlgebraSummary {
                kind: rs.spec().to_string(),
                dim: alg.dim(),
                rank: alg.rank(),
                positive_roots,
            },
            complex_structure: ComplexStructureSummary {
                j_torus: rows(j_torus),
                compatibility,
            },
            skt: SktSummary {
                verdict,
                i_max: skt.i_max.iter().map(|&j| rs.simple_label(j)).collect(),
                delta_i_max: skt.delta_i_max.iter().map(|&a| rs.root_label(a)).collect(),
            },
            identities,
            holonomy: None,
            submersions: Vec::new(),
            negative_controls: Vec::new(),
            passed: false,
            timings: Vec::new(),
        }
    }

    pub(super) fn set_holonomy(
        &mut self,
        alg: &CompactAlgebra,
        span: &OperatorSpan,
        dec: &HolonomyDecomposition,
        comparison: ComparisonReport,
        checks_only: bool,
    ) {
        let rs = alg.root_system();
        let describe = |l: &BlockLabel| match l {
            BlockLabel::Torus => "t".to_string(),
            BlockLabel::RootSpace { root } => format!("g[{}]", rs.root_label(*root)),
            BlockLabel::Residual { factor, roots } => format!(
                "factor {}: {}",
                factor + 1,
                roots.iter().map(|&a| format!("g[{}]", rs.root_label(a))).collect::<Vec<_>>().join(" + ")
            ),
            BlockLabel::TrivialWhole => "g (trivial holonomy)".to_string(),
            BlockLabel::Mixed => "not aligned with root spaces".to_string(),
        };
        self.holonomy = Some(HolonomyReport {
            span_dim: span.len(),
            generation_log: span.generation_log().to_vec(),
            trivial_part_dim: dec.trivial_part.len(),
            blocks: dec
                .blocks
                .iter()
                .map(|b| BlockEntry {
                    description: describe(&b.label),
                    label: b.label.clone(),
                    dim: b.dim(),
                    basis: (!checks_only).then(|| b.basis.clone()),
                })
                .collect(),
            comparison,
        });
    }

    pub(super) fn finish(&mut self, timings: Vec<(String, u128)>) {
        self.passed = self.skt.verdict.recursion_holds
            && self.skt.verdict.torsion_closed
            && self.identities.iter().all(|c| c.passed)
            && self.holonomy.as_ref().is_none_or(|h| h.comparison.passed())
            && self.submersions.iter().all(SubmersionReport::passed);
        self.timings = timings.into_iter().map(|(stage, ms)| Timing { stage, ms }).collect();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with timings removed; equal inputs give equal values.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.timings.clear();
        r.to_json()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}
