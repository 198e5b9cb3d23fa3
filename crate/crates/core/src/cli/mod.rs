//! Pipeline orchestration and the JSON report.

pub mod config;
pub mod report;

use std::time::Instant;

use crate::compactform::{build_compact_algebra, CompactAlgebra};
use crate::connection::{
    bianchi_check, exterior_derivative, fundamental_form, nomizu_from_complex_structure, torsion_from_fundamental_form,
    BismutGeometry,
};
use crate::error::Error;
use crate::hermitian::{
    auto_torus_j, build_metric, check_compatibility, extend_pluriclosed, recursion_violation, samelson_j, Compatibility,
    SktParameters,
};
use crate::holonomy::{generate_span, invariant_decomposition, label_and_compare, OperatorSpan};
use crate::rootsys::{build_root_system, cache_dir_from_env, chevalley_constants, chevalley_constants_cached, RootSystem};
use crate::scalar::Scalar;
use crate::submersion::{build_split, build_split_unchecked, certify, CheckRecord};

pub use config::{ConfigError, RunConfig, SubsetChoice};
pub use report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// SKT verdict and the identity suite.
    Check,
    /// Adds the holonomy decomposition.
    Holonomy,
    /// Adds submersion certificates.
    Submersion,
    /// Everything.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Holonomy => "holonomy",
            Command::Submersion => "submersion",
            Command::Report => "report",
        }
    }

    fn wants_holonomy(self) -> bool {
        matches!(self, Command::Holonomy | Command::Report)
    }

    fn wants_submersions(self) -> bool {
        matches!(self, Command::Submersion | Command::Report)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub command: Command,
    pub max_dim: usize,
    pub negative_controls: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            command: Command::Report,
            max_dim: 64,
            negative_controls: false,
        }
    }
}

/// Why a run stopped before producing a report.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("precondition violated: {0}")]
    Precondition(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Precondition(_) => 3,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BadFactor(_) | Error::UnknownRoot(_) => RunError::Config(ConfigError::Invalid(e.to_string())),
            e => RunError::Precondition(e),
        }
    }
}

/// Subsets of `I_max` by size, then lexicographically.
pub fn enumerate_submersions(skt: &SktParameters, cap: usize) -> Vec<Vec<usize>> {
    let k = skt.i_max.len();
    if k >= usize::BITS as usize || (1usize << k) > cap {
        log::warn!("I_max has {k} simple roots: enumerating 2^{k} subsets exceeds the cap of {cap}");
    }
    let mut out = Vec::new();
    for size in 0..=k {
        for pick in crate::connection::increasing_tuples(k, size) {
            out.push(pick.iter().map(|&i| skt.i_max[i]).collect());
        }
    }
    out
}

fn c_simple_vector(rs: &RootSystem, cfg: &RunConfig) -> Result<Vec<Scalar>, RunError> {
    for key in cfg.c_simple.keys() {
        rs.parse_simple_label(key)?;
    }
    (0..rs.rank())
        .map(|j| {
            let label = rs.simple_label(j);
            cfg.c_simple
                .get(&label)
                .cloned()
                .ok_or_else(|| RunError::Config(ConfigError::Invalid(format!("metric.c_simple is missing {label}"))))
        })
        .collect()
}

fn constants(rs: &RootSystem) -> crate::rootsys::ChevalleyConstants {
    let dir = cache_dir_from_env();
    match chevalley_constants_cached(rs, &dir) {
        Ok(cc) => cc,
        Err(e) => {
            log::warn!("structure-constant cache at {} unusable ({e}); computing directly", dir.display());
            chevalley_constants(rs)
        }
    }
}

struct Timer(Vec<(String, u128)>);

impl Timer {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.push((name.to_string(), t.elapsed().as_millis()));
        log::info!("{name}: {} ms", t.elapsed().as_millis());
        out
    }
}

/// Runs the pipeline. Check failures are recorded in the report; only
/// configuration and precondition problems are errors.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<Report, RunError> {
    let mut timer = Timer(Vec::new());
    let spec = cfg.group.canonical()?;
    if spec.dim() > opts.max_dim {
        return Err(RunError::Precondition(Error::Unsupported(format!(
            "algebra {spec} has dimension {} above --max-dim {}",
            spec.dim(),
            opts.max_dim
        ))));
    }
    let rs = timer.stage("root_system", || build_root_system(&spec))?;
    let c_simple = c_simple_vector(&rs, cfg)?;
    let skt = extend_pluriclosed(&rs, &c_simple)?;
    let lambda = cfg.lambda.clone().unwrap_or_else(|| vec![Scalar::one(); rs.num_factors()]);

    let cc = timer.stage("structure_constants", || constants(&rs));
    let alg = timer.stage("compact_form", || build_compact_algebra(&rs, &cc))?;
    let j_torus = match &cfg.j_torus {
        Some(m) => m.clone(),
        None => auto_torus_j(&alg, &lambda)?,
    };
    let j = samelson_j(&alg, &j_torus)?;
    let g = build_metric(&alg, &lambda, &skt.c_all)?;
    let compatibility = check_compatibility(&g, &j)?;
    if let Compatibility::Incompatible { witness, .. } = &compatibility {
        return Err(RunError::Precondition(Error::Incompatible(witness.0, witness.1)));
    }
    let h = crate::hermitian::HermitianStructure {
        omega: j.transpose().mul(&g),
        j,
        lambda: lambda.clone(),
        c: skt.c_all.clone(),
        g,
    };
    let geo = timer.stage("bismut_connection", || BismutGeometry::new(&alg, &h));

    let (skt_verdict, identities) = timer.stage("identities", || identity_suite(&alg, &h, &geo, &skt));
    let identities = identities?;

    let mut report = Report::new(cfg, opts, &alg, &skt, &j_torus, compatibility, skt_verdict, identities);

    let mut span: Option<OperatorSpan> = None;
    if opts.command.wants_holonomy() && !cfg.skip_holonomy {
        let s = timer.stage("holonomy_span", || generate_span(&geo.nomizu, &geo.curvature, &alg));
        let dec = timer.stage("decomposition", || invariant_decomposition(&s, &geo.g, &geo.j, &alg));
        let cmp = label_and_compare(&dec, &s, &skt, &alg)?;
        report.set_holonomy(&alg, &s, &dec, cmp, cfg.checks_only);
        span = Some(s);
    }

    if opts.command.wants_submersions() {
        let subsets = match &cfg.submersion_sets {
            None | Some(SubsetChoice::All) => enumerate_submersions(&skt, cfg.max_subsets),
            Some(SubsetChoice::Listed(v)) => v
                .iter()
                .map(|labels| labels.iter().map(|l| rs.parse_simple_label(l)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
        };
        for subset in subsets {
            let split = build_split(&skt, &subset, &alg, &geo.g, &geo.j)?;
            let rep = timer.stage("submersion", || certify(&split, &geo, &alg, span.as_ref()))?;
            report.submersions.push(rep);
        }
        if opts.negative_controls {
            for s in (0..rs.rank()).filter(|s| !skt.i_max.contains(s)) {
                let split = build_split_unchecked(&[s], &alg, &geo.g, &geo.j)?;
                report.negative_controls.push(certify(&split, &geo, &alg, span.as_ref())?);
            }
        }
    }
    report.finish(timer.0);
    Ok(report)
}

/// SKT verdict and the exact identity checks shared by every command.
pub fn identity_suite(
    alg: &CompactAlgebra,
    h: &crate::hermitian::HermitianStructure,
    geo: &BismutGeometry,
    skt: &SktParameters,
) -> (report::SktVerdict, crate::error::Result<Vec<CheckRecord>>) {
    let rs = alg.root_system();
    let dt = exterior_derivative(&geo.torsion, alg);
    let recursion = recursion_violation(rs, &skt.c_all);
    let verdict = report::SktVerdict {
        recursion_holds: recursion.is_none(),
        recursion_violation: recursion.map(|(a, b)| [rs.root_label(a), rs.root_label(b)]),
        torsion_closed: dt.as_ref().map(|f| f.is_zero()).unwrap_or(false),
        max_dt: dt.as_ref().map(|f| f.max_abs().max).unwrap_or_else(|_| Scalar::zero()),
    };
    let checks = (|| -> crate::error::Result<Vec<CheckRecord>> {
        let omega = fundamental_form(&h.g, &h.j)?;
        let t_dc = torsion_from_fundamental_form(alg, &omega, &h.j)?;
        let d_omega = exterior_derivative(&omega, alg)?;
        let dd = exterior_derivative(&d_omega, alg)?;
        let lam_j = nomizu_from_complex_structure(alg, &h.g, &h.j);
        let mut route = crate::connection::Defect::zero();
        for (a, (l1, l2)) in geo.nomizu.ops().iter().zip(lam_j.ops()).enumerate() {
            let d = l1.sub(l2);
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    route.record(&d[(r, c)], &[a, r, c]);
                }
            }
        }
        Ok(vec![
            CheckRecord::from_defect("pluriclosed_dT", dt?.max_abs()),
            CheckRecord::from_defect("torsion_equals_minus_dc_omega", geo.torsion.difference(&t_dc)),
            CheckRecord::from_defect("d_squared_zero", dd.max_abs()),
            CheckRecord::from_defect("nomizu_routes_agree", route),
            CheckRecord::from_defect("nomizu_metric", geo.nomizu.metric_defect(&h.g)),
            CheckRecord::from_defect("nomizu_torsion", geo.nomizu.torsion_defect(alg, &h.g, &geo.torsion)),
            CheckRecord::from_defect("nomizu_hermitian", geo.nomizu.hermitian_defect(&h.j)),
            CheckRecord::from_defect("curvature_skew", geo.curvature.skew_defect(&h.g)),
            CheckRecord::from_defect("curvature_hermitian", geo.curvature.hermitian_defect(&h.j)),
            CheckRecord::from_defect(
                "bianchi",
                bianchi_check(&geo.curvature, &geo.torsion, &geo.nomizu, alg, &h.g)?,
            ),
        ])
    })();
    (verdict, checks)
}
