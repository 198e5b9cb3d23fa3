//! End-to-end runs of the library pipeline and the binary.

use std::path::Path;
use std::process::Command as Process;

use proptest::prelude::*;

use skt_holonomy::cli::{enumerate_submersions, run, Command, RunConfig, RunError, RunOptions};
use skt_holonomy::compactform::build_compact_algebra;
use skt_holonomy::connection::{bismut_torsion, exterior_derivative};
use skt_holonomy::hermitian::{auto_torus_j, extend_pluriclosed, HermitianStructure};
use skt_holonomy::rootsys::{build_root_system, chevalley_constants, CartanSpec};
use skt_holonomy::Scalar;

const A2: &str = r#"
[group]
factors = "A2"

[metric]
lambda = ["1"]
c_simple = { a1 = "2", a2 = "1" }

[submersion]
sets = "all"
"#;

fn bin() -> Process {
    let mut p = Process::new(env!("CARGO_BIN_EXE_skt-holonomy"));
    p.env("SKT_HOLONOMY_CACHE_DIR", std::env::temp_dir().join("skt-holonomy-test-cache"));
    p
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn a2_report_end_to_end() {
    let cfg = RunConfig::from_toml(A2).unwrap();
    let r = run(&cfg, &RunOptions::default()).unwrap();
    assert!(r.passed);
    assert_eq!(r.exit_code(), 0);
    assert_eq!(r.skt.i_max, vec!["a2"]);
    let subsets: Vec<Vec<String>> = r.submersions.iter().map(|s| s.subset.clone()).collect();
    assert_eq!(subsets, vec![vec![], vec!["a2".to_string()]]);
    let h = r.holonomy.as_ref().unwrap();
    assert!(h.comparison.matches_prediction);
    assert_eq!(h.blocks.iter().map(|b| b.dim).collect::<Vec<_>>(), vec![2, 4, 2]);
    assert!(r.negative_controls.is_empty());
}

#[test]
fn commands_select_stages() {
    let cfg = RunConfig::from_toml(A2).unwrap();
    let with = |command| RunOptions { command, ..RunOptions::default() };
    let check = run(&cfg, &with(Command::Check)).unwrap();
    assert!(check.holonomy.is_none() && check.submersions.is_empty());
    let hol = run(&cfg, &with(Command::Holonomy)).unwrap();
    assert!(hol.holonomy.is_some() && hol.submersions.is_empty());
    let sub = run(&cfg, &with(Command::Submersion)).unwrap();
    assert!(sub.holonomy.is_none() && sub.submersions.len() == 2);
    // without the span there is no holonomy clause
    assert!(sub.submersions[0].check("holonomy_preserves_split").is_none());
}

#[test]
fn checks_only_drops_bases() {
    let text = format!("{A2}\n[mode]\nchecks_only = true\n");
    let r = run(&RunConfig::from_toml(&text).unwrap(), &RunOptions::default()).unwrap();
    assert!(r.holonomy.unwrap().blocks.iter().all(|b| b.basis.is_none()));
}

#[test]
fn empty_i_max_has_only_the_trivial_split() {
    let text = A2.replace("lambda = [\"1\"]", "");
    let mut cfg = RunConfig::from_toml(&text).unwrap();
    cfg.c_simple.insert("a2".into(), Scalar::from_int(3));
    let r = run(&cfg, &RunOptions::default()).unwrap();
    // no simple root has c = 1
    assert!(r.passed);
    assert!(r.skt.i_max.is_empty());
    assert_eq!(r.submersions.len(), 1);
}

#[test]
fn preconditions_and_config_errors() {
    let bad_c = A2.replace(r#"a1 = "2", a2 = "1""#, r#"a1 = "1/4", a2 = "1/4""#);
    let e = run(&RunConfig::from_toml(&bad_c).unwrap(), &RunOptions::default()).unwrap_err();
    assert!(matches!(e, RunError::Precondition(_)));
    assert_eq!(e.exit_code(), 3);

    let missing = A2.replace(r#", a2 = "1""#, "");
    let e = run(&RunConfig::from_toml(&missing).unwrap(), &RunOptions::default()).unwrap_err();
    assert_eq!(e.exit_code(), 2);

    let odd = A2.replace("\"A2\"", "\"A3\"").replace(r#"a2 = "1""#, r#"a2 = "1", a3 = "1""#);
    let e = run(&RunConfig::from_toml(&odd).unwrap(), &RunOptions::default()).unwrap_err();
    assert_eq!(e.exit_code(), 3);

    let opts = RunOptions { max_dim: 4, ..RunOptions::default() };
    assert_eq!(run(&RunConfig::from_toml(A2).unwrap(), &opts).unwrap_err().exit_code(), 3);

    let listed = A2.replace("sets = \"all\"", "sets = [[\"a1\"]]");
    let e = run(&RunConfig::from_toml(&listed).unwrap(), &RunOptions::default()).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn incompatible_torus_structure_is_a_precondition() {
    let text = r#"
[group]
factors = ["A1", "A1"]
[complex_structure]
j_torus = [["0", "-1"], ["1", "0"]]
[metric]
lambda = ["1", "2"]
c_simple = { a1 = "1", a2 = "1" }
"#;
    let e = run(&RunConfig::from_toml(text).unwrap(), &RunOptions::default()).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let ok = text.replace(r#"["1", "2"]"#, r#"["2", "2"]"#);
    assert!(run(&RunConfig::from_toml(&ok).unwrap(), &RunOptions::default()).unwrap().passed);
}

#[test]
fn enumeration_order() {
    let rs = build_root_system(&CartanSpec::parse("A1+A1+A1+A1").unwrap()).unwrap();
    let one = vec![Scalar::one(); 4];
    let skt = extend_pluriclosed(&rs, &one).unwrap();
    let subsets = enumerate_submersions(&skt, 64);
    assert_eq!(subsets.len(), 16);
    assert_eq!(subsets[0], Vec::<usize>::new());
    assert_eq!(subsets[1], vec![0]);
    assert_eq!(subsets[5], vec![0, 1]);
    assert_eq!(subsets[15], vec![0, 1, 2, 3]);
}

#[test]
fn config_roundtrip_through_report_input() {
    let cfg = RunConfig::from_toml(A2).unwrap();
    let r = run(&cfg, &RunOptions { command: Command::Check, ..RunOptions::default() }).unwrap();
    let text = toml::to_string(&r.input).unwrap();
    assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg);
}

#[test]
fn binary_exit_codes_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "a2.toml", A2);
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["report", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["algebra"]["dim"], 8);
    assert_eq!(json["skt"]["max_dt"], "0");

    let o = bin().args(["check", "--config"]).arg(&good).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["command"], "check");
    assert!(json["holonomy"].is_null());

    let o = bin().args(["submersion", "--negative-controls", "--config"]).arg(&good).output().unwrap();
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["negative_controls"][0]["subset"][0], "a1");

    let bad = write(dir.path(), "bad.toml", &A2.replace(r#"a1 = "2", a2 = "1""#, r#"a1 = "1/4", a2 = "1/4""#));
    assert_eq!(bin().args(["check", "--config"]).arg(&bad).output().unwrap().status.code(), Some(3));

    let junk = write(dir.path(), "junk.toml", "[group]\nfactors = 3\n");
    assert_eq!(bin().args(["check", "--config"]).arg(&junk).output().unwrap().status.code(), Some(2));
    let nowhere = dir.path().join("absent.toml");
    assert_eq!(bin().args(["check", "--config"]).arg(&nowhere).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["report", "--max-dim", "4", "--config"]).arg(&good).output().unwrap().status.code(), Some(3));

    let off = write(
        dir.path(),
        "off.toml",
        r#"
[group]
factors = ["A1", "A1"]
[complex_structure]
j_torus = [["0", "-1"], ["1", "0"]]
[metric]
lambda = ["1", "1"]
c_simple = { a1 = "2", a2 = "1/2" }
"#,
    );
    // A1 ⊕ A1 has no root pairs, so every positive c is SKT
    assert_eq!(bin().args(["report", "--config"]).arg(&off).output().unwrap().status.code(), Some(0));
}

fn a2_torsion_closed(c1: (i64, i64), c2: (i64, i64), shift: Option<(i64, i64)>) -> bool {
    let rs = build_root_system(&CartanSpec::parse("A2").unwrap()).unwrap();
    let alg = build_compact_algebra(&rs, &chevalley_constants(&rs)).unwrap();
    let c = [Scalar::from_ratio(c1.0, c1.1), Scalar::from_ratio(c2.0, c2.1)];
    let mut skt = extend_pluriclosed(&rs, &c).unwrap();
    if let Some((p, q)) = shift {
        skt.c_all[2] += Scalar::from_ratio(p, q);
    }
    let lam = [Scalar::one()];
    let h = HermitianStructure::new(&alg, &auto_torus_j(&alg, &lam).unwrap(), &lam, &skt.c_all).unwrap();
    let t = bismut_torsion(&alg, &h.g, &h.j);
    exterior_derivative(&t, &alg).unwrap().is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pluriclosed_law_closes_torsion(p1 in 2i64..20, q1 in 1i64..4, p2 in 2i64..20, q2 in 1i64..4) {
        // c_i ≥ 2/3 keeps c_{a1+a2} = c_1 + c_2 − 1 positive
        prop_assume!(3 * p1 >= 2 * q1 && 3 * p2 >= 2 * q2);
        prop_assert!(a2_torsion_closed((p1, q1), (p2, q2), None));
    }

    #[test]
    fn breaking_the_law_opens_torsion(p1 in 2i64..20, p2 in 2i64..20, s in 1i64..9, q in 1i64..5) {
        prop_assert!(!a2_torsion_closed((p1, 2), (p2, 2), Some((s, q))));
    }
}
