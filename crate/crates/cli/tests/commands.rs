use std::process::Command;
use std::sync::Arc;

use bisimp_cli::commands::identities_with;
use bisimp_cli::{cmd_counterexample, cmd_identities, cmd_kan, cmd_theorem1, Construction, Input, Outcome, RunReport, Source, Witness};
use bisimp_core::groups::presets::Preset;
use bisimp_core::groups::DoubleNerve;
use bisimp_core::{SimplicialMap, TruncatedBisimplicialSet, TruncatedSimplicialSet};

fn preset(p: Preset) -> Source {
    Source::Preset(p)
}

fn input(i: Input) -> Source {
    Source::Input { path: "<memory>".into(), input: Box::new(i) }
}

fn horn_certificates(r: &RunReport) -> Vec<&bisimp_core::FillCertificate> {
    r.verdicts
        .iter()
        .flat_map(|v| &v.witnesses)
        .filter_map(|w| match w {
            Witness::Horn { certificate, .. } => Some(certificate),
            _ => None,
        })
        .collect()
}

fn s3_diagonal(bound: usize) -> SimplicialMap {
    let pair = Preset::S3Counterexample.group_pair().unwrap();
    let x = DoubleNerve::new(&pair.double_groupoid(), (bound, bound)).into_set();
    SimplicialMap::to_point(Arc::new(x.diagonal()))
}

#[test]
fn identities_pass_and_zero_is_vacuous() {
    let r = cmd_identities(6).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts.len(), 5);
    let r0 = cmd_identities(0).unwrap();
    assert!(r0.verdicts.iter().all(|v| v.observed == Outcome::Pass));
    assert!(cmd_identities(11).is_err());
}

#[test]
fn an_inverted_identity_is_reported_with_its_tuple() {
    let r = identities_with(3, &|l, r| l.ordinal_map() != r.ordinal_map()).unwrap();
    assert!(!r.all_as_expected());
    for v in &r.verdicts {
        assert_eq!(v.observed, Outcome::Fail);
        match &v.witnesses[..] {
            [Witness::Violation { parameters, .. }] => {
                assert!(parameters.contains_key("i") && parameters.contains_key("n"));
            }
            other => panic!("expected one violation, got {other:?}"),
        }
    }
}

#[test]
fn s3_diagonal_fails_with_a_checkable_horn() {
    let r = cmd_kan(&preset(Preset::S3Counterexample), Construction::DoubleNerveDiagonal, None, 2).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts[0].observed, Outcome::Fail);
    let certs = horn_certificates(&r);
    assert_eq!(certs.len(), 1);
    assert!(!certs[0].is_filled());
    assert!(certs[0].verify(&s3_diagonal(2)).unwrap());
}

#[test]
fn s3_rows_and_columns_are_kan() {
    for c in [Construction::Row, Construction::Column] {
        for k in 0..=2 {
            let r = cmd_kan(&preset(Preset::S3Counterexample), c, Some(k), 3).unwrap();
            assert_eq!(r.verdicts.len(), 1);
            assert_eq!(r.verdicts[0].observed, Outcome::Pass, "{c} {k}");
        }
    }
}

#[test]
fn nerves_and_explicit_points_are_kan() {
    for p in Preset::ALL {
        let r = cmd_kan(&preset(p), Construction::Nerve, None, 3).unwrap();
        assert!(r.all_as_expected());
    }
    let pt = input(Input { simplicial: Some(TruncatedSimplicialSet::point(3)), ..Input::default() });
    let r = cmd_kan(&pt, Construction::Explicit, None, 3).unwrap();
    assert_eq!(r.verdicts[0].observed, Outcome::Pass);
    assert!(cmd_kan(&pt, Construction::Row, None, 2).is_err());
}

#[test]
fn theorem1_sweeps() {
    let r = cmd_theorem1(&preset(Preset::EgTensor), 3).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts.len(), 3);
    assert_eq!(r.verdicts[1].statistics["problems"], r.verdicts[1].statistics["fills"]);
    let pt = input(Input { bisimplicial: Some(TruncatedBisimplicialSet::point((2, 2))), ..Input::default() });
    assert!(cmd_theorem1(&pt, 2).unwrap().all_as_expected());
}

#[test]
fn theorem1_precondition_names_the_horn() {
    let e = cmd_theorem1(&preset(Preset::S3Counterexample), 2).unwrap_err().to_string();
    assert!(e.contains("precondition"), "{e}");
    assert!(e.contains("x_2 = [[((1,2),id,(1,2),id)]]"), "{e}");
}

#[test]
fn s3_certificate() {
    let r = cmd_counterexample(Preset::S3Counterexample, 3).unwrap();
    assert!(r.all_as_expected());
    let sq = r.verdicts.iter().find(|v| v.check.starts_with("squares")).unwrap();
    assert_eq!(sq.statistics["squares"], 3);
    let horn = r.verdicts.iter().find(|v| v.check.starts_with("diagonal horn")).unwrap();
    assert_eq!(horn.statistics["fillers_found"], 0);
    assert_eq!(horn.statistics["candidates_examined"], 7);
    let f = s3_diagonal(3);
    for c in horn_certificates(&r) {
        assert!(c.verify(&f).unwrap());
    }
    assert_eq!(r.verdicts.iter().filter(|v| v.check.starts_with("Kan: row") || v.check.starts_with("Kan: column")).count(), 6);
}

#[test]
fn z2_certificate_is_inapplicable() {
    let r = cmd_counterexample(Preset::Z2Commuting, 3).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts.len(), 1);
    assert!(r.verdicts[0].detail.contains("AB = BA"));
}

#[test]
fn eg_tensor_certificate() {
    let r = cmd_counterexample(Preset::EgTensor, 2).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts[1].statistics["pi0_components"], 4);
}

#[test]
fn reports_round_trip_and_repeat() {
    let a = cmd_counterexample(Preset::S3Counterexample, 2).unwrap();
    let json = serde_json::to_string(&a).unwrap();
    assert_eq!(serde_json::from_str::<RunReport>(&json).unwrap(), a);
    let b = cmd_counterexample(Preset::S3Counterexample, 2).unwrap();
    assert_eq!(serde_json::to_string(&a.verdicts).unwrap(), serde_json::to_string(&b.verdicts).unwrap());
    assert_eq!(a.config, b.config);
}

#[test]
fn group_input_files() {
    let dir = std::env::temp_dir().join(format!("bisimp-input-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s3.json");
    std::fs::write(
        &path,
        r#"{"group": {"permutations": {"degree": 3, "generators": ["(1,2)", "(1,2,3)"]}},
            "a": ["id", "(1,2)"], "b": ["id", "(1,3)"]}"#,
    )
    .unwrap();
    let s = Source::load(&path).unwrap();
    let r = cmd_kan(&s, Construction::DoubleNerveDiagonal, None, 2).unwrap();
    assert!(r.all_as_expected());
    assert_eq!(r.verdicts[0].observed, Outcome::Fail);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"group": {"table": {"labels": ["e"], "table": [[0]]}}, "a": ["e"]}"#).unwrap();
    assert!(Source::load(&bad).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bisimp");
    let out = Command::new(bin)
        .args(["--format", "structured", "counterexample", "--preset", "s3-counterexample"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.config.preset.as_deref(), Some("s3-counterexample"));
    let out = Command::new(bin).args(["theorem1", "--preset", "s3-counterexample", "--max-dim", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).args(["--threads", "2", "kan", "--preset", "z2-commuting", "--construction", "nerve"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("all checks as expected"));
}
