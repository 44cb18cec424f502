use std::ops::ControlFlow;
use std::sync::Arc;

use bisimp_core::bisimplicial::diagonal_map;
use bisimp_core::groups::presets::{s3_counterexample, z2_commuting};
use bisimp_core::groups::{eg_construction, eg_tensor, DoubleNerve, FiniteGroup};
use bisimp_core::kan::{brute_force_fill, check_kan_fibration, enumerate_families, CompatibleFamily, HornKind};
use bisimp_core::simplicial::{pi0, validate_simplicial_identities};
use bisimp_core::theorem::{build_diagonal_family, verify_theorem1_sweep, PointwiseHornProblem, TheoremContext};
use bisimp_core::{BisimplicialMap, Simplex, SimplicialMap, TruncatedBisimplicialSet, TruncatedSimplicialSet};

fn z2() -> FiniteGroup {
    FiniteGroup::cyclic(2).unwrap()
}

#[test]
fn eg_tensor_counts() {
    let x = eg_tensor(&z2(), 3);
    assert_eq!(x.count(1, 1), 16);
    assert_eq!(x.diagonal().count(2), 64);
    for n in 0..=3 {
        assert_eq!(x.diagonal().count(n), 2u32.pow(2 * (n as u32 + 1)));
    }
    let row = x.row(2).unwrap();
    for p in 0..=3 {
        assert_eq!(row.count(p), 2u32.pow(p as u32 + 1) * 8);
    }
}

#[test]
fn columns_of_a_tensor_only_see_the_second_factor() {
    let a = eg_construction(&FiniteGroup::cyclic(3).unwrap(), 2);
    let b = eg_construction(&z2(), 2);
    let x = TruncatedBisimplicialSet::tensor(&a, &b);
    for p in 0..=2 {
        let col = x.column(p).unwrap();
        for q in 1..=2 {
            for i in 0..=q {
                for id in 0..col.count(q) {
                    let (ai, bi) = (id / b.count(q), id % b.count(q));
                    let face = col.face(Simplex::new(q, id), i).unwrap().id;
                    assert_eq!(face, ai * b.count(q - 1) + b.face(Simplex::new(q, bi), i).unwrap().id);
                }
            }
        }
    }
}

#[test]
fn s3_double_nerve_shape() {
    let pair = s3_counterexample();
    let d = pair.double_groupoid();
    let x = DoubleNerve::new(&d, (2, 2)).into_set();
    assert_eq!(x.diagonal().count(1), 3);
    assert_eq!(x.count(1, 1), 3);
    let t = x.transpose();
    assert_eq!(t.transpose(), x);
    assert_eq!(t.diagonal().counts(), x.diagonal().counts());
    for k in 0..=2 {
        assert_eq!(t.column(k).unwrap(), x.row(k).unwrap());
    }
    let pt = TruncatedBisimplicialSet::point((2, 2));
    assert_eq!(pt.column(0).unwrap(), TruncatedSimplicialSet::point(2));
    assert_eq!(pt.transpose(), pt);
}

/// The diagonal of the S3 double nerve is not Kan; its first failing horn
/// is reported with the exhaustive candidate count.
#[test]
fn s3_diagonal_is_not_kan() {
    let pair = s3_counterexample();
    let x = Arc::new(DoubleNerve::new(&pair.double_groupoid(), (2, 2)).into_set());
    let f = BisimplicialMap::to_point(x.clone());
    let diag = diagonal_map(&f);
    let report = check_kan_fibration(&diag, 2).unwrap();
    assert!(!report.passed);
    assert_eq!(report.kind, HornKind::Horns);
    let fail = report.failure.unwrap();
    assert_eq!(fail.family.n, 2);
    assert_eq!(fail.candidates_examined, u64::from(x.count(2, 2)));
    // the scan agrees
    assert!(!brute_force_fill(&diag, &fail.family).unwrap().is_filled());
}

#[test]
fn obstruction_is_unfillable_by_the_shape_of_squares() {
    let pair = s3_counterexample();
    let d = pair.double_groupoid();
    let dn = DoubleNerve::new(&d, (2, 2));
    let ob = pair.obstruction(&d, &dn).unwrap();
    // oracle: a filler would be a 2x2 matrix with top-left id^v(a) and
    // bottom-right id^h(b); its bottom-left cell would need top a, right b
    let a_pos = 1;
    let b_pos = 1;
    assert!(!d.squares().iter().any(|s| s.top == a_pos && s.right == b_pos));
    let f = BisimplicialMap::to_point(Arc::new(dn.set().clone()));
    let diag = diagonal_map(&f);
    assert!(!brute_force_fill(&diag, &ob.family).unwrap().is_filled());
}

#[test]
fn eg_tensor_sweep_and_transpose_agree() {
    let f = BisimplicialMap::to_point(Arc::new(eg_tensor(&z2(), 3)));
    let r = verify_theorem1_sweep(&f, 3).unwrap();
    assert!(r.passed);
    assert_eq!(r.direct.passed, r.transposed.passed);
    // the tensor square is symmetric, so both halves see the same problems
    assert_eq!(r.direct.problems(), r.transposed.problems());
    for c in r.direct.cells.iter().chain(&r.transposed.cells) {
        assert_eq!(c.problems, c.fills);
    }
}

#[test]
fn z2_commuting_sweep_runs_when_its_diagonal_is_kan() {
    let pair = z2_commuting();
    let x = Arc::new(DoubleNerve::new(&pair.double_groupoid(), (3, 3)).into_set());
    assert_eq!(x.count(3, 3), 32768);
    let f = BisimplicialMap::to_point(x);
    let diag_ok = check_kan_fibration(&diagonal_map(&f), 3).unwrap().passed;
    match verify_theorem1_sweep(&f, 3) {
        Ok(r) => {
            assert!(diag_ok);
            assert!(r.passed);
        }
        Err(e) => {
            assert!(!diag_ok, "{e}");
        }
    }
}

#[test]
fn sweep_refuses_a_non_kan_diagonal() {
    let pair = s3_counterexample();
    let x = Arc::new(DoubleNerve::new(&pair.double_groupoid(), (2, 2)).into_set());
    let err = verify_theorem1_sweep(&BisimplicialMap::to_point(x), 2).unwrap_err();
    assert!(err.to_string().contains("not Kan"));
}

/// Diagonal families on EG ⊗ EG evaluated directly through the tables.
#[test]
fn diagonal_family_for_p1_q2_l1() {
    let x = Arc::new(eg_tensor(&z2(), 3));
    let ctx = TheoremContext::new(BisimplicialMap::to_point(x.clone()));
    let col = ctx.map().column_map(1).unwrap();
    let mut fams: Vec<CompatibleFamily> = Vec::new();
    enumerate_families(&col, 2, &[0, 2], |f| {
        fams.push(f.clone());
        ControlFlow::Continue(())
    })
    .unwrap();
    assert!(!fams.is_empty());
    for fam in &fams {
        let prob = PointwiseHornProblem::from_column_family(1, fam).unwrap();
        let built = build_diagonal_family(&ctx, &prob).unwrap();
        // I = {0} ∪ {p + 2} = {0, 3}
        assert_eq!(built.index_set, vec![0, 3]);
        // x̄_0 = (s_0^h)^0 (s_1^h)^1 (s_0^v)^1 x_0, computed by hand from the tables
        let x0 = fam.faces[&0];
        let v = x.vdeg_table(1, 1, 0)[x0 as usize];
        let h = x.hdeg_table(1, 2, 1)[v as usize];
        assert_eq!(built.family.faces[&0], h);
        // x̄_3 = (s_0^h)^1 (s_1^h)^0 (s_1^v)^1 x_2
        let x2 = fam.faces[&2];
        let v = x.vdeg_table(1, 1, 1)[x2 as usize];
        let h = x.hdeg_table(1, 2, 0)[v as usize];
        assert_eq!(built.family.faces[&3], h);
    }
}

#[test]
fn pi0_counts() {
    let x = eg_tensor(&z2(), 2);
    assert_eq!(pi0(&x.diagonal()).unwrap().len(), 1);
    assert_eq!(pi0(&eg_construction(&z2(), 2)).unwrap().len(), 1);
    assert!(validate_simplicial_identities(&x.diagonal()).is_lawful());
    let id = SimplicialMap::identity(Arc::new(x.diagonal()));
    assert!(check_kan_fibration(&id, 2).unwrap().passed);
}
