//! Column horn filling through the diagonal.
//!
//! A horn in a column map `f_{p,*}` (faces `x_i ∈ X_{p,q-1}`, `i ≠ ℓ`, over
//! `y ∈ Y_{p,q}`) is pushed to a partial horn of `diag f` in dimension
//! `p+q` by degeneracies, filled there, and brought back by faces:
//!
//! ```text
//! I        = {i : i < ℓ} ∪ {p+i : ℓ < i <= q}
//! x̄_i      = (s_0^h)^{ℓ-1} (s_p^h)^{q-ℓ}   (s_{ℓ-1}^v)^p x_i    i < ℓ
//! x̄_{p+i}  = (s_0^h)^ℓ     (s_p^h)^{q-ℓ-1} (s_ℓ^v)^p     x_i    i > ℓ
//! ȳ        = (s_0^h)^ℓ     (s_p^h)^{q-ℓ}   (s_ℓ^v)^p     y
//! x        = (d_{p+1}^h)^{q-ℓ} (d_0^h)^ℓ (d_ℓ^v)^p x̄
//! ```
//!
//! Operators are written in composition order, so the rightmost factor acts
//! first. Every step is checked at runtime: dimensions, compatibility of the
//! diagonal family, and finally `d_i^v x = x_i` (`i ≠ ℓ`) and `f x = y`.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bisimplicial::{diagonal_map, BiSimplex, BisimplicialMap, Direction};
use crate::error::{rejected, Error, Result};
use crate::kan::{
    check_kan_fibration, enumerate_families, fill_partial_horn, is_compatible, CompatibleFamily, FillCertificate, HornFiller,
    IndexedBruteForce, KanReport,
};
use crate::ordinal::Token;
use crate::simplicial::SimplicialMap;

/// A horn in the column map `f_{p,*}`: faces `x_i ∈ X_{p,q-1}` for `i ≠ ℓ`
/// and a target `y ∈ Y_{p,q}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointwiseHornProblem {
    pub p: usize,
    pub q: usize,
    pub missing: usize,
    pub faces: BTreeMap<usize, u32>,
    pub target: u32,
}

impl PointwiseHornProblem {
    /// Reads a full horn of `f_{p,*}` as a pointwise problem.
    pub fn from_column_family(p: usize, family: &CompatibleFamily) -> Result<Self> {
        let missing = family.missing_index().ok_or_else(|| rejected("column family is not a full horn"))?;
        Ok(Self { p, q: family.n, missing, faces: family.faces.clone(), target: family.target })
    }

    pub fn column_family(&self) -> CompatibleFamily {
        CompatibleFamily { n: self.q, faces: self.faces.clone(), target: self.target }
    }

    /// Shape and compatibility against `f_{p,*}`.
    pub fn validate(&self, f: &BisimplicialMap) -> Result<()> {
        if self.q == 0 || self.missing > self.q {
            return Err(rejected(format!("need q >= 1 and ℓ <= q, got q = {}, ℓ = {}", self.q, self.missing)));
        }
        let expected: Vec<usize> = (0..=self.q).filter(|&i| i != self.missing).collect();
        if self.faces.keys().copied().collect::<Vec<_>>() != expected {
            return Err(rejected(format!("faces must be indexed by [{}] minus {}", self.q, self.missing)));
        }
        let column = f.column_map(self.p)?;
        if !is_compatible(&column, &self.column_family())? {
            return Err(rejected(format!("problem is not compatible with the column map at p = {}", self.p)));
        }
        Ok(())
    }
}

/// The partial horn of `diag f` built from a pointwise problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalFamily {
    pub index_set: Vec<usize>,
    pub family: CompatibleFamily,
}

/// Every intermediate of a successful construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalLift {
    pub index_set: Vec<usize>,
    pub family: CompatibleFamily,
    /// `x̄ ∈ X_{p+q,p+q}`
    pub diagonal_filler: u32,
    /// `x ∈ X_{p,q}`
    pub answer: u32,
    pub candidates_examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PointwiseFill {
    Filled(DiagonalLift),
    /// the oracle found no filler for the diagonal family
    Unfillable { family: CompatibleFamily, certificate: FillCertificate },
}

impl PointwiseFill {
    pub fn answer(&self) -> Option<u32> {
        match self {
            PointwiseFill::Filled(l) => Some(l.answer),
            PointwiseFill::Unfillable { .. } => None,
        }
    }
}

/// A map together with its diagonal, built once.
#[derive(Debug, Clone)]
pub struct TheoremContext {
    f: BisimplicialMap,
    diag: SimplicialMap,
}

impl TheoremContext {
    pub fn new(f: BisimplicialMap) -> Self {
        let diag = diagonal_map(&f);
        Self { f, diag }
    }

    pub fn map(&self) -> &BisimplicialMap {
        &self.f
    }

    pub fn diagonal(&self) -> &SimplicialMap {
        &self.diag
    }
}

/// Fills partial horns with [`fill_partial_horn`] over a full-horn filler.
pub struct PartialHornFiller<'a> {
    full: &'a dyn HornFiller,
}

impl<'a> PartialHornFiller<'a> {
    pub fn new(full: &'a dyn HornFiller) -> Self {
        Self { full }
    }
}

impl HornFiller for PartialHornFiller<'_> {
    fn fill(&self, f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate> {
        fill_partial_horn(f, family, self.full)
    }
}

fn invariant(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(what()))
    }
}

/// `(s_0^h)^a (s_p^h)^b (s_j^v)^p z`, vertical factor first.
fn lift(ctx: &TheoremContext, z: BiSimplex, a: usize, b: usize, j: usize) -> Result<BiSimplex> {
    let x = ctx.f.domain();
    let p = z.p;
    let z = x.power(z, Direction::Vertical, Token::Degeneracy(j), p)?;
    let z = x.power(z, Direction::Horizontal, Token::Degeneracy(p), b)?;
    x.power(z, Direction::Horizontal, Token::Degeneracy(0), a)
}

fn lift_target(ctx: &TheoremContext, y: BiSimplex, a: usize, b: usize, j: usize) -> Result<BiSimplex> {
    let yset = ctx.f.codomain();
    let p = y.p;
    let y = yset.power(y, Direction::Vertical, Token::Degeneracy(j), p)?;
    let y = yset.power(y, Direction::Horizontal, Token::Degeneracy(p), b)?;
    yset.power(y, Direction::Horizontal, Token::Degeneracy(0), a)
}

/// The diagonal family of a pointwise problem, asserted compatible.
pub fn build_diagonal_family(ctx: &TheoremContext, problem: &PointwiseHornProblem) -> Result<DiagonalFamily> {
    problem.validate(&ctx.f)?;
    let (p, q, l) = (problem.p, problem.q, problem.missing);
    let n = p + q;
    let (pb, qb) = ctx.f.domain().bounds();
    if pb < n || qb < n {
        return Err(rejected(format!("bounds ({pb}, {qb}) are too small for p + q = {n}")));
    }
    let index_set: Vec<usize> = (0..l).chain((l + 1..=q).map(|i| p + i)).collect();
    let mut faces = BTreeMap::new();
    for (&i, &xi) in &problem.faces {
        let x = BiSimplex::new(p, q - 1, xi);
        let (key, bar) = if i < l { (i, lift(ctx, x, l - 1, q - l, l - 1)?) } else { (p + i, lift(ctx, x, l, q - l - 1, l)?) };
        invariant(bar.p == n - 1 && bar.q == n - 1, || format!("x̄_{key} landed in ({}, {}), expected ({}, {})", bar.p, bar.q, n - 1, n - 1))?;
        faces.insert(key, bar.id);
    }
    let ybar = lift_target(ctx, BiSimplex::new(p, q, problem.target), l, q - l, l)?;
    invariant(ybar.p == n && ybar.q == n, || format!("ȳ landed in ({}, {}), expected ({n}, {n})", ybar.p, ybar.q))?;
    invariant(faces.keys().copied().collect::<Vec<_>>() == index_set, || "diagonal faces do not match I".into())?;
    let family = CompatibleFamily { n, faces, target: ybar.id };
    invariant(is_compatible(&ctx.diag, &family)?, || format!("diagonal family is not compatible: {family:?} from {problem:?}"))?;
    Ok(DiagonalFamily { index_set, family })
}

/// Solves a pointwise problem with a partial-horn oracle on `diag f`, and
/// checks the relations `d_i^v x = x_i` (all `i ≠ ℓ`) and `f x = y`.
pub fn pointwise_filler_via_diagonal(
    ctx: &TheoremContext,
    problem: &PointwiseHornProblem,
    oracle: &dyn HornFiller,
) -> Result<PointwiseFill> {
    let DiagonalFamily { index_set, family } = build_diagonal_family(ctx, problem)?;
    let cert = oracle.fill(&ctx.diag, &family)?;
    let Some(xbar) = cert.witness() else {
        return Ok(PointwiseFill::Unfillable { family, certificate: cert });
    };
    invariant(cert.verify(&ctx.diag)?, || "oracle returned a witness that does not fill the family".into())?;
    let (p, q, l) = (problem.p, problem.q, problem.missing);
    let x = ctx.f.domain();
    let z = BiSimplex::new(p + q, p + q, xbar);
    let z = x.power(z, Direction::Vertical, Token::Face(l), p)?;
    let z = x.power(z, Direction::Horizontal, Token::Face(0), l)?;
    let answer = x.power(z, Direction::Horizontal, Token::Face(p + 1), q - l)?;
    invariant(answer.p == p && answer.q == q, || format!("x landed in ({}, {}), expected ({p}, {q})", answer.p, answer.q))?;
    for (&i, &xi) in &problem.faces {
        let face = x.vertical(answer, Token::Face(i))?;
        invariant(face.id == xi, || format!("d_{i}^v x = {} but x_{i} = {xi} in {problem:?}", face.id))?;
    }
    let image = ctx.f.apply(answer);
    invariant(image.id == problem.target, || format!("f x = {} but y = {} in {problem:?}", image.id, problem.target))?;
    Ok(PointwiseFill::Filled(DiagonalLift {
        index_set,
        family,
        diagonal_filler: xbar,
        answer: answer.id,
        candidates_examined: cert.candidates_examined,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: usize,
    pub q: usize,
    pub missing: usize,
    pub problems: u64,
    pub fills: u64,
    /// diagonal families that passed the compatibility assertion
    pub compatible_families: u64,
    pub max_search_width: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub problem: PointwiseHornProblem,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepHalf {
    pub passed: bool,
    pub cells: Vec<SweepCell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<SweepFailure>,
}

impl SweepHalf {
    pub fn problems(&self) -> u64 {
        self.cells.iter().map(|c| c.problems).sum()
    }

    pub fn compatible_families(&self) -> u64 {
        self.cells.iter().map(|c| c.compatible_families).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub max_total_dim: usize,
    pub diagonal_check: KanReport,
    pub direct: SweepHalf,
    pub transposed: SweepHalf,
    pub passed: bool,
}

fn sweep_cell(ctx: &TheoremContext, oracle: &dyn HornFiller, p: usize, q: usize, l: usize) -> Result<(SweepCell, Option<SweepFailure>)> {
    let column = ctx.f.column_map(p)?;
    let idx: Vec<usize> = (0..=q).filter(|&i| i != l).collect();
    let mut cell = SweepCell { p, q, missing: l, problems: 0, fills: 0, compatible_families: 0, max_search_width: 0 };
    let mut failure = None;
    let mut error = None;
    enumerate_families(&column, q, &idx, |fam| {
        cell.problems += 1;
        let problem = match PointwiseHornProblem::from_column_family(p, fam) {
            Ok(pr) => pr,
            Err(e) => {
                error = Some(e);
                return ControlFlow::Break(());
            }
        };
        match pointwise_filler_via_diagonal(ctx, &problem, oracle) {
            Ok(PointwiseFill::Filled(lift)) => {
                cell.compatible_families += 1;
                cell.fills += 1;
                cell.max_search_width = cell.max_search_width.max(lift.candidates_examined);
                ControlFlow::Continue(())
            }
            Ok(PointwiseFill::Unfillable { certificate, .. }) => {
                cell.compatible_families += 1;
                let reason = format!("diagonal family has no filler (failing sub-horn {:?})", certificate.failing_subhorn);
                failure = Some(SweepFailure { problem, reason });
                ControlFlow::Break(())
            }
            Err(e) => {
                failure = Some(SweepFailure { problem, reason: e.to_string() });
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    Ok((cell, failure))
}

fn sweep_half(ctx: &TheoremContext, max_total_dim: usize) -> Result<SweepHalf> {
    let full = IndexedBruteForce::new(&ctx.diag);
    let oracle = PartialHornFiller::new(&full);
    let cells: Vec<(usize, usize, usize)> = (1..=max_total_dim)
        .flat_map(|q| (0..=max_total_dim - q).flat_map(move |p| (0..=q).map(move |l| (p, q, l))))
        .collect();
    let results: Vec<Result<(SweepCell, Option<SweepFailure>)>> =
        cells.par_iter().map(|&(p, q, l)| sweep_cell(ctx, &oracle, p, q, l)).collect();
    let mut half = SweepHalf { passed: true, cells: Vec::new(), failure: None };
    for r in results {
        let (cell, fail) = r?;
        half.cells.push(cell);
        if half.failure.is_none() && fail.is_some() {
            half.failure = fail;
            half.passed = false;
        }
    }
    Ok(half)
}

/// Checks that `diag f` is Kan up to `max_total_dim`, then solves every
/// column horn with `p + q <= max_total_dim` through the diagonal, for `f`
/// and for its transpose (which covers the row horns).
pub fn verify_theorem1_sweep(f: &BisimplicialMap, max_total_dim: usize) -> Result<SweepReport> {
    let ctx = TheoremContext::new(f.clone());
    let diagonal_check = check_kan_fibration(&ctx.diag, max_total_dim)?;
    if !diagonal_check.passed {
        let horn = diagonal_check.failure.as_ref().map(|c| format!("{:?}", c.family)).unwrap_or_default();
        return Err(rejected(format!("diagonal map is not Kan up to dimension {max_total_dim}; unfillable horn {horn}")));
    }
    let direct = sweep_half(&ctx, max_total_dim)?;
    let tctx = TheoremContext::new(f.transpose());
    let transposed = sweep_half(&tctx, max_total_dim)?;
    let passed = direct.passed && transposed.passed;
    Ok(SweepReport { max_total_dim, diagonal_check, direct, transposed, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisimplicial::TruncatedBisimplicialSet;
    use crate::groups::{eg_tensor, FiniteGroup};
    use crate::kan::BruteForce;
    use std::sync::Arc;

    fn eg_ctx(bound: usize) -> TheoremContext {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        TheoremContext::new(BisimplicialMap::to_point(Arc::new(eg_tensor(&z2, bound))))
    }

    #[test]
    fn degenerate_exponents() {
        let ctx = eg_ctx(3);
        // q = 1, ℓ = 1: I = {0}, x̄_0 = (s_0^v)^p x_0
        let p = 2;
        let x0 = 5;
        let prob = PointwiseHornProblem { p, q: 1, missing: 1, faces: BTreeMap::from([(0, x0)]), target: 0 };
        let fam = build_diagonal_family(&ctx, &prob).unwrap();
        assert_eq!(fam.index_set, vec![0]);
        let x = ctx.f.domain();
        let expect = x.power(BiSimplex::new(p, 0, x0), Direction::Vertical, Token::Degeneracy(0), p).unwrap();
        assert_eq!(fam.family.faces[&0], expect.id);
        // ℓ = 0: I = {p+1, .., p+q}
        let col = ctx.f.column_map(1).unwrap();
        let mut first = None;
        enumerate_families(&col, 2, &[1, 2], |f| {
            first = Some(f.clone());
            ControlFlow::Break(())
        })
        .unwrap();
        let prob = PointwiseHornProblem::from_column_family(1, &first.unwrap()).unwrap();
        assert_eq!(build_diagonal_family(&ctx, &prob).unwrap().index_set, vec![2, 3]);
    }

    #[test]
    fn restriction_problems_are_solved() {
        let ctx = eg_ctx(3);
        let x = ctx.f.domain().clone();
        for (p, q) in [(0, 1), (1, 1), (1, 2), (2, 1), (0, 3)] {
            let col = ctx.f.column_map(p).unwrap();
            for l in 0..=q {
                let idx: Vec<usize> = (0..=q).filter(|&i| i != l).collect();
                for w in x.simplices(p, q).step_by(3) {
                    let fam = CompatibleFamily::restricted_from(&col, crate::Simplex::new(q, w.id), &idx).unwrap();
                    let prob = PointwiseHornProblem::from_column_family(p, &fam).unwrap();
                    let out = pointwise_filler_via_diagonal(&ctx, &prob, &BruteForce).unwrap();
                    assert!(out.answer().is_some());
                }
            }
        }
    }

    #[test]
    fn bounds_and_bad_problems_are_rejected() {
        let ctx = eg_ctx(2);
        let prob = PointwiseHornProblem { p: 1, q: 2, missing: 0, faces: BTreeMap::from([(1, 0), (2, 0)]), target: 0 };
        assert!(matches!(build_diagonal_family(&ctx, &prob), Err(Error::Rejected(_))));
        let bad = PointwiseHornProblem { p: 0, q: 1, missing: 0, faces: BTreeMap::from([(0, 0)]), target: 0 };
        assert!(build_diagonal_family(&ctx, &bad).is_err());
    }

    #[test]
    fn point_sweep_passes() {
        let x = Arc::new(TruncatedBisimplicialSet::point((3, 3)));
        let r = verify_theorem1_sweep(&BisimplicialMap::to_point(x), 3).unwrap();
        assert!(r.passed);
        assert_eq!(r.direct.problems(), r.direct.compatible_families());
    }

    #[test]
    fn eg_tensor_sweep_small() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let f = BisimplicialMap::to_point(Arc::new(eg_tensor(&z2, 2)));
        let r = verify_theorem1_sweep(&f, 2).unwrap();
        assert!(r.passed, "{:?}", r.direct.failure);
        assert!(r.transposed.passed);
        assert!(r.direct.problems() > 0);
    }
}
