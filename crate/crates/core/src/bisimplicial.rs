//! Truncated bisimplicial sets `X_{p,q}`, `p <= P`, `q <= Q`.
//!
//! The first index is horizontal: `d_i^h, s_i^h` change `p`, while
//! `d_i^v, s_i^v` change `q`. Rows `X_{*,q}`, columns `X_{p,*}` and the
//! diagonal are materialized as ordinary [`TruncatedSimplicialSet`]s.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{rejected, Error, Result};
use crate::ordinal::Token;
use crate::simplicial::{
    validate_simplicial_identities, IdentityReport, SimplicialMap, SimplicialTables, TruncatedSimplicialSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiSimplex {
    pub p: usize,
    pub q: usize,
    pub id: u32,
}

impl BiSimplex {
    pub fn new(p: usize, q: usize, id: u32) -> Self {
        Self { p, q, id }
    }
}

impl fmt::Display for BiSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})#{}", self.p, self.q, self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// Serialized layout, all indexed `[p][q][i][id]`; tables that do not exist
/// (`p = 0` faces, `p = P` degeneracies, and likewise vertically) are empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimplicialTables {
    pub bounds: (usize, usize),
    pub counts: Vec<Vec<u32>>,
    pub horizontal_faces: Vec<Vec<Vec<Vec<u32>>>>,
    pub vertical_faces: Vec<Vec<Vec<Vec<u32>>>>,
    pub horizontal_degeneracies: Vec<Vec<Vec<Vec<u32>>>>,
    pub vertical_degeneracies: Vec<Vec<Vec<Vec<u32>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<Vec<String>>>>,
}

type Tables = Vec<Vec<Vec<Vec<u32>>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BisimplicialTables", into = "BisimplicialTables")]
pub struct TruncatedBisimplicialSet {
    bounds: (usize, usize),
    counts: Vec<Vec<u32>>,
    hfaces: Tables,
    vfaces: Tables,
    hdegs: Tables,
    vdegs: Tables,
    labels: Option<Vec<Vec<Vec<String>>>>,
}

impl TryFrom<BisimplicialTables> for TruncatedBisimplicialSet {
    type Error = Error;

    fn try_from(t: BisimplicialTables) -> Result<Self> {
        Self::from_tables(t)
    }
}

impl From<TruncatedBisimplicialSet> for BisimplicialTables {
    fn from(x: TruncatedBisimplicialSet) -> Self {
        BisimplicialTables {
            bounds: x.bounds,
            counts: x.counts,
            horizontal_faces: x.hfaces,
            vertical_faces: x.vfaces,
            horizontal_degeneracies: x.hdegs,
            vertical_degeneracies: x.vdegs,
            labels: x.labels,
        }
    }
}

fn check_grid(t: &Tables, bounds: (usize, usize), counts: &[Vec<u32>], which: (Direction, bool)) -> Result<()> {
    let (pb, qb) = bounds;
    let (dir, is_face) = which;
    if t.len() != pb + 1 || t.iter().any(|col| col.len() != qb + 1) {
        return Err(rejected(format!("{dir:?} table grid must be ({}, {})", pb + 1, qb + 1)));
    }
    for p in 0..=pb {
        for q in 0..=qb {
            let (n, nb) = match dir {
                Direction::Horizontal => (p, pb),
                Direction::Vertical => (q, qb),
            };
            let expected = if is_face {
                if n == 0 { 0 } else { n + 1 }
            } else if n == nb {
                0
            } else {
                n + 1
            };
            let cell = &t[p][q];
            if cell.len() != expected {
                return Err(rejected(format!("{dir:?} tables at ({p},{q}): expected {expected} maps")));
            }
            if expected == 0 {
                continue;
            }
            let (tp, tq) = match (dir, is_face) {
                (Direction::Horizontal, true) => (p - 1, q),
                (Direction::Horizontal, false) => (p + 1, q),
                (Direction::Vertical, true) => (p, q - 1),
                (Direction::Vertical, false) => (p, q + 1),
            };
            for table in cell {
                if table.len() != counts[p][q] as usize || table.iter().any(|&v| v >= counts[tp][tq]) {
                    return Err(rejected(format!("{dir:?} table at ({p},{q}) has the wrong shape or range")));
                }
            }
        }
    }
    Ok(())
}

impl TruncatedBisimplicialSet {
    pub fn from_tables(t: BisimplicialTables) -> Result<Self> {
        let (pb, qb) = t.bounds;
        if t.counts.len() != pb + 1 || t.counts.iter().any(|c| c.len() != qb + 1) {
            return Err(rejected("count grid does not match bounds"));
        }
        check_grid(&t.horizontal_faces, t.bounds, &t.counts, (Direction::Horizontal, true))?;
        check_grid(&t.vertical_faces, t.bounds, &t.counts, (Direction::Vertical, true))?;
        check_grid(&t.horizontal_degeneracies, t.bounds, &t.counts, (Direction::Horizontal, false))?;
        check_grid(&t.vertical_degeneracies, t.bounds, &t.counts, (Direction::Vertical, false))?;
        if let Some(l) = &t.labels {
            let ok = l.len() == pb + 1
                && l.iter().zip(&t.counts).all(|(lc, cc)| lc.len() == qb + 1 && lc.iter().zip(cc).all(|(v, &c)| v.len() == c as usize));
            if !ok {
                return Err(rejected("label grid does not match counts"));
            }
        }
        Ok(Self {
            bounds: t.bounds,
            counts: t.counts,
            hfaces: t.horizontal_faces,
            vfaces: t.vertical_faces,
            hdegs: t.horizontal_degeneracies,
            vdegs: t.vertical_degeneracies,
            labels: t.labels,
        })
    }

    /// Tabulates a bisimplicial set from closures `(p, q, i, id) -> id`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn(
        bounds: (usize, usize),
        counts: Vec<Vec<u32>>,
        hface: impl Fn(usize, usize, usize, u32) -> u32,
        vface: impl Fn(usize, usize, usize, u32) -> u32,
        hdeg: impl Fn(usize, usize, usize, u32) -> u32,
        vdeg: impl Fn(usize, usize, usize, u32) -> u32,
        label: Option<&dyn Fn(usize, usize, u32) -> String>,
    ) -> Result<Self> {
        let (pb, qb) = bounds;
        let grid = |exists: &dyn Fn(usize, usize) -> usize, g: &dyn Fn(usize, usize, usize, u32) -> u32| -> Tables {
            (0..=pb)
                .map(|p| {
                    (0..=qb)
                        .map(|q| (0..exists(p, q)).map(|i| (0..counts[p][q]).map(|x| g(p, q, i, x)).collect()).collect())
                        .collect()
                })
                .collect()
        };
        let hfaces = grid(&|p, _| if p == 0 { 0 } else { p + 1 }, &hface);
        let vfaces = grid(&|_, q| if q == 0 { 0 } else { q + 1 }, &vface);
        let hdegs = grid(&|p, _| if p == pb { 0 } else { p + 1 }, &hdeg);
        let vdegs = grid(&|_, q| if q == qb { 0 } else { q + 1 }, &vdeg);
        let labels = label.map(|l| {
            (0..=pb).map(|p| (0..=qb).map(|q| (0..counts[p][q]).map(|x| l(p, q, x)).collect()).collect()).collect()
        });
        Self::from_tables(BisimplicialTables {
            bounds,
            counts,
            horizontal_faces: hfaces,
            vertical_faces: vfaces,
            horizontal_degeneracies: hdegs,
            vertical_degeneracies: vdegs,
            labels,
        })
    }

    pub fn point(bounds: (usize, usize)) -> Self {
        let counts = vec![vec![1; bounds.1 + 1]; bounds.0 + 1];
        Self::from_fn(bounds, counts, |_, _, _, _| 0, |_, _, _, _| 0, |_, _, _, _| 0, |_, _, _, _| 0, Some(&|_, _, _| "*".into()))
            .expect("point tables are well formed")
    }

    pub fn bounds(&self) -> (usize, usize) {
        self.bounds
    }

    pub fn count(&self, p: usize, q: usize) -> u32 {
        self.counts.get(p).and_then(|c| c.get(q)).copied().unwrap_or(0)
    }

    pub fn simplices(&self, p: usize, q: usize) -> impl Iterator<Item = BiSimplex> {
        (0..self.count(p, q)).map(move |id| BiSimplex::new(p, q, id))
    }

    pub fn label(&self, x: BiSimplex) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(x.p)?.get(x.q)?.get(x.id as usize).cloned())
            .unwrap_or_else(|| x.to_string())
    }

    pub fn tables(&self) -> BisimplicialTables {
        self.clone().into()
    }

    pub fn hface_table(&self, p: usize, q: usize, i: usize) -> &[u32] {
        &self.hfaces[p][q][i]
    }

    pub fn vface_table(&self, p: usize, q: usize, i: usize) -> &[u32] {
        &self.vfaces[p][q][i]
    }

    pub fn hdeg_table(&self, p: usize, q: usize, i: usize) -> &[u32] {
        &self.hdegs[p][q][i]
    }

    pub fn vdeg_table(&self, p: usize, q: usize, i: usize) -> &[u32] {
        &self.vdegs[p][q][i]
    }

    fn check(&self, x: BiSimplex) -> Result<()> {
        let (pb, qb) = self.bounds;
        if x.p > pb {
            return Err(Error::Truncation { dim: x.p, bound: pb });
        }
        if x.q > qb {
            return Err(Error::Truncation { dim: x.q, bound: qb });
        }
        if x.id >= self.counts[x.p][x.q] {
            return Err(rejected(format!("no bisimplex {x}")));
        }
        Ok(())
    }

    /// One horizontal generator; truncation is an error.
    pub fn horizontal(&self, x: BiSimplex, t: Token) -> Result<BiSimplex> {
        self.check(x)?;
        match t {
            Token::Face(i) if x.p >= 1 && i <= x.p => Ok(BiSimplex::new(x.p - 1, x.q, self.hfaces[x.p][x.q][i][x.id as usize])),
            Token::Degeneracy(i) if i <= x.p => {
                if x.p + 1 > self.bounds.0 {
                    return Err(Error::Truncation { dim: x.p + 1, bound: self.bounds.0 });
                }
                Ok(BiSimplex::new(x.p + 1, x.q, self.hdegs[x.p][x.q][i][x.id as usize]))
            }
            _ => Err(rejected(format!("horizontal {t} is undefined on {x}"))),
        }
    }

    /// One vertical generator; truncation is an error.
    pub fn vertical(&self, x: BiSimplex, t: Token) -> Result<BiSimplex> {
        self.check(x)?;
        match t {
            Token::Face(i) if x.q >= 1 && i <= x.q => Ok(BiSimplex::new(x.p, x.q - 1, self.vfaces[x.p][x.q][i][x.id as usize])),
            Token::Degeneracy(i) if i <= x.q => {
                if x.q + 1 > self.bounds.1 {
                    return Err(Error::Truncation { dim: x.q + 1, bound: self.bounds.1 });
                }
                Ok(BiSimplex::new(x.p, x.q + 1, self.vdegs[x.p][x.q][i][x.id as usize]))
            }
            _ => Err(rejected(format!("vertical {t} is undefined on {x}"))),
        }
    }

    /// `t` applied `times` times in the given direction, left to right.
    pub fn power(&self, x: BiSimplex, dir: Direction, t: Token, times: usize) -> Result<BiSimplex> {
        (0..times).try_fold(x, |acc, _| match dir {
            Direction::Horizontal => self.horizontal(acc, t),
            Direction::Vertical => self.vertical(acc, t),
        })
    }

    /// Row `X_{*,q}` with the horizontal structure.
    pub fn row(&self, q: usize) -> Result<TruncatedSimplicialSet> {
        if q > self.bounds.1 {
            return Err(rejected(format!("row {q} outside bounds {:?}", self.bounds)));
        }
        let pb = self.bounds.0;
        TruncatedSimplicialSet::from_tables(SimplicialTables {
            bound: pb,
            counts: (0..=pb).map(|p| self.counts[p][q]).collect(),
            faces: (0..=pb).map(|p| self.hfaces[p][q].clone()).collect(),
            degeneracies: (0..pb).map(|p| self.hdegs[p][q].clone()).collect(),
            labels: self.labels.as_ref().map(|l| (0..=pb).map(|p| l[p][q].clone()).collect()),
        })
    }

    /// Column `X_{p,*}` with the vertical structure.
    pub fn column(&self, p: usize) -> Result<TruncatedSimplicialSet> {
        if p > self.bounds.0 {
            return Err(rejected(format!("column {p} outside bounds {:?}", self.bounds)));
        }
        let qb = self.bounds.1;
        TruncatedSimplicialSet::from_tables(SimplicialTables {
            bound: qb,
            counts: self.counts[p].clone(),
            faces: self.vfaces[p].clone(),
            degeneracies: (0..qb).map(|q| self.vdegs[p][q].clone()).collect(),
            labels: self.labels.as_ref().map(|l| l[p].clone()),
        })
    }

    /// `n ↦ X_{n,n}` with `d_i = d_i^h d_i^v` and `s_i = s_i^h s_i^v`.
    pub fn diagonal(&self) -> TruncatedSimplicialSet {
        let bound = self.bounds.0.min(self.bounds.1);
        let counts = (0..=bound).map(|n| self.counts[n][n]).collect();
        let label = |n: usize, x: u32| self.label(BiSimplex::new(n, n, x));
        TruncatedSimplicialSet::from_fn(
            bound,
            counts,
            |n, i, x| {
                let v = self.vfaces[n][n][i][x as usize];
                self.hfaces[n][n - 1][i][v as usize]
            },
            |n, i, x| {
                let v = self.vdegs[n][n][i][x as usize];
                self.hdegs[n][n + 1][i][v as usize]
            },
            self.labels.as_ref().map(|_| &label as &dyn Fn(usize, u32) -> String),
        )
        .expect("diagonal of well-formed tables is well formed")
    }

    /// Exchanges the two directions.
    pub fn transpose(&self) -> Self {
        let (pb, qb) = self.bounds;
        let swap = |t: &Tables| -> Tables { (0..=qb).map(|q| (0..=pb).map(|p| t[p][q].clone()).collect()).collect() };
        Self {
            bounds: (qb, pb),
            counts: (0..=qb).map(|q| (0..=pb).map(|p| self.counts[p][q]).collect()).collect(),
            hfaces: swap(&self.vfaces),
            vfaces: swap(&self.hfaces),
            hdegs: swap(&self.vdegs),
            vdegs: swap(&self.hdegs),
            labels: self
                .labels
                .as_ref()
                .map(|l| (0..=qb).map(|q| (0..=pb).map(|p| l[p][q].clone()).collect()).collect()),
        }
    }

    /// `(A ⊗ B)_{p,q} = A_p × B_q`, ids `a * |B_q| + b`.
    pub fn tensor(a: &TruncatedSimplicialSet, b: &TruncatedSimplicialSet) -> Self {
        let bounds = (a.bound(), b.bound());
        let counts = (0..=bounds.0).map(|p| (0..=bounds.1).map(|q| a.count(p) * b.count(q)).collect()).collect();
        let split = |q: usize, x: u32| (x / b.count(q), x % b.count(q));
        let label = |p: usize, q: usize, x: u32| {
            let (ai, bi) = split(q, x);
            format!("{}⊗{}", a.label(crate::Simplex::new(p, ai)), b.label(crate::Simplex::new(q, bi)))
        };
        let labelled = a.has_labels() || b.has_labels();
        Self::from_fn(
            bounds,
            counts,
            |p, q, i, x| {
                let (ai, bi) = split(q, x);
                a.face_table(p, i)[ai as usize] * b.count(q) + bi
            },
            |_, q, i, x| {
                let (ai, bi) = split(q, x);
                ai * b.count(q - 1) + b.face_table(q, i)[bi as usize]
            },
            |p, q, i, x| {
                let (ai, bi) = split(q, x);
                a.degeneracy_table(p, i)[ai as usize] * b.count(q) + bi
            },
            |_, q, i, x| {
                let (ai, bi) = split(q, x);
                ai * b.count(q + 1) + b.degeneracy_table(q, i)[bi as usize]
            },
            if labelled { Some(&label) } else { None },
        )
        .expect("tensor of well-formed sets is well formed")
    }

    /// Identity audit of every row and column, plus commutation of every
    /// horizontal generator with every vertical one.
    pub fn validate(&self) -> BisimplicialReport {
        let (pb, qb) = self.bounds;
        let mut report = BisimplicialReport::default();
        for q in 0..=qb {
            let r = validate_simplicial_identities(&self.row(q).expect("in bounds"));
            if !r.is_lawful() {
                report.rows.push((q, r));
            }
        }
        for p in 0..=pb {
            let r = validate_simplicial_identities(&self.column(p).expect("in bounds"));
            if !r.is_lawful() {
                report.columns.push((p, r));
            }
        }
        for p in 0..=pb {
            for q in 0..=qb {
                let mut hs: Vec<Token> = Vec::new();
                if p >= 1 {
                    hs.extend((0..=p).map(Token::Face));
                }
                if p < pb {
                    hs.extend((0..=p).map(Token::Degeneracy));
                }
                let mut vs: Vec<Token> = Vec::new();
                if q >= 1 {
                    vs.extend((0..=q).map(Token::Face));
                }
                if q < qb {
                    vs.extend((0..=q).map(Token::Degeneracy));
                }
                for x in self.simplices(p, q) {
                    for &h in &hs {
                        for &v in &vs {
                            report.commutations_checked += 1;
                            let hv = self.vertical(x, v).and_then(|y| self.horizontal(y, h)).expect("in bounds");
                            let vh = self.horizontal(x, h).and_then(|y| self.vertical(y, v)).expect("in bounds");
                            if hv != vh {
                                report.commutation_violations.push(CommutationViolation { simplex: x, horizontal: h, vertical: v });
                            }
                        }
                    }
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationViolation {
    pub simplex: BiSimplex,
    pub horizontal: Token,
    pub vertical: Token,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisimplicialReport {
    pub rows: Vec<(usize, IdentityReport)>,
    pub columns: Vec<(usize, IdentityReport)>,
    pub commutations_checked: u64,
    pub commutation_violations: Vec<CommutationViolation>,
}

impl BisimplicialReport {
    pub fn is_lawful(&self) -> bool {
        self.rows.is_empty() && self.columns.is_empty() && self.commutation_violations.is_empty()
    }
}

/// A map of bisimplicial sets with equal bounds.
#[derive(Debug, Clone)]
pub struct BisimplicialMap {
    domain: Arc<TruncatedBisimplicialSet>,
    codomain: Arc<TruncatedBisimplicialSet>,
    components: Vec<Vec<Vec<u32>>>,
}

impl BisimplicialMap {
    /// Builds a map, checking it commutes with all four table families.
    pub fn new(
        domain: Arc<TruncatedBisimplicialSet>,
        codomain: Arc<TruncatedBisimplicialSet>,
        components: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        let (pb, qb) = domain.bounds();
        if codomain.bounds() != (pb, qb) {
            return Err(rejected("domain and codomain bounds differ"));
        }
        let shape_ok = components.len() == pb + 1
            && (0..=pb).all(|p| {
                components[p].len() == qb + 1
                    && (0..=qb).all(|q| {
                        components[p][q].len() == domain.count(p, q) as usize
                            && components[p][q].iter().all(|&v| v < codomain.count(p, q))
                    })
            });
        if !shape_ok {
            return Err(rejected("component grid does not match the domain and codomain"));
        }
        let map = Self { domain, codomain, components };
        for p in 0..=pb {
            for q in 0..=qb {
                for x in map.domain.simplices(p, q) {
                    let fx = map.apply(x);
                    let mut gens: Vec<(Direction, Token)> = Vec::new();
                    for i in 0..=p {
                        if p >= 1 {
                            gens.push((Direction::Horizontal, Token::Face(i)));
                        }
                        if p < pb {
                            gens.push((Direction::Horizontal, Token::Degeneracy(i)));
                        }
                    }
                    for i in 0..=q {
                        if q >= 1 {
                            gens.push((Direction::Vertical, Token::Face(i)));
                        }
                        if q < qb {
                            gens.push((Direction::Vertical, Token::Degeneracy(i)));
                        }
                    }
                    for (dir, t) in gens {
                        let (a, b) = match dir {
                            Direction::Horizontal => (map.domain.horizontal(x, t)?, map.codomain.horizontal(fx, t)?),
                            Direction::Vertical => (map.domain.vertical(x, t)?, map.codomain.vertical(fx, t)?),
                        };
                        if map.apply(a) != b {
                            return Err(rejected(format!("map does not commute with {dir:?} {t} at {x}")));
                        }
                    }
                }
            }
        }
        Ok(map)
    }

    pub fn identity(x: Arc<TruncatedBisimplicialSet>) -> Self {
        let (pb, qb) = x.bounds();
        let components = (0..=pb).map(|p| (0..=qb).map(|q| (0..x.count(p, q)).collect()).collect()).collect();
        Self { codomain: x.clone(), domain: x, components }
    }

    pub fn to_point(x: Arc<TruncatedBisimplicialSet>) -> Self {
        let (pb, qb) = x.bounds();
        let components = (0..=pb).map(|p| (0..=qb).map(|q| vec![0; x.count(p, q) as usize]).collect()).collect();
        Self { codomain: Arc::new(TruncatedBisimplicialSet::point((pb, qb))), domain: x, components }
    }

    pub fn domain(&self) -> &Arc<TruncatedBisimplicialSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<TruncatedBisimplicialSet> {
        &self.codomain
    }

    pub fn apply(&self, x: BiSimplex) -> BiSimplex {
        BiSimplex::new(x.p, x.q, self.components[x.p][x.q][x.id as usize])
    }

    pub fn transpose(&self) -> Self {
        let (pb, qb) = self.domain.bounds();
        Self {
            domain: Arc::new(self.domain.transpose()),
            codomain: Arc::new(self.codomain.transpose()),
            components: (0..=qb).map(|q| (0..=pb).map(|p| self.components[p][q].clone()).collect()).collect(),
        }
    }

    /// `f_{p,*}`.
    pub fn column_map(&self, p: usize) -> Result<SimplicialMap> {
        let dom = Arc::new(self.domain.column(p)?);
        let cod = Arc::new(self.codomain.column(p)?);
        Ok(SimplicialMap::from_parts_unchecked(dom, cod, self.components[p].clone()))
    }

    /// `f_{*,q}`.
    pub fn row_map(&self, q: usize) -> Result<SimplicialMap> {
        let dom = Arc::new(self.domain.row(q)?);
        let cod = Arc::new(self.codomain.row(q)?);
        let pb = self.domain.bounds().0;
        Ok(SimplicialMap::from_parts_unchecked(dom, cod, (0..=pb).map(|p| self.components[p][q].clone()).collect()))
    }
}

/// `diag f : diag X -> diag Y`.
pub fn diagonal_map(f: &BisimplicialMap) -> SimplicialMap {
    let dom = Arc::new(f.domain.diagonal());
    let cod = Arc::new(f.codomain.diagonal());
    let components = (0..=dom.bound()).map(|n| f.components[n][n].clone()).collect();
    SimplicialMap::from_parts_unchecked(dom, cod, components)
}
