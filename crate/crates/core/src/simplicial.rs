//! Finite simplicial sets truncated at a dimension bound, and maps between them.
//!
//! Simplices are `(dimension, id)` pairs with dense ids. Face tables exist for
//! dimensions `1..=bound`, degeneracy tables for `0..bound`; anything that
//! would leave that range is a [`Error::Truncation`].

use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{rejected, Error, Result};
use crate::ordinal::{basic_identity_instances, BasicIdentity, SimplicialOperator, Token};

/// An `n`-simplex, identified by its position in the dimension-`n` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex {
    pub dim: usize,
    pub id: u32,
}

impl Simplex {
    pub fn new(dim: usize, id: u32) -> Self {
        Self { dim, id }
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.dim, self.id)
    }
}

/// Serialized layout: `faces[n][i][id]` (empty for `n = 0`) and
/// `degeneracies[n][i][id]` for `n < bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialTables {
    pub bound: usize,
    pub counts: Vec<u32>,
    pub faces: Vec<Vec<Vec<u32>>>,
    pub degeneracies: Vec<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SimplicialTables", into = "SimplicialTables")]
pub struct TruncatedSimplicialSet {
    bound: usize,
    counts: Vec<u32>,
    faces: Vec<Vec<Vec<u32>>>,
    degeneracies: Vec<Vec<Vec<u32>>>,
    labels: Option<Vec<Vec<String>>>,
}

impl TryFrom<SimplicialTables> for TruncatedSimplicialSet {
    type Error = Error;

    fn try_from(t: SimplicialTables) -> Result<Self> {
        Self::from_tables(t)
    }
}

impl From<TruncatedSimplicialSet> for SimplicialTables {
    fn from(x: TruncatedSimplicialSet) -> Self {
        SimplicialTables {
            bound: x.bound,
            counts: x.counts,
            faces: x.faces,
            degeneracies: x.degeneracies,
            labels: x.labels,
        }
    }
}

impl TruncatedSimplicialSet {
    /// Checks table shapes and ranges. Simplicial identities are not checked
    /// here; see [`validate_simplicial_identities`].
    pub fn from_tables(t: SimplicialTables) -> Result<Self> {
        let SimplicialTables { bound, counts, faces, degeneracies, labels } = t;
        if counts.len() != bound + 1 {
            return Err(rejected(format!("expected {} simplex counts, got {}", bound + 1, counts.len())));
        }
        if faces.len() != bound + 1 || !faces[0].is_empty() {
            return Err(rejected("face tables must be indexed 0..=bound with none at dimension 0"));
        }
        for n in 1..=bound {
            if faces[n].len() != n + 1 {
                return Err(rejected(format!("dimension {n} needs {} face maps", n + 1)));
            }
            for (i, table) in faces[n].iter().enumerate() {
                check_table(table, counts[n], counts[n - 1], &format!("d{i} on dimension {n}"))?;
            }
        }
        if degeneracies.len() != bound {
            return Err(rejected(format!("expected degeneracy tables for dimensions 0..{bound}")));
        }
        for n in 0..bound {
            if degeneracies[n].len() != n + 1 {
                return Err(rejected(format!("dimension {n} needs {} degeneracy maps", n + 1)));
            }
            for (i, table) in degeneracies[n].iter().enumerate() {
                check_table(table, counts[n], counts[n + 1], &format!("s{i} on dimension {n}"))?;
            }
        }
        if let Some(l) = &labels {
            if l.len() != bound + 1 || l.iter().zip(&counts).any(|(v, &c)| v.len() != c as usize) {
                return Err(rejected("label table shape does not match simplex counts"));
            }
        }
        Ok(Self { bound, counts, faces, degeneracies, labels })
    }

    /// Tabulates a set from closures over ids.
    pub fn from_fn(
        bound: usize,
        counts: Vec<u32>,
        face: impl Fn(usize, usize, u32) -> u32,
        degeneracy: impl Fn(usize, usize, u32) -> u32,
        label: Option<&dyn Fn(usize, u32) -> String>,
    ) -> Result<Self> {
        let faces = (0..=bound)
            .map(|n| {
                if n == 0 {
                    return Vec::new();
                }
                (0..=n).map(|i| (0..counts[n]).map(|x| face(n, i, x)).collect()).collect()
            })
            .collect();
        let degeneracies = (0..bound)
            .map(|n| (0..=n).map(|i| (0..counts[n]).map(|x| degeneracy(n, i, x)).collect()).collect())
            .collect();
        let labels = label.map(|l| {
            (0..=bound).map(|n| (0..counts[n]).map(|x| l(n, x)).collect()).collect()
        });
        Self::from_tables(SimplicialTables { bound, counts, faces, degeneracies, labels })
    }

    /// One simplex in every dimension up to `bound`.
    pub fn point(bound: usize) -> Self {
        Self::from_fn(bound, vec![1; bound + 1], |_, _, _| 0, |_, _, _| 0, Some(&|_, _| "*".to_string()))
            .expect("point tables are well formed")
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Number of `n`-simplices; zero above the bound.
    pub fn count(&self, n: usize) -> u32 {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn simplices(&self, n: usize) -> impl Iterator<Item = Simplex> {
        (0..self.count(n)).map(move |id| Simplex::new(n, id))
    }

    pub fn label(&self, x: Simplex) -> String {
        self.labels
            .as_ref()
            .and_then(|l| l.get(x.dim)?.get(x.id as usize).cloned())
            .unwrap_or_else(|| x.to_string())
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn tables(&self) -> SimplicialTables {
        self.clone().into()
    }

    /// Raw face table `d_i : X_n -> X_{n-1}`; panics outside `1..=bound`.
    pub fn face_table(&self, n: usize, i: usize) -> &[u32] {
        &self.faces[n][i]
    }

    /// Raw degeneracy table `s_i : X_n -> X_{n+1}`; panics outside `0..bound`.
    pub fn degeneracy_table(&self, n: usize, i: usize) -> &[u32] {
        &self.degeneracies[n][i]
    }

    fn check(&self, x: Simplex) -> Result<()> {
        if x.dim > self.bound {
            return Err(Error::Truncation { dim: x.dim, bound: self.bound });
        }
        if x.id >= self.counts[x.dim] {
            return Err(rejected(format!("no simplex {x}")));
        }
        Ok(())
    }

    pub fn face(&self, x: Simplex, i: usize) -> Result<Simplex> {
        self.check(x)?;
        if x.dim == 0 || i > x.dim {
            return Err(rejected(format!("d{i} is undefined on {x}")));
        }
        Ok(Simplex::new(x.dim - 1, self.faces[x.dim][i][x.id as usize]))
    }

    pub fn degeneracy(&self, x: Simplex, i: usize) -> Result<Simplex> {
        self.check(x)?;
        if i > x.dim {
            return Err(rejected(format!("s{i} is undefined on {x}")));
        }
        if x.dim + 1 > self.bound {
            return Err(Error::Truncation { dim: x.dim + 1, bound: self.bound });
        }
        Ok(Simplex::new(x.dim + 1, self.degeneracies[x.dim][i][x.id as usize]))
    }

    pub fn apply_token(&self, x: Simplex, t: Token) -> Result<Simplex> {
        match t {
            Token::Face(i) => self.face(x, i),
            Token::Degeneracy(i) => self.degeneracy(x, i),
        }
    }
}

fn check_table(table: &[u32], len: u32, range: u32, what: &str) -> Result<()> {
    if table.len() != len as usize {
        return Err(rejected(format!("{what}: table has {} entries, expected {len}", table.len())));
    }
    if let Some(v) = table.iter().find(|&&v| v >= range) {
        return Err(rejected(format!("{what}: value {v} out of range {range}")));
    }
    Ok(())
}

/// Applies `op` to `x` by table lookups along the word.
pub fn apply_operator(x_set: &TruncatedSimplicialSet, op: &SimplicialOperator, x: Simplex) -> Result<Simplex> {
    if x.dim != op.source_dim() {
        return Err(rejected(format!("{op} cannot act on {x}")));
    }
    if op.peak_dim() > x_set.bound() {
        return Err(Error::Truncation { dim: op.peak_dim(), bound: x_set.bound() });
    }
    op.tokens().iter().try_fold(x, |acc, &t| x_set.apply_token(acc, t))
}

/// A witnessed failure of a simplicial identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityViolation {
    Identity {
        identity: BasicIdentity,
        i: usize,
        j: usize,
        simplex: Simplex,
        lhs: Simplex,
        rhs: Simplex,
    },
    DegeneracyNotInjective {
        i: usize,
        first: Simplex,
        second: Simplex,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub instances_checked: u64,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityReport {
    pub fn is_lawful(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every basic identity on every simplex where both sides stay in
/// bound, plus injectivity of each degeneracy table.
pub fn validate_simplicial_identities(x: &TruncatedSimplicialSet) -> IdentityReport {
    let mut report = IdentityReport::default();
    for n in 0..=x.bound() {
        for inst in basic_identity_instances(n) {
            if inst.peak_dim() > x.bound() {
                continue;
            }
            for s in x.simplices(n) {
                report.instances_checked += 1;
                let lhs = apply_operator(x, &inst.lhs, s).expect("in bound");
                let rhs = apply_operator(x, &inst.rhs, s).expect("in bound");
                if lhs != rhs {
                    report.violations.push(IdentityViolation::Identity {
                        identity: inst.identity,
                        i: inst.i,
                        j: inst.j,
                        simplex: s,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    for n in 0..x.bound() {
        for i in 0..=n {
            let table = x.degeneracy_table(n, i);
            let mut seen = vec![u32::MAX; x.count(n + 1) as usize];
            for (id, &img) in table.iter().enumerate() {
                let slot = &mut seen[img as usize];
                if *slot != u32::MAX {
                    report.violations.push(IdentityViolation::DegeneracyNotInjective {
                        i,
                        first: Simplex::new(n, *slot),
                        second: Simplex::new(n, id as u32),
                    });
                } else {
                    *slot = id as u32;
                }
            }
        }
    }
    report
}

/// A simplicial map between sets of the same bound.
#[derive(Debug, Clone)]
pub struct SimplicialMap {
    domain: Arc<TruncatedSimplicialSet>,
    codomain: Arc<TruncatedSimplicialSet>,
    components: Vec<Vec<u32>>,
}

impl SimplicialMap {
    /// Builds a map and checks naturality against every face and degeneracy table.
    pub fn new(
        domain: Arc<TruncatedSimplicialSet>,
        codomain: Arc<TruncatedSimplicialSet>,
        components: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if domain.bound() != codomain.bound() {
            return Err(rejected("domain and codomain bounds differ"));
        }
        if components.len() != domain.bound() + 1 {
            return Err(rejected("one component per dimension is required"));
        }
        for (n, c) in components.iter().enumerate() {
            check_table(c, domain.count(n), codomain.count(n), &format!("component {n}"))?;
        }
        let map = Self { domain, codomain, components };
        map.check_naturality()?;
        Ok(map)
    }

    fn check_naturality(&self) -> Result<()> {
        let (x, y) = (&*self.domain, &*self.codomain);
        for n in 0..=x.bound() {
            for id in 0..x.count(n) {
                let fx = self.components[n][id as usize];
                if n >= 1 {
                    for i in 0..=n {
                        let a = self.components[n - 1][x.face_table(n, i)[id as usize] as usize];
                        let b = y.face_table(n, i)[fx as usize];
                        if a != b {
                            return Err(rejected(format!("map does not commute with d{i} at {n}#{id}")));
                        }
                    }
                }
                if n < x.bound() {
                    for i in 0..=n {
                        let a = self.components[n + 1][x.degeneracy_table(n, i)[id as usize] as usize];
                        let b = y.degeneracy_table(n, i)[fx as usize];
                        if a != b {
                            return Err(rejected(format!("map does not commute with s{i} at {n}#{id}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: Arc<TruncatedSimplicialSet>) -> Self {
        let components = (0..=x.bound()).map(|n| (0..x.count(n)).collect()).collect();
        Self { codomain: x.clone(), domain: x, components }
    }

    /// The unique map to the one-point set of the same bound.
    pub fn to_point(x: Arc<TruncatedSimplicialSet>) -> Self {
        let components = (0..=x.bound()).map(|n| vec![0; x.count(n) as usize]).collect();
        let codomain = Arc::new(TruncatedSimplicialSet::point(x.bound()));
        Self { domain: x, codomain, components }
    }

    pub(crate) fn from_parts_unchecked(
        domain: Arc<TruncatedSimplicialSet>,
        codomain: Arc<TruncatedSimplicialSet>,
        components: Vec<Vec<u32>>,
    ) -> Self {
        Self { domain, codomain, components }
    }

    pub fn domain(&self) -> &Arc<TruncatedSimplicialSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<TruncatedSimplicialSet> {
        &self.codomain
    }

    pub fn component(&self, n: usize) -> &[u32] {
        &self.components[n]
    }

    pub fn apply(&self, x: Simplex) -> Simplex {
        Simplex::new(x.dim, self.components[x.dim][x.id as usize])
    }
}

/// Connected components of `X_0`, each sorted, ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub components: Vec<Vec<u32>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Path components: the equivalence on vertices generated by `d_0 x ~ d_1 x`.
pub fn pi0(x: &TruncatedSimplicialSet) -> Result<Partition> {
    if x.bound() < 1 {
        return Err(Error::Truncation { dim: 1, bound: x.bound() });
    }
    let n0 = x.count(0) as usize;
    let mut uf = UnionFind::<usize>::new(n0);
    for (&a, &b) in x.face_table(1, 0).iter().zip(x.face_table(1, 1)) {
        uf.union(a as usize, b as usize);
    }
    let labels = uf.into_labeling();
    let mut components: Vec<Vec<u32>> = Vec::new();
    let mut slot_of_root = vec![usize::MAX; n0];
    for (v, &root) in labels.iter().enumerate() {
        if slot_of_root[root] == usize::MAX {
            slot_of_root[root] = components.len();
            components.push(Vec::new());
        }
        components[slot_of_root[root]].push(v as u32);
    }
    Ok(Partition { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::{compose_ordinal, factorize, OrdinalMap};

    /// The standard 2-simplex Δ[2] truncated at 2: n-simplices are weakly
    /// increasing sequences in {0,1,2} of length n+1.
    pub(crate) fn standard_simplex(bound: usize) -> TruncatedSimplicialSet {
        let seqs: Vec<Vec<OrdinalMap>> = (0..=bound).map(|n| OrdinalMap::all(n, 2)).collect();
        let find = |n: usize, m: &OrdinalMap| seqs[n].iter().position(|s| s == m).unwrap() as u32;
        let counts = seqs.iter().map(|v| v.len() as u32).collect();
        TruncatedSimplicialSet::from_fn(
            bound,
            counts,
            |n, i, x| {
                let s = &seqs[n][x as usize];
                find(n - 1, &compose_ordinal(s, &OrdinalMap::coface(n, i).unwrap()).unwrap())
            },
            |n, i, x| {
                let s = &seqs[n][x as usize];
                find(n + 1, &compose_ordinal(s, &OrdinalMap::codegeneracy(n, i).unwrap()).unwrap())
            },
            None,
        )
        .unwrap()
    }

    #[test]
    fn point_is_lawful_and_connected() {
        let p = TruncatedSimplicialSet::point(3);
        assert!(validate_simplicial_identities(&p).is_lawful());
        assert_eq!(pi0(&p).unwrap().len(), 1);
    }

    #[test]
    fn standard_simplex_is_lawful() {
        let x = standard_simplex(3);
        let r = validate_simplicial_identities(&x);
        assert!(r.is_lawful(), "{:?}", r.violations.first());
        assert!(r.instances_checked > 0);
    }

    #[test]
    fn swapped_face_entries_are_detected() {
        let mut t = standard_simplex(3).tables();
        let table = &mut t.faces[2][1];
        let (a, b) = (0, table.iter().position(|&v| v != table[0]).unwrap());
        table.swap(a, b);
        let corrupted = TruncatedSimplicialSet::from_tables(t).unwrap();
        assert!(!validate_simplicial_identities(&corrupted).is_lawful());
    }

    #[test]
    fn empty_word_and_section_identity() {
        let x = standard_simplex(3);
        for s in x.simplices(1) {
            assert_eq!(apply_operator(&x, &SimplicialOperator::identity(1), s).unwrap(), s);
            let op = SimplicialOperator::new(1, vec![Token::Degeneracy(1), Token::Face(1)]).unwrap();
            assert_eq!(apply_operator(&x, &op, s).unwrap(), s);
        }
    }

    #[test]
    fn truncation_fails_loudly() {
        let x = standard_simplex(2);
        let s = Simplex::new(2, 0);
        assert!(matches!(x.degeneracy(s, 0), Err(Error::Truncation { .. })));
        let op = SimplicialOperator::new(1, vec![Token::Degeneracy(0), Token::Degeneracy(0), Token::Face(0), Token::Face(0)]).unwrap();
        assert!(matches!(apply_operator(&x, &op, Simplex::new(1, 0)), Err(Error::Truncation { dim: 3, bound: 2 })));
        assert!(apply_operator(&x, &op, Simplex::new(2, 0)).is_err());
    }

    #[test]
    fn apply_operator_is_functorial() {
        let x = standard_simplex(3);
        for l in 0..=3 {
            for m in 0..=3 {
                for n in 0..=3 {
                    for beta in OrdinalMap::all(l, m) {
                        for alpha in OrdinalMap::all(m, n) {
                            let ab = compose_ordinal(&alpha, &beta).unwrap();
                            for s in x.simplices(n) {
                                let direct = apply_operator(&x, &factorize(&ab), s).unwrap();
                                let a = apply_operator(&x, &factorize(&alpha), s).unwrap();
                                let stepwise = apply_operator(&x, &factorize(&beta), a).unwrap();
                                assert_eq!(direct, stepwise);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let mut t = TruncatedSimplicialSet::point(2).tables();
        t.faces[1][0][0] = 7;
        assert!(TruncatedSimplicialSet::from_tables(t).is_err());
        let mut t = TruncatedSimplicialSet::point(2).tables();
        t.degeneracies.pop();
        assert!(TruncatedSimplicialSet::from_tables(t).is_err());
    }

    #[test]
    fn pi0_needs_dimension_one() {
        assert!(matches!(pi0(&TruncatedSimplicialSet::point(0)), Err(Error::Truncation { .. })));
    }

    #[test]
    fn non_natural_map_is_rejected() {
        let x = Arc::new(standard_simplex(2));
        let mut comps: Vec<Vec<u32>> = (0..=2).map(|n| (0..x.count(n)).collect()).collect();
        comps[0].swap(0, 1);
        assert!(SimplicialMap::new(x.clone(), x.clone(), comps).is_err());
        let id = SimplicialMap::identity(x.clone());
        assert_eq!(id.apply(Simplex::new(2, 3)), Simplex::new(2, 3));
    }

    #[test]
    fn json_round_trip_validates() {
        let x = standard_simplex(2);
        let s = serde_json::to_string(&x).unwrap();
        let back: TruncatedSimplicialSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let broken = s.replacen("\"bound\":2", "\"bound\":3", 1);
        assert!(serde_json::from_str::<TruncatedSimplicialSet>(&broken).is_err());
    }
}
