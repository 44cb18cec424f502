//! Compatible families, horn filling and Kan-condition checking.
//!
//! A family is always read against a simplicial map `f : X -> Y`: faces live
//! in `X_{n-1}`, the target in `Y_n`.

use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{rejected, Error, Result};
use crate::simplicial::{Simplex, SimplicialMap, TruncatedSimplicialSet};

/// Faces `x_i ∈ X_{n-1}` for `i` in the index set, and a target `y ∈ Y_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompatibleFamily {
    pub n: usize,
    pub faces: BTreeMap<usize, u32>,
    pub target: u32,
}

impl CompatibleFamily {
    pub fn new(n: usize, faces: impl IntoIterator<Item = (usize, u32)>, target: u32) -> Self {
        Self { n, faces: faces.into_iter().collect(), target }
    }

    /// The faces of an existing simplex restricted to `index_set`, targeting `f x`.
    pub fn restricted_from(f: &SimplicialMap, x: Simplex, index_set: &[usize]) -> Result<Self> {
        let dom = f.domain();
        let faces = index_set
            .iter()
            .map(|&i| Ok((i, dom.face(x, i)?.id)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self { n: x.dim, faces, target: f.apply(x).id })
    }

    pub fn index_set(&self) -> Vec<usize> {
        self.faces.keys().copied().collect()
    }

    /// The single missing index of a full horn.
    pub fn missing_index(&self) -> Option<usize> {
        if self.faces.len() != self.n {
            return None;
        }
        (0..=self.n).find(|i| !self.faces.contains_key(i))
    }
}

fn check_shape(f: &SimplicialMap, family: &CompatibleFamily) -> Result<()> {
    let (x, y) = (f.domain(), f.codomain());
    let n = family.n;
    if n == 0 {
        return Err(rejected("families live in dimension n >= 1"));
    }
    if n > x.bound() || n > y.bound() {
        return Err(Error::Truncation { dim: n, bound: x.bound().min(y.bound()) });
    }
    if let Some((&i, _)) = family.faces.iter().find(|(&i, _)| i > n) {
        return Err(rejected(format!("face index {i} outside [{n}]")));
    }
    if let Some((&i, &id)) = family.faces.iter().find(|(_, &id)| id >= x.count(n - 1)) {
        return Err(rejected(format!("face x_{i} = {id} is not a {}-simplex", n - 1)));
    }
    if family.target >= y.count(n) {
        return Err(rejected(format!("target {} is not a {n}-simplex", family.target)));
    }
    Ok(())
}

/// `d_i x_j = d_{j-1} x_i` for `i < j` in the index set, and `f x_i = d_i y`.
pub fn is_compatible(f: &SimplicialMap, family: &CompatibleFamily) -> Result<bool> {
    check_shape(f, family)?;
    Ok(compatible_unchecked(f, family))
}

fn compatible_unchecked(f: &SimplicialMap, family: &CompatibleFamily) -> bool {
    let (x, y) = (f.domain(), f.codomain());
    let n = family.n;
    let fc = f.component(n - 1);
    for (&i, &xi) in &family.faces {
        if fc[xi as usize] != y.face_table(n, i)[family.target as usize] {
            return false;
        }
    }
    if n >= 2 {
        for (&i, &xi) in &family.faces {
            for (&j, &xj) in family.faces.range(i + 1..) {
                if x.face_table(n - 1, i)[xj as usize] != x.face_table(n - 1, j - 1)[xi as usize] {
                    return false;
                }
            }
        }
    }
    true
}

fn is_witness(f: &SimplicialMap, family: &CompatibleFamily, w: u32) -> bool {
    let x = f.domain();
    f.component(family.n)[w as usize] == family.target
        && family.faces.iter().all(|(&i, &xi)| x.face_table(family.n, i)[w as usize] == xi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FillOutcome {
    Filled { witness: u32 },
    Unfillable,
}

/// Result of a filling attempt; a `Filled` witness is re-verified on construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillCertificate {
    pub outcome: FillOutcome,
    pub family: CompatibleFamily,
    pub candidates_examined: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_subhorn: Option<CompatibleFamily>,
}

impl FillCertificate {
    pub fn filled(f: &SimplicialMap, family: CompatibleFamily, witness: u32, candidates_examined: u64) -> Result<Self> {
        if witness >= f.domain().count(family.n) || !is_witness(f, &family, witness) {
            return Err(Error::Invariant(format!(
                "claimed filler {witness} does not have the requested faces for {family:?}"
            )));
        }
        Ok(Self { outcome: FillOutcome::Filled { witness }, family, candidates_examined, failing_subhorn: None })
    }

    pub fn unfillable(family: CompatibleFamily, candidates_examined: u64) -> Self {
        Self { outcome: FillOutcome::Unfillable, family, candidates_examined, failing_subhorn: None }
    }

    pub fn witness(&self) -> Option<u32> {
        match self.outcome {
            FillOutcome::Filled { witness } => Some(witness),
            FillOutcome::Unfillable => None,
        }
    }

    pub fn is_filled(&self) -> bool {
        self.witness().is_some()
    }

    /// Re-checks a certificate against `f`: a filled witness must satisfy the
    /// equations; an unfillable verdict must survive a fresh exhaustive scan.
    pub fn verify(&self, f: &SimplicialMap) -> Result<bool> {
        if !is_compatible(f, &self.family)? {
            return Ok(false);
        }
        Ok(match self.outcome {
            FillOutcome::Filled { witness } => {
                witness < f.domain().count(self.family.n) && is_witness(f, &self.family, witness)
            }
            FillOutcome::Unfillable => !brute_force_fill(f, &self.family)?.is_filled(),
        })
    }
}

/// Something that fills horns of a fixed map.
pub trait HornFiller: Sync {
    fn fill(&self, f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate>;
}

/// Scans `X_n` in ascending id order and returns the first witness.
pub fn brute_force_fill(f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate> {
    if !is_compatible(f, family)? {
        return Err(rejected(format!("family is not compatible: {family:?}")));
    }
    let total = f.domain().count(family.n);
    for w in 0..total {
        if is_witness(f, family, w) {
            return FillCertificate::filled(f, family.clone(), w, u64::from(w) + 1);
        }
    }
    Ok(FillCertificate::unfillable(family.clone(), u64::from(total)))
}

/// [`brute_force_fill`] as a [`HornFiller`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce;

impl HornFiller for BruteForce {
    fn fill(&self, f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate> {
        brute_force_fill(f, family)
    }
}

/// `X_n` bucketed by the boundary data `(x_i for i ∈ I, f x)`, remembering
/// the smallest id in each bucket. A lookup returns exactly the witness a
/// linear scan would find first.
#[derive(Debug, Clone)]
pub struct FaceIndex {
    n: usize,
    index_set: Vec<usize>,
    buckets: HashMap<Vec<u32>, (u32, u32)>,
    size: u32,
}

impl FaceIndex {
    pub fn build(f: &SimplicialMap, n: usize, index_set: &[usize]) -> Result<Self> {
        let x = f.domain();
        if n == 0 || n > x.bound() || n > f.codomain().bound() {
            return Err(Error::Truncation { dim: n, bound: x.bound() });
        }
        if index_set.iter().any(|&i| i > n) {
            return Err(rejected("index set outside [n]"));
        }
        let mut buckets: HashMap<Vec<u32>, (u32, u32)> = HashMap::new();
        let tables: Vec<&[u32]> = index_set.iter().map(|&i| x.face_table(n, i)).collect();
        let fc = f.component(n);
        for w in 0..x.count(n) {
            let mut key: Vec<u32> = tables.iter().map(|t| t[w as usize]).collect();
            key.push(fc[w as usize]);
            buckets.entry(key).and_modify(|e| e.1 += 1).or_insert((w, 1));
        }
        Ok(Self { n, index_set: index_set.to_vec(), buckets, size: x.count(n) })
    }

    pub fn lookup(&self, family: &CompatibleFamily) -> Option<u32> {
        let mut key: Vec<u32> = self.index_set.iter().map(|i| family.faces[i]).collect();
        key.push(family.target);
        self.buckets.get(&key).map(|b| b.0)
    }

    fn matches(&self, family: &CompatibleFamily) -> bool {
        family.n == self.n && family.faces.len() == self.index_set.len() && self.index_set.iter().all(|i| family.faces.contains_key(i))
    }
}

/// Face indices keyed by `(n, index set)`.
type IndexCache = HashMap<(usize, Vec<usize>), Arc<FaceIndex>>;

/// Brute-force filling through lazily built [`FaceIndex`]es, tied to one map.
#[derive(Debug)]
pub struct IndexedBruteForce {
    domain: Arc<TruncatedSimplicialSet>,
    codomain: Arc<TruncatedSimplicialSet>,
    cache: Mutex<IndexCache>,
}

impl IndexedBruteForce {
    pub fn new(f: &SimplicialMap) -> Self {
        Self { domain: f.domain().clone(), codomain: f.codomain().clone(), cache: Mutex::new(HashMap::new()) }
    }

    fn index(&self, f: &SimplicialMap, n: usize, index_set: Vec<usize>) -> Result<Arc<FaceIndex>> {
        if let Some(ix) = self.cache.lock().expect("cache lock").get(&(n, index_set.clone())) {
            return Ok(ix.clone());
        }
        let ix = Arc::new(FaceIndex::build(f, n, &index_set)?);
        self.cache.lock().expect("cache lock").insert((n, index_set), ix.clone());
        Ok(ix)
    }
}

impl HornFiller for IndexedBruteForce {
    fn fill(&self, f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate> {
        if !Arc::ptr_eq(f.domain(), &self.domain) || !Arc::ptr_eq(f.codomain(), &self.codomain) {
            return Err(rejected("indexed filler used with a different map"));
        }
        if !is_compatible(f, family)? {
            return Err(rejected(format!("family is not compatible: {family:?}")));
        }
        let ix = self.index(f, family.n, family.index_set())?;
        debug_assert!(ix.matches(family));
        Ok(match ix.lookup(family) {
            Some(w) => FillCertificate::filled(f, family.clone(), w, u64::from(w) + 1)?,
            None => FillCertificate::unfillable(family.clone(), u64::from(ix.size)),
        })
    }
}

/// Visits every compatible family over `f` with the given index set in
/// dimension `n`, by backtracking over faces in index order with pruning on
/// the first violated compatibility equation. Order: target ascending, then
/// faces lexicographically. Returns the number of families visited.
pub fn enumerate_families(
    f: &SimplicialMap,
    n: usize,
    index_set: &[usize],
    mut visit: impl FnMut(&CompatibleFamily) -> ControlFlow<()>,
) -> Result<u64> {
    let (x, y) = (f.domain(), f.codomain());
    if n == 0 {
        return Err(rejected("families live in dimension n >= 1"));
    }
    if n > x.bound() || n > y.bound() {
        return Err(Error::Truncation { dim: n, bound: x.bound().min(y.bound()) });
    }
    let mut idx = index_set.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() != index_set.len() || idx.iter().any(|&i| i > n) {
        return Err(rejected(format!("bad index set {index_set:?} for dimension {n}")));
    }

    let mut fibers: Vec<Vec<u32>> = vec![Vec::new(); y.count(n - 1) as usize];
    for (xid, &img) in f.component(n - 1).iter().enumerate() {
        fibers[img as usize].push(xid as u32);
    }

    struct Search<'a> {
        x: &'a TruncatedSimplicialSet,
        y: &'a TruncatedSimplicialSet,
        fibers: &'a [Vec<u32>],
        idx: &'a [usize],
        n: usize,
        chosen: Vec<u32>,
        visited: u64,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, target: u32, visit: &mut dyn FnMut(&CompatibleFamily) -> ControlFlow<()>) -> ControlFlow<()> {
            if pos == self.idx.len() {
                self.visited += 1;
                let fam = CompatibleFamily::new(self.n, self.idx.iter().copied().zip(self.chosen.iter().copied()), target);
                return visit(&fam);
            }
            let j = self.idx[pos];
            let below = self.y.face_table(self.n, j)[target as usize];
            for &cand in &self.fibers[below as usize] {
                let ok = self.n < 2
                    || (0..pos).all(|p| {
                        let i = self.idx[p];
                        self.x.face_table(self.n - 1, i)[cand as usize]
                            == self.x.face_table(self.n - 1, j - 1)[self.chosen[p] as usize]
                    });
                if ok {
                    self.chosen.push(cand);
                    let flow = self.run(pos + 1, target, visit);
                    self.chosen.pop();
                    flow?;
                }
            }
            ControlFlow::Continue(())
        }
    }

    let mut search = Search { x, y, fibers: &fibers, idx: &idx, n, chosen: Vec::new(), visited: 0 };
    for target in 0..y.count(n) {
        if search.run(0, target, &mut visit).is_break() {
            break;
        }
    }
    Ok(search.visited)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HornKind {
    /// all faces but one (Kan condition)
    Horns,
    /// all faces (trivial fibration to a point)
    Boundaries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<usize>,
    pub families: u64,
    pub filled: u64,
}

/// Outcome of an exhaustive check; `passed` always means "up to `max_dim`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KanReport {
    pub kind: HornKind,
    pub max_dim: usize,
    pub passed: bool,
    pub cells: Vec<CellStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FillCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl KanReport {
    pub fn families_checked(&self) -> u64 {
        self.cells.iter().map(|c| c.families).sum()
    }
}

fn run_cell(f: &SimplicialMap, n: usize, index_set: Vec<usize>, missing: Option<usize>) -> Result<(CellStats, Option<FillCertificate>)> {
    let index = FaceIndex::build(f, n, &index_set)?;
    let mut failure = None;
    let mut filled = 0;
    let families = enumerate_families(f, n, &index_set, |fam| match index.lookup(fam) {
        Some(_) => {
            filled += 1;
            ControlFlow::Continue(())
        }
        None => {
            failure = Some(FillCertificate::unfillable(fam.clone(), u64::from(index.size)));
            ControlFlow::Break(())
        }
    })?;
    Ok((CellStats { n, missing, families, filled }, failure))
}

fn assemble(kind: HornKind, max_dim: usize, results: Vec<Result<(CellStats, Option<FillCertificate>)>>) -> Result<KanReport> {
    let mut cells = Vec::with_capacity(results.len());
    let mut failure = None;
    for r in results {
        let (stats, fail) = r?;
        cells.push(stats);
        if failure.is_none() {
            failure = fail;
        }
    }
    Ok(KanReport { kind, max_dim, passed: failure.is_none(), cells, failure, note: None })
}

/// Checks every horn `Λ^n_k` for `1 <= n <= max_dim`; each `(n, k)` cell is
/// searched independently and the first failure in `(n, k)` order is reported.
pub fn check_kan_fibration(f: &SimplicialMap, max_dim: usize) -> Result<KanReport> {
    let bound = f.domain().bound().min(f.codomain().bound());
    if max_dim > bound {
        return Err(rejected(format!("max_dim {max_dim} exceeds truncation bound {bound}")));
    }
    let cells: Vec<(usize, usize)> = (1..=max_dim).flat_map(|n| (0..=n).map(move |k| (n, k))).collect();
    let results = cells
        .par_iter()
        .map(|&(n, k)| run_cell(f, n, (0..=n).filter(|&i| i != k).collect(), Some(k)))
        .collect();
    assemble(HornKind::Horns, max_dim, results)
}

/// Nonempty vertices, and every full boundary `∂Δ[n]`, `1 <= n <= max_dim`,
/// has a filler.
pub fn check_trivial_fibration_to_point(x: Arc<TruncatedSimplicialSet>, max_dim: usize) -> Result<KanReport> {
    if max_dim > x.bound() {
        return Err(rejected(format!("max_dim {max_dim} exceeds truncation bound {}", x.bound())));
    }
    let f = SimplicialMap::to_point(x);
    let results = (1..=max_dim)
        .into_par_iter()
        .map(|n| run_cell(&f, n, (0..=n).collect(), None))
        .collect();
    let mut report = assemble(HornKind::Boundaries, max_dim, results)?;
    if f.domain().count(0) == 0 {
        report.passed = false;
        report.note = Some("no vertices".into());
    }
    Ok(report)
}

/// Fills a partial horn (`1 <= |I| <= n`) using only a filler for full horns.
///
/// With `k` the largest missing index, the missing face `x_k` is itself found
/// as the filler of the family `x'_i = d_{k-1} x_i` (`i < k`),
/// `x'_{i-1} = d_k x_i` (`i > k`), `y' = d_k y` one dimension down; then the
/// family extended by `x_k` is filled, until the horn is full.
pub fn fill_partial_horn(f: &SimplicialMap, family: &CompatibleFamily, full_horn_filler: &dyn HornFiller) -> Result<FillCertificate> {
    let r = family.faces.len();
    if r == 0 || r > family.n {
        return Err(rejected(format!("need 1 <= |I| <= n, got |I| = {r} with n = {}", family.n)));
    }
    if !is_compatible(f, family)? {
        return Err(rejected(format!("family is not compatible: {family:?}")));
    }
    let mut examined = 0;
    let cert = fill_rec(f, family.clone(), full_horn_filler, &mut examined)?;
    Ok(FillCertificate { candidates_examined: examined, ..cert })
}

fn fill_rec(f: &SimplicialMap, family: CompatibleFamily, oracle: &dyn HornFiller, examined: &mut u64) -> Result<FillCertificate> {
    let n = family.n;
    if family.faces.len() == n {
        let cert = oracle.fill(f, &family)?;
        *examined += cert.candidates_examined;
        if let Some(w) = cert.witness() {
            if !is_witness(f, &family, w) {
                return Err(Error::Invariant(format!("full-horn filler returned a non-witness for {family:?}")));
            }
        }
        return Ok(cert);
    }
    let k = (0..=n).rev().find(|i| !family.faces.contains_key(i)).expect("|I| < n + 1");
    let x = f.domain();
    let y = f.codomain();
    let lower_faces = family.faces.iter().map(|(&i, &xi)| {
        if i < k {
            (i, x.face_table(n - 1, k - 1)[xi as usize])
        } else {
            (i - 1, x.face_table(n - 1, k)[xi as usize])
        }
    });
    let lower = CompatibleFamily::new(n - 1, lower_faces, y.face_table(n, k)[family.target as usize]);
    if !compatible_unchecked(f, &lower) {
        return Err(Error::Invariant(format!("derived family is not compatible: {lower:?}")));
    }
    let sub = fill_rec(f, lower, oracle, examined)?;
    let Some(xk) = sub.witness() else {
        let culprit = sub.failing_subhorn.clone().unwrap_or(sub.family.clone());
        return Ok(FillCertificate { failing_subhorn: Some(culprit), ..FillCertificate::unfillable(family, 0) });
    };
    let mut enlarged = family.clone();
    enlarged.faces.insert(k, xk);
    if !compatible_unchecked(f, &enlarged) {
        return Err(Error::Invariant(format!("enlarged family is not compatible: {enlarged:?}")));
    }
    let cert = fill_rec(f, enlarged, oracle, examined)?;
    match cert.witness() {
        Some(w) => FillCertificate::filled(f, family, w, 0),
        None => {
            let culprit = cert.failing_subhorn.clone().unwrap_or(cert.family.clone());
            Ok(FillCertificate { failing_subhorn: Some(culprit), ..FillCertificate::unfillable(family, 0) })
        }
    }
}

/// All nonempty index sets `I ⊆ [n]` with `|I| <= n`, ascending by bitmask.
pub fn partial_index_sets(n: usize) -> Vec<Vec<usize>> {
    (1u64..(1 << (n + 1)))
        .map(|mask| (0..=n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s| s.len() <= n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::SimplicialTables;

    /// Δ[1] truncated at 2: n-simplices are 0..01..1 strings.
    fn interval(bound: usize) -> TruncatedSimplicialSet {
        // n-simplex id t = number of leading zeros, 0..=n+1
        let counts = (0..=bound).map(|n| n as u32 + 2).collect();
        TruncatedSimplicialSet::from_fn(
            bound,
            counts,
            |_, i, t| if (i as u32) < t { t - 1 } else { t },
            |_, i, t| if (i as u32) < t { t + 1 } else { t },
            None,
        )
        .unwrap()
    }

    fn boundary_of_interval() -> TruncatedSimplicialSet {
        // two points, only degenerate higher simplices
        TruncatedSimplicialSet::from_tables(SimplicialTables {
            bound: 2,
            counts: vec![2, 2, 2],
            faces: vec![vec![], vec![vec![0, 1], vec![0, 1]], vec![vec![0, 1]; 3]],
            degeneracies: vec![vec![vec![0, 1]], vec![vec![0, 1]; 2]],
            labels: None,
        })
        .unwrap()
    }

    #[test]
    fn test_spaces_are_lawful() {
        use crate::simplicial::validate_simplicial_identities;
        assert!(validate_simplicial_identities(&interval(3)).is_lawful());
        assert!(validate_simplicial_identities(&boundary_of_interval()).is_lawful());
    }

    #[test]
    fn restriction_of_a_simplex_is_compatible_and_fills() {
        let f = SimplicialMap::to_point(Arc::new(interval(3)));
        for x in f.domain().simplices(3) {
            for set in partial_index_sets(3) {
                let fam = CompatibleFamily::restricted_from(&f, x, &set).unwrap();
                assert!(is_compatible(&f, &fam).unwrap());
                let cert = brute_force_fill(&f, &fam).unwrap();
                assert!(cert.is_filled());
                assert!(cert.verify(&f).unwrap());
            }
        }
    }

    #[test]
    fn mismatched_target_is_incompatible() {
        let x = Arc::new(interval(2));
        let f = SimplicialMap::identity(x.clone());
        let mut fam = CompatibleFamily::restricted_from(&f, Simplex::new(2, 1), &[0, 2]).unwrap();
        fam.target = 0;
        assert!(!is_compatible(&f, &fam).unwrap());
        assert!(brute_force_fill(&f, &fam).is_err());
    }

    #[test]
    fn shape_errors_are_rejections() {
        let f = SimplicialMap::to_point(Arc::new(interval(2)));
        assert!(is_compatible(&f, &CompatibleFamily::new(3, [(0, 0)], 0)).is_err());
        assert!(is_compatible(&f, &CompatibleFamily::new(2, [(4, 0)], 0)).is_err());
        assert!(is_compatible(&f, &CompatibleFamily::new(2, [(0, 99)], 0)).is_err());
        assert!(is_compatible(&f, &CompatibleFamily::new(0, [], 0)).is_err());
    }

    #[test]
    fn interval_is_not_kan_but_point_is() {
        let f = SimplicialMap::to_point(Arc::new(interval(2)));
        let report = check_kan_fibration(&f, 2).unwrap();
        assert!(!report.passed);
        let cert = report.failure.as_ref().unwrap();
        assert!(cert.verify(&f).unwrap());

        let p = SimplicialMap::identity(Arc::new(TruncatedSimplicialSet::point(3)));
        let report = check_kan_fibration(&p, 3).unwrap();
        assert!(report.passed);
        assert_eq!(report.cells.len(), 2 + 3 + 4);
        assert!(check_trivial_fibration_to_point(p.domain().clone(), 3).unwrap().passed);
    }

    #[test]
    fn kan_check_respects_bound() {
        let f = SimplicialMap::to_point(Arc::new(interval(2)));
        assert!(check_kan_fibration(&f, 3).is_err());
    }

    #[test]
    fn two_points_fail_the_trivial_fibration_check() {
        let x = Arc::new(boundary_of_interval());
        let r = check_trivial_fibration_to_point(x, 2).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failure.unwrap().family.n, 1);
    }

    // Enumeration oracle: the naive product space, filtered by is_compatible.
    #[test]
    fn backtracking_matches_product_enumeration() {
        let f = SimplicialMap::to_point(Arc::new(interval(3)));
        for n in 1..=3 {
            for set in partial_index_sets(n).into_iter().chain([(0..=n).collect()]) {
                let mut fast = Vec::new();
                enumerate_families(&f, n, &set, |fam| {
                    fast.push(fam.clone());
                    ControlFlow::Continue(())
                })
                .unwrap();
                let c = f.domain().count(n - 1);
                let mut slow = Vec::new();
                let total = (c as u64).pow(set.len() as u32);
                for code in 0..total {
                    let mut rest = code;
                    let mut faces = Vec::new();
                    for &i in set.iter() {
                        faces.push((i, (rest % c as u64) as u32));
                        rest /= c as u64;
                    }
                    let fam = CompatibleFamily::new(n, faces, 0);
                    if is_compatible(&f, &fam).unwrap() {
                        slow.push(fam);
                    }
                }
                fast.sort_by(|a, b| a.faces.cmp(&b.faces));
                slow.sort_by(|a, b| a.faces.cmp(&b.faces));
                assert_eq!(fast, slow, "n={n} I={set:?}");
            }
        }
    }

    #[test]
    fn indexed_search_agrees_with_scan() {
        let f = SimplicialMap::to_point(Arc::new(interval(3)));
        let indexed = IndexedBruteForce::new(&f);
        for n in 1..=3 {
            for set in partial_index_sets(n) {
                enumerate_families(&f, n, &set, |fam| {
                    assert_eq!(indexed.fill(&f, fam).unwrap().outcome, brute_force_fill(&f, fam).unwrap().outcome);
                    ControlFlow::Continue(())
                })
                .unwrap();
            }
        }
        let other = SimplicialMap::to_point(Arc::new(interval(3)));
        let fam = CompatibleFamily::restricted_from(&other, Simplex::new(1, 0), &[0]).unwrap();
        assert!(indexed.fill(&other, &fam).is_err());
    }

    #[test]
    fn partial_filler_rejects_out_of_range_index_sets() {
        let f = SimplicialMap::to_point(Arc::new(interval(2)));
        let empty = CompatibleFamily::new(2, [], 0);
        assert!(matches!(fill_partial_horn(&f, &empty, &BruteForce), Err(Error::Rejected(_))));
        let full = CompatibleFamily::restricted_from(&f, Simplex::new(2, 1), &[0, 1, 2]).unwrap();
        assert!(matches!(fill_partial_horn(&f, &full, &BruteForce), Err(Error::Rejected(_))));
    }

    #[test]
    fn partial_filler_base_case_is_the_oracle() {
        let f = SimplicialMap::to_point(Arc::new(interval(3)));
        let fam = CompatibleFamily::restricted_from(&f, Simplex::new(2, 2), &[0, 2]).unwrap();
        let direct = BruteForce.fill(&f, &fam).unwrap();
        let via = fill_partial_horn(&f, &fam, &BruteForce).unwrap();
        assert_eq!(direct.outcome, via.outcome);
    }

    // Δ[1] is not Kan, so a partial horn can fail; the failing sub-horn is reported.
    #[test]
    fn partial_filler_propagates_oracle_failure() {
        let f = SimplicialMap::to_point(Arc::new(interval(3)));
        let mut saw_failure = false;
        for set in partial_index_sets(3) {
            enumerate_families(&f, 3, &set, |fam| {
                let via = fill_partial_horn(&f, fam, &BruteForce).unwrap();
                if !via.is_filled() {
                    saw_failure = true;
                    let sub = via.failing_subhorn.as_ref().unwrap();
                    assert!(!brute_force_fill(&f, sub).unwrap().is_filled());
                    assert_eq!(sub.faces.len(), sub.n);
                }
                ControlFlow::Continue(())
            })
            .unwrap();
        }
        assert!(saw_failure);
    }
}
