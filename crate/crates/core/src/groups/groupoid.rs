//! Finite groupoids, their nerves, and an algebraic horn filler.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::FiniteGroup;
use crate::error::{rejected, Error, Result};
use crate::kan::{CompatibleFamily, FillCertificate, HornFiller};
use crate::simplicial::{SimplicialMap, TruncatedSimplicialSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub source: u32,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    labels: Vec<String>,
    compose: HashMap<(u32, u32), u32>,
    identities: Vec<u32>,
    inverses: Vec<u32>,
}

impl FiniteGroupoid {
    /// `compose(g, f) = g ∘ f` is consulted for every pair with
    /// `source(g) = target(f)`; all category and inverse laws are checked.
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        labels: Vec<String>,
        identities: Vec<u32>,
        compose: impl Fn(u32, u32) -> u32,
    ) -> Result<Self> {
        let (no, na) = (objects.len() as u32, arrows.len() as u32);
        if labels.len() != arrows.len() || identities.len() != objects.len() {
            return Err(rejected("groupoid label or identity list has the wrong length"));
        }
        if arrows.iter().any(|a| a.source >= no || a.target >= no) || identities.iter().any(|&i| i >= na) {
            return Err(rejected("groupoid arrow or identity out of range"));
        }
        for (o, &i) in identities.iter().enumerate() {
            if arrows[i as usize] != (Arrow { source: o as u32, target: o as u32 }) {
                return Err(rejected(format!("identity of object {o} is not a loop at it")));
            }
        }
        let mut table = HashMap::new();
        for g in 0..na {
            for f in 0..na {
                if arrows[g as usize].source != arrows[f as usize].target {
                    continue;
                }
                let h = compose(g, f);
                let ok = h < na
                    && arrows[h as usize].source == arrows[f as usize].source
                    && arrows[h as usize].target == arrows[g as usize].target;
                if !ok {
                    return Err(rejected(format!("composite of {g} and {f} has the wrong endpoints")));
                }
                table.insert((g, f), h);
            }
        }
        let mut c = Self { objects, arrows, labels, compose: table, identities, inverses: Vec::new() };
        for (&(g, f), &gf) in &c.compose {
            for h in 0..na {
                if let (Some(hg), Some(hgf)) = (c.compose(h, g), c.compose(h, gf)) {
                    if c.compose(hg, f) != Some(hgf) {
                        return Err(rejected(format!("composition is not associative at ({h}, {g}, {f})")));
                    }
                }
            }
        }
        for f in 0..na {
            let a = c.arrows[f as usize];
            if c.compose(c.identity(a.target), f) != Some(f) || c.compose(f, c.identity(a.source)) != Some(f) {
                return Err(rejected(format!("identity law fails for arrow {f}")));
            }
        }
        let inverses = (0..na)
            .map(|f| {
                let a = c.arrows[f as usize];
                (0..na)
                    .find(|&g| c.compose(g, f) == Some(c.identity(a.source)) && c.compose(f, g) == Some(c.identity(a.target)))
                    .ok_or_else(|| rejected(format!("arrow {f} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        c.inverses = inverses;
        Ok(c)
    }

    /// One object `*`, one arrow per element, `g ∘ f = gf`.
    pub fn from_group(g: &FiniteGroup) -> Self {
        let n = g.order() as u32;
        Self::new(
            vec!["*".into()],
            vec![Arrow { source: 0, target: 0 }; n as usize],
            g.labels().to_vec(),
            vec![g.identity()],
            |a, b| g.mul(a, b),
        )
        .expect("a group is a groupoid")
    }

    /// Only identity arrows, labelled `1_o`.
    pub fn discrete(objects: Vec<String>) -> Self {
        let n = objects.len() as u32;
        let labels = objects.iter().map(|o| format!("1_{o}")).collect();
        Self::new(objects, (0..n).map(|o| Arrow { source: o, target: o }).collect(), labels, (0..n).collect(), |g, _| g)
            .expect("a set is a groupoid")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_label(&self, o: u32) -> &str {
        &self.objects[o as usize]
    }

    pub fn arrow_label(&self, f: u32) -> &str {
        &self.labels[f as usize]
    }

    pub fn arrow(&self, f: u32) -> Arrow {
        self.arrows[f as usize]
    }

    pub fn identity(&self, o: u32) -> u32 {
        self.identities[o as usize]
    }

    pub fn inverse(&self, f: u32) -> u32 {
        self.inverses[f as usize]
    }

    /// `g ∘ f`, defined when `source(g) = target(f)`.
    pub fn compose(&self, g: u32, f: u32) -> Option<u32> {
        self.compose.get(&(g, f)).copied()
    }

    pub(crate) fn must_compose(&self, g: u32, f: u32) -> u32 {
        self.compose(g, f).expect("composable by construction")
    }

    /// Strings `a_0 <-f_1- a_1 <- ... <-f_n- a_n` in lexicographic order of
    /// arrow ids; for `n = 0` each string is a single object id.
    pub(crate) fn strings(&self, n: usize) -> Vec<Vec<u32>> {
        if n == 0 {
            return (0..self.objects.len() as u32).map(|o| vec![o]).collect();
        }
        let mut out: Vec<Vec<u32>> = (0..self.arrows.len() as u32).map(|f| vec![f]).collect();
        for _ in 1..n {
            let mut next = Vec::new();
            for s in &out {
                let last = self.arrows[*s.last().expect("nonempty") as usize];
                for f in 0..self.arrows.len() as u32 {
                    if self.arrows[f as usize].target == last.source {
                        let mut t = s.clone();
                        t.push(f);
                        next.push(t);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Nerve face `d_i` of an `n`-string: outer faces drop an arrow, inner
    /// faces compose `f_i ∘ f_{i+1}`, and a single arrow has faces
    /// `d_0 = source`, `d_1 = target`.
    pub(crate) fn string_face(&self, s: &[u32], n: usize, i: usize) -> Vec<u32> {
        if n == 1 {
            let a = self.arrows[s[0] as usize];
            return vec![if i == 0 { a.source } else { a.target }];
        }
        let mut t = s.to_vec();
        if i == 0 {
            t.remove(0);
        } else if i == n {
            t.pop();
        } else {
            let c = self.must_compose(s[i - 1], s[i]);
            t.splice(i - 1..=i, [c]);
        }
        t
    }

    /// Nerve degeneracy `s_i`: an identity inserted at the vertex `a_i`.
    pub(crate) fn string_degeneracy(&self, s: &[u32], n: usize, i: usize) -> Vec<u32> {
        if n == 0 {
            return vec![self.identity(s[0])];
        }
        let vertex = if i < n { self.arrows[s[i] as usize].target } else { self.arrows[s[n - 1] as usize].source };
        let mut t = s.to_vec();
        t.insert(i, self.identity(vertex));
        t
    }

    pub(crate) fn string_label(&self, s: &[u32], n: usize) -> String {
        if n == 0 {
            return self.objects[s[0] as usize].clone();
        }
        format!("[{}]", s.iter().map(|&f| self.arrow_label(f)).collect::<Vec<_>>().join(","))
    }
}

/// The nerve together with the string each simplex stands for.
#[derive(Debug, Clone)]
pub struct GroupoidNerve {
    groupoid: FiniteGroupoid,
    set: Arc<TruncatedSimplicialSet>,
    strings: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl GroupoidNerve {
    pub fn new(groupoid: FiniteGroupoid, bound: usize) -> Self {
        let strings: Vec<Vec<Vec<u32>>> = (0..=bound).map(|n| groupoid.strings(n)).collect();
        let index: Vec<HashMap<Vec<u32>, u32>> = strings
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect())
            .collect();
        let counts = strings.iter().map(|l| l.len() as u32).collect();
        let g = &groupoid;
        let set = TruncatedSimplicialSet::from_fn(
            bound,
            counts,
            |n, i, x| index[n - 1][&g.string_face(&strings[n][x as usize], n, i)],
            |n, i, x| index[n + 1][&g.string_degeneracy(&strings[n][x as usize], n, i)],
            Some(&|n, x| g.string_label(&strings[n][x as usize], n)),
        )
        .expect("nerve tables are well formed");
        Self { set: Arc::new(set), groupoid, strings, index }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn set(&self) -> &Arc<TruncatedSimplicialSet> {
        &self.set
    }

    pub fn string(&self, n: usize, id: u32) -> &[u32] {
        &self.strings[n][id as usize]
    }

    pub fn id_of(&self, n: usize, string: &[u32]) -> Option<u32> {
        self.index.get(n)?.get(string).copied()
    }
}

pub fn nerve(c: &FiniteGroupoid, bound: usize) -> TruncatedSimplicialSet {
    GroupoidNerve::new(c.clone(), bound).set.as_ref().clone()
}

/// Fills full horns of `nerve(C) -> *` by solving for the arrows, with no
/// search: every edge `v -> u` of the wanted simplex visible in a given face
/// is read off, then each `f_j` is recovered through a spanning tree rooted
/// at vertex 0 using composites and inverses.
#[derive(Debug, Clone)]
pub struct GroupoidHornFiller {
    nerve: Arc<GroupoidNerve>,
}

impl GroupoidHornFiller {
    pub fn new(nerve: Arc<GroupoidNerve>) -> Self {
        Self { nerve }
    }

    fn solve(&self, fam: &CompatibleFamily, k: usize) -> Result<Vec<u32>> {
        let c = &self.nerve.groupoid;
        let n = fam.n;
        if n == 1 {
            // the one given face is a vertex; its identity has it as both ends
            let (_, &v) = fam.faces.iter().next().expect("one face");
            return Ok(vec![c.identity(self.nerve.string(0, v)[0])]);
        }
        // edges[(u, v)] for u < v: the arrow a_v -> a_u
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for (&i, &xi) in &fam.faces {
            let s = self.nerve.string(n - 1, xi);
            let vertex = |p: usize| if p < i { p } else { p + 1 };
            for u in 0..n {
                let mut acc: Option<u32> = None;
                for v in u + 1..n {
                    let f = s[v - 1];
                    acc = Some(match acc {
                        None => f,
                        Some(a) => c.compose(a, f).ok_or_else(|| rejected("face is not a composable string"))?,
                    });
                    let e = acc.expect("set above");
                    if let Some(&old) = edges.get(&(vertex(u), vertex(v))) {
                        if old != e {
                            return Err(rejected("faces disagree on a shared edge"));
                        }
                    }
                    edges.insert((vertex(u), vertex(v)), e);
                }
            }
        }
        // to_root[v]: a_v -> a_0
        let mut to_root: Vec<Option<u32>> = vec![None; n + 1];
        let mut done = BTreeSet::from([0usize]);
        // vertex 0 must be the target of some known edge from it
        let root_obj = edges
            .iter()
            .find(|(&(u, _), _)| u == 0)
            .map(|(_, &e)| c.arrow(e).target)
            .ok_or_else(|| rejected("vertex 0 is isolated"))?;
        to_root[0] = Some(c.identity(root_obj));
        while done.len() < n + 1 {
            let mut progressed = false;
            for (&(u, v), &e) in &edges {
                match (to_root[u], to_root[v]) {
                    (Some(ru), None) => {
                        to_root[v] = Some(c.must_compose(ru, e));
                        done.insert(v);
                        progressed = true;
                    }
                    (None, Some(rv)) => {
                        to_root[u] = Some(c.must_compose(rv, c.inverse(e)));
                        done.insert(u);
                        progressed = true;
                    }
                    _ => {}
                }
            }
            if !progressed {
                return Err(Error::Invariant(format!("horn edges do not connect all vertices (missing face {k})")));
            }
        }
        let r: Vec<u32> = to_root.into_iter().map(|x| x.expect("all reached")).collect();
        Ok((1..=n).map(|j| c.must_compose(c.inverse(r[j - 1]), r[j])).collect())
    }
}

impl HornFiller for GroupoidHornFiller {
    fn fill(&self, f: &SimplicialMap, family: &CompatibleFamily) -> Result<FillCertificate> {
        if f.domain().as_ref() != self.nerve.set.as_ref() || f.codomain().counts().iter().any(|&c| c != 1) {
            return Err(rejected("groupoid filler applies to nerve(C) -> point"));
        }
        let Some(k) = family.missing_index() else {
            return Err(rejected("groupoid filler needs a full horn"));
        };
        if !crate::kan::is_compatible(f, family)? {
            return Err(rejected(format!("family is not compatible: {family:?}")));
        }
        let string = self.solve(family, k)?;
        let id = self
            .nerve
            .id_of(family.n, &string)
            .ok_or_else(|| Error::Invariant(format!("solved string {string:?} is not composable")))?;
        FillCertificate::filled(f, family.clone(), id, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kan::{brute_force_fill, check_kan_fibration, enumerate_families};
    use crate::simplicial::{pi0, validate_simplicial_identities};
    use std::ops::ControlFlow;

    #[test]
    fn nerve_counts_and_faces() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let n = GroupoidNerve::new(FiniteGroupoid::from_group(&z2), 3);
        assert_eq!(n.set().counts(), &[1, 2, 4, 8]);
        let gg = n.id_of(2, &[1, 1]).unwrap();
        let d1 = n.set().face(crate::Simplex::new(2, gg), 1).unwrap();
        assert_eq!(n.set().label(d1), "[e]");
        assert!(validate_simplicial_identities(n.set()).is_lawful());
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let ns3 = GroupoidNerve::new(FiniteGroupoid::from_group(&s3), 3);
        assert_eq!(ns3.set().counts(), &[1, 6, 36, 216]);
        assert!(validate_simplicial_identities(ns3.set()).is_lawful());
    }

    #[test]
    fn trivial_and_discrete() {
        let triv = FiniteGroup::cyclic(1).unwrap();
        let mut t = nerve(&FiniteGroupoid::from_group(&triv), 3).tables();
        t.labels = None;
        let mut pt = TruncatedSimplicialSet::point(3).tables();
        pt.labels = None;
        assert_eq!(t, pt);
        let d = nerve(&FiniteGroupoid::discrete(vec!["u".into(), "v".into()]), 2);
        assert_eq!(d.counts(), &[2, 2, 2]);
        assert_eq!(pi0(&d).unwrap().len(), 2);
    }

    #[test]
    fn rejects_non_groupoids() {
        let r = FiniteGroupoid::new(vec!["*".into()], vec![Arrow { source: 0, target: 0 }; 2], vec!["a".into(), "b".into()], vec![0], |_, _| 0);
        assert!(r.is_err());
    }

    #[test]
    fn nerve_is_kan_and_algebraic_filler_matches_search() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let nv = Arc::new(GroupoidNerve::new(FiniteGroupoid::from_group(&s3), 3));
        let f = SimplicialMap::to_point(nv.set().clone());
        assert!(check_kan_fibration(&f, 3).unwrap().passed);
        let filler = GroupoidHornFiller::new(nv.clone());
        for n in 1..=3 {
            for k in 0..=n {
                let idx: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
                enumerate_families(&f, n, &idx, |fam| {
                    let alg = filler.fill(&f, fam).unwrap();
                    let bf = brute_force_fill(&f, fam).unwrap();
                    assert_eq!(alg.is_filled(), bf.is_filled());
                    assert!(alg.verify(&f).unwrap());
                    ControlFlow::Continue(())
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn multi_object_groupoid_filler() {
        // the pair groupoid on two objects: exactly one arrow between any two
        let arrows = vec![
            Arrow { source: 0, target: 0 },
            Arrow { source: 1, target: 0 },
            Arrow { source: 0, target: 1 },
            Arrow { source: 1, target: 1 },
        ];
        let labels = ["00", "10", "01", "11"].map(String::from).to_vec();
        let c = FiniteGroupoid::new(vec!["a".into(), "b".into()], arrows.clone(), labels, vec![0, 3], |g, f| {
            let (s, t) = (arrows[f as usize].source, arrows[g as usize].target);
            arrows.iter().position(|a| a.source == s && a.target == t).unwrap() as u32
        })
        .unwrap();
        let nv = Arc::new(GroupoidNerve::new(c, 3));
        let f = SimplicialMap::to_point(nv.set().clone());
        let filler = GroupoidHornFiller::new(nv);
        for n in 1..=3 {
            for k in 0..=n {
                let idx: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
                enumerate_families(&f, n, &idx, |fam| {
                    assert!(filler.fill(&f, fam).unwrap().is_filled());
                    ControlFlow::Continue(())
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn filler_rejects_partial_horns() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let nv = Arc::new(GroupoidNerve::new(FiniteGroupoid::from_group(&z2), 2));
        let f = SimplicialMap::to_point(nv.set().clone());
        let fam = CompatibleFamily::new(2, [(0, 1)], 0);
        assert!(GroupoidHornFiller::new(nv).fill(&f, &fam).is_err());
    }
}
