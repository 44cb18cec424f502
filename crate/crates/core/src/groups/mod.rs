//! Finite groups, groupoids and double groupoids, and the simplicial and
//! bisimplicial sets built from them.

mod double;
mod eg;
mod groupoid;
pub mod presets;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{rejected, Result};

pub use double::{double_nerve, group_pair_double_groupoid, DoubleGroupoid, DoubleNerve, Square};
pub use eg::{eg_construction, eg_tensor};
pub use groupoid::{nerve, Arrow, FiniteGroupoid, GroupoidHornFiller, GroupoidNerve};

/// A failed group axiom, with the offending elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum GroupLawViolation {
    Shape { detail: String },
    NoIdentity,
    NoInverse { element: u32 },
    NotAssociative { a: u32, b: u32, c: u32 },
}

impl fmt::Display for GroupLawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { detail } => write!(f, "malformed table: {detail}"),
            Self::NoIdentity => write!(f, "no two-sided identity"),
            Self::NoInverse { element } => write!(f, "element {element} has no inverse"),
            Self::NotAssociative { a, b, c } => write!(f, "(ab)c != a(bc) for (a, b, c) = ({a}, {b}, {c})"),
        }
    }
}

/// The first failed axiom of a multiplication table, scanning in index order.
pub fn group_law_violation(labels: &[String], table: &[Vec<u32>]) -> Option<GroupLawViolation> {
    let n = labels.len();
    if n == 0 {
        return Some(GroupLawViolation::Shape { detail: "empty group".into() });
    }
    if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v as usize >= n)) {
        return Some(GroupLawViolation::Shape { detail: format!("table must be {n} x {n} with entries < {n}") });
    }
    if labels.iter().collect::<BTreeSet<_>>().len() != n {
        return Some(GroupLawViolation::Shape { detail: "duplicate labels".into() });
    }
    let m = |a: u32, b: u32| table[a as usize][b as usize];
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            for c in 0..n as u32 {
                if m(m(a, b), c) != m(a, m(b, c)) {
                    return Some(GroupLawViolation::NotAssociative { a, b, c });
                }
            }
        }
    }
    let Some(e) = (0..n as u32).find(|&e| (0..n as u32).all(|x| m(e, x) == x && m(x, e) == x)) else {
        return Some(GroupLawViolation::NoIdentity);
    };
    for x in 0..n as u32 {
        if !(0..n as u32).any(|y| m(x, y) == e && m(y, x) == e) {
            return Some(GroupLawViolation::NoInverse { element: x });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FiniteGroup {
    /// `table[a][b] = ab`; every group law is checked.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(v) = group_law_violation(&labels, &table) {
            let named = match &v {
                GroupLawViolation::NotAssociative { a, b, c } => {
                    format!("{v} [{}, {}, {}]", labels[*a as usize], labels[*b as usize], labels[*c as usize])
                }
                GroupLawViolation::NoInverse { element } => format!("{v} [{}]", labels[*element as usize]),
                _ => v.to_string(),
            };
            return Err(rejected(named));
        }
        let n = labels.len() as u32;
        let identity = (0..n).find(|&e| (0..n).all(|x| table[e as usize][x as usize] == x)).expect("checked");
        let inverses = (0..n).map(|x| (0..n).find(|&y| table[x as usize][y as usize] == identity).expect("checked")).collect();
        Ok(Self { labels, table, identity, inverses })
    }

    /// `Z/n` with elements `e, g, g^2, ...`.
    pub fn cyclic(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(rejected("cyclic group of order 0"));
        }
        let labels = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{k}"),
            })
            .collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(labels, table)
    }

    /// The permutation group generated by the given image arrays on
    /// `{0, .., degree-1}`, elements sorted by image array and labelled in
    /// 1-based cycle notation. Products act right to left.
    pub fn from_permutation_generators(degree: usize, generators: &[Vec<usize>]) -> Result<Self> {
        if degree == 0 || degree > 6 {
            return Err(rejected(format!("permutation degree must be 1..=6, got {degree}")));
        }
        for g in generators {
            let mut seen = g.clone();
            seen.sort_unstable();
            if seen != (0..degree).collect::<Vec<_>>() {
                return Err(rejected(format!("{g:?} is not a permutation of degree {degree}")));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = compose_permutations(g, &p);
                if found.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        let elems: Vec<Vec<usize>> = found.into_iter().collect();
        let index: HashMap<&[usize], u32> = elems.iter().enumerate().map(|(i, p)| (p.as_slice(), i as u32)).collect();
        let table = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[compose_permutations(a, b).as_slice()]).collect())
            .collect();
        Self::from_table(elems.iter().map(|p| cycle_notation(p)).collect(), table)
    }

    /// `S_n` for `n <= 4`, elements in lexicographic order of image arrays.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(rejected(format!("symmetric group preset needs 1 <= n <= 4, got {n}")));
        }
        let mut gens = Vec::new();
        if n >= 2 {
            let mut swap: Vec<usize> = (0..n).collect();
            swap.swap(0, 1);
            gens.push(swap);
            gens.push((1..n).chain([0]).collect());
        }
        Self::from_permutation_generators(n, &gens)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn label(&self, a: u32) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }

    pub fn element(&self, label: &str) -> Result<u32> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
            .ok_or_else(|| rejected(format!("no element labelled {label:?}")))
    }

    pub fn elements(&self, labels: &[impl AsRef<str>]) -> Result<Vec<u32>> {
        labels.iter().map(|l| self.element(l.as_ref())).collect()
    }

    pub fn is_subgroup(&self, elems: &[u32]) -> bool {
        let set: BTreeSet<u32> = elems.iter().copied().collect();
        !set.is_empty()
            && set.iter().all(|&x| (x as usize) < self.order())
            && set.iter().all(|&a| set.contains(&self.inv(a)) && set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// The subgroup on `elems` as a group in its own right, elements in
    /// ascending order of their index here.
    pub fn subgroup(&self, elems: &[u32]) -> Result<Self> {
        if !self.is_subgroup(elems) {
            return Err(rejected(format!("{:?} is not a subgroup", self.names(elems))));
        }
        let set: Vec<u32> = elems.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos: HashMap<u32, u32> = set.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let table = set.iter().map(|&a| set.iter().map(|&b| pos[&self.mul(a, b)]).collect()).collect();
        Self::from_table(set.iter().map(|&x| self.label(x).to_string()).collect(), table)
    }

    pub fn product_set(&self, a: &[u32], b: &[u32]) -> BTreeSet<u32> {
        a.iter().flat_map(|&x| b.iter().map(move |&y| self.mul(x, y))).collect()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order() as u32;
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn names(&self, elems: &[u32]) -> Vec<String> {
        elems.iter().map(|&x| self.labels.get(x as usize).cloned().unwrap_or_else(|| format!("#{x}"))).collect()
    }
}

/// True iff `AB != BA`; both must be subgroups.
pub fn subgroup_products_distinct(g: &FiniteGroup, a: &[u32], b: &[u32]) -> Result<bool> {
    for (name, s) in [("A", a), ("B", b)] {
        if !g.is_subgroup(s) {
            return Err(rejected(format!("{name} = {:?} is not a subgroup", g.names(s))));
        }
    }
    Ok(g.product_set(a, b) != g.product_set(b, a))
}

/// `(g h)(x) = g(h(x))`.
pub fn compose_permutations(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

/// 1-based cycle notation, each cycle starting at its least point; `id`
/// for the identity.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = perm[x];
        }
        out.push_str(&format!("({})", cycle.join(",")));
    }
    if out.is_empty() {
        "id".into()
    } else {
        out
    }
}

/// Parses `id`, `()`, or a product of cycles such as `(1,2)(3,4)`, read
/// right to left.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Vec<usize>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut perm: Vec<usize> = (0..degree).collect();
    if s == "id" || s == "e" || s.is_empty() {
        return Ok(perm);
    }
    let bad = || rejected(format!("cannot parse permutation {text:?}"));
    if !s.starts_with('(') || !s.ends_with(')') {
        return Err(bad());
    }
    let cycles: Vec<&str> = s[1..s.len() - 1].split(")(").collect();
    for c in &cycles {
        if c.is_empty() {
            continue;
        }
        let pts = c
            .split(',')
            .map(|t| t.parse::<usize>().ok().filter(|&v| v >= 1 && v <= degree).map(|v| v - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        if pts.iter().collect::<BTreeSet<_>>().len() != pts.len() {
            return Err(bad());
        }
        let mut cyc: Vec<usize> = (0..degree).collect();
        for (k, &p) in pts.iter().enumerate() {
            cyc[p] = pts[(k + 1) % pts.len()];
        }
        perm = compose_permutations(&perm, &cyc);
    }
    Ok(perm)
}
