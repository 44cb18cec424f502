//! Double groupoids and their double nerves.
//!
//! Horizontal arrows point left and vertical arrows point up. A square
//! `(top, right, bottom, left)` runs from its bottom-right corner to its
//! top-left one, and a `(p, q)`-simplex of the double nerve is a matrix of
//! `p` columns and `q` rows, stored row-major from the top-left cell.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::groupoid::FiniteGroupoid;
use super::FiniteGroup;
use crate::bisimplicial::TruncatedBisimplicialSet;
use crate::error::{rejected, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
    pub left: u32,
}

/// Composites of composable square pairs.
type CompositionTable = BTreeMap<(u32, u32), u32>;
/// The two identity squares on the sides a composite is taken along.
type Ends<'a> = dyn Fn(u32) -> (u32, u32) + 'a;

#[derive(Debug, Clone)]
pub struct DoubleGroupoid {
    horizontal: FiniteGroupoid,
    vertical: FiniteGroupoid,
    squares: Vec<Square>,
    labels: Vec<String>,
    hcomp: CompositionTable,
    vcomp: CompositionTable,
    hid: Vec<u32>,
    vid: Vec<u32>,
}

impl DoubleGroupoid {
    /// Tabulates both compositions and identity squares from closures that
    /// return squares, then checks every axiom: boundaries of composites and
    /// identities, associativity, unit and inverse laws in each direction,
    /// the interchange law, and agreement of the two identity squares on
    /// identity arrows.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        horizontal: FiniteGroupoid,
        vertical: FiniteGroupoid,
        squares: Vec<Square>,
        labels: Vec<String>,
        hcomp: impl Fn(&Square, &Square) -> Square,
        vcomp: impl Fn(&Square, &Square) -> Square,
        hid: impl Fn(u32) -> Square,
        vid: impl Fn(u32) -> Square,
    ) -> Result<Self> {
        if horizontal.object_count() != vertical.object_count() {
            return Err(rejected("horizontal and vertical groupoids have different objects"));
        }
        if labels.len() != squares.len() {
            return Err(rejected("one label per square"));
        }
        let (h, v) = (&horizontal, &vertical);
        for (s, sq) in squares.iter().enumerate() {
            let in_range = (sq.top as usize) < h.arrow_count()
                && (sq.bottom as usize) < h.arrow_count()
                && (sq.left as usize) < v.arrow_count()
                && (sq.right as usize) < v.arrow_count();
            if !in_range {
                return Err(rejected(format!("square {s} has an edge out of range")));
            }
            let (t, r, b, l) = (h.arrow(sq.top), v.arrow(sq.right), h.arrow(sq.bottom), v.arrow(sq.left));
            if t.source != r.target || t.target != l.target || b.source != r.source || b.target != l.source {
                return Err(rejected(format!("square {s} has mismatched corners")));
            }
        }
        let index: HashMap<Square, u32> = squares.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        if index.len() != squares.len() {
            return Err(rejected("duplicate squares"));
        }
        let find = |s: Square, what: &str| index.get(&s).copied().ok_or_else(|| rejected(format!("{what} {s:?} is not a square")));
        let n = squares.len() as u32;
        let mut hc = BTreeMap::new();
        let mut vc = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let (sa, sb) = (&squares[a as usize], &squares[b as usize]);
                if sa.right == sb.left {
                    let c = hcomp(sa, sb);
                    let want = (h.compose(sa.top, sb.top), sb.right, h.compose(sa.bottom, sb.bottom), sa.left);
                    if (Some(c.top), c.right, Some(c.bottom), c.left) != want {
                        return Err(rejected(format!("horizontal composite of {a} and {b} has the wrong boundary")));
                    }
                    hc.insert((a, b), find(c, "horizontal composite")?);
                }
                if sa.bottom == sb.top {
                    let c = vcomp(sa, sb);
                    let want = (sa.top, v.compose(sa.right, sb.right), sb.bottom, v.compose(sa.left, sb.left));
                    if (c.top, Some(c.right), c.bottom, Some(c.left)) != want {
                        return Err(rejected(format!("vertical composite of {a} and {b} has the wrong boundary")));
                    }
                    vc.insert((a, b), find(c, "vertical composite")?);
                }
            }
        }
        let hid_t = (0..v.arrow_count() as u32)
            .map(|b| {
                let s = hid(b);
                let o = v.arrow(b);
                let ok = s.left == b && s.right == b && s.top == h.identity(o.target) && s.bottom == h.identity(o.source);
                if !ok {
                    return Err(rejected(format!("horizontal identity of vertical arrow {b} has the wrong boundary")));
                }
                find(s, "identity")
            })
            .collect::<Result<Vec<_>>>()?;
        let vid_t = (0..h.arrow_count() as u32)
            .map(|a| {
                let s = vid(a);
                let o = h.arrow(a);
                let ok = s.top == a && s.bottom == a && s.right == v.identity(o.source) && s.left == v.identity(o.target);
                if !ok {
                    return Err(rejected(format!("vertical identity of horizontal arrow {a} has the wrong boundary")));
                }
                find(s, "identity")
            })
            .collect::<Result<Vec<_>>>()?;
        let dg = Self { horizontal, vertical, squares, labels, hcomp: hc, vcomp: vc, hid: hid_t, vid: vid_t };
        dg.check_axioms()?;
        Ok(dg)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.squares.len() as u32;
        let sq = |s: u32| self.squares[s as usize];
        let hunits = |s: u32| (self.hid[sq(s).left as usize], self.hid[sq(s).right as usize]);
        let vunits = |s: u32| (self.vid[sq(s).top as usize], self.vid[sq(s).bottom as usize]);
        let directions: [(&str, &CompositionTable, &Ends<'_>); 2] =
            [("horizontal", &self.hcomp, &hunits), ("vertical", &self.vcomp, &vunits)];
        for (dir, comp, ident) in directions {
            for (&(a, b), &ab) in comp {
                for c in 0..n {
                    if let (Some(&bc), Some(&abc)) = (comp.get(&(b, c)), comp.get(&(ab, c))) {
                        if comp.get(&(a, bc)) != Some(&abc) {
                            return Err(rejected(format!("{dir} composition is not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
            for s in 0..n {
                let (before, after) = ident(s);
                if comp.get(&(before, s)) != Some(&s) || comp.get(&(s, after)) != Some(&s) {
                    return Err(rejected(format!("{dir} unit law fails at square {s}")));
                }
                let has_inverse = (0..n).any(|t| comp.get(&(s, t)) == Some(&before) && comp.get(&(t, s)) == Some(&after));
                if !has_inverse {
                    return Err(rejected(format!("square {s} has no {dir} inverse")));
                }
            }
        }
        // (σ ·h τ) ·v (γ ·h δ) = (σ ·v γ) ·h (τ ·v δ)
        for (&(s, t), &st) in &self.hcomp {
            for (&(g, d), &gd) in &self.hcomp {
                let (Some(&sg), Some(&td)) = (self.vcomp.get(&(s, g)), self.vcomp.get(&(t, d))) else {
                    continue;
                };
                let lhs = self.vcomp.get(&(st, gd));
                let rhs = self.hcomp.get(&(sg, td));
                if lhs.is_none() || lhs != rhs {
                    return Err(rejected(format!("interchange fails at ({s}, {t}, {g}, {d})")));
                }
            }
        }
        for o in 0..self.horizontal.object_count() as u32 {
            if self.hid[self.vertical.identity(o) as usize] != self.vid[self.horizontal.identity(o) as usize] {
                return Err(rejected(format!("identity squares differ at object {o}")));
            }
        }
        Ok(())
    }

    pub fn horizontal(&self) -> &FiniteGroupoid {
        &self.horizontal
    }

    pub fn vertical(&self) -> &FiniteGroupoid {
        &self.vertical
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn square_label(&self, s: u32) -> &str {
        &self.labels[s as usize]
    }

    pub fn square_id(&self, s: &Square) -> Option<u32> {
        self.squares.iter().position(|x| x == s).map(|i| i as u32)
    }

    /// `σ ·_h τ`, defined when `σ.right = τ.left`.
    pub fn hcompose(&self, s: u32, t: u32) -> Option<u32> {
        self.hcomp.get(&(s, t)).copied()
    }

    /// `σ ·_v τ`, defined when `σ.bottom = τ.top`.
    pub fn vcompose(&self, s: u32, t: u32) -> Option<u32> {
        self.vcomp.get(&(s, t)).copied()
    }

    /// `id^h(b)`: both vertical sides `b`.
    pub fn horizontal_identity(&self, b: u32) -> u32 {
        self.hid[b as usize]
    }

    /// `id^v(a)`: both horizontal sides `a`.
    pub fn vertical_identity(&self, a: u32) -> u32 {
        self.vid[a as usize]
    }
}

/// One object, horizontal arrows `A`, vertical arrows `B`, squares
/// `(a, b, a', b')` with `ab = b'a'`, ordered lexicographically by the
/// positions of `a, b, a', b'` in the sorted subgroups.
pub fn group_pair_double_groupoid(g: &FiniteGroup, a: &[u32], b: &[u32]) -> Result<DoubleGroupoid> {
    let ga = g.subgroup(a)?;
    let gb = g.subgroup(b)?;
    // subgroup() sorts; recover the ambient element of each position
    let amb = |sub: &FiniteGroup| -> Vec<u32> { sub.labels().iter().map(|l| g.element(l).expect("same labels")).collect() };
    let (ea, eb) = (amb(&ga), amb(&gb));
    let mut squares = Vec::new();
    let mut labels = Vec::new();
    for (ia, &xa) in ea.iter().enumerate() {
        for (ib, &xb) in eb.iter().enumerate() {
            for (ia2, &xa2) in ea.iter().enumerate() {
                for (ib2, &xb2) in eb.iter().enumerate() {
                    if g.mul(xa, xb) == g.mul(xb2, xa2) {
                        squares.push(Square { top: ia as u32, right: ib as u32, bottom: ia2 as u32, left: ib2 as u32 });
                        labels.push(format!("({},{},{},{})", g.label(xa), g.label(xb), g.label(xa2), g.label(xb2)));
                    }
                }
            }
        }
    }
    let (h, v) = (FiniteGroupoid::from_group(&ga), FiniteGroupoid::from_group(&gb));
    let (eh, ev) = (ga.identity(), gb.identity());
    DoubleGroupoid::new(
        h,
        v,
        squares,
        labels,
        |s, t| Square { top: ga.mul(s.top, t.top), right: t.right, bottom: ga.mul(s.bottom, t.bottom), left: s.left },
        |s, t| Square { top: s.top, right: gb.mul(s.right, t.right), bottom: t.bottom, left: gb.mul(s.left, t.left) },
        |b| Square { top: eh, right: b, bottom: eh, left: b },
        |a| Square { top: a, right: ev, bottom: a, left: ev },
    )
}

/// The double nerve with the matrix behind every bisimplex.
///
/// Cells by bidegree: `(0,0)` one object, `(p,0)` a string of horizontal
/// arrows, `(0,q)` a string of vertical arrows (topmost first), otherwise
/// `p * q` squares row-major.
#[derive(Debug, Clone)]
pub struct DoubleNerve {
    set: TruncatedBisimplicialSet,
    cells: Vec<Vec<Vec<Vec<u32>>>>,
}

impl DoubleNerve {
    pub fn new(d: &DoubleGroupoid, bounds: (usize, usize)) -> Self {
        let (pb, qb) = bounds;
        let cells: Vec<Vec<Vec<Vec<u32>>>> = (0..=pb).map(|p| (0..=qb).map(|q| enumerate(d, p, q)).collect()).collect();
        let index: Vec<Vec<HashMap<Vec<u32>, u32>>> = cells
            .iter()
            .map(|col| col.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect()).collect())
            .collect();
        let counts = cells.iter().map(|col| col.iter().map(|l| l.len() as u32).collect()).collect();
        let at = |p: usize, q: usize, x: u32| &cells[p][q][x as usize];
        let set = TruncatedBisimplicialSet::from_fn(
            bounds,
            counts,
            |p, q, i, x| index[p - 1][q][&hface(d, at(p, q, x), p, q, i)],
            |p, q, i, x| index[p][q - 1][&vface(d, at(p, q, x), p, q, i)],
            |p, q, i, x| index[p + 1][q][&hdeg(d, at(p, q, x), p, q, i)],
            |p, q, i, x| index[p][q + 1][&vdeg(d, at(p, q, x), p, q, i)],
            Some(&|p, q, x| label(d, at(p, q, x), p, q)),
        )
        .expect("double nerve tables are well formed");
        Self { set, cells }
    }

    pub fn set(&self) -> &TruncatedBisimplicialSet {
        &self.set
    }

    pub fn into_set(self) -> TruncatedBisimplicialSet {
        self.set
    }

    pub fn cells(&self, p: usize, q: usize, id: u32) -> &[u32] {
        &self.cells[p][q][id as usize]
    }

    pub fn id_of(&self, p: usize, q: usize, cells: &[u32]) -> Option<u32> {
        self.cells.get(p)?.get(q)?.iter().position(|c| c == cells).map(|i| i as u32)
    }
}

pub fn double_nerve(d: &DoubleGroupoid, bounds: (usize, usize)) -> TruncatedBisimplicialSet {
    DoubleNerve::new(d, bounds).into_set()
}

fn enumerate(d: &DoubleGroupoid, p: usize, q: usize) -> Vec<Vec<u32>> {
    match (p, q) {
        (0, 0) => d.horizontal.strings(0),
        (_, 0) => d.horizontal.strings(p),
        (0, _) => d.vertical.strings(q),
        _ => {
            let mut out = Vec::new();
            let mut cur = Vec::with_capacity(p * q);
            fill_matrix(d, p, q, &mut cur, &mut out);
            out
        }
    }
}

fn fill_matrix(d: &DoubleGroupoid, p: usize, q: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let k = cur.len();
    if k == p * q {
        out.push(cur.clone());
        return;
    }
    let (i, j) = (k % p, k / p);
    for (s, sq) in d.squares.iter().enumerate() {
        if i > 0 && d.squares[cur[k - 1] as usize].right != sq.left {
            continue;
        }
        if j > 0 && d.squares[cur[k - p] as usize].bottom != sq.top {
            continue;
        }
        cur.push(s as u32);
        fill_matrix(d, p, q, cur, out);
        cur.pop();
    }
}

fn column(c: &[u32], p: usize, q: usize, i: usize) -> Vec<u32> {
    (0..q).map(|j| c[j * p + i]).collect()
}

fn hface(d: &DoubleGroupoid, c: &[u32], p: usize, q: usize, i: usize) -> Vec<u32> {
    if q == 0 {
        return d.horizontal.string_face(c, p, i);
    }
    let sq = |s: u32| d.squares[s as usize];
    if p == 1 {
        return c.iter().map(|&s| if i == 0 { sq(s).right } else { sq(s).left }).collect();
    }
    let mut out = Vec::with_capacity((p - 1) * q);
    for row in c.chunks(p) {
        for col in 0..p {
            if (i == 0 && col == 0) || (i == p && col == p - 1) || (i > 0 && i < p && col == i) {
                continue;
            }
            if i > 0 && i < p && col == i - 1 {
                out.push(d.hcompose(row[col], row[col + 1]).expect("adjacent cells compose"));
            } else {
                out.push(row[col]);
            }
        }
    }
    out
}

fn vface(d: &DoubleGroupoid, c: &[u32], p: usize, q: usize, j: usize) -> Vec<u32> {
    if p == 0 {
        return d.vertical.string_face(c, q, j);
    }
    let sq = |s: u32| d.squares[s as usize];
    if q == 1 {
        return c.iter().map(|&s| if j == 0 { sq(s).bottom } else { sq(s).top }).collect();
    }
    let rows: Vec<&[u32]> = c.chunks(p).collect();
    let mut out = Vec::with_capacity(p * (q - 1));
    for r in 0..q {
        if (j == 0 && r == 0) || (j == q && r == q - 1) || (j > 0 && j < q && r == j) {
            continue;
        }
        if j > 0 && j < q && r == j - 1 {
            out.extend((0..p).map(|col| d.vcompose(rows[r][col], rows[r + 1][col]).expect("stacked cells compose")));
        } else {
            out.extend_from_slice(rows[r]);
        }
    }
    out
}

fn hdeg(d: &DoubleGroupoid, c: &[u32], p: usize, q: usize, i: usize) -> Vec<u32> {
    if q == 0 {
        return d.horizontal.string_degeneracy(c, p, i);
    }
    let sq = |s: u32| d.squares[s as usize];
    // vertical line i, top to bottom
    let line: Vec<u32> = if p == 0 {
        c.to_vec()
    } else if i < p {
        column(c, p, q, i).into_iter().map(|s| sq(s).left).collect()
    } else {
        column(c, p, q, p - 1).into_iter().map(|s| sq(s).right).collect()
    };
    let mut out = Vec::with_capacity((p + 1) * q);
    for j in 0..q {
        let row = if p == 0 { &[][..] } else { &c[j * p..(j + 1) * p] };
        out.extend_from_slice(&row[..i]);
        out.push(d.horizontal_identity(line[j]));
        out.extend_from_slice(&row[i..]);
    }
    out
}

fn vdeg(d: &DoubleGroupoid, c: &[u32], p: usize, q: usize, j: usize) -> Vec<u32> {
    if p == 0 {
        return d.vertical.string_degeneracy(c, q, j);
    }
    let sq = |s: u32| d.squares[s as usize];
    // horizontal line j, left to right
    let line: Vec<u32> = if q == 0 {
        c.to_vec()
    } else if j < q {
        c[j * p..(j + 1) * p].iter().map(|&s| sq(s).top).collect()
    } else {
        c[(q - 1) * p..].iter().map(|&s| sq(s).bottom).collect()
    };
    if q == 0 {
        return line.iter().map(|&a| d.vertical_identity(a)).collect();
    }
    let mut out = Vec::with_capacity(p * (q + 1));
    out.extend_from_slice(&c[..j * p]);
    out.extend(line.iter().map(|&a| d.vertical_identity(a)));
    out.extend_from_slice(&c[j * p..]);
    out
}

fn label(d: &DoubleGroupoid, c: &[u32], p: usize, q: usize) -> String {
    match (p, q) {
        (_, 0) => d.horizontal.string_label(c, p),
        (0, _) => d.vertical.string_label(c, q),
        _ => {
            let rows: Vec<String> = c
                .chunks(p)
                .map(|r| format!("[{}]", r.iter().map(|&s| d.square_label(s)).collect::<Vec<_>>().join(",")))
                .collect();
            format!("[{}]", rows.join(";"))
        }
    }
}
