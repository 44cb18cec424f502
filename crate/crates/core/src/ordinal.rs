//! The simplex category: weakly order-preserving maps `[m] -> [n]`, words in
//! the face/degeneracy generators, and their canonical normal form.
//!
//! Operator words are stored in *application order*: the first token acts
//! first on the simplex. A word acting on `n`-simplices and producing
//! `m`-simplices induces the ordinal map `[m] -> [n]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly order-preserving map `[source] -> [target]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrdinalMap {
    source: usize,
    target: usize,
    values: Vec<usize>,
}

impl OrdinalMap {
    pub fn new(source: usize, target: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != source + 1 {
            return Err(Error::Rejected(format!(
                "ordinal map out of [{source}] needs {} values, got {}",
                source + 1,
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v > target) {
            return Err(Error::Rejected(format!("value {v} outside [{target}]")));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Rejected(format!("{values:?} is not weakly increasing")));
        }
        Ok(Self { source, target, values })
    }

    pub fn identity(n: usize) -> Self {
        Self { source: n, target: n, values: (0..=n).collect() }
    }

    /// The coface `δ_i : [n-1] -> [n]`, skipping `i`.
    pub fn coface(n: usize, i: usize) -> Result<Self> {
        if n == 0 || i > n {
            return Err(Error::Rejected(format!("no coface δ_{i} into [{n}]")));
        }
        let values = (0..n).map(|k| if k < i { k } else { k + 1 }).collect();
        Ok(Self { source: n - 1, target: n, values })
    }

    /// The codegeneracy `σ_i : [n+1] -> [n]`, hitting `i` twice.
    pub fn codegeneracy(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::Rejected(format!("no codegeneracy σ_{i} onto [{n}]")));
        }
        let values = (0..=n + 1).map(|k| if k <= i { k } else { k - 1 }).collect();
        Ok(Self { source: n + 1, target: n, values })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, k: usize) -> usize {
        self.values[k]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.values.iter().enumerate().all(|(k, &v)| k == v)
    }

    /// Every ordinal map `[source] -> [target]`, in lexicographic order of values.
    pub fn all(source: usize, target: usize) -> Vec<OrdinalMap> {
        let mut out = Vec::new();
        let mut values = vec![0; source + 1];
        fn rec(pos: usize, lo: usize, target: usize, values: &mut Vec<usize>, out: &mut Vec<OrdinalMap>, source: usize) {
            if pos == values.len() {
                out.push(OrdinalMap { source, target, values: values.clone() });
                return;
            }
            for v in lo..=target {
                values[pos] = v;
                rec(pos + 1, v, target, values, out, source);
            }
        }
        rec(0, 0, target, &mut values, &mut out, source);
        out
    }
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose_ordinal(g: &OrdinalMap, f: &OrdinalMap) -> Result<OrdinalMap> {
    if f.target != g.source {
        return Err(Error::Composition {
            f_source: f.source,
            f_target: f.target,
            g_source: g.source,
            g_target: g.target,
        });
    }
    Ok(OrdinalMap {
        source: f.source,
        target: g.target,
        values: f.values.iter().map(|&k| g.values[k]).collect(),
    })
}

/// A single generator acting on simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Token {
    Face(usize),
    Degeneracy(usize),
}

impl Token {
    /// Dimension after acting on an `n`-simplex, or `None` if the index is invalid there.
    pub fn step(self, n: usize) -> Option<usize> {
        match self {
            Token::Face(i) if n >= 1 && i <= n => Some(n - 1),
            Token::Degeneracy(i) if i <= n => Some(n + 1),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Face(i) => write!(f, "d{i}"),
            Token::Degeneracy(i) => write!(f, "s{i}"),
        }
    }
}

/// A dimension-checked word of generators, in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplicialOperator {
    source_dim: usize,
    target_dim: usize,
    tokens: Vec<Token>,
}

impl SimplicialOperator {
    /// A word acting on `source_dim`-simplices.
    pub fn new(source_dim: usize, tokens: Vec<Token>) -> Result<Self> {
        let mut dim = source_dim;
        for (pos, &t) in tokens.iter().enumerate() {
            dim = t.step(dim).ok_or_else(|| {
                Error::Rejected(format!("{t} is not defined on {dim}-simplices (position {pos})"))
            })?;
        }
        Ok(Self { source_dim, target_dim: dim, tokens })
    }

    pub fn identity(dim: usize) -> Self {
        Self { source_dim: dim, target_dim: dim, tokens: Vec::new() }
    }

    /// `t` repeated `times` times; a zero power is the empty word.
    pub fn power(source_dim: usize, t: Token, times: usize) -> Result<Self> {
        Self::new(source_dim, vec![t; times])
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    /// Highest dimension reached while applying the word, endpoints included.
    pub fn peak_dim(&self) -> usize {
        self.dims().max().unwrap_or(self.source_dim)
    }

    /// Dimension before each token, followed by the final dimension.
    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        let mut dim = self.source_dim;
        std::iter::once(dim).chain(self.tokens.iter().map(move |t| {
            dim = t.step(dim).expect("validated on construction");
            dim
        }))
    }

    /// First `self`, then `next`.
    pub fn then(&self, next: &SimplicialOperator) -> Result<Self> {
        if self.target_dim != next.source_dim {
            return Err(Error::Rejected(format!(
                "operator ends in dimension {} but the next starts in {}",
                self.target_dim, next.source_dim
            )));
        }
        let mut tokens = self.tokens.clone();
        tokens.extend_from_slice(&next.tokens);
        Ok(Self { source_dim: self.source_dim, target_dim: next.target_dim, tokens })
    }

    /// The induced map `[target_dim] -> [source_dim]`.
    pub fn ordinal_map(&self) -> OrdinalMap {
        let mut acc = OrdinalMap::identity(self.source_dim);
        let mut dim = self.source_dim;
        for &t in &self.tokens {
            let gen = match t {
                Token::Face(i) => OrdinalMap::coface(dim, i),
                Token::Degeneracy(i) => OrdinalMap::codegeneracy(dim, i),
            }
            .expect("validated on construction");
            dim = gen.source;
            acc = compose_ordinal(&acc, &gen).expect("dimensions chain");
        }
        acc
    }

    /// Faces with strictly decreasing indices, then degeneracies with
    /// strictly increasing indices.
    pub fn is_canonical(&self) -> bool {
        let split = self.tokens.iter().position(|t| matches!(t, Token::Degeneracy(_))).unwrap_or(self.tokens.len());
        let (faces, degens) = self.tokens.split_at(split);
        let faces_ok = faces.iter().all(|t| matches!(t, Token::Face(_)))
            && faces.windows(2).all(|w| match (w[0], w[1]) {
                (Token::Face(a), Token::Face(b)) => a > b,
                _ => false,
            });
        let degens_ok = degens.iter().all(|t| matches!(t, Token::Degeneracy(_)))
            && degens.windows(2).all(|w| match (w[0], w[1]) {
                (Token::Degeneracy(a), Token::Degeneracy(b)) => a < b,
                _ => false,
            });
        faces_ok && degens_ok
    }
}

impl fmt::Display for SimplicialOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return write!(f, "id[{}]", self.source_dim);
        }
        let words: Vec<String> = self.tokens.iter().map(|t| t.to_string()).collect();
        write!(f, "{} on {}-simplices", words.join(" then "), self.source_dim)
    }
}

/// Epi-mono factorization of `α : [m] -> [n]` as an operator on `n`-simplices.
///
/// Faces delete the values missed by `α` (largest first); degeneracies
/// repeat each `j` with `α(j) = α(j+1)` (smallest first).
pub fn factorize(alpha: &OrdinalMap) -> SimplicialOperator {
    let mut tokens: Vec<Token> = (0..=alpha.target)
        .rev()
        .filter(|v| !alpha.values.contains(v))
        .map(Token::Face)
        .collect();
    tokens.extend(
        (0..alpha.source)
            .filter(|&j| alpha.values[j] == alpha.values[j + 1])
            .map(Token::Degeneracy),
    );
    SimplicialOperator::new(alpha.target, tokens).expect("normal form is dimension-valid")
}

/// The four iterated identities between faces and degeneracies.
///
/// | family | left side | right side | side condition |
/// |---|---|---|---|
/// | 1 | `d_i d_j^m` | `d_j^m d_{i+m}` | `i ≥ j` |
/// | 2 | `d_i^m` | `d_i^{m-1} d_j` | `i ≤ j < i+m` |
/// | 3 | `d_i s_j^m` | `s_j^m d_{i-m}` | `i > j+m` |
/// | 4 | `d_i s_j^m` | `s_j^{m-1}` | `j ≤ i ≤ j+m` |
///
/// Sides are written in composition order; both act on `n`-simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IteratedIdentity {
    FaceOfFacePower = 1,
    FacePowerShift = 2,
    FaceOfDegeneracyPowerFar = 3,
    FaceOfDegeneracyPowerNear = 4,
}

impl IteratedIdentity {
    pub const ALL: [IteratedIdentity; 4] = [
        IteratedIdentity::FaceOfFacePower,
        IteratedIdentity::FacePowerShift,
        IteratedIdentity::FaceOfDegeneracyPowerFar,
        IteratedIdentity::FaceOfDegeneracyPowerNear,
    ];

    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Self::FaceOfFacePower),
            2 => Ok(Self::FacePowerShift),
            3 => Ok(Self::FaceOfDegeneracyPowerFar),
            4 => Ok(Self::FaceOfDegeneracyPowerNear),
            _ => Err(Error::Rejected(format!("no identity family {k}"))),
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }

    /// Both sides as operators on `n`-simplices, after checking the side
    /// condition and dimension validity.
    pub fn sides(self, i: usize, j: usize, m: usize, n: usize) -> Result<(SimplicialOperator, SimplicialOperator)> {
        use Token::{Degeneracy as S, Face as D};
        let cond = match self {
            Self::FaceOfFacePower => i >= j,
            Self::FacePowerShift => m >= 1 && i <= j && j < i + m,
            Self::FaceOfDegeneracyPowerFar => i > j + m,
            Self::FaceOfDegeneracyPowerNear => m >= 1 && j <= i && i <= j + m,
        };
        if !cond {
            return Err(Error::Rejected(format!(
                "side condition of family {} fails for i={i}, j={j}, m={m}",
                self.number()
            )));
        }
        let (lhs, rhs) = match self {
            Self::FaceOfFacePower => {
                let mut l = vec![D(j); m];
                l.push(D(i));
                let mut r = vec![D(i + m)];
                r.extend(std::iter::repeat_n(D(j), m));
                (l, r)
            }
            Self::FacePowerShift => {
                let l = vec![D(i); m];
                let mut r = vec![D(j)];
                r.extend(std::iter::repeat_n(D(i), m - 1));
                (l, r)
            }
            Self::FaceOfDegeneracyPowerFar => {
                let mut l = vec![S(j); m];
                l.push(D(i));
                let mut r = vec![D(i - m)];
                r.extend(std::iter::repeat_n(S(j), m));
                (l, r)
            }
            Self::FaceOfDegeneracyPowerNear => {
                let mut l = vec![S(j); m];
                l.push(D(i));
                (l, vec![S(j); m - 1])
            }
        };
        Ok((SimplicialOperator::new(n, lhs)?, SimplicialOperator::new(n, rhs)?))
    }
}

/// Decides one instance of the iterated identities by comparing ordinal maps.
///
/// `family` is 1..=4. Inputs outside the side condition or not
/// dimension-valid on `n`-simplices are rejected rather than reported false.
pub fn check_lemma1_identity(family: u8, i: usize, j: usize, m: usize, n: usize) -> Result<bool> {
    let (lhs, rhs) = IteratedIdentity::from_number(family)?.sides(i, j, m, n)?;
    Ok(lhs.ordinal_map() == rhs.ordinal_map())
}

/// Every valid parameter tuple `(i, j, m)` for `family` on `n`-simplices.
///
/// Indices above `n + m + 1` can never be dimension-valid, so the
/// enumeration is finite.
pub fn iterated_identity_instances(family: IteratedIdentity, n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let limit = 2 * n + 2;
    for m in 0..=limit {
        for i in 0..=limit {
            for j in 0..=limit {
                if family.sides(i, j, m, n).is_ok() {
                    out.push((i, j, m));
                }
            }
        }
    }
    out
}

/// The five families of basic simplicial identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasicIdentity {
    /// `d_i d_j = d_{j-1} d_i` for `i < j`
    FaceFace,
    /// `d_i s_j = s_{j-1} d_i` for `i < j`
    FaceDegeneracyBelow,
    /// `d_j s_j = id = d_{j+1} s_j`
    FaceDegeneracyCancel,
    /// `d_i s_j = s_j d_{i-1}` for `i > j + 1`
    FaceDegeneracyAbove,
    /// `s_i s_j = s_{j+1} s_i` for `i ≤ j`
    DegeneracyDegeneracy,
}

/// One instance of a basic identity: two operators on `n`-simplices that must agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityInstance {
    pub identity: BasicIdentity,
    pub i: usize,
    pub j: usize,
    pub lhs: SimplicialOperator,
    pub rhs: SimplicialOperator,
}

impl IdentityInstance {
    pub fn ambient_dim(&self) -> usize {
        self.lhs.source_dim()
    }

    pub fn peak_dim(&self) -> usize {
        self.lhs.peak_dim().max(self.rhs.peak_dim())
    }
}

/// All dimension-valid instances of the basic identities acting on `n`-simplices.
pub fn basic_identity_instances(n: usize) -> Vec<IdentityInstance> {
    use Token::{Degeneracy as S, Face as D};
    let mut out = Vec::new();
    let mut push = |identity, i, j, l: Vec<Token>, r: Vec<Token>| {
        if let (Ok(lhs), Ok(rhs)) = (SimplicialOperator::new(n, l), SimplicialOperator::new(n, r)) {
            out.push(IdentityInstance { identity, i, j, lhs, rhs });
        }
    };
    for j in 0..=n + 1 {
        for i in 0..=n + 2 {
            if i < j {
                push(BasicIdentity::FaceFace, i, j, vec![D(j), D(i)], vec![D(i), D(j - 1)]);
                push(BasicIdentity::FaceDegeneracyBelow, i, j, vec![S(j), D(i)], vec![D(i), S(j - 1)]);
            }
            if i == j || i == j + 1 {
                push(BasicIdentity::FaceDegeneracyCancel, i, j, vec![S(j), D(i)], vec![]);
            }
            if i > j + 1 {
                push(BasicIdentity::FaceDegeneracyAbove, i, j, vec![S(j), D(i)], vec![D(i - 1), S(j)]);
            }
            if i <= j {
                push(BasicIdentity::DegeneracyDegeneracy, i, j, vec![S(j), S(i)], vec![S(i), S(j + 1)]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_zero_on_one() -> OrdinalMap {
        OrdinalMap::new(1, 1, vec![0, 0]).unwrap()
    }

    #[test]
    fn rejects_malformed_maps() {
        assert!(OrdinalMap::new(1, 1, vec![1, 0]).is_err());
        assert!(OrdinalMap::new(1, 1, vec![0, 2]).is_err());
        assert!(OrdinalMap::new(2, 1, vec![0, 1]).is_err());
    }

    #[test]
    fn compose_examples() {
        let a = OrdinalMap::new(2, 3, vec![0, 2, 2]).unwrap();
        assert_eq!(compose_ordinal(&OrdinalMap::identity(3), &a).unwrap(), a);

        let d1 = OrdinalMap::coface(1, 1).unwrap();
        let s0 = OrdinalMap::codegeneracy(0, 0).unwrap();
        assert_eq!(compose_ordinal(&d1, &s0).unwrap(), constant_zero_on_one());

        let d0 = OrdinalMap::coface(1, 0).unwrap();
        assert!(compose_ordinal(&s0, &d0).unwrap().is_identity());
    }

    #[test]
    fn compose_size_mismatch() {
        let d1 = OrdinalMap::coface(1, 1).unwrap();
        let err = compose_ordinal(&d1, &d1).unwrap_err();
        assert!(matches!(err, Error::Composition { .. }));
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(&OrdinalMap::identity(3)).tokens().is_empty());
        assert_eq!(
            factorize(&OrdinalMap::coface(2, 2).unwrap()).tokens(),
            &[Token::Face(2)]
        );
    }

    // Brute force: every dimension-valid word of length <= 2 from 1-simplices
    // to 1-simplices that induces the constant-0 map.
    #[test]
    fn constant_map_factorization_matches_exhaustive_search() {
        let target = constant_zero_on_one();
        let mut gens = Vec::new();
        for i in 0..4 {
            gens.push(Token::Face(i));
            gens.push(Token::Degeneracy(i));
        }
        let mut hits = Vec::new();
        for &a in &gens {
            for &b in &gens {
                if let Ok(op) = SimplicialOperator::new(1, vec![a, b]) {
                    if op.target_dim() == 1 && op.ordinal_map() == target {
                        hits.push(op);
                    }
                }
            }
        }
        let canonical: Vec<_> = hits.iter().filter(|op| op.is_canonical()).collect();
        assert_eq!(canonical.len(), 1);
        let got = factorize(&target);
        assert_eq!(&got, canonical[0]);
        assert_eq!(got.tokens(), &[Token::Face(1), Token::Degeneracy(0)]);
        // the other representation, s0 then d2, is found but not canonical
        assert!(hits.iter().any(|op| op.tokens() == [Token::Degeneracy(0), Token::Face(2)]));
    }

    #[test]
    fn round_trip_is_exhaustive_up_to_five() {
        for m in 0..=5 {
            for n in 0..=5 {
                for alpha in OrdinalMap::all(m, n) {
                    let op = factorize(&alpha);
                    assert!(op.is_canonical(), "{op}");
                    assert!(op.peak_dim() <= m.max(n));
                    assert_eq!(op.ordinal_map(), alpha);
                }
            }
        }
    }

    #[test]
    fn canonical_words_round_trip() {
        // all canonical words from dimension 3 with <= 2 faces and <= 2 degeneracies
        for faces in 0..=2usize {
            for degens in 0..=2usize {
                for fset in subsets_desc(4, faces) {
                    let after = 3 - faces;
                    for dset in subsets_asc(after + degens, degens) {
                        let mut toks: Vec<Token> = fset.iter().map(|&i| Token::Face(i)).collect();
                        toks.extend(dset.iter().map(|&j| Token::Degeneracy(j)));
                        let Ok(op) = SimplicialOperator::new(3, toks) else { continue };
                        assert!(op.is_canonical());
                        assert_eq!(factorize(&op.ordinal_map()), op);
                    }
                }
            }
        }
    }

    fn subsets_desc(universe: usize, k: usize) -> Vec<Vec<usize>> {
        subsets_asc(universe, k).into_iter().map(|mut s| { s.reverse(); s }).collect()
    }

    fn subsets_asc(universe: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..(1 << universe))
            .filter(|b| b.count_ones() as usize == k)
            .map(|b| (0..universe).filter(|i| b & (1 << i) != 0).collect())
            .collect()
    }

    #[test]
    fn iterated_identity_examples() {
        assert!(check_lemma1_identity(1, 2, 1, 2, 5).unwrap());
        assert!(check_lemma1_identity(4, 1, 0, 2, 3).unwrap());
        assert!(check_lemma1_identity(3, 5, 1, 2, 6).unwrap());
    }

    #[test]
    fn side_condition_is_an_error_not_false() {
        // family 1 needs i >= j
        assert!(matches!(check_lemma1_identity(1, 0, 1, 1, 4), Err(Error::Rejected(_))));
        // family 3 needs i > j + m
        assert!(check_lemma1_identity(3, 2, 1, 1, 4).is_err());
        // d_3 on 2-simplices is undefined
        assert!(check_lemma1_identity(1, 3, 0, 0, 2).is_err());
        assert!(check_lemma1_identity(5, 0, 0, 0, 2).is_err());
    }

    #[test]
    fn iterated_identities_hold_through_dimension_eight() {
        for family in IteratedIdentity::ALL {
            let mut count = 0;
            for n in 0..=8 {
                for (i, j, m) in iterated_identity_instances(family, n) {
                    count += 1;
                    assert!(
                        check_lemma1_identity(family.number(), i, j, m, n).unwrap(),
                        "family {} i={i} j={j} m={m} n={n}",
                        family.number()
                    );
                }
            }
            assert!(count > 0);
        }
    }

    #[test]
    fn a_wrong_identity_is_detected() {
        // d_i d_j^m = d_j^m d_i (missing the +m shift) fails somewhere
        let bad = (1..=4).any(|n| {
            (1..=n).any(|m| {
                (0..n).any(|i| {
                    let l = SimplicialOperator::new(n, {
                        let mut v = vec![Token::Face(0); m];
                        v.push(Token::Face(i));
                        v
                    });
                    let r = SimplicialOperator::new(n, {
                        let mut v = vec![Token::Face(i)];
                        v.extend(vec![Token::Face(0); m]);
                        v
                    });
                    matches!((l, r), (Ok(l), Ok(r)) if l.ordinal_map() != r.ordinal_map())
                })
            })
        });
        assert!(bad);
    }

    #[test]
    fn basic_identities_hold_in_delta() {
        for n in 0..=6 {
            let inst = basic_identity_instances(n);
            assert!(n == 0 || !inst.is_empty());
            for id in inst {
                assert_eq!(id.lhs.ordinal_map(), id.rhs.ordinal_map(), "{id:?}");
            }
        }
    }
}
