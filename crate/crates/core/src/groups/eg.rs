//! `EG_n = G^{n+1}`: faces delete a coordinate, degeneracies repeat one.

use super::FiniteGroup;
use crate::bisimplicial::TruncatedBisimplicialSet;
use crate::simplicial::TruncatedSimplicialSet;

/// Ids are big-endian base `|G|`: `(x_0, .., x_n) -> sum x_i |G|^{n-i}`.
pub fn eg_construction(g: &FiniteGroup, bound: usize) -> TruncatedSimplicialSet {
    let k = g.order() as u32;
    let decode = |n: usize, mut x: u32| {
        let mut v = vec![0u32; n + 1];
        for slot in v.iter_mut().rev() {
            *slot = x % k;
            x /= k;
        }
        v
    };
    let encode = |v: &[u32]| v.iter().fold(0u32, |acc, &c| acc * k + c);
    let counts = (0..=bound).map(|n| k.pow(n as u32 + 1)).collect();
    TruncatedSimplicialSet::from_fn(
        bound,
        counts,
        |n, i, x| {
            let mut v = decode(n, x);
            v.remove(i);
            encode(&v)
        },
        |n, i, x| {
            let mut v = decode(n, x);
            v.insert(i, v[i]);
            encode(&v)
        },
        Some(&|n, x| format!("({})", g.names(&decode(n, x)).join(","))),
    )
    .expect("EG tables are well formed")
}

/// `EG ⊗ EG` truncated at `(bound, bound)`.
pub fn eg_tensor(g: &FiniteGroup, bound: usize) -> TruncatedBisimplicialSet {
    let eg = eg_construction(g, bound);
    TruncatedBisimplicialSet::tensor(&eg, &eg)
}
