//! Built-in groups and subgroup pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::double::{group_pair_double_groupoid, DoubleGroupoid, DoubleNerve};
use super::{subgroup_products_distinct, FiniteGroup};
use crate::error::{rejected, Error, Result};
use crate::kan::CompatibleFamily;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `S_3` with `A = {id, (1,2)}`, `B = {id, (1,3)}`
    S3Counterexample,
    /// `Z/2` with `A = B = Z/2`
    Z2Commuting,
    /// `EG ⊗ EG` for `G = Z/2`
    EgTensor,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::S3Counterexample, Preset::Z2Commuting, Preset::EgTensor];

    pub fn name(self) -> &'static str {
        match self {
            Preset::S3Counterexample => "s3-counterexample",
            Preset::Z2Commuting => "z2-commuting",
            Preset::EgTensor => "eg-tensor",
        }
    }

    /// The subgroup pair, for the presets that have one.
    pub fn group_pair(self) -> Option<GroupPair> {
        match self {
            Preset::S3Counterexample => Some(s3_counterexample()),
            Preset::Z2Commuting => Some(z2_commuting()),
            Preset::EgTensor => None,
        }
    }

    /// The group the preset is built from.
    pub fn group(self) -> FiniteGroup {
        match self {
            Preset::S3Counterexample => FiniteGroup::symmetric(3).expect("S3"),
            Preset::Z2Commuting | Preset::EgTensor => FiniteGroup::cyclic(2).expect("Z/2"),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| rejected(format!("unknown preset {s:?}; expected one of s3-counterexample, z2-commuting, eg-tensor")))
    }
}

/// A group with two subgroups, given by ambient element ids.
#[derive(Debug, Clone)]
pub struct GroupPair {
    pub group: FiniteGroup,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

/// A diagonal 2-horn `x_0 = id^h(b)`, `x_2 = id^v(a)` with no filler when
/// no square has top `a` and right `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalObstruction {
    pub a: u32,
    pub b: u32,
    pub family: CompatibleFamily,
}

impl GroupPair {
    pub fn new(group: FiniteGroup, a: Vec<u32>, b: Vec<u32>) -> Result<Self> {
        for (name, s) in [("A", &a), ("B", &b)] {
            if !group.is_subgroup(s) {
                return Err(rejected(format!("{name} = {:?} is not a subgroup", group.names(s))));
            }
        }
        Ok(Self { group, a, b })
    }

    pub fn products_distinct(&self) -> bool {
        subgroup_products_distinct(&self.group, &self.a, &self.b).expect("validated subgroups")
    }

    pub fn double_groupoid(&self) -> DoubleGroupoid {
        group_pair_double_groupoid(&self.group, &self.a, &self.b).expect("validated subgroups")
    }

    /// The first `(a, b)`, in subgroup order, with `ab ∉ BA`, as a family on
    /// the diagonal of `nerve` (which must be the double nerve of
    /// `self.double_groupoid()` with bounds at least `(2, 2)`).
    pub fn obstruction(&self, d: &DoubleGroupoid, nerve: &DoubleNerve) -> Option<DiagonalObstruction> {
        let ba = self.group.product_set(&self.b, &self.a);
        let mut a_sorted = self.a.clone();
        a_sorted.sort_unstable();
        let mut b_sorted = self.b.clone();
        b_sorted.sort_unstable();
        for (ia, &a) in a_sorted.iter().enumerate() {
            for (ib, &b) in b_sorted.iter().enumerate() {
                if ba.contains(&self.group.mul(a, b)) {
                    continue;
                }
                let x0 = nerve.id_of(1, 1, &[d.horizontal_identity(ib as u32)])?;
                let x2 = nerve.id_of(1, 1, &[d.vertical_identity(ia as u32)])?;
                return Some(DiagonalObstruction { a, b, family: CompatibleFamily::new(2, [(0, x0), (2, x2)], 0) });
            }
        }
        None
    }
}

pub fn s3_counterexample() -> GroupPair {
    let g = FiniteGroup::symmetric(3).expect("S3");
    let a = g.elements(&["id", "(1,2)"]).expect("labels exist");
    let b = g.elements(&["id", "(1,3)"]).expect("labels exist");
    GroupPair::new(g, a, b).expect("subgroups")
}

pub fn z2_commuting() -> GroupPair {
    let g = FiniteGroup::cyclic(2).expect("Z/2");
    GroupPair::new(g, vec![0, 1], vec![0, 1]).expect("subgroups")
}
