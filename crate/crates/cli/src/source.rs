//! Where the object under test comes from: a preset or a JSON input file.

use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use bisimp_core::groups::presets::{GroupPair, Preset};
use bisimp_core::groups::{eg_tensor, parse_cycles, DoubleNerve, FiniteGroup};
use bisimp_core::{TruncatedBisimplicialSet, TruncatedSimplicialSet};
use serde::{Deserialize, Serialize};

/// A group given by its table or by permutation generators in cycle notation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSpec {
    Table { labels: Vec<String>, table: Vec<Vec<u32>> },
    Permutations { degree: usize, generators: Vec<String> },
}

impl GroupSpec {
    pub fn build(&self) -> anyhow::Result<FiniteGroup> {
        Ok(match self {
            GroupSpec::Table { labels, table } => FiniteGroup::from_table(labels.clone(), table.clone())?,
            GroupSpec::Permutations { degree, generators } => {
                let gens = generators
                    .iter()
                    .map(|g| parse_cycles(g, *degree))
                    .collect::<Result<Vec<_>, _>>()?;
                FiniteGroup::from_permutation_generators(*degree, &gens)?
            }
        })
    }
}

/// Input file contents. Exactly one of `group`, `simplicial`,
/// `bisimplicial` is expected; `a` and `b` name subgroup elements by label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simplicial: Option<TruncatedSimplicialSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisimplicial: Option<TruncatedBisimplicialSet>,
}

impl Input {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let input: Input = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let given = [input.group.is_some(), input.simplicial.is_some(), input.bisimplicial.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            bail!("input must give exactly one of group, simplicial, bisimplicial");
        }
        if input.a.is_some() != input.b.is_some() || (input.a.is_some() && input.group.is_none()) {
            bail!("subgroups a and b must be given together, with a group");
        }
        Ok(input)
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    Preset(Preset),
    Input { path: String, input: Box<Input> },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Preset(p) => write!(f, "--preset {p}"),
            Source::Input { path, .. } => write!(f, "--input {path}"),
        }
    }
}

impl Source {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(Source::Input { path: path.display().to_string(), input: Box::new(Input::from_path(path)?) })
    }

    pub fn group(&self) -> anyhow::Result<Option<FiniteGroup>> {
        match self {
            Source::Preset(p) => Ok(Some(p.group())),
            Source::Input { input, .. } => input.group.as_ref().map(GroupSpec::build).transpose(),
        }
    }

    pub fn pair(&self) -> anyhow::Result<Option<GroupPair>> {
        match self {
            Source::Preset(p) => Ok(p.group_pair()),
            Source::Input { input, .. } => {
                let (Some(a), Some(b)) = (&input.a, &input.b) else { return Ok(None) };
                let g = self.group()?.ok_or_else(|| anyhow!("subgroups need a group"))?;
                let (a, b) = (g.elements(a)?, g.elements(b)?);
                Ok(Some(GroupPair::new(g, a, b)?))
            }
        }
    }

    pub fn explicit_simplicial(&self) -> Option<&TruncatedSimplicialSet> {
        match self {
            Source::Input { input, .. } => input.simplicial.as_ref(),
            Source::Preset(_) => None,
        }
    }

    /// The bisimplicial set this source describes: the double nerve of a
    /// subgroup pair, `EG ⊗ EG` of a bare group, or explicit tables (which
    /// keep their own bounds).
    pub fn bisimplicial(&self, bounds: (usize, usize)) -> anyhow::Result<(String, TruncatedBisimplicialSet)> {
        if let Source::Input { input, .. } = self {
            if let Some(x) = &input.bisimplicial {
                return Ok(("explicit bisimplicial set".into(), x.clone()));
            }
            if input.simplicial.is_some() {
                bail!("a simplicial input has no bisimplicial construction");
            }
        }
        if let Some(pair) = self.pair()? {
            let d = pair.double_groupoid();
            return Ok(("NN C(A,B)".into(), DoubleNerve::new(&d, bounds).into_set()));
        }
        let g = self.group()?.ok_or_else(|| anyhow!("no group given"))?;
        if bounds.0 != bounds.1 {
            bail!("EG ⊗ EG is built with equal bounds");
        }
        Ok(("EG ⊗ EG".into(), eg_tensor(&g, bounds.0)))
    }
}
