//! Run reports: what was asked, how it was configured, and what was found.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bisimp_core::{CompatibleFamily, FillCertificate, Simplex, TruncatedSimplicialSet};
use serde::{Deserialize, Serialize};

pub const PERMUTATION_CONVENTION: &str = "right-to-left: (st)(x) = s(t(x)); cycles are 1-based";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexRef {
    pub dim: usize,
    pub id: u32,
    pub label: String,
}

impl SimplexRef {
    pub fn new(set: &TruncatedSimplicialSet, x: Simplex) -> Self {
        Self { dim: x.dim, id: x.id, label: set.label(x) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceRef {
    pub index: usize,
    pub simplex: SimplexRef,
}

/// Externally tagged: internal tagging would buffer the certificate and
/// lose its integer map keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A horn in `space` (a map to the point unless stated), with the
    /// certificate that can be re-checked against a rebuilt space.
    Horn {
        space: String,
        faces: Vec<FaceRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        filler: Option<SimplexRef>,
        certificate: FillCertificate,
    },
    Simplices {
        space: String,
        role: String,
        simplices: Vec<SimplexRef>,
    },
    Violation {
        identity: String,
        parameters: BTreeMap<String, usize>,
        detail: String,
    },
}

impl Witness {
    pub fn horn(space: impl Into<String>, set: &TruncatedSimplicialSet, certificate: FillCertificate) -> Self {
        let CompatibleFamily { n, faces, .. } = &certificate.family;
        let faces = faces
            .iter()
            .map(|(&index, &id)| FaceRef { index, simplex: SimplexRef::new(set, Simplex::new(n - 1, id)) })
            .collect();
        let filler = certificate.witness().map(|w| SimplexRef::new(set, Simplex::new(*n, w)));
        Witness::Horn { space: space.into(), faces, filler, certificate }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub expected: Outcome,
    pub observed: Outcome,
    pub as_expected: bool,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub statistics: BTreeMap<String, u64>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, expected: Outcome, observed: Outcome, detail: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            expected,
            observed,
            as_expected: expected == observed,
            detail: detail.into(),
            witnesses: Vec::new(),
            statistics: BTreeMap::new(),
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn stat(mut self, key: &str, value: u64) -> Self {
        self.statistics.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
    pub permutation_convention: String,
    pub bounds: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<[Vec<String>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Config {
    pub fn new() -> Self {
        Self { permutation_convention: PERMUTATION_CONVENTION.to_string(), ..Self::default() }
    }

    pub fn bound(mut self, key: &str, value: usize) -> Self {
        self.bounds.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: Config,
    pub verdicts: Vec<Verdict>,
    /// wall-clock microseconds per check, then the total
    pub timing_us: Vec<(String, u64)>,
}

impl RunReport {
    pub fn all_as_expected(&self) -> bool {
        self.verdicts.iter().all(|v| v.as_expected)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.command);
        if let Some(p) = &self.config.preset {
            let _ = writeln!(s, "  preset: {p}");
        }
        if let Some(p) = &self.config.input {
            let _ = writeln!(s, "  input: {p}");
        }
        if let Some(c) = &self.config.construction {
            let _ = writeln!(s, "  construction: {c}");
        }
        let bounds: Vec<String> = self.config.bounds.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "  bounds: {}", bounds.join(", "));
        let _ = writeln!(s, "  permutations: {}", self.config.permutation_convention);
        for v in &self.verdicts {
            let mark = if v.as_expected { "ok " } else { "BAD" };
            let _ = writeln!(
                s,
                "{mark} {}: {} (expected {}) {}",
                v.check,
                v.observed.as_str(),
                v.expected.as_str(),
                v.detail
            );
            for w in &v.witnesses {
                let _ = writeln!(s, "      {}", witness_text(w));
            }
            if !v.statistics.is_empty() {
                let st: Vec<String> = v.statistics.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "      {}", st.join(" "));
            }
        }
        let t: Vec<String> = self.timing_us.iter().map(|(k, v)| format!("{k} {:.1}ms", *v as f64 / 1e3)).collect();
        let _ = writeln!(s, "  timing: {}", t.join(", "));
        let _ = writeln!(s, "{}", if self.all_as_expected() { "all checks as expected" } else { "UNEXPECTED RESULTS" });
        s
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Horn { space, faces, filler, certificate } => {
            let fs: Vec<String> = faces.iter().map(|f| format!("x_{}={}", f.index, f.simplex.label)).collect();
            let end = match filler {
                Some(x) => format!("filled by {}", x.label),
                None => format!("no filler among {} candidates", certificate.candidates_examined),
            };
            format!("horn n={} in {space}: {}; {end}", certificate.family.n, fs.join(", "))
        }
        Witness::Simplices { space, role, simplices } => {
            let xs: Vec<&str> = simplices.iter().map(|x| x.label.as_str()).collect();
            format!("{role} in {space} ({}): {}", simplices.len(), xs.join(" "))
        }
        Witness::Violation { identity, parameters, detail } => {
            let ps: Vec<String> = parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{identity} fails at {}: {detail}", ps.join(", "))
        }
    }
}
