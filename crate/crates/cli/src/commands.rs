//! The four commands. Each returns a [`RunReport`]; none of them print.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail};
use bisimp_core::bisimplicial::diagonal_map;
use bisimp_core::groups::presets::Preset;
use bisimp_core::groups::{nerve, DoubleNerve, FiniteGroupoid};
use bisimp_core::kan::{brute_force_fill, check_kan_fibration, check_trivial_fibration_to_point, KanReport};
use bisimp_core::ordinal::{basic_identity_instances, iterated_identity_instances, BasicIdentity, IteratedIdentity};
use bisimp_core::simplicial::pi0;
use bisimp_core::theorem::verify_theorem1_sweep;
use bisimp_core::{BiSimplex, BisimplicialMap, Simplex, SimplicialMap, SimplicialOperator, TruncatedBisimplicialSet, TruncatedSimplicialSet};
use rayon::prelude::*;

use crate::report::{Config, Outcome, RunReport, SimplexRef, Verdict, Witness};
use crate::source::Source;

pub const MAX_IDENTITY_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Nerve,
    DoubleNerveDiagonal,
    EgTensorDiagonal,
    Row,
    Column,
    Explicit,
}

impl Construction {
    pub const ALL: [Construction; 6] = [
        Construction::Nerve,
        Construction::DoubleNerveDiagonal,
        Construction::EgTensorDiagonal,
        Construction::Row,
        Construction::Column,
        Construction::Explicit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Nerve => "nerve",
            Construction::DoubleNerveDiagonal => "double-nerve-diagonal",
            Construction::EgTensorDiagonal => "eg-tensor-diagonal",
            Construction::Row => "row",
            Construction::Column => "column",
            Construction::Explicit => "explicit",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| anyhow!("unknown construction {s:?}"))
    }
}

/// Collects verdicts with their timings.
struct Run {
    verdicts: Vec<Verdict>,
    timing: Vec<(String, u64)>,
    start: Instant,
}

impl Run {
    fn new() -> Self {
        Self { verdicts: Vec::new(), timing: Vec::new(), start: Instant::now() }
    }

    fn push(&mut self, v: Verdict, us: u64) {
        self.timing.push((v.check.clone(), us));
        self.verdicts.push(v);
    }

    fn timed(&mut self, f: impl FnOnce() -> anyhow::Result<Verdict>) -> anyhow::Result<()> {
        let t = Instant::now();
        let v = f()?;
        self.push(v, us(t));
        Ok(())
    }

    fn finish(mut self, command: String, config: Config) -> RunReport {
        self.timing.push(("total".into(), us(self.start)));
        RunReport { command, config, verdicts: self.verdicts, timing_us: self.timing }
    }
}

fn us(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

fn kan_stats(v: Verdict, r: &KanReport) -> Verdict {
    v.stat("families_checked", r.families_checked()).stat("max_dim", r.max_dim as u64)
}

/// A Kan check of `set → point` as a verdict.
fn kan_verdict(check: String, space: &str, set: Arc<TruncatedSimplicialSet>, max_dim: usize, expected: Outcome) -> anyhow::Result<Verdict> {
    let f = SimplicialMap::to_point(set.clone());
    let r = check_kan_fibration(&f, max_dim)?;
    let observed = Outcome::from_bool(r.passed);
    let detail = match &r.failure {
        None => format!("every horn up to dimension {max_dim} fills"),
        Some(c) => format!("horn Λ^{}_{} has no filler", c.family.n, c.family.missing_index().unwrap_or(0)),
    };
    let mut v = kan_stats(Verdict::new(check, expected, observed, detail), &r);
    if let Some(c) = r.failure.clone() {
        v = v.with_witness(Witness::horn(space, &set, c));
    }
    Ok(v)
}

/// Runs the iterated and basic identities for every ambient `n <= max_n`.
///
/// `check` decides one instance; the real command compares ordinal maps.
/// Tests pass a deliberately wrong comparison to see a failure reported.
pub fn identities_with(
    max_n: usize,
    check: &(dyn Fn(&SimplicialOperator, &SimplicialOperator) -> bool + Sync),
) -> anyhow::Result<RunReport> {
    if max_n > MAX_IDENTITY_DIM {
        bail!("max_n must be at most {MAX_IDENTITY_DIM}, got {max_n}");
    }
    let mut run = Run::new();
    for fam in IteratedIdentity::ALL {
        let t = Instant::now();
        let results: Vec<(usize, (usize, usize, usize), bool)> = (0..=max_n)
            .into_par_iter()
            .flat_map_iter(|n| {
                iterated_identity_instances(fam, n).into_iter().map(move |(i, j, m)| {
                    let (l, r) = fam.sides(i, j, m, n).expect("enumerated instances are valid");
                    (n, (i, j, m), check(&l, &r))
                })
            })
            .collect();
        let bad = results.iter().find(|r| !r.2);
        let mut v = Verdict::new(
            format!("iterated identity family {}", fam.number()),
            Outcome::Pass,
            Outcome::from_bool(bad.is_none()),
            format!("{} instances with n <= {max_n}", results.len()),
        )
        .stat("instances", results.len() as u64);
        if let Some(&(n, (i, j, m), _)) = bad {
            let parameters = [("i", i), ("j", j), ("m", m), ("n", n)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            v = v.with_witness(Witness::Violation {
                identity: format!("family {}", fam.number()),
                parameters,
                detail: "the two sides give different ordinal maps".into(),
            });
        }
        run.push(v, us(t));
    }
    let t = Instant::now();
    let mut count = 0u64;
    let mut bad = None;
    for n in 0..=max_n {
        for inst in basic_identity_instances(n) {
            count += 1;
            if bad.is_none() && !check(&inst.lhs, &inst.rhs) {
                bad = Some((n, inst));
            }
        }
    }
    let mut v = Verdict::new(
        "basic simplicial identities",
        Outcome::Pass,
        Outcome::from_bool(bad.is_none()),
        format!("{count} instances with n <= {max_n}"),
    )
    .stat("instances", count);
    if let Some((n, inst)) = bad {
        let parameters = [("i", inst.i), ("j", inst.j), ("n", n)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        v = v.with_witness(Witness::Violation {
            identity: basic_name(inst.identity).into(),
            parameters,
            detail: "the two sides give different ordinal maps".into(),
        });
    }
    run.push(v, us(t));
    Ok(run.finish(format!("bisimp identities --max-dim {max_n}"), Config::new().bound("max_dim", max_n)))
}

fn basic_name(b: BasicIdentity) -> &'static str {
    match b {
        BasicIdentity::FaceFace => "d_i d_j = d_{j-1} d_i",
        BasicIdentity::FaceDegeneracyBelow => "d_i s_j = s_{j-1} d_i",
        BasicIdentity::FaceDegeneracyCancel => "d_j s_j = id = d_{j+1} s_j",
        BasicIdentity::FaceDegeneracyAbove => "d_i s_j = s_j d_{i-1}",
        BasicIdentity::DegeneracyDegeneracy => "s_i s_j = s_{j+1} s_i",
    }
}

pub fn cmd_identities(max_n: usize) -> anyhow::Result<RunReport> {
    identities_with(max_n, &|l, r| l.ordinal_map() == r.ordinal_map())
}

fn base_config(source: &Source) -> anyhow::Result<Config> {
    let mut c = Config::new();
    match source {
        Source::Preset(p) => c.preset = Some(p.name().into()),
        Source::Input { path, .. } => c.input = Some(path.clone()),
    }
    c.group = source.group()?.map(|g| g.labels().to_vec());
    c.subgroups = source.pair()?.map(|p| [p.group.names(&p.a), p.group.names(&p.b)]);
    Ok(c)
}

/// Builds the chosen object and checks that its map to the point is Kan.
///
/// `row` and `column` take `index`; without one, every index up to
/// `max_dim` is checked.
pub fn cmd_kan(source: &Source, construction: Construction, index: Option<usize>, max_dim: usize) -> anyhow::Result<RunReport> {
    let mut config = base_config(source)?.bound("max_dim", max_dim);
    config.construction = Some(construction.name().into());
    let mut command = format!("bisimp kan {source} --construction {construction} --max-dim {max_dim}");
    let mut run = Run::new();
    match construction {
        Construction::Nerve => {
            let g = source.group()?.ok_or_else(|| anyhow!("the nerve construction needs a group"))?;
            let set = Arc::new(nerve(&FiniteGroupoid::from_group(&g), max_dim));
            run.timed(|| kan_verdict("Kan: nerve of G".into(), "N G", set, max_dim, Outcome::Pass))?;
        }
        Construction::Explicit => {
            let set = source.explicit_simplicial().ok_or_else(|| anyhow!("explicit construction needs a simplicial input"))?;
            let set = Arc::new(set.clone());
            run.timed(|| kan_verdict("Kan: explicit simplicial set".into(), "input", set, max_dim, Outcome::Pass))?;
        }
        Construction::DoubleNerveDiagonal => {
            let pair = source.pair()?.ok_or_else(|| anyhow!("the double nerve needs a subgroup pair"))?;
            let x = DoubleNerve::new(&pair.double_groupoid(), (max_dim, max_dim)).into_set();
            config = config.bound("horizontal", max_dim).bound("vertical", max_dim);
            // an element ab outside BA leaves a 2-horn on the diagonal unfilled
            let expected = Outcome::from_bool(!(pair.products_distinct() && max_dim >= 2));
            let set = Arc::new(x.diagonal());
            run.timed(|| kan_verdict("Kan: diag NN C(A,B)".into(), "diag NN C(A,B)", set, max_dim, expected))?;
        }
        Construction::EgTensorDiagonal => {
            let g = source.group()?.ok_or_else(|| anyhow!("EG ⊗ EG needs a group"))?;
            let set = Arc::new(bisimp_core::groups::eg_tensor(&g, max_dim).diagonal());
            config = config.bound("horizontal", max_dim).bound("vertical", max_dim);
            run.timed(|| kan_verdict("Kan: diag(EG ⊗ EG)".into(), "diag(EG ⊗ EG)", set, max_dim, Outcome::Pass))?;
        }
        Construction::Row | Construction::Column => {
            let top = index.unwrap_or(max_dim);
            let b = max_dim.max(top);
            let (name, x) = source.bisimplicial((b, b))?;
            let (hb, vb) = x.bounds();
            config = config.bound("horizontal", hb).bound("vertical", vb);
            let indices: Vec<usize> = match index {
                Some(k) => vec![k],
                None => (0..=top).collect(),
            };
            if let Some(k) = index {
                command.push_str(&format!(" --index {k}"));
                config = config.bound("index", k);
            }
            let row = construction == Construction::Row;
            let results: Vec<(Verdict, u64)> = indices
                .par_iter()
                .map(|&k| {
                    let t = Instant::now();
                    let set = Arc::new(if row { x.row(k)? } else { x.column(k)? });
                    let what = if row { format!("row {k} of {name}") } else { format!("column {k} of {name}") };
                    let v = kan_verdict(format!("Kan: {what}"), &what, set, max_dim, Outcome::Pass)?;
                    Ok((v, us(t)))
                })
                .collect::<anyhow::Result<_>>()?;
            for (v, t) in results {
                run.push(v, t);
            }
        }
    }
    Ok(run.finish(command, config))
}

/// Runs the pointwise sweep (and its transpose) on the source's
/// bisimplicial set mapped to the point.
pub fn cmd_theorem1(source: &Source, max_total_dim: usize) -> anyhow::Result<RunReport> {
    let (name, x) = source.bisimplicial((max_total_dim, max_total_dim))?;
    let (hb, vb) = x.bounds();
    let config = base_config(source)?.bound("max_total_dim", max_total_dim).bound("horizontal", hb).bound("vertical", vb);
    let f = BisimplicialMap::to_point(Arc::new(x));
    let mut run = Run::new();
    let t = Instant::now();
    let r = match verify_theorem1_sweep(&f, max_total_dim) {
        Ok(r) => r,
        Err(e) => return Err(precondition_error(&name, &f, max_total_dim).unwrap_or_else(|| anyhow!("{name}: {e}"))),
    };
    run.timing.push(("sweep".into(), us(t)));
    let diag = kan_stats(
        Verdict::new(
            format!("Kan: diag {name}"),
            Outcome::Pass,
            Outcome::from_bool(r.diagonal_check.passed),
            format!("checked up to dimension {max_total_dim}"),
        ),
        &r.diagonal_check,
    );
    run.verdicts.push(diag);
    for (label, half) in [("columns", &r.direct), ("rows (transposed)", &r.transposed)] {
        let detail = match &half.failure {
            None => format!("every pointwise horn with p + q <= {max_total_dim} is filled via the diagonal"),
            Some(fail) => format!(
                "problem (p={}, q={}, missing={}) failed: {}",
                fail.problem.p, fail.problem.q, fail.problem.missing, fail.reason
            ),
        };
        let fills: u64 = half.cells.iter().map(|c| c.fills).sum();
        let width = half.cells.iter().map(|c| c.max_search_width).max().unwrap_or(0);
        let v = Verdict::new(format!("pointwise fillers: {label} of {name}"), Outcome::Pass, Outcome::from_bool(half.passed), detail)
            .stat("problems", half.problems())
            .stat("fills", fills)
            .stat("compatible_families", half.compatible_families())
            .stat("cells", half.cells.len() as u64)
            .stat("max_search_width", width);
        run.verdicts.push(v);
    }
    Ok(run.finish(format!("bisimp theorem1 {source} --max-dim {max_total_dim}"), config))
}

/// Names the unfillable diagonal horn when the sweep's precondition fails.
fn precondition_error(name: &str, f: &BisimplicialMap, max_dim: usize) -> Option<anyhow::Error> {
    let diag = diagonal_map(f);
    let fail = check_kan_fibration(&diag, max_dim).ok()?.failure?;
    let set = diag.domain();
    let n = fail.family.n;
    let faces: Vec<String> = fail
        .family
        .faces
        .iter()
        .map(|(&i, &x)| format!("x_{i} = {} ({})", set.label(Simplex::new(n - 1, x)), Simplex::new(n - 1, x)))
        .collect();
    Some(anyhow!(
        "precondition failed: diag {name} is not Kan up to dimension {max_dim}; the horn {} at n = {n} has no filler among {} candidates",
        faces.join(", "),
        fail.candidates_examined
    ))
}

/// One-shot certificate for a preset. `max_dim` bounds the row and column
/// Kan checks; the diagonal horn always lives in dimension 2.
pub fn cmd_counterexample(preset: Preset, max_dim: usize) -> anyhow::Result<RunReport> {
    let source = Source::Preset(preset);
    let mut config = base_config(&source)?.bound("max_dim", max_dim);
    let command = format!("bisimp counterexample --preset {preset} --max-dim {max_dim}");
    let mut run = Run::new();
    match preset.group_pair() {
        Some(pair) => {
            let g = &pair.group;
            let t = Instant::now();
            let distinct = pair.products_distinct();
            let ba = g.product_set(&pair.b, &pair.a);
            let culprit = pair.a.iter().flat_map(|&a| pair.b.iter().map(move |&b| (a, b))).find(|&(a, b)| !ba.contains(&g.mul(a, b)));
            let detail = match culprit {
                Some((a, b)) => format!("{}·{} = {} is not in BA", g.label(a), g.label(b), g.label(g.mul(a, b))),
                None => "AB = BA, so the counterexample does not apply".into(),
            };
            let expected = Outcome::from_bool(preset == Preset::S3Counterexample);
            run.push(Verdict::new("AB ≠ BA", expected, Outcome::from_bool(distinct), detail), us(t));
            if !distinct {
                return Ok(run.finish(command, config));
            }

            let b = max_dim.max(2);
            config = config.bound("horizontal", b).bound("vertical", b);
            let d = pair.double_groupoid();
            let dn = DoubleNerve::new(&d, (b, b));
            let x = dn.set().clone();
            let pointwise: Vec<(bool, usize)> = (0..=2).flat_map(|k| [(true, k), (false, k)]).collect();
            let results: Vec<(Verdict, u64)> = pointwise
                .par_iter()
                .map(|&(row, k)| {
                    let t = Instant::now();
                    let set = Arc::new(if row { x.row(k)? } else { x.column(k)? });
                    let what = if row { format!("row {k} of NN C(A,B)") } else { format!("column {k} of NN C(A,B)") };
                    let v = kan_verdict(format!("Kan: {what}"), &what, set, max_dim, Outcome::Pass)?;
                    Ok((v, us(t)))
                })
                .collect::<anyhow::Result<_>>()?;
            for (v, t) in results {
                run.push(v, t);
            }

            let t = Instant::now();
            let squares: Vec<SimplexRef> = (0..x.count(1, 1))
                .map(|id| SimplexRef { dim: 1, id, label: x.label(BiSimplex::new(1, 1, id)) })
                .collect();
            let n_sq = squares.len();
            let v = Verdict::new(
                "squares of C(A,B) enumerated",
                Outcome::Pass,
                Outcome::from_bool(n_sq == d.squares().len()),
                format!("{n_sq} squares, which are the 1-simplices of the diagonal"),
            )
            .with_witness(Witness::Simplices { space: "NN C(A,B)_{1,1}".into(), role: "squares".into(), simplices: squares })
            .stat("squares", n_sq as u64);
            run.push(v, us(t));

            let t = Instant::now();
            let diag_set = Arc::new(x.diagonal());
            let diag = SimplicialMap::to_point(diag_set.clone());
            let ob = pair.obstruction(&d, &dn).ok_or_else(|| anyhow!("no obstruction found although AB ≠ BA"))?;
            let cert = brute_force_fill(&diag, &ob.family)?;
            let detail = format!(
                "x_0 = id^h({}), x_2 = id^v({}); {} candidates in NN C_{{2,2}} examined",
                g.label(ob.b),
                g.label(ob.a),
                cert.candidates_examined
            );
            let v = Verdict::new("diagonal horn (ι_a, ι_b) has a filler", Outcome::Fail, Outcome::from_bool(cert.is_filled()), detail)
                .stat("candidates_examined", cert.candidates_examined)
                .stat("fillers_found", u64::from(cert.is_filled()))
                .with_witness(Witness::horn("diag NN C(A,B)", &diag_set, cert));
            run.push(v, us(t));

            let top = max_dim.min(b);
            run.timed(|| kan_verdict("Kan: diag NN C(A,B)".into(), "diag NN C(A,B)", diag_set, top, Outcome::Fail))?;
        }
        None => {
            let g = preset.group();
            let b = max_dim.max(2);
            config = config.bound("horizontal", b).bound("vertical", b);
            let x: TruncatedBisimplicialSet = bisimp_core::groups::eg_tensor(&g, b);
            let t = Instant::now();
            let diag = Arc::new(x.diagonal());
            let r = check_trivial_fibration_to_point(diag.clone(), 2)?;
            let mut v = kan_stats(
                Verdict::new(
                    "diag(EG ⊗ EG) → point is a trivial fibration",
                    Outcome::Pass,
                    Outcome::from_bool(r.passed),
                    "every boundary up to dimension 2 fills",
                ),
                &r,
            );
            if let Some(c) = r.failure.clone() {
                v.detail = "a boundary has no filler".into();
                v = v.with_witness(Witness::horn("diag(EG ⊗ EG)", &diag, c));
            }
            run.push(v, us(t));

            let t = Instant::now();
            let row = x.row(1)?;
            let comps = pi0(&row)?;
            let order = g.order() as u64;
            let want = order * order;
            let reps: Vec<SimplexRef> = comps
                .components
                .iter()
                .map(|c| SimplexRef::new(&row, Simplex::new(0, c[0])))
                .collect();
            let v = Verdict::new(
                "row 1 of EG ⊗ EG is not contractible",
                Outcome::Pass,
                Outcome::from_bool(comps.len() as u64 == want && want > 1),
                format!("pi0 has {} components; |G|^2 = {want}", comps.len()),
            )
            .stat("pi0_components", comps.len() as u64)
            .with_witness(Witness::Simplices { space: "row 1 of EG ⊗ EG".into(), role: "component representatives".into(), simplices: reps });
            run.push(v, us(t));
        }
    }
    Ok(run.finish(command, config))
}
