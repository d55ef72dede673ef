use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::path::Path;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::descriptor::{parse_step_law, BuiltSystem, MeasureDescriptor, PointDescriptor, SystemDescriptor};
use super::output::{float, Table, TaskOutput};
use crate::symbolic::{
    random_walk_boundary_sample, Alphabet, GeneratorSystem, Sequence, SymbolicPoint, SystemError, TildePoint,
    TildeSystem, TreeSystem,
};
use crate::topography::{
    back_orbit_mass, back_tail_sup, classify, explore_ball, forward_trace, rn_core_truncated, sigma_backward,
    verify_exclusion, ClassifyParams, CoreStatus, DEFAULT_BUDGET,
};
use crate::transport::{
    backward_balance_check, estimate_mtp, sample, Convention, EstimateOptions, KernelKind, TransportKernel,
};
use crate::tree::{
    coherent_transversal, convex_hull, helly_common_vertex, is_coherent, lex_least_path, parse_tree_document,
    prune_rho_finite,
};
use crate::weight::{ratio_int, ratio_pow, ratio_string, serde_opt_ratio, Weight};

type Invalid = (String, String);

fn invalid(field: &str, e: impl ToString) -> Invalid {
    (field.to_string(), e.to_string())
}

fn build(system: &SystemDescriptor) -> Result<BuiltSystem, Invalid> {
    system.build().map_err(|e| invalid("system", e))
}

/// A point of the built system, exact or tagged.
enum BuiltPoint {
    Plain(SymbolicPoint),
    Tilde(TildePoint<SymbolicPoint>),
}

fn build_point(system: &BuiltSystem, point: &PointDescriptor) -> Result<BuiltPoint, Invalid> {
    let bad = |e: SystemError| invalid("point", e);
    match system {
        BuiltSystem::Generator(g) => {
            if point.tag.is_some() {
                return Err(invalid("point.tag", "tags only apply to tilde expansions"));
            }
            let x = point.symbolic(g.alphabet()).map_err(bad)?;
            g.validate_point(&x).map_err(bad)?;
            Ok(BuiltPoint::Plain(x))
        }
        BuiltSystem::Tilde(t) => {
            let v = point.tilde(system.alphabet()).map_err(bad)?;
            TreeSystem::validate(t, &v).map_err(bad)?;
            Ok(BuiltPoint::Tilde(v))
        }
    }
}

fn generator<'a>(system: &'a BuiltSystem, task: &str) -> Result<&'a GeneratorSystem, Invalid> {
    system
        .generator()
        .ok_or_else(|| invalid("system", format!("{task} needs a base system, not a tilde expansion")))
}

fn strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(ratio_string).collect()
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Ball, masses and traces around one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreTask {
    pub system: SystemDescriptor,
    pub point: PointDescriptor,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExploreTask {
    pub(super) fn validate(&self) -> Result<(), Invalid> {
        build_point(&build(&self.system)?, &self.point).map(|_| ())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let system = build(&self.system).map_err(|e| e.1)?;
        let budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        let r = match (&system, build_point(&system, &self.point).map_err(|e| e.1)?) {
            (BuiltSystem::Generator(g), BuiltPoint::Plain(x)) => explore(g, &x, self.depth, self.radius, budget),
            (BuiltSystem::Tilde(t), BuiltPoint::Tilde(v)) => explore(t, &v, self.depth, self.radius, budget),
            _ => unreachable!("points are built for their system"),
        };
        r.map_err(|e| e.to_string())
    }
}

fn explore<P, S>(system: &S, x: &P, depth: usize, radius: Option<usize>, budget: usize) -> Result<TaskOutput, SystemError>
where
    P: Clone + Eq + Debug,
    S: TreeSystem<P>,
{
    let back = back_orbit_mass(system, x, depth, budget)?;
    let spheres: Vec<BigRational> = back
        .lower_bounds
        .iter()
        .scan(BigRational::zero(), |prev, b| {
            let d = b - &*prev;
            *prev = b.clone();
            Some(d)
        })
        .collect();
    let sigma = sigma_backward(system, x, depth, budget)?;
    let tails = (0..=depth)
        .map(|n| back_tail_sup(system, x, n, depth, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let forward = forward_trace(system, x, depth)?;
    let ball = match radius {
        Some(r) => {
            let b = explore_ball(system, x, r, budget)?;
            json!({"radius": r, "vertices": b.len(), "sphere_sizes": b.sphere_sizes()})
        }
        None => serde_json::Value::Null,
    };
    let mut table = Table::series();
    table.push_series("back_sphere_mass", &spheres);
    table.push_series("back_orbit_mass", &back.lower_bounds);
    table.push_series("sigma", &sigma.lower_bounds);
    table.push_series("forward_rho", &forward.rho);
    table.push_series("forward_partial_sum", &forward.partial_sums);
    Ok(TaskOutput {
        json: json!({
            "system": system.name(),
            "point": format!("{x:?}"),
            "depth": depth,
            "ball": ball,
            "back_sphere_mass": strings(&spheres),
            "back_orbit": to_json(&back),
            "sigma": to_json(&sigma),
            "tail_sup": to_json(&tails),
            "forward": to_json(&forward),
        }),
        table,
        classification: None,
    })
}

/// Forward-end, back-end and core status of one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyTask {
    pub system: SystemDescriptor,
    pub point: PointDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_opt_ratio")]
    pub threshold: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odometer_horizon: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ClassifyTask {
    pub(super) fn validate(&self) -> Result<(), Invalid> {
        let system = build(&self.system)?;
        generator(&system, "classify")?;
        build_point(&system, &self.point).map(|_| ())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let system = build(&self.system).map_err(|e| e.1)?;
        let g = generator(&system, "classify").map_err(|e| e.1)?;
        let BuiltPoint::Plain(x) = build_point(&system, &self.point).map_err(|e| e.1)? else {
            unreachable!()
        };
        let d = ClassifyParams::default();
        let params = ClassifyParams {
            depth: self.depth.unwrap_or(d.depth),
            core_radius: self.core_radius.unwrap_or(d.core_radius),
            threshold: self.threshold.clone().unwrap_or(d.threshold),
            probe_depth: self.probe_depth.unwrap_or(d.probe_depth),
            odometer_horizon: self.odometer_horizon.unwrap_or(d.odometer_horizon),
            budget: self.budget.unwrap_or(d.budget),
        };
        let c = classify(g, &x, &params).map_err(|e| e.to_string())?;
        let mut table = Table::new(&["system", "point", "forward", "back", "core"]);
        let word = |v: &serde_json::Value| v.as_str().unwrap_or_default().to_string();
        table.push(vec![
            c.system.clone(),
            c.point.clone(),
            word(&to_json(&c.forward)),
            word(&to_json(&c.back)),
            word(&to_json(&c.core)),
        ]);
        Ok(TaskOutput {
            json: to_json(&c),
            table,
            classification: Some(c),
        })
    }
}

/// Truncated Radon–Nikodym core around one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoreTask {
    pub system: SystemDescriptor,
    pub point: PointDescriptor,
    pub radius: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_opt_ratio")]
    pub threshold: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl CoreTask {
    pub(super) fn validate(&self) -> Result<(), Invalid> {
        build_point(&build(&self.system)?, &self.point).map(|_| ())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let system = build(&self.system).map_err(|e| e.1)?;
        let threshold = self.threshold.clone().unwrap_or_else(|| ratio_int(1 << 10));
        let probe = self.probe_depth.unwrap_or(8);
        let budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        let r = match (&system, build_point(&system, &self.point).map_err(|e| e.1)?) {
            (BuiltSystem::Generator(g), BuiltPoint::Plain(x)) => core(g, &x, self.radius, &threshold, probe, budget),
            (BuiltSystem::Tilde(t), BuiltPoint::Tilde(v)) => core(t, &v, self.radius, &threshold, probe, budget),
            _ => unreachable!("points are built for their system"),
        };
        r.map_err(|e| e.to_string())?
    }
}

fn core<P, S>(
    system: &S,
    x: &P,
    radius: usize,
    threshold: &BigRational,
    probe: usize,
    budget: usize,
) -> Result<Result<TaskOutput, String>, SystemError>
where
    P: Clone + Eq + Debug,
    S: TreeSystem<P>,
{
    let report = rn_core_truncated(system, x, radius, threshold, probe, budget)?;
    let mut table = Table::new(&["distance", "point", "status", "total", "total_float"]);
    let mut verified = 0;
    let mut failed = Vec::new();
    for e in &report.entries {
        let (status, total) = match &e.status {
            CoreStatus::InCore { .. } => ("in_core", None),
            CoreStatus::BelowThreshold { lower_bound } => ("below_threshold", Some(lower_bound)),
            CoreStatus::Excluded { certificate } => {
                if verify_exclusion(system, certificate, 64, budget)? {
                    verified += 1;
                } else {
                    failed.push(format!("{:?}", e.point));
                }
                ("excluded", Some(&certificate.total))
            }
        };
        table.push(vec![
            e.distance.to_string(),
            format!("{:?}", e.point),
            status.into(),
            total.map(ratio_string).unwrap_or_default(),
            total.map(float).unwrap_or_default(),
        ]);
    }
    if !failed.is_empty() {
        return Ok(Err(format!("exclusion certificates failed to re-verify at {}", failed.join(", "))));
    }
    Ok(Ok(TaskOutput {
        json: json!({
            "system": system.name(),
            "point": format!("{x:?}"),
            "vertices": report.entries.len(),
            "in_core": report.in_core(),
            "excluded": report.excluded(),
            "verified": verified,
            "report": to_json(&report),
        }),
        table,
        classification: None,
    }))
}

/// Monte Carlo mass-transport estimate, or the backward balance summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MtpTask {
    pub system: SystemDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDescriptor>,
    pub kernel: KernelKind,
    #[serde(default)]
    pub convention: Convention,
    /// Report the distribution of `ρ^x(f^{-1}(x))` instead of an estimate.
    #[serde(default)]
    pub balance: bool,
    pub samples: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chunk_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl MtpTask {
    pub(super) fn validate(&self) -> Result<(), Invalid> {
        let system = build(&self.system)?;
        let g = generator(&system, "mtp")?;
        if let Some(m) = &self.measure {
            let m = m.build().map_err(|e| invalid("measure", e))?;
            if m.alphabet() != g.alphabet() {
                return Err(invalid("measure", "alphabet differs from the system's"));
            }
        }
        Ok(())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let system = build(&self.system).map_err(|e| e.1)?;
        let g = generator(&system, "mtp").map_err(|e| e.1)?;
        let measure = match &self.measure {
            Some(m) => m.build().map_err(|e| e.to_string())?,
            None => g.measure(),
        };
        let d = EstimateOptions::default();
        let options = EstimateOptions {
            chunk_size: self.chunk_size.unwrap_or(d.chunk_size),
            budget: self.budget.unwrap_or(d.budget),
        };
        if self.balance {
            let b = backward_balance_check(g, &measure, self.samples, self.seed, &options).map_err(|e| e.to_string())?;
            let mut table = Table::new(&["system", "samples", "mean", "standard_error", "above", "equal", "below"]);
            table.push(vec![
                b.system.clone(),
                b.samples.to_string(),
                b.value.mean.to_string(),
                b.value.standard_error.to_string(),
                b.fraction_above.to_string(),
                b.fraction_equal.to_string(),
                b.fraction_below.to_string(),
            ]);
            return Ok(TaskOutput {
                json: to_json(&b),
                table,
                classification: None,
            });
        }
        let kernel = TransportKernel {
            kind: self.kernel.clone(),
            convention: self.convention,
        };
        let e = estimate_mtp(g, &measure, &kernel, self.samples, self.seed, &options).map_err(|e| e.to_string())?;
        let mut table = Table::new(&[
            "system",
            "kernel",
            "samples",
            "excluded",
            "sent_mean",
            "sent_se",
            "received_mean",
            "received_se",
        ]);
        table.push(vec![
            e.system.clone(),
            e.kernel.clone(),
            e.samples.to_string(),
            e.excluded.to_string(),
            e.sent.mean.to_string(),
            e.sent.standard_error.to_string(),
            e.received.mean.to_string(),
            e.received.standard_error.to_string(),
        ]);
        let mut json = to_json(&e);
        json["balance_z"] = json!(e.balance_z());
        Ok(TaskOutput {
            json,
            table,
            classification: None,
        })
    }
}

/// Finite-tree combinatorics on a tree file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeTask {
    /// Path to a tree file, relative to the plan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Inline tree file contents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    /// Start vertex for the lex-least path to the marked set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<u32>,
    /// Mass bound for pruning around the marked set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Weight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl TreeTask {
    pub(super) fn validate(&self) -> Result<(), Invalid> {
        match (&self.file, &self.document) {
            (Some(_), None) => Ok(()),
            (None, Some(doc)) => parse_tree_document(doc).map(|_| ()).map_err(|e| invalid("document", e)),
            _ => Err(invalid("file", "give exactly one of `file` and `document`")),
        }
    }

    pub(super) fn run(&self, base_dir: &Path) -> Result<TaskOutput, String> {
        let text = match (&self.file, &self.document) {
            (Some(f), None) => {
                let path = base_dir.join(f);
                std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?
            }
            (None, Some(d)) => d.clone(),
            _ => return Err("give exactly one of `file` and `document`".into()),
        };
        let doc = parse_tree_document(&text).map_err(|e| e.to_string())?;
        let tree = &doc.tree;
        let err = |e: crate::tree::TreeError| e.to_string();
        let mut table = Table::new(&["origin", "terminus", "half_space_size"]);
        let mut half_spaces = Vec::new();
        for e in &doc.arcs {
            let h = tree.half_space(e).map_err(err)?;
            table.push(vec![e.origin.to_string(), e.terminus.to_string(), h.len().to_string()]);
            half_spaces.push(json!({"arc": e, "half_space": h}));
        }
        let coherent = is_coherent(tree, &doc.arcs).map_err(err)?;
        let transversal = if coherent {
            to_json(&coherent_transversal(tree, &doc.arcs).map_err(err)?)
        } else {
            serde_json::Value::Null
        };
        let helly = if doc.family.is_empty() {
            serde_json::Value::Null
        } else {
            match helly_common_vertex(tree, &doc.family) {
                Ok(v) => json!({"vertex": v}),
                Err(e) => json!({"error": e.to_string()}),
            }
        };
        let hull: BTreeSet<u32> = convex_hull(tree, &doc.marks);
        let path = match self.from {
            Some(x) => match lex_least_path(tree, &doc.coloring, &x, &doc.marks) {
                Ok(p) => json!(p),
                Err(e) => json!({"error": e.to_string()}),
            },
            None => serde_json::Value::Null,
        };
        let pruned = match &self.bound {
            Some(bound) if !doc.marks.is_empty() => to_json(&prune_rho_finite(tree, &doc.weights, &hull, bound).map_err(err)?),
            _ => serde_json::Value::Null,
        };
        Ok(TaskOutput {
            json: json!({
                "vertices": tree.vertex_count(),
                "edges": tree.edges().len(),
                "half_spaces": half_spaces,
                "coherent": coherent,
                "transversal": transversal,
                "helly": helly,
                "hull": hull,
                "lex_least_path": path,
                "pruned": pruned,
            }),
            table,
            classification: None,
        })
    }
}

/// Boundary samples from stabilized random walks on a free group. Walk `i`
/// uses seed `seed + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkTask {
    pub d: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<BTreeMap<String, String>>,
    pub samples: u64,
    pub seed: u64,
    pub window: u64,
    pub min_len: usize,
    pub max_steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl WalkTask {
    fn step_law(&self) -> Result<Vec<BigRational>, SystemError> {
        match &self.m {
            Some(m) => parse_step_law(self.d, m),
            None => match GeneratorSystem::free_boundary_uniform(self.d)? {
                GeneratorSystem::FreeBoundary { m, .. } => Ok(m),
                _ => unreachable!(),
            },
        }
    }

    pub(super) fn validate(&self) -> Result<(), Invalid> {
        let m = self.step_law().map_err(|e| invalid("m", e))?;
        GeneratorSystem::free_boundary(self.d, m).map_err(|e| invalid("m", e))?;
        Ok(())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let m = self.step_law().map_err(|e| e.to_string())?;
        let alphabet = Alphabet::FreeGroup(self.d);
        let mut table = Table::new(&["sample", "prefix", "steps", "distance", "speed"]);
        let mut rows = Vec::new();
        let mut first = vec![0u64; alphabet.size()];
        for i in 0..self.samples {
            let w = random_walk_boundary_sample(
                self.d,
                &m,
                self.seed.wrapping_add(i),
                self.window,
                self.min_len,
                self.max_steps,
            )
            .map_err(|e| e.to_string())?;
            first[w.prefix[0] as usize] += 1;
            let prefix = alphabet.render(&w.prefix);
            table.push(vec![
                i.to_string(),
                prefix.clone(),
                w.steps.to_string(),
                w.distance.to_string(),
                w.speed().to_string(),
            ]);
            rows.push(json!({"prefix": prefix, "steps": w.steps, "distance": w.distance, "speed": w.speed()}));
        }
        let freq: BTreeMap<String, f64> = first
            .iter()
            .enumerate()
            .map(|(s, &c)| (alphabet.symbol_char(s as u8).to_string(), c as f64 / self.samples.max(1) as f64))
            .collect();
        Ok(TaskOutput {
            json: json!({"d": self.d, "seed": self.seed, "samples": rows, "first_letter_frequencies": freq}),
            table,
            classification: None,
        })
    }
}

/// Checks the tilde-expansion bound `ρ^x(f(r_{g,X_n}(x))) ≤ 2^{-n}` and the
/// added masses `μ_n(X_n)` on given or sampled points. Sampled point `i` is
/// drawn as in the mass-transport engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandTask {
    pub system: SystemDescriptor,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDescriptor>,
    #[serde(default)]
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExpandTask {
    fn tilde(&self) -> Result<TildeSystem, Invalid> {
        match build(&self.system)? {
            BuiltSystem::Tilde(t) => Ok(t),
            BuiltSystem::Generator(_) => Err(invalid("system", "expand needs a tilde_expansion system")),
        }
    }

    pub(super) fn validate(&self) -> Result<(), Invalid> {
        let t = self.tilde()?;
        for (i, p) in self.points.iter().enumerate() {
            let field = format!("points[{i}]");
            if p.tag.is_some() {
                return Err(invalid(&field, "expand takes base points"));
            }
            let x = p.symbolic(t.base().alphabet()).map_err(|e| invalid(&field, e))?;
            t.base().validate_point(&x).map_err(|e| invalid(&field, e))?;
        }
        if self.samples > 0 && self.seed.is_none() {
            return Err(invalid("seed", "sampled points need a seed"));
        }
        Ok(())
    }

    pub(super) fn run(&self) -> Result<TaskOutput, String> {
        let t = self.tilde().map_err(|e| e.1)?;
        let budget = self.budget.unwrap_or(1 << 20);
        let mut maxima: Vec<Option<BigRational>> = vec![None; self.levels + 1];
        let mut record = |x: &dyn Fn(usize) -> Result<BigRational, SystemError>| -> Result<(), String> {
            for (n, m) in maxima.iter_mut().enumerate() {
                let w = x(n).map_err(|e| e.to_string())?;
                if m.as_ref().is_none_or(|m| &w > m) {
                    *m = Some(w);
                }
            }
            Ok(())
        };
        for p in &self.points {
            let x = p.symbolic(t.base().alphabet()).map_err(|e| e.to_string())?;
            record(&|n| t.retraction_weight(&x, n, budget))?;
        }
        let measure = t.base().measure();
        for i in 0..self.samples {
            let x = sample(&measure, self.seed.unwrap_or_default(), i).map_err(|e| e.to_string())?;
            record(&|n| retraction_weight_local(&t, &x, n, budget))?;
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut rows = Vec::new();
        let mut all_hold = true;
        let mut table = Table::series();
        let mut bounds = Vec::new();
        let mut added = Vec::new();
        let mut maxv = Vec::new();
        for (n, m) in maxima.iter().enumerate() {
            let bound = ratio_pow(&half, n as i64);
            let mu = t.added_measure(n);
            let holds = m.as_ref().is_none_or(|m| m <= &bound) && mu <= bound;
            all_hold &= holds;
            rows.push(json!({
                "n": n,
                "max_weight": m.as_ref().map(ratio_string),
                "bound": ratio_string(&bound),
                "added_measure": ratio_string(&mu),
                "holds": holds,
            }));
            if let Some(m) = m {
                maxv.push(m.clone());
            }
            bounds.push(bound);
            added.push(mu);
        }
        table.push_series("max_weight", &maxv);
        table.push_series("bound", &bounds);
        table.push_series("added_measure", &added);
        Ok(TaskOutput {
            json: json!({
                "system": TreeSystem::<TildePoint<SymbolicPoint>>::name(&t),
                "points": self.points.len() as u64 + self.samples,
                "levels": rows,
                "all_hold": all_hold,
            }),
            table,
            classification: None,
        })
    }
}

fn retraction_weight_local<P: Sequence>(t: &TildeSystem, x: &P, n: usize, budget: usize) -> Result<BigRational, SystemError> {
    t.retraction_weight(x, n, budget)
}
