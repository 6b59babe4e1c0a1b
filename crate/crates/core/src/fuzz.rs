//! Deterministic fuzz campaigns over generated fans.
//!
//! Instance `i` of a campaign draws from `ChaCha8Rng` seeded with the
//! campaign seed on stream `i`, so instances are independent of evaluation
//! order and thread count.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{
    bundle_closure_check, contraction_checks, recognition_invariance_check, rho_one_checks,
    CheckOutcome, CheckStatus,
};
use crate::classify::{build_weighted_projective, p112_weights};
use crate::contraction::{
    analyze_contraction, build_bundle_fan, fiber_rays, non_saturated_fibration,
};
use crate::error::{Error, Result};
use crate::fan::{hirzebruch, product, projective_space, validate_fan, Fan};
use crate::io::{serialize_fan, write_fan};
use crate::lattice::IntMatrix;
use crate::mori::{mori_cone, ContractionKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzMode {
    Bundle,
    Ex32Like,
    WeightedProjective,
    Mixed,
}

impl FromStr for FuzzMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bundle" => Ok(FuzzMode::Bundle),
            "ex32-like" => Ok(FuzzMode::Ex32Like),
            "weighted-projective" => Ok(FuzzMode::WeightedProjective),
            "mixed" => Ok(FuzzMode::Mixed),
            other => Err(Error::Argument(format!(
                "unknown fuzz mode {other:?} (bundle, ex32-like, weighted-projective, mixed)"
            ))),
        }
    }
}

impl fmt::Display for FuzzMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FuzzMode::Bundle => "bundle",
            FuzzMode::Ex32Like => "ex32-like",
            FuzzMode::WeightedProjective => "weighted-projective",
            FuzzMode::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on the dimension of generated fans.
    pub dim: usize,
    pub mode: FuzzMode,
}

impl FuzzConfig {
    pub fn new(seed: u64, count: usize, dim: usize, mode: FuzzMode) -> Result<Self> {
        if !(2..=6).contains(&dim) {
            return Err(Error::Argument(format!(
                "dimension bound {dim} outside 2..=6"
            )));
        }
        Ok(FuzzConfig {
            seed,
            count,
            dim,
            mode,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    /// Output of the bundle constructor with lifts that keep every chart
    /// trivial: a smooth base, or zero lifts.
    Bundle { label: String, fan: Fan },
    /// Fibration over a singular base with arbitrary lifts, or a member of
    /// the non-saturated family; only the implications are asserted.
    Twisted { label: String, fan: Fan },
    /// Weighted projective space together with a unimodular conjugation.
    WeightedProjective {
        label: String,
        fan: Fan,
        conjugation: IntMatrix,
    },
}

impl Instance {
    pub fn label(&self) -> &str {
        match self {
            Instance::Bundle { label, .. }
            | Instance::Twisted { label, .. }
            | Instance::WeightedProjective { label, .. } => label,
        }
    }

    pub fn fan(&self) -> &Fan {
        match self {
            Instance::Bundle { fan, .. }
            | Instance::Twisted { fan, .. }
            | Instance::WeightedProjective { fan, .. } => fan,
        }
    }

    fn with_fan(&self, fan: Fan) -> Instance {
        let label = self.label().to_string();
        match self {
            Instance::Bundle { .. } => Instance::Bundle { label, fan },
            Instance::Twisted { .. } => Instance::Twisted { label, fan },
            Instance::WeightedProjective { conjugation, .. } => Instance::WeightedProjective {
                label,
                fan,
                conjugation: conjugation.clone(),
            },
        }
    }
}

pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// The `index`-th instance of a campaign.
pub fn generate_instance(config: &FuzzConfig, index: usize) -> Result<Instance> {
    let mut rng = instance_rng(config.seed, index);
    let mode = match config.mode {
        FuzzMode::Mixed => [
            FuzzMode::Bundle,
            FuzzMode::Ex32Like,
            FuzzMode::WeightedProjective,
        ][index % 3],
        m => m,
    };
    match mode {
        FuzzMode::Bundle => random_bundle(&mut rng, config.dim),
        FuzzMode::Ex32Like => random_twisted(&mut rng, config.dim),
        _ => random_weighted(&mut rng, config.dim.min(5)),
    }
}

fn random_lifts(rng: &mut ChaCha8Rng, base: &Fan, d: usize) -> Vec<Vec<i64>> {
    (0..base.num_rays())
        .map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect())
        .collect()
}

/// A smooth projective base of dimension `k`, with a label.
fn smooth_base(rng: &mut ChaCha8Rng, k: usize) -> Result<(Fan, String)> {
    let choice = rng.gen_range(0..4);
    Ok(match (choice, k) {
        (1, 2) => {
            let a = rng.gen_range(0..=3);
            (hirzebruch(a), format!("F_{a}"))
        }
        (2, k) if k >= 2 => {
            let a = rng.gen_range(1..k);
            (
                product(&projective_space(a), &projective_space(k - a)),
                format!("P^{a} x P^{}", k - a),
            )
        }
        (3, k) if k >= 2 => {
            let lifts = random_lifts(rng, &projective_space(1), k - 1);
            let fan = build_bundle_fan(&projective_space(1), k - 1, &lifts)?;
            (fan, format!("P^{}-bundle over P^1 {lifts:?}", k - 1))
        }
        _ => (projective_space(k), format!("P^{k}")),
    })
}

/// Weighted projective base `P(1, w_1, ..., w_k)` with `w_i <= max_weight`.
fn weighted_base(rng: &mut ChaCha8Rng, k: usize, max_weight: u64) -> (Fan, Vec<u64>) {
    loop {
        let mut weights = vec![1u64];
        weights.extend((0..k).map(|_| rng.gen_range(1..=max_weight)));
        if let Ok(fan) = build_weighted_projective(&weights) {
            return (fan, weights);
        }
    }
}

fn split_dims(rng: &mut ChaCha8Rng, dim: usize) -> (usize, usize) {
    let n = rng.gen_range(2..=dim);
    let d = rng.gen_range(1..=(n - 1).min(3));
    (d, n - d)
}

fn random_bundle(rng: &mut ChaCha8Rng, dim: usize) -> Result<Instance> {
    let (d, k) = split_dims(rng, dim);
    let (fan, label) = if rng.gen_bool(0.8) {
        let (base, name) = smooth_base(rng, k)?;
        let lifts = random_lifts(rng, &base, d);
        (
            build_bundle_fan(&base, d, &lifts)?,
            format!("P^{d} over {name}, lifts {lifts:?}"),
        )
    } else {
        let (base, weights) = weighted_base(rng, k, 3);
        let lifts = vec![vec![0; d]; base.num_rays()];
        (
            build_bundle_fan(&base, d, &lifts)?,
            format!("P^{d} x P{weights:?}"),
        )
    };
    Ok(Instance::Bundle { label, fan })
}

fn random_twisted(rng: &mut ChaCha8Rng, dim: usize) -> Result<Instance> {
    let (d, k) = split_dims(rng, dim);
    if rng.gen_bool(0.2) {
        let fan = non_saturated_fibration(d + k, d)?;
        return Ok(Instance::Twisted {
            label: format!("non-saturated family n = {}, d = {d}", d + k),
            fan,
        });
    }
    let (base, weights) = weighted_base(rng, k, 3);
    let lifts = random_lifts(rng, &base, d);
    let fan = build_bundle_fan(&base, d, &lifts)?;
    Ok(Instance::Twisted {
        label: format!("P^{d} over P{weights:?}, lifts {lifts:?}"),
        fan,
    })
}

/// Product of random elementary matrices, entries bounded by `bound`.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..3 * n {
        let mut next = m.clone();
        match rng.gen_range(0..3) {
            0 if n > 1 => {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n - 1));
                let j = if j >= i { j + 1 } else { j };
                let factor = [-2, -1, 1, 2].choose(rng).copied().unwrap_or(1);
                next.add_row_multiple(i, j, &factor.into());
            }
            1 if n > 1 => next.swap_rows(rng.gen_range(0..n), rng.gen_range(0..n)),
            _ => next.negate_row(rng.gen_range(0..n)),
        }
        if next.entries().iter().all(|x| x.abs() <= bound.into()) {
            m = next;
        }
    }
    debug_assert!(m.determinant().is_ok_and(|d| d.abs().is_one()));
    m
}

fn random_weighted(rng: &mut ChaCha8Rng, dim: usize) -> Result<Instance> {
    let n = rng.gen_range(2..=dim);
    // the two extremal cases of the length bound would almost never be drawn
    let (fan, weights) = match rng.gen_range(0..10) {
        0 => (projective_space(n), vec![1; n + 1]),
        1 => {
            let w = p112_weights(n);
            (build_weighted_projective(&w)?, w)
        }
        _ => weighted_base(rng, n, 6),
    };
    let conjugation = random_unimodular(rng, n, 3);
    let conjugated = fan.transform(&conjugation)?;
    Ok(Instance::WeightedProjective {
        label: format!("P{weights:?}"),
        fan: conjugated,
        conjugation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    /// Not analyzable (for instance not projective); no checks ran.
    Skipped(String),
    Checked {
        outcomes: Vec<CheckOutcome>,
        /// Analyzed fiber-type contractions that are, resp. are not, `P^d`-bundles.
        bundles: usize,
        non_bundles: usize,
    },
}

impl Evaluation {
    fn checked(outcomes: Vec<CheckOutcome>) -> Self {
        Evaluation::Checked {
            outcomes,
            bundles: 0,
            non_bundles: 0,
        }
    }
}

fn is_constructed_fiber(fan: &Fan, fiber: &[usize]) -> bool {
    let n = fan.dim();
    let mut e1 = vec![0; n];
    e1[0] = 1;
    fan.ray_index(&e1).is_some_and(|i| fiber.contains(&i))
}

/// Runs every applicable check on one instance.
pub fn evaluate(instance: &Instance) -> Evaluation {
    match evaluate_inner(instance) {
        Ok(e) => e,
        Err(Error::NotProjective) => Evaluation::Skipped("not projective".into()),
        Err(e) => Evaluation::checked(vec![CheckOutcome {
            name: "pipeline",
            status: CheckStatus::Fail,
            detail: e.to_string(),
        }]),
    }
}

fn evaluate_inner(instance: &Instance) -> Result<Evaluation> {
    let fan = instance.fan();
    if !validate_fan(fan).is_valid() || !fan.is_complete() {
        return Ok(Evaluation::Skipped("invalid or incomplete".into()));
    }
    if let Instance::WeightedProjective { conjugation, .. } = instance {
        let mut out = rho_one_checks(fan)?;
        out.push(recognition_invariance_check(fan, conjugation)?);
        return Ok(Evaluation::checked(out));
    }
    let nc = mori_cone(fan)?;
    let mut out = Vec::new();
    let mut constructed = false;
    let (mut bundles, mut non_bundles) = (0, 0);
    for (_, ray) in nc.rays_of_kind(ContractionKind::Fiber) {
        let fiber = match fiber_rays(fan, ray) {
            Ok(f) => f,
            Err(Error::NotFanoContraction(msg)) => {
                out.push(structure_failure(msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        if fiber.len() == fan.dim() + 1 {
            continue;
        }
        let data = match analyze_contraction(fan, ray) {
            Ok(data) => data,
            Err(Error::NotFanoContraction(msg)) => {
                out.push(structure_failure(msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        out.extend(contraction_checks(fan, ray, &data)?);
        if data.is_bundle {
            bundles += 1;
        } else {
            non_bundles += 1;
        }
        if is_constructed_fiber(fan, &fiber) {
            constructed = true;
            if matches!(instance, Instance::Bundle { .. }) {
                out.push(bundle_closure_check(&data));
            }
        }
    }
    if !constructed {
        out.push(CheckOutcome {
            name: "constructed-ray-extremal",
            status: CheckStatus::Fail,
            detail: "the fibration built by the generator is not an extremal fiber-type ray".into(),
        });
    }
    Ok(Evaluation::Checked {
        outcomes: out,
        bundles,
        non_bundles,
    })
}

fn structure_failure(detail: String) -> CheckOutcome {
    CheckOutcome {
        name: "contraction-structure",
        status: CheckStatus::Fail,
        detail,
    }
}

fn failed_names(e: &Evaluation) -> Vec<&'static str> {
    match e {
        Evaluation::Skipped(_) => Vec::new(),
        Evaluation::Checked { outcomes: c, .. } => {
            c.iter().filter(|o| o.failed()).map(|o| o.name).collect()
        }
    }
}

/// Greedy shrinking: drop maximal cones, then rays with their cones, while
/// the fan stays valid and the named check still fails.
pub fn minimize(instance: &Instance, check: &str) -> Instance {
    let still_fails = |candidate: &Instance| failed_names(&evaluate(candidate)).contains(&check);
    let mut current = instance.clone();
    loop {
        let fan = current.fan().clone();
        let rays: Vec<Vec<i64>> = fan.rays().iter().map(|r| r.coords().to_vec()).collect();
        let cones: Vec<Vec<usize>> = fan
            .max_cones()
            .iter()
            .map(|c| c.indices().to_vec())
            .collect();
        let mut candidates: Vec<Fan> = Vec::new();
        for k in 0..cones.len() {
            let mut rest = cones.clone();
            rest.remove(k);
            if let Ok(f) = Fan::new(fan.dim(), rays.clone(), rest) {
                candidates.push(f);
            }
        }
        for r in 0..rays.len() {
            let rest: Vec<Vec<usize>> = cones
                .iter()
                .filter(|c| !c.contains(&r))
                .map(|c| c.iter().map(|&i| if i > r { i - 1 } else { i }).collect())
                .collect();
            let mut fewer = rays.clone();
            fewer.remove(r);
            if let Ok(f) = Fan::new(fan.dim(), fewer, rest) {
                candidates.push(f);
            }
        }
        let next = candidates
            .into_iter()
            .filter(|f| !f.max_cones().is_empty() && validate_fan(f).is_valid())
            .map(|f| current.with_fan(f))
            .find(|c| still_fails(c));
        match next {
            Some(smaller) => current = smaller,
            None => return current,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub index: usize,
    pub label: String,
    pub check: String,
    pub detail: String,
    /// Canonical JSON of the minimized counterexample.
    pub fan: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub evaluated: usize,
    pub skipped: usize,
    pub bundles: usize,
    pub non_bundles: usize,
    pub checks: BTreeMap<String, Tally>,
    pub failures: Vec<Failure>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn tally(&self, name: &str) -> Tally {
        self.checks.get(name).cloned().unwrap_or_default()
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "mode {}, seed {}, count {}, dim <= {}: {} evaluated, {} skipped",
            c.mode, c.seed, c.count, c.dim, self.evaluated, self.skipped
        );
        if self.bundles + self.non_bundles > 0 {
            let _ = writeln!(
                s,
                "fiber contractions: {} bundles, {} not bundles",
                self.bundles, self.non_bundles
            );
        }
        let width = self.checks.keys().map(String::len).max().unwrap_or(0);
        for (name, t) in &self.checks {
            let _ = writeln!(
                s,
                "  {name:<width$}  pass {:>5}  fail {:>3}  vacuous {:>5}",
                t.pass, t.fail, t.vacuous
            );
        }
        for f in &self.failures {
            let _ = writeln!(
                s,
                "FAIL #{} {} [{}]: {}",
                f.index, f.check, f.label, f.detail
            );
            let _ = write!(s, "  minimized: {}", f.fan);
        }
        let _ = writeln!(s, "{} failure(s)", self.failures.len());
        s
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }

    /// Writes one fan file per failure; returns the paths written.
    pub fn write_counterexamples(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut paths = Vec::new();
        for f in &self.failures {
            let path = dir.join(format!(
                "counterexample-{}-{}-{}.json",
                self.config.seed, f.index, f.check
            ));
            let fan = crate::io::parse_fan(&f.fan)?;
            write_fan(&fan, &path)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Evaluates the instances in parallel and assembles the summary in index order.
pub fn run_campaign(config: &FuzzConfig) -> Result<FuzzSummary> {
    let results: Vec<(Instance, Evaluation)> = (0..config.count)
        .into_par_iter()
        .map(|i| {
            let instance = generate_instance(config, i)?;
            let evaluation = evaluate(&instance);
            Ok((instance, evaluation))
        })
        .collect::<Result<_>>()?;

    let mut summary = FuzzSummary {
        config: *config,
        evaluated: 0,
        skipped: 0,
        bundles: 0,
        non_bundles: 0,
        checks: BTreeMap::new(),
        failures: Vec::new(),
    };
    for (index, (instance, evaluation)) in results.iter().enumerate() {
        let Evaluation::Checked {
            outcomes,
            bundles,
            non_bundles,
        } = evaluation
        else {
            summary.skipped += 1;
            continue;
        };
        summary.evaluated += 1;
        summary.bundles += bundles;
        summary.non_bundles += non_bundles;
        for o in outcomes {
            let t = summary.checks.entry(o.name.to_string()).or_default();
            match o.status {
                CheckStatus::Pass => t.pass += 1,
                CheckStatus::Fail => t.fail += 1,
                CheckStatus::Vacuous => t.vacuous += 1,
            }
        }
        for o in outcomes.iter().filter(|o| o.failed()).unique_by(|o| o.name) {
            let small = minimize(instance, o.name);
            summary.failures.push(Failure {
                index,
                label: instance.label().to_string(),
                check: o.name.to_string(),
                detail: o.detail.clone(),
                fan: serialize_fan(small.fan()),
            });
        }
    }
    Ok(summary)
}
