//! Full analysis pipeline and its report, as text or JSON.
//!
//! All rationals are rendered as exact `p/q` strings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::checks::{contraction_checks, rho_one_checks, CheckOutcome, CheckStatus};
use crate::classify::{is_projective_space, recognize_p112, rho_one_check, Rho1Verdict};
use crate::contraction::{analyze_contraction, ContractionData};
use crate::error::{Error, Result};
use crate::fan::{validate_fan, Fan};
use crate::lattice::fraction;
use crate::mori::{mori_cone, ContractionKind, ExtremalRay};

#[derive(Clone, Debug, Serialize)]
pub struct FanSummary {
    pub dim: usize,
    pub rays: usize,
    pub max_cones: usize,
    pub rho: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub complete: bool,
    pub projective: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayRow {
    pub index: usize,
    pub kind: ContractionKind,
    pub length: String,
    pub member_walls: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartRow {
    /// Base cone as coordinates of its rays in `Z^{n-d}`.
    pub base_cone: Vec<Vec<i64>>,
    pub index: u64,
}

/// Machine-readable summary of one fiber-type contraction.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub ray: usize,
    pub kind: ContractionKind,
    pub length: String,
    pub d: usize,
    pub fiber_iso: String,
    pub base: String,
    pub fiber_rays: Vec<Vec<i64>>,
    pub charts: Vec<ChartRow>,
    pub is_bundle: bool,
    pub degree_test: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoOneSummary {
    pub length: String,
    pub verdict: Rho1Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScopedCheck {
    /// `rho-one` or `ray <k>`.
    pub scope: String,
    #[serde(flatten)]
    pub outcome: CheckOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub fan: FanSummary,
    pub validation: Validation,
    pub rho_one: Option<RhoOneSummary>,
    pub extremal_rays: Vec<RayRow>,
    pub contractions: Vec<ContractionReport>,
    pub checks: Vec<ScopedCheck>,
}

impl AnalysisReport {
    /// Input rejected before any Mori theory was attempted.
    pub fn validation_failed(&self) -> bool {
        !(self.validation.valid && self.validation.complete && self.validation.projective)
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| c.outcome.failed()).count()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.fan;
        let _ = writeln!(
            s,
            "fan: dim {}, {} rays, {} maximal cones, rho {}",
            f.dim, f.rays, f.max_cones, f.rho
        );
        let v = &self.validation;
        if v.valid {
            let _ = writeln!(s, "validation: ok");
        } else {
            let _ = writeln!(s, "validation: {} violation(s)", v.violations.len());
            for line in &v.violations {
                let _ = writeln!(s, "  {line}");
            }
        }
        if v.valid {
            let _ = writeln!(s, "complete: {}, projective: {}", v.complete, v.projective);
        }
        if let Some(r) = &self.rho_one {
            let _ = writeln!(
                s,
                "picard number one: length {}, verdict {}",
                r.length, r.verdict
            );
        }
        if !self.extremal_rays.is_empty() {
            let _ = writeln!(s, "extremal rays:");
            for r in &self.extremal_rays {
                let _ = writeln!(
                    s,
                    "  #{:<3} {:<10} length {:<6} walls {}",
                    r.index,
                    r.kind.to_string(),
                    r.length,
                    r.member_walls
                );
            }
        }
        for c in &self.contractions {
            let obstructed = obstructed_charts(c);
            let verdict = if c.is_bundle {
                format!("P^{}-bundle over {}", c.d, c.base)
            } else {
                format!(
                    "not a bundle: fiber {}, {obstructed} of {} charts obstructed",
                    c.fiber_iso,
                    c.charts.len()
                )
            };
            let _ = writeln!(
                s,
                "ray #{}: d = {}, length {}, {verdict}",
                c.ray, c.d, c.length
            );
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "checks:");
            for c in &self.checks {
                let _ = writeln!(
                    s,
                    "  [{}] {} {}: {}",
                    c.outcome.status, c.scope, c.outcome.name, c.outcome.detail
                );
            }
            let failed = self.failed_checks();
            let _ = writeln!(s, "{} checks, {failed} failed", self.checks.len());
        }
        s
    }
}

/// Short name of a complete fan: `P^k`, `P(1,1,2,...)` or a generic label.
pub fn describe_fan(fan: &Fan) -> String {
    if is_projective_space(fan) {
        format!("P^{}", fan.dim())
    } else if recognize_p112(fan) {
        "P(1,1,2,...)".into()
    } else {
        format!("a toric {}-fold with {} rays", fan.dim(), fan.num_rays())
    }
}

fn base_cone_coords(data: &ContractionData, cone: &crate::fan::Cone) -> Vec<Vec<i64>> {
    cone.indices()
        .iter()
        .map(|&i| data.base_fan.ray(i).coords().to_vec())
        .collect()
}

pub fn contraction_report(
    fan: &Fan,
    index: usize,
    ray: &ExtremalRay,
    data: &ContractionData,
) -> Result<ContractionReport> {
    let charts = data
        .charts
        .iter()
        .map(|c| {
            let index = u64::try_from(&c.witness.index)
                .map_err(|_| Error::Overflow(c.witness.index.to_string()))?;
            Ok(ChartRow {
                base_cone: base_cone_coords(data, &c.base_cone),
                index,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ContractionReport {
        ray: index,
        kind: ray.kind,
        length: fraction(&ray.length),
        d: data.d,
        fiber_iso: data.fiber_type.to_string(),
        base: describe_fan(&data.base_fan),
        fiber_rays: data
            .fiber_ray_indices
            .iter()
            .map(|&i| fan.ray(i).coords().to_vec())
            .collect(),
        charts,
        is_bundle: data.is_bundle,
        degree_test: data.degree_test,
    })
}

/// Analysis of the `k`-th extremal ray, which must be of fiber type with `d < n`.
pub fn contract(fan: &Fan, k: usize) -> Result<ContractionReport> {
    let nc = mori_cone(fan)?;
    let ray = nc.rays.get(k).ok_or_else(|| {
        Error::Argument(format!("no extremal ray #{k}; there are {}", nc.rays.len()))
    })?;
    let data = analyze_contraction(fan, ray)?;
    contraction_report(fan, k, ray, &data)
}

/// validate, then completeness and projectivity, then the Mori cone and
/// every applicable check.
pub fn analyze(fan: &Fan) -> Result<AnalysisReport> {
    let summary = FanSummary {
        dim: fan.dim(),
        rays: fan.num_rays(),
        max_cones: fan.max_cones().len(),
        rho: fan.picard_number(),
    };
    let validation = validate_fan(fan);
    let valid = validation.is_valid();
    let complete = valid && fan.is_complete();
    let projective = complete && fan.is_projective();
    let mut report = AnalysisReport {
        fan: summary,
        validation: Validation {
            valid,
            complete,
            projective,
            violations: validation
                .violations
                .iter()
                .map(ToString::to_string)
                .collect(),
        },
        rho_one: None,
        extremal_rays: Vec::new(),
        contractions: Vec::new(),
        checks: Vec::new(),
    };
    if report.validation_failed() {
        return Ok(report);
    }

    if fan.picard_number() == 1 {
        let r = rho_one_check(fan)?;
        report.rho_one = Some(RhoOneSummary {
            length: fraction(&r.length),
            verdict: r.verdict,
        });
        for outcome in rho_one_checks(fan)? {
            report.checks.push(ScopedCheck {
                scope: "rho-one".into(),
                outcome,
            });
        }
    }

    let nc = mori_cone(fan)?;
    for (k, ray) in nc.rays.iter().enumerate() {
        report.extremal_rays.push(RayRow {
            index: k,
            kind: ray.kind,
            length: fraction(&ray.length),
            member_walls: ray.member_walls.len(),
        });
        if ray.kind != ContractionKind::Fiber || fan.picard_number() == 1 {
            continue;
        }
        let scope = format!("ray {k}");
        match analyze_contraction(fan, ray) {
            Ok(data) => {
                report
                    .contractions
                    .push(contraction_report(fan, k, ray, &data)?);
                for outcome in contraction_checks(fan, ray, &data)? {
                    report.checks.push(ScopedCheck {
                        scope: scope.clone(),
                        outcome,
                    });
                }
            }
            Err(Error::NotFanoContraction(msg)) => report.checks.push(ScopedCheck {
                scope,
                outcome: CheckOutcome {
                    name: "contraction-structure",
                    status: CheckStatus::Fail,
                    detail: msg,
                },
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Number of charts with index above 1.
pub fn obstructed_charts(report: &ContractionReport) -> usize {
    report.charts.iter().filter(|c| c.index != 1).count()
}
