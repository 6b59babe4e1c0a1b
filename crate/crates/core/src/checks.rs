//! Falsifiable properties evaluated on every analyzed instance.
//!
//! Each check reports `pass`, `fail` or `vacuous` (hypothesis not met). A
//! failure on a genuine fan is either a bug here or a counterexample.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::classify::{
    is_projective_space, is_projective_space_by_isomorphism, recognize_p112, rho_one_check,
    ClauseOutcome,
};
use crate::contraction::{member_fiber_dimensions, ContractionData, FiberType};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::intersection::{curve_class, divisor_curve_degree};
use crate::lattice::{elementary_divisors, fraction, IntMatrix};
use crate::mori::ExtremalRay;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Vacuous,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Vacuous => "vacuous",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, status: CheckStatus, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            status,
            detail: detail.into(),
        }
    }

    fn verdict(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self::new(name, status, detail)
    }

    fn implication(
        name: &'static str,
        hypothesis: bool,
        conclusion: bool,
        detail: impl Into<String>,
    ) -> Self {
        let status = match ClauseOutcome::implication(hypothesis, conclusion) {
            ClauseOutcome::Holds => CheckStatus::Pass,
            ClauseOutcome::Vacuous => CheckStatus::Vacuous,
            ClauseOutcome::Violated => CheckStatus::Fail,
        };
        Self::new(name, status, detail)
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// All contraction properties for one fiber-type ray.
pub fn contraction_checks(
    fan: &Fan,
    ray: &ExtremalRay,
    data: &ContractionData,
) -> Result<Vec<CheckOutcome>> {
    let d = data.d;
    let pd = data.fiber_type == FiberType::ProjectiveSpace;
    let half = int(d + 1) / int(2);
    let mut out = Vec::new();

    let all_above_half = data.member_degrees.iter().all(|k| *k > half);
    out.push(CheckOutcome::implication(
        "bundle-criterion",
        pd && all_above_half,
        data.is_bundle,
        format!(
            "fiber {}, min -K.C = {} vs (d+1)/2 = {}, is_bundle = {}",
            data.fiber_type,
            fraction(&data.length),
            fraction(&half),
            data.is_bundle
        ),
    ));

    let long = data.length > int(d);
    out.push(CheckOutcome::implication(
        "length-criterion",
        long,
        data.is_bundle && pd && data.fiber_length == data.length,
        format!(
            "l(R) = {}, d = {d}, fiber length {}, is_bundle = {}",
            fraction(&data.length),
            fraction(&data.fiber_length),
            data.is_bundle
        ),
    ));

    let trivial = data.all_charts_trivial();
    out.push(CheckOutcome::implication(
        "degree-chart-equivalence",
        pd,
        trivial == data.degree_test,
        format!(
            "charts trivial = {trivial}, degree test = {}",
            data.degree_test
        ),
    ));

    out.push(chart_minor_check(fan, data)?);
    out.push(anticanonical_split_check(fan, data)?);

    let dims = member_fiber_dimensions(fan, ray)?;
    out.push(CheckOutcome::verdict(
        "fiber-dimension-constant",
        dims.iter().all(|&k| k == d),
        format!("member wall fiber dimensions {dims:?}, d = {d}"),
    ));

    out.push(CheckOutcome::verdict(
        "length-bound",
        data.length <= int(d + 1) && data.length.is_positive(),
        format!("0 < l(R) = {} <= d+1 = {}", fraction(&data.length), d + 1),
    ));
    Ok(out)
}

/// Closure of the bundle constructor: a genuine bundle with `l(R) = d+1`.
pub fn bundle_closure_check(data: &ContractionData) -> CheckOutcome {
    CheckOutcome::verdict(
        "bundle-closure",
        data.is_bundle && data.length == int(data.d + 1),
        format!(
            "is_bundle = {}, l(R) = {}, d = {}",
            data.is_bundle,
            fraction(&data.length),
            data.d
        ),
    )
}

/// Local computation in the normal form `v_i = e_i`, `v_{d+1} = -(e_1+...+e_d)`.
///
/// For each chart with horizontal rays `y_j = (b_j, a_j)` and each fiber ray
/// `v_r`, the reduced matrix stacks row `r` of `B` on `A`. Its elementary
/// divisor product `α` is `mult(σ ∖ v_r)`, `β = |det A|` is `mult(σ)`, and
/// `D_{v_r} · C = α/β`. The chart is trivial iff `B · A^{-1}` is integral,
/// which must agree with the saturation index.
fn chart_minor_check(fan: &Fan, data: &ContractionData) -> Result<CheckOutcome> {
    const NAME: &str = "alpha-divides-beta";
    let Some(normal) = data.normal_form(fan) else {
        return Ok(CheckOutcome::new(
            NAME,
            CheckStatus::Vacuous,
            "fiber is not P^d",
        ));
    };
    let n = fan.dim();
    let d = data.d;
    let walls = fan.walls()?;
    for chart in &data.charts {
        let ys = chart.witness.horizontal_rays.indices();
        let columns: Vec<Vec<BigInt>> = ys
            .iter()
            .map(|&y| normal.apply(fan.ray(y).coords()))
            .collect();
        let full = IntMatrix::from_big_columns(n, &columns);
        let upper: Vec<usize> = (0..d).collect();
        let lower: Vec<usize> = (d..n).collect();
        let all: Vec<usize> = (0..n - d).collect();
        let a = full.select(&lower, &all);
        let b = full.select(&upper, &all);
        let beta = a.determinant()?.abs();
        if beta.is_zero() {
            return Err(Error::Invariant(format!(
                "chart {} is degenerate",
                chart.base_cone
            )));
        }

        let mut sigma: Vec<usize> = ys.to_vec();
        sigma.extend_from_slice(&data.fiber_ray_indices[..d]);
        let sigma = Cone::new(sigma);
        let mut all_equal = true;
        for r in 0..d {
            let mut rows = vec![r];
            rows.extend(d..n);
            let alpha: BigInt = elementary_divisors(&full.select(&rows, &all))
                .iter()
                .product();
            if !beta.is_multiple_of(&alpha) {
                return Ok(CheckOutcome::new(
                    NAME,
                    CheckStatus::Fail,
                    format!(
                        "chart {}: alpha = {alpha} does not divide beta = {beta}",
                        chart.base_cone
                    ),
                ));
            }
            all_equal &= alpha == beta;
            let v = data.fiber_ray_indices[r];
            let tau = sigma.without(v);
            let wall = walls
                .iter()
                .find(|w| w.tau == tau)
                .ok_or_else(|| Error::Invariant(format!("face {tau} is not a wall")))?;
            let degree = divisor_curve_degree(fan, v, wall)?;
            let ratio = BigRational::new(alpha.clone(), beta.clone());
            if degree != ratio {
                return Ok(CheckOutcome::new(
                    NAME,
                    CheckStatus::Fail,
                    format!(
                        "chart {}: D.C = {} but alpha/beta = {}",
                        chart.base_cone,
                        fraction(&degree),
                        fraction(&ratio)
                    ),
                ));
            }
        }

        // B adj(A) ≡ 0 mod det A  <=>  B A^{-1} integral
        let det = a.determinant()?;
        let lifted = b.mul(&a.adjugate()?)?;
        let integral = lifted.entries().iter().all(|x| x.is_multiple_of(&det));
        let trivial = chart.witness.is_trivial();
        if integral != trivial || all_equal != trivial {
            return Ok(CheckOutcome::new(
                NAME,
                CheckStatus::Fail,
                format!(
                    "chart {}: index {}, cofactor integrality {integral}, alpha = beta {all_equal}",
                    chart.base_cone, chart.witness.index
                ),
            ));
        }
    }
    Ok(CheckOutcome::new(
        NAME,
        CheckStatus::Pass,
        format!("{} charts, d = {d}", data.charts.len()),
    ))
}

/// With a `P^d` fiber every member wall has `D_{v_i} · C` independent of `i`
/// and `-K · C = (d+1) D_{v_i} · C`.
fn anticanonical_split_check(fan: &Fan, data: &ContractionData) -> Result<CheckOutcome> {
    const NAME: &str = "anticanonical-split";
    if data.fiber_type != FiberType::ProjectiveSpace {
        return Ok(CheckOutcome::new(
            NAME,
            CheckStatus::Vacuous,
            "fiber is not P^d",
        ));
    }
    let walls = fan.walls()?;
    for (&k, minus_k) in data.member_walls.iter().zip(&data.member_degrees) {
        let class = curve_class(fan, &walls[k])?;
        let first = &class.degrees[data.fiber_ray_indices[0]];
        let uniform = data
            .fiber_ray_indices
            .iter()
            .all(|&v| &class.degrees[v] == first);
        if !uniform || *minus_k != first * int(data.d + 1) {
            return Ok(CheckOutcome::new(
                NAME,
                CheckStatus::Fail,
                format!(
                    "wall {}: -K.C = {}, D_v.C = {}",
                    walls[k].tau,
                    fraction(minus_k),
                    fraction(first)
                ),
            ));
        }
    }
    Ok(CheckOutcome::new(
        NAME,
        CheckStatus::Pass,
        format!("{} member walls", data.member_walls.len()),
    ))
}

/// Both length characterizations for Picard number one, plus agreement of
/// the two projective-space recognizers.
pub fn rho_one_checks(fan: &Fan) -> Result<Vec<CheckOutcome>> {
    let report = rho_one_check(fan)?;
    let n = report.dim;
    let status = |c: ClauseOutcome| match c {
        ClauseOutcome::Holds => CheckStatus::Pass,
        ClauseOutcome::Vacuous => CheckStatus::Vacuous,
        ClauseOutcome::Violated => CheckStatus::Fail,
    };
    let detail = format!(
        "l(R) = {}, n = {n}, verdict {}",
        fraction(&report.length),
        report.verdict
    );
    Ok(vec![
        CheckOutcome::new(
            "rho-one-exceeds-dim",
            status(report.exceeds_dim),
            detail.clone(),
        ),
        CheckOutcome::new("rho-one-reaches-dim", status(report.reaches_dim), detail),
        CheckOutcome::verdict(
            "projective-space-agreement",
            is_projective_space(fan) == is_projective_space_by_isomorphism(fan),
            "multiplicity criterion vs explicit isomorphism",
        ),
    ])
}

/// Recognizers must not depend on the chosen basis of the lattice.
pub fn recognition_invariance_check(fan: &Fan, m: &IntMatrix) -> Result<CheckOutcome> {
    if !m.determinant()?.abs().is_one() {
        return Err(Error::Argument(
            "conjugating matrix is not unimodular".into(),
        ));
    }
    let image = fan.transform(m)?;
    let same_pn = is_projective_space(fan) == is_projective_space(&image);
    let same_p112 = recognize_p112(fan) == recognize_p112(&image);
    let same_length = match (rho_one_check(fan), rho_one_check(&image)) {
        (Ok(a), Ok(b)) => a.length == b.length && a.verdict == b.verdict,
        _ => fan.picard_number() != 1,
    };
    Ok(CheckOutcome::verdict(
        "recognition-invariance",
        same_pn && same_p112 && same_length,
        format!("projective space {same_pn}, p112 {same_p112}, length and verdict {same_length}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::build_weighted_projective;
    use crate::contraction::{
        analyze_contraction, build_bundle_fan, non_saturated_fibration, weighted_fiber_product,
    };
    use crate::fan::{hirzebruch, product, projective_space};
    use crate::mori::{mori_cone, ContractionKind};

    fn all_checks(fan: &Fan) -> Vec<(ContractionData, Vec<CheckOutcome>)> {
        let nc = mori_cone(fan).unwrap();
        nc.rays_of_kind(ContractionKind::Fiber)
            .map(|(_, r)| {
                let data = analyze_contraction(fan, r).unwrap();
                let checks = contraction_checks(fan, r, &data).unwrap();
                (data, checks)
            })
            .collect()
    }

    fn status(checks: &[CheckOutcome], name: &str) -> CheckStatus {
        checks.iter().find(|c| c.name == name).unwrap().status
    }

    #[test]
    fn no_failures_on_examples() {
        let p1 = projective_space(1);
        let fans = [
            hirzebruch(1),
            hirzebruch(3),
            product(&p1, &p1),
            non_saturated_fibration(2, 1).unwrap(),
            non_saturated_fibration(4, 2).unwrap(),
            weighted_fiber_product(&p1, 2).unwrap(),
            build_bundle_fan(&projective_space(2), 1, &[vec![1], vec![-2], vec![0]]).unwrap(),
        ];
        for f in &fans {
            for (_, checks) in all_checks(f) {
                assert!(checks.iter().all(|c| !c.failed()), "{f:?}: {checks:?}");
            }
        }
    }

    #[test]
    fn hypotheses_fire_where_expected() {
        let f = hirzebruch(1);
        let (_, checks) = all_checks(&f).pop().unwrap();
        assert_eq!(status(&checks, "bundle-criterion"), CheckStatus::Pass);
        assert_eq!(status(&checks, "length-criterion"), CheckStatus::Pass);
        assert_eq!(status(&checks, "alpha-divides-beta"), CheckStatus::Pass);

        let f = non_saturated_fibration(2, 1).unwrap();
        let results = all_checks(&f);
        let (_, checks) = results.iter().find(|(d, _)| !d.is_bundle).unwrap();
        assert_eq!(status(checks, "bundle-criterion"), CheckStatus::Vacuous);
        assert_eq!(status(checks, "length-criterion"), CheckStatus::Vacuous);
        assert_eq!(
            status(checks, "degree-chart-equivalence"),
            CheckStatus::Pass
        );

        let f = weighted_fiber_product(&projective_space(1), 2).unwrap();
        let results = all_checks(&f);
        let (_, checks) = results
            .iter()
            .find(|(d, _)| d.fiber_type == FiberType::P112)
            .unwrap();
        assert_eq!(
            status(checks, "degree-chart-equivalence"),
            CheckStatus::Vacuous
        );
        assert_eq!(status(checks, "length-criterion"), CheckStatus::Vacuous);
    }

    #[test]
    fn detects_a_forged_bundle_verdict() {
        let f = non_saturated_fibration(2, 1).unwrap();
        let nc = mori_cone(&f).unwrap();
        for (_, r) in nc.rays_of_kind(ContractionKind::Fiber) {
            let mut data = analyze_contraction(&f, r).unwrap();
            if data.is_bundle {
                continue;
            }
            data.degree_test = true;
            let checks = contraction_checks(&f, r, &data).unwrap();
            assert_eq!(
                status(&checks, "degree-chart-equivalence"),
                CheckStatus::Fail
            );
        }
    }

    #[test]
    fn rho_one_suite() {
        for f in [
            projective_space(3),
            build_weighted_projective(&[1, 1, 2, 2]).unwrap(),
        ] {
            let checks = rho_one_checks(&f).unwrap();
            assert!(checks.iter().all(|c| !c.failed()));
        }
        let m = IntMatrix::from_rows(&[[1, 2, 0], [0, 1, 0], [3, 5, 1]]);
        let f = build_weighted_projective(&[1, 1, 2, 2]).unwrap();
        assert_eq!(
            recognition_invariance_check(&f, &m).unwrap().status,
            CheckStatus::Pass
        );
    }
}
