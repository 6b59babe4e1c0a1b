//! Picard-number-one recognition: projective spaces and `P(1,1,2,...,2)`.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{fans_isomorphic, projective_space, Fan};
use crate::intersection::anticanonical_degree;

/// Fan of `P(1, w_1, ..., w_n)`: rays `e_1, ..., e_n, -(w_1 e_1 + ... + w_n e_n)`.
///
/// Only `w_0 = 1` is supported; other weight vectors need a quotient lattice.
pub fn build_weighted_projective(weights: &[u64]) -> Result<Fan> {
    if weights.len() < 2 {
        return Err(Error::Argument("need at least two weights".into()));
    }
    if weights[0] != 1 {
        return Err(Error::Unsupported(format!(
            "weights {weights:?}: only w_0 = 1 is constructible in the standard lattice"
        )));
    }
    if weights.contains(&0) {
        return Err(Error::Argument("weights must be positive".into()));
    }
    if weights[1..].iter().fold(0u64, |g, &w| g.gcd(&w)) != 1 {
        return Err(Error::Argument(format!(
            "weights {weights:?}: w_1, ..., w_n share a factor, so the last ray is not primitive"
        )));
    }
    let n = weights.len() - 1;
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let last = weights[1..]
        .iter()
        .map(|&w| i64::try_from(w).map(|w| -w))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Overflow(format!("{weights:?}")))?;
    rays.push(last);
    Fan::new(n, rays, (0..=n).combinations(n).collect())
}

/// Weights `(1, 1, 2, ..., 2)` of the `n`-dimensional space.
pub fn p112_weights(n: usize) -> Vec<u64> {
    let mut w = vec![1, 1];
    w.resize(n + 1, 2);
    w
}

/// `n+1` rays, Picard number one, every maximal cone smooth.
pub fn is_projective_space(fan: &Fan) -> bool {
    let verdict = fan.num_rays() == fan.dim() + 1
        && fan.picard_number() == 1
        && fan.max_cones().len() == fan.dim() + 1
        && fan
            .max_cones()
            .iter()
            .all(|c| c.len() == fan.dim() && fan.multiplicity(c).is_ok_and(|m| m.is_one()));
    debug_assert_eq!(verdict, is_projective_space_by_isomorphism(fan));
    verdict
}

/// Same question answered by an explicit isomorphism to the standard fan.
pub fn is_projective_space_by_isomorphism(fan: &Fan) -> bool {
    matches!(
        fans_isomorphic(fan, &projective_space(fan.dim())),
        Ok(Some(_))
    )
}

pub fn recognize_p112(fan: &Fan) -> bool {
    if fan.dim() < 2 || fan.picard_number() != 1 {
        return false;
    }
    let Ok(model) = build_weighted_projective(&p112_weights(fan.dim())) else {
        return false;
    };
    matches!(fans_isomorphic(fan, &model), Ok(Some(_)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rho1Verdict {
    ProjectiveSpace,
    P112Type,
    Other,
}

impl fmt::Display for Rho1Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rho1Verdict::ProjectiveSpace => "projective_space",
            Rho1Verdict::P112Type => "p112_type",
            Rho1Verdict::Other => "other",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseOutcome {
    Holds,
    Vacuous,
    Violated,
}

impl ClauseOutcome {
    pub fn implication(hypothesis: bool, conclusion: bool) -> Self {
        match (hypothesis, conclusion) {
            (false, _) => ClauseOutcome::Vacuous,
            (true, true) => ClauseOutcome::Holds,
            (true, false) => ClauseOutcome::Violated,
        }
    }

    pub fn is_violated(self) -> bool {
        self == ClauseOutcome::Violated
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rho1Report {
    pub dim: usize,
    pub rho: usize,
    pub length: BigRational,
    pub verdict: Rho1Verdict,
    /// `l(R) > n  =>  X = P^n`
    pub exceeds_dim: ClauseOutcome,
    /// `l(R) >= n` and `X != P^n`  =>  `X = P(1,1,2,...,2)`
    pub reaches_dim: ClauseOutcome,
}

impl Rho1Report {
    pub fn holds(&self) -> bool {
        !self.exceeds_dim.is_violated() && !self.reaches_dim.is_violated()
    }
}

/// Length of the unique extremal ray of a Picard-number-one fan: every wall
/// class is proportional, so the minimum is taken over all walls.
pub fn rho_one_length(fan: &Fan) -> Result<BigRational> {
    let walls = fan.walls()?;
    walls
        .iter()
        .map(|w| anticanonical_degree(fan, w))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min()
        .ok_or_else(|| Error::Argument("fan has no walls".into()))
}

/// Computes the length and checks both length characterizations of
/// Picard-number-one varieties.
pub fn rho_one_check(fan: &Fan) -> Result<Rho1Report> {
    let rho = fan.picard_number();
    if rho != 1 || !fan.is_complete() {
        return Err(Error::Argument(format!(
            "expected a complete fan of Picard number 1, got rho = {rho}"
        )));
    }
    let length = rho_one_length(fan)?;
    let n = BigRational::from_integer(BigInt::from(fan.dim()));
    let pn = is_projective_space(fan);
    let p112 = !pn && recognize_p112(fan);
    let verdict = if pn {
        Rho1Verdict::ProjectiveSpace
    } else if p112 {
        Rho1Verdict::P112Type
    } else {
        Rho1Verdict::Other
    };
    Ok(Rho1Report {
        dim: fan.dim(),
        rho,
        exceeds_dim: ClauseOutcome::implication(length > n, pn),
        reaches_dim: ClauseOutcome::implication(length >= n && !pn, p112),
        length,
        verdict,
    })
}
