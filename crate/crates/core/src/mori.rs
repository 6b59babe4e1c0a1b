//! The Kleiman–Mori cone of a projective simplicial toric variety, its
//! extremal rays, their lengths and contraction types.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{Fan, Wall};
use crate::intersection::{curve_class, wall_relation, CurveClass};
use crate::lattice::cone_membership;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    Fiber,
    Divisorial,
    Small,
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionKind::Fiber => "fiber",
            ContractionKind::Divisorial => "divisorial",
            ContractionKind::Small => "small",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalRay {
    /// Primitive integer representative, indexed by ray.
    pub generator: CurveClass,
    /// Indices into `MoriCone::walls` of the walls whose class lies on the ray.
    pub member_walls: Vec<usize>,
    /// `-K_X · C` of each member wall, in `member_walls` order.
    pub member_degrees: Vec<BigRational>,
    pub length: BigRational,
    pub kind: ContractionKind,
}

impl ExtremalRay {
    /// Minimum anticanonical degree over the member wall curves.
    pub fn ray_length(&self) -> &BigRational {
        &self.length
    }
}

#[derive(Clone, Debug)]
pub struct MoriCone {
    pub walls: Vec<Wall>,
    /// Class of each wall, parallel to `walls`.
    pub classes: Vec<CurveClass>,
    /// Deduplicated primitive wall classes.
    pub generators: Vec<Vec<BigInt>>,
    pub rays: Vec<ExtremalRay>,
}

impl MoriCone {
    /// Extremal rays of a given kind, by index.
    pub fn rays_of_kind(
        &self,
        kind: ContractionKind,
    ) -> impl Iterator<Item = (usize, &ExtremalRay)> {
        self.rays
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.kind == kind)
    }
}

/// Builds `NE(X)` from the wall classes and extracts its extremal rays.
///
/// A generator is extremal iff it is not a nonnegative combination of the
/// other (pairwise non-proportional) generators.
pub fn mori_cone(fan: &Fan) -> Result<MoriCone> {
    if !fan.is_projective() {
        return Err(Error::NotProjective);
    }
    let walls = fan.walls()?;
    let classes = walls
        .iter()
        .map(|w| curve_class(fan, w))
        .collect::<Result<Vec<_>>>()?;
    let primitive: Vec<Vec<BigInt>> = classes.iter().map(CurveClass::primitive).collect();

    let mut generators: Vec<Vec<BigInt>> = Vec::new();
    let mut seen = BTreeSet::new();
    for p in &primitive {
        if seen.insert(p.clone()) {
            generators.push(p.clone());
        }
    }

    let mut rays = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let others: Vec<Vec<BigInt>> = generators
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h.clone())
            .collect();
        if cone_membership(&others, g).is_feasible() {
            continue;
        }
        let member_walls: Vec<usize> = (0..walls.len()).filter(|&k| &primitive[k] == g).collect();
        let member_degrees: Vec<BigRational> = member_walls
            .iter()
            .map(|&k| classes[k].anticanonical_degree())
            .collect();
        let length = member_degrees
            .iter()
            .min()
            .expect("member walls nonempty")
            .clone();
        let generator = CurveClass {
            degrees: g
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect(),
        };
        let mut ray = ExtremalRay {
            generator,
            member_walls,
            member_degrees,
            length,
            kind: ContractionKind::Fiber,
        };
        ray.kind = classify_ray_kind_with(fan, &walls, &ray)?;
        rays.push(ray);
    }
    Ok(MoriCone {
        walls,
        classes,
        generators,
        rays,
    })
}

/// Sign-pattern classification of an extremal ray.
///
/// No negative coefficient in any member wall relation means fiber type;
/// otherwise the ray is divisorial when exactly one ray carries negative
/// coefficients and small when several do.
pub fn classify_ray_kind(fan: &Fan, ray: &ExtremalRay) -> Result<ContractionKind> {
    classify_ray_kind_with(fan, &fan.walls()?, ray)
}

fn classify_ray_kind_with(fan: &Fan, walls: &[Wall], ray: &ExtremalRay) -> Result<ContractionKind> {
    let mut verdict: Option<(ContractionKind, Vec<usize>)> = None;
    for &k in &ray.member_walls {
        let rel = wall_relation(fan, &walls[k])?;
        let negative = rel.negative_support();
        let kind = match negative.len() {
            0 => ContractionKind::Fiber,
            1 => ContractionKind::Divisorial,
            _ => ContractionKind::Small,
        };
        match &verdict {
            None => verdict = Some((kind, negative)),
            Some((prev, neg)) if *prev != kind || *neg != negative => {
                return Err(Error::Invariant(format!(
                    "member walls of one extremal ray disagree: {prev} vs {kind}"
                )))
            }
            _ => {}
        }
    }
    verdict
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Invariant("extremal ray without member walls".into()))
}
