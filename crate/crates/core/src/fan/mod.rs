//! Simplicial fans in `N = Z^n`.

mod iso;
mod standard;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{elementary_divisors, IntMatrix, LinearConstraint, LinearProgram, Relation};

pub use iso::fans_isomorphic;
pub use standard::{hirzebruch, product, projective_space};
pub use validate::{validate_fan, ValidationReport, Violation};

/// Primitive generator of a one-dimensional cone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ray(Vec<i64>);

impl Ray {
    pub fn new(coords: Vec<i64>) -> Self {
        Ray(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0i64, |g, &x| gcd(g, x)) == 1
    }
}

impl AsRef<[i64]> for Ray {
    fn as_ref(&self) -> &[i64] {
        &self.0
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// A cone of a fan, as a strictly increasing list of ray indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Cone(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, ray: usize) -> bool {
        self.0.binary_search(&ray).is_ok()
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|&r| other.contains(r))
    }

    pub fn without(&self, ray: usize) -> Cone {
        Cone(self.0.iter().copied().filter(|&r| r != ray).collect())
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0.iter().join(","))
    }
}

/// An `(n-1)`-cone shared by exactly two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wall {
    pub tau: Cone,
    /// Index of the first incident maximal cone (the smaller index).
    pub left: usize,
    pub right: usize,
}

/// A fan given by its rays and maximal cones.
///
/// Construction canonicalizes: rays are deduplicated and sorted
/// lexicographically, each cone's indices are sorted, and the cone list is
/// sorted and deduplicated. Equality of fans is therefore equality of
/// canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    dim: usize,
    rays: Vec<Ray>,
    cones: Vec<Cone>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::Argument("fan dimension must be positive".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Argument(format!(
                    "ray {i} has {} coordinates, expected {dim}",
                    r.len()
                )));
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::Argument(format!("ray {i} is zero")));
            }
        }
        for (k, c) in cones.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Argument(format!("cone {k} is empty")));
            }
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::Argument(format!(
                    "cone {k} references ray {bad}, but there are {} rays",
                    rays.len()
                )));
            }
        }
        let mut sorted: Vec<Vec<i64>> = rays.clone();
        sorted.sort();
        sorted.dedup();
        let position: HashMap<&[i64], usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_slice(), i))
            .collect();
        let remap: Vec<usize> = rays.iter().map(|r| position[r.as_slice()]).collect();
        let mut canon: Vec<Cone> = cones
            .into_iter()
            .map(|c| Cone::new(c.into_iter().map(|i| remap[i]).collect()))
            .collect();
        canon.sort();
        canon.dedup();
        Ok(Fan {
            dim,
            rays: sorted.into_iter().map(Ray).collect(),
            cones: canon,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Ray {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn ray_index(&self, coords: &[i64]) -> Option<usize> {
        self.rays.binary_search_by(|r| r.coords().cmp(coords)).ok()
    }

    pub fn cone_index(&self, cone: &Cone) -> Option<usize> {
        self.cones.binary_search(cone).ok()
    }

    /// Picard number `|G(Σ)| - n` of a complete simplicial fan.
    pub fn picard_number(&self) -> usize {
        self.rays.len().saturating_sub(self.dim)
    }

    /// `n x k` matrix whose columns are the listed rays.
    pub fn ray_matrix(&self, indices: &[usize]) -> IntMatrix {
        let cols: Vec<&[i64]> = indices.iter().map(|&i| self.rays[i].coords()).collect();
        IntMatrix::from_columns(self.dim, &cols)
    }

    /// Lattice index of the subgroup generated by the cone's rays inside the
    /// saturated lattice they span: the product of the elementary divisors.
    pub fn multiplicity(&self, cone: &Cone) -> Result<BigInt> {
        let divisors = elementary_divisors(&self.ray_matrix(cone.indices()));
        if divisors.len() < cone.len() {
            return Err(Error::Rank {
                rank: divisors.len(),
                expected: cone.len(),
            });
        }
        Ok(divisors.into_iter().product())
    }

    /// Facets of maximal cones, each with the maximal cones that contain it.
    fn facet_incidence(&self) -> BTreeMap<Cone, Vec<usize>> {
        let mut faces: BTreeMap<Cone, Vec<usize>> = BTreeMap::new();
        for (k, c) in self.cones.iter().enumerate() {
            for &r in c.indices() {
                faces.entry(c.without(r)).or_default().push(k);
            }
        }
        faces
    }

    /// True iff every maximal cone is `n`-dimensional and every facet lies in
    /// exactly two maximal cones. Assumes the fan passed validation.
    pub fn is_complete(&self) -> bool {
        if self.cones.is_empty() || self.cones.iter().any(|c| c.len() != self.dim) {
            return false;
        }
        self.facet_incidence().values().all(|v| v.len() == 2)
    }

    /// All walls, ordered lexicographically by their ray indices.
    pub fn walls(&self) -> Result<Vec<Wall>> {
        if let Some(c) = self.cones.iter().find(|c| c.len() != self.dim) {
            return Err(Error::Argument(format!(
                "maximal cone {c} is not {}-dimensional",
                self.dim
            )));
        }
        self.facet_incidence()
            .into_iter()
            .map(|(tau, inc)| match inc.as_slice() {
                &[left, right] => Ok(Wall { tau, left, right }),
                _ => Err(Error::Incomplete {
                    face: tau.indices().to_vec(),
                    count: inc.len(),
                }),
            })
            .collect()
    }

    /// The ray of maximal cone `cone` not on `tau`.
    pub fn opposite_ray(&self, cone: usize, tau: &Cone) -> usize {
        self.cones[cone]
            .indices()
            .iter()
            .copied()
            .find(|&r| !tau.contains(r))
            .expect("maximal cone strictly contains its facet")
    }

    /// True iff a strictly convex piecewise-linear support function exists.
    ///
    /// A piecewise-linear function on a simplicial fan is fixed by its values
    /// `h_v` on the rays. It is strictly convex across a wall with relation
    /// `c_u u + c_u' u' + Σ a_v v = 0` iff `c_u h_u + c_u' h_u' + Σ a_v h_v > 0`;
    /// strictness is encoded as `>= 1` since the system is homogeneous.
    pub fn is_projective(&self) -> bool {
        if !self.is_complete() {
            return false;
        }
        let Ok(walls) = self.walls() else {
            return false;
        };
        let mut lp = LinearProgram::free(self.num_rays());
        for w in &walls {
            let Ok(rel) = crate::intersection::wall_relation(self, w) else {
                return false;
            };
            let coeffs = rel
                .coefficients(self.num_rays())
                .into_iter()
                .map(BigRational::from_integer)
                .collect();
            lp.push(LinearConstraint::new(
                coeffs,
                Relation::Ge,
                BigRational::one(),
            ));
        }
        lp.solve().is_feasible()
    }

    /// Image of the fan under an integer matrix (`rays -> M * rays`).
    pub fn transform(&self, m: &IntMatrix) -> Result<Fan> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::Argument("transform must be n x n".into()));
        }
        let rays = self
            .rays
            .iter()
            .map(|r| {
                m.mul_i64(r.coords())?
                    .iter()
                    .map(crate::lattice::to_i64)
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let cones = self.cones.iter().map(|c| c.indices().to_vec()).collect();
        Fan::new(self.dim, rays, cones)
    }

    /// Sorted multiset of maximal-cone multiplicities.
    pub fn multiplicity_profile(&self) -> Result<Vec<BigInt>> {
        let mut v = self
            .cones
            .iter()
            .map(|c| self.multiplicity(c))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        Ok(v)
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fan in Z^{}: rays ", self.dim)?;
        for (i, r) in self.rays.iter().enumerate() {
            write!(
                f,
                "{}{i}=({})",
                if i > 0 { ", " } else { "" },
                r.coords().iter().join(",")
            )?;
        }
        write!(f, "; cones {}", self.cones.iter().join(" "))
    }
}
