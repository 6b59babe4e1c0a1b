//! Intersection numbers of torus-invariant divisors with wall curves.
//!
//! The degree of `D_v` on the curve `C` of a wall `τ` is `mult(τ)/mult(σ)`
//! when `v` and `τ` span a maximal cone `σ`. The remaining degrees follow from
//! linear equivalence: `Σ_v (D_v·C) v = 0`, so the degree vector is the
//! positive multiple of the wall relation that matches the opposite-ray value.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::{Fan, Wall};
use crate::lattice::{primitive, IntMatrix};

/// Primitive integer relation `c_u u + c_u' u' + Σ a_v v = 0` across a wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallRelation {
    pub wall: Wall,
    /// Opposite ray in the `left` maximal cone.
    pub u: usize,
    /// Opposite ray in the `right` maximal cone.
    pub u2: usize,
    pub coeff_u: BigInt,
    pub coeff_u2: BigInt,
    pub tau_coeffs: BTreeMap<usize, BigInt>,
}

impl WallRelation {
    /// Relation coefficients indexed by ray, zero off the wall's two cones.
    pub fn coefficients(&self, num_rays: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); num_rays];
        v[self.u] = self.coeff_u.clone();
        v[self.u2] = self.coeff_u2.clone();
        for (&r, a) in &self.tau_coeffs {
            v[r] = a.clone();
        }
        v
    }

    /// Rays with a negative coefficient.
    pub fn negative_support(&self) -> Vec<usize> {
        self.tau_coeffs
            .iter()
            .filter(|(_, a)| a.is_negative())
            .map(|(&r, _)| r)
            .collect()
    }

    /// Rays with a positive coefficient, sorted.
    pub fn positive_support(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .tau_coeffs
            .iter()
            .filter(|(_, a)| a.is_positive())
            .map(|(&r, _)| r)
            .chain([self.u, self.u2])
            .collect();
        v.sort_unstable();
        v
    }
}

/// Numerical class of a curve, recorded as its degree against every `D_v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub degrees: Vec<BigRational>,
}

impl CurveClass {
    pub fn anticanonical_degree(&self) -> BigRational {
        self.degrees.iter().fold(BigRational::zero(), |s, d| s + d)
    }

    /// Positive primitive integer vector on the same ray.
    pub fn primitive(&self) -> Vec<BigInt> {
        let lcm = self.degrees.iter().fold(BigInt::from(1), |l, d| {
            num_integer::lcm(l, d.denom().clone())
        });
        let scaled: Vec<BigInt> = self
            .degrees
            .iter()
            .map(|d| (d * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        primitive(&scaled)
    }
}

fn check_wall(fan: &Fan, wall: &Wall) -> Result<()> {
    let k = fan.max_cones().len();
    if wall.left >= k || wall.right >= k || wall.left == wall.right {
        return Err(Error::Argument(
            "wall does not reference two maximal cones".into(),
        ));
    }
    if wall.tau.len() + 1 != fan.dim()
        || !wall.tau.is_subset_of(&fan.max_cones()[wall.left])
        || !wall.tau.is_subset_of(&fan.max_cones()[wall.right])
    {
        return Err(Error::Argument(format!(
            "{} is not a wall of the fan",
            wall.tau
        )));
    }
    Ok(())
}

pub fn wall_relation(fan: &Fan, wall: &Wall) -> Result<WallRelation> {
    check_wall(fan, wall)?;
    let u = fan.opposite_ray(wall.left, &wall.tau);
    let u2 = fan.opposite_ray(wall.right, &wall.tau);
    let mut cols = vec![u, u2];
    cols.extend_from_slice(wall.tau.indices());
    let a = fan.ray_matrix(&cols);
    let n = fan.dim();
    // kernel of an n x (n+1) matrix of rank n: signed maximal minors
    let all_rows: Vec<usize> = (0..n).collect();
    let mut kernel = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let keep: Vec<usize> = (0..=n).filter(|&c| c != j).collect();
        let minor = a.select(&all_rows, &keep).determinant()?;
        kernel.push(if j % 2 == 0 { minor } else { -minor });
    }
    let mut kernel = primitive(&kernel);
    if kernel[0].is_negative() {
        kernel.iter_mut().for_each(|x| *x = -std::mem::take(x));
    }
    if !kernel[0].is_positive() || !kernel[1].is_positive() {
        return Err(Error::Invariant(format!(
            "wall {} has relation {kernel:?} without positive opposite coefficients",
            wall.tau
        )));
    }
    debug_assert!(a.mul_vec(&kernel)?.iter().all(Zero::is_zero));
    let tau_coeffs = wall
        .tau
        .indices()
        .iter()
        .copied()
        .zip(kernel[2..].iter().cloned())
        .collect();
    Ok(WallRelation {
        wall: wall.clone(),
        u,
        u2,
        coeff_u: kernel[0].clone(),
        coeff_u2: kernel[1].clone(),
        tau_coeffs,
    })
}

fn mult_ratio(fan: &Fan, wall: &Wall, cone: usize) -> Result<BigRational> {
    let tau = fan.multiplicity(&wall.tau)?;
    let sigma = fan.multiplicity(&fan.max_cones()[cone])?;
    Ok(BigRational::new(tau, sigma))
}

/// Full degree vector `(D_v · C)_v` of a wall curve.
pub fn curve_class(fan: &Fan, wall: &Wall) -> Result<CurveClass> {
    let rel = wall_relation(fan, wall)?;
    let deg_u = mult_ratio(fan, wall, wall.left)?;
    let deg_u2 = mult_ratio(fan, wall, wall.right)?;
    let scale = &deg_u / BigRational::from_integer(rel.coeff_u.clone());
    if &scale * BigRational::from_integer(rel.coeff_u2.clone()) != deg_u2 {
        return Err(Error::Invariant(format!(
            "opposite-ray degrees {deg_u} and {deg_u2} disagree with the relation across {}",
            wall.tau
        )));
    }
    let degrees = rel
        .coefficients(fan.num_rays())
        .into_iter()
        .map(|c| BigRational::from_integer(c) * &scale)
        .collect();
    Ok(CurveClass { degrees })
}

/// `D_v · C` for the curve `C` of `wall`.
pub fn divisor_curve_degree(fan: &Fan, v: usize, wall: &Wall) -> Result<BigRational> {
    if v >= fan.num_rays() {
        return Err(Error::Argument(format!("ray index {v} out of range")));
    }
    check_wall(fan, wall)?;
    if v == fan.opposite_ray(wall.left, &wall.tau) {
        return mult_ratio(fan, wall, wall.left);
    }
    if v == fan.opposite_ray(wall.right, &wall.tau) {
        return mult_ratio(fan, wall, wall.right);
    }
    if !wall.tau.contains(v) {
        return Ok(BigRational::zero());
    }
    let rel = wall_relation(fan, wall)?;
    let deg_u = mult_ratio(fan, wall, wall.left)?;
    Ok(deg_u * BigRational::new(rel.tau_coeffs[&v].clone(), rel.coeff_u.clone()))
}

/// `-K_X · C = Σ_v D_v · C`.
pub fn anticanonical_degree(fan: &Fan, wall: &Wall) -> Result<BigRational> {
    Ok(curve_class(fan, wall)?.anticanonical_degree())
}

/// Degree of `Σ coeffs(v) D_v` on the wall curve.
pub fn divisor_degree(
    fan: &Fan,
    coeffs: &BTreeMap<usize, BigRational>,
    wall: &Wall,
) -> Result<BigRational> {
    if let Some(&bad) = coeffs.keys().find(|&&v| v >= fan.num_rays()) {
        return Err(Error::Argument(format!("ray index {bad} out of range")));
    }
    let class = curve_class(fan, wall)?;
    Ok(coeffs
        .iter()
        .fold(BigRational::zero(), |s, (&v, c)| s + c * &class.degrees[v]))
}

/// `Σ_v <m, v> (D_v · C)` for a dual vector `m`; zero for every genuine class.
pub fn pair_with_character(fan: &Fan, class: &CurveClass, m: &[BigInt]) -> BigRational {
    fan.rays()
        .iter()
        .zip(&class.degrees)
        .fold(BigRational::zero(), |s, (r, d)| {
            let dot: BigInt = r.coords().iter().zip(m).map(|(&a, b)| b * a).sum();
            s + BigRational::from_integer(dot) * d
        })
}

/// Matrix whose rows are the primitive integer classes of the given walls.
pub fn class_matrix(fan: &Fan, walls: &[Wall]) -> Result<IntMatrix> {
    let rows = walls
        .iter()
        .map(|w| curve_class(fan, w).map(|c| c.primitive()))
        .collect::<Result<Vec<_>>>()?;
    let flat = rows.into_iter().flatten().collect();
    IntMatrix::from_vec(walls.len(), fan.num_rays(), flat)
}
