//! Fiber-type extremal contractions.
//!
//! A fiber-type ray with fiber rays `v_1, ..., v_{d+1}` splits `N` as
//! `N' ⊕ N''` with `N'` the saturated span of the fiber rays; the projection
//! onto `N''` induces the contraction. The contraction is a `P^d`-bundle iff
//! the fiber fan is that of `P^d` and every chart is trivial, i.e. for every
//! horizontal cone `σ` the projection `span(σ) ∩ Z^n -> Z^{n-d}` is onto.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::classify::{
    build_weighted_projective, is_projective_space, p112_weights, recognize_p112, rho_one_length,
};
use crate::error::{Error, Result};
use crate::fan::{product, validate_fan, Cone, Fan};
use crate::intersection::{curve_class, wall_relation};
use crate::lattice::{primitive, saturation_basis, smith_normal_form, to_i64, IntMatrix};
use crate::mori::{ContractionKind, ExtremalRay};

/// Unimodular change of basis putting the fiber lattice in the first `d`
/// coordinates; the contraction is the projection onto the last `n - d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    matrix: IntMatrix,
    fiber_dim: usize,
}

impl Splitting {
    pub fn new(matrix: IntMatrix, fiber_dim: usize) -> Result<Self> {
        if !matrix.is_square() || fiber_dim > matrix.rows() {
            return Err(Error::Argument(
                "splitting must be n x n with d <= n".into(),
            ));
        }
        if !matrix.determinant()?.abs().is_one() {
            return Err(Error::Argument("splitting matrix is not unimodular".into()));
        }
        Ok(Splitting { matrix, fiber_dim })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[i64]) -> Vec<BigInt> {
        self.matrix.mul_i64(v).expect("dimension checked")
    }

    /// Coordinates along the fiber lattice (the first `d`).
    pub fn fiber_coords(&self, v: &[i64]) -> Vec<BigInt> {
        let mut w = self.apply(v);
        w.truncate(self.fiber_dim);
        w
    }

    /// Image under the projection `p` onto the last `n - d` coordinates.
    pub fn project(&self, v: &[i64]) -> Vec<BigInt> {
        self.apply(v).split_off(self.fiber_dim)
    }

    pub fn is_vertical(&self, v: &[i64]) -> bool {
        self.project(v).iter().all(Zero::is_zero)
    }
}

/// Rays in the positive support of the member wall relations of a
/// fiber-type ray, checked to form a complete fan in their span.
pub fn fiber_rays(fan: &Fan, ray: &ExtremalRay) -> Result<Vec<usize>> {
    if ray.kind != ContractionKind::Fiber {
        return Err(Error::NotFanoContraction(format!(
            "ray is of {} type",
            ray.kind
        )));
    }
    let walls = fan.walls()?;
    let mut support: Vec<usize> = Vec::new();
    for &k in &ray.member_walls {
        support.extend(wall_relation(fan, &walls[k])?.positive_support());
    }
    support.sort_unstable();
    support.dedup();
    let d = fan.ray_matrix(&support).rank();
    if support.len() != d + 1 {
        return Err(Error::NotFanoContraction(format!(
            "{} fiber rays span a {d}-dimensional space",
            support.len()
        )));
    }
    for face in support.iter().copied().combinations(d) {
        let face = Cone::new(face);
        if !fan.max_cones().iter().any(|c| face.is_subset_of(c)) {
            return Err(Error::NotFanoContraction(format!(
                "fiber face {face} is not a cone of the fan"
            )));
        }
    }
    Ok(support)
}

/// Fiber dimension read off one member wall: size of the positive support minus one.
pub fn member_fiber_dimensions(fan: &Fan, ray: &ExtremalRay) -> Result<Vec<usize>> {
    let walls = fan.walls()?;
    ray.member_walls
        .iter()
        .map(|&k| Ok(wall_relation(fan, &walls[k])?.positive_support().len() - 1))
        .collect()
}

/// `M ∈ GL(n, Z)` with `M · sat(span(fiber rays)) = Z^d × {0}`.
pub fn contraction_splitting(fan: &Fan, fiber_rays: &[usize]) -> Result<Splitting> {
    let n = fan.dim();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for &r in fiber_rays {
        let mut candidate = basis.clone();
        candidate.push(fan.ray(r).to_big());
        if IntMatrix::from_big_columns(n, &candidate).rank() == candidate.len() {
            basis = candidate;
        }
    }
    let d = basis.len();
    let sat = saturation_basis(n, &basis)?;
    // L S R = [I; 0] for the saturated basis S, so diag(R, I) L maps S onto e_1..e_d
    let snf = smith_normal_form(&IntMatrix::from_big_columns(n, &sat));
    if snf.diag.iter().any(|x| !x.is_one()) {
        return Err(Error::Invariant("saturation basis is not saturated".into()));
    }
    let mut block = IntMatrix::identity(n);
    for i in 0..d {
        for j in 0..d {
            block.set(i, j, snf.right.get(i, j).clone());
        }
    }
    Splitting::new(block.mul(&snf.left)?, d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionFans {
    /// Fan of the base in `Z^{n-d}`.
    pub base: Fan,
    /// Fan of the fiber in `Z^d`.
    pub fiber: Fan,
    /// Horizontal ray set of each base maximal cone, keyed by base cone.
    pub horizontal: BTreeMap<Cone, Cone>,
}

fn big_to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(to_i64).collect()
}

/// Base fan (primitive `p`-images of the horizontal cones) and fiber fan
/// (the fiber rays with all `d`-subsets as cones), both checked complete.
pub fn base_and_fiber_fans(
    fan: &Fan,
    fiber_rays: &[usize],
    splitting: &Splitting,
) -> Result<ContractionFans> {
    let n = fan.dim();
    let d = splitting.fiber_dim();
    if fiber_rays.len() != d + 1 {
        return Err(Error::Argument(
            "fiber ray count does not match the splitting".into(),
        ));
    }
    let fail = |msg: String| Err(Error::NotFanoContraction(msg));

    let fiber_vectors = fiber_rays
        .iter()
        .map(|&r| big_to_i64(&splitting.fiber_coords(fan.ray(r).coords())))
        .collect::<Result<Vec<_>>>()?;
    if fiber_rays
        .iter()
        .any(|&r| !splitting.is_vertical(fan.ray(r).coords()))
    {
        return fail("a fiber ray does not lie in the fiber lattice".into());
    }
    let fiber = Fan::new(d, fiber_vectors, (0..=d).combinations(d).collect())?;
    if !validate_fan(&fiber).is_valid() || !fiber.is_complete() {
        return fail("fiber rays do not form a complete fan".into());
    }

    let is_fiber = |r: usize| fiber_rays.contains(&r);
    let mut images: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut groups: BTreeMap<Cone, usize> = BTreeMap::new();
    for cone in fan.max_cones() {
        let vertical = cone.indices().iter().filter(|&&r| is_fiber(r)).count();
        let horizontal: Vec<usize> = cone
            .indices()
            .iter()
            .copied()
            .filter(|&r| !is_fiber(r))
            .collect();
        if vertical != d || horizontal.len() != n - d {
            return fail(format!(
                "maximal cone {cone} has {vertical} fiber rays, expected {d}"
            ));
        }
        for &r in &horizontal {
            if let std::collections::btree_map::Entry::Vacant(slot) = images.entry(r) {
                let image = primitive(&splitting.project(fan.ray(r).coords()));
                if image.iter().all(Zero::is_zero) {
                    return fail(format!("horizontal ray {r} lies in the fiber lattice"));
                }
                slot.insert(big_to_i64(&image)?);
            }
        }
        *groups.entry(Cone::new(horizontal)).or_default() += 1;
    }
    if let Some((h, count)) = groups.iter().find(|(_, &c)| c != d + 1) {
        return fail(format!(
            "horizontal cone {h} lies in {count} maximal cones, expected {}",
            d + 1
        ));
    }

    let mut base_rays: Vec<Vec<i64>> = images.values().cloned().collect();
    base_rays.sort();
    base_rays.dedup();
    let base_cones: Vec<Vec<usize>> = groups
        .keys()
        .map(|h| {
            h.indices()
                .iter()
                .map(|r| base_rays.binary_search(&images[r]).expect("image recorded"))
                .collect()
        })
        .collect();
    let base = Fan::new(n - d, base_rays, base_cones)?;
    if base.max_cones().len() != groups.len() {
        return fail("distinct horizontal cones share a base cone".into());
    }
    if !validate_fan(&base).is_valid() || !base.is_complete() {
        return fail("projected cones do not form a complete fan".into());
    }
    let horizontal = groups
        .into_keys()
        .map(|h| {
            let key = Cone::new(
                h.indices()
                    .iter()
                    .map(|r| base.ray_index(&images[r]).expect("base ray present"))
                    .collect(),
            );
            (key, h)
        })
        .collect();
    Ok(ContractionFans {
        base,
        fiber,
        horizontal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartWitness {
    /// The horizontal rays `y_1, ..., y_{n-d}` of the chart (input indices).
    pub horizontal_rays: Cone,
    /// Index of `p(span(y) ∩ Z^n)` in `Z^{n-d}`; the chart is trivial iff it is 1.
    pub index: BigInt,
}

impl ChartWitness {
    pub fn is_trivial(&self) -> bool {
        self.index.is_one()
    }
}

/// Surjectivity test for `span(y) ∩ Z^n -> Z^{n-d}` on the chart of `max_cone`.
/// Injectivity is automatic since the horizontal rays project to full rank.
pub fn chart_is_trivial(fan: &Fan, splitting: &Splitting, max_cone: &Cone) -> Result<ChartWitness> {
    let n = fan.dim();
    let d = splitting.fiber_dim();
    let horizontal: Vec<usize> = max_cone
        .indices()
        .iter()
        .copied()
        .filter(|&r| !splitting.is_vertical(fan.ray(r).coords()))
        .collect();
    if horizontal.len() != n - d {
        return Err(Error::Argument(format!(
            "cone {max_cone} has {} horizontal rays, expected {}",
            horizontal.len(),
            n - d
        )));
    }
    let vectors: Vec<Vec<BigInt>> = horizontal.iter().map(|&r| fan.ray(r).to_big()).collect();
    let sat = saturation_basis(n, &vectors)?;
    let projected: Vec<Vec<BigInt>> = sat
        .iter()
        .map(|s| splitting.matrix().mul_vec(s).map(|mut w| w.split_off(d)))
        .collect::<Result<_>>()?;
    let index = IntMatrix::from_big_columns(n - d, &projected)
        .determinant()?
        .abs();
    if index.is_zero() {
        return Err(Error::Argument(format!(
            "horizontal rays of {max_cone} do not project to a full-rank cone"
        )));
    }
    Ok(ChartWitness {
        horizontal_rays: Cone::new(horizontal),
        index,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiberType {
    #[serde(rename = "P^d")]
    ProjectiveSpace,
    #[serde(rename = "P(1,1,2,...)")]
    P112,
    #[serde(rename = "other")]
    Other,
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FiberType::ProjectiveSpace => "P^d",
            FiberType::P112 => "P(1,1,2,...)",
            FiberType::Other => "other",
        })
    }
}

pub fn fiber_type(fiber: &Fan) -> FiberType {
    if is_projective_space(fiber) {
        FiberType::ProjectiveSpace
    } else if recognize_p112(fiber) {
        FiberType::P112
    } else {
        FiberType::Other
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub base_cone: Cone,
    pub witness: ChartWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionData {
    pub fiber_ray_indices: Vec<usize>,
    pub d: usize,
    pub splitting: Splitting,
    pub base_fan: Fan,
    pub fiber_fan: Fan,
    pub fiber_type: FiberType,
    pub charts: Vec<Chart>,
    pub is_bundle: bool,
    /// Every member wall has `D_v · C = 1` on every fiber ray.
    pub degree_test: bool,
    pub length: BigRational,
    pub member_walls: Vec<usize>,
    /// `-K_X · C` per member wall.
    pub member_degrees: Vec<BigRational>,
    /// Length of the fiber's own extremal ray.
    pub fiber_length: BigRational,
}

impl ContractionData {
    pub fn all_charts_trivial(&self) -> bool {
        self.charts.iter().all(|c| c.witness.is_trivial())
    }

    /// For a `P^d` fiber: the splitting composed with a change of basis of
    /// the fiber lattice sending the first `d` fiber rays to `e_1, ..., e_d`,
    /// so the last fiber ray becomes `-(e_1 + ... + e_d)`.
    pub fn normal_form(&self, fan: &Fan) -> Option<Splitting> {
        if self.fiber_type != FiberType::ProjectiveSpace {
            return None;
        }
        let d = self.d;
        let cols: Vec<Vec<BigInt>> = self.fiber_ray_indices[..d]
            .iter()
            .map(|&r| self.splitting.fiber_coords(fan.ray(r).coords()))
            .collect();
        let inv = IntMatrix::from_big_columns(d, &cols)
            .unimodular_inverse()
            .ok()?;
        let n = fan.dim();
        let mut block = IntMatrix::identity(n);
        for i in 0..d {
            for j in 0..d {
                block.set(i, j, inv.get(i, j).clone());
            }
        }
        Splitting::new(block.mul(self.splitting.matrix()).ok()?, d).ok()
    }
}

/// Full combinatorial analysis of a fiber-type extremal ray with `dim W >= 1`.
pub fn analyze_contraction(fan: &Fan, ray: &ExtremalRay) -> Result<ContractionData> {
    let fiber_ray_indices = fiber_rays(fan, ray)?;
    let d = fiber_ray_indices.len() - 1;
    if d == fan.dim() {
        return Err(Error::Argument(
            "contraction to a point (Picard number one); use the rho-one classifier".into(),
        ));
    }
    let splitting = contraction_splitting(fan, &fiber_ray_indices)?;
    let fans = base_and_fiber_fans(fan, &fiber_ray_indices, &splitting)?;

    let mut charts = Vec::with_capacity(fans.horizontal.len());
    for (base_cone, horizontal) in &fans.horizontal {
        let mut representative: Vec<usize> = horizontal.indices().to_vec();
        representative.extend_from_slice(&fiber_ray_indices[..d]);
        let witness = chart_is_trivial(fan, &splitting, &Cone::new(representative))?;
        charts.push(Chart {
            base_cone: base_cone.clone(),
            witness,
        });
    }

    let walls = fan.walls()?;
    let mut degree_test = true;
    for &k in &ray.member_walls {
        let class = curve_class(fan, &walls[k])?;
        if fiber_ray_indices
            .iter()
            .any(|&v| !class.degrees[v].is_one())
        {
            degree_test = false;
        }
    }

    let fiber_type = fiber_type(&fans.fiber);
    let is_bundle =
        fiber_type == FiberType::ProjectiveSpace && charts.iter().all(|c| c.witness.is_trivial());
    let fiber_length = rho_one_length(&fans.fiber)?;
    Ok(ContractionData {
        fiber_ray_indices,
        d,
        splitting,
        base_fan: fans.base,
        fiber_fan: fans.fiber,
        fiber_type,
        charts,
        is_bundle,
        degree_test,
        length: ray.length.clone(),
        member_walls: ray.member_walls.clone(),
        member_degrees: ray.member_degrees.clone(),
        fiber_length,
    })
}

/// `P^d`-fibration over `base` with fiber rays `e_1, ..., e_d, -(e_1+...+e_d)`
/// and each base ray `u` lifted to `(lifts[u], u)`.
///
/// Over a smooth base every choice of lifts gives a `P^d`-bundle. Over a
/// singular base the charts are trivial only when the lifts are integral
/// linear on each base cone.
pub fn build_bundle_fan(base: &Fan, d: usize, lifts: &[Vec<i64>]) -> Result<Fan> {
    if d == 0 {
        return Err(Error::Argument("fiber dimension must be positive".into()));
    }
    if lifts.len() != base.num_rays() || lifts.iter().any(|l| l.len() != d) {
        return Err(Error::Argument(format!(
            "need one lift of length {d} per base ray ({} rays)",
            base.num_rays()
        )));
    }
    let k = base.dim();
    let mut rays: Vec<Vec<i64>> = fiber_simplex_rays(d, k);
    for (u, lift) in base.rays().iter().zip(lifts) {
        let mut v = lift.clone();
        v.extend_from_slice(u.coords());
        rays.push(v);
    }
    let cones = (0..=d)
        .combinations(d)
        .cartesian_product(base.max_cones())
        .map(|(fiber, b)| {
            fiber
                .into_iter()
                .chain(b.indices().iter().map(|&i| i + d + 1))
                .collect()
        })
        .collect();
    Fan::new(d + k, rays, cones)
}

fn fiber_simplex_rays(d: usize, pad: usize) -> Vec<Vec<i64>> {
    let mut rays: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d + pad).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut last = vec![-1; d];
    last.resize(d + pad, 0);
    rays.push(last);
    rays
}

/// Compact `P^d`-fibration over `P(1, ..., 1, 2)` built from the twisted ray
/// `e_1 + e_{d+1} + ... + e_{n-1} + 2 e_n` and closed off by
/// `-(e_{d+1} + ... + e_n)`. The chart of `e_{d+1}, ..., e_{n-1}` and the twisted
/// ray has index 2, so the fiber ray, of length `(d+1)/2`, is not a bundle.
pub fn non_saturated_fibration(n: usize, d: usize) -> Result<Fan> {
    if d == 0 || d >= n {
        return Err(Error::Argument(format!(
            "need 1 <= d < n, got n = {n}, d = {d}"
        )));
    }
    let unit = |i: usize| -> Vec<i64> { (0..n).map(|j| i64::from(i == j)).collect() };
    let mut rays = fiber_simplex_rays(d, n - d);
    for i in d..n - 1 {
        rays.push(unit(i));
    }
    let mut twisted = vec![0; n];
    twisted[0] = 1;
    for x in twisted.iter_mut().take(n - 1).skip(d) {
        *x = 1;
    }
    twisted[n - 1] = 2;
    rays.push(twisted);
    let mut closing = vec![0; n];
    for x in closing.iter_mut().skip(d) {
        *x = -1;
    }
    rays.push(closing);
    // horizontal rays occupy indices d+1 ..= n+1
    let horizontal: Vec<usize> = (d + 1..=n + 1).collect();
    let cones = (0..=d)
        .combinations(d)
        .cartesian_product(horizontal.iter().copied().combinations(n - d))
        .map(|(f, h)| f.into_iter().chain(h).collect())
        .collect();
    Fan::new(n, rays, cones)
}

/// Product `P(1,1,2,...,2) × base` with the `d`-dimensional weighted fiber in
/// the leading coordinates. The fiber ray has length `d` and is not a bundle.
pub fn weighted_fiber_product(base: &Fan, d: usize) -> Result<Fan> {
    if d < 2 {
        return Err(Error::Argument(format!(
            "fiber dimension {d}: P(1,1,2,...,2) differs from P^d only for d >= 2"
        )));
    }
    let fiber = build_weighted_projective(&p112_weights(d))?;
    Ok(product(&fiber, base))
}
