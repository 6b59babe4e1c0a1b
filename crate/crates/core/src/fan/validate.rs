use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{Cone, Fan};
use crate::lattice::{LinearConstraint, LinearProgram, Relation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonPrimitiveRay {
        ray: usize,
        coords: Vec<i64>,
    },
    UnusedRay {
        ray: usize,
    },
    /// Cone rays are linearly dependent.
    NotSimplicial {
        cone: usize,
    },
    NotStronglyConvex {
        cone: usize,
    },
    NotFullDimensional {
        cone: usize,
    },
    /// Maximal cone contained in another one.
    NotMaximal {
        cone: usize,
        container: usize,
    },
    /// Geometric intersection is not the cone on the shared rays.
    BadIntersection {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPrimitiveRay { ray, coords } => {
                write!(f, "ray {ray} ({}) not primitive", coords.iter().join(","))
            }
            Violation::UnusedRay { ray } => write!(f, "ray {ray} lies in no maximal cone"),
            Violation::NotSimplicial { cone } => write!(f, "cone {cone} has dependent rays"),
            Violation::NotStronglyConvex { cone } => write!(f, "cone {cone} contains a line"),
            Violation::NotFullDimensional { cone } => {
                write!(f, "cone {cone} is not full-dimensional")
            }
            Violation::NotMaximal { cone, container } => {
                write!(f, "cone {cone} is a face of cone {container}")
            }
            Violation::BadIntersection { first, second } => write!(
                f,
                "cones {first} and {second} do not meet along a common face"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn big_ray(fan: &Fan, i: usize) -> Vec<BigRational> {
    fan.ray(i)
        .coords()
        .iter()
        .map(|&x| BigRational::from_integer(BigInt::from(x)))
        .collect()
}

/// Exists `h` with `h >= 1` on every ray of the cone.
fn strongly_convex(fan: &Fan, cone: &Cone) -> bool {
    let mut lp = LinearProgram::free(fan.dim());
    for &r in cone.indices() {
        lp.push(LinearConstraint::new(
            big_ray(fan, r),
            Relation::Ge,
            BigRational::one(),
        ));
    }
    lp.solve().is_feasible()
}

/// Separating functional: zero on the shared rays, `>= 1` on the rest of
/// `first` and `<= -1` on the rest of `second`. For simplicial cones this
/// exists iff the two cones meet exactly in the cone on their shared rays.
fn meet_in_common_face(fan: &Fan, first: &Cone, second: &Cone) -> bool {
    let mut lp = LinearProgram::free(fan.dim());
    for &r in first.indices() {
        let rel = if second.contains(r) {
            Relation::Eq
        } else {
            Relation::Ge
        };
        let rhs = if second.contains(r) {
            BigRational::zero()
        } else {
            BigRational::one()
        };
        lp.push(LinearConstraint::new(big_ray(fan, r), rel, rhs));
    }
    for &r in second.indices() {
        if first.contains(r) {
            continue;
        }
        lp.push(LinearConstraint::new(
            big_ray(fan, r),
            Relation::Le,
            -BigRational::one(),
        ));
    }
    lp.solve().is_feasible()
}

/// Checks primitivity, simpliciality, strong convexity and the face-intersection
/// property. Never aborts: every violation found is listed.
pub fn validate_fan(fan: &Fan) -> ValidationReport {
    let mut violations = Vec::new();
    for (i, r) in fan.rays().iter().enumerate() {
        if !r.is_primitive() {
            violations.push(Violation::NonPrimitiveRay {
                ray: i,
                coords: r.coords().to_vec(),
            });
        }
        if !fan.max_cones().iter().any(|c| c.contains(i)) {
            violations.push(Violation::UnusedRay { ray: i });
        }
    }
    let mut simplicial = vec![true; fan.max_cones().len()];
    for (k, c) in fan.max_cones().iter().enumerate() {
        let rank = fan.ray_matrix(c.indices()).rank();
        if rank < c.len() {
            simplicial[k] = false;
            violations.push(Violation::NotSimplicial { cone: k });
            if !strongly_convex(fan, c) {
                violations.push(Violation::NotStronglyConvex { cone: k });
            }
        }
        if rank < fan.dim() {
            violations.push(Violation::NotFullDimensional { cone: k });
        }
    }
    for (a, b) in (0..fan.max_cones().len()).tuple_combinations() {
        let (ca, cb) = (&fan.max_cones()[a], &fan.max_cones()[b]);
        if ca.is_subset_of(cb) {
            violations.push(Violation::NotMaximal {
                cone: a,
                container: b,
            });
            continue;
        }
        if cb.is_subset_of(ca) {
            violations.push(Violation::NotMaximal {
                cone: b,
                container: a,
            });
            continue;
        }
        if simplicial[a] && simplicial[b] && !meet_in_common_face(fan, ca, cb) {
            violations.push(Violation::BadIntersection {
                first: a,
                second: b,
            });
        }
    }
    ValidationReport { violations }
}
