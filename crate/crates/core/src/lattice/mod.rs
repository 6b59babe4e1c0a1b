//! Exact integer and rational linear algebra.

mod matrix;
mod simplex;
mod smith;

use num_rational::BigRational;

pub use matrix::{primitive, to_i64, vector_gcd, IntMatrix};
pub use simplex::{
    cone_membership, exact_lp_feasible, Feasibility, LinearConstraint, LinearProgram, Relation,
};
pub use smith::{elementary_divisors, saturation_basis, smith_normal_form, SmithDecomposition};

/// Exact rational vector, entries kept in lowest terms by `BigRational`.
pub type RationalVector = Vec<BigRational>;

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn fraction(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
