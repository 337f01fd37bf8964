//! Exact arithmetic substrate: big rationals, integer polynomials, rational
//! functions in `p`, and linear solving over the rational-function field.

pub mod linsolve;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use linsolve::{solve_linear_system, LinearSystem};
pub use num_rational::BigRational;
pub use poly::IntPolynomial;
pub use ratfunc::RationalFunction;
pub use rational::{parse_rational, rational_to_string, to_decimal, to_significant};
