//! Exact arithmetic over ℤ, ℤ/pⁿ and 𝔽_p[x]/xⁿ, and matrix normal forms.

mod int;
mod matrix;
mod normal_form;
mod ring;

pub use int::Int;
pub use matrix::{Matrix, MatrixLiteral};
pub use normal_form::{normal_form, solve_membership, NormalForm, Solver};
pub use ring::{is_prime, Backend, BackendKind, Level, Ring, Scalar, Size};
