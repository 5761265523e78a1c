//! Towers of finitely presented modules over ℤ, ℤ_p and 𝔽_p[[x]], their
//! strict pro-objects, contramodules, and the complexes built from them.

pub mod coefficients;
pub mod contra;
pub mod discrete_mod;
pub mod duality;
pub mod error;
pub mod homotopy;
pub mod par;
pub mod pro_cat;

pub use error::{Error, Result};
