//! Exact computation of the Kubota–Leopoldt p-adic L-function as an integral
//! against the Bernoulli measure on `(Z/dZ)^x × Z_p^x`, together with the
//! closed form its values at negative integers should match.
//!
//! The crate is layered bottom-up:
//! * [`modarith`]: residues, units, inverses, CRT.
//! * [`padic`]: finite-precision `Q_p` arithmetic.
//! * [`bernoulli`]: Bernoulli numbers and polynomials over `Q`.
//! * [`dirichlet`]: characters valued in the `(p-1)`-st roots of unity.
//! * [`genbernoulli`]: generalized Bernoulli numbers and the two limit
//!   statements they satisfy.
//! * [`measure`]: clopen sets, cylinder functions and the Bernoulli measure.
//! * [`lfunction`]: Riemann sums, the L-function and the interpolation check.
//! * [`suite`]: the bundled verification profiles used by the CLI.

pub mod bernoulli;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod genbernoulli;
pub mod lfunction;
pub mod measure;
pub mod modarith;
pub mod padic;
pub mod suite;

pub use error::{Error, Result};
pub use padic::{PadicNum, Valuation};
