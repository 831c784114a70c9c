//! Exact p-adic arithmetic and the hard-core lattice gas on Cayley trees.
//!
//! The crate has four layers:
//!
//! - [`padic`]: Q_p elements at finite tracked precision (canonical
//!   `p^v * unit` form, conservative precision propagation, no absolute
//!   equality — only congruence mod p^m).
//! - [`analytic`]: p-adic exp/log on their convergence balls, square roots,
//!   Hensel lifting, and polynomials over Z_p ([`poly`]).
//! - [`model`]: the hard-core model layer — divisibility gates, the
//!   translation-invariant and period-2 boundary-law solvers, and the
//!   solvability tables.
//! - [`oracle`]: a brute-force finite-volume checker that enumerates
//!   admissible configurations, computes the measures exactly, and verifies
//!   normalization, compatibility, counting, and norm claims.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod factor;
pub mod model;
pub mod oracle;
pub mod padic;
pub mod poly;
pub mod report;
pub mod solve;

pub use error::{Error, Result};
pub use padic::{PadicNumber, Valuation, DEFAULT_PRECISION};
