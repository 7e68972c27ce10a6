//! Numerical machinery for the two-point blow-up system of the mean field
//! equation `Δu + e^u = 16π δ_0` on flat tori `C / (Z + Z tau)`:
//!
//! ```text
//! G_z(a) + G_z(b) = 0,   wp'(a) + wp'(b) = 0,   a ∉ {-a, ±b}
//! ```
//!
//! The crate evaluates Weierstrass functions and Green-function derivatives,
//! traces the partner branches `b(a)`, checks the structural facts used to
//! rule out solutions on rectangular tori, and searches for solutions on
//! arbitrary moduli.

pub mod blowup;
pub mod checks;
pub mod elliptic;
pub mod error;
pub mod green;
pub mod lattice;
pub mod oracle;
pub mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
