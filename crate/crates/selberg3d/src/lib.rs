//! Selberg trace formula and Selberg zeta function machinery for cofinite
//! Kleinian groups acting on hyperbolic 3-space.
//!
//! The crate is organised bottom-up:
//!
//! * [`h3geom`]: points of upper half-space, Möbius action, point-pair
//!   invariant, element classification.
//! * [`specfun`]: quadrature, Gamma/digamma, Bessel `K` and `I`, the
//!   Selberg–Harish-Chandra transform and the resolvent test-function pair.
//! * [`lattice`]: rank-2 lattice character sums and their Siegel-function
//!   closed form.
//! * [`bianchi`]: the groups `PSL(2, O_d)` for `d = 1, 3` in exact ring
//!   arithmetic, with class enumeration and the cusp identity.
//! * [`repchar`]: restriction of a unitary representation to the cusp
//!   stabilizer.
//! * [`eisenstein`]: truncated Eisenstein series and eigenfunction
//!   diagnostics.
//! * [`zeta`]: partial Euler products, log-derivative series, cusp
//!   integrals, residue tables, the functional-equation factor and the
//!   geometric side of the trace formula.
//! * [`cli`]: configuration, reports and command dispatch for the binary.

pub mod bianchi;
pub mod cli;
pub mod eisenstein;
pub mod error;
pub mod h3geom;
pub mod lattice;
pub mod repchar;
pub mod specfun;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
