//! Special functions, quadrature, series acceleration and transform pairs.

pub mod bessel;
pub mod gamma;
pub mod quad;
pub mod series;
pub mod transform;

pub use bessel::{bessel_i, bessel_k};
pub use gamma::{digamma, digamma_line, gamma, ln_gamma, EULER_GAMMA};
pub use quad::{integrate, integrate_real, integrate_to_infinity, QuadConfig, QuadResult};
pub use series::{euler_alternating, wynn_epsilon};
pub use transform::{g_from_h, resolvent_pair, shc_forward, DecayBound, PairKind, TestFunctionPair};
