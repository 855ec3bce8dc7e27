//! Numerics for the potential theory of the harmonic oscillator `-Δ + |x|^2`.
//!
//! * [`num`]: log-domain scalars and adaptive quadrature.
//! * [`special`]: the integrals `I_A`, `J_A`, `E_A` and their two-sided envelopes.
//! * [`kernels`]: the Hermite heat kernel, the potential kernel and its envelope.
//! * [`operator`]: the potential operator applied to radial functions.
//! * [`region`]: exact `Lp -> Lq` mapping classification.
//! * [`harness`]: sweeps, envelope calibration, counterexample experiments, emitters.

pub mod error;
pub mod harness;
pub mod kernels;
pub mod num;
pub mod operator;
pub mod region;
pub mod special;

pub use error::{Error, Result};
pub use num::{LogScalar, QuadConfig, QuadResult};
