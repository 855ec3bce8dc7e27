//! Foundation numerics: log-domain scalars and the quadrature engine.

mod log_scalar;
pub mod quad;
pub mod special_fn;

pub use log_scalar::LogScalar;
pub use quad::{
    integrate, try_integrate, try_integrate_above, Endpoint, Interval, QuadConfig, QuadResult,
    Scheme,
};
