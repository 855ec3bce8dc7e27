use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::kernels::KernelParams;
use crate::num::special_fn::{ln_sphere_area, unit_ball_volume};
use crate::num::{integrate, Endpoint, Interval, LogScalar, QuadConfig, QuadResult};
use crate::special::SigmaClass;
use crate::{Error, Result};

/// Behavior of a profile as `r -> ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailClass {
    /// Bounded support.
    Compact,
    /// `r^power (log r)^log_power`.
    PowerLog { power: f64, log_power: f64 },
    /// Faster than any power.
    Rapid,
}

/// A radial function `f(y) = profile(|y|)`, zero outside `support`.
#[derive(Clone)]
pub struct RadialFunction {
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `ln |f|` as a function of `ln r`, for radii beyond the f64 range.
    ln_profile: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Open interval `(lo, hi)` of radii; `hi` may be infinite.
    pub support: (f64, f64),
    /// `f(r) ~ r^e` as `r -> 0+` (0 if bounded there).
    pub origin_exponent: f64,
    pub tail_class: TailClass,
    pub label: String,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("origin_exponent", &self.origin_exponent)
            .field("tail_class", &self.tail_class)
            .finish()
    }
}

impl RadialFunction {
    pub fn new<F>(label: impl Into<String>, support: (f64, f64), profile: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let tail_class = if support.1.is_finite() {
            TailClass::Compact
        } else {
            TailClass::Rapid
        };
        RadialFunction {
            profile: Arc::new(profile),
            ln_profile: None,
            support,
            origin_exponent: 0.0,
            tail_class,
            label: label.into(),
        }
    }

    pub fn with_origin_exponent(mut self, e: f64) -> Self {
        self.origin_exponent = e;
        self
    }

    pub fn with_tail(mut self, tail: TailClass) -> Self {
        self.tail_class = tail;
        self
    }

    /// Supplies `ln |f|` in terms of `ln r`.
    pub fn with_ln_profile<F>(mut self, ln_profile: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.ln_profile = Some(Arc::new(ln_profile));
        self
    }

    /// `ln |f(r)|` given `ln r`; `-∞` off the support.
    pub fn ln_abs_eval(&self, ln_r: f64) -> f64 {
        let (lo, hi) = self.support;
        if ln_r <= lo.ln() || ln_r >= hi.ln() {
            return f64::NEG_INFINITY;
        }
        match &self.ln_profile {
            Some(g) => g(ln_r),
            None => (self.profile)(ln_r.exp()).abs().ln(),
        }
    }

    /// The constant function 1.
    pub fn constant() -> Self {
        RadialFunction::new("one", (0.0, f64::INFINITY), |_| 1.0).with_tail(TailClass::PowerLog {
            power: 0.0,
            log_power: 0.0,
        })
    }

    /// Ground state `h_0(y) = π^{-d/4} exp(-|y|²/2)` of `-Δ + |y|²`.
    pub fn hermite_ground(d: u32) -> Self {
        let c = PI.powf(-f64::from(d) / 4.0);
        RadialFunction::new(format!("h0(d={d})"), (0.0, f64::INFINITY), move |r| {
            c * (-0.5 * r * r).exp()
        })
    }

    /// `f(r)` (zero off the support).
    pub fn eval(&self, r: f64) -> f64 {
        if r > self.support.0 && r < self.support.1 {
            (self.profile)(r)
        } else {
            0.0
        }
    }

    /// The profile at `r` without the support test, for callers that decide
    /// membership from more accurate offsets.
    pub(crate) fn profile_at(&self, r: f64) -> f64 {
        (self.profile)(r)
    }

    pub fn touches_origin(&self) -> bool {
        self.support.0 == 0.0
    }

    /// Endpoint behavior of `r^{d-1} f(r)` at the bottom of the support.
    pub fn origin_endpoint(&self, d: u32) -> Endpoint {
        if !self.touches_origin() {
            return Endpoint::Regular;
        }
        let e = self.origin_exponent + f64::from(d) - 1.0;
        if e < 0.0 {
            Endpoint::Algebraic(e)
        } else {
            Endpoint::Regular
        }
    }

    pub fn check_locally_integrable(&self, d: u32) -> Result<()> {
        if self.touches_origin() && self.origin_exponent <= -f64::from(d) {
            return Err(Error::NonIntegrable(format!(
                "{} ~ r^{} is not integrable at the origin in dimension {d}",
                self.label, self.origin_exponent
            )));
        }
        Ok(())
    }

    /// `‖f‖_p^p` in `R^d` by quadrature.
    pub fn lp_norm_pow(&self, d: u32, p: f64, cfg: &QuadConfig) -> Result<QuadResult> {
        let (lo, hi) = self.support;
        let g = |r: f64| {
            let v = self.eval(r).abs();
            if v == 0.0 {
                return LogScalar::ZERO;
            }
            LogScalar::from_log(
                p * v.ln()
                    + if d == 1 {
                        0.0
                    } else {
                        (f64::from(d) - 1.0) * r.ln()
                    },
            )
        };
        let end = if self.touches_origin() {
            Endpoint::Algebraic(p * self.origin_exponent + f64::from(d) - 1.0)
        } else {
            Endpoint::Regular
        };
        let q = if hi.is_finite() {
            integrate(g, &Interval::new(lo, hi).lo_end(end), cfg)?
        } else {
            // r = lo + e^w keeps slowly decaying tails manageable
            let split = lo + 1.0;
            let a = integrate(g, &Interval::new(lo, split).lo_end(end), cfg)?;
            let mut tail = Interval::half_infinite(0.0);
            if let TailClass::PowerLog { power, log_power } = self.tail_class {
                // in w the tail is e^{w (p power + d)} w^{p log_power}
                if (p * power + f64::from(d)).abs() < 1e-12 {
                    tail = tail.hi_end(Endpoint::Algebraic(p * log_power));
                }
            }
            let ln_lo = lo.ln();
            let b = integrate(
                |w| {
                    // ln r = ln(lo + e^w) without forming r
                    let ln_r = if w > ln_lo {
                        w + (lo * (-w).exp()).ln_1p()
                    } else {
                        ln_lo + (w - ln_lo).exp().ln_1p()
                    };
                    let lf = self.ln_abs_eval(ln_r);
                    if lf == f64::NEG_INFINITY {
                        return LogScalar::ZERO;
                    }
                    LogScalar::from_log(p * lf + (f64::from(d) - 1.0) * ln_r + w)
                },
                &tail,
                cfg,
            )?;
            QuadResult::sum([a, b])
        };
        Ok(q.scaled(LogScalar::from_log(ln_sphere_area(d))))
    }
}

fn require_subcritical(params: &KernelParams) -> Result<f64> {
    params.validate()?;
    if params.sigma_class() != SigmaClass::Subcritical {
        return Err(Error::ParamOutOfRegime(format!(
            "need σ < d/2, got σ = {}, d = {}",
            params.sigma, params.d
        )));
    }
    Ok(2.0 * params.sigma / f64::from(params.d))
}

/// `χ_{|y|<1} |y|^{-2σ-d/q}`: in `L^p` for `2σ/d + 1/q < 1/p`, yet its image
/// is not in `L^q`.
pub fn counterexample_a(params: &KernelParams, q: f64) -> Result<RadialFunction> {
    let a = require_subcritical(params)?;
    if !(q > 1.0 && 1.0 / q < 1.0 - a) {
        return Err(Error::ParamOutOfRegime(format!(
            "need 0 < 1/q < 1 - 2σ/d = {}, got q = {q}",
            1.0 - a
        )));
    }
    let e = -2.0 * params.sigma - f64::from(params.d) / q;
    Ok(
        RadialFunction::new(format!("a(q={q})"), (0.0, 1.0), move |r| r.powf(e))
            .with_origin_exponent(e),
    )
}

/// `χ_{|y|>e} |y|^{-d/p} (log |y|)^{-1/p-2σ/d}`, in `L^p` for
/// `0 < 1/p < 1 - 2σ/d`.
pub fn counterexample_b(params: &KernelParams, p: f64) -> Result<RadialFunction> {
    let a = require_subcritical(params)?;
    if !(p > 1.0 && 1.0 / p < 1.0 - a) {
        return Err(Error::ParamOutOfRegime(format!(
            "need 0 < 1/p < 1 - 2σ/d = {}, got p = {p}",
            1.0 - a
        )));
    }
    let power = -f64::from(params.d) / p;
    let log_power = -1.0 / p - a;
    Ok(
        RadialFunction::new(format!("b(p={p})"), (E, f64::INFINITY), move |r| {
            r.powf(power) * r.ln().powf(log_power)
        })
        .with_ln_profile(move |ln_r| power * ln_r + log_power * ln_r.ln())
        .with_tail(TailClass::PowerLog { power, log_power }),
    )
}

/// `‖f‖_p^p` of [`counterexample_b`] in closed form: `|S^{d-1}| d / (2σp)`.
pub fn counterexample_b_norm_pow(params: &KernelParams, p: f64) -> f64 {
    ln_sphere_area(params.d).exp() * f64::from(params.d) / (2.0 * params.sigma * p)
}

/// Indicator of the ball of radius `r`.
pub fn indicator_ball(r: f64) -> Result<RadialFunction> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(RadialFunction::new(
        format!("ball(r={r})"),
        (0.0, r),
        |_| 1.0,
    ))
}

/// `‖χ_{B_r}‖_p^p = |B_r|`.
pub fn ball_volume(d: u32, r: f64) -> f64 {
    unit_ball_volume(d) * r.powi(d as i32)
}
