//! The Hermite heat kernel
//!
//! ```text
//! G_t(x, y) = (2π sinh 2t)^{-d/2} exp(-¼ [tanh(t) |x+y|² + coth(t) |x-y|²])
//! ```
//!
//! the potential kernel `K^σ = Γ(σ)^{-1} ∫_0^∞ G_t t^{σ-1} dt`, its two-sided
//! envelope, and the `L¹` norm of `K^σ(x, ·)`.
//!
//! Everything depends on the points only through `u = |x-y|`, `v = |x+y|`,
//! `|x|` and `|y|`, so [`PairGeometry`] is the canonical argument and
//! [`PointPair`] a thin vector wrapper around it.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::num::special_fn::{coth, ln_cosh, ln_gamma, ln_sinh};
use crate::num::{integrate, Interval, LogScalar, QuadConfig, QuadResult};
use crate::special::{log_plus, CaseTag, EnvelopeValue, SigmaClass};
use crate::{Error, Result};

pub use crate::harness::calibrate::CalibrationResult;

/// Dimension `d` and potential order `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub d: u32,
    pub sigma: f64,
}

impl KernelParams {
    pub fn new(d: u32, sigma: f64) -> Result<Self> {
        let p = KernelParams { d, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "sigma = {} must be positive",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn half_d(&self) -> f64 {
        f64::from(self.d) / 2.0
    }

    pub fn sigma_class(&self) -> SigmaClass {
        let twice = 2.0 * self.sigma;
        let d = f64::from(self.d);
        if twice < d {
            SigmaClass::Subcritical
        } else if twice == d {
            SigmaClass::Critical
        } else {
            SigmaClass::Supercritical
        }
    }

    /// Whether `K^σ(x, x)` is infinite.
    pub fn diagonal_singular(&self) -> bool {
        self.sigma_class() != SigmaClass::Supercritical
    }
}

/// Reduced description of a point pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGeometry {
    /// `|x - y|`
    pub u: f64,
    /// `|x + y|`
    pub v: f64,
    pub xnorm: f64,
    pub ynorm: f64,
}

impl PairGeometry {
    pub fn new(u: f64, v: f64, xnorm: f64, ynorm: f64) -> Self {
        PairGeometry { u, v, xnorm, ynorm }
    }

    /// Geometry of `x` and `y` with norms `xnorm`, `ynorm` and
    /// `x·y = xnorm ynorm cos θ`.
    pub fn from_polar(xnorm: f64, ynorm: f64, theta: f64) -> Self {
        Self::from_polar_gap(xnorm, ynorm, (xnorm - ynorm).abs(), theta)
    }

    /// [`PairGeometry::from_polar`] with `gap = |xnorm - ynorm|` supplied by a
    /// caller that knows it more accurately than the rounded norms do.
    pub fn from_polar_gap(xnorm: f64, ynorm: f64, gap: f64, theta: f64) -> Self {
        // |x-y|² = (a-b)² + 4ab sin²(θ/2), |x+y|² = (a-b)² + 4ab cos²(θ/2)
        let s = (0.5 * theta).sin();
        let c = (0.5 * theta).cos();
        let prod = 4.0 * xnorm * ynorm;
        let u = (gap * gap + prod * s * s).sqrt();
        let v = (gap * gap + prod * c * c).sqrt();
        PairGeometry { u, v, xnorm, ynorm }
    }

    /// Diagonal pair `x = y`.
    pub fn diagonal(xnorm: f64) -> Self {
        PairGeometry {
            u: 0.0,
            v: 2.0 * xnorm,
            xnorm,
            ynorm: xnorm,
        }
    }

    /// `|x| + |y|`
    pub fn norm_sum(&self) -> f64 {
        self.xnorm + self.ynorm
    }

    /// Swapping `x` and `y`.
    pub fn swapped(&self) -> Self {
        PairGeometry {
            xnorm: self.ynorm,
            ynorm: self.xnorm,
            ..*self
        }
    }
}

/// A pair of points in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    geometry: PairGeometry,
}

fn norm(z: impl Iterator<Item = f64>) -> f64 {
    z.fold(0.0f64, f64::hypot)
}

impl PointPair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::Domain(format!(
                "point lengths {} and {} differ or are zero",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|c| !c.is_finite()) {
            return Err(Error::Domain("point coordinates must be finite".into()));
        }
        let u = norm(x.iter().zip(&y).map(|(a, b)| a - b));
        let v = norm(x.iter().zip(&y).map(|(a, b)| a + b));
        let geometry = PairGeometry {
            u,
            v,
            xnorm: norm(x.iter().copied()),
            ynorm: norm(y.iter().copied()),
        };
        Ok(PointPair { x, y, geometry })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn geometry(&self) -> PairGeometry {
        self.geometry
    }

    pub fn u(&self) -> f64 {
        self.geometry.u
    }

    pub fn v(&self) -> f64 {
        self.geometry.v
    }
}

/// `log G_t` in reduced form.
pub fn heat_kernel_log(t: f64, g: &PairGeometry, params: &KernelParams) -> LogScalar {
    heat_kernel_log_at(t, t.ln(), g, params)
}

/// Below this time the hyperbolic functions are replaced by their leading
/// series, evaluated through `ln t` so that `t` may underflow.
const SMALL_T: f64 = 1e-6;

/// `log G_t` given both `t` and `ln t`.
fn heat_kernel_log_at(t: f64, ln_t: f64, g: &PairGeometry, params: &KernelParams) -> LogScalar {
    let half_d = params.half_d();
    let (ln_sinh2t, tanh_t, coth_u2) = if t < SMALL_T {
        let u2 = g.u * g.u;
        let coth_u2 = if u2 == 0.0 {
            0.0
        } else {
            u2 * (-ln_t).exp() + u2 * t / 3.0
        };
        (
            std::f64::consts::LN_2 + ln_t + 2.0 * t * t / 3.0,
            t,
            coth_u2,
        )
    } else {
        (ln_sinh(2.0 * t), t.tanh(), coth(t) * g.u * g.u)
    };
    let ln_pref = -half_d * ((2.0 * PI).ln() + ln_sinh2t);
    LogScalar::from_log(ln_pref - 0.25 * (tanh_t * g.v * g.v + coth_u2))
}

/// `G_t(x, y)` for explicit points.
pub fn heat_kernel(t: f64, pair: &PointPair, params: &KernelParams) -> LogScalar {
    heat_kernel_log(t, &pair.geometry(), params)
}

/// The two halves `∫_0^1` and `∫_1^∞` of the potential kernel, each already
/// divided by `Γ(σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPieces {
    pub near: QuadResult,
    pub far: QuadResult,
}

impl KernelPieces {
    pub fn total(&self) -> QuadResult {
        QuadResult::sum([self.near, self.far])
    }
}

fn check_pair(params: &KernelParams, g: &PairGeometry) -> Result<()> {
    params.validate()?;
    if [g.u, g.v, g.xnorm, g.ynorm]
        .iter()
        .any(|x| !(x.is_finite() && *x >= 0.0))
    {
        return Err(Error::Domain(format!("invalid pair geometry {g:?}")));
    }
    if g.u == 0.0 && params.diagonal_singular() {
        return Err(Error::DiagonalSingularity {
            d: params.d,
            sigma: params.sigma,
        });
    }
    Ok(())
}

/// `K^σ` split at `t = 1`.
pub fn potential_kernel_pieces(
    params: &KernelParams,
    g: &PairGeometry,
    cfg: &QuadConfig,
) -> Result<KernelPieces> {
    check_pair(params, g)?;
    let sigma = params.sigma;
    let norm = LogScalar::from_log(-ln_gamma(sigma));
    // t = e^{-s} on (0, 1): integrand G_t t^σ
    let near = integrate(
        |s| heat_kernel_log_at((-s).exp(), -s, g, params).scale_log(-sigma * s),
        &Interval::half_infinite(0.0),
        cfg,
    )?;
    let far = integrate(
        |t| heat_kernel_log(t, g, params).scale_log((sigma - 1.0) * t.ln()),
        &Interval::half_infinite(1.0),
        cfg,
    )?;
    Ok(KernelPieces {
        near: near.scaled(norm),
        far: far.scaled(norm),
    })
}

/// `K^σ(x, y)` by quadrature.
pub fn potential_kernel_quad(
    params: &KernelParams,
    g: &PairGeometry,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    Ok(potential_kernel_pieces(params, g, cfg)?.total())
}

/// Envelope of `K^σ(x, y)`: rate `|x-y| (|x|+|y|)` and a shape depending on
/// the sign of `σ - d/2`.
pub fn potential_kernel_envelope(params: &KernelParams, g: &PairGeometry) -> Result<EnvelopeValue> {
    check_pair(params, g)?;
    let class = params.sigma_class();
    let rate = g.u * g.norm_sum();
    let shape = match class {
        SigmaClass::Subcritical => g.u.powf(2.0 * params.sigma - f64::from(params.d)),
        SigmaClass::Critical => 1.0 + log_plus(1.0 / rate),
        SigmaClass::Supercritical => (1.0 + g.v).powf(f64::from(params.d) - 2.0 * params.sigma),
    };
    Ok(EnvelopeValue::new(shape, rate, CaseTag::Kernel { class }))
}

/// `∫ G_t(x, y) dy = (cosh 2t)^{-d/2} exp(-½ tanh(2t) |x|²)`, logged.
pub fn heat_mass_log(t: f64, xnorm: f64, d: u32) -> f64 {
    -(f64::from(d) / 2.0) * ln_cosh(2.0 * t) - 0.5 * (2.0 * t).tanh() * xnorm * xnorm
}

/// `∫ K^σ(x, y) dy`.
pub fn l1_norm_quad(params: &KernelParams, xnorm: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    params.validate()?;
    if !(xnorm >= 0.0 && xnorm.is_finite()) {
        return Err(Error::Domain(format!(
            "|x| = {xnorm} must be finite and nonnegative"
        )));
    }
    let (d, sigma) = (params.d, params.sigma);
    let f = |t: f64| LogScalar::from_log(heat_mass_log(t, xnorm, d) + (sigma - 1.0) * t.ln());
    // t = e^{-s} on (0, 1); the mass drops off once t exceeds |x|^{-2}
    let g = |s: f64| LogScalar::from_log(heat_mass_log((-s).exp(), xnorm, d) - sigma * s);
    let knee = 2.0 * xnorm.ln();
    let mut parts = Vec::with_capacity(3);
    if knee > 0.0 {
        parts.push(integrate(g, &Interval::new(0.0, knee), cfg)?);
    }
    parts.push(integrate(g, &Interval::half_infinite(knee.max(0.0)), cfg)?);
    parts.push(integrate(f, &Interval::half_infinite(1.0), cfg)?);
    Ok(QuadResult::sum(parts).scaled(LogScalar::from_log(-ln_gamma(sigma))))
}

/// Envelope `(1 ∨ |x|)^{-2σ}` of the `L¹` norm.
pub fn l1_norm_envelope(params: &KernelParams, xnorm: f64) -> EnvelopeValue {
    EnvelopeValue::new(
        xnorm.max(1.0).powf(-2.0 * params.sigma),
        0.0,
        CaseTag::L1Norm { far: xnorm > 1.0 },
    )
}
