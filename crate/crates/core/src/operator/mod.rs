//! The potential operator `I^σ f(x) = ∫ K^σ(x, y) f(y) dy` on radial `f`.
//!
//! [`apply_radial`] integrates the heat semigroup first,
//!
//! ```text
//! I^σ f(x) = Γ(σ)^{-1} ∫_0^∞ t^{σ-1} H_t(x) dt,   H_t(x) = ∫ G_t(x, y) f(y) dy,
//! ```
//!
//! where the angular part of `H_t` is the closed-form sphere mean of
//! `exp(x·y / sinh 2t)`. This leaves a smooth two-dimensional `(t, r)`
//! quadrature without diagonal singularity. [`apply_radial_by_kernel`] does
//! the direct `(r, θ)` integration against `K^σ` and is much slower; it exists
//! as an independent check.

mod radial;

pub use radial::{
    ball_volume, counterexample_a, counterexample_b, counterexample_b_norm_pow, indicator_ball,
    RadialFunction, TailClass,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::kernels::{potential_kernel_quad, KernelParams, PairGeometry};
use crate::num::special_fn::{ln_gamma, ln_sinh, ln_sphere_area, ln_sphere_mean_exp_scaled};
use crate::num::{
    try_integrate, try_integrate_above, Endpoint, Interval, LogScalar, QuadConfig, QuadResult,
};
use crate::special::SigmaClass;
use crate::{Error, Result};

/// One value of `I^σ f` at a point of norm `xnorm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSample {
    pub xnorm: f64,
    pub value: LogScalar,
    pub error_estimate: f64,
}

impl OperatorSample {
    fn from_quad(xnorm: f64, q: QuadResult) -> Self {
        OperatorSample {
            xnorm,
            value: q.value,
            error_estimate: q.error_estimate,
        }
    }

    pub fn real(&self) -> f64 {
        self.value.to_real()
    }
}

/// Half-width, in units of the Gaussian scale, of the central panel.
const CENTRAL_WIDTH: f64 = 6.0;

/// Checks that `I^σ f(x)` is finite given the declared singularity at the origin.
fn check_applicable(params: &KernelParams, f: &RadialFunction, xnorm: f64) -> Result<()> {
    params.validate()?;
    if !(xnorm >= 0.0 && xnorm.is_finite()) {
        return Err(Error::Domain(format!(
            "|x| = {xnorm} must be finite and nonnegative"
        )));
    }
    f.check_locally_integrable(params.d)?;
    if xnorm == 0.0 && f.touches_origin() && params.sigma_class() == SigmaClass::Subcritical {
        let e = f.origin_exponent;
        if e + 2.0 * params.sigma <= 0.0 {
            return Err(Error::NonIntegrable(format!(
                "I^σ f(0) diverges: origin exponent {e} with σ = {}",
                params.sigma
            )));
        }
    }
    Ok(())
}

/// `ln M_d(κ) - κ` given `ln κ`, valid for arbitrarily large `κ`.
fn ln_mean_scaled(d: u32, ln_kappa: f64) -> f64 {
    if ln_kappa == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_kappa > 600.0 {
        let h = f64::from(d) / 2.0;
        let nu = h - 1.0;
        return ln_gamma(h) + nu * (LN_2 - ln_kappa) - 0.5 * ((2.0 * PI).ln() + ln_kappa);
    }
    ln_sphere_mean_exp_scaled(d, ln_kappa.exp())
}

/// Quantities of `G_t` that depend only on `t`.
struct TimeSlice {
    ln_sinh2t: f64,
    tanh_t: f64,
}

impl TimeSlice {
    fn new(t: f64, ln_t: f64) -> Self {
        if t < 1e-6 {
            TimeSlice {
                ln_sinh2t: LN_2 + ln_t + 2.0 * t * t / 3.0,
                tanh_t: t,
            }
        } else {
            TimeSlice {
                ln_sinh2t: ln_sinh(2.0 * t),
                tanh_t: t.tanh(),
            }
        }
    }
}

/// `ln H_t(x)`.
fn ln_heat_average(
    params: &KernelParams,
    f: &RadialFunction,
    x: f64,
    t: f64,
    ln_t: f64,
    cfg: &QuadConfig,
) -> Result<LogScalar> {
    let d = params.d;
    let ts = TimeSlice::new(t, ln_t);
    // exponent -(x-r)²/h² - τ(x²+r²)/2 = -a (r-c)² - k0 with h² = 2 sinh 2t
    let ln_h2 = LN_2 + ts.ln_sinh2t;
    let tau = ts.tanh_t;
    let gain_m1 = 0.5 * tau * ln_h2.exp();
    let gain = 1.0 + gain_m1;
    let ln_w = 0.5 * (ln_h2 - gain.ln());
    let a = (-2.0 * ln_w).exp();
    let w = ln_w.exp();
    let c = x / gain;
    // x - c, kept exact for tiny t where c rounds to x
    let shift = x * gain_m1 / gain;
    // (x - c)²/h² written without the cancellation in x - c
    let k0 = 0.5 * tau * x * x + 0.25 * (x * tau / gain).powi(2) * ln_h2.exp() + 0.5 * tau * c * c;
    let ln_x = x.ln();
    let dm1 = f64::from(d) - 1.0;
    let ln_pref = ln_sphere_area(d) - f64::from(d) / 2.0 * ((2.0 * PI).ln() + ts.ln_sinh2t) - k0;

    let (lo, hi) = f.support;
    // distances from the Gaussian center to the support ends
    let below = (x - lo) - shift;
    let above = (hi - x) + shift;
    let term = |r: f64, fr: f64, quad: f64| -> LogScalar {
        if fr == 0.0 {
            return LogScalar::ZERO;
        }
        let ln_r = r.ln();
        let radial = if d == 1 { 0.0 } else { dm1 * ln_r };
        let ln_kappa = ln_x + ln_r - ts.ln_sinh2t;
        LogScalar::from_real(fr).scale_log(radial - quad + ln_mean_scaled(d, ln_kappa))
    };
    let in_r = |r: f64| Ok(term(r, f.eval(r), a * (r - c).powi(2)));
    // flank nodes that round into the central panel (w below the ulp of c)
    // are already counted there
    let in_flank = |r: f64| {
        if (r - c).abs() <= CENTRAL_WIDTH * w {
            return Ok(LogScalar::ZERO);
        }
        in_r(r)
    };
    let in_z = |z: f64| {
        let off = w * z;
        if off <= -below || off >= above {
            return Ok(LogScalar::ZERO);
        }
        let r = c + off;
        Ok(term(r, f.profile_at(r), z * z).scale_log(ln_w))
    };

    let inner = cfg.tightened(0.1);
    let lo_end = f.origin_endpoint(d);
    let z_lo = -below / w;
    let z_hi = above / w;
    let cw = CENTRAL_WIDTH;
    // the Gaussian panel first; the flanks only need accuracy relative to it
    let mut parts = Vec::with_capacity(3);
    let mut left = None;
    if z_hi > -cw && z_lo < cw {
        let top = z_hi.min(cw);
        if z_lo >= -cw {
            // the central panel reaches the bottom of the support
            if lo_end == Endpoint::Regular {
                parts.push(try_integrate(in_z, &Interval::new(z_lo, top), &inner)?);
            } else {
                let r_top = if z_hi <= cw { hi } else { c + cw * w };
                parts.push(try_integrate(
                    in_r,
                    &Interval::new(lo, r_top).lo_end(lo_end),
                    &inner,
                )?);
            }
        } else {
            parts.push(try_integrate(in_z, &Interval::new(-cw, top), &inner)?);
            left = Some(Interval::new(lo, (c - cw * w).min(hi)).lo_end(lo_end));
        }
    } else if z_hi <= -cw {
        // support entirely below the panel
        left = Some(Interval::new(lo, hi).lo_end(lo_end));
    }
    let floor =
        QuadResult::sum(parts.iter().copied()).value.abs() * LogScalar::from_real(inner.rel_tol);
    if let Some(dom) = left {
        if dom.lo < dom.hi {
            parts.push(try_integrate_above(in_flank, &dom, &inner, floor)?);
        }
    }
    if z_hi > cw {
        let tail_lo = if z_lo >= cw { lo } else { c + cw * w };
        let dom = if hi.is_finite() {
            Interval::new(tail_lo, hi)
        } else {
            Interval::half_infinite(tail_lo)
        };
        if tail_lo < hi {
            let dom = if z_lo >= cw { dom.lo_end(lo_end) } else { dom };
            parts.push(try_integrate_above(in_flank, &dom, &inner, floor)?);
        }
    }
    Ok(QuadResult::sum(parts).value.scale_log(ln_pref))
}

/// `I^σ f(x)` for radial `f` at any point with `|x| = xnorm`.
pub fn apply_radial(
    params: &KernelParams,
    f: &RadialFunction,
    xnorm: f64,
    cfg: &QuadConfig,
) -> Result<OperatorSample> {
    check_applicable(params, f, xnorm)?;
    let sigma = params.sigma;
    // (0, 1) with t = e^{-s}; integrand t^σ H_t
    let near = try_integrate(
        |s| {
            let t = (-s).exp();
            if t == 0.0 && xnorm == 0.0 {
                return Ok(LogScalar::ZERO);
            }
            Ok(ln_heat_average(params, f, xnorm, t, -s, cfg)?.scale_log(-sigma * s))
        },
        &Interval::half_infinite(0.0),
        cfg,
    )?;
    let far = try_integrate(
        |t| {
            let ln_t = t.ln();
            Ok(ln_heat_average(params, f, xnorm, t, ln_t, cfg)?.scale_log((sigma - 1.0) * ln_t))
        },
        &Interval::half_infinite(1.0),
        cfg,
    )?;
    let q = QuadResult::sum([near, far]).scaled(LogScalar::from_log(-ln_gamma(sigma)));
    Ok(OperatorSample::from_quad(xnorm, q))
}

/// Samples `I^σ f` at several points, in order.
pub fn apply_radial_many(
    params: &KernelParams,
    f: &RadialFunction,
    xnorms: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<OperatorSample>> {
    use rayon::prelude::*;
    xnorms
        .par_iter()
        .map(|&x| apply_radial(params, f, x, cfg))
        .collect()
}

/// Exponent to declare for the shell mean of `|x-y|^{2σ-d}` as `|y| -> |x|`.
fn shell_endpoint(sigma: f64) -> Endpoint {
    let e = 2.0 * sigma - 1.0;
    if e < 0.0 {
        Endpoint::Algebraic(e)
    } else if e == 0.0 {
        // logarithmic
        Endpoint::Algebraic(-0.25)
    } else {
        Endpoint::Regular
    }
}

/// `∫_{S^{d-1}} g(x, r ω) dω` where `g` depends on the pair geometry;
/// `gap = |r - x|`.
fn shell_integral<G>(d: u32, x: f64, r: f64, gap: f64, g: &G, cfg: &QuadConfig) -> Result<LogScalar>
where
    G: Fn(&PairGeometry) -> Result<LogScalar>,
{
    let geo = |th: f64| PairGeometry::from_polar_gap(x, r, gap, th);
    if d == 1 {
        return Ok(g(&geo(0.0))? + g(&geo(PI))?);
    }
    if x == 0.0 || r == 0.0 {
        return Ok(g(&geo(0.0))?.scale_log(ln_sphere_area(d)));
    }
    let ln_area = ln_sphere_area(d - 1);
    let pw = f64::from(d) - 2.0;
    let at = |th: f64| -> Result<LogScalar> {
        let v = g(&geo(th))?;
        Ok(if d == 2 {
            v
        } else {
            v.scale_log(pw * th.sin().ln())
        })
    };
    // below θ1 the distance is dominated by the gap
    let th1 = (gap / (x * r).sqrt()).min(PI);
    let mut parts = Vec::with_capacity(2);
    if th1 > 0.0 {
        parts.push(try_integrate(at, &Interval::new(0.0, th1), cfg)?);
    }
    if th1 < PI {
        if th1 == 0.0 {
            return Err(Error::Domain(format!(
                "shell of radius {r} passes through the singular point"
            )));
        }
        // θ = θ1 e^w
        let outer = try_integrate(
            |w| {
                let th = th1 * w.exp();
                Ok(at(th)?.scale_log(th.ln()))
            },
            &Interval::new(0.0, (PI / th1).ln()),
            cfg,
        )?;
        parts.push(outer);
    }
    Ok(QuadResult::sum(parts).value.scale_log(ln_area))
}

/// `∫_{lo < |y| < hi} F(x, y) dy` for radial weights, with `F` singular only
/// on the diagonal; `weight(r)` multiplies the shell integral at radius `r`.
#[allow(clippy::too_many_arguments)]
fn radial_shells<G, W>(
    d: u32,
    x: f64,
    (lo, hi): (f64, f64),
    lo_end: Endpoint,
    diag_end: Endpoint,
    g: &G,
    weight: &W,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    G: Fn(&PairGeometry) -> Result<LogScalar>,
    W: Fn(f64) -> LogScalar,
{
    let inner = cfg.tightened(0.1);
    let ln_r1 = |r: f64| {
        if d == 1 {
            0.0
        } else {
            (f64::from(d) - 1.0) * r.ln()
        }
    };
    let at_gap = |r: f64, gap: f64| -> Result<LogScalar> {
        let w = weight(r);
        if w.is_zero() {
            return Ok(LogScalar::ZERO);
        }
        Ok((shell_integral(d, x, r, gap, g, &inner)? * w).scale_log(ln_r1(r)))
    };
    let at = |r: f64| at_gap(r, (r - x).abs());
    let mut parts = Vec::new();
    let mut piece = |a: f64, b: f64, a_end: Endpoint| -> Result<()> {
        let (a, b) = (a.max(lo), b.min(hi));
        if a < b {
            let dom = if b.is_finite() {
                Interval::new(a, b)
            } else {
                Interval::half_infinite(a)
            };
            let a_end = if a == lo { lo_end } else { a_end };
            parts.push(try_integrate(at, &dom.lo_end(a_end), cfg)?);
        }
        Ok(())
    };
    if x == 0.0 {
        piece(0.0, f64::INFINITY, Endpoint::Regular)?;
        return Ok(QuadResult::sum(parts));
    }
    piece(0.0, 0.5 * x, Endpoint::Regular)?;
    piece(2.0 * x, f64::INFINITY, Endpoint::Regular)?;
    // distance δ from the diagonal radius, on both sides
    let below = (x - lo.max(0.5 * x)).min(x);
    let top = if hi < x { x - hi } else { 0.0 };
    if top < below && lo < x {
        let dom = Interval::new(top, below).lo_end(if top == 0.0 {
            diag_end
        } else {
            Endpoint::Regular
        });
        parts.push(try_integrate(|dl| at_gap(x - dl, dl), &dom, cfg)?);
    }
    let above = hi.min(2.0 * x) - x.max(lo);
    if above > 0.0 {
        let bottom = (lo - x).max(0.0);
        let end = if bottom == 0.0 {
            diag_end
        } else {
            Endpoint::Regular
        };
        parts.push(try_integrate(
            |dl| at_gap(x + dl, dl),
            &Interval::new(bottom, bottom + above).lo_end(end),
            cfg,
        )?);
    }
    Ok(QuadResult::sum(parts))
}

/// `I^σ f(x)` by direct integration of `K^σ(x, y) f(y)` in `(r, θ)`.
///
/// Three nested quadratures; use [`apply_radial`] except for verification.
pub fn apply_radial_by_kernel(
    params: &KernelParams,
    f: &RadialFunction,
    xnorm: f64,
    cfg: &QuadConfig,
) -> Result<OperatorSample> {
    check_applicable(params, f, xnorm)?;
    let d = params.d;
    let kcfg = cfg.tightened(0.01);
    let g = |geo: &PairGeometry| Ok(potential_kernel_quad(params, geo, &kcfg)?.value);
    let weight = |r: f64| LogScalar::from_real(f.eval(r));
    let lo_end = if xnorm == 0.0 && f.touches_origin() {
        match f.origin_endpoint(d) {
            Endpoint::Algebraic(e) => Endpoint::Algebraic(e + 2.0 * params.sigma - f64::from(d)),
            _ => Endpoint::Algebraic((2.0 * params.sigma - 1.0).min(0.0)),
        }
    } else {
        f.origin_endpoint(d)
    };
    let q = radial_shells(
        d,
        xnorm,
        f.support,
        lo_end,
        shell_endpoint(params.sigma),
        &g,
        &weight,
        cfg,
    )?;
    Ok(OperatorSample::from_quad(xnorm, q))
}

/// `∫_{|x|/2 < |y| < |x|} |x-y|^{2σ-d} exp(-2c |x-y| |x|) dy`.
pub fn annulus_j_integral(
    params: &KernelParams,
    xnorm: f64,
    c: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    params.validate()?;
    if params.sigma_class() != SigmaClass::Subcritical {
        return Err(Error::ParamOutOfRegime(format!(
            "need σ < d/2, got σ = {}, d = {}",
            params.sigma, params.d
        )));
    }
    if !(xnorm > 1.0 && xnorm.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!(
            "need |x| > 1 and c > 0, got |x| = {xnorm}, c = {c}"
        )));
    }
    let expo = 2.0 * params.sigma - f64::from(params.d);
    let g = |geo: &PairGeometry| {
        Ok(LogScalar::from_log(
            expo * geo.u.ln() - 2.0 * c * geo.u * xnorm,
        ))
    };
    let one = |_: f64| LogScalar::ONE;
    radial_shells(
        params.d,
        xnorm,
        (0.5 * xnorm, xnorm),
        Endpoint::Regular,
        shell_endpoint(params.sigma),
        &g,
        &one,
        cfg,
    )
}

/// Growth of `∫_{|x| < R} F(|x|) dx` along increasing truncation radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceDiagnostic {
    pub radii: Vec<f64>,
    pub truncated: Vec<f64>,
    /// Ratios of consecutive truncated values.
    pub growth: Vec<f64>,
    /// Every ratio is at least the threshold.
    pub diverging: bool,
    pub threshold: f64,
}

/// Truncated integrals of a radial function over balls of the given radii.
pub fn divergence_diagnostic<F>(
    d: u32,
    radii: &[f64],
    sample: F,
    threshold: f64,
    cfg: &QuadConfig,
) -> Result<DivergenceDiagnostic>
where
    F: Fn(f64) -> Result<LogScalar>,
{
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Domain(
            "radii must be positive and increasing".into(),
        ));
    }
    let ln_area = ln_sphere_area(d);
    let dm1 = f64::from(d) - 1.0;
    let shell = |rho: f64| -> Result<LogScalar> {
        Ok(sample(rho)?.scale_log(if d == 1 { 0.0 } else { dm1 * rho.ln() }))
    };
    let mut total = LogScalar::ZERO;
    let mut truncated = Vec::with_capacity(radii.len());
    let mut prev = 0.0f64;
    for &r in radii {
        let mut parts = Vec::new();
        if prev < 1.0 {
            parts.push(try_integrate(
                &shell,
                &Interval::new(prev, r.min(1.0)),
                cfg,
            )?);
        }
        let start = prev.max(1.0);
        if r > start {
            // ρ = e^w
            parts.push(try_integrate(
                |w| Ok(shell(w.exp())?.scale_log(w)),
                &Interval::new(start.ln(), r.ln()),
                cfg,
            )?);
        }
        total = total + QuadResult::sum(parts).value;
        truncated.push(total.scale_log(ln_area).to_real());
        prev = r;
    }
    let growth: Vec<f64> = truncated.windows(2).map(|w| w[1] / w[0]).collect();
    let diverging = growth.iter().all(|&g| g >= threshold);
    Ok(DivergenceDiagnostic {
        radii: radii.to_vec(),
        truncated,
        growth,
        diverging,
        threshold,
    })
}

/// `I^σ 1(x) = ‖K^σ(x, ·)‖_1` evaluated through the heat mass identity; used
/// as the `F` of [`divergence_diagnostic`] for `f = 1`.
pub fn constant_image(params: &KernelParams, xnorm: f64, cfg: &QuadConfig) -> Result<LogScalar> {
    Ok(crate::kernels::l1_norm_quad(params, xnorm, cfg)?.value)
}

/// Coefficient `c_d` in `K^{d/2}(x, y) ~ c_d log(1/|x-y|)` near the diagonal.
pub fn critical_log_coefficient(d: u32) -> f64 {
    let h = f64::from(d) / 2.0;
    2.0 / ((4.0 * PI).powf(h) * ln_gamma(h).exp())
}
