//! Small closed-form helpers shared across modules.

use std::f64::consts::PI;

pub use statrs::function::gamma::{gamma, ln_gamma};

/// `ln sinh(x)` for `x > 0`, stable for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh(x)`, stable for large `|x|`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}

/// `coth(x)` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    if x > 20.0 {
        1.0
    } else {
        1.0 / x.tanh()
    }
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n` (`|S^0| = 2`).
pub fn ln_sphere_area(n: u32) -> f64 {
    let h = f64::from(n) / 2.0;
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)
}

pub fn sphere_area(n: u32) -> f64 {
    ln_sphere_area(n).exp()
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    sphere_area(d) / f64::from(d)
}

/// `ln M_d(κ) - κ`, where `M_d(κ)` is the mean of `exp(κ ω·e)` over the unit
/// sphere `S^{d-1}`, i.e. `Γ(d/2) (2/κ)^ν I_ν(κ)` with `ν = d/2 - 1`.
///
/// `M_1 = cosh`, `M_3(κ) = sinh(κ)/κ`.
pub fn ln_sphere_mean_exp_scaled(d: u32, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return 0.0;
    }
    let h = f64::from(d) / 2.0;
    let nu = h - 1.0;
    if kappa > 50.0 + nu * nu {
        if let Some(v) = bessel_i_asymptotic(nu, kappa) {
            return ln_gamma(h) + nu * (2.0 / kappa).ln() + v;
        }
    }
    sphere_mean_series(h, kappa)
}

/// `ln I_ν(κ) - κ` from the large-argument expansion, if it converges.
fn bessel_i_asymptotic(nu: f64, kappa: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for k in 1..60 {
        let j = f64::from(2 * k - 1);
        let next = -term * (mu - j * j) / (f64::from(k) * 8.0 * kappa);
        if next.abs() > term.abs() {
            return None;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Some(sum.ln() - 0.5 * (2.0 * PI * kappa).ln());
        }
    }
    None
}

/// Power series `Σ (κ/2)^{2k} Γ(h) / (k! Γ(k+h))` in log-scaled form.
fn sphere_mean_series(h: f64, kappa: f64) -> f64 {
    let q = 2.0 * (0.5 * kappa).ln();
    let mut ln_term = 0.0f64;
    let mut scale = 0.0f64;
    let mut acc = 1.0f64;
    let mut k = 0.0f64;
    loop {
        k += 1.0;
        ln_term += q - k.ln() - (k - 1.0 + h).ln();
        if ln_term > scale + 300.0 {
            acc *= (scale - ln_term).exp();
            scale = ln_term;
        }
        let t = (ln_term - scale).exp();
        acc += t;
        if k > 0.5 * kappa && t < 1e-17 * acc {
            break;
        }
    }
    scale + acc.ln() - kappa
}
