//! The integrals
//!
//! ```text
//! I_A(x)    = ∫_x^∞ t^A e^{-t} dt
//! J_A(x, y) = ∫_x^y t^A e^{-t} dt
//! E_A(T, S) = ∫_0^1 t^A exp(-T/t - S t) dt
//! ```
//!
//! evaluated by quadrature, together with their two-sided envelopes. An
//! envelope is a pair `(shape, rate)` meaning
//! `C^-1 shape e^{-c1 rate} <= value <= C shape e^{-c2 rate}` for constants
//! that are fitted by the harness and never stored here.

use serde::{Deserialize, Serialize};

use crate::num::{try_integrate, Interval, LogScalar, QuadConfig, QuadResult};
use crate::{Error, Result};

/// Parameter block `(A, γ, T, S)`. `s` is ignored by the `I` family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralParams {
    pub a: f64,
    pub gamma: f64,
    pub t: f64,
    pub s: f64,
}

impl IntegralParams {
    pub fn i(a: f64, gamma: f64, t: f64) -> Self {
        IntegralParams {
            a,
            gamma,
            t,
            s: f64::NAN,
        }
    }

    pub fn j(a: f64, gamma: f64, t: f64, s: f64) -> Self {
        IntegralParams { a, gamma, t, s }
    }

    fn check_i(&self) -> Result<()> {
        if !self.a.is_finite() {
            return Err(Error::Domain(format!(
                "exponent A = {} must be finite",
                self.a
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!(
                "gamma = {} must be positive",
                self.gamma
            )));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::Domain(format!("T = {} must be positive", self.t)));
        }
        Ok(())
    }

    fn check_j(&self) -> Result<()> {
        self.check_i()?;
        if !(self.s > self.t && self.s.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < T < S, got T = {}, S = {}",
                self.t, self.s
            )));
        }
        Ok(())
    }
}

/// Position of an exponent relative to the critical value `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExponentClass {
    /// `A < -1`
    Below,
    /// `A = -1`
    Critical,
    /// `A > -1`
    Above,
}

impl ExponentClass {
    pub fn of(a: f64) -> Self {
        if a < -1.0 {
            ExponentClass::Below
        } else if a == -1.0 {
            ExponentClass::Critical
        } else {
            ExponentClass::Above
        }
    }
}

/// Position of `σ` relative to `d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SigmaClass {
    Subcritical,
    Critical,
    Supercritical,
}

/// Which branch of an envelope formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "branch")]
pub enum CaseTag {
    /// `I_A(γT)` with `T >= 1`.
    ILarge,
    /// `I_A(γT)` with `T < 1`.
    ISmall {
        class: ExponentClass,
    },
    /// `J_A` with `S <= 2T`.
    JComparable,
    /// `J_A` with `S > 2T` and `S >= 2`, delegated to `I_A`.
    JFarTail {
        t_large: bool,
        class: ExponentClass,
    },
    /// `J_A` with `S > 2T` and `S < 2`.
    JFarSmall {
        class: ExponentClass,
    },
    /// `E_A`; `large` records `T (T ∨ S) >= 1`.
    E {
        class: ExponentClass,
        large: bool,
    },
    Kernel {
        class: SigmaClass,
    },
    L1Norm {
        far: bool,
    },
}

impl CaseTag {
    /// Short stable name, used in tables.
    pub fn label(&self) -> String {
        fn cls(c: ExponentClass) -> &'static str {
            match c {
                ExponentClass::Below => "a<-1",
                ExponentClass::Critical => "a=-1",
                ExponentClass::Above => "a>-1",
            }
        }
        match *self {
            CaseTag::ILarge => "i:t>=1".into(),
            CaseTag::ISmall { class } => format!("i:t<1:{}", cls(class)),
            CaseTag::JComparable => "j:s<=2t".into(),
            CaseTag::JFarTail { t_large: true, .. } => "j:s>2t:s>=2:t>=1".into(),
            CaseTag::JFarTail {
                t_large: false,
                class,
            } => format!("j:s>2t:s>=2:t<1:{}", cls(class)),
            CaseTag::JFarSmall { class } => format!("j:s>2t:s<2:{}", cls(class)),
            CaseTag::E { class, large } => {
                format!("e:{}:{}", cls(class), if large { "ts>=1" } else { "ts<1" })
            }
            CaseTag::Kernel {
                class: SigmaClass::Subcritical,
            } => "k:sigma<d/2".into(),
            CaseTag::Kernel {
                class: SigmaClass::Critical,
            } => "k:sigma=d/2".into(),
            CaseTag::Kernel {
                class: SigmaClass::Supercritical,
            } => "k:sigma>d/2".into(),
            CaseTag::L1Norm { far } => if far { "l1:|x|>1" } else { "l1:|x|<=1" }.into(),
        }
    }
}

/// Envelope `shape · exp(-c · rate)` with the constants left out.
///
/// `exp_rate_hi` differs from `exp_rate` only when the two sides of the
/// sandwich carry different rates, in which case `[exp_rate, exp_rate_hi]` is
/// the reported range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeValue {
    pub shape: f64,
    pub exp_rate: f64,
    pub exp_rate_hi: f64,
    pub case_tag: CaseTag,
}

impl EnvelopeValue {
    pub fn new(shape: f64, exp_rate: f64, case_tag: CaseTag) -> Self {
        EnvelopeValue {
            shape,
            exp_rate,
            exp_rate_hi: exp_rate,
            case_tag,
        }
    }

    pub fn log_shape(&self) -> f64 {
        self.shape.ln()
    }

    pub fn has_rate_range(&self) -> bool {
        self.exp_rate_hi != self.exp_rate
    }
}

/// `log(t^A e^{-t})` for `t > 0`.
fn log_gamma_density(a: f64, t: f64) -> f64 {
    a * t.ln() - t
}

/// `∫_{γT}^∞ t^A e^{-t} dt`.
pub fn i_quad(p: &IntegralParams, cfg: &QuadConfig) -> Result<QuadResult> {
    p.check_i()?;
    upper_tail(p.a, p.gamma * p.t, cfg)
}

fn upper_tail(a: f64, lo: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if lo >= 1.0 {
        // shift: t = lo + s
        try_integrate(
            |s| Ok(LogScalar::from_log(log_gamma_density(a, lo + s))),
            &Interval::half_infinite(0.0),
            cfg,
        )
    } else {
        // t = lo e^s, dt = t ds
        let ln_lo = lo.ln();
        try_integrate(
            |s| {
                let ln_t = ln_lo + s;
                Ok(LogScalar::from_log((a + 1.0) * ln_t - ln_t.exp()))
            },
            &Interval::half_infinite(0.0),
            cfg,
        )
    }
}

/// `∫_{γT}^{γS} t^A e^{-t} dt`.
pub fn j_quad(p: &IntegralParams, cfg: &QuadConfig) -> Result<QuadResult> {
    p.check_j()?;
    let (lo, hi) = (p.gamma * p.t, p.gamma * p.s);
    if hi - lo <= lo.min(1.0) {
        try_integrate(
            |t| Ok(LogScalar::from_log(log_gamma_density(p.a, t))),
            &Interval::new(lo, hi),
            cfg,
        )
    } else {
        try_integrate(
            |ln_t| Ok(LogScalar::from_log((p.a + 1.0) * ln_t - ln_t.exp())),
            &Interval::new(lo.ln(), hi.ln()),
            cfg,
        )
    }
}

/// `∫_0^1 t^A exp(-T/t - S t) dt`.
pub fn e_quad(a: f64, t: f64, s: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("exponent A = {a} must be finite")));
    }
    if !(t > 0.0 && t.is_finite() && s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!(
            "need T, S > 0, got T = {t}, S = {s}"
        )));
    }
    // t = e^{-w}, dt = t dw
    try_integrate(
        |w| {
            let x = (-w).exp();
            Ok(LogScalar::from_log(-(a + 1.0) * w - t / x - s * x))
        },
        &Interval::half_infinite(0.0),
        cfg,
    )
}

fn small_argument_shape(a: f64, t: f64, s: f64) -> f64 {
    // three-case profile of ∫_t^s x^A dx, up to constants, with s <= 2
    match ExponentClass::of(a) {
        ExponentClass::Below => t.powf(a + 1.0),
        ExponentClass::Critical => (s / t).ln(),
        ExponentClass::Above => s.powf(a + 1.0),
    }
}

/// Envelope of `I_A(γT)`.
pub fn i_envelope(p: &IntegralParams) -> EnvelopeValue {
    let (a, t) = (p.a, p.t);
    if t >= 1.0 {
        EnvelopeValue::new(t.powf(a), p.gamma * t, CaseTag::ILarge)
    } else {
        let class = ExponentClass::of(a);
        let shape = match class {
            ExponentClass::Above => 1.0,
            _ => small_argument_shape(a, t, 2.0),
        };
        EnvelopeValue::new(shape, 0.0, CaseTag::ISmall { class })
    }
}

/// Envelope of `J_A(γT, γS)`.
pub fn j_envelope(p: &IntegralParams) -> Result<EnvelopeValue> {
    p.check_j()?;
    let (a, t, s) = (p.a, p.t, p.s);
    if s <= 2.0 * t {
        return Ok(EnvelopeValue {
            shape: t.powf(a) * (s - t),
            exp_rate: p.gamma * t,
            exp_rate_hi: 2.0 * p.gamma * t,
            case_tag: CaseTag::JComparable,
        });
    }
    let class = ExponentClass::of(a);
    if s >= 2.0 {
        let inner = i_envelope(p);
        return Ok(EnvelopeValue {
            case_tag: CaseTag::JFarTail {
                t_large: t >= 1.0,
                class,
            },
            ..inner
        });
    }
    Ok(EnvelopeValue::new(
        small_argument_shape(a, t, s),
        0.0,
        CaseTag::JFarSmall { class },
    ))
}

/// `max(ln x, 0)`.
pub fn log_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

/// Envelope of `E_A(T, S)`.
pub fn e_envelope(a: f64, t: f64, s: f64) -> Result<EnvelopeValue> {
    if !(t > 0.0 && s > 0.0) {
        return Err(Error::Domain(format!(
            "need T, S > 0, got T = {t}, S = {s}"
        )));
    }
    let ts = t * t.max(s);
    let class = ExponentClass::of(a);
    let shape = match class {
        ExponentClass::Below => t.powf(a + 1.0),
        ExponentClass::Critical => 1.0 + log_plus(1.0 / ts),
        ExponentClass::Above => s.max(1.0).powf(-a - 1.0),
    };
    Ok(EnvelopeValue::new(
        shape,
        ts.sqrt(),
        CaseTag::E {
            class,
            large: ts >= 1.0,
        },
    ))
}
