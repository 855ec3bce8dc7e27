//! Sign plus log-magnitude reals.
//!
//! Kernel products such as `exp(-c |x-y| |x|)` leave the range of `f64` long
//! before the quantities built from them stop being meaningful, so every
//! integrand in this crate is evaluated as a [`LogScalar`].
//!
//! The log-magnitude is held split as `k ln 2 + frac` with integral `k` and
//! `|frac| <= ln 2 / 2`. A single `f64` logarithm of a number near `1e300`
//! carries an absolute error of roughly `700 eps`, which would cost two
//! digits on the way back to linear scale; the split form does not.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg};

use serde::{Deserialize, Serialize};

const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;
const LN2: f64 = std::f64::consts::LN_2;
const HALF_LN2: f64 = 0.5 * LN2;

/// A real number stored as `sign * exp(log_mag)`.
///
/// `sign == 0` if and only if the magnitude is zero (`log_mag() == -inf`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScalar {
    sign: i8,
    /// Integral power of two.
    exp2: f64,
    /// Natural log of the remaining mantissa, in `[-ln2/2, ln2/2]`.
    frac: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        exp2: 0.0,
        frac: 0.0,
    };
    pub const ONE: LogScalar = LogScalar {
        sign: 1,
        exp2: 0.0,
        frac: 0.0,
    };

    fn normalized(sign: i8, exp2: f64, frac: f64) -> Self {
        if sign == 0 || frac == f64::NEG_INFINITY || exp2 == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if frac.is_nan() || exp2.is_nan() {
            return LogScalar {
                sign: sign.signum(),
                exp2: f64::NAN,
                frac: f64::NAN,
            };
        }
        if exp2 == f64::INFINITY || frac == f64::INFINITY {
            return LogScalar {
                sign: sign.signum(),
                exp2: f64::INFINITY,
                frac: 0.0,
            };
        }
        if frac.abs() <= HALF_LN2 {
            return LogScalar {
                sign: sign.signum(),
                exp2,
                frac,
            };
        }
        let k = (frac / LN2).round();
        let frac = (frac - k * LN2_HI) - k * LN2_LO;
        LogScalar {
            sign: sign.signum(),
            exp2: exp2 + k,
            frac,
        }
    }

    /// Builds `sign * exp(log_mag)`; `sign == 0` or `log_mag == -inf` give zero.
    pub fn new(sign: i8, log_mag: f64) -> Self {
        Self::normalized(sign, 0.0, log_mag)
    }

    /// Positive value `exp(log_mag)`.
    pub fn from_log(log_mag: f64) -> Self {
        Self::new(1, log_mag)
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            return Self::ZERO;
        }
        if !x.is_finite() {
            return Self::normalized(if x > 0.0 { 1 } else { -1 }, x.abs().ln(), 0.0);
        }
        let sign = if x > 0.0 { 1 } else { -1 };
        let (mut m, mut e) = (x.abs(), 0.0);
        if m < f64::MIN_POSITIVE {
            m *= 2f64.powi(64);
            e -= 64.0;
        }
        let bits = m.to_bits();
        let be = ((bits >> 52) & 0x7ff) as i64 - 1023;
        // mantissa in [1, 2)
        let mant = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
        let (mant, be) = if mant > std::f64::consts::SQRT_2 {
            (mant * 0.5, be + 1)
        } else {
            (mant, be)
        };
        LogScalar {
            sign,
            exp2: e + be as f64,
            frac: mant.ln(),
        }
    }

    pub fn to_real(self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        if !self.exp2.is_finite() {
            return f64::from(self.sign)
                * if self.exp2 > 0.0 {
                    f64::INFINITY
                } else {
                    self.exp2
                };
        }
        let m = f64::from(self.sign) * self.frac.exp();
        let e = self.exp2.clamp(-2200.0, 2200.0) as i32;
        // two steps keep 2^e representable through the subnormal range
        let e1 = e / 2;
        m * 2f64.powi(e1) * 2f64.powi(e - e1)
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn log_mag(self) -> f64 {
        if self.sign == 0 {
            f64::NEG_INFINITY
        } else {
            self.exp2 * LN2 + self.frac
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(self) -> bool {
        self.sign == 0 || (self.exp2.is_finite() && self.frac.is_finite())
    }

    pub fn is_nan(self) -> bool {
        self.frac.is_nan() || self.exp2.is_nan()
    }

    pub fn abs(self) -> Self {
        LogScalar {
            sign: self.sign.abs(),
            ..self
        }
    }

    /// `self * exp(shift)`.
    pub fn scale_log(self, shift: f64) -> Self {
        self * Self::from_log(shift)
    }

    /// `self^p` for nonnegative `self`.
    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign >= 0, "powf of a negative LogScalar");
        if self.sign == 0 {
            return if p > 0.0 {
                Self::ZERO
            } else {
                Self::from_log(f64::INFINITY)
            };
        }
        Self::normalized(
            1,
            0.0,
            self.exp2 * p * LN2_HI + (self.exp2 * p * LN2_LO + self.frac * p),
        )
    }

    /// Sum of many values without forming any of them in linear scale.
    pub fn sum<I: IntoIterator<Item = LogScalar>>(items: I) -> Self {
        let items: Vec<LogScalar> = items.into_iter().filter(|v| !v.is_zero()).collect();
        let Some(pivot) =
            items
                .iter()
                .copied()
                .reduce(|a, b| if b.log_mag() > a.log_mag() { b } else { a })
        else {
            return Self::ZERO;
        };
        if !pivot.is_finite() {
            return items.into_iter().fold(Self::ZERO, |a, b| a + b);
        }
        let acc: f64 = items
            .iter()
            .map(|v| {
                f64::from(v.sign) * ((v.exp2 - pivot.exp2) * LN2 + (v.frac - pivot.frac)).exp()
            })
            .sum();
        let pivot_mag = LogScalar { sign: 1, ..pivot };
        Self::from_real(acc) * pivot_mag
    }
}

impl Default for LogScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        Self::from_real(x)
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        Self::normalized(
            self.sign * rhs.sign,
            self.exp2 + rhs.exp2,
            self.frac + rhs.frac,
        )
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        assert!(!rhs.is_zero(), "division of LogScalar by zero");
        Self::normalized(
            self.sign * rhs.sign,
            self.exp2 - rhs.exp2,
            self.frac - rhs.frac,
        )
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> LogScalar {
        LogScalar {
            sign: -self.sign,
            ..self
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.log_mag() >= rhs.log_mag() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if !hi.is_finite() {
            return hi;
        }
        let t = ((lo.exp2 - hi.exp2) * LN2 + (lo.frac - hi.frac)).exp();
        if hi.sign == lo.sign {
            Self::normalized(hi.sign, hi.exp2, hi.frac + t.ln_1p())
        } else if t == 1.0 {
            Self::ZERO
        } else {
            Self::normalized(hi.sign, hi.exp2, hi.frac + (-t).ln_1p())
        }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let by_mag = |a: &LogScalar, b: &LogScalar| {
            a.exp2.partial_cmp(&b.exp2).and_then(|o| match o {
                Ordering::Equal => a.frac.partial_cmp(&b.frac),
                o => Some(o),
            })
        };
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => by_mag(self, other),
                _ => by_mag(other, self),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_mag()),
        }
    }
}
