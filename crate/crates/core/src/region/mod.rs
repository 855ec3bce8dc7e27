//! Which pairs `(1/p, 1/q)` make `I^σ : L^p -> L^q` bounded.
//!
//! For `σ < d/2`, with `a = 2σ/d`, strong type holds exactly on
//!
//! ```text
//! R = { max(0, ip - a) <= iq <= min(1, ip + a) }
//!     minus the segment { iq = ip + a, 0 <= ip <= 1 - a }
//!     minus the corners (a, 0) and (1, 1 - a).
//! ```
//!
//! Classification is exact when `σ` is rational; otherwise comparisons use a
//! tolerance of [`FLOAT_TOLERANCE`] and report a boundary flag.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::kernels::KernelParams;
use crate::special::SigmaClass;
use crate::{Error, Result};

pub type Rational = Ratio<i64>;

/// Slack for comparisons when `σ` is only known as a float.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Largest denominator accepted when recovering a rational `σ` from a float.
const MAX_SIGMA_DENOMINATOR: i64 = 1_000_000;

/// `(1/p, 1/q)` in the unit square, with `1/∞ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionPoint {
    pub ip: Rational,
    pub iq: Rational,
}

impl RegionPoint {
    pub fn new(ip: Rational, iq: Rational) -> Result<Self> {
        let unit = |v: Rational| v >= Rational::zero() && v <= Rational::one();
        if !(unit(ip) && unit(iq)) {
            return Err(Error::Domain(format!(
                "({ip}, {iq}) lies outside the unit square"
            )));
        }
        Ok(RegionPoint { ip, iq })
    }

    /// `(ip_num / ip_den, iq_num / iq_den)`.
    pub fn from_fractions(ip_num: i64, ip_den: i64, iq_num: i64, iq_den: i64) -> Result<Self> {
        if ip_den == 0 || iq_den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(Rational::new(ip_num, ip_den), Rational::new(iq_num, iq_den))
    }

    /// The point of the dual pair `(q', p')`.
    pub fn dual(&self) -> Self {
        RegionPoint {
            ip: Rational::one() - self.iq,
            iq: Rational::one() - self.ip,
        }
    }
}

/// `2σ/d` and the regime, exact when possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold {
    Exact(Rational),
    Float(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub d: u32,
    /// `a = 2σ/d`.
    pub threshold: Threshold,
}

impl RegionParams {
    /// Exact parameters with `σ = sigma_num / sigma_den`.
    pub fn exact(d: u32, sigma_num: i64, sigma_den: i64) -> Result<Self> {
        if d == 0 || sigma_den == 0 {
            return Err(Error::Domain(
                "need d >= 1 and a nonzero denominator".into(),
            ));
        }
        let sigma = Rational::new(sigma_num, sigma_den);
        if sigma <= Rational::zero() {
            return Err(Error::Domain(format!("sigma = {sigma} must be positive")));
        }
        Ok(RegionParams {
            d,
            threshold: Threshold::Exact(sigma * 2 / i64::from(d)),
        })
    }

    /// Recovers an exact `σ` when the float is a ratio with a small
    /// denominator; falls back to tolerance-based comparisons otherwise.
    pub fn from_kernel(params: &KernelParams) -> Result<Self> {
        params.validate()?;
        let d = params.d;
        if let Some(r) = Rational::approximate_float(params.sigma) {
            if *r.denom() <= MAX_SIGMA_DENOMINATOR && r.to_f64() == Some(params.sigma) {
                return Self::exact(d, *r.numer(), *r.denom());
            }
        }
        Ok(RegionParams {
            d,
            threshold: Threshold::Float(2.0 * params.sigma / f64::from(d)),
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.threshold, Threshold::Exact(_))
    }

    pub fn threshold_f64(&self) -> f64 {
        match self.threshold {
            Threshold::Exact(a) => a.to_f64().unwrap_or(f64::NAN),
            Threshold::Float(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Open,
}

impl Verdict {
    fn of(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Open => "open",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The clause of the classification that decided a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RationaleTag {
    /// Inside `R`: bounded.
    InRegion,
    /// Outside the closure of `R`: not even of restricted weak type.
    OutsideClosure,
    /// Corner `(1, 1 - 2σ/d)`: weak but not strong type.
    WeakCornerL1,
    /// Point `(0, 2σ/d)`: weak but not strong type.
    WeakCornerLInfinity,
    /// Corner `(2σ/d, 0)`: restricted weak but not weak type.
    RestrictedWeakCorner,
    /// Open part of the excluded segment `iq = ip + 2σ/d`.
    OpenSegment,
    /// Endpoint `(1 - 2σ/d, 1)` of the excluded segment, unresolved.
    OpenSegmentEndpoint,
    /// `σ = d/2`, any point other than the two exceptions.
    CriticalBounded,
    /// `σ = d/2`, `(p, q) = (∞, 1)`: weak but not strong type.
    CriticalWeakInfinityOne,
    /// `σ = d/2`, `(p, q) = (1, ∞)`: not of restricted weak type.
    CriticalFailsOneInfinity,
    /// `σ > d/2`: bounded for every pair.
    Supercritical,
}

impl RationaleTag {
    pub fn label(&self) -> &'static str {
        match self {
            RationaleTag::InRegion => "in_region",
            RationaleTag::OutsideClosure => "outside_closure",
            RationaleTag::WeakCornerL1 => "weak_corner_l1",
            RationaleTag::WeakCornerLInfinity => "weak_corner_linf",
            RationaleTag::RestrictedWeakCorner => "restricted_weak_corner",
            RationaleTag::OpenSegment => "open_segment",
            RationaleTag::OpenSegmentEndpoint => "open_segment_endpoint",
            RationaleTag::CriticalBounded => "critical_bounded",
            RationaleTag::CriticalWeakInfinityOne => "critical_weak_inf_1",
            RationaleTag::CriticalFailsOneInfinity => "critical_fails_1_inf",
            RationaleTag::Supercritical => "supercritical",
        }
    }
}

impl fmt::Display for RationaleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Classification {
    pub strong: Verdict,
    pub weak: Verdict,
    pub restricted_weak: Verdict,
    pub rationale_tag: RationaleTag,
    /// Some comparison was decided within [`FLOAT_TOLERANCE`].
    pub near_boundary: bool,
}

impl Classification {
    fn new(
        strong: Verdict,
        weak: Verdict,
        restricted_weak: Verdict,
        tag: RationaleTag,
        near_boundary: bool,
    ) -> Self {
        Classification {
            strong,
            weak,
            restricted_weak,
            rationale_tag: tag,
            near_boundary,
        }
    }

    fn all(v: bool, tag: RationaleTag, near_boundary: bool) -> Self {
        let v = Verdict::of(v);
        Self::new(v, v, v, tag, near_boundary)
    }
}

/// Signs of `c_ip ip + c_iq iq + c_a a + c0`, exact or within tolerance.
struct Comparator {
    ip: Rational,
    iq: Rational,
    threshold: Threshold,
    flagged: Cell<bool>,
}

impl Comparator {
    fn new(params: &RegionParams, pt: &RegionPoint) -> Self {
        Comparator {
            ip: pt.ip,
            iq: pt.iq,
            threshold: params.threshold,
            flagged: Cell::new(false),
        }
    }

    fn sign(&self, c_ip: i64, c_iq: i64, c_a: i64, c0: i64) -> Ordering {
        match self.threshold {
            Threshold::Exact(a) => {
                let v = self.ip * c_ip + self.iq * c_iq + a * c_a + Rational::from_integer(c0);
                v.cmp(&Rational::zero())
            }
            Threshold::Float(a) => {
                let f = |r: Rational| r.to_f64().unwrap_or(f64::NAN);
                let v = f(self.ip) * c_ip as f64
                    + f(self.iq) * c_iq as f64
                    + a * c_a as f64
                    + c0 as f64;
                if v.abs() <= FLOAT_TOLERANCE {
                    self.flagged.set(true);
                    Ordering::Equal
                } else if v > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// `a` against 1.
    fn regime(&self) -> SigmaClass {
        match self.sign(0, 0, 1, -1) {
            Ordering::Less => SigmaClass::Subcritical,
            Ordering::Equal => SigmaClass::Critical,
            Ordering::Greater => SigmaClass::Supercritical,
        }
    }

    fn ip_is(&self, v: i64) -> bool {
        self.sign(1, 0, 0, -v) == Ordering::Equal
    }

    fn iq_is(&self, v: i64) -> bool {
        self.sign(0, 1, 0, -v) == Ordering::Equal
    }

    /// Inside the closed hexagon `max(0, ip - a) <= iq <= min(1, ip + a)`.
    fn in_closure(&self) -> bool {
        self.sign(-1, 1, 1, 0) != Ordering::Less && self.sign(-1, 1, -1, 0) != Ordering::Greater
    }

    /// On the line `iq = ip + a`.
    fn on_upper_line(&self) -> bool {
        self.sign(-1, 1, -1, 0) == Ordering::Equal
    }

    /// On the line `iq = ip - a`.
    fn on_lower_line(&self) -> bool {
        self.sign(-1, 1, 1, 0) == Ordering::Equal
    }
}

fn subcritical(c: &Comparator) -> RationaleTag {
    if !c.in_closure() {
        return RationaleTag::OutsideClosure;
    }
    if c.on_upper_line() {
        // the segment runs from (0, a) to (1 - a, 1)
        if c.ip_is(0) {
            return RationaleTag::WeakCornerLInfinity;
        }
        if c.iq_is(1) {
            return RationaleTag::OpenSegmentEndpoint;
        }
        return RationaleTag::OpenSegment;
    }
    if c.on_lower_line() && c.iq_is(0) {
        return RationaleTag::RestrictedWeakCorner;
    }
    if c.ip_is(1) && c.sign(0, 1, 1, -1) == Ordering::Equal {
        return RationaleTag::WeakCornerL1;
    }
    RationaleTag::InRegion
}

fn classify_tag(tag: RationaleTag, near_boundary: bool) -> Classification {
    use RationaleTag::*;
    use Verdict::*;
    match tag {
        InRegion | CriticalBounded | Supercritical => Classification::all(true, tag, near_boundary),
        OutsideClosure | CriticalFailsOneInfinity => Classification::all(false, tag, near_boundary),
        WeakCornerL1 | WeakCornerLInfinity | CriticalWeakInfinityOne => {
            Classification::new(No, Yes, Yes, tag, near_boundary)
        }
        RestrictedWeakCorner => Classification::new(No, No, Yes, tag, near_boundary),
        OpenSegment | OpenSegmentEndpoint => {
            Classification::new(No, Open, Open, tag, near_boundary)
        }
    }
}

/// Membership of `(1/p, 1/q)` in `R`; defined for `σ < d/2` only.
pub fn in_region_r(params: &RegionParams, pt: &RegionPoint) -> Result<bool> {
    let c = Comparator::new(params, pt);
    if c.regime() != SigmaClass::Subcritical {
        return Err(Error::Regime(format!(
            "2σ/d = {} is not below 1",
            params.threshold_f64()
        )));
    }
    Ok(subcritical(&c) == RationaleTag::InRegion)
}

/// Strong, weak and restricted weak type of `I^σ` at `(1/p, 1/q)`.
pub fn classify(params: &RegionParams, pt: &RegionPoint) -> Classification {
    let c = Comparator::new(params, pt);
    let tag = match c.regime() {
        SigmaClass::Subcritical => subcritical(&c),
        SigmaClass::Critical => {
            if c.ip_is(0) && c.iq_is(1) {
                RationaleTag::CriticalWeakInfinityOne
            } else if c.ip_is(1) && c.iq_is(0) {
                RationaleTag::CriticalFailsOneInfinity
            } else {
                RationaleTag::CriticalBounded
            }
        }
        SigmaClass::Supercritical => RationaleTag::Supercritical,
    };
    classify_tag(tag, c.flagged.get())
}

/// The `n × n` grid `ip = i/(n-1)`, `iq = j/(n-1)`, in row-major order of
/// `(i, j)`.
pub fn rational_grid(n: usize) -> Result<Vec<RegionPoint>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "grid needs at least 2 points per axis, got {n}"
        )));
    }
    let den = (n - 1) as i64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..=den {
        for j in 0..=den {
            out.push(RegionPoint {
                ip: Rational::new(i, den),
                iq: Rational::new(j, den),
            });
        }
    }
    Ok(out)
}

/// Classification of every point of [`rational_grid`].
pub fn raster(params: &RegionParams, n: usize) -> Result<Vec<(RegionPoint, Classification)>> {
    Ok(rational_grid(n)?
        .into_iter()
        .map(|pt| (pt, classify(params, &pt)))
        .collect())
}

/// Strong-type raster as text: `#` bounded, `o` open, `w` weak only,
/// `r` restricted weak only, `.` unbounded; `iq` increases upward.
pub fn ascii_raster(params: &RegionParams, n: usize) -> Result<String> {
    let den = (n.max(2) - 1) as i64;
    let mut s = String::new();
    for j in (0..=den).rev() {
        for i in 0..=den {
            let pt = RegionPoint {
                ip: Rational::new(i, den),
                iq: Rational::new(j, den),
            };
            let c = classify(params, &pt);
            s.push(match (c.strong, c.weak, c.restricted_weak) {
                (Verdict::Yes, _, _) => '#',
                (_, Verdict::Open, _) => 'o',
                (_, Verdict::Yes, _) => 'w',
                (_, _, Verdict::Yes) => 'r',
                _ => '.',
            });
        }
        s.push('\n');
    }
    Ok(s)
}
