//! Experiments with a verdict: calibrated sweeps and the counterexample
//! constructions.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::calibrate::{calibrate, CalibrationResult};
use super::sweep::{calibration_rows, run_sweep, SweepRow, SweepSpec};
use crate::kernels::KernelParams;
use crate::num::QuadConfig;
use crate::operator::{
    apply_radial, apply_radial_many, ball_volume, counterexample_a, counterexample_b,
    critical_log_coefficient, indicator_ball,
};
use crate::special::SigmaClass;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn of(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self == Outcome::Pass
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.passed() { "pass" } else { "fail" })
    }
}

/// One quantitative claim of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "super::nonfinite")]
    pub measured: f64,
    #[serde(with = "super::nonfinite")]
    pub expected: f64,
    /// Meaning depends on `relation`.
    #[serde(with = "super::nonfinite")]
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

/// How `measured` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured - expected| <= tolerance |expected|`
    Relative,
    /// `measured >= expected - tolerance`
    AtLeast,
    /// `measured <= expected + tolerance`
    AtMost,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tolerance: f64,
        relation: Relation,
    ) -> Self {
        let pass = match relation {
            Relation::Relative => (measured - expected).abs() <= tolerance * expected.abs(),
            Relation::AtLeast => measured >= expected - tolerance,
            Relation::AtMost => measured <= expected + tolerance,
        };
        Check {
            name: name.into(),
            measured,
            expected,
            tolerance,
            relation,
            pass: pass && measured.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub kind: String,
    pub params: Option<KernelParams>,
    pub rows: Vec<SweepRow>,
    pub calibration: Option<CalibrationResult>,
    pub checks: Vec<Check>,
    pub verdict: Outcome,
    /// Weak-type threshold: the superlevel sets are taken at
    /// `lambda · r^{-2σ}` for each radius `r`.
    #[serde(default, with = "super::nonfinite::option")]
    pub lambda: Option<f64>,
}

impl ExperimentReport {
    pub fn new(kind: impl Into<String>, params: Option<KernelParams>) -> Self {
        ExperimentReport {
            schema: SCHEMA_VERSION,
            kind: kind.into(),
            params,
            rows: Vec::new(),
            calibration: None,
            checks: Vec::new(),
            verdict: Outcome::Pass,
            lambda: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.verdict = Outcome::of(self.checks.iter().all(|c| c.pass));
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs a sweep and calibrates it; see [`calibration_report`].
pub fn sweep_report(spec: &SweepSpec) -> Result<ExperimentReport> {
    let rows = run_sweep(spec)?;
    calibration_report(spec.target.name(), spec.kernel, rows, &spec.describe())
}

/// Calibrates sweep rows. The verdict requires a finite `C` and
/// `0 <= c2 <= c1`; rows too few or too narrow to calibrate are reported
/// without calibration or checks.
pub fn calibration_report(
    kind: &str,
    params: Option<KernelParams>,
    rows: Vec<SweepRow>,
    grid_spec: &str,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(kind, params);
    let cal = calibration_rows(&rows);
    match calibrate(&cal, grid_spec) {
        Ok(fit) => {
            report.push(Check::new(
                "calibration_constant",
                fit.c,
                1.0,
                f64::INFINITY,
                Relation::AtLeast,
            ));
            report.push(Check::new(
                "c2_nonnegative",
                fit.c2,
                0.0,
                0.0,
                Relation::AtLeast,
            ));
            report.push(Check::new(
                "c2_le_c1",
                fit.c2,
                fit.c1,
                1e-12,
                Relation::AtMost,
            ));
            report.calibration = Some(fit);
        }
        Err(Error::InsufficientSpread(_)) => {}
        Err(e) => return Err(e),
    }
    report.rows = rows;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    A,
    B,
    UpperTriangle,
    SigmaHalf,
}

impl CounterexampleKind {
    pub const ALL: [CounterexampleKind; 4] = [
        CounterexampleKind::A,
        CounterexampleKind::B,
        CounterexampleKind::UpperTriangle,
        CounterexampleKind::SigmaHalf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CounterexampleKind::A => "a",
            CounterexampleKind::B => "b",
            CounterexampleKind::UpperTriangle => "upper-triangle",
            CounterexampleKind::SigmaHalf => "sigma-half",
        }
    }
}

impl fmt::Display for CounterexampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CounterexampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown counterexample kind {s:?}")))
    }
}

/// Inputs of [`run_counterexample`]. `None` fields take the defaults of
/// [`CounterexampleSpec::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub kind: CounterexampleKind,
    pub params: KernelParams,
    /// `1/p`
    pub ip: Option<f64>,
    /// `1/q`
    pub iq: Option<f64>,
    /// Range of `|x|` for the slope fits of kinds `a` and `b`.
    pub window: Option<(f64, f64)>,
    /// Number of sample points in the window.
    pub points: usize,
    /// Radii `r` of `f_r` (upper-triangle) or `ε` of `f_ε` (sigma-half).
    pub radii: Option<Vec<f64>>,
    /// Relative tolerance of the main check.
    pub tolerance: f64,
}

impl CounterexampleSpec {
    pub fn new(kind: CounterexampleKind, params: KernelParams) -> Self {
        let tolerance = match kind {
            CounterexampleKind::SigmaHalf => 0.2,
            _ => 0.05,
        };
        CounterexampleSpec {
            kind,
            params,
            ip: None,
            iq: None,
            window: None,
            points: 8,
            radii: None,
            tolerance,
        }
    }

    pub fn exponents(mut self, ip: f64, iq: f64) -> Self {
        self.ip = Some(ip);
        self.iq = Some(iq);
        self
    }
}

fn lsq_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Least squares for `y ≈ c0 + c1 x1 + c2 x2`.
fn lsq_plane(x1: &[f64], x2: &[f64], y: &[f64]) -> [f64; 3] {
    let n = y.len() as f64;
    let m = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (m1, m2, my) = (m(x1), m(x2), m(y));
    let cov = |a: &[f64], ma: f64, b: &[f64], mb: f64| {
        a.iter()
            .zip(b)
            .map(|(p, q)| (p - ma) * (q - mb))
            .sum::<f64>()
    };
    let (s11, s22, s12) = (
        cov(x1, m1, x1, m1),
        cov(x2, m2, x2, m2),
        cov(x1, m1, x2, m2),
    );
    let (s1y, s2y) = (cov(x1, m1, y, my), cov(x2, m2, y, my));
    let det = s11 * s22 - s12 * s12;
    let c1 = (s1y * s22 - s2y * s12) / det;
    let c2 = (s2y * s11 - s1y * s12) / det;
    [my - c1 * m1 - c2 * m2, c1, c2]
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 3 {
        return Err(Error::Domain(format!(
            "need 0 < lo < hi and at least 3 points, got [{lo}, {hi}] x {n}"
        )));
    }
    Ok((0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect())
}

fn exponent(spec: &CounterexampleSpec, v: Option<f64>, name: &str) -> Result<f64> {
    let v = v.ok_or_else(|| Error::ParamOutOfRegime(format!("{} needs 1/{name}", spec.kind)))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("1/{name} = {v} outside [0, 1]")));
    }
    Ok(v)
}

fn sample_row(params: &KernelParams, x: f64, value_log: f64, shape_log: f64, err: f64) -> SweepRow {
    SweepRow {
        d: Some(params.d),
        sigma: Some(params.sigma),
        xnorm: Some(x),
        quad_log_value: value_log,
        env_shape_log: Some(shape_log),
        env_rate: Some(0.0),
        log_ratio: Some(value_log - shape_log),
        err_est: err,
        ..Default::default()
    }
}

/// Runs one of the constructions showing unboundedness.
///
/// * `a`: lower triangle `1/q < 1/p - 2σ/d`; the local slope of `I^σ f` near
///   the origin is `-d/q`.
/// * `b`: segment `1/q = 1/p + 2σ/d`; for large `|x|`,
///   `log I^σ f = α - (d/q) log|x| + γ log log|x|` with `γ < 0`.
/// * `upper-triangle`: `1/q > 1/p + 2σ/d`; with `f_r` the indicator of the
///   ball of radius `r`, `I^σ f_r >= κ |x|^{-2σ}` on `1 < |x| < r` uniformly
///   in `r`, and the superlevel set at `λ_r = (κ/2) r^{-2σ}` has measure
///   growing like `r^d`, faster than the `r^{dq/p + 2σq}` weak type allows.
/// * `sigma-half`: `σ = d/2`; `sup I^σ f_ε / |B_ε|` grows like
///   `c_d log(1/ε)`.
pub fn run_counterexample(spec: &CounterexampleSpec, cfg: &QuadConfig) -> Result<ExperimentReport> {
    let params = spec.params;
    params.validate()?;
    let d = f64::from(params.d);
    let a = 2.0 * params.sigma / d;
    let needs_subcritical = || {
        if params.sigma_class() != SigmaClass::Subcritical {
            return Err(Error::ParamOutOfRegime(format!(
                "{} needs σ < d/2, got σ = {}",
                spec.kind, params.sigma
            )));
        }
        Ok(())
    };
    let mut report = ExperimentReport::new(format!("counterexample-{}", spec.kind), Some(params));
    match spec.kind {
        CounterexampleKind::A => {
            needs_subcritical()?;
            let (ip, iq) = (exponent(spec, spec.ip, "p")?, exponent(spec, spec.iq, "q")?);
            if !(iq < ip - a) || iq == 0.0 {
                return Err(Error::ParamOutOfRegime(format!(
                    "need 0 < 1/q < 1/p - 2σ/d, got ({ip}, {iq})"
                )));
            }
            let (lo, hi) = spec.window.unwrap_or((1e-6, 1e-5));
            let xs = log_grid(lo, hi, spec.points)?;
            let f = counterexample_a(&params, 1.0 / iq)?;
            let v = apply_radial_many(&params, &f, &xs, cfg)?;
            let want = -d * iq;
            for s in &v {
                report.rows.push(sample_row(
                    &params,
                    s.xnorm,
                    s.value.log_mag(),
                    want * s.xnorm.ln(),
                    s.error_estimate,
                ));
            }
            let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            let ly: Vec<f64> = v.iter().map(|s| s.value.log_mag()).collect();
            report.push(Check::new(
                "slope",
                lsq_line(&lx, &ly).1,
                want,
                spec.tolerance,
                Relation::Relative,
            ));
        }
        CounterexampleKind::B => {
            needs_subcritical()?;
            let ip = exponent(spec, spec.ip, "p")?;
            let iq = spec.iq.unwrap_or(ip + a);
            if ip == 0.0 || (iq - (ip + a)).abs() > 1e-12 || iq > 1.0 {
                return Err(Error::ParamOutOfRegime(format!(
                    "need 1/q = 1/p + 2σ/d <= 1, 1/p > 0, got ({ip}, {iq})"
                )));
            }
            let (lo, hi) = spec.window.unwrap_or((10.0, 200.0));
            let xs = log_grid(lo, hi, spec.points.max(12))?;
            let f = counterexample_b(&params, 1.0 / ip)?;
            let v = apply_radial_many(&params, &f, &xs, cfg)?;
            let want = -(d * ip + 2.0 * params.sigma);
            for s in &v {
                report.rows.push(sample_row(
                    &params,
                    s.xnorm,
                    s.value.log_mag(),
                    want * s.xnorm.ln(),
                    s.error_estimate,
                ));
            }
            let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
            let llx: Vec<f64> = lx.iter().map(|x| x.ln()).collect();
            let ly: Vec<f64> = v.iter().map(|s| s.value.log_mag()).collect();
            let coef = lsq_plane(&lx, &llx, &ly);
            report.push(Check::new(
                "power",
                coef[1],
                want,
                spec.tolerance,
                Relation::Relative,
            ));
            report.push(Check::new(
                "log_exponent_negative",
                coef[2],
                0.0,
                0.0,
                Relation::AtMost,
            ));
            // log v + (d/q) log x against -(1/q) log log x
            let resid: Vec<f64> = ly.iter().zip(&lx).map(|(y, x)| y - want * x).collect();
            let scaled: Vec<f64> = llx.iter().map(|l| -iq * l).collect();
            let fit = lsq_line(&scaled, &resid).1;
            report.push(Check::new(
                "log_factor_slope_positive",
                fit,
                0.0,
                0.0,
                Relation::AtLeast,
            ));
        }
        CounterexampleKind::UpperTriangle => {
            needs_subcritical()?;
            let (ip, iq) = (exponent(spec, spec.ip, "p")?, exponent(spec, spec.iq, "q")?);
            if !(iq > ip + a) {
                return Err(Error::ParamOutOfRegime(format!(
                    "need 1/q > 1/p + 2σ/d, got ({ip}, {iq})"
                )));
            }
            upper_triangle(spec, &mut report, ip, iq, cfg)?;
        }
        CounterexampleKind::SigmaHalf => {
            if params.sigma_class() != SigmaClass::Critical {
                return Err(Error::ParamOutOfRegime(format!(
                    "sigma-half needs σ = d/2, got σ = {}",
                    params.sigma
                )));
            }
            let eps = spec
                .radii
                .clone()
                .unwrap_or_else(|| (0..4).map(|k| 1e-3 / 2f64.powi(k)).collect());
            if eps.len() < 2 || eps.iter().any(|&e| !(e > 0.0 && e < (-1f64).exp())) {
                return Err(Error::Domain("need at least two ε in (0, 1/e)".into()));
            }
            let cd = critical_log_coefficient(params.d);
            let mut normalized = Vec::with_capacity(eps.len());
            for &e in &eps {
                // I f_ε is radially decreasing, so its supremum is at the origin
                let s = apply_radial(&params, &indicator_ball(e)?, 0.0, cfg)?;
                let vol = ball_volume(params.d, e);
                let n = s.real() / vol / cd;
                let mut row = sample_row(
                    &params,
                    0.0,
                    s.value.log_mag(),
                    (cd * vol * (1.0 / e).ln()).ln(),
                    s.error_estimate,
                );
                row.s = Some(e);
                report.rows.push(row);
                normalized.push(n);
            }
            for (k, w) in normalized.windows(2).enumerate() {
                let ratio = eps[k] / eps[k + 1];
                let want = ratio.ln();
                report.push(Check::new(
                    format!("log_step_{k}"),
                    w[1] - w[0],
                    want,
                    spec.tolerance,
                    Relation::Relative,
                ));
            }
        }
    }
    Ok(report)
}

/// Largest `|x|` in `[lo, hi]` with `g(|x|) > 0`, for `g` decreasing.
fn bisect_log(lo: f64, hi: f64, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        if g(m.exp())? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

fn upper_triangle(
    spec: &CounterexampleSpec,
    report: &mut ExperimentReport,
    ip: f64,
    iq: f64,
    cfg: &QuadConfig,
) -> Result<()> {
    let params = spec.params;
    let (d, sigma) = (f64::from(params.d), params.sigma);
    let radii = spec.radii.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0]);
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 1.0 {
        return Err(Error::Domain("radii must be increasing and above 1".into()));
    }
    let n = 16;
    let scaled_min = |r: f64| -> Result<(f64, Vec<(f64, f64, f64)>)> {
        let xs: Vec<f64> = (1..=n).map(|k| r.powf(k as f64 / (n + 1) as f64)).collect();
        let v = apply_radial_many(&params, &indicator_ball(r)?, &xs, cfg)?;
        let m = v
            .iter()
            .map(|s| s.real() * s.xnorm.powf(2.0 * sigma))
            .fold(f64::INFINITY, f64::min);
        Ok((
            m,
            v.iter()
                .map(|s| (s.xnorm, s.value.log_mag(), s.error_estimate))
                .collect(),
        ))
    };
    let (kappa, first) = scaled_min(radii[0])?;
    let lambda = 0.5 * kappa;
    report.lambda = Some(lambda);
    let mut samples = vec![(radii[0], first)];
    for &r in &radii[1..] {
        let (m, v) = scaled_min(r)?;
        report.push(Check::new(
            format!("kappa_uniform_r{r}"),
            m,
            kappa,
            0.0,
            Relation::AtLeast,
        ));
        samples.push((r, v));
    }
    let shape = |x: f64| kappa.ln() - 2.0 * sigma * x.ln();
    let mut ln_measure = Vec::with_capacity(radii.len());
    for (r, v) in samples {
        for (x, val, err) in v {
            let mut row = sample_row(&params, x, val, shape(x), err);
            row.s = Some(r);
            report.rows.push(row);
        }
        // superlevel radius of the radially decreasing I f_r at λ_r
        let level = (lambda * r.powf(-2.0 * sigma)).ln();
        let f = indicator_ball(r)?;
        let g = |x: f64| -> Result<f64> {
            Ok(apply_radial(&params, &f, x, cfg)?.value.log_mag() - level)
        };
        let mut hi = 2.0 * r;
        while g(hi)? > 0.0 {
            hi *= 2.0;
        }
        let big_r = bisect_log(1.0, hi, g)?;
        ln_measure.push(ball_volume(params.d, big_r).ln());
    }
    let lr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let growth = lsq_line(&lr, &ln_measure).1;
    let allowed = d * iq.recip() * ip + 2.0 * sigma / iq;
    report.push(Check::new(
        "measure_growth_exponent",
        growth,
        d,
        spec.tolerance * d,
        Relation::AtLeast,
    ));
    report.push(Check::new(
        "exponent_gap",
        growth - allowed,
        0.0,
        0.0,
        Relation::AtLeast,
    ));
    Ok(())
}
