//! Parameter sweeps over the quadratures and their envelopes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::calibrate::CalibrationRow;
use crate::kernels::{
    heat_kernel_log, l1_norm_envelope, l1_norm_quad, potential_kernel_envelope,
    potential_kernel_quad, KernelParams, PairGeometry,
};
use crate::num::{QuadConfig, QuadResult};
use crate::operator::{apply_radial, indicator_ball, RadialFunction};
use crate::special::{
    e_envelope, e_quad, i_envelope, i_quad, j_envelope, j_quad, EnvelopeValue, IntegralParams,
};
use crate::{Error, Result};

/// Default cap on the number of grid points of a sweep.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    IIntegral,
    JIntegral,
    EIntegral,
    HeatKernel,
    PotentialKernel,
    L1Norm,
    OperatorSample,
}

impl SweepTarget {
    pub const ALL: [SweepTarget; 7] = [
        SweepTarget::IIntegral,
        SweepTarget::JIntegral,
        SweepTarget::EIntegral,
        SweepTarget::HeatKernel,
        SweepTarget::PotentialKernel,
        SweepTarget::L1Norm,
        SweepTarget::OperatorSample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepTarget::IIntegral => "i-integral",
            SweepTarget::JIntegral => "j-integral",
            SweepTarget::EIntegral => "e-integral",
            SweepTarget::HeatKernel => "heat-kernel",
            SweepTarget::PotentialKernel => "potential-kernel",
            SweepTarget::L1Norm => "l1-norm",
            SweepTarget::OperatorSample => "operator-sample",
        }
    }

    /// Axes the target reads, in the order used for `grid_idx`.
    pub fn axes(&self) -> &'static [AxisName] {
        use AxisName::*;
        match self {
            SweepTarget::IIntegral => &[A, Gamma, T],
            SweepTarget::JIntegral => &[A, Gamma, T, S],
            SweepTarget::EIntegral => &[A, T, S],
            SweepTarget::HeatKernel => &[T, U, NormSum],
            SweepTarget::PotentialKernel => &[U, NormSum],
            SweepTarget::L1Norm | SweepTarget::OperatorSample => &[Xnorm],
        }
    }

    fn needs_kernel(&self) -> bool {
        !matches!(
            self,
            SweepTarget::IIntegral | SweepTarget::JIntegral | SweepTarget::EIntegral
        )
    }
}

impl fmt::Display for SweepTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown sweep target {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxisName {
    A,
    #[serde(rename = "gamma")]
    Gamma,
    T,
    S,
    #[serde(rename = "xnorm")]
    Xnorm,
    /// `|x - y|`
    #[serde(rename = "u")]
    U,
    /// `|x| + |y|`
    #[serde(rename = "norm_sum")]
    NormSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRange {
    Log { lo: f64, hi: f64, count: usize },
    Linear { lo: f64, hi: f64, count: usize },
    Values(Vec<f64>),
}

impl AxisRange {
    pub fn log(lo: f64, hi: f64, count: usize) -> Self {
        AxisRange::Log { lo, hi, count }
    }

    pub fn linear(lo: f64, hi: f64, count: usize) -> Self {
        AxisRange::Linear { lo, hi, count }
    }

    pub fn values(v: impl Into<Vec<f64>>) -> Self {
        AxisRange::Values(v.into())
    }

    /// Same range with `count - 1` intervals split in two.
    pub fn refined(&self) -> Self {
        match *self {
            AxisRange::Log { lo, hi, count } => AxisRange::Log {
                lo,
                hi,
                count: 2 * count.max(1) - 1,
            },
            AxisRange::Linear { lo, hi, count } => AxisRange::Linear {
                lo,
                hi,
                count: 2 * count.max(1) - 1,
            },
            AxisRange::Values(ref v) => AxisRange::Values(v.clone()),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let spaced = |lo: f64, hi: f64, count: usize, map: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if count == 1 {
                return vec![lo];
            }
            (0..count)
                .map(|k| match k {
                    0 => lo,
                    _ if k + 1 == count => hi,
                    _ => map(k as f64 / (count - 1) as f64),
                })
                .collect()
        };
        let out = match *self {
            AxisRange::Log { lo, hi, count } => {
                if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return Err(Error::Domain(format!(
                        "log axis needs 0 < lo <= hi, got [{lo}, {hi}]"
                    )));
                }
                let (a, b) = (lo.ln(), hi.ln());
                spaced(lo, hi, count, &|f| (a + f * (b - a)).exp())
            }
            AxisRange::Linear { lo, hi, count } => {
                if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
                    return Err(Error::Domain(format!(
                        "linear axis needs lo <= hi, got [{lo}, {hi}]"
                    )));
                }
                spaced(lo, hi, count, &|f| lo + f * (hi - lo))
            }
            AxisRange::Values(ref v) => v.clone(),
        };
        if out.is_empty() {
            return Err(Error::Domain("empty grid axis".into()));
        }
        Ok(out)
    }
}

impl AxisName {
    pub const ALL: [AxisName; 7] = [
        AxisName::A,
        AxisName::Gamma,
        AxisName::T,
        AxisName::S,
        AxisName::Xnorm,
        AxisName::U,
        AxisName::NormSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxisName::A => "A",
            AxisName::Gamma => "gamma",
            AxisName::T => "T",
            AxisName::S => "S",
            AxisName::Xnorm => "xnorm",
            AxisName::U => "u",
            AxisName::NormSum => "norm_sum",
        }
    }
}

impl FromStr for AxisName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown axis {s:?}")))
    }
}

/// `log:lo:hi:count`, `lin:lo:hi:count` or a comma-separated value list.
impl FromStr for AxisRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("bad axis range {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [kind @ ("log" | "lin"), lo, hi, count] => {
                let count = count.trim().parse::<usize>().map_err(|_| bad())?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                Ok(if *kind == "log" {
                    AxisRange::log(lo, hi, count)
                } else {
                    AxisRange::linear(lo, hi, count)
                })
            }
            [list] => list
                .split(',')
                .map(num)
                .collect::<Result<Vec<_>>>()
                .map(AxisRange::Values),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: AxisName,
    pub range: AxisRange,
}

/// How point pairs are placed at each `(u, |x|+|y|)` node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSampling {
    /// One seeded random orientation.
    #[default]
    Random,
    /// The random orientation plus the two configurations bounding the
    /// kernel at fixed `u` and `|x|+|y|`: equal norms (smallest `|x+y|`) and
    /// collinear (largest `|x+y|`). One dimension has only collinear pairs,
    /// so there this is the same as `Random`.
    RandomWithExtremes,
}

/// Input of an `operator-sample` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialInput {
    Ground,
    Constant,
    Ball { radius: f64 },
}

impl GridAxis {
    pub fn new(name: AxisName, range: AxisRange) -> Self {
        GridAxis { name, range }
    }
}

/// `NAME=RANGE`, e.g. `T=log:1:50:30` or `A=0`.
impl FromStr for GridAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("expected NAME=RANGE, got {s:?}")))?;
        Ok(GridAxis::new(name.trim().parse()?, range.parse()?))
    }
}

/// `ground`, `constant` or `ball:R`.
impl FromStr for RadialInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "ground" => Ok(RadialInput::Ground),
            None if s == "constant" => Ok(RadialInput::Constant),
            Some(("ball", r)) => r
                .parse()
                .map(|radius| RadialInput::Ball { radius })
                .map_err(|_| Error::Domain(format!("bad ball radius {r:?}"))),
            _ => Err(Error::Domain(format!("unknown radial input {s:?}"))),
        }
    }
}

impl RadialInput {
    pub fn function(&self, d: u32) -> Result<RadialFunction> {
        match *self {
            RadialInput::Ground => Ok(RadialFunction::hermite_ground(d)),
            RadialInput::Constant => Ok(RadialFunction::constant()),
            RadialInput::Ball { radius } => indicator_ball(radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub grid: Vec<GridAxis>,
    pub kernel: Option<KernelParams>,
    pub input: Option<RadialInput>,
    pub cfg: QuadConfig,
    /// Seed for the orientation of point pairs.
    pub seed: u64,
    /// Maximum number of grid points.
    pub budget: usize,
    #[serde(default)]
    pub pairs: PairSampling,
}

impl SweepSpec {
    pub fn new(target: SweepTarget) -> Self {
        SweepSpec {
            target,
            grid: Vec::new(),
            kernel: None,
            input: None,
            cfg: QuadConfig::default(),
            seed: 0,
            budget: DEFAULT_BUDGET,
            pairs: PairSampling::Random,
        }
    }

    pub fn axis(mut self, name: AxisName, range: AxisRange) -> Self {
        self.grid.retain(|a| a.name != name);
        self.grid.push(GridAxis { name, range });
        self
    }

    pub fn kernel(mut self, params: KernelParams) -> Self {
        self.kernel = Some(params);
        self
    }

    /// Same sweep with every ranged axis refined.
    pub fn refined(&self) -> Self {
        let grid = self
            .grid
            .iter()
            .map(|a| GridAxis {
                name: a.name,
                range: a.range.refined(),
            })
            .collect();
        SweepSpec {
            grid,
            ..self.clone()
        }
    }

    /// Points of each axis, in the target's axis order.
    fn axis_points(&self) -> Result<Vec<Vec<f64>>> {
        for a in &self.grid {
            if !self.target.axes().contains(&a.name) {
                return Err(Error::Domain(format!(
                    "axis {:?} is not used by {}",
                    a.name, self.target
                )));
            }
        }
        self.target
            .axes()
            .iter()
            .map(|name| {
                self.grid
                    .iter()
                    .find(|a| a.name == *name)
                    .ok_or_else(|| {
                        Error::Domain(format!("{} sweep needs a {name:?} axis", self.target))
                    })?
                    .range
                    .points()
            })
            .collect()
    }

    /// Short description used as the calibration grid tag.
    pub fn describe(&self) -> String {
        let mut s = self.target.to_string();
        if let Some(k) = self.kernel {
            s += &format!(" d={} sigma={}", k.d, k.sigma);
        }
        for a in &self.grid {
            let r = match &a.range {
                AxisRange::Log { lo, hi, count } => format!("log[{lo},{hi}]x{count}"),
                AxisRange::Linear { lo, hi, count } => format!("lin[{lo},{hi}]x{count}"),
                AxisRange::Values(v) => format!("{v:?}"),
            };
            s += &format!(" {:?}={r}", a.name);
        }
        s
    }
}

/// One evaluated grid point. Columns a target does not use are `None`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepRow {
    pub grid_idx: usize,
    pub d: Option<u32>,
    #[serde(default, with = "super::nonfinite::option")]
    pub sigma: Option<f64>,
    #[serde(rename = "A")]
    #[serde(default, with = "super::nonfinite::option")]
    pub a: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub gamma: Option<f64>,
    #[serde(rename = "T")]
    #[serde(default, with = "super::nonfinite::option")]
    pub t: Option<f64>,
    #[serde(rename = "S")]
    #[serde(default, with = "super::nonfinite::option")]
    pub s: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub xnorm: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub ynorm: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub u: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub v: Option<f64>,
    #[serde(with = "super::nonfinite")]
    pub quad_log_value: f64,
    #[serde(default, with = "super::nonfinite::option")]
    pub env_shape_log: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub env_rate: Option<f64>,
    #[serde(default, with = "super::nonfinite::option")]
    pub log_ratio: Option<f64>,
    #[serde(with = "super::nonfinite")]
    pub err_est: f64,
    /// Envelope branch; kept in JSON output only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_tag: Option<String>,
}

impl SweepRow {
    fn with_quad(mut self, q: &QuadResult) -> Self {
        self.quad_log_value = q.value.log_mag();
        self.err_est = q.error_estimate;
        self
    }

    fn with_envelope(mut self, e: &EnvelopeValue) -> Self {
        let shape = e.log_shape();
        self.env_shape_log = Some(shape);
        self.env_rate = Some(e.exp_rate);
        self.log_ratio = Some(self.quad_log_value - shape);
        self.case_tag = Some(e.case_tag.label());
        self
    }

    fn with_pair(mut self, g: &PairGeometry) -> Self {
        self.xnorm = Some(g.xnorm);
        self.ynorm = Some(g.ynorm);
        self.u = Some(g.u);
        self.v = Some(g.v);
        self
    }

    pub fn calibration_row(&self) -> Option<CalibrationRow> {
        Some(CalibrationRow {
            log_ratio: self.log_ratio?,
            rate: self.env_rate?,
        })
    }
}

/// Rows that carry an envelope comparison.
pub fn calibration_rows(rows: &[SweepRow]) -> Vec<CalibrationRow> {
    rows.iter().filter_map(SweepRow::calibration_row).collect()
}

/// A point pair with `|x - y| = u` and `|x| + |y| = sum` in random position;
/// `None` when no such pair exists. In one dimension the pair is collinear.
pub fn pair_with(u: f64, sum: f64, d: u32, rng: &mut impl Rng) -> Option<PairGeometry> {
    // |x| - |y| = δ with |δ| <= u
    let delta = if d == 1 {
        if rng.gen::<bool>() {
            u
        } else {
            -u
        }
    } else {
        u * (2.0 * rng.gen::<f64>() - 1.0)
    };
    pair_with_offset(u, sum, delta)
}

/// The pair with `|x - y| = u`, `|x| + |y| = sum` and `|x| - |y| = delta`.
pub fn pair_with_offset(u: f64, sum: f64, delta: f64) -> Option<PairGeometry> {
    if !(u >= 0.0 && sum > 0.0) || u > sum || delta.abs() > u {
        return None;
    }
    let x = 0.5 * (sum + delta);
    let y = 0.5 * (sum - delta);
    // u² = x² + y² - 2xy cos θ, v² = x² + y² + 2xy cos θ
    let v = (2.0 * (x * x + y * y) - u * u).max(0.0).sqrt();
    Some(PairGeometry::new(u, v, x, y))
}

/// Pair number `sample` at node `(u, sum)`: 0 random, 1 equal norms,
/// 2 collinear.
fn node_pair(spec: &SweepSpec, d: u32, u: f64, sum: f64, sample: usize) -> Option<PairGeometry> {
    match sample {
        0 => pair_with(u, sum, d, &mut pair_rng(spec.seed, u, sum)),
        1 => pair_with_offset(u, sum, 0.0),
        _ => pair_with_offset(u, sum, u),
    }
}

/// Orientation stream of the pair at `(u, sum)`; keyed on the coordinates so
/// that a refined grid reuses the pairs of the coarse one.
fn pair_rng(seed: u64, u: f64, sum: f64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u.to_bits() ^ sum.to_bits().rotate_left(32));
    rng
}

fn ground_state_image_log(params: &KernelParams, x: f64) -> f64 {
    let d = f64::from(params.d);
    -params.sigma * d.ln() - 0.25 * d * PI.ln() - 0.5 * x * x
}

fn evaluate(
    spec: &SweepSpec,
    kernel: Option<&KernelParams>,
    f: Option<&RadialFunction>,
    idx: usize,
    sample: usize,
    p: &[f64],
) -> Result<Option<SweepRow>> {
    let cfg = &spec.cfg;
    let mut row = SweepRow {
        grid_idx: idx,
        ..Default::default()
    };
    if let Some(k) = kernel {
        row.d = Some(k.d);
        row.sigma = Some(k.sigma);
    }
    let row = match spec.target {
        SweepTarget::IIntegral => {
            let ip = IntegralParams::i(p[0], p[1], p[2]);
            row.a = Some(p[0]);
            row.gamma = Some(p[1]);
            row.t = Some(p[2]);
            row.with_quad(&i_quad(&ip, cfg)?)
                .with_envelope(&i_envelope(&ip))
        }
        SweepTarget::JIntegral => {
            if p[3] <= p[2] {
                return Ok(None);
            }
            let jp = IntegralParams::j(p[0], p[1], p[2], p[3]);
            row.a = Some(p[0]);
            row.gamma = Some(p[1]);
            row.t = Some(p[2]);
            row.s = Some(p[3]);
            row.with_quad(&j_quad(&jp, cfg)?)
                .with_envelope(&j_envelope(&jp)?)
        }
        SweepTarget::EIntegral => {
            row.a = Some(p[0]);
            row.t = Some(p[1]);
            row.s = Some(p[2]);
            row.with_quad(&e_quad(p[0], p[1], p[2], cfg)?)
                .with_envelope(&e_envelope(p[0], p[1], p[2])?)
        }
        SweepTarget::HeatKernel => {
            let k = kernel.expect("checked");
            let Some(g) = node_pair(spec, k.d, p[1], p[2], sample) else {
                return Ok(None);
            };
            row.t = Some(p[0]);
            let mut row = row.with_pair(&g);
            row.quad_log_value = heat_kernel_log(p[0], &g, k).log_mag();
            row
        }
        SweepTarget::PotentialKernel => {
            let k = kernel.expect("checked");
            let Some(g) = node_pair(spec, k.d, p[0], p[1], sample) else {
                return Ok(None);
            };
            row.with_pair(&g)
                .with_quad(&potential_kernel_quad(k, &g, cfg)?)
                .with_envelope(&potential_kernel_envelope(k, &g)?)
        }
        SweepTarget::L1Norm => {
            let k = kernel.expect("checked");
            row.xnorm = Some(p[0]);
            row.with_quad(&l1_norm_quad(k, p[0], cfg)?)
                .with_envelope(&l1_norm_envelope(k, p[0]))
        }
        SweepTarget::OperatorSample => {
            let k = kernel.expect("checked");
            row.xnorm = Some(p[0]);
            let s = apply_radial(k, f.expect("checked"), p[0], cfg)?;
            row.quad_log_value = s.value.log_mag();
            row.err_est = s.error_estimate;
            match spec.input {
                Some(RadialInput::Ground) => {
                    let shape = ground_state_image_log(k, p[0]);
                    row.env_shape_log = Some(shape);
                    row.env_rate = Some(0.0);
                    row.log_ratio = Some(row.quad_log_value - shape);
                    row
                }
                Some(RadialInput::Constant) => row.with_envelope(&l1_norm_envelope(k, p[0])),
                _ => row,
            }
        }
    };
    Ok(Some(row))
}

/// Evaluates every grid point, in lexicographic order of the grid indices.
/// With [`PairSampling::RandomWithExtremes`] the pair sample is an extra,
/// innermost index. Grid points without a valid configuration (e.g. `S <= T`, `u > |x|+|y|`)
/// are skipped; their `grid_idx` is not reused.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let axes = spec.axis_points()?;
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    let total = match total {
        Some(n) if n <= spec.budget => n,
        _ => {
            return Err(Error::Domain(format!(
                "{} grid points exceed the budget of {}",
                total.map_or_else(|| "too many".to_string(), |n| n.to_string()),
                spec.budget
            )))
        }
    };
    let kernel = match (spec.target.needs_kernel(), spec.kernel) {
        (true, None) => {
            return Err(Error::Domain(format!(
                "{} sweep needs kernel parameters",
                spec.target
            )))
        }
        (true, Some(k)) => {
            k.validate()?;
            Some(k)
        }
        (false, _) => None,
    };
    let f = match spec.target {
        SweepTarget::OperatorSample => {
            let input = spec
                .input
                .ok_or_else(|| Error::Domain("operator-sample sweep needs an input".into()))?;
            Some(input.function(kernel.expect("checked").d)?)
        }
        _ => None,
    };
    let point = |idx: usize| -> Vec<f64> {
        let mut rest = idx;
        let mut p = vec![0.0; axes.len()];
        for (k, a) in axes.iter().enumerate().rev() {
            p[k] = a[rest % a.len()];
            rest /= a.len();
        }
        p
    };
    let samples = match (spec.pairs, spec.target, kernel) {
        (
            PairSampling::RandomWithExtremes,
            SweepTarget::HeatKernel | SweepTarget::PotentialKernel,
            Some(k),
        ) if k.d > 1 => 3,
        _ => 1,
    };
    let rows: Vec<Option<SweepRow>> = (0..total * samples)
        .into_par_iter()
        .map(|idx| {
            evaluate(
                spec,
                kernel.as_ref(),
                f.as_ref(),
                idx,
                idx % samples,
                &point(idx / samples),
            )
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_points() {
        assert_eq!(
            AxisRange::linear(0.0, 1.0, 3).points().unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let p = AxisRange::log(1e-3, 1e2, 126).points().unwrap();
        assert_eq!((p[0], p[125]), (1e-3, 1e2));
        assert!((p[25] / 1e-2 - 1.0).abs() < 1e-12);
        assert_eq!(
            AxisRange::log(1.0, 4.0, 3)
                .refined()
                .points()
                .unwrap()
                .len(),
            5
        );
        assert!(AxisRange::values(vec![]).points().is_err());
        assert!(AxisRange::log(0.0, 1.0, 3).points().is_err());
    }

    #[test]
    fn pair_geometry_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1u32, 3] {
            for _ in 0..100 {
                let sum = rng.gen_range(0.1..10.0);
                let u = sum * rng.gen::<f64>();
                let g = pair_with(u, sum, d, &mut rng).unwrap();
                assert!((g.xnorm + g.ynorm - sum).abs() < 1e-12 * sum);
                assert!(
                    (g.u * g.u + g.v * g.v - 2.0 * (g.xnorm.powi(2) + g.ynorm.powi(2))).abs()
                        < 1e-10 * sum * sum
                );
                assert!((g.xnorm - g.ynorm).abs() <= u * (1.0 + 1e-12));
            }
        }
        assert!(pair_with(2.0, 1.0, 2, &mut rng).is_none());
    }

    #[test]
    fn budget_and_axes_are_checked() {
        let spec = SweepSpec::new(SweepTarget::IIntegral)
            .axis(AxisName::A, AxisRange::values(vec![0.0]))
            .axis(AxisName::Gamma, AxisRange::values(vec![1.0]))
            .axis(AxisName::T, AxisRange::log(1.0, 10.0, 5));
        assert_eq!(run_sweep(&spec).unwrap().len(), 5);
        let over = SweepSpec {
            budget: 4,
            ..spec.clone()
        };
        assert!(run_sweep(&over).is_err());
        let missing =
            SweepSpec::new(SweepTarget::IIntegral).axis(AxisName::A, AxisRange::values(vec![0.0]));
        assert!(run_sweep(&missing).is_err());
        let foreign = spec.axis(AxisName::U, AxisRange::values(vec![1.0]));
        assert!(run_sweep(&foreign).is_err());
        assert!(run_sweep(
            &SweepSpec::new(SweepTarget::L1Norm)
                .axis(AxisName::Xnorm, AxisRange::values(vec![1.0]))
        )
        .is_err());
    }

    #[test]
    fn axis_syntax() {
        let g: GridAxis = "T=log:1:50:30".parse().unwrap();
        assert_eq!(g, GridAxis::new(AxisName::T, AxisRange::log(1.0, 50.0, 30)));
        let g: GridAxis = "norm_sum=0.5,1,2".parse().unwrap();
        assert_eq!(
            g,
            GridAxis::new(AxisName::NormSum, AxisRange::values(vec![0.5, 1.0, 2.0]))
        );
        assert_eq!(
            "a=lin:0:1:3".parse::<GridAxis>().unwrap().range,
            AxisRange::linear(0.0, 1.0, 3)
        );
        for bad in ["T", "Q=1", "T=log:1:2", "T=log:1:2:x", "u=1,,2"] {
            assert!(bad.parse::<GridAxis>().is_err(), "{bad}");
        }
        assert_eq!(
            "ball:2.5".parse::<RadialInput>().unwrap(),
            RadialInput::Ball { radius: 2.5 }
        );
        assert_eq!(
            "ground".parse::<RadialInput>().unwrap(),
            RadialInput::Ground
        );
        assert!("ball".parse::<RadialInput>().is_err());
    }

    #[test]
    fn target_names_round_trip() {
        for t in SweepTarget::ALL {
            assert_eq!(t.name().parse::<SweepTarget>().unwrap(), t);
        }
    }
}
