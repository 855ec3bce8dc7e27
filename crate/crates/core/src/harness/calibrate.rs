//! Fitting the constants of a two-sided envelope.
//!
//! Each row contributes `y = log(quad / shape)` and `z = rate`. The claim
//! `C^-1 e^{-c1 z} <= e^{y - α} <= C e^{-c2 z}` is fitted by least squares on
//! the vertices of the upper and lower convex hulls of the `(z, y)` cloud;
//! each fitted line is then shifted so that every row lies on the correct side.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Minimum number of rows accepted by [`calibrate`].
pub const MIN_ROWS: usize = 20;
/// Minimum spread of the positive rates, in decades.
pub const MIN_RATE_DECADES: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub log_ratio: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    #[serde(rename = "C")]
    #[serde(with = "super::nonfinite")]
    pub c: f64,
    /// Rate constant of the lower bound.
    #[serde(with = "super::nonfinite")]
    pub c1: f64,
    /// Rate constant of the upper bound.
    #[serde(with = "super::nonfinite")]
    pub c2: f64,
    /// Spread (max - min) of `y + c z` with `c = (c1 + c2) / 2`.
    #[serde(with = "super::nonfinite")]
    pub residual_spread: f64,
    /// Intercept `α` of the lower line.
    #[serde(with = "super::nonfinite")]
    pub log_norm: f64,
    pub rows: usize,
    pub grid_spec: String,
}

impl CalibrationResult {
    /// Whether `(z, y)` lies inside the fitted band (with slack `tol` in log).
    pub fn contains(&self, row: &CalibrationRow, tol: f64) -> bool {
        let lower = self.log_norm - self.c1 * row.rate;
        let upper = self.log_norm + self.c.ln() - self.c2 * row.rate;
        row.log_ratio >= lower - tol && row.log_ratio <= upper + tol
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain hull of points sorted by `z`; `upper` selects the concave
/// majorant.
fn hull(points: &[(f64, f64)], upper: bool) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                let better = if upper { p.1 > last.1 } else { p.1 < last.1 };
                if better {
                    out.pop();
                } else {
                    continue;
                }
            }
        }
        while out.len() >= 2 {
            let c = cross(out[out.len() - 2], out[out.len() - 1], p);
            if (upper && c >= 0.0) || (!upper && c <= 0.0) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Least-squares slope of the piecewise-linear hull, weighted uniformly in
/// `z` so that the fit does not depend on how densely vertices are sampled.
fn lsq_slope(hull: &[(f64, f64)]) -> f64 {
    // moments ∫1, ∫z, ∫z², ∫h, ∫zh over the chain
    let (mut m0, mut m1, mut m2, mut h0, mut h1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for w in hull.windows(2) {
        let ((a, ya), (b, yb)) = (w[0], w[1]);
        let l = b - a;
        if l <= 0.0 {
            continue;
        }
        m0 += l;
        m1 += l * (a + b) / 2.0;
        m2 += l * (a * a + a * b + b * b) / 3.0;
        h0 += l * (ya + yb) / 2.0;
        h1 += l * (a * (2.0 * ya + yb) + b * (ya + 2.0 * yb)) / 6.0;
    }
    let den = m0 * m2 - m1 * m1;
    if m0 == 0.0 || den <= 0.0 {
        0.0
    } else {
        (m0 * h1 - m1 * h0) / den
    }
}

fn check_spread(rows: &[CalibrationRow]) -> Result<()> {
    if rows.len() < MIN_ROWS {
        return Err(Error::InsufficientSpread(format!(
            "{} rows, need at least {MIN_ROWS}",
            rows.len()
        )));
    }
    if let Some(r) = rows
        .iter()
        .find(|r| !(r.log_ratio.is_finite() && r.rate.is_finite() && r.rate >= 0.0))
    {
        return Err(Error::Domain(format!("unusable calibration row {r:?}")));
    }
    let positive = rows.iter().map(|r| r.rate).filter(|&z| z > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), z| {
        (lo.min(z), hi.max(z))
    });
    if hi == 0.0 {
        return Ok(());
    }
    let decades = (hi / lo).log10();
    if decades < MIN_RATE_DECADES {
        return Err(Error::InsufficientSpread(format!(
            "rates span {decades:.2} decades, need {MIN_RATE_DECADES} or identically zero"
        )));
    }
    Ok(())
}

/// Fits `(C, c1, c2)` to a sweep.
pub fn calibrate(rows: &[CalibrationRow], grid_spec: &str) -> Result<CalibrationResult> {
    check_spread(rows)?;
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.rate, r.log_ratio)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut c2 = -lsq_slope(&hull(&pts, true));
    let mut c1 = -lsq_slope(&hull(&pts, false));
    if c2 > c1 {
        let mid = 0.5 * (c1 + c2);
        c1 = mid;
        c2 = mid;
    }
    let a_u = pts
        .iter()
        .map(|&(z, y)| y + c2 * z)
        .fold(f64::NEG_INFINITY, f64::max);
    let a_l = pts
        .iter()
        .map(|&(z, y)| y + c1 * z)
        .fold(f64::INFINITY, f64::min);
    let cm = 0.5 * (c1 + c2);
    let (lo, hi) = pts
        .iter()
        .map(|&(z, y)| y + cm * z)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
    Ok(CalibrationResult {
        c: (a_u - a_l).max(0.0).exp(),
        c1,
        c2,
        residual_spread: hi - lo,
        log_norm: a_l,
        rows: rows.len(),
        grid_spec: grid_spec.to_string(),
    })
}
