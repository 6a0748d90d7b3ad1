//! Limits of monotone sequences sampled along geometric schedules.
//!
//! Besides the last value and the geometric-tail extrapolation, the estimate
//! fits the last three samples with `L - (a ln x + b) / x`, where `x` is the
//! schedule scale growing to infinity. Ecker ratios of flows with planar ends
//! approach their limit at that rate, too slowly for a geometric tail.

use serde::Serialize;

use crate::error::{Error, Result};

/// Expected direction of a monotone series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonDecreasing,
    NonIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub last: f64,
    /// Difference of the last two values.
    pub tail_difference: f64,
    /// Geometric-tail extrapolation (equals `last` when the tail is not
    /// geometrically contracting).
    pub geometric: f64,
    /// Fit of `L - (a ln x + b) / x` through the last three samples.
    pub log_richardson: Option<f64>,
    /// The limit estimate: `log_richardson` for monotone series, otherwise
    /// `geometric`.
    pub extrapolated: f64,
    /// Ratio of the last two increments, when defined.
    pub ratio: Option<f64>,
    /// Quadrature error of the last value plus `|tail_difference|`.
    pub error_bar: f64,
    pub monotone: bool,
    /// Values above the divergence threshold with non-shrinking increments.
    pub diverging: bool,
}

/// Values above this, with last-increment ratio at least 1/2, count as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Estimates the limit of `values` sampled at increasing positive `scales`
/// (e.g. `r`, `|t|` or `1 / (t0 - t)`). The last value carries quadrature
/// error `last_error`. Steps against `direction` larger than `slack` clear
/// the monotone flag.
pub fn improper_limit(
    scales: &[f64],
    values: &[f64],
    last_error: f64,
    direction: Direction,
    slack: f64,
) -> Result<LimitEstimate> {
    if values.len() < 3 {
        return Err(Error::Extrapolation(format!(
            "need at least 3 schedule values, got {}",
            values.len()
        )));
    }
    if scales.len() != values.len() {
        return Err(Error::InvalidArgument("scales and values differ in length".into()));
    }
    if scales.iter().any(|x| !(*x > 0.0 && x.is_finite())) || scales.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("limit scales must be positive and increasing".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Extrapolation("non-finite value in series".into()));
    }
    let monotone = values.windows(2).all(|w| match direction {
        Direction::NonDecreasing => w[1] >= w[0] - slack,
        Direction::NonIncreasing => w[1] <= w[0] + slack,
    });
    let k = values.len() - 1;
    let last = values[k];
    let d2 = values[k] - values[k - 1];
    let d1 = values[k - 1] - values[k - 2];
    let ratio = if d1 != 0.0 { Some(d2 / d1) } else { None };
    let geometric = match ratio {
        Some(q) if q > 0.0 && q < 1.0 => last + d2 * q / (1.0 - q),
        _ => last,
    };
    let log_richardson = if d1 == 0.0 && d2 == 0.0 {
        Some(last)
    } else {
        log_richardson(&scales[k - 2..], &values[k - 2..])
    };
    let extrapolated = match log_richardson {
        Some(l) if monotone => l,
        _ => geometric,
    };
    let diverging = last.abs() > DIVERGENCE_THRESHOLD && ratio.is_some_and(|q| q >= 0.5);
    Ok(LimitEstimate {
        last,
        tail_difference: d2,
        geometric,
        log_richardson,
        extrapolated,
        ratio,
        error_bar: last_error.abs() + d2.abs(),
        monotone,
        diverging,
    })
}

/// Constant term of the interpolant `L + a ln x / x + b / x` through three
/// points.
fn log_richardson(x: &[f64], v: &[f64]) -> Option<f64> {
    // Columns rescaled by x[0] so the system is well scaled.
    let s = x[0];
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        let y = x[i] / s;
        m[i] = [1.0, y.ln() / y, 1.0 / y, v[i]];
    }
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        m.swap(c, p);
        if m[c][c].abs() < 1e-14 {
            return None;
        }
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            let pivot = m[c];
            for (x, p) in m[r].iter_mut().zip(pivot).skip(c) {
                *x -= f * p;
            }
        }
    }
    let mut sol = [0.0; 3];
    for c in (0..3).rev() {
        let mut acc = m[c][3];
        for j in c + 1..3 {
            acc -= m[c][j] * sol[j];
        }
        sol[c] = acc / m[c][c];
    }
    sol[0].is_finite().then_some(sol[0])
}

/// Quantity values along a schedule, with the limit estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneSeries {
    pub schedule: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub direction: Direction,
    pub limit: LimitEstimate,
}

impl MonotoneSeries {
    /// `schedule` entries are `r` values or negative times; their absolute
    /// values serve as limit scales.
    pub fn new(
        schedule: Vec<f64>,
        values: Vec<f64>,
        errors: Vec<f64>,
        direction: Direction,
        slack: f64,
    ) -> Result<Self> {
        if schedule.len() != values.len() || values.len() != errors.len() {
            return Err(Error::InvalidArgument("series columns differ in length".into()));
        }
        let scales: Vec<f64> = schedule.iter().map(|s| s.abs()).collect();
        let limit = improper_limit(&scales, &values, *errors.last().unwrap_or(&0.0), direction, slack)?;
        Ok(Self {
            schedule,
            values,
            errors,
            direction,
            limit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let l = improper_limit(&doubling(5), &[3.0; 5], 0.0, Direction::NonDecreasing, 0.0).unwrap();
        assert_eq!(l.extrapolated, 3.0);
        assert_eq!(l.error_bar, 0.0);
        assert!(l.monotone);
    }

    fn doubling(k: usize) -> Vec<f64> {
        (0..k).map(|i| 2f64.powi(i as i32)).collect()
    }

    #[test]
    fn harmonic_tail_on_doubling_schedule() {
        let r = doubling(7);
        let v: Vec<f64> = r.iter().map(|r| 2.0 - 0.7 / r).collect();
        let l = improper_limit(&r, &v, 0.0, Direction::NonDecreasing, 0.0).unwrap();
        assert!((l.geometric - 2.0).abs() < 1e-12);
        assert!((l.extrapolated - 2.0).abs() < 1e-12);
        assert!((l.last - 2.0).abs() <= l.error_bar);
    }

    #[test]
    fn log_corrected_tail_is_exact() {
        let r = doubling(8);
        let v: Vec<f64> = r.iter().map(|r| 2.0 - (0.4 * r.ln() + 1.3) / r).collect();
        let l = improper_limit(&r, &v, 0.0, Direction::NonDecreasing, 0.0).unwrap();
        assert!((l.extrapolated - 2.0).abs() < 1e-10);
        // A geometric tail misses the logarithm.
        assert!((l.geometric - 2.0).abs() > 1e-3);
    }

    #[test]
    fn scale_units_do_not_matter() {
        let r = doubling(6);
        let v: Vec<f64> = r.iter().map(|r| 1.5 - 1.0 / (r + 3.0)).collect();
        let a = improper_limit(&r, &v, 0.0, Direction::NonDecreasing, 0.0).unwrap();
        let r2: Vec<f64> = r.iter().map(|r| 1e3 * r).collect();
        let b = improper_limit(&r2, &v, 0.0, Direction::NonDecreasing, 0.0).unwrap();
        assert!((a.extrapolated - b.extrapolated).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_uses_geometric() {
        let r = doubling(4);
        let l = improper_limit(&r, &[1.0, 1.2, 1.1, 1.3], 0.0, Direction::NonDecreasing, 1e-6).unwrap();
        assert_eq!(l.extrapolated, l.geometric);
    }

    #[test]
    fn noisy_input_is_flagged() {
        let l = improper_limit(&doubling(4), &[1.0, 1.2, 1.1, 1.3], 0.0, Direction::NonDecreasing, 1e-6).unwrap();
        assert!(!l.monotone);
    }

    #[test]
    fn too_short() {
        assert!(improper_limit(&[1.0, 2.0], &[1.0, 2.0], 0.0, Direction::NonDecreasing, 0.0).is_err());
        assert!(improper_limit(&[1.0, 1.0, 2.0], &[1.0; 3], 0.0, Direction::NonDecreasing, 0.0).is_err());
    }
}
