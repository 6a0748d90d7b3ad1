//! Two-sided limit comparison: `lim_{r -> inf} A(M cap E_r) / r^n` against
//! the Gaussian density at infinity `lim_{t -> -inf} int Phi dmu_t`, with the
//! entropy supremum as a third estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_schedule, EntropySchedule, OptimizerConfig};
use crate::error::{Error, Result};
use crate::flows::AncientFlow;
use crate::kernel::{Center, HeatBall};
use crate::quad::{Direction, MonotoneSeries, QuadConfig};
use crate::quantities::{deficit_phi, ecker_ratio, huisken_integral};

/// Slack of the monotonicity verdicts.
pub const SERIES_SLACK: f64 = 1e-6;
/// Slack of the `A / r^n <= int Phi` ordering.
pub const ORDERING_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Schedules {
    /// Heat-ball radii, increasing.
    pub r: Vec<f64>,
    /// Times relative to the center, negative and decreasing.
    pub t: Vec<f64>,
}

impl Default for Schedules {
    fn default() -> Self {
        Self {
            r: (0..8).map(|k| 2f64.powi(k)).collect(),
            t: (0..8).map(|k| -(4f64.powi(k))).collect(),
        }
    }
}

impl Schedules {
    pub fn validate(&self) -> Result<()> {
        if self.r.len() < 5 || self.t.len() < 5 {
            return Err(Error::InvalidArgument("schedules need at least 5 points".into()));
        }
        if self.r.iter().any(|r| !(*r > 0.0 && r.is_finite())) || self.r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("r schedule must be positive and increasing".into()));
        }
        if self.t.iter().any(|t| !(*t < 0.0 && t.is_finite())) || self.t.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument("t schedule must be negative and decreasing".into()));
        }
        Ok(())
    }

    /// Both schedules extended geometrically to twice their length.
    pub fn doubled(&self) -> Self {
        fn extend(v: &[f64]) -> Vec<f64> {
            let q = v[v.len() - 1] / v[v.len() - 2];
            let mut out = v.to_vec();
            for _ in 0..v.len() {
                let next = out[out.len() - 1] * q;
                out.push(next);
            }
            out
        }
        Self {
            r: extend(&self.r),
            t: extend(&self.t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// The Huisken series diverges; both sides are infinite.
    BothDiverge,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::BothDiverge => "BOTH_DIVERGE",
            Verdict::Fail => "FAIL",
        }
    }

    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::BothDiverge)
    }
}

/// A schedule point whose evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub series: &'static str,
    pub parameter: f64,
    pub message: String,
}

/// `A / r^n` at `r` against `int Phi` at `t = -r^2/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingCheck {
    pub r: f64,
    pub ecker_ratio: f64,
    pub huisken: f64,
    /// `huisken - ecker_ratio`; negative beyond the slack is a violation.
    pub margin: f64,
    pub holds: bool,
}

/// The series stayed finite with converged quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Finiteness {
    pub huisken_finite: bool,
    pub ecker_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub flow: String,
    pub center: Center,
    pub ecker: MonotoneSeries,
    pub huisken: MonotoneSeries,
    pub ordering: Vec<OrderingCheck>,
    pub ecker_limit: f64,
    pub huisken_limit: f64,
    pub combined_bar: f64,
    /// `combined_bar - |ecker_limit - huisken_limit|`.
    pub margin: f64,
    pub finiteness: Finiteness,
    pub failures: Vec<PointFailure>,
    pub verdict: Verdict,
}

impl Theorem1Report {
    pub const CSV_HEADER: &'static str = "series,parameter,value,error";

    pub fn ordering_holds(&self) -> bool {
        self.ordering.iter().all(|o| o.holds)
    }

    /// Both series, one row per schedule point.
    pub fn csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for (name, s) in [("ecker", &self.ecker), ("huisken", &self.huisken)] {
            for ((p, v), e) in s.schedule.iter().zip(&s.values).zip(&s.errors) {
                out.push_str(&format!("{name},{p:.16e},{v:.16e},{e:.16e}\n"));
            }
        }
        out
    }
}

type Point = (f64, Result<(f64, f64)>);

fn evaluate<F>(params: &[f64], parallel: bool, f: F) -> Vec<Point>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    if parallel {
        params.par_iter().map(|&p| (p, f(p))).collect()
    } else {
        params.iter().map(|&p| (p, f(p))).collect()
    }
}

/// Keeps the successful points; numerical failures become per-point records,
/// configuration errors propagate.
fn split(
    series: &'static str,
    points: Vec<Point>,
    failures: &mut Vec<PointFailure>,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (mut ps, mut vs, mut es) = (Vec::new(), Vec::new(), Vec::new());
    for (p, r) in points {
        match r {
            Ok((v, e)) => {
                ps.push(p);
                vs.push(v);
                es.push(e);
            }
            Err(err) if err.is_numerical() => failures.push(PointFailure {
                series,
                parameter: p,
                message: err.to_string(),
            }),
            Err(err) => return Err(err),
        }
    }
    Ok((ps, vs, es))
}

/// Compares the `r -> inf` Ecker limit with the `t -> -inf` Huisken limit
/// about `center`; the `t` schedule is relative to `center.t`.
pub fn verify_theorem1_at(
    flow: &AncientFlow,
    center: &Center,
    schedules: &Schedules,
    cfg: &QuadConfig,
) -> Result<Theorem1Report> {
    schedules.validate()?;
    cfg.validate()?;
    let n = flow.n;
    let ecker_point = |r: f64| -> Result<(f64, f64)> {
        let q = ecker_ratio(flow, &HeatBall::new(*center, r, n)?, cfg)?;
        Ok((q.value, q.error_estimate))
    };
    let huisken_point = |s: f64| -> Result<(f64, f64)> {
        let q = huisken_integral(flow, center.t + s, center, cfg)?;
        Ok((q.value, q.error_estimate))
    };

    let mut failures = Vec::new();
    let (rs, ev, ee) = split("ecker", evaluate(&schedules.r, cfg.parallel, ecker_point), &mut failures)?;
    let (ts, hv, he) = split("huisken", evaluate(&schedules.t, cfg.parallel, huisken_point), &mut failures)?;
    let ecker = MonotoneSeries::new(rs, ev, ee, Direction::NonDecreasing, SERIES_SLACK)?;
    let huisken = MonotoneSeries::new(ts, hv, he, Direction::NonDecreasing, SERIES_SLACK)?;

    let ordering_times: Vec<f64> = ecker.schedule.iter().map(|r| -r * r / 4.0).collect();
    let paired = split(
        "ordering",
        evaluate(&ordering_times, cfg.parallel, huisken_point),
        &mut failures,
    )?;
    let ordering = paired
        .0
        .iter()
        .zip(&paired.1)
        .filter_map(|(t, h)| {
            let i = ordering_times.iter().position(|x| x == t)?;
            let margin = h - ecker.values[i];
            Some(OrderingCheck {
                r: ecker.schedule[i],
                ecker_ratio: ecker.values[i],
                huisken: *h,
                margin,
                holds: margin >= -ORDERING_SLACK,
            })
        })
        .collect();

    let el = ecker.limit;
    let hl = huisken.limit;
    let combined_bar = el.error_bar + hl.error_bar;
    let margin = combined_bar - (el.extrapolated - hl.extrapolated).abs();
    let finiteness = Finiteness {
        huisken_finite: !hl.diverging && hl.extrapolated.is_finite(),
        ecker_finite: !el.diverging && el.extrapolated.is_finite(),
    };
    let verdict = if hl.diverging {
        Verdict::BothDiverge
    } else if failures.is_empty() && margin >= 0.0 && el.monotone && hl.monotone {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Theorem1Report {
        flow: flow.name.clone(),
        center: *center,
        ecker,
        huisken,
        ordering,
        ecker_limit: el.extrapolated,
        huisken_limit: hl.extrapolated,
        combined_bar,
        margin,
        finiteness,
        failures,
        verdict,
    })
}

pub fn verify_theorem1(flow: &AncientFlow, schedules: &Schedules, cfg: &QuadConfig) -> Result<Theorem1Report> {
    verify_theorem1_at(flow, &Center::ORIGIN, schedules, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary32Report {
    pub theorem1: Theorem1Report,
    pub entropy: EntropySchedule,
    pub sup_lambda: f64,
    /// Tail difference of the entropy series, widened by the spread of the
    /// optimizer starts when the best start did not converge.
    pub sup_lambda_bar: f64,
    /// Largest pairwise gap minus the pair's combined bar; non-positive
    /// means three-way agreement.
    pub worst_excess: f64,
    pub verdict: Verdict,
}

/// The limit comparison plus the entropy supremum along the `t` schedule.
pub fn verify_corollary32(
    flow: &AncientFlow,
    schedules: &Schedules,
    opt: &OptimizerConfig,
    cfg: &QuadConfig,
) -> Result<Corollary32Report> {
    let theorem1 = verify_theorem1(flow, schedules, cfg)?;
    let entropy = entropy_schedule(flow, &schedules.t, opt, cfg)?;
    let sup_lambda = entropy.limit.extrapolated;
    let last = entropy.results.last().expect("schedule has points");
    let spread = if last.converged {
        0.0
    } else {
        let worst = last.starts.iter().map(|s| s.best_value).fold(f64::INFINITY, f64::min);
        last.lambda - worst
    };
    let sup_lambda_bar = entropy.limit.error_bar + spread;
    let est = [
        (theorem1.ecker_limit, theorem1.ecker.limit.error_bar),
        (theorem1.huisken_limit, theorem1.huisken.limit.error_bar),
        (sup_lambda, sup_lambda_bar),
    ];
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            worst_excess = worst_excess.max((est[i].0 - est[j].0).abs() - est[i].1 - est[j].1);
        }
    }
    let verdict = match theorem1.verdict {
        Verdict::Pass if worst_excess <= 0.0 => Verdict::Pass,
        Verdict::BothDiverge if entropy.limit.diverging => Verdict::BothDiverge,
        _ => Verdict::Fail,
    };
    Ok(Corollary32Report {
        theorem1,
        entropy,
        sup_lambda,
        sup_lambda_bar,
        worst_excess,
        verdict,
    })
}

/// `int Phi|_theta - int Phi|_tau` against `-int_tau^theta int |D|^2 Phi`,
/// both about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratedHuisken {
    pub tau: f64,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub residual: f64,
    /// Residual over the larger side, or over `int Phi|_tau` when both sides
    /// vanish.
    pub relative: f64,
}

pub fn verify_integrated_huisken(flow: &AncientFlow, tau: f64, theta: f64, cfg: &QuadConfig) -> Result<IntegratedHuisken> {
    if !(tau < theta && theta < 0.0) {
        return Err(Error::Domain(format!("need tau < theta < 0, got {tau}, {theta}")));
    }
    let c = Center::ORIGIN;
    let early = huisken_integral(flow, tau, &c, cfg)?;
    let late = huisken_integral(flow, theta, &c, cfg)?;
    let d = deficit_phi(flow, (tau, theta), &c, cfg)?;
    let lhs = late.value - early.value;
    let rhs = -d.value;
    let residual = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    let relative = if scale > 1e-10 * early.value {
        residual / scale
    } else {
        residual / early.value
    };
    Ok(IntegratedHuisken {
        tau,
        theta,
        lhs,
        rhs,
        lhs_error: early.error_estimate + late.error_estimate,
        rhs_error: d.error_estimate,
        residual,
        relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::by_name;

    #[test]
    fn default_schedules_are_valid() {
        let s = Schedules::default();
        s.validate().unwrap();
        assert_eq!(s.r.last(), Some(&128.0));
        assert_eq!(s.t.last(), Some(&-16384.0));
        let d = s.doubled();
        d.validate().unwrap();
        assert_eq!(d.r.len(), 16);
        assert_eq!(d.r[8], 256.0);
    }

    #[test]
    fn rejects_short_or_unordered_schedules() {
        let mut s = Schedules::default();
        s.r.truncate(4);
        assert!(s.validate().is_err());
        let mut s = Schedules::default();
        s.t.swap(0, 1);
        assert!(s.validate().is_err());
    }

    #[test]
    fn plane_passes_with_unit_limits() {
        let flow = by_name("plane").unwrap();
        let s = Schedules {
            r: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            t: vec![-1.0, -4.0, -16.0, -64.0, -256.0],
        };
        let rep = verify_theorem1(&flow, &s, &QuadConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!((rep.ecker_limit - 1.0).abs() < 1e-4);
        assert!((rep.huisken_limit - 1.0).abs() < 1e-4);
        assert!(rep.ordering_holds());
        assert!(rep.csv().lines().count() == 11);
    }

    #[test]
    fn integrated_huisken_vanishes_on_shrinker() {
        let flow = by_name("circle").unwrap();
        let r = verify_integrated_huisken(&flow, -4.0, -1.0, &QuadConfig::default()).unwrap();
        assert!(r.lhs.abs() < 1e-9 && r.rhs.abs() < 1e-9);
        assert!(r.relative < 1e-8);
    }
}
