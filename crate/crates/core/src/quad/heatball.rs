use crate::error::Result;
use crate::flows::restrict::restrict_with_cells;
use crate::flows::{AncientFlow, SliceGeometry};
use crate::kernel::{slice_radius2_from_tau, window_length, Center, HeatBall};
use crate::quad::{integrate, integrate_slice, QuadConfig, QuadResult};
use crate::vector::AmbientVec;

/// What a heat-ball integrand sees at one space-time sample. Positions and
/// times are relative to the heat-ball center.
#[derive(Debug, Clone, Copy)]
pub struct HeatBallSample<'a> {
    pub geom: &'a SliceGeometry,
    /// `t - t0 < 0`.
    pub t: f64,
    /// `psi_r` at the sample (positive inside the heat ball).
    pub psi: f64,
    pub r: f64,
    pub n: usize,
}

/// `int int_{M cap E_r} f`, integrating over time in the logistic coordinate
/// `s`, with normalized time `tau = (t0 - t) / (r^2 / 4 pi) = 1 / (1 + e^{-s})`.
/// Both window ends, where the slice radius closes up, are stretched
/// exponentially in `s`.
pub fn integrate_heatball<F>(flow: &AncientFlow, hb: &HeatBall, f: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(&HeatBallSample<'_>) -> f64 + Sync,
{
    let span = cfg.log_time_span;
    logistic_window(flow, hb, f, -span, span, cfg.time_panels, cfg)
}

/// Logistic coordinate of relative time `t` in a window of length `len`.
fn logistic_of(t: f64, len: f64) -> f64 {
    let tau = -t / len;
    (tau / (1.0 - tau)).ln()
}

/// As [`integrate_heatball`], restricted to relative times `t_lo <= t - t0 <= t_hi`.
pub fn integrate_heatball_between<F>(
    flow: &AncientFlow,
    hb: &HeatBall,
    f: F,
    t_lo: f64,
    t_hi: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(&HeatBallSample<'_>) -> f64 + Sync,
{
    let span = cfg.log_time_span;
    let len = window_length(hb.r);
    let lo = if t_hi >= 0.0 { -span } else { logistic_of(t_hi, len).max(-span) };
    let hi = if t_lo <= -len { span } else { logistic_of(t_lo, len).min(span) };
    if !(lo < hi) {
        return Ok(QuadResult::exact(0.0));
    }
    let share = (hi - lo) / (2.0 * span);
    let panels = ((cfg.time_panels as f64 * share).ceil() as usize).max(4);
    logistic_window(flow, hb, f, lo, hi, panels, cfg)
}

fn logistic_window<F>(
    flow: &AncientFlow,
    hb: &HeatBall,
    f: F,
    lo: f64,
    hi: f64,
    panels: usize,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(&HeatBallSample<'_>) -> f64 + Sync,
{
    let flow = if hb.center == Center::ORIGIN {
        flow.clone()
    } else {
        flow.recentered(hb.center.x, hb.center.t)
    };
    let (r, n) = (hb.r, hb.n);
    let len = window_length(r);
    let inner_cfg = cfg.inner();
    let outer = |s: f64| -> Result<(f64, f64)> {
        let tau = 1.0 / (1.0 + (-s).exp());
        let log_tau = -(-s).exp().ln_1p();
        let jac = len * tau / (1.0 + s.exp());
        let t = -len * tau;
        let radius2 = slice_radius2_from_tau(r, tau, log_tau, n);
        if !(radius2 > 0.0) || !(t < flow.time_max) {
            return Ok((0.0, 0.0));
        }
        let restriction = restrict_with_cells(&flow, t, &AmbientVec::ZERO, radius2.sqrt(), cfg.scan_cells)?;
        if restriction.is_empty() {
            return Ok((0.0, 0.0));
        }
        let half_n = 0.5 * n as f64;
        let res = integrate_slice(
            &flow,
            t,
            |g| {
                let psi = g.x.norm2() / (4.0 * t) - half_n * log_tau;
                f(&HeatBallSample {
                    geom: g,
                    t,
                    psi,
                    r,
                    n,
                })
            },
            Some(&restriction),
            &inner_cfg,
        )?;
        Ok((res.value * jac, res.error_estimate * jac))
    };
    integrate(outer, lo, hi, &cfg.outer_options(panels))
}
