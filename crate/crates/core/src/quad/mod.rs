//! Adaptive quadrature over slices, heat balls and schedules.
//!
//! Slice integrals run over parameter sub-domains produced by
//! [`crate::flows::restrict_to_ball`]; unbounded charts are truncated to the
//! ball outside of which the Gaussian weight drops below
//! `gaussian_truncation` times its maximum. Heat-ball integrals nest a slice
//! integral inside an outer integral over the time window.

mod gk;
mod heatball;
mod limit;
mod slice;

use serde::{Deserialize, Serialize};

use crate::error::{Error, QuadDiagnostics, Result};

pub use gk::{integrate, GkOptions};
pub use heatball::{integrate_heatball, integrate_heatball_between, HeatBallSample};
pub use limit::{improper_limit, Direction, LimitEstimate, MonotoneSeries};
pub use slice::{gaussian_truncation_radius, integrate_gaussian_slice, integrate_slice};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Gaussian weights below this fraction of their maximum are dropped.
    pub gaussian_truncation: f64,
    /// Grid cells used to seed ball-restriction brackets.
    pub scan_cells: usize,
    /// Initial panels of the outer (log-time) heat-ball integral.
    pub time_panels: usize,
    /// Half-width `S` of the log-time coordinate `s in [-S, S]`; the window
    /// ends are resolved down to relative distance `e^{-S}`.
    pub log_time_span: f64,
    /// Initial panels per slice sub-domain.
    pub slice_panels: usize,
    /// Inner integrals run at `inner_factor` times the outer tolerances.
    pub inner_factor: f64,
    pub max_panels: usize,
    /// Evaluate outer quadrature nodes on the rayon pool.
    pub parallel: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 40,
            gaussian_truncation: 1e-16,
            scan_cells: crate::flows::restrict::SCAN_CELLS,
            time_panels: 32,
            log_time_span: 69.0,
            slice_panels: 4,
            inner_factor: 0.1,
            max_panels: 20_000,
            parallel: false,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("quadrature config: {m}")));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_depth < 4 {
            return bad("max_depth must be at least 4");
        }
        if !(self.gaussian_truncation > 0.0 && self.gaussian_truncation < 1.0) {
            return bad("gaussian_truncation must lie in (0, 1)");
        }
        if self.scan_cells == 0 || self.time_panels == 0 || self.slice_panels == 0 {
            return bad("cell and panel counts must be positive");
        }
        if !(self.log_time_span > 0.0) || !(self.inner_factor > 0.0 && self.inner_factor <= 1.0) {
            return bad("log_time_span must be positive and inner_factor in (0, 1]");
        }
        Ok(())
    }

    /// Same config with tolerances scaled by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * k,
            abs_tol: self.abs_tol * k,
            ..*self
        }
    }

    pub(crate) fn outer_options(&self, initial_panels: usize) -> GkOptions {
        GkOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_depth: self.max_depth,
            initial_panels,
            max_panels: self.max_panels,
            parallel: self.parallel,
        }
    }

    pub(crate) fn inner(&self) -> Self {
        Self {
            parallel: false,
            ..self.scaled(self.inner_factor)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Sum of independent pieces.
    pub fn combine(parts: impl IntoIterator<Item = QuadResult>) -> Self {
        parts.into_iter().fold(Self::exact(0.0), |acc, p| Self {
            value: acc.value + p.value,
            error_estimate: acc.error_estimate + p.error_estimate,
            evaluations: acc.evaluations + p.evaluations,
            converged: acc.converged && p.converged,
        })
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            error_estimate: self.error_estimate * k.abs(),
            ..self
        }
    }

    /// Turns a non-converged result into [`Error::Quadrature`].
    pub fn require(self, what: &str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Quadrature(QuadDiagnostics {
                what: what.to_string(),
                value: self.value,
                error_estimate: self.error_estimate,
                target: f64::NAN,
                evaluations: self.evaluations,
            }))
        }
    }
}
