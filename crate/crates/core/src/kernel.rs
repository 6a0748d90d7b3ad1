//! Backward heat kernel, its logarithm and heat-ball geometry.
//!
//! Everything here is evaluated in log space first and exponentiated last,
//! since `(-4 pi t)^(-n/2)` overflows for tiny `-t`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vector::AmbientVec;

/// A space-time point `(x, t)` with `t < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: AmbientVec,
    pub t: f64,
}

impl KernelPoint {
    pub fn new(x: AmbientVec, t: f64) -> Result<Self> {
        if !(t < 0.0) {
            return Err(Error::Domain(format!("kernel needs t < 0, got {t}")));
        }
        Ok(Self { x, t })
    }
}

/// Space-time center `(x0, t0)` of a kernel or heat ball.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Center {
    pub x: AmbientVec,
    pub t: f64,
}

impl Center {
    pub const ORIGIN: Center = Center {
        x: AmbientVec::ZERO,
        t: 0.0,
    };

    pub fn new(x: AmbientVec, t: f64) -> Self {
        Self { x, t }
    }
}

impl Default for Center {
    fn default() -> Self {
        Self::ORIGIN
    }
}

/// `log Phi(x, t)` for `t < 0`, no domain check.
#[inline]
pub fn log_phi_unchecked(x_norm2: f64, t: f64, n: usize) -> f64 {
    x_norm2 / (4.0 * t) - 0.5 * n as f64 * (-4.0 * PI * t).ln()
}

/// `Phi(x, t) = (-4 pi t)^(-n/2) exp(|x|^2 / 4t)`.
pub fn phi(p: &KernelPoint, n: usize) -> Result<f64> {
    if !(p.t < 0.0) {
        return Err(Error::Domain(format!("phi needs t < 0, got {}", p.t)));
    }
    Ok(log_phi_unchecked(p.x.norm2(), p.t, n).exp())
}

/// `Phi(x - x0, t - t0)`.
pub fn phi_centered(x: &AmbientVec, t: f64, center: &Center, n: usize) -> Result<f64> {
    if !(t < center.t) {
        return Err(Error::Domain(format!(
            "recentered kernel needs t < t0, got t = {t}, t0 = {}",
            center.t
        )));
    }
    let p = KernelPoint {
        x: *x - center.x,
        t: t - center.t,
    };
    phi(&p, n)
}

/// `psi_r = log(Phi r^n) = |x|^2/4t - (n/2) log(-4 pi t / r^2)`, no domain check.
#[inline]
pub fn psi_r_unchecked(x_norm2: f64, t: f64, r: f64, n: usize) -> f64 {
    x_norm2 / (4.0 * t) - 0.5 * n as f64 * (-4.0 * PI * t / (r * r)).ln()
}

pub fn psi_r(p: &KernelPoint, r: f64, n: usize) -> Result<f64> {
    if !(p.t < 0.0) {
        return Err(Error::Domain(format!("psi_r needs t < 0, got {}", p.t)));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("psi_r needs r > 0, got {r}")));
    }
    Ok(psi_r_unchecked(p.x.norm2(), p.t, r, n))
}

/// Length of the heat-ball time window, `r^2 / 4 pi`.
#[inline]
pub fn window_length(r: f64) -> f64 {
    r * r / (4.0 * PI)
}

/// Squared slice radius from the normalized time `tau = -4 pi t / r^2` in (0, 1).
///
/// `log_tau` is passed separately so callers that know `log tau` accurately
/// near `tau = 1` do not lose it to rounding.
#[inline]
pub fn slice_radius2_from_tau(r: f64, tau: f64, log_tau: f64, n: usize) -> f64 {
    let v = -(n as f64) * r * r / (2.0 * PI) * tau * log_tau;
    if v < 0.0 {
        // endpoint roundoff
        if v >= -1e-14 * r * r {
            0.0
        } else {
            v
        }
    } else {
        v
    }
}

/// `R_r(t) = sqrt(2 n t log(-4 pi t / r^2))` on the open window `-r^2/4pi < t < 0`.
pub fn slice_radius(r: f64, t: f64, n: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("slice radius needs r > 0, got {r}")));
    }
    let tau = -t / window_length(r);
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!(
            "t = {t} outside the heat-ball window (-{}, 0)",
            window_length(r)
        )));
    }
    let v = slice_radius2_from_tau(r, tau, tau.ln(), n);
    Ok(v.max(0.0).sqrt())
}

/// Heat ball `E_r` around a space-time center, for an `n`-dimensional flow.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HeatBall {
    pub center: Center,
    pub r: f64,
    pub n: usize,
}

impl HeatBall {
    pub fn new(center: Center, r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("heat ball radius must be positive, got {r}")));
        }
        if n == 0 {
            return Err(Error::Domain("heat ball needs n >= 1".into()));
        }
        Ok(Self { center, r, n })
    }

    pub fn at_origin(r: f64, n: usize) -> Result<Self> {
        Self::new(Center::ORIGIN, r, n)
    }

    /// Open time window `(t0 - r^2/4pi, t0)`.
    pub fn window(&self) -> (f64, f64) {
        (self.center.t - window_length(self.r), self.center.t)
    }

    /// Largest slice radius, attained at `t0 - r^2/(4 pi e)`.
    pub fn max_slice_radius(&self) -> f64 {
        self.r * (self.n as f64 / (2.0 * PI * std::f64::consts::E)).sqrt()
    }

    pub fn slice_radius(&self, t: f64) -> Result<f64> {
        slice_radius(self.r, t - self.center.t, self.n)
    }

    pub fn contains(&self, x: &AmbientVec, t: f64) -> bool {
        heat_ball_contains(self, x, t)
    }
}

pub fn heat_ball_contains(hb: &HeatBall, x: &AmbientVec, t: f64) -> bool {
    let (lo, hi) = hb.window();
    if !(t > lo && t < hi) {
        return false;
    }
    match hb.slice_radius(t) {
        Ok(radius) => (*x - hb.center.x).norm2() < radius * radius,
        Err(_) => false,
    }
}

/// `[x]_+ = max(x, 0)`.
#[inline]
pub fn positive_part(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
