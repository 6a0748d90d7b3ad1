//! Angenent oval `cos x = e^t cosh y`, `t < 0`, shrinking to the origin at `t = 0`.
//!
//! The curve is split at the four points where its tangent is diagonal
//! (`cos 2x = e^{2t}`) into two caps, graphs `y = +-arccosh(e^{-t} cos x)`,
//! and two sides, graphs `x = +-arccos(e^t cosh y)`. Each piece stays a graph
//! with slope at most one, so no root finding is needed. For `-t < 1` the
//! arguments of `arccosh`/`arccos` sit next to 1 and are formed from
//! `expm1`-type differences; for `-t >= 1` they are formed in log space.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::Result;
use crate::flows::grim_reaper::log_cosh;
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// `x` where the tangent is diagonal: `x_c = arccos(e^{2t}) / 2`.
fn x_switch(t: f64) -> f64 {
    // arccos(1 - w) = 2 asin(sqrt(w/2))
    let w = -(2.0 * t).exp_m1();
    (w / 2.0).sqrt().asin()
}

/// Cap height `y(x) = arccosh(e^{-t} cos x) >= 0` for `|x| <= x_c`.
fn cap_height(x: f64, t: f64) -> f64 {
    if -t < 1.0 {
        let s = (0.5 * x).sin();
        let delta = (-t).exp_m1() * x.cos() - 2.0 * s * s;
        let delta = delta.max(0.0);
        (delta + (delta * (2.0 + delta)).sqrt()).ln_1p()
    } else {
        let log_w = -t + x.cos().ln();
        let q = (-log_w).exp();
        log_w + (1.0 - q * q).max(0.0).sqrt().ln_1p()
    }
}

/// Side abscissa `x(y) = arccos(e^t cosh y) >= 0` and `v = e^t cosh y`, `1 - v`.
fn side(y: f64, t: f64) -> (f64, f64, f64) {
    let (v, one_minus_v) = if -t < 1.0 {
        let s = (0.5 * y).sinh();
        let v = t.exp() * y.cosh();
        (v, -2.0 * s * s - t.exp_m1() * y.cosh())
    } else {
        let v = (t + log_cosh(y)).exp();
        (v, 1.0 - v)
    };
    let root = (one_minus_v * (1.0 + v)).max(0.0).sqrt();
    (root.atan2(v), v, root)
}

/// Upper (`sign = 1`) or lower cap, parameter `x`.
#[derive(Debug)]
struct Cap {
    sign: f64,
}

impl Patch for Cap {
    fn kind(&self) -> PatchKind {
        PatchKind::Curve
    }

    fn ranges(&self, t: f64) -> ParamBox {
        let xc = x_switch(t);
        [(-xc, xc), (0.0, 0.0)]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let x = u[0];
        let y = cap_height(x, t);
        let th = y.tanh();
        let tan = x.tan();
        let dy = -tan / th;
        let ddy = -1.0 / th - tan * tan / (th * th * th);
        let g = self.sign;
        Ok(Jet {
            x: AmbientVec([x, g * y, 0.0, 0.0]),
            d: [AmbientVec([1.0, g * dy, 0.0, 0.0]), AmbientVec::ZERO],
            dd: [AmbientVec([0.0, g * ddy, 0.0, 0.0]), AmbientVec::ZERO, AmbientVec::ZERO],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let xc = x_switch(t);
        let (y_lo, y_hi) = (cap_height(xc, t), cap_height(0.0, t));
        let cy = self.sign * center[1];
        let gap_y = (y_lo - cy).max(cy - y_hi).max(0.0);
        let lo = (center[0] - radius).max(-xc);
        let hi = (center[0] + radius).min(xc);
        if gap_y >= radius || lo >= hi {
            return None;
        }
        Some([(lo, hi), (0.0, 0.0)])
    }
}

/// Right (`sign = 1`) or left side, parameter `y`.
#[derive(Debug)]
struct Side {
    sign: f64,
}

impl Patch for Side {
    fn kind(&self) -> PatchKind {
        PatchKind::Curve
    }

    fn ranges(&self, t: f64) -> ParamBox {
        let yc = cap_height(x_switch(t), t);
        [(-yc, yc), (0.0, 0.0)]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let y = u[0];
        let (x, v, root) = side(y, t);
        let th = y.tanh();
        let dx = -v * th / root;
        let ddx = -v / root - v * v * v * th * th / (root * root * root);
        let g = self.sign;
        Ok(Jet {
            x: AmbientVec([g * x, y, 0.0, 0.0]),
            d: [AmbientVec([g * dx, 1.0, 0.0, 0.0]), AmbientVec::ZERO],
            dd: [AmbientVec([g * ddx, 0.0, 0.0, 0.0]), AmbientVec::ZERO, AmbientVec::ZERO],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let yc = cap_height(x_switch(t), t);
        let (x_lo, x_hi) = (x_switch(t), side(0.0, t).0.min(FRAC_PI_2));
        let cx = self.sign * center[0];
        let gap_x = (x_lo - cx).max(cx - x_hi).max(0.0);
        let lo = (center[1] - radius).max(-yc);
        let hi = (center[1] + radius).min(yc);
        if gap_x >= radius || lo >= hi {
            return None;
        }
        Some([(lo, hi), (0.0, 0.0)])
    }
}

pub fn angenent_oval() -> AncientFlow {
    AncientFlow::new(
        "angenent_oval",
        1,
        2,
        0.0,
        FlowFlags {
            is_self_shrinker: false,
            translator: None,
            reaches_origin_at_zero: true,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(1),
        }),
        vec![
            Arc::new(Cap { sign: 1.0 }),
            Arc::new(Side { sign: 1.0 }),
            Arc::new(Cap { sign: -1.0 }),
            Arc::new(Side { sign: -1.0 }),
        ],
    )
}
