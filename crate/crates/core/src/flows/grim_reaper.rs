use std::f64::consts::{FRAC_PI_2, LN_2};
use std::sync::Arc;

use crate::error::Result;
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// `log cosh s` without overflow.
#[inline]
pub(crate) fn log_cosh(s: f64) -> f64 {
    let a = s.abs();
    if a < 1.0 {
        let h = (0.5 * a).sinh();
        (2.0 * h * h).ln_1p()
    } else {
        a - LN_2 + (-2.0 * a).exp().ln_1p()
    }
}

/// Gudermannian `gd(s) = atan(sinh s)`, accurate near `+-pi/2`.
#[inline]
fn gudermannian(s: f64) -> f64 {
    if s.abs() < 1.0 {
        return s.sinh().atan();
    }
    let g = FRAC_PI_2 - 2.0 * (-s.abs()).exp().atan();
    g.copysign(s)
}

/// Grim reaper `y = t - log cos x` in arclength `s` from the apex:
/// `x = gd(s)`, `y = log cosh s + t`.
#[derive(Debug)]
struct GrimReaperPatch;

impl Patch for GrimReaperPatch {
    fn kind(&self) -> PatchKind {
        PatchKind::Curve
    }

    fn ranges(&self, _t: f64) -> ParamBox {
        [(f64::NEG_INFINITY, f64::INFINITY), (0.0, 0.0)]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let s = u[0];
        let sech = 1.0 / s.cosh();
        let tanh = s.tanh();
        Ok(Jet {
            x: AmbientVec([gudermannian(s), log_cosh(s) + t, 0.0, 0.0]),
            d: [AmbientVec([sech, tanh, 0.0, 0.0]), AmbientVec::ZERO],
            dd: [
                AmbientVec([-sech * tanh, sech * sech, 0.0, 0.0]),
                AmbientVec::ZERO,
                AmbientVec::ZERO,
            ],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        // log cosh s >= |s| - ln 2 bounds the height; |x| < pi/2 bounds the width.
        let reach = radius + LN_2 + center[1] - t;
        if reach <= 0.0 || center[0].abs() - radius >= FRAC_PI_2 {
            return None;
        }
        let inv_gd = |x: f64| {
            if x <= -FRAC_PI_2 {
                f64::NEG_INFINITY
            } else if x >= FRAC_PI_2 {
                f64::INFINITY
            } else {
                x.tan().asinh()
            }
        };
        let lo = inv_gd(center[0] - radius).max(-reach);
        let hi = inv_gd(center[0] + radius).min(reach);
        if lo >= hi {
            return None;
        }
        Some([(lo, hi), (0.0, 0.0)])
    }
}

/// The grim reaper translating upward with unit speed.
pub fn grim_reaper() -> AncientFlow {
    AncientFlow::new(
        "grim_reaper",
        1,
        2,
        f64::INFINITY,
        FlowFlags {
            is_self_shrinker: false,
            translator: Some(AmbientVec::unit(1)),
            reaches_origin_at_zero: false,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(1),
        }),
        vec![Arc::new(GrimReaperPatch)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_cosh_matches_direct_form() {
        for s in [-3.0, -0.1, 0.0, 0.5, 10.0] {
            let direct = f64::cosh(s).ln();
            assert!((log_cosh(s) - direct).abs() < 1e-14);
        }
        assert!((log_cosh(1e-9) / 0.5e-18 - 1.0).abs() < 1e-12);
        assert!((log_cosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
    }

    #[test]
    fn gudermannian_matches_atan_sinh() {
        for s in [-5.0, -0.7, 0.0, 0.3, 4.0] {
            assert!((gudermannian(s) - s.sinh().atan()).abs() < 1e-15);
        }
    }

    #[test]
    fn on_the_graph() {
        let p = GrimReaperPatch;
        for s in [-4.0, -1.0, 0.2, 2.5] {
            let j = p.jet([s, 0.0], -3.0).unwrap();
            assert!((j.x[1] - (-3.0 - j.x[0].cos().ln())).abs() < 1e-12);
        }
    }
}
