use std::f64::consts::TAU;
use std::sync::Arc;

use crate::error::Result;
use crate::flows::sphere::shrinker_radius;
use crate::flows::{AncientFlow, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// `S^1(sqrt(-2t)) x R` in R^3, chart `(angle, height)`.
#[derive(Debug)]
struct CylinderPatch;

impl Patch for CylinderPatch {
    fn kind(&self) -> PatchKind {
        PatchKind::Sheet
    }

    fn ranges(&self, _t: f64) -> ParamBox {
        [(0.0, TAU), (f64::NEG_INFINITY, f64::INFINITY)]
    }

    fn periodic(&self) -> [bool; 2] {
        [true, false]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let r = shrinker_radius(1, t);
        let (s, c) = u[0].sin_cos();
        Ok(Jet {
            x: AmbientVec([r * c, r * s, u[1], 0.0]),
            d: [AmbientVec([-r * s, r * c, 0.0, 0.0]), AmbientVec::unit(2)],
            dd: [AmbientVec([-r * c, -r * s, 0.0, 0.0]), AmbientVec::ZERO, AmbientVec::ZERO],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let r = shrinker_radius(1, t);
        let radial = center[0].hypot(center[1]);
        if (radial - r).abs() >= radius {
            return None;
        }
        Some([(0.0, TAU), (center[2] - radius, center[2] + radius)])
    }
}

pub fn cylinder() -> AncientFlow {
    AncientFlow::new(
        "cylinder",
        2,
        3,
        0.0,
        FlowFlags {
            is_self_shrinker: true,
            translator: None,
            reaches_origin_at_zero: true,
        },
        EntropySpace::Point(AmbientVec::ZERO),
        vec![Arc::new(CylinderPatch)],
    )
}
