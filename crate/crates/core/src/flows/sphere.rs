use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::Result;
use crate::flows::revolution::{Profile, ProfileJet, RevolutionPatch};
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// Radius `sqrt(-2 n t)` of the shrinking round `S^n`.
#[inline]
pub fn shrinker_radius(n: usize, t: f64) -> f64 {
    (-2.0 * n as f64 * t).sqrt()
}

#[derive(Debug)]
struct CirclePatch;

impl Patch for CirclePatch {
    fn kind(&self) -> PatchKind {
        PatchKind::Curve
    }

    fn ranges(&self, _t: f64) -> ParamBox {
        [(0.0, TAU), (0.0, 0.0)]
    }

    fn periodic(&self) -> [bool; 2] {
        [true, false]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let r = shrinker_radius(1, t);
        let (s, c) = u[0].sin_cos();
        Ok(Jet {
            x: AmbientVec([r * c, r * s, 0.0, 0.0]),
            d: [AmbientVec([-r * s, r * c, 0.0, 0.0]), AmbientVec::ZERO],
            dd: [AmbientVec([-r * c, -r * s, 0.0, 0.0]), AmbientVec::ZERO, AmbientVec::ZERO],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let r = shrinker_radius(1, t);
        let d = center.norm();
        if d - radius >= r || d + radius <= r {
            return None;
        }
        Some([(0.0, TAU), (0.0, 0.0)])
    }
}

#[derive(Debug)]
struct SphereProfile;

impl Profile for SphereProfile {
    fn range(&self, _t: f64) -> (f64, f64) {
        (0.0, PI)
    }

    fn eval(&self, s: f64, t: f64) -> Result<ProfileJet> {
        let r = shrinker_radius(2, t);
        let (sin, cos) = s.sin_cos();
        Ok(ProfileJet {
            rho: r * sin,
            z: -r * cos,
            drho: r * cos,
            dz: r * sin,
            ddrho: -r * sin,
            ddz: r * cos,
        })
    }

    fn window(&self, t: f64, axial: f64, radial: f64, radius: f64) -> Option<(f64, f64)> {
        let r = shrinker_radius(2, t);
        let d = axial.hypot(radial);
        if d - radius >= r || d + radius <= r {
            return None;
        }
        Some((0.0, PI))
    }
}

/// Shrinking circle of radius `sqrt(-2t)` in R^2.
pub fn circle() -> AncientFlow {
    AncientFlow::new(
        "circle",
        1,
        2,
        0.0,
        FlowFlags {
            is_self_shrinker: true,
            translator: None,
            reaches_origin_at_zero: true,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(1),
        }),
        vec![Arc::new(CirclePatch)],
    )
}

/// Shrinking sphere of radius `sqrt(-4t)` in R^3.
pub fn sphere2() -> AncientFlow {
    AncientFlow::new(
        "sphere2",
        2,
        3,
        0.0,
        FlowFlags {
            is_self_shrinker: true,
            translator: None,
            reaches_origin_at_zero: true,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(2),
        }),
        vec![Arc::new(RevolutionPatch(SphereProfile))],
    )
}
