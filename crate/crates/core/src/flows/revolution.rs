//! Surfaces of revolution about the `x3` axis.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::flows::{Axis, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// Profile curve `s -> (rho(s,t), z(s,t))` with two `s` derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub rho: f64,
    pub z: f64,
    pub drho: f64,
    pub dz: f64,
    pub ddrho: f64,
    pub ddz: f64,
}

pub trait Profile: Send + Sync + std::fmt::Debug {
    fn range(&self, t: f64) -> (f64, f64);
    fn eval(&self, s: f64, t: f64) -> Result<ProfileJet>;
    /// Profile parameters that can come within `radius` of a point at axial
    /// height `axial` and distance `radial` from the axis.
    fn window(&self, t: f64, axial: f64, radial: f64, radius: f64) -> Option<(f64, f64)>;
}

#[derive(Debug)]
pub struct RevolutionPatch<P>(pub P);

impl<P: Profile> Patch for RevolutionPatch<P> {
    fn kind(&self) -> PatchKind {
        PatchKind::Revolution
    }

    fn ranges(&self, t: f64) -> ParamBox {
        [self.0.range(t), (0.0, TAU)]
    }

    fn periodic(&self) -> [bool; 2] {
        [false, true]
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let p = self.0.eval(u[0], t)?;
        let (sin, cos) = u[1].sin_cos();
        let v = |a: f64, b: f64, c: f64| AmbientVec([a, b, c, 0.0]);
        Ok(Jet {
            x: v(p.rho * cos, p.rho * sin, p.z),
            d: [v(p.drho * cos, p.drho * sin, p.dz), v(-p.rho * sin, p.rho * cos, 0.0)],
            dd: [
                v(p.ddrho * cos, p.ddrho * sin, p.ddz),
                v(-p.drho * sin, p.drho * cos, 0.0),
                v(-p.rho * cos, -p.rho * sin, 0.0),
            ],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let radial = center[0].hypot(center[1]);
        let w = self.0.window(t, center[2], radial, radius)?;
        Some([w, (0.0, TAU)])
    }

    fn axis(&self) -> Option<Axis> {
        Some(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(2),
        })
    }
}
