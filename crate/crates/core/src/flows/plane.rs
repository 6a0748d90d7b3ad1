use std::sync::Arc;

use crate::error::Result;
use crate::flows::revolution::{Profile, ProfileJet, RevolutionPatch};
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

/// Straight line `u e_0 + offset e_1` in R^N (codimension zero when N = 1).
#[derive(Debug)]
struct LinePatch {
    offset: f64,
}

impl Patch for LinePatch {
    fn kind(&self) -> PatchKind {
        PatchKind::Curve
    }

    fn ranges(&self, _t: f64) -> ParamBox {
        [(f64::NEG_INFINITY, f64::INFINITY), (0.0, 0.0)]
    }

    fn jet(&self, u: [f64; 2], _t: f64) -> Result<Jet> {
        let mut x = AmbientVec::ZERO;
        x[0] = u[0];
        x[1] = self.offset;
        Ok(Jet {
            x,
            d: [AmbientVec::unit(0), AmbientVec::ZERO],
            dd: [AmbientVec::ZERO; 3],
        })
    }

    fn ball_window(&self, _t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        let mut off = *center;
        off[0] = 0.0;
        off[1] -= self.offset;
        let d2 = off.norm2();
        if d2 >= radius * radius {
            return None;
        }
        let half = (radius * radius - d2).sqrt();
        Some([(center[0] - half, center[0] + half), (0.0, 0.0)])
    }
}

/// Flat disk profile `(s, offset)`, `s >= 0`.
#[derive(Debug)]
struct FlatProfile {
    offset: f64,
}

impl Profile for FlatProfile {
    fn range(&self, _t: f64) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn eval(&self, s: f64, _t: f64) -> Result<ProfileJet> {
        Ok(ProfileJet {
            rho: s,
            z: self.offset,
            drho: 1.0,
            dz: 0.0,
            ddrho: 0.0,
            ddz: 0.0,
        })
    }

    fn window(&self, _t: f64, axial: f64, radial: f64, radius: f64) -> Option<(f64, f64)> {
        let dz = axial - self.offset;
        if dz.abs() >= radius {
            return None;
        }
        let half = (radius * radius - dz * dz).sqrt();
        Some(((radial - half).max(0.0), radial + half))
    }
}

/// Static line (`n = 1`) in R^N, shifted by `offset` along `e_1` when N >= 2.
pub fn line(ambient: usize, offset: f64) -> AncientFlow {
    assert!((1..=crate::vector::MAX_AMBIENT).contains(&ambient));
    let offset = if ambient == 1 { 0.0 } else { offset };
    AncientFlow::new(
        if offset == 0.0 { "plane" } else { "shifted_plane" },
        1,
        ambient,
        f64::INFINITY,
        FlowFlags {
            is_self_shrinker: offset == 0.0,
            translator: None,
            reaches_origin_at_zero: offset == 0.0,
        },
        EntropySpace::Full,
        vec![Arc::new(LinePatch { offset })],
    )
}

/// Static plane `x3 = offset` in R^3.
pub fn plane2(offset: f64) -> AncientFlow {
    AncientFlow::new(
        if offset == 0.0 { "plane2" } else { "shifted_plane2" },
        2,
        3,
        f64::INFINITY,
        FlowFlags {
            is_self_shrinker: offset == 0.0,
            translator: None,
            reaches_origin_at_zero: offset == 0.0,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(2),
        }),
        vec![Arc::new(RevolutionPatch(FlatProfile { offset }))],
    )
}
