//! Parabolic maps `X'(u, t) = (X(u, lambda^2 t + t0) - x0) / lambda`.

use std::sync::Arc;

use crate::error::Result;
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags, Jet, ParamBox, Patch, PatchKind};
use crate::vector::AmbientVec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicMap {
    /// `lambda > 0`.
    pub scale: f64,
    pub shift_x: AmbientVec,
    pub shift_t: f64,
}

impl ParabolicMap {
    pub const IDENTITY: ParabolicMap = ParabolicMap {
        scale: 1.0,
        shift_x: AmbientVec::ZERO,
        shift_t: 0.0,
    };

    pub fn rescale(r: f64) -> Self {
        Self {
            scale: r,
            ..Self::IDENTITY
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Time in the original flow.
    #[inline]
    pub fn source_time(&self, t: f64) -> f64 {
        self.scale * self.scale * t + self.shift_t
    }

    /// Image of an original point.
    #[inline]
    pub fn map_point(&self, x: &AmbientVec) -> AmbientVec {
        (*x - self.shift_x) * (1.0 / self.scale)
    }

    /// Preimage of a mapped point.
    #[inline]
    pub fn source_point(&self, x: &AmbientVec) -> AmbientVec {
        *x * self.scale + self.shift_x
    }
}

#[derive(Debug)]
struct MappedPatch {
    inner: Arc<dyn Patch>,
    map: ParabolicMap,
}

impl Patch for MappedPatch {
    fn kind(&self) -> PatchKind {
        self.inner.kind()
    }

    fn ranges(&self, t: f64) -> ParamBox {
        self.inner.ranges(self.map.source_time(t))
    }

    fn periodic(&self) -> [bool; 2] {
        self.inner.periodic()
    }

    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet> {
        let j = self.inner.jet(u, self.map.source_time(t))?;
        let k = 1.0 / self.map.scale;
        Ok(Jet {
            x: self.map.map_point(&j.x),
            d: [j.d[0] * k, j.d[1] * k],
            dd: [j.dd[0] * k, j.dd[1] * k, j.dd[2] * k],
        })
    }

    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox> {
        self.inner.ball_window(
            self.map.source_time(t),
            &self.map.source_point(center),
            radius * self.map.scale,
        )
    }

    fn axis(&self) -> Option<Axis> {
        self.inner.axis().map(|a| Axis {
            point: self.map.map_point(&a.point),
            dir: a.dir,
        })
    }
}

pub(crate) fn apply(flow: &AncientFlow, map: &ParabolicMap) -> AncientFlow {
    if map.is_identity() {
        return flow.clone();
    }
    let lam = map.scale;
    let shifted = map.shift_x != AmbientVec::ZERO || map.shift_t != 0.0;
    let flags = FlowFlags {
        is_self_shrinker: flow.flags.is_self_shrinker && !shifted,
        translator: flow.flags.translator.map(|v| v * lam),
        reaches_origin_at_zero: flow.flags.reaches_origin_at_zero && !shifted,
    };
    let entropy_space = match flow.entropy_space {
        EntropySpace::Full => EntropySpace::Full,
        EntropySpace::Line(a) => EntropySpace::Line(Axis {
            point: map.map_point(&a.point),
            dir: a.dir,
        }),
        EntropySpace::Point(p) => EntropySpace::Point(map.map_point(&p)),
    };
    let patches = flow
        .patches()
        .iter()
        .map(|p| {
            Arc::new(MappedPatch {
                inner: p.clone(),
                map: *map,
            }) as Arc<dyn Patch>
        })
        .collect();
    AncientFlow::new(
        flow.name.clone(),
        flow.n,
        flow.ambient,
        (flow.time_max - map.shift_t) / (lam * lam),
        flags,
        entropy_space,
        patches,
    )
}
