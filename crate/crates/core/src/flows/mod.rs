//! Explicit ancient mean curvature flows.
//!
//! A flow is a list of parameter patches. Each patch supplies the position
//! and its first and second parameter derivatives in closed form (or from a
//! cached ODE profile for the bowl); geometry such as the mean curvature
//! vector is assembled from those derivatives in [`geometry`].

mod angenent;
mod bowl;
mod catalog;
mod cylinder;
pub mod geometry;
mod grim_reaper;
mod plane;
mod revolution;
pub mod restrict;
mod sphere;
mod spec;
mod transform;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::vector::AmbientVec;

pub use bowl::BowlProfile;
pub use catalog::{by_name, catalog, CATALOG_NAMES};
pub use geometry::{evaluate_geometry, geometry_from_jet, SliceGeometry};
pub use restrict::{hausdorff_mass, restrict_to_ball, BallRestriction, SubDomain, SubDomainKind};
pub use spec::{FlowParameters, FlowSpec, Recenter};
pub use transform::ParabolicMap;

/// Position and parameter derivatives at one chart point.
///
/// For curves only `d[0]` and `dd[0]` are meaningful. For two-dimensional
/// patches `dd` holds `(uu, uv, vv)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub x: AmbientVec,
    pub d: [AmbientVec; 2],
    pub dd: [AmbientVec; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatchKind {
    /// One parameter, `n = 1`.
    Curve,
    /// Surface of revolution in R^3, parameters `(profile, angle)`.
    Revolution,
    /// Generic two-parameter surface.
    Sheet,
}

/// Symmetry axis of a surface of revolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub point: AmbientVec,
    /// Unit direction.
    pub dir: AmbientVec,
}

impl Axis {
    pub fn distance(&self, p: &AmbientVec) -> f64 {
        let d = *p - self.point;
        let along = d.dot(&self.dir);
        (d.norm2() - along * along).max(0.0).sqrt()
    }
}

/// Parameter box `[(lo, hi); 2]`; the second entry is ignored for curves.
pub type ParamBox = [(f64, f64); 2];

pub trait Patch: Send + Sync + fmt::Debug {
    fn kind(&self) -> PatchKind;

    /// Chart ranges at time `t`. Unbounded directions use infinities.
    fn ranges(&self, t: f64) -> ParamBox;

    /// Whether a chart direction is periodic (angles).
    fn periodic(&self) -> [bool; 2] {
        [false, false]
    }

    /// Jet at a chart point; callers guarantee `u` lies in [`Patch::ranges`].
    fn jet(&self, u: [f64; 2], t: f64) -> Result<Jet>;

    /// A finite parameter box containing every chart point whose image lies
    /// within `radius` of `center`, or `None` if there is provably none.
    fn ball_window(&self, t: f64, center: &AmbientVec, radius: f64) -> Option<ParamBox>;

    /// Symmetry axis, for [`PatchKind::Revolution`].
    fn axis(&self) -> Option<Axis> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct FlowFlags {
    pub is_self_shrinker: bool,
    /// Translation velocity for translating solitons.
    pub translator: Option<AmbientVec>,
    pub reaches_origin_at_zero: bool,
}

/// Where the entropy optimizer searches for Gaussian centers `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropySpace {
    Full,
    /// `x0` restricted to a symmetry line.
    Line(Axis),
    /// `x0` fixed: the flow is invariant under translation along its symmetry
    /// axis, so one axis point stands for all of them.
    Point(AmbientVec),
}

/// An ancient mean curvature flow given by closed-form patches.
#[derive(Debug, Clone)]
pub struct AncientFlow {
    pub name: String,
    /// Intrinsic dimension `n`.
    pub n: usize,
    /// Ambient dimension `N`.
    pub ambient: usize,
    /// Exclusive end of the time domain (`+inf` for eternal flows).
    pub time_max: f64,
    pub flags: FlowFlags,
    pub entropy_space: EntropySpace,
    patches: Vec<Arc<dyn Patch>>,
}

impl AncientFlow {
    pub(crate) fn new(
        name: impl Into<String>,
        n: usize,
        ambient: usize,
        time_max: f64,
        flags: FlowFlags,
        entropy_space: EntropySpace,
        patches: Vec<Arc<dyn Patch>>,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            ambient,
            time_max,
            flags,
            entropy_space,
            patches,
        }
    }

    pub fn patches(&self) -> &[Arc<dyn Patch>] {
        &self.patches
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if !(t < self.time_max) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "{} is defined for t < {}, got t = {t}",
                self.name, self.time_max
            )));
        }
        Ok(())
    }

    /// Position of the first patch's parameter origin, used as a reference
    /// point (apex of translators, tip of the bowl).
    pub fn anchor(&self, t: f64) -> Result<AmbientVec> {
        let p = &self.patches[0];
        let [(a, b), (c, d)] = p.ranges(t);
        let u0 = 0.0f64.clamp(a, b);
        let v0 = if p.kind() == PatchKind::Curve {
            0.0
        } else {
            0.0f64.clamp(c, d)
        };
        Ok(p.jet([u0, v0], t)?.x)
    }

    /// Parabolic rescaling `(r^{-1} M_{r^2 t})`.
    pub fn parabolic_rescale(&self, r: f64) -> Result<AncientFlow> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("rescale factor must be positive, got {r}")));
        }
        Ok(self.transformed(&ParabolicMap::rescale(r)))
    }

    /// The flow seen from space-time point `(x0, t0)`: `M'_t = M_{t + t0} - x0`.
    pub fn recentered(&self, x0: AmbientVec, t0: f64) -> AncientFlow {
        self.transformed(&ParabolicMap {
            scale: 1.0,
            shift_x: x0,
            shift_t: t0,
        })
    }

    pub fn transformed(&self, map: &ParabolicMap) -> AncientFlow {
        transform::apply(self, map)
    }
}
