//! First and second fundamental form assembly from patch jets.

use crate::error::{Error, Result};
use crate::flows::{AncientFlow, Jet};
use crate::vector::AmbientVec;

/// Geometry of a slice at one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceGeometry {
    pub x: AmbientVec,
    /// `sqrt(det g)` per unit parameter volume.
    pub area_density: f64,
    /// Orthonormal tangent frame; only the first `n` entries are used.
    pub frame: [AmbientVec; 2],
    pub n: usize,
    /// Mean curvature vector `H = tr_g (D^2 x)^perp`.
    pub h: AmbientVec,
}

impl SliceGeometry {
    /// Orthogonal projection onto the tangent space.
    #[inline]
    pub fn tangential(&self, v: &AmbientVec) -> AmbientVec {
        let mut out = AmbientVec::ZERO;
        for e in &self.frame[..self.n] {
            out += *e * e.dot(v);
        }
        out
    }

    /// Orthogonal projection onto the normal space.
    #[inline]
    pub fn normal(&self, v: &AmbientVec) -> AmbientVec {
        *v - self.tangential(v)
    }
}

/// Assembles geometry from a jet of an `n`-dimensional patch (`n` = 1 or 2).
pub fn geometry_from_jet(jet: &Jet, n: usize) -> SliceGeometry {
    match n {
        1 => {
            let d = jet.d[0];
            let len2 = d.norm2();
            let len = len2.sqrt();
            let e = d * (1.0 / len);
            let acc = jet.dd[0];
            let h = (acc - e * e.dot(&acc)) * (1.0 / len2);
            SliceGeometry {
                x: jet.x,
                area_density: len,
                frame: [e, AmbientVec::ZERO],
                n: 1,
                h,
            }
        }
        2 => {
            let (xu, xv) = (jet.d[0], jet.d[1]);
            let a = xu.norm2();
            let b = xu.dot(&xv);
            let c = xv.norm2();
            let det = (a * c - b * b).max(0.0);
            let e1 = xu * (1.0 / a.sqrt());
            let w = xv - e1 * e1.dot(&xv);
            let e2 = w * (1.0 / w.norm());
            let inv = 1.0 / det;
            let trace = jet.dd[0] * (c * inv) - jet.dd[1] * (2.0 * b * inv) + jet.dd[2] * (a * inv);
            let g = SliceGeometry {
                x: jet.x,
                area_density: det.sqrt(),
                frame: [e1, e2],
                n: 2,
                h: AmbientVec::ZERO,
            };
            SliceGeometry {
                h: g.normal(&trace),
                ..g
            }
        }
        _ => panic!("patches of intrinsic dimension {n} are not supported"),
    }
}

/// Geometry of patch `patch` of `flow` at chart point `u`, time `t`.
pub fn evaluate_geometry(
    flow: &AncientFlow,
    patch: usize,
    u: [f64; 2],
    t: f64,
) -> Result<SliceGeometry> {
    flow.check_time(t)?;
    let p = flow.patches().get(patch).ok_or_else(|| {
        Error::InvalidArgument(format!("{} has no patch {patch}", flow.name))
    })?;
    let ranges = p.ranges(t);
    let dims = flow.n;
    for (k, &(lo, hi)) in ranges.iter().enumerate().take(dims) {
        if !(u[k] >= lo && u[k] <= hi) {
            return Err(Error::OutsideChart {
                flow: flow.name.clone(),
                param: u[..dims].to_vec(),
                t,
            });
        }
    }
    let jet = p.jet(u, t)?;
    Ok(geometry_from_jet(&jet, flow.n))
}
