//! Parameter sub-domains whose image lies in a Euclidean ball.
//!
//! Along a one-dimensional parameter segment, `g(u) = |X(u) - c|^2 - R^2` is
//! sampled on a uniform grid; critical points of `g` are located by bisection
//! on sign changes of `g' = 2 (X - c) . X_u` so that no excursion into the
//! ball between two grid nodes is missed, and the roots of `g` are then
//! bracketed between consecutive nodes and bisected to machine precision.

use crate::error::Result;
use crate::flows::{AncientFlow, Patch, PatchKind};
use crate::quad::{self, QuadConfig, QuadResult};
use crate::vector::AmbientVec;

/// Default number of scan cells per parameter segment.
pub const SCAN_CELLS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubDomainKind {
    /// Curve parameter interval.
    Interval,
    /// Profile interval of a surface of revolution whose axis passes through
    /// the ball center; the image is the full band swept by the angle.
    Band,
    /// Two-parameter domain: `[lo, hi]` is the range of coordinate
    /// `outer_axis`; the inside set of each fiber is found on demand within
    /// `inner_window`.
    Fibered {
        outer_axis: usize,
        inner_window: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubDomain {
    pub patch: usize,
    pub kind: SubDomainKind,
    pub lo: f64,
    pub hi: f64,
    /// Width of the final brackets of the endpoints, in parameter units.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallRestriction {
    pub t: f64,
    pub center: AmbientVec,
    pub radius: f64,
    pub sub_domains: Vec<SubDomain>,
}

impl BallRestriction {
    pub fn is_empty(&self) -> bool {
        self.sub_domains.is_empty()
    }
}

/// `g` and `g'` along one parameter direction.
fn ball_gap(
    patch: &dyn Patch,
    t: f64,
    center: &AmbientVec,
    r2: f64,
    axis: usize,
    u: [f64; 2],
) -> Result<(f64, f64)> {
    let j = patch.jet(u, t)?;
    let d = j.x - *center;
    Ok((d.norm2() - r2, 2.0 * d.dot(&j.d[axis])))
}

/// Sub-intervals of `[a, b]` on which `g < 0`, with the final bracket width.
pub(crate) fn inside_intervals<F>(g: F, a: f64, b: f64, cells: usize) -> Result<(Vec<(f64, f64)>, f64)>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if !(a < b) {
        return Ok((Vec::new(), 0.0));
    }
    let cells = cells.max(1);
    let grid: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { b } else { a + (b - a) * i as f64 / cells as f64 })
        .collect();
    let vals = grid.iter().map(|&u| g(u)).collect::<Result<Vec<_>>>()?;

    // nodes: grid plus interior critical points of g
    let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(grid.len() + 8);
    nodes.push((grid[0], vals[0].0));
    for i in 0..cells {
        let (d0, d1) = (vals[i].1, vals[i + 1].1);
        if d0 * d1 < 0.0 {
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let mut glo = d0;
            let mut best = (grid[i], vals[i].0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let (gm, dm) = g(mid)?;
                best = (mid, gm);
                if (dm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = dm;
                } else {
                    hi = mid;
                }
            }
            nodes.push(best);
        }
        nodes.push((grid[i + 1], vals[i + 1].0));
    }

    let mut out = Vec::new();
    let mut width: f64 = 0.0;
    let mut start = if nodes[0].1 < 0.0 { Some(a) } else { None };
    for w in nodes.windows(2) {
        let ((u0, g0), (u1, g1)) = (w[0], w[1]);
        let in0 = g0 < 0.0;
        let in1 = g1 < 0.0;
        if in0 == in1 {
            continue;
        }
        let (mut lo, mut hi) = (u0, u1);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (g(mid)?.0 < 0.0) == in0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        width = width.max(hi - lo);
        let root = 0.5 * (lo + hi);
        if in1 {
            start = Some(root);
        } else if let Some(s) = start.take() {
            if root > s {
                out.push((s, root));
            }
        }
    }
    if let Some(s) = start {
        if b > s {
            out.push((s, b));
        }
    }
    Ok((out, width))
}

/// Inside set of the fiber of a two-parameter patch at outer coordinate `outer`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn fiber_intervals(
    patch: &dyn Patch,
    t: f64,
    center: &AmbientVec,
    radius: f64,
    outer_axis: usize,
    outer: f64,
    window: (f64, f64),
    cells: usize,
) -> Result<Vec<(f64, f64)>> {
    let inner_axis = 1 - outer_axis;
    let r2 = radius * radius;
    let point = |v: f64| {
        let mut u = [0.0; 2];
        u[outer_axis] = outer;
        u[inner_axis] = v;
        u
    };
    let (iv, _) = inside_intervals(
        |v| ball_gap(patch, t, center, r2, inner_axis, point(v)),
        window.0,
        window.1,
        cells,
    )?;
    Ok(iv)
}

fn on_axis(patch: &dyn Patch, center: &AmbientVec) -> bool {
    match patch.axis() {
        Some(a) => a.distance(center) <= 1e-12 * (1.0 + center.norm()),
        None => false,
    }
}

/// Parameter sub-domains of `flow` at time `t` whose image lies in the open
/// ball `B_radius(center)`.
pub fn restrict_to_ball(
    flow: &AncientFlow,
    t: f64,
    center: &AmbientVec,
    radius: f64,
) -> Result<BallRestriction> {
    restrict_with_cells(flow, t, center, radius, SCAN_CELLS)
}

pub(crate) fn restrict_with_cells(
    flow: &AncientFlow,
    t: f64,
    center: &AmbientVec,
    radius: f64,
    cells: usize,
) -> Result<BallRestriction> {
    flow.check_time(t)?;
    let mut sub_domains = Vec::new();
    if radius > 0.0 {
        let r2 = radius * radius;
        for (idx, p) in flow.patches().iter().enumerate() {
            let Some(window) = p.ball_window(t, center, radius) else {
                continue;
            };
            let p = p.as_ref();
            let one_dim = |kind: SubDomainKind, sub: &mut Vec<SubDomain>| -> Result<()> {
                let (iv, tol) = inside_intervals(
                    |u| ball_gap(p, t, center, r2, 0, [u, 0.0]),
                    window[0].0,
                    window[0].1,
                    cells,
                )?;
                sub.extend(iv.into_iter().map(|(lo, hi)| SubDomain {
                    patch: idx,
                    kind,
                    lo,
                    hi,
                    tol,
                }));
                Ok(())
            };
            match p.kind() {
                PatchKind::Curve => one_dim(SubDomainKind::Interval, &mut sub_domains)?,
                PatchKind::Revolution if on_axis(p, center) => {
                    one_dim(SubDomainKind::Band, &mut sub_domains)?
                }
                PatchKind::Revolution => sub_domains.push(SubDomain {
                    patch: idx,
                    kind: SubDomainKind::Fibered {
                        outer_axis: 1,
                        inner_window: window[0],
                    },
                    lo: window[1].0,
                    hi: window[1].1,
                    tol: 0.0,
                }),
                PatchKind::Sheet => sub_domains.push(SubDomain {
                    patch: idx,
                    kind: SubDomainKind::Fibered {
                        outer_axis: 0,
                        inner_window: window[1],
                    },
                    lo: window[0].0,
                    hi: window[0].1,
                    tol: 0.0,
                }),
            }
        }
    }
    Ok(BallRestriction {
        t,
        center: *center,
        radius,
        sub_domains,
    })
}

/// Area of `M_t` inside `B_radius(center)`.
pub fn hausdorff_mass(
    flow: &AncientFlow,
    t: f64,
    center: &AmbientVec,
    radius: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let restriction = restrict_to_ball(flow, t, center, radius)?;
    quad::integrate_slice(flow, t, |_| 1.0, Some(&restriction), cfg)?.require("hausdorff mass")
}
