use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::flows::restrict::{fiber_intervals, restrict_with_cells};
use crate::flows::{geometry_from_jet, AncientFlow, BallRestriction, Patch, PatchKind, SliceGeometry, SubDomain, SubDomainKind};
use crate::quad::{integrate, QuadConfig, QuadResult};
use crate::vector::AmbientVec;

/// Radius outside of which `exp(|x|^2 / 4t)` is below `delta`.
pub fn gaussian_truncation_radius(t: f64, delta: f64) -> f64 {
    (-4.0 * t * (1.0 / delta).ln()).sqrt()
}

fn geometry(flow: &AncientFlow, patch: &dyn Patch, u: [f64; 2], t: f64) -> Result<SliceGeometry> {
    Ok(geometry_from_jet(&patch.jet(u, t)?, flow.n))
}

fn integrate_sub_domain<F>(
    flow: &AncientFlow,
    t: f64,
    center: &AmbientVec,
    radius: f64,
    sd: &SubDomain,
    f: &F,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(&SliceGeometry) -> f64 + Sync,
{
    let patch = flow.patches()[sd.patch].as_ref();
    let opts = cfg.outer_options(cfg.slice_panels);
    match sd.kind {
        SubDomainKind::Interval => integrate(
            |u| {
                let g = geometry(flow, patch, [u, 0.0], t)?;
                Ok((f(&g) * g.area_density, 0.0))
            },
            sd.lo,
            sd.hi,
            &opts,
        ),
        SubDomainKind::Band => integrate(
            |u| {
                let g = geometry(flow, patch, [u, 0.0], t)?;
                Ok((TAU * f(&g) * g.area_density, 0.0))
            },
            sd.lo,
            sd.hi,
            &opts,
        ),
        SubDomainKind::Fibered {
            outer_axis,
            inner_window,
        } => {
            let inner_cfg = cfg.inner();
            let inner_opts = inner_cfg.outer_options(cfg.slice_panels);
            integrate(
                |w| {
                    let fibers = if radius.is_finite() {
                        fiber_intervals(patch, t, center, radius, outer_axis, w, inner_window, cfg.scan_cells)?
                    } else {
                        vec![inner_window]
                    };
                    let mut parts = Vec::with_capacity(fibers.len());
                    for (lo, hi) in fibers {
                        parts.push(integrate(
                            |v| {
                                let mut u = [0.0; 2];
                                u[outer_axis] = w;
                                u[1 - outer_axis] = v;
                                let g = geometry(flow, patch, u, t)?;
                                Ok((f(&g) * g.area_density, 0.0))
                            },
                            lo,
                            hi,
                            &inner_opts,
                        )?);
                    }
                    let r = QuadResult::combine(parts);
                    Ok((r.value, r.error_estimate))
                },
                sd.lo,
                sd.hi,
                &opts,
            )
        }
    }
}

/// `int_{M_t} f dmu_t`, over `restriction` if given and over the whole chart
/// otherwise (which must then be bounded).
pub fn integrate_slice<F>(
    flow: &AncientFlow,
    t: f64,
    f: F,
    restriction: Option<&BallRestriction>,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(&SliceGeometry) -> f64 + Sync,
{
    flow.check_time(t)?;
    let (subs, center, radius) = match restriction {
        Some(r) => (r.sub_domains.clone(), r.center, r.radius),
        None => {
            let mut subs = Vec::new();
            for (idx, p) in flow.patches().iter().enumerate() {
                let [(a, b), (c, d)] = p.ranges(t);
                let two_dim = p.kind() != PatchKind::Curve;
                if !(a.is_finite() && b.is_finite()) || (two_dim && !(c.is_finite() && d.is_finite())) {
                    return Err(Error::InvalidArgument(format!(
                        "{} has an unbounded chart; integrate over a ball restriction",
                        flow.name
                    )));
                }
                subs.push(SubDomain {
                    patch: idx,
                    kind: if two_dim {
                        SubDomainKind::Fibered {
                            outer_axis: 0,
                            inner_window: (c, d),
                        }
                    } else {
                        SubDomainKind::Interval
                    },
                    lo: a,
                    hi: b,
                    tol: 0.0,
                });
            }
            (subs, AmbientVec::ZERO, f64::INFINITY)
        }
    };
    let parts = subs
        .iter()
        .map(|sd| integrate_sub_domain(flow, t, &center, radius, sd, &f, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadResult::combine(parts))
}

/// `int_{M_t} f dmu_t` for an integrand carrying the Gaussian factor
/// `exp(|x|^2/4t)` about the origin; the slice is truncated to the ball where
/// that factor exceeds `cfg.gaussian_truncation`.
pub fn integrate_gaussian_slice<F>(flow: &AncientFlow, t: f64, f: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(&SliceGeometry) -> f64 + Sync,
{
    if !(t < 0.0) {
        return Err(Error::Domain(format!("Gaussian slice integral needs t < 0, got {t}")));
    }
    let radius = gaussian_truncation_radius(t, cfg.gaussian_truncation);
    let restriction = restrict_with_cells(flow, t, &AmbientVec::ZERO, radius, cfg.scan_cells)?;
    integrate_slice(flow, t, f, Some(&restriction), cfg)
}
