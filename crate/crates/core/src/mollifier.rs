//! Smoothed heat-ball cutoffs and the smoothed Ecker integral.
//!
//! `eta_eps` is a unit-mass bump on `[0, eps]`, `zeta_eps` its antiderivative
//! (a smoothed Heaviside step) and `Z_eps` the antiderivative of `zeta_eps` (a
//! smoothed ramp `[x]_+`). The smoothed Ecker integral
//! `A_eps(s, r) = int int_{t <= s} |grad psi|^2 zeta_eps(psi_r) + |H|^2 Z_eps(psi_r)`
//! replaces the sharp heat-ball boundary by these cutoffs.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{restrict_to_ball, AncientFlow};
use crate::kernel::{log_phi_unchecked, positive_part, slice_radius, window_length, HeatBall, KernelPoint};
use crate::quad::{
    improper_limit, integrate, integrate_heatball, integrate_heatball_between, integrate_slice, Direction,
    GkOptions, LimitEstimate, QuadConfig, QuadResult,
};
use crate::quantities::{deficit_norm2, ecker_integral};

/// Cells of the cumulative `zeta` / `Z` tables.
pub const TABLE_CELLS: usize = 2048;

/// Unnormalized unit bump `exp(-1 / (u (1 - u)))` on `(0, 1)`.
fn unit_bump(u: f64) -> f64 {
    if u > 0.0 && u < 1.0 {
        (-1.0 / (u * (1.0 - u))).exp()
    } else {
        0.0
    }
}

fn tight(initial_panels: usize) -> GkOptions {
    GkOptions {
        rel_tol: 1e-13,
        abs_tol: 1e-20,
        max_depth: 30,
        initial_panels,
        ..GkOptions::default()
    }
}

/// The bump `eta_eps` with its first and second antiderivatives.
///
/// `eta_eps(y) = b(y / eps) / eps` with `b` the normalized standard bump on
/// `[0, 1]`, so one table serves every `eps`. The antiderivatives are stored
/// at [`TABLE_CELLS`] + 1 nodes and interpolated by cubic Hermite polynomials
/// using their exact derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct MollifierFamily {
    pub eps: f64,
    /// `alpha(eta_eps) = log int e^{-y} eta_eps(y) dy`.
    pub alpha: f64,
    #[serde(skip)]
    norm: f64,
    #[serde(skip)]
    step_table: Vec<f64>,
    #[serde(skip)]
    ramp_table: Vec<f64>,
}

impl MollifierFamily {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("mollifier needs eps > 0, got {eps}")));
        }
        let h = 1.0 / TABLE_CELLS as f64;
        let node = |k: usize| k as f64 * h;
        let mut step = vec![0.0; TABLE_CELLS + 1];
        let mut ramp = vec![0.0; TABLE_CELLS + 1];
        for k in 0..TABLE_CELLS {
            let (a, b) = (node(k), node(k + 1));
            let mass = integrate(|u| Ok((unit_bump(u), 0.0)), a, b, &tight(1))?.value;
            // int_a^b B = h B(a) + int_a^b (b - u) bump(u) du
            let moment = integrate(|u| Ok(((b - u) * unit_bump(u), 0.0)), a, b, &tight(1))?.value;
            step[k + 1] = step[k] + mass;
            ramp[k + 1] = ramp[k] + h * step[k] + moment;
        }
        let total = step[TABLE_CELLS];
        for v in step.iter_mut().chain(ramp.iter_mut()) {
            *v /= total;
        }
        let norm = 1.0 / total;
        let weighted = integrate(
            |u| Ok(((-eps * u).exp() * norm * unit_bump(u), 0.0)),
            0.0,
            1.0,
            &tight(16),
        )?;
        let fam = Self {
            eps,
            alpha: weighted.value.ln(),
            norm,
            step_table: step,
            ramp_table: ramp,
        };
        Ok(fam)
    }

    fn bump(&self, u: f64) -> f64 {
        self.norm * unit_bump(u)
    }

    /// Hermite interpolation of an increasing table with derivative `deriv` at `u` in `(0, 1)`.
    fn hermite(&self, table: &[f64], deriv: impl Fn(usize) -> f64, u: f64) -> f64 {
        let h = 1.0 / TABLE_CELLS as f64;
        let k = ((u * TABLE_CELLS as f64) as usize).min(TABLE_CELLS - 1);
        let s = (u - k as f64 * h) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = h00 * table[k] + h10 * h * deriv(k) + h01 * table[k + 1] + h11 * h * deriv(k + 1);
        // the tables increase; bracketing by the nodes keeps the interpolant monotone
        v.clamp(table[k], table[k + 1])
    }

    /// `eta_eps(y)`, supported in `[0, eps]`.
    pub fn eta(&self, y: f64) -> f64 {
        self.bump(y / self.eps) / self.eps
    }

    /// `zeta_eps(x) = int_{-inf}^x eta_eps`.
    pub fn zeta(&self, x: f64) -> f64 {
        let u = x / self.eps;
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            let h = 1.0 / TABLE_CELLS as f64;
            self.hermite(&self.step_table, |k| self.bump(k as f64 * h), u)
        }
    }

    /// `Z_eps(x) = int_{-inf}^x zeta_eps`; equals `x - eps / 2` for `x >= eps`.
    pub fn ramp(&self, x: f64) -> f64 {
        let u = x / self.eps;
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            self.eps * self.ramp_table[TABLE_CELLS] + (x - self.eps)
        } else {
            self.eps * self.hermite(&self.ramp_table, |k| self.step_table[k], u)
        }
    }
}

/// `A_eps(s, r)` along `s_k = -2^-k` and its `s -> 0` limit `A_eps(r)`.
///
/// `A_eps(r)` is the quadrature over the whole heat-ball window, whose
/// log-time coordinate resolves `t -> 0`. The truncated values converge to
/// it like `sqrt(-s) log(-1/s)` when the flow passes through the center, too
/// slowly to extrapolate well; the series documents the convergence.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothedEcker {
    pub r: f64,
    pub eps: f64,
    /// Truncation times `s_k`, increasing toward 0.
    pub schedule: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Limit estimate of the truncated series.
    pub series_limit: LimitEstimate,
    /// `A_eps(r)`: quadrature over the whole window.
    pub direct: QuadResult,
}

impl SmoothedEcker {
    /// `A_eps(r)`.
    pub fn value(&self) -> f64 {
        self.direct.value
    }

    pub fn error_estimate(&self) -> f64 {
        self.direct.error_estimate
    }

    /// Gap between the last truncated value and `A_eps(r)`.
    pub fn truncation_gap(&self) -> f64 {
        self.direct.value - self.series_limit.last
    }
}

/// Number of truncation times in [`smoothed_ecker`].
pub const TRUNCATION_STEPS: usize = 24;

/// Integrand of `A_eps`.
fn smoothed_density(fam: &MollifierFamily, g: &crate::flows::SliceGeometry, t: f64, psi: f64) -> f64 {
    let xt = g.tangential(&g.x);
    xt.norm2() / (4.0 * t * t) * fam.zeta(psi) + g.h.norm2() * fam.ramp(psi)
}

/// `A_eps(s, r)` for one truncation time `s < 0`, heat ball at the origin.
pub fn smoothed_ecker_at(
    flow: &AncientFlow,
    r: f64,
    s: f64,
    fam: &MollifierFamily,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(s < 0.0) {
        return Err(Error::Domain(format!("truncation time must be negative, got {s}")));
    }
    let hb = HeatBall::at_origin(r, flow.n)?;
    integrate_heatball_between(
        flow,
        &hb,
        |q| smoothed_density(fam, q.geom, q.t, q.psi),
        f64::NEG_INFINITY,
        s,
        cfg,
    )
}

/// `A_eps(s, r)` along `s_k = -2^-k` (starting inside the heat-ball window),
/// accumulated from the time pieces between consecutive truncations.
pub fn smoothed_ecker(flow: &AncientFlow, r: f64, fam: &MollifierFamily, cfg: &QuadConfig) -> Result<SmoothedEcker> {
    let hb = HeatBall::at_origin(r, flow.n)?;
    let len = window_length(r);
    let k0 = (-len.log2()).floor() as i32 + 1;
    let schedule: Vec<f64> = (0..TRUNCATION_STEPS as i32).map(|k| -(2f64.powi(-(k0 + k)))).collect();
    let f = |q: &crate::quad::HeatBallSample<'_>| smoothed_density(fam, q.geom, q.t, q.psi);
    let mut values = Vec::with_capacity(schedule.len());
    let mut errors = Vec::with_capacity(schedule.len());
    let mut acc = QuadResult::exact(0.0);
    let mut lo = f64::NEG_INFINITY;
    for &s in &schedule {
        let piece = integrate_heatball_between(flow, &hb, f, lo, s, cfg)?;
        acc = QuadResult::combine([acc, piece]);
        values.push(acc.value);
        errors.push(acc.error_estimate);
        lo = s;
    }
    let last = integrate_heatball_between(flow, &hb, f, lo, 0.0, cfg)?;
    let direct = QuadResult::combine([acc, last]);
    let scales: Vec<f64> = schedule.iter().map(|s| -1.0 / s).collect();
    let series_limit = improper_limit(
        &scales,
        &values,
        *errors.last().unwrap_or(&0.0),
        Direction::NonDecreasing,
        1e-12,
    )?;
    Ok(SmoothedEcker {
        r,
        eps: fam.eps,
        schedule,
        values,
        errors,
        series_limit,
        direct,
    })
}

fn inner_options() -> GkOptions {
    GkOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        max_depth: 30,
        initial_panels: 1,
        ..GkOptions::default()
    }
}

/// `int_a^b f`, raising `failed` when the quadrature does not converge.
fn inner_integral(f: impl Fn(f64) -> f64 + Sync, a: f64, b: f64, failed: &AtomicBool) -> f64 {
    if !(a < b) {
        return 0.0;
    }
    match integrate(|u| Ok((f(u), 0.0)), a, b, &inner_options()) {
        Ok(q) => {
            if !q.converged {
                failed.store(true, Ordering::Relaxed);
            }
            q.value
        }
        Err(_) => {
            failed.store(true, Ordering::Relaxed);
            f64::NAN
        }
    }
}

fn check_inner(failed: &AtomicBool, what: &str) -> Result<()> {
    if failed.load(Ordering::Relaxed) {
        return Err(Error::Quadrature(crate::error::QuadDiagnostics {
            what: format!("inner radius integral in {what}"),
            value: f64::NAN,
            error_estimate: f64::NAN,
            target: inner_options().rel_tol,
            evaluations: 0,
        }));
    }
    Ok(())
}

/// `int_{ln sigma}^{ln rho} n e^{-n u} g(psi_1 + n u) du`, i.e.
/// `int_sigma^rho n / r^{n+1} g(psi_r) dr` in `u = ln r`, for a cutoff `g`
/// vanishing at `psi_r <= 0` and smooth off `psi_r = eps`.
fn radius_integral(
    g: impl Fn(f64) -> f64 + Sync,
    psi1: f64,
    n: usize,
    sigma: f64,
    rho: f64,
    eps: f64,
    failed: &AtomicBool,
) -> f64 {
    let nf = n as f64;
    let u0 = -psi1 / nf;
    let ue = (eps - psi1) / nf;
    let (a, b) = (sigma.ln().max(u0), rho.ln());
    let f = |u: f64| nf * (-nf * u).exp() * g(psi1 + nf * u);
    if ue > a && ue < b {
        inner_integral(f, a, ue, failed) + inner_integral(f, ue, b, failed)
    } else {
        inner_integral(f, a, b, failed)
    }
}

/// Both sides of `int_0^inf n / r^{n+1} zeta_eps(psi_r) dr = e^alpha Phi` at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PflemSample {
    pub x_norm2: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PflemResidual {
    pub eps: f64,
    pub n: usize,
    pub samples: Vec<PflemSample>,
    pub max_relative: f64,
}

/// Checks the radial kernel identity at `points` by quadrature in `r`.
pub fn pflem_identity_residual(fam: &MollifierFamily, points: &[KernelPoint], n: usize) -> Result<PflemResidual> {
    let nf = n as f64;
    let mut samples = Vec::with_capacity(points.len());
    for p in points {
        let x2 = p.x.norm2();
        let t = p.t;
        let psi_r = |r: f64| x2 / (4.0 * t) - 0.5 * nf * (-4.0 * std::f64::consts::PI * t / (r * r)).ln();
        let f = |r: f64| nf / r.powi(n as i32 + 1) * fam.zeta(psi_r(r));
        // psi_r vanishes at r0 and reaches eps at r1; zeta is 1 beyond r1
        let r0 = (-(x2 / (4.0 * t) - 0.5 * nf * (-4.0 * std::f64::consts::PI * t).ln()) / nf).exp();
        let r1 = r0 * (fam.eps / nf).exp();
        let near = integrate(|r| Ok((f(r), 0.0)), r0, r1, &tight(8))?.require("pflem near part")?;
        // r = r1 / v maps [r1, inf) to (0, 1]
        let far = integrate(
            |v| {
                if v <= 0.0 {
                    return Ok((0.0, 0.0));
                }
                Ok((f(r1 / v) * r1 / (v * v), 0.0))
            },
            0.0,
            1.0,
            &tight(4),
        )?
        .require("pflem far part")?;
        let lhs = near.value + far.value;
        let rhs = fam.alpha.exp() * log_phi_unchecked(x2, t, n).exp();
        samples.push(PflemSample {
            x_norm2: x2,
            t,
            lhs,
            rhs,
            relative: ((lhs - rhs) / rhs).abs(),
        });
    }
    let max_relative = samples.iter().map(|s| s.relative).fold(0.0, f64::max);
    Ok(PflemResidual {
        eps: fam.eps,
        n,
        samples,
        max_relative,
    })
}

/// `E(s; sigma, rho) = int_sigma^rho dr int_{M_s} n / r^{n+1} Z_eps(psi_r) dmu_s`.
pub fn error_term(
    flow: &AncientFlow,
    s: f64,
    sigma: f64,
    rho: f64,
    fam: &MollifierFamily,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(s < 0.0) {
        return Err(Error::Domain(format!("error term needs s < 0, got {s}")));
    }
    if !(sigma > 0.0 && sigma < rho) {
        return Err(Error::Domain(format!("need 0 < sigma < rho, got {sigma}, {rho}")));
    }
    if s <= -window_length(rho) || s >= flow.time_max {
        return Ok(QuadResult::exact(0.0));
    }
    let radius = slice_radius(rho, s, flow.n)?;
    let restriction = restrict_to_ball(flow, s, &crate::vector::AmbientVec::ZERO, radius)?;
    if restriction.is_empty() {
        return Ok(QuadResult::exact(0.0));
    }
    let n = flow.n;
    let failed = AtomicBool::new(false);
    let q = integrate_slice(
        flow,
        s,
        |g| {
            let psi1 = g.x.norm2() / (4.0 * s) - 0.5 * n as f64 * (-4.0 * std::f64::consts::PI * s).ln();
            radius_integral(|y| fam.ramp(y), psi1, n, sigma, rho, fam.eps, &failed)
        },
        Some(&restriction),
        cfg,
    )?;
    check_inner(&failed, "error term")?;
    Ok(q)
}

/// Both sides of
/// `A_eps(rho)/rho^n - A_eps(sigma)/sigma^n = int dt int_sigma^rho dr int n/r^{n+1} |D|^2 zeta_eps(psi_r)`.
#[derive(Debug, Clone, Serialize)]
pub struct SmoothedMonotonicity {
    pub sigma: f64,
    pub rho: f64,
    pub eps: f64,
    pub a_sigma: SmoothedEcker,
    pub a_rho: SmoothedEcker,
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    pub residual: f64,
    /// `residual / max(|rhs|, |lhs|)`, or 0 when both sides vanish.
    pub relative: f64,
}

pub fn smoothed_monotonicity_check(
    flow: &AncientFlow,
    sigma: f64,
    rho: f64,
    fam: &MollifierFamily,
    cfg: &QuadConfig,
) -> Result<SmoothedMonotonicity> {
    if !(sigma > 0.0 && sigma < rho) {
        return Err(Error::Domain(format!("need 0 < sigma < rho, got {sigma}, {rho}")));
    }
    let n = flow.n;
    let a_sigma = smoothed_ecker(flow, sigma, fam, cfg)?;
    let a_rho = smoothed_ecker(flow, rho, fam, cfg)?;
    let lhs = a_rho.value() / rho.powi(n as i32) - a_sigma.value() / sigma.powi(n as i32);
    let hb = HeatBall::at_origin(rho, n)?;
    let ln_rho_n = n as f64 * rho.ln();
    let failed = AtomicBool::new(false);
    let q = integrate_heatball(
        flow,
        &hb,
        |smp| {
            let d = deficit_norm2(smp.geom, smp.t);
            if d == 0.0 {
                return 0.0;
            }
            let psi1 = smp.psi - ln_rho_n;
            d * radius_integral(|y| fam.zeta(y), psi1, n, sigma, rho, fam.eps, &failed)
        },
        cfg,
    )?;
    check_inner(&failed, "smoothed monotonicity")?;
    let rhs = q.value;
    let residual = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    Ok(SmoothedMonotonicity {
        sigma,
        rho,
        eps: fam.eps,
        a_sigma,
        a_rho,
        lhs,
        rhs,
        rhs_error: q.error_estimate,
        residual,
        relative: if scale > 0.0 { residual / scale } else { 0.0 },
    })
}

/// Samples violating `chi(x - eps) <= zeta_eps(x) <= chi(x)` or
/// `[x - eps]_+ <= Z_eps(x) <= [x]_+`.
pub fn sandwich_violations(fam: &MollifierFamily, xs: &[f64]) -> usize {
    let chi = |x: f64| if x > 0.0 { 1.0 } else { 0.0 };
    xs.iter()
        .filter(|&&x| {
            let z = fam.zeta(x);
            let big = fam.ramp(x);
            !(chi(x - fam.eps) <= z && z <= chi(x) && positive_part(x - fam.eps) <= big && big <= positive_part(x))
        })
        .count()
}

/// `e^{-eps} A(E_{r e^{-eps/n}}) / r^n <= A_eps(r) / r^n <= A(E_r) / r^n`.
#[derive(Debug, Clone, Serialize)]
pub struct EckerSandwich {
    pub r: f64,
    pub eps: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    /// Quadrature error of the three terms combined.
    pub error: f64,
    pub holds: bool,
}

pub fn smoothed_ecker_sandwich(
    flow: &AncientFlow,
    r: f64,
    fam: &MollifierFamily,
    cfg: &QuadConfig,
) -> Result<EckerSandwich> {
    let n = flow.n;
    let rn = r.powi(n as i32);
    let inner_r = r * (-fam.eps / n as f64).exp();
    let small = ecker_integral(flow, &HeatBall::at_origin(inner_r, n)?, cfg)?;
    let big = ecker_integral(flow, &HeatBall::at_origin(r, n)?, cfg)?;
    let a = smoothed_ecker(flow, r, fam, cfg)?;
    let k = (-fam.eps).exp() / rn;
    let lower = k * small.value;
    let value = a.value() / rn;
    let upper = big.value / rn;
    let error = (k * small.error_estimate + a.error_estimate() / rn + big.error_estimate / rn).max(0.0);
    Ok(EckerSandwich {
        r,
        eps: fam.eps,
        lower,
        value,
        upper,
        error,
        holds: lower <= value + error && value <= upper + error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass() {
        let fam = MollifierFamily::new(0.1).unwrap();
        let m = integrate(|y| Ok((fam.eta(y), 0.0)), 0.0, 0.1, &tight(8)).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert_eq!(fam.zeta(0.1), 1.0);
        assert!((fam.zeta(0.05) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ramp_past_support() {
        let fam = MollifierFamily::new(0.2).unwrap();
        assert!((fam.ramp(1.0) - (1.0 - 0.1)).abs() < 1e-13);
        assert_eq!(fam.ramp(-0.3), 0.0);
    }

    #[test]
    fn interpolants_match_quadrature() {
        let fam = MollifierFamily::new(1.0).unwrap();
        for x in [0.13, 0.377, 0.5, 0.81] {
            let z = integrate(|y| Ok((fam.eta(y), 0.0)), 0.0, x, &tight(4)).unwrap().value;
            assert!((fam.zeta(x) - z).abs() < 1e-13, "{x}");
        }
        // zeta is a piecewise cubic; integrate it cell by cell
        for cells in [301, 1024, 1700] {
            let x = cells as f64 / TABLE_CELLS as f64;
            let zz = integrate(|y| Ok((fam.zeta(y), 0.0)), 0.0, x, &tight(cells)).unwrap().value;
            assert!((fam.ramp(x) - zz).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn alpha_is_negative() {
        for eps in [0.5, 0.1, 0.02] {
            let a = MollifierFamily::new(eps).unwrap().alpha;
            assert!(a < 0.0 && a > -eps);
        }
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(MollifierFamily::new(0.0).is_err());
        assert!(MollifierFamily::new(-1.0).is_err());
    }
}
