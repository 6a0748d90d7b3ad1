//! Huisken's Gaussian integral, Ecker's heat-ball integral, the shrinker
//! deficit integrals and the finite-`r` identity relating them.
//!
//! Every operation takes an explicit space-time center; positions and times
//! are measured relative to it. The deficit is
//! `D = H - x^perp / (2 t)` (equivalently `H - grad^perp psi`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::{AncientFlow, SliceGeometry};
use crate::kernel::{log_phi_unchecked, Center, HeatBall};
use crate::quad::{
    improper_limit, integrate, integrate_gaussian_slice, integrate_heatball, Direction, LimitEstimate,
    QuadConfig, QuadResult,
};
use crate::vector::AmbientVec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    /// `int_{M_t} Phi dmu_t`.
    Huisken,
    /// `A(M cap E_r)`.
    Ecker,
    /// `A(M cap E_r) / r^n`.
    EckerRatio,
    /// `int int |D|^2 Phi`, over a time interval or a heat ball.
    DeficitPhi,
    /// `int int_{E_r} |D|^2`.
    DeficitPlain,
    /// `int_{M_t} |D|^2 Phi dmu_t`, the Huisken dissipation rate.
    DeficitRate,
    Residual,
}

impl QuantityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuantityKind::Huisken => "huisken",
            QuantityKind::Ecker => "ecker",
            QuantityKind::EckerRatio => "ecker_ratio",
            QuantityKind::DeficitPhi => "deficit_phi",
            QuantityKind::DeficitPlain => "deficit_plain",
            QuantityKind::DeficitRate => "deficit_rate",
            QuantityKind::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantityReport {
    pub kind: QuantityKind,
    /// `t` for slice quantities, `r` for heat-ball quantities.
    pub parameter: f64,
    pub center: Center,
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl QuantityReport {
    fn from_quad(kind: QuantityKind, parameter: f64, center: Center, q: QuadResult) -> Self {
        Self {
            kind,
            parameter,
            center,
            value: q.value,
            error_estimate: q.error_estimate,
            converged: q.converged,
        }
    }

    pub const CSV_HEADER: &'static str = "kind,parameter,center_x,center_t,value,error";

    /// One CSV row; the first `ambient` center coordinates are joined with `;`.
    pub fn csv_row(&self, ambient: usize) -> String {
        let cx: Vec<String> = self.center.x.head(ambient).iter().map(|v| format!("{v:.16e}")).collect();
        format!(
            "{},{:.16e},{},{:.16e},{:.16e},{:.16e}",
            self.kind.as_str(),
            self.parameter,
            cx.join(";"),
            self.center.t,
            self.value,
            self.error_estimate
        )
    }
}

/// The flow seen from `center`.
pub(crate) fn centered(flow: &AncientFlow, center: &Center) -> AncientFlow {
    if *center == Center::ORIGIN {
        flow.clone()
    } else {
        flow.recentered(center.x, center.t)
    }
}

fn relative_time(t: f64, center: &Center) -> Result<f64> {
    let tau = t - center.t;
    if !(tau < 0.0) {
        return Err(Error::Domain(format!(
            "time {t} must precede the center time {}",
            center.t
        )));
    }
    Ok(tau)
}

/// `|H - x^perp / 2t|^2` at a point, position relative to the center.
#[inline]
pub fn deficit_norm2(g: &SliceGeometry, t: f64) -> f64 {
    let d = g.h - g.normal(&g.x) * (0.5 / t);
    d.norm2()
}

/// Ecker integrand `|x^T|^2 / 4t^2 + |H|^2 psi_r`.
#[inline]
pub fn ecker_density(g: &SliceGeometry, t: f64, psi: f64) -> f64 {
    let xt = g.tangential(&g.x);
    xt.norm2() / (4.0 * t * t) + g.h.norm2() * psi
}

/// `int_{M_t} Phi_{x0,t0} dmu_t`.
pub fn huisken_integral(flow: &AncientFlow, t: f64, center: &Center, cfg: &QuadConfig) -> Result<QuantityReport> {
    let tau = relative_time(t, center)?;
    let f = centered(flow, center);
    let n = flow.n;
    let q = integrate_gaussian_slice(&f, tau, |g| log_phi_unchecked(g.x.norm2(), tau, n).exp(), cfg)?;
    Ok(QuantityReport::from_quad(QuantityKind::Huisken, t, *center, q))
}

/// `int_{M_t} |H - x^perp/2(t-t0)|^2 Phi_{x0,t0} dmu_t`; Huisken's integral
/// decreases at exactly this rate.
pub fn deficit_rate(flow: &AncientFlow, t: f64, center: &Center, cfg: &QuadConfig) -> Result<QuantityReport> {
    let tau = relative_time(t, center)?;
    let f = centered(flow, center);
    let n = flow.n;
    let q = integrate_gaussian_slice(
        &f,
        tau,
        |g| deficit_norm2(g, tau) * log_phi_unchecked(g.x.norm2(), tau, n).exp(),
        cfg,
    )?;
    Ok(QuantityReport::from_quad(QuantityKind::DeficitRate, t, *center, q))
}

/// `A(M cap E_r) = int int_{E_r} |x^T|^2/4t^2 + |H|^2 psi_r`.
pub fn ecker_integral(flow: &AncientFlow, hb: &HeatBall, cfg: &QuadConfig) -> Result<QuantityReport> {
    check_dim(flow, hb)?;
    let q = integrate_heatball(flow, hb, |s| ecker_density(s.geom, s.t, s.psi), cfg)?;
    Ok(QuantityReport::from_quad(QuantityKind::Ecker, hb.r, hb.center, q))
}

/// `A(M cap E_r) / r^n`.
pub fn ecker_ratio(flow: &AncientFlow, hb: &HeatBall, cfg: &QuadConfig) -> Result<QuantityReport> {
    let rep = ecker_integral(flow, hb, cfg)?;
    let k = hb.r.powi(-(hb.n as i32));
    Ok(QuantityReport {
        kind: QuantityKind::EckerRatio,
        value: rep.value * k,
        error_estimate: rep.error_estimate * k,
        ..rep
    })
}

fn check_dim(flow: &AncientFlow, hb: &HeatBall) -> Result<()> {
    if hb.n != flow.n {
        return Err(Error::InvalidArgument(format!(
            "heat ball built for n = {}, flow {} has n = {}",
            hb.n, flow.name, flow.n
        )));
    }
    Ok(())
}

/// `int_a^b int_{M_t} |D|^2 Phi_{x0,t0} dmu_t dt` for `a < b <= t0`.
///
/// The time integral runs in `w = log(t0 - t)`.
pub fn deficit_phi(
    flow: &AncientFlow,
    interval: (f64, f64),
    center: &Center,
    cfg: &QuadConfig,
) -> Result<QuantityReport> {
    let (a, b) = interval;
    if !(a < b) || b > center.t {
        return Err(Error::Domain(format!(
            "need a < b <= t0, got [{a}, {b}] with t0 = {}",
            center.t
        )));
    }
    let f = centered(flow, center);
    let n = flow.n;
    let w_hi = (center.t - a).ln();
    let w_lo = if b == center.t {
        w_hi - cfg.log_time_span
    } else {
        (center.t - b).ln()
    };
    let inner = cfg.inner();
    let q = integrate(
        |w| {
            let tau = -w.exp();
            let r = integrate_gaussian_slice(
                &f,
                tau,
                |g| deficit_norm2(g, tau) * log_phi_unchecked(g.x.norm2(), tau, n).exp(),
                &inner,
            )?;
            Ok((r.value * -tau, r.error_estimate * -tau))
        },
        w_lo,
        w_hi,
        &cfg.outer_options(cfg.slice_panels * 2),
    )?;
    Ok(QuantityReport::from_quad(QuantityKind::DeficitPhi, b, *center, q))
}

/// `int int_{E_r} |D|^2`, weighted by `Phi` when `weighted`.
pub fn deficit_heatball(
    flow: &AncientFlow,
    hb: &HeatBall,
    weighted: bool,
    cfg: &QuadConfig,
) -> Result<QuantityReport> {
    check_dim(flow, hb)?;
    let rn = hb.r.powi(hb.n as i32);
    let q = integrate_heatball(
        flow,
        hb,
        |s| {
            let d = deficit_norm2(s.geom, s.t);
            if weighted {
                // psi_r = log(Phi r^n)
                d * s.psi.exp() / rn
            } else {
                d
            }
        },
        cfg,
    )?;
    let kind = if weighted {
        QuantityKind::DeficitPhi
    } else {
        QuantityKind::DeficitPlain
    };
    Ok(QuantityReport::from_quad(kind, hb.r, hb.center, q))
}

/// Gaussian density `Theta(M, x0, t0) = lim_{t -> t0} int Phi_{x0,t0} dmu_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub center: Center,
    /// `t0 - t` of the samples.
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    pub limit: LimitEstimate,
}

impl DensityEstimate {
    pub fn value(&self) -> f64 {
        self.limit.extrapolated
    }
}

/// Default approach schedule `t0 - t = 10^-k`, `k = 2..8`.
pub fn default_density_offsets() -> Vec<f64> {
    (2..=8).map(|k| 10f64.powi(-k)).collect()
}

/// Extrapolates Huisken's integral as `t -> t0` along `t = t0 - offsets[k]`
/// (`offsets` decreasing).
pub fn gaussian_density_with(
    flow: &AncientFlow,
    center: &Center,
    offsets: &[f64],
    cfg: &QuadConfig,
) -> Result<DensityEstimate> {
    if offsets.windows(2).any(|w| !(w[1] < w[0])) || offsets.iter().any(|o| !(*o > 0.0)) {
        return Err(Error::InvalidArgument("density offsets must be positive and decreasing".into()));
    }
    let mut values = Vec::with_capacity(offsets.len());
    let mut last_err = 0.0;
    for &o in offsets {
        let rep = huisken_integral(flow, center.t - o, center, cfg)?;
        values.push(rep.value);
        last_err = rep.error_estimate;
    }
    let scales: Vec<f64> = offsets.iter().map(|o| 1.0 / o).collect();
    let limit = improper_limit(&scales, &values, last_err, Direction::NonIncreasing, 1e-6)?;
    Ok(DensityEstimate {
        center: *center,
        offsets: offsets.to_vec(),
        values,
        limit,
    })
}

pub fn gaussian_density(flow: &AncientFlow, center: &Center, cfg: &QuadConfig) -> Result<DensityEstimate> {
    gaussian_density_with(flow, center, &default_density_offsets(), cfg)
}

/// Both sides of `A/r^n - Theta(M,0,0) = int int_{E_r} |D|^2 Phi - r^{-n} int int_{E_r} |D|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub r: f64,
    pub ecker_ratio: QuantityReport,
    pub density: f64,
    pub density_error: f64,
    pub weighted_deficit: QuantityReport,
    pub plain_deficit: QuantityReport,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Sum of the error estimates of the four terms.
    pub error_bar: f64,
}

/// Residual of the heat-ball identity at the space-time origin.
pub fn residual_er35(flow: &AncientFlow, r: f64, cfg: &QuadConfig) -> Result<IdentityResidual> {
    let density = gaussian_density(flow, &Center::ORIGIN, cfg)?;
    residual_er35_with_density(flow, r, density.value(), density.limit.error_bar, cfg)
}

/// As [`residual_er35`] with a precomputed `Theta(M, 0, 0)`.
pub fn residual_er35_with_density(
    flow: &AncientFlow,
    r: f64,
    density: f64,
    density_error: f64,
    cfg: &QuadConfig,
) -> Result<IdentityResidual> {
    let hb = HeatBall::at_origin(r, flow.n)?;
    let ecker = ecker_ratio(flow, &hb, cfg)?;
    let weighted = deficit_heatball(flow, &hb, true, cfg)?;
    let plain = deficit_heatball(flow, &hb, false, cfg)?;
    let rn = r.powi(flow.n as i32);
    let lhs = ecker.value - density;
    let rhs = weighted.value - plain.value / rn;
    Ok(IdentityResidual {
        r,
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        error_bar: ecker.error_estimate + density_error + weighted.error_estimate + plain.error_estimate / rn,
        ecker_ratio: ecker,
        density,
        density_error,
        weighted_deficit: weighted,
        plain_deficit: plain,
    })
}

/// `F_{x0, t0}(M_t) = (4 pi t0)^{-n/2} int_{M_t} exp(-|x - x0|^2 / 4 t0) dmu_t`, `t0 > 0`.
pub fn f_functional(flow: &AncientFlow, t: f64, x0: &AmbientVec, t0: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("F-functional needs t0 > 0, got {t0}")));
    }
    flow.check_time(t)?;
    Ok(huisken_integral(flow, t, &Center::new(*x0, t + t0), cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::by_name;

    #[test]
    fn huisken_integral_of_static_line_is_one() {
        let flow = by_name("plane").unwrap();
        for t in [-0.01, -1.0, -100.0] {
            let rep = huisken_integral(&flow, t, &Center::ORIGIN, &QuadConfig::default()).unwrap();
            assert!((rep.value - 1.0).abs() < 1e-10);
            assert_eq!(rep.kind, QuantityKind::Huisken);
        }
    }

    #[test]
    fn times_must_precede_the_center() {
        let flow = by_name("plane").unwrap();
        let c = Center::new(AmbientVec::ZERO, -1.0);
        assert!(huisken_integral(&flow, -1.0, &c, &QuadConfig::default()).is_err());
        assert!(huisken_integral(&flow, 0.5, &c, &QuadConfig::default()).is_err());
    }

    #[test]
    fn csv_row_lists_ambient_coordinates() {
        let rep = QuantityReport {
            kind: QuantityKind::EckerRatio,
            parameter: 2.0,
            center: Center::new(AmbientVec::from_slice(&[0.5, -1.0]), 0.25),
            value: 1.5,
            error_estimate: 1e-9,
            converged: true,
        };
        let row = rep.csv_row(2);
        assert_eq!(row.split(',').count(), QuantityReport::CSV_HEADER.split(',').count());
        assert!(row.starts_with("ecker_ratio,2.0000000000000000e0,5.0000000000000000e-1;-1.0000000000000000e0,"));
    }

    #[test]
    fn shrinker_deficit_rate_vanishes() {
        let flow = by_name("circle").unwrap();
        let rate = deficit_rate(&flow, -0.7, &Center::ORIGIN, &QuadConfig::default()).unwrap();
        assert!(rate.value.abs() < 1e-12);
    }
}
