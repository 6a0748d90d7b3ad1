//! Rotationally symmetric translating soliton ("bowl") in R^3.
//!
//! The profile is integrated in arclength form: with `theta` the angle of the
//! profile tangent above the horizontal,
//! `rho' = cos theta`, `z' = sin theta`, `theta' = cos theta - (n-1) sin theta / rho`,
//! which is the graph equation `u''/(1+u'^2) + (n-1) u'/rho = 1` written without
//! the `u' -> inf` blow-up. The solution is cached at the accepted steps of an
//! embedded Dormand-Prince 5(4) integrator and evaluated anywhere by a single
//! step from the preceding node. Beyond `rho = OUTER_RHO` the equation is
//! stiff for explicit steps, and the surface continues as the graph of the
//! asymptotic expansion of the profile.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::flows::revolution::{Profile, ProfileJet, RevolutionPatch};
use crate::flows::{AncientFlow, Axis, EntropySpace, FlowFlags};
use crate::vector::AmbientVec;

type State = [f64; 3];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Cached bowl profile `s -> (theta, rho, z)` in arclength `s >= 0`, up to
/// the arclength where `rho` reaches `rho_end`.
#[derive(Debug)]
pub struct BowlProfile {
    n: usize,
    s_end: f64,
    nodes: Vec<(f64, State)>,
}

impl BowlProfile {
    const RTOL: f64 = 1e-12;
    const ATOL: f64 = 1e-14;

    /// Integrates the profile of the `n`-dimensional bowl until `rho = rho_end`.
    pub fn new(n: usize, rho_end: f64) -> Self {
        assert!(n >= 1 && rho_end > 0.0);
        let mut nodes = vec![(0.0, [0.0; 3])];
        let mut s = 0.0;
        let mut y = [0.0; 3];
        let mut h: f64 = 1e-3;
        while y[1] < rho_end {
            let (y5, err) = dp_step(n, &y, h);
            let scale = |i: usize| Self::ATOL + Self::RTOL * y[i].abs().max(y5[i].abs());
            let ratio = ((0..3).map(|i| (err[i] / scale(i)).powi(2)).sum::<f64>() / 3.0).sqrt();
            if ratio <= 1.0 {
                s += h;
                y = y5;
                nodes.push((s, y));
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        }
        let mut prof = Self { n, s_end: s, nodes };
        prof.s_end = prof.invert(rho_end, 1);
        prof
    }

    /// Process-wide cached inner profile of the two-dimensional bowl.
    pub fn shared2() -> Arc<BowlProfile> {
        static CACHE: OnceLock<Arc<BowlProfile>> = OnceLock::new();
        CACHE
            .get_or_init(|| Arc::new(BowlProfile::new(2, OUTER_RHO)))
            .clone()
    }

    /// Arclength at the end of the profile.
    pub fn s_end(&self) -> f64 {
        self.s_end
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `(theta, rho, z)` and `theta'` at arclength `s`.
    pub fn state(&self, s: f64) -> Result<(State, f64)> {
        if !(0.0..=self.s_end).contains(&s) {
            return Err(Error::OutsideChart {
                flow: "bowl".into(),
                param: vec![s],
                t: f64::NAN,
            });
        }
        let k = self.nodes.partition_point(|(sk, _)| *sk <= s).max(1) - 1;
        let (sk, yk) = self.nodes[k];
        let y = if s == sk { yk } else { dp_step(self.n, &yk, s - sk).0 };
        Ok((y, rhs(self.n, &y)[0]))
    }

    /// Height `z(s)`; increasing in `s`.
    fn height(&self, s: f64) -> f64 {
        self.state(s).map(|(y, _)| y[2]).unwrap_or(f64::INFINITY)
    }

    fn radius(&self, s: f64) -> f64 {
        self.state(s).map(|(y, _)| y[1]).unwrap_or(f64::INFINITY)
    }

    /// Smallest `s` with `component(s) >= target` (both components are
    /// increasing), clamped to the profile.
    fn invert(&self, target: f64, idx: usize) -> f64 {
        let k = self.nodes.partition_point(|(_, y)| y[idx] < target);
        if k == 0 {
            return 0.0;
        }
        if k == self.nodes.len() {
            return self.s_end;
        }
        let f = |s: f64| if idx == 2 { self.height(s) } else { self.radius(s) };
        let (mut lo, mut hi) = (self.nodes[k - 1].0, self.nodes[k].0.min(self.s_end));
        if hi <= lo {
            return self.s_end;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Radius where the two-dimensional bowl switches from the integrated
/// profile to its asymptotic graph.
pub const OUTER_RHO: f64 = 100.0;

/// Outer part of the two-dimensional bowl as a graph over `rho >= OUTER_RHO`.
///
/// The slope `p = u'` has the asymptotic expansion
/// `p = rho - 1/rho - 2/rho^3 - 11/rho^5 - 90/rho^7 - 943/rho^9 - ...`;
/// the terms kept leave a relative error below `1e-20` at `OUTER_RHO`. The
/// additive constant of the height is matched to the integrated profile.
#[derive(Debug, Clone, Copy)]
struct BowlOuter {
    rho0: f64,
    offset: f64,
}

impl BowlOuter {
    fn new(inner: &BowlProfile) -> Self {
        let rho0 = OUTER_RHO;
        let (y, _) = inner.state(inner.s_end()).expect("profile end");
        let mut outer = Self { rho0, offset: 0.0 };
        outer.offset = y[2] - outer.height(y[1]);
        outer
    }

    fn height(&self, rho: f64) -> f64 {
        let w = 1.0 / (rho * rho);
        0.5 * rho * rho - rho.ln() + w * (1.0 + w * (11.0 / 4.0 + w * (15.0 + w * (943.0 / 8.0)))) + self.offset
    }

    fn slope(&self, rho: f64) -> (f64, f64) {
        let w = 1.0 / (rho * rho);
        let p = rho - (1.0 + w * (2.0 + w * (11.0 + w * (90.0 + w * 943.0)))) / rho;
        let dp = 1.0 + w * (1.0 + w * (6.0 + w * (55.0 + w * (630.0 + w * 8487.0))));
        (p, dp)
    }

    /// Smallest `rho >= rho0` with `height(rho) >= z`.
    fn invert_height(&self, z: f64) -> f64 {
        if self.height(self.rho0) >= z {
            return self.rho0;
        }
        let mut hi = 2.0 * self.rho0;
        while self.height(hi) < z {
            hi *= 2.0;
        }
        let mut lo = hi * 0.5;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.height(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Inner profile adaptor for [`RevolutionPatch`]; heights are shifted by `t`.
#[derive(Debug)]
struct BowlSurface(Arc<BowlProfile>);

impl Profile for BowlSurface {
    fn range(&self, _t: f64) -> (f64, f64) {
        (0.0, self.0.s_end)
    }

    fn eval(&self, s: f64, t: f64) -> Result<ProfileJet> {
        let (y, turn) = self.0.state(s)?;
        let (sin, cos) = y[0].sin_cos();
        Ok(ProfileJet {
            rho: y[1],
            z: y[2] + t,
            drho: cos,
            dz: sin,
            ddrho: -sin * turn,
            ddz: cos * turn,
        })
    }

    fn window(&self, t: f64, axial: f64, radial: f64, radius: f64) -> Option<(f64, f64)> {
        let z_hi = axial + radius - t;
        if z_hi <= 0.0 {
            return None;
        }
        let z_lo = axial - radius - t;
        let mut lo = self.0.invert(z_lo, 2);
        let mut hi = self.0.invert(z_hi, 2);
        lo = lo.max(self.0.invert(radial - radius, 1));
        hi = hi.min(self.0.invert(radial + radius, 1));
        if lo >= hi {
            return None;
        }
        Some((lo, hi))
    }
}

impl Profile for BowlOuter {
    fn range(&self, _t: f64) -> (f64, f64) {
        (self.rho0, f64::INFINITY)
    }

    fn eval(&self, rho: f64, t: f64) -> Result<ProfileJet> {
        if !(rho >= self.rho0 && rho.is_finite()) {
            return Err(Error::OutsideChart {
                flow: "bowl".into(),
                param: vec![rho],
                t,
            });
        }
        let (p, dp) = self.slope(rho);
        Ok(ProfileJet {
            rho,
            z: self.height(rho) + t,
            drho: 1.0,
            dz: p,
            ddrho: 0.0,
            ddz: dp,
        })
    }

    fn window(&self, t: f64, axial: f64, radial: f64, radius: f64) -> Option<(f64, f64)> {
        let lo = self
            .rho0
            .max(radial - radius)
            .max(self.invert_height(axial - radius - t));
        let z_hi = axial + radius - t;
        if z_hi <= self.height(self.rho0) {
            return None;
        }
        let hi = (radial + radius).min(self.invert_height(z_hi));
        if lo >= hi {
            return None;
        }
        Some((lo, hi))
    }
}

fn rhs(n: usize, y: &State) -> State {
    let (sin, cos) = y[0].sin_cos();
    let turn = if y[1] > 0.0 {
        cos - (n as f64 - 1.0) * sin / y[1]
    } else {
        1.0 / n as f64
    };
    [turn, cos, sin]
}

/// One Dormand-Prince step; returns the fifth-order solution and the
/// embedded error estimate.
fn dp_step(n: usize, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 3]; 7];
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for c in 0..3 {
                yi[c] += h * A[i][j] * kj[c];
            }
        }
        k[i] = rhs(n, &yi);
    }
    let mut y5 = *y;
    let mut err = [0.0; 3];
    for i in 0..7 {
        for c in 0..3 {
            y5[c] += h * B5[i] * k[i][c];
            err[c] += h * (B5[i] - B4[i]) * k[i][c];
        }
    }
    (y5, err)
}

/// The two-dimensional bowl soliton translating upward with unit speed.
pub fn bowl() -> AncientFlow {
    AncientFlow::new(
        "bowl",
        2,
        3,
        f64::INFINITY,
        FlowFlags {
            is_self_shrinker: false,
            translator: Some(AmbientVec::unit(2)),
            reaches_origin_at_zero: false,
        },
        EntropySpace::Line(Axis {
            point: AmbientVec::ZERO,
            dir: AmbientVec::unit(2),
        }),
        {
            let inner = BowlProfile::shared2();
            let outer = BowlOuter::new(&inner);
            vec![
                Arc::new(RevolutionPatch(BowlSurface(inner))),
                Arc::new(RevolutionPatch(outer)),
            ]
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Graph form `u(rho)`, integrated independently with a fixed-step RK4
    /// in `rho` from a series start.
    fn graph_height(rho_end: f64) -> f64 {
        let f = |rho: f64, p: f64| (1.0 + p * p) * (1.0 - p / rho);
        let (mut rho, mut u, mut p) = (1e-4, 0.25e-8, 0.5e-4);
        let steps = 200_000;
        let h = (rho_end - rho) / steps as f64;
        for _ in 0..steps {
            let k1u = p;
            let k1p = f(rho, p);
            let k2u = p + 0.5 * h * k1p;
            let k2p = f(rho + 0.5 * h, p + 0.5 * h * k1p);
            let k3u = p + 0.5 * h * k2p;
            let k3p = f(rho + 0.5 * h, p + 0.5 * h * k2p);
            let k4u = p + h * k3p;
            let k4p = f(rho + h, p + h * k3p);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            rho += h;
        }
        u
    }

    #[test]
    fn profile_matches_graph_equation() {
        let prof = BowlProfile::new(2, 50.0);
        let s = prof.invert(3.0, 1);
        let (y, _) = prof.state(s).unwrap();
        assert!((y[1] - 3.0).abs() < 1e-9);
        let u = graph_height(3.0);
        assert!((y[2] - u).abs() < 1e-8, "{} vs {}", y[2], u);
    }

    #[test]
    fn near_tip_curvature() {
        let prof = BowlProfile::new(2, 1.0);
        let (_, turn) = prof.state(0.0).unwrap();
        assert_eq!(turn, 0.5);
        let (y, _) = prof.state(1e-3).unwrap();
        assert!((y[0] - 0.5e-3).abs() < 1e-9);
    }

    #[test]
    fn outer_graph_joins_inner_profile() {
        let inner = BowlProfile::new(2, OUTER_RHO);
        let outer = BowlOuter::new(&inner);
        let (y, turn) = inner.state(inner.s_end()).unwrap();
        assert!((y[1] - OUTER_RHO).abs() < 1e-9);
        let (p, dp) = outer.slope(y[1]);
        assert!((p - y[0].tan()).abs() < 1e-8 * p, "{} vs {}", p, y[0].tan());
        // curvature of the graph equals theta' of the arclength profile
        let kappa = dp / (1.0 + p * p).powf(1.5);
        // theta sits near pi/2, so turn carries an absolute error near rtol
        assert!((kappa - turn).abs() < 1e-11, "{kappa} vs {turn}");
    }

    #[test]
    fn outer_slope_solves_graph_equation() {
        let outer = BowlOuter { rho0: OUTER_RHO, offset: 0.0 };
        for rho in [100.0, 300.0, 1e4] {
            let (p, dp) = outer.slope(rho);
            let res = dp / (1.0 + p * p) + p / rho - 1.0;
            assert!(res.abs() < 1e-15, "{rho}: {res}");
            let h = 1e-3 * rho;
            let fd = (outer.height(rho + h) - outer.height(rho - h)) / (2.0 * h);
            assert!((fd - p).abs() < 1e-6 * p);
        }
    }

    #[test]
    fn interpolation_is_consistent_with_nodes() {
        let prof = BowlProfile::new(2, 100.0);
        let (s0, y0) = prof.nodes[10];
        let (y, _) = prof.state(s0).unwrap();
        assert_eq!(y, y0);
        let mid = 0.5 * (prof.nodes[10].0 + prof.nodes[11].0);
        let (ym, _) = prof.state(mid).unwrap();
        assert!(ym[2] > y0[2] && ym[2] < prof.nodes[11].1[2]);
    }
}
