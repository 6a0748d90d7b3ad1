use mcf_core::flows::{catalog, evaluate_geometry, hausdorff_mass, restrict_to_ball, AncientFlow, SliceGeometry};
use mcf_core::{AmbientVec, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TIMES: [f64; 3] = [-0.3, -1.0, -4.0];

/// Chart points of every patch at time `t`, away from the chart boundary.
fn samples(flow: &AncientFlow, t: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, [f64; 2])> {
    let mut out = Vec::new();
    for (idx, p) in flow.patches().iter().enumerate() {
        let ranges = p.ranges(t);
        let pick = |(lo, hi): (f64, f64), rng: &mut ChaCha8Rng| {
            let (a, b) = (lo.max(-3.0), hi.min(lo.max(-3.0) + 6.0));
            if a == b {
                a
            } else {
                a + (b - a) * rng.gen_range(0.1..0.9)
            }
        };
        for _ in 0..count {
            let u0 = pick(ranges[0], rng);
            let u1 = if flow.n == 2 { pick(ranges[1], rng) } else { 0.0 };
            out.push((idx, [u0, u1]));
        }
    }
    out
}

fn geometry(flow: &AncientFlow, patch: usize, u: [f64; 2], t: f64) -> SliceGeometry {
    evaluate_geometry(flow, patch, u, t).unwrap()
}

#[test]
fn mean_curvature_is_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for flow in catalog() {
        for t in TIMES {
            for (patch, u) in samples(&flow, t, 12, &mut rng) {
                let g = geometry(&flow, patch, u, t);
                let tangential = g.tangential(&g.h).norm();
                assert!(
                    tangential <= 1e-8 * g.h.norm().max(1.0),
                    "{} patch {patch} at {u:?}, t = {t}: |H^T| = {tangential:e}",
                    flow.name
                );
            }
        }
    }
}

#[test]
fn projectors_are_complementary() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = AmbientVec::from_slice(&[0.3, -1.2, 0.7]);
    for flow in catalog() {
        let v = AmbientVec::from_slice(v.head(flow.ambient));
        for (patch, u) in samples(&flow, -1.0, 8, &mut rng) {
            let g = geometry(&flow, patch, u, -1.0);
            let sum = g.tangential(&v) + g.normal(&v);
            assert!((sum - v).norm() < 1e-10, "{}", flow.name);
            assert!((g.tangential(&g.tangential(&v)) - g.tangential(&v)).norm() < 1e-10);
            assert!(g.area_density > 0.0);
        }
    }
}

/// The normal velocity of the chart equals `H`.
#[test]
fn chart_velocity_normal_part_is_mean_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = 1e-4;
    for flow in catalog() {
        for t in TIMES {
            for (patch, u) in samples(&flow, t, 6, &mut rng) {
                let g = geometry(&flow, patch, u, t);
                let (Ok(a), Ok(b)) = (
                    evaluate_geometry(&flow, patch, u, t + h),
                    evaluate_geometry(&flow, patch, u, t - h),
                ) else {
                    continue;
                };
                let vel = (a.x - b.x) * (0.5 / h);
                let err = (g.normal(&vel) - g.h).norm();
                assert!(
                    err <= 1e-6 * g.h.norm().max(1.0),
                    "{} patch {patch} at {u:?}, t = {t}: {err:e}",
                    flow.name
                );
            }
        }
    }
}

#[test]
fn translators_move_rigidly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for flow in catalog() {
        let Some(v) = flow.flags.translator else { continue };
        for (patch, u) in samples(&flow, -1.0, 10, &mut rng) {
            let base = geometry(&flow, patch, u, -1.0).x - v * -1.0;
            for t in [-7.0, -0.01] {
                let moved = geometry(&flow, patch, u, t).x - v * t;
                assert!((moved - base).norm() < 1e-12 * (1.0 + base.norm()), "{}", flow.name);
            }
        }
    }
}

#[test]
fn shrinkers_satisfy_shrinker_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for flow in catalog().into_iter().filter(|f| f.flags.is_self_shrinker) {
        for t in TIMES {
            for (patch, u) in samples(&flow, t, 10, &mut rng) {
                let g = geometry(&flow, patch, u, t);
                let d = g.h - g.normal(&g.x) * (0.5 / t);
                assert!(d.norm() <= 1e-8, "{}: {:e}", flow.name, d.norm());
            }
        }
    }
}

#[test]
fn grim_reaper_apex_curvature_is_one() {
    let flow = mcf_core::by_name("grim_reaper").unwrap();
    let g = geometry(&flow, 0, [0.0, 0.0], -2.0);
    assert!((g.h.norm() - 1.0).abs() < 1e-14);
    // H = v^perp for the translation velocity v
    let v = flow.flags.translator.unwrap();
    for s in [-2.0, 0.3, 1.7] {
        let g = geometry(&flow, 0, [s, 0.0], -2.0);
        assert!((g.normal(&v) - g.h).norm() < 1e-8);
    }
}

#[test]
fn angenent_oval_solves_its_implicit_equation() {
    let flow = mcf_core::by_name("angenent_oval").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for t in [-0.01, -1.0, -30.0] {
        for (patch, u) in samples(&flow, t, 40, &mut rng) {
            let x = geometry(&flow, patch, u, t).x;
            let res = x[0].cos() - t.exp() * x[1].cosh();
            assert!(res.abs() < 1e-10, "t = {t}, x = {:?}: {res:e}", x.head(2));
        }
    }
}

/// Restriction endpoints checked against a bisection on `|x(u)|^2 - R^2`.
#[test]
fn grim_reaper_restriction_endpoints() {
    let flow = mcf_core::by_name("grim_reaper").unwrap();
    let t = -10.0;
    // the apex sits at distance 10 from the origin
    assert!(restrict_to_ball(&flow, t, &AmbientVec::ZERO, 1.0).unwrap().is_empty());
    for radius in [10.5, 12.0, 30.0] {
        let r = restrict_to_ball(&flow, t, &AmbientVec::ZERO, radius).unwrap();
        assert_eq!(r.sub_domains.len(), 1);
        let sd = r.sub_domains[0];
        let gap = |s: f64| geometry(&flow, 0, [s, 0.0], t).x.norm2() - radius * radius;
        for (end, outward) in [(sd.lo, -1.0), (sd.hi, 1.0)] {
            let (mut a, mut b) = (0.0, outward * 100.0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if gap(m) < 0.0 {
                    a = m
                } else {
                    b = m
                }
            }
            assert!((end - a).abs() < 1e-10, "R = {radius}: {end} vs {a}");
            let x = geometry(&flow, 0, [end, 0.0], t).x;
            assert!((x.norm() - radius).abs() < 1e-9);
        }
    }
}

#[test]
fn masses_are_finite_and_match_closed_forms() {
    let cfg = QuadConfig::default();
    let plane2 = mcf_core::by_name("plane2").unwrap();
    let m = hausdorff_mass(&plane2, -1.0, &AmbientVec::ZERO, 1.0, &cfg).unwrap();
    assert!((m.value - std::f64::consts::PI).abs() < 1e-6);
    let circle = mcf_core::by_name("circle").unwrap();
    let t: f64 = -0.7;
    let m = hausdorff_mass(&circle, t, &AmbientVec::ZERO, 10.0, &cfg).unwrap();
    assert!((m.value - 2.0 * std::f64::consts::PI * (-2.0 * t).sqrt()).abs() < 1e-8);
    for flow in catalog() {
        for t in TIMES {
            let radius = 2.0 * (-2.0 * flow.n as f64 * t).sqrt();
            let m = hausdorff_mass(&flow, t, &AmbientVec::ZERO, radius, &cfg).unwrap();
            assert!(m.value.is_finite() && m.value >= 0.0, "{}", flow.name);
        }
    }
}
