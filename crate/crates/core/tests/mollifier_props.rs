use mcf_core::mollifier::{pflem_identity_residual, sandwich_violations, MollifierFamily};
use mcf_core::{AmbientVec, KernelPoint};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cutoffs_respect_their_sandwiches(eps in 0.01f64..2.0, xs in prop::collection::vec(-1.0f64..3.0, 1..40)) {
        let fam = MollifierFamily::new(eps).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * eps).collect();
        prop_assert_eq!(sandwich_violations(&fam, &scaled), 0);
    }

    #[test]
    fn zeta_is_monotone(eps in 0.01f64..2.0, a in -0.5f64..1.5, d in 0.0f64..0.5) {
        let fam = MollifierFamily::new(eps).unwrap();
        prop_assert!(fam.zeta(a * eps) <= fam.zeta((a + d) * eps));
        prop_assert!(fam.ramp(a * eps) <= fam.ramp((a + d) * eps));
    }

    #[test]
    fn eta_is_supported_in_window(eps in 0.01f64..2.0, y in -3.0f64..3.0) {
        let fam = MollifierFamily::new(eps).unwrap();
        let v = fam.eta(y * eps);
        prop_assert!(v >= 0.0);
        if !(y > 0.0 && y < 1.0) {
            prop_assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn sandwich_holds_on_dense_grid() {
    for eps in [0.5, 0.1, 0.02] {
        let fam = MollifierFamily::new(eps).unwrap();
        let xs: Vec<f64> = (0..10_000).map(|k| (-0.5 + 2.0 * k as f64 / 9_999.0) * eps).collect();
        assert_eq!(sandwich_violations(&fam, &xs), 0, "eps = {eps}");
    }
}

#[test]
fn ramp_past_support_is_shifted_identity() {
    for eps in [0.5, 0.1, 0.02] {
        let fam = MollifierFamily::new(eps).unwrap();
        for x in [eps, 2.0 * eps, 1.0, 7.5] {
            let c = x - fam.ramp(x);
            assert!((0.0..=eps).contains(&c));
            // the bump is symmetric about eps / 2
            assert!((c - eps / 2.0).abs() < 1e-12, "eps = {eps}, x = {x}");
        }
    }
}

#[test]
fn alpha_increases_to_zero() {
    let alphas: Vec<f64> = [0.5, 0.1, 0.02]
        .iter()
        .map(|&e| MollifierFamily::new(e).unwrap().alpha)
        .collect();
    assert!(alphas.iter().all(|a| *a <= 0.0));
    assert!(alphas.windows(2).all(|w| w[1] > w[0]));
    // alpha ~ -eps / 2 for small eps
    assert!((alphas[2] + 0.01).abs() < 1e-4);
}

#[test]
fn radial_kernel_identity_on_grid() {
    let mut points = Vec::new();
    for x in [0.0, 0.3, 1.0] {
        for t in [-1.0 / (4.0 * PI), -0.5, -2.0] {
            points.push(KernelPoint::new(AmbientVec::from_slice(&[x, 0.0]), t).unwrap());
        }
    }
    for eps in [0.5, 0.1] {
        let fam = MollifierFamily::new(eps).unwrap();
        for n in [1, 2] {
            let res = pflem_identity_residual(&fam, &points, n).unwrap();
            assert!(res.max_relative < 1e-6, "eps = {eps}, n = {n}: {}", res.max_relative);
        }
    }
}
