use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use gevrey_core::associated::t_eval_ln;
use gevrey_core::cone::{dual_cone, ConeSpec};
use gevrey_core::sequences::{check_conditions, log_m_big};
use gevrey_core::testfun::{BumpFunction, TestFunction};
use gevrey_core::wavefront::{decay_threshold, spectrum_localized, SampledDistribution, ThresholdVariant};
use gevrey_core::{Error, GevreyParams};

fn params() -> impl Strategy<Value = GevreyParams> {
    (0.2f64..3.0, 1.05f64..3.0, 0.1f64..5.0).prop_map(|(t, s, h)| GevreyParams::new(t, s, h).unwrap())
}

fn brute(p: &GevreyParams, ln_k: f64, p_max: u64) -> f64 {
    (1..=p_max)
        .map(|q| {
            let (qf, qs) = (q as f64, (q as f64).powf(p.sigma()));
            qs * p.h().ln() + qf * ln_k - p.tau() * qs * qf.ln()
        })
        .fold(0.0, f64::max)
}

/// `T` at `ln k`, or `None` when the maximizer lies beyond the scan cap.
fn t_at(p: &GevreyParams, ln_k: f64) -> Option<f64> {
    match t_eval_ln(p, ln_k) {
        Ok(e) => Some(e.value),
        Err(Error::ScanCap { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        rng_seed: RngSeed::Fixed(11),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn t_is_the_supremum(p in params(), ln_k in 0.0f64..12.0) {
        let e = t_eval_ln(&p, ln_k);
        prop_assume!(matches!(e, Ok(ref e) if e.argmax_p < 2000));
        let e = e.unwrap();
        let b = brute(&p, ln_k, 4000);
        prop_assert!((e.value - b).abs() <= 1e-10 * b.abs().max(1.0), "{} vs {b}", e.value);
    }

    #[test]
    fn t_is_nondecreasing_and_convex_in_ln_k(p in params(), a in 0.0f64..10.0, d in 0.01f64..2.0) {
        let v = [a, a + d, a + 2.0 * d].map(|x| t_at(&p, x));
        prop_assume!(v.iter().all(Option::is_some));
        let [f0, f1, f2] = v.map(Option::unwrap);
        let tol = 1e-12 * f2.abs().max(1.0);
        prop_assert!(f1 >= f0 - tol && f2 >= f1 - tol);
        prop_assert!(f0 + f2 - 2.0 * f1 >= -tol);
    }

    #[test]
    fn t_grows_with_h(p in params(), k in 1.0f64..1e6, f in 1.0f64..4.0) {
        let q = p.with_h(p.h() * f).unwrap();
        let (a, b) = (t_at(&p, k.ln()), t_at(&q, k.ln()));
        prop_assume!(a.is_some() && b.is_some());
        prop_assert!(b >= a);
    }

    #[test]
    fn weights_are_log_convex(tau in 0.1f64..4.0, sigma in 1.05f64..3.0) {
        let p = GevreyParams::without_h(tau, sigma).unwrap();
        for q in 1..60u64 {
            let s = log_m_big(q - 1, &p) + log_m_big(q + 1, &p) - 2.0 * log_m_big(q, &p);
            prop_assert!(s >= -1e-9, "p = {q}: {s}");
        }
        prop_assert!(check_conditions(&p, 40).unwrap().log_convexity.holds);
    }

    #[test]
    fn thresholds_decrease_in_frequency_and_h(p in params(), xi in 3.0f64..1e5, f in 1.0f64..3.0) {
        let thr = |q: &GevreyParams, x: f64, v: ThresholdVariant| match decay_threshold(q, 0.0, x, v) {
            Ok(t) => Some(t),
            Err(Error::ScanCap { .. }) => None,
            Err(e) => panic!("{e}"),
        };
        for v in [ThresholdVariant::T, ThresholdVariant::LogPower] {
            if let (Some(a), Some(b)) = (thr(&p, xi, v), thr(&p, xi * f, v)) {
                prop_assert!(b <= a + 1e-12 * a.abs().max(1.0));
            }
        }
        let wider = p.with_h(p.h() * f).unwrap();
        if let (Some(a), Some(b)) = (thr(&p, xi, ThresholdVariant::T), thr(&wider, xi, ThresholdVariant::T)) {
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn dual_cone_pairs_nonnegatively(
        center in -PI..PI,
        half in 0.05f64..1.5,
        ty in -1.0f64..1.0,
        txi in -1.0f64..1.0,
    ) {
        let cone = ConeSpec::sector(center, half).unwrap();
        let dual = dual_cone(&cone);
        let ya = center + 0.999 * half * ty;
        let y = [ya.cos(), ya.sin()];
        prop_assert!(cone.contains(&y));
        // sample the dual through its own membership test
        let xa = center + (PI / 2.0 - half) * txi;
        let xi = [xa.cos(), xa.sin()];
        if dual.contains(&xi) {
            prop_assert!(y[0] * xi[0] + y[1] * xi[1] >= -1e-12);
        }
        // outside the dual some direction of the cone pairs negatively
        let out = center + PI / 2.0 - half + 0.01 + 0.5 * (txi + 1.0);
        let xo = [out.cos(), out.sin()];
        if !dual.contains(&xo) {
            let edge = center - half * 0.999;
            let ye = [edge.cos(), edge.sin()];
            prop_assert!(ye[0] * xo[0] + ye[1] * xo[1] < 0.0);
        }
    }

    #[test]
    fn bump_is_a_partition_profile(c in -2.0f64..2.0, rp in 0.1f64..1.0, gap in 0.05f64..1.0, x in -5.0f64..5.0) {
        let b = BumpFunction::new(vec![c], rp, rp + gap).unwrap();
        let v = b.value(&[x]).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        let r = (x - c).abs();
        if r <= rp {
            prop_assert_eq!(v, 1.0);
        }
        if r >= rp + gap {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn localized_spectrum_is_translation_invariant(shift in 1usize..64, freq in 1.0f64..40.0) {
        // moving the signal and the window by whole samples changes phases only
        let n = 1024;
        let dx = 8.0 / n as f64;
        let f = |x: f64| Complex64::new((freq * x).sin() + (x * x).cos(), 0.0);
        let u = SampledDistribution::from_fn_1d(-4.0, 4.0, n, f).unwrap();
        let s = shift as f64 * dx;
        let v = SampledDistribution::from_fn_1d(-4.0 + s, 4.0 + s, n, |x| f(x - s)).unwrap();
        let a = spectrum_localized(&u, &BumpFunction::new(vec![0.0], 0.3, 0.8).unwrap(), 2).unwrap();
        let b = spectrum_localized(&v, &BumpFunction::new(vec![s], 0.3, 0.8).unwrap(), 2).unwrap();
        let top = a.magnitudes.iter().fold(0.0f64, |m, &x| m.max(x));
        for (x, y) in a.magnitudes.iter().zip(&b.magnitudes) {
            prop_assert!((x - y).abs() <= 1e-12 * top);
        }
        prop_assert!((a.parseval_sum() - a.l2_norm_sq).abs() <= 1e-9 * a.l2_norm_sq);
    }
}
