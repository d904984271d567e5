use std::f64::consts::PI;
use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;
use radflow_core::weighted::{
    bump_kernel, dyadic_decomposition, mollify, sigma, weighted_norm, LpExponent, NormSpec,
    RadialFunction,
};
use radflow_core::{GridSpec, RadialGrid, Stretching};

fn grid(intervals: usize, r_max: f64) -> Arc<RadialGrid> {
    Arc::new(
        GridSpec {
            intervals,
            r_max,
            stretching: Stretching::Sinh { scale: 4.0 },
        }
        .build()
        .unwrap(),
    )
}

fn norm(u: &RadialFunction, k: u8, p: LpExponent, delta: f64, n: usize) -> f64 {
    weighted_norm(u, &NormSpec::new(k, p, delta).unwrap(), n)
        .unwrap()
        .value
}

#[test]
fn sigma_values() {
    assert_eq!(sigma(0.0), 1.0);
    assert_relative_eq!(sigma(1.0), 2f64.sqrt());
    assert_relative_eq!(sigma(3.0), 10f64.sqrt());
}

#[test]
fn zero_function() {
    let g = grid(128, 100.0);
    let u = RadialFunction::from_fn(g, |_| 0.0).unwrap();
    for p in [LpExponent::One, LpExponent::Two, LpExponent::Infinity] {
        assert_eq!(norm(&u, 2, p, -1.0, 3), 0.0);
        let d = dyadic_decomposition(&u, &NormSpec::new(1, p, -1.0).unwrap(), 3).unwrap();
        assert_eq!(d.ball, 0.0);
        assert!(d.annuli.iter().all(|a| a.contribution == 0.0));
    }
}

#[test]
fn inverse_square_weight_norm() {
    let exact = (4.0 * PI / 3.0).sqrt();
    for (intervals, r_max) in [(512, 100.0), (1024, 400.0)] {
        let u = RadialFunction::from_fn(grid(intervals, r_max), |r| 1.0 / (1.0 + r * r)).unwrap();
        let est = weighted_norm(&u, &NormSpec::new(0, LpExponent::Two, -1.0).unwrap(), 3).unwrap();
        assert!(
            (est.value - exact).abs() <= est.error_bar,
            "{} vs {exact} ± {}",
            est.value,
            est.error_bar
        );
        assert!(est.error_bar < 1e-3);
        assert!((est.value - 2.0466).abs() < 1e-3);
    }
}

#[test]
fn sup_norm_is_a_maximum() {
    let u = RadialFunction::from_fn(grid(256, 100.0), |r| 1.0 / (1.0 + r * r)).unwrap();
    // sigma^{1} sigma^{-2} peaks at the origin
    assert_relative_eq!(norm(&u, 0, LpExponent::Infinity, -1.0, 3), 1.0);
    assert_relative_eq!(norm(&u, 0, LpExponent::Infinity, 0.0, 5), 1.0);
}

#[test]
fn order_above_two_rejected() {
    assert!(NormSpec::new(3, LpExponent::Two, -1.0).is_err());
}

#[test]
fn dyadic_ratio_is_stable() {
    let spec = NormSpec::new(0, LpExponent::Two, -1.0).unwrap();
    let ratio = |n: usize| {
        let u = RadialFunction::from_fn(grid(n, 100.0), |r| 1.0 / (1.0 + r * r)).unwrap();
        let d = dyadic_decomposition(&u, &spec, 3).unwrap();
        assert_eq!(d.annuli.len(), 6);
        d.ratio
    };
    let (a, b) = (ratio(512), ratio(1024));
    assert!(a > 0.25 && a < 4.0, "{a}");
    assert_relative_eq!(a, b, max_relative = 1e-3);
}

#[test]
fn dyadic_support() {
    let u = RadialFunction::from_fn(grid(512, 100.0), |r| bump_kernel(r / 3.0)).unwrap();
    for p in [LpExponent::Two, LpExponent::Infinity] {
        let d = dyadic_decomposition(&u, &NormSpec::new(2, p, -1.0).unwrap(), 3).unwrap();
        for a in &d.annuli {
            if a.r_inner >= 3.0 {
                assert_eq!(a.contribution, 0.0, "{a:?}");
            } else {
                assert!(a.contribution > 0.0);
            }
        }
    }
    let short = RadialFunction::from_fn(grid(64, 10.0), |r| bump_kernel(r / 3.0)).unwrap();
    let spec = NormSpec::new(0, LpExponent::Two, -1.0).unwrap();
    assert!(dyadic_decomposition(&short, &spec, 3).is_err());
}

#[test]
fn mollifier_keeps_constants() {
    let g = grid(256, 100.0);
    let u = RadialFunction::from_fn(g, |_| 2.5).unwrap();
    for n in [3, 4] {
        for eps in [0.5, 0.125] {
            let v = mollify(&u, eps, n).unwrap();
            for x in v.values() {
                assert_relative_eq!(*x, 2.5, max_relative = 1e-13);
            }
        }
    }
    assert!(mollify(&u, 0.0, 3).is_err());
    assert!(mollify(&u, 1.0, 3).is_err());
}

#[test]
fn mollifier_bounds_are_uniform_in_eps() {
    let g = grid(512, 100.0);
    let tests: [fn(f64) -> f64; 3] = [
        |r| 1.0 / (1.0 + r * r),
        |r| (-r * r).exp(),
        |r| bump_kernel(r / 3.0),
    ];
    for k in 0..=2u8 {
        let spec = NormSpec::new(k, LpExponent::Two, -1.0).unwrap();
        let constants: Vec<f64> = [0.5, 0.25, 0.125]
            .iter()
            .map(|&eps| {
                tests
                    .iter()
                    .map(|u| {
                        let u = RadialFunction::from_fn(Arc::clone(&g), u).unwrap();
                        let ju = mollify(&u, eps, 3).unwrap();
                        weighted_norm(&ju, &spec, 3).unwrap().value
                            / weighted_norm(&u, &spec, 3).unwrap().value
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let (lo, hi) = constants
            .iter()
            .fold((f64::INFINITY, 0.0f64), |a, &c| (a.0.min(c), a.1.max(c)));
        assert!(hi / lo - 1.0 <= 0.1, "k={k}: {constants:?}");
    }
}

#[test]
fn mollifier_converges() {
    let g = grid(512, 100.0);
    let u = RadialFunction::from_fn(g, |r| bump_kernel(r / 3.0)).unwrap();
    let spec = NormSpec::new(0, LpExponent::Two, -1.0).unwrap();
    let errs: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&eps| {
            let ju = mollify(&u, eps, 3).unwrap();
            let diff: Vec<f64> = ju
                .values()
                .iter()
                .zip(u.values())
                .map(|(a, b)| a - b)
                .collect();
            let d = RadialFunction::new(Arc::clone(u.grid()), diff).unwrap();
            weighted_norm(&d, &spec, 3).unwrap().value
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[1] / errs[2] > 3.0);
}

// Sum of two gaussians with random amplitudes and widths.
fn function_strategy() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.2f64..3.0).prop_flat_map(|w| {
        (Just(w), -2.0f64..2.0, -2.0f64..2.0).prop_map(|(w, a, b)| [a, w[0], b, w[1] + w[2]])
    })
}

fn sample(g: &Arc<RadialGrid>, c: [f64; 4]) -> RadialFunction {
    RadialFunction::from_fn(Arc::clone(g), move |r| {
        c[0] * (-(r / c[1]).powi(2)).exp() + c[2] * (-(r / c[3]).powi(2)).exp()
    })
    .unwrap()
}

fn exponent() -> impl Strategy<Value = LpExponent> {
    prop_oneof![
        Just(LpExponent::One),
        Just(LpExponent::Two),
        Just(LpExponent::Infinity)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(
        a in function_strategy(),
        b in function_strategy(),
        c in -5.0f64..5.0,
        k in 0u8..3,
        p in exponent(),
        delta in -3.0f64..1.0,
    ) {
        let g = grid(128, 40.0);
        let (u, v) = (sample(&g, a), sample(&g, b));
        let sum = RadialFunction::new(
            Arc::clone(&g),
            u.values().iter().zip(v.values()).map(|(x, y)| x + y).collect(),
        ).unwrap();
        let (nu, nv, ns) = (norm(&u, k, p, delta, 3), norm(&v, k, p, delta, 3), norm(&sum, k, p, delta, 3));
        prop_assert!(nu >= 0.0);
        prop_assert!(ns <= (nu + nv) * (1.0 + 1e-12));
        let nc = norm(&u.scaled(c), k, p, delta, 3);
        prop_assert!((nc - c.abs() * nu).abs() <= 1e-12 * (1.0 + nc));
    }

    #[test]
    fn weight_inclusion(
        a in function_strategy(),
        d1 in -3.0f64..1.0,
        gap in 0.0f64..2.0,
        k in 0u8..3,
        p in exponent(),
        n in 3usize..6,
    ) {
        let g = grid(128, 40.0);
        let u = sample(&g, a);
        let (lo, hi) = (norm(&u, k, p, d1 + gap, n), norm(&u, k, p, d1, n));
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn weighted_holder(
        a in function_strategy(),
        b in function_strategy(),
        d1 in -3.0f64..1.0,
        d2 in -3.0f64..1.0,
        n in 3usize..6,
    ) {
        let g = grid(128, 40.0);
        let (u, v) = (sample(&g, a), sample(&g, b));
        let uv = RadialFunction::new(
            Arc::clone(&g),
            u.values().iter().zip(v.values()).map(|(x, y)| x * y).collect(),
        ).unwrap();
        let lhs = norm(&uv, 0, LpExponent::One, d1 + d2, n);
        let rhs = norm(&u, 0, LpExponent::Two, d1, n) * norm(&v, 0, LpExponent::Two, d2, n);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn constants_have_sup_norm(c in -10.0f64..10.0, k in 0u8..3) {
        let g = grid(64, 20.0);
        let u = RadialFunction::from_fn(g, move |_| c).unwrap();
        // derivatives vanish and sigma^0 = 1
        prop_assert!((norm(&u, k, LpExponent::Infinity, 0.0, 3) - c.abs()).abs() <= 1e-14 * c.abs());
    }
}
