use approx::assert_relative_eq;
use proptest::prelude::*;
use radflow_core::{GridSpec, RadialGrid, StencilSet, Stretching};

fn build(intervals: usize, r_max: f64, stretching: Stretching) -> RadialGrid {
    GridSpec {
        intervals,
        r_max,
        stretching,
    }
    .build()
    .unwrap()
}

#[test]
fn uniform_and_geometric_examples() {
    assert_eq!(
        build(4, 4.0, Stretching::Uniform).nodes(),
        &[0.0, 1.0, 2.0, 3.0, 4.0]
    );
    let g = build(3, 7.0, Stretching::Geometric { ratio: 2.0 });
    for (a, b) in g.nodes().iter().zip([0.0, 1.0, 3.0, 7.0]) {
        assert_relative_eq!(*a, b, epsilon = 1e-14);
    }
    assert_relative_eq!(g.gap(0), 1.0, epsilon = 1e-14);
}

#[test]
fn sinh_gaps_nondecreasing() {
    let g = build(64, 100.0, Stretching::Sinh { scale: 4.0 });
    let gaps: Vec<f64> = (0..64).map(|i| g.gap(i)).collect();
    assert!(gaps.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(g.nodes()[64], 100.0);
}

#[test]
fn rejects_invalid_parameters() {
    for spec in [
        GridSpec {
            intervals: 16,
            r_max: 0.0,
            stretching: Stretching::Uniform,
        },
        GridSpec {
            intervals: 16,
            r_max: -3.0,
            stretching: Stretching::Uniform,
        },
        GridSpec {
            intervals: 16,
            r_max: 10.0,
            stretching: Stretching::Geometric { ratio: 1.0 },
        },
        GridSpec {
            intervals: 16,
            r_max: 10.0,
            stretching: Stretching::Geometric { ratio: 0.5 },
        },
        GridSpec {
            intervals: 16,
            r_max: 10.0,
            stretching: Stretching::Sinh { scale: 0.0 },
        },
    ] {
        let err = spec.build().unwrap_err();
        assert!(!err.to_string().is_empty());
    }
}

#[test]
fn quadratic_second_derivative_is_two() {
    for stretching in [
        Stretching::Uniform,
        Stretching::Geometric { ratio: 1.05 },
        Stretching::Sinh { scale: 2.0 },
    ] {
        let g = build(40, 10.0, stretching);
        let st = StencilSet::new(&g);
        let u: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        let d2 = st.second(&u);
        for v in d2 {
            assert_relative_eq!(v, 2.0, max_relative = 1e-9);
        }
    }
}

#[test]
fn constants_have_zero_derivatives() {
    let g = build(50, 30.0, Stretching::Sinh { scale: 3.0 });
    let st = StencilSet::new(&g);
    let u = vec![2.75; g.len()];
    assert!(st.first(&u).iter().all(|&v| v == 0.0));
    assert!(st.second(&u).iter().all(|&v| v == 0.0));
}

// Max interior error of the stencils on sin(r), uniform spacing h.
fn sin_errors(intervals: usize) -> (f64, f64) {
    let g = build(intervals, 3.0, Stretching::Uniform);
    let st = StencilSet::new(&g);
    let r = g.nodes();
    let u: Vec<f64> = r.iter().map(|r| r.sin()).collect();
    let (d1, d2) = (st.first(&u), st.second(&u));
    let mut e1: f64 = 0.0;
    let mut e2: f64 = 0.0;
    for i in 1..intervals {
        e1 = e1.max((d1[i] - r[i].cos()).abs());
        e2 = e2.max((d2[i] + r[i].sin()).abs());
    }
    (e1, e2)
}

#[test]
fn sin_error_ratio_is_four() {
    let (a1, a2) = sin_errors(64);
    let (b1, b2) = sin_errors(128);
    assert!((a1 / b1 - 4.0).abs() < 0.1, "first: {}", a1 / b1);
    assert!((a2 / b2 - 4.0).abs() < 0.1, "second: {}", a2 / b2);
}

#[test]
fn smooth_stretching_keeps_second_order() {
    // r^4 / 4 + cos r has nonzero third and fourth derivatives everywhere.
    let err = |n: usize| {
        let g = build(n, 20.0, Stretching::Sinh { scale: 2.0 });
        let st = StencilSet::new(&g);
        let r = g.nodes();
        let u: Vec<f64> = r.iter().map(|r| r.powi(4) / 400.0 + r.cos()).collect();
        let d2 = st.second(&u);
        (1..n)
            .map(|i| (d2[i] - (3.0 * r[i] * r[i] / 100.0 - r[i].cos())).abs())
            .fold(0.0, f64::max)
    };
    let order = (err(128) / err(256)).log2();
    assert!(order > 1.9, "order {order}");
}

#[test]
fn refined_grids_are_nested() {
    for stretching in [
        Stretching::Uniform,
        Stretching::Geometric { ratio: 1.1 },
        Stretching::Sinh { scale: 4.0 },
    ] {
        let spec = GridSpec {
            intervals: 32,
            r_max: 50.0,
            stretching,
        };
        let (c, f) = (spec.build().unwrap(), spec.refined(2).build().unwrap());
        for (i, r) in c.nodes().iter().enumerate() {
            assert_relative_eq!(f.nodes()[2 * i], *r, max_relative = 1e-12);
        }
    }
}

fn stretching_strategy() -> impl Strategy<Value = Stretching> {
    prop_oneof![
        Just(Stretching::Uniform),
        (1.001f64..1.2).prop_map(|ratio| Stretching::Geometric { ratio }),
        (0.2f64..20.0).prop_map(|scale| Stretching::Sinh { scale }),
    ]
}

proptest! {
    #[test]
    fn stencils_exact_on_quadratics(
        stretching in stretching_strategy(),
        intervals in 16usize..96,
        r_max in 1.0f64..200.0,
        c in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let g = build(intervals, r_max, stretching);
        let st = StencilSet::new(&g);
        let r = g.nodes();
        let u: Vec<f64> = r.iter().map(|r| c[0] + c[1] * r + c[2] * r * r).collect();
        let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>() * (1.0 + r_max);
        for i in 1..intervals {
            let d1 = st.first_at(&u, i);
            let d2 = st.second_at(&u, i);
            let tol = 1e-9 * scale * (1.0 + r_max / g.gap(i - 1).min(g.gap(i)));
            prop_assert!((d1 - (c[1] + 2.0 * c[2] * r[i])).abs() <= tol);
            prop_assert!((d2 - 2.0 * c[2]).abs() <= tol * (1.0 + 1.0 / g.gap(i - 1).min(g.gap(i))));
        }
    }

    #[test]
    fn even_functions_have_zero_slope_at_origin(
        stretching in stretching_strategy(),
        intervals in 16usize..64,
        c in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let g = build(intervals, 10.0, stretching);
        let st = StencilSet::new(&g);
        let u: Vec<f64> = g
            .nodes()
            .iter()
            .map(|r| c[0] + c[1] * r * r + c[2] * r.powi(4))
            .collect();
        prop_assert!(st.first_at(&u, 0).abs() <= 1e-14);
        // even extension: the second derivative at 0 is exact for c0 + c1 r^2
        let q: Vec<f64> = g.nodes().iter().map(|r| c[0] + c[1] * r * r).collect();
        // second differences over the first cell lose eps * |q| / h0^2 to round-off
        let h0 = g.nodes()[1];
        let roundoff = 16.0 * f64::EPSILON * (c[0].abs() + c[1].abs()) / (h0 * h0);
        prop_assert!(
            (st.second_at(&q, 0) - 2.0 * c[1]).abs() <= 1e-9 * (1.0 + c[1].abs()) + roundoff
        );
    }

    #[test]
    fn grid_invariants(
        stretching in stretching_strategy(),
        intervals in 16usize..200,
        r_max in 0.5f64..500.0,
    ) {
        let g = build(intervals, r_max, stretching);
        let r = g.nodes();
        prop_assert_eq!(r[0], 0.0);
        prop_assert_eq!(r[intervals], r_max);
        prop_assert!(r.windows(2).all(|w| w[1] > w[0]));
        // at least the uniform density at the origin
        prop_assert!(r[1] <= r_max / intervals as f64 * (1.0 + 1e-12));
    }
}
