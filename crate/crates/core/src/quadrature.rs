use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Lagrange weights of the first and second derivative at `x` from the
/// values at `x0 < x1 < x2`. Exact for quadratics.
pub fn three_point_weights(x0: f64, x1: f64, x2: f64, x: f64) -> ([f64; 3], [f64; 3]) {
    let d0 = (x0 - x1) * (x0 - x2);
    let d1 = (x1 - x0) * (x1 - x2);
    let d2 = (x2 - x0) * (x2 - x1);
    let first = [
        ((x - x1) + (x - x2)) / d0,
        ((x - x0) + (x - x2)) / d1,
        ((x - x0) + (x - x1)) / d2,
    ];
    let second = [2.0 / d0, 2.0 / d1, 2.0 / d2];
    (first, second)
}

/// Area of the unit sphere `S^{n-1}` in `R^n`: `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / libm::tgamma(half)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(points > 0);
    let mut x = vec![0.0; points];
    let mut w = vec![0.0; points];
    let m = points.div_ceil(2);
    let nf = points as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..points {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[points - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[points - 1 - i] = wi;
    }
    (x, w)
}

/// Composite trapezoid rule over sampled `(x, y)`.
pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_volume(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_volume(3), 4.0 * PI, epsilon = 1e-13);
        assert_relative_eq!(sphere_volume(4), 2.0 * PI * PI, epsilon = 1e-13);
        assert_relative_eq!(sphere_volume(5), 8.0 * PI * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert_relative_eq!(integral, 2.0 / 9.0, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn weights_exact_on_quadratics() {
        let (d1, d2) = three_point_weights(0.1, 0.4, 1.3, 0.4);
        let f = |x: f64| 2.0 - x + 3.0 * x * x;
        let v = [f(0.1), f(0.4), f(1.3)];
        let df: f64 = d1.iter().zip(v).map(|(a, b)| a * b).sum();
        let ddf: f64 = d2.iter().zip(v).map(|(a, b)| a * b).sum();
        assert_relative_eq!(df, -1.0 + 6.0 * 0.4, epsilon = 1e-12);
        assert_relative_eq!(ddf, 6.0, epsilon = 1e-12);
    }
}
