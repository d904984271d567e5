//! Weighted Lebesgue and Sobolev norms of radial functions on `R^n`.
//!
//! `||u||_{L^p_delta} = ||sigma^{-delta - n/p} u||_{L^p}` with
//! `sigma = sqrt(1 + r^2)`, and `W^{k,p}_delta` sums the `L^p_{delta-j}`
//! norms of the derivatives of order `j <= k`. Radial reduction:
//! `|grad u| = |u'|`, `|hess u|^2 = u''^2 + (n-1)(u'/r)^2`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::quadrature::trapezoid;
use crate::{gauss_legendre, sphere_volume, Error, MonotoneCubic, RadialGrid, Result, StencilSet};

pub fn sigma(r: f64) -> f64 {
    (1.0 + r * r).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LpExponent {
    One,
    Two,
    Infinity,
}

impl LpExponent {
    /// Finite exponent, `None` for `p = infinity`.
    pub fn finite(self) -> Option<f64> {
        match self {
            LpExponent::One => Some(1.0),
            LpExponent::Two => Some(2.0),
            LpExponent::Infinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormSpec {
    pub k: u8,
    pub p: LpExponent,
    pub delta: f64,
}

impl NormSpec {
    pub fn new(k: u8, p: LpExponent, delta: f64) -> Result<Self> {
        let spec = Self { k, p, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k > 2 {
            return Err(Error::UnsupportedOrder(self.k));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "weight {} is not finite",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Node values of a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(
                "radial function has non-finite values".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, u: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| u(r)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise magnitudes `|D^j u|` for `j = 0..=k`.
    pub fn derivative_magnitudes(&self, k: u8, n: usize) -> Vec<Vec<f64>> {
        let u = &self.values;
        let mut out = Vec::with_capacity(k as usize + 1);
        out.push(u.iter().map(|v| v.abs()).collect());
        if k == 0 {
            return out;
        }
        let st = StencilSet::new(&self.grid);
        let d1 = st.first(u);
        out.push(d1.iter().map(|v| v.abs()).collect());
        if k == 1 {
            return out;
        }
        let d2 = st.second(u);
        let r = self.grid.nodes();
        let nm1 = n as f64 - 1.0;
        out.push(
            (0..u.len())
                .map(|i| {
                    let q = if i == 0 { d2[0] } else { d1[i] / r[i] };
                    (d2[i] * d2[i] + nm1 * q * q).sqrt()
                })
                .collect(),
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormEstimate {
    pub value: f64,
    /// Quadrature error (difference to the half-resolution rule) plus the
    /// estimated tail beyond `r_max`, propagated to the norm.
    pub error_bar: f64,
    pub quadrature_error: f64,
    pub tail_error: f64,
}

fn weighted_integrands(u: &RadialFunction, spec: &NormSpec, n: usize, p: f64) -> Vec<Vec<f64>> {
    let r = u.grid.nodes();
    let vol = sphere_volume(n);
    u.derivative_magnitudes(spec.k, n)
        .into_iter()
        .enumerate()
        .map(|(j, d)| {
            let e = -(spec.delta - j as f64) - n as f64 / p;
            d.iter()
                .zip(r)
                .map(|(v, &r)| vol * r.powi(n as i32 - 1) * (sigma(r).powf(e) * v).powf(p))
                .collect()
        })
        .collect()
}

// Tail beyond the last node from the local power law of the integrand.
fn tail_estimate(r: &[f64], g: &[f64]) -> f64 {
    let n = r.len();
    let (g1, g2) = (g[n - 2], g[n - 1]);
    if g2 == 0.0 {
        return 0.0;
    }
    if g1 <= 0.0 {
        return f64::INFINITY;
    }
    let alpha = (g2 / g1).ln() / (r[n - 1] / r[n - 2]).ln();
    if alpha < -1.0 {
        g2 * r[n - 1] / (-alpha - 1.0)
    } else {
        f64::INFINITY
    }
}

fn coarse_trapezoid(r: &[f64], g: &[f64]) -> f64 {
    let idx: Vec<usize> = (0..r.len())
        .step_by(2)
        .chain(core::iter::once(r.len() - 1))
        .collect();
    let mut idx = idx;
    idx.dedup();
    let rc: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
    let gc: Vec<f64> = idx.iter().map(|&i| g[i]).collect();
    trapezoid(&rc, &gc)
}

pub fn weighted_norm(u: &RadialFunction, spec: &NormSpec, n: usize) -> Result<NormEstimate> {
    spec.validate()?;
    let r = u.grid.nodes();
    match spec.p.finite() {
        None => {
            let value = u
                .derivative_magnitudes(spec.k, n)
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let e = -(spec.delta - j as f64);
                    d.iter()
                        .zip(r)
                        .map(|(v, &r)| sigma(r).powf(e) * v)
                        .fold(0.0, f64::max)
                })
                .sum();
            Ok(NormEstimate {
                value,
                error_bar: 0.0,
                quadrature_error: 0.0,
                tail_error: 0.0,
            })
        }
        Some(p) => {
            let mut total = 0.0;
            let mut quad = 0.0;
            let mut tail = 0.0;
            for g in weighted_integrands(u, spec, n, p) {
                let fine = trapezoid(r, &g);
                total += fine;
                quad += (fine - coarse_trapezoid(r, &g)).abs();
                tail += tail_estimate(r, &g);
            }
            let value = total.powf(1.0 / p);
            let to_norm = |e: f64| {
                if value > 0.0 {
                    e / (p * value.powf(p - 1.0))
                } else {
                    e.powf(1.0 / p)
                }
            };
            let (qe, te) = (to_norm(quad), to_norm(tail));
            Ok(NormEstimate {
                value,
                error_bar: qe + te,
                quadrature_error: qe,
                tail_error: te,
            })
        }
    }
}

/// Trapezoid integral of node samples `g` over `[a, b]`, linearly
/// interpolating the integrand at the cut points.
fn integrate_range(r: &[f64], g: &[f64], a: f64, b: f64) -> f64 {
    let lerp = |x: f64| {
        let i = r.partition_point(|&v| v <= x).clamp(1, r.len() - 1) - 1;
        let s = (x - r[i]) / (r[i + 1] - r[i]);
        g[i] + s * (g[i + 1] - g[i])
    };
    let mut xs = alloc::vec![a];
    let mut ys = alloc::vec![lerp(a)];
    for (i, &x) in r.iter().enumerate() {
        if x > a && x < b {
            xs.push(x);
            ys.push(g[i]);
        }
    }
    xs.push(b);
    ys.push(lerp(b));
    trapezoid(&xs, &ys)
}

fn max_range(r: &[f64], g: &[f64], a: f64, b: f64) -> f64 {
    r.iter()
        .zip(g)
        .filter(|(&x, _)| x >= a && x <= b)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnnulusContribution {
    pub j: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub contribution: f64,
}

/// Unit ball plus dyadic annuli `2^{j-1} <= r < 2^j`, each rescaled to the
/// unit annulus and weighted by `2^{-p delta (j-1)}`. For finite `p` the
/// contributions are `p`-th powers; for `p = infinity` they are suprema.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DyadicReport {
    pub ball: f64,
    pub annuli: Vec<AnnulusContribution>,
    /// `(ball + sum annuli)^{1/p}`, or the largest piece for `p = infinity`.
    pub recombined: f64,
    /// Weighted norm restricted to the covered radius `2^J`.
    pub direct: f64,
    pub ratio: f64,
}

pub const MIN_DYADIC_ANNULI: usize = 4;

pub fn dyadic_decomposition(u: &RadialFunction, spec: &NormSpec, n: usize) -> Result<DyadicReport> {
    spec.validate()?;
    let r = u.grid.nodes();
    let r_max = u.grid.r_max();
    let count = r_max.log2().floor().max(0.0) as usize;
    if count < MIN_DYADIC_ANNULI {
        return Err(Error::InsufficientSpan {
            needed: MIN_DYADIC_ANNULI,
            found: count,
        });
    }
    let outer = (count as f64).exp2();
    let mags = u.derivative_magnitudes(spec.k, n);
    let nf = n as f64;
    let vol = sphere_volume(n);
    let mut annuli = Vec::with_capacity(count);
    let (ball, recombined, direct);
    match spec.p.finite() {
        Some(p) => {
            let plain: Vec<Vec<f64>> = mags
                .iter()
                .map(|d| {
                    d.iter()
                        .zip(r)
                        .map(|(v, &r)| vol * r.powi(n as i32 - 1) * v.powf(p))
                        .collect()
                })
                .collect();
            ball = plain
                .iter()
                .map(|g| integrate_range(r, g, 0.0, 1.0))
                .sum::<f64>();
            let mut sum = ball;
            for j in 1..=count {
                let (a, b) = (((j - 1) as f64).exp2(), (j as f64).exp2());
                let s = (j - 1) as f64;
                let c = (-p * spec.delta * s).exp2()
                    * plain
                        .iter()
                        .enumerate()
                        .map(|(i, g)| {
                            (s * (i as f64 * p - nf)).exp2() * integrate_range(r, g, a, b)
                        })
                        .sum::<f64>();
                sum += c;
                annuli.push(AnnulusContribution {
                    j,
                    r_inner: a,
                    r_outer: b,
                    contribution: c,
                });
            }
            recombined = sum.powf(1.0 / p);
            direct = weighted_integrands(u, spec, n, p)
                .iter()
                .map(|g| integrate_range(r, g, 0.0, outer))
                .sum::<f64>()
                .powf(1.0 / p);
        }
        None => {
            ball = mags.iter().map(|d| max_range(r, d, 0.0, 1.0)).sum::<f64>();
            let mut best = ball;
            for j in 1..=count {
                let (a, b) = (((j - 1) as f64).exp2(), (j as f64).exp2());
                let s = (j - 1) as f64;
                let c = (-spec.delta * s).exp2()
                    * mags
                        .iter()
                        .enumerate()
                        .map(|(i, d)| (s * i as f64).exp2() * max_range(r, d, a, b))
                        .sum::<f64>();
                best = best.max(c);
                annuli.push(AnnulusContribution {
                    j,
                    r_inner: a,
                    r_outer: b,
                    contribution: c,
                });
            }
            recombined = best;
            direct = mags
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let e = -(spec.delta - j as f64);
                    d.iter()
                        .zip(r)
                        .filter(|(_, &r)| r <= outer)
                        .map(|(v, &r)| sigma(r).powf(e) * v)
                        .fold(0.0, f64::max)
                })
                .sum();
        }
    }
    let ratio = if direct > 0.0 {
        recombined / direct
    } else {
        1.0
    };
    Ok(DyadicReport {
        ball,
        annuli,
        recombined,
        direct,
        ratio,
    })
}

/// Standard bump `exp(-1/(1 - s^2))` on `|s| < 1`.
pub fn bump_kernel(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Quadrature points for the radial mollifier.
const MOLLIFIER_RADIAL_POINTS: usize = 32;
const MOLLIFIER_ANGULAR_POINTS: usize = 32;

/// Convolution of a radial `u` with the unit-mass bump of radius `eps` in `R^n`.
///
/// For radial `u` the convolution at radius `r` reduces to
/// `int_0^eps int_0^pi j_eps(rho) rho^{n-1} sin^{n-2}(theta) u(|r e - rho w|) dtheta drho`,
/// evaluated by tensor Gauss-Legendre quadrature. The discrete weights are
/// renormalised to sum to 1 so constants are reproduced exactly. Off-grid
/// values of `u` come from a monotone cubic through the even extension;
/// beyond `r_max` `u` is continued by its last value.
pub fn mollify(u: &RadialFunction, eps: f64, n: usize) -> Result<RadialFunction> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            what: "mollifier radius",
            value: eps,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let r = u.grid.nodes();
    let len = r.len();
    let mut xs = Vec::with_capacity(2 * len - 1);
    let mut ys = Vec::with_capacity(2 * len - 1);
    for i in (1..len).rev() {
        xs.push(-r[i]);
        ys.push(u.values[i]);
    }
    xs.extend_from_slice(r);
    ys.extend_from_slice(&u.values);
    let interp = MonotoneCubic::new(&xs, &ys)?;

    let (gx, gw) = gauss_legendre(MOLLIFIER_RADIAL_POINTS);
    let (tx, tw) = gauss_legendre(MOLLIFIER_ANGULAR_POINTS);
    let mut pts = Vec::with_capacity(gx.len() * tx.len());
    let mut total = 0.0;
    for (x, w) in gx.iter().zip(&gw) {
        let s = 0.5 * (x + 1.0);
        let rho = eps * s;
        let radial = 0.5 * w * bump_kernel(s) * rho.powi(n as i32 - 1);
        for (y, v) in tx.iter().zip(&tw) {
            let theta = 0.5 * core::f64::consts::PI * (y + 1.0);
            let weight = radial * v * theta.sin().powi(n as i32 - 2);
            total += weight;
            pts.push((rho, theta.cos(), weight));
        }
    }
    for p in &mut pts {
        p.2 /= total;
    }
    let values = r
        .iter()
        .map(|&x| {
            pts.iter()
                .map(|&(rho, c, w)| {
                    let d = (x * x + rho * rho - 2.0 * x * rho * c).max(0.0).sqrt();
                    w * interp.eval(d)
                })
                .sum()
        })
        .collect();
    RadialFunction::new(Arc::clone(&u.grid), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GridSpec, Stretching};
    use approx::assert_relative_eq;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(
            GridSpec {
                intervals: 256,
                r_max: 40.0,
                stretching: Stretching::Sinh { scale: 2.0 },
            }
            .build()
            .unwrap(),
        )
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(0.0), 1.0);
        assert_relative_eq!(sigma(1.0), 2f64.sqrt());
        assert_relative_eq!(sigma(3.0), 10f64.sqrt());
    }

    #[test]
    fn order_three_rejected() {
        assert!(matches!(
            NormSpec::new(3, LpExponent::Two, -1.0),
            Err(Error::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn zero_function() {
        let u = RadialFunction::new(grid(), alloc::vec![0.0; 257]).unwrap();
        for p in [LpExponent::One, LpExponent::Two, LpExponent::Infinity] {
            let spec = NormSpec::new(2, p, -0.5).unwrap();
            assert_eq!(weighted_norm(&u, &spec, 3).unwrap().value, 0.0);
            let d = dyadic_decomposition(&u, &spec, 3).unwrap();
            assert!(d.annuli.iter().all(|a| a.contribution == 0.0));
        }
    }

    #[test]
    fn hessian_norm_of_quadratic() {
        // u = r^2: hess = 2 I, |hess|^2 = 4 n
        let u = RadialFunction::from_fn(grid(), |r| r * r).unwrap();
        let m = u.derivative_magnitudes(2, 4);
        for v in &m[2][..200] {
            assert_relative_eq!(*v, 4.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn mollifier_keeps_constants() {
        let u = RadialFunction::new(grid(), alloc::vec![2.5; 257]).unwrap();
        let j = mollify(&u, 0.3, 3).unwrap();
        for v in j.values() {
            assert_relative_eq!(*v, 2.5, max_relative = 1e-14);
        }
        assert!(mollify(&u, 1.0, 3).is_err());
        assert!(mollify(&u, 0.0, 3).is_err());
    }

    #[test]
    fn span_required() {
        let g = Arc::new(
            GridSpec {
                intervals: 32,
                r_max: 10.0,
                stretching: Stretching::Uniform,
            }
            .build()
            .unwrap(),
        );
        let u = RadialFunction::new(g, alloc::vec![1.0; 33]).unwrap();
        let spec = NormSpec::new(0, LpExponent::Two, -1.0).unwrap();
        assert!(matches!(
            dyadic_decomposition(&u, &spec, 3),
            Err(Error::InsufficientSpan { found: 3, .. })
        ));
    }
}
