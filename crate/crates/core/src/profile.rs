//! Initial metric profiles `f(0, r)` and their admissibility checks.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::LN_2;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::weighted::{weighted_norm, LpExponent, NormSpec, RadialFunction};
use crate::{Error, RadialGrid, Result};

/// Largest |f(0) - 1| accepted for tabulated data before it is rounded to 1.
pub const CENTER_TOLERANCE: f64 = 1e-9;

/// Values of |f^2 - 1| below this are treated as round-off in tail fits.
pub const TAIL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProfileFamily {
    Flat,
    /// `f^2 = 1 + A r^2 exp(-r^2/s^2) / (1 + r^2)`.
    Bump {
        amplitude: f64,
        width: f64,
    },
    /// `f^2 = 1 + 2 m r^delta chi(r / r_c)`; `delta` defaults to `2 - n`.
    MassTail {
        mass: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        decay: Option<f64>,
        cutoff: f64,
    },
    /// Values of `f` at the grid nodes.
    Table {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProfileSpec {
    pub family: ProfileFamily,
    pub dimension: usize,
}

impl ProfileSpec {
    pub fn new(family: ProfileFamily, dimension: usize) -> Self {
        Self { family, dimension }
    }

    pub fn flat(dimension: usize) -> Self {
        Self::new(ProfileFamily::Flat, dimension)
    }

    pub fn bump(amplitude: f64, width: f64, dimension: usize) -> Self {
        Self::new(ProfileFamily::Bump { amplitude, width }, dimension)
    }

    pub fn mass_tail(mass: f64, cutoff: f64, dimension: usize) -> Self {
        Self::new(
            ProfileFamily::MassTail {
                mass,
                decay: None,
                cutoff,
            },
            dimension,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 3 {
            return Err(Error::InvalidProfile(format!(
                "dimension must be at least 3, got {}",
                self.dimension
            )));
        }
        match &self.family {
            ProfileFamily::Flat => Ok(()),
            ProfileFamily::Bump { amplitude, width } => {
                if !(*amplitude > -1.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "bump amplitude must exceed -1, got {amplitude}"
                    )));
                }
                if !(*width > 0.0) || !width.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "bump width must be positive, got {width}"
                    )));
                }
                Ok(())
            }
            ProfileFamily::MassTail {
                mass,
                decay,
                cutoff,
            } => {
                if !mass.is_finite() {
                    return Err(Error::InvalidProfile("mass must be finite".into()));
                }
                let delta = decay.unwrap_or(2.0 - self.dimension as f64);
                if !(delta < 0.0) {
                    return Err(Error::InvalidProfile(format!(
                        "tail decay exponent must be negative, got {delta}"
                    )));
                }
                if !(*cutoff > 0.0) || !cutoff.is_finite() {
                    return Err(Error::InvalidProfile(format!(
                        "inner cutoff must be positive, got {cutoff}"
                    )));
                }
                Ok(())
            }
            ProfileFamily::Table { values } => {
                if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidProfile(format!(
                        "table values must be positive and finite, found {v}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `f^2 - 1` of the closed-form families at radius `r`.
    pub fn w_at(&self, r: f64) -> Option<f64> {
        match &self.family {
            ProfileFamily::Flat => Some(0.0),
            ProfileFamily::Bump { amplitude, width } => {
                let r2 = r * r;
                Some(amplitude * r2 * (-r2 / (width * width)).exp() / (1.0 + r2))
            }
            ProfileFamily::MassTail {
                mass,
                decay,
                cutoff,
            } => {
                if r <= 0.0 {
                    return Some(0.0);
                }
                let delta = decay.unwrap_or(2.0 - self.dimension as f64);
                Some(2.0 * mass * r.powf(delta) * smooth_cutoff(r / cutoff))
            }
            ProfileFamily::Table { .. } => None,
        }
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> Result<MetricProfile> {
        self.validate()?;
        let f = match &self.family {
            ProfileFamily::Table { values } => {
                if values.len() != grid.len() {
                    return Err(Error::LengthMismatch {
                        expected: grid.len(),
                        found: values.len(),
                    });
                }
                if (values[0] - 1.0).abs() > CENTER_TOLERANCE {
                    return Err(Error::InvalidProfile(format!(
                        "table value at r = 0 must be 1, got {}",
                        values[0]
                    )));
                }
                let mut f = values.clone();
                f[0] = 1.0;
                f
            }
            _ => grid
                .nodes()
                .iter()
                .map(|&r| {
                    let w = self.w_at(r).unwrap_or(0.0);
                    (1.0 + w).sqrt()
                })
                .collect(),
        };
        MetricProfile::new(Arc::clone(grid), f, 0.0, self.dimension)
    }
}

/// Quintic smoothstep in `log2(x)`: 0 for `x <= 1`, 1 for `x >= 2`, C^2.
pub fn smooth_cutoff(x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    let s = (x.ln() / LN_2).min(1.0);
    s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
}

/// The metric function `f` on a radial grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricProfile {
    grid: Arc<RadialGrid>,
    f: Vec<f64>,
    t: f64,
    dimension: usize,
}

impl MetricProfile {
    /// Validates positivity, `f(0) = 1` and finiteness of `(1 - f^2)/r^2`.
    pub fn new(grid: Arc<RadialGrid>, f: Vec<f64>, t: f64, dimension: usize) -> Result<Self> {
        if f.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: f.len(),
            });
        }
        if dimension < 3 {
            return Err(Error::InvalidProfile(format!(
                "dimension must be at least 3, got {dimension}"
            )));
        }
        if let Some((node, &value)) = f
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
        {
            return Err(Error::NonPositiveMetric { node, value });
        }
        if f[0] != 1.0 {
            return Err(Error::InvalidProfile(format!(
                "f(0) must equal 1, got {}",
                f[0]
            )));
        }
        let r = grid.nodes();
        for i in 1..f.len() {
            let q = (1.0 - f[i] * f[i]) / (r[i] * r[i]);
            if !q.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "(1 - f^2)/r^2 is not finite at node {i}"
                )));
            }
        }
        Ok(Self {
            grid,
            f,
            t,
            dimension,
        })
    }

    /// Skips validation; used by the integrator on states it has already checked.
    pub(crate) fn from_parts(grid: Arc<RadialGrid>, f: Vec<f64>, t: f64, dimension: usize) -> Self {
        Self {
            grid,
            f,
            t,
            dimension,
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn r(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// `w = f^2 - 1`, evaluated as `(f - 1)(f + 1)` to keep precision near flat space.
    pub fn w(&self) -> Vec<f64> {
        self.f.iter().map(|f| (f - 1.0) * (f + 1.0)).collect()
    }

    /// Largest f and its node.
    pub fn max_f(&self) -> (usize, f64) {
        self.f
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            )
    }

    pub fn check_no_minimal_sphere(&self, f_cap: f64) -> MinimalSphereReport {
        let (worst_node, max_f) = self.max_f();
        let r = self.r();
        let (min_h_node, min_h) = (1..r.len()).map(|i| (i, 1.0 / (r[i] * self.f[i]))).fold(
            (0, f64::INFINITY),
            |acc, x| if x.1 < acc.1 { x } else { acc },
        );
        MinimalSphereReport {
            passed: max_f <= f_cap,
            worst_node,
            worst_radius: r[worst_node],
            max_f,
            min_mean_curvature: min_h,
            min_mean_curvature_node: min_h_node,
        }
    }

    /// Weighted `H^k_delta` norm of `f^2 - 1` plus a power-law fit of the tail.
    pub fn check_af_class(&self, k: u8, delta: f64) -> Result<AfReport> {
        if k > 2 {
            return Err(Error::UnsupportedOrder(k));
        }
        let w = self.w();
        let spec = NormSpec::new(k, LpExponent::Two, delta)?;
        let norm = weighted_norm(
            &RadialFunction::new(Arc::clone(&self.grid), w.clone())?,
            &spec,
            self.dimension,
        )?;
        let fit = fit_tail_exponent(self.r(), &w);
        let passed = match fit {
            TailFit::Flat => true,
            TailFit::Exponent(e) => e <= delta + AF_FIT_TOLERANCE,
        };
        Ok(AfReport {
            norm: norm.value,
            norm_error: norm.error_bar,
            tail: fit,
            passed,
        })
    }
}

pub const AF_FIT_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MinimalSphereReport {
    pub passed: bool,
    pub worst_node: usize,
    pub worst_radius: f64,
    pub max_f: f64,
    /// Smallest `H = 1/(r f)` over the positive-radius nodes.
    pub min_mean_curvature: f64,
    pub min_mean_curvature_node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", content = "value", rename_all = "snake_case")
)]
pub enum TailFit {
    /// `f^2 - 1` is below round-off over the fitted range.
    Flat,
    Exponent(f64),
}

impl TailFit {
    pub fn exponent(&self) -> Option<f64> {
        match self {
            TailFit::Flat => None,
            TailFit::Exponent(e) => Some(*e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AfReport {
    pub norm: f64,
    pub norm_error: f64,
    pub tail: TailFit,
    pub passed: bool,
}

/// Least-squares slope of `log|w|` against `log r` over the outer third of
/// the nodes, ignoring values below [`TAIL_FLOOR`].
pub fn fit_tail_exponent(r: &[f64], w: &[f64]) -> TailFit {
    let n = r.len();
    let start = (2 * n / 3).max(1);
    let pts: Vec<(f64, f64)> = (start..n)
        .filter(|&i| r[i] > 0.0 && w[i].abs() > TAIL_FLOOR)
        .map(|i| (r[i].ln(), w[i].abs().ln()))
        .collect();
    if pts.len() < 3 {
        return TailFit::Flat;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx))
    });
    TailFit::Exponent(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GridSpec, Stretching};
    use approx::assert_relative_eq;

    fn grid(n: usize, r_max: f64) -> Arc<RadialGrid> {
        Arc::new(
            GridSpec {
                intervals: n,
                r_max,
                stretching: Stretching::Sinh { scale: 2.0 },
            }
            .build()
            .unwrap(),
        )
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(smooth_cutoff(0.5), 0.0);
        assert_eq!(smooth_cutoff(1.0), 0.0);
        assert_eq!(smooth_cutoff(2.0), 1.0);
        assert_eq!(smooth_cutoff(7.0), 1.0);
        assert_relative_eq!(smooth_cutoff(2f64.sqrt()), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn flat_and_bump() {
        let g = grid(64, 20.0);
        let flat = ProfileSpec::flat(3).sample(&g).unwrap();
        assert!(flat.f().iter().all(|&f| f == 1.0));
        let bump = ProfileSpec::bump(0.5, 2.0, 3).sample(&g).unwrap();
        assert_eq!(bump.f()[0], 1.0);
        let r1 = g.nodes()[1];
        let w1 = bump.w()[1];
        let exact = 0.5 * r1 * r1 * (-r1 * r1 / 4.0).exp() / (1.0 + r1 * r1);
        assert_relative_eq!(w1, exact, max_relative = 1e-12);
    }

    #[test]
    fn rejects_invalid_specs() {
        let g = grid(32, 10.0);
        assert!(ProfileSpec::bump(-1.0, 2.0, 3).sample(&g).is_err());
        assert!(ProfileSpec::bump(0.5, 0.0, 3).sample(&g).is_err());
        assert!(ProfileSpec::flat(2).sample(&g).is_err());
        let bad_tail = ProfileSpec::new(
            ProfileFamily::MassTail {
                mass: 0.1,
                decay: Some(0.5),
                cutoff: 1.0,
            },
            3,
        );
        assert!(bad_tail.sample(&g).is_err());
        let short = ProfileSpec::new(
            ProfileFamily::Table {
                values: alloc::vec![1.0; 5],
            },
            3,
        );
        assert!(matches!(
            short.sample(&g),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn minimal_sphere_threshold() {
        let g = grid(32, 10.0);
        let mut values = alloc::vec![1.0; g.len()];
        values[7] = 1e6;
        let p = ProfileSpec::new(ProfileFamily::Table { values }, 3)
            .sample(&g)
            .unwrap();
        let rep = p.check_no_minimal_sphere(10.0);
        assert!(!rep.passed);
        assert_eq!(rep.worst_node, 7);
    }
}
