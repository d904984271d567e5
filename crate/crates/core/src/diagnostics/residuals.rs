//! Residuals of the evolution equations satisfied by derived quantities,
//! evaluated on stored snapshots with centred time differences.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::diagnostics::barrier_functions;
use crate::diagnostics::curvature::sectional_field;
use crate::{
    three_point_weights, Error, MetricProfile, RadialGrid, Result, StencilSet, Trajectory,
};

/// Radial window over which residuals are maximised.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    /// Defaults to four times the first positive node.
    pub r_min: Option<f64>,
    /// Defaults to excluding the last two nodes.
    pub r_max: Option<f64>,
}

impl Region {
    /// Default window of `coarse`. Its ends are coarse nodes, so every grid
    /// nested in `coarse` samples the residual over the same radii.
    pub fn nested_in(coarse: &RadialGrid) -> Self {
        let r = coarse.nodes();
        Self {
            r_min: Some(4.0 * r[1]),
            r_max: Some(r[r.len() - 3]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Auxiliary {
    U,
    V,
    Y,
}

/// Max-norm residual at each interior output time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResidualSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
}

impl ResidualSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, nan_max)
    }

    /// Max over the entries stored at one of `times`.
    pub fn max_at(&self, times: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&self.times)
            .filter(|(_, t)| times.iter().any(|s| same_time(*s, **t)))
            .map(|(v, _)| *v)
            .fold(0.0, nan_max)
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Residual maxima of one equation on successively refined runs.
///
/// `runs[0]` is the coarsest; later grids must be nested in it and store
/// every coarse output time. Residuals are compared over the coarse window
/// of [`Region::nested_in`] at the coarse interior output times.
pub fn refinement_errors<F>(runs: &[Trajectory], residual: F) -> Result<Vec<f64>>
where
    F: Fn(&Trajectory, Region) -> Result<ResidualSeries>,
{
    let Some(coarse) = runs.first() else {
        return Ok(Vec::new());
    };
    let region = Region::nested_in(coarse.grid());
    let times = residual(coarse, region)?.times;
    runs.iter()
        .map(|t| Ok(residual(t, region)?.max_at(&times)))
        .collect()
}

/// Observed order `log2(e_coarse / e_fine)` for successive halvings.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

struct Ctx<'a> {
    st: StencilSet,
    traj: &'a Trajectory,
    lo: usize,
    hi: usize,
    r_min: f64,
    r_max: f64,
}

impl<'a> Ctx<'a> {
    fn new(traj: &'a Trajectory, region: Region) -> Result<Self> {
        if traj.snapshots.len() < 3 {
            return Err(Error::TooFewSnapshots {
                needed: 3,
                found: traj.snapshots.len(),
            });
        }
        let r = traj.grid().nodes();
        let last = r.len() - 1;
        let r_min = region.r_min.unwrap_or(4.0 * r[1]);
        let r_max = region.r_max.unwrap_or(r[last - 2]);
        let lo = r.partition_point(|&x| x < r_min * (1.0 - 1e-12)).max(1);
        let hi = r.partition_point(|&x| x <= r_max * (1.0 + 1e-12)).min(last);
        Ok(Self {
            st: StencilSet::new(traj.grid()),
            traj,
            lo,
            hi,
            r_min,
            r_max,
        })
    }

    /// Applies `residual(k, i, q, q_t)` for every interior output time.
    fn run<Q, F>(&self, quantity: Q, mut residual: F) -> Result<ResidualSeries>
    where
        Q: Fn(&MetricProfile) -> Result<Vec<f64>>,
        F: FnMut(&MetricProfile, &[f64], usize, f64) -> f64,
    {
        let snaps = &self.traj.snapshots;
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(3);
        for s in &snaps[..2] {
            q.push(quantity(s)?);
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for k in 1..snaps.len() - 1 {
            q.push(quantity(&snaps[k + 1])?);
            let (a, b, c) = (snaps[k - 1].t(), snaps[k].t(), snaps[k + 1].t());
            let (w, _) = three_point_weights(a, b, c, b);
            let mut worst: f64 = 0.0;
            for i in self.lo..self.hi {
                let qt = w[0] * q[0][i] + w[1] * q[1][i] + w[2] * q[2][i];
                let res = residual(&snaps[k], &q[1], i, qt);
                worst = if res.is_nan() {
                    f64::NAN
                } else {
                    worst.max(res.abs())
                };
            }
            times.push(b);
            values.push(worst);
            q.remove(0);
        }
        Ok(ResidualSeries {
            times,
            values,
            r_min: self.r_min,
            r_max: self.r_max,
        })
    }
}

/// Residual of `w_t = w_rr/f^2 - 3 w_r^2/(2 f^4) + ((n-2)/r - 1/(r f^2)) w_r - 2(n-2) w/r^2`.
pub fn residual_w_equation(traj: &Trajectory, region: Region) -> Result<ResidualSeries> {
    let ctx = Ctx::new(traj, region)?;
    let nm2 = traj.dimension() as f64 - 2.0;
    ctx.run(
        |p| Ok(p.w()),
        |p, w, i, wt| {
            let (r, f) = (p.r()[i], p.f()[i]);
            let f2 = f * f;
            let wr = ctx.st.first_at(w, i);
            let wrr = ctx.st.second_at(w, i);
            let rhs = wrr / f2 - 1.5 * wr * wr / (f2 * f2) + (nm2 / r - 1.0 / (r * f2)) * wr
                - 2.0 * nm2 * w[i] / (r * r);
            wt - rhs
        },
    )
}

/// Residual of the evolution equation of `u_m`, `v_m` or `y_m` (`0 < m < 2`).
pub fn residual_auxiliary_pdes(
    traj: &Trajectory,
    which: Auxiliary,
    m: f64,
    region: Region,
) -> Result<ResidualSeries> {
    if !(m > 0.0 && m < 2.0) {
        return Err(Error::OutOfRange {
            what: "barrier exponent m",
            value: m,
            lo: 0.0,
            hi: 2.0,
        });
    }
    let ctx = Ctx::new(traj, region)?;
    let n = traj.dimension() as f64;
    let st = &ctx.st;
    let quantity = |p: &MetricProfile| -> Result<Vec<f64>> {
        let b = barrier_functions(p, st, m)?;
        Ok(match which {
            Auxiliary::U => b.u,
            Auxiliary::V => b.v,
            Auxiliary::Y => b.y,
        })
    };
    ctx.run(quantity, |p, q, i, qt| {
        let (r, f, t) = (p.r()[i], p.f()[i], p.t());
        let tt = 1.0 + t;
        let f2 = f * f;
        let f4 = f2 * f2;
        let s = r.powf(m) + r * r;
        let rho = r.powf(2.0 - m);
        let dq = 2.0 * r + m * r.powf(m - 1.0);
        let x = q[i];
        let xr = st.first_at(q, i);
        let xrr = st.second_at(q, i);
        let rhs = match which {
            Auxiliary::U => {
                let c1 = (4.0 - m) * (m + n - 2.0) + m * (n - 2.0);
                let c3 = (m - 2.0) * (m + n - 2.0) - m * (m / 2.0 + n - 2.0);
                xrr / f2 - s / (2.0 * tt) * xr * xr - dq / tt * x * xr
                    + (2.0 * dq / (s * f2) - 1.0 / (r * f2) + (n - 2.0) / r) * xr
                    - (2.0 - m) * (m + n - 2.0) / (r * r * (1.0 + rho)) * x
                    + ((x - c1 * x * x) / (1.0 + rho)
                        + rho / (1.0 + rho) * (x - 2.0 * (n - 1.0) * x * x)
                        + r.powf(m - 2.0) / (1.0 + rho) * c3 * x * x)
                        / tt
            }
            Auxiliary::V => {
                xrr / f2 - 3.0 * s / (2.0 * f4 * tt) * xr * xr
                    + (2.0 * dq / (s * f2) - 3.0 * dq * x / (tt * f4) + (n - 2.0) / r
                        - 1.0 / (r * f2))
                        * xr
                    + (1.0 - 3.0 * dq * dq / (2.0 * s * f4) * x) * x / tt
                    + (m - 2.0) / (r * r) * (r.powf(m) / s) * (n - 2.0 + m / f2) * x
            }
            Auxiliary::Y => {
                let rm = r.powf(m);
                let k = rho / (1.0 + rho);
                let alpha = 2.0 * s * x / (f * tt) + (4.0 * m - 3.0) / f2 - 2.0 * m / f + n
                    - 2.0
                    - 2.0 * (m - 2.0) * k / f2;
                let beta = (7.0 * m * m - 14.0 * m + 4.0) / f2 - m * (6.0 * m - 8.0) / f
                    + (n - 2.0) * (m - 1.0 - 3.0 / f2)
                    + (m - 2.0) * k * (-(3.0 * m - 2.0) / f2 + 2.0 * m / f - (n - 2.0));
                let gamma = (1.0 / s)
                    * (1.0 / f - 1.0)
                    * (2.0 * m * (m - 1.0) * (m - 2.0) / f2
                        + 2.0 * m * m * (2.0 - m) / f
                        + (n - 2.0) * (-m + (m + 2.0) / f + 2.0 * (1.0 - m) / f2));
                let quad = ((2.0 / f) * (2.0 * (m - 1.0) * rm + m * r * r) * x + r * r) * x / tt;
                xrr / f2 + alpha * xr / r + (quad + beta * x + tt * gamma) / (r * r)
            }
        };
        qt - rhs
    })
}

/// Residual of `R_t = Delta R + xi(R) + 2|Ric|^2` in the symmetric reduction:
/// `Delta R = R_rr/f^2 - f_r R_r/f^3 + (n-1) R_r/(r f^2)`, `xi(R) = xi_1 R_r / f^2`.
pub fn residual_scalar_evolution(traj: &Trajectory, region: Region) -> Result<ResidualSeries> {
    let ctx = Ctx::new(traj, region)?;
    let n = traj.dimension();
    let nf = n as f64;
    let st = &ctx.st;
    ctx.run(
        |p| {
            let (l1, l2) = sectional_field(p, st);
            Ok(l1
                .iter()
                .zip(&l2)
                .map(|(a, b)| crate::diagnostics::curvature::scalar_curvature(*a, *b, n))
                .collect())
        },
        |p, scal, i, rt| {
            let (r, f) = (p.r()[i], p.f()[i]);
            let f2 = f * f;
            let fr = st.first_at(p.f(), i);
            let (l1, l2) = crate::diagnostics::curvature::sectional_curvatures(r, f, fr);
            let rr = st.first_at(scal, i);
            let rrr = st.second_at(scal, i);
            let lap = rrr / f2 - fr * rr / (f2 * f) + (nf - 1.0) * rr / (r * f2);
            let xi1 = (nf - 2.0) * (f - 1.0) * (f + 1.0) / r + fr / f;
            let orb = l1 + (nf - 2.0) * l2;
            let ric2 = (nf - 1.0) * (nf - 1.0) * l1 * l1 + (nf - 1.0) * orb * orb;
            rt - (lap + xi1 * rr / f2 + 2.0 * ric2)
        },
    )
}
