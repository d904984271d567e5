//! The master equation for `f` and its time integration.
//!
//! ```text
//! f_t = f_rr/f^2 - 2 f_r^2/f^3 + ((n-2)/r - 1/(r f^2)) f_r - (n-2)(f^2-1)/(r^2 f)
//! ```
//!
//! The origin is pinned to `f = 1` (the equation's own limit there is 0);
//! the outer node is set algebraically by the boundary mode.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::grid::MIN_SOLVER_INTERVALS;
use crate::profile::{fit_tail_exponent, TailFit};
use crate::{Error, MetricProfile, RadialGrid, Result, StencilSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stepper {
    #[default]
    ExplicitRk4,
    /// Crank-Nicolson on the frozen-coefficient linearisation, with one
    /// predictor-corrector pass to refresh the coefficients.
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum BoundaryMode {
    /// `f(r_max) = 1`.
    DirichletOne,
    /// `w_N = w_{N-1} (r_N / r_{N-1})^delta`. Without an exponent, delta is
    /// fitted to the initial tail (falling back to `2 - n` for a flat tail).
    TailExtrapolation {
        #[cfg_attr(feature = "serde", serde(default))]
        exponent: Option<f64>,
    },
}

impl Default for BoundaryMode {
    fn default() -> Self {
        BoundaryMode::TailExtrapolation { exponent: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    pub stepper: Stepper,
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Output cadence.
    pub dt_out: f64,
    pub f_cap: f64,
    pub boundary: BoundaryMode,
    /// Steps below this raise a step-underflow event.
    pub dt_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            stepper: Stepper::ExplicitRk4,
            cfl_safety: 0.5,
            t_end: 20.0,
            dt_out: 0.25,
            f_cap: 100.0,
            boundary: BoundaryMode::default(),
            dt_floor: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.dt_out > 0.0) || self.dt_out > self.t_end {
            return Err(Error::InvalidConfig(format!(
                "output cadence must lie in (0, t_end], got {}",
                self.dt_out
            )));
        }
        if !(self.f_cap > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "f_cap must exceed 1, got {}",
                self.f_cap
            )));
        }
        if !(self.dt_floor >= 0.0) {
            return Err(Error::InvalidConfig("dt_floor must be non-negative".into()));
        }
        if let BoundaryMode::TailExtrapolation { exponent: Some(d) } = self.boundary {
            if !(d < 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "tail exponent must be negative, got {d}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EventKind {
    Completed,
    BlowUp,
    MinimalSphereCap,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    /// Offending node, when there is one.
    pub node: Option<usize>,
    pub value: Option<f64>,
}

/// Output snapshots plus the terminal event.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<MetricProfile>,
    pub events: Vec<Event>,
    /// Tail exponent actually used by the boundary condition, if any.
    pub tail_exponent: Option<f64>,
    pub steps: u64,
}

impl Trajectory {
    pub fn from_snapshots(snapshots: Vec<MetricProfile>) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::TooFewSnapshots {
                needed: 1,
                found: 0,
            });
        }
        if snapshots.windows(2).any(|w| !(w[1].t() > w[0].t())) {
            return Err(Error::InvalidConfig(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        let t = snapshots[snapshots.len() - 1].t();
        Ok(Self {
            snapshots,
            events: vec![Event {
                t,
                kind: EventKind::Completed,
                node: None,
                value: None,
            }],
            tail_exponent: None,
            steps: 0,
        })
    }

    pub fn completed(&self) -> bool {
        matches!(self.terminal().map(|e| e.kind), Some(EventKind::Completed))
    }

    pub fn terminal(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn initial(&self) -> &MetricProfile {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &MetricProfile {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|p| p.t()).collect()
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.snapshots[0].grid()
    }

    pub fn dimension(&self) -> usize {
        self.snapshots[0].dimension()
    }
}

/// Pointwise right-hand side at `r > 0` from `f`, `f_r`, `f_rr`.
#[inline]
pub fn master_rhs_point(r: f64, f: f64, fr: f64, frr: f64, n: usize) -> f64 {
    let nm2 = n as f64 - 2.0;
    let f2 = f * f;
    frr / f2 - 2.0 * fr * fr / (f2 * f) + (nm2 / r - 1.0 / (r * f2)) * fr
        - nm2 * (f - 1.0) * (f + 1.0) / (r * r * f)
}

/// Master right-hand side on raw node values. Node 0 gets its limit 0;
/// node `N` is left at 0 because the boundary mode sets it algebraically.
pub fn master_rhs(r: &[f64], st: &StencilSet, f: &[f64], n: usize, out: &mut [f64]) -> Result<()> {
    if let Some((node, &value)) = f
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(Error::NonPositiveMetric { node, value });
    }
    let last = f.len() - 1;
    out[0] = 0.0;
    out[last] = 0.0;
    for i in 1..last {
        out[i] = master_rhs_point(r[i], f[i], st.first_at(f, i), st.second_at(f, i), n);
    }
    Ok(())
}

pub fn rhs_master(profile: &MetricProfile, st: &StencilSet) -> Result<Vec<f64>> {
    let mut out = vec![0.0; profile.f().len()];
    master_rhs(profile.r(), st, profile.f(), profile.dimension(), &mut out)?;
    Ok(out)
}

/// Radial component `xi_1 = (n-2)(f^2-1)/r + f_r/f` of the DeTurck 1-form.
pub fn deturck_vector(profile: &MetricProfile, st: &StencilSet) -> Vec<f64> {
    let (r, f) = (profile.r(), profile.f());
    let nm2 = profile.dimension() as f64 - 2.0;
    (0..f.len())
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                nm2 * (f[i] - 1.0) * (f[i] + 1.0) / r[i] + st.first_at(f, i) / f[i]
            }
        })
        .collect()
}

/// Stable step for the given stepper: `sigma * min(gap^2 f^2)/2` over
/// interior nodes for RK4, `sigma * min(gap)` for the semi-implicit stepper.
pub fn stable_dt(grid: &RadialGrid, f: &[f64], sigma: f64, stepper: Stepper) -> f64 {
    let r = grid.nodes();
    let last = r.len() - 1;
    match stepper {
        Stepper::ExplicitRk4 => {
            (1..last)
                .map(|i| {
                    let h = (r[i] - r[i - 1]).min(r[i + 1] - r[i]);
                    h * h * f[i] * f[i]
                })
                .fold(f64::INFINITY, f64::min)
                * sigma
                / 2.0
        }
        Stepper::SemiImplicit => sigma * grid.min_gap(),
    }
}

struct Integrator<'a> {
    r: &'a [f64],
    st: StencilSet,
    n: usize,
    boundary: ResolvedBoundary,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

#[derive(Clone, Copy)]
enum ResolvedBoundary {
    Dirichlet,
    Tail { ratio: f64 },
}

impl<'a> Integrator<'a> {
    fn apply_boundary(&self, f: &mut [f64]) {
        let last = f.len() - 1;
        f[0] = 1.0;
        match self.boundary {
            ResolvedBoundary::Dirichlet => f[last] = 1.0,
            ResolvedBoundary::Tail { ratio } => {
                let w = (f[last - 1] - 1.0) * (f[last - 1] + 1.0) * ratio;
                f[last] = (1.0 + w).max(0.0).sqrt();
            }
        }
    }

    fn rk4(&mut self, f: &mut [f64], dt: f64) -> Result<()> {
        let len = f.len();
        master_rhs(self.r, &self.st, f, self.n, &mut self.k[0])?;
        for (stage, c) in [(1, 0.5), (2, 0.5), (3, 1.0)] {
            for i in 0..len {
                self.tmp[i] = f[i] + c * dt * self.k[stage - 1][i];
            }
            let mut tmp = core::mem::take(&mut self.tmp);
            self.apply_boundary(&mut tmp);
            let res = master_rhs(self.r, &self.st, &tmp, self.n, &mut self.k[stage]);
            self.tmp = tmp;
            res?;
        }
        for i in 0..len {
            f[i] +=
                dt / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
        self.apply_boundary(f);
        Ok(())
    }

    /// Assembles `L(c) f = A f_rr + B f_r + C (f - 1)` with coefficients frozen at `c`.
    fn linear_rows(&self, c: &[f64]) -> (Vec<[f64; 3]>, Vec<f64>) {
        let len = c.len();
        let last = len - 1;
        let nm2 = self.n as f64 - 2.0;
        let mut rows = vec![[0.0; 3]; len];
        let mut shift = vec![0.0; len];
        for i in 1..last {
            let (r, f) = (self.r[i], c[i]);
            let f2 = f * f;
            let fr = self.st.first_at(c, i);
            let a = 1.0 / f2;
            let b = nm2 / r - 1.0 / (r * f2) - 2.0 * fr / (f2 * f);
            let cc = -nm2 * (f + 1.0) / (r * r * f);
            let d1 = self.st.first_weights(i);
            let d2 = self.st.second_weights(i);
            for j in 0..3 {
                rows[i][j] = a * d2[j] + b * d1[j];
            }
            rows[i][1] += cc;
            shift[i] = -cc;
        }
        (rows, shift)
    }

    fn crank_nicolson(&self, f: &[f64], c: &[f64], dt: f64) -> Vec<f64> {
        let len = f.len();
        let last = len - 1;
        let (rows, shift) = self.linear_rows(c);
        let mut lower = vec![0.0; len];
        let mut diag = vec![1.0; len];
        let mut upper = vec![0.0; len];
        let mut rhs = vec![0.0; len];
        rhs[0] = 1.0;
        for i in 1..last {
            let lf = rows[i][0] * f[i - 1] + rows[i][1] * f[i] + rows[i][2] * f[i + 1] + shift[i];
            rhs[i] = f[i] + 0.5 * dt * lf + 0.5 * dt * shift[i];
            lower[i] = -0.5 * dt * rows[i][0];
            diag[i] = 1.0 - 0.5 * dt * rows[i][1];
            upper[i] = -0.5 * dt * rows[i][2];
        }
        match self.boundary {
            ResolvedBoundary::Dirichlet => rhs[last] = 1.0,
            ResolvedBoundary::Tail { ratio } => {
                // w_N = ratio w_{N-1}, linearised about c
                let k = ratio * (c[last - 1] + 1.0) / (c[last] + 1.0);
                lower[last] = -k;
                rhs[last] = 1.0 - k;
            }
        }
        thomas(&lower, &diag, &upper, &mut rhs);
        rhs
    }

    fn semi_implicit(&self, f: &mut [f64], dt: f64) -> Result<()> {
        let mut pred = self.crank_nicolson(f, f, dt);
        self.apply_boundary(&mut pred);
        check_positive(&pred)?;
        let mid: Vec<f64> = f.iter().zip(&pred).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut next = self.crank_nicolson(f, &mid, dt);
        self.apply_boundary(&mut next);
        check_positive(&next)?;
        f.copy_from_slice(&next);
        Ok(())
    }
}

fn check_positive(f: &[f64]) -> Result<()> {
    match f
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        Some((node, &value)) => Err(Error::NonPositiveMetric { node, value }),
        None => Ok(()),
    }
}

// Tridiagonal solve in place; row i couples (i-1, i, i+1), row 0 and row N
// use only their diagonal and one neighbour.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    c[0] = upper[0] / d;
    rhs[0] /= d;
    for i in 1..n {
        d = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / d;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Tail exponent the boundary mode will use for this initial profile.
pub fn resolve_tail_exponent(initial: &MetricProfile, mode: BoundaryMode) -> Option<f64> {
    match mode {
        BoundaryMode::DirichletOne => None,
        BoundaryMode::TailExtrapolation { exponent: Some(d) } => Some(d),
        BoundaryMode::TailExtrapolation { exponent: None } => {
            Some(match fit_tail_exponent(initial.r(), &initial.w()) {
                TailFit::Exponent(e) if e < 0.0 => e,
                _ => 2.0 - initial.dimension() as f64,
            })
        }
    }
}

/// Integrates the master equation from `initial` to `config.t_end`.
///
/// Snapshots are stored every `dt_out` (the last interval may be shorter).
/// Within an interval the step is the stable step rounded down so that a
/// whole number of steps fills it; stored times are the accumulated sums.
/// Failures after the start are recorded as terminal events and the partial
/// trajectory is returned.
pub fn evolve(initial: &MetricProfile, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let grid = Arc::clone(initial.grid());
    if grid.intervals() < MIN_SOLVER_INTERVALS {
        return Err(Error::InvalidGrid(format!(
            "the solver needs at least {MIN_SOLVER_INTERVALS} intervals, got {}",
            grid.intervals()
        )));
    }
    let start = initial.check_no_minimal_sphere(config.f_cap);
    if !start.passed {
        return Err(Error::InvalidProfile(format!(
            "initial f = {} at r = {} exceeds f_cap = {}",
            start.max_f, start.worst_radius, config.f_cap
        )));
    }
    let n = initial.dimension();
    let r = grid.nodes();
    let len = r.len();
    let tail_exponent = resolve_tail_exponent(initial, config.boundary);
    let boundary = match tail_exponent {
        None => ResolvedBoundary::Dirichlet,
        Some(exponent) => ResolvedBoundary::Tail {
            ratio: (r[len - 1] / r[len - 2]).powf(exponent),
        },
    };
    let mut integ = Integrator {
        r,
        st: StencilSet::new(&grid),
        n,
        boundary,
        k: [
            vec![0.0; len],
            vec![0.0; len],
            vec![0.0; len],
            vec![0.0; len],
        ],
        tmp: vec![0.0; len],
    };

    // The first snapshot is the initial data as given; the boundary mode
    // only acts on the evolved state.
    let mut snapshots = vec![initial.clone()];
    let mut f = initial.f().to_vec();
    integ.apply_boundary(&mut f);
    let t0 = initial.t();
    let mut t = t0;
    let mut events = Vec::new();
    let mut steps = 0u64;

    let intervals = ((config.t_end / config.dt_out) - 1e-9).ceil().max(1.0) as usize;
    'outer: for k in 1..=intervals {
        let target = t0 + (k as f64 * config.dt_out).min(config.t_end);
        let span = target - t;
        let dt_stable = stable_dt(&grid, &f, config.cfl_safety, config.stepper);
        if !(dt_stable >= config.dt_floor) || dt_stable == 0.0 {
            events.push(Event {
                t,
                kind: EventKind::StepUnderflow,
                node: None,
                value: Some(dt_stable),
            });
            break;
        }
        let count = (span / dt_stable).ceil().max(1.0) as u64;
        let dt = span / count as f64;
        for _ in 0..count {
            let res = match config.stepper {
                Stepper::ExplicitRk4 => integ.rk4(&mut f, dt),
                Stepper::SemiImplicit => integ.semi_implicit(&mut f, dt),
            };
            steps += 1;
            if let Err(e) = res {
                let (node, value) = match e {
                    Error::NonPositiveMetric { node, value } => (Some(node), Some(value)),
                    _ => (None, None),
                };
                events.push(Event {
                    t,
                    kind: EventKind::BlowUp,
                    node,
                    value,
                });
                break 'outer;
            }
            t += dt;
            if let Err(Error::NonPositiveMetric { node, value }) = check_positive(&f) {
                events.push(Event {
                    t,
                    kind: EventKind::BlowUp,
                    node: Some(node),
                    value: Some(value),
                });
                break 'outer;
            }
            let (node, max_f) = max_with_index(&f);
            if max_f > config.f_cap {
                events.push(Event {
                    t,
                    kind: EventKind::MinimalSphereCap,
                    node: Some(node),
                    value: Some(max_f),
                });
                break 'outer;
            }
        }
        snapshots.push(MetricProfile::from_parts(
            Arc::clone(&grid),
            f.clone(),
            t,
            n,
        ));
    }
    if events.is_empty() {
        events.push(Event {
            t,
            kind: EventKind::Completed,
            node: None,
            value: None,
        });
    }
    Ok(Trajectory {
        snapshots,
        events,
        tail_exponent,
        steps,
    })
}

fn max_with_index(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |a, (i, x)| if x > a.1 { (i, x) } else { a },
    )
}
