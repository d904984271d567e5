//! Checks of trajectories against the ledger bounds.

use alloc::string::String;
use alloc::vec::Vec;

use crate::diagnostics::{barrier_functions, curvature_field, BoundLedger, MassSeries};
use crate::{Error, Result, StencilSet, Trajectory};

/// Additive tolerances for each checked quantity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Allowances {
    pub w: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub scalar: f64,
    /// Applied to `sup|Rm| (1+t)`.
    pub rm: f64,
    pub u: f64,
    pub v: f64,
    pub y: f64,
}

impl Allowances {
    pub fn uniform(eps: f64) -> Self {
        Self {
            w: eps,
            lambda1: eps,
            lambda2: eps,
            scalar: eps,
            rm: eps,
            u: eps,
            v: eps,
            y: eps,
        }
    }

    /// `multiplier` times the Richardson error estimate `|fine - coarse| / 3`
    /// of each quantity, maximised over shared nodes and output times.
    ///
    /// `fine` must live on the twice-refined grid of `coarse` and share its
    /// output times.
    pub fn from_self_convergence(
        fine: &Trajectory,
        coarse: &Trajectory,
        multiplier: f64,
    ) -> Result<Self> {
        let (gf, gc) = (fine.grid(), coarse.grid());
        if gf.intervals() != 2 * gc.intervals() {
            return Err(Error::InvalidGrid(
                "self-convergence needs a grid refined by exactly 2".into(),
            ));
        }
        let nested = gc
            .nodes()
            .iter()
            .enumerate()
            .all(|(i, r)| (gf.nodes()[2 * i] - r).abs() <= 1e-12 * r.max(1.0));
        if !nested {
            return Err(Error::InvalidGrid("grids are not nested".into()));
        }
        let count = fine.snapshots.len().min(coarse.snapshots.len());
        if count == 0 {
            return Err(Error::TooFewSnapshots {
                needed: 1,
                found: 0,
            });
        }
        let (sf, sc) = (StencilSet::new(gf), StencilSet::new(gc));
        let mut d = Allowances::default();
        let bump = |acc: &mut f64, a: &[f64], b: &[f64]| {
            for (i, bv) in b.iter().enumerate() {
                let x = (a[2 * i] - bv).abs();
                if x.is_finite() {
                    *acc = acc.max(x);
                }
            }
        };
        for k in 0..count {
            let (pf, pc) = (&fine.snapshots[k], &coarse.snapshots[k]);
            if (pf.t() - pc.t()).abs() > 1e-9 * pf.t().max(1.0) {
                return Err(Error::InvalidConfig(
                    "output times differ between runs".into(),
                ));
            }
            let scale = 1.0 + pf.t();
            bump(&mut d.w, &pf.w(), &pc.w());
            let (cf, cc) = (curvature_field(pf, &sf), curvature_field(pc, &sc));
            bump(&mut d.lambda1, &cf.lambda1, &cc.lambda1);
            bump(&mut d.lambda2, &cf.lambda2, &cc.lambda2);
            bump(&mut d.scalar, &cf.scalar, &cc.scalar);
            d.rm = d.rm.max((cf.sup_rm() - cc.sup_rm()).abs() * scale);
            let (bf, bc) = (
                barrier_functions(pf, &sf, 2.0)?,
                barrier_functions(pc, &sc, 2.0)?,
            );
            bump(&mut d.u, &bf.u, &bc.u);
            bump(&mut d.v, &bf.v, &bc.v);
            bump(&mut d.y, &bf.y, &bc.y);
        }
        let s = multiplier / 3.0;
        Ok(Self {
            w: d.w * s,
            lambda1: d.lambda1 * s,
            lambda2: d.lambda2 * s,
            scalar: d.scalar * s,
            rm: d.rm * s,
            u: d.u * s,
            v: d.v * s,
            y: d.y * s,
        })
    }
}

/// Result of one bound over a whole trajectory.
///
/// `margin` is the smallest slack (bound minus value, oriented so that a
/// negative margin means the raw bound is violated); the check passes when
/// `margin + allowance >= 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub allowance: f64,
    pub worst_t: f64,
    pub worst_r: f64,
}

struct Tracker {
    name: &'static str,
    allowance: f64,
    margin: f64,
    t: f64,
    r: f64,
}

impl Tracker {
    fn new(name: &'static str, allowance: f64) -> Self {
        Self {
            name,
            allowance,
            margin: f64::INFINITY,
            t: f64::NAN,
            r: f64::NAN,
        }
    }

    #[inline]
    fn see(&mut self, margin: f64, t: f64, r: f64) {
        // NaN margins count as failures
        if !(margin >= self.margin) {
            self.margin = if margin.is_nan() {
                f64::NEG_INFINITY
            } else {
                margin
            };
            self.t = t;
            self.r = r;
        }
    }

    fn finish(self) -> BoundCheck {
        BoundCheck {
            name: self.name.into(),
            passed: self.margin + self.allowance >= 0.0,
            margin: self.margin,
            allowance: self.allowance,
            worst_t: self.t,
            worst_r: self.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub checks: Vec<BoundCheck>,
    /// `(t, sup_r |Rm| (1+t))` per output time.
    pub rm_scaled: Vec<(f64, f64)>,
    /// Largest `sup|Rm| (1+t)` over `t <= 1`.
    pub rm_early_max: f64,
}

impl DecayReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Factor on the early-time maximum of `sup|Rm|(1+t)` allowed for `t >= 1`.
pub const RM_GROWTH_FACTOR: f64 = 1.1;

/// Sectional and scalar curvature against their `C/(1+t)` bounds, and
/// `sup|Rm|(1+t)` against the ledger constant and against its own
/// maximum over `t <= 1`.
pub fn verify_decay(traj: &Trajectory, ledger: &BoundLedger, eps: &Allowances) -> DecayReport {
    let st = StencilSet::new(traj.grid());
    let r = traj.grid().nodes();
    let mut l2lo = Tracker::new("lambda2_lower", eps.lambda2);
    let mut l2hi = Tracker::new("lambda2_upper", eps.lambda2);
    let mut l1lo = Tracker::new("lambda1_lower", eps.lambda1);
    let mut l1hi = Tracker::new("lambda1_upper", eps.lambda1);
    let mut rlo = Tracker::new("scalar_lower", eps.scalar);
    let mut rm0 = Tracker::new("rm_ledger", eps.rm);
    let mut rm_scaled = Vec::with_capacity(traj.snapshots.len());
    for p in &traj.snapshots {
        let t = p.t();
        let s = 1.0 / (1.0 + t);
        let c = curvature_field(p, &st);
        for i in 0..r.len() {
            l2lo.see(c.lambda2[i] - ledger.c_lambda2_minus * s, t, r[i]);
            l2hi.see(ledger.c_lambda2_plus * s - c.lambda2[i], t, r[i]);
            l1lo.see(c.lambda1[i] - ledger.c_lambda1_minus * s, t, r[i]);
            l1hi.see(ledger.c_lambda1_plus * s - c.lambda1[i], t, r[i]);
            rlo.see(c.scalar[i] - ledger.c_r_minus * s, t, r[i]);
        }
        let scaled = c.sup_rm() * (1.0 + t);
        rm0.see(ledger.c0 - scaled, t, f64::NAN);
        rm_scaled.push((t, scaled));
    }
    let rm_early_max = rm_scaled
        .iter()
        .filter(|(t, _)| *t <= 1.0 + 1e-12)
        .map(|x| x.1)
        .fold(0.0, f64::max);
    let mut checks = alloc::vec![
        l2lo.finish(),
        l2hi.finish(),
        l1lo.finish(),
        l1hi.finish(),
        rlo.finish(),
        rm0.finish(),
    ];
    if rm_scaled.iter().any(|(t, _)| *t >= 1.0 - 1e-12) {
        let mut grow = Tracker::new("rm_growth", 0.0);
        for &(t, v) in rm_scaled.iter().filter(|(t, _)| *t >= 1.0 - 1e-12) {
            grow.see(RM_GROWTH_FACTOR * rm_early_max - v, t, f64::NAN);
        }
        checks.push(grow.finish());
    }
    DecayReport {
        checks,
        rm_scaled,
        rm_early_max,
    }
}

/// Barrier bounds at `m = 2` plus the identity `u_2 = -v_2/f^2`.
pub fn verify_barriers(
    traj: &Trajectory,
    ledger: &BoundLedger,
    eps: &Allowances,
) -> Result<Vec<BoundCheck>> {
    let st = StencilSet::new(traj.grid());
    let r = traj.grid().nodes();
    let mut u = Tracker::new("u2_upper", eps.u);
    let mut v = Tracker::new("v2_upper", eps.v);
    let mut y = Tracker::new("y2_lower", eps.y);
    let mut ident = Tracker::new("u2_v2_identity", 0.0);
    for p in &traj.snapshots {
        let b = barrier_functions(p, &st, 2.0)?;
        let f = p.f();
        for i in 0..r.len() {
            u.see(ledger.c_u_plus - b.u[i], p.t(), r[i]);
            v.see(ledger.c_v_plus - b.v[i], p.t(), r[i]);
            y.see(b.y[i] - ledger.c_y_minus, p.t(), r[i]);
            let tol = 1e-13 * b.u[i].abs().max(1e-3);
            ident.see(tol - (b.u[i] + b.v[i] / (f[i] * f[i])).abs(), p.t(), r[i]);
        }
    }
    Ok(alloc::vec![
        u.finish(),
        v.finish(),
        y.finish(),
        ident.finish()
    ])
}

/// Maximum principle for `w = f^2 - 1` and the implied bracket on `f^2`.
pub fn verify_max_principle(
    traj: &Trajectory,
    ledger: &BoundLedger,
    eps: &Allowances,
) -> Vec<BoundCheck> {
    let r = traj.grid().nodes();
    let w0 = traj.initial().w();
    let sup0 = w0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf0 = w0.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = Tracker::new("w_sup", eps.w);
    let mut lo = Tracker::new("w_inf", eps.w);
    let mut f2hi = Tracker::new("f2_upper", eps.w);
    let mut f2lo = Tracker::new("f2_lower", eps.w);
    for p in &traj.snapshots {
        for (i, (&w, &f)) in p.w().iter().zip(p.f()).enumerate() {
            hi.see(sup0 - w, p.t(), r[i]);
            lo.see(w - inf0, p.t(), r[i]);
            f2hi.see(ledger.c_f2_plus - f * f, p.t(), r[i]);
            f2lo.see(f * f - ledger.c_f2_minus, p.t(), r[i]);
        }
    }
    alloc::vec![hi.finish(), lo.finish(), f2hi.finish(), f2lo.finish()]
}

/// Factor on `|mu|(1+t)` at `t = 1` allowed for later times.
pub const QUASILOCAL_GROWTH_FACTOR: f64 = 1.2;

/// Quasi-local mass decay, the sign link `sign(mu) = sign(lambda_2(b))` and
/// the a-priori bracket on `b(t)`.
///
/// Signs only count as mismatched where `|lambda_2|` exceeds its allowance.
pub fn verify_quasilocal(series: &MassSeries, eps: &Allowances) -> Vec<BoundCheck> {
    let s = &series.samples;
    let at_one = s
        .iter()
        .filter(|x| x.t >= 1.0 - 1e-9)
        .map(|x| x.mu.abs() * (1.0 + x.t))
        .next();
    let mut decay = Tracker::new("mu_decay", 0.0);
    let mut sign = Tracker::new("mu_sign", 0.0);
    let mut bracket = Tracker::new("b_bracket", 1e-9);
    let (lo, hi) = series.b_bounds;
    for x in s {
        if let Some(c) = at_one.filter(|_| x.t >= 1.0 - 1e-9) {
            decay.see(
                QUASILOCAL_GROWTH_FACTOR * c - x.mu.abs() * (1.0 + x.t),
                x.t,
                x.b,
            );
        }
        let agree = x.mu.signum() == x.lambda2.signum() || x.lambda2.abs() <= eps.lambda2;
        sign.see(if agree { 0.0 } else { -x.lambda2.abs() }, x.t, x.b);
        bracket.see((x.b - lo).min(hi - x.b), x.t, x.b);
    }
    alloc::vec![decay.finish(), sign.finish(), bracket.finish()]
}

/// `|mass(t) - mass(0)| / |mass(0)| <= rel_tol` at every output time, with
/// `mass(0)` taken from the first sample. A withheld estimate fails.
pub fn verify_adm_constancy(series: &MassSeries, rel_tol: f64) -> BoundCheck {
    let mut c = Tracker::new("adm_constancy", 0.0);
    let m0 = series.samples.first().and_then(|x| x.adm.value);
    for x in &series.samples {
        let margin = match (m0, x.adm.value) {
            (Some(a), Some(b)) if a != 0.0 => rel_tol - ((b - a) / a).abs(),
            (Some(a), Some(b)) => rel_tol - (b - a).abs(),
            _ => f64::NAN,
        };
        c.see(margin, x.t, f64::NAN);
    }
    c.finish()
}
