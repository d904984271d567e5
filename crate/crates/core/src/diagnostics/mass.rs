use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::diagnostics::curvature::sectional_field;
use crate::diagnostics::BoundLedger;
use crate::profile::{fit_tail_exponent, TailFit};
use crate::{
    gauss_legendre, sphere_volume, Error, MetricProfile, MonotoneCubic, Result, StencilSet,
    Trajectory,
};

/// Quasi-local mass inside the round sphere `r = b`:
/// `mu = b^{n-2} (1 - 1/f(b)) vol(S^{n-1})`, with `f(b)` by monotone cubic interpolation.
pub fn quasilocal_mass(profile: &MetricProfile, b: f64) -> Result<f64> {
    let r_max = profile.grid().r_max();
    if !(b > 0.0 && b <= r_max) {
        return Err(Error::OutOfRange {
            what: "sphere radius",
            value: b,
            lo: 0.0,
            hi: r_max,
        });
    }
    let fb = MonotoneCubic::new(profile.r(), profile.f())?.eval(b);
    Ok(quasilocal_mass_value(b, fb, profile.dimension()))
}

#[inline]
pub fn quasilocal_mass_value(b: f64, fb: f64, n: usize) -> f64 {
    b.powi(n as i32 - 2) * (1.0 - 1.0 / fb) * sphere_volume(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", content = "value", rename_all = "snake_case")
)]
pub enum SphereFamily {
    FixedArea(f64),
    FixedVolume(f64),
    FixedProperRadius(f64),
}

impl SphereFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SphereFamily::FixedArea(_) => "fixed_area",
            SphereFamily::FixedVolume(_) => "fixed_volume",
            SphereFamily::FixedProperRadius(_) => "fixed_proper_radius",
        }
    }

    /// A-priori bracket `[C-_b, C+_b]` of the family radius from the ledger's
    /// bounds on `f^2`.
    pub fn radius_bounds(&self, ledger: &BoundLedger) -> (f64, f64) {
        let (lo, hi) = (ledger.c_f2_minus, ledger.c_f2_plus);
        match *self {
            SphereFamily::FixedArea(b0) => (b0, b0),
            SphereFamily::FixedVolume(v0) => {
                let n = ledger.dimension;
                let s = n as f64 * v0 / sphere_volume(n);
                ((s / hi).powf(1.0 / n as f64), (s / lo).powf(1.0 / n as f64))
            }
            SphereFamily::FixedProperRadius(r0) => (r0 / hi, r0 / lo),
        }
    }
}

/// Radius of the family's sphere on this snapshot. The defining integrals
/// use Gauss-Legendre quadrature of the monotone cubic interpolant of `f`
/// and the root is found by bisection.
pub fn sphere_family_radius(profile: &MetricProfile, family: SphereFamily) -> Result<f64> {
    let n = profile.dimension();
    let (target, weight): (f64, fn(f64, usize) -> f64) = match family {
        SphereFamily::FixedArea(b0) => {
            let r_max = profile.grid().r_max();
            if !(b0 > 0.0 && b0 <= r_max) {
                return Err(Error::OutOfRange {
                    what: "fixed area radius",
                    value: b0,
                    lo: 0.0,
                    hi: r_max,
                });
            }
            return Ok(b0);
        }
        SphereFamily::FixedVolume(v0) => (v0, |r, n| sphere_volume(n) * r.powi(n as i32 - 1)),
        SphereFamily::FixedProperRadius(r0) => (r0, |_, _| 1.0),
    };
    if !(target > 0.0) {
        return Err(Error::OutOfRange {
            what: "sphere family target",
            value: target,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let interp = MonotoneCubic::new(profile.r(), profile.f())?;
    let r = profile.r();
    let (gx, gw) = gauss_legendre(6);
    let segment = |a: f64, b: f64| -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        gx.iter()
            .zip(&gw)
            .map(|(x, w)| {
                let s = mid + half * x;
                w * interp.eval(s) * weight(s, n)
            })
            .sum::<f64>()
            * half
    };
    let mut cumulative = Vec::with_capacity(r.len());
    cumulative.push(0.0);
    for i in 1..r.len() {
        let prev = cumulative[i - 1];
        cumulative.push(prev + segment(r[i - 1], r[i]));
    }
    let total = cumulative[r.len() - 1];
    if target > total {
        return Err(Error::TargetNotBracketed {
            target,
            available: total,
        });
    }
    let i = cumulative.partition_point(|&c| c < target).max(1) - 1;
    let (mut lo, mut hi) = (r[i], r[i + 1]);
    let base = cumulative[i];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if base + segment(r[i], mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AdmStatus {
    Converged,
    /// The tail is below round-off; the mass is 0.
    FlatTail,
    /// The tail decays slower than `r^{2-n}`; the mass is undefined.
    SlowTail,
    /// Successive extrapolants oscillate; the value is withheld.
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmEstimate {
    pub value: Option<f64>,
    pub error_bar: f64,
    pub status: AdmStatus,
    pub tail_exponent: Option<f64>,
}

const ADM_EXPONENT_TOLERANCE: f64 = 0.1;

/// ADM mass `(n-1) vol(S^{n-1}) lim r^{n-2} (f^2 - 1)`.
///
/// `q = r^{n-2} w` is sampled on the outer quarter of the grid and every
/// pair of neighbours is extrapolated with `q = L + c/r`. The reported value
/// is the outermost extrapolant; the error bar is the spread of the outer
/// half of the extrapolants plus the propagated round-off of `w`.
pub fn adm_mass(profile: &MetricProfile) -> AdmEstimate {
    let n = profile.dimension();
    let (r, f) = (profile.r(), profile.f());
    let w = profile.w();
    let scale = (n as f64 - 1.0) * sphere_volume(n);
    let tail = fit_tail_exponent(r, &w);
    let exponent = tail.exponent();
    match tail {
        TailFit::Flat => {
            return AdmEstimate {
                value: Some(0.0),
                error_bar: 0.0,
                status: AdmStatus::FlatTail,
                tail_exponent: None,
            }
        }
        TailFit::Exponent(e) if e > 2.0 - n as f64 + ADM_EXPONENT_TOLERANCE => {
            return AdmEstimate {
                value: None,
                error_bar: f64::INFINITY,
                status: AdmStatus::SlowTail,
                tail_exponent: exponent,
            }
        }
        _ => {}
    }
    let len = r.len();
    let start = (3 * (len - 1) / 4).max(1);
    let q: Vec<f64> = (start..len)
        .map(|i| r[i].powi(n as i32 - 2) * w[i])
        .collect();
    let dq: Vec<f64> = (start..len)
        .map(|i| r[i].powi(n as i32 - 2) * 4.0 * f64::EPSILON * f[i] * f[i])
        .collect();
    let rs = &r[start..];
    let mut est = Vec::with_capacity(q.len() - 1);
    let mut floor: f64 = 0.0;
    for k in 0..q.len() - 1 {
        let (ra, rb) = (rs[k], rs[k + 1]);
        est.push((rb * q[k + 1] - ra * q[k]) / (rb - ra));
        floor = floor.max((rb * dq[k + 1] + ra * dq[k]) / (rb - ra));
    }
    let value = est[est.len() - 1];
    let diffs: Vec<f64> = est.windows(2).map(|p| p[1] - p[0]).collect();
    let significant: Vec<f64> = diffs
        .iter()
        .copied()
        .filter(|d| d.abs() > 2.0 * floor)
        .collect();
    let sign_changes = significant.windows(2).filter(|p| p[0] * p[1] < 0.0).count();
    if significant.len() >= 4 && 2 * sign_changes > significant.len() {
        return AdmEstimate {
            value: None,
            error_bar: f64::INFINITY,
            status: AdmStatus::Oscillating,
            tail_exponent: exponent,
        };
    }
    let half = est.len() / 2;
    let spread = est[half..]
        .iter()
        .map(|e| (e - value).abs())
        .fold(0.0, f64::max);
    AdmEstimate {
        value: Some(scale * value),
        error_bar: scale * (spread + floor),
        status: AdmStatus::Converged,
        tail_exponent: exponent,
    }
}

/// Quasi-local and ADM mass at one output time.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassSample {
    pub t: f64,
    /// Radius of the family's sphere.
    pub b: f64,
    pub mu: f64,
    /// `lambda_2` at `b`, interpolated from the node values.
    pub lambda2: f64,
    pub adm: AdmEstimate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassSeries {
    pub family: SphereFamily,
    /// `[C-_b, C+_b]` from the ledger.
    pub b_bounds: (f64, f64),
    pub samples: Vec<MassSample>,
}

pub fn mass_series(
    traj: &Trajectory,
    family: SphereFamily,
    ledger: &BoundLedger,
) -> Result<MassSeries> {
    let st = StencilSet::new(traj.grid());
    let samples = traj
        .snapshots
        .iter()
        .map(|p| {
            let b = sphere_family_radius(p, family)?;
            let (_, l2) = sectional_field(p, &st);
            Ok(MassSample {
                t: p.t(),
                b,
                mu: quasilocal_mass(p, b)?,
                lambda2: MonotoneCubic::new(p.r(), &l2)?.eval(b),
                adm: adm_mass(p),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MassSeries {
        family,
        b_bounds: family.radius_bounds(ledger),
        samples,
    })
}
