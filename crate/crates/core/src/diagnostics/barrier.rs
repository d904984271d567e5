use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::{Error, MetricProfile, Result, StencilSet};

/// Barrier functions of one snapshot for a fixed exponent `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierField {
    pub t: f64,
    pub m: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub y: Vec<f64>,
}

/// Pointwise `(u_m, v_m, y_m)` at `r > 0`:
///
/// ```text
/// u_m = (1+t)(1/f^2 - 1)/(r^m + r^2)
/// v_m = (1+t)(f^2 - 1)/(r^m + r^2)
/// y_m = (1+t)/(1 + r^{2-m}) * r d/dr[r^{-m}(1/f - 1)]
/// ```
#[inline]
pub fn barrier_point(r: f64, f: f64, fr: f64, t: f64, m: f64) -> (f64, f64, f64) {
    let s = r.powf(m) + r * r;
    let f2 = f * f;
    let w = (f - 1.0) * (f + 1.0);
    let u = (1.0 + t) * (-w / f2) / s;
    let v = (1.0 + t) * w / s;
    let y = (1.0 + t) / (1.0 + r.powf(2.0 - m))
        * (-m * r.powf(-m) * (1.0 / f - 1.0) - r.powf(1.0 - m) * fr / f2);
    (u, v, y)
}

/// Barrier functions at every node. At the origin they vanish for `m < 2`;
/// for `m = 2` the parity limits are used.
pub fn barrier_functions(profile: &MetricProfile, st: &StencilSet, m: f64) -> Result<BarrierField> {
    if !(m > 0.0 && m <= 2.0) {
        return Err(Error::OutOfRange {
            what: "barrier exponent m",
            value: m,
            lo: 0.0,
            hi: 2.0,
        });
    }
    let (r, f, t) = (profile.r(), profile.f(), profile.t());
    let len = f.len();
    let mut u = Vec::with_capacity(len);
    let mut v = Vec::with_capacity(len);
    let mut y = Vec::with_capacity(len);
    if m < 2.0 {
        u.push(0.0);
        v.push(0.0);
        y.push(0.0);
    } else {
        // (1 - 1/f^2)/r^2, (1 - 1/f)/r^2 and f_r/(r f^2) at r -> 0
        let r1 = r[1];
        let l2 = (1.0 - 1.0 / (f[1] * f[1])) / (r1 * r1);
        let a = (1.0 - 1.0 / f[1]) / (r1 * r1);
        let l1 = st.second_at(f, 0);
        let f0 = f[0];
        u.push(-(1.0 + t) * l2 / 2.0);
        v.push((1.0 + t) * f0 * f0 * l2 / 2.0);
        y.push((1.0 + t) / 2.0 * (2.0 * a - l1 / (f0 * f0)));
    }
    for i in 1..len {
        let (a, b, c) = barrier_point(r[i], f[i], st.first_at(f, i), t, m);
        u.push(a);
        v.push(b);
        y.push(c);
    }
    Ok(BarrierField { t, m, u, v, y })
}

impl BarrierField {
    pub fn sup_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_v(&self) -> f64 {
        self.v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf_y(&self) -> f64 {
        self.y.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
