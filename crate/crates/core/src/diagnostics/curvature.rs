use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::{MetricProfile, StencilSet};

/// Curvature of `g = f^2 dr^2 + r^2 g_can` at every node of one snapshot.
///
/// `ric_rr` and `ric_orb` are the coefficients of `Ric = ric_rr dr^2 + ric_orb g_can`.
/// `rm_norm` follows `|Rm|^2 = 2(n-1) lambda1^2 + (n-1)(n-2) lambda2^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub t: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub scalar: Vec<f64>,
    pub rm_norm: Vec<f64>,
    /// `H = 1/(r f)`; infinite at the origin.
    pub mean_curvature: Vec<f64>,
    pub ric_rr: Vec<f64>,
    pub ric_orb: Vec<f64>,
}

/// `(lambda1, lambda2)` from `f` and `f_r` at `r > 0`.
#[inline]
pub fn sectional_curvatures(r: f64, f: f64, fr: f64) -> (f64, f64) {
    let f2 = f * f;
    (fr / (r * f2 * f), (f - 1.0) * (f + 1.0) / (f2 * r * r))
}

#[inline]
pub fn scalar_curvature(l1: f64, l2: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n - 1.0) * l1 + (n - 1.0) * (n - 2.0) * l2
}

#[inline]
pub fn rm_norm(l1: f64, l2: f64, n: usize) -> f64 {
    let n = n as f64;
    (2.0 * (n - 1.0) * l1 * l1 + (n - 1.0) * (n - 2.0) * l2 * l2).sqrt()
}

/// Sectional curvatures at every node. The origin uses the parity limits
/// `lambda1(0) = f_rr(0)` and `lambda2(0) = lim (1 - 1/f^2)/r^2`, both
/// taken through the even-extension stencil.
pub fn sectional_field(profile: &MetricProfile, st: &StencilSet) -> (Vec<f64>, Vec<f64>) {
    let (r, f) = (profile.r(), profile.f());
    let len = f.len();
    let mut l1 = Vec::with_capacity(len);
    let mut l2 = Vec::with_capacity(len);
    let f0 = f[0];
    l1.push(st.second_at(f, 0) / (f0 * f0 * f0));
    let g1 = 1.0 - 1.0 / (f[1] * f[1]);
    l2.push(g1 / (r[1] * r[1]));
    for i in 1..len {
        let (a, b) = sectional_curvatures(r[i], f[i], st.first_at(f, i));
        l1.push(a);
        l2.push(b);
    }
    (l1, l2)
}

pub fn curvature_field(profile: &MetricProfile, st: &StencilSet) -> CurvatureField {
    let n = profile.dimension();
    let nf = n as f64;
    let (r, f) = (profile.r(), profile.f());
    let (lambda1, lambda2) = sectional_field(profile, st);
    let len = f.len();
    let mut scalar = Vec::with_capacity(len);
    let mut rm = Vec::with_capacity(len);
    let mut h = Vec::with_capacity(len);
    let mut ric_rr = Vec::with_capacity(len);
    let mut ric_orb = Vec::with_capacity(len);
    for i in 0..len {
        let (l1, l2) = (lambda1[i], lambda2[i]);
        scalar.push(scalar_curvature(l1, l2, n));
        rm.push(rm_norm(l1, l2, n));
        h.push(if i == 0 {
            f64::INFINITY
        } else {
            1.0 / (r[i] * f[i])
        });
        let f2 = f[i] * f[i];
        ric_rr.push((nf - 1.0) * f2 * l1);
        // r^2 times the orbital Ricci eigenvalue l1 + (n-2) l2
        ric_orb.push(r[i] * r[i] * (l1 + (nf - 2.0) * l2));
    }
    CurvatureField {
        t: profile.t(),
        lambda1,
        lambda2,
        scalar,
        rm_norm: rm,
        mean_curvature: h,
        ric_rr,
        ric_orb,
    }
}

impl CurvatureField {
    pub fn sup_rm(&self) -> f64 {
        self.rm_norm.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_scalar(&self) -> f64 {
        self.scalar.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GridSpec, ProfileSpec, Stretching};
    use alloc::sync::Arc;
    use approx::assert_relative_eq;

    #[test]
    fn flat_space() {
        let g = Arc::new(GridSpec::default().build().unwrap());
        let st = StencilSet::new(&g);
        let p = ProfileSpec::flat(4).sample(&g).unwrap();
        let c = curvature_field(&p, &st);
        assert!(c
            .lambda1
            .iter()
            .chain(&c.lambda2)
            .chain(&c.scalar)
            .all(|&v| v == 0.0));
        assert!(c
            .ric_rr
            .iter()
            .chain(&c.ric_orb)
            .chain(&c.rm_norm)
            .all(|&v| v == 0.0));
        for (i, r) in g.nodes().iter().enumerate().skip(1) {
            assert_relative_eq!(c.mean_curvature[i], 1.0 / r);
        }
    }

    #[test]
    fn ricci_components_match_direct_formulas() {
        let g = Arc::new(
            GridSpec {
                intervals: 64,
                r_max: 10.0,
                stretching: Stretching::Sinh { scale: 2.0 },
            }
            .build()
            .unwrap(),
        );
        let st = StencilSet::new(&g);
        let n = 5;
        let p = ProfileSpec::bump(0.4, 1.5, n).sample(&g).unwrap();
        let c = curvature_field(&p, &st);
        for i in 1..g.len() {
            let (r, f) = (g.nodes()[i], p.f()[i]);
            let fr = st.first_at(p.f(), i);
            assert_relative_eq!(c.ric_rr[i], 4.0 * fr / (r * f), max_relative = 1e-12);
            let orb = 3.0 * (1.0 - 1.0 / (f * f)) + r * fr / (f * f * f);
            assert_relative_eq!(c.ric_orb[i], orb, max_relative = 1e-10, epsilon = 1e-14);
        }
    }
}
