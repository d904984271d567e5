//! A-priori constants computed from the initial data.

use crate::diagnostics::{barrier_functions, curvature_field};
use crate::{MetricProfile, Result, StencilSet};
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Every constant of the decay theory, evaluated on initial data.
///
/// The naming is `c_<quantity>_<plus|minus>` for upper and lower bounds.
/// Bounds on curvature and barrier functions at time `t` are these constants
/// divided by `1 + t` (barrier functions already carry that factor).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundLedger {
    pub dimension: usize,
    pub c_f2_minus: f64,
    pub c_f2_plus: f64,
    pub c_w_minus: f64,
    pub c_w_plus: f64,
    pub c_u_plus: f64,
    pub c_u_minus: f64,
    pub c_u: f64,
    pub c_v_plus: f64,
    pub c_r_minus: f64,
    pub k1: f64,
    pub k2: f64,
    pub c_y_threshold: f64,
    pub c_y_minus: f64,
    pub c_lambda2_minus: f64,
    pub c_lambda2_plus: f64,
    pub c_lambda1_minus: f64,
    pub c_lambda1_plus: f64,
    /// `sqrt(2(n-1) L1^2 + (n-1)(n-2) L2^2)` with `Li` the larger of `|c_lambdai_minus|`, `|c_lambdai_plus|`.
    pub c0: f64,
}

pub fn bound_ledger(initial: &MetricProfile, st: &StencilSet) -> Result<BoundLedger> {
    let n = initial.dimension();
    let f = initial.f();
    let (c_f2_minus, c_f2_plus) = f
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v * v), hi.max(v * v))
        });
    let barrier = barrier_functions(initial, st, 2.0)?;
    let curv = curvature_field(initial, st);
    let sup_u = barrier.sup_u();
    let sup_v = barrier.sup_v();
    let inf_y = barrier.inf_y();
    let inf_r = curv.min_scalar();
    Ok(ledger_from_extrema(
        n, c_f2_minus, c_f2_plus, sup_u, sup_v, inf_y, inf_r,
    ))
}

/// Ledger constants from the extrema of the initial data.
pub fn ledger_from_extrema(
    n: usize,
    c_f2_minus: f64,
    c_f2_plus: f64,
    sup_u2: f64,
    sup_v2: f64,
    inf_y2: f64,
    inf_scalar: f64,
) -> BoundLedger {
    let nf = n as f64;
    let c_w_minus = c_f2_minus - 1.0;
    let c_w_plus = c_f2_plus - 1.0;
    let c_u_plus = (1.0 / (2.0 * (nf - 1.0))).max(sup_u2);
    let c_v_plus = (c_f2_plus * c_f2_plus / 6.0).max(sup_v2);
    let c_u_minus = -c_v_plus / c_f2_minus;
    let c_u = c_u_plus.abs().max(c_u_minus.abs());
    let c_r_minus = (-nf / 2.0).min(inf_scalar);
    let c_f_minus = c_f2_minus.sqrt();
    let c_f_plus = c_f2_plus.sqrt();
    let k1 = c_u * c_u * (1.0 / c_f_minus + 2.0 * (nf - 2.0));
    let k2 = 8.0 * c_u;
    let c_y_threshold = ((1.0 - 2.0 * nf) / (4.0 * nf - 7.0) * c_u)
        .min(-(c_f_plus / 6.0) * (k2 + (k2 * k2 + 12.0 * k1 / c_f_minus).sqrt()));
    let c_y_minus = c_y_threshold.min(inf_y2);
    let c_lambda2_minus = -2.0 * c_u_plus;
    let c_lambda2_plus = 2.0 * c_v_plus / c_f2_minus;
    let c_lambda1_minus = c_r_minus / (2.0 * (nf - 1.0)) - (nf - 2.0) * c_v_plus / c_f2_minus;
    let c_lambda1_plus = 4.0 * c_v_plus / c_f2_minus - 2.0 * c_y_minus / c_f_minus;
    let l1 = c_lambda1_minus.abs().max(c_lambda1_plus.abs());
    let l2 = c_lambda2_minus.abs().max(c_lambda2_plus.abs());
    let c0 = (2.0 * (nf - 1.0) * l1 * l1 + (nf - 1.0) * (nf - 2.0) * l2 * l2).sqrt();
    BoundLedger {
        dimension: n,
        c_f2_minus,
        c_f2_plus,
        c_w_minus,
        c_w_plus,
        c_u_plus,
        c_u_minus,
        c_u,
        c_v_plus,
        c_r_minus,
        k1,
        k2,
        c_y_threshold,
        c_y_minus,
        c_lambda2_minus,
        c_lambda2_plus,
        c_lambda1_minus,
        c_lambda1_plus,
        c0,
    }
}

impl BoundLedger {
    pub fn c_f_minus(&self) -> f64 {
        self.c_f2_minus.sqrt()
    }

    pub fn c_f_plus(&self) -> f64 {
        self.c_f2_plus.sqrt()
    }

    /// Sign and ordering constraints every ledger satisfies.
    pub fn structurally_consistent(&self) -> bool {
        let n = self.dimension as f64;
        self.c_w_minus <= 0.0
            && self.c_w_plus >= 0.0
            && self.c_f2_minus > 0.0
            && self.c_u_plus >= 1.0 / (2.0 * (n - 1.0))
            && self.c_v_plus >= self.c_f2_plus * self.c_f2_plus / 6.0
            && self.c_r_minus <= -n / 2.0
            && self.c_y_minus <= 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_ledger() {
        let l = ledger_from_extrema(3, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(l.c_u_plus, 0.25);
        assert_relative_eq!(l.c_v_plus, 1.0 / 6.0);
        assert_eq!(l.c_r_minus, -1.5);
        assert_eq!(l.c_f2_minus, 1.0);
        assert!(l.structurally_consistent());
        assert_relative_eq!(l.c_lambda2_minus, -0.5);
        assert_relative_eq!(l.c_lambda2_plus, 1.0 / 3.0);
    }
}
