//! Hamilton-DeTurck flow of `g = delta + h` on a cube in `R^3`, used to
//! cross-check the radial solver on short runs.
//!
//! In Cartesian coordinates with the flat background the flow reads
//!
//! ```text
//! d_t h_ij = g^pq d_p d_q h_ij + Q_ij(g^-1, dh)
//! Q_ij = 1/2 g^pq g^rs ( d_i h_rp d_j h_sq + 2 d_p h_jr d_s h_iq - 2 d_p h_jr d_q h_is
//!                        - 2 d_j h_rp d_q h_is - 2 d_i h_rp d_q h_js )
//! ```
//!
//! Boundary faces are frozen. Spatial derivatives in the right-hand side are
//! second-order centred; the curvature diagnostics use fourth-order stencils.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::diagnostics::curvature_field;
use crate::flow::{deturck_vector, evolve, SolverConfig};
use crate::{Error, MetricProfile, MonotoneCubic, Result, StencilSet};

pub type Mat3 = [[f64; 3]; 3];

/// Storage order of the six independent components.
pub const COMPONENTS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

#[inline]
pub fn unpack(h: &[f64; 6]) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for (s, &(i, j)) in COMPONENTS.iter().enumerate() {
        m[i][j] = h[s];
        m[j][i] = h[s];
    }
    m
}

#[inline]
fn pack(m: &Mat3) -> [f64; 6] {
    let mut h = [0.0; 6];
    for (s, &(i, j)) in COMPONENTS.iter().enumerate() {
        h[s] = m[i][j];
    }
    h
}

#[inline]
fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

/// Inverse of a symmetric positive definite matrix, `None` otherwise.
pub fn spd_inverse(g: &Mat3) -> Option<Mat3> {
    let m1 = g[0][0];
    let m2 = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let c00 = g[1][1] * g[2][2] - g[1][2] * g[2][1];
    let c01 = g[1][2] * g[2][0] - g[1][0] * g[2][2];
    let c02 = g[1][0] * g[2][1] - g[1][1] * g[2][0];
    let det = g[0][0] * c00 + g[0][1] * c01 + g[0][2] * c02;
    if !(m1 > 0.0 && m2 > 0.0 && det > 0.0) {
        return None;
    }
    let inv = 1.0 / det;
    Some([
        [
            c00 * inv,
            (g[0][2] * g[2][1] - g[0][1] * g[2][2]) * inv,
            (g[0][1] * g[1][2] - g[0][2] * g[1][1]) * inv,
        ],
        [
            c01 * inv,
            (g[0][0] * g[2][2] - g[0][2] * g[2][0]) * inv,
            (g[0][2] * g[1][0] - g[0][0] * g[1][2]) * inv,
        ],
        [
            c02 * inv,
            (g[0][1] * g[2][0] - g[0][0] * g[2][1]) * inv,
            (g[0][0] * g[1][1] - g[0][1] * g[1][0]) * inv,
        ],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CartesianConfig {
    /// Cells per axis; even, so the origin is a node.
    pub cells: usize,
    pub half_width: f64,
    /// Fraction of the conservative explicit step `h^2/12 * min(1/tr g, 1/tr g^-1)`.
    pub cfl_safety: f64,
    /// Accuracy of the centred differences in the right-hand side.
    #[cfg_attr(feature = "serde", serde(default))]
    pub order: StencilOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StencilOrder {
    Second,
    #[default]
    Fourth,
}

impl StencilOrder {
    fn frozen_layer(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }
}

impl Default for CartesianConfig {
    fn default() -> Self {
        Self {
            cells: 48,
            half_width: 8.0,
            cfl_safety: 1.0,
            order: StencilOrder::default(),
        }
    }
}

impl CartesianConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cells < 8 || self.cells % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "cells per axis must be even and at least 8, got {}",
                self.cells
            )));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "half width must be positive, got {}",
                self.half_width
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }
}

/// `h_ij` at the nodes of `[-L, L]^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianState {
    pub config: CartesianConfig,
    pub t: f64,
    pub h: Vec<[f64; 6]>,
}

impl CartesianState {
    pub fn side(&self) -> usize {
        self.config.cells + 1
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let s = self.side();
        (i * s + j) * s + k
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -self.config.half_width + i as f64 * self.config.spacing()
    }

    pub fn origin(&self) -> usize {
        let c = self.config.cells / 2;
        self.index(c, c, c)
    }

    /// Flat metric.
    pub fn flat(config: CartesianConfig) -> Result<Self> {
        config.validate()?;
        let s = config.cells + 1;
        Ok(Self {
            config,
            t: 0.0,
            h: vec![[0.0; 6]; s * s * s],
        })
    }

    /// Pullback of `f^2 dr^2 + r^2 g_can`: `h_ij = (f^2 - 1) x_i x_j / r^2`.
    pub fn from_profile(profile: &MetricProfile, config: CartesianConfig) -> Result<Self> {
        config.validate()?;
        if profile.dimension() != 3 {
            return Err(Error::InvalidProfile(format!(
                "the Cartesian solver is three-dimensional, profile has n = {}",
                profile.dimension()
            )));
        }
        let need = 3f64.sqrt() * config.half_width;
        let have = profile.grid().r_max();
        if have < need * (1.0 - 1e-12) {
            return Err(Error::Coverage {
                required: need,
                available: have,
            });
        }
        let interp = MonotoneCubic::new(profile.r(), &profile.w())?;
        let mut state = Self::flat(config)?;
        let s = state.side();
        let xs: Vec<f64> = (0..s).map(|i| state.coordinate(i)).collect();
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let x = [xs[i], xs[j], xs[k]];
                    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                    let idx = state.index(i, j, k);
                    if r2 == 0.0 {
                        continue;
                    }
                    let w = interp.eval(r2.sqrt()) / r2;
                    for (c, &(a, b)) in COMPONENTS.iter().enumerate() {
                        state.h[idx][c] = w * x[a] * x[b];
                    }
                }
            }
        }
        Ok(state)
    }

    pub fn metric(&self, idx: usize) -> Mat3 {
        let mut g = unpack(&self.h[idx]);
        for (a, row) in g.iter_mut().enumerate() {
            row[a] += 1.0;
        }
        g
    }

    pub fn sup_abs_h(&self) -> f64 {
        self.h
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Largest deviation from invariance under coordinate reflections and
    /// axis transpositions.
    pub fn symmetry_residual(&self) -> f64 {
        let s = self.side();
        let mut worst: f64 = 0.0;
        // each generator maps node (i,j,k) and tensor indices
        type NodeMap = fn([usize; 3], usize) -> [usize; 3];
        let gens: [(NodeMap, [usize; 3], [f64; 3]); 5] = [
            (
                |p, s| [s - 1 - p[0], p[1], p[2]],
                [0, 1, 2],
                [-1.0, 1.0, 1.0],
            ),
            (
                |p, s| [p[0], s - 1 - p[1], p[2]],
                [0, 1, 2],
                [1.0, -1.0, 1.0],
            ),
            (
                |p, s| [p[0], p[1], s - 1 - p[2]],
                [0, 1, 2],
                [1.0, 1.0, -1.0],
            ),
            (|p, _| [p[1], p[0], p[2]], [1, 0, 2], [1.0; 3]),
            (|p, _| [p[0], p[2], p[1]], [0, 2, 1], [1.0; 3]),
        ];
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let here = unpack(&self.h[self.index(i, j, k)]);
                    for (map, perm, sign) in gens.iter() {
                        let q = map([i, j, k], s);
                        let there = unpack(&self.h[self.index(q[0], q[1], q[2])]);
                        for a in 0..3 {
                            for b in 0..3 {
                                let expect = sign[a] * sign[b] * here[a][b];
                                worst = worst.max((there[perm[a]][perm[b]] - expect).abs());
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

/// First and second derivatives of the six components at an interior node
/// by second-order centred differences.
fn derivatives2(
    state: &CartesianState,
    i: usize,
    j: usize,
    k: usize,
) -> ([Mat3; 3], [[Mat3; 3]; 3]) {
    let h = state.config.spacing();
    let s = state.side();
    let stride = [s * s, s, 1];
    let c = state.index(i, j, k);
    let at = |idx: usize| &state.h[idx];
    let mut d1 = [[[0.0; 3]; 3]; 3];
    let mut d2 = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        let (p, m) = (c + stride[a], c - stride[a]);
        let mut v1 = [0.0; 6];
        let mut v2 = [0.0; 6];
        for q in 0..6 {
            v1[q] = (at(p)[q] - at(m)[q]) / (2.0 * h);
            v2[q] = (at(p)[q] - 2.0 * at(c)[q] + at(m)[q]) / (h * h);
        }
        d1[a] = unpack(&v1);
        d2[a][a] = unpack(&v2);
        for b in a + 1..3 {
            let (sa, sb) = (stride[a], stride[b]);
            let mut v = [0.0; 6];
            for q in 0..6 {
                v[q] = (at(c + sa + sb)[q] - at(c + sa - sb)[q] - at(c - sa + sb)[q]
                    + at(c - sa - sb)[q])
                    / (4.0 * h * h);
            }
            d2[a][b] = unpack(&v);
            d2[b][a] = d2[a][b];
        }
    }
    (d1, d2)
}

/// Pointwise Hamilton-DeTurck right-hand side from `g^-1`, `dh` and `ddh`.
pub fn deturck_rhs_point(gi: &Mat3, d1: &[Mat3; 3], d2: &[[Mat3; 3]; 3]) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    // principal part
    for p in 0..3 {
        for q in 0..3 {
            let c = gi[p][q];
            for a in 0..3 {
                for b in 0..3 {
                    out[a][b] += c * d2[p][q][a][b];
                }
            }
        }
    }
    // G D_a and G D_a G
    let gd: [Mat3; 3] = [mul(gi, &d1[0]), mul(gi, &d1[1]), mul(gi, &d1[2])];
    let gdg: [Mat3; 3] = [mul(&gd[0], gi), mul(&gd[1], gi), mul(&gd[2], gi)];
    // B_j[q][r] = sum_p G_qp (D_p)_jr
    let mut bm = [[[0.0; 3]; 3]; 3];
    for (j, bj) in bm.iter_mut().enumerate() {
        for q in 0..3 {
            for r in 0..3 {
                bj[q][r] = (0..3).map(|p| gi[q][p] * d1[p][j][r]).sum();
            }
        }
    }
    for &(i, j) in COMPONENTS.iter() {
        // T1 = tr(D_i G D_j G) = tr(GD_i GD_j)
        let t1: f64 = (0..3)
            .map(|a| (0..3).map(|b| gd[i][a][b] * gd[j][b][a]).sum::<f64>())
            .sum();
        let t2: f64 = (0..3)
            .map(|a| (0..3).map(|b| bm[j][a][b] * bm[i][b][a]).sum::<f64>())
            .sum();
        let mut t3 = 0.0;
        let mut t4 = 0.0;
        let mut t5 = 0.0;
        for q in 0..3 {
            for s in 0..3 {
                let grs: f64 = (0..3).map(|r| bm[j][q][r] * gi[r][s]).sum();
                t3 += grs * d1[q][i][s];
                t4 += gdg[j][s][q] * d1[q][i][s];
                t5 += gdg[i][s][q] * d1[q][j][s];
            }
        }
        let v = out[i][j] + 0.5 * t1 + t2 - t3 - t4 - t5;
        out[i][j] = v;
        out[j][i] = v;
    }
    out
}

/// Time derivative of `h` at every node; the frozen boundary layer (one
/// node deep for second order, two for fourth) gets zero.
pub fn rhs_deturck(state: &CartesianState) -> Result<Vec<[f64; 6]>> {
    let s = state.side();
    let layer = state.config.order.frozen_layer();
    let mut out = vec![[0.0; 6]; state.h.len()];
    for i in layer..s - layer {
        for j in layer..s - layer {
            for k in layer..s - layer {
                let idx = state.index(i, j, k);
                let gi = spd_inverse(&state.metric(idx))
                    .ok_or(Error::NotPositiveDefinite { node: idx })?;
                let (d1, d2) = match state.config.order {
                    StencilOrder::Second => derivatives2(state, i, j, k),
                    StencilOrder::Fourth => derivatives4(state, i, j, k),
                };
                out[idx] = pack(&deturck_rhs_point(&gi, &d1, &d2));
            }
        }
    }
    Ok(out)
}

/// `W^k = 1/2 g^ij g^kp (d_i h_jp + d_j h_ip - d_p h_ij)` at interior nodes.
pub fn deturck_w(state: &CartesianState) -> Result<Vec<[f64; 3]>> {
    let s = state.side();
    let mut out = vec![[0.0; 3]; state.h.len()];
    for i in 1..s - 1 {
        for j in 1..s - 1 {
            for k in 1..s - 1 {
                let idx = state.index(i, j, k);
                let gi = spd_inverse(&state.metric(idx))
                    .ok_or(Error::NotPositiveDefinite { node: idx })?;
                let (d1, _) = derivatives2(state, i, j, k);
                out[idx] = w_point(&gi, &d1);
            }
        }
    }
    Ok(out)
}

fn w_point(gi: &Mat3, d1: &[Mat3; 3]) -> [f64; 3] {
    // lowered: W_p = g^ij (d_i h_jp - 1/2 d_p h_ij)
    let mut low = [0.0; 3];
    for (p, lp) in low.iter_mut().enumerate() {
        for a in 0..3 {
            for b in 0..3 {
                *lp += gi[a][b] * (d1[a][b][p] - 0.5 * d1[p][a][b]);
            }
        }
    }
    let mut w = [0.0; 3];
    for (kk, wk) in w.iter_mut().enumerate() {
        *wk = (0..3).map(|p| gi[kk][p] * low[p]).sum();
    }
    w
}

/// Conservative explicit step: `sigma h^2/12 * min(1/tr g, 1/tr g^-1)` over all nodes.
pub fn stable_dt(state: &CartesianState) -> Result<f64> {
    let h = state.config.spacing();
    let mut worst = f64::INFINITY;
    for idx in 0..state.h.len() {
        let g = state.metric(idx);
        let gi = spd_inverse(&g).ok_or(Error::NotPositiveDefinite { node: idx })?;
        let tg = g[0][0] + g[1][1] + g[2][2];
        let tgi = gi[0][0] + gi[1][1] + gi[2][2];
        worst = worst.min((1.0 / tg).min(1.0 / tgi));
    }
    Ok(state.config.cfl_safety * h * h / 12.0 * worst)
}

/// Heun (RK2) steps to `t_end`; returns the step count.
pub fn advance(state: &mut CartesianState, t_end: f64) -> Result<u64> {
    let mut steps = 0;
    while state.t < t_end * (1.0 - 1e-14) {
        let dt = stable_dt(state)?.min(t_end - state.t);
        let k1 = rhs_deturck(state)?;
        let mut mid = state.clone();
        for (m, (h, k)) in mid.h.iter_mut().zip(state.h.iter().zip(&k1)) {
            for q in 0..6 {
                m[q] = h[q] + dt * k[q];
            }
        }
        let k2 = rhs_deturck(&mid)?;
        for (h, (a, b)) in state.h.iter_mut().zip(k1.iter().zip(&k2)) {
            for q in 0..6 {
                h[q] += 0.5 * dt * (a[q] + b[q]);
            }
        }
        state.t += dt;
        steps += 1;
    }
    Ok(steps)
}

/// Ricci tensor and scalar curvature from `g`, `dg` and `ddg` at a point.
pub fn ricci_point(g: &Mat3, d1: &[Mat3; 3], d2: &[[Mat3; 3]; 3]) -> Option<(Mat3, f64)> {
    let gi = spd_inverse(g)?;
    // lowered Christoffels G_lij = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    let mut low = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                low[l][i][j] = 0.5 * (d1[i][l][j] + d1[j][l][i] - d1[l][i][j]);
            }
        }
    }
    let mut gam = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                gam[k][i][j] = (0..3).map(|l| gi[k][l] * low[l][i][j]).sum();
            }
        }
    }
    // d_m g^kl = -g^ka d_m g_ab g^bl
    let dgi: [Mat3; 3] = [0, 1, 2].map(|m| {
        let t = mul(&mul(&gi, &d1[m]), &gi);
        t.map(|row| row.map(|v| -v))
    });
    // d_m Gamma^k_ij
    let dgam = |m: usize, k: usize, i: usize, j: usize| -> f64 {
        (0..3)
            .map(|l| {
                let dlow = 0.5 * (d2[m][i][l][j] + d2[m][j][l][i] - d2[m][l][i][j]);
                dgi[m][k][l] * low[l][i][j] + gi[k][l] * dlow
            })
            .sum()
    };
    let mut ric = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let mut v = 0.0;
            for k in 0..3 {
                v += dgam(k, k, i, j) - dgam(j, k, i, k);
                for l in 0..3 {
                    v += gam[k][k][l] * gam[l][i][j] - gam[k][j][l] * gam[l][i][k];
                }
            }
            ric[i][j] = v;
            ric[j][i] = v;
        }
    }
    let scalar = (0..3)
        .map(|i| (0..3).map(|j| gi[i][j] * ric[i][j]).sum::<f64>())
        .sum();
    Some((ric, scalar))
}

/// `|Rm|` in three dimensions from Ricci, normalised like the radial
/// `rm_norm`: `|Rm|^2 = (4 |Ric|^2 - R^2) / 2`.
pub fn rm_norm_3d(g: &Mat3, ric: &Mat3, scalar: f64) -> Option<f64> {
    let gi = spd_inverse(g)?;
    let a = mul(&gi, ric);
    let ric2: f64 = (0..3)
        .map(|i| (0..3).map(|j| a[i][j] * a[j][i]).sum::<f64>())
        .sum();
    Some(((4.0 * ric2 - scalar * scalar) / 2.0).max(0.0).sqrt())
}

const D1_4: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const D2_4: [f64; 5] = [
    -1.0 / 12.0,
    16.0 / 12.0,
    -30.0 / 12.0,
    16.0 / 12.0,
    -1.0 / 12.0,
];

/// Fourth-order derivatives of `g` at a node at least two cells from the boundary.
fn derivatives4(
    state: &CartesianState,
    i: usize,
    j: usize,
    k: usize,
) -> ([Mat3; 3], [[Mat3; 3]; 3]) {
    let h = state.config.spacing();
    let s = state.side();
    let stride = [(s * s) as isize, s as isize, 1isize];
    let c = state.index(i, j, k) as isize;
    let at = |idx: isize| &state.h[idx as usize];
    let mut d1 = [[[0.0; 3]; 3]; 3];
    let mut d2 = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        let mut v1 = [0.0; 6];
        let mut v2 = [0.0; 6];
        for (o, (w1, w2)) in D1_4.iter().zip(&D2_4).enumerate() {
            let val = at(c + (o as isize - 2) * stride[a]);
            for q in 0..6 {
                v1[q] += w1 * val[q] / h;
                v2[q] += w2 * val[q] / (h * h);
            }
        }
        d1[a] = unpack(&v1);
        d2[a][a] = unpack(&v2);
        for b in a + 1..3 {
            let mut v = [0.0; 6];
            for (oa, wa) in D1_4.iter().enumerate() {
                if *wa == 0.0 {
                    continue;
                }
                for (ob, wb) in D1_4.iter().enumerate() {
                    if *wb == 0.0 {
                        continue;
                    }
                    let val = at(c + (oa as isize - 2) * stride[a] + (ob as isize - 2) * stride[b]);
                    for q in 0..6 {
                        v[q] += wa * wb * val[q] / (h * h);
                    }
                }
            }
            d2[a][b] = unpack(&v);
            d2[b][a] = d2[a][b];
        }
    }
    (d1, d2)
}

/// Scalar curvature at the origin and `sup|Rm|` over nodes at least two
/// cells inside the cube.
pub fn curvature_summary(state: &CartesianState) -> Result<(f64, f64)> {
    let s = state.side();
    let c = state.config.cells / 2;
    let mut r_origin = f64::NAN;
    let mut sup_rm: f64 = 0.0;
    for i in 2..s - 2 {
        for j in 2..s - 2 {
            for k in 2..s - 2 {
                let idx = state.index(i, j, k);
                let g = state.metric(idx);
                let (d1, d2) = derivatives4(state, i, j, k);
                let (ric, scalar) =
                    ricci_point(&g, &d1, &d2).ok_or(Error::NotPositiveDefinite { node: idx })?;
                let rm =
                    rm_norm_3d(&g, &ric, scalar).ok_or(Error::NotPositiveDefinite { node: idx })?;
                sup_rm = sup_rm.max(rm);
                if (i, j, k) == (c, c, c) {
                    r_origin = scalar;
                }
            }
        }
    }
    Ok((r_origin, sup_rm))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrosscheckReport {
    pub t_check: f64,
    pub r_origin_1d: f64,
    pub r_origin_3d: f64,
    pub rel_diff: f64,
    pub sup_rm_1d: f64,
    pub sup_rm_3d: f64,
    pub rm_rel_diff: f64,
    pub cells: usize,
    pub half_width: f64,
    pub spacing: f64,
    pub steps_3d: u64,
    pub symmetry_residual: f64,
    /// Initial lowered radial `W` against the radial `xi` along the positive
    /// x axis, relative to `max|xi|`. The two vector fields belong to
    /// different gauges, so this is logged only.
    pub w_xi_axis_rel_diff: f64,
    /// Set when either solver stopped early; the numbers are then partial.
    pub failure: Option<alloc::string::String>,
}

// Difference relative to the radial value `a`.
fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs()
    }
}

fn axis_w_vs_xi(state: &CartesianState, profile: &MetricProfile, st: &StencilSet) -> Result<f64> {
    let xi = MonotoneCubic::new(profile.r(), &deturck_vector(profile, st))?;
    let w = deturck_w(state)?;
    let c = state.config.cells / 2;
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for i in c + 1..state.side() - 1 {
        let idx = state.index(i, c, c);
        let lowered = state.metric(idx)[0][0] * w[idx][0];
        let x = xi.eval(state.coordinate(i));
        diff = diff.max((lowered - x).abs());
        scale = scale.max(x.abs());
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Evolves `profile` with both solvers to `t_check` and compares `R` at the
/// origin and `sup|Rm|`.
pub fn crosscheck_run(
    profile: &MetricProfile,
    config: CartesianConfig,
    t_check: f64,
    radial: &SolverConfig,
) -> Result<CrosscheckReport> {
    if !(t_check > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "t_check must be positive, got {t_check}"
        )));
    }
    let radial_cfg = SolverConfig {
        t_end: t_check,
        dt_out: t_check,
        ..*radial
    };
    let traj = evolve(profile, &radial_cfg)?;
    let st = StencilSet::new(profile.grid());
    let c1 = curvature_field(traj.last(), &st);
    let reach = 3f64.sqrt() * config.half_width;
    let sup_rm_1d = c1
        .rm_norm
        .iter()
        .zip(profile.r())
        .filter(|(_, &r)| r <= reach)
        .map(|(v, _)| *v)
        .fold(0.0, f64::max);
    let r_origin_1d = c1.scalar[0];

    let mut state = CartesianState::from_profile(profile, config)?;
    let w_xi_axis_rel_diff = axis_w_vs_xi(&state, profile, &st)?;
    let mut failure =
        (!traj.completed()).then(|| format!("radial solver stopped: {:?}", traj.terminal()));
    let steps_3d = match advance(&mut state, t_check) {
        Ok(s) => s,
        Err(e) => {
            failure.get_or_insert(format!("Cartesian solver stopped at t = {}: {e}", state.t));
            0
        }
    };
    let (r_origin_3d, sup_rm_3d) = curvature_summary(&state).unwrap_or((f64::NAN, f64::NAN));
    Ok(CrosscheckReport {
        t_check,
        r_origin_1d,
        r_origin_3d,
        rel_diff: rel(r_origin_1d, r_origin_3d),
        sup_rm_1d,
        sup_rm_3d,
        rm_rel_diff: rel(sup_rm_1d, sup_rm_3d),
        cells: config.cells,
        half_width: config.half_width,
        spacing: config.spacing(),
        steps_3d,
        symmetry_residual: state.symmetry_residual(),
        w_xi_axis_rel_diff,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_roundtrip() {
        let g = [[2.0, 0.3, -0.1], [0.3, 1.5, 0.2], [-0.1, 0.2, 1.1]];
        let gi = spd_inverse(&g).unwrap();
        let e = mul(&g, &gi);
        for a in 0..3 {
            for b in 0..3 {
                assert_relative_eq!(e[a][b], if a == b { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
        assert!(spd_inverse(&[[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_none());
    }

    fn slot(i: usize, j: usize) -> usize {
        COMPONENTS
            .iter()
            .position(|&c| c == (i.min(j), i.max(j)))
            .unwrap()
    }

    #[test]
    fn slots_are_symmetric() {
        for &(i, j) in COMPONENTS.iter() {
            assert_eq!(slot(i, j), slot(j, i));
            let m = unpack(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
            assert_eq!(m[i][j], (slot(i, j) + 1) as f64);
            assert_eq!(m[j][i], m[i][j]);
        }
    }

    #[test]
    fn flat_rhs_vanishes() {
        let s = CartesianState::flat(CartesianConfig {
            cells: 8,
            half_width: 1.0,
            ..CartesianConfig::default()
        })
        .unwrap();
        assert!(rhs_deturck(&s)
            .unwrap()
            .iter()
            .all(|c| c.iter().all(|&v| v == 0.0)));
        assert!(deturck_w(&s)
            .unwrap()
            .iter()
            .all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn odd_cell_count_rejected() {
        assert!(CartesianConfig {
            cells: 9,
            ..CartesianConfig::default()
        }
        .validate()
        .is_err());
    }
}
