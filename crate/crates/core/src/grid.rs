//! Radial grids on `[0, r_max]` and three-point finite-difference stencils.
//!
//! The origin is always a node. Stencils at the origin use the even
//! extension `f(-r) = f(r)`, which is the parity of every metric quantity
//! the solver differentiates. The outer node uses a one-sided closure.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::quadrature::three_point_weights;
use crate::{Error, Result};

/// Minimum number of intervals accepted by the flow solver.
pub const MIN_SOLVER_INTERVALS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Stretching {
    Uniform,
    /// Gaps grow by `ratio` from one interval to the next.
    Geometric {
        ratio: f64,
    },
    /// `r = scale * sinh(xi * asinh(r_max / scale))` for uniform `xi` in `[0, 1]`:
    /// nearly uniform for `r << scale`, geometric for `r >> scale`.
    Sinh {
        scale: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    /// Number of intervals; the grid has `intervals + 1` nodes.
    pub intervals: usize,
    pub r_max: f64,
    pub stretching: Stretching,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            intervals: 512,
            r_max: 100.0,
            stretching: Stretching::Sinh { scale: 4.0 },
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        RadialGrid::new(self)
    }

    /// Same stretching and extent with `factor` times as many intervals.
    /// Nodes of the coarser grid are nodes of the refined one.
    pub fn refined(&self, factor: usize) -> Self {
        let mut spec = *self;
        spec.intervals *= factor;
        if let Stretching::Geometric { ratio } = spec.stretching {
            spec.stretching = Stretching::Geometric {
                ratio: ratio.powf(1.0 / factor as f64),
            };
        }
        spec
    }
}

/// Strictly increasing radii with `nodes[0] = 0` and `nodes[N] = r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        let n = spec.intervals;
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 intervals, got {n}"
            )));
        }
        if !(spec.r_max > 0.0) || !spec.r_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "r_max must be positive and finite, got {}",
                spec.r_max
            )));
        }
        let r_max = spec.r_max;
        let mut nodes: Vec<f64> = match spec.stretching {
            Stretching::Uniform => (0..=n).map(|i| r_max * i as f64 / n as f64).collect(),
            Stretching::Geometric { ratio } => {
                if !(ratio > 1.0) || !ratio.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "geometric ratio must exceed 1, got {ratio}"
                    )));
                }
                let first_gap = r_max * (ratio - 1.0) / (ratio.powi(n as i32) - 1.0);
                let mut nodes = Vec::with_capacity(n + 1);
                let (mut r, mut gap) = (0.0, first_gap);
                for _ in 0..=n {
                    nodes.push(r);
                    r += gap;
                    gap *= ratio;
                }
                nodes
            }
            Stretching::Sinh { scale } => {
                if !(scale > 0.0) || !scale.is_finite() {
                    return Err(Error::InvalidGrid(format!(
                        "sinh scale must be positive, got {scale}"
                    )));
                }
                let span = (r_max / scale).asinh();
                (0..=n)
                    .map(|i| scale * (span * i as f64 / n as f64).sinh())
                    .collect()
            }
        };
        nodes[0] = 0.0;
        nodes[n] = r_max;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(
                "nodes are not strictly increasing (stretching too strong for this many intervals)"
                    .into(),
            ));
        }
        Ok(Self { spec: *spec, nodes })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn gap(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn min_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the interval `[r_i, r_{i+1}]` containing `r` (clamped).
    pub fn locate(&self, r: f64) -> usize {
        let n = self.intervals();
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }
}

/// First- and second-derivative weights on three consecutive nodes.
///
/// Interior nodes use the centred nonuniform Lagrange stencil, node 0 the
/// even extension (`f'(0) = 0`, `f''(0) = 2 (f_1 - f_0) / r_1^2`), node `N`
/// the backward stencil on `N-2, N-1, N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSet {
    first: Vec<[f64; 3]>,
    second: Vec<[f64; 3]>,
}

impl StencilSet {
    pub fn new(grid: &RadialGrid) -> Self {
        let r = grid.nodes();
        let n = grid.intervals();
        let mut first = Vec::with_capacity(n + 1);
        let mut second = Vec::with_capacity(n + 1);

        let r1 = r[1];
        first.push([0.0; 3]);
        second.push([-2.0 / (r1 * r1), 2.0 / (r1 * r1), 0.0]);

        for i in 1..n {
            let (d1, d2) = three_point_weights(r[i - 1], r[i], r[i + 1], r[i]);
            first.push(d1);
            second.push(d2);
        }

        let (d1, d2) = three_point_weights(r[n - 2], r[n - 1], r[n], r[n]);
        first.push(d1);
        second.push(d2);

        Self { first, second }
    }

    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    #[inline]
    fn base(&self, i: usize) -> usize {
        let last = self.first.len() - 1;
        if i == 0 {
            0
        } else if i == last {
            last - 2
        } else {
            i - 1
        }
    }

    #[inline]
    pub fn first_at(&self, v: &[f64], i: usize) -> f64 {
        let b = self.base(i);
        apply(&self.first[i], v, b)
    }

    #[inline]
    pub fn second_at(&self, v: &[f64], i: usize) -> f64 {
        let b = self.base(i);
        apply(&self.second[i], v, b)
    }

    pub fn first(&self, v: &[f64]) -> Vec<f64> {
        (0..v.len()).map(|i| self.first_at(v, i)).collect()
    }

    pub fn second(&self, v: &[f64]) -> Vec<f64> {
        (0..v.len()).map(|i| self.second_at(v, i)).collect()
    }

    /// Interior weights `(w_{i-1}, w_i, w_{i+1})` of the second-derivative stencil.
    pub(crate) fn second_weights(&self, i: usize) -> [f64; 3] {
        self.second[i]
    }

    pub(crate) fn first_weights(&self, i: usize) -> [f64; 3] {
        self.first[i]
    }
}

// Weights sum to zero, so differencing against the middle value keeps
// constants exact.
#[inline]
fn apply(w: &[f64; 3], v: &[f64], b: usize) -> f64 {
    let c = v[b + 1];
    w[0] * (v[b] - c) + w[2] * (v[b + 2] - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_nodes() {
        let g = GridSpec {
            intervals: 4,
            r_max: 4.0,
            stretching: Stretching::Uniform,
        }
        .build()
        .unwrap();
        assert_eq!(g.nodes(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn geometric_nodes() {
        let g = GridSpec {
            intervals: 3,
            r_max: 7.0,
            stretching: Stretching::Geometric { ratio: 2.0 },
        }
        .build()
        .unwrap();
        for (a, b) in g.nodes().iter().zip([0.0, 1.0, 3.0, 7.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn sinh_gaps_monotone_and_dense_at_origin() {
        let spec = GridSpec {
            intervals: 64,
            r_max: 100.0,
            stretching: Stretching::Sinh { scale: 4.0 },
        };
        let g = spec.build().unwrap();
        for i in 1..g.intervals() {
            assert!(g.gap(i) >= g.gap(i - 1));
        }
        assert!(g.gap(0) <= 100.0 / 64.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = [
            GridSpec {
                intervals: 16,
                r_max: 0.0,
                stretching: Stretching::Uniform,
            },
            GridSpec {
                intervals: 16,
                r_max: 1.0,
                stretching: Stretching::Geometric { ratio: 1.0 },
            },
            GridSpec {
                intervals: 16,
                r_max: -3.0,
                stretching: Stretching::Sinh { scale: 1.0 },
            },
        ];
        for spec in bad {
            assert!(matches!(spec.build(), Err(Error::InvalidGrid(_))));
        }
    }

    #[test]
    fn refinement_nests_nodes() {
        let spec = GridSpec {
            intervals: 32,
            r_max: 50.0,
            stretching: Stretching::Sinh { scale: 3.0 },
        };
        let coarse = spec.build().unwrap();
        let fine = spec.refined(2).build().unwrap();
        for (i, r) in coarse.nodes().iter().enumerate() {
            assert_relative_eq!(*r, fine.nodes()[2 * i], max_relative = 1e-13);
        }
    }

    #[test]
    fn locate_brackets() {
        let g = GridSpec {
            intervals: 4,
            r_max: 4.0,
            stretching: Stretching::Uniform,
        }
        .build()
        .unwrap();
        assert_eq!(g.locate(0.0), 0);
        assert_eq!(g.locate(1.5), 1);
        assert_eq!(g.locate(2.0), 2);
        assert_eq!(g.locate(4.0), 3);
        assert_eq!(g.locate(9.0), 3);
    }

    #[test]
    fn origin_parity() {
        let g = GridSpec {
            intervals: 20,
            r_max: 2.0,
            stretching: Stretching::Sinh { scale: 0.5 },
        }
        .build()
        .unwrap();
        let s = StencilSet::new(&g);
        let v: Vec<f64> = g
            .nodes()
            .iter()
            .map(|r| 3.0 + r * r - 0.5 * r.powi(4))
            .collect();
        assert_eq!(s.first_at(&v, 0), 0.0);
        // even extension of r^2 is exact
        let q: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        assert_relative_eq!(s.second_at(&q, 0), 2.0, epsilon = 1e-12);
    }
}
