//! Functions sampled at Chebyshev–Gauss–Lobatto nodes.
//!
//! Values are held at the `N + 1` nodes `a + (b − a)·sin²(jπ / 2N)`, which
//! increase from `a` to `b`. Evaluation is by the barycentric formula with
//! weights `(−1)^j`, halved at both ends; derivatives come from the
//! barycentric differentiation matrix applied to the same values.

use std::f64::consts::PI;

use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::quadrature::{mapped_rule, NeumaierSum};

/// Number of uniformly spaced points used by [`SampledFunction::sup_norm`].
pub const SUP_GRID_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    domain: Interval,
    nodes: Vec<f64>,
    values: Vec<f64>,
    weights: Vec<f64>,
}

pub fn lobatto_nodes(domain: Interval, degree: usize) -> Vec<f64> {
    let n = degree as f64;
    (0..=degree)
        .map(|j| {
            if j == degree {
                domain.hi
            } else {
                let s = (j as f64 * PI / (2.0 * n)).sin();
                domain.lo + domain.length() * s * s
            }
        })
        .collect()
}

fn barycentric_weights(degree: usize) -> Vec<f64> {
    (0..=degree)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == degree {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect()
}

impl SampledFunction {
    /// Samples `f` at the nodes of the given degree.
    pub fn from_fn(domain: Interval, degree: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = lobatto_nodes(domain, degree.max(1));
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::from_values(domain, values)
    }

    /// Wraps values already sampled at the Lobatto nodes of `domain`.
    pub fn from_values(domain: Interval, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(NicfError::InvalidInput(
                "a sampled function needs at least two nodes".into(),
            ));
        }
        if domain.length() <= 0.0 {
            return Err(NicfError::InvalidInput(format!(
                "sampling domain {domain} has no interior"
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(NicfError::InvalidInput(format!(
                "sampled value at node {bad} is not finite"
            )));
        }
        let degree = values.len() - 1;
        Ok(Self {
            domain,
            nodes: lobatto_nodes(domain, degree),
            weights: barycentric_weights(degree),
            values,
        })
    }

    pub fn constant(domain: Interval, degree: usize, c: f64) -> Result<Self> {
        Self::from_values(domain, vec![c; degree.max(1) + 1])
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Barycentric interpolation at `x` (extrapolates outside the domain).
    pub fn eval(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &fj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let d = x - xj;
            if d == 0.0 {
                return fj;
            }
            let t = wj / d;
            num += t * fj;
            den += t;
        }
        num / den
    }

    /// Writes the Lagrange basis values `ℓ_j(x)` into `out`.
    pub fn basis_at(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
        let mut den = 0.0;
        for ((o, &xj), &wj) in out.iter_mut().zip(&self.nodes).zip(&self.weights) {
            let t = wj / (x - xj);
            *o = t;
            den += t;
        }
        out.iter_mut().for_each(|v| *v /= den);
    }

    /// Spectral derivative, sampled at the same nodes.
    pub fn derivative(&self) -> SampledFunction {
        let n = self.nodes.len();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..n {
                if i != j {
                    let dij = (self.weights[j] / self.weights[i]) / (self.nodes[i] - self.nodes[j]);
                    acc += dij * (self.values[j] - self.values[i]);
                }
            }
            *o = acc;
        }
        SampledFunction {
            domain: self.domain,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values: out,
        }
    }

    /// `sup |f|` over the nodes and a uniform grid of [`SUP_GRID_POINTS`] points.
    pub fn sup_norm(&self) -> f64 {
        let m = SUP_GRID_POINTS;
        let grid = (0..=m).map(|i| self.domain.lo + self.domain.length() * i as f64 / m as f64);
        grid.map(|x| self.eval(x).abs())
            .chain(self.values.iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> SampledFunction {
        SampledFunction {
            domain: self.domain,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values: self
                .nodes
                .iter()
                .zip(&self.values)
                .map(|(&x, &v)| f(x, v))
                .collect(),
        }
    }

    /// `∫_set f(x)·density(x) dx` by composite Gauss–Legendre quadrature.
    pub fn integrate(&self, set: &IntervalUnion, density: impl Fn(f64) -> f64) -> f64 {
        let panels = 32;
        let mut acc = NeumaierSum::default();
        for part in set.parts() {
            let h = part.length() / panels as f64;
            for p in 0..panels {
                let lo = part.lo + h * p as f64;
                let hi = if p + 1 == panels { part.hi } else { lo + h };
                for (x, w) in mapped_rule(lo, hi) {
                    acc.add(w * self.eval(x) * density(x));
                }
            }
        }
        acc.value()
    }

    pub(crate) fn same_grid(&self, other: &SampledFunction) -> bool {
        self.domain == other.domain && self.nodes.len() == other.nodes.len()
    }
}
