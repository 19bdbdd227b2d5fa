//! Transfer operators of the folded map `T` and the conjugated even map `T̃_e`.
//!
//! `U` is the transfer operator taken with respect to the invariant measure,
//! `(Uf)(y) = Σ P_(k,e)(y) f(w_(k,e)(y))`, so that `U1 = 1`. `P` is the same
//! operator with respect to Lebesgue measure, `(Pf)(y) = Σ w′² f(w)`.
//!
//! Both are evaluated as point rules: a finite list of `(weight, point)` pairs
//! with `(Uf)(y) ≈ Σ weight · f(point)`. Branches `k ≤ K` are summed directly.
//! For the remaining branches `f` is frozen at the cluster point of the branch
//! images and multiplied by the telescoped tail weight; what is left,
//! `Σ_{k>K} weight_k (f(w_k) − f(c))`, is replaced by the integral over
//! `t ≥ K + 1/2` plus the first Euler–Maclaurin correction, and the integral
//! is taken in the variable `u = w(t)` with a 16-point Gauss rule.

pub mod conjugate;
pub mod folded;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

pub use crate::chebyshev::SampledFunction;
use crate::constants::{BIG_G, SMALL_G};
use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::maps::MapKind;
use crate::measures::DensityKind;
use crate::quadrature::{integrate, mapped_rule, NeumaierSum};

pub const DEFAULT_TRUNCATION: usize = 10_000;
pub const DEFAULT_DEGREE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    /// `P_(k,e)` of the folded map on `[0, 1/2]`.
    FoldedU,
    /// `A_k` (`e = +1`) and `B_k` (`e = −1`) of `T̃_e` on `[0, 1]`.
    ConjugateU,
}

/// Which operator a point rule represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// Transfer operator with respect to the invariant measure (`U`, `Ũ`).
    Normalized,
    /// Transfer operator with respect to Lebesgue measure (`P`, `P̃`).
    Lebesgue,
}

fn check_k(k: u64) {
    debug_assert!(k >= 1, "branch index must be positive");
}

impl WeightFamily {
    pub const ALL: [WeightFamily; 2] = [WeightFamily::FoldedU, WeightFamily::ConjugateU];

    pub fn map_kind(self) -> MapKind {
        match self {
            WeightFamily::FoldedU => MapKind::Folded,
            WeightFamily::ConjugateU => MapKind::EvenConjugate,
        }
    }

    pub fn domain(self) -> Interval {
        self.map_kind().domain()
    }

    pub fn density(self) -> DensityKind {
        DensityKind::invariant_for(self.map_kind())
    }

    /// Contraction constant claimed for `‖(Uf)′‖ / ‖f′‖`.
    pub fn target_rate(self) -> f64 {
        match self {
            WeightFamily::FoldedU => 0.288,
            WeightFamily::ConjugateU => 0.234,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightFamily::FoldedU => "folded",
            WeightFamily::ConjugateU => "conjugate",
        }
    }

    /// Smallest admissible `k` for sign `e`.
    pub fn first_k(self, e: i8) -> u64 {
        match (self, e) {
            (WeightFamily::FoldedU, -1) => 3,
            _ => 2,
        }
    }

    /// Branch point `w_(k,e)(y)`.
    pub fn branch_point(self, k: u64, e: i8, y: f64) -> f64 {
        check_k(k);
        let kf = k as f64;
        match self {
            WeightFamily::FoldedU => 1.0 / (kf + f64::from(e) * y),
            WeightFamily::ConjugateU => {
                let u = 1.0 / (kf + y);
                if e > 0 {
                    u
                } else {
                    1.0 - u
                }
            }
        }
    }

    /// Where the branch points accumulate as `k → ∞`.
    pub fn cluster_point(self, e: i8) -> f64 {
        match (self, e) {
            (WeightFamily::ConjugateU, -1) => 1.0,
            _ => 0.0,
        }
    }

    /// `P_(k,e)(y)`, or `A_k(y)` / `B_k(y)` for `e = +1` / `−1`.
    pub fn weight(self, k: u64, e: i8, y: f64) -> f64 {
        check_k(k);
        let gr = *BIG_G;
        let kf = k as f64;
        match self {
            WeightFamily::FoldedU => {
                let a = kf + f64::from(e) * y;
                folded_h_inv(y) * (1.0 / (a + gr - 2.0) - 1.0 / (a + gr - 1.0))
            }
            WeightFamily::ConjugateU => {
                let a = kf + y;
                if e > 0 {
                    (gr + y) * (1.0 / a - 1.0 / (a + gr - 1.0))
                } else {
                    (gr + y) * (1.0 / (a + gr - 2.0) - 1.0 / a)
                }
            }
        }
    }

    /// Derivative of [`WeightFamily::weight`] in `y`.
    pub fn weight_derivative(self, k: u64, e: i8, y: f64) -> f64 {
        check_k(k);
        let gr = *BIG_G;
        let g3 = gr * gr * gr;
        let kf = k as f64;
        match self {
            WeightFamily::FoldedU => {
                let ef = f64::from(e);
                let a = kf + ef * y;
                let (p, q) = (a + gr - 2.0, a + gr - 1.0);
                (1.0 - 2.0 * y) / g3 * (1.0 / p - 1.0 / q)
                    - ef * (g3 + y - y * y) / g3 * (1.0 / (p * p) - 1.0 / (q * q))
            }
            WeightFamily::ConjugateU => {
                if e > 0 {
                    conjugate::a_k_prime(k, y)
                } else {
                    conjugate::b_k_prime(k, y)
                }
            }
        }
    }

    /// `Σ_{k>K} Σ_e weight(k, e, y)`, in closed form.
    pub fn tail(self, truncation: usize, y: f64) -> f64 {
        let gr = *BIG_G;
        let base = truncation as f64 + gr - 1.0;
        match self {
            WeightFamily::FoldedU => folded_h_inv(y) * (1.0 / (base + y) + 1.0 / (base - y)),
            WeightFamily::ConjugateU => (gr + y) / (base + y),
        }
    }

    /// Derivative of [`WeightFamily::tail`] in `y`.
    pub fn tail_derivative(self, truncation: usize, y: f64) -> f64 {
        let gr = *BIG_G;
        let base = truncation as f64 + gr - 1.0;
        match self {
            WeightFamily::FoldedU => {
                let (p, q) = (base + y, base - y);
                (1.0 - 2.0 * y) / (gr * gr * gr) * (1.0 / p + 1.0 / q)
                    + folded_h_inv(y) * (1.0 / (q * q) - 1.0 / (p * p))
            }
            WeightFamily::ConjugateU => {
                let p = base + y;
                1.0 / p - (gr + y) / (p * p)
            }
        }
    }

    /// Branches `(k, e)` with `k ≤ truncation`.
    pub fn branches(self, truncation: usize) -> impl Iterator<Item = (u64, i8)> {
        [1i8, -1]
            .into_iter()
            .flat_map(move |e| (self.first_k(e)..=truncation as u64).map(move |k| (k, e)))
    }
}

/// `H = 1/h = (G + y)(G + 1 − y)/G³`, the reciprocal of the unnormalized
/// folded density.
pub fn folded_h_inv(y: f64) -> f64 {
    let gr = *BIG_G;
    (gr + y) * (gr + 1.0 - y) / (gr * gr * gr)
}

/// `(weight, point)` pairs with `(Lf)(y) ≈ Σ weight · f(point)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointRule {
    pub weights: Vec<f64>,
    pub points: Vec<f64>,
}

impl PointRule {
    fn with_capacity(n: usize) -> Self {
        Self {
            weights: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, weight: f64, point: f64) {
        self.weights.push(weight);
        self.points.push(point);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.points)
            .map(|(&w, &p)| w * f(p))
            .collect::<NeumaierSum>()
            .value()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .collect::<NeumaierSum>()
            .value()
    }
}

/// Appends the tail of one branch family: `mass · f(c)` plus the
/// Euler–Maclaurin estimate of `Σ_{k>K} weight_k (f(w_k) − f(c))`.
///
/// `density_u(u)` is `weight(t) · |dt/du|` at `u = w(t)`; `to_point` maps `u`
/// to the branch point (identity, or `1 − u`).
fn push_tail(
    rule: &mut PointRule,
    mass: f64,
    cluster: f64,
    u0: f64,
    density_u: impl Fn(f64) -> f64,
    to_point: impl Fn(f64) -> f64,
    edge: [(f64, f64); 2],
) {
    let mut at_cluster = mass;
    for (u, c) in mapped_rule(0.0, u0) {
        let q = c * density_u(u);
        rule.push(q, to_point(u));
        at_cluster -= q;
    }
    // (ρ(K + 1) − ρ(K)) / 24
    let [(w_next, p_next), (w_last, p_last)] = edge;
    rule.push(w_next / 24.0, p_next);
    rule.push(-w_last / 24.0, p_last);
    at_cluster -= (w_next - w_last) / 24.0;
    rule.push(at_cluster, cluster);
}

/// Point rule of `U` (or `P`) at `y` with branches `k ≤ truncation`.
pub fn point_rule(family: WeightFamily, op: OperatorKind, y: f64, truncation: usize) -> PointRule {
    let gr = *BIG_G;
    let kk = truncation as u64;
    let big_k = truncation as f64;
    let mut rule = PointRule::with_capacity(2 * truncation + 48);
    match (family, op) {
        (WeightFamily::FoldedU, OperatorKind::Normalized) => {
            let hy = folded_h_inv(y);
            for e in [1i8, -1] {
                let ef = f64::from(e);
                for k in family.first_k(e)..=kk {
                    rule.push(family.weight(k, e, y), family.branch_point(k, e, y));
                }
                let mass = hy / (big_k + gr - 1.0 + ef * y);
                let u0 = 1.0 / (big_k + 0.5 + ef * y);
                push_tail(
                    &mut rule,
                    mass,
                    0.0,
                    u0,
                    |u| hy / ((1.0 + (gr - 2.0) * u) * (1.0 + (gr - 1.0) * u)),
                    |u| u,
                    [
                        (
                            family.weight(kk + 1, e, y),
                            family.branch_point(kk + 1, e, y),
                        ),
                        (family.weight(kk, e, y), family.branch_point(kk, e, y)),
                    ],
                );
            }
        }
        (WeightFamily::FoldedU, OperatorKind::Lebesgue) => {
            for e in [1i8, -1] {
                let ef = f64::from(e);
                for k in family.first_k(e)..=kk {
                    let w = family.branch_point(k, e, y);
                    rule.push(w * w, w);
                }
                let u0 = 1.0 / (big_k + 0.5 + ef * y);
                let w_next = family.branch_point(kk + 1, e, y);
                let w_last = family.branch_point(kk, e, y);
                push_tail(
                    &mut rule,
                    u0,
                    0.0,
                    u0,
                    |_| 1.0,
                    |u| u,
                    [(w_next * w_next, w_next), (w_last * w_last, w_last)],
                );
            }
        }
        (WeightFamily::ConjugateU, OperatorKind::Normalized) => {
            for k in 2..=kk {
                rule.push(family.weight(k, 1, y), family.branch_point(k, 1, y));
                rule.push(family.weight(k, -1, y), family.branch_point(k, -1, y));
            }
            let (mass_a, mass_b) = conjugate_tail_masses(truncation, y);
            let u0 = 1.0 / (big_k + 0.5 + y);
            let g = *SMALL_G;
            push_tail(
                &mut rule,
                mass_a,
                0.0,
                u0,
                |u| (gr + y) * g / (1.0 + g * u),
                |u| u,
                [
                    (
                        family.weight(kk + 1, 1, y),
                        family.branch_point(kk + 1, 1, y),
                    ),
                    (family.weight(kk, 1, y), family.branch_point(kk, 1, y)),
                ],
            );
            push_tail(
                &mut rule,
                mass_b,
                1.0,
                u0,
                |u| (gr + y) * (2.0 - gr) / (1.0 + (gr - 2.0) * u),
                |u| 1.0 - u,
                [
                    (
                        family.weight(kk + 1, -1, y),
                        family.branch_point(kk + 1, -1, y),
                    ),
                    (family.weight(kk, -1, y), family.branch_point(kk, -1, y)),
                ],
            );
        }
        (WeightFamily::ConjugateU, OperatorKind::Lebesgue) => {
            for k in 2..=kk {
                let u = 1.0 / (k as f64 + y);
                rule.push(u * u, u);
                rule.push(u * u, 1.0 - u);
            }
            let u0 = 1.0 / (big_k + 0.5 + y);
            let u_next = 1.0 / (big_k + 1.0 + y);
            let u_last = 1.0 / (big_k + y);
            for (cluster, flip) in [(0.0, false), (1.0, true)] {
                let to_point = move |u: f64| if flip { 1.0 - u } else { u };
                push_tail(
                    &mut rule,
                    u0,
                    cluster,
                    u0,
                    |_| 1.0,
                    to_point,
                    [
                        (u_next * u_next, to_point(u_next)),
                        (u_last * u_last, to_point(u_last)),
                    ],
                );
            }
        }
    }
    rule
}

/// Tail masses `(Σ_{k>K} A_k, Σ_{k>K} B_k)`; their sum is exact, the split is
/// the Euler–Maclaurin estimate of the `A` part.
pub fn conjugate_tail_masses(truncation: usize, x: f64) -> (f64, f64) {
    let gr = *BIG_G;
    let big_k = truncation as f64;
    let kk = truncation as u64;
    let f = WeightFamily::ConjugateU;
    let total = f.tail(truncation, x);
    let u0 = 1.0 / (big_k + 0.5 + x);
    let a =
        (gr + x) * (*SMALL_G * u0).ln_1p() + (f.weight(kk + 1, 1, x) - f.weight(kk, 1, x)) / 24.0;
    (a, total - a)
}

/// Size of the Euler–Maclaurin correction in the rule at `y`, used as the
/// estimate of the truncation error.
pub fn truncation_error_estimate(
    family: WeightFamily,
    f: impl Fn(f64) -> f64,
    y: f64,
    truncation: usize,
) -> f64 {
    let kk = truncation as u64;
    [1i8, -1]
        .into_iter()
        .map(|e| {
            let c = f(family.cluster_point(e));
            let rho = |k: u64| family.weight(k, e, y) * (f(family.branch_point(k, e, y)) - c);
            ((rho(kk + 1) - rho(kk)) / 24.0).abs()
        })
        .sum()
}

fn check_truncation(truncation: usize) -> Result<()> {
    if truncation < 2 {
        Err(NicfError::InvalidInput(format!(
            "truncation K = {truncation} must be at least 2"
        )))
    } else {
        Ok(())
    }
}

fn check_domain(family: WeightFamily, f: &SampledFunction) -> Result<()> {
    if f.domain() != family.domain() {
        Err(NicfError::KindMismatch(format!(
            "function sampled on {} but the {} operator acts on {}",
            f.domain(),
            family.name(),
            family.domain()
        )))
    } else {
        Ok(())
    }
}

/// `(Uf)(y)` for a function given in closed form.
pub fn apply_u_at(family: WeightFamily, f: impl Fn(f64) -> f64, y: f64, truncation: usize) -> f64 {
    point_rule(family, OperatorKind::Normalized, y, truncation).apply(f)
}

/// `(Pf)(y)`, the Lebesgue transfer operator, for a function in closed form.
pub fn apply_p_at(family: WeightFamily, f: impl Fn(f64) -> f64, y: f64, truncation: usize) -> f64 {
    point_rule(family, OperatorKind::Lebesgue, y, truncation).apply(f)
}

/// `Uf` sampled at the nodes of `f`.
pub fn apply_u(
    family: WeightFamily,
    f: &SampledFunction,
    truncation: usize,
) -> Result<SampledFunction> {
    check_truncation(truncation)?;
    check_domain(family, f)?;
    let values = f
        .nodes()
        .par_iter()
        .map(|&y| apply_u_at(family, |x| f.eval(x), y, truncation))
        .collect();
    SampledFunction::from_values(f.domain(), values)
}

/// [`apply_u`], failing when the estimated truncation error exceeds `tolerance`.
pub fn apply_u_checked(
    family: WeightFamily,
    f: &SampledFunction,
    truncation: usize,
    tolerance: f64,
) -> Result<SampledFunction> {
    check_truncation(truncation)?;
    check_domain(family, f)?;
    let estimate = f
        .nodes()
        .iter()
        .map(|&y| truncation_error_estimate(family, |x| f.eval(x), y, truncation))
        .fold(0.0, f64::max);
    // Written negated so that a NaN estimate is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(estimate <= tolerance) {
        return Err(NicfError::Tolerance {
            truncation,
            tolerance,
            estimate,
        });
    }
    apply_u(family, f, truncation)
}

/// An operator precomputed as a matrix on the values at Lobatto nodes.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    family: WeightFamily,
    op: OperatorKind,
    degree: usize,
    truncation: usize,
    template: SampledFunction,
    matrix: Vec<f64>,
    invariant: OnceLock<Vec<f64>>,
}

impl TransferOperator {
    /// `U` (or `Ũ`) on polynomials of the given degree.
    pub fn new(family: WeightFamily, degree: usize, truncation: usize) -> Result<Self> {
        Self::build(family, OperatorKind::Normalized, degree, truncation)
    }

    /// `P` (or `P̃`) on polynomials of the given degree.
    pub fn lebesgue(family: WeightFamily, degree: usize, truncation: usize) -> Result<Self> {
        Self::build(family, OperatorKind::Lebesgue, degree, truncation)
    }

    fn build(
        family: WeightFamily,
        op: OperatorKind,
        degree: usize,
        truncation: usize,
    ) -> Result<Self> {
        check_truncation(truncation)?;
        if degree < 2 {
            return Err(NicfError::InvalidInput(format!(
                "collocation degree {degree} must be at least 2"
            )));
        }
        let template = SampledFunction::constant(family.domain(), degree, 0.0)?;
        let n = degree + 1;
        let rows: Vec<Vec<f64>> = template
            .nodes()
            .par_iter()
            .map(|&y| {
                let rule = point_rule(family, op, y, truncation);
                let mut row = vec![0.0; n];
                let mut basis = vec![0.0; n];
                for (&w, &p) in rule.weights.iter().zip(&rule.points) {
                    template.basis_at(p, &mut basis);
                    for (r, b) in row.iter_mut().zip(&basis) {
                        *r += w * b;
                    }
                }
                row
            })
            .collect();
        Ok(Self {
            family,
            op,
            degree,
            truncation,
            template,
            matrix: rows.concat(),
            invariant: OnceLock::new(),
        })
    }

    pub fn family(&self) -> WeightFamily {
        self.family
    }

    pub fn operator_kind(&self) -> OperatorKind {
        self.op
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn nodes(&self) -> &[f64] {
        self.template.nodes()
    }

    /// Samples a closed-form function on this operator's grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        self.template.map_values(|x, _| f(x))
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        check_domain(self.family, f)?;
        if !self.template.same_grid(f) {
            return Err(NicfError::InvalidInput(format!(
                "function has degree {}, operator was built for degree {}",
                f.degree(),
                self.degree
            )));
        }
        SampledFunction::from_values(f.domain(), self.apply_values(f.values()))
    }

    pub fn apply_values(&self, v: &[f64]) -> Vec<f64> {
        let n = self.degree + 1;
        self.matrix
            .chunks_exact(n)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .collect::<NeumaierSum>()
                    .value()
            })
            .collect()
    }

    /// Left fixed vector `ℓ` of the matrix, scaled so that `ℓ · 1 = 1`: the
    /// discrete counterpart of `f ↦ ∫ f dμ`.
    pub fn invariant_functional(&self) -> &[f64] {
        self.invariant.get_or_init(|| {
            let n = self.degree + 1;
            let mut l = vec![1.0 / n as f64; n];
            for _ in 0..200 {
                let mut next = vec![0.0; n];
                for (row, &li) in self.matrix.chunks_exact(n).zip(&l) {
                    for (x, &m) in next.iter_mut().zip(row) {
                        *x += li * m;
                    }
                }
                let total: f64 = next.iter().sum();
                next.iter_mut().for_each(|x| *x /= total);
                let change = next
                    .iter()
                    .zip(&l)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                l = next;
                if change < 1e-17 {
                    break;
                }
            }
            l
        })
    }

    /// `v − (ℓ · v) 1`.
    pub fn center_values(&self, v: &[f64]) -> Vec<f64> {
        let mean: f64 = self
            .invariant_functional()
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .collect::<NeumaierSum>()
            .value();
        v.iter().map(|x| x - mean).collect()
    }

    /// `f − ∫f dμ, L(f − ∫f dμ), …`, re-centered after every step so that
    /// rounding never feeds the constant mode. Relative accuracy is kept as
    /// the iterates decay.
    pub fn iterate_centered(&self, f: &SampledFunction, n: usize) -> Result<Vec<SampledFunction>> {
        check_domain(self.family, f)?;
        let mut out = Vec::with_capacity(n + 1);
        let mut v = self.center_values(f.values());
        out.push(SampledFunction::from_values(f.domain(), v.clone())?);
        for _ in 0..n {
            v = self.center_values(&self.apply_values(&v));
            out.push(SampledFunction::from_values(f.domain(), v.clone())?);
        }
        Ok(out)
    }

    /// `f, Lf, L²f, …, Lⁿf`.
    pub fn iterate(&self, f: &SampledFunction, n: usize) -> Result<Vec<SampledFunction>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(f.clone());
        for i in 0..n {
            let next = self.apply(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSumReport {
    pub family: WeightFamily,
    pub points: usize,
    pub truncation: usize,
    /// `max |Σ weight + tail − 1|`.
    pub max_sum_residual: f64,
    /// `max |Σ weight′ + tail′|`.
    pub max_derivative_residual: f64,
    pub min_weight: f64,
}

/// Partition of unity and its derivative on every grid point.
pub fn weight_derivative_sum_check(
    family: WeightFamily,
    grid: &[f64],
    truncation: usize,
) -> Result<WeightSumReport> {
    check_truncation(truncation)?;
    let domain = family.domain();
    if let Some(&y) = grid.iter().find(|&&y| !domain.contains(y)) {
        return Err(NicfError::Domain {
            what: format!("the {} weights", family.name()),
            x: y,
            lo: domain.lo,
            hi: domain.hi,
        });
    }
    let per_point: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&y| {
            let mut s = NeumaierSum::default();
            let mut d = NeumaierSum::default();
            let mut lo = f64::INFINITY;
            for (k, e) in family.branches(truncation) {
                let w = family.weight(k, e, y);
                lo = lo.min(w);
                s.add(w);
                d.add(family.weight_derivative(k, e, y));
            }
            s.add(family.tail(truncation, y));
            d.add(family.tail_derivative(truncation, y));
            ((s.value() - 1.0).abs(), d.value().abs(), lo)
        })
        .collect();
    Ok(WeightSumReport {
        family,
        points: grid.len(),
        truncation,
        max_sum_residual: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
        max_derivative_residual: per_point.iter().map(|p| p.1).fold(0.0, f64::max),
        min_weight: per_point.iter().map(|p| p.2).fold(f64::INFINITY, f64::min),
    })
}

/// Uniform grid of `points` points on `domain`, endpoints included.
pub fn uniform_grid(domain: Interval, points: usize) -> Vec<f64> {
    let m = points.max(2) - 1;
    (0..=m)
        .map(|i| {
            if i == m {
                domain.hi
            } else {
                domain.lo + domain.length() * i as f64 / m as f64
            }
        })
        .collect()
}

/// Largest difference between `P_(k,e)(y)/(k+ey)²` and the two partial
/// fraction rearrangements of it, over `k ≤ k_max`, both signs and the grid.
pub fn partial_fraction_residual(k_max: u64, grid: &[f64]) -> f64 {
    let gr = *BIG_G;
    let (g2, g3) = (gr * gr, gr * gr * gr);
    let f = WeightFamily::FoldedU;
    let mut worst: f64 = 0.0;
    for &y in grid {
        let hy = folded_h_inv(y);
        for e in [1i8, -1] {
            for k in f.first_k(e)..=k_max {
                let a = k as f64 + f64::from(e) * y;
                let (p, q) = (a + gr - 2.0, a + gr - 1.0);
                let direct = f.weight(k, e, y) / (a * a);
                let first = hy * (-g3 / (a * a) - g3 / a + (g3 + g2) / p - g2 / q);
                let second = hy * (-g3 / (a * a) + gr / (a * p) + g2 * (1.0 / p - 1.0 / q));
                worst = worst
                    .max((direct - first).abs())
                    .max((direct - second).abs());
            }
        }
    }
    worst
}

/// `∫ (Uf)·g dμ − ∫ f·(g∘T) dμ`.
///
/// The left side integrates the operator; the right side integrates over the
/// rank-one cylinders directly in `x` for `k ≤ cylinders`, and for the
/// remaining ones freezes `f` at the cluster point.
pub fn duality_residual(
    family: WeightFamily,
    f: impl Fn(f64) -> f64 + Sync,
    g: impl Fn(f64) -> f64 + Sync,
    truncation: usize,
    cylinders: usize,
) -> f64 {
    let density = family.density();
    let c = density.normalization();
    let h = |x: f64| c * density.raw_unchecked(x);
    let d = family.domain();
    let lhs = integrate(
        |y| apply_u_at(family, &f, y, truncation) * g(y) * h(y),
        d.lo,
        d.hi,
        16,
    );
    let kk = cylinders as u64;
    let mut rhs = NeumaierSum::default();
    for e in [1i8, -1] {
        let ef = f64::from(e);
        for k in family.first_k(e)..=kk {
            let kf = k as f64;
            let a = family.branch_point(k, e, d.lo);
            let b = family.branch_point(k, e, d.hi);
            let (lo, hi) = (a.min(b), a.max(b));
            let t = |x: f64| match family {
                WeightFamily::FoldedU => ef * (1.0 / x - kf),
                WeightFamily::ConjugateU => {
                    if e > 0 {
                        1.0 / x - kf
                    } else {
                        1.0 / (1.0 - x) - kf
                    }
                }
            };
            for (x, w) in mapped_rule(lo, hi) {
                rhs.add(w * f(x) * g(t(x)) * h(x));
            }
        }
        // Σ_{k>K} ∫_cylinder g∘T dμ = ∫ g · tail_e dμ
        let tail_e = |y: f64| match family {
            WeightFamily::FoldedU => folded_h_inv(y) / (cylinders as f64 + *BIG_G - 1.0 + ef * y),
            WeightFamily::ConjugateU => {
                let (ta, tb) = conjugate_tail_masses(cylinders, y);
                if e > 0 {
                    ta
                } else {
                    tb
                }
            }
        };
        let fc = f(family.cluster_point(e));
        rhs.add(fc * integrate(|y| g(y) * tail_e(y) * h(y), d.lo, d.hi, 16));
    }
    lhs - rhs.value()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub family: WeightFamily,
    pub probes: usize,
    pub max_ratio: f64,
    pub worst_probe: usize,
    /// Largest `|finite difference − spectral derivative| / ‖(Uf)′‖∞`.
    pub max_fd_discrepancy: f64,
    pub target: f64,
    pub pass: bool,
}

/// Chebyshev polynomial `T_j` on `domain`.
pub fn chebyshev_t(domain: Interval, j: usize, x: f64) -> f64 {
    let t = (2.0 * x - domain.lo - domain.hi) / domain.length();
    let (mut a, mut b) = (1.0, t);
    if j == 0 {
        return 1.0;
    }
    for _ in 1..j {
        let c = 2.0 * t * b - a;
        a = b;
        b = c;
    }
    b
}

/// Maximizes `‖(Uf)′‖∞ / ‖f′‖∞` over `T_1, …, T_12` and random combinations
/// of them, `probes` functions in all.
pub fn contraction_estimate(
    operator: &TransferOperator,
    probes: usize,
    seed: u64,
) -> Result<ContractionReport> {
    use rand::{Rng, SeedableRng};
    if probes == 0 {
        return Err(NicfError::InvalidInput(
            "at least one probe is needed".into(),
        ));
    }
    let family = operator.family;
    let domain = family.domain();
    const BASIS: usize = 12;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let coefficients: Vec<Vec<f64>> = (0..probes)
        .map(|i| {
            let mut c = vec![0.0; BASIS + 1];
            if i < BASIS {
                c[i + 1] = 1.0;
            } else {
                for (j, cj) in c.iter_mut().enumerate().skip(1) {
                    *cj = rng.gen_range(-1.0..1.0) / j as f64;
                }
            }
            c
        })
        .collect();
    let checks = uniform_grid(domain, 11);
    let delta = 1e-5;
    let results: Vec<(f64, f64)> = coefficients
        .par_iter()
        .map(|c| {
            let probe = |x: f64| {
                c.iter()
                    .enumerate()
                    .map(|(j, &cj)| cj * chebyshev_t(domain, j, x))
                    .sum::<f64>()
            };
            let f = operator.sample(probe);
            let fp = f.derivative().sup_norm();
            let uf = operator.apply(&f)?;
            let ufp = uf.derivative();
            let ufp_sup = ufp.sup_norm();
            let mut fd_gap: f64 = 0.0;
            for &y in &checks[1..checks.len() - 1] {
                let plus = apply_u_at(family, probe, y + delta, operator.truncation);
                let minus = apply_u_at(family, probe, y - delta, operator.truncation);
                let fd = (plus - minus) / (2.0 * delta);
                fd_gap = fd_gap.max((fd - ufp.eval(y)).abs() / ufp_sup.max(f64::MIN_POSITIVE));
            }
            Ok((ufp_sup / fp, fd_gap))
        })
        .collect::<Result<_>>()?;
    let (worst_probe, max_ratio) =
        results
            .iter()
            .map(|r| r.0)
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, r)| if r > acc.1 { (i, r) } else { acc },
            );
    let target = family.target_rate();
    Ok(ContractionReport {
        family,
        probes,
        max_ratio,
        worst_probe,
        max_fd_discrepancy: results.iter().map(|r| r.1).fold(0.0, f64::max),
        target,
        pass: max_ratio <= target,
    })
}

/// Result of bounding a closed-form function by its sup on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub name: String,
    pub target: f64,
    pub grid_sup: f64,
    pub argmax: f64,
    pub grid_spacing: f64,
    /// Largest difference quotient on the coarse grid, times 1.5.
    pub lipschitz: f64,
    pub padding: f64,
    pub certified_sup: f64,
    pub pass: bool,
}

/// Grid sup of `f` on `domain` plus `(spacing / 2) · L`, where `L` is 1.5
/// times the largest difference quotient on a grid ten times coarser.
///
/// Every point lies within `spacing / 2` of a grid point, which is where the
/// half comes from.
pub fn certify_sup(
    name: &str,
    f: impl Fn(f64) -> f64 + Sync,
    domain: Interval,
    spacing: f64,
    target: f64,
) -> BoundCertificate {
    let fine = ((domain.length() / spacing).round() as usize).max(1);
    let coarse = (fine / 10).max(1);
    let grid = uniform_grid(domain, fine + 1);
    let values: Vec<f64> = grid.par_iter().map(|&y| f(y)).collect();
    let (argmax, grid_sup) =
        grid.iter()
            .zip(&values)
            .fold((domain.lo, f64::NEG_INFINITY), |acc, (&y, &v)| {
                if v > acc.1 {
                    (y, v)
                } else {
                    acc
                }
            });
    let cgrid = uniform_grid(domain, coarse + 1);
    let cvalues: Vec<f64> = cgrid.par_iter().map(|&y| f(y)).collect();
    let slope = cgrid
        .windows(2)
        .zip(cvalues.windows(2))
        .map(|(y, v)| ((v[1] - v[0]) / (y[1] - y[0])).abs())
        .fold(0.0, f64::max);
    let h = domain.length() / fine as f64;
    let lipschitz = 1.5 * slope;
    let padding = 0.5 * h * lipschitz;
    let certified_sup = grid_sup + padding;
    BoundCertificate {
        name: name.to_string(),
        target,
        grid_sup,
        argmax,
        grid_spacing: h,
        lipschitz,
        padding,
        certified_sup,
        pass: certified_sup < target,
    }
}

/// `∫_set f dμ` for the invariant measure of `family`.
pub fn integrate_against_mu(family: WeightFamily, f: &SampledFunction, set: &IntervalUnion) -> f64 {
    let density = family.density();
    let c = density.normalization();
    f.integrate(set, |x| c * density.raw_unchecked(x))
}
