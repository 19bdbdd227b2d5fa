//! Bounds on `‖(Uf)′‖∞` for the folded map: `S_I`, the `S_II` majorant and
//! the series `Φ₁`, `Φ₂` they are built from.

use std::f64::consts::PI;

use serde::Serialize;

use super::{certify_sup, folded_h_inv, BoundCertificate};
use crate::constants::BIG_G;
use crate::interval::Interval;
use crate::quadrature::NeumaierSum;

/// Truncation used for `Φ₂` inside the grid certificates.
pub const PHI2_GRID_TRUNCATION: usize = 1_000;

const HALF: Interval = Interval { lo: 0.0, hi: 0.5 };

/// `Σ_{(k,e)} 1/(k + ey)²` over admissible branches, in closed form.
///
/// `π²/sin²(πy) − 1/y²` is replaced by its Taylor series for `|y| < 0.05`;
/// at `y = 0` this gives `π²/3 − 9/4`.
pub fn phi1(y: f64) -> f64 {
    let reciprocal_sine = if y.abs() < 0.05 {
        // π²(1/sin²z − 1/z²) with z = πy
        let z2 = (PI * y).powi(2);
        let coeffs = [
            1.0 / 3.0,
            1.0 / 15.0,
            2.0 / 189.0,
            1.0 / 675.0,
            2.0 / 10395.0,
            1382.0 / 58046625.0,
            4.0 / 1403325.0,
        ];
        PI * PI * coeffs.iter().rev().fold(0.0, |acc, c| acc * z2 + c)
    } else {
        (PI / (PI * y).sin()).powi(2) - 1.0 / (y * y)
    };
    reciprocal_sine - 1.0 / (1.0 + y).powi(2) - 1.0 / (1.0 - y).powi(2) - 1.0 / (2.0 - y).powi(2)
}

/// `Φ₂(y)` enclosed between two bounds on its series tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phi2Bracket {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub half_width: f64,
    pub truncation: usize,
}

/// `∫_T^∞ dt / ((t + a)(t + a + B))` with `B = G − 2`.
fn phi2_term_integral(t: f64, a: f64) -> f64 {
    let b = *BIG_G - 2.0;
    (b / (t + a)).ln_1p() / b
}

fn phi2_term(t: f64, a: f64) -> f64 {
    1.0 / ((t + a) * (t + a + *BIG_G - 2.0))
}

/// `Φ₂(y) = Σ_{(k,e)} 1/((k + ey)(k + G − 2 + ey))`: the sum over `k ≤ K`
/// plus a tail enclosed by comparison with integrals. The summand is
/// decreasing and convex in `k`, so the tail lies between
/// `∫_{K+1}^∞ + φ(K+1)/2` and `∫_{K+1/2}^∞`.
pub fn phi2(y: f64, truncation: usize) -> Phi2Bracket {
    let truncation = truncation.max(3);
    let big_k = truncation as f64;
    let mut head = NeumaierSum::default();
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (e, first) in [(1.0, 2u64), (-1.0, 3u64)] {
        let a = e * y;
        for k in (first..=truncation as u64).rev() {
            head.add(phi2_term(k as f64, a));
        }
        lower += phi2_term_integral(big_k + 1.0, a) + 0.5 * phi2_term(big_k + 1.0, a);
        upper += phi2_term_integral(big_k + 0.5, a);
    }
    let h = head.value();
    let (lower, upper) = (h + lower, h + upper);
    Phi2Bracket {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        half_width: 0.5 * (upper - lower),
        truncation,
    }
}

/// `S_I(y) = −(G+y)(G+1−y)Φ₁(y) + G·H(y)·Φ₂(y) + G²`, with `Φ₂` taken at
/// the given end of its bracket.
fn s_i_with(y: f64, phi2_value: f64) -> f64 {
    let gr = *BIG_G;
    -(gr + y) * (gr + 1.0 - y) * phi1(y) + gr * folded_h_inv(y) * phi2_value + gr * gr
}

/// `S_I(y) = Σ P_(k,e)(y)/(k + ey)²`.
pub fn s_i(y: f64, truncation: usize) -> f64 {
    s_i_with(y, phi2(y, truncation).value)
}

/// Upper end of `S_I(y)` (the coefficient of `Φ₂` is positive).
pub fn s_i_upper(y: f64, truncation: usize) -> f64 {
    s_i_with(y, phi2(y, truncation).upper)
}

/// `G² − G³(π²/3 − 9/4) + G·Φ₂(0)`.
pub fn s_i_at_zero(truncation: usize) -> f64 {
    let gr = *BIG_G;
    gr * gr - gr.powi(3) * (PI * PI / 3.0 - 2.25) + gr * phi2(0.0, truncation).value
}

/// The closed-form majorant of `S_II(y) = (1/4) Σ |P′_(k,e)(y)|`.
pub fn s_ii_majorant(y: f64) -> f64 {
    let gr = *BIG_G;
    let (p, q) = (gr + y, gr + 1.0 - y);
    (1.0 - 2.0 * y) / (4.0 * p * q) + p * q / (4.0 * gr.powi(3)) * (1.0 / (p * p) + 1.0 / (q * q))
}

/// Certified sup of `S_I` on `[0, 1/2]` against 0.097.
pub fn s1_bound_folded(spacing: f64) -> BoundCertificate {
    certify_sup(
        "S_I",
        |y| s_i_upper(y, PHI2_GRID_TRUNCATION),
        HALF,
        spacing,
        0.097,
    )
}

/// Certified sup of the `S_II` majorant on `[0, 1/2]` against 0.191.
pub fn s2_bound_folded(spacing: f64) -> BoundCertificate {
    certify_sup("S_II majorant", s_ii_majorant, HALF, spacing, 0.191)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldedBoundReport {
    pub s_i: BoundCertificate,
    pub s_ii: BoundCertificate,
    /// `S_I(0)` from the closed form with `Φ₁(0) = π²/3 − 9/4`.
    pub s_i_at_zero: f64,
    pub phi2_at_zero: Phi2Bracket,
    /// Whether the grid maximum of `S_I` sits at `y = 0`.
    pub s_i_max_at_zero: bool,
    pub combined: f64,
    pub target: f64,
    pub pass: bool,
}

/// Both halves of the bound `‖(Uf)′‖∞ ≤ 0.288 ‖f′‖∞`.
pub fn certify_folded(spacing: f64) -> FoldedBoundReport {
    let s_i = s1_bound_folded(spacing);
    let s_ii = s2_bound_folded(spacing);
    let combined = s_i.certified_sup + s_ii.certified_sup;
    FoldedBoundReport {
        s_i_max_at_zero: s_i.argmax == 0.0,
        pass: s_i.pass && s_ii.pass && combined < 0.288,
        s_i,
        s_ii,
        s_i_at_zero: s_i_at_zero(1_000_000),
        phi2_at_zero: phi2(0.0, 1_000_000),
        combined,
        target: 0.288,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi1_series_matches_closed_form_near_switch() {
        let y = 0.05;
        let closed = (PI / (PI * y).sin()).powi(2) - 1.0 / (y * y);
        let z2 = (PI * y).powi(2);
        let series = PI
            * PI
            * (1.0 / 3.0
                + z2 / 15.0
                + 2.0 * z2 * z2 / 189.0
                + z2.powi(3) / 675.0
                + 2.0 * z2.powi(4) / 10395.0);
        assert!((closed - series).abs() < 1e-11);
        assert!((phi1(0.0) - (PI * PI / 3.0 - 2.25)).abs() < 1e-15);
        assert!((phi1(0.049_999) - phi1(0.050_001)).abs() < 1e-5);
    }

    #[test]
    fn phi2_bracket_is_tight() {
        let b = phi2(0.0, 1_000);
        assert!(b.lower <= b.upper);
        assert!(b.half_width < 1e-9);
        assert!(phi2(0.0, 1_000_000).half_width < 1e-10);
        let fine = phi2(0.0, 100_000);
        assert!(fine.value >= b.lower - 1e-15 && fine.value <= b.upper + 1e-15);
    }

    #[test]
    fn s_ii_at_half() {
        let gr = *BIG_G;
        assert!((s_ii_majorant(0.5) - 1.0 / (2.0 * gr.powi(3))).abs() < 1e-15);
        assert!((s_ii_majorant(0.5) - 0.11803).abs() < 1e-5);
    }

    #[test]
    fn s_i_at_zero_agrees_with_general_formula() {
        assert!((s_i(0.0, 10_000) - s_i_at_zero(10_000)).abs() < 1e-14);
    }
}
