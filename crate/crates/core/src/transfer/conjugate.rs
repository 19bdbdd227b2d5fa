//! Bounds on `‖(Ũf)′‖∞` for the conjugated even map.
//!
//! `(Ũf)′ = S_I f + S_II f`. The first part is bounded by `Φ = Φ₂+Φ₃+Φ₄+Φ₅`,
//! the second by `Ψ = Ψ₂+Ψ₃+Ψ₄+Ψ₅`, both built from the weights `A_k`, `B_k`
//! and their derivatives. These `Φ_k` are unrelated to the folded-map series
//! in [`super::folded`].

use serde::Serialize;

use super::{certify_sup, uniform_grid, BoundCertificate};
use crate::constants::BIG_G;
use crate::interval::Interval;

const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

/// `A_k(x) = (G + x)(1/(k + x) − 1/(k + x + G − 1))`.
pub fn a_k(k: u64, x: f64) -> f64 {
    let gr = *BIG_G;
    let s = k as f64 + x;
    (gr + x) * (1.0 / s - 1.0 / (s + gr - 1.0))
}

/// `B_k(x) = (G + x)(1/(k + x + G − 2) − 1/(k + x))`.
pub fn b_k(k: u64, x: f64) -> f64 {
    let gr = *BIG_G;
    let s = k as f64 + x;
    (gr + x) * (1.0 / (s + gr - 2.0) - 1.0 / s)
}

pub fn a_k_prime(k: u64, x: f64) -> f64 {
    let gr = *BIG_G;
    let s = k as f64 + x;
    let (p, q) = (1.0 / s, 1.0 / (s + gr - 1.0));
    (p - q) * (1.0 - (gr + x) * (p + q))
}

pub fn b_k_prime(k: u64, x: f64) -> f64 {
    let gr = *BIG_G;
    let s = k as f64 + x;
    let (p, q) = (1.0 / (s + gr - 2.0), 1.0 / s);
    (p - q) * (1.0 - (gr + x) * (p + q))
}

/// `[Φ₂, Φ₃, Φ₄, Φ₅](x)`.
pub fn conjugate_phi_terms(x: f64) -> [f64; 4] {
    let gr = *BIG_G;
    [
        1.0 / ((2.0 + x).powi(2) * (gr + 1.0 + x)),
        (gr + x) / ((3.0 + x).powi(2) * (gr + 1.0 + x) * (gr + 2.0 + x)),
        (gr + x) / ((4.0 + x).powi(2) * (gr + 2.0 + x) * (gr + 3.0 + x)),
        (gr + x) / ((5.0 + x).powi(2) * (gr + 3.0 + x)),
    ]
}

/// `Φ(x)`, the bound `|(S_I f)(x)| ≤ Φ(x) ‖f′‖∞`.
pub fn conjugate_phi(x: f64) -> f64 {
    conjugate_phi_terms(x).iter().sum()
}

/// `[Ψ₂, Ψ₃, Ψ₄, Ψ₅](x)`.
///
/// `Ψ₅` is the closed form `3/(2(G + 3 + x)²)`, valid because `A_k′` and
/// `B_k′` are positive for `k ≥ 5` (see [`sign_checks`]).
pub fn conjugate_psi_terms(x: f64) -> [f64; 4] {
    let gr = *BIG_G;
    let pair = |k| a_k_prime(k, x).abs() + b_k_prime(k, x).abs();
    [
        pair(2) / 6.0,
        pair(3) / 4.0,
        0.3 * pair(4),
        1.5 / (gr + 3.0 + x).powi(2),
    ]
}

/// `Ψ(x)`, the bound `|(S_II f)(x)| ≤ Ψ(x) ‖f′‖∞`.
pub fn conjugate_psi(x: f64) -> f64 {
    conjugate_psi_terms(x).iter().sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignChecks {
    pub points: usize,
    /// `A₂′ < 0` and `B₂′ < 0` on the grid.
    pub low_branches_negative: bool,
    /// `A_k′ > 0` and `B_k′ > 0` on the grid for `5 ≤ k ≤ k_max`.
    pub high_branches_positive: bool,
    pub k_max: u64,
}

/// Grid check of the derivative signs that the closed forms of `Ψ₂` and `Ψ₅`
/// rely on.
pub fn sign_checks(points: usize, k_max: u64) -> SignChecks {
    let grid = uniform_grid(UNIT, points);
    let low = grid
        .iter()
        .all(|&x| a_k_prime(2, x) < 0.0 && b_k_prime(2, x) < 0.0);
    let high = grid
        .iter()
        .all(|&x| (5..=k_max).all(|k| a_k_prime(k, x) > 0.0 && b_k_prime(k, x) > 0.0));
    SignChecks {
        points: grid.len(),
        low_branches_negative: low,
        high_branches_positive: high,
        k_max,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    pub phi_at_zero: f64,
    pub certificate: BoundCertificate,
    /// `Φ` is nonincreasing on the certification grid.
    pub decreasing: bool,
}

/// `sup Φ` against 0.1346, and the monotonicity of `Φ`.
pub fn phi_certificate(spacing: f64) -> PhiReport {
    let certificate = certify_sup("Phi", conjugate_phi, UNIT, spacing, 0.1346);
    let n = ((1.0 / spacing).round() as usize).max(1) + 1;
    let values: Vec<f64> = uniform_grid(UNIT, n)
        .into_iter()
        .map(conjugate_phi)
        .collect();
    PhiReport {
        phi_at_zero: conjugate_phi(0.0),
        decreasing: values.windows(2).all(|w| w[1] <= w[0]),
        certificate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    /// `Ψ₂`, `Ψ₃`, `Ψ₄`, `Ψ₅` against 0.0244, 0.0019, 0.0025, 0.0704.
    pub components: Vec<BoundCertificate>,
    /// `sup Ψ` against 0.0992.
    pub total: BoundCertificate,
    /// The certified sup of `Ψ` is below 0.092.
    pub below_smaller_constant: bool,
    /// The certified sup of `Ψ` is below 0.0992.
    pub below_larger_constant: bool,
    pub sign_checks: SignChecks,
    pub note: String,
}

/// Certified sups of `Ψ` and its four parts.
pub fn psi_certificate(spacing: f64) -> PsiReport {
    let names = ["Psi_2", "Psi_3", "Psi_4", "Psi_5"];
    let constants = [0.0244, 0.0019, 0.0025, 0.0704];
    let components: Vec<BoundCertificate> = (0..4)
        .map(|i| {
            certify_sup(
                names[i],
                |x| conjugate_psi_terms(x)[i],
                UNIT,
                spacing,
                constants[i],
            )
        })
        .collect();
    let total = certify_sup("Psi", conjugate_psi, UNIT, spacing, 0.0992);
    let below_smaller_constant = total.certified_sup < 0.092;
    let below_larger_constant = total.certified_sup < 0.0992;
    let mut note = format!(
        "sup Psi = {:.7} (certified), compared with the two printed constants 0.092 and 0.0992;",
        total.certified_sup
    );
    if !below_smaller_constant && !below_larger_constant {
        note.push_str(" both constants are exceeded.");
    } else if !below_smaller_constant {
        note.push_str(" only 0.0992 holds.");
    } else {
        note.push_str(" both constants hold.");
    }
    for c in components.iter().filter(|c| !c.pass) {
        note.push_str(&format!(
            " {} reaches {:.7} at x = {} against the printed {};",
            c.name, c.certified_sup, c.argmax, c.target
        ));
    }
    if note.ends_with(';') {
        note.pop();
        note.push('.');
    }
    PsiReport {
        components,
        total,
        below_smaller_constant,
        below_larger_constant,
        sign_checks: sign_checks(1001, 200),
        note,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateBoundReport {
    pub phi: PhiReport,
    pub psi: PsiReport,
    pub combined: f64,
    pub target: f64,
    pub pass: bool,
}

/// `sup Φ + sup Ψ` against 0.234.
pub fn certify_conjugate(spacing: f64) -> ConjugateBoundReport {
    let phi = phi_certificate(spacing);
    let psi = psi_certificate(spacing);
    let combined = phi.certificate.certified_sup + psi.total.certified_sup;
    ConjugateBoundReport {
        pass: phi.certificate.pass
            && psi.components.iter().all(|c| c.pass)
            && psi.total.pass
            && combined < 0.234,
        phi,
        psi,
        combined,
        target: 0.234,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_forms_of_weights() {
        let gr = *BIG_G;
        for k in 2..20u64 {
            for x in [0.0, 0.3, 1.0] {
                let s = k as f64 + x;
                let a = (gr + x) / (gr * s * (s + gr - 1.0));
                let b = (gr + x) / ((gr + 1.0) * s * (s + gr - 2.0));
                assert!((a_k(k, x) - a).abs() < 1e-15);
                assert!((b_k(k, x) - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for k in [2u64, 3, 4, 7, 30] {
            for x in [0.1, 0.5, 0.9] {
                let fa = (a_k(k, x + h) - a_k(k, x - h)) / (2.0 * h);
                let fb = (b_k(k, x + h) - b_k(k, x - h)) / (2.0 * h);
                assert!((fa - a_k_prime(k, x)).abs() < 1e-8);
                assert!((fb - b_k_prime(k, x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn closed_forms_of_low_and_high_terms() {
        let gr = *BIG_G;
        for x in [0.0, 0.25, 1.0] {
            let psi = conjugate_psi_terms(x);
            assert!((psi[0] - 1.0 / (6.0 * (gr + 1.0 + x).powi(2))).abs() < 1e-15);
            // Σ_{k≥K} (A_k′ + B_k′) = 1/(K+x+G−2) − (G+x)/(K+x+G−2)²
            let big_k = 10_000u64;
            let s = big_k as f64 + x + gr - 2.0;
            let tail: f64 = (5..big_k)
                .map(|k| a_k_prime(k, x) + b_k_prime(k, x))
                .sum::<f64>()
                + 1.0 / s
                - (gr + x) / (s * s);
            assert!((psi[3] - 0.5 * tail).abs() < 1e-13);
        }
        assert!((conjugate_phi_terms(0.0)[3] - gr / (25.0 * (gr + 3.0))).abs() < 1e-15);
        assert!((conjugate_phi_terms(0.0)[3] - 0.01402).abs() < 1e-5);
    }
}
