//! The Gauss–Kuzmin–Lévy experiment: `γ_n = UⁿH`, its distance to the
//! limit, and `λ(T⁻ⁿE)` by the operator and by sampling orbits.

use serde::Serialize;

use crate::chebyshev::SampledFunction;
use crate::constants::{LOG_G, WIRSING};
use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::maps::{conjugate_j_set, MapKind};
use crate::measures::{measure_unchecked, DensityKind};
use crate::montecarlo::{estimate, orbit_point, uniform, McEstimate};
use crate::transfer::{conjugate, folded, TransferOperator, WeightFamily};

/// Errors at or below this are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Window of errors used for the rate fit.
pub const FIT_WINDOW: (f64, f64) = (1e-12, 1e-2);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub map_kind: MapKind,
    pub degree: usize,
    pub truncation: usize,
    pub n_range: [usize; 2],
    /// `e(n) = sup |γ_n h − c h|` for `n = 0, …, n_max`.
    pub errors: Vec<f64>,
    /// The limit `c` of `γ_n`.
    pub limit_constant: f64,
    /// `sup |(γ_n − ∫γ_n dμ) h|` from the re-centered iteration, which keeps
    /// resolving the decay after `errors` reaches rounding level.
    pub centered_errors: Vec<f64>,
    /// `∫ γ_n h dλ − λ(domain)`, largest over `n`.
    pub max_mass_residual: f64,
    /// `‖γ_n′‖∞` for each `n`, from the re-centered iterates.
    pub derivative_norms: Vec<f64>,
    /// `exp` of the least-squares slope of `log e(n)` over the fit window.
    pub fitted_rate: Option<f64>,
    pub fit_window: Option<[usize; 2]>,
    /// Largest `e(n+1)/e(n)` for `n ≥ 3` with `e(n+1)` above the noise floor.
    pub max_step_ratio: Option<f64>,
    pub target_rate: f64,
    pub verdict: bool,
    pub warnings: Vec<String>,
}

fn family_of(kind: MapKind) -> Result<WeightFamily> {
    match kind {
        MapKind::Folded => Ok(WeightFamily::FoldedU),
        MapKind::EvenConjugate => Ok(WeightFamily::ConjugateU),
        other => Err(NicfError::Unsupported(format!(
            "the decay experiment runs on the folded or conjugate map, not the {other} map"
        ))),
    }
}

/// The density `h` against which `γ_n` is measured, and the limit constant:
/// `h` unnormalized with `c = 1/(2 log G)` for the folded map, `h̃_e`
/// normalized with `c = 1` for the conjugate map.
fn reference(family: WeightFamily) -> (impl Fn(f64) -> f64, f64) {
    let kind = family.density();
    let scale = match family {
        WeightFamily::FoldedU => 1.0,
        WeightFamily::ConjugateU => kind.normalization(),
    };
    let limit = match family {
        WeightFamily::FoldedU => 0.5 / *LOG_G,
        WeightFamily::ConjugateU => 1.0,
    };
    (move |x: f64| scale * kind.raw_unchecked(x), limit)
}

/// `γ_0 = 1/h, γ_1, …, γ_n` on the grid of `operator`.
pub fn gamma_iterates(operator: &TransferOperator, n: usize) -> Result<Vec<SampledFunction>> {
    let (h, _) = reference(operator.family());
    operator.iterate(&operator.sample(|x| 1.0 / h(x)), n)
}

/// Least-squares slope of `(n, log e)` over `points`.
fn fit_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 as f64 - mx) * (p.1.ln() - my))
        .sum();
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Iterates `γ_n = UⁿH` up to `n_max` and measures `e(n)`.
pub fn gkl_iterate(operator: &TransferOperator, n_max: usize) -> Result<DecayReport> {
    if n_max < 2 {
        return Err(NicfError::InvalidInput(format!(
            "n_max = {n_max} must be at least 2"
        )));
    }
    let family = operator.family();
    let map_kind = family.map_kind();
    let (h, c) = reference(family);
    let domain = family.domain();
    let full = IntervalUnion::from(domain);
    let gammas = gamma_iterates(operator, n_max)?;
    let errors: Vec<f64> = gammas
        .iter()
        .map(|g| g.map_values(|x, v| (v - c) * h(x)).sup_norm())
        .collect();
    let max_mass_residual = gammas
        .iter()
        .map(|g| (g.integrate(&full, &h) - domain.length()).abs())
        .fold(0.0, f64::max);
    let centered = operator.iterate_centered(&gammas[0], n_max)?;
    let centered_errors = centered
        .iter()
        .map(|g| g.map_values(|x, v| v * h(x)).sup_norm())
        .collect();
    let derivative_norms = centered.iter().map(|g| g.derivative().sup_norm()).collect();

    let window: Vec<(usize, f64)> = errors
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, e)| e > FIT_WINDOW.0 && e < FIT_WINDOW.1)
        .collect();
    let fitted_rate = fit_slope(&window).map(f64::exp);
    let fit_window = (window.len() >= 2).then(|| [window[0].0, window[window.len() - 1].0]);
    let max_step_ratio = (3..n_max)
        .filter(|&n| errors[n + 1] > NOISE_FLOOR)
        .map(|n| errors[n + 1] / errors[n])
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        });

    let target_rate = family.target_rate();
    let mut warnings = Vec::new();
    if let Some(first) = errors.iter().position(|&e| e <= NOISE_FLOOR) {
        if first < n_max {
            warnings.push(format!(
                "noise floor {NOISE_FLOOR:e} reached at n = {first}; a higher collocation degree \
                 than {} would resolve later iterates",
                operator.degree()
            ));
        }
    }
    if fitted_rate.is_none() {
        warnings.push("fewer than two errors inside the fit window".into());
    }
    let verdict = fitted_rate.is_some_and(|r| r <= target_rate)
        && max_step_ratio.is_none_or(|r| r <= target_rate);
    Ok(DecayReport {
        map_kind,
        degree: operator.degree(),
        truncation: operator.truncation(),
        n_range: [0, n_max],
        errors,
        centered_errors,
        limit_constant: c,
        max_mass_residual,
        derivative_norms,
        fitted_rate,
        fit_window,
        max_step_ratio,
        target_rate,
        verdict,
        warnings,
    })
}

/// Builds the operator for `kind` and runs [`gkl_iterate`].
pub fn decay_experiment(
    kind: MapKind,
    n_max: usize,
    degree: usize,
    truncation: usize,
) -> Result<DecayReport> {
    let op = TransferOperator::new(family_of(kind)?, degree, truncation)?;
    gkl_iterate(&op, n_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageLimitReport {
    pub map_kind: MapKind,
    pub set: IntervalUnion,
    pub n: usize,
    /// `λ(T⁻ⁿE)` from the operator.
    pub operator_value: f64,
    /// The limit of `λ(T⁻ⁿE)`: `μ(E)/2` for the folded map, the invariant
    /// measure of `E` otherwise.
    pub limit: f64,
    /// `|operator_value − limit| / μ(E)`.
    pub residual: f64,
    pub monte_carlo: Option<McEstimate>,
    /// `|operator_value − Monte Carlo| / standard error`.
    pub z_score: Option<f64>,
}

/// `λ(T⁻ⁿE)` on `[0, 1/2]` from `γ_n`, with `E ⊆ [0, 1/2]`.
fn folded_preimage(gamma_n: &SampledFunction, e: &IntervalUnion) -> f64 {
    let (h, _) = reference(WeightFamily::FoldedU);
    gamma_n.integrate(e, h)
}

/// `λ(map⁻ⁿE)` by the operator route, and optionally by `mc_samples` uniform
/// orbits.
///
/// The odd map reduces to the folded one through
/// `λ(T_o⁻ⁿE) = λ(T⁻ⁿE₊) + λ(T⁻ⁿ(−E₋))`, and the even map to the conjugate
/// one through `λ(T_e⁻ⁿE) = λ(T̃_e⁻ⁿ JE)`.
pub fn preimage_limit_check(
    kind: MapKind,
    e: &IntervalUnion,
    n: usize,
    operator: &TransferOperator,
    mc_samples: u64,
    seed: u64,
) -> Result<PreimageLimitReport> {
    let domain = kind.domain();
    if !e.is_within(&domain) {
        return Err(NicfError::InvalidInput(format!(
            "{e} is not contained in the domain {domain} of the {kind} map"
        )));
    }
    if n < 1 {
        return Err(NicfError::InvalidInput("n must be at least 1".into()));
    }
    let needed = match kind {
        MapKind::Folded | MapKind::Odd => WeightFamily::FoldedU,
        MapKind::Even | MapKind::EvenConjugate => WeightFamily::ConjugateU,
        MapKind::HurwitzDual => {
            return Err(NicfError::Unsupported(
                "no transfer operator is implemented for the Hurwitz dual map".into(),
            ))
        }
    };
    if operator.family() != needed {
        return Err(NicfError::KindMismatch(format!(
            "the {kind} map needs the {} operator",
            needed.name()
        )));
    }
    let gamma_n = gamma_iterates(operator, n)?.pop().expect("n + 1 iterates");
    let half = Interval { lo: 0.0, hi: 0.5 };
    let (operator_value, limit) = match kind {
        MapKind::Folded => (
            folded_preimage(&gamma_n, e),
            0.5 * measure_unchecked(DensityKind::FoldedMu, e),
        ),
        MapKind::Odd => {
            let pos = e.intersect_interval(&half);
            let neg = e.intersect_interval(&half.negate()).negate();
            (
                folded_preimage(&gamma_n, &pos) + folded_preimage(&gamma_n, &neg),
                measure_unchecked(DensityKind::OddMuO, e),
            )
        }
        MapKind::Even | MapKind::EvenConjugate => {
            let target = if kind == MapKind::Even {
                conjugate_j_set(e)?
            } else {
                e.clone()
            };
            let (h, _) = reference(WeightFamily::ConjugateU);
            (
                gamma_n.integrate(&target, h),
                measure_unchecked(DensityKind::ConjugateMuE, &target),
            )
        }
        MapKind::HurwitzDual => unreachable!(),
    };
    let mu_e = measure_unchecked(DensityKind::invariant_for(kind), e);
    let residual = if mu_e > 0.0 {
        (operator_value - limit).abs() / mu_e
    } else {
        (operator_value - limit).abs()
    };
    let monte_carlo = (mc_samples > 0).then(|| {
        // the estimate is a fraction of λ(domain); rescale to absolute measure
        let est = estimate(mc_samples, seed, uniform(domain), |x| {
            e.contains(orbit_point(kind, x, n))
        });
        McEstimate {
            p: est.p * domain.length(),
            stderr: est.stderr * domain.length(),
            ..est
        }
    });
    let z_score = monte_carlo.map(|m| m.z_score(operator_value));
    Ok(PreimageLimitReport {
        map_kind: kind,
        set: e.clone(),
        n,
        operator_value,
        limit,
        residual,
        monte_carlo,
        z_score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevyRow {
    pub name: String,
    pub target: f64,
    pub certified_sup: Option<f64>,
    pub fitted_rate: Option<f64>,
}

/// Printed constants next to the certified bound and the fitted rate for both
/// operators, with the Wirsing constant of the Gauss map for reference.
pub fn levy_comparison(degree: usize, truncation: usize, n_max: usize) -> Result<Vec<LevyRow>> {
    let spacing = 1e-4;
    let folded_cert = folded::certify_folded(spacing);
    let conj_cert = conjugate::certify_conjugate(spacing);
    let mut rows = Vec::new();
    for (family, certified) in [
        (WeightFamily::FoldedU, folded_cert.combined),
        (WeightFamily::ConjugateU, conj_cert.combined),
    ] {
        let op = TransferOperator::new(family, degree, truncation)?;
        let report = gkl_iterate(&op, n_max)?;
        rows.push(LevyRow {
            name: family.name().to_string(),
            target: family.target_rate(),
            certified_sup: Some(certified),
            fitted_rate: report.fitted_rate,
        });
    }
    rows.push(LevyRow {
        name: "wirsing".into(),
        target: WIRSING,
        certified_sup: None,
        fitted_rate: None,
    });
    Ok(rows)
}
