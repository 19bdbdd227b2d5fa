//! Cylinder sets, the pushed indicators `U^r χ_F`, and mixing correlations.

use serde::Serialize;

use crate::chebyshev::SampledFunction;
use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::maps::{
    conjugate_j_set, image_range, inverse_branch, inverse_branch_orientation, DigitSequence,
    MapKind, NicfDigit,
};
use crate::measures::{measure_unchecked, DensityKind};
use crate::transfer::{integrate_against_mu, TransferOperator, WeightFamily};

/// An admissible word together with the interval of points it labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderSpec {
    pub word: DigitSequence,
    pub interval: Interval,
}

impl CylinderSpec {
    pub fn new(kind: MapKind, digits: Vec<NicfDigit>) -> Result<Self> {
        if digits.is_empty() {
            return Err(NicfError::InvalidInput(
                "a cylinder needs at least one digit".into(),
            ));
        }
        let word = DigitSequence::new(kind, digits)?;
        let interval = cylinder_interval(&word)?;
        Ok(Self { word, interval })
    }

    pub fn kind(&self) -> MapKind {
        self.word.kind
    }

    pub fn rank(&self) -> usize {
        self.word.digits.len()
    }

    pub fn digits(&self) -> &[NicfDigit] {
        &self.word.digits
    }

    /// `μ(F)` for the invariant measure of the map.
    pub fn measure(&self) -> f64 {
        measure_unchecked(
            DensityKind::invariant_for(self.kind()),
            &IntervalUnion::from(self.interval),
        )
    }
}

/// The closed interval `w_{d₁} ∘ ⋯ ∘ w_{d_r}(R)`, where `R` is the image range
/// of the last digit.
pub fn cylinder_interval(word: &DigitSequence) -> Result<Interval> {
    word.validate()?;
    let Some(&last) = word.digits.last() else {
        return Err(NicfError::InvalidInput("empty word".into()));
    };
    let range = image_range(word.kind, last);
    let compose = |y: f64| {
        word.digits
            .iter()
            .rev()
            .fold(y, |y, &d| inverse_branch(word.kind, d, y))
    };
    let orientation: i8 = word
        .digits
        .iter()
        .map(|&d| inverse_branch_orientation(word.kind, d))
        .product();
    let (a, b) = (compose(range.lo), compose(range.hi));
    Ok(if orientation > 0 {
        Interval { lo: a, hi: b }
    } else {
        Interval { lo: b, hi: a }
    })
}

fn family_for(kind: MapKind) -> Result<WeightFamily> {
    match kind {
        MapKind::Folded => Ok(WeightFamily::FoldedU),
        MapKind::EvenConjugate => Ok(WeightFamily::ConjugateU),
        other => Err(NicfError::KindMismatch(format!(
            "the {other} map has no weight family; use the folded or conjugate map"
        ))),
    }
}

fn pair(d: NicfDigit) -> (u64, i8) {
    match d {
        NicfDigit::Pair { a, e } => (a, e),
        NicfDigit::Signed(_) => unreachable!("validated words of these maps use pairs"),
    }
}

/// `C_F(y) = Π_i P_{d_i}(w_{d_{i+1}} ∘ ⋯ ∘ w_{d_r}(y))`, which equals
/// `(U^r χ_F)(y)`.
pub fn pushed_indicator_at(spec: &CylinderSpec, y: f64) -> Result<f64> {
    let family = family_for(spec.kind())?;
    Ok(pushed_indicator_value(family, spec.digits(), y))
}

fn pushed_indicator_value(family: WeightFamily, digits: &[NicfDigit], y: f64) -> f64 {
    let mut point = y;
    let mut product = 1.0;
    for &d in digits.iter().rev() {
        let (k, e) = pair(d);
        product *= family.weight(k, e, point);
        point = family.branch_point(k, e, point);
    }
    product
}

/// `U^r χ_F` sampled on the grid of `operator`.
#[derive(Debug, Clone)]
pub struct PushedIndicator {
    pub base: CylinderSpec,
    pub function: SampledFunction,
}

pub fn pushed_indicator(
    spec: &CylinderSpec,
    operator: &TransferOperator,
) -> Result<PushedIndicator> {
    let family = family_for(spec.kind())?;
    if family != operator.family() {
        return Err(NicfError::KindMismatch(format!(
            "cylinder of the {} map, operator of the {} family",
            spec.kind(),
            operator.family().name()
        )));
    }
    let digits = spec.digits().to_vec();
    Ok(PushedIndicator {
        base: spec.clone(),
        function: operator.sample(|y| pushed_indicator_value(family, &digits, y)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingPoint {
    pub n: usize,
    /// `μ(T⁻ⁿE ∩ F)`.
    pub joint: f64,
    /// `μ(E) μ(F)`.
    pub product: f64,
    /// `joint − product`, computed directly rather than by subtraction.
    pub correlation: f64,
    /// `|correlation|`.
    pub gap: f64,
}

/// `μ(T⁻ⁿE ∩ F) = ∫_E U^{n−r} C_F dμ` for each `n` in `ns`.
///
/// Since `U1 = 1` and `∫ C_F dμ = μ(F)`, the correlation
/// `μ(T⁻ⁿE ∩ F) − μ(E)μ(F)` equals `∫_E U^{n−r}(C_F − μ(F)) dμ`; the
/// centered function is iterated so that small gaps are resolved relative to
/// their own size rather than to `μ(E)μ(F)`.
pub fn mixing_series(
    e: &IntervalUnion,
    f: &CylinderSpec,
    ns: &[usize],
    operator: &TransferOperator,
) -> Result<Vec<MixingPoint>> {
    let family = operator.family();
    let domain = family.domain();
    if !e.is_within(&domain) {
        return Err(NicfError::InvalidInput(format!(
            "{e} is not contained in the domain {domain}"
        )));
    }
    let r = f.rank();
    if let Some(&n) = ns.iter().find(|&&n| n < r) {
        return Err(NicfError::Unsupported(format!(
            "n = {n} is below the cylinder rank {r}"
        )));
    }
    let base = pushed_indicator(f, operator)?;
    let product = measure_unchecked(family.density(), e) * f.measure();
    let n_max = ns.iter().copied().max().unwrap_or(r);
    let iterates = operator.iterate_centered(&base.function, n_max - r)?;
    Ok(ns
        .iter()
        .map(|&n| {
            let correlation = integrate_against_mu(family, &iterates[n - r], e);
            MixingPoint {
                n,
                joint: product + correlation,
                product,
                correlation,
                gap: correlation.abs(),
            }
        })
        .collect())
}

/// `|μ(T⁻ⁿE ∩ F) − μ(E)μ(F)|`.
pub fn mixing_correlation(
    e: &IntervalUnion,
    f: &CylinderSpec,
    n: usize,
    operator: &TransferOperator,
) -> Result<f64> {
    Ok(mixing_series(e, f, &[n], operator)?[0].gap)
}

/// Folded cylinders whose union is `|F|` for an odd-map cylinder `F`, and the
/// sign of the points of `F`.
///
/// With `s_i = sgn b_i`, the folded digits are `a_i = |b_i|`,
/// `e_i = s_i s_{i+1}`; the sign after the last digit is free unless
/// `|b_r| = 2`, which forces `e_r = +1`.
pub fn odd_to_folded(f: &CylinderSpec) -> Result<(i8, Vec<CylinderSpec>)> {
    if f.kind() != MapKind::Odd {
        return Err(NicfError::KindMismatch(format!(
            "expected an odd-map cylinder, got the {} map",
            f.kind()
        )));
    }
    let signed: Vec<i64> = f
        .digits()
        .iter()
        .map(|&d| match d {
            NicfDigit::Signed(b) => b,
            NicfDigit::Pair { .. } => unreachable!("validated odd words use signed digits"),
        })
        .collect();
    let sign = |b: i64| if b < 0 { -1i8 } else { 1 };
    let r = signed.len();
    let head: Vec<NicfDigit> = signed
        .windows(2)
        .map(|w| NicfDigit::pair(w[0].unsigned_abs(), sign(w[0]) * sign(w[1])))
        .collect();
    let last = signed[r - 1].unsigned_abs();
    let endings: Vec<i8> = if last == 2 { vec![1] } else { vec![1, -1] };
    let parts = endings
        .into_iter()
        .map(|e| {
            let mut digits = head.clone();
            digits.push(NicfDigit::pair(last, e));
            CylinderSpec::new(MapKind::Folded, digits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sign(signed[0]), parts))
}

/// `|μ_o(T_o⁻ⁿE ∩ F) − μ_o(E)μ_o(F)|` for symmetric `E`, computed as half the
/// folded gap of `E ∩ [0, 1/2]` against `|F|`.
pub fn odd_mixing_series(
    e: &IntervalUnion,
    f: &CylinderSpec,
    ns: &[usize],
    operator: &TransferOperator,
) -> Result<Vec<MixingPoint>> {
    if !e.is_symmetric(1e-15) {
        return Err(NicfError::Unsupported(format!(
            "{e} is not symmetric about the origin"
        )));
    }
    let (_, parts) = odd_to_folded(f)?;
    let positive = e.intersect_interval(&Interval { lo: 0.0, hi: 0.5 });
    let mut total: Vec<MixingPoint> = ns
        .iter()
        .map(|&n| MixingPoint {
            n,
            joint: 0.0,
            product: 0.0,
            correlation: 0.0,
            gap: 0.0,
        })
        .collect();
    for part in &parts {
        for (acc, p) in total
            .iter_mut()
            .zip(mixing_series(&positive, part, ns, operator)?)
        {
            acc.joint += 0.5 * p.joint;
            acc.product += 0.5 * p.product;
            acc.correlation += 0.5 * p.correlation;
        }
    }
    for p in &mut total {
        p.gap = p.correlation.abs();
    }
    Ok(total)
}

/// `|μ_e(T_e⁻ⁿE ∩ J⁻¹F̃) − μ_e(E)μ_e(J⁻¹F̃)|`, computed in the conjugated
/// system with `Ẽ = J E`.
pub fn conjugate_mixing_series(
    e: &IntervalUnion,
    f_tilde: &CylinderSpec,
    ns: &[usize],
    operator: &TransferOperator,
) -> Result<Vec<MixingPoint>> {
    if f_tilde.kind() != MapKind::EvenConjugate {
        return Err(NicfError::KindMismatch(format!(
            "expected a cylinder of the conjugate map, got the {} map",
            f_tilde.kind()
        )));
    }
    let e_tilde = conjugate_j_set(e)?;
    mixing_series(&e_tilde, f_tilde, ns, operator)
}

pub fn conjugate_mixing(
    e: &IntervalUnion,
    f_tilde: &CylinderSpec,
    n: usize,
    operator: &TransferOperator,
) -> Result<f64> {
    Ok(conjugate_mixing_series(e, f_tilde, &[n], operator)?[0].gap)
}
