//! Invariant densities of the five maps, their closed-form primitives, and
//! measures of preimages computed branch by branch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constants::{BIG_G, LOG_G, SMALL_G};
use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};
use crate::maps::MapKind;
use crate::quadrature::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    /// `μ` on `[0, 1/2]`, invariant for the folded map.
    FoldedMu,
    /// `μ_o` on `[−1/2, 1/2]`, invariant for the odd map.
    OddMuO,
    /// `μ_e` on `[−1/2, 1/2]`, invariant for the even map.
    EvenMuE,
    /// `μ̃_e = J_* μ_e` on `[0, 1]`.
    ConjugateMuE,
    /// `ν` on `[0, g]`, invariant for the Hurwitz dual map.
    HurwitzNu,
    /// Lebesgue measure normalized to the domain of the given map.
    Lebesgue(MapKind),
}

impl DensityKind {
    /// The invariant density of `kind`.
    pub fn invariant_for(kind: MapKind) -> Self {
        match kind {
            MapKind::Folded => DensityKind::FoldedMu,
            MapKind::Odd => DensityKind::OddMuO,
            MapKind::Even => DensityKind::EvenMuE,
            MapKind::EvenConjugate => DensityKind::ConjugateMuE,
            MapKind::HurwitzDual => DensityKind::HurwitzNu,
        }
    }

    pub fn map_kind(self) -> MapKind {
        match self {
            DensityKind::FoldedMu => MapKind::Folded,
            DensityKind::OddMuO => MapKind::Odd,
            DensityKind::EvenMuE => MapKind::Even,
            DensityKind::ConjugateMuE => MapKind::EvenConjugate,
            DensityKind::HurwitzNu => MapKind::HurwitzDual,
            DensityKind::Lebesgue(kind) => kind,
        }
    }

    pub fn domain(self) -> Interval {
        self.map_kind().domain()
    }

    /// The constant `C` in `density = C · raw_density`.
    pub fn normalization(self) -> f64 {
        match self {
            DensityKind::OddMuO => 0.5 / *LOG_G,
            DensityKind::Lebesgue(kind) => 1.0 / kind.domain().length(),
            _ => 1.0 / *LOG_G,
        }
    }

    fn check(self, x: f64) -> Result<()> {
        let d = self.domain();
        if d.contains(x) {
            Ok(())
        } else {
            Err(NicfError::Domain {
                what: format!("the density {self:?}"),
                x,
                lo: d.lo,
                hi: d.hi,
            })
        }
    }

    /// Unnormalized density without domain checking.
    pub(crate) fn raw_unchecked(self, x: f64) -> f64 {
        let gr = *BIG_G;
        match self {
            DensityKind::FoldedMu => 1.0 / (gr + x) + 1.0 / (gr + 1.0 - x),
            DensityKind::OddMuO => {
                let a = x.abs();
                1.0 / (gr + a) + 1.0 / (gr + 1.0 - a)
            }
            DensityKind::EvenMuE => {
                if x >= 0.0 {
                    1.0 / (gr + x)
                } else {
                    1.0 / (gr + 1.0 + x)
                }
            }
            DensityKind::ConjugateMuE => 1.0 / (gr + x),
            DensityKind::HurwitzNu => {
                let g = *SMALL_G;
                if x < g * g {
                    1.0 / (2.0 + x) + 1.0 / (2.0 - x)
                } else {
                    1.0 / (2.0 + x)
                }
            }
            DensityKind::Lebesgue(_) => 1.0,
        }
    }

    /// Normalized primitive: `measure([a, b]) = primitive(b) − primitive(a)`.
    pub(crate) fn primitive(self, x: f64) -> f64 {
        let gr = *BIG_G;
        let c = self.normalization();
        match self {
            DensityKind::FoldedMu => c * ((x / gr).ln_1p() - (-x / (gr + 1.0)).ln_1p()),
            DensityKind::OddMuO => {
                let a = x.abs();
                let v = c * ((a / gr).ln_1p() - (-a / (gr + 1.0)).ln_1p());
                if x < 0.0 {
                    -v
                } else {
                    v
                }
            }
            DensityKind::EvenMuE => {
                if x >= 0.0 {
                    c * (x / gr).ln_1p()
                } else {
                    c * (x / (gr + 1.0)).ln_1p()
                }
            }
            DensityKind::ConjugateMuE => c * (x / gr).ln_1p(),
            DensityKind::HurwitzNu => {
                let g = *SMALL_G;
                let g2 = g * g;
                let left = (x.min(g2) * -0.5).ln_1p();
                c * ((0.5 * x).ln_1p() - left)
            }
            DensityKind::Lebesgue(_) => c * x,
        }
    }
}

/// Unnormalized density `h` (e.g. `1/(G+x) + 1/(G+1−x)` for the folded map).
pub fn raw_density(kind: DensityKind, x: f64) -> Result<f64> {
    kind.check(x)?;
    Ok(kind.raw_unchecked(x))
}

/// Normalized density `C·h`.
pub fn density(kind: DensityKind, x: f64) -> Result<f64> {
    kind.check(x)?;
    Ok(kind.normalization() * kind.raw_unchecked(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: DensityKind,
    pub set: IntervalUnion,
}

/// Measure of a finite union of intervals, by closed-form primitives.
pub fn measure(kind: DensityKind, set: &IntervalUnion) -> Result<MeasureValue> {
    let domain = kind.domain();
    if !set.is_within(&domain) {
        return Err(NicfError::InvalidInput(format!(
            "{set} is not contained in the domain {domain} of {kind:?}"
        )));
    }
    Ok(MeasureValue {
        value: measure_unchecked(kind, set),
        kind,
        set: set.clone(),
    })
}

pub(crate) fn measure_unchecked(kind: DensityKind, set: &IntervalUnion) -> f64 {
    set.parts()
        .iter()
        .map(|p| interval_measure(kind, p.lo, p.hi))
        .sum()
}

fn interval_measure(kind: DensityKind, a: f64, b: f64) -> f64 {
    (kind.primitive(b.max(a)) - kind.primitive(a.min(b))).max(0.0)
}

/// Measure of the interval spanned by two points, in either order.
fn span_measure(kind: DensityKind, a: f64, b: f64) -> f64 {
    (kind.primitive(a) - kind.primitive(b)).abs()
}

/// `μ(T⁻¹E)` for the invariant measure `μ` of `map`, summing branch preimages
/// `k ≤ truncation` directly and the remaining branches in closed form.
///
/// The tail uses `Σ_{k>K} w_k² h(w_k) = 1/(K + G − 1 ± y)`, which telescopes
/// for every map here (with `1/2` in place of `G − 1` for the Hurwitz dual).
pub fn preimage_measure(map: MapKind, set: &IntervalUnion, truncation: usize) -> Result<f64> {
    let domain = map.domain();
    if !set.is_within(&domain) {
        return Err(NicfError::InvalidInput(format!(
            "{set} is not contained in the domain {domain} of the {map} map"
        )));
    }
    if truncation < 3 {
        return Err(NicfError::InvalidInput(
            "truncation must be at least 3".into(),
        ));
    }
    let kind = DensityKind::invariant_for(map);
    let c = kind.normalization();
    let shift = *BIG_G - 1.0;
    let big_k = truncation as f64;
    let mut acc = NeumaierSum::default();
    // ∫_lo^hi dy / (base + y)  and  ∫_lo^hi dy / (base − y)
    let up = |base: f64, lo: f64, hi: f64| ((hi - lo) / (base + lo)).ln_1p();
    let down = |base: f64, lo: f64, hi: f64| ((hi - lo) / (base - hi)).ln_1p();
    let nonneg = Interval { lo: 0.0, hi: 0.5 };
    let nonpos = Interval { lo: -0.5, hi: 0.0 };

    for part in set.parts() {
        let (lo, hi) = (part.lo, part.hi);
        match map {
            MapKind::Folded => {
                for k in (2..=truncation).rev() {
                    let kf = k as f64;
                    acc.add(span_measure(kind, 1.0 / (kf + lo), 1.0 / (kf + hi)));
                    if k >= 3 {
                        acc.add(span_measure(kind, 1.0 / (kf - lo), 1.0 / (kf - hi)));
                    }
                }
                let base = big_k + shift;
                acc.add(c * (up(base, lo, hi) + down(base, lo, hi)));
            }
            MapKind::Odd => {
                for k in (2..=truncation).rev() {
                    let kf = k as f64;
                    let (pos, neg) = if k == 2 {
                        (part.intersect(&nonneg), part.intersect(&nonpos))
                    } else {
                        (Some(*part), Some(*part))
                    };
                    if let Some(p) = pos {
                        acc.add(span_measure(kind, 1.0 / (kf + p.lo), 1.0 / (kf + p.hi)));
                    }
                    if let Some(p) = neg {
                        acc.add(span_measure(kind, 1.0 / (p.lo - kf), 1.0 / (p.hi - kf)));
                    }
                }
                let base = big_k + shift;
                acc.add(c * (up(base, lo, hi) + down(base, lo, hi)));
            }
            MapKind::Even => {
                for k in (2..=truncation).rev() {
                    let kf = k as f64;
                    let allowed = if k == 2 {
                        part.intersect(&nonneg)
                    } else {
                        Some(*part)
                    };
                    if let Some(p) = allowed {
                        let (a, b) = (1.0 / (kf + p.lo), 1.0 / (kf + p.hi));
                        acc.add(span_measure(kind, a, b));
                        acc.add(span_measure(kind, -a, -b));
                    }
                }
                acc.add(c * up(big_k + shift, lo, hi));
            }
            MapKind::EvenConjugate => {
                for k in (2..=truncation).rev() {
                    let kf = k as f64;
                    let (a, b) = (1.0 / (kf + lo), 1.0 / (kf + hi));
                    acc.add(span_measure(kind, a, b));
                    acc.add(span_measure(kind, 1.0 - a, 1.0 - b));
                }
                acc.add(c * up(big_k + shift, lo, hi));
            }
            MapKind::HurwitzDual => {
                let g = *SMALL_G;
                let low = part.intersect(&Interval { lo: 0.0, hi: g * g });
                for k in (2..=truncation).rev() {
                    let kf = k as f64;
                    acc.add(span_measure(kind, 1.0 / (kf + lo), 1.0 / (kf + hi)));
                    if let Some(p) = low {
                        acc.add(span_measure(kind, 1.0 / (kf - p.lo), 1.0 / (kf - p.hi)));
                    }
                }
                let base = big_k + 0.5;
                acc.add(c * up(base, lo, hi));
                if let Some(p) = low {
                    acc.add(c * down(base, p.lo, p.hi));
                }
            }
        }
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushforwardReport {
    pub samples: usize,
    pub max_discrepancy: f64,
    pub worst: Option<Interval>,
}

/// Checks `μ(E) = 2 μ_o(E)` on random subintervals of `[0, 1/2]`.
pub fn pushforward_check(n_samples: usize, seed: u64) -> PushforwardReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PushforwardReport {
        samples: n_samples,
        max_discrepancy: 0.0,
        worst: None,
    };
    for _ in 0..n_samples {
        let e = Interval::spanning(rng.gen_range(0.0..=0.5), rng.gen_range(0.0..=0.5));
        let set = IntervalUnion::from(e);
        let mu = measure_unchecked(DensityKind::FoldedMu, &set);
        let mu_o = measure_unchecked(DensityKind::OddMuO, &set);
        let d = (mu - 2.0 * mu_o).abs();
        if d > report.max_discrepancy || report.worst.is_none() {
            report.max_discrepancy = report.max_discrepancy.max(d);
            report.worst = Some(e);
        }
    }
    report
}

/// Samples from the invariant probability of the folded map (inverse CDF).
pub(crate) fn sample_folded_mu(u: f64) -> f64 {
    let gr = *BIG_G;
    let p = gr.powf(u + 1.0);
    ((gr + 1.0) * (p - gr) / (gr + 1.0 + p)).clamp(0.0, 0.5)
}

/// Samples from `μ̃_e` on `[0, 1]` (inverse CDF).
pub(crate) fn sample_conjugate_mu(u: f64) -> f64 {
    let gr = *BIG_G;
    (gr * (u * *LOG_G).exp_m1()).clamp(0.0, 1.0)
}
