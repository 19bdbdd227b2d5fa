//! Orbit sampling with reproducible, sharded random streams.
//!
//! Samples are split over a fixed number of shards; shard `i` draws from a
//! ChaCha8 stream keyed by the seed with stream number `i`, so results do not
//! depend on how many threads run them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::interval::Interval;
use crate::maps::{step, MapKind};
use crate::measures::{sample_conjugate_mu, sample_folded_mu};

pub const DEFAULT_SEED: u64 = 0x6e69_6366;
pub const SHARDS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    pub p: f64,
    /// `√(p(1 − p)/N)`.
    pub stderr: f64,
}

impl McEstimate {
    fn from_counts(samples: u64, hits: u64) -> Self {
        let p = if samples == 0 {
            0.0
        } else {
            hits as f64 / samples as f64
        };
        Self {
            samples,
            hits,
            p,
            stderr: (p * (1.0 - p) / samples.max(1) as f64).sqrt(),
        }
    }

    /// `|value − p|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (value - self.p).abs();
        if self.stderr > 0.0 {
            d / self.stderr
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Independent generator for shard `shard`.
pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Fraction of `samples` draws `x = draw(rng)` with `event(x)`.
pub fn estimate(
    samples: u64,
    seed: u64,
    draw: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
    event: impl Fn(f64) -> bool + Sync,
) -> McEstimate {
    let hits = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let n = samples / SHARDS + u64::from(shard < samples % SHARDS);
            let mut rng = shard_rng(seed, shard);
            (0..n).filter(|_| event(draw(&mut rng))).count() as u64
        })
        .sum();
    McEstimate::from_counts(samples, hits)
}

/// Uniform draw from `domain`; the offset is a multiple of `2⁻⁵³`, so
/// `x + 1` is exact for `x ∈ [−1/2, 0)`.
pub fn uniform(domain: Interval) -> impl Fn(&mut ChaCha8Rng) -> f64 + Sync {
    move |rng| domain.lo + domain.length() * rng.gen::<f64>()
}

/// Draw from the invariant probability of `kind` by inverting its
/// distribution function (the Hurwitz dual is not supported and draws NaN).
pub fn invariant(kind: MapKind) -> impl Fn(&mut ChaCha8Rng) -> f64 + Sync {
    move |rng| {
        let u: f64 = rng.gen();
        match kind {
            MapKind::Folded => sample_folded_mu(u),
            MapKind::Odd => {
                let x = sample_folded_mu(u);
                if rng.gen::<bool>() {
                    -x
                } else {
                    x
                }
            }
            MapKind::EvenConjugate => sample_conjugate_mu(u),
            MapKind::Even => {
                let y = sample_conjugate_mu(u);
                if y < 0.5 {
                    y
                } else {
                    y - 1.0
                }
            }
            MapKind::HurwitzDual => f64::NAN,
        }
    }
}

/// `Tⁿx` in floating point.
pub fn orbit_point(kind: MapKind, x: f64, n: usize) -> f64 {
    (0..n).fold(x, |y, _| step(kind, y))
}
