//! Golden-ratio constants shared by every map and measure.

use std::sync::LazyLock;

use serde::Serialize;

/// `G = (√5 + 1) / 2`.
pub static BIG_G: LazyLock<f64> = LazyLock::new(|| (5f64.sqrt() + 1.0) / 2.0);

/// `g = (√5 − 1) / 2 = G − 1 = 1 / G`.
pub static SMALL_G: LazyLock<f64> = LazyLock::new(|| (5f64.sqrt() - 1.0) / 2.0);

/// Wirsing's optimal rate for the regular Gauss map, used only as a reference line.
pub const WIRSING: f64 = 0.303663;

/// `log G`, the normalizing constant of every invariant density here.
pub static LOG_G: LazyLock<f64> = LazyLock::new(|| BIG_G.ln());

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoldenConstants {
    pub big: f64,
    pub small: f64,
    pub wirsing: f64,
}

impl GoldenConstants {
    pub fn new() -> Self {
        Self {
            big: *BIG_G,
            small: *SMALL_G,
            wirsing: WIRSING,
        }
    }

    /// Largest violation of `G − 1 = g`, `G + 1 = G²` and `(2 − G)(G + 1) = 1`.
    pub fn identity_residual(&self) -> f64 {
        let g = self.big;
        [
            (g - 1.0 - self.small).abs(),
            (g + 1.0 - g * g).abs(),
            ((2.0 - g) * (g + 1.0) - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl Default for GoldenConstants {
    fn default() -> Self {
        Self::new()
    }
}
