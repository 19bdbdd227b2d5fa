//! Nearest-integer continued fraction shifts and their transfer operators.
//!
//! The crate covers five related interval maps (the folded NICF map `T`, the
//! odd and even maps `T_o`, `T_e`, the conjugated even map `T̃_e` and the
//! Hurwitz dual `S`), their invariant measures, the Perron–Frobenius
//! operators of `T` and `T̃_e`, bound functionals for the contraction of
//! those operators on derivatives, cylinder sets and mixing correlations, and
//! the Gauss–Kuzmin–Lévy decay experiment.

pub mod chebyshev;
pub mod constants;
pub mod cylinders;
pub mod error;
pub mod gkl;
pub mod interval;
pub mod maps;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;
pub mod transfer;

pub use chebyshev::SampledFunction;
pub use constants::{GoldenConstants, BIG_G, LOG_G, SMALL_G, WIRSING};
pub use error::{NicfError, Result};
pub use interval::{Interval, IntervalUnion};
pub use maps::{DigitSequence, MapKind, NicfDigit};
pub use measures::{DensityKind, MeasureValue};
pub use transfer::{TransferOperator, WeightFamily};
