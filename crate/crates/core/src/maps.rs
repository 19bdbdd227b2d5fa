//! The five interval maps, their digit rules, expansion and reconstruction.
//!
//! | kind            | domain        | map                                   |
//! |-----------------|---------------|---------------------------------------|
//! | `Folded`        | `[0, 1/2]`    | `T(x) = |1/x − ⌊1/x + 1/2⌋|`          |
//! | `Odd`           | `[−1/2, 1/2]` | `T_o(x) = 1/x − b`, `b = sgn x·⌊1/|x| + 1/2⌋` |
//! | `Even`          | `[−1/2, 1/2]` | `T_e(x) = 1/|x| − ⌊1/|x| + 1/2⌋`      |
//! | `EvenConjugate` | `[0, 1]`      | `T̃_e = J T_e J⁻¹`                     |
//! | `HurwitzDual`   | `[0, g]`      | `S(x) = |1/x − i|`, `i + g − 1 ≤ 1/x < i + g` |
//!
//! All maps send 0 to 0. Branch boundaries follow the closed intervals of the
//! folded map and the half-open intervals `2/(2k+1) < |x| ≤ 2/(2k−1)` of the
//! odd and even maps, which is what makes `T_o` exactly odd in floating point.
//!
//! Digit conventions:
//! * folded: `a = ⌊1/x + 1/2⌋`, `e = sign(1/x − a)` with `e = +1` when the
//!   difference is exactly zero (rational inputs);
//! * even: `a = ⌊1/|x| + 1/2⌋`, `e = sign(x)`, so that
//!   `x = e₁/(a₁ + e₂/(a₂ + …))` and `a_i + e_{i+1} ≥ 2`;
//! * conjugate even: `(k, +1)` for `x ∈ (1/(k+1), 1/k]`, `(k, −1)` for the
//!   mirror image `1 − x`, i.e. the branches `1/(k+y)` and `1 − 1/(k+y)`;
//! * Hurwitz dual: `(i, e)` with `e = sign(1/x − i)`.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeTuple;
use serde::{Deserialize, Serialize, Serializer};

use crate::constants::SMALL_G;
use crate::error::{NicfError, Result};
use crate::interval::{Interval, IntervalUnion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Folded,
    Odd,
    Even,
    EvenConjugate,
    HurwitzDual,
}

impl MapKind {
    pub const ALL: [MapKind; 5] = [
        MapKind::Folded,
        MapKind::Odd,
        MapKind::Even,
        MapKind::EvenConjugate,
        MapKind::HurwitzDual,
    ];

    pub fn domain(self) -> Interval {
        match self {
            MapKind::Folded => Interval { lo: 0.0, hi: 0.5 },
            MapKind::Odd | MapKind::Even => Interval { lo: -0.5, hi: 0.5 },
            MapKind::EvenConjugate => Interval { lo: 0.0, hi: 1.0 },
            MapKind::HurwitzDual => Interval {
                lo: 0.0,
                hi: *SMALL_G,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Folded => "folded",
            MapKind::Odd => "odd",
            MapKind::Even => "even",
            MapKind::EvenConjugate => "even-conjugate",
            MapKind::HurwitzDual => "hurwitz-dual",
        }
    }

    pub fn check_domain(self, x: f64) -> Result<()> {
        let d = self.domain();
        if d.contains(x) {
            Ok(())
        } else {
            Err(NicfError::Domain {
                what: format!("the {} map", self.name()),
                x,
                lo: d.lo,
                hi: d.hi,
            })
        }
    }

    fn uses_signed_digits(self) -> bool {
        self == MapKind::Odd
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = NicfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "folded" => Ok(MapKind::Folded),
            "odd" => Ok(MapKind::Odd),
            "even" => Ok(MapKind::Even),
            "conjugate" | "even-conjugate" => Ok(MapKind::EvenConjugate),
            "hurwitz" | "hurwitz-dual" => Ok(MapKind::HurwitzDual),
            other => Err(NicfError::InvalidInput(format!(
                "unknown map kind {other:?} (expected folded, odd, even, conjugate or hurwitz)"
            ))),
        }
    }
}

/// One step of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NicfDigit {
    /// `(a, e)` with `e ∈ {−1, +1}`.
    Pair { a: u64, e: i8 },
    /// Signed partial quotient `b` of the odd map.
    Signed(i64),
}

impl NicfDigit {
    pub fn pair(a: u64, e: i8) -> Self {
        NicfDigit::Pair { a, e }
    }

    fn as_pair(self) -> Option<(u64, i8)> {
        match self {
            NicfDigit::Pair { a, e } => Some((a, e)),
            NicfDigit::Signed(_) => None,
        }
    }
}

impl fmt::Display for NicfDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NicfDigit::Pair { a, e } => write!(f, "({a},{e:+})"),
            NicfDigit::Signed(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for NicfDigit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            NicfDigit::Pair { a, e } => {
                let mut t = serializer.serialize_tuple(2)?;
                t.serialize_element(&a)?;
                t.serialize_element(&e)?;
                t.end()
            }
            NicfDigit::Signed(b) => serializer.serialize_i64(b),
        }
    }
}

/// A finite prefix of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitSequence {
    pub kind: MapKind,
    pub digits: Vec<NicfDigit>,
    /// The orbit reached the terminal point (0, or 1 for the conjugate map).
    pub terminated: bool,
}

impl DigitSequence {
    /// Builds and validates a word.
    pub fn new(kind: MapKind, digits: Vec<NicfDigit>) -> Result<Self> {
        let seq = Self {
            kind,
            digits,
            terminated: false,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Checks per-digit and consecutive-digit admissibility.
    pub fn validate(&self) -> Result<()> {
        for (i, d) in self.digits.iter().enumerate() {
            check_digit(self.kind, *d)
                .map_err(|msg| NicfError::Inadmissible(format!("digit {} = {d}: {msg}", i + 1)))?;
        }
        for (i, pair) in self.digits.windows(2).enumerate() {
            check_transition(self.kind, pair[0], pair[1]).map_err(|msg| {
                NicfError::Inadmissible(format!(
                    "digits {} and {} = {}, {}: {msg}",
                    i + 1,
                    i + 2,
                    pair[0],
                    pair[1]
                ))
            })?;
        }
        Ok(())
    }
}

fn check_digit(kind: MapKind, d: NicfDigit) -> std::result::Result<(), String> {
    if kind.uses_signed_digits() {
        return match d {
            NicfDigit::Signed(b) if b.unsigned_abs() >= 2 => Ok(()),
            NicfDigit::Signed(_) => Err("odd-map digits need |b| >= 2".into()),
            NicfDigit::Pair { .. } => Err("odd-map digits are signed integers".into()),
        };
    }
    let (a, e) = d
        .as_pair()
        .ok_or_else(|| format!("{kind} digits are (a, e) pairs"))?;
    if e != 1 && e != -1 {
        return Err("e must be +1 or -1".into());
    }
    if a < 2 {
        return Err("a >= 2 is required".into());
    }
    if kind == MapKind::Folded && a == 2 && e == -1 {
        return Err("a + e >= 2 is required, so (2,-1) is forbidden".into());
    }
    Ok(())
}

fn check_transition(
    kind: MapKind,
    d: NicfDigit,
    next: NicfDigit,
) -> std::result::Result<(), String> {
    match kind {
        MapKind::Odd => match (d, next) {
            (NicfDigit::Signed(2), NicfDigit::Signed(b)) if b < 2 => {
                Err("b_i = 2 requires b_{i+1} >= 2".into())
            }
            (NicfDigit::Signed(-2), NicfDigit::Signed(b)) if b > -2 => {
                Err("b_i = -2 requires b_{i+1} <= -2".into())
            }
            _ => Ok(()),
        },
        MapKind::Even => match (d.as_pair(), next.as_pair()) {
            (Some((2, _)), Some((_, -1))) => Err("a_i + e_{i+1} >= 2 is required".into()),
            _ => Ok(()),
        },
        MapKind::HurwitzDual => match (d.as_pair(), next.as_pair()) {
            (Some((_, -1)), Some((i, _))) if i < 3 => {
                Err("e_i = -1 forces the next partial quotient to be >= 3".into())
            }
            _ => Ok(()),
        },
        MapKind::Folded | MapKind::EvenConjugate => Ok(()),
    }
}

fn is_terminal(kind: MapKind, x: f64) -> bool {
    x == 0.0 || (kind == MapKind::EvenConjugate && x == 1.0)
}

#[inline]
fn nearest_quotient(r: f64) -> f64 {
    (r + 0.5).floor()
}

#[inline]
fn gauss(z: f64) -> f64 {
    let r = 1.0 / z;
    if r.is_finite() {
        r - r.floor()
    } else {
        0.0
    }
}

/// Applies the map without checking the domain.
pub(crate) fn step(kind: MapKind, x: f64) -> f64 {
    if is_terminal(kind, x) {
        return 0.0;
    }
    match kind {
        MapKind::Folded => {
            let r = 1.0 / x;
            if !r.is_finite() {
                return 0.0;
            }
            (r - nearest_quotient(r)).abs()
        }
        MapKind::Odd => {
            let r = 1.0 / x.abs();
            if !r.is_finite() {
                return 0.0;
            }
            let t = r - nearest_quotient(r);
            if t == 0.0 {
                0.0
            } else if x < 0.0 {
                -t
            } else {
                t
            }
        }
        MapKind::Even => {
            let r = 1.0 / x.abs();
            if !r.is_finite() {
                return 0.0;
            }
            r - nearest_quotient(r)
        }
        MapKind::EvenConjugate => {
            if x <= 0.5 {
                gauss(x)
            } else {
                gauss(1.0 - x)
            }
        }
        MapKind::HurwitzDual => {
            let r = 1.0 / x;
            if !r.is_finite() {
                return 0.0;
            }
            (r - (r + 1.0 - *SMALL_G).floor()).abs()
        }
    }
}

/// The first digit of `x` (which must not be a terminal point).
pub(crate) fn first_digit(kind: MapKind, x: f64) -> NicfDigit {
    let quotient = |r: f64| -> u64 { r as u64 };
    match kind {
        MapKind::Folded => {
            let r = 1.0 / x;
            let a = nearest_quotient(r);
            let e = if r - a < 0.0 { -1 } else { 1 };
            NicfDigit::Pair { a: quotient(a), e }
        }
        MapKind::Odd => {
            let a = nearest_quotient(1.0 / x.abs());
            let b = (a as i64).saturating_mul(if x < 0.0 { -1 } else { 1 });
            NicfDigit::Signed(b)
        }
        MapKind::Even => {
            let a = nearest_quotient(1.0 / x.abs());
            let e = if x < 0.0 { -1 } else { 1 };
            NicfDigit::Pair { a: quotient(a), e }
        }
        MapKind::EvenConjugate => {
            if x <= 0.5 {
                NicfDigit::Pair {
                    a: quotient((1.0 / x).floor()),
                    e: 1,
                }
            } else {
                NicfDigit::Pair {
                    a: quotient((1.0 / (1.0 - x)).floor()),
                    e: -1,
                }
            }
        }
        MapKind::HurwitzDual => {
            let r = 1.0 / x;
            let i = (r + 1.0 - *SMALL_G).floor();
            let e = if r - i < 0.0 { -1 } else { 1 };
            NicfDigit::Pair { a: quotient(i), e }
        }
    }
}

/// Applies `kind` to `x`.
pub fn apply_map(kind: MapKind, x: f64) -> Result<f64> {
    kind.check_domain(x)?;
    Ok(step(kind, x))
}

/// The first `n` digits of the `kind`-expansion of `x`, or fewer if the orbit
/// reaches the terminal point.
pub fn expand(kind: MapKind, x: f64, n: usize) -> Result<DigitSequence> {
    kind.check_domain(x)?;
    if n == 0 {
        return Err(NicfError::InvalidInput(
            "the number of digits must be at least 1".into(),
        ));
    }
    let mut digits = Vec::with_capacity(n);
    let mut y = x;
    let mut terminated = is_terminal(kind, y);
    while !terminated && digits.len() < n {
        digits.push(first_digit(kind, y));
        y = step(kind, y);
        terminated = is_terminal(kind, y);
    }
    Ok(DigitSequence {
        kind,
        digits,
        terminated,
    })
}

/// Inverse branch of `kind` selected by `digit`, evaluated at the image point `y`.
pub fn inverse_branch(kind: MapKind, digit: NicfDigit, y: f64) -> f64 {
    match (kind, digit) {
        (MapKind::Odd, NicfDigit::Signed(b)) => 1.0 / (b as f64 + y),
        (MapKind::Odd, NicfDigit::Pair { .. }) => f64::NAN,
        (_, NicfDigit::Signed(_)) => f64::NAN,
        (MapKind::Folded | MapKind::HurwitzDual, NicfDigit::Pair { a, e }) => {
            1.0 / (a as f64 + f64::from(e) * y)
        }
        (MapKind::Even, NicfDigit::Pair { a, e }) => f64::from(e) / (a as f64 + y),
        (MapKind::EvenConjugate, NicfDigit::Pair { a, e }) => {
            let w = 1.0 / (a as f64 + y);
            if e > 0 {
                w
            } else {
                1.0 - w
            }
        }
    }
}

/// `+1` when the inverse branch is increasing in `y`, `−1` when decreasing.
pub fn inverse_branch_orientation(kind: MapKind, digit: NicfDigit) -> i8 {
    match (kind, digit) {
        (MapKind::Odd, _) => -1,
        (MapKind::Folded | MapKind::HurwitzDual | MapKind::Even, NicfDigit::Pair { e, .. }) => -e,
        (MapKind::EvenConjugate, NicfDigit::Pair { e, .. }) => -e,
        (_, NicfDigit::Signed(_)) => -1,
    }
}

/// Closure of the set of images `T(x)` over all `x` whose first digit is `digit`.
pub fn image_range(kind: MapKind, digit: NicfDigit) -> Interval {
    match (kind, digit) {
        (MapKind::Odd, NicfDigit::Signed(2)) => Interval { lo: 0.0, hi: 0.5 },
        (MapKind::Odd, NicfDigit::Signed(-2)) => Interval { lo: -0.5, hi: 0.0 },
        (MapKind::Even, NicfDigit::Pair { a: 2, .. }) => Interval { lo: 0.0, hi: 0.5 },
        (MapKind::HurwitzDual, NicfDigit::Pair { e: -1, .. }) => {
            let g = *SMALL_G;
            Interval { lo: 0.0, hi: g * g }
        }
        _ => kind.domain(),
    }
}

/// Evaluates the finite continued fraction, with the tail set to 0.
pub fn reconstruct(seq: &DigitSequence) -> Result<f64> {
    if seq.digits.is_empty() {
        return Err(NicfError::InvalidInput(
            "cannot reconstruct an empty digit sequence".into(),
        ));
    }
    seq.validate()?;
    Ok(seq
        .digits
        .iter()
        .rev()
        .fold(0.0, |y, &d| inverse_branch(seq.kind, d, y)))
}

/// `J : [−1/2, 1/2] → [0, 1]`, with `J(0) = 0` and `J(1/2) = 1/2`.
pub fn conjugate_j(x: f64) -> Result<f64> {
    MapKind::Even.check_domain(x)?;
    Ok(if x < 0.0 { x + 1.0 } else { x })
}

/// `J⁻¹ : [0, 1] → [−1/2, 1/2]`.
pub fn conjugate_j_inverse(y: f64) -> Result<f64> {
    MapKind::EvenConjugate.check_domain(y)?;
    Ok(if y < 0.5 { y } else { y - 1.0 })
}

/// Image of a subset of `[−1/2, 1/2]` under `J` (up to endpoints).
pub fn conjugate_j_set(set: &IntervalUnion) -> Result<IntervalUnion> {
    if !set.is_within(&MapKind::Even.domain()) {
        return Err(NicfError::InvalidInput(format!(
            "{set} is not contained in [-1/2, 1/2]"
        )));
    }
    let neg = set.intersect_interval(&Interval { lo: -0.5, hi: 0.0 });
    let pos = set.intersect_interval(&Interval { lo: 0.0, hi: 0.5 });
    Ok(IntervalUnion::new(pos.parts().iter().copied().chain(
        neg.parts().iter().map(|p| Interval {
            lo: p.lo + 1.0,
            hi: p.hi + 1.0,
        }),
    )))
}

/// Preimage of a subset of `[0, 1]` under `J` (up to endpoints).
pub fn conjugate_j_inverse_set(set: &IntervalUnion) -> Result<IntervalUnion> {
    if !set.is_within(&MapKind::EvenConjugate.domain()) {
        return Err(NicfError::InvalidInput(format!(
            "{set} is not contained in [0, 1]"
        )));
    }
    let low = set.intersect_interval(&Interval { lo: 0.0, hi: 0.5 });
    let high = set.intersect_interval(&Interval { lo: 0.5, hi: 1.0 });
    Ok(IntervalUnion::new(low.parts().iter().copied().chain(
        high.parts().iter().map(|p| Interval {
            lo: p.lo - 1.0,
            hi: p.hi - 1.0,
        }),
    )))
}
