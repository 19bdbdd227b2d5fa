//! Closed intervals and finite unions of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{NicfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(NicfError::InvalidInput(format!(
                "interval endpoints must be finite with lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Builds an interval from two endpoints in either order.
    pub fn spanning(a: f64, b: f64) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn negate(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A finite union of closed intervals, kept sorted and pairwise disjoint.
///
/// Degenerate (single point) components are dropped; every set here is only
/// ever measured.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|p| p.hi > p.lo).collect();
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => merged.push(p),
            }
        }
        Self { parts: merged }
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Ok(Self::new([Interval::new(lo, hi)?]))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn hull(&self) -> Option<Interval> {
        Some(Interval {
            lo: self.parts.first()?.lo,
            hi: self.parts.last()?.hi,
        })
    }

    pub fn is_within(&self, domain: &Interval) -> bool {
        self.parts.iter().all(|p| domain.contains_interval(p))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn intersect_interval(&self, other: &Interval) -> Self {
        Self::new(self.parts.iter().filter_map(|p| p.intersect(other)))
    }

    pub fn negate(&self) -> Self {
        Self::new(self.parts.iter().map(Interval::negate))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.parts.iter().chain(other.parts.iter()).copied())
    }

    /// True when the set equals its reflection through the origin.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let neg = self.negate();
        neg.parts.len() == self.parts.len()
            && neg
                .parts
                .iter()
                .zip(&self.parts)
                .all(|(a, b)| (a.lo - b.lo).abs() <= tol && (a.hi - b.hi).abs() <= tol)
    }
}

impl From<Interval> for IntervalUnion {
    fn from(value: Interval) -> Self {
        Self::new([value])
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
