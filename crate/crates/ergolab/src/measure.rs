//! Exact set algebra on the unit interval.
//!
//! An [`IntervalSet`] is a finite disjoint union of half-open rational
//! subintervals of `[0,1)`, kept in a canonical form: sorted, pairwise
//! disjoint, with touching neighbours merged. Canonical form makes set
//! equality literal structural equality, which the exactness suites rely on.

use crate::error::{Error, Result};
use crate::rat::{frac_mod1, rat_from_json, rat_to_json, Rat};
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    /// Sorted, disjoint, non-adjacent `[lo, hi)` pieces inside `[0,1]`.
    intervals: Vec<(Rat, Rat)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalSet { intervals: vec![(Rat::zero(), Rat::one())] }
    }

    /// Canonicalize a raw list of half-open intervals (may overlap or touch).
    ///
    /// Rejects pieces with `lo > hi` or endpoints outside `[0,1]`; empty
    /// pieces (`lo == hi`) are dropped. Idempotent on its own output.
    pub fn normalize(raw: Vec<(Rat, Rat)>) -> Result<Self> {
        let one = Rat::one();
        for (lo, hi) in &raw {
            if lo > hi {
                return Err(Error::InvalidInterval(format!("lo {lo} > hi {hi}")));
            }
            if lo < &Rat::zero() || hi > &one {
                return Err(Error::InvalidInterval(format!(
                    "[{lo}, {hi}) outside the unit interval"
                )));
            }
        }
        let mut pieces: Vec<(Rat, Rat)> = raw.into_iter().filter(|(lo, hi)| lo < hi).collect();
        pieces.sort();
        let mut merged: Vec<(Rat, Rat)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some((_, last_hi)) if *last_hi >= lo => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn interval(lo: Rat, hi: Rat) -> Result<Self> {
        Self::normalize(vec![(lo, hi)])
    }

    pub fn pieces(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        self.intervals.len()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rat {
        self.intervals
            .iter()
            .fold(Rat::zero(), |acc, (lo, hi)| acc + (hi - lo))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        // binary search over sorted pieces
        let mut lo = 0usize;
        let mut hi = self.intervals.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (a, b) = &self.intervals[mid];
            if x < a {
                hi = mid;
            } else if x >= b {
                lo = mid + 1;
            } else {
                return true;
            }
        }
        false
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = &self.intervals[i];
            let (a2, b2) = &other.intervals[j];
            let lo = a1.max(a2).clone();
            let hi = b1.min(b2).clone();
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut raw = self.intervals.clone();
        raw.extend(other.intervals.iter().cloned());
        IntervalSet::normalize(raw).expect("canonical inputs")
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Rat::zero();
        for (lo, hi) in &self.intervals {
            if cursor < *lo {
                out.push((cursor.clone(), lo.clone()));
            }
            cursor = hi.clone();
        }
        if cursor < Rat::one() {
            out.push((cursor, Rat::one()));
        }
        IntervalSet { intervals: out }
    }

    /// Translate by `t` modulo 1, splitting at the wrap point.
    pub fn translate_mod1(&self, t: &Rat) -> IntervalSet {
        let shift = frac_mod1(t);
        if shift.is_zero() {
            return self.clone();
        }
        let one = Rat::one();
        let mut raw = Vec::with_capacity(self.intervals.len() + 1);
        for (lo, hi) in &self.intervals {
            let a = lo + &shift;
            let b = hi + &shift;
            if b <= one {
                raw.push((a, b));
            } else if a >= one {
                raw.push((a - &one, b - &one));
            } else {
                raw.push((a, one.clone()));
                raw.push((Rat::zero(), b - &one));
            }
        }
        IntervalSet::normalize(raw).expect("translated canonical set stays in range")
    }

    /// Intersection with `[lo, hi)`, returned relative to the same coordinates.
    pub fn clip(&self, lo: &Rat, hi: &Rat) -> IntervalSet {
        let window = IntervalSet { intervals: vec![(lo.clone(), hi.clone())] };
        self.intersect(&window)
    }
}

impl serde::Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = serde_json::Value::Array(
            self.intervals
                .iter()
                .map(|(lo, hi)| serde_json::Value::Array(vec![rat_to_json(lo), rat_to_json(hi)]))
                .collect(),
        );
        v.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let v = serde_json::Value::deserialize(d)?;
        let arr = v
            .as_array()
            .ok_or_else(|| D::Error::custom("interval set must be an array of [lo, hi] pairs"))?;
        let mut raw = Vec::with_capacity(arr.len());
        for item in arr {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| D::Error::custom("interval must be a [lo, hi] pair"))?;
            let lo = rat_from_json(&pair[0]).map_err(D::Error::custom)?;
            let hi = rat_from_json(&pair[1]).map_err(D::Error::custom)?;
            raw.push((lo, hi));
        }
        IntervalSet::normalize(raw).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn set(pairs: &[(i64, i64, i64, i64)]) -> IntervalSet {
        IntervalSet::normalize(
            pairs
                .iter()
                .map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn normalize_merges_adjacent() {
        let s = set(&[(0, 1, 1, 2), (1, 2, 3, 4)]);
        assert_eq!(s.pieces(), &[(rat(0, 1), rat(3, 4))]);
        assert_eq!(s.measure(), rat(3, 4));
    }

    #[test]
    fn normalize_empty_and_degenerate() {
        let s = IntervalSet::normalize(vec![]).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.measure(), rat(0, 1));
        let t = set(&[(1, 3, 1, 3)]);
        assert!(t.is_empty());
    }

    #[test]
    fn normalize_rejects_reversed_and_out_of_range() {
        assert!(IntervalSet::normalize(vec![(rat(1, 4), rat(1, 8))]).is_err());
        assert!(IntervalSet::normalize(vec![(rat(-1, 8), rat(1, 8))]).is_err());
        assert!(IntervalSet::normalize(vec![(rat(1, 2), rat(9, 8))]).is_err());
    }

    #[test]
    fn normalize_is_idempotent() {
        let s = set(&[(0, 1, 1, 4), (1, 2, 5, 8), (5, 8, 3, 4)]);
        let again = IntervalSet::normalize(s.pieces().to_vec()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn intersect_basic() {
        let a = set(&[(0, 1, 1, 2)]);
        let b = set(&[(1, 4, 3, 4)]);
        let c = a.intersect(&b);
        assert_eq!(c.pieces(), &[(rat(1, 4), rat(1, 2))]);
        assert_eq!(c.measure(), rat(1, 4));
        assert_eq!(a.intersect(&a), a);
        assert!(a.intersect(&IntervalSet::empty()).is_empty());
    }

    #[test]
    fn translation_wraps_and_preserves_measure() {
        let a = set(&[(0, 1, 1, 3)]);
        let t = a.translate_mod1(&rat(1, 3));
        assert_eq!(t.pieces(), &[(rat(1, 3), rat(2, 3))]);
        let wrapped = a.translate_mod1(&rat(5, 6));
        assert_eq!(wrapped.measure(), rat(1, 3));
        assert_eq!(wrapped.component_count(), 2);
        let back = wrapped.translate_mod1(&rat(1, 6));
        assert_eq!(back, a);
    }

    #[test]
    fn complement_partitions() {
        let a = set(&[(1, 8, 1, 4), (1, 2, 3, 4)]);
        let c = a.complement();
        assert!(a.intersect(&c).is_empty());
        assert_eq!(a.union(&c), IntervalSet::full());
    }

    #[test]
    fn json_roundtrip() {
        let a = set(&[(0, 1, 1, 4), (1, 2, 2, 3)]);
        let text = serde_json::to_string(&a).unwrap();
        let back: IntervalSet = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
    }
}
