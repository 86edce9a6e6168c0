//! Closed rational intervals and finite unions of them.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Closed interval `[lo, hi]` with `lo <= hi`. Degenerate (single-point)
/// intervals are allowed and show up as exact point preimages.
///
/// Serializes as a two-element array of rational strings: `["2/9", "1/3"]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Interval> {
        if lo > hi {
            return Err(Error::Invalid(format!("interval endpoints out of order: [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rat) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn diameter(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_int(2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when `x` is in the open interior `(lo, hi)`.
    pub fn contains_strictly(&self, x: &Rat) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True when the two closed intervals share at least one point.
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// True when the intersection has positive length.
    pub fn overlaps_interior(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Smallest interval containing both inputs.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Interval, D::Error> {
        let (lo, hi) = <(Rat, Rat)>::deserialize(de)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Finite union of closed intervals, kept sorted with gaps between members:
/// touching or overlapping inputs are merged on construction, so the stored
/// components are pairwise disjoint and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct IntervalSet {
    components: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> IntervalSet {
        IntervalSet { components: Vec::new() }
    }

    pub fn from_intervals(mut items: Vec<Interval>) -> IntervalSet {
        items.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut components: Vec<Interval> = Vec::with_capacity(items.len());
        for item in items {
            match components.last_mut() {
                Some(last) if item.lo <= last.hi => {
                    if item.hi > last.hi {
                        last.hi = item.hi;
                    }
                }
                _ => components.push(item),
            }
        }
        IntervalSet { components }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn contains(&self, x: &Rat) -> bool {
        // Members are sorted by lo; find the last one starting at or before x.
        let idx = self.components.partition_point(|c| c.lo() <= x);
        idx > 0 && self.components[idx - 1].contains(x)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.components.iter()
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: &str, hi: &str) -> Interval {
        Interval::new(lo.parse().unwrap(), hi.parse().unwrap()).unwrap()
    }

    #[test]
    fn rejects_reversed_endpoints() {
        assert!(Interval::new(Rat::one(), Rat::zero()).is_err());
    }

    #[test]
    fn hull_and_intersection() {
        let a = iv("0", "1/3");
        let b = iv("2/3", "1");
        assert_eq!(a.hull(&b), iv("0", "1"));
        assert_eq!(a.intersection(&b), None);
        assert_eq!(a.intersection(&iv("1/4", "1/2")), Some(iv("1/4", "1/3")));
    }

    #[test]
    fn interior_overlap_ignores_shared_endpoints() {
        let a = iv("0", "1/3");
        let b = iv("1/3", "2/3");
        assert!(a.intersects(&b));
        assert!(!a.overlaps_interior(&b));
    }

    #[test]
    fn set_merges_touching_components() {
        let s = IntervalSet::from_intervals(vec![iv("1/3", "1/2"), iv("0", "1/3"), iv("3/4", "1")]);
        assert_eq!(s.components(), &[iv("0", "1/2"), iv("3/4", "1")]);
        assert!(s.contains(&"1/3".parse().unwrap()));
        assert!(!s.contains(&"2/3".parse().unwrap()));
    }

    #[test]
    fn degenerate_members_survive() {
        let s = IntervalSet::from_intervals(vec![iv("1/10", "1/10"), iv("9/10", "9/10")]);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&"9/10".parse().unwrap()));
        assert!(!s.contains(&"1/2".parse().unwrap()));
    }

    #[test]
    fn serde_is_a_two_element_array() {
        let a = iv("2/9", "1/3");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"["2/9","1/3"]"#);
        let back: Interval = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Interval>(r#"["1","0"]"#).is_err());
    }
}
