//! Exact interval algebra over rationals.
//!
//! An [`IntervalSet`] is a finite union of intervals with rational endpoints
//! and independent open/closed flags, kept in canonical form: sorted,
//! pairwise disjoint, and non-mergeable (adjacent intervals that share an
//! endpoint are merged unless both sides are open there, which leaves a
//! genuinely missing point). Union, intersection, difference and Lebesgue
//! measure are exact. Membership comes in two forms: an exact decision for
//! rational queries, and a three-way classification with a tolerance band for
//! star values (see [`Membership`]).

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rat::{fmt_rat, parse_rat, Rat};
use crate::real::Real;

/// Three-way membership verdict for tolerance queries.
///
/// `In`/`Out` mean the query point sits inside/outside with margin greater
/// than the tolerance from every endpoint; `Uncertain` means an endpoint lies
/// within the tolerance, so a perturbation of that size could flip the
/// answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    In,
    Out,
    Uncertain,
}

/// A single nonempty interval. Degenerate points are allowed when both
/// endpoints coincide and are closed.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub lo_open: bool,
    pub hi_open: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("empty interval: lo {lo} hi {hi} loOpen {lo_open} hiOpen {hi_open}")]
    Empty {
        lo: String,
        hi: String,
        lo_open: bool,
        hi_open: bool,
    },
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat, lo_open: bool, hi_open: bool) -> Result<Self, IntervalError> {
        let nonempty = lo < hi || (lo == hi && !lo_open && !hi_open);
        if !nonempty {
            return Err(IntervalError::Empty {
                lo: fmt_rat(&lo),
                hi: fmt_rat(&hi),
                lo_open,
                hi_open,
            });
        }
        Ok(Interval { lo, hi, lo_open, hi_open })
    }

    pub fn closed(lo: Rat, hi: Rat) -> Self {
        Interval::new(lo, hi, false, false).expect("closed interval requires lo <= hi")
    }

    pub fn open(lo: Rat, hi: Rat) -> Self {
        Interval::new(lo, hi, true, true).expect("open interval requires lo < hi")
    }

    pub fn point(at: Rat) -> Self {
        Interval { lo: at.clone(), hi: at, lo_open: false, hi_open: false }
    }

    pub fn len(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let lo_ok = x > &self.lo || (x == &self.lo && !self.lo_open);
        let hi_ok = x < &self.hi || (x == &self.hi && !self.hi_open);
        lo_ok && hi_ok
    }

    fn translate(&self, by: &Rat) -> Self {
        Interval {
            lo: &self.lo + by,
            hi: &self.hi + by,
            lo_open: self.lo_open,
            hi_open: self.hi_open,
        }
    }

    /// Image under x ↦ offset + factor·x for factor > 0.
    fn affine(&self, offset: &Rat, factor: &Rat) -> Self {
        Interval {
            lo: offset + &(factor * &self.lo),
            hi: offset + &(factor * &self.hi),
            lo_open: self.lo_open,
            hi_open: self.hi_open,
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            fmt_rat(&self.lo),
            fmt_rat(&self.hi),
            if self.hi_open { ')' } else { ']' },
        )
    }
}

/// Wire form per the external interface: endpoints as `"p/q"` strings.
#[derive(Serialize, Deserialize)]
struct IntervalWire {
    lo: String,
    hi: String,
    #[serde(rename = "loOpen")]
    lo_open: bool,
    #[serde(rename = "hiOpen")]
    hi_open: bool,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalWire {
            lo: fmt_rat(&self.lo),
            hi: fmt_rat(&self.hi),
            lo_open: self.lo_open,
            hi_open: self.hi_open,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = IntervalWire::deserialize(d)?;
        let lo = parse_rat(&w.lo).map_err(serde::de::Error::custom)?;
        let hi = parse_rat(&w.hi).map_err(serde::de::Error::custom)?;
        Interval::new(lo, hi, w.lo_open, w.hi_open).map_err(serde::de::Error::custom)
    }
}

/// Canonical finite union of intervals.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

/// Order endpoints treating openness: at equal coordinates a closed lower
/// endpoint starts "earlier" than an open one.
fn lo_key_cmp(a: &Interval, b: &Interval) -> Ordering {
    a.lo.cmp(&b.lo).then_with(|| a.lo_open.cmp(&b.lo_open))
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalSet { parts: vec![iv] }
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    /// Canonicalize an arbitrary collection: sort and merge.
    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(lo_key_cmp);
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match out.last_mut() {
                Some(last) => {
                    // Merge when overlapping or touching with at least one
                    // closed side at the junction.
                    let touches = match last.hi.cmp(&iv.lo) {
                        Ordering::Greater => true,
                        Ordering::Equal => !(last.hi_open && iv.lo_open),
                        Ordering::Less => false,
                    };
                    if touches {
                        // Extend hi to the max (closed beats open on ties).
                        let extend = match last.hi.cmp(&iv.hi) {
                            Ordering::Less => true,
                            Ordering::Equal => last.hi_open && !iv.hi_open,
                            Ordering::Greater => false,
                        };
                        if extend {
                            last.hi = iv.hi;
                            last.hi_open = iv.hi_open;
                        }
                    } else {
                        out.push(iv);
                    }
                }
                None => out.push(iv),
            }
        }
        IntervalSet { parts: out }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Exact Lebesgue measure.
    pub fn measure(&self) -> Rat {
        let mut acc = Rat::zero();
        for iv in &self.parts {
            acc += iv.len();
        }
        acc
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        IntervalSet::from_parts(parts)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        // Two-pointer sweep over canonical forms.
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            // lo = max, openness: open wins on tie.
            let (lo, lo_open) = match a.lo.cmp(&b.lo) {
                Ordering::Less => (b.lo.clone(), b.lo_open),
                Ordering::Greater => (a.lo.clone(), a.lo_open),
                Ordering::Equal => (a.lo.clone(), a.lo_open || b.lo_open),
            };
            // hi = min, openness: open wins on tie.
            let (hi, hi_open) = match a.hi.cmp(&b.hi) {
                Ordering::Less => (a.hi.clone(), a.hi_open),
                Ordering::Greater => (b.hi.clone(), b.hi_open),
                Ordering::Equal => (a.hi.clone(), a.hi_open || b.hi_open),
            };
            if let Ok(iv) = Interval::new(lo, hi, lo_open, hi_open) {
                out.push(iv);
            }
            // Advance whichever ends first (closed end at equal coordinate is
            // irrelevant for progress; pick by (hi, open) ordering).
            let adv_a = match a.hi.cmp(&b.hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => a.hi_open || !b.hi_open,
            };
            if adv_a {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { parts: out }
    }

    pub fn subtract(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        // Both sides are canonical (sorted, disjoint), so a single forward
        // sweep suffices: `j` never moves back past a part that could still
        // overlap a later `a` (the skip condition is strict inequality).
        let mut j = 0usize;
        for a in &self.parts {
            while j < other.parts.len() && other.parts[j].hi < a.lo {
                j += 1;
            }
            // Running remainder of `a`: everything in [cur_lo, a.hi] not yet
            // carved away, with `cur_lo_open` tracking the live lower flag.
            let mut cur_lo = a.lo.clone();
            let mut cur_lo_open = a.lo_open;
            let mut jj = j;
            while jj < other.parts.len() {
                let b = &other.parts[jj];
                if b.lo > a.hi {
                    break;
                }
                // Left remainder: [cur_lo, b.lo] with the upper closedness
                // flipped against b's lower flag; when b starts exactly at
                // a's upper end, a's own flag still applies. Empty pieces
                // are rejected by the interval constructor.
                let cap_open = if b.lo == a.hi {
                    !b.lo_open || a.hi_open
                } else {
                    !b.lo_open
                };
                if let Ok(left) = Interval::new(cur_lo.clone(), b.lo.clone(), cur_lo_open, cap_open)
                {
                    out.push(left);
                }
                cur_lo_open = if b.hi == a.lo {
                    !b.hi_open || a.lo_open
                } else {
                    !b.hi_open
                };
                cur_lo = b.hi.clone();
                if cur_lo > a.hi {
                    break;
                }
                jj += 1;
            }
            // Tail remainder right of the last overlapping part.
            if let Ok(tail) = Interval::new(cur_lo, a.hi.clone(), cur_lo_open, a.hi_open) {
                out.push(tail);
            }
        }
        IntervalSet::from_parts(out)
    }

    pub fn translate(&self, by: &Rat) -> IntervalSet {
        IntervalSet {
            parts: self.parts.iter().map(|iv| iv.translate(by)).collect(),
        }
    }

    /// Image under x ↦ offset + factor·x, factor > 0 (order preserving, so
    /// canonical form survives).
    pub fn affine(&self, offset: &Rat, factor: &Rat) -> IntervalSet {
        assert!(factor > &Rat::zero(), "affine transport needs a positive factor");
        IntervalSet {
            parts: self.parts.iter().map(|iv| iv.affine(offset, factor)).collect(),
        }
    }

    /// Topological closure (close every endpoint, then re-merge).
    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_parts(
            self.parts
                .iter()
                .map(|iv| Interval {
                    lo: iv.lo.clone(),
                    hi: iv.hi.clone(),
                    lo_open: false,
                    hi_open: false,
                })
                .collect(),
        )
    }

    /// Topological interior: open each maximal component, drop points.
    pub fn interior(&self) -> IntervalSet {
        IntervalSet {
            parts: self
                .parts
                .iter()
                .filter(|iv| !iv.is_point())
                .map(|iv| Interval {
                    lo: iv.lo.clone(),
                    hi: iv.hi.clone(),
                    lo_open: true,
                    hi_open: true,
                })
                .collect(),
        }
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.subtract(other).is_empty()
    }

    /// Exact membership for a rational query; never Uncertain.
    pub fn contains_exact(&self, x: &Rat) -> bool {
        // Binary search on lo, then check the candidate.
        let idx = self.parts.partition_point(|iv| &iv.lo <= x);
        if idx > 0 && self.parts[idx - 1].contains(x) {
            return true;
        }
        // A degenerate/open boundary case: the next interval could start at x
        // closed (partition_point already includes lo == x above).
        false
    }

    /// Exact distance from x to the nearest endpoint of any component
    /// (infinite sets don't occur; empty set yields None).
    pub fn nearest_endpoint_distance(&self, x: &Rat) -> Option<Rat> {
        if self.parts.is_empty() {
            return None;
        }
        let mut best: Option<Rat> = None;
        // Only the neighbors around the insertion point matter.
        let idx = self.parts.partition_point(|iv| &iv.lo <= x);
        let lo_bound = idx.saturating_sub(1);
        let hi_bound = (idx + 1).min(self.parts.len());
        for iv in &self.parts[lo_bound..hi_bound] {
            for e in [&iv.lo, &iv.hi] {
                let d = if e > x { e - x } else { x - e };
                if best.as_ref().map_or(true, |b| &d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Three-way membership for a rational position with tolerance `eps`:
    /// `In`/`Out` require margin strictly greater than `eps` from every
    /// endpoint.
    pub fn classify(&self, x: &Rat, eps: &Rat) -> Membership {
        let inside = self.contains_exact(x);
        match self.nearest_endpoint_distance(x) {
            None => Membership::Out, // empty set
            Some(d) => {
                if &d > eps {
                    if inside {
                        Membership::In
                    } else {
                        Membership::Out
                    }
                } else {
                    Membership::Uncertain
                }
            }
        }
    }

    /// Tolerance membership for an extended-precision real query.
    pub fn membership(&self, x: &Real, eps: &Rat) -> Membership {
        self.classify(&x.to_rat(), eps)
    }

    /// Exact membership for a rational query, as a verdict.
    pub fn membership_exact(&self, x: &Rat) -> Membership {
        if self.contains_exact(x) {
            Membership::In
        } else {
            Membership::Out
        }
    }

    /// Smallest closed interval containing the set.
    pub fn bounding(&self) -> Option<(Rat, Rat)> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some((first.lo.clone(), last.hi.clone()))
    }

    pub fn component_count(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, iv) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{:?}", iv)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn set(parts: Vec<Interval>) -> IntervalSet {
        IntervalSet::from_parts(parts)
    }

    #[test]
    fn union_merges_half_open_chain() {
        // [0,1) ∪ [1,2) = [0,2)
        let a = set(vec![Interval::new(rat(0, 1), rat(1, 1), false, true).unwrap()]);
        let b = set(vec![Interval::new(rat(1, 1), rat(2, 1), false, true).unwrap()]);
        let u = a.union(&b);
        assert_eq!(u.component_count(), 1);
        assert_eq!(u.measure(), rat(2, 1));
        assert!(u.contains_exact(&rat(1, 1)));
    }

    #[test]
    fn union_keeps_missing_point_between_open_intervals() {
        // (0,1) ∪ (1,2) stays two components.
        let a = set(vec![Interval::open(rat(0, 1), rat(1, 1))]);
        let b = set(vec![Interval::open(rat(1, 1), rat(2, 1))]);
        let u = a.union(&b);
        assert_eq!(u.component_count(), 2);
        assert!(!u.contains_exact(&rat(1, 1)));
        // Adding the point heals the union.
        let healed = u.union(&set(vec![Interval::point(rat(1, 1))]));
        assert_eq!(healed.component_count(), 1);
    }

    #[test]
    fn subtract_open_gap_leaves_closed_endpoints() {
        // [0,1] ∖ (1/3, 2/3) = [0,1/3] ∪ [2/3,1]
        let w = set(vec![Interval::closed(rat(0, 1), rat(1, 1))]);
        let g = set(vec![Interval::open(rat(1, 3), rat(2, 3))]);
        let d = w.subtract(&g);
        assert_eq!(d.component_count(), 2);
        assert!(d.contains_exact(&rat(1, 3)));
        assert!(d.contains_exact(&rat(2, 3)));
        assert_eq!(d.measure(), rat(2, 3));
    }

    #[test]
    fn subtract_closed_leaves_open_endpoints() {
        let w = set(vec![Interval::closed(rat(0, 1), rat(1, 1))]);
        let g = set(vec![Interval::closed(rat(1, 3), rat(2, 3))]);
        let d = w.subtract(&g);
        assert!(!d.contains_exact(&rat(1, 3)));
        assert!(!d.contains_exact(&rat(2, 3)));
        assert_eq!(d.measure(), rat(2, 3));
    }

    #[test]
    fn intersect_openness() {
        let a = set(vec![Interval::new(rat(0, 1), rat(1, 1), false, true).unwrap()]);
        let b = set(vec![Interval::new(rat(0, 1), rat(1, 1), true, false).unwrap()]);
        let i = a.intersect(&b);
        assert_eq!(i.component_count(), 1);
        let iv = &i.parts()[0];
        assert!(iv.lo_open && iv.hi_open);
    }

    #[test]
    fn measure_additivity_on_disjoint_union() {
        let a = set(vec![Interval::closed(rat(0, 1), rat(1, 4))]);
        let b = set(vec![Interval::closed(rat(1, 2), rat(3, 4))]);
        assert_eq!(a.union(&b).measure(), rat(1, 2));
    }

    #[test]
    fn membership_examples() {
        // Exact hit on a closed endpoint with an exact rational query: In.
        let s = set(vec![Interval::closed(rat(0, 1), rat(1, 3))]);
        assert_eq!(s.membership_exact(&rat(1, 3)), Membership::In);
        // Real query within eps of the endpoint: Uncertain.
        let x = Real::parse_decimal("0.3333333333334").unwrap(); // 1/3 + ~1e-13
        let eps = rat(1, 1_000_000_000_000);
        assert_eq!(s.membership(&x, &eps), Membership::Uncertain);
        // Far inside: In.
        let mid = Real::parse_decimal("0.2").unwrap();
        assert_eq!(s.membership(&mid, &eps), Membership::In);
        // Far outside: Out.
        let out = Real::parse_decimal("0.5").unwrap();
        assert_eq!(s.membership(&out, &eps), Membership::Out);
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let s = set(vec![
            Interval::new(rat(-1, 3), rat(1, 2), true, false).unwrap(),
            Interval::point(rat(2, 1)),
        ]);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"lo\":\"-1/3\""), "{json}");
        let back: IntervalSet = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn interior_and_closure() {
        let s = set(vec![
            Interval::new(rat(0, 1), rat(1, 1), false, true).unwrap(),
            Interval::point(rat(3, 2)),
        ]);
        let c = s.closure();
        assert!(c.contains_exact(&rat(1, 1)));
        let i = s.interior();
        assert_eq!(i.component_count(), 1);
        assert!(!i.contains_exact(&rat(0, 1)));
    }
}
