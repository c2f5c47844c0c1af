//! Cantor-type window carriers and certified two-sided approximations.
//!
//! A carrier is the closed unit interval with a self-similar family of open
//! gaps removed. Two families are supported:
//!
//! * middle-third — every piece loses its open middle third, so the stage-n
//!   gaps have length 3^{-n} relative to the carrier and the residual set is
//!   null;
//! * fat — the gap removed at stage n has *absolute* length `scale·ratio^n`.
//!   With `ratio < 1/2` and total removed mass below 1 the residual set has
//!   positive measure (the default `ratio = 1/4, scale = 1` leaves 1/2).
//!
//! Gaps carry addresses: the gap punched into the piece reached by the
//! binary path `w` is addressed by the word `0·w`, so valid addresses are
//! exactly the nonempty binary words starting with `0`, the address length
//! is the stage, and the canonical (length, lexicographic) enumeration is
//! stable under increasing depth.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::WindowError;
use crate::interval::{Interval, IntervalSet};
use crate::rat::{fmt_rat, rat, rat_int, serde_rat, Rat};

/// Gap-length law of the carrier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum CantorKind {
    MiddleThird,
    #[serde(rename_all = "camelCase")]
    Fat {
        #[serde(with = "serde_rat")]
        ratio: Rat,
        #[serde(with = "serde_rat")]
        scale: Rat,
    },
}

impl CantorKind {
    /// Standard fat carrier: gaps 4^{-n}, residual measure 1/2.
    pub fn fat_default() -> Self {
        CantorKind::Fat { ratio: rat(1, 4), scale: rat_int(1) }
    }

    /// Fat carrier with gaps scaled by 4/5, residual measure 3/5.
    pub fn fat_scaled() -> Self {
        CantorKind::Fat { ratio: rat(1, 4), scale: rat(4, 5) }
    }
}

/// A single addressed gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    /// Binary address `0·w`; its length is the stage.
    pub addr: String,
    /// The open interval removed from the carrier.
    pub interval: Interval,
}

/// A validated carrier description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorScheme {
    pub kind: CantorKind,
}

impl CantorScheme {
    pub fn new(kind: CantorKind) -> Result<Self, WindowError> {
        match &kind {
            CantorKind::MiddleThird => {}
            CantorKind::Fat { ratio, scale } => {
                if ratio <= &Rat::zero() || ratio >= &rat(1, 2) {
                    return Err(WindowError::BadDescriptor {
                        reason: format!(
                            "fat gap ratio must lie in (0, 1/2), got {}",
                            fmt_rat(ratio)
                        ),
                    });
                }
                if scale <= &Rat::zero() {
                    return Err(WindowError::BadDescriptor {
                        reason: format!("fat gap scale must be positive, got {}", fmt_rat(scale)),
                    });
                }
                // Total removed mass Σ 2^{n-1}·scale·ratio^n = scale·ratio/(1-2·ratio)
                // must stay below 1 so every finite stage fits and the
                // residual keeps positive measure.
                let removed = scale * ratio / (Rat::one() - rat_int(2) * ratio);
                if removed >= Rat::one() {
                    return Err(WindowError::BadDescriptor {
                        reason: format!(
                            "fat gaps remove total mass {} >= 1; shrink ratio or scale",
                            fmt_rat(&removed)
                        ),
                    });
                }
            }
        }
        Ok(CantorScheme { kind })
    }

    pub fn middle_third() -> Self {
        CantorScheme { kind: CantorKind::MiddleThird }
    }

    /// Absolute length of each gap punched at stage `n >= 1`.
    pub fn gap_length(&self, n: u32) -> Rat {
        match &self.kind {
            CantorKind::MiddleThird => rat(1, 3).pow(n as i32),
            CantorKind::Fat { ratio, scale } => scale * ratio.pow(n as i32),
        }
    }

    /// Common length of the 2^d pieces remaining after stage `d`.
    pub fn piece_length(&self, d: u32) -> Rat {
        match &self.kind {
            CantorKind::MiddleThird => rat(1, 3).pow(d as i32),
            CantorKind::Fat { .. } => {
                let mut len = Rat::one();
                for n in 1..=d {
                    len = (len - self.gap_length(n)) / rat_int(2);
                }
                len
            }
        }
    }

    /// Exact measure of the depth-`d` outer hull (2^d pieces).
    pub fn outer_measure_at_depth(&self, d: u32) -> Rat {
        let mut m = Rat::one();
        for n in 1..=d {
            // 2^{n-1} gaps of length gap_length(n).
            m -= rat_int(2).pow(n as i32 - 1) * self.gap_length(n);
        }
        m
    }

    /// Measure of the residual set in the limit of infinite depth.
    pub fn limit_measure(&self) -> Rat {
        match &self.kind {
            CantorKind::MiddleThird => Rat::zero(),
            CantorKind::Fat { ratio, scale } => {
                Rat::one() - scale * ratio / (Rat::one() - rat_int(2) * ratio)
            }
        }
    }

    fn parse_addr(addr: &str) -> Result<Vec<u8>, WindowError> {
        let invalid = || WindowError::InvalidAddress { word: addr.to_string() };
        if addr.is_empty() || !addr.starts_with('0') {
            return Err(invalid());
        }
        addr.bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(invalid()),
            })
            .collect()
    }

    /// Closed interval of the piece reached by the binary path `word`
    /// (left-to-right descent; empty path is the carrier).
    pub fn piece_interval(&self, word: &[u8]) -> (Rat, Rat) {
        let mut lo = Rat::zero();
        let mut len = Rat::one();
        for (i, &b) in word.iter().enumerate() {
            let g = self.gap_length(i as u32 + 1);
            let child = (&len - &g) / rat_int(2);
            if b == 1 {
                lo = lo + &len - &child;
            }
            len = child;
        }
        let hi = &lo + &len;
        (lo, hi)
    }

    /// The open gap addressed by `addr = 0·w`: the middle gap of the piece
    /// reached by `w`.
    pub fn gap_interval(&self, addr: &str) -> Result<Interval, WindowError> {
        let bits = Self::parse_addr(addr)?;
        let w = &bits[1..];
        let (lo, _hi) = self.piece_interval(w);
        let stage = bits.len() as u32;
        let g = self.gap_length(stage);
        let child = (self.piece_length(stage - 1) - &g) / rat_int(2);
        let gl = &lo + &child;
        let gh = &gl + &g;
        Ok(Interval::open(gl, gh))
    }

    /// All gaps of stage ≤ `depth` in canonical (length, lexicographic)
    /// address order. The prefix of the list is identical at every larger
    /// depth.
    pub fn gaps_up_to(&self, depth: u32) -> Vec<Gap> {
        let mut gaps = Vec::with_capacity((1usize << depth).saturating_sub(1));
        // Level-by-level walk carrying (address-of-piece, lo) pairs; all
        // pieces at one level share their length.
        let mut level: Vec<(String, Rat)> = vec![(String::new(), Rat::zero())];
        let mut len = Rat::one();
        for stage in 1..=depth {
            let g = self.gap_length(stage);
            let child = (&len - &g) / rat_int(2);
            let mut next = Vec::with_capacity(level.len() * 2);
            for (word, lo) in &level {
                let gl = lo + &child;
                let gh = &gl + &g;
                gaps.push(Gap {
                    addr: format!("0{word}"),
                    interval: Interval::open(gl.clone(), gh.clone()),
                });
                next.push((format!("{word}0"), lo.clone()));
                next.push((format!("{word}1"), gh));
            }
            level = next;
            len = child;
        }
        gaps
    }

    /// Depth-`d` outer hull of the residual set: the 2^d closed pieces.
    pub fn outer_hull(&self, depth: u32) -> IntervalSet {
        let mut level: Vec<Rat> = vec![Rat::zero()];
        let mut len = Rat::one();
        for stage in 1..=depth {
            let g = self.gap_length(stage);
            let child = (&len - &g) / rat_int(2);
            let mut next = Vec::with_capacity(level.len() * 2);
            for lo in &level {
                next.push(lo.clone());
                next.push(lo + &child + &g);
            }
            level = next;
            len = child;
        }
        IntervalSet::from_parts(
            level
                .into_iter()
                .map(|lo| {
                    let hi = &lo + &len;
                    Interval::closed(lo, hi)
                })
                .collect(),
        )
    }

    /// The depth-`d` outer hull intersected with `[0, cutoff]`, computed by
    /// pruned descent: pieces entirely to the right of `cutoff` are dropped
    /// at every stage, so the cost scales with the number of surviving
    /// pieces (about `cutoff`/piece_length(d) of them) instead of 2^d.
    pub fn outer_hull_before(&self, depth: u32, cutoff: &Rat) -> IntervalSet {
        if cutoff < &Rat::zero() {
            return IntervalSet::empty();
        }
        let mut level: Vec<Rat> = vec![Rat::zero()];
        let mut len = Rat::one();
        for stage in 1..=depth {
            let g = self.gap_length(stage);
            let child = (&len - &g) / rat_int(2);
            let mut next = Vec::with_capacity(level.len() + 4);
            for lo in &level {
                // The left child shares its parent's lower end, which is
                // already known to be <= cutoff.
                next.push(lo.clone());
                let right = lo + &child + &g;
                if &right <= cutoff {
                    next.push(right);
                }
            }
            level = next;
            len = child;
        }
        IntervalSet::from_parts(
            level
                .into_iter()
                .map(|lo| {
                    let hi = (&lo + &len).min(cutoff.clone());
                    Interval::closed(lo, hi)
                })
                .collect(),
        )
    }

    /// Two-sided approximation of the residual set itself: it has empty
    /// interior, so the inner part is empty at every depth.
    pub fn residual_approx(&self, depth: u32) -> WindowApprox {
        WindowApprox {
            inner: IntervalSet::empty(),
            outer: self.outer_hull(depth),
            depth,
            label: format!("residual d={depth}"),
        }
    }
}

/// A certified sandwich `inner ⊆ W ⊆ outer` around a window `W` at a given
/// construction depth: `inner` is open, `outer` is closed.
///
/// Set operations on approximations are arranged so that the sandwich
/// property is preserved: intersections meet inner with inner, differences
/// subtract the *outer* hull from the inner part (yielding a certified inner
/// approximation of the true difference) and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowApprox {
    pub inner: IntervalSet,
    pub outer: IntervalSet,
    pub depth: u32,
    pub label: String,
}

impl WindowApprox {
    /// Wrap an exactly known window: inner = interior, outer = closure.
    pub fn exact(set: &IntervalSet, label: impl Into<String>) -> Self {
        WindowApprox {
            inner: set.interior(),
            outer: set.closure(),
            depth: 0,
            label: label.into(),
        }
    }

    pub fn validate(&self) -> Result<(), WindowError> {
        let excess = self.inner.subtract(&self.outer);
        if let Some((lo, _)) = excess.bounding() {
            return Err(WindowError::SandwichViolated { witness: fmt_rat(&lo) });
        }
        Ok(())
    }

    pub fn meas_inner(&self) -> Rat {
        self.inner.measure()
    }

    pub fn meas_outer(&self) -> Rat {
        self.outer.measure()
    }

    /// Total extent of the outer hull; `None` for an empty window.
    pub fn span(&self) -> Option<(Rat, Rat)> {
        self.outer.bounding()
    }

    pub fn translate(&self, by: &Rat) -> Self {
        WindowApprox {
            inner: self.inner.translate(by),
            outer: self.outer.translate(by),
            depth: self.depth,
            label: self.label.clone(),
        }
    }

    /// Image under x ↦ offset + factor·x for factor > 0.
    pub fn affine(&self, offset: &Rat, factor: &Rat) -> Self {
        WindowApprox {
            inner: self.inner.affine(offset, factor),
            outer: self.outer.affine(offset, factor),
            depth: self.depth,
            label: self.label.clone(),
        }
    }

    /// Restrict to a closed interval `[lo, hi]`: the inner part meets the
    /// open core so it stays open.
    pub fn crop(&self, lo: &Rat, hi: &Rat) -> Self {
        let open = IntervalSet::from_interval(Interval::open(lo.clone(), hi.clone()));
        let closed = IntervalSet::from_interval(Interval::closed(lo.clone(), hi.clone()));
        WindowApprox {
            inner: self.inner.intersect(&open),
            outer: self.outer.intersect(&closed),
            depth: self.depth,
            label: self.label.clone(),
        }
    }

    pub fn union(&self, other: &WindowApprox) -> Self {
        WindowApprox {
            inner: self.inner.union(&other.inner),
            outer: self.outer.union(&other.outer),
            depth: self.depth.min(other.depth),
            label: format!("({}) ∪ ({})", self.label, other.label),
        }
    }

    pub fn intersect(&self, other: &WindowApprox) -> Self {
        WindowApprox {
            inner: self.inner.intersect(&other.inner),
            outer: self.outer.intersect(&other.outer),
            depth: self.depth.min(other.depth),
            label: format!("({}) ∩ ({})", self.label, other.label),
        }
    }

    /// Certified approximation of the set difference.
    pub fn subtract(&self, other: &WindowApprox) -> Self {
        WindowApprox {
            inner: self.inner.subtract(&other.outer),
            outer: self.outer.subtract(&other.inner),
            depth: self.depth.min(other.depth),
            label: format!("({}) ∖ ({})", self.label, other.label),
        }
    }

    /// The boundary enclosure outer ∖ inner: every true boundary point of
    /// `W` lies in it.
    pub fn boundary_enclosure(&self) -> IntervalSet {
        self.outer.subtract(&self.inner)
    }
}
