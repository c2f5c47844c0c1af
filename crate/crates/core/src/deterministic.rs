//! Deterministic windows: one window that reproduces, near each of a
//! greedily chosen family of internal anchors, a prescribed gap-family
//! window at that anchor's own scale. This is what gives a *deterministic*
//! model set positive pattern entropy: every anchor interval carries the
//! full marker structure of `markers`, translated so the anchor plays the
//! role of 0.
//!
//! Anchor selection works on the completion family. Candidate n is the
//! star value `l*` of the n-th completion vector v(n) in shell-then-lex
//! numbering (candidate 1 is the origin, star 0). Its trial interval is
//!
//! ```text
//! J_n = [ l*_{v(n)},  l*_{v(n)} + η_t )        t = ‖v(n)‖∞
//! ```
//!
//! where the radius η_t is half the least circle distance from 0 among the
//! star values of all completion vectors with index norm in 1..=κ(t). The
//! cap table κ(t) is the smallest strictly increasing sequence satisfying
//! the dyadic budget (4t+1)^N / (2κ(t)+1)^N ≤ 2^{-(t+1)} / (3·5^N), which
//! keeps the total relative mass of all anchor intervals summably small —
//! the property that makes the resulting window aperiodic-compatible while
//! still touching a positive fraction of candidates. Greedy selection keeps
//! J_n exactly when it is disjoint from everything kept before; the kept
//! intervals are I_1, I_2, … with exact rational endpoints.
//!
//! For internal dimension 1 the radius η_t comes from continued fractions
//! (exact best-approximation of the single irrational star slope); for
//! higher internal dimension it falls back to direct enumeration of the
//! index box, refusing with `BudgetExceeded` once the box outgrows a fixed
//! vector budget. The index-norm cap is applied to the ℤ^N indexing vector;
//! for dimension 1 this coincides with the norm of the full completion
//! vector.
//!
//! Window assembly at truncation depth d:
//!
//! * outside ∪I_k the window is the carrier residual, known only at outer
//!   level (depth-d hull minus the anchor intervals);
//! * inside I_k it is the k-th gap-family window translated by inf I_k and
//!   cropped to I_k — inner = the family's selected open gaps, outer = the
//!   family's depth-d outer set;
//! * the weak variant instead transports `markers::weak_truncation`
//!   (positive-measure insertions into marker gaps, empty interior), so its
//!   inner approximation is empty at every depth and only the outer measure
//!   carries information.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cps::{centered_box, star_numbering, CpsScheme};
use crate::error::SearchError;
use crate::interval::{Interval, IntervalSet};
use crate::markers::weak_truncation;
use crate::random_window::{build_window, GapSelection};
use crate::rat::{fmt_rat, parse_rat, rat_int, Rat};
use crate::window::{CantorScheme, WindowApprox};

/// Hard cap on how many candidate anchors the greedy selection may inspect.
const SELECTION_CAP: u64 = 20_000;
/// Hard cap on the brute-force internal box used for η when N ≥ 2.
const ETA_ENUM_BUDGET: u64 = 4_000_000;

/// Smallest κ with (4t+1)^N / (2κ+1)^N ≤ 2^{-(t+1)} / (3·5^N), before the
/// strict-monotonicity lift.
fn kappa_min(dim: usize, t: u32) -> BigInt {
    let n = dim as u32;
    // (2κ+1)^N ≥ 3 · 2^{t+1} · (5(4t+1))^N
    let rhs: BigInt =
        BigInt::from(3) * (BigInt::one() << (t + 1)) * BigInt::from(5 * (4 * u64::from(t) + 1)).pow(n);
    let mut x = rhs.nth_root(n);
    while x.clone().pow(n) < rhs {
        x += 1;
    }
    // 2κ+1 ≥ x  ⇔  κ ≥ (x−1)/2, so the minimal integer κ is ⌊x/2⌋.
    x / 2
}

/// Cap table κ(0..=t_max): per-term minimal, lifted to be strictly
/// increasing.
pub fn kappa_table(dim: usize, t_max: u32) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let mut k = kappa_min(dim, t);
        if let Some(prev) = out.last() {
            if &k <= prev {
                k = prev + BigInt::one();
            }
        }
        out.push(k);
    }
    out
}

/// Exact min over 1 ≤ q ≤ cap of the circle distance ‖q·α‖ for rational α,
/// via continued-fraction convergents (the best approximations); runs in
/// O(log cap) big-integer divisions.
fn best_circle_dist(alpha: &Rat, cap: &BigInt) -> Rat {
    debug_assert!(cap >= &BigInt::one());
    let den = alpha.denom().clone();
    let num = alpha.numer().mod_floor(&den);
    if num.is_zero() {
        return Rat::zero();
    }
    // q_0 = 1 may not have its nearest integer at the truncation 0, so take
    // the two-sided distance explicitly.
    let f = Rat::new(num.clone(), den.clone());
    let g = Rat::one() - &f;
    let mut best = if f <= g { f } else { g };
    // Euclid on (den, num); the remainder chain r_i equals
    // |q_i·num − p_i·den|, so ‖q_i·α‖ = r_i / den for i ≥ 1.
    let mut a = den.clone();
    let mut b = num;
    let mut q_prev = BigInt::zero();
    let mut q_cur = BigInt::one();
    loop {
        let (c, r) = a.div_rem(&b);
        let q_next = &c * &q_cur + &q_prev;
        if &q_next > cap {
            break;
        }
        let dist = Rat::new(r.clone(), den.clone());
        if dist < best {
            best = dist;
        }
        if r.is_zero() {
            break;
        }
        q_prev = q_cur;
        q_cur = q_next;
        a = b;
        b = r;
    }
    best
}

/// Anchor radius for a given index-norm cap: half the least circle distance
/// from 0 among the completion stars with index norm in 1..=cap.
fn eta_for_cap(scheme: &CpsScheme, cap: &BigInt) -> Result<Rat, SearchError> {
    let dist = if scheme.n() == 1 {
        let alpha = scheme.entry(1, 0).to_rat();
        best_circle_dist(&alpha, cap)
    } else {
        min_star_dist_enum(scheme, cap)?
    };
    Ok(dist / rat_int(2))
}

fn min_star_dist_enum(scheme: &CpsScheme, cap: &BigInt) -> Result<Rat, SearchError> {
    let over = || SearchError::BudgetExceeded {
        budget: ETA_ENUM_BUDGET,
        reached: u64::MAX,
    };
    let cap_small: i64 = cap.try_into().map_err(|_| over())?;
    let width = 2u128 * cap_small as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..scheme.n() {
        total = total.checked_mul(width).ok_or_else(over)?;
        if total > u128::from(ETA_ENUM_BUDGET) {
            return Err(SearchError::BudgetExceeded {
                budget: ETA_ENUM_BUDGET,
                reached: total.min(u128::from(u64::MAX)) as u64,
            });
        }
    }
    let one = Rat::one();
    let mut best: Option<Rat> = None;
    for v in centered_box(scheme.n(), cap_small) {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let star = scheme.completion(&v).1.to_rat();
        let mirrored = &one - &star;
        let dist = if star <= mirrored { star } else { mirrored };
        if best.as_ref().map_or(true, |b| &dist < b) {
            best = Some(dist);
        }
    }
    Ok(best.expect("cap ≥ 1 yields at least one nonzero index"))
}

/// The greedily selected anchor system: cap table, accepted candidate
/// indices, radii, half-open intervals, and acceptance ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicBase {
    /// Cap table κ(t) for every shell radius t reached by the selection.
    pub kappa: Vec<BigInt>,
    /// Accepted candidate indices n_k (1-based; candidate 1 is the origin).
    pub nk: Vec<u64>,
    /// Anchor radii ε_k = η at the shell of v(n_k).
    pub eps: Vec<Rat>,
    /// Anchor intervals I_k = [l*_{v(n_k)}, l*_{v(n_k)} + ε_k), in
    /// acceptance order.
    pub intervals: Vec<Interval>,
    /// Acceptance ratios k / n_k.
    pub ratios: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct BaseWire {
    kappa: Vec<String>,
    nk: Vec<u64>,
    eps: Vec<String>,
    intervals: Vec<Interval>,
    ratios: Vec<f64>,
}

impl Serialize for DeterministicBase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BaseWire {
            kappa: self.kappa.iter().map(|k| k.to_string()).collect(),
            nk: self.nk.clone(),
            eps: self.eps.iter().map(fmt_rat).collect(),
            intervals: self.intervals.clone(),
            ratios: self.ratios.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeterministicBase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = BaseWire::deserialize(d)?;
        let kappa = w
            .kappa
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<Result<_, _>>()?;
        let eps = w
            .eps
            .iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect::<Result<_, _>>()?;
        Ok(DeterministicBase {
            kappa,
            nk: w.nk,
            eps,
            intervals: w.intervals,
            ratios: w.ratios,
        })
    }
}

/// Greedily select `k_count` pairwise disjoint anchor intervals.
///
/// Fails with `BudgetExceeded` if the selection would need to inspect more
/// than a fixed number of candidates, or (for internal dimension ≥ 2) if an
/// η computation outgrows its enumeration budget.
pub fn deterministic_base(scheme: &CpsScheme, k_count: usize) -> Result<DeterministicBase, SearchError> {
    let dim = scheme.n();
    let mut kappa: Vec<BigInt> = Vec::new();
    let mut eta: Vec<Rat> = Vec::new();
    let mut numbering: Vec<Vec<i64>> = Vec::new();
    // Accepted intervals as (lo, hi) pairs kept sorted by lo for the
    // disjointness test; `base` keeps them in acceptance order.
    let mut chosen: Vec<(Rat, Rat)> = Vec::new();
    let mut base = DeterministicBase {
        kappa: Vec::new(),
        nk: Vec::new(),
        eps: Vec::new(),
        intervals: Vec::new(),
        ratios: Vec::new(),
    };
    let mut n: u64 = 0;
    while base.nk.len() < k_count {
        n += 1;
        if n > SELECTION_CAP {
            return Err(SearchError::BudgetExceeded {
                budget: SELECTION_CAP,
                reached: n,
            });
        }
        if numbering.len() < n as usize {
            let want = (2 * n as usize).max(64);
            numbering = star_numbering(dim, want);
        }
        let v = &numbering[n as usize - 1];
        let t = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u32;
        while kappa.len() <= t as usize {
            let tt = kappa.len() as u32;
            let mut cap = kappa_min(dim, tt);
            if let Some(prev) = kappa.last() {
                if &cap <= prev {
                    cap = prev + BigInt::one();
                }
            }
            let e = eta_for_cap(scheme, &cap)?;
            debug_assert!(e.is_positive(), "degenerate star slope");
            kappa.push(cap);
            eta.push(e);
        }
        let eps_t = eta[t as usize].clone();
        let lo = scheme.completion(v).1.to_rat();
        let hi = &lo + &eps_t;
        let idx = chosen.partition_point(|p| p.0 < lo);
        let clear_left = idx == 0 || chosen[idx - 1].1 <= lo;
        let clear_right = idx == chosen.len() || hi <= chosen[idx].0;
        if clear_left && clear_right {
            chosen.insert(idx, (lo.clone(), hi.clone()));
            base.nk.push(n);
            base.eps.push(eps_t);
            base.ratios.push(base.nk.len() as f64 / n as f64);
            base.intervals
                .push(Interval::new(lo, hi, false, true).expect("positive radius"));
        }
    }
    base.kappa = kappa;
    Ok(base)
}

/// A deterministic window together with the anchor system it was built on.
#[derive(Debug, Clone, Serialize)]
pub struct DeterministicWindow {
    pub window: WindowApprox,
    pub base: DeterministicBase,
}

/// Assemble the deterministic window at truncation depth `depth`: the k-th
/// anchor interval receives the gap-family window of family k (core gaps
/// plus the marker gaps whose class selects k), translated and cropped.
pub fn deterministic_window(
    scheme: &CpsScheme,
    k_count: usize,
    depth: u32,
) -> Result<DeterministicWindow, SearchError> {
    let base = deterministic_base(scheme, k_count)?;
    let carrier = CantorScheme::middle_third();
    let mut inner_parts: Vec<Interval> = Vec::new();
    let mut outer_parts = carrier
        .outer_hull(depth)
        .subtract(&IntervalSet::from_parts(base.intervals.clone()))
        .into_parts();
    for (k, iv) in base.intervals.iter().enumerate() {
        let family = build_window(&carrier, &GapSelection::Family { j: (k + 1) as u32 }, depth);
        let moved = family.approx.translate(&iv.lo).crop(&iv.lo, &iv.hi);
        inner_parts.extend(moved.inner.into_parts());
        outer_parts.extend(moved.outer.into_parts());
    }
    let window = WindowApprox {
        inner: IntervalSet::from_parts(inner_parts),
        outer: IntervalSet::from_parts(outer_parts),
        depth,
        label: format!("deterministic(K={k_count}, depth={depth})"),
    };
    debug_assert!(window.validate().is_ok());
    Ok(DeterministicWindow { window, base })
}

/// A weak (empty-interior) window together with its anchor system.
#[derive(Debug, Clone, Serialize)]
pub struct WeakWindow {
    pub window: WindowApprox,
    pub base: DeterministicBase,
    /// True when no anchor intervals were requested (K = 0): the window
    /// degenerates to the bare carrier residual, which carries none of the
    /// intended insertion structure.
    pub degenerate: bool,
}

/// Assemble the weak window: each anchor interval receives the weak family
/// truncation (marker-gap insertions of the positive-measure set `m`),
/// translated and cropped. The limit window has empty interior, so the
/// inner approximation is empty at every depth and only the outer set (with
/// its exact measure) is informative.
///
/// `m` must leave positive residual measure; the fat-Cantor schemes do.
pub fn weak_window(
    scheme: &CpsScheme,
    k_count: usize,
    depth: u32,
    m: &CantorScheme,
) -> Result<WeakWindow, SearchError> {
    assert!(
        m.limit_measure().is_positive(),
        "inserted set must keep positive measure in the limit"
    );
    let base = deterministic_base(scheme, k_count)?;
    let carrier = CantorScheme::middle_third();
    let mut outer_parts = carrier
        .outer_hull(depth)
        .subtract(&IntervalSet::from_parts(base.intervals.clone()))
        .into_parts();
    for (k, iv) in base.intervals.iter().enumerate() {
        let trunc = weak_truncation(&carrier, m, (k + 1) as u32, depth);
        let cropped = trunc
            .translate(&iv.lo)
            .intersect(&IntervalSet::from_interval(Interval::closed(
                iv.lo.clone(),
                iv.hi.clone(),
            )));
        outer_parts.extend(cropped.into_parts());
    }
    let window = WindowApprox {
        inner: IntervalSet::empty(),
        outer: IntervalSet::from_parts(outer_parts),
        depth,
        label: format!("weak(K={k_count}, depth={depth})"),
    };
    Ok(WeakWindow {
        window,
        base,
        degenerate: k_count == 0,
    })
}
