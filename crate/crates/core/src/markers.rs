//! Arithmetic gap families used to build windows with prescribed local
//! pattern structure.
//!
//! Every finite disjoint pair (M, N) of subsets of {1, 2, …} is encoded by a
//! single class number n ≥ 1: write n−1 in base 3, least significant digit
//! first; digit value 1 at position e−1 puts e into M, value 2 puts e into
//! N. Class 1 is the empty pair.
//!
//! Gap addresses are sorted into three roles:
//!
//! * core — address length divisible by 4; these gaps belong to *every*
//!   family window;
//! * marker of class n — words `0^{1+ζ} 1 tag(n)` with ζ ≥ 1, where `tag(n)`
//!   is the binary expansion of n with its leading bit removed, and the
//!   total length is *not* divisible by 4 (words of core length keep their
//!   core role);
//! * plain — everything else; plain gaps belong to no family window.
//!
//! The family window indexed by j contains the core gaps together with the
//! marker gaps of every class whose M-set contains j, so a marker gap of
//! class n certifies the exact membership pattern `j ∈ M_n` across all
//! families at once. Because ζ is unbounded, every class has marker gaps
//! arbitrarily close to 0, which is what makes translated windows reproduce
//! the same pattern structure at every scale.

use crate::interval::IntervalSet;
use crate::rat::{rat_int, Rat};
use crate::window::{CantorScheme, Gap};

/// Decode class `n ≥ 1` into its disjoint pair (M, N), both sorted.
pub fn pair_sets(n: u64) -> (Vec<u32>, Vec<u32>) {
    assert!(n >= 1, "classes are numbered from 1");
    let mut m = Vec::new();
    let mut nn = Vec::new();
    let mut rest = n - 1;
    let mut e = 1u32;
    while rest > 0 {
        match rest % 3 {
            1 => m.push(e),
            2 => nn.push(e),
            _ => {}
        }
        rest /= 3;
        e += 1;
    }
    (m, nn)
}

/// Encode a disjoint pair (M, N) back into its class number.
pub fn pair_index(m: &[u32], n: &[u32]) -> u64 {
    let mut idx = 1u64;
    for &e in m {
        idx += 3u64.pow(e - 1);
    }
    for &e in n {
        idx += 2 * 3u64.pow(e - 1);
    }
    idx
}

/// Is j a member of M_n?
pub fn in_m(j: u32, n: u64) -> bool {
    let mut rest = n - 1;
    for _ in 1..j {
        rest /= 3;
    }
    rest % 3 == 1
}

/// Is j a member of N_n?
pub fn in_n(j: u32, n: u64) -> bool {
    let mut rest = n - 1;
    for _ in 1..j {
        rest /= 3;
    }
    rest % 3 == 2
}

/// Address length divisible by 4 ⇒ the gap is core.
pub fn is_core(addr: &str) -> bool {
    !addr.is_empty() && addr.len() % 4 == 0
}

/// Decode a marker address `0^{1+ζ} 1 tag(n)` (ζ ≥ 1, length not divisible
/// by 4) into its class, or `None` for core and plain words.
pub fn marker_class(addr: &str) -> Option<u64> {
    if addr.is_empty() || addr.len() % 4 == 0 {
        return None;
    }
    let bytes = addr.as_bytes();
    let z = bytes.iter().take_while(|&&b| b == b'0').count();
    // Need at least two leading zeros, then a 1.
    if z < 2 || z >= bytes.len() || bytes[z] != b'1' {
        return None;
    }
    let tag = &addr[z + 1..];
    if !tag.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    let mut n = 1u64;
    for b in tag.bytes() {
        n = n * 2 + u64::from(b == b'1');
    }
    Some(n)
}

/// Does the gap at `addr` belong to the family window indexed by j?
pub fn gap_in_family(addr: &str, j: u32) -> bool {
    if is_core(addr) {
        return true;
    }
    match marker_class(addr) {
        Some(n) => in_m(j, n),
        None => false,
    }
}

/// All marker addresses of class `n` with length at most `max_len`, in
/// canonical (length, lexicographic) order.
pub fn marker_words_for_class(n: u64, max_len: u32) -> Vec<String> {
    assert!(n >= 1);
    let tag_len = (64 - n.leading_zeros() - 1) as usize; // bits of n minus the leading 1
    let tag: String = (0..tag_len)
        .rev()
        .map(|i| if (n >> i) & 1 == 1 { '1' } else { '0' })
        .collect();
    let mut out = Vec::new();
    for zeta in 1.. {
        let len = (1 + zeta) + 1 + tag_len;
        if len > max_len as usize {
            break;
        }
        if len % 4 == 0 {
            continue;
        }
        out.push(format!("{}1{}", "0".repeat(1 + zeta), tag));
    }
    out
}

/// Truncation depth for the set inserted into a gap of length `gap_len`:
/// at least the carrier depth, and deep enough that the inserted scheme's
/// leftmost piece is no longer than `gap_len`/16, so the insertion's
/// structure is resolved at the gap's own scale. Deeper truncations nest,
/// which keeps the overall outer approximation monotone in `depth`.
fn insertion_depth(m: &CantorScheme, gap_len: &Rat, depth: u32) -> u32 {
    let target = gap_len / rat_int(16);
    let mut d = depth;
    while d < depth + 64 && m.piece_length(d) > target {
        d += 1;
    }
    d
}

/// Weak-family truncation over the carrier at a given depth: the depth-d
/// hull of the carrier's residual set together with, inside every marker
/// gap of a class containing j, a translated copy of the set `m` cropped to
/// the gap — the part of `m` within [0, gap length] shifted to start at the
/// gap's left end. The insertion keeps positive mass inside every
/// neighborhood of the gap's left end because `m`'s leftmost depth-d piece
/// carries measure ≥ (limit measure)/2^d. The limit set has empty interior,
/// so this truncation is only an outer approximation; its measure is exact
/// for the truncation itself.
pub fn weak_truncation(carrier: &CantorScheme, m: &CantorScheme, j: u32, depth: u32) -> IntervalSet {
    let mut parts = carrier.outer_hull(depth).into_parts();
    for gap in marker_gaps_in_family(carrier, j, depth) {
        let len = gap.interval.len();
        let d = insertion_depth(m, &len, depth);
        let inserted = m.outer_hull_before(d, &len).translate(&gap.interval.lo);
        parts.extend(inserted.into_parts());
    }
    IntervalSet::from_parts(parts)
}

/// The marker gaps of stage ≤ depth whose class selects family j.
pub fn marker_gaps_in_family(scheme: &CantorScheme, j: u32, depth: u32) -> Vec<Gap> {
    scheme
        .gaps_up_to(depth)
        .into_iter()
        .filter(|g| marker_class(&g.addr).is_some_and(|n| in_m(j, n)))
        .collect()
}

/// Exact measure of the weak-family truncation minus the hull: the total
/// inserted mass, each term the measure of `m`'s truncated hull within
/// [0, gap length] (used by measure cross-checks).
pub fn weak_insertion_measure(carrier: &CantorScheme, m: &CantorScheme, j: u32, depth: u32) -> Rat {
    marker_gaps_in_family(carrier, j, depth)
        .iter()
        .map(|g| {
            let len = g.interval.len();
            let d = insertion_depth(m, &len, depth);
            m.outer_hull_before(d, &len).measure()
        })
        .fold(Rat::from_integer(0.into()), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::window::CantorKind;

    #[test]
    fn pair_coding_round_trips() {
        for n in 1..=200 {
            let (m, nn) = pair_sets(n);
            assert!(m.iter().all(|e| !nn.contains(e)), "pair must be disjoint");
            assert_eq!(pair_index(&m, &nn), n);
            for j in 1..=6 {
                assert_eq!(in_m(j, n), m.contains(&j));
                assert_eq!(in_n(j, n), nn.contains(&j));
            }
        }
    }

    #[test]
    fn pair_coding_known_values() {
        // ({1}, {2}) sits at class 1 + 3^0 + 2·3^1 = 8.
        assert_eq!(pair_index(&[1], &[2]), 8);
        assert_eq!(pair_sets(8), (vec![1], vec![2]));
        // The empty pair is class 1.
        assert_eq!(pair_sets(1), (vec![], vec![]));
        // M = {1,2,3}, N = ∅ is class 14.
        assert_eq!(pair_index(&[1, 2, 3], &[]), 14);
    }

    #[test]
    fn marker_decoding() {
        // 0^2 1 with empty tag: class 1, length 3.
        assert_eq!(marker_class("001"), Some(1));
        // 0^2 1 tag "10": class docs — "1"+"10" = 6.
        assert_eq!(marker_class("00110"), Some(6));
        // One leading zero is not a marker.
        assert_eq!(marker_class("01"), None);
        assert_eq!(marker_class("011"), None);
        // All zeros is not a marker.
        assert_eq!(marker_class("000"), None);
        // Core length absorbs marker-shaped words.
        assert_eq!(marker_class("00000110"), None);
        assert!(is_core("00000110"));
    }

    #[test]
    fn family_membership() {
        // Core gaps are in every family.
        assert!(gap_in_family("0000", 1));
        assert!(gap_in_family("0000", 7));
        // Class 8 = ({1},{2}): family 1 yes, families 2 and 3 no.
        let w8 = marker_words_for_class(8, 12);
        assert!(!w8.is_empty());
        for w in &w8 {
            assert_eq!(marker_class(w), Some(8));
            assert!(gap_in_family(w, 1));
            assert!(!gap_in_family(w, 2));
            assert!(!gap_in_family(w, 3));
        }
        // Plain gaps are in no family.
        assert!(!gap_in_family("01", 1));
        assert!(!gap_in_family("000", 2));
    }

    #[test]
    fn marker_words_shapes() {
        // Class 1 tag is empty: words 0^{1+ζ}1.
        assert_eq!(marker_words_for_class(1, 7), vec!["001", "00001", "000001", "0000001"]);
        // Lengths divisible by 4 are skipped ("0001" is core length).
        assert!(marker_words_for_class(1, 7).iter().all(|w| w.len() % 4 != 0));
        // Class 14 tag is "110".
        assert_eq!(marker_words_for_class(14, 7), vec!["001110", "0001110"]);
    }

    #[test]
    fn weak_truncation_measures() {
        let carrier = CantorScheme::middle_third();
        let m = CantorScheme::new(CantorKind::fat_default()).unwrap();
        let depth = 7;
        let t1 = weak_truncation(&carrier, &m, 1, depth);
        let hull = carrier.outer_hull(depth);
        assert!(hull.is_subset_of(&t1));
        let extra = t1.measure() - hull.measure();
        assert_eq!(extra, weak_insertion_measure(&carrier, &m, 1, depth));
        assert!(extra > rat(0, 1), "insertions must carry positive mass");
        // Insertions live inside gaps, disjoint from the hull.
        assert_eq!(t1.subtract(&hull).measure(), extra);
        // ... and inside the closures of exactly the selected marker gaps.
        let closures = IntervalSet::from_parts(
            marker_gaps_in_family(&carrier, 1, depth)
                .iter()
                .map(|g| {
                    crate::interval::Interval::closed(g.interval.lo.clone(), g.interval.hi.clone())
                })
                .collect(),
        );
        assert!(t1.subtract(&hull).is_subset_of(&closures));
    }

    #[test]
    fn inserted_set_keeps_mass_at_every_scale_near_zero() {
        // Translate-and-crop insertions only work if the inserted set has
        // positive measure in every [0, δ): its leftmost depth-d piece keeps
        // measure >= (limit measure)/2^d, exactly.
        let m = CantorScheme::new(CantorKind::fat_default()).unwrap();
        for d in [2u32, 6, 10, 16] {
            let delta = m.piece_length(d);
            let mass = m.outer_hull_before(d + 8, &delta).measure();
            let lower = m.limit_measure() / rat_int(2).pow(d as i32);
            assert!(mass > rat(0, 1), "depth {d}");
            assert!(mass >= lower, "depth {d}: {mass} < {lower}");
        }
    }
}
