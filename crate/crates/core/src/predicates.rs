//! Structural properties of families. Every check works on any [`Family`],
//! so arc families and arbitrary set families share one implementation.
//!
//! Tuples in the s-wise and r-wise definitions may repeat members, so an
//! s-wise intersecting family is also intersecting and contains no empty set.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circle::{bits, full_mask, Family};
use crate::error::{Error, Result};

/// Whether a property survives removing members (`Down`) or adding them (`Up`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PredicateId {
    Intersecting,
    SWiseIntersecting(usize),
    RWiseUnion(usize),
    CrossIntersecting,
    SWiseCrossIntersecting(usize),
    CrossUnion,
    Antichain,
    ChainFree(usize),
    ButterflyFree,
    Star,
    Iu,
    Gronau,
    MatchingAtMost(usize),
    PartitionFree(usize),
}

impl PredicateId {
    /// Every tag with a representative parameter, for listings and tests.
    pub fn catalogue() -> Vec<PredicateId> {
        use PredicateId::*;
        vec![
            Intersecting,
            SWiseIntersecting(3),
            RWiseUnion(2),
            CrossIntersecting,
            SWiseCrossIntersecting(2),
            CrossUnion,
            Antichain,
            ChainFree(2),
            ButterflyFree,
            Star,
            Iu,
            Gronau,
            MatchingAtMost(2),
            PartitionFree(3),
        ]
    }

    /// True for predicates relating a list of families rather than one.
    pub fn is_cross(&self) -> bool {
        matches!(
            self,
            PredicateId::CrossIntersecting
                | PredicateId::SWiseCrossIntersecting(_)
                | PredicateId::CrossUnion
        )
    }

    pub fn direction(&self) -> Direction {
        Direction::Down
    }

    /// Largest number of members in a minimal violating subfamily on a
    /// ground set of size `n`. For cross predicates: members per violating
    /// transversal, with `groups` families in the list.
    pub fn arity(&self, n: usize, groups: usize) -> usize {
        use PredicateId::*;
        match *self {
            Intersecting | Antichain | Iu | Gronau => 2,
            SWiseIntersecting(s) => s,
            RWiseUnion(r) => r,
            ChainFree(l) => l + 1,
            ButterflyFree => 4,
            Star => n.max(1),
            MatchingAtMost(r) => r + 1,
            PartitionFree(p) => p,
            CrossIntersecting | CrossUnion => groups,
            SWiseCrossIntersecting(s) => s,
        }
    }

    /// Evaluates a single-family predicate.
    pub fn holds<F: Family + ?Sized>(&self, fam: &F) -> Result<bool> {
        use PredicateId::*;
        Ok(match *self {
            Intersecting => is_intersecting(fam),
            SWiseIntersecting(s) => is_s_wise_intersecting(fam, s),
            RWiseUnion(r) => is_r_wise_union(fam, r),
            Antichain => is_antichain(fam),
            ChainFree(l) => longest_chain(fam) < l,
            ButterflyFree => !contains_butterfly(fam),
            Star => is_star(fam).0,
            Iu => is_iu(fam),
            Gronau => satisfies_gronau(fam),
            MatchingAtMost(r) => matching_number(fam)? <= r,
            PartitionFree(p) => !has_partition(fam, p),
            CrossIntersecting | SWiseCrossIntersecting(_) | CrossUnion => {
                return Err(Error::domain(format!(
                    "`{self}` relates several families; pass a list"
                )))
            }
        })
    }

    /// Evaluates a cross predicate on a list of member-mask lists.
    pub fn holds_cross(&self, fams: &[Vec<u64>], n: usize) -> Result<bool> {
        match *self {
            PredicateId::CrossIntersecting => Ok(cross_intersecting_masks(fams)),
            PredicateId::CrossUnion => Ok(cross_union_masks(fams, n)),
            PredicateId::SWiseCrossIntersecting(s) => {
                if fams.len() < s {
                    return Err(Error::domain(format!(
                        "s-wise cross-intersection needs at least s = {s} families, got {}",
                        fams.len()
                    )));
                }
                Ok((0..fams.len()).combinations(s).all(|idx| {
                    let sub: Vec<Vec<u64>> = idx.iter().map(|&i| fams[i].clone()).collect();
                    cross_intersecting_masks(&sub)
                }))
            }
            _ => Err(Error::domain(format!("`{self}` is a single-family predicate"))),
        }
    }

    fn validate(&self) -> Result<()> {
        use PredicateId::*;
        match *self {
            SWiseIntersecting(s) | SWiseCrossIntersecting(s) if s < 2 => {
                Err(Error::domain(format!("s = {s} must be at least 2")))
            }
            RWiseUnion(r) | MatchingAtMost(r) | PartitionFree(r) if r < 1 => {
                Err(Error::domain(format!("r = {r} must be at least 1")))
            }
            ChainFree(l) if l < 1 => Err(Error::domain(format!("l = {l} must be at least 1"))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use PredicateId::*;
        match self {
            Intersecting => write!(f, "intersecting"),
            SWiseIntersecting(s) => write!(f, "s-wise-intersecting:{s}"),
            RWiseUnion(r) => write!(f, "r-wise-union:{r}"),
            CrossIntersecting => write!(f, "cross-intersecting"),
            SWiseCrossIntersecting(s) => write!(f, "s-wise-cross-intersecting:{s}"),
            CrossUnion => write!(f, "cross-union"),
            Antichain => write!(f, "antichain"),
            ChainFree(l) => write!(f, "chain-free:{l}"),
            ButterflyFree => write!(f, "butterfly-free"),
            Star => write!(f, "star"),
            Iu => write!(f, "iu"),
            Gronau => write!(f, "gronau"),
            MatchingAtMost(r) => write!(f, "matching-at-most:{r}"),
            PartitionFree(p) => write!(f, "partition-free:{p}"),
        }
    }
}

impl FromStr for PredicateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use PredicateId::*;
        let (tag, arg) = match s.split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (s, None),
        };
        let num = || -> Result<usize> {
            let a = arg.ok_or_else(|| Error::Parse(format!("`{tag}` needs a parameter, e.g. `{tag}:2`")))?;
            a.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad parameter `{a}` in `{s}`")))
        };
        let plain = |p: PredicateId| -> Result<PredicateId> {
            match arg {
                None => Ok(p),
                Some(_) => Err(Error::Parse(format!("`{tag}` takes no parameter"))),
            }
        };
        let id = match tag.trim() {
            "intersecting" => plain(Intersecting)?,
            "s-wise-intersecting" => SWiseIntersecting(num()?),
            "r-wise-union" => RWiseUnion(num()?),
            "cross-intersecting" => plain(CrossIntersecting)?,
            "s-wise-cross-intersecting" => SWiseCrossIntersecting(num()?),
            "cross-union" => plain(CrossUnion)?,
            "antichain" => plain(Antichain)?,
            "chain-free" => ChainFree(num()?),
            "butterfly-free" => plain(ButterflyFree)?,
            "star" => plain(Star)?,
            "iu" => plain(Iu)?,
            "gronau" => plain(Gronau)?,
            "matching-at-most" => MatchingAtMost(num()?),
            "partition-free" => PartitionFree(num()?),
            other => return Err(Error::Parse(format!("unknown predicate `{other}`"))),
        };
        id.validate()?;
        Ok(id)
    }
}

impl Serialize for PredicateId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PredicateId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Every pair of members (a member with itself included) meets.
pub fn is_intersecting<F: Family + ?Sized>(fam: &F) -> bool {
    let m = fam.member_masks();
    m.iter()
        .enumerate()
        .all(|(i, &a)| m[i..].iter().all(|&b| a & b != 0))
}

/// True iff some choice of at most `depth` members from `masks[from..]`
/// drives `acc` to a state where `done` holds.
fn some_combo(
    masks: &[u64],
    from: usize,
    depth: usize,
    acc: u64,
    step: &impl Fn(u64, u64) -> u64,
    done: &impl Fn(u64) -> bool,
) -> bool {
    if done(acc) {
        return true;
    }
    if depth == 0 {
        return false;
    }
    (from..masks.len()).any(|i| some_combo(masks, i + 1, depth - 1, step(acc, masks[i]), step, done))
}

/// Every `s` members, repeats allowed, have a common element.
pub fn is_s_wise_intersecting<F: Family + ?Sized>(fam: &F, s: usize) -> bool {
    let m = fam.member_masks();
    let full = full_mask(fam.ground().n());
    !some_combo(&m, 0, s, full, &|a, b| a & b, &|a| a == 0)
}

/// No `r` members, repeats allowed, cover the ground set.
pub fn is_r_wise_union<F: Family + ?Sized>(fam: &F, r: usize) -> bool {
    let m = fam.member_masks();
    let full = full_mask(fam.ground().n());
    !some_combo(&m, 0, r, 0, &|a, b| a | b, &|a| a == full)
}

fn transversal(
    fams: &[Vec<u64>],
    acc: u64,
    step: &impl Fn(u64, u64) -> u64,
    bad: &impl Fn(u64) -> bool,
) -> bool {
    match fams.split_first() {
        None => bad(acc),
        Some((first, rest)) => first.iter().any(|&m| transversal(rest, step(acc, m), step, bad)),
    }
}

pub(crate) fn cross_intersecting_masks(fams: &[Vec<u64>]) -> bool {
    !transversal(fams, u64::MAX, &|a, b| a & b, &|a| a == 0)
}

pub(crate) fn cross_union_masks(fams: &[Vec<u64>], n: usize) -> bool {
    let full = full_mask(n);
    !transversal(fams, 0, &|a, b| a | b, &|a| a & full == full)
}

fn common_n<F: Family>(fams: &[F]) -> Result<usize> {
    let Some(first) = fams.first() else {
        return Err(Error::domain("a cross condition needs at least two families"));
    };
    let n = first.ground().n();
    if fams.len() < 2 {
        return Err(Error::domain("a cross condition needs at least two families"));
    }
    if fams.iter().any(|f| f.ground().n() != n) {
        return Err(Error::domain("families live on different ground sets"));
    }
    Ok(n)
}

/// Every transversal `(F_1, .., F_s)` with `F_i` from `fams[i]` meets.
pub fn are_cross_intersecting<F: Family>(fams: &[F]) -> Result<bool> {
    common_n(fams)?;
    let lists: Vec<Vec<u64>> = fams.iter().map(|f| f.member_masks()).collect();
    Ok(cross_intersecting_masks(&lists))
}

/// No transversal covers the ground set.
pub fn are_cross_union<F: Family>(fams: &[F]) -> Result<bool> {
    let n = common_n(fams)?;
    let lists: Vec<Vec<u64>> = fams.iter().map(|f| f.member_masks()).collect();
    Ok(cross_union_masks(&lists, n))
}

/// Every `s` of the families, taken at distinct indices, are cross-intersecting.
pub fn is_s_wise_cross_intersecting<F: Family>(fams: &[F], s: usize) -> Result<bool> {
    let n = common_n(fams)?;
    let lists: Vec<Vec<u64>> = fams.iter().map(|f| f.member_masks()).collect();
    PredicateId::SWiseCrossIntersecting(s).holds_cross(&lists, n)
}

/// Longest chain `R_0 ⊊ R_1 ⊊ .. ⊊ R_l` in the family, measured by `l`.
/// Zero for antichains, including the empty family.
pub fn longest_chain<F: Family + ?Sized>(fam: &F) -> usize {
    let mut m = fam.member_masks();
    m.sort_by_key(|x| x.count_ones());
    let mut best = vec![0usize; m.len()];
    for i in 0..m.len() {
        for j in 0..i {
            if m[j] != m[i] && m[j] & !m[i] == 0 {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

pub fn is_antichain<F: Family + ?Sized>(fam: &F) -> bool {
    let m = fam.member_masks();
    m.iter()
        .enumerate()
        .all(|(i, &a)| m[i + 1..].iter().all(|&b| a & !b != 0 && b & !a != 0))
}

/// Four distinct members `E, F, G, H` with `E ∪ F ⊆ G ∩ H`.
pub fn contains_butterfly<F: Family + ?Sized>(fam: &F) -> bool {
    let m = fam.member_masks();
    if m.len() < 4 {
        return false;
    }
    for (i, &g) in m.iter().enumerate() {
        for &h in &m[i + 1..] {
            let common = g & h;
            let below = m
                .iter()
                .filter(|&&x| x != g && x != h && x & !common == 0)
                .take(2)
                .count();
            if below == 2 {
                return true;
            }
        }
    }
    false
}

/// Whether all members share an element, with the least such element.
/// The empty family counts as a star without a witness.
pub fn is_star<F: Family + ?Sized>(fam: &F) -> (bool, Option<usize>) {
    let m = fam.member_masks();
    if m.is_empty() {
        return (true, None);
    }
    let common = m.iter().fold(full_mask(fam.ground().n()), |a, &b| a & b);
    match bits(common).next() {
        Some(i) => (true, Some(i + 1)),
        None => (false, None),
    }
}

/// Largest number of pairwise disjoint members.
pub fn matching_number<F: Family + ?Sized>(fam: &F) -> Result<usize> {
    let mut m = fam.member_masks();
    if m.contains(&0) {
        return Err(Error::domain(
            "the matching number is unbounded when the empty set is a member",
        ));
    }
    m.sort_by_key(|x| (x.count_ones(), *x));
    let mut best = 0;
    matching_rec(&m, 0, &mut best);
    Ok(best)
}

fn matching_rec(cands: &[u64], taken: usize, best: &mut usize) {
    if taken > *best {
        *best = taken;
    }
    // sorted by size, so the first candidate is a smallest one
    let Some(&first) = cands.first() else {
        return;
    };
    let free = cands.iter().fold(0, |a, &b| a | b).count_ones() as usize;
    let bound = taken + cands.len().min(free / first.count_ones() as usize);
    if bound <= *best {
        return;
    }
    for (i, &x) in cands.iter().enumerate() {
        if taken + cands.len() - i <= *best {
            return;
        }
        let rest: Vec<u64> = cands[i + 1..].iter().copied().filter(|&y| x & y == 0).collect();
        matching_rec(&rest, taken + 1, best);
    }
}

/// Whether `parts` distinct, pairwise disjoint members have union `[n]`.
pub fn has_partition<F: Family + ?Sized>(fam: &F, parts: usize) -> bool {
    let full = full_mask(fam.ground().n());
    let m = fam.member_masks();
    fn rec(m: &[u64], from: usize, left: usize, covered: u64, full: u64) -> bool {
        if left == 0 {
            return covered == full;
        }
        (from..m.len()).any(|i| m[i] & covered == 0 && rec(m, i + 1, left - 1, covered | m[i], full))
    }
    rec(&m, 0, parts, 0, full)
}

/// No two members, a member with itself included, are disjoint or cover
/// the ground set.
pub fn is_iu<F: Family + ?Sized>(fam: &F) -> bool {
    let full = full_mask(fam.ground().n());
    let m = fam.member_masks();
    m.iter()
        .enumerate()
        .all(|(i, &a)| m[i..].iter().all(|&b| a & b != 0 && a | b != full))
}

/// Like [`is_iu`], except that a member may coexist with its exact complement.
pub fn satisfies_gronau<F: Family + ?Sized>(fam: &F) -> bool {
    let full = full_mask(fam.ground().n());
    let m = fam.member_masks();
    m.iter().enumerate().all(|(i, &a)| {
        m[i..]
            .iter()
            .all(|&b| (a & b != 0 && a | b != full) || a == !b & full)
    })
}
