//! Constructive certificates: checks that reproduce the combinatorial
//! arguments behind several bounds instead of only their numeric outcome.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circle::{arc_mask, full_mask, Arc, ArcFamily, GroundSet, SetFamily};
use crate::constructions::{b_set_mask, m_pq};
use crate::error::{Error, Result};
use crate::predicates::{contains_butterfly, is_antichain, is_intersecting, is_star, satisfies_gronau};

/// Largest `n` for which [`hilton_milner_circle_check`] enumerates `2^n`
/// subfamilies of a level.
pub const HM_LIMIT: usize = 24;

/// One admissible `(p, q)` for the family `M_{p,q}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpqCheck {
    pub p: usize,
    pub q: usize,
    pub size: usize,
    pub intersecting: bool,
    pub star: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HiltonMilnerReport {
    pub n: usize,
    pub k: usize,
    /// Intersecting subfamilies of `A(n,k)`, the empty one included.
    pub intersecting_families: u64,
    pub non_star_families: u64,
    pub max_non_star: Option<usize>,
    /// `3k - n` when `k >= 2` and `n <= 3(k-1)`, where non-stars can exist.
    pub bound: Option<usize>,
    /// Lexicographically first non-star family of maximum size.
    pub extremal: Option<ArcFamily>,
    /// Three members of `extremal` with empty common intersection.
    pub empty_triple: Option<[Arc; 3]>,
    pub every_non_star_has_empty_triple: bool,
    pub m_pq: Vec<MpqCheck>,
}

impl HiltonMilnerReport {
    /// Existence matches the range, the maximum equals the bound, every
    /// non-star has an empty triple and every `M_{p,q}` is a tight non-star.
    pub fn holds(&self) -> bool {
        let exists = self.non_star_families > 0;
        exists == self.bound.is_some()
            && self.max_non_star == self.bound
            && self.every_non_star_has_empty_triple
            && self.m_pq.iter().all(|m| {
                m.intersecting && !m.star && Some(m.size) == self.bound
            })
            && (self.bound.is_none() || !self.m_pq.is_empty())
    }
}

fn empty_triple(masks: &[u64]) -> Option<[usize; 3]> {
    let m = masks.len();
    for a in 0..m {
        for b in a + 1..m {
            let ab = masks[a] & masks[b];
            if let Some(c) = (b + 1..m).find(|&c| ab & masks[c] == 0) {
                return Some([a, b, c]);
            }
        }
    }
    None
}

/// Exhaustive classification of intersecting subfamilies of `A(n,k)` that
/// are not stars, with the `M_{p,q}` families as tightness witnesses.
pub fn hilton_milner_circle_check(n: usize, k: usize) -> Result<HiltonMilnerReport> {
    let g = GroundSet::new(n)?;
    if !(k >= 1 && n >= 2 * k) {
        return Err(Error::domain(format!("needs n >= 2k > 1; got n = {n}, k = {k}")));
    }
    if n > HM_LIMIT {
        return Err(Error::Limit(format!("2^{n} subfamilies of A({n},{k}); the limit is n = {HM_LIMIT}")));
    }
    let masks: Vec<u64> = (0..n).map(|h| arc_mask(n, h, k)).collect();
    let meets: Vec<u64> = (0..n)
        .map(|h| (0..n).filter(|&j| masks[h] & masks[j] != 0).fold(0, |acc, j| acc | 1 << j))
        .collect();

    struct Acc {
        intersecting: u64,
        non_star: u64,
        best: Option<(usize, u64)>,
        all_triples: bool,
    }
    fn rec(h: usize, chosen: u64, allowed: u64, common: u64, masks: &[u64], meets: &[u64], acc: &mut Acc) {
        let n = masks.len();
        if h == n {
            acc.intersecting += 1;
            if chosen != 0 && common == 0 {
                acc.non_star += 1;
                let members: Vec<u64> = (0..n).filter(|&j| chosen >> j & 1 == 1).map(|j| masks[j]).collect();
                if empty_triple(&members).is_none() {
                    acc.all_triples = false;
                }
                let size = chosen.count_ones() as usize;
                // Same size: smaller when the lowest differing head is ours.
                let better = match acc.best {
                    None => true,
                    Some((s, m)) => size > s || (size == s && chosen & (chosen ^ m) & (chosen ^ m).wrapping_neg() != 0),
                };
                if better {
                    acc.best = Some((size, chosen));
                }
            }
            return;
        }
        rec(h + 1, chosen, allowed, common, masks, meets, acc);
        if allowed >> h & 1 == 1 {
            rec(h + 1, chosen | 1 << h, allowed & meets[h], common & masks[h], masks, meets, acc);
        }
    }
    let mut acc = Acc { intersecting: 0, non_star: 0, best: None, all_triples: true };
    rec(0, 0, full_mask(n), full_mask(n), &masks, &meets, &mut acc);

    let bound = (k >= 2 && n <= 3 * (k - 1)).then(|| 3 * k - n);
    let (extremal, triple) = match acc.best {
        None => (None, None),
        Some((_, heads)) => {
            let fam = ArcFamily::from_level(g, k, heads)?;
            let arcs = fam.arcs();
            let m: Vec<u64> = arcs.iter().map(|a| arc_mask(n, a.head - 1, a.len)).collect();
            let t = empty_triple(&m).map(|[a, b, c]| [arcs[a], arcs[b], arcs[c]]);
            (Some(fam), t)
        }
    };

    let mut checks = Vec::new();
    if bound.is_some() {
        for p in 2..=k {
            for q in p + 1..=n.min(p + k - 1) {
                if q + k <= n + 1 {
                    continue;
                }
                let fam = m_pq(n, k, p, q)?;
                checks.push(MpqCheck {
                    p,
                    q,
                    size: fam.len(),
                    intersecting: is_intersecting(&fam),
                    star: is_star(&fam).0,
                });
            }
        }
    }

    Ok(HiltonMilnerReport {
        n,
        k,
        intersecting_families: acc.intersecting,
        non_star_families: acc.non_star,
        max_non_star: acc.best.map(|(s, _)| s),
        bound,
        extremal,
        empty_triple: triple,
        every_non_star_has_empty_triple: acc.all_triples,
        m_pq: checks,
    })
}

/// A member `Q` that is neither minimal nor maximal, with the unique minimal
/// member below it and the unique maximal member above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ButterflyLink {
    pub middle: Arc,
    pub below: Arc,
    pub above: Arc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ButterflySplit {
    /// Minimal members.
    pub minimal: ArcFamily,
    /// Members that are neither minimal nor maximal.
    pub middle: ArcFamily,
    /// Maximal members.
    pub maximal: ArcFamily,
    pub links: Vec<ButterflyLink>,
    /// `2|P| + |Q| <= 2n`.
    pub minimal_bound: bool,
    /// `2|R| + |Q| <= 2n`.
    pub maximal_bound: bool,
}

impl ButterflySplit {
    pub fn holds(&self) -> bool {
        self.minimal_bound && self.maximal_bound
    }
}

/// Splits a butterfly-free arc family into minimal, middle and maximal
/// members. A member that is both minimal and maximal lands in both outer
/// parts, so an antichain gives `P = R = fam` and `Q = ∅`.
pub fn butterfly_decompose(fam: &ArcFamily) -> Result<ButterflySplit> {
    if contains_butterfly(fam) {
        return Err(Error::domain("family contains a butterfly"));
    }
    let g = fam.ground();
    let n = g.n();
    let arcs = fam.arcs();
    let m: Vec<u64> = arcs.iter().map(|a| arc_mask(n, a.head - 1, a.len)).collect();
    let below = |i: usize| -> Vec<usize> { (0..m.len()).filter(|&j| j != i && m[j] & !m[i] == 0).collect() };
    let above = |i: usize| -> Vec<usize> { (0..m.len()).filter(|&j| j != i && m[i] & !m[j] == 0).collect() };

    let mut split = ButterflySplit {
        minimal: ArcFamily::empty(g),
        middle: ArcFamily::empty(g),
        maximal: ArcFamily::empty(g),
        links: Vec::new(),
        minimal_bound: false,
        maximal_bound: false,
    };
    for (i, &a) in arcs.iter().enumerate() {
        let (lo, hi) = (below(i), above(i));
        if lo.is_empty() {
            split.minimal.insert(a)?;
        }
        if hi.is_empty() {
            split.maximal.insert(a)?;
        }
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        split.middle.insert(a)?;
        let pick = |cands: Vec<usize>, minimal: bool| -> Result<Arc> {
            let ends: Vec<usize> = cands
                .into_iter()
                .filter(|&j| if minimal { below(j).is_empty() } else { above(j).is_empty() })
                .collect();
            match ends.as_slice() {
                [j] => Ok(arcs[*j]),
                _ => Err(Error::Internal(format!(
                    "{a} has {} {} members on one side in a butterfly-free family",
                    ends.len(),
                    if minimal { "minimal" } else { "maximal" }
                ))),
            }
        };
        split.links.push(ButterflyLink { middle: a, below: pick(lo, true)?, above: pick(hi, false)? });
    }
    for part in [&split.minimal, &split.middle, &split.maximal] {
        if !is_antichain(part) {
            return Err(Error::Internal(format!("part {part} of a butterfly-free split is not an antichain")));
        }
    }
    let q = split.middle.len();
    split.minimal_bound = 2 * split.minimal.len() + q <= 2 * n;
    split.maximal_bound = 2 * split.maximal.len() + q <= 2 * n;
    Ok(split)
}

/// Membership over `A(n,k-1) ∪ A(n,k) ∪ B(n,k+1)` for `n = 3k - 1`. Bit
/// `i - 1` of each word stands for the set indexed by `x_i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub struct TraceMembership {
    /// `A_{k-1}(x_i)`.
    pub short: u64,
    /// `A_k(x_i)`.
    pub arcs: u64,
    /// `B_{k+1}(x_i)`.
    pub b_sets: u64,
}

impl TraceMembership {
    pub fn len(&self) -> usize {
        (self.short.count_ones() + self.arcs.count_ones() + self.b_sets.count_ones()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Member point masks, in the order short arcs, arcs, `B` sets.
    pub fn masks(&self, n: usize, k: usize) -> Vec<u64> {
        let pick = |word: u64, f: &dyn Fn(usize) -> u64| -> Vec<u64> {
            (0..n).filter(|&i| word >> i & 1 == 1).map(f).collect()
        };
        let mut out = pick(self.short, &|i| arc_mask(n, i, k - 1));
        out.extend(pick(self.arcs, &|i| arc_mask(n, i, k)));
        out.extend(pick(self.b_sets, &|i| b_set_mask(n, k, i + 1)));
        out
    }
}

/// Three pairwise disjoint members covering `[n]`, as point lists.
pub fn find_partition(n: usize, masks: &[u64]) -> Option<[Vec<usize>; 3]> {
    let full = full_mask(n);
    let pts = |m: u64| (0..n).filter(|&i| m >> i & 1 == 1).map(|i| i + 1).collect::<Vec<_>>();
    for a in 0..masks.len() {
        for b in a + 1..masks.len() {
            if masks[a] & masks[b] != 0 {
                continue;
            }
            for c in b + 1..masks.len() {
                if masks[c] & (masks[a] | masks[b]) == 0 && masks[a] | masks[b] | masks[c] == full {
                    return Some([pts(masks[a]), pts(masks[b]), pts(masks[c])]);
                }
            }
        }
    }
    None
}

/// Image of an index under φ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum PhiTarget {
    /// `A_k(x_j)`, missing from the family.
    Arc(usize),
    /// `B_{k+1}(x_j)`, missing from the family.
    BSet(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub n: usize,
    pub k: usize,
    /// Indices `i` with `A_{k-1}(x_i)` present.
    pub r: Vec<usize>,
    /// Indices of `r` whose `i - k` is absent from `r`.
    pub r0: Vec<usize>,
    pub r1: Vec<usize>,
    /// Indices of absent `k`-arcs.
    pub s: Vec<usize>,
    /// Indices of absent `B` sets.
    pub t: Vec<usize>,
    pub mapping: Vec<(usize, PhiTarget)>,
    pub injective: bool,
    /// Number of members of the family.
    pub trace: usize,
}

impl PhiReport {
    /// `φ` is injective into the missing sets, so `|R| <= |S| + |T|` and
    /// the family has at most `2n` members.
    pub fn holds(&self) -> bool {
        self.injective && self.r.len() <= self.s.len() + self.t.len() && self.trace <= 2 * self.n
    }
}

/// The sets `B_{k+1}(x_i)`, `A_{k-1}(x_{i-k+1})`, `A_{k-1}(x_{i+k})` as point
/// masks; for `n = 3k - 1` they partition the circle.
pub fn b_partition(n: usize, k: usize, i: usize) -> [u64; 3] {
    let g = |x: i64| (x - 1).rem_euclid(n as i64) as usize;
    let i = i as i64;
    [b_set_mask(n, k, g(i) + 1), arc_mask(n, g(i - k as i64 + 1), k - 1), arc_mask(n, g(i + k as i64), k - 1)]
}

/// Builds the injection from present `(k-1)`-arcs into missing `k`-arcs and
/// `B` sets for a family without a three-part partition of `[3k - 1]`.
pub fn injection_phi(n: usize, k: usize, fam: TraceMembership) -> Result<PhiReport> {
    GroundSet::new(n)?;
    if !(k >= 2 && n == 3 * k - 1) {
        return Err(Error::domain(format!("needs n = 3k - 1 with k >= 2; got n = {n}, k = {k}")));
    }
    let full = full_mask(n);
    if (fam.short | fam.arcs | fam.b_sets) & !full != 0 {
        return Err(Error::domain(format!("membership has indices beyond {n}")));
    }
    if let Some([a, b, c]) = find_partition(n, &fam.masks(n, k)) {
        return Err(Error::hypothesis(format!("family contains the partition {a:?} ∪ {b:?} ∪ {c:?} of [{n}]")));
    }
    let has = |word: u64, i: i64| word >> (i - 1).rem_euclid(n as i64) & 1 == 1;
    let idx = |i: i64| (i - 1).rem_euclid(n as i64) as usize + 1;
    let list = |word: u64| (1..=n).filter(|&i| word >> (i - 1) & 1 == 1).collect::<Vec<_>>();

    let r = list(fam.short);
    let (r0, r1): (Vec<usize>, Vec<usize>) = r.iter().partition(|&&i| !has(fam.short, i as i64 - k as i64));
    let mut mapping = Vec::with_capacity(r.len());
    for &i in &r {
        let i = i as i64;
        let k = k as i64;
        let target = if has(fam.short, i - k) {
            // A_{k-1}(x_i), A_{k-1}(x_{i-k}) and B_{k+1}(x_{i+k-1}) partition [n].
            PhiTarget::BSet(idx(i + k - 1))
        } else if !has(fam.arcs, i - k) {
            PhiTarget::Arc(idx(i - k))
        } else {
            // A_{k-1}(x_i), A_k(x_{i-k}) and A_k(x_{i+k-1}) partition [n].
            PhiTarget::Arc(idx(i + k - 1))
        };
        let missing = match target {
            PhiTarget::Arc(j) => !has(fam.arcs, j as i64),
            PhiTarget::BSet(j) => !has(fam.b_sets, j as i64),
        };
        if !missing {
            return Err(Error::Internal(format!("φ({i}) = {target:?} is a member of the family")));
        }
        mapping.push((i as usize, target));
    }
    let injective = mapping.iter().map(|&(_, t)| t).collect::<BTreeSet<_>>().len() == mapping.len();
    Ok(PhiReport {
        n,
        k,
        r,
        r0,
        r1,
        s: list(!fam.arcs & full),
        t: list(!fam.b_sets & full),
        mapping,
        injective,
        trace: fam.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotationReport {
    pub r: usize,
    /// Members of the family among the laid-out arcs, for starts `1..=n`.
    pub counts: Vec<usize>,
    /// Sum over the composition of the family's level sizes.
    pub level_sum: usize,
    /// A start whose arcs include more than `r` members: pairwise disjoint
    /// members, so the matching number exceeds `r`.
    pub large_matching: Option<Vec<Arc>>,
}

impl RotationReport {
    /// Every rotation holds at most `r` members, hence `level_sum <= rn`.
    pub fn holds(&self) -> bool {
        self.large_matching.is_none() && self.level_sum <= self.r * self.counts.len()
    }
}

/// Lays arcs of lengths `k_1, ..., k_p` end to end from every start and
/// counts how many of them lie in `fam`.
pub fn rotating_partition_check(composition: &[usize], fam: &ArcFamily, r: usize) -> Result<RotationReport> {
    let g = fam.ground();
    let n = g.n();
    if composition.iter().sum::<usize>() != n {
        return Err(Error::domain(format!("composition {composition:?} does not sum to n = {n}")));
    }
    if !(composition.len() > r && r >= 1) {
        return Err(Error::domain(format!("needs p > r >= 1; got p = {}, r = {r}", composition.len())));
    }
    if let Some(&bad) = composition.iter().find(|&&k| k == 0 || k >= n) {
        return Err(Error::domain(format!("part {bad} is outside 1..={}", n - 1)));
    }
    let mut counts = Vec::with_capacity(n);
    let mut large = None;
    for start in 0..n {
        let mut head = start;
        let mut members = Vec::new();
        for &k in composition {
            let a = Arc::new(head + 1, k);
            if fam.contains(a) {
                members.push(a);
            }
            head = (head + k) % n;
        }
        if members.len() > r && large.is_none() {
            large = Some(members.clone());
        }
        counts.push(members.len());
    }
    let level_sum: usize = composition.iter().map(|&k| fam.level_size(k)).sum();
    if counts.iter().sum::<usize>() != level_sum {
        return Err(Error::Internal("rotation counts do not add up to the level sizes".into()));
    }
    Ok(RotationReport { r, counts, level_sum, large_matching: large })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionCase {
    /// `[⌈n/3⌉, ⌊n/2⌋]` has even length.
    A,
    /// `n` even, odd length.
    B,
    /// `n` odd, odd length.
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionTriples {
    pub n: usize,
    pub case: PartitionCase,
    pub parts: Vec<Vec<usize>>,
    /// In case (c), `((n-1)/2, (n-1)/2, 1)`, which repeats a part and is
    /// handled separately.
    pub special: Option<[usize; 3]>,
}

impl PartitionTriples {
    /// Each part has distinct elements in `[1, ⌊n/2⌋]` summing to `n`, parts
    /// are pairwise disjoint, and together with the special composition they
    /// cover the integers strictly between `n/3` and `n/2`.
    pub fn verify(&self) -> Result<()> {
        let n = self.n;
        let mut seen = BTreeSet::new();
        for p in &self.parts {
            if p.iter().sum::<usize>() != n {
                return Err(Error::Internal(format!("part {p:?} does not sum to {n}")));
            }
            for &x in p {
                if x == 0 || x > n / 2 {
                    return Err(Error::Internal(format!("part {p:?} leaves [1, {}]", n / 2)));
                }
                if !seen.insert(x) {
                    return Err(Error::Internal(format!("{x} appears twice among the parts")));
                }
            }
        }
        if let Some(s) = self.special {
            if s.iter().sum::<usize>() != n {
                return Err(Error::Internal(format!("special composition {s:?} does not sum to {n}")));
            }
            seen.insert(s[0]);
        }
        // Integers x with n/3 < x < n/2.
        if let Some(x) = (n / 3 + 1..).take_while(|&x| 2 * x < n).find(|x| !seen.contains(x)) {
            return Err(Error::Internal(format!("{x} lies strictly between n/3 and n/2 but is not covered")));
        }
        Ok(())
    }
}

/// Disjoint sets of part sizes summing to `n` that cover `(n/3, n/2)`.
pub fn partition_triples(n: usize) -> PartitionTriples {
    assert!(n >= 3, "partition_triples needs n >= 3");
    let lo = n.div_ceil(3);
    let hi = n / 2;
    let len = hi + 1 - lo;
    let mut parts = Vec::new();
    let mut special = None;
    let case = if len.is_multiple_of(2) {
        // Pairs (hi - 2i, hi - 2i - 1) with a small third part.
        let odd_extra = if n.is_multiple_of(2) { 1 } else { 2 };
        for i in 0..len / 2 {
            parts.push(vec![hi - 2 * i, hi - 2 * i - 1, 4 * i + odd_extra]);
        }
        PartitionCase::A
    } else if n.is_multiple_of(2) {
        let w = (len - 1) / 2;
        for i in 1..=w {
            parts.push(vec![n / 2 - 2 * i + 1, n / 2 - 2 * i, 4 * i - 1]);
        }
        PartitionCase::B
    } else {
        let w = len.div_ceil(2);
        let h = (n - 1) / 2;
        for i in 1..w {
            parts.push(vec![h - 2 * i + 1, h - 2 * i, 4 * i]);
        }
        special = Some([h, h, 1]);
        PartitionCase::C
    };
    PartitionTriples { n, case, parts, special }
}

/// Groups `k(r+1)` distinct `k`-arcs, sorted by head, into `k` classes
/// `{y_j, y_{j+k}, ...}` of `r + 1` pairwise disjoint arcs each.
pub fn matching_classes(n: usize, k: usize, r: usize, heads: &[usize]) -> Result<Vec<Vec<Arc>>> {
    let g = GroundSet::new(n)?;
    g.check_level(k)?;
    if !(r >= 1 && n >= k * (r + 1)) {
        return Err(Error::domain(format!("needs n >= k(r+1); got n = {n}, k = {k}, r = {r}")));
    }
    let mut y: Vec<usize> = heads.to_vec();
    y.sort_unstable();
    y.dedup();
    if y.len() != k * (r + 1) || y.iter().any(|&h| h == 0 || h > n) {
        return Err(Error::domain(format!("needs {} distinct heads in 1..={n}", k * (r + 1))));
    }
    let classes: Vec<Vec<Arc>> =
        (0..k).map(|j| (0..=r).map(|m| Arc::new(y[j + m * k], k)).collect()).collect();
    for class in &classes {
        let masks: Vec<u64> = class.iter().map(|a| arc_mask(n, a.head - 1, k)).collect();
        let disjoint = (0..masks.len()).all(|a| (a + 1..masks.len()).all(|b| masks[a] & masks[b] == 0));
        if !disjoint {
            return Err(Error::Internal(format!("class {class:?} has overlapping arcs")));
        }
    }
    Ok(classes)
}

/// One value of `q` in the case split for cross-union sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UnionCase {
    pub q: usize,
    pub bound: usize,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossUnionRange {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Least `t` with `tk >= n`.
    pub t: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub in_range: bool,
    /// `r(n - k)`.
    pub target: usize,
    /// For `q >= t` the bound is `q(n - k)`, otherwise `(t - 1)n`.
    pub cases: Vec<UnionCase>,
    /// `k <= 2n/(t+1)`, needed when `t >= 3`.
    pub large_t_condition: Option<bool>,
}

impl CrossUnionRange {
    pub fn holds(&self) -> bool {
        self.in_range && self.cases.iter().all(|c| c.within) && self.large_t_condition != Some(false)
    }
}

/// Boundary arithmetic for sums over `r` cross-union families of `k`-arcs.
pub fn cross_union_range(n: usize, k: usize, r: usize) -> Result<CrossUnionRange> {
    GroundSet::new(n)?.check_level(k)?;
    if r < 2 {
        return Err(Error::domain(format!("needs r >= 2, got {r}")));
    }
    let t = n.div_ceil(k);
    let k_min = n.div_ceil(r - 1);
    let k_max = (r - 1) * n / r;
    let target = r * (n - k);
    let cases = (1..=r)
        .map(|q| {
            let bound = if q >= t { q * (n - k) } else { (t - 1) * n };
            UnionCase { q, bound, within: bound <= target }
        })
        .collect();
    Ok(CrossUnionRange {
        n,
        k,
        r,
        t,
        k_min,
        k_max,
        in_range: k_min <= k && k <= k_max,
        target,
        cases,
        large_t_condition: (t >= 3).then_some(k * (t + 1) <= 2 * n),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelGapReport {
    pub n: usize,
    /// Subfamilies `D` of the middle level with `q < |D| < 2q`.
    pub families: u64,
    /// A family `D` and an arc of a forbidden level compatible with all of it.
    pub violation: Option<(ArcFamily, Arc)>,
}

/// For `n = 2q`: whenever a middle-level family `D` has `q + t` members with
/// `0 < t < q`, no arc of length at most `t` or at least `n - t` satisfies
/// the Gronau condition together with `D`.
pub fn gronau_level_gap(n: usize) -> Result<LevelGapReport> {
    let g = GroundSet::new(n)?;
    if n < 4 || n % 2 == 1 || n > HM_LIMIT {
        return Err(Error::domain(format!("needs even n in 4..={HM_LIMIT}, got {n}")));
    }
    let q = n / 2;
    let mut families = 0;
    for heads in 0..1u64 << n {
        let size = heads.count_ones() as usize;
        if size <= q || size >= 2 * q {
            continue;
        }
        families += 1;
        let t = size - q;
        let d = ArcFamily::from_level(g, q, heads)?;
        let base = SetFamily::from(&d);
        for len in (1..=t).chain(n - t..n) {
            for h in 0..n {
                let mut with = base.clone();
                with.insert_mask(arc_mask(n, h, len))?;
                if satisfies_gronau(&with) {
                    return Ok(LevelGapReport { n, families, violation: Some((d, Arc::new(h + 1, len))) });
                }
            }
        }
    }
    Ok(LevelGapReport { n, families, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::full_level;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn hilton_milner_examples() {
        let r = hilton_milner_circle_check(6, 3).unwrap();
        assert_eq!(r.max_non_star, Some(3));
        assert!(r.empty_triple.is_some());
        assert!(r.holds());
        let r = hilton_milner_circle_check(7, 3).unwrap();
        assert_eq!(r.non_star_families, 0);
        assert!(r.holds());
    }

    #[test]
    fn butterfly_split_examples() {
        let fam = full_level(g(5), 2).unwrap();
        let s = butterfly_decompose(&fam).unwrap();
        assert_eq!(s.minimal, fam);
        assert_eq!(s.maximal, fam);
        assert!(s.middle.is_empty());

        let fam = ArcFamily::from_arcs(g(5), [Arc::new(1, 1), Arc::new(1, 2), Arc::new(1, 3)]).unwrap();
        let s = butterfly_decompose(&fam).unwrap();
        assert_eq!(s.middle.arcs(), vec![Arc::new(1, 2)]);
        assert_eq!(
            s.links,
            vec![ButterflyLink { middle: Arc::new(1, 2), below: Arc::new(1, 1), above: Arc::new(1, 3) }]
        );
        assert!(s.holds());

        let bf = ArcFamily::from_arcs(g(5), [Arc::new(1, 1), Arc::new(2, 1), Arc::new(1, 2), Arc::new(5, 3)]).unwrap();
        assert!(matches!(butterfly_decompose(&bf), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_examples() {
        let r = injection_phi(5, 2, TraceMembership::default()).unwrap();
        assert!(r.mapping.is_empty() && r.holds());
        for i in 1..=8 {
            let [a, b, c] = b_partition(8, 3, i);
            assert_eq!(a & b | a & c | b & c, 0);
            assert_eq!(a | b | c, full_mask(8));
        }
        let bad = TraceMembership { short: 0b1, arcs: 0, b_sets: 0 };
        let with_partition = TraceMembership { b_sets: 1 << 3, short: bad.short | 1 << 2, ..bad };
        assert!(matches!(injection_phi(5, 2, with_partition), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn rotation_examples() {
        let empty = ArcFamily::empty(g(6));
        let r = rotating_partition_check(&[2, 2, 2], &empty, 1).unwrap();
        assert_eq!(r.counts, vec![0; 6]);
        let lvl = full_level(g(6), 2).unwrap();
        let r = rotating_partition_check(&[2, 2, 2], &lvl, 2).unwrap();
        assert_eq!(r.large_matching.as_ref().map(Vec::len), Some(3));
        assert!(!r.holds());
        assert!(rotating_partition_check(&[2, 2], &lvl, 1).is_err());
    }

    #[test]
    fn partition_triples_shapes() {
        let p = partition_triples(8);
        assert_eq!(p.case, PartitionCase::A);
        assert_eq!(p.parts, vec![vec![4, 3, 1]]);
        let p = partition_triples(7);
        assert_eq!(p.case, PartitionCase::C);
        assert_eq!(p.special, Some([3, 3, 1]));
        for n in 3..=300 {
            partition_triples(n).verify().unwrap_or_else(|e| panic!("n = {n}: {e}"));
        }
    }

    #[test]
    fn cross_union_arithmetic() {
        let c = cross_union_range(8, 5, 3).unwrap();
        assert_eq!(c.t, 2);
        assert!(c.holds());
        assert!(!cross_union_range(8, 3, 3).unwrap().in_range);
    }
}
