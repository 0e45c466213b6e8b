//! Exact branch and bound over slot assignments.
//!
//! Each candidate `(slot, set)` pair becomes one bit of a `u128`. Every
//! constraint is compiled into its minimal violating bit sets (hyperedges);
//! a configuration is feasible iff it contains none of them. Upper bounds
//! come from precomputed exact optima on small chunks of candidates, taken
//! over several partitions of the candidates and minimized per node.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{arc_mask, bits, full_level, full_mask, ArcFamily, Family, GroundSet, SetFamily};
use crate::constructions::binomial;
use crate::error::{Error, Result};
use crate::predicates::{Direction, PredicateId};

use super::problem::{Measure, Resolved, Score, SearchProblem};

/// Most candidates a single search may have.
pub const MAX_ELEMENTS: usize = 128;
const CHUNK: usize = 16;
const HYPEREDGE_LIMIT: usize = 2_000_000;
const EVALUATION_LIMIT: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Worker threads; 1 runs serially and makes `nodes_explored` reproducible.
    pub jobs: usize,
    /// Report every optimal configuration (up to symmetry) rather than one.
    pub enumerate_ties: bool,
    pub max_witnesses: usize,
    /// Distinct optimal orbits kept in memory before counting stops.
    pub max_tracked: usize,
    /// Use rotations and reflections for symmetry breaking and canonical forms.
    pub symmetry: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: None,
            max_seconds: None,
            jobs: 1,
            enumerate_ties: true,
            max_witnesses: 64,
            max_tracked: 1 << 20,
            symmetry: true,
        }
    }
}

impl SearchConfig {
    pub fn optimum_only() -> Self {
        SearchConfig {
            enumerate_ties: false,
            max_witnesses: 1,
            ..SearchConfig::default()
        }
    }
}

/// One configuration: a family per slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub slots: Vec<SetFamily>,
}

impl Witness {
    /// The slot's members as an arc family; fails if some member is no arc.
    pub fn arcs(&self, slot: usize) -> Result<ArcFamily> {
        let fam = &self.slots[slot];
        let g = fam.ground();
        let n = g.n();
        let mut out = ArcFamily::empty(g);
        for m in fam.masks() {
            let k = m.count_ones() as usize;
            let head = (0..n)
                .find(|&h| k > 0 && k < n && arc_mask(n, h, k) == m)
                .ok_or_else(|| Error::domain(format!("member {m:#b} is not an arc")))?;
            out.insert(g.arc(head as i64 + 1, k)?)?;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(SetFamily::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    /// `None` when no configuration satisfies the non-emptiness demands.
    pub optimum: Option<Score>,
    /// Optimal configurations up to rotation and reflection.
    pub extremal_count: usize,
    /// False when ties were not enumerated or the count hit `max_tracked`.
    pub extremal_count_complete: bool,
    /// Canonical optimal configurations, in increasing canonical order.
    pub witnesses: Vec<Witness>,
    pub nodes_explored: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

struct Elem {
    slot: usize,
    mask: u64,
    weight: i64,
}

struct Partition {
    chunk_of: Vec<u16>,
    local: Vec<u8>,
    caps: Vec<Vec<i64>>,
}

pub(crate) struct Compiled {
    n: usize,
    slots: usize,
    elems: Vec<Elem>,
    scale: i64,
    nonempty: Vec<u128>,
    start: u128,
    conflict: Vec<u128>,
    higher: Vec<Vec<u128>>,
    group: Vec<Vec<u8>>,
    orbit_min: u128,
    partitions: Vec<Partition>,
}

struct Masks<'a> {
    g: GroundSet,
    m: &'a [u64],
}

impl Family for Masks<'_> {
    fn ground(&self) -> GroundSet {
        self.g
    }
    fn member_masks(&self) -> Vec<u64> {
        self.m.to_vec()
    }
}

fn measure_of(measure: Measure, n: usize, mask: u64) -> Result<Ratio<i64>> {
    let size = mask.count_ones() as usize;
    let den = match measure {
        Measure::Count => return Ok(Ratio::one()),
        Measure::Lym => binomial(n, size),
        Measure::ShiftedLym => {
            if size == 0 {
                return Err(Error::domain("the shifted LYM measure is undefined for the empty set"));
            }
            binomial(n - 1, size - 1)
        }
    };
    let den = i64::try_from(den).map_err(|_| Error::Limit(format!("C({n}, {size}) overflows the weight type")))?;
    Ok(Ratio::new(1, den))
}

fn checked_lcm(a: i64, b: i64) -> Result<i64> {
    let l = (a as i128 / a.gcd(&b) as i128) * b as i128;
    i64::try_from(l).map_err(|_| Error::Limit("objective weights overflow 64 bits".into()))
}

/// Arc head if `mask` is a proper arc.
fn arc_head(n: usize, mask: u64) -> Option<usize> {
    let k = mask.count_ones() as usize;
    if k == 0 || k >= n {
        return None;
    }
    (0..n).find(|&h| arc_mask(n, h, k) == mask)
}

fn dihedral(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(2 * n);
    for r in 0..n {
        out.push((0..n).map(|i| (i + r) % n).collect());
        out.push((0..n).map(|i| (r + n - i) % n).collect());
    }
    out.sort();
    out.dedup();
    out
}

fn permute(mask: u64, p: &[usize]) -> u64 {
    bits(mask).fold(0, |a, i| a | 1 << p[i])
}

/// Checks that every predicate used is closed under removing members:
/// by its declared direction, and exhaustively on small configurations.
pub fn validate_anti_monotone(p: &PredicateId) -> Result<()> {
    static CHECKED: OnceLock<Mutex<HashSet<PredicateId>>> = OnceLock::new();
    let cache = CHECKED.get_or_init(|| Mutex::new(HashSet::new()));
    if cache.lock().expect("cache lock").contains(p) {
        return Ok(());
    }
    if p.direction() != Direction::Down {
        return Err(Error::NotAntiMonotone(p.to_string()));
    }
    let g = GroundSet::new(4)?;
    let fail = || Error::NotAntiMonotone(p.to_string());
    if p.is_cross() {
        let groups = match p {
            PredicateId::SWiseCrossIntersecting(s) => *s,
            _ => 3,
        };
        if groups <= 4 {
            let level: Vec<u64> = full_level(g, 2)?.member_masks();
            let pick = |code: usize, gi: usize| -> Vec<u64> {
                let sub = (code >> (4 * gi)) & 15;
                level.iter().enumerate().filter(|(j, _)| sub >> j & 1 == 1).map(|(_, &m)| m).collect()
            };
            for code in 0..1usize << (4 * groups) {
                let fams: Vec<Vec<u64>> = (0..groups).map(|gi| pick(code, gi)).collect();
                if !p.holds_cross(&fams, 4)? {
                    continue;
                }
                for gi in 0..groups {
                    for j in 0..fams[gi].len() {
                        let mut smaller = fams.clone();
                        smaller[gi].remove(j);
                        if !p.holds_cross(&smaller, 4)? {
                            return Err(fail());
                        }
                    }
                }
            }
        }
    } else {
        let arcs: Vec<u64> = (1..4).flat_map(|k| (0..4).map(move |h| arc_mask(4, h, k))).collect();
        for code in 0u32..1 << arcs.len() {
            let fam: Vec<u64> = bits(code as u64).map(|j| arcs[j]).collect();
            if !p.holds(&Masks { g, m: &fam })? {
                continue;
            }
            for j in 0..fam.len() {
                let mut smaller = fam.clone();
                smaller.remove(j);
                if !p.holds(&Masks { g, m: &smaller })? {
                    return Err(fail());
                }
            }
        }
    }
    cache.lock().expect("cache lock").insert(p.clone());
    Ok(())
}

fn family_edges(
    g: GroundSet,
    p: &PredicateId,
    idx: &[usize],
    elems: &[Elem],
    out: &mut HashSet<u128>,
) -> Result<()> {
    let arity = p.arity(g.n(), 0);
    let mut cur: Vec<usize> = Vec::new();
    let mut masks: Vec<u64> = Vec::new();
    let mut evals = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: GroundSet,
        p: &PredicateId,
        idx: &[usize],
        elems: &[Elem],
        from: usize,
        arity: usize,
        cur: &mut Vec<usize>,
        masks: &mut Vec<u64>,
        evals: &mut u64,
        out: &mut HashSet<u128>,
    ) -> Result<()> {
        for pos in from..idx.len() {
            let e = idx[pos];
            let m = elems[e].mask;
            if masks.contains(&m) {
                continue;
            }
            cur.push(e);
            masks.push(m);
            *evals += 1;
            if *evals > EVALUATION_LIMIT {
                return Err(Error::Limit(format!(
                    "compiling `{p}` into forbidden configurations needs more than {EVALUATION_LIMIT} checks"
                )));
            }
            if p.holds(&Masks { g, m: masks })? {
                if cur.len() < arity {
                    rec(g, p, idx, elems, pos + 1, arity, cur, masks, evals, out)?;
                }
            } else {
                // the prefix holds; minimal iff dropping any other member also holds
                let last = masks.len() - 1;
                let mut minimal = true;
                for drop in 0..last {
                    let rest: Vec<u64> = masks.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, &x)| x).collect();
                    *evals += 1;
                    if !p.holds(&Masks { g, m: &rest })? {
                        minimal = false;
                        break;
                    }
                }
                if minimal {
                    out.insert(cur.iter().fold(0u128, |a, &j| a | 1 << j));
                    if out.len() > HYPEREDGE_LIMIT {
                        return Err(Error::Limit(format!(
                            "more than {HYPEREDGE_LIMIT} forbidden configurations"
                        )));
                    }
                }
            }
            cur.pop();
            masks.pop();
        }
        Ok(())
    }
    rec(g, p, idx, elems, 0, arity, &mut cur, &mut masks, &mut evals, out)
}

fn cross_edges(
    n: usize,
    p: &PredicateId,
    groups: &[Vec<usize>],
    elems: &[Elem],
    out: &mut HashSet<u128>,
) -> Result<()> {
    let full = full_mask(n);
    let members: Vec<Vec<usize>> = groups
        .iter()
        .map(|grp| (0..elems.len()).filter(|&e| grp.contains(&elems[e].slot)).collect())
        .collect();
    let tuples: Vec<Vec<usize>> = match p {
        PredicateId::SWiseCrossIntersecting(s) => (0..groups.len()).combinations(*s).collect(),
        _ => vec![(0..groups.len()).collect()],
    };
    let union = matches!(p, PredicateId::CrossUnion);
    let mut found: HashSet<u128> = HashSet::new();
    for t in tuples {
        let lists: Vec<&Vec<usize>> = t.iter().map(|&gi| &members[gi]).collect();
        let total: f64 = lists.iter().map(|l| l.len() as f64).product();
        if total > 5e7 {
            return Err(Error::Limit(format!("{total} transversals for `{p}`")));
        }
        let mut stack: Vec<(usize, u64, u128)> = vec![(0, if union { 0 } else { full }, 0)];
        while let Some((depth, acc, set)) = stack.pop() {
            if depth == lists.len() {
                let bad = if union { acc == full } else { acc == 0 };
                if bad {
                    found.insert(set);
                }
                continue;
            }
            for &e in lists[depth] {
                let m = elems[e].mask;
                let next = if union { acc | m } else { acc & m };
                stack.push((depth + 1, next, set | 1 << e));
            }
        }
    }
    for &e in &found {
        let members: Vec<usize> = bits_u128(e).collect();
        let proper_violation = (1..(1u32 << members.len()) - 1).any(|sub| {
            let s = members.iter().enumerate().filter(|&(j, _)| sub >> j & 1 == 1).fold(0u128, |a, (_, &b)| a | 1 << b);
            found.contains(&s)
        });
        if !proper_violation {
            out.insert(e);
        }
    }
    if out.len() > HYPEREDGE_LIMIT {
        return Err(Error::Limit(format!("more than {HYPEREDGE_LIMIT} forbidden configurations")));
    }
    Ok(())
}

fn bits_u128(mut x: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i)
        }
    })
}

/// Packs consecutive groups of element indices into chunks of at most
/// `CHUNK` elements and tabulates the exact optimum of every sub-chunk.
fn build_partition(groups: Vec<Vec<usize>>, elems: &[Elem], edges: &[u128]) -> Partition {
    let mut chunks: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    for grp in groups {
        for piece in grp.chunks(CHUNK) {
            if cur.len() + piece.len() > CHUNK {
                chunks.push(std::mem::take(&mut cur));
            }
            cur.extend_from_slice(piece);
        }
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    let mut chunk_of = vec![0u16; elems.len()];
    let mut local = vec![0u8; elems.len()];
    let mut caps = Vec::with_capacity(chunks.len());
    for (ci, chunk) in chunks.iter().enumerate() {
        let mut cmask = 0u128;
        for (li, &e) in chunk.iter().enumerate() {
            chunk_of[e] = ci as u16;
            local[e] = li as u8;
            cmask |= 1 << e;
        }
        let c = chunk.len();
        let mut by_top: Vec<Vec<u32>> = vec![Vec::new(); c];
        for &e in edges {
            if e & !cmask == 0 {
                let l = bits_u128(e).fold(0u32, |a, b| a | 1 << local[b]);
                by_top[31 - l.leading_zeros() as usize].push(l);
            }
        }
        let size = 1usize << c;
        let mut indep = vec![false; size];
        let mut weight = vec![0i64; size];
        let mut cap = vec![0i64; size];
        indep[0] = true;
        for x in 1..size {
            let top = 31 - (x as u32).leading_zeros() as usize;
            let below = x ^ (1 << top);
            weight[x] = weight[below] + elems[chunk[top]].weight;
            indep[x] = indep[below] && by_top[top].iter().all(|&e| e & !(x as u32) != 0);
            cap[x] = if indep[x] {
                weight[x]
            } else {
                let mut best = 0;
                let mut rest = x;
                while rest != 0 {
                    let b = rest & rest.wrapping_neg();
                    best = best.max(cap[x ^ b]);
                    rest ^= b;
                }
                best
            };
        }
        caps.push(cap);
    }
    Partition { chunk_of, local, caps }
}

impl Partition {
    fn bound(&self, avail: u128, scratch: &mut [u32]) -> i64 {
        let used = &mut scratch[..self.caps.len()];
        used.iter_mut().for_each(|x| *x = 0);
        for e in bits_u128(avail) {
            used[self.chunk_of[e] as usize] |= 1 << self.local[e];
        }
        used.iter().zip(&self.caps).map(|(&u, cap)| cap[u as usize]).sum()
    }
}

pub(crate) fn compile(problem: &SearchProblem, symmetry: bool) -> Result<Compiled> {
    let constraints = problem.resolved()?;
    for c in &constraints {
        match c {
            Resolved::Family(p, _) | Resolved::Cross(p, _) => validate_anti_monotone(p)?,
            Resolved::Disjoint(_) => {}
        }
    }
    let g = problem.ground()?;
    let n = g.n();

    let mut raw: Vec<(usize, u64, Ratio<i64>)> = Vec::new();
    for (s, slot) in problem.slots.iter().enumerate() {
        let mut cands: Vec<(u64, Ratio<i64>)> = Vec::new();
        for m in slot.candidates(g)? {
            cands.push((m, problem.slot_weight(s) * measure_of(problem.measure, n, m)?));
        }
        // heavier candidates first; stable, so ties keep size-then-position order
        cands.sort_by_key(|c| std::cmp::Reverse(c.1));
        raw.extend(cands.into_iter().map(|(m, w)| (s, m, w)));
    }
    if raw.len() > MAX_ELEMENTS {
        return Err(Error::Limit(format!(
            "{} candidate sets exceed the engine limit of {MAX_ELEMENTS} (state space 2^{})",
            raw.len(),
            raw.len()
        )));
    }
    let mut scale = 1i64;
    for (_, _, w) in &raw {
        scale = checked_lcm(scale, *w.denom())?;
    }
    let elems: Vec<Elem> = raw
        .iter()
        .map(|&(slot, mask, w)| {
            let v = (w * Ratio::from_integer(scale)).to_integer();
            Elem { slot, mask, weight: v }
        })
        .collect();
    let index: HashMap<(usize, u64), usize> =
        elems.iter().enumerate().map(|(i, e)| ((e.slot, e.mask), i)).collect();

    let mut edges: HashSet<u128> = HashSet::new();
    for c in &constraints {
        match c {
            Resolved::Family(p, slots) => {
                let idx: Vec<usize> = (0..elems.len()).filter(|&e| slots.contains(&elems[e].slot)).collect();
                family_edges(g, p, &idx, &elems, &mut edges)?;
            }
            Resolved::Cross(p, groups) => cross_edges(n, p, groups, &elems, &mut edges)?,
            Resolved::Disjoint(slots) => {
                for (a, b) in slots.iter().tuple_combinations() {
                    if a == b {
                        continue;
                    }
                    for (i, e) in elems.iter().enumerate() {
                        if e.slot == *a {
                            if let Some(&j) = index.get(&(*b, e.mask)) {
                                edges.insert(1 << i | 1 << j);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut edges: Vec<u128> = edges.into_iter().collect();
    edges.sort_unstable();

    let all = if elems.len() == 128 { u128::MAX } else { (1u128 << elems.len()) - 1 };
    let mut start = all;
    let mut conflict = vec![0u128; elems.len()];
    let mut higher: Vec<Vec<u128>> = vec![Vec::new(); elems.len()];
    for &e in &edges {
        match e.count_ones() {
            1 => start &= !e,
            2 => {
                for i in bits_u128(e) {
                    conflict[i] |= e & !(1 << i);
                }
            }
            _ => {
                for i in bits_u128(e) {
                    higher[i].push(e);
                }
            }
        }
    }

    let nonempty: Vec<u128> = problem
        .nonempty
        .iter()
        .map(|&s| elems.iter().enumerate().filter(|(_, e)| e.slot == s).fold(0u128, |a, (i, _)| a | 1 << i))
        .collect();

    let mut group: Vec<Vec<u8>> = vec![(0..elems.len() as u8).collect()];
    if symmetry {
        group.clear();
        'perm: for p in dihedral(n) {
            let mut img = Vec::with_capacity(elems.len());
            for e in &elems {
                match index.get(&(e.slot, permute(e.mask, &p))) {
                    Some(&j) => img.push(j as u8),
                    None => continue 'perm,
                }
            }
            group.push(img);
        }
    }
    let orbit_min = (0..elems.len())
        .filter(|&i| group.iter().all(|p| p[i] as usize >= i))
        .fold(0u128, |a, i| a | 1 << i);

    let partitions = build_partitions(n, problem, &elems, &edges);

    Ok(Compiled {
        n,
        slots: problem.slots.len(),
        elems,
        scale,
        nonempty,
        start,
        conflict,
        higher,
        group,
        orbit_min,
        partitions,
    })
}

fn build_partitions(n: usize, problem: &SearchProblem, elems: &[Elem], edges: &[u128]) -> Vec<Partition> {
    let slots = problem.slots.len();
    let of_slot = |s: usize| -> Vec<usize> { (0..elems.len()).filter(|&i| elems[i].slot == s).collect() };
    let by_key = |list: &[usize], key: &dyn Fn(usize) -> usize, order: &[usize]| -> Vec<Vec<usize>> {
        order
            .iter()
            .map(|&k| list.iter().copied().filter(|&i| key(i) == k).collect::<Vec<_>>())
            .filter(|v| !v.is_empty())
            .collect()
    };
    let size = |i: usize| elems[i].mask.count_ones() as usize;
    let head = |i: usize| arc_head(n, elems[i].mask).unwrap_or(0);
    let tail = |i: usize| (head(i) + size(i) + n - 1) % n;
    let sizes: Vec<usize> = (0..=n).collect();
    let is_arc_slot = |s: usize| problem.slots[s].is_arcs();

    let level_groups = |s: usize| by_key(&of_slot(s), &size, &sizes);
    let mut parts: Vec<Vec<Vec<usize>>> = Vec::new();
    parts.push((0..slots).flat_map(level_groups).collect());

    let heads_per_block = |s: usize| {
        let levels = of_slot(s).iter().map(|&i| size(i)).collect::<BTreeSet<_>>().len().max(1);
        (CHUNK / levels).max(1)
    };
    let rotated = |offset: usize| -> Vec<usize> { (0..n).map(|h| (h + offset) % n).collect() };
    for variant in 0..3 {
        let mut groups = Vec::new();
        for s in 0..slots {
            if is_arc_slot(s) {
                let offset = if variant == 1 { (heads_per_block(s) / 2).max(1) } else { 0 };
                let key: &dyn Fn(usize) -> usize = if variant == 2 { &tail } else { &head };
                groups.extend(by_key(&of_slot(s), key, &rotated(offset)));
            } else {
                groups.extend(level_groups(s));
            }
        }
        parts.push(groups);
    }
    if slots > 1 && problem.arcs_only() {
        let every: Vec<usize> = (0..elems.len()).collect();
        for offset in [0, 1] {
            let by_head = by_key(&every, &head, &rotated(offset));
            parts.push(by_head);
        }
        let mut per_slot: Vec<Vec<usize>> = (0..slots).map(of_slot).collect();
        parts.push(per_slot.clone());
        per_slot.rotate_left(1);
        parts.push(per_slot);
    }
    parts.into_iter().map(|p| build_partition(p, elems, edges)).collect()
}

impl Compiled {
    fn include(&self, chosen: u128, avail: u128, i: usize) -> (u128, u128) {
        let chosen = chosen | 1 << i;
        let mut avail = avail & !self.conflict[i];
        for &e in &self.higher[i] {
            let rest = e & !chosen;
            if rest & !avail == 0 && rest.count_ones() == 1 {
                avail &= !rest;
            }
        }
        (chosen, avail)
    }

    fn canonical(&self, set: u128) -> u128 {
        self.group
            .iter()
            .map(|p| bits_u128(set).fold(0u128, |a, i| a | 1 << p[i]))
            .min()
            .unwrap_or(set)
    }

    fn root_bound(&self) -> i64 {
        let mut scratch = vec![0u32; MAX_ELEMENTS];
        self.partitions
            .iter()
            .map(|p| p.bound(self.start, &mut scratch))
            .min()
            .unwrap_or(0)
    }

    fn decode(&self, set: u128) -> Result<Witness> {
        let g = GroundSet::new(self.n)?;
        let mut slots = vec![SetFamily::empty(g); self.slots];
        for i in bits_u128(set) {
            slots[self.elems[i].slot].insert_mask(self.elems[i].mask)?;
        }
        Ok(Witness { slots })
    }

    fn score(&self, weight: i64) -> Score {
        Score(Ratio::new(weight, self.scale))
    }
}

struct Shared<'a> {
    c: &'a Compiled,
    cfg: &'a SearchConfig,
    best: AtomicI64,
    nodes: AtomicU64,
    abort: AtomicBool,
    started: Instant,
}

type Task = (u128, u128, i64);

struct Worker<'a, 'b> {
    sh: &'b Shared<'a>,
    local_nodes: u64,
    best: i64,
    found: BTreeSet<u128>,
    truncated: bool,
    split: Option<usize>,
    tasks: Vec<Task>,
    scratch: Vec<u32>,
}

impl<'a, 'b> Worker<'a, 'b> {
    fn new(sh: &'b Shared<'a>, split: Option<usize>) -> Self {
        Worker {
            sh,
            local_nodes: 0,
            best: i64::MIN,
            found: BTreeSet::new(),
            truncated: false,
            split,
            tasks: Vec::new(),
            scratch: vec![0u32; MAX_ELEMENTS],
        }
    }

    fn flush(&mut self) {
        let sh = self.sh;
        let total = sh.nodes.fetch_add(self.local_nodes, Ordering::Relaxed) + self.local_nodes;
        self.local_nodes = 0;
        let over_nodes = sh.cfg.max_nodes.is_some_and(|m| total > m);
        let over_time = sh
            .cfg
            .max_seconds
            .is_some_and(|s| sh.started.elapsed().as_secs_f64() > s);
        if over_nodes || over_time {
            sh.abort.store(true, Ordering::Relaxed);
        }
    }

    fn record(&mut self, chosen: u128, weight: i64) {
        if weight < self.best || (weight == self.best && !self.sh.cfg.enumerate_ties) {
            return;
        }
        if weight > self.best {
            self.best = weight;
            self.found.clear();
            self.sh.best.fetch_max(weight, Ordering::Relaxed);
        }
        if self.found.len() < self.sh.cfg.max_tracked {
            self.found.insert(self.sh.c.canonical(chosen));
        } else if !self.found.contains(&self.sh.c.canonical(chosen)) {
            self.truncated = true;
        }
    }

    fn pruned(&mut self, weight: i64, avail: u128) -> bool {
        let best = self.sh.best.load(Ordering::Relaxed);
        if best == i64::MIN {
            return false;
        }
        let ties = self.sh.cfg.enumerate_ties;
        for p in &self.sh.c.partitions {
            let b = weight + p.bound(avail, &mut self.scratch);
            if b < best || (!ties && b == best) {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, chosen: u128, avail: u128, weight: i64, depth: usize) {
        self.local_nodes += 1;
        if self.local_nodes >= 4096 {
            self.flush();
        }
        if self.sh.abort.load(Ordering::Relaxed) {
            return;
        }
        let c = self.sh.c;
        if c.nonempty.iter().any(|&m| chosen & m == 0 && avail & m == 0) {
            return;
        }
        if avail == 0 {
            self.record(chosen, weight);
            return;
        }
        if self.pruned(weight, avail) {
            return;
        }
        if self.split == Some(depth) {
            self.tasks.push((chosen, avail, weight));
            return;
        }
        let i = avail.trailing_zeros() as usize;
        let rest = avail & !(1u128 << i);
        if chosen != 0 || c.orbit_min >> i & 1 == 1 {
            let (ch, av) = c.include(chosen, rest, i);
            self.dfs(ch, av, weight + c.elems[i].weight, depth + 1);
        }
        self.dfs(chosen, rest, weight, depth + 1);
    }
}

/// Exact maximum of the problem's objective, with all optimal
/// configurations up to rotation and reflection when ties are enumerated.
pub fn maximize(problem: &SearchProblem, cfg: &SearchConfig) -> Result<SearchReport> {
    let started = Instant::now();
    let c = compile(problem, cfg.symmetry)?;
    let sh = Shared {
        c: &c,
        cfg,
        best: AtomicI64::new(i64::MIN),
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        started,
    };

    let mut workers: Vec<Worker> = Vec::new();
    if cfg.jobs <= 1 {
        let mut w = Worker::new(&sh, None);
        w.dfs(0, c.start, 0, 0);
        w.flush();
        workers.push(w);
    } else {
        let mut split = 4;
        let mut head = Worker::new(&sh, Some(split));
        head.dfs(0, c.start, 0, 0);
        while head.tasks.len() < 8 * cfg.jobs && split < 24 && !sh.abort.load(Ordering::Relaxed) {
            split += 2;
            let mut again = Worker::new(&sh, Some(split));
            again.best = head.best;
            again.found = std::mem::take(&mut head.found);
            again.dfs(0, c.start, 0, 0);
            head = again;
        }
        head.flush();
        let tasks = std::mem::take(&mut head.tasks);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
        let done: Vec<Worker> = pool.install(|| {
            tasks
                .par_iter()
                .map(|&(ch, av, w)| {
                    let mut wk = Worker::new(&sh, None);
                    wk.dfs(ch, av, w, 0);
                    wk.flush();
                    wk
                })
                .collect()
        });
        workers.push(head);
        workers.extend(done);
    }

    let nodes = sh.nodes.load(Ordering::Relaxed);
    let best = workers.iter().map(|w| w.best).max().unwrap_or(i64::MIN);
    if sh.abort.load(Ordering::Relaxed) {
        let upper = c.root_bound().max(if best == i64::MIN { 0 } else { best });
        return Err(Error::Budget {
            nodes,
            log2_states: c.elems.len(),
            best: (best != i64::MIN).then(|| c.score(best).to_string()),
            upper: c.score(upper).to_string(),
        });
    }
    let mut found: BTreeSet<u128> = BTreeSet::new();
    let mut truncated = false;
    for w in &workers {
        if w.best == best {
            found.extend(w.found.iter().copied());
            truncated |= w.truncated;
        }
    }
    let optimum = (best != i64::MIN).then(|| c.score(best));
    let mut witnesses = Vec::new();
    for &set in found.iter().take(cfg.max_witnesses) {
        let w = c.decode(set)?;
        if let Some(opt) = optimum {
            verify_witness(problem, &w, opt)?;
        }
        witnesses.push(w);
    }
    Ok(SearchReport {
        optimum,
        extremal_count: found.len(),
        extremal_count_complete: cfg.enumerate_ties && !truncated,
        witnesses,
        nodes_explored: nodes,
        elapsed: started.elapsed(),
    })
}

/// Objective value of a configuration, computed from scratch.
pub fn objective(problem: &SearchProblem, w: &Witness) -> Result<Score> {
    let mut total = Ratio::<i64>::zero();
    for (s, fam) in w.slots.iter().enumerate() {
        for m in fam.masks() {
            total += problem.slot_weight(s) * measure_of(problem.measure, problem.n, m)?;
        }
    }
    Ok(Score(total))
}

/// Whether a configuration meets every constraint of the problem, checked
/// with the predicate functions directly.
pub fn is_feasible(problem: &SearchProblem, w: &Witness) -> Result<bool> {
    if w.slots.len() != problem.slots.len() {
        return Err(Error::domain("configuration and problem have different slot counts"));
    }
    let g = problem.ground()?;
    let view = |slots: &[usize]| -> SetFamily {
        let mut fam = SetFamily::empty(g);
        for &s in slots {
            for m in w.slots[s].masks() {
                fam.insert_mask(m).expect("masks share the ground set");
            }
        }
        fam
    };
    for (s, fam) in w.slots.iter().enumerate() {
        let allowed = problem.slots[s].candidates(g)?;
        if fam.masks().any(|m| !allowed.contains(&m)) {
            return Ok(false);
        }
    }
    if problem.nonempty.iter().any(|&s| w.slots[s].is_empty()) {
        return Ok(false);
    }
    for c in problem.resolved()? {
        let ok = match c {
            Resolved::Family(p, slots) => p.holds(&view(&slots))?,
            Resolved::Cross(p, groups) => {
                let lists: Vec<Vec<u64>> = groups.iter().map(|grp| view(grp).member_masks()).collect();
                p.holds_cross(&lists, problem.n)?
            }
            Resolved::Disjoint(slots) => slots.iter().tuple_combinations().all(|(&a, &b)| {
                a == b || w.slots[a].masks().all(|m| !w.slots[b].contains_mask(m))
            }),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn verify_witness(problem: &SearchProblem, w: &Witness, optimum: Score) -> Result<()> {
    if !is_feasible(problem, w)? {
        return Err(Error::Internal(format!("reported configuration {w:?} violates the problem")));
    }
    let value = objective(problem, w)?;
    if value != optimum {
        return Err(Error::Internal(format!(
            "reported configuration has value {value}, expected {optimum}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::problem::{Constraint, Slot};

    #[test]
    fn catalogue_is_anti_monotone() {
        for p in PredicateId::catalogue() {
            validate_anti_monotone(&p).unwrap();
        }
    }

    #[test]
    fn dihedral_group_size() {
        assert_eq!(dihedral(6).len(), 12);
        assert_eq!(dihedral(2).len(), 2);
        assert_eq!(dihedral(1).len(), 1);
    }

    #[test]
    fn whole_level_without_constraints() {
        let p = SearchProblem::new(7, vec![Slot::arcs(3)]);
        let r = maximize(&p, &SearchConfig::default()).unwrap();
        assert_eq!(r.optimum, Some(Score::integer(7)));
        assert_eq!(r.extremal_count, 1);
    }

    #[test]
    fn infeasible_nonempty() {
        // two non-empty slots that must pick disjoint... from a one-set universe
        let p = SearchProblem::new(4, vec![Slot::Sets(vec![vec![1, 2]]), Slot::Sets(vec![vec![1, 2]])])
            .with_constraint(Constraint::Disjoint { slots: None })
            .all_nonempty();
        let r = maximize(&p, &SearchConfig::default()).unwrap();
        assert_eq!(r.optimum, None);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn budget_refusal() {
        let p = SearchProblem::single(8, Slot::Arcs(super::super::problem::Levels::all()), PredicateId::Antichain);
        let cfg = SearchConfig {
            max_nodes: Some(10),
            ..SearchConfig::default()
        };
        match maximize(&p, &cfg) {
            Err(Error::Budget { log2_states, .. }) => assert_eq!(log2_states, 56),
            other => panic!("expected a budget refusal, got {other:?}"),
        }
    }
}
