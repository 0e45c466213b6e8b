//! The labeled cycle `1..n`, circular arcs, and the two family types every
//! other module works with.
//!
//! Positions are 1-based at the API boundary and stored 0-based in bitmasks:
//! bit `i` of a mask stands for position `i + 1`. An [`ArcFamily`] stores one
//! `n`-bit word per arc length, where bit `h - 1` of word `k` means the arc of
//! length `k` with head `h` is present.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported circle; masks are `u64`.
pub const MAX_N: usize = 64;

/// Mask with the low `n` bits set.
#[inline]
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Rotates an `n`-bit word so that bit `i` moves to bit `(i + by) mod n`.
#[inline]
pub fn rotate_left(mask: u64, by: usize, n: usize) -> u64 {
    let by = by % n;
    if by == 0 {
        return mask;
    }
    ((mask << by) | (mask >> (n - by))) & full_mask(n)
}

/// Rotates an `n`-bit word so that bit `i` moves to bit `(i - by) mod n`.
#[inline]
pub fn rotate_right(mask: u64, by: usize, n: usize) -> u64 {
    rotate_left(mask, n - by % n, n)
}

/// Image of a point mask under the reflection `x -> n + 1 - x`.
#[inline]
pub fn reflect_points(mask: u64, n: usize) -> u64 {
    let mut out = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << (n - 1 - i);
        m &= m - 1;
    }
    out
}

/// Point mask of the arc with 0-based head `head0` and length `len`.
#[inline]
pub fn arc_mask(n: usize, head0: usize, len: usize) -> u64 {
    rotate_left(full_mask(len), head0, n)
}

/// Iterates the set bits of a mask as 0-based indices.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// The cyclically ordered ground set `{1, .., n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroundSet {
    n: usize,
}

impl TryFrom<usize> for GroundSet {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        GroundSet::new(n)
    }
}

impl From<GroundSet> for usize {
    fn from(g: GroundSet) -> usize {
        g.n
    }
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_N).contains(&n) {
            Ok(GroundSet { n })
        } else {
            Err(Error::GroundSize(n))
        }
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n
    }

    #[inline]
    pub fn full_mask(self) -> u64 {
        full_mask(self.n)
    }

    /// Maps any integer onto `1..=n` modulo `n`.
    pub fn wrap(self, x: i64) -> usize {
        (x - 1).rem_euclid(self.n as i64) as usize + 1
    }

    pub fn succ(self, x: usize) -> usize {
        self.wrap(x as i64 + 1)
    }

    pub fn pred(self, x: usize) -> usize {
        self.wrap(x as i64 - 1)
    }

    pub fn check_position(self, pos: usize) -> Result<()> {
        if (1..=self.n).contains(&pos) {
            Ok(())
        } else {
            Err(Error::InvalidPosition { n: self.n, pos })
        }
    }

    pub fn check_arc(self, arc: Arc) -> Result<()> {
        if (1..=self.n).contains(&arc.head) && arc.len >= 1 && arc.len < self.n {
            Ok(())
        } else {
            Err(Error::InvalidArc {
                n: self.n,
                head: arc.head,
                len: arc.len,
            })
        }
    }

    pub fn check_level(self, k: usize) -> Result<()> {
        if k >= 1 && k < self.n {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "arc length {k} is outside 1..={} for n = {}",
                self.n.saturating_sub(1),
                self.n
            )))
        }
    }

    /// A validated arc; `head` may be any integer and is wrapped.
    pub fn arc(self, head: i64, len: usize) -> Result<Arc> {
        let arc = Arc {
            head: self.wrap(head),
            len,
        };
        self.check_arc(arc)?;
        Ok(arc)
    }

    pub fn point_set(self, elems: &[usize]) -> Result<PointSet> {
        PointSet::from_elems(self, elems)
    }

    pub fn empty_point_set(self) -> PointSet {
        PointSet {
            ground: self,
            bits: 0,
        }
    }
}

/// A circular interval of `len` consecutive positions starting at `head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub head: usize,
    pub len: usize,
}

impl Arc {
    pub const fn new(head: usize, len: usize) -> Self {
        Arc { head, len }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({},{})", self.head, self.len)
    }
}

/// Point set `{head, head+1, .., head+len-1}` with wraparound.
pub fn arc_points(g: GroundSet, a: Arc) -> Result<PointSet> {
    g.check_arc(a)?;
    Ok(PointSet {
        ground: g,
        bits: arc_mask(g.n, a.head - 1, a.len),
    })
}

/// Head and tail (last element) of an arc.
pub fn arc_head_tail(g: GroundSet, a: Arc) -> Result<(usize, usize)> {
    g.check_arc(a)?;
    Ok((a.head, g.wrap((a.head + a.len - 1) as i64)))
}

/// The arc whose point set is the complement of `a`.
pub fn complement_arc(g: GroundSet, a: Arc) -> Result<Arc> {
    g.check_arc(a)?;
    Ok(Arc {
        head: g.wrap((a.head + a.len) as i64),
        len: g.n - a.len,
    })
}

/// A subset of the ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    ground: GroundSet,
    bits: u64,
}

impl PointSet {
    pub fn from_bits(ground: GroundSet, bits: u64) -> Result<Self> {
        if bits & !ground.full_mask() != 0 {
            return Err(Error::domain(format!(
                "mask {bits:#x} has positions above n = {}",
                ground.n
            )));
        }
        Ok(PointSet { ground, bits })
    }

    pub fn from_elems(ground: GroundSet, elems: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &x in elems {
            ground.check_position(x)?;
            bits |= 1 << (x - 1);
        }
        Ok(PointSet { ground, bits })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        (1..=self.ground.n).contains(&x) && self.bits & (1 << (x - 1)) != 0
    }

    /// Sorted 1-based elements.
    pub fn elems(&self) -> Vec<usize> {
        bits(self.bits).map(|i| i + 1).collect()
    }

    pub fn complement(&self) -> PointSet {
        PointSet {
            ground: self.ground,
            bits: !self.bits & self.ground.full_mask(),
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits & !other.bits == 0
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elems().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems().serialize(s)
    }
}

/// Anything that can be viewed as a list of distinct subsets of a ground set.
pub trait Family {
    fn ground(&self) -> GroundSet;
    /// Point masks of the members, without duplicates.
    fn member_masks(&self) -> Vec<u64>;
}

impl<T: Family + ?Sized> Family for &T {
    fn ground(&self) -> GroundSet {
        (**self).ground()
    }
    fn member_masks(&self) -> Vec<u64> {
        (**self).member_masks()
    }
}

/// A family of arcs, possibly spanning several lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcFamily {
    ground: GroundSet,
    // levels[k] holds head bits for arcs of length k; levels[0] is always 0.
    levels: Vec<u64>,
}

impl ArcFamily {
    pub fn empty(ground: GroundSet) -> Self {
        ArcFamily {
            ground,
            levels: vec![0; ground.n],
        }
    }

    pub fn from_arcs(ground: GroundSet, arcs: impl IntoIterator<Item = Arc>) -> Result<Self> {
        let mut fam = ArcFamily::empty(ground);
        for a in arcs {
            fam.insert(a)?;
        }
        Ok(fam)
    }

    /// Builds a single-level family from a head bitvector.
    pub fn from_level(ground: GroundSet, k: usize, heads: u64) -> Result<Self> {
        ground.check_level(k)?;
        if heads & !ground.full_mask() != 0 {
            return Err(Error::domain("head bitvector wider than n"));
        }
        let mut fam = ArcFamily::empty(ground);
        fam.levels[k] = heads;
        Ok(fam)
    }

    /// Builds a family from `(length, heads)` pairs where heads are 1-based.
    pub fn from_heads(ground: GroundSet, levels: &[(usize, &[usize])]) -> Result<Self> {
        let mut fam = ArcFamily::empty(ground);
        for &(k, heads) in levels {
            for &h in heads {
                fam.insert(Arc::new(h, k))?;
            }
        }
        Ok(fam)
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n
    }

    pub fn insert(&mut self, a: Arc) -> Result<bool> {
        self.ground.check_arc(a)?;
        let bit = 1u64 << (a.head - 1);
        let fresh = self.levels[a.len] & bit == 0;
        self.levels[a.len] |= bit;
        Ok(fresh)
    }

    pub fn remove(&mut self, a: Arc) -> bool {
        if self.ground.check_arc(a).is_err() {
            return false;
        }
        let bit = 1u64 << (a.head - 1);
        let had = self.levels[a.len] & bit != 0;
        self.levels[a.len] &= !bit;
        had
    }

    pub fn contains(&self, a: Arc) -> bool {
        self.ground.check_arc(a).is_ok() && self.levels[a.len] & (1 << (a.head - 1)) != 0
    }

    /// Head bitvector of level `k` (0 for absent or out-of-range levels).
    pub fn level(&self, k: usize) -> u64 {
        self.levels.get(k).copied().unwrap_or(0)
    }

    pub fn level_size(&self, k: usize) -> usize {
        self.level(k).count_ones() as usize
    }

    pub fn set_level(&mut self, k: usize, heads: u64) -> Result<()> {
        self.ground.check_level(k)?;
        if heads & !self.ground.full_mask() != 0 {
            return Err(Error::domain("head bitvector wider than n"));
        }
        self.levels[k] = heads;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.iter().all(|&w| w == 0)
    }

    /// Lengths with at least one arc, ascending.
    pub fn occupied_levels(&self) -> Vec<usize> {
        (1..self.ground.n).filter(|&k| self.levels[k] != 0).collect()
    }

    /// The unique occupied level, or an error if the family spans several.
    /// An empty family reports `None`.
    pub fn single_level(&self) -> Result<Option<usize>> {
        match self.occupied_levels().as_slice() {
            [] => Ok(None),
            [k] => Ok(Some(*k)),
            many => Err(Error::domain(format!(
                "expected a single-level arc family, found levels {many:?}"
            ))),
        }
    }

    /// Members ordered by (length, head).
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::with_capacity(self.len());
        for k in 1..self.ground.n {
            out.extend(bits(self.levels[k]).map(|h| Arc::new(h + 1, k)));
        }
        out
    }

    pub fn point_sets(&self) -> Vec<PointSet> {
        self.arcs()
            .into_iter()
            .map(|a| PointSet {
                ground: self.ground,
                bits: arc_mask(self.ground.n, a.head - 1, a.len),
            })
            .collect()
    }

    pub fn union(&self, other: &ArcFamily) -> Result<ArcFamily> {
        self.same_ground(other)?;
        Ok(ArcFamily {
            ground: self.ground,
            levels: self.levels.iter().zip(&other.levels).map(|(a, b)| a | b).collect(),
        })
    }

    pub fn intersection(&self, other: &ArcFamily) -> Result<ArcFamily> {
        self.same_ground(other)?;
        Ok(ArcFamily {
            ground: self.ground,
            levels: self.levels.iter().zip(&other.levels).map(|(a, b)| a & b).collect(),
        })
    }

    pub fn is_subfamily(&self, other: &ArcFamily) -> bool {
        self.ground == other.ground
            && self.levels.iter().zip(&other.levels).all(|(a, b)| a & !b == 0)
    }

    fn same_ground(&self, other: &ArcFamily) -> Result<()> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "ground sets differ: n = {} vs n = {}",
                self.ground.n, other.ground.n
            )))
        }
    }

    /// Image under the rotation `x -> x + by`.
    pub fn rotated(&self, by: usize) -> ArcFamily {
        let n = self.ground.n;
        ArcFamily {
            ground: self.ground,
            levels: self.levels.iter().map(|&w| rotate_left(w, by, n)).collect(),
        }
    }

    /// Image under the reflection `x -> n + 1 - x`.
    pub fn reflected(&self) -> ArcFamily {
        let n = self.ground.n;
        let mut out = ArcFamily::empty(self.ground);
        for k in 1..n {
            // arc (h0, k) -> head0 (n - k - h0) mod n
            for h0 in bits(self.levels[k]) {
                let img = (2 * n - k - h0) % n;
                out.levels[k] |= 1 << img;
            }
        }
        out
    }

    /// Raw per-level words, index = arc length.
    pub fn level_words(&self) -> &[u64] {
        &self.levels
    }
}

impl Family for ArcFamily {
    fn ground(&self) -> GroundSet {
        self.ground
    }
    fn member_masks(&self) -> Vec<u64> {
        let n = self.ground.n;
        let mut out = Vec::with_capacity(self.len());
        for k in 1..n {
            out.extend(bits(self.levels[k]).map(|h0| arc_mask(n, h0, k)));
        }
        out
    }
}

impl fmt::Display for ArcFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.arcs().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct ArcFamilyWire {
    n: usize,
    levels: BTreeMap<usize, Vec<usize>>,
}

impl Serialize for ArcFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut levels = BTreeMap::new();
        for k in 1..self.ground.n {
            if self.levels[k] != 0 {
                levels.insert(k, bits(self.levels[k]).map(|h| h + 1).collect());
            }
        }
        ArcFamilyWire {
            n: self.ground.n,
            levels,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = ArcFamilyWire::deserialize(d)?;
        let g = GroundSet::new(wire.n).map_err(D::Error::custom)?;
        let mut fam = ArcFamily::empty(g);
        for (k, heads) in wire.levels {
            for h in heads {
                fam.insert(Arc::new(h, k)).map_err(D::Error::custom)?;
            }
        }
        Ok(fam)
    }
}

/// All `n` arcs of length `k`.
pub fn full_level(g: GroundSet, k: usize) -> Result<ArcFamily> {
    ArcFamily::from_level(g, k, g.full_mask())
}

/// All arcs of every length `1..n-1`.
pub fn all_arcs(g: GroundSet) -> ArcFamily {
    let mut fam = ArcFamily::empty(g);
    for k in 1..g.n {
        fam.levels[k] = g.full_mask();
    }
    fam
}

/// Replaces every arc by the arc on the complementary positions.
pub fn complement_family(fam: &ArcFamily) -> ArcFamily {
    let n = fam.n();
    let mut out = ArcFamily::empty(fam.ground);
    for k in 1..n {
        // (h, k) -> (h + k, n - k)
        out.levels[n - k] = rotate_left(fam.levels[k], k, n);
    }
    out
}

/// Lexicographically least image of `fam` under rotations, and reflections
/// when `include_reflection` is set. Levels are compared from length 1 up as
/// unsigned head words.
pub fn symmetry_orbit(fam: &ArcFamily, include_reflection: bool) -> ArcFamily {
    let n = fam.n();
    let mut best = fam.clone();
    let mut consider = |cand: ArcFamily| {
        if cand.levels < best.levels {
            best = cand;
        }
    };
    for r in 1..n {
        consider(fam.rotated(r));
    }
    if include_reflection {
        let refl = fam.reflected();
        for r in 0..n {
            consider(refl.rotated(r));
        }
    }
    best
}

/// A family of distinct subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFamily {
    ground: GroundSet,
    members: BTreeSet<u64>,
}

impl SetFamily {
    pub fn empty(ground: GroundSet) -> Self {
        SetFamily {
            ground,
            members: BTreeSet::new(),
        }
    }

    pub fn from_masks(ground: GroundSet, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut fam = SetFamily::empty(ground);
        for m in masks {
            fam.insert_mask(m)?;
        }
        Ok(fam)
    }

    pub fn from_sets(ground: GroundSet, sets: &[&[usize]]) -> Result<Self> {
        let mut fam = SetFamily::empty(ground);
        for s in sets {
            fam.insert(PointSet::from_elems(ground, s)?);
        }
        Ok(fam)
    }

    /// Every `k`-subset of `[n]`.
    pub fn full_level(ground: GroundSet, k: usize) -> Result<Self> {
        if k > ground.n {
            return Err(Error::domain(format!("level {k} exceeds n = {}", ground.n)));
        }
        Ok(SetFamily {
            ground,
            members: k_subsets(ground.n, k).collect(),
        })
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n
    }

    pub fn insert(&mut self, p: PointSet) -> bool {
        debug_assert_eq!(p.ground, self.ground);
        self.members.insert(p.bits)
    }

    pub fn insert_mask(&mut self, m: u64) -> Result<bool> {
        if m & !self.ground.full_mask() != 0 {
            return Err(Error::domain(format!(
                "mask {m:#x} has positions above n = {}",
                self.ground.n
            )));
        }
        Ok(self.members.insert(m))
    }

    pub fn remove_mask(&mut self, m: u64) -> bool {
        self.members.remove(&m)
    }

    pub fn contains_mask(&self, m: u64) -> bool {
        self.members.contains(&m)
    }

    pub fn contains(&self, p: &PointSet) -> bool {
        self.members.contains(&p.bits)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().copied()
    }

    pub fn members(&self) -> Vec<PointSet> {
        self.members
            .iter()
            .map(|&bits| PointSet {
                ground: self.ground,
                bits,
            })
            .collect()
    }

    /// `f[l]` = number of members of size `l`, for `l` in `0..=n`.
    pub fn level_profile(&self) -> Vec<usize> {
        let mut f = vec![0; self.ground.n + 1];
        for m in &self.members {
            f[m.count_ones() as usize] += 1;
        }
        f
    }

    /// Members of size `l`.
    pub fn level(&self, l: usize) -> SetFamily {
        SetFamily {
            ground: self.ground,
            members: self
                .members
                .iter()
                .copied()
                .filter(|m| m.count_ones() as usize == l)
                .collect(),
        }
    }

    /// The common size of all members, `None` for an empty family, or an
    /// error when sizes differ.
    pub fn uniform_size(&self) -> Result<Option<usize>> {
        let mut sizes = self.members.iter().map(|m| m.count_ones() as usize);
        let Some(first) = sizes.next() else {
            return Ok(None);
        };
        if sizes.all(|s| s == first) {
            Ok(Some(first))
        } else {
            Err(Error::domain("family is not uniform"))
        }
    }

    pub fn complements(&self) -> SetFamily {
        let full = self.ground.full_mask();
        SetFamily {
            ground: self.ground,
            members: self.members.iter().map(|m| !m & full).collect(),
        }
    }

    pub fn union(&self, other: &SetFamily) -> SetFamily {
        SetFamily {
            ground: self.ground,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    /// Relabels every member through `perm`, where `perm[i]` is the 0-based
    /// image of 0-based position `i`.
    pub fn relabeled(&self, perm: &[usize]) -> SetFamily {
        SetFamily {
            ground: self.ground,
            members: self.members.iter().map(|&m| permute_mask(m, perm)).collect(),
        }
    }
}

impl Family for SetFamily {
    fn ground(&self) -> GroundSet {
        self.ground
    }
    fn member_masks(&self) -> Vec<u64> {
        self.members.iter().copied().collect()
    }
}

impl From<&ArcFamily> for SetFamily {
    fn from(fam: &ArcFamily) -> Self {
        SetFamily {
            ground: fam.ground,
            members: fam.member_masks().into_iter().collect(),
        }
    }
}

/// Sorts masks by (size, sorted element list).
pub(crate) fn sorted_member_lists(masks: impl IntoIterator<Item = u64>) -> Vec<Vec<usize>> {
    let mut lists: Vec<Vec<usize>> = masks
        .into_iter()
        .map(|m| bits(m).map(|i| i + 1).collect())
        .collect();
    lists.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    lists
}

#[derive(Serialize, Deserialize)]
struct SetFamilyWire {
    n: usize,
    members: Vec<Vec<usize>>,
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetFamilyWire {
            n: self.ground.n,
            members: sorted_member_lists(self.members.iter().copied()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SetFamilyWire::deserialize(d)?;
        let g = GroundSet::new(wire.n).map_err(D::Error::custom)?;
        let mut fam = SetFamily::empty(g);
        for m in wire.members {
            let p = PointSet::from_elems(g, &m).map_err(D::Error::custom)?;
            if !fam.insert(p) {
                return Err(D::Error::custom(format!("duplicate member {p}")));
            }
        }
        Ok(fam)
    }
}

pub(crate) fn permute_mask(mask: u64, perm: &[usize]) -> u64 {
    bits(mask).fold(0, |acc, i| acc | 1 << perm[i])
}

/// All `k`-subsets of `[n]` as masks, in increasing numeric order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    // Gosper's hack
    let limit: u128 = 1u128 << n;
    let mut cur: u128 = if k > n {
        limit
    } else if k == 0 {
        0
    } else {
        (1u128 << k) - 1
    };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur as u64;
        if cur == 0 {
            done = true;
            return Some(out);
        }
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        cur = (((r ^ cur) >> 2) / c) | r;
        if cur >= limit {
            done = true;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn arc_points_examples() {
        assert_eq!(arc_points(g(7), Arc::new(4, 3)).unwrap().elems(), vec![4, 5, 6]);
        assert_eq!(arc_points(g(6), Arc::new(5, 4)).unwrap().elems(), vec![1, 2, 5, 6]);
        assert_eq!(arc_points(g(5), Arc::new(3, 1)).unwrap().elems(), vec![3]);
    }

    #[test]
    fn arc_validation() {
        assert!(arc_points(g(5), Arc::new(1, 5)).is_err());
        assert!(arc_points(g(5), Arc::new(1, 0)).is_err());
        assert!(arc_points(g(5), Arc::new(6, 2)).is_err());
        assert!(arc_points(g(5), Arc::new(0, 2)).is_err());
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
    }

    #[test]
    fn head_tail() {
        assert_eq!(arc_head_tail(g(7), Arc::new(4, 3)).unwrap(), (4, 6));
        assert_eq!(arc_head_tail(g(6), Arc::new(5, 4)).unwrap(), (5, 2));
        assert_eq!(arc_head_tail(g(9), Arc::new(1, 1)).unwrap(), (1, 1));
    }

    #[test]
    fn tail_matches_last_point() {
        for n in 2..=9 {
            for k in 1..n {
                for h in 1..=n {
                    let a = Arc::new(h, k);
                    let (_, t) = arc_head_tail(g(n), a).unwrap();
                    let pts = arc_points(g(n), a).unwrap();
                    assert!(pts.contains(t));
                    assert!(!pts.contains(g(n).succ(t)) || k == n);
                }
            }
        }
    }

    #[test]
    fn modular_positions() {
        let gs = g(7);
        assert_eq!(gs.succ(7), 1);
        assert_eq!(gs.pred(1), 7);
        assert_eq!(gs.wrap(-1), 6);
        assert_eq!(gs.wrap(15), 1);
    }

    #[test]
    fn full_level_examples() {
        assert_eq!(full_level(g(7), 3).unwrap().len(), 7);
        let f = full_level(g(2), 1).unwrap();
        assert_eq!(f.arcs(), vec![Arc::new(1, 1), Arc::new(2, 1)]);
        let f5 = full_level(g(5), 4).unwrap();
        assert_eq!(f5.len(), 5);
        assert!(complement_family(&f5).arcs().iter().all(|a| a.len == 1));
        assert!(full_level(g(5), 5).is_err());
        assert!(full_level(g(5), 0).is_err());
    }

    #[test]
    fn complement_examples() {
        let fam = ArcFamily::from_arcs(g(7), [Arc::new(1, 3)]).unwrap();
        assert_eq!(complement_family(&fam).arcs(), vec![Arc::new(4, 4)]);
        assert_eq!(
            complement_family(&full_level(g(6), 2).unwrap()),
            full_level(g(6), 4).unwrap()
        );
    }

    #[test]
    fn complement_arc_is_set_complement() {
        for n in 2..=9 {
            for k in 1..n {
                for h in 1..=n {
                    let a = Arc::new(h, k);
                    let c = complement_arc(g(n), a).unwrap();
                    assert_eq!(
                        arc_points(g(n), c).unwrap(),
                        arc_points(g(n), a).unwrap().complement()
                    );
                }
            }
        }
    }

    #[test]
    fn canonical_rotation_to_least_head() {
        let fam = ArcFamily::from_arcs(g(5), [Arc::new(2, 2)]).unwrap();
        assert_eq!(symmetry_orbit(&fam, false).arcs(), vec![Arc::new(1, 2)]);
    }

    #[test]
    fn reflection_maps_points() {
        let gs = g(8);
        for k in 1..8 {
            for h in 1..=8 {
                let a = Arc::new(h, k);
                let fam = ArcFamily::from_arcs(gs, [a]).unwrap();
                let refl = fam.reflected();
                let want = reflect_points(arc_points(gs, a).unwrap().bits(), 8);
                assert_eq!(refl.member_masks(), vec![want]);
            }
        }
    }

    #[test]
    fn json_wire_forms() {
        let fam = ArcFamily::from_heads(g(7), &[(3, &[2, 1]), (1, &[7])]).unwrap();
        let s = serde_json::to_string(&fam).unwrap();
        assert_eq!(s, r#"{"n":7,"levels":{"1":[7],"3":[1,2]}}"#);
        let back: ArcFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, fam);
        let bad: std::result::Result<ArcFamily, _> =
            serde_json::from_str(r#"{"n":4,"levels":{"4":[1]}}"#);
        assert!(bad.is_err());

        let sf = SetFamily::from_sets(g(4), &[&[3, 1], &[2]]).unwrap();
        assert_eq!(serde_json::to_string(&sf).unwrap(), r#"{"n":4,"members":[[2],[1,3]]}"#);
        let p = g(6).point_set(&[5, 1]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1,5]");
    }

    #[test]
    fn k_subsets_counts() {
        assert_eq!(k_subsets(5, 2).count(), 10);
        assert_eq!(k_subsets(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(k_subsets(5, 5).collect::<Vec<_>>(), vec![31]);
        assert_eq!(k_subsets(3, 4).count(), 0);
        assert_eq!(k_subsets(64, 1).count(), 64);
        assert!(k_subsets(6, 3).all(|m| m.count_ones() == 3));
    }

    #[test]
    fn set_family_profile() {
        let sf = SetFamily::from_sets(g(4), &[&[1], &[2, 3], &[1, 4], &[1, 2, 3, 4]]).unwrap();
        assert_eq!(sf.level_profile(), vec![0, 1, 2, 0, 1]);
        assert_eq!(sf.level_profile().iter().sum::<usize>(), sf.len());
        assert!(sf.uniform_size().is_err());
        assert_eq!(SetFamily::full_level(g(4), 2).unwrap().uniform_size().unwrap(), Some(2));
    }
}
