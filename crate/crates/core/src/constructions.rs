//! Named extremal families. Each constructor checks its parameter range and
//! asserts the closed-form size of what it built.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circle::{arc_mask, full_mask, k_subsets, Arc, ArcFamily, GroundSet, PointSet, SetFamily};
use crate::error::{Error, Result};

/// `C(n, k)` as `u128`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(msg()))
    }
}

/// The `k` arcs of length `k` through position `x`.
pub fn star_arcs(n: usize, k: usize, x: usize) -> Result<ArcFamily> {
    let g = GroundSet::new(n)?;
    need(n >= 2, || format!("star_arcs needs n >= 2, got {n}"))?;
    g.check_level(k)?;
    g.check_position(x)?;
    let fam = ArcFamily::from_arcs(
        g,
        (0..k).map(|j| Arc::new(g.wrap(x as i64 - j as i64), k)),
    )?;
    assert_eq!(fam.len(), k);
    Ok(fam)
}

/// Arcs of length `k` containing at least two of `x_1, x_p, x_q`.
pub fn m_pq(n: usize, k: usize, p: usize, q: usize) -> Result<ArcFamily> {
    let g = GroundSet::new(n)?;
    need(k >= 2 && 2 * k <= n && n <= 3 * (k - 1), || {
        format!("m_pq needs 2k <= n <= 3(k-1); got n = {n}, k = {k}")
    })?;
    need(1 < p && p < q && q <= n, || format!("m_pq needs 1 < p < q <= n; got p = {p}, q = {q}"))?;
    need(p <= k && q < p + k && q + k > n + 1, || {
        format!("m_pq needs p <= k, q <= p+k-1 and q+k-1 > n; got n = {n}, k = {k}, p = {p}, q = {q}")
    })?;
    let marks = (1u64 << 0) | (1u64 << (p - 1)) | (1u64 << (q - 1));
    let mut fam = ArcFamily::empty(g);
    for h0 in 0..n {
        if (arc_mask(n, h0, k) & marks).count_ones() >= 2 {
            fam.insert(Arc::new(h0 + 1, k))?;
        }
    }
    assert_eq!(fam.len(), 3 * k - n);
    Ok(fam)
}

/// The default `(p, q) = (k, 2k - 1)`.
pub fn m_pq_default(n: usize, k: usize) -> Result<ArcFamily> {
    m_pq(n, k, k, 2 * k - 1)
}

/// Union of the full levels in `levels`, which must be strictly increasing.
pub fn erdos_levels(n: usize, levels: &[usize]) -> Result<SetFamily> {
    let g = GroundSet::new(n)?;
    need(!levels.is_empty(), || "erdos_levels needs at least one level".into())?;
    need(levels.windows(2).all(|w| w[0] < w[1]), || {
        format!("levels {levels:?} must be strictly increasing")
    })?;
    need(levels.iter().all(|&k| k <= n), || format!("levels {levels:?} exceed n = {n}"))?;
    let fam = SetFamily::from_masks(g, levels.iter().flat_map(|&k| k_subsets(n, k)))?;
    assert_eq!(fam.len() as u128, levels.iter().map(|&k| binomial(n, k)).sum::<u128>());
    Ok(fam)
}

/// `{H : |H| = k, 1 ∈ H, H ∩ [2, k+1] ≠ ∅} ∪ {[2, k+1]}`.
pub fn hilton_milner(n: usize, k: usize) -> Result<SetFamily> {
    let g = GroundSet::new(n)?;
    need(k >= 2 && n >= 2 * k, || format!("hilton_milner needs n >= 2k >= 4; got n = {n}, k = {k}"))?;
    let block = full_mask(k) << 1;
    let mut fam = SetFamily::from_masks(g, k_subsets(n, k).filter(|&m| m & 1 != 0 && m & block != 0))?;
    fam.insert_mask(block)?;
    let want = binomial(n - 1, k - 1) - binomial(n - k - 1, k - 1) + 1;
    assert_eq!(fam.len() as u128, want);
    Ok(fam)
}

/// Circular distance from `j` forward to `i`.
fn forward_distance(n: usize, j: usize, i: usize) -> usize {
    (i + n - j) % n
}

/// All arcs of every length containing `x_i` and avoiding `x_j`.
pub fn d_ij(n: usize, i: usize, j: usize) -> Result<ArcFamily> {
    let g = GroundSet::new(n)?;
    g.check_position(i)?;
    g.check_position(j)?;
    need(i != j, || format!("d_ij needs i != j; got i = j = {i}"))?;
    let (bi, bj) = (1u64 << (i - 1), 1u64 << (j - 1));
    let mut fam = ArcFamily::empty(g);
    for k in 1..n {
        for h0 in 0..n {
            let a = arc_mask(n, h0, k);
            if a & bi != 0 && a & bj == 0 {
                fam.insert(Arc::new(h0 + 1, k))?;
            }
        }
    }
    let d = forward_distance(n, j, i);
    assert_eq!(fam.len(), d * (n - d));
    Ok(fam)
}

/// True when every two points of `t` are at least `k` apart around the circle.
pub fn spaced(n: usize, t: &PointSet, k: usize) -> bool {
    let e = t.elems();
    e.len() < 2 || (0..e.len()).all(|a| forward_distance(n, e[a], e[(a + 1) % e.len()]) >= k)
}

/// All `k`-arcs meeting `t`.
pub fn b_k_of_t(n: usize, k: usize, t: &PointSet) -> Result<ArcFamily> {
    let g = GroundSet::new(n)?;
    g.check_level(k)?;
    need(t.ground() == g, || "T lives on a different ground set".into())?;
    need(!t.is_empty(), || "b_k_of_T needs a non-empty T".into())?;
    let mut fam = ArcFamily::empty(g);
    for h0 in 0..n {
        if arc_mask(n, h0, k) & t.bits() != 0 {
            fam.insert(Arc::new(h0 + 1, k))?;
        }
    }
    if spaced(n, t, k) {
        assert_eq!(fam.len(), t.len() * k);
    }
    Ok(fam)
}

/// Arcs of every length meeting `{⌊n/2⌋, n}`.
pub fn b_t2(n: usize) -> Result<ArcFamily> {
    let g = GroundSet::new(n)?;
    need(n >= 3, || format!("b_T2 needs n >= 3, got {n}"))?;
    let t = (1u64 << (n / 2 - 1)) | (1u64 << (n - 1));
    let mut fam = ArcFamily::empty(g);
    for k in 1..n {
        for h0 in 0..n {
            if arc_mask(n, h0, k) & t != 0 {
                fam.insert(Arc::new(h0 + 1, k))?;
            }
        }
        let want = if 2 * k >= n { n } else { 2 * k };
        assert_eq!(fam.level_size(k), want, "level {k} of B(T_2) at n = {n}");
    }
    assert_eq!(fam.len(), b_t2_size(n));
    Ok(fam)
}

/// `2q^2 + q(q-1)` for `n = 2q`, `(2q+1)q + q(q+1)` for `n = 2q+1`.
pub fn b_t2_size(n: usize) -> usize {
    let q = n / 2;
    if n.is_multiple_of(2) {
        2 * q * q + q * (q - 1)
    } else {
        (2 * q + 1) * q + q * (q + 1)
    }
}

/// All subsets of size at least `k`, where `n = k(s+1) - 1`.
pub fn kleitman_d(n: usize, s: usize) -> Result<SetFamily> {
    let g = GroundSet::new(n)?;
    need(s >= 1 && (n + 1).is_multiple_of(s + 1), || {
        format!("kleitman_D needs n = k(s+1) - 1; got n = {n}, s = {s}")
    })?;
    let k = (n + 1) / (s + 1);
    let fam = SetFamily::from_masks(g, (k..=n).flat_map(|i| k_subsets(n, i)))?;
    assert_eq!(fam.len() as u128, (k..=n).map(|i| binomial(n, i)).sum::<u128>());
    Ok(fam)
}

/// `k`-sets meeting `[r]`, for `n >= k(r+1)`.
pub fn l_family(n: usize, k: usize, r: usize) -> Result<SetFamily> {
    let g = GroundSet::new(n)?;
    need(k >= 1 && r >= 1 && n >= k * (r + 1), || {
        format!("L needs n >= k(r+1) with k, r >= 1; got n = {n}, k = {k}, r = {r}")
    })?;
    let low = full_mask(r);
    let fam = SetFamily::from_masks(g, k_subsets(n, k).filter(|&m| m & low != 0))?;
    assert_eq!(fam.len() as u128, binomial(n, k) - binomial(n - r, k));
    Ok(fam)
}

/// All `k`-subsets of `[k(r+1) - 1]`.
pub fn complete_k(k: usize, r: usize) -> Result<SetFamily> {
    need(k >= 1 && r >= 1, || format!("complete_K needs k, r >= 1; got k = {k}, r = {r}"))?;
    let n = k * (r + 1) - 1;
    let fam = SetFamily::full_level(GroundSet::new(n)?, k)?;
    assert_eq!(fam.len() as u128, binomial(n, k));
    Ok(fam)
}

/// Point mask of `B_{k+1}(x_i) = A_k(x_i) ∪ {x_{i-k}}`.
pub fn b_set_mask(n: usize, k: usize, i: usize) -> u64 {
    let i0 = i - 1;
    arc_mask(n, i0, k) | 1 << ((i0 + n - k % n) % n)
}

/// The `n` sets `B_{k+1}(x_i)` for `n = 3k - 1`.
pub fn b_family(n: usize, k: usize) -> Result<SetFamily> {
    let g = GroundSet::new(n)?;
    need(k >= 2 && n == 3 * k - 1, || format!("b_family needs n = 3k - 1, k >= 2; got n = {n}, k = {k}"))?;
    let fam = SetFamily::from_masks(g, (1..=n).map(|i| b_set_mask(n, k, i)))?;
    assert_eq!(fam.len(), n);
    assert!(fam.masks().all(|m| m.count_ones() as usize == k + 1));
    Ok(fam)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionId {
    StarArcs { n: usize, k: usize, x: usize },
    MPq { n: usize, k: usize, p: usize, q: usize },
    ErdosLevels { n: usize, levels: Vec<usize> },
    HiltonMilner { n: usize, k: usize },
    DIj { n: usize, i: usize, j: usize },
    BkOfT { n: usize, k: usize, t: Vec<usize> },
    BT2 { n: usize },
    KleitmanD { n: usize, s: usize },
    L { n: usize, k: usize, r: usize },
    CompleteK { k: usize, r: usize },
    BFamily { n: usize, k: usize },
}

/// A built construction: arcs on the identity circle or arbitrary sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Construction {
    Arcs(ArcFamily),
    Sets(SetFamily),
}

impl Construction {
    pub fn len(&self) -> usize {
        match self {
            Construction::Arcs(f) => f.len(),
            Construction::Sets(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_sets(&self) -> SetFamily {
        match self {
            Construction::Arcs(f) => SetFamily::from(f),
            Construction::Sets(f) => f.clone(),
        }
    }
}

impl ConstructionId {
    pub fn build(&self) -> Result<Construction> {
        use ConstructionId::*;
        Ok(match self {
            StarArcs { n, k, x } => Construction::Arcs(star_arcs(*n, *k, *x)?),
            MPq { n, k, p, q } => Construction::Arcs(m_pq(*n, *k, *p, *q)?),
            ErdosLevels { n, levels } => Construction::Sets(erdos_levels(*n, levels)?),
            HiltonMilner { n, k } => Construction::Sets(hilton_milner(*n, *k)?),
            DIj { n, i, j } => Construction::Arcs(d_ij(*n, *i, *j)?),
            BkOfT { n, k, t } => {
                let pts = GroundSet::new(*n)?.point_set(t)?;
                Construction::Arcs(b_k_of_t(*n, *k, &pts)?)
            }
            BT2 { n } => Construction::Arcs(b_t2(*n)?),
            KleitmanD { n, s } => Construction::Sets(kleitman_d(*n, *s)?),
            L { n, k, r } => Construction::Sets(l_family(*n, *k, *r)?),
            CompleteK { k, r } => Construction::Sets(complete_k(*k, *r)?),
            BFamily { n, k } => Construction::Sets(b_family(*n, *k)?),
        })
    }

    /// Example string for every tag.
    pub fn catalogue() -> Vec<&'static str> {
        vec![
            "star_arcs:6,3,1",
            "m_pq:6,3,3,5",
            "erdos_levels:5,2,3",
            "hilton_milner:6,3",
            "d_ij:6,1,4",
            "b_k_of_T:9,3,1,4,7",
            "b_T2:6",
            "kleitman_D:5,2",
            "L:7,2,2",
            "complete_K:2,2",
            "b_family:5,2",
        ]
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConstructionId::*;
        match self {
            StarArcs { n, k, x } => write!(f, "star_arcs:{n},{k},{x}"),
            MPq { n, k, p, q } => write!(f, "m_pq:{n},{k},{p},{q}"),
            ErdosLevels { n, levels } => write!(f, "erdos_levels:{n},{}", join(levels)),
            HiltonMilner { n, k } => write!(f, "hilton_milner:{n},{k}"),
            DIj { n, i, j } => write!(f, "d_ij:{n},{i},{j}"),
            BkOfT { n, k, t } => write!(f, "b_k_of_T:{n},{k},{}", join(t)),
            BT2 { n } => write!(f, "b_T2:{n}"),
            KleitmanD { n, s } => write!(f, "kleitman_D:{n},{s}"),
            L { n, k, r } => write!(f, "L:{n},{k},{r}"),
            CompleteK { k, r } => write!(f, "complete_K:{k},{r}"),
            BFamily { n, k } => write!(f, "b_family:{n},{k}"),
        }
    }
}

impl FromStr for ConstructionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use ConstructionId::*;
        let (tag, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `tag:params`, got `{s}`")))?;
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{a}` in `{s}`")))
            })
            .collect::<Result<_>>()?;
        let exact = |want: usize| -> Result<()> {
            if nums.len() == want {
                Ok(())
            } else {
                Err(Error::Parse(format!("`{tag}` takes {want} parameters, got {}", nums.len())))
            }
        };
        let at_least = |want: usize| -> Result<()> {
            if nums.len() >= want {
                Ok(())
            } else {
                Err(Error::Parse(format!("`{tag}` takes at least {want} parameters")))
            }
        };
        Ok(match tag.trim() {
            "star_arcs" => {
                exact(3)?;
                StarArcs { n: nums[0], k: nums[1], x: nums[2] }
            }
            "m_pq" => {
                exact(4)?;
                MPq { n: nums[0], k: nums[1], p: nums[2], q: nums[3] }
            }
            "erdos_levels" => {
                at_least(2)?;
                ErdosLevels { n: nums[0], levels: nums[1..].to_vec() }
            }
            "hilton_milner" => {
                exact(2)?;
                HiltonMilner { n: nums[0], k: nums[1] }
            }
            "d_ij" => {
                exact(3)?;
                DIj { n: nums[0], i: nums[1], j: nums[2] }
            }
            "b_k_of_T" => {
                at_least(3)?;
                BkOfT { n: nums[0], k: nums[1], t: nums[2..].to_vec() }
            }
            "b_T2" => {
                exact(1)?;
                BT2 { n: nums[0] }
            }
            "kleitman_D" => {
                exact(2)?;
                KleitmanD { n: nums[0], s: nums[1] }
            }
            "L" => {
                exact(3)?;
                L { n: nums[0], k: nums[1], r: nums[2] }
            }
            "complete_K" => {
                exact(2)?;
                CompleteK { k: nums[0], r: nums[1] }
            }
            "b_family" => {
                exact(2)?;
                BFamily { n: nums[0], k: nums[1] }
            }
            other => return Err(Error::Parse(format!("unknown construction `{other}`"))),
        })
    }
}
