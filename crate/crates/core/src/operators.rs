//! Shade and shadow on arc levels and on uniform set families, connected
//! components of a level, and the antichain lift that pushes the bottom
//! level of an antichain up by one.
//!
//! On a single level the operators reduce to head arithmetic: a `(k+1)`-arc
//! with head `h` contains exactly the `k`-arcs with heads `h` and `h+1`, so
//! the shade of a head set `H` is `H ∪ (H − 1)` and the shadow is `H ∪ (H + 1)`.

use serde::Serialize;

use crate::circle::{bits, full_mask, rotate_left, rotate_right, ArcFamily, SetFamily};
use crate::error::{Error, Result};
use crate::predicates::{self, PredicateId};

/// Maximal circular runs of consecutive heads on one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentProfile {
    pub count: usize,
    /// `(first head, run length)` pairs, ordered by first head.
    pub runs: Vec<(usize, usize)>,
}

fn level_heads(fam: &ArcFamily, k: usize) -> Result<u64> {
    fam.ground().check_level(k)?;
    if fam.occupied_levels().iter().any(|&j| j != k) {
        return Err(Error::domain(format!(
            "expected arcs of length {k} only, found levels {:?}",
            fam.occupied_levels()
        )));
    }
    Ok(fam.level(k))
}

/// All `(k+1)`-arcs containing some member of the level-`k` family `fam`.
pub fn shade_immediate(fam: &ArcFamily, k: usize) -> Result<ArcFamily> {
    let n = fam.n();
    let heads = level_heads(fam, k)?;
    if k + 1 >= n {
        return Err(Error::domain(format!(
            "the shade of level {k} is undefined on n = {n}: arcs of length n do not exist"
        )));
    }
    ArcFamily::from_level(fam.ground(), k + 1, heads | rotate_right(heads, 1, n))
}

/// All `(k-1)`-arcs contained in some member of the level-`k` family `fam`.
pub fn shadow_immediate(fam: &ArcFamily, k: usize) -> Result<ArcFamily> {
    let n = fam.n();
    let heads = level_heads(fam, k)?;
    if k < 2 {
        return Err(Error::domain(
            "the shadow of level 1 is undefined: the empty set is not an arc",
        ));
    }
    ArcFamily::from_level(fam.ground(), k - 1, heads | rotate_left(heads, 1, n))
}

/// The arcs of length `target` comparable to some member of the level-`k`
/// family, obtained by repeated immediate shades or shadows.
pub fn shadow_iterated(fam: &ArcFamily, k: usize, target: usize) -> Result<ArcFamily> {
    let g = fam.ground();
    g.check_level(target)?;
    let mut cur = ArcFamily::from_level(g, k, level_heads(fam, k)?)?;
    let mut level = k;
    while level < target {
        cur = shade_immediate(&cur, level)?;
        level += 1;
    }
    while level > target {
        cur = shadow_immediate(&cur, level)?;
        level -= 1;
    }
    Ok(cur)
}

/// Components of the head graph of level `k`: heads `h` and `h+1` are
/// adjacent. Rejects empty and full levels.
pub fn lambda_components(fam: &ArcFamily, k: usize) -> Result<ComponentProfile> {
    let n = fam.n();
    let heads = level_heads(fam, k)?;
    if heads == 0 || heads == full_mask(n) {
        return Err(Error::domain(format!(
            "components are defined only for 0 < |B| < n; level {k} has {} arcs",
            heads.count_ones()
        )));
    }
    let starts = heads & !rotate_left(heads, 1, n);
    let runs: Vec<(usize, usize)> = bits(starts)
        .map(|s| {
            let mut len = 0;
            while heads & (1 << ((s + len) % n)) != 0 {
                len += 1;
            }
            (s + 1, len)
        })
        .collect();
    Ok(ComponentProfile {
        count: runs.len(),
        runs,
    })
}

/// Common member size, or an error for a non-uniform family.
fn uniform_level(fam: &SetFamily) -> Result<Option<usize>> {
    fam.uniform_size()
        .map_err(|_| Error::domain("shade and shadow need a uniform family"))
}

/// All `(k+1)`-subsets of `[n]` containing a member of the `k`-uniform `fam`.
pub fn set_shade(fam: &SetFamily) -> Result<SetFamily> {
    let n = fam.n();
    let Some(k) = uniform_level(fam)? else {
        return Ok(SetFamily::empty(fam.ground()));
    };
    if k >= n {
        return Err(Error::domain("a family of n-sets has no shade"));
    }
    let full = full_mask(n);
    let mut out = SetFamily::empty(fam.ground());
    for m in fam.masks() {
        for i in bits(!m & full) {
            out.insert_mask(m | 1 << i)?;
        }
    }
    Ok(out)
}

/// All `(k-1)`-subsets of `[n]` contained in a member of the `k`-uniform `fam`.
pub fn set_shadow(fam: &SetFamily) -> Result<SetFamily> {
    let Some(k) = uniform_level(fam)? else {
        return Ok(SetFamily::empty(fam.ground()));
    };
    if k == 0 {
        return Err(Error::domain("the empty set has no shadow"));
    }
    let mut out = SetFamily::empty(fam.ground());
    for m in fam.masks() {
        for i in bits(m) {
            out.insert_mask(m & !(1 << i))?;
        }
    }
    Ok(out)
}

/// Replaces the members of minimum size `l` by all their `(l+1)`-supersets.
/// The input must be a non-empty antichain with `l < n`; the result is
/// re-checked to be an antichain.
pub fn sperner_lift(fam: &SetFamily) -> Result<SetFamily> {
    if !predicates::is_antichain(fam) {
        return Err(Error::domain("sperner_lift needs an antichain"));
    }
    let profile = fam.level_profile();
    let Some(l) = profile.iter().position(|&c| c > 0) else {
        return Err(Error::domain("sperner_lift needs a non-empty family"));
    };
    if l == fam.n() {
        return Err(Error::domain("the bottom level is already [n]"));
    }
    let bottom = fam.level(l);
    let mut out = SetFamily::from_masks(
        fam.ground(),
        fam.masks().filter(|m| m.count_ones() as usize != l),
    )?;
    for m in set_shade(&bottom)?.masks() {
        out.insert_mask(m)?;
    }
    if !predicates::is_antichain(&out) {
        return Err(Error::domain("lifted family is not an antichain"));
    }
    Ok(out)
}

/// [`sperner_lift`] that additionally requires `pred` to survive the lift
/// whenever the input satisfies it.
pub fn sperner_lift_preserving(fam: &SetFamily, pred: &PredicateId) -> Result<SetFamily> {
    let before = pred.holds(fam)?;
    let out = sperner_lift(fam)?;
    if before && !pred.holds(&out)? {
        return Err(Error::domain(format!(
            "lifting {} loses `{pred}`: result {}",
            serde_json::to_string(fam).unwrap_or_default(),
            serde_json::to_string(&out).unwrap_or_default()
        )));
    }
    Ok(out)
}
