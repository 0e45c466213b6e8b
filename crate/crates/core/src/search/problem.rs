//! Declarative description of an extremal problem: which candidate sets each
//! slot may use, which conditions tie the slots together, and what is
//! maximized.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circle::{arc_mask, k_subsets, GroundSet, PointSet};
use crate::error::{Error, Result};
use crate::predicates::PredicateId;

/// Exact weight or objective value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(pub Ratio<i64>);

impl Score {
    pub fn integer(v: i64) -> Self {
        Score(Ratio::from_integer(v))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Score(Ratio::new(num, den))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn as_integer(self) -> Option<i64> {
        self.0.is_integer().then(|| self.0.to_integer())
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl FromStr for Score {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<Ratio<i64>>()
            .map(Score)
            .map_err(|_| Error::Parse(format!("`{s}` is not an integer or a fraction p/q")))
    }
}

impl From<i64> for Score {
    fn from(v: i64) -> Self {
        Score::integer(v)
    }
}

/// Integers serialize as JSON numbers, everything else as `"p/q"`.
impl Serialize for Score {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_integer() {
            Some(v) => s.serialize_i64(v),
            None => s.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Int(i64),
            Text(String),
        }
        match Wire::deserialize(d)? {
            Wire::Int(v) => Ok(Score::integer(v)),
            Wire::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllLevels {
    All,
}

/// One size, an inclusive range of sizes, or every admissible size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Levels {
    Single(usize),
    Range([usize; 2]),
    All(AllLevels),
}

impl Levels {
    pub fn all() -> Self {
        Levels::All(AllLevels::All)
    }

    fn resolve(self, lo: usize, hi: usize) -> Result<Vec<usize>> {
        let (a, b) = match self {
            Levels::Single(k) => (k, k),
            Levels::Range([a, b]) => (a, b),
            Levels::All(_) => (lo, hi),
        };
        if a > b || a < lo || b > hi {
            return Err(Error::domain(format!(
                "levels {a}..={b} fall outside the admissible range {lo}..={hi}"
            )));
        }
        Ok((a..=b).collect())
    }
}

/// Candidate sets a slot may pick from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// Arcs of the given lengths, `1 <= k <= n - 1`.
    Arcs(Levels),
    /// All subsets of `[n]` with the given sizes, `0 <= k <= n`.
    Subsets(Levels),
    /// An explicit list of subsets of `[n]`.
    Sets(Vec<Vec<usize>>),
}

impl Slot {
    pub fn arcs(k: usize) -> Self {
        Slot::Arcs(Levels::Single(k))
    }

    pub fn arc_levels(lo: usize, hi: usize) -> Self {
        Slot::Arcs(Levels::Range([lo, hi]))
    }

    pub fn subsets(lo: usize, hi: usize) -> Self {
        Slot::Subsets(Levels::Range([lo, hi]))
    }

    /// Candidate masks in search order: by size, then by head for arcs and
    /// numerically for subsets; explicit lists keep their order.
    pub(crate) fn candidates(&self, g: GroundSet) -> Result<Vec<u64>> {
        let n = g.n();
        match self {
            Slot::Arcs(levels) => {
                let ks = levels.resolve(1, n.saturating_sub(1).max(1))?;
                if n < 2 {
                    return Err(Error::domain("arcs need n >= 2"));
                }
                Ok(ks
                    .into_iter()
                    .flat_map(|k| (0..n).map(move |h| arc_mask(n, h, k)))
                    .collect())
            }
            Slot::Subsets(levels) => {
                let ks = levels.resolve(0, n)?;
                Ok(ks.into_iter().flat_map(|k| k_subsets(n, k)).collect())
            }
            Slot::Sets(sets) => {
                let mut out = Vec::with_capacity(sets.len());
                for s in sets {
                    let m = PointSet::from_elems(g, s)?.bits();
                    if out.contains(&m) {
                        return Err(Error::domain(format!("set {s:?} is listed twice")));
                    }
                    out.push(m);
                }
                Ok(out)
            }
        }
    }

    pub(crate) fn is_arcs(&self) -> bool {
        matches!(self, Slot::Arcs(_))
    }
}

/// A condition on some of the slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Constraint {
    /// The union of the listed slots (all slots when omitted) satisfies a
    /// single-family predicate.
    Family {
        predicate: PredicateId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slots: Option<Vec<usize>>,
    },
    /// A cross predicate over families, each the union of a group of slots.
    /// Omitted groups mean one group per slot.
    Cross {
        predicate: PredicateId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        groups: Option<Vec<Vec<usize>>>,
    },
    /// No set is picked by two of the listed slots.
    Disjoint {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slots: Option<Vec<usize>>,
    },
}

impl Constraint {
    /// The predicate applied to all slots: as one family, or one group per
    /// slot for cross predicates.
    pub fn over_all(predicate: PredicateId) -> Self {
        if predicate.is_cross() {
            Constraint::Cross {
                predicate,
                groups: None,
            }
        } else {
            Constraint::Family {
                predicate,
                slots: None,
            }
        }
    }
}

/// Per-member weight inside a slot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Every member counts 1.
    #[default]
    Count,
    /// A member `F` counts `1 / C(n, |F|)`.
    Lym,
    /// A member `F` counts `1 / C(n - 1, |F| - 1)`.
    ShiftedLym,
}

/// Maximize `Σ_slots weight[slot] · Σ_{F in slot} measure(F)` subject to
/// every constraint, with the `nonempty` slots required non-empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub n: usize,
    pub slots: Vec<Slot>,
    /// Shorthand for one constraint: a family predicate over all slots, or a
    /// cross predicate with one group per slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<PredicateId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nonempty: Vec<usize>,
    /// Slot weights; empty means all 1.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<Score>,
    #[serde(default)]
    pub measure: Measure,
}

/// A constraint with defaults filled in and slot indices checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Resolved {
    Family(PredicateId, Vec<usize>),
    Cross(PredicateId, Vec<Vec<usize>>),
    Disjoint(Vec<usize>),
}

impl SearchProblem {
    pub fn new(n: usize, slots: Vec<Slot>) -> Self {
        SearchProblem {
            n,
            slots,
            predicate: None,
            constraints: Vec::new(),
            nonempty: Vec::new(),
            weights: Vec::new(),
            measure: Measure::Count,
        }
    }

    /// One slot with one predicate.
    pub fn single(n: usize, slot: Slot, predicate: PredicateId) -> Self {
        SearchProblem::new(n, vec![slot]).with(predicate)
    }

    pub fn with(mut self, predicate: PredicateId) -> Self {
        self.constraints.push(Constraint::over_all(predicate));
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn all_nonempty(mut self) -> Self {
        self.nonempty = (0..self.slots.len()).collect();
        self
    }

    pub fn with_weights(mut self, weights: Vec<Score>) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_measure(mut self, measure: Measure) -> Self {
        self.measure = measure;
        self
    }

    pub fn ground(&self) -> Result<GroundSet> {
        GroundSet::new(self.n)
    }

    pub(crate) fn slot_weight(&self, slot: usize) -> Ratio<i64> {
        self.weights.get(slot).map(|w| w.0).unwrap_or_else(Ratio::one)
    }

    fn check_slots(&self, list: &[usize]) -> Result<()> {
        for &s in list {
            if s >= self.slots.len() {
                return Err(Error::domain(format!(
                    "slot {s} does not exist (the problem has {})",
                    self.slots.len()
                )));
            }
        }
        Ok(())
    }

    /// Validates indices and weights and expands every shorthand.
    pub(crate) fn resolved(&self) -> Result<Vec<Resolved>> {
        self.ground()?;
        if self.slots.is_empty() {
            return Err(Error::domain("a search problem needs at least one slot"));
        }
        self.check_slots(&self.nonempty)?;
        if !self.weights.is_empty() && self.weights.len() != self.slots.len() {
            return Err(Error::domain(format!(
                "{} weights for {} slots",
                self.weights.len(),
                self.slots.len()
            )));
        }
        if self.weights.iter().any(|w| w.0 < Ratio::zero()) {
            return Err(Error::domain("slot weights must be non-negative"));
        }
        let all: Vec<usize> = (0..self.slots.len()).collect();
        let mut list = self.constraints.clone();
        if let Some(p) = &self.predicate {
            list.insert(0, Constraint::over_all(p.clone()));
        }
        let mut out = Vec::new();
        for c in list {
            out.push(match c {
                Constraint::Family { predicate, slots } => {
                    if predicate.is_cross() {
                        return Err(Error::domain(format!(
                            "`{predicate}` relates several families; use a cross constraint"
                        )));
                    }
                    let slots = slots.unwrap_or_else(|| all.clone());
                    self.check_slots(&slots)?;
                    Resolved::Family(predicate, slots)
                }
                Constraint::Cross { predicate, groups } => {
                    if !predicate.is_cross() {
                        return Err(Error::domain(format!(
                            "`{predicate}` is a single-family predicate"
                        )));
                    }
                    let groups = groups.unwrap_or_else(|| all.iter().map(|&s| vec![s]).collect());
                    for g in &groups {
                        self.check_slots(g)?;
                        if g.is_empty() {
                            return Err(Error::domain("a cross group needs at least one slot"));
                        }
                    }
                    let need = match predicate {
                        PredicateId::SWiseCrossIntersecting(s) => s,
                        _ => 2,
                    };
                    if groups.len() < need {
                        return Err(Error::domain(format!(
                            "`{predicate}` needs at least {need} groups, got {}",
                            groups.len()
                        )));
                    }
                    Resolved::Cross(predicate, groups)
                }
                Constraint::Disjoint { slots } => {
                    let slots = slots.unwrap_or_else(|| all.clone());
                    self.check_slots(&slots)?;
                    Resolved::Disjoint(slots)
                }
            });
        }
        Ok(out)
    }

    /// True when every candidate set of every slot is an arc.
    pub(crate) fn arcs_only(&self) -> bool {
        self.slots.iter().all(Slot::is_arcs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let p: SearchProblem = serde_json::from_str(
            r#"{"n":6,"slots":[{"arcs":3},{"arcs":[1,5]},{"subsets":"all"},{"sets":[[1,2],[3]]}],
                "predicate":"intersecting","nonempty":[0],"weights":[1,"5/2",2,1]}"#,
        )
        .unwrap();
        assert_eq!(p.slots[0], Slot::arcs(3));
        assert_eq!(p.slots[1], Slot::arc_levels(1, 5));
        assert_eq!(p.slots[2], Slot::Subsets(Levels::all()));
        assert_eq!(p.weights[1], Score::new(5, 2));
        assert_eq!(p.resolved().unwrap().len(), 1);
        let back: SearchProblem = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);

        let c: SearchProblem = serde_json::from_str(
            r#"{"n":7,"slots":[{"arcs":3},{"arcs":3}],
                "constraints":[{"kind":"cross","predicate":"cross-intersecting"},{"kind":"disjoint"}]}"#,
        )
        .unwrap();
        assert_eq!(
            c.resolved().unwrap(),
            vec![
                Resolved::Cross(PredicateId::CrossIntersecting, vec![vec![0], vec![1]]),
                Resolved::Disjoint(vec![0, 1])
            ]
        );
    }

    #[test]
    fn rejects_bad_shapes() {
        let g = GroundSet::new(5).unwrap();
        assert!(Slot::arcs(5).candidates(g).is_err());
        assert!(Slot::Sets(vec![vec![1], vec![1]]).candidates(g).is_err());
        assert_eq!(Slot::Subsets(Levels::all()).candidates(g).unwrap().len(), 32);
        assert_eq!(Slot::Arcs(Levels::all()).candidates(g).unwrap().len(), 20);
        let p = SearchProblem::single(5, Slot::arcs(2), PredicateId::CrossIntersecting);
        assert!(p.resolved().is_err());
        let mut q = SearchProblem::single(5, Slot::arcs(2), PredicateId::Intersecting);
        q.nonempty = vec![3];
        assert!(q.resolved().is_err());
        assert_eq!(Score::new(6, 2).to_string(), "3");
        assert_eq!("5/2".parse::<Score>().unwrap().to_string(), "5/2");
    }
}
