//! Theorem registry: each entry checks its hypotheses, builds a search
//! problem, states a closed-form bound and lists the structural claims that
//! come with it.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::certificates::{
    butterfly_decompose, cross_union_range, gronau_level_gap, hilton_milner_circle_check, injection_phi,
    TraceMembership,
};
use super::engine::{maximize, SearchConfig, Witness};
use super::problem::{Constraint, Levels, Measure, Score, SearchProblem, Slot};
use crate::circle::{arc_mask, symmetry_orbit, GroundSet, PointSet, SetFamily};
use crate::constructions::{b_k_of_t, b_set_mask, b_t2, b_t2_size, binomial, d_ij};
use crate::error::{Error, Result};
use crate::operators::lambda_components;
use crate::predicates::{is_star, matching_number, PredicateId as P};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    CircularSperner,
    CircularEkr,
    CrossIntersecting,
    CrossUnionTuple,
    SWiseUnion,
    SWiseIntersecting,
    CircularHm,
    ChainFree,
    Butterfly,
    HiltonNested,
    CircularEmc,
    CircularEmcNonuniform,
    CrossUnionSum,
    IuCircle,
    GronauCircle,
    Lym,
    ButterflyLym,
    SWiseAntichainLym,
    PartitionFreeTrace,
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        TheoremId::CircularSperner,
        TheoremId::CircularEkr,
        TheoremId::CrossIntersecting,
        TheoremId::CrossUnionTuple,
        TheoremId::SWiseUnion,
        TheoremId::SWiseIntersecting,
        TheoremId::CircularHm,
        TheoremId::ChainFree,
        TheoremId::Butterfly,
        TheoremId::HiltonNested,
        TheoremId::CircularEmc,
        TheoremId::CircularEmcNonuniform,
        TheoremId::CrossUnionSum,
        TheoremId::IuCircle,
        TheoremId::GronauCircle,
        TheoremId::Lym,
        TheoremId::ButterflyLym,
        TheoremId::SWiseAntichainLym,
        TheoremId::PartitionFreeTrace,
    ];

    pub fn as_str(self) -> &'static str {
        use TheoremId::*;
        match self {
            CircularSperner => "circular-sperner",
            CircularEkr => "circular-EKR",
            CrossIntersecting => "cross-intersecting",
            CrossUnionTuple => "cross-union-tuple",
            SWiseUnion => "s-wise-union",
            SWiseIntersecting => "s-wise-intersecting",
            CircularHm => "circular-HM",
            ChainFree => "chain-free",
            Butterfly => "butterfly",
            HiltonNested => "hilton-nested",
            CircularEmc => "circular-EMC",
            CircularEmcNonuniform => "circular-EMC-nonuniform",
            CrossUnionSum => "cross-union-sum",
            IuCircle => "iu-circle",
            GronauCircle => "gronau-circle",
            Lym => "lym",
            ButterflyLym => "butterfly-lym",
            SWiseAntichainLym => "s-wise-antichain-lym",
            PartitionFreeTrace => "partition-free-trace",
        }
    }

    /// Parameters the entry reads. `cross-union-tuple` takes `ls`, or `s`
    /// and `l` for equal lengths; `hilton-nested` takes `c`, or `q` with
    /// `c = q - s + 1`.
    pub fn params(self) -> &'static [&'static str] {
        use TheoremId::*;
        match self {
            CircularSperner | Butterfly | CircularEmcNonuniform | IuCircle | GronauCircle | Lym | ButterflyLym => {
                &["n"]
            }
            CircularEkr | CircularHm | PartitionFreeTrace => &["n", "k"],
            CrossIntersecting => &["n", "k", "l"],
            CrossUnionTuple => &["n", "ls | s,l"],
            SWiseUnion => &["n", "l", "s"],
            SWiseIntersecting => &["n", "k", "s"],
            ChainFree => &["n", "l"],
            HiltonNested => &["n", "k", "s", "c | q"],
            CircularEmc | CrossUnionSum => &["n", "k", "r"],
            SWiseAntichainLym => &["n", "s"],
        }
    }

    pub fn summary(self) -> &'static str {
        use TheoremId::*;
        match self {
            CircularSperner => "antichains of arcs have at most n members; only full levels attain n",
            CircularEkr => "intersecting families of k-arcs with n >= 2k have at most k members; for n > 2k only stars attain k",
            CrossIntersecting => "non-empty cross-intersecting families of k-arcs and l-arcs with k + l <= n: |B| + |C| <= k + l; for k + l < n optimal families are runs of consecutive arcs",
            CrossUnionTuple => "non-empty cross-union families of arcs of lengths l_1..l_s with sum >= n: total size <= sum of (n - l_i)",
            SWiseUnion => "s-wise union families of l-arcs with l <= n <= sl have at most n - l members",
            SWiseIntersecting => "s-wise intersecting families of k-arcs with (s-1)n >= sk have at most k members",
            CircularHm => "intersecting k-arc families that are not stars exist only for n <= 3(k-1) and then have at most 3k - n members",
            ChainFree => "arc families without a chain of l + 1 members have at most ln members",
            Butterfly => "butterfly-free arc families have at most 2n members",
            HiltonNested => "nested s-wise cross-intersecting k-arc families B_s within ... within B_1 with (s-1)n >= sk: |B_1| + ... + |B_(s-1)| + c|B_s| <= max{(s-1)n, (s-1+c)k}",
            CircularEmc => "k-arc families without r + 1 pairwise disjoint members, n >= k(r+1), have at most kr members",
            CircularEmcNonuniform => "arc families without 3 pairwise disjoint members have at most as many members as the arcs meeting {floor(n/2), n}",
            CrossUnionSum => "r >= 3 non-empty cross-union families of k-arcs with n/(r-1) <= k <= (r-1)n/r have total size at most r(n - k)",
            IuCircle => "intersecting union arc families have at most floor(n/2)ceil(n/2) members; the optimum is unique up to symmetry",
            GronauCircle => "arc families whose pairs meet without covering [n], unless complementary, have at most floor(n/2)ceil(n/2) members",
            Lym => "antichains of proper non-empty subsets have LYM sum at most 1, with equality only for full levels",
            ButterflyLym => "butterfly-free families of proper non-empty subsets have LYM sum at most 2",
            SWiseAntichainLym => "s-wise intersecting antichains with (s-1)n >= s|F| have shifted LYM sum at most 1",
            PartitionFreeTrace => "for n = 3k - 1, families of (k-1)-arcs, k-arcs and the sets B_(k+1)(x_i) with no three members partitioning [n] have at most 2n members",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown theorem `{s}`; see list-theorems")))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Named integer and rational parameters of a registry entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Score>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ls: Option<Vec<usize>>,
}

macro_rules! setter {
    ($name:ident, $t:ty) => {
        pub fn $name(mut self, v: $t) -> Self {
            self.$name = Some(v);
            self
        }
    };
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    setter!(n, usize);
    setter!(k, usize);
    setter!(l, usize);
    setter!(s, usize);
    setter!(r, usize);
    setter!(q, usize);
    setter!(c, Score);
    setter!(ls, Vec<usize>);

    fn get(&self, id: TheoremId, name: &str, v: Option<usize>) -> Result<usize> {
        v.ok_or_else(|| Error::domain(format!("{id} needs parameter {name}")))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, v) in [("n", self.n), ("k", self.k), ("l", self.l), ("s", self.s), ("r", self.r), ("q", self.q)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if let Some(c) = self.c {
            parts.push(format!("c={c}"));
        }
        if let Some(ls) = &self.ls {
            parts.push(format!("ls={}", ls.iter().map(usize::to_string).collect::<Vec<_>>().join(",")));
        }
        f.write_str(&parts.join(" "))
    }
}

/// A structural statement checked alongside the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub theorem: TheoremId,
    pub params: Params,
    pub bound: Score,
    pub achieved: Score,
    pub tight: bool,
    /// Optimal configurations up to symmetry, when ties were enumerated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal_count: Option<usize>,
    pub claims: Vec<Claim>,
    pub witnesses: Vec<Witness>,
    pub nodes_explored: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Verification {
    /// The bound held (checked on construction) and every claim holds.
    pub fn ok(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }
}

fn hyp(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::hypothesis(msg()))
    }
}

fn claim(name: impl Into<String>, holds: bool) -> Claim {
    Claim { name: name.into(), holds }
}

fn int(v: usize) -> Score {
    Score::integer(v as i64)
}

type Check = Box<dyn Fn(&Outcome) -> Result<Vec<Claim>>>;

/// A bound, the search behind it, and claims evaluated on the outcome.
struct Plan {
    bound: Score,
    problem: SearchProblem,
    ties: bool,
    expect_tight: bool,
    #[allow(clippy::type_complexity)]
    check: Check,
}

struct Outcome {
    witnesses: Vec<Witness>,
    extremal_count: Option<usize>,
}

fn no_claims() -> Check {
    Box::new(|_| Ok(Vec::new()))
}

fn every_witness(o: &Outcome, f: impl Fn(&Witness) -> Result<bool>) -> Result<bool> {
    for w in &o.witnesses {
        if !f(w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn all_arcs_slot() -> Slot {
    Slot::Arcs(Levels::all())
}

fn plan(id: TheoremId, p: &Params) -> Result<Plan> {
    use TheoremId::*;
    let n = p.get(id, "n", p.n)?;
    let g = GroundSet::new(n)?;
    hyp(n >= 2, || format!("n >= 2 (got n = {n})"))?;
    let plan = match id {
        CircularSperner => Plan {
            bound: int(n),
            problem: SearchProblem::single(n, all_arcs_slot(), P::Antichain),
            ties: true,
            expect_tight: true,
            check: Box::new(move |o| {
                let full = every_witness(o, |w| {
                    let a = w.arcs(0)?;
                    Ok(matches!(a.single_level()?, Some(k) if a.level_size(k) == n))
                })?;
                Ok(vec![
                    claim("every extremal family is a full level", full),
                    claim("one extremal class per level", o.extremal_count == Some(n - 1)),
                ])
            }),
        },
        CircularEkr => {
            let k = p.get(id, "k", p.k)?;
            hyp(k >= 1 && n >= 2 * k, || format!("n >= 2k >= 2 (got n = {n}, k = {k})"))?;
            let unique = n > 2 * k;
            Plan {
                bound: int(k),
                problem: SearchProblem::single(n, Slot::arcs(k), P::Intersecting),
                ties: unique,
                expect_tight: true,
                check: Box::new(move |o| {
                    if !unique {
                        return Ok(Vec::new());
                    }
                    let stars = every_witness(o, |w| Ok(is_star(&w.slots[0]).0))?;
                    Ok(vec![
                        claim("every extremal family is a star", stars),
                        claim("stars form one extremal class", o.extremal_count == Some(1)),
                    ])
                }),
            }
        }
        CrossIntersecting => {
            let (k, l) = (p.get(id, "k", p.k)?, p.get(id, "l", p.l)?);
            hyp(k >= 1 && l >= 1 && k + l <= n, || format!("k, l >= 1 and k + l <= n (got n = {n}, k = {k}, l = {l})"))?;
            let runs = k + l < n;
            Plan {
                bound: int(k + l),
                problem: SearchProblem::new(n, vec![Slot::arcs(k), Slot::arcs(l)])
                    .with(P::CrossIntersecting)
                    .all_nonempty(),
                ties: runs,
                expect_tight: true,
                check: Box::new(move |o| {
                    if !runs {
                        return Ok(Vec::new());
                    }
                    let single = every_witness(o, |w| {
                        Ok(lambda_components(&w.arcs(0)?, k)?.count == 1 && lambda_components(&w.arcs(1)?, l)?.count == 1)
                    })?;
                    Ok(vec![claim("both extremal families are runs of consecutive arcs", single)])
                }),
            }
        }
        CrossUnionTuple => {
            let ls = match (&p.ls, p.s, p.l) {
                (Some(ls), _, _) => ls.clone(),
                (None, Some(s), Some(l)) => vec![l; s],
                _ => return Err(Error::domain(format!("{id} needs ls, or s and l"))),
            };
            let s = ls.len();
            hyp(s >= 2 && s <= n, || format!("2 <= s <= n (got n = {n}, s = {s})"))?;
            hyp(ls.iter().all(|&l| l >= 1 && l < n), || format!("1 <= l_i < n (got {ls:?})"))?;
            hyp(ls.iter().sum::<usize>() >= n, || format!("l_1 + ... + l_s >= n (got {ls:?}, n = {n})"))?;
            Plan {
                bound: int(ls.iter().map(|&l| n - l).sum()),
                problem: SearchProblem::new(n, ls.iter().map(|&l| Slot::arcs(l)).collect())
                    .with(P::CrossUnion)
                    .all_nonempty(),
                ties: false,
                expect_tight: true,
                check: no_claims(),
            }
        }
        SWiseUnion => {
            let (l, s) = (p.get(id, "l", p.l)?, p.get(id, "s", p.s)?);
            hyp(n >= s && s >= 2, || format!("n >= s >= 2 (got n = {n}, s = {s})"))?;
            hyp(l >= 1 && l < n && n <= s * l, || format!("1 <= l < n <= sl (got n = {n}, l = {l}, s = {s})"))?;
            Plan {
                bound: int(n - l),
                problem: SearchProblem::single(n, Slot::arcs(l), P::RWiseUnion(s)),
                ties: false,
                expect_tight: true,
                check: no_claims(),
            }
        }
        SWiseIntersecting => {
            let (k, s) = (p.get(id, "k", p.k)?, p.get(id, "s", p.s)?);
            hyp(n > k && k >= 1 && s >= 2, || format!("n > k >= 1 and s >= 2 (got n = {n}, k = {k}, s = {s})"))?;
            hyp((s - 1) * n >= s * k, || format!("(s-1)n >= sk (got n = {n}, k = {k}, s = {s})"))?;
            Plan {
                bound: int(k),
                problem: SearchProblem::single(n, Slot::arcs(k), P::SWiseIntersecting(s)),
                ties: false,
                expect_tight: true,
                check: no_claims(),
            }
        }
        CircularHm => return Err(Error::Internal("circular-HM has no search plan".into())),
        ChainFree => {
            let l = p.get(id, "l", p.l)?;
            hyp(n >= l && l >= 1, || format!("n >= l >= 1 (got n = {n}, l = {l})"))?;
            Plan {
                bound: int(l * n),
                problem: SearchProblem::single(n, all_arcs_slot(), P::ChainFree(l)),
                ties: false,
                // All of A(n) has no chain of n members.
                expect_tight: l < n,
                check: no_claims(),
            }
        }
        Butterfly => Plan {
            bound: int(2 * n),
            problem: SearchProblem::single(n, all_arcs_slot(), P::ButterflyFree),
            ties: false,
            expect_tight: n >= 3,
            check: Box::new(|o| {
                let split = every_witness(o, |w| Ok(butterfly_decompose(&w.arcs(0)?)?.holds()))?;
                Ok(vec![claim("minimal/middle/maximal split satisfies both counting bounds", split)])
            }),
        },
        HiltonNested => {
            let (k, s) = (p.get(id, "k", p.k)?, p.get(id, "s", p.s)?);
            let c = match (p.c, p.q) {
                (Some(c), _) => c,
                (None, Some(q)) => {
                    hyp(q >= s, || format!("q >= s (got q = {q}, s = {s})"))?;
                    int(q - s + 1)
                }
                _ => return Err(Error::domain(format!("{id} needs c or q"))),
            };
            hyp(s >= 2 && k >= 1 && k < n, || format!("s >= 2 and 1 <= k < n (got n = {n}, k = {k}, s = {s})"))?;
            hyp((s - 1) * n >= s * k, || format!("(s-1)n >= sk (got n = {n}, k = {k}, s = {s})"))?;
            hyp(c.ratio() >= 1.into(), || format!("c >= 1 (got c = {c})"))?;
            // Slot j holds B_j \ B_(j+1); B_j is the union of slots j..s.
            let mut weights: Vec<Score> = (1..s).map(int).collect();
            weights.push(Score(c.ratio() + (s as i64 - 1)));
            let groups = (0..s).map(|j| (j..s).collect()).collect();
            let predicate = if s == 2 { P::CrossIntersecting } else { P::SWiseCrossIntersecting(s) };
            let two = Score(num_rational::Ratio::from_integer((s - 1) as i64) * n as i64);
            let one = Score((c.ratio() + (s as i64 - 1)) * k as i64);
            Plan {
                bound: if two.ratio() >= one.ratio() { two } else { one },
                problem: SearchProblem::new(n, (0..s).map(|_| Slot::arcs(k)).collect())
                    .with_constraint(Constraint::Cross { predicate, groups: Some(groups) })
                    .with_constraint(Constraint::Disjoint { slots: None })
                    .with_weights(weights),
                ties: false,
                expect_tight: true,
                check: no_claims(),
            }
        }
        CircularEmc => {
            let (k, r) = (p.get(id, "k", p.k)?, p.get(id, "r", p.r)?);
            hyp(k >= 1 && r >= 1 && n >= k * (r + 1), || format!("n >= k(r+1) with k, r >= 1 (got n = {n}, k = {k}, r = {r})"))?;
            Plan {
                bound: int(k * r),
                problem: SearchProblem::single(n, Slot::arcs(k), P::MatchingAtMost(r)),
                ties: false,
                expect_tight: true,
                check: Box::new(move |_| {
                    let t: Vec<usize> = (0..r).map(|i| i * k + 1).collect();
                    let fam = b_k_of_t(n, k, &PointSet::from_elems(g, &t)?)?;
                    Ok(vec![claim(
                        "arcs meeting r points spaced k apart: kr arcs, no r + 1 disjoint",
                        fam.len() == k * r && matching_number(&fam)? <= r,
                    )])
                }),
            }
        }
        CircularEmcNonuniform => {
            hyp(n >= 3, || format!("n >= 3 (got n = {n})"))?;
            Plan {
                bound: int(b_t2_size(n)),
                problem: SearchProblem::single(n, all_arcs_slot(), P::MatchingAtMost(2)),
                ties: false,
                expect_tight: true,
                check: Box::new(move |_| {
                    let fam = b_t2(n)?;
                    Ok(vec![claim(
                        "arcs meeting {floor(n/2), n} have no 3 disjoint members",
                        matching_number(&fam)? <= 2,
                    )])
                }),
            }
        }
        CrossUnionSum => {
            let (k, r) = (p.get(id, "k", p.k)?, p.get(id, "r", p.r)?);
            hyp(r >= 3, || format!("r >= 3 (got r = {r})"))?;
            hyp(k >= 1 && k < n, || format!("1 <= k < n (got n = {n}, k = {k})"))?;
            hyp(n <= k * (r - 1) && r * k <= (r - 1) * n, || {
                format!("n/(r-1) <= k <= (r-1)n/r (got n = {n}, k = {k}, r = {r})")
            })?;
            Plan {
                bound: int(r * (n - k)),
                problem: SearchProblem::new(n, (0..r).map(|_| Slot::arcs(k)).collect())
                    .with(P::CrossUnion)
                    .all_nonempty(),
                ties: false,
                expect_tight: true,
                check: Box::new(move |_| {
                    Ok(vec![claim("case split bounds stay within r(n - k)", cross_union_range(n, k, r)?.holds())])
                }),
            }
        }
        IuCircle => Plan {
            bound: int((n / 2) * n.div_ceil(2)),
            problem: SearchProblem::single(n, all_arcs_slot(), P::Iu),
            ties: true,
            expect_tight: true,
            check: Box::new(move |o| {
                let mut antipodal = BTreeSet::new();
                for i in 1..=n {
                    for j in [i + n / 2, i + n.div_ceil(2)] {
                        let j = (j - 1) % n + 1;
                        antipodal.insert(symmetry_orbit(&d_ij(n, i, j)?, true));
                    }
                }
                let mut found = BTreeSet::new();
                for w in &o.witnesses {
                    found.insert(symmetry_orbit(&w.arcs(0)?, true));
                }
                Ok(vec![
                    claim("extremal families are exactly the antipodal D(i,j)", found == antipodal),
                    claim("extremal count is complete", o.extremal_count == Some(antipodal.len())),
                ])
            }),
        },
        GronauCircle => {
            hyp(n >= 3, || format!("n >= 3 (got n = {n})"))?;
            Plan {
                bound: int((n / 2) * n.div_ceil(2)),
                problem: SearchProblem::single(n, all_arcs_slot(), P::Gronau),
                ties: false,
                expect_tight: true,
                check: Box::new(move |_| {
                    if n % 2 == 1 || n > 12 {
                        return Ok(Vec::new());
                    }
                    let gap = gronau_level_gap(n)?;
                    Ok(vec![claim(
                        "a middle level with q + t arcs excludes lengths <= t and >= n - t",
                        gap.violation.is_none(),
                    )])
                }),
            }
        }
        Lym => Plan {
            bound: int(1),
            problem: SearchProblem::single(n, Slot::subsets(1, n - 1), P::Antichain).with_measure(Measure::Lym),
            ties: true,
            expect_tight: true,
            check: Box::new(move |o| {
                let full = every_witness(o, |w| {
                    let f = &w.slots[0];
                    Ok(matches!(f.uniform_size()?, Some(l) if f.len() as u128 == binomial(n, l)))
                })?;
                Ok(vec![claim("equality only for full levels", full)])
            }),
        },
        ButterflyLym => Plan {
            bound: int(2),
            problem: SearchProblem::single(n, Slot::subsets(1, n - 1), P::ButterflyFree).with_measure(Measure::Lym),
            ties: false,
            expect_tight: n >= 3,
            check: no_claims(),
        },
        SWiseAntichainLym => {
            let s = p.get(id, "s", p.s)?;
            hyp(s >= 3, || format!("s >= 3 (got s = {s})"))?;
            let top = (s - 1) * n / s;
            hyp(top >= 1, || format!("some size satisfies (s-1)n >= s|F| (got n = {n}, s = {s})"))?;
            Plan {
                bound: int(1),
                problem: SearchProblem::single(n, Slot::subsets(1, top), P::Antichain)
                    .with(P::SWiseIntersecting(s))
                    .with_measure(Measure::ShiftedLym),
                ties: false,
                expect_tight: true,
                check: no_claims(),
            }
        }
        PartitionFreeTrace => {
            let k = p.get(id, "k", p.k)?;
            hyp(k >= 2 && n == 3 * k - 1, || format!("n = 3k - 1 with k >= 2 (got n = {n}, k = {k})"))?;
            let sets: Vec<Vec<usize>> = (0..n)
                .flat_map(|i| [arc_mask(n, i, k - 1), arc_mask(n, i, k), b_set_mask(n, k, i + 1)])
                .map(|m| (0..n).filter(|&x| m >> x & 1 == 1).map(|x| x + 1).collect())
                .collect();
            Plan {
                bound: int(2 * n),
                problem: SearchProblem::single(n, Slot::Sets(sets), P::PartitionFree(3)),
                ties: false,
                expect_tight: true,
                check: Box::new(move |o| {
                    let phi = every_witness(o, |w| Ok(injection_phi(n, k, membership(&w.slots[0], k)?)?.holds()))?;
                    Ok(vec![claim("the injection into missing sets exists for every extremal family", phi)])
                }),
            }
        }
    };
    Ok(plan)
}

/// Splits a family over `A(n,k-1) ∪ A(n,k) ∪ B(n,k+1)` into index words.
pub fn membership(fam: &SetFamily, k: usize) -> Result<TraceMembership> {
    let n = fam.n();
    let mut out = TraceMembership::default();
    for m in fam.masks() {
        let size = m.count_ones() as usize;
        let find = |f: &dyn Fn(usize) -> u64| (0..n).find(|&i| f(i) == m);
        let slot = if size + 1 == k {
            find(&|i| arc_mask(n, i, k - 1)).map(|i| (&mut out.short, i))
        } else if size == k {
            find(&|i| arc_mask(n, i, k)).map(|i| (&mut out.arcs, i))
        } else if size == k + 1 {
            find(&|i| b_set_mask(n, k, i + 1)).map(|i| (&mut out.b_sets, i))
        } else {
            None
        };
        match slot {
            Some((word, i)) => *word |= 1 << i,
            None => return Err(Error::domain(format!("member {m:#b} is not one of the {} traced sets", 3 * n))),
        }
    }
    Ok(out)
}

fn hilton_milner(p: &Params) -> Result<Verification> {
    let id = TheoremId::CircularHm;
    let n = p.get(id, "n", p.n)?;
    let k = p.get(id, "k", p.k)?;
    hyp(k >= 1 && n >= 2 * k, || format!("n >= 2k >= 2 (got n = {n}, k = {k})"))?;
    let start = std::time::Instant::now();
    let report = hilton_milner_circle_check(n, k)?;
    let bound = int(report.bound.unwrap_or(0));
    let achieved = int(report.max_non_star.unwrap_or(0));
    let witnesses = report
        .extremal
        .iter()
        .map(|f| Witness { slots: vec![SetFamily::from(f)] })
        .collect::<Vec<_>>();
    falsify(id, bound, achieved, &witnesses)?;
    let in_range = k >= 2 && n <= 3 * (k - 1);
    Ok(Verification {
        theorem: id,
        params: p.clone(),
        bound,
        achieved,
        tight: achieved == bound,
        extremal_count: None,
        claims: vec![
            claim("tight", achieved == bound),
            claim("non-star families exist iff k >= 2 and n <= 3(k-1)", (report.non_star_families > 0) == in_range),
            claim("every non-star family has three members with empty intersection", report.every_non_star_has_empty_triple),
            claim(
                "every admissible M_pq is a non-star family of size 3k - n",
                report.m_pq.iter().all(|m| m.intersecting && !m.star && Some(m.size) == report.bound)
                    && (!in_range || !report.m_pq.is_empty()),
            ),
        ],
        witnesses,
        nodes_explored: report.intersecting_families,
        elapsed: start.elapsed(),
    })
}

fn falsify(id: TheoremId, bound: Score, achieved: Score, witnesses: &[Witness]) -> Result<()> {
    if achieved.ratio() > bound.ratio() {
        return Err(Error::Falsified {
            theorem: id.to_string(),
            bound: bound.to_string(),
            achieved: achieved.to_string(),
            counterexample: serde_json::to_string(&witnesses.first()).unwrap_or_default(),
        });
    }
    Ok(())
}

/// Checks the hypotheses, solves the bound's search problem exactly and
/// evaluates the entry's claims. `cfg` supplies budgets and parallelism;
/// tie enumeration is decided per entry.
pub fn verify_bound(id: TheoremId, params: &Params, cfg: &SearchConfig) -> Result<Verification> {
    if id == TheoremId::CircularHm {
        return hilton_milner(params);
    }
    let plan = plan(id, params)?;
    let mut cfg = cfg.clone();
    cfg.enumerate_ties = plan.ties;
    cfg.max_witnesses = if plan.ties { cfg.max_witnesses.max(1 << 12) } else { 1 };
    let report = maximize(&plan.problem, &cfg)?;
    let achieved = report.optimum.unwrap_or(Score::integer(0));
    falsify(id, plan.bound, achieved, &report.witnesses)?;
    let outcome = Outcome {
        extremal_count: (plan.ties && report.extremal_count_complete).then_some(report.extremal_count),
        witnesses: report.witnesses,
    };
    let tight = achieved == plan.bound;
    let mut claims = Vec::new();
    if plan.expect_tight {
        claims.push(claim("tight", tight));
    }
    claims.extend((plan.check)(&outcome)?);
    Ok(Verification {
        theorem: id,
        params: params.clone(),
        bound: plan.bound,
        achieved,
        tight,
        extremal_count: outcome.extremal_count,
        claims,
        witnesses: outcome.witnesses,
        nodes_explored: report.nodes_explored,
        elapsed: report.elapsed,
    })
}

/// The search problem behind an entry, for inspection or export.
pub fn theorem_problem(id: TheoremId, params: &Params) -> Result<SearchProblem> {
    if id == TheoremId::CircularHm {
        return Err(Error::domain("circular-HM is checked by direct enumeration, not by a search problem"));
    }
    Ok(plan(id, params)?.problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: TheoremId, p: Params) -> Verification {
        verify_bound(id, &p, &SearchConfig::default()).unwrap()
    }

    #[test]
    fn documented_examples() {
        let v = run(TheoremId::CircularEkr, Params::new().n(8).k(4));
        assert_eq!((v.bound, v.achieved, v.tight), (int(4), int(4), true));
        let v = run(TheoremId::CircularEmc, Params::new().n(9).k(3).r(2));
        assert_eq!((v.bound, v.achieved), (int(6), int(6)));
        assert!(v.ok());
        let v = run(TheoremId::Butterfly, Params::new().n(5));
        assert_eq!((v.bound, v.achieved), (int(10), int(10)));
        assert!(v.ok());
    }

    #[test]
    fn hypotheses_are_named() {
        let e = verify_bound(TheoremId::CircularEkr, &Params::new().n(5).k(3), &SearchConfig::default()).unwrap_err();
        assert!(matches!(&e, Error::Hypothesis(m) if m.contains("n >= 2k")), "{e}");
        let e = verify_bound(TheoremId::CircularEmc, &Params::new().n(5), &SearchConfig::default()).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
        }
    }

    #[test]
    fn uniqueness_claims() {
        assert!(run(TheoremId::IuCircle, Params::new().n(6)).ok());
        assert!(run(TheoremId::CircularSperner, Params::new().n(5)).ok());
        assert!(run(TheoremId::PartitionFreeTrace, Params::new().n(5).k(2)).ok());
        assert!(run(TheoremId::CircularHm, Params::new().n(6).k(3)).ok());
    }
}
