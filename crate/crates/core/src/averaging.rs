//! Averaging over cyclic orders: how many members of a set family appear as
//! arcs when `[n]` is written around a circle, exact expectations of that
//! count, LYM-type sums, and the lift from a per-circle bound to a bound on
//! the whole level. Everything here is exact rational arithmetic except the
//! clearly labelled Monte Carlo estimate.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{GroundSet, SetFamily};
use crate::constructions::binomial;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest `n` for which all `(n-1)!` cyclic orders are enumerated.
pub const ENUMERATION_LIMIT: usize = 9;

pub fn rational(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `"p/q"`, always with an explicit denominator.
pub fn fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// An exact value with its decimal approximation, as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exact {
    pub fraction: String,
    pub decimal: f64,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact {
            fraction: fraction_string(r),
            decimal: to_f64(r),
        }
    }
}

/// A way of writing `[n]` around a circle. Element 1 always sits at
/// position 1, so rotations of the same circle are not repeated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CyclicOrder {
    arrangement: Vec<usize>,
}

impl CyclicOrder {
    pub fn identity(n: usize) -> Self {
        CyclicOrder {
            arrangement: (1..=n).collect(),
        }
    }

    pub fn new(arrangement: Vec<usize>) -> Result<Self> {
        let n = arrangement.len();
        let mut seen = vec![false; n + 1];
        for &x in &arrangement {
            if x == 0 || x > n || seen[x] {
                return Err(Error::domain(format!("{arrangement:?} is not a permutation of 1..={n}")));
            }
            seen[x] = true;
        }
        if arrangement.first() != Some(&1) {
            return Err(Error::domain("a cyclic order starts with element 1"));
        }
        Ok(CyclicOrder { arrangement })
    }

    pub fn arrangement(&self) -> &[usize] {
        &self.arrangement
    }

    pub fn n(&self) -> usize {
        self.arrangement.len()
    }

    /// Element mask of the arc of length `k` starting at 0-based position `start`.
    pub fn arc_elements(&self, start: usize, k: usize) -> u64 {
        let n = self.n();
        (0..k).fold(0, |m, j| m | 1 << (self.arrangement[(start + j) % n] - 1))
    }
}

/// All `(n-1)!` cyclic orders of `[n]`, refusing above [`ENUMERATION_LIMIT`].
pub fn cyclic_orders(n: usize) -> Result<Vec<CyclicOrder>> {
    GroundSet::new(n)?;
    if n > ENUMERATION_LIMIT {
        return Err(Error::Limit(format!(
            "{} cyclic orders of {n} elements exceed the enumeration limit n <= {ENUMERATION_LIMIT}; \
             use sampling with an explicit seed",
            factorial(n - 1)
        )));
    }
    Ok((2..=n)
        .permutations(n - 1)
        .map(|tail| {
            let mut arrangement = Vec::with_capacity(n);
            arrangement.push(1);
            arrangement.extend(tail);
            CyclicOrder { arrangement }
        })
        .collect())
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

fn check_order(fam: &SetFamily, order: &CyclicOrder) -> Result<()> {
    if order.n() != fam.n() {
        return Err(Error::domain(format!(
            "order has {} elements, family lives on n = {}",
            order.n(),
            fam.n()
        )));
    }
    Ok(())
}

/// Number of length-`k` arcs of the circle `order` that are members of `fam`.
pub fn trace(fam: &SetFamily, order: &CyclicOrder, k: usize) -> Result<usize> {
    check_order(fam, order)?;
    fam.ground().check_level(k)?;
    Ok((0..fam.n())
        .filter(|&s| fam.contains_mask(order.arc_elements(s, k)))
        .count())
}

/// Number of arcs of any length `1..n-1` of the circle `order` in `fam`.
pub fn multi_level_trace(fam: &SetFamily, order: &CyclicOrder) -> Result<usize> {
    check_order(fam, order)?;
    let n = fam.n();
    Ok((1..n)
        .map(|k| (0..n).filter(|&s| fam.contains_mask(order.arc_elements(s, k))).count())
        .sum())
}

fn check_uniform(fam: &SetFamily, k: usize) -> Result<()> {
    fam.ground().check_level(k)?;
    if fam.masks().any(|m| m.count_ones() as usize != k) {
        return Err(Error::domain(format!("family is not {k}-uniform")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageReport {
    pub n: usize,
    pub k: usize,
    pub orders: u128,
    /// Mean of `trace / n` over every cyclic order.
    #[serde(serialize_with = "ser_exact")]
    pub average: Rational,
    /// `|fam| / C(n, k)`, computed directly.
    #[serde(serialize_with = "ser_exact")]
    pub density: Rational,
    /// Largest trace over all orders.
    pub max_trace: usize,
    /// `max_trace / n`.
    #[serde(serialize_with = "ser_exact")]
    pub max_ratio: Rational,
}

pub(crate) fn ser_exact<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    Exact::from(r).serialize(s)
}

/// Exact mean of `trace(fam, order, k) / n` over all cyclic orders, together
/// with the largest trace.
pub fn exact_average(fam: &SetFamily, k: usize) -> Result<AverageReport> {
    check_uniform(fam, k)?;
    let n = fam.n();
    let orders = cyclic_orders(n)?;
    let (sum, max) = orders
        .par_iter()
        .map(|o| {
            let t = (0..n).filter(|&s| fam.contains_mask(o.arc_elements(s, k))).count();
            (t as u128, t)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    let count = orders.len() as u128;
    Ok(AverageReport {
        n,
        k,
        orders: count,
        average: rational(sum, count * n as u128),
        density: rational(fam.len() as u128, binomial(n, k)),
        max_trace: max,
        max_ratio: rational(max as u128, n as u128),
    })
}

/// `circle_bound * C(n, k) / n`: the level bound implied by a bound on
/// every circle.
pub fn lift_bound(circle_bound: u128, n: usize, k: usize) -> Result<Rational> {
    GroundSet::new(n)?;
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    Ok(rational(circle_bound * binomial(n, k), n as u128))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LymMode {
    /// `Σ 1 / C(n, |F|)` over members with `0 < |F| < n`.
    Standard,
    /// `Σ 1 / C(n-1, |F|-1)` over members with `|F| >= 1`.
    Shifted,
    /// `n · Σ 1 / C(n, |F|)`: the expected number of members that are arcs
    /// of a uniformly random circle.
    Circle,
}

impl std::str::FromStr for LymMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(LymMode::Standard),
            "shifted" => Ok(LymMode::Shifted),
            "circle" => Ok(LymMode::Circle),
            other => Err(Error::Parse(format!(
                "unknown LYM mode `{other}` (standard, shifted, circle)"
            ))),
        }
    }
}

pub fn lym_sum(fam: &SetFamily, mode: LymMode) -> Result<Rational> {
    let n = fam.n();
    let mut total = Rational::zero();
    for m in fam.masks() {
        let size = m.count_ones() as usize;
        let den = match mode {
            LymMode::Standard | LymMode::Circle => {
                if size == 0 || size == n {
                    return Err(Error::domain(format!(
                        "LYM sum needs 0 < |F| < n; found a member of size {size}"
                    )));
                }
                binomial(n, size)
            }
            LymMode::Shifted => {
                if size == 0 {
                    return Err(Error::domain("shifted LYM sum needs non-empty members"));
                }
                binomial(n - 1, size - 1)
            }
        };
        total += rational(1, den);
    }
    if mode == LymMode::Circle {
        total *= Rational::from_integer(BigInt::from(n));
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    /// Mean of the sampled `trace / n`; an estimate, not exact.
    #[serde(serialize_with = "ser_exact")]
    pub estimate: Rational,
    /// `|fam| / C(n, k)`.
    #[serde(serialize_with = "ser_exact")]
    pub exact: Rational,
    pub std_error: f64,
    pub max_trace_seen: usize,
}

/// Monte Carlo estimate of `|fam| / C(n, k)` from `trials` uniformly random
/// cyclic orders. Deterministic per seed.
pub fn sample_average(fam: &SetFamily, k: usize, trials: u64, seed: u64) -> Result<SampleReport> {
    check_uniform(fam, k)?;
    if trials == 0 {
        return Err(Error::domain("sampling needs at least one trial"));
    }
    let n = fam.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tail: Vec<usize> = (2..=n).collect();
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut max_seen = 0;
    for _ in 0..trials {
        tail.shuffle(&mut rng);
        let mut arrangement = Vec::with_capacity(n);
        arrangement.push(1);
        arrangement.extend_from_slice(&tail);
        let order = CyclicOrder { arrangement };
        let t = (0..n).filter(|&s| fam.contains_mask(order.arc_elements(s, k))).count();
        sum += t as u128;
        sum_sq += (t * t) as u128;
        max_seen = max_seen.max(t);
    }
    let m = trials as f64;
    let mean = sum as f64 / m;
    let var = if trials > 1 {
        ((sum_sq as f64) - m * mean * mean).max(0.0) / (m - 1.0)
    } else {
        0.0
    };
    Ok(SampleReport {
        n,
        k,
        trials,
        seed,
        estimate: rational(sum, trials as u128 * n as u128),
        exact: rational(fam.len() as u128, binomial(n, k)),
        std_error: (var / m).sqrt() / n as f64,
        max_trace_seen: max_seen,
    })
}

/// `1` as a [`Rational`].
pub fn one() -> Rational {
    Rational::one()
}
