//! Acceptance run: one PASS/FAIL line per criterion, exact arithmetic
//! throughout except the single sampling check. Criterion 18 is
//! informational and labelled as a conjecture.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use katona::averaging::{exact_average, lift_bound, lym_sum, rational, sample_average, LymMode, Rational};
use katona::circle::{full_mask, k_subsets};
use katona::{arc_mask, complement_family};
use katona::constructions::{b_set_mask, binomial};
use katona::operators::{lambda_components, set_shade, set_shadow, shade_immediate, shadow_immediate, shadow_iterated};
use katona::predicates::{is_intersecting, is_star, PredicateId as P};
use katona::search::certificates::{
    butterfly_decompose, find_partition, gronau_level_gap, injection_phi, matching_classes, partition_triples,
    TraceMembership,
};
use katona::search::{maximize, verify_bound, Levels, Measure, Params, Score, SearchConfig, SearchProblem, Slot, TheoremId};
use katona::{Arc, ArcFamily, GroundSet, SetFamily};
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
    /// Grid points where the criterion fails.
    failures: Vec<String>,
}

impl Outcome {
    fn from_failures(detail: impl Into<String>, failures: Vec<String>) -> Self {
        Outcome { pass: failures.is_empty(), detail: detail.into(), failures }
    }
}

fn g(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

fn int(v: usize) -> Score {
    Score::integer(v as i64)
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

/// Runs registry checks over a grid in parallel; each point must satisfy
/// `accept` and every claim of its entry.
fn registry_grid(
    id: TheoremId,
    points: Vec<Params>,
    accept: impl Fn(&Params, &katona::search::Verification) -> bool + Sync,
) -> (usize, Vec<String>) {
    let mut failures: Vec<String> = points
        .par_iter()
        .filter_map(|p| match verify_bound(id, p, &cfg()) {
            Ok(v) if v.ok() && accept(p, &v) => None,
            Ok(v) => Some(format!(
                "{p}: bound {} achieved {} claims {:?}",
                v.bound,
                v.achieved,
                v.claims.iter().filter(|c| !c.holds).map(|c| &c.name).collect::<Vec<_>>()
            )),
            Err(e) => Some(format!("{p}: {e}")),
        })
        .collect();
    failures.sort();
    (points.len(), failures)
}

fn c1_sperner() -> Outcome {
    let points = (3..=8).map(|n| Params::new().n(n)).collect();
    let (count, failures) = registry_grid(TheoremId::CircularSperner, points, |p, v| v.achieved == int(p.n.unwrap()));
    Outcome::from_failures(format!("{count} sizes, optimum n, extremal families are full levels"), failures)
}

/// All antichains among the proper non-empty subsets of `[n]`.
fn antichains(n: usize) -> Vec<Vec<u64>> {
    let sets: Vec<u64> = (1..n).flat_map(|l| k_subsets(n, l)).collect();
    let mut out = Vec::new();
    fn rec(i: usize, sets: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == sets.len() {
            out.push(cur.clone());
            return;
        }
        rec(i + 1, sets, cur, out);
        let x = sets[i];
        if cur.iter().all(|&y| x & !y != 0 && y & !x != 0) {
            cur.push(x);
            rec(i + 1, sets, cur, out);
            cur.pop();
        }
    }
    rec(0, &sets, &mut Vec::new(), &mut out);
    out
}

fn c2_lym() -> Outcome {
    let mut failures = Vec::new();
    let mut total = 0;
    for n in 3..=5 {
        for ac in antichains(n) {
            total += 1;
            let fam = SetFamily::from_masks(g(n), ac.iter().copied()).unwrap();
            let sum = lym_sum(&fam, LymMode::Standard).unwrap();
            let full_level = matches!(fam.uniform_size(), Ok(Some(l)) if fam.len() as u128 == binomial(n, l));
            if sum > Rational::one() || (sum == Rational::one()) != full_level {
                failures.push(format!("n={n} {ac:?}: sum {sum}"));
            }
        }
        match verify_bound(TheoremId::Lym, &Params::new().n(n), &cfg()) {
            Ok(v) if v.ok() && v.achieved == int(1) => {}
            other => failures.push(format!("n={n} search: {other:?}")),
        }
    }
    Outcome::from_failures(format!("{total} antichains, sum <= 1 with equality exactly at full levels"), failures)
}

/// `(k±1)`-arcs comparable to a member, by direct containment tests.
fn brute_neighbours(n: usize, heads: u64, k: usize, up: bool) -> usize {
    let members: Vec<u64> = (0..n).filter(|&h| heads >> h & 1 == 1).map(|h| arc_mask(n, h, k)).collect();
    let len = if up { k + 1 } else { k - 1 };
    (0..n)
        .filter(|&h| {
            let a = arc_mask(n, h, len);
            members.iter().any(|&m| if up { m & !a == 0 } else { a & !m == 0 })
        })
        .count()
}

fn c3_kruskal_katona() -> Outcome {
    let failures: Vec<String> = (3..=8usize)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut bad = Vec::new();
            for k in 1..n {
                for heads in 1..1u64 << n {
                    let b = ArcFamily::from_level(g(n), k, heads).unwrap();
                    let size = heads.count_ones() as usize;
                    for l in 1..n {
                        let s = shadow_iterated(&b, k, l).unwrap().len();
                        if s < n.min(size + l.abs_diff(k)) {
                            bad.push(format!("n={n} k={k} B={heads:#b} l={l}: {s}"));
                        }
                    }
                    if size == n {
                        continue;
                    }
                    let lambda = lambda_components(&b, k).unwrap().count;
                    if k + 1 < n {
                        let up = shade_immediate(&b, k).unwrap().len();
                        if up != size + lambda || up != brute_neighbours(n, heads, k, true) {
                            bad.push(format!("n={n} k={k} B={heads:#b}: shade {up}, lambda {lambda}"));
                        }
                    }
                    if k > 1 {
                        let down = shadow_immediate(&b, k).unwrap();
                        if down.len() != size + lambda || down.len() != brute_neighbours(n, heads, k, false) {
                            bad.push(format!("n={n} k={k} B={heads:#b}: shadow {}, lambda {lambda}", down.len()));
                        }
                        let dual = shade_immediate(&complement_family(&b), n - k).unwrap();
                        if complement_family(&down) != dual {
                            bad.push(format!("n={n} k={k} B={heads:#b}: complement of shadow differs from shade of complement"));
                        }
                    }
                }
            }
            bad
        })
        .collect();
    Outcome::from_failures("n = 3..8, every non-empty level subfamily", failures)
}

fn c4_normalized_shadows() -> Outcome {
    let n = 5;
    let mut failures = Vec::new();
    let mut count = 0;
    for k in 1..n {
        let level: Vec<u64> = k_subsets(n, k).collect();
        for pick in 1..1u64 << level.len() {
            count += 1;
            let fam = SetFamily::from_masks(g(n), (0..level.len()).filter(|&i| pick >> i & 1 == 1).map(|i| level[i])).unwrap();
            let alpha = rational(fam.len() as u128, binomial(n, k));
            let up = rational(set_shade(&fam).unwrap().len() as u128, binomial(n, k + 1));
            let down = rational(set_shadow(&fam).unwrap().len() as u128, binomial(n, k - 1));
            if up < alpha || down < alpha {
                failures.push(format!("k={k} pick={pick:#b}"));
            }
        }
    }
    Outcome::from_failures(format!("{count} subfamilies of the levels of 2^[5]"), failures)
}

fn c5_ekr() -> Outcome {
    let mut points = Vec::new();
    for k in 2..=6usize {
        for n in 2 * k..=12 {
            points.push((n, k));
        }
    }
    let failures: Vec<String> = points
        .par_iter()
        .filter_map(|&(n, k)| {
            let p = SearchProblem::single(n, Slot::arcs(k), P::Intersecting);
            let r = maximize(&p, &SearchConfig { max_witnesses: 1 << 12, ..cfg() }).unwrap();
            let stars = r.witnesses.iter().all(|w| is_star(&w.slots[0]).0);
            if r.optimum == Some(int(k)) && stars && r.extremal_count == 1 && r.extremal_count_complete {
                return None;
            }
            let non_star: Vec<ArcFamily> =
                r.witnesses.iter().filter(|w| !is_star(&w.slots[0]).0).map(|w| w.arcs(0).unwrap()).collect();
            // Independent recheck of every reported counterexample.
            let certified = r.optimum == Some(int(k))
                && !non_star.is_empty()
                && non_star.iter().all(|f| f.len() == k && f.single_level().unwrap() == Some(k) && is_intersecting(f) && !is_star(f).0);
            Some(format!(
                "n={n} k={k}: optimum {:?}, {} classes, non-star optimal {}{}",
                r.optimum.map(|s| s.to_string()),
                r.extremal_count,
                non_star.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
                if certified { " (certified)" } else { "" }
            ))
        })
        .collect();
    Outcome::from_failures(format!("{} points, optimum k and only stars", points.len()), failures)
}

fn c6_lift() -> Outcome {
    let mut failures = Vec::new();
    for k in 2..=6usize {
        for n in 2 * k..=12 {
            let lifted = lift_bound(k as u128, n, k).unwrap();
            if lifted != rational(binomial(n - 1, k - 1), 1) {
                failures.push(format!("n={n} k={k}: {lifted}"));
            }
        }
    }
    Outcome::from_failures("k C(n,k)/n = C(n-1,k-1) on the EKR grid", failures)
}

fn c7_cross_intersecting() -> Outcome {
    let mut points = Vec::new();
    for n in 2..=10usize {
        for k in 1..n {
            for l in 1..=n - k {
                points.push(Params::new().n(n).k(k).l(l));
            }
        }
    }
    let (count, failures) = registry_grid(TheoremId::CrossIntersecting, points, |p, v| {
        v.achieved == int(p.k.unwrap() + p.l.unwrap())
    });
    Outcome::from_failures(format!("{count} pairs (k, l), optimum k + l, runs when k + l < n"), failures)
}

fn nondecreasing(len: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in nondecreasing(len - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn c8_s_wise() -> Outcome {
    let mut failures = Vec::new();
    let mut counts = [0; 3];
    for s in 2..=4usize {
        let mut tuples = Vec::new();
        let mut unions = Vec::new();
        let mut inters = Vec::new();
        for n in s.max(2)..=8 {
            for ls in nondecreasing(s, 1, n - 1) {
                if ls.iter().sum::<usize>() >= n {
                    tuples.push(Params::new().n(n).ls(ls));
                }
            }
            for l in 1..n {
                if n <= s * l {
                    unions.push(Params::new().n(n).l(l).s(s));
                }
            }
            for k in 1..n {
                if (s - 1) * n >= s * k {
                    inters.push(Params::new().n(n).k(k).s(s));
                }
            }
        }
        let (a, fa) = registry_grid(TheoremId::CrossUnionTuple, tuples, |p, v| {
            let n = p.n.unwrap();
            v.achieved == int(p.ls.as_ref().unwrap().iter().map(|l| n - l).sum())
        });
        let (b, fb) = registry_grid(TheoremId::SWiseUnion, unions, |p, v| v.achieved == int(p.n.unwrap() - p.l.unwrap()));
        let (c, fc) = registry_grid(TheoremId::SWiseIntersecting, inters, |p, v| v.achieved == int(p.k.unwrap()));
        counts[0] += a;
        counts[1] += b;
        counts[2] += c;
        failures.extend(fa.into_iter().chain(fb).chain(fc).map(|f| format!("s={s} {f}")));
    }
    Outcome::from_failures(
        format!("{} tuples, {} s-wise union and {} s-wise intersecting instances", counts[0], counts[1], counts[2]),
        failures,
    )
}

fn c9_s_wise_antichain_lym() -> Outcome {
    match verify_bound(TheoremId::SWiseAntichainLym, &Params::new().n(6).s(3), &cfg()) {
        Ok(v) if v.ok() => Outcome::from_failures(format!("n=6 s=3 levels 1..4: max shifted sum {}", v.achieved), vec![]),
        Ok(v) => Outcome::from_failures("", vec![format!("max {} bound {}", v.achieved, v.bound)]),
        Err(e) => Outcome::from_failures("", vec![e.to_string()]),
    }
}

fn c10_hilton_milner() -> Outcome {
    let mut points = Vec::new();
    for k in 2..=5usize {
        for n in 2 * k..=12 {
            points.push(Params::new().n(n).k(k));
        }
    }
    let (count, failures) = registry_grid(TheoremId::CircularHm, points, |_, _| true);
    Outcome::from_failures(format!("{count} points, existence range, size 3k - n, empty triples, every M_pq tight"), failures)
}

/// Whether adding `x` to the butterfly-free `cur` creates a butterfly.
fn creates_butterfly(cur: &[u64], x: u64) -> bool {
    cur.iter().any(|&h| {
        let top = cur.iter().filter(|&&e| e != h && e & !(x & h) == 0).count() >= 2;
        let bottom = cur.iter().filter(|&&t| t != h && (x | h) & !t == 0).count() >= 2;
        top || bottom
    })
}

fn c11_chains_and_butterflies() -> Outcome {
    let mut failures = Vec::new();
    let mut points = Vec::new();
    for n in 3..=6usize {
        for l in 1..=3usize {
            points.push(Params::new().n(n).l(l));
        }
    }
    // For l = n the whole of A(n) is chain-free and smaller than ln.
    let (_, f) = registry_grid(TheoremId::ChainFree, points, |p, v| {
        let (n, l) = (p.n.unwrap(), p.l.unwrap());
        if l < n {
            v.achieved == int(l * n)
        } else {
            v.achieved == int(n * (n - 1))
        }
    });
    failures.extend(f);
    let (_, f) = registry_grid(TheoremId::Butterfly, (3..=6).map(|n| Params::new().n(n)).collect(), |p, v| {
        v.achieved.ratio() <= int(2 * p.n.unwrap()).ratio()
    });
    failures.extend(f);

    let n = 5;
    let arcs: Vec<(Arc, u64)> =
        (1..n).flat_map(|k| (0..n).map(move |h| (Arc::new(h + 1, k), arc_mask(n, h, k)))).collect();
    let mut families = 0u64;
    let mut bad = Vec::new();
    fn rec(i: usize, arcs: &[(Arc, u64)], cur: &mut Vec<usize>, masks: &mut Vec<u64>, families: &mut u64, bad: &mut Vec<String>) {
        if i == arcs.len() {
            *families += 1;
            let fam = ArcFamily::from_arcs(GroundSet::new(5).unwrap(), cur.iter().map(|&j| arcs[j].0)).unwrap();
            let below = |x: u64| masks.iter().any(|&y| y != x && y & !x == 0);
            let above = |x: u64| masks.iter().any(|&y| y != x && x & !y == 0);
            let p = masks.iter().filter(|&&x| !below(x)).count();
            let r = masks.iter().filter(|&&x| !above(x)).count();
            let q = masks.iter().filter(|&&x| below(x) && above(x)).count();
            match butterfly_decompose(&fam) {
                Ok(s) if s.holds() && (s.minimal.len(), s.middle.len(), s.maximal.len()) == (p, q, r) => {
                    if 2 * p + q > 10 || 2 * r + q > 10 {
                        bad.push(format!("{fam}: oracle counts violate the bounds"));
                    }
                }
                other => bad.push(format!("{fam}: {other:?}")),
            }
            return;
        }
        rec(i + 1, arcs, cur, masks, families, bad);
        if !creates_butterfly(masks, arcs[i].1) {
            cur.push(i);
            masks.push(arcs[i].1);
            rec(i + 1, arcs, cur, masks, families, bad);
            cur.pop();
            masks.pop();
        }
    }
    rec(0, &arcs, &mut Vec::new(), &mut Vec::new(), &mut families, &mut bad);
    bad.truncate(5);
    failures.extend(bad);
    Outcome::from_failures(
        format!("chain-free and butterfly-free n = 3..6; split bounds on all {families} butterfly-free families at n = 5"),
        failures,
    )
}

/// Best `(Σ_{j<s} |B_j|, |B_s|)` pairs over nested s-wise cross-intersecting
/// chains of `k`-arc families, by enumerating the depth of every arc.
fn nested_pairs(n: usize, k: usize, s: usize) -> BTreeSet<(usize, usize)> {
    let masks: Vec<u64> = (0..n).map(|h| arc_mask(n, h, k)).collect();
    let mut out = BTreeSet::new();
    let total = (s + 1).pow(n as u32);
    for code in 0..total {
        let mut depth = vec![0usize; n];
        let mut c = code;
        for d in depth.iter_mut() {
            *d = c % (s + 1);
            c /= s + 1;
        }
        let layer = |j: usize| -> Vec<u64> { (0..n).filter(|&h| depth[h] >= j).map(|h| masks[h]).collect() };
        let layers: Vec<Vec<u64>> = (1..=s).map(layer).collect();
        let ok = if s == 2 {
            layers[0].iter().all(|&a| layers[1].iter().all(|&b| a & b != 0))
        } else {
            layers[0]
                .iter()
                .all(|&a| layers[1].iter().all(|&b| layers[2].iter().all(|&c| a & b & c != 0)))
        };
        if ok {
            let head: usize = layers[..s - 1].iter().map(Vec::len).sum();
            out.insert((head, layers[s - 1].len()));
        }
    }
    out
}

fn c12_hilton_sums() -> Outcome {
    let cs: Vec<Score> = ["1", "2", "3", "5/2"].iter().map(|c| c.parse().unwrap()).collect();
    let mut jobs = Vec::new();
    for s in 2..=3usize {
        for n in 2..=8usize {
            for k in 1..n {
                if (s - 1) * n >= s * k {
                    jobs.push((s, n, k));
                }
            }
        }
    }
    let results: Vec<Vec<String>> = jobs
        .par_iter()
        .map(|&(s, n, k)| {
            let pairs = nested_pairs(n, k, s);
            let mut bad = Vec::new();
            for &c in &cs {
                let oracle = pairs.iter().map(|&(a, b)| c.ratio() * b as i64 + a as i64).max().unwrap();
                let formula = std::cmp::max(
                    num_rational::Ratio::from_integer(((s - 1) * n) as i64),
                    (c.ratio() + (s as i64 - 1)) * k as i64,
                );
                let p = Params::new().n(n).k(k).s(s).c(c);
                match verify_bound(TheoremId::HiltonNested, &p, &cfg()) {
                    Ok(v) if v.achieved.ratio() == oracle && oracle == formula && v.ok() => {}
                    Ok(v) => bad.push(format!("{p}: search {} oracle {oracle} formula {formula}", v.achieved)),
                    Err(e) => bad.push(format!("{p}: {e}")),
                }
            }
            bad
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Outcome::from_failures(
        format!("{} instances, search = brute force = max{{(s-1)n, (s-1+c)k}}", jobs.len() * cs.len()),
        failures,
    )
}

fn membership_masks(n: usize, k: usize) -> Vec<(u8, usize, u64)> {
    (0..n)
        .flat_map(|i| [(0u8, i, arc_mask(n, i, k - 1)), (1, i, arc_mask(n, i, k)), (2, i, b_set_mask(n, k, i + 1))])
        .collect()
}

fn to_membership(items: &[(u8, usize, u64)]) -> TraceMembership {
    let mut m = TraceMembership::default();
    for &(kind, i, _) in items {
        let word = match kind {
            0 => &mut m.short,
            1 => &mut m.arcs,
            _ => &mut m.b_sets,
        };
        *word |= 1 << i;
    }
    m
}

fn c13_injection() -> Outcome {
    let mut failures = Vec::new();
    let (n, k) = (5, 2);
    let all = membership_masks(n, k);
    let mut admissible = 0;
    for code in 0u32..1 << all.len() {
        let items: Vec<_> = (0..all.len()).filter(|&j| code >> j & 1 == 1).map(|j| all[j]).collect();
        let masks: Vec<u64> = items.iter().map(|t| t.2).collect();
        if find_partition(n, &masks).is_some() {
            continue;
        }
        admissible += 1;
        match injection_phi(n, k, to_membership(&items)) {
            Ok(r) if r.holds() && r.trace == items.len() => {}
            other => failures.push(format!("k=2 code {code:#b}: {other:?}")),
        }
    }

    let (n, k) = (8, 3);
    let all = membership_masks(n, k);
    let full = full_mask(n);
    let trials = 100_000u64;
    let bad: Vec<String> = (0..trials)
        .into_par_iter()
        .filter_map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ t);
            let mut order = all.clone();
            order.shuffle(&mut rng);
            let target = rng.gen_range(0..=all.len());
            let mut chosen: Vec<(u8, usize, u64)> = Vec::new();
            for item in order {
                if chosen.len() == target {
                    break;
                }
                let x = item.2;
                let closes = chosen.iter().enumerate().any(|(a, ca)| {
                    ca.2 & x == 0
                        && chosen[a + 1..].iter().any(|cb| cb.2 & (x | ca.2) == 0 && (x | ca.2 | cb.2) == full)
                });
                if !closes {
                    chosen.push(item);
                }
            }
            match injection_phi(n, k, to_membership(&chosen)) {
                Ok(r) if r.holds() => None,
                other => Some(format!("k=3 trial {t}: {other:?}")),
            }
        })
        .collect();
    failures.extend(bad.into_iter().take(5));
    Outcome::from_failures(
        format!("{admissible} admissible memberships at k = 2; {trials} seeded random ones at k = 3"),
        failures,
    )
}

fn c14_matching() -> Outcome {
    let mut points = Vec::new();
    for n in 2..=12usize {
        for k in 1..=4usize {
            for r in 1..=3usize {
                if n >= k * (r + 1) {
                    points.push(Params::new().n(n).k(k).r(r));
                }
            }
        }
    }
    let count = points.len();
    let (_, mut failures) =
        registry_grid(TheoremId::CircularEmc, points.clone(), |p, v| v.achieved == int(p.k.unwrap() * p.r.unwrap()));

    let mut rng = ChaCha8Rng::seed_from_u64(94);
    for p in &points {
        let (n, k, r) = (p.n.unwrap(), p.k.unwrap(), p.r.unwrap());
        for _ in 0..20 {
            let mut heads: Vec<usize> = (1..=n).collect();
            heads.shuffle(&mut rng);
            heads.truncate(k * (r + 1));
            if let Err(e) = matching_classes(n, k, r, &heads) {
                failures.push(format!("{p} heads {heads:?}: {e}"));
            }
        }
    }
    let (_, f) = registry_grid(TheoremId::CircularEmcNonuniform, (4..=6).map(|n| Params::new().n(n)).collect(), |_, _| true);
    failures.extend(f);
    for n in 7..=30 {
        if let Err(e) = partition_triples(n).verify() {
            failures.push(format!("partition triples n={n}: {e}"));
        }
    }
    Outcome::from_failures(
        format!("{count} uniform points with optimum kr, class decomposition, non-uniform n = 4..6, triples n = 7..30"),
        failures,
    )
}

fn c15_cross_union_sums() -> Outcome {
    let r = 3;
    let mut points = Vec::new();
    for n in 6..=9usize {
        for k in n.div_ceil(r - 1)..=(r - 1) * n / r {
            points.push(Params::new().n(n).k(k).r(r));
        }
    }
    let (count, failures) = registry_grid(TheoremId::CrossUnionSum, points, |p, v| {
        v.achieved.ratio() <= int(r * (p.n.unwrap() - p.k.unwrap())).ratio()
    });
    Outcome::from_failures(format!("{count} points, sum <= r(n - k)"), failures)
}

fn c16_iu_gronau() -> Outcome {
    let sizes: Vec<Params> = (3..=8).map(|n| Params::new().n(n)).collect();
    let (_, mut failures) =
        registry_grid(TheoremId::IuCircle, sizes.clone(), |p, v| v.achieved == int((p.n.unwrap() / 2) * p.n.unwrap().div_ceil(2)));
    let (_, f) = registry_grid(TheoremId::GronauCircle, sizes, |p, v| {
        v.achieved.ratio() <= int((p.n.unwrap() / 2) * p.n.unwrap().div_ceil(2)).ratio()
    });
    failures.extend(f);
    let mut checked = 0;
    for n in [6, 8] {
        match gronau_level_gap(n) {
            Ok(r) if r.violation.is_none() => checked += r.families,
            other => failures.push(format!("level gap n={n}: {other:?}")),
        }
    }
    Outcome::from_failures(
        format!("IU optimum and antipodal uniqueness, Gronau bound, level gap on {checked} middle-level families"),
        failures,
    )
}

fn c17_averaging() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [5usize, 6] {
        for k in 1..n {
            let level: Vec<u64> = k_subsets(n, k).collect();
            for _ in 0..100 {
                let fam = SetFamily::from_masks(g(n), level.iter().copied().filter(|_| rng.gen_bool(0.5))).unwrap();
                let want = rational(fam.len() as u128, binomial(n, k));
                let got = exact_average(&fam, k).unwrap().average;
                if got != want {
                    failures.push(format!("n={n} k={k}: {got} != {want}"));
                }
            }
        }
    }
    let (n, k) = (12, 5);
    let fam = SetFamily::from_masks(g(n), k_subsets(n, k).filter(|m| m & 0b111 != 0)).unwrap();
    let s = sample_average(&fam, k, 20_000, 2024).unwrap();
    let diff = (katona::averaging::to_f64(&s.estimate) - katona::averaging::to_f64(&s.exact)).abs();
    if diff > 3.0 * s.std_error {
        failures.push(format!("sample at n=12: |{diff}| > 3 * {}", s.std_error));
    }
    Outcome::from_failures(
        format!("exact averages at n = 5, 6; sampled n = 12 within {:.2} standard errors", diff / s.std_error),
        failures,
    )
}

fn c18_conjecture() -> String {
    let mut parts = Vec::new();
    for n in 3..=5 {
        let p = SearchProblem::single(n, Slot::Subsets(Levels::Range([1, n - 1])), P::Iu).with_measure(Measure::Lym);
        let r = maximize(&p, &SearchConfig::optimum_only()).unwrap();
        let best = r.optimum.unwrap();
        let target = Score::new(n as i64 + 1, 6);
        parts.push(format!("n={n}: max {best} vs (n+1)/6 = {target}{}", if best.ratio() <= target.ratio() { "" } else { " (exceeds)" }));
    }
    parts.join("; ")
}

const TARGETS: [(u32, &str, u64); 17] = [
    (1, "circular Sperner", 60),
    (2, "LYM", 60),
    (3, "circular Kruskal-Katona and component law", 30),
    (4, "normalized shadow monotonicity", 60),
    (5, "circular EKR with star uniqueness", 30),
    (6, "EKR lift", 60),
    (7, "cross-intersecting pairs", 600),
    (8, "s-wise union and intersecting", 300),
    (9, "s-wise intersecting antichains", 600),
    (10, "circular Hilton-Milner", 60),
    (11, "chain-free and butterfly-free", 600),
    (12, "nested Hilton sums", 300),
    (13, "injection into missing sets", 300),
    (14, "circular matching bounds", 900),
    (15, "cross-union sums", 900),
    (16, "IU and Gronau", 600),
    (17, "averaging identity", 60),
];

fn run(id: u32) -> Outcome {
    match id {
        1 => c1_sperner(),
        2 => c2_lym(),
        3 => c3_kruskal_katona(),
        4 => c4_normalized_shadows(),
        5 => c5_ekr(),
        6 => c6_lift(),
        7 => c7_cross_intersecting(),
        8 => c8_s_wise(),
        9 => c9_s_wise_antichain_lym(),
        10 => c10_hilton_milner(),
        11 => c11_chains_and_butterflies(),
        12 => c12_hilton_sums(),
        13 => c13_injection(),
        14 => c14_matching(),
        15 => c15_cross_union_sums(),
        16 => c16_iu_gronau(),
        17 => c17_averaging(),
        _ => unreachable!(),
    }
}

/// Criterion 5 asks for star uniqueness down to n = 2k. At n = 2k with
/// k >= 3 the arcs with heads 1, k, 2k-1 (and similar) form a non-star
/// intersecting family of size k, so those points fail by necessity. The
/// run is accepted only if the failures are exactly these points and each
/// reported non-star family is re-verified here.
fn known_failure(id: u32, out: &Outcome) -> bool {
    if id != 5 {
        return false;
    }
    let expected: Vec<String> = (3..=6).map(|k| format!("n={} k={k}:", 2 * k)).collect();
    out.failures.len() == expected.len()
        && out.failures.iter().zip(&expected).all(|(f, e)| f.starts_with(e.as_str()) && f.ends_with("(certified)"))
        && (3..=6).all(|k| {
            let n = 2 * k;
            let mut fam = ArcFamily::from_arcs(g(n), [Arc::new(1, k), Arc::new(k, k), Arc::new(2 * k - 1, k)]).unwrap();
            for h in 2..k - 1 {
                fam.insert(Arc::new(h, k)).unwrap();
            }
            fam.len() == k && is_intersecting(&fam) && !is_star(&fam).0
        })
}

fn main() -> ExitCode {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut unexpected = Vec::new();
    let mut total = Duration::ZERO;
    for (id, name, limit) in TARGETS {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let out = run(id);
        let took = start.elapsed();
        total += took;
        let in_time = took.as_secs() < limit;
        let pass = out.pass && in_time;
        let note = if !in_time { format!(" (over the {limit}s target)") } else { String::new() };
        println!(
            "criterion {id:>2} {}: {name}: {}; {:.2}s{note}",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        for f in out.failures.iter().take(8) {
            println!("    {f}");
        }
        if !pass {
            if in_time && known_failure(id, &out) {
                println!("    expected: star uniqueness needs n > 2k; the non-star families above are intersecting of size k");
            } else {
                unexpected.push(id);
            }
        }
    }
    if only.is_none_or(|o| o == 18) {
        println!("criterion 18 INFO (conjecture): largest LYM sum of an IU family: {}", c18_conjecture());
    }
    println!("total {:.2}s", total.as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
