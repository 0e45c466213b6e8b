use katona::averaging::{exact_average, lym_sum, rational, LymMode};
use katona::constructions::binomial;
use katona::operators::{lambda_components, shade_immediate, shadow_immediate};
use katona::predicates::{contains_butterfly, is_antichain, is_intersecting, is_iu, is_star, matching_number, PredicateId};
use katona::{complement_family, symmetry_orbit, ArcFamily, GroundSet, SetFamily};
use proptest::prelude::*;

/// A family drawn from every arc level of `A(n)`.
fn arc_family() -> impl Strategy<Value = ArcFamily> {
    (3usize..=12).prop_flat_map(|n| {
        proptest::collection::vec(any::<u64>(), n - 1).prop_map(move |words| {
            let g = GroundSet::new(n).unwrap();
            let mut fam = ArcFamily::empty(g);
            for (k, w) in (1..n).zip(words) {
                fam.set_level(k, w & g.full_mask()).unwrap();
            }
            fam
        })
    })
}

fn level_family() -> impl Strategy<Value = (ArcFamily, usize)> {
    (3usize..=16, any::<u64>(), any::<usize>()).prop_map(|(n, heads, k)| {
        let g = GroundSet::new(n).unwrap();
        let k = 1 + k % (n - 1);
        (ArcFamily::from_level(g, k, heads & g.full_mask()).unwrap(), k)
    })
}

fn predicates() -> Vec<PredicateId> {
    PredicateId::catalogue().into_iter().filter(|p| !p.is_cross()).collect()
}

proptest! {
    #[test]
    fn predicates_are_dihedral_invariant(fam in arc_family(), by in 0usize..16) {
        let moved = fam.rotated(by % fam.n());
        let flipped = fam.reflected();
        for p in predicates() {
            let v = p.holds(&fam).unwrap();
            prop_assert_eq!(v, p.holds(&moved).unwrap(), "{:?}", p);
            prop_assert_eq!(v, p.holds(&flipped).unwrap(), "{:?}", p);
        }
        prop_assert_eq!(matching_number(&fam).unwrap(), matching_number(&moved).unwrap());
    }

    #[test]
    fn canonical_form_is_a_class_invariant(fam in arc_family(), by in 0usize..16) {
        let c = symmetry_orbit(&fam, true);
        prop_assert_eq!(&c, &symmetry_orbit(&fam.rotated(by % fam.n()), true));
        prop_assert_eq!(&c, &symmetry_orbit(&fam.reflected(), true));
        prop_assert_eq!(&c, &symmetry_orbit(&c, true));
        prop_assert_eq!(c.len(), fam.len());
    }

    #[test]
    fn complement_is_an_involution(fam in arc_family()) {
        prop_assert_eq!(complement_family(&complement_family(&fam)), fam);
    }

    #[test]
    fn shade_and_shadow_grow_by_the_component_count((fam, k) in level_family()) {
        let n = fam.n();
        let size = fam.len();
        prop_assume!(size > 0 && size < n);
        let lambda = lambda_components(&fam, k).unwrap().count;
        prop_assert!(lambda >= 1);
        if k + 1 < n {
            prop_assert_eq!(shade_immediate(&fam, k).unwrap().len(), size + lambda);
        }
        if k > 1 {
            prop_assert_eq!(shadow_immediate(&fam, k).unwrap().len(), size + lambda);
        }
    }

    #[test]
    fn hierarchy_of_predicates((fam, _k) in level_family()) {
        if is_star(&fam).0 {
            prop_assert!(is_intersecting(&fam));
        }
        if is_iu(&fam) {
            prop_assert!(is_intersecting(&fam));
        }
        prop_assert!(is_antichain(&fam));
        prop_assert!(!contains_butterfly(&fam));
        prop_assert_eq!(matching_number(&fam).unwrap() <= 1, is_intersecting(&fam) || fam.is_empty());
    }

    #[test]
    fn circle_lym_is_n_times_standard(fam in arc_family()) {
        let n = fam.n();
        let sets = SetFamily::from_masks(fam.ground(), fam.point_sets().iter().map(|p| p.bits())).unwrap();
        let standard = lym_sum(&sets, LymMode::Standard).unwrap();
        let circle = lym_sum(&sets, LymMode::Circle).unwrap();
        prop_assert_eq!(circle, standard * rational(n as u128, 1));
    }

    #[test]
    fn average_trace_is_the_density(n in 4usize..=7, k in 1usize..6, picks in any::<u64>()) {
        prop_assume!(k < n);
        let g = GroundSet::new(n).unwrap();
        let level: Vec<u64> = katona::circle::k_subsets(n, k).collect();
        let fam = SetFamily::from_masks(g, level.iter().enumerate().filter(|(i, _)| picks >> (i % 64) & 1 == 1).map(|(_, &m)| m)).unwrap();
        let report = exact_average(&fam, k).unwrap();
        prop_assert_eq!(report.average, rational(fam.len() as u128, binomial(n, k)));
    }
}
