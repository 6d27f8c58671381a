//! Enumerations checked against naive search over all functions.

use std::collections::BTreeSet;

use isokit_core::fincat::aut_identity_functor;
use isokit_core::fingroup::{automorphism_group, center, limit_of_diagram};
use isokit_core::presheaf::nat_auts;
use isokit_core::{homomorphisms, isotropy_group, FinCategory, FinGroup, GroupHom, GroupPresheaf};
use proptest::prelude::*;

fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|f| (0..m).map(move |v| [f.clone(), vec![v]].concat())).collect();
    }
    out
}

fn is_hom(f: &[usize], g: &FinGroup, h: &FinGroup) -> bool {
    g.elements().all(|a| g.elements().all(|b| f[g.mul(a, b)] == h.mul(f[a], f[b])))
}

fn small_groups() -> Vec<FinGroup> {
    vec![
        FinGroup::trivial(),
        FinGroup::cyclic(2),
        FinGroup::cyclic(3),
        FinGroup::cyclic(4),
        FinGroup::product(&FinGroup::cyclic(2), &FinGroup::cyclic(2)),
        FinGroup::symmetric(3),
    ]
}

#[test]
fn homomorphisms_match_filtered_functions() {
    for g in small_groups() {
        for h in small_groups() {
            let brute: BTreeSet<Vec<usize>> =
                all_functions(g.order(), h.order()).into_iter().filter(|f| is_hom(f, &g, &h)).collect();
            let got: BTreeSet<Vec<usize>> = homomorphisms(&g, &h).into_iter().map(|x| x.0).collect();
            assert_eq!(got, brute, "|G|={} |H|={}", g.order(), h.order());
        }
    }
}

#[test]
fn automorphisms_match_bijective_homs() {
    for g in small_groups() {
        let brute = all_functions(g.order(), g.order())
            .into_iter()
            .filter(|f| is_hom(f, &g, &g) && f.iter().collect::<BTreeSet<_>>().len() == g.order())
            .count();
        assert_eq!(automorphism_group(&g).order(), brute);
    }
}

#[test]
fn center_matches_commuting_elements() {
    for g in small_groups().into_iter().chain([FinGroup::dihedral(4), FinGroup::symmetric(4)]) {
        let brute: Vec<usize> = g.elements().filter(|&z| g.elements().all(|x| g.mul(z, x) == g.mul(x, z))).collect();
        assert_eq!(center(&g), brute);
    }
}

fn tuples(p: &GroupPresheaf) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for o in p.base().object_ids() {
        let n = p.group(o).order();
        out = out.into_iter().flat_map(|t| (0..n).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

fn brute_limit(p: &GroupPresheaf) -> usize {
    let c = p.base();
    tuples(p).into_iter().filter(|t| c.morphism_ids().all(|m| p.map(m).apply(t[c.dom(m)]) == t[c.cod(m)])).count()
}

fn brute_nat_auts(p: &GroupPresheaf) -> usize {
    let c = p.base();
    let per_object: Vec<Vec<GroupHom>> = c.object_ids().map(|o| automorphism_group(p.group(o)).members().to_vec()).collect();
    let mut families: Vec<Vec<GroupHom>> = vec![vec![]];
    for auts in &per_object {
        families = families.into_iter().flat_map(|f| auts.iter().map(move |a| [f.clone(), vec![a.clone()]].concat())).collect();
    }
    families
        .into_iter()
        .filter(|fam| c.morphism_ids().all(|m| p.map(m).compose(&fam[c.dom(m)]) == fam[c.cod(m)].compose(p.map(m))))
        .count()
}

fn presheaf_over_arrow(a: FinGroup, b: FinGroup, h: GroupHom) -> GroupPresheaf {
    let base = FinCategory::arrow();
    let groups = vec![a, b];
    let maps = base
        .morphism_ids()
        .map(|m| if base.is_identity(m) { GroupHom::identity(groups[base.dom(m)].order()) } else { h.clone() })
        .collect();
    GroupPresheaf::new(base, groups, maps).unwrap()
}

#[test]
fn limits_and_nat_auts_over_the_arrow() {
    for a in small_groups() {
        for b in small_groups() {
            for h in homomorphisms(&a, &b) {
                let p = presheaf_over_arrow(a.clone(), b.clone(), h);
                assert_eq!(limit_of_diagram(&p).order(), brute_limit(&p));
                assert_eq!(nat_auts(&p).order(), brute_nat_auts(&p));
                let z = isotropy_group(&p);
                assert_eq!(z.order(), brute_limit(&p) * aut_identity_functor(p.base()).order());
            }
        }
    }
}

fn involution_presheaf(g: FinGroup, pick: usize) -> GroupPresheaf {
    let invols: Vec<GroupHom> =
        automorphism_group(&g).members().iter().filter(|a| a.compose(a).is_identity()).cloned().collect();
    let tau = invols[pick % invols.len()].clone();
    let base = FinCategory::one_object(&FinGroup::cyclic(2));
    let maps = base.morphism_ids().map(|m| if base.is_identity(m) { GroupHom::identity(g.order()) } else { tau.clone() }).collect();
    GroupPresheaf::new(base, vec![g], maps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn isotropy_order_is_fixed_points_times_two(gi in 0usize..6, pick in 0usize..8) {
        let p = involution_presheaf(small_groups().swap_remove(gi), pick);
        // the limit of a group with an involution is its fixed subgroup
        let fixed = p.group(0).elements().filter(|&x| p.maps().iter().all(|m| m.apply(x) == x)).count();
        prop_assert_eq!(limit_of_diagram(&p).order(), fixed);
        prop_assert_eq!(isotropy_group(&p).order(), fixed * 2);
        prop_assert_eq!(nat_auts(&p).order(), brute_nat_auts(&p));
    }

    #[test]
    fn nat_auts_form_a_group(gi in 0usize..6, pick in 0usize..8) {
        let p = involution_presheaf(small_groups().swap_remove(gi), pick);
        let auts = nat_auts(&p);
        let set: BTreeSet<_> = auts.members().iter().cloned().collect();
        for a in auts.members() {
            prop_assert!(set.contains(&a.inverse().unwrap()));
            for b in auts.members() {
                prop_assert!(set.contains(&a.compose(b)));
            }
        }
    }
}
