//! Randomized law checks over one presheaf. Each runner returns how many
//! cases it looked at and the first few failures as text.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use isokit_core::alpha::{Shape, Strategy, TermId, TermStore};
use isokit_core::isotropy::{evaluate_at, isotropy_group, Slice};
use isokit_core::tj::ModelFunctor;
use isokit_core::{GroupPresheaf, ObjId};

use crate::sexpr::print_alpha;

const MAX_REPORTED: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub cases: usize,
    pub failures: usize,
    pub examples: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.examples.len() < MAX_REPORTED {
            self.examples.push(what);
        }
    }
}

/// `π_{e·e′} = π_e ∘ π_{e′}` at every arrow of the automorphism slice and
/// every object, for `pairs` random pairs.
pub fn group_law(presheaf: &GroupPresheaf, pairs: usize, rng: &mut ChaCha8Rng) -> LawReport {
    let z = isotropy_group(presheaf);
    let slice = Slice::automorphisms(presheaf);
    let mut report = LawReport::default();
    for _ in 0..pairs {
        let a = &z.members()[rng.gen_range(0..z.order())];
        let b = &z.members()[rng.gen_range(0..z.order())];
        let ab = a.product(b, presheaf);
        for (n, arrow) in slice.arrows().iter().enumerate() {
            for k in presheaf.base().object_ids() {
                report.cases += 1;
                let lhs = evaluate_at(&ab, presheaf, &arrow.trans, k).expect("object in range");
                let rhs = evaluate_at(a, presheaf, &arrow.trans, k)
                    .expect("object in range")
                    .compose(&evaluate_at(b, presheaf, &arrow.trans, k).expect("object in range"));
                if lhs != rhs {
                    report.fail(format!("{a:?} · {b:?} along arrow #{n} at object #{k}"));
                }
            }
        }
    }
    report
}

fn random_pick(rng: &mut ChaCha8Rng) -> impl FnMut(usize) -> usize + '_ {
    move |n| rng.gen_range(0..n)
}

/// Every `(sort, object)` pair.
fn sorted_objects(f: &ModelFunctor) -> Vec<(usize, ObjId)> {
    let sorts = f.signature().sorts().len();
    f.category().object_ids().flat_map(|i| (0..sorts).map(move |a| (a, i))).collect()
}

fn draw(store: &mut TermStore<'_>, rng: &mut ChaCha8Rng, shape: &Shape) -> Option<TermId> {
    // a few retries for sorts without short closed terms
    (0..8).find_map(|_| store.generate(&mut random_pick(rng), shape))
}

/// Termination (strictly decreasing measure) and agreement of two
/// strategies with the memoized normalizer on `terms` random terms.
pub fn rewrite_confluence(functor: &ModelFunctor, terms: usize, depth: usize, rng: &mut ChaCha8Rng) -> LawReport {
    let slots = sorted_objects(functor);
    let cat = functor.category();
    let mut store = TermStore::new(functor);
    let mut report = LawReport::default();
    for _ in 0..terms {
        let indet = slots[rng.gen_range(0..slots.len())];
        let targets: Vec<_> = slots.iter().copied().filter(|&(_, k)| cat.hom(indet.1, k).next().is_some()).collect();
        let target = targets[rng.gen_range(0..targets.len())];
        let shape = Shape { indet, target, depth, restricted: false, local: false };
        let Some(t) = draw(&mut store, rng, &shape) else { continue };
        report.cases += 1;
        let fast = store.normalize(t);
        let li = store.normalize_with(t, Strategy::LeftmostInnermost);
        let ro = store.normalize_with(t, Strategy::RightmostOutermost);
        let ok = li.strictly_decreasing
            && ro.strictly_decreasing
            && li.normal_form == fast
            && ro.normal_form == fast
            && store.is_alpha_restricted(fast);
        if !ok {
            report.fail(print_alpha(&store, t));
        }
    }
    report
}

/// A random `i`-local α-restricted term over `x_{A^i}`.
fn local_term(store: &mut TermStore<'_>, rng: &mut ChaCha8Rng, slots: &[(usize, ObjId)], depth: usize) -> Option<TermId> {
    let (a, i) = slots[rng.gen_range(0..slots.len())];
    let sorts = store.functor().signature().sorts().len();
    let target = (rng.gen_range(0..sorts), i);
    draw(store, rng, &Shape { indet: (a, i), target, depth, restricted: true, local: true })
}

/// `θ*(u[f]) = θ*(u)` for random `i`-local `u` and `f: j → i`.
pub fn bracket_invisible(functor: &ModelFunctor, terms: usize, depth: usize, rng: &mut ChaCha8Rng) -> LawReport {
    let slots = sorted_objects(functor);
    let cat = functor.category();
    let mut store = TermStore::new(functor);
    let mut report = LawReport::default();
    for _ in 0..terms {
        let Some(u) = local_term(&mut store, rng, &slots, depth) else { continue };
        let i = store.sort(u).1;
        let into: Vec<_> = cat.into(i).collect();
        let f = into[rng.gen_range(0..into.len())];
        report.cases += 1;
        let b = store.bracket(u, f).expect("local restricted term");
        if store.theta_star(u).ok() != store.theta_star(b).ok() {
            report.fail(format!("{} along {}", print_alpha(&store, u), cat.morphism_name(f)));
        }
    }
    report
}

/// `ρ(θ*(u)) = u^{−α}` for random `i`-local `u`.
pub fn embedding_erases_alpha(functor: &ModelFunctor, terms: usize, depth: usize, rng: &mut ChaCha8Rng) -> LawReport {
    let slots = sorted_objects(functor);
    let mut store = TermStore::new(functor);
    let mut report = LawReport::default();
    for _ in 0..terms {
        let Some(u) = local_term(&mut store, rng, &slots, depth) else { continue };
        report.cases += 1;
        let back = store.theta_star(u).expect("restricted single-indeterminate term");
        let lhs = store.embed(&back).expect("subscript-free");
        let rhs = store.alpha_free(u).expect("local restricted term");
        if lhs != rhs {
            report.fail(print_alpha(&store, u));
        }
    }
    report
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TransportReport {
    /// `x_g ∈ θ(v) ⇒ x_{f∘g} ∈ θ(v^f)`
    pub forward: LawReport,
    /// the converse, on triples where `f` is left-cancellable on `Hom(i, k)`
    pub backward: LawReport,
    /// triples skipped for the converse because `f` is not cancellable there
    pub backward_skipped: usize,
}

/// Indeterminate transport along an endomorphism `f` of `k`, on random
/// triples `(v, f, g)` with `v` α-restricted at `k` over `x_{A^i}` and
/// `g: i → k`.
pub fn indeterminate_transport(functor: &ModelFunctor, triples: usize, depth: usize, rng: &mut ChaCha8Rng) -> TransportReport {
    let cat = functor.category();
    let sorts = functor.signature().sorts().len();
    let pairs: Vec<(ObjId, ObjId)> = cat
        .object_ids()
        .flat_map(|i| cat.object_ids().map(move |k| (i, k)))
        .filter(|&(i, k)| cat.hom(i, k).next().is_some())
        .collect();
    let mut store = TermStore::new(functor);
    let mut report = TransportReport::default();
    let mut drawn = 0;
    while drawn < triples {
        let (i, k) = pairs[rng.gen_range(0..pairs.len())];
        let shape = Shape { indet: (rng.gen_range(0..sorts), i), target: (rng.gen_range(0..sorts), k), depth, restricted: true, local: false };
        let Some(v) = draw(&mut store, rng, &shape) else { continue };
        drawn += 1;
        let endos: Vec<_> = cat.endomorphisms(k).collect();
        let f = endos[rng.gen_range(0..endos.len())];
        let homs: Vec<_> = cat.hom(i, k).collect();
        let g = homs[rng.gen_range(0..homs.len())];
        let fg = cat.compose(f, g).expect("typed composite");
        let vf = store.push(v, f).expect("restricted term");
        let before = store.theta(v).expect("restricted term").body.subscripts();
        let after = store.theta(vf).expect("pushed term is restricted").body.subscripts();
        let (has_g, has_fg) = (before.contains(&g), after.contains(&fg));
        let label = || format!("v = {}, f = {}, g = {}", print_alpha(&store, v), cat.morphism_name(f), cat.morphism_name(g));
        report.forward.cases += 1;
        if has_g && !has_fg {
            report.forward.fail(label());
        }
        let cancellable = homs.iter().all(|&h| h == g || cat.compose(f, h) != Some(fg));
        if cancellable {
            report.backward.cases += 1;
            if has_fg && !has_g {
                report.backward.fail(label());
            }
        } else {
            report.backward_skipped += 1;
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresheafLaws {
    pub group_law: LawReport,
    pub rewrite_confluence: LawReport,
    pub bracket_invisible: LawReport,
    pub embedding_erases_alpha: LawReport,
    pub indeterminate_transport: TransportReport,
}

impl PresheafLaws {
    pub fn passed(&self) -> bool {
        self.group_law.passed()
            && self.rewrite_confluence.passed()
            && self.bracket_invisible.passed()
            && self.embedding_erases_alpha.passed()
            && self.indeterminate_transport.forward.passed()
            && self.indeterminate_transport.backward.passed()
    }
}

/// Sample sizes for [`all_laws`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Samples {
    pub pairs: usize,
    pub terms: usize,
    pub local_terms: usize,
    pub triples: usize,
    pub depth: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples { pairs: 100, terms: 1000, local_terms: 500, triples: 200, depth: 6 }
    }
}

pub fn all_laws(presheaf: &GroupPresheaf, samples: Samples, seed: u64) -> PresheafLaws {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let functor = ModelFunctor::from_presheaf(presheaf);
    PresheafLaws {
        group_law: group_law(presheaf, samples.pairs, &mut rng),
        rewrite_confluence: rewrite_confluence(&functor, samples.terms, samples.depth, &mut rng),
        bracket_invisible: bracket_invisible(&functor, samples.local_terms, samples.depth, &mut rng),
        embedding_erases_alpha: embedding_erases_alpha(&functor, samples.local_terms, samples.depth, &mut rng),
        indeterminate_transport: indeterminate_transport(&functor, samples.triples, samples.depth, &mut rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use isokit_core::{FinCategory, FinGroup, GroupHom};

    fn inverting_z5() -> GroupPresheaf {
        let z5 = FinGroup::cyclic(5);
        let inv = GroupHom(z5.elements().map(|a| z5.inv(a)).collect());
        GroupPresheaf::new(FinCategory::one_object(&FinGroup::cyclic(2)), vec![z5], vec![GroupHom::identity(5), inv]).unwrap()
    }

    #[test]
    fn small_samples_pass() {
        let small = Samples { pairs: 10, terms: 50, local_terms: 30, triples: 20, depth: 4 };
        for p in [inverting_z5(), GroupPresheaf::constant(FinCategory::arrow(), FinGroup::symmetric(3))] {
            let laws = all_laws(&p, small, 1);
            assert!(laws.passed(), "{laws:?}");
            assert!(laws.rewrite_confluence.cases > 0 && laws.indeterminate_transport.forward.cases == 20);
        }
    }

    #[test]
    fn non_cancellable_endo_breaks_the_converse() {
        // BM for the monoid {1, e} with e idempotent is not a group category,
        // so it is assembled by hand: one object, morphisms id and e.
        use isokit_core::fincat::RawCategory;
        let raw = RawCategory {
            objects: vec!["*".into()],
            morphisms: vec![("id".into(), "*".into(), "*".into()), ("e".into(), "*".into(), "*".into())],
            identities: vec![("*".into(), "id".into())],
            composition: vec![
                ("id".into(), "id".into(), "id".into()),
                ("id".into(), "e".into(), "e".into()),
                ("e".into(), "id".into(), "e".into()),
                ("e".into(), "e".into(), "e".into()),
            ],
        };
        let cat = FinCategory::new(&raw).unwrap();
        let z2 = FinGroup::cyclic(2);
        let trivial = GroupHom(vec![0, 0]);
        let p = GroupPresheaf::new(cat, vec![z2], vec![GroupHom::identity(2), trivial]).unwrap();
        let functor = ModelFunctor::from_presheaf(&p);
        let mut store = TermStore::new(&functor);
        let x = store.indet(0, 0).unwrap();
        let e = 1;
        let ve = store.push(x, e).unwrap();
        // v = x has x_id, v^e = α_e x has x_e = x_{e∘e}, yet x_e ∉ θ(v)
        let before = store.theta(x).unwrap().body.subscripts();
        let after = store.theta(ve).unwrap().body.subscripts();
        assert!(after.contains(&functor.category().compose(e, e).unwrap()));
        assert!(!before.contains(&e));
    }
}
