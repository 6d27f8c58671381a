//! The signature `Σ^J` and theory `T^J` whose models are functors
//! `J → Tmod`, and the translation between the two presentations.
//!
//! Generated names use `@` as a separator: sort `A^i` is `A@i`, the copy of
//! `g` at `i` is `g@i`, and `α_f^A` is `alpha@f@A`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{FinCategory, MorId, ObjId};
use crate::fingroup::{Elem, FinGroup, GroupHom};
use crate::phl::{
    Equation, FunId, FunSymbol, HornFormula, HornSequent, PartialStructure, PhlError, Signature, SortId, Term,
    Theory,
};
use crate::presheaf::GroupPresheaf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomFamily {
    /// `⊤ ⊢ α_f(x)↓`
    Totality,
    /// `⊤ ⊢ α_{id}(x) = x`
    Identity,
    /// `⊤ ⊢ α_g(α_f(x)) = α_{g∘f}(x)`
    Composition,
    /// `g^i(x⃗)↓ ⊢ α_f(g^i(x⃗)) = g^j(α_f(x⃗))`
    Hom,
    /// `ρ^i` applied to an axiom of the base theory
    Translated,
}

impl AxiomFamily {
    pub const ALL: [AxiomFamily; 5] =
        [Self::Totality, Self::Identity, Self::Composition, Self::Hom, Self::Translated];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Totality => "totality",
            Self::Identity => "identity",
            Self::Composition => "composition",
            Self::Hom => "hom",
            Self::Translated => "translated",
        }
    }
}

/// Axiom counts per family, in [`AxiomFamily::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxiomCounts(pub [usize; 5]);

impl AxiomCounts {
    /// The closed-form counts for `(T, J)`.
    pub fn expected(theory: &Theory, cat: &FinCategory) -> Self {
        let sorts = theory.signature().sorts().len();
        let funs = theory.signature().funs().len();
        AxiomCounts([
            cat.morphism_count() * sorts,
            cat.object_count() * sorts,
            cat.composable_pairs().count() * sorts,
            cat.morphism_count() * funs,
            cat.object_count() * theory.axioms().len(),
        ])
    }

    pub fn get(&self, family: AxiomFamily) -> usize {
        self.0[family as usize]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// What a symbol of `Σ^J` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TjSymbol {
    Alpha { mor: MorId, sort: SortId },
    Op { fun: FunId, obj: ObjId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TjError {
    #[error("structure is not a model: axiom #{axiom} ({}) fails", family.as_str())]
    NotAModel { axiom: usize, family: AxiomFamily, witness: Vec<Elem> },
    #[error("component at `{obj}` is not a model: axiom #{axiom} fails")]
    ComponentNotModel { obj: String, axiom: usize },
    #[error("map for `{mor}` at sort `{sort}` is not a total function between carriers")]
    MapShape { mor: String, sort: String },
    #[error("map for `{mor}` does not preserve `{fun}`")]
    NotMorphism { mor: String, fun: String },
    #[error("functoriality fails for `{mor}`")]
    NotFunctorial { mor: String },
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("structure is not over the signature of this theory")]
    SignatureMismatch,
    #[error(transparent)]
    Phl(#[from] PhlError),
}

/// `T^J` together with the bookkeeping to decode its symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TjTheory {
    base: Theory,
    category: FinCategory,
    theory: Theory,
    families: Vec<AxiomFamily>,
}

impl TjTheory {
    pub fn build(base: &Theory, category: &FinCategory) -> Self {
        let sig = base.signature();
        let ns = sig.sorts().len();
        let nf = sig.funs().len();
        let sort_of = |a: SortId, i: ObjId| i * ns + a;
        let alpha = |f: MorId, a: SortId| f * ns + a;
        let op = |g: FunId, i: ObjId| category.morphism_count() * ns + i * nf + g;

        let mut sorts = Vec::with_capacity(ns * category.object_count());
        for i in category.object_ids() {
            for a in sig.sorts() {
                sorts.push(format!("{a}@{}", category.object_name(i)));
            }
        }
        let mut funs = Vec::new();
        for f in category.morphism_ids() {
            for (a, name) in sig.sorts().iter().enumerate() {
                funs.push(FunSymbol {
                    name: format!("alpha@{}@{name}", category.morphism_name(f)),
                    args: vec![sort_of(a, category.dom(f))],
                    result: sort_of(a, category.cod(f)),
                });
            }
        }
        for i in category.object_ids() {
            for g in sig.funs() {
                funs.push(FunSymbol {
                    name: format!("{}@{}", g.name, category.object_name(i)),
                    args: g.args.iter().map(|&a| sort_of(a, i)).collect(),
                    result: sort_of(g.result, i),
                });
            }
        }
        let signature = Signature::new(sorts, funs).expect("Σ^J names are fresh");

        let mut axioms = Vec::new();
        let mut families = Vec::new();
        let x = |s: SortId| Term::var("x", s);
        let one = |s: SortId| vec![(String::from("x"), s)];
        let top = HornFormula::top;
        let eq = |l: Term, r: Term| HornFormula::single(Equation::new(l, r));

        for f in category.morphism_ids() {
            for a in 0..ns {
                let s = sort_of(a, category.dom(f));
                let t = Term::app(alpha(f, a), vec![x(s)]);
                axioms.push(HornSequent::new(one(s), top(), HornFormula::single(Equation::defined(t))));
                families.push(AxiomFamily::Totality);
            }
        }
        for i in category.object_ids() {
            for a in 0..ns {
                let s = sort_of(a, i);
                let t = Term::app(alpha(category.identity(i), a), vec![x(s)]);
                axioms.push(HornSequent::new(one(s), top(), eq(t, x(s))));
                families.push(AxiomFamily::Identity);
            }
        }
        for (g, f) in category.composable_pairs() {
            let gf = category.compose(g, f).expect("composable");
            for a in 0..ns {
                let s = sort_of(a, category.dom(f));
                let lhs = Term::app(alpha(g, a), vec![Term::app(alpha(f, a), vec![x(s)])]);
                let rhs = Term::app(alpha(gf, a), vec![x(s)]);
                axioms.push(HornSequent::new(one(s), top(), eq(lhs, rhs)));
                families.push(AxiomFamily::Composition);
            }
        }
        for f in category.morphism_ids() {
            let (i, j) = (category.dom(f), category.cod(f));
            for (g, sym) in sig.funs().iter().enumerate() {
                let ctx: Vec<(String, SortId)> =
                    sym.args.iter().enumerate().map(|(n, &a)| (format!("x{}", n + 1), sort_of(a, i))).collect();
                let vars: Vec<Term> = ctx.iter().map(|(n, s)| Term::var(n, *s)).collect();
                let gi = Term::app(op(g, i), vars.clone());
                let lhs = Term::app(alpha(f, sym.result), vec![gi.clone()]);
                let pushed = vars.iter().zip(&sym.args).map(|(v, &a)| Term::app(alpha(f, a), vec![v.clone()])).collect();
                let rhs = Term::app(op(g, j), pushed);
                axioms.push(HornSequent::new(ctx, HornFormula::single(Equation::defined(gi)), eq(lhs, rhs)));
                families.push(AxiomFamily::Hom);
            }
        }
        for i in category.object_ids() {
            for ax in base.axioms() {
                axioms.push(translate_sequent(ax, &|a| sort_of(a, i), &|g| op(g, i)));
                families.push(AxiomFamily::Translated);
            }
        }

        let theory = Theory::new(signature, axioms).expect("T^J axioms are well-formed");
        TjTheory { base: base.clone(), category: category.clone(), theory, families }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn signature(&self) -> &Signature {
        self.theory.signature()
    }

    pub fn base(&self) -> &Theory {
        &self.base
    }

    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    /// The family of each axiom, parallel to `theory().axioms()`.
    pub fn families(&self) -> &[AxiomFamily] {
        &self.families
    }

    pub fn counts(&self) -> AxiomCounts {
        let mut c = AxiomCounts::default();
        for f in &self.families {
            c.0[*f as usize] += 1;
        }
        c
    }

    fn base_sorts(&self) -> usize {
        self.base.signature().sorts().len()
    }

    fn base_funs(&self) -> usize {
        self.base.signature().funs().len()
    }

    /// `A^i`
    pub fn sort_of(&self, a: SortId, i: ObjId) -> SortId {
        i * self.base_sorts() + a
    }

    /// Inverse of [`sort_of`](Self::sort_of).
    pub fn sort_parts(&self, s: SortId) -> (SortId, ObjId) {
        (s % self.base_sorts(), s / self.base_sorts())
    }

    /// `α_f^A`
    pub fn alpha(&self, f: MorId, a: SortId) -> FunId {
        f * self.base_sorts() + a
    }

    /// `g^i`
    pub fn op(&self, g: FunId, i: ObjId) -> FunId {
        self.category.morphism_count() * self.base_sorts() + i * self.base_funs() + g
    }

    pub fn symbol(&self, fun: FunId) -> TjSymbol {
        let ns = self.base_sorts();
        let alphas = self.category.morphism_count() * ns;
        if fun < alphas {
            TjSymbol::Alpha { mor: fun / ns, sort: fun % ns }
        } else {
            let k = fun - alphas;
            TjSymbol::Op { fun: k % self.base_funs(), obj: k / self.base_funs() }
        }
    }

    /// The component `M^i` of a `Σ^J`-structure.
    pub fn component(&self, model: &PartialStructure, i: ObjId) -> PartialStructure {
        let sig = self.base.signature();
        let carriers = (0..sig.sorts().len()).map(|a| model.carrier(self.sort_of(a, i)).to_vec()).collect();
        let tables = (0..sig.funs().len()).map(|g| model.table(self.op(g, i)).clone()).collect();
        PartialStructure::new(sig.clone(), carriers, tables).expect("component of a Σ^J-structure")
    }

    /// `F^M`: checks `M ⊨ T^J` and reads off components and maps.
    pub fn model_to_functor(&self, model: &PartialStructure) -> Result<ModelFunctor, TjError> {
        if model.signature() != self.signature() {
            return Err(TjError::SignatureMismatch);
        }
        let report = model.check_model(&self.theory)?;
        if let Some(fail) = report.failures.first() {
            return Err(TjError::NotAModel {
                axiom: fail.axiom,
                family: self.families[fail.axiom],
                witness: fail.witness.clone(),
            });
        }
        let components = self.category.object_ids().map(|i| self.component(model, i)).collect();
        let maps = self
            .category
            .morphism_ids()
            .map(|f| {
                (0..self.base_sorts())
                    .map(|a| {
                        let dom = model.carrier(self.sort_of(a, self.category.dom(f))).len();
                        (0..dom).map(|s| model.apply(self.alpha(f, a), &[s]).expect("totality axiom")).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(ModelFunctor {
            signature: self.base.signature().clone(),
            category: self.category.clone(),
            components,
            maps,
        })
    }

    /// `M^F`: the `Σ^J`-structure of a functor.
    pub fn functor_to_model(&self, functor: &ModelFunctor) -> Result<PartialStructure, TjError> {
        if functor.signature != *self.base.signature() || functor.category != self.category {
            return Err(TjError::SignatureMismatch);
        }
        let sig = self.signature();
        let mut carriers = vec![Vec::new(); sig.sorts().len()];
        for i in self.category.object_ids() {
            for a in 0..self.base_sorts() {
                carriers[self.sort_of(a, i)] = functor.components[i].carrier(a).to_vec();
            }
        }
        let mut tables = vec![BTreeMap::new(); sig.funs().len()];
        for f in self.category.morphism_ids() {
            for a in 0..self.base_sorts() {
                tables[self.alpha(f, a)] =
                    functor.maps[f][a].iter().enumerate().map(|(s, &t)| (vec![s], t)).collect();
            }
        }
        for i in self.category.object_ids() {
            for g in 0..self.base_funs() {
                tables[self.op(g, i)] = functor.components[i].table(g).clone();
            }
        }
        Ok(PartialStructure::new(sig.clone(), carriers, tables)?)
    }
}

/// Builds `Σ^J` and `T^J` for `(T, J)`.
pub fn build_tj(base: &Theory, category: &FinCategory) -> TjTheory {
    TjTheory::build(base, category)
}

fn translate_term(t: &Term, sort: &dyn Fn(SortId) -> SortId, fun: &dyn Fn(FunId) -> FunId) -> Term {
    match t {
        Term::Var { name, sort: s } => Term::Var { name: name.clone(), sort: sort(*s) },
        Term::App { fun: g, args } => {
            Term::App { fun: fun(*g), args: args.iter().map(|a| translate_term(a, sort, fun)).collect() }
        }
    }
}

fn translate_sequent(s: &HornSequent, sort: &dyn Fn(SortId) -> SortId, fun: &dyn Fn(FunId) -> FunId) -> HornSequent {
    let formula = |f: &HornFormula| {
        HornFormula(
            f.0.iter()
                .map(|e| Equation::new(translate_term(&e.lhs, sort, fun), translate_term(&e.rhs, sort, fun)))
                .collect(),
        )
    };
    HornSequent::new(
        s.context.iter().map(|(n, a)| (n.clone(), sort(*a))).collect(),
        formula(&s.premise),
        formula(&s.conclusion),
    )
}

/// A functor `J → Tmod` with finite components: `maps[f][A]` is the
/// function `F(f)_A` as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFunctor {
    signature: Signature,
    category: FinCategory,
    components: Vec<PartialStructure>,
    maps: Vec<Vec<Vec<Elem>>>,
}

impl ModelFunctor {
    /// Validates component models, Σ-morphism property and functoriality.
    pub fn new(
        theory: &Theory,
        category: FinCategory,
        components: Vec<PartialStructure>,
        maps: Vec<Vec<Vec<Elem>>>,
    ) -> Result<Self, TjError> {
        let sig = theory.signature();
        if components.len() != category.object_count() {
            return Err(TjError::Shape { expected: category.object_count(), found: components.len() });
        }
        if maps.len() != category.morphism_count() {
            return Err(TjError::Shape { expected: category.morphism_count(), found: maps.len() });
        }
        for (i, c) in components.iter().enumerate() {
            if c.signature() != sig {
                return Err(TjError::SignatureMismatch);
            }
            if let Some(fail) = c.check_model(theory)?.failures.first() {
                return Err(TjError::ComponentNotModel { obj: category.object_name(i).to_string(), axiom: fail.axiom });
            }
        }
        for f in category.morphism_ids() {
            let (src, tgt) = (&components[category.dom(f)], &components[category.cod(f)]);
            let mor = || category.morphism_name(f).to_string();
            if maps[f].len() != sig.sorts().len() {
                return Err(TjError::Shape { expected: sig.sorts().len(), found: maps[f].len() });
            }
            for (a, table) in maps[f].iter().enumerate() {
                if table.len() != src.carrier(a).len() || table.iter().any(|&t| t >= tgt.carrier(a).len()) {
                    return Err(TjError::MapShape { mor: mor(), sort: sig.sort_name(a).to_string() });
                }
            }
            for (g, sym) in sig.funs().iter().enumerate() {
                for (args, &out) in src.table(g) {
                    let moved: Vec<Elem> = args.iter().zip(&sym.args).map(|(&s, &a)| maps[f][a][s]).collect();
                    if tgt.apply(g, &moved) != Some(maps[f][sym.result][out]) {
                        return Err(TjError::NotMorphism { mor: mor(), fun: sym.name.clone() });
                    }
                }
            }
        }
        for i in category.object_ids() {
            let id = category.identity(i);
            if maps[id].iter().any(|t| t.iter().enumerate().any(|(s, &v)| s != v)) {
                return Err(TjError::NotFunctorial { mor: category.morphism_name(id).to_string() });
            }
        }
        for (g, f) in category.composable_pairs() {
            let gf = category.compose(g, f).expect("composable");
            let ok = (0..sig.sorts().len()).all(|a| maps[f][a].iter().enumerate().all(|(s, &t)| maps[g][a][t] == maps[gf][a][s]));
            if !ok {
                return Err(TjError::NotFunctorial { mor: category.morphism_name(gf).to_string() });
            }
        }
        Ok(ModelFunctor { signature: sig.clone(), category, components, maps })
    }

    /// A group presheaf as a functor into models of [`Theory::groups`].
    pub fn from_presheaf(presheaf: &GroupPresheaf) -> Self {
        let category = presheaf.base().clone();
        let components = presheaf.groups().iter().map(PartialStructure::from_group).collect();
        let maps = presheaf.maps().iter().map(|h| vec![h.0.clone()]).collect();
        ModelFunctor::new(&Theory::groups(), category, components, maps).expect("presheaf is a functor")
    }

    /// The inverse of [`from_presheaf`](Self::from_presheaf), when the
    /// signature is that of groups.
    pub fn to_presheaf(&self) -> Option<GroupPresheaf> {
        let groups: Vec<FinGroup> = self.components.iter().map(PartialStructure::to_group).collect::<Option<_>>()?;
        let maps = self.maps.iter().map(|m| GroupHom(m[0].clone())).collect();
        GroupPresheaf::new(self.category.clone(), groups, maps).ok()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn components(&self) -> &[PartialStructure] {
        &self.components
    }

    pub fn component(&self, i: ObjId) -> &PartialStructure {
        &self.components[i]
    }

    /// `F(f)_A` as a table.
    pub fn map(&self, f: MorId, a: SortId) -> &[Elem] {
        &self.maps[f][a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::GroupPresheaf;

    fn inverting_z3() -> GroupPresheaf {
        let z3 = FinGroup::cyclic(3);
        let base = FinCategory::one_object(&FinGroup::cyclic(2));
        let inv = GroupHom(z3.elements().map(|a| z3.inv(a)).collect());
        GroupPresheaf::new(base, vec![z3], vec![GroupHom::identity(3), inv]).unwrap()
    }

    #[test]
    fn arrow_signature_counts() {
        let tj = build_tj(&Theory::groups(), &FinCategory::arrow());
        assert_eq!(tj.signature().sorts().len(), 2);
        assert_eq!(tj.signature().funs().len(), 9);
        assert_eq!(tj.counts(), AxiomCounts::expected(&Theory::groups(), &FinCategory::arrow()));
    }

    #[test]
    fn names_use_at_separator() {
        let tj = build_tj(&Theory::groups(), &FinCategory::arrow());
        let sig = tj.signature();
        assert_eq!(sig.sorts(), ["X@0", "X@1"]);
        let f = FinCategory::arrow().morphism_index("f").unwrap();
        assert_eq!(sig.fun(tj.alpha(f, 0)).name, "alpha@f@X");
        assert_eq!(sig.fun(tj.op(0, 1)).name, "m@1");
        assert_eq!(tj.symbol(tj.op(2, 1)), TjSymbol::Op { fun: 2, obj: 1 });
        assert_eq!(tj.symbol(tj.alpha(1, 0)), TjSymbol::Alpha { mor: 1, sort: 0 });
    }

    #[test]
    fn terminal_category_copies_the_theory() {
        let groups = Theory::groups();
        let tj = build_tj(&groups, &FinCategory::terminal());
        assert_eq!(tj.signature().funs().len(), 1 + 3);
        let translated: Vec<_> = tj
            .theory()
            .axioms()
            .iter()
            .zip(tj.families())
            .filter(|(_, f)| **f == AxiomFamily::Translated)
            .map(|(a, _)| a.render(tj.signature()))
            .collect();
        assert_eq!(translated.len(), groups.axioms().len());
        assert_eq!(translated[4], "⊤ ⊢[x:X@0] (m@0 x e@0) = x");
    }

    #[test]
    fn identity_axiom_shape() {
        let tj = build_tj(&Theory::groups(), &FinCategory::arrow());
        let first = tj.families().iter().position(|f| *f == AxiomFamily::Identity).unwrap();
        assert_eq!(tj.theory().axioms()[first].render(tj.signature()), "⊤ ⊢[x:X@0] (alpha@id_0@X x) = x");
    }

    #[test]
    fn constant_functor_roundtrip() {
        let p = GroupPresheaf::constant(FinCategory::arrow(), FinGroup::cyclic(2));
        let tj = build_tj(&Theory::groups(), p.base());
        let functor = ModelFunctor::from_presheaf(&p);
        let model = tj.functor_to_model(&functor).unwrap();
        assert!(model.check_model(tj.theory()).unwrap().is_model());
        let back = tj.model_to_functor(&model).unwrap();
        assert_eq!(back, functor);
        assert_eq!(back.to_presheaf(), Some(p));
    }

    #[test]
    fn inversion_is_read_back() {
        let p = inverting_z3();
        let tj = build_tj(&Theory::groups(), p.base());
        let model = tj.functor_to_model(&ModelFunctor::from_presheaf(&p)).unwrap();
        let f = tj.model_to_functor(&model).unwrap();
        assert_eq!(f.map(1, 0), [0, 2, 1]);
        assert_eq!(tj.functor_to_model(&f).unwrap(), model);
    }

    #[test]
    fn broken_composition_is_rejected() {
        let p = inverting_z3();
        let tj = build_tj(&Theory::groups(), p.base());
        let model = tj.functor_to_model(&ModelFunctor::from_presheaf(&p)).unwrap();
        // α_τ = [0, 1, 1], so α_τ(α_τ(2)) = 1 ≠ 2
        let broken = model.with_entry(tj.alpha(1, 0), vec![1], Some(1)).unwrap();
        match tj.model_to_functor(&broken) {
            Err(TjError::NotAModel { .. }) => {}
            other => panic!("{other:?}"),
        }
        let report = broken.check_model(tj.theory()).unwrap();
        assert!(report.failures.iter().any(|f| tj.families()[f.axiom] == AxiomFamily::Composition));
    }

    #[test]
    fn trivial_group_functor() {
        let p = GroupPresheaf::constant(FinCategory::parallel_pair(), FinGroup::trivial());
        let tj = build_tj(&Theory::groups(), p.base());
        let model = tj.functor_to_model(&ModelFunctor::from_presheaf(&p)).unwrap();
        assert!(model.carriers().iter().all(|c| c.len() == 1));
        for f in p.base().morphism_ids() {
            assert_eq!(model.apply(tj.alpha(f, 0), &[0]), Some(0));
        }
    }

    #[test]
    fn non_morphism_map_is_rejected() {
        let z3 = FinGroup::cyclic(3);
        let c = PartialStructure::from_group(&z3);
        let err = ModelFunctor::new(
            &Theory::groups(),
            FinCategory::arrow(),
            vec![c.clone(), c],
            vec![vec![vec![0, 1, 2]], vec![vec![0, 1, 2]], vec![vec![1, 1, 1]]],
        )
        .unwrap_err();
        assert!(matches!(err, TjError::NotMorphism { .. }));
    }
}
