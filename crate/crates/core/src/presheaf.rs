//! Functors `J → Group` (called presheaves, following the covariant
//! convention) and natural transformations between them.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{FinCategory, MorId, ObjId};
use crate::fingroup::{automorphism_group, Elem, Enumerated, FinGroup, GroupHom, HomViolation};

/// A functoriality or naturality equation that fails, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorViolation {
    #[error("F(id_{obj}) moves `{elem}`")]
    Identity { obj: String, elem: String },
    #[error("F({g}∘{f}) ≠ F({g})∘F({f}) at `{elem}`")]
    Composition { g: String, f: String, elem: String },
    #[error("F({mor}) is not a homomorphism: {violation}")]
    NotHom { mor: String, violation: HomViolation },
    #[error("naturality fails along `{mor}` at `{elem}`")]
    Naturality { mor: String, elem: String },
    #[error("component at `{obj}` is not a homomorphism: {violation}")]
    ComponentNotHom { obj: String, violation: HomViolation },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("source and target presheaves have different base categories")]
    BaseMismatch,
    #[error("{} law(s) violated", .0.len())]
    Laws(Vec<FunctorViolation>),
}

/// A functor `F: J → Group` on a finite category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresheaf {
    base: FinCategory,
    groups: Vec<FinGroup>,
    maps: Vec<GroupHom>,
}

impl GroupPresheaf {
    /// Validates hom laws, `F(id) = id` and `F(g∘f) = F(g)∘F(f)`.
    pub fn new(base: FinCategory, groups: Vec<FinGroup>, maps: Vec<GroupHom>) -> Result<Self, PresheafError> {
        if groups.len() != base.object_count() {
            return Err(PresheafError::Shape { expected: base.object_count(), found: groups.len() });
        }
        if maps.len() != base.morphism_count() {
            return Err(PresheafError::Shape { expected: base.morphism_count(), found: maps.len() });
        }
        let mut laws = Vec::new();
        for f in base.morphism_ids() {
            if let Err(violation) = maps[f].check(&groups[base.dom(f)], &groups[base.cod(f)]) {
                laws.push(FunctorViolation::NotHom { mor: base.morphism_name(f).into(), violation });
            }
        }
        if !laws.is_empty() {
            return Err(PresheafError::Laws(laws));
        }
        for o in base.object_ids() {
            let id = &maps[base.identity(o)];
            if let Some(a) = groups[o].elements().find(|&a| id.apply(a) != a) {
                laws.push(FunctorViolation::Identity {
                    obj: base.object_name(o).into(),
                    elem: groups[o].name(a).into(),
                });
            }
        }
        for (g, f) in base.composable_pairs() {
            let gf = base.compose(g, f).expect("composable");
            let src = &groups[base.dom(f)];
            if let Some(a) = src.elements().find(|&a| maps[gf].apply(a) != maps[g].apply(maps[f].apply(a))) {
                laws.push(FunctorViolation::Composition {
                    g: base.morphism_name(g).into(),
                    f: base.morphism_name(f).into(),
                    elem: src.name(a).into(),
                });
            }
        }
        if laws.is_empty() {
            Ok(GroupPresheaf { base, groups, maps })
        } else {
            Err(PresheafError::Laws(laws))
        }
    }

    /// The functor sending every object to `group` and every morphism to
    /// the identity.
    pub fn constant(base: FinCategory, group: FinGroup) -> Self {
        let groups = base.object_ids().map(|_| group.clone()).collect();
        let maps = base.morphism_ids().map(|_| GroupHom::identity(group.order())).collect();
        GroupPresheaf::new(base, groups, maps).expect("constant functor")
    }

    pub fn base(&self) -> &FinCategory {
        &self.base
    }

    pub fn group(&self, o: ObjId) -> &FinGroup {
        &self.groups[o]
    }

    pub fn groups(&self) -> &[FinGroup] {
        &self.groups
    }

    pub fn map(&self, f: MorId) -> &GroupHom {
        &self.maps[f]
    }

    pub fn maps(&self) -> &[GroupHom] {
        &self.maps
    }
}

/// A natural transformation between presheaves over the same base; one
/// homomorphism per object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NatTrans(pub Vec<GroupHom>);

impl NatTrans {
    /// Validates component homs and every naturality square
    /// `G(f)∘μ(i) = μ(j)∘F(f)`.
    pub fn new(source: &GroupPresheaf, target: &GroupPresheaf, components: Vec<GroupHom>) -> Result<Self, PresheafError> {
        let t = NatTrans(components);
        t.check(source, target)?;
        Ok(t)
    }

    pub fn check(&self, source: &GroupPresheaf, target: &GroupPresheaf) -> Result<(), PresheafError> {
        let base = source.base();
        if base != target.base() {
            return Err(PresheafError::BaseMismatch);
        }
        if self.0.len() != base.object_count() {
            return Err(PresheafError::Shape { expected: base.object_count(), found: self.0.len() });
        }
        let mut laws = Vec::new();
        for o in base.object_ids() {
            if let Err(violation) = self.0[o].check(source.group(o), target.group(o)) {
                laws.push(FunctorViolation::ComponentNotHom { obj: base.object_name(o).into(), violation });
            }
        }
        if !laws.is_empty() {
            return Err(PresheafError::Laws(laws));
        }
        for f in base.morphism_ids() {
            let (i, j) = (base.dom(f), base.cod(f));
            let src = source.group(i);
            if let Some(a) = src
                .elements()
                .find(|&a| target.map(f).apply(self.0[i].apply(a)) != self.0[j].apply(source.map(f).apply(a)))
            {
                laws.push(FunctorViolation::Naturality { mor: base.morphism_name(f).into(), elem: src.name(a).into() });
            }
        }
        if laws.is_empty() {
            Ok(())
        } else {
            Err(PresheafError::Laws(laws))
        }
    }

    pub fn identity(presheaf: &GroupPresheaf) -> Self {
        NatTrans(presheaf.groups().iter().map(|g| GroupHom::identity(g.order())).collect())
    }

    pub fn component(&self, o: ObjId) -> &GroupHom {
        &self.0[o]
    }

    /// `self ∘ first`, componentwise.
    pub fn compose(&self, first: &NatTrans) -> NatTrans {
        NatTrans(self.0.iter().zip(&first.0).map(|(a, b)| a.compose(b)).collect())
    }

    pub fn is_iso(&self) -> bool {
        self.0.iter().all(GroupHom::is_bijective)
    }

    pub fn inverse(&self) -> Option<NatTrans> {
        self.0.iter().map(GroupHom::inverse).collect::<Option<Vec<_>>>().map(NatTrans)
    }
}

/// All natural automorphisms of `F`, found object by object from
/// `Aut(F(i))` and pruned by naturality against already-fixed components.
pub fn nat_auts(presheaf: &GroupPresheaf) -> Enumerated<NatTrans> {
    let base = presheaf.base();
    let pools: Vec<Vec<GroupHom>> =
        presheaf.groups().iter().map(|g| automorphism_group(g).members().to_vec()).collect();
    let mut out = Vec::new();
    let mut partial: Vec<GroupHom> = Vec::with_capacity(base.object_count());

    fn natural_at(presheaf: &GroupPresheaf, partial: &[GroupHom], f: MorId) -> bool {
        let base = presheaf.base();
        let (i, j) = (base.dom(f), base.cod(f));
        let map = presheaf.map(f);
        presheaf
            .group(i)
            .elements()
            .all(|a: Elem| map.apply(partial[i].apply(a)) == partial[j].apply(map.apply(a)))
    }

    fn search(
        presheaf: &GroupPresheaf,
        pools: &[Vec<GroupHom>],
        partial: &mut Vec<GroupHom>,
        out: &mut Vec<NatTrans>,
    ) {
        let base = presheaf.base();
        let next = partial.len();
        if next == base.object_count() {
            out.push(NatTrans(partial.clone()));
            return;
        }
        for cand in &pools[next] {
            partial.push(cand.clone());
            let ok = base.morphism_ids().all(|f| {
                let (i, j) = (base.dom(f), base.cod(f));
                if i > next || j > next || (i != next && j != next) {
                    return true;
                }
                natural_at(presheaf, partial, f)
            });
            if ok {
                search(presheaf, pools, partial, out);
            }
            partial.pop();
        }
    }

    search(presheaf, &pools, &mut partial, &mut out);
    Enumerated::tabulate(out, |a, b| a.compose(b))
}
