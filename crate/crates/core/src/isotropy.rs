//! Extended inner automorphisms of a presheaf of groups `F: J → Group`.
//!
//! Each element of the isotropy group `Z(F)` is a pair `(g, ψ)` with `g` in
//! `lim F` and `ψ ∈ Aut(Id_J)`. Along any `μ: F → G` it acts on `G(k)` by
//! `G(ψ(k)) ∘ inn_{μ_k(g_k)}`. An automorphism `π` of `F` is inner when it
//! arises this way along `μ = id_F`.
//!
//! Only groups are handled. For a general base theory the description of
//! isotropy by `lim F × Aut(Id_J)` depends on single-indeterminate isotropy and
//! on every partial operation being single-sorted, and nothing here checks
//! those hypotheses or what happens without them.

use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{aut_identity_functor, IdNatAut, MorId, ObjId};
use crate::fingroup::{inn, limit_of_diagram, Elem, Enumerated, FinGroup, GroupHom, LimitElement};
use crate::freeext::{FreeExtension, Word};
use crate::presheaf::{nat_auts, GroupPresheaf, NatTrans, PresheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsotropyError {
    #[error("object #{0} is not in the base category")]
    UnknownObject(ObjId),
    #[error("the tuple is not an element of lim F")]
    NotInLimit,
    #[error("the family is not a natural automorphism of the identity functor")]
    NotIdNatAut,
    #[error("expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("the transformation is not a natural automorphism: {0}")]
    NotNatural(PresheafError),
    #[error("the transformation is not invertible")]
    NotInvertible,
    #[error("slice arrow #{arrow} does not fit its endpoints: {source}")]
    BadArrow { arrow: usize, source: PresheafError },
    #[error("slice arrow #{0} refers to a missing node")]
    DanglingArrow(usize),
    #[error("slice has no node")]
    EmptySlice,
    #[error("element #{0} is out of range")]
    ElementOutOfRange(Elem),
}

/// `(g, ψ) ∈ lim F × Aut(Id_J)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedInnerAut {
    pub g: LimitElement,
    pub psi: IdNatAut,
}

impl ExtendedInnerAut {
    /// Checks that `g ∈ lim F` and that `ψ` is a natural automorphism of
    /// the identity functor on the base of `F`.
    pub fn new(presheaf: &GroupPresheaf, g: LimitElement, psi: IdNatAut) -> Result<Self, IsotropyError> {
        let base = presheaf.base();
        if g.0.len() != base.object_count() {
            return Err(IsotropyError::Shape { expected: base.object_count(), found: g.0.len() });
        }
        if g.0.iter().enumerate().any(|(i, &a)| a >= presheaf.group(i).order()) {
            return Err(IsotropyError::NotInLimit);
        }
        let in_limit = base.morphism_ids().all(|f| presheaf.map(f).apply(g.0[base.dom(f)]) == g.0[base.cod(f)]);
        if !in_limit {
            return Err(IsotropyError::NotInLimit);
        }
        if !psi.is_valid(base) {
            return Err(IsotropyError::NotIdNatAut);
        }
        Ok(ExtendedInnerAut { g, psi })
    }

    pub fn unit(presheaf: &GroupPresheaf) -> Self {
        ExtendedInnerAut {
            g: LimitElement(presheaf.groups().iter().map(FinGroup::unit).collect()),
            psi: IdNatAut::identity(presheaf.base()),
        }
    }

    /// `(g·g′, ψ∘ψ′)`.
    pub fn product(&self, other: &ExtendedInnerAut, presheaf: &GroupPresheaf) -> Self {
        let g = self.g.0.iter().zip(&other.g.0).enumerate().map(|(i, (&a, &b))| presheaf.group(i).mul(a, b)).collect();
        ExtendedInnerAut { g: LimitElement(g), psi: self.psi.compose(presheaf.base(), &other.psi) }
    }

    /// The component at `k` of the family along `μ: F → G`.
    pub fn evaluate_at(&self, target: &GroupPresheaf, mu: &NatTrans, k: ObjId) -> Result<GroupHom, IsotropyError> {
        evaluate_at(self, target, mu, k)
    }
}

/// `G(ψ(k)) ∘ inn_{μ_k(g_k)}` on `G(k)`.
pub fn evaluate_at(e: &ExtendedInnerAut, target: &GroupPresheaf, mu: &NatTrans, k: ObjId) -> Result<GroupHom, IsotropyError> {
    if k >= target.base().object_count() || k >= e.g.0.len() || k >= mu.0.len() {
        return Err(IsotropyError::UnknownObject(k));
    }
    let gk = target.group(k);
    let conj = mu.component(k).apply(e.g.0[k]);
    if conj >= gk.order() {
        return Err(IsotropyError::ElementOutOfRange(conj));
    }
    let inner = inn(gk, conj).map_err(|_| IsotropyError::ElementOutOfRange(conj))?;
    Ok(target.map(e.psi.component(k)).compose(&inner))
}

/// A finite diagram of natural transformations under `F = nodes[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    nodes: Vec<GroupPresheaf>,
    arrows: Vec<SliceArrow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceArrow {
    pub src: usize,
    pub dst: usize,
    pub trans: NatTrans,
}

impl Slice {
    /// Validates every arrow as a natural transformation between its
    /// endpoints.
    pub fn new(nodes: Vec<GroupPresheaf>, arrows: Vec<SliceArrow>) -> Result<Self, IsotropyError> {
        if nodes.is_empty() {
            return Err(IsotropyError::EmptySlice);
        }
        for (k, a) in arrows.iter().enumerate() {
            let (Some(src), Some(dst)) = (nodes.get(a.src), nodes.get(a.dst)) else {
                return Err(IsotropyError::DanglingArrow(k));
            };
            a.trans.check(src, dst).map_err(|source| IsotropyError::BadArrow { arrow: k, source })?;
        }
        Ok(Slice { nodes, arrows })
    }

    /// `{id_F}` together with every natural automorphism of `F`.
    pub fn automorphisms(presheaf: &GroupPresheaf) -> Self {
        let mut arrows = Vec::new();
        let id = NatTrans::identity(presheaf);
        arrows.push(SliceArrow { src: 0, dst: 0, trans: id.clone() });
        for t in nat_auts(presheaf).members() {
            if *t != id {
                arrows.push(SliceArrow { src: 0, dst: 0, trans: t.clone() });
            }
        }
        Slice { nodes: alloc::vec![presheaf.clone()], arrows }
    }

    /// Just `{id_F}`.
    pub fn identity(presheaf: &GroupPresheaf) -> Self {
        Slice {
            nodes: alloc::vec![presheaf.clone()],
            arrows: alloc::vec![SliceArrow { src: 0, dst: 0, trans: NatTrans::identity(presheaf) }],
        }
    }

    pub fn root(&self) -> &GroupPresheaf {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[GroupPresheaf] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[SliceArrow] {
        &self.arrows
    }
}

/// Outcome of a coherence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coherence {
    Holds,
    /// `ν ∘ π_μ ≠ π_{ν∘μ} ∘ ν` at object `obj`, for arrows `mu` and `nu`.
    Fails { mu: usize, nu: usize, obj: ObjId },
}

impl Coherence {
    pub fn holds(&self) -> bool {
        matches!(self, Coherence::Holds)
    }
}

/// Checks `ν ∘ π_μ = π_{ν∘μ} ∘ ν` for every arrow `μ` out of the root and
/// every arrow `ν` out of the target of `μ`. The family `π` is given as a
/// function of `(G, μ: F → G, k)`.
pub fn check_family_coherence(
    slice: &Slice,
    family: &mut dyn FnMut(&GroupPresheaf, &NatTrans, ObjId) -> GroupHom,
) -> Coherence {
    let objects = slice.root().base().object_ids();
    for (m, mu) in slice.arrows.iter().enumerate().filter(|(_, a)| a.src == 0) {
        for (n, nu) in slice.arrows.iter().enumerate().filter(|(_, a)| a.src == mu.dst) {
            let (g, h) = (&slice.nodes[mu.dst], &slice.nodes[nu.dst]);
            let numu = nu.trans.compose(&mu.trans);
            for k in objects.clone() {
                let lhs = nu.trans.component(k).compose(&family(g, &mu.trans, k));
                let rhs = family(h, &numu, k).compose(nu.trans.component(k));
                if lhs != rhs {
                    return Coherence::Fails { mu: m, nu: n, obj: k };
                }
            }
        }
    }
    Coherence::Holds
}

/// [`check_family_coherence`] for the family of an extended inner
/// automorphism.
pub fn check_coherence(e: &ExtendedInnerAut, slice: &Slice) -> Result<Coherence, IsotropyError> {
    if e.g.0.len() != slice.root().base().object_count() {
        return Err(IsotropyError::Shape { expected: slice.root().base().object_count(), found: e.g.0.len() });
    }
    Ok(check_family_coherence(slice, &mut |g, mu, k| evaluate_at(e, g, mu, k).expect("object in range")))
}

/// Every `(g, ψ)` with `π(k) = F(ψ(k)) ∘ inn_{g_k}` at every `k`. Empty when
/// `π` is not inner.
pub fn inner_witnesses(presheaf: &GroupPresheaf, pi: &NatTrans) -> Result<Vec<ExtendedInnerAut>, IsotropyError> {
    pi.check(presheaf, presheaf).map_err(IsotropyError::NotNatural)?;
    if !pi.is_iso() {
        return Err(IsotropyError::NotInvertible);
    }
    let limit = limit_of_diagram(presheaf);
    let aut_id = aut_identity_functor(presheaf.base());
    let id = NatTrans::identity(presheaf);
    let mut out = Vec::new();
    for g in limit.members() {
        for psi in aut_id.members() {
            let e = ExtendedInnerAut { g: g.clone(), psi: psi.clone() };
            let matches = presheaf
                .base()
                .object_ids()
                .all(|k| evaluate_at(&e, presheaf, &id, k).expect("object in range") == *pi.component(k));
            if matches {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// `Z(F) ≅ lim F × Aut(Id_J)` with its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyGroup {
    presheaf: GroupPresheaf,
    limit: Enumerated<LimitElement>,
    aut_id: Enumerated<IdNatAut>,
    members: Vec<ExtendedInnerAut>,
    table: FinGroup,
}

impl IsotropyGroup {
    pub fn presheaf(&self) -> &GroupPresheaf {
        &self.presheaf
    }

    pub fn limit(&self) -> &Enumerated<LimitElement> {
        &self.limit
    }

    pub fn aut_id(&self) -> &Enumerated<IdNatAut> {
        &self.aut_id
    }

    /// Members in lexicographic `(g, ψ)` order, indexed like the table.
    pub fn members(&self) -> &[ExtendedInnerAut] {
        &self.members
    }

    pub fn group(&self) -> &FinGroup {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// A generating set of the group.
    pub fn generators(&self) -> Vec<&ExtendedInnerAut> {
        self.table.generators().into_iter().map(|i| &self.members[i]).collect()
    }

    /// The automorphism `π_μ(k)` realized by member `index`.
    pub fn realize(&self, index: Elem, target: &GroupPresheaf, mu: &NatTrans, k: ObjId) -> Result<GroupHom, IsotropyError> {
        evaluate_at(&self.members[index], target, mu, k)
    }
}

/// The isotropy group of `F`.
pub fn isotropy_group(presheaf: &GroupPresheaf) -> IsotropyGroup {
    let limit = limit_of_diagram(presheaf);
    let aut_id = aut_identity_functor(presheaf.base());
    let table = FinGroup::product(limit.group(), aut_id.group());
    let members = limit
        .members()
        .iter()
        .flat_map(|g| aut_id.members().iter().map(move |psi| ExtendedInnerAut { g: g.clone(), psi: psi.clone() }))
        .collect();
    IsotropyGroup { presheaf: presheaf.clone(), limit, aut_id, members, table }
}

/// Evidence that a family of conjugators is not compatible: along `mor:
/// i → j`, the words `g_j·x·g_j⁻¹` and `F(f)(g_i)·x·F(f)(g_i)⁻¹` in
/// `F(j) * ⟨x⟩` differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub mor: MorId,
    pub target_word: Word,
    pub transported_word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralCharReport {
    /// `(g_i) ∈ lim F`.
    pub in_limit: bool,
    /// Compatibility of `(inn_{h(g_i)})` tested against `h = id` and the
    /// inclusion into the free extension.
    pub compatible: bool,
    /// Whether the inner automorphisms alone (`h = id`) already agree.
    pub agrees_on_components: bool,
    pub witness: Option<CompatibilityWitness>,
}

impl GeneralCharReport {
    /// Compatibility and membership in the limit agree.
    pub fn consistent(&self) -> bool {
        self.in_limit == self.compatible
    }
}

/// Compares, for each `f: i → j`, the conjugations induced by `g_j` and by
/// `F(f)(g_i)` after `h = id` and after the inclusion `F(j) → F(j) * ⟨x⟩`.
/// The second test separates elements that differ by a central factor.
pub fn check_general_char(presheaf: &GroupPresheaf, family: &[Elem]) -> Result<GeneralCharReport, IsotropyError> {
    let base = presheaf.base();
    if family.len() != base.object_count() {
        return Err(IsotropyError::Shape { expected: base.object_count(), found: family.len() });
    }
    if let Some(&bad) = family.iter().enumerate().find(|(i, &a)| a >= presheaf.group(*i).order()).map(|(_, a)| a) {
        return Err(IsotropyError::ElementOutOfRange(bad));
    }
    let mut in_limit = true;
    let mut agrees_on_components = true;
    let mut witness = None;
    for f in base.morphism_ids() {
        let (i, j) = (base.dom(f), base.cod(f));
        let target = presheaf.group(j);
        let gj = family[j];
        let moved = presheaf.map(f).apply(family[i]);
        in_limit &= moved == gj;
        let id_ok = inn(target, gj).expect("in range") == inn(target, moved).expect("in range");
        agrees_on_components &= id_ok;
        let ext = FreeExtension::new(target);
        let (lhs, rhs) = (ext.conjugator(gj), ext.conjugator(moved));
        if (lhs != rhs || !id_ok) && witness.is_none() {
            witness = Some(CompatibilityWitness { mor: f, target_word: lhs, transported_word: rhs });
        }
    }
    Ok(GeneralCharReport { in_limit, compatible: witness.is_none(), agrees_on_components, witness })
}
