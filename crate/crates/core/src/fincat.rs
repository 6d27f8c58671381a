//! Finite categories presented by explicit composition tables, and the group
//! `Aut(Id_J)` of natural automorphisms of the identity functor.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fingroup::{Enumerated, FinGroup};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// Name-based description of a category, as read from a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub objects: Vec<String>,
    /// `(name, dom, cod)`
    pub morphisms: Vec<(String, String, String)>,
    /// `(object, identity morphism)`
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`
    pub composition: Vec<(String, String, String)>,
}

/// A category law that fails, with the offending morphisms by name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawViolation {
    #[error("object `{0}` has no identity")]
    MissingIdentity(String),
    #[error("identity `{mor}` of `{obj}` is not an endomorphism of it")]
    IdentityNotEndo { obj: String, mor: String },
    #[error("composite {g}∘{f} is missing")]
    MissingComposite { g: String, f: String },
    #[error("composite {g}∘{f} = {gf} has the wrong domain or codomain")]
    CompositeTyping { g: String, f: String, gf: String },
    #[error("identity law fails for `{0}`")]
    Identity(String),
    #[error("associativity fails: ({h}∘{g})∘{f} ≠ {h}∘({g}∘{f})")]
    Associativity { h: String, g: String, f: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    Dangling(String),
    #[error("table entry for non-composable pair {g}∘{f}")]
    NotComposable { g: String, f: String },
    #[error("conflicting table entries for {g}∘{f}")]
    Conflicting { g: String, f: String },
    #[error("{} category law(s) violated", .0.len())]
    Laws(Vec<LawViolation>),
}

/// A validated finite category. Composition is a flat table indexed by
/// `(g, f)` holding `g∘f` for composable pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    compose: Vec<Option<MorId>>,
}

impl FinCategory {
    /// Resolves names and checks typing, identity and associativity laws.
    pub fn new(raw: &RawCategory) -> Result<Self, CategoryError> {
        let objects = unique_index(raw.objects.iter())?;
        let morphisms_idx = unique_index(raw.morphisms.iter().map(|m| &m.0))?;
        let obj = |name: &String| {
            objects.get(name).copied().ok_or_else(|| CategoryError::Dangling(name.clone()))
        };
        let mor = |name: &String| {
            morphisms_idx.get(name).copied().ok_or_else(|| CategoryError::Dangling(name.clone()))
        };

        let morphisms = raw
            .morphisms
            .iter()
            .map(|(name, d, c)| Ok(Morphism { name: name.clone(), dom: obj(d)?, cod: obj(c)? }))
            .collect::<Result<Vec<_>, CategoryError>>()?;

        let mut identities: Vec<Option<MorId>> = vec![None; raw.objects.len()];
        for (o, m) in &raw.identities {
            let (o, m) = (obj(o)?, mor(m)?);
            if identities[o].is_some_and(|prev| prev != m) {
                return Err(CategoryError::DuplicateName(raw.objects[o].clone()));
            }
            identities[o] = Some(m);
        }

        let n = morphisms.len();
        let mut compose = vec![None; n * n];
        for (g, f, gf) in &raw.composition {
            let (gi, fi, gfi) = (mor(g)?, mor(f)?, mor(gf)?);
            if morphisms[fi].cod != morphisms[gi].dom {
                return Err(CategoryError::NotComposable { g: g.clone(), f: f.clone() });
            }
            let slot = &mut compose[gi * n + fi];
            if slot.is_some_and(|prev| prev != gfi) {
                return Err(CategoryError::Conflicting { g: g.clone(), f: f.clone() });
            }
            *slot = Some(gfi);
        }

        let mut laws = Vec::new();
        let ids: Vec<MorId> = identities
            .iter()
            .enumerate()
            .filter_map(|(o, id)| {
                if id.is_none() {
                    laws.push(LawViolation::MissingIdentity(raw.objects[o].clone()));
                }
                *id
            })
            .collect();
        if !laws.is_empty() {
            return Err(CategoryError::Laws(laws));
        }
        let cat = FinCategory { objects: raw.objects.clone(), morphisms, identities: ids, compose };
        cat.check_laws().map(|()| cat)
    }

    fn check_laws(&self) -> Result<(), CategoryError> {
        let mut laws = Vec::new();
        let name = |m: MorId| self.morphisms[m].name.clone();
        for (o, &id) in self.identities.iter().enumerate() {
            if self.dom(id) != o || self.cod(id) != o {
                laws.push(LawViolation::IdentityNotEndo { obj: self.objects[o].clone(), mor: name(id) });
            }
        }
        if !laws.is_empty() {
            return Err(CategoryError::Laws(laws));
        }
        for g in self.morphism_ids() {
            for f in self.morphism_ids().filter(|&f| self.cod(f) == self.dom(g)) {
                match self.compose(g, f) {
                    None => laws.push(LawViolation::MissingComposite { g: name(g), f: name(f) }),
                    Some(gf) if self.dom(gf) != self.dom(f) || self.cod(gf) != self.cod(g) => {
                        laws.push(LawViolation::CompositeTyping { g: name(g), f: name(f), gf: name(gf) })
                    }
                    Some(_) => {}
                }
            }
        }
        if !laws.is_empty() {
            return Err(CategoryError::Laws(laws));
        }
        for f in self.morphism_ids() {
            let left = self.compose(self.identity(self.cod(f)), f);
            let right = self.compose(f, self.identity(self.dom(f)));
            if left != Some(f) || right != Some(f) {
                laws.push(LawViolation::Identity(name(f)));
            }
        }
        for f in self.morphism_ids() {
            for g in self.morphism_ids().filter(|&g| self.dom(g) == self.cod(f)) {
                let gf = self.compose(g, f).expect("checked above");
                for h in self.morphism_ids().filter(|&h| self.dom(h) == self.cod(g)) {
                    let hg = self.compose(h, g).expect("checked above");
                    if self.compose(hg, f) != self.compose(h, gf) {
                        laws.push(LawViolation::Associativity { h: name(h), g: name(g), f: name(f) });
                    }
                }
            }
        }
        if laws.is_empty() {
            Ok(())
        } else {
            Err(CategoryError::Laws(laws))
        }
    }

    /// Name-based description that [`FinCategory::new`] maps back to `self`.
    pub fn to_raw(&self) -> RawCategory {
        let name = |m: MorId| self.morphisms[m].name.clone();
        let mut composition = Vec::new();
        for g in self.morphism_ids() {
            for f in self.morphism_ids() {
                if let Some(gf) = self.compose(g, f) {
                    composition.push((name(g), name(f), name(gf)));
                }
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| (m.name.clone(), self.objects[m.dom].clone(), self.objects[m.cod].clone()))
                .collect(),
            identities: self
                .identities
                .iter()
                .enumerate()
                .map(|(o, &m)| (self.objects[o].clone(), name(m)))
                .collect(),
            composition,
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_ids(&self) -> core::ops::Range<ObjId> {
        0..self.objects.len()
    }

    pub fn morphism_ids(&self) -> core::ops::Range<MorId> {
        0..self.morphisms.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphisms[m].name
    }

    pub fn object_index(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m].dom
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m].cod
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.dom(m)] == m
    }

    /// `g∘f`, when `cod f = dom g`.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose[g * self.morphisms.len() + f]
    }

    /// Morphisms `i → j` in declared order.
    pub fn hom(&self, i: ObjId, j: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.morphism_ids().filter(move |&m| self.dom(m) == i && self.cod(m) == j)
    }

    pub fn endomorphisms(&self, i: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.hom(i, i)
    }

    /// `Cod(k)`: morphisms with codomain `k`.
    pub fn into(&self, k: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.morphism_ids().filter(move |&m| self.cod(m) == k)
    }

    /// `Dom(i)`: morphisms with domain `i`.
    pub fn out_of(&self, i: ObjId) -> impl Iterator<Item = MorId> + '_ {
        self.morphism_ids().filter(move |&m| self.dom(m) == i)
    }

    /// A two-sided inverse of `f`, if one exists.
    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        self.hom(self.cod(f), self.dom(f)).find(|&g| {
            self.compose(g, f) == Some(self.identity(self.dom(f)))
                && self.compose(f, g) == Some(self.identity(self.cod(f)))
        })
    }

    /// True when every endomorphism is an identity.
    pub fn has_only_trivial_endomorphisms(&self) -> bool {
        self.object_ids().all(|i| self.endomorphisms(i).all(|m| self.is_identity(m)))
    }

    /// Pairs `(g, f)` with `g∘f` defined, in table order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (MorId, MorId)> + '_ {
        self.morphism_ids().flat_map(move |g| {
            self.morphism_ids().filter_map(move |f| self.compose(g, f).map(|_| (g, f)))
        })
    }
}

fn unique_index<'a>(
    names: impl Iterator<Item = &'a String>,
) -> Result<BTreeMap<String, usize>, CategoryError> {
    let mut index = BTreeMap::new();
    for (i, name) in names.enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(CategoryError::DuplicateName(name.clone()));
        }
    }
    Ok(index)
}

/// Builds a thin category (preorder) from objects and generating arrows.
/// Morphisms are named `id_<o>` for identities and `<a><b>` otherwise unless
/// a name is supplied for the generating arrow.
fn thin(objects: &[&str], arrows: &[(&str, &str, &str)]) -> FinCategory {
    let n = objects.len();
    let idx = |o: &str| objects.iter().position(|x| *x == o).expect("object listed");
    let mut reach = vec![vec![None::<String>; n]; n];
    for (i, o) in objects.iter().enumerate() {
        reach[i][i] = Some(format!("id_{o}"));
    }
    for (name, a, b) in arrows {
        reach[idx(a)][idx(b)] = Some(name.to_string());
    }
    // transitive closure; composite names join the endpoints
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][j].is_none() && reach[i][k].is_some() && reach[k][j].is_some() {
                    reach[i][j] = Some(format!("{}{}", objects[i], objects[j]));
                }
            }
        }
    }
    let mut raw = RawCategory { objects: objects.iter().map(|o| o.to_string()).collect(), ..Default::default() };
    for i in 0..n {
        for j in 0..n {
            if let Some(m) = &reach[i][j] {
                raw.morphisms.push((m.clone(), objects[i].to_string(), objects[j].to_string()));
            }
        }
        raw.identities.push((objects[i].to_string(), reach[i][i].clone().expect("identity")));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let (Some(f), Some(g), Some(gf)) = (&reach[i][j], &reach[j][k], &reach[i][k]) {
                    raw.composition.push((g.clone(), f.clone(), gf.clone()));
                }
            }
        }
    }
    FinCategory::new(&raw).expect("thin category")
}

/// Catalog of small index categories.
impl FinCategory {
    /// `n` objects `"0"`, `"1"`, … and only identities.
    pub fn discrete(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        thin(&refs, &[])
    }

    pub fn terminal() -> Self {
        Self::discrete(1)
    }

    /// `0 --f--> 1`.
    pub fn arrow() -> Self {
        thin(&["0", "1"], &[("f", "0", "1")])
    }

    /// `f, g: i ⇉ j`.
    pub fn parallel_pair() -> Self {
        let raw = RawCategory {
            objects: vec!["i".into(), "j".into()],
            morphisms: vec![
                ("id_i".into(), "i".into(), "i".into()),
                ("id_j".into(), "j".into(), "j".into()),
                ("f".into(), "i".into(), "j".into()),
                ("g".into(), "i".into(), "j".into()),
            ],
            identities: vec![("i".into(), "id_i".into()), ("j".into(), "id_j".into())],
            composition: [("id_i", "id_i", "id_i"), ("id_j", "id_j", "id_j")]
                .into_iter()
                .chain(["f", "g"].into_iter().flat_map(|m| [("id_j", m, m), (m, "id_i", m)]))
                .map(|(a, b, c)| (a.into(), b.into(), c.into()))
                .collect(),
        };
        FinCategory::new(&raw).expect("parallel pair")
    }

    /// `f: i → k ← j :g`.
    pub fn cospan() -> Self {
        thin(&["i", "j", "k"], &[("f", "i", "k"), ("g", "j", "k")])
    }

    /// The commuting square `a → b → d`, `a → c → d`.
    pub fn commutative_square() -> Self {
        thin(&["a", "b", "c", "d"], &[("ab", "a", "b"), ("ac", "a", "c"), ("bd", "b", "d"), ("cd", "c", "d")])
    }

    /// The one-object category `BG`: object `"*"`, one morphism per group
    /// element (named as the element), composition = group product.
    pub fn one_object(group: &FinGroup) -> Self {
        let mut raw = RawCategory { objects: vec!["*".into()], ..Default::default() };
        for g in group.elements() {
            raw.morphisms.push((group.name(g).into(), "*".into(), "*".into()));
        }
        raw.identities.push(("*".into(), group.name(group.unit()).into()));
        for g in group.elements() {
            for f in group.elements() {
                raw.composition.push((
                    group.name(g).into(),
                    group.name(f).into(),
                    group.name(group.mul(g, f)).into(),
                ));
            }
        }
        FinCategory::new(&raw).expect("one-object category")
    }
}

/// A natural automorphism of `Id_J`: one invertible endomorphism per object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdNatAut(pub Vec<MorId>);

impl IdNatAut {
    pub fn identity(cat: &FinCategory) -> Self {
        IdNatAut(cat.object_ids().map(|o| cat.identity(o)).collect())
    }

    pub fn component(&self, o: ObjId) -> MorId {
        self.0[o]
    }

    /// Pointwise `self(i) ∘ other(i)`.
    pub fn compose(&self, cat: &FinCategory, other: &IdNatAut) -> IdNatAut {
        IdNatAut(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| cat.compose(a, b).expect("endomorphisms compose"))
                .collect(),
        )
    }

    /// Checks invertibility of every component and naturality against
    /// every morphism.
    pub fn is_valid(&self, cat: &FinCategory) -> bool {
        self.0.len() == cat.object_count()
            && cat.object_ids().all(|o| {
                let c = self.0[o];
                c < cat.morphism_count()
                    && cat.dom(c) == o
                    && cat.cod(c) == o
                    && cat.inverse(c).is_some()
            })
            && cat.morphism_ids().all(|h| {
                cat.compose(h, self.0[cat.dom(h)]) == cat.compose(self.0[cat.cod(h)], h)
            })
    }
}

/// Enumerates `Aut(Id_J)` lexicographically in (object order, morphism
/// order), pruning by naturality as components are fixed.
pub fn aut_identity_functor(cat: &FinCategory) -> Enumerated<IdNatAut> {
    let isos: Vec<Vec<MorId>> = cat
        .object_ids()
        .map(|o| cat.endomorphisms(o).filter(|&m| cat.inverse(m).is_some()).collect())
        .collect();
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(cat.object_count());

    fn search(
        cat: &FinCategory,
        isos: &[Vec<MorId>],
        partial: &mut Vec<MorId>,
        out: &mut Vec<IdNatAut>,
    ) {
        let next = partial.len();
        if next == cat.object_count() {
            out.push(IdNatAut(partial.clone()));
            return;
        }
        for &c in &isos[next] {
            partial.push(c);
            let natural = cat.morphism_ids().all(|h| {
                let (i, j) = (cat.dom(h), cat.cod(h));
                if i > next || j > next || (i != next && j != next) {
                    return true;
                }
                cat.compose(h, partial[i]) == cat.compose(partial[j], h)
            });
            if natural {
                search(cat, isos, partial, out);
            }
            partial.pop();
        }
    }

    search(cat, &isos, &mut partial, &mut out);
    Enumerated::tabulate(out, |a, b| a.compose(cat, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::center;

    #[test]
    fn terminal_category_is_valid() {
        let t = FinCategory::terminal();
        assert_eq!(t.object_count(), 1);
        assert_eq!(t.morphism_count(), 1);
    }

    #[test]
    fn bz2_is_valid() {
        let c = FinCategory::one_object(&FinGroup::cyclic(2));
        let tau = c.morphism_index("1").unwrap();
        assert_eq!(c.compose(tau, tau), Some(c.identity(0)));
    }

    #[test]
    fn corrupted_associativity_is_reported() {
        // BZ3 with 1∘2 changed from 0 to 1; 1∘(1∘2) = 1 but (1∘1)∘2 = 2∘2 = 1 …
        // the validator must find some triple, so search for one exhaustively.
        let mut raw = FinCategory::one_object(&FinGroup::cyclic(3)).to_raw();
        let entry = raw.composition.iter_mut().find(|(g, f, _)| g == "1" && f == "2").unwrap();
        entry.2 = "1".into();
        match FinCategory::new(&raw) {
            Err(CategoryError::Laws(laws)) => {
                assert!(laws.iter().any(|l| matches!(l, LawViolation::Associativity { .. })
                    || matches!(l, LawViolation::Identity(_))));
            }
            other => panic!("expected law violation, got {other:?}"),
        }
    }

    #[test]
    fn rejects_dangling_and_non_composable() {
        let mut raw = FinCategory::arrow().to_raw();
        raw.composition.push(("f".into(), "f".into(), "f".into()));
        assert!(matches!(FinCategory::new(&raw), Err(CategoryError::NotComposable { .. })));
        let mut raw = FinCategory::arrow().to_raw();
        raw.morphisms.push(("h".into(), "0".into(), "nowhere".into()));
        assert_eq!(FinCategory::new(&raw), Err(CategoryError::Dangling("nowhere".into())));
    }

    #[test]
    fn missing_composite_is_a_law_violation() {
        let mut raw = FinCategory::arrow().to_raw();
        raw.composition.retain(|(g, f, _)| !(g == "f" && f == "id_0"));
        assert!(matches!(FinCategory::new(&raw), Err(CategoryError::Laws(_))));
    }

    #[test]
    fn raw_roundtrip() {
        for c in [FinCategory::cospan(), FinCategory::parallel_pair(), FinCategory::commutative_square()] {
            assert_eq!(FinCategory::new(&c.to_raw()).unwrap(), c);
        }
    }

    #[test]
    fn aut_id_orders() {
        assert_eq!(aut_identity_functor(&FinCategory::discrete(3)).order(), 1);
        assert_eq!(aut_identity_functor(&FinCategory::one_object(&FinGroup::cyclic(3))).order(), 3);
        assert_eq!(aut_identity_functor(&FinCategory::one_object(&FinGroup::symmetric(3))).order(), 1);
    }

    #[test]
    fn aut_id_of_bg_is_center() {
        for g in [FinGroup::dihedral(4), FinGroup::cyclic(6), FinGroup::symmetric(3), FinGroup::dihedral(3)] {
            let cat = FinCategory::one_object(&g);
            assert_eq!(aut_identity_functor(&cat).order(), center(&g).len());
        }
    }

    #[test]
    fn aut_id_members_are_valid_and_closed() {
        let cat = FinCategory::one_object(&FinGroup::dihedral(4));
        let auts = aut_identity_functor(&cat);
        assert!(auts.members().contains(&IdNatAut::identity(&cat)));
        for a in auts.members() {
            assert!(a.is_valid(&cat));
        }
    }
}
