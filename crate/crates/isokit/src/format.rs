//! JSON documents: categories, groups, presheaves, natural transformations,
//! theories, structures and terms.
//!
//! Presheaves and natural transformations may reference other documents by
//! a path relative to the referencing file, or embed them inline.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use isokit_core::fincat::{CategoryError, LawViolation, RawCategory};
use isokit_core::fingroup::GroupError;
use isokit_core::phl::{Equation, FunSymbol, HornFormula, HornSequent, PartialStructure, PhlError, Signature, Theory};
use isokit_core::presheaf::PresheafError;
use isokit_core::{Elem, FinCategory, FinGroup, GroupHom, GroupPresheaf, NatTrans};

use crate::error::{Error, Result};
use crate::sexpr;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDecl {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDecl>,
    /// object → its identity morphism
    pub identities: BTreeMap<String, String>,
    /// `[g, f, g∘f]`
    pub composition: Vec<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub elements: Vec<String>,
    pub unit: String,
    /// `mul[a][b] = a·b`, rows and columns in `elements` order
    pub mul: Vec<Vec<String>>,
}

/// A document given by path or inline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafFile {
    pub category: Ref<CategoryFile>,
    pub on_objects: BTreeMap<String, Ref<GroupFile>>,
    /// morphism → images of the source elements, in source order.
    /// Identities may be omitted.
    pub on_morphisms: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatTransFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Ref<PresheafFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Ref<PresheafFile>>,
    /// object → images of the source elements, in source order
    pub components: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunDecl {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

/// Equations are `[lhs, rhs]`, or `[t]` for `t↓`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentDecl {
    /// `[variable, sort]`
    pub context: Vec<[String; 2]>,
    #[serde(default)]
    pub premise: Vec<Vec<String>>,
    pub conclusion: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryFile {
    pub sorts: Vec<String>,
    pub funs: Vec<FunDecl>,
    pub axioms: Vec<SequentDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    /// Only needed when the structure is validated on its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<Ref<TheoryFile>>,
    /// sort → element names
    pub carriers: BTreeMap<String, Vec<String>>,
    /// symbol → rows `[arg1, …, argn, value]`; missing rows are undefined
    pub tables: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFile {
    pub term: String,
    /// `A@i`, the sort and object of the indeterminate `x`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indet: Option<String>,
}

/// What a JSON document holds, guessed from its keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Category,
    Group,
    Presheaf,
    NatTrans,
    Theory,
    Structure,
    Term,
}

impl Kind {
    pub fn detect(value: &Value) -> Option<Kind> {
        let obj = value.as_object()?;
        let table = [
            ("composition", Kind::Category),
            ("mul", Kind::Group),
            ("on_objects", Kind::Presheaf),
            ("components", Kind::NatTrans),
            ("axioms", Kind::Theory),
            ("carriers", Kind::Structure),
            ("term", Kind::Term),
        ];
        table.into_iter().find(|(k, _)| obj.contains_key(*k)).map(|(_, kind)| kind)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Category => "category",
            Kind::Group => "group",
            Kind::Presheaf => "presheaf",
            Kind::NatTrans => "nat-trans",
            Kind::Theory => "theory",
            Kind::Structure => "structure",
            Kind::Term => "term",
        }
    }
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))
}

pub fn from_value<T: DeserializeOwned>(value: Value, what: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::parse(format!("not a {what} document: {e}")))
}

pub fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    from_value(read_json(path)?, what).map_err(|e| e.context(path.display()))
}

/// Returns the referenced document and the directory that its own
/// references are relative to.
pub fn resolve<T: DeserializeOwned + Clone>(r: &Ref<T>, dir: &Path, what: &str) -> Result<(T, PathBuf)> {
    match r {
        Ref::Inline(t) => Ok((t.clone(), dir.to_path_buf())),
        Ref::Path(p) => {
            let path = dir.join(p);
            Ok((load(&path, what)?, dir_of(&path)))
        }
    }
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize> {
    names.iter().position(|n| n == name).ok_or_else(|| Error::parse(format!("unknown {what} `{name}`")))
}

// ---- categories ----

fn law_json(v: &LawViolation) -> Value {
    match v {
        LawViolation::MissingIdentity(o) => json!({ "law": "identity-exists", "object": o }),
        LawViolation::IdentityNotEndo { obj, mor } => json!({ "law": "identity-typing", "object": obj, "morphism": mor }),
        LawViolation::MissingComposite { g, f } => json!({ "law": "composite-exists", "g": g, "f": f }),
        LawViolation::CompositeTyping { g, f, gf } => json!({ "law": "composite-typing", "g": g, "f": f, "gf": gf }),
        LawViolation::Identity(m) => json!({ "law": "identity", "morphism": m }),
        LawViolation::Associativity { h, g, f } => json!({ "law": "associativity", "h": h, "g": g, "f": f }),
    }
}

pub fn category_error(e: CategoryError) -> Error {
    match e {
        CategoryError::DuplicateName(_) | CategoryError::Dangling(_) => Error::parse(e),
        CategoryError::Laws(ref laws) => {
            let details = json!({ "violations": laws.iter().map(law_json).collect::<Vec<_>>() });
            Error::invalid(&e, details)
        }
        CategoryError::NotComposable { ref g, ref f } | CategoryError::Conflicting { ref g, ref f } => {
            let details = json!({ "g": g, "f": f });
            Error::invalid(&e, details)
        }
    }
}

impl CategoryFile {
    pub fn build(&self) -> Result<FinCategory> {
        let raw = RawCategory {
            objects: self.objects.clone(),
            morphisms: self.morphisms.iter().map(|m| (m.name.clone(), m.dom.clone(), m.cod.clone())).collect(),
            identities: self.identities.iter().map(|(o, m)| (o.clone(), m.clone())).collect(),
            composition: self.composition.iter().map(|[g, f, gf]| (g.clone(), f.clone(), gf.clone())).collect(),
        };
        FinCategory::new(&raw).map_err(category_error)
    }

    pub fn from_category(cat: &FinCategory) -> Self {
        let raw = cat.to_raw();
        CategoryFile {
            objects: raw.objects,
            morphisms: raw.morphisms.into_iter().map(|(name, dom, cod)| MorphismDecl { name, dom, cod }).collect(),
            identities: raw.identities.into_iter().collect(),
            composition: raw.composition.into_iter().map(|(g, f, gf)| [g, f, gf]).collect(),
        }
    }
}

// ---- groups ----

pub fn group_error(e: GroupError) -> Error {
    match e {
        GroupError::Empty | GroupError::DuplicateName(_) | GroupError::UnknownElement(_) | GroupError::TableShape => {
            Error::parse(e)
        }
        GroupError::NotAssociative { ref a, ref b, ref c } => {
            let details = json!({ "law": "associativity", "a": a, "b": b, "c": c });
            Error::invalid(&e, details)
        }
        GroupError::NoInverse(ref a) => {
            let details = json!({ "law": "inverse", "element": a });
            Error::invalid(&e, details)
        }
        GroupError::WrongUnit { ref declared, ref actual } => {
            let details = json!({ "law": "unit", "declared": declared, "actual": actual });
            Error::invalid(&e, details)
        }
        GroupError::NoUnit | GroupError::OutOfRange(_) => Error::invalid(&e, json!({ "law": "unit" })),
    }
}

impl GroupFile {
    pub fn build(&self) -> Result<FinGroup> {
        let names = &self.elements;
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::parse(format!("duplicate element name `{n}`")));
            }
        }
        let table = self
            .mul
            .iter()
            .map(|row| row.iter().map(|x| index_of(names, x, "element")).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let declared = index_of(names, &self.unit, "element")?;
        let group = FinGroup::from_table(names.clone(), table).map_err(group_error)?;
        if group.unit() != declared {
            return Err(group_error(GroupError::WrongUnit {
                declared: self.unit.clone(),
                actual: group.name(group.unit()).to_string(),
            }));
        }
        Ok(group)
    }

    pub fn from_group(g: &FinGroup) -> Self {
        GroupFile {
            elements: g.names().to_vec(),
            unit: g.name(g.unit()).to_string(),
            mul: g.elements().map(|a| g.elements().map(|b| g.name(g.mul(a, b)).to_string()).collect()).collect(),
        }
    }
}

// ---- presheaves and natural transformations ----

pub fn presheaf_error(e: PresheafError) -> Error {
    match e {
        PresheafError::Laws(ref v) => {
            let details = json!({ "violations": v.iter().map(|x| x.to_string()).collect::<Vec<_>>() });
            Error::invalid(&e, details)
        }
        PresheafError::Shape { .. } | PresheafError::BaseMismatch => Error::parse(e),
    }
}

fn images(names: &[String], source: &FinGroup, target: &FinGroup, what: &str) -> Result<GroupHom> {
    if names.len() != source.order() {
        return Err(Error::parse(format!("{what}: expected {} images, found {}", source.order(), names.len())));
    }
    let map = names.iter().map(|n| index_of(target.names(), n, "element")).collect::<Result<Vec<Elem>>>()?;
    Ok(GroupHom(map))
}

fn hom_names(h: &GroupHom, target: &FinGroup) -> Vec<String> {
    h.0.iter().map(|&a| target.name(a).to_string()).collect()
}

fn reject_extra<'a>(keys: impl Iterator<Item = &'a String>, known: &[&str], what: &str) -> Result<()> {
    for k in keys {
        if !known.contains(&k.as_str()) {
            return Err(Error::parse(format!("unknown {what} `{k}`")));
        }
    }
    Ok(())
}

impl PresheafFile {
    pub fn build(&self, dir: &Path) -> Result<GroupPresheaf> {
        let (cat, _) = resolve(&self.category, dir, "category")?;
        let base = cat.build()?;
        let objects: Vec<&str> = base.object_ids().map(|o| base.object_name(o)).collect();
        reject_extra(self.on_objects.keys(), &objects, "object")?;
        let groups = objects
            .iter()
            .map(|o| {
                let r = self.on_objects.get(*o).ok_or_else(|| Error::parse(format!("no group for object `{o}`")))?;
                let (g, _) = resolve(r, dir, "group")?;
                g.build().map_err(|e| e.context(format!("group at `{o}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let morphisms: Vec<&str> = base.morphism_ids().map(|m| base.morphism_name(m)).collect();
        reject_extra(self.on_morphisms.keys(), &morphisms, "morphism")?;
        let maps = base
            .morphism_ids()
            .map(|m| {
                let (src, tgt) = (&groups[base.dom(m)], &groups[base.cod(m)]);
                match self.on_morphisms.get(base.morphism_name(m)) {
                    Some(names) => images(names, src, tgt, base.morphism_name(m)),
                    None if base.is_identity(m) => Ok(GroupHom::identity(src.order())),
                    None => Err(Error::parse(format!("no map for morphism `{}`", base.morphism_name(m)))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GroupPresheaf::new(base, groups, maps).map_err(presheaf_error)
    }

    /// A self-contained document; identity maps are left out.
    pub fn from_presheaf(p: &GroupPresheaf) -> Self {
        let base = p.base();
        PresheafFile {
            category: Ref::Inline(CategoryFile::from_category(base)),
            on_objects: base
                .object_ids()
                .map(|o| (base.object_name(o).to_string(), Ref::Inline(GroupFile::from_group(p.group(o)))))
                .collect(),
            on_morphisms: base
                .morphism_ids()
                .filter(|&m| !base.is_identity(m))
                .map(|m| (base.morphism_name(m).to_string(), hom_names(p.map(m), p.group(base.cod(m)))))
                .collect(),
        }
    }
}

pub fn load_presheaf(path: &Path) -> Result<GroupPresheaf> {
    let file: PresheafFile = load(path, "presheaf")?;
    file.build(&dir_of(path)).map_err(|e| e.context(path.display()))
}

impl NatTransFile {
    /// Builds `τ: source → target`; a missing endpoint defaults to
    /// `fallback`.
    pub fn build(&self, dir: &Path, fallback: Option<&GroupPresheaf>) -> Result<(GroupPresheaf, GroupPresheaf, NatTrans)> {
        let endpoint = |r: &Option<Ref<PresheafFile>>, which: &str| -> Result<GroupPresheaf> {
            match (r, fallback) {
                (Some(r), _) => {
                    let (p, d) = resolve(r, dir, "presheaf")?;
                    p.build(&d)
                }
                (None, Some(f)) => Ok(f.clone()),
                (None, None) => Err(Error::parse(format!("natural transformation has no {which}"))),
            }
        };
        let source = endpoint(&self.source, "source")?;
        let target = endpoint(&self.target, "target")?;
        let base = source.base();
        let objects: Vec<&str> = base.object_ids().map(|o| base.object_name(o)).collect();
        reject_extra(self.components.keys(), &objects, "object")?;
        let comps = base
            .object_ids()
            .map(|o| {
                let name = base.object_name(o);
                let names = self.components.get(name).ok_or_else(|| Error::parse(format!("no component at `{name}`")))?;
                images(names, source.group(o), target.group(o), name)
            })
            .collect::<Result<Vec<_>>>()?;
        let t = NatTrans::new(&source, &target, comps).map_err(presheaf_error)?;
        Ok((source, target, t))
    }

    /// Components only; the endpoints are left implicit.
    pub fn from_nat_trans(target: &GroupPresheaf, t: &NatTrans) -> Self {
        let base = target.base();
        NatTransFile {
            source: None,
            target: None,
            components: base
                .object_ids()
                .map(|o| (base.object_name(o).to_string(), hom_names(t.component(o), target.group(o))))
                .collect(),
        }
    }
}

// ---- theories and structures ----

fn phl_error(e: PhlError) -> Error {
    Error::parse(e)
}

impl TheoryFile {
    pub fn build(&self) -> Result<Theory> {
        let sort = |s: &str| index_of(&self.sorts, s, "sort");
        let funs = self
            .funs
            .iter()
            .map(|f| {
                let args = f.args.iter().map(|a| sort(a)).collect::<Result<Vec<_>>>()?;
                Ok(FunSymbol { name: f.name.clone(), args, result: sort(&f.result)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let sig = Signature::new(self.sorts.clone(), funs).map_err(phl_error)?;
        let axioms = self
            .axioms
            .iter()
            .enumerate()
            .map(|(k, ax)| {
                let context = ax
                    .context
                    .iter()
                    .map(|[v, s]| Ok((v.clone(), sort(s)?)))
                    .collect::<Result<Vec<_>>>()?;
                let formula = |eqs: &[Vec<String>]| -> Result<HornFormula> {
                    let eqs = eqs
                        .iter()
                        .map(|eq| {
                            let term = |s: &String| sexpr::parse_phl(s, &sig, &context).map_err(Error::parse);
                            match eq.as_slice() {
                                [t] => Ok(Equation::defined(term(t)?)),
                                [l, r] => Ok(Equation::new(term(l)?, term(r)?)),
                                _ => Err(Error::parse("an equation has one or two sides")),
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(HornFormula(eqs))
                };
                let seq = HornSequent::new(context.clone(), formula(&ax.premise)?, formula(&ax.conclusion)?);
                seq.check(&sig).map_err(|e| Error::parse(format!("axiom #{k}: {e}")))?;
                Ok(seq)
            })
            .collect::<Result<Vec<_>>>()?;
        Theory::new(sig, axioms).map_err(phl_error)
    }

    pub fn from_theory(t: &Theory) -> Self {
        let sig = t.signature();
        let sort = |s: usize| sig.sort_name(s).to_string();
        let formula = |f: &HornFormula| {
            f.0.iter()
                .map(|eq| {
                    if eq.lhs == eq.rhs {
                        vec![sexpr::print_phl(&eq.lhs, sig)]
                    } else {
                        vec![sexpr::print_phl(&eq.lhs, sig), sexpr::print_phl(&eq.rhs, sig)]
                    }
                })
                .collect()
        };
        TheoryFile {
            sorts: sig.sorts().to_vec(),
            funs: sig
                .funs()
                .iter()
                .map(|f| FunDecl { name: f.name.clone(), args: f.args.iter().map(|&a| sort(a)).collect(), result: sort(f.result) })
                .collect(),
            axioms: t
                .axioms()
                .iter()
                .map(|a| SequentDecl {
                    context: a.context.iter().map(|(v, s)| [v.clone(), sort(*s)]).collect(),
                    premise: formula(&a.premise),
                    conclusion: formula(&a.conclusion),
                })
                .collect(),
        }
    }
}

impl StructureFile {
    pub fn build(&self, sig: &Signature) -> Result<PartialStructure> {
        reject_extra(self.carriers.keys(), &sig.sorts().iter().map(String::as_str).collect::<Vec<_>>(), "sort")?;
        let names: Vec<&str> = sig.funs().iter().map(|f| f.name.as_str()).collect();
        reject_extra(self.tables.keys(), &names, "function symbol")?;
        let carriers = sig
            .sorts()
            .iter()
            .map(|s| self.carriers.get(s).cloned().ok_or_else(|| Error::parse(format!("no carrier for sort `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let tables = sig
            .funs()
            .iter()
            .map(|f| {
                let mut table = BTreeMap::new();
                for row in self.tables.get(&f.name).map(Vec::as_slice).unwrap_or_default() {
                    if row.len() != f.args.len() + 1 {
                        return Err(Error::parse(format!("row of `{}` needs {} entries", f.name, f.args.len() + 1)));
                    }
                    let args = row[..f.args.len()]
                        .iter()
                        .zip(&f.args)
                        .map(|(x, &s)| index_of(&carriers[s], x, "element"))
                        .collect::<Result<Vec<_>>>()?;
                    let value = index_of(&carriers[f.result], &row[f.args.len()], "element")?;
                    if table.insert(args, value).is_some() {
                        return Err(Error::parse(format!("two rows of `{}` share their arguments", f.name)));
                    }
                }
                Ok(table)
            })
            .collect::<Result<Vec<_>>>()?;
        PartialStructure::new(sig.clone(), carriers, tables).map_err(phl_error)
    }

    pub fn from_structure(m: &PartialStructure) -> Self {
        let sig = m.signature();
        StructureFile {
            theory: None,
            carriers: sig.sorts().iter().enumerate().map(|(s, name)| (name.clone(), m.carrier(s).to_vec())).collect(),
            tables: sig
                .funs()
                .iter()
                .enumerate()
                .map(|(f, sym)| {
                    let rows = m
                        .table(f)
                        .iter()
                        .map(|(args, &v)| {
                            let mut row: Vec<String> =
                                args.iter().zip(&sym.args).map(|(&a, &s)| m.carrier(s)[a].clone()).collect();
                            row.push(m.carrier(sym.result)[v].clone());
                            row
                        })
                        .collect();
                    (sym.name.clone(), rows)
                })
                .collect(),
        }
    }
}

pub fn load_category(path: &Path) -> Result<FinCategory> {
    load::<CategoryFile>(path, "category")?.build().map_err(|e| e.context(path.display()))
}

pub fn load_group(path: &Path) -> Result<FinGroup> {
    load::<GroupFile>(path, "group")?.build().map_err(|e| e.context(path.display()))
}

pub fn load_theory(path: &Path) -> Result<Theory> {
    load::<TheoryFile>(path, "theory")?.build().map_err(|e| e.context(path.display()))
}

pub fn load_structure(path: &Path, sig: &Signature) -> Result<PartialStructure> {
    load::<StructureFile>(path, "structure")?.build(sig).map_err(|e| e.context(path.display()))
}

pub fn load_nat_trans(path: &Path, fallback: Option<&GroupPresheaf>) -> Result<(GroupPresheaf, GroupPresheaf, NatTrans)> {
    load::<NatTransFile>(path, "natural transformation")?
        .build(&dir_of(path), fallback)
        .map_err(|e| e.context(path.display()))
}

/// Renders with sorted keys and a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("documents serialize")
}
