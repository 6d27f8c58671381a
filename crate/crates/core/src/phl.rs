//! Partial Horn logic over multi-sorted signatures: terms, Horn sequents,
//! quasi-equational theories, finite partial structures and satisfaction.
//!
//! Only semantics is implemented. Whether a sequent is derivable in a theory
//! is never decided here; satisfaction in a given finite structure is.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fingroup::{Elem, FinGroup};

pub type SortId = usize;
pub type FunId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhlError {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(String),
    #[error("duplicate function symbol `{0}`")]
    DuplicateFun(String),
    #[error("unknown sort #{0}")]
    UnknownSort(SortId),
    #[error("unknown function symbol #{0}")]
    UnknownFun(FunId),
    #[error("`{fun}` expects {expected} argument(s), got {found}")]
    Arity { fun: String, expected: usize, found: usize },
    #[error("argument {position} of `{fun}` has the wrong sort")]
    ArgSort { fun: String, position: usize },
    #[error("the two sides of an equation have different sorts")]
    EquationSorts,
    #[error("variable `{0}` is not in the context")]
    UnboundVariable(String),
    #[error("variable `{0}` is used at a sort different from its declaration")]
    VariableSort(String),
    #[error("assignment for `{0}` has the wrong sort")]
    EnvSort(String),
    #[error("element #{elem} is not in the carrier of sort `{sort}`")]
    ElementOutOfRange { sort: String, elem: Elem },
    #[error("table of `{0}` has an entry of the wrong shape")]
    TableEntry(String),
    #[error("structure and theory have different signatures")]
    SignatureMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunSymbol {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

/// Sorts and function symbols; names are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<String>,
    funs: Vec<FunSymbol>,
}

impl Signature {
    pub fn new(sorts: Vec<String>, funs: Vec<FunSymbol>) -> Result<Self, PhlError> {
        for (i, s) in sorts.iter().enumerate() {
            if sorts[..i].contains(s) {
                return Err(PhlError::DuplicateSort(s.clone()));
            }
        }
        for (i, f) in funs.iter().enumerate() {
            if funs[..i].iter().any(|g| g.name == f.name) {
                return Err(PhlError::DuplicateFun(f.name.clone()));
            }
            if let Some(&bad) = f.args.iter().chain([&f.result]).find(|&&s| s >= sorts.len()) {
                return Err(PhlError::UnknownSort(bad));
            }
        }
        Ok(Signature { sorts, funs })
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn funs(&self) -> &[FunSymbol] {
        &self.funs
    }

    pub fn fun(&self, f: FunId) -> &FunSymbol {
        &self.funs[f]
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s]
    }

    pub fn sort_index(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn fun_index(&self, name: &str) -> Option<FunId> {
        self.funs.iter().position(|f| f.name == name)
    }
}

/// A term: a sorted variable or a function symbol applied to arguments.
/// Constants are 0-ary applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var { name: String, sort: SortId },
    App { fun: FunId, args: Vec<Term> },
}

impl Term {
    pub fn var(name: &str, sort: SortId) -> Self {
        Term::Var { name: name.to_string(), sort }
    }

    pub fn app(fun: FunId, args: Vec<Term>) -> Self {
        Term::App { fun, args }
    }

    pub fn constant(fun: FunId) -> Self {
        Term::App { fun, args: Vec::new() }
    }

    /// The sort of a well-sorted term.
    pub fn sort(&self, sig: &Signature) -> Result<SortId, PhlError> {
        match self {
            Term::Var { sort, .. } => {
                if *sort >= sig.sorts.len() {
                    return Err(PhlError::UnknownSort(*sort));
                }
                Ok(*sort)
            }
            Term::App { fun, args } => {
                let sym = sig.funs.get(*fun).ok_or(PhlError::UnknownFun(*fun))?;
                if sym.args.len() != args.len() {
                    return Err(PhlError::Arity { fun: sym.name.clone(), expected: sym.args.len(), found: args.len() });
                }
                for (position, (arg, &want)) in args.iter().zip(&sym.args).enumerate() {
                    if arg.sort(sig)? != want {
                        return Err(PhlError::ArgSort { fun: sym.name.clone(), position });
                    }
                }
                Ok(sym.result)
            }
        }
    }

    /// Free variables with their sorts, in order of first occurrence.
    pub fn variables(&self) -> Vec<(&str, SortId)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<(&'a str, SortId)>) {
        match self {
            Term::Var { name, sort } => {
                if !out.iter().any(|(n, _)| *n == name) {
                    out.push((name, *sort));
                }
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Renders as an s-expression; constants print as bare names.
    pub fn render(&self, sig: &Signature) -> String {
        match self {
            Term::Var { name, .. } => name.clone(),
            Term::App { fun, args } if args.is_empty() => sig.funs[*fun].name.clone(),
            Term::App { fun, args } => {
                let mut s = format!("({}", sig.funs[*fun].name);
                for a in args {
                    s.push(' ');
                    s.push_str(&a.render(sig));
                }
                s.push(')');
                s
            }
        }
    }
}

/// `lhs = rhs` between terms of one sort. `t = t` expresses `t↓`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn defined(t: Term) -> Self {
        Equation { lhs: t.clone(), rhs: t }
    }
}

/// A finite conjunction of equations; the empty conjunction is `⊤`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HornFormula(pub Vec<Equation>);

impl HornFormula {
    pub fn top() -> Self {
        HornFormula(Vec::new())
    }

    pub fn single(eq: Equation) -> Self {
        HornFormula(vec![eq])
    }
}

/// `premise ⊢^{context} conclusion`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornSequent {
    pub context: Vec<(String, SortId)>,
    pub premise: HornFormula,
    pub conclusion: HornFormula,
}

impl HornSequent {
    pub fn new(context: Vec<(String, SortId)>, premise: HornFormula, conclusion: HornFormula) -> Self {
        HornSequent { context, premise, conclusion }
    }

    /// Checks sorts of every equation and that variables are declared with
    /// matching sorts.
    pub fn check(&self, sig: &Signature) -> Result<(), PhlError> {
        for (_, s) in &self.context {
            if *s >= sig.sorts.len() {
                return Err(PhlError::UnknownSort(*s));
            }
        }
        for eq in self.premise.0.iter().chain(&self.conclusion.0) {
            if eq.lhs.sort(sig)? != eq.rhs.sort(sig)? {
                return Err(PhlError::EquationSorts);
            }
            for t in [&eq.lhs, &eq.rhs] {
                for (name, sort) in t.variables() {
                    match self.context.iter().find(|(n, _)| n == name) {
                        None => return Err(PhlError::UnboundVariable(name.to_string())),
                        Some((_, s)) if *s != sort => return Err(PhlError::VariableSort(name.to_string())),
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, sig: &Signature) -> String {
        let formula = |f: &HornFormula| {
            if f.0.is_empty() {
                return String::from("⊤");
            }
            let parts: Vec<String> = f
                .0
                .iter()
                .map(|eq| {
                    if eq.lhs == eq.rhs {
                        format!("{}↓", eq.lhs.render(sig))
                    } else {
                        format!("{} = {}", eq.lhs.render(sig), eq.rhs.render(sig))
                    }
                })
                .collect();
            parts.join(" ∧ ")
        };
        let ctx: Vec<String> = self.context.iter().map(|(n, s)| format!("{n}:{}", sig.sorts[*s])).collect();
        format!("{} ⊢[{}] {}", formula(&self.premise), ctx.join(","), formula(&self.conclusion))
    }
}

/// A signature together with a list of Horn-sequent axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    signature: Signature,
    axioms: Vec<HornSequent>,
}

impl Theory {
    pub fn new(signature: Signature, axioms: Vec<HornSequent>) -> Result<Self, PhlError> {
        for ax in &axioms {
            ax.check(&signature)?;
        }
        Ok(Theory { signature, axioms })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn axioms(&self) -> &[HornSequent] {
        &self.axioms
    }

    /// The single-sorted theory of groups: sort `X`, symbols `m`, `e`,
    /// `inv`; totality, associativity, unit and inverse axioms.
    pub fn groups() -> Self {
        let sig = Signature::new(
            vec!["X".into()],
            vec![
                FunSymbol { name: "m".into(), args: vec![0, 0], result: 0 },
                FunSymbol { name: "e".into(), args: vec![], result: 0 },
                FunSymbol { name: "inv".into(), args: vec![0], result: 0 },
            ],
        )
        .expect("group signature");
        let (m, e, inv) = (0, 1, 2);
        let v = |n: &str| Term::var(n, 0);
        let mul = |a: Term, b: Term| Term::app(m, vec![a, b]);
        let unit = || Term::constant(e);
        let inverse = |a: Term| Term::app(inv, vec![a]);
        let ctx = |names: &[&str]| names.iter().map(|n| (n.to_string(), 0)).collect::<Vec<_>>();
        let total = |names: &[&str], t: Term| {
            HornSequent::new(ctx(names), HornFormula::top(), HornFormula::single(Equation::defined(t)))
        };
        let law = |names: &[&str], l: Term, r: Term| {
            HornSequent::new(ctx(names), HornFormula::top(), HornFormula::single(Equation::new(l, r)))
        };
        let axioms = vec![
            total(&["x", "y"], mul(v("x"), v("y"))),
            total(&[], unit()),
            total(&["x"], inverse(v("x"))),
            law(&["x", "y", "z"], mul(mul(v("x"), v("y")), v("z")), mul(v("x"), mul(v("y"), v("z")))),
            law(&["x"], mul(v("x"), unit()), v("x")),
            law(&["x"], mul(unit(), v("x")), v("x")),
            law(&["x"], mul(v("x"), inverse(v("x"))), unit()),
            law(&["x"], mul(inverse(v("x")), v("x")), unit()),
        ];
        Theory::new(sig, axioms).expect("group axioms")
    }
}

/// Assignment of variables to `(sort, element)` pairs.
pub type Env = BTreeMap<String, (SortId, Elem)>;

/// Outcome of checking one sequent in one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// A violating assignment, in context order.
    Fails(Vec<Elem>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: usize,
    pub witness: Vec<Elem>,
}

/// Every failing axiom of a model check, with one witness each.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelReport {
    pub failures: Vec<AxiomFailure>,
}

impl ModelReport {
    pub fn is_model(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Finite carriers per sort and a partial table per function symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialStructure {
    signature: Signature,
    carriers: Vec<Vec<String>>,
    tables: Vec<BTreeMap<Vec<Elem>, Elem>>,
}

impl PartialStructure {
    pub fn new(
        signature: Signature,
        carriers: Vec<Vec<String>>,
        tables: Vec<BTreeMap<Vec<Elem>, Elem>>,
    ) -> Result<Self, PhlError> {
        if carriers.len() != signature.sorts.len() || tables.len() != signature.funs.len() {
            return Err(PhlError::SignatureMismatch);
        }
        for (sym, table) in signature.funs.iter().zip(&tables) {
            for (args, &out) in table {
                let shape_ok = args.len() == sym.args.len()
                    && args.iter().zip(&sym.args).all(|(&a, &s)| a < carriers[s].len())
                    && out < carriers[sym.result].len();
                if !shape_ok {
                    return Err(PhlError::TableEntry(sym.name.clone()));
                }
            }
        }
        Ok(PartialStructure { signature, carriers, tables })
    }

    /// A group as a (total) structure for [`Theory::groups`].
    pub fn from_group(group: &FinGroup) -> Self {
        let sig = Theory::groups().signature;
        let mut m = BTreeMap::new();
        for a in group.elements() {
            for b in group.elements() {
                m.insert(vec![a, b], group.mul(a, b));
            }
        }
        let e = BTreeMap::from([(Vec::new(), group.unit())]);
        let inv = group.elements().map(|a| (vec![a], group.inv(a))).collect();
        PartialStructure::new(sig, vec![group.names().to_vec()], vec![m, e, inv]).expect("group structure")
    }

    /// Reads a group back from a structure over the group signature, when
    /// the tables are total and satisfy the group laws.
    pub fn to_group(&self) -> Option<FinGroup> {
        let groups = Theory::groups();
        if self.signature != groups.signature || !self.check_model(&groups).ok()?.is_model() {
            return None;
        }
        let names = self.carriers[0].clone();
        let n = names.len();
        let table = (0..n).map(|a| (0..n).map(|b| self.tables[0][&vec![a, b]]).collect()).collect();
        FinGroup::from_table(names, table).ok()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn carrier(&self, s: SortId) -> &[String] {
        &self.carriers[s]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn table(&self, f: FunId) -> &BTreeMap<Vec<Elem>, Elem> {
        &self.tables[f]
    }

    pub fn apply(&self, f: FunId, args: &[Elem]) -> Option<Elem> {
        self.tables[f].get(args).copied()
    }

    /// Returns a copy with one table entry changed (`None` = undefined).
    pub fn with_entry(&self, f: FunId, args: Vec<Elem>, value: Option<Elem>) -> Result<Self, PhlError> {
        let mut tables = self.tables.clone();
        match value {
            Some(v) => {
                tables[f].insert(args, v);
            }
            None => {
                tables[f].remove(&args);
            }
        }
        PartialStructure::new(self.signature.clone(), self.carriers.clone(), tables)
    }

    /// Interprets `t` under `env`. `Ok(None)` means `t` is undefined there;
    /// errors are reserved for ill-sorted input.
    pub fn eval_term(&self, t: &Term, env: &Env) -> Result<Option<Elem>, PhlError> {
        t.sort(&self.signature)?;
        for (name, sort) in t.variables() {
            let &(s, a) = env.get(name).ok_or_else(|| PhlError::UnboundVariable(name.to_string()))?;
            if s != sort {
                return Err(PhlError::EnvSort(name.to_string()));
            }
            if a >= self.carriers[s].len() {
                return Err(PhlError::ElementOutOfRange { sort: self.signature.sorts[s].clone(), elem: a });
            }
        }
        Ok(self.eval_with(t, &|name| env.get(name).map(|&(_, a)| a)))
    }

    fn eval_with(&self, t: &Term, lookup: &dyn Fn(&str) -> Option<Elem>) -> Option<Elem> {
        match t {
            Term::Var { name, .. } => lookup(name),
            Term::App { fun, args } => {
                let vals = args.iter().map(|a| self.eval_with(a, lookup)).collect::<Option<Vec<_>>>()?;
                self.tables[*fun].get(&vals).copied()
            }
        }
    }

    fn satisfies(&self, f: &HornFormula, lookup: &dyn Fn(&str) -> Option<Elem>) -> bool {
        f.0.iter().all(|eq| match (self.eval_with(&eq.lhs, lookup), self.eval_with(&eq.rhs, lookup)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        })
    }

    /// Decides `premise^M ⊆ conclusion^M` by enumerating every assignment
    /// of the context.
    pub fn check_sequent(&self, s: &HornSequent) -> Result<Verdict, PhlError> {
        s.check(&self.signature)?;
        let sizes: Vec<usize> = s.context.iter().map(|(_, sort)| self.carriers[*sort].len()).collect();
        if sizes.contains(&0) {
            return Ok(Verdict::Holds);
        }
        let mut assignment = vec![0; sizes.len()];
        loop {
            let lookup = |name: &str| s.context.iter().position(|(n, _)| n == name).map(|i| assignment[i]);
            if self.satisfies(&s.premise, &lookup) && !self.satisfies(&s.conclusion, &lookup) {
                return Ok(Verdict::Fails(assignment));
            }
            let mut slot = sizes.len();
            loop {
                if slot == 0 {
                    return Ok(Verdict::Holds);
                }
                slot -= 1;
                assignment[slot] += 1;
                if assignment[slot] < sizes[slot] {
                    break;
                }
                assignment[slot] = 0;
            }
        }
    }

    /// Checks every axiom of `theory` and reports each failing one.
    pub fn check_model(&self, theory: &Theory) -> Result<ModelReport, PhlError> {
        if self.signature != theory.signature {
            return Err(PhlError::SignatureMismatch);
        }
        let mut report = ModelReport::default();
        for (axiom, s) in theory.axioms.iter().enumerate() {
            if let Verdict::Fails(witness) = self.check_sequent(s)? {
                report.failures.push(AxiomFailure { axiom, witness });
            }
        }
        Ok(report)
    }
}
