//! Closed terms over `Σ^J(M, x_{A^i})` and the α-rewriting that pushes the
//! functorial-action symbols `α_f` down onto the indeterminate.
//!
//! Terms live in a [`TermStore`] which interns every node, so syntactic
//! equality is equality of [`TermId`]s. A store borrows the functor `M`
//! whose elements the constants `c_{A^i,s}` name; it is mutated on every
//! insertion and is meant to be owned by a single worker.
//!
//! The rewrite system is
//!
//! ```text
//! α_id(t)          → t
//! α_g(α_f(t))      → α_{g∘f}(t)
//! α_f(g^i(t₁…tₙ))  → g^j(α_f(t₁)…α_f(tₙ))
//! α_f(c_{A^i,s})   → c_{A^j,F(f)(s)}
//! ```
//!
//! The last rule evaluates diagram constants. It is not one of the axioms of
//! `T^J` but holds in its diagram theory, and without it normal forms would
//! keep α-symbols above constants.
//!
//! Equality of normal forms is a sound test for provable equality in
//! `T^J(M, x)`. Completeness is only claimed for the α-fragment (terms that
//! differ by these rules); two terms that are equal only by an axiom of the
//! base theory normalize to different terms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fincat::{FinCategory, MorId, ObjId};
use crate::fingroup::Elem;
use crate::phl::{FunId, SortId};
use crate::tj::ModelFunctor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One interned node; children are ids in the same store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    /// `x_{A^i}`
    Indet { sort: SortId, obj: ObjId },
    /// `c_{A^i,s}`
    Const { sort: SortId, obj: ObjId, elem: Elem },
    /// `g^i(args)`
    Op { fun: FunId, obj: ObjId, args: Vec<TermId> },
    /// `α_f^A(arg)`
    Alpha { mor: MorId, sort: SortId, arg: TermId },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error("unknown sort #{0}")]
    UnknownSort(SortId),
    #[error("unknown object #{0}")]
    UnknownObject(ObjId),
    #[error("unknown morphism #{0}")]
    UnknownMorphism(MorId),
    #[error("unknown function symbol #{0}")]
    UnknownFun(FunId),
    #[error("element #{elem} is not in the carrier")]
    UnknownElement { elem: Elem },
    #[error("wrong number of arguments: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("argument {position} has the wrong sort")]
    ArgSort { position: usize },
    #[error("α_f is applied to a term at the wrong object")]
    ObjectMismatch,
    #[error("term is not α-restricted")]
    NotAlphaRestricted,
    #[error("term is not {0}-local")]
    NotLocal(ObjId),
    #[error("morphism #{0} is not an endomorphism")]
    NotEndo(MorId),
    #[error("term mentions more than one indeterminate")]
    MixedIndeterminates,
    #[error("term still carries morphism subscripts")]
    Subscripted,
}

/// Redex selection for the stepwise normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostInnermost,
    RightmostOutermost,
}

/// Result of stepwise normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub normal_form: TermId,
    pub steps: usize,
    /// Whether the interpretation measure dropped on every step.
    pub strictly_decreasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportMode {
    /// `u[f]`
    Bracket,
    /// `u^f`, the normal form of `α_f(u)`
    Push,
}

/// A term of `Σ(M^k)` extended with indeterminates: `x_f^A` for `θ`, or a
/// plain `x_A` after `θ*` (subscript `None`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentTerm {
    Indet { sort: SortId, subscript: Option<MorId> },
    Const { sort: SortId, elem: Elem },
    Op { fun: FunId, args: Vec<ComponentTerm> },
}

impl ComponentTerm {
    /// Subscripts of the indeterminates occurring in the term.
    pub fn subscripts(&self) -> BTreeSet<MorId> {
        let mut out = BTreeSet::new();
        self.collect_subscripts(&mut out);
        out
    }

    fn collect_subscripts(&self, out: &mut BTreeSet<MorId>) {
        match self {
            ComponentTerm::Indet { subscript: Some(f), .. } => {
                out.insert(*f);
            }
            ComponentTerm::Indet { .. } | ComponentTerm::Const { .. } => {}
            ComponentTerm::Op { args, .. } => args.iter().for_each(|a| a.collect_subscripts(out)),
        }
    }

    fn erase(&self) -> ComponentTerm {
        match self {
            ComponentTerm::Indet { sort, .. } => ComponentTerm::Indet { sort: *sort, subscript: None },
            ComponentTerm::Const { .. } => self.clone(),
            ComponentTerm::Op { fun, args } => ComponentTerm::Op { fun: *fun, args: args.iter().map(Self::erase).collect() },
        }
    }
}

/// The image of a term under `θ` or `θ*`, living at `object`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaTerm {
    pub object: ObjId,
    pub body: ComponentTerm,
}

/// Interning arena of terms over one functor.
#[derive(Debug, Clone)]
pub struct TermStore<'m> {
    functor: &'m ModelFunctor,
    nodes: Vec<Node>,
    sorts: Vec<(SortId, ObjId)>,
    index: BTreeMap<Node, TermId>,
    normal: BTreeMap<TermId, TermId>,
}

impl<'m> TermStore<'m> {
    pub fn new(functor: &'m ModelFunctor) -> Self {
        TermStore { functor, nodes: Vec::new(), sorts: Vec::new(), index: BTreeMap::new(), normal: BTreeMap::new() }
    }

    pub fn functor(&self) -> &'m ModelFunctor {
        self.functor
    }

    pub fn category(&self) -> &'m FinCategory {
        self.functor.category()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, t: TermId) -> &Node {
        &self.nodes[t.index()]
    }

    /// `(A, i)` for a term of sort `A^i`.
    pub fn sort(&self, t: TermId) -> (SortId, ObjId) {
        self.sorts[t.index()]
    }

    fn intern(&mut self, node: Node, sort: (SortId, ObjId)) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(u32::try_from(self.nodes.len()).expect("term store overflow"));
        self.nodes.push(node.clone());
        self.sorts.push(sort);
        self.index.insert(node, id);
        id
    }

    fn check_sort(&self, sort: SortId) -> Result<(), AlphaError> {
        if sort < self.functor.signature().sorts().len() {
            Ok(())
        } else {
            Err(AlphaError::UnknownSort(sort))
        }
    }

    fn check_obj(&self, obj: ObjId) -> Result<(), AlphaError> {
        if obj < self.category().object_count() {
            Ok(())
        } else {
            Err(AlphaError::UnknownObject(obj))
        }
    }

    pub fn indet(&mut self, sort: SortId, obj: ObjId) -> Result<TermId, AlphaError> {
        self.check_sort(sort)?;
        self.check_obj(obj)?;
        Ok(self.intern(Node::Indet { sort, obj }, (sort, obj)))
    }

    pub fn constant(&mut self, sort: SortId, obj: ObjId, elem: Elem) -> Result<TermId, AlphaError> {
        self.check_sort(sort)?;
        self.check_obj(obj)?;
        if elem >= self.functor.component(obj).carrier(sort).len() {
            return Err(AlphaError::UnknownElement { elem });
        }
        Ok(self.intern(Node::Const { sort, obj, elem }, (sort, obj)))
    }

    /// `g^i(args)`; every argument must sit at object `i` with the sort
    /// the symbol expects.
    pub fn op(&mut self, fun: FunId, obj: ObjId, args: Vec<TermId>) -> Result<TermId, AlphaError> {
        self.check_obj(obj)?;
        let sym = self.functor.signature().funs().get(fun).ok_or(AlphaError::UnknownFun(fun))?;
        if sym.args.len() != args.len() {
            return Err(AlphaError::Arity { expected: sym.args.len(), found: args.len() });
        }
        for (position, (&a, &want)) in args.iter().zip(&sym.args).enumerate() {
            if self.sort(a) != (want, obj) {
                return Err(AlphaError::ArgSort { position });
            }
        }
        let result = sym.result;
        Ok(self.intern(Node::Op { fun, obj, args }, (result, obj)))
    }

    /// `α_f^A(arg)` where `arg : A^{dom f}`.
    pub fn alpha(&mut self, mor: MorId, arg: TermId) -> Result<TermId, AlphaError> {
        if mor >= self.category().morphism_count() {
            return Err(AlphaError::UnknownMorphism(mor));
        }
        let (sort, obj) = self.sort(arg);
        if obj != self.category().dom(mor) {
            return Err(AlphaError::ObjectMismatch);
        }
        let cod = self.category().cod(mor);
        Ok(self.intern(Node::Alpha { mor, sort, arg }, (sort, cod)))
    }

    fn alpha_unchecked(&mut self, mor: MorId, arg: TermId) -> TermId {
        let sort = self.sort(arg).0;
        let cod = self.category().cod(mor);
        self.intern(Node::Alpha { mor, sort, arg }, (sort, cod))
    }

    fn op_unchecked(&mut self, fun: FunId, obj: ObjId, args: Vec<TermId>) -> TermId {
        let result = self.functor.signature().fun(fun).result;
        self.intern(Node::Op { fun, obj, args }, (result, obj))
    }

    fn const_unchecked(&mut self, sort: SortId, obj: ObjId, elem: Elem) -> TermId {
        self.intern(Node::Const { sort, obj, elem }, (sort, obj))
    }

    pub fn children(&self, t: TermId) -> Vec<TermId> {
        match self.node(t) {
            Node::Indet { .. } | Node::Const { .. } => Vec::new(),
            Node::Op { args, .. } => args.clone(),
            Node::Alpha { arg, .. } => vec![*arg],
        }
    }

    pub fn depth(&self, t: TermId) -> usize {
        1 + self.children(t).into_iter().map(|c| self.depth(c)).max().unwrap_or(0)
    }

    pub fn size(&self, t: TermId) -> usize {
        1 + self.children(t).into_iter().map(|c| self.size(c)).sum::<usize>()
    }

    /// The indeterminates `(A, i)` occurring in `t`.
    pub fn indeterminates(&self, t: TermId) -> BTreeSet<(SortId, ObjId)> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            match self.node(u) {
                Node::Indet { sort, obj } => {
                    out.insert((*sort, *obj));
                }
                _ => stack.extend(self.children(u)),
            }
        }
        out
    }

    /// Polynomial interpretation `[x] = [c] = 2`, `[g(t⃗)] = Σ[tₖ] + 1`,
    /// `[α(t)] = 2[t]`. Every rewrite step strictly decreases it, and it is
    /// strictly monotone in each argument, so rewriting terminates.
    pub fn measure(&self, t: TermId) -> u128 {
        match self.node(t) {
            Node::Indet { .. } | Node::Const { .. } => 2,
            Node::Op { args, .. } => args.iter().map(|&a| self.measure(a)).fold(1u128, u128::saturating_add),
            Node::Alpha { arg, .. } => self.measure(*arg).saturating_mul(2),
        }
    }

    /// Whether every α-subterm is `α_f(x)` applied directly to an
    /// indeterminate.
    pub fn is_alpha_restricted(&self, t: TermId) -> bool {
        match self.node(t) {
            Node::Indet { .. } | Node::Const { .. } => true,
            Node::Op { args, .. } => args.iter().all(|&a| self.is_alpha_restricted(a)),
            Node::Alpha { arg, .. } => matches!(self.node(*arg), Node::Indet { .. }),
        }
    }

    /// Whether every subterm of `t` has a sort at object `i`.
    pub fn is_local(&self, t: TermId, i: ObjId) -> bool {
        self.sort(t).1 == i && self.children(t).into_iter().all(|c| self.is_local(c, i))
    }

    /// The object `i` for which `t` is `i`-local, if any.
    pub fn locality(&self, t: TermId) -> Option<ObjId> {
        let i = self.sort(t).1;
        self.is_local(t, i).then_some(i)
    }

    fn require_local_restricted(&self, u: TermId) -> Result<ObjId, AlphaError> {
        if !self.is_alpha_restricted(u) {
            return Err(AlphaError::NotAlphaRestricted);
        }
        let i = self.sort(u).1;
        if !self.is_local(u, i) {
            return Err(AlphaError::NotLocal(i));
        }
        Ok(i)
    }

    /// The α-restricted normal form of `t`.
    pub fn normalize(&mut self, t: TermId) -> TermId {
        if let Some(&n) = self.normal.get(&t) {
            return n;
        }
        let n = match self.node(t).clone() {
            Node::Indet { .. } | Node::Const { .. } => t,
            Node::Op { fun, obj, args } => {
                let args = args.into_iter().map(|a| self.normalize(a)).collect();
                self.op_unchecked(fun, obj, args)
            }
            Node::Alpha { mor, arg, .. } => {
                let arg = self.normalize(arg);
                self.push_normal(mor, arg)
            }
        };
        self.normal.insert(t, n);
        n
    }

    /// Normal form of `α_f(n)` for a normal `n`.
    fn push_normal(&mut self, f: MorId, n: TermId) -> TermId {
        let cat = self.functor.category();
        if cat.is_identity(f) {
            return n;
        }
        match self.node(n).clone() {
            Node::Indet { .. } => self.alpha_unchecked(f, n),
            Node::Alpha { mor: g, arg, .. } => {
                let fg = cat.compose(f, g).expect("typed composite");
                if cat.is_identity(fg) {
                    arg
                } else {
                    self.alpha_unchecked(fg, arg)
                }
            }
            Node::Const { sort, elem, .. } => {
                let moved = self.functor.map(f, sort)[elem];
                self.const_unchecked(sort, cat.cod(f), moved)
            }
            Node::Op { fun, args, .. } => {
                let args = args.into_iter().map(|a| self.push_normal(f, a)).collect();
                self.op_unchecked(fun, cat.cod(f), args)
            }
        }
    }

    fn is_redex(&self, t: TermId) -> bool {
        match self.node(t) {
            Node::Alpha { mor, arg, .. } => {
                self.category().is_identity(*mor) || !matches!(self.node(*arg), Node::Indet { .. })
            }
            _ => false,
        }
    }

    /// Contracts the redex at the root of `t`.
    fn contract(&mut self, t: TermId) -> TermId {
        let cat = self.functor.category();
        let Node::Alpha { mor: f, arg, .. } = self.node(t).clone() else {
            unreachable!("contract on a non-redex")
        };
        if cat.is_identity(f) {
            return arg;
        }
        match self.node(arg).clone() {
            Node::Alpha { mor: g, arg: inner, .. } => {
                let fg = cat.compose(f, g).expect("typed composite");
                self.alpha_unchecked(fg, inner)
            }
            Node::Op { fun, args, .. } => {
                let args = args.into_iter().map(|a| self.alpha_unchecked(f, a)).collect();
                self.op_unchecked(fun, cat.cod(f), args)
            }
            Node::Const { sort, elem, .. } => {
                let moved = self.functor.map(f, sort)[elem];
                self.const_unchecked(sort, cat.cod(f), moved)
            }
            Node::Indet { .. } => unreachable!("α_f(x) with f not an identity is not a redex"),
        }
    }

    fn rebuild(&mut self, t: TermId, position: usize, child: TermId) -> TermId {
        match self.node(t).clone() {
            Node::Op { fun, obj, mut args } => {
                args[position] = child;
                self.op_unchecked(fun, obj, args)
            }
            Node::Alpha { mor, .. } => self.alpha_unchecked(mor, child),
            _ => unreachable!("leaves have no children"),
        }
    }

    /// Performs one rewrite step, or returns `None` on a normal form.
    pub fn step(&mut self, t: TermId, strategy: Strategy) -> Option<TermId> {
        let children = self.children(t);
        match strategy {
            Strategy::LeftmostInnermost => {
                for (k, c) in children.into_iter().enumerate() {
                    if let Some(c2) = self.step(c, strategy) {
                        return Some(self.rebuild(t, k, c2));
                    }
                }
                self.is_redex(t).then(|| self.contract(t))
            }
            Strategy::RightmostOutermost => {
                if self.is_redex(t) {
                    return Some(self.contract(t));
                }
                for (k, c) in children.into_iter().enumerate().rev() {
                    if let Some(c2) = self.step(c, strategy) {
                        return Some(self.rebuild(t, k, c2));
                    }
                }
                None
            }
        }
    }

    /// Rewrites to normal form one step at a time, tracking the measure.
    pub fn normalize_with(&mut self, t: TermId, strategy: Strategy) -> Trace {
        let mut current = t;
        let mut m = self.measure(t);
        let mut steps = 0;
        let mut strictly_decreasing = true;
        while let Some(next) = self.step(current, strategy) {
            let m2 = self.measure(next);
            strictly_decreasing &= m2 < m;
            m = m2;
            current = next;
            steps += 1;
        }
        Trace { normal_form: current, steps, strictly_decreasing }
    }

    /// `u[f]` (bracket) or `u^f` (push).
    pub fn local_transport(&mut self, u: TermId, f: MorId, mode: TransportMode) -> Result<TermId, AlphaError> {
        match mode {
            TransportMode::Bracket => self.bracket(u, f),
            TransportMode::Push => self.push(u, f),
        }
    }

    /// `u[f]` for an `i`-local `u` and `f: j → i`: the indeterminate moves
    /// from `x_{A^i}` to `x_{A^j}`.
    pub fn bracket(&mut self, u: TermId, f: MorId) -> Result<TermId, AlphaError> {
        if f >= self.category().morphism_count() {
            return Err(AlphaError::UnknownMorphism(f));
        }
        let i = self.require_local_restricted(u)?;
        if self.category().cod(f) != i {
            return Err(AlphaError::ObjectMismatch);
        }
        Ok(self.bracket_rec(u, f))
    }

    fn bracket_rec(&mut self, u: TermId, f: MorId) -> TermId {
        let cat = self.functor.category();
        match self.node(u).clone() {
            Node::Indet { sort, .. } => {
                let x = self.intern(Node::Indet { sort, obj: cat.dom(f) }, (sort, cat.dom(f)));
                self.alpha_unchecked(f, x)
            }
            Node::Alpha { mor: g, sort, .. } => {
                let x = self.intern(Node::Indet { sort, obj: cat.dom(f) }, (sort, cat.dom(f)));
                let gf = cat.compose(g, f).expect("typed composite");
                self.alpha_unchecked(gf, x)
            }
            Node::Const { .. } => u,
            Node::Op { fun, obj, args } => {
                let args = args.into_iter().map(|a| self.bracket_rec(a, f)).collect();
                self.op_unchecked(fun, obj, args)
            }
        }
    }

    /// `u^f`: the normal form of `α_f(u)` for an α-restricted `u`.
    pub fn push(&mut self, u: TermId, f: MorId) -> Result<TermId, AlphaError> {
        if !self.is_alpha_restricted(u) {
            return Err(AlphaError::NotAlphaRestricted);
        }
        let a = self.alpha(f, u)?;
        Ok(self.normalize(a))
    }

    /// `θ`: replaces each `α_f(x_{A^i})` by `x_f^A` and `x_{A^i}` by
    /// `x_{id_i}^A`, dropping object superscripts.
    pub fn theta(&self, u: TermId) -> Result<ThetaTerm, AlphaError> {
        if !self.is_alpha_restricted(u) {
            return Err(AlphaError::NotAlphaRestricted);
        }
        if self.indeterminates(u).len() > 1 {
            return Err(AlphaError::MixedIndeterminates);
        }
        Ok(ThetaTerm { object: self.sort(u).1, body: self.theta_rec(u) })
    }

    fn theta_rec(&self, u: TermId) -> ComponentTerm {
        match self.node(u) {
            Node::Indet { sort, obj } => {
                ComponentTerm::Indet { sort: *sort, subscript: Some(self.category().identity(*obj)) }
            }
            Node::Alpha { mor, sort, .. } => ComponentTerm::Indet { sort: *sort, subscript: Some(*mor) },
            Node::Const { sort, elem, .. } => ComponentTerm::Const { sort: *sort, elem: *elem },
            Node::Op { fun, args, .. } => {
                ComponentTerm::Op { fun: *fun, args: args.iter().map(|&a| self.theta_rec(a)).collect() }
            }
        }
    }

    /// `θ* = λ ∘ θ`: as `θ`, then every `x_f^A` becomes `x_A`.
    pub fn theta_star(&self, u: TermId) -> Result<ThetaTerm, AlphaError> {
        let t = self.theta(u)?;
        Ok(ThetaTerm { object: t.object, body: t.body.erase() })
    }

    /// `ρ_{M^i}`: reads a subscript-free component term at object `i` back
    /// into `Σ^J(M, x_{A^i})`.
    pub fn embed(&mut self, t: &ThetaTerm) -> Result<TermId, AlphaError> {
        self.check_obj(t.object)?;
        self.embed_rec(&t.body, t.object)
    }

    fn embed_rec(&mut self, t: &ComponentTerm, i: ObjId) -> Result<TermId, AlphaError> {
        match t {
            ComponentTerm::Indet { subscript: Some(_), .. } => Err(AlphaError::Subscripted),
            ComponentTerm::Indet { sort, subscript: None } => self.indet(*sort, i),
            ComponentTerm::Const { sort, elem } => self.constant(*sort, i, *elem),
            ComponentTerm::Op { fun, args } => {
                let args = args.iter().map(|a| self.embed_rec(a, i)).collect::<Result<Vec<_>, _>>()?;
                self.op(*fun, i, args)
            }
        }
    }

    /// `u^{−α}`: erases every α-symbol of an `i`-local term.
    pub fn alpha_free(&mut self, u: TermId) -> Result<TermId, AlphaError> {
        self.require_local_restricted(u)?;
        Ok(self.alpha_free_rec(u))
    }

    fn alpha_free_rec(&mut self, u: TermId) -> TermId {
        match self.node(u).clone() {
            Node::Indet { .. } | Node::Const { .. } => u,
            Node::Alpha { arg, .. } => arg,
            Node::Op { fun, obj, args } => {
                let args = args.into_iter().map(|a| self.alpha_free_rec(a)).collect();
                self.op_unchecked(fun, obj, args)
            }
        }
    }

    /// Whether `α_f(u)` and `u[f]` have the same normal form, for an
    /// `i`-local α-restricted `u` and an endomorphism `f` of `i`.
    pub fn commutes_with_endo(&mut self, u: TermId, f: MorId) -> Result<bool, AlphaError> {
        let i = self.require_local_restricted(u)?;
        let cat = self.category();
        if f >= cat.morphism_count() {
            return Err(AlphaError::UnknownMorphism(f));
        }
        if cat.dom(f) != i || cat.cod(f) != i {
            return Err(AlphaError::NotEndo(f));
        }
        let lhs = self.push(u, f)?;
        let rhs = self.bracket(u, f)?;
        Ok(lhs == self.normalize(rhs))
    }

    /// Builds a random term of sort `target` over the indeterminate
    /// `indet`, drawing every choice from `pick(n) ∈ 0..n`.
    ///
    /// Returns `None` when no term of that sort exists within the depth.
    pub fn generate(&mut self, pick: &mut dyn FnMut(usize) -> usize, shape: &Shape) -> Option<TermId> {
        self.gen_rec(pick, shape, shape.target, shape.depth)
    }

    fn gen_rec(
        &mut self,
        pick: &mut dyn FnMut(usize) -> usize,
        shape: &Shape,
        (sort, obj): (SortId, ObjId),
        depth: usize,
    ) -> Option<TermId> {
        let cat = self.functor.category();
        let (xa, xi) = shape.indet;
        #[derive(Clone, Copy)]
        enum Choice {
            X,
            Const,
            AlphaX(MorId),
            Op(FunId),
            AlphaT(MorId),
        }
        let mut choices = Vec::new();
        if (sort, obj) == shape.indet {
            choices.push(Choice::X);
        }
        if !self.functor.component(obj).carrier(sort).is_empty() {
            choices.push(Choice::Const);
        }
        if sort == xa {
            for f in cat.hom(xi, obj) {
                if !shape.local || obj == xi {
                    choices.push(Choice::AlphaX(f));
                }
            }
        }
        if depth > 1 {
            let sig = self.functor.signature();
            for (g, sym) in sig.funs().iter().enumerate() {
                if sym.result == sort && !sym.args.is_empty() {
                    // weight operations so that deep terms are common
                    choices.push(Choice::Op(g));
                    choices.push(Choice::Op(g));
                }
            }
            if !shape.restricted {
                for f in cat.into(obj) {
                    if !shape.local || cat.dom(f) == obj {
                        choices.push(Choice::AlphaT(f));
                    }
                }
            }
        }
        if choices.is_empty() {
            return None;
        }
        match choices[pick(choices.len())] {
            Choice::X => Some(self.intern(Node::Indet { sort, obj }, (sort, obj))),
            Choice::Const => {
                let n = self.functor.component(obj).carrier(sort).len();
                Some(self.const_unchecked(sort, obj, pick(n)))
            }
            Choice::AlphaX(f) => {
                let x = self.intern(Node::Indet { sort: xa, obj: xi }, (xa, xi));
                Some(self.alpha_unchecked(f, x))
            }
            Choice::Op(g) => {
                let arg_sorts = self.functor.signature().fun(g).args.clone();
                let args = arg_sorts
                    .into_iter()
                    .map(|a| self.gen_rec(pick, shape, (a, obj), depth - 1))
                    .collect::<Option<Vec<_>>>()?;
                Some(self.op_unchecked(g, obj, args))
            }
            Choice::AlphaT(f) => {
                let arg = self.gen_rec(pick, shape, (sort, cat.dom(f)), depth - 1)?;
                Some(self.alpha_unchecked(f, arg))
            }
        }
    }
}

/// Parameters for [`TermStore::generate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    /// `(A, i)` of the indeterminate `x_{A^i}`.
    pub indet: (SortId, ObjId),
    /// `(C, k)` of the generated term.
    pub target: (SortId, ObjId),
    pub depth: usize,
    /// Only α-restricted terms.
    pub restricted: bool,
    /// Only terms local to the target object.
    pub local: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingroup::{FinGroup, GroupHom};
    use crate::presheaf::GroupPresheaf;
    use super::Strategy;
    use proptest::prelude::*;

    const M: FunId = 0;

    fn inverting_z3() -> ModelFunctor {
        let z3 = FinGroup::cyclic(3);
        let base = FinCategory::one_object(&FinGroup::cyclic(2));
        let inv = GroupHom(z3.elements().map(|a| z3.inv(a)).collect());
        ModelFunctor::from_presheaf(&GroupPresheaf::new(base, vec![z3], vec![GroupHom::identity(3), inv]).unwrap())
    }

    fn arrow_z2() -> ModelFunctor {
        ModelFunctor::from_presheaf(&GroupPresheaf::constant(FinCategory::arrow(), FinGroup::cyclic(2)))
    }

    fn z4_cyclic_action() -> ModelFunctor {
        // BZ4 acting on Z5 through x ↦ 2x
        let z5 = FinGroup::cyclic(5);
        let z4 = FinGroup::cyclic(4);
        let base = FinCategory::one_object(&z4);
        let maps = (0..4u32).map(|k| GroupHom((0..5).map(|a| (a * 2usize.pow(k)) % 5).collect())).collect();
        ModelFunctor::from_presheaf(&GroupPresheaf::new(base, vec![z5], maps).unwrap())
    }

    #[test]
    fn identity_alpha_vanishes() {
        let f = arrow_z2();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let id = f.category().identity(0);
        let t = s.alpha(id, x).unwrap();
        assert_eq!(s.normalize(t), x);
    }

    #[test]
    fn alphas_compose() {
        let f = z4_cyclic_action();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let (one, two) = (1, 2);
        let inner = s.alpha(one, x).unwrap();
        let outer = s.alpha(two, inner).unwrap();
        let expected = s.alpha(3, x).unwrap();
        assert_eq!(s.normalize(outer), expected);
    }

    #[test]
    fn alpha_distributes_and_moves_constants() {
        let f = arrow_z2();
        let arrow = f.category().morphism_index("f").unwrap();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let c = s.constant(0, 0, 1).unwrap();
        let m = s.op(M, 0, vec![x, c]).unwrap();
        let t = s.alpha(arrow, m).unwrap();
        let ax = s.alpha(arrow, x).unwrap();
        let c1 = s.constant(0, 1, 1).unwrap();
        let expected = s.op(M, 1, vec![ax, c1]).unwrap();
        assert_eq!(s.normalize(t), expected);
    }

    #[test]
    fn constants_follow_the_action() {
        let f = inverting_z3();
        let mut s = TermStore::new(&f);
        let c = s.constant(0, 0, 1).unwrap();
        let t = s.alpha(1, c).unwrap();
        assert_eq!(s.normalize(t), s.constant(0, 0, 2).unwrap());
    }

    #[test]
    fn ill_typed_alpha_is_rejected() {
        let f = arrow_z2();
        let arrow = f.category().morphism_index("f").unwrap();
        let mut s = TermStore::new(&f);
        let y = s.indet(0, 1).unwrap();
        assert_eq!(s.alpha(arrow, y), Err(AlphaError::ObjectMismatch));
    }

    #[test]
    fn bracket_clauses() {
        let f = z4_cyclic_action();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let ax = s.alpha(1, x).unwrap();
        assert_eq!(s.bracket(x, 2).unwrap(), s.alpha(2, x).unwrap());
        assert_eq!(s.bracket(ax, 2).unwrap(), s.alpha(3, x).unwrap());
        let c = s.constant(0, 0, 4).unwrap();
        assert_eq!(s.bracket(c, 1).unwrap(), c);
    }

    #[test]
    fn push_distributes() {
        let f = inverting_z3();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let u = s.op(M, 0, vec![x, x]).unwrap();
        let ax = s.alpha(1, x).unwrap();
        let expected = s.op(M, 0, vec![ax, ax]).unwrap();
        assert_eq!(s.push(u, 1).unwrap(), expected);
    }

    #[test]
    fn theta_clauses() {
        let f = arrow_z2();
        let arrow = f.category().morphism_index("f").unwrap();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        assert_eq!(s.theta(x).unwrap().body, ComponentTerm::Indet { sort: 0, subscript: Some(f.category().identity(0)) });
        let ax = s.alpha(arrow, x).unwrap();
        assert_eq!(s.theta(ax).unwrap(), ThetaTerm { object: 1, body: ComponentTerm::Indet { sort: 0, subscript: Some(arrow) } });
        let c = s.constant(0, 1, 1).unwrap();
        let u = s.op(M, 1, vec![ax, c]).unwrap();
        let expected = ComponentTerm::Op {
            fun: M,
            args: vec![ComponentTerm::Indet { sort: 0, subscript: Some(arrow) }, ComponentTerm::Const { sort: 0, elem: 1 }],
        };
        assert_eq!(s.theta(u).unwrap().body, expected);
        let xi = ComponentTerm::Indet { sort: 0, subscript: None };
        assert_eq!(s.theta_star(ax).unwrap().body, xi);
    }

    #[test]
    fn theta_star_erases_distinct_subscripts() {
        let f = z4_cyclic_action();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let a1 = s.alpha(1, x).unwrap();
        let a2 = s.alpha(2, x).unwrap();
        let u = s.op(M, 0, vec![a1, a2]).unwrap();
        let xi = ComponentTerm::Indet { sort: 0, subscript: None };
        assert_eq!(s.theta_star(u).unwrap().body, ComponentTerm::Op { fun: M, args: vec![xi.clone(), xi] });
    }

    #[test]
    fn theta_needs_restricted_input() {
        let f = inverting_z3();
        let mut s = TermStore::new(&f);
        let c = s.constant(0, 0, 1).unwrap();
        let t = s.alpha(1, c).unwrap();
        assert_eq!(s.theta(t), Err(AlphaError::NotAlphaRestricted));
    }

    #[test]
    fn alpha_free_clauses() {
        let f = inverting_z3();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let ax = s.alpha(1, x).unwrap();
        assert_eq!(s.alpha_free(ax).unwrap(), x);
        assert_eq!(s.alpha_free(x).unwrap(), x);
        let c = s.constant(0, 0, 2).unwrap();
        let u = s.op(M, 0, vec![ax, c]).unwrap();
        let expected = s.op(M, 0, vec![x, c]).unwrap();
        assert_eq!(s.alpha_free(u).unwrap(), expected);
    }

    #[test]
    fn commutation_with_endomorphisms() {
        let f = inverting_z3();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        assert_eq!(s.commutes_with_endo(x, 0), Ok(true));
        let ax = s.alpha(1, x).unwrap();
        assert_eq!(s.commutes_with_endo(ax, 1), Ok(true));
        // c_1 moves to c_2 under the action, but stays put under [τ]
        let c = s.constant(0, 0, 1).unwrap();
        let u = s.op(M, 0, vec![x, c]).unwrap();
        assert_eq!(s.commutes_with_endo(u, 1), Ok(false));
    }

    #[test]
    fn non_local_terms_are_rejected() {
        let f = arrow_z2();
        let arrow = f.category().morphism_index("f").unwrap();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let ax = s.alpha(arrow, x).unwrap();
        assert_eq!(s.alpha_free(ax), Err(AlphaError::NotLocal(1)));
    }

    #[test]
    fn embedding_theta_star_gives_alpha_free_variant() {
        let f = z4_cyclic_action();
        let mut s = TermStore::new(&f);
        let x = s.indet(0, 0).unwrap();
        let a3 = s.alpha(3, x).unwrap();
        let c = s.constant(0, 0, 3).unwrap();
        let inner = s.op(2, 0, vec![a3]).unwrap();
        let u = s.op(M, 0, vec![inner, c]).unwrap();
        let back = s.theta_star(u).unwrap();
        assert_eq!(s.embed(&back).unwrap(), s.alpha_free(u).unwrap());
    }

    fn picks(choices: &[usize]) -> impl FnMut(usize) -> usize + '_ {
        let mut k = 0;
        move |n| {
            let c = choices[k % choices.len()] % n;
            k += 1;
            c
        }
    }

    proptest! {
        #[test]
        fn strategies_agree_and_terminate(choices in prop::collection::vec(0usize..64, 1..200)) {
            for functor in [inverting_z3(), arrow_z2(), z4_cyclic_action()] {
                let mut s = TermStore::new(&functor);
                let last = functor.category().object_count() - 1;
                let shape = Shape { indet: (0, 0), target: (0, last), depth: 6, restricted: false, local: false };
                let Some(t) = s.generate(&mut picks(&choices), &shape) else { continue };
                let fast = s.normalize(t);
                let li = s.normalize_with(t, Strategy::LeftmostInnermost);
                let ro = s.normalize_with(t, Strategy::RightmostOutermost);
                prop_assert!(li.strictly_decreasing && ro.strictly_decreasing);
                prop_assert_eq!(li.normal_form, fast);
                prop_assert_eq!(ro.normal_form, fast);
                prop_assert!(s.is_alpha_restricted(fast));
                prop_assert_eq!(s.normalize(fast), fast);
            }
        }

        #[test]
        fn bracket_is_invisible_to_theta_star(choices in prop::collection::vec(0usize..64, 1..200), f in 0usize..4) {
            let functor = z4_cyclic_action();
            let mut s = TermStore::new(&functor);
            let shape = Shape { indet: (0, 0), target: (0, 0), depth: 5, restricted: true, local: true };
            let u = s.generate(&mut picks(&choices), &shape).unwrap();
            let b = s.bracket(u, f).unwrap();
            prop_assert_eq!(s.theta_star(u).unwrap(), s.theta_star(b).unwrap());
            let e = s.theta_star(u).unwrap();
            prop_assert_eq!(s.embed(&e).unwrap(), s.alpha_free(u).unwrap());
        }
    }
}
