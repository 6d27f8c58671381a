//! The free extension `G⟨x⟩ = G * ⟨x⟩` of a finite group by indeterminates,
//! kept in free-product normal form.
//!
//! Provable equality in the diagram theory of `G` extended by an
//! indeterminate coincides with equality in the free product, so every check
//! in this module is a comparison of normal forms.
//!
//! Words may mention several indeterminates; [`X`] is the one isotropy
//! candidates are written in, and [`X1`]/[`X2`] are the fresh pair used to
//! test commutation with multiplication.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::fingroup::{Elem, FinGroup};

/// An indeterminate, identified by a small integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u8);

pub const X: Var = Var(0);
pub const X1: Var = Var(1);
pub const X2: Var = Var(2);

/// One block of a word: a group element, or a nonzero power of an
/// indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Syllable {
    Elem(Elem),
    Var(Var, i32),
}

/// A word in normal form: no unit elements, no zero exponents, no two
/// adjacent element syllables, no two adjacent blocks of the same
/// indeterminate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Syllable>);

impl Word {
    /// The empty word, i.e. the unit.
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The indeterminates that occur, without repetition, in order of first
    /// occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for s in &self.0 {
            if let Syllable::Var(v, _) = s {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeExtError {
    #[error("element index {0} is not in the group")]
    NotInGroup(Elem),
    #[error("indeterminate x{} does not occur in the word", .0 .0)]
    IndeterminateMismatch(Var),
}

/// Records which generic-commutation checks a word passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutationFlags {
    pub mul: bool,
    pub unit: bool,
    pub inv: bool,
}

impl CommutationFlags {
    pub fn all(&self) -> bool {
        self.mul && self.unit && self.inv
    }
}

/// The group operations a word may commute generically with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupOp {
    Mul,
    Unit,
    Inv,
}

/// An element of the isotropy group of `G`, certified by the checks that
/// admitted it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyElement {
    pub word: Word,
    pub inverse: Word,
    pub commutes: CommutationFlags,
}

/// Word arithmetic over a fixed finite group.
#[derive(Debug, Clone, Copy)]
pub struct FreeExtension<'g> {
    group: &'g FinGroup,
}

impl<'g> FreeExtension<'g> {
    pub fn new(group: &'g FinGroup) -> Self {
        FreeExtension { group }
    }

    pub fn group(&self) -> &'g FinGroup {
        self.group
    }

    /// Reduces an arbitrary syllable sequence to normal form.
    pub fn normalize(&self, raw: &[Syllable]) -> Result<Word, FreeExtError> {
        if let Some(Syllable::Elem(a)) = raw.iter().find(|s| matches!(s, Syllable::Elem(a) if !self.group.contains(*a))) {
            return Err(FreeExtError::NotInGroup(*a));
        }
        let mut stack = Vec::with_capacity(raw.len());
        for &s in raw {
            self.push(&mut stack, s);
        }
        Ok(Word(stack))
    }

    /// Pushes one syllable onto a normal-form stack, keeping it normal.
    fn push(&self, stack: &mut Vec<Syllable>, s: Syllable) {
        let g = self.group;
        match s {
            Syllable::Elem(a) if a == g.unit() => {}
            Syllable::Var(_, 0) => {}
            Syllable::Elem(a) => match stack.last_mut() {
                Some(Syllable::Elem(b)) => {
                    let c = g.mul(*b, a);
                    if c == g.unit() {
                        stack.pop();
                    } else {
                        *b = c;
                    }
                }
                _ => stack.push(s),
            },
            Syllable::Var(v, n) => match stack.last_mut() {
                Some(Syllable::Var(w, m)) if *w == v => {
                    *m += n;
                    if *m == 0 {
                        stack.pop();
                    }
                }
                _ => stack.push(s),
            },
        }
    }

    pub fn elem(&self, a: Elem) -> Word {
        let mut w = Vec::new();
        self.push(&mut w, Syllable::Elem(a));
        Word(w)
    }

    pub fn var(&self, v: Var) -> Word {
        Word(vec![Syllable::Var(v, 1)])
    }

    /// `g·x·g⁻¹`.
    pub fn conjugator(&self, g: Elem) -> Word {
        self.mul_all(&[self.elem(g), self.var(X), self.elem(self.group.inv(g))])
    }

    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        let mut stack = a.0.clone();
        for &s in &b.0 {
            self.push(&mut stack, s);
        }
        Word(stack)
    }

    pub fn mul_all(&self, words: &[Word]) -> Word {
        words.iter().fold(Word::unit(), |acc, w| self.mul(&acc, w))
    }

    pub fn inverse(&self, w: &Word) -> Word {
        Word(
            w.0.iter()
                .rev()
                .map(|s| match *s {
                    Syllable::Elem(a) => Syllable::Elem(self.group.inv(a)),
                    Syllable::Var(v, n) => Syllable::Var(v, -n),
                })
                .collect(),
        )
    }

    pub fn pow(&self, w: &Word, n: i32) -> Word {
        let base = if n < 0 { self.inverse(w) } else { w.clone() };
        (0..n.unsigned_abs()).fold(Word::unit(), |acc, _| self.mul(&acc, &base))
    }

    /// Replaces every block `vⁿ` of `s` by `replacement`ⁿ.
    pub fn substitute(&self, s: &Word, v: Var, replacement: &Word) -> Word {
        let mut stack = Vec::new();
        for &syl in &s.0 {
            match syl {
                Syllable::Var(w, n) if w == v => {
                    for r in self.pow(replacement, n).0 {
                        self.push(&mut stack, r);
                    }
                }
                other => self.push(&mut stack, other),
            }
        }
        Word(stack)
    }

    /// Like [`FreeExtension::substitute`], but requires `v` to occur in `s`.
    pub fn substitute_checked(&self, s: &Word, v: Var, replacement: &Word) -> Result<Word, FreeExtError> {
        if !s.vars().contains(&v) {
            return Err(FreeExtError::IndeterminateMismatch(v));
        }
        Ok(self.substitute(s, v, replacement))
    }

    /// Composition in the isotropy group: `s ⋆ t = s[t/x]`.
    pub fn compose(&self, s: &Word, t: &Word) -> Word {
        self.substitute(s, X, t)
    }

    /// Evaluates a word in `G` after sending `x` to `value`.
    pub fn evaluate_at(&self, s: &Word, value: Elem) -> Elem {
        let g = self.group;
        s.0.iter().fold(g.unit(), |acc, syl| match *syl {
            Syllable::Elem(a) => g.mul(acc, a),
            Syllable::Var(_, n) => g.mul(acc, g.pow(value, n as i64)),
        })
    }

    /// Checks whether `s` (a word in `x`) commutes generically with `op`:
    /// `s[x₁x₂/x] = s[x₁/x]·s[x₂/x]`, `s[e/x] = e`, or `s[x⁻¹/x] = s⁻¹`.
    pub fn commutes_generically(&self, s: &Word, op: GroupOp) -> bool {
        match op {
            GroupOp::Mul => {
                let x1 = self.var(X1);
                let x2 = self.var(X2);
                let lhs = self.substitute(s, X, &self.mul(&x1, &x2));
                let rhs = self.mul(&self.substitute(s, X, &x1), &self.substitute(s, X, &x2));
                lhs == rhs
            }
            GroupOp::Unit => self.substitute(s, X, &Word::unit()).is_empty(),
            GroupOp::Inv => {
                self.substitute(s, X, &self.inverse(&self.var(X))) == self.inverse(s)
            }
        }
    }

    pub fn commutation_flags(&self, s: &Word) -> CommutationFlags {
        CommutationFlags {
            mul: self.commutes_generically(s, GroupOp::Mul),
            unit: self.commutes_generically(s, GroupOp::Unit),
            inv: self.commutes_generically(s, GroupOp::Inv),
        }
    }

    /// Searches for `t` with `s[t/x] = x = t[s/x]` among normal words of at
    /// most `len(s) + 2` syllables. The bound suffices for conjugator words;
    /// `None` only means no inverse exists within it.
    pub fn is_invertible(&self, s: &Word) -> Option<Word> {
        let x = self.var(X);
        let bound = s.len() + 2;
        (1..=bound).find_map(|len| {
            self.words_of_length(len)
                .into_iter()
                .find(|t| self.compose(s, t) == x && self.compose(t, s) == x)
        })
    }

    /// All normal words in `x` of exactly `len` syllables with exponents in
    /// `{-2, -1, 1, 2}`, in lexicographic order.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let non_unit: Vec<Elem> = self.group.elements().filter(|&a| a != self.group.unit()).collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.extend_words(len, &non_unit, &mut cur, &mut out);
        out
    }

    fn extend_words(&self, len: usize, non_unit: &[Elem], cur: &mut Vec<Syllable>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word(cur.clone()));
            return;
        }
        let last_is_elem = matches!(cur.last(), Some(Syllable::Elem(_)));
        let last_is_var = matches!(cur.last(), Some(Syllable::Var(..)));
        if !last_is_elem {
            for &a in non_unit {
                cur.push(Syllable::Elem(a));
                self.extend_words(len, non_unit, cur, out);
                cur.pop();
            }
        }
        if !last_is_var {
            for n in EXPONENTS {
                cur.push(Syllable::Var(X, n));
                self.extend_words(len, non_unit, cur, out);
                cur.pop();
            }
        }
    }

    /// Every normal word of at most `max_len` syllables that commutes
    /// generically with all group operations and is substitutionally
    /// invertible.
    pub fn isotropy_search(&self, max_len: usize) -> Vec<IsotropyElement> {
        self.isotropy_search_shard(max_len, 0, 1)
    }

    /// The part of [`FreeExtension::isotropy_search`] whose candidates' first
    /// syllable falls in shard `shard` of `shards` (by position in the
    /// first-syllable enumeration). Concatenating all shards in order gives
    /// the full result.
    pub fn isotropy_search_shard(&self, max_len: usize, shard: usize, shards: usize) -> Vec<IsotropyElement> {
        let firsts = self.words_of_length(1);
        let mut out = Vec::new();
        for len in 1..=max_len {
            for w in self.words_of_length(len) {
                let first = firsts.iter().position(|f| f.0[0] == w.0[0]).expect("first syllable");
                if first % shards != shard {
                    continue;
                }
                let commutes = self.commutation_flags(&w);
                if !commutes.all() {
                    continue;
                }
                if let Some(inverse) = self.is_invertible(&w) {
                    out.push(IsotropyElement { word: w, inverse, commutes });
                }
            }
        }
        out
    }
}

const EXPONENTS: [i32; 4] = [-2, -1, 1, 2];

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FinGroup {
        FinGroup::symmetric(3)
    }

    #[test]
    fn cancellation_collapses_to_group_element() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let a = g.index_of("(12)").unwrap();
        let b = g.index_of("(123)").unwrap();
        let raw = [Syllable::Elem(a), Syllable::Var(X, 1), Syllable::Var(X, -1), Syllable::Elem(b)];
        assert_eq!(fx.normalize(&raw).unwrap(), fx.elem(g.mul(a, b)));
    }

    #[test]
    fn unit_elision_merges_blocks() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let a = g.index_of("(12)").unwrap();
        let b = g.index_of("(13)").unwrap();
        let raw = [
            Syllable::Elem(a),
            Syllable::Var(X, 1),
            Syllable::Elem(g.unit()),
            Syllable::Var(X, 1),
            Syllable::Elem(b),
        ];
        let w = fx.normalize(&raw).unwrap();
        assert_eq!(w.syllables(), &[Syllable::Elem(a), Syllable::Var(X, 2), Syllable::Elem(b)]);
    }

    #[test]
    fn normal_word_is_a_fixpoint() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let w = fx.conjugator(g.index_of("(123)").unwrap());
        assert_eq!(w.len(), 3);
        assert_eq!(fx.normalize(w.syllables()).unwrap(), w);
    }

    #[test]
    fn foreign_element_is_rejected() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        assert_eq!(fx.normalize(&[Syllable::Elem(9)]), Err(FreeExtError::NotInGroup(9)));
    }

    #[test]
    fn substitution_examples() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let x = fx.var(X);
        let v = fx.conjugator(1);
        assert_eq!(fx.substitute(&x, X, &v), v);
        for a in g.elements() {
            for b in g.elements() {
                let lhs = fx.substitute(&fx.conjugator(a), X, &fx.conjugator(b));
                assert_eq!(lhs, fx.conjugator(g.mul(a, b)));
            }
        }
        let x2 = fx.pow(&x, 2);
        assert_eq!(fx.substitute(&x2, X, &fx.inverse(&x)), fx.pow(&x, -2));
        assert_eq!(
            fx.substitute_checked(&fx.elem(1), X, &x),
            Err(FreeExtError::IndeterminateMismatch(X))
        );
    }

    #[test]
    fn commutation_examples() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let x = fx.var(X);
        assert!(fx.commutation_flags(&x).all());
        for a in g.elements() {
            assert!(fx.commutation_flags(&fx.conjugator(a)).all());
        }
        let x2 = fx.pow(&x, 2);
        assert!(!fx.commutes_generically(&x2, GroupOp::Mul));
    }

    #[test]
    fn invertibility_examples() {
        let g = s3();
        let fx = FreeExtension::new(&g);
        let x = fx.var(X);
        assert_eq!(fx.is_invertible(&x), Some(x.clone()));
        let c = g.index_of("(123)").unwrap();
        assert_eq!(fx.is_invertible(&fx.conjugator(c)), Some(fx.conjugator(g.inv(c))));
        assert_eq!(fx.is_invertible(&fx.pow(&x, 2)), None);
    }

    #[test]
    fn trivial_group_isotropy_is_x() {
        let g = FinGroup::trivial();
        let fx = FreeExtension::new(&g);
        let found = fx.isotropy_search(3);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].word, fx.var(X));
    }

    #[test]
    fn s3_and_z4_isotropy_are_the_conjugators() {
        for g in [s3(), FinGroup::cyclic(4)] {
            let fx = FreeExtension::new(&g);
            let mut found: Vec<Word> = fx.isotropy_search(3).into_iter().map(|e| e.word).collect();
            let mut expected: Vec<Word> = g.elements().map(|a| fx.conjugator(a)).collect();
            found.sort();
            expected.sort();
            assert_eq!(found, expected);
        }
    }

    #[test]
    fn shards_partition_the_search() {
        let g = FinGroup::cyclic(3);
        let fx = FreeExtension::new(&g);
        let full = fx.isotropy_search(3);
        let mut merged: Vec<Word> = (0..3).flat_map(|s| fx.isotropy_search_shard(3, s, 3)).map(|e| e.word).collect();
        let mut full: Vec<Word> = full.into_iter().map(|e| e.word).collect();
        merged.sort();
        full.sort();
        assert_eq!(merged, full);
    }
}
