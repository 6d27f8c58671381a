//! Finite groups as Cayley tables, homomorphism tables, conjugation,
//! automorphism groups, centers and limits of group diagrams.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::presheaf::GroupPresheaf;

/// Index of an element in a [`FinGroup`].
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {0} is out of range")]
    OutOfRange(usize),
    #[error("multiplication table has wrong shape")]
    TableShape,
    #[error("no two-sided unit element")]
    NoUnit,
    #[error("declared unit `{declared}` is not the unit `{actual}`")]
    WrongUnit { declared: String, actual: String },
    #[error("`{0}` has no inverse")]
    NoInverse(String),
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: String, b: String, c: String },
}

/// A finite group given by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroup {
    names: Vec<String>,
    mul: Vec<Elem>,
    unit: Elem,
    inv: Vec<Elem>,
}

impl FinGroup {
    /// Builds a group from element names and a row-major multiplication
    /// table (`table[a][b] = a·b`), checking every group axiom.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<Elem>>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupError::TableShape);
        }
        let mut seen = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(GroupError::DuplicateName(name.clone()));
            }
        }
        let mul: Vec<Elem> = table.into_iter().flatten().collect();
        if let Some(&bad) = mul.iter().find(|&&c| c >= n) {
            return Err(GroupError::OutOfRange(bad));
        }
        let at = |a: Elem, b: Elem| mul[a * n + b];
        let unit = (0..n)
            .find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or(GroupError::NoUnit)?;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| at(a, b) == unit && at(b, a) == unit)
                .ok_or_else(|| GroupError::NoInverse(names[a].clone()))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(GroupError::NotAssociative {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            c: names[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(FinGroup { names, mul, unit, inv })
    }

    /// Builds a group of order `n` whose product is given by a closure.
    pub fn from_fn(
        names: Vec<String>,
        mut product: impl FnMut(Elem, Elem) -> Elem,
    ) -> Result<Self, GroupError> {
        let n = names.len();
        let table = (0..n).map(|a| (0..n).map(|b| product(a, b)).collect()).collect();
        Self::from_table(names, table)
    }

    /// Like [`FinGroup::from_table`], but also checks a declared unit.
    pub fn with_declared_unit(
        names: Vec<String>,
        table: Vec<Vec<Elem>>,
        unit: Elem,
    ) -> Result<Self, GroupError> {
        let g = Self::from_table(names, table)?;
        if unit != g.unit {
            let declared = g.names.get(unit).cloned().unwrap_or_else(|| unit.to_string());
            return Err(GroupError::WrongUnit { declared, actual: g.names[g.unit].clone() });
        }
        Ok(g)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n`, elements named `"0"`..`"n-1"`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| k.to_string()).collect();
        Self::from_fn(names, |a, b| (a + b) % n).expect("cyclic group table")
    }

    /// The symmetric group on `{1, …, n}` with elements named in cycle
    /// notation (`"e"`, `"(12)"`, `"(123)"`, …) and product `(σ·τ)(x) = σ(τ(x))`.
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index: BTreeMap<Vec<usize>, Elem> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        Self::from_fn(names, |a, b| {
            let (s, t) = (&perms[a], &perms[b]);
            let st: Vec<usize> = (0..n).map(|x| s[t[x]]).collect();
            index[&st]
        })
        .expect("symmetric group table")
    }

    /// The dihedral group of order `2n`: elements `r^k` named `"e"`, `"r"`,
    /// `"r2"`, … and reflections `s r^k` named `"s"`, `"sr"`, `"sr2"`, ….
    pub fn dihedral(n: usize) -> Self {
        // element (f, k) = s^f r^k stored at index f*n + k; r^k s = s r^{-k}.
        let name = |f: usize, k: usize| match (f, k) {
            (0, 0) => String::from("e"),
            (0, 1) => String::from("r"),
            (0, k) => format!("r{k}"),
            (_, 0) => String::from("s"),
            (_, 1) => String::from("sr"),
            (_, k) => format!("sr{k}"),
        };
        let names = (0..2 * n).map(|i| name(i / n, i % n)).collect();
        Self::from_fn(names, |a, b| {
            let (f1, k1) = (a / n, a % n);
            let (f2, k2) = (b / n, b % n);
            let k = if f2 == 0 { (k1 + k2) % n } else { (n - k1 + k2) % n };
            ((f1 + f2) % 2) * n + k
        })
        .expect("dihedral group table")
    }

    /// `G × H` with elements named `"(g,h)"`.
    pub fn product(g: &FinGroup, h: &FinGroup) -> Self {
        let m = h.order();
        let names = (0..g.order() * m)
            .map(|i| format!("({},{})", g.name(i / m), h.name(i % m)))
            .collect();
        Self::from_fn(names, |a, b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m))
            .expect("product group table")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.order()
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.order() + b]
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a]
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.order()
    }

    /// `a^k` for any integer `k`.
    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(self.unit, |acc, _| self.mul(acc, base))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Row `a` of the table as element indices.
    pub fn table(&self) -> Vec<Vec<Elem>> {
        self.mul.chunks(self.order()).map(|row| row.to_vec()).collect()
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    pub fn generated(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut inside = vec![false; self.order()];
        inside[self.unit] = true;
        let mut frontier = vec![self.unit];
        while let Some(a) = frontier.pop() {
            for &s in gens {
                let b = self.mul(a, s);
                if !inside[b] {
                    inside[b] = true;
                    frontier.push(b);
                }
            }
        }
        self.elements().filter(|&a| inside[a]).collect()
    }

    /// A small generating set picked greedily in element order.
    pub fn generators(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = self.generated(&gens);
        for a in self.elements() {
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generated(&gens);
            }
        }
        gens
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// A map between finite groups, stored as an image table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupHom(pub Vec<Elem>);

/// Why a table fails to be a group homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomViolation {
    #[error("table has {found} entries, source has {expected} elements")]
    Length { expected: usize, found: usize },
    #[error("image of element {0} is outside the target")]
    OutOfRange(Elem),
    #[error("f({a}·{b}) ≠ f({a})·f({b})")]
    NotMultiplicative { a: Elem, b: Elem },
}

impl GroupHom {
    pub fn identity(n: usize) -> Self {
        GroupHom((0..n).collect())
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.0[a]
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        GroupHom(first.0.iter().map(|&a| self.0[a]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &a)| i == a)
    }

    pub fn is_bijective(&self) -> bool {
        let mut hit = vec![false; self.0.len()];
        for &a in &self.0 {
            if a >= hit.len() || hit[a] {
                return false;
            }
            hit[a] = true;
        }
        true
    }

    /// Inverse of a bijective table.
    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.0.len()];
        for (a, &b) in self.0.iter().enumerate() {
            inv[b] = a;
        }
        Some(GroupHom(inv))
    }

    /// Checks the homomorphism law on every pair (which also forces
    /// `f(e) = e`).
    pub fn check(&self, source: &FinGroup, target: &FinGroup) -> Result<(), HomViolation> {
        if self.0.len() != source.order() {
            return Err(HomViolation::Length { expected: source.order(), found: self.0.len() });
        }
        if let Some(a) = self.0.iter().position(|&b| !target.contains(b)) {
            return Err(HomViolation::OutOfRange(a));
        }
        for a in source.elements() {
            for b in source.elements() {
                if self.apply(source.mul(a, b)) != target.mul(self.apply(a), self.apply(b)) {
                    return Err(HomViolation::NotMultiplicative { a, b });
                }
            }
        }
        Ok(())
    }
}

/// A group whose elements are values of type `T`, with the multiplication
/// recorded as a [`FinGroup`] on member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumerated<T> {
    members: Vec<T>,
    table: FinGroup,
}

impl<T: Ord + Clone> Enumerated<T> {
    /// Tabulates `product` on `members`, which must be closed under it and
    /// form a group.
    ///
    /// # Panics
    ///
    /// If the members are not closed under `product` or the table is not a
    /// group.
    pub fn tabulate(members: Vec<T>, mut product: impl FnMut(&T, &T) -> T) -> Self {
        let index: BTreeMap<T, Elem> =
            members.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let names = (0..members.len()).map(|i| format!("#{i}")).collect();
        let table = FinGroup::from_fn(names, |a, b| {
            *index.get(&product(&members[a], &members[b])).expect("member set closed under product")
        })
        .expect("enumerated members form a group");
        Enumerated { members, table }
    }
}

impl<T> Enumerated<T> {
    pub fn members(&self) -> &[T] {
        &self.members
    }

    pub fn group(&self) -> &FinGroup {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn unit(&self) -> &T {
        &self.members[self.table.unit()]
    }

    pub fn position(&self, m: &T) -> Option<Elem>
    where
        T: PartialEq,
    {
        self.members.iter().position(|x| x == m)
    }
}

/// The conjugation automorphism `g ↦ s·g·s⁻¹`.
pub fn inn(group: &FinGroup, s: Elem) -> Result<GroupHom, GroupError> {
    if !group.contains(s) {
        return Err(GroupError::OutOfRange(s));
    }
    let s_inv = group.inv(s);
    Ok(GroupHom(group.elements().map(|g| group.mul(group.mul(s, g), s_inv)).collect()))
}

/// All automorphisms of `group`, found by assigning images to a generating
/// set and extending along right multiplication.
pub fn automorphism_group(group: &FinGroup) -> Enumerated<GroupHom> {
    let gens = group.generators();
    let order_of = |a: Elem| {
        let mut k = 1;
        let mut x = a;
        while x != group.unit() {
            x = group.mul(x, a);
            k += 1;
        }
        k
    };
    let candidates: Vec<Vec<Elem>> = gens
        .iter()
        .map(|&s| group.elements().filter(|&t| order_of(t) == order_of(s)).collect())
        .collect();

    let mut auts = Vec::new();
    let mut images = vec![0; gens.len()];
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        for (slot, &c) in choice.iter().enumerate() {
            images[slot] = candidates[slot][c];
        }
        if let Some(map) = extend_on_generators(group, &gens, &images) {
            auts.push(map);
        }
        // odometer over candidate images
        for slot in (0..choice.len()).rev() {
            choice[slot] += 1;
            if choice[slot] < candidates[slot].len() {
                continue 'outer;
            }
            choice[slot] = 0;
        }
        break;
    }
    auts.sort();
    Enumerated::tabulate(auts, |a, b| a.compose(b))
}

fn extend_on_generators(group: &FinGroup, gens: &[Elem], images: &[Elem]) -> Option<GroupHom> {
    let hom = extend_into(group, group, gens, images)?;
    hom.is_bijective().then_some(hom)
}

fn extend_into(source: &FinGroup, target: &FinGroup, gens: &[Elem], images: &[Elem]) -> Option<GroupHom> {
    let n = source.order();
    let mut map: Vec<Option<Elem>> = vec![None; n];
    map[source.unit()] = Some(target.unit());
    let mut frontier = vec![source.unit()];
    while let Some(a) = frontier.pop() {
        let fa = map[a]?;
        for (&s, &t) in gens.iter().zip(images) {
            let b = source.mul(a, s);
            let fb = target.mul(fa, t);
            match map[b] {
                Some(prev) if prev != fb => return None,
                Some(_) => {}
                None => {
                    map[b] = Some(fb);
                    frontier.push(b);
                }
            }
        }
    }
    let hom = GroupHom(map.into_iter().collect::<Option<Vec<_>>>()?);
    hom.check(source, target).is_ok().then_some(hom)
}

/// Every homomorphism `source → target`, sorted.
pub fn homomorphisms(source: &FinGroup, target: &FinGroup) -> Vec<GroupHom> {
    let gens = source.generators();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        if let Some(h) = extend_into(source, target, &gens, &choice) {
            out.push(h);
        }
        for slot in (0..choice.len()).rev() {
            choice[slot] += 1;
            if choice[slot] < target.order() {
                continue 'outer;
            }
            choice[slot] = 0;
        }
        break;
    }
    out.sort();
    out
}

/// `{z : z·g = g·z for all g}`, sorted.
pub fn center(group: &FinGroup) -> Vec<Elem> {
    group
        .elements()
        .filter(|&z| group.elements().all(|g| group.mul(z, g) == group.mul(g, z)))
        .collect()
}

/// An element of `lim F`: one group element per object, in the category's
/// declared object order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LimitElement(pub Vec<Elem>);

/// `lim F = {(g_i) : F(f)(g_j) = g_k for every f: j → k}` with componentwise
/// multiplication.
pub fn limit_of_diagram(presheaf: &GroupPresheaf) -> Enumerated<LimitElement> {
    let cat = presheaf.base();
    let n_obj = cat.object_count();
    let mut out = Vec::new();
    let mut partial = Vec::with_capacity(n_obj);

    fn search(
        presheaf: &GroupPresheaf,
        partial: &mut Vec<Elem>,
        out: &mut Vec<LimitElement>,
    ) {
        let cat = presheaf.base();
        let next = partial.len();
        if next == cat.object_count() {
            out.push(LimitElement(partial.clone()));
            return;
        }
        for g in presheaf.group(next).elements() {
            partial.push(g);
            // every morphism between already-assigned objects touching `next`
            let ok = cat.morphism_ids().all(|f| {
                let (j, k) = (cat.dom(f), cat.cod(f));
                if j > next || k > next || (j != next && k != next) {
                    return true;
                }
                presheaf.map(f).apply(partial[j]) == partial[k]
            });
            if ok {
                search(presheaf, partial, out);
            }
            partial.pop();
        }
    }

    search(presheaf, &mut partial, &mut out);
    Enumerated::tabulate(out, |a, b| {
        LimitElement(
            a.0.iter()
                .zip(&b.0)
                .enumerate()
                .map(|(i, (&x, &y))| presheaf.group(i).mul(x, y))
                .collect(),
        )
    })
}
