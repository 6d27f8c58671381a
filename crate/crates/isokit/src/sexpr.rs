//! S-expression syntax for terms.
//!
//! Theory axioms use plain terms: `(m (m x y) z)`, nullary symbols bare
//! (`e`) and variables bare (`x`, resolved against the sequent context).
//!
//! Closed terms of `Σ^J(M, x)` use
//!
//! ```text
//! x                      the indeterminate
//! c:s                    constant for element s (sort taken from position)
//! (const A@i s)          constant with explicit sort and object
//! (g@i t1 .. tn)         operation g at object i; nullary ones may be bare
//! (alpha f t)            α_f
//! ```
//!
//! Any atom can be written as a double-quoted string, e.g. `c:"(12)"`.

use std::fmt;

use isokit_core::alpha::{ComponentTerm, Node, TermId, TermStore, ThetaTerm};
use isokit_core::phl::{FunId, Signature, SortId, Term};
use isokit_core::ObjId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for SexpError {}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SexpError> {
        Err(SexpError { offset: self.pos, message: message.into() })
    }

    fn sexp(&mut self) -> Result<Sexp, SexpError> {
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(')') => self.err("unexpected `)`"),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return self.err("unclosed `(`"),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.sexp()?),
                    }
                }
            }
            Some(_) => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Sexp, SexpError> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            match c {
                c if c.is_whitespace() || c == '(' || c == ')' => break,
                '"' => {
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return self.err("unterminated string"),
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some(e @ ('"' | '\\')) => text.push(e),
                                _ => return self.err("bad escape"),
                            },
                            Some(c) => text.push(c),
                        }
                    }
                }
                c => {
                    self.bump();
                    text.push(c);
                }
            }
        }
        Ok(Sexp::Atom(text))
    }
}

pub fn parse(src: &str) -> Result<Sexp, SexpError> {
    let mut lx = Lexer { src, pos: 0 };
    let s = lx.sexp()?;
    lx.skip_ws();
    if lx.pos != src.len() {
        return lx.err("trailing input");
    }
    Ok(s)
}

/// `name`, double-quoted when it would not read back as one atom.
pub fn quote(name: &str) -> String {
    let plain = !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '\\'));
    if plain {
        return name.to_string();
    }
    let mut out = String::from("\"");
    for c in name.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

// ---- theory terms ----

pub fn parse_phl(src: &str, sig: &Signature, context: &[(String, SortId)]) -> Result<Term, String> {
    let s = parse(src).map_err(|e| format!("`{src}` {e}"))?;
    phl_from(&s, sig, context)
}

fn phl_from(s: &Sexp, sig: &Signature, context: &[(String, SortId)]) -> Result<Term, String> {
    match s {
        Sexp::Atom(name) => {
            if let Some((_, sort)) = context.iter().find(|(n, _)| n == name) {
                return Ok(Term::var(name, *sort));
            }
            match sig.fun_index(name) {
                Some(f) if sig.fun(f).args.is_empty() => Ok(Term::constant(f)),
                Some(_) => Err(format!("`{name}` needs arguments")),
                None => Err(format!("`{name}` is neither a context variable nor a function symbol")),
            }
        }
        Sexp::List(items) => {
            let Some((Sexp::Atom(head), args)) = items.split_first() else {
                return Err("a list term must start with a function symbol".into());
            };
            let f = sig.fun_index(head).ok_or_else(|| format!("unknown function symbol `{head}`"))?;
            let arity = sig.fun(f).args.len();
            if args.len() != arity {
                return Err(format!("`{head}` expects {arity} argument(s), got {}", args.len()));
            }
            let args = args.iter().map(|a| phl_from(a, sig, context)).collect::<Result<_, _>>()?;
            Ok(Term::app(f, args))
        }
    }
}

pub fn print_phl(t: &Term, sig: &Signature) -> String {
    match t {
        Term::Var { name, .. } => quote(name),
        Term::App { fun, args } if args.is_empty() => quote(&sig.fun(*fun).name),
        Term::App { fun, args } => {
            let mut out = format!("({}", quote(&sig.fun(*fun).name));
            for a in args {
                out.push(' ');
                out.push_str(&print_phl(a, sig));
            }
            out.push(')');
            out
        }
    }
}

// ---- Σ^J(M, x) terms ----

/// Splits `name@obj` at the first `@`.
fn split_at_object<'a>(s: &'a str, what: &str) -> Result<(&'a str, &'a str), String> {
    s.split_once('@').ok_or_else(|| format!("{what} `{s}` must have the form name@object"))
}

fn object(store: &TermStore<'_>, name: &str) -> Result<ObjId, String> {
    store.category().object_index(name).ok_or_else(|| format!("unknown object `{name}`"))
}

/// Resolves `A@i` to a sort and object.
pub fn sorted_object(store: &TermStore<'_>, s: &str) -> Result<(SortId, ObjId), String> {
    let (a, i) = split_at_object(s, "sort")?;
    let sort = store.functor().signature().sort_index(a).ok_or_else(|| format!("unknown sort `{a}`"))?;
    Ok((sort, object(store, i)?))
}

/// Parses a closed term over the indeterminate `x` of sort `indet`.
pub fn parse_alpha(src: &str, store: &mut TermStore<'_>, indet: (SortId, ObjId)) -> Result<TermId, String> {
    let s = parse(src).map_err(|e| format!("`{src}` {e}"))?;
    alpha_from(&s, store, indet, (None, None))
}

type Expect = (Option<SortId>, Option<ObjId>);

fn alpha_from(s: &Sexp, store: &mut TermStore<'_>, indet: (SortId, ObjId), expect: Expect) -> Result<TermId, String> {
    let single_sort = (store.functor().signature().sorts().len() == 1).then_some(0);
    let err = |e: isokit_core::alpha::AlphaError| e.to_string();
    match s {
        Sexp::Atom(a) if a == "x" => store.indet(indet.0, indet.1).map_err(err),
        Sexp::Atom(a) if a.starts_with("c:") => {
            let (Some(sort), Some(obj)) = (expect.0.or(single_sort), expect.1) else {
                return Err(format!("cannot tell the sort of `{a}` here; write (const A@i s)"));
            };
            constant(store, sort, obj, &a[2..])
        }
        Sexp::Atom(a) => op(store, a, &[], indet),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(h), Sexp::Atom(sort), Sexp::Atom(elem)] if h == "const" => {
                let (sort, obj) = sorted_object(store, sort)?;
                constant(store, sort, obj, elem)
            }
            [Sexp::Atom(h), Sexp::Atom(f), arg] if h == "alpha" => {
                let mor = store.category().morphism_index(f).ok_or_else(|| format!("unknown morphism `{f}`"))?;
                let dom = store.category().dom(mor);
                let arg = alpha_from(arg, store, indet, (expect.0, Some(dom)))?;
                store.alpha(mor, arg).map_err(err)
            }
            [Sexp::Atom(h), ..] if h == "alpha" || h == "const" => Err(format!("malformed `{h}` form")),
            [Sexp::Atom(h), args @ ..] => op(store, h, args, indet),
            _ => Err("a list term must start with an operation, `alpha` or `const`".into()),
        },
    }
}

fn constant(store: &mut TermStore<'_>, sort: SortId, obj: ObjId, elem: &str) -> Result<TermId, String> {
    let carrier = store.functor().component(obj).carrier(sort);
    let e = carrier.iter().position(|n| n == elem).ok_or_else(|| format!("`{elem}` is not an element here"))?;
    store.constant(sort, obj, e).map_err(|e| e.to_string())
}

fn op(store: &mut TermStore<'_>, head: &str, args: &[Sexp], indet: (SortId, ObjId)) -> Result<TermId, String> {
    let (g, i) = split_at_object(head, "operation")?;
    let sig = store.functor().signature();
    let fun: FunId = sig.fun_index(g).ok_or_else(|| format!("unknown operation `{g}`"))?;
    let arg_sorts = sig.fun(fun).args.clone();
    if arg_sorts.len() != args.len() {
        return Err(format!("`{g}` expects {} argument(s), got {}", arg_sorts.len(), args.len()));
    }
    let obj = object(store, i)?;
    let args = args
        .iter()
        .zip(arg_sorts)
        .map(|(a, s)| alpha_from(a, store, indet, (Some(s), Some(obj))))
        .collect::<Result<Vec<_>, _>>()?;
    store.op(fun, obj, args).map_err(|e| e.to_string())
}

pub fn print_alpha(store: &TermStore<'_>, t: TermId) -> String {
    print_alpha_in(store, t, false)
}

fn print_alpha_in(store: &TermStore<'_>, t: TermId, typed: bool) -> String {
    let functor = store.functor();
    let sig = functor.signature();
    let cat = store.category();
    match store.node(t) {
        Node::Indet { .. } => "x".into(),
        Node::Const { sort, obj, elem } => {
            let name = &functor.component(*obj).carrier(*sort)[*elem];
            if typed {
                format!("c:{}", quote(name))
            } else {
                let so = format!("{}@{}", sig.sort_name(*sort), cat.object_name(*obj));
                format!("(const {} {})", quote(&so), quote(name))
            }
        }
        Node::Op { fun, obj, args } => {
            let head = quote(&format!("{}@{}", sig.fun(*fun).name, cat.object_name(*obj)));
            if args.is_empty() {
                return head;
            }
            let mut out = format!("({head}");
            for &a in args {
                out.push(' ');
                out.push_str(&print_alpha_in(store, a, true));
            }
            out.push(')');
            out
        }
        Node::Alpha { mor, arg, .. } => {
            let single = sig.sorts().len() == 1;
            format!("(alpha {} {})", quote(cat.morphism_name(*mor)), print_alpha_in(store, *arg, single))
        }
    }
}

/// Prints a `θ`/`θ*` image: `x` or `(x f)` for indeterminates, `c:s` for
/// constants, base symbol names for operations.
pub fn print_component(store: &TermStore<'_>, t: &ThetaTerm) -> String {
    fn go(store: &TermStore<'_>, obj: ObjId, t: &ComponentTerm) -> String {
        let functor = store.functor();
        match t {
            ComponentTerm::Indet { subscript: None, .. } => "x".into(),
            ComponentTerm::Indet { subscript: Some(f), .. } => format!("(x {})", quote(store.category().morphism_name(*f))),
            ComponentTerm::Const { sort, elem } => format!("c:{}", quote(&functor.component(obj).carrier(*sort)[*elem])),
            ComponentTerm::Op { fun, args } => {
                let name = quote(&functor.signature().fun(*fun).name);
                if args.is_empty() {
                    return name;
                }
                let parts: Vec<String> = args.iter().map(|a| go(store, obj, a)).collect();
                format!("({name} {})", parts.join(" "))
            }
        }
    }
    go(store, t.object, &t.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use isokit_core::phl::Theory;
    use isokit_core::tj::ModelFunctor;
    use isokit_core::{FinCategory, FinGroup, GroupPresheaf};

    #[test]
    fn atoms_lists_and_quotes() {
        assert_eq!(parse("x").unwrap(), Sexp::Atom("x".into()));
        assert_eq!(
            parse(" (m x  c:\"(12)\") ").unwrap(),
            Sexp::List(vec![Sexp::Atom("m".into()), Sexp::Atom("x".into()), Sexp::Atom("c:(12)".into())])
        );
        assert_eq!(parse("\"a \\\"b\\\"\"").unwrap(), Sexp::Atom("a \"b\"".into()));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse("(m x").unwrap_err().message, "unclosed `(`");
        assert_eq!(parse("x y").unwrap_err().offset, 2);
        assert!(parse(")").is_err());
        assert!(parse("\"abc").is_err());
    }

    #[test]
    fn quoting_round_trips() {
        for name in ["x", "(12)", "a b", "", "q\"uote", "back\\slash"] {
            assert_eq!(parse(&quote(name)).unwrap(), Sexp::Atom(name.into()));
        }
    }

    #[test]
    fn theory_terms_round_trip() {
        let groups = Theory::groups();
        let sig = groups.signature();
        let ctx = vec![("x".to_string(), 0), ("y".to_string(), 0)];
        let t = parse_phl("(m (inv x) (m y e))", sig, &ctx).unwrap();
        assert_eq!(print_phl(&t, sig), "(m (inv x) (m y e))");
        assert!(parse_phl("(m x)", sig, &ctx).is_err());
        assert!(parse_phl("z", sig, &ctx).is_err());
    }

    fn s3_over_arrow() -> ModelFunctor {
        ModelFunctor::from_presheaf(&GroupPresheaf::constant(FinCategory::arrow(), FinGroup::symmetric(3)))
    }

    #[test]
    fn alpha_terms_round_trip() {
        let f = s3_over_arrow();
        let mut store = TermStore::new(&f);
        for src in [
            "x",
            "(alpha f (m@0 x c:\"(12)\"))",
            "(m@1 (alpha f x) (inv@1 e@1))",
            "(const X@1 \"(123)\")",
            "(alpha f (const X@0 \"(12)\"))",
        ] {
            let t = parse_alpha(src, &mut store, (0, 0)).unwrap();
            let printed = print_alpha(&store, t);
            assert_eq!(parse_alpha(&printed, &mut store, (0, 0)).unwrap(), t, "{printed}");
        }
    }

    #[test]
    fn constants_need_a_known_position() {
        let f = s3_over_arrow();
        let mut store = TermStore::new(&f);
        assert!(parse_alpha("c:\"(12)\"", &mut store, (0, 0)).is_err());
        assert!(parse_alpha("(m@0 x c:nope)", &mut store, (0, 0)).is_err());
        assert!(parse_alpha("(alpha f (alpha f x))", &mut store, (0, 0)).is_err());
    }
}
