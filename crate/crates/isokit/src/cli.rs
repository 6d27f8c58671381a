//! Subcommands. [`run`] never prints or exits; `main` does.
//!
//! Exit codes: 0 success, 1 validation failure (JSON on stderr), 2 parse or
//! usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isokit_core::alpha::{Strategy, TermId, TermStore, ThetaTerm};
use isokit_core::fincat::aut_identity_functor;
use isokit_core::fingroup::limit_of_diagram;
use isokit_core::freeext::{FreeExtension, IsotropyElement, Syllable, Word};
use isokit_core::isotropy::{evaluate_at, inner_witnesses, isotropy_group, ExtendedInnerAut};
use isokit_core::phl::{PartialStructure, Theory};
use isokit_core::presheaf::nat_auts;
use isokit_core::tj::{build_tj, AxiomFamily, ModelFunctor};
use isokit_core::{FinCategory, FinGroup, GroupHom, GroupPresheaf, NatTrans, ObjId};

use crate::corpus;
use crate::error::{Error, Result};
use crate::format::{self, Kind};
use crate::sexpr;
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "isokit", version, about = "Isotropy of presheaves of finite groups")]
struct Cli {
    /// Worker threads for enumerations that support it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check any document.
    Validate { file: PathBuf },
    /// Natural automorphisms of the identity functor of a category.
    AutId { category: PathBuf },
    /// Elements of the limit of a presheaf.
    Limit { presheaf: PathBuf },
    /// Natural automorphisms of a presheaf.
    NatAuts { presheaf: PathBuf },
    /// The isotropy group and the inner automorphisms it induces.
    Isotropy { presheaf: PathBuf },
    /// Whether an automorphism of a presheaf is inner, with witnesses.
    IsInner { presheaf: PathBuf, nat_trans: PathBuf },
    /// Brute-force search for isotropy words in the free extension.
    IsotropySearch {
        group: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
    /// The theory whose models are functors from a category into models.
    BuildTj { theory: PathBuf, category: PathBuf },
    /// A presheaf as a model of the functor theory of groups over its base.
    ToModel { presheaf: PathBuf },
    /// Check a finite partial structure against a theory.
    CheckModel { structure: PathBuf, theory: PathBuf },
    /// α-normal form of a closed term.
    Normalize {
        #[command(flatten)]
        term: TermArgs,
    },
    /// Replace α-applied indeterminates by subscripted ones.
    Theta {
        #[command(flatten)]
        term: TermArgs,
    },
    /// As `theta`, then erase subscripts.
    ThetaStar {
        #[command(flatten)]
        term: TermArgs,
    },
    /// Print a built-in category, group or theory.
    Catalog { kind: CatalogKind, name: String },
    /// The seeded random corpus of presheaves (seed from ISOKIT_SEED).
    Corpus {
        #[arg(long)]
        seed: Option<u64>,
        /// Write one file per presheaf into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized law checks over one presheaf.
    Laws {
        presheaf: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 1000)]
        terms: usize,
        #[arg(long, default_value_t = 500)]
        local_terms: usize,
        #[arg(long, default_value_t = 200)]
        triples: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
}

#[derive(Debug, clap::Args)]
struct TermArgs {
    /// A term file (JSON `{"term", "indet"}` or bare text) or the term itself.
    term: String,
    #[arg(long)]
    presheaf: PathBuf,
    /// `A@i`: sort and object of the indeterminate. Defaults to the first
    /// sort at the first object.
    #[arg(long)]
    indet: Option<String>,
    /// Normalize before translating (`theta`, `theta-star`).
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CatalogKind {
    Category,
    Group,
    Theory,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(value: &Value) -> Self {
        Outcome { code: 0, stdout: format::to_pretty(value), stderr: String::new() }
    }

    fn error(e: &Error) -> Self {
        Outcome { code: e.exit_code(), stdout: String::new(), stderr: format::to_pretty(&e.to_json()) }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli) {
        Ok(out) => out,
        Err(e) => Outcome::error(&e),
    }
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let jobs = cli.jobs.max(1);
    let value = match cli.command {
        Command::Validate { file } => validate(&file)?,
        Command::AutId { category } => aut_id(&format::load_category(&category)?),
        Command::Limit { presheaf } => limit(&format::load_presheaf(&presheaf)?),
        Command::NatAuts { presheaf } => nat_auts_cmd(&format::load_presheaf(&presheaf)?),
        Command::Isotropy { presheaf } => isotropy(&format::load_presheaf(&presheaf)?),
        Command::IsInner { presheaf, nat_trans } => {
            let p = format::load_presheaf(&presheaf)?;
            let (src, tgt, t) = format::load_nat_trans(&nat_trans, Some(&p))?;
            if src != p || tgt != p {
                return Err(Error::parse("the transformation must go from the presheaf to itself"));
            }
            is_inner(&p, &t)?
        }
        Command::IsotropySearch { group, max_len } => isotropy_search(&format::load_group(&group)?, max_len, jobs),
        Command::BuildTj { theory, category } => {
            build_tj_cmd(&format::load_theory(&theory)?, &format::load_category(&category)?)
        }
        Command::ToModel { presheaf } => to_model(&format::load_presheaf(&presheaf)?)?,
        Command::CheckModel { structure, theory } => {
            let theory = format::load_theory(&theory)?;
            let m = format::load_structure(&structure, theory.signature())?;
            return check_model(&m, &theory);
        }
        Command::Normalize { term } => with_term(&term, normalize)?,
        Command::Theta { term } => with_term(&term, |s, t, n| theta(s, t, n, false))?,
        Command::ThetaStar { term } => with_term(&term, |s, t, n| theta(s, t, n, true))?,
        Command::Catalog { kind, name } => catalog(kind, &name)?,
        Command::Corpus { seed, out } => corpus_cmd(seed.unwrap_or_else(corpus::seed_from_env), out.as_deref())?,
        Command::Laws { presheaf, seed, pairs, terms, local_terms, triples, depth } => {
            let p = format::load_presheaf(&presheaf)?;
            let samples = suite::Samples { pairs, terms, local_terms, triples, depth };
            let laws = suite::all_laws(&p, samples, seed.unwrap_or_else(corpus::seed_from_env));
            let value = format::to_value(&laws);
            if !laws.passed() {
                let e = Error::invalid("a law check failed", value.clone());
                return Ok(Outcome { code: 1, stdout: format::to_pretty(&value), stderr: format::to_pretty(&e.to_json()) });
            }
            value
        }
    };
    Ok(Outcome::ok(&value))
}

// ---- JSON views ----

fn names(group: &FinGroup, elems: &[usize]) -> Vec<String> {
    elems.iter().map(|&a| group.name(a).to_string()).collect()
}

fn objects(cat: &FinCategory) -> Vec<&str> {
    cat.object_ids().map(|o| cat.object_name(o)).collect()
}

fn hom_json(h: &GroupHom, target: &FinGroup) -> Value {
    json!(names(target, &h.0))
}

fn nat_json(p: &GroupPresheaf, t: &NatTrans) -> Value {
    Value::Array(p.base().object_ids().map(|o| hom_json(t.component(o), p.group(o))).collect())
}

fn ext_json(p: &GroupPresheaf, e: &ExtendedInnerAut) -> Value {
    let base = p.base();
    json!({
        "g": base.object_ids().map(|o| p.group(o).name(e.g.0[o])).collect::<Vec<_>>(),
        "psi": e.psi.0.iter().map(|&m| base.morphism_name(m)).collect::<Vec<_>>(),
    })
}

pub fn word_json(group: &FinGroup, w: &Word) -> Value {
    Value::Array(
        w.syllables()
            .iter()
            .map(|s| match *s {
                Syllable::Elem(a) => json!({ "g": group.name(a) }),
                Syllable::Var(_, n) => json!({ "x": n }),
            })
            .collect(),
    )
}

// ---- commands ----

fn validate(path: &Path) -> Result<Value> {
    let value = format::read_json(path)?;
    let kind = Kind::detect(&value).ok_or_else(|| Error::parse(format!("{}: unrecognized document", path.display())))?;
    let dir = format::dir_of(path);
    let ctx = |e: Error| e.context(path.display());
    let summary = match kind {
        Kind::Category => {
            let c = format::from_value::<format::CategoryFile>(value, "category")?.build().map_err(ctx)?;
            json!({ "objects": c.object_count(), "morphisms": c.morphism_count() })
        }
        Kind::Group => {
            let g = format::from_value::<format::GroupFile>(value, "group")?.build().map_err(ctx)?;
            json!({ "order": g.order() })
        }
        Kind::Presheaf => {
            let p = format::from_value::<format::PresheafFile>(value, "presheaf")?.build(&dir).map_err(ctx)?;
            json!({ "objects": objects(p.base()), "orders": p.groups().iter().map(FinGroup::order).collect::<Vec<_>>() })
        }
        Kind::NatTrans => {
            let file: format::NatTransFile = format::from_value(value, "natural transformation")?;
            let (_, _, t) = file.build(&dir, None).map_err(ctx)?;
            json!({ "iso": t.is_iso() })
        }
        Kind::Theory => {
            let t = format::from_value::<format::TheoryFile>(value, "theory")?.build().map_err(ctx)?;
            json!({ "sorts": t.signature().sorts().len(), "funs": t.signature().funs().len(), "axioms": t.axioms().len() })
        }
        Kind::Structure => {
            let file: format::StructureFile = format::from_value(value, "structure")?;
            let r = file.theory.as_ref().ok_or_else(|| Error::parse("a structure needs a `theory` to be validated"))?;
            let (theory, _) = format::resolve(r, &dir, "theory").map_err(ctx)?;
            let theory = theory.build().map_err(ctx)?;
            file.build(theory.signature()).map_err(ctx)?;
            json!({ "sorts": theory.signature().sorts().len() })
        }
        Kind::Term => {
            let file: format::TermFile = format::from_value(value, "term")?;
            sexpr::parse(&file.term).map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
            json!({})
        }
    };
    let mut out = json!({ "kind": kind.as_str(), "valid": true });
    if let (Value::Object(o), Value::Object(s)) = (&mut out, summary) {
        o.extend(s);
    }
    Ok(out)
}

fn aut_id(cat: &FinCategory) -> Value {
    let auts = aut_identity_functor(cat);
    let elements: Vec<Vec<&str>> =
        auts.members().iter().map(|a| a.0.iter().map(|&m| cat.morphism_name(m)).collect()).collect();
    json!({ "objects": objects(cat), "order": auts.order(), "elements": elements })
}

fn limit(p: &GroupPresheaf) -> Value {
    let lim = limit_of_diagram(p);
    let elements: Vec<Vec<&str>> =
        lim.members().iter().map(|g| g.0.iter().enumerate().map(|(o, &a)| p.group(o).name(a)).collect()).collect();
    json!({ "objects": objects(p.base()), "order": lim.order(), "elements": elements })
}

fn nat_auts_cmd(p: &GroupPresheaf) -> Value {
    let auts = nat_auts(p);
    let elements: Vec<Value> = auts.members().iter().map(|t| nat_json(p, t)).collect();
    json!({ "objects": objects(p.base()), "order": auts.order(), "elements": elements })
}

fn isotropy(p: &GroupPresheaf) -> Value {
    let z = isotropy_group(p);
    let id = NatTrans::identity(p);
    // the inner automorphism realized by each member, grouped
    let mut inner: BTreeMap<Vec<GroupHom>, Vec<&ExtendedInnerAut>> = BTreeMap::new();
    for e in z.members() {
        let pi = p.base().object_ids().map(|k| evaluate_at(e, p, &id, k).expect("object in range")).collect();
        inner.entry(pi).or_default().push(e);
    }
    let witnesses: Vec<Value> = inner
        .iter()
        .map(|(pi, es)| {
            json!({
                "automorphism": nat_json(p, &NatTrans(pi.clone())),
                "witnesses": es.iter().map(|e| ext_json(p, e)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "objects": objects(p.base()),
        "order": z.order(),
        "limit_order": z.limit().order(),
        "aut_id_order": z.aut_id().order(),
        "generators": z.generators().into_iter().map(|e| ext_json(p, e)).collect::<Vec<_>>(),
        "inner_automorphisms": inner.len(),
        "witnesses": witnesses,
    })
}

fn is_inner(p: &GroupPresheaf, t: &NatTrans) -> Result<Value> {
    let ws = inner_witnesses(p, t).map_err(|e| Error::invalid(&e, json!({ "reason": e.to_string() })))?;
    Ok(json!({
        "inner": !ws.is_empty(),
        "witnesses": ws.iter().map(|e| ext_json(p, e)).collect::<Vec<_>>(),
    }))
}

/// Runs the search split across `jobs` threads and merges in the
/// sequential order.
pub fn search_words(group: &FinGroup, max_len: usize, jobs: usize) -> Vec<IsotropyElement> {
    let ext = FreeExtension::new(group);
    let mut found: Vec<IsotropyElement> = if jobs <= 1 {
        ext.isotropy_search(max_len)
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..jobs).map(|k| s.spawn(move || ext.isotropy_search_shard(max_len, k, jobs))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("search worker")).collect()
        })
    };
    found.sort_by(|a, b| (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word)));
    found
}

fn isotropy_search(group: &FinGroup, max_len: usize, jobs: usize) -> Value {
    let ext = FreeExtension::new(group);
    let found = search_words(group, max_len, jobs);
    let elements: Vec<Value> = found
        .iter()
        .map(|e| {
            let conjugator = group.elements().find(|&g| ext.conjugator(g) == e.word).map(|g| group.name(g));
            json!({ "word": word_json(group, &e.word), "inverse": word_json(group, &e.inverse), "conjugator": conjugator })
        })
        .collect();
    json!({
        "order": found.len(),
        "elements": elements,
        "bound": { "max_len": max_len, "exponents": [-2, -1, 1, 2] },
    })
}

fn build_tj_cmd(theory: &Theory, cat: &FinCategory) -> Value {
    let tj = build_tj(theory, cat);
    let mut out = format::to_value(&format::TheoryFile::from_theory(tj.theory()));
    let counts = tj.counts();
    let families: BTreeMap<&str, usize> = AxiomFamily::ALL.iter().map(|&f| (f.as_str(), counts.get(f))).collect();
    let expected = isokit_core::tj::AxiomCounts::expected(theory, cat);
    out["counts"] = json!({
        "sorts": tj.signature().sorts().len(),
        "funs": tj.signature().funs().len(),
        "axioms": families,
        "matches_formula": counts == expected,
    });
    out
}

fn to_model(p: &GroupPresheaf) -> Result<Value> {
    let tj = build_tj(&Theory::groups(), p.base());
    let model = tj.functor_to_model(&ModelFunctor::from_presheaf(p)).map_err(|e| Error::invalid(&e, json!({})))?;
    Ok(format::to_value(&format::StructureFile::from_structure(&model)))
}

fn check_model(m: &PartialStructure, theory: &Theory) -> Result<Outcome> {
    let report = m.check_model(theory).map_err(Error::parse)?;
    let sig = theory.signature();
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| {
            let ax = &theory.axioms()[f.axiom];
            let witness: BTreeMap<&str, &str> =
                ax.context.iter().zip(&f.witness).map(|((v, s), &a)| (v.as_str(), m.carrier(*s)[a].as_str())).collect();
            json!({ "axiom": f.axiom, "sequent": ax.render(sig), "witness": witness })
        })
        .collect();
    let value = json!({ "model": report.is_model(), "axioms": theory.axioms().len(), "failures": failures });
    if report.is_model() {
        return Ok(Outcome::ok(&value));
    }
    let e = Error::invalid("structure is not a model", json!({ "failures": value["failures"].clone() }));
    Ok(Outcome { code: 1, stdout: format::to_pretty(&value), stderr: format::to_pretty(&e.to_json()) })
}

fn read_term(arg: &str) -> Result<format::TermFile> {
    let path = Path::new(arg);
    if !path.is_file() {
        return Ok(format::TermFile { term: arg.to_string(), indet: None });
    }
    let text = fs::read_to_string(path).map_err(|e| Error::parse(format!("{arg}: {e}")))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::String(term)) => Ok(format::TermFile { term, indet: None }),
        Ok(v @ Value::Object(_)) => format::from_value(v, "term").map_err(|e| e.context(arg)),
        _ => Ok(format::TermFile { term: text.trim().to_string(), indet: None }),
    }
}

fn with_term(args: &TermArgs, f: impl FnOnce(&mut TermStore<'_>, TermId, bool) -> Result<Value>) -> Result<Value> {
    let p = format::load_presheaf(&args.presheaf)?;
    let functor = ModelFunctor::from_presheaf(&p);
    let mut store = TermStore::new(&functor);
    let file = read_term(&args.term)?;
    let indet = match args.indet.as_ref().or(file.indet.as_ref()) {
        Some(s) => sexpr::sorted_object(&store, s).map_err(Error::parse)?,
        None => (0, 0),
    };
    let t = sexpr::parse_alpha(&file.term, &mut store, indet).map_err(Error::parse)?;
    f(&mut store, t, args.normalize)
}

fn normalize(store: &mut TermStore<'_>, t: TermId, _: bool) -> Result<Value> {
    let nf = store.normalize(t);
    let li = store.normalize_with(t, Strategy::LeftmostInnermost);
    let ro = store.normalize_with(t, Strategy::RightmostOutermost);
    Ok(json!({
        "term": sexpr::print_alpha(store, t),
        "normal_form": sexpr::print_alpha(store, nf),
        "alpha_restricted": store.is_alpha_restricted(nf),
        "steps": { "leftmost_innermost": li.steps, "rightmost_outermost": ro.steps },
        "strategies_agree": li.normal_form == nf && ro.normal_form == nf,
    }))
}

fn theta(store: &mut TermStore<'_>, t: TermId, normalize_first: bool, star: bool) -> Result<Value> {
    let t = if normalize_first { store.normalize(t) } else { t };
    let image: std::result::Result<ThetaTerm, _> = if star { store.theta_star(t) } else { store.theta(t) };
    let image = image.map_err(|e| Error::invalid(&e, json!({ "term": sexpr::print_alpha(store, t) })))?;
    let obj: ObjId = image.object;
    Ok(json!({
        "object": store.category().object_name(obj),
        "term": sexpr::print_component(store, &image),
    }))
}

fn catalog(kind: CatalogKind, name: &str) -> Result<Value> {
    let unknown = || Error::parse(format!("no catalog entry `{name}`"));
    Ok(match kind {
        CatalogKind::Category => {
            format::to_value(&format::CategoryFile::from_category(&corpus::named_category(name).ok_or_else(unknown)?))
        }
        CatalogKind::Group => format::to_value(&format::GroupFile::from_group(&corpus::named_group(name).ok_or_else(unknown)?)),
        CatalogKind::Theory if name == "groups" => format::to_value(&format::TheoryFile::from_theory(&Theory::groups())),
        CatalogKind::Theory => return Err(unknown()),
    })
}

fn corpus_cmd(seed: u64, out: Option<&Path>) -> Result<Value> {
    let entries = corpus::generate(seed);
    let docs: Vec<(String, Value)> = entries
        .iter()
        .map(|e| (e.name.clone(), format::to_value(&format::PresheafFile::from_presheaf(&e.presheaf))))
        .collect();
    match out {
        None => Ok(json!({
            "seed": seed,
            "presheaves": docs.into_iter().map(|(n, p)| json!({ "name": n, "presheaf": p })).collect::<Vec<_>>(),
        })),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::parse(format!("{}: {e}", dir.display())))?;
            let mut written = Vec::new();
            for (name, doc) in docs {
                let path = dir.join(format!("{name}.json"));
                fs::write(&path, format::to_pretty(&doc)).map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
                written.push(path.display().to_string());
            }
            Ok(json!({ "seed": seed, "written": written }))
        }
    }
}
