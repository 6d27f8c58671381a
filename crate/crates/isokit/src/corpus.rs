//! Named catalog entries and the seeded random corpus of presheaves.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isokit_core::fingroup::automorphism_group;
use isokit_core::{homomorphisms, FinCategory, FinGroup, GroupHom, GroupPresheaf};

pub const DEFAULT_SEED: u64 = 20_240_611;

/// `ISOKIT_SEED` if set and numeric, else [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("ISOKIT_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// `Zn`, `Sn` (n ≤ 5), `Dn` (order 2n), `V4`, and products `AxB`.
pub fn named_group(name: &str) -> Option<FinGroup> {
    if let Some((a, b)) = name.split_once('x') {
        return Some(FinGroup::product(&named_group(a)?, &named_group(b)?));
    }
    let n = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 1);
    match name {
        "V4" => Some(FinGroup::product(&FinGroup::cyclic(2), &FinGroup::cyclic(2))),
        _ if name.starts_with('Z') => Some(FinGroup::cyclic(n(&name[1..])?)),
        _ if name.starts_with('S') => n(&name[1..]).filter(|&k| k <= 5).map(FinGroup::symmetric),
        _ if name.starts_with('D') => n(&name[1..]).filter(|&k| k >= 2).map(FinGroup::dihedral),
        _ => None,
    }
}

/// `terminal`, `discrete<n>`, `arrow`, `parallel_pair`, `cospan`,
/// `commutative_square`, and `B<group>` for one-object categories.
pub fn named_category(name: &str) -> Option<FinCategory> {
    match name {
        "terminal" => Some(FinCategory::terminal()),
        "arrow" => Some(FinCategory::arrow()),
        "parallel_pair" => Some(FinCategory::parallel_pair()),
        "cospan" => Some(FinCategory::cospan()),
        "commutative_square" => Some(FinCategory::commutative_square()),
        _ => {
            if let Some(n) = name.strip_prefix("discrete") {
                return n.parse().ok().map(FinCategory::discrete);
            }
            let g = named_group(name.strip_prefix('B')?)?;
            Some(FinCategory::one_object(&g))
        }
    }
}

/// The index categories of the `Aut(Id_J)` catalog.
pub const CATEGORY_CATALOG: [&str; 8] =
    ["discrete3", "arrow", "parallel_pair", "cospan", "BZ2", "BZ3", "BS3", "commutative_square"];

/// Groups the corpus draws from, all of order at most 12.
pub const GROUP_POOL: [&str; 16] =
    ["Z2", "Z3", "Z4", "V4", "Z5", "Z6", "S3", "Z7", "Z8", "D4", "Z9", "Z10", "D5", "Z12", "D6", "Z2xZ6"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub presheaf: GroupPresheaf,
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Involution,
    Arrow,
    ParallelPair,
}

const SHAPES: [Shape; 8] = [
    Shape::Involution,
    Shape::Involution,
    Shape::Involution,
    Shape::Arrow,
    Shape::Arrow,
    Shape::Arrow,
    Shape::ParallelPair,
    Shape::ParallelPair,
];

fn pick_group(rng: &mut ChaCha8Rng) -> (&'static str, FinGroup) {
    let name = *GROUP_POOL.choose(rng).expect("nonempty pool");
    (name, named_group(name).expect("pool names parse"))
}

/// Prefers a non-trivial choice when there is one.
fn pick_nontrivial<'a>(rng: &mut ChaCha8Rng, all: &'a [GroupHom], trivial: impl Fn(&GroupHom) -> bool) -> &'a GroupHom {
    let interesting: Vec<&GroupHom> = all.iter().filter(|h| !trivial(h)).collect();
    if interesting.is_empty() {
        all.choose(rng).expect("at least one map")
    } else {
        interesting[rng.gen_range(0..interesting.len())]
    }
}

fn involution(rng: &mut ChaCha8Rng) -> CorpusEntry {
    let (gname, g) = pick_group(rng);
    let auts = automorphism_group(&g);
    let invols: Vec<GroupHom> = auts.members().iter().filter(|a| a.compose(a).is_identity()).cloned().collect();
    let tau = pick_nontrivial(rng, &invols, GroupHom::is_identity).clone();
    let base = FinCategory::one_object(&FinGroup::cyclic(2));
    let maps = base.morphism_ids().map(|m| if base.is_identity(m) { GroupHom::identity(g.order()) } else { tau.clone() }).collect();
    CorpusEntry { name: format!("BZ2-{gname}"), presheaf: GroupPresheaf::new(base, vec![g], maps).expect("involutive action") }
}

/// Two groups with a non-trivial homomorphism between them, when the draw
/// allows one within a few attempts.
fn hom_pair(rng: &mut ChaCha8Rng) -> (String, FinGroup, FinGroup, Vec<GroupHom>) {
    let mut last = None;
    for _ in 0..8 {
        let (a, ga) = pick_group(rng);
        let (b, gb) = pick_group(rng);
        let homs = homomorphisms(&ga, &gb);
        let nontrivial = homs.len() > 1;
        last = Some((format!("{a}-{b}"), ga, gb, homs));
        if nontrivial {
            break;
        }
    }
    last.expect("at least one draw")
}

fn arrow(rng: &mut ChaCha8Rng) -> CorpusEntry {
    let (name, ga, gb, homs) = hom_pair(rng);
    let unit = gb.unit();
    let h = pick_nontrivial(rng, &homs, |h| h.0.iter().all(|&x| x == unit)).clone();
    let base = FinCategory::arrow();
    let groups = vec![ga, gb];
    let maps = base
        .morphism_ids()
        .map(|m| if base.is_identity(m) { GroupHom::identity(groups[base.dom(m)].order()) } else { h.clone() })
        .collect();
    CorpusEntry { name: format!("arrow-{name}"), presheaf: GroupPresheaf::new(base, groups, maps).expect("arrow functor") }
}

fn parallel_pair(rng: &mut ChaCha8Rng) -> CorpusEntry {
    let (name, ga, gb, homs) = hom_pair(rng);
    let f = homs.choose(rng).expect("trivial map exists").clone();
    let others: Vec<&GroupHom> = homs.iter().filter(|h| **h != f).collect();
    let g = if others.is_empty() { f.clone() } else { others[rng.gen_range(0..others.len())].clone() };
    let base = FinCategory::parallel_pair();
    let groups = vec![ga, gb];
    let maps = base
        .morphism_ids()
        .map(|m| match base.morphism_name(m) {
            "f" => f.clone(),
            "g" => g.clone(),
            _ => GroupHom::identity(groups[base.dom(m)].order()),
        })
        .collect();
    CorpusEntry {
        name: format!("parallel-{name}"),
        presheaf: GroupPresheaf::new(base, groups, maps).expect("parallel pair functor"),
    }
}

/// Eight presheaves: three over `BZ2`, three over the arrow, two over the
/// parallel pair. Deterministic in `seed`.
pub fn generate(seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<CorpusEntry> = Vec::new();
    for shape in SHAPES {
        let mut e = match shape {
            Shape::Involution => involution(&mut rng),
            Shape::Arrow => arrow(&mut rng),
            Shape::ParallelPair => parallel_pair(&mut rng),
        };
        let stem = e.name.clone();
        let mut k = 1;
        while out.iter().any(|o| o.name == e.name) {
            k += 1;
            e.name = format!("{stem}-{k}");
        }
        out.push(e);
    }
    out
}
