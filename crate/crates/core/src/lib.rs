//! Covariant isotropy for functor categories `J → Group`, computed on finite
//! inputs.
//!
//! The crate is `no_std` (it only needs `alloc`). It contains:
//!
//! * [`phl`]: multi-sorted signatures, terms, Horn sequents, quasi-equational
//!   theories, finite partial structures and satisfaction checking;
//! * [`fincat`]: finite categories given by composition tables and the group
//!   `Aut(Id_J)`;
//! * [`fingroup`]: Cayley-table groups, homomorphisms, conjugation,
//!   automorphism groups, centers and limits of group diagrams;
//! * [`presheaf`]: functors `J → Group`, natural transformations and their
//!   automorphism groups;
//! * [`freeext`]: the free extension `G * ⟨x⟩` in normal form, substitution
//!   and the brute-force search for isotropy words;
//! * [`tj`]: the signature `Σ^J`, theory `T^J`, and the translation between
//!   `T^J`-models and functors `J → Tmod`;
//! * [`alpha`]: the α-rewriting engine on closed `Σ^J(M, x)` terms and the
//!   `θ`/`θ*` translations;
//! * [`isotropy`]: extended inner automorphisms `lim F × Aut(Id_J)`,
//!   innerness witnesses and coherence checks.

#![no_std]

extern crate alloc;

pub mod alpha;
pub mod fincat;
pub mod fingroup;
pub mod freeext;
pub mod isotropy;
pub mod phl;
pub mod presheaf;
pub mod tj;

pub use fincat::{FinCategory, IdNatAut, MorId, ObjId};
pub use fingroup::{homomorphisms, Elem, Enumerated, FinGroup, GroupHom, LimitElement};
pub use presheaf::{GroupPresheaf, NatTrans};
pub use isotropy::{isotropy_group, ExtendedInnerAut};
