//! File formats, command-line surface and test corpus around
//! [`isokit_core`].

pub mod cli;
pub mod corpus;
pub mod error;
pub mod format;
pub mod sexpr;
pub mod suite;

pub use error::{Error, Result};
