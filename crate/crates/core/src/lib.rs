//! Symbolic tree automata, regular tree grammars and tree transducers whose
//! rules are guarded by predicates over an (infinite) label theory.

pub mod analysis;
pub mod classical;
pub mod cli;
pub mod compose;
pub mod error;
pub mod srtg;
pub mod sta;
pub mod stt;
pub mod syntax;
#[cfg(test)]
mod testing;
pub mod theory;
pub mod tree;
pub mod vta;

pub use error::{Error, Result};
