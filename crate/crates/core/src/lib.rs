//! Computational tools for translation lengths of outer automorphisms of
//! free groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`word`]: reduced and cyclic words, the `alpha` / `alpha_tilde`
//!   subword-power statistics.
//! * [`automorphism`]: automorphisms as image tuples, Nielsen decomposition
//!   into permutations, inversions and Dehn twists, outer canonical forms.
//! * [`cancellation`]: bounded-cancellation constants and the certified
//!   constant controlling how far one generator can move `alpha_tilde`.
//! * [`upg`]: filtered graph maps `f(E_i) = E_i u_i`, path iteration,
//!   exceptional paths, splittings and growth witnesses.
//! * [`translen`]: growth classification and lower / upper bounds on the
//!   translation length.
//! * [`oracle`]: breadth-first enumeration of balls in `Out(F_n)` giving
//!   exact word norms.
//! * [`report`]: experiment configuration, JSON certificates and CSV tables
//!   behind the `outfn` command line tool.

pub mod automorphism;
pub mod cancellation;
pub mod matrix;
pub mod oracle;
pub mod random;
pub mod report;
pub mod translen;
pub mod upg;
pub mod word;

pub use automorphism::{Automorphism, AutError, Generator, GeneratorWord, OuterClass};
pub use word::{CyclicWord, Letter, ReducedWord, WordError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Cancellation(#[from] cancellation::CancellationError),
    #[error(transparent)]
    Upg(#[from] upg::UpgError),
    #[error(transparent)]
    Tau(#[from] translen::TauError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
}
