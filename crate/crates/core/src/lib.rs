//! Probabilities of group laws on explicit groups.
//!
//! The crate is generic over the integer coordinate type used by lattice,
//! semidirect, Heisenberg and wreath constructions (see [`Coord`]). The
//! aliases below fix the common choices: [`Group`]/[`Element`] use checked
//! `i64` coordinates, [`BigGroup`]/[`BigElement`] use arbitrary precision.

pub mod exact;
pub mod geometry;
pub mod harness;
pub mod identity;
pub mod kernel;
pub mod law;
pub mod scalar;
pub mod walk;

pub use kernel::{
    GeneratingSet as GenericGeneratingSet, GroupDescriptor, GroupElement as GenericElement,
    GroupHandle as GenericGroup, KernelError,
};
pub use law::{parse_law, LawError, LawExpr};
pub use scalar::Coord;

pub type Group = kernel::GroupHandle<i64>;
pub type Element = kernel::GroupElement<i64>;
pub type GeneratingSet = kernel::GeneratingSet<i64>;

pub type BigGroup = kernel::GroupHandle<num_bigint::BigInt>;
pub type BigElement = kernel::GroupElement<num_bigint::BigInt>;
pub type BigGeneratingSet = kernel::GeneratingSet<num_bigint::BigInt>;

use thiserror::Error;

/// Errors surfaced by the experiment-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("config error on line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
