//! Group elements, group arithmetic and the explicit group constructions.
//!
//! Conventions used everywhere in the crate:
//!
//! * commutator `[a, b] = a b a⁻¹ b⁻¹`, left-normed for longer brackets:
//!   `[a, b, c] = [[a, b], c]`;
//! * conjugation `a^b = b a b⁻¹`;
//! * wreath products act on lamps by `(g·L)(x) = L(g⁻¹x)`, so
//!   `(L₁, g₁)(L₂, g₂) = (L₁·(g₁·L₂), g₁g₂)`;
//! * random walks are right walks, `R_{t+1} = R_t x_t`.

mod descriptor;
mod element;
mod free;
mod generators;
mod group;
pub mod matrix;

pub use descriptor::{GroupDescriptor, MatrixKind};
pub use element::{
    CyclicResidue, GroupElement, HeisenbergElem, LatticeVec, Permutation, QuaternionUnit,
    SemidirectElem, TupleElem, TwistedHeisenbergElem, WreathElem, ENCODING_VERSION,
};
pub use free::{FreeWord, Letter};
pub use generators::GeneratingSet;
pub use group::GroupHandle;
pub use matrix::{companion_matrix, cyclotomic_action_matrix, totient, IntMatrix};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("element does not belong to {group}: {detail}")]
    TypeMismatch { group: String, detail: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{0} coordinate overflow")]
    Overflow(&'static str),
    #[error("invalid group construction: {0}")]
    Construction(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("group descriptor syntax error at {position}: {message}")]
    Descriptor { position: usize, message: String },
    #[error("cannot decode element: {0}")]
    Decode(String),
}
