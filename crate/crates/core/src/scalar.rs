//! Integer coordinate types used by the lattice-like group constructions.
//!
//! Every construction with integer coordinates (lattices, semidirect
//! products, Heisenberg groups and the keys of lamp configurations) is
//! generic over a [`Coord`]. Arithmetic goes through the checked helpers
//! below, so a fixed-width coordinate reports overflow instead of wrapping.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::kernel::KernelError;

/// An exact signed integer usable as a group coordinate.
pub trait Coord:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Send
    + Sync
    + Integer
    + Signed
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
    + 'static
{
    /// Short name used in diagnostics.
    const NAME: &'static str;

    fn of_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("every coordinate type holds an i64")
    }
}

impl Coord for i64 {
    const NAME: &'static str = "i64";
}

impl Coord for i128 {
    const NAME: &'static str = "i128";
}

impl Coord for BigInt {
    const NAME: &'static str = "bigint";
}

#[inline]
pub(crate) fn add<C: Coord>(a: &C, b: &C) -> Result<C, KernelError> {
    a.checked_add(b).ok_or(KernelError::Overflow(C::NAME))
}

#[inline]
pub(crate) fn sub<C: Coord>(a: &C, b: &C) -> Result<C, KernelError> {
    a.checked_sub(b).ok_or(KernelError::Overflow(C::NAME))
}

#[inline]
pub(crate) fn mul<C: Coord>(a: &C, b: &C) -> Result<C, KernelError> {
    a.checked_mul(b).ok_or(KernelError::Overflow(C::NAME))
}

#[inline]
pub(crate) fn neg<C: Coord>(a: &C) -> Result<C, KernelError> {
    C::zero().checked_sub(a).ok_or(KernelError::Overflow(C::NAME))
}

#[inline]
pub(crate) fn add_assign<C: Coord>(a: &mut C, b: &C) -> Result<(), KernelError> {
    *a = add(a, b)?;
    Ok(())
}

/// Least non-negative residue of `a` modulo `n`.
#[inline]
pub(crate) fn residue<C: Coord>(a: &C, n: &C) -> C {
    a.mod_floor(n)
}
