use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::element::*;
use crate::kernel::matrix::{self, IntMatrix};
use crate::kernel::{FreeWord, GroupDescriptor, KernelError, MatrixKind};
use crate::scalar::{self, Coord};

/// A validated group: immutable after construction and safe to share
/// between threads.
#[derive(Clone, Debug)]
pub struct GroupHandle<C: Coord> {
    descriptor: GroupDescriptor,
    kind: Kind<C>,
    identity: GroupElement<C>,
}

#[derive(Clone, Debug)]
enum Kind<C: Coord> {
    Free {
        rank: u32,
    },
    Lattice {
        dim: usize,
        modulus: Option<C>,
    },
    Cyclic {
        m: u64,
    },
    Semidirect {
        order: u64,
        /// `A^0, ..., A^{m-1}`.
        powers: Vec<IntMatrix<C>>,
        modulus: Option<C>,
    },
    Heisenberg {
        dim: usize,
        modulus: Option<C>,
    },
    HeisenbergSemidirect {
        order: u64,
        /// `(A^k)ᵀ`, acting on `u`.
        u_action: Vec<IntMatrix<C>>,
        /// `A^{-k}`, acting on `v`.
        v_action: Vec<IntMatrix<C>>,
        modulus: Option<C>,
    },
    Wreath {
        lamp: Box<GroupHandle<C>>,
        base: Box<GroupHandle<C>>,
    },
    Product(Vec<GroupHandle<C>>),
    Symmetric {
        n: u8,
    },
    Quaternion,
}

impl<C: Coord> GroupHandle<C> {
    /// Builds and validates a group from its descriptor.
    pub fn build(descriptor: &GroupDescriptor) -> Result<Self, KernelError> {
        let kind = Self::kind_for(descriptor, None)?;
        let identity = identity_of(&kind);
        Ok(GroupHandle { descriptor: descriptor.clone(), kind, identity })
    }

    pub fn parse(text: &str) -> Result<Self, KernelError> {
        Self::build(&text.parse()?)
    }

    fn kind_for(d: &GroupDescriptor, modulus: Option<u64>) -> Result<Kind<C>, KernelError> {
        let modc = modulus.map(|n| C::from_u64(n).expect("modulus fits every coordinate type"));
        let kind = match d {
            GroupDescriptor::Free(rank) => Kind::Free { rank: *rank },
            GroupDescriptor::Lattice(dim) => Kind::Lattice { dim: *dim, modulus: modc },
            GroupDescriptor::Cyclic(m) => {
                if *m == 0 {
                    return Err(KernelError::Construction("cyclic group of order 0".into()));
                }
                Kind::Cyclic { m: *m }
            }
            GroupDescriptor::Semidirect { matrix: kind, order } => {
                let a = action_matrix::<C>(kind)?;
                semidirect_kind(a, *order, modc)?
            }
            GroupDescriptor::Heisenberg(m) => {
                if *m < 2 {
                    return Err(KernelError::Argument(format!("Heisenberg group needs m >= 2, got {m}")));
                }
                Kind::Heisenberg { dim: (*m - 1) as usize, modulus: modc }
            }
            GroupDescriptor::HeisenbergSemidirect(m) => {
                let a = matrix::companion_matrix::<C>(*m)?;
                let mut u_action = Vec::with_capacity(*m as usize);
                let mut v_action = Vec::with_capacity(*m as usize);
                for k in 0..*m {
                    u_action.push(a.pow(k)?.transpose());
                    v_action.push(a.pow((*m - k) % *m)?);
                }
                Kind::HeisenbergSemidirect { order: *m, u_action, v_action, modulus: modc }
            }
            GroupDescriptor::Wreath { lamp, base } => {
                if modulus.is_some() {
                    return Err(KernelError::Construction("cannot reduce a wreath product modulo N".into()));
                }
                Kind::Wreath {
                    lamp: Box::new(GroupHandle::build(lamp)?),
                    base: Box::new(GroupHandle::build(base)?),
                }
            }
            GroupDescriptor::Product(parts) => {
                if modulus.is_some() {
                    return Err(KernelError::Construction("cannot reduce a product modulo N".into()));
                }
                Kind::Product(parts.iter().map(GroupHandle::build).collect::<Result<_, _>>()?)
            }
            GroupDescriptor::Dihedral(m) => {
                if *m == 0 {
                    return Err(KernelError::Construction("dihedral group needs m >= 1".into()));
                }
                let a = matrix::companion_matrix::<C>(2)?;
                semidirect_kind(a, 2, Some(C::from_u64(*m).expect("fits")))?
            }
            GroupDescriptor::Extraspecial3 => {
                let a = matrix::companion_matrix::<C>(3)?;
                semidirect_kind(a, 3, Some(C::of_i64(3)))?
            }
            GroupDescriptor::Symmetric(n) => {
                if *n == 0 || *n > 12 {
                    return Err(KernelError::Argument(format!("symmetric group degree {n} not in 1..=12")));
                }
                Kind::Symmetric { n: *n as u8 }
            }
            GroupDescriptor::Quaternion => Kind::Quaternion,
            GroupDescriptor::Quotient { base, modulus: n } => {
                if modulus.is_some() {
                    return Err(KernelError::Construction("nested quotients are not supported".into()));
                }
                if !base.is_lattice_type() {
                    return Err(KernelError::Construction(format!(
                        "quotient needs a lattice-type base, got {base}"
                    )));
                }
                if *n == 0 {
                    return Err(KernelError::Construction("quotient modulus must be positive".into()));
                }
                Self::kind_for(base, Some(*n))?
            }
        };
        Ok(kind)
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn name(&self) -> String {
        self.descriptor.to_string()
    }

    pub fn identity(&self) -> GroupElement<C> {
        self.identity.clone()
    }

    pub fn is_identity(&self, a: &GroupElement<C>) -> bool {
        *a == self.identity
    }

    /// The order of the group when it is finite.
    pub fn order(&self) -> Option<u64> {
        self.descriptor.order()
    }

    /// Dimension of the lattice part for `Lattice`, `Semidirect`,
    /// `Heisenberg` constructions.
    pub fn lattice_dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Lattice { dim, .. } | Kind::Heisenberg { dim, .. } => Some(*dim),
            Kind::Semidirect { powers, .. } => Some(powers[0].rows()),
            Kind::HeisenbergSemidirect { u_action, .. } => Some(u_action[0].rows()),
            _ => None,
        }
    }

    /// Coordinate modulus for quotient constructions.
    pub fn modulus(&self) -> Option<&C> {
        match &self.kind {
            Kind::Lattice { modulus, .. }
            | Kind::Semidirect { modulus, .. }
            | Kind::Heisenberg { modulus, .. }
            | Kind::HeisenbergSemidirect { modulus, .. } => modulus.as_ref(),
            _ => None,
        }
    }

    /// Order of the cyclic top group of a semidirect construction.
    pub fn top_order(&self) -> Option<u64> {
        match &self.kind {
            Kind::Semidirect { order, .. } | Kind::HeisenbergSemidirect { order, .. } => Some(*order),
            _ => None,
        }
    }

    /// The action matrix `A` of a semidirect construction.
    pub fn action_matrix(&self) -> Option<&IntMatrix<C>> {
        match &self.kind {
            Kind::Semidirect { powers, .. } => powers.get(1).or(powers.first()),
            _ => None,
        }
    }

    pub fn free_rank(&self) -> Option<u32> {
        match &self.kind {
            Kind::Free { rank } => Some(*rank),
            _ => None,
        }
    }

    pub fn wreath_parts(&self) -> Option<(&GroupHandle<C>, &GroupHandle<C>)> {
        match &self.kind {
            Kind::Wreath { lamp, base } => Some((lamp, base)),
            _ => None,
        }
    }

    pub fn product_parts(&self) -> Option<&[GroupHandle<C>]> {
        match &self.kind {
            Kind::Product(parts) => Some(parts),
            _ => None,
        }
    }

    pub fn symmetric_degree(&self) -> Option<u8> {
        match &self.kind {
            Kind::Symmetric { n } => Some(*n),
            _ => None,
        }
    }

    pub fn is_quaternion(&self) -> bool {
        matches!(self.kind, Kind::Quaternion)
    }

    pub fn is_cyclic(&self) -> Option<u64> {
        match &self.kind {
            Kind::Cyclic { m } => Some(*m),
            _ => None,
        }
    }

    /// Distance of a lattice element from the origin in the word metric of
    /// the standard generators (the ℓ¹ norm). `None` for other groups.
    pub fn lattice_l1(&self, a: &GroupElement<C>) -> Option<u64> {
        match (&self.kind, a) {
            (Kind::Lattice { modulus: None, .. }, GroupElement::Lattice(v)) => {
                v.coords.iter().try_fold(0u64, |acc, c| Some(acc + c.abs().to_u64()?))
            }
            _ => None,
        }
    }

    fn mismatch(&self, a: &GroupElement<C>, detail: impl Into<String>) -> KernelError {
        KernelError::TypeMismatch {
            group: self.name(),
            detail: format!("{} ({})", detail.into(), a.variant_name()),
        }
    }

    fn reduce(&self, modulus: &Option<C>, x: C) -> C {
        match modulus {
            Some(n) => scalar::residue(&x, n),
            None => x,
        }
    }

    fn check_dim(&self, a: &GroupElement<C>, v: &[C], dim: usize) -> Result<(), KernelError> {
        if v.len() != dim {
            return Err(self.mismatch(a, format!("expected dimension {dim}, found {}", v.len())));
        }
        Ok(())
    }

    /// Multiplies `acc` on the right by `rhs` in place.
    pub fn mul_assign(&self, acc: &mut GroupElement<C>, rhs: &GroupElement<C>) -> Result<(), KernelError> {
        match (&self.kind, &mut *acc, rhs) {
            (Kind::Free { .. }, GroupElement::Free(a), GroupElement::Free(b)) => {
                a.mul_assign(b);
            }
            (Kind::Lattice { dim, modulus }, GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                if a.coords.len() != *dim || b.coords.len() != *dim {
                    return Err(self.mismatch(rhs, "lattice dimension"));
                }
                for (x, y) in a.coords.iter_mut().zip(&b.coords) {
                    scalar::add_assign(x, y)?;
                    if let Some(n) = modulus {
                        *x = scalar::residue(x, n);
                    }
                }
            }
            (Kind::Cyclic { m }, GroupElement::Cyclic(a), GroupElement::Cyclic(b)) => {
                if a.modulus() != *m || b.modulus() != *m {
                    return Err(self.mismatch(rhs, "cyclic modulus"));
                }
                *a = CyclicResidue::new(((a.value() + b.value()) % m) as i64, *m);
            }
            (Kind::Semidirect { order, powers, modulus }, GroupElement::Semidirect(a), GroupElement::Semidirect(b)) => {
                let dim = powers[0].rows();
                if a.v.len() != dim || b.v.len() != dim || a.k >= *order || b.k >= *order {
                    return Err(self.mismatch(rhs, "semidirect shape"));
                }
                let moved = powers[a.k as usize].apply(&b.v)?;
                for (x, y) in a.v.iter_mut().zip(&moved) {
                    scalar::add_assign(x, y)?;
                    if let Some(n) = modulus {
                        *x = scalar::residue(x, n);
                    }
                }
                a.k = (a.k + b.k) % order;
            }
            (Kind::Heisenberg { dim, modulus }, GroupElement::Heisenberg(a), GroupElement::Heisenberg(b)) => {
                if a.u.len() != *dim || b.u.len() != *dim || a.v.len() != *dim || b.v.len() != *dim {
                    return Err(self.mismatch(rhs, "Heisenberg dimension"));
                }
                heis_mul_assign(a, b, modulus)?;
            }
            (
                Kind::HeisenbergSemidirect { order, u_action, v_action, modulus },
                GroupElement::HeisenbergSemidirect(a),
                GroupElement::HeisenbergSemidirect(b),
            ) => {
                let dim = u_action[0].rows();
                if a.h.u.len() != dim || b.h.u.len() != dim || a.k >= *order || b.k >= *order {
                    return Err(self.mismatch(rhs, "twisted Heisenberg shape"));
                }
                let moved = twist(&b.h, &u_action[a.k as usize], &v_action[a.k as usize], modulus)?;
                heis_mul_assign(&mut a.h, &moved, modulus)?;
                a.k = (a.k + b.k) % order;
            }
            (Kind::Wreath { lamp, base }, GroupElement::Wreath(a), GroupElement::Wreath(b)) => {
                for (x, h) in &b.lamps {
                    let key = base.multiply(&a.pos, x)?;
                    let merged = match a.lamps.remove(&key) {
                        Some(mut cur) => {
                            lamp.mul_assign(&mut cur, h)?;
                            cur
                        }
                        None => h.clone(),
                    };
                    if !lamp.is_identity(&merged) {
                        a.lamps.insert(key, merged);
                    }
                }
                base.mul_assign(&mut a.pos, &b.pos)?;
            }
            (Kind::Product(parts), GroupElement::Tuple(a), GroupElement::Tuple(b)) => {
                if a.components.len() != parts.len() || b.components.len() != parts.len() {
                    return Err(self.mismatch(rhs, "tuple arity"));
                }
                for ((g, x), y) in parts.iter().zip(a.components.iter_mut()).zip(&b.components) {
                    g.mul_assign(x, y)?;
                }
            }
            (Kind::Symmetric { n }, GroupElement::Perm(a), GroupElement::Perm(b)) => {
                if a.images.len() != *n as usize || b.images.len() != *n as usize {
                    return Err(self.mismatch(rhs, "permutation degree"));
                }
                a.images = b.images.iter().map(|&i| a.images[i as usize]).collect();
            }
            (Kind::Quaternion, GroupElement::Quaternion(a), GroupElement::Quaternion(b)) => {
                *a = quaternion_mul(*a, *b);
            }
            (_, lhs, _) => {
                let lhs_name = lhs.variant_name();
                return Err(KernelError::TypeMismatch {
                    group: self.name(),
                    detail: format!("cannot multiply {lhs_name} by {}", rhs.variant_name()),
                });
            }
        }
        Ok(())
    }

    pub fn multiply(&self, a: &GroupElement<C>, b: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let mut out = a.clone();
        self.mul_assign(&mut out, b)?;
        Ok(out)
    }

    pub fn inverse(&self, a: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let out = match (&self.kind, a) {
            (Kind::Free { .. }, GroupElement::Free(w)) => GroupElement::Free(w.inverse()),
            (Kind::Lattice { dim, modulus }, GroupElement::Lattice(v)) => {
                self.check_dim(a, &v.coords, *dim)?;
                let coords = v
                    .coords
                    .iter()
                    .map(|x| Ok(self.reduce(modulus, scalar::neg(x)?)))
                    .collect::<Result<_, KernelError>>()?;
                GroupElement::Lattice(LatticeVec { coords })
            }
            (Kind::Cyclic { m }, GroupElement::Cyclic(c)) => {
                GroupElement::Cyclic(CyclicResidue::new(((m - c.value()) % m) as i64, *m))
            }
            (Kind::Semidirect { order, powers, modulus }, GroupElement::Semidirect(e)) => {
                self.check_dim(a, &e.v, powers[0].rows())?;
                let k_inv = (order - e.k % order) % order;
                let moved = powers[k_inv as usize].apply(&e.v)?;
                let v = moved
                    .iter()
                    .map(|x| Ok(self.reduce(modulus, scalar::neg(x)?)))
                    .collect::<Result<_, KernelError>>()?;
                GroupElement::Semidirect(SemidirectElem { v, k: k_inv })
            }
            (Kind::Heisenberg { dim, modulus }, GroupElement::Heisenberg(h)) => {
                self.check_dim(a, &h.u, *dim)?;
                GroupElement::Heisenberg(heis_inverse(h, modulus)?)
            }
            (Kind::HeisenbergSemidirect { order, u_action, v_action, modulus }, GroupElement::HeisenbergSemidirect(t)) => {
                self.check_dim(a, &t.h.u, u_action[0].rows())?;
                let k_inv = (order - t.k % order) % order;
                let hinv = heis_inverse(&t.h, modulus)?;
                let h = twist(&hinv, &u_action[k_inv as usize], &v_action[k_inv as usize], modulus)?;
                GroupElement::HeisenbergSemidirect(TwistedHeisenbergElem { h, k: k_inv })
            }
            (Kind::Wreath { lamp, base }, GroupElement::Wreath(w)) => {
                let pos_inv = base.inverse(&w.pos)?;
                let mut lamps = BTreeMap::new();
                for (x, h) in &w.lamps {
                    lamps.insert(base.multiply(&pos_inv, x)?, lamp.inverse(h)?);
                }
                GroupElement::Wreath(WreathElem { lamps, pos: Box::new(pos_inv) })
            }
            (Kind::Product(parts), GroupElement::Tuple(t)) => {
                if t.components.len() != parts.len() {
                    return Err(self.mismatch(a, "tuple arity"));
                }
                let components = parts
                    .iter()
                    .zip(&t.components)
                    .map(|(g, x)| g.inverse(x))
                    .collect::<Result<_, _>>()?;
                GroupElement::Tuple(TupleElem { components })
            }
            (Kind::Symmetric { n }, GroupElement::Perm(p)) => {
                if p.images.len() != *n as usize {
                    return Err(self.mismatch(a, "permutation degree"));
                }
                let mut inv = vec![0u8; p.images.len()];
                for (i, &j) in p.images.iter().enumerate() {
                    inv[j as usize] = i as u8;
                }
                GroupElement::Perm(Permutation { images: inv })
            }
            (Kind::Quaternion, GroupElement::Quaternion(q)) => {
                // Units other than ±1 square to -1, so their inverse flips the sign.
                let unit = q.0 % 4;
                let sign = q.0 / 4;
                let s = if unit == 0 { sign } else { 1 - sign };
                GroupElement::Quaternion(QuaternionUnit(4 * s + unit))
            }
            _ => return Err(self.mismatch(a, "wrong element type")),
        };
        Ok(out)
    }

    /// Brings a structurally well-formed element into canonical form:
    /// free words reduced, residues normalized, identity lamps pruned.
    pub fn canonicalize(&self, a: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let out = match (&self.kind, a) {
            (Kind::Free { .. }, GroupElement::Free(w)) => {
                GroupElement::Free(FreeWord::from_letters(w.letters().iter().copied()))
            }
            (Kind::Lattice { dim, modulus }, GroupElement::Lattice(v)) => {
                self.check_dim(a, &v.coords, *dim)?;
                GroupElement::Lattice(LatticeVec {
                    coords: v.coords.iter().map(|x| self.reduce(modulus, x.clone())).collect(),
                })
            }
            (Kind::Cyclic { m }, GroupElement::Cyclic(c)) => {
                GroupElement::Cyclic(CyclicResidue::new((c.value() % m) as i64, *m))
            }
            (Kind::Semidirect { order, powers, modulus }, GroupElement::Semidirect(e)) => {
                self.check_dim(a, &e.v, powers[0].rows())?;
                GroupElement::Semidirect(SemidirectElem {
                    v: e.v.iter().map(|x| self.reduce(modulus, x.clone())).collect(),
                    k: e.k % order,
                })
            }
            (Kind::Heisenberg { dim, modulus }, GroupElement::Heisenberg(h)) => {
                self.check_dim(a, &h.u, *dim)?;
                self.check_dim(a, &h.v, *dim)?;
                GroupElement::Heisenberg(heis_reduce(h, modulus))
            }
            (Kind::HeisenbergSemidirect { order, u_action, modulus, .. }, GroupElement::HeisenbergSemidirect(t)) => {
                self.check_dim(a, &t.h.u, u_action[0].rows())?;
                self.check_dim(a, &t.h.v, u_action[0].rows())?;
                GroupElement::HeisenbergSemidirect(TwistedHeisenbergElem { h: heis_reduce(&t.h, modulus), k: t.k % order })
            }
            (Kind::Wreath { lamp, base }, GroupElement::Wreath(w)) => {
                let mut lamps: BTreeMap<GroupElement<C>, GroupElement<C>> = BTreeMap::new();
                for (x, h) in &w.lamps {
                    let key = base.canonicalize(x)?;
                    let val = lamp.canonicalize(h)?;
                    let merged = match lamps.remove(&key) {
                        Some(cur) => lamp.multiply(&cur, &val)?,
                        None => val,
                    };
                    if !lamp.is_identity(&merged) {
                        lamps.insert(key, merged);
                    }
                }
                GroupElement::Wreath(WreathElem { lamps, pos: Box::new(base.canonicalize(&w.pos)?) })
            }
            (Kind::Product(parts), GroupElement::Tuple(t)) => {
                if t.components.len() != parts.len() {
                    return Err(self.mismatch(a, "tuple arity"));
                }
                let components = parts
                    .iter()
                    .zip(&t.components)
                    .map(|(g, x)| g.canonicalize(x))
                    .collect::<Result<_, _>>()?;
                GroupElement::Tuple(TupleElem { components })
            }
            (Kind::Symmetric { n }, GroupElement::Perm(p)) => {
                let mut seen = vec![false; *n as usize];
                if p.images.len() != *n as usize
                    || !p.images.iter().all(|&i| (i as usize) < seen.len() && !std::mem::replace(&mut seen[i as usize], true))
                {
                    return Err(self.mismatch(a, "not a permutation"));
                }
                a.clone()
            }
            (Kind::Quaternion, GroupElement::Quaternion(q)) if q.0 < 8 => a.clone(),
            _ => return Err(self.mismatch(a, "wrong element type")),
        };
        Ok(out)
    }

    /// True when `a` is already in the canonical form of this group.
    pub fn contains(&self, a: &GroupElement<C>) -> bool {
        self.canonicalize(a).is_ok_and(|c| c == *a)
    }

    pub fn pow(&self, a: &GroupElement<C>, n: i64) -> Result<GroupElement<C>, KernelError> {
        let mut base = if n < 0 { self.inverse(a)? } else { a.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                self.mul_assign(&mut acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                let sq = base.clone();
                self.mul_assign(&mut base, &sq)?;
            }
        }
        Ok(acc)
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &GroupElement<C>, b: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let mut out = self.multiply(a, b)?;
        self.mul_assign(&mut out, &self.inverse(a)?)?;
        self.mul_assign(&mut out, &self.inverse(b)?)?;
        Ok(out)
    }

    /// `a^b = b a b⁻¹`.
    pub fn conjugate(&self, a: &GroupElement<C>, b: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let mut out = self.multiply(b, a)?;
        self.mul_assign(&mut out, &self.inverse(b)?)?;
        Ok(out)
    }

    /// Smallest `k ≥ 1` with `a^k = 1`, searching up to `limit`.
    pub fn element_order(&self, a: &GroupElement<C>, limit: u64) -> Result<Option<u64>, KernelError> {
        let mut acc = a.clone();
        for k in 1..=limit {
            if self.is_identity(&acc) {
                return Ok(Some(k));
            }
            self.mul_assign(&mut acc, a)?;
        }
        Ok(None)
    }

    /// Builds the lamp configuration `h δ_x` at base position `x`, with the
    /// lamplighter at the identity.
    pub fn lamp_at(&self, x: &GroupElement<C>, h: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let (lamp, base) = self
            .wreath_parts()
            .ok_or_else(|| KernelError::Argument(format!("{} is not a wreath product", self.name())))?;
        let mut lamps = BTreeMap::new();
        let h = lamp.canonicalize(h)?;
        if !lamp.is_identity(&h) {
            lamps.insert(base.canonicalize(x)?, h);
        }
        Ok(GroupElement::Wreath(WreathElem { lamps, pos: Box::new(base.identity()) }))
    }

    /// The wreath element with no lamps and lamplighter at `g`.
    pub fn move_to(&self, g: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let (_, base) = self
            .wreath_parts()
            .ok_or_else(|| KernelError::Argument(format!("{} is not a wreath product", self.name())))?;
        Ok(GroupElement::Wreath(WreathElem { lamps: BTreeMap::new(), pos: Box::new(base.canonicalize(g)?) }))
    }

    /// Embeds a component element into a product, other slots at the identity.
    pub fn embed(&self, slot: usize, x: &GroupElement<C>) -> Result<GroupElement<C>, KernelError> {
        let parts = self
            .product_parts()
            .ok_or_else(|| KernelError::Argument(format!("{} is not a product", self.name())))?;
        let mut components: Vec<_> = parts.iter().map(|p| p.identity()).collect();
        let target = components
            .get_mut(slot)
            .ok_or_else(|| KernelError::Argument(format!("product has no slot {slot}")))?;
        *target = parts[slot].canonicalize(x)?;
        Ok(GroupElement::Tuple(TupleElem { components }))
    }

    /// The `i`-th standard basis vector (1-based) of the lattice part, as a
    /// plain coordinate vector.
    pub fn basis_vector(&self, i: usize, sign: i64) -> Result<Vec<C>, KernelError> {
        let dim = self
            .lattice_dim()
            .ok_or_else(|| KernelError::Argument(format!("{} has no lattice part", self.name())))?;
        if i == 0 || i > dim {
            return Err(KernelError::Argument(format!("basis index {i} outside 1..={dim}")));
        }
        let mut v = vec![C::zero(); dim];
        v[i - 1] = self.reduce(&self.modulus().cloned(), C::of_i64(sign));
        Ok(v)
    }
}

impl<C: Coord> fmt::Display for GroupHandle<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor)
    }
}

fn action_matrix<C: Coord>(kind: &MatrixKind) -> Result<IntMatrix<C>, KernelError> {
    match kind {
        MatrixKind::Companion(m) => matrix::companion_matrix(*m),
        MatrixKind::Cyclotomic(m) => matrix::cyclotomic_action_matrix(*m),
        MatrixKind::Explicit(rows) => IntMatrix::from_i64_rows(rows),
    }
}

fn semidirect_kind<C: Coord>(a: IntMatrix<C>, order: u64, modulus: Option<C>) -> Result<Kind<C>, KernelError> {
    if order == 0 {
        return Err(KernelError::Construction("semidirect product needs m >= 1".into()));
    }
    if !a.is_square() || a.rows() == 0 {
        return Err(KernelError::Construction("action matrix must be square and nonempty".into()));
    }
    let mut powers = Vec::with_capacity(order as usize);
    let mut p = IntMatrix::identity(a.rows());
    for _ in 0..order {
        powers.push(p.clone());
        p = p.mul(&a)?;
    }
    if !p.is_identity() {
        return Err(KernelError::Construction(format!("action matrix {a} does not satisfy A^{order} = I")));
    }
    Ok(Kind::Semidirect { order, powers, modulus })
}

fn identity_of<C: Coord>(kind: &Kind<C>) -> GroupElement<C> {
    match kind {
        Kind::Free { .. } => GroupElement::Free(FreeWord::identity()),
        Kind::Lattice { dim, .. } => GroupElement::Lattice(LatticeVec { coords: vec![C::zero(); *dim] }),
        Kind::Cyclic { m } => GroupElement::Cyclic(CyclicResidue::new(0, *m)),
        Kind::Semidirect { powers, .. } => {
            GroupElement::Semidirect(SemidirectElem { v: vec![C::zero(); powers[0].rows()], k: 0 })
        }
        Kind::Heisenberg { dim, .. } => GroupElement::Heisenberg(heis_identity(*dim)),
        Kind::HeisenbergSemidirect { u_action, .. } => GroupElement::HeisenbergSemidirect(TwistedHeisenbergElem {
            h: heis_identity(u_action[0].rows()),
            k: 0,
        }),
        Kind::Wreath { base, .. } => {
            GroupElement::Wreath(WreathElem { lamps: BTreeMap::new(), pos: Box::new(base.identity()) })
        }
        Kind::Product(parts) => GroupElement::Tuple(TupleElem { components: parts.iter().map(|p| p.identity()).collect() }),
        Kind::Symmetric { n } => GroupElement::Perm(Permutation { images: (0..*n).collect() }),
        Kind::Quaternion => GroupElement::Quaternion(QuaternionUnit(0)),
    }
}

fn heis_identity<C: Coord>(dim: usize) -> HeisenbergElem<C> {
    HeisenbergElem { u: vec![C::zero(); dim], a: C::zero(), v: vec![C::zero(); dim] }
}

fn heis_reduce<C: Coord>(h: &HeisenbergElem<C>, modulus: &Option<C>) -> HeisenbergElem<C> {
    match modulus {
        None => h.clone(),
        Some(n) => HeisenbergElem {
            u: h.u.iter().map(|x| scalar::residue(x, n)).collect(),
            a: scalar::residue(&h.a, n),
            v: h.v.iter().map(|x| scalar::residue(x, n)).collect(),
        },
    }
}

fn dot<C: Coord>(u: &[C], v: &[C]) -> Result<C, KernelError> {
    let mut acc = C::zero();
    for (x, y) in u.iter().zip(v) {
        if !x.is_zero() && !y.is_zero() {
            acc = scalar::add(&acc, &scalar::mul(x, y)?)?;
        }
    }
    Ok(acc)
}

fn heis_mul_assign<C: Coord>(
    a: &mut HeisenbergElem<C>,
    b: &HeisenbergElem<C>,
    modulus: &Option<C>,
) -> Result<(), KernelError> {
    let cross = dot(&a.u, &b.v)?;
    a.a = scalar::add(&scalar::add(&a.a, &b.a)?, &cross)?;
    for (x, y) in a.u.iter_mut().zip(&b.u) {
        scalar::add_assign(x, y)?;
    }
    for (x, y) in a.v.iter_mut().zip(&b.v) {
        scalar::add_assign(x, y)?;
    }
    if let Some(n) = modulus {
        *a = heis_reduce(a, &Some(n.clone()));
    }
    Ok(())
}

/// `(u, a, v)⁻¹ = (-u, -a + uᵀv, -v)`.
fn heis_inverse<C: Coord>(h: &HeisenbergElem<C>, modulus: &Option<C>) -> Result<HeisenbergElem<C>, KernelError> {
    let cross = dot(&h.u, &h.v)?;
    let out = HeisenbergElem {
        u: h.u.iter().map(scalar::neg).collect::<Result<_, _>>()?,
        a: scalar::sub(&cross, &h.a)?,
        v: h.v.iter().map(scalar::neg).collect::<Result<_, _>>()?,
    };
    Ok(heis_reduce(&out, modulus))
}

/// Action of `k ∈ Z/m` on the Heisenberg group: `u ↦ (A^k)ᵀu`, `v ↦ A^{-k}v`.
fn twist<C: Coord>(
    h: &HeisenbergElem<C>,
    u_action: &IntMatrix<C>,
    v_action: &IntMatrix<C>,
    modulus: &Option<C>,
) -> Result<HeisenbergElem<C>, KernelError> {
    let out = HeisenbergElem { u: u_action.apply(&h.u)?, a: h.a.clone(), v: v_action.apply(&h.v)? };
    Ok(heis_reduce(&out, modulus))
}

fn quaternion_mul(a: QuaternionUnit, b: QuaternionUnit) -> QuaternionUnit {
    // UNIT[x][y] = (sign, unit) of e_x e_y for units 1, i, j, k.
    const UNIT: [[(u8, u8); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let (s, u) = UNIT[(a.0 % 4) as usize][(b.0 % 4) as usize];
    let sign = (a.0 / 4 + b.0 / 4 + s) % 2;
    QuaternionUnit(4 * sign + u)
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<GroupHandle<i64>>();
    check::<GroupHandle<num_bigint::BigInt>>();
}
