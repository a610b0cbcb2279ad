use std::collections::HashSet;

use crate::kernel::element::{Permutation, QuaternionUnit};
use crate::kernel::{CyclicResidue, FreeWord, GroupElement, GroupHandle, KernelError};
use crate::scalar::Coord;

/// A finite symmetric set of atoms; walks step uniformly over `atoms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet<C: Coord> {
    atoms: Vec<GroupElement<C>>,
    contains_identity: bool,
}

impl<C: Coord> GeneratingSet<C> {
    /// Canonicalizes and deduplicates `atoms` (first occurrence wins), checks
    /// symmetry, and appends the identity when `lazy` is set and it is missing.
    pub fn new(group: &GroupHandle<C>, atoms: Vec<GroupElement<C>>, lazy: bool) -> Result<Self, KernelError> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(atoms.len() + 1);
        for a in atoms {
            let c = group.canonicalize(&a)?;
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
        if lazy && !seen.contains(&group.identity()) {
            seen.insert(group.identity());
            out.push(group.identity());
        }
        if out.is_empty() {
            return Err(KernelError::Argument("empty generating set".into()));
        }
        for a in &out {
            let inv = group.inverse(a)?;
            if !seen.contains(&inv) {
                return Err(KernelError::Argument(format!("generating set is not symmetric: missing inverse of {a}")));
            }
        }
        let contains_identity = seen.contains(&group.identity());
        Ok(GeneratingSet { atoms: out, contains_identity })
    }

    /// Adds inverses of all atoms before validating.
    pub fn symmetrized(group: &GroupHandle<C>, atoms: Vec<GroupElement<C>>, lazy: bool) -> Result<Self, KernelError> {
        let mut all = Vec::with_capacity(2 * atoms.len());
        for a in atoms {
            let inv = group.inverse(&a)?;
            all.push(a);
            all.push(inv);
        }
        Self::new(group, all, lazy)
    }

    pub fn atoms(&self) -> &[GroupElement<C>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// The standard generators of each construction:
    ///
    /// * free group: `x_i^{±1}`;
    /// * lattices and their quotients: `±e_i`;
    /// * cyclic: `±1`;
    /// * semidirect products: `(±e_i, 0)` and `(0, ±1)`;
    /// * Heisenberg: `(±e_i, 0, 0)` and `(0, 0, ±e_i)`, plus `(0, ±1)` when twisted;
    /// * wreath products: the lamp generators at the origin and the base moves;
    /// * products: the generators of each factor in its own slot;
    /// * symmetric groups: all transpositions; quaternions: `±i, ±j`.
    pub fn standard(group: &GroupHandle<C>, lazy: bool) -> Result<Self, KernelError> {
        Self::new(group, standard_atoms(group)?, lazy)
    }

    /// Switch-move-switch atoms `s₁ m s₂` of a wreath product, with
    /// `s₁, s₂` ranging over the identity and the lamp generators at the
    /// origin and `m` over the base generators.
    pub fn switch_move_switch(group: &GroupHandle<C>, lazy: bool) -> Result<Self, KernelError> {
        let (lamp, base) = group
            .wreath_parts()
            .ok_or_else(|| KernelError::Argument(format!("{group} is not a wreath product")))?;
        let origin = base.identity();
        let mut switches = vec![group.identity()];
        for h in standard_atoms(lamp)? {
            if !lamp.is_identity(&h) {
                switches.push(group.lamp_at(&origin, &h)?);
            }
        }
        let mut atoms = Vec::new();
        for m in standard_atoms(base)? {
            if base.is_identity(&m) {
                continue;
            }
            let mv = group.move_to(&m)?;
            for s1 in &switches {
                for s2 in &switches {
                    let mut x = group.multiply(s1, &mv)?;
                    group.mul_assign(&mut x, s2)?;
                    atoms.push(x);
                }
            }
        }
        Self::new(group, atoms, lazy)
    }

    /// The 160-atom set `{s₁ m s₂ : s₁, s₂ ∈ {a^{±1}δ₀, b^{±1}δ_{k e₁}}, m ∈ {±e_i}}`
    /// on `H ≀ Z⁵`, where `a, b` are the first two standard lamp generators.
    pub fn shifted_wreath_generators(group: &GroupHandle<C>, k: u64) -> Result<Self, KernelError> {
        let (lamp, base) = group
            .wreath_parts()
            .ok_or_else(|| KernelError::Argument(format!("{group} is not a wreath product")))?;
        if base.lattice_dim() != Some(5) || base.modulus().is_some() {
            return Err(KernelError::Argument(format!("base group must be Z^5, got {base}")));
        }
        let (a, b) = lamp_pair(lamp)?;
        let origin = base.identity();
        let mut shift = vec![0i64; 5];
        shift[0] = i64::try_from(k).map_err(|_| KernelError::Argument(format!("offset {k} too large")))?;
        let shifted = GroupElement::lattice_i64(&shift);
        let switches = [
            group.lamp_at(&origin, &a)?,
            group.lamp_at(&origin, &lamp.inverse(&a)?)?,
            group.lamp_at(&shifted, &b)?,
            group.lamp_at(&shifted, &lamp.inverse(&b)?)?,
        ];
        let mut atoms = Vec::with_capacity(160);
        for i in 1..=5 {
            for sign in [1, -1] {
                let mv = group.move_to(&GroupElement::lattice(base.basis_vector(i, sign)?))?;
                for s1 in &switches {
                    for s2 in &switches {
                        let mut x = group.multiply(s1, &mv)?;
                        group.mul_assign(&mut x, s2)?;
                        atoms.push(x);
                    }
                }
            }
        }
        Self::new(group, atoms, false)
    }

    /// Atoms `(±e_i, k)` and `(0, k)` for every `k ∈ Z/m` of a semidirect
    /// product `Z^d ⋊ Z/m`, together with their inverses.
    pub fn rotations(group: &GroupHandle<C>) -> Result<Self, KernelError> {
        let (Some(order), Some(dim), GroupElement::Semidirect(_)) = (group.top_order(), group.lattice_dim(), group.identity())
        else {
            return Err(KernelError::Argument(format!("{group} is not a semidirect product")));
        };
        let mut atoms = Vec::new();
        for k in 0..order {
            atoms.push(GroupElement::semidirect(vec![C::zero(); dim], k));
            for i in 1..=dim {
                for sign in [1, -1] {
                    atoms.push(GroupElement::semidirect(group.basis_vector(i, sign)?, k));
                }
            }
        }
        Self::symmetrized(group, atoms, false)
    }

    /// All products of `r` atoms (`S^r`).
    pub fn power(&self, group: &GroupHandle<C>, r: u32) -> Result<Self, KernelError> {
        let mut cur = vec![group.identity()];
        for _ in 0..r {
            let mut next = Vec::with_capacity(cur.len() * self.atoms.len());
            let mut seen = HashSet::new();
            for x in &cur {
                for s in &self.atoms {
                    let y = group.multiply(x, s)?;
                    if seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            cur = next;
        }
        Self::new(group, cur, false)
    }

    /// Generating set of a product `G₁ × G₂ × ...` given one set per
    /// factor: each factor's atoms embedded in its own slot.
    pub fn product(group: &GroupHandle<C>, parts: &[GeneratingSet<C>]) -> Result<Self, KernelError> {
        let arity = group.product_parts().map_or(0, |p| p.len());
        if arity != parts.len() {
            return Err(KernelError::Argument(format!(
                "product of arity {arity} needs {arity} generating sets, got {}",
                parts.len()
            )));
        }
        let mut atoms = Vec::new();
        for (slot, set) in parts.iter().enumerate() {
            for a in &set.atoms {
                atoms.push(group.embed(slot, a)?);
            }
        }
        Self::new(group, atoms, false)
    }
}

fn lamp_pair<C: Coord>(lamp: &GroupHandle<C>) -> Result<(GroupElement<C>, GroupElement<C>), KernelError> {
    let gens: Vec<_> = standard_atoms(lamp)?.into_iter().filter(|x| !lamp.is_identity(x)).collect();
    // Standard atoms come in generator/inverse pairs; take the first two generators.
    let mut picked: Vec<GroupElement<C>> = Vec::new();
    for g in gens {
        let inv = lamp.inverse(&g)?;
        if !picked.iter().any(|p| *p == g || *p == inv) {
            picked.push(g);
        }
    }
    if picked.len() != 2 {
        return Err(KernelError::Argument(format!(
            "lamp group {lamp} must have exactly two designated generators, found {}",
            picked.len()
        )));
    }
    let b = picked.pop().expect("two elements");
    let a = picked.pop().expect("two elements");
    Ok((a, b))
}

fn standard_atoms<C: Coord>(group: &GroupHandle<C>) -> Result<Vec<GroupElement<C>>, KernelError> {
    let mut atoms = Vec::new();
    if let Some(rank) = group.free_rank() {
        for i in 1..=rank {
            atoms.push(GroupElement::Free(FreeWord::generator(i)));
            atoms.push(GroupElement::Free(FreeWord::generator(i).inverse()));
        }
    } else if let Some(m) = group.is_cyclic() {
        atoms.push(GroupElement::Cyclic(CyclicResidue::new(1, m)));
        atoms.push(GroupElement::Cyclic(CyclicResidue::new(-1, m)));
    } else if let Some((lamp, base)) = group.wreath_parts() {
        let origin = base.identity();
        for h in standard_atoms(lamp)? {
            atoms.push(group.lamp_at(&origin, &h)?);
        }
        for m in standard_atoms(base)? {
            atoms.push(group.move_to(&m)?);
        }
    } else if let Some(parts) = group.product_parts() {
        for (slot, p) in parts.iter().enumerate() {
            for a in standard_atoms(p)? {
                atoms.push(group.embed(slot, &a)?);
            }
        }
    } else if let Some(n) = group.symmetric_degree() {
        for i in 0..n {
            for j in i + 1..n {
                let mut images: Vec<u8> = (0..n).collect();
                images.swap(i as usize, j as usize);
                atoms.push(GroupElement::Perm(Permutation { images }));
            }
        }
    } else if group.is_quaternion() {
        for q in [1u8, 5, 2, 6] {
            atoms.push(GroupElement::Quaternion(QuaternionUnit(q)));
        }
    } else if let Some(dim) = group.lattice_dim() {
        let identity = group.identity();
        for i in 1..=dim {
            for sign in [1, -1] {
                let e = group.basis_vector(i, sign)?;
                let atom = match &identity {
                    GroupElement::Lattice(_) => GroupElement::lattice(e),
                    GroupElement::Semidirect(_) => GroupElement::semidirect(e, 0),
                    GroupElement::Heisenberg(h) => {
                        atoms.push(GroupElement::heisenberg(h.u.clone(), h.a.clone(), e.clone()));
                        GroupElement::heisenberg(e, h.a.clone(), h.v.clone())
                    }
                    GroupElement::HeisenbergSemidirect(t) => {
                        let h = &t.h;
                        atoms.push(GroupElement::HeisenbergSemidirect(crate::kernel::TwistedHeisenbergElem {
                            h: crate::kernel::HeisenbergElem { u: h.u.clone(), a: h.a.clone(), v: e.clone() },
                            k: 0,
                        }));
                        GroupElement::HeisenbergSemidirect(crate::kernel::TwistedHeisenbergElem {
                            h: crate::kernel::HeisenbergElem { u: e, a: h.a.clone(), v: h.v.clone() },
                            k: 0,
                        })
                    }
                    other => return Err(KernelError::Argument(format!("no standard generators for {}", other.variant_name()))),
                };
                atoms.push(atom);
            }
        }
        if let Some(m) = group.top_order() {
            for step in [1, m - 1] {
                let atom = match &identity {
                    GroupElement::Semidirect(s) => GroupElement::semidirect(s.v.clone(), step % m),
                    GroupElement::HeisenbergSemidirect(t) => {
                        GroupElement::HeisenbergSemidirect(crate::kernel::TwistedHeisenbergElem { h: t.h.clone(), k: step % m })
                    }
                    _ => unreachable!("top order only exists for semidirect constructions"),
                };
                atoms.push(atom);
            }
        }
    } else {
        return Err(KernelError::Argument(format!("no standard generators for {group}")));
    }
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = GroupHandle<i64>;

    #[test]
    fn rotation_atoms_are_closed_under_inverse() {
        let g = G::parse("cyclotomic-semidirect(5)").unwrap();
        let s = GeneratingSet::rotations(&g).unwrap();
        // 5 tops times (1 + 2·4) lattice parts, before adding inverses.
        assert!(s.len() >= 45);
        for a in s.atoms() {
            assert!(s.atoms().contains(&g.inverse(a).unwrap()));
        }
        assert!(GeneratingSet::rotations(&G::parse("lattice(2)").unwrap()).is_err());
    }

    #[test]
    fn standard_sets_are_symmetric() {
        for text in [
            "free(2)",
            "lattice(5)",
            "dihedral-infinite",
            "heisenberg-semidirect(2)",
            "wreath(cyclic(2),dihedral-infinite)",
            "sym(4)",
            "quaternion",
            "dihedral(4)",
            "product(wreath(cyclic(2),lattice(1)),sym(4))",
        ] {
            let g = G::parse(text).unwrap();
            let s = GeneratingSet::standard(&g, true).unwrap();
            assert!(s.contains_identity());
            for a in s.atoms() {
                assert!(s.atoms().contains(&g.inverse(a).unwrap()), "{text}");
            }
        }
    }

    #[test]
    fn lazy_dihedral_set() {
        let g = G::parse("dihedral-infinite").unwrap();
        let s = GeneratingSet::standard(&g, true).unwrap();
        let expected = [
            GroupElement::semidirect(vec![1], 0),
            GroupElement::semidirect(vec![-1], 0),
            GroupElement::semidirect(vec![0], 1),
            GroupElement::semidirect(vec![0], 0),
        ];
        assert_eq!(s.atoms(), &expected);
    }

    #[test]
    fn asymmetric_set_is_rejected() {
        let g = G::parse("lattice(1)").unwrap();
        assert!(GeneratingSet::new(&g, vec![GroupElement::lattice_i64(&[1])], false).is_err());
        assert!(GeneratingSet::new(&g, vec![], false).is_err());
    }

    #[test]
    fn shifted_wreath_set_has_160_atoms() {
        let g = G::parse("wreath(free(2),lattice(5))").unwrap();
        for k in [0, 1, 50] {
            let s = GeneratingSet::shifted_wreath_generators(&g, k).unwrap();
            assert_eq!(s.len(), 160);
            assert!(!s.contains_identity());
        }
        assert!(GeneratingSet::shifted_wreath_generators(&G::parse("wreath(free(2),lattice(4))").unwrap(), 0).is_err());
        assert!(GeneratingSet::shifted_wreath_generators(&G::parse("wreath(free(3),lattice(5))").unwrap(), 0).is_err());
    }

    #[test]
    fn switch_move_switch_on_lamplighter() {
        let g = G::parse("wreath(cyclic(2),lattice(1))").unwrap();
        let s = GeneratingSet::switch_move_switch(&g, false).unwrap();
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn square_of_lattice_set() {
        let g = G::parse("lattice(1)").unwrap();
        let s = GeneratingSet::standard(&g, true).unwrap();
        assert_eq!(s.power(&g, 2).unwrap().len(), 5);
    }
}
