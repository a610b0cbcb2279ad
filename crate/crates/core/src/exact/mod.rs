//! Exact law probabilities on finite groups.
//!
//! A finite group is enumerated once into a [`FiniteGroupTable`] (elements
//! indexed `0..n`, with multiplication and inverse tables). Words are then
//! compiled into a [`Program`] that evaluates on element indices.

mod program;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::{GeneratingSet, GroupDescriptor, GroupElement, GroupHandle};
use crate::law::LawExpr;
use crate::scalar::Coord;
use crate::{Error, Result};

pub use program::Program;

/// Largest number of word evaluations a tuple enumeration may perform.
pub const TUPLE_BUDGET: u128 = 100_000_000;
/// Largest group that is tabulated.
pub const ELEMENT_BUDGET: usize = 4096;

/// A finite group with its Cayley table.
#[derive(Clone, Debug)]
pub struct FiniteGroupTable<C: Coord> {
    name: String,
    elements: Vec<GroupElement<C>>,
    index: HashMap<GroupElement<C>, u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

impl<C: Coord> FiniteGroupTable<C> {
    pub fn from_descriptor(descriptor: &GroupDescriptor) -> Result<Self> {
        Self::enumerate(&GroupHandle::build(descriptor)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::enumerate(&GroupHandle::parse(text)?)
    }

    /// Breadth-first closure of the standard generators.
    pub fn enumerate(group: &GroupHandle<C>) -> Result<Self> {
        let order = group
            .order()
            .ok_or_else(|| Error::Argument(format!("{group} is not a finite group")))?;
        if order > ELEMENT_BUDGET as u64 {
            return Err(Error::Budget { what: format!("tabulating {group}"), needed: order as u128, budget: ELEMENT_BUDGET as u128 });
        }
        let gens = GeneratingSet::standard(group, false)?;
        let mut elements = vec![group.identity()];
        let mut index = HashMap::from([(group.identity(), 0u32)]);
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head].clone();
            head += 1;
            for s in gens.atoms() {
                let y = group.multiply(&x, s)?;
                if !index.contains_key(&y) {
                    if elements.len() >= ELEMENT_BUDGET {
                        return Err(Error::Budget {
                            what: format!("tabulating {group}"),
                            needed: elements.len() as u128 + 1,
                            budget: ELEMENT_BUDGET as u128,
                        });
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    elements.push(y);
                }
            }
        }
        if elements.len() as u64 != order {
            return Err(Error::Argument(format!(
                "{group}: closure has {} elements, expected {order}",
                elements.len()
            )));
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                mul[i * n + j] = index[&group.multiply(x, y)?];
            }
        }
        let inv = (0..n)
            .map(|i| (0..n as u32).find(|&j| mul[i * n + j as usize] == 0).expect("every element has an inverse"))
            .collect();
        Ok(FiniteGroupTable { name: group.name(), elements, index, mul, inv })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub const IDENTITY: u32 = 0;

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.elements.len() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u32, n: i64) -> u32 {
        let base = if n < 0 { self.inv(a) } else { a };
        (0..n.unsigned_abs()).fold(Self::IDENTITY, |acc, _| self.mul(acc, base))
    }

    pub fn element(&self, i: u32) -> &GroupElement<C> {
        &self.elements[i as usize]
    }

    pub fn elements(&self) -> &[GroupElement<C>] {
        &self.elements
    }

    pub fn index_of(&self, e: &GroupElement<C>) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != Self::IDENTITY {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order() as u32).map(|a| self.element_order(a)).fold(1, num_integer::lcm)
    }

    pub fn centralizer_size(&self, a: u32) -> usize {
        (0..self.order() as u32).filter(|&b| self.mul(a, b) == self.mul(b, a)).count()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order() as u32).all(|a| self.centralizer_size(a) == self.order())
    }

    /// Checks `(ab)c = a(bc)` on `samples` seeded random triples.
    pub fn spot_check_associativity(&self, samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.order() as u32;
        (0..samples).all(|_| {
            let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
        })
    }
}

/// A reduced fraction in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProbability(BigRational);

impl ExactProbability {
    pub fn new(num: u128, den: u128) -> Self {
        ExactProbability(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn product(&self, other: &ExactProbability) -> ExactProbability {
        ExactProbability(&self.0 * &other.0)
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn is_plain_commutator(law: &LawExpr) -> bool {
    matches!(law, LawExpr::Comm(a, b) if **a == LawExpr::Var(1) && **b == LawExpr::Var(2))
}

/// Exact probability that `law` holds on a uniformly random tuple.
///
/// `[x1, x2]` uses the centralizer sum `Σ_g |C(g)| / |G|²`; other laws
/// enumerate all `|G|^d` tuples within [`TUPLE_BUDGET`].
pub fn exact_law_probability<C: Coord>(table: &FiniteGroupTable<C>, law: &LawExpr) -> Result<ExactProbability> {
    law.flatten()?;
    let n = table.order() as u128;
    if is_plain_commutator(law) {
        let sum: usize = (0..n as u32).into_par_iter().map(|a| table.centralizer_size(a)).sum();
        return Ok(ExactProbability::new(sum as u128, n * n));
    }
    let d = law.num_vars();
    let needed = n.checked_pow(d).unwrap_or(u128::MAX);
    if needed > TUPLE_BUDGET {
        return Err(Error::Budget { what: format!("enumerating {d}-tuples of {}", table.name()), needed, budget: TUPLE_BUDGET });
    }
    let program = Program::compile(std::slice::from_ref(law));
    let count = count_tuples(table, d as usize, |xs, slots| program.holds(table, xs, slots, 0));
    Ok(ExactProbability::new(count as u128, needed))
}

/// Counts `d`-tuples satisfying `pred`, splitting the first coordinate
/// across threads.
pub(crate) fn count_tuples<C: Coord>(
    table: &FiniteGroupTable<C>,
    d: usize,
    pred: impl Fn(&[u32], &mut Vec<u32>) -> bool + Sync,
) -> u64 {
    let n = table.order() as u32;
    if d == 0 {
        return u64::from(pred(&[], &mut Vec::new()));
    }
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut xs = vec![0u32; d];
            xs[0] = first;
            let mut slots = Vec::new();
            let mut count = 0u64;
            loop {
                if pred(&xs, &mut slots) {
                    count += 1;
                }
                let mut k = d - 1;
                loop {
                    if k == 0 {
                        return count;
                    }
                    xs[k] += 1;
                    if xs[k] < n {
                        break;
                    }
                    xs[k] = 0;
                    k -= 1;
                }
            }
        })
        .sum()
}

/// The first `d`-tuple in lexicographic order satisfying `pred`.
pub(crate) fn count_tuples_first<C: Coord>(
    table: &FiniteGroupTable<C>,
    d: usize,
    pred: impl Fn(&[u32], &mut Vec<u32>) -> bool + Sync,
) -> Option<Vec<u32>> {
    let n = table.order() as u32;
    if d == 0 {
        return pred(&[], &mut Vec::new()).then(Vec::new);
    }
    (0..n).into_par_iter().find_map_first(|first| {
        let mut xs = vec![0u32; d];
        xs[0] = first;
        let mut slots = Vec::new();
        loop {
            if pred(&xs, &mut slots) {
                return Some(xs);
            }
            let mut k = d - 1;
            loop {
                if k == 0 {
                    return None;
                }
                xs[k] += 1;
                if xs[k] < n {
                    break;
                }
                xs[k] = 0;
                k -= 1;
            }
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyPoint {
    pub group: String,
    pub order: usize,
    pub probability: ExactProbability,
    pub running_inf: ExactProbability,
}

/// Exact probabilities along a family of finite groups, with the running
/// infimum. Stops after `limit` members.
pub fn quotient_family_infimum<I>(family: I, law: &LawExpr, limit: usize) -> Result<Vec<FamilyPoint>>
where
    I: IntoIterator<Item = GroupDescriptor>,
{
    let mut out: Vec<FamilyPoint> = Vec::new();
    for d in family.into_iter().take(limit) {
        let table = FiniteGroupTable::<i64>::from_descriptor(&d)?;
        let p = exact_law_probability(&table, law)?;
        let running_inf = match out.last() {
            Some(prev) if prev.running_inf < p => prev.running_inf.clone(),
            _ => p.clone(),
        };
        out.push(FamilyPoint { group: d.to_string(), order: table.order(), probability: p, running_inf });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::parse_law;

    type T = FiniteGroupTable<i64>;

    /// Commuting pairs counted directly on elements, without the tables.
    fn commuting_pairs_oracle(text: &str) -> (usize, usize) {
        let g = GroupHandle::<i64>::parse(text).unwrap();
        let t = T::enumerate(&g).unwrap();
        let els = t.elements();
        let mut count = 0;
        for a in els {
            for b in els {
                if g.multiply(a, b).unwrap() == g.multiply(b, a).unwrap() {
                    count += 1;
                }
            }
        }
        (count, els.len() * els.len())
    }

    #[test]
    fn enumerates_known_orders() {
        assert_eq!(T::parse("dihedral(4)").unwrap().order(), 8);
        assert_eq!(T::parse("sym(4)").unwrap().order(), 24);
        let e = T::parse("extraspecial3").unwrap();
        assert_eq!(e.order(), 27);
        assert_eq!(e.exponent(), 3);
        assert!(!e.is_abelian());
        assert_eq!(T::parse("quaternion").unwrap().order(), 8);
        assert_eq!(T::parse("product(cyclic(3),sym(3))").unwrap().order(), 18);
        assert_eq!(T::parse("quotient(dihedral-infinite,5)").unwrap().order(), 10);
        assert!(T::parse("lattice(2)").is_err());
    }

    #[test]
    fn tables_are_associative() {
        for text in ["sym(4)", "extraspecial3", "quaternion", "dihedral(6)"] {
            assert!(T::parse(text).unwrap().spot_check_associativity(1000, 5));
        }
    }

    #[test]
    fn commuting_probabilities() {
        let comm = parse_law("[x1,x2]").unwrap();
        let s3 = exact_law_probability(&T::parse("sym(3)").unwrap(), &comm).unwrap();
        let (c, n) = commuting_pairs_oracle("sym(3)");
        assert_eq!(s3, ExactProbability::new(c as u128, n as u128));
        assert_eq!(s3, ExactProbability::new(1, 2));
        let q8 = exact_law_probability(&T::parse("quaternion").unwrap(), &comm).unwrap();
        let (c, n) = commuting_pairs_oracle("quaternion");
        assert_eq!(q8, ExactProbability::new(c as u128, n as u128));
        assert_eq!(q8.to_string(), "5/8");
    }

    #[test]
    fn shortcut_matches_enumeration() {
        let t = T::parse("sym(4)").unwrap();
        let shortcut = exact_law_probability(&t, &parse_law("[x1,x2]").unwrap()).unwrap();
        let enumerated = exact_law_probability(&t, &parse_law("x1 x2 x1^-1 x2^-1").unwrap()).unwrap();
        assert_eq!(shortcut, enumerated);
    }

    #[test]
    fn dihedral_involutions() {
        let p = exact_law_probability(&T::parse("dihedral(4)").unwrap(), &parse_law("x1^2").unwrap()).unwrap();
        assert_eq!(p, ExactProbability::new(3, 4));
    }

    #[test]
    fn budget_is_enforced() {
        let t = T::parse("sym(6)").unwrap();
        let law = parse_law("[x1,x2,x3]").unwrap();
        assert!(matches!(exact_law_probability(&t, &law), Err(Error::Budget { .. })));
    }

    #[test]
    fn odd_dihedral_family() {
        let family = (1..=49).filter(|m| m % 2 == 1).map(GroupDescriptor::Dihedral);
        let pts = quotient_family_infimum(family, &parse_law("x1^2").unwrap(), 100).unwrap();
        for (pt, m) in pts.iter().zip((1u128..=49).step_by(2)) {
            assert_eq!(pt.probability, ExactProbability::new(m + 1, 2 * m));
        }
        assert_eq!(pts.last().unwrap().running_inf, ExactProbability::new(25, 49));
    }
}
