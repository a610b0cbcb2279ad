use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use crate::exact::FiniteGroupTable;
use crate::kernel::{GeneratingSet, GroupElement, GroupHandle};
use crate::law::{evaluate_word, LawExpr};
use crate::scalar::Coord;
use crate::walk::{stream, Estimate};
use crate::{Error, Result};

/// Default cap on the number of elements a ball may hold.
pub const BALL_BUDGET: usize = 2_000_000;

/// The ball `B_S(1, r)`, in breadth-first order.
#[derive(Clone, Debug)]
pub struct Ball<C: Coord> {
    radius: u32,
    elements: Vec<GroupElement<C>>,
    distances: Vec<u32>,
    index: HashMap<GroupElement<C>, usize>,
}

impl<C: Coord> Ball<C> {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement<C>] {
        &self.elements
    }

    /// Word length of `x`, if it lies in the ball.
    pub fn distance(&self, x: &GroupElement<C>) -> Option<u32> {
        self.index.get(x).map(|&i| self.distances[i])
    }

    /// `|B(1, r)|` for `r = 0..=radius`.
    pub fn growth(&self) -> Vec<usize> {
        (0..=self.radius).map(|r| self.distances.partition_point(|&d| d <= r)).collect()
    }
}

/// Breadth-first enumeration of the ball of radius `radius` in the Cayley
/// graph of `set`. Fails once more than `budget` elements are found.
pub fn ball_enumerate<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    radius: u32,
    budget: usize,
) -> Result<Ball<C>> {
    let id = group.identity();
    let mut elements = vec![id.clone()];
    let mut distances = vec![0];
    let mut index = HashMap::from([(id, 0)]);
    let mut frontier = 0..1;
    for r in 1..=radius {
        let start = elements.len();
        for i in frontier.clone() {
            for s in set.atoms() {
                let y = group.multiply(&elements[i], s)?;
                if !index.contains_key(&y) {
                    if elements.len() >= budget {
                        return Err(Error::Budget {
                            what: format!("ball of radius {radius} in {}", group.name()),
                            needed: elements.len() as u128 + 1,
                            budget: budget as u128,
                        });
                    }
                    index.insert(y.clone(), elements.len());
                    elements.push(y);
                    distances.push(r);
                }
            }
        }
        frontier = start..elements.len();
    }
    Ok(Ball { radius, elements, distances, index })
}

/// `T = (S × {1}) ∪ ({1} × H)` on a product `G × H` with `H` finite,
/// where `S` generates `G`.
pub fn product_ball_set<C: Coord>(group: &GroupHandle<C>, s: &GeneratingSet<C>) -> Result<GeneratingSet<C>> {
    let parts = match group.product_parts() {
        Some(p) if p.len() == 2 => p,
        _ => return Err(Error::Argument(format!("{group} is not a product of two groups"))),
    };
    let h = FiniteGroupTable::enumerate(&parts[1])?;
    let mut atoms = Vec::with_capacity(s.len() + h.order());
    for a in s.atoms() {
        atoms.push(group.embed(0, a)?);
    }
    for x in h.elements() {
        atoms.push(group.embed(1, x)?);
    }
    Ok(GeneratingSet::new(group, atoms, false)?)
}

/// Estimates the probability that `law` holds on independent uniform
/// samples from `B_S(1, radius)`.
pub fn uniform_ball_estimate<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    radius: u32,
    law: &LawExpr,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    ball_enumerate(group, set, radius, BALL_BUDGET)?.estimate(group, law, trials, seed)
}

impl<C: Coord> Ball<C> {
    /// Estimates the probability that `law` holds on independent uniform
    /// samples from this ball.
    pub fn estimate(&self, group: &GroupHandle<C>, law: &LawExpr, trials: u64, seed: u64) -> Result<Estimate> {
        if trials == 0 {
            return Err(Error::Argument("trials must be positive".into()));
        }
        let word = law.flatten()?;
        let d = law.num_vars() as u64;
        let successes = (0..trials)
            .into_par_iter()
            .map(|t| -> Result<u64> {
                let xs: Vec<_> = (0..d)
                    .map(|v| self.elements[stream(seed, u64::from(self.radius), t, v).random_range(0..self.len())].clone())
                    .collect();
                Ok(u64::from(group.is_identity(&evaluate_word(&word, group, &xs)?)))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(Estimate::new(successes, trials, seed))
    }
}
