//! Path geometry: loop intersections and walk intersections in `Z^d`,
//! occupation profiles, balls in Cayley graphs, and sparse linear systems.

mod ball;
mod occupation;
mod sparse;

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use crate::kernel::FreeWord;
use crate::law::LawExpr;
use crate::walk::{stream, Estimate};
use crate::{Error, Result};

pub use ball::{ball_enumerate, product_ball_set, uniform_ball_estimate, Ball, BALL_BUDGET};
pub use occupation::{occupation_profile, OccupationProfile};
pub use sparse::{random_sparse_system, sparse_system_hit_prob, SparseResult, SparseSystem};

/// Increments of a simple random walk on `Z^dim`, each an axis `0..dim`
/// with a sign, or `None` for a lazy step.
pub fn lattice_steps<R: Rng>(dim: usize, steps: u64, lazy: bool, rng: &mut R) -> Vec<Option<(usize, i64)>> {
    let choices = 2 * dim + usize::from(lazy);
    (0..steps)
        .map(|_| {
            let c = rng.random_range(0..choices);
            (c < 2 * dim).then_some((c / 2, if c % 2 == 0 { 1 } else { -1 }))
        })
        .collect()
}

/// A path in `Z^dim`, stored as a flat coordinate buffer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    dim: usize,
    coords: Vec<i64>,
}

impl LatticePath {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, t: usize) -> &[i64] {
        &self.coords[t * self.dim..(t + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Walk from `start` along `steps`.
    pub fn from_steps(start: &[i64], steps: &[Option<(usize, i64)>]) -> Self {
        let dim = start.len();
        let mut coords = Vec::with_capacity((steps.len() + 1) * dim);
        coords.extend_from_slice(start);
        let mut cur = start.to_vec();
        for s in steps {
            if let Some((axis, sign)) = s {
                cur[*axis] += sign;
            }
            coords.extend_from_slice(&cur);
        }
        LatticePath { dim, coords }
    }

    /// The word path of `word` along walks given by their increments: a
    /// letter `x_a` replays walk `a` forwards, `x_a^{-1}` replays it
    /// backwards with negated steps.
    pub fn word_path(dim: usize, word: &FreeWord, walks: &[Vec<Option<(usize, i64)>>]) -> Result<Self> {
        let needed = word.max_generator() as usize;
        if walks.len() < needed {
            return Err(Error::Argument(format!("word needs {needed} walks, got {}", walks.len())));
        }
        let n = walks.first().map_or(0, Vec::len);
        if walks.iter().any(|w| w.len() != n) {
            return Err(Error::Argument("walks must have equal length".into()));
        }
        let mut coords = Vec::with_capacity((word.len() * n + 1) * dim);
        let mut cur = vec![0i64; dim];
        coords.extend_from_slice(&cur);
        for l in word.letters() {
            let walk = &walks[l.generator() as usize - 1];
            if l.is_inverse() {
                for s in walk.iter().rev() {
                    if let Some((axis, sign)) = s {
                        cur[*axis] -= sign;
                    }
                    coords.extend_from_slice(&cur);
                }
            } else {
                for s in walk {
                    if let Some((axis, sign)) = s {
                        cur[*axis] += sign;
                    }
                    coords.extend_from_slice(&cur);
                }
            }
        }
        Ok(LatticePath { dim, coords })
    }
}

/// The distinct points of a lattice path.
#[derive(Clone, Debug)]
pub struct VisitSet<'a> {
    points: HashSet<&'a [i64]>,
}

impl<'a> VisitSet<'a> {
    pub fn new(path: &'a LatticePath) -> Self {
        VisitSet { points: path.points().collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.contains(p)
    }

    /// Whether some point of `other + shift` lies in this set.
    pub fn meets(&self, other: &LatticePath, shift: &[i64]) -> bool {
        let mut buf = vec![0i64; shift.len()];
        other.points().any(|p| {
            for ((b, x), s) in buf.iter_mut().zip(p).zip(shift) {
                *b = x + s;
            }
            self.points.contains(buf.as_slice())
        })
    }

    /// `|self ∩ (other + shift)|`, counting distinct points.
    pub fn intersection_count(&self, other: &VisitSet<'_>, shift: &[i64]) -> usize {
        let mut buf = vec![0i64; shift.len()];
        other
            .points
            .iter()
            .filter(|p| {
                for ((b, x), s) in buf.iter_mut().zip(p.iter()).zip(shift) {
                    *b = x + s;
                }
                self.points.contains(buf.as_slice())
            })
            .count()
    }
}

fn check_offsets(dim: usize, offsets: &[Vec<i64>]) -> Result<()> {
    if let Some(v) = offsets.iter().find(|v| v.len() != dim) {
        return Err(Error::Kernel(crate::KernelError::Dimension { expected: dim, found: v.len() }));
    }
    Ok(())
}

/// Estimates `Pr(γ ∩ (γ' + v) ≠ ∅)` for each offset `v`, where `γ`, `γ'` are
/// the word paths of `w1`, `w2` along independent lazy simple random walks
/// of `steps` steps on `Z^dim`. All offsets are tested on the same sampled
/// paths.
pub fn loop_intersection_prob(
    w1: &LawExpr,
    w2: &LawExpr,
    dim: usize,
    steps: u64,
    offsets: &[Vec<i64>],
    trials: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if trials == 0 || dim == 0 {
        return Err(Error::Argument("trials and dimension must be positive".into()));
    }
    check_offsets(dim, offsets)?;
    let (u1, u2) = (w1.flatten()?, w2.flatten()?);
    let (d1, d2) = (u1.max_generator() as u64, u2.max_generator() as u64);
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<u64>> {
            let walks = |from: u64, count: u64| -> Vec<_> {
                (from..from + count).map(|v| lattice_steps(dim, steps, true, &mut stream(seed, steps, t, v))).collect()
            };
            let g1 = LatticePath::word_path(dim, &u1, &walks(0, d1))?;
            let g2 = LatticePath::word_path(dim, &u2, &walks(d1, d2))?;
            let set = VisitSet::new(&g1);
            Ok(offsets.iter().map(|v| u64::from(set.meets(&g2, v))).collect())
        })
        .try_reduce(|| vec![0; offsets.len()], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
    Ok(hits.into_iter().map(|h| Estimate::new(h, trials, seed)).collect())
}

/// Estimates the probability that two independent simple random walks in
/// `Z^dim`, started at `0` and at `r e_1` and run for `horizon_factor · r²`
/// steps each, share a vertex.
pub fn walk_intersection_prob(dim: usize, r: i64, horizon_factor: u64, trials: u64, seed: u64) -> Result<Estimate> {
    if trials == 0 || dim == 0 || r < 0 {
        return Err(Error::Argument("trials and dimension must be positive, r non-negative".into()));
    }
    let horizon = horizon_factor * (r * r) as u64;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = LatticePath::from_steps(&vec![0; dim], &lattice_steps(dim, horizon, false, &mut stream(seed, horizon, t, 0)));
            let mut start = vec![0; dim];
            start[0] = r;
            let b = LatticePath::from_steps(&start, &lattice_steps(dim, horizon, false, &mut stream(seed, horizon, t, 1)));
            u64::from(VisitSet::new(&a).meets(&b, &vec![0; dim]))
        })
        .sum();
    Ok(Estimate::new(hits, trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{GeneratingSet, GroupElement, GroupHandle};
    use crate::law::parse_law;
    use crate::walk::word_path;

    #[test]
    fn lattice_path_matches_group_word_path() {
        let dim = 3;
        let word = parse_law("[x1, x2^-1] x1^2").unwrap().flatten().unwrap();
        let walks: Vec<_> = (0..2).map(|v| lattice_steps(dim, 25, true, &mut stream(3, 25, 0, v))).collect();
        let fast = LatticePath::word_path(dim, &word, &walks).unwrap();
        let g = GroupHandle::<i64>::parse("lattice(3)").unwrap();
        let traces: Vec<Vec<GroupElement<i64>>> = walks
            .iter()
            .map(|w| LatticePath::from_steps(&[0; 3], w).points().map(|p| GroupElement::lattice(p.to_vec())).collect())
            .collect();
        let slow = word_path(&g, &word, &traces).unwrap();
        let fast_points: Vec<_> = fast.points().map(|p| GroupElement::lattice(p.to_vec())).collect();
        assert_eq!(fast_points, slow.points);
        let _ = GeneratingSet::standard(&g, true).unwrap();
    }

    #[test]
    fn zero_offset_always_meets() {
        let w = parse_law("[x1,x2]").unwrap();
        let est = loop_intersection_prob(&w, &w, 5, 30, &[vec![0; 5]], 50, 1).unwrap();
        assert_eq!(est[0].successes, 50);
        assert!(loop_intersection_prob(&w, &w, 5, 30, &[vec![0; 4]], 50, 1).is_err());
    }

    #[test]
    fn intersection_count_is_symmetric() {
        let dim = 2;
        let a = LatticePath::from_steps(&[0, 0], &lattice_steps(dim, 200, true, &mut stream(8, 0, 0, 0)));
        let b = LatticePath::from_steps(&[0, 0], &lattice_steps(dim, 200, true, &mut stream(8, 0, 0, 1)));
        let (sa, sb) = (VisitSet::new(&a), VisitSet::new(&b));
        for v in [[0i64, 0], [3, -1], [-5, 2]] {
            let back = [-v[0], -v[1]];
            assert_eq!(sa.intersection_count(&sb, &v), sb.intersection_count(&sa, &back));
            assert_eq!(sa.meets(&b, &v), sa.intersection_count(&sb, &v) > 0);
        }
    }
}
