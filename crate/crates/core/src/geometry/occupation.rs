use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{ball_enumerate, lattice_steps, LatticePath, BALL_BUDGET};
use crate::kernel::{GeneratingSet, GroupHandle};
use crate::law::LawExpr;
use crate::scalar::Coord;
use crate::walk::{run_walk, stream, word_path};
use crate::{Error, Result};

/// Mean occupation `E|γ ∩ B(1, r)|` of a word path, per radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OccupationProfile {
    pub radii: Vec<u32>,
    pub mean_counts: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: u64,
    /// Whether distinct vertices were counted instead of time points.
    pub distinct: bool,
}

impl OccupationProfile {
    /// Log-log slope of the means against the radii.
    pub fn slope(&self) -> Option<f64> {
        let xs: Vec<f64> = self.radii.iter().map(|&r| f64::from(r)).collect();
        crate::walk::loglog_slope(&xs, &self.mean_counts)
    }
}

fn is_standard_lattice<C: Coord>(group: &GroupHandle<C>, set: &GeneratingSet<C>) -> Result<bool> {
    if group.lattice_l1(&group.identity()).is_none() {
        return Ok(false);
    }
    let std: HashSet<_> = GeneratingSet::standard(group, true)?.atoms().iter().cloned().collect();
    let mine: HashSet<_> = set.atoms().iter().cloned().chain([group.identity()]).collect();
    Ok(std == mine)
}

/// Counts, for each radius, the points of the word path of `expr` lying in
/// the ball of that radius about the identity. Time points are counted
/// unless `distinct` is set. Lattices with their standard generators use
/// the ℓ¹ norm; other groups use breadth-first distances.
#[allow(clippy::too_many_arguments)]
pub fn occupation_profile<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    expr: &LawExpr,
    steps: u64,
    radii: &[u32],
    trials: u64,
    seed: u64,
    distinct: bool,
) -> Result<OccupationProfile> {
    let fast = is_standard_lattice(group, set)?;
    profile(group, set, expr, steps, radii, trials, seed, distinct, fast)
}

#[allow(clippy::too_many_arguments)]
fn profile<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    expr: &LawExpr,
    steps: u64,
    radii: &[u32],
    trials: u64,
    seed: u64,
    distinct: bool,
    fast: bool,
) -> Result<OccupationProfile> {
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("radii must be nonempty and strictly increasing".into()));
    }
    if trials == 0 {
        return Err(Error::Argument("trials must be positive".into()));
    }
    let word = expr.flatten()?;
    let d = u64::from(word.max_generator());
    let rmax = *radii.last().expect("nonempty");
    let lazy = set.contains_identity();
    let ball = if fast { None } else { Some(ball_enumerate(group, set, rmax, BALL_BUDGET)?) };

    let counts = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<u64>> {
            // Distance of each counted point, capped at rmax + 1.
            let dists: Vec<u32> = if fast {
                let dim = group.lattice_dim().expect("lattice");
                let walks: Vec<_> = (0..d).map(|v| lattice_steps(dim, steps, lazy, &mut stream(seed, steps, t, v))).collect();
                let path = LatticePath::word_path(dim, &word, &walks)?;
                let l1 = |p: &[i64]| p.iter().map(|c| c.unsigned_abs()).sum::<u64>().min(u64::from(rmax) + 1) as u32;
                if distinct {
                    path.points().collect::<HashSet<_>>().into_iter().map(l1).collect()
                } else {
                    path.points().map(l1).collect()
                }
            } else {
                let ball = ball.as_ref().expect("ball");
                let traces = (0..d)
                    .map(|v| run_walk(group, set, steps, &mut stream(seed, steps, t, v)))
                    .collect::<Result<Vec<_>, _>>()?;
                let path = word_path(group, &word, &traces)?;
                let dist = |x| ball.distance(x).unwrap_or(rmax + 1);
                if distinct {
                    path.points.iter().collect::<HashSet<_>>().into_iter().map(dist).collect()
                } else {
                    path.points.iter().map(dist).collect()
                }
            };
            Ok(radii.iter().map(|&r| dists.iter().filter(|&&x| x <= r).count() as u64).collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let n = trials as f64;
    let mut mean_counts = Vec::with_capacity(radii.len());
    let mut stderr = Vec::with_capacity(radii.len());
    for i in 0..radii.len() {
        let mean = counts.iter().map(|c| c[i] as f64).sum::<f64>() / n;
        let var = if trials > 1 {
            counts.iter().map(|c| (c[i] as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        mean_counts.push(mean);
        stderr.push((var / n).sqrt());
    }
    Ok(OccupationProfile { radii: radii.to_vec(), mean_counts, stderr, trials, distinct })
}
