//! Random walks, word paths and Monte Carlo estimates of law probabilities.
//!
//! Every trial draws from its own stream derived from
//! `(seed, steps, trial, variable)`, so results do not depend on the order
//! in which trials run or on the number of threads.

pub mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::{FreeWord, GeneratingSet, GroupElement, GroupHandle};
use crate::law::{evaluate_word, simple_products, LawExpr};
use crate::scalar::Coord;
use crate::{Error, Result};

pub use stats::{loglog_slope, wilson_interval, Estimate, Z95};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub steps: u64,
    pub trials: u64,
    pub seed: u64,
    pub lazy: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { steps: 400, trials: 10_000, seed: 0, lazy: true }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Good count, nilpotent count and first witness for one trial.
type TrialTally<C> = (u64, u64, Option<[GroupElement<C>; 4]>);

/// The random stream for one `(seed, domain, trial, variable)` coordinate.
pub fn stream(seed: u64, domain: u64, trial: u64, var: u64) -> ChaCha8Rng {
    let mut state = seed;
    for word in [domain, trial, var] {
        state = splitmix64(&mut state) ^ word;
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn check_set<C: Coord>(set: &GeneratingSet<C>) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Argument("empty generating set".into()));
    }
    Ok(())
}

/// Prefix products `R_0, ..., R_n` of a right random walk.
pub fn run_walk<C: Coord, R: Rng>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    steps: u64,
    rng: &mut R,
) -> Result<Vec<GroupElement<C>>> {
    check_set(set)?;
    let atoms = set.atoms();
    let mut trace = Vec::with_capacity(steps as usize + 1);
    let mut cur = group.identity();
    trace.push(cur.clone());
    for _ in 0..steps {
        group.mul_assign(&mut cur, &atoms[rng.random_range(0..atoms.len())])?;
        trace.push(cur.clone());
    }
    Ok(trace)
}

/// Endpoint `R_n` only.
pub fn walk_endpoint<C: Coord, R: Rng>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    steps: u64,
    rng: &mut R,
) -> Result<GroupElement<C>> {
    check_set(set)?;
    let atoms = set.atoms();
    let mut cur = group.identity();
    for _ in 0..steps {
        group.mul_assign(&mut cur, &atoms[rng.random_range(0..atoms.len())])?;
    }
    Ok(cur)
}

/// The path `γ_0, ..., γ_{ℓn}` traced by a word along walk traces.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTrace<C: Coord> {
    pub points: Vec<GroupElement<C>>,
    /// Indices `jn`, `j = 0..=ℓ`, where letter segments start and end.
    pub boundaries: Vec<usize>,
}

impl<C: Coord> PathTrace<C> {
    pub fn endpoint(&self) -> &GroupElement<C> {
        self.points.last().expect("a path has at least one point")
    }
}

/// Builds the word path: a letter `x_a` contributes `P_j R_k^{(a)}` and a
/// letter `x_a^{-1}` contributes `P_j (R_n^{(a)})^{-1} R_{n-k}^{(a)}`, where
/// `P_j` is the point reached after the first `j` letters.
pub fn word_path<C: Coord>(
    group: &GroupHandle<C>,
    word: &FreeWord,
    traces: &[Vec<GroupElement<C>>],
) -> Result<PathTrace<C>> {
    let needed = word.max_generator() as usize;
    if traces.len() < needed {
        return Err(Error::Argument(format!("word needs {needed} walk traces, got {}", traces.len())));
    }
    let len = traces.first().map_or(0, Vec::len);
    if len == 0 || traces.iter().take(needed).any(|t| t.len() != len) {
        return Err(Error::Argument("walk traces must be nonempty and of equal length".into()));
    }
    let n = len - 1;
    let mut points = Vec::with_capacity(word.len() * n + 1);
    let mut boundaries = vec![0];
    let mut anchor = group.identity();
    points.push(anchor.clone());
    for letter in word.letters() {
        let trace = &traces[letter.generator() as usize - 1];
        if letter.is_inverse() {
            let base = group.multiply(&anchor, &group.inverse(&trace[n])?)?;
            for k in 1..=n {
                points.push(group.multiply(&base, &trace[n - k])?);
            }
        } else {
            for p in &trace[1..] {
                points.push(group.multiply(&anchor, p)?);
            }
        }
        anchor = points.last().expect("nonempty").clone();
        boundaries.push(points.len() - 1);
    }
    Ok(PathTrace { points, boundaries })
}

/// Monte Carlo estimate of the probability that `law` evaluates to the
/// identity on independent `steps`-step walks.
pub fn estimate_law<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    law: &LawExpr,
    steps: u64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::Argument("trials must be positive".into()));
    }
    check_set(set)?;
    let word = law.flatten()?;
    let d = law.num_vars() as u64;
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut xs = Vec::with_capacity(d as usize);
            for v in 0..d {
                xs.push(walk_endpoint(group, set, steps, &mut stream(seed, steps, t, v))?);
            }
            let value = evaluate_word(&word, group, &xs)?;
            Ok(u64::from(group.is_identity(&value)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::new(successes, trials, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub steps: u64,
    pub estimate: Estimate,
    /// Running maximum of `p_hat`, the proxy for the limit superior.
    pub running_max: f64,
    pub running_min: f64,
}

/// One estimate per step count; stream derivations differ between grid
/// points because the step count is part of the stream key.
pub fn estimate_curve<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    law: &LawExpr,
    grid: &[u64],
    trials: u64,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("step grid must be strictly increasing".into()));
    }
    let mut out: Vec<CurvePoint> = Vec::with_capacity(grid.len());
    for &n in grid {
        let estimate = estimate_law(group, set, law, n, trials, seed)?;
        let (running_max, running_min) = match out.last() {
            Some(prev) => (prev.running_max.max(estimate.p_hat), prev.running_min.min(estimate.p_hat)),
            None => (estimate.p_hat, estimate.p_hat),
        };
        out.push(CurvePoint { steps: n, estimate, running_max, running_min });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessReport<C: Coord> {
    pub trials: u64,
    /// Quadruples all of whose simple products cube to the identity.
    pub good: u64,
    /// Good quadruples with `[x, y, z, w] = 1`.
    pub good_and_trivial: u64,
    /// Good quadruples with `[x, y, z, w] ≠ 1`.
    pub counterexamples: Vec<[GroupElement<C>; 4]>,
}

impl<C: Coord> GoodnessReport<C> {
    pub fn fraction_good(&self) -> f64 {
        self.good as f64 / self.trials as f64
    }

    pub fn fraction_good_and_trivial(&self) -> f64 {
        self.good_and_trivial as f64 / self.trials as f64
    }
}

/// Whether every simple product of `xs` has order dividing 3.
pub fn is_good<C: Coord>(group: &GroupHandle<C>, products: &[FreeWord], xs: &[GroupElement<C>]) -> Result<bool> {
    for w in products {
        let p = evaluate_word(w, group, xs)?;
        if !group.is_identity(&group.pow(&p, 3)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Samples quadruples of independent walks and checks that good quadruples
/// satisfy `[x, y, z, w] = 1`.
pub fn goodness_probe<C: Coord>(
    group: &GroupHandle<C>,
    set: &GeneratingSet<C>,
    steps: u64,
    trials: u64,
    seed: u64,
) -> Result<GoodnessReport<C>> {
    check_set(set)?;
    let products: Vec<FreeWord> = simple_products(4).iter().map(LawExpr::word).collect();
    let nilpotent = LawExpr::Var(1).comm(LawExpr::Var(2)).comm(LawExpr::Var(3)).comm(LawExpr::Var(4)).word();
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialTally<C>> {
            let mut xs = Vec::with_capacity(4);
            for v in 0..4 {
                xs.push(walk_endpoint(group, set, steps, &mut stream(seed, steps, t, v))?);
            }
            if !is_good(group, &products, &xs)? {
                return Ok((0, 0, None));
            }
            if group.is_identity(&evaluate_word(&nilpotent, group, &xs)?) {
                Ok((1, 1, None))
            } else {
                let quad: [GroupElement<C>; 4] = xs.try_into().expect("four elements");
                Ok((1, 0, Some(quad)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = GoodnessReport { trials, good: 0, good_and_trivial: 0, counterexamples: Vec::new() };
    for (g, t, c) in per_trial {
        report.good += g;
        report.good_and_trivial += t;
        report.counterexamples.extend(c);
    }
    Ok(report)
}
