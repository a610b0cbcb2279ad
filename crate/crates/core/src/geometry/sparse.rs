use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::walk::{stream, Estimate};
use crate::{Error, Result};

/// A sparse system `AX = v` over `Z/lZ` with independent random `X_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem {
    modulus: u64,
    cols: usize,
    /// Nonzero entries `(column, value)` of each row.
    rows: Vec<Vec<(usize, u64)>>,
    k: usize,
    target: Vec<u64>,
    distributions: Vec<Vec<f64>>,
}

impl SparseSystem {
    /// Validates the system: no zero row, at most `k` nonzeros in every row
    /// and column, a target and a distribution for the right dimensions,
    /// and no point mass of 1.
    pub fn new(
        modulus: u64,
        cols: usize,
        rows: Vec<Vec<(usize, u64)>>,
        k: usize,
        target: Vec<u64>,
        distributions: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::Argument(format!("invalid sparse system: {m}")));
        if modulus < 2 || k == 0 || rows.is_empty() {
            return bad("need modulus ≥ 2, k ≥ 1 and at least one row".into());
        }
        let mut col_counts = vec![0usize; cols];
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.retain(|&(_, a)| a % modulus != 0);
            for e in row.iter_mut() {
                e.1 %= modulus;
            }
            if row.is_empty() {
                return bad(format!("row {i} is identically zero"));
            }
            if row.len() > k {
                return bad(format!("row {i} has {} nonzeros, more than {k}", row.len()));
            }
            for (n, &(j, _)) in row.iter().enumerate() {
                if row[..n].iter().any(|&(c, _)| c == j) {
                    return bad(format!("row {i} repeats column {j}"));
                }
                if j >= cols {
                    return bad(format!("column {j} out of range"));
                }
                col_counts[j] += 1;
            }
        }
        if let Some(j) = col_counts.iter().position(|&c| c > k) {
            return bad(format!("column {j} has more than {k} nonzeros"));
        }
        if target.len() != rows.len() || distributions.len() != cols {
            return bad("target or distribution count does not match the matrix".into());
        }
        for (j, d) in distributions.iter().enumerate() {
            let total: f64 = d.iter().sum();
            if d.len() as u64 != modulus || d.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
                return bad(format!("distribution {j} is not a probability vector on Z/{modulus}"));
            }
            if d.iter().any(|&p| p >= 1.0) {
                return bad(format!("distribution {j} is a point mass"));
            }
        }
        let target = target.into_iter().map(|t| t % modulus).collect();
        Ok(SparseSystem { modulus, cols, rows, k, target, distributions })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Largest `ε` with every point mass at most `1 - ε`.
    pub fn epsilon(&self) -> f64 {
        1.0 - self.distributions.iter().flatten().fold(0.0f64, |a, &p| a.max(p))
    }

    /// `(1 - ε)^⌈m / k²⌉`.
    pub fn bound(&self) -> f64 {
        let m = self.rows.len();
        let e = m.div_ceil(self.k * self.k);
        (1.0 - self.epsilon()).powi(e as i32)
    }

    pub fn is_solution(&self, x: &[u64]) -> bool {
        self.rows.iter().zip(&self.target).all(|(row, &t)| {
            row.iter().fold(0u64, |acc, &(j, a)| (acc + a * x[j]) % self.modulus) == t
        })
    }

    /// Exact `Pr(AX = v)` by enumerating all of `(Z/l)^{m'}`.
    pub fn exact_hit_prob(&self) -> Result<f64> {
        let total = (self.modulus as u128).checked_pow(self.cols as u32).filter(|&t| t <= 1 << 24);
        let Some(total) = total else {
            return Err(Error::Budget {
                what: "sparse system enumeration".into(),
                needed: u128::MAX,
                budget: 1 << 24,
            });
        };
        let mut x = vec![0u64; self.cols];
        let mut p = 0.0;
        for mut code in 0..total {
            let mut weight = 1.0;
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = (code % self.modulus as u128) as u64;
                code /= self.modulus as u128;
                weight *= self.distributions[j][*xj as usize];
            }
            if weight > 0.0 && self.is_solution(&x) {
                p += weight;
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SparseResult {
    pub estimate: Estimate,
    pub bound: f64,
    /// Whether the lower confidence limit stays at or below the bound.
    pub bound_satisfied: bool,
}

/// Monte Carlo estimate of `Pr(AX = v)` next to the bound `(1-ε)^⌈m/k²⌉`.
pub fn sparse_system_hit_prob(sys: &SparseSystem, trials: u64, seed: u64) -> Result<SparseResult> {
    if trials == 0 {
        return Err(Error::Argument("trials must be positive".into()));
    }
    let samplers = sys
        .distributions
        .iter()
        .map(WeightedIndex::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Argument(format!("bad distribution: {e}")))?;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(seed, 0, t, 0);
            let x: Vec<u64> = samplers.iter().map(|s| s.sample(&mut rng) as u64).collect();
            u64::from(sys.is_solution(&x))
        })
        .sum();
    let estimate = Estimate::new(hits, trials, seed);
    let bound = sys.bound();
    Ok(SparseResult { estimate, bound, bound_satisfied: estimate.ci_lo <= bound })
}

/// A random valid system with at most 12 rows and columns, modulus in
/// `{2, 3, 5}` and `k ≤ 3`. The target is `A x₀` for a sample `x₀` of `X`.
pub fn random_sparse_system(seed: u64) -> SparseSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let modulus = [2u64, 3, 5][rng.random_range(0..3)];
        let k = rng.random_range(1..=3usize);
        let m = rng.random_range(1..=12usize);
        let cols = rng.random_range(1..=12usize);
        let mut col_counts = vec![0usize; cols];
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let width = rng.random_range(1..=k);
            let mut row: Vec<(usize, u64)> = Vec::new();
            for _ in 0..width {
                let j = rng.random_range(0..cols);
                if col_counts[j] < k && row.iter().all(|&(c, _)| c != j) {
                    col_counts[j] += 1;
                    row.push((j, rng.random_range(1..modulus)));
                }
            }
            rows.push(row);
        }
        if rows.iter().any(Vec::is_empty) {
            continue;
        }
        let distributions: Vec<Vec<f64>> = (0..cols)
            .map(|_| {
                let mut w: Vec<f64> = (0..modulus).map(|_| rng.random_range(0.05..1.0)).collect();
                let boost = rng.random_range(0..modulus as usize);
                w[boost] *= rng.random_range(1.0..8.0);
                let total: f64 = w.iter().sum();
                w.iter().map(|p| p / total).collect()
            })
            .collect();
        let x0: Vec<u64> = distributions
            .iter()
            .map(|d| WeightedIndex::new(d).expect("positive weights").sample(&mut rng) as u64)
            .collect();
        let target = rows.iter().map(|row| row.iter().fold(0, |acc, &(j, a)| (acc + a * x0[j]) % modulus)).collect();
        return SparseSystem::new(modulus, cols, rows, k, target, distributions).expect("valid by construction");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(l: u64, n: usize) -> Vec<Vec<f64>> {
        vec![vec![1.0 / l as f64; l as usize]; n]
    }

    #[test]
    fn identity_system_attains_bound() {
        let m = 6;
        let rows = (0..m).map(|i| vec![(i, 1)]).collect();
        let sys = SparseSystem::new(2, m, rows, 1, vec![0; m], uniform(2, m)).unwrap();
        assert_eq!(sys.bound(), 0.5f64.powi(6));
        assert!((sys.exact_hit_prob().unwrap() - sys.bound()).abs() < 1e-15);
        let r = sparse_system_hit_prob(&sys, 20_000, 1).unwrap();
        assert!(r.bound_satisfied);
        assert!(r.estimate.covers(sys.bound()));
    }

    #[test]
    fn circulant_system_below_bound() {
        let m = 10;
        let rows = (0..m).map(|i| vec![(i, 1), ((i + 1) % m, 2)]).collect();
        // I + 2S is singular mod 3 with a one-dimensional kernel.
        let sys = SparseSystem::new(3, m, rows, 2, vec![0; m], uniform(3, m)).unwrap();
        assert!((sys.bound() - (1.0f64 / 3.0).powi(3)).abs() < 1e-12);
        assert!(sys.bound() <= (2.0f64 / 3.0).powi(3));
        let exact = sys.exact_hit_prob().unwrap();
        assert!((exact - 3f64.powi(-9)).abs() < 1e-12);
        assert!(exact <= sys.bound());
        assert!(sparse_system_hit_prob(&sys, 5_000, 2).unwrap().bound_satisfied);
    }

    #[test]
    fn invalid_systems_rejected() {
        let u = uniform(3, 2);
        assert!(SparseSystem::new(3, 2, vec![vec![(0, 3)]], 1, vec![0], u.clone()).is_err());
        assert!(SparseSystem::new(3, 2, vec![vec![(0, 1), (1, 1)]], 1, vec![0], u.clone()).is_err());
        assert!(SparseSystem::new(3, 2, vec![vec![(0, 1)], vec![(0, 2)]], 1, vec![0, 0], u.clone()).is_err());
        assert!(SparseSystem::new(3, 2, vec![vec![(0, 1)]], 1, vec![0], vec![vec![1.0, 0.0, 0.0], u[0].clone()]).is_err());
        assert!(SparseSystem::new(3, 2, vec![vec![(0, 1)]], 1, vec![0], u).is_ok());
    }

    #[test]
    fn random_systems_are_valid_and_reproducible() {
        for seed in 0..20 {
            let s = random_sparse_system(seed);
            assert_eq!(s, random_sparse_system(seed));
            assert!(s.num_rows() <= 12 && s.num_cols() <= 12 && s.k() <= 3);
            assert!([2, 3, 5].contains(&s.modulus()));
        }
    }
}
