//! Dense integer matrices and the companion-matrix constructions used for
//! the semidirect products.

use std::fmt;

use crate::kernel::KernelError;
use crate::scalar::{self, Coord};

/// A dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coord> IntMatrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Self, KernelError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(KernelError::Construction("ragged matrix rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, KernelError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| C::of_i64(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, KernelError> {
        if self.cols != rhs.rows {
            return Err(KernelError::Dimension { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = scalar::add(&out.data[idx], &scalar::mul(a, b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, KernelError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(KernelError::Dimension { expected: self.rows, found: rhs.rows });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| scalar::add(a, b))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, KernelError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(KernelError::Dimension { expected: self.rows, found: rhs.rows });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| scalar::sub(a, b))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: &C) -> Result<Self, KernelError> {
        let data = self.data.iter().map(|a| scalar::mul(a, c)).collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn pow(&self, mut e: u64) -> Result<Self, KernelError> {
        if !self.is_square() {
            return Err(KernelError::Dimension { expected: self.rows, found: self.cols });
        }
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[C]) -> Result<Vec<C>, KernelError> {
        if v.len() != self.cols {
            return Err(KernelError::Dimension { expected: self.cols, found: v.len() });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = C::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = scalar::add(&acc, &scalar::mul(a, x)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Evaluates the polynomial `c_0 + c_1 M + ... ` at this matrix.
    pub fn eval_poly(&self, coeffs: &[i64]) -> Result<Self, KernelError> {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(self)?.add(&Self::identity(n).scale(&C::of_i64(c))?)?;
        }
        Ok(acc)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<C, KernelError> {
        if !self.is_square() {
            return Err(KernelError::Dimension { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(C::one());
        }
        let mut a = self.to_rows();
        let mut sign_flip = false;
        let mut prev = C::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Ok(C::zero());
                };
                a.swap(k, p);
                sign_flip = !sign_flip;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let lhs = scalar::mul(&a[i][j], &a[k][k])?;
                    let rhs = scalar::mul(&a[i][k], &a[k][j])?;
                    a[i][j] = scalar::sub(&lhs, &rhs)?.div_floor(&prev);
                }
                a[i][k] = C::zero();
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if sign_flip {
            scalar::neg(&det)
        } else {
            Ok(det)
        }
    }

    pub fn map<D: Coord>(&self, f: impl Fn(&C) -> D) -> IntMatrix<D> {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<C: Coord> fmt::Display for IntMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients `[c_0, ..., c_deg]` of the `m`-th cyclotomic polynomial,
/// obtained by dividing `x^m - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    assert!(m >= 1);
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = divide_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

/// Exact quotient of `num` by a monic `den` (both low-degree first).
fn divide_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "division was not exact");
    q
}

/// Companion matrix of the monic polynomial `c_0 + c_1 x + ... + x^n`:
/// ones on the subdiagonal and `-c_i` down the last column.
pub fn companion_of<C: Coord>(coeffs: &[i64]) -> IntMatrix<C> {
    let n = coeffs.len() - 1;
    assert_eq!(coeffs[n], 1, "polynomial must be monic");
    let mut a = IntMatrix::zeros(n, n);
    for i in 1..n {
        a.set(i, i - 1, C::one());
    }
    for (i, &c) in coeffs[..n].iter().enumerate() {
        a.set(i, n - 1, C::of_i64(-c));
    }
    a
}

/// Companion matrix of `1 + x + ... + x^{m-1}`, an `(m-1)×(m-1)` matrix with
/// `A^m = I` and `det(A - I) ≠ 0`.
pub fn companion_matrix<C: Coord>(m: u64) -> Result<IntMatrix<C>, KernelError> {
    if m < 2 {
        return Err(KernelError::Argument(format!("companion matrix needs m >= 2, got {m}")));
    }
    let a = companion_of::<C>(&vec![1; m as usize]);
    let n = a.rows();
    if !a.pow(m)?.is_identity() || a.sub(&IntMatrix::identity(n))?.determinant()?.is_zero() {
        return Err(KernelError::Construction(format!("companion matrix for m={m} failed validation")));
    }
    Ok(a)
}

/// Integer matrix of order `m` whose minimal polynomial is the `m`-th
/// cyclotomic polynomial; it has size `φ(m)`.
pub fn cyclotomic_action_matrix<C: Coord>(m: u64) -> Result<IntMatrix<C>, KernelError> {
    if m < 2 {
        return Err(KernelError::Argument(format!("cyclotomic matrix needs m >= 2, got {m}")));
    }
    let phi = cyclotomic_polynomial(m);
    let a = companion_of::<C>(&phi);
    if !a.pow(m)?.is_identity() || !a.eval_poly(&phi)?.is_zero() {
        return Err(KernelError::Construction(format!("cyclotomic matrix for m={m} failed validation")));
    }
    Ok(a)
}
