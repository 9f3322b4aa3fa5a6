//! Small dense symmetric linear algebra: Schur complements with rank
//! detection, Cholesky log-determinants and a cyclic Jacobi eigensolver.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.concat() }
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

    /// Submatrix with the given row and column indices, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        self.select(idx, idx)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs_diag(&self) -> F {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].abs()).fold(F::zero(), F::max)
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> F {
        let mut worst = F::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Relative size below which a pivot is treated as an exact linear
/// dependence and dropped.
pub const DROP_TOL: f64 = 1e-12;
/// Relative size of a negative pivot or eigenvalue that is still attributed
/// to rounding rather than to an indefinite input.
pub const NEG_TOL: f64 = 1e-10;

/// Conditional covariance of the `target` coordinates given `given`:
/// `Σ_TT − Σ_TG Σ_GG⁺ Σ_GT`.
///
/// Conditioning coordinates that are (numerically) linear combinations of
/// earlier ones are skipped, which is the pseudo-inverse solution for a
/// positive semidefinite `Σ`.
pub fn conditional_cov<F: Scalar>(cov: &Matrix<F>, target: &[usize], given: &[usize]) -> Result<Matrix<F>> {
    let order: Vec<usize> = given.iter().chain(target).copied().collect();
    let mut m = cov.principal(&order);
    let n = order.len();
    let g = given.len();
    let drop = F::lit(DROP_TOL);
    let neg = F::lit(NEG_TOL);
    let scale = m.max_abs_diag().max(F::min_positive_value());

    for k in 0..g {
        let p = m[(k, k)];
        let orig = cov[(order[k], order[k])].abs();
        if p <= drop * orig || p <= F::zero() {
            if p < -neg * scale {
                return Err(indefinite(cov, &order));
            }
            continue;
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / p;
            if f == F::zero() {
                continue;
            }
            for j in (k + 1)..=i {
                m[(i, j)] = m[(i, j)] - f * m[(j, k)];
            }
        }
    }
    let t = target.len();
    Ok(Matrix::from_fn(t, t, |i, j| {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        m[(g + a, g + b)]
    }))
}

fn indefinite<F: Scalar>(cov: &Matrix<F>, idx: &[usize]) -> Error {
    let (vals, _) = symmetric_eigen(&cov.principal(idx));
    let min = vals.iter().copied().fold(F::infinity(), F::min);
    Error::IndefiniteCovariance { eigenvalue: min.to_f64_lossy() }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<F: Scalar>(a: &Matrix<F>) -> Result<Matrix<F>> {
    assert!(a.is_square());
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > F::zero()) {
            return Err(Error::Numeric(format!("matrix is not positive definite (pivot {d:e} at {j})")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// `ln det` of a symmetric positive definite matrix.
pub fn logdet_pd<F: Scalar>(a: &Matrix<F>) -> Result<F> {
    let l = cholesky(a)?;
    Ok((0..a.rows()).map(|i| l[(i, i)].ln()).sum::<F>() * F::lit(2.0))
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_pd<F: Scalar>(a: &Matrix<F>, b: &[F]) -> Result<Vec<F>> {
    let l = cholesky(a)?;
    let n = b.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l[(i, k)] * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] = y[i] - l[(k, i)] * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    Ok(y)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (ascending) and the matching eigenvectors as columns.
pub fn symmetric_eigen<F: Scalar>(a: &Matrix<F>) -> (Vec<F>, Matrix<F>) {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let eps = F::epsilon();
    for _sweep in 0..100 {
        let mut off = F::zero();
        let mut diag = F::zero();
        for i in 0..n {
            diag = diag + m[(i, i)] * m[(i, i)];
            for j in 0..i {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off <= eps * eps * diag || off == F::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (F::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed;
        let b = Matrix::from_fn(n, n, |_, _| {
            s = crate::rng::mix64(s);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let mut a = b.matmul(&b.transpose());
        for i in 0..n {
            a[(i, i)] += 0.1;
        }
        a
    }

    #[test]
    fn cholesky_solves_and_logdet() {
        let a = spd(6, 1);
        let x = solve_pd(&a, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        for i in 0..6 {
            let r: f64 = (0..6).map(|j| a[(i, j)] * x[j]).sum();
            assert!((r - (i + 1) as f64).abs() < 1e-9);
        }
        let (vals, _) = symmetric_eigen(&a);
        let ld: f64 = vals.iter().map(|v| v.ln()).sum();
        assert!((ld - logdet_pd(&a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn jacobi_reconstructs() {
        let a = spd(7, 3);
        let (vals, v) = symmetric_eigen(&a);
        let d = Matrix::from_fn(7, 7, |i, j| if i == j { vals[i] } else { 0.0 });
        let r = v.matmul(&d).matmul(&v.transpose());
        for i in 0..7 {
            for j in 0..7 {
                assert!((r[(i, j)] - a[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn schur_complement_matches_explicit_inverse() {
        let a = spd(5, 9);
        let s = conditional_cov(&a, &[0, 1], &[2, 3, 4]).unwrap();
        let g = a.principal(&[2, 3, 4]);
        for (ti, &t) in [0usize, 1].iter().enumerate() {
            for (ui, &u) in [0usize, 1].iter().enumerate() {
                let col: Vec<f64> = [2, 3, 4].iter().map(|&k| a[(k, u)]).collect();
                let x = solve_pd(&g, &col).unwrap();
                let expect = a[(t, u)] - [2, 3, 4].iter().zip(&x).map(|(&k, xv)| a[(t, k)] * xv).sum::<f64>();
                assert!((s[(ti, ui)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn duplicated_conditioning_coordinate_is_dropped() {
        // coordinate 2 equals coordinate 1 exactly
        let a = Matrix::from_rows(&[vec![2.0f64, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]);
        let s = conditional_cov(&a, &[0], &[1, 2]).unwrap();
        assert!((s[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_input_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0f64, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        match conditional_cov(&a, &[0], &[1, 2]) {
            Err(Error::IndefiniteCovariance { eigenvalue }) => assert!((eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }
}
