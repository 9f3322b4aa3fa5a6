//! Mutual information between blocks of a zero-mean Gaussian vector.

use crate::error::{arg, Error, Result};
use crate::linalg::{conditional_cov, symmetric_eigen, Matrix, NEG_TOL};
use crate::scalar::Scalar;

/// Zero-mean Gaussian vector described by its covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianJointModel<F> {
    labels: Vec<String>,
    cov: Matrix<F>,
}

/// Absolute asymmetry tolerated in a covariance, relative to its largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

impl<F: Scalar> GaussianJointModel<F> {
    pub fn new(labels: Vec<String>, cov: Matrix<F>) -> Result<Self> {
        if !cov.is_square() || cov.rows() != labels.len() {
            return arg(format!("covariance is {}x{} but {} labels were given", cov.rows(), cov.cols(), labels.len()));
        }
        let scale = cov.max_abs_diag().max(F::one());
        if cov.asymmetry() > F::lit(SYMMETRY_TOL) * scale {
            return arg(format!("covariance is not symmetric (max deviation {:e})", cov.asymmetry()));
        }
        Ok(Self { labels, cov })
    }

    /// Model with labels `x0, x1, …`.
    pub fn unlabeled(cov: Matrix<F>) -> Result<Self> {
        let labels = (0..cov.rows()).map(|i| format!("x{i}")).collect();
        Self::new(labels, cov)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cov(&self) -> &Matrix<F> {
        &self.cov
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Indices of `labels`, failing on unknown names.
    pub fn indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.index_of(l).ok_or_else(|| Error::Argument(format!("unknown coordinate {l}"))))
            .collect()
    }

    /// Smallest eigenvalue of the covariance.
    pub fn min_eigenvalue(&self) -> F {
        symmetric_eigen(&self.cov).0.first().copied().unwrap_or(F::zero())
    }

    pub fn mutual_information(&self, x: &[usize], z: &[usize]) -> Result<F> {
        gaussian_cond_mi(self, x, z, &[])
    }

    pub fn conditional_mi(&self, x: &[usize], z: &[usize], d: &[usize]) -> Result<F> {
        gaussian_cond_mi(self, x, z, d)
    }
}

/// `I(X; Z | D)` in nats.
///
/// Evaluated as `½ ln det Σ_{T|D} − ½ ln det Σ_{T|O,D}` where `T` is the
/// smaller of the two blocks and `O` the other, which equals the four-determinant
/// expression but stays finite when some coordinates are exact linear functions
/// of others. Directions of `T` that are already determined by `D` carry no
/// information and are projected out. If `O` pins down a direction of `T` that
/// `D` leaves uncertain the result is `+∞`.
pub fn gaussian_cond_mi<F: Scalar>(model: &GaussianJointModel<F>, x: &[usize], z: &[usize], d: &[usize]) -> Result<F> {
    validate_sets(model.dim(), &[x, z, d])?;
    if x.is_empty() || z.is_empty() {
        return Ok(F::zero());
    }
    let (target, other) = if x.len() <= z.len() { (x, z) } else { (z, x) };
    let cov = model.cov();

    let s1 = conditional_cov(cov, target, d)?;
    let both: Vec<usize> = other.iter().chain(d).copied().collect();
    let s2 = conditional_cov(cov, target, &both)?;

    let scale = cov.principal(target).max_abs_diag().max(F::min_positive_value());
    let keep_tol = F::lit(NEG_TOL) * scale;
    let neg_tol = -F::lit(NEG_TOL) * scale;

    let (vals, vecs) = symmetric_eigen(&s1);
    if let Some(&v) = vals.first() {
        if v < neg_tol {
            return Err(Error::IndefiniteCovariance { eigenvalue: v.to_f64_lossy() });
        }
    }
    let kept: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > keep_tol).collect();
    if kept.is_empty() {
        return Ok(F::zero());
    }
    let basis = Matrix::from_fn(target.len(), kept.len(), |i, j| vecs[(i, kept[j])]);
    let projected = basis.transpose().matmul(&s2).matmul(&basis);
    let (pvals, _) = symmetric_eigen(&projected);
    if pvals[0] < neg_tol {
        return Err(Error::IndefiniteCovariance { eigenvalue: pvals[0].to_f64_lossy() });
    }
    if pvals[0] <= F::zero() {
        return Ok(F::infinity());
    }
    let half = F::lit(0.5);
    let mi = kept.iter().map(|&i| vals[i].ln()).sum::<F>() - pvals.iter().map(|v| v.ln()).sum::<F>();
    // Conditioning never increases variance; tiny negatives are rounding.
    Ok((half * mi).max(F::zero()))
}

fn validate_sets(n: usize, sets: &[&[usize]]) -> Result<()> {
    let mut seen = vec![false; n];
    for set in sets {
        for &i in *set {
            if i >= n {
                return arg(format!("coordinate index {i} out of range for dimension {n}"));
            }
            if seen[i] {
                return arg(format!("coordinate index {i} appears in more than one set"));
            }
            seen[i] = true;
        }
    }
    Ok(())
}

/// `I(X; Z)` for a Gaussian Markov chain `X → Y → Z` from the two link
/// informations `I(X; Y)` and `I(Z; Y)`.
pub fn chain_mi<F: Scalar>(ixy: F, izy: F) -> Result<F> {
    if !(ixy > F::zero()) || !(izy > F::zero()) {
        return arg(format!("link informations must be positive, got {ixy} and {izy}"));
    }
    let two = F::lit(2.0);
    let a = -(-(two * ixy)).exp_m1();
    let b = -(-(two * izy)).exp_m1();
    Ok(-F::lit(0.5) * (-(a * b)).ln_1p())
}

pub fn nats_to_bits<F: Scalar>(nats: F) -> F {
    nats / F::LN_2()
}

pub fn bits_to_nats<F: Scalar>(bits: F) -> F {
    bits * F::LN_2()
}
