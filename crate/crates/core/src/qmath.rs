//! Dense complex linear algebra for one to three qubits.
//!
//! Everything here works on square or rectangular matrices whose sides are
//! 1, 2, 4 or 8. The heavy lifting (Hermitian eigendecomposition and SVD) is
//! delegated to `nalgebra`; this module adds the quantum-information layer on
//! top: tensor products, partial traces, entropies in bits, Uhlmann-Jozsa
//! fidelity and trace distance.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{dimension, domain, Result};
use crate::states::DensityOperator;

pub type C64 = Complex64;

/// Largest matrix side supported.
pub const MAX_DIM: usize = 8;

/// Hermiticity defect accepted by [`eigh`] before symmetrization.
pub const EIGH_HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues below this magnitude contribute nothing to an entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

/// Negative eigenvalues down to `-NEGATIVE_EIGEN_TOL` are treated as roundoff
/// and clipped to zero; anything below is rejected.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-8;

const ALLOWED_SIDES: [usize; 4] = [1, 2, 4, 8];

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix with sides in {1, 2, 4, 8} and finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            ));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a square matrix from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return dimension("ragged or non-square real matrix");
            }
            entries.extend(row.iter().map(|&v| c(v, 0.0)));
        }
        Self::from_row_major(n, n, &entries)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        let (r, cl) = m.shape();
        if !ALLOWED_SIDES.contains(&r) || !ALLOWED_SIDES.contains(&cl) {
            return dimension(format!("matrix shape {r}x{cl} outside {{1,2,4,8}}"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("matrix has non-finite entries");
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by arithmetic on already valid operands.
    pub(crate) fn from_dmatrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert!(m.nrows() <= MAX_DIM && m.ncols() <= MAX_DIM);
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_dmatrix_unchecked(DMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_dmatrix_unchecked(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(diag[i], 0.0)
            } else {
                C64::default()
            }
        }))
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_dmatrix_unchecked(DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * c(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// `self · rho · self†`.
    pub fn sandwich(&self, rho: &ComplexMatrix) -> Self {
        Self(&self.0 * &rho.0 * self.0.adjoint())
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch in max_abs_diff");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * c(0.5, 0.0))
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Row-major real and imaginary parts.
    pub fn to_re_im(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].re).collect())
            .collect();
        let im = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)].im).collect())
            .collect();
        (re, im)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + &rhs.0)
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Pauli matrix σ_i with σ₀ = I.
pub fn pauli(i: usize) -> ComplexMatrix {
    let z = C64::default();
    let one = c(1.0, 0.0);
    let entries = match i {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [one, z, z, -one],
        _ => panic!("pauli index {i} out of range"),
    };
    ComplexMatrix::from_dmatrix_unchecked(DMatrix::from_row_slice(2, 2, &entries))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    if rows > MAX_DIM || cols > MAX_DIM {
        return dimension(format!("kron result {rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}"));
    }
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let mut iter = factors.iter();
    let first = match iter.next() {
        Some(m) => (*m).clone(),
        None => return dimension("kron of an empty factor list"),
    };
    iter.try_fold(first, |acc, m| kron(&acc, m))
}

/// Embeds a single-qubit operator on `target` of an `n_qubits` register.
/// Qubit 0 is the leftmost tensor factor.
pub fn embed_single_qubit(op: &ComplexMatrix, target: usize, n_qubits: usize) -> Result<ComplexMatrix> {
    if op.rows() != 2 || op.cols() != 2 {
        return dimension("embedded operator must be 2x2");
    }
    if target >= n_qubits {
        return dimension(format!("qubit {target} out of range for {n_qubits} qubits"));
    }
    let id = ComplexMatrix::identity(2);
    let factors: Vec<&ComplexMatrix> = (0..n_qubits)
        .map(|q| if q == target { op } else { &id })
        .collect();
    kron_all(&factors)
}

/// Number of qubits for a side of 2, 4 or 8.
pub fn qubit_count(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => dimension(format!("side {dim} is not a 1-3 qubit dimension")),
    }
}

/// Traces out every subsystem not listed in `keep`.
///
/// `subsystem_dims` gives the factor sizes, leftmost first; kept subsystems
/// appear in ascending index order in the result.
pub fn partial_trace(m: &ComplexMatrix, subsystem_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = subsystem_dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return dimension(format!(
            "subsystem dims {subsystem_dims:?} do not match a {}x{} matrix",
            m.rows(),
            m.cols()
        ));
    }
    if keep.is_empty() {
        return dimension("partial trace needs at least one kept subsystem");
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= subsystem_dims.len()) {
        return dimension(format!("invalid kept subsystem set {keep:?}"));
    }

    let n_sub = subsystem_dims.len();
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut d = vec![0; n_sub];
        for s in (0..n_sub).rev() {
            d[s] = idx % subsystem_dims[s];
            idx /= subsystem_dims[s];
        }
        d
    };
    let is_kept: Vec<bool> = (0..n_sub).map(|s| kept.contains(&s)).collect();
    let reduced_index = |d: &[usize]| -> usize {
        kept.iter().fold(0, |acc, &s| acc * subsystem_dims[s] + d[s])
    };
    let out_dim: usize = kept.iter().map(|&s| subsystem_dims[s]).product();

    let all_digits: Vec<Vec<usize>> = (0..total).map(digits).collect();
    let mut out = DMatrix::<C64>::zeros(out_dim, out_dim);
    for i in 0..total {
        for j in 0..total {
            let (di, dj) = (&all_digits[i], &all_digits[j]);
            let traced_match = (0..n_sub).all(|s| is_kept[s] || di[s] == dj[s]);
            if traced_match {
                out[(reduced_index(di), reduced_index(dj))] += m.0[(i, j)];
            }
        }
    }
    Ok(ComplexMatrix(out))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// `U f(Λ) U†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors.0;
        let n = self.eigenvalues.len();
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = c(f(lam), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        ComplexMatrix(scaled * u.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|l| l)
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
///
/// The input is symmetrized as `(M + M†)/2` first; a defect above
/// [`EIGH_HERMITIAN_TOL`] is rejected.
pub fn eigh(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    if !m.is_square() {
        return dimension("eigh needs a square matrix");
    }
    let defect = m.hermiticity_defect();
    if defect > EIGH_HERMITIAN_TOL {
        return domain(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    let n = m.rows();
    let sym = m.hermitian_part();
    let decomposition = SymmetricEigen::new(sym.0);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[b].total_cmp(&decomposition.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| decomposition.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| decomposition.eigenvectors[(i, order[j])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix(eigenvectors),
    })
}

/// Shannon entropy in bits of a spectrum, with `0·log 0 := 0`.
///
/// Eigenvalues in `[-NEGATIVE_EIGEN_TOL, ENTROPY_CUTOFF)` contribute zero;
/// anything more negative is a domain error.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lam in eigenvalues {
        if lam < -NEGATIVE_EIGEN_TOL {
            return domain(format!("negative eigenvalue {lam:e} in entropy"));
        }
        if lam >= ENTROPY_CUTOFF {
            s -= lam * lam.log2();
        }
    }
    let max = (eigenvalues.len() as f64).log2();
    Ok(s.clamp(0.0, max))
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_of_spectrum(&[p, 1.0 - p]).unwrap_or(0.0)
}

/// Von Neumann entropy `S(ρ) = −Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    entropy_of_spectrum(rho.eigenvalues())
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eigh(m)?;
    if let Some(&min) = spec.eigenvalues.last() {
        if min < -NEGATIVE_EIGEN_TOL {
            return domain(format!("matrix square root of eigenvalue {min:e}"));
        }
    }
    Ok(spec.map_eigenvalues(|l| l.max(0.0).sqrt()))
}

/// Uhlmann-Jozsa fidelity `(Tr √(√ρ σ √ρ))²`.
///
/// Evaluated as the squared trace norm of `√ρ √σ`, whose singular values are
/// the square roots of the eigenvalues of `√ρ σ √ρ`. Working with singular
/// values avoids taking square roots of roundoff-level eigenvalues, which
/// would otherwise perturb `F(ρ, ρ)` for pure states by ~1e-8.
pub fn fidelity(rho_th: &DensityOperator, rho_ex: &DensityOperator) -> Result<f64> {
    fidelity_matrices(rho_th.matrix(), rho_ex.matrix())
}

pub fn fidelity_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return dimension(format!(
            "fidelity of {}x{} and {}x{} operators",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    let product = &psd_sqrt(a)? * &psd_sqrt(b)?;
    let trace_norm: f64 = product.0.singular_values().iter().sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// Trace distance `½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    trace_distance_matrices(a.matrix(), b.matrix())
}

/// Trace distance on raw Hermitian matrices; used where an operand is not
/// guaranteed to be a valid state.
pub fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() || !a.is_square() {
        return dimension(format!(
            "trace distance of {}x{} and {}x{} operators",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    let spec = eigh(&(a - b))?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
