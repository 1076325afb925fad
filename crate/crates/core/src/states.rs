//! State families: Werner, Bell-diagonal, single-qubit Bloch states and the
//! three-qubit pseudopure state, plus an idealized two-qubit Pauli tomography.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain, Error, Result};
use crate::qmath::{c, eigh, kron, partial_trace, pauli, qubit_count, ComplexMatrix, C64};

/// Tolerance on Hermiticity, trace and positivity of a [`DensityOperator`].
pub const STATE_TOL: f64 = 1e-10;

/// Positive semidefinite, unit-trace Hermitian operator on one to three qubits.
///
/// The spectrum is computed once at construction (validation needs it anyway)
/// and cached for entropy evaluations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    /// Validates and wraps `matrix`. The stored matrix is the Hermitian part
    /// of the input.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return dimension("density operator must be square");
        }
        qubit_count(matrix.rows())?;
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return domain(format!("state is not Hermitian (defect {defect:e})"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return domain(format!("state trace is {tr}, expected 1"));
        }
        let matrix = matrix.hermitian_part();
        let eigenvalues = eigh(&matrix)?.eigenvalues;
        let min = eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return domain(format!("state has negative eigenvalue {min:e}"));
        }
        Ok(Self { matrix, eigenvalues })
    }

    /// Builds a state from an unnormalized positive operator: symmetrizes,
    /// divides by the trace and clips roundoff-level negative eigenvalues.
    /// Used for conditional states, where dividing by a small outcome
    /// probability magnifies roundoff.
    pub(crate) fn from_unnormalized(m: &ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return domain(format!("cannot normalize operator with trace {tr}"));
        }
        let spec = eigh(&m.hermitian_part().scale(1.0 / tr))?;
        let min = spec.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -crate::qmath::NEGATIVE_EIGEN_TOL {
            return domain(format!("conditional operator has eigenvalue {min:e}"));
        }
        if min >= 0.0 {
            return Self::new(spec.reconstruct());
        }
        let clipped: f64 = spec.eigenvalues.iter().map(|l| l.max(0.0)).sum();
        Self::new(spec.map_eigenvalues(|l| l.max(0.0) / clipped))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        qubit_count(dim)?;
        Self::new(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|v⟩⟨v|` for a (not necessarily normalized) vector.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return domain("pure state vector has zero or non-finite norm");
        }
        let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        qubit_count(self.dim()).expect("validated at construction")
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn purity(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l * l).sum()
    }

    /// Reduced state of a single qubit.
    pub fn qubit_marginal(&self, qubit: usize) -> Result<Self> {
        let n = self.num_qubits();
        if qubit >= n {
            return dimension(format!("qubit {qubit} out of range for {n} qubits"));
        }
        let reduced = partial_trace(&self.matrix, &vec![2; n], &[qubit])?;
        Self::new(reduced)
    }

    /// `(ρ_A, ρ_B)` of a two-qubit state.
    pub fn marginals(&self) -> Result<(Self, Self)> {
        if self.dim() != 4 {
            return dimension("marginals are defined here for two-qubit states");
        }
        Ok((self.qubit_marginal(0)?, self.qubit_marginal(1)?))
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(kron(&self.matrix, &other.matrix)?)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return dimension("unitary and state sizes differ");
        }
        Self::new(u.sandwich(&self.matrix))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// JSON layout `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<DensityOperator> for StateJson {
    fn from(rho: DensityOperator) -> Self {
        let (re, im) = rho.matrix.to_re_im();
        StateJson { dim: rho.dim(), re, im }
    }
}

impl TryFrom<StateJson> for DensityOperator {
    type Error = Error;

    fn try_from(js: StateJson) -> Result<Self> {
        let n = js.dim;
        let shape_ok = js.re.len() == n
            && js.im.len() == n
            && js.re.iter().chain(js.im.iter()).all(|row| row.len() == n);
        if !shape_ok {
            return dimension(format!("JSON state rows do not match dim {n}"));
        }
        let entries: Vec<C64> = js
            .re
            .iter()
            .flatten()
            .zip(js.im.iter().flatten())
            .map(|(&r, &i)| c(r, i))
            .collect();
        DensityOperator::new(ComplexMatrix::from_row_major(n, n, &entries)?)
    }
}

/// Single-qubit Bloch vector with `|r| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BlochVector {
    pub fn new(r_x: f64, r_y: f64, r_z: f64) -> Result<Self> {
        let norm_sq = r_x * r_x + r_y * r_y + r_z * r_z;
        if !norm_sq.is_finite() || norm_sq > 1.0 + 1e-12 {
            return domain(format!("Bloch vector ({r_x}, {r_y}, {r_z}) lies outside the unit ball"));
        }
        Ok(Self { r_x, r_y, r_z })
    }

    /// Reads the Bloch vector back from a single-qubit state.
    pub fn of(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return dimension("Bloch vector of a non-qubit state");
        }
        let m = rho.matrix();
        Ok(Self {
            r_x: 2.0 * m[(1, 0)].re,
            r_y: 2.0 * m[(1, 0)].im,
            r_z: m[(0, 0)].re - m[(1, 1)].re,
        })
    }
}

/// `(I + r_x σ₁ + r_y σ₂ + r_z σ₃)/2`.
pub fn bloch_state(v: BlochVector) -> Result<DensityOperator> {
    let v = BlochVector::new(v.r_x, v.r_y, v.r_z)?;
    let m = &(&(&pauli(0) + &pauli(1).scale(v.r_x)) + &pauli(2).scale(v.r_y)) + &pauli(3).scale(v.r_z);
    DensityOperator::new(m.scale(0.5))
}

/// Correlation triple of a Bell-diagonal state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let p = Self { c1, c2, c3 };
        p.validate()?;
        Ok(p)
    }

    /// The four Bell-basis weights; all must be non-negative for a physical state.
    pub fn weights(&self) -> [f64; 4] {
        let Self { c1, c2, c3 } = *self;
        [
            (1.0 - c1 - c2 - c3) / 4.0,
            (1.0 - c1 + c2 + c3) / 4.0,
            (1.0 + c1 - c2 + c3) / 4.0,
            (1.0 + c1 + c2 - c3) / 4.0,
        ]
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                return domain(format!("{name} = {v} outside [-1, 1]"));
            }
        }
        if let Some(w) = self.weights().into_iter().find(|&w| w < -1e-12) {
            return domain(format!(
                "Bell-diagonal triple ({}, {}, {}) is unphysical (Bell weight {w})",
                self.c1, self.c2, self.c3
            ));
        }
        Ok(())
    }
}

/// `z|ψ⁻⟩⟨ψ⁻| + (1 − z) I/4` with `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn werner(z: f64) -> Result<DensityOperator> {
    if !z.is_finite() || !(0.0..=1.0).contains(&z) {
        return domain(format!("Werner parameter z = {z} outside [0, 1]"));
    }
    let zero = C64::default();
    let singlet = ComplexMatrix::outer(&[zero, c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0), zero]);
    let m = &singlet.scale(z) + &ComplexMatrix::identity(4).scale((1.0 - z) / 4.0);
    DensityOperator::new(m)
}

/// `(I⊗I + Σ c_i σ_i⊗σ_i)/4`.
pub fn bell_diagonal(p: BellDiagonalParams) -> Result<DensityOperator> {
    p.validate()?;
    let mut m = ComplexMatrix::identity(4);
    for (i, ci) in [(1, p.c1), (2, p.c2), (3, p.c3)] {
        m = m + &kron(&pauli(i), &pauli(i))?.scale(ci);
    }
    DensityOperator::new(m.scale(0.25))
}

/// `(1 − ε) I/8 + ε|000⟩⟨000|`.
pub fn pseudopure_3q(epsilon: f64) -> Result<DensityOperator> {
    if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
        return domain(format!("polarization {epsilon} outside [0, 1]"));
    }
    let mut diag = [(1.0 - epsilon) / 8.0; 8];
    diag[0] += epsilon;
    DensityOperator::new(ComplexMatrix::from_real_diagonal(&diag))
}

/// Werner state with `z = 0.8`.
pub fn werner_preset() -> DensityOperator {
    werner(0.8).expect("z = 0.8 is in range")
}

/// Bell-diagonal state with `c = (1, −1, 1)`, the `|Φ⁺⟩` projector.
pub fn bell_diagonal_preset() -> DensityOperator {
    bell_diagonal(BellDiagonalParams { c1: 1.0, c2: -1.0, c3: 1.0 }).expect("physical triple")
}

/// Labels `"σiσj"` in the order used by [`pauli_expectations`].
pub fn pauli_labels() -> [String; 15] {
    std::array::from_fn(|k| {
        let (i, j) = ((k + 1) / 4, (k + 1) % 4);
        format!("s{i}s{j}")
    })
}

/// `Tr ρ (σ_i ⊗ σ_j)` for all `(i, j) ≠ (0, 0)`, index `4i + j − 1`.
pub fn pauli_expectations(rho: &DensityOperator) -> Result<[f64; 15]> {
    if rho.dim() != 4 {
        return dimension("Pauli tomography is defined for two-qubit states");
    }
    let mut out = [0.0; 15];
    for (k, slot) in out.iter_mut().enumerate() {
        let (i, j) = ((k + 1) / 4, (k + 1) % 4);
        let op = kron(&pauli(i), &pauli(j))?;
        *slot = (rho.matrix() * &op).trace().re;
    }
    Ok(out)
}

/// Inverse of [`pauli_expectations`]: `(I + Σ v_ij σ_i⊗σ_j)/4`.
pub fn from_pauli_expectations(values: &[f64; 15]) -> Result<DensityOperator> {
    if values.iter().any(|v| !v.is_finite()) {
        return domain("non-finite Pauli expectation");
    }
    let mut m = ComplexMatrix::identity(4);
    for (k, &v) in values.iter().enumerate() {
        let (i, j) = ((k + 1) / 4, (k + 1) % 4);
        m = m + &kron(&pauli(i), &pauli(j))?.scale(v);
    }
    DensityOperator::new(m.scale(0.25))
}
