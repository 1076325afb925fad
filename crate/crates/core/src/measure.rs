//! Projective and weak two-outcome measurements on subsystem B of a
//! two-qubit state.
//!
//! Subsystem A is the first tensor factor and B the second, so every
//! measurement operator `K` acts on the pair as `I ⊗ K`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain, Error, Result};
use crate::qmath::{c, kron, partial_trace, von_neumann_entropy, ComplexMatrix, C64};
use crate::states::DensityOperator;

/// Largest accepted weak-measurement strength. Beyond this `tanh x` is 1 to
/// machine precision; use the projective measurement instead.
pub const X_MAX: f64 = 30.0;

/// Outcomes with probability at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Bloch-sphere direction `(θ, φ)` of a projective measurement on B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBasis")]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

#[derive(Deserialize)]
struct RawBasis {
    theta: f64,
    phi: f64,
}

impl TryFrom<RawBasis> for MeasurementBasis {
    type Error = Error;

    fn try_from(raw: RawBasis) -> Result<Self> {
        MeasurementBasis::new(raw.theta, raw.phi)
    }
}

impl MeasurementBasis {
    /// `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return domain(format!("theta = {theta} outside [0, pi]"));
        }
        if !phi.is_finite() || !(0.0..TAU).contains(&phi) {
            return domain(format!("phi = {phi} outside [0, 2pi)"));
        }
        Ok(Self { theta, phi })
    }

    /// Clamps `θ` into `[0, π]` and wraps `φ` into `[0, 2π)`.
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    /// Computational basis, `(θ, φ) = (0, 0)`.
    pub fn z() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// `(θ, φ) = (π, π)`.
    pub fn pi_pi() -> Self {
        Self { theta: PI, phi: PI }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `|ψ₁⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and
    /// `|ψ₂⟩ = −sin(θ/2)|0⟩ + e^{iφ} cos(θ/2)|1⟩`.
    pub fn vectors(&self) -> ([C64; 2], [C64; 2]) {
        let (s, co) = (self.theta / 2.0).sin_cos();
        let phase = C64::from_polar(1.0, self.phi);
        ([c(co, 0.0), phase * s], [c(-s, 0.0), phase * co])
    }

    /// Unitary whose columns are `|ψ₂⟩, |ψ₁⟩`: it maps `|0⟩⟨0|` to Π₂ and
    /// `|1⟩⟨1|` to Π₁, so a z-basis operation conjugated by it acts in this basis.
    pub fn frame(&self) -> ComplexMatrix {
        let (psi1, psi2) = self.vectors();
        ComplexMatrix::from_row_major(2, 2, &[psi2[0], psi1[0], psi2[1], psi1[1]])
            .expect("2x2 frame")
    }
}

/// `(Π₁, Π₂)` for the basis.
pub fn projectors(basis: MeasurementBasis) -> (ComplexMatrix, ComplexMatrix) {
    let (psi1, psi2) = basis.vectors();
    (ComplexMatrix::outer(&psi1), ComplexMatrix::outer(&psi2))
}

/// Square-root weights `(√((1 − tanh x)/2), √((1 + tanh x)/2))`, evaluated
/// as `1/√(1 + e^{±2x})` so the small weight keeps full relative precision.
pub fn weak_weights(x: f64) -> (f64, f64) {
    let small = (1.0 / (1.0 + (2.0 * x).exp())).sqrt();
    let large = (1.0 / (1.0 + (-2.0 * x).exp())).sqrt();
    (small, large)
}

pub(crate) fn check_strength(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return domain(format!("measurement strength x = {x} must be finite and >= 0"));
    }
    if x > X_MAX {
        return domain(format!("measurement strength x = {x} exceeds {X_MAX}; use a projective measurement"));
    }
    Ok(())
}

/// Two-outcome weak POVM `P(±x)` in a given basis.
#[derive(Clone, Debug)]
pub struct WeakPovm {
    x: f64,
    basis: MeasurementBasis,
    p_plus: ComplexMatrix,
    p_minus: ComplexMatrix,
}

impl WeakPovm {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn basis(&self) -> MeasurementBasis {
        self.basis
    }

    /// `P(x)`.
    pub fn p_plus(&self) -> &ComplexMatrix {
        &self.p_plus
    }

    /// `P(−x)`.
    pub fn p_minus(&self) -> &ComplexMatrix {
        &self.p_minus
    }

    /// `‖P(x)†P(x) + P(−x)†P(−x) − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = &(self.p_plus.adjoint() * &self.p_plus) + &(self.p_minus.adjoint() * &self.p_minus);
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }
}

/// `P(x) = √((1−tanh x)/2) Π₁ + √((1+tanh x)/2) Π₂` and `P(−x)` with the
/// weights swapped. As `x → ∞`, `P(x) → Π₂` and `P(−x) → Π₁`.
pub fn weak_povm(basis: MeasurementBasis, x: f64) -> Result<WeakPovm> {
    check_strength(x)?;
    let (pi1, pi2) = projectors(basis);
    let (small, large) = weak_weights(x);
    Ok(WeakPovm {
        x,
        basis,
        p_plus: &pi1.scale(small) + &pi2.scale(large),
        p_minus: &pi1.scale(large) + &pi2.scale(small),
    })
}

/// Probability and conditional state of A for one outcome.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub conditional_state: DensityOperator,
}

impl MeasurementOutcome {
    /// From the unnormalized branch `(I⊗K)ρ(I⊗K)†`.
    pub(crate) fn from_branch(branch: &ComplexMatrix) -> Result<Self> {
        let p = branch.trace().re.max(0.0);
        if p <= ZERO_PROBABILITY {
            return Ok(Self {
                probability: p,
                conditional_state: DensityOperator::maximally_mixed(2)?,
            });
        }
        let reduced = partial_trace(branch, &[2, 2], &[0])?;
        Ok(Self {
            probability: p,
            conditional_state: DensityOperator::from_unnormalized(&reduced)?,
        })
    }
}

/// Result of measuring B: both outcomes and the non-selective post state.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    pub outcomes: [MeasurementOutcome; 2],
    pub post_state: DensityOperator,
}

/// `Σ_j p_j S(ρ_{A|j})`, impossible outcomes contributing zero.
pub fn conditional_entropy(outcomes: &[MeasurementOutcome]) -> Result<f64> {
    let mut total = 0.0;
    for o in outcomes {
        if o.probability > ZERO_PROBABILITY {
            total += o.probability * von_neumann_entropy(&o.conditional_state)?;
        }
    }
    Ok(total.max(0.0))
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return dimension(format!("measurement on B needs a two-qubit state, got dim {}", rho.dim()));
    }
    Ok(())
}

/// `(I⊗K) ρ (I⊗K)†` for each operator.
pub(crate) fn branches(rho: &DensityOperator, ops: [&ComplexMatrix; 2]) -> Result<[ComplexMatrix; 2]> {
    require_two_qubits(rho)?;
    let id = ComplexMatrix::identity(2);
    let lift = |k: &ComplexMatrix| -> Result<ComplexMatrix> { Ok(kron(&id, k)?.sandwich(rho.matrix())) };
    Ok([lift(ops[0])?, lift(ops[1])?])
}

pub(crate) fn outcomes_of(branches: &[ComplexMatrix; 2]) -> Result<[MeasurementOutcome; 2]> {
    Ok([
        MeasurementOutcome::from_branch(&branches[0])?,
        MeasurementOutcome::from_branch(&branches[1])?,
    ])
}

fn record_of(branches: [ComplexMatrix; 2]) -> Result<MeasurementRecord> {
    let outcomes = outcomes_of(&branches)?;
    let post_state = DensityOperator::new(&branches[0] + &branches[1])?;
    Ok(MeasurementRecord { outcomes, post_state })
}

/// Projective measurement `{Π₁, Π₂}` on B. Outcomes are ordered `[Π₁, Π₂]`.
pub fn measure_b_projective(rho: &DensityOperator, basis: MeasurementBasis) -> Result<MeasurementRecord> {
    let (pi1, pi2) = projectors(basis);
    record_of(branches(rho, [&pi1, &pi2])?)
}

/// Weak measurement on B. Outcomes are ordered `[P(x), P(−x)]`.
pub fn measure_b_weak(rho: &DensityOperator, povm: &WeakPovm) -> Result<MeasurementRecord> {
    record_of(branches(rho, [&povm.p_plus, &povm.p_minus])?)
}

/// `S(ρ_{A|B}) = Σ_j p_j S(ρ_{A|Π_j})`.
pub fn conditional_entropy_projective(rho: &DensityOperator, basis: MeasurementBasis) -> Result<f64> {
    let (pi1, pi2) = projectors(basis);
    conditional_entropy(&outcomes_of(&branches(rho, [&pi1, &pi2])?)?)
}

/// `S_x(ρ_{A|B}) = p(x) S(ρ_{A|P(x)}) + p(−x) S(ρ_{A|P(−x)})`.
pub fn conditional_entropy_weak(rho: &DensityOperator, povm: &WeakPovm) -> Result<f64> {
    conditional_entropy(&outcomes_of(&branches(rho, [&povm.p_plus, &povm.p_minus])?)?)
}

/// Projective or weak strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strength {
    Weak(f64),
    Projective,
}

/// A way of physically realizing a measurement of B.
///
/// Implementations must order outcomes as `[Π₁, Π₂]` for projective and
/// `[P(x), P(−x)]` for weak strengths.
pub trait MeasurementModel: Sync {
    fn name(&self) -> &'static str;

    fn branches(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[ComplexMatrix; 2]>;

    fn outcomes(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[MeasurementOutcome; 2]> {
        outcomes_of(&self.branches(rho, basis, strength)?)
    }

    /// Non-selective post-measurement state.
    fn post_state(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<DensityOperator> {
        let [a, b] = self.branches(rho, basis, strength)?;
        DensityOperator::new(&a + &b)
    }

    fn measure(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<MeasurementRecord> {
        record_of(self.branches(rho, basis, strength)?)
    }
}

/// Applies the measurement operators directly.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectPovm;

impl MeasurementModel for DirectPovm {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn branches(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[ComplexMatrix; 2]> {
        match strength {
            Strength::Projective => {
                let (pi1, pi2) = projectors(basis);
                branches(rho, [&pi1, &pi2])
            }
            Strength::Weak(x) => {
                let povm = weak_povm(basis, x)?;
                branches(rho, [&povm.p_plus, &povm.p_minus])
            }
        }
    }
}
