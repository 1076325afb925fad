//! Phase-damping channel, its correspondence with weak-measurement strength,
//! and its realization as a unitary circuit on an ancilla-extended register.
//!
//! The PD channel with strength `λ` multiplies single-qubit coherences by
//! `√(1−λ)`; a weak measurement of strength `x` multiplies them by `sech x`.
//! The two coincide when `λ = 1 − sech²x = tanh²x`.
//!
//! The dilation uses one ancilla prepended as the leftmost qubit, prepared in
//! `|0⟩`. The circuit is `V` on the ancilla, an ancilla-controlled `U₁` on the
//! target (`U₀` when the ancilla is `|0⟩`), then `W` on the ancilla. The
//! ancilla block `k` of the result holds `E_k ρ E_k†` with
//! `E_k = Σ_i W_ki V_i0 U_i`.

use crate::error::{dimension, domain, Result};
use crate::qmath::{embed_single_qubit, kron, pauli, qubit_count, ComplexMatrix};
use crate::states::DensityOperator;

/// Trace-preservation tolerance for Kraus sets and unitarity of gates.
pub const CHANNEL_TOL: f64 = 1e-12;

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return domain(format!("channel strength lambda = {lambda} outside [0, 1]"));
    }
    Ok(())
}

/// `λ = 1 − sech²x`, evaluated as `tanh²x`.
pub fn lambda_from_x(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return domain(format!("measurement strength x = {x} must be finite and >= 0"));
    }
    let t = x.tanh();
    Ok(t * t)
}

/// Inverse of [`lambda_from_x`]: `x = artanh √λ`.
pub fn x_from_lambda(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || !(0.0..1.0).contains(&lambda) {
        return domain(format!("lambda = {lambda} outside [0, 1)"));
    }
    Ok(lambda.sqrt().atanh())
}

/// Shaded-pulse rotation angle `−2 asin √((1 − √(1−λ))/2)` that sets `V`.
pub fn rotation_angle_from_lambda(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = (1.0 - lambda).sqrt();
    Ok(-2.0 * ((1.0 - s) / 2.0).sqrt().asin())
}

/// Finite set of Kraus operators on a common space.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    label: String,
}

impl KrausChannel {
    /// Validates shapes and trace preservation `Σ E_k†E_k = I`.
    pub fn new(kraus_ops: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let Some(first) = kraus_ops.first() else {
            return dimension("a channel needs at least one Kraus operator");
        };
        let n = first.rows();
        if kraus_ops.iter().any(|k| !k.is_square() || k.rows() != n) {
            return dimension("Kraus operators must be square and share one size");
        }
        let ch = Self { kraus_ops, label: label.into() };
        let defect = ch.trace_preservation_defect();
        if defect > CHANNEL_TOL {
            return domain(format!("Kraus set '{}' is not trace preserving (defect {defect:e})", ch.label));
        }
        Ok(ch)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].rows()
    }

    /// `‖Σ E_k†E_k − I‖_max`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(n), |acc, k| acc + &(k.adjoint() * k));
        sum.max_abs_diff(&ComplexMatrix::identity(n))
    }
}

/// `E₀ = ((1+√(1−λ))/2) I + ((1−√(1−λ))/2) σ₃`, `E₁ = (√λ/2)(I − σ₃)`.
pub fn phase_damping_kraus(lambda: f64) -> Result<KrausChannel> {
    check_lambda(lambda)?;
    let s = (1.0 - lambda).sqrt();
    let (id, z) = (pauli(0), pauli(3));
    let e0 = &id.scale((1.0 + s) / 2.0) + &z.scale((1.0 - s) / 2.0);
    let e1 = (&id - &z).scale(lambda.sqrt() / 2.0);
    KrausChannel::new(vec![e0, e1], format!("phase damping (lambda = {lambda})"))
}

/// `Σ_k E_k ρ E_k†` with each `E_k` acting on `target_qubit`.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityOperator, target_qubit: usize) -> Result<DensityOperator> {
    DensityOperator::new(apply_channel_matrix(channel, rho.matrix(), target_qubit)?)
}

pub fn apply_channel_matrix(channel: &KrausChannel, rho: &ComplexMatrix, target_qubit: usize) -> Result<ComplexMatrix> {
    if channel.dim() != 2 {
        return dimension("only single-qubit channels can be applied to a register");
    }
    let n = qubit_count(rho.rows())?;
    channel.kraus_ops.iter().try_fold(ComplexMatrix::zeros(rho.rows()), |acc, k| {
        Ok(acc + &embed_single_qubit(k, target_qubit, n)?.sandwich(rho))
    })
}

/// Gates of the ancilla dilation.
#[derive(Clone, Debug)]
pub struct DilationGates {
    pub v: ComplexMatrix,
    pub w: ComplexMatrix,
    pub u0: ComplexMatrix,
    pub u1: ComplexMatrix,
}

fn dilation_rotation(lambda: f64, prefactor: f64) -> ComplexMatrix {
    let s = (1.0 - lambda).sqrt();
    let a = ((1.0 + s) / 2.0).sqrt();
    let b = ((1.0 - s) / 2.0).sqrt();
    ComplexMatrix::from_real_rows(&[&[a, b], &[b, -a]])
        .expect("2x2")
        .scale(prefactor)
}

impl DilationGates {
    /// The gates with the overall ½ prefactor kept on `V = W`. That matrix is
    /// not unitary and the circuit then fails to realize the PD channel; kept
    /// only to exercise the verification suites against a known-bad circuit.
    pub fn with_half_prefactor(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let v = dilation_rotation(lambda, 0.5);
        Ok(Self { w: v.clone(), v, u0: pauli(0), u1: pauli(3) })
    }

    /// Largest unitarity defect among the four gates.
    pub fn unitarity_defect(&self) -> f64 {
        [&self.v, &self.w, &self.u0, &self.u1]
            .iter()
            .map(|g| g.unitarity_defect())
            .fold(0.0, f64::max)
    }

    /// `E_k = Σ_i W_ki V_i0 U_i` for `k = 0, 1`.
    pub fn kraus_reconstruction(&self) -> [ComplexMatrix; 2] {
        let us = [&self.u0, &self.u1];
        std::array::from_fn(|k| {
            (0..2).fold(ComplexMatrix::zeros(2), |acc, i| {
                acc + &us[i].scale_complex(self.w[(k, i)] * self.v[(i, 0)])
            })
        })
    }
}

/// `U₀ = I`, `U₁ = σ₃`, and
/// `V = W = [[√((1+√(1−λ))/2), √((1−√(1−λ))/2)], [√((1−√(1−λ))/2), −√((1+√(1−λ))/2)]]`.
pub fn dilation_gates(lambda: f64) -> Result<DilationGates> {
    check_lambda(lambda)?;
    let v = dilation_rotation(lambda, 1.0);
    let gates = DilationGates { w: v.clone(), v, u0: pauli(0), u1: pauli(3) };
    let defect = gates.unitarity_defect();
    if defect > CHANNEL_TOL {
        return domain(format!("dilation gates are not unitary (defect {defect:e})"));
    }
    Ok(gates)
}

/// Unitary on the ancilla that turns the PD Kraus pair `(E₀, E₁)` into the
/// z-basis weak POVM pair `(P(x), P(−x)) = (diag(b, a), diag(a, b))`, where
/// `a = √((1−√λ)/2)`, `b = √((1+√λ)/2)`:
/// `P(x) = b E₀ − a E₁`, `P(−x) = a E₀ + b E₁`.
pub fn weak_readout(lambda: f64) -> Result<ComplexMatrix> {
    check_lambda(lambda)?;
    let t = lambda.sqrt();
    let a = ((1.0 - t) / 2.0).sqrt();
    let b = ((1.0 + t) / 2.0).sqrt();
    Ok(ComplexMatrix::from_real_rows(&[&[b, -a], &[a, b]]).expect("2x2"))
}

/// Runs the dilation circuit on `|0⟩⟨0| ⊗ ρ` and returns the two ancilla
/// diagonal blocks, optionally after a final `readout` unitary on the ancilla.
///
/// The blocks are the unnormalized system states conditioned on the ancilla
/// reading `|0⟩` and `|1⟩`; their sum is the reduced state after the ancilla
/// is traced out. No validation is performed on the result.
pub fn dilation_blocks(
    gates: &DilationGates,
    rho: &ComplexMatrix,
    target_qubit: usize,
    readout: Option<&ComplexMatrix>,
) -> Result<[ComplexMatrix; 2]> {
    if rho.rows() != 4 || !rho.is_square() {
        return dimension("the dilation circuit acts on two-qubit states");
    }
    if target_qubit >= 2 {
        return dimension(format!("target qubit {target_qubit} out of range for 2 qubits"));
    }
    let ancilla_0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
    let ancilla_1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);

    let v = embed_single_qubit(&gates.v, 0, 3)?;
    let w = embed_single_qubit(&gates.w, 0, 3)?;
    let controlled = kron(&ancilla_0, &embed_single_qubit(&gates.u0, target_qubit, 2)?)?
        + &kron(&ancilla_1, &embed_single_qubit(&gates.u1, target_qubit, 2)?)?;

    let mut circuit = &w * &(&controlled * &v);
    if let Some(r) = readout {
        circuit = &embed_single_qubit(r, 0, 3)? * &circuit;
    }
    let initial = kron(&ancilla_0, rho)?;
    let out = circuit.sandwich(&initial);

    let block = |k: usize| -> ComplexMatrix {
        let m = out.as_dmatrix().view((4 * k, 4 * k), (4, 4)).into_owned();
        ComplexMatrix::from_dmatrix_unchecked(m)
    };
    Ok([block(0), block(1)])
}

/// Reduced two-qubit state after the dilation circuit, without validation.
pub fn dilation_output(gates: &DilationGates, rho: &ComplexMatrix, target_qubit: usize) -> Result<ComplexMatrix> {
    let [a, b] = dilation_blocks(gates, rho, target_qubit, None)?;
    Ok(&a + &b)
}

/// PD channel of strength `λ` on `target_qubit`, realized by the dilation
/// circuit and tracing out the ancilla.
pub fn apply_via_dilation(lambda: f64, rho: &DensityOperator, target_qubit: usize) -> Result<DensityOperator> {
    let gates = dilation_gates(lambda)?;
    DensityOperator::new(dilation_output(&gates, rho.matrix(), target_qubit)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::trace_distance;
    use crate::sample::{random_state, seeded_rng};
    use crate::states::{bell_diagonal_preset, bloch_state, werner_preset, BlochVector};

    #[test]
    fn lambda_mapping_examples() {
        assert_eq!(lambda_from_x(0.0).unwrap(), 0.0);
        let l = lambda_from_x(1.2).unwrap();
        assert!((l - (1.0 - 1.0 / 1.2f64.cosh().powi(2))).abs() < 1e-15);
        assert!((l - 0.69498).abs() < 5e-6);
        assert!((lambda_from_x(30.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(lambda_from_x(-1.0).is_err());

        assert_eq!(x_from_lambda(0.0).unwrap(), 0.0);
        assert!((x_from_lambda(0.69499).unwrap() - 1.2).abs() < 1e-4);
        assert!((x_from_lambda(0.75).unwrap() - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-14);
        assert!(x_from_lambda(1.0).is_err());
        assert!(x_from_lambda(-0.1).is_err());
    }

    #[test]
    fn kraus_endpoints() {
        let k0 = phase_damping_kraus(0.0).unwrap();
        assert!(k0.kraus_ops()[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(k0.kraus_ops()[1].max_abs() == 0.0);
        let k1 = phase_damping_kraus(1.0).unwrap();
        assert!(k1.kraus_ops()[0].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        assert!(k1.kraus_ops()[1].max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-15);
        assert!(phase_damping_kraus(1.5).is_err());
    }

    #[test]
    fn kraus_trace_preservation_grid() {
        for i in 0..=100 {
            let ch = phase_damping_kraus(i as f64 / 100.0).unwrap();
            assert!(ch.trace_preservation_defect() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_trace_preserving_set() {
        let bad = vec![ComplexMatrix::identity(2).scale(0.9)];
        assert!(KrausChannel::new(bad, "shrink").is_err());
    }

    #[test]
    fn channel_scales_coherence() {
        let rho = bloch_state(BlochVector::new(0.6, -0.3, 0.2).unwrap()).unwrap();
        for lambda in [0.0, 0.3, 0.695, 1.0] {
            let out = apply_channel(&phase_damping_kraus(lambda).unwrap(), &rho, 0).unwrap();
            let s = (1.0 - lambda).sqrt();
            assert!((out.matrix()[(0, 1)] - rho.matrix()[(0, 1)] * s).norm() < 1e-15);
            assert!((out.matrix()[(1, 1)] - rho.matrix()[(1, 1)]).norm() < 1e-15);
        }
    }

    #[test]
    fn channel_target_out_of_range() {
        let ch = phase_damping_kraus(0.5).unwrap();
        assert!(matches!(apply_channel(&ch, &werner_preset(), 2), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn dilation_gate_examples() {
        let g0 = dilation_gates(0.0).unwrap();
        assert!(g0.v.max_abs_diff(&pauli(3)) < 1e-15);
        let [e0, e1] = g0.kraus_reconstruction();
        assert!(e0.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15 && e1.max_abs() < 1e-15);

        let g1 = dilation_gates(1.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]).unwrap();
        assert!(g1.v.max_abs_diff(&expect) < 1e-15);

        for lambda in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let g = dilation_gates(lambda).unwrap();
            assert!(g.unitarity_defect() <= 1e-12);
            let rebuilt = g.kraus_reconstruction();
            let kraus = phase_damping_kraus(lambda).unwrap();
            for (r, k) in rebuilt.iter().zip(kraus.kraus_ops()) {
                assert!(r.max_abs_diff(k) <= 1e-12, "lambda {lambda}");
            }
        }
    }

    #[test]
    fn half_prefactor_breaks_reconstruction() {
        let g = DilationGates::with_half_prefactor(0.5).unwrap();
        assert!(g.unitarity_defect() > 0.5);
        let rebuilt = g.kraus_reconstruction();
        let kraus = phase_damping_kraus(0.5).unwrap();
        assert!(rebuilt[0].max_abs_diff(&kraus.kraus_ops()[0]) > 0.1);
    }

    #[test]
    fn dilation_matches_kraus() {
        let ch = phase_damping_kraus(0.695).unwrap();
        let bd = bell_diagonal_preset();
        let via_kraus = apply_channel(&ch, &bd, 1).unwrap();
        let via_dilation = apply_via_dilation(0.695, &bd, 1).unwrap();
        assert!(trace_distance(&via_kraus, &via_dilation).unwrap() <= 1e-12);

        let w = werner_preset();
        for lambda in [0.0, 0.25, 0.5, 0.75, 0.99] {
            let a = apply_channel(&phase_damping_kraus(lambda).unwrap(), &w, 1).unwrap();
            let b = apply_via_dilation(lambda, &w, 1).unwrap();
            assert!(trace_distance(&a, &b).unwrap() <= 1e-12);
        }
        let id = apply_via_dilation(0.0, &w, 0).unwrap();
        assert!(id.matrix().max_abs_diff(w.matrix()) < 1e-15);
    }

    #[test]
    fn readout_mixes_kraus_into_weak_pair() {
        for x in [0.0, 0.4, 1.2, 3.0] {
            let lambda = lambda_from_x(x).unwrap();
            let u = weak_readout(lambda).unwrap();
            assert!(u.is_unitary(1e-14));
            let kraus = phase_damping_kraus(lambda).unwrap();
            let [e0, e1] = [&kraus.kraus_ops()[0], &kraus.kraus_ops()[1]];
            let p_plus = &e0.scale_complex(u[(0, 0)]) + &e1.scale_complex(u[(0, 1)]);
            let t = x.tanh();
            let (lo, hi) = (((1.0 - t) / 2.0).sqrt(), ((1.0 + t) / 2.0).sqrt());
            assert!(p_plus.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[hi, lo])) < 1e-12);
        }
    }

    #[test]
    fn rotation_angle_examples() {
        assert_eq!(rotation_angle_from_lambda(0.0).unwrap(), 0.0);
        let pi = std::f64::consts::PI;
        assert!((rotation_angle_from_lambda(1.0).unwrap() + pi / 2.0).abs() < 1e-15);
        assert!((rotation_angle_from_lambda(0.75).unwrap() + pi / 3.0).abs() < 1e-15);
        assert!(rotation_angle_from_lambda(-0.2).is_err());
    }

    #[test]
    fn composition_multiplies_coherence_factors() {
        let rho = bloch_state(BlochVector::new(0.3, 0.5, -0.4).unwrap()).unwrap();
        for (l1, l2) in [(0.2, 0.5), (0.9, 0.1), (0.0, 0.7)] {
            let step = apply_channel(&phase_damping_kraus(l1).unwrap(), &rho, 0).unwrap();
            let twice = apply_channel(&phase_damping_kraus(l2).unwrap(), &step, 0).unwrap();
            let once = apply_channel(&phase_damping_kraus(1.0 - (1.0 - l1) * (1.0 - l2)).unwrap(), &rho, 0).unwrap();
            assert!(twice.matrix().max_abs_diff(once.matrix()) < 1e-12);
        }
    }

    #[test]
    fn channel_on_three_qubit_state() {
        let mut rng = seeded_rng(3);
        let rho = random_state(&mut rng, 8);
        let out = apply_channel(&phase_damping_kraus(1.0).unwrap(), &rho, 2).unwrap();
        // full dephasing of qubit 2 kills every element whose last bit differs
        for i in 0..8 {
            for j in 0..8 {
                let z = out.matrix()[(i, j)];
                if (i ^ j) & 1 == 1 {
                    assert!(z.norm() < 1e-15);
                } else {
                    assert!((z - rho.matrix()[(i, j)]).norm() < 1e-15);
                }
            }
        }
    }
}
