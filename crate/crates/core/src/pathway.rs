//! Three physical realizations of the same measurement on qubit B.
//!
//! * `DirectPovm` applies `P(±x)` (or `Π₁, Π₂`) directly.
//! * `KrausChannel` uses the phase-damping Kraus pair with `λ = tanh²x`,
//!   recombined by [`weak_readout`] into the z-basis weak POVM.
//! * `AncillaDilation` runs the unitary dilation circuit and reads the ancilla
//!   after the same readout rotation.
//!
//! The channel pathways act in the z basis, so the state is first rotated into
//! the measurement frame `R` and the branches rotated back. Projective
//! measurement is the `λ = 1` channel. Outcome order matches the direct POVM:
//! `[P(x), P(−x)]` for weak and `[Π₁, Π₂]` for projective strength.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{
    dilation_blocks, dilation_gates, lambda_from_x, phase_damping_kraus, weak_readout, DilationGates,
};
use crate::error::{domain, Error, Result};
use crate::measure::{check_strength, DirectPovm, MeasurementBasis, MeasurementModel, Strength};
use crate::qmath::{kron, ComplexMatrix};
use crate::states::DensityOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pathway {
    DirectPovm,
    KrausChannel,
    AncillaDilation,
}

impl Pathway {
    pub const ALL: [Pathway; 3] = [Pathway::DirectPovm, Pathway::KrausChannel, Pathway::AncillaDilation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Pathway::DirectPovm => "direct",
            Pathway::KrausChannel => "kraus",
            Pathway::AncillaDilation => "dilation",
        }
    }
}

impl fmt::Display for Pathway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pathway {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" | "direct_povm" => Ok(Pathway::DirectPovm),
            "kraus" | "kraus_channel" => Ok(Pathway::KrausChannel),
            "dilation" | "ancilla_dilation" => Ok(Pathway::AncillaDilation),
            other => domain(format!("unknown pathway '{other}' (expected direct, kraus or dilation)")),
        }
    }
}

/// Channel strength realizing `strength`.
pub fn channel_lambda(strength: Strength) -> Result<f64> {
    match strength {
        Strength::Projective => Ok(1.0),
        Strength::Weak(x) => {
            check_strength(x)?;
            lambda_from_x(x)
        }
    }
}

/// `I ⊗ M` on the two-qubit register.
fn on_b(m: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(2), m).expect("4x4")
}

/// Puts z-basis branches in the requested outcome order. Block 0 of the
/// readout corresponds to `|0⟩`, which the frame maps onto `Π₂` / `P(x)`.
fn order(strength: Strength, [b0, b1]: [ComplexMatrix; 2]) -> [ComplexMatrix; 2] {
    match strength {
        Strength::Weak(_) => [b0, b1],
        Strength::Projective => [b1, b0],
    }
}

fn kraus_branches(rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[ComplexMatrix; 2]> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!("measurement on B needs a two-qubit state, got dim {}", rho.dim())));
    }
    let lambda = channel_lambda(strength)?;
    let channel = phase_damping_kraus(lambda)?;
    let [e0, e1] = [&channel.kraus_ops()[0], &channel.kraus_ops()[1]];
    let u = weak_readout(lambda)?;
    let frame = basis.frame();
    let frame_dag = frame.adjoint();
    let op = |k: usize| -> ComplexMatrix {
        let q = e0.scale_complex(u[(k, 0)]) + &e1.scale_complex(u[(k, 1)]);
        on_b(&(&frame * &(&q * &frame_dag)))
    };
    let (q0, q1) = (op(0), op(1));
    Ok(order(strength, [q0.sandwich(rho.matrix()), q1.sandwich(rho.matrix())]))
}

fn circuit_branches(
    gates: &DilationGates,
    rho: &DensityOperator,
    basis: MeasurementBasis,
    strength: Strength,
) -> Result<[ComplexMatrix; 2]> {
    let lambda = channel_lambda(strength)?;
    let frame = on_b(&basis.frame());
    let rotated = frame.adjoint().sandwich(rho.matrix());
    let [b0, b1] = dilation_blocks(gates, &rotated, 1, Some(&weak_readout(lambda)?))?;
    Ok(order(strength, [frame.sandwich(&b0), frame.sandwich(&b1)]))
}

impl MeasurementModel for Pathway {
    fn name(&self) -> &'static str {
        self.as_str()
    }

    fn branches(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[ComplexMatrix; 2]> {
        match self {
            Pathway::DirectPovm => DirectPovm.branches(rho, basis, strength),
            Pathway::KrausChannel => kraus_branches(rho, basis, strength),
            Pathway::AncillaDilation => {
                let gates = dilation_gates(channel_lambda(strength)?)?;
                circuit_branches(&gates, rho, basis, strength)
            }
        }
    }
}

/// Dilation circuit built with [`DilationGates::with_half_prefactor`]. It is a
/// deliberately broken pathway used to check that verification catches it.
#[derive(Clone, Copy, Debug, Default)]
pub struct FaultyDilation;

impl MeasurementModel for FaultyDilation {
    fn name(&self) -> &'static str {
        "dilation-half-prefactor"
    }

    fn branches(&self, rho: &DensityOperator, basis: MeasurementBasis, strength: Strength) -> Result<[ComplexMatrix; 2]> {
        let gates = DilationGates::with_half_prefactor(channel_lambda(strength)?)?;
        circuit_branches(&gates, rho, basis, strength)
    }
}
