//! Seeded random states and unitaries for the verification suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qmath::{c, ComplexMatrix, C64};
use crate::states::{bell_diagonal, BellDiagonalParams, DensityOperator};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// Full-rank mixed state `G G† / Tr(G G†)` from a Ginibre matrix `G`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = ginibre(rng, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = ComplexMatrix::from_dmatrix(m / c(tr, 0.0)).expect("finite Ginibre sample");
    DensityOperator::new(m).expect("Ginibre states are valid")
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c(1.0, 0.0)
            }
        } else {
            C64::default()
        }
    });
    ComplexMatrix::from_dmatrix(q * phases).expect("finite unitary")
}

/// Uniformly sampled physical Bell-diagonal triple (rejection from the cube).
pub fn random_bell_diagonal_params<R: Rng + ?Sized>(rng: &mut R) -> BellDiagonalParams {
    loop {
        let c1 = rng.random_range(-1.0..=1.0);
        let c2 = rng.random_range(-1.0..=1.0);
        let c3 = rng.random_range(-1.0..=1.0);
        if let Ok(p) = BellDiagonalParams::new(c1, c2, c3) {
            return p;
        }
    }
}

pub fn random_bell_diagonal<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    bell_diagonal(random_bell_diagonal_params(rng)).expect("sampled triple is physical")
}
