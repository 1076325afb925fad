//! Brute-force reference values computed without the library: states are
//! built from Pauli sums, spectra come from closed-form 2×2 formulas or a
//! Jacobi sweep, and the optimum is the plain maximum over a dense grid.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C;

pub type M4 = [[C; 4]; 4];
pub type M2 = [[C; 2]; 2];

pub const ORACLE_THETA: usize = 721;
pub const ORACLE_PHI: usize = 1441;

fn pauli(i: usize) -> M2 {
    let (o, z, im) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match i {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -im], [im, z]],
        _ => [[o, z], [z, -o]],
    }
}

fn kron2(a: &M2, b: &M2) -> M4 {
    let mut m = [[C::default(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    m
}

/// `(I⊗I + Σ c_i σ_i⊗σ_i) / 4`.
pub fn bell_diagonal(c: [f64; 3]) -> M4 {
    let mut m = kron2(&pauli(0), &pauli(0));
    for (k, ck) in c.iter().enumerate() {
        let t = kron2(&pauli(k + 1), &pauli(k + 1));
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += t[i][j] * *ck;
            }
        }
    }
    m.map(|r| r.map(|v| v / 4.0))
}

/// Werner state `(1−z) I/4 + z |ψ⁻⟩⟨ψ⁻|`, i.e. Bell-diagonal with `c = (−z, −z, −z)`.
pub fn werner(z: f64) -> M4 {
    bell_diagonal([-z, -z, -z])
}

fn h(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&l| l > 1e-12).map(|&l| -l * l.log2()).sum()
}

fn eig2(m: &M2) -> [f64; 2] {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let r = (((a - d) / 2.0).powi(2) + m[0][1].norm_sqr()).sqrt();
    [(a + d) / 2.0 + r, (a + d) / 2.0 - r]
}

/// Eigenvalues of a 4×4 Hermitian matrix via the real 8×8 symmetric
/// embedding `[[Re, −Im], [Im, Re]]` and cyclic Jacobi; each eigenvalue
/// appears twice there.
pub fn eig4(m: &M4) -> [f64; 4] {
    let mut a = [[0.0f64; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = m[i][j].re;
            a[i + 4][j + 4] = m[i][j].re;
            a[i][j + 4] = -m[i][j].im;
            a[i + 4][j] = m[i][j].im;
        }
    }
    for _ in 0..50 {
        let off: f64 = (0..8).flat_map(|i| (0..8).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..8 {
            for q in p + 1..8 {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..8 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..8 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..8).map(|i| a[i][i]).collect();
    d.sort_by(|x, y| y.partial_cmp(x).unwrap());
    [d[0], d[2], d[4], d[6]]
}

fn trace_b(m: &M4) -> M2 {
    let mut r = [[C::default(); 2]; 2];
    for a in 0..2 {
        for ap in 0..2 {
            r[a][ap] = m[2 * a][2 * ap] + m[2 * a + 1][2 * ap + 1];
        }
    }
    r
}

fn trace_a(m: &M4) -> M2 {
    let mut r = [[C::default(); 2]; 2];
    for b in 0..2 {
        for bp in 0..2 {
            r[b][bp] = m[b][bp] + m[2 + b][2 + bp];
        }
    }
    r
}

pub fn mutual_information(rho: &M4) -> f64 {
    h(&eig2(&trace_b(rho))) + h(&eig2(&trace_a(rho))) - h(&eig4(rho))
}

/// `|ψ₁⟩, |ψ₂⟩` of the measurement direction.
fn basis(theta: f64, phi: f64) -> ([C; 2], [C; 2]) {
    let e = C::from_polar(1.0, phi);
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    ([C::new(c, 0.0), e * s], [C::new(-s, 0.0), e * c])
}

/// `K = w₁|ψ₁⟩⟨ψ₁| + w₂|ψ₂⟩⟨ψ₂|`.
fn op(psi1: &[C; 2], psi2: &[C; 2], w1: f64, w2: f64) -> M2 {
    let mut k = [[C::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            k[i][j] = psi1[i] * psi1[j].conj() * w1 + psi2[i] * psi2[j].conj() * w2;
        }
    }
    k
}

/// `(I⊗K) ρ (I⊗K)†` by explicit index contraction.
fn apply_b(rho: &M4, k: &M2) -> M4 {
    let mut out = [[C::default(); 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    let mut s = C::default();
                    for c in 0..2 {
                        for cp in 0..2 {
                            s += k[b][c] * rho[2 * a + c][2 * ap + cp] * k[bp][cp].conj();
                        }
                    }
                    out[2 * a + b][2 * ap + bp] = s;
                }
            }
        }
    }
    out
}

fn conditional_entropy(rho: &M4, ops: &[M2; 2]) -> f64 {
    ops.iter()
        .map(|k| {
            let branch = trace_b(&apply_b(rho, k));
            let p = branch[0][0].re + branch[1][1].re;
            if p <= 1e-14 {
                0.0
            } else {
                p * h(&eig2(&branch.map(|r| r.map(|v| v / p))))
            }
        })
        .sum()
}

fn weights(x: Option<f64>) -> (f64, f64) {
    match x {
        None => (1.0, 0.0),
        Some(x) => (((1.0 - x.tanh()) / 2.0).sqrt(), ((1.0 + x.tanh()) / 2.0).sqrt()),
    }
}

fn ops_at(theta: f64, phi: f64, x: Option<f64>) -> [M2; 2] {
    let (p1, p2) = basis(theta, phi);
    let (a, b) = weights(x);
    // projective: Π₁, Π₂; weak: aΠ₁ + bΠ₂, bΠ₁ + aΠ₂
    match x {
        None => [op(&p1, &p2, 1.0, 0.0), op(&p1, &p2, 0.0, 1.0)],
        Some(_) => [op(&p1, &p2, a, b), op(&p1, &p2, b, a)],
    }
}

/// `J` (or `J_x`) at one direction.
pub fn classical_correlation(rho: &M4, theta: f64, phi: f64, x: Option<f64>) -> f64 {
    h(&eig2(&trace_b(rho))) - conditional_entropy(rho, &ops_at(theta, phi, x))
}

/// `I` of the non-selective post-measurement state at one direction.
pub fn post_mutual_information(rho: &M4, theta: f64, phi: f64, x: Option<f64>) -> f64 {
    let [k1, k2] = ops_at(theta, phi, x);
    let (r1, r2) = (apply_b(rho, &k1), apply_b(rho, &k2));
    let mut post = r1;
    for i in 0..4 {
        for j in 0..4 {
            post[i][j] += r2[i][j];
        }
    }
    mutual_information(&post)
}

/// Maximum of `f` over the full oracle grid (θ inclusive of both poles).
pub fn grid_max(f: impl Fn(f64, f64) -> f64) -> f64 {
    grid_max_sized(ORACLE_THETA, ORACLE_PHI, f)
}

pub fn grid_max_sized(n_theta: usize, n_phi: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..n_theta {
        let theta = PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            best = best.max(f(theta, TAU * j as f64 / n_phi as f64));
        }
    }
    best
}

/// QD by the conditional-entropy route.
pub fn oracle_qd(rho: &M4) -> f64 {
    mutual_information(rho) - grid_max(|t, p| classical_correlation(rho, t, p, None))
}

pub fn oracle_sqd(rho: &M4, x: f64) -> f64 {
    mutual_information(rho) - grid_max(|t, p| classical_correlation(rho, t, p, Some(x)))
}

pub fn oracle_wqd(rho: &M4, x: f64) -> f64 {
    mutual_information(rho) - grid_max(|t, p| post_mutual_information(rho, t, p, Some(x)))
}
