//! Quantum discord and its two weak-measurement variants.
//!
//! * QD  = I(ρ_AB) − max J(ρ_{A|B}), cross-checked against
//!   I(ρ_AB) − max I(ρ′_AB); the two coincide for projective measurements.
//! * SQD = I(ρ_AB) − max J_x(ρ_{A|B}), conditional entropy from the weak POVM.
//! * WQD = I(ρ_AB) − max I(ρ^x_AB), mutual information after the weak POVM.
//!
//! Every maximum runs over the measurement direction `(θ, φ)` on B via
//! [`optimize_basis`], a deterministic coarse grid followed by shrinking
//! local grids. Quantities are in bits.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::measure::{
    conditional_entropy, DirectPovm, MeasurementBasis, MeasurementModel, Strength,
};
use crate::qmath::von_neumann_entropy;
use crate::states::DensityOperator;

/// Allowed disagreement between the two projective discord formulas.
pub const ROUTE_TOL: f64 = 1e-6;

/// Discord values in `[-DISCORD_CLAMP, 0)` are roundoff and reported as 0.
pub const DISCORD_CLAMP: f64 = 1e-9;

/// Objective values closer than this count as ties, so roundoff on flat
/// objectives does not decide the reported basis.
pub const TIE_TOL: f64 = 1e-13;

/// Points per axis in each refinement round.
const REFINE_POINTS: usize = 9;

/// Grid-search settings for the basis optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Points over `[0, π]`, both ends included.
    pub coarse_theta_steps: usize,
    /// Points over `[0, 2π)`.
    pub coarse_phi_steps: usize,
    pub refine_rounds: usize,
    /// Window shrink factor per refinement round.
    pub refine_shrink: f64,
    /// Largest improvement tolerated in the final round.
    pub tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            coarse_theta_steps: 61,
            coarse_phi_steps: 121,
            refine_rounds: 6,
            refine_shrink: 0.25,
            tolerance: 1e-10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_theta_steps < 3 || self.coarse_phi_steps < 3 {
            return domain("coarse grid needs at least 3 steps per axis");
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return domain(format!("refine_shrink = {} outside (0, 1)", self.refine_shrink));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return domain("optimizer tolerance must be non-negative");
        }
        Ok(())
    }
}

/// `true` when `a` should replace `b`: larger value, ties broken toward
/// smaller θ then smaller φ.
fn better(a: (MeasurementBasis, f64), b: (MeasurementBasis, f64)) -> bool {
    if (a.1 - b.1).abs() > TIE_TOL {
        return a.1 > b.1;
    }
    (a.0.theta(), a.0.phi()) < (b.0.theta(), b.0.phi())
}

fn evaluate_all<F>(objective: &F, points: &[MeasurementBasis]) -> Result<Vec<f64>>
where
    F: Fn(MeasurementBasis) -> Result<f64> + Sync,
{
    let values: Vec<f64> = points.par_iter().map(|&b| objective(b)).collect::<Result<_>>()?;
    if let Some((b, v)) = points.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
        return domain(format!(
            "objective returned {v} at theta={}, phi={}",
            b.theta(),
            b.phi()
        ));
    }
    Ok(values)
}

/// Maximizes `objective` over measurement directions.
///
/// A coarse `θ × φ` grid is scanned first; the incumbent is then refined on
/// `refine_rounds` local 9×9 grids whose half-width starts at one coarse cell
/// and shrinks by `refine_shrink` each round. An incumbent is only replaced by
/// a value larger by more than [`TIE_TOL`], so ties resolve to the smallest
/// `θ`, then `φ`.
/// If the final round still improved by more than `tolerance` and its best
/// point sat on the edge of the window (the maximum was not bracketed), a
/// [`Error::Convergence`] carrying the best point so far is returned.
pub fn optimize_basis<F>(objective: F, cfg: &OptimizerConfig) -> Result<(MeasurementBasis, f64)>
where
    F: Fn(MeasurementBasis) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let d_theta = PI / (cfg.coarse_theta_steps - 1) as f64;
    let d_phi = TAU / cfg.coarse_phi_steps as f64;

    let coarse: Vec<MeasurementBasis> = (0..cfg.coarse_theta_steps)
        .flat_map(|i| {
            let theta = (i as f64 * d_theta).min(PI);
            (0..cfg.coarse_phi_steps).map(move |j| MeasurementBasis::wrapped(theta, j as f64 * d_phi))
        })
        .collect();
    let values = evaluate_all(&objective, &coarse)?;
    let mut best = (coarse[0], values[0]);
    for (&b, &v) in coarse.iter().zip(&values).skip(1) {
        if v > best.1 + TIE_TOL {
            best = (b, v);
        }
    }

    let (mut w_theta, mut w_phi) = (d_theta, d_phi);
    let mut last_improvement = 0.0;
    let mut moved_to_edge = false;
    for _ in 0..cfg.refine_rounds {
        let (theta0, phi0) = (best.0.theta(), best.0.phi());
        let offsets: Vec<f64> = (0..REFINE_POINTS)
            .map(|k| 2.0 * k as f64 / (REFINE_POINTS - 1) as f64 - 1.0)
            .collect();
        let local: Vec<MeasurementBasis> = offsets
            .iter()
            .flat_map(|&u| {
                offsets
                    .iter()
                    .map(move |&v| MeasurementBasis::wrapped(theta0 + u * w_theta, phi0 + v * w_phi))
            })
            .collect();
        let values = evaluate_all(&objective, &local)?;
        let mut round_best = (local[0], values[0]);
        let mut round_idx = 0;
        for (k, (&b, &v)) in local.iter().zip(&values).enumerate().skip(1) {
            if better((b, v), round_best) {
                round_best = (b, v);
                round_idx = k;
            }
        }
        last_improvement = 0.0;
        moved_to_edge = false;
        if round_best.1 > best.1 + TIE_TOL {
            last_improvement = round_best.1 - best.1;
            let (iu, iv) = (round_idx / REFINE_POINTS, round_idx % REFINE_POINTS);
            let edge = REFINE_POINTS - 1;
            let theta_edge = (iu == 0 || iu == edge)
                && round_best.0.theta() > 0.0
                && round_best.0.theta() < PI;
            moved_to_edge = theta_edge || iv == 0 || iv == edge;
            best = round_best;
        }
        w_theta *= cfg.refine_shrink;
        w_phi *= cfg.refine_shrink;
    }

    if cfg.refine_rounds > 0 && last_improvement > cfg.tolerance && moved_to_edge {
        return Err(Error::Convergence {
            rounds: cfg.refine_rounds,
            last_improvement,
            best_basis: best.0,
            best_value: best.1,
        });
    }
    Ok(best)
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!(
            "discord is defined here for two-qubit states, got dim {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// `I(ρ_AB) = S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(rho: &DensityOperator) -> Result<f64> {
    require_two_qubits(rho)?;
    let (a, b) = rho.marginals()?;
    let i = von_neumann_entropy(&a)? + von_neumann_entropy(&b)? - von_neumann_entropy(rho)?;
    Ok(i.clamp(0.0, 2.0))
}

/// `J = S(ρ_A) − S(ρ_{A|B})` for a measurement on B realized by `model`.
pub fn classical_correlation_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    basis: MeasurementBasis,
    strength: Strength,
) -> Result<f64> {
    require_two_qubits(rho)?;
    let s_a = von_neumann_entropy(&rho.qubit_marginal(0)?)?;
    Ok(s_a - conditional_entropy(&model.outcomes(rho, basis, strength)?)?)
}

/// `J(ρ_{A|B})` for the projective measurement in `basis`.
pub fn classical_correlation(rho: &DensityOperator, basis: MeasurementBasis) -> Result<f64> {
    classical_correlation_with(&DirectPovm, rho, basis, Strength::Projective)
}

/// `J_x(ρ_{A|B})` for the weak POVM of strength `x` in `basis`.
pub fn weak_classical_correlation(rho: &DensityOperator, basis: MeasurementBasis, x: f64) -> Result<f64> {
    classical_correlation_with(&DirectPovm, rho, basis, Strength::Weak(x))
}

/// Mutual information of the non-selective post-measurement state.
pub fn post_measurement_mutual_information_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    basis: MeasurementBasis,
    strength: Strength,
) -> Result<f64> {
    require_two_qubits(rho)?;
    mutual_information(&model.post_state(rho, basis, strength)?)
}

/// `I(ρ′_AB)` (projective) or `I(ρ^x_AB)` (weak) with the direct POVM.
pub fn post_measurement_mutual_information(
    rho: &DensityOperator,
    basis: MeasurementBasis,
    strength: Strength,
) -> Result<f64> {
    post_measurement_mutual_information_with(&DirectPovm, rho, basis, strength)
}

/// `max_{θ,φ} J` (or `J_x`), returning the maximizing basis.
pub fn max_classical_correlation<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    strength: Strength,
    cfg: &OptimizerConfig,
) -> Result<(MeasurementBasis, f64)> {
    require_two_qubits(rho)?;
    let s_a = von_neumann_entropy(&rho.qubit_marginal(0)?)?;
    optimize_basis(
        |b| Ok(s_a - conditional_entropy(&model.outcomes(rho, b, strength)?)?),
        cfg,
    )
}

/// `max_{θ,φ} I(ρ′_AB)` (or `I(ρ^x_AB)`), returning the maximizing basis.
pub fn max_post_mutual_information<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    strength: Strength,
    cfg: &OptimizerConfig,
) -> Result<(MeasurementBasis, f64)> {
    require_two_qubits(rho)?;
    optimize_basis(|b| mutual_information(&model.post_state(rho, b, strength)?), cfg)
}

pub(crate) fn clamp_discord(v: f64) -> f64 {
    if (-DISCORD_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Correlation quantifiers for one state and (optionally) one strength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordReport {
    /// Weak strength, absent for a projective-only report.
    pub x: Option<f64>,
    pub total_mutual_info: f64,
    /// Maximized `J` (projective report) or `J_x` (weak reports).
    pub classical_corr: f64,
    /// Maximized `I(ρ′_AB)` (projective report) or `I(ρ^x_AB)` (weak reports).
    pub post_mutual_info: f64,
    pub qd: f64,
    pub sqd: Option<f64>,
    pub wqd: Option<f64>,
    /// Maximizer of `classical_corr`, or of `post_mutual_info` for a WQD-only report.
    pub opt_basis: MeasurementBasis,
    pub opt_value: f64,
    /// Maximizer of `I(ρ^x_AB)` when it differs in role from `opt_basis`.
    pub wqd_opt_basis: Option<MeasurementBasis>,
}

impl DiscordReport {
    /// Checks `WQD ≤ QD ≤ SQD` (slack 1e-6) and non-negativity of every
    /// entropic quantity (slack 1e-9).
    pub fn check_invariants(&self) -> Result<()> {
        let mut values = vec![self.total_mutual_info, self.classical_corr, self.post_mutual_info, self.qd];
        values.extend(self.sqd);
        values.extend(self.wqd);
        if let Some(v) = values.iter().find(|&&v| v < -DISCORD_CLAMP) {
            return domain(format!("negative entropic quantity {v}"));
        }
        if let Some(w) = self.wqd {
            if w > self.qd + ROUTE_TOL {
                return domain(format!("WQD {w} exceeds QD {}", self.qd));
            }
        }
        if let Some(s) = self.sqd {
            if self.qd > s + ROUTE_TOL {
                return domain(format!("QD {} exceeds SQD {s}", self.qd));
            }
        }
        Ok(())
    }
}

/// QD via both projective formulas; the routes must agree within [`ROUTE_TOL`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveDiscord {
    pub total_mutual_info: f64,
    pub max_classical: (MeasurementBasis, f64),
    pub max_post_mutual_info: (MeasurementBasis, f64),
}

impl ProjectiveDiscord {
    /// `I − max J`.
    pub fn via_classical(&self) -> f64 {
        clamp_discord(self.total_mutual_info - self.max_classical.1)
    }

    /// `I − max I(ρ′)`.
    pub fn via_post_state(&self) -> f64 {
        clamp_discord(self.total_mutual_info - self.max_post_mutual_info.1)
    }
}

/// Both projective QD routes, without the agreement check.
pub fn projective_discord_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    cfg: &OptimizerConfig,
) -> Result<ProjectiveDiscord> {
    Ok(ProjectiveDiscord {
        total_mutual_info: mutual_information(rho)?,
        max_classical: max_classical_correlation(model, rho, Strength::Projective, cfg)?,
        max_post_mutual_info: max_post_mutual_information(model, rho, Strength::Projective, cfg)?,
    })
}

fn checked_qd(p: &ProjectiveDiscord) -> Result<f64> {
    let (a, b) = (p.via_classical(), p.via_post_state());
    if (a - b).abs() > ROUTE_TOL {
        return Err(Error::RouteMismatch { via_classical: a, via_post_state: b });
    }
    Ok(a)
}

pub fn quantum_discord_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    cfg: &OptimizerConfig,
) -> Result<DiscordReport> {
    let p = projective_discord_with(model, rho, cfg)?;
    let qd = checked_qd(&p)?;
    Ok(DiscordReport {
        x: None,
        total_mutual_info: p.total_mutual_info,
        classical_corr: p.max_classical.1,
        post_mutual_info: p.max_post_mutual_info.1,
        qd,
        sqd: None,
        wqd: None,
        opt_basis: p.max_classical.0,
        opt_value: p.max_classical.1,
        wqd_opt_basis: None,
    })
}

/// Quantum discord of a two-qubit state.
pub fn quantum_discord(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<DiscordReport> {
    quantum_discord_with(&DirectPovm, rho, cfg)
}

pub fn super_quantum_discord_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    x: f64,
    cfg: &OptimizerConfig,
) -> Result<DiscordReport> {
    let qd_report = quantum_discord_with(model, rho, cfg)?;
    let strength = Strength::Weak(x);
    let (basis, jx) = max_classical_correlation(model, rho, strength, cfg)?;
    let post = post_measurement_mutual_information_with(model, rho, basis, strength)?;
    let i = qd_report.total_mutual_info;
    Ok(DiscordReport {
        x: Some(x),
        classical_corr: jx,
        post_mutual_info: post,
        sqd: Some(clamp_discord(i - jx)),
        opt_basis: basis,
        opt_value: jx,
        ..qd_report
    })
}

/// Super quantum discord at strength `x`.
pub fn super_quantum_discord(rho: &DensityOperator, x: f64, cfg: &OptimizerConfig) -> Result<DiscordReport> {
    super_quantum_discord_with(&DirectPovm, rho, x, cfg)
}

pub fn weak_quantum_discord_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    x: f64,
    cfg: &OptimizerConfig,
) -> Result<DiscordReport> {
    let qd_report = quantum_discord_with(model, rho, cfg)?;
    let strength = Strength::Weak(x);
    let (basis, ix) = max_post_mutual_information(model, rho, strength, cfg)?;
    let jx = classical_correlation_with(model, rho, basis, strength)?;
    let i = qd_report.total_mutual_info;
    Ok(DiscordReport {
        x: Some(x),
        classical_corr: jx,
        post_mutual_info: ix,
        wqd: Some(clamp_discord(i - ix)),
        opt_basis: basis,
        opt_value: ix,
        wqd_opt_basis: Some(basis),
        ..qd_report
    })
}

/// Weak quantum discord at strength `x`.
pub fn weak_quantum_discord(rho: &DensityOperator, x: f64, cfg: &OptimizerConfig) -> Result<DiscordReport> {
    weak_quantum_discord_with(&DirectPovm, rho, x, cfg)
}

/// QD, SQD and WQD together. `opt_basis` belongs to `J_x`; the WQD maximizer
/// is in `wqd_opt_basis`.
pub fn discord_report_with<M: MeasurementModel + ?Sized>(
    model: &M,
    rho: &DensityOperator,
    x: f64,
    cfg: &OptimizerConfig,
) -> Result<DiscordReport> {
    let qd_report = quantum_discord_with(model, rho, cfg)?;
    let strength = Strength::Weak(x);
    let (sqd_basis, jx) = max_classical_correlation(model, rho, strength, cfg)?;
    let (wqd_basis, ix) = max_post_mutual_information(model, rho, strength, cfg)?;
    let i = qd_report.total_mutual_info;
    let report = DiscordReport {
        x: Some(x),
        classical_corr: jx,
        post_mutual_info: ix,
        sqd: Some(clamp_discord(i - jx)),
        wqd: Some(clamp_discord(i - ix)),
        opt_basis: sqd_basis,
        opt_value: jx,
        wqd_opt_basis: Some(wqd_basis),
        ..qd_report
    };
    Ok(report)
}

pub fn discord_report(rho: &DensityOperator, x: f64, cfg: &OptimizerConfig) -> Result<DiscordReport> {
    discord_report_with(&DirectPovm, rho, x, cfg)
}
