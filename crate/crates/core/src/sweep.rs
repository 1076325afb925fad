//! Strength sweeps: QD, SQD and WQD as functions of the weak strength `x`,
//! written as a CSV table.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::lambda_from_x;
use crate::discord::{
    clamp_discord, max_classical_correlation, max_post_mutual_information, mutual_information,
    quantum_discord_with, OptimizerConfig,
};
use crate::error::{domain, Error, Result};
use crate::measure::{DirectPovm, MeasurementModel, Strength, X_MAX};
use crate::pathway::Pathway;
use crate::qmath::fidelity;
use crate::states::{bell_diagonal, werner, BellDiagonalParams, DensityOperator};

/// Nominal strengths of the reference experiment.
pub const NOMINAL_GRID: [f64; 15] = [
    0.0, 0.34, 0.55, 0.75, 0.95, 1.2, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0,
];

/// Upper end of the dense grid.
pub const DENSE_MAX: f64 = 5.0;

pub const ENV_COARSE_THETA: &str = "WEAKDISCORD_COARSE_THETA";
pub const ENV_COARSE_PHI: &str = "WEAKDISCORD_COARSE_PHI";
pub const ENV_REFINE_ROUNDS: &str = "WEAKDISCORD_REFINE_ROUNDS";

pub const CSV_HEADER: [&str; 11] = [
    "x",
    "lambda",
    "qd",
    "sqd",
    "wqd",
    "total_mutual_info",
    "theta_opt_sqd",
    "phi_opt_sqd",
    "theta_opt_wqd",
    "phi_opt_wqd",
    "fidelity_vs_ideal",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateSpec {
    Werner { z: f64 },
    BellDiagonal { c1: f64, c2: f64, c3: f64 },
}

impl StateSpec {
    pub const WERNER_PRESET: StateSpec = StateSpec::Werner { z: 0.8 };
    pub const BELL_DIAGONAL_PRESET: StateSpec = StateSpec::BellDiagonal { c1: 1.0, c2: -1.0, c3: 1.0 };

    pub fn build(&self) -> Result<DensityOperator> {
        match *self {
            StateSpec::Werner { z } => werner(z),
            StateSpec::BellDiagonal { c1, c2, c3 } => bell_diagonal(BellDiagonalParams::new(c1, c2, c3)?),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Werner { z } => write!(f, "werner:{z}"),
            StateSpec::BellDiagonal { c1, c2, c3 } => write!(f, "bd:{c1},{c2},{c3}"),
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Domain(format!("'{s}' is not a number")))
}

impl FromStr for StateSpec {
    type Err = Error;

    /// `werner:Z`, `bd:C1,C2,C3`, or the presets `werner-paper` and `bd-paper`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "werner-paper" => return Ok(Self::WERNER_PRESET),
            "bd-paper" => return Ok(Self::BELL_DIAGONAL_PRESET),
            _ => {}
        }
        let (family, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("state '{s}' is not werner:Z or bd:C1,C2,C3")))?;
        match family.trim() {
            "werner" => Ok(StateSpec::Werner { z: parse_real(args)? }),
            "bd" => {
                let c: Vec<f64> = args.split(',').map(parse_real).collect::<Result<_>>()?;
                match c[..] {
                    [c1, c2, c3] => Ok(StateSpec::BellDiagonal { c1, c2, c3 }),
                    _ => domain(format!("bd needs three comma-separated values, got '{args}'")),
                }
            }
            other => domain(format!("unknown state family '{other}'")),
        }
    }
}

/// `n` uniform points on `[0, 5]`, both ends included.
pub fn dense_grid(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| DENSE_MAX * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `table1` or `dense:N`.
pub fn parse_x_grid(s: &str) -> Result<Vec<f64>> {
    if s == "table1" {
        return Ok(NOMINAL_GRID.to_vec());
    }
    if let Some(n) = s.strip_prefix("dense:") {
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::Domain(format!("'{n}' is not a point count")))?;
        return Ok(dense_grid(n));
    }
    domain(format!("unknown x grid '{s}' (expected table1 or dense:N)"))
}

fn env_count(name: &str) -> Result<Option<usize>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Domain(format!("{name}={v} is not a non-negative integer"))),
        Err(_) => Ok(None),
    }
}

/// Default optimizer settings with any grid sizes or round count taken from
/// the environment.
pub fn optimizer_from_env() -> Result<OptimizerConfig> {
    let mut cfg = OptimizerConfig::default();
    if let Some(n) = env_count(ENV_COARSE_THETA)? {
        cfg.coarse_theta_steps = n;
    }
    if let Some(n) = env_count(ENV_COARSE_PHI)? {
        cfg.coarse_phi_steps = n;
    }
    if let Some(n) = env_count(ENV_REFINE_ROUNDS)? {
        cfg.refine_rounds = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub state: StateSpec,
    pub x_grid: Vec<f64>,
    pub pathway: Pathway,
    pub optimizer: OptimizerConfig,
    pub output_path: PathBuf,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(x) = self.x_grid.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > X_MAX) {
            return domain(format!("x = {x} outside [0, {X_MAX}]"));
        }
        if self.x_grid.windows(2).any(|w| w[0] > w[1]) {
            return domain("x grid must be sorted ascending");
        }
        self.optimizer.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub lambda: f64,
    pub qd: f64,
    pub sqd: f64,
    pub wqd: f64,
    pub total_mutual_info: f64,
    pub theta_opt_sqd: f64,
    pub phi_opt_sqd: f64,
    pub theta_opt_wqd: f64,
    pub phi_opt_wqd: f64,
    pub fidelity_vs_ideal: f64,
}

impl SweepRow {
    pub fn values(&self) -> [f64; 11] {
        [
            self.x,
            self.lambda,
            self.qd,
            self.sqd,
            self.wqd,
            self.total_mutual_info,
            self.theta_opt_sqd,
            self.phi_opt_sqd,
            self.theta_opt_wqd,
            self.phi_opt_wqd,
            self.fidelity_vs_ideal,
        ]
    }
}

/// Formats like C's `%.12g`.
pub fn format_g12(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{}", CSV_HEADER.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.values().iter().map(|&v| format_g12(v)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// QD is independent of `x` and shared across rows.
fn sweep_row(
    rho: &DensityOperator,
    x: f64,
    pathway: Pathway,
    total_mutual_info: f64,
    qd: f64,
    cfg: &OptimizerConfig,
) -> Result<SweepRow> {
    let strength = Strength::Weak(x);
    let (sqd_basis, jx) = max_classical_correlation(&pathway, rho, strength, cfg)?;
    let (wqd_basis, ix) = max_post_mutual_information(&pathway, rho, strength, cfg)?;
    let ideal = DirectPovm.post_state(rho, sqd_basis, strength)?;
    let realized = pathway.post_state(rho, sqd_basis, strength)?;
    Ok(SweepRow {
        x,
        lambda: lambda_from_x(x)?,
        qd,
        sqd: clamp_discord(total_mutual_info - jx),
        wqd: clamp_discord(total_mutual_info - ix),
        total_mutual_info,
        theta_opt_sqd: sqd_basis.theta(),
        phi_opt_sqd: sqd_basis.phi(),
        theta_opt_wqd: wqd_basis.theta(),
        phi_opt_wqd: wqd_basis.phi(),
        fidelity_vs_ideal: fidelity(&ideal, &realized)?,
    })
}

/// Computes every row; rows are evaluated in parallel and returned in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let rho = cfg.state.build()?;
    if cfg.x_grid.is_empty() {
        return Ok(vec![]);
    }
    let qd_report = quantum_discord_with(&cfg.pathway, &rho, &cfg.optimizer)?;
    let total = mutual_information(&rho)?;
    cfg.x_grid
        .par_iter()
        .map(|&x| sweep_row(&rho, x, cfg.pathway, total, qd_report.qd, &cfg.optimizer))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub state: StateSpec,
    pub pathway: Pathway,
    pub output_path: PathBuf,
    pub rows: Vec<SweepRow>,
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "state {} | pathway {} | {} rows -> {}",
            self.state,
            self.pathway,
            self.rows.len(),
            self.output_path.display()
        )?;
        let (Some(first), Some(last)) = (self.rows.first(), self.rows.last()) else {
            return Ok(());
        };
        writeln!(f, "I(A:B) = {:.6}  QD = {:.6}", first.total_mutual_info, first.qd)?;
        writeln!(f, "{:>8} {:>10} {:>10} {:>10}", "x", "SQD", "WQD", "fidelity")?;
        for r in &self.rows {
            writeln!(f, "{:>8.4} {:>10.6} {:>10.6} {:>10.6}", r.x, r.sqd, r.wqd, r.fidelity_vs_ideal)?;
        }
        write!(
            f,
            "SQD {:.6} -> {:.6}, WQD {:.6} -> {:.6}",
            first.sqd, last.sqd, first.wqd, last.wqd
        )
    }
}

fn write_file(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(rows, std::io::BufWriter::new(file))
}

/// Runs the sweep and writes the CSV to `cfg.output_path`.
pub fn cmd_sweep(cfg: &SweepConfig) -> Result<SweepSummary> {
    let rows = run_sweep(cfg)?;
    write_file(&cfg.output_path, &rows)?;
    Ok(SweepSummary {
        state: cfg.state,
        pathway: cfg.pathway,
        output_path: cfg.output_path.clone(),
        rows,
    })
}
