//! Cross-module invariant suites run by `weakdiscord verify`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::{
    apply_channel_matrix, dilation_gates, dilation_output, lambda_from_x, phase_damping_kraus,
    x_from_lambda, DilationGates,
};
use crate::discord::{
    discord_report, max_classical_correlation, projective_discord_with, weak_classical_correlation,
    OptimizerConfig,
};
use crate::error::{domain, Error, Result};
use crate::measure::{projectors, weak_povm, DirectPovm, MeasurementBasis, MeasurementModel, Strength};
use crate::pathway::{FaultyDilation, Pathway};
use crate::qmath::{trace_distance_matrices, ComplexMatrix};
use crate::sample::{random_bell_diagonal, random_state, seeded_rng};
use crate::states::{bell_diagonal_preset, werner, werner_preset, DensityOperator};
use crate::sweep::NOMINAL_GRID;

/// Seed shared by every randomized check.
pub const VERIFY_SEED: u64 = 0x5eed_d15c;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Povm,
    Channel,
    Dilation,
    Discord,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["povm", "channel", "dilation", "discord", "all"];

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Povm, Suite::Channel, Suite::Dilation, Suite::Discord],
            s => vec![s],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Povm => "povm",
            Suite::Channel => "channel",
            Suite::Dilation => "dilation",
            Suite::Discord => "discord",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "povm" => Ok(Suite::Povm),
            "channel" => Ok(Suite::Channel),
            "dilation" => Ok(Suite::Dilation),
            "discord" => Ok(Suite::Discord),
            "all" => Ok(Suite::All),
            other => domain(format!("unknown suite '{other}' (expected one of {})", Suite::NAMES.join(", "))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Builds the dilation with the non-unitary ½-prefactor gates.
    pub fault_half_prefactor: bool,
    pub optimizer: OptimizerConfig,
}

/// One measured deviation against its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn record(&mut self, suite: &'static str, name: impl Into<String>, deviation: f64, tolerance: f64) {
        // NaN deviations fail
        let passed = deviation <= tolerance;
        self.checks.push(Check { suite, name: name.into(), deviation, tolerance, passed });
    }

    fn record_result(&mut self, suite: &'static str, name: impl Into<String>, r: Result<(f64, f64)>) {
        match r {
            Ok((deviation, tolerance)) => self.record(suite, name, deviation, tolerance),
            Err(e) => {
                let name = format!("{} ({e})", name.into());
                self.checks.push(Check { suite, name, deviation: f64::NAN, tolerance: 0.0, passed: false });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, suite: &str) -> (usize, usize) {
        let of_suite = self.checks.iter().filter(|c| c.suite == suite);
        let total = of_suite.clone().count();
        (of_suite.filter(|c| c.passed).count(), total)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.failures() {
            writeln!(f, "FAIL [{}] {}: {:e} > {:e}", c.suite, c.name, c.deviation, c.tolerance)?;
        }
        for suite in Suite::NAMES {
            let (ok, total) = self.count(suite);
            if total > 0 {
                let tag = if ok == total { "PASS" } else { "FAIL" };
                writeln!(f, "{tag} {suite}: {ok}/{total} checks")?;
            }
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn povm_suite(report: &mut VerifyReport) {
    const S: &str = "povm";
    let mut worst = 0.0f64;
    for theta in linspace(0.0, PI, 10) {
        for phi in (0..10).map(|j| TAU * j as f64 / 10.0) {
            for x in linspace(0.0, 30.0, 10) {
                let basis = MeasurementBasis::wrapped(theta, phi);
                match weak_povm(basis, x) {
                    Ok(p) => worst = worst.max(p.completeness_defect()),
                    Err(_) => worst = f64::NAN,
                }
            }
        }
    }
    report.record(S, "completeness over 10x10x10 (theta, phi, x) grid", worst, 1e-12);

    report.record_result(S, "x=20 reduces to projectors", (|| {
        let basis = MeasurementBasis::pi_pi();
        let p = weak_povm(basis, 20.0)?;
        let (pi1, pi2) = projectors(basis);
        Ok((p.p_plus().max_abs_diff(&pi2).max(p.p_minus().max_abs_diff(&pi1)), 1e-8))
    })());

    report.record_result(S, "x=0 outcomes are uninformative", (|| {
        let rho = werner_preset();
        let out = DirectPovm.outcomes(&rho, MeasurementBasis::new(0.4, 1.9)?, Strength::Weak(0.0))?;
        let d = out[0].conditional_state.matrix().max_abs_diff(out[1].conditional_state.matrix());
        Ok(((out[0].probability - 0.5).abs().max(d), 1e-12))
    })());

    let mut rng = seeded_rng(VERIFY_SEED);
    for i in 0..10 {
        let rho = random_state(&mut rng, 4);
        let x = 0.5 * i as f64;
        report.record_result(S, format!("probabilities sum to 1, random state {i}, x={x}"), (|| {
            let out = DirectPovm.outcomes(&rho, MeasurementBasis::new(1.1, 0.3)?, Strength::Weak(x))?;
            Ok(((out[0].probability + out[1].probability - 1.0).abs(), 1e-12))
        })());
    }
}

/// Coherence ratio of a single-qubit output relative to its input.
fn coherence_ratio(out: &ComplexMatrix, input: &ComplexMatrix) -> f64 {
    (out[(0, 1)] / input[(0, 1)]).re
}

fn channel_suite(report: &mut VerifyReport) {
    const S: &str = "channel";
    let worst = linspace(0.0, 0.99, 99)
        .map(|l| match x_from_lambda(l).and_then(lambda_from_x) {
            Ok(back) => (back - l).abs(),
            Err(_) => f64::NAN,
        })
        .fold(0.0, f64::max);
    report.record(S, "lambda -> x -> lambda round trip on 99 points", worst, 1e-12);

    report.record_result(S, "Kraus sets trace preserving for lambda in [0,1]", (|| {
        let mut d = 0.0f64;
        for l in linspace(0.0, 1.0, 101) {
            d = d.max(phase_damping_kraus(l)?.trace_preservation_defect());
        }
        Ok((d, 1e-12))
    })());

    let mut rng = seeded_rng(VERIFY_SEED + 1);
    let basis = MeasurementBasis::pi_pi();
    for x in [0.0, 0.34, 0.95, 2.0, 5.0] {
        let rho = random_state(&mut rng, 2);
        report.record_result(S, format!("coherence scaling at x={x}"), (|| {
            let lambda = lambda_from_x(x)?;
            let p = weak_povm(basis, x)?;
            let weak = p.p_plus().sandwich(rho.matrix()) + &p.p_minus().sandwich(rho.matrix());
            let pd = apply_channel_matrix(&phase_damping_kraus(lambda)?, rho.matrix(), 0)?;
            let d_weak = (coherence_ratio(&weak, rho.matrix()) - 1.0 / x.cosh()).abs();
            let d_pd = (coherence_ratio(&pd, rho.matrix()) - (1.0 - lambda).sqrt()).abs();
            let td = trace_distance_matrices(&weak, &pd)?;
            Ok((d_weak.max(d_pd).max(td), 1e-12))
        })());
    }
}

fn dilation_suite(report: &mut VerifyReport, fault: bool) {
    const S: &str = "dilation";
    let gates_for = |l: f64| -> Result<DilationGates> {
        if fault {
            DilationGates::with_half_prefactor(l)
        } else {
            dilation_gates(l)
        }
    };
    let mut rng = seeded_rng(VERIFY_SEED + 2);
    let states: Vec<DensityOperator> = (0..20).map(|_| random_state(&mut rng, 4)).collect();
    for (i, rho) in states.iter().enumerate() {
        for lambda in linspace(0.0, 1.0, 11) {
            let target = 1 - i % 2;
            report.record_result(S, format!("state {i}, lambda={lambda:.1}, qubit {target}"), (|| {
                let via_circuit = dilation_output(&gates_for(lambda)?, rho.matrix(), target)?;
                let via_kraus = apply_channel_matrix(&phase_damping_kraus(lambda)?, rho.matrix(), target)?;
                Ok((trace_distance_matrices(&via_circuit, &via_kraus)?, 1e-12))
            })());
        }
    }
    let rho = &states[0];
    let basis = MeasurementBasis::new(1.3, 4.1).unwrap_or(MeasurementBasis::z());
    for x in [0.34, 1.2] {
        report.record_result(S, format!("circuit branches equal POVM branches, x={x}"), (|| {
            let want = DirectPovm.branches(rho, basis, Strength::Weak(x))?;
            let got = if fault {
                FaultyDilation.branches(rho, basis, Strength::Weak(x))?
            } else {
                Pathway::AncillaDilation.branches(rho, basis, Strength::Weak(x))?
            };
            Ok((want[0].max_abs_diff(&got[0]).max(want[1].max_abs_diff(&got[1])), 1e-12))
        })());
    }
}

fn discord_suite(report: &mut VerifyReport, cfg: &OptimizerConfig) {
    const S: &str = "discord";
    let route = |rho: &DensityOperator| -> Result<(f64, f64)> {
        let p = projective_discord_with(&DirectPovm, rho, cfg)?;
        Ok(((p.via_classical() - p.via_post_state()).abs(), 1e-6))
    };
    for z in linspace(0.0, 1.0, 11) {
        report.record_result(S, format!("QD routes agree, werner z={z:.1}"), werner(z).and_then(|r| route(&r)));
    }
    let mut rng = seeded_rng(VERIFY_SEED + 3);
    for i in 0..20 {
        let rho = random_bell_diagonal(&mut rng);
        report.record_result(S, format!("QD routes agree, random Bell-diagonal {i}"), route(&rho));
    }

    for (label, rho) in [("werner-paper", werner_preset()), ("bd-paper", bell_diagonal_preset())] {
        let reports: Result<Vec<_>> = NOMINAL_GRID.iter().map(|&x| discord_report(&rho, x, cfg)).collect();
        let reports = match reports {
            Ok(r) => r,
            Err(e) => {
                report.record_result(S, format!("{label} sweep"), Err(e));
                continue;
            }
        };
        let first = &reports[0];
        report.record(S, format!("{label}: SQD(0) = I"), (first.sqd.unwrap_or(f64::NAN) - first.total_mutual_info).abs(), 1e-9);
        report.record(S, format!("{label}: WQD(0) = 0"), first.wqd.unwrap_or(f64::NAN).abs(), 1e-9);
        for r in &reports {
            let x = r.x.unwrap_or(f64::NAN);
            let excess = (r.wqd.unwrap_or(f64::NAN) - r.qd).max(r.qd - r.sqd.unwrap_or(f64::NAN)).max(0.0);
            report.record(S, format!("{label}: WQD <= QD <= SQD at x={x}"), excess, 1e-6);
        }
        let sqd_rise = reports.windows(2).map(|w| w[1].sqd.unwrap_or(f64::NAN) - w[0].sqd.unwrap_or(f64::NAN)).fold(0.0, f64::max);
        let wqd_drop = reports.windows(2).map(|w| w[0].wqd.unwrap_or(f64::NAN) - w[1].wqd.unwrap_or(f64::NAN)).fold(0.0, f64::max);
        report.record(S, format!("{label}: SQD non-increasing"), sqd_rise, 1e-9);
        report.record(S, format!("{label}: WQD non-decreasing"), wqd_drop, 1e-9);

        report.record_result(S, format!("{label}: limits at x=20"), (|| {
            let r = discord_report(&rho, 20.0, cfg)?;
            let d = (r.sqd.unwrap_or(f64::NAN) - r.qd).abs().max((r.wqd.unwrap_or(f64::NAN) - r.qd).abs());
            Ok((d, 1e-5))
        })());
        report.record_result(S, format!("{label}: optimum attained at theta=pi, phi=pi"), (|| {
            let mut d = 0.0f64;
            for x in [0.34, 1.2, 3.0] {
                let (_, best) = max_classical_correlation(&DirectPovm, &rho, Strength::Weak(x), cfg)?;
                d = d.max((best - weak_classical_correlation(&rho, MeasurementBasis::pi_pi(), x)?).abs());
            }
            Ok((d, 1e-9))
        })());
    }
}

/// Runs `suite`; failures are recorded in the report, never returned as errors.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    for s in suite.members() {
        match s {
            Suite::Povm => povm_suite(&mut report),
            Suite::Channel => channel_suite(&mut report),
            Suite::Dilation => dilation_suite(&mut report, opts.fault_half_prefactor),
            Suite::Discord => discord_suite(&mut report, &opts.optimizer),
            Suite::All => unreachable!("expanded by members()"),
        }
    }
    report
}
