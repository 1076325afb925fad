//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use weakdiscord::channels::{
    apply_channel_matrix, dilation_gates, dilation_output, lambda_from_x, phase_damping_kraus, x_from_lambda,
    DilationGates,
};
use weakdiscord::discord::{
    classical_correlation, discord_report, max_classical_correlation, mutual_information, projective_discord_with,
    quantum_discord, weak_classical_correlation, OptimizerConfig,
};
use weakdiscord::measure::{weak_povm, DirectPovm, MeasurementBasis, Strength};
use weakdiscord::pathway::Pathway;
use weakdiscord::qmath::trace_distance_matrices;
use weakdiscord::sample::{random_bell_diagonal, random_state, seeded_rng};
use weakdiscord::states::{bell_diagonal_preset, werner, werner_preset, DensityOperator};
use weakdiscord::sweep::{run_sweep, StateSpec, SweepConfig, SweepRow, NOMINAL_GRID};
use weakdiscord::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn presets() -> [(&'static str, StateSpec, DensityOperator); 2] {
    [
        ("werner(0.8)", StateSpec::WERNER_PRESET, werner_preset()),
        ("bd(1,-1,1)", StateSpec::BELL_DIAGONAL_PRESET, bell_diagonal_preset()),
    ]
}

fn criterion_1() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for theta in linspace(0.0, PI, 10) {
        for phi in (0..10).map(|j| TAU * j as f64 / 10.0) {
            for x in linspace(0.0, 30.0, 10) {
                worst = worst.max(weak_povm(MeasurementBasis::wrapped(theta, phi), x)?.completeness_defect());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max completeness defect {worst:.2e} (tol 1e-12)"))
}

fn criterion_2() -> Result<Outcome> {
    let mut rng = seeded_rng(2);
    let basis = MeasurementBasis::pi_pi();
    let (mut d_weak, mut d_pd, mut d_td) = (0.0f64, 0.0f64, 0.0f64);
    for x in [0.0, 0.1, 0.34, 0.75, 1.2, 2.0, 3.5, 5.0, 8.0] {
        for _ in 0..10 {
            let rho = random_state(&mut rng, 2);
            let m = rho.matrix();
            let p = weak_povm(basis, x)?;
            let weak = p.p_plus().sandwich(m) + &p.p_minus().sandwich(m);
            let lambda = lambda_from_x(x)?;
            let pd = apply_channel_matrix(&phase_damping_kraus(lambda)?, m, 0)?;
            let sech = 1.0 / x.cosh();
            d_weak = d_weak.max((weak[(0, 1)] - m[(0, 1)] * sech).norm()).max((weak[(0, 0)] - m[(0, 0)]).norm());
            d_pd = d_pd.max((pd[(0, 1)] - m[(0, 1)] * (1.0 - lambda).sqrt()).norm()).max((pd[(1, 1)] - m[(1, 1)]).norm());
            d_td = d_td.max(trace_distance_matrices(&weak, &pd)?);
        }
    }
    let passed = d_weak <= 1e-12 && d_pd <= 1e-12 && d_td <= 1e-12;
    outcome(passed, format!("weak {d_weak:.2e}, channel {d_pd:.2e}, trace distance {d_td:.2e} (tol 1e-12)"))
}

fn dilation_worst(gates_for: impl Fn(f64) -> Result<DilationGates>) -> Result<(f64, f64, usize)> {
    let mut rng = seeded_rng(3);
    let (mut worst, mut best, mut n) = (0.0f64, f64::INFINITY, 0);
    for _ in 0..20 {
        let rho = random_state(&mut rng, 4);
        for lambda in linspace(0.0, 1.0, 11) {
            let circuit = dilation_output(&gates_for(lambda)?, rho.matrix(), 1)?;
            let kraus = apply_channel_matrix(&phase_damping_kraus(lambda)?, rho.matrix(), 1)?;
            let d = trace_distance_matrices(&circuit, &kraus)?;
            worst = worst.max(d);
            best = best.min(d);
            n += 1;
        }
    }
    Ok((worst, best, n))
}

fn criterion_3() -> Result<Outcome> {
    let (worst, _, n) = dilation_worst(dilation_gates)?;
    let (_, fault_best, _) = dilation_worst(DilationGates::with_half_prefactor)?;
    let passed = worst <= 1e-12 && fault_best > 1e-12;
    outcome(
        passed,
        format!("{n} checks, max trace distance {worst:.2e} (tol 1e-12); half-prefactor fault min distance {fault_best:.3}"),
    )
}

fn criterion_4(cfg: &OptimizerConfig) -> Result<Outcome> {
    let mut states: Vec<DensityOperator> = linspace(0.0, 1.0, 11).into_iter().map(werner).collect::<Result<_>>()?;
    let mut rng = seeded_rng(4);
    states.extend((0..20).map(|_| random_bell_diagonal(&mut rng)));
    let mut worst = 0.0f64;
    for rho in &states {
        let p = projective_discord_with(&DirectPovm, rho, cfg)?;
        worst = worst.max((p.via_classical() - p.via_post_state()).abs());
    }
    outcome(worst <= 1e-6, format!("{} states, max route gap {worst:.2e} (tol 1e-6)", states.len()))
}

fn criterion_5(cfg: &OptimizerConfig) -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, _, rho) in presets() {
        let r0 = discord_report(&rho, 0.0, cfg)?;
        let r20 = discord_report(&rho, 20.0, cfg)?;
        let d_sqd0 = (r0.sqd.unwrap() - r0.total_mutual_info).abs();
        let d_wqd0 = r0.wqd.unwrap().abs();
        let d_sqd20 = (r20.sqd.unwrap() - r20.qd).abs();
        let d_wqd20 = (r20.wqd.unwrap() - r20.qd).abs();
        passed &= d_sqd0 <= 1e-9 && d_wqd0 <= 1e-9 && d_sqd20 <= 1e-5 && d_wqd20 <= 1e-5;
        parts.push(format!(
            "{name}: |SQD(0)-I| {d_sqd0:.1e}, |WQD(0)| {d_wqd0:.1e}, |SQD(20)-QD| {d_sqd20:.1e}, |WQD(20)-QD| {d_wqd20:.1e}"
        ));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_6(sweeps: &[(&str, Vec<SweepRow>)]) -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, rows) in sweeps {
        let order = rows.iter().map(|r| (r.wqd - r.qd).max(r.qd - r.sqd)).fold(f64::NEG_INFINITY, f64::max);
        let sqd_rise = rows.windows(2).map(|w| w[1].sqd - w[0].sqd).fold(f64::NEG_INFINITY, f64::max);
        let wqd_drop = rows.windows(2).map(|w| w[0].wqd - w[1].wqd).fold(f64::NEG_INFINITY, f64::max);
        passed &= order <= 1e-6 && sqd_rise <= 0.0 && wqd_drop <= 0.0;
        parts.push(format!("{name}: ordering excess {order:.1e}, SQD max rise {sqd_rise:.1e}, WQD max drop {wqd_drop:.1e}"));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_7(cfg: &OptimizerConfig) -> Result<Outcome> {
    // brute force first, then the optimizer
    let w_ref = common::werner(0.8);
    let bd_ref = common::bell_diagonal([1.0, -1.0, 1.0]);
    let oracle = [
        common::oracle_qd(&w_ref),
        common::mutual_information(&w_ref),
        common::oracle_qd(&bd_ref),
        common::mutual_information(&bd_ref),
    ];
    let lib = [
        quantum_discord(&werner_preset(), cfg)?.qd,
        mutual_information(&werner_preset())?,
        quantum_discord(&bell_diagonal_preset(), cfg)?.qd,
        mutual_information(&bell_diagonal_preset())?,
    ];
    let target = [0.6214, 1.1524, 1.0, 2.0];
    let oracle_ok = oracle.iter().zip(&target).all(|(o, t)| (o - t).abs() <= 1e-3);
    let lib_ok = lib.iter().zip(&target).all(|(v, t)| (v - t).abs() <= 1e-3);
    let agree = oracle.iter().zip(&lib).map(|(o, v)| (o - v).abs()).fold(0.0, f64::max);
    outcome(
        oracle_ok && lib_ok,
        format!(
            "QD_W {:.6}, I_W {:.6}, QD_BD {:.6}, I_BD {:.6} (oracle vs optimizer max gap {agree:.1e})",
            lib[0], lib[1], lib[2], lib[3]
        ),
    )
}

fn criterion_8(cfg: &OptimizerConfig) -> Result<Outcome> {
    let at = MeasurementBasis::pi_pi();
    let mut worst = 0.0f64;
    for (_, _, rho) in presets() {
        let (_, j) = max_classical_correlation(&DirectPovm, &rho, Strength::Projective, cfg)?;
        worst = worst.max((j - classical_correlation(&rho, at)?).abs());
        for &x in &NOMINAL_GRID {
            let (_, jx) = max_classical_correlation(&DirectPovm, &rho, Strength::Weak(x), cfg)?;
            worst = worst.max((jx - weak_classical_correlation(&rho, at, x)?).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max |J_opt - J(pi, pi)| {worst:.2e} (tol 1e-9)"))
}

fn criterion_9(all: &[(&str, Pathway, Vec<SweepRow>)]) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (name, p, rows) in all {
        let (_, _, direct) = all.iter().find(|(n, q, _)| n == name && *q == Pathway::DirectPovm).unwrap();
        if *p == Pathway::DirectPovm {
            continue;
        }
        for (a, b) in direct.iter().zip(rows) {
            worst = worst.max((a.qd - b.qd).abs()).max((a.sqd - b.sqd).abs()).max((a.wqd - b.wqd).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max column gap across pathways {worst:.2e} (tol 1e-9)"))
}

fn criterion_10() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for lambda in linspace(0.0, 0.99, 99) {
        worst = worst.max((lambda_from_x(x_from_lambda(lambda)?)? - lambda).abs());
    }
    outcome(worst <= 1e-12, format!("max round-trip error {worst:.2e} (tol 1e-12)"))
}

fn report(n: usize, title: &str, start: Instant, r: Result<Outcome>) -> bool {
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(o) => {
            println!("{} {n:>2}. {title}: {} [{secs:.1}s]", if o.passed { "PASS" } else { "FAIL" }, o.detail);
            o.passed
        }
        Err(e) => {
            println!("FAIL {n:>2}. {title}: error {e} [{secs:.1}s]");
            false
        }
    }
}

fn main() -> ExitCode {
    let cfg = OptimizerConfig::default();
    let mut ok = true;

    let t = Instant::now();
    let sweeps: Result<Vec<(&str, Pathway, Vec<SweepRow>)>> = presets()
        .into_iter()
        .flat_map(|(name, spec, _)| Pathway::ALL.map(move |p| (name, spec, p)))
        .map(|(name, state, pathway)| {
            let cfg = SweepConfig {
                state,
                x_grid: NOMINAL_GRID.to_vec(),
                pathway,
                optimizer: cfg,
                output_path: PathBuf::new(),
            };
            Ok((name, pathway, run_sweep(&cfg)?))
        })
        .collect();
    println!("(pathway sweeps computed in {:.1}s)", t.elapsed().as_secs_f64());

    ok &= report(1, "POVM completeness", Instant::now(), criterion_1());
    ok &= report(2, "coherence scaling law", Instant::now(), criterion_2());
    ok &= report(3, "dilation equivalence", Instant::now(), criterion_3());
    ok &= report(4, "discord route equivalence", Instant::now(), criterion_4(&cfg));
    ok &= report(5, "strength limits", Instant::now(), criterion_5(&cfg));
    let t = Instant::now();
    ok &= report(6, "ordering and monotonicity", t, sweeps.as_ref().map_err(clone_err).and_then(|s| {
        let direct: Vec<(&str, Vec<SweepRow>)> = s
            .iter()
            .filter(|(_, p, _)| *p == Pathway::DirectPovm)
            .map(|(n, _, rows)| (*n, rows.clone()))
            .collect();
        criterion_6(&direct)
    }));
    ok &= report(7, "oracle values", Instant::now(), criterion_7(&cfg));
    ok &= report(8, "optimal-basis value", Instant::now(), criterion_8(&cfg));
    ok &= report(9, "pathway agreement", Instant::now(), sweeps.as_ref().map_err(clone_err).and_then(|s| criterion_9(s)));
    ok &= report(10, "lambda/x round trip", Instant::now(), criterion_10());

    if ok {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}

fn clone_err(e: &weakdiscord::Error) -> weakdiscord::Error {
    weakdiscord::Error::Domain(e.to_string())
}

