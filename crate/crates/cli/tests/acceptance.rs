//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line (visible under `--nocapture` and in failure output).
//!
//! Tolerances are pinned here as constants; loosening one is a release
//! decision, not a test fix. Oracles used for comparison are implemented
//! locally and independently of the library paths they check.

use num_complex::Complex64;
use qmeas_core::{
    check_efficiency_bounds, check_tripartite_bounds, classical_correlations, derive_seed,
    disturbance, mutual_information, purified_measurement, relative_entropy,
    relative_entropy_of_entanglement_ub, run_measurement, sampling, shannon_entropy, stream_rng,
    CheckStatus, ComplexMatrix, DensityMatrix, Interaction, MeasuredSide, MeasurementModel,
    OptimizerConfig,
};
use std::time::Instant;

const MARGIN_TOL: f64 = 1e-8;
const EQUALITY_TOL: f64 = 1e-8;
const EXTREME_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-9;
const CLASSICAL_TOL: f64 = 2e-3;
const SANDWICH_TOL: f64 = 1e-6;
const PURE_UPPER_TOL: f64 = 1e-2;
const COROLLARY_TOL: f64 = 1e-6;
const INCONCLUSIVE_CAP: f64 = 0.20;
const DISTURBANCE_TOL: f64 = 1e-8;
const UNCERTAINTY_BUDGET_S: f64 = 30.0;
const CLASSICAL_BUDGET_S: f64 = 120.0;

fn report(id: usize, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {status}: {detail}");
    assert!(ok, "ACCEPTANCE {id} {status}: {detail}");
}

fn uniform_amplitudes(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d]
}

fn diagonal_model(amplitudes: Vec<Complex64>, spectrum: Vec<f64>) -> MeasurementModel {
    MeasurementModel {
        system_amplitudes: amplitudes,
        apparatus_spectrum: spectrum,
        apparatus_basis: None,
        interaction: Interaction::Shift,
    }
}

/// Independent information-gain oracle: circular convolution of the branch
/// probabilities with the apparatus spectrum, entirely in probability space.
fn convolution_info_gain(model: &MeasurementModel) -> f64 {
    let n = model.apparatus_spectrum.len();
    let mut branch = vec![0.0; n];
    for (i, a) in model.system_amplitudes.iter().enumerate() {
        branch[i] = a.norm_sqr();
    }
    let mut mixed = vec![0.0; n];
    for (k, &r) in model.apparatus_spectrum.iter().enumerate() {
        for (i, &p) in branch.iter().enumerate() {
            mixed[(k + i) % n] += r * p;
        }
    }
    shannon_entropy(&mixed).unwrap() - shannon_entropy(&model.apparatus_spectrum).unwrap()
}

#[test]
fn criterion_1_uncertainty_relation_on_random_models() {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let count = 500;
    for i in 0..count {
        let mut rng = stream_rng(101, i);
        let model = sampling::random_model(&mut rng, 4);
        let outcome = run_measurement(&model).unwrap();
        worst = worst.min(outcome.uncertainty_margin);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst >= -MARGIN_TOL && elapsed < UNCERTAINTY_BUDGET_S;
    report(
        1,
        ok,
        &format!(
            "capacity margin >= -{MARGIN_TOL:.0e} on {count} random models \
             (worst {worst:.3e}), {elapsed:.1}s < {UNCERTAINTY_BUDGET_S}s"
        ),
    );
}

#[test]
fn criterion_2_equality_for_uniform_amplitudes() {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2..=4usize {
        let mut spectra = vec![
            {
                let mut pure = vec![0.0; n];
                pure[0] = 1.0;
                pure
            },
            vec![1.0 / n as f64; n],
        ];
        let mut rng = stream_rng(102, n as u64);
        spectra.push(sampling::random_spectrum(&mut rng, n));
        spectra.push(sampling::random_spectrum(&mut rng, n));
        for spectrum in spectra {
            let model = diagonal_model(uniform_amplitudes(n), spectrum);
            let outcome = run_measurement(&model).unwrap();
            worst = worst.max(outcome.uncertainty_margin.abs());
            cases += 1;
        }
    }
    report(
        2,
        worst <= EQUALITY_TOL,
        &format!(
            "uniform amplitudes saturate the capacity bound on {cases} cases \
             (worst |margin| {worst:.3e} <= {EQUALITY_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_3_information_extremes() {
    let mut worst_pure = 0.0f64;
    for (case, &(n, d_s)) in [(2, 2), (3, 2), (3, 3), (4, 3)].iter().enumerate() {
        let mut rng = stream_rng(103, case as u64);
        let amplitudes = sampling::random_amplitudes(&mut rng, d_s);
        let probs: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let mut spectrum = vec![0.0; n];
        spectrum[0] = 1.0;
        let outcome = run_measurement(&diagonal_model(amplitudes, spectrum)).unwrap();
        worst_pure = worst_pure.max((outcome.info_gain - shannon_entropy(&probs).unwrap()).abs());
    }

    let mut worst_mixed = 0.0f64;
    for (case, &(n, d_s)) in [(2, 2), (3, 3), (4, 2)].iter().enumerate() {
        let mut rng = stream_rng(203, case as u64);
        let amplitudes = sampling::random_amplitudes(&mut rng, d_s);
        let outcome =
            run_measurement(&diagonal_model(amplitudes, vec![1.0 / n as f64; n])).unwrap();
        worst_mixed = worst_mixed.max(outcome.info_gain.abs());
    }

    let ok = worst_pure <= EXTREME_TOL && worst_mixed <= EXTREME_TOL;
    report(
        3,
        ok,
        &format!(
            "pure apparatus gives I_m = H(|a|^2) (worst dev {worst_pure:.3e}) and \
             maximally mixed gives I_m = 0 (worst {worst_mixed:.3e}), tol {EXTREME_TOL:.0e}"
        ),
    );
}

#[test]
fn criterion_4_convolution_oracle_equivalence() {
    let mut worst = 0.0f64;
    let count = 100;
    for i in 0..count {
        let mut rng = stream_rng(104, i);
        let model = sampling::random_model_diagonal(&mut rng, 4);
        let outcome = run_measurement(&model).unwrap();
        worst = worst.max((outcome.info_gain - convolution_info_gain(&model)).abs());
    }
    report(
        4,
        worst <= ORACLE_TOL,
        &format!(
            "density-matrix I_m matches the probability-convolution oracle on \
             {count} diagonal models (worst dev {worst:.3e} <= {ORACLE_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_5_classical_correlations_equal_mutual_information() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let count = 20;
    for i in 0..count {
        let d = 2 + (i % 2) as usize;
        let mut rng = stream_rng(105, i);
        let probs = sampling::random_spectrum(&mut rng, d);
        let blocks: Vec<DensityMatrix> =
            (0..d).map(|_| sampling::random_density(&mut rng, vec![d])).collect();
        let mut m = ComplexMatrix::zeros(d * d);
        for (idx, block) in blocks.iter().enumerate() {
            for a in 0..d {
                for b in 0..d {
                    m.set(idx * d + a, idx * d + b, block.matrix().get(a, b) * probs[idx]);
                }
            }
        }
        let rho = DensityMatrix::new(m, vec![d, d]).unwrap();

        let cfg = OptimizerConfig {
            restarts: 4,
            max_iters: 2000,
            seed: derive_seed(105, i),
            ..OptimizerConfig::default()
        };
        let c = classical_correlations(&rho, MeasuredSide::A, &cfg).unwrap();
        let mi = mutual_information(&rho).unwrap();
        worst = worst.max((c.value - mi).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst <= CLASSICAL_TOL && elapsed < CLASSICAL_BUDGET_S;
    report(
        5,
        ok,
        &format!(
            "classical correlations equal mutual information on {count} classical \
             states (worst dev {worst:.3e} <= {CLASSICAL_TOL:.0e}), \
             {elapsed:.1}s < {CLASSICAL_BUDGET_S}s"
        ),
    );
}

#[test]
fn criterion_6_entanglement_sandwich() {
    let mut worst_excess = f64::NEG_INFINITY;
    let count = 50;
    for i in 0..count {
        let mut rng = stream_rng(106, i);
        let model = sampling::random_model(&mut rng, 4);
        let outcome = run_measurement(&model).unwrap();
        let cfg = OptimizerConfig {
            restarts: 1,
            max_iters: 150,
            seed: derive_seed(106, i),
            ..OptimizerConfig::default()
        };
        let ub = relative_entropy_of_entanglement_ub(&outcome.rho_f, &cfg).unwrap();
        worst_excess = worst_excess.max(outcome.ent_lower_bound - ub.value);
    }

    let mut worst_pure = 0.0f64;
    let mut pure_cases = 0;
    for n in 2..=4usize {
        for draw in 0..3u64 {
            let mut rng = stream_rng(206, n as u64 * 10 + draw);
            let amplitudes = sampling::random_amplitudes(&mut rng, n);
            let probs: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
            let mut spectrum = vec![0.0; n];
            spectrum[0] = 1.0;
            let outcome = run_measurement(&diagonal_model(amplitudes, spectrum)).unwrap();
            let cfg = OptimizerConfig {
                restarts: 2,
                max_iters: 300,
                seed: derive_seed(206, n as u64 * 10 + draw),
                ..OptimizerConfig::default()
            };
            let ub = relative_entropy_of_entanglement_ub(&outcome.rho_f, &cfg).unwrap();
            worst_pure = worst_pure.max((ub.value - shannon_entropy(&probs).unwrap()).abs());
            pure_cases += 1;
        }
    }

    let ok = worst_excess <= SANDWICH_TOL && worst_pure <= PURE_UPPER_TOL;
    report(
        6,
        ok,
        &format!(
            "lower bound <= upper estimate on {count} random models (worst excess \
             {worst_excess:.3e} <= {SANDWICH_TOL:.0e}); pure-apparatus upper estimate \
             matches H(|a|^2) on {pure_cases} cases (worst dev {worst_pure:.3e} <= \
             {PURE_UPPER_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_7_certified_tripartite_corollary() {
    let start = Instant::now();
    let count = 200;
    let mut info_env_failures = 0usize;
    let mut lower_side_instances = 0usize;
    let mut lower_side_inconclusive = 0usize;
    let mut violated = 0usize;
    for i in 0..count {
        let mut rng = stream_rng(107, i);
        let model = sampling::random_model(&mut rng, 3);
        let outcome = run_measurement(&model).unwrap();
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iters: 400,
            seed: derive_seed(107, i),
            ..OptimizerConfig::default()
        };
        let tri = purified_measurement(&model, &cfg).unwrap();
        let mut checks = tri.checks.clone();
        checks.extend(check_tripartite_bounds(&tri));
        checks.extend(check_efficiency_bounds(
            &tri,
            outcome.info_gain,
            outcome.apparatus_entropy,
        ));
        for check in &checks {
            if check.status == CheckStatus::Violated {
                violated += 1;
            }
            match check.name {
                "info_env_entanglement" => {
                    if check.lhs_bits > check.rhs_bits + COROLLARY_TOL {
                        info_env_failures += 1;
                    }
                }
                "tripartite_lower_consistency" => {
                    lower_side_instances += 1;
                    if check.status == CheckStatus::Inconclusive {
                        lower_side_inconclusive += 1;
                    }
                }
                _ => {}
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let fraction = lower_side_inconclusive as f64 / lower_side_instances as f64;
    let ok = info_env_failures == 0 && fraction < INCONCLUSIVE_CAP && violated == 0;
    report(
        7,
        ok,
        &format!(
            "entanglement-with-environment estimate + I_m <= S(apparatus) on {count} \
             models ({info_env_failures} failures), lower-side checks inconclusive \
             {lower_side_inconclusive}/{lower_side_instances} = {:.1}% < {:.0}%, \
             {violated} certified violations, {elapsed:.1}s",
            fraction * 100.0,
            INCONCLUSIVE_CAP * 100.0
        ),
    );
}

#[test]
fn criterion_8_disturbance_identity() {
    let mut worst = 0.0f64;
    let count = 100;
    for i in 0..count {
        let d = 2 + (i % 5) as usize;
        let mut rng = stream_rng(108, i);
        let amplitudes = sampling::random_amplitudes(&mut rng, d);
        let d_entropy = disturbance(&amplitudes).unwrap();

        let mut projector = ComplexMatrix::zeros(d);
        let mut diagonal = ComplexMatrix::zeros(d);
        for a in 0..d {
            diagonal.set(a, a, Complex64::new(amplitudes[a].norm_sqr(), 0.0));
            for b in 0..d {
                projector.set(a, b, amplitudes[a] * amplitudes[b].conj());
            }
        }
        let psi = DensityMatrix::new(projector, vec![d]).unwrap();
        let dephased = DensityMatrix::new(diagonal, vec![d]).unwrap();
        let d_relative = relative_entropy(&psi, &dephased)
            .unwrap()
            .value()
            .expect("full support by construction");
        worst = worst.max((d_entropy - d_relative).abs());
    }
    report(
        8,
        worst <= DISTURBANCE_TOL,
        &format!(
            "D = H(|a|^2) agrees with the relative-entropy form on {count} random \
             amplitude vectors (worst dev {worst:.3e} <= {DISTURBANCE_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_9_byte_deterministic_cli() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("model.json");
    std::fs::write(
        &config,
        r#"{
            "system_amplitudes": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
            "apparatus_spectrum": [0.75, 0.25],
            "apparatus_dim": 2,
            "interaction": "shift",
            "optimizer": {"restarts": 1, "max_iters": 200, "seed": 7}
        }"#,
    )
    .unwrap();
    let run = |args: &[&str]| {
        std::process::Command::new(env!("CARGO_BIN_EXE_qmeas"))
            .args(args)
            .output()
            .expect("binary runs")
    };
    let run_args = ["run", "--config", config.to_str().unwrap()];
    let run_a = run(&run_args);
    let run_b = run(&run_args);
    let fuzz_args = ["fuzz", "--n", "3", "--seed", "17", "--max-dim", "3"];
    let fuzz_a = run(&fuzz_args);
    let fuzz_b = run(&fuzz_args);
    let ok = run_a.stdout == run_b.stdout
        && !run_a.stdout.is_empty()
        && fuzz_a.stdout == fuzz_b.stdout
        && !fuzz_a.stdout.is_empty();
    report(
        9,
        ok,
        "run and fuzz outputs are byte-identical across repeated invocations",
    );
}
