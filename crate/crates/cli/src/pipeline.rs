//! Command pipelines shared by the `qmeas` binary and its integration tests.
//!
//! Each `execute_*` function does the physics and formatting; the binary only
//! parses arguments, opens files, and maps results to exit codes. Every
//! pipeline is deterministic for a fixed (input, seed) pair.

use anyhow::{bail, Result};
use num_complex::Complex64;
use qmeas_core::{
    check_efficiency_bounds, check_tripartite_bounds, classical_correlations, derive_seed,
    purified_measurement, relative_entropy_of_entanglement_ub, run_measurement, sampling,
    stream_rng, BoundKind, CheckStatus, InequalityCheck, MeasuredSide, MeasurementModel,
    OptimizerConfig,
};
use std::collections::BTreeMap;
use std::io::Write;

use crate::report::RunReport;

/// Slack on the capacity margin before the trade-off counts as violated.
const MARGIN_TOL: f64 = 1e-8;

/// Slack between the certified lower bound and the upper estimate.
const SANDWICH_TOL: f64 = 1e-6;

/// Apparatus dimension above which the fuzz loop skips the purified
/// tripartite pipeline (its entanglement searches dominate the runtime).
const FUZZ_TRIPARTITE_MAX_N: usize = 3;

/// Diagnostics verbosity from `QMEAS_LOG` (`debug` > `info` > silent).
pub fn diag_level() -> u8 {
    match std::env::var("QMEAS_LOG").ok().as_deref() {
        Some("debug") => 2,
        Some("info") => 1,
        _ => 0,
    }
}

fn info(msg: &str) {
    if diag_level() >= 1 {
        eprintln!("[qmeas] {msg}");
    }
}

fn debug(msg: &str) {
    if diag_level() >= 2 {
        eprintln!("[qmeas] {msg}");
    }
}

/// Run one model end to end: measurement, classical correlations of the
/// final state (measuring the apparatus), entanglement estimates, the
/// purified tripartite pipeline, and every inequality check. Returns the
/// report and whether any check certified a violation.
pub fn execute_run(
    model: &MeasurementModel,
    cfg: &OptimizerConfig,
    full: bool,
) -> Result<(RunReport, bool)> {
    let outcome = run_measurement(model)?;
    debug(&format!(
        "measurement done: I_m = {:.6}, S(rho) = {:.6}",
        outcome.info_gain, outcome.apparatus_entropy
    ));

    let c_classical = classical_correlations(&outcome.rho_f, MeasuredSide::A, cfg)?;
    debug(&format!("classical correlations = {:.6}", c_classical.value));

    let e_re = relative_entropy_of_entanglement_ub(&outcome.rho_f, cfg)?;
    debug(&format!("entanglement upper estimate = {:.6}", e_re.value));

    let tri = purified_measurement(model, cfg)?;

    let mut checks: Vec<InequalityCheck> = Vec::new();
    let n = model.apparatus_dim();
    checks.push(InequalityCheck {
        name: "uncertainty_relation",
        lhs_bits: outcome.info_gain + outcome.apparatus_entropy,
        rhs_bits: (n as f64).log2(),
        lhs_kind: BoundKind::Exact,
        rhs_kind: BoundKind::Exact,
        status: if outcome.uncertainty_margin >= -MARGIN_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Violated
        },
    });
    checks.push(InequalityCheck {
        name: "entanglement_sandwich",
        lhs_bits: outcome.ent_lower_bound,
        rhs_bits: e_re.value,
        lhs_kind: BoundKind::LowerBound,
        rhs_kind: BoundKind::UpperEstimate,
        status: if outcome.ent_lower_bound <= e_re.value + SANDWICH_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Violated
        },
    });
    checks.extend(tri.checks.iter().cloned());
    checks.extend(check_tripartite_bounds(&tri));
    checks.extend(check_efficiency_bounds(
        &tri,
        outcome.info_gain,
        outcome.apparatus_entropy,
    ));

    let violated = checks
        .iter()
        .any(|c| matches!(c.status, CheckStatus::Violated));
    if violated {
        info("at least one certified inequality check failed");
    }

    let report = RunReport::assemble(
        model.system_dim(),
        model.apparatus_dim(),
        &outcome,
        &c_classical,
        &e_re,
        &tri,
        &checks,
        full,
    );
    Ok((report, violated))
}

/// One-parameter families `qmeas sweep` understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Qubit apparatus spectrum `(p, 1-p)`, `p` from 0 to 1.
    SpectrumP,
    /// Real qubit amplitudes `(cos θ, sin θ)`, `θ` from 0 to π/4.
    AmpTheta,
}

impl SweepParam {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "spectrum_p" => Ok(SweepParam::SpectrumP),
            "amp_theta" => Ok(SweepParam::AmpTheta),
            other => bail!(
                "unknown sweep parameter {other:?}, expected \"spectrum_p\" or \"amp_theta\""
            ),
        }
    }
}

/// Sweep one model parameter and stream a CSV table of the capacity
/// trade-off quantities. The non-swept parts of the model come from the
/// config unchanged.
pub fn execute_sweep(
    model: &MeasurementModel,
    param: SweepParam,
    steps: usize,
    out: &mut dyn Write,
) -> Result<()> {
    if steps < 2 {
        bail!("sweep needs at least 2 steps, got {steps}");
    }
    match param {
        SweepParam::SpectrumP if model.apparatus_dim() != 2 => {
            bail!(
                "spectrum_p sweeps a qubit apparatus, but apparatus_dim is {}",
                model.apparatus_dim()
            );
        }
        SweepParam::AmpTheta if model.system_dim() != 2 => {
            bail!(
                "amp_theta sweeps a two-level system, but the config has {} amplitudes",
                model.system_dim()
            );
        }
        _ => {}
    }

    writeln!(out, "param,I_m,S_rho,sum,logN,margin,disturbance")?;
    let log_n = (model.apparatus_dim() as f64).log2();
    for j in 0..steps {
        let fraction = j as f64 / (steps - 1) as f64;
        let (value, point) = match param {
            SweepParam::SpectrumP => {
                let mut m = model.clone();
                m.apparatus_spectrum = vec![fraction, 1.0 - fraction];
                (fraction, m)
            }
            SweepParam::AmpTheta => {
                let theta = std::f64::consts::FRAC_PI_4 * fraction;
                let mut m = model.clone();
                m.system_amplitudes = vec![
                    Complex64::new(theta.cos(), 0.0),
                    Complex64::new(theta.sin(), 0.0),
                ];
                (theta, m)
            }
        };
        let outcome = run_measurement(&point)?;
        debug(&format!("sweep point {value:.6}: I_m = {:.6}", outcome.info_gain));
        writeln!(
            out,
            "{value:.8e},{:.8e},{:.8e},{:.8e},{log_n:.8e},{:.8e},{:.8e}",
            outcome.info_gain,
            outcome.apparatus_entropy,
            outcome.info_gain + outcome.apparatus_entropy,
            outcome.uncertainty_margin,
            outcome.disturbance,
        )?;
    }
    Ok(())
}

/// Per-check tallies over one fuzz campaign.
#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    passed: usize,
    failed: usize,
    inconclusive: usize,
}

impl Tally {
    fn record(&mut self, status: CheckStatus) {
        match status {
            CheckStatus::Verified | CheckStatus::Consistent => self.passed += 1,
            CheckStatus::Violated => self.failed += 1,
            CheckStatus::Inconclusive => self.inconclusive += 1,
        }
    }
}

/// Drive `n` random models through the measurement pipeline and tally every
/// named inequality check. The purified tripartite stage runs only for
/// apparatus dimensions up to [`FUZZ_TRIPARTITE_MAX_N`] to keep large
/// campaigns fast. Returns `true` when no check failed.
pub fn execute_fuzz(n: usize, seed: u64, max_dim: usize, out: &mut dyn Write) -> Result<bool> {
    if n == 0 {
        bail!("fuzz needs --n at least 1");
    }
    if !(2..=4).contains(&max_dim) {
        bail!("fuzz --max-dim must be between 2 and 4, got {max_dim}");
    }

    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut tripartite_models = 0usize;

    for i in 0..n {
        let mut rng = stream_rng(seed, i as u64);
        let model = sampling::random_model(&mut rng, max_dim);
        let outcome = run_measurement(&model)?;
        debug(&format!(
            "model {i}: N = {}, d_S = {}, margin = {:.3e}",
            model.apparatus_dim(),
            model.system_dim(),
            outcome.uncertainty_margin
        ));

        tallies
            .entry("uncertainty_relation")
            .or_default()
            .record(if outcome.uncertainty_margin >= -MARGIN_TOL {
                CheckStatus::Verified
            } else {
                CheckStatus::Violated
            });

        let reduced = OptimizerConfig {
            restarts: 1,
            max_iters: 150,
            seed: derive_seed(seed, i as u64),
            ..OptimizerConfig::default()
        };
        let ub = relative_entropy_of_entanglement_ub(&outcome.rho_f, &reduced)?;
        tallies
            .entry("entanglement_sandwich")
            .or_default()
            .record(if outcome.ent_lower_bound <= ub.value + SANDWICH_TOL {
                CheckStatus::Verified
            } else {
                CheckStatus::Violated
            });

        if model.apparatus_dim() <= FUZZ_TRIPARTITE_MAX_N {
            tripartite_models += 1;
            let tri = purified_measurement(&model, &reduced)?;
            for check in tri
                .checks
                .iter()
                .cloned()
                .chain(check_tripartite_bounds(&tri))
                .chain(check_efficiency_bounds(
                    &tri,
                    outcome.info_gain,
                    outcome.apparatus_entropy,
                ))
            {
                tallies.entry(check.name).or_default().record(check.status);
            }
        }
    }

    writeln!(out, "models: {n} (tripartite evaluated on {tripartite_models})")?;
    let mut total_failed = 0usize;
    for (name, tally) in &tallies {
        total_failed += tally.failed;
        writeln!(
            out,
            "{name}: passed={} failed={} inconclusive={}",
            tally.passed, tally.failed, tally.inconclusive
        )?;
    }
    Ok(total_failed == 0)
}
