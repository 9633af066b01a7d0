//! Environment-purified picture of the measurement.
//!
//! Purifying the initially mixed apparatus with an environment `E` turns the
//! whole measurement into a unitary on a pure tripartite state over
//! `(E, A, S)`. All single and pair marginal entropies are then meaningful,
//! and the entanglement bounds for pure tripartite states become checkable:
//!
//! ```text
//! max{E(XY) + S(Z)}  ≤  E(EAS)  ≤  min{S(X) + S(Y)}
//! ```
//!
//! together with two corollaries tying the measurement's efficiency to
//! tripartite entanglement. Because the entanglement estimates are one-sided
//! (upper estimates from explicit separable candidates, lower bounds from
//! entropy differences), every check records which side each number is on and
//! only claims what that combination logically supports.

use crate::entanglement::{relative_entropy_of_entanglement_ub, OptResult, SeparableAnsatz};
use crate::entropy;
use crate::error::{invalid_arg, Result};
use crate::measurement::{self, MeasurementModel};
use crate::optimize::{derive_seed, OptimizerConfig};
use crate::state::{partial_trace, purify, DensityMatrix, PureState};

/// Whether a reported number is exact, an upper estimate, or a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Exact,
    UpperEstimate,
    LowerBound,
}

/// Outcome of comparing two one-sided quantities.
///
/// * `Verified`: the inequality is certified (estimate directions make the
///   comparison conclusive).
/// * `Consistent`: the comparison holds, but the estimate directions cannot
///   certify the underlying inequality — only contradict it.
/// * `Inconclusive`: the comparison failed, but the estimate directions mean
///   that proves nothing (e.g. an upper estimate exceeding an exact bound).
/// * `Violated`: the comparison failed in a direction that certifies a real
///   inconsistency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Verified,
    Consistent,
    Inconclusive,
    Violated,
}

/// One recorded inequality `lhs ≤ rhs + tol`, with the bound kind of each
/// side. Diagnostic equality checks store the observed deviation as `lhs`
/// and the tolerance as `rhs`.
#[derive(Clone, Debug)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub lhs_kind: BoundKind,
    pub rhs_kind: BoundKind,
    pub status: CheckStatus,
}

impl InequalityCheck {
    /// True when the check did not fail: either certified or consistent.
    pub fn satisfied(&self) -> bool {
        matches!(self.status, CheckStatus::Verified | CheckStatus::Consistent)
    }
}

/// Slack allowed when comparing quantities that involve optimizer output.
pub const ESTIMATE_TOL: f64 = 1e-6;

/// Tolerance for exact-arithmetic identities on the purified state.
const PASSIVITY_TOL: f64 = 1e-9;
const COMPLEMENTARITY_TOL: f64 = 1e-8;
const REDUCTION_TOL: f64 = 1e-9;

/// Largest total dimension `N·N·d_S` the purified pipeline accepts.
pub const MAX_TOTAL_DIM: usize = 64;

/// Everything computed from one purified measurement run.
///
/// Subsystem order of `final_state` is `(E, A, S)` with dimensions
/// `[N, N, d_S]`. Entropies are in bits. The entanglement fields are upper
/// estimates (explicit separable candidates); `checks` holds the structural
/// identities verified during construction.
#[derive(Clone, Debug)]
pub struct TripartiteOutcome {
    pub final_state: PureState,
    pub s_env: f64,
    pub s_app: f64,
    pub s_sys: f64,
    pub s_env_app: f64,
    pub s_env_sys: f64,
    pub s_app_sys: f64,
    pub rho_env_app: DensityMatrix,
    pub rho_env_sys: DensityMatrix,
    pub rho_app_sys: DensityMatrix,
    /// Upper estimate of `E(E:A')`.
    pub e_env_app: OptResult<SeparableAnsatz>,
    /// Upper estimate of `E(A':S')`.
    pub e_app_sys: OptResult<SeparableAnsatz>,
    /// Upper estimate of the fully separable `E(E:A':S')`.
    pub e_tri_ub: OptResult<SeparableAnsatz>,
    pub checks: Vec<InequalityCheck>,
}

/// Purify the apparatus, run the correlating unitary on `A ⊗ S`, and compute
/// the marginal entropies and entanglement estimates of the resulting pure
/// tripartite state. The optimizer configuration seeds and budgets the three
/// entanglement searches.
pub fn purified_measurement(
    model: &MeasurementModel,
    cfg: &OptimizerConfig,
) -> Result<TripartiteOutcome> {
    model.validate()?;
    cfg.validate()?;
    let n = model.apparatus_dim();
    let d = model.system_dim();
    let total = n * n * d;
    if total > MAX_TOTAL_DIM {
        return Err(invalid_arg!(
            "purified_measurement: total dimension {total} exceeds the supported cap {MAX_TOTAL_DIM}"
        ));
    }

    // The plain measurement run provides ρ_f for the reduction cross-check
    // and the prior apparatus entropy for the passivity check.
    let outcome = measurement::run_measurement(model)?;

    // |Ψ_EA⟩ ⊗ |ψ_S⟩, then I_E ⊗ U.
    let psi_ea = purify(&model.apparatus_state())?;
    let amplitudes = measurement::normalized_amplitudes(model);
    let u = measurement::interaction_unitary(model)?;
    let block = n * d;
    let mut total_amps = vec![num_complex::Complex64::new(0.0, 0.0); total];
    for e in 0..n {
        let mut slice = vec![num_complex::Complex64::new(0.0, 0.0); block];
        for k in 0..n {
            let ea = psi_ea.amplitudes()[e * n + k];
            for (i, a) in amplitudes.iter().enumerate() {
                slice[k * d + i] = ea * a;
            }
        }
        let rotated = u.mul_vec(&slice);
        total_amps[e * block..(e + 1) * block].copy_from_slice(&rotated);
    }
    let final_state = PureState::new(total_amps, vec![n, n, d])?;
    let rho_total = final_state.to_density();

    // Marginals and their entropies.
    let rho_env = partial_trace(&rho_total, &[0])?;
    let rho_app = partial_trace(&rho_total, &[1])?;
    let rho_sys = partial_trace(&rho_total, &[2])?;
    let rho_env_app = partial_trace(&rho_total, &[0, 1])?;
    let rho_env_sys = partial_trace(&rho_total, &[0, 2])?;
    let rho_app_sys = partial_trace(&rho_total, &[1, 2])?;
    let s_env = entropy::von_neumann_entropy(&rho_env)?;
    let s_app = entropy::von_neumann_entropy(&rho_app)?;
    let s_sys = entropy::von_neumann_entropy(&rho_sys)?;
    let s_env_app = entropy::von_neumann_entropy(&rho_env_app)?;
    let s_env_sys = entropy::von_neumann_entropy(&rho_env_sys)?;
    let s_app_sys = entropy::von_neumann_entropy(&rho_app_sys)?;

    // Entanglement estimates, each with its own derived seed so the three
    // searches draw independent restart streams.
    let sub_cfg = |tag: u64| OptimizerConfig {
        seed: derive_seed(cfg.seed, tag),
        ..*cfg
    };
    let e_env_app = relative_entropy_of_entanglement_ub(&rho_env_app, &sub_cfg(0xEA))?;
    let e_app_sys = relative_entropy_of_entanglement_ub(&rho_app_sys, &sub_cfg(0xA5))?;
    let e_tri_ub = relative_entropy_of_entanglement_ub(&rho_total, &sub_cfg(0x7F1))?;

    // Structural identities of the construction.
    let mut checks = Vec::new();
    let passivity = (s_env - outcome.apparatus_entropy).abs();
    checks.push(InequalityCheck {
        name: "environment_passivity",
        lhs_bits: passivity,
        rhs_bits: PASSIVITY_TOL,
        lhs_kind: BoundKind::Exact,
        rhs_kind: BoundKind::Exact,
        status: if passivity <= PASSIVITY_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Violated
        },
    });
    let complementarity = (s_env - s_app_sys)
        .abs()
        .max((s_app - s_env_sys).abs())
        .max((s_sys - s_env_app).abs());
    checks.push(InequalityCheck {
        name: "purity_complementarity",
        lhs_bits: complementarity,
        rhs_bits: COMPLEMENTARITY_TOL,
        lhs_kind: BoundKind::Exact,
        rhs_kind: BoundKind::Exact,
        status: if complementarity <= COMPLEMENTARITY_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Violated
        },
    });
    let reduction = rho_app_sys
        .matrix()
        .max_abs_diff(outcome.rho_f.matrix());
    checks.push(InequalityCheck {
        name: "reduction_consistency",
        lhs_bits: reduction,
        rhs_bits: REDUCTION_TOL,
        lhs_kind: BoundKind::Exact,
        rhs_kind: BoundKind::Exact,
        status: if reduction <= REDUCTION_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Violated
        },
    });

    Ok(TripartiteOutcome {
        final_state,
        s_env,
        s_app,
        s_sys,
        s_env_app,
        s_env_sys,
        s_app_sys,
        rho_env_app,
        rho_env_sys,
        rho_app_sys,
        e_env_app,
        e_app_sys,
        e_tri_ub,
        checks,
    })
}

/// Entropy-difference lower bound on a pair's entanglement, from the stored
/// marginal entropies of the pure total state.
fn pair_lower_bound(s_x: f64, s_y: f64, s_xy: f64) -> f64 {
    (s_x.max(s_y) - s_xy).max(0.0)
}

/// Check both sides of the tripartite bound
/// `max{E(XY)+S(Z)} ≤ E(EAS) ≤ min{S(X)+S(Y)}` for the pure final state.
///
/// The upper side compares the tripartite upper estimate against the exact
/// entropy side: holding certifies it. The lower side is asserted only in
/// the sound direction: its true left side needs exact pair entanglements,
/// for which only one-sided numerics exist, so certified entropy lower
/// bounds stand in for the pair terms and are compared against the
/// tripartite upper estimate. Holding is consistency; failing would certify
/// a real violation. (Verifying the lower side outright would need pair
/// upper estimates to fit under a certified lower bound on `E(EAS)`, and the
/// best such bound for a pure state — the largest single-marginal entropy —
/// genuinely sits below the pair side for most models, so that comparison
/// decides nothing and is not reported.)
pub fn check_tripartite_bounds(t: &TripartiteOutcome) -> Vec<InequalityCheck> {
    let mut checks = Vec::new();

    let min_side = (t.s_env + t.s_app)
        .min(t.s_env + t.s_sys)
        .min(t.s_app + t.s_sys);
    checks.push(InequalityCheck {
        name: "tripartite_upper",
        lhs_bits: t.e_tri_ub.value,
        rhs_bits: min_side,
        lhs_kind: BoundKind::UpperEstimate,
        rhs_kind: BoundKind::Exact,
        status: if t.e_tri_ub.value <= min_side + ESTIMATE_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Inconclusive
        },
    });

    let lb_ea = pair_lower_bound(t.s_env, t.s_app, t.s_env_app);
    let lb_es = pair_lower_bound(t.s_env, t.s_sys, t.s_env_sys);
    let lb_as = pair_lower_bound(t.s_app, t.s_sys, t.s_app_sys);
    let lower_side = (lb_ea + t.s_sys)
        .max(lb_es + t.s_app)
        .max(lb_as + t.s_env);
    checks.push(InequalityCheck {
        name: "tripartite_lower_consistency",
        lhs_bits: lower_side,
        rhs_bits: t.e_tri_ub.value,
        lhs_kind: BoundKind::LowerBound,
        rhs_kind: BoundKind::UpperEstimate,
        status: if lower_side <= t.e_tri_ub.value + ESTIMATE_TOL {
            CheckStatus::Consistent
        } else {
            CheckStatus::Violated
        },
    });

    checks
}

/// Check the two measurement corollaries against quantities from the same
/// model run: the entropy/tripartite-gap relation
/// `S(ρ) ≤ E(E:A':S') − E(A':S')` (consistency direction only, since the
/// right side combines an upper estimate with a lower bound), and the fully
/// certified `E(E:A') + I_m ≤ S(ρ_A')`, whose left side is an upper
/// estimate, so passing verifies the inequality for this instance.
pub fn check_efficiency_bounds(
    t: &TripartiteOutcome,
    info_gain: f64,
    s_rho: f64,
) -> Vec<InequalityCheck> {
    let mut checks = Vec::new();

    let lb_as = pair_lower_bound(t.s_app, t.s_sys, t.s_app_sys);
    let gap_overestimate = t.e_tri_ub.value - lb_as;
    checks.push(InequalityCheck {
        name: "tripartite_gap",
        lhs_bits: s_rho,
        rhs_bits: gap_overestimate,
        lhs_kind: BoundKind::Exact,
        rhs_kind: BoundKind::UpperEstimate,
        status: if s_rho <= gap_overestimate + ESTIMATE_TOL {
            CheckStatus::Consistent
        } else {
            CheckStatus::Violated
        },
    });

    let lhs = t.e_env_app.value + info_gain;
    checks.push(InequalityCheck {
        name: "info_env_entanglement",
        lhs_bits: lhs,
        rhs_bits: t.s_app,
        lhs_kind: BoundKind::UpperEstimate,
        rhs_kind: BoundKind::Exact,
        status: if lhs <= t.s_app + ESTIMATE_TOL {
            CheckStatus::Verified
        } else {
            CheckStatus::Inconclusive
        },
    });

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Interaction;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_cfg() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 2,
            max_iters: 300,
            tol: 1e-9,
            seed: 11,
            outcomes: None,
        }
    }

    fn model(amplitudes: Vec<Complex64>, spectrum: Vec<f64>) -> MeasurementModel {
        MeasurementModel {
            system_amplitudes: amplitudes,
            apparatus_spectrum: spectrum,
            apparatus_basis: None,
            interaction: Interaction::Shift,
        }
    }

    #[test]
    fn pure_apparatus_gives_product_environment() {
        let m = model(vec![c(0.3f64.sqrt(), 0.0), c(0.7f64.sqrt(), 0.0)], vec![1.0, 0.0]);
        let t = purified_measurement(&m, &small_cfg()).unwrap();
        // The purification of a pure state is a product, so the environment
        // stays pure and unentangled from everything.
        assert!(t.s_env <= 1e-9);
        assert!(t.e_env_app.value <= 1e-3);
        // The tripartite entanglement reduces to the A'S' bipartite case.
        let h = -(0.3f64.log2() * 0.3 + 0.7f64.log2() * 0.7);
        assert_abs_diff_eq!(t.e_tri_ub.value, h, epsilon = 1e-2);
        assert!(t.e_tri_ub.value >= h - ESTIMATE_TOL);
        for check in &t.checks {
            assert!(check.satisfied(), "{} failed", check.name);
        }
    }

    #[test]
    fn uniform_mixed_case_matches_marginal_oracle() {
        // r = (1/2, 1/2), uniform amplitudes, N = d_S = 2: the final state is
        // an even-parity GHZ-type state with every single marginal maximally
        // mixed.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = model(vec![c(s, 0.0), c(s, 0.0)], vec![0.5, 0.5]);
        let t = purified_measurement(&m, &small_cfg()).unwrap();
        assert_abs_diff_eq!(t.s_env, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.s_app, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.s_sys, 1.0, epsilon = 1e-9);
        // ρ_EA' is an equal mixture of two Bell states, which is separable.
        assert!(t.e_env_app.value <= 1e-3, "e_env_app = {}", t.e_env_app.value);

        let bounds = check_tripartite_bounds(&t);
        let upper = bounds.iter().find(|c| c.name == "tripartite_upper").unwrap();
        assert_abs_diff_eq!(upper.rhs_bits, 2.0, epsilon = 1e-9);
        assert!(upper.status == CheckStatus::Verified);
        assert!(t.e_tri_ub.value >= 1.0 - 1e-2);
        let lower = bounds
            .iter()
            .find(|c| c.name == "tripartite_lower_consistency")
            .unwrap();
        assert_abs_diff_eq!(lower.lhs_bits, 1.0, epsilon = 1e-8);
        assert!(lower.satisfied());

        // Certified corollary: E(E:A') + I_m ≤ S(ρ_A') with I_m = 0 here.
        let outcome = measurement::run_measurement(&m).unwrap();
        assert!(outcome.info_gain.abs() <= 1e-9);
        let eff = check_efficiency_bounds(&t, outcome.info_gain, outcome.apparatus_entropy);
        let certified = eff
            .iter()
            .find(|c| c.name == "info_env_entanglement")
            .unwrap();
        assert!(certified.status == CheckStatus::Verified);
    }

    #[test]
    fn basis_amplitude_leaves_system_pure() {
        let m = model(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![0.75, 0.25]);
        let t = purified_measurement(&m, &small_cfg()).unwrap();
        let outcome = measurement::run_measurement(&m).unwrap();
        // Measuring a basis state does nothing: the system marginal stays
        // pure and the apparatus keeps its prior entropy.
        assert!(t.s_sys <= 1e-9);
        assert_abs_diff_eq!(t.s_app, outcome.apparatus_entropy, epsilon = 1e-9);
        assert!(t.e_app_sys.value <= 1e-3);
        // E(E:A') is exactly the purification entanglement S(ρ), so the
        // certified corollary holds with equality.
        let eff = check_efficiency_bounds(&t, outcome.info_gain, outcome.apparatus_entropy);
        for check in &eff {
            assert!(check.satisfied(), "{} failed", check.name);
        }
        let certified = eff
            .iter()
            .find(|c| c.name == "info_env_entanglement")
            .unwrap();
        assert!(certified.status == CheckStatus::Verified);
        assert_abs_diff_eq!(certified.lhs_bits, certified.rhs_bits, epsilon = 1e-4);
    }

    #[test]
    fn fully_product_case_has_no_entanglement_anywhere() {
        let m = model(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![1.0, 0.0]);
        let t = purified_measurement(&m, &small_cfg()).unwrap();
        assert!(t.e_tri_ub.value <= ESTIMATE_TOL);
        assert!(t.e_env_app.value <= ESTIMATE_TOL);
        assert!(t.e_app_sys.value <= ESTIMATE_TOL);
        for check in check_tripartite_bounds(&t) {
            assert!(check.satisfied(), "{} failed", check.name);
        }
    }

    #[test]
    fn construction_identities_hold_for_random_models() {
        let mut rng = crate::optimize::stream_rng(23, 9);
        for _ in 0..3 {
            let m = crate::sampling::random_model(&mut rng, 3);
            let t = purified_measurement(&m, &small_cfg()).unwrap();
            for check in &t.checks {
                assert!(
                    check.satisfied(),
                    "{}: deviation {} over tolerance {}",
                    check.name,
                    check.lhs_bits,
                    check.rhs_bits
                );
            }
            // Purity complementarity also via the stored entropies.
            assert_abs_diff_eq!(t.s_env, t.s_app_sys, epsilon = 1e-8);
            assert_abs_diff_eq!(t.s_app, t.s_env_sys, epsilon = 1e-8);
            assert_abs_diff_eq!(t.s_sys, t.s_env_app, epsilon = 1e-8);
        }
    }

    #[test]
    fn rejects_oversized_models() {
        let m = model(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![0.2; 5],
        );
        // 5 · 5 · 3 = 75 exceeds the cap even though the model itself is valid.
        assert!(m.validate().is_ok());
        assert!(purified_measurement(&m, &small_cfg()).is_err());
    }
}
