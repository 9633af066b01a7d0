//! Serializable report structures for `qmeas run`.
//!
//! Field order is declaration order and every collection is emitted in a
//! deterministic order, so identical inputs produce byte-identical JSON.
//! Complex numbers appear as `[re, im]` pairs; non-finite scalars are
//! serialized as the string `"inf"` so strict JSON readers never see NaN.

use num_complex::Complex64;
use qmeas_core::{
    BoundKind, CheckStatus, ComplexMatrix, DensityMatrix, InequalityCheck, MeasurementOutcome,
    OptResult, Povm, SeparableAnsatz, TripartiteOutcome,
};
use serde::{Serialize, Serializer};

fn ser_bits<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        s.serialize_f64(*value)
    } else if *value > 0.0 {
        s.serialize_str("inf")
    } else if *value < 0.0 {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("nan")
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    let d = m.dim();
    (0..d)
        .map(|i| (0..d).map(|j| pair(m.get(i, j))).collect())
        .collect()
}

fn density_rows(rho: &DensityMatrix) -> Vec<Vec<[f64; 2]>> {
    matrix_rows(rho.matrix())
}

pub fn kind_label(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::Exact => "exact",
        BoundKind::UpperEstimate => "upper_estimate",
        BoundKind::LowerBound => "lower_bound",
    }
}

pub fn status_label(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Verified => "verified",
        CheckStatus::Consistent => "consistent",
        CheckStatus::Inconclusive => "inconclusive",
        CheckStatus::Violated => "violated",
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    #[serde(serialize_with = "ser_bits")]
    pub lhs_bits: f64,
    #[serde(serialize_with = "ser_bits")]
    pub rhs_bits: f64,
    pub lhs_kind: &'static str,
    pub rhs_kind: &'static str,
    pub status: &'static str,
    pub satisfied: bool,
}

impl CheckReport {
    pub fn from_check(check: &InequalityCheck) -> Self {
        CheckReport {
            name: check.name,
            lhs_bits: check.lhs_bits,
            rhs_bits: check.rhs_bits,
            lhs_kind: kind_label(check.lhs_kind),
            rhs_kind: kind_label(check.rhs_kind),
            status: status_label(check.status),
            satisfied: check.satisfied(),
        }
    }
}

/// Summary of one optimization result; the certificate (separable ansatz or
/// POVM) is attached only in `--full` reports.
#[derive(Debug, Serialize)]
pub struct EstimateReport {
    #[serde(serialize_with = "ser_bits")]
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Serialize)]
pub struct AnsatzReport {
    pub weights: Vec<f64>,
    /// `factors[term][party]` is a pure-state vector of `[re, im]` pairs.
    pub factors: Vec<Vec<Vec<[f64; 2]>>>,
    pub dims: Vec<usize>,
}

impl EstimateReport {
    pub fn from_ansatz(opt: &OptResult<SeparableAnsatz>, full: bool) -> Self {
        EstimateReport {
            value: opt.value,
            iterations: opt.iterations,
            converged: opt.converged,
            ansatz: full.then(|| AnsatzReport {
                weights: opt.argument.weights.clone(),
                factors: opt
                    .argument
                    .factors
                    .iter()
                    .map(|term| {
                        term.iter()
                            .map(|party| party.iter().copied().map(pair).collect())
                            .collect()
                    })
                    .collect(),
                dims: opt.argument.dims.clone(),
            }),
            povm: None,
        }
    }

    pub fn from_povm(opt: &OptResult<Povm>, full: bool) -> Self {
        EstimateReport {
            value: opt.value,
            iterations: opt.iterations,
            converged: opt.converged,
            ansatz: None,
            povm: full.then(|| opt.argument.elements().iter().map(matrix_rows).collect()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TripartiteReport {
    #[serde(serialize_with = "ser_bits")]
    pub s_env: f64,
    #[serde(serialize_with = "ser_bits")]
    pub s_app: f64,
    #[serde(serialize_with = "ser_bits")]
    pub s_sys: f64,
    #[serde(serialize_with = "ser_bits")]
    pub s_env_app: f64,
    #[serde(serialize_with = "ser_bits")]
    pub s_env_sys: f64,
    #[serde(serialize_with = "ser_bits")]
    pub s_app_sys: f64,
    /// Purified total state over `(environment, apparatus, system)`.
    pub final_state: Vec<[f64; 2]>,
    pub final_dims: Vec<usize>,
    pub e_env_app: EstimateReport,
    pub e_app_sys: EstimateReport,
    pub e_tri_ub: EstimateReport,
}

impl TripartiteReport {
    pub fn from_outcome(t: &TripartiteOutcome, full: bool) -> Self {
        TripartiteReport {
            s_env: t.s_env,
            s_app: t.s_app,
            s_sys: t.s_sys,
            s_env_app: t.s_env_app,
            s_env_sys: t.s_env_sys,
            s_app_sys: t.s_app_sys,
            final_state: t.final_state.amplitudes().iter().copied().map(pair).collect(),
            final_dims: t.final_state.dims().to_vec(),
            e_env_app: EstimateReport::from_ansatz(&t.e_env_app, full),
            e_app_sys: EstimateReport::from_ansatz(&t.e_app_sys, full),
            e_tri_ub: EstimateReport::from_ansatz(&t.e_tri_ub, full),
        }
    }
}

/// Dense matrix payloads, attached only under `--full`.
#[derive(Debug, Serialize)]
pub struct MatricesReport {
    pub rho_f: Vec<Vec<[f64; 2]>>,
    pub rho_f_dephased: Vec<Vec<[f64; 2]>>,
    pub branch_states: Vec<Vec<Vec<[f64; 2]>>>,
    pub rho_env_app: Vec<Vec<[f64; 2]>>,
    pub rho_env_sys: Vec<Vec<[f64; 2]>>,
    pub rho_app_sys: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub system_dim: usize,
    pub apparatus_dim: usize,
    #[serde(rename = "I_m", serialize_with = "ser_bits")]
    pub i_m: f64,
    #[serde(rename = "S_rho", serialize_with = "ser_bits")]
    pub s_rho: f64,
    #[serde(rename = "logN", serialize_with = "ser_bits")]
    pub log_n: f64,
    #[serde(serialize_with = "ser_bits")]
    pub uncertainty_margin: f64,
    #[serde(serialize_with = "ser_bits")]
    pub disturbance: f64,
    #[serde(serialize_with = "ser_bits")]
    pub ent_lower_bound: f64,
    pub branch_probs: Vec<f64>,
    pub c_classical: EstimateReport,
    pub e_re_ub: EstimateReport,
    pub tripartite: TripartiteReport,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatricesReport>,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        system_dim: usize,
        apparatus_dim: usize,
        outcome: &MeasurementOutcome,
        c_classical: &OptResult<Povm>,
        e_re_ub: &OptResult<SeparableAnsatz>,
        tri: &TripartiteOutcome,
        checks: &[InequalityCheck],
        full: bool,
    ) -> Self {
        RunReport {
            system_dim,
            apparatus_dim,
            i_m: outcome.info_gain,
            s_rho: outcome.apparatus_entropy,
            log_n: (apparatus_dim as f64).log2(),
            uncertainty_margin: outcome.uncertainty_margin,
            disturbance: outcome.disturbance,
            ent_lower_bound: outcome.ent_lower_bound,
            branch_probs: outcome.branch_probs.clone(),
            c_classical: EstimateReport::from_povm(c_classical, full),
            e_re_ub: EstimateReport::from_ansatz(e_re_ub, full),
            tripartite: TripartiteReport::from_outcome(tri, full),
            checks: checks.iter().map(CheckReport::from_check).collect(),
            matrices: full.then(|| MatricesReport {
                rho_f: density_rows(&outcome.rho_f),
                rho_f_dephased: density_rows(&outcome.rho_f_dephased),
                branch_states: outcome.branch_states.iter().map(density_rows).collect(),
                rho_env_app: density_rows(&tri.rho_env_app),
                rho_env_sys: density_rows(&tri.rho_env_sys),
                rho_app_sys: density_rows(&tri.rho_app_sys),
            }),
        }
    }
}
