//! The measurement model: a pointer apparatus prepared in a (generally mixed)
//! state correlates itself with a quantum system through a cyclic-shift
//! interaction, and we quantify what the measurement achieves.
//!
//! Conventions: the apparatus has dimension `N` with eigenvalue spectrum `r`
//! in an orthonormal eigenbasis (optionally rotated by a unitary `W` from the
//! computational basis); the measured system has dimension `d_S ≤ N` and is
//! prepared in the pure state `Σ a_i |i⟩`. The joint space orders the
//! apparatus first, so basis states are `|k⟩_A ⊗ |i⟩_S ↦ k·d_S + i`.

use num_complex::Complex64;

use crate::entanglement;
use crate::entropy::{self, Ensemble};
use crate::error::{invalid_arg, Result};
use crate::matrix::{self, ComplexMatrix};
use crate::state::DensityMatrix;

/// The system-apparatus coupling. Only the cyclic shift
/// `|r_k⟩|i⟩ ↦ |r_{(k+i) mod N}⟩|i⟩` is implemented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interaction {
    Shift,
}

/// Full description of one measurement setup.
#[derive(Clone, Debug)]
pub struct MeasurementModel {
    /// System amplitudes `a_i`, normalized within `1e-10`.
    pub system_amplitudes: Vec<Complex64>,
    /// Apparatus eigenvalues `r_k`: a probability vector within `1e-10`.
    pub apparatus_spectrum: Vec<f64>,
    /// Apparatus eigenbasis as a unitary `W` (columns are the eigenvectors);
    /// `None` means the computational basis (diagonal apparatus).
    pub apparatus_basis: Option<ComplexMatrix>,
    pub interaction: Interaction,
}

impl MeasurementModel {
    pub fn system_dim(&self) -> usize {
        self.system_amplitudes.len()
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_spectrum.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d_s = self.system_dim();
        let n = self.apparatus_dim();
        if d_s == 0 {
            return Err(invalid_arg!("measurement model: empty system amplitudes"));
        }
        if n < d_s {
            return Err(invalid_arg!(
                "measurement model: apparatus dimension {n} is below system dimension {d_s}"
            ));
        }
        let norm = self
            .system_amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid_arg!(
                "measurement model: system amplitudes have norm {norm:.12}, expected 1 within 1e-10"
            ));
        }
        let mut sum = 0.0;
        for (k, &r) in self.apparatus_spectrum.iter().enumerate() {
            if r < -1e-12 {
                return Err(invalid_arg!(
                    "measurement model: spectrum entry {k} is {r:.3e}, below -1e-12"
                ));
            }
            sum += r.max(0.0);
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(invalid_arg!(
                "measurement model: spectrum sums to {sum:.12}, expected 1 within 1e-10"
            ));
        }
        if let Some(w) = &self.apparatus_basis {
            if w.dim() != n {
                return Err(invalid_arg!(
                    "measurement model: basis dimension {} does not match apparatus dimension {n}",
                    w.dim()
                ));
            }
            if !matrix::is_unitary(w, 1e-10) {
                return Err(invalid_arg!(
                    "measurement model: apparatus basis is not unitary within 1e-10"
                ));
            }
        }
        Ok(())
    }

    /// The initial apparatus state `W · diag(r) · W†`.
    pub fn apparatus_state(&self) -> DensityMatrix {
        let spectrum: Vec<f64> = self.apparatus_spectrum.iter().map(|r| r.max(0.0)).collect();
        let diag = ComplexMatrix::diag_real(&spectrum);
        let matrix = match &self.apparatus_basis {
            Some(w) => w.matmul(&diag).matmul(&w.adjoint()).hermitized(),
            None => diag,
        };
        DensityMatrix::new_unchecked(matrix, vec![self.apparatus_dim()])
    }

    /// Branch probabilities `|a_i|²` (renormalized exactly).
    pub fn branch_probs(&self) -> Vec<f64> {
        let norm_sqr: f64 = self.system_amplitudes.iter().map(|a| a.norm_sqr()).sum();
        self.system_amplitudes
            .iter()
            .map(|a| a.norm_sqr() / norm_sqr)
            .collect()
    }
}

/// Everything computed from one run of the measurement.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    /// Joint apparatus-system state after the interaction, dims `[N, d_S]`.
    pub rho_f: DensityMatrix,
    /// `rho_f` with the system coherences between branches removed (the state
    /// an observer holding only the measurement record can use).
    pub rho_f_dephased: DensityMatrix,
    /// `|a_i|²` for each system basis state.
    pub branch_probs: Vec<f64>,
    /// Conditional apparatus states `ρ_ii`, one per branch.
    pub branch_states: Vec<DensityMatrix>,
    /// Information gain `I_m`: the Holevo quantity of the branch ensemble.
    pub info_gain: f64,
    /// Initial apparatus entropy `S(ρ)`.
    pub apparatus_entropy: f64,
    /// Disturbance `D = H(|a|²)`: the entropy induced in the system when the
    /// branch coherences decohere.
    pub disturbance: f64,
    /// `log₂ N - I_m - S(ρ)`: nonnegative by the information-entropy
    /// trade-off, zero exactly when the apparatus capacity is saturated.
    pub uncertainty_margin: f64,
    /// `max(0, max(S(ρ_A'), S(ρ_S')) - S(ρ_f))`: certified lower bound on the
    /// relative entropy of entanglement of `rho_f`.
    pub ent_lower_bound: f64,
}

/// The shift unitary `|k⟩_A |i⟩_S ↦ |(k+i) mod N⟩_A |i⟩_S` on the
/// computational product basis, apparatus-major.
pub fn build_measurement_unitary(d_s: usize, n: usize) -> Result<ComplexMatrix> {
    if d_s == 0 {
        return Err(invalid_arg!("build_measurement_unitary: system dimension must be positive"));
    }
    if n < d_s {
        return Err(invalid_arg!(
            "build_measurement_unitary: apparatus dimension {n} is below system dimension {d_s}"
        ));
    }
    let dim = n * d_s;
    let mut u = ComplexMatrix::zeros(dim);
    for k in 0..n {
        for i in 0..d_s {
            let col = k * d_s + i;
            let row = ((k + i) % n) * d_s + i;
            u.set(row, col, Complex64::new(1.0, 0.0));
        }
    }
    Ok(u)
}

/// The full correlating unitary on apparatus ⊗ system, conjugated into the
/// apparatus eigenbasis when the model specifies one.
pub(crate) fn interaction_unitary(model: &MeasurementModel) -> Result<ComplexMatrix> {
    let u_shift = build_measurement_unitary(model.system_dim(), model.apparatus_dim())?;
    Ok(match &model.apparatus_basis {
        Some(w) => {
            let w_full = matrix::tensor_product(w, &ComplexMatrix::identity(model.system_dim()));
            w_full.matmul(&u_shift).matmul(&w_full.adjoint())
        }
        None => u_shift,
    })
}

/// The model's system amplitudes renormalized to an exact unit vector.
pub(crate) fn normalized_amplitudes(model: &MeasurementModel) -> Vec<Complex64> {
    let norm = model
        .system_amplitudes
        .iter()
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    model.system_amplitudes.iter().map(|a| a / norm).collect()
}

/// Run the measurement: correlate apparatus and system, then compute the
/// information gain, disturbance, and uncertainty margin.
pub fn run_measurement(model: &MeasurementModel) -> Result<MeasurementOutcome> {
    model.validate()?;
    let d_s = model.system_dim();
    let n = model.apparatus_dim();

    let u = interaction_unitary(model)?;
    let rho_app = model.apparatus_state();
    let amplitudes = normalized_amplitudes(model);
    let system = ComplexMatrix::outer(&amplitudes);
    let rho_0 = matrix::tensor_product(rho_app.matrix(), &system);
    let rho_f_matrix = u.matmul(&rho_0).matmul(&u.adjoint()).hermitized();
    let rho_f = DensityMatrix::new_unchecked(rho_f_matrix, vec![n, d_s]);

    // Dephased copy: zero every apparatus block that connects two different
    // system basis states.
    let mut dephased = rho_f.matrix().clone();
    for k in 0..n {
        for k2 in 0..n {
            for i in 0..d_s {
                for j in 0..d_s {
                    if i != j {
                        dephased.set(k * d_s + i, k2 * d_s + j, Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }
    let rho_f_dephased = DensityMatrix::new_unchecked(dephased, vec![n, d_s]);

    let branch_probs = model.branch_probs();
    let mut branch_states = Vec::with_capacity(d_s);
    for i in 0..d_s {
        let p = branch_probs[i];
        let state = if p > 1e-12 {
            let mut block = ComplexMatrix::zeros(n);
            for k in 0..n {
                for k2 in 0..n {
                    block.set(k, k2, rho_f.matrix().get(k * d_s + i, k2 * d_s + i));
                }
            }
            DensityMatrix::new_unchecked(
                block.scale(Complex64::new(1.0 / p, 0.0)).hermitized(),
                vec![n],
            )
        } else {
            // Unpopulated branch: the analytic conditional state, the
            // apparatus spectrum cyclically shifted by i in its eigenbasis.
            let shifted: Vec<f64> = (0..n)
                .map(|k| model.apparatus_spectrum[(k + n - i % n) % n].max(0.0))
                .collect();
            let diag = ComplexMatrix::diag_real(&shifted);
            let matrix = match &model.apparatus_basis {
                Some(w) => w.matmul(&diag).matmul(&w.adjoint()).hermitized(),
                None => diag,
            };
            DensityMatrix::new_unchecked(matrix, vec![n])
        };
        branch_states.push(state);
    }

    let info_gain = information_gain(&branch_probs, &branch_states)?;
    let apparatus_entropy = entropy::von_neumann_entropy(&rho_app)?;
    let disturbance = disturbance(&model.system_amplitudes)?;
    let uncertainty_margin = (n as f64).log2() - info_gain - apparatus_entropy;
    let ent_lower_bound = entanglement::entanglement_lower_bound(&rho_f)?;

    Ok(MeasurementOutcome {
        rho_f,
        rho_f_dephased,
        branch_probs,
        branch_states,
        info_gain,
        apparatus_entropy,
        disturbance,
        uncertainty_margin,
        ent_lower_bound,
    })
}

/// Information gain of a measurement record: the Holevo quantity
/// `S(Σ p_i ρ_i) - Σ p_i S(ρ_i)` of the conditional apparatus states.
pub fn information_gain(probs: &[f64], states: &[DensityMatrix]) -> Result<f64> {
    entropy::holevo(&Ensemble::new(probs.to_vec(), states.to_vec())?)
}

/// Measurement disturbance `D = -Σ |a_i|² log₂ |a_i|²`: the entropy the
/// system acquires when the branches decohere.
pub fn disturbance(amplitudes: &[Complex64]) -> Result<f64> {
    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr.sqrt() - 1.0).abs() > 1e-10 {
        return Err(invalid_arg!(
            "disturbance: amplitudes have norm {:.12}, expected 1 within 1e-10",
            norm_sqr.sqrt()
        ));
    }
    let probs: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr() / norm_sqr).collect();
    Ok(entropy::entropy_of_weights(&probs))
}

/// The information-entropy trade-off margin `log₂ N - I_m - S(ρ)`; the
/// trade-off asserts this is nonnegative for every model.
pub fn check_uncertainty(outcome: &MeasurementOutcome) -> f64 {
    let n = outcome.rho_f.dims()[0];
    (n as f64).log2() - outcome.info_gain - outcome.apparatus_entropy
}
