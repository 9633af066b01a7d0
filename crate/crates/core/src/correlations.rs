//! Classical correlations of a bipartite state: the measurement-extractable
//! correlations `C = max_POVM [ S(ρ_other) - Σ_i p_i S(ρ_other|i) ]`, searched
//! over complete rank-one POVMs on one side.

use num_complex::Complex64;

use crate::eigen;
use crate::entropy::{self};
use crate::error::{invalid_arg, Result};
use crate::matrix::ComplexMatrix;
use crate::optimize::{self, NmOptions, OptimizerConfig};
use crate::sampling::standard_normal;
use crate::state::DensityMatrix;

/// Which subsystem of a bipartite state is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasuredSide {
    A,
    B,
}

/// A positive operator-valued measure: elements are PSD and sum to the
/// identity within `1e-8`.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(invalid_arg!("povm: must have at least one element"));
        }
        let dim = elements[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (i, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(invalid_arg!("povm: element {i} has mismatched dimension"));
            }
            let min_eig = eigen::eigenvalues(e)?.first().copied().unwrap_or(0.0);
            if min_eig < -1e-9 {
                return Err(invalid_arg!(
                    "povm: element {i} has negative eigenvalue {min_eig:.3e}"
                ));
            }
            sum = sum.add(e);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > 1e-8 {
            return Err(invalid_arg!(
                "povm: elements sum to identity only within {deviation:.3e} (tolerance 1e-8)"
            ));
        }
        Ok(Povm { elements })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Result of a variational search: the best value found, the argument that
/// achieved it, and how hard the search worked.
#[derive(Clone, Debug)]
pub struct OptResult<T> {
    pub value: f64,
    pub argument: T,
    /// Total iterations across all starts and refinement stages.
    pub iterations: usize,
    /// Whether the winning run met its convergence tolerance.
    pub converged: bool,
}

/// Objective value returned for degenerate parameter points, so the simplex
/// walks away from them.
const PENALTY: f64 = 1e6;

/// Rank-one POVM from `k` unnormalized vectors `v_i` via
/// `E_i = M^{-1/2} v_i v_i† M^{-1/2}` with `M = Σ v_i v_i†`; completeness
/// holds by construction. Returns `None` when `M` is numerically singular.
fn povm_vectors_from_params(params: &[f64], k: usize, d: usize) -> Option<Vec<Vec<Complex64>>> {
    debug_assert_eq!(params.len(), 2 * k * d);
    let vectors: Vec<Vec<Complex64>> = (0..k)
        .map(|i| {
            (0..d)
                .map(|j| Complex64::new(params[2 * (i * d + j)], params[2 * (i * d + j) + 1]))
                .collect()
        })
        .collect();
    let mut m = ComplexMatrix::zeros(d);
    for v in &vectors {
        for a in 0..d {
            for b in 0..d {
                let add = v[a] * v[b].conj();
                m.set(a, b, m.get(a, b) + add);
            }
        }
    }
    let eig = eigen::hermitian_eig(&m.hermitized()).ok()?;
    let max = eig.values.last().copied().unwrap_or(0.0);
    if eig.values[0] <= 1e-12 * max.max(1e-12) {
        return None;
    }
    // M^{-1/2} through the eigenbasis.
    let mut inv_sqrt = ComplexMatrix::zeros(d);
    for (j, &lambda) in eig.values.iter().enumerate() {
        let w = 1.0 / lambda.sqrt();
        for a in 0..d {
            for b in 0..d {
                let add = eig.vectors.get(a, j) * eig.vectors.get(b, j).conj() * w;
                inv_sqrt.set(a, b, inv_sqrt.get(a, b) + add);
            }
        }
    }
    Some(vectors.iter().map(|v| inv_sqrt.mul_vec(v)).collect())
}

/// Measurement update: unnormalized post-measurement state of the unmeasured
/// side for the rank-one element `w w†` applied on `side`.
fn conditional_state(
    rho: &DensityMatrix,
    side: MeasuredSide,
    w: &[Complex64],
) -> (f64, ComplexMatrix) {
    let dims = rho.dims();
    let (da, db) = (dims[0], dims[1]);
    let m = rho.matrix();
    let out_dim = match side {
        MeasuredSide::A => db,
        MeasuredSide::B => da,
    };
    let mut x = ComplexMatrix::zeros(out_dim);
    match side {
        MeasuredSide::B => {
            // X[a,a'] = Σ_{b,b'} w_b w̄_{b'} ρ[(a,b'),(a',b)]
            for a in 0..da {
                for a2 in 0..da {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..db {
                        for b2 in 0..db {
                            acc += w[b] * w[b2].conj() * m.get(a * db + b2, a2 * db + b);
                        }
                    }
                    x.set(a, a2, acc);
                }
            }
        }
        MeasuredSide::A => {
            // X[b,b'] = Σ_{a,a'} w_a w̄_{a'} ρ[(a',b),(a,b')]
            for b in 0..db {
                for b2 in 0..db {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..da {
                        for a2 in 0..da {
                            acc += w[a] * w[a2].conj() * m.get(a2 * db + b, a * db + b2);
                        }
                    }
                    x.set(b, b2, acc);
                }
            }
        }
    }
    let p = x.trace().re;
    (p, x)
}

/// Flatten the columns of `basis` into POVM parameters, padding with zero
/// vectors up to `k` outcomes.
fn params_from_basis(basis: &ComplexMatrix, k: usize) -> Vec<f64> {
    let d = basis.dim();
    let mut params = vec![0.0; 2 * k * d];
    for col in 0..d.min(k) {
        for row in 0..d {
            let z = basis.get(row, col);
            params[2 * (col * d + row)] = z.re;
            params[2 * (col * d + row) + 1] = z.im;
        }
    }
    params
}

/// Classical correlations extractable by measuring `side` of the bipartite
/// state `rho`: maximizes `S(ρ_other) - Σ p_i S(ρ_other | i)` over complete
/// rank-one POVMs with `cfg.outcomes` elements (default: measured dim²).
///
/// Deterministic warm starts (computational basis and marginal eigenbases)
/// are searched before `cfg.restarts` random restarts; the reported value is
/// the best over all starts, so it grows monotonically with `restarts`.
pub fn classical_correlations(
    rho: &DensityMatrix,
    side: MeasuredSide,
    cfg: &OptimizerConfig,
) -> Result<OptResult<Povm>> {
    cfg.validate()?;
    if rho.subsystem_count() != 2 {
        return Err(invalid_arg!(
            "classical_correlations: state has {} subsystems, expected 2",
            rho.subsystem_count()
        ));
    }
    let dims = rho.dims().to_vec();
    let (measured_idx, other_idx) = match side {
        MeasuredSide::A => (0usize, 1usize),
        MeasuredSide::B => (1usize, 0usize),
    };
    let d_meas = dims[measured_idx];
    let d_other = dims[other_idx];
    let k = cfg.outcomes.unwrap_or(d_meas * d_meas);
    if k < d_meas {
        return Err(invalid_arg!(
            "classical_correlations: outcomes = {k} is below the measured dimension {d_meas}"
        ));
    }

    let marginal_meas = crate::state::partial_trace(rho, &[measured_idx])?;
    let marginal_other = crate::state::partial_trace(rho, &[other_idx])?;
    let s_other = entropy::von_neumann_entropy(&marginal_other)?;

    let mut objective = |params: &[f64]| -> f64 {
        let Some(vectors) = povm_vectors_from_params(params, k, d_meas) else {
            return PENALTY;
        };
        let mut mean_residual_entropy = 0.0;
        for w in &vectors {
            let (p, x) = conditional_state(rho, side, w);
            if p <= 1e-12 {
                continue;
            }
            let scaled = x.scale(Complex64::new(1.0 / p, 0.0));
            let Ok(values) = eigen::eigenvalues(&scaled) else {
                return PENALTY;
            };
            mean_residual_entropy += p * entropy::entropy_of_weights(&values);
        }
        -(s_other - mean_residual_entropy)
    };

    // Deterministic warm starts: bases whose projective measurements are
    // optimal for the classically structured states of interest.
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(params_from_basis(&ComplexMatrix::identity(d_meas), k));
    let meas_eig = eigen::hermitian_eig(marginal_meas.matrix())?;
    starts.push(params_from_basis(&meas_eig.vectors, k));
    if d_other == d_meas {
        let other_eig = eigen::hermitian_eig(marginal_other.matrix())?;
        starts.push(params_from_basis(&other_eig.vectors, k));
    }
    let param_len = 2 * k * d_meas;
    for r in 0..cfg.restarts {
        let mut rng = optimize::stream_rng(cfg.seed, r as u64);
        starts.push((0..param_len).map(|_| standard_normal(&mut rng)).collect());
    }

    let opts = NmOptions {
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        init_step: 0.3,
    };
    let mut best: Option<crate::optimize::NmResult> = None;
    let mut total_iters = 0usize;
    for start in &starts {
        let run = optimize::nelder_mead(&mut objective, start, &opts);
        total_iters += run.iters;
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");

    let vectors = povm_vectors_from_params(&best.x, k, d_meas)
        .expect("winning parameters are non-degenerate");
    let elements: Vec<ComplexMatrix> = vectors.iter().map(|w| ComplexMatrix::outer(w)).collect();
    let povm = Povm::new(elements)?;
    Ok(OptResult {
        value: -best.value,
        argument: povm,
        iterations: total_iters,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::tensor_product;
    use crate::state::PureState;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_cfg() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 2,
            max_iters: 400,
            tol: 1e-9,
            seed: 7,
            outcomes: None,
        }
    }

    #[test]
    fn povm_parameterization_is_complete() {
        let mut rng = optimize::stream_rng(11, 0);
        let params: Vec<f64> = (0..2 * 4 * 2).map(|_| standard_normal(&mut rng)).collect();
        let vectors = povm_vectors_from_params(&params, 4, 2).unwrap();
        let mut sum = ComplexMatrix::zeros(2);
        for w in &vectors {
            sum = sum.add(&ComplexMatrix::outer(w));
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-10);
    }

    #[test]
    fn product_state_has_no_classical_correlations() {
        let a = DensityMatrix::new(ComplexMatrix::diag_real(&[0.3, 0.7]), vec![2]).unwrap();
        let b = DensityMatrix::new(ComplexMatrix::diag_real(&[0.6, 0.4]), vec![2]).unwrap();
        let rho =
            DensityMatrix::new(tensor_product(a.matrix(), b.matrix()), vec![2, 2]).unwrap();
        let result = classical_correlations(&rho, MeasuredSide::A, &small_cfg()).unwrap();
        assert_abs_diff_eq!(result.value, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn bell_state_yields_one_bit() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = PureState::new(
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
            vec![2, 2],
        )
        .unwrap()
        .to_density();
        let result = classical_correlations(&rho, MeasuredSide::A, &small_cfg()).unwrap();
        assert_abs_diff_eq!(result.value, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn classical_mixture_recovers_mutual_information() {
        // ρ = 1/2 |00⟩⟨00| + 1/2 |11⟩⟨11|: all correlations are classical.
        let rho = DensityMatrix::new(
            ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]),
            vec![2, 2],
        )
        .unwrap();
        let result = classical_correlations(&rho, MeasuredSide::A, &small_cfg()).unwrap();
        let mi = crate::entropy::mutual_information(&rho).unwrap();
        assert_abs_diff_eq!(result.value, mi, epsilon = 1e-6);
        assert_abs_diff_eq!(result.value, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn rejects_bad_arguments() {
        let single = DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5]), vec![2]).unwrap();
        assert!(classical_correlations(&single, MeasuredSide::A, &small_cfg()).is_err());

        let rho = DensityMatrix::new(
            ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]),
            vec![2, 2],
        )
        .unwrap();
        let mut cfg = small_cfg();
        cfg.outcomes = Some(1);
        assert!(classical_correlations(&rho, MeasuredSide::A, &cfg).is_err());
    }

    #[test]
    fn povm_type_validates_completeness() {
        let half = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!(Povm::new(vec![half.clone(), half.clone()]).is_ok());
        assert!(Povm::new(vec![half]).is_err());
    }
}
