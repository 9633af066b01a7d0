//! Entropies and entropy-derived information quantities, all in bits (log₂).

use num_complex::Complex64;

use crate::eigen::{self, HermitianEigen};
use crate::error::{invalid_arg, Result};
use crate::matrix::ComplexMatrix;
use crate::state::DensityMatrix;

/// σ-eigenvalues below this are treated as outside the support of σ.
pub const SIGMA_SUPPORT_TOL: f64 = 1e-10;

/// ρ-weight on a null direction of σ above this makes S(ρ‖σ) infinite;
/// smaller weights are attributed to roundoff and dropped.
pub const RHO_WEIGHT_TOL: f64 = 1e-9;

/// Tolerance for "is a probability vector" checks on raw input slices.
const PROB_SUM_TOL: f64 = 1e-6;
const PROB_NEG_TOL: f64 = 1e-12;

/// Value of a quantum relative entropy: finite, or +∞ when the support of ρ
/// is not contained in the support of σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn is_finite(&self) -> bool {
        matches!(self, RelEntropy::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            RelEntropy::Finite(v) => Some(*v),
            RelEntropy::Infinite => None,
        }
    }

    /// Collapse to `f64`, mapping the infinite case to `f64::INFINITY`.
    pub fn or_infinity(&self) -> f64 {
        match self {
            RelEntropy::Finite(v) => *v,
            RelEntropy::Infinite => f64::INFINITY,
        }
    }
}

/// Shannon entropy `H(p) = -Σ p_i log₂ p_i` of a probability vector.
///
/// Entries may dip to `-1e-12` (roundoff) and are clipped; the vector must sum
/// to 1 within `1e-6`.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if p < -PROB_NEG_TOL {
            return Err(invalid_arg!(
                "shannon_entropy: entry {i} is {p:.3e}, below -{PROB_NEG_TOL:.0e}"
            ));
        }
        sum += p.max(0.0);
    }
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(invalid_arg!(
            "shannon_entropy: entries sum to {sum:.8}, expected 1 within {PROB_SUM_TOL:.0e}"
        ));
    }
    Ok(entropy_of_weights(probs))
}

/// `-Σ w log₂ w` over the positive entries, with tiny negatives clipped.
/// No normalization check; used where the weights are valid by construction.
pub(crate) fn entropy_of_weights(weights: &[f64]) -> f64 {
    let mut h = 0.0;
    for &w in weights {
        if w > 0.0 {
            h -= w * w.log2();
        }
    }
    h
}

/// Von Neumann entropy `S(ρ) = -Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let values = eigen::eigenvalues(rho.matrix())?;
    Ok(entropy_of_weights(&values))
}

/// Quantum relative entropy `S(ρ‖σ) = Tr ρ log₂ ρ - Tr ρ log₂ σ`.
///
/// Returns [`RelEntropy::Infinite`] when ρ has weight above `1e-9` on an
/// eigendirection of σ with eigenvalue below `1e-10` (support violation).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(invalid_arg!(
            "relative_entropy: dimension mismatch ({} vs {})",
            rho.dim(),
            sigma.dim()
        ));
    }
    let s_rho = von_neumann_entropy(rho)?;
    let sigma_eig = eigen::hermitian_eig(sigma.matrix())?;
    Ok(relative_entropy_with_eig(rho.matrix(), s_rho, &sigma_eig))
}

/// Core of [`relative_entropy`] with the σ-eigendecomposition (and S(ρ))
/// precomputed; lets optimizers that already diagonalized σ reuse the work.
pub(crate) fn relative_entropy_with_eig(
    rho: &ComplexMatrix,
    s_rho: f64,
    sigma_eig: &HermitianEigen,
) -> RelEntropy {
    let n = rho.dim();
    // w_j = ⟨v_j| ρ |v_j⟩: diagonal of V† ρ V.
    let rotated = sigma_eig.vectors.adjoint().matmul(&rho.matmul(&sigma_eig.vectors));
    let mut cross = 0.0; // Tr ρ log₂ σ over the support of σ
    for j in 0..n {
        let w = rotated.get(j, j).re.max(0.0);
        let s = sigma_eig.values[j];
        if s < SIGMA_SUPPORT_TOL {
            if w > RHO_WEIGHT_TOL {
                return RelEntropy::Infinite;
            }
            // Roundoff weight on a null direction: dropped.
        } else {
            cross += w * s.log2();
        }
    }
    RelEntropy::Finite(-s_rho - cross)
}

/// Mutual information `I(A:B) = S(ρ_A) + S(ρ_B) - S(ρ_AB)` of a bipartite state.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    if rho.subsystem_count() != 2 {
        return Err(invalid_arg!(
            "mutual_information: state has {} subsystems, expected 2",
            rho.subsystem_count()
        ));
    }
    let s_a = von_neumann_entropy(&crate::state::partial_trace(rho, &[0])?)?;
    let s_b = von_neumann_entropy(&crate::state::partial_trace(rho, &[1])?)?;
    let s_ab = von_neumann_entropy(rho)?;
    Ok(s_a + s_b - s_ab)
}

/// A finite ensemble of density matrices with attached probabilities.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    /// Probabilities must be nonnegative (within `-1e-12`) and sum to 1 within
    /// `1e-10`; all states must share one dimension.
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(invalid_arg!(
                "ensemble: {} probabilities but {} states",
                probs.len(),
                states.len()
            ));
        }
        if probs.is_empty() {
            return Err(invalid_arg!("ensemble: must be non-empty"));
        }
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if p < -PROB_NEG_TOL {
                return Err(invalid_arg!(
                    "ensemble: probability {i} is {p:.3e}, below -{PROB_NEG_TOL:.0e}"
                ));
            }
            sum += p.max(0.0);
        }
        if (sum - 1.0).abs() > 1e-10 {
            return Err(invalid_arg!(
                "ensemble: probabilities sum to {sum:.12}, expected 1 within 1e-10"
            ));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(invalid_arg!("ensemble: states have mixed dimensions"));
        }
        Ok(Ensemble { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// The ensemble average `Σ p_i ρ_i`.
    pub fn average(&self) -> DensityMatrix {
        let dim = self.states[0].dim();
        let mut avg = ComplexMatrix::zeros(dim);
        for (p, state) in self.probs.iter().zip(&self.states) {
            avg.add_scaled(Complex64::new(p.max(0.0), 0.0), state.matrix());
        }
        DensityMatrix::new_unchecked(avg.hermitized(), self.states[0].dims().to_vec())
    }
}

/// Holevo quantity `χ = S(Σ p_i ρ_i) - Σ p_i S(ρ_i)` of an ensemble.
pub fn holevo(ensemble: &Ensemble) -> Result<f64> {
    let s_avg = von_neumann_entropy(&ensemble.average())?;
    let mut mean_entropy = 0.0;
    for (p, state) in ensemble.probs().iter().zip(ensemble.states()) {
        if *p > 0.0 {
            mean_entropy += p * von_neumann_entropy(state)?;
        }
    }
    Ok(s_avg - mean_entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_state(values: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::diag_real(values), vec![values.len()]).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(s, 0.0), c(s, 0.0)], vec![2])
            .unwrap()
            .to_density()
    }

    #[test]
    fn shannon_entropy_cases() {
        assert_abs_diff_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_entropy(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            shannon_entropy(&[0.75, 0.25]).unwrap(),
            0.811278124459,
            epsilon = 1e-9
        );
    }

    #[test]
    fn shannon_entropy_rejects_bad_vectors() {
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn von_neumann_entropy_cases() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&diag_state(&[0.5, 0.5])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(von_neumann_entropy(&plus_state()).unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            von_neumann_entropy(&diag_state(&[0.75, 0.25])).unwrap(),
            0.811278124459,
            epsilon = 1e-9
        );
    }

    #[test]
    fn relative_entropy_of_state_with_itself_is_zero() {
        let rho = plus_state();
        let v = relative_entropy(&rho, &rho).unwrap().value().unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn relative_entropy_pure_versus_mixed() {
        let pure = diag_state(&[1.0, 0.0]);
        let mixed = diag_state(&[0.5, 0.5]);
        let v = relative_entropy(&pure, &mixed).unwrap().value().unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn relative_entropy_detects_support_violation() {
        let pure = diag_state(&[1.0, 0.0]);
        let mixed = diag_state(&[0.5, 0.5]);
        assert_eq!(relative_entropy(&mixed, &pure).unwrap(), RelEntropy::Infinite);
    }

    #[test]
    fn relative_entropy_requires_matching_dimensions() {
        assert!(relative_entropy(&diag_state(&[1.0, 0.0]), &diag_state(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn mutual_information_cases() {
        use crate::matrix::tensor_product;
        use crate::state::partial_trace;

        // Product state: zero correlations.
        let a = diag_state(&[0.3, 0.7]);
        let b = plus_state();
        let product = DensityMatrix::new(
            tensor_product(a.matrix(), b.matrix()),
            vec![2, 2],
        )
        .unwrap();
        assert_abs_diff_eq!(mutual_information(&product).unwrap(), 0.0, epsilon = 1e-9);

        // Bell state: two bits of total correlations.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
            vec![2, 2],
        )
        .unwrap()
        .to_density();
        assert_abs_diff_eq!(mutual_information(&bell).unwrap(), 2.0, epsilon = 1e-9);

        // Classically correlated mixture: one bit.
        let classical = DensityMatrix::new(
            ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]),
            vec![2, 2],
        )
        .unwrap();
        assert_abs_diff_eq!(mutual_information(&classical).unwrap(), 1.0, epsilon = 1e-9);
        let _ = partial_trace(&classical, &[0]).unwrap();

        // Wrong subsystem count.
        assert!(mutual_information(&diag_state(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn holevo_of_orthogonal_pure_states_is_one_bit() {
        let ens = Ensemble::new(
            vec![0.5, 0.5],
            vec![diag_state(&[1.0, 0.0]), diag_state(&[0.0, 1.0])],
        )
        .unwrap();
        assert_abs_diff_eq!(holevo(&ens).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn holevo_of_identical_states_is_zero() {
        let ens = Ensemble::new(
            vec![0.5, 0.5],
            vec![diag_state(&[0.25, 0.75]), diag_state(&[0.25, 0.75])],
        )
        .unwrap();
        assert_abs_diff_eq!(holevo(&ens).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn holevo_of_zero_plus_ensemble() {
        // {1/2 |0⟩⟨0|, 1/2 |+⟩⟨+|}: the average has eigenvalues (1 ± 1/√2)/2,
        // computed here in closed form as the independent cross-check.
        let ens = Ensemble::new(vec![0.5, 0.5], vec![diag_state(&[1.0, 0.0]), plus_state()]).unwrap();
        let got = holevo(&ens).unwrap();
        let lo = 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
        let hi = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        let expected = -lo * lo.log2() - hi * hi.log2();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-9);
        assert_abs_diff_eq!(got, 0.600876, epsilon = 1e-5);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![0.5], vec![]).is_err());
        assert!(Ensemble::new(
            vec![0.6, 0.6],
            vec![diag_state(&[1.0, 0.0]), diag_state(&[0.0, 1.0])]
        )
        .is_err());
        assert!(Ensemble::new(
            vec![0.5, 0.5],
            vec![diag_state(&[1.0, 0.0]), diag_state(&[0.5, 0.5, 0.0])]
        )
        .is_err());
    }
}
