//! Quantum states: density matrices with subsystem structure, pure state
//! vectors, the partial trace, and purification.

use num_complex::Complex64;

use crate::eigen::{hermitian_eig, HERMITICITY_TOL};
use crate::error::{invalid_arg, Result};
use crate::matrix::ComplexMatrix;

/// Tolerance for trace-one and normalization checks on construction.
pub const TRACE_TOL: f64 = 1e-10;

/// Eigenvalues above `-PSD_TOL` are accepted as nonnegative.
pub const PSD_TOL: f64 = 1e-10;

/// A density matrix together with its tensor factorization `dims`.
///
/// Invariants (checked by [`DensityMatrix::new`]): Hermitian within `1e-10`,
/// unit trace within `1e-10`, eigenvalues ≥ `-1e-10`, and the product of
/// `dims` equals the matrix dimension.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(invalid_arg!("density matrix: dims must be non-empty and positive"));
        }
        let product: usize = dims.iter().product();
        if product != matrix.dim() {
            return Err(invalid_arg!(
                "density matrix: dims {:?} have product {product}, but the matrix has dimension {}",
                dims,
                matrix.dim()
            ));
        }
        if !matrix.is_hermitian(HERMITICITY_TOL) {
            return Err(invalid_arg!(
                "density matrix: not Hermitian within {HERMITICITY_TOL:.0e}"
            ));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(invalid_arg!(
                "density matrix: trace {:.12} + {:.3e}i differs from 1 beyond {TRACE_TOL:.0e}",
                trace.re,
                trace.im
            ));
        }
        let min_eig = crate::eigen::eigenvalues(&matrix)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return Err(invalid_arg!(
                "density matrix: negative eigenvalue {min_eig:.3e} beyond -{PSD_TOL:.0e}"
            ));
        }
        Ok(DensityMatrix { matrix, dims })
    }

    /// Construct without re-running the eigenvalue positivity check.
    ///
    /// For states produced by operations that preserve validity exactly
    /// (unitary conjugation, partial traces of valid states); callers must
    /// guarantee the invariants hold.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.dim());
        DensityMatrix { matrix, dims }
    }

    /// The maximally mixed state `I/d` on the given factorization.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let matrix = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        DensityMatrix { matrix, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of tensor factors.
    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// Reinterpret the same matrix under a different factorization.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        if dims.iter().product::<usize>() != self.dim() {
            return Err(invalid_arg!(
                "with_dims: dims {:?} do not multiply to dimension {}",
                dims,
                self.dim()
            ));
        }
        Ok(DensityMatrix {
            matrix: self.matrix.clone(),
            dims,
        })
    }

    /// Conjugate by a unitary: `u · ρ · u†` (dims preserved).
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(invalid_arg!(
                "conjugate: unitary dimension {} does not match state dimension {}",
                u.dim(),
                self.dim()
            ));
        }
        let matrix = u.matmul(&self.matrix).matmul(&u.adjoint()).hermitized();
        Ok(DensityMatrix {
            matrix,
            dims: self.dims.clone(),
        })
    }
}

/// A normalized pure state vector with subsystem structure.
#[derive(Clone, Debug)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Requires the amplitude vector normalized within `1e-10` and compatible
    /// with `dims`.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if dims.is_empty() || product != amplitudes.len() {
            return Err(invalid_arg!(
                "pure state: dims {:?} do not multiply to amplitude count {}",
                dims,
                amplitudes.len()
            ));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(invalid_arg!(
                "pure state: norm {norm:.12} differs from 1 beyond {TRACE_TOL:.0e}"
            ));
        }
        Ok(PureState { amplitudes, dims })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(index: usize, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if index >= product {
            return Err(invalid_arg!(
                "pure state: basis index {index} out of range for dimension {product}"
            ));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); product];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// The projector `|ψ⟩⟨ψ|` as a density matrix (renormalized exactly).
    pub fn to_density(&self) -> DensityMatrix {
        let norm_sqr: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let matrix = ComplexMatrix::outer(&self.amplitudes).scale(Complex64::new(1.0 / norm_sqr, 0.0));
        DensityMatrix::new_unchecked(matrix, self.dims.clone())
    }
}

/// Trace out every subsystem not listed in `keep`.
///
/// `keep` must be non-empty, strictly increasing, and contain valid subsystem
/// indices; the kept subsystems retain their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    if keep.is_empty() {
        return Err(invalid_arg!("partial_trace: keep must be non-empty"));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid_arg!(
            "partial_trace: keep indices must be strictly increasing, got {:?}",
            keep
        ));
    }
    if keep.last().copied().unwrap_or(0) >= dims.len() {
        return Err(invalid_arg!(
            "partial_trace: keep index {} out of range for {} subsystems",
            keep.last().unwrap(),
            dims.len()
        ));
    }

    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();

    // Stride of each subsystem in the flattened full index.
    let mut strides = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }

    let kept_offsets = enumerate_offsets(keep, dims, &strides);
    let traced_offsets = enumerate_offsets(&traced, dims, &strides);

    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim);
    for (a, &row_base) in kept_offsets.iter().enumerate() {
        for (b, &col_base) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_offsets {
                acc += rho.matrix().get(row_base + t, col_base + t);
            }
            out.set(a, b, acc);
        }
    }
    // Partial traces of valid states are valid; symmetrize away roundoff.
    Ok(DensityMatrix::new_unchecked(out.hermitized(), kept_dims))
}

/// Flattened full-index offsets reachable by varying exactly the `subsystems`,
/// in row-major order of those subsystems.
fn enumerate_offsets(subsystems: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let total: usize = subsystems.iter().map(|&s| dims[s]).product();
    let mut offsets = Vec::with_capacity(total);
    let mut index = vec![0usize; subsystems.len()];
    loop {
        let offset: usize = subsystems
            .iter()
            .zip(&index)
            .map(|(&s, &i)| i * strides[s])
            .sum();
        offsets.push(offset);
        // Row-major increment over the selected subsystems.
        let mut pos = subsystems.len();
        loop {
            if pos == 0 {
                return offsets;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < dims[subsystems[pos]] {
                break;
            }
            index[pos] = 0;
        }
    }
}

/// A purification `|Ψ⟩ = Σ_i √λ_i |e_i⟩ ⊗ |v_i⟩` of `rho`, with the auxiliary
/// (environment) system as the first tensor factor and eigenvalues taken in
/// descending order.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let n = rho.dim();
    let eig = hermitian_eig(rho.matrix())?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n * n];
    // Ascending from the solver; walk it backwards for descending order.
    for (slot, i) in (0..n).rev().enumerate() {
        let lambda = eig.values[i].max(0.0);
        if lambda == 0.0 {
            continue;
        }
        let root = lambda.sqrt();
        for k in 0..n {
            amplitudes[slot * n + k] = eig.vectors.get(k, i) * root;
        }
    }
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }
    PureState::new(amplitudes, vec![n, n])
}
