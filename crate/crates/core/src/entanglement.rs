//! Entanglement estimation through the relative entropy of entanglement
//! `E(ρ) = min_σ∈SEP S(ρ‖σ)`.
//!
//! The exact minimum is not efficiently computable, so this module reports
//! *bracketing* quantities with explicit directions:
//!
//! * [`entanglement_lower_bound`]: the certified bound
//!   `E(ρ) ≥ max(S(ρ_A), S(ρ_B)) - S(ρ_AB)` (never overestimates);
//! * [`relative_entropy_of_entanglement_ub`]: the best separable candidate
//!   found by a layered search (never underestimates, since any feasible σ
//!   witnesses an upper bound).
//!
//! The search runs three layers: closed-form warm starts (product of
//! marginals, pinchings in the marginal eigenbases), a Nelder-Mead pass over
//! a fixed-size product ansatz on small instances, and a conditional-gradient
//! (Frank-Wolfe) refinement over the separable set, which both sharpens the
//! candidate and reports a duality gap certifying how close it is to the true
//! minimum over separable states.

use num_complex::Complex64;

use crate::eigen::{self, HermitianEigen};
use crate::entropy::{self, RelEntropy, RHO_WEIGHT_TOL, SIGMA_SUPPORT_TOL};
use crate::error::{invalid_arg, Result};
use crate::matrix::ComplexMatrix;
use crate::optimize::{self, NmOptions, OptimizerConfig};
use crate::sampling::standard_normal;
use crate::state::{partial_trace, DensityMatrix};

pub use crate::correlations::OptResult;

/// A convex mixture of product states: `σ = Σ_k w_k |p_k1⟩⟨p_k1| ⊗ ... `.
///
/// Invariants: weights nonnegative and summing to 1 within `1e-8`; every
/// factor normalized within `1e-8`; factor dimensions matching `dims`.
#[derive(Clone, Debug)]
pub struct SeparableAnsatz {
    pub weights: Vec<f64>,
    /// `factors[k][party]` is the pure-state vector of party `party` in term `k`.
    pub factors: Vec<Vec<Vec<Complex64>>>,
    pub dims: Vec<usize>,
}

impl SeparableAnsatz {
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.factors.len() {
            return Err(invalid_arg!(
                "separable ansatz: {} weights but {} terms",
                self.weights.len(),
                self.factors.len()
            ));
        }
        if self.weights.is_empty() {
            return Err(invalid_arg!("separable ansatz: must have at least one term"));
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-8 {
            return Err(invalid_arg!(
                "separable ansatz: weights must be nonnegative and sum to 1 within 1e-8 (sum = {sum:.10})"
            ));
        }
        for (k, term) in self.factors.iter().enumerate() {
            if term.len() != self.dims.len() {
                return Err(invalid_arg!(
                    "separable ansatz: term {k} has {} factors, expected {}",
                    term.len(),
                    self.dims.len()
                ));
            }
            for (j, factor) in term.iter().enumerate() {
                if factor.len() != self.dims[j] {
                    return Err(invalid_arg!(
                        "separable ansatz: term {k} factor {j} has dimension {}, expected {}",
                        factor.len(),
                        self.dims[j]
                    ));
                }
                let norm = factor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-8 {
                    return Err(invalid_arg!(
                        "separable ansatz: term {k} factor {j} has norm {norm:.10}, expected 1 within 1e-8"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Materialize the mixture as a density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let atoms: Vec<Atom> = self
            .weights
            .iter()
            .zip(&self.factors)
            .map(|(&weight, parts)| Atom {
                weight,
                parts: parts.clone(),
            })
            .collect();
        let matrix = sigma_matrix(&atoms, &self.dims);
        Ok(DensityMatrix::new_unchecked(matrix, self.dims.clone()))
    }

    pub fn term_count(&self) -> usize {
        self.weights.len()
    }
}

/// Certified lower bound `max(0, max(S(ρ_A), S(ρ_B)) - S(ρ_AB))` on the
/// relative entropy of entanglement of a bipartite state.
pub fn entanglement_lower_bound(rho: &DensityMatrix) -> Result<f64> {
    if rho.subsystem_count() != 2 {
        return Err(invalid_arg!(
            "entanglement_lower_bound: state has {} subsystems, expected 2",
            rho.subsystem_count()
        ));
    }
    let s_a = entropy::von_neumann_entropy(&partial_trace(rho, &[0])?)?;
    let s_b = entropy::von_neumann_entropy(&partial_trace(rho, &[1])?)?;
    let s_ab = entropy::von_neumann_entropy(rho)?;
    Ok((s_a.max(s_b) - s_ab).max(0.0))
}

// ---------------------------------------------------------------------------
// Internal ensemble machinery
// ---------------------------------------------------------------------------

/// One weighted product term of the working ensemble.
#[derive(Clone, Debug)]
struct Atom {
    weight: f64,
    parts: Vec<Vec<Complex64>>,
}

fn product_vector(parts: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for a in &acc {
            for p in part {
                next.push(a * p);
            }
        }
        acc = next;
    }
    acc
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

fn sigma_matrix(atoms: &[Atom], dims: &[usize]) -> ComplexMatrix {
    let dim: usize = dims.iter().product();
    let mut sigma = ComplexMatrix::zeros(dim);
    for atom in atoms {
        if atom.weight <= 0.0 {
            continue;
        }
        let v = product_vector(&atom.parts);
        for i in 0..dim {
            let wvi = v[i] * atom.weight;
            for j in 0..dim {
                let add = wvi * v[j].conj();
                sigma.set(i, j, sigma.get(i, j) + add);
            }
        }
    }
    sigma.hermitized()
}

/// σ-eigenvalues are clipped here before entering logarithms in the gradient.
const GRAD_EIG_FLOOR: f64 = 1e-15;

/// One evaluated candidate: value, σ-eigendecomposition, and ρ rotated into
/// the σ-eigenbasis (enough to form the gradient without further O(n³) work).
struct Evaluation {
    f: RelEntropy,
    eig: HermitianEigen,
    rho_rotated: ComplexMatrix,
}

fn evaluate_sigma(
    rho: &ComplexMatrix,
    s_rho: f64,
    sigma: &ComplexMatrix,
    warm_basis: Option<&ComplexMatrix>,
) -> Result<Evaluation> {
    let eig = match warm_basis {
        Some(v0) => eigen::hermitian_eig_warm(sigma, v0)?,
        None => eigen::hermitian_eig(&sigma.hermitized())?,
    };
    let rho_rotated = eig.vectors.adjoint().matmul(&rho.matmul(&eig.vectors));
    let mut cross = 0.0;
    let mut infinite = false;
    for j in 0..rho.dim() {
        let w = rho_rotated.get(j, j).re.max(0.0);
        let s = eig.values[j];
        if s < SIGMA_SUPPORT_TOL {
            if w > RHO_WEIGHT_TOL {
                infinite = true;
                break;
            }
        } else {
            cross += w * s.log2();
        }
    }
    let f = if infinite {
        RelEntropy::Infinite
    } else {
        RelEntropy::Finite(-s_rho - cross)
    };
    Ok(Evaluation {
        f,
        eig,
        rho_rotated,
    })
}

/// The PSD matrix `L = V (ρ̃ ∘ Φ) V†` with `Φ_ij` the natural-log divided
/// difference of the σ-eigenvalues; `-L/ln 2` is the gradient of
/// `σ ↦ S(ρ‖σ)`, so maximizing `⟨p|L|p⟩` over product states is the
/// linear-minimization oracle of the conditional-gradient step.
fn gradient_matrix(eval: &Evaluation) -> ComplexMatrix {
    let n = eval.eig.values.len();
    let mut scaled = ComplexMatrix::zeros(n);
    for i in 0..n {
        let si = eval.eig.values[i].max(GRAD_EIG_FLOOR);
        for j in 0..n {
            let sj = eval.eig.values[j].max(GRAD_EIG_FLOOR);
            let phi = if (si - sj).abs() <= 1e-12 * si.max(sj) {
                2.0 / (si + sj)
            } else {
                (si.ln() - sj.ln()) / (si - sj)
            };
            scaled.set(i, j, eval.rho_rotated.get(i, j) * phi);
        }
    }
    eval.eig
        .vectors
        .matmul(&scaled)
        .matmul(&eval.eig.vectors.adjoint())
        .hermitized()
}

/// `Tr(σ L)` for the current ensemble (≈ 1 up to support clipping); the
/// duality gap of the conditional-gradient step is
/// `(max_p ⟨p|L|p⟩ - Tr(σ L)) / ln 2` bits.
fn trace_sigma_gradient(eval: &Evaluation) -> f64 {
    let n = eval.eig.values.len();
    let mut acc = 0.0;
    for j in 0..n {
        let s = eval.eig.values[j].max(0.0);
        let w = eval.rho_rotated.get(j, j).re.max(0.0);
        acc += s * w / eval.eig.values[j].max(GRAD_EIG_FLOOR);
    }
    acc
}

// ---------------------------------------------------------------------------
// Product-state oracle
// ---------------------------------------------------------------------------

/// Maximize `⟨p|L|p⟩` over product states `p = x_1 ⊗ ... ⊗ x_m` by
/// alternating per-party eigenvector updates from several starts.
fn best_product_state(
    l: &ComplexMatrix,
    dims: &[usize],
    inits: &[Vec<Vec<Complex64>>],
    max_rounds: usize,
) -> (Vec<Vec<Complex64>>, f64) {
    let mut best: Option<(Vec<Vec<Complex64>>, f64)> = None;
    for init in inits {
        let mut parts = init.clone();
        for part in parts.iter_mut() {
            normalize(part);
        }
        let mut value = f64::NEG_INFINITY;
        for _ in 0..max_rounds {
            let mut improved = false;
            for j in 0..dims.len() {
                let n_j = party_matrix(l, dims, &parts, j);
                let eig = eigen::hermitian_eig(&n_j.hermitized())
                    .expect("hermitized party matrix diagonalizes");
                let top = eig.values.len() - 1;
                let new_value = eig.values[top];
                parts[j] = eig.eigenvector(top);
                if new_value > value + 1e-13 {
                    improved = true;
                }
                value = new_value;
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().map_or(true, |(_, v)| value > *v) {
            best = Some((parts, value));
        }
    }
    best.expect("at least one oracle start")
}

/// The `d_j × d_j` matrix `N_j[a,b] = ⟨p(x_j→e_a)| L |p(x_j→e_b)⟩` whose top
/// eigenvector is the optimal party-`j` factor given the other factors.
fn party_matrix(
    l: &ComplexMatrix,
    dims: &[usize],
    parts: &[Vec<Complex64>],
    j: usize,
) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let d_j = dims[j];
    // Context product over every party except j, plus the index of party j,
    // for each full basis index.
    let mut context = vec![Complex64::new(0.0, 0.0); total];
    let mut j_index = vec![0usize; total];
    for full in 0..total {
        let mut rest = full;
        let mut prod = Complex64::new(1.0, 0.0);
        for (party, &d) in dims.iter().enumerate().rev() {
            let idx = rest % d;
            rest /= d;
            if party == j {
                j_index[full] = idx;
            } else {
                prod *= parts[party][idx];
            }
        }
        context[full] = prod;
    }
    let mut n_j = ComplexMatrix::zeros(d_j);
    for row in 0..total {
        let cr = context[row].conj();
        if cr.norm_sqr() == 0.0 {
            continue;
        }
        let a = j_index[row];
        for col in 0..total {
            let c = context[col];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let b = j_index[col];
            let add = cr * l.get(row, col) * c;
            n_j.set(a, b, n_j.get(a, b) + add);
        }
    }
    n_j
}

// ---------------------------------------------------------------------------
// Warm starts
// ---------------------------------------------------------------------------

/// Eigen-decompositions of all single-party marginals.
fn marginal_eigs(rho: &DensityMatrix) -> Result<Vec<HermitianEigen>> {
    (0..rho.subsystem_count())
        .map(|j| {
            let marginal = partial_trace(rho, &[j])?;
            eigen::hermitian_eig(marginal.matrix())
        })
        .collect()
}

const WEIGHT_PRUNE: f64 = 1e-14;

/// Product of the marginals: `σ = ρ_1 ⊗ ... ⊗ ρ_m`. Always has full support
/// relative to ρ, and its value equals the total correlations in ρ.
fn warm_product_of_marginals(eigs: &[HermitianEigen], dims: &[usize]) -> Vec<Atom> {
    let mut atoms = vec![Atom {
        weight: 1.0,
        parts: Vec::new(),
    }];
    for (j, eig) in eigs.iter().enumerate() {
        let mut next = Vec::with_capacity(atoms.len() * dims[j]);
        for atom in &atoms {
            for (i, &lambda) in eig.values.iter().enumerate() {
                let weight = atom.weight * lambda.max(0.0);
                let mut parts = atom.parts.clone();
                parts.push(eig.eigenvector(i));
                next.push(Atom { weight, parts });
            }
        }
        atoms = next;
    }
    atoms.retain(|a| a.weight > WEIGHT_PRUNE);
    renormalize_weights(&mut atoms);
    atoms
}

/// Per-party orthonormal basis, stored as a list of column vectors.
type PartyBasis = Vec<Vec<Complex64>>;

fn bases_from_eigs(eigs: &[HermitianEigen], dims: &[usize]) -> Vec<PartyBasis> {
    eigs.iter()
        .zip(dims)
        .map(|(eig, &d)| (0..d).map(|i| eig.eigenvector(i)).collect())
        .collect()
}

/// Per-party discrete Fourier bases: exact dephasing directions for the
/// cyclically correlated mixtures that shift interactions produce, where the
/// (degenerate) marginal eigenbases carry no information.
fn fourier_bases(dims: &[usize]) -> Vec<PartyBasis> {
    dims.iter()
        .map(|&d| {
            (0..d)
                .map(|k| {
                    (0..d)
                        .map(|j| {
                            let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
                            Complex64::new(angle.cos(), angle.sin()) / (d as f64).sqrt()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Pinch ρ in a product basis: the diagonal weights of ρ in that basis.
/// Exact for states classically correlated in the given bases.
fn warm_dephase(
    rho: &ComplexMatrix,
    bases: &[PartyBasis],
    dims: &[usize],
) -> Vec<Atom> {
    let total: usize = dims.iter().product();
    let mut atoms = Vec::with_capacity(total);
    for full in 0..total {
        let mut rest = full;
        let mut parts: Vec<Vec<Complex64>> = vec![Vec::new(); dims.len()];
        for (party, &d) in dims.iter().enumerate().rev() {
            let idx = rest % d;
            rest /= d;
            parts[party] = bases[party][idx].clone();
        }
        let v = product_vector(&parts);
        let weight = rho.expectation(&v).max(0.0);
        if weight > WEIGHT_PRUNE {
            atoms.push(Atom {
                weight,
                parts,
            });
        }
    }
    if atoms.is_empty() {
        // Unreachable for a unit-trace ρ, but keep a harmless fallback.
        let parts: Vec<Vec<Complex64>> = dims
            .iter()
            .map(|&d| {
                let mut e0 = vec![Complex64::new(0.0, 0.0); d];
                e0[0] = Complex64::new(1.0, 0.0);
                e0
            })
            .collect();
        atoms.push(Atom { weight: 1.0, parts });
    }
    renormalize_weights(&mut atoms);
    atoms
}

/// Bipartite only: pinch one side in its marginal eigenbasis while keeping
/// the conditional blocks on the other side intact, then split each block
/// into its eigendecomposition. Exact for one-sidedly classical states.
fn warm_one_sided_pinch(
    rho: &DensityMatrix,
    eigs: &[HermitianEigen],
    pinched_side: usize,
) -> Result<Vec<Atom>> {
    let dims = rho.dims();
    debug_assert_eq!(dims.len(), 2);
    let other_side = 1 - pinched_side;
    let d_other = dims[other_side];
    let m = rho.matrix();
    let mut atoms = Vec::new();
    for i in 0..dims[pinched_side] {
        let u = eigs[pinched_side].eigenvector(i);
        // Conditional block B_i[b,b'] = Σ_{a,a'} ū_a ρ[(a,b),(a',b')] u_{a'}
        // (indices arranged for whichever side is pinched).
        let mut block = ComplexMatrix::zeros(d_other);
        for b in 0..d_other {
            for b2 in 0..d_other {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..dims[pinched_side] {
                    for a2 in 0..dims[pinched_side] {
                        let (row, col) = if pinched_side == 0 {
                            (a * d_other + b, a2 * d_other + b2)
                        } else {
                            (b * dims[1] + a, b2 * dims[1] + a2)
                        };
                        acc += u[a].conj() * m.get(row, col) * u[a2];
                    }
                }
                block.set(b, b2, acc);
            }
        }
        let eig = eigen::hermitian_eig(&block.hermitized())?;
        for (t, &mu) in eig.values.iter().enumerate() {
            let weight = mu.max(0.0);
            if weight > WEIGHT_PRUNE {
                let v = eig.eigenvector(t);
                let parts = if pinched_side == 0 {
                    vec![u.clone(), v]
                } else {
                    vec![v, u.clone()]
                };
                atoms.push(Atom { weight, parts });
            }
        }
    }
    if atoms.is_empty() {
        return Err(invalid_arg!("one-sided pinch produced no terms"));
    }
    renormalize_weights(&mut atoms);
    Ok(atoms)
}

fn renormalize_weights(atoms: &mut [Atom]) {
    let sum: f64 = atoms.iter().map(|a| a.weight.max(0.0)).sum();
    if sum > 0.0 {
        for a in atoms.iter_mut() {
            a.weight = a.weight.max(0.0) / sum;
        }
    }
}

// ---------------------------------------------------------------------------
// Conditional-gradient refinement
// ---------------------------------------------------------------------------

struct FwOutcome {
    atoms: Vec<Atom>,
    iterations: usize,
    /// Final duality gap in bits; `None` when it was never computed.
    gap: Option<f64>,
}

fn fw_budget(dim: usize) -> (usize, f64, usize) {
    // (max iterations, gap tolerance in bits, oracle rounds)
    if dim <= 9 {
        (90, 5e-8, 30)
    } else if dim <= 16 {
        (70, 1e-7, 25)
    } else {
        (45, 3e-7, 10)
    }
}

const LN2: f64 = std::f64::consts::LN_2;

/// Conditional-gradient descent over the separable set, with per-iteration
/// multiplicative weight re-optimization over the collected atoms.
fn frank_wolfe(
    rho: &ComplexMatrix,
    s_rho: f64,
    dims: &[usize],
    init: Vec<Atom>,
    atom_cap: usize,
    seed: u64,
) -> Result<FwOutcome> {
    let dim: usize = dims.iter().product();
    let (max_iters, gap_tol, oracle_rounds) = fw_budget(dim);
    let mut rng = optimize::stream_rng(seed, 0xFE);

    let mut atoms = init;
    let mut warm_basis: Option<ComplexMatrix> = None;
    let mut best_value = f64::INFINITY;
    let mut best_atoms = atoms.clone();
    let mut last_gap = None;
    let mut iterations = 0usize;
    let mut stall = 0usize;

    for iter in 0..max_iters {
        iterations = iter + 1;
        let sigma = sigma_matrix(&atoms, dims);
        let eval = evaluate_sigma(rho, s_rho, &sigma, warm_basis.as_ref())?;
        warm_basis = Some(eval.eig.vectors.clone());
        let Some(value) = eval.f.value() else {
            // Support slipped below ρ (can only happen after aggressive
            // pruning); fall back to the best candidate seen.
            atoms = best_atoms.clone();
            warm_basis = None;
            continue;
        };
        if value < best_value - 1e-12 {
            best_value = value;
            best_atoms = atoms.clone();
            stall = 0;
        } else {
            stall += 1;
        }

        let l = gradient_matrix(&eval);
        // Oracle starts: the dominant current atom, the top marginal
        // directions of L, and one random product state.
        let mut inits: Vec<Vec<Vec<Complex64>>> = Vec::new();
        if let Some(top) = atoms
            .iter()
            .max_by(|a, b| a.weight.total_cmp(&b.weight))
        {
            inits.push(top.parts.clone());
        }
        inits.push(gradient_marginal_init(&l, dims)?);
        inits.push(
            dims.iter()
                .map(|&d| {
                    (0..d)
                        .map(|_| Complex64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
                        .collect()
                })
                .collect(),
        );
        let (new_parts, oracle_value) = best_product_state(&l, dims, &inits, oracle_rounds);

        let gap = (oracle_value - trace_sigma_gradient(&eval)) / LN2;
        last_gap = Some(gap);
        if gap <= gap_tol || stall >= 12 {
            break;
        }

        // Add the oracle atom (unless it duplicates an existing one).
        let new_vec = product_vector(&new_parts);
        let duplicate = atoms.iter().position(|a| {
            let overlap: Complex64 = product_vector(&a.parts)
                .iter()
                .zip(&new_vec)
                .map(|(x, y)| x.conj() * y)
                .sum();
            overlap.norm_sqr() > 1.0 - 1e-12
        });
        if duplicate.is_none() {
            let gamma = (2.0 / (iter as f64 + 2.0)).min(0.5);
            for a in atoms.iter_mut() {
                a.weight *= 1.0 - gamma;
            }
            atoms.push(Atom {
                weight: gamma,
                parts: new_parts,
            });
        }

        // Weight re-optimization: two multiplicative-gradient rounds over the
        // current atoms (each round costs one eigendecomposition).
        for _ in 0..2 {
            let sigma = sigma_matrix(&atoms, dims);
            let eval = evaluate_sigma(rho, s_rho, &sigma, warm_basis.as_ref())?;
            warm_basis = Some(eval.eig.vectors.clone());
            if let Some(v) = eval.f.value() {
                if v < best_value - 1e-12 {
                    best_value = v;
                    best_atoms = atoms.clone();
                }
            }
            let l = gradient_matrix(&eval);
            if !reweight_step(&mut atoms, &l) {
                break;
            }
        }

        // Keep the ensemble within its size cap.
        atoms.retain(|a| a.weight > 1e-12);
        if atoms.len() > atom_cap {
            atoms.sort_by(|a, b| b.weight.total_cmp(&a.weight));
            atoms.truncate(atom_cap);
        }
        if atoms.is_empty() {
            atoms = best_atoms.clone();
        }
        renormalize_weights(&mut atoms);
    }

    // Final evaluation of whatever the loop last held.
    let sigma = sigma_matrix(&atoms, dims);
    let eval = evaluate_sigma(rho, s_rho, &sigma, warm_basis.as_ref())?;
    if let Some(v) = eval.f.value() {
        if v < best_value {
            best_atoms = atoms;
        }
    }
    Ok(FwOutcome {
        atoms: best_atoms,
        iterations,
        gap: last_gap,
    })
}

/// Deterministic oracle start: the top eigenvector of each party's reduction
/// of the gradient matrix.
fn gradient_marginal_init(l: &ComplexMatrix, dims: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    let pseudo = DensityMatrix::new_unchecked(
        l.scale(Complex64::new(1.0 / l.trace().re.max(1e-300), 0.0)),
        dims.to_vec(),
    );
    (0..dims.len())
        .map(|j| {
            let marginal = partial_trace(&pseudo, &[j])?;
            let eig = eigen::hermitian_eig(&marginal.matrix().hermitized())?;
            Ok(eig.eigenvector(eig.values.len() - 1))
        })
        .collect()
}

/// One multiplicative weight update `w_k ∝ w_k · exp(η ⟨p_k|L|p_k⟩)`;
/// returns false when the step was degenerate.
fn reweight_step(atoms: &mut Vec<Atom>, l: &ComplexMatrix) -> bool {
    let scores: Vec<f64> = atoms
        .iter()
        .map(|a| l.expectation(&product_vector(&a.parts)))
        .collect();
    let mean: f64 = atoms
        .iter()
        .zip(&scores)
        .map(|(a, s)| a.weight * s)
        .sum();
    let spread = scores
        .iter()
        .map(|s| (s - mean).abs())
        .fold(0.0, f64::max);
    if spread < 1e-13 {
        return false;
    }
    let eta = 0.6 / spread;
    let mut sum = 0.0;
    for (a, s) in atoms.iter_mut().zip(&scores) {
        a.weight *= (eta * (s - mean)).exp();
        sum += a.weight;
    }
    if !(sum > 0.0) || !sum.is_finite() {
        return false;
    }
    for a in atoms.iter_mut() {
        a.weight /= sum;
    }
    true
}

// ---------------------------------------------------------------------------
// Nelder-Mead stage
// ---------------------------------------------------------------------------

/// Parameter count above which the simplex stage is skipped: the flattened
/// product ansatz grows as (Πd)²·(1 + 2Σd) and direct simplex search stops
/// being productive well before the budget runs out.
const NM_PARAM_CAP: usize = 160;

fn nm_term_count(dims: &[usize]) -> usize {
    let total: usize = dims.iter().product();
    total * total
}

fn nm_param_len(dims: &[usize], k: usize) -> usize {
    k * (1 + 2 * dims.iter().sum::<usize>())
}

fn atoms_from_params(params: &[f64], dims: &[usize], k: usize) -> Option<Vec<Atom>> {
    let per_term = 1 + 2 * dims.iter().sum::<usize>();
    debug_assert_eq!(params.len(), k * per_term);
    let logits: Vec<f64> = (0..k).map(|t| params[t * per_term]).collect();
    let max_logit = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = logits.iter().map(|x| (x - max_logit).exp()).collect();
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return None;
    }
    for w in weights.iter_mut() {
        *w /= sum;
    }
    let mut atoms = Vec::with_capacity(k);
    for (t, weight) in weights.into_iter().enumerate() {
        let mut offset = t * per_term + 1;
        let mut parts = Vec::with_capacity(dims.len());
        for &d in dims {
            let mut v: Vec<Complex64> = (0..d)
                .map(|i| Complex64::new(params[offset + 2 * i], params[offset + 2 * i + 1]))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                return None;
            }
            for z in v.iter_mut() {
                *z /= norm;
            }
            offset += 2 * d;
            parts.push(v);
        }
        atoms.push(Atom { weight, parts });
    }
    Some(atoms)
}

fn params_from_atoms(atoms: &[Atom], dims: &[usize], k: usize) -> Vec<f64> {
    let per_term = 1 + 2 * dims.iter().sum::<usize>();
    let mut params = vec![0.0; k * per_term];
    for t in 0..k {
        let base = t * per_term;
        if let Some(atom) = atoms.get(t) {
            params[base] = atom.weight.max(1e-12).ln();
            let mut offset = base + 1;
            for (j, part) in atom.parts.iter().enumerate() {
                for (i, z) in part.iter().enumerate() {
                    params[offset + 2 * i] = z.re;
                    params[offset + 2 * i + 1] = z.im;
                }
                offset += 2 * dims[j];
            }
        } else {
            // Padding term: negligible weight on a cyclic basis product.
            params[base] = (1e-12f64).ln();
            let mut offset = base + 1;
            for &d in dims {
                params[offset + 2 * (t % d)] = 1.0;
                offset += 2 * d;
            }
        }
    }
    params
}

// ---------------------------------------------------------------------------
// Public estimator
// ---------------------------------------------------------------------------

/// Upper estimate of the relative entropy of entanglement of a bipartite or
/// tripartite state: the relative entropy to the best explicitly separable
/// candidate found. Never below the true value; `converged` reports whether
/// the final duality gap certified the candidate as near-optimal over the
/// separable set.
pub fn relative_entropy_of_entanglement_ub(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<OptResult<SeparableAnsatz>> {
    cfg.validate()?;
    let parties = rho.subsystem_count();
    if parties != 2 && parties != 3 {
        return Err(invalid_arg!(
            "relative_entropy_of_entanglement_ub: state has {parties} subsystems, expected 2 or 3"
        ));
    }
    let dims = rho.dims().to_vec();
    let rho_matrix = rho.matrix();
    let s_rho = entropy::von_neumann_entropy(rho)?;
    let total_dim: usize = dims.iter().product();
    let atom_cap = nm_term_count(&dims).max(total_dim);

    // Layer 1: closed-form warm starts.
    let eigs = marginal_eigs(rho)?;
    let mut candidates: Vec<Vec<Atom>> = vec![
        warm_product_of_marginals(&eigs, &dims),
        warm_dephase(rho_matrix, &bases_from_eigs(&eigs, &dims), &dims),
        warm_dephase(rho_matrix, &fourier_bases(&dims), &dims),
    ];
    if parties == 2 {
        for side in 0..2 {
            if let Ok(atoms) = warm_one_sided_pinch(rho, &eigs, side) {
                candidates.push(atoms);
            }
        }
    }
    let mut best_value = f64::INFINITY;
    let mut best_atoms: Option<Vec<Atom>> = None;
    for atoms in &candidates {
        let sigma = sigma_matrix(atoms, &dims);
        let eval = evaluate_sigma(rho_matrix, s_rho, &sigma, None)?;
        if let Some(v) = eval.f.value() {
            if v < best_value {
                best_value = v;
                best_atoms = Some(atoms.clone());
            }
        }
    }
    let mut best_atoms = best_atoms.expect("product of marginals is always finite");
    let mut total_iterations = 0usize;

    // Layer 2: seeded Nelder-Mead over the flattened ansatz, on instances
    // small enough for a simplex search to make progress.
    let k = nm_term_count(&dims);
    if nm_param_len(&dims, k) <= NM_PARAM_CAP {
        let mut objective = |params: &[f64]| -> f64 {
            let Some(atoms) = atoms_from_params(params, &dims, k) else {
                return 1e6;
            };
            let sigma = sigma_matrix(&atoms, &dims);
            match evaluate_sigma(rho_matrix, s_rho, &sigma, None) {
                Ok(eval) => eval.f.value().unwrap_or(1e6),
                Err(_) => 1e6,
            }
        };
        let mut starts: Vec<Vec<f64>> = vec![params_from_atoms(&best_atoms, &dims, k)];
        let param_len = nm_param_len(&dims, k);
        for r in 0..cfg.restarts {
            let mut rng = optimize::stream_rng(cfg.seed, 0x100 + r as u64);
            starts.push((0..param_len).map(|_| standard_normal(&mut rng)).collect());
        }
        let opts = NmOptions {
            max_iters: cfg.max_iters,
            tol: cfg.tol,
            init_step: 0.25,
        };
        for start in &starts {
            let run = optimize::nelder_mead(&mut objective, start, &opts);
            total_iterations += run.iters;
            if run.value < best_value {
                if let Some(atoms) = atoms_from_params(&run.x, &dims, k) {
                    best_value = run.value;
                    best_atoms = atoms;
                }
            }
        }
    }

    // Layer 3: conditional-gradient refinement with a duality-gap certificate.
    let fw = frank_wolfe(
        rho_matrix,
        s_rho,
        &dims,
        best_atoms,
        atom_cap,
        optimize::derive_seed(cfg.seed, 0xF17),
    )?;
    total_iterations += fw.iterations;

    // Tidy the reported ansatz (drop negligible weight, renormalize), then
    // re-verify the value on the exact object being returned: the reported
    // value must be a certificate for the reported ansatz. If tidying ever
    // broke the support condition, fall back to the untouched ensemble.
    let mut final_atoms = fw.atoms.clone();
    final_atoms.retain(|a| a.weight > 1e-13);
    renormalize_weights(&mut final_atoms);
    for atom in final_atoms.iter_mut() {
        for part in atom.parts.iter_mut() {
            normalize(part);
        }
    }
    let sigma = sigma_matrix(&final_atoms, &dims);
    let mut reported = evaluate_sigma(rho_matrix, s_rho, &sigma, None)?.f;
    if !reported.is_finite() {
        final_atoms = fw.atoms;
        let sigma = sigma_matrix(&final_atoms, &dims);
        reported = evaluate_sigma(rho_matrix, s_rho, &sigma, None)?.f;
    }
    let reported_value = reported
        .value()
        .expect("conditional-gradient output has compatible support");

    let (_, gap_tol, _) = fw_budget(total_dim);
    let converged = fw.gap.map_or(false, |g| g <= gap_tol);

    let ansatz = SeparableAnsatz {
        weights: final_atoms.iter().map(|a| a.weight).collect(),
        factors: final_atoms.iter().map(|a| a.parts.clone()).collect(),
        dims: dims.clone(),
    };
    ansatz.validate()?;
    Ok(OptResult {
        value: reported_value.max(0.0),
        argument: ansatz,
        iterations: total_iterations,
        converged,
    })
}
