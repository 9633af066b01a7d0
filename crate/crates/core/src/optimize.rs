//! Derivative-free minimization: a seeded Nelder-Mead simplex search plus the
//! deterministic RNG-stream conventions used by every randomized search in
//! this crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid_arg, Result};

/// Shared knobs for the variational searches (POVM and separable-state
/// optimizers).
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Number of random restarts in addition to the deterministic warm starts.
    pub restarts: usize,
    /// Iteration budget per Nelder-Mead run.
    pub max_iters: usize,
    /// Convergence tolerance on the simplex value spread.
    pub tol: f64,
    /// Base seed; restart `r` draws from an independent stream `(seed, r)`.
    pub seed: u64,
    /// POVM outcome count for the classical-correlations search
    /// (`None` = squared dimension of the measured subsystem).
    pub outcomes: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 8,
            max_iters: 2000,
            tol: 1e-7,
            seed: 0,
            outcomes: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid_arg!("optimizer config: restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(invalid_arg!("optimizer config: max_iters must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid_arg!("optimizer config: tol must be positive"));
        }
        Ok(())
    }
}

/// The RNG for restart stream `stream` of base seed `seed`.
///
/// Streams are independent and the mapping is fixed, so results never depend
/// on evaluation order and are reproducible across runs and platforms.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mix a tag into a base seed (splitmix64 finalizer), giving distinct
/// sub-searches of one task their own deterministic seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Options for a single Nelder-Mead run.
#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    pub max_iters: usize,
    /// Stop when the value spread across the simplex falls below this.
    pub tol: f64,
    /// Initial simplex displacement along each coordinate.
    pub init_step: f64,
}

/// Outcome of a Nelder-Mead run.
#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
    pub evals: usize,
    pub converged: bool,
}

/// Minimize with the Nelder-Mead simplex method (standard coefficients:
/// reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], opts: &NmOptions) -> NmResult {
    let n = x0.len();
    assert!(n > 0, "nelder_mead: empty parameter vector");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus a displacement along each coordinate axis.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.init_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let mut iters = 0usize;
    let mut converged = false;
    while iters < opts.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= opts.tol {
            converged = true;
            break;
        }
        iters += 1;

        // Centroid of all points except the worst.
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let best_value = simplex[0].1;
        let second_worst = simplex[n - 1].1;

        let blend = |a: f64| -> Vec<f64> {
            // Point centroid + a * (centroid - worst).
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + a * (c - w))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < best_value {
            let expanded = blend(2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < second_worst {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                blend(0.5) // outside contraction
            } else {
                blend(-0.5) // inside contraction
            };
            let fc = eval(&contracted, &mut evals);
            if fc < fr.min(worst.1) {
                simplex[n] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(&best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    entry.1 = eval(&entry.0, &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NmResult {
        x,
        value,
        iters,
        evals,
        converged,
    }
}
