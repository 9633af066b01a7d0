//! Simulation of quantum measurement with an initially mixed apparatus.
//!
//! The library models a projective-pointer measurement as a controlled shift
//! on an apparatus ⊗ system Hilbert space and computes the
//! information-theoretic quantities that characterize it: the information
//! gain of the pointer record, how it trades off against the apparatus'
//! initial mixedness, the classical and entanglement correlations that the
//! interaction builds up, the disturbance inflicted on the system, and the
//! bounds all of these obey once the apparatus is purified by an
//! environment.
//!
//! Quantities are reported in bits. Optimization-based estimates
//! (classical correlations, relative entropy of entanglement) carry explicit
//! directions — upper estimates and lower bounds are never silently mixed —
//! and all randomized searches are deterministic functions of their seed.
//!
//! ```
//! use num_complex::Complex64;
//! use qmeas_core::measurement::{Interaction, MeasurementModel, run_measurement};
//!
//! let s = std::f64::consts::FRAC_1_SQRT_2;
//! let model = MeasurementModel {
//!     system_amplitudes: vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
//!     apparatus_spectrum: vec![0.75, 0.25],
//!     apparatus_basis: None,
//!     interaction: Interaction::Shift,
//! };
//! let outcome = run_measurement(&model).unwrap();
//! // A mixed apparatus gains less than the full bit the amplitudes carry,
//! // and the shortfall is exactly the apparatus entropy.
//! assert!(outcome.info_gain < 1.0);
//! assert!(outcome.uncertainty_margin.abs() < 1e-9);
//! ```

pub mod correlations;
pub mod eigen;
pub mod entanglement;
pub mod entropy;
pub mod error;
pub mod matrix;
pub mod measurement;
pub mod optimize;
pub mod sampling;
pub mod state;
pub mod tripartite;

pub use correlations::{classical_correlations, MeasuredSide, OptResult, Povm};
pub use eigen::{hermitian_eig, HermitianEigen};
pub use entanglement::{
    entanglement_lower_bound, relative_entropy_of_entanglement_ub, SeparableAnsatz,
};
pub use entropy::{
    holevo, mutual_information, relative_entropy, shannon_entropy, von_neumann_entropy, Ensemble,
    RelEntropy,
};
pub use error::{Error, Result};
pub use matrix::{tensor_product, ComplexMatrix};
pub use measurement::{
    check_uncertainty, disturbance, information_gain, run_measurement, Interaction,
    MeasurementModel, MeasurementOutcome,
};
pub use optimize::{derive_seed, nelder_mead, stream_rng, NmOptions, NmResult, OptimizerConfig};
pub use state::{partial_trace, purify, DensityMatrix, PureState};
pub use tripartite::{
    check_efficiency_bounds, check_tripartite_bounds, purified_measurement, BoundKind, CheckStatus,
    InequalityCheck, TripartiteOutcome,
};
