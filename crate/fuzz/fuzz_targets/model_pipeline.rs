//! Fuzzes the measurement pipeline with small structured models.
//!
//! Raw fuzz bytes are decoded into dimensions, amplitudes, and a spectrum;
//! after normalization the model either fails validation cleanly or runs the
//! full measurement. A validated model must never panic, and its outputs must
//! satisfy the certified invariants: finite entropies, the capacity bound,
//! and a non-negative entanglement lower bound.

#![no_main]

use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;
use num_complex::Complex64;
use qmeas_core::{
    run_measurement, sampling, stream_rng, Interaction, MeasurementModel,
};

/// Structured seed decoded from raw fuzz bytes.
#[derive(Arbitrary, Debug)]
struct RawModel {
    system_dim: u8,
    apparatus_dim: u8,
    amplitude_parts: [(i16, i16); 4],
    spectrum_parts: [u16; 4],
    basis_seed: Option<u64>,
}

fuzz_target!(|raw: RawModel| {
    let d_s = 1 + (raw.system_dim % 4) as usize;
    let n = 1 + (raw.apparatus_dim % 4) as usize;

    let mut amplitudes: Vec<Complex64> = raw.amplitude_parts[..d_s]
        .iter()
        .map(|&(re, im)| Complex64::new(f64::from(re), f64::from(im)))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    for a in amplitudes.iter_mut() {
        *a /= norm;
    }

    let total: f64 = raw.spectrum_parts[..n]
        .iter()
        .map(|&p| f64::from(p))
        .sum();
    if total == 0.0 {
        return;
    }
    let spectrum: Vec<f64> = raw.spectrum_parts[..n]
        .iter()
        .map(|&p| f64::from(p) / total)
        .collect();

    let model = MeasurementModel {
        system_amplitudes: amplitudes,
        apparatus_spectrum: spectrum,
        apparatus_basis: raw
            .basis_seed
            .map(|seed| sampling::random_unitary(&mut stream_rng(seed, 0), n)),
        interaction: Interaction::Shift,
    };
    if model.validate().is_err() {
        return;
    }

    let outcome = run_measurement(&model).expect("a validated model must run");
    assert!(outcome.info_gain.is_finite(), "non-finite information gain");
    assert!(
        outcome.apparatus_entropy.is_finite(),
        "non-finite apparatus entropy"
    );
    assert!(
        outcome.uncertainty_margin >= -1e-6,
        "capacity bound violated by {:.3e}",
        -outcome.uncertainty_margin
    );
    assert!(
        outcome.ent_lower_bound >= -1e-9,
        "negative entanglement lower bound {:.3e}",
        outcome.ent_lower_bound
    );
    assert!(
        outcome.disturbance >= -1e-9,
        "negative disturbance {:.3e}",
        outcome.disturbance
    );
});
