//! Two identical electrons scattering on a double-barrier potential whose well
//! floor may oscillate in time.
//!
//! The crate evolves each one-particle orbital with a Crank–Nicolson scheme,
//! decomposes the settled orbitals into reflected and transmitted parts, and
//! turns the same-side overlap into two-particle quadrant probabilities and a
//! zero-frequency shot-noise value. A grid-free transfer-matrix solver and the
//! quasi-static resonance-ridge formulas serve as independent oracles.
//!
//! All quantities use eV, nm and fs.
//!
//! The crate is `no_std` (with `alloc`); the `std` feature only adds
//! `std::error::Error` impls.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
pub mod grid;
pub mod noise;
pub mod packet;
pub mod potential;
pub mod propagator;
pub mod resonance;
pub mod scattering;
pub mod tridiag;
pub mod units;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use noise::{
    count_distribution, noise, variance_identity_check, CountDistribution, NoiseRecord,
    OccupationPair,
};
pub use packet::{init_gaussian, Direction, WaveField, WavePacketSpec};
pub use potential::{build_potential, PotentialSpec};
pub use propagator::{
    propagate_ensemble, propagate_until_settled, step, CrankNicolson, PropagationConfig,
    PropagationResult, TraceRow,
};
pub use resonance::{
    arrival_time, find_resonances, period, ridge_energy, ridge_frequency, shifted_resonance,
    transfer_matrix_transmission, Resonance, RidgeParams, RidgePrediction, RidgeSample,
    StaticSpectrum,
};
pub use scattering::{
    coefficients, overlap, quadrant_probabilities, two_particle_quadrant_oracle, BarrierWindow,
    QuadrantMasses, QuadrantProbabilities, ScatteringRecord, Side, DEFAULT_ORACLE_STRIDE,
};
pub use units::PhysicalModel;

/// Complex amplitude type used for every wavefunction sample.
pub type C64 = num_complex::Complex64;
