//! Exact simulation of flow-state cat creation for bosons on a three-site
//! ring lattice, and of the three-port interferometer built from it.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`). The aliases at the bottom fix the precision.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod hamiltonian;
pub mod interferometer;
pub mod modes;
pub mod protocol;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use evolution::{
    evolve_diagonal, evolve_interaction_phase, evolve_spectral, SpectralPropagator,
};
pub use fock::{
    dimension, enumerate_basis, multinomial_amplitude, rank, unrank, FockBasis, FockState,
};
pub use hamiltonian::{
    build_bose_hubbard, build_rotating_momentum_hamiltonian, rotating_mode_energies,
    HermitianOperator, HubbardParams,
};
pub use interferometer::{
    cat_matrix, fringe_probabilities, fringe_scan, full_simulation_fringes, phase_matrix,
    simulated_cat_matrix, FringeScan, FringeSettings, FringeSimulator,
};
pub use modes::{
    dft_mode_matrix, extremal_mode_probabilities, lift_to_fock, FockLift, ModeUnitary,
    MomentumTransform,
};
pub use protocol::{
    analytic_p3, calibrate_u, cattiness, cattiness_sweep, fit_timing, run_protocol,
    timing_tolerance, Calibration, ProtocolResult, TimingFit,
};
pub use scalar::Real;
pub use state::{
    site_number_distribution, superfluid_ground_state, Representation, SiteProbability, StateVector,
};

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type HermitianOperator64 = HermitianOperator<f64>;
pub type MomentumTransform64 = MomentumTransform<f64>;
pub type FockLift64 = FockLift<f64>;
pub type ProtocolResult64 = ProtocolResult<f64>;
