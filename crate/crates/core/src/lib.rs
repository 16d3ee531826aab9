//! Non-Hermitian dissipative cross-stitch lattice with tunable local impurities.
//!
//! This crate builds the lossy cross-stitch lattice and its unitarily
//! equivalent one-way SSH form, computes complex spectra by dense
//! diagonalization, evaluates the analytic transfer-matrix closure condition
//! and energy-dependent Lyapunov exponents, reconstructs scale-free
//! eigenstate profiles, and integrates the dissipative dynamics to resolve
//! impurity-induced loss bursts.
//!
//! Modules map onto the physics pipeline:
//!
//! - [`lattice`]: validated model configuration and Hamiltonian construction
//!   in both bases, plus the unitary cell rotation connecting them.
//! - [`spectral`]: dense non-Hermitian diagonalization, closure residuals,
//!   analytic limit spectra, and loop/detached classification.
//! - [`transfer`]: transfer factors, Lyapunov exponents, eigenstate
//!   reconstruction, profile fitting, and scale-free collapse metrics.
//! - [`dynamics`]: fixed-step propagation of the lossy dynamics, integrated
//!   site-resolved dissipation, burst detection, and impurity-strength scans.
//! - [`validate`]: the end-to-end validation suite with per-check reports.
//!
//! All operations are pure functions of their inputs and deterministic for
//! fixed inputs; values are safe to share read-only across threads.

pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod export;
pub mod lattice;
pub mod spectral;
pub mod transfer;
pub mod validate;

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("impurities closer than two cells apart (PBC distance): {0} and {1}")]
    AdjacentImpurities(usize, usize),

    #[error("bad lattice size: {0}")]
    BadSize(String),

    #[error("negative parameter: {name} = {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("basis mapping mismatch: max deviation {0:.3e} exceeds 1e-12")]
    MappingMismatch(f64),

    #[error("eigenvalue iteration did not converge within the iteration cap")]
    NoConvergence,

    #[error("singular transfer factor at E = {0}")]
    SingularTransfer(C64),

    #[error("eta = 0: impurity transfer and closure are undefined in this form")]
    ZeroEta,

    #[error("E = {0} is not a closure-condition eigenvalue (residual {1:.3e})")]
    NotAnEigenvalue(C64, f64),

    #[error("fit window shorter than 10 cells: length {0}")]
    WindowTooSmall(usize),

    #[error("fit window [{0}, {1}] contains an impurity cell")]
    WindowCrossesImpurity(usize, usize),

    #[error("profiles are not comparable: {0}")]
    IncompatibleConfigs(String),

    #[error("time step too large: dt * rho(H) = {0:.3} exceeds the stability budget 2.0")]
    StepTooLarge(f64),

    #[error("state became non-finite during propagation at t = {0}")]
    NonFiniteState(f64),

    #[error("scan grid too coarse: {0} points (need at least 21)")]
    GridTooCoarse(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub use config::{load_config, DynamicsParams, FileConfig, ScanParams};
pub use dynamics::{
    burst_regions, classify_shape, dissipation_profile, drop_threshold, eta_scan, propagate,
    BurstScanResult, Controls, DissipationProfile, ShapeTag, Trajectory,
};
pub use lattice::{rotation, verify_mapping, Basis, BlockUnitary, Hamiltonian, LatticeConfig};
pub use spectral::{
    analytic_limit_spectrum, classify_spectrum, closure_residual, diagonalize, imaginary_gap,
    LimitKind, LoopTag, SpectrumResult,
};
pub use transfer::{
    bulk_factor, collapse_metric, default_fit_window, fit_lyapunov, impurity_factor, lyapunov,
    lyapunov_conventional, profile_from_vector, reconstruct_eigenstate, select_loop_state,
    EigenstateProfile, LoopSide, StateSelector,
};
