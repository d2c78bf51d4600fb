//! Photon-added displaced Fock states a†^k D(α)|n⟩: construction in a truncated
//! Fock basis, Wigner functions, nonclassicality and non-Gaussianity measures,
//! and evolution under photon loss.
//!
//! Phase-space conventions: γ = x + iy with the coherent state |α⟩ centred at
//! γ = α, and W normalized so that ∫∫ W dx dy = 1.

pub mod error;
pub mod loss;
pub mod measures;
pub mod quadrature;
pub mod special;
pub mod state;
pub mod wigner;

pub use error::{Error, Result};
pub use loss::{
    evolve_loss, evolved_padfs, noisy_wigner, noisy_wigner_convolution, noisy_wigner_function,
    wigner_at_origin_witness, wln_decay_curve, wln_threshold, DecayPoint, LossParams,
};
pub use measures::{
    alpha_inversion, beamsplitter_output, covariance_matrix, linear_entropy_closed_form,
    linear_entropy_potential, measure_report, rel_entropy_non_gaussianity, skew_info_measure,
    wigner_log_negativity, CovarianceMatrix, Measure, MeasureReport, TwoModeState, WlnEstimate,
};
pub use num_complex::Complex64;
pub use quadrature::{integrate_phase_space, QuadratureResult, QuadratureSpec};
pub use special::{laguerre_general, log_factorial};
pub use state::{
    limiting_state, padfs_coefficients, to_density_matrix, DensityMatrix, FockVector, LimitingState,
    PadfsParams,
};
pub use wigner::{
    wigner_generic, wigner_grid, wigner_padfs, PhasePoint, QuadratureOptions, Window, WignerFunction,
    WignerGrid, WignerSource,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
