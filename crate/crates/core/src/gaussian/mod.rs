//! Gaussian-state linear algebra.

mod channels;
mod measurement;
mod spectrum;
mod state;

pub(crate) use channels::beamsplitter_in_place;
pub use channels::{
    apply_beamsplitter, apply_local_symplectic, apply_loss_excess, apply_passive, apply_phase_rotation,
};
pub use measurement::{gaussian_mutual_information, heterodyne_condition, heterodyne_outcome_cov, log_det_spd};
pub use spectrum::{
    entropy_g, symplectic_eigenvalues, symplectic_eigenvalues_with, von_neumann_entropy, von_neumann_entropy_with,
};
pub use state::{two_mode_squeezed_cov, GaussianState, ModeSelection, SymplecticForm};
