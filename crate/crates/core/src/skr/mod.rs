//! Key-rate engine: mutual information, Holevo leakage, residual correlation,
//! finite-size corrections and repeaterless bounds.

mod bounds;
mod engine;
mod finite_size;
mod report;

pub use bounds::{plob_bound, plob_n_bound, PLOB_CAP_BITS};
pub use engine::{
    holevo_user, mutual_information_user, residual_info, skr_joint, skr_report, skr_sum, skr_user, JointQuantities,
    NetworkAnalysis, UserClass, UserQuantities,
};
pub use finite_size::{
    erfc_inv, finite_size_delta, pe_z_score, worst_case_channel, Coefficients, CorrectionPreset, FiniteSizePolicy,
    WorstCase,
};
pub use report::{JointRate, SkrReport, UserRate};
