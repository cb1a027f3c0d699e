//! Network description and the entanglement-based covariance of the access network.

mod allocation;
mod config;
mod covariance;
mod detector;
mod policy;

pub use allocation::{build_frequency_allocation, orthogonality_error};
pub use config::{Allocation, ChannelSpec, Network, NetworkConfig, UserIndex};
pub use covariance::{
    alice_mode, bob_mode, build_network_covariance, build_network_covariance_sequential, CovarianceView, NetworkViews,
};
pub use detector::{attach_detector_model, detected_outcome_cov, DetectedState};
pub use policy::{partition_modes, receiver_power_factor, Capability, Level, ModePartition, Partition, SecurityPolicy};
