//! Monte Carlo simulation of the prepare-and-measure pipeline.
//!
//! Amplitudes are classical complex numbers of the Glauber P-representation: a coherent state
//! `|γ⟩` is carried as `γ = (x + j p) / √2`-style amplitude with `⟨|γ|²⟩ = V` for an ensemble of
//! variance `V`, so each of `Re γ`, `Im γ` has variance `V/2`. The SNU quadrature of an amplitude
//! is `√2 Re γ` (or `√2 Im γ`) and has variance `V`. Vacuum has zero amplitude, so vacuum
//! admixture at a beam splitter is a deterministic attenuation; the quantum noise of a
//! measurement appears as one shot-noise unit added at detection.

mod channel;
mod detection;
mod dsp;
mod estimation;
mod pipeline;
mod preparation;
mod rng;
mod source;
mod trace;

pub use channel::{channel_transform, Overlap};
pub use detection::{detect, qlt_heterodyne};
pub use dsp::{qnu_heterodyne_with_dsp, recover_phase, synthesize_phase, DspConfig, DspOutput};
pub use estimation::{
    estimate_parameters, EstimationConfig, EstimationResult, MonitorCalibration, MIN_ESTIMATION_SAMPLES,
};
pub use pipeline::{eb_covariance_from_pm, simulate_network, PmConfig, PmRun};
pub use preparation::{passive_preparation, Prepared, TapRatios};
pub use rng::{substream, Stage};
pub use source::{bose_einstein_pmf, mean_photon_number, sample_thermal_ensemble};
pub use trace::{empirical_covariance, quadrature, EmpiricalCovariance, QuadratureTrace};

/// Complex amplitude type of every trace.
pub type Amplitude = nalgebra::Complex<f64>;
