//! Parallel evaluation of key-rate reports.

use cvqan_core::network::{Network, SecurityPolicy};
use cvqan_core::skr::{NetworkAnalysis, SkrReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::architecture::{ArchitectureKind, Realized};
use crate::scenario::{PolicySpec, Scenario};
use crate::CliError;

/// Report with the evaluated classes run in parallel; identical to the sequential result.
pub fn evaluate(net: &Network, policy: &SecurityPolicy) -> Result<SkrReport, CliError> {
    let analysis = NetworkAnalysis::new(net, policy)?;
    let quantities = analysis
        .classes()
        .par_iter()
        .map(|c| analysis.user_quantities(c.representative))
        .collect::<Result<Vec<_>, _>>()?;
    let joint = analysis.joint()?;
    Ok(analysis.report(&quantities, joint)?)
}

/// One policy evaluated on a realized architecture.
#[derive(Debug, Clone, Serialize)]
pub struct PolicyResult {
    pub scenario: String,
    pub label: String,
    pub architecture: ArchitectureKind,
    pub replicas: usize,
    /// Aggregate over all users and replicas, bits/s.
    pub network_aggregate: f64,
    /// Joint all-measured rate over all replicas, bits/s.
    pub network_joint: Option<f64>,
    /// Sum of per-user PLOB rates over all replicas, bits/s.
    pub network_bound: f64,
    pub report: SkrReport,
}

impl PolicyResult {
    pub fn clamped(&self) -> bool {
        self.report.clamped()
    }
}

pub fn realize(scenario: &Scenario) -> Result<(Realized, Network), CliError> {
    let realized = scenario.architecture.realize(&scenario.network)?;
    let net = realized.config.validate()?;
    Ok((realized, net))
}

pub fn run_policy(scenario: &Scenario, spec: &PolicySpec) -> Result<PolicyResult, CliError> {
    let (realized, net) = realize(scenario)?;
    let report = evaluate(&net, &spec.policy())?;
    let r = realized.replicas as f64;
    Ok(PolicyResult {
        scenario: scenario.name.clone(),
        label: spec.label(),
        architecture: scenario.architecture.kind,
        replicas: realized.replicas,
        network_aggregate: r * report.aggregate,
        network_joint: report.joint.as_ref().map(|j| r * j.key_rate),
        network_bound: r * report.bound_network,
        report,
    })
}

/// Every policy of the scenario, in file order.
pub fn run_all(scenario: &Scenario) -> Result<Vec<PolicyResult>, CliError> {
    scenario.policies.par_iter().map(|p| run_policy(scenario, p)).collect()
}
