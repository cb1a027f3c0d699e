use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::bounds::plob_bound;
use super::finite_size::{finite_size_delta, worst_case_channel, FiniteSizePolicy};
use super::report::{JointRate, SkrReport, UserRate};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_mutual_information, heterodyne_condition, von_neumann_entropy_with, GaussianState, ModeSelection,
};
use crate::network::{
    attach_detector_model, bob_mode, build_network_covariance, detected_outcome_cov, receiver_power_factor, Capability,
    Network, Partition, SecurityPolicy, UserIndex,
};
use crate::numeric::NumericPolicy;

/// Per-user information quantities in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserQuantities {
    pub i_ab: f64,
    pub chi: f64,
    pub i_res: f64,
    pub delta: f64,
    /// False when parameter estimation cannot lower-bound the transmittance.
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointQuantities {
    pub i_ab: f64,
    pub chi: f64,
    pub delta: f64,
    pub q_s: f64,
    pub certified: bool,
}

/// Users that are exchangeable under a mode permutation and share all quantities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserClass {
    pub representative: UserIndex,
    pub members: Vec<UserIndex>,
}

/// One covariance at which leakage is evaluated, with cached whole-network terms.
#[derive(Debug, Clone)]
struct Evaluation {
    state: GaussianState,
    /// Entropy of the full network state; the detector ancillas are pure and unitarily mixed in.
    s_total: Option<f64>,
    /// Detected outcome covariance of all Bob modes and its inverse.
    bob_outcomes: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

/// Precomputed analysis of one network under one security policy.
#[derive(Debug, Clone)]
pub struct NetworkAnalysis {
    net: Network,
    policy: SecurityPolicy,
    numeric: NumericPolicy,
    nominal: Evaluation,
    /// Worst-case evaluations for levels that replace the channel estimate.
    corners: Vec<Evaluation>,
    certified: Vec<bool>,
    delta: f64,
    classes: Vec<UserClass>,
}

fn det2(m: &DMatrix<f64>, r: usize) -> f64 {
    m[(r, r)] * m[(r + 1, r + 1)] - m[(r, r + 1)] * m[(r + 1, r)]
}

impl NetworkAnalysis {
    pub fn new(net: &Network, policy: &SecurityPolicy) -> Result<Self> {
        Self::with_numeric(net, policy, NumericPolicy::default())
    }

    pub fn with_numeric(net: &Network, policy: &SecurityPolicy, numeric: NumericPolicy) -> Result<Self> {
        policy.validate()?;
        let fs = policy.finite_size();
        let delta = finite_size_delta(&fs)?;
        let needs_total = policy.partition != Partition::Untrusted;
        let nominal = Self::evaluate_network(net, policy.capability, needs_total, &numeric)?;
        let mut certified = alloc::vec![true; net.n_users()];
        let mut corners = Vec::new();
        if fs.uses_worst_case() {
            let (low, high, cert) = worst_case_networks(net, policy.capability, &fs)?;
            certified = cert;
            corners.push(Self::evaluate_network(&low, policy.capability, needs_total, &numeric)?);
            corners.push(Self::evaluate_network(&high, policy.capability, needs_total, &numeric)?);
        }
        Ok(Self {
            net: net.clone(),
            policy: *policy,
            numeric,
            nominal,
            corners,
            certified,
            delta,
            classes: user_classes(net),
        })
    }

    fn evaluate_network(
        net: &Network,
        cap: Capability,
        needs_total: bool,
        numeric: &NumericPolicy,
    ) -> Result<Evaluation> {
        let state = build_network_covariance(net, cap)?;
        let s_total = if needs_total { Some(von_neumann_entropy_with(&state, numeric)?) } else { None };
        let bob_outcomes = if net.n_users() > 1 {
            let bob: Vec<usize> = net.users().map(|u| bob_mode(net, u)).collect();
            let gamma = detected_outcome_cov(&state, &[], &bob, net.eta_e(), net.v_el())?;
            let inv = gamma
                .clone()
                .cholesky()
                .ok_or_else(|| Error::Numerical("Bob outcome covariance is not positive definite".into()))?
                .inverse();
            Some((gamma, inv))
        } else {
            None
        };
        Ok(Evaluation { state, s_total, bob_outcomes })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn policy(&self) -> &SecurityPolicy {
        &self.policy
    }

    pub fn classes(&self) -> &[UserClass] {
        &self.classes
    }

    /// Explicit finite-size correction for a single-user key.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Nominal point followed by the worst-case points, if any.
    fn leakage_points(&self) -> impl Iterator<Item = &Evaluation> {
        core::iter::once(&self.nominal).chain(&self.corners)
    }

    /// Mutual information between Alice's mode `k` and the user's detected outcome.
    pub fn mutual_information(&self, user: UserIndex) -> Result<f64> {
        let net = &self.net;
        let joint = detected_outcome_cov(
            &self.nominal.state,
            &[user.k() - 1],
            &[bob_mode(net, user)],
            net.eta_e(),
            net.v_el(),
        )?;
        gaussian_mutual_information(&joint, 2)
    }

    fn holevo_at(&self, ev: &Evaluation, user: UserIndex) -> Result<f64> {
        let net = &self.net;
        let target = bob_mode(net, user);
        match self.policy.partition {
            Partition::Untrusted => {
                let mut keep: Vec<usize> = (0..net.n_w()).collect();
                keep.push(target);
                let sub = ev.state.partial_trace(&ModeSelection::new(keep, ev.state.n_modes())?)?;
                let m = ModeSelection::single(net.n_w(), sub.n_modes())?;
                let det = attach_detector_model(&sub, &m, net.eta_e(), net.v_el())?;
                let cond = heterodyne_condition(&det.state, &m)?;
                Ok(von_neumann_entropy_with(&det.state, &self.numeric)?
                    - von_neumann_entropy_with(&cond, &self.numeric)?)
            }
            Partition::Trusted | Partition::AllMeasured => {
                let m = ModeSelection::single(target, ev.state.n_modes())?;
                let det = attach_detector_model(&ev.state, &m, net.eta_e(), net.v_el())?;
                let total = match (ev.s_total, det.f_modes.is_empty() && net.v_el() > 0.0) {
                    (Some(s), false) => s,
                    _ => von_neumann_entropy_with(&det.state, &self.numeric)?,
                };
                let cond = heterodyne_condition(&det.state, &m)?;
                Ok(total - von_neumann_entropy_with(&cond, &self.numeric)?)
            }
        }
    }

    fn residual_at(&self, ev: &Evaluation, user: UserIndex) -> f64 {
        match &ev.bob_outcomes {
            None => 0.0,
            Some((gamma, inv)) => {
                let r = 2 * user.slot();
                0.5 * (det2(gamma, r) * det2(inv, r)).log2()
            }
        }
    }

    /// Holevo leakage of the user's key, maximized over the nominal and worst-case points.
    pub fn holevo(&self, user: UserIndex) -> Result<f64> {
        let mut chi = f64::NEG_INFINITY;
        for ev in self.leakage_points() {
            chi = chi.max(self.holevo_at(ev, user)?);
        }
        Ok(chi)
    }

    /// Classical correlation between the user's outcome and all other Bob outcomes.
    pub fn residual(&self, user: UserIndex) -> f64 {
        self.leakage_points().map(|ev| self.residual_at(ev, user)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// All quantities for one user.
    pub fn user_quantities(&self, user: UserIndex) -> Result<UserQuantities> {
        Ok(UserQuantities {
            i_ab: self.mutual_information(user)?,
            chi: self.holevo(user)?,
            i_res: self.residual(user),
            delta: self.delta,
            certified: self.certified[user.slot()],
        })
    }

    /// Joint key quantities of the all-measured partition; `None` for other partitions.
    pub fn joint(&self) -> Result<Option<JointQuantities>> {
        if self.policy.partition != Partition::AllMeasured {
            return Ok(None);
        }
        let net = &self.net;
        let alice: Vec<usize> = (0..net.n_w()).collect();
        let bob: Vec<usize> = net.users().map(|u| bob_mode(net, u)).collect();
        let joint = detected_outcome_cov(&self.nominal.state, &alice, &bob, net.eta_e(), net.v_el())?;
        let i_ab = gaussian_mutual_information(&joint, 2 * net.n_w())?;
        let mut chi = f64::NEG_INFINITY;
        for ev in self.leakage_points() {
            let m = ModeSelection::new(bob.clone(), ev.state.n_modes())?;
            let det = attach_detector_model(&ev.state, &m, net.eta_e(), net.v_el())?;
            let total = match (ev.s_total, det.f_modes.is_empty() && net.v_el() > 0.0) {
                (Some(s), false) => s,
                _ => von_neumann_entropy_with(&det.state, &self.numeric)?,
            };
            let cond = heterodyne_condition(&det.state, &m)?;
            chi = chi.max(total - von_neumann_entropy_with(&cond, &self.numeric)?);
        }
        let q_s = net.n_w() as f64;
        Ok(Some(JointQuantities {
            i_ab,
            chi,
            delta: q_s * self.delta,
            q_s,
            certified: self.certified.iter().all(|&c| c),
        }))
    }

    /// Builds the report from quantities evaluated for every class, in class order.
    pub fn report(&self, quantities: &[UserQuantities], joint: Option<JointQuantities>) -> Result<SkrReport> {
        if quantities.len() != self.classes.len() {
            return Err(Error::Input(format!(
                "expected {} class results, got {}",
                self.classes.len(),
                quantities.len()
            )));
        }
        let net = &self.net;
        let f_r = net.f_r();
        let mut slots: Vec<Option<UserRate>> = alloc::vec![None; net.n_users()];
        for (class, q) in self.classes.iter().zip(quantities) {
            for &u in &class.members {
                let beta = net.beta(u);
                let f_s = net.f_s(u);
                let raw = beta * q.i_ab - q.chi.max(q.i_res) - q.delta;
                let key_rate = if q.certified { f_r * f_s * raw.max(0.0) } else { 0.0 };
                let t_bound = match self.policy.partition {
                    Partition::Untrusted => net.transmittance(u) * net.branch_ratio(u),
                    Partition::Trusted | Partition::AllMeasured => net.transmittance(u),
                };
                let (bound_bits_per_use, _) = plob_bound(t_bound);
                slots[u.slot()] = Some(UserRate {
                    i_prime: u.i_prime(),
                    k: u.k(),
                    h: u.h(),
                    i_ab: q.i_ab,
                    chi: q.chi,
                    i_res: q.i_res,
                    delta: q.delta,
                    beta,
                    f_s,
                    raw,
                    key_rate,
                    t_bound,
                    bound_bits_per_use,
                    bound_rate: f_r * bound_bits_per_use,
                });
            }
        }
        let per_user: Vec<UserRate> = slots.into_iter().map(|s| s.expect("every user belongs to a class")).collect();
        let aggregate = per_user.iter().map(|u| u.key_rate).sum();
        let bound_network = per_user.iter().map(|u| u.bound_rate).sum();
        let bound_capped = per_user.iter().any(|u| plob_bound(u.t_bound).1);
        let joint = joint.map(|j| {
            let n = net.n_users() as f64;
            let beta = net.users().map(|u| net.beta(u)).sum::<f64>() / n;
            let f_s = net.users().map(|u| net.f_s(u)).sum::<f64>() / n;
            let raw = beta * j.i_ab - j.chi - j.delta;
            let key_rate = if j.certified { f_r * f_s * raw.max(0.0) } else { 0.0 };
            JointRate { i_ab: j.i_ab, chi: j.chi, delta: j.delta, q_s: j.q_s, beta, f_s, raw, key_rate }
        });
        Ok(SkrReport {
            policy: self.policy,
            preset: self.policy.preset.name().into(),
            f_r,
            per_user,
            aggregate,
            joint,
            bound_network,
            bound_capped,
            classes: self.classes.len(),
        })
    }
}

/// Groups users with equal frequency group and bitwise-equal per-user parameters.
fn user_classes(net: &Network) -> Vec<UserClass> {
    let mut index: BTreeMap<[u64; 7], usize> = BTreeMap::new();
    let mut classes: Vec<UserClass> = Vec::new();
    for u in net.users() {
        let key = [
            u.k() as u64,
            net.branch_ratio(u).to_bits(),
            net.transmittance(u).to_bits(),
            net.epsilon(u).to_bits(),
            net.theta(u).to_bits(),
            net.beta(u).to_bits(),
            net.f_s(u).to_bits(),
        ];
        match index.get(&key) {
            Some(&c) => classes[c].members.push(u),
            None => {
                index.insert(key, classes.len());
                classes.push(UserClass { representative: u, members: alloc::vec![u] });
            }
        }
    }
    classes
}

/// Networks at the two worst-case points: lowest transmittance with the noise bound, and the
/// nominal transmittance with the noise bound.
fn worst_case_networks(net: &Network, cap: Capability, fs: &FiniteSizePolicy) -> Result<(Network, Network, Vec<bool>)> {
    let n = net.n_users();
    let mut t_low = Vec::with_capacity(n);
    let mut e_low = Vec::with_capacity(n);
    let mut t_high = Vec::with_capacity(n);
    let mut e_high = Vec::with_capacity(n);
    let mut certified = Vec::with_capacity(n);
    for u in net.users() {
        let d = net.allocation()[(u.k() - 1, u.k() - 1)];
        let q = d * d;
        let r = net.branch_ratio(u);
        let t_d = net.transmittance(u);
        let eps = net.epsilon(u);
        let t_eff = t_d * r * q;
        let c = receiver_power_factor(net, u, cap) / (r * q);
        let wc = if q > 0.0 {
            worst_case_channel(t_eff, c * eps, net.eta_e(), net.v_el(), net.modulation_variance(u.k()), fs)
        } else {
            None
        };
        match wc {
            Some(w) => {
                t_low.push(t_d * w.t_min / t_eff);
                e_low.push(w.eps_at_t_min / c);
                t_high.push(t_d);
                e_high.push(w.eps_at_t_hat / c);
                certified.push(true);
            }
            None => {
                t_low.push(t_d);
                e_low.push(eps);
                t_high.push(t_d);
                e_high.push(eps);
                certified.push(false);
            }
        }
    }
    Ok((net.with_user_channels(t_low, e_low)?, net.with_user_channels(t_high, e_high)?, certified))
}

/// Full report, evaluating one representative per user class.
pub fn skr_report(net: &Network, policy: &SecurityPolicy) -> Result<SkrReport> {
    let analysis = NetworkAnalysis::new(net, policy)?;
    let mut qs = Vec::with_capacity(analysis.classes().len());
    for class in analysis.classes() {
        qs.push(analysis.user_quantities(class.representative)?);
    }
    let joint = analysis.joint()?;
    analysis.report(&qs, joint)
}

pub fn mutual_information_user(net: &Network, user: UserIndex, policy: &SecurityPolicy) -> Result<f64> {
    NetworkAnalysis::new(net, policy)?.mutual_information(user)
}

pub fn holevo_user(net: &Network, user: UserIndex, policy: &SecurityPolicy) -> Result<f64> {
    NetworkAnalysis::new(net, policy)?.holevo(user)
}

pub fn residual_info(net: &Network, user: UserIndex, policy: &SecurityPolicy) -> Result<f64> {
    Ok(NetworkAnalysis::new(net, policy)?.residual(user))
}

/// Rate record of a single user.
pub fn skr_user(net: &Network, policy: &SecurityPolicy, user: UserIndex) -> Result<UserRate> {
    let report = skr_report(net, policy)?;
    Ok(report.per_user[user.slot()].clone())
}

/// Aggregate network rate in bits per second.
pub fn skr_sum(net: &Network, policy: &SecurityPolicy) -> Result<f64> {
    Ok(skr_report(net, policy)?.aggregate)
}

/// Joint rate in bits per second for the all-measured partition.
pub fn skr_joint(net: &Network, policy: &SecurityPolicy) -> Result<Option<f64>> {
    Ok(skr_report(net, policy)?.joint.map(|j| j.key_rate))
}
