use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::config::{Network, UserIndex};
use super::policy::{receiver_power_factor, Capability};
use crate::error::Result;
use crate::gaussian::{
    apply_beamsplitter, apply_loss_excess, apply_passive, apply_phase_rotation, GaussianState, ModeSelection,
};
use crate::numeric::NumericPolicy;

/// Index of Alice's mode for frequency group `k` (1-based).
pub fn alice_mode(k: usize) -> usize {
    k - 1
}

/// Index of user `i'` in the network state: Alice's `N_W` modes come first.
pub fn bob_mode(net: &Network, user: UserIndex) -> usize {
    net.n_w() + user.slot()
}

/// Full Alice and Bob covariance assembled block by block, checked for physicality.
///
/// Alice blocks are `V_u I`, Alice-Bob blocks `sqrt(T_d r_h) C_u D_ku Z`, and Bob-Bob blocks
/// combine the split thermal light, the vacuum entering unused splitter ports, and the
/// residual channel `(1 - T_d + T_d Q eps) I` on the diagonal.
pub fn build_network_covariance(net: &Network, capability: Capability) -> Result<GaussianState> {
    let state = assemble(net, capability)?;
    state.check_physical(&NumericPolicy::default())?;
    Ok(state)
}

pub(crate) fn assemble(net: &Network, capability: Capability) -> Result<GaussianState> {
    let n_w = net.n_w();
    let n = net.n_users();
    let d = net.allocation();
    let v: Vec<f64> = (1..=n_w).map(|k| net.modulation_variance(k) + 1.0).collect();
    let c: Vec<f64> = v.iter().map(|v| (v * v - 1.0).sqrt()).collect();
    let w = d * DMatrix::from_diagonal(&DVector::from_vec(v.clone())) * d.transpose();
    let users: Vec<UserIndex> = net.users().collect();
    let dim = 2 * (n_w + n);
    let mut cov = DMatrix::zeros(dim, dim);
    for u in 0..n_w {
        cov[(2 * u, 2 * u)] = v[u];
        cov[(2 * u + 1, 2 * u + 1)] = v[u];
    }
    for &i in &users {
        let bi = bob_mode(net, i);
        let (ti, ri) = (net.transmittance(i), net.branch_ratio(i));
        let s = (ti * ri).sqrt();
        for u in 0..n_w {
            let x = s * c[u] * d[(i.k() - 1, u)];
            cov[(2 * u, 2 * bi)] = x;
            cov[(2 * bi, 2 * u)] = x;
            cov[(2 * u + 1, 2 * bi + 1)] = -x;
            cov[(2 * bi + 1, 2 * u + 1)] = -x;
        }
        for &l in &users {
            let bl = bob_mode(net, l);
            let (tl, rl) = (net.transmittance(l), net.branch_ratio(l));
            let rr = (ri * rl).sqrt();
            let mut x = rr * w[(i.k() - 1, l.k() - 1)];
            if i.k() == l.k() {
                x += if i.h() == l.h() { 1.0 } else { 0.0 } - rr;
            }
            x *= (ti * tl).sqrt();
            if i == l {
                x += 1.0 - ti + ti * receiver_power_factor(net, i, capability) * net.epsilon(i);
            }
            cov[(2 * bi, 2 * bl)] = x;
            cov[(2 * bi + 1, 2 * bl + 1)] = x;
        }
    }
    let mut state = GaussianState::from_parts_unchecked(DVector::zeros(dim), cov);
    for &i in &users {
        let theta = net.theta(i);
        if theta != 0.0 {
            state = apply_phase_rotation(&state, bob_mode(net, i), theta)?;
        }
    }
    Ok(state)
}

/// Intermediate covariance matrices of the sequential construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkViews {
    /// EPR bank: Alice modes followed by one partner per frequency.
    pub initial: GaussianState,
    /// Same modes after the frequency allocation.
    pub post_allocation: GaussianState,
    /// Alice modes and all Bob branches after the splitter.
    pub post_splitting: GaussianState,
    /// Alice modes and all Bob branches after the residual user channels.
    pub final_state: GaussianState,
}

/// Selectable covariance export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceView {
    Initial,
    PostAllocation,
    PostSplitting,
    BobSide,
}

impl NetworkViews {
    pub fn view(&self, view: CovarianceView, n_w: usize) -> DMatrix<f64> {
        match view {
            CovarianceView::Initial => self.initial.cov().clone(),
            CovarianceView::PostAllocation => self.post_allocation.cov().clone(),
            CovarianceView::PostSplitting => self.post_splitting.cov().clone(),
            CovarianceView::BobSide => {
                let n = self.final_state.n_modes();
                let bob = ModeSelection::new((n_w..n).collect(), n).expect("valid range");
                self.final_state.partial_trace(&bob).expect("non-empty").into_cov()
            }
        }
    }
}

/// Builds the network state by applying Gaussian channels to an EPR bank:
/// allocation `D` on the Bob partners, a chain of beam splitters per frequency,
/// then loss, excess noise and phase per user.
#[allow(clippy::needless_range_loop)]
pub fn build_network_covariance_sequential(net: &Network, capability: Capability) -> Result<NetworkViews> {
    let n_w = net.n_w();
    let n_b = net.n_b();
    let n = net.n_users();
    let rsum: f64 = net.config().branch_ratios.iter().sum();
    let has_dump = 1.0 - rsum > 1e-12;
    let total = n_w + n + if has_dump { n_w } else { 0 };
    let slot = |k: usize, h: usize| n_w + k * n_b + h;
    let dump = |k: usize| n_w + n + k;

    let mut cov = DMatrix::identity(2 * total, 2 * total);
    for u in 0..n_w {
        let v = net.modulation_variance(u + 1) + 1.0;
        let c = (v * v - 1.0).sqrt();
        let b = slot(u, 0);
        for q in 0..2 {
            let sign = if q == 0 { 1.0 } else { -1.0 };
            cov[(2 * u + q, 2 * u + q)] = v;
            cov[(2 * b + q, 2 * b + q)] = v;
            cov[(2 * u + q, 2 * b + q)] = sign * c;
            cov[(2 * b + q, 2 * u + q)] = sign * c;
        }
    }
    let mut state = GaussianState::from_parts_unchecked(DVector::zeros(2 * total), cov);
    let pair_modes: Vec<usize> = (0..n_w).chain((0..n_w).map(|k| slot(k, 0))).collect();
    let pairs = ModeSelection::new(pair_modes, total)?;
    let initial = state.partial_trace(&pairs)?;

    let carriers: Vec<usize> = (0..n_w).map(|k| slot(k, 0)).collect();
    state = apply_passive(&state, &carriers, net.allocation())?;
    let post_allocation = state.partial_trace(&pairs)?;

    let ratios = &net.config().branch_ratios;
    for k in 0..n_w {
        let mut remaining = 1.0;
        for h in 0..n_b {
            let next = if h + 1 < n_b {
                Some(slot(k, h + 1))
            } else if has_dump {
                Some(dump(k))
            } else {
                None
            };
            if let Some(next) = next {
                let t = (ratios[h] / remaining).min(1.0);
                state = apply_beamsplitter(&state, next, slot(k, h), t)?;
                remaining -= ratios[h];
            }
        }
    }
    let network_modes = ModeSelection::new((0..n_w + n).collect(), total)?;
    let post_splitting = state.partial_trace(&network_modes)?;

    let mut state = post_splitting.clone();
    for i in net.users() {
        let m = bob_mode(net, i);
        let q = receiver_power_factor(net, i, capability);
        state = apply_loss_excess(&state, m, net.transmittance(i), net.epsilon(i), q)?;
        let theta = net.theta(i);
        if theta != 0.0 {
            state = apply_phase_rotation(&state, m, theta)?;
        }
    }
    Ok(NetworkViews { initial, post_allocation, post_splitting, final_state: state })
}
