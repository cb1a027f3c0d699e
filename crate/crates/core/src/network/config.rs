use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::allocation::{build_frequency_allocation, orthogonality_error};
use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;

/// How the frequency-allocation matrix is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Allocation {
    /// Banded leakage model with the given adjacent-mode isolation; `f64::INFINITY` gives `I`.
    Isolation { db: f64 },
    /// Explicit row-major `N_W x N_W` matrix.
    Matrix(Vec<Vec<f64>>),
}

/// Per-user residual channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChannelSpec {
    Distance { km: Vec<f64>, alpha_db_per_km: f64 },
    Transmittance(Vec<f64>),
}

/// Raw network description. Per-mode arrays have length `n_w`, per-branch arrays `n_b`,
/// per-user arrays `n_w * n_b`, with users ordered `i' = (k - 1) n_b + h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n_w: usize,
    pub n_b: usize,
    /// Equivalent modulation variance per frequency mode, SNU.
    pub v_a: Vec<f64>,
    pub allocation: Allocation,
    pub branch_ratios: Vec<f64>,
    pub channel: ChannelSpec,
    /// Alice-referred excess noise per user, SNU.
    pub epsilon: Vec<f64>,
    /// Residual phase rotation per user, radians.
    pub theta_p: Vec<f64>,
    pub eta_e: f64,
    /// Electronic noise, SNU.
    pub v_el: f64,
    /// Symbol rate per frequency mode, Hz.
    pub f_r: f64,
    pub beta: Vec<f64>,
    pub fer: Vec<f64>,
    /// Fraction of symbols kept for key after sifting and parameter-estimation disclosure.
    pub frame_utilization: f64,
}

impl NetworkConfig {
    /// Network with identical parameters on every mode, branch and user.
    #[allow(clippy::too_many_arguments)]
    pub fn uniform(
        n_w: usize,
        n_b: usize,
        v_a: f64,
        isolation_db: f64,
        distance_km: f64,
        alpha_db_per_km: f64,
        epsilon: f64,
        eta_e: f64,
        v_el: f64,
    ) -> Self {
        let n = n_w * n_b;
        Self {
            n_w,
            n_b,
            v_a: vec![v_a; n_w],
            allocation: Allocation::Isolation { db: isolation_db },
            branch_ratios: vec![1.0 / n_b.max(1) as f64; n_b],
            channel: ChannelSpec::Distance { km: vec![distance_km; n], alpha_db_per_km },
            epsilon: vec![epsilon; n],
            theta_p: vec![0.0; n],
            eta_e,
            v_el,
            f_r: 20e9,
            beta: vec![1.0; n],
            fer: vec![0.0; n],
            frame_utilization: 0.5,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_w * self.n_b
    }

    /// Checks every invariant and returns the validated network, or all violations at once.
    pub fn validate(&self) -> Result<Network> {
        let mut errs: Vec<String> = Vec::new();
        let n = self.n_users();
        if self.n_w == 0 {
            errs.push("n_w must be at least 1".into());
        }
        if self.n_b == 0 {
            errs.push("n_b must be at least 1".into());
        }
        let mut len = |name: &str, got: usize, want: usize| {
            if got != want {
                errs.push(format!("{name} has length {got}, expected {want}"));
            }
        };
        len("v_a", self.v_a.len(), self.n_w);
        len("branch_ratios", self.branch_ratios.len(), self.n_b);
        len("epsilon", self.epsilon.len(), n);
        len("theta_p", self.theta_p.len(), n);
        len("beta", self.beta.len(), n);
        len("fer", self.fer.len(), n);
        match &self.channel {
            ChannelSpec::Distance { km, .. } => len("distance_km", km.len(), n),
            ChannelSpec::Transmittance(t) => len("transmittance", t.len(), n),
        }
        for (i, &v) in self.v_a.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("v_a[{i}] = {v} must be finite and non-negative"));
            }
        }
        for (h, &r) in self.branch_ratios.iter().enumerate() {
            if !(r > 0.0 && r <= 1.0) {
                errs.push(format!("branch_ratios[{h}] = {r} outside (0, 1]"));
            }
        }
        let rsum: f64 = self.branch_ratios.iter().sum();
        if rsum > 1.0 + 1e-9 {
            errs.push(format!("branch ratios sum to {rsum}, above 1"));
        }
        for (i, &e) in self.epsilon.iter().enumerate() {
            if !(e >= 0.0 && e.is_finite()) {
                errs.push(format!("epsilon[{i}] = {e} must be finite and non-negative"));
            }
        }
        for (i, &t) in self.theta_p.iter().enumerate() {
            if !t.is_finite() {
                errs.push(format!("theta_p[{i}] is not finite"));
            }
        }
        for (i, &b) in self.beta.iter().enumerate() {
            if !(0.0..=1.0).contains(&b) {
                errs.push(format!("beta[{i}] = {b} outside [0, 1]"));
            }
        }
        for (i, &f) in self.fer.iter().enumerate() {
            if !(0.0..1.0).contains(&f) {
                errs.push(format!("fer[{i}] = {f} outside [0, 1)"));
            }
        }
        if !(self.eta_e > 0.0 && self.eta_e <= 1.0) {
            errs.push(format!("eta_e = {} outside (0, 1]", self.eta_e));
        }
        if !(self.v_el >= 0.0 && self.v_el.is_finite()) {
            errs.push(format!("v_el = {} must be finite and non-negative", self.v_el));
        }
        if !(self.f_r > 0.0 && self.f_r.is_finite()) {
            errs.push(format!("f_r = {} must be positive", self.f_r));
        }
        if !(self.frame_utilization > 0.0 && self.frame_utilization <= 1.0) {
            errs.push(format!("frame_utilization = {} outside (0, 1]", self.frame_utilization));
        }
        let t_d: Vec<f64> = match &self.channel {
            ChannelSpec::Distance { km, alpha_db_per_km } => {
                if !(*alpha_db_per_km >= 0.0 && alpha_db_per_km.is_finite()) {
                    errs.push(format!("alpha_db_per_km = {alpha_db_per_km} must be non-negative"));
                }
                for (i, &l) in km.iter().enumerate() {
                    if !(l >= 0.0 && l.is_finite()) {
                        errs.push(format!("distance_km[{i}] = {l} must be finite and non-negative"));
                    }
                }
                km.iter().map(|&l| 10f64.powf(-alpha_db_per_km * l / 10.0)).collect()
            }
            ChannelSpec::Transmittance(t) => t.clone(),
        };
        for (i, &t) in t_d.iter().enumerate() {
            if !(t > 0.0 && t <= 1.0) {
                errs.push(format!("transmittance of user {} = {t} outside (0, 1]", i + 1));
            }
        }
        let d = match &self.allocation {
            Allocation::Isolation { db } => {
                if !(*db > 0.0) {
                    errs.push(format!("isolation_db = {db} must be positive"));
                    None
                } else if self.n_w > 0 {
                    build_frequency_allocation(self.n_w, *db).ok()
                } else {
                    None
                }
            }
            Allocation::Matrix(rows) => {
                if rows.len() != self.n_w || rows.iter().any(|r| r.len() != self.n_w) {
                    errs.push(format!("allocation matrix must be {0}x{0}", self.n_w));
                    None
                } else {
                    let m = DMatrix::from_fn(self.n_w, self.n_w, |i, j| rows[i][j]);
                    let e = orthogonality_error(&m);
                    if !(e < NumericPolicy::default().orthogonality) {
                        errs.push(format!("allocation matrix not orthogonal: |D D^T - I| = {e:e}"));
                        None
                    } else {
                        Some(m)
                    }
                }
            }
        };
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(Network { config: self.clone(), d: d.expect("allocation checked above"), t_d })
    }
}

/// 1-based user index with its frequency group `k` and branch `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UserIndex {
    i_prime: usize,
    k: usize,
    h: usize,
}

impl UserIndex {
    pub fn new(i_prime: usize, n_b: usize, n_users: usize) -> Result<Self> {
        if i_prime == 0 || i_prime > n_users || n_b == 0 {
            return Err(Error::Input(format!("user {i_prime} outside 1..={n_users}")));
        }
        Ok(Self { i_prime, k: (i_prime - 1) / n_b + 1, h: (i_prime - 1) % n_b + 1 })
    }

    pub fn from_group(k: usize, h: usize, n_b: usize) -> Self {
        Self { i_prime: (k - 1) * n_b + h, k, h }
    }

    pub fn i_prime(&self) -> usize {
        self.i_prime
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// 0-based position in per-user arrays.
    pub fn slot(&self) -> usize {
        self.i_prime - 1
    }
}

/// A validated network with its allocation matrix and per-user transmittances resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    d: DMatrix<f64>,
    t_d: Vec<f64>,
}

impl Network {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn n_w(&self) -> usize {
        self.config.n_w
    }

    pub fn n_b(&self) -> usize {
        self.config.n_b
    }

    pub fn n_users(&self) -> usize {
        self.config.n_users()
    }

    pub fn allocation(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn user(&self, i_prime: usize) -> Result<UserIndex> {
        UserIndex::new(i_prime, self.n_b(), self.n_users())
    }

    pub fn users(&self) -> impl Iterator<Item = UserIndex> + '_ {
        (1..=self.n_users()).map(move |i| UserIndex::new(i, self.n_b(), self.n_users()).expect("in range"))
    }

    pub fn transmittance(&self, user: UserIndex) -> f64 {
        self.t_d[user.slot()]
    }

    pub fn transmittances(&self) -> &[f64] {
        &self.t_d
    }

    pub fn branch_ratio(&self, user: UserIndex) -> f64 {
        self.config.branch_ratios[user.h() - 1]
    }

    pub fn modulation_variance(&self, k: usize) -> f64 {
        self.config.v_a[k - 1]
    }

    pub fn epsilon(&self, user: UserIndex) -> f64 {
        self.config.epsilon[user.slot()]
    }

    pub fn theta(&self, user: UserIndex) -> f64 {
        self.config.theta_p[user.slot()]
    }

    pub fn beta(&self, user: UserIndex) -> f64 {
        self.config.beta[user.slot()]
    }

    pub fn eta_e(&self) -> f64 {
        self.config.eta_e
    }

    pub fn v_el(&self) -> f64 {
        self.config.v_el
    }

    pub fn f_r(&self) -> f64 {
        self.config.f_r
    }

    /// Post-processing prefactor `(1 - FER) u`.
    pub fn f_s(&self, user: UserIndex) -> f64 {
        (1.0 - self.config.fer[user.slot()]) * self.config.frame_utilization
    }

    /// Same network with per-user transmittance and excess noise replaced.
    pub fn with_user_channels(&self, t_d: Vec<f64>, epsilon: Vec<f64>) -> Result<Network> {
        if t_d.len() != self.n_users() || epsilon.len() != self.n_users() {
            return Err(Error::Input("per-user channel arrays have the wrong length".into()));
        }
        if let Some(t) = t_d.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::Domain(format!("transmittance {t} outside (0, 1]")));
        }
        if let Some(e) = epsilon.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(Error::Domain(format!("excess noise {e} must be non-negative")));
        }
        let mut config = self.config.clone();
        config.channel = ChannelSpec::Transmittance(t_d.clone());
        config.epsilon = epsilon;
        Ok(Network { config, d: self.d.clone(), t_d })
    }
}
