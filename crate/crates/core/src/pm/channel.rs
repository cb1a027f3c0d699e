use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::source::circular_gaussian;
use super::Amplitude;
use crate::error::{Error, Result};
use crate::network::{receiver_power_factor, Capability, Network, UserIndex};

/// Which allocation components reach a receiver mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overlap {
    /// Every frequency component leaks in through the allocation matrix.
    #[default]
    Compressed,
    /// Only the user's own frequency component is received.
    TargetOnly,
}

/// Received field `γ₅ = e^{−jθ} √(T_d r_h) Σ_u D_ku γ₄,u + n` of one user.
///
/// `n` has power `T_d Q ε` so the received second moments include the excess noise; the loss
/// vacuum has zero P-amplitude.
pub fn channel_transform<R: Rng + ?Sized>(
    outputs: &[Vec<Amplitude>],
    net: &Network,
    user: UserIndex,
    capability: Capability,
    overlap: Overlap,
    rng: &mut R,
) -> Result<Vec<Amplitude>> {
    if outputs.len() != net.n_w() {
        return Err(Error::Input(alloc::format!("expected {} output streams, got {}", net.n_w(), outputs.len())));
    }
    let n = outputs[0].len();
    if outputs.iter().any(|o| o.len() != n) {
        return Err(Error::Input("output streams have different lengths".into()));
    }
    let k = user.k() - 1;
    let t_d = net.transmittance(user);
    let gain = (t_d * net.branch_ratio(user)).sqrt();
    let theta = net.theta(user);
    let phase = Amplitude::new(theta.cos(), -theta.sin()) * gain;
    let coeffs: Vec<(usize, Amplitude)> = (0..net.n_w())
        .filter(|&u| overlap == Overlap::Compressed || u == k)
        .map(|u| (u, phase * net.allocation()[(k, u)]))
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .collect();
    let noise_power = t_d * receiver_power_factor(net, user, capability) * net.epsilon(user);
    let noise = circular_gaussian(noise_power, n, rng);
    Ok(noise
        .into_iter()
        .enumerate()
        .map(|(j, mut z)| {
            for &(u, c) in &coeffs {
                z += c * outputs[u][j];
            }
            z
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkConfig;
    use crate::pm::{sample_thermal_ensemble, substream, Stage};

    fn net(n_w: usize, iso: f64, km: f64, eps: f64, theta: f64) -> Network {
        let mut c = NetworkConfig::uniform(n_w, 1, 4.47, iso, km, 0.17, eps, 0.56, 0.31);
        c.theta_p = alloc::vec![theta; n_w];
        c.validate().unwrap()
    }

    #[test]
    fn ideal_channel_is_identity() {
        let net = net(1, f64::INFINITY, 0.0, 0.0, 0.0);
        let src = sample_thermal_ensemble(2.0, 100, &mut substream(1, Stage::Output, 0)).unwrap();
        let out = channel_transform(
            core::slice::from_ref(&src),
            &net,
            net.user(1).unwrap(),
            Capability::Local,
            Overlap::Compressed,
            &mut substream(1, Stage::Channel, 0),
        )
        .unwrap();
        assert_eq!(out, src);
    }

    #[test]
    fn pi_rotation_negates() {
        let net = net(1, f64::INFINITY, 0.0, 0.0, core::f64::consts::PI);
        let src = sample_thermal_ensemble(2.0, 100, &mut substream(2, Stage::Output, 0)).unwrap();
        let out = channel_transform(
            core::slice::from_ref(&src),
            &net,
            net.user(1).unwrap(),
            Capability::Local,
            Overlap::Compressed,
            &mut substream(2, Stage::Channel, 0),
        )
        .unwrap();
        for (a, b) in out.iter().zip(&src) {
            assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn isolation_sets_cross_component_power() {
        let net = net(2, 30.0, 0.0, 0.0, 0.0);
        let n = 200_000;
        let zero = alloc::vec![Amplitude::new(0.0, 0.0); n];
        let src = sample_thermal_ensemble(1.0, n, &mut substream(3, Stage::Output, 0)).unwrap();
        let user = net.user(2).unwrap();
        let own = channel_transform(
            &[zero.clone(), src.clone()],
            &net,
            user,
            Capability::Local,
            Overlap::Compressed,
            &mut substream(3, Stage::Channel, 0),
        )
        .unwrap();
        let leak = channel_transform(
            &[src, zero],
            &net,
            user,
            Capability::Local,
            Overlap::Compressed,
            &mut substream(3, Stage::Channel, 0),
        )
        .unwrap();
        let p = |v: &[Amplitude]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let ratio = p(&leak) / p(&own);
        assert!((ratio / 1e-3 - 1.0).abs() < 0.02, "{ratio}");
    }
}
