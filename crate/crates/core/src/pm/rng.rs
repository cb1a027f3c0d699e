use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Pipeline stage that owns an RNG substream and labels a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// Thermal source γ₁ (γ₀ before any tap).
    Source,
    /// Monitor branch γ₂.
    Monitor,
    /// Output branch γ₄.
    Output,
    /// Received field γ₅.
    Channel,
    /// Sender-side detected monitor D_A.
    DetectedAlice,
    /// Receiver-side detected signal D_B.
    DetectedBob,
    /// Beacon beat noise.
    Beacon,
    /// Laser phase random walk.
    PhaseNoise,
}

impl Stage {
    fn tag(self) -> u64 {
        match self {
            Stage::Source => 1,
            Stage::Monitor => 2,
            Stage::Output => 3,
            Stage::Channel => 4,
            Stage::DetectedAlice => 5,
            Stage::DetectedBob => 6,
            Stage::Beacon => 7,
            Stage::PhaseNoise => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Source => "source",
            Stage::Monitor => "monitor",
            Stage::Output => "output",
            Stage::Channel => "channel",
            Stage::DetectedAlice => "detected-alice",
            Stage::DetectedBob => "detected-bob",
            Stage::Beacon => "beacon",
            Stage::PhaseNoise => "phase-noise",
        }
    }
}

/// Independent generator for `(stage, index)` derived from the master seed.
pub fn substream(seed: u64, stage: Stage, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((stage.tag() << 32) | index as u64);
    rng
}
