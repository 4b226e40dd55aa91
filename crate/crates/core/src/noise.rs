//! Gaussian detuning of the Larmor frequencies or of the Rabi frequency.
//!
//! Every draw is addressed by `(seed, repetition, pulse index, spin)`: the
//! seed keys a ChaCha8 generator, the repetition selects its stream and the
//! pulse/spin position selects a fixed word offset inside that stream. A draw
//! therefore never depends on which thread produced it or on what else was
//! sampled before.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pulse::Pulse;
use crate::spin::SpinSystem;

/// 32-bit words reserved per draw; the ziggurat sampler needs far fewer.
const WORDS_PER_DRAW: u128 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChannel {
    Larmor,
    Rabi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// One detuning per repetition, held for the whole program.
    Static,
    /// A fresh detuning for every pulse.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub channel: NoiseChannel,
    pub mode: NoiseMode,
    /// `ε_L` or `ε_R`, in frequency units.
    pub amplitude: f64,
    pub seed: u64,
    /// Larmor channel only: draw an independent `ξ_k` per spin instead of one
    /// shared field fluctuation.
    #[serde(default)]
    pub per_spin: bool,
}

impl NoiseSpec {
    pub fn new(channel: NoiseChannel, mode: NoiseMode, amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(domain(format!("noise amplitude {amplitude} must be finite and non-negative")));
        }
        Ok(Self { channel, mode, amplitude, seed, per_spin: false })
    }

    /// Same spec at another amplitude (sweep points).
    pub fn with_amplitude(self, amplitude: f64) -> Result<Self> {
        let fresh = Self::new(self.channel, self.mode, amplitude, self.seed)?;
        Ok(Self { per_spin: self.per_spin, ..fresh })
    }
}

/// Standard-normal draws for one repetition: `ξ` per pulse (random mode) or a
/// single shared `ξ` (static mode), each possibly widened to one value per spin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRealization {
    pub channel: NoiseChannel,
    pub mode: NoiseMode,
    pub amplitude: f64,
    /// Row-major `[slot][spin]` with `width` columns.
    pub xi: Vec<f64>,
    pub width: usize,
}

impl NoiseRealization {
    /// Number of independent slots: 1 for static noise, else one per pulse.
    pub fn slots(&self) -> usize {
        self.xi.len() / self.width
    }

    /// Draws seen by pulse `pulse_index`.
    pub fn xi_for(&self, pulse_index: usize) -> Result<&[f64]> {
        let slot = match self.mode {
            NoiseMode::Static => 0,
            NoiseMode::Random => pulse_index,
        };
        if slot >= self.slots() {
            return Err(domain(format!("pulse {pulse_index} has no noise sample ({} drawn)", self.slots())));
        }
        Ok(&self.xi[slot * self.width..(slot + 1) * self.width])
    }
}

/// The standard-normal draw at `(seed, repetition, slot)`.
pub fn standard_normal(seed: u64, repetition: u64, slot: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repetition);
    rng.set_word_pos(slot as u128 * WORDS_PER_DRAW);
    StandardNormal.sample(&mut rng)
}

/// Samples the detunings of repetition `repetition`. `n_spins` only matters
/// for per-spin Larmor noise.
pub fn sample_realization(spec: &NoiseSpec, repetition: u64, n_pulses: usize, n_spins: usize) -> NoiseRealization {
    let slots = match spec.mode {
        NoiseMode::Static => 1,
        NoiseMode::Random => n_pulses.max(1),
    };
    let width = if spec.per_spin && spec.channel == NoiseChannel::Larmor { n_spins.max(1) } else { 1 };
    let xi = (0..slots * width).map(|i| standard_normal(spec.seed, repetition, i as u64)).collect();
    NoiseRealization { channel: spec.channel, mode: spec.mode, amplitude: spec.amplitude, xi, width }
}

/// The register seen by pulse `pulse_index`: every `w_k` shifted by `ε_L ξ`.
/// Couplings are untouched, so only the distance between carrier and
/// transitions changes.
pub fn apply_larmor_noise(
    system: &SpinSystem,
    realization: &NoiseRealization,
    pulse_index: usize,
) -> Result<SpinSystem> {
    if realization.channel != NoiseChannel::Larmor {
        return Err(domain("Larmor noise applied with a Rabi-channel realization"));
    }
    let xi = realization.xi_for(pulse_index)?;
    if xi.len() != 1 && xi.len() != system.n_spins() {
        return Err(domain(format!("{} per-spin draws for {} spins", xi.len(), system.n_spins())));
    }
    let shifts: Vec<f64> = xi.iter().map(|x| realization.amplitude * x).collect();
    Ok(system.with_larmor_shifts(&shifts))
}

/// The pulse with Rabi frequency `Ω_o + ε_R ξ` and unchanged duration, so its
/// rotation angle becomes `θ + ε_R ξ τ`.
pub fn apply_rabi_noise(pulse: &Pulse, realization: &NoiseRealization, pulse_index: usize) -> Result<Pulse> {
    if realization.channel != NoiseChannel::Rabi {
        return Err(domain("Rabi noise applied with a Larmor-channel realization"));
    }
    let rabi = pulse.rabi + realization.amplitude * realization.xi_for(pulse_index)?[0];
    if rabi <= 0.0 {
        return Err(Error::RejectedSample { rabi });
    }
    Ok(Pulse { rabi, ..*pulse })
}

/// Applies whichever channel `realization` carries to pulse `pulse_index`.
pub(crate) fn perturb(
    system: &SpinSystem,
    pulse: &Pulse,
    realization: Option<&NoiseRealization>,
    pulse_index: usize,
) -> Result<(Option<SpinSystem>, Pulse)> {
    match realization {
        None => Ok((None, *pulse)),
        Some(r) if r.amplitude == 0.0 => Ok((None, *pulse)),
        Some(r) => match r.channel {
            NoiseChannel::Larmor => Ok((Some(apply_larmor_noise(system, r, pulse_index)?), *pulse)),
            NoiseChannel::Rabi => Ok((None, apply_rabi_noise(pulse, r, pulse_index)?)),
        },
    }
}
