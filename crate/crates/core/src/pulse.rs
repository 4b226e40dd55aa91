//! Rectangular RF pulses and their two-level propagators.
//!
//! A pulse drives every spin with the same carrier `w`, phase `φ` and Rabi
//! frequency `Ω` for a duration `τ`. In the interaction picture it couples
//! the basis pair `|..0_k..⟩, |..1_k..⟩` with matrix element
//! `-(Ω/2)·exp(i(Δt + φ))`, where `Δ` is the carrier minus the pair's
//! transition frequency. Restricted to one pair the evolution has the closed
//! form returned by [`detuned_block`]; rows and columns are ordered
//! `(α_k = 0, α_k = 1)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numfmt::sig10;
use crate::spin::{BasisState, SpinSystem, TransitionLabel};

/// A 2×2 complex matrix in row-major order.
pub type Unitary2 = [[Complex64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ideal resonant rotation `R(φ, θ)`:
/// `[[cos θ/2, i e^{iφ} sin θ/2], [i e^{-iφ} sin θ/2, cos θ/2]]`.
pub fn resonant_rotation(phase: f64, angle: f64) -> Unitary2 {
    let (s, c) = (0.5 * angle).sin_cos();
    let c = Complex64::new(c, 0.0);
    [[c, I * Complex64::from_polar(s, phase)], [I * Complex64::from_polar(s, -phase), c]]
}

/// Exact propagator of a rectangular pulse on one two-level pair with
/// detuning `Δ = carrier - transition frequency`:
/// `diag(e^{iΔτ/2}, e^{-iΔτ/2})` times the generalised Rabi matrix with
/// `Ω_e = sqrt(Ω² + Δ²)`. Reduces to [`resonant_rotation`]`(φ, Ωτ)` at `Δ = 0`.
pub fn detuned_block(phase: f64, rabi: f64, detuning: f64, duration: f64) -> Unitary2 {
    let omega_e = rabi.hypot(detuning);
    let half = 0.5 * omega_e * duration;
    let (s, c) = half.sin_cos();
    // sin(Ω_e τ/2) / Ω_e, continuous through Ω_e -> 0.
    let s_over = if half.abs() < 1e-8 { 0.5 * duration * (1.0 - half * half / 6.0) } else { s / omega_e };
    let diag = Complex64::new(c, -detuning * s_over);
    let off = I * rabi * s_over;
    let m = [[diag, off * Complex64::from_polar(1.0, phase)], [off * Complex64::from_polar(1.0, -phase), diag.conj()]];
    let p = Complex64::from_polar(1.0, 0.5 * detuning * duration);
    [[p * m[0][0], p * m[0][1]], [p.conj() * m[1][0], p.conj() * m[1][1]]]
}

/// Rabi frequency for which a transition detuned by `detuning` performs
/// exactly `k` full generalised Rabi cycles during a pulse of nominal angle
/// `angle`, i.e. `sqrt(Ω² + Δ²)·angle/Ω = 2πk`. That transition then ends the
/// pulse with zero transfer amplitude.
pub fn rabi_for_2pik(detuning: f64, k: u32, angle: f64) -> Result<f64> {
    if !(detuning > 0.0 && detuning.is_finite()) {
        return Err(domain(format!("detuning {detuning} must be positive")));
    }
    if !(angle > 0.0) {
        return Err(domain(format!("rotation angle {angle} must be positive")));
    }
    let ratio = 2.0 * PI * k as f64 / angle;
    if ratio <= 1.0 {
        return Err(domain(format!("2πk = {} does not exceed the angle {angle}", 2.0 * PI * k as f64)));
    }
    Ok(detuning / (ratio * ratio - 1.0).sqrt())
}

/// `τ = θ / Ω`.
pub fn pulse_duration(angle: f64, rabi: f64) -> f64 {
    angle / rabi
}

/// Duration of a π/2 pulse, `t_ph = π / (2Ω)`: the time unit of every trace.
pub fn half_pi_time(rabi: f64) -> f64 {
    FRAC_PI_2 / rabi
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    /// Transition the carrier is tuned to.
    pub target: TransitionLabel,
    pub phase: f64,
    /// Nominal rotation angle `θ = Ω_o τ`.
    pub angle: f64,
    /// Rabi frequency during the pulse (nominal unless noise was applied).
    pub rabi: f64,
    pub carrier: f64,
    pub duration: f64,
}

impl Pulse {
    /// A pulse resonant with `target` in the (nominal) `system`.
    pub fn resonant(system: &SpinSystem, target: TransitionLabel, phase: f64, angle: f64, rabi: f64) -> Result<Self> {
        if !(rabi > 0.0) {
            return Err(domain(format!("Rabi frequency {rabi} must be positive")));
        }
        if !(angle > 0.0) {
            return Err(domain(format!("rotation angle {angle} must be positive")));
        }
        let carrier = system.transition_frequency(target)?;
        if carrier <= 0.0 {
            return Err(domain(format!("carrier {carrier} of {target} must be positive")));
        }
        Ok(Self { target, phase, angle, rabi, carrier, duration: pulse_duration(angle, rabi) })
    }

    /// Rotation angle actually performed on resonance, `Ω τ`.
    pub fn effective_angle(&self) -> f64 {
        self.rabi * self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateLabel {
    Hadamard(usize),
    Oracle(usize),
    ConditionalReflection,
    Other,
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateLabel::Hadamard(k) => write!(f, "hadamard({k})"),
            GateLabel::Oracle(t) => write!(f, "oracle({t})"),
            GateLabel::ConditionalReflection => f.write_str("conditional_reflection"),
            GateLabel::Other => f.write_str("other"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub range: Range<usize>,
    pub label: GateLabel,
}

/// An ordered pulse sequence annotated with the gate each pulse belongs to.
/// Markers are contiguous and cover every pulse exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    rabi: f64,
    pulses: Vec<Pulse>,
    markers: Vec<Marker>,
}

impl PulseProgram {
    /// An empty program whose time unit is the π/2 duration at `rabi`.
    pub fn new(rabi: f64) -> Self {
        Self { rabi, pulses: Vec::new(), markers: Vec::new() }
    }

    /// Appends `pulses` as one gate. Empty gates are dropped.
    pub fn push_gate(&mut self, label: GateLabel, pulses: impl IntoIterator<Item = Pulse>) {
        let start = self.pulses.len();
        self.pulses.extend(pulses);
        if self.pulses.len() > start {
            self.markers.push(Marker { range: start..self.pulses.len(), label });
        }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Nominal Rabi frequency defining the time unit.
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn time_unit(&self) -> f64 {
        half_pi_time(self.rabi)
    }

    /// Total nominal duration in units of `t_ph`.
    pub fn total_time(&self) -> f64 {
        self.pulses.iter().map(|p| p.duration).sum::<f64>() / self.time_unit()
    }

    /// Gate label of each pulse, in order.
    pub fn pulse_labels(&self) -> Vec<GateLabel> {
        let mut labels = vec![GateLabel::Other; self.pulses.len()];
        for m in &self.markers {
            labels[m.range.clone()].fill(m.label);
        }
        labels
    }

    /// Line-oriented dump: one pulse per line
    /// (`index qubit mu nu phase angle rabi carrier duration gate`), followed
    /// by one `marker start end label` line per gate.
    pub fn to_table(&self) -> String {
        let labels = self.pulse_labels();
        let mut out = String::from("# index qubit mu nu phase angle rabi carrier duration gate\n");
        for (i, (p, label)) in self.pulses.iter().zip(&labels).enumerate() {
            out.push_str(&format!(
                "{i} {} {} {} {} {} {} {} {} {label}\n",
                p.target.qubit,
                p.target.mu,
                p.target.nu,
                sig10(p.phase),
                sig10(p.angle),
                sig10(p.rabi),
                sig10(p.carrier),
                sig10(p.duration),
            ));
        }
        out.push_str("# marker start end label\n");
        for m in &self.markers {
            out.push_str(&format!("marker {} {} {}\n", m.range.start, m.range.end, m.label));
        }
        out
    }
}

/// Applies `block_for(a)` to the pair `(a, a | 1<<qubit)` for every lower
/// index `a`; pairs mapped to `None` are left untouched.
pub(crate) fn apply_to_pairs(
    amps: &mut [Complex64],
    qubit: usize,
    mut block_for: impl FnMut(usize) -> Option<Unitary2>,
) {
    let bit = 1 << qubit;
    for a in 0..amps.len() {
        if a & bit != 0 {
            continue;
        }
        if let Some(u) = block_for(a) {
            let b = a | bit;
            let (x, y) = (amps[a], amps[b]);
            amps[a] = u[0][0] * x + u[0][1] * y;
            amps[b] = u[1][0] * x + u[1][1] * y;
        }
    }
}

/// Lower members (bit `qubit` clear) of every basis pair whose context is `label`.
pub fn pair_members(system: &SpinSystem, label: TransitionLabel) -> Vec<BasisState> {
    (0..system.dimension())
        .filter(|a| a & (1 << label.qubit) == 0 && system.context_unchecked(*a, label.qubit) == label)
        .map(BasisState)
        .collect()
}
