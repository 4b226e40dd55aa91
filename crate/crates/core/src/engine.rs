//! Propagators applying one pulse to a register state, in the interaction
//! picture of `H_0`.
//!
//! * [`evolve_exact`] integrates the full `2^n`-dimensional equation with
//!   fixed-step fourth-order Runge–Kutta, keeping every transition of every
//!   spin, including those detuned by Larmor-scale gaps.
//! * [`evolve_near_resonant`] keeps only the spin addressed by the carrier and
//!   applies the closed-form two-level propagator to each of its pairs.
//! * [`evolve_resonant_only`] is the ideal gate: only the targeted context
//!   rotates, exactly on resonance.
//!
//! All engines use a pulse-local time origin: the oscillating phase
//! `Δt + φ` of each pulse starts from `t = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::noise::{perturb, NoiseMode, NoiseRealization};
use crate::pulse::{apply_to_pairs, detuned_block, resonant_rotation, Marker, Pulse, PulseProgram, Unitary2};
use crate::spin::{SpinSystem, TransitionLabel};
use crate::state::QuantumState;

/// Largest accepted `|‖ψ‖² - 1|` of an input state.
pub const NORM_TOLERANCE: f64 = 1e-3;
/// Largest norm change tolerated across a single integrated pulse.
pub const MAX_PULSE_DRIFT: f64 = 1e-4;
/// Re-evaluate the rotating phasors exactly after this many RK4 steps.
const RESYNC_STEPS: usize = 1024;
/// RK4 steps per quarter period of the fastest Larmor precession.
pub const DEFAULT_SUBSTEPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EngineKind {
    Exact {
        #[serde(default = "default_substeps")]
        substeps: u32,
    },
    NearResonant {
        cutoff: f64,
    },
    ResonantOnly,
}

fn default_substeps() -> u32 {
    DEFAULT_SUBSTEPS
}

impl EngineKind {
    /// RK4 engine at the default step.
    pub fn exact() -> Self {
        EngineKind::Exact { substeps: DEFAULT_SUBSTEPS }
    }

    /// Near-resonant engine with cutoff at half the smallest Larmor gap: every
    /// context of the addressed spin is kept, every other spin is dropped.
    pub fn near_resonant_for(system: &SpinSystem) -> Self {
        EngineKind::NearResonant { cutoff: default_cutoff(system) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Exact { .. } => "exact",
            EngineKind::NearResonant { .. } => "near_resonant",
            EngineKind::ResonantOnly => "resonant_only",
        }
    }
}

pub fn default_cutoff(system: &SpinSystem) -> f64 {
    let gap = system.min_larmor_gap();
    if gap.is_finite() {
        0.5 * gap
    } else {
        system.max_larmor()
    }
}

/// RK4 step: a quarter period of the fastest Larmor precession,
/// `π / (2 max w_k)`, split into `substeps` equal steps.
pub fn rk4_step_size(system: &SpinSystem, substeps: u32) -> f64 {
    PI / (2.0 * system.max_larmor() * substeps.max(1) as f64)
}

fn check_state(system: &SpinSystem, state: &QuantumState) -> Result<f64> {
    if state.dimension() != system.dimension() {
        return Err(domain(format!(
            "state of dimension {} does not fit {} spins",
            state.dimension(),
            system.n_spins()
        )));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(domain(format!("input state is not normalised (norm² = {norm})")));
    }
    Ok(norm)
}

/// Row coefficients of one pulse: `dc_α/dt = Σ_k a_e e^{i δ_e t} c_{α ^ 1<<k}`
/// with entry `e = k 2^n + α`. For the pair `(lo, hi = lo | 1<<k)` with
/// detuning `Δ` and `g = i (Ω/2) e^{iφ}`, the lower row holds `(g, Δ)` and the
/// upper row `(-conj(g), -Δ)`.
struct Couplings {
    n_spins: usize,
    amplitude: Vec<Complex64>,
    rate: Vec<f64>,
}

fn couplings(system: &SpinSystem, pulse: &Pulse) -> Couplings {
    let n = system.n_spins();
    let g = Complex64::new(0.0, 0.5 * pulse.rabi) * Complex64::from_polar(1.0, pulse.phase);
    let mut amplitude = Vec::with_capacity(n << n);
    let mut rate = Vec::with_capacity(n << n);
    for k in 0..n {
        for alpha in 0..system.dimension() {
            let lo = alpha & !(1 << k);
            let detuning = pulse.carrier - system.frequency_unchecked(system.context_unchecked(lo, k));
            if alpha == lo {
                amplitude.push(g);
                rate.push(detuning);
            } else {
                amplitude.push(-g.conj());
                rate.push(-detuning);
            }
        }
    }
    Couplings { n_spins: n, amplitude, rate }
}

impl Couplings {
    fn rows_at(&self, t: f64) -> Vec<Complex64> {
        self.amplitude.iter().zip(&self.rate).map(|(a, d)| a * Complex64::from_polar(1.0, d * t)).collect()
    }
}

#[inline]
fn derivative(n: usize, w: &[Complex64], c: &[Complex64], out: &mut [Complex64]) {
    let dim = c.len();
    out.fill(Complex64::new(0.0, 0.0));
    for (k, wk) in w.chunks_exact(dim).take(n).enumerate() {
        let bit = 1 << k;
        for ((o, x), src) in out.chunks_exact_mut(2 * bit).zip(wk.chunks_exact(2 * bit)).zip(c.chunks_exact(2 * bit)) {
            let (o_lo, o_hi) = o.split_at_mut(bit);
            let (x_lo, x_hi) = x.split_at(bit);
            let (c_lo, c_hi) = src.split_at(bit);
            for j in 0..bit {
                o_lo[j] += x_lo[j] * c_hi[j];
                o_hi[j] += x_hi[j] * c_lo[j];
            }
        }
    }
}

struct Rk4 {
    n_spins: usize,
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    fn new(n_spins: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); 1 << n_spins];
        Self { n_spins, k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advances `c` by `h` given the row coefficients at the start, midpoint
    /// and end of the step.
    fn step(&mut self, w: [&[Complex64]; 3], h: f64, c: &mut [Complex64]) {
        let Rk4 { n_spins, k1, k2, k3, k4, tmp } = self;
        let n = *n_spins;
        let half = 0.5 * h;
        derivative(n, w[0], c, k1);
        for ((t, x), k) in tmp.iter_mut().zip(c.iter()).zip(k1.iter()) {
            *t = x + k * half;
        }
        derivative(n, w[1], tmp, k2);
        for ((t, x), k) in tmp.iter_mut().zip(c.iter()).zip(k2.iter()) {
            *t = x + k * half;
        }
        derivative(n, w[1], tmp, k3);
        for ((t, x), k) in tmp.iter_mut().zip(c.iter()).zip(k3.iter()) {
            *t = x + k * h;
        }
        derivative(n, w[2], tmp, k4);
        let sixth = h / 6.0;
        for i in 0..c.len() {
            c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
        }
    }
}

/// Integrates the full interaction-picture Schrödinger equation over one
/// pulse with RK4 at the default step (see [`rk4_step_size`]); the last step
/// is shortened so the pulse area is exact.
pub fn evolve_exact(system: &SpinSystem, pulse: &Pulse, state: &QuantumState) -> Result<QuantumState> {
    evolve_exact_with_step(system, pulse, state, rk4_step_size(system, DEFAULT_SUBSTEPS))
}

/// [`evolve_exact`] with an explicit step `h`.
pub fn evolve_exact_with_step(
    system: &SpinSystem,
    pulse: &Pulse,
    state: &QuantumState,
    h: f64,
) -> Result<QuantumState> {
    let norm_in = check_state(system, state)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("RK4 step {h} must be positive")));
    }
    let rows = couplings(system, pulse);
    let tau = pulse.duration;
    let mut full_steps = (tau / h).floor() as usize;
    let mut rest = tau - full_steps as f64 * h;
    if rest > h * (1.0 - 1e-9) {
        full_steps += 1;
        rest = 0.0;
    }

    let half_turn: Vec<Complex64> = rows.rate.iter().map(|d| Complex64::from_polar(1.0, 0.5 * d * h)).collect();
    let mut c = state.amplitudes().to_vec();
    let mut rk = Rk4::new(rows.n_spins);
    let mut w0 = rows.rows_at(0.0);
    let mut w1 = w0.clone();
    let mut w2 = w0.clone();
    for n in 0..full_steps {
        if n > 0 && n % RESYNC_STEPS == 0 {
            w0 = rows.rows_at(n as f64 * h);
        }
        for ((a, (m, e)), t) in w0.iter().zip(w1.iter_mut().zip(w2.iter_mut())).zip(&half_turn) {
            *m = a * t;
            *e = *m * t;
        }
        rk.step([&w0, &w1, &w2], h, &mut c);
        std::mem::swap(&mut w0, &mut w2);
    }
    if rest > 0.0 {
        let t0 = full_steps as f64 * h;
        let (a, b, e) = (rows.rows_at(t0), rows.rows_at(t0 + 0.5 * rest), rows.rows_at(tau));
        rk.step([&a, &b, &e], rest, &mut c);
    }

    let out = QuantumState::from_amplitudes(c)?;
    let drift = (out.norm_sqr() - norm_in).abs();
    if !(drift <= MAX_PULSE_DRIFT) {
        return Err(Error::Integration { drift });
    }
    Ok(out)
}

/// The spin addressed by `carrier`: the unique `k` with `|carrier - w_k| <= cutoff`.
fn addressed_qubit(system: &SpinSystem, carrier: f64, cutoff: f64) -> Result<Option<usize>> {
    let mut hits = (0..system.n_spins()).filter(|&k| (carrier - system.larmor()[k]).abs() <= cutoff);
    let first = hits.next();
    if let (Some(first), Some(second)) = (first, hits.next()) {
        return Err(Error::AmbiguousCarrier { carrier, cutoff, first, second });
    }
    Ok(first)
}

/// Two-level propagation of the addressed spin only. Each pair gets the
/// exact rectangular-pulse block for its own detuning; transitions detuned by
/// more than `cutoff` are neglected.
pub fn evolve_near_resonant(
    system: &SpinSystem,
    pulse: &Pulse,
    state: &QuantumState,
    cutoff: f64,
) -> Result<QuantumState> {
    check_state(system, state)?;
    if !(cutoff > 0.0 && cutoff < system.min_larmor_gap()) {
        return Err(domain(format!("cutoff {cutoff} must lie in (0, {}) for this register", system.min_larmor_gap())));
    }
    let mut out = state.clone();
    let Some(k) = addressed_qubit(system, pulse.carrier, cutoff)? else {
        return Ok(out);
    };
    let blocks: Vec<(TransitionLabel, Option<Unitary2>)> = system
        .valid_contexts(k)
        .into_iter()
        .map(|label| {
            let detuning = pulse.carrier - system.frequency_unchecked(label);
            let block =
                (detuning.abs() <= cutoff).then(|| detuned_block(pulse.phase, pulse.rabi, detuning, pulse.duration));
            (label, block)
        })
        .collect();
    apply_to_pairs(out.amplitudes_mut(), k, |lo| {
        let label = system.context_unchecked(lo, k);
        blocks.iter().find(|(l, _)| *l == label).and_then(|(_, b)| *b)
    });
    Ok(out)
}

/// Ideal gate: `R(φ, Ωτ)` on the pairs whose context equals the pulse target,
/// identity elsewhere.
pub fn evolve_resonant_only(system: &SpinSystem, pulse: &Pulse, state: &QuantumState) -> Result<QuantumState> {
    check_state(system, state)?;
    let target = pulse.target;
    if target.qubit >= system.n_spins() {
        return Err(domain(format!("pulse targets missing qubit {}", target.qubit)));
    }
    let rotation = resonant_rotation(pulse.phase, pulse.effective_angle());
    let mut out = state.clone();
    apply_to_pairs(out.amplitudes_mut(), target.qubit, |lo| {
        (system.context_unchecked(lo, target.qubit) == target).then_some(rotation)
    });
    Ok(out)
}

pub fn evolve(engine: &EngineKind, system: &SpinSystem, pulse: &Pulse, state: &QuantumState) -> Result<QuantumState> {
    match *engine {
        EngineKind::Exact { substeps } => {
            if substeps == 0 {
                return Err(domain("exact engine needs at least one RK4 step per quarter period"));
            }
            evolve_exact_with_step(system, pulse, state, rk4_step_size(system, substeps))
        }
        EngineKind::NearResonant { cutoff } => evolve_near_resonant(system, pulse, state, cutoff),
        EngineKind::ResonantOnly => evolve_resonant_only(system, pulse, state),
    }
}

/// States at every pulse boundary of a program run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `states[0]` is the initial state, `states[j + 1]` follows pulse `j`.
    pub states: Vec<QuantumState>,
    /// Cumulative nominal time in units of `t_ph`, aligned with `states`.
    pub times: Vec<f64>,
    pub markers: Vec<Marker>,
}

impl Trajectory {
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Runs `program` from `initial`, applying `noise` pulse by pulse (shifted
/// Larmor frequencies or perturbed Rabi frequency) and recording the state
/// after each pulse.
pub fn run_program(
    engine: &EngineKind,
    system: &SpinSystem,
    program: &PulseProgram,
    initial: &QuantumState,
    noise: Option<&NoiseRealization>,
) -> Result<Trajectory> {
    if let Some(r) = noise {
        if r.mode == NoiseMode::Random && !program.is_empty() && r.slots() < program.len() {
            return Err(domain(format!(
                "random noise realization has {} draws for {} pulses",
                r.slots(),
                program.len()
            )));
        }
    }
    check_state(system, initial)?;
    let unit = program.time_unit();
    let mut states = Vec::with_capacity(program.len() + 1);
    let mut times = Vec::with_capacity(program.len() + 1);
    states.push(initial.clone());
    times.push(0.0);
    let mut elapsed = 0.0;
    for (j, pulse) in program.pulses().iter().enumerate() {
        let (noisy_system, pulse) = perturb(system, pulse, noise, j)?;
        let sys = noisy_system.as_ref().unwrap_or(system);
        let next = evolve(engine, sys, &pulse, states.last().expect("non-empty"))?;
        elapsed += pulse.duration;
        states.push(next);
        times.push(elapsed / unit);
    }
    Ok(Trajectory { states, times, markers: program.markers().to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::fidelity::fidelity;
    use crate::pulse::{pair_members, Pulse};
    use crate::spin::BasisState;
    use std::f64::consts::{FRAC_PI_2, PI};

    const OMEGA: f64 = 0.1008;

    fn four_spin() -> SpinSystem {
        SpinSystem::standard(4).unwrap()
    }

    fn apply_blockwise(system: &SpinSystem, pulse: &Pulse, state: &QuantumState) -> QuantumState {
        // reference: every pair of the addressed qubit with its own exact block
        let k = pulse.target.qubit;
        let mut out = state.clone();
        apply_to_pairs(out.amplitudes_mut(), k, |lo| {
            let label = system.context_unchecked(lo, k);
            let d = pulse.carrier - system.frequency_unchecked(label);
            Some(detuned_block(pulse.phase, pulse.rabi, d, pulse.duration))
        });
        out
    }

    #[test]
    fn zero_amplitude_pulse_is_identity() {
        let s = four_spin();
        let mut p = Pulse::resonant(&s, TransitionLabel::new(0, 1, 1), 0.3, FRAC_PI_2, OMEGA).unwrap();
        p.rabi = 0.0;
        let psi = QuantumState::uniform(4);
        let out = evolve_exact(&s, &p, &psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn exact_single_pulse_matches_two_level_prediction() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(0, 1, 1), 0.0, FRAC_PI_2, OMEGA).unwrap();
        let psi = QuantumState::ground(4);
        let exact = evolve_exact(&s, &p, &psi).unwrap();
        let block = apply_blockwise(&s, &p, &psi);
        let f = fidelity(&exact, &block);
        assert!(f > 0.999, "fidelity {f}");
        assert!((exact.norm_sqr() - 1.0).abs() < 5e-9, "drift {}", exact.norm_sqr() - 1.0);
    }

    #[test]
    fn exact_rejects_unnormalised_input() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(0, 1, 1), 0.0, FRAC_PI_2, OMEGA).unwrap();
        let mut psi = QuantumState::ground(4);
        psi.amplitudes_mut()[0] = Complex64::new(1.1, 0.0);
        assert!(evolve_exact(&s, &p, &psi).is_err());
        assert!(evolve_exact(&s, &p, &QuantumState::ground(3)).is_err());
    }

    /// The shortened final step must land the integration exactly on τ.
    #[test]
    fn exact_pulse_area_is_exact() {
        let s = SpinSystem::new(vec![100.0], 10.0, 0.4).unwrap();
        let p = Pulse::resonant(&s, TransitionLabel::new(0, 0, 0), 0.0, PI, 0.37).unwrap();
        let out = evolve_exact(&s, &p, &QuantumState::ground(1)).unwrap();
        assert!(out.probability(BasisState(1)) > 1.0 - 1e-10);
    }

    #[test]
    fn near_resonant_partitions_pairs() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(2, 0, 1), 0.4, PI, OMEGA).unwrap();
        let psi = {
            let amps = (0..16).map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
            QuantumState::from_amplitudes(amps).unwrap().normalized().unwrap()
        };
        let out = evolve_near_resonant(&s, &p, &psi, default_cutoff(&s)).unwrap();
        let want = apply_blockwise(&s, &p, &psi);
        for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_resonant_suppresses_2j_prime_neighbours() {
        let s = four_spin();
        let om = crate::pulse::rabi_for_2pik(0.8, 4, PI).unwrap();
        let p = Pulse::resonant(&s, TransitionLabel::new(1, 2, 1), 0.0, PI, om).unwrap();
        // (2, -1) lies 2J' away from the carrier
        for lo in pair_members(&s, TransitionLabel::new(1, 2, -1)) {
            let out = evolve_near_resonant(&s, &p, &QuantumState::basis(4, lo), 75.0).unwrap();
            assert!(out.probability(BasisState(lo.0 | 2)) < 1e-18);
        }
    }

    #[test]
    fn near_resonant_errors_and_idle() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(0, 1, 1), 0.0, PI, OMEGA).unwrap();
        let psi = QuantumState::ground(4);
        assert!(evolve_near_resonant(&s, &p, &psi, 200.0).is_err());
        assert!(evolve_near_resonant(&s, &p, &psi, 0.0).is_err());
        // crowded register with a wide cutoff: two spins inside the window
        let crowded = SpinSystem::new(vec![50.0, 70.0, 200.0, 400.0], 1.0, 0.1).unwrap();
        let q = Pulse::resonant(&crowded, TransitionLabel::new(0, 1, 1), 0.0, PI, OMEGA).unwrap();
        assert!(matches!(evolve_near_resonant(&crowded, &q, &psi, 19.0), Err(Error::AmbiguousCarrier { .. })));
        // carrier far from every spin: nothing happens
        let mut far = p;
        far.carrier = 1000.0;
        assert_eq!(evolve_near_resonant(&s, &far, &psi, 75.0).unwrap(), psi);
    }

    #[test]
    fn resonant_only_oracle_flips_matching_context() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(1, 2, -1), 0.0, 2.0 * PI, OMEGA).unwrap();
        let psi = QuantumState::uniform(4);
        let out = evolve_resonant_only(&s, &p, &psi).unwrap();
        for a in 0..16 {
            let st = BasisState(a);
            let flipped = st.bit(0) == 0 && st.bit(2) == 0 && st.bit(3) == 1;
            let ratio = out.amplitudes()[a] / psi.amplitudes()[a];
            let want = if flipped { -1.0 } else { 1.0 };
            assert!((ratio - want).norm() < 1e-14, "state {a}");
        }
        let mut zero = p;
        zero.rabi = 0.0;
        assert_eq!(evolve_resonant_only(&s, &zero, &psi).unwrap(), psi);
    }

    /// Without couplings every engine sees the same single resonant pulse.
    #[test]
    fn engines_agree_without_couplings() {
        let s = SpinSystem::new(vec![50.0, 200.0, 350.0, 500.0], 0.0, 0.0).unwrap();
        let psi = QuantumState::ground(4);
        for (k, angle) in [(0, FRAC_PI_2), (2, PI), (3, 2.0 * PI)] {
            let target = s.transition_context(BasisState(0), k).unwrap();
            let p = Pulse::resonant(&s, target, 0.6, angle, OMEGA).unwrap();
            let a = evolve_exact(&s, &p, &psi).unwrap();
            let b = evolve_near_resonant(&s, &p, &psi, 75.0).unwrap();
            let c = evolve_resonant_only(&s, &p, &psi).unwrap();
            assert!(fidelity(&a, &c) > 1.0 - 1e-6, "exact vs ideal {}", fidelity(&a, &c));
            assert!(fidelity(&b, &c) > 1.0 - 1e-12);
        }
    }

    /// Pushing every other context beyond the cutoff turns the near-resonant
    /// engine into the ideal one. In a two-spin chain the two contexts of a
    /// spin sit `2J` apart while the carrier is `J` from the bare Larmor
    /// frequency, so any cutoff in `[J, 2J)` isolates the target context.
    #[test]
    fn near_resonant_reduces_to_ideal_when_contexts_are_far() {
        let s = SpinSystem::new(vec![1000.0, 3000.0], 300.0, 0.4).unwrap();
        let psi = QuantumState::uniform(2);
        for target in [TransitionLabel::new(0, 1, 0), TransitionLabel::new(1, -1, 0)] {
            for (phase, angle) in [(0.2, FRAC_PI_2), (PI, PI), (0.0, 2.0 * PI)] {
                let p = Pulse::resonant(&s, target, phase, angle, OMEGA).unwrap();
                let a = evolve_near_resonant(&s, &p, &psi, 400.0).unwrap();
                let b = evolve_resonant_only(&s, &p, &psi).unwrap();
                for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                    assert!((x - y).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn exact_step_refinement_converges() {
        let s = four_spin();
        let p = Pulse::resonant(&s, TransitionLabel::new(0, 1, 1), 0.0, FRAC_PI_2, OMEGA).unwrap();
        let psi = QuantumState::ground(4);
        let drift = |substeps: u32| {
            let out = evolve_exact_with_step(&s, &p, &psi, rk4_step_size(&s, substeps)).unwrap();
            (out.norm_sqr() - 1.0).abs()
        };
        let (coarse, fine) = (drift(1), drift(2));
        // local error of a fourth-order step: the per-pulse drift falls by ~2^5
        assert!(coarse / fine > 16.0, "{coarse} vs {fine}");
        assert!(drift(DEFAULT_SUBSTEPS) < 5e-9);
        assert!(evolve(&EngineKind::Exact { substeps: 0 }, &s, &p, &psi).is_err());
    }

    #[test]
    fn empty_program_trajectory() {
        let s = four_spin();
        let prog = PulseProgram::new(OMEGA);
        let psi = QuantumState::ground(4);
        let t = run_program(&EngineKind::exact(), &s, &prog, &psi, None).unwrap();
        assert_eq!(t.states, vec![psi]);
        assert_eq!(t.times, vec![0.0]);
    }
}
