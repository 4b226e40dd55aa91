//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string; the computations live in ordinary functions so they can be tested
//! natively.

use ising_grover::engine::default_cutoff;
use ising_grover::pulse::detuned_block;
use ising_grover::{
    fidelity, run_ensemble, run_program, EngineKind, GroverCompiler, NoiseChannel, NoiseMode, NoiseSpec, PulseProgram,
    QuantumState, ReferenceMode, RegisterLayout, SpinSystem,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const RABI: f64 = 0.1008;

#[derive(Debug, Serialize)]
pub struct GateSpan {
    pub start: f64,
    pub end: f64,
    pub label: String,
}

#[derive(Debug, Serialize)]
pub struct Trace {
    pub pulses: usize,
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub gates: Vec<GateSpan>,
}

#[derive(Debug, Serialize)]
pub struct DetuningScan {
    pub rabi: Vec<f64>,
    /// Probability left in the unwanted transition after the pulse.
    pub leakage: Vec<f64>,
    /// Rabi frequencies at which the unwanted transition completes k cycles.
    pub roots: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Sweep {
    pub epsilon: Vec<f64>,
    pub f_end: Vec<f64>,
    pub sigma: Vec<f64>,
}

fn register(target: usize) -> Result<(SpinSystem, PulseProgram), String> {
    let system = SpinSystem::standard(4).map_err(|e| e.to_string())?;
    let layout = RegisterLayout::standard(4).map_err(|e| e.to_string())?;
    let compiler = GroverCompiler::new(&system, layout.clone(), RABI).map_err(|e| e.to_string())?;
    if target >= layout.search_space() {
        return Err(format!("target {target} outside 0..{}", layout.search_space()));
    }
    let program = compiler.program(layout.embed(target)).map_err(|e| e.to_string())?;
    Ok((system, program))
}

fn mode(name: &str) -> Result<NoiseMode, String> {
    match name {
        "static" => Ok(NoiseMode::Static),
        "random" => Ok(NoiseMode::Random),
        other => Err(format!("unknown noise mode `{other}`")),
    }
}

/// Near-resonant run of the 4-spin search, one noise realization, compared
/// pulse by pulse with ideal gates.
pub fn trace(target: usize, epsilon: f64, noise_mode: &str, seed: u64) -> Result<Trace, String> {
    let (system, program) = register(target)?;
    let psi = QuantumState::ground(4);
    let ideal = run_program(&EngineKind::ResonantOnly, &system, &program, &psi, None).map_err(|e| e.to_string())?;
    let spec = NoiseSpec::new(NoiseChannel::Larmor, mode(noise_mode)?, epsilon, seed).map_err(|e| e.to_string())?;
    let realization = ising_grover::noise::sample_realization(&spec, 0, program.len(), 4);
    let engine = EngineKind::NearResonant { cutoff: default_cutoff(&system) };
    let run = run_program(&engine, &system, &program, &psi, Some(&realization)).map_err(|e| e.to_string())?;
    let fidelity = ideal.states.iter().zip(&run.states).map(|(a, b)| fidelity(a, b)).collect();
    let gates = program
        .markers()
        .iter()
        .map(|m| GateSpan { start: run.times[m.range.start], end: run.times[m.range.end], label: m.label.to_string() })
        .collect();
    Ok(Trace { pulses: program.len(), times: run.times, fidelity, gates })
}

/// Leakage of a transition detuned by `detuning` during a pulse of angle
/// `angle` on the resonant one, for Rabi frequencies in `[rabi_min, rabi_max]`.
pub fn detuning_scan(
    detuning: f64,
    angle: f64,
    rabi_min: f64,
    rabi_max: f64,
    points: usize,
) -> Result<DetuningScan, String> {
    if !(detuning > 0.0 && angle > 0.0 && rabi_min > 0.0 && rabi_max > rabi_min && points >= 2) {
        return Err("need detuning, angle, rabi_min > 0, rabi_max > rabi_min and at least 2 points".into());
    }
    let rabi: Vec<f64> =
        (0..points).map(|i| rabi_min + (rabi_max - rabi_min) * i as f64 / (points - 1) as f64).collect();
    let leakage = rabi.iter().map(|&r| detuned_block(0.0, r, detuning, angle / r)[0][1].norm_sqr()).collect();
    // sqrt(Ω² + Δ²) τ = 2πk with τ = θ/Ω
    let roots = (1..)
        .map(|k: u32| {
            let c = 2.0 * std::f64::consts::PI * k as f64 / angle;
            if c > 1.0 {
                detuning / (c * c - 1.0).sqrt()
            } else {
                f64::INFINITY
            }
        })
        .skip_while(|r| *r > rabi_max)
        .take_while(|r| *r >= rabi_min)
        .collect();
    Ok(DetuningScan { rabi, leakage, roots })
}

/// Ensemble-averaged final fidelity of the 4-spin search under Larmor noise,
/// near-resonant engine, against the same pulses without noise.
pub fn larmor_sweep(
    noise_mode: &str,
    epsilon_max: f64,
    points: usize,
    n_rep: usize,
    seed: u64,
) -> Result<Sweep, String> {
    if !(epsilon_max > 0.0 && points >= 1 && n_rep >= 2) {
        return Err("need epsilon_max > 0, at least one point and two repetitions".into());
    }
    let (system, program) = register(0)?;
    let engine = EngineKind::NearResonant { cutoff: default_cutoff(&system) };
    let base = NoiseSpec::new(NoiseChannel::Larmor, mode(noise_mode)?, 0.0, seed).map_err(|e| e.to_string())?;
    let groups = n_rep.min(10);
    let mut out = Sweep { epsilon: Vec::new(), f_end: Vec::new(), sigma: Vec::new() };
    for i in 1..=points {
        let eps = epsilon_max * i as f64 / points as f64;
        let spec = base.with_amplitude(eps).map_err(|e| e.to_string())?;
        let r = run_ensemble(&system, &program, engine, &spec, n_rep, ReferenceMode::NoiselessPulses, false)
            .map_err(|e| e.to_string())?;
        let est = r.estimate(groups).map_err(|e| e.to_string())?;
        out.epsilon.push(eps);
        out.f_end.push(r.f_end);
        out.sigma.push(est.sigma);
    }
    Ok(out)
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let v = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = fidelityTrace)]
pub fn fidelity_trace_js(target: u32, epsilon: f64, noise_mode: &str, seed: u32) -> Result<String, JsError> {
    to_js(trace(target as usize, epsilon, noise_mode, seed as u64))
}

#[wasm_bindgen(js_name = detuningScan)]
pub fn detuning_scan_js(
    detuning: f64,
    angle: f64,
    rabi_min: f64,
    rabi_max: f64,
    points: u32,
) -> Result<String, JsError> {
    to_js(detuning_scan(detuning, angle, rabi_min, rabi_max, points as usize))
}

#[wasm_bindgen(js_name = larmorSweep)]
pub fn larmor_sweep_js(
    noise_mode: &str,
    epsilon_max: f64,
    points: u32,
    n_rep: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(larmor_sweep(noise_mode, epsilon_max, points as usize, n_rep as usize, seed as u64))
}
