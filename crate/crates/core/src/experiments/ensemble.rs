use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fidelity::{fidelity, mixed_fidelity};
use super::stats::{subensemble_error, Estimate};
use crate::engine::{run_program, EngineKind, Trajectory};
use crate::error::{domain, Result};
use crate::noise::{sample_realization, NoiseSpec};
use crate::pulse::{Marker, PulseProgram};
use crate::spin::{BasisState, SpinSystem};
use crate::state::QuantumState;

/// What each noisy run is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMode {
    /// The same engine and program without noise.
    NoiselessPulses,
    /// Ideal gates: the resonant-only engine.
    ResonantOnly,
    /// The basis state the search should find.
    TargetState(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub engine: EngineKind,
    pub noise: NoiseSpec,
    pub reference: ReferenceMode,
    pub n_rep: usize,
    /// Final fidelity of each repetition, ordered by repetition index.
    pub fidelities: Vec<f64>,
    /// `⟨ref| ρ |ref⟩` of the ensemble-averaged final state.
    pub f_end: f64,
    /// Per-repetition fidelity at every pulse boundary, if requested.
    pub curves: Option<Vec<Vec<f64>>>,
    /// Pulse-boundary times in `t_ph`.
    pub times: Vec<f64>,
    pub markers: Vec<Marker>,
}

impl EnsembleResult {
    /// Ensemble-mean fidelity curve.
    pub fn mean_curve(&self) -> Option<Vec<f64>> {
        let curves = self.curves.as_ref()?;
        let n = curves.len() as f64;
        let mut mean = vec![0.0; self.times.len()];
        for c in curves {
            mean.iter_mut().zip(c).for_each(|(m, f)| *m += f / n);
        }
        Some(mean)
    }

    /// Mean final fidelity with its sub-ensemble error over `groups` groups.
    pub fn estimate(&self, groups: usize) -> Result<Estimate> {
        subensemble_error(&self.fidelities, groups)
    }
}

/// Reference states at every pulse boundary; a fixed target is repeated.
enum Reference {
    Path(Trajectory),
    Fixed(QuantumState),
}

impl Reference {
    fn at(&self, j: usize) -> &QuantumState {
        match self {
            Reference::Path(t) => &t.states[j],
            Reference::Fixed(s) => s,
        }
    }

    fn last(&self) -> &QuantumState {
        match self {
            Reference::Path(t) => t.final_state(),
            Reference::Fixed(s) => s,
        }
    }
}

/// Runs `program` from the ground state `n_rep` times with independent noise
/// realizations (repetition `r` uses stream `r` of `noise.seed`).
/// Repetitions run in parallel; results are ordered by repetition.
pub fn run_ensemble(
    system: &SpinSystem,
    program: &PulseProgram,
    engine: EngineKind,
    noise: &NoiseSpec,
    n_rep: usize,
    reference: ReferenceMode,
    keep_curves: bool,
) -> Result<EnsembleResult> {
    if n_rep == 0 {
        return Err(domain("an ensemble needs at least one repetition"));
    }
    let n = system.n_spins();
    let initial = QuantumState::ground(n);
    let clean = run_program(&engine, system, program, &initial, None)?;
    let reference_states = match reference {
        ReferenceMode::NoiselessPulses => Reference::Path(clean.clone()),
        ReferenceMode::ResonantOnly => {
            Reference::Path(run_program(&EngineKind::ResonantOnly, system, program, &initial, None)?)
        }
        ReferenceMode::TargetState(t) => {
            if t >= system.dimension() {
                return Err(domain(format!("target state {t} outside a {n}-spin register")));
            }
            Reference::Fixed(QuantumState::basis(n, BasisState(t)))
        }
    };

    let score = |traj: &Trajectory| -> (f64, Option<Vec<f64>>, QuantumState) {
        let end = fidelity(reference_states.last(), traj.final_state());
        let curve = keep_curves
            .then(|| traj.states.iter().enumerate().map(|(j, s)| fidelity(reference_states.at(j), s)).collect());
        (end, curve, traj.final_state().clone())
    };

    // Without noise every repetition is the clean run.
    let runs: Vec<(f64, Option<Vec<f64>>, QuantumState)> = if noise.amplitude == 0.0 {
        let one = score(&clean);
        vec![one; n_rep]
    } else {
        (0..n_rep)
            .into_par_iter()
            .map(|rep| {
                let realization = sample_realization(noise, rep as u64, program.len(), n);
                let traj = run_program(&engine, system, program, &initial, Some(&realization))?;
                Ok(score(&traj))
            })
            .collect::<Result<_>>()?
    };

    let mut fidelities = Vec::with_capacity(n_rep);
    let mut curves = keep_curves.then(|| Vec::with_capacity(n_rep));
    let mut finals = Vec::with_capacity(n_rep);
    for (f, c, s) in runs {
        fidelities.push(f);
        if let (Some(all), Some(c)) = (curves.as_mut(), c) {
            all.push(c);
        }
        finals.push(s);
    }
    let f_end = mixed_fidelity(reference_states.last(), &finals)?;
    Ok(EnsembleResult {
        engine,
        noise: *noise,
        reference,
        n_rep,
        fidelities,
        f_end,
        curves,
        times: clean.times,
        markers: clean.markers,
    })
}

/// One point of a noise-amplitude sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub f_end: f64,
    pub sigma: f64,
    pub n_rep: usize,
}

/// Final-fidelity ensembles at each amplitude in `epsilons`, with error bars
/// from `groups` sub-ensembles.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    system: &SpinSystem,
    program: &PulseProgram,
    engine: EngineKind,
    noise: &NoiseSpec,
    epsilons: &[f64],
    n_rep: usize,
    groups: usize,
    reference: ReferenceMode,
) -> Result<Vec<SweepPoint>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let spec = noise.with_amplitude(epsilon)?;
            let result = run_ensemble(system, program, engine, &spec, n_rep, reference, false)?;
            let est = result.estimate(groups)?;
            Ok(SweepPoint { epsilon, f_end: result.f_end, sigma: est.sigma, n_rep })
        })
        .collect()
}
