#![allow(dead_code)]

use ising_grover::{BasisState, GateLabel, QuantumState, RegisterLayout, Trajectory};
use num_complex::Complex64;

/// Textbook Grover amplitudes over `n_items` entries: `out[0]` is the uniform
/// start, `out[s]` the amplitudes after `s` iterations of
/// "flip the target, invert about the mean".
pub fn textbook_grover(n_items: usize, target: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut a = vec![1.0 / (n_items as f64).sqrt(); n_items];
    let mut out = vec![a.clone()];
    for _ in 0..steps {
        a[target] = -a[target];
        let mean = a.iter().sum::<f64>() / n_items as f64;
        a.iter_mut().for_each(|x| *x = 2.0 * mean - *x);
        out.push(a.clone());
    }
    out
}

/// Data-register amplitudes of `state` with the ancilla in `|0⟩`.
pub fn data_amplitudes(layout: &RegisterLayout, state: &QuantumState) -> Vec<Complex64> {
    (0..layout.search_space()).map(|v| state.amplitude(layout.embed(v))).collect()
}

/// `|⟨textbook|data⟩|²` with the textbook amplitudes as a real vector.
pub fn overlap(textbook: &[f64], data: &[Complex64]) -> f64 {
    textbook.iter().zip(data).map(|(t, d)| d * t).sum::<Complex64>().norm_sqr()
}

/// Index into `trajectory.states` after the last pulse of every complete
/// Grover step, preceded by the end of the initial Hadamard layer.
pub fn step_boundaries(traj: &Trajectory, n_data: usize) -> Vec<usize> {
    let ends: Vec<(usize, GateLabel)> = traj.markers.iter().map(|m| (m.range.end, m.label)).collect();
    let mut out = vec![ends[n_data - 1].0];
    // each step: oracle, n_data Hadamards, reflection, n_data Hadamards
    let per_step = 2 * n_data + 2;
    let mut i = n_data;
    while i + per_step <= ends.len() {
        assert!(matches!(ends[i].1, GateLabel::Oracle(_)));
        out.push(ends[i + per_step - 1].0);
        i += per_step;
    }
    out
}

/// Probability of finding the data register in `target` with the ancilla
/// traced out.
pub fn data_probability(layout: &RegisterLayout, state: &QuantumState, target: usize) -> f64 {
    let t = layout.embed(target).0;
    let a = 1 << layout.ancilla();
    state.probability(BasisState(t)) + state.probability(BasisState(t | a))
}
