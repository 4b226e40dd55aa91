use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::state::QuantumState;

/// `|⟨a|b⟩|²`, clamped to `[0, 1]` against rounding.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> f64 {
    a.inner(b).norm_sqr().clamp(0.0, 1.0)
}

/// `⟨ideal| ρ |ideal⟩` for the ensemble state `ρ = (1/n) Σ_r |ψ_r⟩⟨ψ_r|`.
///
/// The density matrix is built explicitly; algebraically the result is the
/// mean of the pure-state fidelities.
pub fn mixed_fidelity(ideal: &QuantumState, runs: &[QuantumState]) -> Result<f64> {
    if runs.is_empty() {
        return Err(domain("mixed fidelity of an empty ensemble"));
    }
    let dim = ideal.dimension();
    if runs.iter().any(|r| r.dimension() != dim) {
        return Err(domain("ensemble states differ in dimension from the reference"));
    }
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for run in runs {
        let a = run.amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] += a[i] * a[j].conj();
            }
        }
    }
    let scale = 1.0 / runs.len() as f64;
    let v = ideal.amplitudes();
    let mut proj = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            proj += v[i].conj() * rho[i * dim + j] * v[j];
        }
    }
    Ok((proj.re * scale).clamp(0.0, 1.0))
}
