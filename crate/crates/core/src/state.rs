use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spin::BasisState;

/// Register state as `2^n` complex amplitudes in basis-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩`.
    pub fn ground(n_spins: usize) -> Self {
        Self::basis(n_spins, BasisState(0))
    }

    pub fn basis(n_spins: usize, state: BasisState) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_spins];
        amps[state.0] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalisation is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(domain(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Ok(Self { amps })
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(n_spins: usize) -> Self {
        let dim = 1usize << n_spins;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { amps: vec![a; dim] }
    }

    pub fn n_spins(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, state: BasisState) -> Complex64 {
        self.amps[state.0]
    }

    pub fn probability(&self, state: BasisState) -> f64 {
        self.amps[state.0].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(domain("cannot normalise a zero or non-finite state"));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }
}
