//! The spin register: an open chain of spin-1/2 nuclei with Larmor
//! frequencies `w_k`, nearest-neighbour Ising coupling `J` and
//! next-nearest-neighbour coupling `J'`.
//!
//! All frequencies are plain `f64` values in one consistent angular unit
//! (the defaults use 2π·MHz); only their ratios matter.
//!
//! Basis states are indexed by their bit pattern: bit `k` of the index is the
//! state `α_k` of spin `k`, and `I^z_k` has eigenvalue `(-1)^{α_k} / 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Larmor frequencies of the default register, extended by 150 per spin.
pub const DEFAULT_LARMOR: [f64; 5] = [50.0, 200.0, 350.0, 500.0, 650.0];
pub const DEFAULT_COUPLING_J: f64 = 10.0;
pub const DEFAULT_COUPLING_JP: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    larmor: Vec<f64>,
    coupling_j: f64,
    coupling_jp: f64,
}

/// A computational basis state `|α_{n-1} … α_1 α_0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState(pub usize);

impl BasisState {
    pub fn index(self) -> usize {
        self.0
    }

    /// `α_k`, the state of spin `k`.
    pub fn bit(self, k: usize) -> u8 {
        ((self.0 >> k) & 1) as u8
    }

    /// `(-1)^{α_k}`.
    pub fn sign(self, k: usize) -> i32 {
        1 - 2 * self.bit(k) as i32
    }
}

/// A conditional transition of spin `qubit`: its frequency is
/// `w_k + μJ + νJ'`, where `μ` and `ν` sum `(-1)^{α_j}` over the first and
/// second neighbours of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionLabel {
    pub qubit: usize,
    pub mu: i32,
    pub nu: i32,
}

impl TransitionLabel {
    pub fn new(qubit: usize, mu: i32, nu: i32) -> Self {
        Self { qubit, mu, nu }
    }
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_{}^({},{})", self.qubit, self.mu, self.nu)
    }
}

impl SpinSystem {
    /// Builds a register, checking that every Larmor frequency is positive
    /// and distinct and that both couplings are finite and non-negative.
    ///
    /// Spectral crowding (transitions of different spins coming too close) is
    /// not rejected here; use [`SpinSystem::validate_spectrum`].
    pub fn new(larmor: Vec<f64>, coupling_j: f64, coupling_jp: f64) -> Result<Self> {
        if larmor.is_empty() {
            return Err(domain("a spin system needs at least one spin"));
        }
        if larmor.len() > 20 {
            return Err(domain(format!("{} spins exceed the supported register size", larmor.len())));
        }
        for (k, &w) in larmor.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(domain(format!("Larmor frequency w_{k} = {w} must be positive and finite")));
            }
            if larmor[..k].contains(&w) {
                return Err(domain(format!("Larmor frequency w_{k} = {w} is repeated")));
            }
        }
        for (name, c) in [("J", coupling_j), ("J'", coupling_jp)] {
            if !(c.is_finite() && c >= 0.0) {
                return Err(domain(format!("coupling {name} = {c} must be finite and non-negative")));
            }
        }
        Ok(Self { larmor, coupling_j, coupling_jp })
    }

    /// The default register with `n_spins` spins (`n_spins <= 5`), `J = 10`,
    /// `J' = 0.4`.
    pub fn standard(n_spins: usize) -> Result<Self> {
        if n_spins == 0 || n_spins > DEFAULT_LARMOR.len() {
            return Err(domain(format!("no default Larmor set for {n_spins} spins")));
        }
        Self::new(DEFAULT_LARMOR[..n_spins].to_vec(), DEFAULT_COUPLING_J, DEFAULT_COUPLING_JP)
    }

    pub fn n_spins(&self) -> usize {
        self.larmor.len()
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dimension(&self) -> usize {
        1 << self.larmor.len()
    }

    pub fn larmor(&self) -> &[f64] {
        &self.larmor
    }

    pub fn coupling_j(&self) -> f64 {
        self.coupling_j
    }

    pub fn coupling_jp(&self) -> f64 {
        self.coupling_jp
    }

    pub fn max_larmor(&self) -> f64 {
        self.larmor.iter().copied().fold(f64::MIN, f64::max)
    }

    /// Smallest `|w_k - w_l|` over distinct spins, `+inf` for a single spin.
    pub fn min_larmor_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (k, a) in self.larmor.iter().enumerate() {
            for b in &self.larmor[k + 1..] {
                gap = gap.min((a - b).abs());
            }
        }
        gap
    }

    /// Copy of this system with every Larmor frequency shifted by the
    /// matching entry of `shifts` (a single entry shifts all spins).
    /// Invariants are not re-checked: noisy registers may be transiently odd.
    pub(crate) fn with_larmor_shifts(&self, shifts: &[f64]) -> Self {
        let larmor =
            self.larmor.iter().enumerate().map(|(k, w)| w + shifts[if shifts.len() == 1 { 0 } else { k }]).collect();
        Self { larmor, ..*self }
    }

    fn neighbours(&self, qubit: usize, distance: usize) -> impl Iterator<Item = usize> + '_ {
        let lower = qubit.checked_sub(distance);
        let upper = Some(qubit + distance).filter(|&j| j < self.n_spins());
        lower.into_iter().chain(upper)
    }

    /// Number of existing first and second neighbours of `qubit` on the open chain.
    pub fn neighbour_counts(&self, qubit: usize) -> (usize, usize) {
        (self.neighbours(qubit, 1).count(), self.neighbours(qubit, 2).count())
    }

    fn check_state(&self, state: BasisState) -> Result<()> {
        if state.0 >= self.dimension() {
            return Err(domain(format!("basis index {} out of range for {} spins", state.0, self.n_spins())));
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_spins() {
            return Err(domain(format!("qubit {qubit} out of range for {} spins", self.n_spins())));
        }
        Ok(())
    }

    /// `E_α / ħ` of the diagonal Hamiltonian `H_0`.
    pub fn diagonal_energy(&self, state: BasisState) -> Result<f64> {
        self.check_state(state)?;
        let iz = |k: usize| 0.5 * state.sign(k) as f64;
        let n = self.n_spins();
        let zeeman: f64 = (0..n).map(|k| self.larmor[k] * iz(k)).sum();
        let first: f64 = (0..n.saturating_sub(1)).map(|k| iz(k) * iz(k + 1)).sum();
        let second: f64 = (0..n.saturating_sub(2)).map(|k| iz(k) * iz(k + 2)).sum();
        Ok(-zeeman - 2.0 * self.coupling_j * first - 2.0 * self.coupling_jp * second)
    }

    /// Whether `(μ, ν)` is reachable for `qubit`: `|μ|` at most the number of
    /// first neighbours and of the same parity, likewise for `ν`.
    pub fn is_valid_label(&self, label: TransitionLabel) -> bool {
        if label.qubit >= self.n_spins() {
            return false;
        }
        let (first, second) = self.neighbour_counts(label.qubit);
        let ok = |v: i32, count: usize| {
            let count = count as i32;
            v.abs() <= count && (v - count) % 2 == 0
        };
        ok(label.mu, first) && ok(label.nu, second)
    }

    /// `w_k + μJ + νJ'`.
    pub fn transition_frequency(&self, label: TransitionLabel) -> Result<f64> {
        if !self.is_valid_label(label) {
            return Err(domain(format!("{label} is not a valid transition for {} spins", self.n_spins())));
        }
        Ok(self.frequency_unchecked(label))
    }

    pub(crate) fn frequency_unchecked(&self, label: TransitionLabel) -> f64 {
        self.larmor[label.qubit] + label.mu as f64 * self.coupling_j + label.nu as f64 * self.coupling_jp
    }

    /// The transition of `qubit` selected by the neighbour pattern of `state`.
    /// The bit of `qubit` itself is ignored.
    pub fn transition_context(&self, state: BasisState, qubit: usize) -> Result<TransitionLabel> {
        self.check_state(state)?;
        self.check_qubit(qubit)?;
        Ok(self.context_unchecked(state.0, qubit))
    }

    pub(crate) fn context_unchecked(&self, index: usize, qubit: usize) -> TransitionLabel {
        let state = BasisState(index);
        let mu = self.neighbours(qubit, 1).map(|j| state.sign(j)).sum();
        let nu = self.neighbours(qubit, 2).map(|j| state.sign(j)).sum();
        TransitionLabel { qubit, mu, nu }
    }

    /// Every valid `(μ, ν)` context of `qubit`, ordered by `μ` descending,
    /// then `ν` descending.
    pub fn valid_contexts(&self, qubit: usize) -> Vec<TransitionLabel> {
        if qubit >= self.n_spins() {
            return Vec::new();
        }
        let (first, second) = self.neighbour_counts(qubit);
        let values = |count: usize| (0..=count).rev().map(move |i| 2 * i as i32 - count as i32);
        values(first).flat_map(|mu| values(second).map(move |nu| TransitionLabel { qubit, mu, nu })).collect()
    }

    /// All valid transitions of the register, qubit by qubit.
    pub fn all_transitions(&self) -> Vec<TransitionLabel> {
        (0..self.n_spins()).flat_map(|k| self.valid_contexts(k)).collect()
    }

    /// Every unordered pair of transitions belonging to different spins whose
    /// frequencies differ by less than `tolerance`. An empty list means each
    /// pulse addresses a single spin.
    ///
    /// # Panics
    /// If `tolerance` is not positive.
    pub fn validate_spectrum(&self, tolerance: f64) -> Vec<(TransitionLabel, TransitionLabel)> {
        assert!(tolerance > 0.0, "spectrum tolerance must be positive");
        let labels: Vec<_> = self.all_transitions().into_iter().map(|l| (l, self.frequency_unchecked(l))).collect();
        let mut collisions = Vec::new();
        for (i, &(a, fa)) in labels.iter().enumerate() {
            for &(b, fb) in &labels[i + 1..] {
                if a.qubit != b.qubit && (fa - fb).abs() < tolerance {
                    collisions.push((a, b));
                }
            }
        }
        collisions
    }

    /// Tolerance used when none is given: `2J'`, the smallest detuning the
    /// Rabi frequency has to resolve.
    pub fn default_spectrum_tolerance(&self) -> f64 {
        2.0 * self.coupling_jp
    }
}
