//! Grover search compiled to RF pulses.
//!
//! One spin of the chain is the ancilla; the remaining data spins hold the
//! search register. Every gate is a set of conditional rotations:
//!
//! * Hadamard on data spin `k`: `R(π,π)`, then `R(π/2,π/2)`, then `R(π/2,π)`
//!   on every context of `k`. The product is `i·H`.
//! * Oracle for target `t`: one `2π` pulse on the ancilla at the context
//!   selected by `t`'s data bits, flipping the sign of that pattern.
//! * Conditional reflection: `2π` pulses on every other ancilla context,
//!   flipping every data pattern except all-zero.
//!
//! A Grover step runs oracle, Hadamards, reflection, Hadamards.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pulse::{GateLabel, Pulse, PulseProgram};
use crate::spin::{BasisState, SpinSystem, TransitionLabel};

/// Which spin is the ancilla; the rest are data spins in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    n_spins: usize,
    ancilla: usize,
    data_qubits: Vec<usize>,
}

impl RegisterLayout {
    /// `xx.x` for four spins (ancilla 1) and `xx.xx` for five (ancilla 2).
    pub fn standard(n_spins: usize) -> Result<Self> {
        match n_spins {
            4 => Self::new(4, 1),
            5 => Self::new(5, 2),
            n => Err(domain(format!("no standard layout for {n} spins"))),
        }
    }

    /// Every data spin must lie within coupling distance 2 of the ancilla so
    /// that a single ancilla pulse can read the whole data pattern.
    pub fn new(n_spins: usize, ancilla: usize) -> Result<Self> {
        if n_spins < 2 {
            return Err(domain("a layout needs an ancilla and at least one data spin"));
        }
        if ancilla >= n_spins {
            return Err(domain(format!("ancilla {ancilla} outside a {n_spins}-spin chain")));
        }
        let data_qubits: Vec<usize> = (0..n_spins).filter(|&k| k != ancilla).collect();
        if let Some(far) = data_qubits.iter().find(|&&k| k.abs_diff(ancilla) > 2) {
            return Err(domain(format!("data spin {far} is beyond coupling range of ancilla {ancilla}")));
        }
        Ok(Self { n_spins, ancilla, data_qubits })
    }

    /// Parses a pattern such as `xx.x`, written most-significant spin first;
    /// `.` marks the ancilla.
    pub fn from_pattern(pattern: &str) -> Result<Self> {
        let chars: Vec<char> = pattern.chars().collect();
        if chars.iter().any(|c| *c != 'x' && *c != '.') || chars.iter().filter(|c| **c == '.').count() != 1 {
            return Err(domain(format!("layout pattern {pattern:?} must be 'x's with exactly one '.'")));
        }
        let n = chars.len();
        let pos = chars.iter().position(|c| *c == '.').expect("checked");
        Self::new(n, n - 1 - pos)
    }

    pub fn pattern(&self) -> String {
        (0..self.n_spins).rev().map(|k| if k == self.ancilla { '.' } else { 'x' }).collect()
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn data_qubits(&self) -> &[usize] {
        &self.data_qubits
    }

    /// Size of the search space, `2^d` for `d` data spins.
    pub fn search_space(&self) -> usize {
        1 << self.data_qubits.len()
    }

    /// Register index of data value `value` (bit `i` of `value` goes to the
    /// `i`-th data spin) with the ancilla in `0`.
    pub fn embed(&self, value: usize) -> BasisState {
        BasisState(
            self.data_qubits.iter().enumerate().filter(|(i, _)| (value >> i) & 1 == 1).map(|(_, q)| 1 << q).sum(),
        )
    }

    /// Data value encoded in a register index (inverse of [`embed`](Self::embed)).
    pub fn extract(&self, state: BasisState) -> usize {
        self.data_qubits.iter().enumerate().map(|(i, &q)| (state.bit(q) as usize) << i).sum()
    }
}

/// Number of Grover iterations for `search_space` items: the integer
/// nearest to `π√N/4 - 1/2`.
pub fn grover_steps(search_space: usize) -> Result<usize> {
    if search_space < 2 || !search_space.is_power_of_two() {
        return Err(domain(format!("search space {search_space} is not a power of two >= 2")));
    }
    Ok((PI * (search_space as f64).sqrt() / 4.0 - 0.5).round() as usize)
}

pub struct GroverCompiler<'a> {
    system: &'a SpinSystem,
    layout: RegisterLayout,
    rabi: f64,
}

impl<'a> GroverCompiler<'a> {
    pub fn new(system: &'a SpinSystem, layout: RegisterLayout, rabi: f64) -> Result<Self> {
        if layout.n_spins() != system.n_spins() {
            return Err(domain(format!(
                "layout {} does not match a {}-spin system",
                layout.pattern(),
                system.n_spins()
            )));
        }
        if !(rabi > 0.0) {
            return Err(domain(format!("Rabi frequency {rabi} must be positive")));
        }
        Ok(Self { system, layout, rabi })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn pulse(&self, target: TransitionLabel, phase: f64, angle: f64) -> Result<Pulse> {
        Pulse::resonant(self.system, target, phase, angle, self.rabi)
    }

    /// Hadamard on data spin `qubit`, in time order.
    pub fn hadamard(&self, qubit: usize) -> Result<Vec<Pulse>> {
        if qubit == self.layout.ancilla || qubit >= self.layout.n_spins {
            return Err(domain(format!("qubit {qubit} is not a data spin of {}", self.layout.pattern())));
        }
        let contexts = self.system.valid_contexts(qubit);
        let mut pulses = Vec::with_capacity(3 * contexts.len());
        for (phase, angle) in [(PI, PI), (FRAC_PI_2, FRAC_PI_2), (FRAC_PI_2, PI)] {
            for &c in &contexts {
                pulses.push(self.pulse(c, phase, angle)?);
            }
        }
        Ok(pulses)
    }

    /// Sign flip of every data pattern except all-zero.
    pub fn conditional_reflection(&self) -> Result<Vec<Pulse>> {
        let a = self.layout.ancilla;
        let zero = self.system.context_unchecked(0, a);
        self.system.valid_contexts(a).into_iter().filter(|c| *c != zero).map(|c| self.pulse(c, 0.0, 2.0 * PI)).collect()
    }

    /// Ancilla context that singles out `target`'s data pattern.
    pub fn oracle_context(&self, target: BasisState) -> Result<TransitionLabel> {
        let a = self.layout.ancilla;
        if target.0 >= self.system.dimension() {
            return Err(domain(format!("target {} outside the register", target.0)));
        }
        if target.bit(a) != 0 {
            return Err(domain(format!("target {} has the ancilla bit set", target.0)));
        }
        let ctx = self.system.context_unchecked(target.0, a);
        let (first, second) = self.system.neighbour_counts(a);
        // A zero sum over two neighbours is reached by two patterns.
        let ambiguous = (first == 2 && ctx.mu == 0) || (second == 2 && ctx.nu == 0);
        // Data spins that are not neighbours of the ancilla are invisible to it.
        let covered = first + second == self.layout.data_qubits.len();
        if ambiguous || !covered {
            return Err(Error::AmbiguousOracle { qubit: a, mu: ctx.mu, nu: ctx.nu });
        }
        Ok(ctx)
    }

    pub fn oracle(&self, target: BasisState) -> Result<Vec<Pulse>> {
        Ok(vec![self.pulse(self.oracle_context(target)?, 0.0, 2.0 * PI)?])
    }

    fn hadamard_layer(&self, program: &mut PulseProgram) -> Result<()> {
        for &q in &self.layout.data_qubits {
            program.push_gate(GateLabel::Hadamard(q), self.hadamard(q)?);
        }
        Ok(())
    }

    /// Initial Hadamards followed by the optimal number of Grover steps.
    pub fn program(&self, target: BasisState) -> Result<PulseProgram> {
        self.program_with_steps(target, grover_steps(self.layout.search_space())?)
    }

    pub fn program_with_steps(&self, target: BasisState, steps: usize) -> Result<PulseProgram> {
        let oracle = self.oracle(target)?;
        let reflection = self.conditional_reflection()?;
        let mut program = PulseProgram::new(self.rabi);
        self.hadamard_layer(&mut program)?;
        for _ in 0..steps {
            program.push_gate(GateLabel::Oracle(target.0), oracle.iter().copied());
            self.hadamard_layer(&mut program)?;
            program.push_gate(GateLabel::ConditionalReflection, reflection.iter().copied());
            self.hadamard_layer(&mut program)?;
        }
        Ok(program)
    }
}
