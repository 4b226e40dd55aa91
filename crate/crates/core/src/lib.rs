//! Pulse-level simulation of Grover search on an Ising-coupled spin chain.
//!
//! A chain of spin-½ nuclei with distinct Larmor frequencies and nearest and
//! next-nearest neighbour `I^z I^z` couplings is driven by rectangular
//! radio-frequency pulses. Each gate is compiled into pulses that address one
//! transition context `(μ, ν)` of one spin; the resulting program is run with
//! one of three propagators and with optional Gaussian noise on the Larmor or
//! Rabi frequencies, and the final state is scored by its fidelity.

// `!(x > 0.0)` is used on purpose so NaN is rejected along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod noise;
pub mod numfmt;
pub mod pulse;
pub mod spin;
pub mod state;

pub use compiler::{grover_steps, GroverCompiler, RegisterLayout};
pub use engine::{run_program, EngineKind, Trajectory};
pub use error::{Error, Result};
pub use experiments::ensemble::{run_ensemble, run_sweep, EnsembleResult, ReferenceMode, SweepPoint};
pub use experiments::fidelity::{fidelity, mixed_fidelity};
pub use experiments::fit::{eval_decay_model, fit_decay, DecayModel, DecayParams, FitPoint, FitResult};
pub use experiments::stats::{subensemble_error, Estimate};
pub use noise::{NoiseChannel, NoiseMode, NoiseRealization, NoiseSpec};
pub use pulse::{GateLabel, Pulse, PulseProgram};
pub use spin::{BasisState, SpinSystem, TransitionLabel};
pub use state::QuantumState;
