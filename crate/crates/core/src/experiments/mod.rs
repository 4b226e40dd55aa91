//! Ensemble runs, fidelities, error bars and decay-model fits.

pub mod ensemble;
pub mod fidelity;
pub mod fit;
pub mod stats;
