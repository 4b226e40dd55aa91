//! Run configuration: a TOML file with one table per block, every field
//! optional, plus `--set block.field=value` overrides applied before parsing.

use std::fmt;
use std::path::{Path, PathBuf};

use ising_grover::engine::{default_cutoff, DEFAULT_SUBSTEPS};
use ising_grover::pulse::rabi_for_2pik;
use ising_grover::spin::{DEFAULT_COUPLING_J, DEFAULT_COUPLING_JP, DEFAULT_LARMOR};
use ising_grover::{
    EngineKind, GroverCompiler, NoiseChannel, NoiseMode, NoiseSpec, PulseProgram, ReferenceMode, RegisterLayout,
    SpinSystem,
};
use serde::Deserialize;

/// Bad input: unreadable config, unknown field, out-of-range value. Maps to
/// exit code 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemBlock,
    pub pulse: PulseBlock,
    pub algorithm: AlgorithmBlock,
    pub engine: EngineBlock,
    pub noise: NoiseBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemBlock {
    pub n_spins: usize,
    /// Defaults to the first `n_spins` of 50, 200, 350, 500, 650.
    pub larmor: Option<Vec<f64>>,
    pub j: f64,
    pub jp: f64,
}

impl Default for SystemBlock {
    fn default() -> Self {
        Self { n_spins: 4, larmor: None, j: DEFAULT_COUPLING_J, jp: DEFAULT_COUPLING_JP }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPiK {
    pub detuning: f64,
    pub k: u32,
    pub angle: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseBlock {
    /// Explicit Rabi frequency. Defaults to 0.1008 unless `two_pi_k` is set.
    pub rabi: Option<f64>,
    pub two_pi_k: Option<TwoPiK>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmBlock {
    /// Value searched for in the data register.
    pub target: usize,
    /// Register pattern such as `xx.x`; `.` marks the ancilla.
    pub layout: Option<String>,
    /// Grover steps; defaults to the optimal count.
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineName {
    Exact,
    NearResonant,
    ResonantOnly,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineBlock {
    pub kind: EngineName,
    /// Near-resonant detuning cutoff; defaults to half the smallest Larmor gap.
    pub cutoff: Option<f64>,
    /// RK4 steps per quarter period of the fastest spin.
    pub substeps: Option<u32>,
}

impl Default for EngineBlock {
    fn default() -> Self {
        Self { kind: EngineName::NearResonant, cutoff: None, substeps: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    pub channel: NoiseChannel,
    pub mode: NoiseMode,
    /// Amplitude for `run`.
    pub epsilon: f64,
    /// Amplitudes for `sweep`.
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub n_rep: usize,
    /// Sub-ensembles for the error bars.
    pub groups: usize,
    pub per_spin: bool,
}

impl Default for NoiseBlock {
    fn default() -> Self {
        Self {
            channel: NoiseChannel::Larmor,
            mode: NoiseMode::Static,
            epsilon: 0.0,
            epsilons: Vec::new(),
            seed: 1,
            n_rep: 100,
            groups: 10,
            per_spin: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceName {
    NoiselessPulses,
    ResonantOnly,
    Target,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Unset: `run` compares against ideal gates, `sweep` against the same
    /// pulses without noise.
    pub reference: Option<ReferenceName>,
    pub trace: bool,
    /// Also write a gnuplot script next to each CSV.
    pub plot_script: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), reference: None, trace: true, plot_script: false }
    }
}

/// Everything a command needs, checked and built from a [`RunConfig`].
pub struct Setup {
    pub system: SpinSystem,
    pub layout: RegisterLayout,
    pub rabi: f64,
    pub engine: EngineKind,
}

impl RunConfig {
    /// Reads `path` (or the defaults when `None`) and applies `overrides`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> anyhow::Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| bad(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        let origin = path.map_or_else(|| "<defaults>".to_string(), |p| p.display().to_string());
        Self::parse(&text, &origin, overrides)
    }

    pub fn parse(text: &str, origin: &str, overrides: &[String]) -> anyhow::Result<Self> {
        // parse the original text when there is nothing to merge so
        // diagnostics point at the user's lines
        let merged;
        let source = if overrides.is_empty() {
            text
        } else {
            let mut doc: toml::Table = text.parse().map_err(|e| bad(format!("{origin}: {e}")))?;
            for o in overrides {
                apply_override(&mut doc, o)?;
            }
            merged = toml::to_string(&doc).map_err(|e| bad(format!("{origin}: {e}")))?;
            &merged
        };
        let config: RunConfig = toml::from_str(source).map_err(|e| bad(format!("{origin}: {e}")))?;
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> anyhow::Result<()> {
        let n = &self.noise;
        if !(n.epsilon >= 0.0 && n.epsilon.is_finite()) {
            return Err(bad(format!("noise.epsilon = {} must be finite and non-negative", n.epsilon)));
        }
        if let Some(e) = n.epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(bad(format!("noise.epsilons contains {e}; amplitudes must be finite and non-negative")));
        }
        if n.n_rep == 0 {
            return Err(bad("noise.n_rep must be at least 1"));
        }
        if n.groups < 2 {
            return Err(bad("noise.groups must be at least 2"));
        }
        if let Some(r) = self.pulse.rabi {
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad(format!("pulse.rabi = {r} must be positive")));
            }
        }
        if self.pulse.rabi.is_some() && self.pulse.two_pi_k.is_some() {
            return Err(bad("pulse.rabi and pulse.two_pi_k are mutually exclusive"));
        }
        if self.engine.substeps == Some(0) {
            return Err(bad("engine.substeps must be at least 1"));
        }
        Ok(())
    }

    pub fn setup(&self) -> anyhow::Result<Setup> {
        let s = &self.system;
        let larmor = match &s.larmor {
            Some(w) => w.clone(),
            None if s.n_spins <= DEFAULT_LARMOR.len() => DEFAULT_LARMOR[..s.n_spins].to_vec(),
            None => {
                return Err(bad(format!(
                    "system.larmor is required for {} spins (defaults cover {})",
                    s.n_spins,
                    DEFAULT_LARMOR.len()
                )))
            }
        };
        if larmor.len() != s.n_spins {
            return Err(bad(format!("system.larmor has {} entries for n_spins = {}", larmor.len(), s.n_spins)));
        }
        let system = SpinSystem::new(larmor, s.j, s.jp).map_err(|e| bad(format!("system: {e}")))?;
        let layout = match &self.algorithm.layout {
            Some(p) => RegisterLayout::from_pattern(p),
            None => RegisterLayout::standard(s.n_spins),
        }
        .map_err(|e| bad(format!("algorithm.layout: {e}")))?;
        if layout.n_spins() != s.n_spins {
            return Err(bad(format!("algorithm.layout has {} spins, system has {}", layout.n_spins(), s.n_spins)));
        }
        if self.algorithm.target >= layout.search_space() {
            return Err(bad(format!(
                "algorithm.target = {} outside a {}-item search space",
                self.algorithm.target,
                layout.search_space()
            )));
        }
        let rabi = match (self.pulse.rabi, self.pulse.two_pi_k) {
            (_, Some(t)) => rabi_for_2pik(t.detuning, t.k, t.angle).map_err(|e| bad(format!("pulse.two_pi_k: {e}")))?,
            (Some(r), None) => r,
            (None, None) => 0.1008,
        };
        let engine = match self.engine.kind {
            EngineName::Exact => EngineKind::Exact { substeps: self.engine.substeps.unwrap_or(DEFAULT_SUBSTEPS) },
            EngineName::NearResonant => {
                EngineKind::NearResonant { cutoff: self.engine.cutoff.unwrap_or_else(|| default_cutoff(&system)) }
            }
            EngineName::ResonantOnly => EngineKind::ResonantOnly,
        };
        Ok(Setup { system, layout, rabi, engine })
    }

    pub fn noise_spec(&self, amplitude: f64) -> anyhow::Result<NoiseSpec> {
        let n = &self.noise;
        let spec = NoiseSpec::new(n.channel, n.mode, amplitude, n.seed).map_err(|e| bad(format!("noise: {e}")))?;
        Ok(NoiseSpec { per_spin: n.per_spin, ..spec })
    }

    pub fn reference(&self, setup: &Setup, fallback: ReferenceName) -> ReferenceMode {
        match self.output.reference.unwrap_or(fallback) {
            ReferenceName::NoiselessPulses => ReferenceMode::NoiselessPulses,
            ReferenceName::ResonantOnly => ReferenceMode::ResonantOnly,
            ReferenceName::Target => ReferenceMode::TargetState(setup.layout.embed(self.algorithm.target).0),
        }
    }
}

impl Setup {
    pub fn program(&self, config: &RunConfig) -> ising_grover::Result<PulseProgram> {
        let compiler = GroverCompiler::new(&self.system, self.layout.clone(), self.rabi)?;
        let target = self.layout.embed(config.algorithm.target);
        match config.algorithm.steps {
            Some(s) => compiler.program_with_steps(target, s),
            None => compiler.program(target),
        }
    }
}

/// `block.field=value`, where `value` is read as a TOML value and falls back
/// to a bare string (`noise.mode=random`).
fn apply_override(doc: &mut toml::Table, text: &str) -> anyhow::Result<()> {
    let (key, raw) = text.split_once('=').ok_or_else(|| bad(format!("override `{text}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(bad(format!("override `{text}` has an empty key segment")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = path.split_last().expect("non-empty key");
    let mut table = doc;
    for p in parents {
        let entry = table.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| bad(format!("override `{text}`: `{p}` is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}
