mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use ising_grover::numfmt::sig;
use ising_grover::{fit_decay, run_ensemble, run_sweep, DecayModel, Error, FitPoint};

use config::{ConfigError, ReferenceName, RunConfig};

/// Pulse-level Grover search on an Ising spin chain.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override a config field, e.g. `--set noise.epsilon=0.02`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Worker threads for ensembles (default: all cores).
    #[arg(long, env = "ISING_GROVER_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the transition table and any frequency collisions.
    Validate {
        /// Collision distance; defaults to 2J'.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Dump the compiled pulse table.
    Compile {
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// One ensemble at `noise.epsilon`; writes trace.csv.
    Run,
    /// Ensembles over `noise.epsilons`; writes sweep.csv.
    Sweep,
    /// Fit decay models to a sweep; writes fit.csv.
    Fit {
        /// Sweep CSV; defaults to `<output.dir>/sweep.csv`.
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModelArg::Both)]
        model: ModelArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    ExpGauss,
    Algebraic,
    Both,
}

impl ModelArg {
    fn models(self) -> Vec<DecayModel> {
        match self {
            ModelArg::ExpGauss => vec![DecayModel::ExpGauss],
            ModelArg::Algebraic => vec![DecayModel::Algebraic],
            ModelArg::Both => vec![DecayModel::ExpGauss, DecayModel::Algebraic],
        }
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<ConfigError>() { EXIT_CONFIG } else { EXIT_RUNTIME })
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting the thread pool")?;
    }
    let config = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    match &cli.command {
        Command::Validate { tolerance } => validate(&config, *tolerance),
        Command::Compile { out } => compile(&config, out.as_deref()),
        Command::Run => run(&config),
        Command::Sweep => sweep(&config),
        Command::Fit { input, model } => fit(&config, input.as_deref(), *model),
    }
}

fn validate(config: &RunConfig, tolerance: Option<f64>) -> anyhow::Result<ExitCode> {
    let setup = config.setup()?;
    let system = &setup.system;
    let tol = tolerance.unwrap_or_else(|| system.default_spectrum_tolerance());
    if tol.is_nan() || tol <= 0.0 {
        return Err(ConfigError(format!("--tolerance {tol} must be positive")).into());
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "# qubit mu nu frequency")?;
    for label in system.all_transitions() {
        let f = system.transition_frequency(label)?;
        writeln!(out, "{} {} {} {}", label.qubit, label.mu, label.nu, sig(f, 10))?;
    }
    let collisions = system.validate_spectrum(tol);
    writeln!(out, "# collisions within {}: {}", sig(tol, 4), collisions.len())?;
    for (a, b) in &collisions {
        let (fa, fb) = (system.transition_frequency(*a)?, system.transition_frequency(*b)?);
        writeln!(out, "collision {a} {} {b} {}", sig(fa, 10), sig(fb, 10))?;
    }
    Ok(if collisions.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
}

fn compile(config: &RunConfig, out: Option<&std::path::Path>) -> anyhow::Result<ExitCode> {
    let setup = config.setup()?;
    let program = setup.program(config)?;
    let table = program.to_table();
    match out {
        Some(path) => std::fs::write(path, table).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(table.as_bytes())?,
    }
    eprintln!("{} pulses, {} gates, {} t_ph", program.len(), program.markers().len(), sig(program.total_time(), 6));
    Ok(ExitCode::SUCCESS)
}

fn run(config: &RunConfig) -> anyhow::Result<ExitCode> {
    let setup = config.setup()?;
    let program = setup.program(config)?;
    let noise = config.noise_spec(config.noise.epsilon)?;
    let reference = config.reference(&setup, ReferenceName::ResonantOnly);
    let n_rep = if noise.amplitude == 0.0 { 1 } else { config.noise.n_rep };
    let start = Instant::now();
    let result = run_ensemble(&setup.system, &program, setup.engine, &noise, n_rep, reference, config.output.trace)?;
    eprintln!("{} pulses, {} repetitions in {:.1} s", program.len(), n_rep, start.elapsed().as_secs_f64());
    if n_rep >= config.noise.groups {
        let est = result.estimate(config.noise.groups)?;
        println!("f_end {} sigma {}", sig(result.f_end, 10), sig(est.sigma, 4));
    } else {
        println!("f_end {}", sig(result.f_end, 10));
    }
    if let Some(curve) = result.mean_curve() {
        let path = config.output.dir.join("trace.csv");
        output::write_trace(&path, &program, &result.times, &curve)?;
        eprintln!("wrote {}", path.display());
        if config.output.plot_script {
            let script = output::trace_script(&path, &program, &result.times)?;
            eprintln!("wrote {}", script.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(config: &RunConfig) -> anyhow::Result<ExitCode> {
    if config.noise.epsilons.is_empty() {
        return Err(ConfigError("sweep needs noise.epsilons".into()).into());
    }
    let setup = config.setup()?;
    let program = setup.program(config)?;
    let noise = config.noise_spec(0.0)?;
    let reference = config.reference(&setup, ReferenceName::NoiselessPulses);
    let n = &config.noise;
    let start = Instant::now();
    let points = run_sweep(&setup.system, &program, setup.engine, &noise, &n.epsilons, n.n_rep, n.groups, reference)?;
    eprintln!("{} points x {} repetitions in {:.1} s", points.len(), n.n_rep, start.elapsed().as_secs_f64());
    let path = config.output.dir.join("sweep.csv");
    output::write_sweep(&path, &points)?;
    eprintln!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn fit(config: &RunConfig, input: Option<&std::path::Path>, model: ModelArg) -> anyhow::Result<ExitCode> {
    let input = input.map_or_else(|| config.output.dir.join("sweep.csv"), PathBuf::from);
    let sweep = output::read_sweep(&input)?;
    // a noiseless point carries no error bar and pins nothing the model
    // does not already fix at ε = 0
    let points: Vec<FitPoint> = sweep
        .iter()
        .filter(|p| p.sigma > 0.0)
        .map(|p| FitPoint { epsilon: p.epsilon, value: p.f_end, sigma: p.sigma })
        .collect();
    if points.len() < sweep.len() {
        eprintln!("skipped {} points without an error bar", sweep.len() - points.len());
    }
    let mut fits = Vec::new();
    let mut code = ExitCode::SUCCESS;
    for m in model.models() {
        match fit_decay(&points, m) {
            Ok(f) => fits.push(f),
            Err(Error::NonConvergence { iterations, best }) => {
                eprintln!("warning: {} fit stopped after {iterations} iterations; writing the best point", m.name());
                fits.push(*best);
                code = ExitCode::from(EXIT_RUNTIME);
            }
            Err(e) => return Err(e).with_context(|| format!("{} fit of {}", m.name(), input.display())),
        }
    }
    for f in &fits {
        println!(
            "{}: baseline {}({}) eps2 {}({}) eps1 {}({}) chi2_red {}",
            f.model.name(),
            sig(f.params.baseline, 4),
            sig(f.sigma.baseline, 2),
            sig(f.params.eps2, 4),
            sig(f.sigma.eps2, 2),
            sig(f.params.eps1, 4),
            sig(f.sigma.eps1, 2),
            sig(f.chi2_reduced, 4),
        );
    }
    let path = config.output.dir.join("fit.csv");
    output::write_fits(&path, &fits)?;
    eprintln!("wrote {}", path.display());
    if config.output.plot_script {
        let script = output::fit_script(&path, &input, &fits)?;
        eprintln!("wrote {}", script.display());
    }
    Ok(code)
}
