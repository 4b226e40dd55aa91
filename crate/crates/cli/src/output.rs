//! CSV writers and gnuplot scripts. All numbers go out with ten significant
//! digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ising_grover::numfmt::sig10;
use ising_grover::{DecayModel, FitResult, GateLabel, PulseProgram, SweepPoint};
use serde::Deserialize;

pub const TRACE_HEADER: [&str; 4] = ["pulse_index", "time_tph", "fidelity", "gate_label"];
pub const SWEEP_HEADER: [&str; 4] = ["epsilon", "f_end", "sigma", "n_rep"];
pub const FIT_HEADER: [&str; 8] =
    ["model", "baseline", "eps2", "eps1", "sigma_baseline", "sigma_eps2", "sigma_eps1", "chi2_reduced"];

fn writer(path: &Path) -> anyhow::Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> anyhow::Result<()> {
    w.flush().with_context(|| format!("writing {}", path.display()))
}

/// Row 0 is the initial state and carries the label `start`; row `j + 1`
/// follows pulse `j`.
pub fn write_trace(path: &Path, program: &PulseProgram, times: &[f64], fidelity: &[f64]) -> anyhow::Result<()> {
    let labels = program.pulse_labels();
    let mut w = writer(path)?;
    w.write_record(TRACE_HEADER)?;
    for (i, (t, f)) in times.iter().zip(fidelity).enumerate() {
        let label = if i == 0 { "start".to_string() } else { labels[i - 1].to_string() };
        w.write_record([i.to_string(), sig10(*t), sig10(*f), label])?;
    }
    finish(w, path)
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    w.write_record(SWEEP_HEADER)?;
    for p in points {
        w.write_record([sig10(p.epsilon), sig10(p.f_end), sig10(p.sigma), p.n_rep.to_string()])?;
    }
    finish(w, path)
}

#[derive(Debug, Deserialize)]
struct SweepRow {
    epsilon: f64,
    f_end: f64,
    sigma: f64,
    n_rep: usize,
}

pub fn read_sweep(path: &Path) -> anyhow::Result<Vec<SweepPoint>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            let row: SweepRow = row.with_context(|| format!("{}: record {}", path.display(), i + 1))?;
            Ok(SweepPoint { epsilon: row.epsilon, f_end: row.f_end, sigma: row.sigma, n_rep: row.n_rep })
        })
        .collect()
}

pub fn write_fits(path: &Path, fits: &[FitResult]) -> anyhow::Result<()> {
    let mut w = writer(path)?;
    w.write_record(FIT_HEADER)?;
    for f in fits {
        let (p, s) = (&f.params, &f.sigma);
        w.write_record([
            f.model.name().to_string(),
            sig10(p.baseline),
            sig10(p.eps2),
            sig10(p.eps1),
            sig10(s.baseline),
            sig10(s.eps2),
            sig10(s.eps1),
            sig10(f.chi2_reduced),
        ])?;
    }
    finish(w, path)
}

fn write_script(path: &Path, text: &str) -> anyhow::Result<PathBuf> {
    let script = path.with_extension("gp");
    fs::write(&script, text).with_context(|| format!("writing {}", script.display()))?;
    Ok(script)
}

/// Fidelity against time with a shaded bar under every oracle and
/// conditional reflection.
pub fn trace_script(csv_path: &Path, program: &PulseProgram, times: &[f64]) -> anyhow::Result<PathBuf> {
    let mut s =
        String::from("set datafile separator ','\nset xlabel 't / t_ph'\nset ylabel 'F'\nset yrange [0:1.05]\n");
    for (i, m) in program.markers().iter().enumerate() {
        let colour = match m.label {
            GateLabel::Oracle(_) => "#f4a582",
            GateLabel::ConditionalReflection => "#92c5de",
            _ => continue,
        };
        s.push_str(&format!(
            "set object {} rect from {},0 to {},0.04 fc rgb '{colour}' fs solid noborder\n",
            i + 1,
            sig10(times[m.range.start]),
            sig10(times[m.range.end]),
        ));
    }
    let name = csv_path.file_name().unwrap_or_default().to_string_lossy();
    s.push_str(&format!("plot '{name}' every ::1 using 2:3 with lines title 'F(t)'\n"));
    write_script(csv_path, &s)
}

/// Sweep points with error bars and the fitted curves.
pub fn fit_script(fit_path: &Path, sweep_path: &Path, fits: &[FitResult]) -> anyhow::Result<PathBuf> {
    let mut s =
        String::from("set datafile separator ','\nset xlabel 'epsilon'\nset ylabel 'F_end'\nset yrange [0:1.05]\n");
    let mut plots = vec![format!("'{}' every ::1 using 1:2:3 with yerrorbars title 'F_end'", sweep_path.display())];
    for f in fits {
        let p = &f.params;
        let (b, q, r) = (sig10(p.baseline), sig10(1.0 / (p.eps2 * p.eps2)), sig10(1.0 / p.eps1));
        let expr = match f.model {
            DecayModel::ExpGauss => format!("{b} + (1 - {b})*exp(-{q}*x**2 - {r}*x)"),
            DecayModel::Algebraic => format!("{b} + (1 - {b})/sqrt(1 + {q}*x**2 + {r}*x)"),
        };
        plots.push(format!("{expr} title '{}'", f.model.name()));
    }
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    write_script(fit_path, &s)
}
