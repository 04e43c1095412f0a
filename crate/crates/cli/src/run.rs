use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use ergodic_jacobi::bounds::{Analysis, Report};
use ergodic_jacobi::cocycle::{lyapunov_curve, LyapunovCurve};
use ergodic_jacobi::contfrac::Convergent;
use ergodic_jacobi::io::{format_float, write_curve, write_dos, write_intervals, write_measure};
use ergodic_jacobi::potential::{capacity, equilibrium_measure, Equilibrium};
use ergodic_jacobi::spectrum::{dos_measure, spectrum_approx, SpectralMeasure, SpectrumApprox, SpectrumMethod};
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Lyapunov exponent on a real grid (lyapunov.csv)
    Lyapunov,
    /// Density of states histogram (dos.csv)
    Dos,
    /// Interval approximation of the spectrum (spectrum.csv)
    Spectrum,
    /// Capacity and equilibrium measure of the spectrum (equilibrium.csv)
    Capacity,
    /// Every bound check (report.json, summary.csv)
    Check,
    /// All of the above
    All,
}

/// What a successful run found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// `Some(false)` when a bound check failed.
    pub bounds_hold: Option<bool>,
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: Command,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    lyapunov: Option<CurveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dos: Option<DosSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<SpectrumSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    capacity: Option<CapacitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_hold: Option<bool>,
}

#[derive(Serialize)]
struct CurveSummary {
    points: usize,
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct DosSummary {
    bins: usize,
    support: (f64, f64),
    eigenvalues: usize,
}

#[derive(Serialize)]
struct SpectrumSummary {
    method: SpectrumMethod,
    gap_tol: f64,
    convergents: Vec<Convergent>,
    intervals: usize,
    measure: f64,
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct CapacitySummary {
    value: f64,
    energy: f64,
    flatness: f64,
    energy_gap: f64,
    iterations: usize,
    cells: usize,
}

/// Runs `command` for the configuration at `config_path`. Output goes to
/// `out`, else the config's `output_dir`, else the current directory.
pub fn run(command: Command, config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<Outcome> {
    let config = RunConfig::load(config_path)?.resolve(seed);
    let dir: PathBuf = out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    run_config(command, &config, &dir)
}

pub fn run_config(command: Command, config: &RunConfig, dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let model = &config.model;
    let mut report = RunReport {
        command,
        config,
        lyapunov: None,
        dos: None,
        spectrum: None,
        capacity: None,
        checks: None,
        all_hold: None,
    };

    if matches!(command, Command::Lyapunov | Command::All) {
        let curve = lyapunov_curve(model, &config.curve_grid(), &config.lyapunov)?;
        write_artifact(dir, "lyapunov.csv", |w| Ok(write_curve(w, &curve)?))?;
        report.lyapunov = Some(curve_summary(&curve));
        println!(
            "lyapunov: {} points, L in [{}, {}]",
            curve.len(),
            report.lyapunov.as_ref().unwrap().min,
            report.lyapunov.as_ref().unwrap().max
        );
    }

    let analysis = if matches!(command, Command::Check | Command::All) {
        Some(Analysis::new(model, &config.bound_settings())?)
    } else {
        None
    };

    if matches!(command, Command::Dos | Command::All) {
        let dos = match &analysis {
            Some(a) => a.dos.clone(),
            None => dos_measure(model, &config.dos)?,
        };
        write_artifact(dir, "dos.csv", |w| Ok(write_dos(w, &dos)?))?;
        report.dos = Some(dos_summary(&dos));
        println!(
            "dos: {} bins over [{}, {}]",
            dos.n_bins(),
            dos.support().0,
            dos.support().1
        );
    }

    let needs_spectrum = matches!(command, Command::Spectrum | Command::Capacity | Command::All);
    let spectrum = match (&analysis, needs_spectrum) {
        (Some(a), _) => Some(a.spectrum.clone()),
        (None, true) => Some(spectrum_approx(model, &config.spectrum)?),
        (None, false) => None,
    };
    if matches!(command, Command::Spectrum | Command::All) {
        let s = spectrum.as_ref().expect("computed above");
        write_artifact(dir, "spectrum.csv", |w| Ok(write_intervals(w, &s.set)?))?;
        report.spectrum = Some(spectrum_summary(s));
        println!("spectrum: {} intervals, measure {}", s.set.len(), s.set.measure());
    }

    if matches!(command, Command::Capacity | Command::All) {
        let s = spectrum.as_ref().expect("computed above");
        let eq = match &analysis {
            Some(a) => a.equilibrium.clone(),
            None => equilibrium_measure(&s.set, &config.equilibrium)?,
        };
        let value = capacity(&s.set, &config.equilibrium)?;
        write_artifact(dir, "equilibrium.csv", |w| Ok(write_measure(w, &eq.measure)?))?;
        report.capacity = Some(capacity_summary(value, &eq));
        println!("capacity: {value}");
    }

    if let Some(a) = &analysis {
        let checks = a.report()?;
        let hold = checks.all_hold();
        write_artifact(dir, "summary.csv", |w| write_summary(w, &checks))?;
        for c in &checks.checks {
            println!(
                "{:<24} {:>12.6} {} {:<12.6} {}",
                c.name,
                c.lhs,
                c.relation,
                c.rhs,
                if c.holds { "holds" } else { "FAILS" }
            );
        }
        report.checks = Some(checks);
        report.all_hold = Some(hold);
    }

    let json = serde_json::to_string_pretty(&report)?;
    write_artifact(dir, "report.json", |w| Ok(w.write_all(json.as_bytes())?))?;
    Ok(Outcome {
        bounds_hold: report.all_hold,
    })
}

fn curve_summary(c: &LyapunovCurve) -> CurveSummary {
    CurveSummary {
        points: c.len(),
        min: c.values.iter().copied().fold(f64::INFINITY, f64::min),
        max: c.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn dos_summary(d: &SpectralMeasure) -> DosSummary {
    DosSummary {
        bins: d.n_bins(),
        support: d.support(),
        eigenvalues: d.n_eigenvalues_total,
    }
}

fn spectrum_summary(s: &SpectrumApprox) -> SpectrumSummary {
    SpectrumSummary {
        method: s.method,
        gap_tol: s.gap_tol,
        convergents: s.convergents.clone(),
        intervals: s.set.len(),
        measure: s.set.measure(),
        min: s.set.min().unwrap_or(f64::NAN),
        max: s.set.max().unwrap_or(f64::NAN),
    }
}

fn capacity_summary(value: f64, eq: &Equilibrium) -> CapacitySummary {
    CapacitySummary {
        value,
        energy: eq.energy,
        flatness: eq.flatness,
        energy_gap: eq.energy_gap,
        iterations: eq.iterations,
        cells: eq.measure.len(),
    }
}

fn write_summary(w: &mut dyn Write, report: &Report) -> Result<()> {
    writeln!(w, "name,lhs,relation,rhs,holds,slack,tolerance")?;
    for c in &report.checks {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            c.name,
            format_float(c.lhs),
            c.relation,
            format_float(c.rhs),
            c.holds,
            format_float(c.slack),
            format_float(c.tolerance)
        )?;
    }
    Ok(())
}

/// Writes `dir/name` through a temporary file in the same directory, so
/// readers never observe a partial artifact.
fn write_artifact(dir: &Path, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        body(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(&target)
        .with_context(|| format!("cannot create {}", target.display()))?;
    Ok(())
}
