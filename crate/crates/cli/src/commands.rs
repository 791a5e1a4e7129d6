//! `run`, `compare` and `paths` subcommands.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anc_core::csvio::{format_f64, write_path_csv};
use anc_core::export::write_run_csv;
use anc_core::{run_simulation, FirPath, Metrics, RunResult, SimConfig};
use anyhow::{anyhow, Context};
use serde::Serialize;

use crate::config::{preset, ExperimentFile};
use crate::svg::{self, Plot, Series};

/// Failure carrying the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing configuration, unknown names, unusable output dir: 2.
    Config(anyhow::Error),
    /// Anything else (I/O while writing results): 1.
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Other(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) | CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(err: anyhow::Error) -> Self {
        CliError::Other(err)
    }
}

/// What a command did when it did not fail outright.
#[derive(Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Results were written, but these experiments diverged (exit 3).
    Diverged(Vec<String>),
}

impl Status {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Status::Ok => ExitCode::SUCCESS,
            Status::Diverged(_) => ExitCode::from(3),
        }
    }

    fn from_runs<'a>(runs: impl IntoIterator<Item = (&'a String, &'a RunResult)>) -> Status {
        let diverged: Vec<String> = runs
            .into_iter()
            .filter(|(_, r)| r.diverged)
            .map(|(n, _)| n.clone())
            .collect();
        if diverged.is_empty() {
            Status::Ok
        } else {
            Status::Diverged(diverged)
        }
    }
}

/// Where experiments come from and where results go.
#[derive(Debug, Clone)]
pub struct Selection {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl Selection {
    fn experiments(&self) -> Result<ExperimentFile, CliError> {
        let mut file = match (&self.config, &self.preset) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(anyhow!(
                    "--config and --preset are mutually exclusive"
                )))
            }
            (Some(path), None) => ExperimentFile::load(path),
            (None, Some(name)) => preset(name),
            (None, None) => preset("paper"),
        }
        .map_err(CliError::Config)?;
        if let Some(seed) = self.seed {
            file.set_seed(seed);
        }
        Ok(file)
    }

    /// Creates the output directory if its parent exists.
    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = self.out.as_path();
        if dir.is_dir() {
            return Ok(dir);
        }
        let parent_ok = match dir.parent() {
            Some(p) if p.as_os_str().is_empty() => true,
            Some(p) => p.is_dir(),
            None => false,
        };
        if !parent_ok {
            return Err(CliError::Config(anyhow!(
                "output directory {} has no existing parent",
                dir.display()
            )));
        }
        fs::create_dir(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(CliError::Config)?;
        Ok(dir)
    }
}

/// Runs experiments concurrently; results come back in input order.
fn run_all(configs: Vec<(String, SimConfig)>) -> Result<Vec<(String, RunResult)>, CliError> {
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|(_, cfg)| scope.spawn(move || run_simulation(cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    configs
        .into_iter()
        .zip(results)
        .map(|((name, _), result)| {
            result
                .map(|r| (name.clone(), r))
                .with_context(|| format!("experiment `{name}`"))
                .map_err(CliError::Config)
        })
        .collect()
}

fn create(path: &Path) -> anyhow::Result<BufWriter<fs::File>> {
    let file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    name: &'a str,
    controller: &'a str,
    sample_rate_hz: f64,
    samples: usize,
    seed: u64,
    diverged: bool,
    metrics: &'a Metrics,
}

fn describe(name: &str, r: &RunResult) -> String {
    let nr = r
        .metrics
        .noise_reduction_db
        .map_or("n/a".to_string(), |v| format!("{v:.2} dB"));
    let conv = r
        .metrics
        .convergence_time_s
        .map_or("never".to_string(), |t| format!("{t:.4} s"));
    let flag = if r.diverged { " [diverged]" } else { "" };
    format!("{name}: final-window reduction {nr}, convergence {conv}{flag}")
}

pub fn cmd_run(sel: &Selection) -> Result<Status, CliError> {
    let file = sel.experiments()?;
    let out = sel.out_dir()?;
    let configs: Vec<_> = file.experiments.clone().into_iter().collect();
    let runs = run_all(configs)?;
    for (name, result) in &runs {
        let cfg = &file.experiments[name];
        let mut csv = create(&out.join(format!("{name}.csv")))?;
        write_run_csv(result, &mut csv).map_err(|e| anyhow!(e))?;
        csv.flush().context("flushing trace")?;
        write_json(
            &out.join(format!("{name}.summary.json")),
            &RunSummary {
                name,
                controller: cfg.controller.kind(),
                sample_rate_hz: cfg.sample_rate_hz,
                samples: result.error_trace.len(),
                seed: cfg.seed,
                diverged: result.diverged,
                metrics: &result.metrics,
            },
        )?;
        println!("{}", describe(name, result));
    }
    Ok(Status::from_runs(runs.iter().map(|(n, r)| (n, r))))
}

#[derive(Serialize)]
struct CompareEntry<'a> {
    name: &'a str,
    controller: &'a str,
    noise_reduction_db: Option<f64>,
    convergence_time_s: Option<f64>,
    diverged: bool,
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    final_window_s: f64,
    convergence_threshold_db: f64,
    experiments: Vec<CompareEntry<'a>>,
}

pub fn cmd_compare(sel: &Selection) -> Result<Status, CliError> {
    let file = sel.experiments()?;
    let names = file.comparison();
    if names.len() < 2 {
        return Err(CliError::Config(anyhow!(
            "compare needs at least two experiments, got {}",
            names.len()
        )));
    }
    for name in &names {
        if !file.experiments.contains_key(name) {
            return Err(CliError::Config(anyhow!("experiment `{name}` not found")));
        }
    }
    let mut unique: Vec<String> = names.clone();
    unique.sort();
    unique.dedup();
    let runs = run_all(
        unique
            .iter()
            .map(|n| (n.clone(), file.experiments[n].clone()))
            .collect(),
    )?;
    let lookup = |name: &str| {
        &runs
            .iter()
            .find(|(n, _)| n == name)
            .expect("ran every name")
            .1
    };

    let first = lookup(&names[0]);
    let len = first.error_trace.len();
    let fs = first.error_trace.sample_rate_hz();
    for name in &names {
        let r = lookup(name);
        if r.error_trace.len() != len || r.error_trace.sample_rate_hz() != fs {
            return Err(CliError::Config(anyhow!(
                "experiment `{name}` differs in length or sample rate from `{}`",
                names[0]
            )));
        }
    }
    let out = sel.out_dir()?;

    let mut csv = create(&out.join("compare.csv"))?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(names.iter().map(|n| format!("e_{n}")))
        .collect();
    writeln!(csv, "{}", header.join(",")).context("writing compare.csv")?;
    let traces: Vec<&[f64]> = names
        .iter()
        .map(|n| lookup(n).error_trace.samples())
        .collect();
    for k in 0..len {
        let mut row = format_f64(k as f64 / fs);
        for trace in &traces {
            row.push(',');
            row.push_str(&format_f64(trace[k]));
        }
        writeln!(csv, "{row}").context("writing compare.csv")?;
    }
    csv.flush().context("writing compare.csv")?;

    let summary = CompareSummary {
        final_window_s: first.metrics.final_window_s,
        convergence_threshold_db: first.metrics.convergence_threshold_db,
        experiments: names
            .iter()
            .map(|n| {
                let r = lookup(n);
                CompareEntry {
                    name: n,
                    controller: file.experiments[n].controller.kind(),
                    noise_reduction_db: r.metrics.noise_reduction_db,
                    convergence_time_s: r.metrics.convergence_time_s,
                    diverged: r.diverged,
                }
            })
            .collect(),
    };
    write_json(&out.join("compare.summary.json"), &summary)?;

    let plot = Plot {
        title: format!("Error signals: {}", names.join(" vs ")),
        x_label: "time (s)".into(),
        y_label: "amplitude".into(),
        series: names
            .iter()
            .map(|n| {
                let r = lookup(n);
                Series {
                    label: n.clone(),
                    points: r
                        .error_trace
                        .samples()
                        .iter()
                        .enumerate()
                        .map(|(k, &e)| (k as f64 / fs, e))
                        .collect(),
                }
            })
            .collect(),
    };
    write_text(&out.join("compare.svg"), &svg::render(&plot))?;

    for name in &names {
        println!("{}", describe(name, lookup(name)));
    }
    Ok(Status::from_runs(names.iter().map(|n| (n, lookup(n)))))
}

fn path_plot(title: String, path: &FirPath) -> Plot {
    Plot {
        title,
        x_label: "tap".into(),
        y_label: "amplitude".into(),
        series: vec![Series {
            label: "impulse response".into(),
            points: path
                .coefficients()
                .iter()
                .enumerate()
                .map(|(k, &c)| (k as f64, c))
                .collect(),
        }],
    }
}

/// Writes `<name>.primary.{csv,svg}` and `<name>.secondary.{csv,svg}`,
/// skipping experiments whose paths repeat an earlier one.
pub fn cmd_paths(sel: &Selection) -> Result<Status, CliError> {
    let file = sel.experiments()?;
    let mut built = Vec::new();
    for (name, cfg) in &file.experiments {
        let (primary, secondary, _) = cfg
            .paths()
            .with_context(|| format!("experiment `{name}`"))
            .map_err(CliError::Config)?;
        built.push((name, primary, secondary));
    }
    let out = sel.out_dir()?;
    let mut written: Vec<(&FirPath, &FirPath)> = Vec::new();
    for (name, primary, secondary) in &built {
        if written
            .iter()
            .any(|(p, s)| p == &primary && s == &secondary)
        {
            continue;
        }
        for (role, path) in [("primary", primary), ("secondary", secondary)] {
            let mut csv = create(&out.join(format!("{name}.{role}.csv")))?;
            write_path_csv(path, &mut csv).map_err(|e| anyhow!(e))?;
            csv.flush().context("flushing path csv")?;
            let plot = path_plot(format!("{name}: {role} path"), path);
            write_text(&out.join(format!("{name}.{role}.svg")), &svg::render(&plot))?;
            println!("{name}: {role} path, {} taps", path.len());
        }
        written.push((primary, secondary));
    }
    Ok(Status::Ok)
}
