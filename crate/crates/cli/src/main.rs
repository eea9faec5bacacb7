use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use perfect_code::code::LogicalAmplitudes;
use perfect_code::noise::TphiMode;
use perfect_code_cli::experiments::{self, COMPILED_CIRCUIT_FILE};
use perfect_code_cli::{report, ExperimentConfig, NoiseSetting, ResultRecord};

#[derive(Parser)]
#[command(name = "qec5", version, about = "Five-qubit code experiments")]
struct Cli {
    /// TOML config, or a result record to re-run from its snapshot.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shots per setting; enables sampled estimation.
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true, value_enum)]
    noise: Option<NoiseArg>,
    #[arg(long = "tphi-mode", global = true, value_enum)]
    tphi_mode: Option<TphiArg>,
    /// Output directory for records.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Off,
    #[value(name = "paper")]
    Device,
    LongT2,
}

#[derive(Clone, Copy, ValueEnum)]
enum TphiArg {
    PureDephasing,
    T2star,
}

#[derive(Subcommand)]
enum Command {
    /// Encode logical states and measure their stabilizer expectations.
    Prepare {
        /// One of 0, 1, +, -, +i, -i, T, or `all`; repeatable.
        #[arg(long = "state", default_value = "all", allow_hyphen_values = true)]
        states: Vec<String>,
    },
    /// Inject Pauli errors into |T>_L and record the syndromes.
    SyndromeGrid {
        /// Error weight, 1 or 2; repeatable.
        #[arg(long = "weight", default_values_t = [1, 2])]
        weights: Vec<usize>,
    },
    /// Process tomography of a transversal logical Pauli.
    LogicalQpt {
        /// X, Y, Z or `all`; repeatable.
        #[arg(long = "gate", default_value = "all")]
        gates: Vec<String>,
    },
    /// Encode then decode the four tomography inputs.
    Decode,
    /// Recompile the encoder onto CZ gates.
    Compile,
    /// Summarize the records in a directory (default: the output directory).
    Report { dir: Option<PathBuf> },
}

fn load_config(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(shots) = cli.shots {
        cfg.shots = shots;
        cfg.sampled = true;
    }
    if let Some(n) = cli.noise {
        cfg.noise = match n {
            NoiseArg::Off => NoiseSetting::Off,
            NoiseArg::Device => NoiseSetting::Device,
            NoiseArg::LongT2 => NoiseSetting::LongT2,
        };
    }
    if let Some(m) = cli.tphi_mode {
        cfg.tphi_mode = match m {
            TphiArg::PureDephasing => TphiMode::PureDephasing,
            TphiArg::T2star => TphiMode::T2star,
        };
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn expand(list: &[String], all: &[&str]) -> Vec<String> {
    list.iter()
        .flat_map(|s| if s == "all" { all.iter().map(|a| a.to_string()).collect() } else { vec![s.clone()] })
        .collect()
}

fn emit(rec: &ResultRecord, out: &Path) -> anyhow::Result<()> {
    let path = rec.write(out)?;
    let metrics: Vec<String> = rec.metrics.iter().take(4).map(|m| format!("{}={:.4}", m.name, m.value)).collect();
    println!("{}  {}", path.display(), metrics.join(" "));
    Ok(())
}

/// Runs every requested job; failures are reported and counted, not fatal
/// to the jobs after them.
fn run(cli: &Cli) -> anyhow::Result<usize> {
    let cfg = load_config(cli)?;
    let mut failures = 0;
    let mut check = |what: String, r: anyhow::Result<()>| {
        if let Err(e) = r {
            eprintln!("error: {what}: {e:#}");
            failures += 1;
        }
    };
    match &cli.command {
        Command::Prepare { states } => {
            for s in expand(states, &LogicalAmplitudes::NAMES) {
                check(format!("prepare {s}"), experiments::prepare(&s, &cfg).map_err(Into::into).and_then(|r| emit(&r, &cfg.out)));
            }
        }
        Command::SyndromeGrid { weights } => {
            for &w in weights {
                check(format!("syndrome-grid {w}"), experiments::syndrome_grid(w, &cfg).map_err(Into::into).and_then(|r| emit(&r, &cfg.out)));
            }
        }
        Command::LogicalQpt { gates } => {
            for g in expand(gates, &["X", "Y", "Z"]) {
                check(format!("logical-qpt {g}"), experiments::logical_qpt(&g, &cfg).map_err(Into::into).and_then(|r| emit(&r, &cfg.out)));
            }
        }
        Command::Decode => {
            check("decode".into(), experiments::decode_experiment(&cfg).map_err(Into::into).and_then(|r| emit(&r, &cfg.out)));
        }
        Command::Compile => {
            let result = experiments::compile(&cfg).map_err(anyhow::Error::from).and_then(|(rec, text)| {
                std::fs::create_dir_all(&cfg.out)?;
                std::fs::write(cfg.out.join(COMPILED_CIRCUIT_FILE), text)?;
                emit(&rec, &cfg.out)
            });
            check("compile".into(), result);
        }
        Command::Report { dir } => {
            let dir = dir.clone().unwrap_or_else(|| cfg.out.clone());
            let result = report::report(&dir).map_err(anyhow::Error::from).map(|s| {
                println!("{}: {} ({} records)", dir.join(report::REPORT_DIR).display(), s.status, s.records);
                for (k, v) in &s.averages {
                    println!("  average fidelity {k}: {v:.4}");
                }
            });
            check("report".into(), result);
        }
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
