use std::path::PathBuf;
use std::process::ExitCode;

use beamsel::bounds::{excess_risk_bound, log_binomial, vc_probability_bound, BoundInputs};
use beamsel::experiment::{
    emit_report, render_csv, render_markdown, run_experiment, ExperimentConfig, OutputSpec, ReportFormat, Source,
};
use beamsel::simgen::{generate, SimConfig, Setting};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "beamsel", version, about = "Wrapper feature selection by beam search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunFlags {
    /// Experiment config (TOML).
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Report file; `.csv` selects CSV, anything else Markdown.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Sim1,
    Sim2,
    Sim3,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation experiment.
    Simulate {
        #[command(flatten)]
        run: RunFlags,
        /// Overrides the replication count.
        #[arg(long)]
        replications: Option<usize>,
    },
    /// Run a cross-validated experiment on a CSV dataset.
    Dataset {
        #[command(flatten)]
        run: RunFlags,
        /// Overrides the dataset path.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Evaluate the deviation and excess-risk bounds.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        /// VC dimension of the classifier family (Sauer's lemma).
        #[arg(long, conflicts_with = "log_shatter")]
        vc_dim: Option<u64>,
        /// Natural log of the shatter coefficient.
        #[arg(long)]
        log_shatter: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Write a simulated train/test pair as CSV.
    Gen {
        #[arg(value_enum)]
        which: Which,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Signal columns (simulation 1 only).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving train.csv and test.csv.
        #[arg(long)]
        output: PathBuf,
        /// Accepted for uniformity; generation is single-threaded.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn run_config(mut cfg: ExperimentConfig, flags: &RunFlags) -> Result<(), String> {
    if let Some(seed) = flags.seed {
        cfg.master_seed = seed;
    }
    if flags.threads.is_some() {
        cfg.threads = flags.threads;
    }
    if let Some(path) = &flags.output {
        cfg.output = Some(OutputSpec {
            path: path.clone(),
            format: None,
        });
    }
    if let (Some(out), Some(f)) = (&mut cfg.output, flags.format) {
        out.format = Some(f.into());
    }
    let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    match &cfg.output {
        Some(out) => {
            emit_report(&report, &out.path, out.format()).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", out.path.display());
        }
        None => match flags.format.map(ReportFormat::from).unwrap_or_default() {
            ReportFormat::Csv => print!("{}", render_csv(&report)),
            ReportFormat::Markdown => print!("{}", render_markdown(&report)),
        },
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, String> {
    ExperimentConfig::from_toml_file(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Simulate { run, replications } => {
            let mut cfg = load(&run.config)?;
            match &mut cfg.source {
                Source::Simulation { replications: r, .. } => {
                    if let Some(n) = replications {
                        *r = n;
                    }
                }
                Source::Csv { .. } => return Err("config describes a CSV dataset; use `dataset`".into()),
            }
            run_config(cfg, &run)
        }
        Command::Dataset { run, data } => {
            let mut cfg = load(&run.config)?;
            match &mut cfg.source {
                Source::Csv { path, .. } => {
                    if let Some(d) = data {
                        *path = d;
                    }
                }
                Source::Simulation { .. } => return Err("config describes a simulation; use `simulate`".into()),
            }
            run_config(cfg, &run)
        }
        Command::Bounds {
            n,
            p,
            d,
            vc_dim,
            log_shatter,
            epsilon,
        } => {
            let inputs = match (vc_dim, log_shatter) {
                (Some(v), _) => BoundInputs::with_vc_dimension(n, p, d, v, epsilon),
                (None, Some(s)) => BoundInputs::new(n, p, d, s, epsilon),
                (None, None) => return Err("one of --vc-dim or --log-shatter is required".into()),
            }
            .map_err(|e| e.to_string())?;
            println!("ln C(p,d)          {:.10}", log_binomial(p, d).map_err(|e| e.to_string())?);
            println!("ln S(C,n)          {:.10}", inputs.log_shatter());
            println!("probability bound  {:.10e}", vc_probability_bound(&inputs));
            println!("excess risk bound  {:.10}", excess_risk_bound(&inputs));
            Ok(())
        }
        Command::Gen {
            which,
            n,
            p,
            m,
            seed,
            output,
            threads: _,
        } => {
            let setting = match which {
                Which::Sim1 => {
                    let Setting::Sim1 { n: n0, p: p0, m: m0 } = Setting::sim1() else { unreachable!() };
                    Setting::Sim1 {
                        n: n.unwrap_or(n0),
                        p: p.unwrap_or(p0),
                        m: m.unwrap_or(m0),
                    }
                }
                Which::Sim2 | Which::Sim3 => {
                    if m.is_some() {
                        return Err("--m only applies to sim1".into());
                    }
                    let (n, p) = (n.unwrap_or(500), p.unwrap_or(10));
                    match which {
                        Which::Sim2 => Setting::Sim2 { n, p },
                        _ => Setting::Sim3 { n, p },
                    }
                }
            };
            let pair = generate::<f64>(&SimConfig::new(setting, seed)).map_err(|e| e.to_string())?;
            pair.write_csv(&output).map_err(|e| e.to_string())?;
            eprintln!("wrote {}", output.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
