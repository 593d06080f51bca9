use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crossgram::benchmark::inverse_sylvester_procedure;
use crossgram::error::{Error, ErrorClass, Result, StageContext};
use crossgram::experiment::{
    emit_plot_data, load_reports, run_experiment, sweep_system, ExperimentConfig, ExperimentOutput, Orders,
};
use crossgram::gramian::GramianMethod;
use crossgram::matlib::csv::load_matrix;
use crossgram::reduce::ProjectionKind;
use crossgram::system::{LtiSystem, StabilityCheck, TimeGrid};

#[derive(Parser)]
#[command(name = "crossgram", version, about = "Cross Gramian model reduction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark system and write its matrices.
    Generate(Overrides),
    /// Generate a system, compute every Gramian and sweep reduced orders.
    Run(Overrides),
    /// Sweep reduced orders for a system read from A.csv, B.csv and C.csv.
    Sweep {
        /// Directory holding A.csv, B.csv and C.csv.
        system: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write plot tables and SVG charts from the error reports of a run.
    Plot {
        /// Output directory of a previous `run` or `sweep`.
        run_dir: PathBuf,
        /// Destination directory; defaults to `<run_dir>/plot`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Values given here replace those of the config file.
#[derive(Args)]
struct Overrides {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// State dimension N.
    #[arg(long)]
    order_dim: Option<usize>,
    /// Seed of the benchmark generator.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the Gaussian test input.
    #[arg(long)]
    noise_seed: Option<u64>,
    /// Lower end of the sampled cross-Gramian spectrum.
    #[arg(long)]
    a: Option<f64>,
    /// Upper end of the sampled cross-Gramian spectrum.
    #[arg(long)]
    b: Option<f64>,
    /// Simulation horizon T.
    #[arg(long)]
    tmax: Option<f64>,
    /// Time step h.
    #[arg(long)]
    dt: Option<f64>,
    /// Gramian variants, comma separated.
    #[arg(long, value_delimiter = ',')]
    gramian: Vec<GramianMethod>,
    /// Projection kind, e.g. `direct-truncation-left` or `evd-balancing`.
    #[arg(long)]
    projection: Option<ProjectionKind>,
    /// Reduced orders, e.g. `1..100` or `1,2,5..10`.
    #[arg(long)]
    orders: Option<Orders>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.order_dim {
            cfg.spec.n = n;
            if self.orders.is_none() && self.config.is_none() {
                cfg.orders = Orders::range(1, n.min(100))?;
            }
        }
        if let Some(v) = self.seed {
            cfg.spec.seed = v;
        }
        if let Some(v) = self.noise_seed {
            cfg.noise_seed = v;
        }
        if let Some(v) = self.a {
            cfg.spec.a = v;
        }
        if let Some(v) = self.b {
            cfg.spec.b = v;
        }
        if self.dt.is_some() || self.tmax.is_some() {
            let step = self.dt.unwrap_or(cfg.grid.step);
            let horizon = self.tmax.unwrap_or(cfg.grid.horizon());
            cfg.grid = TimeGrid::from_horizon(step, horizon)?.with_substeps(cfg.grid.substeps);
        }
        if !self.gramian.is_empty() {
            cfg.gramians = self.gramian.clone();
        }
        if let Some(p) = self.projection {
            cfg.projection = p;
        }
        if let Some(o) = &self.orders {
            cfg.orders = o.clone();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_system(dir: &Path) -> Result<LtiSystem> {
    let read = |name: &str| load_matrix(dir.join(name)).stage(format!("read {}", dir.join(name).display()));
    LtiSystem::with_stability(read("A.csv")?, read("B.csv")?, read("C.csv")?, StabilityCheck::Waive)
}

fn summarize(out: &ExperimentOutput, dir: &Path) {
    for v in &out.variants {
        let floor = v
            .report
            .rows
            .iter()
            .rposition(|r| r.l2_rel.is_nan() || r.l2_rel > 1e-8)
            .map_or(v.report.rows.first(), |i| v.report.rows.get(i + 1));
        let floor = floor.map_or("not reached".to_string(), |r| format!("n = {}", r.n));
        println!(
            "{:<17} gramian {:>8.2} s  residual {:.2e}  L2 below 1e-8 from {floor}",
            v.gramian.method.name(),
            v.gramian.wall_seconds,
            v.gramian.residual
        );
    }
    println!("wrote {} files to {}", out.files.len(), dir.display());
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(o) => {
            let cfg = o.resolve()?;
            let g = inverse_sylvester_procedure(&cfg.spec).stage("generate system")?;
            g.save(&cfg.output_dir).stage("write system")?;
            println!("wrote N={} M={} system to {}", cfg.spec.n, cfg.spec.m, cfg.output_dir.display());
        }
        Command::Run(o) => {
            let cfg = o.resolve()?;
            let out = run_experiment(&cfg)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            summarize(&out, &cfg.output_dir);
        }
        Command::Sweep { system, overrides } => {
            let cfg = overrides.resolve()?;
            let sys = load_system(&system)?;
            let out = sweep_system(&cfg, &sys)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            summarize(&out, &cfg.output_dir);
        }
        Command::Plot { run_dir, out } => {
            let reports = load_reports(&run_dir)?;
            let dest = out.unwrap_or_else(|| run_dir.join("plot"));
            let plots = emit_plot_data(&reports, &dest)?;
            for w in &plots.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {} files to {}", plots.files.len(), dest.display());
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Config => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Io => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
