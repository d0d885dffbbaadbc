//! `nsc`: batch experiments for the rotating Navier–Stokes spectral library.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical finding.

mod commands;
mod config;
mod eps;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{DataKind, ExperimentConfig};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn finding(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<nsc_core::Error> for Failure {
    fn from(e: nsc_core::Error) -> Self {
        use nsc_core::Error as E;
        match e {
            E::NonFinite(_) | E::CflViolation { .. } => Failure::finding(e.to_string()),
            other => Failure::validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "nsc", version, about = "Fourier-Besov experiments for rotating Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier-Besov norms and per-block values of the configured datum
    Norms,
    /// Build the initial datum on the lattice and write it as a snapshot
    BuildData,
    /// Separable-quadrature norm sweep over ε with fitted exponents
    SweepEpsilon,
    /// Exact Stokes-Coriolis evolution at the configured times
    LinearEvolve,
    /// Pointwise Fourier bounds on the linear solution
    CheckBounds,
    /// Theorem- and corollary-level global existence conditions
    CheckConditions,
    /// Full nonlinear integration
    Solve,
    /// Bootstrap monitor recomputed from a run CSV
    Monitor {
        /// `run.csv` written by `solve --monitor`
        #[arg(long)]
        run: PathBuf,
    },
    /// Quick invariant suite
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataArg {
    Large,
    Random,
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// ε as `1/8`, `2^-4`, `0.125`; sweep-epsilon also takes lists and `2^-4..2^-14`
    #[arg(long, global = true, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, global = true, value_enum)]
    data: Option<DataArg>,
    /// Multiplies the datum
    #[arg(long, global = true)]
    scale: Option<f64>,
    /// Mode counts `N1,N2,N3`
    #[arg(long, global = true)]
    counts: Option<String>,
    /// Frequency spacings `d1,d2,d3` (fractions allowed)
    #[arg(long, global = true)]
    spacing: Option<String>,
    /// Box periods `L1,L2,L3`
    #[arg(long, global = true)]
    periods: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Rotation rates for check-bounds, comma separated
    #[arg(long, global = true)]
    omegas: Option<String>,
    /// Times for check-bounds and linear-evolve, comma separated
    #[arg(long, global = true)]
    times: Option<String>,
    /// Final time
    #[arg(long = "T", global = true)]
    t_final: Option<f64>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    cfl: Option<f64>,
    /// Disable the nonlinear term
    #[arg(long, global = true)]
    linear: bool,
    /// Number of geometrically spaced snapshots
    #[arg(long, global = true)]
    snapshots: Option<usize>,
    /// Write snapshot files
    #[arg(long, global = true)]
    write_snapshots: bool,
    /// Track the linear solution and the bootstrap quantity
    #[arg(long, global = true)]
    monitor: bool,
    #[arg(long, global = true)]
    eta: Option<f64>,
    /// Gronwall constant C
    #[arg(long = "C", global = true)]
    c: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Bound the transport integral through FB^0_{3/2,1}
    #[arg(long, global = true)]
    paper_route: bool,
    /// Separable quadrature intervals per axis
    #[arg(long, global = true)]
    resolution: Option<usize>,
}

fn triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(eps::parse_value).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three values, got {s:?}"))
}

fn list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(eps::parse_value).collect()
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig, sweep: bool) -> Result<(), String> {
        if let Some(v) = &self.out {
            cfg.output.dir = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = &self.eps {
            if sweep {
                cfg.data.eps_list = v.clone();
            } else {
                cfg.data.eps = v.clone();
            }
        }
        if let Some(v) = self.data {
            cfg.data.kind = match v {
                DataArg::Large => DataKind::Large,
                DataArg::Random => DataKind::Random,
            };
        }
        if let Some(v) = self.scale {
            cfg.data.scale = v;
        }
        if let Some(v) = &self.counts {
            let t = triple(v)?;
            cfg.lattice.counts = t.map(|x| x as usize);
        }
        if let Some(v) = &self.spacing {
            cfg.lattice.spacing = Some(triple(v)?);
            cfg.lattice.periods = None;
        }
        if let Some(v) = &self.periods {
            cfg.lattice.periods = Some(triple(v)?);
            cfg.lattice.spacing = None;
        }
        if let Some(v) = self.omega {
            cfg.solver.omega = v;
        }
        if let Some(v) = &self.omegas {
            cfg.solver.omegas = list(v)?;
        }
        if let Some(v) = &self.times {
            cfg.solver.times = list(v)?;
        }
        if let Some(v) = self.t_final {
            cfg.solver.t_final = v;
        }
        if let Some(v) = self.dt {
            cfg.solver.dt0 = v;
        }
        if let Some(v) = self.cfl {
            cfg.solver.cfl = v;
        }
        if self.linear {
            cfg.solver.nonlinear = false;
        }
        if let Some(v) = self.snapshots {
            cfg.solver.snapshots = v;
        }
        if self.write_snapshots {
            cfg.solver.write_snapshots = true;
        }
        if self.monitor {
            cfg.solver.monitor = true;
        }
        if let Some(v) = self.eta {
            cfg.solver.eta = v;
        }
        if let Some(v) = self.c {
            cfg.conditions.c = v;
        }
        if let Some(v) = self.delta {
            cfg.conditions.delta = v;
        }
        if let Some(v) = self.t_max {
            cfg.conditions.t_max = v;
        }
        if self.paper_route {
            cfg.conditions.paper_route = true;
        }
        if let Some(v) = self.resolution {
            cfg.data.quadrature_resolution = v;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.overrides.config {
        Some(p) => ExperimentConfig::load(p).map_err(Failure::validation)?,
        None => ExperimentConfig::default(),
    };
    let sweep = matches!(cli.command, Command::SweepEpsilon);
    cli.overrides.apply(&mut cfg, sweep).map_err(Failure::validation)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::validation(e.to_string()))?;
    }
    match cli.command {
        Command::Norms => commands::norms(&cfg),
        Command::BuildData => commands::build_data(&cfg),
        Command::SweepEpsilon => commands::sweep_epsilon(&cfg),
        Command::LinearEvolve => commands::linear_evolve(&cfg),
        Command::CheckBounds => commands::check_bounds(&cfg),
        Command::CheckConditions => commands::check_conditions(&cfg),
        Command::Solve => commands::solve(&cfg),
        Command::Monitor { run } => commands::monitor(&cfg, &run),
        Command::Selftest => commands::selftest(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nsc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
