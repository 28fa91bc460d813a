//! `fvk`: relaxed solves, wrinkled constructions, lemma certificates and scaling sweeps.
//!
//! Settings come from built-in defaults, then a `--config` file of `key=value` lines,
//! then individual flags; later sources win.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fvk_core::model::RunConfig;

#[derive(Parser)]
#[command(name = "fvk", version, about = "Wrinkling of a thin sheet pressed onto a sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// `key=value` file with keys h, beta, alpha_s, r0, R, n_radial, kmax, scheme.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "alpha-s")]
    alpha_s: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    /// Sphere radius.
    #[arg(long = "R")]
    big_r: Option<f64>,
    #[arg(long = "n-radial")]
    n_radial: Option<usize>,
    #[arg(long)]
    kmax: Option<u64>,
    /// `composite-gauss` or `graded`.
    #[arg(long)]
    scheme: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for sweeps and energy evaluation.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl Common {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, commands::CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::parse(&std::fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        let flags: [(&str, Option<String>); 8] = [
            ("h", self.h.map(|x| x.to_string())),
            ("beta", self.beta.map(|x| x.to_string())),
            ("alpha_s", self.alpha_s.map(|x| x.to_string())),
            ("r0", self.r0.map(|x| x.to_string())),
            ("R", self.big_r.map(|x| x.to_string())),
            ("n_radial", self.n_radial.map(|x| x.to_string())),
            ("kmax", self.kmax.map(|x| x.to_string())),
            ("scheme", self.scheme.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// Relaxed functional of the radial displacement alone.
    F0,
    /// Two-field functional with the out-of-plane profile.
    Fh,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Linear,
    Quadratic,
    Both,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Construction,
    RelaxedGap,
    F0Scaling,
}

#[derive(Clone, Copy, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    PurePower,
    PowerTimesLog,
}

#[derive(Subcommand)]
pub enum Command {
    /// Closed-form relaxed displacement and stress.
    Relaxed {
        #[command(flatten)]
        common: Common,
    },
    /// Minimize a discretized relaxed functional.
    Minimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "fh")]
        functional: Functional,
    },
    /// Build the wrinkled test state and evaluate its excess energy.
    Construct {
        #[command(flatten)]
        common: Common,
        /// Mode count across the window is `(ln 1/h)^q`.
        #[arg(long, default_value_t = fvk_core::construction::DEFAULT_Q)]
        q: f64,
        /// Radii sampled for the height export.
        #[arg(long, default_value_t = 64)]
        radii: usize,
        /// Angles sampled per radius for the height export.
        #[arg(long = "theta-samples", default_value_t = 128)]
        theta_samples: usize,
    },
    /// Certify the wavenumber lemmas on seeded random fields.
    LemmaCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Margin below the wrinkling threshold; defaults to `r0²/(72R²)/96`.
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Sweep the thickness and fit a power law.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// `lo:hi:count`, log-spaced.
        #[arg(long = "h-decades")]
        h_decades: String,
        #[arg(long, default_value_t = fvk_core::construction::DEFAULT_Q)]
        q: f64,
        #[arg(long, value_enum, default_value = "pure-power")]
        model: ModelArg,
    },
    /// Re-render a saved sweep report.
    Report {
        #[command(flatten)]
        common: Common,
        /// JSON written by `sweep`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = match &cli.command {
        Command::Relaxed { common }
        | Command::Minimize { common, .. }
        | Command::Construct { common, .. }
        | Command::LemmaCheck { common, .. }
        | Command::Sweep { common, .. }
        | Command::Report { common, .. } => common.jobs,
    };
    let run = || commands::run(cli.command);
    let result = match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(commands::CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fvk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
