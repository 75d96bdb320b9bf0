//! Command-line runner for the `scoreprior` experiments.
//!
//! Each subcommand writes its CSV outputs, a `summary.txt` and a
//! `manifest.txt` into `<out>/<experiment>-seed<seed>/`. `replay <manifest>`
//! reruns a recorded configuration; identical manifests give byte-identical
//! CSVs.

pub mod config;
pub mod experiments;
pub mod manifest;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{config_load, ConfigError, Experiment, RunConfig};
use experiments::{RunError, RunOutput};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SCOREPRIOR_OUT";

#[derive(Debug, Parser)]
#[command(name = "scoreprior", version, about = "Run the score-prior experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the score identities, ODE solution, Euler-Lagrange residuals and invariance.
    ScoreCheck(RunArgs),
    /// Tabulate density, CDF and quantiles of the score prior.
    PriorTable(RunArgs),
    /// Replicated normal-scale study.
    SimScale(RunArgs),
    /// Replicated lognormal-location study.
    SimLocation(RunArgs),
    /// Fit a three-component mixture to one simulated sample.
    MixtureSingle(RunArgs),
    /// Repeated-sampling mixture study over n and k.
    MixtureRepeat(RunArgs),
    /// DIC over k for mixtures fitted to the galaxy velocities.
    GalaxyDic(RunArgs),
    /// Eight-schools hierarchical model under both variance priors.
    Schools(RunArgs),
    /// Rerun the configuration recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// `key: value` configuration file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output root.
    #[arg(long, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,
    /// Galaxy velocity file.
    #[arg(long)]
    pub galaxy: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<String>,
    /// Replicates per cell.
    #[arg(long = "M", alias = "m")]
    pub m: Option<String>,
    /// Sample size(s), comma separated.
    #[arg(long)]
    pub n: Option<String>,
    /// Component count(s), comma separated.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub n_iter: Option<String>,
    #[arg(long)]
    pub burn_in: Option<String>,
    #[arg(long)]
    pub thin: Option<String>,
    /// Proposal standard deviation(s) per block, comma separated.
    #[arg(long)]
    pub proposal_sd: Option<String>,
    /// Robbins-Monro tuning of proposal scales during burn-in.
    #[arg(long)]
    pub adapt: Option<String>,
    /// True sigma values for sim-scale.
    #[arg(long)]
    pub sigma: Option<String>,
    /// True mu values for sim-location.
    #[arg(long)]
    pub mu: Option<String>,
    /// score, comparator or both.
    #[arg(long)]
    pub prior: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let galaxy = self.galaxy.as_ref().map(|p| p.display().to_string());
        [
            ("a", &self.a),
            ("M", &self.m),
            ("n", &self.n),
            ("k", &self.k),
            ("seed", &self.seed),
            ("n_iter", &self.n_iter),
            ("burn_in", &self.burn_in),
            ("thin", &self.thin),
            ("proposal_sd", &self.proposal_sd),
            ("adapt", &self.adapt),
            ("sigma", &self.sigma),
            ("mu", &self.mu),
            ("prior", &self.prior),
            ("galaxy", &galaxy),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self, experiment: Experiment) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => config_load(path, experiment)?,
            None => RunConfig::defaults(experiment),
        };
        for (k, v) in self.overrides() {
            cfg.apply(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Directory for the replayed outputs; defaults to `<run dir>-replay`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Galaxy file to use instead of the recorded path; its checksum must match.
    #[arg(long)]
    pub galaxy: Option<PathBuf>,
}

/// Run directory for `cfg` under `root`.
pub fn run_dir(root: &Path, cfg: &RunConfig) -> PathBuf {
    root.join(format!("{}-seed{}", cfg.experiment, cfg.seed))
}

/// Runs `cfg` and writes its outputs into `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let out = experiments::run(cfg)?;
    manifest::write_run(dir, cfg, &out, start.elapsed().as_secs_f64())?;
    Ok(out)
}

/// Reruns the manifest at `path` into `dir`.
pub fn replay(path: &Path, dir: &Path, galaxy: Option<&Path>) -> Result<RunOutput, RunError> {
    let mut m = manifest::load_manifest(path)?;
    if let Some(g) = galaxy {
        m.config.galaxy = g.to_path_buf();
    }
    manifest::verify_dataset(&m)?;
    execute(&m.config, dir)
}

fn exit_code(e: &RunError) -> i32 {
    match e {
        RunError::MissingDataset(_) => 2,
        _ => 1,
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (result, dir) = match cli.command {
        Command::Replay(r) => {
            let dir = r.out.clone().unwrap_or_else(|| {
                let parent = r.manifest.parent().unwrap_or(Path::new("."));
                let name = parent.file_name().map_or("run".into(), |n| n.to_string_lossy().into_owned());
                parent.with_file_name(format!("{name}-replay"))
            });
            (replay(&r.manifest, &dir, r.galaxy.as_deref()), dir)
        }
        other => {
            let (experiment, args) = match other {
                Command::ScoreCheck(a) => (Experiment::ScoreCheck, a),
                Command::PriorTable(a) => (Experiment::PriorTable, a),
                Command::SimScale(a) => (Experiment::SimScale, a),
                Command::SimLocation(a) => (Experiment::SimLocation, a),
                Command::MixtureSingle(a) => (Experiment::MixtureSingle, a),
                Command::MixtureRepeat(a) => (Experiment::MixtureRepeat, a),
                Command::GalaxyDic(a) => (Experiment::GalaxyDic, a),
                Command::Schools(a) => (Experiment::Schools, a),
                Command::Replay(_) => unreachable!(),
            };
            match args.resolve(experiment) {
                Ok(cfg) => {
                    let dir = run_dir(&args.out, &cfg);
                    (execute(&cfg, &dir), dir)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
        }
    };
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            println!("outputs written to {}", dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
