//! The experiments behind each subcommand. Every function is a pure function
//! of its [`RunConfig`] (and input files), returning CSV text by file name.

use std::fmt::Write as _;
use std::path::PathBuf;

use scoreprior::densities::{lomax_state, Lomax, Normal};
use scoreprior::eval::{
    iqr_monotone_cells, mixture_dic, mixture_repeat_csv, run_mixture_repeat, run_replication, summary_csv, Dic,
    ExperimentReport, MixtureRepeatRow, PriorChoice, ReplicationPlan, ScalarFamily,
};
use scoreprior::mcmc::{hierarchical_sampler, mwg_mixture, relabel_by_mean, Chain, McmcConfig, MixturePriors, VariancePrior};
use scoreprior::models::{load_galaxies, EightSchoolsData, MixtureModel};
use scoreprior::priors::{invariance_check, standard_grid, InverseGamma, ScorePriorPositive, ScorePriorReal};
use scoreprior::rng::{stream, DATA_STREAM};
use scoreprior::scorerule::{
    decomposition_check, euler_lagrange_residual, max_abs, new_prior_score, solve_score_zero, DensityGrid, PhiGenerator,
    ScoreFunction,
};
use scoreprior::{densities::Density, stats};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::config::{ConfigError, Experiment, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(
        "galaxy data file {0} not found; supply the 82 velocities (1000 km/s, one per line) and pass --galaxy <path>"
    )]
    MissingDataset(PathBuf),
    #[error(transparent)]
    Model(#[from] scoreprior::Error),
    #[error("dataset checksum mismatch: manifest has {expected}, file has {found}")]
    Checksum { expected: String, found: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Input file used by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub path: PathBuf,
    pub sha256: String,
}

/// CSV outputs of a run plus a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub dataset: Option<Dataset>,
}

impl RunOutput {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::ScoreCheck => Ok(score_check(cfg)),
        Experiment::PriorTable => Ok(prior_table(cfg)),
        Experiment::SimScale => sim_scalar(cfg, ScalarFamily::NormalScale),
        Experiment::SimLocation => sim_scalar(cfg, ScalarFamily::LogNormalLocation),
        Experiment::MixtureSingle => mixture_single(cfg),
        Experiment::MixtureRepeat => mixture_repeat(cfg),
        Experiment::GalaxyDic => galaxy_dic(cfg),
        Experiment::Schools => schools(cfg),
    }
}

/// Sampler configuration for replicate or run seed `seed`.
pub fn mcmc_config(cfg: &RunConfig, seed: u64) -> Result<McmcConfig, RunError> {
    Ok(McmcConfig::new(cfg.n_iter, cfg.burn_in, cfg.thin, seed)?
        .with_proposal_sd(cfg.proposal_sd.clone())?
        .with_adapt(cfg.adapt))
}

fn chain_csv(chain: &Chain) -> String {
    let mut buf = Vec::new();
    chain.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// One row of the score-check table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// True when the check requires `value > threshold`.
    pub exceeds: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            exceeds: false,
        }
    }

    fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            exceeds: true,
        }
    }

    pub fn pass(&self) -> bool {
        if self.exceeds {
            self.value > self.threshold
        } else {
            self.value <= self.threshold
        }
    }
}

/// Largest `|S|` of the `α(u) = u⁻²` score on the prior with scale `a`, over
/// the 1000-point grid on `(0.01, 100)`, evaluated in exact rational
/// arithmetic on the binary values of `a` and the grid points.
pub fn score_zero_exact(a: f64) -> f64 {
    let exact = |v: f64| BigRational::from_float(v).expect("finite");
    let ar = exact(a);
    standard_grid()
        .iter()
        .map(|&x| {
            let [q, q1, q2] = lomax_state(ar.clone(), exact(x));
            new_prior_score(q, q1, q2)
                .ok()
                .and_then(|s| s.abs().to_f64())
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

/// The same maximum in `f64`.
pub fn score_zero_f64(a: f64) -> f64 {
    scoreprior::priors::prior_score_residual(a)
}

/// Identities of the score module and the prior.
pub fn score_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for a in [0.5, 1.0, 10.0] {
        out.push(Check::below(format!("score_zero_exact_a{a}"), score_zero_exact(a), 1e-12));
        out.push(Check::below(format!("score_zero_f64_a{a}"), score_zero_f64(a), 1e-10));
    }
    let sol = solve_score_zero(1.0, 20.0, 1e-3).expect("valid arguments");
    let ode = sol
        .grid
        .x()
        .iter()
        .zip(sol.grid.q())
        .map(|(x, q)| (q - 1.0 / ((1.0 + x) * (1.0 + x))).abs())
        .fold(0.0, f64::max);
    out.push(Check::below("ode_sup_error_a1", ode, 1e-6));

    let n = Normal::standard();
    let normal = DensityGrid::from_analytic(-4.0, 4.0, 1e-3, 2, |x, j| n.deriv(x, j));
    let hyv = euler_lagrange_residual(&ScoreFunction::hyvarinen(), &normal).expect("grid carries q''");
    out.push(Check::below("euler_lagrange_hyvarinen_normal", max_abs(&hyv), 1e-3));
    let l = Lomax::new(1.0);
    let lomax = DensityGrid::from_analytic(0.1, 20.0, 1e-2, 2, |x, j| l.deriv(x, j));
    let inv = euler_lagrange_residual(&ScoreFunction::inverse_square(), &lomax).expect("grid carries q''");
    out.push(Check::below("euler_lagrange_inverse_square_lomax", max_abs(&inv), 1e-3));
    let not_score = ScoreFunction::pointwise(2, "q", |s| Ok(s[0]));
    let bad = euler_lagrange_residual(&not_score, &normal).expect("grid carries q''");
    out.push(Check::above("euler_lagrange_counterexample", max_abs(&bad), 1e-1));

    let grid = standard_grid();
    out.push(Check::below("invariance_a1", invariance_check(1.0, &grid), 1e-12));
    out.push(Check::above("invariance_a2", invariance_check(2.0, &grid), 1e-2));

    let p = DensityGrid::from_analytic(-12.0, 12.0, 1e-3, 2, |x, j| n.deriv(x, j));
    let wide = Normal::new(0.0, 2.0);
    let q = DensityGrid::from_analytic(-12.0, 12.0, 1e-3, 2, |x, j| wide.deriv(x, j));
    let dec = decomposition_check(&PhiGenerator::fisher(), &p, &q).expect("matching grids");
    out.push(Check::below("fisher_divergence_error", (dec.div - 0.5625).abs(), 2e-3));
    out.push(Check::below(
        "decomposition_residual_fisher",
        dec.residual,
        1e-3 * (1.0 + dec.div.abs()),
    ));
    out
}

fn score_check(_cfg: &RunConfig) -> RunOutput {
    let checks = score_checks();
    let mut csv = String::from("check,value,threshold,relation,pass\n");
    let mut summary = String::new();
    for c in &checks {
        let rel = if c.exceeds { ">" } else { "<=" };
        let _ = writeln!(csv, "{},{:e},{:e},{rel},{}", c.name, c.value, c.threshold, c.pass());
        let _ = writeln!(
            summary,
            "{:<40} {:>12.3e} {rel} {:<8.0e} {}",
            c.name,
            c.value,
            c.threshold,
            if c.pass() { "ok" } else { "FAIL" }
        );
    }
    RunOutput {
        files: vec![("checks.csv".into(), csv)],
        summary,
        dataset: None,
    }
}

fn prior_table(cfg: &RunConfig) -> RunOutput {
    let pos = ScorePriorPositive::new(cfg.a).expect("validated a");
    let real = ScorePriorReal::new(cfg.a).expect("validated a");
    let mut table = String::from("x,pdf_positive,cdf_positive,pdf_real,cdf_real\n");
    for i in 0..=200 {
        let x = i as f64 * 0.1;
        let _ = writeln!(
            table,
            "{x},{},{},{},{}",
            pos.pdf(x).unwrap(),
            pos.cdf(x).unwrap(),
            real.pdf(x).unwrap(),
            real.cdf(x).unwrap()
        );
    }
    let mut quant = String::from("level,quantile_positive,quantile_real\n");
    let mut summary = format!("score prior a = {}\nlevel  positive      real\n", cfg.a);
    for u in [0.025, 0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99] {
        let (qp, qr) = (pos.quantile(u).unwrap(), real.quantile(u).unwrap());
        let _ = writeln!(quant, "{u},{qp},{qr}");
        let _ = writeln!(summary, "{u:<6} {qp:>9.4} {qr:>9.4}");
    }
    RunOutput {
        files: vec![("prior_table.csv".into(), table), ("quantiles.csv".into(), quant)],
        summary,
        dataset: None,
    }
}

/// Replication reports for every configured truth and prior.
pub fn scalar_reports(cfg: &RunConfig, family: ScalarFamily) -> Result<Vec<ExperimentReport>, RunError> {
    let truths = match family {
        ScalarFamily::NormalScale => &cfg.sigma,
        ScalarFamily::LogNormalLocation => &cfg.mu,
    };
    let mut priors = Vec::new();
    if cfg.prior.includes_score() {
        priors.push(PriorChoice::Score { a: cfg.a });
    }
    if cfg.prior.includes_comparator() {
        priors.push(PriorChoice::Comparator);
    }
    let mut reports = Vec::new();
    for &truth in truths {
        for &prior in &priors {
            let plan = ReplicationPlan::new(cfg.m, cfg.n[0], truth, family, prior, mcmc_config(cfg, cfg.seed)?)?;
            reports.push(run_replication(&plan)?);
        }
    }
    Ok(reports)
}

fn sim_scalar(cfg: &RunConfig, family: ScalarFamily) -> Result<RunOutput, RunError> {
    let reports = scalar_reports(cfg, family)?;
    let mut files = vec![("summary.csv".to_string(), summary_csv(&reports))];
    let mut summary = String::from("truth      prior           rmse    coverage  flagged\n");
    for r in &reports {
        let label = r.prior_label().replace('/', "-");
        files.push((format!("replicates_{label}_{}.csv", r.plan.truth), r.replicates_csv()));
        let _ = writeln!(
            summary,
            "{:<10} {:<14} {:>8} {:>8} {:>4}{}",
            r.plan.truth,
            r.prior_label(),
            r.rmse.map_or("NA".into(), |m| format!(
                "{:.4}{}",
                m.value,
                if m.normalized { "" } else { "*" }
            )),
            r.coverage.map_or("NA".into(), |c| format!("{c:.2}")),
            r.acceptance_excursions(),
            if r.failures > 0 {
                format!("  ({} failed)", r.failures)
            } else {
                String::new()
            }
        );
    }
    if reports.iter().any(|r| r.rmse.is_some_and(|m| !m.normalized)) {
        summary.push_str("* truth 0: raw RMSE, not normalized\n");
    }
    Ok(RunOutput {
        files,
        summary,
        dataset: None,
    })
}

/// Posterior summary row for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    pub name: String,
    pub truth: Option<f64>,
    pub mean: f64,
    pub lo95: f64,
    pub hi95: f64,
}

impl ParamSummary {
    pub fn covers(&self) -> Option<bool> {
        self.truth.map(|t| self.lo95 <= t && t <= self.hi95)
    }
}

/// Fits the single-sample mixture for data seed `seed`; components are
/// ordered by ascending mean and matched to the generating model in that
/// order.
pub fn mixture_single_fit(cfg: &RunConfig, seed: u64) -> Result<(Chain, Vec<ParamSummary>), RunError> {
    let model = MixtureModel::example1();
    let data = model.sample(cfg.n[0], &mut stream(seed, DATA_STREAM));
    let k = cfg.k[0];
    let priors = MixturePriors {
        location: ScorePriorReal::new(cfg.a)?,
        scale: ScorePriorPositive::new(cfg.a)?,
        ..MixturePriors::default()
    };
    let chain = relabel_by_mean(&mwg_mixture(&data, k, &priors, &mcmc_config(cfg, seed)?)?)?;
    let mut order: Vec<usize> = (0..model.k()).collect();
    order.sort_by(|&i, &j| model.means()[i].total_cmp(&model.means()[j]));
    let truth = |block: &[f64], l: usize| (k == model.k()).then(|| block[order[l]]);
    let mut rows = Vec::new();
    for (j, name) in chain.names.iter().enumerate() {
        let l = j % k;
        let t = match j / k {
            0 => truth(model.weights(), l),
            1 => truth(model.means(), l),
            _ => truth(model.sds(), l),
        };
        let (lo95, hi95) = chain.interval95(j);
        rows.push(ParamSummary {
            name: name.clone(),
            truth: t,
            mean: chain.mean(j),
            lo95,
            hi95,
        });
    }
    Ok((chain, rows))
}

fn params_csv(rows: &[ParamSummary]) -> String {
    let mut s = String::from("parameter,truth,mean,lo95,hi95,contains_truth\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.name,
            r.truth.map_or("NA".into(), |t| t.to_string()),
            r.mean,
            r.lo95,
            r.hi95,
            r.covers().map_or("NA".into(), |c| c.to_string())
        );
    }
    s
}

fn mixture_single(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let (chain, rows) = mixture_single_fit(cfg, cfg.seed)?;
    let mut summary = String::from("parameter  truth    mean      95% interval\n");
    for r in &rows {
        let _ = writeln!(
            summary,
            "{:<10} {:>6} {:>8.3}  ({:.3}, {:.3}){}",
            r.name,
            r.truth.map_or("NA".into(), |t| t.to_string()),
            r.mean,
            r.lo95,
            r.hi95,
            if r.covers() == Some(false) { "  outside" } else { "" }
        );
    }
    let _ = writeln!(summary, "acceptance: {:?}", chain.acceptance);
    Ok(RunOutput {
        files: vec![
            ("chain.csv".into(), chain_csv(&chain)),
            ("chain.config".into(), chain.config_text()),
            ("summary.csv".into(), params_csv(&rows)),
        ],
        summary,
        dataset: None,
    })
}

pub fn mixture_repeat_rows(cfg: &RunConfig) -> Result<Vec<MixtureRepeatRow>, RunError> {
    Ok(run_mixture_repeat(&cfg.k, &cfg.n, cfg.m, &mcmc_config(cfg, cfg.seed)?)?)
}

fn mixture_repeat(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let rows = mixture_repeat_rows(cfg)?;
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    let mut iqr_csv = String::from("k,component,n,iqr_mu,mean_mu\n");
    for &k in &cfg.k {
        for l in 0..k {
            for &n in &ns {
                let _ = writeln!(
                    iqr_csv,
                    "{k},{},{n},{},{}",
                    l + 1,
                    scoreprior::eval::cell_iqr(&rows, k, n, l),
                    scoreprior::eval::cell_mean(&rows, k, n, l)
                );
            }
        }
    }
    let (good, total) = iqr_monotone_cells(&rows, &cfg.k, &ns);
    let summary = format!("IQR of posterior means shrinks monotonically in n for {good}/{total} (k, component) cells\n");
    Ok(RunOutput {
        files: vec![
            ("posterior_means.csv".into(), mixture_repeat_csv(&rows)),
            ("iqr.csv".into(), iqr_csv),
        ],
        summary,
        dataset: None,
    })
}

/// SHA-256 of a file's bytes, hex encoded.
pub fn sha256_file(path: &std::path::Path) -> std::io::Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Reads the galaxy velocities and their checksum.
pub fn galaxy_dataset(cfg: &RunConfig) -> Result<(Vec<f64>, Dataset), RunError> {
    if !cfg.galaxy.is_file() {
        return Err(RunError::MissingDataset(cfg.galaxy.clone()));
    }
    let data = load_galaxies(&cfg.galaxy)?;
    let sha256 = sha256_file(&cfg.galaxy)?;
    Ok((
        data,
        Dataset {
            path: cfg.galaxy.clone(),
            sha256,
        },
    ))
}

/// DIC for each configured `k`, fitted with sampler seed `seed`.
pub fn galaxy_dic_table(data: &[f64], cfg: &RunConfig, seed: u64) -> Result<Vec<(usize, Dic, Chain)>, RunError> {
    let priors = MixturePriors {
        location: ScorePriorReal::new(cfg.a)?,
        scale: ScorePriorPositive::new(cfg.a)?,
        ..MixturePriors::default()
    };
    let mcmc = mcmc_config(cfg, seed)?;
    let fits: Vec<Result<(usize, Dic, Chain), RunError>> = {
        use rayon::prelude::*;
        cfg.k
            .par_iter()
            .map(|&k| {
                let (d, chain) = mixture_dic(data, k, &priors, &mcmc)?;
                Ok((k, d, chain))
            })
            .collect()
    };
    fits.into_iter().collect()
}

/// `k` with the smallest DIC.
pub fn dic_argmin(table: &[(usize, Dic, Chain)]) -> usize {
    table
        .iter()
        .min_by(|a, b| a.1.dic.total_cmp(&b.1.dic))
        .map(|(k, _, _)| *k)
        .expect("non-empty table")
}

fn galaxy_dic(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let (data, dataset) = galaxy_dataset(cfg)?;
    let table = galaxy_dic_table(&data, cfg, cfg.seed)?;
    let best = dic_argmin(&table);
    let mut dic_csv = String::from("k,dic,dbar,d_hat,p_d\n");
    let mut summary = String::from("k   DIC        Dbar       pD\n");
    for (k, d, _) in &table {
        let _ = writeln!(dic_csv, "{k},{},{},{},{}", d.dic, d.dbar, d.d_hat, d.p_d);
        let _ = writeln!(
            summary,
            "{k:<3} {:>9.2} {:>9.2} {:>8.2}{}",
            d.dic,
            d.dbar,
            d.p_d,
            if *k == best { "  <- min" } else { "" }
        );
    }
    let (_, _, chain) = table.iter().find(|(k, _, _)| *k == best).expect("best k fitted");
    let means = chain.means();
    let mut est = String::from("component,weight,mu,sigma\n");
    for l in 0..best {
        let _ = writeln!(est, "{},{},{},{}", l + 1, means[l], means[best + l], means[2 * best + l]);
    }
    let _ = writeln!(summary, "dataset sha256: {}", dataset.sha256);
    Ok(RunOutput {
        files: vec![("dic.csv".into(), dic_csv), (format!("estimates_k{best}.csv"), est)],
        summary,
        dataset: Some(dataset),
    })
}

/// Posterior summary of `σ_α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceSummary {
    pub prior: &'static str,
    pub mean: f64,
    pub median: f64,
    pub lo95: f64,
    pub hi95: f64,
    pub acceptance: Vec<f64>,
}

pub fn schools_fit(cfg: &RunConfig, score: bool) -> Result<(Chain, VarianceSummary), RunError> {
    let (prior, label) = if score {
        (VariancePrior::Score(ScorePriorPositive::new(cfg.a)?), "score")
    } else {
        (VariancePrior::InverseGamma(InverseGamma::default()), "inverse-gamma")
    };
    let chain = hierarchical_sampler(&EightSchoolsData::standard(), prior, &mcmc_config(cfg, cfg.seed)?)?;
    let v = chain.named("sigma_alpha2")?;
    let summary = VarianceSummary {
        prior: label,
        mean: stats::mean(&v),
        median: stats::quantile(&v, 0.5),
        lo95: stats::quantile(&v, 0.025),
        hi95: stats::quantile(&v, 0.975),
        acceptance: chain.acceptance.clone(),
    };
    Ok((chain, summary))
}

fn schools(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let mut files = Vec::new();
    let mut csv = String::from("prior,mean,median,lo95,hi95\n");
    let mut summary = String::from("prior          mean     95% interval\n");
    let mut runs = Vec::new();
    if cfg.prior.includes_comparator() {
        runs.push(false);
    }
    if cfg.prior.includes_score() {
        runs.push(true);
    }
    for score in runs {
        let (chain, s) = schools_fit(cfg, score)?;
        files.push((format!("chain_{}.csv", s.prior), chain_csv(&chain)));
        files.push((format!("chain_{}.config", s.prior), chain.config_text()));
        let _ = writeln!(csv, "{},{},{},{},{}", s.prior, s.mean, s.median, s.lo95, s.hi95);
        let _ = writeln!(
            summary,
            "{:<14} {:>6.2}   ({:.2}, {:.2})",
            s.prior, s.mean, s.lo95, s.hi95
        );
    }
    files.push(("summary.csv".into(), csv));
    Ok(RunOutput {
        files,
        summary,
        dataset: None,
    })
}
