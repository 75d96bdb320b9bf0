//! Frequentist evaluation over replicated simulations, and DIC.
//!
//! Replicate `r` (1-based) of a plan with base seed `s` draws its data from
//! `rng::stream(s + r, DATA_STREAM)` and runs its sampler with seed `s + r`,
//! so results depend on the replicate index only, never on scheduling.

use std::fmt::Write as _;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mcmc::{mixture_row_loglik, mwg_mixture, relabel_by_mean, relabel_by_weight, rw_metropolis, Chain, McmcConfig, MixturePriors};
use crate::models::{LogNormalLocationModel, MixtureModel, NormalScaleModel};
use crate::priors::{ComparatorPrior, Prior, ScorePriorPositive, ScorePriorReal, Support};
use crate::rng::{stream, DATA_STREAM};
use crate::stats::{iqr, mean};

/// Root mean squared error, divided by `|truth|` unless `truth = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rmse {
    pub value: f64,
    /// False when the truth was 0 and the raw RMSE is reported.
    pub normalized: bool,
}

pub fn normalized_rmse(estimates: &[f64], truth: f64) -> Result<Rmse> {
    if estimates.is_empty() {
        return Err(Error::Contract("normalized_rmse of no estimates".into()));
    }
    let rmse = estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / estimates.len() as f64;
    let rmse = rmse.sqrt();
    Ok(if truth == 0.0 {
        Rmse {
            value: rmse,
            normalized: false,
        }
    } else {
        Rmse {
            value: rmse / truth.abs(),
            normalized: true,
        }
    })
}

/// Fraction of closed intervals `[lo, hi]` that contain `truth`.
pub fn coverage95(intervals: &[(f64, f64)], truth: f64) -> Result<f64> {
    if intervals.is_empty() {
        return Err(Error::Contract("coverage of no intervals".into()));
    }
    if let Some((lo, hi)) = intervals.iter().find(|(lo, hi)| !(lo <= hi)) {
        return Err(Error::Contract(format!("interval with lo > hi: ({lo}, {hi})")));
    }
    let hits = intervals.iter().filter(|(lo, hi)| *lo <= truth && truth <= *hi).count();
    Ok(hits as f64 / intervals.len() as f64)
}

/// Spiegelhalter DIC with `D(θ) = −2 log L(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dic {
    pub dic: f64,
    /// Posterior mean deviance.
    pub dbar: f64,
    /// Deviance at the draw-wise posterior mean.
    pub d_hat: f64,
    pub p_d: f64,
}

/// `D̄ + p_D` with `p_D = D̄ − D(θ̄)` and `θ̄` the column means of `chain`.
pub fn dic<D: ?Sized>(chain: &Chain, loglik: impl Fn(&[f64], &D) -> f64, data: &D) -> Result<Dic> {
    if chain.is_empty() {
        return Err(Error::Contract("DIC of an empty chain".into()));
    }
    let mut total = 0.0;
    for (i, row) in chain.draws.iter().enumerate() {
        let d = -2.0 * loglik(row, data);
        if !d.is_finite() {
            return Err(Error::NonFiniteDeviance { draw: i });
        }
        total += d;
    }
    let dbar = total / chain.len() as f64;
    let d_hat = -2.0 * loglik(&chain.means(), data);
    if !d_hat.is_finite() {
        return Err(Error::NonFiniteDeviance { draw: chain.len() });
    }
    let p_d = dbar - d_hat;
    Ok(Dic {
        dic: dbar + p_d,
        dbar,
        d_hat,
        p_d,
    })
}

/// Scalar model families of the replication studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFamily {
    /// `N(0, σ²)`, inference on `σ`.
    NormalScale,
    /// `logN(μ, 1)`, inference on `μ`.
    LogNormalLocation,
}

/// Prior used on the inferred parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorChoice {
    /// Score prior with scale `a`.
    Score { a: f64 },
    /// Jeffreys `1/σ` for the scale family, flat for the location family.
    Comparator,
}

impl PriorChoice {
    pub fn label(&self, family: ScalarFamily) -> &'static str {
        match (self, family) {
            (PriorChoice::Score { .. }, _) => "score",
            (PriorChoice::Comparator, ScalarFamily::NormalScale) => "jeffreys",
            (PriorChoice::Comparator, ScalarFamily::LogNormalLocation) => "flat/jeffreys",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationPlan {
    pub m: usize,
    pub n: usize,
    pub truth: f64,
    pub family: ScalarFamily,
    pub prior: PriorChoice,
    /// Schedule and base seed.
    pub config: McmcConfig,
}

impl ReplicationPlan {
    pub fn new(m: usize, n: usize, truth: f64, family: ScalarFamily, prior: PriorChoice, config: McmcConfig) -> Result<Self> {
        let plan = Self {
            m,
            n,
            truth,
            family,
            prior,
            config,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config("M must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        if self.family == ScalarFamily::NormalScale && !(self.truth > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.truth)));
        }
        if !self.truth.is_finite() {
            return Err(Error::Config("truth must be finite".into()));
        }
        if let PriorChoice::Score { a } = self.prior {
            if !(a > 0.0) {
                return Err(Error::Config(format!("prior scale a must be positive, got {a}")));
            }
        }
        self.config.validate()
    }

    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.config.seed.wrapping_add(r as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    /// 1-based.
    pub replicate: usize,
    pub seed: u64,
    pub estimate: f64,
    pub lo95: f64,
    pub hi95: f64,
    pub contains_truth: bool,
    pub acceptance: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub plan: ReplicationPlan,
    /// Sorted by replicate index.
    pub replicates: Vec<ReplicateResult>,
    pub rmse: Option<Rmse>,
    pub coverage: Option<f64>,
    pub failures: usize,
    pub runtime_secs: f64,
}

/// Posterior draws of one replicate of `plan`.
pub fn replicate_chain(plan: &ReplicationPlan, r: usize) -> Result<Chain> {
    let seed = plan.replicate_seed(r);
    let mut rng = stream(seed, DATA_STREAM);
    let z: Vec<f64> = (0..plan.n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let cfg = plan.config.clone().with_seed(seed);
    match plan.family {
        ScalarFamily::NormalScale => {
            let model = NormalScaleModel::new(0.0, z.iter().map(|v| plan.truth * v).collect());
            let prior: Box<dyn Prior> = match plan.prior {
                PriorChoice::Score { a } => Box::new(ScorePriorPositive::new(a)?),
                PriorChoice::Comparator => Box::new(ComparatorPrior::JeffreysScale),
            };
            let post = |s: f64| model.loglik(s).unwrap_or(f64::NEG_INFINITY) + prior.log_density(s);
            rw_metropolis(post, model.mle(), Support::Positive, &cfg)
        }
        ScalarFamily::LogNormalLocation => {
            let model = LogNormalLocationModel::new(1.0, z.iter().map(|v| (plan.truth + v).exp()).collect())?;
            let prior: Box<dyn Prior> = match plan.prior {
                PriorChoice::Score { a } => Box::new(ScorePriorReal::new(a)?),
                PriorChoice::Comparator => Box::new(ComparatorPrior::Flat),
            };
            let post = |mu: f64| model.loglik(mu) + prior.log_density(mu);
            rw_metropolis(post, model.mle(), Support::Real, &cfg)
        }
    }
}

pub fn run_replicate(plan: &ReplicationPlan, r: usize) -> ReplicateResult {
    let seed = plan.replicate_seed(r);
    match replicate_chain(plan, r) {
        Ok(chain) => {
            let (lo95, hi95) = chain.interval95(0);
            ReplicateResult {
                replicate: r,
                seed,
                estimate: chain.mean(0),
                lo95,
                hi95,
                contains_truth: lo95 <= plan.truth && plan.truth <= hi95,
                acceptance: chain.acceptance[0],
                error: None,
            }
        }
        Err(e) => ReplicateResult {
            replicate: r,
            seed,
            estimate: f64::NAN,
            lo95: f64::NAN,
            hi95: f64::NAN,
            contains_truth: false,
            acceptance: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Runs replicates `1..=M` in parallel and aggregates them.
pub fn run_replication(plan: &ReplicationPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let start = Instant::now();
    let results: Vec<ReplicateResult> = (1..=plan.m).into_par_iter().map(|r| run_replicate(plan, r)).collect();
    Ok(aggregate(plan, results, start.elapsed().as_secs_f64()))
}

/// Aggregates replicate results in any order.
pub fn aggregate(plan: &ReplicationPlan, mut results: Vec<ReplicateResult>, runtime_secs: f64) -> ExperimentReport {
    results.sort_by_key(|r| r.replicate);
    let ok: Vec<&ReplicateResult> = results.iter().filter(|r| r.error.is_none()).collect();
    let estimates: Vec<f64> = ok.iter().map(|r| r.estimate).collect();
    let intervals: Vec<(f64, f64)> = ok.iter().map(|r| (r.lo95, r.hi95)).collect();
    ExperimentReport {
        plan: plan.clone(),
        failures: results.len() - ok.len(),
        rmse: normalized_rmse(&estimates, plan.truth).ok(),
        coverage: coverage95(&intervals, plan.truth).ok(),
        replicates: results,
        runtime_secs,
    }
}

fn fmt_or_na(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "NA".into()
    }
}

impl ExperimentReport {
    /// `replicate,estimate,lo95,hi95,contains_truth`.
    pub fn replicates_csv(&self) -> String {
        let mut s = String::from("replicate,estimate,lo95,hi95,contains_truth\n");
        for r in &self.replicates {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.replicate,
                fmt_or_na(r.estimate),
                fmt_or_na(r.lo95),
                fmt_or_na(r.hi95),
                r.contains_truth
            );
        }
        s
    }

    pub fn prior_label(&self) -> &'static str {
        self.plan.prior.label(self.plan.family)
    }

    /// Replicates whose acceptance rate left the flag band.
    pub fn acceptance_excursions(&self) -> usize {
        let (lo, hi) = crate::mcmc::ACCEPTANCE_BAND;
        self.replicates
            .iter()
            .filter(|r| r.error.is_none() && !(r.acceptance >= lo && r.acceptance <= hi))
            .count()
    }
}

/// Table with one row per true value and `<prior>_rmse`, `<prior>_coverage`
/// columns per prior, in order of first appearance.
pub fn summary_csv(reports: &[ExperimentReport]) -> String {
    let mut truths: Vec<f64> = Vec::new();
    let mut priors: Vec<&'static str> = Vec::new();
    for r in reports {
        if !truths.contains(&r.plan.truth) {
            truths.push(r.plan.truth);
        }
        if !priors.contains(&r.prior_label()) {
            priors.push(r.prior_label());
        }
    }
    let mut s = String::from("truth");
    for p in &priors {
        let _ = write!(s, ",{p}_rmse,{p}_coverage");
    }
    s.push_str(",normalized,failures\n");
    for t in &truths {
        let _ = write!(s, "{t}");
        let mut normalized = true;
        let mut failures = 0;
        for p in &priors {
            match reports.iter().find(|r| r.plan.truth == *t && r.prior_label() == *p) {
                Some(r) => {
                    normalized &= r.rmse.is_none_or(|m| m.normalized);
                    failures += r.failures;
                    let rm = r.rmse.map_or("NA".into(), |m| format!("{:.4}", m.value));
                    let cv = r.coverage.map_or("NA".into(), |c| format!("{c:.2}"));
                    let _ = write!(s, ",{rm},{cv}");
                }
                None => s.push_str(",NA,NA"),
            }
        }
        let _ = writeln!(s, ",{normalized},{failures}");
    }
    s
}

/// Fits a `k`-component mixture and evaluates DIC on the chain relabelled
/// by descending weight.
pub fn mixture_dic(data: &[f64], k: usize, priors: &MixturePriors, cfg: &McmcConfig) -> Result<(Dic, Chain)> {
    let chain = relabel_by_weight(&mwg_mixture(data, k, priors, cfg)?)?;
    let d = dic(&chain, mixture_row_loglik, data)?;
    Ok((d, chain))
}

/// Posterior means of one fit in the repeated-sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureRepeatRow {
    pub k: usize,
    pub n: usize,
    pub replicate: usize,
    /// Components ordered by ascending posterior mean.
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub weight: Vec<f64>,
}

/// Repeated-sampling grid over `ks × ns` with `m` replicates per cell.
/// Replicate `r` of every cell uses seed `seed + r`.
pub fn run_mixture_repeat(ks: &[usize], ns: &[usize], m: usize, cfg: &McmcConfig) -> Result<Vec<MixtureRepeatRow>> {
    let mut jobs = Vec::new();
    for &k in ks {
        let model = MixtureModel::repeated_design(k)?;
        for &n in ns {
            for r in 1..=m {
                jobs.push((k, n, r, model.clone()));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(k, n, r, model)| {
            let seed = cfg.seed.wrapping_add(r as u64);
            let data = model.sample(n, &mut stream(seed, DATA_STREAM));
            let chain = relabel_by_mean(&mwg_mixture(&data, k, &MixturePriors::default(), &cfg.clone().with_seed(seed))?)?;
            let means = chain.means();
            Ok(MixtureRepeatRow {
                k,
                n,
                replicate: r,
                weight: means[..k].to_vec(),
                mu: means[k..2 * k].to_vec(),
                sigma: means[2 * k..].to_vec(),
            })
        })
        .collect()
}

/// `k,n,replicate,component,weight,mu,sigma`, one line per component.
pub fn mixture_repeat_csv(rows: &[MixtureRepeatRow]) -> String {
    let mut s = String::from("k,n,replicate,component,weight,mu,sigma\n");
    for row in rows {
        for l in 0..row.k {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                row.k,
                row.n,
                row.replicate,
                l + 1,
                row.weight[l],
                row.mu[l],
                row.sigma[l]
            );
        }
    }
    s
}

/// Interquartile range of the posterior means of `μ_l` in one `(k, n)` cell.
pub fn cell_iqr(rows: &[MixtureRepeatRow], k: usize, n: usize, component: usize) -> f64 {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.k == k && r.n == n)
        .map(|r| r.mu[component])
        .collect();
    iqr(&vals)
}

/// Counts `(k, component)` cells whose IQR strictly shrinks along `ns`
/// (ascending). Returns `(monotone, total)`.
pub fn iqr_monotone_cells(rows: &[MixtureRepeatRow], ks: &[usize], ns: &[usize]) -> (usize, usize) {
    let mut good = 0;
    let mut total = 0;
    for &k in ks {
        for l in 0..k {
            let seq: Vec<f64> = ns.iter().map(|&n| cell_iqr(rows, k, n, l)).collect();
            total += 1;
            if seq.windows(2).all(|w| w[1] < w[0]) {
                good += 1;
            }
        }
    }
    (good, total)
}

/// Mean of the posterior means of `μ_l` per `(k, n)` cell; a summary for
/// the repeated-sampling CSV.
pub fn cell_mean(rows: &[MixtureRepeatRow], k: usize, n: usize, component: usize) -> f64 {
    let vals: Vec<f64> = rows
        .iter()
        .filter(|r| r.k == k && r.n == n)
        .map(|r| r.mu[component])
        .collect();
    mean(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::normal_ln_pdf;
    use proptest::prelude::*;

    fn toy_chain(rows: Vec<Vec<f64>>) -> Chain {
        Chain {
            names: (0..rows[0].len()).map(|j| format!("p{j}")).collect(),
            draws: rows,
            blocks: vec![],
            acceptance: vec![],
            final_scales: vec![],
            config: McmcConfig::new(2, 1, 1, 0).unwrap(),
        }
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(normalized_rmse(&[2.0, 2.0], 2.0).unwrap().value, 0.0);
        let r = normalized_rmse(&[2.2, 1.8], 2.0).unwrap();
        assert!((r.value - 0.1).abs() < 1e-12 && r.normalized);
        let raw = normalized_rmse(&[0.3, -0.4], 0.0).unwrap();
        assert!(!raw.normalized);
        assert!((raw.value - (0.125f64).sqrt()).abs() < 1e-12);
        assert!(normalized_rmse(&[], 1.0).is_err());
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage95(&[(0.0, 2.0), (0.5, 1.5)], 1.0).unwrap(), 1.0);
        assert_eq!(coverage95(&[(2.0, 3.0), (-1.0, 0.0)], 1.0).unwrap(), 0.0);
        assert!(coverage95(&[], 1.0).is_err());
        assert!(coverage95(&[(2.0, 1.0)], 1.0).is_err());
    }

    fn gauss_loglik(row: &[f64], data: &[f64]) -> f64 {
        data.iter().map(|&y| normal_ln_pdf(y, row[0], 1.0)).sum()
    }

    #[test]
    fn dic_degenerate_and_toy() {
        let data = [0.5, -0.2];
        let flat = toy_chain(vec![vec![0.1]; 4]);
        let d = dic(&flat, gauss_loglik, &data[..]).unwrap();
        assert!(d.p_d.abs() < 1e-12);
        assert!((d.dic + 2.0 * gauss_loglik(&[0.1], &data)).abs() < 1e-12);

        // θ ∈ {−1, 0, 1}, y = {0}: D(θ) = log 2π + θ²
        let toy = toy_chain(vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let d = dic(&toy, gauss_loglik, &[0.0][..]).unwrap();
        let ln2pi = (2.0 * std::f64::consts::PI).ln();
        let dbar = ln2pi + 2.0 / 3.0;
        assert!((d.dbar - dbar).abs() < 1e-12);
        assert!((d.p_d - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.dic - (ln2pi + 4.0 / 3.0)).abs() < 1e-12);

        let bad = toy_chain(vec![vec![0.0], vec![f64::NAN]]);
        assert!(matches!(dic(&bad, gauss_loglik, &data[..]), Err(Error::NonFiniteDeviance { draw: 1 })));
    }

    #[test]
    fn dic_under_constant_loglik_shift() {
        let toy = toy_chain(vec![vec![-1.0], vec![0.3], vec![2.0]]);
        let data = [0.2, 1.0];
        let base = dic(&toy, gauss_loglik, &data[..]).unwrap();
        let c = 3.5;
        let shifted = dic(&toy, |row: &[f64], d: &[f64]| gauss_loglik(row, d) + c, &data[..]).unwrap();
        // D shifts by −2c everywhere, p_D is unchanged
        assert!((shifted.dic - (base.dic - 2.0 * c)).abs() < 1e-9);
        assert!((shifted.p_d - base.p_d).abs() < 1e-9);
    }

    fn small_plan(family: ScalarFamily, truth: f64, m: usize) -> ReplicationPlan {
        let cfg = McmcConfig::new(1200, 200, 2, 100).unwrap();
        ReplicationPlan::new(m, 50, truth, family, PriorChoice::Score { a: 1.0 }, cfg).unwrap()
    }

    #[test]
    fn single_replicate_report() {
        let plan = small_plan(ScalarFamily::NormalScale, 2.0, 1);
        let rep = run_replication(&plan).unwrap();
        let r = &rep.replicates[0];
        assert_eq!(rep.rmse.unwrap().value, (r.estimate - 2.0).abs() / 2.0);
        assert_eq!(rep.coverage.unwrap(), if r.contains_truth { 1.0 } else { 0.0 });
        assert_eq!(r.seed, 101);
    }

    #[test]
    fn replicate_order_does_not_matter() {
        let plan = small_plan(ScalarFamily::LogNormalLocation, 5.0, 6);
        let forward = run_replication(&plan).unwrap();
        let backward: Vec<ReplicateResult> = (1..=6).rev().map(|r| run_replicate(&plan, r)).collect();
        let agg = aggregate(&plan, backward, 0.0);
        assert_eq!(agg.replicates, forward.replicates);
        assert_eq!(agg.rmse, forward.rmse);
        assert_eq!(agg.coverage, forward.coverage);
        assert_eq!(agg.replicates_csv(), forward.replicates_csv());
    }

    #[test]
    fn invalid_plans() {
        let cfg = McmcConfig::new(100, 10, 1, 0).unwrap();
        let score = PriorChoice::Score { a: 1.0 };
        assert!(ReplicationPlan::new(0, 10, 1.0, ScalarFamily::NormalScale, score, cfg.clone()).is_err());
        assert!(ReplicationPlan::new(1, 1, 1.0, ScalarFamily::NormalScale, score, cfg.clone()).is_err());
        assert!(ReplicationPlan::new(1, 10, -1.0, ScalarFamily::NormalScale, score, cfg.clone()).is_err());
        assert!(ReplicationPlan::new(1, 10, -1.0, ScalarFamily::LogNormalLocation, score, cfg).is_ok());
    }

    #[test]
    fn summary_layout() {
        let plan = small_plan(ScalarFamily::NormalScale, 1.0, 2);
        let a = run_replication(&plan).unwrap();
        let mut cplan = plan.clone();
        cplan.prior = PriorChoice::Comparator;
        let b = run_replication(&cplan).unwrap();
        let csv = summary_csv(&[a, b]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "truth,score_rmse,score_coverage,jeffreys_rmse,jeffreys_coverage,normalized,failures"
        );
        assert!(lines.next().unwrap().starts_with("1,"));
    }

    #[test]
    fn iqr_monotone_counting() {
        let row = |n, r, mu: f64| MixtureRepeatRow {
            k: 1,
            n,
            replicate: r,
            mu: vec![mu],
            sigma: vec![1.0],
            weight: vec![1.0],
        };
        let mut rows = Vec::new();
        for r in 0..5 {
            rows.push(row(50, r, r as f64));
            rows.push(row(100, r, 0.5 * r as f64));
        }
        assert_eq!(iqr_monotone_cells(&rows, &[1], &[50, 100]), (1, 1));
        assert_eq!(iqr_monotone_cells(&rows, &[1], &[100, 50]), (0, 1));
    }

    proptest! {
        #[test]
        fn rmse_is_scale_equivariant(
            est in proptest::collection::vec(0.1f64..10.0, 1..30),
            truth in 0.1f64..10.0,
            c in 0.01f64..100.0,
        ) {
            let a = normalized_rmse(&est, truth).unwrap().value;
            let scaled: Vec<f64> = est.iter().map(|e| c * e).collect();
            let b = normalized_rmse(&scaled, c * truth).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn coverage_is_invariant_under_increasing_maps(
            ints in proptest::collection::vec((-5.0f64..5.0, 0.0f64..4.0), 1..30),
            truth in -6.0f64..6.0,
        ) {
            let iv: Vec<(f64, f64)> = ints.iter().map(|&(lo, w)| (lo, lo + w)).collect();
            let f = |x: f64| x.exp() * 3.0 + 1.0;
            let mapped: Vec<(f64, f64)> = iv.iter().map(|&(lo, hi)| (f(lo), f(hi))).collect();
            let a = coverage95(&iv, truth).unwrap();
            prop_assert_eq!(a, coverage95(&mapped, f(truth)).unwrap());
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
