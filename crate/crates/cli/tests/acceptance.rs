//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs under `cargo test` with its own harness. Failures are reported but do
//! not fail the process unless `SCOREPRIOR_ACCEPTANCE_STRICT=1`. Set
//! `SCOREPRIOR_ACCEPTANCE_QUICK=1` to skip the minutes-scale tiers.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::Rng as _;
use scoreprior::eval::iqr_monotone_cells;
use scoreprior::mcmc::{log_marginal_likelihood, VariancePrior};
use scoreprior::models::EightSchoolsData;
use scoreprior::priors::{InverseGamma, ScorePriorPositive};
use scoreprior::rng::stream;
use scoreprior::scorerule::{
    bregman_div_1d, bregman_div_2d, decomposition_check, fisher_quadrature, hyvarinen_score, kl_quadrature,
    score_order2, score_order_m, ConvexGenerator, DensityGrid, OrderMPhi, PhiGenerator,
};
use scoreprior::densities::{Density, Normal};
use scoreprior_cli::config::{Experiment, RunConfig};
use scoreprior_cli::experiments::{
    self, dic_argmin, galaxy_dataset, galaxy_dic_table, mixture_single_fit, scalar_reports, schools_fit, score_checks,
    score_zero_exact, score_zero_f64,
};

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn galaxy_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/galaxies.txt")
}

fn check(name: &str) -> experiments::Check {
    score_checks().into_iter().find(|c| c.name == name).expect("known check")
}

fn c1() -> Outcome {
    let t = Instant::now();
    let exact: Vec<f64> = [0.5, 1.0, 10.0].iter().map(|&a| score_zero_exact(a)).collect();
    let secs = t.elapsed().as_secs_f64();
    let double: Vec<f64> = [0.5, 1.0, 10.0].iter().map(|&a| score_zero_f64(a)).collect();
    let worst = exact.iter().cloned().fold(0.0, f64::max);
    Outcome {
        id: 1,
        pass: worst <= 1e-12 && secs < 1.0,
        detail: format!(
            "max|S| exact {worst:.1e} (f64 roundoff {:.1e}/{:.1e}/{:.1e} for a=0.5/1/10), {secs:.2}s",
            double[0], double[1], double[2]
        ),
    }
}

fn c2() -> Outcome {
    let t = Instant::now();
    let sol = scoreprior::scorerule::solve_score_zero(1.0, 20.0, 1e-3).unwrap();
    let err = sol
        .grid
        .x()
        .iter()
        .zip(sol.grid.q())
        .map(|(x, q)| (q - 1.0 / ((1.0 + x) * (1.0 + x))).abs())
        .fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    Outcome {
        id: 2,
        pass: err <= 1e-6 && secs < 1.0,
        detail: format!("sup error {err:.2e} on [0,20], {secs:.3}s"),
    }
}

fn c3() -> Outcome {
    let mut rng = stream(3, 0);
    let s = score_order2(ConvexGenerator::square());
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q = rng.random_range(0.1..2.0);
        let q1 = rng.random_range(-2.0..2.0);
        let q2 = rng.random_range(-2.0..2.0);
        let got = s.eval(&[q, q1, q2]).unwrap();
        worst = worst.max((got - hyvarinen_score(q, q1, q2).unwrap()).abs());
    }
    let qs: Vec<f64> = (0..100).map(|_| rng.random_range(1e-3..5.0)).collect();
    let grid = DensityGrid::from_values((0..100).map(f64::from).collect(), qs.clone(), 0).unwrap();
    let log = score_order_m(OrderMPhi::log_entropy()).eval_grid(&grid).unwrap();
    let exact = log.values.iter().zip(&qs).all(|(v, q)| *v == -q.ln());
    Outcome {
        id: 3,
        pass: worst <= 1e-10 && exact,
        detail: format!("order-2 u^2 vs Hyvarinen max diff {worst:.1e}; order-0 log score exact: {exact}"),
    }
}

fn normal_grid(mean: f64, sd: f64) -> DensityGrid {
    let n = Normal::new(mean, sd);
    DensityGrid::from_analytic(-14.0, 14.0, 1e-3, 2, |x, j| n.deriv(x, j))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let mut rng = stream(4, 0);
    let (mut min_div, mut kl_err, mut l2_err, mut fisher_err): (f64, f64, f64, f64) = (f64::INFINITY, 0.0, 0.0, 0.0);
    for _ in 0..50 {
        let (m1, s1) = (rng.random_range(-1.0..1.0), rng.random_range(0.6..1.8));
        let (m2, s2) = (rng.random_range(-1.0..1.0), rng.random_range(0.6..1.8));
        let (p, q) = (normal_grid(m1, s1), normal_grid(m2, s2));
        let kl = bregman_div_1d(&ConvexGenerator::entropy(), &p, &q).unwrap();
        let l2 = bregman_div_1d(&ConvexGenerator::square(), &p, &q).unwrap();
        let fisher = bregman_div_2d(&PhiGenerator::fisher(), &p, &q).unwrap();
        min_div = min_div.min(kl).min(l2).min(fisher);
        let (v1, v2) = (s1 * s1, s2 * s2);
        let kl_exact = (s2 / s1).ln() + (v1 + (m1 - m2).powi(2)) / (2.0 * v2) - 0.5;
        kl_err = kl_err.max((kl - kl_exact).abs()).max((kl - kl_quadrature(&p, &q).unwrap()).abs());
        let direct: Vec<f64> = p.q().iter().zip(q.q()).map(|(a, b)| (a - b) * (a - b)).collect();
        l2_err = l2_err.max((l2 - p.integrate(&direct)).abs());
        let (a, b) = (1.0 / v2 - 1.0 / v1, m1 / v1 - m2 / v2);
        let fisher_exact = a * a * (v1 + m1 * m1) + 2.0 * a * b * m1 + b * b;
        fisher_err = fisher_err
            .max((fisher - fisher_exact).abs())
            .max((fisher - fisher_quadrature(&p, &q).unwrap()).abs());
    }
    let (p, q) = (normal_grid(0.0, 1.0), normal_grid(0.0, 2.0));
    let dec = decomposition_check(&PhiGenerator::fisher(), &p, &q).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let pass = min_div >= -1e-12
        && kl_err <= 1e-4
        && l2_err <= 1e-6
        && fisher_err <= 1e-3
        && (dec.div - 0.5625).abs() <= 2e-3
        && dec.residual <= 1e-3 * (1.0 + dec.div.abs())
        && secs < 10.0;
    Outcome {
        id: 4,
        pass,
        detail: format!(
            "min D {min_div:.1e}; KL err {kl_err:.1e}, L2 err {l2_err:.1e}, Fisher err {fisher_err:.1e}; \
             D(N(0,1),N(0,4)) = {:.5}; decomposition residual {:.1e}; {secs:.1}s",
            dec.div, dec.residual
        ),
    }
}

fn c5() -> Outcome {
    let h = check("euler_lagrange_hyvarinen_normal");
    let l = check("euler_lagrange_inverse_square_lomax");
    let c = check("euler_lagrange_counterexample");
    Outcome {
        id: 5,
        pass: h.pass() && l.pass() && c.pass(),
        detail: format!(
            "Hyvarinen/normal {:.1e}, u^-2/Lomax {:.1e}, counterexample {:.2}",
            h.value, l.value, c.value
        ),
    }
}

fn c6() -> Outcome {
    let grid = scoreprior::priors::standard_grid();
    let (one, two) = (
        scoreprior::priors::invariance_check(1.0, &grid),
        scoreprior::priors::invariance_check(2.0, &grid),
    );
    Outcome {
        id: 6,
        pass: one <= 1e-12 && two > 1e-2,
        detail: format!("a=1: {one:.1e}, a=2: {two:.3}"),
    }
}

/// Runs the scalar study and compares each cell with `(rmse, coverage)` targets.
fn scalar_tier(
    exp: Experiment,
    truths: &[f64],
    m: usize,
    targets: impl Fn(f64, bool) -> (Option<f64>, f64),
    rmse_tol: f64,
    cov_tol: f64,
) -> (bool, String) {
    let mut cfg = RunConfig::defaults(exp);
    cfg.m = m;
    match exp {
        Experiment::SimScale => cfg.sigma = truths.to_vec(),
        _ => cfg.mu = truths.to_vec(),
    }
    let family = match exp {
        Experiment::SimScale => scoreprior::eval::ScalarFamily::NormalScale,
        _ => scoreprior::eval::ScalarFamily::LogNormalLocation,
    };
    let reports = scalar_reports(&cfg, family).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in &reports {
        let score = matches!(r.plan.prior, scoreprior::eval::PriorChoice::Score { .. });
        let (want_rmse, want_cov) = targets(r.plan.truth, score);
        let Some(want_rmse) = want_rmse else { continue };
        let rmse = r.rmse.map_or(f64::NAN, |m| m.value);
        let cov = r.coverage.unwrap_or(f64::NAN);
        let ok = (rmse - want_rmse).abs() <= rmse_tol && (cov - want_cov).abs() <= cov_tol;
        pass &= ok;
        parts.push(format!(
            "{}={} {}: {rmse:.4}/{cov:.3}{}",
            if exp == Experiment::SimScale { "sigma" } else { "mu" },
            r.plan.truth,
            r.prior_label(),
            if ok { "" } else { " (out)" }
        ));
    }
    (pass, parts.join("; "))
}

/// Score-prior bands are centred on 0.072 and 0.91; Jeffreys bands on its
/// own table entries for each `σ`.
fn scale_targets(sigma: f64, score: bool) -> (Option<f64>, f64) {
    let jeffreys = [(0.25, 0.0723, 0.91), (1.0, 0.0721, 0.91), (20.0, 0.0722, 0.90)];
    if score {
        return (Some(0.072), 0.91);
    }
    let (_, rmse, cov) = jeffreys.iter().copied().find(|r| r.0 == sigma).expect("tabled sigma");
    (Some(rmse), cov)
}

fn c7(quick: bool) -> Vec<Outcome> {
    let sigmas = [0.25, 1.0, 20.0];
    let t = Instant::now();
    let (smoke, smoke_detail) = scalar_tier(Experiment::SimScale, &sigmas, 25, scale_targets, 0.02, 0.10);
    let secs = t.elapsed().as_secs_f64();
    let mut out = vec![Outcome {
        id: 7,
        pass: smoke && secs < 60.0,
        detail: format!("smoke tier M=25 (+-0.02/+-0.10, {secs:.1}s): {smoke_detail}"),
    }];
    if !quick {
        let (full, detail) = scalar_tier(Experiment::SimScale, &sigmas, 250, scale_targets, 0.010, 0.05);
        out.push(Outcome {
            id: 7,
            pass: full,
            detail: format!("full tier M=250 (+-0.010/+-0.05): {detail}"),
        });
    }
    out
}

fn c8() -> Outcome {
    let targets = |_mu: f64, score: bool| if score { (Some(0.0085), 0.98) } else { (None, 0.0) };
    let (pass, detail) = scalar_tier(Experiment::SimLocation, &[1.0, 5.0, 100.0], 250, targets, 0.002, 0.04);
    Outcome {
        id: 8,
        pass,
        detail: format!("normalized RMSE/coverage: {detail}"),
    }
}

fn c9() -> Outcome {
    let cfg = RunConfig::defaults(Experiment::MixtureSingle);
    let mut good = 0;
    let mut misses = Vec::new();
    for seed in 1..=10u64 {
        let (_, rows) = mixture_single_fit(&cfg, seed).unwrap();
        let out: Vec<&str> = rows.iter().filter(|r| r.covers() == Some(false)).map(|r| r.name.as_str()).collect();
        if out.is_empty() {
            good += 1;
        } else {
            misses.push(format!("seed {seed}: {}", out.join(",")));
        }
    }
    Outcome {
        id: 9,
        pass: good >= 9,
        detail: format!("{good}/10 seeds cover all 9 parameters; misses: [{}]", misses.join("; ")),
    }
}

fn c10() -> Outcome {
    let cfg = RunConfig::defaults(Experiment::MixtureRepeat);
    let t = Instant::now();
    let rows = experiments::mixture_repeat_rows(&cfg).unwrap();
    let (good, total) = iqr_monotone_cells(&rows, &cfg.k, &cfg.n);
    Outcome {
        id: 10,
        pass: good as f64 >= 0.8 * total as f64,
        detail: format!(
            "IQR shrinks monotonically in {good}/{total} cells ({:.0}%), {:.0}s",
            100.0 * good as f64 / total as f64,
            t.elapsed().as_secs_f64()
        ),
    }
}

fn c11() -> Outcome {
    let mut cfg = RunConfig::defaults(Experiment::GalaxyDic);
    cfg.galaxy = galaxy_path();
    let (data, _) = galaxy_dataset(&cfg).unwrap();
    let mut hits = 0;
    let mut dic4 = Vec::new();
    let mut argmins = Vec::new();
    for seed in 1..=10u64 {
        let table = galaxy_dic_table(&data, &cfg, seed).unwrap();
        let best = dic_argmin(&table);
        argmins.push(best);
        hits += usize::from(best == 4);
        dic4.push(table.iter().find(|(k, _, _)| *k == 4).map(|(_, d, _)| d.dic).unwrap());
    }
    let mean4 = dic4.iter().sum::<f64>() / dic4.len() as f64;
    let in_band = dic4.iter().all(|d| (d - 371.5).abs() <= 25.0);
    Outcome {
        id: 11,
        pass: hits >= 8 && in_band,
        detail: format!(
            "argmin k over 10 seeds {argmins:?} ({hits}/10 at k=4); k=4 DIC range {:.1}..{:.1}, mean {mean4:.1}",
            dic4.iter().cloned().fold(f64::INFINITY, f64::min),
            dic4.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        ),
    }
}

/// Posterior mean and 97.5% quantile of `σ_α²` by quadrature on `log σ_α²`.
fn schools_quadrature(prior: VariancePrior) -> (f64, f64) {
    let data = EightSchoolsData::standard();
    let (lo, hi, n) = (-25.0, 12.0, 200_000);
    let h = (hi - lo) / n as f64;
    let mut w = Vec::with_capacity(n + 1);
    let (mut z, mut m) = (0.0, 0.0);
    for i in 0..=n {
        let t = lo + h * i as f64;
        let v = t.exp();
        let wi = (prior.log_pdf(v) + log_marginal_likelihood(&data, v) + t).exp();
        w.push((v, wi));
        z += wi;
        m += wi * v;
    }
    let mut acc = 0.0;
    let upper = w
        .iter()
        .find(|(_, wi)| {
            acc += wi / z;
            acc >= 0.975
        })
        .map(|(v, _)| *v)
        .unwrap_or(f64::NAN);
    (m / z, upper)
}

fn c12() -> Outcome {
    let cfg = RunConfig::defaults(Experiment::Schools);
    let (_, score) = schools_fit(&cfg, true).unwrap();
    let (_, ig) = schools_fit(&cfg, false).unwrap();
    let pass = (score.mean - 2.3).abs() <= 1.5 && score.hi95 > ig.hi95 && (ig.mean - 3.8).abs() <= 1.5;
    let (qs_mean, qs_hi) = schools_quadrature(VariancePrior::Score(ScorePriorPositive::default()));
    let (qi_mean, qi_hi) = schools_quadrature(VariancePrior::InverseGamma(InverseGamma::default()));
    Outcome {
        id: 12,
        pass,
        detail: format!(
            "score mean {:.2} (upper {:.1}), IG mean {:.2} (upper {:.1}); quadrature: score {qs_mean:.2} (upper \
             {qs_hi:.1}), IG {qi_mean:.2} (upper {qi_hi:.1})",
            score.mean, score.hi95, ig.mean, ig.hi95
        ),
    }
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_scoreprior"))
        .args(args)
        .env_remove(scoreprior_cli::OUT_ENV)
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn c13() -> Outcome {
    let root = tempfile::tempdir().unwrap();
    let out = root.path().to_str().unwrap();
    let galaxy = galaxy_path();
    let galaxy = galaxy.to_str().unwrap();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("score-check", vec![]),
        ("prior-table", vec![]),
        ("sim-scale", vec!["--M", "20", "--sigma", "1,20"]),
        ("sim-location", vec!["--M", "20", "--mu", "0,5"]),
        ("mixture-single", vec!["--n-iter", "6000", "--burn-in", "1000", "--thin", "10"]),
        (
            "mixture-repeat",
            vec!["--M", "2", "--n", "50,100", "--k", "3", "--n-iter", "3000", "--burn-in", "500", "--thin", "10"],
        ),
        (
            "galaxy-dic",
            vec!["--galaxy", galaxy, "--k", "2,4", "--n-iter", "4000", "--burn-in", "1000", "--thin", "10"],
        ),
        ("schools", vec![]),
    ];
    let mut failures = Vec::new();
    for (exp, extra) in &runs {
        let mut args = vec![*exp, "--out", out, "--seed", "11"];
        args.extend(extra);
        let first = run_bin(&args);
        let dir = root.path().join(format!("{exp}-seed11"));
        let replay_dir = root.path().join(format!("{exp}-replay"));
        let manifest = dir.join("manifest.txt");
        let second = run_bin(&[
            "replay",
            manifest.to_str().unwrap(),
            "--out",
            replay_dir.to_str().unwrap(),
        ]);
        let (a, b) = (csv_files(&dir), csv_files(&replay_dir));
        if !first.status.success() || !second.status.success() || a.is_empty() || a != b {
            failures.push(*exp);
        }
    }
    Outcome {
        id: 13,
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("all {} experiments replay byte-identical CSVs from their manifests", runs.len())
        } else {
            format!("replay mismatch: {failures:?}")
        },
    }
}

fn main() {
    // cargo test passes harness flags such as --list; this target has no sub-tests
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let quick = std::env::var("SCOREPRIOR_ACCEPTANCE_QUICK").is_ok_and(|v| v == "1");
    let strict = std::env::var("SCOREPRIOR_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut outcomes = vec![c1(), c2(), c3(), c4(), c5(), c6()];
    outcomes.extend(c7(quick));
    if !quick {
        outcomes.extend([c8(), c9(), c10(), c11(), c12()]);
    }
    outcomes.push(c13());
    println!();
    for o in &outcomes {
        println!(
            "criterion {:>2}: {} | {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
