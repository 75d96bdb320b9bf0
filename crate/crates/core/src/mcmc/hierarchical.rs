use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::chain::{Chain, McmcConfig, Proposals};
use crate::error::Result;
use crate::models::EightSchoolsData;
use crate::priors::{InverseGamma, Prior, ScorePriorPositive};
use crate::rng::{stream, Rng, MCMC_STREAM};

/// Prior on the between-group variance `σ_α²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariancePrior {
    InverseGamma(InverseGamma),
    Score(ScorePriorPositive),
}

impl VariancePrior {
    pub fn log_pdf(&self, v: f64) -> f64 {
        match self {
            VariancePrior::InverseGamma(p) => p.log_density(v),
            VariancePrior::Score(p) => p.log_density(v),
        }
    }
}

/// How `σ_α²` is updated in each sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sweep {
    /// `μ | α`, `α | μ, σ_α²`, `σ_α² | α` only.
    Conditional,
    /// A Metropolis step on `log σ_α²` under `p(σ_α² | y)` with `μ` and `α`
    /// integrated out, then `μ | σ_α²`, `α | μ, σ_α²`, `σ_α² | α`.
    #[default]
    Collapsed,
}

/// Mean and variance of `α_j | μ, σ_α², y_j`.
pub fn alpha_conditional(y: f64, s: f64, mu: f64, sigma2: f64) -> (f64, f64) {
    let prec = 1.0 / (s * s) + 1.0 / sigma2;
    ((y - mu) / (s * s) / prec, 1.0 / prec)
}

/// Mean and variance of `μ | α, y` under a flat prior.
pub fn mu_conditional(data: &EightSchoolsData, alpha: &[f64]) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for ((&y, &s), &a) in data.y.iter().zip(&data.s).zip(alpha) {
        num += (y - a) / (s * s);
        den += 1.0 / (s * s);
    }
    (num / den, 1.0 / den)
}

/// Mean and variance of `μ | σ_α², y` with the effects integrated out.
pub fn mu_marginal(data: &EightSchoolsData, sigma2: f64) -> (f64, f64) {
    let (mut num, mut den) = (0.0, 0.0);
    for (&y, &s) in data.y.iter().zip(&data.s) {
        let w = 1.0 / (s * s + sigma2);
        num += w * y;
        den += w;
    }
    (num / den, 1.0 / den)
}

/// `log p(y | σ_α²)` up to a constant, with `μ` (flat) and `α` integrated out.
pub fn log_marginal_likelihood(data: &EightSchoolsData, sigma2: f64) -> f64 {
    let (mhat, var) = mu_marginal(data, sigma2);
    let mut out = 0.5 * var.ln();
    for (&y, &s) in data.y.iter().zip(&data.s) {
        let v = s * s + sigma2;
        out -= 0.5 * v.ln() + 0.5 * (y - mhat) * (y - mhat) / v;
    }
    out
}

fn normal(mean: f64, var: f64, rng: &mut Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mean + var.sqrt() * z
}

/// Blocked Gibbs sampler for `y_j ~ N(μ + α_j, s_j²)`, `α_j ~ N(0, σ_α²)`,
/// `π(μ) ∝ 1`. Uses [`Sweep::Collapsed`].
pub fn hierarchical_sampler(data: &EightSchoolsData, prior: VariancePrior, cfg: &McmcConfig) -> Result<Chain> {
    hierarchical_sampler_with(data, prior, cfg, Sweep::default())
}

pub fn hierarchical_sampler_with(
    data: &EightSchoolsData,
    prior: VariancePrior,
    cfg: &McmcConfig,
    sweep: Sweep,
) -> Result<Chain> {
    cfg.validate()?;
    let j = data.len();
    let mut blocks = Vec::new();
    if sweep == Sweep::Collapsed {
        blocks.push("log_sigma_alpha2_marginal".to_string());
    }
    if matches!(prior, VariancePrior::Score(_)) {
        blocks.push("log_sigma_alpha2".to_string());
    }
    let mut rng = stream(cfg.seed, MCMC_STREAM);
    let mut props = Proposals::new(cfg, blocks.len());

    let mut sigma2: f64 = 1.0;
    let mut alpha = vec![0.0; j];
    let mut draws = Vec::with_capacity(cfg.kept());

    for it in 0..cfg.n_iter {
        let mut block = 0;
        let mu = if sweep == Sweep::Collapsed {
            let target = |t: f64| prior.log_pdf(t.exp()) + log_marginal_likelihood(data, t.exp()) + t;
            let t = sigma2.ln();
            let z: f64 = StandardNormal.sample(&mut rng);
            let cand = t + props.scale(block) * z;
            let accept = rng.random::<f64>().ln() < target(cand) - target(t);
            if accept {
                sigma2 = cand.exp();
            }
            props.record(block, it, accept);
            block += 1;
            let (m, v) = mu_marginal(data, sigma2);
            normal(m, v, &mut rng)
        } else {
            let (m, v) = mu_conditional(data, &alpha);
            normal(m, v, &mut rng)
        };
        for (a, (&y, &s)) in alpha.iter_mut().zip(data.y.iter().zip(&data.s)) {
            let (m, v) = alpha_conditional(y, s, mu, sigma2);
            *a = normal(m, v, &mut rng);
        }
        let ss: f64 = alpha.iter().map(|a| a * a).sum();
        match prior {
            VariancePrior::InverseGamma(ig) => {
                let post = InverseGamma::new(ig.shape + 0.5 * j as f64, ig.rate + 0.5 * ss)?;
                sigma2 = post.sample(&mut rng);
            }
            VariancePrior::Score(p) => {
                let target = |t: f64| p.log_density(t.exp()) - 0.5 * j as f64 * t - 0.5 * ss * (-t).exp() + t;
                let t = sigma2.ln();
                let z: f64 = StandardNormal.sample(&mut rng);
                let cand = t + props.scale(block) * z;
                let accept = rng.random::<f64>().ln() < target(cand) - target(t);
                if accept {
                    sigma2 = cand.exp();
                }
                props.record(block, it, accept);
            }
        }
        if cfg.keeps(it) {
            let mut row = Vec::with_capacity(j + 2);
            row.push(mu);
            row.extend(&alpha);
            row.push(sigma2);
            draws.push(row);
        }
    }

    let mut names = vec!["mu".to_string()];
    names.extend(data.names.iter().map(|n| format!("alpha_{n}")));
    names.push("sigma_alpha2".into());
    Ok(Chain {
        names,
        draws,
        blocks,
        acceptance: props.rates(),
        final_scales: props.scales(),
        config: cfg.clone(),
    })
}
