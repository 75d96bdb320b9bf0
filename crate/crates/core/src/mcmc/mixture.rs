use std::cmp::Ordering;

use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::chain::{Chain, McmcConfig, Proposals};
use crate::error::{Error, Result};
use crate::priors::{Prior, ScorePriorPositive, ScorePriorReal};
use crate::rng::{stream, Rng, MCMC_STREAM};
use crate::stats::{mean, sd};

/// Dirichlet concentration and the per-component location and scale priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixturePriors {
    pub concentration: f64,
    pub location: ScorePriorReal,
    pub scale: ScorePriorPositive,
}

impl Default for MixturePriors {
    fn default() -> Self {
        Self {
            concentration: 1.0,
            location: ScorePriorReal::default(),
            scale: ScorePriorPositive::default(),
        }
    }
}

/// Current values of a Gaussian mixture sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePosteriorState {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Component of each observation, 0-based.
    pub z: Vec<usize>,
}

impl MixturePosteriorState {
    /// Splits the sorted data into `k` contiguous groups of near-equal size
    /// and uses their proportions, means and standard deviations.
    pub fn quantile_partition(data: &[f64], k: usize) -> Result<Self> {
        let n = data.len();
        if k == 0 || k > n {
            return Err(Error::Config(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| data[a].total_cmp(&data[b]));
        let overall = if n > 1 { sd(data) } else { 1.0 };
        let fallback = if overall > 0.0 { overall / k as f64 } else { 1.0 };
        let mut z = vec![0; n];
        let mut weights = Vec::with_capacity(k);
        let mut means = Vec::with_capacity(k);
        let mut sds = Vec::with_capacity(k);
        for l in 0..k {
            let (lo, hi) = (l * n / k, (l + 1) * n / k);
            let group: Vec<f64> = order[lo..hi].iter().map(|&i| data[i]).collect();
            for &i in &order[lo..hi] {
                z[i] = l;
            }
            weights.push(group.len() as f64 / n as f64);
            means.push(mean(&group));
            let s = if group.len() > 1 { sd(&group) } else { 0.0 };
            sds.push(if s > 0.0 { s } else { fallback });
        }
        Ok(Self { weights, means, sds, z })
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    fn row(&self) -> Vec<f64> {
        let mut r = self.weights.clone();
        r.extend(&self.means);
        r.extend(&self.sds);
        r
    }
}

/// Column names `w1..wk, mu1..muk, sigma1..sigmak`.
pub fn mixture_names(k: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=k).map(|l| format!("w{l}")).collect();
    names.extend((1..=k).map(|l| format!("mu{l}")));
    names.extend((1..=k).map(|l| format!("sigma{l}")));
    names
}

/// Number of components of a chain laid out as [`mixture_names`].
pub fn mixture_k(chain: &Chain) -> Result<usize> {
    let k = chain.dim() / 3;
    if k == 0 || chain.names != mixture_names(k) {
        return Err(Error::Contract("chain is not a mixture chain".into()));
    }
    Ok(k)
}

/// Metropolis-within-Gibbs for a `k`-component Gaussian mixture.
///
/// One sweep draws the allocations from their categorical full conditionals,
/// the weights from `Dirichlet(c + n_1, …, c + n_k)`, then updates each `μ_l`
/// and `log σ_l` by random-walk Metropolis (blocks `2l` and `2l + 1`).
pub fn mwg_mixture(data: &[f64], k: usize, priors: &MixturePriors, cfg: &McmcConfig) -> Result<Chain> {
    cfg.validate()?;
    let mut state = MixturePosteriorState::quantile_partition(data, k)?;
    let mut rng = stream(cfg.seed, MCMC_STREAM);
    let mut props = Proposals::new(cfg, 2 * k);
    let mut draws = Vec::with_capacity(cfg.kept());
    let mut logp = vec![0.0; k];
    for it in 0..cfg.n_iter {
        allocate(data, &mut state, &mut logp, &mut rng);
        let mut count = vec![0.0; k];
        for &l in &state.z {
            count[l] += 1.0;
        }
        draw_weights(&mut state, &count, priors.concentration, &mut rng);
        for l in 0..k {
            let members: Vec<f64> = data.iter().zip(&state.z).filter(|(_, &zl)| zl == l).map(|(&y, _)| y).collect();
            let ss = |mu: f64| members.iter().map(|y| (y - mu) * (y - mu)).sum::<f64>();

            let sigma = state.sds[l];
            let mu_target = |mu: f64| -ss(mu) / (2.0 * sigma * sigma) + priors.location.log_density(mu);
            let (mu, acc) = rw_step(state.means[l], props.scale(2 * l), mu_target, &mut rng);
            state.means[l] = mu;
            props.record(2 * l, it, acc);

            let n = count[l];
            let resid = ss(mu);
            let log_sigma_target =
                |t: f64| -n * t - resid / (2.0 * (2.0 * t).exp()) + priors.scale.log_density(t.exp()) + t;
            let (t, acc) = rw_step(state.sds[l].ln(), props.scale(2 * l + 1), log_sigma_target, &mut rng);
            state.sds[l] = t.exp();
            props.record(2 * l + 1, it, acc);
        }
        if cfg.keeps(it) {
            draws.push(state.row());
        }
    }
    let mut blocks = Vec::with_capacity(2 * k);
    for l in 1..=k {
        blocks.push(format!("mu{l}"));
        blocks.push(format!("log_sigma{l}"));
    }
    Ok(Chain {
        names: mixture_names(k),
        draws,
        blocks,
        acceptance: props.rates(),
        final_scales: props.scales(),
        config: cfg.clone(),
    })
}

fn allocate(data: &[f64], state: &mut MixturePosteriorState, logp: &mut [f64], rng: &mut Rng) {
    let k = state.k();
    let offset: Vec<f64> = (0..k).map(|l| state.weights[l].ln() - state.sds[l].ln()).collect();
    let inv2v: Vec<f64> = state.sds.iter().map(|s| 0.5 / (s * s)).collect();
    for (i, &y) in data.iter().enumerate() {
        let mut top = f64::NEG_INFINITY;
        for l in 0..k {
            let d = y - state.means[l];
            logp[l] = offset[l] - d * d * inv2v[l];
            top = top.max(logp[l]);
        }
        let mut total = 0.0;
        for v in logp.iter_mut() {
            *v = (*v - top).exp();
            total += *v;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = k - 1;
        for (l, &p) in logp.iter().enumerate() {
            if u < p {
                pick = l;
                break;
            }
            u -= p;
        }
        state.z[i] = pick;
    }
}

fn draw_weights(state: &mut MixturePosteriorState, count: &[f64], concentration: f64, rng: &mut Rng) {
    let mut total = 0.0;
    for (w, &c) in state.weights.iter_mut().zip(count) {
        let g = Gamma::new(concentration + c, 1.0).expect("positive shape");
        // guard against underflow for tiny shapes
        *w = g.sample(rng).max(f64::MIN_POSITIVE);
        total += *w;
    }
    for w in state.weights.iter_mut() {
        *w /= total;
    }
}

fn rw_step(x: f64, scale: f64, target: impl Fn(f64) -> f64, rng: &mut Rng) -> (f64, bool) {
    let z: f64 = StandardNormal.sample(rng);
    let cand = x + scale * z;
    let delta = target(cand) - target(x);
    let u: f64 = rng.random();
    // NaN compares false and rejects
    if u.ln() < delta {
        (cand, true)
    } else {
        (x, false)
    }
}

fn relabel(chain: &Chain, order: impl Fn(&[f64], &[f64], usize, usize) -> Ordering) -> Result<Chain> {
    let k = mixture_k(chain)?;
    let mut out = chain.clone();
    for row in out.draws.iter_mut() {
        let (w, rest) = row.split_at(k);
        let (mu, _) = rest.split_at(k);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.sort_by(|&a, &b| order(w, mu, a, b));
        let old = row.clone();
        for (dst, &src) in perm.iter().enumerate() {
            row[dst] = old[src];
            row[k + dst] = old[k + src];
            row[2 * k + dst] = old[2 * k + src];
        }
    }
    Ok(out)
}

/// Per-draw permutation putting weights in descending order; equal weights
/// are ordered by ascending mean.
pub fn relabel_by_weight(chain: &Chain) -> Result<Chain> {
    relabel(chain, |w, mu, a, b| w[b].total_cmp(&w[a]).then(mu[a].total_cmp(&mu[b])))
}

/// Per-draw permutation putting means in ascending order.
pub fn relabel_by_mean(chain: &Chain) -> Result<Chain> {
    relabel(chain, |_, mu, a, b| mu[a].total_cmp(&mu[b]))
}

/// Mixture log-likelihood of one row of a chain laid out as
/// [`mixture_names`].
pub fn mixture_row_loglik(row: &[f64], data: &[f64]) -> f64 {
    let k = row.len() / 3;
    let (w, rest) = row.split_at(k);
    let (mu, sd) = rest.split_at(k);
    let mut terms = vec![0.0; k];
    data.iter()
        .map(|&y| {
            for l in 0..k {
                terms[l] = w[l].ln() + crate::models::normal_ln_pdf(y, mu[l], sd[l]);
            }
            crate::stats::log_sum_exp(&terms)
        })
        .sum()
}
