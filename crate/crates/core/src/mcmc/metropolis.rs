use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::chain::{Chain, McmcConfig, Proposals};
use crate::error::{Error, Result};
use crate::priors::Support;
use crate::rng::{stream, MCMC_STREAM};

/// Gaussian random-walk Metropolis for a scalar.
///
/// Positive parameters are updated on `log θ`; the target there is
/// `log_post(e^t) + t`. The chain stores `θ` itself under the name `theta`.
pub fn rw_metropolis(log_post: impl Fn(f64) -> f64, init: f64, support: Support, cfg: &McmcConfig) -> Result<Chain> {
    cfg.validate()?;
    if !support.contains(init) {
        return Err(Error::Initialization(init));
    }
    let to_theta = |t: f64| match support {
        Support::Positive => t.exp(),
        Support::Real => t,
    };
    let target = |t: f64| {
        let lp = log_post(to_theta(t));
        match support {
            Support::Positive => lp + t,
            Support::Real => lp,
        }
    };
    let mut t = match support {
        Support::Positive => init.ln(),
        Support::Real => init,
    };
    let mut lp = target(t);
    if !lp.is_finite() {
        return Err(Error::Initialization(init));
    }
    let mut rng = stream(cfg.seed, MCMC_STREAM);
    let mut props = Proposals::new(cfg, 1);
    let mut draws = Vec::with_capacity(cfg.kept());
    for it in 0..cfg.n_iter {
        let z: f64 = StandardNormal.sample(&mut rng);
        let cand = t + props.scale(0) * z;
        let lp_cand = target(cand);
        let u: f64 = rng.random();
        let accept = lp_cand.is_finite() && u.ln() < lp_cand - lp;
        if accept {
            t = cand;
            lp = lp_cand;
        }
        props.record(0, it, accept);
        if cfg.keeps(it) {
            draws.push(vec![to_theta(t)]);
        }
    }
    Ok(Chain {
        names: vec!["theta".into()],
        draws,
        blocks: vec!["theta".into()],
        acceptance: props.rates(),
        final_scales: props.scales(),
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::NormalScaleModel;
    use crate::priors::ScorePriorPositive;
    use crate::rng::{stream, DATA_STREAM};
    use crate::stats::{mean, sd};

    #[test]
    fn recovers_standard_normal() {
        let cfg = McmcConfig::new(101_000, 1000, 1, 42).unwrap();
        let chain = rw_metropolis(|x| -0.5 * x * x, 0.0, Support::Real, &cfg).unwrap();
        assert_eq!(chain.len(), 100_000);
        let xs = chain.column(0);
        assert!(mean(&xs).abs() < 0.02, "{}", mean(&xs));
        assert!((sd(&xs) - 1.0).abs() < 0.03, "{}", sd(&xs));
        assert!(chain.acceptance_flags().is_empty(), "{:?}", chain.acceptance);
    }

    #[test]
    fn same_seed_same_chain() {
        let cfg = McmcConfig::new(2000, 100, 3, 7).unwrap();
        let a = rw_metropolis(|x| -x.abs(), 0.3, Support::Real, &cfg).unwrap();
        let b = rw_metropolis(|x| -x.abs(), 0.3, Support::Real, &cfg).unwrap();
        assert_eq!(a, b);
        let c = rw_metropolis(|x| -x.abs(), 0.3, Support::Real, &cfg.clone().with_seed(8)).unwrap();
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn positive_support_uses_jacobian() {
        // Exponential(1) target: mean 1
        let cfg = McmcConfig::new(200_000, 2000, 2, 3).unwrap();
        let chain = rw_metropolis(|x| -x, 1.0, Support::Positive, &cfg).unwrap();
        assert!((mean(&chain.column(0)) - 1.0).abs() < 0.03);
        assert!(chain.column(0).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn bad_initialization() {
        let cfg = McmcConfig::new(100, 10, 1, 0).unwrap();
        assert!(matches!(
            rw_metropolis(|x| if x > 1.0 { 0.0 } else { f64::NEG_INFINITY }, 0.5, Support::Real, &cfg),
            Err(Error::Initialization(_))
        ));
        assert!(matches!(
            rw_metropolis(|_| 0.0, -1.0, Support::Positive, &cfg),
            Err(Error::Initialization(_))
        ));
    }

    #[test]
    fn normal_scale_posterior_is_near_truth() {
        let mut rng = stream(11, DATA_STREAM);
        let data: Vec<f64> = (0..100).map(|_| StandardNormal.sample(&mut rng)).collect();
        let model = NormalScaleModel::new(0.0, data);
        let prior = ScorePriorPositive::default();
        let cfg = McmcConfig::scalar_schedule(11);
        let post = |s: f64| model.loglik(s).unwrap_or(f64::NEG_INFINITY) + prior.log_pdf(s).unwrap_or(f64::NEG_INFINITY);
        let chain = rw_metropolis(post, model.mle(), Support::Positive, &cfg).unwrap();
        assert!((chain.mean(0) - 1.0).abs() < 0.25);
    }
}
