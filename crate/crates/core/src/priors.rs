//! Prior distributions.
//!
//! [`ScorePriorPositive`] is `a/(a + x)²` on `(0, ∞)`, a Lomax density with
//! shape 1 and scale `a`; [`ScorePriorReal`] is its reflection about 0,
//! `½a/(|x| + a)²`. Both default to `a = 1`, the only value for which the
//! positive prior is unchanged by `θ ↦ 1/θ`.
//!
//! Comparators: the Jeffreys scale prior `1/σ`, the flat prior, and an
//! inverse gamma on a variance. The first two are improper and only expose an
//! unnormalized log-density.

use rand::Rng as _;
use rand_distr::{Distribution, Gamma};
use statrs::distribution::{Continuous, ContinuousCDF, InverseGamma as StatrsInverseGamma};

use crate::densities::{Density, Lomax};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scorerule::new_prior_score;

/// Where a scalar parameter lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Real,
    Positive,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            Support::Real => x.is_finite(),
            Support::Positive => x > 0.0 && x.is_finite(),
        }
    }
}

/// A prior usable inside a sampler.
pub trait Prior: Send + Sync {
    /// Log-density up to a constant; `−∞` outside the support.
    fn log_density(&self, x: f64) -> f64;
    fn support(&self) -> Support;
    fn is_proper(&self) -> bool;
    fn name(&self) -> &'static str;
}

fn require_level(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Boundary(u))
    }
}

fn require_scale(a: f64) -> Result<f64> {
    if a > 0.0 && a.is_finite() {
        Ok(a)
    } else {
        Err(Error::Domain {
            what: "a",
            value: a,
            domain: "(0, inf)".into(),
        })
    }
}

/// `a/(a + x)²` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePriorPositive {
    a: f64,
}

impl Default for ScorePriorPositive {
    fn default() -> Self {
        Self { a: 1.0 }
    }
}

impl ScorePriorPositive {
    pub fn new(a: f64) -> Result<Self> {
        Ok(Self { a: require_scale(a)? })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn require(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "x",
                value: x,
                domain: "[0, inf)".into(),
            })
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        let t = self.a + x;
        Ok(self.a / (t * t))
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok(self.a.ln() - 2.0 * (self.a + x).ln())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok(x / (self.a + x))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        require_level(u)?;
        Ok(self.a * u / (1.0 - u))
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let u: f64 = rng.random();
        // u ∈ [0, 1); u = 0 maps to 0, which is in the support
        self.a * u / (1.0 - u)
    }

    /// `(q, q′, q″)` at `x`.
    pub fn derivatives(&self, x: f64) -> (f64, f64, f64) {
        let l = Lomax::new(self.a);
        (l.deriv(x, 0), l.deriv(x, 1), l.deriv(x, 2))
    }
}

impl Prior for ScorePriorPositive {
    fn log_density(&self, x: f64) -> f64 {
        self.log_pdf(x).unwrap_or(f64::NEG_INFINITY)
    }

    fn support(&self) -> Support {
        Support::Positive
    }

    fn is_proper(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "score"
    }
}

/// `½a/(|x| + a)²` on `ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePriorReal {
    a: f64,
}

impl Default for ScorePriorReal {
    fn default() -> Self {
        Self { a: 1.0 }
    }
}

impl ScorePriorReal {
    pub fn new(a: f64) -> Result<Self> {
        Ok(Self { a: require_scale(a)? })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn require(&self, x: f64) -> Result<()> {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "x",
                value: x,
                domain: "(-inf, inf)".into(),
            })
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        let t = self.a + x.abs();
        Ok(0.5 * self.a / (t * t))
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok((0.5 * self.a).ln() - 2.0 * (self.a + x.abs()).ln())
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        let upper = 0.5 * x.abs() / (x.abs() + self.a);
        Ok(if x >= 0.0 { 0.5 + upper } else { 0.5 - upper })
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        require_level(u)?;
        Ok(self.quantile_unchecked(u))
    }

    fn quantile_unchecked(&self, u: f64) -> f64 {
        if u >= 0.5 {
            let v = 2.0 * u - 1.0;
            self.a * v / (1.0 - v)
        } else {
            -self.quantile_unchecked(1.0 - u)
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let u: f64 = rng.random();
        self.quantile_unchecked(u)
    }
}

impl Prior for ScorePriorReal {
    fn log_density(&self, x: f64) -> f64 {
        self.log_pdf(x).unwrap_or(f64::NEG_INFINITY)
    }

    fn support(&self) -> Support {
        Support::Real
    }

    fn is_proper(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "score"
    }
}

/// Inverse gamma with shape/rate, placed on a variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGamma {
    pub shape: f64,
    pub rate: f64,
}

impl Default for InverseGamma {
    fn default() -> Self {
        Self { shape: 1.0, rate: 1.0 }
    }
}

impl InverseGamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0) {
            return Err(Error::Contract(format!("inverse gamma needs shape, rate > 0, got ({shape}, {rate})")));
        }
        Ok(Self { shape, rate })
    }

    fn inner(&self) -> StatrsInverseGamma {
        StatrsInverseGamma::new(self.shape, self.rate).expect("parameters validated")
    }

    fn require(&self, x: f64) -> Result<()> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "x",
                value: x,
                domain: "(0, inf)".into(),
            })
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok(self.inner().pdf(x))
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok(self.inner().ln_pdf(x))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.require(x)?;
        Ok(self.inner().cdf(x))
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        require_level(u)?;
        Ok(self.inner().inverse_cdf(u))
    }

    /// Reciprocal of a `Gamma(shape, rate)` draw.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let g = Gamma::new(self.shape, 1.0 / self.rate).expect("parameters validated");
        1.0 / g.sample(rng)
    }
}

impl Prior for InverseGamma {
    fn log_density(&self, x: f64) -> f64 {
        self.log_pdf(x).unwrap_or(f64::NEG_INFINITY)
    }

    fn support(&self) -> Support {
        Support::Positive
    }

    fn is_proper(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "inverse-gamma"
    }
}

/// Priors the score prior is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparatorPrior {
    /// `π(σ) ∝ 1/σ` on a scale parameter. Improper.
    JeffreysScale,
    /// `π(μ) ∝ 1` on a location parameter. Improper.
    Flat,
    /// Inverse gamma on a variance.
    InverseGamma(InverseGamma),
}

impl ComparatorPrior {
    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            ComparatorPrior::JeffreysScale if x > 0.0 => -x.ln(),
            ComparatorPrior::JeffreysScale => f64::NEG_INFINITY,
            ComparatorPrior::Flat if x.is_finite() => 0.0,
            ComparatorPrior::Flat => f64::NEG_INFINITY,
            ComparatorPrior::InverseGamma(ig) => ig.log_density(x),
        }
    }

    fn proper(&self) -> Result<&InverseGamma> {
        match self {
            ComparatorPrior::JeffreysScale => Err(Error::Improper("Jeffreys scale prior")),
            ComparatorPrior::Flat => Err(Error::Improper("flat prior")),
            ComparatorPrior::InverseGamma(ig) => Ok(ig),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.proper()?.pdf(x)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.proper()?.cdf(x)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.proper()?.quantile(u)
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<f64> {
        Ok(self.proper()?.sample(rng))
    }
}

impl Prior for ComparatorPrior {
    fn log_density(&self, x: f64) -> f64 {
        self.log_pdf(x)
    }

    fn support(&self) -> Support {
        match self {
            ComparatorPrior::Flat => Support::Real,
            _ => Support::Positive,
        }
    }

    fn is_proper(&self) -> bool {
        matches!(self, ComparatorPrior::InverseGamma(_))
    }

    fn name(&self) -> &'static str {
        match self {
            ComparatorPrior::JeffreysScale => "jeffreys",
            ComparatorPrior::Flat => "flat",
            ComparatorPrior::InverseGamma(_) => "inverse-gamma",
        }
    }
}

/// Largest gap between `a/(a + x)²` and the density of `1/θ` when `θ` has
/// that density, `a/(aφ + 1)²`, over `grid`. Zero only when `a = 1`.
pub fn invariance_check(a: f64, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| {
            let direct = a / ((a + x) * (a + x));
            let transformed = a / ((a * x + 1.0) * (a * x + 1.0));
            (transformed - direct).abs()
        })
        .fold(0.0, f64::max)
}

/// 1000 points spread uniformly over `(0.01, 100)`.
pub fn standard_grid() -> Vec<f64> {
    let n = 1000;
    (0..n).map(|i| 0.01 + (100.0 - 0.01) * i as f64 / (n - 1) as f64).collect()
}

/// Largest `|S(q, q′, q″)|` of the `α(u) = u⁻²` score over [`standard_grid`]
/// for a density with analytic derivatives.
pub fn score_residual(density: &impl Density) -> f64 {
    standard_grid()
        .iter()
        .map(|&x| {
            new_prior_score(density.deriv(x, 0), density.deriv(x, 1), density.deriv(x, 2))
                .map(f64::abs)
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

/// [`score_residual`] of the prior with scale `a`.
pub fn prior_score_residual(a: f64) -> f64 {
    score_residual(&Lomax::new(a))
}
