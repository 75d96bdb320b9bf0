//! Likelihoods and data for the four model families.

use std::path::Path;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::stats::log_sum_exp;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `log N(y; mu, sd²)`.
pub fn normal_ln_pdf(y: f64, mu: f64, sd: f64) -> f64 {
    let z = (y - mu) / sd;
    -HALF_LN_2PI - sd.ln() - 0.5 * z * z
}

fn require_positive(what: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: v,
            domain: "(0, inf)".into(),
        })
    }
}

/// `y ~ N(mu0, σ²)` with `mu0` known.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalScaleModel {
    pub mu0: f64,
    pub data: Vec<f64>,
    ss: f64,
}

impl NormalScaleModel {
    pub fn new(mu0: f64, data: Vec<f64>) -> Self {
        let ss = data.iter().map(|y| (y - mu0) * (y - mu0)).sum();
        Self { mu0, data, ss }
    }

    pub fn loglik(&self, sigma: f64) -> Result<f64> {
        require_positive("sigma", sigma)?;
        let n = self.data.len() as f64;
        Ok(-n * (HALF_LN_2PI + sigma.ln()) - 0.5 * self.ss / (sigma * sigma))
    }

    /// `√(Σ(y − mu0)²/n)`.
    pub fn mle(&self) -> f64 {
        (self.ss / self.data.len() as f64).sqrt()
    }
}

/// `log y ~ N(μ, sigma0²)` with `sigma0` known.
#[derive(Debug, Clone, PartialEq)]
pub struct LogNormalLocationModel {
    pub sigma0: f64,
    pub data: Vec<f64>,
    n: f64,
    sum_log: f64,
    sum_log_sq: f64,
}

impl LogNormalLocationModel {
    pub fn new(sigma0: f64, data: Vec<f64>) -> Result<Self> {
        require_positive("sigma0", sigma0)?;
        if let Some(&bad) = data.iter().find(|y| !(**y > 0.0)) {
            return Err(Error::Domain {
                what: "lognormal observation",
                value: bad,
                domain: "(0, inf)".into(),
            });
        }
        let sum_log = data.iter().map(|y| y.ln()).sum();
        let sum_log_sq = data.iter().map(|y| y.ln() * y.ln()).sum();
        Ok(Self {
            sigma0,
            n: data.len() as f64,
            data,
            sum_log,
            sum_log_sq,
        })
    }

    pub fn loglik(&self, mu: f64) -> f64 {
        let s2 = self.sigma0 * self.sigma0;
        let quad = self.sum_log_sq - 2.0 * mu * self.sum_log + self.n * mu * mu;
        -self.n * (HALF_LN_2PI + self.sigma0.ln()) - self.sum_log - 0.5 * quad / s2
    }

    /// Mean of the log data.
    pub fn mle(&self) -> f64 {
        self.sum_log / self.n
    }
}

/// Location-scale family used for mixture components.
pub trait ComponentFamily: Clone + Send + Sync {
    fn ln_pdf(&self, y: f64, loc: f64, scale: f64) -> f64;
    fn sample(&self, loc: f64, scale: f64, rng: &mut Rng) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Gaussian;

impl ComponentFamily for Gaussian {
    fn ln_pdf(&self, y: f64, loc: f64, scale: f64) -> f64 {
        normal_ln_pdf(y, loc, scale)
    }

    fn sample(&self, loc: f64, scale: f64, rng: &mut Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        loc + scale * z
    }
}

/// `Σ ω_l f(y | μ_l, σ_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel<F: ComponentFamily = Gaussian> {
    weights: Vec<f64>,
    means: Vec<f64>,
    sds: Vec<f64>,
    family: F,
}

impl MixtureModel<Gaussian> {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64>) -> Result<Self> {
        Self::with_family(weights, means, sds, Gaussian)
    }

    /// `0.25 N(0, 1.2²) + 0.65 N(−10, 1) + 0.10 N(7, 0.8²)`.
    pub fn example1() -> Self {
        Self::new(vec![0.25, 0.65, 0.10], vec![0.0, -10.0, 7.0], vec![1.2, 1.0, 0.8]).expect("valid constants")
    }

    /// Equal-weight designs of the repeated-sampling study, `k ∈ {3, 4, 5}`.
    pub fn repeated_design(k: usize) -> Result<Self> {
        let (means, sds) = match k {
            3 => (vec![-10.0, 0.0, 7.0], vec![1.0, 0.8, 1.2]),
            4 => (vec![-10.0, -3.0, 0.0, 7.0], vec![1.0, 0.9, 0.8, 1.2]),
            5 => (vec![-10.0, -3.0, 0.0, 3.0, 7.0], vec![1.0, 0.9, 0.8, 1.0, 1.2]),
            _ => return Err(Error::Config(format!("repeated-sampling design defined for k in 3..=5, got {k}"))),
        };
        Self::new(vec![1.0 / k as f64; k], means, sds)
    }
}

impl<F: ComponentFamily> MixtureModel<F> {
    pub fn with_family(weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64>, family: F) -> Result<Self> {
        let k = weights.len();
        if k == 0 || means.len() != k || sds.len() != k {
            return Err(Error::Shape(format!(
                "mixture needs equal nonzero lengths, got {k}/{}/{}",
                means.len(),
                sds.len()
            )));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("weights must lie on the simplex, sum = {total}")));
        }
        for &s in &sds {
            require_positive("component sd", s)?;
        }
        Ok(Self {
            weights,
            means,
            sds,
            family,
        })
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sds(&self) -> &[f64] {
        &self.sds
    }

    /// `log Σ_l ω_l f(y | θ_l)` for one observation.
    pub fn ln_pdf(&self, y: f64) -> f64 {
        let terms: Vec<f64> = (0..self.k())
            .map(|l| self.weights[l].ln() + self.family.ln_pdf(y, self.means[l], self.sds[l]))
            .collect();
        log_sum_exp(&terms)
    }

    pub fn loglik(&self, data: &[f64]) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::Contract("mixture log-likelihood of empty data".into()));
        }
        Ok(data.iter().map(|&y| self.ln_pdf(y)).sum())
    }

    /// Ancestral draws with their component labels.
    pub fn sample_with_labels(&self, n: usize, rng: &mut Rng) -> (Vec<f64>, Vec<usize>) {
        let mut ys = Vec::with_capacity(n);
        let mut zs = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut l = self.k() - 1;
            for (j, w) in self.weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    l = j;
                    break;
                }
            }
            ys.push(self.family.sample(self.means[l], self.sds[l], rng));
            zs.push(l);
        }
        (ys, zs)
    }

    pub fn sample(&self, n: usize, rng: &mut Rng) -> Vec<f64> {
        self.sample_with_labels(n, rng).0
    }
}

/// Per-school effect estimates with known standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EightSchoolsData {
    pub names: Vec<String>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
}

impl EightSchoolsData {
    pub fn standard() -> Self {
        Self {
            names: "ABCDEFGH".chars().map(String::from).collect(),
            y: vec![28.0, 8.0, -3.0, 7.0, -1.0, 1.0, 18.0, 12.0],
            s: vec![15.0, 10.0, 16.0, 11.0, 9.0, 11.0, 10.0, 18.0],
        }
    }

    pub fn new(y: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if y.len() != s.len() || y.is_empty() {
            return Err(Error::Shape(format!("{} effects vs {} standard errors", y.len(), s.len())));
        }
        for &si in &s {
            require_positive("standard error", si)?;
        }
        let names = (1..=y.len()).map(|j| j.to_string()).collect();
        Ok(Self { names, y, s })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalState {
    pub mu: f64,
    pub alpha: Vec<f64>,
    pub sigma_alpha2: f64,
}

/// `Σ_j log N(y_j; μ + α_j, s_j²) + Σ_j log N(α_j; 0, σ_α²)`.
pub fn loglik_hierarchical(data: &EightSchoolsData, state: &HierarchicalState) -> Result<f64> {
    require_positive("sigma_alpha2", state.sigma_alpha2)?;
    if state.alpha.len() != data.len() {
        return Err(Error::Shape(format!("{} effects for {} schools", state.alpha.len(), data.len())));
    }
    let tau = state.sigma_alpha2.sqrt();
    Ok(data
        .y
        .iter()
        .zip(&data.s)
        .zip(&state.alpha)
        .map(|((&y, &s), &a)| normal_ln_pdf(y, state.mu + a, s) + normal_ln_pdf(a, 0.0, tau))
        .sum())
}

/// Number of rows in the galaxy velocity dataset.
pub const GALAXY_ROWS: usize = 82;

/// Parses galaxy velocities (1000 km/s), one per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_galaxies(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(GALAXY_ROWS);
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Data(format!("line {}: not a number: {t:?}", lineno + 1)))?;
        if !(v > 5.0 && v < 40.0) {
            return Err(Error::Data(format!("line {}: velocity {v} outside (5, 40)", lineno + 1)));
        }
        out.push(v);
    }
    if out.len() != GALAXY_ROWS {
        return Err(Error::Data(format!("expected {GALAXY_ROWS} velocities, found {}", out.len())));
    }
    Ok(out)
}

pub fn load_galaxies(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_galaxies(&text)
}
