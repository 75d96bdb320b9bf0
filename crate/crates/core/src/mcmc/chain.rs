use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::{mean, quantile};

/// Acceptance rate the burn-in adaptation aims for.
pub const TARGET_ACCEPTANCE: f64 = 0.35;
/// Proposal standard deviation used when none is configured.
pub const DEFAULT_PROPOSAL_SD: f64 = 0.5;
/// Acceptance band outside which a block is flagged.
pub const ACCEPTANCE_BAND: (f64, f64) = (0.1, 0.6);

/// Iteration schedule, seed and proposal scales of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// One scale per block; blocks past the end reuse the last entry.
    pub proposal_sd: Vec<f64>,
    /// Robbins–Monro tuning of the proposal scales during burn-in.
    pub adapt: bool,
}

impl McmcConfig {
    pub fn new(n_iter: usize, burn_in: usize, thin: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            n_iter,
            burn_in,
            thin,
            seed,
            proposal_sd: vec![DEFAULT_PROPOSAL_SD],
            adapt: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 6000 iterations, burn-in 1000, thinning 10.
    pub fn scalar_schedule(seed: u64) -> Self {
        Self::new(6000, 1000, 10, seed).expect("valid schedule")
    }

    /// 60000 iterations, burn-in 10000, thinning 100.
    pub fn mixture_schedule(seed: u64) -> Self {
        Self::new(60_000, 10_000, 100, seed).expect("valid schedule")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_proposal_sd(mut self, sd: Vec<f64>) -> Result<Self> {
        self.proposal_sd = sd;
        self.validate()?;
        Ok(self)
    }

    pub fn with_adapt(mut self, adapt: bool) -> Self {
        self.adapt = adapt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in >= self.n_iter {
            return Err(Error::Config(format!(
                "burn_in ({}) must be below n_iter ({})",
                self.burn_in, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.kept() == 0 {
            return Err(Error::Config("schedule keeps no draws".into()));
        }
        if self.proposal_sd.is_empty() {
            return Err(Error::Config("proposal_sd needs at least one entry".into()));
        }
        if let Some(bad) = self.proposal_sd.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Config(format!("proposal_sd must be positive, got {bad}")));
        }
        Ok(())
    }

    /// `⌊(n_iter − burn_in)/thin⌋`.
    pub fn kept(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }

    pub fn proposal(&self, block: usize) -> f64 {
        *self
            .proposal_sd
            .get(block)
            .or(self.proposal_sd.last())
            .unwrap_or(&DEFAULT_PROPOSAL_SD)
    }

    /// True when iteration `it` (0-based) is retained.
    pub fn keeps(&self, it: usize) -> bool {
        it >= self.burn_in && (it - self.burn_in + 1) % self.thin == 0
    }
}

/// Per-block proposal scales with acceptance bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct Proposals {
    log_scale: Vec<f64>,
    adapt: bool,
    burn_in: usize,
    accepted: Vec<u64>,
    tried: Vec<u64>,
}

impl Proposals {
    pub(crate) fn new(cfg: &McmcConfig, blocks: usize) -> Self {
        Self {
            log_scale: (0..blocks).map(|b| cfg.proposal(b).ln()).collect(),
            adapt: cfg.adapt,
            burn_in: cfg.burn_in,
            accepted: vec![0; blocks],
            tried: vec![0; blocks],
        }
    }

    pub(crate) fn scale(&self, block: usize) -> f64 {
        self.log_scale[block].exp()
    }

    /// Records a Metropolis decision made at iteration `it`.
    pub(crate) fn record(&mut self, block: usize, it: usize, accepted: bool) {
        if it < self.burn_in {
            if self.adapt {
                let gain = (it as f64 + 10.0).powf(-0.6);
                let hit = if accepted { 1.0 } else { 0.0 };
                self.log_scale[block] += gain * (hit - TARGET_ACCEPTANCE);
            }
        } else {
            self.tried[block] += 1;
            self.accepted[block] += accepted as u64;
        }
    }

    pub(crate) fn rates(&self) -> Vec<f64> {
        self.accepted
            .iter()
            .zip(&self.tried)
            .map(|(&a, &t)| if t == 0 { 1.0 } else { a as f64 / t as f64 })
            .collect()
    }

    pub(crate) fn scales(&self) -> Vec<f64> {
        self.log_scale.iter().map(|l| l.exp()).collect()
    }
}

/// Retained draws of a sampler run.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub names: Vec<String>,
    /// One row per kept draw.
    pub draws: Vec<Vec<f64>>,
    /// Metropolis blocks, in sampler order.
    pub blocks: Vec<String>,
    /// Post-burn-in acceptance rate of each block.
    pub acceptance: Vec<f64>,
    /// Proposal scale of each block after adaptation.
    pub final_scales: Vec<f64>,
    pub config: McmcConfig,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Contract(format!("chain has no parameter {name:?}")))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|row| row[j]).collect()
    }

    pub fn named(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.column(self.index_of(name)?))
    }

    pub fn mean(&self, j: usize) -> f64 {
        mean(&self.column(j))
    }

    /// Draw-wise posterior mean of every parameter.
    pub fn means(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.mean(j)).collect()
    }

    /// Equal-tailed 95% interval of parameter `j`.
    pub fn interval95(&self, j: usize) -> (f64, f64) {
        let col = self.column(j);
        (quantile(&col, 0.025), quantile(&col, 0.975))
    }

    /// Blocks whose acceptance rate left [`ACCEPTANCE_BAND`].
    pub fn acceptance_flags(&self) -> Vec<&str> {
        self.blocks
            .iter()
            .zip(&self.acceptance)
            .filter(|(_, &a)| a < ACCEPTANCE_BAND.0 || a > ACCEPTANCE_BAND.1)
            .map(|(b, _)| b.as_str())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.names.join(","))?;
        for row in &self.draws {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// `key: value` echo of the configuration and realized tuning.
    pub fn config_text(&self) -> String {
        let c = &self.config;
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "n_iter: {}", c.n_iter);
        let _ = writeln!(s, "burn_in: {}", c.burn_in);
        let _ = writeln!(s, "thin: {}", c.thin);
        let _ = writeln!(s, "seed: {}", c.seed);
        let _ = writeln!(s, "proposal_sd: {}", list(&c.proposal_sd));
        let _ = writeln!(s, "adapt: {}", c.adapt);
        let _ = writeln!(s, "kept: {}", self.len());
        let _ = writeln!(s, "blocks: {}", self.blocks.join(","));
        let _ = writeln!(s, "acceptance: {}", list(&self.acceptance));
        let _ = writeln!(s, "final_scales: {}", list(&self.final_scales));
        s
    }

    /// Writes the draws to `path` and the configuration to `path` with a
    /// `.config` extension.
    pub fn save(&self, path: &Path) -> io::Result<()> {
        let f = io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)?;
        std::fs::write(path.with_extension("config"), self.config_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn paper_schedules() {
        assert_eq!(McmcConfig::scalar_schedule(0).kept(), 500);
        assert_eq!(McmcConfig::mixture_schedule(0).kept(), 500);
    }

    #[test]
    fn invalid_configs() {
        assert!(McmcConfig::new(100, 100, 1, 0).is_err());
        assert!(McmcConfig::new(100, 10, 0, 0).is_err());
        assert!(McmcConfig::new(100, 10, 1, 0).unwrap().with_proposal_sd(vec![0.0]).is_err());
        assert!(McmcConfig::new(100, 10, 1, 0).unwrap().with_proposal_sd(vec![]).is_err());
    }

    #[test]
    fn proposal_lookup_reuses_last() {
        let c = McmcConfig::new(10, 1, 1, 0).unwrap().with_proposal_sd(vec![0.1, 0.2]).unwrap();
        assert_eq!((c.proposal(0), c.proposal(1), c.proposal(5)), (0.1, 0.2, 0.2));
    }

    #[test]
    fn csv_round_trip_format() {
        let chain = Chain {
            names: vec!["a".into(), "b".into()],
            draws: vec![vec![1.0, 0.5], vec![-2.0, 3.25]],
            blocks: vec!["a".into()],
            acceptance: vec![0.3],
            final_scales: vec![0.4],
            config: McmcConfig::new(4, 2, 1, 9).unwrap(),
        };
        let mut buf = Vec::new();
        chain.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n-2,3.25\n");
        assert!(chain.config_text().contains("seed: 9\n"));
        assert!(chain.acceptance_flags().is_empty());
    }

    proptest! {
        #[test]
        fn kept_count_matches_keeps(n in 2usize..400, b in 0usize..200, t in 1usize..20) {
            prop_assume!(b < n && (n - b) / t > 0);
            let c = McmcConfig::new(n, b, t, 0).unwrap();
            prop_assert_eq!((0..n).filter(|&i| c.keeps(i)).count(), c.kept());
        }
    }
}
