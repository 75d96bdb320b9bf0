//! Run configuration: `key: value` text files layered over per-experiment
//! defaults, with command-line flags applied last.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("key `{key}`: expected {expected}, got {value:?}")]
    Type {
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("line {line}: expected `key: value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ScoreCheck,
    PriorTable,
    SimScale,
    SimLocation,
    MixtureSingle,
    MixtureRepeat,
    GalaxyDic,
    Schools,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ScoreCheck,
        Experiment::PriorTable,
        Experiment::SimScale,
        Experiment::SimLocation,
        Experiment::MixtureSingle,
        Experiment::MixtureRepeat,
        Experiment::GalaxyDic,
        Experiment::Schools,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ScoreCheck => "score-check",
            Experiment::PriorTable => "prior-table",
            Experiment::SimScale => "sim-scale",
            Experiment::SimLocation => "sim-location",
            Experiment::MixtureSingle => "mixture-single",
            Experiment::MixtureRepeat => "mixture-repeat",
            Experiment::GalaxyDic => "galaxy-dic",
            Experiment::Schools => "schools",
        }
    }

    fn uses_mcmc(&self) -> bool {
        !matches!(self, Experiment::ScoreCheck | Experiment::PriorTable)
    }

    fn is_mixture(&self) -> bool {
        matches!(
            self,
            Experiment::MixtureSingle | Experiment::MixtureRepeat | Experiment::GalaxyDic
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// Which priors a run compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorSel {
    Score,
    /// Jeffreys, flat or inverse gamma, depending on the experiment.
    Comparator,
    Both,
}

impl PriorSel {
    pub fn name(&self) -> &'static str {
        match self {
            PriorSel::Score => "score",
            PriorSel::Comparator => "comparator",
            PriorSel::Both => "both",
        }
    }

    pub fn includes_score(&self) -> bool {
        matches!(self, PriorSel::Score | PriorSel::Both)
    }

    pub fn includes_comparator(&self) -> bool {
        matches!(self, PriorSel::Comparator | PriorSel::Both)
    }
}

impl FromStr for PriorSel {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "score" => Ok(PriorSel::Score),
            "comparator" | "jeffreys" | "flat" | "ig" | "inverse-gamma" => Ok(PriorSel::Comparator),
            "both" => Ok(PriorSel::Both),
            _ => Err(()),
        }
    }
}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// Score-prior scale.
    pub a: f64,
    /// Replicates per cell.
    pub m: usize,
    /// Sample size(s).
    pub n: Vec<usize>,
    /// Mixture component count(s).
    pub k: Vec<usize>,
    pub seed: u64,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub proposal_sd: Vec<f64>,
    pub adapt: bool,
    /// True values of `σ` for sim-scale.
    pub sigma: Vec<f64>,
    /// True values of `μ` for sim-location.
    pub mu: Vec<f64>,
    pub prior: PriorSel,
    pub galaxy: PathBuf,
}

/// Keys accepted in configuration files and manifests, in output order.
pub const KEYS: [&str; 15] = [
    "a",
    "M",
    "n",
    "k",
    "seed",
    "n_iter",
    "burn_in",
    "thin",
    "proposal_sd",
    "adapt",
    "sigma",
    "mu",
    "prior",
    "galaxy",
    "experiment",
];

/// Manifest keys that are not configuration and are ignored on load.
pub const RECORD_KEYS: [&str; 4] = ["dataset_sha256", "wall_time_secs", "version", "outputs"];

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (n_iter, burn_in, thin) = if experiment.is_mixture() {
            (60_000, 10_000, 100)
        } else {
            (6000, 1000, 10)
        };
        let (n, k, m) = match experiment {
            Experiment::MixtureSingle => (vec![200], vec![3], 1),
            Experiment::MixtureRepeat => (vec![50, 100, 200], vec![3, 4, 5], 20),
            Experiment::GalaxyDic => (vec![82], vec![2, 3, 4, 5, 6, 7, 8], 1),
            Experiment::Schools => (vec![8], vec![1], 1),
            _ => (vec![100], vec![1], 250),
        };
        Self {
            experiment,
            a: 1.0,
            m,
            n,
            k,
            seed: 7,
            n_iter,
            burn_in,
            thin,
            proposal_sd: vec![0.5],
            adapt: true,
            sigma: vec![0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            mu: vec![0.0, 1.0, 5.0, 10.0, 50.0, 100.0],
            prior: if experiment.uses_mcmc() && !experiment.is_mixture() {
                PriorSel::Both
            } else {
                PriorSel::Score
            },
            galaxy: PathBuf::from("data/galaxies.txt"),
        }
    }

    /// Sets one key from its text form.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "a" => self.a = parse(key, v, "a positive number")?,
            "M" => self.m = parse(key, v, "a non-negative integer")?,
            "n" => self.n = parse_list(key, v, "a list of integers")?,
            "k" => self.k = parse_list(key, v, "a list of integers")?,
            "seed" => self.seed = parse(key, v, "a 64-bit unsigned integer")?,
            "n_iter" => self.n_iter = parse(key, v, "a non-negative integer")?,
            "burn_in" => self.burn_in = parse(key, v, "a non-negative integer")?,
            "thin" => self.thin = parse(key, v, "a non-negative integer")?,
            "proposal_sd" => self.proposal_sd = parse_list(key, v, "a list of numbers")?,
            "adapt" => self.adapt = parse(key, v, "true or false")?,
            "sigma" => self.sigma = parse_list(key, v, "a list of numbers")?,
            "mu" => self.mu = parse_list(key, v, "a list of numbers")?,
            "prior" => {
                self.prior = v.parse().map_err(|_| type_error(key, v, "score, comparator or both"))?;
            }
            "galaxy" => self.galaxy = PathBuf::from(v),
            "experiment" => {
                let e: Experiment = v.parse()?;
                if e != self.experiment {
                    return Err(ConfigError::Invalid(format!(
                        "configuration is for {e}, not {}",
                        self.experiment
                    )));
                }
            }
            _ => return Err(ConfigError::UnknownKeys(vec![key.to_string()])),
        }
        Ok(())
    }

    /// Applies `key: value` pairs, reporting every unknown key at once.
    pub fn apply_all(&mut self, pairs: &[(String, String)]) -> Result<()> {
        let unknown: Vec<String> = pairs
            .iter()
            .map(|(k, _)| k)
            .filter(|k| !KEYS.contains(&k.as_str()) && !RECORD_KEYS.contains(&k.as_str()))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(ConfigError::UnknownKeys(unknown));
        }
        for (k, v) in pairs {
            if KEYS.contains(&k.as_str()) {
                self.apply(k, v)?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("a must be positive, got {}", self.a));
        }
        if self.experiment.uses_mcmc() {
            if self.burn_in >= self.n_iter {
                return bad(format!("burn_in ({}) must be below n_iter ({})", self.burn_in, self.n_iter));
            }
            if self.thin == 0 || (self.n_iter - self.burn_in) / self.thin == 0 {
                return bad("schedule keeps no draws".into());
            }
            if self.proposal_sd.is_empty() || self.proposal_sd.iter().any(|s| !(*s > 0.0)) {
                return bad("proposal_sd must be a non-empty list of positive numbers".into());
            }
            if self.m == 0 {
                return bad("M must be at least 1".into());
            }
        }
        match self.experiment {
            Experiment::SimScale | Experiment::SimLocation => {
                if self.n.len() != 1 || self.n[0] < 2 {
                    return bad("n must be a single sample size of at least 2".into());
                }
                if self.experiment == Experiment::SimScale && self.sigma.iter().any(|s| !(*s > 0.0)) {
                    return bad("sigma values must be positive".into());
                }
            }
            Experiment::MixtureSingle => {
                if self.n.len() != 1 || self.k.len() != 1 {
                    return bad("mixture-single takes one n and one k".into());
                }
            }
            Experiment::MixtureRepeat => {
                if let Some(k) = self.k.iter().find(|k| !(3..=5).contains(*k)) {
                    return bad(format!("repeated-sampling designs exist for k in 3..=5, got {k}"));
                }
            }
            Experiment::GalaxyDic => {
                if self.k.iter().any(|&k| k == 0) {
                    return bad("k values must be positive".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `key: value` lines for every key, in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let nums = |v: &[f64]| join(v.iter().map(|x| x.to_string()).collect());
        let ints = |v: &[usize]| join(v.iter().map(|x| x.to_string()).collect());
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "a" => self.a.to_string(),
                "M" => self.m.to_string(),
                "n" => ints(&self.n),
                "k" => ints(&self.k),
                "seed" => self.seed.to_string(),
                "n_iter" => self.n_iter.to_string(),
                "burn_in" => self.burn_in.to_string(),
                "thin" => self.thin.to_string(),
                "proposal_sd" => nums(&self.proposal_sd),
                "adapt" => self.adapt.to_string(),
                "sigma" => nums(&self.sigma),
                "mu" => nums(&self.mu),
                "prior" => self.prior.name().to_string(),
                "galaxy" => self.galaxy.display().to_string(),
                "experiment" => self.experiment.name().to_string(),
                _ => unreachable!(),
            };
            out.push_str(&format!("{key}: {value}\n"));
        }
        out
    }
}

fn type_error(key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::Type {
        key: key.to_string(),
        expected,
        value: value.to_string(),
    }
}

fn parse<T: FromStr>(key: &str, v: &str, expected: &'static str) -> Result<T> {
    v.parse().map_err(|_| type_error(key, v, expected))
}

fn parse_list<T: FromStr>(key: &str, v: &str, expected: &'static str) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(type_error(key, v, expected));
    }
    v.split(',')
        .map(|p| p.trim().parse().map_err(|_| type_error(key, v, expected)))
        .collect()
}

/// Splits `key: value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once(':').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: t.to_string(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Defaults for `experiment` overridden by the file at `path`.
pub fn config_load(path: &Path, experiment: Experiment) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut cfg = RunConfig::defaults(experiment);
    cfg.apply_all(&parse_pairs(&text)?)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn empty_file_gives_defaults() {
        let f = write("");
        let cfg = config_load(f.path(), Experiment::SimScale).unwrap();
        assert_eq!(cfg, RunConfig::defaults(Experiment::SimScale));
        assert_eq!((cfg.n_iter, cfg.burn_in, cfg.thin), (6000, 1000, 10));
        let g = RunConfig::defaults(Experiment::GalaxyDic);
        assert_eq!((g.n_iter, g.burn_in, g.thin), (60_000, 10_000, 100));
    }

    #[test]
    fn flags_override_file() {
        let f = write("M: 20\n# comment\nseed: 3\n");
        let mut cfg = config_load(f.path(), Experiment::SimScale).unwrap();
        assert_eq!(cfg.m, 20);
        cfg.apply("M", "5").unwrap();
        assert_eq!((cfg.m, cfg.seed), (5, 3));
    }

    #[test]
    fn type_errors_name_the_key() {
        let f = write("sigma: abc\n");
        let err = config_load(f.path(), Experiment::SimScale).unwrap_err();
        assert!(matches!(&err, ConfigError::Type { key, .. } if key == "sigma"));
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn unknown_keys_are_listed() {
        let f = write("foo: 1\nbar: 2\nseed: 1\n");
        let err = config_load(f.path(), Experiment::Schools).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKeys(vec!["foo".into(), "bar".into()]));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::defaults(Experiment::MixtureRepeat);
        cfg.apply("proposal_sd", "0.25,0.75").unwrap();
        let f = write(&cfg.to_text());
        assert_eq!(config_load(f.path(), Experiment::MixtureRepeat).unwrap(), cfg);
        assert!(config_load(f.path(), Experiment::Schools).is_err());
    }

    #[test]
    fn experiment_names() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::defaults(Experiment::SimScale);
        cfg.burn_in = cfg.n_iter;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::defaults(Experiment::MixtureRepeat);
        cfg.k = vec![6];
        assert!(cfg.validate().is_err());
        assert!(RunConfig::defaults(Experiment::GalaxyDic).validate().is_ok());
    }
}
