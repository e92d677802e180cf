use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ckks::{Mode, SchemeParams, DEFAULT_SIGMA};
use crate::error::{bail, Error, Result};
use crate::fault::{FaultSite, Sampling, Stage, Target};
use crate::metrics::DEFAULT_TAU;

/// Above this ring degree exhaustive sweeps need `allow_exhaustive_large`.
pub const EXHAUSTIVE_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    /// Uniform reals in `[lo, hi)` drawn from `derive_rng(input_seed, ["input"])`.
    Uniform { lo: f64, hi: f64 },
    /// Fixed vector, one decimal value per line.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encryption {
    #[default]
    Public,
    Secret,
}

/// Named seed grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// 4 scheme seeds × 4 input seeds.
    Ci,
    /// 100 scheme seeds × 25 input seeds.
    Paper,
}

impl Profile {
    pub fn seeds(self) -> (Vec<u64>, Vec<u64>) {
        match self {
            Profile::Ci => ((1..=4).collect(), (1..=4).collect()),
            Profile::Paper => ((1..=100).collect(), (1..=25).collect()),
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(Profile::Ci),
            "paper" => Ok(Profile::Paper),
            other => bail!(Config, "unknown profile {other:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: SchemeParams,
    pub stages: Vec<Stage>,
    pub targets: Vec<Target>,
    pub sampling: Sampling,
    pub scheme_seeds: Vec<u64>,
    pub input_seeds: Vec<u64>,
    pub input: InputSource,
    pub tau: f64,
    pub out: Option<PathBuf>,
    pub site: FaultSite,
    pub encryption: Encryption,
    /// Every this many trials the cached golden run and the incremental
    /// faulted path are recomputed from scratch.
    pub audit_every: usize,
    pub allow_exhaustive_large: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: String,
    ring_degree: usize,
    q0_bits: u32,
    #[serde(default = "one")]
    limbs: usize,
    delta_log2: u32,
    slots: Option<usize>,
    hamming_weight: Option<usize>,
    #[serde(default)]
    wide_modulus: bool,
    sigma: Option<f64>,
    #[serde(default = "all_stages")]
    stages: Vec<String>,
    #[serde(default = "all_targets")]
    targets: Vec<String>,
    #[serde(default = "exhaustive")]
    sampling: String,
    scheme_seeds: Option<Vec<u64>>,
    input_seeds: Option<Vec<u64>>,
    input_lo: Option<f64>,
    input_hi: Option<f64>,
    input_file: Option<PathBuf>,
    tau: Option<f64>,
    out: Option<PathBuf>,
    fault_site: Option<String>,
    #[serde(default)]
    encryption: Encryption,
    audit_every: Option<usize>,
    #[serde(default)]
    allow_exhaustive_large: bool,
}

fn one() -> usize {
    1
}

fn all_stages() -> Vec<String> {
    vec!["post_encrypt".into()]
}

fn all_targets() -> Vec<String> {
    vec!["c0".into(), "c1".into()]
}

fn exhaustive() -> String {
    "exhaustive".into()
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ExperimentConfig {
    /// Parse TOML text; relative paths resolve against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw, base).map_err(config_err)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent())
    }

    fn from_raw(raw: RawConfig, base: Option<&Path>) -> Result<Self> {
        let mode: Mode = raw.mode.parse()?;
        let resolve = |p: PathBuf| match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        };
        let input = match raw.input_file {
            Some(p) => {
                if raw.input_lo.is_some() || raw.input_hi.is_some() {
                    bail!(Config, "input_file excludes input_lo/input_hi");
                }
                InputSource::File(resolve(p))
            }
            None => InputSource::Uniform {
                lo: raw.input_lo.unwrap_or(0.0),
                hi: raw.input_hi.unwrap_or(256.0),
            },
        };
        let slots = match (raw.slots, &input) {
            (Some(s), _) => s,
            (None, InputSource::File(p)) => read_input_file(p)?.len(),
            (None, _) => raw.ring_degree / 2,
        };
        let params = SchemeParams {
            ring_degree: raw.ring_degree,
            q0_bits: raw.q0_bits,
            limbs: raw.limbs,
            delta_log2: raw.delta_log2,
            mode,
            slots,
            hamming_weight: raw.hamming_weight,
            sigma: raw.sigma.unwrap_or(DEFAULT_SIGMA),
            wide_modulus: raw.wide_modulus,
        };
        let (ci_scheme, ci_input) = Profile::Ci.seeds();
        let cfg = Self {
            params,
            stages: raw.stages.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            targets: raw.targets.iter().map(|s| s.parse()).collect::<Result<_>>()?,
            sampling: raw.sampling.parse()?,
            scheme_seeds: raw.scheme_seeds.unwrap_or(ci_scheme),
            input_seeds: raw.input_seeds.unwrap_or(ci_input),
            input,
            tau: raw.tau.unwrap_or(DEFAULT_TAU),
            out: raw.out.map(resolve),
            site: match raw.fault_site.as_deref() {
                None | Some("native") => FaultSite::Native,
                Some("coefficient_hook") => FaultSite::CoefficientHook,
                Some(other) => bail!(Config, "unknown fault_site {other:?}"),
            },
            encryption: raw.encryption,
            audit_every: raw.audit_every.unwrap_or(1000),
            allow_exhaustive_large: raw.allow_exhaustive_large,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_profile(&mut self, profile: Profile) {
        (self.scheme_seeds, self.input_seeds) = profile.seeds();
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(config_err)?;
        if self.scheme_seeds.is_empty() || self.input_seeds.is_empty() {
            bail!(Config, "seed lists must be nonempty");
        }
        if let InputSource::Uniform { lo, hi } = self.input {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                bail!(Config, "input range [{lo}, {hi}) is empty");
            }
            let budget = self.params.input_budget();
            if lo.abs().max(hi.abs()) > budget {
                bail!(Config, "input range exceeds the integer budget {budget}");
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            bail!(Config, "tau must be positive");
        }
        if self.audit_every == 0 {
            bail!(Config, "audit_every must be at least 1");
        }
        if self.sampling == Sampling::Exhaustive
            && !self.stages.is_empty()
            && self.params.ring_degree > EXHAUSTIVE_LIMIT
            && !self.allow_exhaustive_large
        {
            bail!(
                Config,
                "exhaustive sweeps above N = {EXHAUSTIVE_LIMIT} need allow_exhaustive_large"
            );
        }
        Ok(())
    }

    /// The input vector for one input seed.
    pub fn input_vector(&self, input_seed: u64) -> Result<Vec<f64>> {
        use rand::Rng;
        match &self.input {
            InputSource::Uniform { lo, hi } => {
                let mut rng = crate::seed::derive_rng(input_seed, &["input"]);
                Ok((0..self.params.slots).map(|_| rng.gen_range(*lo..*hi)).collect())
            }
            InputSource::File(p) => {
                let v = read_input_file(p)?;
                if v.len() != self.params.slots {
                    bail!(
                        Config,
                        "{} holds {} values but slots = {}",
                        p.display(),
                        v.len(),
                        self.params.slots
                    );
                }
                Ok(v)
            }
        }
    }
}

/// One decimal value per line; blank lines are skipped.
pub fn read_input_file(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("{}:{}: bad value {l:?}", path.display(), i + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
mode = "vanilla"
ring_degree = 4
q0_bits = 60
delta_log2 = 50
"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL, None).unwrap();
        assert_eq!(c.params.slots, 2);
        assert_eq!(c.scheme_seeds, vec![1, 2, 3, 4]);
        assert_eq!(c.stages, vec![Stage::PostEncrypt]);
        assert_eq!(c.targets, vec![Target::C0, Target::C1]);
        assert_eq!(c.sampling, Sampling::Exhaustive);
        assert_eq!(c.input, InputSource::Uniform { lo: 0.0, hi: 256.0 });
        assert_eq!(c.tau, 1e-3);
        assert_eq!(c.site, FaultSite::Native);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\nbogus = 1\n");
        assert!(matches!(ExperimentConfig::from_toml(&text, None), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for extra in [
            "limbs = 2",
            "stages = [\"mid\"]",
            "sampling = \"sometimes\"",
            "scheme_seeds = []",
            "input_lo = 5.0\ninput_hi = 5.0",
            "fault_site = \"elsewhere\"",
            "tau = 0.0",
        ] {
            let text = format!("{MINIMAL}\n{extra}\n");
            assert!(
                matches!(ExperimentConfig::from_toml(&text, None), Err(Error::Config(_))),
                "{extra}"
            );
        }
    }

    #[test]
    fn large_exhaustive_is_gated() {
        let text = "mode = \"rns\"\nring_degree = 8192\nq0_bits = 60\nlimbs = 2\ndelta_log2 = 40\n";
        assert!(ExperimentConfig::from_toml(text, None).is_err());
        let ok = format!("{text}allow_exhaustive_large = true\n");
        assert!(ExperimentConfig::from_toml(&ok, None).is_ok());
        let sampled = format!("{text}sampling = \"random:10:1\"\n");
        assert!(ExperimentConfig::from_toml(&sampled, None).is_ok());
    }

    #[test]
    fn input_file_sets_slots() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        fs::write(&path, "1\n2.5\n\n3\n").unwrap();
        let text = "mode = \"rns\"\nring_degree = 16\nq0_bits = 40\nlimbs = 2\ndelta_log2 = 20\ninput_file = \"v.txt\"\n";
        let c = ExperimentConfig::from_toml(text, Some(dir.path())).unwrap();
        assert_eq!(c.params.slots, 3);
        assert_eq!(c.input_vector(1).unwrap(), vec![1.0, 2.5, 3.0]);
    }

    #[test]
    fn profiles() {
        let mut c = ExperimentConfig::from_toml(MINIMAL, None).unwrap();
        c.apply_profile("paper".parse().unwrap());
        assert_eq!((c.scheme_seeds.len(), c.input_seeds.len()), (100, 25));
        assert!("huge".parse::<Profile>().is_err());
    }
}
