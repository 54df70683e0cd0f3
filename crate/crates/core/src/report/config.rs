use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exponents::Scenario;
use crate::odi::{ExtremalControls, LemmaMode, OdiProblem};
use crate::wave::WaveProblem;

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "KATO_LAB_OUT";

const DEFAULT_ROOT: &str = "kato-lab-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative slope tolerance of the power-law fits.
    pub slope: f64,
    /// Convexity/positivity tolerance, relative to `max |F|`.
    pub convexity: f64,
    /// Relative tolerance of the `F''` identity.
    pub identity: f64,
    /// Relative tolerance of `F'' >= B (t+R)^{-q} |F|^p`.
    pub odi: f64,
    /// Threshold for the field outside the light cone.
    pub finite_speed: f64,
    /// Margin, in cells, added to the light cone.
    pub finite_speed_cells: f64,
    /// Absolute slack of the 2D pointwise bound.
    pub pointwise: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope: 0.15,
            convexity: 1e-9,
            identity: 1e-2,
            odi: 1e-3,
            finite_speed: 1e-12,
            finite_speed_cells: 20.0,
            pointwise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    pub n: Option<u32>,
    pub p: Option<f64>,
    /// Inclusive dimension range for the `p0` table.
    pub table: Option<(u32, u32)>,
    pub a_of_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomOdi {
    pub count: usize,
    pub mode: LemmaMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdiConfig {
    pub mode: LemmaMode,
    /// Single problem to certify; ignored when `random` is set.
    pub problem: Option<OdiProblem>,
    /// Batch of randomly drawn problems (seeded by the config seed).
    pub random: Option<RandomOdi>,
    #[serde(default)]
    pub controls: ExtremalControls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Convexity,
    Step0,
    ConditionF,
    ConditionFExcess,
    Identity,
    Odi,
    FiniteSpeed,
    Pointwise2d,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::Convexity,
        CheckName::Step0,
        CheckName::ConditionF,
        CheckName::ConditionFExcess,
        CheckName::Identity,
        CheckName::Odi,
        CheckName::FiniteSpeed,
        CheckName::Pointwise2d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckName::Convexity => "convexity",
            CheckName::Step0 => "step0",
            CheckName::ConditionF => "condition_f",
            CheckName::ConditionFExcess => "condition_f_excess",
            CheckName::Identity => "identity",
            CheckName::Odi => "odi",
            CheckName::FiniteSpeed => "finite_speed",
            CheckName::Pointwise2d => "pointwise_2d",
        }
    }
}

impl std::str::FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!("unknown check {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub problem: WaveProblem,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    /// Checks to run; empty runs every check that applies to the problem.
    #[serde(default)]
    pub checks: Vec<CheckName>,
}

/// Injected law for sweeps that skip the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticLaw {
    /// `T = coefficient ε^{-kappa}`.
    Power { coefficient: f64, kappa: f64 },
    /// `T = coefficient a(ε)`.
    AOfEps { coefficient: f64 },
}

impl SyntheticLaw {
    pub fn eval(&self, eps: f64) -> Result<f64> {
        match *self {
            SyntheticLaw::Power { coefficient, kappa } => Ok(coefficient * eps.powf(-kappa)),
            SyntheticLaw::AOfEps { coefficient } => Ok(coefficient * crate::exponents::solve_a_of_eps(eps)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Decreasing amplitudes.
    pub eps: Vec<f64>,
    pub base: WaveProblem,
    pub workers: Option<usize>,
    pub synthetic: Option<SyntheticLaw>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Exponents(ExponentsConfig),
    Odi(OdiConfig),
    Simulate(SimulateConfig),
    Sweep(SweepConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exponents(_) => "exponents",
            Command::Odi(_) => "odi",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
        }
    }
}

/// One experiment: a command block plus shared settings.
///
/// In TOML the command is a table named after it:
///
/// ```toml
/// seed = 7
///
/// [command.exponents]
/// n = 3
/// p = 2.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub command: Command,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            output_dir: None,
            seed: 0,
            tolerances: Tolerances::default(),
            command,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// SHA-256 (hex) of the canonical JSON form, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }

    /// `output_dir`, else the `KATO_LAB_OUT` variable, else `kato-lab-out`.
    pub fn output_root(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT))
    }

    /// Directory for this config's artifacts.
    pub fn artifact_dir(&self) -> PathBuf {
        self.output_root()
            .join(format!("{}-{}", self.command.name(), &self.hash()[..16]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::Profile;

    fn sample_configs() -> Vec<ExperimentConfig> {
        let wave = WaveProblem::new(2, 2.0, 0.1, Profile::Zero, Profile::unit_bump());
        vec![
            ExperimentConfig::new(Command::Exponents(ExponentsConfig {
                n: Some(3),
                p: Some(2.0),
                table: Some((2, 6)),
                a_of_eps: Some(0.1),
            })),
            ExperimentConfig::new(Command::Odi(OdiConfig {
                mode: LemmaMode::Lemma2,
                problem: Some(OdiProblem::lemma2(2.0, 2.0, 1.0, 1.0, 3.0)),
                random: None,
                controls: ExtremalControls::default(),
            })),
            ExperimentConfig::new(Command::Simulate(SimulateConfig {
                problem: wave.clone(),
                snapshots: vec![4.0, 6.0],
                checks: vec![CheckName::Pointwise2d, CheckName::Step0],
            })),
            ExperimentConfig {
                output_dir: Some("out".into()),
                seed: 9,
                tolerances: Tolerances::default(),
                command: Command::Sweep(SweepConfig {
                    scenario: Scenario::TwoDP2FZero,
                    eps: vec![0.2, 0.1, 0.05, 0.03, 0.02],
                    base: wave,
                    workers: Some(2),
                    synthetic: Some(SyntheticLaw::AOfEps { coefficient: 3.0 }),
                }),
            },
        ]
    }

    #[test]
    fn toml_round_trip() {
        for cfg in sample_configs() {
            let text = cfg.to_toml().unwrap();
            let back = ExperimentConfig::from_toml(&text).unwrap();
            assert_eq!(back, cfg, "{text}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "seed = 1\nbogus = 2\n[command.exponents]\nn = 3\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
        let text = "[command.exponents]\nn = 3\nq = 1.0\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
        let text = "[command.exponents]\nn = 3\n";
        assert!(ExperimentConfig::from_toml(text).is_ok());
    }

    #[test]
    fn hash_is_deterministic_and_ignores_output_dir() {
        let cfgs = sample_configs();
        assert_eq!(cfgs[0].hash(), cfgs[0].clone().hash());
        let mut moved = cfgs[0].clone();
        moved.output_dir = Some("elsewhere".into());
        assert_eq!(moved.hash(), cfgs[0].hash());
        let mut reseeded = cfgs[0].clone();
        reseeded.seed = 1;
        assert_ne!(reseeded.hash(), cfgs[0].hash());
    }
}
