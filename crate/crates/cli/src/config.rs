//! Experiment configuration: JSON file with flag overrides.

use serde::{Deserialize, Serialize};

use pecmem::{pole, CodeKind, NoiseKind};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Unmitigated,
    Pec,
    Both,
}

impl Mode {
    pub fn includes_unmitigated(self) -> bool {
        matches!(self, Mode::Unmitigated | Mode::Both)
    }

    pub fn includes_pec(self) -> bool {
        matches!(self, Mode::Pec | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    Stratified,
    Naive,
    Both,
}

impl EstimatorChoice {
    pub fn includes_stratified(self) -> bool {
        matches!(self, EstimatorChoice::Stratified | EstimatorChoice::Both)
    }

    pub fn includes_naive(self) -> bool {
        matches!(self, EstimatorChoice::Naive | EstimatorChoice::Both)
    }
}

/// Either an explicit list of p values or a log-spaced range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PGrid {
    List(Vec<f64>),
    Log { min: f64, max: f64, points: usize },
}

impl PGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            PGrid::List(v) => v.clone(),
            PGrid::Log { min, max, points } => (0..*points)
                .map(|i| min * (max / min).powf(i as f64 / (points.saturating_sub(1)).max(1) as f64))
                .collect(),
        }
    }
}

fn default_identity_shots() -> u64 {
    800_000
}

fn default_superbranch_shots() -> u64 {
    320_000
}

fn default_naive_shots() -> u64 {
    1_000_000
}

fn default_mode() -> Mode {
    Mode::Both
}

fn default_estimator() -> EstimatorChoice {
    EstimatorChoice::Stratified
}

fn default_out_dir() -> String {
    "results".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub code: CodeKind,
    pub distances: Vec<usize>,
    pub noise: NoiseKind,
    pub p_grid: PGrid,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorChoice,
    /// Identity-branch weight truncation; defaults depend on code and noise.
    #[serde(default)]
    pub k_max: Option<usize>,
    /// Superbranch extra-error truncation; defaults depend on the code.
    #[serde(default)]
    pub r_max: Option<usize>,
    #[serde(default = "default_identity_shots")]
    pub identity_shots: u64,
    #[serde(default = "default_superbranch_shots")]
    pub superbranch_shots: u64,
    #[serde(default = "default_naive_shots")]
    pub naive_shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: String,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingArtifact(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn qubit_count(&self, d: usize) -> usize {
        match self.code {
            CodeKind::Repetition => d,
            CodeKind::RotatedSurface => d * d,
        }
    }

    /// Identity truncation: full range for the repetition code (its strata
    /// are deterministic, so exactness is free), omega+2 / omega+3 for the
    /// surface code under bit-flip / depolarizing noise.
    pub fn k_max_for(&self, d: usize, omega: usize) -> usize {
        let n = self.qubit_count(d);
        self.k_max.unwrap_or(match (self.code, self.noise) {
            (CodeKind::Repetition, _) => n,
            (CodeKind::RotatedSurface, NoiseKind::BitFlip) => omega + 2,
            (CodeKind::RotatedSurface, NoiseKind::Depolarizing) => omega + 3,
        })
        .min(n)
    }

    pub fn r_max_for(&self, d: usize, omega: usize) -> usize {
        let n = self.qubit_count(d);
        self.r_max
            .unwrap_or(match self.code {
                CodeKind::Repetition => n - omega,
                CodeKind::RotatedSurface => 3,
            })
            .min(n - omega)
    }

    /// Up-front validation: distances and grid sane; every p below the pole
    /// whenever PEC runs.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.distances.is_empty() {
            return Err(CliError::Config("no distances given".into()));
        }
        for &d in &self.distances {
            if d < 3 || d % 2 == 0 {
                return Err(CliError::Config(format!("invalid distance {d}")));
            }
        }
        let grid = self.p_grid.values();
        if grid.is_empty() {
            return Err(CliError::Config("empty p grid".into()));
        }
        for &p in &grid {
            if !(0.0..1.0).contains(&p) {
                return Err(CliError::Config(format!("p = {p} outside [0, 1)")));
            }
        }
        if self.mode.includes_pec() {
            for &d in &self.distances {
                let n = self.qubit_count(d);
                let omega = d.div_ceil(2);
                let pole = pole(n, omega)
                    .map_err(|e| CliError::Config(format!("pole computation: {e}")))?;
                for &p in &grid {
                    if p >= pole {
                        return Err(CliError::Pole { p, pole, d });
                    }
                }
            }
        }
        Ok(())
    }
}
