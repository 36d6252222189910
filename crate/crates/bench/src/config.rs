//! Benchmark configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gucon_core::vocab::EXP;
use gucon_core::{DateTime, DayTimeDuration};

use crate::error::BenchError;
use crate::rules::Selectivity;

/// Knobs of the synthetic data generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub seed: u64,
    /// Fact triples to generate; events come on top.
    pub triple_target: u64,
    /// Overrides the patient count derived from the target.
    pub patient_count: Option<u64>,
    /// Mean admissions per patient.
    pub admissions_per_patient: f64,
    /// Mean lab result entries per admission.
    pub lab_tests_per_admission: f64,
    pub time_origin: String,
    /// An `xsd:dayTimeDuration`.
    pub horizon: String,
    /// Share of rule groundings that get an execution event.
    pub event_fraction: f64,
    /// Namespace for generated rules.
    pub base: String,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 42,
            triple_target: 100_000,
            patient_count: None,
            admissions_per_patient: 3.72,
            lab_tests_per_admission: 296.0,
            time_origin: "2025-07-01T00:00:00+02:00".into(),
            horizon: "P30D".into(),
            event_fraction: 0.1,
            base: EXP.into(),
        }
    }
}

impl GenerationConfig {
    pub fn with_target(&self, triple_target: u64) -> Self {
        GenerationConfig {
            triple_target,
            ..self.clone()
        }
    }

    pub fn origin(&self) -> Result<DateTime, BenchError> {
        self.time_origin
            .parse()
            .map_err(|e| BenchError::Config(format!("time_origin: {e}")))
    }

    pub fn horizon(&self) -> Result<DayTimeDuration, BenchError> {
        let d = DayTimeDuration::parse(&self.horizon).map_err(|e| BenchError::Config(format!("horizon: {e}")))?;
        if d.as_millis() < 6 * 3_600_000 {
            return Err(BenchError::Config("horizon must be at least six hours".into()));
        }
        Ok(d)
    }

    pub fn horizon_end(&self) -> Result<DateTime, BenchError> {
        self.origin()?
            .checked_add(self.horizon()?)
            .map_err(|e| BenchError::Config(format!("horizon: {e}")))
    }

    /// The instant benchmarks evaluate at: the middle of the horizon.
    pub fn evaluation_time(&self) -> Result<DateTime, BenchError> {
        let half = DayTimeDuration::from_millis(self.horizon()?.as_millis() / 2);
        self.origin()?
            .checked_add(half)
            .map_err(|e| BenchError::Config(format!("horizon: {e}")))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.horizon_end()?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v >= 1.0 {
                Ok(())
            } else {
                Err(BenchError::Config(format!(
                    "{name} must be a finite number >= 1, got {v}"
                )))
            }
        };
        positive("admissions_per_patient", self.admissions_per_patient)?;
        positive("lab_tests_per_admission", self.lab_tests_per_admission)?;
        if !(0.0..=1.0).contains(&self.event_fraction) {
            return Err(BenchError::Config(format!(
                "event_fraction must lie in [0, 1], got {}",
                self.event_fraction
            )));
        }
        if self.patient_count == Some(0) {
            return Err(BenchError::Config("patient_count must be positive".into()));
        }
        Ok(())
    }
}

/// Which dimension a benchmark scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TaskId {
    /// Steps are rule counts over one KB.
    Rules,
    /// Steps are KB triple targets under one rule count.
    Data,
}

impl TryFrom<u8> for TaskId {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, String> {
        match value {
            1 => Ok(TaskId::Rules),
            2 => Ok(TaskId::Data),
            other => Err(format!("task id must be 1 or 2, got {other}")),
        }
    }
}

impl From<TaskId> for u8 {
    fn from(id: TaskId) -> u8 {
        match id {
            TaskId::Rules => 1,
            TaskId::Data => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkTask {
    pub id: TaskId,
    pub steps: Vec<usize>,
    /// The KB size for task 1, the rule count for task 2.
    pub fixed: usize,
    pub class: Selectivity,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_trim")]
    pub trim: usize,
}

fn default_runs() -> usize {
    10
}

fn default_trim() -> usize {
    2
}

impl BenchmarkTask {
    /// Rule counts 5 to 21 over a 100k-triple KB.
    pub fn desk_rules() -> Self {
        BenchmarkTask {
            id: TaskId::Rules,
            steps: vec![5, 9, 13, 17, 21],
            fixed: 100_000,
            class: Selectivity::High,
            runs: 10,
            trim: 2,
        }
    }

    /// KBs of 25k to 200k triples under 13 rules.
    pub fn desk_data() -> Self {
        BenchmarkTask {
            id: TaskId::Data,
            steps: vec![25_000, 50_000, 100_000, 200_000],
            fixed: 13,
            class: Selectivity::High,
            runs: 10,
            trim: 2,
        }
    }

    /// The full-size rule scaling sequence.
    pub fn full_rules() -> Self {
        BenchmarkTask {
            fixed: 406_000,
            ..BenchmarkTask::desk_rules()
        }
    }

    /// The full-size data scaling sequence.
    pub fn full_data() -> Self {
        BenchmarkTask {
            steps: vec![100_000, 208_000, 406_000, 604_000, 802_000, 1_000_000],
            ..BenchmarkTask::desk_data()
        }
    }

    /// `(rule count, triple target)` of a step.
    pub fn shape(&self, step: usize) -> (usize, u64) {
        match self.id {
            TaskId::Rules => (step, self.fixed as u64),
            TaskId::Data => (self.fixed, step as u64),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.steps.is_empty() {
            return Err(BenchError::Config("task needs at least one step".into()));
        }
        if self.runs <= 2 * self.trim {
            return Err(BenchError::Config(format!(
                "{} runs leave nothing after trimming {} from each end",
                self.runs, self.trim
            )));
        }
        let mut seen = self.steps.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.steps.len() {
            return Err(BenchError::Config("steps must be distinct".into()));
        }
        Ok(())
    }
}

/// Rules for a one-off `generate` without a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub count: usize,
    pub class: Selectivity,
}

/// One config file: generator settings plus an optional task or rule spec.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub generation: GenerationConfig,
    pub rules: Option<RuleSpec>,
    pub task: Option<BenchmarkTask>,
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let config: BenchConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        config.generation.validate()?;
        if let Some(task) = &config.task {
            task.validate()?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(BenchError::io(path))?;
        BenchConfig::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
