//! Fixture preparation and the timed runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use gucon_core::engine::get_obligation_states;
use gucon_core::kb::{load_kb, TemporalKB};
use gucon_core::syntax::{parse_turtle_star, serialize_turtle_star};
use gucon_core::ucp::parse_policy_text;
use gucon_core::{DateTime, Graph, Iri};

use crate::config::{BenchmarkTask, GenerationConfig, TaskId};
use crate::error::BenchError;
use crate::generate::generate_dataset;
use crate::rules::{generate_rules, RuleSet, SelectivityBands};
use crate::{TimingFit, TimingStats};

pub const KB_FILE: &str = "kb.ttls";
pub const POLICY_FILE: &str = "policy.gucon";

/// The files of one benchmark step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFixture {
    /// Position in the task, from 1.
    pub step: usize,
    /// The varied quantity: rules for task 1, triples for task 2.
    pub size: usize,
    pub kb: PathBuf,
    pub policy: PathBuf,
}

pub fn step_dir(root: &Path, task: &BenchmarkTask, size: usize) -> PathBuf {
    root.join(format!("task{}", u8::from(task.id)))
        .join(format!("step-{size}"))
}

/// The fact graph plus rule events as one Turtle-star document.
pub fn render_kb(facts: Graph, rules: &RuleSet) -> String {
    let kb = TemporalKB::new(Iri::new("urn:gucon:generated"), facts, rules.events());
    serialize_turtle_star(&kb.render())
}

fn write(path: &Path, contents: &str) -> Result<(), BenchError> {
    fs::write(path, contents).map_err(BenchError::io(path))
}

/// Generates and writes the KB and policy of every step under `root`.
pub fn prepare_fixtures(
    task: &BenchmarkTask,
    config: &GenerationConfig,
    root: &Path,
) -> Result<Vec<StepFixture>, BenchError> {
    task.validate()?;
    let bands = SelectivityBands::default();
    let shared = match task.id {
        TaskId::Rules => {
            let facts = generate_dataset(&config.with_target(task.fixed as u64))?;
            let most = task.steps.iter().copied().max().unwrap_or(0);
            let rules = generate_rules(&facts, most, task.class, config, &bands)?;
            Some((facts, rules))
        }
        TaskId::Data => None,
    };
    let mut out = Vec::new();
    for (i, &size) in task.steps.iter().enumerate() {
        let (facts, rules) = match &shared {
            Some((facts, rules)) => (facts.clone(), rules.prefix(size)),
            None => {
                let facts = generate_dataset(&config.with_target(size as u64))?;
                let rules = generate_rules(&facts, task.fixed, task.class, config, &bands)?;
                (facts, rules)
            }
        };
        let dir = step_dir(root, task, size);
        fs::create_dir_all(&dir).map_err(BenchError::io(&dir))?;
        let fixture = StepFixture {
            step: i + 1,
            size,
            kb: dir.join(KB_FILE),
            policy: dir.join(POLICY_FILE),
        };
        write(&fixture.policy, &rules.policy_text())?;
        write(&fixture.kb, &render_kb(facts, &rules))?;
        out.push(fixture);
    }
    Ok(out)
}

/// The fixtures of an already prepared task.
pub fn locate_fixtures(task: &BenchmarkTask, root: &Path) -> Result<Vec<StepFixture>, BenchError> {
    task.steps
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let dir = step_dir(root, task, size);
            let fixture = StepFixture {
                step: i + 1,
                size,
                kb: dir.join(KB_FILE),
                policy: dir.join(POLICY_FILE),
            };
            for path in [&fixture.kb, &fixture.policy] {
                if !path.is_file() {
                    return Err(BenchError::MissingFixture {
                        step: size,
                        path: path.clone(),
                    });
                }
            }
            Ok(fixture)
        })
        .collect()
}

/// Runs one end-to-end evaluation of a step and reports its wall time.
pub trait StepExecutor {
    fn execute(&self, fixture: &StepFixture, t: DateTime) -> Result<Duration, String>;
}

/// Parses and evaluates inside this process, from the files each time.
#[derive(Debug, Clone, Copy, Default)]
pub struct InProcess;

impl StepExecutor for InProcess {
    fn execute(&self, fixture: &StepFixture, t: DateTime) -> Result<Duration, String> {
        let started = Instant::now();
        let kb_text = fs::read_to_string(&fixture.kb).map_err(|e| e.to_string())?;
        let policy_text = fs::read_to_string(&fixture.policy).map_err(|e| e.to_string())?;
        let graph = parse_turtle_star(&kb_text).map_err(|e| e.to_string())?;
        let kb = load_kb(&graph, Iri::new("urn:gucon:bench")).map_err(|e| e.to_string())?;
        let policy = parse_policy_text(&policy_text, None).map_err(|e| e.to_string())?;
        let states = get_obligation_states(&policy, &kb, t).map_err(|e| e.to_string())?;
        std::hint::black_box(states.status());
        Ok(started.elapsed())
    }
}

/// Spawns `program check` per run, so every run starts from a fresh process.
#[derive(Debug, Clone)]
pub struct Subprocess {
    pub program: PathBuf,
}

impl StepExecutor for Subprocess {
    fn execute(&self, fixture: &StepFixture, t: DateTime) -> Result<Duration, String> {
        let started = Instant::now();
        let output = Command::new(&self.program)
            .arg("check")
            .arg("--kb")
            .arg(&fixture.kb)
            .arg("--policy")
            .arg(&fixture.policy)
            .arg("--time")
            .arg(t.to_lexical())
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .output()
            .map_err(|e| format!("{}: {e}", self.program.display()))?;
        let elapsed = started.elapsed();
        // Exit 1 is a non-compliant verdict, not a failure.
        match output.status.code() {
            Some(0 | 1) => Ok(elapsed),
            _ => Err(format!(
                "{} exited with {}: {}",
                self.program.display(),
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub step: usize,
    pub size: usize,
    pub run_index: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub step: usize,
    pub size: usize,
    pub stats: TimingStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub rows: Vec<RunRow>,
    pub steps: Vec<StepSummary>,
    /// Trimmed mean against step size. Absent with fewer than two steps.
    pub fit: Option<TimingFit>,
}

/// Times every step `task.runs` times, sequentially.
pub fn run_benchmark(
    task: &BenchmarkTask,
    fixtures: &[StepFixture],
    t: DateTime,
    executor: &dyn StepExecutor,
) -> Result<BenchmarkReport, BenchError> {
    task.validate()?;
    let mut rows = Vec::new();
    let mut steps = Vec::new();
    for &size in &task.steps {
        let fixture = fixtures
            .iter()
            .find(|f| f.size == size)
            .ok_or_else(|| BenchError::MissingFixture {
                step: size,
                path: PathBuf::new(),
            })?;
        let mut samples = Vec::with_capacity(task.runs);
        for run in 0..task.runs {
            let elapsed = executor.execute(fixture, t).map_err(|message| BenchError::Run {
                step: fixture.step,
                run,
                message,
            })?;
            let ms = elapsed.as_secs_f64() * 1000.0;
            samples.push(ms);
            rows.push(RunRow {
                step: fixture.step,
                size,
                run_index: run,
                elapsed_ms: ms,
            });
        }
        let stats = TimingStats::compute(&samples, task.trim).expect("validated run count");
        steps.push(StepSummary {
            step: fixture.step,
            size,
            stats,
        });
    }
    let xs: Vec<f64> = steps.iter().map(|s| s.size as f64).collect();
    let ys: Vec<f64> = steps.iter().map(|s| s.stats.mean).collect();
    Ok(BenchmarkReport {
        rows,
        steps,
        fit: TimingFit::fit(&xs, &ys),
    })
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv of ascii fields")
}

impl BenchmarkReport {
    pub fn runs_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "size", "run_index", "elapsed_ms"])?;
        for r in &self.rows {
            w.write_record([
                r.step.to_string(),
                r.size.to_string(),
                r.run_index.to_string(),
                format!("{:.3}", r.elapsed_ms),
            ])?;
        }
        Ok(finish(w))
    }

    /// One row per step; the fit columns repeat on every row.
    pub fn summary_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "step",
            "size",
            "trimmed_mean_ms",
            "min",
            "max",
            "fit_slope",
            "fit_intercept",
            "r2",
        ])?;
        let fit = |f: fn(&TimingFit) -> f64| self.fit.as_ref().map_or(String::new(), |x| format!("{:.6}", f(x)));
        for s in &self.steps {
            w.write_record([
                s.step.to_string(),
                s.size.to_string(),
                format!("{:.3}", s.stats.mean),
                format!("{:.3}", s.stats.min),
                format!("{:.3}", s.stats.max),
                fit(|x| x.slope),
                fit(|x| x.intercept),
                fit(|x| x.r_squared),
            ])?;
        }
        Ok(finish(w))
    }

    /// Writes `runs.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), BenchError> {
        fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
        write(&dir.join("runs.csv"), &self.runs_csv()?)?;
        write(&dir.join("summary.csv"), &self.summary_csv()?)
    }
}
