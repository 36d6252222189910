//! `gucon`: obligation states and compliance checks from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gucon_bench::runner::{render_kb, KB_FILE, POLICY_FILE};
use gucon_bench::{
    generate_dataset, generate_rules, locate_fixtures, prepare_fixtures, run_benchmark, BenchConfig, InProcess,
    Selectivity, SelectivityBands, StepExecutor, Subprocess,
};
use gucon_core::engine::{get_obligation_states, ComplianceStatus, ObligationStates};
use gucon_core::kb::{load_kb, TemporalKB};
use gucon_core::policy::PolicyDocument;
use gucon_core::report::{build_report, ReportMeta};
use gucon_core::syntax::{parse_turtle_star, serialize_turtle_star, PrefixMap};
use gucon_core::ucp::{default_policy_iri, parse_policy_text, PolicyFormat};
use gucon_core::vocab::EXP;
use gucon_core::{DateTime, Iri, Term};

/// Exit status for operational failures; 1 is reserved for non-compliance.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "gucon",
    version,
    about = "Temporal obligation compliance over RDF-star knowledge bases"
)]
struct Cli {
    /// Namespace for minted report and rule IRIs.
    #[arg(long, env = "GUCON_BASE", default_value = EXP, global = true)]
    base: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every grounded obligation with its states at --time.
    States(EvalArgs),
    /// Print COMPLIANT or NON_COMPLIANT; exit 1 when non-compliant.
    Check(EvalArgs),
    /// Parse and validate a policy, and optionally a KB.
    Validate {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        kb: Option<PathBuf>,
        #[arg(long, value_enum)]
        policy_format: Option<Format>,
    },
    /// Write a synthetic KB and policy, or the fixtures of a benchmark task.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time a benchmark task and write runs.csv and summary.csv.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Previously generated fixtures. Without it, fixtures are generated under OUT/fixtures.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate inside this process instead of spawning one per run.
        #[arg(long)]
        in_process: bool,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    /// Evaluation instant, an xsd:dateTime.
    #[arg(long)]
    time: String,
    /// Where to write the Turtle-star compliance report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where to write the main output instead of standard output. For
    /// check this is the report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    policy_format: Option<Format>,
    /// IRI of the KB. Defaults to one minted from the file name.
    #[arg(long)]
    kb_iri: Option<String>,
    /// Report timestamp. Defaults to --time.
    #[arg(long)]
    report_time: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Arrow,
    Ucp,
}

impl From<Format> for PolicyFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Arrow => PolicyFormat::Arrow,
            Format::Ucp => PolicyFormat::Ucp,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::States(args) => states(&args, &cli.base),
        Command::Check(args) => check(&args, &cli.base),
        Command::Validate {
            policy,
            kb,
            policy_format,
        } => validate(&policy, kb.as_deref(), policy_format),
        Command::Generate { config, out, seed } => generate(&config, &out, seed),
        Command::Bench {
            config,
            out,
            fixtures,
            seed,
            in_process,
        } => bench(&config, &out, fixtures.as_deref(), seed, in_process),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_time(text: &str, flag: &str) -> Result<DateTime> {
    text.parse().map_err(|e| anyhow::anyhow!("{flag}: {e}"))
}

fn load_kb_file(path: &Path, iri: Iri) -> Result<TemporalKB> {
    let graph = parse_turtle_star(&read(path)?).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))?;
    load_kb(&graph, iri).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn load_policy(path: &Path, format: Option<Format>) -> Result<PolicyDocument> {
    parse_policy_text(&read(path)?, format.map(Into::into)).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn kb_iri(args: &EvalArgs, base: &str) -> Iri {
    match &args.kb_iri {
        Some(iri) => Iri::new(iri.as_str()),
        None => {
            let stem = args
                .kb
                .file_stem()
                .map_or("kb".into(), |s| s.to_string_lossy().into_owned());
            let slug: String = stem
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
                .collect();
            Iri::new(format!("{base}kb-{slug}"))
        }
    }
}

struct Evaluation {
    policy: PolicyDocument,
    kb: TemporalKB,
    states: ObligationStates,
}

fn evaluate(args: &EvalArgs, base: &str) -> Result<Evaluation> {
    let t = parse_time(&args.time, "--time")?;
    let kb = load_kb_file(&args.kb, kb_iri(args, base))?;
    let policy = load_policy(&args.policy, args.policy_format)?;
    let states = get_obligation_states(&policy, &kb, t)?;
    Ok(Evaluation { policy, kb, states })
}

fn report_text(eval: &Evaluation, args: &EvalArgs, base: &str) -> Result<String> {
    let report_time = match &args.report_time {
        Some(text) => parse_time(text, "--report-time")?,
        None => eval.states.evaluated_at,
    };
    let policy = eval.policy.primary_iri().cloned().unwrap_or_else(default_policy_iri);
    let meta = ReportMeta::new(policy, eval.kb.iri().clone(), report_time).with_base(base);
    Ok(serialize_turtle_star(&build_report(
        &eval.states,
        eval.states.status(),
        &meta,
    )))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn show(term: &Term, prefixes: &PrefixMap) -> String {
    match term {
        Term::Iri(iri) => prefixes
            .compact(iri.as_str())
            .unwrap_or_else(|| format!("<{}>", iri.as_str())),
        other => other.to_string(),
    }
}

/// Tab-separated, one row per obligation.
fn states_table(states: &ObligationStates) -> String {
    let prefixes = PrefixMap::bundled();
    let mut out = String::from("rule\tentity\taction\tresource\tstart\tdeadline\texecutions\tstates\n");
    for (o, s) in &states.entries {
        let execs: Vec<String> = o.exec_times.iter().map(DateTime::to_lexical).collect();
        let names: Vec<&str> = s.iter().map(|x| x.name()).collect();
        let row = [
            show(&Term::Iri(o.rule.clone()), &prefixes),
            show(&o.actor, &prefixes),
            show(&Term::Iri(o.action.clone()), &prefixes),
            show(&o.resource, &prefixes),
            o.start.to_string(),
            o.deadline.to_string(),
            execs.join(","),
            names.join(","),
        ];
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

fn states(args: &EvalArgs, base: &str) -> Result<u8> {
    let eval = evaluate(args, base)?;
    emit(args.out.as_deref(), &states_table(&eval.states))?;
    if let Some(path) = &args.report {
        emit(Some(path), &report_text(&eval, args, base)?)?;
    }
    Ok(0)
}

fn check(args: &EvalArgs, base: &str) -> Result<u8> {
    let eval = evaluate(args, base)?;
    let status = eval.states.status();
    for path in [&args.report, &args.out].into_iter().flatten() {
        emit(Some(path), &report_text(&eval, args, base)?)?;
    }
    println!("{status}");
    Ok(match status {
        ComplianceStatus::Compliant => 0,
        ComplianceStatus::NonCompliant => 1,
    })
}

fn validate(policy: &Path, kb: Option<&Path>, format: Option<Format>) -> Result<u8> {
    let doc = load_policy(policy, format)?;
    println!("{}: {} rules", policy.display(), doc.len());
    if let Some(path) = kb {
        let kb = load_kb_file(path, Iri::new(format!("{EXP}kb")))?;
        println!(
            "{}: {} facts, {} events",
            path.display(),
            kb.dkb().len(),
            kb.events().len()
        );
    }
    Ok(0)
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<BenchConfig> {
    let mut config = BenchConfig::load(path)?;
    if let Some(seed) = seed {
        config.generation.seed = seed;
    }
    Ok(config)
}

fn generate(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<u8> {
    let config = load_config(config_path, seed)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    if let Some(task) = &config.task {
        let fixtures = prepare_fixtures(task, &config.generation, out)?;
        for f in fixtures {
            println!(
                "step {} ({}): {}",
                f.step,
                f.size,
                f.kb.parent().unwrap_or(out).display()
            );
        }
        return Ok(0);
    }
    let facts = generate_dataset(&config.generation)?;
    let (count, class) = config
        .rules
        .as_ref()
        .map_or((0, Selectivity::Low), |r| (r.count, r.class));
    let rules = generate_rules(&facts, count, class, &config.generation, &SelectivityBands::default())?;
    emit(Some(&out.join(POLICY_FILE)), &rules.policy_text())?;
    emit(Some(&out.join(KB_FILE)), &render_kb(facts, &rules))?;
    println!(
        "wrote {} and {}",
        out.join(KB_FILE).display(),
        out.join(POLICY_FILE).display()
    );
    Ok(0)
}

fn bench(config_path: &Path, out: &Path, fixtures: Option<&Path>, seed: Option<u64>, in_process: bool) -> Result<u8> {
    let config = load_config(config_path, seed)?;
    let Some(task) = &config.task else {
        bail!("{}: a [task] section is required for bench", config_path.display());
    };
    let located = match fixtures {
        Some(dir) => locate_fixtures(task, dir)?,
        None => prepare_fixtures(task, &config.generation, &out.join("fixtures"))?,
    };
    let executor: Box<dyn StepExecutor> = if in_process {
        Box::new(InProcess)
    } else {
        Box::new(Subprocess {
            program: std::env::current_exe().context("cannot locate the gucon executable")?,
        })
    };
    let t = config.generation.evaluation_time()?;
    let report = run_benchmark(task, &located, t, executor.as_ref())?;
    report.write(out)?;
    for s in &report.steps {
        println!("step {} size {}: {:.3} ms", s.step, s.size, s.stats.mean);
    }
    if let Some(fit) = report.fit {
        println!(
            "slope {:.6} intercept {:.3} r2 {:.4}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    Ok(0)
}
