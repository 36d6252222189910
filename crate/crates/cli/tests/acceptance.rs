//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. The scaling criterion spawns the real binary and takes minutes.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use gucon_bench::runner::render_kb;
use gucon_bench::{
    classify_selectivity, generate_dataset, generate_rules, predicate_pairs, prepare_fixtures, run_benchmark,
    BenchError, BenchmarkTask, GenerationConfig, Selectivity, SelectivityBands, Subprocess,
};
use gucon_core::algebra::{evaluate, GraphPattern, TermPattern};
use gucon_core::engine::{
    check_rule_compliance_atemporal, classify, get_obligation_states, ComplianceStatus, GroundedObligation,
    ObligationStates, StateSet,
};
use gucon_core::kb::{load_kb, TemporalKB};
use gucon_core::report::{build_report, read_report, ReportMeta};
use gucon_core::syntax::{parse_turtle_star, serialize_turtle_star};
use gucon_core::ucp::parse_policy_text;
use gucon_core::vocab::EXP;
use gucon_core::{Iri, Term, TimeInstant};
use gucon_testkit::fixtures::{
    dt, HOSPITAL_EVALUATION_TIME, HOSPITAL_KB, HOSPITAL_KB_IRI, HOSPITAL_POLICY, HOSPITAL_RULE, STATE_CASES,
};
use gucon_testkit::gen::{
    random_atemporal_case, random_datetime, random_graph, random_pattern, random_temporal_kb, random_window,
};
use gucon_testkit::oracle::{oracle_atemporal_compliance, oracle_evaluate};
use gucon_testkit::rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn state_matrix() -> Outcome {
    let started = Instant::now();
    let (a, ns, f, v, e) = (
        StateSet::ACTIVE,
        StateSet::NOT_SATISFIED,
        StateSet::FULFILLED,
        StateSet::VIOLATED,
        StateSet::EXPIRED,
    );
    let expected = [
        ("S11", a | ns),
        ("S12", a | f),
        ("S21", a | ns),
        ("S22", a | f),
        ("S23", e | v),
        ("S24", e | f),
        ("S31", a | ns),
        ("S32", a | f),
        ("S33", e | v),
        ("S34", e | f),
    ];
    ensure!(STATE_CASES.len() == expected.len(), "{} cases", STATE_CASES.len());
    for (case, (id, want)) in STATE_CASES.iter().zip(expected) {
        ensure!(case.id == id, "case order: {} vs {id}", case.id);
        let states =
            get_obligation_states(&case.policy(), &case.kb(), case.evaluation_time()).map_err(|e| e.to_string())?;
        ensure!(states.len() == 1, "{id}: {} obligations", states.len());
        let got = states.entries[0].1;
        ensure!(got == want, "{id}: got {got}, want {want}");
        let non_compliant = want.contains(StateSet::VIOLATED);
        ensure!(
            states.status().is_compliant() != non_compliant,
            "{id}: status {}",
            states.status()
        );
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("10 cases in {elapsed:?}"))
}

fn hospital_example() -> Outcome {
    let policy = parse_policy_text(HOSPITAL_RULE, None).map_err(|e| e.to_string())?;
    let ucp = parse_policy_text(HOSPITAL_POLICY, None).map_err(|e| e.to_string())?;
    ensure!(
        ucp.rules[0].condition == policy.rules[0].condition,
        "policy encodings disagree on the condition"
    );
    ensure!(
        ucp.rules[0].action == policy.rules[0].action,
        "policy encodings disagree on the action"
    );
    let graph = parse_turtle_star(HOSPITAL_KB).map_err(|e| e.to_string())?;
    let kb = load_kb(&graph, Iri::new(HOSPITAL_KB_IRI)).map_err(|e| e.to_string())?;
    let t = dt(HOSPITAL_EVALUATION_TIME);
    let states = get_obligation_states(&policy, &kb, t).map_err(|e| e.to_string())?;
    ensure!(states.len() == 1, "{} obligations", states.len());
    let (o, s) = &states.entries[0];
    ensure!(*s == StateSet::FULFILLED | StateSet::EXPIRED, "states {s}");
    ensure!(
        o.start == TimeInstant::Finite(dt("2025-07-20T10:30:00+02:00")),
        "start {}",
        o.start
    );
    ensure!(
        o.deadline == TimeInstant::Finite(dt("2025-07-20T22:30:00+02:00")),
        "deadline {}",
        o.deadline
    );
    ensure!(
        o.exec_times == vec![dt("2025-07-20T12:30:00+02:00")],
        "executions {:?}",
        o.exec_times
    );
    ensure!(
        states.status() == ComplianceStatus::Compliant,
        "status {}",
        states.status()
    );

    let policy_iri = policy
        .primary_iri()
        .cloned()
        .unwrap_or_else(|| Iri::new(format!("{EXP}policy")));
    let meta = ReportMeta::new(policy_iri, kb.iri().clone(), t);
    let text = serialize_turtle_star(&build_report(&states, states.status(), &meta));
    let back = read_report(&parse_turtle_star(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(back.describes(&states), "report does not describe the states");
    ensure!(
        back.status == ComplianceStatus::Compliant,
        "report status {}",
        back.status
    );
    Ok("FULFILLED+EXPIRED, COMPLIANT, report round-trips".into())
}

fn has_quoted(p: &GraphPattern) -> bool {
    match p {
        GraphPattern::Empty => false,
        GraphPattern::Triple(tp) => {
            matches!(tp.subject, TermPattern::Triple(_)) || matches!(tp.object, TermPattern::Triple(_))
        }
        GraphPattern::And(l, r)
        | GraphPattern::Union(l, r)
        | GraphPattern::Optional(l, r)
        | GraphPattern::Minus(l, r) => has_quoted(l) || has_quoted(r),
        GraphPattern::Filter(i, _) | GraphPattern::Bind(i, _, _) => has_quoted(i),
    }
}

fn algebra_agreement() -> Outcome {
    let started = Instant::now();
    let mut r = rng(0xACCE);
    let mut quoted = 0;
    for i in 0..200 {
        let graph = random_graph(&mut r, 8);
        let pattern = random_pattern(&mut r, 4, 3);
        quoted += has_quoted(&pattern) as usize;
        let got: BTreeSet<_> = evaluate(&pattern, &graph).into_iter().collect();
        let want = oracle_evaluate(&pattern, &graph);
        ensure!(got == want, "pattern {i} disagrees: {pattern:?}");
    }
    ensure!(quoted > 0, "no quoted patterns drawn");
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("200 patterns, {quoted} with quoted triples, {elapsed:?}"))
}

fn state_invariants() -> Outcome {
    let mut r = rng(0x1A7);
    let mut entries = Vec::new();
    for i in 0..1000 {
        let (start, deadline) = random_window(&mut r);
        let execs: Vec<_> = (0..r.random_range(0..3)).map(|_| random_datetime(&mut r)).collect();
        let t = random_datetime(&mut r);
        let s = classify(start, deadline, &execs, t);
        if s.contains(StateSet::VIOLATED) {
            ensure!(s.contains(StateSet::EXPIRED), "case {i}: violated without expired");
        }
        if s.contains(StateSet::NOT_SATISFIED) {
            ensure!(s.contains(StateSet::ACTIVE), "case {i}: not satisfied without active");
        }
        ensure!(
            !s.contains(StateSet::FULFILLED | StateSet::VIOLATED),
            "case {i}: fulfilled and violated"
        );
        if deadline == TimeInstant::PosInfinity {
            ensure!(
                !s.contains(StateSet::EXPIRED) && !s.contains(StateSet::VIOLATED),
                "case {i}: open deadline {s}"
            );
        }
        let obligation = GroundedObligation {
            rule: Iri::new(format!("{EXP}rule")),
            actor: Term::iri(&format!("{EXP}actor-{i}")),
            action: Iri::new(format!("{EXP}do")),
            resource: Term::iri(&format!("{EXP}res-{i}")),
            start,
            deadline,
            exec_times: execs,
            mapping: Default::default(),
        };
        entries.push((obligation, s));
    }
    for g in 0..100 {
        let k = r.random_range(0..8);
        let group: Vec<_> = (0..k)
            .map(|_| entries[r.random_range(0..entries.len())].clone())
            .collect();
        let states = ObligationStates {
            evaluated_at: random_datetime(&mut r),
            entries: group,
        };
        let none_violated = states.violated().next().is_none();
        ensure!(
            states.status().is_compliant() == none_violated,
            "grouping {g}: status {}",
            states.status()
        );
    }
    Ok("1000 obligations, 100 groupings".into())
}

fn snapshot_monotonicity() -> Outcome {
    let mut r = rng(0x5AA9);
    for i in 0..100 {
        let kb = random_temporal_kb(&mut r, 10, 12);
        let (a, b) = (random_datetime(&mut r), random_datetime(&mut r));
        let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
        let (s1, s2) = (kb.snapshot(t1), kb.snapshot(t2));
        ensure!(s1.is_subset(&s2), "kb {i}: earlier snapshot not contained");
        ensure!(
            kb.dkb().is_subset(&s1) && kb.dkb().is_subset(&s2),
            "kb {i}: facts missing"
        );
    }
    Ok("100 knowledge bases".into())
}

fn scaling() -> Outcome {
    let started = Instant::now();
    let program = PathBuf::from(env!("CARGO_BIN_EXE_gucon"));
    let config = GenerationConfig::default();
    let t = config.evaluation_time().map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for task in [BenchmarkTask::desk_rules(), BenchmarkTask::desk_data()] {
        let fixtures = prepare_fixtures(&task, &config, dir.path()).map_err(|e| e.to_string())?;
        let report = run_benchmark(
            &task,
            &fixtures,
            t,
            &Subprocess {
                program: program.clone(),
            },
        )
        .map_err(|e| e.to_string())?;
        let fit = report.fit.ok_or("no fit")?;
        let means: Vec<String> = report
            .steps
            .iter()
            .map(|s| format!("{}:{:.0}ms", s.size, s.stats.mean))
            .collect();
        ensure!(
            fit.r_squared >= 0.9,
            "task {:?}: r2 {:.4} ({})",
            task.id,
            fit.r_squared,
            means.join(" ")
        );
        notes.push(format!("task {:?} r2 {:.4}", task.id, fit.r_squared));
    }
    let elapsed = started.elapsed();
    ensure!(elapsed <= Duration::from_secs(30 * 60), "took {elapsed:?}");
    Ok(format!("{}, {:.0}s", notes.join(", "), elapsed.as_secs_f64()))
}

fn generator() -> Outcome {
    let config = GenerationConfig::default();
    let bands = SelectivityBands::default();
    let facts = generate_dataset(&config).map_err(|e| e.to_string())?;
    let again = generate_dataset(&config).map_err(|e| e.to_string())?;
    let rules = generate_rules(&facts, 13, Selectivity::High, &config, &bands).map_err(|e| e.to_string())?;
    let rules_again = generate_rules(&again, 13, Selectivity::High, &config, &bands).map_err(|e| e.to_string())?;
    ensure!(
        render_kb(facts.clone(), &rules) == render_kb(again, &rules_again),
        "KB bytes differ"
    );
    ensure!(rules.policy_text() == rules_again.policy_text(), "policy bytes differ");

    let pairs = predicate_pairs(&facts);
    ensure!(pairs.len() == 56, "{} predicate pairs", pairs.len());

    match generate_rules(&facts, 22, Selectivity::High, &config, &bands) {
        Err(BenchError::InsufficientPairs { available: 21, .. }) => {}
        other => return Err(format!("22 high rules: {other:?}")),
    }

    let end = config.horizon_end().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for (class, n) in [
        (Selectivity::Low, 21),
        (Selectivity::Medium, 14),
        (Selectivity::High, 21),
    ] {
        let set = generate_rules(&facts, n, class, &config, &bands).map_err(|e| e.to_string())?;
        let kb = TemporalKB::new(Iri::new("urn:kb"), facts.clone(), set.events());
        for r in &set.rules {
            let (found, matches) = classify_selectivity(&r.rule, &kb, end, &bands);
            ensure!(matches >= 1, "{} is unsatisfiable", r.rule.iri);
            ensure!(found == class, "{} classified {found}, wanted {class}", r.rule.iri);
            checked += 1;
        }
    }
    Ok(format!("deterministic, 56 pairs, {checked} rules satisfiable"))
}

fn atemporal_agreement() -> Outcome {
    let mut r = rng(0xA7E);
    let mut compliant = 0;
    for i in 0..100 {
        let (rule, graph) = random_atemporal_case(&mut r);
        let got = check_rule_compliance_atemporal(&rule, &graph);
        ensure!(got == oracle_atemporal_compliance(&rule, &graph), "case {i} disagrees");
        compliant += got as usize;
    }
    Ok(format!("100 cases, {compliant} compliant"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("state matrix golden suite", state_matrix),
        ("hospital example end to end", hospital_example),
        ("evaluator agrees with enumeration", algebra_agreement),
        ("obligation state invariants", state_invariants),
        ("snapshot monotonicity", snapshot_monotonicity),
        ("cold-run scaling is linear", scaling),
        ("generator determinism and coverage", generator),
        ("atemporal compliance agrees with enumeration", atemporal_agreement),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
