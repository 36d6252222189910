//! Hospital scenario fixtures.

use std::path::PathBuf;

use gucon_core::kb::{load_kb, TemporalKB};
use gucon_core::policy::PolicyDocument;
use gucon_core::syntax::{parse_rule_document, parse_turtle_star};
use gucon_core::{DateTime, Iri};

pub const HOSPITAL_RULE: &str = include_str!("../fixtures/hospital.gucon");
pub const HOSPITAL_POLICY: &str = include_str!("../fixtures/hospital-policy.ttl");
pub const HOSPITAL_KB: &str = include_str!("../fixtures/hospital.ttls");

pub const S1_RULE: &str = include_str!("../fixtures/s1.gucon");
pub const S1_KB: &str = include_str!("../fixtures/s1.ttls");
pub const S2_RULE: &str = include_str!("../fixtures/s2.gucon");
pub const S2_KB: &str = include_str!("../fixtures/s2.ttls");
pub const S3_KB: &str = include_str!("../fixtures/s3.ttls");

pub const HOSPITAL_KB_IRI: &str = "http://example.org/kb-trace-doctor-angelika-smith";
pub const HOSPITAL_EVALUATION_TIME: &str = "2025-07-21T10:00:00+02:00";

/// Directory holding the fixture files.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn dt(lexical: &str) -> DateTime {
    lexical.parse().expect("fixture dateTime")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    S1,
    S2,
    S3,
}

impl Scenario {
    pub fn rule_text(self) -> &'static str {
        match self {
            Scenario::S1 => S1_RULE,
            Scenario::S2 => S2_RULE,
            Scenario::S3 => HOSPITAL_RULE,
        }
    }

    pub fn kb_text(self) -> &'static str {
        match self {
            Scenario::S1 => S1_KB,
            Scenario::S2 => S2_KB,
            Scenario::S3 => S3_KB,
        }
    }

    /// The ground action recorded when the obligation is carried out.
    pub fn action(self) -> &'static str {
        match self {
            Scenario::S1 => "ex:doctor-angelika-smith gucon:share ex:treatment-plan-alice-waltz",
            Scenario::S2 => "ex:patient-alice-waltz gucon:sign ex:discharge-form-alice-waltz-2025-07-15",
            Scenario::S3 => "ex:doctor-angelika-smith gucon:sign ex:diagnosis-report-alice-waltz-2025-07-15",
        }
    }
}

/// One row of the correctness matrix: a scenario, the evaluation time
/// and an optional execution of the required action.
#[derive(Debug, Clone, Copy)]
pub struct StateCase {
    pub id: &'static str,
    pub scenario: Scenario,
    pub time: &'static str,
    pub execution: Option<&'static str>,
}

/// Bounds in the scenario KBs:
/// S1 starts 2025-07-16T14:00+02:00;
/// S2 ends 2025-07-20T10:00+02:00;
/// S3 runs 2025-07-20T10:30+02:00 to 22:30+02:00.
pub const STATE_CASES: [StateCase; 10] = [
    StateCase {
        id: "S11",
        scenario: Scenario::S1,
        time: "2025-07-16T14:00:00+02:00",
        execution: None,
    },
    StateCase {
        id: "S12",
        scenario: Scenario::S1,
        time: "2025-07-18T09:00:00+02:00",
        execution: Some("2025-07-16T14:00:00+02:00"),
    },
    StateCase {
        id: "S21",
        scenario: Scenario::S2,
        time: "2025-07-20T10:00:00+02:00",
        execution: None,
    },
    StateCase {
        id: "S22",
        scenario: Scenario::S2,
        time: "2025-07-19T18:00:00+02:00",
        execution: Some("2025-07-19T17:00:00+02:00"),
    },
    StateCase {
        id: "S23",
        scenario: Scenario::S2,
        time: "2025-07-20T10:00:01+02:00",
        execution: None,
    },
    StateCase {
        id: "S24",
        scenario: Scenario::S2,
        time: "2025-07-21T08:00:00+02:00",
        execution: Some("2025-07-20T10:00:00+02:00"),
    },
    StateCase {
        id: "S31",
        scenario: Scenario::S3,
        time: "2025-07-20T15:00:00+02:00",
        execution: None,
    },
    StateCase {
        id: "S32",
        scenario: Scenario::S3,
        time: "2025-07-20T15:00:00+02:00",
        execution: Some("2025-07-20T12:30:00+02:00"),
    },
    StateCase {
        id: "S33",
        scenario: Scenario::S3,
        time: HOSPITAL_EVALUATION_TIME,
        execution: None,
    },
    StateCase {
        id: "S34",
        scenario: Scenario::S3,
        time: HOSPITAL_EVALUATION_TIME,
        execution: Some("2025-07-20T12:30:00+02:00"),
    },
];

impl StateCase {
    pub fn kb_text(&self) -> String {
        let mut text = self.scenario.kb_text().to_owned();
        if let Some(exec) = self.execution {
            text.push_str(&format!(
                "\n<< {} >> gucon:executionTime \"{exec}\"^^xsd:dateTime .\n",
                self.scenario.action()
            ));
        }
        text
    }

    pub fn policy(&self) -> PolicyDocument {
        parse_rule_document(self.scenario.rule_text()).expect("fixture rule")
    }

    pub fn kb(&self) -> TemporalKB {
        let graph = parse_turtle_star(&self.kb_text()).expect("fixture KB");
        load_kb(&graph, Iri::new(HOSPITAL_KB_IRI)).expect("fixture KB")
    }

    pub fn evaluation_time(&self) -> DateTime {
        dt(self.time)
    }
}
