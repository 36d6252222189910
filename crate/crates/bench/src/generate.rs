//! EMR-shaped synthetic fact graphs.
//!
//! Seven entity classes hang off admissions. Every class has a type
//! triple, at most one link to its parent and a set of attributes. Lab
//! results record a primary and a repeat measurement, so each of their
//! attributes carries two values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gucon_core::vocab::{rdf, EX, HC};
use gucon_core::{DateTime, DayTimeDuration, Graph, Iri, Literal, Term, Triple};

use crate::config::GenerationConfig;
use crate::error::BenchError;

/// Smallest accepted triple target.
pub const MIN_TRIPLE_TARGET: u64 = 1000;

/// Relative tolerance on the generated fact count.
pub const TARGET_TOLERANCE: f64 = 0.02;

/// Prescriptions, vital signs and procedures per admission.
pub const ORDERS_PER_ADMISSION: f64 = 3.5;

#[derive(Debug, Clone, Copy)]
pub enum ValueKind {
    Choice(&'static [&'static str]),
    /// A decimal with one fractional digit in `[lo, hi)`.
    Number(f64, f64),
    /// An instant this many days around the time origin.
    Days(i64, i64),
    /// Hours after the entity's previous instant attribute.
    HoursAfter(i64, i64),
}

#[derive(Debug, Clone, Copy)]
pub struct Attribute {
    pub name: &'static str,
    pub kind: ValueKind,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct EntityClass {
    pub class: &'static str,
    pub slug: &'static str,
    /// Link predicate and the index of the parent class.
    pub link: Option<(&'static str, usize)>,
    pub attributes: &'static [Attribute],
}

impl EntityClass {
    pub fn class_iri(&self) -> Iri {
        Iri::new(format!("{HC}{}", self.class))
    }

    pub fn triples_per_entity(&self) -> u64 {
        let attrs: usize = self.attributes.iter().map(|a| a.multiplicity).sum();
        (1 + usize::from(self.link.is_some()) + attrs) as u64
    }

    pub fn entity(&self, index: u64) -> Term {
        Term::iri(&format!("{EX}{}-{index}", self.slug))
    }
}

const fn one(name: &'static str, kind: ValueKind) -> Attribute {
    Attribute {
        name,
        kind,
        multiplicity: 1,
    }
}

const fn two(name: &'static str, kind: ValueKind) -> Attribute {
    Attribute {
        name,
        kind,
        multiplicity: 2,
    }
}

pub const PATIENT: usize = 0;
pub const ADMISSION: usize = 1;
pub const REPORT: usize = 2;
pub const LAB: usize = 3;
pub const PRESCRIPTION: usize = 4;
pub const VITAL: usize = 5;
pub const PROCEDURE: usize = 6;

use ValueKind::{Choice, Days, HoursAfter, Number};

pub const SCHEMA: [EntityClass; 7] = [
    EntityClass {
        class: "Patient",
        slug: "patient",
        link: None,
        attributes: &[
            one("hasGender", Choice(&["Male", "Female"])),
            one("hasDateOfBirth", Days(-32_000, -6_600)),
            one("hasRace", Choice(&["White", "African American", "Asian", "Unknown"])),
            one(
                "hasMaritalStatus",
                Choice(&["Married", "Single", "Divorced", "Separated", "Unknown"]),
            ),
            one("hasLanguage", Choice(&["English", "Spanish", "Icelandic", "Unknown"])),
            one("hasPovertyPercentage", Number(0.0, 100.0)),
        ],
    },
    EntityClass {
        class: "Admission",
        slug: "admission",
        link: Some(("hasPatient", PATIENT)),
        attributes: &[
            one("hasActualAdmissionStartDate", Days(-365, 30)),
            one("hasActualAdmissionEndDate", HoursAfter(12, 14 * 24)),
            one("hasAdmissionType", Choice(&["Emergency", "Elective", "Urgent"])),
        ],
    },
    EntityClass {
        class: "DiagnosisReport",
        slug: "report",
        link: Some(("hasAdmission", ADMISSION)),
        attributes: &[
            one(
                "hasPrimaryDiagnosisCode",
                Choice(&["E11.9", "I10", "J45.909", "M54.5", "N39.0", "K21.9", "F32.9"]),
            ),
            one(
                "hasPrimaryDiagnosisDescription",
                Choice(&[
                    "Type 2 diabetes mellitus",
                    "Essential hypertension",
                    "Asthma",
                    "Low back pain",
                    "Urinary tract infection",
                    "Gastro-esophageal reflux",
                    "Major depressive disorder",
                ]),
            ),
            one("hasReportDate", Days(-365, 30)),
        ],
    },
    EntityClass {
        class: "LabResult",
        slug: "lab",
        link: Some(("hasAdmission", ADMISSION)),
        attributes: &[
            two(
                "hasLabName",
                Choice(&[
                    "CBC: WBC",
                    "CBC: RBC",
                    "CBC: HEMOGLOBIN",
                    "METABOLIC: GLUCOSE",
                    "METABOLIC: SODIUM",
                    "URINALYSIS: PH",
                ]),
            ),
            two("hasLabValue", Number(0.0, 300.0)),
            two(
                "hasLabUnits",
                Choice(&["mg/dL", "k/cumm", "m/cumm", "gm/dl", "mmol/L", "%"]),
            ),
            two("hasLabDateTime", Days(-365, 30)),
            two("hasReferenceRange", Choice(&["normal", "borderline", "out of range"])),
            two("hasSpecimenType", Choice(&["Blood", "Serum", "Plasma", "Urine"])),
            two("hasLabFlag", Choice(&["N", "H", "L", "C"])),
        ],
    },
    EntityClass {
        class: "Prescription",
        slug: "prescription",
        link: Some(("hasAdmission", ADMISSION)),
        attributes: &[
            one(
                "hasDrugName",
                Choice(&[
                    "Metformin",
                    "Lisinopril",
                    "Albuterol",
                    "Ibuprofen",
                    "Omeprazole",
                    "Sertraline",
                ]),
            ),
            one("hasDosage", Choice(&["5 mg", "10 mg", "20 mg", "500 mg"])),
            one("hasRoute", Choice(&["oral", "intravenous", "inhaled", "topical"])),
            one("hasFrequency", Choice(&["daily", "twice daily", "as needed"])),
            one("hasPrescriptionDate", Days(-365, 30)),
        ],
    },
    EntityClass {
        class: "VitalSign",
        slug: "vital",
        link: Some(("hasAdmission", ADMISSION)),
        attributes: &[
            one(
                "hasVitalType",
                Choice(&["heart rate", "systolic pressure", "temperature", "respiratory rate"]),
            ),
            one("hasVitalValue", Number(10.0, 200.0)),
            one("hasMeasurementTime", Days(-365, 30)),
        ],
    },
    EntityClass {
        class: "Procedure",
        slug: "procedure",
        link: Some(("hasAdmission", ADMISSION)),
        attributes: &[
            one(
                "hasProcedureCode",
                Choice(&["0DJ08ZZ", "5A1955Z", "3E0234Z", "B2111ZZ"]),
            ),
            one("hasProcedureDate", Days(-365, 30)),
        ],
    },
];

/// How many entities of each class a config yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntityCounts(pub [u64; 7]);

impl EntityCounts {
    pub fn get(&self, class: usize) -> u64 {
        self.0[class]
    }

    /// Fact triples the counts produce.
    pub fn triples(&self) -> u64 {
        SCHEMA.iter().zip(self.0).map(|(c, n)| c.triples_per_entity() * n).sum()
    }
}

fn round(x: f64) -> u64 {
    x.round().max(0.0) as u64
}

/// Scales the entity counts so the fact count lands on the target. Lab
/// results take up the slack.
pub fn plan_counts(config: &GenerationConfig) -> Result<EntityCounts, BenchError> {
    config.validate()?;
    let target = config.triple_target;
    let unreachable = |reason: String| BenchError::Unreachable { target, reason };
    if target < MIN_TRIPLE_TARGET {
        return Err(unreachable(format!("the minimum is {MIN_TRIPLE_TARGET}")));
    }
    let tpe = |c: usize| SCHEMA[c].triples_per_entity() as f64;
    let apm = config.admissions_per_patient;
    let per_admission = tpe(ADMISSION)
        + tpe(REPORT)
        + ORDERS_PER_ADMISSION * (tpe(PRESCRIPTION) + tpe(VITAL) + tpe(PROCEDURE))
        + config.lab_tests_per_admission * tpe(LAB)
        + tpe(PATIENT) / apm;
    let (patients, admissions) = match config.patient_count {
        Some(p) => (p, round(p as f64 * apm).max(1)),
        None => {
            let a = round(target as f64 / per_admission).max(1);
            (round(a as f64 / apm).max(1), a)
        }
    };
    let orders = round(admissions as f64 * ORDERS_PER_ADMISSION).max(1);
    let mut counts = EntityCounts([patients, admissions, admissions, 0, orders, orders, orders]);
    let fixed = counts.triples();
    let per_lab = SCHEMA[LAB].triples_per_entity();
    if fixed + per_lab > target {
        return Err(unreachable(format!(
            "{patients} patients with {admissions} admissions already need {} triples",
            fixed + per_lab
        )));
    }
    counts.0[LAB] = round((target - fixed) as f64 / per_lab as f64).max(1);
    let total = counts.triples();
    if (total as f64 - target as f64).abs() > TARGET_TOLERANCE * target as f64 {
        return Err(unreachable(format!("closest reachable count is {total}")));
    }
    Ok(counts)
}

/// The values of one attribute. Slot k of a multi-valued attribute is
/// derived from slot 0 so the two never coincide.
fn values(
    rng: &mut impl Rng,
    attribute: &Attribute,
    origin: DateTime,
    previous: &mut Option<DateTime>,
) -> Vec<Literal> {
    let slots = 0..attribute.multiplicity;
    match attribute.kind {
        Choice(options) => {
            let first = rng.random_range(0..options.len());
            slots
                .map(|k| Literal::string(options[(first + k) % options.len()]))
                .collect()
        }
        Number(lo, hi) => {
            let tenths = (rng.random_range(lo..hi) * 10.0).round() as i64;
            slots
                .map(|k| Literal::decimal((tenths + 5 * k as i64) as f64 / 10.0))
                .collect()
        }
        Days(lo, hi) => {
            let minutes = rng.random_range(lo * 1440..hi * 1440);
            let t = origin
                .checked_add(DayTimeDuration::from_millis(minutes * 60_000))
                .expect("generated instant in range");
            *previous = Some(t);
            slots
                .map(|k| {
                    let repeat = DayTimeDuration::from_millis(k as i64 * 15 * 60_000);
                    Literal::datetime(t.checked_add(repeat).expect("generated instant in range"))
                })
                .collect()
        }
        HoursAfter(lo, hi) => {
            let base = previous.unwrap_or(origin);
            let t = base
                .checked_add(DayTimeDuration::from_hours(rng.random_range(lo..hi)))
                .expect("generated instant in range");
            slots
                .map(|k| Literal::datetime(t.checked_add(DayTimeDuration::from_hours(k as i64)).expect("in range")))
                .collect()
        }
    }
}

/// The fact graph for `config`. Same config, same graph.
pub fn generate_dataset(config: &GenerationConfig) -> Result<Graph, BenchError> {
    let counts = plan_counts(config)?;
    let origin = config.origin()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let type_predicate = Iri::new(rdf::TYPE);
    let mut graph = Graph::new();
    for (index, class) in SCHEMA.iter().enumerate() {
        let class_term = Term::Iri(class.class_iri());
        let link = class
            .link
            .map(|(name, parent)| (Iri::new(format!("{HC}{name}")), parent));
        let attributes: Vec<(Iri, &Attribute)> = class
            .attributes
            .iter()
            .map(|a| (Iri::new(format!("{HC}{}", a.name)), a))
            .collect();
        let n = counts.get(index);
        for i in 0..n {
            let subject = class.entity(i);
            graph.insert(Triple::new(subject.clone(), type_predicate.clone(), class_term.clone()));
            if let Some((predicate, parent)) = &link {
                let parents = counts.get(*parent);
                // The first entities cover every parent once, in order.
                let p = if n >= parents && i < parents {
                    i
                } else {
                    rng.random_range(0..parents)
                };
                graph.insert(Triple::new(
                    subject.clone(),
                    predicate.clone(),
                    SCHEMA[*parent].entity(p),
                ));
            }
            let mut previous = None;
            for (predicate, attribute) in &attributes {
                for v in values(&mut rng, attribute, origin, &mut previous) {
                    graph.insert(Triple::new(subject.clone(), predicate.clone(), v.into()));
                }
            }
        }
    }
    debug_assert_eq!(graph.len() as u64, counts.triples());
    Ok(graph)
}

/// Every predicate name the schema uses, link predicates included.
pub fn schema_predicates() -> Vec<&'static str> {
    let mut out: Vec<&str> = SCHEMA
        .iter()
        .flat_map(|c| {
            c.link
                .map(|l| l.0)
                .into_iter()
                .chain(c.attributes.iter().map(|a| a.name))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
