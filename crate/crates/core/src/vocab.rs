//! Namespaces and well-known IRIs.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DCAT: &str = "http://www.w3.org/ns/dcat#";
pub const GUCON: &str = "https://w3id.org/gucon#";
pub const GC: &str = "https://w3id.org/gucon/compliance#";
pub const UCP: &str = "https://w3id.org/ucp#";
pub const HC: &str = "https://w3id.org/hic#";
pub const EXP: &str = "http://example.org/gucon/";
pub const EX: &str = "http://example.org/";

pub mod rdf {
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
}

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const INT: &str = "http://www.w3.org/2001/XMLSchema#int";
    pub const LONG: &str = "http://www.w3.org/2001/XMLSchema#long";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
    pub const DURATION: &str = "http://www.w3.org/2001/XMLSchema#duration";
    pub const DAY_TIME_DURATION: &str = "http://www.w3.org/2001/XMLSchema#dayTimeDuration";
}

pub mod gucon {
    pub const START_TIME: &str = "https://w3id.org/gucon#startTime";
    pub const DEADLINE: &str = "https://w3id.org/gucon#deadline";
    pub const EXECUTION_TIME: &str = "https://w3id.org/gucon#executionTime";

    pub const EVENT: &str = "https://w3id.org/gucon#Event";
    pub const EXTENDED_ACTION: &str = "https://w3id.org/gucon#ExtendedAction";
    pub const HAS_EXTENDED_ACTION: &str = "https://w3id.org/gucon#hasExtendedAction";
    pub const IS_DERIVED_FROM: &str = "https://w3id.org/gucon#isDerivedFrom";
    pub const HAS_OBLIGATION_STATE: &str = "https://w3id.org/gucon#hasObligationState";
    pub const HAS_ENTITY: &str = "https://w3id.org/gucon#hasEntity";
    pub const HAS_ACTION: &str = "https://w3id.org/gucon#hasAction";
    pub const HAS_RESOURCE: &str = "https://w3id.org/gucon#hasResource";
    pub const HAS_START_TIME: &str = "https://w3id.org/gucon#hasStartTime";
    pub const HAS_DEADLINE: &str = "https://w3id.org/gucon#hasDeadline";
    pub const HAS_EXECUTION_TIME: &str = "https://w3id.org/gucon#hasExecutionTime";
    pub const HAS_EVALUATION_TIME: &str = "https://w3id.org/gucon#hasEvaluationTime";
    pub const HAS_REPORT_TIME: &str = "https://w3id.org/gucon#hasReportTime";
    pub const IS_GENERATED_FOR: &str = "https://w3id.org/gucon#isGeneratedFor";
    pub const IS_GENERATED_FROM: &str = "https://w3id.org/gucon#isGeneratedFrom";
    pub const INCLUDES: &str = "https://w3id.org/gucon#includes";
    pub const HAS_COMPLIANCE_STATUS: &str = "https://w3id.org/gucon#hasComplianceStatus";

    pub const ACTIVE: &str = "https://w3id.org/gucon#ACTIVE";
    pub const FULFILLED: &str = "https://w3id.org/gucon#FULFILLED";
    pub const VIOLATED: &str = "https://w3id.org/gucon#VIOLATED";
    pub const EXPIRED: &str = "https://w3id.org/gucon#EXPIRED";
    pub const NOT_SATISFIED: &str = "https://w3id.org/gucon#NOT_SATISFIED";
    pub const COMPLIANT: &str = "https://w3id.org/gucon#COMPLIANT";
    pub const NON_COMPLIANT: &str = "https://w3id.org/gucon#NON_COMPLIANT";
}

pub mod gc {
    pub const REPORT: &str = "https://w3id.org/gucon/compliance#Report";
    pub const KNOWLEDGE_BASE: &str = "https://w3id.org/gucon/compliance#KnowledgeBase";
    pub const MAPPED_OBLIGATION_RULE: &str = "https://w3id.org/gucon/compliance#MappedObligationRule";
}

pub mod ucp {
    pub const POLICY: &str = "https://w3id.org/ucp#Policy";
    pub const OBLIGATION_RULE: &str = "https://w3id.org/ucp#ObligationRule";
    pub const OBLIGATION: &str = "https://w3id.org/ucp#Obligation";
    pub const HAS_CONDITION_PATTERN: &str = "https://w3id.org/ucp#hasConditionPattern";
    pub const HAS_ACTION_PATTERN: &str = "https://w3id.org/ucp#hasActionPattern";
    pub const HAS_DEONTIC_OPERATOR: &str = "https://w3id.org/ucp#hasDeonticOperator";
    pub const IS_PART_OF_POLICY: &str = "https://w3id.org/ucp#isPartOfPolicy";
}

pub mod dcat {
    pub const CREATOR: &str = "http://www.w3.org/ns/dcat#creator";
    pub const DESCRIPTION: &str = "http://www.w3.org/ns/dcat#description";
    pub const MODIFIED: &str = "http://www.w3.org/ns/dcat#modified";
}
