//! Configurable suites and their JSON reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{check_laws, LawReport, LawSuiteError, Mode};
use crate::dsl::{parse, DslError, Env};
use crate::merge::{parallel_suite, MergeAlphabet};
use crate::models::{Event, NonNegRat, Poly, RatModel, Segment, SeqModel, TimedModel, TimedTrace};
use crate::reactive::{micro_tier, quantale_suite, theory_suite, ReactiveAlphabet, TheoryError, TheoryReport};
use crate::relation::{Domain, RelError, TraceUniverse, Value};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Seq,
    Rat,
    Timed,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Seq => "seq",
            ModelKind::Rat => "rat",
            ModelKind::Timed => "timed",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = SuiteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seq" => Ok(ModelKind::Seq),
            "rat" => Ok(ModelKind::Rat),
            "timed" => Ok(ModelKind::Timed),
            _ => Err(SuiteError::Config(format!("unknown model `{s}` (expected seq, rat or timed)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Algebra,
    Reactive,
    Quantale,
    Parallel,
}

impl SuiteName {
    pub const ALL: [SuiteName; 4] = [SuiteName::Algebra, SuiteName::Reactive, SuiteName::Quantale, SuiteName::Parallel];

    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Algebra => "algebra",
            SuiteName::Reactive => "reactive",
            SuiteName::Quantale => "quantale",
            SuiteName::Parallel => "parallel",
        }
    }
}

/// The domain of a program variable in a config file: `"bool"`,
/// `{"enum": ["a", "b"]}` or `{"range": [0, 3]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarSpec {
    Bool,
    Enum(Vec<String>),
    Range(i64, i64),
}

impl VarSpec {
    pub fn domain(&self) -> Result<Domain, RelError> {
        match self {
            VarSpec::Bool => Ok(Domain::bool()),
            VarSpec::Enum(values) => Domain::enum_set(values.iter().map(|v| Value::Sym(v.clone())).collect()),
            VarSpec::Range(lo, hi) => Domain::int_range(*lo, *hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub model: ModelKind,
    #[serde(default = "default_events")]
    pub events: Vec<String>,
    /// The longest sequence for `seq`; the number of grid steps for `rat`.
    #[serde(default = "default_bound")]
    pub bound: usize,
    #[serde(default = "default_grid_step")]
    pub grid_step: NonNegRat,
    /// Seeds of the `timed` universe; empty means the built-in seeds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timed_seeds: Vec<TimedTrace>,
    #[serde(default = "default_vars")]
    pub vars: BTreeMap<String, VarSpec>,
    pub mode: Mode,
    #[serde(default = "default_suites")]
    pub suites: Vec<SuiteName>,
    /// Named formulas available to `eval`, `apply` and `refines`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub definitions: BTreeMap<String, String>,
}

fn default_events() -> Vec<String> {
    vec!["a".into(), "b".into()]
}

fn default_bound() -> usize {
    2
}

fn default_grid_step() -> NonNegRat {
    NonNegRat::ratio(1, 2)
}

fn default_vars() -> BTreeMap<String, VarSpec> {
    BTreeMap::from([("v".to_string(), VarSpec::Bool)])
}

fn default_suites() -> Vec<SuiteName> {
    SuiteName::ALL.to_vec()
}

/// `x = 1` for one time unit, then `x = t` for one time unit.
pub fn default_timed_seeds() -> Vec<TimedTrace> {
    let seg = |p: Poly| Segment::single(NonNegRat::integer(1), "x", p).expect("positive duration");
    vec![
        TimedTrace::from_segments(vec![seg(Poly::from_ints(&[1]))]).expect("well formed"),
        TimedTrace::from_segments(vec![seg(Poly::from_ints(&[0, 1]))]).expect("well formed"),
    ]
}

impl Default for SuiteConfig {
    /// Events `{a, b}`, sequences up to length 2, one boolean `v`, 200
    /// samples from seed 42.
    fn default() -> Self {
        SuiteConfig {
            model: ModelKind::Seq,
            events: default_events(),
            bound: default_bound(),
            grid_step: default_grid_step(),
            timed_seeds: Vec::new(),
            vars: default_vars(),
            mode: Mode::Randomized { count: 200, seed: 42 },
            suites: default_suites(),
            definitions: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    LawSuite(#[from] LawSuiteError),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

impl SuiteError {
    /// A stable identifier for JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            SuiteError::Config(_) => "config",
            SuiteError::Rel(_) => "relation",
            SuiteError::Theory(_) => "theory",
            SuiteError::LawSuite(_) => "law_suite",
            SuiteError::Dsl(DslError::Parse(_)) => "parse",
            SuiteError::Dsl(DslError::Scope(_)) => "scope",
            SuiteError::Dsl(DslError::Rel(RelError::DomainViolation { .. })) => "domain_violation",
            SuiteError::Dsl(_) => "eval",
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, SuiteError> {
        serde_json::from_str(text).map_err(|e| SuiteError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    fn events(&self) -> Vec<Event> {
        self.events.iter().map(Event::new).collect()
    }

    fn samples(&self, suite: SuiteName) -> Result<(u64, u64), SuiteError> {
        match self.mode {
            Mode::Randomized { count, seed } => Ok((count, seed)),
            Mode::Exhaustive => Err(SuiteError::Config(format!(
                "the {} suite is sampled; use randomized mode",
                suite.name()
            ))),
        }
    }

    pub fn trace_universe(&self) -> TraceUniverse {
        match self.model {
            ModelKind::Seq => TraceUniverse::Seq { events: self.events(), max_len: self.bound },
            ModelKind::Rat => TraceUniverse::Rat {
                step: self.grid_step.clone(),
                max: (0..self.bound).fold(NonNegRat::zero(), |acc, _| &acc + &self.grid_step),
            },
            ModelKind::Timed => TraceUniverse::Timed {
                seeds: if self.timed_seeds.is_empty() { default_timed_seeds() } else { self.timed_seeds.clone() },
                grid: self.grid_step.clone(),
            },
        }
    }

    pub fn traces(&self) -> Result<Arc<Domain>, SuiteError> {
        Ok(Arc::new(Domain::traces(self.trace_universe())?))
    }

    pub fn reactive_alphabet(&self) -> Result<ReactiveAlphabet, SuiteError> {
        let program = self
            .vars
            .iter()
            .map(|(name, spec)| Ok((name.clone(), Arc::new(spec.domain()?))))
            .collect::<Result<Vec<_>, RelError>>()?;
        Ok(ReactiveAlphabet::new(self.traces()?, &program)?)
    }

    /// An evaluation environment with every definition parsed.
    pub fn env(&self) -> Result<Env, SuiteError> {
        let mut env = Env::new(self.reactive_alphabet()?);
        for (name, text) in &self.definitions {
            if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
                return Err(SuiteError::Config(format!("definition names are capitalised: `{name}`")));
            }
            env.define(name.clone(), parse(text).map_err(DslError::from)?);
        }
        Ok(env)
    }

    pub fn run_suite(&self, suite: SuiteName) -> Result<Vec<CheckReport>, SuiteError> {
        let theory = |reports: Vec<TheoryReport>| reports.into_iter().map(|r| CheckReport::theory(suite, r)).collect();
        Ok(match suite {
            SuiteName::Algebra => {
                let reports = match self.model {
                    ModelKind::Seq => check_laws(&SeqModel::new(self.events(), self.bound), self.mode)?,
                    ModelKind::Rat => match self.mode {
                        Mode::Exhaustive => {
                            let TraceUniverse::Rat { step, max } = self.trace_universe() else { unreachable!() };
                            check_laws(&RatModel::with_grid(step, max), self.mode)?
                        }
                        Mode::Randomized { .. } => check_laws(&RatModel::new(), self.mode)?,
                    },
                    ModelKind::Timed => check_laws(&TimedModel::default(), self.mode)?,
                };
                reports.into_iter().map(CheckReport::law).collect()
            }
            SuiteName::Reactive => match self.mode {
                Mode::Exhaustive => theory(micro_tier(self.traces()?)?),
                Mode::Randomized { count, seed } => theory(theory_suite(&self.reactive_alphabet()?, count, seed)?),
            },
            SuiteName::Quantale => {
                let (count, seed) = self.samples(suite)?;
                theory(quantale_suite(&self.reactive_alphabet()?, count, seed)?)
            }
            SuiteName::Parallel => {
                let (count, seed) = self.samples(suite)?;
                let ma = MergeAlphabet::new(&self.reactive_alphabet()?)?;
                theory(parallel_suite(&ma, count, seed)?)
            }
        })
    }

    /// Runs `suites` in order and assembles the report document.
    pub fn run(&self, command: &str, suites: &[SuiteName]) -> Result<ReportDocument, SuiteError> {
        let mut reports = Vec::new();
        for &suite in suites {
            reports.extend(self.run_suite(suite)?);
        }
        Ok(ReportDocument::new(command, self, reports))
    }
}

/// One check in a report document, from any suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub suite: SuiteName,
    pub name: String,
    pub verified: bool,
    pub cases: u64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub precondition_failed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn law(r: LawReport) -> Self {
        CheckReport {
            suite: SuiteName::Algebra,
            name: r.law,
            verified: r.passed,
            cases: r.cases,
            precondition_failed: false,
            counterexample: r.counterexample.map(|c| serde_json::to_value(c).expect("serializable")),
            note: None,
        }
    }

    pub fn theory(suite: SuiteName, r: TheoryReport) -> Self {
        CheckReport {
            suite,
            name: r.theorem,
            verified: r.verified,
            cases: r.cases,
            precondition_failed: r.precondition_failed,
            counterexample: r.counterexample.map(|c| serde_json::to_value(c).expect("serializable")),
            note: r.note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub command: String,
    pub model: ModelKind,
    pub mode: Mode,
    pub reports: Vec<CheckReport>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(command: &str, config: &SuiteConfig, reports: Vec<CheckReport>) -> Self {
        let summary = Summary { total: reports.len(), passed: reports.iter().filter(|r| r.verified).count() };
        ReportDocument {
            schema: SCHEMA,
            command: command.to_string(),
            model: config.model,
            mode: config.mode,
            reports,
            summary,
        }
    }

    pub fn all_verified(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.reports.iter().map(|r| r.name.chars().count()).max().unwrap_or(0).max(5);
        writeln!(f, "{:<9} {:<width$} {:>7}  result", "suite", "check", "cases")?;
        for r in &self.reports {
            let verdict = match (r.verified, r.precondition_failed) {
                (true, _) => "ok",
                (false, true) => "precondition failed",
                (false, false) => "FAILED",
            };
            writeln!(f, "{:<9} {:<width$} {:>7}  {verdict}", r.suite.name(), r.name, r.cases)?;
            if let Some(cx) = &r.counterexample {
                writeln!(f, "          counterexample: {cx}")?;
            }
            if let Some(note) = &r.note {
                writeln!(f, "          note: {note}")?;
            }
        }
        write!(f, "{}/{} verified", self.summary.passed, self.summary.total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_requires_a_seed() {
        let e = SuiteConfig::from_json(r#"{"model":"seq","mode":{"randomized":{"count":10}}}"#).unwrap_err();
        assert!(e.to_string().contains("seed"), "{e}");
        let c = SuiteConfig::from_json(r#"{"model":"seq","mode":{"randomized":{"count":10,"seed":1}}}"#).unwrap();
        assert_eq!(c.vars, default_vars());
        assert_eq!(c.mode, Mode::Randomized { count: 10, seed: 1 });
    }

    #[test]
    fn var_specs() {
        let c = SuiteConfig::from_json(
            r#"{"model":"seq","mode":"exhaustive","vars":{"b":"bool","c":{"enum":["red","green"]},"n":{"range":[0,2]}}}"#,
        )
        .unwrap();
        assert_eq!(c.reactive_alphabet().unwrap().program().len(), 3);
        assert_eq!(SuiteConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn desk_universe() {
        assert_eq!(SuiteConfig::default().reactive_alphabet().unwrap().alphabet().size(), 784);
    }

    #[test]
    fn exhaustive_seq_lawsuite() {
        let c = SuiteConfig { mode: Mode::Exhaustive, bound: 2, ..SuiteConfig::default() };
        let doc = c.run("lawsuite", &[SuiteName::Algebra]).unwrap();
        assert_eq!(doc.summary, Summary { total: 17, passed: 17 });
        let json = doc.to_json();
        assert!(json.starts_with("{\n  \"schema\": 1,"), "{json}");
    }

    #[test]
    fn sampled_suites_reject_exhaustive_mode() {
        let c = SuiteConfig { mode: Mode::Exhaustive, ..SuiteConfig::default() };
        assert!(matches!(c.run_suite(SuiteName::Quantale), Err(SuiteError::Config(_))));
    }

    #[test]
    fn timed_universe_builds() {
        let c = SuiteConfig { model: ModelKind::Timed, ..SuiteConfig::default() };
        let traces = c.traces().unwrap();
        assert!(traces.len() > 2);
        assert!(c.reactive_alphabet().is_ok());
    }
}
