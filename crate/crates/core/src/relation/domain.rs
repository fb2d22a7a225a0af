//! Finite variable domains.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;

use super::value::{TraceValue, Value};
use super::RelError;
use crate::models::rat::grid;
use crate::models::seq::bounded_sequences;
use crate::models::{Event, NonNegRat, TimedTrace};

/// Default cap on the size of a generated timed-trace universe.
pub const TIMED_UNIVERSE_LIMIT: usize = 256;

/// How a bounded trace universe is generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceUniverse {
    /// Every sequence over `events` of length at most `max_len`.
    Seq { events: Vec<Event>, max_len: usize },
    /// The grid `{0, step, 2·step, …}` up to `max`.
    Rat { step: NonNegRat, max: NonNegRat },
    /// The seeds, their truncations at multiples of `grid`, and everything
    /// reachable from those by subtraction.
    Timed { seeds: Vec<TimedTrace>, grid: NonNegRat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainKind {
    Bool,
    FiniteEvents(Vec<Event>),
    BoundedTraces(TraceUniverse),
    EnumSet,
}

/// Precomputed trace operators over a trace domain, by value index.
#[derive(Debug, Clone)]
pub struct TraceTable {
    n: usize,
    empty: u32,
    concat: Vec<Option<u32>>,
    subtract: Vec<u32>,
    prefix: FixedBitSet,
}

impl TraceTable {
    fn build(values: &[Value], index: &HashMap<Value, u32>) -> Result<Self, RelError> {
        let n = values.len();
        let traces: Vec<&TraceValue> = values
            .iter()
            .map(|v| v.as_trace().expect("trace domain holds traces"))
            .collect();
        let empty = traces
            .iter()
            .position(|t| t.is_empty())
            .ok_or_else(|| RelError::NotClosed("the empty trace is missing".into()))? as u32;
        let mut concat = Vec::with_capacity(n * n);
        let mut subtract = Vec::with_capacity(n * n);
        let mut prefix = FixedBitSet::with_capacity(n * n);
        for (i, x) in traces.iter().enumerate() {
            for (j, y) in traces.iter().enumerate() {
                // Rows are indexed by the left operand.
                let xy = x.concat(y).ok().and_then(|t| index.get(&Value::Trace(t)).copied());
                concat.push(xy);
                let diff = Value::Trace(x.subtract(y)?);
                let d = *index.get(&diff).ok_or_else(|| {
                    RelError::NotClosed(format!("{x} − {y} = {diff} is outside the universe"))
                })?;
                subtract.push(d);
                if x.is_prefix_of(y)? {
                    prefix.insert(i * n + j);
                }
            }
        }
        Ok(TraceTable { n, empty, concat, subtract, prefix })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Index of ε.
    pub fn empty(&self) -> u32 {
        self.empty
    }

    /// Index of `x ⌢ y`, or `None` when it leaves the universe.
    pub fn concat(&self, x: u32, y: u32) -> Option<u32> {
        self.concat[x as usize * self.n + y as usize]
    }

    /// Index of `y − x`.
    pub fn subtract(&self, y: u32, x: u32) -> u32 {
        self.subtract[y as usize * self.n + x as usize]
    }

    /// `x ≤ y`.
    pub fn prefix(&self, x: u32, y: u32) -> bool {
        self.prefix.contains(x as usize * self.n + y as usize)
    }
}

/// A finite, duplicate-free list of values.
///
/// Trace domains additionally carry a [`TraceTable`], and are checked to be
/// closed under subtraction when built.
#[derive(Debug, Clone)]
pub struct Domain {
    kind: DomainKind,
    values: Vec<Value>,
    index: HashMap<Value, u32>,
    traces: Option<TraceTable>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for Domain {}

impl Domain {
    fn build(kind: DomainKind, values: Vec<Value>) -> Result<Self, RelError> {
        if values.is_empty() {
            return Err(RelError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i as u32).is_some() {
                return Err(RelError::DuplicateValue(v.to_string()));
            }
        }
        let traces = match kind {
            DomainKind::BoundedTraces(_) => Some(TraceTable::build(&values, &index)?),
            _ => None,
        };
        Ok(Domain { kind, values, index, traces })
    }

    pub fn bool() -> Self {
        Domain::build(DomainKind::Bool, vec![Value::Bool(false), Value::Bool(true)])
            .expect("two distinct values")
    }

    /// Event names as symbols.
    pub fn events(events: &[Event]) -> Result<Self, RelError> {
        let values = events.iter().map(|e| Value::Sym(e.name().to_string())).collect();
        Domain::build(DomainKind::FiniteEvents(events.to_vec()), values)
    }

    pub fn enum_set(values: Vec<Value>) -> Result<Self, RelError> {
        Domain::build(DomainKind::EnumSet, values)
    }

    /// Integers `lo..=hi`.
    pub fn int_range(lo: i64, hi: i64) -> Result<Self, RelError> {
        Domain::enum_set((lo..=hi).map(Value::Int).collect())
    }

    pub fn traces(universe: TraceUniverse) -> Result<Self, RelError> {
        let values: Vec<Value> = match &universe {
            TraceUniverse::Seq { events, max_len } => bounded_sequences(events, *max_len)
                .into_iter()
                .map(Value::from)
                .collect(),
            TraceUniverse::Rat { step, max } => {
                if step.is_zero() {
                    return Err(RelError::NotClosed("grid step must be positive".into()));
                }
                grid(step, max).into_iter().map(Value::from).collect()
            }
            TraceUniverse::Timed { seeds, grid } => timed_universe(seeds, grid, TIMED_UNIVERSE_LIMIT)?
                .into_iter()
                .map(Value::from)
                .collect(),
        };
        Domain::build(DomainKind::BoundedTraces(universe), values)
    }

    pub fn seq_traces(events: &[Event], max_len: usize) -> Result<Self, RelError> {
        Domain::traces(TraceUniverse::Seq { events: events.to_vec(), max_len })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn value(&self, i: u32) -> &Value {
        &self.values[i as usize]
    }

    pub fn index_of(&self, v: &Value) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index.contains_key(v)
    }

    pub fn trace_table(&self) -> Option<&TraceTable> {
        self.traces.as_ref()
    }

    pub fn is_bool(&self) -> bool {
        matches!(self.kind, DomainKind::Bool)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::Bool => f.write_str("bool"),
            DomainKind::FiniteEvents(_) => write!(f, "events({})", self.len()),
            DomainKind::BoundedTraces(TraceUniverse::Seq { max_len, .. }) => {
                write!(f, "seq traces (length ≤ {max_len}, {} values)", self.len())
            }
            DomainKind::BoundedTraces(TraceUniverse::Rat { step, max }) => {
                write!(f, "rat traces ({step} steps up to {max})")
            }
            DomainKind::BoundedTraces(TraceUniverse::Timed { .. }) => {
                write!(f, "timed traces ({} values)", self.len())
            }
            DomainKind::EnumSet => write!(f, "enum({})", self.len()),
        }
    }
}

/// Builds a timed-trace universe that is closed under subtraction and
/// contains every truncation of its members at multiples of `grid`.
///
/// Arbitrary timed traces have uncountably many prefixes, so closure under
/// all prefixes is impossible; the grid gives a finite substitute that still
/// contains every prefix reachable as `tr ⌢ t` inside the universe when seed
/// end times are grid multiples.
pub fn timed_universe(
    seeds: &[TimedTrace],
    grid: &NonNegRat,
    limit: usize,
) -> Result<Vec<TimedTrace>, RelError> {
    if grid.is_zero() {
        return Err(RelError::NotClosed("timed universe grid must be positive".into()));
    }
    let too_large = |size| RelError::UniverseTooLarge { size, limit };
    let mut set: BTreeSet<TimedTrace> = BTreeSet::from([TimedTrace::empty()]);
    let mut frontier: Vec<TimedTrace> = seeds.to_vec();
    while let Some(t) = frontier.pop() {
        if set.contains(&t) {
            continue;
        }
        set.insert(t.clone());
        if set.len() > limit {
            return Err(too_large(set.len()));
        }
        let mut cut = grid.clone();
        while let Some(p) = t.truncate(&cut) {
            frontier.push(p);
            cut = &cut + grid;
        }
        for other in set.iter() {
            frontier.push(t.subtract(other));
            frontier.push(other.subtract(&t));
        }
    }
    let mut out: Vec<TimedTrace> = set.into_iter().collect();
    out.sort_by(|a, b| a.end().cmp(&b.end()).then_with(|| a.cmp(b)));
    Ok(out)
}
