//! Finite event sequences under concatenation.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorError, TraceModel};

/// An opaque event symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(String);

impl Event {
    pub fn new(name: impl Into<String>) -> Self {
        Event(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Event {
    fn from(s: &str) -> Self {
        Event::new(s)
    }
}

/// A finite sequence of events. Serialises as a JSON array of names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventSeq(Vec<Event>);

impl EventSeq {
    pub fn empty() -> Self {
        EventSeq(Vec::new())
    }

    pub fn new(events: Vec<Event>) -> Self {
        EventSeq(events)
    }

    /// Builds a sequence from event names, e.g. `EventSeq::of(&["a", "b"])`.
    pub fn of(names: &[&str]) -> Self {
        EventSeq(names.iter().map(|&n| Event::new(n)).collect())
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &EventSeq) -> EventSeq {
        let mut items = Vec::with_capacity(self.len() + other.len());
        items.extend_from_slice(&self.0);
        items.extend_from_slice(&other.0);
        EventSeq(items)
    }

    pub fn is_prefix_of(&self, other: &EventSeq) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self − prefix`, or the empty sequence when `prefix` is not a prefix.
    pub fn subtract(&self, prefix: &EventSeq) -> EventSeq {
        if prefix.is_prefix_of(self) {
            EventSeq(self.0[prefix.len()..].to_vec())
        } else {
            EventSeq::empty()
        }
    }
}

impl fmt::Display for EventSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(">")
    }
}

impl FromIterator<Event> for EventSeq {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        EventSeq(iter.into_iter().collect())
    }
}

/// All sequences over `events` of length at most `max_len`, shortest first
/// and lexicographic (in the order of `events`) within a length.
pub fn bounded_sequences(events: &[Event], max_len: usize) -> Vec<EventSeq> {
    let mut out = vec![EventSeq::empty()];
    let mut layer = vec![EventSeq::empty()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * events.len());
        for s in &layer {
            for e in events {
                let mut items = s.0.clone();
                items.push(e.clone());
                next.push(EventSeq(items));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `(seq Event, ⌢, ⟨⟩)` over a declared event set.
#[derive(Debug, Clone)]
pub struct SeqModel {
    events: Vec<Event>,
    max_len: usize,
}

impl SeqModel {
    /// `max_len` bounds both the exhaustive enumeration and generated lengths.
    pub fn new(events: Vec<Event>, max_len: usize) -> Self {
        SeqModel { events, max_len }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// True when every event of `s` is declared.
    pub fn contains(&self, s: &EventSeq) -> bool {
        s.events().iter().all(|e| self.events.contains(e))
    }
}

impl TraceModel for SeqModel {
    type Trace = EventSeq;

    fn name(&self) -> String {
        "seq".into()
    }

    fn empty(&self) -> EventSeq {
        EventSeq::empty()
    }

    fn concat(&self, x: &EventSeq, y: &EventSeq) -> EventSeq {
        x.concat(y)
    }

    fn prefix(&self, x: &EventSeq, y: &EventSeq) -> bool {
        x.is_prefix_of(y)
    }

    fn subtract(&self, y: &EventSeq, x: &EventSeq) -> EventSeq {
        y.subtract(x)
    }

    fn enumerate(&self) -> Option<Vec<EventSeq>> {
        Some(bounded_sequences(&self.events, self.max_len))
    }

    fn generate(&self, rng: &mut ChaCha8Rng) -> Result<EventSeq, GeneratorError> {
        if self.events.is_empty() {
            return Err(GeneratorError("sequence model has no events".into()));
        }
        let len = rng.gen_range(0..=self.max_len);
        Ok((0..len)
            .map(|_| self.events[rng.gen_range(0..self.events.len())].clone())
            .collect())
    }

    fn shrink(&self, x: &EventSeq) -> Vec<EventSeq> {
        let mut out = Vec::new();
        if !x.is_empty() {
            out.push(EventSeq::empty());
        }
        for i in 0..x.len() {
            let mut items = x.0.clone();
            items.remove(i);
            if !out.contains(&EventSeq(items.clone())) {
                out.push(EventSeq(items));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_laws, Mode};

    fn s(names: &[&str]) -> EventSeq {
        EventSeq::of(names)
    }

    #[test]
    fn concatenation() {
        assert_eq!(s(&["a"]).concat(&s(&["b"])), s(&["a", "b"]));
    }

    #[test]
    fn prefix_examples() {
        assert!(s(&["a"]).is_prefix_of(&s(&["a", "b"])));
        assert!(s(&[]).is_prefix_of(&s(&["b", "a"])));
        assert!(!s(&["b"]).is_prefix_of(&s(&["a", "b"])));
    }

    /// Brute force: `⟨b⟩ ≤ ⟨a,b⟩` would need a witness `z` with
    /// `⟨b⟩ ⌢ z = ⟨a,b⟩`; no sequence up to length 3 works.
    #[test]
    fn no_prefix_witness_by_exhaustion() {
        let all = bounded_sequences(&[Event::new("a"), Event::new("b")], 3);
        let target = s(&["a", "b"]);
        assert!(!all.iter().any(|z| s(&["b"]).concat(z) == target));
        assert!(all.iter().any(|z| s(&["a"]).concat(z) == target));
    }

    #[test]
    fn subtraction() {
        assert_eq!(s(&["a", "b", "c"]).subtract(&s(&["a"])), s(&["b", "c"]));
        assert_eq!(s(&["a", "b"]).subtract(&s(&["a", "b"])), s(&[]));
        assert_eq!(s(&["a", "b"]).subtract(&s(&["b"])), s(&[]));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let all = bounded_sequences(&[Event::new("a"), Event::new("b")], 3);
        assert_eq!(all.len(), 15);
        assert_eq!(all[0], s(&[]));
        assert_eq!(all[1], s(&["a"]));
        assert_eq!(all[3], s(&["a", "a"]));
    }

    #[test]
    fn display_and_json() {
        let x = s(&["a", "b"]);
        assert_eq!(x.to_string(), "<a,b>");
        assert_eq!(serde_json::to_string(&x).unwrap(), r#"["a","b"]"#);
        let back: EventSeq = serde_json::from_str(r#"["a","b"]"#).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn exhaustive_laws_two_events_length_three() {
        let model = SeqModel::new(vec![Event::new("a"), Event::new("b")], 3);
        let reports = check_laws(&model, Mode::Exhaustive).unwrap();
        assert_eq!(reports.len(), 17);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }
}
