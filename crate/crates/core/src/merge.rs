//! Parallel-by-merge.
//!
//! ```text
//! P ∥_M Q = (⟦P⟧₀ ∧ ⟦Q⟧₁ ∧ v' = v) ; M
//! ```
//!
//! `⟦P⟧ₙ` moves every after-variable `x'` of `P` to an indexed copy `n.x`.
//! The merge predicate `M` reads the pre-state (`tr`, `wait`, `v`), both
//! indexed results, and produces the final after-state.

use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::models::{Event, EventSeq};
use crate::reactive::{
    compare, is_healthy, r, r3, Healthiness, ReactiveAlphabet, TheoryCounterexample, TheoryError,
    TheoryReport,
};
use crate::relation::{
    Alphabet, DomainKind, Predicate, RelError, Role, TraceUniverse, TraceValue, Value, VarId,
};
use crate::seed;

/// The alphabet of merge predicates over a reactive alphabet.
///
/// Unprimed variables are the reactive before-variables followed by the
/// copies `0.x` and then `1.x` of every after-variable; primed variables are
/// the reactive after-variables. A merge binding's index is therefore
/// `((s·n + p)·n + q)·n + t` for reactive states `s, p, q, t` with `n`
/// states each.
#[derive(Debug, Clone)]
pub struct MergeAlphabet {
    reactive: ReactiveAlphabet,
    alphabet: Arc<Alphabet>,
    copies: [Vec<VarId>; 2],
    trace_order: Predicate,
    waiting: Predicate,
    skip: Predicate,
}

impl MergeAlphabet {
    pub fn new(reactive: &ReactiveAlphabet) -> Result<Self, RelError> {
        let ra = reactive.alphabet();
        let before: Vec<VarId> = ra
            .ids()
            .filter(|&id| ra.var(id).role() == Role::Before)
            .collect();
        let mut b = Alphabet::builder();
        for &id in &before {
            b = b.var(ra.var(id).name(), ra.domain(id).clone());
        }
        for n in 0..2 {
            for &id in &before {
                b = b.input(&format!("{n}.{}", ra.var(id).name()), ra.domain(id).clone());
            }
        }
        let alphabet = b.build()?;
        let states = ra.before_size();
        debug_assert_eq!(alphabet.before_size(), states * states * states);
        let copies = [0, 1].map(|n| {
            before
                .iter()
                .map(|&id| alphabet.lookup(&format!("{n}.{}", ra.var(id).name())).expect("declared above"))
                .collect::<Vec<_>>()
        });
        let tr = alphabet.lookup("tr")?;
        let tr_after = alphabet.lookup("tr'")?;
        let wait = alphabet.lookup("wait")?;
        let table = reactive.table().clone();
        let trace_order = Predicate::cylinder(&alphabet, &[tr, tr_after], |d| table.prefix(d[0], d[1]));
        let waiting = Predicate::cylinder(&alphabet, &[wait], |d| d[0] == 1);
        Ok(MergeAlphabet {
            reactive: reactive.clone(),
            skip: Predicate::skip(&alphabet),
            alphabet,
            copies,
            trace_order,
            waiting,
        })
    }

    pub fn reactive(&self) -> &ReactiveAlphabet {
        &self.reactive
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The copies `n.x`, in the order of the reactive variables.
    pub fn copies(&self, n: usize) -> &[VarId] {
        &self.copies[n]
    }

    /// `II` over the merge alphabet: primed variables equal their unprimed
    /// twins, indexed copies are unconstrained.
    pub fn skip(&self) -> &Predicate {
        &self.skip
    }

    fn states(&self) -> usize {
        self.reactive.alphabet().before_size()
    }

    pub fn check(&self, m: &Predicate) -> Result<(), RelError> {
        if Arc::ptr_eq(m.alphabet(), &self.alphabet) || **m.alphabet() == *self.alphabet {
            Ok(())
        } else {
            Err(RelError::AlphabetMismatch)
        }
    }

    fn var(&self, name: &str) -> VarId {
        self.alphabet.lookup(name).expect("merge alphabets declare the reactive variables")
    }
}

/// `⟦P⟧ₙ`: `P` with its after-variables moved to the copies `n.x`. The
/// primed variables and the other copies are unconstrained.
pub fn sep(ma: &MergeAlphabet, p: &Predicate, n: usize) -> Result<Predicate, RelError> {
    ma.reactive.check(p)?;
    assert!(n < 2, "merge indices are 0 and 1");
    let k = ma.states();
    let mut rows = FixedBitSet::with_capacity(ma.alphabet.size());
    for row in 0..ma.alphabet.size() {
        let rest = row / k;
        let (c1, rest) = (rest % k, rest / k);
        let (c0, s) = (rest % k, rest / k);
        let copy = if n == 0 { c0 } else { c1 };
        if p.contains(s * k + copy) {
            rows.insert(row);
        }
    }
    Ok(Predicate::from_rows(&ma.alphabet, rows))
}

/// `P ∥_M Q`.
pub fn par_by_merge(
    ma: &MergeAlphabet,
    p: &Predicate,
    m: &Predicate,
    q: &Predicate,
) -> Result<Predicate, RelError> {
    ma.reactive.check(p)?;
    ma.reactive.check(q)?;
    ma.check(m)?;
    let k = ma.states();
    let mut rows = FixedBitSet::with_capacity(k * k);
    for s in 0..k {
        let ps: Vec<usize> = (0..k).filter(|&x| p.contains(s * k + x)).collect();
        if ps.is_empty() {
            continue;
        }
        let qs: Vec<usize> = (0..k).filter(|&x| q.contains(s * k + x)).collect();
        for &c0 in &ps {
            for &c1 in &qs {
                let base = ((s * k + c0) * k + c1) * k;
                for t in 0..k {
                    if m.contains(base + t) {
                        rows.insert(s * k + t);
                    }
                }
            }
        }
    }
    Ok(Predicate::from_rows(ma.reactive.alphabet(), rows))
}

/// `M` with the roles of `0.x` and `1.x` exchanged.
pub fn swap_indices(ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
    ma.check(m)?;
    let k = ma.states();
    let mut rows = FixedBitSet::with_capacity(ma.alphabet.size());
    for row in m.row_indices() {
        let t = row % k;
        let rest = row / k;
        let (c1, rest) = (rest % k, rest / k);
        let (c0, s) = (rest % k, rest / k);
        rows.insert(((s * k + c1) * k + c0) * k + t);
    }
    Ok(Predicate::from_rows(&ma.alphabet, rows))
}

/// R1 on merge predicates: `M ∧ tr ≤ tr'`.
pub fn r1_m(ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
    ma.check(m)?;
    m.and(&ma.trace_order)
}

/// R3 on merge predicates: `II ◁ wait ▷ M`, where `II` leaves the indexed
/// copies unconstrained.
pub fn r3_m(ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
    ma.check(m)?;
    Predicate::cond(&ma.skip, &ma.waiting, m)
}

/// `M[ε, tr' − tr, 0.tr − tr, 1.tr − tr / tr, tr', 0.tr, 1.tr] ◁ tr ≤ tr' ▷ M`.
pub fn r2m(ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
    ma.check(m)?;
    let table = ma.reactive.table().clone();
    let tr = ma.var("tr").index();
    let tr_after = ma.var("tr'").index();
    let c0 = ma.copies[0][0].index();
    let c1 = ma.copies[1][0].index();
    Ok(m.remap(|d, target| {
        if table.prefix(d[tr], d[tr_after]) {
            target[tr] = table.empty();
            target[tr_after] = table.subtract(d[tr_after], d[tr]);
            target[c0] = table.subtract(d[c0], d[tr]);
            target[c1] = table.subtract(d[c1], d[tr]);
        }
    }))
}

/// `Rm = R1 ∘ R2m ∘ R3`.
pub fn rm(ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
    r1_m(ma, &r2m(ma, &r3_m(ma, m)?)?)
}

/// Healthiness conditions on merge predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MergeHealthiness {
    R1,
    R2m,
    R3,
    Rm,
}

impl MergeHealthiness {
    pub fn apply(self, ma: &MergeAlphabet, m: &Predicate) -> Result<Predicate, RelError> {
        match self {
            MergeHealthiness::R1 => r1_m(ma, m),
            MergeHealthiness::R2m => r2m(ma, m),
            MergeHealthiness::R3 => r3_m(ma, m),
            MergeHealthiness::Rm => rm(ma, m),
        }
    }
}

/// All order-preserving shuffles of `s` and `t`.
pub fn interleavings(s: &EventSeq, t: &EventSeq) -> BTreeSet<EventSeq> {
    fn go(s: &[Event], t: &[Event], acc: &mut Vec<Event>, out: &mut BTreeSet<EventSeq>) {
        if s.is_empty() && t.is_empty() {
            out.insert(EventSeq::new(acc.clone()));
            return;
        }
        if let Some((head, rest)) = s.split_first() {
            acc.push(head.clone());
            go(rest, t, acc, out);
            acc.pop();
        }
        if let Some((head, rest)) = t.split_first() {
            acc.push(head.clone());
            go(s, rest, acc, out);
            acc.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(s.events(), t.events(), &mut Vec::new(), &mut out);
    out
}

/// How the merged program state is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateMerge {
    /// `v' = 0.v`.
    Left,
    /// `v' = 1.v`.
    Right,
    /// `v' = 0.v ∨ v' = 1.v`.
    Choice,
}

/// How the merged `wait'` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaitMerge {
    /// `wait' = 0.wait ∨ 1.wait`: wait while either side waits.
    Either,
    /// `wait' = 0.wait ∧ 1.wait`.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergePolicy {
    pub state: StateMerge,
    pub wait: WaitMerge,
}

impl Default for MergePolicy {
    fn default() -> Self {
        MergePolicy { state: StateMerge::Left, wait: WaitMerge::Either }
    }
}

impl MergePolicy {
    pub const ALL: [MergePolicy; 6] = [
        MergePolicy { state: StateMerge::Left, wait: WaitMerge::Either },
        MergePolicy { state: StateMerge::Right, wait: WaitMerge::Either },
        MergePolicy { state: StateMerge::Choice, wait: WaitMerge::Either },
        MergePolicy { state: StateMerge::Left, wait: WaitMerge::Both },
        MergePolicy { state: StateMerge::Right, wait: WaitMerge::Both },
        MergePolicy { state: StateMerge::Choice, wait: WaitMerge::Both },
    ];
}

/// `w ∈ interleavings(u, v)` for trace indices of a sequence universe,
/// indexed by `u · n + v`.
fn interleaving_table(ra: &ReactiveAlphabet) -> Result<Vec<FixedBitSet>, TheoryError> {
    let traces = ra.traces();
    if !matches!(traces.kind(), DomainKind::BoundedTraces(TraceUniverse::Seq { .. })) {
        return Err(TheoryError::Unsupported(
            "the interleaving merge needs a sequence trace universe".into(),
        ));
    }
    let seq = |i: usize| match traces.value(i as u32) {
        Value::Trace(TraceValue::Seq(s)) => s.clone(),
        _ => unreachable!("sequence universe"),
    };
    let n = traces.len();
    let mut table = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            let mut set = FixedBitSet::with_capacity(n);
            for w in interleavings(&seq(u), &seq(v)) {
                if let Some(i) = traces.index_of(&Value::from(w)) {
                    set.insert(i as usize);
                }
            }
            table.push(set);
        }
    }
    Ok(table)
}

/// The interleaving merge, wrapped in R3:
///
/// ```text
/// II ◁ wait ▷ (tr ≤ tr' ∧ (tr' − tr) ∈ interleavings(0.tr − tr, 1.tr − tr)
///              ∧ wait' = policy(0.wait, 1.wait) ∧ v' = policy(0.v, 1.v))
/// ```
pub fn make_interleave_merge(ma: &MergeAlphabet, policy: MergePolicy) -> Result<Predicate, TheoryError> {
    let ra = &ma.reactive;
    let inter = interleaving_table(ra)?;
    let n = ra.traces().len();
    let table = ra.table().clone();
    let alpha = &ma.alphabet;
    let tr = ma.var("tr");
    let tr_after = ma.var("tr'");
    let wait_after = ma.var("wait'");
    // Program variables in reactive order, skipping tr and wait.
    let program: Vec<(VarId, VarId, VarId)> = ra
        .program()
        .iter()
        .map(|&id| {
            let name = ra.alphabet().var(id).name();
            (
                ma.var(&format!("{name}'")),
                ma.var(&format!("0.{name}")),
                ma.var(&format!("1.{name}")),
            )
        })
        .collect();
    let (t0, w0) = (ma.copies[0][0], ma.copies[0][1]);
    let (t1, w1) = (ma.copies[1][0], ma.copies[1][1]);
    let body = Predicate::from_fn(alpha, |b| {
        let (x, y) = (b.digit(tr), b.digit(tr_after));
        if !table.prefix(x, y) {
            return false;
        }
        let (u, v, w) = (table.subtract(b.digit(t0), x), table.subtract(b.digit(t1), x), table.subtract(y, x));
        if !inter[u as usize * n + v as usize].contains(w as usize) {
            return false;
        }
        let waits = match policy.wait {
            WaitMerge::Either => b.digit(w0) == 1 || b.digit(w1) == 1,
            WaitMerge::Both => b.digit(w0) == 1 && b.digit(w1) == 1,
        };
        if (b.digit(wait_after) == 1) != waits {
            return false;
        }
        program.iter().all(|&(after, left, right)| match policy.state {
            StateMerge::Left => b.digit(after) == b.digit(left),
            StateMerge::Right => b.digit(after) == b.digit(right),
            StateMerge::Choice => b.digit(after) == b.digit(left) || b.digit(after) == b.digit(right),
        })
    });
    Ok(r3_m(ma, &body)?)
}

/// Checks that `P ∥_M Q` is R-healthy. When a precondition fails (`P` or
/// `Q` not R-healthy, `M` not Rm-healthy) the report says so and carries the
/// outcome of the closure equality as a diagnostic only.
pub fn check_parallel_closure(
    ma: &MergeAlphabet,
    p: &Predicate,
    m: &Predicate,
    q: &Predicate,
) -> Result<TheoryReport, TheoryError> {
    const NAME: &str = "Parallel closure";
    let ra = &ma.reactive;
    let mut failed = Vec::new();
    if !is_healthy(Healthiness::R, ra, p)? {
        failed.push("P is not R healthy");
    }
    if !is_healthy(Healthiness::R, ra, q)? {
        failed.push("Q is not R healthy");
    }
    if rm(ma, m)? != *m {
        failed.push("M is not Rm healthy");
    }
    let par = par_by_merge(ma, p, m, q)?;
    let cx = compare("P ∥_M Q", &r(ra, &par)?, &par);
    if failed.is_empty() {
        return Ok(match cx {
            None => TheoryReport::verified(NAME, 1),
            Some(cx) => TheoryReport::refuted(NAME, 1, cx),
        });
    }
    let verdict = if cx.is_some() { "fails" } else { "holds" };
    let mut report = TheoryReport::precondition(
        NAME,
        format!("{}; the closure equality {verdict} (diagnostic only)", failed.join(", ")),
    );
    report.counterexample = cx;
    Ok(report)
}

/// The worked example: `P` extends the trace by `⟨e₁⟩`, `Q` by `⟨e₂⟩`, both
/// terminate and keep the program state. Returns `(P, Q)`.
pub fn example_processes(ra: &ReactiveAlphabet, e1: &Event, e2: &Event) -> Result<(Predicate, Predicate), RelError> {
    let alpha = ra.alphabet();
    let program: Vec<(VarId, VarId)> = ra
        .program()
        .iter()
        .map(|&id| (id, alpha.var(id).twin().expect("before variables have twins")))
        .collect();
    let wait_after = ra.wait_after();
    let settled = Predicate::from_fn(alpha, |b| {
        b.digit(wait_after) == 0 && program.iter().all(|&(x, y)| b.digit(x) == b.digit(y))
    });
    let make = |e: &Event| -> Result<Predicate, RelError> {
        let body = ra.extends_by(&Value::from(EventSeq::new(vec![e.clone()])))?.and(&settled)?;
        r3(ra, &body)
    };
    Ok((make(e1)?, make(e2)?))
}

fn report_from(name: &str, cases: u64, cx: Option<TheoryCounterexample>) -> TheoryReport {
    match cx {
        None => TheoryReport::verified(name, cases),
        Some(cx) => TheoryReport::refuted(name, cases, cx),
    }
}

/// The worked example, healthiness of every shipped merge, and the closure
/// and symmetry properties on `samples` random healthy triples.
pub fn parallel_suite(ma: &MergeAlphabet, samples: u64, master: u64) -> Result<Vec<TheoryReport>, TheoryError> {
    let ra = &ma.reactive;
    let events: Vec<Event> = match ra.traces().kind() {
        DomainKind::BoundedTraces(TraceUniverse::Seq { events, .. }) => events.clone(),
        _ => {
            return Err(TheoryError::Unsupported(
                "the parallel suite needs a sequence trace universe".into(),
            ))
        }
    };
    let (e1, e2) = match events.as_slice() {
        [] => return Err(TheoryError::Unsupported("the event set is empty".into())),
        [a] => (a.clone(), a.clone()),
        [a, b, ..] => (a.clone(), b.clone()),
    };
    let merges: Vec<Predicate> = MergePolicy::ALL
        .iter()
        .map(|&p| make_interleave_merge(ma, p))
        .collect::<Result<_, _>>()?;
    let mut reports = Vec::new();

    let (p, q) = example_processes(ra, &e1, &e2)?;
    let par = par_by_merge(ma, &p, &merges[0], &q)?;
    let expected = expected_example(ra, &e1, &e2)?;
    reports.push(report_from("Interleaving example", 1, compare("P ∥_M Q", &par, &expected)));

    let mut cx = None;
    for (i, m) in merges.iter().enumerate() {
        if cx.is_none() {
            cx = compare(&format!("merge {i}"), &rm(ma, m)?, m);
        }
    }
    reports.push(report_from("Merge Rm healthy", merges.len() as u64, cx));

    let mut rng = seed::rng(master, "Parallel closure", 0);
    let mut closure = TheoryReport::verified("Parallel closure", samples);
    let mut symmetry = TheoryReport::verified("Parallel symmetry", samples);
    for i in 0..samples {
        let p = r(ra, &crate::reactive::random_predicate(ra.alphabet(), &mut rng))?;
        let q = r(ra, &crate::reactive::random_predicate(ra.alphabet(), &mut rng))?;
        let k = rng.gen_range(0..merges.len());
        let m = &merges[k];
        if closure.verified {
            let report = check_parallel_closure(ma, &p, m, &q)?;
            if !report.verified {
                closure = TheoryReport { cases: i + 1, theorem: closure.theorem.clone(), ..report };
                if let Some(c) = closure.counterexample.as_mut() {
                    c.predicate = format!("sample {i} with merge {k}");
                }
            }
        }
        if symmetry.verified {
            let lhs = par_by_merge(ma, &p, m, &q)?;
            let rhs = par_by_merge(ma, &q, &swap_indices(ma, m)?, &p)?;
            if let Some(c) = compare(&format!("sample {i} with merge {k}"), &lhs, &rhs) {
                symmetry = TheoryReport::refuted("Parallel symmetry", i + 1, c);
            }
        }
    }
    reports.push(closure);
    reports.push(symmetry);
    Ok(reports)
}

/// The expected result of the worked example: on waiting states `II`, on
/// the others `tr' − tr` is one of the shuffles of `⟨e₁⟩` and `⟨e₂⟩`, the
/// result terminates and the program state is unchanged.
fn expected_example(ra: &ReactiveAlphabet, e1: &Event, e2: &Event) -> Result<Predicate, RelError> {
    let shuffles: Vec<Predicate> = interleavings(
        &EventSeq::new(vec![e1.clone()]),
        &EventSeq::new(vec![e2.clone()]),
    )
    .into_iter()
    .map(|w| ra.extends_by(&Value::from(w)))
    .collect::<Result<_, _>>()?;
    let alpha = ra.alphabet();
    let moved = Predicate::lattice_inf(alpha, &shuffles)?;
    let program: Vec<(VarId, VarId)> = ra
        .program()
        .iter()
        .map(|&id| (id, alpha.var(id).twin().expect("before variables have twins")))
        .collect();
    let wait_after = ra.wait_after();
    let settled = Predicate::from_fn(alpha, |b| {
        b.digit(wait_after) == 0 && program.iter().all(|&(x, y)| b.digit(x) == b.digit(y))
    });
    r3(ra, &moved.and(&settled)?)
}
