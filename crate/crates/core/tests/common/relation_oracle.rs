//! Reference implementations that work on named values, one binding at a
//! time, without the row arithmetic of the library.

use std::collections::{BTreeMap, BTreeSet};

use reactive_traces::merge::MergeAlphabet;
use reactive_traces::models::{Event, EventSeq};
use reactive_traces::reactive::ReactiveAlphabet;
use reactive_traces::relation::{Alphabet, TraceValue};
use reactive_traces::{Predicate, Value};

pub type Env = BTreeMap<String, Value>;

pub fn envs(alpha: &Alphabet) -> impl Iterator<Item = Env> + '_ {
    (0..alpha.size()).map(move |row| alpha.describe(row).into_iter().collect())
}

/// Whether `p` holds on the binding named by `env`. Values outside a
/// variable's domain make the binding absent.
pub fn holds(p: &Predicate, env: &Env) -> bool {
    let alpha = p.alphabet();
    let mut digits = Vec::with_capacity(alpha.vars().len());
    for id in alpha.ids() {
        let decl = alpha.var(id);
        match env.get(decl.name()).and_then(|v| decl.domain().index_of(v)) {
            Some(d) => digits.push(d),
            None => return false,
        }
    }
    p.contains(alpha.encode(&digits))
}

pub fn build(alpha: &std::sync::Arc<Alphabet>, f: impl Fn(&Env) -> bool) -> Predicate {
    Predicate::from_fn(alpha, |b| {
        let env: Env = alpha.ids().map(|id| (alpha.var(id).name().to_string(), b.get(id).clone())).collect();
        f(&env)
    })
}

fn trace(env: &Env, name: &str) -> TraceValue {
    env[name].as_trace().expect("trace variable").clone()
}

fn prefix(env: &Env, a: &str, b: &str) -> bool {
    trace(env, a).is_prefix_of(&trace(env, b)).unwrap()
}

/// `x' = x` for every unprimed variable `x` with a primed twin.
fn identity(env: &Env) -> bool {
    env.iter()
        .filter(|(k, _)| !k.ends_with('\'') && !k.starts_with(|c: char| c.is_ascii_digit()))
        .all(|(k, v)| env.get(&format!("{k}'")).map_or(true, |w| w == v))
}

fn wait(env: &Env) -> bool {
    env["wait"].as_bool().unwrap()
}

pub fn r1(ra: &ReactiveAlphabet, p: &Predicate) -> Predicate {
    build(ra.alphabet(), |env| holds(p, env) && prefix(env, "tr", "tr'"))
}

pub fn r2c(ra: &ReactiveAlphabet, p: &Predicate) -> Predicate {
    build(ra.alphabet(), |env| {
        if !prefix(env, "tr", "tr'") {
            return holds(p, env);
        }
        let (x, y) = (trace(env, "tr"), trace(env, "tr'"));
        let mut moved = env.clone();
        moved.insert("tr".into(), Value::Trace(x.subtract(&x).unwrap()));
        moved.insert("tr'".into(), Value::Trace(y.subtract(&x).unwrap()));
        holds(p, &moved)
    })
}

pub fn r3(ra: &ReactiveAlphabet, p: &Predicate) -> Predicate {
    build(ra.alphabet(), |env| if wait(env) { identity(env) } else { holds(p, env) })
}

pub fn r(ra: &ReactiveAlphabet, p: &Predicate) -> Predicate {
    r3(ra, &r2c(ra, &r1(ra, p)))
}

fn split(env: &Env) -> (Env, Env) {
    let (after, before): (Env, Env) = env.clone().into_iter().partition(|(k, _)| k.ends_with('\''));
    let after = after.into_iter().map(|(k, v)| (k.trim_end_matches('\'').to_string(), v)).collect();
    (before, after)
}

/// `P ; Q` by matching `P`'s after-state with `Q`'s before-state.
pub fn seq(p: &Predicate, q: &Predicate) -> Predicate {
    let alpha = p.alphabet();
    let ps: Vec<(Env, Env)> = envs(alpha).filter(|e| holds(p, e)).map(|e| split(&e)).collect();
    let qs: Vec<(Env, Env)> = envs(alpha).filter(|e| holds(q, e)).map(|e| split(&e)).collect();
    let mut pairs: BTreeSet<(Vec<(String, Value)>, Vec<(String, Value)>)> = BTreeSet::new();
    for (pb, pa) in &ps {
        for (qb, qa) in &qs {
            if pa == qb {
                pairs.insert((pb.clone().into_iter().collect(), qa.clone().into_iter().collect()));
            }
        }
    }
    build(alpha, |env| {
        let (b, a) = split(env);
        pairs.contains(&(b.into_iter().collect(), a.into_iter().collect()))
    })
}

/// `P ∥_M Q`: some after-states `c₀` of `P` and `c₁` of `Q` from the same
/// before-state are merged by `M` into the final state.
pub fn par(ma: &MergeAlphabet, p: &Predicate, m: &Predicate, q: &Predicate) -> Predicate {
    let ra = ma.reactive();
    let outcomes = |x: &Predicate| -> BTreeMap<Vec<(String, Value)>, Vec<Env>> {
        let mut map: BTreeMap<Vec<(String, Value)>, Vec<Env>> = BTreeMap::new();
        for e in envs(ra.alphabet()).filter(|e| holds(x, e)) {
            let (b, a) = split(&e);
            map.entry(b.into_iter().collect()).or_default().push(a);
        }
        map
    };
    let (left, right) = (outcomes(p), outcomes(q));
    build(ra.alphabet(), |env| {
        let (before, after) = split(env);
        let key: Vec<(String, Value)> = before.clone().into_iter().collect();
        let (Some(left), Some(right)) = (left.get(&key), right.get(&key)) else {
            return false;
        };
        left.iter().any(|c0| {
            right.iter().any(|c1| {
                let mut menv = before.clone();
                for (k, v) in &after {
                    menv.insert(format!("{k}'"), v.clone());
                }
                for (k, v) in c0 {
                    menv.insert(format!("0.{k}"), v.clone());
                }
                for (k, v) in c1 {
                    menv.insert(format!("1.{k}"), v.clone());
                }
                holds(m, &menv)
            })
        })
    })
}

/// Shuffles of `s` and `t`, one per choice of the positions of `s`.
pub fn shuffles(s: &EventSeq, t: &EventSeq) -> BTreeSet<EventSeq> {
    let (n, m) = (s.len(), t.len());
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << (n + m)) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut w: Vec<Event> = Vec::with_capacity(n + m);
        for pos in 0..n + m {
            if mask >> pos & 1 == 1 {
                w.push(s.events()[i].clone());
                i += 1;
            } else {
                w.push(t.events()[j].clone());
                j += 1;
            }
        }
        out.insert(EventSeq::new(w));
    }
    out
}
