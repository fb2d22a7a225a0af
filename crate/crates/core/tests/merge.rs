mod common;

use std::sync::Arc;

use common::relation_oracle::{self as oracle, build, holds};
use reactive_traces::merge::{
    check_parallel_closure, interleavings, make_interleave_merge, par_by_merge, parallel_suite, r2m, r3_m, rm, sep,
    swap_indices, MergeAlphabet, MergePolicy,
};
use reactive_traces::models::{Event, EventSeq};
use reactive_traces::reactive::{r, random_predicate, ReactiveAlphabet};
use reactive_traces::relation::{Domain, TraceValue};
use reactive_traces::{seed, Predicate, Value};

fn small() -> MergeAlphabet {
    let traces = Arc::new(Domain::seq_traces(&[Event::new("a"), Event::new("b")], 1).unwrap());
    MergeAlphabet::new(&ReactiveAlphabet::new(traces, &[]).unwrap()).unwrap()
}

fn desk() -> MergeAlphabet {
    let traces = Arc::new(Domain::seq_traces(&[Event::new("a"), Event::new("b")], 2).unwrap());
    let ra = ReactiveAlphabet::new(traces, &[("v".into(), Arc::new(Domain::bool()))]).unwrap();
    MergeAlphabet::new(&ra).unwrap()
}

fn healthy(ma: &MergeAlphabet, label: &str, i: u64) -> Predicate {
    let ra = ma.reactive();
    r(ra, &random_predicate(ra.alphabet(), &mut seed::rng(8, label, i))).unwrap()
}

fn seq_of(v: &Value) -> &EventSeq {
    match v.as_trace() {
        Some(TraceValue::Seq(s)) => s,
        _ => panic!("not a sequence"),
    }
}

#[test]
fn alphabet_sizes() {
    assert_eq!(small().alphabet().size(), 6usize.pow(4));
    assert_eq!(desk().alphabet().size(), 614_656);
}

#[test]
fn interleavings_match_shuffles() {
    let traces = Domain::seq_traces(&[Event::new("a"), Event::new("b")], 3).unwrap();
    for s in traces.values() {
        for t in traces.values() {
            assert_eq!(interleavings(seq_of(s), seq_of(t)), oracle::shuffles(seq_of(s), seq_of(t)));
        }
    }
    let ab = EventSeq::of(&["a", "b"]);
    assert_eq!(interleavings(&ab, &ab).len(), 2);
    assert_eq!(interleavings(&ab, &EventSeq::of(&["c"])).len(), 3);
}

#[test]
fn par_matches_the_oracle() {
    let ma = small();
    let merges: Vec<Predicate> =
        MergePolicy::ALL.iter().map(|&p| make_interleave_merge(&ma, p).unwrap()).collect();
    for i in 0..30 {
        let (p, q) = (healthy(&ma, "P", i), healthy(&ma, "Q", i));
        let m = &merges[i as usize % merges.len()];
        assert_eq!(par_by_merge(&ma, &p, m, &q).unwrap(), oracle::par(&ma, &p, m, &q));
        let raw = random_predicate(ma.alphabet(), &mut seed::rng(8, "M", i));
        assert_eq!(par_by_merge(&ma, &p, &raw, &q).unwrap(), oracle::par(&ma, &p, &raw, &q));
    }
}

#[test]
fn par_matches_the_oracle_on_the_desk() {
    let ma = desk();
    let m = make_interleave_merge(&ma, MergePolicy::default()).unwrap();
    for i in 0..2 {
        let (p, q) = (healthy(&ma, "desk P", i), healthy(&ma, "desk Q", i));
        assert_eq!(par_by_merge(&ma, &p, &m, &q).unwrap(), oracle::par(&ma, &p, &m, &q));
    }
}

#[test]
fn separation_moves_after_states_to_a_copy() {
    let ma = small();
    for i in 0..10 {
        let p = random_predicate(ma.reactive().alphabet(), &mut seed::rng(8, "sep", i));
        for n in 0..2 {
            let expected = build(ma.alphabet(), |env| {
                let mut renv = oracle::Env::new();
                for (k, v) in env {
                    if let Some(name) = k.strip_prefix(&format!("{n}.")) {
                        renv.insert(format!("{name}'"), v.clone());
                    } else if !k.ends_with('\'') && !k.contains('.') {
                        renv.insert(k.clone(), v.clone());
                    }
                }
                holds(&p, &renv)
            });
            assert_eq!(sep(&ma, &p, n).unwrap(), expected);
        }
    }
}

#[test]
fn r2m_matches_the_oracle() {
    let ma = small();
    let trace = |env: &oracle::Env, k: &str| env[k].as_trace().unwrap().clone();
    for i in 0..10 {
        let m = random_predicate(ma.alphabet(), &mut seed::rng(8, "r2m", i));
        let expected = build(ma.alphabet(), |env| {
            let (x, y) = (trace(env, "tr"), trace(env, "tr'"));
            if !x.is_prefix_of(&y).unwrap() {
                return holds(&m, env);
            }
            let mut moved = env.clone();
            for k in ["tr'", "0.tr", "1.tr"] {
                moved.insert(k.into(), Value::Trace(trace(env, k).subtract(&x).unwrap()));
            }
            moved.insert("tr".into(), Value::Trace(x.subtract(&x).unwrap()));
            holds(&m, &moved)
        });
        assert_eq!(r2m(&ma, &m).unwrap(), expected);
    }
}

#[test]
fn shipped_merges_are_healthy_and_swap_to_their_mirror() {
    let ma = desk();
    let merges: Vec<Predicate> =
        MergePolicy::ALL.iter().map(|&p| make_interleave_merge(&ma, p).unwrap()).collect();
    for m in &merges {
        assert_eq!(&rm(&ma, m).unwrap(), m);
        assert_eq!(swap_indices(&ma, &swap_indices(&ma, m).unwrap()).unwrap(), *m);
    }
    // Left and Right state choices are mirror images.
    assert_eq!(swap_indices(&ma, &merges[0]).unwrap(), merges[1]);
    assert_eq!(swap_indices(&ma, &merges[2]).unwrap(), merges[2]);
}

#[test]
fn symmetry_and_zero() {
    let ma = small();
    for i in 0..20 {
        let (p, q) = (healthy(&ma, "sym P", i), healthy(&ma, "sym Q", i));
        let m = random_predicate(ma.alphabet(), &mut seed::rng(8, "sym M", i));
        let left = par_by_merge(&ma, &p, &m, &q).unwrap();
        let right = par_by_merge(&ma, &q, &swap_indices(&ma, &m).unwrap(), &p).unwrap();
        assert_eq!(left, right);
        let none = Predicate::falsity(ma.reactive().alphabet());
        assert!(par_by_merge(&ma, &p, &m, &none).unwrap().is_false());
        assert!(par_by_merge(&ma, &none, &m, &q).unwrap().is_false());
    }
}

#[test]
fn closure_holds_for_healthy_merges() {
    let ma = small();
    let m = make_interleave_merge(&ma, MergePolicy::default()).unwrap();
    for i in 0..20 {
        let report = check_parallel_closure(&ma, &healthy(&ma, "cl P", i), &m, &healthy(&ma, "cl Q", i)).unwrap();
        assert!(report.verified, "{report:?}");
    }
}

#[test]
fn absolute_merges_fail_the_precondition() {
    let ma = small();
    let a = Value::from(EventSeq::of(&["a"]));
    let absolute = r3_m(&ma, &build(ma.alphabet(), |env| env["0.tr"] == a && env["tr'"] == env["0.tr"])).unwrap();
    assert_ne!(rm(&ma, &absolute).unwrap(), absolute);
    let report = check_parallel_closure(&ma, &healthy(&ma, "abs P", 0), &absolute, &healthy(&ma, "abs Q", 0)).unwrap();
    assert!(!report.verified);
    assert!(report.precondition_failed);
    assert!(report.note.unwrap().contains("M is not Rm healthy"));
}

#[test]
fn suite_verifies_on_the_desk() {
    let reports = parallel_suite(&desk(), 5, 42).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r.theorem.as_str()).collect();
    assert_eq!(names, ["Interleaving example", "Merge Rm healthy", "Parallel closure", "Parallel symmetry"]);
    for report in reports {
        assert!(report.verified, "{report:?}");
    }
}
