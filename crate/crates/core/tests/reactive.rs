mod common;

use std::sync::Arc;

use common::relation_oracle::{self as oracle, build, holds};
use reactive_traces::models::{Event, EventSeq, NonNegRat};
use reactive_traces::reactive::{
    contribution_form, is_healthy, micro_tier, quantale_suite, r, r1, r1_r2c, r2c, r3, random_predicate,
    theory_inf, theory_suite, Healthiness, ReactiveAlphabet, TheoryError,
};
use reactive_traces::relation::{Domain, TraceUniverse};
use reactive_traces::{seed, Predicate, Value};

fn seq_alphabet() -> ReactiveAlphabet {
    let traces = Arc::new(Domain::seq_traces(&[Event::new("a"), Event::new("b")], 2).unwrap());
    ReactiveAlphabet::new(traces, &[("v".into(), Arc::new(Domain::bool()))]).unwrap()
}

fn rat_alphabet() -> ReactiveAlphabet {
    let universe = TraceUniverse::Rat { step: NonNegRat::ratio(1, 2), max: NonNegRat::ratio(3, 2) };
    let traces = Arc::new(Domain::traces(universe).unwrap());
    ReactiveAlphabet::new(traces, &[("v".into(), Arc::new(Domain::bool()))]).unwrap()
}

fn samples(ra: &ReactiveAlphabet, label: &str, n: u64) -> Vec<Predicate> {
    (0..n)
        .map(|i| random_predicate(ra.alphabet(), &mut seed::rng(21, label, i)))
        .collect()
}

#[test]
fn healthiness_matches_the_oracle() {
    for ra in [seq_alphabet(), rat_alphabet()] {
        for p in samples(&ra, "health", 40) {
            assert_eq!(r1(&ra, &p).unwrap(), oracle::r1(&ra, &p));
            assert_eq!(r2c(&ra, &p).unwrap(), oracle::r2c(&ra, &p));
            assert_eq!(r3(&ra, &p).unwrap(), oracle::r3(&ra, &p));
            assert_eq!(r(&ra, &p).unwrap(), oracle::r(&ra, &p));
        }
    }
}

#[test]
fn conditions_are_idempotent_and_commute() {
    let ra = seq_alphabet();
    for p in samples(&ra, "idem", 60) {
        for h in Healthiness::ALL {
            let once = h.apply(&ra, &p).unwrap();
            assert_eq!(h.apply(&ra, &once).unwrap(), once, "{h}");
            assert!(is_healthy(h, &ra, &once).unwrap());
        }
        let orders = [
            r3(&ra, &r2c(&ra, &r1(&ra, &p).unwrap()).unwrap()).unwrap(),
            r1(&ra, &r2c(&ra, &r3(&ra, &p).unwrap()).unwrap()).unwrap(),
            r2c(&ra, &r3(&ra, &r1(&ra, &p).unwrap()).unwrap()).unwrap(),
        ];
        assert!(orders.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn contribution_form_matches_the_oracle() {
    for ra in [seq_alphabet(), rat_alphabet()] {
        let values: Vec<Value> = ra.traces().values().to_vec();
        for p in samples(&ra, "contribution", 30) {
            let healthy = r1_r2c(&ra, &p).unwrap();
            let expected = build(ra.alphabet(), |env| {
                let (tr, tr_after) = (env["tr"].as_trace().unwrap(), env["tr'"].as_trace().unwrap());
                values.iter().any(|t| {
                    let t = t.as_trace().unwrap();
                    let mut fixed = env.clone();
                    fixed.insert("tr".into(), Value::Trace(tr.subtract(tr).unwrap()));
                    fixed.insert("tr'".into(), Value::Trace(t.clone()));
                    tr.concat(t).is_ok_and(|joined| &joined == tr_after) && holds(&healthy, &fixed)
                })
            });
            let form = contribution_form(&ra, &healthy).unwrap();
            assert_eq!(form, expected);
            assert_eq!(form, healthy);
        }
    }
}

#[test]
fn sequence_preserves_healthiness() {
    let ra = seq_alphabet();
    let ps = samples(&ra, "closure", 40);
    for pair in ps.chunks(2) {
        let (p, q) = (r(&ra, &pair[0]).unwrap(), r(&ra, &pair[1]).unwrap());
        let pq = p.seq(&q).unwrap();
        assert_eq!(pq, oracle::seq(&p, &q));
        assert!(is_healthy(Healthiness::R, &ra, &pq).unwrap());
    }
}

#[test]
fn absolute_traces_are_not_r2c() {
    let ra = seq_alphabet();
    let a = Value::from(EventSeq::of(&["a"]));
    let p = build(ra.alphabet(), |env| env["tr'"] == a);
    assert!(!is_healthy(Healthiness::R2c, &ra, &p).unwrap());
    assert_ne!(r2c(&ra, &p).unwrap(), p);
}

#[test]
fn healthy_infimum_rejects_unhealthy_members() {
    let ra = seq_alphabet();
    let raw = random_predicate(ra.alphabet(), &mut seed::rng(1, "inf", 0));
    assert!(matches!(
        theory_inf(&ra, &[raw]),
        Err(TheoryError::UnhealthyMember { index: 0, .. })
    ));
}

#[test]
fn suites_verify_on_the_desk_universe() {
    let ra = seq_alphabet();
    for report in theory_suite(&ra, 50, 42).unwrap() {
        assert!(report.verified, "{report:?}");
    }
    for report in quantale_suite(&ra, 50, 42).unwrap() {
        assert!(report.verified, "{report:?}");
    }
    assert_eq!(theory_suite(&ra, 20, 5).unwrap(), theory_suite(&ra, 20, 5).unwrap());
}

#[test]
fn micro_tier_enumerates_every_predicate() {
    let traces = Arc::new(Domain::seq_traces(&[Event::new("a")], 1).unwrap());
    let reports = micro_tier(traces).unwrap();
    assert!(!reports.is_empty());
    for report in reports {
        assert!(report.verified, "{report:?}");
        assert_eq!(report.cases, 65_536);
    }
}
