mod common;

use std::sync::Arc;

use common::relation_oracle::{self as oracle, build, holds};
use fixedbitset::FixedBitSet;
use proptest::prelude::*;
use reactive_traces::relation::{Alphabet, Domain, RelError};
use reactive_traces::{Predicate, Value};

fn alphabet() -> Arc<Alphabet> {
    Alphabet::builder()
        .var("x", Arc::new(Domain::int_range(0, 2).unwrap()))
        .var("y", Arc::new(Domain::bool()))
        .build()
        .unwrap()
}

fn predicate() -> impl Strategy<Value = Predicate> {
    let a = alphabet();
    prop::collection::vec(any::<bool>(), a.size()).prop_map(move |bits| {
        let mut rows = FixedBitSet::with_capacity(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            rows.set(i, b);
        }
        Predicate::from_rows(&a, rows)
    })
}

fn condition() -> impl Strategy<Value = Predicate> {
    predicate().prop_map(|b| {
        let a = b.alphabet().clone();
        let keep = b.clone();
        build(&a, |env| {
            let mut at_zero = env.clone();
            at_zero.insert("x'".into(), Value::Int(0));
            at_zero.insert("y'".into(), Value::Bool(false));
            holds(&keep, &at_zero)
        })
    })
}

fn int(env: &oracle::Env, name: &str) -> i64 {
    match env[name] {
        Value::Int(i) => i,
        _ => unreachable!(),
    }
}

#[test]
fn sizes() {
    let a = alphabet();
    assert_eq!(a.size(), 36);
    assert_eq!((a.before_size(), a.after_size()), (6, 6));
    assert_eq!(Predicate::skip(&a).count(), 6);
}

#[test]
fn assignment_matches_the_oracle() {
    let a = alphabet();
    let p = Predicate::assign(&a, "x", |b| {
        let x = match b.get(a.lookup("x").unwrap()) {
            Value::Int(i) => *i,
            _ => unreachable!(),
        };
        Ok(Value::Int((x + 1) % 3))
    })
    .unwrap();
    let expected = build(&a, |env| int(env, "x'") == (int(env, "x") + 1) % 3 && env["y'"] == env["y"]);
    assert_eq!(p, expected);
    let out_of_range = Predicate::assign(&a, "x", |_| Ok(Value::Int(7)));
    assert!(matches!(out_of_range, Err(RelError::DomainViolation { .. })));
}

#[test]
fn fixed_points_of_constant_maps() {
    let a = alphabet();
    let c = Predicate::skip(&a);
    assert_eq!(Predicate::lfp(&a, |_| Ok(c.clone())).unwrap(), c);
    assert_eq!(Predicate::gfp(&a, |_| Ok(c.clone())).unwrap(), c);
    assert!(Predicate::lfp(&a, |x| Ok(x.clone())).unwrap().is_true());
    assert!(Predicate::gfp(&a, |x| Ok(x.clone())).unwrap().is_false());
    assert!(matches!(
        Predicate::lfp(&a, |x| Ok(x.not())),
        Err(RelError::NonMonotoneDetected { .. })
    ));
}

#[test]
fn empty_lattice_bounds() {
    let a = alphabet();
    assert!(Predicate::lattice_inf(&a, &[]).unwrap().is_false());
    assert!(Predicate::lattice_sup(&a, &[]).unwrap().is_true());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn seq_matches_the_oracle(p in predicate(), q in predicate()) {
        prop_assert_eq!(p.seq(&q).unwrap(), oracle::seq(&p, &q));
    }

    #[test]
    fn seq_is_associative_with_unit(p in predicate(), q in predicate(), r in predicate()) {
        let skip = Predicate::skip(p.alphabet());
        prop_assert_eq!(p.seq(&q).unwrap().seq(&r).unwrap(), p.seq(&q.seq(&r).unwrap()).unwrap());
        prop_assert_eq!(skip.seq(&p).unwrap(), p.clone());
        prop_assert_eq!(p.seq(&skip).unwrap(), p);
    }

    #[test]
    fn seq_distributes_over_disjunction(p in predicate(), q in predicate(), r in predicate()) {
        prop_assert_eq!(p.or(&q).unwrap().seq(&r).unwrap(), p.seq(&r).unwrap().or(&q.seq(&r).unwrap()).unwrap());
        prop_assert_eq!(r.seq(&p.or(&q).unwrap()).unwrap(), r.seq(&p).unwrap().or(&r.seq(&q).unwrap()).unwrap());
    }

    #[test]
    fn conditional_laws(p in predicate(), q in predicate(), r in predicate(), b in condition()) {
        let cond = Predicate::cond(&p, &b, &q).unwrap();
        prop_assert_eq!(&cond, &build(p.alphabet(), |env| if holds(&b, env) { holds(&p, env) } else { holds(&q, env) }));
        prop_assert_eq!(Predicate::cond(&p, &b, &p).unwrap(), p.clone());
        prop_assert_eq!(Predicate::cond(&q, &b.not(), &p).unwrap(), cond.clone());
        prop_assert_eq!(cond.seq(&r).unwrap(), Predicate::cond(&p.seq(&r).unwrap(), &b, &q.seq(&r).unwrap()).unwrap());
    }

    #[test]
    fn refinement_is_a_lattice(p in predicate(), q in predicate()) {
        let a = p.alphabet().clone();
        let inf = Predicate::lattice_inf(&a, &[p.clone(), q.clone()]).unwrap();
        let sup = Predicate::lattice_sup(&a, &[p.clone(), q.clone()]).unwrap();
        prop_assert!(inf.refines(&p).unwrap() && inf.refines(&q).unwrap());
        prop_assert!(p.refines(&sup).unwrap() && q.refines(&sup).unwrap());
        prop_assert_eq!(p.refines(&q).unwrap(), p.and(&q).unwrap() == q);
        prop_assert_eq!(p.refines(&q).unwrap(), build(&a, |env| holds(&q, env) && !holds(&p, env)).is_false());
    }

    #[test]
    fn existential_matches_the_oracle(p in predicate()) {
        let a = p.alphabet().clone();
        let x = a.lookup("x").unwrap();
        let expected = build(&a, |env| {
            (0..=2).any(|v| {
                let mut e = env.clone();
                e.insert("x".into(), Value::Int(v));
                holds(&p, &e)
            })
        });
        prop_assert_eq!(p.exists(x), expected);
    }

    #[test]
    fn substitution_matches_the_oracle(p in predicate()) {
        let a = p.alphabet().clone();
        let (x, y) = (a.lookup("x").unwrap(), a.lookup("y").unwrap());
        let swap_y = |b: &reactive_traces::relation::Binding| Ok(Value::Bool(!b.get(y).as_bool().unwrap()));
        let zero = |_: &reactive_traces::relation::Binding| Ok(Value::Int(0));
        let got = p.substitute(&[(y, &swap_y), (x, &zero)]).unwrap();
        let expected = build(&a, |env| {
            let mut e = env.clone();
            e.insert("y".into(), Value::Bool(!env["y"].as_bool().unwrap()));
            e.insert("x".into(), Value::Int(0));
            holds(&p, &e)
        });
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn fixed_points_are_extremal(c in predicate(), d in predicate()) {
        let a = c.alphabet().clone();
        let f = |x: &Predicate| c.or(&d.and(x).unwrap());
        let lfp = Predicate::lfp(&a, f).unwrap();
        let gfp = Predicate::gfp(&a, f).unwrap();
        prop_assert_eq!(f(&lfp).unwrap(), lfp.clone());
        prop_assert_eq!(f(&gfp).unwrap(), gfp.clone());
        prop_assert!(lfp.refines(&gfp).unwrap());
        prop_assert_eq!(lfp, c.or(&d).unwrap());
        prop_assert_eq!(gfp, c);
    }
}
