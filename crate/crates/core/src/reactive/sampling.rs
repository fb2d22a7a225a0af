//! Sampled and exhaustive theorem suites.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::theorems::{compare, TheoryCounterexample, TheoryReport};
use super::{
    check_closures, check_quantale, check_seq_contribution, contribution_form, is_healthy, r, r1,
    r1_r2c, r2c, r3, theory_inf, theory_sup, Healthiness, ReactiveAlphabet, TheoryError,
};
use crate::relation::{Alphabet, Domain, Predicate};
use crate::seed;

/// Row densities used for random predicates. Sparse predicates exercise the
/// corners of composition, dense ones the conditionals.
pub const DENSITIES: [f64; 5] = [0.02, 0.1, 0.3, 0.5, 0.8];

/// A predicate whose rows are chosen independently with one of
/// [`DENSITIES`].
pub fn random_predicate(alphabet: &Arc<Alphabet>, rng: &mut ChaCha8Rng) -> Predicate {
    let density = DENSITIES[rng.gen_range(0..DENSITIES.len())];
    let mut rows = FixedBitSet::with_capacity(alphabet.size());
    for i in 0..alphabet.size() {
        if rng.gen_bool(density) {
            rows.insert(i);
        }
    }
    Predicate::from_rows(alphabet, rows)
}

/// What a sample must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Raw,
    R1R2c,
    R,
}

fn sample(ra: &ReactiveAlphabet, kind: SampleKind, rng: &mut ChaCha8Rng) -> Result<Predicate, TheoryError> {
    let p = random_predicate(ra.alphabet(), rng);
    Ok(match kind {
        SampleKind::Raw => p,
        SampleKind::R1R2c => r1_r2c(ra, &p)?,
        SampleKind::R => r(ra, &p)?,
    })
}

fn label(i: u64, p: &Predicate) -> String {
    format!("sample {i} ({} rows)", p.count())
}

type Outcome = Result<Option<TheoryCounterexample>, TheoryError>;
type CheckFn = fn(&ReactiveAlphabet, &mut ChaCha8Rng, u64) -> Outcome;

fn idempotence(h: Healthiness, ra: &ReactiveAlphabet, rng: &mut ChaCha8Rng, i: u64) -> Outcome {
    let p = sample(ra, SampleKind::Raw, rng)?;
    let once = h.apply(ra, &p)?;
    Ok(compare(&label(i, &p), &h.apply(ra, &once)?, &once))
}

/// A row of `q` missing from `p`, when `p ⊑ q` fails.
fn refinement_gap(lbl: String, p: &Predicate, q: &Predicate) -> Option<TheoryCounterexample> {
    let mut extra = q.rows().clone();
    extra.difference_with(p.rows());
    extra.ones().next().map(|row| TheoryCounterexample {
        predicate: lbl,
        binding: Some(q.binding(row)),
    })
}

fn from_report(lbl: String, report: TheoryReport) -> Option<TheoryCounterexample> {
    if report.verified {
        None
    } else {
        Some(match report.counterexample {
            Some(cx) => TheoryCounterexample { predicate: lbl, binding: cx.binding },
            None => TheoryCounterexample {
                predicate: format!("{lbl}: {}", report.note.unwrap_or_default()),
                binding: None,
            },
        })
    }
}

fn random_set(ra: &ReactiveAlphabet, rng: &mut ChaCha8Rng) -> Result<Vec<Predicate>, TheoryError> {
    let size = rng.gen_range(1..=3);
    (0..size).map(|_| sample(ra, SampleKind::R, rng)).collect()
}

const CHECKS: &[(&str, CheckFn)] = &[
    ("R1 idempotence", |ra, rng, i| idempotence(Healthiness::R1, ra, rng, i)),
    ("R2c idempotence", |ra, rng, i| idempotence(Healthiness::R2c, ra, rng, i)),
    ("R3 idempotence", |ra, rng, i| idempotence(Healthiness::R3, ra, rng, i)),
    ("R idempotence", |ra, rng, i| idempotence(Healthiness::R, ra, rng, i)),
    ("R1-R2c commutation", |ra, rng, i| {
        let p = sample(ra, SampleKind::Raw, rng)?;
        Ok(compare(&label(i, &p), &r1(ra, &r2c(ra, &p)?)?, &r2c(ra, &r1(ra, &p)?)?))
    }),
    ("R monotonicity", |ra, rng, i| {
        let p = sample(ra, SampleKind::Raw, rng)?;
        let q = p.and(&random_predicate(ra.alphabet(), rng))?;
        Ok(refinement_gap(label(i, &q), &r(ra, &p)?, &r(ra, &q)?))
    }),
    ("R healthy implies R1 healthy", |ra, rng, i| {
        let p = sample(ra, SampleKind::R, rng)?;
        Ok(compare(&label(i, &p), &r1(ra, &p)?, &p))
    }),
    ("Trace contribution", |ra, rng, i| {
        let p = sample(ra, SampleKind::Raw, rng)?;
        Ok(compare(&label(i, &p), &contribution_form(ra, &p)?, &r1_r2c(ra, &p)?))
    }),
    ("R1-R2c sequential", |ra, rng, i| {
        let p = sample(ra, SampleKind::R1R2c, rng)?;
        let q = sample(ra, SampleKind::R1R2c, rng)?;
        Ok(from_report(label(i, &p), check_seq_contribution(ra, &p, &q)?))
    }),
    ("R1-R2c sequential closure", |ra, rng, i| {
        let p = sample(ra, SampleKind::R1R2c, rng)?;
        let q = sample(ra, SampleKind::R1R2c, rng)?;
        let report = check_closures(ra, &p, &q)?.swap_remove(0);
        Ok(from_report(label(i, &p), report))
    }),
    ("R sequential closure", |ra, rng, i| {
        let p = sample(ra, SampleKind::R, rng)?;
        let q = sample(ra, SampleKind::R, rng)?;
        let report = check_closures(ra, &p, &q)?.swap_remove(1);
        Ok(from_report(label(i, &p), report))
    }),
    ("Healthy infimum", |ra, rng, i| {
        let set = random_set(ra, rng)?;
        let inf = theory_inf(ra, &set)?;
        let lbl = format!("set {i} of {} predicates", set.len());
        if !is_healthy(Healthiness::R, ra, &inf)? {
            return Ok(compare(&lbl, &r(ra, &inf)?, &inf));
        }
        for p in &set {
            if let Some(cx) = refinement_gap(lbl.clone(), &inf, p) {
                return Ok(Some(cx));
            }
        }
        // Any healthy lower bound lies below the infimum.
        let mut wider = set.clone();
        wider.push(sample(ra, SampleKind::R, rng)?);
        let lower = theory_inf(ra, &wider)?;
        Ok(refinement_gap(lbl, &lower, &inf))
    }),
    ("Healthy supremum", |ra, rng, i| {
        let set = random_set(ra, rng)?;
        let sup = theory_sup(ra, &set)?;
        let lbl = format!("set {i} of {} predicates", set.len());
        if !is_healthy(Healthiness::R, ra, &sup)? {
            return Ok(compare(&lbl, &r(ra, &sup)?, &sup));
        }
        for p in &set {
            if let Some(cx) = refinement_gap(lbl.clone(), p, &sup) {
                return Ok(Some(cx));
            }
        }
        // Any healthy upper bound lies above the supremum.
        let mut wider = set.clone();
        wider.push(sample(ra, SampleKind::R, rng)?);
        let upper = theory_sup(ra, &wider)?;
        Ok(refinement_gap(lbl, &sup, &upper))
    }),
];

fn run_check(ra: &ReactiveAlphabet, name: &str, check: CheckFn, samples: u64, master: u64) -> Result<TheoryReport, TheoryError> {
    let mut rng = seed::rng(master, name, 0);
    for i in 0..samples {
        if let Some(cx) = check(ra, &mut rng, i)? {
            return Ok(TheoryReport::refuted(name, i + 1, cx));
        }
    }
    Ok(TheoryReport::verified(name, samples))
}

/// Every theorem of the theory (idempotence, commutation, monotonicity,
/// trace contribution, sequential decomposition and closure, lattice
/// bounds) on `samples` random cases each.
///
/// Checks run concurrently, each with a generator derived from `master` and
/// its own name, so the result does not depend on scheduling.
pub fn theory_suite(ra: &ReactiveAlphabet, samples: u64, master: u64) -> Result<Vec<TheoryReport>, TheoryError> {
    CHECKS
        .par_iter()
        .map(|&(name, check)| run_check(ra, name, check, samples, master))
        .collect()
}

/// Q1, Q2 and Q3 on `samples` random healthy sets `A` (`1 ≤ |A| ≤ 3`) and
/// healthy `P`, `Q`.
pub fn quantale_suite(ra: &ReactiveAlphabet, samples: u64, master: u64) -> Result<Vec<TheoryReport>, TheoryError> {
    let mut rng = seed::rng(master, "quantale", 0);
    let mut failures: [Option<TheoryReport>; 3] = [None, None, None];
    let names = ["Q1", "Q2", "Q3"];
    for i in 0..samples {
        let set = random_set(ra, &mut rng)?;
        let p = sample(ra, SampleKind::R, &mut rng)?;
        let q = sample(ra, SampleKind::R, &mut rng)?;
        for (k, report) in check_quantale(ra, &set, &p, &q)?.into_iter().enumerate() {
            if failures[k].is_none() && !report.verified {
                let lbl = format!("sample {i}");
                let cx = from_report(lbl, report.clone()).expect("unverified reports carry a reason");
                failures[k] = Some(TheoryReport { cases: i + 1, ..TheoryReport::refuted(names[k], i + 1, cx) }
                    .with_note(report.note.unwrap_or_default()));
            }
        }
    }
    Ok(failures
        .into_iter()
        .zip(names)
        .map(|(f, name)| {
            let report = f.unwrap_or_else(|| TheoryReport::verified(name, samples));
            if name == "Q3" && report.note.is_none() {
                report.with_note(super::theorems::Q3_NOTE)
            } else {
                report
            }
        })
        .collect())
}

/// The exhaustive tier: a two-trace universe `{ε, t}` with no program
/// variables (16 bindings) and every one of its 2¹⁶ predicates.
pub fn micro_tier(traces: Arc<Domain>) -> Result<Vec<TheoryReport>, TheoryError> {
    let ra = ReactiveAlphabet::new(traces, &[])?;
    let alpha = ra.alphabet().clone();
    let size = alpha.size();
    if size > 20 {
        return Err(TheoryError::Unsupported(format!(
            "the exhaustive tier needs a universe of at most 20 bindings, found {size}"
        )));
    }
    let count: u64 = 1 << size;
    let predicate = |mask: u64| {
        let mut rows = FixedBitSet::with_capacity(size);
        for i in 0..size {
            if mask >> i & 1 == 1 {
                rows.insert(i);
            }
        }
        Predicate::from_rows(&alpha, rows)
    };
    let describe = |mask: u64| format!("predicate {mask:#06x}");
    type Law = fn(&ReactiveAlphabet, &Predicate) -> Result<Option<(Predicate, Predicate)>, TheoryError>;
    let laws: [(&str, Law); 4] = [
        ("R idempotence (exhaustive)", |ra, p| {
            let once = r(ra, p)?;
            Ok(Some((r(ra, &once)?, once)))
        }),
        ("R1-R2c commutation (exhaustive)", |ra, p| {
            Ok(Some((r1(ra, &r2c(ra, p)?)?, r2c(ra, &r1(ra, p)?)?)))
        }),
        ("R3 idempotence (exhaustive)", |ra, p| {
            let once = r3(ra, p)?;
            Ok(Some((r3(ra, &once)?, once)))
        }),
        ("Trace contribution (exhaustive)", |ra, p| {
            Ok(Some((contribution_form(ra, p)?, r1_r2c(ra, p)?)))
        }),
    ];
    laws.par_iter()
        .map(|&(name, law)| {
            for mask in 0..count {
                let p = predicate(mask);
                if let Some((lhs, rhs)) = law(&ra, &p)? {
                    if let Some(cx) = compare(&describe(mask), &lhs, &rhs) {
                        return Ok(TheoryReport::refuted(name, mask + 1, cx));
                    }
                }
            }
            Ok(TheoryReport::verified(name, count))
        })
        .collect()
}
