use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use super::ast::{Formula, HealthOp, Term, VarName};
use super::{parse, DslError};
use crate::merge::{self, MergeAlphabet, MergeHealthiness};
use crate::reactive::{Healthiness, ReactiveAlphabet};
use crate::relation::{Alphabet, Predicate, RelError, SubstFn, TraceValue, Value, ValueError, VarId};

/// What a formula denotes: a reactive predicate or a merge predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Reactive,
    Merge,
}

/// The universe formulas are evaluated in, plus named definitions.
#[derive(Debug)]
pub struct Env {
    reactive: ReactiveAlphabet,
    merge: OnceLock<MergeAlphabet>,
    definitions: BTreeMap<String, Formula>,
}

impl Env {
    pub fn new(reactive: ReactiveAlphabet) -> Self {
        Env { reactive, merge: OnceLock::new(), definitions: BTreeMap::new() }
    }

    pub fn define(&mut self, name: impl Into<String>, f: Formula) {
        self.definitions.insert(name.into(), f);
    }

    pub fn definitions(&self) -> &BTreeMap<String, Formula> {
        &self.definitions
    }

    pub fn reactive(&self) -> &ReactiveAlphabet {
        &self.reactive
    }

    /// The merge alphabet, built on first use.
    pub fn merge(&self) -> Result<&MergeAlphabet, DslError> {
        if let Some(m) = self.merge.get() {
            return Ok(m);
        }
        let m = MergeAlphabet::new(&self.reactive)?;
        Ok(self.merge.get_or_init(|| m))
    }

    /// Merge predicates are recognised by indexed variables or by `R2m` and
    /// `Rm`; everything else is reactive.
    pub fn sort_of(&self, f: &Formula) -> Result<Sort, DslError> {
        let merge = self.mentions_merge(f, &mut Vec::new())?;
        Ok(if merge { Sort::Merge } else { Sort::Reactive })
    }

    pub fn eval(&self, f: &Formula) -> Result<Predicate, DslError> {
        self.eval_as(f, self.sort_of(f)?)
    }

    pub fn eval_str(&self, text: &str) -> Result<Predicate, DslError> {
        self.eval(&parse(text)?)
    }

    pub fn eval_as(&self, f: &Formula, sort: Sort) -> Result<Predicate, DslError> {
        Walker { env: self, stack: Vec::new() }.eval(f, sort)
    }

    fn definition(&self, name: &str, stack: &[String]) -> Result<&Formula, DslError> {
        if stack.iter().any(|n| n == name) {
            return Err(DslError::Recursive(name.to_string()));
        }
        self.definitions.get(name).ok_or_else(|| DslError::Undefined(name.to_string()))
    }

    fn mentions_merge(&self, f: &Formula, stack: &mut Vec<String>) -> Result<bool, DslError> {
        Ok(match f {
            Formula::True | Formula::False | Formula::Skip | Formula::Par(..) => false,
            Formula::Named(n) => {
                let body = self.definition(n, stack)?;
                stack.push(n.clone());
                let m = self.mentions_merge(body, stack)?;
                stack.pop();
                m
            }
            Formula::Var(x) => x.is_indexed(),
            Formula::Eq(a, b) | Formula::Le(a, b) => term_is_merge(a) || term_is_merge(b),
            Formula::Assign(x, e) => x.is_indexed() || term_is_merge(e),
            Formula::Not(p) => self.mentions_merge(p, stack)?,
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) | Formula::Seq(p, q) => {
                self.mentions_merge(p, stack)? || self.mentions_merge(q, stack)?
            }
            Formula::Cond(p, b, q) => {
                self.mentions_merge(p, stack)? || self.mentions_merge(b, stack)? || self.mentions_merge(q, stack)?
            }
            Formula::Exists(x, p) => x.is_indexed() || self.mentions_merge(p, stack)?,
            Formula::Subst(p, terms, vars) => {
                vars.iter().any(VarName::is_indexed)
                    || terms.iter().any(term_is_merge)
                    || self.mentions_merge(p, stack)?
            }
            Formula::Apply(h, p) => matches!(h, HealthOp::R2m | HealthOp::Rm) || self.mentions_merge(p, stack)?,
        })
    }
}

fn term_is_merge(t: &Term) -> bool {
    match t {
        Term::Var(x) => x.is_indexed(),
        Term::Concat(a, b) | Term::Minus(a, b) => term_is_merge(a) || term_is_merge(b),
        _ => false,
    }
}

/// A term with its variables resolved and its literals checked.
enum Compiled {
    Var(VarId),
    Const(Value),
    Concat(Box<Compiled>, Box<Compiled>),
    Minus(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            Compiled::Var(x) => {
                if !out.contains(x) {
                    out.push(*x);
                }
            }
            Compiled::Const(_) => {}
            Compiled::Concat(a, b) | Compiled::Minus(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    fn value<'v>(&self, get: &impl Fn(VarId) -> &'v Value) -> Result<Value, RelError> {
        match self {
            Compiled::Var(x) => Ok(get(*x).clone()),
            Compiled::Const(v) => Ok(v.clone()),
            Compiled::Concat(a, b) => {
                let (a, b) = (a.value(get)?, b.value(get)?);
                Ok(Value::Trace(trace(&a)?.concat(trace(&b)?)?))
            }
            Compiled::Minus(a, b) => {
                let (a, b) = (a.value(get)?, b.value(get)?);
                Ok(Value::Trace(trace(&a)?.subtract(trace(&b)?)?))
            }
        }
    }
}

fn trace(v: &Value) -> Result<&TraceValue, ValueError> {
    v.as_trace().ok_or_else(|| ValueError::Type { expected: "trace".into(), found: v.kind().into() })
}

fn mismatch(a: &Value, b: &Value) -> RelError {
    ValueError::Type { expected: a.kind().into(), found: b.kind().into() }.into()
}

fn equal(a: &Value, b: &Value) -> Result<bool, RelError> {
    if a.kind() != b.kind() {
        return Err(mismatch(a, b));
    }
    Ok(a == b)
}

fn less_eq(a: &Value, b: &Value) -> Result<bool, RelError> {
    match (a, b) {
        (Value::Trace(x), Value::Trace(y)) => Ok(x.is_prefix_of(y)?),
        (Value::Int(x), Value::Int(y)) => Ok(x <= y),
        _ => Err(mismatch(a, b)),
    }
}

struct Walker<'e> {
    env: &'e Env,
    stack: Vec<String>,
}

impl Walker<'_> {
    fn alphabet(&self, sort: Sort) -> Result<Arc<Alphabet>, DslError> {
        Ok(match sort {
            Sort::Reactive => self.env.reactive.alphabet().clone(),
            Sort::Merge => self.env.merge()?.alphabet().clone(),
        })
    }

    fn lookup(&self, alpha: &Alphabet, x: &VarName) -> Result<VarId, DslError> {
        alpha.lookup(x.as_str()).map_err(|_| DslError::Scope(x.to_string()))
    }

    fn compile(&self, alpha: &Alphabet, t: &Term) -> Result<Compiled, DslError> {
        let traces = self.env.reactive.traces();
        let literal = |v: Value| {
            if traces.contains(&v) {
                Ok(Compiled::Const(v))
            } else {
                Err(DslError::Rel(RelError::DomainViolation { var: "trace literal".into(), value: v.to_string() }))
            }
        };
        Ok(match t {
            Term::Var(x) => Compiled::Var(self.lookup(alpha, x)?),
            Term::Eps => Compiled::Const(traces.value(self.env.reactive.table().empty()).clone()),
            Term::Seq(events) => literal(Value::from(crate::models::EventSeq::new(events.clone())))?,
            Term::Rat(r) => literal(Value::from(r.clone()))?,
            Term::Timed(tt) => literal(Value::from(tt.clone()))?,
            Term::Int(n) => Compiled::Const(Value::Int(*n)),
            Term::Bool(b) => Compiled::Const(Value::Bool(*b)),
            Term::Sym(s) => Compiled::Const(Value::Sym(s.clone())),
            Term::Concat(a, b) => Compiled::Concat(Box::new(self.compile(alpha, a)?), Box::new(self.compile(alpha, b)?)),
            Term::Minus(a, b) => Compiled::Minus(Box::new(self.compile(alpha, a)?), Box::new(self.compile(alpha, b)?)),
        })
    }

    fn compare(
        &self,
        alpha: &Arc<Alphabet>,
        a: &Term,
        b: &Term,
        op: fn(&Value, &Value) -> Result<bool, RelError>,
    ) -> Result<Predicate, DslError> {
        let (a, b) = (self.compile(alpha, a)?, self.compile(alpha, b)?);
        let mut vars = Vec::new();
        a.vars(&mut vars);
        b.vars(&mut vars);
        let mut err = None;
        let p = Predicate::cylinder(alpha, &vars, |digits| {
            if err.is_some() {
                return false;
            }
            let get = |id: VarId| {
                let k = vars.iter().position(|&v| v == id).expect("collected above");
                alpha.domain(id).value(digits[k])
            };
            match a.value(&get).and_then(|x| op(&x, &b.value(&get)?)) {
                Ok(r) => r,
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        match err {
            Some(e) => Err(e.into()),
            None => Ok(p),
        }
    }

    fn eval(&mut self, f: &Formula, sort: Sort) -> Result<Predicate, DslError> {
        let alpha = self.alphabet(sort)?;
        Ok(match f {
            Formula::True => Predicate::truth(&alpha),
            Formula::False => Predicate::falsity(&alpha),
            Formula::Skip => Predicate::skip(&alpha),
            Formula::Named(n) => {
                let body = self.env.definition(n, &self.stack)?;
                self.stack.push(n.clone());
                let p = self.eval(body, sort);
                self.stack.pop();
                p?
            }
            Formula::Var(x) => {
                let id = self.lookup(&alpha, x)?;
                if !alpha.domain(id).is_bool() {
                    return Err(RelError::from(ValueError::Type {
                        expected: "bool".into(),
                        found: alpha.domain(id).value(0).kind().into(),
                    })
                    .into());
                }
                Predicate::cylinder(&alpha, &[id], |d| alpha.domain(id).value(d[0]).as_bool() == Some(true))
            }
            Formula::Eq(a, b) => self.compare(&alpha, a, b, equal)?,
            Formula::Le(a, b) => self.compare(&alpha, a, b, less_eq)?,
            Formula::Assign(x, e) => {
                self.lookup(&alpha, x)?;
                let e = self.compile(&alpha, e)?;
                Predicate::assign(&alpha, x.as_str(), |b| e.value(&|id| b.get(id)))?
            }
            Formula::Not(p) => self.eval(p, sort)?.not(),
            Formula::And(p, q) => self.eval(p, sort)?.and(&self.eval(q, sort)?)?,
            Formula::Or(p, q) => self.eval(p, sort)?.or(&self.eval(q, sort)?)?,
            Formula::Implies(p, q) => self.eval(p, sort)?.implies(&self.eval(q, sort)?)?,
            Formula::Cond(p, b, q) => {
                let (p, b, q) = (self.eval(p, sort)?, self.eval(b, sort)?, self.eval(q, sort)?);
                Predicate::cond(&p, &b, &q)?
            }
            Formula::Exists(x, p) => {
                let id = self.lookup(&alpha, x)?;
                self.eval(p, sort)?.exists(id)
            }
            Formula::Subst(p, terms, vars) => {
                if terms.len() != vars.len() {
                    return Err(DslError::SubstitutionArity { terms: terms.len(), vars: vars.len() });
                }
                let body = self.eval(p, sort)?;
                let ids: Vec<VarId> = vars.iter().map(|x| self.lookup(&alpha, x)).collect::<Result<_, _>>()?;
                let compiled: Vec<Compiled> = terms.iter().map(|t| self.compile(&alpha, t)).collect::<Result<_, _>>()?;
                let fns: Vec<Box<SubstFn<'_>>> = compiled
                    .iter()
                    .map(|c| Box::new(move |b: &crate::relation::Binding| c.value(&|id| b.get(id))) as Box<SubstFn<'_>>)
                    .collect();
                let pairs: Vec<(VarId, &SubstFn<'_>)> = ids.iter().copied().zip(fns.iter().map(|f| &**f)).collect();
                body.substitute(&pairs)?
            }
            Formula::Apply(h, p) => {
                let p = self.eval(p, sort)?;
                match sort {
                    Sort::Reactive => {
                        let h = match h {
                            HealthOp::R1 => Healthiness::R1,
                            HealthOp::R2c => Healthiness::R2c,
                            HealthOp::R3 => Healthiness::R3,
                            HealthOp::R => Healthiness::R,
                            HealthOp::R2m | HealthOp::Rm => {
                                return Err(DslError::Sort(format!("{} applies to merge predicates", h.keyword())))
                            }
                        };
                        h.apply(&self.env.reactive, &p)?
                    }
                    Sort::Merge => {
                        let h = match h {
                            HealthOp::R1 => MergeHealthiness::R1,
                            HealthOp::R3 => MergeHealthiness::R3,
                            HealthOp::R2m => MergeHealthiness::R2m,
                            HealthOp::Rm => MergeHealthiness::Rm,
                            HealthOp::R2c | HealthOp::R => {
                                return Err(DslError::Sort(format!(
                                    "{} applies to reactive predicates, not merge predicates",
                                    h.keyword()
                                )))
                            }
                        };
                        h.apply(self.env.merge()?, &p)?
                    }
                }
            }
            Formula::Seq(p, q) => self.eval(p, sort)?.seq(&self.eval(q, sort)?)?,
            Formula::Par(p, m, q) => {
                if sort == Sort::Merge {
                    return Err(DslError::Sort("a parallel composition is not a merge predicate".into()));
                }
                let p = self.eval(p, Sort::Reactive)?;
                let m = self.eval(m, Sort::Merge)?;
                let q = self.eval(q, Sort::Reactive)?;
                merge::par_by_merge(self.env.merge()?, &p, &m, &q)?
            }
        })
    }
}
