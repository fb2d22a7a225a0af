//! Extensional predicates and the relational operators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::alphabet::{Alphabet, Binding, Role, VarId};
use super::value::Value;
use super::RelError;

/// A predicate over a finite alphabet: the set of bindings that satisfy it.
#[derive(Clone, Debug)]
pub struct Predicate {
    alphabet: Arc<Alphabet>,
    rows: FixedBitSet,
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && self.rows == other.rows
    }
}

impl Eq for Predicate {}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Calls `f` on every binding, in row order, with its decoded digits.
fn for_each_binding(alphabet: &Alphabet, mut f: impl FnMut(usize, &[u32])) {
    let n = alphabet.vars().len();
    let radix: Vec<u32> = alphabet.ids().map(|id| alphabet.radix(id) as u32).collect();
    let mut digits = vec![0u32; n];
    for row in 0..alphabet.size() {
        f(row, &digits);
        for i in (0..n).rev() {
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

impl Predicate {
    pub fn truth(alphabet: &Arc<Alphabet>) -> Self {
        let mut rows = FixedBitSet::with_capacity(alphabet.size());
        rows.insert_range(..);
        Predicate { alphabet: alphabet.clone(), rows }
    }

    pub fn falsity(alphabet: &Arc<Alphabet>) -> Self {
        Predicate {
            alphabet: alphabet.clone(),
            rows: FixedBitSet::with_capacity(alphabet.size()),
        }
    }

    /// The bindings on which `f` holds.
    pub fn from_fn(alphabet: &Arc<Alphabet>, mut f: impl FnMut(&Binding) -> bool) -> Self {
        let mut rows = FixedBitSet::with_capacity(alphabet.size());
        for_each_binding(alphabet, |row, digits| {
            if f(&Binding::new(alphabet, digits)) {
                rows.insert(row);
            }
        });
        Predicate { alphabet: alphabet.clone(), rows }
    }

    /// Like [`Predicate::from_fn`], with `f` seeing only the digits of
    /// `vars`. `f` runs once per combination of their values rather than
    /// once per binding.
    pub fn cylinder(alphabet: &Arc<Alphabet>, vars: &[VarId], mut f: impl FnMut(&[u32]) -> bool) -> Self {
        let mut local_strides = vec![0usize; vars.len()];
        let mut size = 1usize;
        for i in (0..vars.len()).rev() {
            local_strides[i] = size;
            size *= alphabet.radix(vars[i]);
        }
        let mut table = FixedBitSet::with_capacity(size);
        let mut local = vec![0u32; vars.len()];
        for k in 0..size {
            let mut rest = k;
            for i in (0..vars.len()).rev() {
                let r = alphabet.radix(vars[i]);
                local[i] = (rest % r) as u32;
                rest /= r;
            }
            if f(&local) {
                table.insert(k);
            }
        }
        let mut rows = FixedBitSet::with_capacity(alphabet.size());
        for_each_binding(alphabet, |row, digits| {
            let k: usize = vars
                .iter()
                .zip(&local_strides)
                .map(|(v, s)| digits[v.index()] as usize * s)
                .sum();
            if table.contains(k) {
                rows.insert(row);
            }
        });
        Predicate { alphabet: alphabet.clone(), rows }
    }

    pub fn from_rows(alphabet: &Arc<Alphabet>, rows: FixedBitSet) -> Self {
        assert_eq!(rows.len(), alphabet.size(), "row set does not match alphabet");
        Predicate { alphabet: alphabet.clone(), rows }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rows(&self) -> &FixedBitSet {
        &self.rows
    }

    pub fn contains(&self, row: usize) -> bool {
        self.rows.contains(row)
    }

    pub fn count(&self) -> usize {
        self.rows.count_ones(..)
    }

    pub fn is_false(&self) -> bool {
        self.rows.is_clear()
    }

    pub fn is_true(&self) -> bool {
        self.rows.is_full()
    }

    pub fn row_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.ones()
    }

    /// The named values of a row.
    pub fn binding(&self, row: usize) -> BTreeMap<String, Value> {
        self.alphabet.describe(row).into_iter().collect()
    }

    fn check(&self, other: &Predicate) -> Result<(), RelError> {
        if same_alphabet(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(RelError::AlphabetMismatch)
        }
    }

    pub fn and(&self, other: &Predicate) -> Result<Predicate, RelError> {
        self.check(other)?;
        let mut rows = self.rows.clone();
        rows.intersect_with(&other.rows);
        Ok(Predicate { alphabet: self.alphabet.clone(), rows })
    }

    pub fn or(&self, other: &Predicate) -> Result<Predicate, RelError> {
        self.check(other)?;
        let mut rows = self.rows.clone();
        rows.union_with(&other.rows);
        Ok(Predicate { alphabet: self.alphabet.clone(), rows })
    }

    pub fn not(&self) -> Predicate {
        let mut rows = self.rows.clone();
        rows.toggle_range(..);
        Predicate { alphabet: self.alphabet.clone(), rows }
    }

    pub fn implies(&self, other: &Predicate) -> Result<Predicate, RelError> {
        self.not().or(other)
    }

    /// True when membership depends only on the unprimed variables.
    pub fn is_condition(&self) -> bool {
        let a = self.alphabet.after_size();
        (0..self.alphabet.before_size()).all(|s| {
            let block = s * a;
            let first = self.rows.contains(block);
            (block..block + a).all(|r| self.rows.contains(r) == first)
        })
    }

    /// `P ◁ b ▷ Q = (b ∧ P) ∨ (¬b ∧ Q)` where `b` mentions no primed
    /// variable.
    pub fn cond(p: &Predicate, b: &Predicate, q: &Predicate) -> Result<Predicate, RelError> {
        p.check(b)?;
        p.check(q)?;
        if !b.is_condition() {
            return Err(RelError::ConditionMentionsAfterVars);
        }
        b.and(p)?.or(&b.not().and(q)?)
    }

    /// Relational composition `P ; Q`: some intermediate state is an after
    /// state of `P` and a before state of `Q`.
    pub fn seq(&self, other: &Predicate) -> Result<Predicate, RelError> {
        self.check(other)?;
        if !self.alphabet.is_homogeneous() {
            return Err(RelError::NotHomogeneous);
        }
        let n = self.alphabet.after_size();
        let blocks: Vec<Vec<usize>> = (0..n)
            .map(|m| (0..n).filter(|&t| other.rows.contains(m * n + t)).collect())
            .collect();
        let mut rows = FixedBitSet::with_capacity(self.alphabet.size());
        for r in self.rows.ones() {
            let (s, m) = (r / n, r % n);
            for &t in &blocks[m] {
                rows.insert(s * n + t);
            }
        }
        Ok(Predicate { alphabet: self.alphabet.clone(), rows })
    }

    /// `II`: every primed variable equals its unprimed twin. Input
    /// variables are unconstrained.
    pub fn skip(alphabet: &Arc<Alphabet>) -> Predicate {
        let pairs: Vec<(VarId, VarId)> = alphabet
            .ids()
            .filter(|&id| alphabet.var(id).role() == Role::Before)
            .map(|id| (id, alphabet.var(id).twin().expect("before variables have twins")))
            .collect();
        Predicate::from_fn(alphabet, |b| pairs.iter().all(|&(x, y)| b.digit(x) == b.digit(y)))
    }

    /// `x := e`: `x' = e(before)` and every other primed variable equals its
    /// twin.
    pub fn assign(
        alphabet: &Arc<Alphabet>,
        var: &str,
        e: impl Fn(&Binding) -> Result<Value, RelError>,
    ) -> Result<Predicate, RelError> {
        let x = alphabet.lookup(var)?;
        let x_after = match alphabet.var(x).role() {
            Role::Before => alphabet.var(x).twin().expect("before variables have twins"),
            _ => return Err(RelError::UnknownVariable(var.to_string())),
        };
        let domain = alphabet.domain(x).clone();
        let mut err = None;
        let p = Predicate::from_fn(alphabet, |b| {
            let mut ok = alphabet
                .ids()
                .filter(|&id| alphabet.var(id).role() == Role::Before && id != x)
                .all(|id| b.digit(id) == b.digit(alphabet.var(id).twin().unwrap()));
            if ok {
                match e(b) {
                    Ok(v) => match domain.index_of(&v) {
                        Some(i) => ok = b.digit(x_after) == i,
                        None => {
                            err.get_or_insert(RelError::DomainViolation {
                                var: var.to_string(),
                                value: v.to_string(),
                            });
                        }
                    },
                    Err(e) => {
                        err.get_or_insert(e);
                    }
                }
            }
            ok
        });
        match err {
            Some(e) => Err(e),
            None => Ok(p),
        }
    }

    /// `∃ x • P`: the result no longer depends on `x`.
    pub fn exists(&self, var: VarId) -> Predicate {
        let a = &self.alphabet;
        let radix = a.radix(var) as u32;
        let mut rows = FixedBitSet::with_capacity(a.size());
        for r in self.rows.ones() {
            for d in 0..radix {
                rows.insert(a.with_digit(r, var, d));
            }
        }
        Predicate { alphabet: a.clone(), rows }
    }

    /// Substitution at the level of value indices: binding `b` is in the
    /// result iff `f(b)` is in `self`. `f` writes the substituted binding
    /// into its second argument, which starts as a copy of the first.
    pub fn remap(&self, f: impl Fn(&[u32], &mut [u32])) -> Predicate {
        let a = &self.alphabet;
        let mut rows = FixedBitSet::with_capacity(a.size());
        let mut target = vec![0u32; a.vars().len()];
        for_each_binding(a, |row, digits| {
            target.copy_from_slice(digits);
            f(digits, &mut target);
            if self.rows.contains(a.encode(&target)) {
                rows.insert(row);
            }
        });
        Predicate { alphabet: a.clone(), rows }
    }

    /// Simultaneous substitution `P[e₁,…/x₁,…]`: every `eᵢ` is evaluated on
    /// the original binding.
    pub fn substitute(&self, subst: &[(VarId, &SubstFn<'_>)]) -> Result<Predicate, RelError> {
        let a = &self.alphabet;
        let mut rows = FixedBitSet::with_capacity(a.size());
        let mut target = vec![0u32; a.vars().len()];
        let mut err = None;
        for_each_binding(a, |row, digits| {
            if err.is_some() {
                return;
            }
            target.copy_from_slice(digits);
            let b = Binding::new(a, digits);
            for (var, f) in subst {
                match f(&b).and_then(|v| {
                    a.domain(*var).index_of(&v).ok_or_else(|| RelError::DomainViolation {
                        var: a.var(*var).name().to_string(),
                        value: v.to_string(),
                    })
                }) {
                    Ok(i) => target[var.index()] = i,
                    Err(e) => {
                        err = Some(e);
                        return;
                    }
                }
            }
            if self.rows.contains(a.encode(&target)) {
                rows.insert(row);
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Predicate { alphabet: a.clone(), rows }),
        }
    }

    /// `self ⊑ other`: `other` is at least as strong, i.e. its rows are a
    /// subset of `self`'s.
    pub fn refines(&self, other: &Predicate) -> Result<bool, RelError> {
        self.check(other)?;
        Ok(other.rows.is_subset(&self.rows))
    }

    /// `⨅ A`, the union of the row sets. The infimum of no predicates is the
    /// top of the refinement lattice, `false`.
    pub fn lattice_inf(alphabet: &Arc<Alphabet>, set: &[Predicate]) -> Result<Predicate, RelError> {
        let mut acc = Predicate::falsity(alphabet);
        for p in set {
            acc = acc.or(p)?;
        }
        Ok(acc)
    }

    /// `⨆ A`, the intersection of the row sets. The supremum of no
    /// predicates is the bottom of the refinement lattice, `true`.
    pub fn lattice_sup(alphabet: &Arc<Alphabet>, set: &[Predicate]) -> Result<Predicate, RelError> {
        let mut acc = Predicate::truth(alphabet);
        for p in set {
            acc = acc.and(p)?;
        }
        Ok(acc)
    }

    /// The ⊑-least fixed point of `f`, by iteration from `true`.
    ///
    /// Each iterate must refine the previous one; anything else means `f` is
    /// not monotone and is reported as [`RelError::NonMonotoneDetected`].
    pub fn lfp(
        alphabet: &Arc<Alphabet>,
        f: impl FnMut(&Predicate) -> Result<Predicate, RelError>,
    ) -> Result<Predicate, RelError> {
        iterate(Predicate::truth(alphabet), f, |prev, next| prev.refines(next))
    }

    /// The ⊑-greatest fixed point of `f`, by iteration from `false`.
    pub fn gfp(
        alphabet: &Arc<Alphabet>,
        f: impl FnMut(&Predicate) -> Result<Predicate, RelError>,
    ) -> Result<Predicate, RelError> {
        iterate(Predicate::falsity(alphabet), f, |prev, next| next.refines(prev))
    }
}

/// A substitution right-hand side.
pub type SubstFn<'a> = dyn Fn(&Binding) -> Result<Value, RelError> + 'a;

fn iterate(
    start: Predicate,
    mut f: impl FnMut(&Predicate) -> Result<Predicate, RelError>,
    ordered: impl Fn(&Predicate, &Predicate) -> Result<bool, RelError>,
) -> Result<Predicate, RelError> {
    let mut x = start;
    // A strictly monotone chain in a lattice of row sets has at most
    // size + 1 elements.
    for iteration in 0..=x.alphabet.size() + 1 {
        let next = f(&x)?;
        if next == x {
            return Ok(x);
        }
        if !ordered(&x, &next)? {
            return Err(RelError::NonMonotoneDetected { iteration });
        }
        x = next;
    }
    Err(RelError::NonMonotoneDetected { iteration: x.alphabet.size() + 2 })
}

/// Spot-checks monotonicity of `f` on the given ⊑-ordered pairs. Returns
/// the index of the first pair whose images are not ordered.
pub fn find_monotonicity_violation(
    pairs: &[(Predicate, Predicate)],
    f: impl Fn(&Predicate) -> Result<Predicate, RelError>,
) -> Result<Option<usize>, RelError> {
    for (i, (p, q)) in pairs.iter().enumerate() {
        if p.refines(q)? && !f(p)?.refines(&f(q)?)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.alphabet;
        for r in self.rows.ones() {
            let parts: Vec<String> = a
                .describe(r)
                .into_iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Domain;

    fn bool_alpha() -> Arc<Alphabet> {
        Alphabet::builder().var("w", Arc::new(Domain::bool())).build().unwrap()
    }

    fn int_alpha() -> Arc<Alphabet> {
        Alphabet::builder()
            .var("x", Arc::new(Domain::int_range(0, 2).unwrap()))
            .build()
            .unwrap()
    }

    fn eq_after(a: &Arc<Alphabet>, var: &str, v: Value) -> Predicate {
        let id = a.lookup(var).unwrap();
        Predicate::from_fn(a, |b| *b.get(id) == v)
    }

    #[test]
    fn contradictory_waits_are_empty() {
        let a = bool_alpha();
        let t = eq_after(&a, "w'", Value::Bool(true));
        let f = eq_after(&a, "w'", Value::Bool(false));
        assert_eq!(a.size(), 4);
        assert!(t.and(&f).unwrap().is_false());
        assert_eq!(t.and(&t.not()).unwrap(), Predicate::falsity(&a));
        assert!(t.or(&Predicate::truth(&a)).unwrap().is_true());
    }

    #[test]
    fn skip_is_identity() {
        let a = bool_alpha();
        let ii = Predicate::skip(&a);
        assert_eq!(ii.count(), 2);
        assert_eq!(ii.seq(&ii).unwrap(), ii);
    }

    #[test]
    fn assignments_compose() {
        let a = int_alpha();
        let x = a.lookup("x").unwrap();
        let one = Predicate::assign(&a, "x", |_| Ok(Value::Int(1))).unwrap();
        let inc = Predicate::assign(&a, "x", |b| match b.get(x) {
            Value::Int(i) => Ok(Value::Int((i + 1).min(2))),
            _ => unreachable!(),
        })
        .unwrap();
        let two = Predicate::assign(&a, "x", |_| Ok(Value::Int(2))).unwrap();
        assert_eq!(one.seq(&inc).unwrap(), two);
        let overflow = Predicate::assign(&a, "x", |b| match b.get(x) {
            Value::Int(i) => Ok(Value::Int(i + 1)),
            _ => unreachable!(),
        });
        assert!(matches!(overflow, Err(RelError::DomainViolation { .. })));
    }

    #[test]
    fn cond_rejects_primed_conditions() {
        let a = bool_alpha();
        let b = eq_after(&a, "w'", Value::Bool(true));
        let p = Predicate::truth(&a);
        assert_eq!(Predicate::cond(&p, &b, &p), Err(RelError::ConditionMentionsAfterVars));
        let c = eq_after(&a, "w", Value::Bool(true));
        assert_eq!(Predicate::cond(&p, &c, &p).unwrap(), p);
    }

    #[test]
    fn refinement_and_bounds() {
        let a = int_alpha();
        let x1 = eq_after(&a, "x'", Value::Int(1));
        let x2 = eq_after(&a, "x'", Value::Int(2));
        let x0 = eq_after(&a, "x'", Value::Int(0));
        let x12 = x1.or(&x2).unwrap();
        assert!(x12.refines(&x1).unwrap());
        assert!(!x1.refines(&x12).unwrap());
        let x02 = x0.or(&x2).unwrap();
        assert_eq!(Predicate::lattice_sup(&a, &[x12.clone(), x02]).unwrap(), x2);
        assert_eq!(Predicate::lattice_inf(&a, &[x12.clone()]).unwrap(), x12);
        assert!(Predicate::lattice_inf(&a, &[]).unwrap().is_false());
        assert!(Predicate::lattice_sup(&a, &[]).unwrap().is_true());
    }

    #[test]
    fn fixed_points_follow_refinement_order() {
        let a = int_alpha();
        let p = eq_after(&a, "x'", Value::Int(1));
        assert!(Predicate::lfp(&a, |x| Ok(x.clone())).unwrap().is_true());
        assert!(Predicate::gfp(&a, |x| Ok(x.clone())).unwrap().is_false());
        assert_eq!(Predicate::lfp(&a, |_| Ok(p.clone())).unwrap(), p);
        assert_eq!(Predicate::lfp(&a, |x| x.and(&p)).unwrap(), p);
        assert!(Predicate::gfp(&a, |x| x.and(&p)).unwrap().is_false());
        assert_eq!(Predicate::gfp(&a, |x| x.or(&p)).unwrap(), p);
        let err = Predicate::lfp(&a, |x| Ok(x.not())).unwrap_err();
        assert!(matches!(err, RelError::NonMonotoneDetected { .. }));
    }

    #[test]
    fn exists_and_substitution() {
        let a = int_alpha();
        let x = a.lookup("x").unwrap();
        let xp = a.lookup("x'").unwrap();
        let p = eq_after(&a, "x'", Value::Int(1));
        assert_eq!(p.exists(x), p);
        assert!(p.exists(xp).is_true());
        assert!(Predicate::falsity(&a).exists(x).is_false());
        let swap_x: &SubstFn = &|b| Ok(b.get(xp).clone());
        let swap_xp: &SubstFn = &|b| Ok(b.get(x).clone());
        let q = Predicate::from_fn(&a, |b| matches!(b.get(x), Value::Int(0)) && matches!(b.get(xp), Value::Int(2)));
        let once = q.substitute(&[(x, swap_x), (xp, swap_xp)]).unwrap();
        assert_ne!(once, q);
        assert_eq!(once.substitute(&[(x, swap_x), (xp, swap_xp)]).unwrap(), q);
    }

    #[test]
    fn mismatched_alphabets() {
        let p = Predicate::truth(&bool_alpha());
        let q = Predicate::truth(&int_alpha());
        assert_eq!(p.and(&q), Err(RelError::AlphabetMismatch));
    }
}
