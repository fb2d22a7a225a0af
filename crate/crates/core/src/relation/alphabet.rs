//! Alphabets: the variables of a relation and the layout of its bindings.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::domain::Domain;
use super::value::Value;
use super::RelError;

/// Largest number of bindings an alphabet may have.
pub const MAX_BINDINGS: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// An unprimed variable with a primed twin.
    Before,
    /// A primed variable.
    After,
    /// An unprimed variable without a twin, such as the indexed copies read
    /// by a merge predicate.
    Input,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    name: String,
    domain: Arc<Domain>,
    role: Role,
    twin: Option<VarId>,
}

impl VarDecl {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// The primed twin of a before-variable, or the unprimed twin of an
    /// after-variable.
    pub fn twin(&self) -> Option<VarId> {
        self.twin
    }
}

/// The variables of a relation, laid out for mixed-radix enumeration.
///
/// Unprimed variables (before and input) come first, in declaration order,
/// followed by the primed twins in the same order. The last variable varies
/// fastest, so a binding's index is `before_index · after_size + after_index`
/// and, when the alphabet is homogeneous, a before-state and its primed copy
/// have the same index within their halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    vars: Vec<VarDecl>,
    radix: Vec<usize>,
    strides: Vec<usize>,
    before_size: usize,
    after_size: usize,
    by_name: HashMap<String, VarId>,
}

#[derive(Default)]
pub struct AlphabetBuilder {
    entries: Vec<(String, Arc<Domain>, bool)>,
}

impl AlphabetBuilder {
    /// Declares `name` and its primed twin `name'`.
    pub fn var(mut self, name: &str, domain: Arc<Domain>) -> Self {
        self.entries.push((name.to_string(), domain, true));
        self
    }

    /// Declares an unprimed variable without a twin.
    pub fn input(mut self, name: &str, domain: Arc<Domain>) -> Self {
        self.entries.push((name.to_string(), domain, false));
        self
    }

    pub fn build(self) -> Result<Arc<Alphabet>, RelError> {
        let mut vars: Vec<VarDecl> = Vec::new();
        for (name, domain, _) in &self.entries {
            vars.push(VarDecl {
                name: name.clone(),
                domain: domain.clone(),
                role: Role::Input,
                twin: None,
            });
        }
        for (i, (name, domain, twinned)) in self.entries.iter().enumerate() {
            if *twinned {
                let after = VarId(vars.len());
                vars[i].role = Role::Before;
                vars[i].twin = Some(after);
                vars.push(VarDecl {
                    name: format!("{name}'"),
                    domain: domain.clone(),
                    role: Role::After,
                    twin: Some(VarId(i)),
                });
            }
        }
        let mut by_name = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if by_name.insert(v.name.clone(), VarId(i)).is_some() {
                return Err(RelError::DuplicateVariable(v.name.clone()));
            }
        }
        let radix: Vec<usize> = vars.iter().map(|v| v.domain.len()).collect();
        let mut strides = vec![0; vars.len()];
        let mut acc: usize = 1;
        for i in (0..vars.len()).rev() {
            strides[i] = acc;
            acc = acc
                .checked_mul(radix[i])
                .filter(|&n| n <= MAX_BINDINGS)
                .ok_or(RelError::UniverseTooLarge { size: usize::MAX, limit: MAX_BINDINGS })?;
        }
        let after_size: usize = vars
            .iter()
            .zip(&radix)
            .filter(|(v, _)| v.role == Role::After)
            .map(|(_, r)| r)
            .product();
        Ok(Arc::new(Alphabet {
            before_size: acc / after_size,
            after_size,
            vars,
            radix,
            strides,
            by_name,
        }))
    }
}

impl Alphabet {
    pub fn builder() -> AlphabetBuilder {
        AlphabetBuilder::default()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.vars.len()).map(VarId)
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id.0]
    }

    pub fn lookup(&self, name: &str) -> Result<VarId, RelError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| RelError::UnknownVariable(name.to_string()))
    }

    pub fn domain(&self, id: VarId) -> &Arc<Domain> {
        &self.vars[id.0].domain
    }

    /// Total number of bindings.
    pub fn size(&self) -> usize {
        self.before_size * self.after_size
    }

    pub fn before_size(&self) -> usize {
        self.before_size
    }

    pub fn after_size(&self) -> usize {
        self.after_size
    }

    /// True when every unprimed variable has a primed twin, so that
    /// sequential composition is defined.
    pub fn is_homogeneous(&self) -> bool {
        self.vars.iter().all(|v| v.role != Role::Input)
    }

    pub fn stride(&self, id: VarId) -> usize {
        self.strides[id.0]
    }

    pub fn radix(&self, id: VarId) -> usize {
        self.radix[id.0]
    }

    pub fn digit(&self, row: usize, id: VarId) -> u32 {
        ((row / self.strides[id.0]) % self.radix[id.0]) as u32
    }

    /// `row` with the digit of `id` replaced by `d`.
    pub fn with_digit(&self, row: usize, id: VarId, d: u32) -> usize {
        let old = self.digit(row, id) as usize;
        row - old * self.strides[id.0] + d as usize * self.strides[id.0]
    }

    pub fn decode(&self, row: usize, digits: &mut [u32]) {
        let mut rest = row;
        for i in (0..self.vars.len()).rev() {
            digits[i] = (rest % self.radix[i]) as u32;
            rest /= self.radix[i];
        }
    }

    pub fn encode(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| d as usize * s)
            .sum()
    }

    pub fn value(&self, row: usize, id: VarId) -> &Value {
        self.vars[id.0].domain.value(self.digit(row, id))
    }

    /// Named values of a binding, in alphabet order.
    pub fn describe(&self, row: usize) -> Vec<(String, Value)> {
        self.ids()
            .map(|id| (self.var(id).name.clone(), self.value(row, id).clone()))
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", v.name, v.domain)?;
        }
        f.write_str("}")
    }
}

/// Read access to one binding during enumeration.
pub struct Binding<'a> {
    alphabet: &'a Alphabet,
    digits: &'a [u32],
}

impl<'a> Binding<'a> {
    pub fn new(alphabet: &'a Alphabet, digits: &'a [u32]) -> Self {
        Binding { alphabet, digits }
    }

    pub fn digit(&self, id: VarId) -> u32 {
        self.digits[id.0]
    }

    pub fn digits(&self) -> &[u32] {
        self.digits
    }

    pub fn get(&self, id: VarId) -> &'a Value {
        self.alphabet.vars[id.0].domain.value(self.digits[id.0])
    }

    pub fn alphabet(&self) -> &'a Alphabet {
        self.alphabet
    }
}
