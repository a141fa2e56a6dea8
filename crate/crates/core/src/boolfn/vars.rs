use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::BoolFnError;

/// Prefix reserved for variables introduced by the engine itself.
pub const FRESH_PREFIX: char = '@';

/// Dense variable index; also its position in the global order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Ordered set of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet(BTreeSet<Var>);

impl VarSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: Var) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: Var) -> bool {
        self.0.remove(&v)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Var> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<Var> {
        self.0.iter().next_back().copied()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Membership bitmap indexed by variable, `len` entries long.
    pub fn mask(&self, len: usize) -> Vec<bool> {
        let mut m = vec![false; len];
        for v in self.iter() {
            if v.index() < len {
                m[v.index()] = true;
            }
        }
        m
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = Var;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Var>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Registry of variable names. Indices are dense and never reordered.
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn contains(&self, v: Var) -> bool {
        v.index() < self.names.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.names.len() as u32).map(Var)
    }

    /// Declares a user variable. Names may not use the reserved prefix.
    pub fn declare(&mut self, name: &str) -> Result<Var, BoolFnError> {
        if name.starts_with(FRESH_PREFIX) {
            return Err(BoolFnError::ReservedName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(BoolFnError::DuplicateVariable(name.to_string()));
        }
        Ok(self.push(name.to_string()))
    }

    /// Interns the reserved variable `@<name>`.
    pub fn fresh(&mut self, name: &str) -> Var {
        let full = format!("{FRESH_PREFIX}{name}");
        if let Some(v) = self.index.get(&full) {
            return *v;
        }
        self.push(full)
    }

    fn push(&mut self, name: String) -> Var {
        let v = Var(self.names.len() as u32);
        self.index.insert(name.clone(), v);
        self.names.push(name);
        v
    }

    pub fn check_set(&self, vars: &VarSet) -> Result<(), BoolFnError> {
        match vars.max() {
            Some(v) if !self.contains(v) => Err(BoolFnError::UnknownIndex(v.0)),
            _ => Ok(()),
        }
    }
}
