//! Canonical Boolean-function stores.
//!
//! A store owns a [`VarTable`] and hands out [`Func`] handles. Both backends
//! hash-cons their representation, so two handles from the same store are
//! equal iff the functions they denote are logically equivalent.
//!
//! * [`Bdd`]: reduced ordered binary decision diagrams with an operation cache.
//! * [`TruthTable`]: dense truth tables for small vocabularies, used as an
//!   independent oracle.

mod bdd;
mod table;
mod vars;

pub use bdd::Bdd;
pub use table::{TruthTable, MAX_TABLE_VARS};
pub use vars::{Var, VarSet, VarTable, FRESH_PREFIX};

use std::sync::atomic::{AtomicU32, Ordering};
use thiserror::Error;

/// Default bound on the number of variables a model enumeration may range over.
pub const DEFAULT_ENUM_CAP: usize = 24;

static NEXT_STORE: AtomicU32 = AtomicU32::new(1);

pub(crate) fn next_store_id() -> u32 {
    NEXT_STORE.fetch_add(1, Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolFnError {
    #[error("function handle belongs to store {found}, expected store {expected}")]
    StoreMismatch { expected: u32, found: u32 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable index {0} is not in the table")]
    UnknownIndex(u32),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable names starting with `{FRESH_PREFIX}` are reserved: `{0}`")]
    ReservedName(String),
    #[error("rename map is not injective")]
    NonInjective,
    #[error("rename target `{0}` already occurs in the function")]
    TargetCollision(String),
    /// A variable count, table capacity or world count above its limit.
    #[error("size {requested} exceeds the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },
}

/// Handle to a function inside one store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Func {
    pub(crate) store: u32,
    pub(crate) id: u32,
}

impl Func {
    pub fn store(self) -> u32 {
        self.store
    }
}

/// Binary connectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl Op {
    pub fn eval(self, a: bool, b: bool) -> bool {
        match self {
            Op::And => a && b,
            Op::Or => a || b,
            Op::Xor => a != b,
            Op::Implies => !a || b,
            Op::Iff => a == b,
        }
    }
}

/// Operations shared by every canonical function store.
///
/// Stores use interior mutability and are single-owner: they are not `Sync`,
/// and handles must not be mixed between stores. The unchecked combinators
/// panic on a foreign handle; [`Engine::try_apply`] reports it as an error.
pub trait Engine {
    fn store_id(&self) -> u32;

    /// Runs `f` with read access to the variable table.
    fn with_table<R>(&self, f: impl FnOnce(&VarTable) -> R) -> R;

    /// Appends a user variable to the table.
    fn declare(&self, name: &str) -> Result<Var, BoolFnError>;

    /// Returns the reserved variable `@<name>`, appending it if needed.
    fn fresh(&self, name: &str) -> Result<Var, BoolFnError>;

    fn constant(&self, value: bool) -> Func;

    fn var(&self, v: Var) -> Result<Func, BoolFnError>;

    fn not(&self, f: Func) -> Func;

    fn apply(&self, op: Op, f: Func, g: Func) -> Func;

    fn ite(&self, c: Func, t: Func, e: Func) -> Func {
        let nc = self.not(c);
        let a = self.apply(Op::And, c, t);
        let b = self.apply(Op::And, nc, e);
        self.apply(Op::Or, a, b)
    }

    /// `f` with `v` fixed to `value`.
    fn cofactor(&self, f: Func, v: Var, value: bool) -> Result<Func, BoolFnError>;

    /// Existential quantification (forgetting) of every variable in `vars`.
    fn exists(&self, vars: &VarSet, f: Func) -> Result<Func, BoolFnError>;

    fn forall(&self, vars: &VarSet, f: Func) -> Result<Func, BoolFnError> {
        let nf = self.not(f);
        let e = self.exists(vars, nf)?;
        Ok(self.not(e))
    }

    /// Simultaneous substitution of variables by variables.
    fn rename(&self, f: Func, mapping: &[(Var, Var)]) -> Result<Func, BoolFnError>;

    /// Variables the function depends on.
    fn support(&self, f: Func) -> VarSet;

    /// Evaluates `f` under a total assignment.
    fn eval(&self, f: Func, assignment: &dyn Fn(Var) -> bool) -> bool;

    /// Number of satisfying assignments over `over`, which must cover the support.
    fn sat_count(&self, f: Func, over: &VarSet) -> u128;

    /// Representation size (BDD nodes or table words); informational.
    fn size(&self, f: Func) -> usize;

    // ---- derived conveniences ----

    fn tt(&self) -> Func {
        self.constant(true)
    }

    fn ff(&self) -> Func {
        self.constant(false)
    }

    fn and(&self, f: Func, g: Func) -> Func {
        self.apply(Op::And, f, g)
    }

    fn or(&self, f: Func, g: Func) -> Func {
        self.apply(Op::Or, f, g)
    }

    fn implies(&self, f: Func, g: Func) -> Func {
        self.apply(Op::Implies, f, g)
    }

    fn iff(&self, f: Func, g: Func) -> Func {
        self.apply(Op::Iff, f, g)
    }

    fn and_all(&self, fs: impl IntoIterator<Item = Func>) -> Func {
        fs.into_iter().fold(self.tt(), |acc, f| self.and(acc, f))
    }

    fn or_all(&self, fs: impl IntoIterator<Item = Func>) -> Func {
        fs.into_iter().fold(self.ff(), |acc, f| self.or(acc, f))
    }

    fn check(&self, f: Func) -> Result<(), BoolFnError> {
        if f.store == self.store_id() {
            Ok(())
        } else {
            Err(BoolFnError::StoreMismatch { expected: self.store_id(), found: f.store })
        }
    }

    fn try_apply(&self, op: Op, f: Func, g: Func) -> Result<Func, BoolFnError> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.apply(op, f, g))
    }

    fn lookup(&self, name: &str) -> Result<Var, BoolFnError> {
        self.with_table(|t| t.lookup(name))
            .ok_or_else(|| BoolFnError::UnknownVariable(name.to_string()))
    }

    fn var_name(&self, v: Var) -> String {
        self.with_table(|t| t.name(v).to_string())
    }

    fn num_vars(&self) -> usize {
        self.with_table(|t| t.len())
    }

    fn is_valid(&self, f: Func) -> bool {
        f == self.tt()
    }

    fn is_sat(&self, f: Func) -> bool {
        f != self.ff()
    }

    fn entails(&self, f: Func, g: Func) -> bool {
        self.is_valid(self.implies(f, g))
    }

    /// `theta => (f <=> g)` is valid.
    fn equiv_under(&self, theta: Func, f: Func, g: Func) -> bool {
        let e = self.iff(f, g);
        self.entails(theta, e)
    }

    /// Conjunction fixing every variable of `over`: members true, others false.
    fn minterm(&self, over: &VarSet, true_vars: &VarSet) -> Result<Func, BoolFnError> {
        let mut acc = self.tt();
        for v in over.iter().rev() {
            let x = self.var(v)?;
            let lit = if true_vars.contains(v) { x } else { self.not(x) };
            acc = self.and(lit, acc);
        }
        Ok(acc)
    }
}

/// Satisfying assignments of `f` projected onto `over`, in lexicographic order
/// of the variable order (false before true, earliest variable most
/// significant). Variables of `f` outside `over` are forgotten first.
pub fn enumerate_models<'a, E: Engine>(
    engine: &'a E,
    f: Func,
    over: &VarSet,
    cap: usize,
) -> Result<ModelIter<'a, E>, BoolFnError> {
    if over.len() > cap {
        return Err(BoolFnError::CapExceeded { requested: over.len(), cap });
    }
    engine.check(f)?;
    let extra = engine.support(f).difference(over);
    let g = engine.exists(&extra, f)?;
    let order: Vec<Var> = over.iter().collect();
    let stack = if engine.is_sat(g) { vec![(0, g, Vec::new())] } else { Vec::new() };
    Ok(ModelIter { engine, order, stack })
}

/// Depth-first model stream produced by [`enumerate_models`].
pub struct ModelIter<'a, E: Engine> {
    engine: &'a E,
    order: Vec<Var>,
    stack: Vec<(usize, Func, Vec<Var>)>,
}

impl<E: Engine> Iterator for ModelIter<'_, E> {
    type Item = VarSet;

    fn next(&mut self) -> Option<VarSet> {
        while let Some((depth, f, trues)) = self.stack.pop() {
            if depth == self.order.len() {
                return Some(trues.into_iter().collect());
            }
            let v = self.order[depth];
            let hi = self.engine.cofactor(f, v, true).expect("variable from the table");
            let lo = self.engine.cofactor(f, v, false).expect("variable from the table");
            if self.engine.is_sat(hi) {
                let mut t = trues.clone();
                t.push(v);
                self.stack.push((depth + 1, hi, t));
            }
            if self.engine.is_sat(lo) {
                self.stack.push((depth + 1, lo, trues));
            }
        }
        None
    }
}
