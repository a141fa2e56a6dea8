use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::{next_store_id, BoolFnError, Engine, Func, Op, Var, VarSet, VarTable};

/// Largest vocabulary a truth-table store accepts.
pub const MAX_TABLE_VARS: usize = 20;

struct Inner {
    table: VarTable,
    capacity: usize,
    words: usize,
    tail_mask: u64,
    funcs: Vec<Rc<[u64]>>,
    index: HashMap<Rc<[u64]>, u32>,
}

impl Inner {
    fn intern(&mut self, mut bits: Vec<u64>) -> u32 {
        if let Some(last) = bits.last_mut() {
            *last &= self.tail_mask;
        }
        let bits: Rc<[u64]> = bits.into();
        if let Some(&id) = self.index.get(&bits) {
            return id;
        }
        let id = self.funcs.len() as u32;
        self.funcs.push(bits.clone());
        self.index.insert(bits, id);
        id
    }

    fn rows(&self) -> usize {
        1usize << self.capacity
    }

    fn bit(bits: &[u64], row: usize) -> bool {
        bits[row >> 6] >> (row & 63) & 1 == 1
    }

    fn intern_rows(&mut self, f: impl Fn(usize) -> bool) -> u32 {
        let mut bits = vec![0u64; self.words];
        for row in 0..self.rows() {
            if f(row) {
                bits[row >> 6] |= 1 << (row & 63);
            }
        }
        self.intern(bits)
    }

    fn cofactor(&mut self, f: u32, v: usize, value: bool) -> u32 {
        let src = self.funcs[f as usize].clone();
        let bit = 1usize << v;
        self.intern_rows(|row| {
            let r = if value { row | bit } else { row & !bit };
            Self::bit(&src, r)
        })
    }
}

/// Dense truth-table store over a fixed maximum vocabulary.
///
/// Every function is a bit vector with one bit per assignment of the first
/// `capacity` variables; row `r` assigns variable `j` the `j`-th bit of `r`.
pub struct TruthTable {
    id: u32,
    inner: RefCell<Inner>,
}

impl TruthTable {
    pub fn with_capacity(capacity: usize) -> Result<Self, BoolFnError> {
        if capacity > MAX_TABLE_VARS {
            return Err(BoolFnError::CapExceeded { requested: capacity, cap: MAX_TABLE_VARS });
        }
        let rows = 1usize << capacity;
        let words = rows.div_ceil(64);
        let tail_mask = if rows >= 64 { u64::MAX } else { (1u64 << rows) - 1 };
        let mut inner = Inner {
            table: VarTable::new(),
            capacity,
            words,
            tail_mask,
            funcs: Vec::new(),
            index: HashMap::new(),
        };
        inner.intern(vec![0; words]);
        inner.intern(vec![u64::MAX; words]);
        Ok(TruthTable { id: next_store_id(), inner: RefCell::new(inner) })
    }

    pub fn capacity(&self) -> usize {
        self.inner.borrow().capacity
    }

    fn wrap(&self, id: u32) -> Func {
        Func { store: self.id, id }
    }

    fn assert_own(&self, f: Func) {
        assert_eq!(f.store, self.id, "function handle used with a foreign store");
    }

    fn check_var(&self, v: Var) -> Result<(), BoolFnError> {
        if self.inner.borrow().table.contains(v) {
            Ok(())
        } else {
            Err(BoolFnError::UnknownIndex(v.0))
        }
    }

    fn room(&self, inner: &Inner) -> Result<(), BoolFnError> {
        if inner.table.len() >= inner.capacity {
            Err(BoolFnError::CapExceeded { requested: inner.table.len() + 1, cap: inner.capacity })
        } else {
            Ok(())
        }
    }
}

impl Engine for TruthTable {
    fn store_id(&self) -> u32 {
        self.id
    }

    fn with_table<R>(&self, f: impl FnOnce(&VarTable) -> R) -> R {
        f(&self.inner.borrow().table)
    }

    fn declare(&self, name: &str) -> Result<Var, BoolFnError> {
        let mut inner = self.inner.borrow_mut();
        if inner.table.lookup(name).is_none() {
            self.room(&inner)?;
        }
        inner.table.declare(name)
    }

    fn fresh(&self, name: &str) -> Result<Var, BoolFnError> {
        let mut inner = self.inner.borrow_mut();
        let full = format!("{}{name}", super::FRESH_PREFIX);
        if let Some(v) = inner.table.lookup(&full) {
            return Ok(v);
        }
        self.room(&inner)?;
        Ok(inner.table.fresh(name))
    }

    fn constant(&self, value: bool) -> Func {
        self.wrap(if value { 1 } else { 0 })
    }

    fn var(&self, v: Var) -> Result<Func, BoolFnError> {
        self.check_var(v)?;
        let bit = 1usize << v.index();
        let id = self.inner.borrow_mut().intern_rows(|row| row & bit != 0);
        Ok(self.wrap(id))
    }

    fn not(&self, f: Func) -> Func {
        self.assert_own(f);
        let mut inner = self.inner.borrow_mut();
        let bits = inner.funcs[f.id as usize].iter().map(|w| !w).collect();
        let id = inner.intern(bits);
        self.wrap(id)
    }

    fn apply(&self, op: Op, f: Func, g: Func) -> Func {
        self.assert_own(f);
        self.assert_own(g);
        let mut inner = self.inner.borrow_mut();
        let a = inner.funcs[f.id as usize].clone();
        let b = inner.funcs[g.id as usize].clone();
        let bits = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| match op {
                Op::And => x & y,
                Op::Or => x | y,
                Op::Xor => x ^ y,
                Op::Implies => !x | y,
                Op::Iff => !(x ^ y),
            })
            .collect();
        let id = inner.intern(bits);
        self.wrap(id)
    }

    fn cofactor(&self, f: Func, v: Var, value: bool) -> Result<Func, BoolFnError> {
        self.check(f)?;
        self.check_var(v)?;
        let id = self.inner.borrow_mut().cofactor(f.id, v.index(), value);
        Ok(self.wrap(id))
    }

    fn exists(&self, vars: &VarSet, f: Func) -> Result<Func, BoolFnError> {
        self.check(f)?;
        self.with_table(|t| t.check_set(vars))?;
        let mut acc = f;
        for v in vars.iter() {
            let lo = self.cofactor(acc, v, false)?;
            let hi = self.cofactor(acc, v, true)?;
            acc = self.or(lo, hi);
        }
        Ok(acc)
    }

    fn rename(&self, f: Func, mapping: &[(Var, Var)]) -> Result<Func, BoolFnError> {
        self.check(f)?;
        let mut sources = VarSet::new();
        let mut targets = VarSet::new();
        for &(from, to) in mapping {
            self.check_var(from)?;
            self.check_var(to)?;
            if !sources.insert(from) || !targets.insert(to) {
                return Err(BoolFnError::NonInjective);
            }
        }
        let support = self.support(f);
        if let Some(t) = targets.iter().find(|t| support.contains(*t) && !sources.contains(*t)) {
            return Err(BoolFnError::TargetCollision(self.var_name(t)));
        }
        let mut inner = self.inner.borrow_mut();
        let src = inner.funcs[f.id as usize].clone();
        let pairs: Vec<(usize, usize)> = mapping.iter().map(|(a, b)| (a.index(), b.index())).collect();
        let id = inner.intern_rows(|row| {
            let mut r = row;
            for &(from, to) in &pairs {
                let bit = (row >> to) & 1;
                r = (r & !(1 << from)) | (bit << from);
            }
            Inner::bit(&src, r)
        });
        Ok(self.wrap(id))
    }

    fn support(&self, f: Func) -> VarSet {
        self.assert_own(f);
        let n = self.num_vars();
        (0..n as u32)
            .map(Var)
            .filter(|&v| {
                let lo = self.cofactor(f, v, false).expect("declared variable");
                let hi = self.cofactor(f, v, true).expect("declared variable");
                lo != hi
            })
            .collect()
    }

    fn eval(&self, f: Func, assignment: &dyn Fn(Var) -> bool) -> bool {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let row = (0..inner.table.len())
            .filter(|&j| assignment(Var(j as u32)))
            .fold(0usize, |acc, j| acc | (1 << j));
        Inner::bit(&inner.funcs[f.id as usize], row)
    }

    fn sat_count(&self, f: Func, over: &VarSet) -> u128 {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let ones: u128 = inner.funcs[f.id as usize].iter().map(|w| w.count_ones() as u128).sum();
        ones >> (inner.capacity - over.len())
    }

    fn size(&self, f: Func) -> usize {
        self.assert_own(f);
        self.inner.borrow().words
    }
}
