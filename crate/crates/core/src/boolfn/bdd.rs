use std::cell::RefCell;
use std::collections::HashMap;

use super::{next_store_id, BoolFnError, Engine, Func, Op, Var, VarSet, VarTable};

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Default)]
struct Inner {
    table: VarTable,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    apply_cache: HashMap<(Op, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
    ite_cache: HashMap<(u32, u32, u32), u32>,
}

impl Inner {
    fn new() -> Self {
        let mut inner = Inner::default();
        inner.nodes.push(Node { var: TERMINAL_LEVEL, lo: FALSE, hi: FALSE });
        inner.nodes.push(Node { var: TERMINAL_LEVEL, lo: TRUE, hi: TRUE });
        inner
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    /// Cofactors of `n` with respect to the variable at `level`.
    fn split(&self, n: u32, level: u32) -> (u32, u32) {
        let node = self.nodes[n as usize];
        if node.var == level {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    fn not(&mut self, f: u32) -> u32 {
        match f {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let l = self.not(lo);
        let h = self.not(hi);
        let r = self.mk(var, l, h);
        self.not_cache.insert(f, r);
        self.not_cache.insert(r, f);
        r
    }

    fn terminal_case(&mut self, op: Op, f: u32, g: u32) -> Option<u32> {
        let r = match op {
            Op::And => match (f, g) {
                (FALSE, _) | (_, FALSE) => FALSE,
                (TRUE, x) | (x, TRUE) => x,
                _ if f == g => f,
                _ => return None,
            },
            Op::Or => match (f, g) {
                (TRUE, _) | (_, TRUE) => TRUE,
                (FALSE, x) | (x, FALSE) => x,
                _ if f == g => f,
                _ => return None,
            },
            Op::Xor => match (f, g) {
                (FALSE, x) | (x, FALSE) => x,
                (TRUE, x) | (x, TRUE) => self.not(x),
                _ if f == g => FALSE,
                _ => return None,
            },
            Op::Implies => match (f, g) {
                (FALSE, _) | (_, TRUE) => TRUE,
                (TRUE, x) => x,
                (x, FALSE) => self.not(x),
                _ if f == g => TRUE,
                _ => return None,
            },
            Op::Iff => match (f, g) {
                (TRUE, x) | (x, TRUE) => x,
                (FALSE, x) | (x, FALSE) => self.not(x),
                _ if f == g => TRUE,
                _ => return None,
            },
        };
        Some(r)
    }

    fn apply(&mut self, op: Op, f: u32, g: u32) -> u32 {
        if let Some(r) = self.terminal_case(op, f, g) {
            return r;
        }
        let key = match op {
            Op::And | Op::Or | Op::Xor | Op::Iff if g < f => (op, g, f),
            _ => (op, f, g),
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let level = self.level(f).min(self.level(g));
        let (f0, f1) = self.split(f, level);
        let (g0, g1) = self.split(g, level);
        let lo = self.apply(op, f0, g0);
        let hi = self.apply(op, f1, g1);
        let r = self.mk(level, lo, hi);
        self.apply_cache.insert(key, r);
        r
    }

    fn ite(&mut self, c: u32, t: u32, e: u32) -> u32 {
        match c {
            TRUE => return t,
            FALSE => return e,
            _ => {}
        }
        if t == e {
            return t;
        }
        if t == TRUE && e == FALSE {
            return c;
        }
        if t == FALSE && e == TRUE {
            return self.not(c);
        }
        if let Some(&r) = self.ite_cache.get(&(c, t, e)) {
            return r;
        }
        let level = self.level(c).min(self.level(t)).min(self.level(e));
        let (c0, c1) = self.split(c, level);
        let (t0, t1) = self.split(t, level);
        let (e0, e1) = self.split(e, level);
        let lo = self.ite(c0, t0, e0);
        let hi = self.ite(c1, t1, e1);
        let r = self.mk(level, lo, hi);
        self.ite_cache.insert((c, t, e), r);
        r
    }

    fn cofactor(&mut self, f: u32, level: u32, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        let node = self.nodes[f as usize];
        if node.var > level {
            return f;
        }
        if node.var == level {
            return if value { node.hi } else { node.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.cofactor(node.lo, level, value, memo);
        let hi = self.cofactor(node.hi, level, value, memo);
        let r = self.mk(node.var, lo, hi);
        memo.insert(f, r);
        r
    }

    /// Blocked quantification; `universal` selects conjunction of cofactors.
    fn quantify(
        &mut self,
        f: u32,
        mask: &[bool],
        last: u32,
        universal: bool,
        memo: &mut HashMap<u32, u32>,
    ) -> u32 {
        let node = self.nodes[f as usize];
        if node.var > last {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.quantify(node.lo, mask, last, universal, memo);
        let hi = self.quantify(node.hi, mask, last, universal, memo);
        let r = if mask[node.var as usize] {
            let op = if universal { Op::And } else { Op::Or };
            self.apply(op, lo, hi)
        } else {
            self.mk(node.var, lo, hi)
        };
        memo.insert(f, r);
        r
    }

    fn rename(&mut self, f: u32, map: &[u32], memo: &mut HashMap<u32, u32>) -> u32 {
        if f <= TRUE {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let node = self.nodes[f as usize];
        let lo = self.rename(node.lo, map, memo);
        let hi = self.rename(node.hi, map, memo);
        let target = map[node.var as usize];
        let v = self.mk(target, FALSE, TRUE);
        let r = self.ite(v, hi, lo);
        memo.insert(f, r);
        r
    }

    fn support(&self, f: u32, seen: &mut Vec<bool>, out: &mut VarSet) {
        if f <= TRUE || seen[f as usize] {
            return;
        }
        seen[f as usize] = true;
        let node = self.nodes[f as usize];
        out.insert(Var(node.var));
        self.support(node.lo, seen, out);
        self.support(node.hi, seen, out);
    }

    fn count_nodes(&self, f: u32, seen: &mut Vec<bool>) -> usize {
        if seen[f as usize] {
            return 0;
        }
        seen[f as usize] = true;
        if f <= TRUE {
            return 1;
        }
        let node = self.nodes[f as usize];
        1 + self.count_nodes(node.lo, seen) + self.count_nodes(node.hi, seen)
    }
}

/// Reduced ordered BDD store. The variable order is the table order.
#[derive(Debug)]
pub struct Bdd {
    id: u32,
    inner: RefCell<Inner>,
}

impl Default for Bdd {
    fn default() -> Self {
        Self::new()
    }
}

impl Bdd {
    pub fn new() -> Self {
        Bdd { id: next_store_id(), inner: RefCell::new(Inner::new()) }
    }

    /// Total nodes allocated in the store, including dead ones.
    pub fn allocated_nodes(&self) -> usize {
        self.inner.borrow().nodes.len()
    }

    /// Decision variable and children of a node; `None` for terminals.
    pub fn node(&self, f: Func) -> Option<(Var, Func, Func)> {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let n = inner.nodes[f.id as usize];
        (f.id > TRUE).then(|| (Var(n.var), self.wrap(n.lo), self.wrap(n.hi)))
    }

    /// Whether `f` is a terminal, and which.
    pub fn as_constant(&self, f: Func) -> Option<bool> {
        match f.id {
            FALSE => Some(false),
            TRUE => Some(true),
            _ => None,
        }
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
}

impl Engine for Bdd {
    fn store_id(&self) -> u32 {
        self.id
    }

    fn with_table<R>(&self, f: impl FnOnce(&VarTable) -> R) -> R {
        f(&self.inner.borrow().table)
    }

    fn declare(&self, name: &str) -> Result<Var, BoolFnError> {
        self.inner.borrow_mut().table.declare(name)
    }

    fn fresh(&self, name: &str) -> Result<Var, BoolFnError> {
        Ok(self.inner.borrow_mut().table.fresh(name))
    }

    fn constant(&self, value: bool) -> Func {
        self.wrap(if value { TRUE } else { FALSE })
    }

    fn var(&self, v: Var) -> Result<Func, BoolFnError> {
        self.check_var(v)?;
        let id = self.inner.borrow_mut().mk(v.0, FALSE, TRUE);
        Ok(self.wrap(id))
    }

    fn not(&self, f: Func) -> Func {
        self.assert_own(f);
        let id = self.inner.borrow_mut().not(f.id);
        self.wrap(id)
    }

    fn apply(&self, op: Op, f: Func, g: Func) -> Func {
        self.assert_own(f);
        self.assert_own(g);
        let id = self.inner.borrow_mut().apply(op, f.id, g.id);
        self.wrap(id)
    }

    fn ite(&self, c: Func, t: Func, e: Func) -> Func {
        self.assert_own(c);
        self.assert_own(t);
        self.assert_own(e);
        let id = self.inner.borrow_mut().ite(c.id, t.id, e.id);
        self.wrap(id)
    }

    fn cofactor(&self, f: Func, v: Var, value: bool) -> Result<Func, BoolFnError> {
        self.check(f)?;
        self.check_var(v)?;
        let id = self.inner.borrow_mut().cofactor(f.id, v.0, value, &mut HashMap::new());
        Ok(self.wrap(id))
    }

    fn exists(&self, vars: &VarSet, f: Func) -> Result<Func, BoolFnError> {
        self.quantify(vars, f, false)
    }

    fn forall(&self, vars: &VarSet, f: Func) -> Result<Func, BoolFnError> {
        self.quantify(vars, f, true)
    }

    fn rename(&self, f: Func, mapping: &[(Var, Var)]) -> Result<Func, BoolFnError> {
        self.check(f)?;
        let mut inner = self.inner.borrow_mut();
        let n = inner.table.len();
        let mut map: Vec<u32> = (0..n as u32).collect();
        let mut targets = VarSet::new();
        let mut sources = VarSet::new();
        for &(from, to) in mapping {
            if !inner.table.contains(from) {
                return Err(BoolFnError::UnknownIndex(from.0));
            }
            if !inner.table.contains(to) {
                return Err(BoolFnError::UnknownIndex(to.0));
            }
            if !sources.insert(from) || !targets.insert(to) {
                return Err(BoolFnError::NonInjective);
            }
            map[from.index()] = to.0;
        }
        let mut support = VarSet::new();
        let mut seen = vec![false; inner.nodes.len()];
        inner.support(f.id, &mut seen, &mut support);
        if let Some(t) = targets.iter().find(|t| support.contains(*t) && !sources.contains(*t)) {
            return Err(BoolFnError::TargetCollision(inner.table.name(t).to_string()));
        }
        let id = inner.rename(f.id, &map, &mut HashMap::new());
        Ok(self.wrap(id))
    }

    fn support(&self, f: Func) -> VarSet {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let mut out = VarSet::new();
        let mut seen = vec![false; inner.nodes.len()];
        inner.support(f.id, &mut seen, &mut out);
        out
    }

    fn eval(&self, f: Func, assignment: &dyn Fn(Var) -> bool) -> bool {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let mut n = f.id;
        while n > TRUE {
            let node = inner.nodes[n as usize];
            n = if assignment(Var(node.var)) { node.hi } else { node.lo };
        }
        n == TRUE
    }

    fn sat_count(&self, f: Func, over: &VarSet) -> u128 {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let order: Vec<u32> = over.iter().map(|v| v.0).collect();
        let pos = |level: u32| -> usize {
            if level == TERMINAL_LEVEL {
                order.len()
            } else {
                order.binary_search(&level).expect("support must lie within `over`")
            }
        };
        fn go(
            inner: &Inner,
            n: u32,
            pos: &dyn Fn(u32) -> usize,
            memo: &mut HashMap<u32, u128>,
        ) -> u128 {
            match n {
                FALSE => return 0,
                TRUE => return 1,
                _ => {}
            }
            if let Some(&c) = memo.get(&n) {
                return c;
            }
            let node = inner.nodes[n as usize];
            let p = pos(node.var);
            let weight = |child: u32| -> u32 { (pos(inner.level(child)) - p - 1) as u32 };
            let c = (go(inner, node.lo, pos, memo) << weight(node.lo))
                + (go(inner, node.hi, pos, memo) << weight(node.hi));
            memo.insert(n, c);
            c
        }
        let top = pos(inner.level(f.id));
        go(&inner, f.id, &pos, &mut HashMap::new()) << top
    }

    fn size(&self, f: Func) -> usize {
        self.assert_own(f);
        let inner = self.inner.borrow();
        let mut seen = vec![false; inner.nodes.len()];
        inner.count_nodes(f.id, &mut seen)
    }
}

impl Bdd {
    fn quantify(&self, vars: &VarSet, f: Func, universal: bool) -> Result<Func, BoolFnError> {
        self.check(f)?;
        let mut inner = self.inner.borrow_mut();
        inner.table.check_set(vars)?;
        let Some(last) = vars.max() else {
            return Ok(f);
        };
        let mask = vars.mask(inner.table.len());
        let id = inner.quantify(f.id, &mask, last.0, universal, &mut HashMap::new());
        Ok(self.wrap(id))
    }
}
