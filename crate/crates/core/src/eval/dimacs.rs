//! DIMACS CNF export through a structure-preserving (Tseitin) encoding.
//!
//! Output layout: one `c var <index> <name>` line per named variable, then
//! `p cnf <nvars> <nclauses>`, then one `0`-terminated line per clause.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::boolfn::{Engine, Func, Var};
use crate::lang::Formula;
use crate::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    /// DIMACS index to variable name, for the non-auxiliary variables.
    pub names: Vec<(u32, String)>,
}

impl Cnf {
    fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    fn named(&mut self, name: String) -> i32 {
        let v = self.new_var();
        self.names.push((v as u32, name));
        v
    }

    /// The unsatisfiable CNF `p cnf 1 2` with clauses `1` and `-1`.
    fn unsat() -> Cnf {
        Cnf { num_vars: 1, clauses: vec![vec![1], vec![-1]], names: Vec::new() }
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for (i, name) in &self.names {
            let _ = writeln!(out, "c var {i} {name}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn write_to(&self, sink: &mut dyn Write) -> io::Result<()> {
        sink.write_all(self.to_dimacs().as_bytes())
    }

    /// DIMACS index of a named variable.
    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().find(|(_, n)| n == name).map(|(i, _)| *i)
    }
}

/// Encodes a function by Shannon decomposition along the variable order:
/// one auxiliary per distinct cofactor, `g <-> (x ? hi : lo)`.
pub fn cnf_from_func<E: Engine>(e: &E, f: Func) -> Result<Cnf, Error> {
    e.check(f)?;
    if f == e.ff() {
        return Ok(Cnf::unsat());
    }
    let mut cnf = Cnf::default();
    if f == e.tt() {
        return Ok(cnf);
    }
    let support: Vec<Var> = e.support(f).iter().collect();
    let mut var_index = HashMap::new();
    for &v in &support {
        let idx = cnf.named(e.var_name(v));
        var_index.insert(v, idx);
    }
    let mut memo: HashMap<Func, i32> = HashMap::new();
    let root = encode_func(e, f, &support, 0, &var_index, &mut memo, &mut cnf)?;
    cnf.clauses.push(vec![root]);
    Ok(cnf)
}

fn encode_func<E: Engine>(
    e: &E,
    f: Func,
    order: &[Var],
    from: usize,
    var_index: &HashMap<Var, i32>,
    memo: &mut HashMap<Func, i32>,
    cnf: &mut Cnf,
) -> Result<i32, Error> {
    if let Some(&g) = memo.get(&f) {
        return Ok(g);
    }
    let g = cnf.new_var();
    if f == e.tt() || f == e.ff() {
        cnf.clauses.push(vec![if f == e.tt() { g } else { -g }]);
        memo.insert(f, g);
        return Ok(g);
    }
    // first variable (in order) the function still depends on
    let mut at = from;
    let (lo, hi) = loop {
        let v = order[at];
        let lo = e.cofactor(f, v, false)?;
        let hi = e.cofactor(f, v, true)?;
        if lo != hi {
            break (lo, hi);
        }
        at += 1;
    };
    let x = var_index[&order[at]];
    let l = encode_func(e, lo, order, at + 1, var_index, memo, cnf)?;
    let h = encode_func(e, hi, order, at + 1, var_index, memo, cnf)?;
    cnf.clauses.extend([vec![-g, -x, h], vec![-g, x, l], vec![g, -x, -h], vec![g, x, -l]]);
    memo.insert(f, g);
    Ok(g)
}

/// Tseitin encoding of a propositional formula. Surface quantifiers are
/// expanded by substitution; variables are numbered in order of first
/// occurrence.
pub fn cnf_from_formula(f: &Formula) -> Result<Cnf, Error> {
    if !f.is_propositional() {
        return Err(Error::InvalidArgument(format!("`{f}` is not propositional")));
    }
    let expanded = expand_quantifiers(f);
    let mut cnf = Cnf::default();
    let mut atoms = BTreeMap::new();
    let mut constant = None;
    let root = tseitin(&expanded, &mut cnf, &mut atoms, &mut constant);
    cnf.clauses.push(vec![root]);
    Ok(cnf)
}

fn tseitin(f: &Formula, cnf: &mut Cnf, atoms: &mut BTreeMap<String, i32>, truth: &mut Option<i32>) -> i32 {
    let mut konst = |cnf: &mut Cnf| -> i32 {
        *truth.get_or_insert_with(|| {
            let t = cnf.new_var();
            cnf.clauses.push(vec![t]);
            t
        })
    };
    match f {
        Formula::True => konst(cnf),
        Formula::False => -konst(cnf),
        Formula::Atom(a) => {
            if let Some(&v) = atoms.get(a) {
                return v;
            }
            let v = cnf.named(a.clone());
            atoms.insert(a.clone(), v);
            v
        }
        Formula::Not(g) => -tseitin(g, cnf, atoms, truth),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let mut x = tseitin(a, cnf, atoms, truth);
            let y = tseitin(b, cnf, atoms, truth);
            let g = cnf.new_var();
            match f {
                Formula::And(..) => {
                    cnf.clauses.extend([vec![-g, x], vec![-g, y], vec![g, -x, -y]]);
                }
                Formula::Or(..) | Formula::Implies(..) => {
                    if matches!(f, Formula::Implies(..)) {
                        x = -x;
                    }
                    cnf.clauses.extend([vec![g, -x], vec![g, -y], vec![-g, x, y]]);
                }
                _ => {
                    cnf.clauses.extend([vec![-g, -x, y], vec![-g, x, -y], vec![g, x, y], vec![g, -x, -y]]);
                }
            }
            g
        }
        Formula::Exists(..) | Formula::Forall(..) | Formula::Knows(..) | Formula::Common(..) | Formula::Announce(..) => {
            unreachable!("quantifiers are expanded and the formula is propositional")
        }
    }
}

fn substitute(f: &Formula, var: &str, value: bool) -> Formula {
    let s = |g: &Formula| Box::new(substitute(g, var, value));
    match f {
        Formula::Atom(a) if a == var => {
            if value {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::Not(s(g)),
        Formula::And(a, b) => Formula::And(s(a), s(b)),
        Formula::Or(a, b) => Formula::Or(s(a), s(b)),
        Formula::Implies(a, b) => Formula::Implies(s(a), s(b)),
        Formula::Iff(a, b) => Formula::Iff(s(a), s(b)),
        Formula::Exists(vs, _) | Formula::Forall(vs, _) if vs.iter().any(|v| v == var) => f.clone(),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), s(g)),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), s(g)),
        Formula::Knows(a, g) => Formula::Knows(a.clone(), s(g)),
        Formula::Common(a, g) => Formula::Common(a.clone(), s(g)),
        Formula::Announce(a, b) => Formula::Announce(s(a), s(b)),
    }
}

fn expand_quantifiers(f: &Formula) -> Formula {
    let r = |g: &Formula| Box::new(expand_quantifiers(g));
    match f {
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let exists = matches!(f, Formula::Exists(..));
            let mut body = expand_quantifiers(g);
            for v in vs {
                let lo = substitute(&body, v, false);
                let hi = substitute(&body, v, true);
                body = if exists { Formula::or(lo, hi) } else { Formula::and(lo, hi) };
            }
            body
        }
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::Not(r(g)),
        Formula::And(a, b) => Formula::And(r(a), r(b)),
        Formula::Or(a, b) => Formula::Or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::Implies(r(a), r(b)),
        Formula::Iff(a, b) => Formula::Iff(r(a), r(b)),
        Formula::Knows(a, g) => Formula::Knows(a.clone(), r(g)),
        Formula::Common(a, g) => Formula::Common(a.clone(), r(g)),
        Formula::Announce(a, b) => Formula::Announce(r(a), r(b)),
    }
}
