//! Truth-set compilation of epistemic and announcement formulas.
//!
//! Every formula is mapped to a Boolean function over `V` that characterizes
//! the states where it holds:
//!
//! * `K_i a`  becomes `forall (V - O_i) (theta -> [a])`
//! * `C_G a`  becomes the greatest fixed point computed by [`GroupContext`]
//! * `[p] q`  becomes `~[p] | [q]'` where `[q]'` is computed in `F|p`
//!
//! Surface quantifiers `E{..}` / `A{..}` forget variables directly.

mod dimacs;
mod positive;

pub use dimacs::{cnf_from_formula, cnf_from_func, Cnf};
pub use positive::{positive_realized, positive_translate, FreshSet, PositiveTranslation};

use crate::boolfn::{Engine, Func, Var, VarSet};
use crate::group::GroupContext;
use crate::kstruct::{KnowledgeStructure, State};
use crate::lang::Formula;
use crate::pal::announce_set;
use crate::Error;

/// A formula with the set of states where it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthSet {
    pub formula: Formula,
    pub set: Func,
}

/// Compiles a propositional formula. `lookup` resolves variable names.
pub fn compile_propositional<E: Engine>(
    e: &E,
    f: &Formula,
    lookup: &dyn Fn(&str) -> Result<Var, Error>,
) -> Result<Func, Error> {
    let rec = |g: &Formula| compile_propositional(e, g, lookup);
    Ok(match f {
        Formula::True => e.tt(),
        Formula::False => e.ff(),
        Formula::Atom(a) => e.var(lookup(a)?)?,
        Formula::Not(g) => e.not(rec(g)?),
        Formula::And(a, b) => e.and(rec(a)?, rec(b)?),
        Formula::Or(a, b) => e.or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => e.implies(rec(a)?, rec(b)?),
        Formula::Iff(a, b) => e.iff(rec(a)?, rec(b)?),
        Formula::Exists(vs, g) => e.exists(&lookup_all(vs, lookup)?, rec(g)?)?,
        Formula::Forall(vs, g) => e.forall(&lookup_all(vs, lookup)?, rec(g)?)?,
        Formula::Knows(..) | Formula::Common(..) | Formula::Announce(..) => {
            return Err(Error::InvalidArgument(format!("`{f}` is not propositional")))
        }
    })
}

fn lookup_all(vs: &[String], lookup: &dyn Fn(&str) -> Result<Var, Error>) -> Result<VarSet, Error> {
    vs.iter().map(|v| lookup(v)).collect()
}

/// Truth set of `alpha` in `ks` as a function over `V`.
pub fn truth_set_fn<E: Engine>(ks: &KnowledgeStructure<E>, alpha: &Formula) -> Result<Func, Error> {
    let e = ks.engine();
    let rec = |g: &Formula| truth_set_fn(ks, g);
    Ok(match alpha {
        Formula::True => e.tt(),
        Formula::False => e.ff(),
        Formula::Atom(a) => e.var(ks.var(a)?)?,
        Formula::Not(g) => e.not(rec(g)?),
        Formula::And(a, b) => e.and(rec(a)?, rec(b)?),
        Formula::Or(a, b) => e.or(rec(a)?, rec(b)?),
        Formula::Implies(a, b) => e.implies(rec(a)?, rec(b)?),
        Formula::Iff(a, b) => e.iff(rec(a)?, rec(b)?),
        Formula::Exists(vs, g) => e.exists(&bind_vars(ks, vs)?, rec(g)?)?,
        Formula::Forall(vs, g) => e.forall(&bind_vars(ks, vs)?, rec(g)?)?,
        Formula::Knows(agent, g) => {
            let i = ks.agent(agent)?;
            ks.knows_set(i, rec(g)?)
        }
        Formula::Common(group, g) => {
            let ctx = GroupContext::from_names(ks, group)?;
            ctx.common_set(rec(g)?)
        }
        Formula::Announce(phi, psi) => announce_set(ks, phi, psi)?,
    })
}

fn bind_vars<E: Engine>(ks: &KnowledgeStructure<E>, vs: &[String]) -> Result<VarSet, Error> {
    vs.iter().map(|v| ks.var(v)).collect()
}

pub fn truth_set<E: Engine>(ks: &KnowledgeStructure<E>, alpha: &Formula) -> Result<TruthSet, Error> {
    Ok(TruthSet { formula: alpha.clone(), set: truth_set_fn(ks, alpha)? })
}

/// `alpha` holds at every state of `ks`.
pub fn realized<E: Engine>(ks: &KnowledgeStructure<E>, alpha: &Formula) -> Result<bool, Error> {
    let ts = truth_set_fn(ks, alpha)?;
    Ok(ks.engine().entails(ks.theta(), ts))
}

/// A state where `alpha` fails, if any: the greatest one in variable order,
/// found by preferring the true cofactor at every variable.
pub fn counterexample<E: Engine>(ks: &KnowledgeStructure<E>, alpha: &Formula) -> Result<Option<State>, Error> {
    let e = ks.engine();
    let ts = truth_set_fn(ks, alpha)?;
    let mut bad = e.and(ks.theta(), e.not(ts));
    if !e.is_sat(bad) {
        return Ok(None);
    }
    let mut state = VarSet::new();
    for v in ks.vars().iter() {
        let hi = e.cofactor(bad, v, true)?;
        if e.is_sat(hi) {
            state.insert(v);
            bad = hi;
        } else {
            bad = e.cofactor(bad, v, false)?;
        }
    }
    ks.check_state(&state).map(Some)
}

/// Disjunction of the path cubes of `f`, splitting on its support in
/// variable order. Meant for display; the size follows the number of paths.
pub fn func_to_formula<E: Engine>(e: &E, f: Func) -> Result<Formula, Error> {
    fn cubes<E: Engine>(e: &E, f: Func, prefix: &mut Vec<Formula>, out: &mut Vec<Formula>) -> Result<(), Error> {
        if !e.is_sat(f) {
            return Ok(());
        }
        let Some(v) = e.support(f).iter().next() else {
            out.push(Formula::conj(prefix.iter().cloned()));
            return Ok(());
        };
        let x = Formula::atom(e.var_name(v));
        for (value, lit) in [(true, x.clone()), (false, Formula::not(x))] {
            prefix.push(lit);
            cubes(e, e.cofactor(f, v, value)?, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    cubes(e, f, &mut Vec::new(), &mut out)?;
    Ok(Formula::disj(out))
}

/// `(ks, s) |= alpha`.
pub fn scenario_check<E: Engine>(ks: &KnowledgeStructure<E>, s: &State, alpha: &Formula) -> Result<bool, Error> {
    let s = ks.check_state(s.vars())?;
    let ts = truth_set_fn(ks, alpha)?;
    Ok(ks.satisfies(&s, ts))
}

#[cfg(test)]
mod tests;
