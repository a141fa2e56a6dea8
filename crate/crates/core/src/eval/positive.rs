//! Propositional translation of the positive knowledge fragment.
//!
//! Each `K_i psi` becomes `(theta -> ||psi||)` with the variables of `V - O_i`
//! replaced by fresh ones. The quantifiers this stands for are all universal,
//! so `F |= phi` iff `theta & ~||phi||` is unsatisfiable.

use std::collections::BTreeMap;

use crate::boolfn::{Engine, Func, Var};
use crate::kstruct::{AgentId, KnowledgeStructure};
use crate::lang::{Formula, Fragment};
use crate::Error;

use super::compile_propositional;

/// Fresh variables allocated for one `K_i psi` subformula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshSet {
    pub agent: String,
    pub subformula: Formula,
    /// `(original, fresh)` pairs, one per variable of `V - O_i`.
    pub vars: Vec<(Var, Var)>,
}

#[derive(Debug, Clone)]
pub struct PositiveTranslation {
    pub original: Formula,
    pub translated: Func,
    /// Syntactic form of the translation; `None` when the structure carries no
    /// axiom list to spell out its theory.
    pub formula: Option<Formula>,
    /// Syntactic theory matching `formula`.
    pub theta_formula: Option<Formula>,
    pub fresh: Vec<FreshSet>,
}

/// 32-bit FNV-1a; stable across runs and platforms.
fn fnv1a(text: &str) -> u32 {
    text.bytes().fold(0x811c_9dc5u32, |h, b| (h ^ b as u32).wrapping_mul(0x0100_0193))
}

struct Translator<'a, E: Engine> {
    ks: &'a KnowledgeStructure<E>,
    theta_formula: Option<Formula>,
    per_occurrence: bool,
    occurrences: usize,
    fresh: Vec<FreshSet>,
}

impl<E: Engine> Translator<'_, E> {
    fn fresh_for(&mut self, i: AgentId, psi: &Formula) -> Result<Vec<(Var, Var)>, Error> {
        let key = format!("K[{}] {}", self.ks.agent_name(i), psi);
        let key = if self.per_occurrence {
            self.occurrences += 1;
            format!("{key}#{}", self.occurrences)
        } else {
            key
        };
        let tag = fnv1a(&key);
        let e = self.ks.engine();
        let pairs = self
            .ks
            .hidden(i)
            .iter()
            .map(|v| Ok((v, e.fresh(&format!("{}_{tag:08x}", e.var_name(v)))?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let known = self.fresh.iter().any(|f| f.vars == pairs);
        if !known {
            self.fresh.push(FreshSet { agent: self.ks.agent_name(i).to_string(), subformula: psi.clone(), vars: pairs.clone() });
        }
        Ok(pairs)
    }

    fn translate(&mut self, f: &Formula) -> Result<(Func, Option<Formula>), Error> {
        let e = self.ks.engine();
        if f.is_propositional() {
            let g = compile_propositional(e, f, &|n| self.ks.var(n))?;
            return Ok((g, Some(f.clone())));
        }
        match f {
            Formula::And(a, b) => {
                let (fa, sa) = self.translate(a)?;
                let (fb, sb) = self.translate(b)?;
                Ok((e.and(fa, fb), sa.zip(sb).map(|(x, y)| Formula::and(x, y))))
            }
            Formula::Or(a, b) => {
                let (fa, sa) = self.translate(a)?;
                let (fb, sb) = self.translate(b)?;
                Ok((e.or(fa, fb), sa.zip(sb).map(|(x, y)| Formula::or(x, y))))
            }
            Formula::Implies(a, b) => {
                let (fa, sa) = self.translate(a)?;
                let (fb, sb) = self.translate(b)?;
                Ok((e.implies(fa, fb), sa.zip(sb).map(|(x, y)| Formula::implies(x, y))))
            }
            Formula::Knows(agent, psi) => {
                let i = self.ks.agent(agent)?;
                let (inner, syn) = self.translate(psi)?;
                let pairs = self.fresh_for(i, psi)?;
                let body = e.implies(self.ks.theta(), inner);
                let renamed = e.rename(body, &pairs)?;
                let names: BTreeMap<String, String> =
                    pairs.iter().map(|&(a, b)| (e.var_name(a), e.var_name(b))).collect();
                let syn = self
                    .theta_formula
                    .clone()
                    .zip(syn)
                    .map(|(th, s)| rename_atoms(&Formula::implies(th, s), &names));
                Ok((renamed, syn))
            }
            _ => Err(Error::NotPositive(f.classify())),
        }
    }
}

/// Substitutes atom names (and quantifier lists) per `names`.
pub(crate) fn rename_atoms(f: &Formula, names: &BTreeMap<String, String>) -> Formula {
    let r = |g: &Formula| Box::new(rename_atoms(g, names));
    let rv = |vs: &[String]| vs.iter().map(|v| names.get(v).cloned().unwrap_or_else(|| v.clone())).collect();
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(a) => Formula::Atom(names.get(a).cloned().unwrap_or_else(|| a.clone())),
        Formula::Not(g) => Formula::Not(r(g)),
        Formula::And(a, b) => Formula::And(r(a), r(b)),
        Formula::Or(a, b) => Formula::Or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::Implies(r(a), r(b)),
        Formula::Iff(a, b) => Formula::Iff(r(a), r(b)),
        Formula::Exists(vs, g) => Formula::Exists(rv(vs), r(g)),
        Formula::Forall(vs, g) => Formula::Forall(rv(vs), r(g)),
        Formula::Knows(a, g) => Formula::Knows(a.clone(), r(g)),
        Formula::Common(a, g) => Formula::Common(a.clone(), r(g)),
        Formula::Announce(a, b) => Formula::Announce(r(a), r(b)),
    }
}

/// Translates a positive-fragment formula. Structurally identical `K_i psi`
/// subformulas share one fresh set unless `per_occurrence` is set.
pub fn positive_translate<E: Engine>(
    ks: &KnowledgeStructure<E>,
    phi: &Formula,
    per_occurrence: bool,
) -> Result<PositiveTranslation, Error> {
    let fragment = phi.classify();
    if fragment > Fragment::PositiveK {
        return Err(Error::NotPositive(fragment));
    }
    let e = ks.engine();
    let theta_formula = if ks.axioms().is_empty() {
        (ks.theta() == e.tt()).then_some(Formula::True)
    } else {
        Some(Formula::conj(ks.axioms().iter().cloned()))
    };
    let mut t = Translator { ks, theta_formula: theta_formula.clone(), per_occurrence, occurrences: 0, fresh: Vec::new() };
    let (translated, formula) = t.translate(phi)?;
    Ok(PositiveTranslation {
        original: phi.clone(),
        translated,
        formula,
        theta_formula,
        fresh: t.fresh,
    })
}

/// Realization decided through the translation: `theta & ~||phi||` unsatisfiable.
pub fn positive_realized<E: Engine>(ks: &KnowledgeStructure<E>, phi: &Formula) -> Result<bool, Error> {
    let t = positive_translate(ks, phi, false)?;
    let e = ks.engine();
    Ok(!e.is_sat(e.and(ks.theta(), e.not(t.translated))))
}
