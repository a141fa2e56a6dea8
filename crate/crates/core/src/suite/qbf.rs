//! Knowledge structures encoding a prenex QBF `forall p1 exists q2 ..
//! forall p_{m-1} exists q_m . A`, so that the QBF is valid iff
//! `d1 & ~d2 -> (K[1] ~K[2] ~)^(m-1) (d_m & A)` is realized.
//!
//! Vocabulary: `c`, depth markers `d1..dm`, their primed copies `dp1..dpm`,
//! and `p1..pm`, `q1..qm`. Agent 1 observes `c`, `d*` and `q*`; agent 2
//! observes `dp*` and `p*`.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::Bdd;
use crate::eval::realized;
use crate::gen::eval_prop;
use crate::kstruct::KnowledgeStructure;
use crate::lang::{Formula, ModelSpec};
use crate::Error;

#[derive(Debug, Clone)]
pub struct QbfInstance {
    pub m: usize,
    pub matrix: Formula,
    pub model: ModelSpec,
    pub ks: KnowledgeStructure<Bdd>,
    pub target: Formula,
}

fn at(name: &str, j: usize) -> Formula {
    Formula::atom(format!("{name}{j}"))
}

/// Prefix variables in quantifier order: `p1, q2, p2, q3, .., p_{m-1}, q_m`.
pub fn prefix(m: usize) -> Vec<String> {
    (1..m).flat_map(|j| [format!("p{j}"), format!("q{}", j + 1)]).collect()
}

fn theory(m: usize) -> Vec<Formula> {
    let d = |j| at("d", j);
    let dp = |j| at("dp", j);
    let exactly = |f: &dyn Fn(usize) -> Formula, j: usize| Formula::and(f(j), Formula::not(f(j + 1)));
    let mut ax = Vec::new();
    // (a) depth markers are downward closed
    ax.push(Formula::conj((1..m).map(|j| {
        Formula::and(Formula::implies(d(j + 1), d(j)), Formula::implies(dp(j + 1), dp(j)))
    })));
    // (b) at depth exactly j, p_i and q_i agree for every i other than j
    ax.push(Formula::conj((1..m).map(|j| {
        let tied = Formula::conj((1..=m).filter(|&i| i != j).map(|i| Formula::iff(at("p", i), at("q", i))));
        Formula::implies(exactly(&d, j), tied)
    })));
    // (c) with c, both depth counters coincide
    ax.push(Formula::implies(Formula::atom("c"), Formula::conj((1..=m).map(|j| Formula::iff(d(j), dp(j))))));
    // (d) without c, the primed depth is one more
    let top = Formula::iff(exactly(&d, m - 1), dp(m));
    let rest = (1..m.saturating_sub(1)).map(|j| Formula::iff(exactly(&d, j), exactly(&dp, j + 1)));
    ax.push(Formula::implies(
        Formula::not(Formula::atom("c")),
        Formula::conj(std::iter::once(top).chain(rest)),
    ));
    ax
}

fn target(m: usize, matrix: &Formula) -> Formula {
    let mut body = Formula::and(at("d", m), matrix.clone());
    for _ in 1..m {
        body = Formula::knows("1", Formula::not(Formula::knows("2", Formula::not(body))));
    }
    Formula::implies(Formula::and(at("d", 1), Formula::not(at("d", 2))), body)
}

/// Builds the structure for a given matrix over the prefix variables.
pub fn qbf_instance(m: usize, matrix: Formula) -> Result<QbfInstance, Error> {
    if !(2..=4).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must be in 2..=4, got {m}")));
    }
    let allowed = prefix(m);
    if let Some(a) = matrix.atoms().into_iter().find(|a| !allowed.contains(a)) {
        return Err(Error::InvalidArgument(format!("matrix atom `{a}` is not a prefix variable")));
    }
    let mut vars = vec!["c".to_string()];
    for name in ["d", "dp", "p", "q"] {
        vars.extend((1..=m).map(|j| format!("{name}{j}")));
    }
    let o1 = std::iter::once("c".to_string())
        .chain((1..=m).map(|j| format!("d{j}")))
        .chain((1..=m).map(|j| format!("q{j}")))
        .collect();
    let o2 = (1..=m).map(|j| format!("dp{j}")).chain((1..=m).map(|j| format!("p{j}"))).collect();
    let model = ModelSpec { vars, agents: vec![("1".into(), o1), ("2".into(), o2)], axioms: theory(m) };
    let ks = KnowledgeStructure::from_spec(Rc::new(Bdd::new()), &model)?;
    let target = target(m, &matrix);
    Ok(QbfInstance { m, matrix, model, ks, target })
}

fn random_literal<R: Rng>(rng: &mut R, vars: &[String]) -> Formula {
    let a = Formula::atom(vars[rng.gen_range(0..vars.len())].clone());
    if rng.gen_bool(0.5) {
        Formula::not(a)
    } else {
        a
    }
}

/// Random matrix: three terms of one to three literals, joined as a CNF or
/// a DNF with equal probability.
pub fn qbf_generate(m: usize, seed: u64) -> Result<QbfInstance, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = prefix(m.max(2));
    let cnf = rng.gen_bool(0.5);
    let terms = (0..3).map(|_| {
        let lits: Vec<Formula> = (0..rng.gen_range(1..=3)).map(|_| random_literal(&mut rng, &vars)).collect();
        if cnf {
            Formula::disj(lits)
        } else {
            Formula::conj(lits)
        }
    });
    let terms: Vec<Formula> = terms.collect();
    let matrix = if cnf { Formula::conj(terms) } else { Formula::disj(terms) };
    qbf_instance(m, matrix)
}

pub fn qbf_check(inst: &QbfInstance) -> Result<bool, Error> {
    realized(&inst.ks, &inst.target)
}

/// Direct evaluation of `forall p1 exists q2 .. exists q_m . matrix`.
pub fn qbf_brute_force(m: usize, matrix: &Formula) -> bool {
    fn go(prefix: &[String], fixed: &mut Vec<(String, bool)>, matrix: &Formula) -> bool {
        let Some((v, rest)) = prefix.split_first() else {
            let val = |name: &str| fixed.iter().any(|(n, b)| n == name && *b);
            return eval_prop(matrix, &val);
        };
        let universal = v.starts_with('p');
        let mut branch = |b: bool| {
            fixed.push((v.clone(), b));
            let r = go(rest, fixed, matrix);
            fixed.pop();
            r
        };
        if universal {
            branch(false) && branch(true)
        } else {
            branch(false) || branch(true)
        }
    }
    go(&prefix(m), &mut Vec::new(), matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_formula;

    #[test]
    fn vocabulary_and_bounds() {
        let inst = qbf_instance(3, Formula::True).unwrap();
        assert_eq!(inst.ks.var_names().len(), 4 * 3 + 1);
        assert!(qbf_instance(1, Formula::True).is_err());
        assert!(qbf_instance(5, Formula::True).is_err());
        assert!(qbf_instance(2, Formula::atom("d1")).is_err());
    }

    #[test]
    fn brute_force_oracle() {
        let f = |s: &str| parse_formula(s).unwrap();
        assert!(qbf_brute_force(2, &Formula::True));
        assert!(!qbf_brute_force(2, &f("p1 & ~p1")));
        assert!(qbf_brute_force(2, &f("p1 <-> q2")));
        assert!(!qbf_brute_force(2, &f("p1 & q2")));
        assert!(qbf_brute_force(3, &f("(p1 <-> q2) & (p2 <-> q3)")));
        assert!(!qbf_brute_force(3, &f("q2 <-> p2")));
    }

    #[test]
    fn trivial_matrices() {
        assert!(qbf_check(&qbf_instance(2, Formula::True).unwrap()).unwrap());
        let contra = parse_formula("p1 & ~p1").unwrap();
        assert!(!qbf_check(&qbf_instance(2, contra).unwrap()).unwrap());
    }

    #[test]
    fn random_instances_agree_at_two() {
        for seed in 0..40 {
            let inst = qbf_generate(2, seed).unwrap();
            assert_eq!(qbf_check(&inst).unwrap(), qbf_brute_force(2, &inst.matrix), "{}", inst.matrix);
        }
    }

    // At m = 3 the alternation never reaches depth 3, so even a valid
    // matrix is rejected.
    #[test]
    fn chain_stalls_beyond_two() {
        let inst = qbf_instance(3, Formula::True).unwrap();
        assert!(!qbf_check(&inst).unwrap());
        assert!(qbf_brute_force(3, &Formula::True));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(qbf_generate(3, 5).unwrap().matrix, qbf_generate(3, 5).unwrap().matrix);
    }
}
