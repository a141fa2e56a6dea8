//! Seeded random generators for structures, formulas and S5 models.
//!
//! Variables are named `x0, x1, ..` and agents `a, b, c, ..`. All generators
//! draw only from the supplied RNG, so a fixed seed gives a fixed instance.

use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolfn::Engine;
use crate::kripke::KripkeModel;
use crate::kstruct::KnowledgeStructure;
use crate::lang::{Formula, ModelSpec};

pub fn var_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn agent_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn leaf<R: Rng>(rng: &mut R, names: &[String]) -> Formula {
    match rng.gen_range(0..12) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::atom(names.choose(rng).expect("at least one variable").clone()),
    }
}

/// Random propositional formula of depth at most `depth`. Surface quantifiers
/// appear occasionally.
pub fn random_prop_formula<R: Rng>(rng: &mut R, names: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, names);
    }
    let d = depth - 1;
    match rng.gen_range(0..12) {
        0..=2 => Formula::not(random_prop_formula(rng, names, d)),
        3..=4 => Formula::and(random_prop_formula(rng, names, d), random_prop_formula(rng, names, d)),
        5..=6 => Formula::or(random_prop_formula(rng, names, d), random_prop_formula(rng, names, d)),
        7..=8 => Formula::implies(random_prop_formula(rng, names, d), random_prop_formula(rng, names, d)),
        9 => Formula::iff(random_prop_formula(rng, names, d), random_prop_formula(rng, names, d)),
        _ => {
            let k = rng.gen_range(1..=names.len().min(2));
            let vs: Vec<String> = names.choose_multiple(rng, k).cloned().collect();
            let body = Box::new(random_prop_formula(rng, names, d));
            if rng.gen_bool(0.5) {
                Formula::Exists(vs, body)
            } else {
                Formula::Forall(vs, body)
            }
        }
    }
}

/// Non-empty random subset of `agents`, in their original order.
pub fn random_agent_group<R: Rng>(rng: &mut R, agents: &[String]) -> Vec<String> {
    loop {
        let g: Vec<String> = agents.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !g.is_empty() {
            return g;
        }
    }
}

/// Random formula of the full language (announcements optional).
pub fn random_formula<R: Rng>(
    rng: &mut R,
    names: &[String],
    agents: &[String],
    depth: usize,
    allow_announce: bool,
) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.85) { leaf(rng, names) } else { random_prop_formula(rng, names, 2) };
    }
    let d = depth - 1;
    let rec = |rng: &mut R| random_formula(rng, names, agents, d, allow_announce);
    let top = if allow_announce { 12 } else { 10 };
    match rng.gen_range(0..top) {
        0..=1 => Formula::not(rec(rng)),
        2 => Formula::and(rec(rng), rec(rng)),
        3 => Formula::or(rec(rng), rec(rng)),
        4 => Formula::implies(rec(rng), rec(rng)),
        5 => Formula::iff(rec(rng), rec(rng)),
        6..=7 => Formula::knows(agents.choose(rng).expect("at least one agent").clone(), rec(rng)),
        8..=9 => Formula::common(random_agent_group(rng, agents), rec(rng)),
        _ => Formula::announce(rec(rng), rec(rng)),
    }
}

/// Random formula of the positive knowledge fragment: negation and
/// implication antecedents stay propositional.
pub fn random_positive_formula<R: Rng>(rng: &mut R, names: &[String], agents: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return random_prop_formula(rng, names, 2);
    }
    let d = depth - 1;
    match rng.gen_range(0..8) {
        0 => Formula::and(
            random_positive_formula(rng, names, agents, d),
            random_positive_formula(rng, names, agents, d),
        ),
        1..=2 => Formula::or(
            random_positive_formula(rng, names, agents, d),
            random_positive_formula(rng, names, agents, d),
        ),
        3 => Formula::implies(random_prop_formula(rng, names, 2), random_positive_formula(rng, names, agents, d)),
        _ => Formula::knows(
            agents.choose(rng).expect("at least one agent").clone(),
            random_positive_formula(rng, names, agents, d),
        ),
    }
}

/// Random model file: `nvars` variables, `nagents` agents with random
/// observables, up to two axioms whose conjunction is satisfiable.
pub fn random_spec<R: Rng>(rng: &mut R, nvars: usize, nagents: usize) -> ModelSpec {
    let vars = var_names(nvars);
    let agents = agent_names(nagents)
        .into_iter()
        .map(|a| {
            let obs = vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (a, obs)
        })
        .collect();
    let mut spec = ModelSpec { vars, agents, axioms: Vec::new() };
    let naxioms = rng.gen_range(0..=2);
    for _ in 0..naxioms {
        let ax = random_prop_formula(rng, &spec.vars, 3);
        spec.axioms.push(ax);
        if !satisfiable(&spec) {
            spec.axioms.pop();
        }
    }
    spec
}

fn satisfiable(spec: &ModelSpec) -> bool {
    let n = spec.vars.len();
    (0u64..1 << n).any(|row| {
        let val = |name: &str| spec.vars.iter().position(|v| v == name).is_some_and(|j| row >> j & 1 == 1);
        spec.axioms.iter().all(|ax| eval_prop(ax, &val))
    })
}

/// Direct evaluation of a propositional formula under a valuation.
pub fn eval_prop(f: &Formula, val: &dyn Fn(&str) -> bool) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => val(a),
        Formula::Not(g) => !eval_prop(g, val),
        Formula::And(a, b) => eval_prop(a, val) && eval_prop(b, val),
        Formula::Or(a, b) => eval_prop(a, val) || eval_prop(b, val),
        Formula::Implies(a, b) => !eval_prop(a, val) || eval_prop(b, val),
        Formula::Iff(a, b) => eval_prop(a, val) == eval_prop(b, val),
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let exists = matches!(f, Formula::Exists(..));
            let results = (0u64..1 << vs.len()).map(|bits| {
                let inner = |name: &str| match vs.iter().position(|v| v == name) {
                    Some(j) => bits >> j & 1 == 1,
                    None => val(name),
                };
                eval_prop(g, &inner)
            });
            let mut results = results;
            if exists {
                results.any(|b| b)
            } else {
                results.all(|b| b)
            }
        }
        Formula::Knows(..) | Formula::Common(..) | Formula::Announce(..) => {
            panic!("eval_prop called on a modal formula")
        }
    }
}

pub fn random_structure<E: Engine, R: Rng>(
    rng: &mut R,
    engine: Rc<E>,
    nvars: usize,
    nagents: usize,
) -> KnowledgeStructure<E> {
    let spec = random_spec(rng, nvars, nagents);
    KnowledgeStructure::from_spec(engine, &spec).expect("generated spec is consistent")
}

/// Random S5 model: `1..=max_worlds` worlds with random valuations over
/// `nvars` variables, each agent's relation a random partition.
pub fn random_s5<R: Rng>(rng: &mut R, max_worlds: usize, nvars: usize, nagents: usize) -> KripkeModel {
    let nworlds = rng.gen_range(1..=max_worlds);
    let vars = var_names(nvars);
    let valuation = (0..nworlds)
        .map(|_| vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
        .collect();
    let partitions = agent_names(nagents)
        .into_iter()
        .map(|a| {
            let nblocks = rng.gen_range(1..=nworlds);
            let mut blocks = vec![Vec::new(); nblocks];
            for w in 0..nworlds {
                blocks[rng.gen_range(0..nblocks)].push(w);
            }
            blocks.retain(|b| !b.is_empty());
            (a, blocks)
        })
        .collect();
    KripkeModel::new(vars, valuation, partitions).expect("generated partitions are valid")
}
