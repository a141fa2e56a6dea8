//! Muddy children: `n` children, the first `k` muddy, child `i` sees every
//! forehead but its own.

use std::rc::Rc;
use std::time::Instant;

use serde::Serialize;

use crate::boolfn::{Bdd, Engine, Func, VarSet};
use crate::kstruct::{AgentId, KnowledgeStructure, State};
use crate::Error;

pub const MAX_CHILDREN: usize = 64;

#[derive(Debug, Clone)]
pub struct MuddyInstance {
    pub n: usize,
    pub k: usize,
    /// `F_0`: no axioms, `O_i = V - {m_i}`.
    pub ks: KnowledgeStructure<Bdd>,
    pub s0: State,
}

impl MuddyInstance {
    pub fn mud(&self, i: usize) -> Func {
        let e = self.ks.engine();
        e.var(self.ks.var(&format!("m{i}")).expect("declared")).expect("declared")
    }

    /// Theory of `F_1`: at least one child is muddy.
    pub fn father(&self) -> Func {
        let e = self.ks.engine();
        e.or_all((0..self.n).map(|i| self.mud(i)))
    }

    /// `phi^b` under `theta`: no child knows it is muddy. Child `i` knows
    /// `m_i` exactly where `theta(m_i/false)` fails.
    pub fn nobody_knows(&self, theta: Func) -> Func {
        let e = self.ks.engine();
        let v = |i: usize| self.ks.var(&format!("m{i}")).expect("declared");
        e.and_all((0..self.n).map(|i| e.cofactor(theta, v(i), false).expect("declared")))
    }

    /// Theories of `F_1 .. F_k`.
    pub fn thetas(&self) -> Vec<Func> {
        let e = self.ks.engine();
        let mut out = vec![self.father()];
        for _ in 1..self.k {
            let t = *out.last().expect("non-empty");
            out.push(e.and(t, self.nobody_knows(t)));
        }
        out
    }
}

pub fn muddy_build(n: usize, k: usize) -> Result<MuddyInstance, Error> {
    if n == 0 || n > MAX_CHILDREN || k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "muddy children needs 1 <= k <= n <= {MAX_CHILDREN}, got n={n}, k={k}"
        )));
    }
    let e = Rc::new(Bdd::new());
    let vars: VarSet = (0..n).map(|i| e.declare(&format!("m{i}"))).collect::<Result<_, _>>()?;
    let agents = (0..n)
        .map(|i| {
            let mut o = vars.clone();
            o.remove(e.lookup(&format!("m{i}")).expect("declared"));
            (i.to_string(), o)
        })
        .collect();
    let ks = KnowledgeStructure::new(e.clone(), vars, e.tt(), agents)?;
    let s0 = ks.state_from_names(&(0..k).map(|i| format!("m{i}")).collect::<Vec<_>>())?;
    Ok(MuddyInstance { n, k, ks, s0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundReport {
    pub round: usize,
    /// `"Yes"` when child `i` knows it is muddy at the actual state.
    pub answers: Vec<&'static str>,
    pub yes: Vec<usize>,
    /// Number of states of `F_round`.
    pub states: u128,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MuddyReport {
    pub n: usize,
    pub k: usize,
    pub rounds: Vec<RoundReport>,
    /// Description of every expectation that failed; empty on success.
    pub failures: Vec<String>,
}

impl MuddyReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the announcement sequence and checks that children answer "No" in
/// rounds `1..k` and the muddy ones answer "Yes" in round `k`.
pub fn muddy_run(inst: &MuddyInstance) -> MuddyReport {
    let e = inst.ks.engine();
    let mut rounds = Vec::new();
    let mut failures = Vec::new();
    let mut theta = inst.father();
    for round in 1..=inst.k {
        let start = Instant::now();
        let fj = inst.ks.with_theta(theta);
        let answers: Vec<bool> = (0..inst.n)
            .map(|i| fj.satisfies(&inst.s0, fj.knows_set(AgentId(i), inst.mud(i))))
            .collect();
        let next = e.and(theta, inst.nobody_knows(theta));
        let seconds = start.elapsed().as_secs_f64();
        for (i, &yes) in answers.iter().enumerate() {
            let expected = round == inst.k && i < inst.k;
            if yes != expected {
                failures.push(format!(
                    "round {round}: child {i} answered {}, expected {}",
                    if yes { "Yes" } else { "No" },
                    if expected { "Yes" } else { "No" }
                ));
            }
        }
        rounds.push(RoundReport {
            round,
            answers: answers.iter().map(|&b| if b { "Yes" } else { "No" }).collect(),
            yes: answers.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect(),
            states: fj.count_states(),
            seconds,
        });
        theta = next;
    }
    MuddyReport { n: inst.n, k: inst.k, rounds, failures }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingRow {
    pub n: usize,
    pub k: usize,
    pub round: usize,
    pub alg: u8,
    pub child: usize,
    pub verdict: bool,
    pub seconds: f64,
}

/// Times every `K_i m_i` check of every round with one algorithm. Each call
/// builds its own store; construction is not timed.
pub fn muddy_time(n: usize, k: usize, alg: u8) -> Result<Vec<TimingRow>, Error> {
    if alg != 1 && alg != 2 {
        return Err(Error::InvalidArgument(format!("algorithm must be 1 or 2, got {alg}")));
    }
    let inst = muddy_build(n, k)?;
    let psi = inst.ks.minterm(&inst.s0);
    let mut rows = Vec::new();
    for (j, theta) in inst.thetas().into_iter().enumerate() {
        let fj = inst.ks.with_theta(theta);
        for i in 0..n {
            let start = Instant::now();
            let verdict = if alg == 1 {
                fj.holds_alg1(psi, AgentId(i), inst.mud(i))
            } else {
                fj.holds_alg2(psi, AgentId(i), inst.mud(i))
            };
            rows.push(TimingRow { n, k, round: j + 1, alg, child: i, verdict, seconds: start.elapsed().as_secs_f64() });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{realized, truth_set_fn};
    use crate::kripke::build_kripke;
    use crate::lang::{parse_formula, Formula};
    use crate::pal::announce_iterate;

    fn nobody(n: usize) -> Formula {
        Formula::conj((0..n).map(|i| Formula::not(Formula::knows(i.to_string(), Formula::atom(format!("m{i}"))))))
    }

    #[test]
    fn bounds() {
        assert!(muddy_build(3, 0).is_err());
        assert!(muddy_build(3, 4).is_err());
        assert!(muddy_build(MAX_CHILDREN + 1, 1).is_err());
        let inst = muddy_build(2, 2).unwrap();
        assert_eq!(inst.ks.var_names(), vec!["m0", "m1"]);
        assert_eq!(inst.ks.state_names(&inst.s0), vec!["m0", "m1"]);
    }

    #[test]
    fn two_children_both_muddy() {
        let r = muddy_run(&muddy_build(2, 2).unwrap());
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.rounds[0].answers, vec!["No", "No"]);
        assert_eq!(r.rounds[1].yes, vec![0, 1]);
        let inst = muddy_build(2, 2).unwrap();
        let e = inst.ks.engine();
        let t = inst.thetas();
        // under F_1 child 0 knows m0 exactly where m1 is false
        let k0 = inst.ks.with_theta(t[0]).knows_set(AgentId(0), inst.mud(0));
        assert!(e.equiv_under(t[0], k0, e.not(inst.mud(1))));
        assert_eq!(t[1], e.and(inst.mud(0), inst.mud(1)));
    }

    #[test]
    fn single_muddy_child_knows_at_once() {
        let r = muddy_run(&muddy_build(3, 1).unwrap());
        assert!(r.ok());
        assert_eq!(r.rounds.len(), 1);
        assert_eq!(r.rounds[0].yes, vec![0]);
    }

    #[test]
    fn symbolic_update_matches_announcement_semantics() {
        for n in 2..=5 {
            for k in 1..=n {
                let inst = muddy_build(n, k).unwrap();
                let e = inst.ks.engine();
                let thetas = inst.thetas();
                let father = Formula::disj((0..n).map(|i| Formula::atom(format!("m{i}"))));
                let mut anns = vec![father];
                anns.extend(std::iter::repeat_n(nobody(n), k - 1));
                let run = announce_iterate(&inst.ks, &anns).unwrap();
                assert_eq!(run.thetas, thetas);
                for (j, &t) in thetas.iter().enumerate() {
                    // F_j's states: at least j+1 children muddy
                    let expected: u128 = (j + 1..=n).map(|c| binom(n, c)).sum();
                    assert_eq!(inst.ks.with_theta(t).count_states(), expected);
                    let fj = inst.ks.with_theta(t);
                    let ts = truth_set_fn(&fj, &nobody(n)).unwrap();
                    assert!(e.equiv_under(t, ts, inst.nobody_knows(t)));
                }
            }
        }
    }

    fn binom(n: usize, k: usize) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn claims_as_pal_formulas() {
        let (n, k) = (4, 3);
        let inst = muddy_build(n, k).unwrap();
        let father = Formula::disj((0..n).map(|i| Formula::atom(format!("m{i}"))));
        let nested = |j: usize, inner: Formula| {
            let mut f = inner;
            for _ in 0..j {
                f = Formula::announce(nobody(n), f);
            }
            Formula::announce(father.clone(), f)
        };
        let at_s0 = |f: &Formula| inst.ks.satisfies(&inst.s0, truth_set_fn(&inst.ks, f).unwrap());
        for j in 0..k - 1 {
            assert!(at_s0(&nested(j, nobody(n))));
        }
        let yes = Formula::conj((0..k).map(|i| Formula::knows(i.to_string(), Formula::atom(format!("m{i}")))));
        assert!(at_s0(&nested(k - 1, yes)));
        assert!(!realized(&inst.ks, &parse_formula("K[0] m0").unwrap()).unwrap());
    }

    #[test]
    fn kripke_cross_check() {
        for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let inst = muddy_build(n, k).unwrap();
            let (m, states) = build_kripke(&inst.ks, 1 << 10).unwrap();
            let w0 = states.iter().position(|s| *s == inst.s0).unwrap();
            let father = Formula::disj((0..n).map(|i| Formula::atom(format!("m{i}"))));
            let r = muddy_run(&inst);
            for (j, round) in r.rounds.iter().enumerate() {
                for i in 0..n {
                    let mut f = Formula::knows(i.to_string(), Formula::atom(format!("m{i}")));
                    for _ in 0..j {
                        f = Formula::announce(nobody(n), f);
                    }
                    let f = Formula::announce(father.clone(), f);
                    assert_eq!(crate::kripke::mc_kripke(&m, w0, &f).unwrap(), round.answers[i] == "Yes");
                }
            }
        }
    }

    #[test]
    fn algorithms_agree_and_rows_are_complete() {
        let r1 = muddy_time(6, 3, 1).unwrap();
        let r2 = muddy_time(6, 3, 2).unwrap();
        assert_eq!(r1.len(), 3 * 6);
        assert!(r1.iter().zip(&r2).all(|(a, b)| a.verdict == b.verdict));
        assert!(muddy_time(6, 3, 3).is_err());
    }
}
