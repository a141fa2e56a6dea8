//! Group notions over a family of observable sets: definability, weakest
//! sufficient / strongest necessary conditions by fixed points, and common
//! knowledge. An explicit reachability oracle over enumerated states is
//! provided for cross-checking.

use std::collections::VecDeque;

use crate::boolfn::{Engine, Func};
use crate::kstruct::{AgentId, KnowledgeStructure, State};
use crate::Error;

/// A structure together with a non-empty set of agents.
pub struct GroupContext<'a, E: Engine> {
    ks: &'a KnowledgeStructure<E>,
    delta: Vec<AgentId>,
}

/// Result of the explicit-reachability computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilitySets {
    pub wsc_states: Vec<State>,
    pub snc_states: Vec<State>,
}

/// Fixed-point result together with the number of iterations taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPoint {
    pub value: Func,
    pub iterations: usize,
}

impl<'a, E: Engine> GroupContext<'a, E> {
    pub fn new(ks: &'a KnowledgeStructure<E>, delta: &[AgentId]) -> Result<Self, Error> {
        if delta.is_empty() {
            return Err(Error::EmptyGroup);
        }
        let mut d = delta.to_vec();
        d.sort();
        d.dedup();
        if let Some(a) = d.iter().find(|a| a.0 >= ks.agents().len()) {
            return Err(Error::UnknownAgent(format!("#{}", a.0)));
        }
        Ok(GroupContext { ks, delta: d })
    }

    pub fn from_names<S: AsRef<str>>(ks: &'a KnowledgeStructure<E>, names: &[S]) -> Result<Self, Error> {
        let ids = names.iter().map(|n| ks.agent(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Self::new(ks, &ids)
    }

    pub fn structure(&self) -> &KnowledgeStructure<E> {
        self.ks
    }

    pub fn delta(&self) -> &[AgentId] {
        &self.delta
    }

    /// For every member `i`, `phi` is equivalent under theta to a formula over `O_i`.
    pub fn is_definable(&self, phi: Func) -> bool {
        let e = self.ks.engine();
        let theta = self.ks.theta();
        self.delta.iter().all(|&i| e.equiv_under(theta, phi, self.ks.wsc(i, phi)))
    }

    /// `alpha & AND_i forall (V - O_i)(theta -> z)`
    fn lambda_wsc(&self, alpha: Func, z: Func) -> Func {
        let e = self.ks.engine();
        self.delta.iter().fold(alpha, |acc, &i| e.and(acc, self.ks.wsc(i, z)))
    }

    /// `alpha | OR_i exists (V - O_i)(theta & z)`
    fn lambda_snc(&self, alpha: Func, z: Func) -> Func {
        let e = self.ks.engine();
        self.delta.iter().fold(alpha, |acc, &i| e.or(acc, self.ks.snc(i, z)))
    }

    /// Greatest fixed point of `Z -> alpha & AND_i forall(V - O_i)(theta -> Z)`.
    pub fn wsc_group_iter(&self, alpha: Func) -> FixedPoint {
        let mut z = self.ks.engine().tt();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let next = self.lambda_wsc(alpha, z);
            if next == z {
                return FixedPoint { value: z, iterations };
            }
            z = next;
        }
    }

    /// Least fixed point of `Z -> alpha | OR_i exists(V - O_i)(theta & Z)`.
    pub fn snc_group_iter(&self, alpha: Func) -> FixedPoint {
        let mut z = self.ks.engine().ff();
        let mut iterations = 0;
        loop {
            iterations += 1;
            let next = self.lambda_snc(alpha, z);
            if next == z {
                return FixedPoint { value: z, iterations };
            }
            z = next;
        }
    }

    pub fn wsc_group(&self, alpha: Func) -> Func {
        self.wsc_group_iter(alpha).value
    }

    pub fn snc_group(&self, alpha: Func) -> Func {
        self.snc_group_iter(alpha).value
    }

    /// Truth set of `C_delta alpha` given the truth set of `alpha`.
    pub fn common_set(&self, alpha_ts: Func) -> Func {
        self.wsc_group(alpha_ts)
    }

    /// Enumerates the states, links two states when some member observes the
    /// same local state in both, and closes transitively by BFS.
    pub fn reachability_oracle(&self, alpha: Func, cap: usize) -> Result<ReachabilitySets, Error> {
        let states = self.ks.states(cap)?;
        let n = states.len();
        let local_keys: Vec<Vec<Vec<bool>>> = self
            .delta
            .iter()
            .map(|&i| {
                let obs = self.ks.obs(i);
                states.iter().map(|s| obs.iter().map(|v| s.contains(v)).collect()).collect()
            })
            .collect();
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                for t in 0..n {
                    if component[t] == usize::MAX && local_keys.iter().any(|keys| keys[s] == keys[t]) {
                        component[t] = count;
                        queue.push_back(t);
                    }
                }
            }
            count += 1;
        }
        let holds: Vec<bool> = states.iter().map(|s| self.ks.satisfies(s, alpha)).collect();
        let mut all = vec![true; count];
        let mut some = vec![false; count];
        for s in 0..n {
            all[component[s]] &= holds[s];
            some[component[s]] |= holds[s];
        }
        let pick = |flags: &[bool]| states.iter().enumerate().filter(|(s, _)| flags[component[*s]]).map(|(_, st)| st.clone()).collect();
        Ok(ReachabilitySets { wsc_states: pick(&all), snc_states: pick(&some) })
    }

    /// Characteristic function of a list of states (disjunction of minterms).
    pub fn states_function(&self, states: &[State]) -> Func {
        let e = self.ks.engine();
        e.or_all(states.iter().map(|s| self.ks.minterm(s)))
    }
}
