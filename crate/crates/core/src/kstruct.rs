//! Knowledge structures `(V, theta, O_1..O_n)` and single-agent knowledge
//! computed by forgetting.
//!
//! Agent `i` knows objective `alpha` exactly at the states satisfying the
//! weakest `O_i`-sufficient condition of `alpha` under `theta`, i.e.
//! `forall (V - O_i) (theta -> alpha)`.

use std::fmt;
use std::rc::Rc;

use crate::boolfn::{enumerate_models, Engine, Func, Var, VarSet};
use crate::eval::compile_propositional;
use crate::lang::{Formula, ModelSpec};
use crate::Error;

/// Index of an agent within one structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

/// A truth assignment satisfying the theory; the set holds the true variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(VarSet);

impl State {
    pub fn vars(&self) -> &VarSet {
        &self.0
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.contains(v)
    }
}

pub struct KnowledgeStructure<E: Engine> {
    engine: Rc<E>,
    vars: VarSet,
    theta: Func,
    axioms: Vec<Formula>,
    agents: Vec<String>,
    obs: Vec<VarSet>,
}

impl<E: Engine> Clone for KnowledgeStructure<E> {
    fn clone(&self) -> Self {
        KnowledgeStructure {
            engine: self.engine.clone(),
            vars: self.vars.clone(),
            theta: self.theta,
            axioms: self.axioms.clone(),
            agents: self.agents.clone(),
            obs: self.obs.clone(),
        }
    }
}

impl<E: Engine> fmt::Debug for KnowledgeStructure<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnowledgeStructure")
            .field("vars", &self.var_names())
            .field("agents", &self.agents)
            .field("axioms", &self.axioms.len())
            .finish()
    }
}

impl<E: Engine> KnowledgeStructure<E> {
    /// Builds a structure from a theory function. `vars` must be declared in
    /// `engine`, `theta` must be satisfiable and over `vars`.
    pub fn new(
        engine: Rc<E>,
        vars: VarSet,
        theta: Func,
        agents: Vec<(String, VarSet)>,
    ) -> Result<Self, Error> {
        engine.check(theta)?;
        engine.with_table(|t| t.check_set(&vars))?;
        if !engine.is_sat(theta) {
            return Err(Error::InconsistentTheory);
        }
        if !engine.support(theta).is_subset(&vars) {
            return Err(Error::InvalidArgument("theory mentions variables outside V".into()));
        }
        let mut names = Vec::new();
        let mut obs = Vec::new();
        for (name, o) in agents {
            if names.contains(&name) {
                return Err(Error::InvalidArgument(format!("duplicate agent `{name}`")));
            }
            if !o.is_subset(&vars) {
                return Err(Error::InvalidArgument(format!("observables of `{name}` are not a subset of V")));
            }
            names.push(name);
            obs.push(o);
        }
        Ok(KnowledgeStructure { engine, vars, theta, axioms: Vec::new(), agents: names, obs })
    }

    /// Declares the spec's variables in `engine` (reusing existing ones) and
    /// conjoins its axioms.
    pub fn from_spec(engine: Rc<E>, spec: &ModelSpec) -> Result<Self, Error> {
        let mut vars = VarSet::new();
        for name in &spec.vars {
            let v = match engine.lookup(name) {
                Ok(v) => v,
                Err(_) => engine.declare(name)?,
            };
            vars.insert(v);
        }
        let lookup = |name: &str| engine.lookup(name).map_err(|_| Error::UnboundVariable(name.to_string()));
        let mut theta = engine.tt();
        for ax in &spec.axioms {
            let f = compile_propositional(&*engine, ax, &lookup)?;
            theta = engine.and(theta, f);
        }
        let agents = spec
            .agents
            .iter()
            .map(|(a, obs)| Ok((a.clone(), obs.iter().map(|o| lookup(o)).collect::<Result<VarSet, Error>>()?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let mut ks = Self::new(engine.clone(), vars, theta, agents)?;
        ks.axioms = spec.axioms.clone();
        Ok(ks)
    }

    /// Same vocabulary and observables, different theory. The result may be
    /// inconsistent; callers decide how to treat that.
    pub(crate) fn with_theta(&self, theta: Func) -> Self {
        KnowledgeStructure {
            engine: self.engine.clone(),
            vars: self.vars.clone(),
            theta,
            axioms: Vec::new(),
            agents: self.agents.clone(),
            obs: self.obs.clone(),
        }
    }

    pub fn engine(&self) -> &E {
        &self.engine
    }

    pub fn engine_rc(&self) -> &Rc<E> {
        &self.engine
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| self.engine.var_name(v)).collect()
    }

    pub fn var(&self, name: &str) -> Result<Var, Error> {
        match self.engine.lookup(name) {
            Ok(v) if self.vars.contains(v) => Ok(v),
            _ => Err(Error::UnboundVariable(name.to_string())),
        }
    }

    pub fn theta(&self) -> Func {
        self.theta
    }

    /// Axioms as given in the model file (empty for derived structures).
    pub fn axioms(&self) -> &[Formula] {
        &self.axioms
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn agent(&self, name: &str) -> Result<AgentId, Error> {
        self.agents
            .iter()
            .position(|a| a == name)
            .map(AgentId)
            .ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }

    pub fn agent_name(&self, i: AgentId) -> &str {
        &self.agents[i.0]
    }

    pub fn obs(&self, i: AgentId) -> &VarSet {
        &self.obs[i.0]
    }

    /// `V - O_i`.
    pub fn hidden(&self, i: AgentId) -> VarSet {
        self.vars.difference(&self.obs[i.0])
    }

    pub fn is_consistent(&self) -> bool {
        self.engine.is_sat(self.theta)
    }

    /// Validates an assignment (given by its true variables) as a state.
    pub fn check_state(&self, s: &VarSet) -> Result<State, Error> {
        if let Some(v) = s.iter().find(|v| !self.vars.contains(*v)) {
            let name = if self.engine.with_table(|t| t.contains(v)) {
                self.engine.var_name(v)
            } else {
                v.to_string()
            };
            return Err(Error::NotAState(format!("`{name}` is not a variable of the structure")));
        }
        if !self.engine.eval(self.theta, &|v| s.contains(v)) {
            return Err(Error::NotAState("assignment violates the background theory".into()));
        }
        Ok(State(s.clone()))
    }

    /// State from the names of its true variables.
    pub fn state_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<State, Error> {
        let s = names.iter().map(|n| self.var(n.as_ref())).collect::<Result<VarSet, Error>>()?;
        self.check_state(&s)
    }

    pub fn state_names(&self, s: &State) -> Vec<String> {
        s.vars().iter().map(|v| self.engine.var_name(v)).collect()
    }

    /// Conjunction of literals fixing every variable of V as in `s`.
    pub fn minterm(&self, s: &State) -> Func {
        self.engine.minterm(&self.vars, s.vars()).expect("state variables belong to the store")
    }

    /// All states, in lexicographic order of the variable order.
    pub fn states(&self, cap: usize) -> Result<Vec<State>, Error> {
        Ok(enumerate_models(&*self.engine, self.theta, &self.vars, cap)?.map(State).collect())
    }

    pub fn count_states(&self) -> u128 {
        self.engine.sat_count(self.theta, &self.vars)
    }

    /// Whether `s` satisfies the function `f`.
    pub fn satisfies(&self, s: &State, f: Func) -> bool {
        self.engine.eval(f, &|v| s.contains(v))
    }

    /// Weakest `O_i`-sufficient condition: `forall (V - O_i) (theta -> alpha)`.
    pub fn wsc(&self, i: AgentId, alpha: Func) -> Func {
        let e = &self.engine;
        e.forall(&self.hidden(i), e.implies(self.theta, alpha)).expect("structure variables")
    }

    /// Strongest `O_i`-necessary condition: `exists (V - O_i) (theta & alpha)`.
    pub fn snc(&self, i: AgentId, alpha: Func) -> Func {
        let e = &self.engine;
        e.exists(&self.hidden(i), e.and(self.theta, alpha)).expect("structure variables")
    }

    /// States (modulo theta) where `K_i alpha` holds, for objective `alpha`.
    pub fn knows_set(&self, i: AgentId, alpha: Func) -> Func {
        self.wsc(i, alpha)
    }

    /// `alpha_ts` holds at every state satisfying `psi`.
    pub fn holds_on(&self, psi: Func, alpha_ts: Func) -> bool {
        let e = &self.engine;
        e.entails(e.and(self.theta, psi), alpha_ts)
    }

    /// Whether `K_{i1} .. K_{ik} alpha` holds on the states satisfying `psi`,
    /// by pushing `psi` through the chain of strongest necessary conditions.
    pub fn nested_holds(&self, psi: Func, chain: &[AgentId], alpha: Func) -> Result<bool, Error> {
        if chain.is_empty() {
            return Err(Error::InvalidArgument("agent chain must not be empty".into()));
        }
        let psi_k = chain.iter().fold(psi, |acc, &i| self.snc(i, acc));
        Ok(self.holds_on(psi_k, alpha))
    }

    /// `(theta & psi) -> WSC_i(alpha)` is valid.
    pub fn holds_alg1(&self, psi: Func, i: AgentId, alpha: Func) -> bool {
        self.holds_on(psi, self.wsc(i, alpha))
    }

    /// `(theta & SNC_i(psi)) -> alpha` is valid.
    pub fn holds_alg2(&self, psi: Func, i: AgentId, alpha: Func) -> bool {
        self.holds_on(self.snc(i, psi), alpha)
    }
}
