//! Explicit S5 Kripke models: brute-force model checking and the two
//! conversions between Kripke models and knowledge structures.
//!
//! Each accessibility relation is stored as a partition of the worlds, so
//! every model is S5 by construction.
//!
//! Text format:
//!
//! ```text
//! vars: p q
//! world 0 vars: p q
//! world 1 vars: q
//! partition a: {0 1}
//! partition b: {0} {1}
//! ```
//!
//! The `vars:` line is optional; without it the vocabulary is the set of
//! atoms true somewhere.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

use crate::boolfn::Engine;
use crate::gen::eval_prop;
use crate::kstruct::{KnowledgeStructure, State};
use crate::lang::{Formula, ModelSpec};
use crate::Error;

pub const DEFAULT_WORLD_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    vars: Vec<String>,
    valuation: Vec<BTreeSet<String>>,
    agents: Vec<String>,
    partitions: Vec<Vec<Vec<usize>>>,
    /// `class_of[i][w]`: index of the block of agent `i` containing `w`.
    class_of: Vec<Vec<usize>>,
}

impl KripkeModel {
    /// Validates that every partition covers each world exactly once and that
    /// valuations only use declared variables. Blocks are normalized: sorted,
    /// and ordered by their least world.
    pub fn new(
        vars: Vec<String>,
        valuation: Vec<BTreeSet<String>>,
        partitions: Vec<(String, Vec<Vec<usize>>)>,
    ) -> Result<Self, Error> {
        let n = valuation.len();
        if n == 0 {
            return Err(Error::Kripke("a model needs at least one world".into()));
        }
        for (w, val) in valuation.iter().enumerate() {
            if let Some(v) = val.iter().find(|v| !vars.contains(v)) {
                return Err(Error::Kripke(format!("world {w}: undeclared variable `{v}`")));
            }
        }
        let mut agents = Vec::new();
        let mut parts = Vec::new();
        let mut class_of = Vec::new();
        for (name, mut blocks) in partitions {
            if agents.contains(&name) {
                return Err(Error::Kripke(format!("duplicate partition for agent `{name}`")));
            }
            let mut owner = vec![usize::MAX; n];
            blocks.retain(|b| !b.is_empty());
            for b in blocks.iter_mut() {
                b.sort_unstable();
            }
            blocks.sort();
            for (c, b) in blocks.iter().enumerate() {
                for &w in b {
                    if w >= n {
                        return Err(Error::UnknownWorld(w));
                    }
                    if owner[w] != usize::MAX {
                        return Err(Error::Kripke(format!("agent `{name}`: world {w} in two blocks")));
                    }
                    owner[w] = c;
                }
            }
            if let Some(w) = owner.iter().position(|&c| c == usize::MAX) {
                return Err(Error::Kripke(format!("agent `{name}`: world {w} in no block")));
            }
            agents.push(name);
            parts.push(blocks);
            class_of.push(owner);
        }
        Ok(KripkeModel { vars, valuation, agents, partitions: parts, class_of })
    }

    pub fn num_worlds(&self) -> usize {
        self.valuation.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn valuation(&self, w: usize) -> &BTreeSet<String> {
        &self.valuation[w]
    }

    pub fn partition(&self, agent: usize) -> &[Vec<usize>] {
        &self.partitions[agent]
    }

    pub fn same_class(&self, agent: usize, w1: usize, w2: usize) -> bool {
        self.class_of[agent][w1] == self.class_of[agent][w2]
    }

    fn agent_index(&self, name: &str) -> Result<usize, Error> {
        self.agents.iter().position(|a| a == name).ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }

    /// Worlds (among `live`) where `f` holds.
    fn sat(&self, live: &[bool], f: &Formula) -> Result<Vec<bool>, Error> {
        let n = self.num_worlds();
        if f.is_propositional() {
            if let Some(a) = f.atoms().into_iter().find(|a| !self.vars.contains(a)) {
                return Err(Error::UnboundVariable(a));
            }
            return Ok((0..n).map(|w| live[w] && eval_prop(f, &|v| self.valuation[w].contains(v))).collect());
        }
        let both = |a: &Formula, b: &Formula, op: fn(bool, bool) -> bool| -> Result<Vec<bool>, Error> {
            let x = self.sat(live, a)?;
            let y = self.sat(live, b)?;
            Ok((0..n).map(|w| live[w] && op(x[w], y[w])).collect())
        };
        match f {
            Formula::Not(g) => {
                let x = self.sat(live, g)?;
                Ok((0..n).map(|w| live[w] && !x[w]).collect())
            }
            Formula::And(a, b) => both(a, b, |x, y| x && y),
            Formula::Or(a, b) => both(a, b, |x, y| x || y),
            Formula::Implies(a, b) => both(a, b, |x, y| !x || y),
            Formula::Iff(a, b) => both(a, b, |x, y| x == y),
            Formula::Knows(agent, g) => {
                let i = self.agent_index(agent)?;
                let x = self.sat(live, g)?;
                let mut good = vec![true; self.partitions[i].len()];
                for w in (0..n).filter(|&w| live[w] && !x[w]) {
                    good[self.class_of[i][w]] = false;
                }
                Ok((0..n).map(|w| live[w] && good[self.class_of[i][w]]).collect())
            }
            Formula::Common(group, g) => {
                let ids = group.iter().map(|a| self.agent_index(a)).collect::<Result<Vec<_>, _>>()?;
                let x = self.sat(live, g)?;
                let comp = self.components(live, &ids);
                let ncomp = comp.iter().filter_map(|c| *c).max().map_or(0, |m| m + 1);
                let mut good = vec![true; ncomp];
                for w in (0..n).filter(|&w| live[w] && !x[w]) {
                    good[comp[w].expect("live world")] = false;
                }
                Ok((0..n).map(|w| live[w] && good[comp[w].expect("live world")]).collect())
            }
            Formula::Announce(phi, psi) => {
                let x = self.sat(live, phi)?;
                let y = self.sat(&x, psi)?;
                Ok((0..n).map(|w| live[w] && (!x[w] || y[w])).collect())
            }
            _ => unreachable!("propositional formulas are handled above"),
        }
    }

    /// Connected components of the union of the group's relations, restricted
    /// to live worlds, found by breadth-first search.
    fn components(&self, live: &[bool], group: &[usize]) -> Vec<Option<usize>> {
        let n = self.num_worlds();
        let mut comp = vec![None; n];
        let mut next = 0;
        for start in 0..n {
            if !live[start] || comp[start].is_some() {
                continue;
            }
            comp[start] = Some(next);
            let mut queue = VecDeque::from([start]);
            while let Some(w) = queue.pop_front() {
                for &i in group {
                    for &u in &self.partitions[i][self.class_of[i][w]] {
                        if live[u] && comp[u].is_none() {
                            comp[u] = Some(next);
                            queue.push_back(u);
                        }
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Worlds where `alpha` holds.
    pub fn truth_worlds(&self, alpha: &Formula) -> Result<Vec<bool>, Error> {
        self.sat(&vec![true; self.num_worlds()], alpha)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("vars: {}\n", self.vars.join(" "));
        for (w, val) in self.valuation.iter().enumerate() {
            let names: Vec<&str> = val.iter().map(String::as_str).collect();
            out.push_str(&format!("world {w} vars: {}\n", names.join(" ")).replace(" \n", "\n"));
        }
        for (a, blocks) in self.agents.iter().zip(&self.partitions) {
            let bs: Vec<String> = blocks
                .iter()
                .map(|b| format!("{{{}}}", b.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")))
                .collect();
            out.push_str(&format!("partition {a}: {}\n", bs.join(" ")));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let err = |line: usize, msg: String| Error::Kripke(format!("line {line}: {msg}"));
        let mut declared: Option<Vec<String>> = None;
        let mut worlds: Vec<Option<BTreeSet<String>>> = Vec::new();
        let mut partitions = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("vars:") {
                declared = Some(rest.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = content.strip_prefix("world ") {
                let (id, vals) = rest.split_once("vars:").ok_or_else(|| err(line, "expected `world <id> vars: ..`".into()))?;
                let id: usize = id.trim().parse().map_err(|_| err(line, format!("bad world id `{}`", id.trim())))?;
                if worlds.len() <= id {
                    worlds.resize(id + 1, None);
                }
                if worlds[id].is_some() {
                    return Err(err(line, format!("world {id} declared twice")));
                }
                worlds[id] = Some(vals.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = content.strip_prefix("partition ") {
                let (agent, blocks) =
                    rest.split_once(':').ok_or_else(|| err(line, "expected `partition <agent>: {..}`".into()))?;
                let mut parsed = Vec::new();
                let mut rest = blocks.trim();
                while !rest.is_empty() {
                    let body = rest.strip_prefix('{').ok_or_else(|| err(line, "expected `{`".into()))?;
                    let (inner, tail) = body.split_once('}').ok_or_else(|| err(line, "unclosed `{`".into()))?;
                    let block = inner
                        .split_whitespace()
                        .map(|w| w.parse::<usize>().map_err(|_| err(line, format!("bad world id `{w}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    parsed.push(block);
                    rest = tail.trim_start();
                }
                partitions.push((agent.trim().to_string(), parsed));
            } else {
                return Err(err(line, format!("unrecognized line `{content}`")));
            }
        }
        let valuation = worlds
            .into_iter()
            .enumerate()
            .map(|(w, v)| v.ok_or_else(|| Error::Kripke(format!("world {w} is missing"))))
            .collect::<Result<Vec<_>, _>>()?;
        let vars = declared.unwrap_or_else(|| {
            let all: BTreeSet<&String> = valuation.iter().flatten().collect();
            all.into_iter().cloned().collect()
        });
        KripkeModel::new(vars, valuation, partitions)
    }
}

/// `(M, w) |= alpha`.
pub fn mc_kripke(m: &KripkeModel, w: usize, alpha: &Formula) -> Result<bool, Error> {
    if w >= m.num_worlds() {
        return Err(Error::UnknownWorld(w));
    }
    Ok(m.truth_worlds(alpha)?[w])
}

/// `M(F)`: worlds are the states of `ks`, `w ~_i w'` iff they agree on `O_i`.
/// World `j` of the result is `states[j]`.
pub fn build_kripke<E: Engine>(ks: &KnowledgeStructure<E>, cap: usize) -> Result<(KripkeModel, Vec<State>), Error> {
    let count = ks.count_states();
    if count > cap as u128 {
        return Err(crate::boolfn::BoolFnError::CapExceeded { requested: count.min(usize::MAX as u128) as usize, cap }.into());
    }
    let states = ks.states(usize::MAX)?;
    let names = ks.var_names();
    let valuation = states.iter().map(|s| ks.state_names(s).into_iter().collect()).collect();
    let partitions = ks
        .agent_ids()
        .map(|i| {
            let mut blocks: Vec<Vec<usize>> = Vec::new();
            let mut index = HashMap::new();
            for (w, s) in states.iter().enumerate() {
                let local = s.vars().intersection(ks.obs(i));
                let b = *index.entry(local).or_insert_with(|| {
                    blocks.push(Vec::new());
                    blocks.len() - 1
                });
                blocks[b].push(w);
            }
            (ks.agent_name(i).to_string(), blocks)
        })
        .collect();
    Ok((KripkeModel::new(names, valuation, partitions)?, states))
}

/// Result of turning a Kripke model into a knowledge structure.
#[derive(Debug, Clone)]
pub struct FromKripke<E: Engine> {
    pub ks: KnowledgeStructure<E>,
    pub spec: ModelSpec,
    /// Image of each world.
    pub g: Vec<State>,
    /// Observable bits allocated per agent.
    pub obs_bits: Vec<Vec<String>>,
    /// Unobserved bits separating worlds that would otherwise share an image.
    pub tag_bits: Vec<String>,
}

fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Builds `F_M`. Each agent observes `ceil(log2 #classes)` new bits holding
/// its class code (classes numbered by least world). When two worlds agree
/// on the valuation and on every class they receive distinct values of a
/// few extra unobserved bits, so the state set of `F_M` is in bijection
/// with the worlds. The theory is the disjunction of the images' minterms.
pub fn from_kripke<E: Engine>(engine: Rc<E>, m: &KripkeModel) -> Result<FromKripke<E>, Error> {
    let mut taken: BTreeSet<String> = m.vars.iter().cloned().collect();
    let mut fresh = |base: String| {
        let mut name = base;
        while taken.contains(&name) {
            name.insert(0, '_');
        }
        taken.insert(name.clone());
        name
    };
    let obs_bits: Vec<Vec<String>> = m
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| (0..bits_for(m.partitions[i].len())).map(|k| fresh(format!("o_{a}_{k}"))).collect())
        .collect();

    // image without tags
    let images: Vec<BTreeSet<String>> = (0..m.num_worlds())
        .map(|w| {
            let mut s = m.valuation[w].clone();
            for (i, bits) in obs_bits.iter().enumerate() {
                let code = m.class_of[i][w];
                s.extend(bits.iter().enumerate().filter(|(k, _)| code >> k & 1 == 1).map(|(_, b)| b.clone()));
            }
            s
        })
        .collect();
    let mut seen: HashMap<&BTreeSet<String>, usize> = HashMap::new();
    let dup_index: Vec<usize> = images
        .iter()
        .map(|img| {
            let c = seen.entry(img).or_insert(0);
            *c += 1;
            *c - 1
        })
        .collect();
    let max_dup = seen.values().copied().max().unwrap_or(1);
    let tag_bits: Vec<String> = (0..bits_for(max_dup)).map(|k| fresh(format!("t_{k}"))).collect();
    let images: Vec<BTreeSet<String>> = images
        .into_iter()
        .zip(&dup_index)
        .map(|(mut s, &d)| {
            s.extend(tag_bits.iter().enumerate().filter(|(k, _)| d >> k & 1 == 1).map(|(_, b)| b.clone()));
            s
        })
        .collect();

    let mut vars = m.vars.clone();
    vars.extend(obs_bits.iter().flatten().cloned());
    vars.extend(tag_bits.iter().cloned());
    let minterm = |img: &BTreeSet<String>| {
        Formula::conj(vars.iter().map(|v| {
            if img.contains(v) {
                Formula::atom(v.clone())
            } else {
                Formula::not(Formula::atom(v.clone()))
            }
        }))
    };
    let spec = ModelSpec {
        vars: vars.clone(),
        agents: m.agents.iter().cloned().zip(obs_bits.iter().cloned()).collect(),
        axioms: vec![Formula::disj(images.iter().map(minterm))],
    };
    let ks = KnowledgeStructure::from_spec(engine, &spec)?;
    let g = images
        .iter()
        .map(|img| ks.state_from_names(&img.iter().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FromKripke { ks, spec, g, obs_bits, tag_bits })
}

/// Checks the three correspondence claims of the conversion:
/// local states match the relations, valuations are preserved on the
/// original vocabulary, and the states are exactly the images of worlds.
pub fn check_claims<E: Engine>(m: &KripkeModel, conv: &FromKripke<E>) -> Result<(), String> {
    let ks = &conv.ks;
    let n = m.num_worlds();
    for i in ks.agent_ids() {
        for w1 in 0..n {
            for w2 in 0..n {
                let l1 = conv.g[w1].vars().intersection(ks.obs(i));
                let l2 = conv.g[w2].vars().intersection(ks.obs(i));
                if (l1 == l2) != m.same_class(i.0, w1, w2) {
                    return Err(format!("C1 fails for agent {} at worlds {w1}, {w2}", ks.agent_name(i)));
                }
            }
        }
    }
    for w in 0..n {
        for v in &m.vars {
            let var = ks.var(v).map_err(|e| e.to_string())?;
            if conv.g[w].contains(var) != m.valuation[w].contains(v) {
                return Err(format!("C2 fails at world {w} for `{v}`"));
            }
        }
    }
    let states: BTreeSet<State> = ks.states(usize::MAX).map_err(|e| e.to_string())?.into_iter().collect();
    let image: BTreeSet<State> = conv.g.iter().cloned().collect();
    if states != image || image.len() != n {
        return Err(format!("C3 fails: {} states, {} distinct images, {n} worlds", states.len(), image.len()));
    }
    Ok(())
}
