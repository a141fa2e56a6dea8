use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolfn::{Bdd, Engine, Func};
use crate::eval::compile_propositional;
use crate::kstruct::{AgentId, KnowledgeStructure};
use crate::lang::parse_model;

pub use crate::gen::{random_formula, random_positive_formula, random_prop_formula, random_structure};

pub const F0: &str = "vars p, q\nagent 1 obs p\nagent 2 obs q\naxiom p -> q\n";

pub const COMM: &str = "vars Alice_send_msg, Alice_recv_ack, Bob_recv_msg, Bob_send_ack
agent A obs Alice_send_msg, Alice_recv_ack
agent B obs Bob_recv_msg, Bob_send_ack
axiom Bob_recv_msg -> Alice_send_msg
axiom Bob_send_ack -> Bob_recv_msg
axiom Alice_recv_ack -> Bob_send_ack
";

pub fn f0() -> KnowledgeStructure<Bdd> {
    parse_model(F0).unwrap()
}

pub fn comm() -> KnowledgeStructure<Bdd> {
    parse_model(COMM).unwrap()
}

pub fn random_objective<E: Engine, R: Rng>(rng: &mut R, ks: &KnowledgeStructure<E>, depth: usize) -> Func {
    let f = random_prop_formula(rng, &ks.var_names(), depth);
    compile_propositional(ks.engine(), &f, &|n| ks.var(n)).unwrap()
}

pub fn random_group<R: Rng>(rng: &mut R, nagents: usize) -> Vec<AgentId> {
    let k = rng.gen_range(1..=nagents);
    let mut ids: Vec<AgentId> = (0..nagents).map(AgentId).collect();
    ids.shuffle(rng);
    ids.truncate(k);
    ids.sort();
    ids
}

#[allow(dead_code)]
pub fn bdd() -> Rc<Bdd> {
    Rc::new(Bdd::new())
}
