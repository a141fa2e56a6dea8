//! The Needham-Schroeder public-key protocol, in its revised form (the
//! responder names itself in message 2) and its original form.
//!
//! Atom names:
//!
//! | atom                  | meaning                                  |
//! |-----------------------|------------------------------------------|
//! | `fresh_Na`            | nonce Na is fresh                        |
//! | `fresh_Nb`            | nonce Nb is fresh                        |
//! | `role_Init_A`         | A is the initiator                       |
//! | `role_Resp_B`         | B is the responder                       |
//! | `RespA_B`             | A assumes the responder is B             |
//! | `InitB_A`             | B assumes the initiator is A             |
//! | `NaB_Na`              | B's view of the initiator nonce is Na    |
//! | `NbA_Nb`              | A's view of the responder nonce is Nb    |
//! | `said_B_Na`           | B said Na                                |
//! | `said_A_Nb`           | A said Nb                                |
//! | `sees_B_Na_A_Kb`      | B sees message 1                         |
//! | `sees_A_B_NaB_Nb_Ka`  | A sees message 2                         |
//! | `said_A_Na`           | A said Na                                |
//! | `said_B_Nb`           | B said Nb                                |
//!
//! The last two are not part of the protocol vocabulary proper but are
//! mentioned by the specifications; they are tied to the roles by
//! `role_Init_A -> said_A_Na` and `role_Resp_B -> said_B_Nb`.
//! In the original variant `sees_A_B_NaB_Nb_Ka` stands for A seeing the
//! shorter second message `{Na, Nb}_Ka`.

use std::rc::Rc;

use serde::Serialize;

use crate::boolfn::Bdd;
use crate::eval::{counterexample, realized, truth_set_fn};
use crate::kstruct::KnowledgeStructure;
use crate::lang::{parse_formula, Formula, ModelSpec};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NsVariant {
    Revised,
    Original,
}

impl std::str::FromStr for NsVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "revised" => Ok(NsVariant::Revised),
            "original" => Ok(NsVariant::Original),
            _ => Err(Error::InvalidArgument(format!("unknown variant `{s}`"))),
        }
    }
}

const PROTOCOL_VARS: [&str; 12] = [
    "fresh_Na",
    "fresh_Nb",
    "role_Init_A",
    "role_Resp_B",
    "RespA_B",
    "InitB_A",
    "NaB_Na",
    "NbA_Nb",
    "said_B_Na",
    "said_A_Nb",
    "sees_B_Na_A_Kb",
    "sees_A_B_NaB_Nb_Ka",
];

const REPAIR_VARS: [&str; 2] = ["said_A_Na", "said_B_Nb"];

const AXIOMS: [&str; 7] = [
    "sees_B_Na_A_Kb & said_B_Na & fresh_Na -> role_Resp_B",
    "sees_A_B_NaB_Nb_Ka & said_A_Nb & fresh_Nb -> role_Init_A",
    "role_Resp_B & sees_B_Na_A_Kb & said_B_Na & fresh_Na -> InitB_A & NaB_Na",
    "role_Init_A & sees_A_B_NaB_Nb_Ka & said_A_Nb & fresh_Nb -> RespA_B & NaB_Na & NbA_Nb",
    "role_Init_A & RespA_B -> sees_B_Na_A_Kb & said_B_Na",
    "role_Resp_B & InitB_A -> sees_A_B_NaB_Nb_Ka & said_A_Nb",
    "(role_Init_A -> fresh_Na) & (role_Resp_B -> fresh_Nb)",
];

const ORIGINAL_FOURTH: &str = "role_Init_A & sees_A_B_NaB_Nb_Ka & said_A_Nb & fresh_Nb -> NaB_Na & NbA_Nb";

const REPAIR_AXIOMS: [&str; 2] = ["role_Init_A -> said_A_Na", "role_Resp_B -> said_B_Nb"];

const OBS_A: [&str; 3] = ["fresh_Na", "role_Init_A", "RespA_B"];
const OBS_B: [&str; 3] = ["fresh_Nb", "role_Resp_B", "InitB_A"];

/// A specification `premise -> K_x K_y goal`.
#[derive(Debug, Clone)]
pub struct NsSpec {
    pub name: &'static str,
    pub premise: Formula,
    pub chain: [&'static str; 2],
    pub goal: Formula,
}

impl NsSpec {
    pub fn formula(&self) -> Formula {
        let mut f = self.goal.clone();
        for a in self.chain.iter().rev() {
            f = Formula::knows(*a, f);
        }
        Formula::implies(self.premise.clone(), f)
    }
}

#[derive(Debug, Clone)]
pub struct NsInstance {
    pub variant: NsVariant,
    pub model: ModelSpec,
    pub ks: KnowledgeStructure<Bdd>,
    pub specs: [NsSpec; 2],
}

fn pf(s: &str) -> Formula {
    parse_formula(s).expect("fixed formula")
}

fn specs() -> [NsSpec; 2] {
    [
        NsSpec {
            name: "Spec_A",
            premise: pf("fresh_Na & role_Init_A & RespA_B"),
            chain: ["A", "B"],
            goal: pf("said_A_Na & fresh_Na"),
        },
        NsSpec {
            name: "Spec_B",
            premise: pf("fresh_Nb & role_Resp_B & InitB_A"),
            chain: ["B", "A"],
            goal: pf("said_B_Nb & fresh_Nb"),
        },
    ]
}

/// The protocol model. With `repaired` unset the two specification-only
/// atoms and their axioms are left out.
pub fn ns_model(variant: NsVariant, repaired: bool) -> ModelSpec {
    let mut vars: Vec<String> = PROTOCOL_VARS.iter().map(|s| s.to_string()).collect();
    let mut axioms: Vec<Formula> = AXIOMS.iter().map(|s| pf(s)).collect();
    if variant == NsVariant::Original {
        axioms[3] = pf(ORIGINAL_FOURTH);
    }
    if repaired {
        vars.extend(REPAIR_VARS.iter().map(|s| s.to_string()));
        axioms.extend(REPAIR_AXIOMS.iter().map(|s| pf(s)));
    }
    let obs = |o: &[&str]| o.iter().map(|s| s.to_string()).collect();
    ModelSpec { vars, agents: vec![("A".into(), obs(&OBS_A)), ("B".into(), obs(&OBS_B))], axioms }
}

pub fn ns_build(variant: NsVariant) -> NsInstance {
    let model = ns_model(variant, true);
    let ks = KnowledgeStructure::from_spec(Rc::new(Bdd::new()), &model).expect("protocol theory is consistent");
    NsInstance { variant, model, ks, specs: specs() }
}

#[derive(Debug, Clone, Serialize)]
pub struct NsSpecResult {
    pub name: &'static str,
    pub holds: bool,
    /// Verdict of the nested strongest-necessary-condition route.
    pub nested_holds: bool,
    /// A state where the specification fails, as its true atoms.
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NsReport {
    pub variant: NsVariant,
    pub specs: Vec<NsSpecResult>,
}

impl NsReport {
    pub fn holds(&self, name: &str) -> bool {
        self.specs.iter().any(|s| s.name == name && s.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.specs.iter().all(|s| s.holds)
    }
}

/// Checks both specifications through truth sets and through the nested
/// SNC route. A disagreement between the routes is an error.
pub fn ns_verify(inst: &NsInstance) -> Result<NsReport, Error> {
    let ks = &inst.ks;
    let mut out = Vec::new();
    for spec in &inst.specs {
        let f = spec.formula();
        let holds = realized(ks, &f)?;
        let chain = spec.chain.iter().map(|a| ks.agent(a)).collect::<Result<Vec<_>, _>>()?;
        let premise = truth_set_fn(ks, &spec.premise)?;
        let goal = truth_set_fn(ks, &spec.goal)?;
        let nested_holds = ks.nested_holds(premise, &chain, goal)?;
        if holds != nested_holds {
            return Err(Error::InvalidArgument(format!(
                "{}: truth-set route says {holds}, nested route says {nested_holds}",
                spec.name
            )));
        }
        let counterexample = counterexample(ks, &f)?.map(|s| ks.state_names(&s));
        out.push(NsSpecResult { name: spec.name, holds, nested_holds, counterexample });
    }
    Ok(NsReport { variant: inst.variant, specs: out })
}

/// Verification against the unrepaired vocabulary. Fails with an unbound
/// atom, since the specifications mention atoms the protocol never declares.
pub fn ns_strict_verify(variant: NsVariant) -> Result<NsReport, Error> {
    let model = ns_model(variant, false);
    let ks = KnowledgeStructure::from_spec(Rc::new(Bdd::new()), &model)?;
    let mut out = Vec::new();
    for spec in specs() {
        let f = spec.formula();
        let holds = realized(&ks, &f)?;
        out.push(NsSpecResult { name: spec.name, holds, nested_holds: holds, counterexample: None });
    }
    Ok(NsReport { variant, specs: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Engine;
    use crate::kripke::build_kripke;

    #[test]
    fn shape() {
        let r = ns_build(NsVariant::Revised);
        let o = ns_build(NsVariant::Original);
        assert_eq!(r.model.vars.len(), 14);
        assert_eq!(r.model.axioms.len(), 9);
        let differing = r.model.axioms.iter().zip(&o.model.axioms).filter(|(a, b)| a != b).count();
        assert_eq!(differing, 1);
        assert_eq!(r.model.vars, o.model.vars);
        let names = |i: usize| -> Vec<String> { r.ks.obs(crate::kstruct::AgentId(i)).iter().map(|v| r.ks.engine().var_name(v)).collect() };
        assert_eq!(names(0), OBS_A);
        assert_eq!(names(1), OBS_B);
    }

    #[test]
    fn revised_protocol_is_correct() {
        let rep = ns_verify(&ns_build(NsVariant::Revised)).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert!(rep.specs.iter().all(|s| s.counterexample.is_none()));
    }

    #[test]
    fn original_protocol_counterexamples_are_genuine() {
        let inst = ns_build(NsVariant::Original);
        let rep = ns_verify(&inst).unwrap();
        let ks = &inst.ks;
        for (spec, res) in inst.specs.iter().zip(&rep.specs) {
            match &res.counterexample {
                None => assert!(res.holds),
                Some(names) => {
                    assert!(!res.holds);
                    let s = ks.state_from_names(names).unwrap();
                    let premise = truth_set_fn(ks, &spec.premise).unwrap();
                    let consequent = truth_set_fn(ks, &Formula::knows(spec.chain[0], Formula::knows(spec.chain[1], spec.goal.clone()))).unwrap();
                    assert!(ks.satisfies(&s, premise));
                    assert!(!ks.satisfies(&s, consequent));
                }
            }
        }
        assert!(!rep.holds("Spec_B"));
    }

    #[test]
    fn strict_run_reports_unbound_atom() {
        let err = ns_strict_verify(NsVariant::Revised).unwrap_err();
        assert!(matches!(err, Error::UnboundVariable(ref a) if a == "said_A_Na"), "{err}");
        assert!(err.to_string().contains("atom unbound"));
    }

    #[test]
    fn kripke_oracle_agrees() {
        for variant in [NsVariant::Revised, NsVariant::Original] {
            let inst = ns_build(variant);
            let rep = ns_verify(&inst).unwrap();
            let (m, _) = build_kripke(&inst.ks, 1 << 14).unwrap();
            for (spec, res) in inst.specs.iter().zip(&rep.specs) {
                let worlds = m.truth_worlds(&spec.formula()).unwrap();
                assert_eq!(worlds.iter().all(|&b| b), res.holds);
            }
        }
    }
}
