//! Symbolic epistemic model checking over knowledge structures.
//!
//! Knowledge, common knowledge and public announcements are all reduced to
//! Boolean quantification ("variable forgetting") over a canonical function
//! store, with explicit Kripke models kept around as a brute-force oracle.

pub mod boolfn;
pub mod eval;
pub mod gen;
pub mod group;
pub mod kripke;
pub mod kstruct;
pub mod lang;
pub mod pal;
pub mod suite;

#[cfg(test)]
mod testutil;

pub use boolfn::{Bdd, Engine, Func, TruthTable, Var, VarSet};
pub use kstruct::{AgentId, KnowledgeStructure, State};
pub use lang::{parse_formula, parse_model, Formula, Fragment};

use boolfn::BoolFnError;
use lang::LangError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("atom unbound: `{0}`")]
    UnboundVariable(String),
    #[error("inconsistent theory")]
    InconsistentTheory,
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("agent group must not be empty")]
    EmptyGroup,
    #[error("formula is not in the positive fragment (classified as {0})")]
    NotPositive(Fragment),
    #[error("announcement {index} is false at every state")]
    VacuousAnnouncement { index: usize },
    #[error("unknown world {0}")]
    UnknownWorld(usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{0}")]
    Kripke(String),
}

impl Error {
    /// True when the error comes from an enumeration or capacity limit.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::BoolFn(BoolFnError::CapExceeded { .. }))
    }
}
