//! Formula syntax and model files.

mod formula;
mod model;
mod parse;
mod print;

pub use formula::{Formula, Fragment};
pub use model::ModelSpec;
pub use parse::parse_formula;
pub use print::print_formula;

use thiserror::Error;

use crate::boolfn::Bdd;
use crate::kstruct::KnowledgeStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: common-knowledge group must not be empty")]
    EmptyAgentSet { line: usize, col: usize },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("line {line}: {msg}")]
    Model { line: usize, msg: String },
    #[error("line {line}: undeclared variable `{name}`")]
    UndeclaredVariable { line: usize, name: String },
    #[error("line {line}: axioms must be propositional")]
    NonPropositionalAxiom { line: usize },
}

impl LangError {
    pub(crate) fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Self {
        LangError::Syntax { line, col, msg: msg.into() }
    }
}

/// Smallest fragment the formula belongs to.
pub fn classify(f: &Formula) -> Fragment {
    f.classify()
}

/// Parses an `.eks` model into a BDD-backed knowledge structure.
pub fn parse_model(text: &str) -> Result<KnowledgeStructure<Bdd>, crate::Error> {
    let spec = ModelSpec::parse(text)?;
    KnowledgeStructure::from_spec(std::rc::Rc::new(Bdd::new()), &spec)
}
