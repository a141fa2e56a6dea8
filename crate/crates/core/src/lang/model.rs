//! `.eks` model files: variable declarations, agents with observable sets,
//! and propositional axioms.
//!
//! ```text
//! vars p, q
//! agent 1 obs p
//! agent 2 obs q
//! axiom p -> q      # comment
//! ```

use std::collections::HashSet;

use super::formula::Formula;
use super::parse::parse_formula_at;
use super::LangError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelSpec {
    pub vars: Vec<String>,
    pub agents: Vec<(String, Vec<String>)>,
    pub axioms: Vec<Formula>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn names(list: &str, line: usize) -> Result<Vec<String>, LangError> {
    let list = list.trim();
    if list.is_empty() {
        return Ok(Vec::new());
    }
    list.split(',')
        .map(|s| {
            let s = s.trim();
            let ok = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
                && s != "true"
                && s != "false";
            if ok {
                Ok(s.to_string())
            } else {
                Err(LangError::Model { line, msg: format!("`{s}` is not a valid identifier") })
            }
        })
        .collect()
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self, LangError> {
        let mut spec = ModelSpec::default();
        let mut declared = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
            match keyword {
                "vars" => {
                    for v in names(rest, line)? {
                        if !declared.insert(v.clone()) {
                            return Err(LangError::DuplicateVariable(v));
                        }
                        spec.vars.push(v);
                    }
                }
                "agent" => {
                    let rest = rest.trim();
                    let (name, tail) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let tail = tail.trim();
                    let obs = tail.strip_prefix("obs").filter(|t| t.is_empty() || t.starts_with(char::is_whitespace));
                    let Some(obs) = obs else {
                        return Err(LangError::Model { line, msg: "expected `agent <name> obs <vars>`".into() });
                    };
                    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                        return Err(LangError::Model { line, msg: format!("invalid agent name `{name}`") });
                    }
                    if spec.agents.iter().any(|(a, _)| a == name) {
                        return Err(LangError::Model { line, msg: format!("duplicate agent `{name}`") });
                    }
                    let obs = names(obs, line)?;
                    if let Some(v) = obs.iter().find(|v| !declared.contains(*v)) {
                        return Err(LangError::UndeclaredVariable { line, name: v.clone() });
                    }
                    spec.agents.push((name.to_string(), obs));
                }
                "axiom" => {
                    let f = parse_formula_at(rest, line)?;
                    if !f.is_propositional() {
                        return Err(LangError::NonPropositionalAxiom { line });
                    }
                    if let Some(v) = f.atoms().into_iter().find(|v| !declared.contains(v)) {
                        return Err(LangError::UndeclaredVariable { line, name: v });
                    }
                    spec.axioms.push(f);
                }
                other => {
                    return Err(LangError::Model { line, msg: format!("unknown directive `{other}`") });
                }
            }
        }
        Ok(spec)
    }

    /// Reorders `vars` to follow `order`, which must be a permutation of them.
    pub fn with_order(mut self, order: &[String]) -> Result<Self, LangError> {
        let mut a: Vec<&String> = self.vars.iter().collect();
        let mut b: Vec<&String> = order.iter().collect();
        a.sort();
        b.sort();
        if a != b {
            return Err(LangError::Model {
                line: 0,
                msg: "variable order must list every declared variable exactly once".into(),
            });
        }
        self.vars = order.to_vec();
        Ok(self)
    }

    /// Renders the spec back into `.eks` text.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.vars.is_empty() {
            out.push_str(&format!("vars {}\n", self.vars.join(", ")));
        }
        for (a, obs) in &self.agents {
            if obs.is_empty() {
                out.push_str(&format!("agent {a} obs\n"));
            } else {
                out.push_str(&format!("agent {a} obs {}\n", obs.join(", ")));
            }
        }
        for ax in &self.axioms {
            out.push_str(&format!("axiom {ax}\n"));
        }
        out
    }
}
