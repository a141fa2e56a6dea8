use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// Epistemic / public-announcement formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    /// Forgetting: `E{v..} f`. Only wraps propositional subtrees.
    Exists(Vec<String>, Box<Formula>),
    /// Dual forgetting: `A{v..} f`.
    Forall(Vec<String>, Box<Formula>),
    Knows(String, Box<Formula>),
    Common(Vec<String>, Box<Formula>),
    /// `[announced] then`
    Announce(Box<Formula>, Box<Formula>),
}

/// Language fragments, ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Fragment {
    Propositional,
    PositiveK,
    FullEpistemic,
    Pal,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Propositional => "propositional",
            Fragment::PositiveK => "positive-K",
            Fragment::FullEpistemic => "full-epistemic",
            Fragment::Pal => "PAL",
        })
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn knows(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::Knows(agent.into(), Box::new(f))
    }

    pub fn common<S: Into<String>>(agents: impl IntoIterator<Item = S>, f: Formula) -> Formula {
        Formula::Common(agents.into_iter().map(Into::into).collect(), Box::new(f))
    }

    pub fn announce(a: Formula, b: Formula) -> Formula {
        Formula::Announce(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::Knows(_, f)
            | Formula::Common(_, f) => vec![f],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Announce(a, b) => vec![a, b],
        }
    }

    /// No modal or announcement operator anywhere.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Knows(..) | Formula::Common(..) | Formula::Announce(..) => false,
            _ => self.children().into_iter().all(Formula::is_propositional),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Formula::depth).max().unwrap_or(0)
    }

    /// Variable names mentioned, including quantifier lists.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Exists(vs, _) | Formula::Forall(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Agent names mentioned in modal operators.
    pub fn agents(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Knows(a, _) => {
                out.insert(a.clone());
            }
            Formula::Common(g, _) => out.extend(g.iter().cloned()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut dyn FnMut(&Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    /// Smallest fragment containing the formula.
    pub fn classify(&self) -> Fragment {
        let mut has_announce = false;
        let mut has_common = false;
        let mut has_knows = false;
        self.walk(&mut |f| match f {
            Formula::Announce(..) => has_announce = true,
            Formula::Common(..) => has_common = true,
            Formula::Knows(..) => has_knows = true,
            _ => {}
        });
        if has_announce {
            Fragment::Pal
        } else if has_common || !self.negation_is_propositional() {
            Fragment::FullEpistemic
        } else if has_knows {
            Fragment::PositiveK
        } else {
            Fragment::Propositional
        }
    }

    /// Every (possibly implicit) negation covers a propositional subtree:
    /// `Not`, the antecedent of `Implies`, and both sides of `Iff`.
    fn negation_is_propositional(&self) -> bool {
        match self {
            Formula::Not(f) => f.is_propositional(),
            Formula::Implies(a, b) => a.is_propositional() && b.negation_is_propositional(),
            Formula::Iff(a, b) => a.is_propositional() && b.is_propositional(),
            _ => self.children().into_iter().all(Formula::negation_is_propositional),
        }
    }
}
