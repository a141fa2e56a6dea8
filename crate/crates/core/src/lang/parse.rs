//! Recursive-descent parser for the formula language.
//!
//! Binding, loosest to tightest: `<->`, `->` (right-assoc), `|`, `&`, then the
//! prefix forms `~`, `K[a]`, `C[a,b]`, `[phi]`, `E{v..}`, `A{v..}`.

use std::collections::HashSet;

use super::formula::Formula;
use super::LangError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, line0: usize) -> Result<Vec<Spanned>, LangError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (line0, 1);
    while let Some(&c) = chars.peek() {
        let (l, co) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let tok = match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '~' => single(&mut chars, &mut bump, Tok::Not),
            '&' => single(&mut chars, &mut bump, Tok::And),
            '|' => single(&mut chars, &mut bump, Tok::Or),
            '(' => single(&mut chars, &mut bump, Tok::LParen),
            ')' => single(&mut chars, &mut bump, Tok::RParen),
            '[' => single(&mut chars, &mut bump, Tok::LBracket),
            ']' => single(&mut chars, &mut bump, Tok::RBracket),
            '{' => single(&mut chars, &mut bump, Tok::LBrace),
            '}' => single(&mut chars, &mut bump, Tok::RBrace),
            ',' => single(&mut chars, &mut bump, Tok::Comma),
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Implies
                } else {
                    return Err(LangError::syntax(l, co, "expected `->`"));
                }
            }
            '<' => {
                bump(&mut chars);
                let ok = chars.peek() == Some(&'-') && {
                    bump(&mut chars);
                    chars.peek() == Some(&'>')
                };
                if !ok {
                    return Err(LangError::syntax(l, co, "expected `<->`"));
                }
                bump(&mut chars);
                Tok::Iff
            }
            c if is_word_char(c) && c != '\'' => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    w.push(c);
                    bump(&mut chars);
                }
                Tok::Word(w)
            }
            other => {
                return Err(LangError::syntax(l, co, format!("unexpected character `{other}`")))
            }
        };
        out.push(Spanned { tok, line: l, col: co });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

fn single<F>(chars: &mut std::iter::Peekable<std::str::Chars>, bump: &mut F, tok: Tok) -> Tok
where
    F: FnMut(&mut std::iter::Peekable<std::str::Chars>) -> Option<char>,
{
    bump(chars);
    tok
}

fn is_identifier(w: &str) -> bool {
    w.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        let (l, c) = self.here();
        Err(LangError::syntax(l, c, msg))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), LangError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn word(&mut self, what: &str) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.advance();
                Ok(w)
            }
            other => self.err(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn variable(&mut self) -> Result<String, LangError> {
        let (l, c) = self.here();
        let w = self.word("a variable")?;
        if !is_identifier(&w) || w == "true" || w == "false" {
            return Err(LangError::syntax(l, c, format!("`{w}` is not a variable name")));
        }
        Ok(w)
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.advance();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, LangError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.advance();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LangError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LangError> {
        match (self.peek().clone(), self.peek2().clone()) {
            (Tok::Not, _) => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            (Tok::Word(w), Tok::LBracket) if w == "K" => {
                self.advance();
                self.advance();
                let agent = self.word("an agent name")?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::knows(agent, self.unary()?))
            }
            (Tok::Word(w), Tok::LBracket) if w == "C" => {
                self.advance();
                self.advance();
                let (l, c) = self.here();
                if *self.peek() == Tok::RBracket {
                    return Err(LangError::EmptyAgentSet { line: l, col: c });
                }
                let mut group = vec![self.word("an agent name")?];
                while *self.peek() == Tok::Comma {
                    self.advance();
                    let (l, c) = self.here();
                    let a = self.word("an agent name")?;
                    if group.contains(&a) {
                        return Err(LangError::syntax(l, c, format!("duplicate agent `{a}`")));
                    }
                    group.push(a);
                }
                self.expect(Tok::RBracket)?;
                Ok(Formula::Common(group, Box::new(self.unary()?)))
            }
            (Tok::Word(w), Tok::LBrace) if w == "E" || w == "A" => {
                self.advance();
                self.advance();
                let (l, c) = self.here();
                let mut vars = Vec::new();
                let mut seen = HashSet::new();
                while let Tok::Word(_) = self.peek() {
                    let v = self.variable()?;
                    if !seen.insert(v.clone()) {
                        return Err(LangError::DuplicateVariable(v));
                    }
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(LangError::syntax(l, c, "empty quantifier variable list"));
                }
                self.expect(Tok::RBrace)?;
                let body = self.unary()?;
                if !body.is_propositional() {
                    return Err(LangError::syntax(l, c, "quantifiers may only wrap propositional formulas"));
                }
                Ok(if w == "E" {
                    Formula::Exists(vars, Box::new(body))
                } else {
                    Formula::Forall(vars, Box::new(body))
                })
            }
            (Tok::LBracket, _) => {
                self.advance();
                let announced = self.formula()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::announce(announced, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, LangError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Word(w) if w == "true" => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::Word(w) if w == "false" => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::Word(_) => Ok(Formula::Atom(self.variable()?)),
            other => self.err(format!("expected a formula, found {}", other.describe())),
        }
    }
}

/// Parses a complete formula.
pub fn parse_formula(text: &str) -> Result<Formula, LangError> {
    parse_formula_at(text, 1)
}

/// Parses a formula whose first line is reported as `line`.
pub(crate) fn parse_formula_at(text: &str, line: usize) -> Result<Formula, LangError> {
    let mut p = Parser { toks: lex(text, line)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after formula", p.peek().describe()));
    }
    Ok(f)
}
