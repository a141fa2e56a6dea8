use std::fmt::{self, Write};

use super::formula::Formula;

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(out: &mut impl Write, f: &Formula, min: u8) -> fmt::Result {
    if prec(f) < min {
        out.write_char('(')?;
        write_formula(out, f)?;
        return out.write_char(')');
    }
    write_formula(out, f)
}

fn write_formula(out: &mut impl Write, f: &Formula) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Atom(a) => out.write_str(a),
        Formula::Not(g) => {
            out.write_char('~')?;
            write_at(out, g, UNARY)
        }
        Formula::And(a, b) => infix(out, a, " & ", b, AND, UNARY),
        Formula::Or(a, b) => infix(out, a, " | ", b, OR, AND),
        Formula::Implies(a, b) => infix(out, a, " -> ", b, OR, IMPLIES),
        Formula::Iff(a, b) => infix(out, a, " <-> ", b, IFF, IMPLIES),
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            let q = if matches!(f, Formula::Exists(..)) { 'E' } else { 'A' };
            write!(out, "{q}{{{}}} ", vs.join(" "))?;
            write_at(out, g, UNARY)
        }
        Formula::Knows(a, g) => {
            write!(out, "K[{a}] ")?;
            write_at(out, g, UNARY)
        }
        Formula::Common(group, g) => {
            write!(out, "C[{}] ", group.join(","))?;
            write_at(out, g, UNARY)
        }
        Formula::Announce(a, g) => {
            out.write_char('[')?;
            write_formula(out, a)?;
            out.write_str("] ")?;
            write_at(out, g, UNARY)
        }
    }
}

fn infix(out: &mut impl Write, a: &Formula, op: &str, b: &Formula, left: u8, right: u8) -> fmt::Result {
    write_at(out, a, left)?;
    out.write_str(op)?;
    write_at(out, b, right)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

/// Concrete syntax of a formula; parses back to the same tree.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
