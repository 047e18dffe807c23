// SPDX-License-Identifier: Apache-2.0

//! Canonical source rendering. Output of these functions parses back to a
//! structurally identical tree.

use std::fmt::Write;

use crate::asm_exec::State;
use crate::spec_lang::ast::{Expr, Model, Requirement, Rule, Term, VarId};

const INDENT: &str = "  ";

pub fn model(m: &Model) -> String {
    let mut out = String::new();
    for d in m.domains() {
        writeln!(out, "domain {} {{ {} }}", d.name, d.values.join(" ")).unwrap();
    }
    if !m.domains().is_empty() {
        out.push('\n');
    }
    for v in m.vars() {
        writeln!(out, "var {} : {} {}", v.name, m.domain(v.domain).name, v.kind).unwrap();
    }
    out.push('\n');
    let blocks: Vec<String> = m.init().iter().map(|s| init_block(m, s)).collect();
    writeln!(out, "init {}", blocks.join("\n   | ")).unwrap();
    out.push('\n');
    out.push_str("main\n");
    rule_into(m, m.main(), 1, &mut out);
    out
}

fn init_block(m: &Model, s: &State) -> String {
    let pairs: Vec<String> = m
        .state_pairs(s)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    format!("{{ {} }}", pairs.join(" "))
}

pub fn rule(m: &Model, r: &Rule) -> String {
    let mut out = String::new();
    rule_into(m, r, 0, &mut out);
    out
}

fn rule_into(m: &Model, r: &Rule, depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    match r {
        Rule::Skip => writeln!(out, "{pad}skip").unwrap(),
        Rule::Assign { target, value } => {
            writeln!(out, "{pad}{} := {}", m.var(*target).name, term(m, value)).unwrap()
        }
        Rule::Par(children) => {
            writeln!(out, "{pad}par {{").unwrap();
            for c in children {
                rule_into(m, c, depth + 1, out);
            }
            writeln!(out, "{pad}}}").unwrap();
        }
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            writeln!(out, "{pad}if {} then", expr(m, guard)).unwrap();
            rule_into(m, then, depth + 1, out);
            if let Some(e) = otherwise {
                writeln!(out, "{pad}else").unwrap();
                rule_into(m, e, depth + 1, out);
            }
            writeln!(out, "{pad}end").unwrap();
        }
    }
}

pub fn term(m: &Model, t: &Term) -> String {
    match t {
        Term::Var(v) => m.var(*v).name.clone(),
        Term::Const { domain, value } => m.domain(*domain).values[value.0 as usize].clone(),
    }
}

// Binding strength, weakest first.
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Implies(..) => IMPLIES,
        Expr::Or(..) => OR,
        Expr::And(..) => AND,
        Expr::Not(_) => NOT,
        Expr::Eq(..) | Expr::Neq(..) => ATOM,
    }
}

/// Renders `e` with the minimum parentheses needed to reparse it.
pub fn expr(m: &Model, e: &Expr) -> String {
    let mut out = String::new();
    expr_into(m, e, IMPLIES, &mut out);
    out
}

fn expr_into(m: &Model, e: &Expr, min: u8, out: &mut String) {
    let p = prec(e);
    let wrap = p < min;
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Eq(l, r) => write!(out, "{} = {}", term(m, l), term(m, r)).unwrap(),
        Expr::Neq(l, r) => write!(out, "{} /= {}", term(m, l), term(m, r)).unwrap(),
        Expr::Not(x) => {
            out.push_str("not ");
            expr_into(m, x, NOT, out);
        }
        Expr::And(l, r) => binary(m, l, "and", r, p, p + 1, out),
        Expr::Or(l, r) => binary(m, l, "or", r, p, p + 1, out),
        Expr::Implies(l, r) => binary(m, l, "implies", r, p + 1, p, out),
    }
    if wrap {
        out.push(')');
    }
}

fn binary(m: &Model, l: &Expr, op: &str, r: &Expr, lmin: u8, rmin: u8, out: &mut String) {
    expr_into(m, l, lmin, out);
    write!(out, " {op} ").unwrap();
    expr_into(m, r, rmin, out);
}

pub fn requirement(m: &Model, r: &Requirement) -> String {
    let budget = r.k.map(|k| format!(" k={k}")).unwrap_or_default();
    format!(
        "req {} {}{}\n  stimulus ({})\n  response ({})\n",
        r.name,
        r.kind,
        budget,
        expr(m, &r.stimulus),
        expr(m, &r.response)
    )
}

pub fn requirements(m: &Model, reqs: &[Requirement]) -> String {
    reqs.iter()
        .map(|r| requirement(m, r))
        .collect::<Vec<_>>()
        .join("\n")
}

/// `name=value` assignment list for the monitored part of `state`, as used by
/// simulation scripts.
pub fn env_line(m: &Model, state: &State) -> String {
    m.monitored()
        .iter()
        .map(|&v: &VarId| format!("{}={}", m.var(v).name, m.value_name(v, state.get(v))))
        .collect::<Vec<_>>()
        .join(" ")
}
