// SPDX-License-Identifier: Apache-2.0

//! Recursive descent parser for model and requirement files.
//!
//! Declarations precede their uses (`domain*`, then `var*`, then `init`,
//! then `main`), so names are resolved during the single parsing pass.

use std::collections::{HashMap, HashSet};

use crate::asm_exec::State;
use crate::spec_lang::ast::{
    DomainId, EnumDomain, Expr, Model, PatternKind, Requirement, Rule, Term, ValueId, VarDecl,
    VarId, VarKind,
};
use crate::spec_lang::error::{Pos, SpecError};
use crate::spec_lang::lexer::{tokenize, Token, TokenKind};

/// Words that cannot be used as domain, value, variable or requirement names.
pub const RESERVED: &[&str] = &[
    "domain",
    "var",
    "controlled",
    "monitored",
    "init",
    "main",
    "par",
    "if",
    "then",
    "else",
    "end",
    "skip",
    "not",
    "and",
    "or",
    "implies",
    "req",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

/// Parses a model source file into a validated [`Model`].
pub fn parse_model(source: &str) -> Result<Model, SpecError> {
    let mut p = Parser::new(source)?;
    let mut scope = Scope::default();

    while p.at_keyword("domain") {
        p.parse_domain(&mut scope)?;
    }
    while p.at_keyword("var") {
        p.parse_var(&mut scope)?;
    }
    if !p.at_keyword("init") {
        return Err(p.unexpected("`domain`, `var` or `init`"));
    }
    let init = p.parse_init(&scope)?;
    p.expect_keyword("main")?;
    let main = p.parse_rule(&scope)?;
    p.expect_eof()?;
    Model::new(scope.domains, scope.vars, init, main)
}

/// Parses a requirements file against `model`.
pub fn parse_requirements(source: &str, model: &Model) -> Result<Vec<Requirement>, SpecError> {
    let mut p = Parser::new(source)?;
    let scope = Scope::from_model(model);
    let mut reqs = Vec::new();
    let mut names = HashSet::new();
    while !p.at_eof() {
        let req_pos = p.peek().pos;
        p.expect_keyword("req")?;
        let (name, name_pos) = p.expect_name()?;
        if !names.insert(name.clone()) {
            return Err(SpecError::semantic_at(
                name_pos,
                format!("duplicate requirement `{name}`"),
            ));
        }
        let (kind_word, kind_pos) = p.expect_ident()?;
        let kind = PatternKind::from_keyword(&kind_word).ok_or_else(|| {
            SpecError::parse(
                kind_pos,
                format!(
                    "unknown requirement kind `{kind_word}` \
                     (expected max_distance, exact_distance or stability)"
                ),
            )
        })?;
        let mut k = None;
        if p.at_keyword("k") {
            p.advance();
            p.expect(TokenKind::Eq)?;
            let tok = p.advance();
            match tok.kind {
                TokenKind::Int(n) => {
                    let n = u32::try_from(n).map_err(|_| {
                        SpecError::semantic_at(tok.pos, format!("k = {n} is too large"))
                    })?;
                    k = Some(n);
                }
                other => {
                    return Err(SpecError::parse(
                        tok.pos,
                        format!("expected an integer, found {}", other.describe()),
                    ))
                }
            }
        }
        p.expect_keyword("stimulus")?;
        p.expect(TokenKind::LParen)?;
        let stimulus = p.parse_expr(&scope)?;
        p.expect(TokenKind::RParen)?;
        p.expect_keyword("response")?;
        p.expect(TokenKind::LParen)?;
        let response = p.parse_expr(&scope)?;
        p.expect(TokenKind::RParen)?;
        let req =
            Requirement::new(name, kind, stimulus, response, k).map_err(|e| e.located(req_pos))?;
        reqs.push(req);
    }
    Ok(reqs)
}

#[derive(Default)]
struct Scope {
    domains: Vec<EnumDomain>,
    vars: Vec<VarDecl>,
    var_index: HashMap<String, VarId>,
    /// Domains that contain each value name, in declaration order.
    value_domains: HashMap<String, Vec<DomainId>>,
}

impl Scope {
    fn from_model(model: &Model) -> Scope {
        let mut scope = Scope {
            domains: model.domains().to_vec(),
            vars: model.vars().to_vec(),
            ..Scope::default()
        };
        for (i, d) in scope.domains.iter().enumerate() {
            for v in &d.values {
                scope
                    .value_domains
                    .entry(v.clone())
                    .or_default()
                    .push(DomainId(i));
            }
        }
        for (i, v) in scope.vars.iter().enumerate() {
            scope.var_index.insert(v.name.clone(), VarId(i));
        }
        scope
    }

    fn domain_of(&self, t: &Term) -> DomainId {
        match t {
            Term::Var(v) => self.vars[v.0].domain,
            Term::Const { domain, .. } => *domain,
        }
    }

    fn resolve_term(
        &self,
        name: &str,
        pos: Pos,
        expected: Option<DomainId>,
    ) -> Result<Term, SpecError> {
        if let Some(&v) = self.var_index.get(name) {
            let d = self.vars[v.0].domain;
            if let Some(exp) = expected {
                if exp != d {
                    return Err(self.mismatch(pos, exp, d));
                }
            }
            return Ok(Term::Var(v));
        }
        let Some(candidates) = self.value_domains.get(name) else {
            return Err(SpecError::semantic_at(
                pos,
                format!("unknown variable or value `{name}`"),
            ));
        };
        let domain = match expected {
            Some(exp) if candidates.contains(&exp) => exp,
            Some(exp) => return Err(self.mismatch(pos, exp, candidates[0])),
            None if candidates.len() == 1 => candidates[0],
            None => {
                return Err(SpecError::semantic_at(
                    pos,
                    format!("ambiguous constant `{name}` belongs to several domains"),
                ))
            }
        };
        let value = self.domains[domain.0]
            .value_id(name)
            .expect("value indexed under its domain");
        Ok(Term::Const { domain, value })
    }

    fn mismatch(&self, pos: Pos, expected: DomainId, found: DomainId) -> SpecError {
        SpecError::semantic_at(
            pos,
            format!(
                "domain mismatch: expected `{}`, found `{}`",
                self.domains[expected.0].name, self.domains[found.0].name
            ),
        )
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(source: &str) -> Result<Parser, SpecError> {
        Ok(Parser {
            tokens: tokenize(source)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == word)
    }

    fn unexpected(&self, expected: &str) -> SpecError {
        let tok = self.peek();
        SpecError::parse(
            tok.pos,
            format!("expected {expected}, found {}", tok.kind.describe()),
        )
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, SpecError> {
        if self.at(&kind) {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&kind.describe()))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Pos, SpecError> {
        if self.at_keyword(word) {
            Ok(self.advance().pos)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn expect_eof(&mut self) -> Result<(), SpecError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Pos), SpecError> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                Ok((s, self.advance().pos))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// An identifier that is not a reserved word.
    fn expect_name(&mut self) -> Result<(String, Pos), SpecError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if !is_reserved(s) => {
                let s = s.clone();
                Ok((s, self.advance().pos))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn skip_semis(&mut self) {
        while self.at(&TokenKind::Semi) {
            self.advance();
        }
    }

    fn parse_domain(&mut self, scope: &mut Scope) -> Result<(), SpecError> {
        self.expect_keyword("domain")?;
        let (name, name_pos) = self.expect_name()?;
        if scope.domains.iter().any(|d| d.name == name) {
            return Err(SpecError::semantic_at(
                name_pos,
                format!("duplicate domain `{name}`"),
            ));
        }
        self.expect(TokenKind::LBrace)?;
        let mut values: Vec<String> = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            let (v, pos) = self.expect_name()?;
            if values.contains(&v) {
                return Err(SpecError::semantic_at(
                    pos,
                    format!("duplicate value `{v}` in domain `{name}`"),
                ));
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(self.unexpected("a domain value"));
        }
        self.advance();
        let id = DomainId(scope.domains.len());
        for v in &values {
            scope.value_domains.entry(v.clone()).or_default().push(id);
        }
        scope.domains.push(EnumDomain { name, values });
        Ok(())
    }

    fn parse_var(&mut self, scope: &mut Scope) -> Result<(), SpecError> {
        self.expect_keyword("var")?;
        let (name, name_pos) = self.expect_name()?;
        if scope.var_index.contains_key(&name) {
            return Err(SpecError::semantic_at(
                name_pos,
                format!("duplicate variable `{name}`"),
            ));
        }
        if scope.value_domains.contains_key(&name) {
            return Err(SpecError::semantic_at(
                name_pos,
                format!("duplicate name `{name}`: variable shadows a domain value"),
            ));
        }
        self.expect(TokenKind::Colon)?;
        let (dname, dpos) = self.expect_name()?;
        let domain = scope
            .domains
            .iter()
            .position(|d| d.name == dname)
            .map(DomainId)
            .ok_or_else(|| SpecError::semantic_at(dpos, format!("unknown domain `{dname}`")))?;
        let kind = if self.at_keyword("controlled") {
            VarKind::Controlled
        } else if self.at_keyword("monitored") {
            VarKind::Monitored
        } else {
            return Err(self.unexpected("`controlled` or `monitored`"));
        };
        self.advance();
        scope.var_index.insert(name.clone(), VarId(scope.vars.len()));
        scope.vars.push(VarDecl { name, domain, kind });
        Ok(())
    }

    fn parse_init(&mut self, scope: &Scope) -> Result<Vec<State>, SpecError> {
        self.expect_keyword("init")?;
        let mut states = vec![self.parse_init_block(scope)?];
        while self.at(&TokenKind::Bar) {
            self.advance();
            states.push(self.parse_init_block(scope)?);
        }
        Ok(states)
    }

    fn parse_init_block(&mut self, scope: &Scope) -> Result<State, SpecError> {
        let open = self.expect(TokenKind::LBrace)?.pos;
        let mut bound: Vec<Option<ValueId>> = vec![None; scope.vars.len()];
        let mut any = false;
        loop {
            self.skip_semis();
            if self.at(&TokenKind::RBrace) {
                break;
            }
            let (vname, vpos) = self.expect_name()?;
            let var = *scope.var_index.get(&vname).ok_or_else(|| {
                SpecError::semantic_at(vpos, format!("unknown variable `{vname}`"))
            })?;
            self.expect(TokenKind::Eq)?;
            let (val, val_pos) = self.expect_name()?;
            let domain = &scope.domains[scope.vars[var.0].domain.0];
            let value = domain.value_id(&val).ok_or_else(|| {
                SpecError::semantic_at(
                    val_pos,
                    format!("`{val}` is not a value of domain `{}`", domain.name),
                )
            })?;
            if bound[var.0].replace(value).is_some() {
                return Err(SpecError::semantic_at(
                    vpos,
                    format!("variable `{vname}` bound twice in init state"),
                ));
            }
            any = true;
        }
        if !any {
            return Err(self.unexpected("a variable binding"));
        }
        self.advance();
        let mut values = Vec::with_capacity(bound.len());
        for (i, b) in bound.into_iter().enumerate() {
            match b {
                Some(v) => values.push(v),
                None => {
                    return Err(SpecError::semantic_at(
                        open,
                        format!("init state does not bind variable `{}`", scope.vars[i].name),
                    ))
                }
            }
        }
        Ok(State::from_values(values))
    }

    fn parse_rule(&mut self, scope: &Scope) -> Result<Rule, SpecError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::LBrace => {
                self.advance();
                let inner = self.parse_rule(scope)?;
                if !self.at(&TokenKind::RBrace) {
                    return Err(self.unexpected("`}` (use `par { ... }` for several rules)"));
                }
                self.advance();
                Ok(inner)
            }
            TokenKind::Ident(w) if w == "skip" => {
                self.advance();
                Ok(Rule::Skip)
            }
            TokenKind::Ident(w) if w == "par" => {
                self.advance();
                self.expect(TokenKind::LBrace)?;
                let mut children = Vec::new();
                loop {
                    self.skip_semis();
                    if self.at(&TokenKind::RBrace) {
                        break;
                    }
                    children.push(self.parse_rule(scope)?);
                }
                if children.len() < 2 {
                    return Err(SpecError::parse(
                        tok.pos,
                        "par block needs at least two rules",
                    ));
                }
                self.advance();
                Ok(Rule::Par(children))
            }
            TokenKind::Ident(w) if w == "if" => {
                self.advance();
                let guard = self.parse_expr(scope)?;
                self.expect_keyword("then")?;
                let then = self.parse_rule(scope)?;
                let otherwise = if self.at_keyword("else") {
                    self.advance();
                    Some(self.parse_rule(scope)?)
                } else {
                    None
                };
                self.expect_keyword("end")?;
                Ok(Rule::cond(guard, then, otherwise))
            }
            TokenKind::Ident(w) if !is_reserved(w) => {
                let (name, pos) = self.expect_name()?;
                self.expect(TokenKind::Assign)?;
                let target = *scope.var_index.get(&name).ok_or_else(|| {
                    SpecError::semantic_at(pos, format!("unknown variable `{name}`"))
                })?;
                let decl = &scope.vars[target.0];
                if decl.kind == VarKind::Monitored {
                    return Err(SpecError::semantic_at(
                        pos,
                        format!("assignment to monitored variable `{name}`"),
                    ));
                }
                let (vname, vpos) = self.expect_name()?;
                let value = scope.resolve_term(&vname, vpos, Some(decl.domain))?;
                Ok(Rule::Assign { target, value })
            }
            _ => Err(self.unexpected("a rule")),
        }
    }

    fn parse_expr(&mut self, scope: &Scope) -> Result<Expr, SpecError> {
        let lhs = self.parse_or(scope)?;
        if self.at_keyword("implies") {
            self.advance();
            let rhs = self.parse_expr(scope)?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self, scope: &Scope) -> Result<Expr, SpecError> {
        let mut lhs = self.parse_and(scope)?;
        while self.at_keyword("or") {
            self.advance();
            let rhs = self.parse_and(scope)?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self, scope: &Scope) -> Result<Expr, SpecError> {
        let mut lhs = self.parse_unary(scope)?;
        while self.at_keyword("and") {
            self.advance();
            let rhs = self.parse_unary(scope)?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self, scope: &Scope) -> Result<Expr, SpecError> {
        if self.at_keyword("not") {
            self.advance();
            return Ok(Expr::not(self.parse_unary(scope)?));
        }
        if self.at(&TokenKind::LParen) {
            self.advance();
            let e = self.parse_expr(scope)?;
            self.expect(TokenKind::RParen)?;
            return Ok(e);
        }
        let (lname, lpos) = self.expect_name()?;
        let negated = if self.at(&TokenKind::Eq) {
            false
        } else if self.at(&TokenKind::Neq) {
            true
        } else {
            return Err(self.unexpected("`=` or `/=`"));
        };
        self.advance();
        let (rname, rpos) = self.expect_name()?;

        let (lhs, rhs) = if scope.var_index.contains_key(&lname)
            || !scope.var_index.contains_key(&rname)
        {
            let lhs = scope.resolve_term(&lname, lpos, None)?;
            let rhs = scope.resolve_term(&rname, rpos, Some(scope.domain_of(&lhs)))?;
            (lhs, rhs)
        } else {
            let rhs = scope.resolve_term(&rname, rpos, None)?;
            let lhs = scope.resolve_term(&lname, lpos, Some(scope.domain_of(&rhs)))?;
            (lhs, rhs)
        };
        Ok(if negated {
            Expr::Neq(lhs, rhs)
        } else {
            Expr::Eq(lhs, rhs)
        })
    }
}
