// SPDX-License-Identifier: Apache-2.0

//! Resolved syntax trees for models and requirements.
//!
//! Every name is resolved to an index at construction time, so a value of
//! [`Model`] or [`Requirement`] that exists is well-typed: comparisons relate
//! operands of the same domain, assignment targets are controlled variables,
//! and init states bind every variable.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::asm_exec::{EnvInput, State};
use crate::spec_lang::error::SpecError;

/// Index of a domain in [`Model::domains`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainId(pub usize);

/// Index of a variable in [`Model::vars`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Index of a value inside its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(pub u16);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDomain {
    pub name: String,
    pub values: Vec<String>,
}

impl EnumDomain {
    pub fn new(name: impl Into<String>, values: &[&str]) -> Self {
        EnumDomain {
            name: name.into(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn value_id(&self, name: &str) -> Option<ValueId> {
        self.values
            .iter()
            .position(|v| v == name)
            .map(|i| ValueId(i as u16))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Controlled,
    Monitored,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Controlled => f.write_str("controlled"),
            VarKind::Monitored => f.write_str("monitored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: DomainId,
    pub kind: VarKind,
}

/// An enum-valued operand: a variable or a domain constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Const { domain: DomainId, value: ValueId },
}

/// Boolean expression over enum comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Eq(Term, Term),
    Neq(Term, Term),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
}

impl Expr {
    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Expr, r: Expr) -> Expr {
        Expr::Implies(Box::new(l), Box::new(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Assign {
        target: VarId,
        value: Term,
    },
    /// Simultaneous execution of at least two rules.
    Par(Vec<Rule>),
    Cond {
        guard: Expr,
        then: Box<Rule>,
        otherwise: Option<Box<Rule>>,
    },
    Skip,
}

impl Rule {
    pub fn cond(guard: Expr, then: Rule, otherwise: Option<Rule>) -> Rule {
        Rule::Cond {
            guard,
            then: Box::new(then),
            otherwise: otherwise.map(Box::new),
        }
    }
}

/// A validated ASM ground model with arity-0 locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    domains: Vec<EnumDomain>,
    vars: Vec<VarDecl>,
    init: Vec<State>,
    main: Rule,
    monitored: Vec<VarId>,
}

impl Model {
    /// Builds a model, checking every structural and typing invariant.
    pub fn new(
        domains: Vec<EnumDomain>,
        vars: Vec<VarDecl>,
        init: Vec<State>,
        main: Rule,
    ) -> Result<Model, SpecError> {
        let mut names = HashSet::new();
        for d in &domains {
            if !names.insert(d.name.as_str()) {
                return Err(SpecError::semantic(format!("duplicate domain `{}`", d.name)));
            }
            if d.values.is_empty() {
                return Err(SpecError::semantic(format!("domain `{}` has no values", d.name)));
            }
            if d.values.len() > u16::MAX as usize {
                return Err(SpecError::semantic(format!("domain `{}` is too large", d.name)));
            }
            let mut seen = HashSet::new();
            for v in &d.values {
                if !seen.insert(v.as_str()) {
                    return Err(SpecError::semantic(format!(
                        "duplicate value `{v}` in domain `{}`",
                        d.name
                    )));
                }
            }
        }
        let values: HashSet<&str> = domains
            .iter()
            .flat_map(|d| d.values.iter().map(String::as_str))
            .collect();
        let mut var_names = HashSet::new();
        for v in &vars {
            if !var_names.insert(v.name.as_str()) {
                return Err(SpecError::semantic(format!("duplicate variable `{}`", v.name)));
            }
            if values.contains(v.name.as_str()) {
                return Err(SpecError::semantic(format!(
                    "duplicate name `{}`: variable shadows a domain value",
                    v.name
                )));
            }
            if v.domain.0 >= domains.len() {
                return Err(SpecError::semantic(format!(
                    "variable `{}` has an unknown domain",
                    v.name
                )));
            }
        }
        let monitored = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Monitored)
            .map(|(i, _)| VarId(i))
            .collect();
        let model = Model {
            domains,
            vars,
            init,
            main,
            monitored,
        };
        if model.init.is_empty() {
            return Err(SpecError::semantic("model has no init state"));
        }
        for s in &model.init {
            model.check_state(s)?;
        }
        model.check_rule(&model.main)?;
        Ok(model)
    }

    pub fn domains(&self) -> &[EnumDomain] {
        &self.domains
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn init(&self) -> &[State] {
        &self.init
    }

    pub fn main(&self) -> &Rule {
        &self.main
    }

    /// Monitored variables in declaration order; the layout of every [`EnvInput`].
    pub fn monitored(&self) -> &[VarId] {
        &self.monitored
    }

    pub fn var(&self, id: VarId) -> &VarDecl {
        &self.vars[id.0]
    }

    pub fn domain(&self, id: DomainId) -> &EnumDomain {
        &self.domains[id.0]
    }

    pub fn var_domain(&self, id: VarId) -> &EnumDomain {
        self.domain(self.var(id).domain)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn domain_id(&self, name: &str) -> Option<DomainId> {
        self.domains.iter().position(|d| d.name == name).map(DomainId)
    }

    pub fn value_name(&self, var: VarId, value: ValueId) -> &str {
        &self.var_domain(var).values[value.0 as usize]
    }

    pub fn term_domain(&self, t: &Term) -> DomainId {
        match t {
            Term::Var(v) => self.var(*v).domain,
            Term::Const { domain, .. } => *domain,
        }
    }

    /// Number of type-consistent states: the product of all variable domain sizes.
    pub fn state_space_size(&self) -> u128 {
        self.vars
            .iter()
            .map(|v| self.domain(v.domain).len() as u128)
            .product()
    }

    /// Every type-consistent state, first variable most significant,
    /// values in declaration order.
    pub fn all_states(&self) -> Vec<State> {
        let sizes: Vec<usize> = self.vars.iter().map(|v| self.domain(v.domain).len()).collect();
        odometer(&sizes).into_iter().map(State::from_values).collect()
    }

    /// Every environment input in lexicographic order over [`Model::monitored`].
    pub fn all_env_inputs(&self) -> Vec<EnvInput> {
        let sizes: Vec<usize> = self
            .monitored
            .iter()
            .map(|v| self.var_domain(*v).len())
            .collect();
        odometer(&sizes).into_iter().map(EnvInput::from_values).collect()
    }

    /// `name=value` pairs in declaration order.
    pub fn state_pairs(&self, state: &State) -> Vec<(String, String)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (
                    v.name.clone(),
                    self.value_name(VarId(i), state.get(VarId(i))).to_string(),
                )
            })
            .collect()
    }

    pub fn env_pairs(&self, env: &EnvInput) -> Vec<(String, String)> {
        self.monitored
            .iter()
            .zip(env.values())
            .map(|(v, val)| (self.var(*v).name.clone(), self.value_name(*v, *val).to_string()))
            .collect()
    }

    pub fn format_state(&self, state: &State) -> String {
        join_pairs(&self.state_pairs(state))
    }

    pub fn format_env(&self, env: &EnvInput) -> String {
        if self.monitored.is_empty() {
            return "-".to_string();
        }
        join_pairs(&self.env_pairs(env))
    }

    /// Checks that `state` binds every variable to a value of its domain.
    pub fn check_state(&self, state: &State) -> Result<(), SpecError> {
        if state.len() != self.vars.len() {
            return Err(SpecError::semantic(format!(
                "state binds {} variables, model declares {}",
                state.len(),
                self.vars.len()
            )));
        }
        for (i, v) in self.vars.iter().enumerate() {
            if state.get(VarId(i)).0 as usize >= self.domain(v.domain).len() {
                return Err(SpecError::semantic(format!(
                    "value out of domain `{}` for variable `{}`",
                    self.domain(v.domain).name,
                    v.name
                )));
            }
        }
        Ok(())
    }

    fn check_term(&self, t: &Term) -> Result<DomainId, SpecError> {
        match t {
            Term::Var(v) => {
                if v.0 >= self.vars.len() {
                    return Err(SpecError::semantic("unknown variable"));
                }
                Ok(self.var(*v).domain)
            }
            Term::Const { domain, value } => {
                if domain.0 >= self.domains.len() {
                    return Err(SpecError::semantic("unknown domain"));
                }
                if value.0 as usize >= self.domain(*domain).len() {
                    return Err(SpecError::semantic("unknown domain value"));
                }
                Ok(*domain)
            }
        }
    }

    /// Type-checks a boolean expression against this model.
    pub fn check_expr(&self, e: &Expr) -> Result<(), SpecError> {
        match e {
            Expr::Eq(l, r) | Expr::Neq(l, r) => {
                let (dl, dr) = (self.check_term(l)?, self.check_term(r)?);
                if dl != dr {
                    return Err(SpecError::semantic(format!(
                        "domain mismatch: `{}` compared with `{}`",
                        self.domain(dl).name,
                        self.domain(dr).name
                    )));
                }
                Ok(())
            }
            Expr::Not(x) => self.check_expr(x),
            Expr::And(l, r) | Expr::Or(l, r) | Expr::Implies(l, r) => {
                self.check_expr(l)?;
                self.check_expr(r)
            }
        }
    }

    fn check_rule(&self, rule: &Rule) -> Result<(), SpecError> {
        match rule {
            Rule::Assign { target, value } => {
                if target.0 >= self.vars.len() {
                    return Err(SpecError::semantic("unknown variable"));
                }
                let decl = self.var(*target);
                if decl.kind == VarKind::Monitored {
                    return Err(SpecError::semantic(format!(
                        "assignment to monitored variable `{}`",
                        decl.name
                    )));
                }
                let dv = self.check_term(value)?;
                if dv != decl.domain {
                    return Err(SpecError::semantic(format!(
                        "domain mismatch: `{}` of domain `{}` assigned a `{}` value",
                        decl.name,
                        self.domain(decl.domain).name,
                        self.domain(dv).name
                    )));
                }
                Ok(())
            }
            Rule::Par(children) => {
                if children.len() < 2 {
                    return Err(SpecError::semantic("par block needs at least two rules"));
                }
                children.iter().try_for_each(|c| self.check_rule(c))
            }
            Rule::Cond {
                guard,
                then,
                otherwise,
            } => {
                self.check_expr(guard)?;
                self.check_rule(then)?;
                match otherwise {
                    Some(r) => self.check_rule(r),
                    None => Ok(()),
                }
            }
            Rule::Skip => Ok(()),
        }
    }
}

fn join_pairs(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn odometer(sizes: &[usize]) -> Vec<Vec<ValueId>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(ValueId(v as u16));
                    p
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    MaxDistance,
    ExactDistance,
    #[serde(rename = "stability")]
    ResponseStability,
}

impl PatternKind {
    pub fn keyword(self) -> &'static str {
        match self {
            PatternKind::MaxDistance => "max_distance",
            PatternKind::ExactDistance => "exact_distance",
            PatternKind::ResponseStability => "stability",
        }
    }

    pub fn from_keyword(s: &str) -> Option<PatternKind> {
        match s {
            "max_distance" => Some(PatternKind::MaxDistance),
            "exact_distance" => Some(PatternKind::ExactDistance),
            "stability" => Some(PatternKind::ResponseStability),
            _ => None,
        }
    }

    pub fn takes_budget(self) -> bool {
        !matches!(self, PatternKind::ResponseStability)
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A stimulus-response requirement bound to one of the three patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub name: String,
    pub kind: PatternKind,
    pub stimulus: Expr,
    pub response: Expr,
    /// Step budget; present exactly for the distance patterns.
    pub k: Option<u32>,
}

impl Requirement {
    pub fn new(
        name: impl Into<String>,
        kind: PatternKind,
        stimulus: Expr,
        response: Expr,
        k: Option<u32>,
    ) -> Result<Requirement, SpecError> {
        let name = name.into();
        match (kind.takes_budget(), k) {
            (true, None) => {
                return Err(SpecError::semantic(format!(
                    "requirement `{name}`: k missing for {kind}"
                )))
            }
            (true, Some(0)) => {
                return Err(SpecError::semantic(format!(
                    "requirement `{name}`: k must be at least 1"
                )))
            }
            (false, Some(_)) => {
                return Err(SpecError::semantic(format!(
                    "requirement `{name}`: k is not allowed for stability"
                )))
            }
            _ => {}
        }
        Ok(Requirement {
            name,
            kind,
            stimulus,
            response,
            k,
        })
    }

    pub fn check_against(&self, model: &Model) -> Result<(), SpecError> {
        model.check_expr(&self.stimulus)?;
        model.check_expr(&self.response)
    }
}
