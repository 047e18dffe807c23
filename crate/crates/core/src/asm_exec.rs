// SPDX-License-Identifier: Apache-2.0

//! One-step execution of an ASM `main` rule.
//!
//! A rule is evaluated against the pre-state into an [`UpdateSet`]; the set is
//! then applied atomically. Every right-hand side and guard reads the
//! pre-state, which gives parallel blocks their simultaneous-assignment
//! meaning. Two updates of the same location inside one parallel block are a
//! crash, even when they agree on the value.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::spec_lang::{Expr, Model, Rule, Term, ValueId, VarId};

/// Total assignment of values to every declared variable, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Vec<ValueId>);

impl State {
    pub fn from_values(values: Vec<ValueId>) -> State {
        State(values)
    }

    pub fn get(&self, var: VarId) -> ValueId {
        self.0[var.0]
    }

    pub fn set(&mut self, var: VarId, value: ValueId) {
        self.0[var.0] = value;
    }

    pub fn values(&self) -> &[ValueId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Values for the monitored variables, in [`Model::monitored`] order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvInput(Vec<ValueId>);

impl EnvInput {
    pub fn from_values(values: Vec<ValueId>) -> EnvInput {
        EnvInput(values)
    }

    pub fn values(&self) -> &[ValueId] {
        &self.0
    }

    /// The environment input that leaves the monitored part of `state` as is.
    pub fn current(model: &Model, state: &State) -> EnvInput {
        EnvInput(model.monitored().iter().map(|v| state.get(*v)).collect())
    }
}

/// Location updates produced by one rule evaluation; at most one per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UpdateSet(BTreeMap<VarId, ValueId>);

impl UpdateSet {
    pub fn new() -> UpdateSet {
        UpdateSet::default()
    }

    pub fn singleton(var: VarId, value: ValueId) -> UpdateSet {
        UpdateSet(BTreeMap::from([(var, value)]))
    }

    pub fn get(&self, var: VarId) -> Option<ValueId> {
        self.0.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ValueId)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(VarId, ValueId)> for UpdateSet {
    fn from_iter<I: IntoIterator<Item = (VarId, ValueId)>>(iter: I) -> Self {
        UpdateSet(iter.into_iter().collect())
    }
}

/// Inconsistent update set: a parallel block wrote `variable` more than once.
///
/// When several locations conflict the smallest [`VarId`] is reported, so the
/// error does not depend on the order of parallel children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
#[error("conflicting parallel updates to variable #{}", .variable.0)]
pub struct CrashError {
    pub variable: VarId,
}

impl CrashError {
    pub fn describe(&self, model: &Model) -> String {
        format!(
            "conflicting parallel updates to `{}`",
            model.var(self.variable).name
        )
    }
}

pub fn eval_term(term: &Term, state: &State) -> ValueId {
    match term {
        Term::Var(v) => state.get(*v),
        Term::Const { value, .. } => *value,
    }
}

pub fn eval_expr(expr: &Expr, state: &State) -> bool {
    match expr {
        Expr::Eq(l, r) => eval_term(l, state) == eval_term(r, state),
        Expr::Neq(l, r) => eval_term(l, state) != eval_term(r, state),
        Expr::Not(e) => !eval_expr(e, state),
        Expr::And(l, r) => eval_expr(l, state) && eval_expr(r, state),
        Expr::Or(l, r) => eval_expr(l, state) || eval_expr(r, state),
        Expr::Implies(l, r) => !eval_expr(l, state) || eval_expr(r, state),
    }
}

/// Evaluates `rule` in `state` to the update set it fires.
pub fn eval_rule(rule: &Rule, state: &State) -> Result<UpdateSet, CrashError> {
    match rule {
        Rule::Skip => Ok(UpdateSet::new()),
        Rule::Assign { target, value } => Ok(UpdateSet::singleton(*target, eval_term(value, state))),
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            if eval_expr(guard, state) {
                eval_rule(then, state)
            } else {
                match otherwise {
                    Some(r) => eval_rule(r, state),
                    None => Ok(UpdateSet::new()),
                }
            }
        }
        Rule::Par(children) => {
            // Evaluate every child so the reported conflict is the minimum over
            // all of them, whatever the child order.
            let mut merged = BTreeMap::new();
            let mut conflict: Option<VarId> = None;
            let note = |v: VarId, c: &mut Option<VarId>| {
                if c.is_none_or(|cur| v < cur) {
                    *c = Some(v);
                }
            };
            for child in children {
                match eval_rule(child, state) {
                    Ok(set) => {
                        for (var, value) in set.0 {
                            if merged.insert(var, value).is_some() {
                                note(var, &mut conflict);
                            }
                        }
                    }
                    Err(e) => note(e.variable, &mut conflict),
                }
            }
            match conflict {
                Some(variable) => Err(CrashError { variable }),
                None => Ok(UpdateSet(merged)),
            }
        }
    }
}

/// Returns `state` with `updates` written; `state` itself is untouched.
pub fn apply(state: &State, updates: &UpdateSet) -> State {
    let mut next = state.clone();
    for (var, value) in updates.iter() {
        next.set(var, value);
    }
    next
}

/// Writes the environment input into the monitored variables of `state`.
pub fn overwrite(model: &Model, state: &State, env: &EnvInput) -> State {
    let mut next = state.clone();
    for (var, value) in model.monitored().iter().zip(env.values()) {
        next.set(*var, *value);
    }
    next
}

/// One iteration of the driver loop: read the environment, then fire `main`.
pub fn step(model: &Model, state: &State, env: &EnvInput) -> Result<State, CrashError> {
    let pre = overwrite(model, state, env);
    let updates = eval_rule(model.main(), &pre)?;
    Ok(apply(&pre, &updates))
}
