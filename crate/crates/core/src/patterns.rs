// SPDX-License-Identifier: Apache-2.0

//! Executable semantics of the three stimulus-response patterns.
//!
//! Each pattern is a small driver routine around the model's `main` rule:
//!
//! * maximal distance: if `stimulus` holds, run `main` until `response`
//!   holds or `k` steps have been taken, then assert `response`;
//! * exact distance: same loop, but assert `response and steps = k`;
//! * response stability: if `stimulus and response` hold, run `main` once and
//!   assert `stimulus implies response`.
//!
//! The routines are quantified over every environment input sequence the
//! [`EnvProvider`] offers. Distance checks walk the loop breadth-first, one
//! level per step, merging equal states on a level (their futures coincide),
//! so the first violation found is the shortest one and, among those, the one
//! with the lexicographically smallest input sequence.

use std::collections::HashSet;

use crate::asm_exec::{eval_expr, step, CrashError, EnvInput, State};
use crate::spec_lang::{pretty, Model, PatternKind, Requirement, SpecError};

/// Source of environment inputs offered at every step.
pub trait EnvProvider {
    fn inputs(&self) -> &[EnvInput];
}

/// Every input over the model's monitored variables.
#[derive(Debug, Clone)]
pub struct AllInputs(Vec<EnvInput>);

impl AllInputs {
    pub fn new(model: &Model) -> AllInputs {
        AllInputs(model.all_env_inputs())
    }
}

impl EnvProvider for AllInputs {
    fn inputs(&self) -> &[EnvInput] {
        &self.0
    }
}

impl EnvProvider for [EnvInput] {
    fn inputs(&self) -> &[EnvInput] {
        self
    }
}

impl EnvProvider for Vec<EnvInput> {
    fn inputs(&self) -> &[EnvInput] {
        self
    }
}

/// Number of `main` iterations a distance pattern may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct StepBudget(u32);

impl StepBudget {
    pub fn new(k: u32) -> Option<StepBudget> {
        (k >= 1).then_some(StepBudget(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// A requirement bound to the model it is checked against.
#[derive(Debug, Clone, Copy)]
pub struct PatternInstance<'a> {
    pub model: &'a Model,
    pub requirement: &'a Requirement,
    budget: Option<StepBudget>,
}

impl<'a> PatternInstance<'a> {
    pub fn new(model: &'a Model, requirement: &'a Requirement) -> Result<Self, SpecError> {
        requirement.check_against(model)?;
        Ok(PatternInstance {
            model,
            requirement,
            budget: requirement.k.and_then(StepBudget::new),
        })
    }

    /// Overrides the requirement's own `k`. No effect on stability checks.
    pub fn with_budget(mut self, budget: StepBudget) -> Self {
        if self.requirement.kind.takes_budget() {
            self.budget = Some(budget);
        }
        self
    }

    pub fn kind(&self) -> PatternKind {
        self.requirement.kind
    }

    pub fn budget(&self) -> Option<StepBudget> {
        self.budget
    }

    fn k(&self) -> u32 {
        self.budget
            .map(StepBudget::get)
            .expect("distance requirement without a step budget")
    }

    fn stimulus(&self, s: &State) -> bool {
        eval_expr(&self.requirement.stimulus, s)
    }

    fn response(&self, s: &State) -> bool {
        eval_expr(&self.requirement.response, s)
    }

    /// Whether the routine's `if` guard is taken in `start`.
    pub fn guard(&self, start: &State) -> bool {
        match self.kind() {
            PatternKind::ResponseStability => self.stimulus(start) && self.response(start),
            _ => self.stimulus(start),
        }
    }

    /// The asserted condition as it would appear in the routine's check clause.
    pub fn assertion_text(&self) -> String {
        let m = self.model;
        let r = self.requirement;
        let response = pretty::expr(m, &r.response);
        match r.kind {
            PatternKind::MaxDistance => response,
            PatternKind::ExactDistance => format!("({response}) and steps = {}", self.k()),
            PatternKind::ResponseStability => {
                format!("({}) implies ({response})", pretty::expr(m, &r.stimulus))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The loop ended and the check clause evaluated to false.
    Assertion,
    /// `main` crashed on the next input.
    Crash { env: EnvInput, error: CrashError },
}

/// A violating run from the start state: each input with the state it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub steps: Vec<(EnvInput, State)>,
    pub failure: Failure,
}

impl Counterexample {
    /// Steps executed, counting a crashing step.
    pub fn len(&self) -> usize {
        self.steps.len() + usize::from(matches!(self.failure, Failure::Crash { .. }))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// State in which the assertion failed or the crash happened.
    pub fn last_state<'s>(&'s self, start: &'s State) -> &'s State {
        self.steps.last().map(|(_, s)| s).unwrap_or(start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Counterexample),
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

pub fn check_max_distance(
    inst: &PatternInstance<'_>,
    start: &State,
    envs: &(impl EnvProvider + ?Sized),
) -> Outcome {
    debug_assert_eq!(inst.kind(), PatternKind::MaxDistance);
    check_distance(inst, start, envs.inputs(), false)
}

pub fn check_exact_distance(
    inst: &PatternInstance<'_>,
    start: &State,
    envs: &(impl EnvProvider + ?Sized),
) -> Outcome {
    debug_assert_eq!(inst.kind(), PatternKind::ExactDistance);
    check_distance(inst, start, envs.inputs(), true)
}

pub fn check_stability(
    inst: &PatternInstance<'_>,
    start: &State,
    envs: &(impl EnvProvider + ?Sized),
) -> Outcome {
    debug_assert_eq!(inst.kind(), PatternKind::ResponseStability);
    if !inst.guard(start) {
        return Outcome::Pass;
    }
    for env in envs.inputs() {
        match step(inst.model, start, env) {
            Err(error) => {
                return Outcome::Fail(Counterexample {
                    steps: Vec::new(),
                    failure: Failure::Crash {
                        env: env.clone(),
                        error,
                    },
                })
            }
            Ok(next) => {
                if inst.stimulus(&next) && !inst.response(&next) {
                    return Outcome::Fail(Counterexample {
                        steps: vec![(env.clone(), next)],
                        failure: Failure::Assertion,
                    });
                }
            }
        }
    }
    Outcome::Pass
}

/// Dispatches on the requirement kind.
pub fn check(inst: &PatternInstance<'_>, start: &State, envs: &(impl EnvProvider + ?Sized)) -> Outcome {
    match inst.kind() {
        PatternKind::MaxDistance => check_max_distance(inst, start, envs),
        PatternKind::ExactDistance => check_exact_distance(inst, start, envs),
        PatternKind::ResponseStability => check_stability(inst, start, envs),
    }
}

enum Node {
    Live(State),
    Crashed(CrashError),
}

struct Entry {
    node: Node,
    /// Index into the previous level and the input that led here.
    parent: Option<(usize, EnvInput)>,
}

fn check_distance(inst: &PatternInstance<'_>, start: &State, envs: &[EnvInput], exact: bool) -> Outcome {
    if !inst.stimulus(start) {
        return Outcome::Pass;
    }
    let k = inst.k() as usize;
    let mut levels: Vec<Vec<Entry>> = vec![vec![Entry {
        node: Node::Live(start.clone()),
        parent: None,
    }]];

    for depth in 0..=k {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for (i, entry) in levels[depth].iter().enumerate() {
            let state = match &entry.node {
                Node::Crashed(_) => return Outcome::Fail(rebuild(&levels, depth, i)),
                Node::Live(s) => s,
            };
            let response = inst.response(state);
            if response || depth == k {
                let holds = if exact {
                    response && depth == k
                } else {
                    response
                };
                if !holds {
                    return Outcome::Fail(rebuild(&levels, depth, i));
                }
                continue;
            }
            for env in envs {
                match step(inst.model, state, env) {
                    Ok(s) => {
                        if seen.insert(s.clone()) {
                            next.push(Entry {
                                node: Node::Live(s),
                                parent: Some((i, env.clone())),
                            });
                        }
                    }
                    Err(e) => next.push(Entry {
                        node: Node::Crashed(e),
                        parent: Some((i, env.clone())),
                    }),
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Outcome::Pass
}

fn rebuild(levels: &[Vec<Entry>], depth: usize, index: usize) -> Counterexample {
    let failure = match &levels[depth][index].node {
        Node::Live(_) => Failure::Assertion,
        Node::Crashed(error) => Failure::Crash {
            env: levels[depth][index].parent.as_ref().unwrap().1.clone(),
            error: *error,
        },
    };
    let (mut d, mut i) = match failure {
        Failure::Assertion => (depth, index),
        Failure::Crash { .. } => (depth - 1, levels[depth][index].parent.as_ref().unwrap().0),
    };
    let mut steps = Vec::new();
    while let Some((parent, env)) = &levels[d][i].parent {
        let Node::Live(s) = &levels[d][i].node else {
            unreachable!("crashed entries have no children")
        };
        steps.push((env.clone(), s.clone()));
        d -= 1;
        i = *parent;
    }
    steps.reverse();
    Counterexample { steps, failure }
}

/// Result of running a pattern routine along one fixed input sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replay {
    /// The guard was false in the start state.
    Vacuous,
    Holds { steps: usize },
    Violated { steps: usize },
    Crashed { steps: usize, error: CrashError },
    /// The loop wanted another step but the sequence ran out.
    NeedsInput { steps: usize },
}

/// Executes the routine literally along `envs`, one input per `main` call.
pub fn run_along(inst: &PatternInstance<'_>, start: &State, envs: &[EnvInput]) -> Replay {
    if !inst.guard(start) {
        return Replay::Vacuous;
    }
    if inst.kind() == PatternKind::ResponseStability {
        let Some(env) = envs.first() else {
            return Replay::NeedsInput { steps: 0 };
        };
        return match step(inst.model, start, env) {
            Err(error) => Replay::Crashed { steps: 0, error },
            Ok(next) if !inst.stimulus(&next) || inst.response(&next) => Replay::Holds { steps: 1 },
            Ok(_) => Replay::Violated { steps: 1 },
        };
    }
    let k = inst.k() as usize;
    let mut state = start.clone();
    let mut steps = 0;
    while !(inst.response(&state) || steps == k) {
        let Some(env) = envs.get(steps) else {
            return Replay::NeedsInput { steps };
        };
        match step(inst.model, &state, env) {
            Ok(s) => state = s,
            Err(error) => return Replay::Crashed { steps, error },
        }
        steps += 1;
    }
    let holds = match inst.kind() {
        PatternKind::ExactDistance => inst.response(&state) && steps == k,
        _ => inst.response(&state),
    };
    if holds {
        Replay::Holds { steps }
    } else {
        Replay::Violated { steps }
    }
}
