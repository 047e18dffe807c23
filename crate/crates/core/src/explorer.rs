// SPDX-License-Identifier: Apache-2.0

//! Reachable state space and requirement checking over it.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asm_exec::{step, CrashError, EnvInput, State};
use crate::patterns::{self, AllInputs, Failure, Outcome, PatternInstance, Replay, StepBudget};
use crate::spec_lang::{Model, PatternKind, Requirement};

/// Breadth-first closure of the init states under every environment input.
#[derive(Debug, Clone)]
pub struct ReachSet {
    states: Vec<State>,
    index: HashMap<State, usize>,
    /// Predecessor index and input; `None` for init states.
    parent: Vec<Option<(usize, EnvInput)>>,
    depth: Vec<usize>,
}

impl ReachSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// States in discovery order.
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn contains(&self, s: &State) -> bool {
        self.index.contains_key(s)
    }

    pub fn position(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Number of steps on the shortest path from an init state.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// Shortest path from an init state to state `i`.
    pub fn path_to(&self, i: usize) -> Vec<TraceStep> {
        let mut out = Vec::new();
        let mut cur = i;
        loop {
            match &self.parent[cur] {
                Some((p, env)) => {
                    out.push(TraceStep {
                        env: Some(env.clone()),
                        state: self.states[cur].clone(),
                    });
                    cur = *p;
                }
                None => {
                    out.push(TraceStep {
                        env: None,
                        state: self.states[cur].clone(),
                    });
                    break;
                }
            }
        }
        out.reverse();
        out
    }

    fn insert(&mut self, s: State, parent: Option<(usize, EnvInput)>) -> bool {
        if self.index.contains_key(&s) {
            return false;
        }
        let depth = parent.as_ref().map_or(0, |(p, _)| self.depth[*p] + 1);
        self.index.insert(s.clone(), self.states.len());
        self.states.push(s);
        self.parent.push(parent);
        self.depth.push(depth);
        true
    }
}

/// A reachable state in which `main` crashes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{error} after {} steps", .path.len().saturating_sub(1))]
pub struct ReachCrash {
    /// Path from an init state to the crashing state.
    pub path: Vec<TraceStep>,
    pub env: EnvInput,
    pub error: CrashError,
}

pub fn reach(model: &Model) -> Result<ReachSet, ReachCrash> {
    reach_from(model, model.init())
}

/// Breadth-first exploration from `init`, inputs tried in lexicographic order.
pub fn reach_from(model: &Model, init: &[State]) -> Result<ReachSet, ReachCrash> {
    let envs = model.all_env_inputs();
    let mut set = ReachSet {
        states: Vec::new(),
        index: HashMap::new(),
        parent: Vec::new(),
        depth: Vec::new(),
    };
    for s in init {
        set.insert(s.clone(), None);
    }
    let mut cursor = 0;
    while cursor < set.states.len() {
        let current = set.states[cursor].clone();
        for env in &envs {
            match step(model, &current, env) {
                Ok(next) => {
                    set.insert(next, Some((cursor, env.clone())));
                }
                Err(error) => {
                    return Err(ReachCrash {
                        path: set.path_to(cursor),
                        env: env.clone(),
                        error,
                    })
                }
            }
        }
        cursor += 1;
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Input consumed to reach `state`; `None` for the first state.
    pub env: Option<EnvInput>,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCrash {
    pub env: EnvInput,
    pub error: CrashError,
}

/// A replayable counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub requirement: String,
    pub assertion: String,
    pub steps: Vec<TraceStep>,
    /// Index in `steps` of the state the pattern routine was started from.
    pub pattern_start: usize,
    /// Set when the run ends by crashing on one more input.
    pub crash: Option<TraceCrash>,
}

impl Trace {
    /// Steps taken by the pattern routine, counting a crashing step.
    pub fn pattern_len(&self) -> usize {
        self.steps.len() - 1 - self.pattern_start + usize::from(self.crash.is_some())
    }

    pub fn final_state(&self) -> &State {
        &self.steps.last().expect("trace has a first state").state
    }

    pub fn start_state(&self) -> &State {
        &self.steps[self.pattern_start].state
    }

    /// Inputs consumed by the pattern routine, including a crashing one.
    pub fn pattern_inputs(&self) -> Vec<EnvInput> {
        let mut out: Vec<EnvInput> = self.steps[self.pattern_start + 1..]
            .iter()
            .map(|s| s.env.clone().expect("non-initial step has an input"))
            .collect();
        if let Some(c) = &self.crash {
            out.push(c.env.clone());
        }
        out
    }

    /// One `step i | env: ... | state: ...` line per state.
    pub fn lines(&self, model: &Model) -> Vec<String> {
        let mut out: Vec<String> = self
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| format_step(model, i, s.env.as_ref(), &s.state))
            .collect();
        if let Some(c) = &self.crash {
            out.push(format!(
                "step {} | env: {} | crash: {}",
                self.steps.len(),
                model.format_env(&c.env),
                c.error.describe(model)
            ));
        }
        out
    }

    /// The inputs of the whole trace as a simulation script.
    pub fn to_script(&self, model: &Model) -> String {
        let mut out = String::new();
        let envs = self.steps[1..]
            .iter()
            .filter_map(|s| s.env.as_ref())
            .chain(self.crash.iter().map(|c| &c.env));
        for env in envs {
            out.push_str(&script_line(model, env));
            out.push('\n');
        }
        out
    }
}

pub fn format_step(model: &Model, i: usize, env: Option<&EnvInput>, state: &State) -> String {
    let env = env.map_or_else(|| "-".to_string(), |e| model.format_env(e));
    format!("step {i} | env: {env} | state: {}", model.format_state(state))
}

fn script_line(model: &Model, env: &EnvInput) -> String {
    if model.monitored().is_empty() {
        return "-".to_string();
    }
    model
        .env_pairs(env)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Crash,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Crash => "CRASH",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub requirement: String,
    pub kind: PatternKind,
    pub status: Status,
    pub trace: Option<Trace>,
    pub states_checked: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Start from every type-consistent state instead of every reachable one.
    pub all_states: bool,
    /// Replaces `k` of distance requirements.
    pub max_steps: Option<StepBudget>,
    /// Worker threads for checking start states; 0 or 1 runs inline.
    pub workers: usize,
}

pub fn check_all(model: &Model, reqs: &[Requirement]) -> Vec<Verdict> {
    check_all_with(model, reqs, &CheckOptions::default())
}

/// `req` with its budget replaced by `max_steps` when it has one.
pub fn effective_requirement(req: &Requirement, max_steps: Option<StepBudget>) -> Requirement {
    let mut r = req.clone();
    if let (Some(b), true) = (max_steps, r.kind.takes_budget()) {
        r.k = Some(b.get());
    }
    r
}

/// Checks every requirement from every start state.
///
/// Requirements must type-check against `model` (the parser guarantees this).
pub fn check_all_with(model: &Model, reqs: &[Requirement], opts: &CheckOptions) -> Vec<Verdict> {
    let envs = AllInputs::new(model);
    let starts: Result<(Vec<State>, Option<ReachSet>), ReachCrash> = if opts.all_states {
        Ok((model.all_states(), None))
    } else {
        reach(model).map(|r| (r.states().to_vec(), Some(r)))
    };

    let (starts, reach_set) = match starts {
        Ok(v) => v,
        Err(crash) => {
            return reqs
                .iter()
                .map(|r| crash_verdict(model, r, &crash))
                .collect()
        }
    };

    let pool = (opts.workers > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("worker pool")
    });

    reqs.iter()
        .map(|req| {
            let t0 = Instant::now();
            let req = effective_requirement(req, opts.max_steps);
            let inst = PatternInstance::new(model, &req).expect("requirement type-checks");
            let run = |s: &State| patterns::check(&inst, s, &envs);
            let outcomes: Vec<Outcome> = match &pool {
                Some(p) => p.install(|| starts.par_iter().map(run).collect()),
                None => starts.iter().map(run).collect(),
            };

            // Shortest total trace; ties go to the earliest start in BFS order.
            let prefix = |i: usize| reach_set.as_ref().map_or(0, |r| r.depth(i));
            let worst = outcomes
                .iter()
                .enumerate()
                .filter_map(|(i, o)| match o {
                    Outcome::Pass => None,
                    Outcome::Fail(cx) => Some((prefix(i) + cx.len(), i, cx)),
                })
                .min_by_key(|(len, i, _)| (*len, *i));

            let (status, trace) = match worst {
                None => (Status::Pass, None),
                Some((_, i, cx)) => {
                    let head = match &reach_set {
                        Some(r) => r.path_to(i),
                        None => vec![TraceStep {
                            env: None,
                            state: starts[i].clone(),
                        }],
                    };
                    let trace = assemble(&inst, head, cx);
                    let status = if trace.crash.is_some() {
                        Status::Crash
                    } else {
                        Status::Fail
                    };
                    (status, Some(trace))
                }
            };
            Verdict {
                requirement: req.name.clone(),
                kind: req.kind,
                status,
                trace,
                states_checked: starts.len(),
                elapsed: t0.elapsed(),
            }
        })
        .collect()
}

fn assemble(inst: &PatternInstance<'_>, head: Vec<TraceStep>, cx: &patterns::Counterexample) -> Trace {
    let pattern_start = head.len() - 1;
    let mut steps = head;
    steps.extend(cx.steps.iter().map(|(env, state)| TraceStep {
        env: Some(env.clone()),
        state: state.clone(),
    }));
    let crash = match &cx.failure {
        Failure::Assertion => None,
        Failure::Crash { env, error } => Some(TraceCrash {
            env: env.clone(),
            error: *error,
        }),
    };
    Trace {
        requirement: inst.requirement.name.clone(),
        assertion: inst.assertion_text(),
        steps,
        pattern_start,
        crash,
    }
}

fn crash_verdict(model: &Model, req: &Requirement, crash: &ReachCrash) -> Verdict {
    let pattern_start = crash.path.len() - 1;
    Verdict {
        requirement: req.name.clone(),
        kind: req.kind,
        status: Status::Crash,
        trace: Some(Trace {
            requirement: req.name.clone(),
            assertion: crash.error.describe(model),
            steps: crash.path.clone(),
            pattern_start,
            crash: Some(TraceCrash {
                env: crash.env.clone(),
                error: crash.error,
            }),
        }),
        states_checked: 0,
        elapsed: Duration::ZERO,
    }
}

/// A trace that does not behave as claimed; indicates a checker bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("internal error: {0}")]
pub struct InternalError(pub String);

/// Replays `trace` under [`step`], checking every recorded state and the crash.
pub fn replay(model: &Model, trace: &Trace) -> Result<(), InternalError> {
    let first = trace
        .steps
        .first()
        .ok_or_else(|| InternalError("empty trace".into()))?;
    if first.env.is_some() {
        return Err(InternalError("first trace step carries an input".into()));
    }
    for (i, pair) in trace.steps.windows(2).enumerate() {
        let env = pair[1]
            .env
            .as_ref()
            .ok_or_else(|| InternalError(format!("step {} has no input", i + 1)))?;
        match step(model, &pair[0].state, env) {
            Ok(s) if s == pair[1].state => {}
            Ok(s) => {
                return Err(InternalError(format!(
                    "step {} replays to {} instead of {}",
                    i + 1,
                    model.format_state(&s),
                    model.format_state(&pair[1].state)
                )))
            }
            Err(e) => {
                return Err(InternalError(format!(
                    "step {} crashes on replay: {}",
                    i + 1,
                    e.describe(model)
                )))
            }
        }
    }
    if let Some(c) = &trace.crash {
        match step(model, trace.final_state(), &c.env) {
            Err(e) if e == c.error => {}
            _ => return Err(InternalError("recorded crash does not reproduce".into())),
        }
    }
    Ok(())
}

/// Replays the trace and confirms the pattern routine fails along it.
pub fn verify(model: &Model, req: &Requirement, trace: &Trace) -> Result<(), InternalError> {
    replay(model, trace)?;
    if trace.pattern_start >= trace.steps.len() {
        return Err(InternalError("pattern start out of range".into()));
    }
    let inst = PatternInstance::new(model, req).map_err(|e| InternalError(e.to_string()))?;
    let inputs = trace.pattern_inputs();
    let expected = inputs.len();
    match patterns::run_along(&inst, trace.start_state(), &inputs) {
        Replay::Violated { steps } if steps == expected && trace.crash.is_none() => Ok(()),
        Replay::Crashed { steps, error }
            if steps + 1 == expected && trace.crash.as_ref().is_some_and(|c| c.error == error) =>
        {
            Ok(())
        }
        other => Err(InternalError(format!(
            "trace for `{}` does not violate the requirement: {other:?}",
            req.name
        ))),
    }
}

/// Re-verifies `trace`, drops cycles from the path leading to the pattern start,
/// and replaces the pattern part with the shortest violation from that start.
pub fn minimize(trace: &Trace, model: &Model, req: &Requirement) -> Result<Trace, InternalError> {
    verify(model, req, trace)?;

    let mut head: Vec<TraceStep> = Vec::new();
    for s in &trace.steps[..=trace.pattern_start] {
        if let Some(j) = head.iter().position(|h| h.state == s.state) {
            head.truncate(j + 1);
        } else {
            head.push(s.clone());
        }
    }

    let inst = PatternInstance::new(model, req).map_err(|e| InternalError(e.to_string()))?;
    let start = trace.start_state();
    let cx = match patterns::check(&inst, start, &AllInputs::new(model)) {
        Outcome::Fail(cx) => cx,
        Outcome::Pass => {
            return Err(InternalError(format!(
                "`{}` passes from the trace's start state",
                req.name
            )))
        }
    };
    if cx.len() > trace.pattern_len() {
        return Err(InternalError(format!(
            "search found a {}-step violation, longer than the given {}",
            cx.len(),
            trace.pattern_len()
        )));
    }
    let mut out = assemble(&inst, head, &cx);
    out.requirement = trace.requirement.clone();
    verify(model, req, &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_lang::{parse_model, parse_requirements, ValueId};

    #[test]
    fn skip_model_reach_crosses_monitored_values() {
        let m = parse_model(
            "domain D {a b} var h: D monitored var x: D controlled init {h=a x=b} main skip",
        )
        .unwrap();
        let r = reach(&m).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.depth(1), 1);
        assert_eq!(
            r.path_to(1).last().unwrap().state,
            State::from_values(vec![ValueId(1), ValueId(1)])
        );
    }

    #[test]
    fn reach_reports_crash_with_path() {
        let m = parse_model(
            "domain D {a b} var x: D controlled init {x=a} \
             main if x = b then par { x := a x := b } else x := b end",
        )
        .unwrap();
        let crash = reach(&m).unwrap_err();
        assert_eq!(crash.path.len(), 2);
        assert_eq!(crash.error.variable, crate::spec_lang::VarId(0));
    }

    #[test]
    fn empty_requirement_list() {
        let m = parse_model("domain D {a} var x: D controlled init {x=a} main skip").unwrap();
        assert!(check_all(&m, &[]).is_empty());
    }

    #[test]
    fn padded_trace_is_shortened() {
        // x cycles a -> b -> a ...; y latches `c` once x has been b twice.
        let m = parse_model(
            "domain D {a b} domain F {c d e} var x: D controlled var y: F controlled \
             init {x=a y=d} \
             main par { if x = a then x := b else x := a end \
                        if x = b and y = d then y := e else if x = b and y = e then y := c end end }",
        )
        .unwrap();
        let req = parse_requirements(
            "req r max_distance k=1 stimulus (y = c) response (y = d)",
            &m,
        )
        .unwrap()
        .remove(0);
        let verdicts = check_all(&m, std::slice::from_ref(&req));
        let trace = verdicts[0].trace.clone().unwrap();
        verify(&m, &req, &trace).unwrap();
        assert_eq!(minimize(&trace, &m, &req).unwrap(), trace);

        // Pad: go once more around the a/b cycle before the start state.
        let no_env = || Some(EnvInput::from_values(vec![]));
        let start = trace.pattern_start;
        let mut padded = trace.steps[..start].to_vec();
        let s = |x: u16, y: u16| State::from_values(vec![ValueId(x), ValueId(y)]);
        // y=c is absorbing for x-cycles, so loop between (b,c) and (a,c)
        padded.push(trace.steps[start].clone());
        let here = trace.steps[start].state.clone();
        let other = if here == s(0, 0) { s(1, 0) } else { s(0, 0) };
        padded.push(TraceStep {
            env: no_env(),
            state: other,
        });
        padded.push(TraceStep {
            env: no_env(),
            state: here,
        });
        let pattern_start = padded.len() - 1;
        padded.extend(trace.steps[start + 1..].iter().cloned());
        let padded = Trace {
            steps: padded,
            pattern_start,
            ..trace.clone()
        };
        verify(&m, &req, &padded).unwrap();
        let min = minimize(&padded, &m, &req).unwrap();
        assert!(min.steps.len() < padded.steps.len());
        assert_eq!(min, trace);
    }

    #[test]
    fn minimize_rejects_bogus_traces() {
        let m = parse_model("domain D {a b} var x: D controlled init {x=a} main x := b").unwrap();
        let req = parse_requirements("req r max_distance k=1 stimulus (x = a) response (x = b)", &m)
            .unwrap()
            .remove(0);
        let bogus = Trace {
            requirement: "r".into(),
            assertion: String::new(),
            steps: vec![TraceStep {
                env: None,
                state: m.init()[0].clone(),
            }],
            pattern_start: 0,
            crash: None,
        };
        assert!(minimize(&bogus, &m, &req).is_err());
    }
}
