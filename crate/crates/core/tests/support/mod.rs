// SPDX-License-Identifier: Apache-2.0

//! Test-only oracles and generators.
//!
//! The oracle side never calls into `asm_exec`, `patterns` or `explorer`: it
//! interprets the rule tree over name-keyed maps, encodes parallel blocks as
//! writes to fresh temporaries followed by copies back, and checks patterns by
//! enumerating every input sequence and running the driver routine literally.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stimresp::spec_lang::{
    DomainId, EnumDomain, Expr, Model, PatternKind, Requirement, Rule, Term, ValueId, VarDecl,
    VarId, VarKind,
};
use stimresp::State;

pub type NState = BTreeMap<String, String>;
pub type NEnv = Vec<(String, String)>;

/// Converts an implementation state into the oracle's representation.
pub fn to_named(model: &Model, s: &State) -> NState {
    model.state_pairs(s).into_iter().collect()
}

pub fn from_named(model: &Model, s: &NState) -> State {
    State::from_values(
        model
            .vars()
            .iter()
            .map(|v| model.domain(v.domain).value_id(&s[&v.name]).unwrap())
            .collect(),
    )
}

fn term(model: &Model, t: &Term, s: &NState) -> String {
    match t {
        Term::Var(v) => s[&model.var(*v).name].clone(),
        Term::Const { domain, value } => model.domain(*domain).values[value.0 as usize].clone(),
    }
}

pub fn eval(model: &Model, e: &Expr, s: &NState) -> bool {
    match e {
        Expr::Eq(l, r) => term(model, l, s) == term(model, r, s),
        Expr::Neq(l, r) => term(model, l, s) != term(model, r, s),
        Expr::Not(x) => !eval(model, x, s),
        Expr::And(l, r) => eval(model, l, s) && eval(model, r, s),
        Expr::Or(l, r) => eval(model, l, s) || eval(model, r, s),
        Expr::Implies(l, r) => !eval(model, l, s) || eval(model, r, s),
    }
}

/// Temporaries a rule writes: `(variable, value)` in evaluation order, or
/// the set of variables written twice by some parallel block.
pub fn temporaries(model: &Model, r: &Rule, s: &NState) -> Result<Vec<(String, String)>, BTreeSet<String>> {
    match r {
        Rule::Skip => Ok(vec![]),
        Rule::Assign { target, value } => {
            Ok(vec![(model.var(*target).name.clone(), term(model, value, s))])
        }
        Rule::Cond {
            guard,
            then,
            otherwise,
        } => {
            if eval(model, guard, s) {
                temporaries(model, then, s)
            } else if let Some(o) = otherwise {
                temporaries(model, o, s)
            } else {
                Ok(vec![])
            }
        }
        Rule::Par(children) => {
            let mut temps = Vec::new();
            let mut clashes = BTreeSet::new();
            for c in children {
                match temporaries(model, c, s) {
                    Ok(t) => temps.extend(t),
                    Err(e) => clashes.extend(e),
                }
            }
            for (i, (n, _)) in temps.iter().enumerate() {
                if temps[..i].iter().any(|(m, _)| m == n) {
                    clashes.insert(n.clone());
                }
            }
            if clashes.is_empty() {
                Ok(temps)
            } else {
                Err(clashes)
            }
        }
    }
}

/// Name of the conflicting variable with the smallest declaration index.
pub fn first_clash(model: &Model, clashes: &BTreeSet<String>) -> String {
    model
        .vars()
        .iter()
        .find(|v| clashes.contains(&v.name))
        .unwrap()
        .name
        .clone()
}

pub fn naive_step(model: &Model, s: &NState, env: &NEnv) -> Result<NState, String> {
    let mut pre = s.clone();
    for (k, v) in env {
        pre.insert(k.clone(), v.clone());
    }
    let temps = temporaries(model, model.main(), &pre).map_err(|c| first_clash(model, &c))?;
    let mut post = pre.clone();
    for (k, v) in temps {
        post.insert(k, v);
    }
    Ok(post)
}

/// Every environment input, first monitored variable most significant.
pub fn naive_envs(model: &Model) -> Vec<NEnv> {
    let mut out: Vec<NEnv> = vec![vec![]];
    for v in model.vars().iter().filter(|v| v.kind == VarKind::Monitored) {
        let values = &model.domain(v.domain).values;
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |val| {
                    let mut p = p.clone();
                    p.push((v.name.clone(), val.clone()));
                    p
                })
            })
            .collect();
    }
    out
}

/// Reachable states by fixpoint iteration, or `Err` if some reachable step crashes.
pub fn naive_reach(model: &Model) -> Result<BTreeSet<NState>, ()> {
    let envs = naive_envs(model);
    let mut set: BTreeSet<NState> = model.init().iter().map(|s| to_named(model, s)).collect();
    loop {
        let mut next = set.clone();
        for s in &set {
            for e in &envs {
                next.insert(naive_step(model, s, e).map_err(|_| ())?);
            }
        }
        if next.len() == set.len() {
            return Ok(set);
        }
        set = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NaiveFail {
    Assertion,
    Crash,
}

/// Result of the literal driver routine along one input sequence:
/// `None` if it passes, else `(steps executed incl. a crashing one, kind)`.
pub fn run_routine(
    model: &Model,
    req: &Requirement,
    start: &NState,
    seq: &[NEnv],
) -> Option<(usize, NaiveFail)> {
    let stim = |s: &NState| eval(model, &req.stimulus, s);
    let resp = |s: &NState| eval(model, &req.response, s);
    match req.kind {
        PatternKind::ResponseStability => {
            if !(stim(start) && resp(start)) {
                return None;
            }
            match naive_step(model, start, &seq[0]) {
                Err(_) => Some((1, NaiveFail::Crash)),
                Ok(next) => {
                    if !stim(&next) || resp(&next) {
                        None
                    } else {
                        Some((1, NaiveFail::Assertion))
                    }
                }
            }
        }
        kind => {
            if !stim(start) {
                return None;
            }
            let k = req.k.unwrap() as usize;
            let mut s = start.clone();
            let mut steps = 0;
            while !(resp(&s) || steps == k) {
                match naive_step(model, &s, &seq[steps]) {
                    Ok(n) => s = n,
                    Err(_) => return Some((steps + 1, NaiveFail::Crash)),
                }
                steps += 1;
            }
            let ok = match kind {
                PatternKind::ExactDistance => resp(&s) && steps == k,
                _ => resp(&s),
            };
            if ok {
                None
            } else {
                Some((steps, NaiveFail::Assertion))
            }
        }
    }
}

/// All input sequences of length `n` in lexicographic order.
pub fn sequences(envs: &[NEnv], n: usize) -> Vec<Vec<NEnv>> {
    let mut out: Vec<Vec<NEnv>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                envs.iter().map(move |e| {
                    let mut p = p.clone();
                    p.push(e.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Shortest failing run from `start` over every sequence; among equally short
/// ones, the first in lexicographic order of the consumed inputs.
pub fn oracle_start(model: &Model, req: &Requirement, start: &NState) -> Option<(usize, NaiveFail)> {
    let envs = naive_envs(model);
    let n = match req.kind {
        PatternKind::ResponseStability => 1,
        _ => req.k.unwrap() as usize,
    };
    let mut best: Option<(usize, Vec<NEnv>, NaiveFail)> = None;
    for seq in sequences(&envs, n) {
        if let Some((len, kind)) = run_routine(model, req, start, &seq) {
            let used = seq[..len.min(seq.len())].to_vec();
            let better = match &best {
                None => true,
                Some((bl, bs, _)) => (len, &used) < (*bl, bs),
            };
            if better {
                best = Some((len, used, kind));
            }
        }
    }
    best.map(|(l, _, k)| (l, k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Pass,
    /// Failing start states with their shortest failure.
    Fail(BTreeMap<NState, (usize, NaiveFail)>),
    ReachCrash,
}

pub fn oracle_verdict(model: &Model, req: &Requirement, starts: &BTreeSet<NState>) -> OracleVerdict {
    let fails: BTreeMap<NState, (usize, NaiveFail)> = starts
        .iter()
        .filter_map(|s| oracle_start(model, req, s).map(|f| (s.clone(), f)))
        .collect();
    if fails.is_empty() {
        OracleVerdict::Pass
    } else {
        OracleVerdict::Fail(fails)
    }
}

/// Shortest number of steps from an init state to every reachable state.
pub fn naive_distances(model: &Model) -> Result<BTreeMap<NState, usize>, ()> {
    let envs = naive_envs(model);
    let mut dist: BTreeMap<NState, usize> = BTreeMap::new();
    let mut frontier: Vec<NState> = Vec::new();
    for s in model.init() {
        let n = to_named(model, s);
        if !dist.contains_key(&n) {
            dist.insert(n.clone(), 0);
            frontier.push(n);
        }
    }
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for s in &frontier {
            for e in &envs {
                let t = naive_step(model, s, e).map_err(|_| ())?;
                if !dist.contains_key(&t) {
                    dist.insert(t.clone(), d);
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

/// What a whole-model check must report for one requirement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Pass,
    /// Minimal total trace length and the failure kinds achieving it.
    Fail { total: usize, kinds: BTreeSet<NaiveFail> },
    ReachCrash,
}

pub fn expected_verdict(model: &Model, req: &Requirement) -> Expected {
    let Ok(dist) = naive_distances(model) else {
        return Expected::ReachCrash;
    };
    let mut best: Option<(usize, BTreeSet<NaiveFail>)> = None;
    for (s, d) in &dist {
        if let Some((len, kind)) = oracle_start(model, req, s) {
            let total = d + len;
            match &mut best {
                Some((b, kinds)) if *b == total => {
                    kinds.insert(kind);
                }
                Some((b, _)) if *b < total => {}
                _ => best = Some((total, BTreeSet::from([kind]))),
            }
        }
    }
    match best {
        None => Expected::Pass,
        Some((total, kinds)) => Expected::Fail { total, kinds },
    }
}

/// Compares a verdict against [`expected_verdict`]; `Err` describes the mismatch.
pub fn agrees(model: &Model, req: &Requirement, v: &stimresp::Verdict) -> Result<(), String> {
    use stimresp::Status;
    let exp = expected_verdict(model, req);
    let ok = match (&exp, v.status, &v.trace) {
        (Expected::Pass, Status::Pass, None) => true,
        (Expected::ReachCrash, Status::Crash, Some(_)) => v.states_checked == 0,
        (Expected::Fail { total, kinds }, st, Some(t)) if st != Status::Pass => {
            let kind = if st == Status::Crash { NaiveFail::Crash } else { NaiveFail::Assertion };
            let len = t.pattern_start + t.pattern_len();
            len == *total && kinds.contains(&kind) && naive_replay(model, t)
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{}: expected {exp:?}, got {:?} {:?}", req.name, v.status, v.trace))
    }
}

/// Replays a trace under the naive evaluator.
pub fn naive_replay(model: &Model, trace: &stimresp::Trace) -> bool {
    let mut s = to_named(model, &trace.steps[0].state);
    for st in &trace.steps[1..] {
        let env: NEnv = model.env_pairs(st.env.as_ref().unwrap());
        match naive_step(model, &s, &env) {
            Ok(n) if n == to_named(model, &st.state) => s = n,
            _ => return false,
        }
    }
    match &trace.crash {
        None => true,
        Some(c) => naive_step(model, &s, &model.env_pairs(&c.env))
            .err()
            .is_some_and(|v| v == model.var(c.error.variable).name),
    }
}

// ---------------------------------------------------------------------------
// Random generation

pub struct Gen {
    pub rng: StdRng,
    pub max_vars: usize,
    pub max_values: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            max_vars: 3,
            max_values: 3,
        }
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs[self.rng.random_range(0..xs.len())].clone()
    }

    /// Domains, variables and init states; rules are drawn separately.
    pub fn signature(&mut self) -> (Vec<EnumDomain>, Vec<VarDecl>) {
        let nd = self.rng.random_range(1..=self.max_vars);
        let domains: Vec<EnumDomain> = (0..nd)
            .map(|d| {
                let nv = self.rng.random_range(1..=self.max_values);
                EnumDomain {
                    name: format!("D{d}"),
                    values: (0..nv).map(|v| format!("d{d}v{v}")).collect(),
                }
            })
            .collect();
        let nvars = self.rng.random_range(1..=self.max_vars);
        let vars = (0..nvars)
            .map(|i| VarDecl {
                name: format!("x{i}"),
                domain: DomainId(self.rng.random_range(0..nd)),
                kind: if self.rng.random_bool(0.3) {
                    VarKind::Monitored
                } else {
                    VarKind::Controlled
                },
            })
            .collect();
        (domains, vars)
    }

    fn term_of(&mut self, domains: &[EnumDomain], vars: &[VarDecl], d: DomainId) -> Term {
        let same: Vec<VarId> = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.domain == d)
            .map(|(i, _)| VarId(i))
            .collect();
        if !same.is_empty() && self.rng.random_bool(0.5) {
            Term::Var(self.pick(&same))
        } else {
            Term::Const {
                domain: d,
                value: ValueId(self.rng.random_range(0..domains[d.0].values.len()) as u16),
            }
        }
    }

    pub fn expr(&mut self, domains: &[EnumDomain], vars: &[VarDecl], depth: usize) -> Expr {
        let choice = if depth == 0 { 0 } else { self.rng.random_range(0..6) };
        match choice {
            0 | 1 => {
                let v = VarId(self.rng.random_range(0..vars.len()));
                let d = vars[v.0].domain;
                let rhs = self.term_of(domains, vars, d);
                let (l, r) = if self.rng.random_bool(0.8) {
                    (Term::Var(v), rhs)
                } else {
                    (rhs, Term::Var(v))
                };
                if self.rng.random_bool(0.5) {
                    Expr::Eq(l, r)
                } else {
                    Expr::Neq(l, r)
                }
            }
            2 => Expr::not(self.expr(domains, vars, depth - 1)),
            3 => Expr::and(self.expr(domains, vars, depth - 1), self.expr(domains, vars, depth - 1)),
            4 => Expr::or(self.expr(domains, vars, depth - 1), self.expr(domains, vars, depth - 1)),
            _ => Expr::implies(self.expr(domains, vars, depth - 1), self.expr(domains, vars, depth - 1)),
        }
    }

    pub fn rule(&mut self, domains: &[EnumDomain], vars: &[VarDecl], depth: usize) -> Rule {
        let controlled: Vec<VarId> = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Controlled)
            .map(|(i, _)| VarId(i))
            .collect();
        let choice = if depth == 0 { self.rng.random_range(0..2) } else { self.rng.random_range(0..5) };
        match choice {
            0 if !controlled.is_empty() => {
                let target = self.pick(&controlled);
                let value = self.term_of(domains, vars, vars[target.0].domain);
                Rule::Assign { target, value }
            }
            0 | 1 => Rule::Skip,
            2 => {
                let n = self.rng.random_range(2..=3);
                Rule::Par((0..n).map(|_| self.rule(domains, vars, depth - 1)).collect())
            }
            _ => {
                let guard = self.expr(domains, vars, 2);
                let then = self.rule(domains, vars, depth - 1);
                let otherwise = self
                    .rng
                    .random_bool(0.5)
                    .then(|| self.rule(domains, vars, depth - 1));
                Rule::cond(guard, then, otherwise)
            }
        }
    }

    pub fn state(&mut self, domains: &[EnumDomain], vars: &[VarDecl]) -> State {
        State::from_values(
            vars.iter()
                .map(|v| ValueId(self.rng.random_range(0..domains[v.domain.0].values.len()) as u16))
                .collect(),
        )
    }

    pub fn model(&mut self) -> Model {
        let (domains, vars) = self.signature();
        let main = self.rule(&domains, &vars, 3);
        let ninit = self.rng.random_range(1..=2);
        let init = (0..ninit).map(|_| self.state(&domains, &vars)).collect();
        Model::new(domains, vars, init, main).expect("generated model is well-formed")
    }

    pub fn requirement(&mut self, model: &Model, name: &str, max_k: u32) -> Requirement {
        let kind = self.pick(&[
            PatternKind::MaxDistance,
            PatternKind::ExactDistance,
            PatternKind::ResponseStability,
        ]);
        let stimulus = self.expr(model.domains(), model.vars(), 2);
        let response = self.expr(model.domains(), model.vars(), 2);
        let k = kind.takes_budget().then(|| self.rng.random_range(1..=max_k));
        Requirement::new(name, kind, stimulus, response, k).unwrap()
    }
}
