// SPDX-License-Identifier: Apache-2.0

//! Machine-readable check reports.

use std::fmt::Write;
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asm_exec::{EnvInput, State};
use crate::explorer::{Status, Verdict};
use crate::spec_lang::{Model, PatternKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub model_sha256: String,
    pub verdicts: Vec<VerdictRecord>,
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub name: String,
    pub kind: PatternKind,
    pub status: Status,
    pub states_checked: usize,
    pub elapsed_us: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assertion: Option<String>,
    /// Step at which the pattern routine starts; earlier steps reach that state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<StepRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crash: Option<CrashRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub env: IndexMap<String, String>,
    pub state: IndexMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrashRecord {
    pub step: usize,
    pub env: IndexMap<String, String>,
    pub variable: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn micros(d: Duration) -> u64 {
    d.as_micros().min(u64::MAX as u128) as u64
}

fn env_map(model: &Model, env: &EnvInput) -> IndexMap<String, String> {
    model.env_pairs(env).into_iter().collect()
}

fn state_map(model: &Model, state: &State) -> IndexMap<String, String> {
    model.state_pairs(state).into_iter().collect()
}

impl VerdictRecord {
    pub fn new(model: &Model, v: &Verdict) -> VerdictRecord {
        let trace = v.trace.as_ref();
        VerdictRecord {
            name: v.requirement.clone(),
            kind: v.kind,
            status: v.status,
            states_checked: v.states_checked,
            elapsed_us: micros(v.elapsed),
            assertion: trace.map(|t| t.assertion.clone()),
            pattern_start: trace.map(|t| t.pattern_start),
            trace: trace.map(|t| {
                t.steps
                    .iter()
                    .enumerate()
                    .map(|(i, s)| StepRecord {
                        step: i,
                        env: s.env.as_ref().map(|e| env_map(model, e)).unwrap_or_default(),
                        state: state_map(model, &s.state),
                    })
                    .collect()
            }),
            crash: trace.and_then(|t| {
                t.crash.as_ref().map(|c| CrashRecord {
                    step: t.steps.len(),
                    env: env_map(model, &c.env),
                    variable: model.var(c.error.variable).name.clone(),
                })
            }),
        }
    }
}

impl Report {
    pub fn new(model: &Model, model_source: &[u8], verdicts: &[Verdict], elapsed: Duration) -> Report {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            model_sha256: sha256_hex(model_source),
            verdicts: verdicts.iter().map(|v| VerdictRecord::new(model, v)).collect(),
            elapsed_us: micros(elapsed),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.status == Status::Pass)
    }

    /// Copy with every timing field zeroed, for comparing runs.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        r.elapsed_us = 0;
        for v in &mut r.verdicts {
            v.elapsed_us = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self, color: bool) -> String {
        let paint = |status: Status| {
            let label = status.to_string();
            if !color {
                return label;
            }
            let code = match status {
                Status::Pass => "32",
                Status::Fail => "31",
                Status::Crash => "35",
            };
            format!("\x1b[{code}m{label}\x1b[0m")
        };
        let mut out = String::new();
        writeln!(
            out,
            "stimresp {} | model sha256 {}",
            self.version, self.model_sha256
        )
        .unwrap();
        for v in &self.verdicts {
            writeln!(
                out,
                "{:<5} {} ({}, {} start states)",
                paint(v.status),
                v.name,
                v.kind,
                v.states_checked
            )
            .unwrap();
            if let Some(a) = &v.assertion {
                writeln!(out, "  violated: {a}").unwrap();
            }
            if let Some(steps) = &v.trace {
                for s in steps {
                    if Some(s.step) == v.pattern_start && s.step > 0 {
                        writeln!(out, "  -- requirement checked from here").unwrap();
                    }
                    writeln!(out, "  {}", step_line(s.step, &s.env, &s.state)).unwrap();
                }
            }
            if let Some(c) = &v.crash {
                writeln!(
                    out,
                    "  step {} | env: {} | crash: conflicting parallel updates to `{}`",
                    c.step,
                    pairs(&c.env),
                    c.variable
                )
                .unwrap();
            }
        }
        let count = |s: Status| self.verdicts.iter().filter(|v| v.status == s).count();
        writeln!(
            out,
            "{} passed, {} failed, {} crashed",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Crash)
        )
        .unwrap();
        out
    }
}

fn pairs(m: &IndexMap<String, String>) -> String {
    if m.is_empty() {
        return "-".into();
    }
    m.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Same layout as [`crate::explorer::format_step`].
fn step_line(step: usize, env: &IndexMap<String, String>, state: &IndexMap<String, String>) -> String {
    let env = if step == 0 { "-".to_string() } else { pairs(env) };
    format!("step {step} | env: {env} | state: {}", pairs(state))
}
