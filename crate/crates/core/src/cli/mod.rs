// SPDX-License-Identifier: Apache-2.0

//! `stimresp` command-line front end.
//!
//! Exit codes: 0 success, 1 a requirement failed or the model crashed,
//! 2 unreadable or ill-formed input.

pub mod report;

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::asm_exec::{overwrite, step, EnvInput, State};
use crate::explorer::{check_all_with, format_step, reach, CheckOptions};
use crate::lgs_corpus;
use crate::patterns::StepBudget;
use crate::spec_lang::{parse_model, parse_requirements, Model, VarKind};

pub use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "stimresp", version, about = "Check stimulus-response requirements on ASM models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every requirement from every reachable state.
    Check {
        model: PathBuf,
        reqs: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Start from every type-consistent state, reachable or not.
        #[arg(long)]
        all_states: bool,
        /// Override k of distance requirements.
        #[arg(long, value_name = "N")]
        max_steps: Option<u32>,
        /// Only check the named requirement (repeatable).
        #[arg(long = "req", value_name = "NAME")]
        only: Vec<String>,
        /// Worker threads for checking start states.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the model along a script of environment inputs, one step per line.
    Simulate {
        model: PathBuf,
        script: PathBuf,
        /// Index of the init state to start from.
        #[arg(long, default_value_t = 0)]
        init: usize,
    },
    /// List the reachable states.
    Reach {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the bundled landing gear corpus into a directory.
    Corpus { dir: PathBuf },
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Check {
            model,
            reqs,
            format,
            all_states,
            max_steps,
            only,
            workers,
        } => cmd_check(
            &model,
            &reqs,
            &CheckFlags {
                format,
                all_states,
                max_steps,
                only,
                workers,
            },
            out,
        ),
        Command::Simulate {
            model,
            script,
            init,
        } => cmd_simulate(&model, &script, init, out),
        Command::Reach { model, format } => cmd_reach(&model, format, out),
        Command::Corpus { dir } => cmd_corpus(&dir, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckFlags {
    pub format: Format,
    pub all_states: bool,
    pub max_steps: Option<u32>,
    pub only: Vec<String>,
    pub workers: usize,
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<(Model, String), String> {
    let src = read(path)?;
    let model = parse_model(&src).map_err(|e| format!("{}:{e}", path.display()))?;
    Ok((model, src))
}

/// Whether to colorize, from `STIMRESP_COLOR` (`auto`, `never`, `always`).
pub fn use_color() -> bool {
    match std::env::var("STIMRESP_COLOR").as_deref() {
        Ok("always") => true,
        Ok("never") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

/// Returns the exit code, or a diagnostic for exit code 2.
pub fn cmd_check(
    model_path: &Path,
    reqs_path: &Path,
    flags: &CheckFlags,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let t0 = Instant::now();
    let (model, src) = load_model(model_path)?;
    let reqs_src = read(reqs_path)?;
    let mut reqs = parse_requirements(&reqs_src, &model)
        .map_err(|e| format!("{}:{e}", reqs_path.display()))?;
    if !flags.only.is_empty() {
        if let Some(missing) = flags
            .only
            .iter()
            .find(|n| !reqs.iter().any(|r| &&r.name == n))
        {
            return Err(format!("no requirement named `{missing}`"));
        }
        reqs.retain(|r| flags.only.contains(&r.name));
    }
    let max_steps = match flags.max_steps {
        Some(n) => Some(StepBudget::new(n).ok_or("--max-steps must be at least 1")?),
        None => None,
    };
    let opts = CheckOptions {
        all_states: flags.all_states,
        max_steps,
        workers: flags.workers,
    };
    let verdicts = check_all_with(&model, &reqs, &opts);
    let report = Report::new(&model, src.as_bytes(), &verdicts, t0.elapsed());
    let text = match flags.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(use_color()),
    };
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

/// Parses a simulation script into one input per step.
///
/// Each non-blank line lists `name=value` pairs for monitored variables,
/// separated by spaces or commas; unlisted variables keep their value. A line
/// holding only `-` is a step with no changes. `--` starts a comment.
pub fn parse_script(model: &Model, start: &State, script: &str) -> Result<Vec<EnvInput>, String> {
    let mut current = EnvInput::current(model, start).values().to_vec();
    let mut envs = Vec::new();
    for (n, raw) in script.lines().enumerate() {
        let line = raw.split("--").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = n + 1;
        if line != "-" {
            for item in line.split(|c: char| c.is_whitespace() || c == ',') {
                if item.is_empty() {
                    continue;
                }
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| format!("line {lineno}: expected `name=value`, found `{item}`"))?;
                let var = model
                    .var_id(name.trim())
                    .ok_or_else(|| format!("line {lineno}: unknown variable `{name}`"))?;
                if model.var(var).kind != VarKind::Monitored {
                    return Err(format!(
                        "line {lineno}: `{name}` is a controlled variable; scripts set monitored variables only"
                    ));
                }
                let domain = model.var_domain(var);
                let v = domain.value_id(value.trim()).ok_or_else(|| {
                    format!(
                        "line {lineno}: `{value}` is not a value of domain `{}`",
                        domain.name
                    )
                })?;
                let slot = model.monitored().iter().position(|m| *m == var).unwrap();
                current[slot] = v;
            }
        }
        envs.push(EnvInput::from_values(current.clone()));
    }
    Ok(envs)
}

pub fn cmd_simulate(
    model_path: &Path,
    script_path: &Path,
    init: usize,
    out: &mut dyn Write,
) -> Result<i32, String> {
    let (model, _) = load_model(model_path)?;
    let script = read(script_path)?;
    let start = model
        .init()
        .get(init)
        .cloned()
        .ok_or_else(|| format!("model has {} init states, no index {init}", model.init().len()))?;
    let envs =
        parse_script(&model, &start, &script).map_err(|e| format!("{}: {e}", script_path.display()))?;
    let io = |e: std::io::Error| e.to_string();

    writeln!(out, "{}", format_step(&model, 0, None, &start)).map_err(io)?;
    let mut state = start;
    for (i, env) in envs.iter().enumerate() {
        match step(&model, &state, env) {
            Ok(next) => {
                state = next;
                writeln!(out, "{}", format_step(&model, i + 1, Some(env), &state)).map_err(io)?;
            }
            Err(e) => {
                writeln!(
                    out,
                    "step {} | env: {} | crash: {}",
                    i + 1,
                    model.format_env(env),
                    e.describe(&model)
                )
                .map_err(io)?;
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_reach(model_path: &Path, format: Format, out: &mut dyn Write) -> Result<i32, String> {
    let (model, _) = load_model(model_path)?;
    let io = |e: std::io::Error| e.to_string();
    match reach(&model) {
        Ok(set) => {
            match format {
                Format::Text => {
                    writeln!(out, "reachable states: {}", set.len()).map_err(io)?;
                    for s in set.states() {
                        writeln!(out, "{}", model.format_state(s)).map_err(io)?;
                    }
                }
                Format::Json => {
                    let states: Vec<_> = set
                        .states()
                        .iter()
                        .map(|s| {
                            model
                                .state_pairs(s)
                                .into_iter()
                                .collect::<indexmap::IndexMap<_, _>>()
                        })
                        .collect();
                    let doc = json!({ "count": set.len(), "states": states });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Err(crash) => {
            writeln!(out, "crash: {}", crash.error.describe(&model)).map_err(io)?;
            for (i, s) in crash.path.iter().enumerate() {
                writeln!(out, "{}", format_step(&model, i, s.env.as_ref(), &s.state)).map_err(io)?;
            }
            let pre = overwrite(&model, &crash.path.last().unwrap().state, &crash.env);
            writeln!(
                out,
                "step {} | env: {} | crash in: {}",
                crash.path.len(),
                model.format_env(&crash.env),
                model.format_state(&pre)
            )
            .map_err(io)?;
            Ok(EXIT_VIOLATION)
        }
    }
}

pub fn cmd_corpus(dir: &Path, out: &mut dyn Write) -> Result<i32, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for (name, src) in lgs_corpus::FILES {
        let path = dir.join(name);
        std::fs::write(&path, src).map_err(|e| format!("{}: {e}", path.display()))?;
        writeln!(out, "{}", path.display()).map_err(|e| e.to_string())?;
    }
    Ok(EXIT_OK)
}
