// SPDX-License-Identifier: Apache-2.0

//! Bounded checking of stimulus-response requirements on Abstract State
//! Machine models of reactive controllers.
//!
//! The pipeline is: [`spec_lang`] parses a model and its requirements,
//! [`asm_exec`] executes single steps with simultaneous-update semantics,
//! [`patterns`] turns each requirement into a driver routine quantified over
//! environment inputs, and [`explorer`] runs those routines from every
//! reachable state, producing replayable counterexamples.

pub mod asm_exec;
pub mod cli;
pub mod explorer;
pub mod lgs_corpus;
pub mod patterns;
pub mod spec_lang;

pub use asm_exec::{apply, eval_rule, step, CrashError, EnvInput, State, UpdateSet};
pub use explorer::{check_all, check_all_with, minimize, reach, CheckOptions, Status, Trace, Verdict};
pub use patterns::{check_exact_distance, check_max_distance, check_stability, PatternInstance};
pub use spec_lang::{parse_model, parse_requirements, Model, Requirement, SpecError};
