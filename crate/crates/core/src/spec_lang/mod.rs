// SPDX-License-Identifier: Apache-2.0

//! The model and requirement language: lexing, parsing, name resolution,
//! type checking and canonical printing.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{
    DomainId, EnumDomain, Expr, Model, PatternKind, Requirement, Rule, Term, ValueId, VarDecl,
    VarId, VarKind,
};
pub use error::{Pos, SpecError};
pub use parser::{parse_model, parse_requirements};
