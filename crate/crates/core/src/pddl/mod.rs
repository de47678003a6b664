//! Reader for the STRIPS-with-costs subset of PDDL and the grounder that
//! turns a domain/problem pair into a [`GroundedTask`].
//!
//! Supported: `:strips`, `:typing`, `:action-costs`, positive conjunctive
//! preconditions and goals, add and delete effects, and integer costs given
//! as `(increase (total-cost) n)`. Everything else is rejected with
//! [`PddlError::Unsupported`] rather than silently dropped.

mod ast;
mod ground;
mod parse;
mod sexpr;

pub use ast::*;
pub use ground::{ground, ground_pair, GroundedTask};
pub use parse::{check_problem, parse_domain, parse_problem};
pub use sexpr::Pos;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("syntax error at {pos} near `{token}`: {message}")]
    Syntax { pos: Pos, token: String, message: String },
    #[error("unsupported PDDL feature `{construct}` at {pos}")]
    Unsupported { construct: String, pos: Pos },
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: &'static str, name: String },
    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("`{symbol}` takes {expected} arguments, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("problem is for domain `{problem}` but the domain is `{domain}`")]
    DomainMismatch { domain: String, problem: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parses and grounds a domain/problem pair in one step.
pub fn load_task(domain: &str, problem: &str) -> Result<GroundedTask, PddlError> {
    ground(&parse_domain(domain)?, &parse_problem(problem)?)
}
