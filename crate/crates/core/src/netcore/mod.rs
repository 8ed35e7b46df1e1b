//! Proof nets: links, wires and conclusions, their textual formats, and
//! structural and logical checks.

mod canonical;
mod correctness;
mod dcl;
mod description;
mod net;
mod validate;

pub use canonical::{canonical_form, is_connected, CanonicalForm};
pub use correctness::{check_correctness, sequentializable, switching_criterion};
pub use dcl::{emit_pn_dcl, parse_pn_dcl};
pub use description::{parse_description, parse_term, term_to_net, Term};
pub use net::{End, Link, LinkId, LinkSort, NetBuilder, Port, ProofNet};
pub use validate::{validate_structure, Violation};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("description, offset {pos}: {msg}")]
    Description { pos: usize, msg: String },
    #[error("description: {0}")]
    Index(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid net: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
