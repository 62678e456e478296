//! Invariants of enumerated free knots, links and n-n tangles.
//!
//! Diagrams are unsigned Gauss codes ([`diagram`]). The [`moves`] module
//! implements Reidemeister moves for free diagrams together with random
//! walks and a bounded equivalence search. Two invariants are provided: the
//! mod-2 splicing bracket over pure crossings ([`bracket`]) and, for
//! diagrams in good condition without pure crossings, words in a free
//! product of copies of Z2 ([`invariant`], [`words`]).

pub mod bracket;
pub mod cli;
pub mod diagram;
pub mod generate;
pub mod invariant;
pub mod moves;
pub mod words;

pub use diagram::{
    parse_diagram, Basepoint, ComponentCode, CrossingId, CrossingType, Diagram, DiagramError, DiagramKind,
    ParityTable, Violation,
};
