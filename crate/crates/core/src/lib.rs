//! Horn non-clausal formulas.
//!
//! A hash-consed formula store with parsing and printing, a linear-time
//! recognizer for the Horn-NNF class, the unit-resolution calculus with a
//! polynomial satisfiability procedure, a logic-programming front end and
//! brute-force oracles used for cross-checking.

pub mod bench;
pub mod calculus;
pub mod clausal;
pub mod formula;
pub mod lp;
pub mod oracle;
pub mod recognizer;

pub use formula::{FormulaStore, Literal, Node, NodeId, ParseError, Style, Var};
