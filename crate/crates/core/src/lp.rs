//! Horn logic programs with non-clausal rules.
//!
//! A rule `body => head` has a negation-free body and a Horn head; the
//! program denotes the conjunction of its facts and of `(or (not body) head)`
//! for every rule. Entailment of a query is decided on the program's minimal
//! model.

use std::collections::BTreeSet;

use crate::calculus::{solve, CalculusError, SolveOptions, SolveOutcome};
use crate::formula::{is_identifier, FormulaStore, Literal, Node, NodeId, ParseError, Var};
use crate::oracle::evaluate_true_set;
use crate::recognizer::classify_nc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HnfRule {
    pub body: NodeId,
    pub head: NodeId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HnfProgram {
    pub rules: Vec<HnfRule>,
    pub facts: BTreeSet<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("rule {index}: {reason}")]
    InvalidRule { index: usize, reason: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

impl HnfProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_fact(&mut self, var: Var) {
        self.facts.insert(var);
    }

    pub fn add_rule(&mut self, body: NodeId, head: NodeId) {
        self.rules.push(HnfRule { body, head });
    }

    /// Reads the line format
    ///
    /// ```text
    /// # comment
    /// fact A
    /// rule (and A B) => (or ~C D)
    /// ```
    pub fn parse(store: &mut FormulaStore, text: &str) -> Result<Self, LpError> {
        let mut program = HnfProgram::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| LpError::Syntax { line, message };
            let (keyword, rest) = content
                .split_once(char::is_whitespace)
                .map(|(k, r)| (k, r.trim()))
                .unwrap_or((content, ""));
            match keyword {
                "fact" => {
                    if !is_identifier(rest) {
                        return Err(syntax(format!("invalid fact {rest:?}")));
                    }
                    let v = store.var(rest);
                    program.add_fact(v);
                }
                "rule" => {
                    let (body, head) = rest
                        .split_once("=>")
                        .ok_or_else(|| syntax("expected 'rule <body> => <head>'".into()))?;
                    let at = |e: ParseError| syntax(format!("{}: {}", e.column, e.message));
                    let body = store.parse(body).map_err(at)?;
                    let head = store.parse(head).map_err(at)?;
                    program.add_rule(body, head);
                }
                other => return Err(syntax(format!("unknown directive {other:?}"))),
            }
        }
        Ok(program)
    }

    /// The program as one formula: fact literals first, then one
    /// `(or (not body) head)` per rule, in negation normal form.
    pub fn to_formula(&self, store: &mut FormulaStore) -> Result<NodeId, LpError> {
        let mut parts: Vec<NodeId> = self
            .facts
            .iter()
            .map(|v| store.lit(Literal::pos(*v)))
            .collect();
        for (index, rule) in self.rules.iter().enumerate() {
            let invalid = |reason: &str| LpError::InvalidRule {
                index,
                reason: reason.to_string(),
            };
            if !is_positive_nnf(store, rule.body) {
                return Err(invalid(
                    "body must be a negation-free formula without negative literals",
                ));
            }
            if !classify_nc(store, rule.head).is_hnf() {
                return Err(invalid("head is not Horn"));
            }
            let not_body = store.not(rule.body);
            let f = store.disj(vec![not_body, rule.head]);
            let f = store.to_nnf(f);
            if !classify_nc(store, f).is_hnf() {
                return Err(invalid("rule formula is not Horn"));
            }
            parts.push(f);
        }
        Ok(store.conj(parts))
    }

    /// Whether every model of the program satisfies `query`. An inconsistent
    /// program entails everything; otherwise `query` is evaluated in the
    /// minimal model.
    pub fn entails(&self, store: &mut FormulaStore, query: NodeId) -> Result<bool, LpError> {
        let f = self.to_formula(store)?;
        Ok(match solve(store, f, SolveOptions::default())? {
            SolveOutcome::Unsat { .. } => true,
            SolveOutcome::Sat { model, .. } => evaluate_true_set(store, query, &model),
        })
    }
}

fn is_positive_nnf(store: &FormulaStore, root: NodeId) -> bool {
    store
        .postorder(root)
        .into_iter()
        .all(|id| match store.node(id) {
            Node::Lit(l) => l.is_positive(),
            Node::Neg(_) => false,
            Node::True | Node::False | Node::Conj(_) | Node::Disj(_) => true,
        })
}

/// See [`HnfProgram::to_formula`].
pub fn program_to_formula(store: &mut FormulaStore, p: &HnfProgram) -> Result<NodeId, LpError> {
    p.to_formula(store)
}

/// See [`HnfProgram::entails`].
pub fn entails(store: &mut FormulaStore, p: &HnfProgram, query: NodeId) -> Result<bool, LpError> {
    p.entails(store, query)
}
