//! Clausal form by exhaustive distribution.
//!
//! `cl` multiplies out disjunctions over conjunctions. It is exponential and
//! exists as a reference point for the linear recognizer and for semantic
//! tests, so a clause-count cap turns runaway expansions into an error.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::formula::{FormulaStore, Literal, Node, NodeId};

pub const DEFAULT_CLAUSE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClausalError {
    #[error("clausal form would exceed {cap} clauses")]
    BlowupLimitExceeded { cap: usize },
    #[error("node {0} is a negation; the input must be in negation normal form")]
    NotNnf(NodeId),
}

/// Disjunction of literals in distribution order. Repeated literals are kept:
/// `(or A A)` has two positive literals and is not Horn.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        Clause {
            literals: literals.into_iter().collect(),
        }
    }

    /// The same clause with repeated literals removed.
    pub fn dedup(&self) -> Clause {
        let mut out = Vec::with_capacity(self.literals.len());
        for l in &self.literals {
            if !out.contains(l) {
                out.push(*l);
            }
        }
        Clause { literals: out }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.literals.iter().filter(|l| l.is_positive()).count()
    }

    /// At most one positive literal occurrence.
    pub fn is_horn(&self) -> bool {
        self.positive_count() <= 1
    }

    pub fn is_tautology(&self) -> bool {
        self.literals
            .iter()
            .any(|l| self.literals.contains(&l.negate()))
    }

    fn concat(&self, other: &Clause) -> Clause {
        let mut literals = Vec::with_capacity(self.literals.len() + other.literals.len());
        literals.extend_from_slice(&self.literals);
        literals.extend_from_slice(&other.literals);
        Clause { literals }
    }
}

/// Conjunction of clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClausalFormula {
    clauses: Vec<Clause>,
}

impl ClausalFormula {
    pub fn new(clauses: Vec<Clause>) -> Self {
        ClausalFormula { clauses }
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Every clause is Horn (vacuously true for the empty formula).
    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(Clause::is_horn)
    }

    /// Display variant: removes repeated literals, tautologies and repeated
    /// clauses. Horn-ness of the result may differ from the faithful form.
    pub fn cleaned(&self) -> ClausalFormula {
        let mut seen = std::collections::HashSet::new();
        let clauses = self
            .clauses
            .iter()
            .map(Clause::dedup)
            .filter(|c| !c.is_tautology())
            .filter(|c| {
                let mut key = c.literals.clone();
                key.sort();
                seen.insert(key)
            })
            .collect();
        ClausalFormula { clauses }
    }

    /// Builds `(and (or …) …)` in `store`.
    pub fn to_formula(&self, store: &mut FormulaStore) -> NodeId {
        let clauses = self
            .clauses
            .iter()
            .map(|c| {
                let lits = c.literals.iter().map(|l| store.lit(*l)).collect();
                store.disj(lits)
            })
            .collect();
        store.conj(clauses)
    }

    /// DIMACS CNF text; variables are numbered in order of first appearance
    /// and listed in `c` comment lines.
    pub fn to_dimacs(&self, store: &FormulaStore) -> String {
        let mut numbers: HashMap<crate::formula::Var, usize> = HashMap::new();
        let mut order = Vec::new();
        for c in &self.clauses {
            for l in &c.literals {
                numbers.entry(l.var()).or_insert_with(|| {
                    order.push(l.var());
                    order.len()
                });
            }
        }
        let mut out = String::new();
        for (i, v) in order.iter().enumerate() {
            let _ = writeln!(out, "c {} {}", i + 1, store.var_name(*v));
        }
        let _ = writeln!(out, "p cnf {} {}", order.len(), self.clauses.len());
        for c in &self.clauses {
            for l in &c.literals {
                let n = numbers[&l.var()] as i64;
                let _ = write!(out, "{} ", if l.is_positive() { n } else { -n });
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Clausal form of an NNF formula with the default cap.
pub fn cl(store: &FormulaStore, root: NodeId) -> Result<ClausalFormula, ClausalError> {
    cl_capped(store, root, DEFAULT_CLAUSE_CAP)
}

/// Clausal form of an NNF formula.
///
/// Conjunctions concatenate their children's clauses; disjunctions take the
/// product, left to right, with the leftmost child varying slowest. Nothing is
/// merged or removed, so repeated literals, tautologies and repeated clauses
/// all survive. `T`/`(and)` contribute no
/// clause and `F`/`(or)` contribute the empty clause.
pub fn cl_capped(
    store: &FormulaStore,
    root: NodeId,
    cap: usize,
) -> Result<ClausalFormula, ClausalError> {
    let order = store.postorder(root);
    let mut memo: HashMap<NodeId, Vec<Clause>> = HashMap::with_capacity(order.len());
    let blowup = ClausalError::BlowupLimitExceeded { cap };
    for id in order {
        let clauses = match store.node(id) {
            Node::Neg(_) => return Err(ClausalError::NotNnf(id)),
            Node::Lit(l) => vec![Clause::new([*l])],
            Node::True => Vec::new(),
            Node::False => vec![Clause::default()],
            Node::Conj(cs) => {
                let total: usize = cs.iter().map(|c| memo[c].len()).sum();
                if total > cap {
                    return Err(blowup);
                }
                cs.iter().flat_map(|c| memo[c].iter().cloned()).collect()
            }
            Node::Disj(cs) => {
                let mut total: usize = 1;
                for c in cs.iter() {
                    total = total.saturating_mul(memo[c].len());
                }
                if total > cap {
                    return Err(blowup);
                }
                let mut acc = vec![Clause::default()];
                for c in cs.iter() {
                    let rhs = &memo[c];
                    let mut next = Vec::with_capacity(acc.len() * rhs.len());
                    for a in &acc {
                        for b in rhs {
                            next.push(a.concat(b));
                        }
                    }
                    acc = next;
                }
                acc
            }
        };
        memo.insert(id, clauses);
    }
    Ok(ClausalFormula {
        clauses: memo.remove(&root).unwrap_or_default(),
    })
}

/// Clausal form of an arbitrary NC formula: negations pushed in first.
pub fn cl_star(store: &mut FormulaStore, root: NodeId) -> Result<ClausalFormula, ClausalError> {
    cl_star_capped(store, root, DEFAULT_CLAUSE_CAP)
}

pub fn cl_star_capped(
    store: &mut FormulaStore,
    root: NodeId,
    cap: usize,
) -> Result<ClausalFormula, ClausalError> {
    let nnf = store.to_nnf(root);
    cl_capped(store, nnf, cap)
}
