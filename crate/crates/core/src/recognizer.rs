//! Linear-time Horn-NNF recognition.
//!
//! Every node gets one of three labels, computed bottom-up once per DAG node:
//! `Negative` (no positive literal), `NonNegativeHnf` (Horn, with a positive
//! literal) or `NotHnf`. A disjunction is Horn when at most one of its
//! disjuncts is non-negative and all of them are Horn; a conjunction is Horn
//! when all its conjuncts are.

use serde::Serialize;

use crate::formula::{FormulaStore, Node, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HnfLabel {
    Negative,
    NonNegativeHnf,
    NotHnf,
}

impl HnfLabel {
    pub fn is_hnf(self) -> bool {
        self != HnfLabel::NotHnf
    }

    /// CLI spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            HnfLabel::Negative => "negative-hnf",
            HnfLabel::NonNegativeHnf => "hnf",
            HnfLabel::NotHnf => "not-hnf",
        }
    }
}

impl std::fmt::Display for HnfLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which recognition case produced a label.
///
/// `A`: a disjunction with two or more non-negative disjuncts, or a node
/// inheriting `NotHnf` from a child. `B`: a disjunction with exactly one
/// non-negative disjunct, or a positive literal. `C`: an all-negative
/// disjunction, or a negative literal. `D`: a conjunction with a non-negative
/// conjunct. `E`: an all-negative conjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    A,
    B,
    C,
    D,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub node: NodeId,
    pub label: HnfLabel,
    pub case: CaseTag,
    /// Constant or empty connective; such inputs should be simplified first.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecognizeError {
    #[error("node {0} is a negation; the input must be in negation normal form")]
    NotNnf(NodeId),
}

fn label_node(node: &Node, memo: &[Option<HnfLabel>]) -> (HnfLabel, CaseTag, bool) {
    use HnfLabel::*;
    let child = |c: &NodeId| memo[c.index()].expect("children labelled first");
    match node {
        Node::Lit(l) if l.is_positive() => (NonNegativeHnf, CaseTag::B, false),
        Node::Lit(_) => (Negative, CaseTag::C, false),
        Node::True => (Negative, CaseTag::E, true),
        Node::False => (Negative, CaseTag::C, true),
        Node::Neg(_) => unreachable!("rejected by caller"),
        Node::Disj(cs) => {
            let mut positive = 0usize;
            for c in cs.iter() {
                match child(c) {
                    NotHnf => return (NotHnf, CaseTag::A, false),
                    NonNegativeHnf => positive += 1,
                    Negative => {}
                }
            }
            match positive {
                0 => (Negative, CaseTag::C, cs.is_empty()),
                1 => (NonNegativeHnf, CaseTag::B, false),
                _ => (NotHnf, CaseTag::A, false),
            }
        }
        Node::Conj(cs) => {
            let mut positive = false;
            for c in cs.iter() {
                match child(c) {
                    NotHnf => return (NotHnf, CaseTag::A, false),
                    NonNegativeHnf => positive = true,
                    Negative => {}
                }
            }
            if positive {
                (NonNegativeHnf, CaseTag::D, false)
            } else {
                (Negative, CaseTag::E, cs.is_empty())
            }
        }
    }
}

fn run(
    store: &FormulaStore,
    root: NodeId,
    mut sink: impl FnMut(NodeId, HnfLabel, CaseTag, bool),
) -> Result<HnfLabel, RecognizeError> {
    let mut memo: Vec<Option<HnfLabel>> = vec![None; root.index() + 1];
    for id in store.postorder(root) {
        let node = store.node(id);
        if matches!(node, Node::Neg(_)) {
            return Err(RecognizeError::NotNnf(id));
        }
        let (label, case, degenerate) = label_node(node, &memo);
        memo[id.index()] = Some(label);
        sink(id, label, case, degenerate);
    }
    Ok(memo[root.index()].expect("root labelled"))
}

/// Label of an NNF formula.
pub fn classify_nnf(store: &FormulaStore, root: NodeId) -> Result<HnfLabel, RecognizeError> {
    run(store, root, |_, _, _, _| {})
}

/// One entry per distinct reachable node, in postorder; the last entry is the
/// root.
pub fn classify_trace(
    store: &FormulaStore,
    root: NodeId,
) -> Result<Vec<TraceEntry>, RecognizeError> {
    let mut out = Vec::new();
    run(store, root, |node, label, case, degenerate| {
        out.push(TraceEntry {
            node,
            label,
            case,
            degenerate,
        })
    })?;
    Ok(out)
}

/// Label of an arbitrary NC formula after negation push-down and constant
/// folding. A formula that folds to `T` or `F` counts as Horn.
pub fn classify_nc(store: &mut FormulaStore, root: NodeId) -> HnfLabel {
    let nnf = store.to_nnf(root);
    let simple = store.simplify_constants(nnf);
    match store.node(simple) {
        Node::True | Node::False => HnfLabel::Negative,
        _ => classify_nnf(store, simple).expect("to_nnf output has no negation"),
    }
}

/// Horn non-clausal membership.
pub fn is_hnc(store: &mut FormulaStore, root: NodeId) -> bool {
    classify_nc(store, root).is_hnf()
}
