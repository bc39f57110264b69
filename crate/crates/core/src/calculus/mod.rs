//! The non-clausal unit-resolution calculus.
//!
//! UR removes, given a unit conjunct `ℓ` of some conjunction, an occurrence of
//! `ℓ̄` under a sibling conjunct together with the largest sub-formula that
//! becomes false with it. It is implemented by falsifying the occurrence and
//! propagating upward: a conjunction with a false conjunct is false, a
//! disjunction drops false disjuncts and is false once it has none left. The
//! simplification rules `F∨`, `F∧`, `⊙φ` and `⊙⊙` are applied separately by
//! [`simplify_step`].

mod solve;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::formula::{FormulaStore, Literal, Node, NodeId};

pub use solve::{minimal_model, solve, SolveOptions, SolveOutcome, Trace};

/// A literal occurrence, addressed by child indices from `root`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub root: NodeId,
    pub path: Vec<usize>,
}

impl Occurrence {
    pub fn new(root: NodeId, path: Vec<usize>) -> Self {
        Occurrence { root, path }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "UR")]
    Ur,
    #[serde(rename = "HUR")]
    Hur,
    #[serde(rename = "LUR")]
    Lur,
    #[serde(rename = "F-or")]
    FDisj,
    #[serde(rename = "F-and")]
    FConj,
    #[serde(rename = "single-child")]
    SingleChild,
    #[serde(rename = "flatten")]
    Flatten,
    /// Replaces same-sign occurrences of a unit by `T`. Optional and not part
    /// of the calculus proper.
    #[serde(rename = "true-prop")]
    TrueProp,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ur => "UR",
            Rule::Hur => "HUR",
            Rule::Lur => "LUR",
            Rule::FDisj => "F-or",
            Rule::FConj => "F-and",
            Rule::SingleChild => "single-child",
            Rule::Flatten => "flatten",
            Rule::TrueProp => "true-prop",
        }
    }

    /// Resolution rules are only sound in conjunction with their unit.
    pub fn is_resolution(self) -> bool {
        matches!(self, Rule::Ur | Rule::Hur | Rule::Lur | Rule::TrueProp)
    }
}

/// One rule firing. For resolution rules `before`/`after` are whole formulas
/// and `targets` are the resolved paths in `before`; for simplification rules
/// they are the rewritten node and its replacement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub unit: Option<Literal>,
    pub targets: Vec<Vec<usize>>,
    pub before: NodeId,
    pub after: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("rule not applicable: {0}")]
    NotApplicable(String),
    #[error("formula is not Horn non-clausal")]
    NotHornNc,
    #[error("extracted model does not satisfy the formula")]
    InternalModelInvalid,
}

fn not_applicable(msg: impl Into<String>) -> CalculusError {
    CalculusError::NotApplicable(msg.into())
}

/// Nodes along `path`, starting with `root`. Negations may only appear as the
/// final node.
fn walk(store: &FormulaStore, root: NodeId, path: &[usize]) -> Result<Vec<NodeId>, CalculusError> {
    let mut nodes = Vec::with_capacity(path.len() + 1);
    let mut cur = root;
    nodes.push(cur);
    for &i in path {
        match store.node(cur) {
            Node::Conj(cs) | Node::Disj(cs) => {
                cur = *cs
                    .get(i)
                    .ok_or_else(|| not_applicable(format!("path {path:?} leaves the formula")))?;
            }
            Node::Neg(_) => {
                return Err(not_applicable(format!("path {path:?} crosses a negation")))
            }
            _ => return Err(not_applicable(format!("path {path:?} leaves the formula"))),
        }
        nodes.push(cur);
    }
    Ok(nodes)
}

fn expect_literal(
    store: &FormulaStore,
    root: NodeId,
    path: &[usize],
    lit: Literal,
) -> Result<Vec<NodeId>, CalculusError> {
    let nodes = walk(store, root, path)?;
    let last = *nodes.last().expect("walk yields the root");
    if store.node(last) != &Node::Lit(lit) {
        return Err(not_applicable(format!(
            "path {path:?} does not lead to the expected literal"
        )));
    }
    Ok(nodes)
}

/// Finds a unit occurrence licensing UR on the target at `target`: a direct
/// conjunct `unit` of a conjunction on the target's path, entered through a
/// different child. The closest such conjunction wins.
pub fn find_unit(
    store: &FormulaStore,
    root: NodeId,
    unit: Literal,
    target: &[usize],
) -> Option<Occurrence> {
    let nodes = walk(store, root, target).ok()?;
    for depth in (0..target.len()).rev() {
        if let Node::Conj(cs) = store.node(nodes[depth]) {
            let hit = cs
                .iter()
                .enumerate()
                .position(|(k, c)| k != target[depth] && store.node(*c) == &Node::Lit(unit));
            if let Some(k) = hit {
                let mut path = target[..depth].to_vec();
                path.push(k);
                return Some(Occurrence { root, path });
            }
        }
    }
    None
}

/// Tree paths to every occurrence of `lit` under `root`, in lexicographic
/// order. Negations are not entered.
pub fn literal_paths(store: &FormulaStore, root: NodeId, lit: Literal) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    // (node, next child)
    let mut stack = vec![(root, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (id, next) = *top;
        let node = store.node(id);
        if next == 0 && node == &Node::Lit(lit) {
            out.push(path.clone());
        }
        let children = match node {
            Node::Conj(cs) | Node::Disj(cs) => &cs[..],
            _ => &[],
        };
        if next < children.len() {
            top.1 += 1;
            path.push(next);
            stack.push((children[next], 0));
        } else {
            stack.pop();
            path.pop();
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Val {
    False,
    Node(NodeId),
}

/// Falsifies the literal occurrences at `paths` simultaneously and propagates
/// the falsity upward.
fn falsify_paths(store: &mut FormulaStore, root: NodeId, paths: &[Vec<usize>]) -> NodeId {
    struct TrieNode {
        node: NodeId,
        kids: Vec<(usize, usize)>,
        target: bool,
    }
    let mut trie = vec![TrieNode {
        node: root,
        kids: Vec::new(),
        target: false,
    }];
    for path in paths {
        let mut t = 0;
        for &i in path {
            t = match trie[t].kids.iter().find(|(k, _)| *k == i) {
                Some(&(_, next)) => next,
                None => {
                    let node = store.children(trie[t].node)[i];
                    trie.push(TrieNode {
                        node,
                        kids: Vec::new(),
                        target: false,
                    });
                    let next = trie.len() - 1;
                    trie[t].kids.push((i, next));
                    next
                }
            };
        }
        trie[t].target = true;
    }
    // Every trie node is created after its parent, so reverse creation order
    // handles children first.
    let mut vals: Vec<Option<Val>> = vec![None; trie.len()];
    for t in (0..trie.len()).rev() {
        let tn = &trie[t];
        let val = if tn.target {
            Val::False
        } else {
            let mut kids: Vec<Option<NodeId>> =
                store.children(tn.node).iter().map(|c| Some(*c)).collect();
            for &(i, k) in &tn.kids {
                kids[i] = match vals[k].expect("child processed") {
                    Val::False => None,
                    Val::Node(n) => Some(n),
                };
            }
            let is_conj = matches!(store.node(tn.node), Node::Conj(_));
            if is_conj && kids.iter().any(Option::is_none) {
                Val::False
            } else {
                let kept: Vec<NodeId> = kids.into_iter().flatten().collect();
                if kept.is_empty() {
                    Val::False
                } else if is_conj {
                    Val::Node(store.conj(kept))
                } else {
                    Val::Node(store.disj(kept))
                }
            }
        };
        vals[t] = Some(val);
    }
    match vals[0].expect("root processed") {
        Val::False => store.empty_disj(),
        Val::Node(n) => n,
    }
}

/// Unit resolution on one target occurrence.
///
/// `unit` must lead to a literal `ℓ` whose parent is a conjunction `N`;
/// `target` must lead to `ℓ̄` through a different child of `N`. Both paths
/// are relative to `phi`. The result is equivalent to `phi` given `ℓ`.
pub fn apply_ur(
    store: &mut FormulaStore,
    phi: NodeId,
    unit: &Occurrence,
    target: &Occurrence,
) -> Result<NodeId, CalculusError> {
    if unit.root != phi || target.root != phi {
        return Err(not_applicable("occurrence is rooted elsewhere"));
    }
    let Some((&k, parent)) = unit.path.split_last() else {
        return Err(not_applicable(
            "unit must be a conjunct, not the whole formula",
        ));
    };
    let unit_nodes = walk(store, phi, &unit.path)?;
    let lit = match store.node(unit_nodes[unit_nodes.len() - 1]) {
        Node::Lit(l) => *l,
        _ => return Err(not_applicable("unit path does not lead to a literal")),
    };
    if !matches!(store.node(unit_nodes[unit_nodes.len() - 2]), Node::Conj(_)) {
        return Err(not_applicable("unit is not a conjunct"));
    }
    expect_literal(store, phi, &target.path, lit.negate())?;
    let under_parent = target.path.len() > parent.len() && target.path.starts_with(parent);
    if !under_parent || target.path[parent.len()] == k {
        return Err(not_applicable("target is not under a sibling of the unit"));
    }
    Ok(falsify_paths(
        store,
        phi,
        std::slice::from_ref(&target.path),
    ))
}

/// Hyper unit resolution: every target is resolved at once. Each target must
/// lead to `ℓ̄` and have some unit conjunct `ℓ` as in [`apply_ur`].
pub fn apply_hur(
    store: &mut FormulaStore,
    phi: NodeId,
    unit: Literal,
    targets: &[Occurrence],
) -> Result<NodeId, CalculusError> {
    if targets.is_empty() {
        return Err(not_applicable("no targets"));
    }
    for (i, t) in targets.iter().enumerate() {
        if t.root != phi {
            return Err(not_applicable(format!("target {i} is rooted elsewhere")));
        }
        expect_literal(store, phi, &t.path, unit.negate())
            .map_err(|e| not_applicable(format!("target {i}: {e}")))?;
        if find_unit(store, phi, unit, &t.path).is_none() {
            return Err(not_applicable(format!("target {i} has no unit conjunct")));
        }
    }
    let paths: Vec<Vec<usize>> = targets.iter().map(|t| t.path.clone()).collect();
    Ok(falsify_paths(store, phi, &paths))
}

/// Local unit resolution: UR inside the sub-formula `scope`, whose rewritten
/// form replaces every occurrence of `scope` in `phi`. Paths are relative to
/// `scope`.
pub fn apply_lur(
    store: &mut FormulaStore,
    phi: NodeId,
    scope: NodeId,
    unit: &Occurrence,
    target: &Occurrence,
) -> Result<NodeId, CalculusError> {
    if !reachable(store, phi, scope) {
        return Err(not_applicable("scope is not a sub-formula"));
    }
    let rewritten = apply_ur(store, scope, unit, target)?;
    Ok(store.substitute(phi, scope, rewritten))
}

fn reachable(store: &FormulaStore, root: NodeId, needle: NodeId) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if id == needle {
            return true;
        }
        if id > needle && seen.insert(id) {
            stack.extend_from_slice(store.children(id));
        }
    }
    false
}

/// Postorder over the nodes reachable from `root`, with a visited set sized to
/// the sub-formula rather than to the store.
fn postorder_sparse(store: &FormulaStore, root: NodeId) -> Vec<NodeId> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut stack = vec![(root, 0usize)];
    seen.insert(root);
    while let Some(top) = stack.last_mut() {
        let (id, next) = *top;
        let children = store.children(id);
        if next < children.len() {
            top.1 += 1;
            let c = children[next];
            if seen.insert(c) {
                stack.push((c, 0));
            }
        } else {
            order.push(id);
            stack.pop();
        }
    }
    order
}

/// Runs one bottom-up pass of the simplification rules; the result is a fixed
/// point of the rules.
pub fn simplify_step(store: &mut FormulaStore, root: NodeId) -> NodeId {
    Simplifier::new(false).run(store, root)
}

/// As [`simplify_step`], also returning every rule firing in order.
pub fn simplify_step_traced(
    store: &mut FormulaStore,
    root: NodeId,
) -> (NodeId, Vec<RuleApplication>) {
    let mut s = Simplifier::new(true);
    let out = s.run(store, root);
    (out, s.steps)
}

pub(crate) struct Simplifier {
    record: bool,
    pub(crate) steps: Vec<RuleApplication>,
    pub(crate) count: usize,
}

impl Simplifier {
    pub(crate) fn new(record: bool) -> Self {
        Simplifier {
            record,
            steps: Vec::new(),
            count: 0,
        }
    }

    pub(crate) fn run(&mut self, store: &mut FormulaStore, root: NodeId) -> NodeId {
        let mut memo: HashMap<NodeId, NodeId> = HashMap::new();
        for id in postorder_sparse(store, root) {
            let out = match store.node(id).clone() {
                Node::Conj(cs) => {
                    let kids = cs.iter().map(|c| memo[c]).collect();
                    self.normalize(store, true, kids)
                }
                Node::Disj(cs) => {
                    let kids = cs.iter().map(|c| memo[c]).collect();
                    self.normalize(store, false, kids)
                }
                node => store.rebuild_with(id, &node, &memo),
            };
            memo.insert(id, out);
        }
        memo[&root]
    }

    fn fire(&mut self, rule: Rule, before: NodeId, after: NodeId) {
        self.push(RuleApplication {
            rule,
            unit: None,
            targets: Vec::new(),
            before,
            after,
        });
    }

    /// Counts an application and keeps it when recording.
    pub(crate) fn push(&mut self, app: RuleApplication) {
        self.count += 1;
        if self.record {
            self.steps.push(app);
        }
    }

    fn normalize(
        &mut self,
        store: &mut FormulaStore,
        is_conj: bool,
        mut kids: Vec<NodeId>,
    ) -> NodeId {
        let make = |store: &mut FormulaStore, kids: &[NodeId]| {
            if is_conj {
                store.conj(kids.to_vec())
            } else {
                store.disj(kids.to_vec())
            }
        };
        loop {
            let empty = kids.iter().position(|k| store.node(*k).is_empty_disj());
            match (is_conj, empty) {
                (true, Some(_)) => {
                    let before = make(store, &kids);
                    let after = store.empty_disj();
                    self.fire(Rule::FConj, before, after);
                    return after;
                }
                (false, Some(pos)) => {
                    let before = make(store, &kids);
                    kids.remove(pos);
                    let after = make(store, &kids);
                    self.fire(Rule::FDisj, before, after);
                    continue;
                }
                _ => {}
            }
            if kids.len() == 1 {
                let before = make(store, &kids);
                self.fire(Rule::SingleChild, before, kids[0]);
                return kids[0];
            }
            let nested = kids.iter().position(|k| match store.node(*k) {
                Node::Conj(_) => is_conj,
                Node::Disj(_) => !is_conj,
                _ => false,
            });
            if let Some(pos) = nested {
                let before = make(store, &kids);
                let inner = store.children(kids[pos]).to_vec();
                kids.splice(pos..=pos, inner);
                let after = make(store, &kids);
                self.fire(Rule::Flatten, before, after);
                continue;
            }
            return make(store, &kids);
        }
    }
}
