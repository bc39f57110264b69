//! Non-clausal formulas stored as a hash-consed DAG.
//!
//! Every formula lives in a [`FormulaStore`] and is referred to by a
//! [`NodeId`]. Nodes are interned: building a node whose shape already exists
//! returns the existing identifier, so equal sub-formulas are shared and
//! structural equality is identifier equality.
//!
//! Children always carry smaller identifiers than their parents, which makes
//! the store acyclic by construction and lets most passes run bottom-up
//! without recursion.

mod metrics;
mod parse;
mod print;
mod transform;

use std::collections::HashMap;
use std::fmt;

pub use metrics::SizeMetrics;
pub use parse::ParseError;
pub use print::Style;

/// Interned propositional variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A variable together with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: Var,
    positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn pos(var: Var) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: Var) -> Self {
        Literal::new(var, false)
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

/// Handle to a node of a [`FormulaStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One node of the formula DAG.
///
/// `Conj([])` and `Disj([])` are legal and denote truth and falsity
/// respectively; the calculus produces the empty disjunction when it derives
/// a contradiction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Lit(Literal),
    True,
    False,
    Conj(Box<[NodeId]>),
    Disj(Box<[NodeId]>),
    Neg(NodeId),
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Conj(cs) | Node::Disj(cs) => cs,
            Node::Neg(c) => std::slice::from_ref(c),
            Node::Lit(_) | Node::True | Node::False => &[],
        }
    }

    pub fn is_empty_disj(&self) -> bool {
        matches!(self, Node::Disj(cs) if cs.is_empty())
    }
}

#[derive(Debug, Default, Clone)]
pub struct FormulaStore {
    nodes: Vec<Node>,
    interned: HashMap<Node, NodeId>,
    names: Vec<String>,
    vars: HashMap<String, Var>,
}

/// Returns true when `name` is a legal variable name: a letter followed by
/// letters, digits or underscores, and not one of the reserved constants.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "T" && name != "F"
}

impl FormulaStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of nodes ever created in this store.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns a variable name.
    ///
    /// Panics if `name` is not an identifier; use [`FormulaStore::try_var`]
    /// for untrusted input.
    pub fn var(&mut self, name: &str) -> Var {
        self.try_var(name)
            .unwrap_or_else(|| panic!("invalid variable name {name:?}"))
    }

    pub fn try_var(&mut self, name: &str) -> Option<Var> {
        if let Some(&v) = self.vars.get(name) {
            return Some(v);
        }
        if !is_identifier(name) {
            return None;
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.vars.insert(name.to_owned(), v);
        Some(v)
    }

    pub fn lookup_var(&self, name: &str) -> Option<Var> {
        self.vars.get(name).copied()
    }

    pub fn var_name(&self, var: Var) -> &str {
        &self.names[var.index()]
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.nodes[id.index()].children()
    }

    /// Interns `node`, returning the existing id if the shape is known.
    pub fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.interned.get(&node) {
            return id;
        }
        let id = NodeId(u32::try_from(self.nodes.len()).expect("formula store overflow"));
        debug_assert!(node.children().iter().all(|c| *c < id));
        self.nodes.push(node.clone());
        self.interned.insert(node, id);
        id
    }

    pub fn lit(&mut self, lit: Literal) -> NodeId {
        self.intern(Node::Lit(lit))
    }

    /// Positive literal for the named variable.
    pub fn pos(&mut self, name: &str) -> NodeId {
        let v = self.var(name);
        self.lit(Literal::pos(v))
    }

    /// Negative literal for the named variable.
    pub fn neg(&mut self, name: &str) -> NodeId {
        let v = self.var(name);
        self.lit(Literal::neg(v))
    }

    pub fn tt(&mut self) -> NodeId {
        self.intern(Node::True)
    }

    pub fn ff(&mut self) -> NodeId {
        self.intern(Node::False)
    }

    pub fn conj(&mut self, children: Vec<NodeId>) -> NodeId {
        self.intern(Node::Conj(children.into_boxed_slice()))
    }

    pub fn disj(&mut self, children: Vec<NodeId>) -> NodeId {
        self.intern(Node::Disj(children.into_boxed_slice()))
    }

    /// The empty disjunction `(or)`.
    pub fn empty_disj(&mut self) -> NodeId {
        self.disj(Vec::new())
    }

    pub fn not(&mut self, child: NodeId) -> NodeId {
        self.intern(Node::Neg(child))
    }

    /// Distinct nodes reachable from `root`, children before parents.
    pub fn postorder(&self, root: NodeId) -> Vec<NodeId> {
        let mut visited = vec![false; root.index() + 1];
        let mut order = Vec::new();
        // (node, next child to visit)
        let mut stack = vec![(root, 0usize)];
        visited[root.index()] = true;
        while let Some(top) = stack.last_mut() {
            let (id, next) = *top;
            let children = self.children(id);
            if next < children.len() {
                top.1 += 1;
                let c = children[next];
                if !visited[c.index()] {
                    visited[c.index()] = true;
                    stack.push((c, 0));
                }
            } else {
                order.push(id);
                stack.pop();
            }
        }
        order
    }

    /// Variables occurring under `root`, sorted by name.
    pub fn variables(&self, root: NodeId) -> Vec<Var> {
        let mut vars: Vec<Var> = self
            .postorder(root)
            .into_iter()
            .filter_map(|id| match self.node(id) {
                Node::Lit(l) => Some(l.var()),
                _ => None,
            })
            .collect();
        vars.sort_by(|a, b| self.var_name(*a).cmp(self.var_name(*b)));
        vars.dedup();
        vars
    }

    /// True when no `Neg` node is reachable from `root`.
    pub fn is_nnf(&self, root: NodeId) -> bool {
        self.postorder(root)
            .into_iter()
            .all(|id| !matches!(self.node(id), Node::Neg(_)))
    }

    /// Follows a child-index path from `root`.
    pub fn resolve(&self, root: NodeId, path: &[usize]) -> Option<NodeId> {
        let mut cur = root;
        for &i in path {
            cur = *self.children(cur).get(i)?;
        }
        Some(cur)
    }

    /// Replaces every occurrence of `from` under `root` with `to`.
    pub fn substitute(&mut self, root: NodeId, from: NodeId, to: NodeId) -> NodeId {
        let order = self.postorder(root);
        let mut memo: HashMap<NodeId, NodeId> = HashMap::with_capacity(order.len());
        for id in order {
            let new = if id == from {
                to
            } else {
                let node = self.node(id).clone();
                self.rebuild_with(id, &node, &memo)
            };
            memo.insert(id, new);
        }
        memo[&root]
    }

    /// Rebuilds `node` (whose id is `id`) with children mapped through `memo`;
    /// returns `id` unchanged when no child moved.
    pub(crate) fn rebuild_with(
        &mut self,
        id: NodeId,
        node: &Node,
        memo: &HashMap<NodeId, NodeId>,
    ) -> NodeId {
        let map = |c: &NodeId| memo.get(c).copied().unwrap_or(*c);
        match node {
            Node::Lit(_) | Node::True | Node::False => id,
            Node::Neg(c) => {
                let nc = map(c);
                if nc == *c {
                    id
                } else {
                    self.not(nc)
                }
            }
            Node::Conj(cs) | Node::Disj(cs) => {
                let mapped: Vec<NodeId> = cs.iter().map(map).collect();
                if mapped[..] == cs[..] {
                    id
                } else if matches!(node, Node::Conj(_)) {
                    self.conj(mapped)
                } else {
                    self.disj(mapped)
                }
            }
        }
    }
}
