use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{FormulaStore, Node, NodeId};

/// Size measures of a formula.
///
/// `size` counts symbol occurrences in the tree unfolding (literals,
/// constants and connectives, a negative literal being one symbol) and
/// saturates at `u64::MAX`. `dag_size` counts distinct reachable nodes.
/// Depth is the longest edge path to a leaf; leaves and empty connectives
/// have depth 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeMetrics {
    pub size: u64,
    pub dag_size: usize,
    pub depth: usize,
    pub n_vars: usize,
}

impl FormulaStore {
    pub fn size_metrics(&self, root: NodeId) -> SizeMetrics {
        let order = self.postorder(root);
        let mut memo: HashMap<NodeId, (u64, usize)> = HashMap::with_capacity(order.len());
        let mut vars = HashSet::new();
        for &id in &order {
            let node = self.node(id);
            if let Node::Lit(l) = node {
                vars.insert(l.var());
            }
            let children = node.children();
            let entry = if children.is_empty() {
                (1, 0)
            } else {
                children.iter().fold((1u64, 0usize), |(s, d), c| {
                    let (cs, cd) = memo[c];
                    (s.saturating_add(cs), d.max(cd + 1))
                })
            };
            memo.insert(id, entry);
        }
        let (size, depth) = memo[&root];
        SizeMetrics {
            size,
            dag_size: order.len(),
            depth,
            n_vars: vars.len(),
        }
    }

    /// Tree-unfolding size; see [`SizeMetrics`].
    pub fn size(&self, root: NodeId) -> u64 {
        self.size_metrics(root).size
    }
}
