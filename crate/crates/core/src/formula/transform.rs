use std::collections::HashMap;

use super::{FormulaStore, Node, NodeId};

#[derive(Clone, Copy, PartialEq)]
enum Folded {
    True,
    False,
    Formula(NodeId),
}

impl FormulaStore {
    /// Removes the constants `T`, `F`, `(and)` and `(or)` by folding:
    /// a conjunction with a false conjunct is false, a disjunction with a true
    /// disjunct is true, true conjuncts and false disjuncts are dropped.
    ///
    /// The result is constant-free, or is exactly `T` or `F` when the whole
    /// formula folds to a constant. A connective that loses children and is
    /// left with a single one is replaced by that child.
    pub fn simplify_constants(&mut self, root: NodeId) -> NodeId {
        let order = self.postorder(root);
        let mut memo: HashMap<NodeId, Folded> = HashMap::with_capacity(order.len());
        for id in order {
            let node = self.node(id).clone();
            let folded = match &node {
                Node::True => Folded::True,
                Node::False => Folded::False,
                Node::Lit(_) => Folded::Formula(id),
                Node::Neg(c) => match memo[c] {
                    Folded::True => Folded::False,
                    Folded::False => Folded::True,
                    Folded::Formula(nc) if nc == *c => Folded::Formula(id),
                    Folded::Formula(nc) => Folded::Formula(self.not(nc)),
                },
                Node::Conj(cs) | Node::Disj(cs) => {
                    let is_conj = matches!(node, Node::Conj(_));
                    let (absorbing, neutral) = if is_conj {
                        (Folded::False, Folded::True)
                    } else {
                        (Folded::True, Folded::False)
                    };
                    if cs.is_empty() {
                        neutral
                    } else {
                        let mut kept = Vec::with_capacity(cs.len());
                        let mut dropped = false;
                        let mut absorbed = false;
                        for c in cs.iter() {
                            let f = memo[c];
                            if f == absorbing {
                                absorbed = true;
                                break;
                            } else if f == neutral {
                                dropped = true;
                            } else if let Folded::Formula(n) = f {
                                kept.push(n);
                            }
                        }
                        if absorbed {
                            absorbing
                        } else if kept.is_empty() {
                            neutral
                        } else if dropped && kept.len() == 1 {
                            Folded::Formula(kept[0])
                        } else if kept[..] == cs[..] {
                            Folded::Formula(id)
                        } else if is_conj {
                            Folded::Formula(self.conj(kept))
                        } else {
                            Folded::Formula(self.disj(kept))
                        }
                    }
                }
            };
            memo.insert(id, folded);
        }
        match memo[&root] {
            Folded::True => self.tt(),
            Folded::False => self.ff(),
            Folded::Formula(id) => id,
        }
    }

    /// Pushes negations down to the literals (De Morgan and double negation).
    ///
    /// A node reached under both polarities yields two copies, one per
    /// polarity, so the output DAG is at most twice the input DAG. Constants
    /// are flipped under negation but otherwise left in place.
    pub fn to_nnf(&mut self, root: NodeId) -> NodeId {
        let mut memo: HashMap<(NodeId, bool), NodeId> = HashMap::new();
        // (node, positive polarity, children already scheduled)
        let mut stack = vec![(root, true, false)];
        while let Some((id, pol, expanded)) = stack.pop() {
            if memo.contains_key(&(id, pol)) {
                continue;
            }
            let node = self.node(id).clone();
            let out = match node {
                Node::Lit(l) => self.lit(if pol { l } else { l.negate() }),
                Node::True => {
                    if pol {
                        self.tt()
                    } else {
                        self.ff()
                    }
                }
                Node::False => {
                    if pol {
                        self.ff()
                    } else {
                        self.tt()
                    }
                }
                Node::Neg(c) => match memo.get(&(c, !pol)) {
                    Some(&n) => n,
                    None => {
                        debug_assert!(!expanded);
                        stack.push((id, pol, true));
                        stack.push((c, !pol, false));
                        continue;
                    }
                },
                Node::Conj(cs) | Node::Disj(cs) => {
                    if !expanded {
                        stack.push((id, pol, true));
                        for &c in cs.iter().rev() {
                            stack.push((c, pol, false));
                        }
                        continue;
                    }
                    let kids: Vec<NodeId> = cs.iter().map(|c| memo[&(*c, pol)]).collect();
                    let is_conj = matches!(self.node(id), Node::Conj(_));
                    if is_conj == pol {
                        self.conj(kids)
                    } else {
                        self.disj(kids)
                    }
                }
            };
            memo.insert((id, pol), out);
        }
        memo[&(root, true)]
    }
}
