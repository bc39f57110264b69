//! Saturation of a Horn non-clausal formula under the calculus.
//!
//! The root conjunction is kept as a set of conjunct slots indexed by the
//! literals they contain. Each derived unit `ℓ` is resolved once against every
//! slot containing `ℓ̄` (one HUR), the rewritten slots are simplified, and
//! any conjunction that surfaces is flattened back into the root, which may
//! expose new units.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde_json::{json, Value};

use super::{literal_paths, postorder_sparse, CalculusError, Rule, RuleApplication, Simplifier};
use crate::formula::{FormulaStore, Literal, Node, NodeId, Var};
use crate::oracle::evaluate_true_set;
use crate::recognizer::classify_nnf;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Record every rule application with its before/after formulas.
    pub trace: bool,
    /// Also replace same-sign occurrences of each unit by `T`.
    pub true_prop: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub start: NodeId,
    /// Empty unless tracing was requested.
    pub steps: Vec<RuleApplication>,
    /// Number of rule applications, counted whether or not steps are kept.
    pub applications: usize,
    pub final_formula: NodeId,
}

impl Trace {
    pub fn to_json(&self, store: &FormulaStore) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "rule": s.rule.name(),
                    "unit": s.unit.map(|l| store.literal_text(l)),
                    "targets": s.targets,
                    "before": store.print(s.before),
                    "after": store.print(s.after),
                })
            })
            .collect();
        json!({
            "start": store.print(self.start),
            "final": store.print(self.final_formula),
            "applications": self.applications,
            "steps": steps,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unsat {
        trace: Trace,
    },
    /// `model` holds the true variables; every other variable is false.
    Sat {
        model: BTreeSet<Var>,
        trace: Trace,
    },
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat { .. })
    }

    pub fn model(&self) -> Option<&BTreeSet<Var>> {
        match self {
            SolveOutcome::Sat { model, .. } => Some(model),
            SolveOutcome::Unsat { .. } => None,
        }
    }

    pub fn trace(&self) -> &Trace {
        match self {
            SolveOutcome::Sat { trace, .. } | SolveOutcome::Unsat { trace } => trace,
        }
    }
}

/// Decides a Horn non-clausal formula and, when satisfiable, returns its
/// minimal model. The model is checked against `phi` before returning.
pub fn solve(
    store: &mut FormulaStore,
    phi: NodeId,
    opts: SolveOptions,
) -> Result<SolveOutcome, CalculusError> {
    let nnf = store.to_nnf(phi);
    let simple = store.simplify_constants(nnf);
    let trace = |steps, applications, final_formula| Trace {
        start: phi,
        steps,
        applications,
        final_formula,
    };
    match store.node(simple) {
        Node::True => return finish_sat(store, phi, BTreeSet::new(), trace(Vec::new(), 0, simple)),
        Node::False => {
            let empty = store.empty_disj();
            return Ok(SolveOutcome::Unsat {
                trace: trace(Vec::new(), 0, empty),
            });
        }
        _ => {}
    }
    if !classify_nnf(store, simple).expect("NNF input").is_hnf() {
        return Err(CalculusError::NotHornNc);
    }

    let mut simp = Simplifier::new(opts.trace);
    let root = simp.run(store, simple);
    match store.node(root).clone() {
        Node::Disj(cs) if cs.is_empty() => Ok(SolveOutcome::Unsat {
            trace: trace(simp.steps, simp.count, root),
        }),
        Node::Lit(l) => {
            let model = if l.is_positive() {
                BTreeSet::from([l.var()])
            } else {
                BTreeSet::new()
            };
            finish_sat(store, phi, model, trace(simp.steps, simp.count, root))
        }
        // A Horn disjunction has a negative disjunct, which all-false satisfies.
        Node::Disj(_) => finish_sat(
            store,
            phi,
            BTreeSet::new(),
            trace(simp.steps, simp.count, root),
        ),
        Node::Conj(cs) => {
            let mut sat = Saturation::new(store, opts, simp);
            for (i, &c) in cs.iter().enumerate() {
                let key = if opts.trace {
                    vec![i as u32]
                } else {
                    Vec::new()
                };
                sat.add_slot(c, key);
            }
            let model = sat.run();
            let final_formula = match model {
                Some(_) => sat.materialize(&[]),
                None => sat.store.empty_disj(),
            };
            let t = trace(sat.simp.steps, sat.simp.count, final_formula);
            match model {
                Some(model) => finish_sat(store, phi, model, t),
                None => Ok(SolveOutcome::Unsat { trace: t }),
            }
        }
        Node::True | Node::False | Node::Neg(_) => unreachable!("constant-free NNF"),
    }
}

fn finish_sat(
    store: &FormulaStore,
    phi: NodeId,
    model: BTreeSet<Var>,
    trace: Trace,
) -> Result<SolveOutcome, CalculusError> {
    if !evaluate_true_set(store, phi, &model) {
        return Err(CalculusError::InternalModelInvalid);
    }
    Ok(SolveOutcome::Sat { model, trace })
}

/// The minimal model of a Horn non-clausal formula, or `None` if it is
/// unsatisfiable.
pub fn minimal_model(
    store: &mut FormulaStore,
    phi: NodeId,
) -> Result<Option<BTreeSet<Var>>, CalculusError> {
    Ok(solve(store, phi, SolveOptions::default())?.model().cloned())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    False,
    True,
    Node(NodeId),
}

/// Sets every occurrence of `falsify` to false and of `trueify` to true under
/// `root`, folding the constants upward.
fn assign(
    store: &mut FormulaStore,
    root: NodeId,
    falsify: Option<Literal>,
    trueify: Option<Literal>,
) -> Val {
    let mut memo: HashMap<NodeId, Val> = HashMap::new();
    for id in postorder_sparse(store, root) {
        let val = match store.node(id) {
            Node::Lit(l) if Some(*l) == falsify => Val::False,
            Node::Lit(l) if Some(*l) == trueify => Val::True,
            Node::True => Val::True,
            Node::False => Val::False,
            Node::Lit(_) | Node::Neg(_) => Val::Node(id),
            node @ (Node::Conj(_) | Node::Disj(_)) => {
                let is_conj = matches!(node, Node::Conj(_));
                let cs = node.children().to_vec();
                let (absorbing, neutral) = if is_conj {
                    (Val::False, Val::True)
                } else {
                    (Val::True, Val::False)
                };
                let mut kept = Vec::with_capacity(cs.len());
                let mut changed = false;
                let mut absorbed = false;
                for c in cs.iter() {
                    match memo[c] {
                        v if v == absorbing => {
                            absorbed = true;
                            break;
                        }
                        v if v == neutral => changed = true,
                        Val::Node(n) => {
                            changed |= n != *c;
                            kept.push(n);
                        }
                        _ => unreachable!(),
                    }
                }
                if absorbed {
                    absorbing
                } else if kept.is_empty() {
                    neutral
                } else if !changed {
                    Val::Node(id)
                } else if is_conj {
                    Val::Node(store.conj(kept))
                } else {
                    Val::Node(store.disj(kept))
                }
            }
        };
        memo.insert(id, val);
    }
    memo[&root]
}

struct Slot {
    node: NodeId,
    /// Position in the printed root conjunction; only maintained when tracing.
    key: Vec<u32>,
}

struct Saturation<'s> {
    store: &'s mut FormulaStore,
    opts: SolveOptions,
    slots: Vec<Option<Slot>>,
    index: HashMap<Literal, Vec<usize>>,
    queue: VecDeque<Literal>,
    processed: HashSet<Literal>,
    simp: Simplifier,
}

impl<'s> Saturation<'s> {
    fn new(store: &'s mut FormulaStore, opts: SolveOptions, simp: Simplifier) -> Self {
        Saturation {
            store,
            opts,
            slots: Vec::new(),
            index: HashMap::new(),
            queue: VecDeque::new(),
            processed: HashSet::new(),
            simp,
        }
    }

    fn add_slot(&mut self, node: NodeId, key: Vec<u32>) -> usize {
        let idx = self.slots.len();
        for id in postorder_sparse(self.store, node) {
            if let Node::Lit(l) = self.store.node(id) {
                self.index.entry(*l).or_default().push(idx);
            }
        }
        if let Node::Lit(l) = self.store.node(node) {
            if !self.processed.contains(l) {
                self.queue.push_back(*l);
            }
        }
        self.slots.push(Some(Slot { node, key }));
        idx
    }

    fn alive_with(&self, lit: Literal) -> Vec<usize> {
        self.index
            .get(&lit)
            .map(|v| {
                v.iter()
                    .copied()
                    .filter(|&i| self.slots[i].is_some())
                    .collect()
            })
            .unwrap_or_default()
    }

    /// The root conjunction with some slots overridden, and the printed
    /// position of each slot.
    fn layout(&mut self, overrides: &[(usize, NodeId)]) -> (NodeId, HashMap<usize, usize>) {
        let mut items: Vec<(&[u32], usize, NodeId)> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (&s.key[..], i, s.node)))
            .collect();
        for (_, i, node) in items.iter_mut() {
            if let Some(&(_, n)) = overrides.iter().find(|(j, _)| j == i) {
                *node = n;
            }
        }
        items.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(&b.1)));
        let positions = items
            .iter()
            .enumerate()
            .map(|(p, (_, i, _))| (*i, p))
            .collect();
        let nodes: Vec<NodeId> = items.into_iter().map(|(_, _, n)| n).collect();
        let root = if nodes.len() == 1 {
            nodes[0]
        } else {
            self.store.conj(nodes)
        };
        (root, positions)
    }

    fn materialize(&mut self, overrides: &[(usize, NodeId)]) -> NodeId {
        self.layout(overrides).0
    }

    fn target_paths(&mut self, slots: &[usize], lit: Literal) -> (NodeId, Vec<Vec<usize>>) {
        let (root, positions) = self.layout(&[]);
        let single = positions.len() == 1;
        let mut out = Vec::new();
        for &i in slots {
            let node = self.slots[i].as_ref().expect("alive").node;
            for mut p in literal_paths(self.store, node, lit) {
                if !single {
                    p.insert(0, positions[&i]);
                }
                out.push(p);
            }
        }
        out.sort();
        (root, out)
    }

    /// Saturates; `None` means the empty disjunction was derived.
    fn run(&mut self) -> Option<BTreeSet<Var>> {
        while let Some(lit) = self.queue.pop_front() {
            if !self.processed.insert(lit) {
                continue;
            }
            if !self.resolve(lit) {
                return None;
            }
            if self.opts.true_prop {
                self.propagate_true(lit);
            }
        }
        Some(
            self.processed
                .iter()
                .filter(|l| l.is_positive())
                .map(|l| l.var())
                .collect(),
        )
    }

    /// One HUR step for `lit`; false once the root has become `(or)`.
    fn resolve(&mut self, lit: Literal) -> bool {
        let neg = lit.negate();
        let targets = self.alive_with(neg);
        if targets.is_empty() {
            return true;
        }
        let trace = self.opts.trace;
        let (before, paths) = if trace {
            self.target_paths(&targets, neg)
        } else {
            (self.store.empty_disj(), Vec::new())
        };
        let mut rewritten = Vec::with_capacity(targets.len());
        let mut contradiction = false;
        for &t in &targets {
            let node = self.slots[t].as_ref().expect("alive").node;
            match assign(self.store, node, Some(neg), None) {
                Val::False => {
                    let empty = self.store.empty_disj();
                    rewritten.push((t, empty));
                    contradiction = true;
                    break;
                }
                Val::Node(n) => rewritten.push((t, n)),
                Val::True => unreachable!("nothing is set to true"),
            }
        }
        let after = if trace {
            self.materialize(&rewritten)
        } else {
            before
        };
        self.simp.push(RuleApplication {
            rule: Rule::Hur,
            unit: Some(lit),
            targets: paths,
            before,
            after,
        });
        if contradiction {
            let empty = self.store.empty_disj();
            self.simp.push(RuleApplication {
                rule: Rule::FConj,
                unit: None,
                targets: Vec::new(),
                before: after,
                after: empty,
            });
            return false;
        }
        for (t, n) in rewritten {
            self.replace(t, n);
        }
        true
    }

    fn propagate_true(&mut self, lit: Literal) {
        let unit = self.store.lit(lit);
        let targets: Vec<usize> = self
            .alive_with(lit)
            .into_iter()
            .filter(|&i| self.slots[i].as_ref().expect("alive").node != unit)
            .collect();
        if targets.is_empty() {
            return;
        }
        let trace = self.opts.trace;
        let (before, paths) = if trace {
            self.target_paths(&targets, lit)
        } else {
            (self.store.empty_disj(), Vec::new())
        };
        let mut rewritten = Vec::with_capacity(targets.len());
        for &t in &targets {
            let node = self.slots[t].as_ref().expect("alive").node;
            match assign(self.store, node, None, Some(lit)) {
                Val::True => {
                    let tt = self.store.tt();
                    rewritten.push((t, tt));
                }
                Val::Node(n) => rewritten.push((t, n)),
                Val::False => unreachable!("nothing is set to false"),
            }
        }
        let after = if trace {
            self.materialize(&rewritten)
        } else {
            before
        };
        self.simp.push(RuleApplication {
            rule: Rule::TrueProp,
            unit: Some(lit),
            targets: paths,
            before,
            after,
        });
        let tt = self.store.tt();
        for (t, n) in rewritten {
            if n == tt {
                self.slots[t] = None;
            } else {
                self.replace(t, n);
            }
        }
    }

    /// Simplifies the rewritten conjunct `n` of slot `t` and puts it back,
    /// flattening a conjunction into the root.
    fn replace(&mut self, t: usize, n: NodeId) {
        let s = self.simp.run(self.store, n);
        let key = self.slots[t].take().expect("alive").key;
        match self.store.node(s).clone() {
            Node::Conj(cs) if !cs.is_empty() => {
                let before = if self.opts.trace {
                    self.slots[t] = Some(Slot {
                        node: s,
                        key: key.clone(),
                    });
                    let b = self.materialize(&[]);
                    self.slots[t] = None;
                    b
                } else {
                    self.store.empty_disj()
                };
                for (j, &c) in cs.iter().enumerate() {
                    let k = if self.opts.trace {
                        let mut k = key.clone();
                        k.push(j as u32);
                        k
                    } else {
                        Vec::new()
                    };
                    self.add_slot(c, k);
                }
                let after = if self.opts.trace {
                    self.materialize(&[])
                } else {
                    before
                };
                self.simp.push(RuleApplication {
                    rule: Rule::Flatten,
                    unit: None,
                    targets: Vec::new(),
                    before,
                    after,
                });
            }
            _ => {
                self.add_slot(s, key);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_models, models_intersection};

    fn run(text: &str) -> (FormulaStore, NodeId, SolveOutcome) {
        let mut s = FormulaStore::new();
        let id = s.parse(text).unwrap();
        let out = solve(
            &mut s,
            id,
            SolveOptions {
                trace: true,
                true_prop: false,
            },
        )
        .unwrap();
        (s, id, out)
    }

    fn names(s: &FormulaStore, m: &BTreeSet<Var>) -> Vec<String> {
        let mut v: Vec<String> = m.iter().map(|v| s.var_name(*v).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn contradiction() {
        let (s, _, out) = run("(and A ~A)");
        assert!(!out.is_sat());
        assert_eq!(s.print(out.trace().final_formula), "(or)");
        let last = out.trace().steps.last().unwrap();
        assert_eq!(s.print(last.after), "(or)");
    }

    #[test]
    fn chained_implication() {
        let (s, _, out) = run("(and A (or ~A B))");
        assert_eq!(names(&s, out.model().unwrap()), ["A", "B"]);
    }

    #[test]
    fn disjunction_shortcut() {
        let (_, _, out) = run("(or (and ~B ~D) (and C A))");
        assert_eq!(out.model().unwrap().len(), 0);
        assert_eq!(out.trace().applications, 0);
    }

    #[test]
    fn negative_clause() {
        let (_, _, out) = run("(or ~A ~B)");
        assert!(out.model().unwrap().is_empty());
    }

    #[test]
    fn instantiated_running_example_is_unsat() {
        let text = "(and (or C ~D) (or ~A (and (or ~A ~C) (or ~E (and ~B ~A)) C)) A)";
        let (mut s, id, out) = run(text);
        assert!(!out.is_sat());
        assert!(enumerate_models(&s, id).unwrap().is_empty());
        let t = out.trace();
        assert!(t.applications as u64 <= s.size(id));
        assert_eq!(s.print(t.steps.last().unwrap().after), "(or)");
        // HUR with A, then flattening of the exposed conjunction.
        assert_eq!(t.steps[0].rule, Rule::Hur);
        assert_eq!(
            t.steps[0].targets,
            vec![vec![1, 0], vec![1, 1, 0, 0], vec![1, 1, 1, 1, 1]]
        );
        let after_first = s.print(t.steps[0].after);
        assert_eq!(
            after_first,
            "(and (or C ~D) (or (and (or ~C) (or ~E) C)) A)"
        );
        let _ = s.parse(&after_first).unwrap();
    }

    #[test]
    fn trace_chains_and_steps_are_sound() {
        let text = "(and (or C ~D) (or ~A (and (or ~A ~C) (or ~E (and ~B ~A)) C)) A (or D ~G))";
        let (mut s, _, out) = run(text);
        let t = out.trace();
        assert_eq!(t.applications, t.steps.len());
        for step in &t.steps {
            let (b, a) = match step.unit {
                Some(l) => {
                    let u = s.lit(l);
                    (s.conj(vec![u, step.before]), s.conj(vec![u, step.after]))
                }
                None => (step.before, step.after),
            };
            assert!(
                crate::oracle::equivalent(&s, b, a).unwrap(),
                "{:?}",
                step.rule
            );
        }
    }

    #[test]
    fn model_is_least() {
        let text = "(and (or ~A B) A (or ~B (and C (or ~D E))) (or ~C ~G))";
        let (s, id, out) = run(text);
        let m = out.model().unwrap();
        assert_eq!(names(&s, m), ["A", "B", "C"]);
        assert_eq!(&models_intersection(&s, id).unwrap().unwrap(), m);
    }

    #[test]
    fn rejects_non_horn() {
        let mut s = FormulaStore::new();
        let id = s.parse("(or A B)").unwrap();
        assert_eq!(
            solve(&mut s, id, SolveOptions::default()),
            Err(CalculusError::NotHornNc)
        );
    }

    #[test]
    fn constants() {
        let (_, _, out) = run("(or A T)");
        assert!(out.is_sat());
        let (_, _, out) = run("(and A F)");
        assert!(!out.is_sat());
        let (_, _, out) = run("(not (and A (not F)))");
        assert!(out.is_sat());
    }

    #[test]
    fn true_prop_agrees() {
        let text = "(and A (or ~A B) (or ~B (and A C)) (or ~C ~D (and A E)))";
        let mut s = FormulaStore::new();
        let id = s.parse(text).unwrap();
        let plain = solve(&mut s, id, SolveOptions::default()).unwrap();
        let tp = solve(
            &mut s,
            id,
            SolveOptions {
                trace: true,
                true_prop: true,
            },
        )
        .unwrap();
        assert_eq!(plain.model(), tp.model());
        assert!(tp.trace().steps.iter().any(|r| r.rule == Rule::TrueProp));
    }
}
