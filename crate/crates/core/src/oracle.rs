//! Brute-force ground truth: evaluation, truth tables, model enumeration,
//! equivalence, and a seeded random formula generator.
//!
//! Truth tables are computed bit-parallel, 2^16 assignments per block, so
//! memory stays bounded by the DAG size even near the variable guard.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::formula::{FormulaStore, Literal, Node, NodeId, Var};

/// Largest variable count the enumeration oracle accepts by default.
pub const DEFAULT_MAX_VARS: usize = 24;

const BLOCK_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("variable {0} has no value in the assignment")]
    UnassignedVariable(String),
    #[error("{found} variables exceed the enumeration limit of {limit}")]
    TooManyVariables { found: usize, limit: usize },
}

/// Total or partial map from variables to truth values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<Var, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `true` to `trues` and `false` to every other variable of `vars`.
    pub fn from_true_set(vars: &[Var], trues: &BTreeSet<Var>) -> Self {
        Assignment(vars.iter().map(|v| (*v, trues.contains(v))).collect())
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.0.insert(var, value);
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn true_vars(&self) -> BTreeSet<Var> {
        self.0
            .iter()
            .filter(|(_, b)| **b)
            .map(|(v, _)| *v)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.0.iter().map(|(v, b)| (*v, *b))
    }

    /// `{A:1, B:0}` with names taken from `store`, in name order.
    pub fn render(&self, store: &FormulaStore) -> String {
        let mut items: Vec<(&str, bool)> =
            self.iter().map(|(v, b)| (store.var_name(v), b)).collect();
        items.sort();
        let parts: Vec<String> = items
            .into_iter()
            .map(|(n, b)| format!("{n}:{}", u8::from(b)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Evaluates `root` under `a`; every reachable variable must be assigned.
pub fn evaluate(store: &FormulaStore, root: NodeId, a: &Assignment) -> Result<bool, OracleError> {
    let order = store.postorder(root);
    let mut memo: HashMap<NodeId, bool> = HashMap::with_capacity(order.len());
    for id in order {
        let value = match store.node(id) {
            Node::Lit(l) => {
                let v = a.get(l.var()).ok_or_else(|| {
                    OracleError::UnassignedVariable(store.var_name(l.var()).into())
                })?;
                v == l.is_positive()
            }
            Node::True => true,
            Node::False => false,
            Node::Neg(c) => !memo[c],
            Node::Conj(cs) => cs.iter().all(|c| memo[c]),
            Node::Disj(cs) => cs.iter().any(|c| memo[c]),
        };
        memo.insert(id, value);
    }
    Ok(memo[&root])
}

/// Evaluates with every variable outside `trues` set to false.
pub fn evaluate_true_set(store: &FormulaStore, root: NodeId, trues: &BTreeSet<Var>) -> bool {
    let vars = store.variables(root);
    evaluate(store, root, &Assignment::from_true_set(&vars, trues))
        .expect("assignment covers every variable")
}

/// Truth table over an explicit variable order. Row `r` assigns variable
/// `order[i]` the value of bit `i` of `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    vars: Vec<Var>,
    bits: Vec<u64>,
}

impl TruthTable {
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> u64 {
        1u64 << self.vars.len()
    }

    pub fn get(&self, row: u64) -> bool {
        self.bits[(row / 64) as usize] >> (row % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_satisfiable(&self) -> bool {
        self.bits.iter().any(|w| *w != 0)
    }

    pub fn satisfying_rows(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(wi as u64 * 64 + b)
            })
        })
    }

    pub fn row_assignment(&self, row: u64) -> Assignment {
        let mut a = Assignment::new();
        for (i, v) in self.vars.iter().enumerate() {
            a.set(*v, row >> i & 1 == 1);
        }
        a
    }
}

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Computes the truth table of `root` over `vars`, which must include every
/// variable of `root`.
pub fn truth_table_over(
    store: &FormulaStore,
    root: NodeId,
    vars: &[Var],
    limit: usize,
) -> Result<TruthTable, OracleError> {
    let n = vars.len();
    if n > limit {
        return Err(OracleError::TooManyVariables { found: n, limit });
    }
    let position: HashMap<Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let order = store.postorder(root);
    let index: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    for id in &order {
        if let Node::Lit(l) = store.node(*id) {
            if !position.contains_key(&l.var()) {
                return Err(OracleError::UnassignedVariable(
                    store.var_name(l.var()).into(),
                ));
            }
        }
    }

    let local_bits = n.min(BLOCK_BITS);
    let words = (1usize << local_bits).div_ceil(64);
    let last_mask = if local_bits >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u64 << local_bits)) - 1
    };
    let blocks = 1u64 << (n - local_bits);
    let mut bits = Vec::with_capacity(words * blocks as usize);
    let mut tables: Vec<Vec<u64>> = vec![Vec::new(); order.len()];

    for block in 0..blocks {
        for (k, id) in order.iter().enumerate() {
            let t: Vec<u64> = match store.node(*id) {
                Node::Lit(l) => {
                    let i = position[&l.var()];
                    let mut t: Vec<u64> = (0..words)
                        .map(|w| {
                            if i < 6 {
                                LOW_PATTERNS[i]
                            } else if i < BLOCK_BITS {
                                if w >> (i - 6) & 1 == 1 {
                                    u64::MAX
                                } else {
                                    0
                                }
                            } else if block >> (i - BLOCK_BITS) & 1 == 1 {
                                u64::MAX
                            } else {
                                0
                            }
                        })
                        .collect();
                    if !l.is_positive() {
                        t.iter_mut().for_each(|w| *w = !*w);
                    }
                    t
                }
                Node::True => vec![u64::MAX; words],
                Node::False => vec![0; words],
                Node::Neg(c) => tables[index[c]].iter().map(|w| !w).collect(),
                Node::Conj(cs) => {
                    let mut t = vec![u64::MAX; words];
                    for c in cs.iter() {
                        for (x, y) in t.iter_mut().zip(&tables[index[c]]) {
                            *x &= y;
                        }
                    }
                    t
                }
                Node::Disj(cs) => {
                    let mut t = vec![0; words];
                    for c in cs.iter() {
                        for (x, y) in t.iter_mut().zip(&tables[index[c]]) {
                            *x |= y;
                        }
                    }
                    t
                }
            };
            tables[k] = t;
        }
        let mut root_table = std::mem::take(&mut tables[index[&root]]);
        if let Some(last) = root_table.last_mut() {
            *last &= last_mask;
        }
        bits.extend(root_table);
    }
    Ok(TruthTable {
        vars: vars.to_vec(),
        bits,
    })
}

/// Truth table over the variables of `root` in name order.
pub fn truth_table(store: &FormulaStore, root: NodeId) -> Result<TruthTable, OracleError> {
    let vars = store.variables(root);
    truth_table_over(store, root, &vars, DEFAULT_MAX_VARS)
}

/// All models of `root` over its own variables, ordered lexicographically
/// with variables sorted by name and `0 < 1`.
pub fn enumerate_models(
    store: &FormulaStore,
    root: NodeId,
) -> Result<Vec<Assignment>, OracleError> {
    enumerate_models_limited(store, root, DEFAULT_MAX_VARS)
}

pub fn enumerate_models_limited(
    store: &FormulaStore,
    root: NodeId,
    limit: usize,
) -> Result<Vec<Assignment>, OracleError> {
    let vars = store.variables(root);
    let table = truth_table_over(store, root, &vars, limit)?;
    let mut rows: Vec<Vec<bool>> = table
        .satisfying_rows()
        .map(|r| (0..vars.len()).map(|i| r >> i & 1 == 1).collect())
        .collect();
    rows.sort();
    Ok(rows
        .into_iter()
        .map(|bits| {
            let mut a = Assignment::new();
            for (v, b) in vars.iter().zip(bits) {
                a.set(*v, b);
            }
            a
        })
        .collect())
}

/// True iff `a` and `b` agree under every assignment to their joint variables.
pub fn equivalent(store: &FormulaStore, a: NodeId, b: NodeId) -> Result<bool, OracleError> {
    equivalent_limited(store, a, b, DEFAULT_MAX_VARS)
}

pub fn equivalent_limited(
    store: &FormulaStore,
    a: NodeId,
    b: NodeId,
    limit: usize,
) -> Result<bool, OracleError> {
    let vars = joint_variables(store, &[a, b]);
    let ta = truth_table_over(store, a, &vars, limit)?;
    let tb = truth_table_over(store, b, &vars, limit)?;
    Ok(ta.bits == tb.bits)
}

/// Union of the variables of `roots`, sorted by name.
pub fn joint_variables(store: &FormulaStore, roots: &[NodeId]) -> Vec<Var> {
    let mut vars: Vec<Var> = roots.iter().flat_map(|r| store.variables(*r)).collect();
    vars.sort_by(|x, y| store.var_name(*x).cmp(store.var_name(*y)));
    vars.dedup();
    vars
}

/// Variables true in every model, or `None` if there is no model.
pub fn models_intersection(
    store: &FormulaStore,
    root: NodeId,
) -> Result<Option<BTreeSet<Var>>, OracleError> {
    let vars = store.variables(root);
    let table = truth_table_over(store, root, &vars, DEFAULT_MAX_VARS)?;
    let mut acc: Option<u64> = None;
    for r in table.satisfying_rows() {
        acc = Some(acc.map_or(r, |x| x & r));
    }
    Ok(acc.map(|mask| {
        vars.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| *v)
            .collect()
    }))
}

/// Shape of generated formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenMode {
    /// Unconstrained constant-free NNF.
    AnyNnf,
    /// Unconstrained NNF re-encoded with random `not` nodes.
    AnyNc,
    /// HNF by construction (inductive rules: literals, conjunctions of HNF,
    /// disjunctions of one HNF and any number of negative formulas).
    HnfBiased,
    /// An HNF re-encoded with random `not` nodes; its NNF is that HNF.
    HncBiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_vars: usize,
    pub max_depth: usize,
    pub max_arity: usize,
    pub mode: GenMode,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_vars: 6,
            max_depth: 4,
            max_arity: 3,
            mode: GenMode::AnyNnf,
        }
    }
}

/// Probability of wrapping a sub-formula in a negated dual when re-encoding
/// an NNF as an NC formula.
const NEG_WRAP: f64 = 0.3;

/// Deterministic random formula source.
///
/// Formulas grow top-down. At depth `d` a node becomes a literal with
/// probability `d / max_depth` (always at `max_depth`); otherwise it is a
/// conjunction or disjunction (even odds) whose arity is uniform in
/// `2..=max(2, max_arity >> (d / 2))`, so arity decays geometrically with
/// depth. Variables are `x0 .. x{max_vars-1}`, drawn uniformly, with a fair
/// sign.
pub struct Generator {
    cfg: GenConfig,
    rng: ChaCha8Rng,
    vars: Vec<Var>,
}

impl Generator {
    pub fn new(store: &mut FormulaStore, cfg: GenConfig) -> Self {
        assert!(
            cfg.max_vars > 0 && cfg.max_arity > 0,
            "generator bounds must be positive"
        );
        let vars = (0..cfg.max_vars)
            .map(|i| store.var(&format!("x{i}")))
            .collect();
        Generator {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            vars,
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn next(&mut self, store: &mut FormulaStore) -> NodeId {
        match self.cfg.mode {
            GenMode::AnyNnf => self.nnf(store, 0, None),
            GenMode::AnyNc => {
                let f = self.nnf(store, 0, None);
                self.encode_nc(store, f)
            }
            GenMode::HnfBiased => self.hnf(store, 0),
            GenMode::HncBiased => {
                let f = self.hnf(store, 0);
                self.encode_nc(store, f)
            }
        }
    }

    pub fn literal(&mut self, store: &mut FormulaStore, positive: Option<bool>) -> NodeId {
        let v = self.vars[self.rng.gen_range(0..self.vars.len())];
        let positive = positive.unwrap_or_else(|| self.rng.gen_bool(0.5));
        store.lit(Literal::new(v, positive))
    }

    fn is_leaf(&mut self, depth: usize) -> bool {
        depth >= self.cfg.max_depth || self.rng.gen_bool(depth as f64 / self.cfg.max_depth as f64)
    }

    fn arity(&mut self, depth: usize) -> usize {
        let hi = (self.cfg.max_arity >> (depth / 2)).max(2);
        self.rng.gen_range(2..=hi)
    }

    /// Random NNF; `sign` forces every literal to that polarity.
    pub fn nnf(&mut self, store: &mut FormulaStore, depth: usize, sign: Option<bool>) -> NodeId {
        if self.is_leaf(depth) {
            return self.literal(store, sign);
        }
        let k = self.arity(depth);
        let kids = (0..k).map(|_| self.nnf(store, depth + 1, sign)).collect();
        if self.rng.gen_bool(0.5) {
            store.conj(kids)
        } else {
            store.disj(kids)
        }
    }

    /// Random HNF built by the inductive rules.
    pub fn hnf(&mut self, store: &mut FormulaStore, depth: usize) -> NodeId {
        if self.is_leaf(depth) {
            return self.literal(store, None);
        }
        let k = self.arity(depth);
        if self.rng.gen_bool(0.5) {
            let kids = (0..k).map(|_| self.hnf(store, depth + 1)).collect();
            store.conj(kids)
        } else {
            let main = self.rng.gen_range(0..k);
            let kids = (0..k)
                .map(|i| {
                    if i == main {
                        self.hnf(store, depth + 1)
                    } else {
                        self.nnf(store, depth + 1, Some(false))
                    }
                })
                .collect();
            store.disj(kids)
        }
    }

    /// NC formula whose NNF is exactly `f`.
    pub fn encode_nc(&mut self, store: &mut FormulaStore, f: NodeId) -> NodeId {
        self.encode(store, f, true, true)
    }

    // Returns an NC formula whose NNF is `f` (positive) or the NNF dual of `f`.
    fn encode(
        &mut self,
        store: &mut FormulaStore,
        f: NodeId,
        positive: bool,
        wrap: bool,
    ) -> NodeId {
        if wrap && self.rng.gen_bool(NEG_WRAP) {
            let inner = self.encode(store, f, !positive, false);
            return store.not(inner);
        }
        match store.node(f).clone() {
            Node::Lit(l) => store.lit(if positive { l } else { l.negate() }),
            Node::True | Node::False | Node::Neg(_) => {
                if positive {
                    f
                } else {
                    store.not(f)
                }
            }
            Node::Conj(cs) | Node::Disj(cs) => {
                let is_conj = matches!(store.node(f), Node::Conj(_));
                let kids = cs
                    .iter()
                    .map(|c| self.encode(store, *c, positive, true))
                    .collect();
                if is_conj == positive {
                    store.conj(kids)
                } else {
                    store.disj(kids)
                }
            }
        }
    }
}

/// `n` formulas from a fresh generator seeded by `cfg`.
pub fn generate(store: &mut FormulaStore, cfg: GenConfig, n: usize) -> Vec<NodeId> {
    let mut g = Generator::new(store, cfg);
    (0..n).map(|_| g.next(store)).collect()
}
