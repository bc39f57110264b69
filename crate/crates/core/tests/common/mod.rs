#![allow(dead_code)]

//! Reference implementations used as test oracles. They work on an owned
//! tree instead of the shared store, so they do not reuse library code paths.

use hornnc::calculus::{find_unit, literal_paths, Occurrence};
use hornnc::{FormulaStore, Literal, Node, NodeId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Lit(String, bool),
    True,
    False,
    And(Vec<Tree>),
    Or(Vec<Tree>),
    Not(Box<Tree>),
}

impl Tree {
    pub fn from_store(s: &FormulaStore, id: NodeId) -> Tree {
        match s.node(id) {
            Node::Lit(l) => Tree::Lit(s.var_name(l.var()).to_string(), l.is_positive()),
            Node::True => Tree::True,
            Node::False => Tree::False,
            Node::Conj(cs) => Tree::And(cs.iter().map(|c| Tree::from_store(s, *c)).collect()),
            Node::Disj(cs) => Tree::Or(cs.iter().map(|c| Tree::from_store(s, *c)).collect()),
            Node::Neg(c) => Tree::Not(Box::new(Tree::from_store(s, *c))),
        }
    }

    pub fn text(&self) -> String {
        let join = |head: &str, cs: &[Tree]| {
            let mut out = format!("({head}");
            for c in cs {
                out.push(' ');
                out.push_str(&c.text());
            }
            out.push(')');
            out
        };
        match self {
            Tree::Lit(n, true) => n.clone(),
            Tree::Lit(n, false) => format!("~{n}"),
            Tree::True => "T".into(),
            Tree::False => "F".into(),
            Tree::And(cs) => join("and", cs),
            Tree::Or(cs) => join("or", cs),
            Tree::Not(c) => format!("(not {})", c.text()),
        }
    }

    fn is_empty_or(&self) -> bool {
        matches!(self, Tree::Or(cs) if cs.is_empty())
    }

    pub fn at(&self, path: &[usize]) -> Option<&Tree> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Tree::And(cs) | Tree::Or(cs) => cs.get(i)?.at(rest),
                _ => None,
            },
        }
    }

    /// Replaces every target with `(or)` and propagates along the target
    /// paths only: a conjunction with a falsified child becomes `(or)`, a
    /// disjunction drops falsified children.
    pub fn falsify(&self, paths: &[Vec<usize>]) -> Tree {
        if paths.iter().any(|p| p.is_empty()) {
            return Tree::Or(vec![]);
        }
        let (is_and, cs) = match self {
            Tree::And(cs) => (true, cs),
            Tree::Or(cs) => (false, cs),
            _ => return self.clone(),
        };
        let mut kids = Vec::new();
        for (i, c) in cs.iter().enumerate() {
            let sub: Vec<Vec<usize>> = paths
                .iter()
                .filter(|p| p[0] == i)
                .map(|p| p[1..].to_vec())
                .collect();
            if sub.is_empty() {
                kids.push(c.clone());
                continue;
            }
            let r = c.falsify(&sub);
            if r.is_empty_or() {
                if is_and {
                    return Tree::Or(vec![]);
                }
            } else {
                kids.push(r);
            }
        }
        if is_and {
            Tree::And(kids)
        } else if kids.is_empty() {
            Tree::Or(vec![])
        } else {
            Tree::Or(kids)
        }
    }

    /// Clauses by naive distribution, as literal lists with repetitions.
    pub fn clauses(&self) -> Vec<Vec<(String, bool)>> {
        match self {
            Tree::Lit(n, p) => vec![vec![(n.clone(), *p)]],
            Tree::And(cs) => cs.iter().flat_map(|c| c.clauses()).collect(),
            Tree::Or(cs) => {
                let mut acc: Vec<Vec<(String, bool)>> = vec![vec![]];
                for c in cs {
                    let cc = c.clauses();
                    acc = acc
                        .iter()
                        .flat_map(|a| {
                            cc.iter().map(move |b| {
                                let mut x = a.clone();
                                x.extend(b.iter().cloned());
                                x
                            })
                        })
                        .collect();
                }
                acc
            }
            Tree::True | Tree::False | Tree::Not(_) => panic!("constant-free NNF expected"),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Tree::And(cs) | Tree::Or(cs) => 1 + cs.iter().map(Tree::size).sum::<usize>(),
            Tree::Not(c) => 1 + c.size(),
            _ => 1,
        }
    }
}

/// Sequential UR over `targets`, deepest and rightmost first, re-locating a
/// unit before each step. Targets that no longer exist are skipped.
pub fn sequential_ur(
    s: &mut FormulaStore,
    phi: NodeId,
    unit: Literal,
    targets: &[Vec<usize>],
) -> NodeId {
    let mut order = targets.to_vec();
    order.sort();
    order.reverse();
    let mut cur = phi;
    let mut removed: Vec<Vec<usize>> = Vec::new();
    for t in order {
        if removed.iter().any(|r| t.starts_with(r)) {
            continue;
        }
        let Some(u) = find_unit(s, cur, unit, &t) else {
            continue;
        };
        let before = Tree::from_store(s, cur);
        cur = hornnc::calculus::apply_ur(s, cur, &u, &Occurrence::new(cur, t.clone())).unwrap();
        removed.extend(collapsed_prefixes(&before, &t));
    }
    cur
}

// Prefixes of `t` whose nodes disappear when `t` is falsified.
fn collapsed_prefixes(tree: &Tree, t: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut dead = t.len();
    // Walk upwards while the falsification keeps collapsing.
    loop {
        out.push(t[..dead].to_vec());
        if dead == 0 {
            break;
        }
        let parent = tree.at(&t[..dead - 1]).unwrap();
        let collapses = match parent {
            Tree::And(_) => true,
            Tree::Or(cs) => cs.len() == 1,
            _ => false,
        };
        if !collapses {
            break;
        }
        dead -= 1;
    }
    out
}

pub fn random_tree(rng: &mut ChaCha8Rng, vars: usize, depth: usize, constants: bool) -> Tree {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if constants && rng.gen_bool(0.15) {
            return match rng.gen_range(0..4) {
                0 => Tree::Or(vec![]),
                1 => Tree::And(vec![]),
                2 => Tree::True,
                _ => Tree::False,
            };
        }
        return Tree::Lit(format!("v{}", rng.gen_range(0..vars)), rng.gen_bool(0.5));
    }
    let lo = if constants { 1 } else { 2 };
    let k = rng.gen_range(lo..=3);
    let kids = (0..k)
        .map(|_| random_tree(rng, vars, depth - 1, constants))
        .collect();
    if rng.gen_bool(0.5) {
        Tree::And(kids)
    } else {
        Tree::Or(kids)
    }
}

pub fn intern(s: &mut FormulaStore, t: &Tree) -> NodeId {
    s.parse(&t.text()).expect("tree text parses")
}

/// A formula with a unit literal conjoined somewhere inside, plus that unit
/// and the scope conjunction. The unit is the first child of the scope.
pub struct UnitSite {
    pub phi: NodeId,
    pub scope: NodeId,
    pub scope_path: Vec<usize>,
    pub unit: Literal,
}

pub fn random_unit_site(s: &mut FormulaStore, rng: &mut ChaCha8Rng) -> UnitSite {
    loop {
        let outer = random_tree(rng, 5, 3, false);
        let inner = random_tree(rng, 5, 3, false);
        let var = format!("v{}", rng.gen_range(0..5));
        let positive = rng.gen_bool(0.5);
        let scope_tree = Tree::And(vec![Tree::Lit(var.clone(), positive), inner]);
        // Graft the scope at a random position inside `outer`.
        let (tree, scope_path) = graft(rng, outer, scope_tree.clone(), Vec::new());
        let phi = intern(s, &tree);
        let scope = intern(s, &scope_tree);
        let v = s.lookup_var(&var).unwrap();
        let unit = Literal::new(v, positive);
        if !literal_paths(s, scope, unit.negate()).is_empty() {
            return UnitSite {
                phi,
                scope,
                scope_path,
                unit,
            };
        }
    }
}

fn graft(
    rng: &mut ChaCha8Rng,
    host: Tree,
    scope: Tree,
    mut path: Vec<usize>,
) -> (Tree, Vec<usize>) {
    let is_and = matches!(host, Tree::And(_));
    match host {
        Tree::And(mut cs) | Tree::Or(mut cs) if rng.gen_bool(0.6) => {
            let i = rng.gen_range(0..cs.len());
            path.push(i);
            let child = std::mem::replace(&mut cs[i], Tree::True);
            let (c, p) = graft(rng, child, scope, path);
            cs[i] = c;
            (if is_and { Tree::And(cs) } else { Tree::Or(cs) }, p)
        }
        _ => (scope, path),
    }
}

/// Up to three facts and four rules. Bodies are positive NNFs and heads are
/// Horn; rules whose combined formula is not Horn are dropped.
pub fn random_program(
    s: &mut FormulaStore,
    gen: &mut hornnc::oracle::Generator,
) -> hornnc::lp::HnfProgram {
    let mut p = hornnc::lp::HnfProgram::new();
    let facts = gen.rng().gen_range(0..=3);
    for _ in 0..facts {
        let f = gen.literal(s, Some(true));
        if let Node::Lit(l) = s.node(f) {
            p.add_fact(l.var());
        }
    }
    let rules = gen.rng().gen_range(1..=4);
    for _ in 0..rules {
        let body = gen.nnf(s, 2, Some(true));
        let head = gen.hnf(s, 2);
        let mut trial = p.clone();
        trial.add_rule(body, head);
        if trial.to_formula(s).is_ok() {
            p = trial;
        }
    }
    p
}
