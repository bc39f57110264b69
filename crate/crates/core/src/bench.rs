//! Formula families and measurement suites behind `hornnc bench`.

use std::time::Instant;

use serde::Serialize;

use crate::calculus::{solve, SolveOptions, SolveOutcome};
use crate::clausal::{cl, ClausalError};
use crate::formula::{FormulaStore, Literal, NodeId, Var};
use crate::oracle::{models_intersection, GenConfig, GenMode, Generator};
use crate::recognizer::{classify_nnf, HnfLabel};

pub const SCHEMA_VERSION: u32 = 1;

fn pool(store: &mut FormulaStore, prefix: &str, n: usize) -> Vec<Var> {
    (0..n).map(|i| store.var(&format!("{prefix}{i}"))).collect()
}

/// Nested Horn chain `(and a (or ~b ~c (and a' (or ~b' ~c' …))))` with tree
/// size close to `target_size`. Depth grows linearly with size.
pub fn chain_hnf(store: &mut FormulaStore, target_size: usize) -> NodeId {
    let vars = pool(store, "c", 64);
    let blocks = (target_size.saturating_sub(1) / 5).max(1);
    let lit = |store: &mut FormulaStore, i: usize, pos: bool| {
        store.lit(Literal::new(vars[i % vars.len()], pos))
    };
    let mut cur = lit(store, 0, true);
    for i in 0..blocks {
        let b = lit(store, 3 * i + 1, false);
        let c = lit(store, 3 * i + 2, false);
        let d = store.disj(vec![b, c, cur]);
        let a = lit(store, 3 * i, true);
        cur = store.conj(vec![a, d]);
    }
    cur
}

/// Satisfiable Horn NC family: the unit `x0` and, for every block `i`,
/// `(not (and x_i (or ~x_{i+1} (and y_i ~z_i))))`, i.e. `x_i → x_{i+1} ∧
/// (y_i → z_i)`. Every other `y_i` is also a unit, giving about nine
/// symbols per block.
pub fn solver_chain(store: &mut FormulaStore, target_size: usize) -> NodeId {
    let blocks = (target_size / 9).max(1);
    let x0 = store.pos("x0");
    let mut parts = vec![x0];
    for i in 0..blocks {
        let xi = store.pos(&format!("x{i}"));
        let nx = store.neg(&format!("x{}", i + 1));
        let yi = store.pos(&format!("y{i}"));
        let nz = store.neg(&format!("z{i}"));
        let inner = store.conj(vec![yi, nz]);
        let d = store.disj(vec![nx, inner]);
        let c = store.conj(vec![xi, d]);
        parts.push(store.not(c));
        if i % 2 == 0 {
            parts.push(yi);
        }
    }
    store.conj(parts)
}

/// Disjunction of `n` terms of `k` literals; the first term is positive and
/// the rest negative, so the formula is Horn. Its clausal form has `k^n`
/// clauses while its size is `k·n + n + 1`.
pub fn dnf_family(store: &mut FormulaStore, k: usize, n: usize) -> NodeId {
    let terms = (0..n)
        .map(|t| {
            let lits = (0..k)
                .map(|j| {
                    let v = store.var(&format!("d{t}_{j}"));
                    store.lit(Literal::new(v, t == 0))
                })
                .collect();
            store.conj(lits)
        })
        .collect();
    store.disj(terms)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LabelCounts {
    pub negative: usize,
    pub hnf: usize,
    pub not_hnf: usize,
}

impl LabelCounts {
    fn add(&mut self, l: HnfLabel) {
        match l {
            HnfLabel::Negative => self.negative += 1,
            HnfLabel::NonNegativeHnf => self.hnf += 1,
            HnfLabel::NotHnf => self.not_hnf += 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AgreementReport {
    pub n: usize,
    pub compared: usize,
    pub agreeing: usize,
    pub skipped_blowup: usize,
    pub agreement: f64,
    pub labels: LabelCounts,
    pub not_hnf_fraction: f64,
    pub seconds: f64,
}

/// Recognizer verdict against Horn-ness of the clausal form on random NNFs.
pub fn agreement_suite(seed: u64, n: usize) -> AgreementReport {
    let start = Instant::now();
    let mut store = FormulaStore::new();
    let cfg = GenConfig {
        seed,
        max_vars: 6,
        max_depth: 5,
        max_arity: 3,
        mode: GenMode::AnyNnf,
    };
    let mut gen = Generator::new(&mut store, cfg);
    let mut labels = LabelCounts::default();
    let (mut compared, mut agreeing, mut skipped) = (0, 0, 0);
    for _ in 0..n {
        let f = gen.next(&mut store);
        let label = classify_nnf(&store, f).expect("generator emits NNF");
        labels.add(label);
        match cl(&store, f) {
            Ok(c) => {
                compared += 1;
                if label.is_hnf() == c.is_horn() {
                    agreeing += 1;
                }
            }
            Err(ClausalError::BlowupLimitExceeded { .. }) => skipped += 1,
            Err(e) => panic!("{e}"),
        }
    }
    AgreementReport {
        n,
        compared,
        agreeing,
        skipped_blowup: skipped,
        agreement: ratio(agreeing, compared),
        not_hnf_fraction: ratio(labels.not_hnf, n),
        labels,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub n: usize,
    pub sat: usize,
    pub unsat: usize,
    pub decision_agreement: f64,
    pub models_least: f64,
    pub work_bound_violations: usize,
    pub total_applications: usize,
    pub max_applications_per_size: f64,
    pub errors: usize,
    pub seconds: f64,
}

/// Random Horn NC formula for solver testing: a generated HNC, conjoined
/// half of the time with a few random literals so both outcomes are common.
pub fn solver_instance(gen: &mut Generator, store: &mut FormulaStore) -> NodeId {
    let f = gen.next(store);
    use rand::Rng;
    if gen.rng().gen_bool(0.5) {
        let k = gen.rng().gen_range(1..=3);
        let mut parts: Vec<NodeId> = (0..k).map(|_| gen.literal(store, None)).collect();
        parts.push(f);
        store.conj(parts)
    } else {
        f
    }
}

/// Solver decisions and models against brute-force enumeration.
pub fn solver_suite(seed: u64, n: usize) -> SolverReport {
    let start = Instant::now();
    let mut store = FormulaStore::new();
    let cfg = GenConfig {
        seed,
        max_vars: 10,
        max_depth: 5,
        max_arity: 4,
        mode: GenMode::HncBiased,
    };
    let mut gen = Generator::new(&mut store, cfg);
    let (mut sat, mut unsat, mut agree, mut least, mut violations, mut errors) = (0, 0, 0, 0, 0, 0);
    let mut total = 0usize;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..n {
        let f = solver_instance(&mut gen, &mut store);
        let size = store.size(f);
        let truth = models_intersection(&store, f).expect("small formula");
        let out = match solve(&mut store, f, SolveOptions::default()) {
            Ok(o) => o,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        let apps = out.trace().applications;
        total += apps;
        max_ratio = max_ratio.max(apps as f64 / size as f64);
        if apps as u64 > size {
            violations += 1;
        }
        match (&out, &truth) {
            (SolveOutcome::Sat { model, .. }, Some(expected)) => {
                sat += 1;
                agree += 1;
                if model == expected {
                    least += 1;
                }
            }
            (SolveOutcome::Unsat { .. }, None) => {
                unsat += 1;
                agree += 1;
            }
            (SolveOutcome::Sat { .. }, None) => sat += 1,
            (SolveOutcome::Unsat { .. }, Some(_)) => unsat += 1,
        }
    }
    SolverReport {
        n,
        sat,
        unsat,
        decision_agreement: ratio(agree, n),
        models_least: ratio(least, sat),
        work_bound_violations: violations,
        total_applications: total,
        max_applications_per_size: max_ratio,
        errors,
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingPoint {
    pub size: u64,
    pub dag_size: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub points: Vec<TimingPoint>,
    /// `seconds[i+1] / seconds[i]`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of log(time) against log(size).
    pub exponent: f64,
}

fn best_of<F: FnMut()>(repeats: usize, mut f: F) -> f64 {
    (0..repeats.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Slope of the least-squares line through `(ln x, ln y)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|(x, y)| (x.ln(), y.max(1e-9).ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn scaling(points: Vec<TimingPoint>) -> ScalingReport {
    let ratios = points
        .windows(2)
        .map(|w| w[1].seconds / w[0].seconds)
        .collect();
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.size as f64, p.seconds)).collect();
    ScalingReport {
        exponent: fit_exponent(&xy),
        ratios,
        points,
    }
}

/// Recognition time on chain HNFs of the given sizes, best of `repeats`.
pub fn recognition_scaling(sizes: &[usize], repeats: usize) -> ScalingReport {
    let points = sizes
        .iter()
        .map(|&n| {
            let mut store = FormulaStore::new();
            let f = chain_hnf(&mut store, n);
            let m = store.size_metrics(f);
            let seconds = best_of(repeats, || {
                let l = classify_nnf(&store, f).expect("NNF");
                assert_eq!(l, HnfLabel::NonNegativeHnf);
            });
            TimingPoint {
                size: m.size,
                dag_size: m.dag_size,
                seconds,
            }
        })
        .collect();
    scaling(points)
}

/// Solve time on the solver chain family, best of `repeats`. Each run builds
/// the formula in a fresh store; construction is not timed.
pub fn solver_scaling(sizes: &[usize], repeats: usize) -> ScalingReport {
    let points = sizes
        .iter()
        .map(|&n| {
            let mut point = TimingPoint {
                size: 0,
                dag_size: 0,
                seconds: f64::INFINITY,
            };
            for _ in 0..repeats.max(1) {
                let mut store = FormulaStore::new();
                let f = solver_chain(&mut store, n);
                let m = store.size_metrics(f);
                let t = Instant::now();
                let out = solve(&mut store, f, SolveOptions::default()).expect("Horn family");
                let seconds = t.elapsed().as_secs_f64();
                assert!(out.is_sat());
                point = TimingPoint {
                    size: m.size,
                    dag_size: m.dag_size,
                    seconds: seconds.min(point.seconds),
                };
            }
            point
        })
        .collect();
    scaling(points)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuccinctnessRow {
    pub k: usize,
    pub n: usize,
    pub nc_size: u64,
    pub clauses: usize,
    pub expected: u64,
    pub exact: bool,
    pub blowup: f64,
}

/// Clause counts of the DNF family for `k` in 2..=3 and `n` in 2..=6.
pub fn succinctness() -> Vec<SuccinctnessRow> {
    let mut rows = Vec::new();
    for k in 2..=3 {
        for n in 2..=6 {
            let mut store = FormulaStore::new();
            let f = dnf_family(&mut store, k, n);
            let nc_size = store.size(f);
            let clauses = cl(&store, f).expect("under cap").len();
            let expected = (k as u64).pow(n as u32);
            rows.push(SuccinctnessRow {
                k,
                n,
                nc_size,
                clauses,
                expected,
                exact: clauses as u64 == expected,
                blowup: clauses as f64 / nc_size as f64,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognizer::is_hnc;

    #[test]
    fn chain_size_is_close_to_target() {
        let mut s = FormulaStore::new();
        let f = chain_hnf(&mut s, 10_000);
        let size = s.size(f);
        assert!((9_000..=10_000).contains(&size), "{size}");
        assert_eq!(classify_nnf(&s, f).unwrap(), HnfLabel::NonNegativeHnf);
    }

    #[test]
    fn solver_chain_is_horn_and_sat() {
        let mut s = FormulaStore::new();
        let f = solver_chain(&mut s, 1_000);
        assert!(is_hnc(&mut s, f));
        let out = solve(&mut s, f, SolveOptions::default()).unwrap();
        let model = out.model().unwrap();
        assert!(model.contains(&s.lookup_var("x100").unwrap()));
        assert!(model.contains(&s.lookup_var("z0").unwrap()));
        assert!(!model.contains(&s.lookup_var("z1").unwrap()));
    }

    #[test]
    fn dnf_shape() {
        let mut s = FormulaStore::new();
        let f = dnf_family(&mut s, 2, 3);
        assert_eq!(
            s.print(f),
            "(or (and d0_0 d0_1) (and ~d1_0 ~d1_1) (and ~d2_0 ~d2_1))"
        );
        assert_eq!(s.size(f), 2 * 3 + 3 + 1);
    }

    #[test]
    fn exponent_fit() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0]
            .iter()
            .map(|x| (*x, x * x * 3.0))
            .collect();
        assert!((fit_exponent(&pts) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn small_suites() {
        let a = agreement_suite(1, 200);
        assert_eq!(a.agreement, 1.0);
        let s = solver_suite(1, 200);
        assert_eq!(s.decision_agreement, 1.0);
        assert_eq!(s.models_least, 1.0);
        assert_eq!(s.work_bound_violations, 0);
    }
}
