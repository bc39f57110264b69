mod common;

use std::time::Instant;

use common::{random_program, random_tree, random_unit_site};
use hornnc::bench::{recognition_scaling, solver_instance, solver_scaling, succinctness};
use hornnc::calculus::{
    apply_hur, apply_lur, apply_ur, find_unit, literal_paths, simplify_step, simplify_step_traced,
    solve, Occurrence, Rule, SolveOptions, SolveOutcome,
};
use hornnc::clausal::cl;
use hornnc::lp::HnfProgram;
use hornnc::oracle::{enumerate_models, equivalent, truth_table, GenConfig, GenMode, Generator};
use hornnc::recognizer::{classify_nnf, classify_trace, CaseTag, HnfLabel};
use hornnc::{FormulaStore, Literal, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    failures: Vec<usize>,
}

impl Report {
    fn record(&mut self, n: usize, ok: bool, detail: String) {
        println!(
            "{} criterion {n}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(n);
        }
    }
}

fn recognition_agreement(r: &mut Report) {
    let start = Instant::now();
    let mut s = FormulaStore::new();
    let mut gen = Generator::new(
        &mut s,
        GenConfig {
            seed: 1,
            max_vars: 6,
            max_depth: 5,
            max_arity: 3,
            mode: GenMode::AnyNnf,
        },
    );
    let (mut agree, mut not_hnf) = (0, 0);
    let n = 10_000;
    for _ in 0..n {
        let f = gen.next(&mut s);
        let label = classify_nnf(&s, f).unwrap();
        let horn = cl(&s, f).unwrap().is_horn();
        not_hnf += (label == HnfLabel::NotHnf) as usize;
        agree += (label.is_hnf() == horn) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    r.record(
        1,
        agree == n && secs < 60.0,
        format!("{agree}/{n} agree ({not_hnf} not-hnf) in {secs:.2}s"),
    );
}

fn worked_examples(r: &mut Report) {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let mut s = FormulaStore::new();
    let label = |s: &mut FormulaStore, t: &str| {
        let id = s.parse(t).unwrap();
        classify_nnf(s, id).unwrap()
    };
    checks.push((
        "simple phi1 hnf",
        label(&mut s, "(or (and ~B ~D) (and C A))") == HnfLabel::NonNegativeHnf,
    ));
    checks.push((
        "simple phi2 not-hnf",
        label(&mut s, "(or (and ~B D) (and C ~A))") == HnfLabel::NotHnf,
    ));
    checks.push((
        "morecomplex phi hnf",
        label(&mut s, "(or ~A (and (or ~A C) (and D (or A ~B))))") == HnfLabel::NonNegativeHnf,
    ));
    checks.push((
        "morecomplex phi' not-hnf",
        label(&mut s, "(or A (and (or ~A C) (and D (or A ~B))))") == HnfLabel::NotHnf,
    ));

    let phi1 = s.parse("(or (and ~B ~D) (and C A))").unwrap();
    let c = cl(&s, phi1).unwrap();
    let c_node = c.to_formula(&mut s);
    checks.push((
        "cl(phi1) order",
        s.print(c_node) == "(and (or ~B C) (or ~B A) (or ~D C) (or ~D A))" && c.is_horn(),
    ));

    let accepting = s
        .parse("(and ~C (or ~A E) (or (or (and ~G ~C) ~E) (and A B)))")
        .unwrap();
    let trace = classify_trace(&s, accepting).unwrap();
    let last = trace.last().unwrap();
    checks.push((
        "accepting run ends non-negative",
        last.node == accepting && last.label == HnfLabel::NonNegativeHnf,
    ));
    let rejecting = s.parse("(and ~C (or (and A ~C) E))").unwrap();
    let trace = classify_trace(&s, rejecting).unwrap();
    let first_bad = trace.iter().find(|e| e.label == HnfLabel::NotHnf).unwrap();
    let disj = s.parse("(or (and A ~C) E)").unwrap();
    checks.push((
        "rejecting run halts at case a",
        first_bad.node == disj && first_bad.case == CaseTag::A,
    ));

    let phi = s
        .parse("(and A (or ~C (and ~A (or E ~D)) p1) (or D (and p2 ~A)) p3)")
        .unwrap();
    let out = apply_ur(
        &mut s,
        phi,
        &Occurrence::new(phi, vec![0]),
        &Occurrence::new(phi, vec![1, 1, 0]),
    )
    .unwrap();
    checks.push((
        "UR example",
        s.print(out) == "(and A (or ~C p1) (or D (and p2 ~A)) p3)",
    ));

    let phi = s
        .parse("(and (or C p1) (or ~A (and (or ~A ~C) (or p2 (and ~B ~A)) C)) A)")
        .unwrap();
    let a = Literal::pos(s.lookup_var("A").unwrap());
    let targets: Vec<Occurrence> = literal_paths(&s, phi, a.negate())
        .into_iter()
        .map(|p| Occurrence::new(phi, p))
        .collect();
    let out = apply_hur(&mut s, phi, a, &targets).unwrap();
    let out = simplify_step(&mut s, out);
    checks.push(("HUR example", s.print(out) == "(and (or C p1) ~C p2 C A)"));

    let scope = s.resolve(phi, &[1, 1]).unwrap();
    let out = apply_lur(
        &mut s,
        phi,
        scope,
        &Occurrence::new(scope, vec![2]),
        &Occurrence::new(scope, vec![0, 1]),
    )
    .unwrap();
    let new_scope = s.resolve(out, &[1, 1]).unwrap();
    checks.push((
        "LUR example",
        s.print(new_scope) == "(and (or ~A) (or p2 (and ~B ~A)) C)",
    ));

    let cont = s
        .parse("(and (or C ~D) (or ~A (and (or ~A ~C) (or ~E (and ~B ~A)) C)) A)")
        .unwrap();
    let out = solve(
        &mut s,
        cont,
        SolveOptions {
            trace: true,
            true_prop: false,
        },
    )
    .unwrap();
    let derived_empty = out
        .trace()
        .steps
        .last()
        .map(|st| s.print(st.after) == "(or)")
        .unwrap_or(false);
    checks.push(("contradiction derives (or)", !out.is_sat() && derived_empty));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    r.record(
        2,
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} worked examples reproduced", checks.len())
        } else {
            format!("mismatched: {}", failed.join(", "))
        },
    );
}

/// Returns the largest applications/size ratio seen, for the work bound.
fn solver_correctness(r: &mut Report) -> (usize, usize, f64) {
    let start = Instant::now();
    let mut s = FormulaStore::new();
    let mut gen = Generator::new(
        &mut s,
        GenConfig {
            seed: 3,
            max_vars: 10,
            max_depth: 5,
            max_arity: 4,
            mode: GenMode::HncBiased,
        },
    );
    let n = 10_000;
    let (mut ok, mut sat, mut violations) = (0, 0, 0);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..n {
        let f = solver_instance(&mut gen, &mut s);
        let models = enumerate_models(&s, f).unwrap();
        let out = solve(&mut s, f, SolveOptions::default()).unwrap();
        let size = s.size(f);
        let apps = out.trace().applications;
        max_ratio = max_ratio.max(apps as f64 / size as f64);
        violations += (apps as u64 > size) as usize;
        let correct = match &out {
            SolveOutcome::Unsat { .. } => models.is_empty(),
            SolveOutcome::Sat { model, .. } => {
                sat += 1;
                let least = models
                    .iter()
                    .map(|m| m.true_vars())
                    .reduce(|a, b| a.intersection(&b).copied().collect());
                least.as_ref() == Some(model) && hornnc::oracle::evaluate_true_set(&s, f, model)
            }
        };
        ok += correct as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    r.record(
        3,
        ok == n && secs < 120.0,
        format!("{ok}/{n} correct ({sat} sat) in {secs:.2}s"),
    );
    (n, violations, max_ratio)
}

fn unit_and(s: &mut FormulaStore, unit: Literal, f: NodeId) -> NodeId {
    let u = s.lit(unit);
    s.conj(vec![u, f])
}

fn rule_soundness(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut s = FormulaStore::new();
    let kinds = [
        Rule::Ur,
        Rule::Hur,
        Rule::Lur,
        Rule::FDisj,
        Rule::FConj,
        Rule::SingleChild,
        Rule::Flatten,
    ];
    let mut counts = [0usize; 7];
    let (mut done, mut sound) = (0, 0);
    while done < 2000 {
        let k = rng.gen_range(0..kinds.len());
        let pair = match kinds[k] {
            Rule::Ur | Rule::Hur | Rule::Lur => {
                let site = random_unit_site(&mut s, &mut rng);
                let after = match kinds[k] {
                    Rule::Ur => {
                        let ts = literal_paths(&s, site.phi, site.unit.negate());
                        let t = ts[rng.gen_range(0..ts.len())].clone();
                        find_unit(&s, site.phi, site.unit, &t).map(|u| {
                            apply_ur(&mut s, site.phi, &u, &Occurrence::new(site.phi, t)).unwrap()
                        })
                    }
                    Rule::Hur => {
                        let ts: Vec<Occurrence> = literal_paths(&s, site.phi, site.unit.negate())
                            .into_iter()
                            .filter(|p| find_unit(&s, site.phi, site.unit, p).is_some())
                            .map(|p| Occurrence::new(site.phi, p))
                            .collect();
                        (!ts.is_empty())
                            .then(|| apply_hur(&mut s, site.phi, site.unit, &ts).unwrap())
                    }
                    _ => {
                        let ts: Vec<Vec<usize>> = literal_paths(&s, site.scope, site.unit.negate())
                            .into_iter()
                            .filter(|p| p[0] != 0)
                            .collect();
                        (!ts.is_empty()).then(|| {
                            let t = ts[rng.gen_range(0..ts.len())].clone();
                            let unit = Occurrence::new(site.scope, vec![0]);
                            apply_lur(
                                &mut s,
                                site.phi,
                                site.scope,
                                &unit,
                                &Occurrence::new(site.scope, t),
                            )
                            .unwrap()
                        })
                    }
                };
                after.map(|a| {
                    let b = unit_and(&mut s, site.unit, site.phi);
                    let a = unit_and(&mut s, site.unit, a);
                    (b, a)
                })
            }
            rule => {
                let t = random_tree(&mut rng, 5, 4, true);
                let f = common::intern(&mut s, &t);
                let f = s.to_nnf(f);
                let (_, steps) = simplify_step_traced(&mut s, f);
                let matching: Vec<_> = steps.iter().filter(|st| st.rule == rule).collect();
                (!matching.is_empty()).then(|| {
                    let st = matching[rng.gen_range(0..matching.len())];
                    (st.before, st.after)
                })
            }
        };
        if let Some((b, a)) = pair {
            done += 1;
            counts[k] += 1;
            sound += equivalent(&s, b, a).unwrap() as usize;
        }
    }
    let breakdown: Vec<String> = kinds
        .iter()
        .zip(counts)
        .map(|(k, c)| format!("{}={c}", k.name()))
        .collect();
    r.record(
        4,
        sound == done,
        format!(
            "{sound}/{done} applications sound ({})",
            breakdown.join(" ")
        ),
    );
}

fn work_bound(r: &mut Report, random: (usize, usize, f64)) {
    let (n, mut violations, max_ratio) = random;
    let mut runs = n;
    for size in [1_000, 10_000, 100_000] {
        let mut s = FormulaStore::new();
        let f = hornnc::bench::solver_chain(&mut s, size);
        let out = solve(&mut s, f, SolveOptions::default()).unwrap();
        runs += 1;
        violations += (out.trace().applications as u64 > s.size(f)) as usize;
    }
    r.record(
        5,
        violations == 0,
        format!("{violations} of {runs} runs exceed size; max applications/size {max_ratio:.3}"),
    );
}

fn recognition_linear(r: &mut Report) {
    let rep = recognition_scaling(&[10_000, 100_000, 1_000_000], 5);
    let ok = rep.ratios.iter().all(|x| *x <= 13.0);
    let times: Vec<String> = rep
        .points
        .iter()
        .map(|p| format!("{}:{:.2}ms", p.size, p.seconds * 1e3))
        .collect();
    r.record(
        6,
        ok,
        format!(
            "times {} ratios {:?} (limit 13)",
            times.join(" "),
            rep.ratios
                .iter()
                .map(|x| (x * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        ),
    );
}

fn solver_polynomial(r: &mut Report) {
    let rep = solver_scaling(&[1_000, 3_000, 10_000, 30_000, 100_000], 3);
    r.record(
        7,
        rep.exponent <= 3.0,
        format!("fitted exponent {:.2} (limit 3)", rep.exponent),
    );
}

fn succinct(r: &mut Report) {
    let rows = succinctness();
    let ok = rows.len() == 10
        && rows.iter().all(|row| {
            row.clauses as u64 == (row.k as u64).pow(row.n as u32)
                && row.nc_size == (row.k * row.n + row.n + 1) as u64
        });
    let last = rows.last().unwrap();
    r.record(
        8,
        ok,
        format!(
            "{} families exact; largest k={} n={}: {} clauses from size {}",
            rows.len(),
            last.k,
            last.n,
            last.clauses,
            last.nc_size
        ),
    );
}

fn lp_entailment(r: &mut Report) {
    let mut s = FormulaStore::new();
    let mut gen = Generator::new(
        &mut s,
        GenConfig {
            seed: 9,
            max_vars: 6,
            max_depth: 3,
            max_arity: 3,
            mode: GenMode::AnyNnf,
        },
    );
    let n = 500;
    let (mut agree, mut entailed) = (0, 0);
    for _ in 0..n {
        let p = random_program(&mut s, &mut gen);
        let query = gen.nnf(&mut s, 1, Some(true));
        let f = p.to_formula(&mut s).unwrap();
        let models = enumerate_models(&s, f).unwrap();
        let vars = hornnc::oracle::joint_variables(&s, &[f, query]);
        let expected = models.iter().all(|m| {
            let mut a = m.clone();
            for v in &vars {
                if a.get(*v).is_none() {
                    a.set(*v, false);
                }
            }
            // A query variable missing from the program is free, so check both values.
            let free: Vec<_> = vars
                .iter()
                .filter(|v| m.get(**v).is_none())
                .copied()
                .collect();
            (0u32..1 << free.len()).all(|mask| {
                for (i, v) in free.iter().enumerate() {
                    a.set(*v, mask >> i & 1 == 1);
                }
                hornnc::oracle::evaluate(&s, query, &a).unwrap()
            })
        });
        let got = p.entails(&mut s, query).unwrap();
        entailed += got as usize;
        agree += (got == expected) as usize;
    }
    let mut t = FormulaStore::new();
    let p = HnfProgram::parse(&mut t, "fact A\nrule A => B\n").unwrap();
    let f = p.to_formula(&mut t).unwrap();
    let b = t.parse("B").unwrap();
    let c = t.parse("C").unwrap();
    let trivial = t.print(f) == "(and A (or ~A B))"
        && p.entails(&mut t, b).unwrap()
        && !p.entails(&mut t, c).unwrap()
        && truth_table(&t, f).unwrap().is_satisfiable();
    r.record(
        9,
        agree == n && trivial,
        format!(
            "{agree}/{n} programs agree ({entailed} entailed); A->B examples {}",
            if trivial { "ok" } else { "wrong" }
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut r = Report {
        failures: Vec::new(),
    };
    recognition_agreement(&mut r);
    worked_examples(&mut r);
    let solved = solver_correctness(&mut r);
    rule_soundness(&mut r);
    work_bound(&mut r, solved);
    recognition_linear(&mut r);
    solver_polynomial(&mut r);
    succinct(&mut r);
    lp_entailment(&mut r);
    assert!(r.failures.is_empty(), "failed criteria: {:?}", r.failures);
}
