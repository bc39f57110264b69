use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hornnc::bench;
use hornnc::calculus::{solve, CalculusError, SolveOptions, SolveOutcome};
use hornnc::clausal::{cl_capped, cl_star_capped, ClausalError, DEFAULT_CLAUSE_CAP};
use hornnc::lp::{HnfProgram, LpError};
use hornnc::oracle::{equivalent, generate, GenConfig, GenMode};
use hornnc::recognizer::{classify_nc, classify_nnf, classify_trace, HnfLabel};
use hornnc::{FormulaStore, NodeId, Style, Var};
use serde_json::{json, Value};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const INTERNAL: u8 = 3;

/// Horn non-clausal formulas: recognition, unit resolution, minimal models.
#[derive(Parser)]
#[command(name = "hornnc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse formulas and print them back in canonical form.
    Parse {
        /// File, `-` for stdin, or an inline formula.
        input: String,
        /// Typographic output (display only).
        #[arg(long)]
        unicode: bool,
        /// Print the negation normal form instead.
        #[arg(long)]
        nnf: bool,
    },
    /// Label each formula as negative-hnf, hnf or not-hnf.
    Recognize {
        input: String,
        /// Print the per-node recognition trace as JSON.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide satisfiability of Horn formulas and report the minimal model.
    Solve {
        input: String,
        /// Write the rule-application trace as JSON to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<String>,
        /// Also print the full assignment over the formula's variables.
        #[arg(long)]
        model: bool,
        /// Enable the optional true-propagation rule.
        #[arg(long)]
        true_prop: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print the clausal form obtained by distribution.
    Clausal {
        input: String,
        /// Accept non-NNF input by pushing negations down first.
        #[arg(long)]
        star: bool,
        /// Remove repeated literals, tautologies and repeated clauses.
        #[arg(long)]
        cleanup: bool,
        #[arg(long)]
        dimacs: bool,
        /// Abort when the clause count would exceed this.
        #[arg(long, default_value_t = DEFAULT_CLAUSE_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Exit 0 if the two formulas are equivalent, 1 otherwise.
    Eq { left: String, right: String },
    /// Exit 0 if the program entails the query, 1 otherwise.
    Entail {
        /// Program file with `fact X` and `rule BODY => HEAD` lines.
        program: String,
        /// Query file or inline formula.
        query: String,
    },
    /// Print random formulas, one per line.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "nnf")]
        mode: Mode,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
    },
    /// Run measurement suites and print a JSON report.
    Bench {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Instances for the random suites.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Nnf,
    Nc,
    Hnf,
    Hnc,
}

impl From<Mode> for GenMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Nnf => GenMode::AnyNnf,
            Mode::Nc => GenMode::AnyNc,
            Mode::Hnf => GenMode::HnfBiased,
            Mode::Hnc => GenMode::HncBiased,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Agreement,
    Solver,
    RecognitionScaling,
    SolverScaling,
    Succinctness,
    All,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("hornnc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Parse {
            input,
            unicode,
            nnf,
        } => cmd_parse(&input, unicode, nnf),
        Command::Recognize { input, trace, json } => cmd_recognize(&input, trace, json),
        Command::Solve {
            input,
            trace,
            model,
            true_prop,
            json,
        } => cmd_solve(&input, trace.as_deref(), model, true_prop, json),
        Command::Clausal {
            input,
            star,
            cleanup,
            dimacs,
            cap,
            json,
        } => cmd_clausal(&input, star, cleanup, dimacs, cap, json),
        Command::Eq { left, right } => cmd_eq(&left, &right),
        Command::Entail { program, query } => cmd_entail(&program, &query),
        Command::Gen {
            seed,
            mode,
            n,
            max_vars,
            max_depth,
            max_arity,
        } => cmd_gen(
            GenConfig {
                seed,
                max_vars,
                max_depth,
                max_arity,
                mode: mode.into(),
            },
            n,
        ),
        Command::Bench { suite, n, seed } => cmd_bench(suite, n, seed),
    }
}

/// Contents of a file, of stdin for `-`, or the argument itself.
fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut text = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut text)
            .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        return Ok(text);
    }
    if Path::new(arg).is_file() {
        return std::fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")));
    }
    Ok(arg.to_string())
}

fn load_all(store: &mut FormulaStore, arg: &str) -> Result<Vec<NodeId>, Failure> {
    let text = read_source(arg)?;
    let ids = store
        .parse_all(&text)
        .map_err(|e| Failure::usage(format!("{arg}: {e}")))?;
    if ids.is_empty() {
        return Err(Failure::usage(format!("{arg}: no formula found")));
    }
    Ok(ids)
}

fn load_one(store: &mut FormulaStore, arg: &str) -> Result<NodeId, Failure> {
    let text = read_source(arg)?;
    store
        .parse(&text)
        .map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn cmd_parse(input: &str, unicode: bool, nnf: bool) -> Outcome {
    let mut store = FormulaStore::new();
    let style = if unicode {
        Style::Unicode
    } else {
        Style::Ascii
    };
    for id in load_all(&mut store, input)? {
        let id = if nnf { store.to_nnf(id) } else { id };
        println!("{}", store.print_with(id, style));
    }
    Ok(OK)
}

fn cmd_recognize(input: &str, trace: bool, json: bool) -> Outcome {
    let mut store = FormulaStore::new();
    let mut code = OK;
    for id in load_all(&mut store, input)? {
        let (label, analysed) = if store.is_nnf(id) {
            (classify_nnf(&store, id).expect("checked NNF"), id)
        } else {
            let nnf = store.to_nnf(id);
            let folded = store.simplify_constants(nnf);
            (classify_nc(&mut store, id), folded)
        };
        if label == HnfLabel::NotHnf {
            code = code.max(NEGATIVE);
        }
        if trace {
            let entries = classify_trace(&store, analysed).expect("NNF input");
            let steps: Vec<Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "node": e.node,
                        "formula": store.print(e.node),
                        "label": e.label.as_str(),
                        "case": e.case,
                        "degenerate": e.degenerate,
                    })
                })
                .collect();
            let out = json!({
                "formula": store.print(id),
                "analysed": store.print(analysed),
                "label": label.as_str(),
                "trace": steps,
            });
            println!("{out}");
        } else if json {
            println!(
                "{}",
                json!({ "formula": store.print(id), "label": label.as_str(), "hnf": label.is_hnf() })
            );
        } else {
            println!("{label}");
        }
    }
    Ok(code)
}

fn model_text(store: &FormulaStore, model: &BTreeSet<Var>) -> Vec<String> {
    let mut names: Vec<String> = model
        .iter()
        .map(|v| store.var_name(*v).to_string())
        .collect();
    names.sort();
    names
}

fn cmd_solve(
    input: &str,
    trace_file: Option<&str>,
    full_model: bool,
    true_prop: bool,
    json: bool,
) -> Outcome {
    let mut store = FormulaStore::new();
    let ids = load_all(&mut store, input)?;
    let opts = SolveOptions {
        trace: trace_file.is_some(),
        true_prop,
    };
    let mut code = OK;
    let mut traces = Vec::new();
    for id in ids {
        let out = match solve(&mut store, id, opts) {
            Ok(o) => o,
            Err(CalculusError::NotHornNc) => {
                eprintln!("hornnc: {} is not Horn non-clausal", store.print(id));
                code = code.max(USAGE);
                continue;
            }
            Err(e) => {
                return Err(Failure {
                    code: INTERNAL,
                    message: e.to_string(),
                })
            }
        };
        if trace_file.is_some() {
            traces.push(out.trace().to_json(&store));
        }
        let applications = out.trace().applications;
        match &out {
            SolveOutcome::Unsat { .. } => {
                code = code.max(NEGATIVE);
                if json {
                    println!(
                        "{}",
                        json!({ "formula": store.print(id), "result": "unsat", "applications": applications })
                    );
                } else {
                    println!("UNSAT");
                }
            }
            SolveOutcome::Sat { model, .. } => {
                let names = model_text(&store, model);
                if json {
                    println!(
                        "{}",
                        json!({
                            "formula": store.print(id),
                            "result": "sat",
                            "model": names,
                            "applications": applications,
                        })
                    );
                } else {
                    println!("SAT model: {{{}}}", names.join(", "));
                    if full_model {
                        let assignment: Vec<String> = store
                            .variables(id)
                            .into_iter()
                            .map(|v| {
                                format!("{}={}", store.var_name(v), u8::from(model.contains(&v)))
                            })
                            .collect();
                        println!("{}", assignment.join(" "));
                    }
                }
            }
        }
    }
    if let Some(path) = trace_file {
        let doc = if traces.len() == 1 {
            traces.pop().expect("one trace")
        } else {
            Value::Array(traces)
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure {
            code: INTERNAL,
            message: e.to_string(),
        })?;
        std::fs::write(path, text + "\n").map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    }
    Ok(code)
}

fn cmd_clausal(
    input: &str,
    star: bool,
    cleanup: bool,
    dimacs: bool,
    cap: usize,
    json: bool,
) -> Outcome {
    let mut store = FormulaStore::new();
    for id in load_all(&mut store, input)? {
        let result = if star {
            cl_star_capped(&mut store, id, cap)
        } else {
            cl_capped(&store, id, cap)
        };
        let clausal = match result {
            Ok(c) => c,
            Err(ClausalError::NotNnf(_)) => {
                return Err(Failure::usage(
                    "input is not in negation normal form; use --star",
                ))
            }
            Err(e @ ClausalError::BlowupLimitExceeded { .. }) => {
                return Err(Failure::usage(e.to_string()))
            }
        };
        let clausal = if cleanup { clausal.cleaned() } else { clausal };
        let horn = clausal.is_horn();
        if json {
            let formula = clausal.to_formula(&mut store);
            println!(
                "{}",
                json!({ "formula": store.print(formula), "clauses": clausal.len(), "horn": horn })
            );
        } else if dimacs {
            print!("{}", clausal.to_dimacs(&store));
            println!("c clauses {}", clausal.len());
            println!("c horn {}", if horn { "yes" } else { "no" });
        } else {
            let formula = clausal.to_formula(&mut store);
            println!("{}", store.print(formula));
            println!("clauses: {}", clausal.len());
            println!("horn: {}", if horn { "yes" } else { "no" });
        }
    }
    Ok(OK)
}

fn cmd_eq(left: &str, right: &str) -> Outcome {
    let mut store = FormulaStore::new();
    let a = load_one(&mut store, left)?;
    let b = load_one(&mut store, right)?;
    let same = equivalent(&store, a, b).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{}", if same { "equivalent" } else { "not equivalent" });
    Ok(if same { OK } else { NEGATIVE })
}

fn cmd_entail(program: &str, query: &str) -> Outcome {
    if program != "-" && !Path::new(program).is_file() {
        return Err(Failure::usage(format!("{program}: no such file")));
    }
    let mut store = FormulaStore::new();
    let text = read_source(program)?;
    let p = HnfProgram::parse(&mut store, &text)
        .map_err(|e| Failure::usage(format!("{program}: {e}")))?;
    let q = load_one(&mut store, query)?;
    match p.entails(&mut store, q) {
        Ok(true) => {
            println!("entailed");
            Ok(OK)
        }
        Ok(false) => {
            println!("not entailed");
            Ok(NEGATIVE)
        }
        Err(e @ (LpError::InvalidRule { .. } | LpError::Syntax { .. })) => {
            Err(Failure::usage(format!("{program}: {e}")))
        }
        Err(e) => Err(Failure {
            code: INTERNAL,
            message: e.to_string(),
        }),
    }
}

fn cmd_gen(cfg: GenConfig, n: usize) -> Outcome {
    if cfg.max_vars == 0 || cfg.max_arity == 0 {
        return Err(Failure::usage(
            "--max-vars and --max-arity must be positive",
        ));
    }
    let mut store = FormulaStore::new();
    for id in generate(&mut store, cfg, n) {
        println!("{}", store.print(id));
    }
    Ok(OK)
}

fn cmd_bench(suite: Suite, n: usize, seed: u64) -> Outcome {
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut report = serde_json::Map::new();
    report.insert("schema_version".into(), json!(bench::SCHEMA_VERSION));
    report.insert("seed".into(), json!(seed));
    report.insert("n".into(), json!(n));
    let mut code = OK;
    let to_value = |v: Result<Value, serde_json::Error>| {
        v.map_err(|e| Failure {
            code: INTERNAL,
            message: e.to_string(),
        })
    };
    if wants(Suite::Agreement) {
        let r = bench::agreement_suite(seed, n);
        if r.agreement < 1.0 {
            code = NEGATIVE;
        }
        report.insert("agreement".into(), to_value(serde_json::to_value(&r))?);
    }
    if wants(Suite::Solver) {
        let r = bench::solver_suite(seed, n);
        if r.decision_agreement < 1.0 || r.models_least < 1.0 || r.work_bound_violations > 0 {
            code = NEGATIVE;
        }
        report.insert("solver".into(), to_value(serde_json::to_value(&r))?);
    }
    if wants(Suite::RecognitionScaling) {
        let r = bench::recognition_scaling(&[10_000, 100_000, 1_000_000], 3);
        report.insert(
            "recognition_scaling".into(),
            to_value(serde_json::to_value(&r))?,
        );
    }
    if wants(Suite::SolverScaling) {
        let r = bench::solver_scaling(&[1_000, 3_000, 10_000, 30_000, 100_000], 3);
        report.insert("solver_scaling".into(), to_value(serde_json::to_value(&r))?);
    }
    if wants(Suite::Succinctness) {
        let rows = bench::succinctness();
        report.insert(
            "succinctness".into(),
            to_value(serde_json::to_value(&rows))?,
        );
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(report)).expect("JSON values serialize")
    );
    Ok(code)
}
