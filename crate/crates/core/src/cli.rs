//! Command-line front end.
//!
//! Exit codes: 0 success, 1 violation or failed certificate, 2 usage or
//! input error, 3 inconclusive within the node budget.

use std::io::{BufRead, Write};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::constructions::extend_to_tournament;
use crate::decycling::{Certificate, CertificateJson, CertificateKind};
use crate::digraph::{OrientedGraph, Tournament, VertexFamily};
use crate::error::Error;
use crate::explorer::{self, Sampling, ScanReport, SCHEMA};
use crate::search::{solve_inv, solve_tmr, verify_certificate, SearchBudget, SearchError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tourninv", version, about = "Exact inversion numbers and tournament minimum rank")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled scans.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Give up on a single solver call after this many search nodes.
    #[arg(long, global = true)]
    node_limit: Option<u64>,
    /// Include wall time in reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inversion number with a minimum decycling family. `-` reads graphs
    /// from stdin, one per line.
    Inv {
        #[arg(required = true)]
        graphs: Vec<String>,
    },
    /// Tournament minimum rank with a minimum-rank decycling matrix.
    Tmr {
        #[arg(required = true)]
        tournaments: Vec<String>,
    },
    /// Replay a certificate (JSON file, `-` for stdin) against a graph.
    Check {
        graph: String,
        #[arg(long)]
        cert: String,
    },
    /// The dijoin `g1 -> g2`.
    Dijoin { g1: String, g2: String },
    /// The n-join `[g1, ..., gn]`.
    Njoin {
        #[arg(required = true)]
        graphs: Vec<String>,
    },
    /// Complete an oriented graph to a tournament that a decycling family
    /// of the graph still decycles.
    Extend {
        graph: String,
        /// Sets as JSON, e.g. `[[0,1],[2]]`.
        #[arg(long)]
        family: String,
    },
    /// List tournaments on `n` vertices.
    Enumerate {
        n: usize,
        /// One per isomorphism class.
        #[arg(long)]
        iso: bool,
    },
    /// Check the dijoin and n-join theorems on all small operands.
    VerifyTheorems {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Run a conjecture scan.
    Scan {
        id: ScanId,
        /// Largest first operand.
        #[arg(long, default_value_t = 4)]
        n1: usize,
        /// Largest second operand.
        #[arg(long, default_value_t = 4)]
        n2: usize,
        /// Largest dijoin order.
        #[arg(long)]
        max_n: Option<usize>,
        /// Node limit per solver call (overrides --node-limit).
        #[arg(long)]
        budget: Option<u64>,
        /// Sample this many matrices per pair instead of enumerating
        /// (schur only).
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanId {
    TmrAdditivity,
    InvLowerBound,
    Schur,
}

/// Everything a command wrote and its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `argv` (program name first) with empty stdin and captures output.
pub fn dispatch<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    dispatch_with_input(argv, "")
}

pub fn dispatch_with_input<I, S>(argv: I, input: &str) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut input.as_bytes(), &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).expect("utf-8 output"),
        stderr: String::from_utf8(err).expect("utf-8 output"),
    }
}

enum Failure {
    Usage(String),
    Violation(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn search_failure(input: &str, e: SearchError) -> Failure {
    match e {
        SearchError::Inconclusive { .. } => Failure::Inconclusive(format!("{input}: {e}")),
        SearchError::Invalid(e) => Failure::Usage(format!("{input}: {e}")),
    }
}

/// Runs the command line `argv` against the given streams and returns the
/// exit code.
pub fn run(argv: &[String], stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdin, out) {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Violation(m) => (EXIT_VIOLATION, m),
                Failure::Inconclusive(m) => (EXIT_INCONCLUSIVE, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn budget(cli: &Cli, workers: usize) -> SearchBudget {
    let mut b = SearchBudget::default().with_workers(workers);
    b.node_limit = cli.node_limit;
    b
}

fn parse_graph(s: &str) -> Result<OrientedGraph, Failure> {
    s.parse::<OrientedGraph>()
        .map_err(|e| Failure::Usage(format!("graph `{s}`: {e}")))
}

fn parse_tournament(s: &str) -> Result<Tournament, Failure> {
    Tournament::try_from(parse_graph(s)?).map_err(|e| Failure::Usage(format!("graph `{s}`: {e}")))
}

/// Expands `-` into the non-empty lines of stdin.
fn expand_inputs(args: &[String], stdin: &mut dyn BufRead) -> Result<Vec<String>, Failure> {
    let mut all = Vec::new();
    for a in args {
        if a == "-" {
            for line in stdin.lines() {
                let line = line?;
                let line = line.trim();
                if !line.is_empty() && !line.starts_with('#') {
                    all.push(line.to_string());
                }
            }
        } else {
            all.push(a.clone());
        }
    }
    Ok(all)
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"))?;
    Ok(())
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        let mut tagged = serde_json::Map::new();
        tagged.insert("schema".into(), Value::String(SCHEMA.into()));
        tagged.append(map);
        return Value::Object(tagged);
    }
    v
}

fn order_text(order: &[usize]) -> String {
    order.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" < ")
}

fn execute(cli: &Cli, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Inv { graphs } => {
            let inputs = expand_inputs(graphs, stdin)?;
            let b = budget(cli, cli.workers);
            let mut results = Vec::new();
            for s in &inputs {
                let g = parse_graph(s)?;
                let sol = solve_inv(&g, &b).map_err(|e| search_failure(s, e))?;
                results.push((g, sol.value, sol.certificate, sol.nodes, None));
            }
            report_values(cli, out, "inv", results)
        }
        Command::Tmr { tournaments } => {
            let inputs = expand_inputs(tournaments, stdin)?;
            let b = budget(cli, cli.workers);
            let mut results = Vec::new();
            for s in &inputs {
                let t = parse_tournament(s)?;
                let sol = solve_tmr(&t, &b).map_err(|e| search_failure(s, e))?;
                results.push((t.into_graph(), sol.value, sol.certificate, sol.nodes, Some(sol.nonzero_diagonal)));
            }
            report_values(cli, out, "tmr", results)
        }
        Command::Check { graph, cert } => {
            let g = parse_graph(graph)?;
            let text = if cert == "-" {
                let mut s = String::new();
                stdin.read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(cert).map_err(|e| Failure::Usage(format!("certificate `{cert}`: {e}")))?
            };
            let c = parse_certificate(&text).map_err(|e| Failure::Usage(format!("certificate `{cert}`: {e}")))?;
            let verdict = verify_certificate(&g, &c);
            if cli.json {
                write_json(
                    out,
                    &json!({
                        "schema": SCHEMA,
                        "graph": g.to_string(),
                        "valid": verdict.is_ok(),
                        "reason": verdict.as_ref().err(),
                        "certificate": c,
                    }),
                )?;
            } else {
                match &verdict {
                    Ok(()) => {
                        let what = match c.kind {
                            CertificateKind::Family(_) => "inv",
                            CertificateKind::Matrix(_) => "tmr",
                        };
                        writeln!(out, "valid: {what}({g}) <= {}, order {}", c.value, order_text(&c.order))?;
                    }
                    Err(reason) => writeln!(out, "invalid: {reason}")?,
                }
            }
            Ok(if verdict.is_ok() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Dijoin { g1, g2 } => {
            let g = parse_graph(g1)?.dijoin(&parse_graph(g2)?)?;
            print_graph(cli, out, &g)
        }
        Command::Njoin { graphs } => {
            let inputs = expand_inputs(graphs, stdin)?;
            let parts = inputs.iter().map(|s| parse_graph(s)).collect::<Result<Vec<_>, _>>()?;
            print_graph(cli, out, &OrientedGraph::njoin(&parts)?)
        }
        Command::Extend { graph, family } => {
            let g = parse_graph(graph)?;
            let lists: Vec<Vec<usize>> =
                serde_json::from_str(family).map_err(|e| Failure::Usage(format!("family `{family}`: {e}")))?;
            let f = VertexFamily::from_lists(g.n(), &lists).map_err(|e| Failure::Usage(format!("family `{family}`: {e}")))?;
            let t = extend_to_tournament(&g, &f).map_err(|e| Failure::Violation(format!("family `{family}`: {e}")))?;
            print_graph(cli, out, t.as_graph())
        }
        Command::Enumerate { n, iso } => {
            let list = explorer::enumerate_tournaments(*n, *iso)?;
            if cli.json {
                let all: Vec<String> = list.map(|t| t.to_string()).collect();
                write_json(
                    out,
                    &json!({"schema": SCHEMA, "n": n, "iso": iso, "count": all.len(), "tournaments": all}),
                )?;
            } else {
                for t in list {
                    writeln!(out, "{t}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::VerifyTheorems { max_n } => {
            let start = Instant::now();
            let report = explorer::verify_dijoin_theorems(*max_n, &budget(cli, 1), cli.workers)?;
            finish_report(cli, out, report, start)
        }
        Command::Scan {
            id,
            n1,
            n2,
            max_n,
            budget: nodes,
            samples,
        } => {
            let start = Instant::now();
            let mut b = budget(cli, 1);
            if nodes.is_some() {
                b.node_limit = *nodes;
            }
            let report = match id {
                ScanId::TmrAdditivity => explorer::scan_tmr_additivity(*n1, *n2, *max_n, &b, cli.workers)?,
                ScanId::InvLowerBound => explorer::scan_inv_lower_bound(*n1, *n2, *max_n, &b, cli.workers)?,
                ScanId::Schur => {
                    let sampling = samples.map(|samples| Sampling {
                        seed: cli.seed,
                        samples,
                    });
                    explorer::scan_schur(*n1, *n2, sampling)?
                }
            };
            finish_report(cli, out, report, start)
        }
    }
}

type Solved = (OrientedGraph, usize, Certificate, u64, Option<bool>);

fn report_values(cli: &Cli, out: &mut dyn Write, quantity: &str, results: Vec<Solved>) -> Result<i32, Failure> {
    if cli.json {
        let docs: Vec<Value> = results
            .iter()
            .map(|(g, value, cert, nodes, nonzero)| {
                let mut v = json!({
                    "schema": SCHEMA,
                    "graph": g.to_string(),
                    "quantity": quantity,
                    "value": value,
                    "nodes": nodes,
                    "certificate": cert,
                });
                if let Some(z) = nonzero {
                    v["nonzero_diagonal"] = json!(z);
                }
                v
            })
            .collect();
        let doc = if docs.len() == 1 {
            docs.into_iter().next().expect("one")
        } else {
            Value::Array(docs)
        };
        write_json(out, &doc)?;
        return Ok(EXIT_OK);
    }
    let many = results.len() > 1;
    for (g, value, cert, _, nonzero) in &results {
        if many {
            writeln!(out, "{g}")?;
        }
        writeln!(out, "{quantity} = {value}")?;
        match &cert.kind {
            CertificateKind::Family(f) => {
                writeln!(out, "family: {}", serde_json::to_string(&f.to_lists()).expect("json"))?
            }
            CertificateKind::Matrix(m) => {
                writeln!(out, "matrix:")?;
                for row in m.to_rows() {
                    let line: String = row.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
                    writeln!(out, "  {line}")?;
                }
            }
        }
        writeln!(out, "order: {}", order_text(&cert.order))?;
        if let Some(z) = nonzero {
            writeln!(out, "minimum-rank matrix with nonzero diagonal: {}", if *z { "yes" } else { "no" })?;
        }
    }
    Ok(EXIT_OK)
}

/// Accepts a bare certificate or any object with a `certificate` field
/// (such as the JSON output of `inv` and `tmr`).
fn parse_certificate(text: &str) -> Result<Certificate, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let inner = v.get("certificate").cloned().unwrap_or(v);
    let j: CertificateJson = serde_json::from_value(inner).map_err(|e| e.to_string())?;
    Certificate::from_json(&j).map_err(|e| e.to_string())
}

fn print_graph(cli: &Cli, out: &mut dyn Write, g: &OrientedGraph) -> Result<i32, Failure> {
    if cli.json {
        let v = serde_json::to_value(g.to_json()).expect("json");
        let mut v = with_schema(v);
        v["graph"] = json!(g.to_string());
        write_json(out, &v)?;
    } else {
        writeln!(out, "{g}")?;
    }
    Ok(EXIT_OK)
}

fn finish_report(cli: &Cli, out: &mut dyn Write, mut report: ScanReport, start: Instant) -> Result<i32, Failure> {
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    if cli.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        write!(out, "{}", report.render_table())?;
    }
    Ok(if !report.holds() {
        EXIT_VIOLATION
    } else if !report.is_conclusive() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}
