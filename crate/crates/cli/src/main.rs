use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use gencover::bounds::{
    check_ball_entropy, check_entropy_identity, check_phi, curves_to_csv, emit_rate_curves,
    SuiteReport,
};
use gencover::pool::{pool_solve_with, pool_verify, PoolInstance, PoolSolution};
use gencover::probmodel::{estimate_uncovered_with, janson_certificate};
use gencover::radius::{deep_holes_with, t_covering_radius_with, ScanOptions};
use gencover::search::{
    alpha_exact_with, min_code_size_with, sample_alpha_with, SearchOptions, DEFAULT_BUDGET,
};
use gencover::{parse_word, Code, Error, MatrixWord};

const SCHEMA: u64 = 1;

/// Second-order covering codes: radii, exact search, rate bounds and the
/// random-code covering model.
#[derive(Debug, Parser)]
#[command(name = "gencover", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for scans and Monte Carlo trials. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (rate curves only).
    #[arg(long, global = true)]
    csv: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// t-th covering radius of a code file.
    Radius {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Also list every target at maximal distance.
        #[arg(long)]
        deep_holes: bool,
    },
    /// Exact minimum code size with R_t <= r (small lengths only).
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Maximum number of candidate codes to examine.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
        /// Word forced into every candidate (default: all zeros).
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Rate bounds.
    Bounds {
        #[command(subcommand)]
        action: BoundsAction,
    },
    /// Fraction of M-word codes with second covering radius at most floor(rho n).
    Alpha {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Enumerate every M-subset.
        #[arg(long, conflicts_with = "sample")]
        exact: bool,
        /// Sample M-subsets uniformly.
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
    },
    /// Janson-type bound on the probability that a Bernoulli(p) code leaves a
    /// 2-row target uncovered by pairs of distinct codewords.
    Janson {
        /// Target rows, comma separated, e.g. 0011,0101.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: f64,
        /// Include one record per covering pair.
        #[arg(long)]
        records: bool,
        /// Also estimate the probability by simulation with this many trials.
        #[arg(long)]
        simulate: Option<u64>,
    },
    /// Football pool with a rematch.
    Pool {
        #[command(subcommand)]
        action: PoolAction,
    },
}

#[derive(Debug, Subcommand)]
enum BoundsAction {
    /// Rate curves on a uniform grid of rho in [0, 1].
    Curve {
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Grid checks of the entropy identity, positivity of the epsilon
    /// interval and the exact ball-size entropy bound. Exits 1 on failure.
    Check {
        /// Restrict to one alphabet size.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
enum PoolAction {
    /// Minimal ticket set that wins against every outcome pair.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
    },
    /// Check a ticket file against one outcome pair. The bettor may play any
    /// ordered pair of tickets, including one ticket twice. Exits 1 on a loss.
    Verify {
        #[arg(long)]
        tickets: PathBuf,
        #[arg(long = "match")]
        outcome_match: String,
        #[arg(long = "rematch")]
        outcome_rematch: String,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

struct Output {
    body: String,
    /// 0 success, 1 verification failure, 3 budget exceeded with a partial answer.
    status: u8,
}

fn document<T: Serialize>(kind: &str, value: &T) -> Result<Value, Failure> {
    let inner = serde_json::to_value(value).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("kind".into(), json!(kind));
    match inner {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    Ok(Value::Object(map))
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn json_only(global: &Global, what: &str) -> Result<(), Failure> {
    if global.csv {
        return Err(Failure::Usage(format!("{what} has no CSV output")));
    }
    Ok(())
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    let scan = ScanOptions::with_threads(g.threads);
    let ok = |value: Value| Output {
        body: render(&value),
        status: 0,
    };
    match cli.command {
        Command::Radius {
            code,
            t,
            deep_holes,
        } => {
            json_only(g, "radius")?;
            let code: Code = read(&code)?.parse()?;
            let report = t_covering_radius_with(&code, t, scan)?;
            let mut value = document(
                "radius",
                &json!({
                    "n": code.n(),
                    "q": code.q(),
                    "t": t,
                    "size": code.len(),
                    "radius": report.radius,
                    "deep_hole": report.deep_hole,
                    "scanned": report.scanned,
                }),
            )?;
            if deep_holes {
                value["deep_holes"] =
                    serde_json::to_value(deep_holes_with(&code, t, scan)?).expect("serializable");
            }
            Ok(ok(value))
        }
        Command::Search {
            n,
            t,
            r,
            q,
            budget,
            anchor,
        } => {
            json_only(g, "search")?;
            let anchor = anchor.map(|a| parse_word(&a, q)).transpose()?;
            let opts = SearchOptions {
                budget,
                anchor,
                seed: g.seed,
            };
            let result = min_code_size_with(n, t, r, q, &opts)?;
            Ok(ok(document("search", &result)?))
        }
        Command::Bounds {
            action: BoundsAction::Curve { q, points },
        } => {
            let curve = emit_rate_curves(q, points)?;
            if g.json {
                Ok(ok(document(
                    "rate_curves",
                    &json!({ "q": q, "points": curve }),
                )?))
            } else {
                Ok(Output {
                    body: curves_to_csv(&curve),
                    status: 0,
                })
            }
        }
        Command::Bounds {
            action: BoundsAction::Check { q, points },
        } => {
            json_only(g, "bounds check")?;
            let alphabets: Vec<u64> = match q {
                Some(q) => vec![u64::from(q)],
                None => vec![2, 3, 4, 5],
            };
            let ball_alphabets: Vec<u32> = match q {
                Some(q) => vec![q],
                None => vec![2, 3],
            };
            let suites: Vec<SuiteReport> = vec![
                check_entropy_identity(&alphabets, points, 1e-10),
                check_phi(&alphabets, points, 1e-12),
                check_ball_entropy(&[1, 2], &ball_alphabets, 5..=30, 20)?,
            ];
            let passed = suites.iter().all(|s| s.passed);
            let value = document(
                "bounds_check",
                &json!({ "passed": passed, "suites": suites }),
            )?;
            Ok(Output {
                body: render(&value),
                status: u8::from(!passed),
            })
        }
        Command::Alpha {
            n,
            rho,
            m,
            q,
            exact,
            sample,
            trials,
            budget,
        } => {
            json_only(g, "alpha")?;
            if exact == sample {
                return Err(Failure::Usage(
                    "choose exactly one of --exact or --sample".into(),
                ));
            }
            if exact {
                let a = alpha_exact_with(n, rho, m, q, budget)?;
                let ratio = a.ratio();
                let value = document(
                    "alpha_exact",
                    &json!({
                        "n": n, "q": q, "rho": rho, "m": m,
                        "covering": a.covering.to_string(),
                        "total": a.total.to_string(),
                        "fraction": ratio.to_string(),
                    }),
                )?;
                Ok(ok(value))
            } else {
                let est = sample_alpha_with(n, rho, m, q, trials, g.seed, g.threads)?;
                Ok(ok(document("alpha_sample", &est)?))
            }
        }
        Command::Janson {
            target,
            q,
            r,
            p,
            records,
            simulate,
        } => {
            json_only(g, "janson")?;
            let rows = target
                .split(',')
                .map(|s| parse_word(s.trim(), q))
                .collect::<gencover::Result<Vec<_>>>()?;
            let v = MatrixWord::new(rows)?;
            let cert = janson_certificate(&v, r, p)?;
            let mut value = document("janson_certificate", &cert)?;
            if records {
                value["records"] = serde_json::to_value(&cert.records).expect("serializable");
            }
            if let Some(trials) = simulate {
                let est = estimate_uncovered_with(&v, r, p, trials, g.seed, g.threads)?;
                value["simulation"] = serde_json::to_value(est).expect("serializable");
            }
            Ok(ok(value))
        }
        Command::Pool {
            action: PoolAction::Solve { n, q, r, budget },
        } => {
            json_only(g, "pool solve")?;
            let opts = SearchOptions {
                budget,
                anchor: None,
                seed: g.seed,
            };
            let solution = pool_solve_with(n, q, r, &opts, g.threads)?;
            let status = match &solution {
                PoolSolution::Solved { verified, .. } => u8::from(!verified),
                PoolSolution::Bracket { .. } => 3,
            };
            Ok(Output {
                body: render(&document("pool_solution", &solution)?),
                status,
            })
        }
        Command::Pool {
            action:
                PoolAction::Verify {
                    tickets,
                    outcome_match,
                    outcome_rematch,
                    r,
                },
        } => {
            json_only(g, "pool verify")?;
            let code: Code = read(&tickets)?.parse()?;
            let q = code.q();
            let instance = PoolInstance::new(
                code,
                parse_word(&outcome_match, q)?,
                parse_word(&outcome_rematch, q)?,
                r,
            )?;
            let verdict = pool_verify(&instance)?;
            Ok(Output {
                body: render(&document("pool_verdict", &verdict)?),
                status: u8::from(!verdict.win),
            })
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.global.out.clone();
    match run(cli) {
        Ok(output) => {
            if let Err(e) = emit(&out, &output.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(output.status)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
