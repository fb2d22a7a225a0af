use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reactive_traces::algebra::Mode;
use reactive_traces::dsl::{parse, Env, Formula, HealthOp, Sort};
use reactive_traces::models::NonNegRat;
use reactive_traces::suite::{ModelKind, SuiteConfig, SuiteError, SuiteName, SCHEMA};
use reactive_traces::Predicate;
use serde_json::{json, Value as Json};

#[derive(Parser, Debug)]
#[command(name = "rtrace", version, about = "Check trace-algebra laws and reactive-process theorems")]
struct Cli {
    #[command(flatten)]
    universe: UniverseArgs,

    /// Print JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct UniverseArgs {
    /// A JSON suite config; the flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// seq, rat or timed.
    #[arg(long, global = true)]
    model: Option<ModelKind>,
    /// Comma-separated event names.
    #[arg(long, global = true, value_delimiter = ',')]
    events: Option<Vec<String>>,
    /// Longest sequence (seq) or number of grid steps (rat).
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Grid step as "p/q".
    #[arg(long, global = true)]
    grid_step: Option<NonNegRat>,
    /// Number of sampled cases.
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumerate instead of sampling.
    #[arg(long, global = true, conflicts_with_all = ["samples", "seed"])]
    exhaustive: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The seventeen trace-algebra laws for the configured model.
    Lawsuite,
    /// Healthiness, trace contribution, closure and lattice checks.
    Theory,
    /// Distribution of `;` over healthy infima and the unit laws.
    Quantale,
    /// Parallel-by-merge: the interleaving example, merge health, closure.
    Parallel,
    /// Every suite listed in the config.
    Run,
    /// Applies a healthiness condition and prints the result.
    Apply {
        /// R1, R2c, R3, R, R2m or Rm.
        condition: String,
        formula: String,
    },
    /// Whether the first formula is refined by the second.
    Refines { spec: String, implementation: String },
    /// Evaluates a formula.
    Eval {
        formula: String,
        /// List the satisfying bindings.
        #[arg(long)]
        rows: bool,
    },
}

fn config(args: &UniverseArgs) -> Result<SuiteConfig, SuiteError> {
    let mut c = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| SuiteError::Config(format!("{}: {e}", path.display())))?;
            SuiteConfig::from_json(&text)?
        }
        None => SuiteConfig::default(),
    };
    if let Some(m) = args.model {
        c.model = m;
    }
    if let Some(e) = &args.events {
        c.events = e.clone();
    }
    if let Some(b) = args.bound {
        c.bound = b;
    }
    if let Some(g) = &args.grid_step {
        c.grid_step = g.clone();
    }
    if args.exhaustive {
        c.mode = Mode::Exhaustive;
    } else if args.samples.is_some() || args.seed.is_some() {
        c.mode = match (c.mode, args.samples, args.seed) {
            (Mode::Randomized { count, seed }, samples, s) => Mode::Randomized {
                count: samples.unwrap_or(count),
                seed: s.unwrap_or(seed),
            },
            (Mode::Exhaustive, samples, Some(seed)) => Mode::Randomized { count: samples.unwrap_or(200), seed },
            (Mode::Exhaustive, _, None) => {
                return Err(SuiteError::Config("randomized mode requires --seed".into()));
            }
        };
    }
    Ok(c)
}

fn bindings(p: &Predicate) -> Vec<Json> {
    p.row_indices().map(|row| json!(p.binding(row))).collect()
}

fn describe(p: &Predicate) -> Vec<String> {
    p.row_indices()
        .map(|row| {
            p.alphabet()
                .describe(row)
                .into_iter()
                .map(|(name, value)| format!("{name}={value}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

fn sort_name(sort: Sort) -> &'static str {
    match sort {
        Sort::Reactive => "reactive",
        Sort::Merge => "merge",
    }
}

/// Output and whether every requested check held.
struct Outcome {
    json: Json,
    human: String,
    ok: bool,
}

fn eval_formula(env: &Env, text: &str) -> Result<(Formula, Sort, Predicate), SuiteError> {
    let f = parse(text).map_err(reactive_traces::dsl::DslError::from)?;
    let sort = env.sort_of(&f)?;
    let p = env.eval_as(&f, sort)?;
    Ok((f, sort, p))
}

fn run(cli: &Cli) -> Result<Outcome, SuiteError> {
    let c = config(&cli.universe)?;
    let suite = |name: &str, suites: &[SuiteName]| -> Result<Outcome, SuiteError> {
        let doc = c.run(name, suites)?;
        Ok(Outcome {
            json: serde_json::to_value(&doc).expect("reports serialize"),
            human: doc.to_string(),
            ok: doc.all_verified(),
        })
    };
    match &cli.command {
        Command::Lawsuite => suite("lawsuite", &[SuiteName::Algebra]),
        Command::Theory => suite("theory", &[SuiteName::Reactive]),
        Command::Quantale => suite("quantale", &[SuiteName::Quantale]),
        Command::Parallel => suite("parallel", &[SuiteName::Parallel]),
        Command::Run => suite("run", &c.suites),
        Command::Apply { condition, formula } => {
            let h = HealthOp::from_keyword(condition)
                .ok_or_else(|| SuiteError::Config(format!("unknown healthiness condition `{condition}`")))?;
            let env = c.env()?;
            let f = parse(formula).map_err(reactive_traces::dsl::DslError::from)?;
            let sort = env.sort_of(&f.clone().apply(h))?;
            let input = env.eval_as(&f, sort)?;
            let output = env.eval_as(&f.clone().apply(h), sort)?;
            let fixed = input == output;
            Ok(Outcome {
                json: json!({
                    "schema": SCHEMA,
                    "command": "apply",
                    "condition": h.keyword(),
                    "formula": f.to_string(),
                    "sort": sort_name(sort),
                    "already_healthy": fixed,
                    "rows": output.count(),
                    "bindings": bindings(&output),
                }),
                human: format!(
                    "{} ({}): {} of {} bindings{}\n{}",
                    f.clone().apply(h),
                    sort_name(sort),
                    output.count(),
                    output.alphabet().size(),
                    if fixed { ", already healthy" } else { "" },
                    describe(&output).join("\n")
                ),
                ok: true,
            })
        }
        Command::Refines { spec, implementation } => {
            let env = c.env()?;
            let (f, _, p) = eval_formula(&env, spec)?;
            let (g, _, q) = eval_formula(&env, implementation)?;
            let holds = p.refines(&q)?;
            let witness = q.row_indices().find(|&row| !p.contains(row));
            Ok(Outcome {
                json: json!({
                    "schema": SCHEMA,
                    "command": "refines",
                    "spec": f.to_string(),
                    "implementation": g.to_string(),
                    "refines": holds,
                    "witness": witness.map(|row| json!(q.binding(row))),
                }),
                human: match witness {
                    None => format!("{f} is refined by {g}: true"),
                    Some(row) => format!(
                        "{f} is refined by {g}: false\nwitness: {}",
                        q.alphabet()
                            .describe(row)
                            .into_iter()
                            .map(|(n, v)| format!("{n}={v}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    ),
                },
                ok: holds,
            })
        }
        Command::Eval { formula, rows } => {
            let env = c.env()?;
            let (f, sort, p) = eval_formula(&env, formula)?;
            let mut out = json!({
                "schema": SCHEMA,
                "command": "eval",
                "formula": f.to_string(),
                "sort": sort_name(sort),
                "rows": p.count(),
                "size": p.alphabet().size(),
            });
            let mut human = format!("{f} ({}): {} of {} bindings", sort_name(sort), p.count(), p.alphabet().size());
            if *rows {
                out["bindings"] = Json::Array(bindings(&p));
                for line in describe(&p) {
                    human.push('\n');
                    human.push_str(&line);
                }
            }
            Ok(Outcome { json: out, human, ok: true })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&outcome.json).expect("serializable")
            } else {
                outcome.human
            };
            let _ = writeln!(io::stdout().lock(), "{text}");
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let error = json!({ "schema": SCHEMA, "error": e.kind(), "message": e.to_string() });
            eprintln!("{}", serde_json::to_string_pretty(&error).expect("serializable"));
            ExitCode::from(2)
        }
    }
}
