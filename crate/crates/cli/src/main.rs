//! `partreg` — command-line surface of the partition-regularity engine.
//!
//! Exit codes: 0 on success, 1 on a domain failure (budget exhausted,
//! verification found a monochromatic instance, simulation failed), 2 on
//! usage errors.

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use partreg_core::cnf::export_cnf;
use partreg_core::coloring::Coloring;
use partreg_core::fs::{find_divisible, finite_sums, GeneratingSequence};
use partreg_core::pattern::{parse_pattern, Pattern};
use partreg_core::search::{find_avoiding, find_witness, rado_number, SearchOutcome};
use partreg_core::simulate::{simulate, ColoringRule, ProofTrace};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "partreg",
    version,
    about = "Partition-regularity engine: forcing numbers, avoiding colorings, \
             finite-sum sets, descent simulation, and CNF export"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an avoiding coloring of [1, n]
    Search {
        /// Pattern text, e.g. "a, b, a*b, (a+1)*b"
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        n: u64,
        /// Node budget (placement attempts)
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Require pairwise-distinct term values per instance
        #[arg(long)]
        distinct: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the avoiding coloring to this file (coloring file format)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the forcing number by increasing n until refutation
    Rado {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        distinct: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Find the least monochromatic witness in an explicit coloring
    Witness {
        #[arg(long)]
        coloring_file: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a coloring file against a pattern; exit 0 iff avoiding
    Verify {
        #[arg(long)]
        coloring_file: PathBuf,
        #[arg(long)]
        pattern: String,
    },
    /// Finite sums of a sequence, with optional divisible-sum search
    Fs {
        /// Comma-separated entries, e.g. 1,2,4 (big integers accepted)
        #[arg(long)]
        xs: String,
        #[arg(long)]
        divisible_by: Option<String>,
    },
    /// Run the descent simulation under a coloring rule
    Simulate {
        /// JSON rule file; see the rule format in the README
        #[arg(long)]
        rule_file: PathBuf,
        /// Comma-separated seed sequence
        #[arg(long)]
        seed_xs: String,
        /// Comma-separated FS lengths, one per stage (r + 1 entries)
        #[arg(long)]
        stage_lengths: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Export the avoidance problem as a DIMACS CNF file
    Cnf {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        colors: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Usage(msg) => {
                eprintln!("usage error: {msg}");
                eprintln!("run `partreg help` for the flag reference");
                ExitCode::from(2)
            }
            Failure::Domain(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => failure.report(),
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Search {
            pattern,
            colors,
            n,
            budget,
            distinct,
            format,
            out,
        } => cmd_search(&pattern, colors, n, budget, distinct, format, out.as_deref()),
        Command::Rado {
            pattern,
            colors,
            n_max,
            budget,
            distinct,
            format,
        } => cmd_rado(&pattern, colors, n_max, budget, distinct, format),
        Command::Witness {
            coloring_file,
            pattern,
            format,
        } => cmd_witness(&coloring_file, &pattern, format),
        Command::Verify {
            coloring_file,
            pattern,
        } => cmd_verify(&coloring_file, &pattern),
        Command::Fs { xs, divisible_by } => cmd_fs(&xs, divisible_by.as_deref()),
        Command::Simulate {
            rule_file,
            seed_xs,
            stage_lengths,
            budget,
            format,
        } => cmd_simulate(&rule_file, &seed_xs, &stage_lengths, budget, format),
        Command::Cnf {
            pattern,
            colors,
            n,
            out,
        } => cmd_cnf(&pattern, colors, n, &out),
    }
}

fn pattern_arg(text: &str, distinct: bool) -> Result<Pattern, Failure> {
    let mut p = parse_pattern(text)
        .map_err(|e| Failure::Usage(format!("--pattern \"{text}\": {e}")))?;
    p.set_distinct_values(distinct);
    Ok(p)
}

fn read_coloring(path: &Path) -> Result<Coloring, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
    Coloring::parse(&text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn csv_biguints(text: &str, flag: &str) -> Result<Vec<BigUint>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Failure::Usage(format!("{flag}: bad integer `{s}`")))
        })
        .collect()
}

fn csv_usizes(text: &str, flag: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Failure::Usage(format!("{flag}: bad integer `{s}`")))
        })
        .collect()
}

fn print_table(rows: &[(&str, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (key, value) in rows {
        println!("{key:width$}  {value}");
    }
}

fn cmd_search(
    pattern_text: &str,
    colors: u32,
    n: u64,
    budget: u64,
    distinct: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let pattern = pattern_arg(pattern_text, distinct)?;
    let outcome =
        find_avoiding(&pattern, colors, n, budget).map_err(|e| Failure::Domain(e.to_string()))?;
    let exit = match &outcome {
        SearchOutcome::Avoiding(coloring) => {
            if let Some(path) = out {
                std::fs::write(path, coloring.to_file_string())
                    .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
            }
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "outcome": "avoiding",
                        "n": n,
                        "colors": colors,
                        "coloring": coloring.colors(),
                    })
                ),
                Format::Table => print_table(&[
                    ("outcome", "avoiding".into()),
                    ("n", n.to_string()),
                    ("colors", colors.to_string()),
                    ("coloring", join_colors(coloring.colors())),
                ]),
            }
            ExitCode::SUCCESS
        }
        SearchOutcome::Forced { n, nodes, method } => {
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "outcome": "forced",
                        "n": n,
                        "colors": colors,
                        "nodes": nodes,
                        "method": method.to_string(),
                    })
                ),
                Format::Table => print_table(&[
                    ("outcome", "forced".into()),
                    ("n", n.to_string()),
                    ("colors", colors.to_string()),
                    ("nodes", nodes.to_string()),
                    ("method", method.to_string()),
                ]),
            }
            ExitCode::SUCCESS
        }
        SearchOutcome::Unknown {
            nodes,
            best_lower_bound,
        } => {
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "outcome": "unknown",
                        "n": n,
                        "colors": colors,
                        "nodes": nodes,
                        "best_lower_bound": best_lower_bound,
                    })
                ),
                Format::Table => print_table(&[
                    ("outcome", "unknown".into()),
                    ("n", n.to_string()),
                    ("colors", colors.to_string()),
                    ("nodes", nodes.to_string()),
                    ("best lower bound", best_lower_bound.to_string()),
                ]),
            }
            ExitCode::from(1)
        }
    };
    Ok(exit)
}

fn cmd_rado(
    pattern_text: &str,
    colors: u32,
    n_max: u64,
    budget: u64,
    distinct: bool,
    format: Format,
) -> Result<ExitCode, Failure> {
    let pattern = pattern_arg(pattern_text, distinct)?;
    let result = rado_number(&pattern, colors, n_max, budget)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    match format {
        Format::Json => println!("{}", result.to_json()),
        Format::Table => print_table(&[
            ("pattern", result.pattern.clone()),
            ("colors", result.colors.to_string()),
            (
                "forcing n",
                result
                    .forcing_n
                    .map_or_else(|| "not found".into(), |n| n.to_string()),
            ),
            ("lower bound", result.lower_bound.to_string()),
            (
                "avoiding coloring",
                result
                    .avoiding_at_prev
                    .as_ref()
                    .map_or_else(|| "-".into(), |c| join_colors(c.colors())),
            ),
            ("nodes", result.nodes.to_string()),
            ("method", result.method.to_string()),
        ]),
    }
    Ok(if result.forcing_n.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_witness(
    coloring_file: &Path,
    pattern_text: &str,
    format: Format,
) -> Result<ExitCode, Failure> {
    let pattern = pattern_arg(pattern_text, false)?;
    let coloring = read_coloring(coloring_file)?;
    let found =
        find_witness(&coloring, &pattern).map_err(|e| Failure::Domain(e.to_string()))?;
    match found {
        Some((assignment, color)) => {
            let values = witness_values(&pattern, &assignment)?;
            match format {
                Format::Json => {
                    let asg: serde_json::Map<String, serde_json::Value> = assignment
                        .iter()
                        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
                        .collect();
                    println!(
                        "{}",
                        serde_json::json!({
                            "found": true,
                            "assignment": asg,
                            "color": color,
                            "values": values,
                        })
                    );
                }
                Format::Table => {
                    let asg = assignment
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    print_table(&[
                        ("found", "yes".into()),
                        ("assignment", asg),
                        ("color", color.to_string()),
                        ("values", values.join(" ")),
                    ]);
                }
            }
        }
        None => match format {
            Format::Json => println!("{}", serde_json::json!({ "found": false })),
            Format::Table => print_table(&[("found", "no".into())]),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn witness_values(
    pattern: &Pattern,
    assignment: &partreg_core::pattern::Assignment,
) -> Result<Vec<String>, Failure> {
    match pattern
        .instantiate(assignment)
        .map_err(|e| Failure::Domain(e.to_string()))?
    {
        partreg_core::pattern::InstanceValues::Values(vs) => {
            Ok(vs.iter().map(|v| v.to_string()).collect())
        }
        partreg_core::pattern::InstanceValues::Degenerate => {
            Err(Failure::Domain("witness instance is degenerate".into()))
        }
    }
}

fn cmd_verify(coloring_file: &Path, pattern_text: &str) -> Result<ExitCode, Failure> {
    let pattern = pattern_arg(pattern_text, false)?;
    let coloring = read_coloring(coloring_file)?;
    match find_witness(&coloring, &pattern).map_err(|e| Failure::Domain(e.to_string()))? {
        None => {
            println!("avoiding");
            Ok(ExitCode::SUCCESS)
        }
        Some((assignment, color)) => {
            let values = witness_values(&pattern, &assignment)?;
            let asg = assignment
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            println!("monochromatic instance found");
            print_table(&[
                ("assignment", asg),
                ("values", values.join(" ")),
                ("color", color.to_string()),
            ]);
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_fs(xs_text: &str, divisible_by: Option<&str>) -> Result<ExitCode, Failure> {
    let xs = csv_biguints(xs_text, "--xs")?;
    let g = GeneratingSequence::new(xs).map_err(|e| Failure::Usage(format!("--xs: {e}")))?;
    let fs = finite_sums(&g).map_err(|e| Failure::Domain(e.to_string()))?;
    let mut json = fs.to_json();
    if let Some(y_text) = divisible_by {
        let y: BigUint = y_text
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--divisible-by: bad integer `{y_text}`")))?;
        if y == BigUint::from(0u32) {
            return Err(Failure::Usage("--divisible-by must be ≥ 1".into()));
        }
        let divisible = find_divisible(&g, &y).map(|d| {
            serde_json::json!({
                "indices": d.indices,
                "value": d.value.to_string(),
            })
        });
        json["divisible_by"] = serde_json::Value::String(y.to_string());
        json["divisible"] = divisible.unwrap_or(serde_json::Value::Null);
    }
    println!("{json}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(
    rule_file: &Path,
    seed_text: &str,
    stage_lengths_text: &str,
    budget: u64,
    format: Format,
) -> Result<ExitCode, Failure> {
    let rule_text = std::fs::read_to_string(rule_file)
        .map_err(|e| Failure::Domain(format!("{}: {e}", rule_file.display())))?;
    let rule = ColoringRule::from_json_str(&rule_text, rule_file.parent())
        .map_err(|e| Failure::Domain(format!("{}: {e}", rule_file.display())))?;
    let seed = GeneratingSequence::new(csv_biguints(seed_text, "--seed-xs")?)
        .map_err(|e| Failure::Usage(format!("--seed-xs: {e}")))?;
    let stage_lengths = csv_usizes(stage_lengths_text, "--stage-lengths")?;
    match simulate(&rule, &seed, &stage_lengths, budget) {
        Ok(trace) => {
            print_trace(&trace, format);
            Ok(if trace.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Err(e) => {
            match format {
                Format::Json => println!("{}", serde_json::json!({ "error": e.to_string() })),
                Format::Table => println!("simulation failed: {e}"),
            }
            Ok(ExitCode::from(1))
        }
    }
}

fn print_trace(trace: &ProofTrace, format: Format) {
    match format {
        Format::Json => println!("{}", trace.to_json()),
        Format::Table => {
            println!("stage  y            color  fs-size  sequence");
            for s in &trace.stages {
                println!(
                    "{:<5}  {:<11}  {:<5}  {:<7}  {}",
                    s.index,
                    s.y.as_ref()
                        .map_or_else(|| "-".to_string(), |y| y.to_string()),
                    s.color,
                    s.fs_size,
                    s.sequence
                        .xs()
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
            }
            print_table(&[
                (
                    "pigeonhole",
                    format!(
                        "j={} n={} color={}",
                        trace.pigeonhole.j, trace.pigeonhole.n, trace.pigeonhole.color
                    ),
                ),
                ("a", trace.witness.a.to_string()),
                ("b", trace.witness.b.to_string()),
                (
                    "values",
                    trace
                        .witness
                        .values
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                ),
                ("color", trace.witness.color.to_string()),
                ("verified", trace.verified.to_string()),
            ]);
        }
    }
}

fn cmd_cnf(pattern_text: &str, colors: u32, n: u64, out: &Path) -> Result<ExitCode, Failure> {
    let pattern = pattern_arg(pattern_text, false)?;
    let doc = export_cnf(&pattern, colors, n).map_err(|e| Failure::Domain(e.to_string()))?;
    std::fs::write(out, doc.to_dimacs())
        .map_err(|e| Failure::Domain(format!("{}: {e}", out.display())))?;
    print_table(&[
        ("variables", doc.num_vars().to_string()),
        ("clauses", doc.clauses().len().to_string()),
        ("written", out.display().to_string()),
    ]);
    Ok(ExitCode::SUCCESS)
}

fn join_colors(colors: &[u32]) -> String {
    colors
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
