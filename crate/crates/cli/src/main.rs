//! Command-line surface: tuple checking and generation, difference sets,
//! the covering construction, bundle verification, witness scans, AP gap
//! statistics, and singular-series evaluation.
//!
//! Exit codes are a stable contract: 0 success, 1 domain failure
//! (inadmissible tuple, failed verification), 2 usage or parse errors.

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polignac::construction::{assemble, verify, PolignacConstruction};
use polignac::error::Error;
use polignac::scan::{ap_gap_scan, run_scan, DEFAULT_WITNESS_CAP};
use polignac::tuples::{
    diff_set, gen_tuple_primes_past_k, is_admissible, scaled_diff_set, singular_series_log, Tuple,
};

#[derive(Parser)]
#[command(
    name = "polignac",
    about = "Admissible tuple toolkit: covering constructions and prime-gap scanners",
    version
)]
struct Cli {
    /// Output format; auto picks text on a terminal, json otherwise.
    #[arg(long, global = true, value_enum, default_value_t = Format::Auto)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Json,
    Text,
    /// Histogram rows only (scan, apgaps).
    Csv,
}

impl Format {
    fn resolve(self) -> Format {
        match self {
            Format::Auto => {
                if std::io::stdout().is_terminal() {
                    Format::Text
                } else {
                    Format::Json
                }
            }
            other => other,
        }
    }
}

#[derive(Args)]
struct TupleInput {
    /// Inline tuple, e.g. "0 2 6".
    #[arg(short = 't', long = "tuple", conflicts_with = "file")]
    tuple: Option<String>,

    /// Tuple file (whitespace/comma separated, # comments).
    #[arg(short = 'f', long = "file")]
    file: Option<PathBuf>,
}

impl TupleInput {
    fn load(&self) -> Result<Tuple, Error> {
        match (&self.tuple, &self.file) {
            (Some(inline), None) => Tuple::parse_text(inline),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
                Tuple::parse_text(&text)
            }
            _ => Err(Error::Parse(
                "provide exactly one of --tuple or --file".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide admissibility; exit 0 if admissible, 1 if not.
    Check {
        #[command(flatten)]
        input: TupleInput,
    },
    /// Print the canonical admissible tuple built from the first k primes past k.
    Gen {
        /// Tuple cardinality.
        k: u64,
    },
    /// Print the (optionally scaled) difference set.
    Diffset {
        #[command(flatten)]
        input: TupleInput,
        /// Scale every difference by m.
        #[arg(short, long, default_value_t = 1)]
        m: u64,
    },
    /// Build the covering construction bundle for (tuple, m).
    Construct {
        #[command(flatten)]
        input: TupleInput,
        /// Multiplier m >= 1.
        #[arg(short, long, default_value_t = 1)]
        m: u64,
        /// Write the bundle JSON here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check a serialized bundle; exit 1 listing any failed checks.
    Verify {
        /// Bundle JSON file.
        bundle: PathBuf,
    },
    /// Scan n in [from, to) for tuples carrying two or more primes.
    Scan {
        /// Bundle JSON file (alternative to --tuple/--file + -m).
        #[arg(short, long, conflicts_with_all = ["tuple", "file", "m"])]
        bundle: Option<PathBuf>,
        #[command(flatten)]
        input: TupleInput,
        #[arg(short, long, default_value_t = 1)]
        m: u64,
        /// Start of the n range (inclusive).
        #[arg(long)]
        from: u64,
        /// End of the n range (exclusive).
        #[arg(long)]
        to: u64,
        /// Concurrent scan workers.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
        workers: u64,
        /// Sample witnesses retained per gap record.
        #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
        witness_cap: usize,
    },
    /// Gap statistics of consecutive primes within one residue class.
    Apgaps {
        /// Residue b (0 <= b < q).
        b: u64,
        /// Modulus q.
        q: u64,
        /// Scan primes up to this bound.
        limit: u64,
    },
    /// Truncated log-space singular-series sum.
    Sseries {
        #[command(flatten)]
        input: TupleInput,
        /// Omit first-product factors for primes dividing q.
        #[arg(short, long, default_value_t = 1)]
        q: u64,
        /// Prime truncation bound.
        #[arg(short = 'P', long = "prime-bound")]
        prime_bound: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.resolve();
    match dispatch(cli.command, format) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => ExitCode::from(2),
                Error::Precondition(_) | Error::Resource(_) => ExitCode::from(1),
            }
        }
    }
}

fn csv_unsupported() -> Error {
    Error::Parse("csv output is only available for histogram commands (scan, apgaps)".into())
}

fn dispatch(command: Command, format: Format) -> Result<u8, Error> {
    match command {
        Command::Check { input } => {
            let tuple = input.load()?;
            let report = is_admissible(&tuple);
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
                Format::Csv => return Err(csv_unsupported()),
                _ => match &report.failure {
                    None => println!(
                        "admissible (primes checked up to {})",
                        report.checked_prime_bound
                    ),
                    Some(f) => println!(
                        "inadmissible: nu_{}(H) = {} covers every residue class",
                        f.prime, f.residue_count
                    ),
                },
            }
            Ok(if report.admissible { 0 } else { 1 })
        }

        Command::Gen { k } => {
            let tuple = gen_tuple_primes_past_k(k)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({ "k": tuple.len(), "tuple": tuple })
                ),
                Format::Csv => return Err(csv_unsupported()),
                _ => println!("{tuple}"),
            }
            Ok(0)
        }

        Command::Diffset { input, m } => {
            let tuple = input.load()?;
            let ds = if m == 1 {
                diff_set(&tuple)?
            } else {
                scaled_diff_set(&tuple, m)?
            };
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&ds).expect("diff set serializes")
                ),
                Format::Csv => return Err(csv_unsupported()),
                _ => {
                    let rendered: Vec<String> = ds.values().iter().map(|v| v.to_string()).collect();
                    println!("{}", rendered.join(" "));
                }
            }
            Ok(0)
        }

        Command::Construct { input, m, output } => {
            let tuple = input.load()?;
            let bundle = assemble(&tuple, m)?;
            debug_assert!(verify(&bundle).passed());
            let json = bundle.to_json();
            if let Some(path) = &output {
                std::fs::write(path, &json).map_err(|e| {
                    Error::Resource(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            match format {
                Format::Json => println!("{json}"),
                Format::Csv => return Err(csv_unsupported()),
                _ => {
                    println!("H: {}", bundle.tuple);
                    println!("m: {}", bundle.m);
                    println!(
                        "X: {}",
                        bundle
                            .exceptions
                            .iter()
                            .map(|a| a.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    println!(
                        "cover_primes: {}",
                        bundle
                            .cover_primes
                            .iter()
                            .map(|p| p.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    );
                    println!("b: {}", bundle.b);
                    println!("q: {}", bundle.q);
                    if let Some(path) = &output {
                        println!("bundle written to {}", path.display());
                    }
                }
            }
            Ok(0)
        }

        Command::Verify { bundle } => {
            let text = std::fs::read_to_string(&bundle)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", bundle.display())))?;
            let c = PolignacConstruction::from_json(&text)?;
            let report = verify(&c);
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "passed": report.passed(),
                        "checks": report.checks,
                    })
                ),
                Format::Csv => return Err(csv_unsupported()),
                _ => {
                    for check in &report.checks {
                        println!(
                            "{:22} {}  ({})",
                            check.name,
                            if check.passed { "pass" } else { "FAIL" },
                            check.detail
                        );
                    }
                }
            }
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Scan {
            bundle,
            input,
            m,
            from,
            to,
            workers,
            witness_cap,
        } => {
            let c = match bundle {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Error::Parse(format!("cannot read {}: {e}", path.display()))
                    })?;
                    PolignacConstruction::from_json(&text)?
                }
                None => assemble(&input.load()?, m)?,
            };
            let report = run_scan(&c, from, to, workers as usize, witness_cap)?;
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => {
                    println!("gap,pair_i,pair_j,count,consecutive_verified");
                    for r in &report.histogram.records {
                        println!(
                            "{},{},{},{},{}",
                            r.gap, r.pair.0, r.pair.1, r.count, r.consecutive_verified
                        );
                    }
                }
                _ => {
                    println!("q: {}", report.construction.q);
                    println!("b: {}", report.construction.b);
                    println!("range: [{}, {})", report.n_lo, report.n_hi);
                    println!("hits: {}", report.hit_count);
                    println!("certainty: {:?}", report.certainty);
                    for r in &report.histogram.records {
                        println!(
                            "gap {:>6}  pair ({}, {})  count {:>6}  verified consecutive {}",
                            r.gap, r.pair.0, r.pair.1, r.count, r.consecutive_verified
                        );
                    }
                    match report.histogram.top_pair {
                        Some((i, j)) => println!("top pair: ({i}, {j})"),
                        None => println!("top pair: none (no hits)"),
                    }
                    println!("note: {}", report.interpretation);
                }
            }
            Ok(0)
        }

        Command::Apgaps { b, q, limit } => {
            let scan = ap_gap_scan(b, q, limit)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&scan).expect("scan serializes")
                ),
                Format::Csv => {
                    println!("normalized_gap,count");
                    for (gap, count) in &scan.histogram {
                        println!("{gap},{count}");
                    }
                }
                _ => {
                    println!("primes ≡ {b} (mod {q}) up to {limit}: {}", scan.prime_count);
                    match scan.min_normalized_gap {
                        Some(g) => println!("min normalized gap: {g}"),
                        None => println!("min normalized gap: none (fewer than two primes)"),
                    }
                    for (gap, count) in &scan.histogram {
                        println!("gap {gap:>6} x {count}");
                    }
                }
            }
            Ok(0)
        }

        Command::Sseries {
            input,
            q,
            prime_bound,
        } => {
            let tuple = input.load()?;
            let value = singular_series_log(&tuple, q, prime_bound)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "log_singular_series": value,
                        "q": q,
                        "truncated_at": prime_bound,
                    })
                ),
                Format::Csv => return Err(csv_unsupported()),
                _ => println!(
                    "log singular series = {value:.12} (truncated at P = {prime_bound}, q = {q})"
                ),
            }
            Ok(0)
        }
    }
}
