use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use squarepack::adversary::{all_adversaries, run_adversary};
use squarepack::verifier::audit_all;
use squarepack::{generate, Distribution, Packer, PackerConfig, SequenceSpec, GUARANTEED_AREA};
use squarepack_cli::fuzz::{self, FuzzOptions};
use squarepack_cli::input::format_sequence;
use squarepack_cli::pack::{pack, PackOptions, EXIT_FAILED, EXIT_INPUT};
use squarepack_cli::serve::{serve_http, serve_stdio};

#[derive(Parser)]
#[command(name = "squarepack", version, about = "Online square packing with a 3/8 area guarantee")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Area budget.
    #[arg(long, default_value_t = GUARANTEED_AREA)]
    budget: f64,
    /// Reject squares that would push the total area above the budget.
    #[arg(long)]
    enforce_budget: bool,
}

impl BudgetArgs {
    fn config(self) -> PackerConfig {
        PackerConfig {
            enforce_budget: self.enforce_budget,
            budget: self.budget,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Pack a sequence file and write JSON-lines placement records.
    Pack {
        input: PathBuf,
        /// Run every audit on the final state.
        #[arg(long)]
        verify: bool,
        /// Write an SVG rendering of the final state.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write records here instead of standard output.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Pack many generated sequences and audit each result.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Distribution name, or `all`.
        #[arg(long, default_value = "all")]
        dist: String,
        #[arg(long, default_value_t = GUARANTEED_AREA)]
        budget: f64,
        /// Run the density, pair-close and reservation audits too.
        #[arg(long)]
        audit_all: bool,
        /// Exit 0 even when some runs fail.
        #[arg(long)]
        allow_failures: bool,
        #[arg(long, default_value_t = 10_000)]
        max_squares: usize,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Print the summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print a generated sequence, one height per line.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "mixed")]
        dist: String,
        #[arg(long, default_value_t = GUARANTEED_AREA)]
        budget: f64,
        #[arg(long, default_value_t = 10_000)]
        max_squares: usize,
    },
    /// Play the built-in adaptive adversaries against fresh packers.
    Adversary {
        #[arg(long, default_value_t = 100_000)]
        max_squares: usize,
    },
    /// Serve the session protocol over HTTP or standard streams.
    Serve {
        #[arg(long, conflicts_with = "stdio", required_unless_present = "stdio")]
        port: Option<u16>,
        #[arg(long)]
        stdio: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn distributions(name: &str) -> anyhow::Result<Vec<Distribution>> {
    if name == "all" {
        return Ok(Distribution::RANDOM.to_vec());
    }
    match Distribution::from_name(name) {
        Some(d) => Ok(vec![d]),
        None => bail!(
            "unknown distribution `{name}` (expected all, uniform, class_boundary, medium_heavy, very_small_heavy or mixed)"
        ),
    }
}

fn check_budget(budget: f64) -> anyhow::Result<()> {
    if !(budget > 0.0 && budget <= 0.5) {
        bail!("budget must lie in (0, 0.5], got {budget}");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Pack {
            input,
            verify,
            svg,
            log,
            budget,
        } => {
            let opts = PackOptions {
                input,
                verify,
                svg,
                config: budget.config(),
            };
            let stderr = &mut io::stderr();
            let code = match log {
                Some(path) => {
                    let file = std::fs::File::create(&path)
                        .with_context(|| format!("cannot create {}", path.display()))?;
                    pack(&opts, &mut io::BufWriter::new(file), stderr)?
                }
                None => pack(&opts, &mut io::stdout().lock(), stderr)?,
            };
            Ok(code)
        }
        Cmd::Fuzz {
            runs,
            seed,
            dist,
            budget,
            audit_all,
            allow_failures,
            max_squares,
            jobs,
            json,
        } => {
            check_budget(budget)?;
            let mut opts = FuzzOptions {
                runs,
                seed,
                dists: distributions(&dist)?,
                budget,
                audit_all,
                max_squares,
                ..FuzzOptions::default()
            };
            if let Some(j) = jobs {
                opts.jobs = j;
            }
            let summary = fuzz::run(&opts);
            if json {
                println!("{}", serde_json::to_string_pretty(&summary)?);
            } else {
                print!("{summary}");
            }
            if let Some(first) = summary.failures.first() {
                eprintln!("first failing seed: {} (dist {})", first.seed, first.dist);
                if !allow_failures {
                    return Ok(EXIT_FAILED);
                }
            }
            Ok(0)
        }
        Cmd::Gen {
            seed,
            dist,
            budget,
            max_squares,
        } => {
            check_budget(budget)?;
            let [distribution] = <[Distribution; 1]>::try_from(distributions(&dist)?)
                .map_err(|_| anyhow::anyhow!("gen takes a single distribution"))?;
            let spec = SequenceSpec {
                seed,
                budget,
                distribution,
                max_squares,
            };
            io::stdout().write_all(format_sequence(&generate(&spec)).as_bytes())?;
            Ok(0)
        }
        Cmd::Adversary { max_squares } => {
            let mut code = 0;
            for mut adv in all_adversaries() {
                let mut packer = Packer::default();
                let run = run_adversary(adv.as_mut(), &mut packer, GUARANTEED_AREA, max_squares);
                let report = audit_all(&packer.snapshot());
                let verdict = match (&run.failure, report.passed()) {
                    (None, true) => "held",
                    _ => {
                        code = EXIT_FAILED;
                        "BROKEN"
                    }
                };
                println!(
                    "{:<15} {verdict}: {} squares, area {:.9}",
                    run.name,
                    run.heights.len(),
                    packer.cumulative_area()
                );
                if let Some((i, out)) = &run.failure {
                    println!("  square {i} (height {}) -> {out:?}", run.heights[*i]);
                }
                if !report.passed() {
                    print!("{report}");
                }
            }
            Ok(code)
        }
        Cmd::Serve {
            port,
            stdio,
            budget,
        } => {
            let config = budget.config();
            if stdio {
                serve_stdio(io::stdin().lock(), io::stdout().lock(), config)?;
                return Ok(0);
            }
            let port = port.expect("clap requires --port without --stdio");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve_http(port, config, |addr| {
                println!("listening on http://{addr}");
                let _ = io::stdout().flush();
            }))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
