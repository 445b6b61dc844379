use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hm_cli::rates::{ModuliKind, RatesArgs};
use hm_cli::{cmd_rates, cmd_run, cmd_verify, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "hm", version, about = "Alternating Halpern-Mann experiments and rates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuliArg {
    Harmonic,
    Toy,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one configured trajectory and write its exports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a rate exactly.
    Rates {
        name: String,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value = "1/2")]
        beta: String,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Counter-function n -> a*n + b.
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 0)]
        b: u64,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, value_enum, default_value = "harmonic")]
        moduli: ModuliArg,
        #[arg(long)]
        q_star: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let outcome = cmd_run(&cfg, &out);
            match &outcome {
                Ok(o) => {
                    for r in &o.reports {
                        println!("{}", r.line());
                    }
                    println!("wrote {} rows to {}", o.rows, out.display());
                }
                Err(CliError::Verify(_)) => eprintln!("see {}", out.join(&cfg.outputs.report).display()),
                Err(_) => {}
            }
            outcome.map(|_| ())
        }
        Cmd::Rates { name, n, beta, gamma, eps, k, a, b, sigma, moduli, q_star, json } => {
            let moduli = match moduli {
                ModuliArg::Harmonic => ModuliKind::Harmonic,
                ModuliArg::Toy => ModuliKind::Toy,
            };
            let v = cmd_rates(&RatesArgs { name, n, beta, gamma, eps, k, a, b, sigma, moduli, q_star })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                println!("{}", v.line());
            }
            Ok(())
        }
        Cmd::Verify { suite, samples, seed, out } => {
            let report = cmd_verify(&suite, samples, seed)?;
            let text = serde_json::to_string_pretty(&report)?;
            match out {
                Some(p) => std::fs::write(p, text + "\n")?,
                None => println!("{text}"),
            }
            for r in &report.results {
                eprintln!("{}: {}", r.suite, if r.passed { "pass" } else { "FAIL" });
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Verify(format!("suite {suite} failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
