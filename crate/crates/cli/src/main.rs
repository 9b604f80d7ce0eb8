//! Command-line front end for the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tensorpure::harness::{replay, run_suite, Format, Mode, Mutation, Report, Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "tensorpure",
    version,
    about = "Exhaustive checks of tensor-purity and flatness over finite Z/n-modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
enum Command {
    /// Exact-category axioms on enumerated conflations.
    Axioms,
    /// Purity via split duals against the tensor oracle.
    #[command(name = "prop1")]
    Purity,
    /// Tensor-flatness, injective duals and pure conflations agree.
    FlatEquiv,
    /// The double-dual unit is a pure embedding into a pure injective.
    EnoughPi,
    /// Flat, pure-acyclic and injective-dual complexes agree.
    Complexes,
    /// Orders of hom, tensor and dual modules.
    Structural,
    /// Currying is a natural bijection.
    Adjunction,
    /// Every suite.
    All,
    /// Re-run the counterexamples of a JSON report.
    Replay {
        /// Report written by an earlier run with `--format json`.
        report: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Opts {
    /// Modulus n of the ring Z/n; repeat for several rings.
    #[arg(long = "modulus", global = true, value_name = "N")]
    moduli: Vec<u64>,
    /// Largest module order for the flatness suites.
    #[arg(long, global = true, value_name = "B")]
    max_order: Option<u128>,
    /// Largest order of the other end of quantified conflations.
    #[arg(long, global = true, value_name = "B")]
    max_kernel: Option<u128>,
    /// Largest kernel and end order of the prop1 suite.
    #[arg(long, global = true, value_name = "B")]
    purity_order: Option<u128>,
    /// Largest module order of the axioms suite.
    #[arg(long, global = true, value_name = "B")]
    axiom_order: Option<u128>,
    /// Number of degrees a complex may occupy.
    #[arg(long, global = true, value_name = "K")]
    span: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Extension classes per pair of end terms in sample mode.
    #[arg(long, global = true, value_name = "C")]
    samples: Option<usize>,
    /// Seed of every sampled choice; required in sample mode.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Sampled triples per modulus for the adjunction suite.
    #[arg(long, global = true, value_name = "C")]
    adjunction_samples: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Skip this divisor in the tensor oracle (fault injection).
    #[arg(long, global = true, hide = true, value_name = "D")]
    mutate_skip_divisor: Option<u64>,
    /// Negate one leg of constructed pullbacks (fault injection).
    #[arg(long, global = true, hide = true)]
    mutate_flip_fiber_sign: bool,
}

impl Opts {
    fn config(&self, suites: Vec<Suite>) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            suites,
            moduli: if self.moduli.is_empty() {
                d.moduli
            } else {
                self.moduli.clone()
            },
            max_order: self.max_order.unwrap_or(d.max_order),
            max_kernel: self.max_kernel.unwrap_or(d.max_kernel),
            purity_order: self.purity_order.unwrap_or(d.purity_order),
            axiom_order: self.axiom_order.unwrap_or(d.axiom_order),
            span: self.span.unwrap_or(d.span),
            mode: match self.mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Sample => Mode::Sample,
            },
            samples: self.samples.unwrap_or(d.samples),
            seed: self.seed,
            adjunction_samples: self.adjunction_samples.unwrap_or(d.adjunction_samples),
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Text => Format::Text,
            },
            out: self.out.clone(),
            mutation: Mutation {
                skip_divisor: self.mutate_skip_divisor,
                flip_fiber_sign: self.mutate_flip_fiber_sign,
            },
            ..d
        }
    }
}

const USAGE_ERROR: u8 = 2;

fn suites(command: &Command) -> Vec<Suite> {
    match command {
        Command::Axioms => vec![Suite::Axioms],
        Command::Purity => vec![Suite::Purity],
        Command::FlatEquiv => vec![Suite::FlatEquiv],
        Command::EnoughPi => vec![Suite::EnoughPi],
        Command::Complexes => vec![Suite::Complexes],
        Command::Structural => vec![Suite::Structural],
        Command::Adjunction => vec![Suite::Adjunction],
        Command::All | Command::Replay { .. } => Suite::ALL.to_vec(),
    }
}

/// Replays every counterexample in the report at `path` under the report's
/// own configuration; exits 1 if any of them still fails.
fn replay_report(path: &PathBuf) -> ExitCode {
    let report: Report = match std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
    {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read report {}: {e}", path.display());
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let (mut reproduced, mut total) = (0, 0);
    for c in report.suites.iter().flat_map(|s| &s.counterexamples) {
        total += 1;
        match replay(c, &report.config) {
            Ok(passes) => {
                let verdict = if passes { "passes now" } else { "reproduced" };
                println!("{} [{}] {}: {verdict}", c.check, c.leg, c.detail);
                reproduced += usize::from(!passes);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE_ERROR);
            }
        }
    }
    println!("{reproduced} of {total} counterexamples reproduced");
    ExitCode::from(u8::from(reproduced > 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Replay { report } = &cli.command {
        return replay_report(report);
    }
    let config = cli.opts.config(suites(&cli.command));
    match run_suite(&config) {
        Ok(report) => {
            let rendered = report.render();
            print!("{rendered}");
            if !rendered.ends_with('\n') {
                println!();
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
