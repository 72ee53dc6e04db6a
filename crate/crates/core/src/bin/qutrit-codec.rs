use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qutrit_codec::mc::TargetPolicy;
use qutrit_codec::report::{
    cmd_decode, cmd_demo, cmd_encode, cmd_mc, cmd_verify, render, Format, McParams, ReportDocument,
    TraceParams, VerifyParams,
};

#[derive(Parser)]
#[command(
    name = "qutrit-codec",
    version,
    about = "Two qubits in one qutrit: traces, Monte Carlo and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Narrated single run: encode, list both decoders, decode one qubit.
    Demo(TraceArgs),
    /// Run the encoding measurement only.
    Encode(TraceArgs),
    /// Encode, then decode the chosen target.
    Decode(TraceArgs),
    /// Batch Monte Carlo of the full protocol.
    Mc(McArgs),
    /// Recompute every reference constant and identity.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Output {
    #[arg(long, default_value = "json", value_parser = ["json", "csv", "md"])]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi2: f64,
    /// Force this encoding outcome instead of sampling it.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=3))]
    outcome: Option<u8>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    target: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "alternate", value_parser = ["always-1", "always-2", "alternate", "random"])]
    policy: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

impl TraceArgs {
    fn params(&self) -> TraceParams {
        TraceParams {
            theta1: self.theta1,
            phi1: self.phi1,
            theta2: self.theta2,
            phi2: self.phi2,
            seed: self.seed,
            outcome: self.outcome.map(usize::from),
            target: self.target,
        }
    }
}

fn emit(doc: &ReportDocument, output: &Output) -> Result<(), String> {
    let format: Format = output.format.parse().map_err(|e| format!("{e}"))?;
    let text = render(doc, format);
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.command {
        Command::Demo(args) => (cmd_demo(&args.params()), &args.output),
        Command::Encode(args) => (cmd_encode(&args.params()), &args.output),
        Command::Decode(args) => (cmd_decode(&args.params()), &args.output),
        Command::Mc(args) => {
            let params = args.policy.parse::<TargetPolicy>().map(|policy| McParams {
                trials: args.trials,
                seed: args.seed,
                policy,
            });
            (params.and_then(|p| cmd_mc(&p)), &args.output)
        }
        Command::Verify(args) => {
            let params = VerifyParams {
                nodes: args.nodes,
                trials: args.trials,
                seed: args.seed,
            };
            (cmd_verify(&params), &args.output)
        }
    };
    let doc = match result {
        Ok(doc) => doc,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    if let Err(err) = emit(&doc, output) {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }
    for row in doc.failing_rows() {
        eprintln!(
            "FAIL {}: computed {} reference {} tolerance {}",
            row.name, row.computed, row.reference, row.tolerance
        );
    }
    ExitCode::from(doc.exit_code() as u8)
}
