use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vbslab::report::{self, Command, Format, RunConfig};
use vbslab::{Distance, Sign};

#[derive(Parser, Debug)]
#[command(
    name = "vbslab",
    version,
    about = "Boundary effects on entanglement in the spin-1 VBS chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Left boundary distance N_l (a positive integer or "inf").
    #[arg(long, global = true, default_value = "1")]
    nl: Distance,

    /// Right boundary distance N_r (a positive integer or "inf").
    #[arg(long, global = true, default_value = "1")]
    nr: Distance,

    /// Boundary operator signs, left then right: pp, pm, mp or mm.
    #[arg(long, global = true, default_value = "pp", value_parser = parse_signs)]
    signs: (Sign, Sign),

    #[arg(long, global = true, default_value_t = 1)]
    lmin: u64,

    #[arg(long, global = true, default_value_t = 20)]
    lmax: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Markdown)]
    format: OutFormat,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comparison tolerance (x9 scale for `tables`).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Exponent K of the XX boundary term.
    #[arg(long, global = true, default_value_t = 1.0)]
    k: f64,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Nearest-neighbour negativity and realignment tables.
    Tables,
    /// Block entropy against L with its saturation value and approximations.
    EntropyScan,
    /// XX-chain boundary term beside the VBS boundary deviation.
    CompareXx,
    /// Run every internal consistency check.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OutFormat {
    Csv,
    Json,
    Markdown,
}

fn parse_signs(s: &str) -> Result<(Sign, Sign), String> {
    let sign = |c: char| match c {
        'p' | '+' => Ok(Sign::Plus),
        'm' | '-' => Ok(Sign::Minus),
        _ => Err(format!("expected two of p/m/+/-, got {s:?}")),
    };
    let chars: Vec<char> = s.chars().collect();
    match chars.as_slice() {
        [a, b] => Ok((sign(*a)?, sign(*b)?)),
        _ => Err(format!("expected two of p/m/+/-, got {s:?}")),
    }
}

impl Cli {
    fn run_config(&self) -> RunConfig {
        let command = match self.command {
            Cmd::Tables => Command::Tables,
            Cmd::EntropyScan => Command::EntropyScan,
            Cmd::CompareXx => Command::CompareXx,
            Cmd::Verify => Command::Verify,
        };
        RunConfig {
            command,
            left: self.nl,
            right: self.nr,
            sign_left: self.signs.0,
            sign_right: self.signs.1,
            l_min: self.lmin,
            l_max: self.lmax,
            format: match self.format {
                OutFormat::Csv => Format::Csv,
                OutFormat::Json => Format::Json,
                OutFormat::Markdown => Format::Markdown,
            },
            out: self.out.clone(),
            tol: self.tol,
            k: self.k,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.run_config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let report = match report::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match report::emit(&report, &cfg) {
        Ok(Some(text)) => print!("{text}"),
        Ok(None) => {}
        Err(e) => {
            eprintln!(
                "error: cannot write {}: {e}",
                cfg.out.as_ref().unwrap().display()
            );
            return ExitCode::from(2);
        }
    }
    for r in report.failed_checks() {
        eprintln!(
            "check failed: {} {:?} value={:e} tol={:e}",
            r.claim,
            r.inputs,
            r.value,
            r.tolerance.unwrap_or(f64::NAN)
        );
    }
    ExitCode::from(report.exit_code() as u8)
}
