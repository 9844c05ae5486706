//! Command-line calculator for the `continuum` crate: Fermat-real
//! arithmetic with nilpotent infinitesimals, the ultrapower sandbox with
//! its filter oracle, and graph emission.

mod errors;
mod lex;
mod parse;
mod plot;
mod render;
mod session;

use std::io::{BufRead, IsTerminal, Write};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use continuum::rational::Mode;
use continuum::ultrapower::Strategy;

use plot::PlotFormat;
use session::Session;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    PreferIn,
    PreferOut,
    EvensFirst,
    OddsFirst,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

/// Exact infinitesimal calculator: nilpotent Fermat reals and a symbolic
/// Cauchy-sequence ultrapower.
#[derive(Parser, Debug)]
#[command(name = "continuum", version, about)]
struct Args {
    /// Scalar arithmetic mode.
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,

    /// Commitment strategy of the dominance oracle.
    #[arg(long, value_enum, default_value = "prefer-in")]
    strategy: StrategyArg,

    /// Evaluate a file of commands instead of reading standard input.
    #[arg(long)]
    batch: Option<String>,

    /// Output format for plot emission.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Echo inputs and frame outputs the way the reference session does.
    #[arg(long)]
    transcript: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = match args.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Approx => Mode::Approx,
    };
    let strategy = match args.strategy {
        StrategyArg::PreferIn => Strategy::PreferIn,
        StrategyArg::PreferOut => Strategy::PreferOut,
        StrategyArg::EvensFirst => Strategy::EvensFirst,
        StrategyArg::OddsFirst => Strategy::OddsFirst,
    };
    let format = match args.format {
        FormatArg::Csv => PlotFormat::Csv,
        FormatArg::Svg => PlotFormat::Svg,
    };
    let mut session = Session::new(mode, strategy, format, args.transcript);

    match args.batch {
        Some(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("io error: {path}: {e}");
                    return ExitCode::from(3);
                }
            };
            run_lines(&mut session, text.lines())
        }
        None => {
            let stdin = std::io::stdin();
            let interactive = stdin.is_terminal();
            loop {
                if interactive {
                    print!("> ");
                    let _ = std::io::stdout().flush();
                }
                let mut line = String::new();
                match stdin.lock().read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {}
                    Err(e) => {
                        eprintln!("io error: {e}");
                        return ExitCode::from(3);
                    }
                }
                match session.eval_line(&line) {
                    Ok(lines) => {
                        for l in lines {
                            println!("{l}");
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        // Piped input fails fast with the error's exit code;
                        // interactive sessions report and continue.
                        if !interactive {
                            return ExitCode::from(e.exit_code() as u8);
                        }
                    }
                }
            }
            ExitCode::SUCCESS
        }
    }
}

fn run_lines<'i>(session: &mut Session, lines: impl Iterator<Item = &'i str>) -> ExitCode {
    for line in lines {
        match session.eval_line(line) {
            Ok(out) => {
                for l in out {
                    println!("{l}");
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        }
    }
    ExitCode::SUCCESS
}
