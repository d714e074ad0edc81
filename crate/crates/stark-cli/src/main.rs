use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stark_cli::commands::{self, CliError, CliResult, FieldInput, PhiRequest, Report, ZetaMode, ZetaRequest};

#[derive(Parser, Debug)]
#[command(name = "stark", version, about = "p-adic Stark units of real quadratic fields: Shintani cones, zeta values and group-ring checks")]
struct Cli {
    /// Worker threads for the per-class and per-cone computations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct FieldArgs {
    /// One of the fifteen built-in examples.
    #[arg(long)]
    example: Option<u32>,
    /// Fundamental discriminant of the real quadratic field.
    #[arg(long)]
    d: Option<i64>,
    /// Integral modulus with HNF [[a, b], [0, c]], written a,b,c.
    #[arg(long, conflicts_with = "f_rational")]
    f_hnf: Option<String>,
    /// Modulus q·O for a rational q.
    #[arg(long)]
    f_rational: Option<String>,
    /// JSON literal {"d_k": .., "ideal": {"hnf": [[a,b],[0,c]], "scale": "p/q"}}.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl FieldArgs {
    fn input(&self) -> FieldInput {
        FieldInput {
            example: self.example,
            d: self.d,
            f_hnf: self.f_hnf.clone(),
            f_rational: self.f_rational.clone(),
            config: self.config.clone(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The continued-fraction cone fan of the base pair (or of every class with --p).
    Fan {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Partial zeta value of the base pair: exact at m <= 0 or p-adic at s = 1.
    Zeta {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum)]
        mode: ZetaMode,
        /// Non-positive integer point (exact mode).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "s1")]
        m: Option<i64>,
        /// Evaluate at s = 1 (p-adic mode).
        #[arg(long)]
        s1: bool,
        /// In exact mode: remove the Euler factors above p.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 10)]
        digits: u32,
        #[arg(long, default_value_t = 0)]
        root_choice: u8,
        #[arg(long, default_value_t = 0)]
        zeta_choice: usize,
    },
    /// The group-ring value at s = 1 modulo p^N.
    Phi {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long)]
        root_choice: Option<u8>,
        #[arg(long)]
        zeta_choice: Option<usize>,
        /// Compare with the example's published digits over all embedding choices.
        #[arg(long)]
        assert: bool,
    },
    /// Solve for the group-ring element A and derive d_f for built-in examples.
    Verify {
        /// Examples to check (default: all).
        #[arg(long = "example")]
        examples: Vec<u32>,
        /// Use the published index even where unit data are available.
        #[arg(long)]
        no_units: bool,
        /// Also re-solve with inputs truncated to this many decimals.
        #[arg(long)]
        truncate: Option<usize>,
    },
    /// The integers c_1, ..., c_n.
    Cn {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Series degree and working precision for N digits.
    Plan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        digits: u32,
    },
    /// Quick run of the reproducibility checks; exits 0 iff all pass.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Writes to stdout, ignoring a closed pipe (e.g. `stark ... | head`).
fn out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn emit<T: Report>(report: &T, json: bool) {
    if json {
        out(&format!("{}\n", report.json()));
    } else {
        out(&report.text());
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot start {n} threads: {e}")))?;
    }
    let json = cli.json;
    match cli.command {
        Command::Fan { field, p } => emit(&commands::fan(&field.input(), p)?, json),
        Command::Zeta { field, mode, m, s1, p, digits, root_choice, zeta_choice } => {
            let req = ZetaRequest { mode, m, s1, p, digits, root_choice, zeta_choice };
            emit(&commands::zeta(&field.input(), &req)?, json);
        }
        Command::Phi { field, p, digits, root_choice, zeta_choice, assert } => {
            let report = commands::phi(&field.input(), &PhiRequest { p, digits, root_choice, zeta_choice, assert })?;
            emit(&report, json);
            return Ok(report.passed());
        }
        Command::Verify { examples, no_units, truncate } => {
            let report = commands::verify(&examples, !no_units, truncate)?;
            emit(&report, json);
            return Ok(report.passed());
        }
        Command::Cn { p, n } => emit(&commands::cn(p, n)?, json),
        Command::Plan { p, digits } => emit(&commands::plan(p, digits)?, json),
        Command::Selftest { seed } => {
            let report = commands::selftest(seed)?;
            emit(&report, json);
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            out(&format!("{}\n", CliError::usage(message.trim()).to_json()));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            out(&format!("{}\n", e.to_json()));
            ExitCode::from(1)
        }
    }
}
