use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use hyperspars::driver::SidePolicy;
use hyperspars::reference::GeneratorSpec;
use hyperspars::WeightMode;
use hyperspars_cli::{
    cmd_check_cert, cmd_exact, cmd_gen, cmd_reduce, cmd_solve, load_constants, parse_model,
    SolveOptions, EXIT_INPUT, SEED_ENV,
};

#[derive(Parser)]
#[command(
    name = "hyperspars",
    version,
    about = "Directed sparsest cut and expansion on directed hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sparsity,
    Expansion,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Both,
    In,
    Out,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the sparsest cut and try to certify a lower bound.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "sparsity")]
        mode: Mode,
        /// Probe a single alpha (with --no-search) or cap the search from above.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        no_search: bool,
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
        #[arg(long)]
        t_cap: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        side: SideArg,
        #[arg(long)]
        json: bool,
        /// JSON file overriding oracle constants.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Exact optimum by enumeration (at most 24 vertices).
    Exact {
        input: PathBuf,
        /// A `solve --json` report to compare against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a random instance in DHG format.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long, default_value_t = 1)]
        kappa: u64,
        #[arg(long, default_value_t = 1)]
        weight_lo: u64,
        #[arg(long, default_value_t = 4)]
        weight_hi: u64,
        /// uniform, planted or expander
        #[arg(long, default_value = "uniform")]
        model: String,
        #[arg(long, default_value_t = 0.5)]
        balance: f64,
        #[arg(long, default_value_t = 4)]
        inside_w: u64,
        #[arg(long, default_value_t = 1)]
        crossing_w: u64,
        #[arg(long, env = SEED_ENV)]
        seed: Option<u64>,
    },
    /// Re-verify the certificates stored in a solve report.
    CheckCert { report: PathBuf, input: PathBuf },
    /// Print the directed-graph reduction of a hypergraph.
    Reduce { input: PathBuf },
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| anyhow::anyhow!("a seed is required: pass --seed or set {SEED_ENV}"))
}

fn run(cli: Cli) -> Result<i32> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Solve {
            input,
            mode,
            alpha,
            no_search,
            seed,
            t_cap,
            side,
            json,
            constants,
        } => {
            let opts = SolveOptions {
                mode: match mode {
                    Mode::Sparsity => WeightMode::Sparsity,
                    Mode::Expansion => WeightMode::Expansion,
                },
                alpha,
                no_search,
                seed: require_seed(seed)?,
                t_cap,
                side: match side {
                    SideArg::Both => SidePolicy::Both,
                    SideArg::In => SidePolicy::ZeroIn,
                    SideArg::Out => SidePolicy::ZeroOut,
                },
                constants: constants.as_deref().map(load_constants).transpose()?,
            };
            cmd_solve(&input, &opts, json, &mut out)
        }
        Command::Exact {
            input,
            compare,
            json,
        } => cmd_exact(&input, compare.as_deref(), json, &mut out),
        Command::Gen {
            n,
            m,
            r_max,
            kappa,
            weight_lo,
            weight_hi,
            model,
            balance,
            inside_w,
            crossing_w,
            seed,
        } => {
            let spec = GeneratorSpec {
                n,
                m,
                r_max,
                kappa,
                weight_range: (weight_lo, weight_hi),
                model: parse_model(&model, balance, inside_w, crossing_w)?,
                seed: require_seed(seed)?,
            };
            cmd_gen(&spec, &mut out)
        }
        Command::CheckCert { report, input } => cmd_check_cert(&report, &input, &mut out),
        Command::Reduce { input } => cmd_reduce(&input, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
