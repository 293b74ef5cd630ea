use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qbc_cli::commands::{self, NogoOptions, Outcome};
use qbc_cli::config::{parse_strategy, ExperimentConfig, DEFAULT_CONFIG};

/// Monte Carlo harness for double-slit bit commitment.
///
/// Exit status: 0 on success or acceptance, 1 when the protocol rejects or a
/// check fails, 2 on usage or configuration errors.
#[derive(Debug, Parser)]
#[command(name = "qbc", version)]
struct Cli {
    /// TOML configuration file. Missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; `-` means stdout. Overrides `output_path`.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Override the Monte Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, env = "QBC_THREADS")]
    threads: Option<usize>,
    /// Print the full default configuration and exit.
    #[arg(long)]
    print_default_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct StrategyArg {
    /// Strategy label: honest-0, honest-1, fabricate-screen, fabricate-screen-blind,
    /// guess-slit, guess-slit-posterior, no-detection-<p>.
    #[arg(long)]
    strategy: Option<String>,
    /// Override `protocol.n_rounds`.
    #[arg(long)]
    n_rounds: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the screen densities as CSV.
    Pattern,
    /// Run one commit and unveil, writing line-delimited JSON records.
    Run {
        #[command(flatten)]
        strategy: StrategyArg,
        /// Leave Bob's secret configurations out of the records.
        #[arg(long)]
        hide_secrets: bool,
        /// Also write the verifier's checks as CSV.
        #[arg(long)]
        checks_csv: Option<PathBuf>,
    },
    /// Estimate a strategy's acceptance probability across round counts.
    BindingSweep {
        #[command(flatten)]
        strategy: StrategyArg,
        /// Round counts, comma separated. Overrides `sweep.n_values`.
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
    },
    /// Compare Bob's view of honest commitments to 0 and to 1.
    ConcealingTest {
        /// Override `concealing.n_rounds`.
        #[arg(long)]
        n_rounds: Option<usize>,
        /// Override the detector efficiency.
        #[arg(long)]
        efficiency: Option<f64>,
    },
    /// Build the local unitary that turns one purification into another.
    NogoDemo {
        /// Random states with a shared marginal instead of the Bell pair.
        #[arg(long)]
        random: bool,
        /// Subsystem dimensions for --random.
        #[arg(long, num_args = 2, value_names = ["DIM_A", "DIM_B"])]
        dims: Option<Vec<usize>>,
        /// Use states whose marginals differ; the construction must refuse.
        #[arg(long)]
        mismatched: bool,
        /// Also write the coefficient matrices and the unitary as CSV.
        #[arg(long)]
        matrices_csv: Option<PathBuf>,
    },
}

fn apply_strategy(cfg: &mut ExperimentConfig, arg: &StrategyArg) -> Result<()> {
    if let Some(label) = &arg.strategy {
        cfg.strategy = parse_strategy(label)?;
    }
    if let Some(n) = arg.n_rounds {
        cfg.protocol.n_rounds = n;
    }
    Ok(())
}

fn output(path: &str) -> Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {path}"))?,
        ))
    })
}

fn execute(cli: Cli) -> Result<Outcome> {
    if cli.print_default_config {
        print!("{DEFAULT_CONFIG}");
        return Ok(Outcome::Success);
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no subcommand given (try --help)");
    };
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
        cfg.concealing.trials = t;
    }
    if let Some(o) = &cli.out {
        cfg.output_path = o.clone();
    }
    match &command {
        Command::Run { strategy, .. } => apply_strategy(&mut cfg, strategy)?,
        Command::BindingSweep { strategy, n_values } => {
            apply_strategy(&mut cfg, strategy)?;
            if let Some(v) = n_values {
                cfg.sweep.n_values = v.clone();
            }
        }
        Command::ConcealingTest { n_rounds, efficiency } => {
            if let Some(n) = n_rounds {
                cfg.concealing.n_rounds = *n;
            }
            if let Some(e) = efficiency {
                cfg.optics.efficiency = *e;
            }
        }
        Command::Pattern | Command::NogoDemo { .. } => {}
    }
    cfg.validate()?;

    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }

    let out = output(&cfg.output_path)?;
    match command {
        Command::Pattern => commands::pattern(&cfg, out),
        Command::Run {
            hide_secrets,
            checks_csv,
            ..
        } => commands::run(&cfg, out, !hide_secrets, checks_csv.as_deref()),
        Command::BindingSweep { .. } => commands::sweep(&cfg, out),
        Command::ConcealingTest { .. } => commands::concealing(&cfg, out),
        Command::NogoDemo {
            random,
            dims,
            mismatched,
            matrices_csv,
        } => {
            let opts = NogoOptions {
                random,
                dims: dims.map(|d| (d[0], d[1])),
                mismatched,
            };
            commands::nogo(&cfg, out, &opts, matrices_csv.as_deref())
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().map(|e| e.kind()) == Some(io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>()
                .is_some_and(|e| matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe))
    })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        // A closed pipe (`qbc pattern | head`) is not a failure.
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
