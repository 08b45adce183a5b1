use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conformal_gap::harness::{
    parse_config, render_report, run_all, summary, Experiment, ExperimentConfig, HarnessError, IfsRef, ReportFormat,
    ResultBundle,
};
use conformal_gap::ifs::{Ifs, BUILTIN_NAMES};

/// Spectral gaps, Fourier decay and uncertainty norms for conformal IFSs.
///
/// Exit status is 0 when every verdict passes, 1 when one fails and 2 on error.
#[derive(Parser)]
#[command(name = "conformal-gap", version)]
struct Cli {
    /// Seed for stochastic experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file (a directory for `suite all`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IfsArg {
    /// Builtin name or path to a JSON/TOML system.
    #[arg(long, default_value = "gauss23")]
    ifs: String,
}

#[derive(Subcommand)]
enum Command {
    /// UNI margins between single letters.
    UniCheck(IfsArg),
    /// Build and verify the block partition.
    Partition {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        uni_delta: Option<f64>,
    },
    /// Decay of iterated transfer operators at s = r + ib.
    SpectralGap {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, value_delimiter = ',')]
        b: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Frostman exponents, Lyapunov exponent and entropy.
    Measure {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Windowed Fourier decay fit.
    Fourier {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        xi_min: Option<f64>,
        #[arg(long)]
        xi_max: Option<f64>,
        #[arg(long)]
        windows: Option<usize>,
    },
    /// Pair-fraction statistic of the ζ tables over regular words.
    Nonconc {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        blocks: Option<usize>,
        #[arg(long)]
        sigmas: Option<usize>,
    },
    /// Uncertainty norms of the attractor against itself.
    Fup {
        #[arg(long, default_value = "cantor3")]
        ifs: String,
        #[arg(long, value_delimiter = ',')]
        h_ladder: Option<Vec<f64>>,
        #[arg(long)]
        grid_per_h: Option<usize>,
    },
    /// A named suite, `all` suites, or a TOML experiment file.
    Suite {
        /// Suite name or `all`.
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        config: Option<PathBuf>,
    },
}

fn ifs_ref(spec: &str) -> Result<IfsRef, HarnessError> {
    if BUILTIN_NAMES.contains(&spec) {
        return Ok(IfsRef::Builtin(spec.to_string()));
    }
    Ifs::from_file(Path::new(spec)).map(IfsRef::Inline).map_err(|e| HarnessError::validation("ifs", e.to_string()))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn configs(cli: &Cli) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let base = |e: Experiment, ifs: Option<&str>| -> Result<ExperimentConfig, HarnessError> {
        let mut c = ExperimentConfig::defaults(e);
        c.seed = Some(cli.seed);
        if let Some(spec) = ifs {
            c.ifs = ifs_ref(spec)?;
        }
        Ok(c)
    };
    let cfg = match &cli.command {
        Command::UniCheck(a) => base(Experiment::UniCheck, Some(&a.ifs))?,
        Command::Partition { ifs, max_n, uni_delta } => {
            let mut c = base(Experiment::Partition, Some(&ifs.ifs))?;
            set(&mut c.max_n, *max_n);
            set(&mut c.uni_delta, *uni_delta);
            c
        }
        Command::SpectralGap { ifs, b, r, n_max, grid } => {
            let mut c = base(Experiment::SpectralGap, Some(&ifs.ifs))?;
            set(&mut c.b_values, b.clone());
            set(&mut c.r, *r);
            set(&mut c.n_max, *n_max);
            set(&mut c.grid, *grid);
            c
        }
        Command::Measure { ifs, tol } => {
            let mut c = base(Experiment::Measure, Some(&ifs.ifs))?;
            c.measure_tol = tol.or(c.measure_tol);
            c
        }
        Command::Fourier { ifs, xi_min, xi_max, windows } => {
            let mut c = base(Experiment::Fourier, Some(&ifs.ifs))?;
            set(&mut c.xi_min, *xi_min);
            set(&mut c.xi_max, *xi_max);
            set(&mut c.windows, *windows);
            c
        }
        Command::Nonconc { ifs, n, eps, blocks, sigmas } => {
            let mut c = base(Experiment::Nonconc, Some(&ifs.ifs))?;
            set(&mut c.word_length, *n);
            set(&mut c.eps, *eps);
            set(&mut c.blocks, *blocks);
            set(&mut c.sigmas, *sigmas);
            c
        }
        Command::Fup { ifs, h_ladder, grid_per_h } => {
            let mut c = base(Experiment::Fup, Some(ifs))?;
            set(&mut c.h_ladder, h_ladder.clone());
            set(&mut c.grid_per_h, *grid_per_h);
            c
        }
        Command::Suite { config: Some(path), .. } => {
            let text =
                std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            return Ok(vec![parse_config(&text)?]);
        }
        Command::Suite { name, .. } => match name.as_deref().unwrap_or("all") {
            "all" => return Experiment::SUITES.iter().map(|&e| base(e, None)).collect(),
            other => base(other.parse()?, None)?,
        },
    };
    Ok(vec![cfg])
}

fn write(cli: &Cli, bundles: &[ResultBundle]) -> Result<(), HarnessError> {
    let ext = match cli.format {
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    };
    for b in bundles {
        let text = render_report(b, cli.format)?;
        let target = match (&cli.out, bundles.len()) {
            (None, _) => None,
            (Some(p), 1) => Some(p.clone()),
            (Some(dir), _) => Some(dir.join(format!("{}.{ext}", b.config.experiment))),
        };
        match target.or_else(|| b.config.output.clone()) {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(e.to_string()))?;
                }
                std::fs::write(&path, text).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            }
            None => print!("{text}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfgs = match configs(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut bundles = Vec::new();
    let mut failed = false;
    for result in run_all(&cfgs, cli.threads) {
        match result {
            Ok(b) => {
                eprint!("{}", summary(&b));
                bundles.push(b);
            }
            Err(e) => {
                eprintln!("error: {e}");
                failed = true;
            }
        }
    }
    if let Err(e) = write(&cli, &bundles) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if failed {
        ExitCode::from(2)
    } else if bundles.iter().all(ResultBundle::all_pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
