use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use xbar_gnn::arch::CoreConfig;
use xbar_gnn::bench::{
    emit_json, emit_report, emit_sweep, run_dataset_comparison, run_scaling_sweep, run_taxi, verify, Config, Context,
    CorePreset,
};
use xbar_gnn::Error;

#[derive(Parser, Debug)]
#[command(version, about = "Crossbar GNN accelerator emulator and latency/power model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file; defaults are used for missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Node device geometry: centralized, decentralized or custom=<file>.
    #[arg(long, global = true)]
    core_preset: Option<String>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Taxi case study, both settings.
    Taxi,
    /// Centralized vs decentralized breakdown per dataset.
    Datasets,
    /// Latency/power as crossbar counts grow.
    Sweep,
    /// Oracle and invariant suites.
    Verify,
    /// Every scenario.
    Report,
}

fn load_config(cli: &Cli) -> Result<Config, Error> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(preset) = &cli.core_preset {
        match preset.as_str() {
            "centralized" => config.cores.preset = CorePreset::Centralized,
            "decentralized" => config.cores.preset = CorePreset::Decentralized,
            other => {
                let Some(file) = other.strip_prefix("custom=") else {
                    return Err(Error::Config(format!("unknown core preset {other:?}")));
                };
                config.cores.preset = CorePreset::Custom;
                config.cores.custom = Some(load_cores(Path::new(file))?);
            }
        }
    }
    config.validate()?;
    Ok(config)
}

fn load_cores(path: &Path) -> Result<CoreConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli, config: Config) -> Result<bool, Error> {
    if cli.command == Command::Verify {
        let summary = verify(&config)?;
        print!("{}", summary.summary());
        emit_json(&summary, &cli.out, "verify")?;
        return Ok(summary.passed());
    }
    let ctx = Context::new(config)?;
    let (taxi, datasets, sweep) = match cli.command {
        Command::Taxi => (true, false, false),
        Command::Datasets => (false, true, false),
        Command::Sweep => (false, false, true),
        _ => (true, true, true),
    };
    let ((t, d), s) = rayon::join(
        || {
            rayon::join(
                || taxi.then(|| run_taxi(&ctx)).transpose(),
                || datasets.then(|| run_dataset_comparison(&ctx)).transpose(),
            )
        },
        || sweep.then(|| run_scaling_sweep(&ctx)).transpose(),
    );
    let (t, d, s) = (t?, d?, s?);
    if let Some(r) = t {
        print!("{}", r.summary());
        emit_report(&r, &cli.out, "taxi")?;
    }
    if let Some(r) = d {
        print!("{}", r.summary());
        emit_report(&r, &cli.out, "datasets")?;
    }
    if let Some(r) = s {
        print!("{}", r.summary());
        emit_sweep(&r, &cli.out, "sweep")?;
    }
    if cli.command == Command::Report {
        let summary = verify(&ctx.config)?;
        print!("{}", summary.summary());
        emit_json(&summary, &cli.out, "verify")?;
        return Ok(summary.passed());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
