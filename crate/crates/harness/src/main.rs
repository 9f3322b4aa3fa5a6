use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contilab::{list_experiments, registry, run_experiment, Config, HarnessError, RunFlags};

#[derive(Parser)]
#[command(name = "contilab", version, about = "Run contilab experiments and write CSV results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments.
    List {
        /// Also print each experiment's parameters and defaults.
        #[arg(long)]
        verbose: bool,
    },
    /// Run one experiment. Any parameter can be set with --key=value.
    Run {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        plot: bool,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Read parameters from a key = value file before applying flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Validate the configuration without running.
        #[arg(long)]
        dry_run: bool,
        /// Parameter override, key=value. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

const OWN_FLAGS: [&str; 7] = ["out", "plot", "trials", "seed", "config", "dry-run", "set"];

/// Rewrites `--key=value` for experiment parameters into `--set key=value`.
fn rewrite_args(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    for a in args {
        if let Some((k, v)) = a.strip_prefix("--").and_then(|r| r.split_once('=')) {
            if !OWN_FLAGS.contains(&k) {
                out.push("--set".to_string());
                out.push(format!("{k}={v}"));
                continue;
            }
        }
        out.push(a);
    }
    out
}

fn list(verbose: bool) {
    for e in registry() {
        println!("{:<22} {}", e.name(), e.about());
        if verbose {
            for line in e.defaults().render().lines() {
                println!("    {line}");
            }
        }
    }
}

fn run(cmd: Command) -> Result<(), HarnessError> {
    let Command::Run { name, out, plot, trials, seed, config, dry_run, set } = cmd else {
        unreachable!("list is handled by the caller");
    };
    let mut overrides = Vec::new();
    if let Some(path) = config {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| HarnessError::Usage(format!("cannot read {}: {e}", path.display())))?;
        overrides.extend(Config::parse(&text)?);
    }
    for s in set {
        let (k, v) = s.split_once('=').ok_or_else(|| HarnessError::Usage(format!("expected key=value, got `{s}`")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(t) = trials {
        overrides.push(("trials".into(), t.to_string()));
    }
    if let Some(s) = seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    let paths = run_experiment(&name, &overrides, &out, RunFlags { plot, dry_run })?;
    if dry_run {
        println!("{name}: configuration is valid");
    }
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn configure_threads() -> Result<(), HarnessError> {
    let Ok(v) = std::env::var("CONTILAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| HarnessError::Usage(format!("CONTILAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| HarnessError::Usage(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse_from(rewrite_args(std::env::args()));
    let result = configure_threads().and_then(|()| match cli.command {
        Command::List { verbose } => {
            list(verbose);
            debug_assert_eq!(list_experiments().len(), registry().len());
            Ok(())
        }
        cmd => run(cmd),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contilab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
