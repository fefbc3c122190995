//! `rsos`: config-driven runs of the RSOS chain simulator.
//!
//! Every run writes into its own directory: the resolved `config.toml`, the
//! command's CSV/JSON artifacts and a `manifest.json` with the config hash,
//! crate versions and seed.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;
pub mod recipes;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::artifacts::Artifacts;
use crate::commands::ParamsFile;
use crate::config::ExperimentConfig;
use crate::error::{batch_exit_code, CliError, Status};
use crate::recipes::{Figure, RecipeOptions};

#[derive(Debug, Parser)]
#[command(name = "rsos", version, about = "RSOS anyonic chains on qubits: exact solves, VQE and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Temperley-Lieb and braid relation residues of the chain generators.
    VerifyAlgebra(RunArgs),
    /// Exact ground energy and spectrum in the constrained basis.
    Exact(RunArgs),
    /// Euler-Cartan VQE with layer growth.
    Optimize(RunArgs),
    /// Parity profile, site occupations, sector weight and ⟨Yu⟩ of a trained circuit.
    Measure(ParamsArgs),
    /// OpenQASM 2.0 (u3/cx) export of a trained circuit.
    ExportCircuit(ParamsArgs),
    /// Bundled reproduction runs.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Experiment TOML; repeat for several independent runs.
    #[arg(long, required = true)]
    pub config: Vec<PathBuf>,
    /// Overrides `output_dir`; with several configs each gets a subdirectory named after its file.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Configs processed concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Keep adding layers after the target error is reached.
    #[arg(long)]
    pub overshoot: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Trained parameters; defaults to `<run dir>/optimize/params.json`.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Defaults to `reproduce/<figure>`.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub overshoot: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Register size instead of the figure's own.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Restrict to these p values.
    #[arg(long = "p", value_delimiter = ',')]
    pub ps: Vec<usize>,
    /// Relative energy error that ends the layer growth.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub max_iters_per_stage: Option<usize>,
}

/// Applies `f` to every item on up to `jobs` threads; results keep input order.
pub fn fan_out<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every item ran")).collect()
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

fn run_dir(args: &RunArgs, config: &ExperimentConfig, path: &Path) -> PathBuf {
    match (&args.output_dir, &config.output_dir) {
        (Some(base), _) if args.config.len() > 1 => base.join(stem(path)),
        (Some(base), _) => base.clone(),
        (None, Some(dir)) => dir.clone(),
        (None, None) => PathBuf::from("runs").join(stem(path)),
    }
}

fn run_config(command: &Command, args: &RunArgs, params: Option<&Path>, path: &Path) -> Result<(Status, String), CliError> {
    let mut config = ExperimentConfig::load(path)?;
    config.optimizer.overshoot |= args.overshoot;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let root = run_dir(args, &config, path);
    // the output location is not part of the experiment
    config.output_dir = None;
    let exp = config.resolve()?;
    let text = config.to_toml()?;
    let (name, sub) = match command {
        Command::VerifyAlgebra(_) => ("verify-algebra", "verify-algebra"),
        Command::Exact(_) => ("exact", "exact"),
        Command::Optimize(_) => ("optimize", "optimize"),
        Command::Measure(_) => ("measure", "measure"),
        Command::ExportCircuit(_) => ("export-circuit", "circuit"),
        Command::Reproduce(_) => unreachable!("recipes do not read configs"),
    };
    let load_params = || {
        let default = root.join("optimize").join("params.json");
        ParamsFile::load(params.unwrap_or(&default))
    };
    let mut art = Artifacts::create(&root.join(sub))?;
    art.text("config.toml", &text)?;
    let (status, line) = match command {
        Command::VerifyAlgebra(_) => {
            let r = commands::verify(&exp, &mut art)?;
            (Status::Done, format!("max deviation {:.3e}", r.max_deviation()))
        }
        Command::Exact(_) => (Status::Done, format!("E_T = {:.15}", commands::exact(&exp, &mut art)?)),
        Command::Optimize(_) => {
            let (out, target) = commands::run_optimize(&exp)?;
            let status = commands::write_optimize(&exp, &out, target, &mut art)?;
            let rel = out.rel_error.map(|r| format!(", rel. error {r:.3e}")).unwrap_or_default();
            (status, format!("E = {:.12} with {} layers{rel}", out.energy, out.layout.layers()))
        }
        Command::Measure(_) => {
            commands::measure(&exp, &load_params()?, &mut art)?;
            (Status::Done, "observables written".into())
        }
        Command::ExportCircuit(_) => {
            commands::export(&exp, &load_params()?, &mut art)?;
            (Status::Done, "circuit.qasm written".into())
        }
        Command::Reproduce(_) => unreachable!(),
    };
    let dir = art.finish(name, &text, config.seed)?;
    Ok((status, format!("{line} -> {}", dir.display())))
}

fn run_batch(command: &Command, args: &RunArgs, params: Option<&Path>) -> ExitCode {
    if params.is_some() && args.config.len() > 1 {
        eprintln!("error: --params needs a single --config");
        return ExitCode::from(1);
    }
    let results = fan_out(&args.config, args.jobs, |path| run_config(command, args, params, path));
    for (path, r) in args.config.iter().zip(&results) {
        match r {
            Ok((Status::Done, line)) => println!("{}: {line}", path.display()),
            Ok((Status::NotConverged, line)) => println!("{}: not converged: {line}", path.display()),
            Err(e) => eprintln!("{}: error: {e}", path.display()),
        }
    }
    let statuses: Vec<Result<Status, CliError>> = results.into_iter().map(|r| r.map(|(s, _)| s)).collect();
    batch_exit_code(&statuses)
}

/// Runs a parsed command line; the exit code is 1 for invalid input,
/// 2 for numerical failure and 3 when an optimization missed its target.
pub fn run(cli: Cli) -> ExitCode {
    match &cli.command {
        Command::VerifyAlgebra(a) | Command::Exact(a) | Command::Optimize(a) => run_batch(&cli.command, a, None),
        Command::Measure(a) | Command::ExportCircuit(a) => run_batch(&cli.command, &a.run, a.params.as_deref()),
        Command::Reproduce(a) => {
            let opts = RecipeOptions {
                qubits: a.qubits,
                ps: a.ps.clone(),
                target_rel_error: a.target,
                max_iters_per_stage: a.max_iters_per_stage,
                overshoot: a.overshoot,
                seed: a.seed,
                jobs: a.jobs,
            };
            let root = a.output_dir.clone().unwrap_or_else(|| PathBuf::from("reproduce").join(a.figure.name()));
            let result = recipes::reproduce(a.figure, &opts, &root);
            match &result {
                Ok(Status::Done) => println!("{} -> {}", a.figure.name(), root.display()),
                Ok(Status::NotConverged) => println!("{}: not every run converged -> {}", a.figure.name(), root.display()),
                Err(e) => eprintln!("error: {e}"),
            }
            batch_exit_code(&[result])
        }
    }
}
