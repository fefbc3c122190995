//! Bundled runs behind `rsos reproduce fig1|fig2|fig3`.

use std::path::Path;

use clap::ValueEnum;
use rsos_core::anyon::measure_yu;
use rsos_core::oracle::ground_state;
use rsos_core::Boundary;
use serde::Serialize;

use crate::artifacts::Artifacts;
use crate::commands::{measure, run_optimize, write_optimize, ParamsFile};
use crate::config::{Chain, ExperimentConfig};
use crate::error::{CliError, Status};
use crate::fan_out;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Relative energy error against depth, open chains p = 4, 5.
    Fig1,
    /// Parity profiles and site occupations, open chains p = 4..8.
    Fig2,
    /// Energies and ⟨Yu⟩, periodic chains p = 4, 5.
    Fig3,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    fn boundary(self) -> Boundary {
        match self {
            Figure::Fig3 => Boundary::Periodic,
            _ => Boundary::Open,
        }
    }

    fn default_qubits(self) -> usize {
        match self {
            Figure::Fig2 => 18,
            _ => 12,
        }
    }

    fn default_ps(self) -> Vec<usize> {
        match self {
            Figure::Fig2 => (4..=8).collect(),
            _ => vec![4, 5],
        }
    }
}

/// Knobs a recipe accepts from the command line.
#[derive(Debug, Clone, Default)]
pub struct RecipeOptions {
    pub qubits: Option<usize>,
    pub ps: Vec<usize>,
    pub target_rel_error: Option<f64>,
    pub max_iters_per_stage: Option<usize>,
    pub overshoot: bool,
    pub seed: Option<u64>,
    pub jobs: usize,
}

#[derive(Serialize)]
struct Recipe<'a> {
    figure: &'a str,
    run: &'a [ExperimentConfig],
}

pub fn configs(figure: Figure, opts: &RecipeOptions) -> Vec<ExperimentConfig> {
    let ps = if opts.ps.is_empty() { figure.default_ps() } else { opts.ps.clone() };
    ps.into_iter()
        .map(|p| {
            let mut c = ExperimentConfig::generic(p, opts.qubits.unwrap_or(figure.default_qubits()), figure.boundary());
            c.optimizer.overshoot = opts.overshoot;
            if let Some(t) = opts.target_rel_error {
                c.optimizer.target_rel_error = t;
            }
            if let Some(m) = opts.max_iters_per_stage {
                c.optimizer.max_iters_per_stage = m;
            }
            c.seed = opts.seed.unwrap_or(0);
            c
        })
        .collect()
}

/// One optimized-and-measured chain of a recipe.
struct RunResult {
    p: usize,
    status: Status,
    stages: Vec<(usize, usize, f64, Option<f64>)>,
    parity: Vec<f64>,
    site_probs: Vec<Vec<f64>>,
    yu: Option<(f64, f64, f64)>,
}

fn run_one(config: &ExperimentConfig, dir: &Path) -> Result<RunResult, CliError> {
    let exp = config.resolve()?;
    let Chain::Generic(cfg) = &exp.chain else { unreachable!("recipes use the generic encoding") };
    let text = config.to_toml()?;

    let mut art = Artifacts::create(&dir.join("optimize"))?;
    art.text("config.toml", &text)?;
    let (out, target) = run_optimize(&exp)?;
    let status = write_optimize(&exp, &out, target, &mut art)?;
    art.finish("optimize", &text, config.seed)?;

    let params = ParamsFile {
        qubits: out.layout.qubits(),
        layers: out.layout.layers(),
        bond_order: out.layout.bond_order(),
        energy: out.energy,
        params: out.params.clone(),
    };
    let mut art = Artifacts::create(&dir.join("measure"))?;
    art.text("config.toml", &text)?;
    let report = measure(&exp, &params, &mut art)?.expect("generic encoding has a full report");
    art.finish("measure", &text, config.seed)?;

    let yu = match (report.yu, report.yu_imag) {
        (Some(re), Some(im)) => {
            let exact = ground_state(cfg, None)?;
            Some((measure_yu(&exact.embed(&cfg.encoding)?, cfg)?.re, re, im))
        }
        _ => None,
    };
    Ok(RunResult {
        p: config.p,
        status,
        stages: out.history.stages.iter().map(|s| (s.stage, s.layers, s.final_energy, s.rel_error)).collect(),
        parity: report.parity_profile,
        site_probs: report.site_probs,
        yu,
    })
}

/// Runs every chain of the figure into `root/p<p>/` and writes the combined tables into `root`.
pub fn reproduce(figure: Figure, opts: &RecipeOptions, root: &Path) -> Result<Status, CliError> {
    let configs = configs(figure, opts);
    for c in &configs {
        c.resolve()?;
    }
    let results = fan_out(&configs, opts.jobs, |c| run_one(c, &root.join(format!("p{}", c.p))));
    let results: Vec<RunResult> = results.into_iter().collect::<Result<_, _>>()?;

    let recipe = toml::to_string(&Recipe { figure: figure.name(), run: &configs })
        .map_err(|e| CliError::Invalid(format!("recipe serialization: {e}")))?;
    let mut art = Artifacts::create(root)?;
    art.text("config.toml", &recipe)?;
    match figure {
        Figure::Fig1 | Figure::Fig3 => {
            art.csv(
                &format!("{}.csv", figure.name()),
                &["p", "stage", "layers", "energy", "rel_error"],
                results.iter().flat_map(|r| r.stages.iter().map(move |&(s, n, e, rel)| (r.p, s, n, e, rel))),
            )?;
        }
        Figure::Fig2 => {}
    }
    if figure == Figure::Fig3 {
        art.csv(
            "fig3_yu.csv",
            &["p", "yu_exact", "yu_vqe", "yu_vqe_imag", "yu_expected"],
            results.iter().filter_map(|r| {
                let expected = 2.0 * (std::f64::consts::PI / (r.p as f64 + 1.0)).cos();
                r.yu.map(|(exact, re, im)| (r.p, exact, re, im, expected))
            }),
        )?;
    }
    art.csv(
        &format!("{}_parity.csv", figure.name()),
        &["p", "site", "value"],
        results.iter().flat_map(|r| r.parity.iter().enumerate().map(move |(j, &v)| (r.p, j, v))),
    )?;
    art.csv(
        &format!("{}_site_probs.csv", figure.name()),
        &["p", "site", "a", "prob"],
        results.iter().flat_map(|r| {
            r.site_probs
                .iter()
                .enumerate()
                .flat_map(move |(j, row)| row.iter().enumerate().map(move |(a, &v)| (r.p, j, a + 1, v)))
        }),
    )?;
    art.finish(&format!("reproduce {}", figure.name()), &recipe, opts.seed.unwrap_or(0))?;
    let all_done = results.iter().all(|r| r.status == Status::Done);
    Ok(if all_done { Status::Done } else { Status::NotConverged })
}
