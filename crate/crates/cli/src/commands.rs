//! Subcommand bodies. Each takes a validated experiment and writes into `Artifacts`.

use std::path::Path;

use rsos_core::ansatz::{apply_ansatz, AnsatzLayout, BondOrder};
use rsos_core::anyon::{
    build_tci_hamiltonian, measure_yu, tci_ground_energy, verify_algebra, verify_tci_algebra, AlgebraReport, TciChain,
};
use rsos_core::observables::ObservableReport;
use rsos_core::oracle::{enumerate_basis, ground_state, rsos_spectrum, DENSE_LIMIT};
use rsos_core::vqe::{optimize_with_growth, Problem, VqeOutcome};
use rsos_core::{ChainConfig, Error, Statevector};
use serde::{Deserialize, Serialize};

use crate::artifacts::Artifacts;
use crate::config::{Chain, Experiment};
use crate::error::{CliError, Status};

/// Trained circuit as written by `optimize` and read by `measure` / `export-circuit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub qubits: usize,
    pub layers: usize,
    pub bond_order: BondOrder,
    pub energy: f64,
    pub params: Vec<f64>,
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn layout(&self) -> Result<AnsatzLayout, CliError> {
        let layout = AnsatzLayout::new(self.qubits, self.layers)?.with_bond_order(self.bond_order);
        layout.check_params(&self.params)?;
        Ok(layout)
    }

    fn state(&self, exp: &Experiment) -> Result<Statevector, CliError> {
        if self.qubits != exp.qubits() {
            return Err(CliError::Invalid(format!(
                "params are for {} qubits, config has {}",
                self.qubits,
                exp.qubits()
            )));
        }
        Ok(apply_ansatz(&self.params, &self.layout()?, &initial_state(exp)?)?)
    }
}

/// Compact encoding: labels 1 and 4 are spin down (bit 1).
fn tci_product(labels: &[usize]) -> Result<Statevector, Error> {
    let index = labels
        .iter()
        .enumerate()
        .filter(|(_, &a)| a == 1 || a == 4)
        .fold(0usize, |acc, (j, _)| acc | 1 << j);
    Statevector::basis(labels.len(), index)
}

fn initial_state(exp: &Experiment) -> Result<Statevector, CliError> {
    Ok(match &exp.chain {
        Chain::Generic(c) => Statevector::from_rsos_product(&exp.labels, &c.encoding)?,
        Chain::Tci(_) => tci_product(&exp.labels)?,
    })
}

/// Exact reference energy, or `None` when the compact chain is too long for a dense solve.
pub fn target_energy(exp: &Experiment) -> Result<Option<f64>, CliError> {
    match &exp.chain {
        Chain::Generic(c) => Ok(Some(ground_state(c, exp.boundary_values())?.energy)),
        Chain::Tci(c) => match tci_ground_energy(c) {
            Ok(e) => Ok(Some(e)),
            Err(Error::UnsupportedOperation(_)) => Ok(None),
            Err(e) => Err(e.into()),
        },
    }
}

fn problem(exp: &Experiment, target: Option<f64>) -> Result<Problem, CliError> {
    Ok(match &exp.chain {
        Chain::Generic(c) => Problem::for_chain(c, Some(&exp.labels), target)?,
        Chain::Tci(c) => Problem {
            terms: build_tci_hamiltonian(c)?,
            initial: tci_product(&exp.labels)?,
            target_energy: target,
        },
    })
}

fn generic_twin(c: &TciChain) -> Result<ChainConfig, CliError> {
    Ok(ChainConfig::new(4, c.sites, c.boundary)?)
}

#[derive(Serialize)]
struct AlgebraSummary<'a> {
    encoding: &'a str,
    max_deviation: f64,
    relations: &'a AlgebraReport,
}

pub fn verify(exp: &Experiment, art: &mut Artifacts) -> Result<AlgebraReport, CliError> {
    let (report, encoding) = match &exp.chain {
        Chain::Generic(c) => (verify_algebra(c)?, "generic"),
        Chain::Tci(c) => (verify_tci_algebra(c)?, "tci-appendix"),
    };
    art.json(
        "summary.json",
        &AlgebraSummary { encoding, max_deviation: report.max_deviation(), relations: &report },
    )?;
    Ok(report)
}

#[derive(Serialize)]
struct ExactSummary {
    energy: f64,
    dimension: usize,
    residual: Option<f64>,
    multiplicity: Option<usize>,
    spectrum_levels: usize,
    yu: Option<f64>,
    yu_expected: Option<f64>,
    /// Generic-encoding energy of the same chain, for the compact encoding.
    generic_energy: Option<f64>,
}

pub fn exact(exp: &Experiment, art: &mut Artifacts) -> Result<f64, CliError> {
    let summary = match &exp.chain {
        Chain::Generic(c) => {
            let gs = ground_state(c, exp.boundary_values())?;
            let basis = enumerate_basis(c, exp.boundary_values())?;
            let spectrum = if basis.len() <= DENSE_LIMIT { rsos_spectrum(c, &basis)? } else { Vec::new() };
            art.csv("spectrum.csv", &["index", "energy"], spectrum.iter().enumerate())?;
            let yu = if c.is_periodic() { Some(measure_yu(&gs.embed(&c.encoding)?, c)?.re) } else { None };
            ExactSummary {
                energy: gs.energy,
                dimension: gs.dimension,
                residual: Some(gs.residual),
                multiplicity: Some(gs.multiplicity),
                spectrum_levels: spectrum.len(),
                yu,
                yu_expected: yu.map(|_| c.dynkin.loop_weight()),
                generic_energy: None,
            }
        }
        Chain::Tci(c) => {
            let energy = tci_ground_energy(c)?;
            let dimension = (0..1usize << c.sites).filter(|&i| c.is_physical(i)).count();
            ExactSummary {
                energy,
                dimension,
                residual: None,
                multiplicity: None,
                spectrum_levels: 0,
                yu: None,
                yu_expected: None,
                generic_energy: Some(ground_state(&generic_twin(c)?, None)?.energy),
            }
        }
    };
    art.json("summary.json", &summary)?;
    Ok(summary.energy)
}

/// Runs the growth schedule against the exact target (when available).
pub fn run_optimize(exp: &Experiment) -> Result<(VqeOutcome, Option<f64>), CliError> {
    let target = target_energy(exp)?;
    let outcome = optimize_with_growth(&problem(exp, target)?, &exp.config.optimizer_config())?;
    Ok((outcome, target))
}

#[derive(Serialize)]
struct OptimizeSummary {
    energy: f64,
    target_energy: Option<f64>,
    rel_error: Option<f64>,
    target_rel_error: f64,
    converged: bool,
    layers: usize,
    parameters: usize,
    stages: usize,
    total_iterations: usize,
}

#[derive(Serialize)]
struct Timing {
    stage_wall_time_s: Vec<f64>,
    total_s: f64,
}

pub fn write_optimize(
    exp: &Experiment,
    out: &VqeOutcome,
    target: Option<f64>,
    art: &mut Artifacts,
) -> Result<Status, CliError> {
    let params = ParamsFile {
        qubits: out.layout.qubits(),
        layers: out.layout.layers(),
        bond_order: out.layout.bond_order(),
        energy: out.energy,
        params: out.params.clone(),
    };
    art.json("params.json", &params)?;
    art.csv(
        "iterations.csv",
        &["stage", "iteration", "energy", "rel_error", "grad_norm"],
        &out.history.iterations,
    )?;
    art.csv(
        "stages.csv",
        &["stage", "layers", "iterations", "start_energy", "final_energy", "rel_error", "stop", "accepted", "gradient_check"],
        out.history.stages.iter().map(|s| {
            (s.stage, s.layers, s.iterations, s.start_energy, s.final_energy, s.rel_error, s.stop, s.accepted, s.gradient_check)
        }),
    )?;
    art.json(
        "summary.json",
        &OptimizeSummary {
            energy: out.energy,
            target_energy: target,
            rel_error: out.rel_error,
            target_rel_error: exp.config.optimizer.target_rel_error,
            converged: out.converged,
            layers: out.layout.layers(),
            parameters: out.params.len(),
            stages: out.history.stages.len(),
            total_iterations: out.history.iterations.len(),
        },
    )?;
    let stage_wall_time_s: Vec<f64> = out.history.stages.iter().map(|s| s.wall_time_s).collect();
    let total_s = stage_wall_time_s.iter().sum();
    art.json("timing.json", &Timing { stage_wall_time_s, total_s })?;
    Ok(if out.converged { Status::Done } else { Status::NotConverged })
}

#[derive(Serialize)]
struct MeasureSummary {
    energy: f64,
    target_energy: Option<f64>,
    rel_error: Option<f64>,
    sector_overlap: f64,
    min_alternating_parity: Option<f64>,
    max_disallowed: Option<f64>,
    disallowed: Option<Vec<f64>>,
    yu: Option<f64>,
    yu_imag: Option<f64>,
    yu_expected: Option<f64>,
}

/// Observables of the trained state; `None` for the compact encoding, which only reports energy and overlap.
pub fn measure(exp: &Experiment, params: &ParamsFile, art: &mut Artifacts) -> Result<Option<ObservableReport>, CliError> {
    let state = params.state(exp)?;
    let target = target_energy(exp)?;
    let rel = |e: f64| target.map(|t| (e / t - 1.0).abs());
    let (summary, report) = match &exp.chain {
        Chain::Generic(c) => {
            let r = ObservableReport::measure(&state, c)?;
            art.csv("parity_profile.csv", &["site", "value"], r.parity_profile.iter().enumerate())?;
            art.csv(
                "site_probs.csv",
                &["site", "a", "prob"],
                r.site_probs
                    .iter()
                    .enumerate()
                    .flat_map(|(j, row)| row.iter().enumerate().map(move |(a, &p)| (j, a + 1, p))),
            )?;
            let summary = MeasureSummary {
                energy: r.energy,
                target_energy: target,
                rel_error: rel(r.energy),
                sector_overlap: r.sector_overlap,
                min_alternating_parity: Some(r.min_alternating_parity()),
                max_disallowed: Some(r.max_disallowed()),
                disallowed: Some(r.disallowed.clone()),
                yu: r.yu,
                yu_imag: r.yu_imag,
                yu_expected: r.yu.map(|_| c.dynkin.loop_weight()),
            };
            (summary, Some(r))
        }
        Chain::Tci(c) => {
            let energy = state.expectation(&build_tci_hamiltonian(c)?)?;
            let overlap = state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| c.is_physical(*i))
                .map(|(_, a)| a.norm_sqr())
                .sum();
            let summary = MeasureSummary {
                energy,
                target_energy: target,
                rel_error: rel(energy),
                sector_overlap: overlap,
                min_alternating_parity: None,
                max_disallowed: None,
                disallowed: None,
                yu: None,
                yu_imag: None,
                yu_expected: None,
            };
            (summary, None)
        }
    };
    art.json("summary.json", &summary)?;
    Ok(report)
}

#[derive(Serialize)]
struct CircuitSummary {
    qubits: usize,
    layers: usize,
    gates: usize,
    cx: usize,
}

pub fn export(exp: &Experiment, params: &ParamsFile, art: &mut Artifacts) -> Result<(), CliError> {
    if params.qubits != exp.qubits() {
        return Err(CliError::Invalid(format!("params are for {} qubits, config has {}", params.qubits, exp.qubits())));
    }
    let circuit = params.layout()?.to_circuit(&params.params)?;
    art.text("circuit.qasm", &circuit.to_qasm())?;
    art.json(
        "summary.json",
        &CircuitSummary { qubits: circuit.num_qubits, layers: params.layers, gates: circuit.gates.len(), cx: circuit.cx_count() },
    )?;
    Ok(())
}
