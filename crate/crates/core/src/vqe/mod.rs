//! ADAM minimization of the ansatz energy with layer-by-layer growth.

mod adam;
mod gradient;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use adam::Adam;
pub use gradient::{
    energy, energy_gradient, finite_difference, gradient_check, ComponentCheck, FD_STEP, RELATIVE_ERROR_FLOOR,
};

use crate::ansatz::{AnsatzLayout, BondOrder};
use crate::anyon::{build_hamiltonian, ChainConfig, LocalOperator};
use crate::error::{invalid, Error, Result};
use crate::statevector::Statevector;

/// Threshold for the stage-start gradient spot check.
pub const GRADIENT_CHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub theta0: f64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters_per_stage: usize,
    pub plateau_window: usize,
    pub plateau_tol: f64,
    /// Times the step size is halved at a plateau before the stage ends.
    pub plateau_halvings: u32,
    /// Defaults to L/2.
    pub layers_start: Option<usize>,
    /// Defaults to 2L.
    pub layers_max: Option<usize>,
    pub target_rel_error: f64,
    /// Keep adding layers after the target is met.
    pub overshoot: bool,
    /// Random components checked against finite differences at each stage start.
    pub gradient_check_components: usize,
    pub seed: u64,
    pub bond_order: BondOrder,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            theta0: 1.0,
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters_per_stage: 2000,
            plateau_window: 50,
            plateau_tol: 1e-9,
            plateau_halvings: 0,
            layers_start: None,
            layers_max: None,
            target_rel_error: 5e-3,
            overshoot: false,
            gradient_check_components: 10,
            seed: 0,
            bond_order: BondOrder::EvenFirst,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0) {
            return Err(invalid(format!("learning rate must be positive, got {}", self.lr)));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {b}")));
            }
        }
        if self.max_iters_per_stage == 0 || self.plateau_window == 0 {
            return Err(invalid("iteration cap and plateau window must be positive"));
        }
        if !self.theta0.is_finite() || !(self.target_rel_error > 0.0) {
            return Err(invalid("theta0 must be finite and the target error positive"));
        }
        Ok(())
    }

    /// (N_start, N_max) for an `qubits`-qubit register.
    pub fn layer_range(&self, qubits: usize) -> Result<(usize, usize)> {
        let start = self.layers_start.unwrap_or(qubits / 2).max(1);
        let max = self.layers_max.unwrap_or(2 * qubits);
        if max < start {
            return Err(invalid(format!("layers_max {max} below layers_start {start}")));
        }
        Ok((start, max))
    }
}

/// Hamiltonian terms, initial product state and optional exact target energy.
#[derive(Debug, Clone)]
pub struct Problem {
    pub terms: Vec<LocalOperator>,
    pub initial: Statevector,
    pub target_energy: Option<f64>,
}

impl Problem {
    /// The chain Hamiltonian started from `labels` (default |2,1,2,1,…⟩).
    pub fn for_chain(cfg: &ChainConfig, labels: Option<&[usize]>, target_energy: Option<f64>) -> Result<Self> {
        let initial = match labels {
            Some(l) if l.len() != cfg.sites => {
                return Err(invalid(format!("{} initial labels for {} sites", l.len(), cfg.sites)))
            }
            Some(l) => Statevector::from_rsos_product(l, &cfg.encoding)?,
            None => Statevector::alternating_21(cfg.sites, &cfg.encoding)?,
        };
        Ok(Self { terms: build_hamiltonian(cfg)?, initial, target_energy })
    }

    pub fn qubits(&self) -> usize {
        self.initial.num_qubits()
    }

    pub fn rel_error(&self, energy: f64) -> Option<f64> {
        self.target_energy.map(|t| (energy / t - 1.0).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Target,
    Plateau,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub stage: usize,
    pub iteration: usize,
    pub energy: f64,
    pub rel_error: Option<f64>,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub layers: usize,
    pub iterations: usize,
    pub start_energy: f64,
    pub final_energy: f64,
    pub rel_error: Option<f64>,
    pub stop: StopReason,
    /// Energy did not rise above the previous accepted stage.
    pub accepted: bool,
    pub gradient_check: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    pub stages: Vec<StageRecord>,
    pub iterations: Vec<IterationRecord>,
}

impl RunHistory {
    /// Same run up to wall-clock timings.
    pub fn same_trajectory(&self, other: &Self) -> bool {
        let strip = |h: &Self| {
            h.stages
                .iter()
                .map(|s| StageRecord { wall_time_s: 0.0, ..s.clone() })
                .collect::<Vec<_>>()
        };
        self.iterations == other.iterations && strip(self) == strip(other)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeOutcome {
    pub layout: AnsatzLayout,
    pub params: Vec<f64>,
    pub energy: f64,
    pub rel_error: Option<f64>,
    pub converged: bool,
    pub history: RunHistory,
}

fn check_finite(energy: f64, grad: &[f64]) -> Result<()> {
    if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite(format!("energy {energy} or its gradient is not finite")));
    }
    Ok(())
}

/// Runs ADAM on one fixed layout; `params` ends at the lowest energy seen.
pub fn optimize_stage(
    problem: &Problem,
    layout: &AnsatzLayout,
    params: &mut Vec<f64>,
    cfg: &OptimizerConfig,
    stage: usize,
    log: &mut Vec<IterationRecord>,
) -> Result<StageRecord> {
    cfg.validate()?;
    layout.check_params(params)?;
    let clock = Instant::now();
    let mut adam = Adam::new(params.len(), cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut best = (f64::INFINITY, params.clone());
    let mut energies = Vec::with_capacity(cfg.max_iters_per_stage);
    let mut halvings = 0;
    let mut window_start = 0;
    let mut stop = StopReason::IterationCap;
    for iteration in 0..cfg.max_iters_per_stage {
        let (energy, grad) = energy_gradient(params, layout, &problem.terms, &problem.initial)?;
        check_finite(energy, &grad)?;
        let rel_error = problem.rel_error(energy);
        log.push(IterationRecord {
            stage,
            iteration,
            energy,
            rel_error,
            grad_norm: grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
        });
        energies.push(energy);
        if energy < best.0 {
            best = (energy, params.clone());
        }
        if !cfg.overshoot && rel_error.is_some_and(|r| r <= cfg.target_rel_error) {
            stop = StopReason::Target;
            break;
        }
        if iteration >= window_start + cfg.plateau_window {
            let old = energies[iteration - cfg.plateau_window];
            if ((old - energy) / energy).abs() < cfg.plateau_tol {
                if halvings < cfg.plateau_halvings {
                    halvings += 1;
                    adam.lr /= 2.0;
                    window_start = iteration;
                } else {
                    stop = StopReason::Plateau;
                    break;
                }
            }
        }
        adam.step(params, &grad);
    }
    let start_energy = energies[0];
    *params = best.1;
    Ok(StageRecord {
        stage,
        layers: layout.layers(),
        iterations: energies.len(),
        start_energy,
        final_energy: best.0,
        rel_error: problem.rel_error(best.0),
        stop,
        accepted: true,
        gradient_check: None,
        wall_time_s: clock.elapsed().as_secs_f64(),
    })
}

/// Layer-growth schedule: start at N_start with every angle θ₀, then append
/// one layer at θ₀/10 per stage until the target is met or N_max is done.
pub fn optimize_with_growth(problem: &Problem, cfg: &OptimizerConfig) -> Result<VqeOutcome> {
    cfg.validate()?;
    let (start, max) = cfg.layer_range(problem.qubits())?;
    let mut layout = AnsatzLayout::new(problem.qubits(), start)?.with_bond_order(cfg.bond_order);
    let mut params = vec![cfg.theta0; layout.parameter_count()];
    let mut history = RunHistory::default();
    let mut best: Option<(f64, AnsatzLayout, Vec<f64>)> = None;
    let mut accepted_energy = f64::INFINITY;
    for stage in 0.. {
        let check = if cfg.gradient_check_components > 0 {
            let checks = gradient_check(
                &params,
                &layout,
                &problem.terms,
                &problem.initial,
                cfg.gradient_check_components,
                cfg.seed.wrapping_add(stage as u64),
            )?;
            let worst = checks.iter().map(|c| c.scaled_error).fold(0.0, f64::max);
            if worst > GRADIENT_CHECK_TOLERANCE {
                return Err(Error::NumericalFailure {
                    message: format!("gradient check failed at stage {stage}"),
                    residual: worst,
                });
            }
            Some(worst)
        } else {
            None
        };
        let mut record = optimize_stage(problem, &layout, &mut params, cfg, stage, &mut history.iterations)?;
        record.gradient_check = check;
        record.accepted = record.final_energy <= accepted_energy;
        if record.accepted {
            accepted_energy = record.final_energy;
        }
        if best.as_ref().is_none_or(|b| record.final_energy < b.0) {
            best = Some((record.final_energy, layout, params.clone()));
        }
        let reached = record.rel_error.is_some_and(|r| r <= cfg.target_rel_error);
        history.stages.push(record);
        if (reached && !cfg.overshoot) || layout.layers() >= max {
            break;
        }
        let grown = layout.grow(&params, cfg.theta0 / 10.0)?;
        layout = grown.0;
        params = grown.1;
    }
    let (energy, layout, params) = best.expect("at least one stage ran");
    let rel_error = problem.rel_error(energy);
    let converged = rel_error.is_some_and(|r| r <= cfg.target_rel_error);
    Ok(VqeOutcome { layout, params, energy, rel_error, converged, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anyon::Boundary;
    use crate::oracle::ground_state;

    fn small_problem() -> Problem {
        let cfg = ChainConfig::new(4, 3, Boundary::Open).unwrap();
        let exact = ground_state(&cfg, None).unwrap();
        Problem::for_chain(&cfg, None, Some(exact.energy)).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = OptimizerConfig::default();
        assert!(c.validate().is_ok());
        c.beta1 = 1.0;
        assert!(c.validate().is_err());
        let c = OptimizerConfig { lr: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = OptimizerConfig { layers_start: Some(5), layers_max: Some(2), ..Default::default() };
        assert!(c.layer_range(6).is_err());
    }

    #[test]
    fn growth_reaches_target_on_a_small_chain() {
        let problem = small_problem();
        let cfg = OptimizerConfig { lr: 0.05, ..Default::default() };
        let out = optimize_with_growth(&problem, &cfg).unwrap();
        assert!(out.converged, "{:?}", out.history.stages);
        assert!(out.rel_error.unwrap() <= 5e-3);
        assert_eq!(out.history.stages[0].layers, 3);
        let accepted: Vec<f64> =
            out.history.stages.iter().filter(|s| s.accepted).map(|s| s.final_energy).collect();
        assert!(accepted.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn runs_are_deterministic() {
        let problem = small_problem();
        let cfg = OptimizerConfig { max_iters_per_stage: 40, layers_max: Some(4), target_rel_error: 1e-9, ..Default::default() };
        let a = optimize_with_growth(&problem, &cfg).unwrap();
        let b = optimize_with_growth(&problem, &cfg).unwrap();
        assert!(a.history.same_trajectory(&b.history));
        assert_eq!(a.params, b.params);
        assert!(!a.converged);
    }

    #[test]
    fn oracle_free_runs_stop_on_plateau_or_cap() {
        let mut problem = small_problem();
        problem.target_energy = None;
        let cfg = OptimizerConfig { max_iters_per_stage: 30, layers_max: Some(3), ..Default::default() };
        let out = optimize_with_growth(&problem, &cfg).unwrap();
        assert!(!out.converged);
        assert!(out.history.stages.iter().all(|s| s.stop != StopReason::Target));
    }
}
