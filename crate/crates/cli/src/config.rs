//! TOML experiment description and its validation into a runnable chain.

use std::path::{Path, PathBuf};

use rsos_core::ansatz::BondOrder;
use rsos_core::anyon::{ShiftDirection, TciChain};
use rsos_core::vqe::OptimizerConfig;
use rsos_core::{Boundary, ChainConfig, DynkinSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingVariant {
    /// `n_p` qubits per site, any p.
    #[default]
    Generic,
    /// One qubit per site with the no-adjacent-down constraint; p = 4 only.
    TciAppendix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers_start: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers_max: Option<usize>,
    pub theta0: f64,
    pub bond_order: BondOrder,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self { layers_start: None, layers_max: None, theta0: d.theta0, bond_order: d.bond_order }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters_per_stage: usize,
    pub plateau_window: usize,
    pub plateau_tol: f64,
    pub plateau_halvings: u32,
    pub target_rel_error: f64,
    pub overshoot: bool,
    pub gradient_check_components: usize,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        Self {
            lr: d.lr,
            beta1: d.beta1,
            beta2: d.beta2,
            epsilon: d.epsilon,
            max_iters_per_stage: d.max_iters_per_stage,
            plateau_window: d.plateau_window,
            plateau_tol: d.plateau_tol,
            plateau_halvings: d.plateau_halvings,
            target_rel_error: d.target_rel_error,
            overshoot: d.overshoot,
            gradient_check_components: d.gradient_check_components,
        }
    }
}

/// One experiment. Exactly one of `sites` (RSOS sites) and `qubits` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    pub boundary: Boundary,
    #[serde(default)]
    pub encoding: EncodingVariant,
    #[serde(default)]
    pub shift: ShiftDirection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_rsos_state: Option<Vec<usize>>,
    /// Pins the end labels of an open chain for the exact reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_values: Option<[usize; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub ansatz: AnsatzSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
}

/// Validated chain geometry.
#[derive(Debug, Clone)]
pub enum Chain {
    Generic(ChainConfig),
    Tci(TciChain),
}

/// A config that passed every cross-field check.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub chain: Chain,
    pub labels: Vec<usize>,
}

impl Experiment {
    pub fn qubits(&self) -> usize {
        match &self.chain {
            Chain::Generic(c) => c.num_qubits(),
            Chain::Tci(c) => c.sites,
        }
    }

    pub fn boundary_values(&self) -> Option<(usize, usize)> {
        self.config.boundary_values.map(|[a, b]| (a, b))
    }
}

impl ExperimentConfig {
    /// A generic-encoding config with default ansatz and optimizer.
    pub fn generic(p: usize, qubits: usize, boundary: Boundary) -> Self {
        Self {
            p,
            sites: None,
            qubits: Some(qubits),
            boundary,
            encoding: EncodingVariant::Generic,
            shift: ShiftDirection::Forward,
            initial_rsos_state: None,
            boundary_values: None,
            seed: 0,
            output_dir: None,
            ansatz: AnsatzSection::default(),
            optimizer: OptimizerSection::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Invalid(format!("config serialization: {e}")))
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        let o = &self.optimizer;
        OptimizerConfig {
            theta0: self.ansatz.theta0,
            lr: o.lr,
            beta1: o.beta1,
            beta2: o.beta2,
            epsilon: o.epsilon,
            max_iters_per_stage: o.max_iters_per_stage,
            plateau_window: o.plateau_window,
            plateau_tol: o.plateau_tol,
            plateau_halvings: o.plateau_halvings,
            layers_start: self.ansatz.layers_start,
            layers_max: self.ansatz.layers_max,
            target_rel_error: o.target_rel_error,
            overshoot: o.overshoot,
            gradient_check_components: o.gradient_check_components,
            seed: self.seed,
            bond_order: self.ansatz.bond_order,
        }
    }

    pub fn resolve(&self) -> Result<Experiment, CliError> {
        let dynkin = DynkinSpec::new(self.p)?;
        let chain = match (self.encoding, self.sites, self.qubits) {
            (_, Some(_), Some(_)) | (_, None, None) => {
                return Err(CliError::Invalid("give exactly one of `sites` and `qubits`".into()))
            }
            (EncodingVariant::TciAppendix, _, _) if self.p != 4 => {
                return Err(CliError::Invalid(format!("tci-appendix encoding needs p = 4, got {}", self.p)))
            }
            (EncodingVariant::TciAppendix, s, q) => Chain::Tci(TciChain::new(s.or(q).unwrap_or(0), self.boundary)?),
            (EncodingVariant::Generic, Some(s), None) => {
                Chain::Generic(ChainConfig::new(self.p, s, self.boundary)?.with_shift(self.shift))
            }
            (EncodingVariant::Generic, None, Some(q)) => {
                Chain::Generic(ChainConfig::from_qubits(self.p, q, self.boundary)?.with_shift(self.shift))
            }
        };
        let sites = match &chain {
            Chain::Generic(c) => c.sites,
            Chain::Tci(c) => c.sites,
        };
        let labels = match &self.initial_rsos_state {
            Some(l) => l.clone(),
            None => (0..sites).map(|j| if j % 2 == 0 { 2 } else { 1 }).collect(),
        };
        check_labels(&labels, sites, self.boundary, &dynkin)?;
        if let Some([a, b]) = self.boundary_values {
            if self.boundary == Boundary::Periodic {
                return Err(CliError::Invalid("boundary_values apply to open chains only".into()));
            }
            if matches!(chain, Chain::Tci(_)) {
                return Err(CliError::Invalid("boundary_values are not supported with tci-appendix".into()));
            }
            if !(1..=self.p).contains(&a) || !(1..=self.p).contains(&b) {
                return Err(CliError::Invalid(format!("boundary_values ({a}, {b}) outside 1..={}", self.p)));
            }
            let ends = (labels[0], labels[sites - 1]);
            if self.initial_rsos_state.is_some() && ends != (a, b) {
                return Err(CliError::Invalid(format!(
                    "initial state ends {ends:?} differ from boundary_values ({a}, {b})"
                )));
            }
        }
        self.optimizer_config().validate()?;
        Ok(Experiment { config: self.clone(), chain, labels })
    }
}

fn check_labels(labels: &[usize], sites: usize, boundary: Boundary, dynkin: &DynkinSpec) -> Result<(), CliError> {
    if labels.len() != sites {
        return Err(CliError::Invalid(format!("{} initial labels for {sites} sites", labels.len())));
    }
    if let Some(a) = labels.iter().find(|&&a| !(1..=dynkin.p()).contains(&a)) {
        return Err(CliError::Invalid(format!("initial label {a} outside 1..={}", dynkin.p())));
    }
    let bonds = if boundary == Boundary::Periodic { sites } else { sites - 1 };
    for j in 0..bonds {
        let (a, b) = (labels[j], labels[(j + 1) % sites]);
        if !dynkin.adjacent(a, b) {
            return Err(CliError::Invalid(format!("initial labels {a}, {b} at sites {j}, {} are not adjacent", j + 1)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Experiment, CliError> {
        toml::from_str::<ExperimentConfig>(text)
            .map_err(|e| CliError::Invalid(e.to_string()))?
            .resolve()
    }

    #[test]
    fn minimal_config() {
        let e = parse("p = 4\nqubits = 12\nboundary = \"periodic\"\n").unwrap();
        assert_eq!(e.qubits(), 12);
        assert_eq!(e.labels, vec![2, 1, 2, 1, 2, 1]);
        assert_eq!(e.config.optimizer_config(), OptimizerConfig::default());
    }

    #[test]
    fn sections_map_onto_optimizer() {
        let text = "p = 5\nsites = 4\nboundary = \"open\"\nseed = 9\n\
                    [ansatz]\nlayers_start = 2\ntheta0 = 0.5\nbond_order = \"odd-first\"\n\
                    [optimizer]\nlr = 0.02\novershoot = true\n";
        let c = parse(text).unwrap().config.optimizer_config();
        assert_eq!((c.layers_start, c.theta0, c.lr, c.seed), (Some(2), 0.5, 0.02, 9));
        assert!(c.overshoot);
        assert_eq!(c.bond_order, BondOrder::OddFirst);
    }

    #[test]
    fn cross_field_checks() {
        let bad = [
            "p = 4\nsites = 6\nqubits = 12\nboundary = \"open\"\n",
            "p = 4\nqubits = 11\nboundary = \"open\"\n",
            "p = 5\nsites = 6\nboundary = \"open\"\nencoding = \"tci-appendix\"\n",
            "p = 4\nsites = 4\nboundary = \"open\"\ninitial_rsos_state = [2, 1, 3, 2]\n",
            "p = 4\nsites = 4\nboundary = \"periodic\"\nboundary_values = [2, 1]\n",
            "p = 4\nsites = 4\nboundary = \"open\"\ninitial_rsos_state = [2, 1, 2, 1]\nboundary_values = [2, 3]\n",
            "p = 4\nsites = 4\nboundary = \"open\"\n[optimizer]\nlr = -1.0\n",
            "p = 4\nsites = 4\nboundary = \"open\"\ntypo = 1\n",
            "p = 9\nsites = 4\nboundary = \"open\"\n",
        ];
        for text in bad {
            assert!(parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn tci_uses_one_qubit_per_site() {
        let e = parse("p = 4\nsites = 6\nboundary = \"open\"\nencoding = \"tci-appendix\"\n").unwrap();
        assert_eq!(e.qubits(), 6);
    }

    #[test]
    fn toml_round_trip() {
        let mut c = ExperimentConfig::generic(4, 8, Boundary::Open);
        c.boundary_values = Some([2, 1]);
        let back: ExperimentConfig = toml::from_str(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
