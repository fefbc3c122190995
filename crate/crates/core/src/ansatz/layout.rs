use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate};
use super::gates::{EntanglerBlock, EulerRotation};
use super::synthesis::decompose_entangler;
use crate::error::{invalid, Result};
use crate::statevector::Statevector;

/// Which bond family the first entangler sublayer of a layer covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BondOrder {
    #[default]
    EvenFirst,
    OddFirst,
}

/// A parameterized gate in application order; `offset` is its first parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Rotation { qubit: usize, offset: usize },
    Entangler { q0: usize, q1: usize, offset: usize },
}

impl Slot {
    pub fn offset(&self) -> usize {
        match *self {
            Slot::Rotation { offset, .. } | Slot::Entangler { offset, .. } => offset,
        }
    }
}

/// Brick-wall layout: per layer and sublayer, one Z–Y–Z rotation on every qubit
/// followed by entanglers on alternating bonds; the wrap-around bond is never used.
///
/// Flat parameter order inside a layer: sublayer 0 rotations (3 per qubit,
/// ascending qubit), sublayer 0 entanglers (3 per bond, ascending), then the
/// same for sublayer 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzLayout {
    qubits: usize,
    layers: usize,
    bond_order: BondOrder,
}

impl AnsatzLayout {
    pub fn new(qubits: usize, layers: usize) -> Result<Self> {
        if qubits < 2 || qubits % 2 != 0 {
            return Err(invalid(format!("brick-wall ansatz needs an even qubit count, got {qubits}")));
        }
        if layers == 0 {
            return Err(invalid("ansatz needs at least one layer"));
        }
        Ok(Self { qubits, layers, bond_order: BondOrder::EvenFirst })
    }

    pub fn with_bond_order(mut self, order: BondOrder) -> Self {
        self.bond_order = order;
        self
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn bond_order(&self) -> BondOrder {
        self.bond_order
    }

    /// 6·L·N + 3·(L−1)·N
    pub fn parameter_count(&self) -> usize {
        self.per_layer() * self.layers
    }

    pub fn per_layer(&self) -> usize {
        6 * self.qubits + 3 * (self.qubits - 1)
    }

    /// Bonds `(k, k+1)` entangled in `sublayer` (0 or 1).
    pub fn bonds(&self, sublayer: usize) -> Vec<(usize, usize)> {
        let odd = (sublayer == 1) == (self.bond_order == BondOrder::EvenFirst);
        let start = usize::from(odd);
        (start..self.qubits - 1).step_by(2).map(|k| (k, k + 1)).collect()
    }

    fn sublayer_offset(&self, layer: usize, sublayer: usize) -> usize {
        let first = 3 * self.qubits + 3 * self.bonds(0).len();
        layer * self.per_layer() + if sublayer == 0 { 0 } else { first }
    }

    /// First parameter of the rotation on `qubit`.
    pub fn rotation_index(&self, layer: usize, sublayer: usize, qubit: usize) -> Result<usize> {
        self.check(layer, sublayer)?;
        if qubit >= self.qubits {
            return Err(invalid(format!("qubit {qubit} outside a {}-qubit layout", self.qubits)));
        }
        Ok(self.sublayer_offset(layer, sublayer) + 3 * qubit)
    }

    /// First parameter of the `bond`-th entangler of the sublayer.
    pub fn entangler_index(&self, layer: usize, sublayer: usize, bond: usize) -> Result<usize> {
        self.check(layer, sublayer)?;
        if bond >= self.bonds(sublayer).len() {
            return Err(invalid(format!("sublayer {sublayer} has no bond {bond}")));
        }
        Ok(self.sublayer_offset(layer, sublayer) + 3 * self.qubits + 3 * bond)
    }

    fn check(&self, layer: usize, sublayer: usize) -> Result<()> {
        if layer >= self.layers || sublayer > 1 {
            return Err(invalid(format!("no sublayer ({layer}, {sublayer}) in a {}-layer ansatz", self.layers)));
        }
        Ok(())
    }

    /// All parameterized gates in application order.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::with_capacity(self.layers * (2 * self.qubits + self.qubits - 1));
        for layer in 0..self.layers {
            for sub in 0..2 {
                let base = self.sublayer_offset(layer, sub);
                out.extend((0..self.qubits).map(|q| Slot::Rotation { qubit: q, offset: base + 3 * q }));
                let ent = base + 3 * self.qubits;
                out.extend(
                    self.bonds(sub)
                        .into_iter()
                        .enumerate()
                        .map(|(b, (q0, q1))| Slot::Entangler { q0, q1, offset: ent + 3 * b }),
                );
            }
        }
        out
    }

    /// The layout with one more layer, and `params` extended by that layer at `fill`.
    pub fn grow(&self, params: &[f64], fill: f64) -> Result<(Self, Vec<f64>)> {
        self.check_params(params)?;
        let next = Self { layers: self.layers + 1, ..*self };
        let mut extended = params.to_vec();
        extended.resize(next.parameter_count(), fill);
        Ok((next, extended))
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(invalid(format!(
                "{} parameters for a layout of {}",
                params.len(),
                self.parameter_count()
            )));
        }
        Ok(())
    }

    /// Elementary `Rz`/`Ry`/`cx` gates of the whole circuit.
    pub fn to_circuit(&self, params: &[f64]) -> Result<Circuit> {
        self.check_params(params)?;
        let mut c = Circuit::new(self.qubits);
        for slot in self.slots() {
            let p = &params[slot.offset()..slot.offset() + 3];
            match slot {
                Slot::Rotation { qubit, .. } => {
                    let r = EulerRotation::from_slice(p);
                    c.gates.push(Gate::U3 { qubit, theta: r.theta, phi: r.phi, lambda: r.lambda });
                }
                Slot::Entangler { q0, q1, .. } => {
                    c.gates.extend(decompose_entangler(&EntanglerBlock::from_slice(p), q0, q1));
                }
            }
        }
        Ok(c)
    }
}

/// Applies a single slot's unitary.
fn apply_slot(state: &mut Statevector, slot: &Slot, params: &[f64]) {
    let p = &params[slot.offset()..slot.offset() + 3];
    match *slot {
        Slot::Rotation { qubit, .. } => state.apply_1q(qubit, &EulerRotation::from_slice(p).matrix()),
        Slot::Entangler { q0, q1, .. } => state.apply_2q(q0, q1, &EntanglerBlock::from_slice(p).matrix()),
    }
}

/// Runs the circuit on `initial`; the result must stay normalized.
pub fn apply_ansatz(params: &[f64], layout: &AnsatzLayout, initial: &Statevector) -> Result<Statevector> {
    layout.check_params(params)?;
    if initial.num_qubits() != layout.qubits() {
        return Err(invalid(format!(
            "{}-qubit state for a {}-qubit ansatz",
            initial.num_qubits(),
            layout.qubits()
        )));
    }
    let mut state = initial.clone();
    for slot in layout.slots() {
        apply_slot(&mut state, &slot, params);
    }
    state.check_normalized()?;
    Ok(state)
}
