//! Elementary gate lists and their OpenQASM 2.0 form (`u3` and `cx` only).

use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use super::gates::{cnot, ry, rz};
use crate::error::{invalid, Result};
use crate::statevector::Statevector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rz { qubit: usize, angle: f64 },
    Ry { qubit: usize, angle: f64 },
    /// OpenQASM `u3(θ, φ, λ)`
    U3 { qubit: usize, theta: f64, phi: f64, lambda: f64 },
    Cx { control: usize, target: usize },
}

/// `u3(θ, φ, λ) = [[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Matrix2<Complex64> {
    let (s, c) = (theta / 2.0).sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, phi),
        Complex64::from_polar(c, phi + lambda),
    )
}

impl Gate {
    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::Cx { .. })
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rz { qubit, .. } | Gate::Ry { qubit, .. } | Gate::U3 { qubit, .. } => vec![qubit],
            Gate::Cx { control, target } => vec![control, target],
        }
    }

    /// The gate as `u3`/`cx`, exact up to global phase.
    pub fn to_u3(&self) -> Self {
        match *self {
            Gate::Rz { qubit, angle } => Gate::U3 { qubit, theta: 0.0, phi: 0.0, lambda: angle },
            Gate::Ry { qubit, angle } => Gate::U3 { qubit, theta: angle, phi: 0.0, lambda: 0.0 },
            g => g,
        }
    }

    fn single_matrix(&self) -> Option<(usize, Matrix2<Complex64>)> {
        match *self {
            Gate::Rz { qubit, angle } => Some((qubit, rz(angle))),
            Gate::Ry { qubit, angle } => Some((qubit, ry(angle))),
            Gate::U3 { qubit, theta, phi, lambda } => Some((qubit, u3(theta, phi, lambda))),
            Gate::Cx { .. } => None,
        }
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        let n = state.num_qubits();
        if let Some(q) = self.qubits().into_iter().find(|&q| q >= n) {
            return Err(invalid(format!("gate acts on qubit {q} of a {n}-qubit register")));
        }
        match (self.single_matrix(), *self) {
            (Some((q, m)), _) => state.apply_1q(q, &m),
            (None, Gate::Cx { control, target }) => state.apply_2q(control, target, &cnot(true)),
            _ => unreachable!(),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new() }
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.apply(state))
    }

    /// Dense unitary, column by column; for small registers only.
    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = Statevector::basis(self.num_qubits, col)?;
            self.apply(&mut s)?;
            m.column_mut(col).copy_from_slice(s.amplitudes());
        }
        Ok(m)
    }

    /// Two-qubit unitary in the `b(q0) + 2·b(q1)` convention.
    pub fn unitary_4x4(&self) -> Result<Matrix4<Complex64>> {
        if self.num_qubits != 2 {
            return Err(invalid("unitary_4x4 needs a two-qubit circuit"));
        }
        let m = self.unitary()?;
        Ok(Matrix4::from_fn(|r, c| m[(r, c)]))
    }

    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let _ = writeln!(out, "qreg q[{}];", self.num_qubits);
        for g in &self.gates {
            match g.to_u3() {
                Gate::U3 { qubit, theta, phi, lambda } => {
                    let _ = writeln!(out, "u3({theta:?},{phi:?},{lambda:?}) q[{qubit}];");
                }
                Gate::Cx { control, target } => {
                    let _ = writeln!(out, "cx q[{control}],q[{target}];");
                }
                _ => unreachable!(),
            }
        }
        out
    }

    /// Parses the `u3`/`cx` subset written by [`Circuit::to_qasm`].
    pub fn from_qasm(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split("//").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |what: &str| invalid(format!("qasm line {}: {what}: {raw}", lineno + 1));
            let stmt = line.strip_suffix(';').ok_or_else(|| err("missing ';'"))?.trim();
            if stmt.starts_with("OPENQASM") || stmt.starts_with("include") {
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("qreg") {
                let n = qubit_index(rest.trim(), "q").ok_or_else(|| err("bad qreg"))?;
                circuit = Some(Circuit::new(n));
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| err("gate before qreg"))?;
            let gate = if let Some(rest) = stmt.strip_prefix("u3(") {
                let (args, target) = rest.split_once(')').ok_or_else(|| err("unclosed u3"))?;
                let angles: Vec<f64> = args
                    .split(',')
                    .map(|a| a.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err("bad angle"))?;
                let [theta, phi, lambda] = angles[..] else {
                    return Err(err("u3 takes three angles"));
                };
                let qubit = qubit_index(target.trim(), "q").ok_or_else(|| err("bad operand"))?;
                Gate::U3 { qubit, theta, phi, lambda }
            } else if let Some(rest) = stmt.strip_prefix("cx") {
                let (a, b) = rest.split_once(',').ok_or_else(|| err("cx takes two operands"))?;
                let control = qubit_index(a.trim(), "q").ok_or_else(|| err("bad operand"))?;
                let target = qubit_index(b.trim(), "q").ok_or_else(|| err("bad operand"))?;
                if control == target {
                    return Err(err("cx on a single qubit"));
                }
                Gate::Cx { control, target }
            } else {
                return Err(err("unsupported statement"));
            };
            if gate.qubits().iter().any(|&q| q >= c.num_qubits) {
                return Err(err("qubit out of range"));
            }
            c.gates.push(gate);
        }
        circuit.ok_or_else(|| invalid("qasm text declares no qreg"))
    }
}

fn qubit_index(operand: &str, reg: &str) -> Option<usize> {
    operand.strip_prefix(reg)?.strip_prefix('[')?.strip_suffix(']')?.parse().ok()
}
