//! Operators acting on an explicit, ordered list of qubits.
//!
//! Local index bit `m` of a `LocalOperator` matrix is the state of qubit
//! `support[m]`, mirroring the register convention that basis index bit `k`
//! is the state of qubit `k`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    support: Vec<usize>,
    matrix: DMatrix<Complex64>,
    // (row, col, value), column-major order
    nonzeros: Vec<(usize, usize, Complex64)>,
}

impl LocalOperator {
    pub fn new(support: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize
            .checked_shl(support.len() as u32)
            .ok_or_else(|| invalid("operator support too wide"))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(invalid(format!(
                "matrix is {}x{} but support of {} qubits needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols(),
                support.len()
            )));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(format!("support {support:?} repeats a qubit")));
        }
        let mut nonzeros = Vec::new();
        for c in 0..dim {
            for r in 0..dim {
                let v = matrix[(r, c)];
                if v != ZERO {
                    nonzeros.push((r, c, v));
                }
            }
        }
        Ok(Self { support, matrix, nonzeros })
    }

    pub fn identity(support: Vec<usize>) -> Self {
        let dim = 1 << support.len();
        Self::new(support, DMatrix::identity(dim, dim)).expect("identity is well formed")
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn width(&self) -> usize {
        self.support.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn nonzeros(&self) -> &[(usize, usize, Complex64)] {
        &self.nonzeros
    }

    /// Bit mask of the support qubits.
    pub fn mask(&self) -> usize {
        self.support.iter().fold(0, |m, &q| m | 1 << q)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.support.clone(), self.matrix.adjoint()).expect("same shape")
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(self.support.clone(), &self.matrix * factor).expect("same shape")
    }

    /// `a * self + b * identity` on the same support.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Self {
        let dim = self.matrix.nrows();
        let m = &self.matrix * a + DMatrix::<Complex64>::identity(dim, dim) * b;
        Self::new(self.support.clone(), m).expect("same shape")
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_hermitian_deviation() <= tol
    }

    /// Local index of the support bits of a register basis index.
    pub fn local_index(&self, index: usize) -> usize {
        self.support
            .iter()
            .enumerate()
            .fold(0, |acc, (m, &q)| acc | (index >> q & 1) << m)
    }

    /// Register offset with the bits of `local` placed on the support qubits.
    pub fn scatter(&self, local: usize) -> usize {
        self.support
            .iter()
            .enumerate()
            .fold(0, |acc, (m, &q)| acc | (local >> m & 1) << q)
    }

    /// Image of a register basis state: `(index, amplitude)` pairs.
    pub fn apply_to_basis(&self, index: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let col = self.local_index(index);
        let rest = index & !self.mask();
        self.nonzeros
            .iter()
            .filter(move |&&(_, c, _)| c == col)
            .map(move |&(r, _, v)| (rest | self.scatter(r), v))
    }

    /// Dense matrix on the whole register. Only for small test registers.
    pub fn to_dense(&self, num_qubits: usize) -> DMatrix<Complex64> {
        let dim = 1 << num_qubits;
        let mut out = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            for (row, v) in self.apply_to_basis(col) {
                out[(row, col)] += v;
            }
        }
        out
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator {
            support: self.support.clone(),
            entries: self
                .nonzeros
                .iter()
                .map(|&(r, c, v)| ((r, c), v))
                .collect(),
        }
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Exact sparse arithmetic on local operators with overlapping supports.
///
/// Used to check algebraic relations between generators whose joint support
/// is too wide for dense matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    support: Vec<usize>,
    entries: HashMap<(usize, usize), Complex64>,
}

impl SparseOperator {
    pub fn identity(support: Vec<usize>) -> Self {
        let entries = (0..1usize << support.len()).map(|i| ((i, i), ONE)).collect();
        Self { support, entries }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The same operator on a larger support (identity on the new qubits).
    pub fn extend_to(&self, support: &[usize]) -> Result<Self> {
        let position = |q: usize| support.iter().position(|&s| s == q);
        let old_pos = self
            .support
            .iter()
            .map(|&q| position(q).ok_or_else(|| invalid(format!("qubit {q} missing from target support"))))
            .collect::<Result<Vec<_>>>()?;
        let extra: Vec<usize> = (0..support.len()).filter(|m| !old_pos.contains(m)).collect();
        let place = |local: usize| {
            old_pos
                .iter()
                .enumerate()
                .fold(0, |acc, (m, &pos)| acc | (local >> m & 1) << pos)
        };
        let mut entries = HashMap::with_capacity(self.entries.len() << extra.len());
        for (&(r, c), &v) in &self.entries {
            let (rr, cc) = (place(r), place(c));
            for x in 0..1usize << extra.len() {
                let bits = extra
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (m, &pos)| acc | (x >> m & 1) << pos);
                entries.insert((rr | bits, cc | bits), v);
            }
        }
        Ok(Self { support: support.to_vec(), entries })
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        let mut union = self.support.clone();
        union.extend(other.support.iter().filter(|q| !self.support.contains(q)));
        Ok((self.extend_to(&union)?, other.extend_to(&union)?))
    }

    /// Matrix product `self * other` on the union of the supports.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let mut b_rows: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
        for (&(r, c), &v) in &b.entries {
            b_rows.entry(r).or_default().push((c, v));
        }
        let mut entries: HashMap<(usize, usize), Complex64> = HashMap::new();
        for (&(r, k), &va) in &a.entries {
            if let Some(row) = b_rows.get(&k) {
                for &(c, vb) in row {
                    *entries.entry((r, c)).or_insert(ZERO) += va * vb;
                }
            }
        }
        Ok(Self { support: a.support, entries })
    }

    /// `self + factor * other` on the union of the supports.
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Result<Self> {
        let (mut a, b) = self.aligned(other)?;
        for (k, v) in b.entries {
            *a.entries.entry(k).or_insert(ZERO) += factor * v;
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -ONE)
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            support: self.support.clone(),
            entries: self.entries.iter().map(|(&k, &v)| (k, v * factor)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest |entry| whose (row, column) register patterns pass `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(usize, usize) -> bool) -> f64 {
        let global = |local: usize| {
            self.support
                .iter()
                .enumerate()
                .fold(0, |acc, (m, &q)| acc | (local >> m & 1) << q)
        };
        self.entries
            .iter()
            .filter(|(&(r, c), _)| keep(global(r), global(c)))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}
