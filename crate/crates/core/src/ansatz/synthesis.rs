//! Three-CNOT synthesis of the entangler and the full KAK decomposition of SU(4).

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use super::circuit::{Circuit, Gate};
use super::gates::{kron, pauli_x, pauli_y, pauli_z, phase_distance, EntanglerBlock, EulerRotation};
use crate::error::{invalid, Error, Result};

/// Reconstruction tolerance for [`kak_full`].
pub const KAK_TOLERANCE: f64 = 1e-8;

/// Gates equal to the entangler on `(q0, q1)` up to global phase, with exactly three CNOTs.
pub fn decompose_entangler(block: &EntanglerBlock, q0: usize, q1: usize) -> Vec<Gate> {
    let [a1, a2, a3] = block.alphas();
    vec![
        Gate::Rz { qubit: q1, angle: -FRAC_PI_2 },
        Gate::Cx { control: q1, target: q0 },
        Gate::Rz { qubit: q0, angle: -2.0 * a3 - FRAC_PI_2 },
        Gate::Ry { qubit: q1, angle: 2.0 * a1 + FRAC_PI_2 },
        Gate::Cx { control: q0, target: q1 },
        Gate::Ry { qubit: q1, angle: -2.0 * a2 - FRAC_PI_2 },
        Gate::Cx { control: q1, target: q0 },
        Gate::Rz { qubit: q0, angle: FRAC_PI_2 },
    ]
}

/// `U = (A₁ ⊗ A₀) · E · (B₁ ⊗ B₀)` up to global phase; index 0 acts on `q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KakDecomposition {
    pub before: [EulerRotation; 2],
    pub entangler: EntanglerBlock,
    pub after: [EulerRotation; 2],
}

impl KakDecomposition {
    pub fn matrix(&self) -> Matrix4<Complex64> {
        let local = |r: &[EulerRotation; 2]| kron(&r[1].matrix(), &r[0].matrix());
        local(&self.after) * self.entangler.matrix() * local(&self.before)
    }

    /// 15 angles: before (q0, q1), entangler, after (q0, q1).
    pub fn parameters(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        let e = |r: &EulerRotation| [r.phi, r.theta, r.lambda];
        out[0..3].copy_from_slice(&e(&self.before[0]));
        out[3..6].copy_from_slice(&e(&self.before[1]));
        out[6..9].copy_from_slice(&self.entangler.alphas());
        out[9..12].copy_from_slice(&e(&self.after[0]));
        out[12..15].copy_from_slice(&e(&self.after[1]));
        out
    }

    pub fn circuit(&self) -> Circuit {
        let mut c = Circuit::new(2);
        let euler = |q: usize, r: &EulerRotation| [
            Gate::Rz { qubit: q, angle: r.lambda },
            Gate::Ry { qubit: q, angle: r.theta },
            Gate::Rz { qubit: q, angle: r.phi },
        ];
        for (q, r) in self.before.iter().enumerate() {
            c.gates.extend(euler(q, r));
        }
        c.gates.extend(decompose_entangler(&self.entangler, 0, 1));
        for (q, r) in self.after.iter().enumerate() {
            c.gates.extend(euler(q, r));
        }
        c
    }
}

fn magic_basis() -> Matrix4<Complex64> {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let o = Complex64::new(0.0, 0.0);
    Matrix4::new(r, o, o, i, o, i, r, o, o, i, -r, o, r, o, o, -i)
}

fn max_norm(m: &Matrix4<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Factors `v ≈ a ⊗ c` (with `a` on the high bit) into determinant-one pieces.
fn factor_local(v: &Matrix4<Complex64>) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
    let (idx, _) = v
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let (r, c) = (idx % 4, idx / 4);
    let (r1, r0, c1, c0) = (r >> 1, r & 1, c >> 1, c & 1);
    let a = Matrix2::from_fn(|i, j| v[(2 * i + r0, 2 * j + c0)]);
    let b = Matrix2::from_fn(|k, l| v[(2 * r1 + k, 2 * c1 + l)]);
    (a / a.determinant().sqrt(), b / b.determinant().sqrt())
}

/// Orthogonal `P` with `Pᵀ M P` diagonal for a complex symmetric unitary `M`.
fn diagonalize_symmetric_unitary(m: &Matrix4<Complex64>) -> Option<(Matrix4<f64>, Vector4<Complex64>)> {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    // real and imaginary parts commute; a generic combination separates their joint eigenspaces
    for &mix in &[0.5377, 1.8339, -2.2588, 0.8622, 0.3188, -1.3077] {
        let eig = SymmetricEigen::new(re + im * mix);
        let mut p = eig.eigenvectors;
        if p.determinant() < 0.0 {
            p.column_mut(0).neg_mut();
        }
        let pc = p.map(|x| Complex64::new(x, 0.0));
        let d = pc.transpose() * m * pc;
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| d[(i, j)].norm())
            .fold(0.0, f64::max);
        if off < 1e-11 {
            return Some((p, d.diagonal()));
        }
    }
    None
}

/// Full KAK decomposition of a 4×4 unitary (15 parameters, global phase dropped).
pub fn kak_full(u: &Matrix4<Complex64>) -> Result<KakDecomposition> {
    let unitarity = max_norm(&(u.adjoint() * u - Matrix4::identity()));
    if unitarity > 1e-10 {
        return Err(invalid(format!("kak_full input is not unitary (deviation {unitarity:.3e})")));
    }
    let su = u / u.determinant().powf(0.25);
    let b = magic_basis();
    let up = b.adjoint() * su * b;
    let m = up.transpose() * up;
    let (p, d) = diagonalize_symmetric_unitary(&m).ok_or_else(|| Error::NumericalFailure {
        message: "could not diagonalize the magic-basis square".into(),
        residual: f64::NAN,
    })?;
    let mut theta: Vec<f64> = d.iter().map(|z| z.arg() / 2.0).collect();
    let pc = p.map(|x| Complex64::new(x, 0.0));
    let phases = |t: &[f64]| Matrix4::from_diagonal(&Vector4::from_fn(|k, _| Complex64::from_polar(1.0, -t[k])));
    let mut k1 = up * pc * phases(&theta);
    if k1.determinant().re < 0.0 {
        theta[0] += std::f64::consts::PI;
        k1 = up * pc * phases(&theta);
    }
    let k2 = pc.transpose();

    // in the magic basis XX, YY, ZZ are diagonal with ±1 entries
    let paulis = [pauli_x(), pauli_y(), pauli_z()].map(|s| (b.adjoint() * kron(&s, &s) * b).diagonal());
    let system = nalgebra::Matrix4::from_fn(|k, col| if col == 0 { 1.0 } else { paulis[col - 1][k].re });
    let rhs = Vector4::from_fn(|k, _| theta[k]);
    let sol = system.lu().solve(&rhs).ok_or_else(|| Error::NumericalFailure {
        message: "singular sign system".into(),
        residual: f64::NAN,
    })?;
    let entangler = EntanglerBlock::new(sol[1], sol[2], sol[3]);

    let (a_after, c_after) = factor_local(&(b * k1 * b.adjoint()));
    let (a_before, c_before) = factor_local(&(b * k2 * b.adjoint()));
    let kak = KakDecomposition {
        before: [EulerRotation::from_unitary(&c_before), EulerRotation::from_unitary(&a_before)],
        entangler,
        after: [EulerRotation::from_unitary(&c_after), EulerRotation::from_unitary(&a_after)],
    };
    let residual = phase_distance(&kak.matrix(), u);
    if residual > KAK_TOLERANCE {
        return Err(Error::NumericalFailure { message: "KAK reconstruction failed".into(), residual });
    }
    Ok(kak)
}
