//! Single- and two-qubit gate matrices used by the ansatz.
//!
//! Two-qubit matrices use the local index `b(q0) + 2·b(q1)`, so the first
//! Kronecker factor acts on `q1`.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> Matrix2<Complex64> {
    Matrix2::new(c(0.0), -I, I, c(0.0))
}

pub fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// diag(e^{−it/2}, e^{it/2})
pub fn rz(t: f64) -> Matrix2<Complex64> {
    let h = Complex64::from_polar(1.0, -t / 2.0);
    Matrix2::new(h, c(0.0), c(0.0), h.conj())
}

pub fn ry(t: f64) -> Matrix2<Complex64> {
    let (s, co) = (t / 2.0).sin_cos();
    Matrix2::new(c(co), c(-s), c(s), c(co))
}

/// `a ⊗ b` with `a` on the high bit (`q1`).
pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, col| a[(r >> 1, col >> 1)] * b[(r & 1, col & 1)])
}

/// CNOT with the given control/target roles inside the pair `(q0, q1)`.
pub fn cnot(control_is_q0: bool) -> Matrix4<Complex64> {
    let (cbit, tbit) = if control_is_q0 { (1, 2) } else { (2, 1) };
    Matrix4::from_fn(|r, col| {
        let image = if col & cbit != 0 { col ^ tbit } else { col };
        c(if r == image { 1.0 } else { 0.0 })
    })
}

/// Z–Y–Z rotation `Rz(φ)·Ry(θ)·Rz(λ)`; determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerRotation {
    pub phi: f64,
    pub theta: f64,
    pub lambda: f64,
}

impl EulerRotation {
    pub fn new(phi: f64, theta: f64, lambda: f64) -> Self {
        Self { phi, theta, lambda }
    }

    pub fn from_slice(p: &[f64]) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        rz(self.phi) * ry(self.theta) * rz(self.lambda)
    }

    /// Derivatives with respect to (φ, θ, λ).
    pub fn derivatives(&self) -> [Matrix2<Complex64>; 3] {
        let half = -I * 0.5;
        let (zf, yt, zl) = (rz(self.phi), ry(self.theta), rz(self.lambda));
        let u = zf * yt * zl;
        [
            pauli_z() * u * half,
            zf * pauli_y() * yt * zl * half,
            u * pauli_z() * half,
        ]
    }

    /// Euler angles of a 2×2 unitary, discarding its global phase.
    pub fn from_unitary(w: &Matrix2<Complex64>) -> Self {
        // on SU(2): w00 = e^{−i(φ+λ)/2} cos(θ/2), w10 = e^{i(φ−λ)/2} sin(θ/2), up to sign
        let w = w / w.determinant().sqrt();
        let theta = 2.0 * w[(1, 0)].norm().atan2(w[(0, 0)].norm());
        let sum = -2.0 * w[(0, 0)].arg();
        let diff = 2.0 * w[(1, 0)].arg();
        Self::new((sum + diff) / 2.0, theta, (sum - diff) / 2.0)
    }
}

/// `exp(i(α₁ XX + α₂ YY + α₃ ZZ))`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EntanglerBlock {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

fn pauli_pairs() -> [Matrix4<Complex64>; 3] {
    [
        kron(&pauli_x(), &pauli_x()),
        kron(&pauli_y(), &pauli_y()),
        kron(&pauli_z(), &pauli_z()),
    ]
}

impl EntanglerBlock {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Self {
        Self { alpha1, alpha2, alpha3 }
    }

    pub fn from_slice(p: &[f64]) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    pub fn alphas(&self) -> [f64; 3] {
        [self.alpha1, self.alpha2, self.alpha3]
    }

    pub fn matrix(&self) -> Matrix4<Complex64> {
        // the three Pauli pairs commute, so the exponential factorizes
        pauli_pairs()
            .iter()
            .zip(self.alphas())
            .fold(Matrix4::identity(), |acc, (p, a)| {
                acc * (Matrix4::identity() * c(a.cos()) + p * (I * a.sin()))
            })
    }

    /// Derivatives with respect to (α₁, α₂, α₃): `i P_k U`.
    pub fn derivatives(&self) -> [Matrix4<Complex64>; 3] {
        let u = self.matrix();
        pauli_pairs().map(|p| p * u * I)
    }
}

/// Largest entrywise distance between `a` and `b` after removing the best global phase.
pub fn phase_distance<const N: usize>(
    a: &nalgebra::SMatrix<Complex64, N, N>,
    b: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { c(1.0) };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn entangler_on_up_up() {
        let u = EntanglerBlock::new(FRAC_PI_4, 0.0, 0.0).matrix();
        let s = FRAC_PI_4.sin();
        assert!((u[(0, 0)] - c(s)).norm() < 1e-15);
        assert!((u[(3, 0)] - I * s).norm() < 1e-15);
    }

    #[test]
    fn entangler_is_unitary() {
        let u = EntanglerBlock::new(0.3, -1.2, 2.5).matrix();
        let dev = (u.adjoint() * u - Matrix4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn euler_round_trip() {
        for &(f, t, l) in &[(0.3, 1.1, -0.7), (2.0, 0.0, 1.0), (-1.0, std::f64::consts::PI, 0.4)] {
            let u = EulerRotation::new(f, t, l).matrix();
            let back = EulerRotation::from_unitary(&u).matrix();
            assert!(phase_distance(&u, &back) < 1e-12);
        }
    }

    #[test]
    fn euler_derivatives_match_differences() {
        let r = EulerRotation::new(0.4, -0.9, 1.3);
        let d = r.derivatives();
        let h = 1e-6;
        for k in 0..3 {
            let mut plus = [r.phi, r.theta, r.lambda];
            let mut minus = plus;
            plus[k] += h;
            minus[k] -= h;
            let fd = (EulerRotation::from_slice(&plus).matrix()
                - EulerRotation::from_slice(&minus).matrix())
                / c(2.0 * h);
            assert!((fd - d[k]).iter().all(|z| z.norm() < 1e-8));
        }
    }
}
