//! The A_p Dynkin diagram and its Perron-Frobenius weights.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Node data of the A_p diagram. Node labels are 1-based throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct DynkinSpec {
    p: usize,
    gamma: f64,
    adjacency: Vec<Vec<u8>>,
    phi: Vec<f64>,
}

impl DynkinSpec {
    /// Builds A_p for `p >= 3`.
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 {
            return Err(invalid(format!("Dynkin diagram A_p needs p >= 3, got {p}")));
        }
        let gamma = PI / (p as f64 + 1.0);
        let adjacency = (1..=p)
            .map(|a| (1..=p).map(|b| u8::from(a.abs_diff(b) == 1)).collect())
            .collect();
        let norm = (2.0 * gamma / PI).sqrt();
        let phi = (1..=p).map(|a| norm * (a as f64 * gamma).sin()).collect();
        Ok(Self { p, gamma, adjacency, phi })
    }

    pub fn family(&self) -> &'static str {
        "A"
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// γ = π / (p + 1).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// q = exp(iγ).
    pub fn q(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.gamma)
    }

    /// q + 1/q = 2cos γ, the loop weight of the Temperley-Lieb algebra.
    pub fn loop_weight(&self) -> f64 {
        2.0 * self.gamma.cos()
    }

    /// Coupling in front of the sum of generators: -γ / (π sin γ).
    pub fn hamiltonian_prefactor(&self) -> f64 {
        -self.gamma / (PI * self.gamma.sin())
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        (1..=self.p).contains(&a) && (1..=self.p).contains(&b) && a.abs_diff(b) == 1
    }

    /// Labels linked to `a` in the diagram, ascending.
    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        [a.wrapping_sub(1), a + 1]
            .into_iter()
            .filter(move |&b| self.adjacent(a, b))
    }

    /// Perron weight φ(a) for 1-based `a`.
    pub fn phi(&self, a: usize) -> f64 {
        self.phi[a - 1]
    }

    pub fn phi_vector(&self) -> &[f64] {
        &self.phi
    }

    pub fn is_odd(a: usize) -> bool {
        a % 2 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_p() {
        assert!(DynkinSpec::new(2).is_err());
        assert!(DynkinSpec::new(0).is_err());
    }

    #[test]
    fn p3_weights() {
        let d = DynkinSpec::new(3).unwrap();
        let expected = [0.5, 0.5_f64.sqrt(), 0.5];
        for (a, e) in expected.iter().enumerate() {
            assert!((d.phi(a + 1) - e).abs() < 1e-7, "phi({})", a + 1);
        }
        let q = d.q();
        assert!(((q + 1.0 / q).re - 1.414_213_6).abs() < 1e-7);
        assert!((q + 1.0 / q).im.abs() < 1e-15);
    }

    #[test]
    fn perron_eigenvector_all_p() {
        for p in 3..=12 {
            let d = DynkinSpec::new(p).unwrap();
            for a in 0..p {
                assert_eq!(d.adjacency()[a][a], 0);
                let row: f64 = (0..p)
                    .map(|b| {
                        assert_eq!(d.adjacency()[a][b], d.adjacency()[b][a]);
                        d.adjacency()[a][b] as f64 * d.phi_vector()[b]
                    })
                    .sum();
                assert!((row - d.loop_weight() * d.phi_vector()[a]).abs() < 1e-12);
                assert!(d.phi_vector()[a] > 0.0);
            }
        }
    }

    #[test]
    fn prefactor_p3() {
        let d = DynkinSpec::new(3).unwrap();
        assert!((d.hamiltonian_prefactor() + 0.353_553_4).abs() < 1e-7);
    }

    #[test]
    fn neighbors_at_ends() {
        let d = DynkinSpec::new(4).unwrap();
        assert_eq!(d.neighbors(1).collect::<Vec<_>>(), vec![2]);
        assert_eq!(d.neighbors(2).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(d.neighbors(4).collect::<Vec<_>>(), vec![3]);
    }
}
