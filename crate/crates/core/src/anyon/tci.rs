//! Compact one-qubit-per-site encoding of the A_4 (tricritical Ising) chain.
//!
//! With odd sites holding {1, 3} and even sites {2, 4}, labels map to
//! `|1⟩ = |4⟩ = ⇓` and `|2⟩ = |3⟩ = ⇑`. Physical states never have two
//! neighbouring down spins: P⁻_j P⁻_{j+1} |ψ⟩ = 0.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::algebra::{verify_relations, AlgebraReport};
use super::chain::Boundary;
use super::dynkin::DynkinSpec;
use super::operator::LocalOperator;
use crate::error::{invalid, Error, Result};

/// Largest chain [`tci_ground_energy`] diagonalizes densely.
pub const TCI_DENSE_MAX_SITES: usize = 16;

/// Geometry of a compact-encoded chain: one qubit per RSOS site.
#[derive(Debug, Clone, PartialEq)]
pub struct TciChain {
    pub sites: usize,
    pub boundary: Boundary,
    dynkin: DynkinSpec,
}

impl TciChain {
    pub fn new(sites: usize, boundary: Boundary) -> Result<Self> {
        let ok = match boundary {
            Boundary::Open => sites >= 3,
            Boundary::Periodic => sites >= 4 && sites % 2 == 0,
        };
        if !ok {
            return Err(invalid(format!("{sites} sites is not a valid {boundary:?} chain")));
        }
        Ok(Self { sites, boundary, dynkin: DynkinSpec::new(4)? })
    }

    pub fn dynkin(&self) -> &DynkinSpec {
        &self.dynkin
    }

    /// λ = φ(1).
    pub fn lambda(&self) -> f64 {
        self.dynkin.phi(1)
    }

    /// μ = φ(2).
    pub fn mu(&self) -> f64 {
        self.dynkin.phi(2)
    }

    pub fn generator_sites(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Open => 1..self.sites - 1,
            Boundary::Periodic => 0..self.sites,
        }
    }

    /// Whether a register basis state satisfies the no-adjacent-down constraint.
    pub fn is_physical(&self, index: usize) -> bool {
        let down = |j: usize| index >> (j % self.sites) & 1 == 1;
        let bonds = match self.boundary {
            Boundary::Open => self.sites - 1,
            Boundary::Periodic => self.sites,
        };
        (0..bonds).all(|j| !(down(j) && down(j + 1)))
    }

    fn distance(&self, j: usize, k: usize) -> usize {
        let d = j.abs_diff(k);
        match self.boundary {
            Boundary::Open => d,
            Boundary::Periodic => d.min(self.sites - d),
        }
    }

    /// No two neighbouring down spins among the qubits of `support`.
    fn allowed_window(&self, support: &[usize], pattern: usize) -> bool {
        let down = |q: usize| pattern >> q & 1 == 1;
        support.iter().all(|&q| {
            let next = match self.boundary {
                Boundary::Open if q + 1 == self.sites => return true,
                _ => (q + 1) % self.sites,
            };
            !(down(q) && support.contains(&next) && down(next))
        })
    }
}

/// TL and braid relation residues of the compact generators on the physical subspace.
pub fn verify_tci_algebra(chain: &TciChain) -> Result<AlgebraReport> {
    let gens = chain
        .generator_sites()
        .map(|j| Ok((j, build_tci_tl(j, chain)?)))
        .collect::<Result<Vec<_>>>()?;
    verify_relations(
        &gens,
        &chain.dynkin,
        |j, k| chain.distance(j, k),
        |support, pattern| chain.allowed_window(support, pattern),
    )
}

/// Lowest eigenvalue of the compact Hamiltonian on the no-adjacent-down sector.
pub fn tci_ground_energy(chain: &TciChain) -> Result<f64> {
    if chain.sites > TCI_DENSE_MAX_SITES {
        return Err(Error::UnsupportedOperation(format!(
            "dense compact-chain solve limited to {TCI_DENSE_MAX_SITES} sites"
        )));
    }
    let physical: Vec<usize> = (0..1usize << chain.sites).filter(|&i| chain.is_physical(i)).collect();
    let position = |i: usize| physical.binary_search(&i).ok();
    let mut h = DMatrix::<f64>::zeros(physical.len(), physical.len());
    for term in build_tci_hamiltonian(chain)? {
        for (col, &index) in physical.iter().enumerate() {
            for (out, amp) in term.apply_to_basis(index) {
                let Some(row) = position(out) else {
                    return Err(invalid(format!("compact generator leaks to {out:#b}")));
                };
                h[(row, col)] += amp.re;
            }
        }
    }
    let energy = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if !energy.is_finite() {
        return Err(Error::NonFinite("compact-chain spectrum".into()));
    }
    Ok(energy)
}

/// e_j = (μ/λ) P⁻P⁺P⁻ + (1/μ) P⁺(μP⁺ + λP⁻ + √(λμ) X)P⁺ on qubits j−1, j, j+1.
pub fn build_tci_tl(j: usize, chain: &TciChain) -> Result<LocalOperator> {
    if !chain.generator_sites().contains(&j) {
        return Err(invalid(format!(
            "generator site {j} out of range {:?}",
            chain.generator_sites()
        )));
    }
    let (lambda, mu) = (chain.lambda(), chain.mu());
    let c = |x: f64| Complex64::new(x, 0.0);
    // local bits: 0 = left, 1 = centre, 2 = right; 1 means down
    let mut m = DMatrix::zeros(8, 8);
    m[(0b101, 0b101)] = c(mu / lambda);
    m[(0b000, 0b000)] = c(1.0);
    m[(0b010, 0b010)] = c(lambda / mu);
    m[(0b000, 0b010)] = c((lambda * mu).sqrt() / mu);
    m[(0b010, 0b000)] = c((lambda * mu).sqrt() / mu);
    let n = chain.sites;
    let support = vec![(j + n - 1) % n, j, (j + 1) % n];
    LocalOperator::new(support, m)
}

pub fn build_tci_hamiltonian(chain: &TciChain) -> Result<Vec<LocalOperator>> {
    let k = Complex64::new(chain.dynkin.hamiltonian_prefactor(), 0.0);
    chain
        .generator_sites()
        .map(|j| Ok(build_tci_tl(j, chain)?.scaled(k)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_at_p4() {
        let c = TciChain::new(5, Boundary::Open).unwrap();
        assert!((c.lambda() - 0.371_748_0).abs() < 1e-7);
        assert!((c.mu() - 0.601_501_0).abs() < 1e-7);
    }

    #[test]
    fn constraint() {
        let c = TciChain::new(4, Boundary::Open).unwrap();
        assert!(c.is_physical(0b0101));
        assert!(!c.is_physical(0b0110));
        assert!(c.is_physical(0b1001));
        let p = TciChain::new(4, Boundary::Periodic).unwrap();
        assert!(!p.is_physical(0b1001));
    }

    #[test]
    fn relations_hold() {
        for (sites, b) in [(5, Boundary::Open), (6, Boundary::Open), (6, Boundary::Periodic)] {
            let r = verify_tci_algebra(&TciChain::new(sites, b).unwrap()).unwrap();
            assert!(r.max_deviation() <= 1e-12, "{sites} {b:?}: {r:?}");
        }
    }

    #[test]
    fn matches_generic_open_energy() {
        let e = tci_ground_energy(&TciChain::new(6, Boundary::Open).unwrap()).unwrap();
        assert!((e + 1.748_619_907_196_4).abs() < 1e-9, "{e}");
    }

    #[test]
    fn window_constraint_wraps() {
        let c = TciChain::new(4, Boundary::Periodic).unwrap();
        assert!(!c.allowed_window(&[3, 0, 1], 0b1001));
        assert!(c.allowed_window(&[0, 1, 2], 0b1001));
        let o = TciChain::new(4, Boundary::Open).unwrap();
        assert!(o.allowed_window(&[2, 3], 0b0101));
    }

    #[test]
    fn hermitian_and_range() {
        let c = TciChain::new(5, Boundary::Open).unwrap();
        assert!(build_tci_tl(0, &c).is_err());
        assert!(build_tci_tl(4, &c).is_err());
        for j in 1..4 {
            assert!(build_tci_tl(j, &c).unwrap().is_hermitian(1e-15));
        }
    }
}
