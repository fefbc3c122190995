use serde::{Deserialize, Serialize};

use super::dynkin::DynkinSpec;
use super::encoding::SiteEncoding;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Direction of the one-site translation `u` on a periodic chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftDirection {
    /// `|a_0, …, a_{L-1}⟩ → |a_{L-1}, a_0, …⟩`.
    #[default]
    Forward,
    /// `|a_0, …, a_{L-1}⟩ → |a_1, …, a_{L-1}, a_0⟩`.
    Backward,
}

/// An RSOS chain of `sites` nodes embedded in `bits_per_site * sites` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub dynkin: DynkinSpec,
    pub encoding: SiteEncoding,
    pub sites: usize,
    pub boundary: Boundary,
    pub shift: ShiftDirection,
}

impl ChainConfig {
    pub fn new(p: usize, sites: usize, boundary: Boundary) -> Result<Self> {
        match boundary {
            Boundary::Open if sites < 3 => {
                return Err(invalid(format!("open chains need at least 3 sites, got {sites}")))
            }
            Boundary::Periodic if sites < 4 || sites % 2 == 1 => {
                return Err(invalid(format!(
                    "periodic chains need an even number of sites >= 4, got {sites}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            dynkin: DynkinSpec::new(p)?,
            encoding: SiteEncoding::new(p)?,
            sites,
            boundary,
            shift: ShiftDirection::Forward,
        })
    }

    /// Builds the chain that fills `qubits` qubits exactly.
    pub fn from_qubits(p: usize, qubits: usize, boundary: Boundary) -> Result<Self> {
        let bits = super::encoding::bits_for(p.max(2));
        if qubits % bits != 0 {
            return Err(invalid(format!(
                "{qubits} qubits is not a multiple of {bits} qubits per site"
            )));
        }
        Self::new(p, qubits / bits, boundary)
    }

    pub fn with_shift(mut self, shift: ShiftDirection) -> Self {
        self.shift = shift;
        self
    }

    pub fn p(&self) -> usize {
        self.dynkin.p()
    }

    pub fn bits_per_site(&self) -> usize {
        self.encoding.bits_per_site()
    }

    pub fn num_qubits(&self) -> usize {
        self.bits_per_site() * self.sites
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Sites carrying a Temperley-Lieb generator in the Hamiltonian.
    ///
    /// Open chains have no generator on the two end sites, so the boundary
    /// labels are conserved.
    pub fn generator_sites(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Open => 1..self.sites - 1,
            Boundary::Periodic => 0..self.sites,
        }
    }

    pub(crate) fn check_generator_site(&self, j: usize) -> Result<()> {
        if self.generator_sites().contains(&j) {
            Ok(())
        } else {
            Err(invalid(format!(
                "generator site {j} out of range {:?} for {:?} chain",
                self.generator_sites(),
                self.boundary
            )))
        }
    }

    /// Site index modulo the chain length.
    pub fn wrap(&self, j: isize) -> usize {
        j.rem_euclid(self.sites as isize) as usize
    }

    /// Qubits of RSOS site `j`, offset 0 first.
    pub fn site_qubits(&self, j: usize) -> impl Iterator<Item = usize> {
        let n = self.bits_per_site();
        n * j..n * (j + 1)
    }
}
