use nalgebra::DMatrix;

use super::basis::RsosBasis;
use crate::anyon::ChainConfig;

/// Real symmetric sparse matrix stored by rows.
#[derive(Debug, Clone)]
pub struct SparseSymmetric {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymmetric {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(c, x)| x * v[c]).sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row {
                m[(r, c)] += x;
            }
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.transpose()).amax()
    }
}

/// Chain Hamiltonian from the RSOS-basis matrix elements
/// ⟨a'|e_j|a⟩ = δ(a_{j-1}, a_{j+1}) √(φ(a_j) φ(a'_j)) / φ(a_{j-1}).
pub fn rsos_hamiltonian(cfg: &ChainConfig, basis: &RsosBasis) -> SparseSymmetric {
    let d = &cfg.dynkin;
    let prefactor = d.hamiltonian_prefactor();
    let mut rows = vec![Vec::new(); basis.len()];
    let mut scratch = Vec::new();
    for (col, config) in basis.configs().iter().enumerate() {
        for j in cfg.generator_sites() {
            let left = config[cfg.wrap(j as isize - 1)] as usize;
            let right = config[cfg.wrap(j as isize + 1)] as usize;
            if left != right {
                continue;
            }
            let centre = config[j] as usize;
            for b in d.neighbors(left) {
                scratch.clone_from(config);
                scratch[j] = b as u8;
                let row = basis
                    .index_of(&scratch)
                    .expect("replacing a_j by a neighbour of a_{j±1} stays admissible");
                let value = prefactor * (d.phi(centre) * d.phi(b)).sqrt() / d.phi(left);
                rows[row].push((col, value));
            }
        }
    }
    for row in &mut rows {
        row.sort_by_key(|&(c, _)| c);
        row.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
    }
    SparseSymmetric { rows }
}
