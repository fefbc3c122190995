use std::collections::HashMap;

use crate::anyon::{Boundary, ChainConfig};
use crate::error::{invalid, Result};

/// Admissible RSOS configurations in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct RsosBasis {
    sites: usize,
    configs: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl RsosBasis {
    fn from_configs(sites: usize, configs: Vec<Vec<u8>>) -> Self {
        let index = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Self { sites, configs, index }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn configs(&self) -> &[Vec<u8>] {
        &self.configs
    }

    pub fn index_of(&self, config: &[u8]) -> Option<usize> {
        self.index.get(config).copied()
    }

    /// Sub-basis of the configurations accepted by `keep`, order preserved.
    pub fn restrict(&self, keep: impl Fn(&[u8]) -> bool) -> Self {
        let configs = self.configs.iter().filter(|c| keep(c)).cloned().collect();
        Self::from_configs(self.sites, configs)
    }
}

/// Enumerates all admissible label sequences of the chain.
///
/// Open chains may pin their end labels with `boundary_values = Some((first, last))`;
/// `None` keeps every boundary sector. Periodic chains take no boundary values.
pub fn enumerate_basis(cfg: &ChainConfig, boundary_values: Option<(usize, usize)>) -> Result<RsosBasis> {
    let p = cfg.p();
    let n = cfg.sites;
    if let Some((first, last)) = boundary_values {
        if cfg.boundary == Boundary::Periodic {
            return Err(invalid("boundary values apply to open chains only"));
        }
        if !(1..=p).contains(&first) || !(1..=p).contains(&last) {
            return Err(invalid(format!("boundary values ({first}, {last}) outside 1..={p}")));
        }
    }
    let starts: Vec<usize> = match boundary_values {
        Some((first, _)) => vec![first],
        None => (1..=p).collect(),
    };
    let mut configs = Vec::new();
    let mut current = Vec::with_capacity(n);
    for a0 in starts {
        current.clear();
        current.push(a0 as u8);
        extend(cfg, boundary_values.map(|b| b.1), &mut current, &mut configs);
    }
    if configs.is_empty() {
        return Err(invalid(format!(
            "no admissible configurations for {n} sites with boundary {boundary_values:?}"
        )));
    }
    Ok(RsosBasis::from_configs(n, configs))
}

fn extend(cfg: &ChainConfig, last: Option<usize>, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let n = cfg.sites;
    if current.len() == n {
        let tail = current[n - 1] as usize;
        let closes = match cfg.boundary {
            Boundary::Periodic => cfg.dynkin.adjacent(tail, current[0] as usize),
            Boundary::Open => last.is_none_or(|b| b == tail),
        };
        if closes {
            out.push(current.clone());
        }
        return;
    }
    let prev = *current.last().expect("non-empty") as usize;
    for b in cfg.dynkin.neighbors(prev) {
        if let Some(target) = last {
            // remaining steps must be able to reach the pinned end label
            let remaining = n - 1 - current.len();
            if b.abs_diff(target) > remaining || (b.abs_diff(target) + remaining) % 2 == 1 {
                continue;
            }
        }
        current.push(b as u8);
        extend(cfg, last, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_count_is_trace_of_adjacency_power() {
        for (p, sites) in [(3, 4), (4, 4), (4, 6), (5, 6)] {
            let cfg = ChainConfig::new(p, sites, Boundary::Periodic).unwrap();
            let basis = enumerate_basis(&cfg, None).unwrap();
            let a = nalgebra::DMatrix::from_fn(p, p, |i, j| cfg.dynkin.adjacency()[i][j] as f64);
            let trace = (0..sites - 1).fold(a.clone(), |acc, _| &acc * &a).trace();
            assert_eq!(basis.len(), trace.round() as usize, "p={p} sites={sites}");
        }
        let cfg = ChainConfig::new(3, 4, Boundary::Periodic).unwrap();
        assert_eq!(enumerate_basis(&cfg, None).unwrap().len(), 8);
    }

    #[test]
    fn pinned_open_chain() {
        let cfg = ChainConfig::new(4, 3, Boundary::Open).unwrap();
        let basis = enumerate_basis(&cfg, Some((2, 2))).unwrap();
        assert_eq!(basis.configs(), &[vec![2, 1, 2], vec![2, 3, 2]]);
        assert!(enumerate_basis(&cfg, Some((1, 2))).is_err());
        assert!(enumerate_basis(&cfg, Some((0, 2))).is_err());
    }

    #[test]
    fn lexicographic_and_admissible() {
        let cfg = ChainConfig::new(5, 5, Boundary::Open).unwrap();
        let basis = enumerate_basis(&cfg, None).unwrap();
        assert!(basis.configs().windows(2).all(|w| w[0] < w[1]));
        for c in basis.configs() {
            assert!(c.windows(2).all(|w| w[0].abs_diff(w[1]) == 1));
            assert_eq!(basis.index_of(c).map(|i| &basis.configs()[i]), Some(c));
        }
    }

    #[test]
    fn periodic_rejects_boundary_values() {
        let cfg = ChainConfig::new(4, 4, Boundary::Periodic).unwrap();
        assert!(enumerate_basis(&cfg, Some((2, 1))).is_err());
    }
}
