//! Diagnostics of a chain state: parity profile, site occupations, sector weight and ⟨Yu⟩.

use serde::Serialize;

use crate::anyon::{build_hamiltonian, measure_yu, ChainConfig};
use crate::error::Result;
use crate::statevector::Statevector;

/// Sectors below this weight do not widen the allowed label sets.
pub const SECTOR_WEIGHT_FLOOR: f64 = 0.01;

fn site_code(index: usize, j: usize, n: usize) -> u32 {
    (index >> (n * j) & ((1 << n) - 1)) as u32
}

/// ⟨∏ Z⟩ over the qubits of each site.
pub fn parity_profile(state: &Statevector, cfg: &ChainConfig) -> Vec<f64> {
    let n = cfg.bits_per_site();
    let mut out = vec![0.0; cfg.sites];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += if site_code(i, j, n).count_ones() % 2 == 0 { w } else { -w };
        }
    }
    out
}

/// `probs[j][a-1] = ⟨|a⟩⟨a|_j⟩`; rows fall short of 1 by the site's unphysical weight.
pub fn site_probabilities(state: &Statevector, cfg: &ChainConfig) -> Vec<Vec<f64>> {
    let n = cfg.bits_per_site();
    let mut out = vec![vec![0.0; cfg.p()]; cfg.sites];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (j, row) in out.iter_mut().enumerate() {
            if let Some(label) = cfg.encoding.label(site_code(i, j, n)) {
                row[label - 1] += w;
            }
        }
    }
    out
}

/// Labels of every site, or `None` if some site holds an unused bit string.
fn labels(index: usize, cfg: &ChainConfig) -> Option<Vec<usize>> {
    let n = cfg.bits_per_site();
    (0..cfg.sites).map(|j| cfg.encoding.label(site_code(index, j, n))).collect()
}

/// Whether a register index encodes an admissible RSOS configuration.
pub fn is_admissible(index: usize, cfg: &ChainConfig) -> bool {
    let Some(l) = labels(index, cfg) else { return false };
    let bonds = if cfg.is_periodic() { cfg.sites } else { cfg.sites - 1 };
    (0..bonds).all(|j| cfg.dynkin.adjacent(l[j], l[(j + 1) % cfg.sites]))
}

/// Total weight on admissible configurations.
pub fn sector_overlap(state: &Statevector, cfg: &ChainConfig) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| is_admissible(*i, cfg))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// ⟨Yu⟩ on a periodic chain, as (real part, imaginary part).
pub fn yu_expectation(state: &Statevector, cfg: &ChainConfig) -> Result<(f64, f64)> {
    measure_yu(state, cfg).map(|z| (z.re, z.im))
}

/// Labels reachable from `from` in exactly `steps` moves on A_p (1-based mask).
fn reachable(cfg: &ChainConfig, from: usize, steps: usize) -> Vec<bool> {
    let p = cfg.p();
    let mut cur = vec![false; p + 1];
    cur[from] = true;
    for _ in 0..steps {
        let mut next = vec![false; p + 1];
        for a in 1..=p {
            if cur[a] {
                for b in cfg.dynkin.neighbors(a) {
                    next[b] = true;
                }
            }
        }
        cur = next;
    }
    cur
}

/// Per-site labels compatible with the sectors that carry the state.
///
/// Open chains conserve both end labels, so a label is allowed at site j if it
/// lies on some walk between the end labels of a sector with weight at least
/// [`SECTOR_WEIGHT_FLOOR`]. Periodic chains split into two parity patterns;
/// a label is allowed if its parity matches a pattern above the floor.
pub fn allowed_labels(state: &Statevector, cfg: &ChainConfig) -> Vec<Vec<bool>> {
    let p = cfg.p();
    let n = cfg.bits_per_site();
    let last = cfg.sites - 1;
    let mut allowed = vec![vec![false; p]; cfg.sites];
    if cfg.is_periodic() {
        // weight of configurations whose site 0 carries an odd label
        let mut pattern = [0.0; 2];
        for (i, a) in state.amplitudes().iter().enumerate() {
            if let Some(l) = cfg.encoding.label(site_code(i, 0, n)) {
                pattern[l % 2] += a.norm_sqr();
            }
        }
        for (odd_first, &w) in pattern.iter().enumerate() {
            if w < SECTOR_WEIGHT_FLOOR {
                continue;
            }
            for (j, row) in allowed.iter_mut().enumerate() {
                for a in 1..=p {
                    if (a + j) % 2 == odd_first {
                        row[a - 1] = true;
                    }
                }
            }
        }
        return allowed;
    }
    let mut ends = vec![vec![0.0; p + 1]; p + 1];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let (f, l) = (cfg.encoding.label(site_code(i, 0, n)), cfg.encoding.label(site_code(i, last, n)));
        if let (Some(f), Some(l)) = (f, l) {
            ends[f][l] += a.norm_sqr();
        }
    }
    for f in 1..=p {
        for l in 1..=p {
            if ends[f][l] < SECTOR_WEIGHT_FLOOR {
                continue;
            }
            for (j, row) in allowed.iter_mut().enumerate() {
                let (left, right) = (reachable(cfg, f, j), reachable(cfg, l, last - j));
                for a in 1..=p {
                    row[a - 1] |= left[a] && right[a];
                }
            }
        }
    }
    allowed
}

/// Per-site weight outside [`allowed_labels`], unused bit strings included.
pub fn disallowed_weight(state: &Statevector, cfg: &ChainConfig) -> Vec<f64> {
    let allowed = allowed_labels(state, cfg);
    site_probabilities(state, cfg)
        .iter()
        .zip(&allowed)
        .map(|(row, ok)| {
            let inside: f64 = row.iter().zip(ok).filter(|(_, &k)| k).map(|(p, _)| p).sum();
            (1.0 - inside).max(0.0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableReport {
    pub energy: f64,
    pub parity_profile: Vec<f64>,
    pub site_probs: Vec<Vec<f64>>,
    pub sector_overlap: f64,
    pub disallowed: Vec<f64>,
    pub yu: Option<f64>,
    /// Imaginary part of ⟨Yu⟩; zero on exact eigenstates.
    pub yu_imag: Option<f64>,
}

impl ObservableReport {
    /// All diagnostics; ⟨Yu⟩ only on periodic chains.
    pub fn measure(state: &Statevector, cfg: &ChainConfig) -> Result<Self> {
        state.check_normalized()?;
        let energy = state.expectation(&build_hamiltonian(cfg)?)?;
        let yu = if cfg.is_periodic() { Some(yu_expectation(state, cfg)?) } else { None };
        let (yu, yu_imag) = (yu.map(|v| v.0), yu.map(|v| v.1));
        Ok(Self {
            energy,
            parity_profile: parity_profile(state, cfg),
            site_probs: site_probabilities(state, cfg),
            sector_overlap: sector_overlap(state, cfg),
            disallowed: disallowed_weight(state, cfg),
            yu,
            yu_imag,
        })
    }

    /// Smallest |parity| among sites whose sign follows the pattern set by site 0.
    pub fn min_alternating_parity(&self) -> f64 {
        let sign0 = self.parity_profile.first().copied().unwrap_or(0.0).signum();
        self.parity_profile
            .iter()
            .enumerate()
            .map(|(j, &x)| if j % 2 == 0 { x * sign0 } else { -x * sign0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_disallowed(&self) -> f64 {
        self.disallowed.iter().copied().fold(0.0, f64::max)
    }
}
