//! Encoding of RSOS node labels into blocks of qubits.
//!
//! A node `a` occupies `n_p = ceil(log2 p)` qubits. Spin down is bit 1
//! (Z eigenvalue -1), and the leftmost symbol of a ket such as `↓↑` sits
//! on the lowest qubit of the block. Odd labels always carry an odd number
//! of down spins, so the block parity `∏ Z` distinguishes odd from even nodes.

use crate::error::{invalid, Result};

const P5_TABLE: [&str; 5] = ["ddd", "ddu", "duu", "dud", "udu"];
const P4_TABLE: [&str; 4] = ["du", "dd", "ud", "uu"];

pub const MAX_SUPPORTED_P: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteEncoding {
    p: usize,
    bits: usize,
    codes: Vec<u32>,
    labels: Vec<Option<usize>>,
}

impl SiteEncoding {
    /// Encoding table for `3 <= p <= 8`.
    ///
    /// p = 3, 4 and 5 use the fixed published tables. Larger diagrams keep the
    /// p = 5 table and give every new node the smallest free string (down
    /// before up, read left to right) whose down-spin count has the node's parity.
    pub fn new(p: usize) -> Result<Self> {
        if !(3..=MAX_SUPPORTED_P).contains(&p) {
            return Err(invalid(format!(
                "site encoding supports 3 <= p <= {MAX_SUPPORTED_P}, got {p}"
            )));
        }
        let bits = bits_for(p);
        let mut codes: Vec<u32> = if p <= 4 {
            P4_TABLE[..p].iter().map(|k| parse_ket(k)).collect()
        } else {
            P5_TABLE.iter().map(|k| parse_ket(k)).collect()
        };
        for a in codes.len() + 1..=p {
            let want_odd = a % 2 == 1;
            let code = lexicographic_strings(bits)
                .find(|c| !codes.contains(c) && (c.count_ones() % 2 == 1) == want_odd)
                .ok_or_else(|| invalid(format!("no free code for node {a}")))?;
            codes.push(code);
        }
        let mut labels = vec![None; 1 << bits];
        for (i, &c) in codes.iter().enumerate() {
            labels[c as usize] = Some(i + 1);
        }
        Ok(Self { p, bits, codes, labels })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Qubits per RSOS site, n_p.
    pub fn bits_per_site(&self) -> usize {
        self.bits
    }

    /// Bit string of node `a`; bit m is the spin on offset m (1 = down).
    pub fn code(&self, a: usize) -> u32 {
        self.codes[a - 1]
    }

    /// Node encoded by `code`, or `None` for an unphysical string.
    pub fn label(&self, code: u32) -> Option<usize> {
        self.labels.get(code as usize).copied().flatten()
    }

    /// Ket notation of node `a`, e.g. `↓↑`.
    pub fn ket(&self, a: usize) -> String {
        let c = self.code(a);
        (0..self.bits)
            .map(|m| if c >> m & 1 == 1 { '↓' } else { '↑' })
            .collect()
    }
}

pub(crate) fn bits_for(p: usize) -> usize {
    (usize::BITS - (p - 1).leading_zeros()) as usize
}

/// `d` is spin down, anything else spin up; the first symbol is offset 0.
fn parse_ket(ket: &str) -> u32 {
    ket.chars()
        .enumerate()
        .map(|(m, ch)| u32::from(ch == 'd') << m)
        .sum()
}

/// All strings of `bits` symbols ordered with down before up at each position.
fn lexicographic_strings(bits: usize) -> impl Iterator<Item = u32> {
    (0..1u32 << bits).map(move |rank| {
        // rank bit (bits-1-m) = 0 means down at offset m
        (0..bits)
            .map(|m| u32::from(rank >> (bits - 1 - m) & 1 == 0) << m)
            .sum()
    })
}
