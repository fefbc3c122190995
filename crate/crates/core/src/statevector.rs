//! Dense statevector over a qubit register.
//!
//! Amplitudes are stored flat; bit `k` of a basis index is the state of
//! qubit `k` (1 = spin down).

use std::io::{self, Write};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::anyon::{LocalOperator, SiteEncoding};
use crate::error::{invalid, Error, Result};

pub const MAX_QUBITS: usize = 28;

/// Norm drift beyond this after a unitary evolution is reported as an error.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_QUBITS {
        return Err(invalid(format!("{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")));
    }
    Ok(())
}

impl Statevector {
    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(invalid(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_size(num_qubits)?;
        Ok(Self { num_qubits, amps })
    }

    /// Product state of RSOS labels, site 0 on the lowest qubits.
    pub fn from_rsos_product(labels: &[usize], encoding: &SiteEncoding) -> Result<Self> {
        let bits = encoding.bits_per_site();
        let mut index = 0usize;
        for (j, &a) in labels.iter().enumerate() {
            if !(1..=encoding.p()).contains(&a) {
                return Err(invalid(format!("label {a} at site {j} outside 1..={}", encoding.p())));
            }
            index |= (encoding.code(a) as usize) << (bits * j);
        }
        Self::basis(bits * labels.len(), index)
    }

    /// The alternating product `|2, 1, 2, 1, …⟩`.
    pub fn alternating_21(sites: usize, encoding: &SiteEncoding) -> Result<Self> {
        let labels: Vec<usize> = (0..sites).map(|j| if j % 2 == 0 { 2 } else { 1 }).collect();
        Self::from_rsos_product(&labels, encoding)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Errors when the norm differs from one by more than [`NORM_DRIFT_TOLERANCE`].
    pub fn check_normalized(&self) -> Result<()> {
        let drift = (self.norm() - 1.0).abs();
        if drift > NORM_DRIFT_TOLERANCE || !drift.is_finite() {
            return Err(Error::NormDrift { drift });
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_support(&self, support: &[usize]) -> Result<()> {
        match support.iter().find(|&&q| q >= self.num_qubits) {
            Some(q) => Err(invalid(format!(
                "support qubit {q} outside a {}-qubit register",
                self.num_qubits
            ))),
            None => Ok(()),
        }
    }

    /// Applies `op` in place. The operator need not be unitary.
    pub fn apply_local(&mut self, op: &LocalOperator) -> Result<()> {
        self.check_support(op.support())?;
        let local_dim = 1usize << op.width();
        let offsets: Vec<usize> = (0..local_dim).map(|l| op.scatter(l)).collect();
        let mask = op.mask();
        let mut input = vec![ZERO; local_dim];
        let mut output = vec![ZERO; local_dim];
        for base in (0..self.amps.len()).filter(|i| i & mask == 0) {
            for (slot, &off) in input.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            output.fill(ZERO);
            for &(r, c, v) in op.nonzeros() {
                output[r] += v * input[c];
            }
            for (&val, &off) in output.iter().zip(&offsets) {
                self.amps[base | off] = val;
            }
        }
        Ok(())
    }

    /// Σ_t T_t |self⟩ for a list of local terms.
    pub fn apply_sum(&self, terms: &[LocalOperator]) -> Result<Self> {
        let mut acc = vec![ZERO; self.amps.len()];
        for term in terms {
            let mut scratch = self.clone();
            scratch.apply_local(term)?;
            for (a, s) in acc.iter_mut().zip(scratch.amps) {
                *a += s;
            }
        }
        Ok(Self { num_qubits: self.num_qubits, amps: acc })
    }

    /// ⟨self| Σ_t T_t |self⟩; errors if the imaginary residue exceeds 1e-10.
    pub fn expectation(&self, terms: &[LocalOperator]) -> Result<f64> {
        let value = self.inner(&self.apply_sum(terms)?);
        if value.im.abs() > 1e-10 * value.norm().max(1.0) {
            return Err(Error::NumericalFailure {
                message: "expectation value of a non-Hermitian sum".into(),
                residual: value.im.abs(),
            });
        }
        Ok(value.re)
    }

    /// Moves qubit `k` to position `perm[k]`.
    pub fn apply_permutation(&mut self, perm: &[usize]) -> Result<()> {
        if perm.len() != self.num_qubits {
            return Err(invalid(format!(
                "permutation of length {} on {} qubits",
                perm.len(),
                self.num_qubits
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &t in perm {
            if t >= perm.len() || std::mem::replace(&mut seen[t], true) {
                return Err(invalid(format!("{perm:?} is not a bijection")));
            }
        }
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let j = perm
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &t)| acc | (i >> k & 1) << t);
            out[j] = a;
        }
        self.amps = out;
        Ok(())
    }

    /// Single-qubit matrix `m` on qubit `q`.
    pub fn apply_1q(&mut self, q: usize, m: &Matrix2<Complex64>) {
        let stride = 1usize << q;
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi) {
                let (a0, a1) = (*a, *b);
                *a = m00 * a0 + m01 * a1;
                *b = m10 * a0 + m11 * a1;
            }
        }
    }

    /// Two-qubit matrix `m` with local index `b(q0) + 2 b(q1)`.
    pub fn apply_2q(&mut self, q0: usize, q1: usize, m: &Matrix4<Complex64>) {
        let (s0, s1) = (1usize << q0, 1usize << q1);
        let offs = [0, s0, s1, s0 | s1];
        for base in pair_bases(self.amps.len(), s0, s1) {
            let v = offs.map(|o| self.amps[base | o]);
            for (r, &o) in offs.iter().enumerate() {
                self.amps[base | o] =
                    m[(r, 0)] * v[0] + m[(r, 1)] * v[1] + m[(r, 2)] * v[2] + m[(r, 3)] * v[3];
            }
        }
    }

    /// Reduced transition matrix `T_ab = Σ conj(bra_a·) self_b·` on qubit `q`,
    /// so that `⟨bra|M|self⟩ = Σ_ab T_ab M_ab` for `M` acting on `q`.
    pub fn transition_1q(&self, bra: &Self, q: usize) -> Matrix2<Complex64> {
        let stride = 1usize << q;
        let mut t = Matrix2::zeros();
        for (kb, bb) in self.amps.chunks_exact(2 * stride).zip(bra.amps.chunks_exact(2 * stride)) {
            let (k0, k1) = kb.split_at(stride);
            let (b0, b1) = bb.split_at(stride);
            for i in 0..stride {
                let (x0, x1) = (b0[i].conj(), b1[i].conj());
                t[(0, 0)] += x0 * k0[i];
                t[(0, 1)] += x0 * k1[i];
                t[(1, 0)] += x1 * k0[i];
                t[(1, 1)] += x1 * k1[i];
            }
        }
        t
    }

    /// Two-qubit analogue of [`Statevector::transition_1q`], local index `b(q0) + 2 b(q1)`.
    pub fn transition_2q(&self, bra: &Self, q0: usize, q1: usize) -> Matrix4<Complex64> {
        let (s0, s1) = (1usize << q0, 1usize << q1);
        let offs = [0, s0, s1, s0 | s1];
        let mut t = Matrix4::zeros();
        for base in pair_bases(self.amps.len(), s0, s1) {
            let k = offs.map(|o| self.amps[base | o]);
            let b = offs.map(|o| bra.amps[base | o].conj());
            for r in 0..4 {
                for c in 0..4 {
                    t[(r, c)] += b[r] * k[c];
                }
            }
        }
        t
    }

    /// Writes amplitudes as little-endian interleaved (re, im) f64 pairs, basis index ascending.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        for z in &self.amps {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() % 16 != 0 {
            return Err(invalid("amplitude dump length is not a multiple of 16 bytes"));
        }
        let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
        let amps = bytes
            .chunks_exact(16)
            .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
            .collect();
        Self::from_amplitudes(amps)
    }
}

/// Indices with zero bits at the positions of `s0` and `s1`.
fn pair_bases(len: usize, s0: usize, s1: usize) -> impl Iterator<Item = usize> {
    let (lo, hi) = (s0.min(s1), s0.max(s1));
    (0..len >> 2).map(move |k| {
        let k = (k & !(lo - 1)) << 1 | (k & (lo - 1));
        (k & !(hi - 1)) << 1 | (k & (hi - 1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, seed: u64) -> Statevector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<_> = (0..1 << n)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Statevector::from_amplitudes(amps.into_iter().map(|z| z / norm).collect()).unwrap()
    }

    fn random_op(support: Vec<usize>, seed: u64) -> LocalOperator {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << support.len();
        let m = DMatrix::from_fn(d, d, |_, _| c(rng.random(), rng.random()));
        LocalOperator::new(support, m).unwrap()
    }

    #[test]
    fn rsos_product_states() {
        let e4 = SiteEncoding::new(4).unwrap();
        let s = Statevector::from_rsos_product(&[2, 1], &e4).unwrap();
        // ↓↓↓↑ on qubits 0..3
        assert_eq!(s.amplitudes()[0b0111], c(1.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let e5 = SiteEncoding::new(5).unwrap();
        let s = Statevector::from_rsos_product(&[1], &e5).unwrap();
        assert_eq!(s.amplitudes()[0b111], c(1.0, 0.0));
        assert!(Statevector::from_rsos_product(&[6], &e5).is_err());
        assert!(Statevector::from_rsos_product(&[0], &e5).is_err());
    }

    #[test]
    fn size_guard() {
        assert!(Statevector::basis(29, 0).is_err());
        assert!(Statevector::basis(3, 8).is_err());
    }

    #[test]
    fn identity_leaves_state() {
        let s = random_state(5, 1);
        let mut t = s.clone();
        t.apply_local(&LocalOperator::identity(vec![4, 0, 2])).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn support_out_of_range() {
        let mut s = random_state(3, 2);
        assert!(s.apply_local(&LocalOperator::identity(vec![3])).is_err());
    }

    #[test]
    fn disjoint_supports_commute() {
        let s = random_state(6, 3);
        let a = random_op(vec![0, 3], 4);
        let b = random_op(vec![5, 1, 2], 5);
        let mut ab = s.clone();
        ab.apply_local(&a).unwrap();
        ab.apply_local(&b).unwrap();
        let mut ba = s;
        ba.apply_local(&b).unwrap();
        ba.apply_local(&a).unwrap();
        for (x, y) in ab.amplitudes().iter().zip(ba.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn local_matches_dense() {
        let s = random_state(5, 6);
        let op = random_op(vec![4, 1, 2], 7);
        let mut t = s.clone();
        t.apply_local(&op).unwrap();
        let dense = op.to_dense(5);
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        let w = dense * v;
        for (x, y) in t.amplitudes().iter().zip(w.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn gate_kernels_match_local_operator() {
        let s = random_state(4, 8);
        let m2 = random_op(vec![2], 9);
        let m4 = random_op(vec![3, 1], 10);
        let mut a = s.clone();
        a.apply_local(&m2).unwrap();
        a.apply_local(&m4).unwrap();
        let mut b = s;
        b.apply_1q(2, &Matrix2::from_iterator(m2.matrix().iter().copied()));
        b.apply_2q(3, 1, &Matrix4::from_iterator(m4.matrix().iter().copied()));
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn permutation_checks() {
        let s = random_state(3, 11);
        let mut t = s.clone();
        t.apply_permutation(&[0, 1, 2]).unwrap();
        assert_eq!(s, t);
        assert!(t.apply_permutation(&[0, 0, 1]).is_err());
        assert!(t.apply_permutation(&[0, 1]).is_err());
        let mut u = Statevector::basis(3, 0b001).unwrap();
        u.apply_permutation(&[2, 0, 1]).unwrap();
        assert_eq!(u.amplitudes()[0b100], c(1.0, 0.0));
    }

    #[test]
    fn inner_and_binary_dump() {
        let s = random_state(4, 12);
        assert!((s.inner(&s) - c(1.0, 0.0)).norm() < 1e-12);
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 * 16);
        assert_eq!(&buf[..8], &s.amplitudes()[0].re.to_le_bytes());
        assert_eq!(Statevector::read_binary(&buf).unwrap(), s);
    }

    #[test]
    fn norm_drift_is_reported() {
        let s = Statevector::from_amplitudes(vec![c(1.0, 0.0), c(0.1, 0.0)]).unwrap();
        assert!(matches!(s.check_normalized(), Err(Error::NormDrift { .. })));
    }
}
