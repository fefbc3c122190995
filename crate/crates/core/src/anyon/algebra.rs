//! Temperley-Lieb, braid and topological-symmetry operators in the qubit encoding.

use num_complex::Complex64;
use nalgebra::DMatrix;
use serde::Serialize;

use super::chain::{ChainConfig, ShiftDirection};
use super::dynkin::DynkinSpec;
use super::operator::{LocalOperator, SparseOperator};
use crate::error::{invalid, Error, Result};
use crate::statevector::Statevector;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Qubits of sites j-1, j, j+1 (cyclic indices), left site first.
fn window(cfg: &ChainConfig, j: usize) -> Vec<usize> {
    [-1isize, 0, 1]
        .iter()
        .flat_map(|d| cfg.site_qubits(cfg.wrap(j as isize + d)))
        .collect()
}

/// Temperley-Lieb generator e_j on the 3 n_p qubits around site j.
///
/// e_j = Σ_a P_{j-1}^{(a)} ẽ_j^{(a)} P_{j+1}^{(a)} with P^{(a)} = |a⟩⟨a| / √φ(a) and
/// ẽ^{(a)} = Σ_{b,b' ∈ N(a)} √(φ(b)φ(b')) |b⟩⟨b'|. Bit strings outside the
/// encoding table are annihilated.
pub fn build_tl_qubit(j: usize, cfg: &ChainConfig) -> Result<LocalOperator> {
    cfg.check_generator_site(j)?;
    let d = &cfg.dynkin;
    let enc = &cfg.encoding;
    let n = cfg.bits_per_site();
    let dim = 1usize << (3 * n);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for a in 1..=d.p() {
        let outer = enc.code(a) as usize | (enc.code(a) as usize) << (2 * n);
        let proj = 1.0 / d.phi(a).sqrt();
        for b_out in d.neighbors(a) {
            for b_in in d.neighbors(a) {
                let row = outer | (enc.code(b_out) as usize) << n;
                let col = outer | (enc.code(b_in) as usize) << n;
                let weight = proj * (d.phi(b_out) * d.phi(b_in)).sqrt() * proj;
                m[(row, col)] += Complex64::new(weight, 0.0);
            }
        }
    }
    LocalOperator::new(window(cfg, j), m)
}

/// Hamiltonian terms -γ/(π sin γ) e_j over the generator sites of the chain.
pub fn build_hamiltonian(cfg: &ChainConfig) -> Result<Vec<LocalOperator>> {
    let c = Complex64::new(cfg.dynkin.hamiltonian_prefactor(), 0.0);
    cfg.generator_sites()
        .map(|j| Ok(build_tl_qubit(j, cfg)?.scaled(c)))
        .collect()
}

/// The branch (−q)^{1/2} = exp(i(π + γ)/2).
pub fn minus_q_sqrt(cfg: &ChainConfig) -> Complex64 {
    branch(&cfg.dynkin)
}

fn branch(d: &DynkinSpec) -> Complex64 {
    Complex64::from_polar(1.0, (std::f64::consts::PI + d.gamma()) / 2.0)
}

/// Braid generator g_j = (−q)^{1/2}(1 − e_j/q), or its inverse
/// g_j^{-1} = (−q)^{-1/2}(1 − q e_j), which follows from e_j² = (q + 1/q) e_j.
pub fn build_braid(j: usize, cfg: &ChainConfig, inverse: bool) -> Result<LocalOperator> {
    let e = build_tl_qubit(j, cfg)?;
    Ok(braid_from_tl(&e, &cfg.dynkin, inverse))
}

fn braid_from_tl(e: &LocalOperator, d: &DynkinSpec, inverse: bool) -> LocalOperator {
    let s = branch(d);
    let q = d.q();
    if inverse {
        e.affine(-q / s, ONE / s)
    } else {
        e.affine(-s / q, s)
    }
}

/// A permutation of register qubits: qubit `k` moves to `targets[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitPermutation(Vec<usize>);

impl QubitPermutation {
    pub fn new(targets: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; targets.len()];
        for &t in &targets {
            if t >= targets.len() || std::mem::replace(&mut seen[t], true) {
                return Err(invalid(format!("{targets:?} is not a bijection")));
            }
        }
        Ok(Self(targets))
    }

    pub fn targets(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &t) in self.0.iter().enumerate() {
            inv[t] = k;
        }
        Self(inv)
    }

    pub fn compose(&self, then: &Self) -> Self {
        Self(self.0.iter().map(|&t| then.0[t]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(k, &t)| k == t)
    }

    pub fn apply(&self, state: &mut Statevector) -> Result<()> {
        state.apply_permutation(&self.0)
    }
}

/// Translation u of a periodic chain by one RSOS site (n_p qubits).
pub fn build_shift(cfg: &ChainConfig) -> Result<QubitPermutation> {
    if !cfg.is_periodic() {
        return Err(Error::UnsupportedOperation(
            "the shift operator needs a periodic chain".into(),
        ));
    }
    let l = cfg.num_qubits();
    let step = match cfg.shift {
        ShiftDirection::Forward => cfg.bits_per_site(),
        ShiftDirection::Backward => l - cfg.bits_per_site(),
    };
    QubitPermutation::new((0..l).map(|k| (k + step) % l).collect())
}

/// Y = (−q)^{-1/2} g_0^{-1} … g_{L_R−2}^{-1} u^{-1} + h.c., applied matrix-free.
#[derive(Debug, Clone)]
pub struct TopologicalSymmetry {
    num_qubits: usize,
    coeff: Complex64,
    inverse_braids: Vec<LocalOperator>,
    inverse_braids_adjoint: Vec<LocalOperator>,
    shift: QubitPermutation,
}

/// Registers above this size are refused by [`TopologicalSymmetry::to_dense`].
pub const DENSE_Y_MAX_QUBITS: usize = 12;

impl TopologicalSymmetry {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        let shift = build_shift(cfg)?;
        let inverse_braids = (0..cfg.sites - 1)
            .map(|j| build_braid(j, cfg, true))
            .collect::<Result<Vec<_>>>()?;
        let inverse_braids_adjoint = inverse_braids.iter().map(LocalOperator::adjoint).collect();
        Ok(Self {
            num_qubits: cfg.num_qubits(),
            coeff: ONE / minus_q_sqrt(cfg),
            inverse_braids,
            inverse_braids_adjoint,
            shift,
        })
    }

    pub fn shift(&self) -> &QubitPermutation {
        &self.shift
    }

    /// Y |state⟩.
    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        // c · g_0^{-1} … g_{L-2}^{-1} u^{-1} |ψ⟩
        let mut forward = state.clone();
        self.shift.inverse().apply(&mut forward)?;
        for g in self.inverse_braids.iter().rev() {
            forward.apply_local(g)?;
        }
        // c̄ · u (g_{L-2}^{-1})† … (g_0^{-1})† |ψ⟩
        let mut backward = state.clone();
        for g in &self.inverse_braids_adjoint {
            backward.apply_local(g)?;
        }
        self.shift.apply(&mut backward)?;
        let amps = forward
            .amplitudes()
            .iter()
            .zip(backward.amplitudes())
            .map(|(f, b)| self.coeff * f + self.coeff.conj() * b)
            .collect();
        Statevector::from_amplitudes(amps)
    }

    /// ⟨ψ| Y u |ψ⟩. Yu is not Hermitian, so the value is complex in general;
    /// it is real on joint eigenstates such as the exact ground state.
    pub fn measure_yu(&self, state: &Statevector) -> Result<Complex64> {
        let mut shifted = state.clone();
        self.shift.apply(&mut shifted)?;
        Ok(state.inner(&self.apply(&shifted)?))
    }

    /// Dense matrix of Y, built column by column.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.num_qubits > DENSE_Y_MAX_QUBITS {
            return Err(invalid(format!(
                "dense Y limited to {DENSE_Y_MAX_QUBITS} qubits, chain has {}",
                self.num_qubits
            )));
        }
        let dim = 1usize << self.num_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let image = self.apply(&Statevector::basis(self.num_qubits, col)?)?;
            m.column_mut(col).copy_from_slice(image.amplitudes());
        }
        Ok(m)
    }
}

/// Convenience wrapper for [`TopologicalSymmetry::apply`].
pub fn apply_y(state: &Statevector, cfg: &ChainConfig) -> Result<Statevector> {
    TopologicalSymmetry::new(cfg)?.apply(state)
}

/// Convenience wrapper for [`TopologicalSymmetry::measure_yu`].
pub fn measure_yu(state: &Statevector, cfg: &ChainConfig) -> Result<Complex64> {
    TopologicalSymmetry::new(cfg)?.measure_yu(state)
}

/// max |([H, Y])_{ik}| over the full register, column by column.
pub fn max_commutator_with_hamiltonian(
    cfg: &ChainConfig,
    terms: &[LocalOperator],
    y: &TopologicalSymmetry,
) -> Result<f64> {
    commutator_over(cfg, terms, y, |_| true)
}

/// As [`max_commutator_with_hamiltonian`], restricted to columns that encode
/// allowed RSOS strings. H and Y both map this span into itself, and off it
/// the generators vanish, so the two operators need not commute there.
pub fn max_physical_commutator(
    cfg: &ChainConfig,
    terms: &[LocalOperator],
    y: &TopologicalSymmetry,
) -> Result<f64> {
    commutator_over(cfg, terms, y, |col| crate::observables::is_admissible(col, cfg))
}

fn commutator_over(
    cfg: &ChainConfig,
    terms: &[LocalOperator],
    y: &TopologicalSymmetry,
    keep: impl Fn(usize) -> bool,
) -> Result<f64> {
    let l = cfg.num_qubits();
    let mut worst = 0.0f64;
    for col in (0..1usize << l).filter(|&c| keep(c)) {
        let basis = Statevector::basis(l, col)?;
        let hy = y.apply(&basis)?.apply_sum(terms)?;
        let yh = y.apply(&basis.apply_sum(terms)?)?;
        for (a, b) in hy.amplitudes().iter().zip(yh.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Largest deviations from the Temperley-Lieb and braid relations on a chain.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AlgebraReport {
    /// max |e_j† − e_j|
    pub hermiticity: f64,
    /// max |e_j² − (q + 1/q) e_j|
    pub tl_square: f64,
    /// max |e_j e_k e_j − e_j| for neighbouring j, k
    pub tl_adjacent: f64,
    /// max |[e_j, e_k]| for distant j, k
    pub tl_distant: f64,
    /// max |g_j g_j^{-1} − 1|
    pub braid_inverse: f64,
    /// max |g_j g_k g_j − g_k g_j g_k| for neighbouring j, k
    pub braid_adjacent: f64,
    /// max |[g_j, g_k]| for distant j, k
    pub braid_distant: f64,
    /// max amplitude any e_j sends from an allowed string to a forbidden one
    pub leakage: f64,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.hermiticity,
            self.tl_square,
            self.tl_adjacent,
            self.tl_distant,
            self.braid_inverse,
            self.braid_adjacent,
            self.braid_distant,
            self.leakage,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn site_distance(cfg: &ChainConfig, j: usize, k: usize) -> usize {
    let d = j.abs_diff(k);
    if cfg.is_periodic() {
        d.min(cfg.sites - d)
    } else {
        d
    }
}

/// Whether the sites covered by `support` hold valid labels with adjacent neighbours.
fn allowed_window(cfg: &ChainConfig, support: &[usize], pattern: usize) -> bool {
    let n = cfg.bits_per_site();
    let mut sites: Vec<usize> = support.iter().map(|&q| q / n).collect();
    sites.sort_unstable();
    sites.dedup();
    let label = |j: usize| cfg.encoding.label((pattern >> (n * j) & ((1 << n) - 1)) as u32);
    let mut labels = Vec::with_capacity(sites.len());
    for &j in &sites {
        match label(j) {
            Some(a) => labels.push((j, a)),
            None => return false,
        }
    }
    labels.iter().all(|&(j, a)| {
        let right = if cfg.is_periodic() { (j + 1) % cfg.sites } else { j + 1 };
        labels
            .iter()
            .find(|&&(k, _)| k == right)
            .is_none_or(|&(_, b)| cfg.dynkin.adjacent(a, b))
    })
}

/// Checks every relation between generators of the chain in exact sparse arithmetic.
///
/// The relations hold on the span of allowed strings, which every generator
/// preserves; residues are measured there and `leakage` records the
/// preservation itself.
pub fn verify_algebra(cfg: &ChainConfig) -> Result<AlgebraReport> {
    let gens = cfg
        .generator_sites()
        .map(|j| Ok((j, build_tl_qubit(j, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    verify_relations(
        &gens,
        &cfg.dynkin,
        |j, k| site_distance(cfg, j, k),
        |support, pattern| allowed_window(cfg, support, pattern),
    )
}

/// Relation residues of TL generators `(site, e_j)`, measured on columns `allowed` by the encoding.
pub(super) fn verify_relations(
    gens: &[(usize, LocalOperator)],
    dynkin: &DynkinSpec,
    distance: impl Fn(usize, usize) -> usize,
    allowed: impl Fn(&[usize], usize) -> bool,
) -> Result<AlgebraReport> {
    let restricted = |op: &SparseOperator| {
        let support = op.support();
        op.max_abs_where(|_, c| allowed(support, c))
    };
    let mut es = Vec::new();
    let mut gs = Vec::new();
    let mut report = AlgebraReport::default();
    let delta = Complex64::new(dynkin.loop_weight(), 0.0);
    for (_, e) in gens {
        report.hermiticity = report.hermiticity.max(e.max_hermitian_deviation());
        let g = braid_from_tl(e, dynkin, false).to_sparse();
        let g_inv = braid_from_tl(e, dynkin, true).to_sparse();
        let e = e.to_sparse();
        let support = e.support().to_vec();
        let leak = e.max_abs_where(|r, c| allowed(&support, c) && !allowed(&support, r));
        report.leakage = report.leakage.max(leak);
        let sq = e.mul(&e)?.add_scaled(&e, -delta)?;
        report.tl_square = report.tl_square.max(restricted(&sq));
        let id = SparseOperator::identity(support);
        report.braid_inverse = report.braid_inverse.max(restricted(&g.mul(&g_inv)?.sub(&id)?));
        es.push(e);
        gs.push(g);
    }
    for (x, &(j, _)) in gens.iter().enumerate() {
        for (y, &(k, _)) in gens.iter().enumerate() {
            if j == k {
                continue;
            }
            match distance(j, k) {
                1 => {
                    let ee = es[x].mul(&es[y])?.mul(&es[x])?.sub(&es[x])?;
                    report.tl_adjacent = report.tl_adjacent.max(restricted(&ee));
                    let lhs = gs[x].mul(&gs[y])?.mul(&gs[x])?;
                    let rhs = gs[y].mul(&gs[x])?.mul(&gs[y])?;
                    report.braid_adjacent = report.braid_adjacent.max(restricted(&lhs.sub(&rhs)?));
                }
                _ if j < k => {
                    let c = es[x].mul(&es[y])?.sub(&es[y].mul(&es[x])?)?;
                    report.tl_distant = report.tl_distant.max(restricted(&c));
                    let c = gs[x].mul(&gs[y])?.sub(&gs[y].mul(&gs[x])?)?;
                    report.braid_distant = report.braid_distant.max(restricted(&c));
                }
                _ => {}
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anyon::Boundary;

    fn cfg(p: usize, sites: usize, b: Boundary) -> ChainConfig {
        ChainConfig::new(p, sites, b).unwrap()
    }

    #[test]
    fn range_checks() {
        let open = cfg(4, 5, Boundary::Open);
        assert!(build_tl_qubit(0, &open).is_err());
        assert!(build_tl_qubit(4, &open).is_err());
        assert!(build_tl_qubit(3, &open).is_ok());
        let per = cfg(4, 4, Boundary::Periodic);
        assert!(build_tl_qubit(0, &per).is_ok());
        assert!(build_tl_qubit(4, &per).is_err());
        assert!(build_braid(0, &open, false).is_err());
        assert!(matches!(build_shift(&open), Err(Error::UnsupportedOperation(_))));
        assert!(TopologicalSymmetry::new(&open).is_err());
    }

    #[test]
    fn periodic_window_wraps() {
        let per = cfg(4, 4, Boundary::Periodic);
        let e0 = build_tl_qubit(0, &per).unwrap();
        assert_eq!(e0.support(), &[6, 7, 0, 1, 2, 3]);
    }

    #[test]
    fn tl_square_relation_p5() {
        let c = cfg(5, 4, Boundary::Open);
        let r = verify_algebra(&c).unwrap();
        assert!(r.tl_square <= 1e-12, "{r:?}");
    }

    #[test]
    fn adjacent_generators_do_not_commute() {
        let c = cfg(4, 5, Boundary::Open);
        let e1 = build_tl_qubit(1, &c).unwrap().to_sparse();
        let e2 = build_tl_qubit(2, &c).unwrap().to_sparse();
        let comm = e1.mul(&e2).unwrap().sub(&e2.mul(&e1).unwrap()).unwrap();
        assert!(comm.max_abs() > 1e-3);
        let r = verify_algebra(&c).unwrap();
        assert!(r.max_deviation() <= 1e-12, "{r:?}");
    }

    #[test]
    fn generator_vanishes_on_unequal_neighbours() {
        let c = cfg(4, 3, Boundary::Open);
        let e = build_tl_qubit(1, &c).unwrap();
        // |1, 2, 3⟩ has a_0 ≠ a_2
        let s = Statevector::from_rsos_product(&[1, 2, 3], &c.encoding).unwrap();
        let mut t = s.clone();
        t.apply_local(&e).unwrap();
        assert!(t.norm() == 0.0);
    }

    #[test]
    fn generator_is_projector_up_to_loop_weight() {
        for p in 3..=8 {
            let c = cfg(p, 3, Boundary::Open);
            let e = build_tl_qubit(1, &c).unwrap();
            let proj = e.matrix() / Complex64::new(c.dynkin.loop_weight(), 0.0);
            let dev = &proj * &proj - &proj;
            assert!(dev.iter().all(|z| z.norm() <= 1e-12), "p={p}");
        }
    }

    #[test]
    fn shift_cycles() {
        let c = cfg(4, 4, Boundary::Periodic);
        let u = build_shift(&c).unwrap();
        let mut acc = QubitPermutation::new((0..8).collect()).unwrap();
        for step in 1..=4 {
            acc = acc.compose(&u);
            assert_eq!(acc.is_identity(), step == 4);
        }
        assert!(u.compose(&u.inverse()).is_identity());
        let mut s = Statevector::from_rsos_product(&[2, 1, 2, 1], &c.encoding).unwrap();
        u.apply(&mut s).unwrap();
        let expected = Statevector::from_rsos_product(&[1, 2, 1, 2], &c.encoding).unwrap();
        assert_eq!(s, expected);
        let mut s = Statevector::from_rsos_product(&[1, 2, 3, 4], &c.encoding).unwrap();
        u.apply(&mut s).unwrap();
        assert_eq!(s, Statevector::from_rsos_product(&[4, 1, 2, 3], &c.encoding).unwrap());
    }

    #[test]
    fn backward_shift_is_inverse() {
        let c = cfg(5, 4, Boundary::Periodic);
        let fwd = build_shift(&c).unwrap();
        let bwd = build_shift(&c.clone().with_shift(ShiftDirection::Backward)).unwrap();
        assert_eq!(fwd.inverse(), bwd);
    }

    #[test]
    fn dense_y_is_hermitian_and_commutes() {
        let c = cfg(4, 4, Boundary::Periodic);
        let y = TopologicalSymmetry::new(&c).unwrap();
        let dense = y.to_dense().unwrap();
        let herm = crate::anyon::operator::max_abs(&(&dense - dense.adjoint()));
        assert!(herm <= 1e-12);
        let terms = build_hamiltonian(&c).unwrap();
        let h: DMatrix<Complex64> = terms.iter().map(|t| t.to_dense(8)).fold(
            DMatrix::zeros(256, 256),
            |acc, m| acc + m,
        );
        let comm = crate::anyon::operator::max_abs(&(&h * &dense - &dense * &h));
        assert!(comm <= 1e-9, "{comm}");
        assert!(max_commutator_with_hamiltonian(&c, &terms, &y).unwrap() <= 1e-9);
    }

    #[test]
    fn wrong_shift_direction_breaks_commutation() {
        let c = cfg(4, 4, Boundary::Periodic).with_shift(ShiftDirection::Backward);
        let y = TopologicalSymmetry::new(&c).unwrap();
        let terms = build_hamiltonian(&c).unwrap();
        assert!(max_commutator_with_hamiltonian(&c, &terms, &y).unwrap() > 1e-3);
    }

    #[test]
    fn commutation_on_physical_columns() {
        let c = cfg(4, 6, Boundary::Periodic);
        let y = TopologicalSymmetry::new(&c).unwrap();
        let terms = build_hamiltonian(&c).unwrap();
        assert!(max_physical_commutator(&c, &terms, &y).unwrap() <= 1e-12);
        assert!(max_commutator_with_hamiltonian(&c, &terms, &y).unwrap() > 1e-3);
    }
}
