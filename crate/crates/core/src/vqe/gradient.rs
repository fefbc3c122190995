use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{apply_ansatz, AnsatzLayout, EntanglerBlock, EulerRotation, Slot};
use crate::anyon::LocalOperator;
use crate::error::{invalid, Result};
use crate::statevector::Statevector;

/// Central-difference step used by the gradient checks.
pub const FD_STEP: f64 = 1e-5;

/// Denominator floor of the relative error. Central differences at [`FD_STEP`]
/// carry roundoff near 1e-11, so components that vanish identically (a leading
/// Rz on a basis state) would otherwise report that noise as a relative error.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

enum Prepared {
    One { q: usize, u: Matrix2<Complex64>, d: [Matrix2<Complex64>; 3] },
    Two { q0: usize, q1: usize, u: Matrix4<Complex64>, d: [Matrix4<Complex64>; 3] },
}

fn prepare(slot: &Slot, params: &[f64]) -> (usize, Prepared) {
    let off = slot.offset();
    let p = &params[off..off + 3];
    let prepared = match *slot {
        Slot::Rotation { qubit, .. } => {
            let r = EulerRotation::from_slice(p);
            Prepared::One { q: qubit, u: r.matrix(), d: r.derivatives() }
        }
        Slot::Entangler { q0, q1, .. } => {
            let e = EntanglerBlock::from_slice(p);
            Prepared::Two { q0, q1, u: e.matrix(), d: e.derivatives() }
        }
    };
    (off, prepared)
}

fn contract<const N: usize>(
    t: &nalgebra::SMatrix<Complex64, N, N>,
    m: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    t.iter().zip(m.iter()).map(|(a, b)| a * b).sum::<Complex64>().re
}

/// Energy ⟨ψ(θ)|H|ψ(θ)⟩ and its exact gradient by reverse-mode sweep over the circuit.
pub fn energy_gradient(
    params: &[f64],
    layout: &AnsatzLayout,
    terms: &[LocalOperator],
    initial: &Statevector,
) -> Result<(f64, Vec<f64>)> {
    let mut psi = apply_ansatz(params, layout, initial)?;
    let mut lambda = psi.apply_sum(terms)?;
    let energy = psi.inner(&lambda).re;
    let mut grad = vec![0.0; params.len()];
    for slot in layout.slots().iter().rev() {
        let (off, g) = prepare(slot, params);
        match g {
            Prepared::One { q, u, d } => {
                let ui = u.adjoint();
                psi.apply_1q(q, &ui);
                let t = psi.transition_1q(&lambda, q);
                for k in 0..3 {
                    grad[off + k] = 2.0 * contract(&t, &d[k]);
                }
                lambda.apply_1q(q, &ui);
            }
            Prepared::Two { q0, q1, u, d } => {
                let ui = u.adjoint();
                psi.apply_2q(q0, q1, &ui);
                let t = psi.transition_2q(&lambda, q0, q1);
                for k in 0..3 {
                    grad[off + k] = 2.0 * contract(&t, &d[k]);
                }
                lambda.apply_2q(q0, q1, &ui);
            }
        }
    }
    Ok((energy, grad))
}

pub fn energy(params: &[f64], layout: &AnsatzLayout, terms: &[LocalOperator], initial: &Statevector) -> Result<f64> {
    apply_ansatz(params, layout, initial)?.expectation(terms)
}

/// Central finite difference of the energy in component `k`.
pub fn finite_difference(
    params: &[f64],
    k: usize,
    step: f64,
    layout: &AnsatzLayout,
    terms: &[LocalOperator],
    initial: &Statevector,
) -> Result<f64> {
    if k >= params.len() {
        return Err(invalid(format!("component {k} of {}", params.len())));
    }
    let mut shifted = params.to_vec();
    shifted[k] = params[k] + step;
    let plus = energy(&shifted, layout, terms, initial)?;
    shifted[k] = params[k] - step;
    let minus = energy(&shifted, layout, terms, initial)?;
    Ok((plus - minus) / (2.0 * step))
}

/// Comparison of one gradient component with its finite difference.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComponentCheck {
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
    /// `|g − g_fd| / max_k |g_k|`: insensitive to components that are nearly zero
    pub scaled_error: f64,
}

/// Checks `count` seeded random components against central differences.
///
/// Relative error is `|g − g_fd| / max(|g|, |g_fd|, RELATIVE_ERROR_FLOOR)`.
pub fn gradient_check(
    params: &[f64],
    layout: &AnsatzLayout,
    terms: &[LocalOperator],
    initial: &Statevector,
    count: usize,
    seed: u64,
) -> Result<Vec<ComponentCheck>> {
    let (_, grad) = energy_gradient(params, layout, terms, initial)?;
    let largest = grad.iter().fold(1e-12f64, |m, g| m.max(g.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, params.len(), count.min(params.len())).into_vec();
    picks.sort_unstable();
    picks
        .into_iter()
        .map(|k| {
            let numeric = finite_difference(params, k, FD_STEP, layout, terms, initial)?;
            let analytic = grad[k];
            let scale = analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR);
            let diff = (analytic - numeric).abs();
            Ok(ComponentCheck {
                index: k,
                analytic,
                numeric,
                relative_error: diff / scale,
                scaled_error: diff / largest,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anyon::{build_hamiltonian, Boundary, ChainConfig};
    use rand::Rng;

    #[test]
    fn matches_finite_differences_everywhere() {
        let cfg = ChainConfig::new(4, 3, Boundary::Open).unwrap();
        let terms = build_hamiltonian(&cfg).unwrap();
        let layout = AnsatzLayout::new(6, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params: Vec<f64> = (0..layout.parameter_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let init = Statevector::alternating_21(3, &cfg.encoding).unwrap();
        let (e, g) = energy_gradient(&params, &layout, &terms, &init).unwrap();
        assert!((e - energy(&params, &layout, &terms, &init).unwrap()).abs() < 1e-13);
        for k in 0..params.len() {
            let fd = finite_difference(&params, k, 1e-5, &layout, &terms, &init).unwrap();
            assert!((fd - g[k]).abs() < 1e-8, "component {k}: {} vs {fd}", g[k]);
        }
    }

    #[test]
    fn norm_has_zero_gradient() {
        let layout = AnsatzLayout::new(4, 1).unwrap();
        let ident = LocalOperator::identity(vec![0, 1, 2, 3]);
        let params: Vec<f64> = (0..layout.parameter_count()).map(|k| k as f64 * 0.1).collect();
        let init = Statevector::basis(4, 5).unwrap();
        let (e, g) = energy_gradient(&params, &layout, &[ident], &init).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(g.iter().all(|x| x.abs() < 1e-10));
    }
}
