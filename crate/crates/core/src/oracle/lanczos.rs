//! Restarted Lanczos with full reorthogonalization for the lowest eigenpair.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 5000;
const KRYLOV_DIM: usize = 200;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    // two passes keep the basis orthogonal to machine precision
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest eigenpair of the symmetric operator `matvec` on the complement of `deflate`.
///
/// `deflate` vectors must be orthonormal. Converges when ‖Av − θv‖ ≤ `tol`.
pub fn lowest_eigenpair(
    dim: usize,
    matvec: impl Fn(&[f64], &mut [f64]),
    deflate: &[Vec<f64>],
    tol: f64,
) -> Result<Eigenpair> {
    let mut start: Vec<f64> = (0..dim).map(|i| 1.0 + 0.01 * (i as f64).sin()).collect();
    project_out(&mut start, deflate);
    normalize(&mut start);
    let mut total = 0;
    let mut scratch = vec![0.0; dim];
    let mut best_residual = f64::INFINITY;
    while total < MAX_ITERATIONS {
        let m_max = KRYLOV_DIM.min(dim - deflate.len()).max(1);
        let mut vs: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for k in 0..m_max {
            matvec(&vs[k], &mut scratch);
            total += 1;
            let a = dot(&scratch, &vs[k]);
            let scale = dot(&scratch, &scratch).sqrt();
            alpha.push(a);
            let mut w = scratch.clone();
            // deflation last: the Krylov recurrence amplifies any residual overlap with it
            project_out(&mut w, &vs);
            project_out(&mut w, deflate);
            let b = normalize(&mut w);
            // invariant subspace reached; the remainder is rounding noise
            if k + 1 == m_max || b <= 1e-10 * scale {
                break;
            }
            beta.push(b);
            vs.push(w);
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let k = eig.eigenvalues.imin();
        let mut ritz = vec![0.0; dim];
        for (i, v) in vs.iter().enumerate().take(m) {
            let c = eig.eigenvectors[(i, k)];
            ritz.iter_mut().zip(v).for_each(|(r, x)| *r += c * x);
        }
        project_out(&mut ritz, deflate);
        normalize(&mut ritz);
        matvec(&ritz, &mut scratch);
        let value = dot(&ritz, &scratch);
        let residual = scratch
            .iter()
            .zip(&ritz)
            .map(|(h, x)| (h - value * x).powi(2))
            .sum::<f64>()
            .sqrt();
        best_residual = best_residual.min(residual);
        if residual <= tol {
            return Ok(Eigenpair { value, vector: ritz, residual, iterations: total });
        }
        start = ritz;
    }
    Err(Error::NumericalFailure {
        message: format!("Lanczos did not converge within {MAX_ITERATIONS} iterations"),
        residual: best_residual,
    })
}
