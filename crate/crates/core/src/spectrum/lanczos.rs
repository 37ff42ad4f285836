//! Lanczos with full reorthogonalization and one-at-a-time locking.
//!
//! Each outer pass runs a fresh Krylov recurrence in the orthogonal
//! complement of the pairs already locked and locks only the lowest Ritz
//! pair. A single Krylov space sees one direction per degenerate eigenspace;
//! restarting in the complement recovers the partners.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::SpectrumError;
use crate::linalg::{axpy, dot, norm, normalize, start_vector, LinearOperator};
use crate::operators::Translation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    /// Convergence when `beta * |y_last| <= tolerance * max(1, |theta|)`.
    pub tolerance: f64,
    pub max_krylov: usize,
    /// Ritz values are checked every this many steps.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tolerance: 1e-11, max_krylov: 400, check_every: 8 }
    }
}

/// Lowest `count` eigenpairs of a symmetric operator, ascending.
///
/// With `sector`, the recurrence is confined to the translation-invariant
/// subspace by projecting every Krylov vector.
pub fn lowest<A: LinearOperator + ?Sized>(
    op: &A,
    count: usize,
    sector: Option<&Translation>,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<f64>)>, SpectrumError> {
    let dim = op.dim();
    if count > dim {
        return Err(SpectrumError::TooManyStates { requested: count, dim });
    }
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    let mut iterations = 0usize;
    for pass in 0..count {
        let (pair, steps) = match lowest_in_complement(op, &locked, sector, opts, pass as u64) {
            Ok(found) => found,
            Err(Breakdown::Exhausted) => {
                return Err(SpectrumError::TooManyStates { requested: count, dim: locked.len() });
            }
            Err(Breakdown::NotConverged { residual, steps }) => {
                return Err(SpectrumError::NotConverged {
                    requested: count,
                    converged: locked.len(),
                    iterations: iterations + steps,
                    residual,
                });
            }
        };
        iterations += steps;
        locked.push(pair);
    }
    locked.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(locked)
}

enum Breakdown {
    /// No start direction left in the (sector-restricted) complement.
    Exhausted,
    NotConverged { residual: f64, steps: usize },
}

fn orthogonalize(w: &mut [f64], against: &[&[f64]]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

fn lowest_in_complement<A: LinearOperator + ?Sized>(
    op: &A,
    locked: &[(f64, Vec<f64>)],
    sector: Option<&Translation>,
    opts: &LanczosOptions,
    salt: u64,
) -> Result<((f64, Vec<f64>), usize), Breakdown> {
    let dim = op.dim();
    let locked_vecs: Vec<&[f64]> = locked.iter().map(|(_, v)| v.as_slice()).collect();
    let restrict = |w: &mut Vec<f64>| {
        if let Some(t) = sector {
            *w = t.project(w);
        }
        orthogonalize(w, &locked_vecs);
    };

    let mut q = start_vector(dim, salt);
    restrict(&mut q);
    if normalize(&mut q) < 1e-10 {
        // The fixed start vector may be unlucky in a tiny sector; sweep unit vectors.
        let mut found = false;
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            restrict(&mut e);
            if normalize(&mut e) > 1e-6 {
                q = e;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Breakdown::Exhausted);
        }
    }

    let max_m = opts.max_krylov.min(dim);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for m in 0..max_m {
        op.apply(&basis[m], &mut w);
        let a = dot(&basis[m], &w);
        alpha.push(a);
        axpy(-a, &basis[m], &mut w);
        if m > 0 {
            axpy(-beta[m - 1], &basis[m - 1], &mut w);
        }
        if let Some(t) = sector {
            w = t.project(&w);
        }
        {
            let mut against: Vec<&[f64]> = basis.iter().map(|v| v.as_slice()).collect();
            against.extend(locked_vecs.iter().copied());
            orthogonalize(&mut w, &against);
        }
        let b = norm(&w);
        let steps = m + 1;
        let invariant = b <= 1e-12 * a.abs().max(1.0);
        let check = invariant || steps == max_m || (steps >= 4 && steps % opts.check_every == 0);
        if check {
            let (theta, y) = lowest_ritz(&alpha, &beta);
            let residual = b * y[steps - 1].abs();
            last_residual = residual;
            if invariant || residual <= opts.tolerance * theta.abs().max(1.0) {
                let mut x = vec![0.0; dim];
                for (coef, v) in y.iter().zip(&basis) {
                    axpy(*coef, v, &mut x);
                }
                if let Some(t) = sector {
                    x = t.project(&x);
                }
                orthogonalize(&mut x, &locked_vecs);
                normalize(&mut x);
                return Ok(((theta, x), steps));
            }
        }
        if steps == max_m {
            break;
        }
        beta.push(b);
        let mut next = std::mem::replace(&mut w, vec![0.0; dim]);
        crate::linalg::scale(1.0 / b, &mut next);
        basis.push(next);
    }
    Err(Breakdown::NotConverged { residual: last_residual, steps: alpha.len() })
}

/// Lowest eigenpair of the symmetric tridiagonal matrix (alpha, beta).
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t.clone());
    let (k, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    refine_ritz(&t, theta, eig.eigenvectors.column(k).into_owned())
}

/// Inverse iteration on `t - theta`.
///
/// The QR eigenvectors can be off by ~1e-8 when the spectrum of `t` is
/// clustered, which would make `beta * |y_last|` misreport the residual.
fn refine_ritz(t: &DMatrix<f64>, theta: f64, mut y: nalgebra::DVector<f64>) -> (f64, Vec<f64>) {
    let m = t.nrows();
    let scale = t.amax().max(1.0);
    let mut shift = theta;
    for _ in 0..2 {
        let shifted = t - DMatrix::<f64>::identity(m, m) * shift;
        let solved = shifted.lu().solve(&y).filter(|z| z.iter().all(|v| v.is_finite()));
        match solved {
            Some(z) if z.norm() > 0.0 => y = z.normalize(),
            // exactly singular: nudge the shift off the eigenvalue
            _ => shift -= 8.0 * f64::EPSILON * scale,
        }
    }
    let theta = y.dot(&(t * &y));
    (theta, y.iter().copied().collect())
}
