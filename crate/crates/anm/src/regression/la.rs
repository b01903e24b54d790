//! Symmetric positive-definite solves with escalating diagonal jitter.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative jitter ladder tried after a plain Cholesky fails.
const JITTER: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// Smallest accepted squared pivot relative to the mean diagonal. Exactly
/// rank-deficient systems can slip through Cholesky on rounding noise with
/// a tiny positive pivot; this rejects them deterministically.
const PIVOT_FLOOR: f64 = 1e-10;

fn attempt(a: &DMatrix<f64>, mean_diag: f64) -> Option<Cholesky<f64, Dyn>> {
    let ch = Cholesky::new(a.clone())?;
    let min_pivot = ch.l_dirty().diagonal().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if min_pivot * min_pivot < PIVOT_FLOOR * mean_diag {
        return None;
    }
    Some(ch)
}

/// Cholesky factor of symmetric positive (semi)definite A.
///
/// Returns (factor, relative jitter used); jitter 0.0 means the plain
/// factorization succeeded. Jitter is `rel * mean(diag(A))` added to the
/// diagonal, escalating tenfold from 1e-10 to 1e-4 before giving up.
pub(crate) fn factor_spd(a: &DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64)> {
    debug_assert_eq!(a.nrows(), a.ncols());
    let dim = a.nrows();
    let mean_diag = (a.diagonal().sum() / dim as f64).abs().max(f64::MIN_POSITIVE);
    if let Some(ch) = attempt(a, mean_diag) {
        return Ok((ch, 0.0));
    }
    for rel in JITTER {
        let mut aj = a.clone();
        for i in 0..dim {
            aj[(i, i)] += rel * mean_diag;
        }
        if let Some(ch) = attempt(&aj, mean_diag) {
            return Ok((ch, rel));
        }
    }
    Err(Error::SingularSystem)
}

/// Solve A x = b via [`factor_spd`], same return convention.
pub(crate) fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    debug_assert_eq!(a.nrows(), b.len());
    let (ch, jitter) = factor_spd(a)?;
    let x = ch.solve(b);
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok((x, jitter))
}
