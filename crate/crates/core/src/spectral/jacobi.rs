use super::{Matrix, SpectralError};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal norm, relative to ‖A‖_F.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Cyclic Jacobi eigenvalue iteration for a dense symmetric matrix.
///
/// Each rotation annihilates one off-diagonal element; sweeps visit every
/// `(p, q)` pair with `p < q` in row order. Iteration stops once the
/// off-diagonal Frobenius norm falls below `RELATIVE_TOLERANCE · ‖A‖_F`.
///
/// Returns unsorted eigenvalues and the matrix whose columns are the
/// corresponding eigenvectors.
pub fn jacobi_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), SpectralError> {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let threshold = RELATIVE_TOLERANCE * norm;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            return Ok(((0..n).map(|i| a[(i, i)]).collect(), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    a[(r, p)] = new_rp;
                    a[(p, r)] = new_rp;
                    a[(r, q)] = new_rq;
                    a[(q, r)] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    let residual = off_diagonal_norm(&a);
    if residual <= threshold {
        Ok(((0..n).map(|i| a[(i, i)]).collect(), v))
    } else {
        Err(SpectralError::NoConvergence { sweeps: MAX_SWEEPS, residual })
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    sum.sqrt()
}
