use super::AnalysisError;
use crate::catalog::AlgorithmSpec;
use crate::tensor::RationalMatrix;

/// Singular values of a row-major `rows × cols` matrix by one-sided Jacobi
/// rotations, largest first.
pub fn singular_values(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    // work on columns of the taller orientation
    let (m, n, mut u) = if rows >= cols {
        (rows, cols, a.to_vec())
    } else {
        let mut t = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = a[i * cols + j];
            }
        }
        (cols, rows, t)
    };
    let col = |u: &[f64], j: usize, k: usize| u[k * n + j];
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..m {
                    let (x, y) = (col(&u, p, k), col(&u, q, k));
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (u[k * n + p], u[k * n + q]);
                    u[k * n + p] = c * x - s * y;
                    u[k * n + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| (0..m).map(|k| col(&u, j, k).powi(2)).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_max / σ_min` of an exact matrix (the denominator does not affect the ratio).
pub fn condition_number(m: &RationalMatrix) -> Result<f64, AnalysisError> {
    let vals: Vec<f64> = m.numerators().iter().map(|&v| v as f64).collect();
    let sv = singular_values(&vals, m.rows(), m.cols());
    let (max, min) = (sv[0], *sv.last().expect("nonempty matrix"));
    if min <= max * 1e-12 {
        return Err(AnalysisError::RankDeficient);
    }
    Ok(max / min)
}

/// Error amplification of an algorithm: the condition number of its square
/// overlapped output transform.
pub fn kappa(spec: &AlgorithmSpec) -> Result<f64, AnalysisError> {
    condition_number(&spec.overlap)
}
