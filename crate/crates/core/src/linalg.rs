//! Small dense linear algebra: a cyclic Jacobi eigensolver for real symmetric
//! matrices and a few complex-matrix helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type RMatrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix, sorted ascending.
///
/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-14` times the Frobenius norm of the input. Only the lower triangle is
/// trusted; the matrix is symmetrized before rotating.
pub fn symmetric_eigenvalues(a: &RMatrix) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric_eigenvalues: matrix must be square");
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-14 * norm;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, p, q, c, s);
            }
        }
    }

    let mut values: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

fn off_diagonal_norm(m: &RMatrix) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

// A <- J^T A J with J the (p, q) Givens rotation.
fn rotate(m: &mut RMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.nrows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
}

pub fn complex_det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

pub fn real_det(m: &RMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// Determinant of `m` with row and column `skip` removed.
pub fn complex_principal_minor(m: &CMatrix, skip: usize) -> Complex64 {
    let n = m.nrows();
    let idx: Vec<usize> = (0..n).filter(|&i| i != skip).collect();
    let sub = CMatrix::from_fn(n - 1, n - 1, |i, j| m[(idx[i], idx[j])]);
    complex_det(&sub)
}

pub fn max_abs_complex(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().map(|x| x.abs()).fold(0.0, f64::max)
}
