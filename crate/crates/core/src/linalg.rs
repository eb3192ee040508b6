//! Small dense complex linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖m* m − I‖_max`.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.ncols();
    let p = m.adjoint() * m;
    max_abs(&(p - CMat::identity(n, n)))
}

pub fn trace(m: &CMat) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// Determinant by partial-pivot LU; exact zero for singular input.
pub fn det(m: &CMat) -> Complex64 {
    let n = m.nrows();
    match n {
        0 => ONE,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        3 => {
            m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
        }
        _ => m.clone().lu().determinant(),
    }
}

/// Determinant of the submatrix with the given rows and columns.
pub fn minor(m: &CMat, rows: &[usize], cols: &[usize]) -> Complex64 {
    let k = rows.len();
    let sub = CMat::from_fn(k, k, |i, j| m[(rows[i], cols[j])]);
    det(&sub)
}

/// Leading top-left `k×k` minor.
pub fn leading_minor(m: &CMat, k: usize) -> Complex64 {
    let idx: Vec<usize> = (0..k).collect();
    minor(m, &idx, &idx)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Hermitian eigen-decomposition, eigenvalues ascending with matching
/// eigenvector columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (vals, vecs)
}

/// `‖A − A*‖_max`.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Orthonormal basis for the column span of `cols` by modified Gram-Schmidt
/// with column pivoting and one reorthogonalization pass.
///
/// The columns listed in `forced` are taken first, in order, without
/// pivoting. Further columns are picked by largest remaining norm and
/// accepted while that norm exceeds `rel_tol * scale`.
pub fn pivoted_orthonormalize(cols: &CMat, forced: &[usize], rel_tol: f64, scale: f64) -> CMat {
    let nrows = cols.nrows();
    let mut work: Vec<CVec> = (0..cols.ncols())
        .map(|j| cols.column(j).into_owned())
        .collect();
    let mut alive: Vec<bool> = vec![true; work.len()];
    let mut basis: Vec<CVec> = Vec::new();
    let threshold = rel_tol * scale;

    let accept =
        |pick: usize, work: &mut Vec<CVec>, alive: &mut Vec<bool>, basis: &mut Vec<CVec>| -> bool {
            alive[pick] = false;
            let mut v = work[pick].clone();
            for q in basis.iter() {
                let c = q.dotc(&v);
                v -= q * c;
            }
            let nrm = v.norm();
            if nrm <= threshold {
                return false;
            }
            let q = v / Complex64::new(nrm, 0.0);
            for (j, w) in work.iter_mut().enumerate() {
                if alive[j] {
                    let c = q.dotc(w);
                    *w -= &q * c;
                }
            }
            basis.push(q);
            true
        };

    for &f in forced {
        if f < work.len() && alive[f] {
            accept(f, &mut work, &mut alive, &mut basis);
        }
    }
    loop {
        if basis.len() >= nrows {
            break;
        }
        let mut best = None;
        let mut best_norm = threshold;
        for (j, w) in work.iter().enumerate() {
            if alive[j] {
                let n = w.norm();
                if n > best_norm {
                    best_norm = n;
                    best = Some(j);
                }
            }
        }
        match best {
            Some(j) => {
                accept(j, &mut work, &mut alive, &mut basis);
            }
            None => break,
        }
    }
    if basis.is_empty() {
        return CMat::zeros(nrows, 0);
    }
    CMat::from_columns(&basis)
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_small_cases_agree_with_lu() {
        let m = CMat::from_fn(4, 4, |i, j| {
            c(
                (i * 3 + j) as f64 * 0.1 + if i == j { 1.0 } else { 0.0 },
                (i + 2 * j) as f64 * 0.05,
            )
        });
        let via_lu = m.clone().lu().determinant();
        assert!((det(&m) - via_lu).norm() < 1e-12);
        let m3 = m.view((0, 0), (3, 3)).into_owned();
        assert!((det(&m3) - m3.clone().lu().determinant()).norm() < 1e-12);
    }

    #[test]
    fn pivoted_orthonormalize_keeps_forced_column_first() {
        let mut m = CMat::zeros(3, 4);
        m[(0, 0)] = ONE;
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(1, 2)] = c(2.0, 0.0);
        m[(0, 3)] = c(3.0, 0.0);
        let q = pivoted_orthonormalize(&m, &[0], 1e-10, 1.0);
        assert_eq!(q.ncols(), 2);
        assert!((q[(0, 0)] - ONE).norm() < 1e-15);
        assert!(unitarity_residual(&q) < 1e-14);
    }

    #[test]
    fn hermitian_eigen_sorted() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let v0 = vecs.column(0).into_owned();
        assert!(((&m * &v0) - v0 * c(1.0, 0.0)).norm() < 1e-12);
    }
}
