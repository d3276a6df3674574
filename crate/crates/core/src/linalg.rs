//! Dense helpers on top of nalgebra: Hermitian eigensolves, nullspaces and
//! least squares.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::pencil::CMatrix;
use crate::scalar::{lit, re, Real};

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let mut v: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Real basis of the `N²`-dimensional space of Hermitian `N×N` matrices,
/// orthonormal under the Frobenius inner product.
pub fn hermitian_basis<T: Real>(n: usize) -> Vec<CMatrix<T>> {
    let s = lit::<T>(0.5).sqrt();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = re(T::one());
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(i, j)] = re(s);
            sym[(j, i)] = re(s);
            out.push(sym);
            let mut asym = CMatrix::zeros(n, n);
            asym[(i, j)] = Complex::new(T::zero(), s);
            asym[(j, i)] = Complex::new(T::zero(), -s);
            out.push(asym);
        }
    }
    out
}

/// Stack real and imaginary parts of a complex matrix into one real column.
pub fn realify<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

/// Orthonormal basis (as columns) of the nullspace of `a`, where singular
/// values below `rel_cut · σ_max` count as zero.
pub fn nullspace<T: Real>(a: &DMatrix<T>, rel_cut: T) -> DMatrix<T> {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(T::zero(), |acc, &s| if s > acc { s } else { acc });
    let cut = rel_cut * smax;
    let null_rows: Vec<usize> = (0..sigma.len())
        .filter(|&i| smax == T::zero() || sigma[i] < cut)
        .collect();
    DMatrix::from_fn(n, null_rows.len(), |r, c| v_t[(null_rows[c], r)])
}

/// Least-squares solution of `a x ≈ b` via SVD, with the residual 2-norm.
pub fn lstsq<T: Real>(a: &DMatrix<T>, b: &DVector<T>) -> (DVector<T>, T) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(T::zero(), |acc, &s| if s > acc { s } else { acc });
    let eps = smax * T::default_epsilon() * lit::<T>(a.nrows().max(a.ncols()) as f64);
    let x = svd.solve(b, eps).expect("U and V^T were computed");
    let r = (a * &x - b).norm();
    (x, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let m = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[re(2.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0), re(2.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let g = vecs.adjoint() * &vecs;
        assert!((g - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn basis_size_and_orthonormality() {
        let b = hermitian_basis::<f64>(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = (x.adjoint() * y).trace();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - expected).abs() < 1e-14 && ip.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let ns = nullspace(&a, 1e-9);
        assert_eq!(ns.ncols(), 1);
        assert!((&a * &ns).norm() < 1e-14);
    }

    #[test]
    fn least_squares_exact_fit() {
        let a = DMatrix::<f64>::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let (x, r) = lstsq(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
        assert!(r < 1e-13);
    }
}
