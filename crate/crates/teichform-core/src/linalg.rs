//! Small dense linear algebra: a minimal row-major matrix, a one-sided
//! Jacobi SVD (singular values + right singular vectors), least squares via
//! normal equations, and Gram–Schmidt. Sized for the tiny systems this crate
//! meets (a handful of rows/columns), favoring clarity over speed.

use crate::real;
use alloc::vec;
use alloc::vec::Vec;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self.get(i, j) * x[i];
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    real::sqrt(dot(a, a))
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Singular value decomposition data: descending singular values and the
/// matching right singular vectors as columns of `v` (so `A·v_j` has norm
/// `singular[j]` and the columns of `A·V` are mutually orthogonal).
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular: Vec<f64>,
    pub v: DMat,
}

/// One-sided Jacobi SVD: rotates column pairs of a working copy of `A` until
/// all pairs are orthogonal, accumulating the rotations into `V`.
pub fn jacobi_svd(a: &DMat) -> Svd {
    let n = a.cols();
    let mut b = a.clone();
    let mut v = DMat::identity(n);
    let eps = 1e-15;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..b.rows() {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                if gamma.abs() <= eps * real::sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                off = off.max(gamma.abs() / real::sqrt((alpha * beta).max(f64::MIN_POSITIVE)));
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = {
                    let s = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    s / (zeta.abs() + real::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / real::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..b.rows() {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, c * bp - s * bq);
                    b.set(i, q, s * bp + c * bq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if off < 1e-14 {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sigmas: Vec<f64> = (0..n).map(|j| norm(&b.col(j))).collect();
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap());
    let mut v_sorted = DMat::zeros(n, n);
    let mut singular = Vec::with_capacity(n);
    for (jj, &j) in order.iter().enumerate() {
        singular.push(sigmas[j]);
        for i in 0..n {
            v_sorted.set(i, jj, v.get(i, j));
        }
    }
    Svd {
        singular,
        v: v_sorted,
    }
}

/// Number of singular values strictly above `tol`.
pub fn rank(a: &DMat, tol: f64) -> usize {
    jacobi_svd(a).singular.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis of `{x : Ax = 0}`: right singular vectors whose
/// singular value is at most `tol`.
pub fn kernel_basis(a: &DMat, tol: f64) -> Vec<Vec<f64>> {
    let svd = jacobi_svd(a);
    (0..a.cols())
        .filter(|&j| svd.singular[j] <= tol)
        .map(|j| svd.v.col(j))
        .collect()
}

/// Gaussian elimination with partial pivoting for an `n×n` system; `None` if
/// the pivot falls below `1e-13` of the largest entry (singular system).
pub fn solve(a: &DMat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = (0..n)
        .flat_map(|i| m.row(i).to_vec())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(1e-300);
    for k in 0..n {
        let (pivot_row, pivot_val) = (k..n)
            .map(|i| (i, m.get(i, k).abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pivot_val < 1e-13 * scale {
            return None;
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = m.get(k, j);
                m.set(k, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            rhs.swap(k, pivot_row);
        }
        for i in (k + 1)..n {
            let f = m.get(i, k) / m.get(k, k);
            for j in k..n {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
            rhs[i] -= f * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in (k + 1)..n {
            s -= m.get(k, j) * x[j];
        }
        x[k] = s / m.get(k, k);
    }
    Some(x)
}

/// Least squares `min ‖Bc − d‖` via the normal equations; returns the
/// coefficients and the residual norm. Suitable for the well-conditioned
/// skinny systems this crate produces.
pub fn least_squares(b: &DMat, d: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = b.cols();
    let mut gram = DMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = dot(&b.col(i), &b.col(j));
            gram.set(i, j, v);
        }
    }
    let rhs = b.tr_matvec(d);
    let c = solve(&gram, &rhs)?;
    let fit = b.matvec(&c);
    let res: Vec<f64> = d.iter().zip(&fit).map(|(x, y)| x - y).collect();
    Some((c, norm(&res)))
}

/// Modified Gram–Schmidt with a reorthogonalization pass. Returns an
/// orthonormal basis of the span; inputs whose residual drops below `tol`
/// are dropped as dependent.
pub fn gram_schmidt(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(&mut w, -c, b);
            }
        }
        let n = norm(&w);
        if n > tol {
            for wi in &mut w {
                *wi /= n;
            }
            basis.push(w);
        }
    }
    basis
}

/// `v` minus its projection onto the span of an orthonormal `basis`.
pub fn project_out(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for b in basis {
        let c = dot(&w, b);
        axpy(&mut w, -c, b);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::SplitMix64;

    fn random_mat(rng: &mut SplitMix64, r: usize, c: usize) -> DMat {
        let mut m = DMat::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, 2.0 * rng.next_signed());
            }
        }
        m
    }

    #[test]
    fn svd_of_rectangular_diagonal() {
        let a = DMat::from_rows(&[vec![3.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]]);
        let svd = jacobi_svd(&a);
        assert!((svd.singular[0] - 3.0).abs() < 1e-12);
        assert!((svd.singular[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn svd_right_vectors_are_orthonormal_and_consistent() {
        let mut rng = SplitMix64::new(101);
        for _ in 0..20 {
            let a = random_mat(&mut rng, 7, 4);
            let svd = jacobi_svd(&a);
            for i in 0..4 {
                for j in 0..4 {
                    let d = dot(&svd.v.col(i), &svd.v.col(j));
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-10);
                }
                // ‖A v_i‖ = σ_i
                let av = a.matvec(&svd.v.col(i));
                assert!((norm(&av) - svd.singular[i]).abs() < 1e-10);
            }
            // Columns of A·V are orthogonal.
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let ai = a.matvec(&svd.v.col(i));
                    let aj = a.matvec(&svd.v.col(j));
                    assert!(dot(&ai, &aj).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rank_and_kernel_of_dependent_columns() {
        // col2 = col0 + col1 on 5 rows → rank 2, kernel dim 1.
        let mut rng = SplitMix64::new(7);
        let mut a = DMat::zeros(5, 3);
        for i in 0..5 {
            let c0 = rng.next_signed();
            let c1 = rng.next_signed();
            a.set(i, 0, c0);
            a.set(i, 1, c1);
            a.set(i, 2, c0 + c1);
        }
        assert_eq!(rank(&a, 1e-10), 2);
        let ker = kernel_basis(&a, 1e-10);
        assert_eq!(ker.len(), 1);
        let residual = a.matvec(&ker[0]);
        assert!(norm(&residual) < 1e-10);
        assert!((norm(&ker[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_known_system() {
        let a = DMat::from_rows(&[
            vec![2.0, 1.0, -1.0],
            vec![-3.0, -1.0, 2.0],
            vec![-2.0, 1.0, 2.0],
        ]);
        // Solution of the classic system: x=2, y=3, z=-1.
        let x = solve(&a, &[8.0, -11.0, -3.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
        assert!((x[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_reports_singular() {
        let a = DMat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&a, &[1.0, 2.0]).is_none());
    }

    #[test]
    fn least_squares_recovers_exact_fit() {
        let mut rng = SplitMix64::new(55);
        let b = random_mat(&mut rng, 10, 3);
        let c_true = vec![1.5, -0.25, 2.0];
        let d = b.matvec(&c_true);
        let (c, res) = least_squares(&b, &d).unwrap();
        for (got, want) in c.iter().zip(&c_true) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(res < 1e-10);
    }

    #[test]
    fn least_squares_residual_is_orthogonal_to_columns() {
        let mut rng = SplitMix64::new(77);
        let b = random_mat(&mut rng, 12, 3);
        let d: Vec<f64> = (0..12).map(|_| rng.next_signed()).collect();
        let (c, res_norm) = least_squares(&b, &d).unwrap();
        let fit = b.matvec(&c);
        let res: Vec<f64> = d.iter().zip(&fit).map(|(x, y)| x - y).collect();
        assert!((norm(&res) - res_norm).abs() < 1e-12);
        for j in 0..3 {
            assert!(dot(&res, &b.col(j)).abs() < 1e-9);
        }
    }

    #[test]
    fn gram_schmidt_orthonormalizes_and_drops_dependents() {
        let mut rng = SplitMix64::new(99);
        let v0: Vec<f64> = (0..6).map(|_| rng.next_signed()).collect();
        let v1: Vec<f64> = (0..6).map(|_| rng.next_signed()).collect();
        let mut v2 = v0.clone();
        axpy(&mut v2, 2.0, &v1); // dependent
        let basis = gram_schmidt(&[v0.clone(), v1.clone(), v2], 1e-10);
        assert_eq!(basis.len(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&basis[i], &basis[j]) - expect).abs() < 1e-12);
            }
        }
        // Projection of original vectors back onto the basis reproduces them.
        for v in [v0, v1] {
            let out = project_out(&v, &basis);
            assert!(norm(&out) < 1e-10);
        }
    }
}
