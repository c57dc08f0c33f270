//! Small dense matrix and vector helpers shared by the solvers and model types.

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from a row-major flat buffer. Panics when the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Mat {
        assert_eq!(data.len(), rows * cols, "flat buffer has wrong length");
        Mat { rows, cols, data }
    }

    /// Builds from row slices. Panics on ragged input.
    pub fn from_rows(rows_in: &[Vec<f64>]) -> Mat {
        let rows = rows_in.len();
        let cols = rows_in.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_in {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { rows, cols, data }
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

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T x`
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += xi * a;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `self += factor * other`
    pub fn scaled_add(&mut self, other: &Mat, factor: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.data {
            *a *= factor;
        }
    }

    /// Bitwise symmetry test.
    pub fn is_symmetric_exact(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j).to_bits() != self.get(j, i).to_bits() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += a * x`
pub fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Cholesky factor `L` with `A = L L^T`; `None` when a pivot drops to `tol` or below.
pub fn cholesky(a: &Mat, tol: f64) -> Option<Mat> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            d -= v * v;
        }
        if d <= tol {
            return None;
        }
        let dj = d.sqrt();
        l.set(j, j, dj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / dj);
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows();
    assert_eq!(b.len(), n);
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Positive-semidefiniteness test via diagonally pivoted outer-product
/// elimination. A diagonal pivot below `-tol` fails; once all remaining
/// diagonal entries sit within `tol` of zero, the remaining off-diagonal mass
/// must be negligible too.
pub fn is_psd(a: &Mat, tol: f64) -> bool {
    let n = a.rows();
    if a.cols() != n {
        return false;
    }
    let mut w = a.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let scale = 1.0 + (0..n).fold(0.0f64, |m, i| m.max(a.get(i, i).abs()));
    while !active.is_empty() {
        let (pos, &piv_idx) = active
            .iter()
            .enumerate()
            .max_by(|x, y| {
                let dx = w.get(*x.1, *x.1);
                let dy = w.get(*y.1, *y.1);
                dx.partial_cmp(&dy).unwrap()
            })
            .unwrap();
        let d = w.get(piv_idx, piv_idx);
        if d < -tol * scale {
            return false;
        }
        if d <= tol * scale {
            // Remaining block should be numerically zero for a PSD matrix.
            return active.iter().all(|&i| {
                active
                    .iter()
                    .all(|&j| w.get(i, j).abs() <= 1e3 * tol * scale)
            });
        }
        active.remove(pos);
        for &i in &active {
            for &j in &active {
                let v = w.get(i, j) - w.get(i, piv_idx) * w.get(piv_idx, j) / d;
                w.set(i, j, v);
            }
        }
    }
    true
}

/// Gaussian elimination with partial pivoting; `None` when the matrix is
/// singular at `pivot_tol`.
pub fn solve_dense(a: &Mat, b: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (best, best_val) = (col..n)
            .map(|r| (r, m.get(perm[r], col).abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if best_val <= pivot_tol {
            return None;
        }
        perm.swap(col, best);
        let prow = perm[col];
        let pval = m.get(prow, col);
        for r in (col + 1)..n {
            let row = perm[r];
            let f = m.get(row, col) / pval;
            if f != 0.0 {
                for c in col..n {
                    let v = m.get(row, c) - f * m.get(prow, c);
                    m.set(row, c, v);
                }
                rhs[row] -= f * rhs[prow];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let row = perm[col];
        let mut s = rhs[row];
        for c in (col + 1)..n {
            s -= m.get(row, c) * x[c];
        }
        x[col] = s / m.get(row, col);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_and_transpose() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.tr_matvec(&[1.0, 1.0, 1.0]), vec![9.0, 12.0]);
        assert_eq!(a.transpose().get(0, 2), 5.0);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Mat::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let l = cholesky(&a, 1e-12).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        let back = a.matvec(&x);
        for (bi, want) in back.iter().zip(&[1.0, 2.0, 3.0]) {
            assert!((bi - want).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(cholesky(&a, 1e-12).is_none());
    }

    #[test]
    fn psd_check_accepts_gram_matrices() {
        let b = Mat::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0], vec![0.0, 3.0]]);
        let mut g = Mat::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += b.get(k, i) * b.get(k, j);
                }
                g.set(i, j, s);
            }
        }
        assert!(is_psd(&g, 1e-10));
        // Rank-deficient PSD: outer product of a single vector.
        let v = [1.0, -2.0, 0.5];
        let mut o = Mat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                o.set(i, j, v[i] * v[j]);
            }
        }
        assert!(is_psd(&o, 1e-10));
        let neg = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(!is_psd(&neg, 1e-10));
    }

    #[test]
    fn dense_solve_matches_hand_solution() {
        let a = Mat::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]);
        let x = solve_dense(&a, &[4.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        let sing = Mat::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(solve_dense(&sing, &[1.0, 2.0], 1e-12).is_none());
    }
}
