//! Small dense linear algebra over any [`Scalar`].
//!
//! Exact fields use Gaussian elimination with literal zero tests; floats use
//! partial pivoting, and float kernels go through an SVD.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: S) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() && S::EXACT {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j).add_ref(&a.mul_ref(other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    acc = acc.add_ref(&self.get(i, j).mul_ref(x));
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul_ref(s)).collect(),
        }
    }

    /// Largest absolute entry-wise difference, as a float.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub_ref(b).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Literal equality for exact fields, entrywise `|a − b| ≤ tol` for floats.
    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        if S::EXACT {
            self == other
        } else {
            (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tol
        }
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_scalar_string).collect())
            .collect()
    }

    /// `M Mᵀ = I` in the field's sense.
    pub fn is_orthogonal(&self) -> bool {
        self.rows == self.cols && self.mul(&self.transpose()).approx_eq(&Self::identity(self.rows))
    }

    fn max_abs(&self) -> S {
        let mut best = S::zero();
        for x in &self.data {
            let a = x.abs();
            if (a.clone() - best.clone()).is_positive() {
                best = a;
            }
        }
        best
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.max_abs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Exact: first nonzero entry. Float: largest magnitude.
            let mut pick: Option<usize> = None;
            for i in r..m.rows {
                let x = m.get(i, c);
                if x.negligible(&scale) {
                    continue;
                }
                match pick {
                    None => pick = Some(i),
                    Some(p) if !S::EXACT && (x.abs() - m.get(p, c).abs()).is_positive() => pick = Some(i),
                    _ => {}
                }
                if S::EXACT && pick.is_some() {
                    break;
                }
            }
            let Some(p) = pick else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m.get(r, c).clone();
            for j in 0..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() && S::EXACT {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Kernel basis read off the reduced row echelon form.
    pub fn rref_null_space(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// Kernel basis in the field's preferred method (SVD for floats).
    pub fn null_space(&self) -> Vec<Vec<S>> {
        S::null_space(self)
    }

    pub fn rank(&self) -> usize {
        self.cols - self.null_space().len()
    }

    pub fn determinant(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let mut pick: Option<usize> = None;
            for i in c..n {
                let x = m.get(i, c);
                if S::EXACT {
                    if !x.is_zero() {
                        pick = Some(i);
                        break;
                    }
                } else if pick.map_or(!(*x == S::zero()), |p| {
                    (x.abs() - m.get(p, c).abs()).is_positive()
                }) {
                    pick = Some(i);
                }
            }
            let Some(p) = pick else { return S::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det.mul_ref(&piv);
            for i in (c + 1)..n {
                let f = m.get(i, c).clone() / piv.clone();
                if f == S::zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solves `self · x = b` for a consistent system; `None` when the
    /// reduced system is inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, bi.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }
}

impl Matrix<f64> {
    fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| *self.get(i, j))
    }

    pub fn svd_least_squares(&self, b: &[f64]) -> Option<Vec<f64>> {
        let svd = self.to_nalgebra().svd(true, true);
        let rhs = nalgebra::DVector::from_column_slice(b);
        let x = svd.solve(&rhs, 1e-12).ok()?;
        Some(x.iter().cloned().collect())
    }

    /// Right singular vectors whose singular values fall below
    /// `rel_threshold` times the largest one.
    pub fn svd_null_space(&self, rel_threshold: f64) -> Vec<Vec<f64>> {
        if self.cols == 0 {
            return Vec::new();
        }
        // Pad to at least `cols` rows so the thin SVD exposes the full V.
        let rows = self.rows.max(self.cols);
        let mut dm = nalgebra::DMatrix::<f64>::zeros(rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                dm[(i, j)] = *self.get(i, j);
            }
        }
        let svd = dm.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = if smax == 0.0 { 0.0 } else { rel_threshold * smax };
        (0..self.cols)
            .filter(|&k| svd.singular_values[k] <= cutoff)
            .map(|k| (0..self.cols).map(|j| v_t[(k, j)]).collect())
            .collect()
    }
}

impl<S: Scalar> serde::Serialize for Matrix<S> {
    fn serialize<Z: serde::Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        self.to_string_rows().serialize(serializer)
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc.add_ref(&x.mul_ref(y)))
}

/// The Householder reflection exchanging `e₀` and the unit vector `v`.
/// Rational whenever `v` is.
pub fn householder_to<S: Scalar>(v: &[S]) -> Matrix<S> {
    let n = v.len();
    let mut w: Vec<S> = v.iter().map(|x| -x.clone()).collect();
    w[0] = S::one().sub_ref(&v[0]);
    let ww = dot(&w, &w);
    if ww.is_zero() {
        return Matrix::identity(n);
    }
    let two_over = S::from_i64(2) / ww;
    let mut h: Matrix<S> = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = h.get(i, j).sub_ref(&two_over.mul_ref(&w[i].mul_ref(&w[j])));
            h.set(i, j, v);
        }
    }
    h
}

/// Extends orthonormal vectors `given` (exactly unit, pairwise orthogonal)
/// to an orthonormal basis of `S^n`, returning only the new vectors. Stays in
/// the field: no square roots are taken.
pub fn orthonormal_completion<S: Scalar>(given: &[Vec<S>], n: usize) -> Vec<Vec<S>> {
    let mut basis: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); n];
            e[i] = S::one();
            e
        })
        .collect();
    for v in given {
        let coords: Vec<S> = basis.iter().map(|b| dot(v, b)).collect();
        let h = householder_to(&coords);
        let m = basis.len();
        let rotated: Vec<Vec<S>> = (0..m)
            .map(|j| {
                let mut out = vec![S::zero(); n];
                for (l, b) in basis.iter().enumerate() {
                    let c = h.get(l, j);
                    if c.is_zero() && S::EXACT {
                        continue;
                    }
                    for k in 0..n {
                        out[k] = out[k].add_ref(&c.mul_ref(&b[k]));
                    }
                }
                out
            })
            .collect();
        basis = rotated.into_iter().skip(1).collect();
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn determinant_exact() {
        let m = Matrix::from_rows(vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(4, 1)],
        ]);
        assert_eq!(m.determinant(), q(18, 1));
        let swap = Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
        assert_eq!(swap.determinant(), q(-1, 1));
    }

    #[test]
    fn null_space_exact_and_float_agree_on_rank() {
        let rows = [vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]];
        let mq = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q(x, 1)).collect())
                .collect(),
        );
        let mf = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| x as f64).collect())
                .collect(),
        );
        let kq = mq.null_space();
        assert_eq!(kq.len(), 2);
        for v in &kq {
            assert!(mq.mul_vec(v).iter().all(Scalar::is_zero));
        }
        let kf = mf.null_space();
        assert_eq!(kf.len(), 2);
        for v in &kf {
            assert!(mf.mul_vec(v).iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]]);
        assert!(m.solve(&[q(1, 1), q(3, 1)]).is_none());
        let x = m.solve(&[q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn householder_completion_is_rational_and_orthonormal() {
        // (3/5, 4/5, 0) and a unit vector orthogonal to it.
        let v1 = vec![q(3, 5), q(4, 5), q(0, 1)];
        let v2 = vec![q(0, 1), q(0, 1), q(1, 1)];
        let rest = orthonormal_completion(&[v1.clone(), v2.clone()], 3);
        assert_eq!(rest.len(), 1);
        let all = [v1, v2, rest[0].clone()];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let expected = if i == j { q(1, 1) } else { q(0, 1) };
                assert_eq!(dot(a, b), expected);
            }
        }
    }
}
