//! Dense exact linear algebra over [`Scalar`].
//!
//! Matrices act on column vectors: entry `(i, j)` is the `e_i` coefficient of
//! the image of `e_j`.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() {
                    *o += &(a * x);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, s: &Scalar, rhs: &Matrix) {
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a += &(s * b);
            }
        }
    }

    /// `self·rhs − rhs·self`
    pub fn commutator(&self, rhs: &Matrix) -> Matrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].recip()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    a.sub_row_multiple(r, col, &f);
                    inv.sub_row_multiple(r, col, &f);
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for i in 0..self.rows {
            e.insert(self.row(i).to_vec());
        }
        e.dim()
    }

    /// Basis of the right kernel, in canonical reduced form.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = rref(self.clone());
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// Leading principal minors, in order of size.
    pub fn leading_minors(&self) -> Vec<Scalar> {
        (1..=self.rows.min(self.cols))
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.submatrix(&idx, &idx).determinant()
            })
            .collect()
    }

    pub fn determinant(&self) -> Scalar {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Scalar::zero();
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            let inv = p.recip().expect("nonzero pivot");
            for r in col + 1..n {
                if !a[(r, col)].is_zero() {
                    let f = &a[(r, col)] * &inv;
                    a.sub_row_multiple(r, col, &f);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for j in 0..self.cols {
            let x = &self[(r, j)] * s;
            self[(r, j)] = x;
        }
    }

    /// row[r] -= f * row[src]
    fn sub_row_multiple(&mut self, r: usize, src: usize, f: &Scalar) {
        for j in 0..self.cols {
            let b = &self[(src, j)];
            if !b.is_zero() {
                let x = f * b;
                self[(r, j)] -= &x;
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form and pivot columns.
pub fn rref(mut a: Matrix) -> (Matrix, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a[(row, col)].recip().expect("nonzero pivot");
        a.scale_row(row, &inv);
        for r in 0..a.rows {
            if r != row && !a[(r, col)].is_zero() {
                let f = a[(r, col)].clone();
                a.sub_row_multiple(r, row, &f);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// `g(u, v)` for a Gram matrix `g`.
pub fn inner(g: &Matrix, u: &[Scalar], v: &[Scalar]) -> Scalar {
    dot(u, &g.apply(v))
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

/// Incrementally grown row-echelon basis of a subspace.
///
/// Rows keep insertion order; each row has a unit pivot that is zero in every
/// later row, so reducing a vector row by row in insertion order is exact.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    len: usize,
    rows: Vec<(usize, Vector)>,
}

impl Echelon {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn reduce(&self, mut v: Vector) -> Vector {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v.to_vec()))
    }

    /// Adds `v` if independent; returns whether the span grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        assert_eq!(v.len(), self.len, "echelon vector length");
        let v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip().expect("nonzero pivot");
        let v: Vector = v.iter().map(|x| x * &inv).collect();
        self.rows.push((p, v));
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vector> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// Canonical basis (fully reduced, sorted by pivot); equal subspaces give
    /// equal output.
    pub fn canonical_basis(&self) -> Vec<Vector> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        let m = Matrix::from_rows(self.rows().cloned().collect());
        let (r, pivots) = rref(m);
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }
}

/// Canonical basis of the span of `vectors` in `Q(√d)^len`.
pub fn span_basis(len: usize, vectors: impl IntoIterator<Item = Vector>) -> Vec<Vector> {
    let mut e = Echelon::new(len);
    for v in vectors {
        e.insert(v);
    }
    e.canonical_basis()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_int_rows(rows)
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(a.determinant(), Scalar::from_int(4));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn kernel_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vector(&a.apply(v)));
        }
    }

    #[test]
    fn echelon_canonical_is_basis_independent() {
        let v = |xs: &[i64]| xs.iter().map(|&x| Scalar::from_int(x)).collect::<Vector>();
        let a = span_basis(3, [v(&[1, 1, 0]), v(&[0, 1, 1])]);
        let b = span_basis(3, [v(&[1, 2, 1]), v(&[1, 0, -1]), v(&[2, 2, 0])]);
        assert_eq!(a, b);
    }

    #[test]
    fn leading_minors_of_negative_definite() {
        let a = m(&[&[-2, 1], &[1, -2]]);
        let minors = a.leading_minors();
        assert_eq!(minors, vec![Scalar::from_int(-2), Scalar::from_int(3)]);
    }
}
