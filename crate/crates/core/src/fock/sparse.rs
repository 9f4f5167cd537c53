use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::io::fmt_f64;

/// Square complex matrix in compressed sparse row form.
///
/// Column indices within a row are sorted and unique; explicit zeros are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], cols: Vec::new(), vals: Vec::new(), hermitian: false }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets<I: IntoIterator<Item = (usize, usize, Complex64)>>(dim: usize, entries: I) -> Self {
        let mut t: Vec<(usize, usize, Complex64)> = entries.into_iter().collect();
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != Complex64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { dim, row_ptr, cols: keep_cols, vals: keep_vals, hermitian: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// True once [`verify_hermitian`](Self::verify_hermitian) has succeeded.
    pub fn is_marked_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Sets the hermitian flag after checking `‖A - A†‖_max ≤ tol`.
    pub fn verify_hermitian(mut self, tol: f64) -> Result<Self> {
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).map(|d| d.max_abs()).unwrap_or(f64::INFINITY)
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry in the columns selected by `keep`.
    pub fn max_abs_on_columns<P: Fn(usize) -> bool>(&self, keep: P) -> f64 {
        self.triplets().filter(|&(_, j, _)| keep(j)).map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (i, j, v * s)));
        out.hermitian = self.hermitian && s.im == 0.0;
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())));
        out.hermitian = self.hermitian;
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: Complex64, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_triplets(
            self.dim,
            self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, a * v))),
        ))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut marked = vec![false; self.dim];
        let mut touched = Vec::new();
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..self.dim {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if !marked[j] {
                        marked[j] = true;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if acc[j] != Complex64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(acc[j]);
                }
                acc[j] = Complex64::new(0.0, 0.0);
                marked[j] = false;
            }
            touched.clear();
            row_ptr[i + 1] = cols.len();
        }
        Ok(Self { dim: self.dim, row_ptr, cols, vals, hermitian: false })
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector of length {} vs {}", x.len(), self.dim)));
        }
        Ok((0..self.dim).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect())
    }

    /// Writes `row,col,re,im` triplets.
    pub fn write_coo_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "row,col,re,im")?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i},{j},{},{}", fmt_f64(v.re), fmt_f64(v.im))?;
        }
        Ok(())
    }
}

/// `AB - BA`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = OperatorMatrix::from_triplets(3, [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (2, 2, c(1.0, 0.0)), (2, 2, c(-1.0, 0.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
    }

    #[test]
    fn matmul_against_dense() {
        let a = OperatorMatrix::from_triplets(3, [(0, 1, c(1.0, 2.0)), (1, 2, c(3.0, 0.0)), (2, 0, c(0.0, 1.0)), (1, 1, c(2.0, 0.0))]);
        let b = a.adjoint();
        let p = a.matmul(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d: Complex64 = (0..3).map(|k| a.get(i, k) * b.get(k, j)).sum();
                assert_eq!(p.get(i, j), d);
            }
        }
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = OperatorMatrix::from_triplets(4, [(0, 3, c(1.0, 0.5)), (3, 1, c(-2.0, 0.0))]);
        assert_eq!(commutator(&a, &a).unwrap().nnz(), 0);
    }

    #[test]
    fn hermitian_flag_is_verified() {
        let a = OperatorMatrix::from_triplets(2, [(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))]);
        assert!(a.clone().verify_hermitian(1e-14).unwrap().is_marked_hermitian());
        let b = OperatorMatrix::from_triplets(2, [(0, 1, c(0.0, 1.0))]);
        assert!(matches!(b.verify_hermitian(1e-14), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(OperatorMatrix::identity(2).add(&OperatorMatrix::identity(3)).is_err());
    }
}
