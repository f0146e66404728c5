use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DyadicGaussian;
use crate::error::{Error, Result};

/// Largest row or column count an [`ExactMatrix`] may have.
pub const MAX_SIDE: usize = 1 << 12;

/// Dense matrix of [`DyadicGaussian`] entries, row-major, with power-of-two
/// dimensions so rows and columns are indexed by bit strings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<DyadicGaussian>,
}

fn check_side(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::dims(format!("{n} is not a power of two")));
    }
    if n > MAX_SIDE {
        return Err(Error::DimensionCap {
            dim: n,
            max: MAX_SIDE,
        });
    }
    Ok(())
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_side(rows)?;
        check_side(cols)?;
        Ok(ExactMatrix {
            rows,
            cols,
            data: vec![DyadicGaussian::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = DyadicGaussian::one();
        }
        Ok(m)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> DyadicGaussian,
    ) -> Result<Self> {
        check_side(rows)?;
        check_side(cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<DyadicGaussian>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("ragged rows"));
        }
        check_side(nrows)?;
        check_side(ncols)?;
        Ok(ExactMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entried matrix from nested rows, scaled by `2^-denom_log`.
    pub fn from_ints(rows: &[&[i64]], denom_log: u32) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| DyadicGaussian::new(v, 0, denom_log))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn diagonal(entries: Vec<DyadicGaussian>) -> Result<Self> {
        let n = entries.len();
        let mut m = Self::zeros(n, n)?;
        for (i, v) in entries.into_iter().enumerate() {
            m.data[i * n + i] = v;
        }
        Ok(m)
    }

    /// `|i⟩⟨j|` in an `n × n` matrix.
    pub fn unit(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        m.set(i, j, DyadicGaussian::one());
        Ok(m)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<DyadicGaussian>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        ExactMatrix { rows, cols, data }
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

    pub fn get(&self, r: usize, c: usize) -> &DyadicGaussian {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: DyadicGaussian) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[DyadicGaussian] {
        &self.data
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![DyadicGaussian::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            let row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for (j, acc) in row.iter_mut().enumerate() {
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        *acc += &(a * b);
                    }
                }
            }
        }
        Ok(ExactMatrix::from_raw(self.rows, rhs.cols, out))
    }

    pub fn add(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(
        &self,
        rhs: &ExactMatrix,
        f: impl Fn(&DyadicGaussian, &DyadicGaussian) -> DyadicGaussian,
    ) -> Result<ExactMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::dims(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        Ok(ExactMatrix::from_raw(self.rows, self.cols, data))
    }

    pub fn scale(&self, s: &DyadicGaussian) -> ExactMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        ExactMatrix::from_raw(self.rows, self.cols, data)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ExactMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).conj());
            }
        }
        ExactMatrix::from_raw(self.cols, self.rows, data)
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        ExactMatrix::from_raw(self.cols, self.rows, data)
    }

    pub fn conj(&self) -> ExactMatrix {
        ExactMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(DyadicGaussian::conj).collect(),
        )
    }

    pub fn kron(&self, rhs: &ExactMatrix) -> Result<ExactMatrix> {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        ExactMatrix::from_fn(rows, cols, |r, c| {
            let a = self.get(r / rhs.rows, c / rhs.cols);
            if a.is_zero() {
                return DyadicGaussian::zero();
            }
            a * rhs.get(r % rhs.rows, c % rhs.cols)
        })
    }

    pub fn trace(&self) -> Result<DyadicGaussian> {
        if !self.is_square() {
            return Err(Error::dims("trace of a non-square matrix"));
        }
        let mut acc = DyadicGaussian::zero();
        for i in 0..self.rows {
            acc += self.get(i, i);
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Result<ExactMatrix> {
        if !self.is_square() {
            return Err(Error::dims("power of a non-square matrix"));
        }
        let mut result = ExactMatrix::identity(self.rows)?;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `Tr(A^e)`, computed exactly.
    pub fn trace_power(&self, e: u32) -> Result<DyadicGaussian> {
        if e == 0 {
            return Err(Error::input("trace power exponent must be positive"));
        }
        if !self.is_square() {
            return Err(Error::dims("trace power of a non-square matrix"));
        }
        // Tr(A^e) = Tr(A^{e-h} A^h); avoids one full product at the end.
        let h = e / 2;
        let left = self.pow(e - h)?;
        if h == 0 {
            return left.trace();
        }
        let right = self.pow(h)?;
        let mut acc = DyadicGaussian::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = left.get(i, k);
                if !a.is_zero() {
                    acc += &(a * right.get(k, i));
                }
            }
        }
        Ok(acc)
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        (0..self.rows).all(|r| (r..self.cols).all(|c| *self.get(r, c) == self.get(c, r).conj()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(DyadicGaussian::is_zero)
    }

    /// Largest denominator exponent over all entries.
    pub fn max_denom_log(&self) -> u32 {
        self.data.iter().map(DyadicGaussian::denom_log).max().unwrap_or(0)
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).to_c64())
    }

    /// Submatrix of rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<ExactMatrix> {
        if r0 + nr > self.rows || c0 + nc > self.cols {
            return Err(Error::dims("block out of range"));
        }
        ExactMatrix::from_fn(nr, nc, |r, c| self.get(r0 + r, c0 + c).clone())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
