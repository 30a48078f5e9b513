//! Dense integer and real matrices.

mod frame;
mod rank;
mod sample;
mod svd;

pub use frame::{orthonormal_complement, Frame};
pub use rank::{
    exact_rank, exact_rank_i64, hadamard_log2_bound, is_prime, modular_rank, random_prime, rank_mod_p, HybridRank,
    RankPath,
};
pub use sample::{sample_int_matrix, sample_real_matrix};
pub use svd::{hs_norm, op_norm, singular_values, SVD_DIM_CAP};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

/// Row-major matrix of finite doubles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch(format!("empty shape {rows}x{cols}")));
    }
    if rows.checked_mul(cols) != Some(len) {
        return Err(Error::DimensionMismatch(format!("{len} entries for a {rows}x{cols} matrix")));
    }
    Ok(())
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        check_shape(rows, cols, entries.len())?;
        Ok(Self { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_i64(rows.len(), cols, &rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![BigInt::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = BigInt::from(1);
        }
        Self { rows: n, cols: n, entries: e }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut e = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                e.push(self.get(r, c).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, entries: e }
    }

    /// Columns `idx` in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::DimensionMismatch(format!("column {bad} out of range {}", self.cols)));
        }
        let mut e = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            for &c in idx {
                e.push(self.get(r, c).clone());
            }
        }
        Self::new(self.rows, idx.len(), e)
    }

    /// Rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.rows) {
            return Err(Error::DimensionMismatch(format!("row {bad} out of range {}", self.rows)));
        }
        let e = idx.iter().flat_map(|&r| self.row(r).iter().cloned()).collect();
        Self::new(idx.len(), self.cols, e)
    }

    /// Entries as `i64` when all of them fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.entries.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }

    /// Exact Hilbert–Schmidt norm squared.
    pub fn hs_norm_squared(&self) -> BigInt {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// Square root of the exact entry-square sum, rounded once.
    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_squared().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (rows, cols, cells) = parse_text(text)?;
        let entries = cells
            .into_iter()
            .map(|(line, tok)| {
                tok.parse::<BigInt>()
                    .map_err(|_| Error::Parse { line, msg: format!("`{tok}` is not an integer") })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, entries)
    }
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols, data.len())?;
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        let mut data = vec![0.0; n * cols.len()];
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                data[i * cols.len() + j] = x;
            }
        }
        Self::new(n, cols.len(), data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), x)).collect())
    }

    /// `A^T y`.
    pub fn tr_mul_vec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} rows", y.len(), self.rows)));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, self.row(r), &mut out);
            }
        }
        Ok(out)
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (rows, cols, cells) = parse_text(text)?;
        let data = cells
            .into_iter()
            .map(|(line, tok)| {
                tok.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse { line, msg: format!("`{tok}` is not a finite number") })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, data)
    }

    /// Rows as vectors, the layout used for candidate sets.
    pub fn row_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// Data lines paired with their 1-based line numbers.
type NumberedLines = Vec<(usize, String)>;

/// Header `rows cols`, then one whitespace-separated row per line.
/// Blank lines and `#` comments are skipped.
fn parse_text(text: &str) -> Result<(usize, usize, NumberedLines)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse { line: hline, msg: format!("bad dimension `{s}`") })
    };
    let [r, c] = dims.as_slice() else {
        return Err(Error::Parse { line: hline, msg: "header must be `rows cols`".into() });
    };
    let (rows, cols) = (parse_dim(r)?, parse_dim(c)?);
    let mut cells = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != cols {
            return Err(Error::Parse { line, msg: format!("expected {cols} entries, found {}", toks.len()) });
        }
        seen += 1;
        if seen > rows {
            return Err(Error::Parse { line, msg: format!("more than {rows} rows") });
        }
        cells.extend(toks.into_iter().map(|t| (line, t.to_string())));
    }
    if seen != rows {
        return Err(Error::Parse { line: text.lines().count().max(1), msg: format!("expected {rows} rows, found {seen}") });
    }
    Ok((rows, cols, cells))
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Display for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = IntMatrix::from_rows(&[vec![1, -2, 3], vec![40, 5, -600]]).unwrap();
        let t = m.to_text();
        assert_eq!(t, "2 3\n1 -2 3\n40 5 -600\n");
        assert_eq!(IntMatrix::from_text(&t).unwrap(), m);
        let r = RealMatrix::from_rows(&[vec![0.5, -1e-3], vec![2.0, 3.25]]).unwrap();
        assert_eq!(RealMatrix::from_text(&r.to_text()).unwrap(), r);
    }

    #[test]
    fn text_errors_carry_line() {
        let e = IntMatrix::from_text("2 2\n1 2\n3 x\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, msg: "`x` is not an integer".into() });
        assert!(matches!(IntMatrix::from_text("2 2\n1 2 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(IntMatrix::from_text("2 2\n1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(IntMatrix::from_text(""), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn big_entries_parse() {
        let m = IntMatrix::from_text("1 1\n123456789012345678901234567890\n").unwrap();
        assert!(m.to_i64().is_none());
    }

    #[test]
    fn shape_invariants() {
        assert!(IntMatrix::from_i64(0, 2, &[]).is_err());
        assert!(IntMatrix::from_i64(2, 2, &[1, 2, 3]).is_err());
        assert!(RealMatrix::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn products() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, -1.0]).unwrap(), vec![-1.0, -1.0, -1.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 0.0, 1.0]).unwrap(), vec![6.0, 8.0]);
        assert_eq!(a.transpose().transpose(), a);
    }
}
