//! Dense complex matrices: the semantic target of diagram evaluation.
//!
//! Rows index outputs and columns index inputs. Multi-qubit indices are
//! big-endian: wire 0 is the most significant bit, which matches the
//! Kronecker product `A ⊗ B` placing `A` on the first wire.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

fn check_pow2(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

impl DenseMatrix {
    /// Row-major constructor. Both dimensions must be powers of two.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        check_pow2(rows)?;
        check_pow2(cols)?;
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: c,
            });
        }
        Self::new(r, c, rows.concat())
    }

    /// Convenience for real-valued literals.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn column(v: &[C64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        debug_assert!(rows.is_power_of_two() && cols.is_power_of_two());
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(d: &[C64]) -> Result<Self> {
        check_pow2(d.len())?;
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        debug_assert!(rows.is_power_of_two() && cols.is_power_of_two());
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Column vector contents (for `n × 1` matrices) or row contents (for `1 × n`).
    pub fn as_vector(&self) -> Option<&[C64]> {
        (self.cols == 1 || self.rows == 1).then_some(&self.data[..])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        Ok(self.matmul(&DenseMatrix::column(v)?)?.data)
    }

    pub fn kron(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        DenseMatrix::from_fn(rows, cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &DenseMatrix, f: impl Fn(C64, C64) -> C64) -> Result<DenseMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: C64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry-wise absolute difference; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> f64 {
        if self.shape() != rhs.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let m = self.to_nalgebra();
        m.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn powi(&self, k: usize) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: self.shape(),
            });
        }
        let mut acc = DenseMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Matrix exponential by scaling and squaring with a truncated Taylor series.
    pub fn expm(&self) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: self.shape(),
            });
        }
        let norm = self.norm1();
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let scaled = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        let n = self.rows;
        let mut result = DenseMatrix::identity(n);
        let mut term = DenseMatrix::identity(n);
        for k in 1..=24 {
            term = term.matmul(&scaled)?.scale(C64::new(1.0 / k as f64, 0.0));
            result = result.add(&term)?;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result)?;
        }
        Ok(result)
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Result<Self> {
        let data = (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)]))
            .collect();
        Self::new(m.nrows(), m.ncols(), data)
    }

    /// Tab-separated text dump, one row per line, entries as `re+imj`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format_complex(self[(r, c)])).collect();
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Parses the text dump format. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    parse_complex(tok).map_err(|msg| Error::Parse {
                        line: lineno + 1,
                        msg,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}j", z.re, sign, z.im.abs())
}

/// Parses `re`, `re±imj`, `±imj` or `(re,im)`.
pub fn parse_complex(tok: &str) -> std::result::Result<C64, String> {
    let s = tok.trim();
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    let bad = || format!("bad coefficient '{s}'");
    if let Some(inner) = s.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(bad)?;
        let (re, im) = inner.split_once(',').ok_or_else(bad)?;
        let re: f64 = re.trim().parse().map_err(|_| bad())?;
        let im: f64 = im.trim().parse().map_err(|_| bad())?;
        return Ok(C64::new(re, im));
    }
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        return Ok(C64::new(re, 0.0));
    };
    // Split at the last sign that is not the leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "+" | "" => 1.0,
        "-" => -1.0,
        other => other.parse().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parses_coefficient_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("-1.0").unwrap(), c(-1.0, 0.0));
        assert_eq!(parse_complex("0.5+0.25j").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_complex("1e-3-2j").unwrap(), c(1e-3, -2.0));
        assert_eq!(parse_complex("2.5e+1+1e-1j").unwrap(), c(25.0, 0.1));
        assert_eq!(parse_complex("(1.0,-2.0)").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("-3j").unwrap(), c(0.0, -3.0));
        assert!(parse_complex("1.0x").is_err());
        assert!(parse_complex("(1.0;2)").is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = DenseMatrix::from_rows(&[vec![c(1.0, -0.5), c(0.0, 0.0)], vec![c(-2.0, 3.0), c(0.25, 1.0)]])
            .unwrap();
        let back = DenseMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(DenseMatrix::new(3, 1, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn expm_of_pauli_z() {
        let z = DenseMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let t: f64 = 0.7;
        let u = z.scale(c(0.0, -t / 2.0)).expm().unwrap();
        let expect = DenseMatrix::diagonal(&[c(0.0, -t / 2.0).exp(), c(0.0, t / 2.0).exp()]).unwrap();
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn expm_large_norm() {
        let x = DenseMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let t = 40.0;
        let u = x.scale(c(0.0, -t)).expm().unwrap();
        let expect = DenseMatrix::from_rows(&[
            vec![c(t.cos(), 0.0), c(0.0, -t.sin())],
            vec![c(0.0, -t.sin()), c(t.cos(), 0.0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&expect) < 1e-11);
    }

    #[test]
    fn kron_orders_first_factor_most_significant() {
        let x = DenseMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let i = DenseMatrix::identity(2);
        let xi = x.kron(&i);
        // X on wire 0 maps |00> to |10>, i.e. index 0 -> index 2.
        assert_eq!(xi[(2, 0)], c(1.0, 0.0));
    }
}
