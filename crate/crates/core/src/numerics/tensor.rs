use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense vector of `f64`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor2 {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = 1.0;
        }
        t
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                op: "Tensor2::from_vec",
                left: format!("{rows}x{cols}"),
                right: format!("{} values", data.len()),
            });
        }
        Ok(Tensor2 { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input, so only
    /// meant for literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Tensor2 {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// A single-row matrix holding `v`.
    pub fn row(v: &[f64]) -> Self {
        Tensor2 {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row_slice(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_slice_mut(&mut self, r: usize) -> &mut [f64] {
        let c = self.cols;
        &mut self.data[r * c..(r + 1) * c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor2 {
        Tensor2 {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    /// `self · rhs`. Accumulates over the shared index in ascending order,
    /// so a single-row product matches [`affine`] bit for bit.
    pub fn matmul(&self, rhs: &Tensor2) -> Result<Tensor2> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                op: "matmul",
                left: self.shape_str(),
                right: rhs.shape_str(),
            });
        }
        let mut out = Tensor2::zeros(self.rows, rhs.cols);
        matmul_into(self, rhs, &mut out);
        Ok(out)
    }

    pub fn transpose(&self) -> Tensor2 {
        let mut out = Tensor2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Tensor2 {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Tensor2 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for Tensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row_slice(r))?;
        }
        Ok(())
    }
}

pub(crate) fn matmul_into(a: &Tensor2, b: &Tensor2, out: &mut Tensor2) {
    let (n, m) = (a.cols, b.cols);
    for r in 0..a.rows {
        let a_row = &a.data[r * n..(r + 1) * n];
        let o_row = &mut out.data[r * m..(r + 1) * m];
        o_row.fill(0.0);
        for (i, &x) in a_row.iter().enumerate() {
            let w_row = &b.data[i * m..(i + 1) * m];
            for (o, &w) in o_row.iter_mut().zip(w_row) {
                *o += x * w;
            }
        }
    }
}

/// Row-vector affine map `y = x·W + b`.
pub fn affine(x: &Vector, w: &Tensor2, b: &Vector) -> Result<Vector> {
    if x.len() != w.rows() || b.len() != w.cols() {
        return Err(Error::Shape {
            op: "affine",
            left: format!("x[{}], b[{}]", x.len(), b.len()),
            right: w.shape_str(),
        });
    }
    let m = w.cols();
    let mut y = vec![0.0; m];
    for (i, &xi) in x.iter().enumerate() {
        for (yj, &wij) in y.iter_mut().zip(w.row_slice(i)) {
            *yj += xi * wij;
        }
    }
    for (yj, bj) in y.iter_mut().zip(b.iter()) {
        *yj += bj;
    }
    Ok(Vector(y))
}

/// Elementwise `max(0, x)`.
pub fn relu(x: &Vector) -> Vector {
    Vector(x.iter().map(|&v| relu_scalar(v)).collect())
}

#[inline]
pub(crate) fn relu_scalar(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Elementwise sum, panicking on length mismatch (internal use only).
pub(crate) fn add_vec(a: &Vector, b: &Vector) -> Vector {
    assert_eq!(a.len(), b.len());
    Vector(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect())
}
