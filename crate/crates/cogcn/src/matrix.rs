//! Dense row-major `f64` matrices with the handful of operations the model
//! needs. Graphs in this domain stay in the low thousands of nodes, so
//! everything is 64-bit and single-threaded; robustness wins over speed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::rng::SplitMix64;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps a row-major buffer of length `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "buffer length {} does not match {}x{}",
            data.len(),
            rows,
            cols
        );
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged row");
            data.extend_from_slice(r.as_ref());
        }
        DenseMatrix {
            rows: rows.len(),
            cols,
            data,
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self * rhs`. Inner loop runs over contiguous rows of `rhs`; zero
    /// entries of `self` are skipped, which pays off for the sparse
    /// propagation matrices this crate multiplies by constantly.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions differ: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &r) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// Element-wise `self + factor * other`, in place.
    pub fn add_scaled(&mut self, other: &DenseMatrix, factor: f64) {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        for (s, &o) in self.data.iter_mut().zip(&other.data) {
            *s += factor * o;
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        DenseMatrix::from_vec(self.rows, self.cols, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Scales row `i` by `weights[i]`.
    pub fn scale_rows(&self, weights: &[f64]) -> DenseMatrix {
        assert_eq!(weights.len(), self.rows, "one weight per row");
        let mut out = self.clone();
        for (i, &w) in weights.iter().enumerate() {
            for v in out.row_mut(i) {
                *v *= w;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Element-wise `max(0, x)`.
pub fn relu(m: &DenseMatrix) -> DenseMatrix {
    m.map(|x| if x > 0.0 { x } else { 0.0 })
}

/// Zeroes `grad` wherever the pre-activation was not strictly positive.
/// The subgradient of ReLU at exactly zero is taken as 0.
pub fn relu_mask(pre: &DenseMatrix, grad: &mut DenseMatrix) {
    assert_eq!(pre.shape(), grad.shape(), "shape mismatch");
    for (g, &p) in grad.data.iter_mut().zip(&pre.data) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Glorot/Xavier uniform initialization: entries uniform in
/// `[-sqrt(6/(rows+cols)), sqrt(6/(rows+cols)))`.
pub fn glorot_init(rows: usize, cols: usize, rng: &mut SplitMix64) -> DenseMatrix {
    assert!(rows > 0 && cols > 0, "dimensions must be positive");
    let bound = libm::sqrt(6.0 / (rows + cols) as f64);
    let data = (0..rows * cols)
        .map(|_| rng.next_range(-bound, bound))
        .collect();
    DenseMatrix::from_vec(rows, cols, data)
}

/// Squared Euclidean distance between two equal-length slices.
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Squared Euclidean norm of a slice.
pub fn squared_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}
