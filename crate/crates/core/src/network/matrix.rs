use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square interaction matrix. Entry `(i, j)` is the influence of node
/// `j` on node `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct InteractionMatrix {
    n: usize,
    entries: Vec<f64>,
    pub(crate) directed: bool,
}

impl InteractionMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(n: usize, entries: Vec<f64>, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("matrix must have at least one node".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self {
            n,
            entries,
            directed,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        let mut m = Self::new(n, entries, true)?;
        m.directed = !m.is_symmetric();
        Ok(m)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n], false)
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Column sums: `s_out[j] = sum_i A[i][j]`.
    pub fn out_degrees(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for row in self.entries.chunks_exact(self.n) {
            for (acc, v) in out.iter_mut().zip(row) {
                *acc += v;
            }
        }
        out
    }

    /// Row sums: `s_in[i] = sum_j A[i][j]`.
    pub fn in_degrees(&self) -> Vec<f64> {
        self.entries
            .chunks_exact(self.n)
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (yi, row) in y.iter_mut().zip(self.entries.chunks_exact(self.n)) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Returns a copy with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n,
            self.entries.iter().map(|v| v * factor).collect(),
            self.directed,
        )
    }

    /// Relabels nodes: new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = self.clone();
        for (a, &pa) in perm.iter().enumerate() {
            for (b, &pb) in perm.iter().enumerate() {
                out.set(a, b, self.get(pa, pb));
            }
        }
        out
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    /// Writes the matrix as JSON: dimensions plus row-major values.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// On-disk layout for exported matrices.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    directed: bool,
    values: Vec<f64>,
}

impl From<InteractionMatrix> for MatrixFile {
    fn from(m: InteractionMatrix) -> Self {
        MatrixFile {
            rows: m.n,
            cols: m.n,
            directed: m.directed,
            values: m.entries,
        }
    }
}

impl TryFrom<MatrixFile> for InteractionMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if f.rows != f.cols {
            return Err(Error::InvalidSpec(format!(
                "matrix must be square, got {}x{}",
                f.rows, f.cols
            )));
        }
        InteractionMatrix::new(f.rows, f.values, f.directed)
    }
}

/// Out-degree weighted average over node values.
///
/// Weights are the column sums of the interaction matrix, so
/// `apply(x) = sum_j s_out[j] x[j] / sum_j s_out[j]`.
#[derive(Debug, Clone)]
pub struct MeanField {
    weights: Vec<f64>,
    total: f64,
}

impl MeanField {
    pub fn new(a: &InteractionMatrix) -> Result<Self> {
        let weights = a.out_degrees();
        let total: f64 = weights.iter().sum();
        let scale: f64 = a.entries().iter().map(|v| v.abs()).sum();
        if scale == 0.0 || total.abs() <= 1e-14 * scale {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(Self { weights, total })
    }

    /// Like [`MeanField::new`], but an edgeless (zero-weight) network falls
    /// back to the plain arithmetic mean.
    pub fn new_or_uniform(a: &InteractionMatrix) -> Self {
        Self::new(a).unwrap_or_else(|_| Self {
            weights: vec![1.0; a.n_nodes()],
            total: a.n_nodes() as f64,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.weights.len());
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() / self.total
    }
}

/// `L(x) = <s_out . x> / <s_out>`.
pub fn mean_field(a: &InteractionMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != a.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: a.n_nodes(),
            actual: x.len(),
        });
    }
    Ok(MeanField::new(a)?.apply(x))
}

/// Effective interaction strength: the mean field of the in-degree vector.
pub fn a_eff(a: &InteractionMatrix) -> Result<f64> {
    Ok(MeanField::new(a)?.apply(&a.in_degrees()))
}
