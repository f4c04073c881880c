//! Dense row-major matrices and the two small factorizations the crate needs:
//! cyclic Jacobi for symmetric spectra and Gram–Schmidt for span projectors.

use crate::error::{Error, Result};

/// Row-major dense matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("matrix entry {i} is not finite")));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        DenseMatrix::new(rows.len(), cols, data)
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
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

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &DenseMatrix) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        dot(&self.data, &other.data)
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        debug_assert_eq!(self.shape(), other.shape());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `A B^T` for row-major `a` (p×r) and `b` (q×r), returned as p×q row-major.
pub fn mul_abt(a: &[f64], b: &[f64], p: usize, q: usize, r: usize) -> Vec<f64> {
    let mut out = vec![0.0; p * q];
    for i in 0..p {
        let ai = &a[i * r..(i + 1) * r];
        for j in 0..q {
            out[i * q + j] = dot(ai, &b[j * r..(j + 1) * r]);
        }
    }
    out
}

/// `C B` for row-major `c` (p×q) and `b` (q×r).
pub fn mul_ab(c: &[f64], b: &[f64], p: usize, q: usize, r: usize) -> Vec<f64> {
    let mut out = vec![0.0; p * r];
    for i in 0..p {
        let row = &mut out[i * r..(i + 1) * r];
        for j in 0..q {
            let cij = c[i * q + j];
            if cij == 0.0 {
                continue;
            }
            for (o, bv) in row.iter_mut().zip(&b[j * r..(j + 1) * r]) {
                *o += cij * bv;
            }
        }
    }
    out
}

/// `C^T A` for row-major `c` (p×q) and `a` (p×r), giving q×r.
pub fn mul_atb(c: &[f64], a: &[f64], p: usize, q: usize, r: usize) -> Vec<f64> {
    let mut out = vec![0.0; q * r];
    for i in 0..p {
        let ai = &a[i * r..(i + 1) * r];
        for j in 0..q {
            let cij = c[i * q + j];
            if cij == 0.0 {
                continue;
            }
            for (o, av) in out[j * r..(j + 1) * r].iter_mut().zip(ai) {
                *o += cij * av;
            }
        }
    }
    out
}

/// Gram matrix `A^T A` (r×r) of a row-major p×r factor.
pub fn gram(a: &[f64], p: usize, r: usize) -> Vec<f64> {
    mul_atb(a, a, p, r, r)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Sweeps stop once the off-diagonal Frobenius mass falls below
/// `rel_tol * ||A||_F`.
pub fn symmetric_eigenvalues(a: &DenseMatrix, rel_tol: f64) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::param("eigenvalues need a square matrix"));
    }
    let mut m = a.as_slice().to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let total = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let threshold = rel_tol * total;
    let mut sweeps = 0;
    while total > 0.0 && off(&m) > threshold {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::param("Jacobi iteration failed to converge"));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(eig)
}

/// Orthonormal basis of the span of a set of vectors.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl SpanBasis {
    /// Modified Gram–Schmidt with one reorthogonalization pass; a candidate is
    /// dropped when its residual norm is at most `tol` times its original norm.
    pub fn new(vectors: &[Vec<f64>], dim: usize, tol: f64) -> Result<Self> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: v.len(),
                });
            }
            let original = norm(v);
            if original == 0.0 {
                continue;
            }
            let mut w = v.clone();
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let nw = norm(&w);
            if nw > tol * original {
                w.iter_mut().for_each(|x| *x /= nw);
                basis.push(w);
            }
            if basis.len() == dim {
                break;
            }
        }
        Ok(SpanBasis { dim, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for q in &self.basis {
            let c = dot(q, x);
            for (o, qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        out
    }

    /// Projection onto the orthogonal complement of the span.
    pub fn project_complement(&self, x: &[f64]) -> Vec<f64> {
        let p = self.project(x);
        x.iter().zip(&p).map(|(a, b)| a - b).collect()
    }
}
