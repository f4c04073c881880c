//! Problem instances, synthetic generators with sparse corruption, and the
//! Gram-spectrum lower bound for sensing operators.
//!
//! Corruptions are Bernoulli(p) supported with magnitudes uniform on
//! `[-sigma, sigma]`. This is a stand-in for whatever outlier process the data
//! of interest actually follows.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::rng::Rng;

/// Factor pair `(X, Y)` with `X: m×r` and `Y: n×r`.
///
/// Flattened coordinates list `X` row-major followed by `Y` row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPair {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
}

impl FactoredPair {
    pub fn new(x: DenseMatrix, y: DenseMatrix) -> Result<Self> {
        if x.cols() != y.cols() || x.cols() == 0 {
            return Err(Error::param(format!(
                "factor ranks must agree and be positive (X has {}, Y has {})",
                x.cols(),
                y.cols()
            )));
        }
        Ok(FactoredPair { x, y })
    }

    pub fn rank(&self) -> usize {
        self.x.cols()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.x.as_slice().to_vec();
        v.extend_from_slice(self.y.as_slice());
        v
    }

    pub fn unflatten(coords: &[f64], m: usize, n: usize, r: usize) -> Result<Self> {
        crate::error::check_dim((m + n) * r, coords.len())?;
        let (xs, ys) = coords.split_at(m * r);
        FactoredPair::new(
            DenseMatrix::new(m, r, xs.to_vec())?,
            DenseMatrix::new(n, r, ys.to_vec())?,
        )
    }

    /// The product `X Y^T`.
    pub fn product(&self) -> DenseMatrix {
        let (m, r) = self.x.shape();
        let n = self.y.rows();
        let data = linalg::mul_abt(self.x.as_slice(), self.y.as_slice(), m, n, r);
        DenseMatrix::new(m, n, data).expect("product of finite factors")
    }
}

/// Ground truth kept alongside a generated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance<T> {
    pub truth: T,
    pub corruption: Vec<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RpcaInstance {
    pub m: DenseMatrix,
    pub rank: usize,
    pub provenance: Option<Provenance<DenseMatrix>>,
}

impl RpcaInstance {
    pub fn new(m: DenseMatrix, rank: usize) -> Result<Self> {
        let (rows, cols) = m.shape();
        if rank == 0 || rank > rows.min(cols) {
            return Err(Error::param(format!(
                "rank {rank} must lie in 1..={}",
                rows.min(cols)
            )));
        }
        Ok(RpcaInstance {
            m,
            rank,
            provenance: None,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m.rows(), self.m.cols(), self.rank)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseInstance {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub provenance: Option<Provenance<Vec<f64>>>,
}

impl PhaseInstance {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::param(
                "phase retrieval needs at least one measurement",
            ));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(Error::param("measurement vectors must be nonempty"));
        }
        for ai in &a {
            crate::error::check_dim(n, ai.len())?;
        }
        crate::error::check_dim(a.len(), b.len())?;
        if a.iter().flatten().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::param("phase instance has non-finite data"));
        }
        Ok(PhaseInstance {
            a,
            b,
            provenance: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }

    pub fn count(&self) -> usize {
        self.a.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensingInstance {
    pub a: Vec<DenseMatrix>,
    pub b: Vec<f64>,
    pub rank: usize,
    pub provenance: Option<Provenance<DenseMatrix>>,
}

impl SensingInstance {
    pub fn new(a: Vec<DenseMatrix>, b: Vec<f64>, rank: usize) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::param(
                "matrix sensing needs at least one measurement",
            ));
        }
        let shape = a[0].shape();
        for ai in &a {
            if ai.shape() != shape {
                return Err(Error::param(format!(
                    "sensing matrices must share shape {:?}, found {:?}",
                    shape,
                    ai.shape()
                )));
            }
        }
        crate::error::check_dim(a.len(), b.len())?;
        if rank == 0 || rank > shape.0.min(shape.1) {
            return Err(Error::param(format!(
                "rank {rank} must lie in 1..={}",
                shape.0.min(shape.1)
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("observations must be finite"));
        }
        Ok(SensingInstance {
            a,
            b,
            rank,
            provenance: None,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        let (m, n) = self.a[0].shape();
        (m, n, self.rank)
    }

    pub fn count(&self) -> usize {
        self.a.len()
    }
}

fn check_corruption(p: f64, sigma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!(
            "corruption fraction {p} outside [0, 1]"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!(
            "corruption magnitude {sigma} must be positive"
        )));
    }
    Ok(())
}

fn sparse_vector(rng: &mut Rng, len: usize, p: f64, sigma: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            if rng.bernoulli(p) {
                sigma * (2.0 * rng.uniform() - 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

fn low_rank_truth(rng: &mut Rng, m: usize, n: usize, r: usize) -> DenseMatrix {
    let u = rng.normal_vec(m * r);
    let v = rng.normal_vec(n * r);
    DenseMatrix::new(m, n, linalg::mul_abt(&u, &v, m, n, r)).expect("finite product")
}

/// `M = L + S` with `L = U V^T` Gaussian of rank `r_true` and sparse `S`.
///
/// The fitting rank of the returned instance is `r_true`.
pub fn gen_rpca_instance(
    seed: u64,
    m: usize,
    n: usize,
    r_true: usize,
    p: f64,
    sigma: f64,
) -> Result<RpcaInstance> {
    if m == 0 || n == 0 || r_true == 0 || r_true > m.min(n) {
        return Err(Error::param(format!(
            "invalid dimensions m={m}, n={n}, r_true={r_true}"
        )));
    }
    check_corruption(p, sigma)?;
    let mut rng = Rng::new(seed);
    let truth = low_rank_truth(&mut rng, m, n, r_true);
    let s = sparse_vector(&mut rng, m * n, p, sigma);
    let data = truth
        .as_slice()
        .iter()
        .zip(&s)
        .map(|(l, e)| l + e)
        .collect();
    let mut inst = RpcaInstance::new(DenseMatrix::new(m, n, data)?, r_true)?;
    inst.provenance = Some(Provenance {
        truth,
        corruption: s,
        seed,
    });
    Ok(inst)
}

/// `b_i = <a_i, x*>^2 + s_i` with Gaussian `a_i`, `x*`.
pub fn gen_phase_instance(
    seed: u64,
    n: usize,
    count: usize,
    p: f64,
    sigma: f64,
) -> Result<PhaseInstance> {
    if n == 0 || count == 0 {
        return Err(Error::param(format!("invalid dimensions n={n}, N={count}")));
    }
    check_corruption(p, sigma)?;
    let mut rng = Rng::new(seed);
    let a: Vec<Vec<f64>> = (0..count).map(|_| rng.normal_vec(n)).collect();
    let truth = rng.normal_vec(n);
    let s = sparse_vector(&mut rng, count, p, sigma);
    let b = a
        .iter()
        .zip(&s)
        .map(|(ai, si)| {
            let z = linalg::dot(ai, &truth);
            z * z + si
        })
        .collect();
    let mut inst = PhaseInstance::new(a, b)?;
    inst.provenance = Some(Provenance {
        truth,
        corruption: s,
        seed,
    });
    Ok(inst)
}

/// `b_i = <A_i, L*> + s_i` with Gaussian `A_i` and `L* = U V^T` of rank `r_true`.
#[allow(clippy::too_many_arguments)]
pub fn gen_sensing_instance(
    seed: u64,
    m: usize,
    n: usize,
    r_true: usize,
    rank: usize,
    count: usize,
    p: f64,
    sigma: f64,
) -> Result<SensingInstance> {
    if m == 0 || n == 0 || count == 0 || r_true == 0 || r_true > m.min(n) {
        return Err(Error::param(format!(
            "invalid dimensions m={m}, n={n}, r_true={r_true}, N={count}"
        )));
    }
    check_corruption(p, sigma)?;
    let mut rng = Rng::new(seed);
    let truth = low_rank_truth(&mut rng, m, n, r_true);
    let a: Vec<DenseMatrix> = (0..count)
        .map(|_| DenseMatrix::new(m, n, rng.normal_vec(m * n)).expect("finite"))
        .collect();
    let s = sparse_vector(&mut rng, count, p, sigma);
    let b = a
        .iter()
        .zip(&s)
        .map(|(ai, si)| ai.inner(&truth) + si)
        .collect();
    let mut inst = SensingInstance::new(a, b, rank)?;
    inst.provenance = Some(Provenance {
        truth,
        corruption: s,
        seed,
    });
    Ok(inst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    ExactGram,
}

/// Lower constant `c` with `(1/N) sum <A_i, B>^2 >= c ||B||_F^2` for every `B`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RipCertificate {
    pub c: f64,
    pub method: CertificateMethod,
}

pub const DEFAULT_GRAM_CAP: usize = 4096;

pub fn rip_lower_certificate(a: &[DenseMatrix]) -> Result<RipCertificate> {
    rip_lower_certificate_with_cap(a, DEFAULT_GRAM_CAP)
}

/// Smallest eigenvalue of `G = (1/N) sum vec(A_i) vec(A_i)^T`, clamped at 0.
///
/// The bound holds over all matrices, so it also certifies the rank-restricted
/// inequality (possibly conservatively).
pub fn rip_lower_certificate_with_cap(a: &[DenseMatrix], cap: usize) -> Result<RipCertificate> {
    let first = a
        .first()
        .ok_or_else(|| Error::param("certificate needs at least one matrix"))?;
    let (m, n) = first.shape();
    if let Some(bad) = a.iter().find(|ai| ai.shape() != (m, n)) {
        return Err(Error::param(format!(
            "shape mismatch: {:?} vs {:?}",
            (m, n),
            bad.shape()
        )));
    }
    let d = m * n;
    if d > cap {
        return Err(Error::Size { size: d, cap });
    }
    let inv_n = 1.0 / a.len() as f64;
    let mut g = DenseMatrix::zeros(d, d);
    for ai in a {
        let v = ai.as_slice();
        for i in 0..d {
            if v[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let cur = g.get(i, j);
                g.set(i, j, cur + v[i] * v[j]);
            }
        }
    }
    let g = DenseMatrix::new(d, d, g.into_vec().into_iter().map(|x| x * inv_n).collect())?;
    let eig = linalg::symmetric_eigenvalues(&g, 1e-10)?;
    Ok(RipCertificate {
        c: eig[0].max(0.0),
        method: CertificateMethod::ExactGram,
    })
}

/// The basis matrices `E_ij` of `R^{m×n}` in row-major order.
pub fn basis_matrices(m: usize, n: usize) -> Vec<DenseMatrix> {
    (0..m * n)
        .map(|k| {
            let mut e = DenseMatrix::zeros(m, n);
            e.set(k / n, k % n, 1.0);
            e
        })
        .collect()
}
