//! The four ℓ1 objectives with a Clarke-subgradient selection.
//!
//! Every objective is a weighted sum of `|r_k(x)|` over smooth residuals
//! `r_k`. Off the nonsmooth set (all residuals nonzero) the selection is the
//! gradient. On it, each tied residual contributes `s · ∇r_k` for the
//! [`SignPolicy`] value `s ∈ [-1, 1]`, which is an element of the Clarke
//! subdifferential by the chain rule.
//!
//! Exact ties are measure-zero events for generic initializations, which is
//! why the default policy only matters at hand-picked points.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot};
use crate::model::{PhaseInstance, RpcaInstance, SensingInstance};

/// Element picked from the set-valued sign at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPolicy {
    #[default]
    Zero,
    PlusOne,
    MinusOne,
}

impl SignPolicy {
    pub const ALL: [SignPolicy; 3] = [SignPolicy::Zero, SignPolicy::PlusOne, SignPolicy::MinusOne];

    #[inline]
    pub fn sign(self, t: f64) -> f64 {
        if t > 0.0 {
            1.0
        } else if t < 0.0 {
            -1.0
        } else {
            match self {
                SignPolicy::Zero => 0.0,
                SignPolicy::PlusOne => 1.0,
                SignPolicy::MinusOne => -1.0,
            }
        }
    }
}

/// Data vector `u` of `½ ||x x^T - u u^T||_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymRankOne {
    u: Vec<f64>,
    nondegenerate: bool,
}

impl SymRankOne {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("u must be a nonempty finite vector"));
        }
        let nondegenerate = u.iter().all(|&v| v != 0.0);
        Ok(SymRankOne { u, nondegenerate })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// True when every entry of `u` is nonzero.
    pub fn nondegenerate(&self) -> bool {
        self.nondegenerate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Rpca,
    Phase,
    Sensing,
    SymRankOne,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    /// `||X Y^T - M||_1`
    RobustPca(RpcaInstance),
    /// `(1/2N) Σ | <a_i, x>^2 - b_i |`
    RobustPhase(PhaseInstance),
    /// `(1/N) Σ | <A_i, X Y^T> - b_i |`
    RobustSensing(SensingInstance),
    /// `½ ||x x^T - u u^T||_1`
    SymRankOne(SymRankOne),
}

impl Objective {
    pub fn sym_rank_one(u: Vec<f64>) -> Result<Self> {
        Ok(Objective::SymRankOne(SymRankOne::new(u)?))
    }

    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Objective::RobustPca(_) => ObjectiveKind::Rpca,
            Objective::RobustPhase(_) => ObjectiveKind::Phase,
            Objective::RobustSensing(_) => ObjectiveKind::Sensing,
            Objective::SymRankOne(_) => ObjectiveKind::SymRankOne,
        }
    }

    /// Flat variable dimension.
    pub fn dim(&self) -> usize {
        match self {
            Objective::RobustPca(p) => {
                let (m, n, r) = p.dims();
                (m + n) * r
            }
            Objective::RobustPhase(p) => p.dim(),
            Objective::RobustSensing(s) => {
                let (m, n, r) = s.dims();
                (m + n) * r
            }
            Objective::SymRankOne(s) => s.u.len(),
        }
    }

    /// `(m, n, r)` for the factored objectives.
    pub fn factor_dims(&self) -> Option<(usize, usize, usize)> {
        match self {
            Objective::RobustPca(p) => Some(p.dims()),
            Objective::RobustSensing(s) => Some(s.dims()),
            _ => None,
        }
    }

    /// Weight multiplying each `|residual|` in the value.
    pub fn residual_weight(&self) -> f64 {
        match self {
            Objective::RobustPca(_) => 1.0,
            Objective::RobustPhase(p) => 0.5 / p.count() as f64,
            Objective::RobustSensing(s) => 1.0 / s.count() as f64,
            Objective::SymRankOne(_) => 0.5,
        }
    }

    /// Terms inside the absolute values: `XY^T - M` (row-major),
    /// `<a_i,x>^2 - b_i`, `<A_i, XY^T> - b_i`, or `x_i x_j - u_i u_j` (row-major).
    pub fn residuals(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Objective::RobustPca(p) => {
                let (m, n, r) = p.dims();
                let mut l = linalg::mul_abt(&x[..m * r], &x[m * r..], m, n, r);
                for (li, mi) in l.iter_mut().zip(p.m.as_slice()) {
                    *li -= mi;
                }
                l
            }
            Objective::RobustPhase(p) => {
                p.a.iter()
                    .zip(&p.b)
                    .map(|(ai, bi)| {
                        let z = dot(ai, x);
                        z * z - bi
                    })
                    .collect()
            }
            Objective::RobustSensing(s) => {
                let (m, n, r) = s.dims();
                let l = linalg::mul_abt(&x[..m * r], &x[m * r..], m, n, r);
                s.a.iter()
                    .zip(&s.b)
                    .map(|(ai, bi)| dot(ai.as_slice(), &l) - bi)
                    .collect()
            }
            Objective::SymRankOne(s) => {
                let u = &s.u;
                let n = u.len();
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(x[i] * x[j] - u[i] * u[j]);
                    }
                }
                out
            }
        })
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let res = self.residuals(x)?;
        Ok(self.residual_weight() * res.iter().map(|r| r.abs()).sum::<f64>())
    }

    /// Smallest `|residual|`; zero exactly on the nonsmooth set.
    pub fn tie_distance(&self, x: &[f64]) -> Result<f64> {
        let res = self.residuals(x)?;
        Ok(res.iter().fold(f64::INFINITY, |acc, r| acc.min(r.abs())))
    }

    /// One element of the Clarke subdifferential at `x`.
    pub fn subgradient_select(&self, x: &[f64], policy: SignPolicy) -> Result<Vec<f64>> {
        let res = self.residuals(x)?;
        Ok(self.subgradient_from_residuals(x, &res, policy))
    }

    /// Value and selected subgradient from one residual evaluation.
    pub fn value_and_subgradient(&self, x: &[f64], policy: SignPolicy) -> Result<(f64, Vec<f64>)> {
        let res = self.residuals(x)?;
        let f = self.residual_weight() * res.iter().map(|r| r.abs()).sum::<f64>();
        Ok((f, self.subgradient_from_residuals(x, &res, policy)))
    }

    pub(crate) fn subgradient_from_residuals(
        &self,
        x: &[f64],
        res: &[f64],
        policy: SignPolicy,
    ) -> Vec<f64> {
        match self {
            Objective::RobustPca(p) => {
                let (m, n, r) = p.dims();
                let c: Vec<f64> = res.iter().map(|&t| policy.sign(t)).collect();
                let (xs, ys) = x.split_at(m * r);
                let mut g = linalg::mul_ab(&c, ys, m, n, r);
                g.extend(linalg::mul_atb(&c, xs, m, n, r));
                g
            }
            Objective::RobustPhase(p) => {
                let inv_n = 1.0 / p.count() as f64;
                let mut g = vec![0.0; x.len()];
                for (ai, &t) in p.a.iter().zip(res) {
                    let w = dot(ai, x) * policy.sign(t);
                    if w == 0.0 {
                        continue;
                    }
                    for (gi, aij) in g.iter_mut().zip(ai) {
                        *gi += w * aij;
                    }
                }
                g.iter_mut().for_each(|v| *v *= inv_n);
                g
            }
            Objective::RobustSensing(s) => {
                let (m, n, r) = s.dims();
                let inv_n = 1.0 / s.count() as f64;
                let mut weighted = vec![0.0; m * n];
                for (ai, &t) in s.a.iter().zip(res) {
                    let c = policy.sign(t);
                    if c == 0.0 {
                        continue;
                    }
                    for (w, av) in weighted.iter_mut().zip(ai.as_slice()) {
                        *w += c * av;
                    }
                }
                weighted.iter_mut().for_each(|v| *v *= inv_n);
                let (xs, ys) = x.split_at(m * r);
                let mut g = linalg::mul_ab(&weighted, ys, m, n, r);
                g.extend(linalg::mul_atb(&weighted, xs, m, n, r));
                g
            }
            Objective::SymRankOne(s) => {
                // The ½ cancels against the symmetric double count of (i, j).
                let n = s.u.len();
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| policy.sign(res[i * n + j]) * x[j])
                            .sum::<f64>()
                    })
                    .collect()
            }
        }
    }
}
