//! Explicit Euler integration of the subgradient flow `x' ∈ -∂f(x)` and the
//! invariants it should respect: the energy identity `f(x(0)) - f(x(t)) =
//! ∫ ||x'||²`, conservation of `X^T X - Y^T Y` for factored objectives, and
//! constancy of the phase-retrieval component orthogonal to `span{a_i}`.
//!
//! Each Euler step uses the policy selection, so a flow with step `h` and the
//! subgradient method with constant step `h` visit the same states.
//!
//! Integration stops early when the selection is numerically zero, or when the
//! last two selections bracket the origin (their segment passes within the
//! same threshold of 0). The second test catches the chatter of Euler around a
//! kink where the Clarke set contains 0 but no single selection does.

use std::io::Write;

use crate::error::{check_dim, Error, Result};
use crate::format::fmt_real;
use crate::linalg::{self, norm, DenseMatrix, SpanBasis};
use crate::model::{FactoredPair, RipCertificate};
use crate::objectives::{Objective, ObjectiveKind, SignPolicy};

/// Selections (or bracketing pairs) below this norm count as stationary.
pub const STATIONARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStop {
    Horizon,
    Stationary,
    Bracketed,
}

/// Time-discretized trajectory with its monitors.
///
/// Monitors by objective:
/// - phase: `||P⊥(x - x0)||` and `||P_V x||²`
/// - robust PCA, sensing: `||φ(t) - φ(0)||_F` with `φ = X^T X - Y^T Y`, and `||X Y^T||_F²`
/// - symmetric rank one: tie distance and `||x||²`
#[derive(Clone, Debug)]
pub struct FlowRecord {
    pub kind: ObjectiveKind,
    pub factor_dims: Option<(usize, usize, usize)>,
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    /// `Σ h ||g_i||` over steps before `t_j`.
    pub length: Vec<f64>,
    /// `Σ h ||g_i||²` over steps before `t_j`.
    pub energy: Vec<f64>,
    pub monitor1: Vec<f64>,
    pub monitor2: Vec<f64>,
    pub stop: FlowStop,
}

impl FlowRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("record holds the initial state")
    }

    /// CSV with header `t,f,x_norm,length,energy,monitor1,monitor2`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"t,f,x_norm,length,energy,monitor1,monitor2\n")?;
        for j in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_real(self.times[j]),
                fmt_real(self.f[j]),
                fmt_real(norm(&self.states[j])),
                fmt_real(self.length[j]),
                fmt_real(self.energy[j]),
                fmt_real(self.monitor1[j]),
                fmt_real(self.monitor2[j])
            )?;
        }
        Ok(())
    }
}

fn balancedness(coords: &[f64], m: usize, n: usize, r: usize) -> Vec<f64> {
    let (xs, ys) = coords.split_at(m * r);
    let gx = linalg::gram(xs, m, r);
    let gy = linalg::gram(ys, n, r);
    gx.iter().zip(&gy).map(|(a, b)| a - b).collect()
}

fn product_frobenius_sq(coords: &[f64], m: usize, n: usize, r: usize) -> f64 {
    let (xs, ys) = coords.split_at(m * r);
    linalg::mul_abt(xs, ys, m, n, r).iter().map(|v| v * v).sum()
}

enum Monitor {
    Phase {
        span: SpanBasis,
        perp0: Vec<f64>,
    },
    Factored {
        dims: (usize, usize, usize),
        phi0: Vec<f64>,
    },
    Sym,
}

impl Monitor {
    fn new(obj: &Objective, x0: &[f64]) -> Result<Self> {
        Ok(match obj {
            Objective::RobustPhase(p) => {
                let span = SpanBasis::new(&p.a, p.dim(), 1e-12)?;
                let perp0 = span.project_complement(x0);
                Monitor::Phase { span, perp0 }
            }
            Objective::RobustPca(_) | Objective::RobustSensing(_) => {
                let (m, n, r) = obj.factor_dims().expect("factored objective");
                Monitor::Factored {
                    dims: (m, n, r),
                    phi0: balancedness(x0, m, n, r),
                }
            }
            Objective::SymRankOne(_) => Monitor::Sym,
        })
    }

    fn eval(&self, x: &[f64], res: &[f64]) -> (f64, f64) {
        match self {
            Monitor::Phase { span, perp0 } => {
                let perp = span.project_complement(x);
                let drift = perp
                    .iter()
                    .zip(perp0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let v = span.project(x);
                (drift, linalg::dot(&v, &v))
            }
            Monitor::Factored {
                dims: (m, n, r),
                phi0,
            } => {
                let phi = balancedness(x, *m, *n, *r);
                let drift = phi
                    .iter()
                    .zip(phi0)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (drift, product_frobenius_sq(x, *m, *n, *r))
            }
            Monitor::Sym => {
                let tie = res.iter().fold(f64::INFINITY, |a, r| a.min(r.abs()));
                (tie, linalg::dot(x, x))
            }
        }
    }
}

/// Norm of the point of the segment `[a, b]` closest to the origin.
fn segment_min_norm(a: &[f64], b: &[f64]) -> f64 {
    // Minimize ||a + t (b - a)|| over t in [0, 1].
    let d: Vec<f64> = b.iter().zip(a).map(|(bi, ai)| bi - ai).collect();
    let dd = linalg::dot(&d, &d);
    if dd == 0.0 {
        return norm(a);
    }
    let t = (-linalg::dot(a, &d) / dd).clamp(0.0, 1.0);
    a.iter()
        .zip(&d)
        .map(|(ai, di)| {
            let v = ai + t * di;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Explicit Euler with step `h` up to time `horizon` (`round(horizon / h)` steps).
pub fn integrate_flow(
    obj: &Objective,
    x0: &[f64],
    h: f64,
    horizon: f64,
    policy: SignPolicy,
) -> Result<FlowRecord> {
    check_dim(obj.dim(), x0.len())?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param(format!("step h = {h} must be positive")));
    }
    if !(horizon >= h && horizon.is_finite()) {
        return Err(Error::param(format!(
            "horizon {horizon} must be at least h = {h}"
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("initial point must be finite"));
    }
    let steps = (horizon / h).round() as usize;
    let monitor = Monitor::new(obj, x0)?;

    let mut rec = FlowRecord {
        kind: obj.kind(),
        factor_dims: obj.factor_dims(),
        h,
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        f: Vec::with_capacity(steps + 1),
        length: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        monitor1: Vec::with_capacity(steps + 1),
        monitor2: Vec::with_capacity(steps + 1),
        stop: FlowStop::Horizon,
    };
    let mut x = x0.to_vec();
    let mut length = 0.0;
    let mut energy = 0.0;
    let mut prev_g: Option<Vec<f64>> = None;
    for j in 0..=steps {
        let res = obj.residuals(&x)?;
        let f = obj.residual_weight() * res.iter().map(|r| r.abs()).sum::<f64>();
        let (m1, m2) = monitor.eval(&x, &res);
        rec.times.push(j as f64 * h);
        rec.states.push(x.clone());
        rec.f.push(f);
        rec.length.push(length);
        rec.energy.push(energy);
        rec.monitor1.push(m1);
        rec.monitor2.push(m2);
        if j == steps {
            break;
        }
        let g = obj.subgradient_from_residuals(&x, &res, policy);
        let gn = norm(&g);
        if gn < STATIONARY_TOL {
            rec.stop = FlowStop::Stationary;
            break;
        }
        if let Some(p) = &prev_g {
            if segment_min_norm(p, &g) < STATIONARY_TOL {
                rec.stop = FlowStop::Bracketed;
                break;
            }
        }
        let next: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - h * gi).collect();
        if next.iter().any(|v| !v.is_finite()) || !f.is_finite() {
            return Err(Error::Integration {
                t: j as f64 * h,
                last_state: x,
            });
        }
        length += h * gn;
        energy += h * gn * gn;
        x = next;
        prev_g = Some(g);
    }
    Ok(rec)
}

/// Largest defect `|f(x(0)) - f(x(t_j)) - E(t_j)|` of the energy identity.
pub fn check_chain_rule(rec: &FlowRecord) -> Result<f64> {
    let f0 = *rec
        .f
        .first()
        .ok_or_else(|| Error::param("empty flow record"))?;
    Ok(rec
        .f
        .iter()
        .zip(&rec.energy)
        .map(|(f, e)| (f0 - f - e).abs())
        .fold(0.0, f64::max))
}

/// Largest `||φ(t_j) - φ(0)||_F` for `φ = X^T X - Y^T Y`.
pub fn balancedness_drift(rec: &FlowRecord) -> Result<f64> {
    match rec.kind {
        ObjectiveKind::Sensing | ObjectiveKind::Rpca => {
            Ok(rec.monitor1.iter().copied().fold(0.0, f64::max))
        }
        k => Err(Error::param(format!(
            "balancedness needs a factored objective, got {k:?}"
        ))),
    }
}

/// Largest `||P⊥ x(t_j) - P⊥ x(0)||` with `P⊥` the projector onto `span{a_i}^⊥`.
pub fn orthogonal_component_drift(rec: &FlowRecord) -> Result<f64> {
    match rec.kind {
        ObjectiveKind::Phase => Ok(rec.monitor1.iter().copied().fold(0.0, f64::max)),
        k => Err(Error::param(format!(
            "orthogonal drift needs a phase objective, got {k:?}"
        ))),
    }
}

/// Constants bounding every trajectory started at `x0`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundCertificate {
    /// `||x_V(t)||² <= c1 / lambda_plus` with `c1 = 2N f(x0) + Σ|b_i|` and
    /// `lambda_plus` the smallest positive eigenvalue of `Σ a_i a_i^T`.
    Phase {
        c1: f64,
        lambda_plus: f64,
        bound: f64,
    },
    /// `||XY^T||_F² <= c2` and `||X||_F⁴ + ||Y||_F⁴ <= (m + n + r) c3`.
    Sensing {
        c: f64,
        c1: f64,
        c2: f64,
        c3: f64,
        m: usize,
        n: usize,
        r: usize,
    },
}

pub fn certified_bounds(
    obj: &Objective,
    x0: &[f64],
    cert: Option<&RipCertificate>,
) -> Result<BoundCertificate> {
    check_dim(obj.dim(), x0.len())?;
    match obj {
        Objective::RobustPhase(p) => {
            let n = p.dim();
            let count = p.count() as f64;
            let f0 = obj.value(x0)?;
            let c1 = 2.0 * count * f0 + p.b.iter().map(|b| b.abs()).sum::<f64>();
            let mut b = DenseMatrix::zeros(n, n);
            for ai in &p.a {
                for i in 0..n {
                    for j in 0..n {
                        let v = b.get(i, j);
                        b.set(i, j, v + ai[i] * ai[j]);
                    }
                }
            }
            let eig = linalg::symmetric_eigenvalues(&b, 1e-13)?;
            let top = eig.last().copied().unwrap_or(0.0);
            let lambda_plus = eig
                .iter()
                .copied()
                .find(|&l| l > 1e-10 * top)
                .ok_or_else(|| Error::param("all measurement vectors are zero"))?;
            Ok(BoundCertificate::Phase {
                c1,
                lambda_plus,
                bound: c1 / lambda_plus,
            })
        }
        Objective::RobustSensing(s) => {
            let cert = cert.ok_or_else(|| Error::param("sensing bounds need a RIP certificate"))?;
            if !(cert.c > 0.0) {
                return Err(Error::param(format!(
                    "certificate constant {} must be positive",
                    cert.c
                )));
            }
            let (m, n, r) = s.dims();
            let count = s.count() as f64;
            let f0 = obj.value(x0)?;
            let sum_b: f64 = s.b.iter().map(|b| b.abs()).sum();
            let c1 = (count * f0 + sum_b).powi(2) / count;
            let c2 = c1 / cert.c;
            let phi0 = balancedness(x0, m, n, r);
            let c3 = phi0.iter().map(|v| v * v).sum::<f64>() + 2.0 * c2;
            Ok(BoundCertificate::Sensing {
                c: cert.c,
                c1,
                c2,
                c3,
                m,
                n,
                r,
            })
        }
        _ => Err(Error::param(
            "certified bounds exist for phase retrieval and sensing only",
        )),
    }
}

/// Largest positive excess of a monitored quantity over its certified bound.
pub fn verify(rec: &FlowRecord, cert: &BoundCertificate) -> Result<f64> {
    match (cert, rec.kind) {
        (BoundCertificate::Phase { bound, .. }, ObjectiveKind::Phase) => Ok(rec
            .monitor2
            .iter()
            .map(|v| (v - bound).max(0.0))
            .fold(0.0, f64::max)),
        (
            BoundCertificate::Sensing {
                c2, c3, m, n, r, ..
            },
            ObjectiveKind::Sensing,
        ) => {
            let quartic_bound = (m + n + r) as f64 * c3;
            let mut worst: f64 = 0.0;
            for (state, prod) in rec.states.iter().zip(&rec.monitor2) {
                let pair = FactoredPair::unflatten(state, *m, *n, *r)?;
                let quartic = pair.x.frobenius_sq().powi(2) + pair.y.frobenius_sq().powi(2);
                worst = worst.max(prod - c2).max(quartic - quartic_bound);
            }
            Ok(worst)
        }
        (c, k) => Err(Error::param(format!(
            "certificate {c:?} does not match a {k:?} record"
        ))),
    }
}
