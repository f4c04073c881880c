//! The subgradient method `x_{k+1} = x_k - α_k g_k` with `g_k` the policy
//! selection at `x_k`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::format::fmt_real;
use crate::linalg::norm;
use crate::objectives::{Objective, SignPolicy};

/// Iterates with a norm above this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    /// `α_k = alpha_bar / (k + 1)`
    Harmonic {
        alpha_bar: f64,
    },
    Constant {
        alpha: f64,
    },
    Explicit {
        steps: Vec<f64>,
    },
}

impl StepSchedule {
    pub fn harmonic(alpha_bar: f64) -> Self {
        StepSchedule::Harmonic { alpha_bar }
    }

    pub fn constant(alpha: f64) -> Self {
        StepSchedule::Constant { alpha }
    }

    pub fn explicit(steps: Vec<f64>) -> Result<Self> {
        let s = StepSchedule::Explicit { steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        match self {
            StepSchedule::Harmonic { alpha_bar: a } | StepSchedule::Constant { alpha: a } => {
                if !ok(*a) {
                    return Err(Error::param(format!("step parameter {a} must be positive")));
                }
            }
            StepSchedule::Explicit { steps } => {
                if let Some(i) = steps.iter().position(|&v| !ok(v)) {
                    return Err(Error::param(format!("explicit step {i} is not positive")));
                }
            }
        }
        Ok(())
    }

    /// Whether the sequence never increases (harmonic and constant always do).
    pub fn is_nonincreasing(&self) -> bool {
        match self {
            StepSchedule::Explicit { steps } => steps.windows(2).all(|w| w[1] <= w[0]),
            _ => true,
        }
    }

    pub fn step(&self, k: usize) -> Result<f64> {
        match self {
            StepSchedule::Harmonic { alpha_bar } => Ok(alpha_bar / (k as f64 + 1.0)),
            StepSchedule::Constant { alpha } => Ok(*alpha),
            StepSchedule::Explicit { steps } => steps.get(k).copied().ok_or(Error::Range {
                index: k,
                len: steps.len(),
            }),
        }
    }
}

pub fn schedule_step(s: &StepSchedule, k: usize) -> Result<f64> {
    s.step(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Stopped at iteration `at` on a non-finite value or an iterate norm above
    /// [`DIVERGENCE_NORM`]; the record keeps the last finite state.
    Diverged {
        at: usize,
    },
}

/// Per-coordinate extent of a set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn around(x: &[f64]) -> Self {
        BoundingBox {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    pub fn include(&mut self, x: &[f64]) {
        for ((l, h), &v) in self.lo.iter_mut().zip(self.hi.iter_mut()).zip(x) {
            *l = l.min(v);
            *h = h.max(v);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| l <= v && v <= h)
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l)
    }

    /// Norm of the farthest corner from the origin, an upper bound on `||x||`
    /// over the box.
    pub fn max_norm(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let c = l.abs().max(h.abs());
                c * c
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Trace of one run. Scalar arrays are indexed by iteration `k = 0..len()`,
/// describing `x_k` and the step taken from it.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub alpha: Vec<f64>,
    pub f: Vec<f64>,
    pub x_norm: Vec<f64>,
    pub step_norm: Vec<f64>,
    pub tie_dist: Vec<f64>,
    /// `(k, x_k)` for every `k` divisible by the stride, plus the final point.
    pub iterates: Vec<(usize, Vec<f64>)>,
    pub stride: usize,
    pub bbox: BoundingBox,
    pub initial: Vec<f64>,
    pub final_point: Vec<f64>,
    pub termination: Termination,
}

impl RunRecord {
    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn diverged(&self) -> bool {
        matches!(self.termination, Termination::Diverged { .. })
    }

    /// CSV with header `k,alpha,f,x_norm,step_norm,tie_dist`, one row per
    /// stride multiple and one for the last step.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"k,alpha,f,x_norm,step_norm,tie_dist\n")?;
        let last = self.len().saturating_sub(1);
        for k in 0..self.len() {
            if k % self.stride != 0 && k != last {
                continue;
            }
            writeln!(
                w,
                "{},{},{},{},{},{}",
                k,
                fmt_real(self.alpha[k]),
                fmt_real(self.f[k]),
                fmt_real(self.x_norm[k]),
                fmt_real(self.step_norm[k]),
                fmt_real(self.tie_dist[k])
            )?;
        }
        Ok(())
    }
}

pub fn default_stride(iterations: usize) -> usize {
    (iterations / 10_000).max(1)
}

/// Run `iterations` steps of the subgradient method from `x0`.
///
/// `stride` thins stored iterates (0 picks [`default_stride`]).
pub fn run_subgradient(
    obj: &Objective,
    x0: &[f64],
    schedule: &StepSchedule,
    iterations: usize,
    policy: SignPolicy,
    stride: usize,
) -> Result<RunRecord> {
    check_dim(obj.dim(), x0.len())?;
    if iterations == 0 {
        return Err(Error::param("iteration count must be at least 1"));
    }
    schedule.validate()?;
    if let StepSchedule::Explicit { steps } = schedule {
        if steps.len() < iterations {
            return Err(Error::Range {
                index: iterations - 1,
                len: steps.len(),
            });
        }
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("initial point must be finite"));
    }
    let stride = if stride == 0 {
        default_stride(iterations)
    } else {
        stride
    };

    let mut rec = RunRecord {
        alpha: Vec::with_capacity(iterations),
        f: Vec::with_capacity(iterations),
        x_norm: Vec::with_capacity(iterations),
        step_norm: Vec::with_capacity(iterations),
        tie_dist: Vec::with_capacity(iterations),
        iterates: Vec::new(),
        stride,
        bbox: BoundingBox::around(x0),
        initial: x0.to_vec(),
        final_point: x0.to_vec(),
        termination: Termination::Completed,
    };
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    for k in 0..iterations {
        let res = obj.residuals(&x)?;
        let f = obj.residual_weight() * res.iter().map(|r| r.abs()).sum::<f64>();
        let xn = norm(&x);
        if !f.is_finite() || !(xn <= DIVERGENCE_NORM) {
            rec.termination = Termination::Diverged { at: k };
            break;
        }
        let g = obj.subgradient_from_residuals(&x, &res, policy);
        let alpha = schedule.step(k)?;
        for ((n, xi), gi) in next.iter_mut().zip(&x).zip(&g) {
            *n = xi - alpha * gi;
        }
        if next.iter().any(|v| !v.is_finite()) {
            rec.termination = Termination::Diverged { at: k };
            break;
        }
        if k % stride == 0 {
            rec.iterates.push((k, x.clone()));
        }
        let step: f64 = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt();
        rec.alpha.push(alpha);
        rec.f.push(f);
        rec.x_norm.push(xn);
        rec.step_norm.push(step);
        rec.tie_dist
            .push(res.iter().fold(f64::INFINITY, |a, r| a.min(r.abs())));
        std::mem::swap(&mut x, &mut next);
        rec.bbox.include(&x);
    }
    let last_k = rec.len();
    if rec.iterates.last().map(|(k, _)| *k) != Some(last_k) {
        rec.iterates.push((last_k, x.clone()));
    }
    rec.final_point = x;
    Ok(rec)
}

/// Bracket on the diameter of the visited iterates from the bounding box:
/// the widest coordinate extent below, the box diagonal above.
pub fn diameter_bounds(rec: &RunRecord) -> (f64, f64) {
    box_diameter_bounds(&rec.bbox)
}

pub fn box_diameter_bounds(b: &BoundingBox) -> (f64, f64) {
    let lower = b.widths().fold(0.0, f64::max);
    let upper = b.widths().map(|w| w * w).sum::<f64>().sqrt();
    (lower, upper)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Converged,
    MaxIters,
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    pub limit_estimate: Vec<f64>,
    pub trailing_displacement: f64,
}

/// Converged when the summed step lengths over the last `window` steps are at
/// most `tol`.
pub fn detect_convergence(rec: &RunRecord, window: usize, tol: f64) -> Result<ConvergenceReport> {
    if window > rec.len() {
        return Err(Error::param(format!(
            "window {window} exceeds record length {}",
            rec.len()
        )));
    }
    let trailing_displacement: f64 = rec.step_norm[rec.len() - window..].iter().sum();
    let status = if rec.diverged() {
        ConvergenceStatus::Diverged
    } else if trailing_displacement <= tol {
        ConvergenceStatus::Converged
    } else {
        ConvergenceStatus::MaxIters
    };
    Ok(ConvergenceReport {
        status,
        limit_estimate: rec.final_point.clone(),
        trailing_displacement,
    })
}
