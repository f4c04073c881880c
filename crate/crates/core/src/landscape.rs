//! Landscape of `f(x) = ½ ||x x^T - u u^T||_1`.
//!
//! The critical set is `{±u} ∪ A` with
//! `A = {x : <sgn(u), x> = 0, |x_i| <= |u_i| for all i}`; `±u` are the global
//! minima and `A` holds the spurious critical points. This module classifies
//! points against that set, projects onto `A`, tests the wedge
//! `T = {|x_i| < |x_1| / (n + 1), i != 1}` that traps iterates at the origin
//! when `u_1 = 0`, and evaluates the linear functionals whose monotone decrease
//! keeps iterates away from `A` when `u` has no zero entry.

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::dot;
use crate::objectives::SignPolicy;

pub const DEFAULT_TAU: f64 = 1e-6;

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_u(u: &[f64]) -> Result<()> {
    if u.is_empty() || u.iter().all(|&v| v == 0.0) {
        return Err(Error::param("u must be a nonzero vector"));
    }
    Ok(())
}

fn dist(a: &[f64], b: &[f64], sign: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - sign * y) * (x - sign * y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalTag {
    GlobalMinPlus,
    GlobalMinMinus,
    SpuriousA,
    NotCritical,
}

/// Classification with the distance to the matched set (to the nearest of
/// `u`, `-u`, `A` for non-critical points).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalClass {
    pub tag: CriticalTag,
    pub distance: f64,
}

pub fn classify_critical(u: &[f64], x: &[f64], tau: f64) -> Result<CriticalClass> {
    check_u(u)?;
    check_dim(u.len(), x.len())?;
    let d_plus = dist(x, u, 1.0);
    let d_minus = dist(x, u, -1.0);
    if d_plus <= tau {
        return Ok(CriticalClass {
            tag: CriticalTag::GlobalMinPlus,
            distance: d_plus,
        });
    }
    if d_minus <= tau {
        return Ok(CriticalClass {
            tag: CriticalTag::GlobalMinMinus,
            distance: d_minus,
        });
    }
    let (_, d_a) = project_to_a(u, x)?;
    let hyper = u.iter().zip(x).map(|(ui, xi)| sgn(*ui) * xi).sum::<f64>();
    let in_box = u.iter().zip(x).all(|(ui, xi)| xi.abs() <= ui.abs() + tau);
    if hyper.abs() <= tau && in_box {
        return Ok(CriticalClass {
            tag: CriticalTag::SpuriousA,
            distance: d_a,
        });
    }
    Ok(CriticalClass {
        tag: CriticalTag::NotCritical,
        distance: d_plus.min(d_minus).min(d_a),
    })
}

/// Euclidean projection onto `A` and the distance to it.
///
/// With `s = sgn(u)`, the projection is `clip(x - μ s, -|u|, |u|)` for the
/// multiplier `μ` solving `<s, clip(x - μ s)> = 0`. The left side is
/// nonincreasing in `μ`, so the root is found by bisection once a sign change
/// has been bracketed.
pub fn project_to_a(u: &[f64], x: &[f64]) -> Result<(Vec<f64>, f64)> {
    check_u(u)?;
    check_dim(u.len(), x.len())?;
    let s: Vec<f64> = u.iter().map(|&v| sgn(v)).collect();
    let clip = |mu: f64| -> Vec<f64> {
        x.iter()
            .zip(&s)
            .zip(u)
            .map(|((xi, si), ui)| (xi - mu * si).clamp(-ui.abs(), ui.abs()))
            .collect()
    };
    let h = |mu: f64| dot(&s, &clip(mu));
    if h(0.0) == 0.0 {
        let p = clip(0.0);
        let d = dist(&p, x, 1.0);
        return Ok((p, d));
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    while h(lo) < 0.0 {
        lo *= 2.0;
    }
    while h(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = clip(0.5 * (lo + hi));
    let d = dist(&p, x, 1.0);
    Ok((p, d))
}

/// Membership in `T = {x : |x_i| < |x_1| / (n + 1) for all i >= 2}`.
pub fn wedge_membership(x: &[f64]) -> Result<bool> {
    let n = x.len();
    if n < 2 {
        return Err(Error::param("wedge needs dimension at least 2"));
    }
    let r = x[0].abs() / (n as f64 + 1.0);
    Ok(x[1..].iter().all(|xi| xi.abs() < r))
}

/// Largest constant step that keeps every point of the wedge inside it for
/// dimension `n` when `u_1 = 0`: `(n + 1) / ((2n - 1)(n + 2))`.
///
/// This is `1/4` for `n = 2` and smaller for `n >= 3`; a step of `1/4` can
/// leave the wedge once `n >= 3`.
pub fn wedge_step_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("wedge needs dimension at least 2"));
    }
    let n = n as f64;
    Ok((n + 1.0) / ((2.0 * n - 1.0) * (n + 2.0)))
}

/// Indices (0-based) grouped by whether a reference point matches `u`, `-u`,
/// or neither.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignPartition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    /// Indices matching both `u_i` and `-u_i` (only when `u_i = 0`); these are
    /// placed in `plus`.
    pub ambiguous: Vec<usize>,
}

impl SignPartition {
    fn side(&self, i: usize) -> i8 {
        if self.plus.contains(&i) {
            1
        } else if self.minus.contains(&i) {
            -1
        } else {
            0
        }
    }
}

pub fn partition_signs(u: &[f64], x_star: &[f64], tau: f64) -> Result<SignPartition> {
    check_u(u)?;
    check_dim(u.len(), x_star.len())?;
    let mut p = SignPartition::default();
    for (i, (ui, xi)) in u.iter().zip(x_star).enumerate() {
        let plus = (xi - ui).abs() <= tau;
        let minus = (xi + ui).abs() <= tau;
        match (plus, minus) {
            (true, true) => {
                p.ambiguous.push(i);
                p.plus.push(i);
            }
            (true, false) => p.plus.push(i),
            (false, true) => p.minus.push(i),
            (false, false) => p.zero.push(i),
        }
    }
    Ok(p)
}

/// Partials `∂_i f(x) = Σ_j sign(x_i x_j - u_i u_j) x_j`.
pub fn partials(u: &[f64], x: &[f64], policy: SignPolicy) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| policy.sign(x[i] * x[j] - u[i] * u[j]) * x[j])
                .sum()
        })
        .collect()
}

/// Averaged signed partials over `I+` minus those over `I-`, together with
/// `δ = 2 min_i |u_i| / n`.
///
/// Near a spurious limit the first value is nonnegative, and at least `δ`
/// unless every `|x_i| < |u_i|` on `I+ ∪ I-`. `I+` must avoid `S-`, `I-` must
/// avoid `S+`, and both must be nonempty.
pub fn monotone_gap(
    u: &[f64],
    x: &[f64],
    partition: &SignPartition,
    i_plus: &[usize],
    i_minus: &[usize],
    policy: SignPolicy,
) -> Result<(f64, f64)> {
    check_u(u)?;
    check_dim(u.len(), x.len())?;
    let n = u.len();
    if i_plus.is_empty() || i_minus.is_empty() {
        return Err(Error::param("I+ and I- must both be nonempty"));
    }
    if let Some(&i) = i_plus.iter().find(|&&i| i >= n || partition.side(i) == -1) {
        return Err(Error::param(format!(
            "index {i} of I+ is out of range or in S-"
        )));
    }
    if let Some(&i) = i_minus.iter().find(|&&i| i >= n || partition.side(i) == 1) {
        return Err(Error::param(format!(
            "index {i} of I- is out of range or in S+"
        )));
    }
    let d = partials(u, x, policy);
    let avg = |idx: &[usize]| idx.iter().map(|&i| sgn(u[i]) * d[i]).sum::<f64>() / idx.len() as f64;
    let gap = avg(i_plus) - avg(i_minus);
    let delta = 2.0 * u.iter().fold(f64::INFINITY, |a, v| a.min(v.abs())) / n as f64;
    Ok((gap, delta))
}

/// Linear functional `g(x) = <c, x>`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotoneFunctional {
    pub coefficients: Vec<f64>,
}

impl MonotoneFunctional {
    /// `(1/|S+|) Σ_{S+} sgn(u_i) x_i - (1/|S-|) Σ_{S-} sgn(u_i) x_i`, for both
    /// sides nonempty.
    pub fn balanced(u: &[f64], partition: &SignPartition) -> Result<Self> {
        if partition.plus.is_empty() || partition.minus.is_empty() {
            return Err(Error::param("balanced functional needs S+ and S- nonempty"));
        }
        Self::weighted(u, &partition.plus, &partition.minus)
    }

    /// `(1/|S+|) Σ_{S+} sgn(u_i) x_i - sgn(u_j) x_j` for a single `j ∉ S+`.
    pub fn single(u: &[f64], partition: &SignPartition, j: usize) -> Result<Self> {
        if partition.plus.is_empty() || partition.plus.contains(&j) || j >= u.len() {
            return Err(Error::param(
                "single functional needs S+ nonempty and j outside S+",
            ));
        }
        Self::weighted(u, &partition.plus, &[j])
    }

    fn weighted(u: &[f64], plus: &[usize], minus: &[usize]) -> Result<Self> {
        let mut c = vec![0.0; u.len()];
        for &i in plus {
            c[i] += sgn(u[i]) / plus.len() as f64;
        }
        for &i in minus {
            c[i] -= sgn(u[i]) / minus.len() as f64;
        }
        Ok(MonotoneFunctional { coefficients: c })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.coefficients, x)
    }
}

/// `ψ(λ, θ) = sgn(λ) |λ|^{1-θ}`.
pub fn psi(lambda: f64, theta: f64) -> f64 {
    sgn(lambda) * lambda.abs().powf(1.0 - theta)
}

/// `ψ(λ1, θ) - ψ(λ2, θ)`; nondecreasing in `θ ∈ (0, θ0)` when
/// `λ1 >= λ2` and both lie in `[-Λ, Λ]` with `Λ = exp(1 / (θ0 - 1))`.
pub fn psi_gap(lambda1: f64, lambda2: f64, theta: f64) -> f64 {
    psi(lambda1, theta) - psi(lambda2, theta)
}

/// `Λ = exp(1 / (θ0 - 1))`.
pub fn psi_radius(theta0: f64) -> f64 {
    (1.0 / (theta0 - 1.0)).exp()
}

/// Serializable summary of where a point sits in the landscape.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandscapeReport {
    pub class: CriticalTag,
    pub distance_to_a: f64,
    pub distance_to_plus_u: f64,
    pub distance_to_minus_u: f64,
    pub wedge_member: bool,
}

pub fn landscape_report(u: &[f64], x: &[f64], tau: f64) -> Result<LandscapeReport> {
    let class = classify_critical(u, x, tau)?;
    let (_, d_a) = project_to_a(u, x)?;
    Ok(LandscapeReport {
        class: class.tag,
        distance_to_a: d_a,
        distance_to_plus_u: dist(x, u, 1.0),
        distance_to_minus_u: dist(x, u, -1.0),
        wedge_member: x.len() >= 2 && wedge_membership(x)?,
    })
}

/// Distance from `x` to the nearer global minimizer.
pub fn distance_to_minima(u: &[f64], x: &[f64]) -> f64 {
    dist(x, u, 1.0).min(dist(x, u, -1.0))
}
