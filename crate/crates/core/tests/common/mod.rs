#![allow(dead_code)]

use std::path::Path;

use sha2::{Digest, Sha256};
use subgrad::experiment::{cmd_avoidance, cmd_flow, cmd_ripcheck, cmd_run, preset};
use subgrad::linalg::DenseMatrix;
use subgrad::model::{gen_phase_instance, gen_rpca_instance, gen_sensing_instance};
use subgrad::objectives::Objective;
use subgrad::rng::Rng;

pub const KINDS: [&str; 4] = ["rpca", "phase", "sensing", "sym"];

/// Small random instance of each objective family.
pub fn random_objective(kind: &str, seed: u64) -> Objective {
    let mut rng = Rng::new(seed ^ 0xA5A5);
    let pick =
        |rng: &mut Rng, lo: usize, hi: usize| lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize;
    match kind {
        "rpca" => {
            let (m, n) = (pick(&mut rng, 1, 5), pick(&mut rng, 1, 5));
            let r = pick(&mut rng, 1, m.min(n));
            Objective::RobustPca(gen_rpca_instance(seed, m, n, r, 0.3, 5.0).unwrap())
        }
        "phase" => {
            let n = pick(&mut rng, 1, 5);
            let count = pick(&mut rng, 1, 8);
            Objective::RobustPhase(gen_phase_instance(seed, n, count, 0.3, 5.0).unwrap())
        }
        "sensing" => {
            let (m, n) = (pick(&mut rng, 1, 4), pick(&mut rng, 1, 4));
            let r = pick(&mut rng, 1, m.min(n).min(2));
            let count = pick(&mut rng, 1, 10);
            Objective::RobustSensing(
                gen_sensing_instance(seed, m, n, 1, r, count, 0.3, 5.0).unwrap(),
            )
        }
        _ => {
            let n = pick(&mut rng, 1, 5);
            Objective::sym_rank_one(rng.normal_vec(n)).unwrap()
        }
    }
}

/// Central differences of the value. The step is shrunk until no residual
/// changes sign across the stencil; on each piece the objective is at most
/// quadratic along a coordinate, so the difference is then exact up to
/// rounding.
pub fn fd_gradient(obj: &Objective, x: &[f64]) -> Vec<f64> {
    let signs =
        |y: &[f64]| -> Vec<bool> { obj.residuals(y).unwrap().iter().map(|r| *r > 0.0).collect() };
    let base = signs(x);
    (0..x.len())
        .map(|i| {
            let mut eps = 1e-6;
            loop {
                let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
                xp[i] += eps;
                xm[i] -= eps;
                if (signs(&xp) == base && signs(&xm) == base) || eps < 1e-12 {
                    return (obj.value(&xp).unwrap() - obj.value(&xm).unwrap()) / (xp[i] - xm[i]);
                }
                eps *= 0.1;
            }
        })
        .collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let s: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    d / s.max(1e-12)
}

/// Orthonormal basis of the span of `vectors` by classical Gram-Schmidt run
/// twice per vector.
pub fn span_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-10 * v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300) {
            basis.push(w.iter().map(|a| a / n).collect());
        }
    }
    basis
}

pub fn complement_component(basis: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut w = x.to_vec();
    for q in basis {
        let c: f64 = q.iter().zip(x).map(|(a, b)| a * b).sum();
        for (wi, qi) in w.iter_mut().zip(q) {
            *wi -= c * qi;
        }
    }
    w
}

/// A point near a spurious critical point `x*` of `½||xx^T - uu^T||_1`
/// satisfying the neighborhood sign conditions, with admissible index sets.
#[derive(Debug, Clone)]
pub struct GapCase {
    pub u: Vec<f64>,
    pub x_star: Vec<f64>,
    pub x: Vec<f64>,
    pub i_plus: Vec<usize>,
    pub i_minus: Vec<usize>,
}

pub fn gap_case(seed: u64) -> GapCase {
    let mut rng = Rng::new(seed);
    let n = 2 + (rng.next_u64() % 4) as usize;
    let mut mag: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.1, 2.0)).collect();
    let sign: Vec<f64> = (0..n)
        .map(|_| if rng.bernoulli(0.5) { 1.0 } else { -1.0 })
        .collect();
    // 1 = S+, -1 = S-, 0 = S0; at least one nonzero role.
    let mut role: Vec<i8> = (0..n).map(|_| (rng.next_u64() % 3) as i8 - 1).collect();
    if role.iter().all(|&r| r == 0) {
        role[0] = 1;
    }
    let zero: Vec<usize> = (0..n).filter(|&i| role[i] == 0).collect();
    let signed = |mag: &[f64]| -> f64 { (0..n).map(|i| role[i] as f64 * mag[i]).sum() };
    let mut t = vec![0.0; n];
    if zero.is_empty() {
        if !role.contains(&-1) {
            role[n - 1] = -1;
        }
        if !role.contains(&1) {
            role[0] = 1;
        }
        let plus: f64 = (0..n).filter(|&i| role[i] == 1).map(|i| mag[i]).sum();
        let minus: f64 = (0..n).filter(|&i| role[i] == -1).map(|i| mag[i]).sum();
        for i in 0..n {
            if role[i] == -1 {
                mag[i] *= plus / minus;
            }
        }
    } else {
        let c = signed(&mag);
        let room: f64 = zero.iter().map(|&i| mag[i]).sum();
        if c.abs() > 0.8 * room {
            let scale = c.abs() / (0.8 * room);
            for &i in &zero {
                mag[i] *= scale;
            }
        }
        let room: f64 = zero.iter().map(|&i| mag[i]).sum();
        let frac = -c / room;
        for &i in &zero {
            t[i] = frac;
        }
    }
    let lo = mag.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo < 0.1 {
        for m in &mut mag {
            *m *= 0.1 / lo;
        }
    }
    let u: Vec<f64> = (0..n).map(|i| sign[i] * mag[i]).collect();
    let x_star: Vec<f64> = (0..n)
        .map(|i| match role[i] {
            1 => u[i],
            -1 => -u[i],
            _ => t[i] * u[i],
        })
        .collect();

    let dir = rng.normal_vec(n);
    let mut r = 0.5 * mag.iter().cloned().fold(f64::INFINITY, f64::min) * rng.uniform_in(0.1, 1.0);
    let x = loop {
        let x: Vec<f64> = x_star
            .iter()
            .zip(&dir)
            .map(|(a, d)| a + r * d / (1.0 + d.abs()))
            .collect();
        let ok1 = (0..n).all(|i| match role[i] {
            1 => x[i].signum() == u[i].signum(),
            -1 => x[i].signum() == -u[i].signum(),
            _ => true,
        });
        let ok3 = (0..n).all(|i| {
            zero.iter().all(|&j| {
                let s = x[i] * x[j] - u[i] * u[j];
                s != 0.0 && s.signum() == -(u[i] * u[j]).signum()
            })
        });
        if ok1 && ok3 {
            break x;
        }
        r *= 0.5;
    };
    let choose = |rng: &mut Rng, allowed: Vec<usize>| -> Vec<usize> {
        let mut s: Vec<usize> = allowed
            .iter()
            .copied()
            .filter(|_| rng.bernoulli(0.5))
            .collect();
        if s.is_empty() {
            s.push(allowed[(rng.next_u64() % allowed.len() as u64) as usize]);
        }
        s
    };
    let i_plus = choose(&mut rng, (0..n).filter(|&i| role[i] != -1).collect());
    let i_minus = choose(&mut rng, (0..n).filter(|&i| role[i] != 1).collect());
    GapCase {
        u,
        x_star,
        x,
        i_plus,
        i_minus,
    }
}

/// `(θ0, λ1, λ2)` with `λ1 >= λ2` inside `[-Λ, Λ]`.
pub fn psi_case(seed: u64) -> (f64, f64, f64) {
    let mut rng = Rng::new(seed);
    let theta0 = rng.uniform_in(0.01, 0.99);
    let lam = (1.0 / (theta0 - 1.0)).exp();
    let a = rng.uniform_in(-lam, lam);
    let b = rng.uniform_in(-lam, lam);
    (theta0, a.max(b), a.min(b))
}

pub fn gaussian_matrices(seed: u64, count: usize, m: usize, n: usize) -> Vec<DenseMatrix> {
    let mut rng = Rng::new(seed);
    (0..count)
        .map(|_| DenseMatrix::new(m, n, rng.normal_vec(m * n)).unwrap())
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub const PRESET_NAMES: [&str; 10] = [
    "fig1-rpca",
    "fig1-phase",
    "fig1-sensing",
    "fig2-left",
    "fig2-right",
    "avoidance-default",
    "wedge-default",
    "flow-sensing-scalar",
    "flow-phase-closed-form",
    "rip-basis",
];

pub fn presets_dir() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presets")
}

/// Runs the subcommand that owns a preset and returns its files, sorted.
pub fn run_preset(name: &str, out: &Path) -> Vec<(String, Vec<u8>)> {
    match name {
        "rip-basis" => {
            cmd_ripcheck(&presets_dir().join("rip-basis.json"), out).unwrap();
        }
        "avoidance-default" | "wedge-default" => {
            cmd_avoidance(&preset(name).unwrap(), out).unwrap();
        }
        n if n.starts_with("flow-") => {
            cmd_flow(&preset(name).unwrap(), out).unwrap();
        }
        _ => {
            cmd_run(&preset(name).unwrap(), out).unwrap();
        }
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

pub fn digest_lines(files: &[(String, Vec<u8>)]) -> String {
    files
        .iter()
        .map(|(name, bytes)| format!("{}  {name}\n", sha256_hex(bytes)))
        .collect()
}
