// Lower isometry constant of a set of measurement matrices, checked against
// random unit-norm probes.

use subgrad::linalg::DenseMatrix;
use subgrad::model::{basis_matrices, rip_lower_certificate};
use subgrad::rng::Rng;

pub fn run_example() -> subgrad::Result<()> {
    println!(
        "basis of 2x2: c = {}",
        rip_lower_certificate(&basis_matrices(2, 2))?.c
    );
    println!(
        "single corner matrix: c = {}",
        rip_lower_certificate(&[DenseMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 0.0])?])?.c
    );

    let mut rng = Rng::new(3);
    let a: Vec<DenseMatrix> = (0..50)
        .map(|_| DenseMatrix::new(2, 2, rng.normal_vec(4)))
        .collect::<subgrad::Result<_>>()?;
    let cert = rip_lower_certificate(&a)?;
    let mut sampled = f64::INFINITY;
    for _ in 0..100_000 {
        let b = rng.normal_vec(4);
        let nb = subgrad::linalg::norm(&b);
        let q = a
            .iter()
            .map(|ai| subgrad::linalg::dot(ai.as_slice(), &b).powi(2) / (nb * nb))
            .sum::<f64>()
            / a.len() as f64;
        sampled = sampled.min(q);
    }
    println!(
        "gaussian N = 50: c = {:.6}, sampled minimum {:.6}",
        cert.c, sampled
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("certificate example failed");
}
