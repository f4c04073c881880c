// Critical-point classification, projection onto the spurious set, sign
// partitions and the monotone gap, and the desingularizing map.

use subgrad::landscape::{
    classify_critical, monotone_gap, partition_signs, project_to_a, psi_gap, psi_radius,
    MonotoneFunctional, DEFAULT_TAU,
};
use subgrad::objectives::SignPolicy;

pub fn run_example() -> subgrad::Result<()> {
    let u = [1.0, 1.0];
    for x in [
        [1.0, 1.0],
        [-1.0, -1.0],
        [0.5, -0.5],
        [2.0, 0.0],
        [3.0, -1.0],
    ] {
        let class = classify_critical(&u, &x, DEFAULT_TAU)?;
        let (p, d) = project_to_a(&u, &x)?;
        println!(
            "x = {x:?}: {:?} (distance {:.4}), projection onto A {p:?} at {d:.4}",
            class.tag, class.distance
        );
    }

    let part = partition_signs(&u, &[1.0, -1.0], DEFAULT_TAU)?;
    let g = MonotoneFunctional::balanced(&u, &part)?;
    for x in [[0.99, -0.98], [1.01, -0.98]] {
        let (gap, delta) = monotone_gap(&u, &x, &part, &[0], &[1], SignPolicy::Zero)?;
        println!(
            "x = {x:?}: gap {gap:.4}, delta {delta}, g(x) = {:.4}",
            g.eval(&x)
        );
    }

    let theta0 = 0.5;
    let lam = psi_radius(theta0);
    let gaps: Vec<String> = [0.1, 0.2, 0.3, 0.4]
        .iter()
        .map(|&t| format!("{:.4}", psi_gap(0.1, -0.1, t)))
        .collect();
    println!(
        "radius for theta0 = {theta0}: {lam:.4}; gap over theta = 0.1..0.4: {}",
        gaps.join(", ")
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("landscape example failed");
}
