// Selected subgradients of the four objectives against central finite
// differences, and the effect of the sign policy at a tie.

use subgrad::model::{gen_phase_instance, gen_rpca_instance, gen_sensing_instance};
use subgrad::objectives::{Objective, SignPolicy};
use subgrad::rng::Rng;

pub fn run_example() -> subgrad::Result<()> {
    let objectives = [
        (
            "rpca",
            Objective::RobustPca(gen_rpca_instance(1, 4, 3, 1, 0.2, 5.0)?),
        ),
        (
            "phase",
            Objective::RobustPhase(gen_phase_instance(2, 3, 8, 0.2, 5.0)?),
        ),
        (
            "sensing",
            Objective::RobustSensing(gen_sensing_instance(3, 3, 2, 1, 1, 10, 0.2, 5.0)?),
        ),
        (
            "sym-rank-one",
            Objective::sym_rank_one(vec![1.0, -0.5, 2.0])?,
        ),
    ];
    let mut rng = Rng::new(11);
    for (name, obj) in &objectives {
        let x = rng.normal_vec(obj.dim());
        let g = obj.subgradient_select(&x, SignPolicy::Zero)?;
        let eps = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += eps;
            xm[i] -= eps;
            let fd = (obj.value(&xp)? - obj.value(&xm)?) / (2.0 * eps);
            worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
        }
        println!(
            "{name:>13}: f = {:.6}, tie distance = {:.2e}, max rel FD error = {worst:.2e}",
            obj.value(&x)?,
            obj.tie_distance(&x)?
        );
    }

    // x = (1, 0) against u = (1, 1): the residual x_2^2 - u_2^2 is nonzero but
    // x_1 x_2 - u_1 u_2 = -1; at x = u every residual vanishes.
    let sym = Objective::sym_rank_one(vec![1.0, 1.0])?;
    for policy in SignPolicy::ALL {
        println!(
            "policy {policy:?} at u: {:?}",
            sym.subgradient_select(&[1.0, 1.0], policy)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("oracle example failed");
}
