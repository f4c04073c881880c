// Explicit Euler subgradient flow: energy identity on a phase problem with a
// closed-form trajectory, balancedness of a scalar sensing problem as the step
// shrinks, and invariance of the component orthogonal to the measurements.

use subgrad::flow::{
    balancedness_drift, check_chain_rule, integrate_flow, orthogonal_component_drift,
};
use subgrad::linalg::DenseMatrix;
use subgrad::model::{PhaseInstance, SensingInstance};
use subgrad::objectives::{Objective, SignPolicy};

pub fn run_example() -> subgrad::Result<()> {
    let phase = Objective::RobustPhase(PhaseInstance::new(vec![vec![1.0]], vec![1.0])?);
    let rec = integrate_flow(&phase, &[2.0], 1e-3, 2.0, SignPolicy::Zero)?;
    let last = rec.len() - 1;
    println!(
        "phase x0 = 2: stop {:?} at t = {:.3}, x = {:.4}, length {:.4} (exact 1), energy {:.4} (exact 1.5), defect {:.2e}",
        rec.stop,
        rec.times[last],
        rec.final_state()[0],
        rec.length[last],
        rec.energy[last],
        check_chain_rule(&rec)?
    );

    let sensing = Objective::RobustSensing(SensingInstance::new(
        vec![DenseMatrix::new(1, 1, vec![1.0])?],
        vec![0.0],
        1,
    )?);
    for h in [1e-2, 5e-3, 2.5e-3, 1e-3] {
        let rec = integrate_flow(&sensing, &[2.0, 1.0], h, 2.0, SignPolicy::Zero)?;
        println!(
            "sensing X0 = 2, Y0 = 1, h = {h:.1e}: balancedness drift {:.3e}",
            balancedness_drift(&rec)?
        );
    }

    let plane = Objective::RobustPhase(PhaseInstance::new(
        vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]],
        vec![0.5, 2.0],
    )?);
    let rec = integrate_flow(&plane, &[1.0, 0.3, -0.7], 1e-2, 5.0, SignPolicy::Zero)?;
    println!(
        "phase in R^3, two measurements: orthogonal drift {:.2e}",
        orthogonal_component_drift(&rec)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("flow example failed");
}
