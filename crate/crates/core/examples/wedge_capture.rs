// Constant-step runs on `½||xx^T - uu^T||_1` with `u = (0, 1)`: a start in the
// wedge is pulled into the spurious critical point 0, a start outside it
// reaches the global minima.

use subgrad::landscape::{landscape_report, wedge_membership};
use subgrad::objectives::{Objective, SignPolicy};
use subgrad::optimizer::{run_subgradient, StepSchedule};

pub fn run_example() -> subgrad::Result<()> {
    let u = vec![0.0, 1.0];
    let obj = Objective::sym_rank_one(u.clone())?;
    let schedule = StepSchedule::constant(0.2);
    for (x0, iterations, tau) in [([1.0, 0.3], 200, 1e-6), ([1.0, 0.6], 2000, 0.25)] {
        let rec = run_subgradient(&obj, &x0, &schedule, iterations, SignPolicy::Zero, 1)?;
        let inside = rec
            .iterates
            .iter()
            .filter(|(_, x)| wedge_membership(x).unwrap_or(false))
            .count();
        let report = landscape_report(&u, &rec.final_point, tau)?;
        println!(
            "x0 = {x0:?} (wedge: {}): {inside}/{} stored iterates in the wedge, final {:?} -> {:?}",
            wedge_membership(&x0)?,
            rec.iterates.len(),
            rec.final_point,
            report.class
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("wedge example failed");
}
