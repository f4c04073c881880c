// The three descent presets (robust PCA, phase retrieval, matrix sensing)
// with a shortened budget: objective values at checkpoints and the bounding
// box of the iterates.

use subgrad::experiment::{build_problem, draw_init, preset};
use subgrad::optimizer::{detect_convergence, diameter_bounds, run_subgradient};
use subgrad::rng::Rng;

pub fn run_example() -> subgrad::Result<()> {
    let iterations = 20_000;
    for name in ["fig1-rpca", "fig1-phase", "fig1-sensing"] {
        let cfg = preset(name)?;
        let problem = build_problem(&cfg.problem, cfg.seed)?;
        let obj = &problem.objective;
        let x0 = draw_init(&cfg.init, obj.dim(), &mut Rng::stream(cfg.seed, 1))?;
        let schedule = cfg.schedule.as_ref().expect("preset has a schedule");
        let rec = run_subgradient(obj, &x0, schedule, iterations, cfg.policy, 0)?;
        let checkpoints: Vec<String> = [0, 100, 1000, 10_000, iterations - 1]
            .iter()
            .map(|&k| format!("f[{k}] = {:.4e}", rec.f[k]))
            .collect();
        let (lo, hi) = diameter_bounds(&rec);
        let report = detect_convergence(&rec, 1000, 1e-2)?;
        println!("{name}: {}", checkpoints.join(", "));
        println!(
            "  |x0| = {:.3}, box norm bound = {:.3}, diameter in [{lo:.3}, {hi:.3}], last-1000 displacement = {:.3e} ({:?})",
            rec.x_norm[0],
            rec.bbox.max_norm(),
            report.trailing_displacement,
            report.status
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("descent example failed");
}
