// Random initializations for `u = (1, 1)` and for the degenerate `u = (0, 1)`
// with starts in the wedge: terminal classes of each run.

use subgrad::experiment::{avoidance, preset};

pub fn run_example() -> subgrad::Result<()> {
    let mut cfg = preset("avoidance-default")?;
    cfg.trials = 20;
    let s = avoidance(&cfg)?;
    println!(
        "u = (1, 1), {} trials: +u {}, -u {}, A {}, unresolved {}",
        s.trials, s.converged_to_plus_u, s.converged_to_minus_u, s.converged_to_a, s.unresolved
    );
    for o in s
        .outcomes
        .iter()
        .filter(|o| o.class == subgrad::landscape::CriticalTag::NotCritical)
        .take(3)
    {
        println!(
            "  unresolved from {:?}: at {:?} moving {:.2e}",
            o.x0, o.terminal, o.trailing_displacement
        );
    }

    let w = avoidance(&preset("wedge-default")?)?;
    println!(
        "u = (0, 1), {} wedge starts: A {}, unresolved {}",
        w.trials, w.converged_to_a, w.unresolved
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("avoidance example failed");
}
