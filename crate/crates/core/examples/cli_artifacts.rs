// The files the `subgrad` binary writes, produced through the library entry
// points into a scratch directory.

use subgrad::experiment::{cmd_flow, cmd_run, preset};

pub fn run_example() -> subgrad::Result<()> {
    let out = std::env::temp_dir().join(format!("subgrad-artifacts-{}", std::process::id()));
    let outcome = cmd_run(&preset("fig2-left")?, &out)?;
    println!(
        "run exit code {}: {:?}",
        outcome.exit_code, outcome.summary.convergence.status
    );
    cmd_flow(&preset("flow-phase-closed-form")?, &out)?;
    let mut names: Vec<String> = std::fs::read_dir(&out)?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<std::io::Result<_>>()?;
    names.sort();
    for name in &names {
        let text = std::fs::read_to_string(out.join(name))?;
        println!("{name}: {}", text.lines().next().unwrap_or(""));
    }
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("artifact example failed");
}
