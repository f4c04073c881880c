// Seeded generators for the three data-driven problems and their JSON form.

use subgrad::experiment::InstanceFile;
use subgrad::format::to_json_string;
use subgrad::model::{gen_phase_instance, gen_rpca_instance, gen_sensing_instance};
use subgrad::objectives::Objective;

pub fn run_example() -> subgrad::Result<()> {
    let rpca = gen_rpca_instance(2, 20, 20, 2, 0.1, 10.0)?;
    let corrupted = rpca
        .provenance
        .as_ref()
        .map_or(0, |p| p.corruption.iter().filter(|v| **v != 0.0).count());
    println!("rpca 20x20: {corrupted} corrupted entries of 400");

    let clean = gen_phase_instance(4, 5, 12, 0.0, 1.0)?;
    let truth = clean.provenance.as_ref().expect("generated").truth.clone();
    println!(
        "phase without corruption: f(x*) = {}",
        Objective::RobustPhase(clean).value(&truth)?
    );

    let sensing = gen_sensing_instance(7, 2, 2, 1, 1, 3, 0.0, 1.0)?;
    let json = to_json_string(&InstanceFile::from_sensing(&sensing));
    println!(
        "sensing instance as JSON ({} bytes): {}",
        json.len(),
        json.trim_end()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("generator example failed");
}
