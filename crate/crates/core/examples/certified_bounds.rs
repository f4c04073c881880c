// Trajectory bounds computed from the starting point alone, checked along the
// integrated flow.

use subgrad::experiment::{flow_report, preset};
use subgrad::flow::BoundCertificate;

pub fn run_example() -> subgrad::Result<()> {
    for name in ["flow-sensing-scalar", "flow-phase-closed-form"] {
        let (_, report) = flow_report(&preset(name)?)?;
        match report.certificate {
            Some(BoundCertificate::Sensing { c, c1, c2, c3, m, n, r }) => println!(
                "{name}: c = {c}, c1 = {c1}, c2 = {c2}, c3 = {c3}, |XY^T|^2 <= {c2}, |X|^4 + |Y|^4 <= {}",
                (m + n + r) as f64 * c3
            ),
            Some(BoundCertificate::Phase { c1, lambda_plus, bound }) => {
                println!("{name}: C1 = {c1}, lambda+ = {lambda_plus}, |x_V|^2 <= {bound}")
            }
            None => println!("{name}: no certificate"),
        }
        println!(
            "  largest violation along the flow: {:?}",
            report.bound_violation
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bounds example failed");
}
