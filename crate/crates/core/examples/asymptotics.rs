// Leading-order growth of F_n(z) against exact values.

use zero_attractor::harness::asymptotic_report;
use zero_attractor::partition::ExponentSequence;
use zero_attractor::specfun::PrecisionPolicy;

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    let t = std::f64::consts::PI / 8.0;
    let points = [(0.5, 0.0), (0.3 * t.cos(), 0.3 * t.sin())];
    let report = asymptotic_report(&ExponentSequence::all_parts(), &points, &[50, 100, 200], &policy)?;
    for c in report {
        println!("z = ({:+.2}, {:+.2}), n = {:3}, winner {}: log error {:.3e}", c.z.0, c.z.1, c.n, c.winner, c.log_error);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
