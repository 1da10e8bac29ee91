// A few groups of the invariant suite.

use zero_attractor::partition::ExponentSequence;
use zero_attractor::specfun::PrecisionPolicy;
use zero_attractor::verify::{combinatorics_checks, fourier_checks, identity_checks, special_function_checks};

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    let seq = ExponentSequence::odd_parts();
    let mut checks = special_function_checks(&policy)?;
    checks.extend(identity_checks(&policy, 20, 7)?);
    checks.extend(combinatorics_checks(&seq, 40)?);
    checks.extend(fourier_checks(&seq)?);
    for c in &checks {
        let status = if c.passed() { "ok  " } else { "FAIL" };
        println!("{status} [{}] {} ({} cases)", c.group, c.name, c.evaluated);
    }
    anyhow::ensure!(checks.iter().all(|c| c.passed()), "an invariant failed");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
