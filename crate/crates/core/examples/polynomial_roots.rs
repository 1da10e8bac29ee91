// All zeros of a partition polynomial, with an accuracy audit.

use zero_attractor::partition::{generate_one, ExponentSequence};
use zero_attractor::roots::{find_roots, reconstruction_error, RootOptions};

pub fn run_example() -> anyhow::Result<()> {
    let poly = generate_one(&ExponentSequence::all_parts(), 60)?;
    let set = find_roots(&poly, &RootOptions::default())?;
    println!(
        "F_60: {} roots at {} bits, backward error {:.2e}, largest |z| = {:.6}",
        set.roots.len(),
        set.precision_bits,
        set.residual_bound,
        set.max_modulus()
    );
    println!("coefficient reconstruction error {:.2e}", reconstruction_error(&poly, &set)?);

    let odd = generate_one(&ExponentSequence::odd_parts(), 40)?;
    let set = find_roots(&odd, &RootOptions::default())?;
    println!("odd parts F_40: {} nonzero roots plus z^{}", set.roots.len(), set.zero_multiplicity_at_origin);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
