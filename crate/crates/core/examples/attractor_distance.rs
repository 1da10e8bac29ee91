// The assembled attractor and how close the zeros come to it.

use zero_attractor::curve::attractor_set;
use zero_attractor::harness::{directed_distance_profile, spoke_angular_deviation, DEFAULT_INNER_CUT};
use zero_attractor::partition::{generate_one, ExponentSequence};
use zero_attractor::roots::{find_roots, RootOptions};
use zero_attractor::specfun::PrecisionPolicy;

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    let seq = ExponentSequence::all_parts();
    let set = attractor_set(&seq, &policy)?;
    println!("{}: {} curves", seq, set.curves.len());
    for n in [60, 120] {
        let roots = find_roots(&generate_one(&seq, n)?, &RootOptions::default())?;
        let s = directed_distance_profile(&roots, &set, DEFAULT_INNER_CUT)?;
        println!("n = {n}: {} interior zeros, median distance {:.4}", s.count_inside, s.median_distance);
    }

    let seq = ExponentSequence::residue(1, 3)?;
    let roots = find_roots(&generate_one(&seq, 90)?, &RootOptions::default())?;
    let dev = spoke_angular_deviation(&roots.roots_f64(), 3, 0.1, DEFAULT_INNER_CUT)?;
    println!("{seq}: median angular distance to the spokes {dev:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
