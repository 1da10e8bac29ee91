// Fourier data, phase functions and the winning phase across the disk.

use zero_attractor::harness::phase_grid;
use zero_attractor::partition::ExponentSequence;
use zero_attractor::phase::{candidates, classify, fourier_data, DEFAULT_BOUNDARY_TOL};
use zero_attractor::specfun::{complex, PrecisionPolicy};

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    let seq = ExponentSequence::all_parts();

    for k in 1..=3 {
        let data = fourier_data(&seq, k)?;
        let b: Vec<String> = data.b_values().iter().map(|q| q.to_string()).collect();
        println!("k = {k}: b = [{}]", b.join(", "));
    }
    let names: Vec<String> = candidates(&seq)?.iter().map(|c| c.to_string()).collect();
    println!("candidates: {}", names.join(" "));

    for (x, y) in [(0.5, 0.0), (-0.5, 0.1), (-0.3, 0.8)] {
        let v = classify(&seq, &complex(x, y, policy.bits()), DEFAULT_BOUNDARY_TOL, &policy)?;
        println!("z = {x:+.2}{y:+.2}i: winner {} (margin {:.3e})", v.winner, v.margin);
    }

    let coarse = PrecisionPolicy::new(64, 1e-15)?;
    let grid = phase_grid(&seq, 20, 40, DEFAULT_BOUNDARY_TOL, &coarse)?;
    println!("{} grid points, {} on or between phases", grid.samples.len(), grid.boundary_cloud().len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
