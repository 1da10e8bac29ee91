// Landmarks of the boundary curves and one traced curve.

use zero_attractor::curve::{find_beta, seed_on_circle, trace, triple_point, BoundaryPair, Direction, TraceControls};
use zero_attractor::partition::ExponentSequence;
use zero_attractor::phase::{phase_function, PhaseIndex};
use zero_attractor::specfun::PrecisionPolicy;

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    println!("beta         = {:.25}", find_beta(&policy)?);
    let tp = triple_point(&policy)?;
    println!("triple point = {:.15} + {:.15} i", tp.real(), tp.imag());

    let seq = ExponentSequence::all_parts();
    let pair = BoundaryPair::from_indices(&seq, PhaseIndex::new(1, 1), PhaseIndex::new(1, 2))?;
    let circle = PrecisionPolicy::new(128, 1e-15)?;
    let seed = seed_on_circle(&pair, (2.2, 2.5), &circle)?;
    let third = [phase_function(&seq, 1, 3)?, phase_function(&seq, 2, 3)?];
    let curve = trace(&seed, &pair, &third, &TraceControls::with_direction(Direction::Inward), &policy)?;
    println!(
        "curve L_1,1 = L_1,2: {} points, stopped by {:?}, max residual {:.2e}",
        curve.len(),
        curve.termination,
        curve.residual_max()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
