// Exact partition polynomials for several part sets, with CSV export.

use zero_attractor::partition::{generate, tail_series, write_coefficients_csv, ExponentSequence};

pub fn run_example() -> anyhow::Result<()> {
    let families = [
        ExponentSequence::all_parts(),
        ExponentSequence::odd_parts(),
        ExponentSequence::residue(1, 3)?,
        ExponentSequence::explicit(&[1, 2, 5])?,
    ];
    for seq in &families {
        let polys = generate(seq, 12)?;
        let f12 = polys.last().expect("weights 1 through 12");
        let coeffs: Vec<String> = f12.coeffs().iter().map(|c| c.to_string()).collect();
        println!("{seq}: F_12 coefficients [{}], F_12(1) = {}", coeffs.join(", "), f12.value_at_one());
    }

    // The top coefficients of F_n settle to a fixed series as n grows.
    let tail = tail_series(&ExponentSequence::all_parts(), 8)?;
    println!("stable top coefficients: {:?}", tail.iter().map(|c| c.to_string()).collect::<Vec<_>>());

    let mut csv = Vec::new();
    write_coefficients_csv(&generate(&ExponentSequence::odd_parts(), 6)?, &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
