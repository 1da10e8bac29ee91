// Dilogarithm, Clausen function and root dilogarithms at 128 bits.

use rug::Float;
use zero_attractor::specfun::{catalan, clausen2, complex, dilog, root_dilog, PrecisionPolicy};

pub fn run_example() -> anyhow::Result<()> {
    let policy = PrecisionPolicy::default();
    let i = complex(0.0, 1.0, policy.bits());

    let li = dilog(&i, &policy)?;
    println!("Li2(i)      = {:.30} + {:.30} i", li.real(), li.imag());
    println!("Catalan G   = {:.30}", catalan(&policy)?);

    let quarter = Float::with_val(policy.bits(), rug::float::Constant::Pi) / 2u32;
    println!("Cl2(pi/2)   = {:.30}", clausen2(&quarter, &policy)?);

    for k in 1..=4 {
        let f = root_dilog(k, &complex(0.0, 0.8, policy.bits()), &policy)?;
        println!("f_{k}(0.8 i)  = {:.20}", f);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
