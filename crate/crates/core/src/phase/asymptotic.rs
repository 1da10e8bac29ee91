//! Algebraic prefactors `omega_{h,k,n}`, `Omega_{n,k}` and the leading-order
//! estimate of `F_n(z)` inside a phase.

use rug::float::Constant;
use rug::{Complex, Float};

use super::{candidate_functions, classify_with, fourier_data, phase_function, PhaseIndex, DEFAULT_BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::partition::{gcd, ExponentSequence};
use crate::specfun::{ensure_finite, root_of_unity, PrecisionPolicy, GUARD_BITS};

fn check_open_disk(z: &Complex, bits: u32) -> Result<()> {
    ensure_finite(z, "prefactor argument")?;
    if Float::with_val(bits, z.abs_ref()) >= 1 {
        return Err(Error::Domain("prefactors need |z| < 1".into()));
    }
    Ok(())
}

/// `omega_{h,k,n}(z) = e_k(-hn) prod_j (1 - e_k(hj) z)^{-b_k(j)}` with principal powers.
pub fn omega(
    seq: &ExponentSequence,
    h: u64,
    k: u64,
    n: u64,
    z: &Complex,
    policy: &PrecisionPolicy,
) -> Result<Complex> {
    let g = gcd(h, k);
    if g != 1 {
        return Err(Error::Gcd { h, k, gcd: g });
    }
    check_open_disk(z, policy.bits())?;
    let wp = policy.bits() + GUARD_BITS;
    let data = fourier_data(seq, k)?;
    let mut log_sum = Complex::new(wp);
    for j in 1..=k {
        let b = data.b(j as i64);
        if *b == 0 {
            continue;
        }
        let rot = root_of_unity((h * j) as i64, k, wp);
        let base = Complex::with_val(wp, 1u32 - Complex::with_val(wp, &rot * z));
        log_sum -= base.ln() * b;
    }
    let phase = root_of_unity(-(((h % k) * (n % k)) as i64), k, wp);
    let value = log_sum.exp() * phase;
    Ok(Complex::with_val(policy.bits(), value))
}

/// `Omega_{n,k}(z) = sum_{1 <= h <= k, (h,k) = 1} omega_{h,k,n}(z)`.
pub fn omega_sum(
    seq: &ExponentSequence,
    k: u64,
    n: u64,
    z: &Complex,
    policy: &PrecisionPolicy,
) -> Result<Complex> {
    let mut sum = Complex::new(policy.bits() + GUARD_BITS);
    for h in (1..=k).filter(|&h| gcd(h, k) == 1) {
        sum += omega(seq, h, k, n, z, policy)?;
    }
    Ok(Complex::with_val(policy.bits(), sum))
}

/// Leading-order estimate
/// `(1/(2 sqrt(pi) n^{3/4})) Omega sqrt(L) exp(2 sqrt(n) L)` for the phase of `winner`.
///
/// `Omega` sums `omega_{h,k,n}` over those coprime `h` whose phase function
/// coincides with the winner's (all of them when `L_{h,k}` does not depend on
/// `h`). Where `L^2` lies on the negative real axis, so that `L` is purely
/// imaginary and the conjugate saddle contributes equally, twice the real part
/// is returned. Points that `classify` reports as ties are rejected.
pub fn asymptotic_estimate(
    seq: &ExponentSequence,
    winner: PhaseIndex,
    n: u64,
    z: &Complex,
    policy: &PrecisionPolicy,
) -> Result<Complex> {
    if n == 0 {
        return Err(Error::Domain("asymptotic estimate needs n >= 1".into()));
    }
    let functions = candidate_functions(seq)?;
    let verdict = classify_with(&functions, z, DEFAULT_BOUNDARY_TOL, policy)?;
    if verdict.tie {
        return Err(Error::Domain(format!(
            "point lies on a phase boundary (margin {:e})",
            verdict.margin
        )));
    }
    let target = phase_function(seq, winner.h, winner.k)?;
    let actual = phase_function(seq, verdict.winner.h, verdict.winner.k)?;
    if !target.same_function(&actual) {
        return Err(Error::Domain(format!(
            "point lies in the phase of {}, not {}",
            verdict.winner, winner
        )));
    }

    let wp = policy.bits() + GUARD_BITS;
    let mut omega_total = Complex::new(wp);
    for h in (1..=winner.k).filter(|&h| gcd(h, winner.k) == 1) {
        if phase_function(seq, h, winner.k)?.same_function(&target) {
            omega_total += omega(seq, h, winner.k, n, z, policy)?;
        }
    }

    let inner = PrecisionPolicy::with_bits(wp)?;
    let l_sq = target.l_squared(z, &inner)?;
    let l = Complex::with_val(wp, l_sq.sqrt_ref());
    let sqrt_n = Float::with_val(wp, n).sqrt();
    let n_34 = Float::with_val(wp, Float::with_val(wp, n).ln() * 0.75f64).exp();
    let sqrt_pi = Float::with_val(wp, Constant::Pi).sqrt();
    let prefactor = Float::with_val(wp, 1u32) / (sqrt_pi * 2u32 * n_34);
    let growth = Complex::with_val(wp, &l * Float::with_val(wp, sqrt_n * 2u32)).exp();
    let root_l = Complex::with_val(wp, l.sqrt_ref());
    let estimate = omega_total * root_l * growth * prefactor;

    if on_negative_axis(&l_sq, wp) {
        let doubled = Float::with_val(wp, estimate.real() * 2u32);
        return Ok(Complex::with_val(policy.bits(), doubled));
    }
    Ok(Complex::with_val(policy.bits(), estimate))
}

fn on_negative_axis(w: &Complex, wp: u32) -> bool {
    if !w.real().is_sign_negative() || w.real().is_zero() {
        return false;
    }
    let rel = Float::with_val(wp, w.imag().abs_ref()) / Float::with_val(wp, w.abs_ref());
    rel <= Float::with_val(wp, Float::i_exp(1, 16 - wp as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::generate_one;
    use crate::specfun::complex;

    #[test]
    fn all_parts_omega_one_one() {
        let p = PrecisionPolicy::default();
        let z = complex(0.3, -0.4, 128);
        let w = omega(&ExponentSequence::all_parts(), 1, 1, 17, &z, &p).unwrap();
        let want = Complex::with_val(128, 1 - &z).sqrt();
        assert!(Float::with_val(128, Complex::with_val(128, &w - &want).abs_ref()) < 1e-30);
    }

    #[test]
    fn estimate_tracks_exact_value() {
        let p = PrecisionPolicy::default();
        let seq = ExponentSequence::all_parts();
        let z = complex(0.5, 0.0, 128);
        let poly = generate_one(&seq, 100).unwrap();
        let exact = crate::partition::eval(&poly, &z, &p).unwrap();
        let est = asymptotic_estimate(&seq, PhaseIndex::new(1, 1), 100, &z, &p).unwrap();
        let ratio = Complex::with_val(128, &exact / &est);
        assert!((ratio.real().to_f64() - 1.0).abs() < 0.5);
    }

    #[test]
    fn wrong_phase_is_rejected() {
        let p = PrecisionPolicy::default();
        let seq = ExponentSequence::all_parts();
        let z = complex(0.5, 0.0, 128);
        assert!(asymptotic_estimate(&seq, PhaseIndex::new(1, 2), 10, &z, &p).is_err());
    }
}
