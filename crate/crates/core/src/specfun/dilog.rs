//! Complex dilogarithm on the closed unit disk.
//!
//! Region selection, in order:
//! - `z = 0`: exact zero.
//! - `|z| <= 1/2`: the defining power series `sum z^n / n^2`.
//! - `|z| = 1` (to working precision): `r(t) - i Cl2(t)` with the exact
//!   quadratic real part.
//! - `|1 - z| < 1/2`: reflection `Li2(z) = pi^2/6 - ln z ln(1-z) - Li2(1-z)`.
//! - otherwise: the Bernoulli series in `u = -ln(1-z)`,
//!   `Li2 = u - u^2/4 + sum_k B_{2k} u^{2k+1} / (2k+1)!`, with `|u| < 1.8`.

use rug::float::Constant;
use rug::{Complex, Float};

use super::bernoulli::dilog_coefficients;
use super::clausen::clausen2_at;
use super::{ensure_finite, PrecisionPolicy, GUARD_BITS};
use crate::error::{Error, Result};

/// Principal-branch `Li2(z)` for `|z| <= 1 + tol`.
///
/// The result carries `policy.bits()` bits; the absolute error is far below
/// `policy.tol()`.
pub fn dilog(z: &Complex, policy: &PrecisionPolicy) -> Result<Complex> {
    ensure_finite(z, "dilog argument")?;
    let wp = policy.bits() + GUARD_BITS;
    let modulus = Float::with_val(wp, z.abs_ref());
    let limit = Float::with_val(wp, policy.tol() + 1u32);
    if modulus > limit {
        return Err(Error::Domain(format!(
            "dilog evaluated at |z| = {} outside the closed unit disk",
            modulus.to_f64()
        )));
    }
    let value = dilog_unchecked(z, wp)?;
    Ok(Complex::with_val(policy.bits(), value))
}

/// Dilogarithm at working precision `wp` without the domain check.
pub(crate) fn dilog_unchecked(z: &Complex, wp: u32) -> Result<Complex> {
    if z.is_zero() {
        return Ok(Complex::new(wp));
    }
    let z = Complex::with_val(wp, z);
    let modulus = Float::with_val(wp, z.abs_ref());
    if modulus <= 0.5 {
        return power_series(&z, wp);
    }
    let off_circle = Float::with_val(wp, &modulus - 1u32).abs();
    let circle_eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32 - 4)));
    if off_circle <= circle_eps {
        let mut t = Float::with_val(wp, z.arg_ref());
        if t.is_sign_negative() {
            t += Float::with_val(wp, Constant::Pi) * 2u32;
        }
        return Ok(circle_closed_form(&t, wp));
    }
    let one_minus = Complex::with_val(wp, 1u32 - &z);
    let gap = Float::with_val(wp, one_minus.abs_ref());
    if gap < 0.5 {
        return reflected(&z, &one_minus, wp);
    }
    bernoulli_series(&one_minus, wp)
}

/// `r(t) - i Cl2(t)` for `t` in `[0, 2 pi]`.
pub(crate) fn circle_closed_form(t: &Float, wp: u32) -> Complex {
    let pi = Float::with_val(wp, Constant::Pi);
    let pi_sq = Float::with_val(wp, pi.square_ref());
    // r(t) = pi^2/6 - t (2 pi - t) / 4
    let two_pi_minus_t = Float::with_val(wp, Float::with_val(wp, &pi * 2u32) - t);
    let quad = Float::with_val(wp, t * &two_pi_minus_t) / 4u32;
    let re = Float::with_val(wp, pi_sq / 6u32) - quad;
    let im = -clausen2_at(t, wp);
    Complex::with_val(wp, (re, im))
}

fn series_threshold(wp: u32) -> Float {
    Float::with_val(wp, Float::i_exp(1, -(wp as i32)))
}

fn max_terms(wp: u32) -> usize {
    4 * wp as usize + 64
}

fn power_series(z: &Complex, wp: u32) -> Result<Complex> {
    let eps = series_threshold(wp);
    let mut power = z.clone();
    let mut sum = z.clone();
    for n in 2..max_terms(wp) as u64 {
        power *= z;
        let term = Complex::with_val(wp, &power / (n * n));
        sum += &term;
        if Float::with_val(wp, term.abs_ref()) < eps {
            return Ok(sum);
        }
    }
    Err(Error::Precision(
        "dilog power series did not reach the working precision".into(),
    ))
}

fn reflected(z: &Complex, one_minus: &Complex, wp: u32) -> Result<Complex> {
    if one_minus.is_zero() {
        let pi = Float::with_val(wp, Constant::Pi);
        let value = Float::with_val(wp, pi.square_ref()) / 6u32;
        return Ok(Complex::with_val(wp, value));
    }
    let pi = Float::with_val(wp, Constant::Pi);
    let zeta2 = Float::with_val(wp, pi.square_ref()) / 6u32;
    let log_z = Complex::with_val(wp, z.ln_ref());
    let log_w = Complex::with_val(wp, one_minus.ln_ref());
    let product = Complex::with_val(wp, &log_z * &log_w);
    let tail = power_series(one_minus, wp)?;
    let mut out = Complex::with_val(wp, zeta2);
    out -= product;
    out -= tail;
    Ok(out)
}

fn bernoulli_series(one_minus: &Complex, wp: u32) -> Result<Complex> {
    let coeffs = dilog_coefficients(wp);
    let eps = series_threshold(wp);
    let u = -Complex::with_val(wp, one_minus.ln_ref());
    let u_sq = Complex::with_val(wp, u.square_ref());
    // u - u^2/4
    let mut sum = Complex::with_val(wp, &u - Complex::with_val(wp, &u_sq / 4u32));
    let mut power = u.clone(); // u^{2k+1}
    for c in coeffs.iter() {
        power *= &u_sq;
        let term = Complex::with_val(wp, &power * c);
        sum += &term;
        if Float::with_val(wp, term.abs_ref()) < eps {
            return Ok(sum);
        }
    }
    Err(Error::Precision(
        "dilog Bernoulli series did not reach the working precision".into(),
    ))
}
