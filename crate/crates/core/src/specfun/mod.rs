//! Configurable-precision complex special functions.
//!
//! Everything here works on [`rug`] floats: the dilogarithm on the closed unit
//! disk, the Clausen integral, Catalan's constant, the real part of a principal
//! square root, and the root dilogarithm `f_k(z) = Re sqrt(Li2(z^k)) / k`.

mod bernoulli;
mod clausen;
mod dilog;

pub use bernoulli::even_bernoulli;
pub use clausen::clausen2_fourier;
pub use dilog::dilog;

pub(crate) use dilog::dilog_unchecked;

use std::fmt;

use rug::float::Constant;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};

/// Complex number with arbitrary binary precision in both parts.
pub type BigComplex = Complex;

/// Extra bits carried internally above the caller's precision.
pub(crate) const GUARD_BITS: u32 = 24;

/// Working precision and absolute error target for one evaluation.
#[derive(Clone, PartialEq)]
pub struct PrecisionPolicy {
    bits: u32,
    tol: Float,
}

impl PrecisionPolicy {
    /// Builds a policy, rejecting targets finer than the precision can carry.
    ///
    /// Requires `bits >= 53`, `tol > 0` and `tol >= 2^(8 - bits)`.
    pub fn new(bits: u32, tol: f64) -> Result<Self> {
        Self::with_tol(bits, Float::with_val(64, tol))
    }

    /// Same as [`PrecisionPolicy::new`] with a big-float tolerance.
    pub fn with_tol(bits: u32, tol: Float) -> Result<Self> {
        if bits < 53 {
            return Err(Error::Precision(format!(
                "working precision {bits} bits is below the 53-bit minimum"
            )));
        }
        if !tol.is_finite() || tol <= 0 {
            return Err(Error::Precision(format!("tolerance {tol} must be positive")));
        }
        let floor = Float::with_val(64, Float::i_exp(1, 8 - bits as i32));
        if tol < floor {
            return Err(Error::Precision(format!(
                "tolerance {:e} is unattainable at {bits} bits (floor 2^{})",
                tol.to_f64(),
                8 - bits as i32
            )));
        }
        Ok(PrecisionPolicy { bits, tol })
    }

    /// The finest tolerance allowed at `bits`, namely `2^(8 - bits)`.
    pub fn with_bits(bits: u32) -> Result<Self> {
        let bits_i = bits.min(i32::MAX as u32) as i32;
        Self::with_tol(bits, Float::with_val(64, Float::i_exp(1, 8 - bits_i)))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tol(&self) -> &Float {
        &self.tol
    }

    /// Tolerance rounded to `f64` (flushes to zero below the `f64` range).
    pub fn tol_f64(&self) -> f64 {
        self.tol.to_f64()
    }
}

impl Default for PrecisionPolicy {
    /// 128 bits with a `1e-25` absolute target.
    fn default() -> Self {
        PrecisionPolicy::new(128, 1e-25).expect("default precision policy is valid")
    }
}

impl fmt::Debug for PrecisionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecisionPolicy")
            .field("bits", &self.bits)
            .field("tol", &self.tol.to_f64())
            .finish()
    }
}

pub(crate) fn ensure_finite(z: &Complex, what: &str) -> Result<()> {
    if z.real().is_finite() && z.imag().is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not finite")))
    }
}

/// Builds a big complex from two `f64` parts.
pub fn complex(re: f64, im: f64, bits: u32) -> Complex {
    Complex::with_val(bits, (re, im))
}

/// `e^{2 pi i h / k}` at precision `bits`.
pub fn root_of_unity(h: i64, k: u64, bits: u32) -> Complex {
    assert!(k > 0, "root of unity needs a positive order");
    let r = h.rem_euclid(k as i64) as u64;
    let wp = bits + 8;
    // Exact values on the axes avoid spurious tiny imaginary parts.
    if r == 0 {
        return Complex::with_val(bits, 1);
    }
    if 2 * r == k {
        return Complex::with_val(bits, -1);
    }
    if 4 * r == k {
        return Complex::with_val(bits, (0, 1));
    }
    if 4 * r == 3 * k {
        return Complex::with_val(bits, (0, -1));
    }
    let angle = Float::with_val(wp, Constant::Pi) * 2u32 * r / k;
    let (s, c) = angle.sin_cos(Float::new(wp));
    Complex::with_val(bits, (c, s))
}

/// `z^k` by binary powering, so integer powers never pass through a logarithm.
pub fn int_pow(z: &Complex, k: u32, bits: u32) -> Complex {
    let mut result = Complex::with_val(bits, 1);
    let mut base = Complex::with_val(bits, z);
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result *= &base;
        }
        e >>= 1;
        if e > 0 {
            base.square_mut();
        }
    }
    result
}

/// `Cl2(t) = int_0^t ln(2 sin(s/2)) ds` for any finite `t`.
pub fn clausen2(t: &Float, policy: &PrecisionPolicy) -> Result<Float> {
    if !t.is_finite() {
        return Err(Error::Domain("Clausen argument is not finite".into()));
    }
    let wp = policy.bits() + GUARD_BITS + t.get_exp().unwrap_or(0).max(0) as u32;
    Ok(Float::with_val(policy.bits(), clausen::clausen2_at(t, wp)))
}

/// `Li2(e^{it}) = r(t) - i Cl2(t)` with `r(t) = pi^2/6 - t (2 pi - t) / 4`.
pub fn dilog_on_circle(t: &Float, policy: &PrecisionPolicy) -> Result<Complex> {
    let wp = policy.bits() + GUARD_BITS;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    if !t.is_finite() || *t < 0 || *t > two_pi {
        return Err(Error::Domain(format!(
            "dilog_on_circle expects 0 <= t <= 2 pi, got {}",
            t.to_f64()
        )));
    }
    let value = dilog::circle_closed_form(&Float::with_val(wp, t), wp);
    Ok(Complex::with_val(policy.bits(), value))
}

/// Nonnegative real part of the principal square root, `sqrt((Re z + |z|) / 2)`.
///
/// For `Re z < 0` the algebraically equal `|Im z| / sqrt(2 (|z| - Re z))` is
/// used so that no cancellation occurs.
pub fn re_sqrt(z: &Complex) -> Float {
    let prec = z.prec().0.max(z.prec().1);
    if z.is_zero() {
        return Float::new(prec);
    }
    let modulus = Float::with_val(prec, z.abs_ref());
    if !z.real().is_sign_negative() {
        let s = Float::with_val(prec, z.real() + &modulus) / 2u32;
        s.sqrt()
    } else {
        let denom = Float::with_val(prec, &modulus - z.real()) * 2u32;
        Float::with_val(prec, z.imag().abs_ref()) / denom.sqrt()
    }
}

/// Root dilogarithm `f_k(z) = Re sqrt(Li2(z^k)) / k` on the closed disk.
pub fn root_dilog(k: u32, z: &Complex, policy: &PrecisionPolicy) -> Result<Float> {
    if k == 0 {
        return Err(Error::Domain("root_dilog needs k >= 1".into()));
    }
    ensure_finite(z, "root_dilog argument")?;
    let wp = policy.bits() + GUARD_BITS;
    let modulus = Float::with_val(wp, z.abs_ref());
    if modulus > Float::with_val(wp, policy.tol() + 1u32) {
        return Err(Error::Domain(format!(
            "root_dilog evaluated at |z| = {} outside the closed unit disk",
            modulus.to_f64()
        )));
    }
    let w = int_pow(z, k, wp);
    let li = dilog_unchecked(&w, wp)?;
    let value = re_sqrt(&li) / k;
    Ok(Float::with_val(policy.bits(), value))
}

/// Catalan's constant `G = sum (-1)^n / (2n+1)^2`.
///
/// Summed with the Ramanujan series
/// `G = (pi/8) ln(2 + sqrt 3) + (3/8) sum_n 1 / ((2n+1)^2 C(2n, n))`,
/// whose terms shrink by a factor of four.
pub fn catalan(policy: &PrecisionPolicy) -> Result<Float> {
    let wp = policy.bits() + GUARD_BITS;
    let pi = Float::with_val(wp, Constant::Pi);
    let sqrt3 = Float::with_val(wp, 3u32).sqrt();
    let head = Float::with_val(wp, sqrt3 + 2u32).ln() * pi / 8u32;
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut central = Integer::from(1); // C(2n, n)
    let mut sum = Float::new(wp);
    for n in 0u64.. {
        if n > 0 {
            central *= 2 * (2 * n - 1);
            central /= n;
        }
        let odd = 2 * n + 1;
        let denom = Integer::from(&central * (odd * odd));
        let term = Float::with_val(wp, 1u32) / Float::with_val(wp, &denom);
        sum += &term;
        if term < eps {
            break;
        }
        if n > 4 * wp as u64 {
            return Err(Error::Precision("Catalan series stalled".into()));
        }
    }
    let value = head + sum * 3u32 / 8u32;
    Ok(Float::with_val(policy.bits(), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
        Float::with_val(160, Complex::with_val(160, a - b).abs_ref()) < tol
    }

    #[test]
    fn policy_rejects_bad_inputs() {
        assert!(PrecisionPolicy::new(40, 1e-5).is_err());
        assert!(PrecisionPolicy::new(128, 0.0).is_err());
        assert!(PrecisionPolicy::new(64, 1e-30).is_err());
        assert!(PrecisionPolicy::new(64, 1e-15).is_ok());
        assert_eq!(PrecisionPolicy::default().bits(), 128);
    }

    #[test]
    fn dilog_values_in_every_region() {
        let p = policy();
        let pi = Float::with_val(200, Constant::Pi);
        let zeta2 = Float::with_val(200, pi.square_ref()) / 6u32;
        assert!(dilog(&complex(0.0, 0.0, 128), &p).unwrap().is_zero());
        let one = dilog(&complex(1.0, 0.0, 128), &p).unwrap();
        assert!(close(&one, &Complex::with_val(200, &zeta2), 1e-35));
        let minus = dilog(&complex(-1.0, 0.0, 128), &p).unwrap();
        assert!(close(&minus, &Complex::with_val(200, -zeta2.clone() / 2u32), 1e-35));
        // Li2(1/2) = pi^2/12 - ln(2)^2/2
        let half = dilog(&complex(0.5, 0.0, 128), &p).unwrap();
        let ln2 = Float::with_val(200, Constant::Log2);
        let want = Float::with_val(200, &zeta2 / 2u32) - Float::with_val(200, ln2.square_ref()) / 2u32;
        assert!(close(&half, &Complex::with_val(200, want), 1e-35));
    }

    #[test]
    fn region_seams_are_continuous() {
        // Points straddling the branch thresholds must agree with the power
        // series evaluated at much higher precision.
        let p = policy();
        for &(re, im) in &[(0.5, 0.0), (0.501, 0.0), (0.6, 0.35), (0.55, -0.3), (0.75, 0.6), (-0.7, 0.7)] {
            let z = complex(re, im, 128);
            let got = dilog(&z, &p).unwrap();
            let slow = reference_series(&z, 400);
            assert!(close(&got, &slow, 1e-30), "z = {re}+{im}i");
        }
    }

    /// Defining series at high precision, only practical for |z| < 0.96.
    fn reference_series(z: &Complex, wp: u32) -> Complex {
        let z = Complex::with_val(wp, z);
        let mut sum = Complex::new(wp);
        let mut power = Complex::with_val(wp, 1);
        for n in 1u64..6000 {
            power *= &z;
            sum += Complex::with_val(wp, &power / (n * n));
        }
        sum
    }

    #[test]
    fn dilog_rejects_points_outside_disk() {
        let err = dilog(&complex(1.1, 0.0, 128), &policy()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn re_sqrt_examples() {
        assert_eq!(re_sqrt(&complex(1.0, 0.0, 128)), 1);
        assert!(re_sqrt(&complex(-1.0, 0.0, 128)).is_zero());
        let v = re_sqrt(&complex(0.0, 1.0, 128));
        let want = Float::with_val(128, 0.5).sqrt();
        assert!(Float::with_val(128, &v - &want).abs() < 1e-36);
        assert!(re_sqrt(&complex(0.0, 0.0, 128)).is_zero());
    }

    #[test]
    fn root_dilog_at_one() {
        let p = policy();
        let pi = Float::with_val(128, Constant::Pi);
        let six = Float::with_val(128, 6).sqrt();
        let f1 = root_dilog(1, &complex(1.0, 0.0, 128), &p).unwrap();
        assert!(Float::with_val(128, &f1 - Float::with_val(128, &pi / &six)).abs() < 1e-35);
        let f2 = root_dilog(2, &complex(1.0, 0.0, 128), &p).unwrap();
        assert!(Float::with_val(128, f2 * 2u32 - &f1).abs() < 1e-35);
        assert!(root_dilog(0, &complex(0.5, 0.0, 128), &p).is_err());
    }

    #[test]
    fn int_pow_matches_repeated_multiplication() {
        let z = complex(0.3, -0.8, 128);
        let mut slow = Complex::with_val(128, 1);
        for k in 0..13u32 {
            let fast = int_pow(&z, k, 128);
            assert!(close(&fast, &slow, 1e-35), "k = {k}");
            slow *= &z;
        }
    }

    #[test]
    fn roots_of_unity_are_exact_on_axes() {
        assert_eq!(root_of_unity(1, 4, 64), Complex::with_val(64, (0, 1)));
        assert_eq!(root_of_unity(-1, 2, 64), Complex::with_val(64, -1));
        let w = root_of_unity(1, 3, 128);
        let cube = int_pow(&w, 3, 128);
        assert!(close(&cube, &Complex::with_val(128, 1), 1e-35));
    }
}
