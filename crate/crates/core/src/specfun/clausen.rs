//! Clausen integral `Cl2(t) = int_0^t ln(2 sin(s/2)) ds`.
//!
//! With this sign convention `Cl2(pi/2) = -G` and `Li2(e^{it}) = r(t) - i Cl2(t)`.
//! The primary evaluation reduces `t` into `(-pi, pi]` and sums the angle series
//! `-t + t ln|t| - sum_n |B_{2n}| t^{2n+1} / (2n (2n+1)!)`, which converges
//! geometrically with ratio at most `1/4` on the reduced range. A plain sine
//! series in `f64` is kept as an independent cross-check.

use rug::float::Constant;
use rug::Float;

use super::bernoulli::clausen_coefficients;

/// Reduces `t` into `(-pi, pi]` at working precision `wp`.
pub(crate) fn reduce_angle(t: &Float, wp: u32) -> Float {
    let pi = Float::with_val(wp, Constant::Pi);
    let two_pi = Float::with_val(wp, &pi * 2u32);
    let mut r = Float::with_val(wp, t);
    if r > pi || r <= -pi.clone() {
        let turns = Float::with_val(wp, &r / &two_pi).round();
        r -= turns * &two_pi;
        if r > pi {
            r -= &two_pi;
        } else if r <= -pi.clone() {
            r += &two_pi;
        }
    }
    r
}

/// `Cl2(t)` at working precision `wp` (any finite `t`).
pub(crate) fn clausen2_at(t: &Float, wp: u32) -> Float {
    let theta = reduce_angle(t, wp);
    if theta.is_zero() {
        return Float::new(wp);
    }
    let pi = Float::with_val(wp, Constant::Pi);
    if theta == pi {
        return Float::new(wp);
    }
    let coeffs = clausen_coefficients(wp);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let abs_theta = Float::with_val(wp, theta.abs_ref());
    let log_abs = Float::with_val(wp, abs_theta.ln_ref());
    // Standard-sign value: theta - theta ln|theta| + sum |B_2n| theta^{2n+1} / (2n (2n+1)!)
    let mut standard = Float::with_val(wp, &theta - Float::with_val(wp, &theta * &log_abs));
    let theta_sq = Float::with_val(wp, theta.square_ref());
    let mut power = theta.clone();
    for c in coeffs.iter() {
        power *= &theta_sq;
        let term = Float::with_val(wp, &power * c);
        standard += &term;
        if Float::with_val(wp, term.abs_ref()) < eps {
            break;
        }
    }
    -standard
}

/// `Cl2(t)` from the truncated sine series `-sum_{n<=terms} sin(nt)/n^2`.
///
/// Returns the partial sum and the bound `1/terms` on the discarded tail.
pub fn clausen2_fourier(t: f64, terms: usize) -> (f64, f64) {
    let terms = terms.max(1);
    // Kahan summation keeps rounding below the tail bound for large term counts.
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for n in 1..=terms {
        let nf = n as f64;
        let term = (nf * t).sin() / (nf * nf) - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    (-sum, 1.0 / terms as f64)
}
