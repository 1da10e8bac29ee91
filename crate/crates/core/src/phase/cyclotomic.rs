//! Exact arithmetic in the cyclotomic field `Q(zeta_k)`.
//!
//! Elements are stored as rational coefficient vectors over the spanning set
//! `1, zeta, ..., zeta^{k-1}`, so multiplication is a cyclic convolution.
//! Equality and rationality tests go through the canonical remainder modulo
//! the cyclotomic polynomial `Phi_k`.

use std::ops::{Add, Mul, Neg, Sub};

use rug::{Complex, Integer, Rational};

use crate::specfun::root_of_unity;

/// An element of `Q(zeta_k)`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        assert!(order > 0, "cyclotomic order must be positive");
        Cyclotomic { order, coeffs: vec![Rational::new(); order as usize] }
    }

    pub fn rational(order: u64, value: Rational) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = value;
        out
    }

    /// `zeta_k^m` for any integer `m`.
    pub fn root(order: u64, m: i64) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[m.rem_euclid(order as i64) as usize] = Rational::from(1);
        out
    }

    /// `1 / (1 - zeta_k^m)` for `zeta_k^m != 1`.
    ///
    /// With `w = zeta_k^m` of exact order `d`, `sum_{j<d} j w^j = d / (w - 1)`,
    /// so the inverse is `-(1/d) sum_{j<d} j w^j`.
    pub fn inverse_one_minus_root(order: u64, m: i64) -> Self {
        let r = m.rem_euclid(order as i64) as u64;
        assert!(r != 0, "1 - zeta^m vanishes");
        let d = order / crate::partition::gcd(r, order);
        let mut out = Self::zero(order);
        for j in 1..d {
            let idx = ((r * j) % order) as usize;
            out.coeffs[idx] -= Rational::from((j, d));
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficients over `1, zeta, ..., zeta^{k-1}` (not canonical).
    pub fn raw_coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * factor)).collect(),
        }
    }

    /// Canonical coordinates: remainder modulo `Phi_k`, length `phi(k)`.
    pub fn reduced(&self) -> Vec<Rational> {
        let phi = cyclotomic_polynomial(self.order);
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        for i in (deg..r.len()).rev() {
            if r[i] == 0 {
                continue;
            }
            let lead = std::mem::take(&mut r[i]);
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if *pj != 0 {
                    r[i - deg + j] -= Rational::from(&lead * pj);
                }
            }
        }
        r.truncate(deg);
        r
    }

    /// The value as a rational, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        let r = self.reduced();
        if r.iter().skip(1).all(|c| *c == 0) {
            Some(r.into_iter().next().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|c| *c == 0)
    }

    /// Numerical value at `bits` precision.
    pub fn to_complex(&self, bits: u32) -> Complex {
        let mut sum = Complex::new(bits + 16);
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c != 0 {
                let w = root_of_unity(j as i64, self.order, bits + 16);
                sum += w * c;
            }
        }
        Complex::with_val(bits, sum)
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(self.order, other.order, "mixing cyclotomic fields");
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.reduced() == other.reduced()
    }
}

impl Add for &Cyclotomic {
    type Output = Cyclotomic;

    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.check_same_field(rhs);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| Rational::from(a + b))
            .collect();
        Cyclotomic { order: self.order, coeffs }
    }
}

impl Sub for &Cyclotomic {
    type Output = Cyclotomic;

    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        self + &(-rhs)
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;

    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &Cyclotomic {
    type Output = Cyclotomic;

    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        self.check_same_field(rhs);
        let k = self.order as usize;
        let mut out = Cyclotomic::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a != 0) {
            for (j, b) in rhs.coeffs.iter().enumerate().filter(|(_, b)| **b != 0) {
                out.coeffs[(i + j) % k] += Rational::from(a * b);
            }
        }
        out
    }
}

/// Integer coefficients of `Phi_k`, lowest degree first.
pub fn cyclotomic_polynomial(k: u64) -> Vec<Integer> {
    // Phi_k = (x^k - 1) / prod_{d | k, d < k} Phi_d
    let mut num = vec![Integer::new(); k as usize + 1];
    num[0] = Integer::from(-1);
    num[k as usize] = Integer::from(1);
    for d in (1..k).filter(|d| k % d == 0) {
        num = divide_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn divide_monic(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![Integer::new(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let lead = rem[i + dn].clone();
        if lead != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= Integer::from(&lead * dj);
            }
        }
        quot[i] = lead;
    }
    debug_assert!(rem.iter().all(|c| *c == 0), "inexact cyclotomic division");
    quot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        let as_i64 = |k| -> Vec<i64> {
            cyclotomic_polynomial(k).iter().map(|c| c.to_i64().unwrap()).collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_sum_to_zero() {
        let mut sum = Cyclotomic::zero(6);
        for m in 0..6 {
            sum = &sum + &Cyclotomic::root(6, m);
        }
        assert!(sum.is_zero());
        assert_eq!(sum.as_rational(), Some(Rational::new()));
    }

    #[test]
    fn inverse_is_inverse() {
        for k in 2..13u64 {
            for m in 1..k as i64 {
                let one = Cyclotomic::rational(k, Rational::from(1));
                let w = &one - &Cyclotomic::root(k, m);
                let prod = &w * &Cyclotomic::inverse_one_minus_root(k, m);
                assert_eq!(prod, one, "k = {k}, m = {m}");
            }
        }
    }

    #[test]
    fn numeric_value_of_i() {
        let i = Cyclotomic::root(4, 1);
        let z = i.to_complex(64);
        assert!(z.real().clone().abs() < 1e-18);
        assert!((z.imag().to_f64() - 1.0).abs() < 1e-18);
        assert_eq!(i.as_rational(), None);
    }
}
