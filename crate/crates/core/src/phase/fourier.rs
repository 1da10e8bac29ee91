//! Dirichlet-series data `D_{t,k}(0)`, residues at `s = 1`, and their finite
//! Fourier transforms `b_k`, `c_k` over `Z_k`.
//!
//! Everything is exact: values live in `Q(zeta_k)` and the transforms are
//! checked to land back in `Q` for the supported families.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use rug::Rational;

use super::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::partition::{ExponentSequence, Family};

fn check_index(t: u64, k: u64) -> Result<()> {
    if k == 0 || t == 0 || t > k {
        return Err(Error::Domain(format!("character index needs 1 <= t <= k, got t={t}, k={k}")));
    }
    Ok(())
}

/// `D_{t,k}(0)` where `D_{t,k}(s) = sum_m a_m e_k(mt) m^{-s}`, as an element of `Q(zeta_k)`.
///
/// - all parts: `-(1/k) sum_{r=1}^k r e_k(tr)` for `t < k`, and `-1/2` for `t = k`;
/// - parts `= a (mod p)`: `e_k(ta) (1/2 - a/p)` when `k | pt`, else `e_k(ta) / (1 - e_k(pt))`;
/// - explicit part lists: the finite sum `sum_{m in S} e_k(mt)`.
pub fn dirichlet_at_zero(seq: &ExponentSequence, t: u64, k: u64) -> Result<Cyclotomic> {
    check_index(t, k)?;
    match seq.family() {
        Family::AllParts => {
            if t == k {
                return Ok(Cyclotomic::rational(k, Rational::from((-1, 2))));
            }
            let mut sum = Cyclotomic::zero(k);
            for r in 1..=k {
                let term = Cyclotomic::root(k, (t * r) as i64).scale(&Rational::from(r));
                sum = &sum + &term;
            }
            Ok(sum.scale(&Rational::from((-1, k))))
        }
        Family::Residue { a, p } => {
            let rot = Cyclotomic::root(k, (t * a) as i64);
            if (p * t) % k == 0 {
                let half = Rational::from((1, 2)) - Rational::from((*a, *p));
                Ok(rot.scale(&half))
            } else {
                Ok(&rot * &Cyclotomic::inverse_one_minus_root(k, (p * t) as i64))
            }
        }
        Family::Explicit(parts) => {
            let mut sum = Cyclotomic::zero(k);
            for &m in parts {
                sum = &sum + &Cyclotomic::root(k, ((m % k) * t) as i64);
            }
            Ok(sum)
        }
        Family::QuadraticUnits { .. } => Err(Error::UnsupportedFamily(format!(
            "D_(t,k)(0) is not implemented for {seq}"
        ))),
    }
}

/// Residue of `D_{t,k}(s)` at `s = 1`.
///
/// Congruence families have a simple pole exactly when `k | pt`, with residue
/// `e_k(ta)/p`; the quadratic family adds the `-1` class, and explicit lists
/// are entire.
pub fn residue_at_one(seq: &ExponentSequence, t: u64, k: u64) -> Result<Cyclotomic> {
    check_index(t, k)?;
    let value = match seq.family() {
        Family::AllParts => {
            if t == k {
                Cyclotomic::rational(k, Rational::from(1))
            } else {
                Cyclotomic::zero(k)
            }
        }
        Family::Residue { a, p } => {
            if (p * t) % k == 0 {
                Cyclotomic::root(k, (t * a) as i64).scale(&Rational::from((1, *p)))
            } else {
                Cyclotomic::zero(k)
            }
        }
        Family::QuadraticUnits { p } => {
            if (p * t) % k == 0 {
                let pair = &Cyclotomic::root(k, t as i64) + &Cyclotomic::root(k, -(t as i64));
                pair.scale(&Rational::from((1, *p)))
            } else {
                Cyclotomic::zero(k)
            }
        }
        Family::Explicit(_) => Cyclotomic::zero(k),
    };
    Ok(value)
}

/// `b_k(j)` and `c_k(j)` for `j = 1..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    k: u64,
    b: Vec<Rational>,
    c: Vec<Rational>,
}

impl FourierData {
    pub fn k(&self) -> u64 {
        self.k
    }

    /// `b_k(j)`, with `j` taken modulo `k` into `1..=k`.
    pub fn b(&self, j: i64) -> &Rational {
        &self.b[self.slot(j)]
    }

    /// `c_k(j)`, with `j` taken modulo `k` into `1..=k`.
    pub fn c(&self, j: i64) -> &Rational {
        &self.c[self.slot(j)]
    }

    /// `[b_k(1), ..., b_k(k)]`.
    pub fn b_values(&self) -> &[Rational] {
        &self.b
    }

    /// `[c_k(1), ..., c_k(k)]`.
    pub fn c_values(&self) -> &[Rational] {
        &self.c
    }

    fn slot(&self, j: i64) -> usize {
        ((j - 1).rem_euclid(self.k as i64)) as usize
    }
}

type CacheKey = (ExponentSequence, u64);

static CACHE: LazyLock<RwLock<HashMap<CacheKey, Arc<FourierData>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Finite Fourier transforms `b_k(j) = (1/k) sum_t e_k(-tj) D_{t,k}(0)` and
/// `c_k(j) = (1/k) sum_t e_k(-tj) Res(D_{t,k}, 1)`, memoized per `(seq, k)`.
pub fn fourier_data(seq: &ExponentSequence, k: u64) -> Result<Arc<FourierData>> {
    if k == 0 {
        return Err(Error::Domain("fourier_data needs k >= 1".into()));
    }
    let key = (seq.clone(), k);
    if let Some(hit) = CACHE.read().expect("fourier cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let data = Arc::new(compute(seq, k)?);
    let mut cache = CACHE.write().expect("fourier cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(data)))
}

fn compute(seq: &ExponentSequence, k: u64) -> Result<FourierData> {
    let d: Vec<Cyclotomic> = (1..=k).map(|t| dirichlet_at_zero(seq, t, k)).collect::<Result<_>>()?;
    let res: Vec<Cyclotomic> = (1..=k).map(|t| residue_at_one(seq, t, k)).collect::<Result<_>>()?;
    let inv_k = Rational::from((1, k));
    let transform = |values: &[Cyclotomic], j: u64, what: &str| -> Result<Rational> {
        let mut sum = Cyclotomic::zero(k);
        for (idx, v) in values.iter().enumerate() {
            let t = idx as i64 + 1;
            sum = &sum + &(&Cyclotomic::root(k, -t * j as i64) * v);
        }
        sum.scale(&inv_k).as_rational().ok_or_else(|| {
            Error::UnsupportedFamily(format!("{what}_{k}({j}) is not rational for {seq}"))
        })
    };
    let b = (1..=k).map(|j| transform(&d, j, "b")).collect::<Result<_>>()?;
    let c = (1..=k).map(|j| transform(&res, j, "c")).collect::<Result<_>>()?;
    Ok(FourierData { k, b, c })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn all_parts_tables() {
        let seq = ExponentSequence::all_parts();
        let f1 = fourier_data(&seq, 1).unwrap();
        assert_eq!(f1.b_values(), &[q(-1, 2)]);
        let f2 = fourier_data(&seq, 2).unwrap();
        assert_eq!(f2.b_values(), &[q(0, 1), q(-1, 2)]);
        let f3 = fourier_data(&seq, 3).unwrap();
        assert_eq!(f3.b_values(), &[q(1, 6), q(-1, 6), q(-1, 2)]);
        assert!(f3.c_values().iter().all(|c| *c == q(1, 3)));
    }

    #[test]
    fn odd_parts_dirichlet_values() {
        let odd = ExponentSequence::odd_parts();
        let d = dirichlet_at_zero(&odd, 1, 4).unwrap();
        assert_eq!(d, Cyclotomic::root(4, 1).scale(&q(1, 2)));
        for k in 1..8 {
            assert!(dirichlet_at_zero(&odd, k, k).unwrap().is_zero());
        }
    }

    #[test]
    fn residue_examples() {
        let r3 = ExponentSequence::residue(1, 3).unwrap();
        let res = residue_at_one(&r3, 2, 6).unwrap();
        assert_eq!(res, Cyclotomic::root(6, 2).scale(&q(1, 3)));
        let odd = ExponentSequence::odd_parts();
        assert!(residue_at_one(&odd, 1, 3).unwrap().is_zero());
    }

    #[test]
    fn quadratic_family_has_no_dirichlet_values() {
        let seq = ExponentSequence::quadratic_units(5).unwrap();
        assert!(matches!(dirichlet_at_zero(&seq, 1, 5), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(fourier_data(&seq, 5), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn index_is_checked() {
        let seq = ExponentSequence::all_parts();
        assert!(dirichlet_at_zero(&seq, 0, 3).is_err());
        assert!(residue_at_one(&seq, 4, 3).is_err());
    }
}
