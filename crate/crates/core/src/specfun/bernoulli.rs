//! Even Bernoulli numbers and the series coefficients derived from them.
//!
//! `B_{2k}` comes from the tangent numbers `T_k` via
//! `B_{2k} = (-1)^{k-1} 2k T_k / (4^k (4^k - 1))`; the tangent numbers are
//! built with the in-place Brent–Harvey recurrence in exact integers.
//! Float coefficient tables are cached per working precision.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use rug::{Float, Integer, Rational};

static EVEN_BERNOULLI: LazyLock<RwLock<Vec<Rational>>> = LazyLock::new(|| RwLock::new(Vec::new()));

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Table {
    /// `B_{2k} / (2k+1)!`, used by the dilogarithm series in `-ln(1-z)`.
    Dilog,
    /// `|B_{2k}| / (2k (2k+1)!)`, used by the Clausen series in the angle.
    Clausen,
}

static TABLES: LazyLock<RwLock<HashMap<(Table, u32), Arc<Vec<Float>>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Tangent numbers `T_1..=T_n` (1, 2, 16, 272, ...).
fn tangent_numbers(n: usize) -> Vec<Integer> {
    let mut t = vec![Integer::new(); n + 1];
    if n == 0 {
        return t;
    }
    t[1] = Integer::from(1);
    for k in 2..=n {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=n {
        for j in k..=n {
            let lower = Integer::from(&t[j - 1] * (j as u64 - k as u64));
            t[j] *= j as u64 - k as u64 + 2;
            t[j] += lower;
        }
    }
    t
}

/// `B_2, B_4, ..., B_{2n}` as exact rationals (index 0 holds `B_2`).
pub fn even_bernoulli(n: usize) -> Vec<Rational> {
    {
        let cached = EVEN_BERNOULLI.read().expect("bernoulli cache poisoned");
        if cached.len() >= n {
            return cached[..n].to_vec();
        }
    }
    // Grow geometrically so repeated small extensions stay cheap.
    let target = n.max(64).next_power_of_two();
    let tangent = tangent_numbers(target);
    let mut values = Vec::with_capacity(target);
    for k in 1..=target {
        let four_k = Integer::from(1) << (2 * k as u32);
        let denom = Integer::from(&four_k * Integer::from(&four_k - 1u32));
        let mut num = Integer::from(&tangent[k] * (2 * k as u64));
        if k % 2 == 0 {
            num = -num;
        }
        values.push(Rational::from((num, denom)));
    }
    let mut cached = EVEN_BERNOULLI.write().expect("bernoulli cache poisoned");
    if cached.len() < values.len() {
        *cached = values;
    }
    cached[..n].to_vec()
}

fn terms_for(prec: u32) -> usize {
    prec as usize / 2 + 24
}

fn table(kind: Table, prec: u32) -> Arc<Vec<Float>> {
    if let Some(t) = TABLES.read().expect("coefficient cache poisoned").get(&(kind, prec)) {
        return Arc::clone(t);
    }
    let n = terms_for(prec);
    let bern = even_bernoulli(n);
    let mut factorial = Integer::from(1); // (2k+1)!
    let mut coeffs = Vec::with_capacity(n);
    for (idx, b) in bern.iter().enumerate() {
        let k = idx as u64 + 1;
        factorial *= 2 * k;
        factorial *= 2 * k + 1;
        let value = match kind {
            Table::Dilog => Rational::from(b / &factorial),
            Table::Clausen => {
                let denom = Integer::from(&factorial * (2 * k));
                Rational::from(b.clone().abs() / denom)
            }
        };
        coeffs.push(Float::with_val(prec, &value));
    }
    let coeffs = Arc::new(coeffs);
    TABLES
        .write()
        .expect("coefficient cache poisoned")
        .insert((kind, prec), Arc::clone(&coeffs));
    coeffs
}

/// `B_{2k}/(2k+1)!` for `k = 1, 2, ...` at precision `prec`.
pub(crate) fn dilog_coefficients(prec: u32) -> Arc<Vec<Float>> {
    table(Table::Dilog, prec)
}

/// `|B_{2k}|/(2k (2k+1)!)` for `k = 1, 2, ...` at precision `prec`.
pub(crate) fn clausen_coefficients(prec: u32) -> Arc<Vec<Float>> {
    table(Table::Clausen, prec)
}
