//! Exact partition polynomials `F_n(z) = sum_k c(n, k) z^k`.
//!
//! `c(n, k)` counts partitions of `n` into exactly `k` parts drawn from the
//! set selected by an [`ExponentSequence`]. Coefficients are exact big
//! integers produced by dynamic programming, and the tail series
//! `H(z) = prod_m (1 - z^m)^{-a_{m+1}}` gives the stable top coefficients.

use std::fmt;
use std::io::Write;

use rug::{Complex, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::PrecisionPolicy;

/// Default cap on DP cells for [`generate`] (about `N = 6300`).
pub const DEFAULT_CELL_BUDGET: usize = 20_000_000;

/// The rule selecting which parts may appear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    /// Every positive integer.
    AllParts,
    /// Parts `m` with `m = a (mod p)`.
    Residue { a: u64, p: u64 },
    /// Parts congruent to `1` or `p - 1` modulo `p`.
    QuadraticUnits { p: u64 },
    /// A finite list of parts; sorted, deduplicated, always containing 1.
    Explicit(Vec<u64>),
}

/// A validated binary exponent sequence `a_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentSequence {
    family: Family,
}

impl ExponentSequence {
    pub fn all_parts() -> Self {
        ExponentSequence { family: Family::AllParts }
    }

    /// Parts congruent to `a` modulo `p`.
    ///
    /// Only `a = 1` is accepted, since part 1 must always be allowed.
    pub fn residue(a: u64, p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidSequence(format!("residue modulus {p} must be at least 2")));
        }
        if a == 0 || a > p || gcd(a, p) != 1 {
            return Err(Error::InvalidSequence(format!(
                "residue class {a} mod {p} needs 1 <= a <= p and gcd(a, p) = 1"
            )));
        }
        if a != 1 {
            return Err(Error::InvalidSequence(format!(
                "residue class {a} mod {p} excludes the part 1 (a_1 = 1 is required)"
            )));
        }
        Ok(ExponentSequence { family: Family::Residue { a, p } })
    }

    /// Odd parts, the same as `residue(1, 2)`.
    pub fn odd_parts() -> Self {
        ExponentSequence { family: Family::Residue { a: 1, p: 2 } }
    }

    /// Parts congruent to `1` or `p - 1` modulo `p`, for `p >= 3`.
    pub fn quadratic_units(p: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::InvalidSequence(format!("quadratic family needs p >= 3, got {p}")));
        }
        Ok(ExponentSequence { family: Family::QuadraticUnits { p } })
    }

    /// A finite set of allowed parts; it must contain 1.
    pub fn explicit(parts: &[u64]) -> Result<Self> {
        let mut parts = parts.to_vec();
        parts.sort_unstable();
        parts.dedup();
        if parts.first() == Some(&0) {
            return Err(Error::InvalidSequence("parts must be positive".into()));
        }
        if parts.first() != Some(&1) {
            return Err(Error::InvalidSequence("explicit part list must contain 1".into()));
        }
        Ok(ExponentSequence { family: Family::Explicit(parts) })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `a_m`: 1 if `m` is an allowed part, else 0. `a_0` is 0.
    pub fn exponent(&self, m: u64) -> u8 {
        u8::from(self.allows(m))
    }

    pub fn allows(&self, m: u64) -> bool {
        if m == 0 {
            return false;
        }
        match &self.family {
            Family::AllParts => true,
            Family::Residue { a, p } => m % p == a % p,
            Family::QuadraticUnits { p } => {
                let r = m % p;
                r == 1 || r == p - 1
            }
            Family::Explicit(parts) => parts.binary_search(&m).is_ok(),
        }
    }

    /// Allowed parts `m <= limit`, ascending.
    pub fn parts_up_to(&self, limit: u64) -> Vec<u64> {
        match &self.family {
            Family::Explicit(parts) => parts.iter().copied().take_while(|&m| m <= limit).collect(),
            _ => (1..=limit).filter(|&m| self.allows(m)).collect(),
        }
    }

    /// Modulus `p` for congruence families (1 for all parts).
    pub fn modulus(&self) -> Option<u64> {
        match &self.family {
            Family::AllParts => Some(1),
            Family::Residue { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// Short stable label used in file names and exported metadata.
    pub fn label(&self) -> String {
        match &self.family {
            Family::AllParts => "all-parts".into(),
            Family::Residue { a: 1, p: 2 } => "odd".into(),
            Family::Residue { a, p } => format!("residue-{a}-mod-{p}"),
            Family::QuadraticUnits { p } => format!("quadratic-units-{p}"),
            Family::Explicit(parts) => {
                let list: Vec<String> = parts.iter().map(u64::to_string).collect();
                format!("explicit-{}", list.join("-"))
            }
        }
    }
}

impl fmt::Display for ExponentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `F_n(z)` with exact coefficients; `coeffs[k]` multiplies `z^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPolynomial {
    n: u64,
    coeffs: Vec<Integer>,
}

impl PartitionPolynomial {
    /// Wraps raw coefficients (index = power of `z`), trimming trailing zeros.
    pub fn from_coeffs(n: u64, mut coeffs: Vec<Integer>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        PartitionPolynomial { n, coeffs }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Integer {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Lowest power with a nonzero coefficient (the multiplicity of the root 0).
    pub fn origin_multiplicity(&self) -> usize {
        self.coeffs.iter().position(|c| *c != 0).unwrap_or(0)
    }

    /// Powers `k` with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, _)| k)
            .collect()
    }

    /// `F_n(1)`, the number of admissible partitions of `n`.
    pub fn value_at_one(&self) -> Integer {
        self.coeffs.iter().sum()
    }

    /// Bit length of the largest coefficient.
    pub fn max_coeff_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
    }
}

fn check_budget(cells: usize, budget: usize) -> Result<()> {
    if cells > budget {
        return Err(Error::Resource(format!(
            "partition table needs {cells} cells, budget is {budget}"
        )));
    }
    Ok(())
}

fn triangle_cells(n: u64) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) / 2
}

/// `F_1, ..., F_N` under the default memory budget.
pub fn generate(seq: &ExponentSequence, n_max: u64) -> Result<Vec<PartitionPolynomial>> {
    generate_with_budget(seq, n_max, DEFAULT_CELL_BUDGET)
}

/// `F_1, ..., F_N`, failing with a resource error above `cell_budget` cells.
///
/// Parts are processed in increasing order and, for each part `m`, weights
/// ascend, so `c[w][k] += c[w - m][k - 1]` is the unbounded-knapsack update.
pub fn generate_with_budget(
    seq: &ExponentSequence,
    n_max: u64,
    cell_budget: usize,
) -> Result<Vec<PartitionPolynomial>> {
    if n_max == 0 {
        return Err(Error::Domain("generate needs N >= 1".into()));
    }
    check_budget(triangle_cells(n_max), cell_budget)?;
    let table = knapsack_table(seq, n_max);
    Ok(table
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(w, row)| PartitionPolynomial::from_coeffs(w as u64, row))
        .collect())
}

/// Rows `0..=n_max`; row `w` has `w + 1` entries indexed by part count.
fn knapsack_table(seq: &ExponentSequence, n_max: u64) -> Vec<Vec<Integer>> {
    let n = n_max as usize;
    let mut table: Vec<Vec<Integer>> = (0..=n).map(|w| vec![Integer::new(); w + 1]).collect();
    table[0][0] = Integer::from(1);
    for m in seq.parts_up_to(n_max) {
        let m = m as usize;
        for w in m..=n {
            let (lower, upper) = table.split_at_mut(w);
            let src = &lower[w - m];
            let dst = &mut upper[0];
            for k in 1..=src.len() {
                if src[k - 1] != 0 {
                    dst[k] += &src[k - 1];
                }
            }
        }
    }
    table
}

/// `F_n` alone.
///
/// Congruence families (`parts = 1 mod p`, including all parts) use the
/// column recurrence `q(w, k) = q(w - 1, k - 1) + q(w - pk, k)` with `O(n)`
/// live integers: a partition either has a part 1, or every part exceeds `p`
/// and subtracting `p` from each leaves an admissible partition. Other
/// families fall back to the full table.
pub fn generate_one(seq: &ExponentSequence, n: u64) -> Result<PartitionPolynomial> {
    if n == 0 {
        return Err(Error::Domain("generate_one needs n >= 1".into()));
    }
    let p = match seq.family() {
        Family::AllParts => 1,
        Family::Residue { a: 1, p } => *p as usize,
        _ => {
            check_budget(triangle_cells(n), DEFAULT_CELL_BUDGET)?;
            let mut table = knapsack_table(seq, n);
            let row = table.pop().expect("table has n + 1 rows");
            return Ok(PartitionPolynomial::from_coeffs(n, row));
        }
    };
    let n = n as usize;
    let mut coeffs = vec![Integer::new(); n + 1];
    // prev[w] = q(w, k - 1), starting from q(w, 0) = [w == 0].
    let mut prev = vec![Integer::new(); n + 1];
    prev[0] = Integer::from(1);
    for k in 1..=n {
        let mut cur = vec![Integer::new(); n + 1];
        for w in k..=n {
            let mut v = prev[w - 1].clone();
            if w >= p * k {
                v += &cur[w - p * k];
            }
            cur[w] = v;
        }
        coeffs[k] = cur[n].clone();
        prev = cur;
    }
    Ok(PartitionPolynomial::from_coeffs(n as u64, coeffs))
}

/// Coefficients `h_0..=h_K` of `H(z) = prod_{m >= 1} (1 - z^m)^{-a_{m+1}}`.
pub fn tail_series(seq: &ExponentSequence, k_max: u64) -> Result<Vec<Integer>> {
    check_budget(k_max as usize + 1, DEFAULT_CELL_BUDGET)?;
    let k = k_max as usize;
    let mut h = vec![Integer::new(); k + 1];
    h[0] = Integer::from(1);
    for m in 1..=k {
        if !seq.allows(m as u64 + 1) {
            continue;
        }
        for w in m..=k {
            let (lower, upper) = h.split_at_mut(w);
            upper[0] += &lower[w - m];
        }
    }
    Ok(h)
}

/// Horner evaluation of `F(z)`.
///
/// Works at `max(policy bits, max coefficient bits + 64)` so every
/// coefficient is represented exactly; the result carries that precision.
pub fn eval(poly: &PartitionPolynomial, z: &Complex, policy: &PrecisionPolicy) -> Result<Complex> {
    crate::specfun::ensure_finite(z, "evaluation point")?;
    let wp = policy.bits().max(poly.max_coeff_bits() + 64);
    let z = Complex::with_val(wp, z);
    let mut acc = Complex::new(wp);
    for c in poly.coeffs().iter().rev() {
        acc *= &z;
        acc += c;
    }
    if !(acc.real().is_finite() && acc.imag().is_finite()) {
        return Err(Error::Precision("polynomial value overflowed".into()));
    }
    Ok(acc)
}

/// Whether every nonzero coefficient index `k` satisfies `k = n (mod p)`.
///
/// This is the coefficient form of `F_n(e_p(1) z) = e_p(n) F_n(z)`. All parts
/// count as `p = 1` and always pass; families without a modulus never pass.
pub fn rotation_check(seq: &ExponentSequence, poly: &PartitionPolynomial) -> bool {
    let Some(p) = seq.modulus() else {
        return false;
    };
    let target = poly.n() % p;
    poly.support().into_iter().all(|k| k as u64 % p == target)
}

#[derive(Serialize)]
struct CoefficientRow {
    n: u64,
    k: usize,
    coefficient: String,
}

fn rows(polys: &[PartitionPolynomial]) -> impl Iterator<Item = CoefficientRow> + '_ {
    polys.iter().flat_map(|p| {
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(move |(k, c)| CoefficientRow { n: p.n(), k, coefficient: c.to_string() })
    })
}

/// CSV with columns `n,k,coefficient`; zero coefficients are omitted.
pub fn write_coefficients_csv<W: Write>(polys: &[PartitionPolynomial], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows(polys) {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// JSON document `{family, rows: [{n, k, coefficient}]}` with decimal strings.
pub fn coefficients_json(seq: &ExponentSequence, polys: &[PartitionPolynomial]) -> serde_json::Value {
    let rows: Vec<CoefficientRow> = rows(polys).collect();
    serde_json::json!({
        "family": seq.label(),
        "rows": rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(values: &[i64]) -> Vec<Integer> {
        values.iter().map(|&v| Integer::from(v)).collect()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(ExponentSequence::all_parts().exponent(7), 1);
        let odd = ExponentSequence::odd_parts();
        assert_eq!(odd.exponent(4), 0);
        assert_eq!(odd.exponent(5), 1);
        let q5 = ExponentSequence::quadratic_units(5).unwrap();
        assert_eq!(q5.exponent(4), 1);
        assert_eq!(q5.exponent(3), 0);
    }

    #[test]
    fn constructors_validate() {
        assert!(ExponentSequence::residue(1, 1).is_err());
        assert!(ExponentSequence::residue(2, 4).is_err());
        assert!(ExponentSequence::residue(2, 3).is_err());
        assert!(ExponentSequence::residue(1, 3).is_ok());
        assert!(ExponentSequence::quadratic_units(2).is_err());
        assert!(ExponentSequence::explicit(&[2, 3]).is_err());
        let e = ExponentSequence::explicit(&[3, 1, 3]).unwrap();
        assert_eq!(e.parts_up_to(10), vec![1, 3]);
    }

    #[test]
    fn small_polynomials() {
        let all = generate(&ExponentSequence::all_parts(), 5).unwrap();
        assert_eq!(all[0].coeffs(), ints(&[0, 1]).as_slice());
        assert_eq!(all[3].coeffs(), ints(&[0, 1, 2, 1, 1]).as_slice());
        assert_eq!(all[4].value_at_one(), 7);
        let odd = generate(&ExponentSequence::odd_parts(), 4).unwrap();
        assert_eq!(odd[3].coeffs(), ints(&[0, 0, 1, 0, 1]).as_slice());
    }

    #[test]
    fn single_weight_matches_table() {
        for seq in [
            ExponentSequence::all_parts(),
            ExponentSequence::odd_parts(),
            ExponentSequence::residue(1, 4).unwrap(),
            ExponentSequence::quadratic_units(5).unwrap(),
        ] {
            let table = generate(&seq, 40).unwrap();
            for n in [1u64, 2, 7, 23, 40] {
                assert_eq!(generate_one(&seq, n).unwrap(), table[n as usize - 1], "{seq} n={n}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = generate_with_budget(&ExponentSequence::all_parts(), 100, 1000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn tail_series_starts_with_one() {
        let h = tail_series(&ExponentSequence::all_parts(), 5).unwrap();
        assert_eq!(h, ints(&[1, 1, 2, 3, 5, 7]));
        let odd = tail_series(&ExponentSequence::odd_parts(), 6).unwrap();
        // parts m with m + 1 odd, i.e. even m: 1, 0, 1, 0, 2, 0, 3
        assert_eq!(odd, ints(&[1, 0, 1, 0, 2, 0, 3]));
    }

    #[test]
    fn eval_examples() {
        let policy = PrecisionPolicy::default();
        let f4 = &generate(&ExponentSequence::all_parts(), 4).unwrap()[3];
        let at = |re: f64| eval(f4, &Complex::with_val(64, (re, 0.0)), &policy).unwrap();
        assert_eq!(*at(1.0).real(), 5);
        assert_eq!(*at(-1.0).real(), 1);
        assert!(at(0.0).is_zero());
    }

    #[test]
    fn rotation_support() {
        let odd = ExponentSequence::odd_parts();
        let f4 = generate_one(&odd, 4).unwrap();
        assert!(rotation_check(&odd, &f4));
        let r3 = ExponentSequence::residue(1, 3).unwrap();
        let f5 = generate_one(&r3, 5).unwrap();
        assert!(f5.support().iter().all(|k| k % 3 == 2));
        assert!(rotation_check(&r3, &f5));
        let mut corrupted = f4.coeffs().to_vec();
        corrupted[3] = Integer::from(1);
        assert!(!rotation_check(&odd, &PartitionPolynomial::from_coeffs(4, corrupted)));
    }

    #[test]
    fn csv_export_lists_nonzero_coefficients() {
        let polys = generate(&ExponentSequence::odd_parts(), 4).unwrap();
        let mut buf = Vec::new();
        write_coefficients_csv(&polys[3..], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,k,coefficient\n4,2,1\n4,4,1\n");
    }
}
