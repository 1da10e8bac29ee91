//! Phase functions `L_{h,k}` and the phase structure they induce.
//!
//! For every supported family `L_{h,k}(z)^2 = sum_j c_k(j) Li2(e_k(jh) z)`
//! collapses (by the Kubert identity) to a scaled dilogarithm of a rotated
//! power of `z`, stored here as a [`PhaseFunction`]. A point belongs to the
//! phase of whichever candidate has the largest `Re L`.

mod asymptotic;
mod cyclotomic;
mod fourier;

pub use asymptotic::{asymptotic_estimate, omega, omega_sum};
pub use cyclotomic::{cyclotomic_polynomial, Cyclotomic};
pub use fourier::{dirichlet_at_zero, fourier_data, residue_at_one, FourierData};

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::{LazyLock, RwLock};

use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{gcd, ExponentSequence, Family};
use crate::specfun::{dilog_unchecked, ensure_finite, int_pow, re_sqrt, root_of_unity, PrecisionPolicy, GUARD_BITS};

/// Default tolerance below which two `Re L` values count as tied.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;

/// A coprime pair `(h, k)` labelling one phase function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PhaseIndex {
    /// Order `k` comes first so the derived ordering is "smallest k, then h".
    pub k: u64,
    pub h: u64,
}

impl PhaseIndex {
    pub fn new(h: u64, k: u64) -> Self {
        PhaseIndex { k, h }
    }
}

impl fmt::Display for PhaseIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.h, self.k)
    }
}

/// One dilogarithm term `Li2(e_den(num) z^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DilogTerm {
    /// Rotation `e_den(num)`, with `0 <= num < den`.
    pub num: u64,
    pub den: u64,
    pub power: u32,
}

impl DilogTerm {
    fn new(num: i64, den: u64, power: u32) -> Self {
        let den = den.max(1);
        DilogTerm { num: num.rem_euclid(den as i64) as u64, den, power }
    }

    /// Angle of the rotation in radians.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * PI * self.num as f64 / self.den as f64
    }

    fn argument(&self, z: &Complex, wp: u32) -> Complex {
        let w = int_pow(z, self.power, wp);
        if self.num == 0 {
            w
        } else {
            w * root_of_unity(self.num as i64, self.den, wp)
        }
    }
}

/// Closed form `L_{h,k}(z)^2 = scale * sum_terms Li2(rotation * z^power)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseFunction {
    index: PhaseIndex,
    scale: Rational,
    terms: Vec<DilogTerm>,
}

impl PhaseFunction {
    pub fn index(&self) -> PhaseIndex {
        self.index
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn terms(&self) -> &[DilogTerm] {
        &self.terms
    }

    /// Whether two descriptors define the same function of `z`.
    pub fn same_function(&self, other: &PhaseFunction) -> bool {
        let mut a = self.terms.clone();
        let mut b = other.terms.clone();
        a.sort();
        b.sort();
        self.scale == other.scale && a == b
    }

    fn working_precision(policy: &PrecisionPolicy) -> u32 {
        policy.bits() + GUARD_BITS
    }

    fn check_disk(z: &Complex, policy: &PrecisionPolicy) -> Result<()> {
        ensure_finite(z, "phase function argument")?;
        let modulus = Float::with_val(policy.bits(), z.abs_ref());
        if modulus > Float::with_val(policy.bits(), policy.tol() + 1u32) {
            return Err(Error::Domain(format!(
                "phase function evaluated at |z| = {} outside the closed unit disk",
                modulus.to_f64()
            )));
        }
        Ok(())
    }

    fn l_squared_wp(&self, z: &Complex, wp: u32) -> Result<Complex> {
        let mut sum = Complex::new(wp);
        for term in &self.terms {
            sum += dilog_unchecked(&term.argument(z, wp), wp)?;
        }
        Ok(sum * &self.scale)
    }

    /// `L(z)^2` from the closed form.
    pub fn l_squared(&self, z: &Complex, policy: &PrecisionPolicy) -> Result<Complex> {
        Self::check_disk(z, policy)?;
        let wp = Self::working_precision(policy);
        Ok(Complex::with_val(policy.bits(), self.l_squared_wp(z, wp)?))
    }

    /// `L(z)`, the principal square root of `L(z)^2`.
    pub fn l(&self, z: &Complex, policy: &PrecisionPolicy) -> Result<Complex> {
        Self::check_disk(z, policy)?;
        let wp = Self::working_precision(policy);
        Ok(Complex::with_val(policy.bits(), self.l_squared_wp(z, wp)?.sqrt()))
    }

    /// `Re L(z) >= 0`.
    pub fn re_l(&self, z: &Complex, policy: &PrecisionPolicy) -> Result<Float> {
        Self::check_disk(z, policy)?;
        let wp = Self::working_precision(policy);
        Ok(Float::with_val(policy.bits(), re_sqrt(&self.l_squared_wp(z, wp)?)))
    }

    /// `(L(z), L'(z))` with `L' = (L^2)' / (2L)` and
    /// `d/dz Li2(rho z^q) = -q ln(1 - rho z^q) / z`.
    pub fn l_and_derivative(&self, z: &Complex, policy: &PrecisionPolicy) -> Result<(Complex, Complex)> {
        Self::check_disk(z, policy)?;
        if z.is_zero() {
            return Err(Error::Domain("L' is not evaluated at the origin".into()));
        }
        let wp = Self::working_precision(policy);
        let mut l_sq = Complex::new(wp);
        let mut d_sq = Complex::new(wp);
        for term in &self.terms {
            let w = term.argument(z, wp);
            l_sq += dilog_unchecked(&w, wp)?;
            let one_minus = Complex::with_val(wp, 1u32 - &w);
            if one_minus.is_zero() {
                return Err(Error::Domain("L' is singular where rho z^q = 1".into()));
            }
            d_sq -= one_minus.ln() * term.power;
        }
        l_sq *= &self.scale;
        d_sq = d_sq * &self.scale / z;
        let l = l_sq.sqrt();
        if l.is_zero() {
            return Err(Error::Domain("L' is singular where L = 0".into()));
        }
        let d = Complex::with_val(wp, &d_sq / Complex::with_val(wp, &l * 2u32));
        Ok((Complex::with_val(policy.bits(), l), Complex::with_val(policy.bits(), d)))
    }

    /// Angular distance (in `arg z`) to the nearest ray on which some term's
    /// argument `rho z^q` is negative real, where `Re L` stops being smooth.
    pub fn branch_distance(&self, re: f64, im: f64) -> f64 {
        let theta = im.atan2(re);
        self.terms
            .iter()
            .map(|t| {
                let q = t.power as f64;
                let phase = q * theta + t.rotation_angle() - PI;
                let wrapped = phase - 2.0 * PI * (phase / (2.0 * PI)).round();
                wrapped.abs() / q
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Closed-form phase function for index `(h, k)` of `seq`.
///
/// - all parts: `Li2(z^k) / k^2`;
/// - parts `= a (mod p)`, `g = (k, p)`: `(g^2/(k^2 p)) Li2(e_g(ha) z^{k/g})`;
/// - quadratic units mod `p`: `(g^2/(k^2 p)) [Li2(e_g(h) z^{k/g}) + Li2(e_g(-h) z^{k/g})]`.
pub fn phase_function(seq: &ExponentSequence, h: u64, k: u64) -> Result<PhaseFunction> {
    if k == 0 {
        return Err(Error::Domain("phase index needs k >= 1".into()));
    }
    let g_hk = gcd(h, k);
    if g_hk != 1 {
        return Err(Error::Gcd { h, k, gcd: g_hk });
    }
    let index = PhaseIndex::new(h, k);
    let k2 = Rational::from(k * k);
    let pf = match seq.family() {
        Family::AllParts => PhaseFunction {
            index,
            scale: Rational::from(1) / k2,
            terms: vec![DilogTerm::new(0, 1, k as u32)],
        },
        Family::Residue { a, p } => {
            let g = gcd(k, *p);
            PhaseFunction {
                index,
                scale: Rational::from((g * g, 1)) / (k2 * p),
                terms: vec![DilogTerm::new((h * a) as i64, g, (k / g) as u32)],
            }
        }
        Family::QuadraticUnits { p } => {
            let g = gcd(k, *p);
            PhaseFunction {
                index,
                scale: Rational::from((g * g, 1)) / (k2 * p),
                terms: vec![
                    DilogTerm::new(h as i64, g, (k / g) as u32),
                    DilogTerm::new(-(h as i64), g, (k / g) as u32),
                ],
            }
        }
        Family::Explicit(_) => {
            return Err(Error::UnsupportedFamily(format!(
                "finite part lists have no phase functions ({seq})"
            )))
        }
    };
    Ok(pf)
}

static QUADRATIC_CANDIDATES: LazyLock<RwLock<HashMap<u64, Vec<PhaseIndex>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// The finite list of indices whose `Re L` maxima decide every phase.
///
/// - all parts: `k = 1, 2, 3`;
/// - odd parts: `k = 1, 2, 4`;
/// - parts `= 1 (mod p)`, `p >= 3`: one wedge function `Li2(e_p(h) z)/p` per
///   `h in Z_p`, written with the coprime index `(h/(h,p), p/(h,p))`;
/// - quadratic units: all coprime `(h, k)` with `k <= 3p`, deduplicated by
///   function and pruned to those that win somewhere on a fixed polar grid.
pub fn candidates(seq: &ExponentSequence) -> Result<Vec<PhaseIndex>> {
    let list = match seq.family() {
        Family::AllParts => vec![PhaseIndex::new(1, 1), PhaseIndex::new(1, 2), PhaseIndex::new(1, 3)],
        Family::Residue { a: 1, p: 2 } => {
            vec![PhaseIndex::new(1, 1), PhaseIndex::new(1, 2), PhaseIndex::new(1, 4)]
        }
        Family::Residue { p, .. } => {
            let mut out: Vec<PhaseIndex> = (0..*p)
                .map(|h| {
                    if h == 0 {
                        PhaseIndex::new(1, 1)
                    } else {
                        let g = gcd(h, *p);
                        PhaseIndex::new(h / g, p / g)
                    }
                })
                .collect();
            out.sort();
            out
        }
        Family::QuadraticUnits { p } => quadratic_candidates(seq, *p)?,
        Family::Explicit(_) => {
            return Err(Error::UnsupportedFamily(format!("no candidate list for {seq}")));
        }
    };
    Ok(list)
}

fn quadratic_candidates(seq: &ExponentSequence, p: u64) -> Result<Vec<PhaseIndex>> {
    if let Some(hit) = QUADRATIC_CANDIDATES.read().expect("candidate cache poisoned").get(&p) {
        return Ok(hit.clone());
    }
    let mut unique: Vec<PhaseFunction> = Vec::new();
    for k in 1..=3 * p {
        for h in 1..=k {
            if gcd(h, k) != 1 {
                continue;
            }
            let pf = phase_function(seq, h, k)?;
            if !unique.iter().any(|u| u.same_function(&pf)) {
                unique.push(pf);
            }
        }
    }
    let policy = PrecisionPolicy::new(64, 1e-12)?;
    let mut wins = vec![false; unique.len()];
    wins[0] = true;
    let radii = [0.1, 0.25, 0.4, 0.55, 0.7, 0.8, 0.9, 0.95, 0.99];
    let angles = 144;
    for &r in &radii {
        for a in 0..angles {
            let t = 2.0 * PI * (a as f64 + 0.5) / angles as f64;
            let z = Complex::with_val(64, (r * t.cos(), r * t.sin()));
            let mut best = (0usize, f64::NEG_INFINITY);
            for (i, pf) in unique.iter().enumerate() {
                let v = pf.re_l(&z, &policy)?.to_f64();
                if v > best.1 {
                    best = (i, v);
                }
            }
            wins[best.0] = true;
        }
    }
    let mut kept: Vec<PhaseIndex> =
        unique.iter().zip(&wins).filter(|(_, w)| **w).map(|(pf, _)| pf.index()).collect();
    kept.sort();
    QUADRATIC_CANDIDATES
        .write()
        .expect("candidate cache poisoned")
        .insert(p, kept.clone());
    Ok(kept)
}

/// Phase functions of every candidate, in candidate order.
pub fn candidate_functions(seq: &ExponentSequence) -> Result<Vec<PhaseFunction>> {
    candidates(seq)?.into_iter().map(|i| phase_function(seq, i.h, i.k)).collect()
}

/// Outcome of comparing every candidate's `Re L` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseVerdict {
    pub winner: PhaseIndex,
    /// Best competitor (absent when there is a single candidate).
    pub runner_up: Option<PhaseIndex>,
    /// `Re L(winner) - Re L(runner_up)`, never negative.
    pub margin: f64,
    /// `margin < boundary_tol`.
    pub tie: bool,
}

/// Decides the phase of `z` in the punctured open disk.
///
/// Ties in value resolve to the smallest `k`, then the smallest `h`.
pub fn classify(
    seq: &ExponentSequence,
    z: &Complex,
    boundary_tol: f64,
    policy: &PrecisionPolicy,
) -> Result<PhaseVerdict> {
    let functions = candidate_functions(seq)?;
    classify_with(&functions, z, boundary_tol, policy)
}

/// [`classify`] against a precomputed candidate list.
pub fn classify_with(
    functions: &[PhaseFunction],
    z: &Complex,
    boundary_tol: f64,
    policy: &PrecisionPolicy,
) -> Result<PhaseVerdict> {
    ensure_finite(z, "classification point")?;
    let modulus = Float::with_val(policy.bits(), z.abs_ref());
    if z.is_zero() || modulus >= 1 {
        return Err(Error::Domain(format!(
            "classify needs 0 < |z| < 1, got |z| = {}",
            modulus.to_f64()
        )));
    }
    let mut ordered: Vec<&PhaseFunction> = functions.iter().collect();
    ordered.sort_by_key(|pf| pf.index());
    let mut values = Vec::with_capacity(ordered.len());
    for pf in &ordered {
        values.push(pf.re_l(z, policy)?);
    }
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    let mut second: Option<usize> = None;
    for i in 0..values.len() {
        if i != best && second.is_none_or(|s| values[i] > values[s]) {
            second = Some(i);
        }
    }
    let margin = match second {
        Some(s) => Float::with_val(policy.bits(), &values[best] - &values[s]).to_f64(),
        None => f64::INFINITY,
    };
    Ok(PhaseVerdict {
        winner: ordered[best].index(),
        runner_up: second.map(|s| ordered[s].index()),
        margin,
        tie: margin < boundary_tol,
    })
}

/// One row of a phase map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSample {
    pub re: f64,
    pub im: f64,
    pub winner_k: u64,
    pub winner_h: u64,
    pub margin: f64,
    pub tie: bool,
}

/// CSV with columns `re,im,winner_k,winner_h,margin,tie`.
pub fn write_phase_map_csv<W: Write>(samples: &[PhaseSample], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for s in samples {
        writer.serialize(s)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{complex, root_dilog};

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn all_parts_closed_form_is_root_dilog() {
        let seq = ExponentSequence::all_parts();
        let p = policy();
        let z = complex(-0.4, 0.55, 128);
        for k in 1..=3u32 {
            let pf = phase_function(&seq, 1, k as u64).unwrap();
            let a = pf.re_l(&z, &p).unwrap();
            let b = root_dilog(k, &z, &p).unwrap();
            assert!(Float::with_val(128, a - b).abs() < 1e-30);
        }
    }

    #[test]
    fn gcd_is_checked() {
        let err = phase_function(&ExponentSequence::all_parts(), 2, 4).unwrap_err();
        assert_eq!(err, Error::Gcd { h: 2, k: 4, gcd: 2 });
    }

    #[test]
    fn candidate_lists() {
        let all = candidates(&ExponentSequence::all_parts()).unwrap();
        assert_eq!(all.iter().map(|i| i.k).collect::<Vec<_>>(), vec![1, 2, 3]);
        let odd = candidates(&ExponentSequence::odd_parts()).unwrap();
        assert_eq!(odd.iter().map(|i| i.k).collect::<Vec<_>>(), vec![1, 2, 4]);
        let r5 = candidates(&ExponentSequence::residue(1, 5).unwrap()).unwrap();
        assert_eq!(r5.len(), 5);
        let r6 = candidate_functions(&ExponentSequence::residue(1, 6).unwrap()).unwrap();
        for (i, a) in r6.iter().enumerate() {
            for b in &r6[i + 1..] {
                assert!(!a.same_function(b));
            }
        }
    }

    #[test]
    fn classify_examples() {
        let p = policy();
        let all = ExponentSequence::all_parts();
        let v = classify(&all, &complex(0.5, 0.0, 128), DEFAULT_BOUNDARY_TOL, &p).unwrap();
        assert_eq!(v.winner.k, 1);
        let v = classify(&all, &complex(-0.9, 0.0, 128), DEFAULT_BOUNDARY_TOL, &p).unwrap();
        assert_eq!(v.winner.k, 2);
        let odd = ExponentSequence::odd_parts();
        let v = classify(&odd, &complex(0.0, 0.99, 128), DEFAULT_BOUNDARY_TOL, &p).unwrap();
        assert_eq!(v.winner.k, 4);
        assert!(classify(&all, &complex(0.0, 0.0, 128), 1e-9, &p).is_err());
        assert!(classify(&all, &complex(1.0, 0.0, 128), 1e-9, &p).is_err());
    }

    #[test]
    fn branch_distance_vanishes_on_negative_axis() {
        let pf = phase_function(&ExponentSequence::all_parts(), 1, 1).unwrap();
        assert!(pf.branch_distance(-0.5, 0.0) < 1e-15);
        assert!((pf.branch_distance(0.0, 0.5) - PI / 2.0).abs() < 1e-12);
        let pf2 = phase_function(&ExponentSequence::all_parts(), 1, 2).unwrap();
        assert!(pf2.branch_distance(0.0, 0.5) < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = policy();
        let pf = phase_function(&ExponentSequence::odd_parts(), 1, 4).unwrap();
        let z = complex(0.3, 0.45, 128);
        let (_, d) = pf.l_and_derivative(&z, &p).unwrap();
        let h = 1e-12;
        let step = Float::with_val(128, h);
        let plus = pf.l(&Complex::with_val(128, &z + &step), &p).unwrap();
        let minus = pf.l(&Complex::with_val(128, &z - &step), &p).unwrap();
        let fd = Complex::with_val(128, &plus - &minus) / (2.0 * h);
        let err = Complex::with_val(128, &fd - &d);
        assert!(Float::with_val(128, err.abs_ref()) < 1e-10);
    }
}
