//! Zeros of partition polynomials by simultaneous (Aberth–Ehrlich) iteration.
//!
//! The factor `z^m` at the origin is split off and exponent gaps are folded:
//! when every remaining exponent is `m + g i`, the iteration runs on
//! `Q(w) = sum a_{m+gi} w^i` and each zero `w` yields the `g` roots `w^{1/g}`.
//! Starting points come from the Newton polygon of `|a_i|`. A double-precision
//! pass brings them close, then the big-float pass finishes at a working
//! precision that grows with the coefficient size.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::PartitionPolynomial;
use crate::specfun::{ensure_finite, PrecisionPolicy};

/// Settings for [`find_roots`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootOptions {
    /// Lower bound for the working precision; the finder adds headroom for large coefficients.
    pub policy: PrecisionPolicy,
    /// Seed for the jitter applied to the starting points.
    pub seed: u64,
    /// Sweeps allowed at one precision before it is raised.
    pub max_sweeps: usize,
    /// How many times the precision may double after stagnation.
    pub max_escalations: u32,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { policy: PrecisionPolicy::default(), seed: 0x5eed, max_sweeps: 400, max_escalations: 3 }
    }
}

/// All zeros of one polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub n: u64,
    pub degree: usize,
    pub zero_multiplicity_at_origin: usize,
    /// Nonzero roots, `degree - zero_multiplicity_at_origin` of them.
    pub roots: Vec<Complex>,
    /// Relative backward error at each root.
    pub residuals: Vec<f64>,
    /// Largest entry of `residuals`.
    pub residual_bound: f64,
    pub precision_bits: u32,
    /// Total big-float sweeps.
    pub iterations: usize,
}

impl RootSet {
    pub fn roots_f64(&self) -> Vec<(f64, f64)> {
        self.roots.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(abs_f64).fold(0.0, f64::max)
    }
}

/// The folded problem `z^m Q(z^g)`.
struct Reduced {
    m: usize,
    g: usize,
    q: Vec<Integer>,
}

fn reduce(poly: &PartitionPolynomial) -> Reduced {
    let support = poly.support();
    let m = poly.origin_multiplicity();
    let g = support.iter().map(|&e| e - m).fold(0usize, gcd_usize).max(1);
    let q = (0..=(poly.degree() - m) / g).map(|i| poly.coeff(m + g * i)).collect();
    Reduced { m, g, q }
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

fn log_abs(c: &Integer) -> f64 {
    if *c == 0 {
        f64::NEG_INFINITY
    } else {
        Float::with_val(64, c).abs().ln().to_f64()
    }
}

/// Starting points for the zeros of `sum coeffs[i] z^i` (`coeffs[0] != 0`).
///
/// Each edge of the upper convex hull of `(i, ln|a_i|)` from `i` to `j`
/// contributes `j - i` points on the circle of radius
/// `(|a_i| / |a_j|)^{1/(j-i)}`, evenly spaced with a random rotation.
pub fn initial_guesses(coeffs: &[Integer], seed: u64) -> Vec<Complex64> {
    let pts: Vec<(usize, f64)> =
        coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i, log_abs(c))).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(coeffs.len().saturating_sub(1));
    for edge in hull.windows(2) {
        let (i, li) = edge[0];
        let (j, lj) = edge[1];
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        let offset: f64 = rng.random_range(0.0..2.0 * PI);
        for t in 0..count {
            let jitter: f64 = rng.random_range(-0.1..0.1);
            let angle = offset + 2.0 * PI * (t as f64 + 0.5 + jitter) / count as f64;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// `p(z) / p'(z)` in double precision, through the reversed polynomial when `|z| > 1`.
fn newton_ratio_f64(a: &[f64], z: Complex64) -> Complex64 {
    let d = a.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = Complex64::new(a[d], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in a[..d].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    } else {
        let w = z.inv();
        let mut r = Complex64::new(a[0], 0.0);
        let mut dr = Complex64::new(0.0, 0.0);
        for &c in &a[1..] {
            dr = dr * w + r;
            r = r * w + c;
        }
        // p(z) = z^d r(w) gives p/p' = z / (d - w r'(w)/r(w))
        z / (d as f64 - w * dr / r)
    }
}

fn aberth_f64(q: &[Integer], mut z: Vec<Complex64>) -> Vec<Complex64> {
    let scale = q.iter().map(log_abs).fold(f64::NEG_INFINITY, f64::max);
    let a: Vec<f64> = q
        .iter()
        .map(|c| if *c == 0 { 0.0 } else { (log_abs(c) - scale).exp() * f64::from(c.cmp0() as i8) })
        .collect();
    let mut done = vec![false; z.len()];
    for _ in 0..500 {
        let mut all_done = true;
        for i in 0..z.len() {
            if done[i] {
                continue;
            }
            let ratio = newton_ratio_f64(&a, z[i]);
            let s: Complex64 = (0..z.len()).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
            }
            if step.norm() <= 1e-13 * z[i].norm().max(1.0) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z
}

fn newton_ratio_big(q: &[Integer], z: &Complex, wp: u32) -> Complex {
    let d = q.len() - 1;
    let mut p = Complex::with_val(wp, &q[d]);
    let mut dp = Complex::new(wp);
    for c in q[..d].iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
    }
    p / dp
}

fn abs_f64(z: &Complex) -> f64 {
    Float::with_val(53, z.abs_ref()).to_f64()
}

enum Outcome {
    Converged(usize),
    Stagnated(usize),
}

/// Jacobi-style Aberth sweeps at `wp` bits, updating `roots` in place.
///
/// The Newton ratio `p/p'` is evaluated at full precision. The repulsion sum
/// `sum 1/(z_i - z_j)` only rescales the step by `1/(1 - ratio sum)`, which
/// tends to one near convergence, so it is formed in double precision. Roots
/// that meet the target are frozen.
fn aberth_big(q: &[Integer], roots: &mut [Complex], wp: u32, max_sweeps: usize) -> Outcome {
    let conv_exp = -(wp as i32 / 2);
    let stall = 2f64.powi(-(wp as i32 / 4));
    let mut stalled = 0;
    let mut done = vec![false; roots.len()];
    for sweep in 1..=max_sweeps {
        let approx: Vec<Complex64> =
            roots.iter().map(|z| Complex64::new(z.real().to_f64(), z.imag().to_f64())).collect();
        let updates: Vec<Option<(Complex, bool, f64)>> = roots
            .par_iter()
            .enumerate()
            .map(|(i, zi)| {
                if done[i] {
                    return None;
                }
                let ratio = newton_ratio_big(q, zi, wp);
                let s: Complex64 =
                    approx.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, zj)| (approx[i] - zj).inv()).sum();
                let s = Complex::with_val(wp, (s.re, s.im));
                let denom = Complex::with_val(wp, 1 - Complex::with_val(wp, &ratio * &s));
                let step = ratio / denom;
                let scale = abs_f64(zi).max(1.0);
                let bound = Float::with_val(wp, Float::i_exp(1, conv_exp)) * scale;
                let ok = Float::with_val(53, step.abs_ref()) <= bound;
                let finite = step.real().is_finite() && step.imag().is_finite();
                let next = if finite { Complex::with_val(wp, zi - &step) } else { Complex::with_val(wp, zi) };
                let moved = if finite { abs_f64(&step) / scale } else { f64::INFINITY };
                Some((next, ok, moved))
            })
            .collect();
        let mut biggest: f64 = 0.0;
        for (i, update) in updates.into_iter().enumerate() {
            if let Some((next, ok, moved)) = update {
                roots[i] = next;
                done[i] = ok;
                biggest = biggest.max(moved);
            }
        }
        if done.iter().all(|&d| d) {
            return Outcome::Converged(sweep);
        }
        if biggest < stall {
            stalled += 1;
            if stalled >= 3 {
                return Outcome::Stagnated(sweep);
            }
        } else {
            stalled = 0;
        }
    }
    Outcome::Stagnated(max_sweeps)
}

/// Relative backward error `|p(z)| / sum |a_i| |z|^i` at each root.
pub fn residuals(poly: &PartitionPolynomial, roots: &[Complex], policy: &PrecisionPolicy) -> Result<Vec<f64>> {
    let wp = policy.bits().max(poly.max_coeff_bits() + 64);
    roots
        .iter()
        .map(|z| {
            ensure_finite(z, "root")?;
            let r = Float::with_val(wp, z.abs_ref());
            let mut p = Complex::new(wp);
            let mut m = Float::new(wp);
            for c in poly.coeffs().iter().rev() {
                p *= z;
                p += c;
                m *= &r;
                m += Float::with_val(wp, c).abs();
            }
            if m.is_zero() {
                return Ok(0.0);
            }
            Ok((Float::with_val(wp, p.abs_ref()) / m).to_f64())
        })
        .collect()
}

/// Every zero of `poly`, with its origin multiplicity reported separately.
pub fn find_roots(poly: &PartitionPolynomial, options: &RootOptions) -> Result<RootSet> {
    let degree = poly.degree();
    let red = reduce(poly);
    let q_deg = red.q.len() - 1;
    let mut bits = options.policy.bits().max(poly.max_coeff_bits() + 64);
    let mut iterations = 0;

    let mut w: Vec<Complex> = if q_deg == 0 {
        Vec::new()
    } else {
        let start = aberth_f64(&red.q, initial_guesses(&red.q, options.seed));
        start.iter().map(|c| Complex::with_val(bits, (c.re, c.im))).collect()
    };

    if !w.is_empty() {
        let mut escalations = 0;
        loop {
            match aberth_big(&red.q, &mut w, bits, options.max_sweeps) {
                Outcome::Converged(s) => {
                    iterations += s;
                    break;
                }
                Outcome::Stagnated(s) => {
                    iterations += s;
                    if escalations == options.max_escalations {
                        return Err(Error::Convergence(format!(
                            "Aberth iteration for n = {} stagnated at {bits} bits",
                            poly.n()
                        )));
                    }
                    escalations += 1;
                    bits *= 2;
                    for z in &mut w {
                        z.set_prec(bits);
                    }
                }
            }
        }
    }

    let roots = unfold(&w, red.g, bits);
    let policy = PrecisionPolicy::with_bits(bits)?;
    let per_root = residuals(poly, &roots, &policy)?;
    let residual_bound = per_root.iter().copied().fold(0.0, f64::max);
    Ok(RootSet {
        n: poly.n(),
        degree,
        zero_multiplicity_at_origin: red.m,
        roots,
        residuals: per_root,
        residual_bound,
        precision_bits: bits,
        iterations,
    })
}

/// All `g`-th roots of each `w`.
fn unfold(w: &[Complex], g: usize, bits: u32) -> Vec<Complex> {
    if g == 1 {
        return w.to_vec();
    }
    let wp = bits + 16;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let mut out = Vec::with_capacity(w.len() * g);
    for wi in w {
        let r = Float::with_val(wp, wi.abs_ref()).root(g as u32);
        let arg = Float::with_val(wp, wi.arg_ref()) / g as u32;
        for j in 0..g {
            let t = Float::with_val(wp, &arg + Float::with_val(wp, &two_pi * j as u32) / g as u32);
            let (s, c) = t.sin_cos(Float::new(wp));
            out.push(Complex::with_val(bits, (c * &r, s * &r)));
        }
    }
    out
}

/// Newton steps on the full polynomial at `bits`, at most `steps` per root.
pub fn polish(poly: &PartitionPolynomial, roots: &[Complex], bits: u32, steps: usize) -> Vec<Complex> {
    let coeffs = poly.coeffs();
    let target = Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 8));
    roots
        .par_iter()
        .map(|z0| {
            let mut z = Complex::with_val(bits, z0);
            for _ in 0..steps {
                let step = newton_ratio_big(coeffs, &z, bits);
                if !(step.real().is_finite() && step.imag().is_finite()) {
                    break;
                }
                z -= &step;
                let scale = Float::with_val(bits, z.abs_ref()).max(&Float::with_val(bits, 1));
                if Float::with_val(bits, step.abs_ref()) <= Float::with_val(bits, &target * &scale) {
                    break;
                }
            }
            z
        })
        .collect()
}

/// Coefficients of `lead z^m prod (z - r_i)`, lowest degree first, at `bits`.
pub fn reconstruct(set: &RootSet, lead: &Integer, bits: u32) -> Vec<Complex> {
    let mut c = vec![Complex::with_val(bits, 1)];
    for r in &set.roots {
        let mut next = vec![Complex::new(bits); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= Complex::with_val(bits, ci * r);
        }
        c = next;
    }
    let mut out = vec![Complex::new(bits); set.zero_multiplicity_at_origin];
    out.extend(c.into_iter().map(|x| x * lead));
    out
}

/// Largest `|c_k - a_k| / max(|a_k|, 1)` between the reconstructed and the true coefficients.
///
/// Expanding the product cancels about `d log2(1 + max |r_i|)` bits, so the
/// roots are first polished at a precision that covers the cancellation.
pub fn reconstruction_error(poly: &PartitionPolynomial, set: &RootSet) -> Result<f64> {
    if set.roots.len() + set.zero_multiplicity_at_origin != poly.degree() {
        return Err(Error::Domain("root count does not match the degree".into()));
    }
    let growth = (1.0 + set.max_modulus()).log2() * set.roots.len() as f64;
    let bits = set.precision_bits.max(poly.max_coeff_bits() + growth.ceil() as u32 + 96);
    let polished = RootSet { roots: polish(poly, &set.roots, bits, 12), ..set.clone() };
    let lead = poly.coeff(poly.degree());
    let rebuilt = reconstruct(&polished, &lead, bits);
    let mut worst: f64 = 0.0;
    for (k, c) in rebuilt.iter().enumerate() {
        let a = poly.coeff(k);
        let diff = Float::with_val(bits, Complex::with_val(bits, c - &a).abs_ref());
        let denom = Float::with_val(bits, &a).abs().max(&Float::with_val(bits, 1));
        worst = worst.max((diff / denom).to_f64());
    }
    Ok(worst)
}

/// [`find_roots`] over several polynomials in parallel.
pub fn find_roots_many(polys: &[PartitionPolynomial], options: &RootOptions) -> Result<Vec<RootSet>> {
    polys.par_iter().map(|p| find_roots(p, options)).collect()
}

#[derive(Serialize)]
struct RootRecord {
    n: u64,
    degree: usize,
    zero_multiplicity_at_origin: usize,
    residual_bound: f64,
    precision_bits: u32,
    iterations: usize,
    roots: Vec<[f64; 2]>,
}

/// JSON array of root sets with `f64` coordinates.
pub fn roots_json(sets: &[RootSet]) -> serde_json::Value {
    let records: Vec<RootRecord> = sets
        .iter()
        .map(|s| RootRecord {
            n: s.n,
            degree: s.degree,
            zero_multiplicity_at_origin: s.zero_multiplicity_at_origin,
            residual_bound: s.residual_bound,
            precision_bits: s.precision_bits,
            iterations: s.iterations,
            roots: s.roots_f64().into_iter().map(|(x, y)| [x, y]).collect(),
        })
        .collect();
    serde_json::json!({ "root_sets": records })
}

/// CSV `n,re,im,residual`, one row per nonzero root.
pub fn write_roots_csv<W: Write>(sets: &[RootSet], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["n", "re", "im", "residual"])?;
    for s in sets {
        for ((x, y), r) in s.roots_f64().into_iter().zip(&s.residuals) {
            writer.write_record([s.n.to_string(), format!("{x:.17e}"), format!("{y:.17e}"), format!("{r:.3e}")])?;
        }
    }
    writer.flush()?;
    Ok(())
}
