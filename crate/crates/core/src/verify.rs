//! The invariant suite behind `verify`: special-function anchors and
//! identities, root-dilogarithm inequalities, exact combinatorics, Fourier
//! tables, phase symmetries, root sets, asymptotics and curves.
//!
//! Every check reports how many cases it evaluated, how many violated the
//! property, and the worst signed excess (negative means the property held
//! with margin).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::curve::{attractor_set, find_beta, triple_point, CurvePolyline};
use crate::error::Result;
use crate::harness::asymptotic_report;
use crate::partition::{generate, tail_series, ExponentSequence, Family};
use crate::phase::{
    candidate_functions, classify_with, fourier_data, omega, phase_function, PhaseIndex, DEFAULT_BOUNDARY_TOL,
};
use crate::roots::{find_roots, reconstruction_error, RootOptions};
use crate::specfun::{catalan, clausen2, complex, dilog, int_pow, root_dilog, root_of_unity, PrecisionPolicy};

/// Slack for non-strict inequalities evaluated at 128 bits.
pub const INEQUALITY_SLACK: f64 = 1e-25;

/// Outcome of one property over its sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub evaluated: usize,
    pub violations: usize,
    /// Largest signed excess over the allowed bound.
    pub worst: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.evaluated > 0
    }
}

struct Tally {
    check: Check,
}

impl Tally {
    fn new(group: &str, name: impl Into<String>) -> Self {
        Tally {
            check: Check {
                group: group.into(),
                name: name.into(),
                evaluated: 0,
                violations: 0,
                worst: f64::NEG_INFINITY,
            },
        }
    }

    fn push(&mut self, excess: f64, violated: bool) {
        self.check.evaluated += 1;
        if violated || excess.is_nan() {
            self.check.violations += 1;
        }
        if excess.is_nan() {
            self.check.worst = f64::NAN;
        } else if !self.check.worst.is_nan() {
            self.check.worst = self.check.worst.max(excess);
        }
    }

    /// `lhs <= rhs` up to [`INEQUALITY_SLACK`].
    fn le(&mut self, lhs: &Float, rhs: &Float) {
        let d = Float::with_val(lhs.prec().max(rhs.prec()), lhs - rhs).to_f64();
        self.push(d, d > INEQUALITY_SLACK);
    }

    /// `lhs < rhs`.
    fn lt(&mut self, lhs: &Float, rhs: &Float) {
        let d = Float::with_val(lhs.prec().max(rhs.prec()), lhs - rhs).to_f64();
        self.push(d, d >= 0.0);
    }

    /// `value <= tol`.
    fn within(&mut self, value: f64, tol: f64) {
        self.push(value - tol, !(value <= tol));
    }

    fn truth(&mut self, ok: bool) {
        self.push(if ok { -1.0 } else { 1.0 }, !ok);
    }

    fn done(self) -> Check {
        self.check
    }
}

/// A full `verify` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub max_n: u64,
    pub precision_bits: u32,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

fn cdist(a: &Complex, b: &Complex) -> f64 {
    cabs(&Complex::with_val(a.prec().0, a - b)).to_f64()
}

/// `r e^{it}` rounded at `bits`, so `r = 1` lands on the circle to working precision.
fn polar(r: f64, t: f64, bits: u32) -> Complex {
    let t = Float::with_val(bits, t);
    let (s, c) = t.sin_cos(Float::new(bits));
    Complex::with_val(bits, (c * r, s * r))
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
}

/// Closed-form values: `Li2(1) = pi^2/6`, `Li2(-1) = -pi^2/12`,
/// `Li2(i) = -pi^2/48 + iG`, `Cl2(pi/2) = -G`, `Cl2(pi) = 0`, and
/// `f_1(i) = sqrt((|w| + Re w)/2)` with `w = -pi^2/48 + iG`.
pub fn special_function_checks(policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let b = policy.bits();
    let g = catalan(policy)?;
    let pi2 = Float::with_val(b, pi(b).square());
    let w = Complex::with_val(b, (Float::with_val(b, -Float::with_val(b, &pi2 / 48u32)), g.clone()));
    let cases: Vec<(&str, Complex, Complex)> = vec![
        ("Li2(1) = pi^2/6", dilog(&complex(1.0, 0.0, b), policy)?, Complex::with_val(b, &pi2 / 6u32)),
        ("Li2(-1) = -pi^2/12", dilog(&complex(-1.0, 0.0, b), policy)?, Complex::with_val(b, -Float::with_val(b, &pi2 / 12u32))),
        ("Li2(i) = -pi^2/48 + iG", dilog(&complex(0.0, 1.0, b), policy)?, w.clone()),
        (
            "Cl2(pi/2) = -G",
            Complex::with_val(b, clausen2(&Float::with_val(b, pi(b) / 2u32), policy)?),
            Complex::with_val(b, -&g),
        ),
        ("Cl2(pi) = 0", Complex::with_val(b, clausen2(&pi(b), policy)?), Complex::new(b)),
        (
            "f_1(i) closed form",
            Complex::with_val(b, root_dilog(1, &complex(0.0, 1.0, b), policy)?),
            Complex::with_val(b, (Float::with_val(b, cabs(&w) + w.real()) / 2u32).sqrt()),
        ),
    ];
    Ok(cases
        .into_iter()
        .map(|(name, got, want)| {
            let mut t = Tally::new("special functions", name);
            t.within(cdist(&got, &want), 1e-12);
            t.done()
        })
        .collect())
}

/// `arg Li2(i)`, `cos(theta/2)`, `sin(theta/2)` against their quoted decimals to `1e-4`.
pub fn numeric_anchor_checks(policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let li = dilog(&complex(0.0, 1.0, policy.bits()), policy)?;
    let theta = Float::with_val(policy.bits(), li.arg_ref()).to_f64();
    let cases = [
        ("arg Li2(i) = 1.79161", theta, 1.79161),
        ("cos(theta(1)/2) = 0.62488", (theta / 2.0).cos(), 0.62488),
        ("sin(theta(1)/2) = 0.78071", (theta / 2.0).sin(), 0.78071),
    ];
    Ok(cases
        .iter()
        .map(|&(name, got, want)| {
            let mut t = Tally::new("numeric anchors", name);
            t.within((got - want).abs(), 1e-4);
            t.done()
        })
        .collect())
}

/// Uniform points of the disk `|z| <= radius`.
pub fn random_disk(count: usize, radius: f64, seed: u64, bits: u32) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            polar(r, rng.random_range(0.0..2.0 * PI), bits)
        })
        .collect()
}

/// Kubert (`k = 2..=6`), reflection and conjugation identities at `count` random points.
pub fn identity_checks(policy: &PrecisionPolicy, count: usize, seed: u64) -> Result<Vec<Check>> {
    const TOL: f64 = 1e-20;
    let b = policy.bits();
    let points = random_disk(count, 0.99, seed, b);
    let mut out = Vec::new();

    for k in 2..=6u64 {
        let mut t = Tally::new("identities", format!("Kubert k={k}"));
        for z in &points {
            let mut sum = Complex::new(b);
            for m in 1..=k {
                sum += dilog(&Complex::with_val(b, z * root_of_unity(m as i64, k, b)), policy)?;
            }
            let rhs = dilog(&int_pow(z, k as u32, b), policy)? / k as u32;
            t.within(cdist(&sum, &Complex::with_val(b, rhs)), TOL);
        }
        out.push(t.done());
    }

    let mut t = Tally::new("identities", "conjugation Li2(conj z) = conj Li2(z)");
    for z in &points {
        let a = dilog(&Complex::with_val(b, z.conj_ref()), policy)?;
        let c = dilog(z, policy)?;
        t.within(cdist(&a, &Complex::with_val(b, c.conj_ref())), TOL);
    }
    out.push(t.done());

    // Reflection needs both z and 1 - z in the disk.
    let mut t = Tally::new("identities", "reflection Li2(z) + Li2(1-z) = pi^2/6 - ln z ln(1-z)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let mut used = 0;
    while used < count {
        let (x, y) = (rng.random_range(0.0..1.0), rng.random_range(-0.87..0.87));
        if f64::hypot(x, y) > 0.99 || f64::hypot(1.0 - x, y) > 0.99 || f64::hypot(x, y) < 1e-3 {
            continue;
        }
        used += 1;
        let z = complex(x, y, b);
        let one_minus = Complex::with_val(b, 1 - &z);
        let lhs = Complex::with_val(b, dilog(&z, policy)? + dilog(&one_minus, policy)?);
        let logs = Complex::with_val(b, z.ln_ref()) * Complex::with_val(b, one_minus.ln_ref());
        let rhs = Complex::with_val(b, Float::with_val(b, pi(b).square()) / 6u32) - logs;
        let scale = cabs(&rhs).to_f64().max(1.0);
        t.within(cdist(&lhs, &rhs) / scale, TOL);
    }
    out.push(t.done());
    Ok(out)
}

/// The root-dilogarithm inequalities: dominance parts 1–4, monotonicity on
/// circles, the imaginary-axis calculus, the modulus bounds and the five direct
/// comparisons.
pub fn inequality_checks(policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let b = policy.bits();
    let f = |k: u32, z: &Complex| root_dilog(k, z, policy);
    let mut out = Vec::new();
    let radii: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let angles = 180;

    // Part 1: f_k(z) <= f_k(|z|) <= f_2(|z|) < f_1(z), k >= 2, |arg z| <= pi/3.
    let mut a = Tally::new("dominance", "part 1: f_k(z) <= f_k(|z|)");
    let mut bb = Tally::new("dominance", "part 1: f_k(|z|) <= f_2(|z|)");
    let mut c = Tally::new("dominance", "part 1: f_2(|z|) < f_1(z)");
    for &r in &radii {
        let rz = complex(r, 0.0, b);
        let f2r = f(2, &rz)?;
        for t in linspace(-PI / 3.0, PI / 3.0, angles) {
            let z = polar(r, t, b);
            let f1 = f(1, &z)?;
            c.lt(&f2r, &f1);
            for k in 2..=12 {
                let fkr = f(k, &rz)?;
                a.le(&f(k, &z)?, &fkr);
                bb.le(&fkr, &f2r);
            }
        }
    }
    out.extend([a.done(), bb.done(), c.done()]);

    // Part 2: f_k(z) <= f_k(|z|) < f_1(z), k >= 3, |arg z| <= pi/2.
    let mut a = Tally::new("dominance", "part 2: f_k(z) <= f_k(|z|)");
    let mut bb = Tally::new("dominance", "part 2: f_k(|z|) < f_1(z)");
    for &r in &radii {
        let rz = complex(r, 0.0, b);
        let fr: Vec<Float> = (3..=12).map(|k| f(k, &rz)).collect::<Result<_>>()?;
        for t in linspace(-PI / 2.0, PI / 2.0, angles) {
            let z = polar(r, t, b);
            let f1 = f(1, &z)?;
            for (i, k) in (3..=12).enumerate() {
                a.le(&f(k, &z)?, &fr[i]);
                bb.lt(&fr[i], &f1);
            }
        }
    }
    out.extend([a.done(), bb.done()]);

    // Part 3: f_k(z) < f_1(z), k >= 2, 0 <= arg z <= pi/2.
    let mut a = Tally::new("dominance", "part 3: f_k(z) < f_1(z)");
    for &r in &radii {
        for t in linspace(0.0, PI / 2.0, angles) {
            let z = polar(r, t, b);
            let f1 = f(1, &z)?;
            for k in 2..=12 {
                a.lt(&f(k, &z)?, &f1);
            }
        }
    }
    out.push(a.done());

    // Part 4: f_k(z) < max(f_1, f_2, f_3), k >= 4, pi/2 <= arg z <= pi.
    let mut a = Tally::new("dominance", "part 4: f_k(z) < max(f_1, f_2, f_3)");
    for &r in &radii {
        for t in linspace(PI / 2.0, PI, angles) {
            let z = polar(r, t, b);
            let top = f(1, &z)?.max(&f(2, &z)?).max(&f(3, &z)?);
            for k in 4..=12 {
                a.lt(&f(k, &z)?, &top);
            }
        }
    }
    out.push(a.done());

    // Monotonicity on circles.
    let mut m1 = Tally::new("circles", "t -> f_1(r e^{it}) nonincreasing on [0, pi]");
    let mut m2 = Tally::new("circles", "t -> arg Li2(r e^{it}) nondecreasing on [0, pi]");
    let mut m3 = Tally::new("circles", "t -> |Li2(r e^{it})| nonincreasing on [0, pi]");
    for i in 1..=10 {
        let r = 0.1 * i as f64;
        let mut prev: Option<(Float, Float, Float)> = None;
        for t in linspace(0.0, PI, 1001) {
            let z = polar(r, t, b);
            let li = dilog(&z, policy)?;
            let cur = (f(1, &z)?, Float::with_val(b, li.arg_ref()), cabs(&li));
            if let Some(p) = &prev {
                m1.le(&cur.0, &p.0);
                m2.le(&p.1, &cur.1);
                m3.le(&cur.2, &p.2);
            }
            prev = Some(cur);
        }
    }
    out.extend([m1.done(), m2.done(), m3.done()]);

    // Imaginary axis: positive, increasing, midpoint-concave, and above (pi sqrt2 / 8) sqrt r.
    let values: Vec<Float> = (1..1000).map(|j| f(1, &complex(0.0, j as f64 * 1e-3, b))).collect::<Result<_>>()?;
    let mut pos = Tally::new("imaginary axis", "f_1(ir) > 0");
    let mut inc = Tally::new("imaginary axis", "f_1(ir) increasing");
    let mut conc = Tally::new("imaginary axis", "f_1(ir) midpoint concave");
    let mut low = Tally::new("imaginary axis", "f_1(ir) > (pi sqrt 2 / 8) sqrt r");
    let coef = Float::with_val(b, pi(b) * Float::with_val(b, 2u32).sqrt()) / 8u32;
    let zero = Float::new(b);
    for (j, v) in values.iter().enumerate() {
        pos.lt(&zero, v);
        let r = Float::with_val(b, (j + 1) as f64 * 1e-3);
        low.lt(&Float::with_val(b, &coef * r.sqrt()), v);
        if j > 0 {
            inc.lt(&values[j - 1], v);
        }
        if j > 0 && j + 1 < values.len() {
            let ends = Float::with_val(b, &values[j - 1] + &values[j + 1]);
            conc.le(&ends, &Float::with_val(b, v * 2u32));
        }
    }
    out.extend([pos.done(), inc.done(), conc.done(), low.done()]);

    // Modulus bounds on a 60 x 60 polar grid of the closed disk.
    let mut lo = Tally::new("bounds", "(pi^2/12)|z| <= |Li2(z)|");
    let mut hi = Tally::new("bounds", "|Li2(z)| <= (pi^2/6)|z|");
    let mut fk = Tally::new("bounds", "0 <= f_k(z) <= pi |z|^{k/2} / (k sqrt 6), k <= 6");
    let pi2 = Float::with_val(b, pi(b).square());
    let sqrt6 = Float::with_val(b, 6u32).sqrt();
    for i in 1..=60 {
        let r = i as f64 / 60.0;
        for j in 0..60 {
            let z = polar(r, 2.0 * PI * j as f64 / 60.0, b);
            let m = cabs(&z);
            let li = cabs(&dilog(&z, policy)?);
            lo.le(&(Float::with_val(b, &pi2 * &m) / 12u32), &li);
            hi.le(&li, &(Float::with_val(b, &pi2 * &m) / 6u32));
            for k in 1..=6u32 {
                let v = f(k, &z)?;
                fk.le(&zero, &v);
                let bound = Float::with_val(b, pi(b) * Float::with_val(b, Float::with_val(b, (&m).pow(&Float::with_val(b, k as f64 / 2.0)))))
                    / Float::with_val(b, &sqrt6 * k);
                fk.le(&v, &bound);
            }
        }
    }
    out.extend([lo.done(), hi.done(), fk.done()]);

    // Direct comparisons.
    let e = |t: f64| polar(1.0, t, b);
    let f1_i = f(1, &complex(0.0, 1.0, b))?;
    let f1_1 = f(1, &complex(1.0, 0.0, b))?;
    let f1_34 = f(1, &e(3.0 * PI / 4.0))?;
    let f1_23 = f(1, &e(2.0 * PI / 3.0))?;
    let f1_45 = f(1, &e(4.0 * PI / 5.0))?;
    let f2_23 = f(2, &e(2.0 * PI / 3.0))?;
    let f3_23 = f(3, &e(2.0 * PI / 3.0))?;
    let direct: Vec<(&str, Float, &Float)> = vec![
        ("f_1(i)/4 < f_1(e^{3 pi i/4})", f1_i / 4u32, &f1_34),
        ("f_1(1)/4 < f_1(e^{2 pi i/3})", f1_1 / 4u32, &f1_23),
        ("f_1(e^{2 pi i/3})/5 < f_1(e^{3 pi i/4})", Float::with_val(b, &f1_23 / 5u32), &f1_34),
        ("f_1(e^{2 pi i/3})/5 < f_1(e^{4 pi i/5})", Float::with_val(b, &f1_23 / 5u32), &f1_45),
        ("f_2(e^{2 pi i/3}) < f_1(e^{2 pi i/3})", f2_23, &f1_23),
    ];
    for (name, lhs, rhs) in direct {
        let mut t = Tally::new("direct", name);
        t.lt(&lhs, rhs);
        out.push(t.done());
    }
    let mut t = Tally::new("direct", "f_1(e^{2 pi i/3}) < f_3(e^{2 pi i/3})");
    t.lt(&f1_23, &f3_23);
    out.push(t.done());
    Ok(out)
}

/// Counts of partitions of `n` into allowed parts, indexed by the number of parts,
/// by explicit enumeration.
pub fn brute_force_counts(seq: &ExponentSequence, n: u64) -> Vec<u64> {
    fn walk(rest: u64, max_part: u64, parts: usize, seq: &ExponentSequence, counts: &mut [u64]) {
        if rest == 0 {
            counts[parts] += 1;
            return;
        }
        for m in (1..=max_part.min(rest)).rev() {
            if seq.allows(m) {
                walk(rest - m, m, parts + 1, seq, counts);
            }
        }
    }
    let mut counts = vec![0u64; n as usize + 1];
    walk(n, n, 0, seq, &mut counts);
    counts
}

/// Enumeration agreement for `n <= min(max_n, 30)`, the stabilization identity
/// `[z^{n-j}] F_n = h_j` for `j <= n/2`, `F_n(1)` totals, and the support
/// property `k = n (mod p)`.
pub fn combinatorics_checks(seq: &ExponentSequence, max_n: u64) -> Result<Vec<Check>> {
    let polys = generate(seq, max_n)?;
    let mut enumeration = Tally::new("combinatorics", "coefficients equal brute-force enumeration (n <= 30)");
    let mut totals = Tally::new("combinatorics", "F_n(1) equals the number of partitions (n <= 30)");
    for poly in polys.iter().filter(|p| p.n() <= 30) {
        let counts = brute_force_counts(seq, poly.n());
        let ok = (0..counts.len()).all(|k| poly.coeff(k) == counts[k]);
        enumeration.truth(ok);
        totals.truth(poly.value_at_one() == counts.iter().sum::<u64>());
    }
    let tail = tail_series(seq, max_n / 2)?;
    let mut stab = Tally::new("combinatorics", format!("stabilization [z^(n-j)] F_n = h_j, n <= {max_n}"));
    for poly in &polys {
        let n = poly.n() as usize;
        stab.truth((0..=n / 2).all(|j| poly.coeff(n - j) == tail[j]));
    }
    let mut out = vec![enumeration.done(), totals.done(), stab.done()];
    if seq.modulus().is_some() {
        let mut rot = Tally::new("combinatorics", "support k = n (mod p)");
        for poly in &polys {
            rot.truth(crate::partition::rotation_check(seq, poly));
        }
        out.push(rot.done());
    }
    Ok(out)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `b_k(j) = 1/2 - r/L` where `r` in `[1, L]`, `L = lcm(k, p)`, solves
/// `r = j (mod k)`, `r = 1 (mod p)`; zero when there is no solution.
pub fn residue_b_closed_form(p: u64, k: u64, j: u64) -> Rational {
    let l = k / crate::partition::gcd(k, p) * p;
    (1..=l)
        .find(|r| r % k == j % k && r % p == 1 % p)
        .map_or_else(Rational::new, |r| q(1, 2) - Rational::from((r, l)))
}

/// `c_k(j) = g/(kp)` when `j = 1 (mod g)`, `g = gcd(k, p)`, else zero.
pub fn residue_c_closed_form(p: u64, k: u64, j: u64) -> Rational {
    let g = crate::partition::gcd(k, p);
    if (j + g - 1) % g == 0 {
        Rational::from((g, k * p))
    } else {
        Rational::new()
    }
}

/// The small-`k` tables for the family, each entry exact.
///
/// Three entries are stored at the values the defining sums give: all parts
/// `b_2 = (0, -1/2)`, odd parts `b_4(3) = -1/4`, and parts `= 1 (mod 3)`
/// `b_1(1) = 1/6`.
pub fn reference_tables(seq: &ExponentSequence) -> Vec<(u64, Vec<Rational>)> {
    match seq.family() {
        Family::AllParts => vec![
            (1, vec![q(-1, 2)]),
            (2, vec![q(0, 1), q(-1, 2)]),
            (3, vec![q(1, 6), q(-1, 6), q(-1, 2)]),
        ],
        Family::Residue { a: 1, p: 2 } => vec![
            (3, vec![q(1, 3), q(-1, 3), q(0, 1)]),
            (4, vec![q(1, 4), q(0, 1), q(-1, 4), q(0, 1)]),
            (6, vec![q(1, 3), q(0, 1), q(0, 1), q(0, 1), q(-1, 3), q(0, 1)]),
        ],
        Family::Residue { a: 1, p: 3 } => vec![
            (1, vec![q(1, 6)]),
            (2, vec![q(1, 3), q(-1, 6)]),
            (6, vec![q(1, 3), q(0, 1), q(0, 1), q(-1, 6), q(0, 1), q(0, 1)]),
        ],
        _ => Vec::new(),
    }
}

/// Exact `b_k`, `c_k` against the reference tables and closed forms for `k <= 12`.
pub fn fourier_checks(seq: &ExponentSequence) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let tables = reference_tables(seq);
    if !tables.is_empty() {
        let mut t = Tally::new("fourier", "b_k tables");
        for (k, want) in &tables {
            t.truth(fourier_data(seq, *k)?.b_values() == want.as_slice());
        }
        out.push(t.done());
    }
    let (b_form, c_form): (Box<dyn Fn(u64, u64) -> Rational>, Box<dyn Fn(u64, u64) -> Rational>) =
        match seq.family() {
            Family::AllParts => (
                Box::new(|k, j| q(1, 2) - Rational::from((j, k))),
                Box::new(|k, _| Rational::from((1, k))),
            ),
            Family::Residue { a: 1, p } => {
                let p = *p;
                (Box::new(move |k, j| residue_b_closed_form(p, k, j)), Box::new(move |k, j| residue_c_closed_form(p, k, j)))
            }
            _ => return Ok(out),
        };
    let mut bt = Tally::new("fourier", "b_k(j) closed form, k <= 12");
    let mut ct = Tally::new("fourier", "c_k(j) closed form, k <= 12");
    for k in 1..=12 {
        let data = fourier_data(seq, k)?;
        for j in 1..=k {
            bt.truth(*data.b(j as i64) == b_form(k, j));
            ct.truth(*data.c(j as i64) == c_form(k, j));
        }
    }
    out.extend([bt.done(), ct.done()]);
    Ok(out)
}

/// Principal power `base^e`.
fn cpow(base: &Complex, e: &Rational, bits: u32) -> Complex {
    let ln = Complex::with_val(bits, base.ln_ref());
    (ln * Float::with_val(bits, e)).exp()
}

/// Closed forms of `omega_{h,k,n}` for small `k`, at 100 points of `|z| <= 0.9`
/// and `n = 1..=4`, to `1e-20`.
///
/// For odd parts the quoted `omega_{1,4}` uses `((z - i)/(z + i))^{1/4}`, which
/// differs from the definition-based `((1 + iz)/(1 - iz))^{1/4}` by a unit
/// factor; the definition-based form is checked, and the quoted one through
/// fourth powers, which differ by exactly `-1`.
pub fn omega_checks(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let b = policy.bits();
    let points = random_disk(100, 0.9, 0x0e9a, b);
    let e = move |h: i64, k: u64| root_of_unity(h, k, b);
    let one = move |z: &Complex, w: &Complex| Complex::with_val(b, 1 - Complex::with_val(b, w * z));
    type Form = Box<dyn Fn(&Complex, u64) -> Complex>;
    let forms: Vec<(u64, u64, &str, Form)> = match seq.family() {
        Family::AllParts => vec![
            (1, 1, "omega_{1,1} = sqrt(1-z)", Box::new(move |z, _| Complex::with_val(b, 1 - z).sqrt())),
            (
                1,
                2,
                "omega_{1,2} = (-1)^n sqrt(1-z)",
                Box::new(move |z, n| Complex::with_val(b, 1 - z).sqrt() * if n % 2 == 0 { 1 } else { -1 }),
            ),
            (
                1,
                3,
                "omega_{1,3} closed form",
                Box::new(move |z, n| {
                    let u = one(z, &e(2, 3));
                    let v = one(z, &e(1, 3));
                    e(-(n as i64), 3) * cpow(&u, &q(1, 6), b) * Complex::with_val(b, 1 - z).sqrt()
                        / cpow(&v, &q(1, 6), b)
                }),
            ),
            (
                2,
                3,
                "omega_{2,3} closed form",
                Box::new(move |z, n| {
                    let u = one(z, &e(1, 3));
                    let v = one(z, &e(2, 3));
                    e(-2 * n as i64, 3) * cpow(&u, &q(1, 6), b) * Complex::with_val(b, 1 - z).sqrt()
                        / cpow(&v, &q(1, 6), b)
                }),
            ),
        ],
        Family::Residue { a: 1, p: 2 } => vec![
            (1, 1, "omega_{1,1} = 1", Box::new(move |_, _| Complex::with_val(b, 1))),
            (1, 2, "omega_{1,2} = (-1)^n", Box::new(move |_, n| Complex::with_val(b, if n % 2 == 0 { 1 } else { -1 }))),
            (
                1,
                4,
                "omega_{1,4} = i^{-n} ((1+iz)/(1-iz))^{1/4}",
                Box::new(move |z, n| {
                    let iz = Complex::with_val(b, z * e(1, 4));
                    let ratio = Complex::with_val(b, 1 + &iz) / Complex::with_val(b, 1 - &iz);
                    e(-(n as i64), 4) * cpow(&(Complex::with_val(b, 1 + &iz) * 0 + ratio), &q(1, 4), b)
                }),
            ),
            (
                3,
                4,
                "omega_{3,4} = i^{n} ((1-iz)/(1+iz))^{1/4}",
                Box::new(move |z, n| {
                    let iz = Complex::with_val(b, z * e(1, 4));
                    let ratio = Complex::with_val(b, 1 - &iz) / Complex::with_val(b, 1 + &iz);
                    e(n as i64, 4) * cpow(&ratio, &q(1, 4), b)
                }),
            ),
        ],
        _ => Vec::new(),
    };
    let mut out = Vec::new();
    for (h, k, name, form) in forms {
        let mut t = Tally::new("omega", name);
        for z in &points {
            for n in 1..=4 {
                let got = omega(seq, h, k, n, z, policy)?;
                t.within(cdist(&got, &form(z, n)), 1e-20);
            }
        }
        out.push(t.done());
    }
    if let Family::Residue { a: 1, p: 2 } = seq.family() {
        // The quoted (z - i)/(z + i) form agrees up to a unit: the fourth
        // powers differ by exactly -1, whatever branch each root takes.
        let mut t = Tally::new("omega", "omega_{1,4}^4 = -(i^{-n} ((z-i)/(z+i))^{1/4})^4");
        for z in &points {
            let quoted = e(-1, 4)
                * cpow(&(Complex::with_val(b, z - e(1, 4)) / Complex::with_val(b, z + e(1, 4))), &q(1, 4), b);
            let ratio = Complex::with_val(b, omega(seq, 1, 4, 1, z, policy)? / quoted);
            let fourth = int_pow(&ratio, 4, b);
            t.within(cdist(&fourth, &complex(-1.0, 0.0, b)), 1e-20);
        }
        out.push(t.done());
    }
    if let Family::AllParts = seq.family() {
        let mut t = Tally::new("omega", "omega_{1,3,n} != -omega_{2,3,n}");
        for z in &points {
            for n in 1..=3 {
                let s = Complex::with_val(b, omega(seq, 1, 3, n, z, policy)? + omega(seq, 2, 3, n, z, policy)?);
                t.truth(cabs(&s).to_f64() > 1e-10);
            }
        }
        out.push(t.done());
    }
    Ok(out)
}

/// Phase-function closed forms, conjugation invariance of `classify`, and
/// rotation equivariance for congruence families.
pub fn phase_checks(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let b = policy.bits();
    let functions = candidate_functions(seq)?;
    let mut out = Vec::new();
    let grid: Vec<Complex> = (1..=40)
        .flat_map(|i| (0..40).map(move |j| (i as f64 / 41.0, 2.0 * PI * (j as f64 + 0.31) / 40.0)))
        .map(|(r, t)| polar(r, t, b))
        .collect();

    if let Some(p) = match seq.family() {
        Family::AllParts => Some(1u64),
        Family::Residue { a: 1, p } => Some(*p),
        _ => None,
    } {
        // k sqrt(p) Re L_{h,k}(z) = (k/g) f_{k/g}(e_g(h)^{g/k} z) where g = gcd(k, p);
        // checked through Re sqrt of the rotated dilogarithm.
        let mut t = Tally::new("phase", "k sqrt(p) Re L = g Re sqrt(Li2(e_g(h) z^{k/g})) on a 40 x 40 grid");
        for pf in &functions {
            let PhaseIndex { h, k } = pf.index();
            let g = crate::partition::gcd(k, p);
            for z in &grid {
                let lhs = pf.re_l(z, policy)? * k * Float::with_val(b, p).sqrt();
                let w = Complex::with_val(b, int_pow(z, (k / g) as u32, b) * root_of_unity(h as i64, g, b));
                let rhs = crate::specfun::re_sqrt(&dilog(&w, policy)?) * g;
                t.within((lhs - rhs).abs().to_f64(), 1e-20);
            }
        }
        out.push(t.done());
    }

    let mut conj = Tally::new("phase", "winner(conj z) = winner(z)");
    let mut rot = Tally::new("phase", "winner(e_p(1) z) = rotated winner(z)");
    for z in grid.iter().step_by(7) {
        let v = classify_with(&functions, z, DEFAULT_BOUNDARY_TOL, policy)?;
        if v.tie {
            continue;
        }
        let vc = classify_with(&functions, &Complex::with_val(b, z.conj_ref()), DEFAULT_BOUNDARY_TOL, policy)?;
        if !vc.tie {
            let a = phase_function(seq, v.winner.h, v.winner.k)?;
            let c = phase_function(seq, vc.winner.h, vc.winner.k)?;
            match seq.family() {
                // Conjugation maps the wedge of h to the wedge of -h.
                Family::Residue { p, .. } if *p >= 3 => {
                    let h_conj = (v.winner.k - v.winner.h % v.winner.k) % v.winner.k;
                    let h_conj = if h_conj == 0 { v.winner.k } else { h_conj };
                    conj.truth(vc.winner.k == v.winner.k && (vc.winner.h == h_conj || a.same_function(&c)));
                }
                _ => conj.truth(a.same_function(&c)),
            }
        }
        if let Family::Residue { a: 1, p } = seq.family() {
            let zr = Complex::with_val(b, z * root_of_unity(1, *p, b));
            let vr = classify_with(&functions, &zr, DEFAULT_BOUNDARY_TOL, policy)?;
            if !vr.tie {
                // Rotating by e_p(1) moves the wedge centre by 2 pi / p.
                let centre = |idx: PhaseIndex| -> Result<f64> {
                    let pf = phase_function(seq, idx.h, idx.k)?;
                    let best = (0..360)
                        .map(|s| 2.0 * PI * s as f64 / 360.0)
                        .map(|t| Ok((t, pf.re_l(&polar(0.3, t, b), policy)?)))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite"))
                        .expect("nonempty");
                    Ok(best.0)
                };
                let shift = (centre(vr.winner)? - centre(v.winner)? - 2.0 * PI / *p as f64).rem_euclid(2.0 * PI);
                rot.truth(shift.min(2.0 * PI - shift) < 0.05);
            }
        }
    }
    out.push(conj.done());
    if rot.check.evaluated > 0 {
        out.push(rot.done());
    }
    Ok(out)
}

/// Root counts, conjugation and rotation closure, residuals, the `|z| < 1.1`
/// bound for `n >= 200`, and coefficient reconstruction for `n <= 500`.
pub fn root_checks(seq: &ExponentSequence, weights: &[u64], options: &RootOptions) -> Result<Vec<Check>> {
    let mut counts = Tally::new("roots", "count + origin multiplicity = degree");
    let mut conj = Tally::new("roots", "closed under conjugation");
    let mut rot = Tally::new("roots", "closed under rotation by e_p(1)");
    let mut resid = Tally::new("roots", "backward error below 2^{-bits/2}");
    let mut bound = Tally::new("roots", "|z| < 1.1 for n >= 200");
    let mut recon = Tally::new("roots", "coefficient reconstruction to 1e-10 (n <= 500)");
    let p = match seq.family() {
        Family::Residue { a: 1, p } => Some(*p),
        _ => None,
    };
    for &n in weights {
        let poly = crate::partition::generate_one(seq, n)?;
        let set = find_roots(&poly, options)?;
        counts.truth(set.roots.len() + set.zero_multiplicity_at_origin == set.degree);
        let tol = 2f64.powi(-(set.precision_bits as i32) / 2);
        resid.within(set.residual_bound, tol);
        let near = |w: &Complex| -> f64 {
            set.roots.iter().map(|r| cdist(r, w)).fold(f64::INFINITY, f64::min)
        };
        conj.within(
            set.roots.iter().map(|r| near(&Complex::with_val(r.prec().0, r.conj_ref()))).fold(0.0, f64::max),
            tol,
        );
        if let Some(p) = p {
            let w = root_of_unity(1, p, set.precision_bits);
            rot.within(set.roots.iter().map(|r| near(&Complex::with_val(r.prec().0, r * &w))).fold(0.0, f64::max), tol);
        }
        if n >= 200 {
            bound.within(set.max_modulus(), 1.1 - 1e-12);
        }
        if n <= 500 {
            recon.within(reconstruction_error(&poly, &set)?, 1e-10);
        }
    }
    let mut out = vec![counts.done(), resid.done(), conj.done()];
    for t in [rot, bound, recon] {
        if t.check.evaluated > 0 {
            out.push(t.done());
        }
    }
    Ok(out)
}

/// Log error of the leading-order estimate decreases across `weights` and ends below `0.1`.
pub fn asymptotic_checks(
    seq: &ExponentSequence,
    points: &[(f64, f64)],
    weights: &[u64],
    policy: &PrecisionPolicy,
) -> Result<Vec<Check>> {
    let report = asymptotic_report(seq, points, weights, policy)?;
    let mut mono = Tally::new("asymptotics", "log error strictly decreasing in n");
    let mut last = Tally::new("asymptotics", "log error < 0.1 at the largest n");
    for &(x, y) in points {
        let errs: Vec<f64> = report.iter().filter(|c| c.z == (x, y)).map(|c| c.log_error).collect();
        mono.truth(errs.windows(2).all(|w| w[1] < w[0]));
        last.within(*errs.last().expect("weights nonempty"), 0.1);
    }
    Ok(vec![mono.done(), last.done()])
}

fn conjugate_closure(curves: &[CurvePolyline]) -> f64 {
    let pts: Vec<(f64, f64)> = curves.iter().flat_map(CurvePolyline::points_f64).collect();
    pts.iter()
        .map(|&(x, y)| {
            pts.iter().map(|&(u, v)| (u - x).hypot(v + y)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Curve residuals, closure of the assembled set under conjugation, and for
/// the two traced families the landmarks `beta` and the triple point.
pub fn curve_checks(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<Vec<Check>> {
    let set = attractor_set(seq, policy)?;
    let mut res = Tally::new("curves", "|Re L_a - Re L_b| <= 1e-9 along every curve");
    for c in set.curves.iter().chain(&set.spokes) {
        res.within(c.residual_max(), 1e-9);
    }
    let mut conj = Tally::new("curves", "attractor closed under conjugation");
    conj.within(conjugate_closure(&set.curves), 1e-8);
    let mut out = vec![res.done()];
    if !set.curves.is_empty() {
        out.push(conj.done());
    }
    match seq.family() {
        Family::AllParts => {
            let tp = triple_point(policy)?;
            let mut t = Tally::new("curves", "traced junctions meet the triple point");
            for c in &set.curves[..2] {
                let j = c.junction.as_ref().map_or(f64::INFINITY, |j| cdist(j, &tp));
                t.within(j, 1e-8);
            }
            out.push(t.done());
        }
        Family::Residue { a: 1, p: 2 } => {
            let b1 = find_beta(policy)?;
            let b2 = find_beta(&PrecisionPolicy::with_bits(2 * policy.bits())?)?;
            let mut t = Tally::new("curves", "beta in (3/4, 1), stable under doubled precision");
            let beta = b1.to_f64();
            t.truth(beta > 0.75 && beta < 1.0);
            t.within((Float::with_val(2 * policy.bits(), &b2 - &b1)).abs().to_f64(), 1e-10);
            out.push(t.done());
        }
        _ => {}
    }
    Ok(out)
}

/// Weights used by `verify` for a given ceiling: `max_n / 4`, `max_n / 2`, `max_n`.
pub fn suite_weights(max_n: u64) -> Vec<u64> {
    let mut w: Vec<u64> = [max_n / 4, max_n / 2, max_n].into_iter().filter(|&n| n >= 1).collect();
    w.dedup();
    w
}

/// Every group above for one family.
pub fn run_suite(seq: &ExponentSequence, max_n: u64, policy: &PrecisionPolicy) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    checks.extend(special_function_checks(policy)?);
    checks.extend(numeric_anchor_checks(policy)?);
    checks.extend(identity_checks(policy, 200, 0x1d)?);
    checks.extend(inequality_checks(policy)?);
    checks.extend(combinatorics_checks(seq, max_n)?);
    checks.extend(fourier_checks(seq)?);
    checks.extend(omega_checks(seq, policy)?);
    checks.extend(phase_checks(seq, policy)?);
    let weights = suite_weights(max_n);
    checks.extend(root_checks(seq, &weights, &RootOptions { policy: policy.clone(), ..RootOptions::default() })?);
    if matches!(seq.family(), Family::AllParts) && max_n >= 8 {
        checks.extend(asymptotic_checks(seq, &[(0.5, 0.0), (0.3 * (PI / 8.0).cos(), 0.3 * (PI / 8.0).sin())], &weights, policy)?);
    }
    if matches!(seq.family(), Family::AllParts | Family::Residue { a: 1, .. }) {
        checks.extend(curve_checks(seq, policy)?);
    }
    Ok(VerifyReport { family: seq.label(), max_n, precision_bits: policy.bits(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small_cases() {
        assert_eq!(brute_force_counts(&ExponentSequence::all_parts(), 4), vec![0, 1, 2, 1, 1]);
        assert_eq!(brute_force_counts(&ExponentSequence::odd_parts(), 4), vec![0, 0, 1, 0, 1]);
    }

    #[test]
    fn residue_closed_forms() {
        assert_eq!(residue_b_closed_form(2, 4, 3), q(-1, 4));
        assert_eq!(residue_b_closed_form(3, 1, 1), q(1, 6));
        assert_eq!(residue_b_closed_form(3, 2, 2), q(-1, 6));
        assert_eq!(residue_c_closed_form(3, 6, 4), q(1, 6));
        assert_eq!(residue_c_closed_form(3, 6, 2), q(0, 1));
    }

    #[test]
    fn anchors_pass() {
        let p = PrecisionPolicy::default();
        for c in special_function_checks(&p).unwrap().into_iter().chain(numeric_anchor_checks(&p).unwrap()) {
            assert!(c.passed(), "{c:?}");
        }
    }
}
