//! Phase-boundary curves and the predicted zero attractors.
//!
//! A boundary between candidates `a` and `b` is a piece of the level set
//! `u = Re L_a - Re L_b = 0`. With `G = L_a - L_b` analytic, the level set is
//! an integral curve of `dy/dx = Re G' / Im G'`. Tracing uses the equivalent
//! arc-length field `dz/ds = i conj(G') / |G'|`, a fourth-order Runge–Kutta
//! predictor, and Newton steps `z <- z - u / G'` back onto the level set.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{ExponentSequence, Family};
use crate::phase::{candidate_functions, phase_function, PhaseFunction, PhaseIndex};
use crate::specfun::{complex, root_dilog, PrecisionPolicy};

/// Below this `|Im G'|` the slope `dy/dx` is reported as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Two candidates whose `Re L` values are compared.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub a: PhaseFunction,
    pub b: PhaseFunction,
}

struct PairEval {
    /// `Re L_a - Re L_b`.
    u: f64,
    /// `(Re L_a + Re L_b) / 2`.
    common: f64,
    /// `G' = L_a' - L_b'` as `(re, im)`.
    g_prime: (f64, f64),
}

impl BoundaryPair {
    pub fn new(a: PhaseFunction, b: PhaseFunction) -> Self {
        BoundaryPair { a, b }
    }

    pub fn from_indices(seq: &ExponentSequence, a: PhaseIndex, b: PhaseIndex) -> Result<Self> {
        Ok(BoundaryPair { a: phase_function(seq, a.h, a.k)?, b: phase_function(seq, b.h, b.k)? })
    }

    pub fn indices(&self) -> (PhaseIndex, PhaseIndex) {
        (self.a.index(), self.b.index())
    }

    /// `Re L_a(z) - Re L_b(z)`.
    pub fn difference(&self, z: &Complex, policy: &PrecisionPolicy) -> Result<Float> {
        let a = self.a.re_l(z, policy)?;
        let b = self.b.re_l(z, policy)?;
        Ok(a - b)
    }

    /// Smallest angular distance to a branch ray of either function.
    pub fn branch_distance(&self, x: f64, y: f64) -> f64 {
        self.a.branch_distance(x, y).min(self.b.branch_distance(x, y))
    }

    fn eval(&self, x: f64, y: f64, policy: &PrecisionPolicy) -> Result<PairEval> {
        let z = complex(x, y, policy.bits());
        let (la, da) = self.a.l_and_derivative(&z, policy)?;
        let (lb, db) = self.b.l_and_derivative(&z, policy)?;
        let ra = la.real().to_f64();
        let rb = lb.real().to_f64();
        let g = Complex::with_val(policy.bits(), &da - &db);
        Ok(PairEval {
            u: Float::with_val(policy.bits(), la.real() - lb.real()).to_f64(),
            common: 0.5 * (ra + rb),
            g_prime: (g.real().to_f64(), g.imag().to_f64()),
        })
    }
}

/// Slope `dy/dx = Re[L_a' - L_b'] / Im[L_a' - L_b']` of the level curve through `x + iy`.
pub fn ode_rhs(pair: &BoundaryPair, x: f64, y: f64, band: f64, policy: &PrecisionPolicy) -> Result<f64> {
    if pair.branch_distance(x, y) < band {
        return Err(Error::Branch { re: x, im: y });
    }
    let e = pair.eval(x, y, policy)?;
    let (gr, gi) = e.g_prime;
    if gi.abs() < SINGULAR_TOL {
        return Err(Error::Singular { re: x, im: y });
    }
    Ok(gr / gi)
}

/// Which way to leave the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Direction {
    /// Decreasing `|z|`.
    Inward,
    /// Increasing `|z|`.
    Outward,
    /// Initially heading toward the given point.
    Toward(f64, f64),
}

/// Step sizes, guard bands and tolerances for [`trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct TraceControls {
    pub direction: Direction,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Newton stops once `|u|` falls below this.
    pub corrector_tol: f64,
    pub eps_circle: f64,
    pub eps_origin: f64,
    pub branch_band: f64,
    pub junction_tol: f64,
    /// Largest turn (radians) between consecutive tangents.
    pub max_turn: f64,
    pub max_points: usize,
}

impl Default for TraceControls {
    fn default() -> Self {
        TraceControls {
            direction: Direction::Inward,
            initial_step: 1e-3,
            min_step: 1e-9,
            max_step: 1e-2,
            corrector_tol: 1e-13,
            eps_circle: 1e-4,
            eps_origin: 1e-3,
            branch_band: 1e-4,
            junction_tol: 1e-8,
            max_turn: 0.05,
            max_points: 50_000,
        }
    }
}

impl TraceControls {
    pub fn with_direction(direction: Direction) -> Self {
        TraceControls { direction, ..Self::default() }
    }
}

/// Why a trace stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Termination {
    Circle,
    Origin,
    Branch,
    /// A third candidate's `Re L` reached the common value.
    Junction { with: PhaseIndex },
    MaxPoints,
    /// Built directly rather than traced (spokes, symmetry images).
    Constructed,
}

/// An ordered sample of one boundary curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePolyline {
    pub pair: (PhaseIndex, PhaseIndex),
    pub points: Vec<Complex>,
    /// `|Re L_a - Re L_b|` at each point.
    pub residuals: Vec<f64>,
    pub termination: Termination,
    /// Location of the junction, when the trace ended at one.
    pub junction: Option<Complex>,
}

impl CurvePolyline {
    pub fn points_f64(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|z| (z.real().to_f64(), z.imag().to_f64())).collect()
    }

    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `z -> map(z)` pointwise and relabels the pair.
    pub fn map_points(&self, pair: (PhaseIndex, PhaseIndex), map: impl Fn(&Complex) -> Complex) -> Self {
        CurvePolyline {
            pair,
            points: self.points.iter().map(&map).collect(),
            residuals: self.residuals.clone(),
            termination: Termination::Constructed,
            junction: self.junction.as_ref().map(&map),
        }
    }

    /// The mirror image under complex conjugation.
    pub fn conjugate(&self, pair: (PhaseIndex, PhaseIndex)) -> Self {
        self.map_points(pair, |z| Complex::with_val(z.prec(), z.conj_ref()))
    }
}

fn tangent(g: (f64, f64)) -> Result<(f64, f64)> {
    let norm = g.0.hypot(g.1);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Singular { re: f64::NAN, im: f64::NAN });
    }
    // i conj(G') / |G'| = (Im G', Re G') / |G'|
    Ok((g.1 / norm, g.0 / norm))
}

fn align(t: (f64, f64), reference: (f64, f64)) -> (f64, f64) {
    if t.0 * reference.0 + t.1 * reference.1 < 0.0 {
        (-t.0, -t.1)
    } else {
        t
    }
}

struct Stepper<'a> {
    pair: &'a BoundaryPair,
    third: &'a [PhaseFunction],
    controls: &'a TraceControls,
    policy: &'a PrecisionPolicy,
}

/// State after a successful step.
struct StepResult {
    x: f64,
    y: f64,
    u: f64,
    tangent: (f64, f64),
    common: f64,
    predictor_error: f64,
}

impl Stepper<'_> {
    fn field(&self, x: f64, y: f64, reference: (f64, f64)) -> Result<(f64, f64)> {
        if x.hypot(y) > 1.0 {
            return Err(Error::Domain("predictor left the disk".into()));
        }
        let e = self.pair.eval(x, y, self.policy)?;
        Ok(align(tangent(e.g_prime)?, reference))
    }

    fn step(&self, x: f64, y: f64, dir: (f64, f64), h: f64) -> Result<StepResult> {
        let k1 = self.field(x, y, dir)?;
        let k2 = self.field(x + 0.5 * h * k1.0, y + 0.5 * h * k1.1, k1)?;
        let k3 = self.field(x + 0.5 * h * k2.0, y + 0.5 * h * k2.1, k2)?;
        let k4 = self.field(x + h * k3.0, y + h * k3.1, k3)?;
        let px = x + h * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0;
        let py = y + h * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0;
        let (mut cx, mut cy) = (px, py);
        for _ in 0..8 {
            if cx.hypot(cy) > 1.0 {
                return Err(Error::Domain("corrector left the disk".into()));
            }
            let e = self.pair.eval(cx, cy, self.policy)?;
            if e.u.abs() < self.controls.corrector_tol {
                let t = align(tangent(e.g_prime)?, dir);
                return Ok(StepResult {
                    x: cx,
                    y: cy,
                    u: e.u,
                    tangent: t,
                    common: e.common,
                    predictor_error: (cx - px).hypot(cy - py),
                });
            }
            // z <- z - u / G'
            let (gr, gi) = e.g_prime;
            let d = gr * gr + gi * gi;
            if !(d > 0.0) {
                return Err(Error::Singular { re: cx, im: cy });
            }
            cx -= e.u * gr / d;
            cy -= e.u * -gi / d;
        }
        Err(Error::Convergence("corrector did not reach the level set".into()))
    }

    fn third_gaps(&self, x: f64, y: f64, common: f64) -> Result<Vec<f64>> {
        let z = complex(x, y, self.policy.bits());
        self.third
            .iter()
            .map(|pf| Ok(pf.re_l(&z, self.policy)?.to_f64() - common))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Event {
    Circle,
    Origin,
    Branch,
    Junction(usize),
}

/// Follows the level set through `seed` until a termination event.
///
/// `third` lists the other candidates watched for junctions; a junction is a
/// sign change of `Re L_c - common` for some `c`, located by bisection on the
/// step length. Near-zero gaps at the seed are ignored until their sign is
/// established.
pub fn trace(
    seed: &Complex,
    pair: &BoundaryPair,
    third: &[PhaseFunction],
    controls: &TraceControls,
    policy: &PrecisionPolicy,
) -> Result<CurvePolyline> {
    let stepper = Stepper { pair, third, controls, policy };
    let (mut x, mut y) = (seed.real().to_f64(), seed.imag().to_f64());
    let start = pair.eval(x, y, policy)?;
    let t0 = tangent(start.g_prime)?;
    let mut dir = match controls.direction {
        Direction::Inward => {
            if x * t0.0 + y * t0.1 > 0.0 {
                (-t0.0, -t0.1)
            } else {
                t0
            }
        }
        Direction::Outward => {
            if x * t0.0 + y * t0.1 < 0.0 {
                (-t0.0, -t0.1)
            } else {
                t0
            }
        }
        Direction::Toward(tx, ty) => align(t0, (tx - x, ty - y)),
    };

    let mut signs: Vec<Option<bool>> = stepper
        .third_gaps(x, y, start.common)?
        .into_iter()
        .map(|g| (g.abs() > controls.junction_tol).then_some(g > 0.0))
        .collect();

    let mut points = vec![Complex::with_val(policy.bits(), seed)];
    let mut residuals = vec![start.u.abs()];
    let mut h = controls.initial_step.clamp(controls.min_step, controls.max_step);

    let detect = |s: &StepResult, signs: &[Option<bool>]| -> Result<Option<Event>> {
        let r = s.x.hypot(s.y);
        if r > 1.0 - controls.eps_circle {
            return Ok(Some(Event::Circle));
        }
        if r < controls.eps_origin {
            return Ok(Some(Event::Origin));
        }
        if pair.branch_distance(s.x, s.y) < controls.branch_band {
            return Ok(Some(Event::Branch));
        }
        let gaps = stepper.third_gaps(s.x, s.y, s.common)?;
        for (i, g) in gaps.iter().enumerate() {
            if let Some(positive) = signs[i] {
                if (*g > 0.0) != positive {
                    return Ok(Some(Event::Junction(i)));
                }
            }
        }
        Ok(None)
    };

    loop {
        if points.len() >= controls.max_points {
            return Ok(finish(pair, points, residuals, Termination::MaxPoints, None));
        }
        let attempt = stepper.step(x, y, dir, h).and_then(|s| {
            let turn = (s.tangent.0 * dir.0 + s.tangent.1 * dir.1).clamp(-1.0, 1.0).acos();
            if turn > controls.max_turn || s.predictor_error > 0.25 * h {
                Err(Error::Convergence("step too long for the local curvature".into()))
            } else {
                Ok(s)
            }
        });
        let s = match attempt {
            Ok(s) => s,
            Err(Error::Domain(_)) => {
                // The step left the disk: the circle band lies within reach.
                if h <= controls.min_step {
                    return Ok(finish(pair, points, residuals, Termination::Circle, None));
                }
                h *= 0.5;
                continue;
            }
            Err(_) => {
                h *= 0.5;
                if h < controls.min_step {
                    return Err(Error::StepFailure { re: x, im: y, step: h });
                }
                continue;
            }
        };

        if let Some(event) = detect(&s, &signs)? {
            let located = locate_event(&stepper, x, y, dir, h, event, &signs, &detect)?;
            let termination = match event {
                Event::Circle => Termination::Circle,
                Event::Origin => Termination::Origin,
                Event::Branch => Termination::Branch,
                Event::Junction(i) => Termination::Junction { with: third[i].index() },
            };
            let mut junction = None;
            if let Some(p) = located {
                let z = complex(p.x, p.y, policy.bits());
                if matches!(event, Event::Junction(_)) {
                    junction = Some(z.clone());
                }
                points.push(z);
                residuals.push(p.u.abs());
            }
            return Ok(finish(pair, points, residuals, termination, junction));
        }

        // Establish signs that were undetermined at the seed.
        let gaps = stepper.third_gaps(s.x, s.y, s.common)?;
        for (i, g) in gaps.iter().enumerate() {
            if signs[i].is_none() && g.abs() > controls.junction_tol {
                signs[i] = Some(*g > 0.0);
            }
        }

        x = s.x;
        y = s.y;
        dir = s.tangent;
        points.push(complex(x, y, policy.bits()));
        residuals.push(s.u.abs());
        if s.predictor_error < 1e-9 && h < controls.max_step {
            h = (h * 1.5).min(controls.max_step);
        } else if s.predictor_error > 1e-7 {
            h = (h * 0.7).max(controls.min_step);
        }
    }
}

fn finish(
    pair: &BoundaryPair,
    points: Vec<Complex>,
    residuals: Vec<f64>,
    termination: Termination,
    junction: Option<Complex>,
) -> CurvePolyline {
    CurvePolyline { pair: pair.indices(), points, residuals, termination, junction }
}

/// Bisects the step length for the first point where `event` fires.
///
/// Junctions return the point where the gap changes sign; the other events
/// return the last point before the guard band (or nothing if the band is
/// entered within one minimal step).
#[allow(clippy::too_many_arguments)]
fn locate_event(
    stepper: &Stepper<'_>,
    x: f64,
    y: f64,
    dir: (f64, f64),
    h: f64,
    event: Event,
    signs: &[Option<bool>],
    detect: &dyn Fn(&StepResult, &[Option<bool>]) -> Result<Option<Event>>,
) -> Result<Option<StepResult>> {
    let mut lo = 0.0;
    let mut hi = h;
    let mut best: Option<StepResult> = None;
    let tol = match event {
        Event::Junction(_) => 1e-13_f64.max(h * 1e-12),
        _ => stepper.controls.min_step.max(h * 1e-3),
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match stepper.step(x, y, dir, mid) {
            Ok(s) => match detect(&s, signs)? {
                Some(_) => hi = mid,
                None => {
                    lo = mid;
                    best = Some(s);
                }
            },
            Err(_) => hi = mid,
        }
    }
    if matches!(event, Event::Junction(_)) {
        if let Ok(s) = stepper.step(x, y, dir, hi) {
            return Ok(Some(s));
        }
    }
    Ok(best)
}

/// Bisects `Re L_a(e^{it}) = Re L_b(e^{it})` on `[t_lo, t_hi]` and returns `e^{it*}`.
pub fn seed_on_circle(
    pair: &BoundaryPair,
    bracket: (f64, f64),
    policy: &PrecisionPolicy,
) -> Result<Complex> {
    let wp = policy.bits();
    let at = |t: &Float| -> Result<Float> {
        let (s, c) = t.clone().sin_cos(Float::new(wp));
        pair.difference(&Complex::with_val(wp, (c, s)), policy)
    };
    let mut lo = Float::with_val(wp, bracket.0);
    let mut hi = Float::with_val(wp, bracket.1);
    let f_lo = at(&lo)?;
    let f_hi = at(&hi)?;
    if f_lo.is_zero() {
        return Ok(unit(&lo, wp));
    }
    if f_hi.is_zero() {
        return Ok(unit(&hi, wp));
    }
    if f_lo.is_sign_negative() == f_hi.is_sign_negative() {
        return Err(Error::NoSignChange { lo: bracket.0, hi: bracket.1 });
    }
    let lo_negative = f_lo.is_sign_negative();
    let width_tol = Float::with_val(wp, Float::i_exp(1, 12 - wp as i32)).min(&Float::with_val(wp, 1e-12));
    while Float::with_val(wp, &hi - &lo) > width_tol {
        let mid = Float::with_val(wp, &lo + &hi) / 2u32;
        let f = at(&mid)?;
        if f.is_zero() {
            return Ok(unit(&mid, wp));
        }
        if f.is_sign_negative() == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(unit(&(Float::with_val(wp, &lo + &hi) / 2u32), wp))
}

fn unit(t: &Float, wp: u32) -> Complex {
    let (s, c) = t.clone().sin_cos(Float::new(wp));
    Complex::with_val(wp, (c, s))
}

/// Sign changes of the circle winner on `[t_lo, t_hi]`, as brackets
/// `(winner before, winner after, t_a, t_b)`.
pub fn circle_transitions(
    functions: &[PhaseFunction],
    range: (f64, f64),
    samples: usize,
    policy: &PrecisionPolicy,
) -> Result<Vec<(PhaseIndex, PhaseIndex, f64, f64)>> {
    let winner_at = |t: f64| -> Result<PhaseIndex> {
        let z = complex(t.cos(), t.sin(), policy.bits());
        let mut best: Option<(PhaseIndex, Float)> = None;
        for pf in functions {
            let v = pf.re_l(&z, policy)?;
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((pf.index(), v));
            }
        }
        Ok(best.expect("at least one candidate").0)
    };
    let mut out = Vec::new();
    let step = (range.1 - range.0) / samples as f64;
    let mut prev_t = range.0;
    let mut prev = winner_at(prev_t)?;
    for i in 1..=samples {
        let t = range.0 + step * i as f64;
        let w = winner_at(t)?;
        if w != prev {
            out.push((prev, w, prev_t, t));
        }
        prev = w;
        prev_t = t;
    }
    Ok(out)
}

/// The radius `beta` in `(3/4, 1)` where `f_1(i beta) = f_2(beta)`.
pub fn find_beta(policy: &PrecisionPolicy) -> Result<Float> {
    let wp = policy.bits();
    let g = |r: &Float| -> Result<Float> {
        let f2 = root_dilog(2, &Complex::with_val(wp, (r, 0)), policy)?;
        let f1 = root_dilog(1, &Complex::with_val(wp, (0, r)), policy)?;
        Ok(f2 - f1)
    };
    let mut lo = Float::with_val(wp, 0.75);
    let mut hi = Float::with_val(wp, 1);
    let g_lo = g(&lo)?;
    let g_hi = g(&hi)?;
    if !(g_lo.is_sign_negative() && g_hi.is_sign_positive()) {
        return Err(Error::NoSignChange { lo: 0.75, hi: 1.0 });
    }
    let width_tol = Float::with_val(wp, Float::i_exp(1, 12 - wp as i32)).min(&Float::with_val(wp, 1e-15));
    while Float::with_val(wp, &hi - &lo) > width_tol {
        let mid = Float::with_val(wp, &lo + &hi) / 2u32;
        if g(&mid)?.is_sign_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(wp, &lo + &hi) / 2u32)
}

/// Second-quadrant point where `f_1 = f_2 = f_3` for all parts.
///
/// A 200 x 200 polar scan of the quadrant seeds a damped two-dimensional
/// Newton iteration on `(f_1 - f_2, f_2 - f_3)`.
pub fn triple_point(policy: &PrecisionPolicy) -> Result<Complex> {
    let seq = ExponentSequence::all_parts();
    let f: Vec<PhaseFunction> = (1..=3).map(|k| phase_function(&seq, 1, k)).collect::<Result<_>>()?;
    let best = coarse_triple_seed(&f)?;

    let residual = |x: f64, y: f64| -> Result<([f64; 2], [[f64; 2]; 2])> {
        let z = complex(x, y, policy.bits());
        let mut re = [0.0; 3];
        let mut grad = [(0.0, 0.0); 3];
        for (i, pf) in f.iter().enumerate() {
            let (l, d) = pf.l_and_derivative(&z, policy)?;
            re[i] = l.real().to_f64();
            // grad Re L = (Re L', -Im L')
            grad[i] = (d.real().to_f64(), -d.imag().to_f64());
        }
        Ok((
            [re[0] - re[1], re[1] - re[2]],
            [
                [grad[0].0 - grad[1].0, grad[0].1 - grad[1].1],
                [grad[1].0 - grad[2].0, grad[1].1 - grad[2].1],
            ],
        ))
    };

    let (mut x, mut y) = best;
    for _ in 0..100 {
        let (r, j) = residual(x, y)?;
        let norm = r[0].abs() + r[1].abs();
        if norm < 1e-14 {
            return Ok(complex(x, y, policy.bits()));
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 {
            break;
        }
        let dx = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let dy = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut lambda = 1.0;
        loop {
            let (nx, ny) = (x - lambda * dx, y - lambda * dy);
            if nx.hypot(ny) < 1.0 {
                let (nr, _) = residual(nx, ny)?;
                if nr[0].abs() + nr[1].abs() < norm || lambda < 1e-6 {
                    x = nx;
                    y = ny;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::Convergence("triple point line search failed".into()));
            }
        }
    }
    let (r, _) = residual(x, y)?;
    if r[0].abs() + r[1].abs() < 1e-10 {
        return Ok(complex(x, y, policy.bits()));
    }
    Err(Error::Convergence("triple point Newton iteration did not converge".into()))
}

static TRIPLE_SEED: OnceLock<(f64, f64)> = OnceLock::new();

/// Grid point of the polar scan minimizing `|f_1 - f_2| + |f_2 - f_3|`.
fn coarse_triple_seed(f: &[PhaseFunction]) -> Result<(f64, f64)> {
    if let Some(seed) = TRIPLE_SEED.get() {
        return Ok(*seed);
    }
    let coarse = PrecisionPolicy::new(64, 1e-15)?;
    let n = 200;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 1..n {
        let r = i as f64 / n as f64;
        for j in 1..n {
            let t = PI / 2.0 + (PI / 2.0) * j as f64 / n as f64;
            let z = complex(r * t.cos(), r * t.sin(), 64);
            let v: Vec<f64> =
                f.iter().map(|pf| pf.re_l(&z, &coarse).map(|x| x.to_f64())).collect::<Result<_>>()?;
            let score = (v[0] - v[1]).abs() + (v[1] - v[2]).abs();
            if score < best.0 {
                best = (score, r * t.cos(), r * t.sin());
            }
        }
    }
    Ok(*TRIPLE_SEED.get_or_init(|| (best.1, best.2)))
}

/// A straight segment `[start, end]` in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

/// The predicted zero attractor: the unit circle plus curves, spokes and segments.
#[derive(Debug, Clone)]
pub struct AttractorSet {
    pub family: ExponentSequence,
    /// Traced boundary curves and their symmetry images.
    pub curves: Vec<CurvePolyline>,
    /// Radial segments, sampled like curves.
    pub spokes: Vec<CurvePolyline>,
    pub segments: Vec<Segment>,
}

impl AttractorSet {
    /// Every non-circle component as an `f64` polyline.
    pub fn polylines(&self) -> Vec<Vec<(f64, f64)>> {
        let mut out: Vec<Vec<(f64, f64)>> =
            self.curves.iter().chain(&self.spokes).map(CurvePolyline::points_f64).collect();
        out.extend(self.segments.iter().map(|s| vec![s.start, s.end]));
        out
    }
}

/// Largest spacing between consecutive samples of an assembled attractor.
pub const ATTRACTOR_SPACING: f64 = 1e-3;

/// Number of samples per spoke, enough to keep the spacing below [`ATTRACTOR_SPACING`].
pub const SPOKE_SAMPLES: usize = 1024;

fn attractor_controls() -> TraceControls {
    TraceControls { max_step: ATTRACTOR_SPACING, ..TraceControls::default() }
}

/// Assembles the attractor of `seq` from traced curves and closed forms.
///
/// - all parts: the `(1,3)` and `(2,3)` curves from their circle seeds in to
///   the triple point, the `(1,2)` curve from the triple point to the origin,
///   and their conjugates;
/// - odd parts: the `(1,1)/(1,4)` curve `gamma` from the circle in to `i beta`,
///   its images `-gamma`, `conj gamma`, `-conj gamma`, and the segment `i[-beta, beta]`;
/// - parts `= 1 (mod p)`, `p >= 3`: `p` spokes along `z^p = -1`.
pub fn attractor_set(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<AttractorSet> {
    match seq.family() {
        Family::AllParts => all_parts_attractor(seq, policy),
        Family::Residue { a: 1, p: 2 } => odd_parts_attractor(seq, policy),
        Family::Residue { a: 1, p } => Ok(AttractorSet {
            family: seq.clone(),
            curves: Vec::new(),
            spokes: spokes(seq, *p, policy)?,
            segments: Vec::new(),
        }),
        _ => Err(Error::UnsupportedFamily(format!("no attractor construction for {seq}"))),
    }
}

fn others(functions: &[PhaseFunction], pair: &BoundaryPair) -> Vec<PhaseFunction> {
    let (a, b) = pair.indices();
    functions.iter().filter(|f| f.index() != a && f.index() != b).cloned().collect()
}

fn all_parts_attractor(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<AttractorSet> {
    let functions = candidate_functions(seq)?;
    let scan_policy = PrecisionPolicy::new(64, 1e-15)?;
    let transitions = circle_transitions(&functions, (0.05, PI - 0.05), 720, &scan_policy)?;
    let triple = triple_point(policy)?;
    let inward = attractor_controls();

    let mut jobs: Vec<(Complex, BoundaryPair)> = Vec::new();
    for (a, b, lo, hi) in transitions {
        let pair = BoundaryPair::from_indices(seq, a.min(b), a.max(b))?;
        jobs.push((seed_on_circle(&pair, (lo, hi), policy)?, pair));
    }
    let inner = BoundaryPair::from_indices(seq, PhaseIndex::new(1, 1), PhaseIndex::new(1, 2))?;
    jobs.push((triple, inner));

    let traced: Vec<CurvePolyline> = jobs
        .par_iter()
        .map(|(seed, pair)| trace(seed, pair, &others(&functions, pair), &inward, policy))
        .collect::<Result<_>>()?;
    let mut curves = traced.clone();
    curves.extend(traced.iter().map(|c| c.conjugate(c.pair)));
    Ok(AttractorSet { family: seq.clone(), curves, spokes: Vec::new(), segments: Vec::new() })
}

/// `gamma`, the `(1,1)/(1,4)` boundary for odd parts, traced from the circle to `i beta`.
pub fn odd_parts_gamma(policy: &PrecisionPolicy) -> Result<CurvePolyline> {
    let seq = ExponentSequence::odd_parts();
    let functions = candidate_functions(&seq)?;
    let pair = BoundaryPair::from_indices(&seq, PhaseIndex::new(1, 1), PhaseIndex::new(1, 4))?;
    let seed = seed_on_circle(&pair, (0.05, PI / 2.0), policy)?;
    trace(&seed, &pair, &others(&functions, &pair), &attractor_controls(), policy)
}

fn odd_parts_attractor(seq: &ExponentSequence, policy: &PrecisionPolicy) -> Result<AttractorSet> {
    let gamma = odd_parts_gamma(policy)?;
    let beta = find_beta(policy)?.to_f64();
    let one = PhaseIndex::new(1, 1);
    let two = PhaseIndex::new(1, 2);
    let four = PhaseIndex::new(1, 4);
    let neg = |z: &Complex| Complex::with_val(z.prec(), -z);
    let neg_conj = |z: &Complex| Complex::with_val(z.prec(), -Complex::with_val(z.prec(), z.conj_ref()));
    let curves = vec![
        gamma.clone(),
        gamma.map_points((two, four), neg),
        gamma.conjugate((one, four)),
        gamma.map_points((two, four), neg_conj),
    ];
    Ok(AttractorSet {
        family: seq.clone(),
        curves,
        spokes: Vec::new(),
        segments: vec![Segment { start: (0.0, -beta), end: (0.0, beta) }],
    })
}

fn spokes(seq: &ExponentSequence, p: u64, policy: &PrecisionPolicy) -> Result<Vec<CurvePolyline>> {
    let controls = TraceControls::default();
    let functions = candidate_functions(seq)?;
    let wedge = |angle: f64| -> PhaseIndex {
        // The winner near angle: Re L of Li2(e_p(h) z)/p peaks at arg z = -2 pi h / p.
        let z = complex(0.5 * angle.cos(), 0.5 * angle.sin(), policy.bits());
        let mut best: Option<(PhaseIndex, Float)> = None;
        for pf in &functions {
            if let Ok(v) = pf.re_l(&z, policy) {
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((pf.index(), v));
                }
            }
        }
        best.expect("candidates exist").0
    };
    let lo = controls.eps_origin;
    let hi = 1.0 - controls.eps_circle;
    let mut out = Vec::with_capacity(p as usize);
    for j in 0..p {
        let angle = PI * (2 * j + 1) as f64 / p as f64;
        let delta = PI / p as f64 / 2.0;
        let (a, b) = (wedge(angle - delta), wedge(angle + delta));
        let pair = BoundaryPair::from_indices(seq, a.min(b), a.max(b))?;
        let mut points = Vec::with_capacity(SPOKE_SAMPLES);
        let mut residuals = Vec::with_capacity(SPOKE_SAMPLES);
        for i in 0..SPOKE_SAMPLES {
            let r = lo + (hi - lo) * i as f64 / (SPOKE_SAMPLES - 1) as f64;
            let z = spoke_point(angle, j, p, r, policy.bits());
            residuals.push(pair.difference(&z, policy)?.to_f64().abs());
            points.push(z);
        }
        out.push(CurvePolyline {
            pair: pair.indices(),
            points,
            residuals,
            termination: Termination::Constructed,
            junction: None,
        });
    }
    Ok(out)
}

fn spoke_point(_angle: f64, j: u64, p: u64, r: f64, bits: u32) -> Complex {
    let wp = bits + 16;
    let t = Float::with_val(wp, Constant::Pi) * (2 * j + 1) / p;
    let (s, c) = t.sin_cos(Float::new(wp));
    Complex::with_val(bits, (c * r, s * r))
}

#[derive(Serialize)]
struct CurveRecord {
    pair: [[u64; 2]; 2],
    termination: Termination,
    residual_max: f64,
    points: Vec<[f64; 2]>,
}

fn record(c: &CurvePolyline) -> CurveRecord {
    CurveRecord {
        pair: [[c.pair.0.h, c.pair.0.k], [c.pair.1.h, c.pair.1.k]],
        termination: c.termination.clone(),
        residual_max: c.residual_max(),
        points: c.points_f64().into_iter().map(|(x, y)| [x, y]).collect(),
    }
}

/// JSON `{family, curves: [{pair, points, residual_max, termination}]}`.
pub fn curves_json(seq: &ExponentSequence, curves: &[CurvePolyline]) -> serde_json::Value {
    let records: Vec<CurveRecord> = curves.iter().map(record).collect();
    serde_json::json!({ "family": seq.label(), "curves": records })
}

/// JSON description of a whole attractor.
pub fn attractor_json(set: &AttractorSet) -> serde_json::Value {
    let curves: Vec<CurveRecord> = set.curves.iter().map(record).collect();
    let spokes: Vec<CurveRecord> = set.spokes.iter().map(record).collect();
    serde_json::json!({
        "family": set.family.label(),
        "circle": { "center": [0.0, 0.0], "radius": 1.0 },
        "curves": curves,
        "spokes": spokes,
        "segments": set.segments,
    })
}

/// Flat CSV `curve,index,re,im,residual`.
pub fn write_curves_csv<W: Write>(curves: &[CurvePolyline], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["curve", "index", "re", "im", "residual"])?;
    for (c, curve) in curves.iter().enumerate() {
        for (i, ((x, y), r)) in curve.points_f64().into_iter().zip(&curve.residuals).enumerate() {
            writer.write_record([
                c.to_string(),
                i.to_string(),
                format!("{x:.17e}"),
                format!("{y:.17e}"),
                format!("{r:.3e}"),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn beta_lies_in_bracket() {
        let beta = find_beta(&policy()).unwrap().to_f64();
        assert!(beta > 0.75 && beta < 1.0);
        assert!((beta - 0.974740591146465).abs() < 1e-12);
    }

    #[test]
    fn circle_seed_without_crossing_is_rejected() {
        let seq = ExponentSequence::all_parts();
        let pair = BoundaryPair::from_indices(&seq, PhaseIndex::new(1, 1), PhaseIndex::new(1, 2)).unwrap();
        let err = seed_on_circle(&pair, (0.0, PI / 3.0), &policy()).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
        let z = seed_on_circle(&pair, (PI / 2.0, PI), &policy()).unwrap();
        let t = z.imag().to_f64().atan2(z.real().to_f64());
        assert!((t - 2.35362662840).abs() < 1e-9);
    }

    #[test]
    fn ode_rhs_is_odd_under_conjugation() {
        let seq = ExponentSequence::all_parts();
        let pair = BoundaryPair::from_indices(&seq, PhaseIndex::new(1, 1), PhaseIndex::new(1, 2)).unwrap();
        let a = ode_rhs(&pair, -0.4, 0.5, 1e-4, &policy()).unwrap();
        let b = ode_rhs(&pair, -0.4, -0.5, 1e-4, &policy()).unwrap();
        assert!((a + b).abs() < 1e-12);
        let err = ode_rhs(&pair, -0.4, 0.0, 1e-4, &policy()).unwrap_err();
        assert!(matches!(err, Error::Branch { .. }));
    }
}
