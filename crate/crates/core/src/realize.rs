//! Real realization along the circle `y = z` in the real points of the variety.
//!
//! Everything here is `f64`. The exact modules never depend on this one.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::Exec;
use crate::field::{FieldCtx, FieldElem};
use crate::jring::RingElement;
use crate::morphism::JMap;
use crate::poly::{X, Y, Z};
use num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("real realization needs a map over Q, got {0}")]
    NotReal(FieldCtx),
    #[error("both section values vanish at theta = {0}")]
    ChartDegenerate(f64),
    #[error("winding number unresolved: residual {residual:.3e}, {open_jumps} unresolved jumps")]
    Unresolved { residual: f64, open_jumps: usize },
    #[error("sample count must be at least 8")]
    TooFewSamples,
}

/// The point `gamma(theta)` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CirclePoint {
    pub fn at(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        CirclePoint { theta, x: 0.5 + c / 2.0, y: s / 2.0, z: s / 2.0 }
    }

    pub fn w(&self) -> f64 {
        1.0 - self.x
    }

    /// Residual of the surface equation `x(1-x) - yz`.
    pub fn surface_residual(&self) -> f64 {
        self.x * (1.0 - self.x) - self.y * self.z
    }
}

/// A point of the real projective line as an angle in `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rp1Angle(pub f64);

impl Rp1Angle {
    /// The line through `(p, q)`, or `None` for the zero vector.
    pub fn from_homog(p: f64, q: f64) -> Option<Self> {
        if p == 0.0 && q == 0.0 {
            return None;
        }
        let phi = q.atan2(p).rem_euclid(PI);
        Some(Rp1Angle(if phi >= PI { 0.0 } else { phi }))
    }

    /// Signed change from `self` to `other`, wrapped into `(-pi/2, pi/2]`.
    pub fn delta_to(&self, other: &Rp1Angle) -> f64 {
        wrap(other.0 - self.0)
    }

    /// Distance on the circle `R / pi Z`.
    pub fn distance(&self, other: &Rp1Angle) -> f64 {
        self.delta_to(other).abs()
    }
}

fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(PI);
    if r > PI / 2.0 {
        r - PI
    } else {
        r
    }
}

/// A ring element compiled to floating point terms `c * x^i y^j z^k`.
#[derive(Debug, Clone)]
struct RealPoly {
    terms: Vec<(f64, [i32; 3])>,
    exact: RingElement,
}

impl RealPoly {
    fn compile(e: &RingElement) -> Result<Self, RealizeError> {
        let terms = e
            .poly()
            .terms()
            .map(|(m, c)| {
                let c = c.to_f64().ok_or(RealizeError::NotReal(e.ctx()))?;
                Ok((c, [m.0[X] as i32, m.0[Y] as i32, m.0[Z] as i32]))
            })
            .collect::<Result<_, _>>()?;
        Ok(RealPoly { terms, exact: e.clone() })
    }

    /// The value and a bound on its rounding error.
    fn eval(&self, p: &CirclePoint) -> (f64, f64) {
        let (mut sum, mut mag, mut deg) = (0.0, 0.0, 0);
        for (c, [i, j, k]) in &self.terms {
            let t = c * p.x.powi(*i) * p.y.powi(*j) * p.z.powi(*k);
            sum += t;
            mag += t.abs();
            deg = deg.max(i + j + k);
        }
        let ops = (self.terms.len() + 2 * deg as usize + 4) as f64;
        (sum, ops * f64::EPSILON * mag)
    }

    fn eval_exact(&self, p: &ExactPoint) -> f64 {
        self.exact.eval(&p.x, &p.y, &p.y).to_f64().unwrap_or(0.0)
    }
}

/// A rational point of the circle close to `gamma(theta)`, from the half-angle
/// parametrization `x = 1 / (1 + t^2)`, `y = z = t / (1 + t^2)`.
struct ExactPoint {
    x: FieldElem,
    y: FieldElem,
}

impl ExactPoint {
    fn near(theta: f64) -> Self {
        let q = FieldCtx::Rationals;
        let rat = |v: f64| q.from_rational(&BigRational::from_float(v).expect("finite")).expect("rational");
        let half = 0.5 * theta;
        let one = q.one();
        if half.cos().abs() >= half.sin().abs() {
            // t = tan(theta / 2)
            let t = rat(half.tan());
            let d = &one + &(&t * &t);
            ExactPoint { x: one.try_div(&d).expect("nonzero"), y: t.try_div(&d).expect("nonzero") }
        } else {
            // u = cot(theta / 2): x = u^2 / (1 + u^2), y = u / (1 + u^2)
            let u = rat(half.cos() / half.sin());
            let d = &one + &(&u * &u);
            ExactPoint { x: (&u * &u).try_div(&d).expect("nonzero"), y: u.try_div(&d).expect("nonzero") }
        }
    }
}

/// Which half of the cover a value was read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealChart {
    /// `x != 0`: read `[s0_x : s1_x]`.
    Dx,
    /// `w != 0`: read `[s0_w : s1_w]`.
    Dw,
}

/// A map compiled for repeated numeric evaluation.
#[derive(Debug, Clone)]
pub struct RealMap {
    dx: [RealPoly; 2],
    dw: [RealPoly; 2],
}

impl RealMap {
    pub fn new(f: &JMap) -> Result<Self, RealizeError> {
        if f.ctx() != FieldCtx::Rationals {
            return Err(RealizeError::NotReal(f.ctx()));
        }
        match f {
            JMap::Row(r) => {
                let (a, b) = (RealPoly::compile(&r.a)?, RealPoly::compile(&r.b)?);
                Ok(RealMap { dx: [a.clone(), b.clone()], dw: [a, b] })
            }
            JMap::Sections(s) => {
                let g = s.generators();
                let c = |i: usize| RealPoly::compile(&g[i]);
                Ok(RealMap { dx: [c(0)?, c(2)?], dw: [c(1)?, c(3)?] })
            }
        }
    }

    /// The section pair in one chart. When cancellation leaves the floating
    /// point value within a small multiple of its error bound, the pair is
    /// recomputed exactly at a nearby rational point of the circle.
    pub fn chart_pair(&self, chart: RealChart, theta: f64) -> (f64, f64) {
        let p = CirclePoint::at(theta);
        let pair = match chart {
            RealChart::Dx => &self.dx,
            RealChart::Dw => &self.dw,
        };
        let ((a, ea), (b, eb)) = (pair[0].eval(&p), pair[1].eval(&p));
        if a.hypot(b) > 64.0 * (ea + eb) {
            return (a, b);
        }
        let e = ExactPoint::near(theta);
        (pair[0].eval_exact(&e), pair[1].eval_exact(&e))
    }

    /// The value read from one chart, `None` if both components vanish there.
    pub fn chart_value(&self, chart: RealChart, theta: f64) -> Option<Rp1Angle> {
        let (p, q) = self.chart_pair(chart, theta);
        Rp1Angle::from_homog(p, q)
    }

    /// Reads the chart where the defining coordinate is larger.
    pub fn eval(&self, theta: f64) -> Result<Rp1Angle, RealizeError> {
        self.chart_value(RealChart::for_theta(theta), theta).ok_or(RealizeError::ChartDegenerate(theta))
    }
}

impl RealChart {
    pub fn for_theta(theta: f64) -> Self {
        let p = CirclePoint::at(theta);
        if p.x.abs() >= p.w().abs() {
            RealChart::Dx
        } else {
            RealChart::Dw
        }
    }
}

pub fn eval_rp1(f: &JMap, theta: f64) -> Result<Rp1Angle, RealizeError> {
    RealMap::new(f)?.eval(theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    pub samples: usize,
    /// Adjacent samples further apart than this get bisected.
    pub jump_threshold: f64,
    pub max_depth: u32,
    pub exec: Exec,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions { samples: 4096, jump_threshold: PI / 4.0, max_depth: 20, exec: Exec::Parallel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub degree: i64,
    /// Total lifted angle change divided by `pi`.
    pub raw: f64,
    pub residual: f64,
    /// Number of angle evaluations, including refinement.
    pub evaluations: usize,
}

pub fn winding_degree(f: &JMap) -> Result<i64, RealizeError> {
    winding(f, &WindingOptions::default()).map(|w| w.degree)
}

/// Lifts `Re(f) o gamma` over `[0, 2 pi]` and reads off its degree.
///
/// Within one chart the section pair is an honest vector in the plane, so
/// each step is measured by its planar angle. A half turn of the line squeezed
/// between two samples (the pair passing close to the origin) then shows up
/// as a planar jump near `pi` and gets bisected, where the projective
/// difference alone would alias it to zero.
pub fn winding(f: &JMap, opts: &WindingOptions) -> Result<Winding, RealizeError> {
    if opts.samples < 8 {
        return Err(RealizeError::TooFewSamples);
    }
    let map = RealMap::new(f)?;
    let n = opts.samples;
    let theta = |i: usize| 2.0 * PI * (i as f64) / (n as f64);
    let pieces: Vec<Result<Piece, RealizeError>> = opts.exec.map_range(n, |i| {
        let (a, b) = (theta(i), theta(i + 1));
        let chart = RealChart::for_theta(0.5 * (a + b));
        let ends = (map.chart_pair(chart, a), map.chart_pair(chart, b));
        refine(&map, opts, chart, (a, ends.0), (b, ends.1), 0)
    });
    let mut total = Piece::default();
    for p in pieces {
        let p = p?;
        total.delta += p.delta;
        total.evaluations += p.evaluations;
        total.open_jumps += p.open_jumps;
    }
    let raw = total.delta / PI;
    let degree = raw.round();
    let residual = (raw - degree).abs();
    if residual >= 0.01 || total.open_jumps > 0 {
        return Err(RealizeError::Unresolved { residual, open_jumps: total.open_jumps });
    }
    Ok(Winding { degree: degree as i64, raw, residual, evaluations: 2 * n + total.evaluations })
}

#[derive(Debug, Default, Clone, Copy)]
struct Piece {
    delta: f64,
    evaluations: usize,
    open_jumps: usize,
}

/// Planar angle change from `a` to `b`, wrapped into `(-pi, pi]`.
fn plane_delta(theta: f64, a: (f64, f64), b: (f64, f64)) -> Result<f64, RealizeError> {
    if (a.0 == 0.0 && a.1 == 0.0) || (b.0 == 0.0 && b.1 == 0.0) {
        return Err(RealizeError::ChartDegenerate(theta));
    }
    let d = (b.1.atan2(b.0) - a.1.atan2(a.0)).rem_euclid(2.0 * PI);
    Ok(if d > PI { d - 2.0 * PI } else { d })
}

const STRAIGHT_DEPTH: u32 = 8;

/// Whether `m` sits on the chord from `a` to `b` to within a tenth of the
/// chord's distance from the origin.
fn is_straight(a: (f64, f64), m: (f64, f64), b: (f64, f64)) -> bool {
    let mid = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
    let dev = (m.0 - mid.0).hypot(m.1 - mid.1);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 { (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let dist = (a.0 + s * dx).hypot(a.1 + s * dy);
    dev < 0.1 * dist
}

fn refine(
    map: &RealMap,
    opts: &WindingOptions,
    chart: RealChart,
    (ta, pa): (f64, (f64, f64)),
    (tb, pb): (f64, (f64, f64)),
    depth: u32,
) -> Result<Piece, RealizeError> {
    let d = plane_delta(ta, pa, pb)?;
    if d.abs() <= opts.jump_threshold {
        return Ok(Piece { delta: d, ..Piece::default() });
    }
    let tm = 0.5 * (ta + tb);
    let pm = map.chart_pair(chart, tm);
    // On a short enough interval the pair moves along a straight segment, and
    // the planar angle it sweeps is exactly the wrapped difference, even for a
    // near miss of the origin.
    if depth >= STRAIGHT_DEPTH && is_straight(pa, pm, pb) {
        return Ok(Piece { delta: d, evaluations: 1, open_jumps: 0 });
    }
    if depth >= opts.max_depth {
        return Ok(Piece { delta: wrap(d), evaluations: 1, open_jumps: 1 });
    }
    let l = refine(map, opts, chart, (ta, pa), (tm, pm), depth + 1)?;
    let r = refine(map, opts, chart, (tm, pm), (tb, pb), depth + 1)?;
    Ok(Piece {
        delta: l.delta + r.delta,
        evaluations: 1 + l.evaluations + r.evaluations,
        open_jumps: l.open_jumps + r.open_jumps,
    })
}

/// Largest disagreement between the two charts over angles where both are
/// comfortably defined (`|x|, |w| > 0.05`).
pub fn chart_disagreement(f: &JMap, thetas: &[f64]) -> Result<f64, RealizeError> {
    let map = RealMap::new(f)?;
    let mut worst: f64 = 0.0;
    for &t in thetas {
        let p = CirclePoint::at(t);
        if p.x.abs() < 0.05 || p.w().abs() < 0.05 {
            continue;
        }
        let a = map.chart_value(RealChart::Dx, t).ok_or(RealizeError::ChartDegenerate(t))?;
        let b = map.chart_value(RealChart::Dw, t).ok_or(RealizeError::ChartDegenerate(t))?;
        worst = worst.max(a.distance(&b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::homgrp::{oplus, NegativeRefs, ReferenceFamily};
    use crate::morphism::{g_uv, m_uv, make_row, pi, pi_tilde};
    use crate::sl2::{act, boxplus_act, complete_pointed};

    const Q: FieldCtx = FieldCtx::Rationals;

    fn q(n: i64) -> crate::field::FieldElem {
        Q.from_i64(n)
    }

    fn r(n: i64) -> RingElement {
        RingElement::from_i64(Q, n)
    }

    fn f_row() -> JMap {
        // (2x - 1, 2z)
        let x = RingElement::x(Q);
        make_row(x.scale(&q(2)).sub(&r(1)), RingElement::z(Q).scale(&q(2))).unwrap()
    }

    fn sample_thetas() -> Vec<f64> {
        (0..97).map(|i| 0.013 + 2.0 * PI * i as f64 / 97.0).collect()
    }

    fn close(a: Rp1Angle, p: f64, qv: f64) -> bool {
        a.distance(&Rp1Angle::from_homog(p, qv).unwrap()) < 1e-9
    }

    #[test]
    fn circle_lies_on_surface() {
        for t in sample_thetas() {
            assert!(CirclePoint::at(t).surface_residual().abs() < 1e-12);
        }
    }

    #[test]
    fn angle_is_scale_invariant() {
        for &(p, qv) in &[(1.0, 2.0), (-3.0, 0.5), (0.0, 1.0), (2.0, 0.0)] {
            let a = Rp1Angle::from_homog(p, qv).unwrap();
            for lam in [-7.5, -1.0, 1e-3, 4.0] {
                assert!(a.distance(&Rp1Angle::from_homog(lam * p, lam * qv).unwrap()) < 1e-9);
            }
        }
        assert!(Rp1Angle::from_homog(0.0, 0.0).is_none());
    }

    #[test]
    fn pi_traces_half_angle() {
        let f = pi(Q);
        assert!(eval_rp1(&f, 0.0).unwrap().0.abs() < 1e-12);
        for t in sample_thetas() {
            let v = eval_rp1(&f, t).unwrap();
            if (t - PI).abs() > 1e-6 {
                assert!(close(v, 1.0 + t.cos(), t.sin()), "theta {t}");
            }
        }
        assert!(close(eval_rp1(&f, PI).unwrap(), 0.0, 1.0));
    }

    #[test]
    fn g_double_cover_and_twisted_pi() {
        let g = g_uv(&q(1), &q(-1)).unwrap();
        let m = m_uv(&q(1), &q(-1)).unwrap();
        let h = act(&m, &pi(Q)).unwrap();
        for t in sample_thetas() {
            assert!(close(eval_rp1(&g, t).unwrap(), t.cos(), t.sin()));
            if (t - PI).abs() > 1e-3 {
                let (p, qv) = (t.cos() + (2.0 * t).cos(), t.sin() + (2.0 * t).sin());
                assert!(close(eval_rp1(&h, t).unwrap(), p, qv), "theta {t}");
            }
        }
    }

    #[test]
    fn degree_table() {
        let refs = ReferenceFamily::new(Q, NegativeRefs::QBasis);
        let g = g_uv(&q(1), &q(-1)).unwrap();
        let m = m_uv(&q(1), &q(-1)).unwrap();
        let fm = complete_pointed(f_row().as_row().unwrap()).unwrap();
        let cases = [
            (pi(Q), 1),
            (g.clone(), 2),
            (act(&m, &pi(Q)).unwrap(), 3),
            (oplus(&g, &pi(Q), &refs).unwrap(), 3),
            (pi_tilde(Q), -1),
            (oplus(&f_row(), &pi_tilde(Q), &refs).unwrap(), 1),
            (act(&fm, &pi_tilde(Q)).unwrap(), 1),
            (boxplus_act(&fm, &pi(Q)).unwrap(), -1),
            (f_row(), 2),
        ];
        for (f, d) in cases {
            assert_eq!(winding_degree(&f).unwrap(), d, "{f}");
        }
    }

    #[test]
    fn modes_agree_and_residual_small() {
        let f = act(&m_uv(&q(1), &q(-1)).unwrap(), &pi(Q)).unwrap();
        let mut opts = WindingOptions::default();
        let a = winding(&f, &opts).unwrap();
        opts.exec = Exec::Sequential;
        let b = winding(&f, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.residual < 1e-9);
    }

    #[test]
    fn coarse_sampling_is_refined() {
        let f = act(&m_uv(&q(1), &q(-1)).unwrap(), &pi(Q)).unwrap();
        let opts = WindingOptions { samples: 8, ..WindingOptions::default() };
        let w = winding(&f, &opts).unwrap();
        assert_eq!(w.degree, 3);
        assert!(w.evaluations > 16);
    }

    #[test]
    fn exact_points_lie_on_surface_near_gamma() {
        for t in sample_thetas() {
            let e = ExactPoint::near(t);
            let one = Q.one();
            let w = &one - &e.x;
            assert_eq!(&e.x * &w, &e.y * &e.y, "theta {t}");
            let p = CirclePoint::at(t);
            assert!((e.x.to_f64().unwrap() - p.x).abs() < 1e-12);
            assert!((e.y.to_f64().unwrap() - p.y).abs() < 1e-12);
        }
    }

    #[test]
    fn straight_segment_test() {
        // a near miss of the origin along a line
        assert!(is_straight((1.0, 1e-9), (0.0, 1e-9), (-1.0, 1e-9)));
        assert!(plane_delta(0.0, (1.0, 1e-9), (-1.0, 1e-9)).unwrap() > 3.0);
        assert!(plane_delta(0.0, (1.0, -1e-9), (-1.0, -1e-9)).unwrap() < -3.0);
        // a bent path is not straight
        assert!(!is_straight((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)));
    }

    #[test]
    fn long_products_match_dense_sampling() {
        // Products of several pointed matrices have columns that pass close to
        // the origin; the coarse lift must agree with a much denser one and
        // stay even, as rows come from loops in the plane.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let dense = WindingOptions { samples: 1 << 17, ..WindingOptions::default() };
        for _ in 0..6 {
            let mut m = crate::corpus::twist(&mut rng, Q);
            for _ in 0..3 {
                m = m.mul(&crate::corpus::twist(&mut rng, Q));
            }
            let f = JMap::row_from_certified(m.first_column()).unwrap();
            let d = winding_degree(&f).unwrap();
            assert_eq!(d % 2, 0, "{f}");
            assert_eq!(d, winding(&f, &dense).unwrap().degree, "{f}");
        }
    }

    #[test]
    fn charts_agree() {
        let m = m_uv(&q(1), &q(-1)).unwrap();
        for f in [pi(Q), pi_tilde(Q), act(&m, &pi(Q)).unwrap()] {
            assert!(chart_disagreement(&f, &sample_thetas()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn prime_fields_are_rejected() {
        let f7 = FieldCtx::prime(7).unwrap();
        assert_eq!(winding_degree(&pi(f7)), Err(RealizeError::NotReal(f7)));
    }
}
