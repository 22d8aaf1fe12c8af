//! Pointed morphisms from the variety to the projective line, stored as data.
//!
//! A map of degree `n != 0` is a pair of sections of `P_n` (or `Q_|n|`),
//! written `(a0, a1; b0, b1)_n`. A map of degree zero is a unimodular row
//! `(A, B)`. Every value carries a certificate that its sections generate,
//! so downstream code can re-check generation by expansion alone.

use std::fmt;

use thiserror::Error;

use crate::bundle::{bezout_from_unit_resultant, mn_matrices, BundleError, BundleKind, HomogPair, Section};
use crate::field::{FieldCtx, FieldElem};
use crate::groebner::{unit_certificate, GroebnerError};
use crate::jring::RingElement;
use crate::sl2::{Mat2, PointedSL2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("sections do not generate the bundle")]
    NotGenerating,
    #[error("map is not pointed")]
    NotPointed,
    #[error("first section vanishes at the basepoint")]
    NotNormalizable,
    #[error("row is not unimodular")]
    NotUnimodular,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("resultant of the rational map vanishes")]
    ResultantZero,
    #[error("degree must be nonzero here")]
    ZeroDegree,
    #[error("generation certificate does not check")]
    BadCertificate,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// A pointed unimodular row `(A, B)` with a Bezout certificate `A*U + B*V = 1`.
#[derive(Debug, Clone)]
pub struct UnimodularRow {
    pub a: RingElement,
    pub b: RingElement,
    pub u: RingElement,
    pub v: RingElement,
}

impl UnimodularRow {
    pub fn certificate_holds(&self) -> bool {
        self.a.mul(&self.u).add(&self.b.mul(&self.v)) == RingElement::one(self.a.ctx())
    }
}

/// Cofactors `c` with `c0*s0_x + c1*s0_w + c2*s1_x + c3*s1_w = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenCert(pub [RingElement; 4]);

#[derive(Debug, Clone)]
pub struct SectionMap {
    pub s0: Section,
    pub s1: Section,
    pub cert: GenCert,
}

impl SectionMap {
    pub fn degree(&self) -> i32 {
        self.s0.kind().degree()
    }

    pub fn generators(&self) -> [RingElement; 4] {
        [
            self.s0.expanded().0.clone(),
            self.s0.expanded().1.clone(),
            self.s1.expanded().0.clone(),
            self.s1.expanded().1.clone(),
        ]
    }

    pub fn coeffs(&self) -> [RingElement; 4] {
        [self.s0.coeffs().0.clone(), self.s0.coeffs().1.clone(), self.s1.coeffs().0.clone(), self.s1.coeffs().1.clone()]
    }

    pub fn certificate_holds(&self) -> bool {
        let ctx = self.s0.coeffs().0.ctx();
        let mut sum = RingElement::zero(ctx);
        for (c, g) in self.cert.0.iter().zip(self.generators()) {
            sum = sum.add(&c.mul(&g));
        }
        sum == RingElement::one(ctx)
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum JMap {
    Row(UnimodularRow),
    Sections(SectionMap),
}

/// Maps compare by degree and expanded section data; certificates are ignored.
impl PartialEq for JMap {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JMap::Row(r), JMap::Row(s)) => r.a == s.a && r.b == s.b,
            (JMap::Sections(f), JMap::Sections(g)) => f.s0 == g.s0 && f.s1 == g.s1,
            _ => false,
        }
    }
}

impl Eq for JMap {}

pub fn map_equal(f: &JMap, g: &JMap) -> bool {
    f == g
}

impl JMap {
    pub fn degree(&self) -> i32 {
        match self {
            JMap::Row(_) => 0,
            JMap::Sections(s) => s.degree(),
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        match self {
            JMap::Row(r) => r.a.ctx(),
            JMap::Sections(s) => s.s0.coeffs().0.ctx(),
        }
    }

    pub fn as_row(&self) -> Option<&UnimodularRow> {
        match self {
            JMap::Row(r) => Some(r),
            JMap::Sections(_) => None,
        }
    }

    pub fn as_sections(&self) -> Option<&SectionMap> {
        match self {
            JMap::Sections(s) => Some(s),
            JMap::Row(_) => None,
        }
    }

    /// Builds a section map from coefficients and a certificate, checking
    /// pointedness, normalization and the certificate (by expansion).
    pub fn from_certified(n: i32, c: [RingElement; 4], cert: GenCert) -> Result<JMap, MorphismError> {
        if n == 0 {
            return Err(MorphismError::ZeroDegree);
        }
        let kind = BundleKind::for_degree(n);
        let [a0, a1, b0, b1] = c;
        let map = SectionMap { s0: Section::new(kind, a0, a1), s1: Section::new(kind, b0, b1), cert };
        if !map.certificate_holds() {
            return Err(MorphismError::BadCertificate);
        }
        normalize_sections(map)
    }

    /// Builds a row from data and a Bezout certificate, checking both.
    pub fn row_from_certified(row: UnimodularRow) -> Result<JMap, MorphismError> {
        if !row.certificate_holds() {
            return Err(MorphismError::BadCertificate);
        }
        normalize_row(row)
    }
}

fn normalize_sections(map: SectionMap) -> Result<JMap, MorphismError> {
    if !map.s1.expanded().0.eval_basepoint().is_zero() {
        return Err(MorphismError::NotPointed);
    }
    let alpha = map.s0.expanded().0.eval_basepoint();
    if alpha.is_zero() {
        return Err(MorphismError::NotNormalizable);
    }
    if alpha.is_one() {
        return Ok(JMap::Sections(map));
    }
    let inv = alpha.inv().expect("nonzero");
    let kind = map.s0.kind();
    let s = |x: &RingElement| x.scale(&inv);
    Ok(JMap::Sections(SectionMap {
        s0: Section::new(kind, s(map.s0.coeffs().0), s(map.s0.coeffs().1)),
        s1: Section::new(kind, s(map.s1.coeffs().0), s(map.s1.coeffs().1)),
        cert: GenCert(map.cert.0.map(|c| c.scale(&alpha))),
    }))
}

fn normalize_row(row: UnimodularRow) -> Result<JMap, MorphismError> {
    if !row.b.eval_basepoint().is_zero() {
        return Err(MorphismError::NotPointed);
    }
    let alpha = row.a.eval_basepoint();
    let inv = alpha.inv().map_err(|_| MorphismError::NotNormalizable)?;
    Ok(JMap::Row(UnimodularRow {
        a: row.a.scale(&inv),
        b: row.b.scale(&inv),
        u: row.u.scale(&alpha),
        v: row.v.scale(&alpha),
    }))
}

fn groebner_cofactors(gens: &[RingElement]) -> Result<Option<Vec<RingElement>>, MorphismError> {
    let polys: Vec<_> = gens.iter().map(|g| g.poly().clone()).collect();
    Ok(unit_certificate(&polys, true)?.map(|cert| {
        cert.cofactors
            .iter()
            .map(|c| RingElement::normal_form(c).expect("cofactors of T-free input are T-free"))
            .collect()
    }))
}

/// Validates and normalizes `(a0, a1; b0, b1)_n`.
pub fn make_map(
    n: i32,
    a0: RingElement,
    a1: RingElement,
    b0: RingElement,
    b1: RingElement,
) -> Result<JMap, MorphismError> {
    if n == 0 {
        return Err(MorphismError::ZeroDegree);
    }
    let kind = BundleKind::for_degree(n);
    let (s0, s1) = (Section::new(kind, a0, a1), Section::new(kind, b0, b1));
    let gens = [s0.expanded().0.clone(), s0.expanded().1.clone(), s1.expanded().0.clone(), s1.expanded().1.clone()];
    let cof = groebner_cofactors(&gens)?.ok_or(MorphismError::NotGenerating)?;
    let cert = GenCert([cof[0].clone(), cof[1].clone(), cof[2].clone(), cof[3].clone()]);
    normalize_sections(SectionMap { s0, s1, cert })
}

/// Validates and normalizes a degree-zero map `(A, B)`.
pub fn make_row(a: RingElement, b: RingElement) -> Result<JMap, MorphismError> {
    let cof = groebner_cofactors(&[a.clone(), b.clone()])?.ok_or(MorphismError::NotUnimodular)?;
    normalize_row(UnimodularRow { a, b, u: cof[0].clone(), v: cof[1].clone() })
}

fn ring_consts(ctx: FieldCtx) -> (RingElement, RingElement, RingElement, RingElement) {
    (RingElement::x(ctx), RingElement::y(ctx), RingElement::z(ctx), RingElement::w(ctx))
}

/// `pi = (1, 0; 0, 1)_1`, the projection itself.
pub fn pi(ctx: FieldCtx) -> JMap {
    let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
    // x + w = 1 gives the certificate directly.
    let cert = GenCert([one.clone(), zero.clone(), zero.clone(), one.clone()]);
    JMap::from_certified(1, [one.clone(), zero.clone(), zero, one], cert).expect("pi is a valid map")
}

/// `(1, 0; 0, -1)_{-1}`, a candidate for the inverse of `pi`.
pub fn pi_tilde(ctx: FieldCtx) -> JMap {
    let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
    let cert = GenCert([one.clone(), zero.clone(), zero.clone(), one.neg()]);
    JMap::from_certified(-1, [one.clone(), zero.clone(), zero, one.neg()], cert).expect("valid map")
}

/// `g_{u,v} = (x + (v/u) w, (u - v) y)`, carrying the completion `m_{u,v}` as its certificate.
pub fn g_uv(u: &FieldElem, v: &FieldElem) -> Result<JMap, MorphismError> {
    let m = m_uv(u, v)?;
    Ok(JMap::Row(m.first_column()))
}

/// The pointed completion of `g_{u,v}`:
/// `[[x + (v/u) w, (u - v)/(uv) z], [(u - v) y, x + (u/v) w]]`.
pub fn m_uv(u: &FieldElem, v: &FieldElem) -> Result<PointedSL2, MorphismError> {
    if u.is_zero() || v.is_zero() {
        return Err(MorphismError::ZeroParameter);
    }
    let ctx = u.ctx();
    let (x, y, z, w) = ring_consts(ctx);
    let diff = u - v;
    let m =
        Mat2::new(x.add(&w.scale(&(v / u))), z.scale(&(&diff / &(u * v))), y.scale(&diff), x.add(&w.scale(&(u / v))));
    Ok(PointedSL2::new(m).expect("m_uv is pointed of determinant one"))
}

/// A pointed rational self-map `A/B` of the projective line: `A` monic of
/// degree `n`, `deg B < n`, with nonvanishing resultant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMapP1 {
    pub a: Vec<FieldElem>,
    pub b: Vec<FieldElem>,
}

impl RationalMapP1 {
    /// `a` lists `a0..a_{n-1}` (the leading one is implied); `b` lists `b0..b_{n-1}`.
    pub fn new(ctx: FieldCtx, a_lower: &[FieldElem], b: &[FieldElem]) -> Result<Self, MorphismError> {
        let n = a_lower.len();
        if n == 0 || b.len() > n {
            return Err(MorphismError::ZeroDegree);
        }
        let mut a = a_lower.to_vec();
        a.push(ctx.one());
        let mut b = b.to_vec();
        b.resize(n, ctx.zero());
        let f = RationalMapP1 { a, b };
        if f.resultant().is_zero() {
            return Err(MorphismError::ResultantZero);
        }
        Ok(f)
    }

    /// `X / u`.
    pub fn x_over(u: &FieldElem) -> Result<Self, MorphismError> {
        if u.is_zero() {
            return Err(MorphismError::ZeroParameter);
        }
        Self::new(u.ctx(), &[u.ctx().zero()], std::slice::from_ref(u))
    }

    pub fn degree(&self) -> u32 {
        self.b.len() as u32
    }

    pub fn ctx(&self) -> FieldCtx {
        self.a[0].ctx()
    }

    /// The pair as binary forms of degree `n` with `b_n = 0`.
    pub fn homog_pair(&self) -> HomogPair {
        let ctx = self.ctx();
        let lift = |v: &[FieldElem]| v.iter().cloned().map(RingElement::constant).collect::<Vec<_>>();
        let mut b = lift(&self.b);
        b.push(RingElement::zero(ctx));
        HomogPair::new(self.degree(), lift(&self.a), b).expect("lengths match")
    }

    pub fn resultant(&self) -> FieldElem {
        self.homog_pair().resultant().poly().constant_term()
    }
}

/// Pulls a pointed rational map back along the projection.
pub fn pullback_rational(f: &RationalMapP1) -> Result<JMap, MorphismError> {
    if f.resultant().is_zero() {
        return Err(MorphismError::ResultantZero);
    }
    sigma_map(&f.homog_pair())
}

/// Evaluates a binary form of degree `len - 1`, listed by ascending power of
/// the first variable, at `(p, q)`.
fn eval_form(c: &[RingElement], p: &RingElement, q: &RingElement) -> RingElement {
    let d = c.len() as u32 - 1;
    let ctx = p.ctx();
    c.iter()
        .enumerate()
        .fold(RingElement::zero(ctx), |acc, (i, a)| acc.add(&a.mul(&p.pow(i as u32)).mul(&q.pow(d - i as u32))))
}

/// The map `[sigma(F0), sigma(F1)]` for a pair of constant binary forms with
/// nonzero resultant, with an explicit certificate.
///
/// The expanded components are `F(x, y)` and `F(z, w)`. Bezout for the forms
/// puts `alpha^N` and `beta^N` (`N = 2n - 1`) in `(F0, F1)`; evaluating at
/// `(x, y)` and `(z, w)` and using `x^N A + w^N B = 1` gives the cofactors.
fn sigma_map(pair: &HomogPair) -> Result<JMap, MorphismError> {
    let n = pair.n;
    let ctx = pair.s0[0].ctx();
    let (x, y, z, w) = ring_consts(ctx);
    let (ub, vb) = bezout_from_unit_resultant(&pair.s0, &pair.s1).map_err(|_| MorphismError::ResultantZero)?;
    let rev = |v: &[RingElement]| v.iter().rev().cloned().collect::<Vec<_>>();
    let (ua, va) =
        bezout_from_unit_resultant(&rev(&pair.s0), &rev(&pair.s1)).map_err(|_| MorphismError::ResultantZero)?;
    // Pad to n coefficients: forms of degree n - 1.
    let pad = |mut v: Vec<RingElement>| {
        v.resize(n as usize, RingElement::zero(ctx));
        v
    };
    let (ub, vb, ua, va) = (pad(ub), pad(vb), rev(&pad(ua)), rev(&pad(va)));
    let big = mn_matrices(ctx, 2 * n - 1)?;
    let cert = GenCert([
        big.a.mul(&eval_form(&ua, &x, &y)),
        big.b.mul(&eval_form(&ub, &z, &w)),
        big.a.mul(&eval_form(&va, &x, &y)),
        big.b.mul(&eval_form(&vb, &z, &w)),
    ]);
    let (s0, s1) = pair.sigma()?;
    let c = [s0.coeffs().0.clone(), s0.coeffs().1.clone(), s1.coeffs().0.clone(), s1.coeffs().1.clone()];
    JMap::from_certified(n as i32, c, cert)
}

/// The recursive representative of `n` times the class of `pi`.
///
/// `F_0 = 1`, `F_1 = (x; z)`, `F_{k+1} = (x; z) F_k - (y^2; w^2) F_{k-1}`, with
/// sections `[F_n, (y; w) F_{n-1}]`. Under `sigma` this is the binary-form
/// recursion `Phi_{k+1} = alpha Phi_k - beta^2 Phi_{k-1}`.
pub fn n_pi(ctx: FieldCtx, n: u32) -> Result<JMap, MorphismError> {
    if n == 0 {
        return Err(MorphismError::ZeroDegree);
    }
    if n == 1 {
        return Ok(pi(ctx));
    }
    // Coefficients indexed by the power of alpha.
    let mut prev = vec![ctx.one()];
    let mut cur = vec![ctx.zero(), ctx.one()];
    for _ in 1..n {
        let mut next = vec![ctx.zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] = &next[i] - c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let lift = |v: &[FieldElem]| v.iter().cloned().map(RingElement::constant).collect::<Vec<_>>();
    let mut s1 = lift(&prev);
    s1.push(RingElement::zero(ctx));
    sigma_map(&HomogPair::new(n, lift(&cur), s1)?)
}

impl fmt::Display for JMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JMap::Row(r) => write!(f, "row [{}; {}]", r.a, r.b),
            JMap::Sections(s) => {
                let [a0, a1, b0, b1] = s.coeffs();
                write!(f, "map {} [{a0}; {a1} | {b0}; {b1}]", s.degree())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn r(ctx: FieldCtx, s: &str) -> RingElement {
        RingElement::normal_form(&parse_poly(ctx, s).unwrap()).unwrap()
    }

    fn mk(ctx: FieldCtx, n: i32, c: [&str; 4]) -> Result<JMap, MorphismError> {
        make_map(n, r(ctx, c[0]), r(ctx, c[1]), r(ctx, c[2]), r(ctx, c[3]))
    }

    #[test]
    fn make_map_examples() {
        let k = q();
        assert_eq!(mk(k, 1, ["1", "0", "0", "1"]).unwrap(), pi(k));
        assert_eq!(mk(k, -1, ["1", "0", "0", "-1"]).unwrap(), pi_tilde(k));
        assert_eq!(mk(k, 1, ["1", "0", "0", "0"]), Err(MorphismError::NotGenerating));
        assert_eq!(mk(k, 1, ["1", "0", "1", "1"]), Err(MorphismError::NotPointed));
        assert_ne!(pi(k), pi_tilde(k));
    }

    #[test]
    fn normalization_rescales() {
        let k = q();
        let f = mk(k, 1, ["3", "0", "0", "3"]).unwrap();
        assert_eq!(f, pi(k));
        assert!(f.as_sections().unwrap().certificate_holds());
    }

    #[test]
    fn make_row_examples() {
        let k = q();
        let g = make_row(r(k, "2*x - 1"), r(k, "2*y")).unwrap();
        assert_eq!(g, g_uv(&k.one(), &k.from_i64(-1)).unwrap());
        assert!(make_row(r(k, "1"), r(k, "0")).is_ok());
        assert_eq!(make_row(r(k, "y"), r(k, "z")), Err(MorphismError::NotUnimodular));
        assert_eq!(make_row(r(k, "w"), r(k, "x")), Err(MorphismError::NotPointed));
    }

    #[test]
    fn g_and_m() {
        let k = q();
        let (one, m1) = (k.one(), k.from_i64(-1));
        let m = m_uv(&one, &m1).unwrap();
        assert_eq!(m.matrix(), &Mat2::new(r(k, "2*x - 1"), r(k, "-2*z"), r(k, "2*y"), r(k, "2*x - 1")));
        let three = k.from_i64(3);
        assert_eq!(g_uv(&three, &three).unwrap(), make_row(r(k, "1"), r(k, "0")).unwrap());
        assert_eq!(m_uv(&three, &k.from_i64(2)).unwrap().matrix().det(), RingElement::one(k));
        assert_eq!(g_uv(&k.zero(), &one), Err(MorphismError::ZeroParameter));
        assert_ne!(g_uv(&three, &one).unwrap(), g_uv(&k.from_i64(5), &one).unwrap());
    }

    #[test]
    fn n_pi_examples() {
        let k = q();
        assert_eq!(n_pi(k, 1).unwrap(), pi(k));
        let two = n_pi(k, 2).unwrap();
        let s = two.as_sections().unwrap();
        assert_eq!(s.s0.expanded(), (&r(k, "x^2 - y^2"), &r(k, "z^2 - w^2")));
        assert_eq!(s.s1.expanded(), (&r(k, "x*y"), &r(k, "z*w")));
        let three = n_pi(k, 3).unwrap();
        let s3 = three.as_sections().unwrap();
        let f2 = (r(k, "x^2 - y^2"), r(k, "z^2 - w^2"));
        assert_eq!(s3.s0.expanded().0, &r(k, "x").mul(&f2.0).sub(&r(k, "y^2*x")));
        assert_eq!(s3.s0.expanded().1, &r(k, "z").mul(&f2.1).sub(&r(k, "w^2*z")));
        assert!(s3.certificate_holds());
    }

    #[test]
    fn pullback_examples() {
        let k = q();
        let u = k.from_i64(5);
        let f = pullback_rational(&RationalMapP1::x_over(&u).unwrap()).unwrap();
        assert_eq!(f, mk(k, 1, ["1", "0", "0", "5"]).unwrap());
        assert_eq!(pullback_rational(&RationalMapP1::x_over(&k.one()).unwrap()).unwrap(), pi(k));
        // (X^2 + 1)/X
        let g = RationalMapP1::new(k, &[k.one(), k.zero()], &[k.zero(), k.one()]).unwrap();
        let jm = pullback_rational(&g).unwrap();
        assert_eq!(jm.degree(), 2);
        assert!(jm.as_sections().unwrap().certificate_holds());
        assert_eq!(
            RationalMapP1::new(k, &[k.zero(), k.zero()], &[k.zero(), k.one()]),
            Err(MorphismError::ResultantZero)
        );
    }

    #[test]
    fn pullbacks_over_prime_fields() {
        let f7 = FieldCtx::prime(7).unwrap();
        let g = RationalMapP1::new(f7, &[f7.from_i64(3), f7.from_i64(2)], &[f7.from_i64(1), f7.from_i64(4)]).unwrap();
        let jm = pullback_rational(&g).unwrap();
        assert_eq!(jm.degree(), 2);
    }
}
