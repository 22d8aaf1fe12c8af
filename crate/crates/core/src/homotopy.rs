//! Pointed naive homotopies as checkable data.
//!
//! A [`HomotopyWitness`] is a chain of segments, each a map over `R[T]`. The
//! verifier checks pointedness along `j x A^1`, that consecutive segments
//! agree at their ends, that the chain starts and ends where claimed, and that
//! every segment generates over `R[T]`. Constructors attach generation
//! certificates when they can transport one; otherwise the verifier falls back
//! to a Groebner computation with `T` adjoined.

use std::fmt;

use thiserror::Error;

use crate::bundle::{expand, mu_product, BundleKind, Section};
use crate::exec::Exec;
use crate::field::{FieldCtx, FieldElem};
use crate::groebner::{unit_certificate, GroebnerError};
use crate::jring::{normal_form, RingElement, RingPolyT};
use crate::morphism::{pi, GenCert, JMap, UnimodularRow};
use crate::sl2::{Mat2, PointedSL2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("the lifts complete different rows")]
    LiftMismatch,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("no Bezout certificate over R[T] could be found")]
    NoCertificate,
    #[error("segment is not pointed along the basepoint line")]
    NotPointed,
    #[error("the constructed sections do not generate over R[T]")]
    ResultantNotUnit,
    #[error("expected a map of positive degree")]
    NeedsPositiveDegree,
    #[error("expected a degree-zero homotopy")]
    NeedsDegreeZero,
    #[error("a witness needs at least one segment")]
    Empty,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// Normalized comparison data for a map: expanded sections (or the row)
/// scaled so that the first component is one at the basepoint.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapKey {
    Row(RingElement, RingElement),
    Sections(Section, Section),
}

impl MapKey {
    pub fn of(f: &JMap) -> MapKey {
        match f {
            JMap::Row(r) => MapKey::Row(r.a.clone(), r.b.clone()),
            JMap::Sections(s) => MapKey::Sections(s.s0.clone(), s.s1.clone()),
        }
    }

    fn row(a: RingElement, b: RingElement) -> Option<MapKey> {
        let inv = a.eval_basepoint().inv().ok()?;
        Some(MapKey::Row(a.scale(&inv), b.scale(&inv)))
    }

    fn sections(kind: BundleKind, c: [RingElement; 4]) -> Option<MapKey> {
        let s0 = Section::new(kind, c[0].clone(), c[1].clone());
        let inv = s0.expanded().0.eval_basepoint().inv().ok()?;
        let [a0, a1, b0, b1] = c.map(|e| e.scale(&inv));
        Some(MapKey::Sections(Section::new(kind, a0, a1), Section::new(kind, b0, b1)))
    }
}

/// Section data over `R[T]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Path {
    Row { a: RingPolyT, b: RingPolyT },
    Sections { kind: BundleKind, c: [RingPolyT; 4] },
}

/// One elementary homotopy. `cert` holds cofactors over `R[T]`: `(U, V)` with
/// `AU + BV = 1` for rows, or four cofactors of the expanded components
/// `(s0_x, s0_w, s1_x, s1_w)` for sections.
#[derive(Debug, Clone)]
pub struct Segment {
    pub path: Path,
    pub cert: Option<Vec<RingPolyT>>,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.path == o.path
    }
}

fn t_const(c: &FieldElem) -> RingPolyT {
    RingPolyT::constant(c.clone())
}

fn k_t_poly(ctx: FieldCtx, coeffs: &[FieldElem]) -> RingPolyT {
    let lifted: Vec<RingElement> = coeffs.iter().cloned().map(RingElement::constant).collect();
    RingPolyT::from_coeffs(&lifted, ctx)
}

impl Segment {
    pub fn new(path: Path) -> Self {
        Segment { path, cert: None }
    }

    pub fn with_cert(path: Path, cert: Vec<RingPolyT>) -> Self {
        Segment { path, cert: Some(cert) }
    }

    pub fn degree(&self) -> i32 {
        match &self.path {
            Path::Row { .. } => 0,
            Path::Sections { kind, .. } => kind.degree(),
        }
    }

    pub fn ctx(&self) -> FieldCtx {
        match &self.path {
            Path::Row { a, .. } => a.ctx(),
            Path::Sections { c, .. } => c[0].ctx(),
        }
    }

    /// The ideal generators whose unit-ness means the segment generates.
    pub fn generators(&self) -> Vec<RingPolyT> {
        match &self.path {
            Path::Row { a, b } => vec![a.clone(), b.clone()],
            Path::Sections { kind, c } => {
                let (s0x, s0w) = expand(*kind, &c[0], &c[1]);
                let (s1x, s1w) = expand(*kind, &c[2], &c[3]);
                vec![s0x, s0w, s1x, s1w]
            }
        }
    }

    /// The first component is a nonzero constant and the second vanishes along `j x A^1`.
    pub fn is_pointed(&self) -> bool {
        let g = self.generators();
        let (first, second) = match &self.path {
            Path::Row { .. } => (&g[0], &g[1]),
            Path::Sections { .. } => (&g[0], &g[2]),
        };
        first.basepoint_curve().len() == 1 && second.basepoint_curve().is_empty()
    }

    pub fn certificate_holds(&self) -> bool {
        let Some(cert) = &self.cert else { return false };
        let gens = self.generators();
        if cert.len() != gens.len() {
            return false;
        }
        let ctx = self.ctx();
        let sum = cert.iter().zip(&gens).fold(RingPolyT::zero(ctx), |acc, (c, g)| acc.add(&c.mul(g)));
        sum == RingPolyT::one(ctx)
    }

    fn groebner_cert(&self) -> Result<Option<Vec<RingPolyT>>, GroebnerError> {
        let polys: Vec<_> = self.generators().iter().map(|g| g.poly().clone()).collect();
        Ok(unit_certificate(&polys, true)?.map(|c| c.cofactors.iter().map(normal_form).collect()))
    }

    /// Generation over `R[T]`: the stored certificate if it checks, else Groebner.
    pub fn generates(&self) -> Result<bool, GroebnerError> {
        if self.certificate_holds() {
            return Ok(true);
        }
        Ok(self.groebner_cert()?.is_some())
    }

    /// Ensures a checked certificate is attached.
    pub fn certify(mut self) -> Result<Self, HomotopyError> {
        if !self.certificate_holds() {
            self.cert = Some(self.groebner_cert()?.ok_or(HomotopyError::ResultantNotUnit)?);
        }
        Ok(self)
    }

    pub fn strip_cert(mut self) -> Self {
        self.cert = None;
        self
    }

    pub fn key_at(&self, t: &FieldElem) -> Option<MapKey> {
        match &self.path {
            Path::Row { a, b } => MapKey::row(a.eval_t(t), b.eval_t(t)),
            Path::Sections { kind, c } => MapKey::sections(*kind, c.clone().map(|e| e.eval_t(t))),
        }
    }

    /// The map at `t`, carrying the specialized certificate.
    pub fn map_at(&self, t: &FieldElem) -> Option<JMap> {
        if !self.certificate_holds() {
            return None;
        }
        let cert: Vec<RingElement> = self.cert.as_ref()?.iter().map(|c| c.eval_t(t)).collect();
        match &self.path {
            Path::Row { a, b } => JMap::row_from_certified(UnimodularRow {
                a: a.eval_t(t),
                b: b.eval_t(t),
                u: cert[0].clone(),
                v: cert[1].clone(),
            })
            .ok(),
            Path::Sections { kind, c } => {
                let cert = GenCert([cert[0].clone(), cert[1].clone(), cert[2].clone(), cert[3].clone()]);
                JMap::from_certified(kind.degree(), c.clone().map(|e| e.eval_t(t)), cert).ok()
            }
        }
    }

    pub fn constant(f: &JMap) -> Self {
        match f {
            JMap::Row(r) => {
                Segment::with_cert(Path::Row { a: r.a.to_t(), b: r.b.to_t() }, vec![r.u.to_t(), r.v.to_t()])
            }
            JMap::Sections(s) => Segment::with_cert(
                Path::Sections { kind: s.s0.kind(), c: s.coeffs().map(|e| e.to_t()) },
                s.cert.0.iter().map(RingElement::to_t).collect(),
            ),
        }
    }

    /// A degree-zero segment from a path in `SL_2(R[T])`: its first column,
    /// certified by the second.
    pub fn from_sl2_path(p: &Mat2<RingPolyT>) -> Self {
        Segment::with_cert(
            Path::Row { a: p.m[0][0].clone(), b: p.m[1][0].clone() },
            vec![p.m[1][1].clone(), p.m[0][1].neg()],
        )
    }

    /// `T -> 1 - T`.
    pub fn reversed(&self) -> Self {
        let ctx = self.ctx();
        let (m1, one) = (ctx.from_i64(-1), ctx.one());
        let rp = |e: &RingPolyT| e.reparametrize(&m1, &one);
        let path = match &self.path {
            Path::Row { a, b } => Path::Row { a: rp(a), b: rp(b) },
            Path::Sections { kind, c } => Path::Sections { kind: *kind, c: c.clone().map(|e| rp(&e)) },
        };
        Segment { path, cert: self.cert.as_ref().map(|c| c.iter().map(rp).collect()) }
    }

    /// Left multiplication by a matrix over `R[T]` (of determinant one),
    /// transporting the certificate.
    pub fn transform(&self, m: &Mat2<RingPolyT>) -> Self {
        let inv = m.adjugate();
        match &self.path {
            Path::Row { a, b } => {
                let (a2, b2) = m.apply((a, b));
                let cert = self.cert.as_ref().map(|c| {
                    let (mv, u) = m.apply((&c[1].neg(), &c[0]));
                    vec![u, mv.neg()]
                });
                Segment { path: Path::Row { a: a2, b: b2 }, cert }
            }
            Path::Sections { kind, c } => {
                let (a0, b0) = m.apply((&c[0], &c[2]));
                let (a1, b1) = m.apply((&c[1], &c[3]));
                let cert = self.cert.as_ref().map(|c| {
                    let (cx0, cx1) = inv.apply_left((&c[0], &c[2]));
                    let (cw0, cw1) = inv.apply_left((&c[1], &c[3]));
                    vec![cx0, cw0, cx1, cw1]
                });
                Segment { path: Path::Sections { kind: *kind, c: [a0, a1, b0, b1] }, cert }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyWitness {
    pub segments: Vec<Segment>,
}

impl HomotopyWitness {
    pub fn new(segments: Vec<Segment>) -> Result<Self, HomotopyError> {
        if segments.is_empty() {
            return Err(HomotopyError::Empty);
        }
        Ok(HomotopyWitness { segments })
    }

    pub fn constant(f: &JMap) -> Self {
        HomotopyWitness { segments: vec![Segment::constant(f)] }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.segments[0].ctx()
    }

    pub fn degree(&self) -> i32 {
        self.segments[0].degree()
    }

    pub fn then(mut self, other: HomotopyWitness) -> Self {
        self.segments.extend(other.segments);
        self
    }

    pub fn reversed(&self) -> Self {
        HomotopyWitness { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    pub fn start(&self) -> Option<MapKey> {
        self.segments[0].key_at(&self.ctx().zero())
    }

    pub fn end(&self) -> Option<MapKey> {
        self.segments.last()?.key_at(&self.ctx().one())
    }

    /// The endpoint maps, when the end segments carry certificates.
    pub fn start_map(&self) -> Option<JMap> {
        self.segments[0].map_at(&self.ctx().zero())
    }

    pub fn end_map(&self) -> Option<JMap> {
        self.segments.last()?.map_at(&self.ctx().one())
    }

    pub fn strip_certs(self) -> Self {
        HomotopyWitness { segments: self.segments.into_iter().map(Segment::strip_cert).collect() }
    }

    /// Total number of stored polynomial coefficients, for mutation tests.
    pub fn coefficient_count(&self) -> usize {
        self.segments
            .iter()
            .map(|s| match &s.path {
                Path::Row { a, b } => a.poly().num_terms() + b.poly().num_terms(),
                Path::Sections { c, .. } => c.iter().map(|e| e.poly().num_terms()).sum(),
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    EndpointMismatch(Endpoint),
    NotPointedAtT { segment: usize },
    NotGeneratingOverRT { segment: usize },
    ChainBreak { segment: usize },
    Undecided { segment: usize, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::EndpointMismatch(Endpoint::Start) => write!(f, "invalid: start does not match"),
            Verdict::EndpointMismatch(Endpoint::End) => write!(f, "invalid: end does not match"),
            Verdict::NotPointedAtT { segment } => write!(f, "invalid: segment {segment} is not pointed"),
            Verdict::NotGeneratingOverRT { segment } => {
                write!(f, "invalid: segment {segment} does not generate over R[T]")
            }
            Verdict::ChainBreak { segment } => {
                write!(f, "invalid: segment {segment} does not start where the previous one ends")
            }
            Verdict::Undecided { segment, reason } => write!(f, "undecided: segment {segment}: {reason}"),
        }
    }
}

pub fn verify(w: &HomotopyWitness, f: &JMap, g: &JMap) -> Verdict {
    verify_with(w, f, g, Exec::default())
}

/// Checks pointedness, then the chain and its endpoints, then generation
/// (segments in parallel under `exec`). The first failure found is reported.
pub fn verify_with(w: &HomotopyWitness, f: &JMap, g: &JMap, exec: Exec) -> Verdict {
    if let Some(i) = w.segments.iter().position(|s| !s.is_pointed()) {
        return Verdict::NotPointedAtT { segment: i };
    }
    let ctx = w.ctx();
    let (zero, one) = (ctx.zero(), ctx.one());
    if w.start() != Some(MapKey::of(f)) {
        return Verdict::EndpointMismatch(Endpoint::Start);
    }
    for i in 1..w.segments.len() {
        let prev = w.segments[i - 1].key_at(&one);
        if prev.is_none() || prev != w.segments[i].key_at(&zero) {
            return Verdict::ChainBreak { segment: i };
        }
    }
    if w.end() != Some(MapKey::of(g)) {
        return Verdict::EndpointMismatch(Endpoint::End);
    }
    let results = exec.map(&w.segments, Segment::generates);
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(true) => {}
            Ok(false) => return Verdict::NotGeneratingOverRT { segment: i },
            Err(e) => return Verdict::Undecided { segment: i, reason: e.to_string() },
        }
    }
    Verdict::Valid
}

fn row_eq(row: &UnimodularRow, m: &PointedSL2) -> bool {
    let c = m.first_column();
    c.a == row.a && c.b == row.b
}

/// Interpolates between two pointed completions of the same row:
/// `[[A, -((1-T) V1 + T V2)], [B, (1-T) U1 + T U2]]`, projected to its first column.
pub fn interp_lift(row: &JMap, l1: &PointedSL2, l2: &PointedSL2) -> Result<HomotopyWitness, HomotopyError> {
    let r = row.as_row().ok_or(HomotopyError::NeedsDegreeZero)?;
    if !row_eq(r, l1) || !row_eq(r, l2) {
        return Err(HomotopyError::LiftMismatch);
    }
    if l1 == l2 {
        return Ok(HomotopyWitness { segments: vec![Segment::from_sl2_path(&l1.matrix().to_t())] });
    }
    let ctx = row.ctx();
    let t = RingPolyT::t(ctx);
    let s = RingPolyT::one(ctx).sub(&t);
    let (m1, m2) = (l1.matrix().to_t(), l2.matrix().to_t());
    let mix = |i: usize, j: usize| s.mul(&m1.m[i][j]).add(&t.mul(&m2.m[i][j]));
    let p = Mat2::new(m1.m[0][0].clone(), mix(0, 1), m1.m[1][0].clone(), mix(1, 1));
    HomotopyWitness::new(vec![Segment::from_sl2_path(&p)])
}

/// `H M H^{-1}` with `H = [[1 - T^2, -T], [T(2 - T^2), 1 - T^2]]`, a pointed
/// path from `M` to `(M^{-1})^T`; on rows, from `(A, B)` to `(U, V)`.
pub fn transpose_inverse_witness(m: &PointedSL2) -> HomotopyWitness {
    let ctx = m.matrix().ctx();
    let t = RingPolyT::t(ctx);
    let one = RingPolyT::one(ctx);
    let t2 = t.mul(&t);
    let d = one.sub(&t2);
    let h = Mat2::new(d.clone(), t.neg(), t.mul(&RingPolyT::from_i64(ctx, 2).sub(&t2)), d);
    let p = h.mul(&m.matrix().to_t()).mul(&h.adjugate());
    HomotopyWitness { segments: vec![Segment::from_sl2_path(&p)] }
}

#[derive(Clone, Copy)]
enum Elem {
    Upper,
    Lower,
}

fn elementary(ctx: FieldCtx, e: Elem, c: RingPolyT) -> Mat2<RingPolyT> {
    let (one, zero) = (RingPolyT::one(ctx), RingPolyT::zero(ctx));
    match e {
        Elem::Upper => Mat2::new(one.clone(), c, zero, one),
        Elem::Lower => Mat2::new(one.clone(), zero, c, one),
    }
}

/// Conjugates `M` by `diag(1/u, u)`, written as six elementary factors, each
/// deformed from the identity in its own segment. On rows this connects
/// `(A, B)` to `(A, u^2 B)`.
pub fn scaling_witness(m: &PointedSL2, u: &FieldElem) -> Result<HomotopyWitness, HomotopyError> {
    if u.is_zero() {
        return Err(HomotopyError::ZeroParameter);
    }
    let ctx = u.ctx();
    let mt = m.matrix().to_t();
    if (u * u).is_one() {
        return Ok(HomotopyWitness { segments: vec![Segment::from_sl2_path(&mt)] });
    }
    // diag(a, 1/a) = E12(a) E21(-1/a) E12(a) . E12(-1) E21(1) E12(-1)
    let a = u.inv().expect("nonzero");
    let ainv = u.clone();
    let one = ctx.one();
    let factors = [
        (Elem::Upper, a.clone()),
        (Elem::Lower, ainv.neg()),
        (Elem::Upper, a),
        (Elem::Upper, one.neg()),
        (Elem::Lower, one.clone()),
        (Elem::Upper, one.neg()),
    ];
    let t = RingPolyT::t(ctx);
    let mut acc = Mat2::<RingPolyT>::identity(ctx);
    let mut segments = Vec::with_capacity(factors.len());
    for (kind, c) in factors {
        let y = acc.mul(&elementary(ctx, kind, t.scale(&c)));
        segments.push(Segment::from_sl2_path(&y.mul(&mt).mul(&y.adjugate())));
        acc = acc.mul(&elementary(ctx, kind, t_const(&c)));
    }
    HomotopyWitness::new(segments)
}

/// Lifts a degree-zero segment to a pointed path in `SL_2(R[T])`, shifting the
/// Bezout data by `d(T) = V(j, T)`.
pub fn lift_row_homotopy(seg: &Segment) -> Result<Mat2<RingPolyT>, HomotopyError> {
    let Path::Row { a, b } = &seg.path else {
        return Err(HomotopyError::NeedsDegreeZero);
    };
    let ctx = seg.ctx();
    let cert = if seg.certificate_holds() {
        seg.cert.clone().expect("checked")
    } else {
        seg.groebner_cert()?.ok_or(HomotopyError::NoCertificate)?
    };
    let a0 = a.basepoint_curve();
    if a0.len() != 1 || !b.basepoint_curve().is_empty() {
        return Err(HomotopyError::NotPointed);
    }
    let (alpha, inv) = (a0[0].clone(), a0[0].inv().expect("nonzero"));
    let (a, b) = (a.scale(&inv), b.scale(&inv));
    let (u, v) = (cert[0].scale(&alpha), cert[1].scale(&alpha));
    let d = k_t_poly(ctx, &v.basepoint_curve());
    let u2 = u.add(&b.mul(&d));
    let v2 = v.sub(&a.mul(&d));
    let p = Mat2::new(a, v2.neg(), b, u2);
    debug_assert!(p.det() == RingPolyT::one(ctx) && p.is_pointed());
    Ok(p)
}

/// Lifts every segment of a degree-zero witness.
pub fn lift_witness(w: &HomotopyWitness) -> Result<Vec<Mat2<RingPolyT>>, HomotopyError> {
    w.segments.iter().map(lift_row_homotopy).collect()
}

fn combine(kind: BundleKind, terms: &[(RingElement, &Section)]) -> (RingElement, RingElement) {
    let ctx = terms[0].0.ctx();
    let mut out = (RingElement::zero(ctx), RingElement::zero(ctx));
    for (r, s) in terms {
        debug_assert_eq!(s.kind(), kind);
        out.0 = out.0.add(&r.mul(s.coeffs().0));
        out.1 = out.1.add(&r.mul(s.coeffs().1));
    }
    out
}

/// The homotopy `h(T) = C' E(T) (f1; f2)` with
/// `C' = [[(x;z), -(1/u)(y;w)], [u(y;w), 0]]` and `E(T) = [[1, -((u-1)/u) y T], [0, 1]]`.
///
/// `h(0)` is the pullback of the Cazanave sum `X/u (+) f` and `h(1)` is
/// `m_{u,1}` acting on the pullback of `X/1 (+) f`.
pub fn gu1_action_witness(u: &FieldElem, f: &JMap) -> Result<HomotopyWitness, HomotopyError> {
    if u.is_zero() {
        return Err(HomotopyError::ZeroParameter);
    }
    let s = f.as_sections().ok_or(HomotopyError::NeedsPositiveDegree)?;
    let BundleKind::P(n) = s.s0.kind() else {
        return Err(HomotopyError::NeedsPositiveDegree);
    };
    let ctx = u.ctx();
    let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
    let xs = Section::new(BundleKind::P(1), one.clone(), zero.clone());
    let ys = Section::new(BundleKind::P(1), zero, one.clone());
    let prod = |a: &Section, b: &Section| mu_product(a, b).expect("same bundle family");
    let (xf1, xf2, yf1, yf2) = (prod(&xs, &s.s0), prod(&xs, &s.s1), prod(&ys, &s.s0), prod(&ys, &s.s1));
    let kind = BundleKind::P(n + 1);
    let uinv = u.inv().expect("nonzero");
    let k = &(u - &ctx.one()) * &uinv;
    let y = RingElement::y(ctx);
    let c = |r: &FieldElem| RingElement::constant(r.clone());
    let h0 = [combine(kind, &[(one.clone(), &xf1), (c(&uinv.neg()), &yf2)]), combine(kind, &[(c(u), &yf1)])];
    let h1 = [combine(kind, &[(y.scale(&k.neg()), &xf2)]), combine(kind, &[(y.scale(&(u - &ctx.one()).neg()), &yf2)])];
    let lin = |a: &RingElement, b: &RingElement| RingPolyT::from_coeffs(&[a.clone(), b.clone()], ctx);
    let path = Path::Sections {
        kind,
        c: [lin(&h0[0].0, &h1[0].0), lin(&h0[0].1, &h1[0].1), lin(&h0[1].0, &h1[1].0), lin(&h0[1].1, &h1[1].1)],
    };
    let seg = Segment::new(path).certify()?;
    HomotopyWitness::new(vec![seg])
}

/// The degree-two family connecting `g_{u,1} (+) 2 pi` (at `T = 0`) to the
/// pullback of `X/u (+) X/1` (at `T = 1`).
pub fn example_homotopy(u: &FieldElem) -> Result<HomotopyWitness, HomotopyError> {
    Ok(gu1_action_witness(u, &pi(u.ctx()))?.reversed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{g_uv, m_uv, make_map, make_row, n_pi, pullback_rational, RationalMapP1};
    use crate::sl2::{act, completion};
    use crate::text::parse_poly;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn r(ctx: FieldCtx, s: &str) -> RingElement {
        RingElement::normal_form(&parse_poly(ctx, s).unwrap()).unwrap()
    }

    fn rt(ctx: FieldCtx, s: &str) -> RingPolyT {
        normal_form(&parse_poly(ctx, s).unwrap())
    }

    #[test]
    fn constant_witness_is_valid() {
        let k = q();
        let w = HomotopyWitness::constant(&pi(k));
        assert_eq!(verify(&w, &pi(k), &pi(k)), Verdict::Valid);
        assert_eq!(verify(&w.clone().strip_certs(), &pi(k), &pi(k)), Verdict::Valid, "groebner fallback");
        let g = g_uv(&k.from_i64(2), &k.one()).unwrap();
        assert_eq!(verify(&w, &pi(k), &g), Verdict::EndpointMismatch(Endpoint::End));
    }

    #[test]
    fn corrupted_pointedness_is_caught() {
        let k = q();
        let mut w = HomotopyWitness::constant(&pi(k));
        if let Path::Sections { c, .. } = &mut w.segments[0].path {
            c[2] = rt(k, "T");
        }
        assert_eq!(verify(&w, &pi(k), &pi(k)), Verdict::NotPointedAtT { segment: 0 });
    }

    #[test]
    fn non_generating_segment_is_caught() {
        let k = q();
        // ((1 + T z), 0; 0, 1): pointed, but at T = 1 all sections vanish at (1, 0, -1, 0).
        let c = [rt(k, "1 + T*z"), rt(k, "0"), rt(k, "0"), rt(k, "1")];
        let seg = Segment::new(Path::Sections { kind: BundleKind::P(1), c });
        assert!(seg.is_pointed());
        assert_eq!(seg.generates(), Ok(false));
        assert_eq!(seg.certify().unwrap_err(), HomotopyError::ResultantNotUnit);
    }

    #[test]
    fn interp_lift_examples() {
        let k = q();
        let row = make_row(r(k, "1"), r(k, "0")).unwrap();
        let l1 = PointedSL2::identity(k);
        let l2 = PointedSL2::new(Mat2::new(r(k, "1"), r(k, "y"), r(k, "0"), r(k, "1"))).unwrap();
        let w = interp_lift(&row, &l1, &l2).unwrap();
        assert_eq!(verify(&w, &row, &row), Verdict::Valid);
        let p = lift_row_homotopy(&w.segments[0]).unwrap();
        assert_eq!(p.eval_t(&k.zero()), *l1.matrix());
        assert_eq!(p.eval_t(&k.one()), *l2.matrix());
        assert_eq!(interp_lift(&row, &l1, &l1).unwrap().segments.len(), 1);
        let other = m_uv(&k.from_i64(2), &k.one()).unwrap();
        assert_eq!(interp_lift(&row, &l1, &other), Err(HomotopyError::LiftMismatch));
    }

    #[test]
    fn transpose_inverse_examples() {
        let k = q();
        for m in
            [m_uv(&k.from_i64(2), &k.one()).unwrap(), m_uv(&k.one(), &k.from_i64(-1)).unwrap(), PointedSL2::identity(k)]
        {
            let w = transpose_inverse_witness(&m);
            let from = JMap::Row(m.first_column());
            let to = JMap::Row(PointedSL2::new(m.matrix().adjugate().transpose()).unwrap().first_column());
            assert_eq!(verify(&w, &from, &to), Verdict::Valid);
        }
    }

    #[test]
    fn scaling_examples() {
        let k = q();
        let (u, v, c) = (k.from_i64(3), k.one(), k.from_i64(2));
        let w = scaling_witness(&m_uv(&u, &v).unwrap(), &c).unwrap();
        let c2 = &c * &c;
        let to = g_uv(&(&c2 * &u), &(&c2 * &v)).unwrap();
        assert_eq!(verify(&w, &g_uv(&u, &v).unwrap(), &to), Verdict::Valid);
        assert_eq!(w.segments.len(), 6);
        let same = scaling_witness(&m_uv(&u, &v).unwrap(), &k.one()).unwrap();
        assert_eq!(same.segments.len(), 1);
        assert_eq!(scaling_witness(&m_uv(&u, &v).unwrap(), &k.zero()), Err(HomotopyError::ZeroParameter));

        let f5 = FieldCtx::prime(5).unwrap();
        let row = make_row(r(f5, "2*x - 1"), r(f5, "2*y")).unwrap();
        let w = scaling_witness(&completion(&row).unwrap(), &f5.from_i64(2)).unwrap();
        let to = make_row(r(f5, "2*x - 1"), r(f5, "3*y")).unwrap();
        assert_eq!(verify(&w, &row, &to), Verdict::Valid);
    }

    #[test]
    fn lifting_uncertified_rows() {
        let k = q();
        let m = m_uv(&k.from_i64(3), &k.one()).unwrap();
        let w = scaling_witness(&m, &k.from_i64(2)).unwrap();
        for seg in &w.segments {
            let bare = seg.clone().strip_cert();
            let p = lift_row_homotopy(&bare).unwrap();
            assert_eq!(p.det(), RingPolyT::one(k));
            assert!(p.is_pointed());
            assert_eq!(
                p.m[0][0],
                *match &seg.path {
                    Path::Row { a, .. } => a,
                    _ => unreachable!(),
                }
            );
        }
        // an elementary deformation of g_{2,1}: (A + T y B, B)
        let g = g_uv(&k.from_i64(2), &k.one()).unwrap();
        let gr = g.as_row().unwrap();
        let a = gr.a.to_t().add(&rt(k, "T*y").mul(&gr.b.to_t()));
        let seg = Segment::new(Path::Row { a, b: gr.b.to_t() });
        let p = lift_row_homotopy(&seg).unwrap();
        assert_eq!(p.det(), RingPolyT::one(k));
        assert!(p.is_pointed());
    }

    #[test]
    fn gu1_examples() {
        let k = q();
        let u = k.from_i64(2);
        let w = gu1_action_witness(&u, &pi(k)).unwrap();
        let m = m_uv(&u, &k.one()).unwrap();
        let end = act(&m, &n_pi(k, 2).unwrap()).unwrap();
        assert_eq!(verify(&w, &w.start_map().unwrap(), &end), Verdict::Valid);
        // u = 1: constant in T
        let w1 = gu1_action_witness(&k.one(), &pi(k)).unwrap();
        assert_eq!(w1.start(), w1.end());
        // degree two input
        let f = pullback_rational(&RationalMapP1::new(k, &[k.one(), k.zero()], &[k.zero(), k.one()]).unwrap()).unwrap();
        let u3 = k.from_i64(3);
        let w3 = gu1_action_witness(&u3, &f).unwrap();
        let w31 = gu1_action_witness(&k.one(), &f).unwrap();
        let end3 = act(&m_uv(&u3, &k.one()).unwrap(), &w31.start_map().unwrap()).unwrap();
        assert_eq!(verify(&w3, &w3.start_map().unwrap(), &end3), Verdict::Valid);
    }

    /// The printed degree-two family, with the corrected `y` factor, written
    /// out by hand in expanded form.
    #[test]
    fn example_matches_hand_formula() {
        for (k, u) in [
            (q(), q().from_i64(2)),
            (q(), q().ratio(1, 2).unwrap()),
            (FieldCtx::prime(5).unwrap(), FieldCtx::prime(5).unwrap().from_i64(3)),
        ] {
            let w = example_homotopy(&u).unwrap();
            let Path::Sections { kind, c } = &w.segments[0].path else { panic!() };
            let got = [expand(*kind, &c[0], &c[1]), expand(*kind, &c[2], &c[3])];
            let uu = RingPolyT::constant(u.clone());
            let um1 = RingPolyT::constant(&u - &k.one());
            let uinv = RingPolyT::constant(u.inv().unwrap());
            let t = RingPolyT::t(k);
            let p = |s: &str| rt(k, s);
            let s0 = |a: &str, b: &str, cc: &str| -> RingPolyT {
                // [x^2; z^2] + T((u-1)/u) y [xy; zw] - (x + w/u) [y^2; w^2], component-wise
                p(a).add(&t.mul(&um1).mul(&uinv).mul(&p("y")).mul(&p(b)))
                    .sub(&p("x").add(&p("w").mul(&uinv)).mul(&p(cc)))
            };
            let s1 = |b: &str, cc: &str| -> RingPolyT {
                uu.mul(&p(b)).add(&um1.mul(&t.sub(&RingPolyT::one(k))).mul(&p("y")).mul(&p(cc)))
            };
            assert_eq!(got[0], (s0("x^2", "x*y", "y^2"), s0("z^2", "z*w", "w^2")));
            assert_eq!(got[1], (s1("x*y", "y^2"), s1("z*w", "w^2")));
        }
    }

    #[test]
    fn transform_transports_certificates() {
        let k = q();
        let f = make_map(1, r(k, "1"), r(k, "2*y"), r(k, "0"), r(k, "1")).unwrap();
        let seg = Segment::constant(&f);
        let t = RingPolyT::t(k);
        let m = Mat2::new(RingPolyT::one(k), t.mul(&rt(k, "z")), RingPolyT::zero(k), RingPolyT::one(k));
        let moved = seg.transform(&m);
        assert!(moved.certificate_holds());
        assert!(moved.is_pointed());
        let row = Segment::constant(&g_uv(&k.from_i64(3), &k.from_i64(2)).unwrap());
        assert!(row.transform(&m).certificate_holds());
    }
}
