//! Two-by-two matrices over `R` and `R[T]`, the pointed special linear group,
//! and its actions on rows and section pairs.

use std::fmt;

use thiserror::Error;

use crate::bundle::Section;
use crate::field::{FieldCtx, FieldElem};
use crate::jring::{RingElement, RingLike, RingPolyT};
use crate::morphism::{GenCert, JMap, SectionMap, UnimodularRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("matrix does not have determinant one")]
    NotSpecial,
    #[error("matrix is not the identity at the basepoint")]
    NotPointed,
    #[error("row is not unimodular")]
    NotUnimodular,
    #[error("action is only defined on maps of nonzero degree")]
    DegreeZero,
}

/// A 2x2 matrix, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2<E> {
    pub m: [[E; 2]; 2],
}

impl<E: RingLike> Mat2<E> {
    pub fn new(a: E, b: E, c: E, d: E) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity(ctx: FieldCtx) -> Self {
        Mat2::new(E::one_in(ctx), E::zero_in(ctx), E::zero_in(ctx), E::one_in(ctx))
    }

    pub fn ctx(&self) -> FieldCtx {
        self.m[0][0].ctx()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let e = |i: usize, j: usize| self.m[i][0].mul(&o.m[0][j]).add(&self.m[i][1].mul(&o.m[1][j]));
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn det(&self) -> E {
        self.m[0][0].mul(&self.m[1][1]).sub(&self.m[0][1].mul(&self.m[1][0]))
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0].clone(), self.m[1][0].clone(), self.m[0][1].clone(), self.m[1][1].clone())
    }

    /// The inverse of a determinant-one matrix.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.m[1][1].clone(), self.m[0][1].neg(), self.m[1][0].neg(), self.m[0][0].clone())
    }

    pub fn apply(&self, v: (&E, &E)) -> (E, E) {
        (self.m[0][0].mul(v.0).add(&self.m[0][1].mul(v.1)), self.m[1][0].mul(v.0).add(&self.m[1][1].mul(v.1)))
    }

    /// Row vector times matrix.
    pub fn apply_left(&self, v: (&E, &E)) -> (E, E) {
        (v.0.mul(&self.m[0][0]).add(&v.1.mul(&self.m[1][0])), v.0.mul(&self.m[0][1]).add(&v.1.mul(&self.m[1][1])))
    }

    pub fn map<F: RingLike>(&self, f: impl Fn(&E) -> F) -> Mat2<F> {
        Mat2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity(self.ctx())
    }

    /// True when every entry restricted to the basepoint (times `A^1`) is the identity.
    pub fn is_pointed(&self) -> bool {
        let one = self.ctx().one();
        let want = |i, j| if i == j { vec![one.clone()] } else { vec![] };
        (0..2).all(|i| (0..2).all(|j| self.m[i][j].basepoint_curve() == want(i, j)))
    }
}

impl Mat2<RingElement> {
    pub fn to_t(&self) -> Mat2<RingPolyT> {
        self.map(RingElement::to_t)
    }

    pub fn eval_basepoint(&self) -> [[FieldElem; 2]; 2] {
        [
            [self.m[0][0].eval_basepoint(), self.m[0][1].eval_basepoint()],
            [self.m[1][0].eval_basepoint(), self.m[1][1].eval_basepoint()],
        ]
    }
}

impl Mat2<RingPolyT> {
    pub fn eval_t(&self, t: &FieldElem) -> Mat2<RingElement> {
        self.map(|e| e.eval_t(t))
    }
}

/// A matrix `[[A, -V], [B, U]]` in `SL_2(R)` that is the identity at the basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedSL2(Mat2<RingElement>);

impl PointedSL2 {
    pub fn new(m: Mat2<RingElement>) -> Result<Self, Sl2Error> {
        if m.det() != RingElement::one(m.ctx()) {
            return Err(Sl2Error::NotSpecial);
        }
        if !m.is_pointed() {
            return Err(Sl2Error::NotPointed);
        }
        Ok(PointedSL2(m))
    }

    pub fn identity(ctx: FieldCtx) -> Self {
        PointedSL2(Mat2::identity(ctx))
    }

    pub fn matrix(&self) -> &Mat2<RingElement> {
        &self.0
    }

    pub fn into_matrix(self) -> Mat2<RingElement> {
        self.0
    }

    pub fn mul(&self, o: &Self) -> Self {
        PointedSL2(self.0.mul(&o.0))
    }

    pub fn inverse(&self) -> Self {
        PointedSL2(self.0.adjugate())
    }

    /// The first column with the certificate `(U, V)` read off the second.
    pub fn first_column(&self) -> UnimodularRow {
        let m = &self.0.m;
        UnimodularRow { a: m[0][0].clone(), b: m[1][0].clone(), u: m[1][1].clone(), v: m[0][1].neg() }
    }
}

/// Completes a certified pointed row to `[[A, -V], [B, U]]`, shifting the
/// Bezout data by `d = V(j)` so that the result is pointed.
pub fn complete_pointed(row: &UnimodularRow) -> Result<PointedSL2, Sl2Error> {
    if !row.certificate_holds() {
        return Err(Sl2Error::NotUnimodular);
    }
    let d = row.v.eval_basepoint();
    let u = row.u.add(&row.b.scale(&d));
    let v = row.v.sub(&row.a.scale(&d));
    PointedSL2::new(Mat2::new(row.a.clone(), v.neg(), row.b.clone(), u))
}

fn row_of(f: &JMap) -> Result<&UnimodularRow, Sl2Error> {
    f.as_row().ok_or(Sl2Error::DegreeZero)
}

/// Completion of a degree-zero map.
pub fn completion(f: &JMap) -> Result<PointedSL2, Sl2Error> {
    complete_pointed(row_of(f)?)
}

/// The sum of degree-zero maps: first column of the product of completions.
pub fn row_sum(f: &JMap, g: &JMap) -> Result<JMap, Sl2Error> {
    let p = completion(f)?.mul(&completion(g)?);
    Ok(JMap::Row(p.first_column()))
}

/// `-(A, B) = (U, -B)`, the first column of the inverse completion.
pub fn row_inverse(f: &JMap) -> Result<JMap, Sl2Error> {
    Ok(JMap::Row(completion(f)?.inverse().first_column()))
}

fn transform(m: &Mat2<RingElement>, f: &JMap) -> Result<JMap, Sl2Error> {
    let s = f.as_sections().ok_or(Sl2Error::DegreeZero)?;
    let kind = s.s0.kind();
    let (a0, b0) = m.apply((s.s0.coeffs().0, s.s1.coeffs().0));
    let (a1, b1) = m.apply((s.s0.coeffs().1, s.s1.coeffs().1));
    // Cofactor rows transform by the inverse on the right.
    let inv = m.adjugate();
    let c = &s.cert.0;
    let (cx0, cx1) = inv.apply_left((&c[0], &c[2]));
    let (cw0, cw1) = inv.apply_left((&c[1], &c[3]));
    let map = SectionMap {
        s0: Section::new(kind, a0, a1),
        s1: Section::new(kind, b0, b1),
        cert: GenCert([cx0, cw0, cx1, cw1]),
    };
    debug_assert!(map.certificate_holds());
    Ok(JMap::Sections(map))
}

/// `M . [s0, s1] = [A s0 - V s1, B s0 + U s1]`.
pub fn act(m: &PointedSL2, f: &JMap) -> Result<JMap, Sl2Error> {
    transform(m.matrix(), f)
}

/// The transpose variant `[M^T (s0, s1)^T]`, which is not compatible with the group law.
pub fn boxplus_act(m: &PointedSL2, f: &JMap) -> Result<JMap, Sl2Error> {
    transform(&m.matrix().transpose(), f)
}

impl fmt::Display for PointedSL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: RingLike> fmt::Display for Mat2<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sl2 [{}; {} | {}; {}]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{g_uv, m_uv, make_map, make_row, pi};
    use crate::text::parse_poly;
    use proptest::prelude::*;

    fn r(ctx: FieldCtx, s: &str) -> RingElement {
        RingElement::normal_form(&parse_poly(ctx, s).unwrap()).unwrap()
    }

    fn mat(ctx: FieldCtx, e: [&str; 4]) -> PointedSL2 {
        PointedSL2::new(Mat2::new(r(ctx, e[0]), r(ctx, e[1]), r(ctx, e[2]), r(ctx, e[3]))).unwrap()
    }

    fn map1(ctx: FieldCtx, c: [&str; 4]) -> JMap {
        make_map(1, r(ctx, c[0]), r(ctx, c[1]), r(ctx, c[2]), r(ctx, c[3])).unwrap()
    }

    #[test]
    fn completion_examples() {
        let k = FieldCtx::Rationals;
        let id = make_row(r(k, "1"), r(k, "0")).unwrap();
        assert_eq!(completion(&id).unwrap(), PointedSL2::identity(k));
        let g = make_row(r(k, "2*x - 1"), r(k, "2*y")).unwrap();
        assert_eq!(completion(&g).unwrap(), mat(k, ["2*x - 1", "-2*z", "2*y", "2*x - 1"]));
        let (u, v) = (k.from_i64(3), k.from_i64(2));
        assert_eq!(completion(&g_uv(&u, &v).unwrap()).unwrap(), m_uv(&u, &v).unwrap());
        // a row whose groebner certificate is not pointed still completes
        let h = make_row(r(k, "x + 2*w"), r(k, "-y")).unwrap();
        let c = completion(&h).unwrap();
        assert_eq!(JMap::Row(c.first_column()), h);
    }

    #[test]
    fn rejects_bad_matrices() {
        let k = FieldCtx::Rationals;
        let m = Mat2::new(r(k, "2"), r(k, "0"), r(k, "0"), r(k, "1/2"));
        assert_eq!(PointedSL2::new(m), Err(Sl2Error::NotPointed));
        let m = Mat2::new(r(k, "x"), r(k, "0"), r(k, "0"), r(k, "1"));
        assert_eq!(PointedSL2::new(m), Err(Sl2Error::NotSpecial));
    }

    #[test]
    fn row_sum_and_inverse() {
        let k = FieldCtx::Rationals;
        let e = |n| k.from_i64(n);
        let one_row = make_row(r(k, "1"), r(k, "0")).unwrap();
        let (g32, g25, g35) = (g_uv(&e(3), &e(2)).unwrap(), g_uv(&e(2), &e(5)).unwrap(), g_uv(&e(3), &e(5)).unwrap());
        assert_eq!(row_sum(&g32, &g25).unwrap(), g35);
        assert_eq!(row_sum(&g32, &g_uv(&e(2), &e(3)).unwrap()).unwrap(), one_row);
        assert_eq!(row_sum(&one_row, &g32).unwrap(), g32);
        assert_eq!(row_inverse(&one_row).unwrap(), one_row);
        let g = make_row(r(k, "2*x - 1"), r(k, "2*y")).unwrap();
        assert_eq!(row_inverse(&g).unwrap(), make_row(r(k, "2*x - 1"), r(k, "-2*y")).unwrap());
        let inv = completion(&row_inverse(&g32).unwrap()).unwrap();
        assert_eq!(inv.mul(&m_uv(&e(3), &e(2)).unwrap()), PointedSL2::identity(k));
    }

    #[test]
    fn m_uv_grid() {
        for k in [FieldCtx::Rationals, FieldCtx::prime(7).unwrap()] {
            let vals: Vec<FieldElem> = (1..=5).map(|i| k.from_i64(i)).collect();
            for u in &vals {
                for v in &vals {
                    let muv = m_uv(u, v).unwrap();
                    for s in &vals {
                        assert_eq!(muv.mul(&m_uv(v, s).unwrap()), m_uv(u, s).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn action_examples() {
        let k = FieldCtx::Rationals;
        let u = k.from_i64(7);
        let f = act(&m_uv(&u, &k.one()).unwrap(), &pi(k)).unwrap();
        assert_eq!(f, map1(k, ["1", "0", "0", "7"]));
        assert!(f.as_sections().unwrap().certificate_holds());
        assert_eq!(act(&PointedSL2::identity(k), &pi(k)).unwrap(), pi(k));
        let m = m_uv(&k.one(), &k.from_i64(-1)).unwrap();
        assert_eq!(act(&m, &pi(k)).unwrap(), map1(k, ["2*x - 1", "-2*z", "2*y", "2*x - 1"]));
        let n = mat(k, ["2*x - 1", "-2*y", "2*z", "2*x - 1"]);
        assert_eq!(boxplus_act(&n, &pi(k)).unwrap(), map1(k, ["1", "0", "0", "-1"]));
        assert_eq!(boxplus_act(&PointedSL2::identity(k), &pi(k)).unwrap(), pi(k));
        assert_ne!(boxplus_act(&m, &pi(k)).unwrap(), act(&m, &pi(k)).unwrap());
        assert_eq!(act(&m, &make_row(r(k, "1"), r(k, "0")).unwrap()), Err(Sl2Error::DegreeZero));
    }

    /// Pointed matrices from products of elementary matrices with entries
    /// vanishing at the basepoint.
    fn arb_pointed() -> impl Strategy<Value = PointedSL2> {
        let k = FieldCtx::prime(101).unwrap();
        let entry = prop::collection::vec(-5i64..5, 4).prop_map(move |c| {
            let (y, z, x) = (RingElement::y(k), RingElement::z(k), RingElement::x(k));
            y.scale(&k.from_i64(c[0]))
                .add(&z.scale(&k.from_i64(c[1])))
                .add(&x.mul(&y).scale(&k.from_i64(c[2])))
                .add(&y.mul(&z).scale(&k.from_i64(c[3])))
        });
        prop::collection::vec(entry, 3).prop_map(move |es| {
            let one = RingElement::one(k);
            let zero = RingElement::zero(k);
            let up = |e: &RingElement| Mat2::new(one.clone(), e.clone(), zero.clone(), one.clone());
            let lo = |e: &RingElement| Mat2::new(one.clone(), zero.clone(), e.clone(), one.clone());
            PointedSL2::new(up(&es[0]).mul(&lo(&es[1])).mul(&up(&es[2]))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn left_action_and_group_laws(a in arb_pointed(), b in arb_pointed(), c in arb_pointed()) {
            let k = a.matrix().ctx();
            let p = pi(k);
            let lhs = act(&a.mul(&b), &p).unwrap();
            prop_assert_eq!(&lhs, &act(&a, &act(&b, &p).unwrap()).unwrap());
            prop_assert!(lhs.as_sections().unwrap().certificate_holds());
            let (ra, rb, rc) = (JMap::Row(a.first_column()), JMap::Row(b.first_column()), JMap::Row(c.first_column()));
            let l = row_sum(&row_sum(&ra, &rb).unwrap(), &rc).unwrap();
            let r = row_sum(&ra, &row_sum(&rb, &rc).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            let one_row = JMap::Row(PointedSL2::identity(k).first_column());
            prop_assert_eq!(row_sum(&ra, &row_inverse(&ra).unwrap()).unwrap(), one_row);
        }
    }
}
