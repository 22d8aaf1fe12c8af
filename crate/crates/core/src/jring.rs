//! The coordinate ring `R = k[x,y,z,w]/(x + w - 1, xw - yz)` and its
//! polynomial extension `R[T]`.
//!
//! Elements are stored in normal form: `w` is eliminated via `w = 1 - x` and
//! powers of `x` are reduced with `x^2 = x - yz`, so every element reads
//! `a(y,z) + x*b(y,z)` (with `T` allowed inside `a` and `b` for [`RingPolyT`]).
//! Two elements are equal exactly when their normal forms agree.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::poly::{MPoly, Monomial, NVARS, T, W, X, Y, Z};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("expression mentions T where an element of R was expected")]
    UnexpectedT,
}

/// Reduces a polynomial without `w` to `x`-degree at most one.
pub(crate) fn reduce_mod_relation(p: &MPoly) -> MPoly {
    let ctx = p.ctx();
    if p.degree_in(X) <= 1 {
        return p.clone();
    }
    // x^k = x*alpha_k + beta_k with alpha_1 = 1, beta_1 = 0.
    let yz = MPoly::term(ctx.one(), Monomial([0, 1, 1, 0, 0]));
    let mut alpha = vec![MPoly::zero(ctx), MPoly::one(ctx)];
    let mut beta = vec![MPoly::one(ctx), MPoly::zero(ctx)];
    let mut out = MPoly::zero(ctx);
    for (m, c) in p.terms() {
        let k = m.0[X] as usize;
        if k <= 1 {
            out.add_term(*m, c);
            continue;
        }
        while alpha.len() <= k {
            let (a, b) = (alpha.last().unwrap().clone(), beta.last().unwrap().clone());
            alpha.push(a.add(&b));
            beta.push(yz.mul(&a).neg());
        }
        let mut rest = *m;
        rest.0[X] = 0;
        let x = Monomial::var(X);
        out.add_assign(&alpha[k].mul_term(c, &rest.mul(&x)));
        out.add_assign(&beta[k].mul_term(c, &rest));
    }
    out
}

/// Normal form in `R[T]` of an arbitrary polynomial in `x, y, z, w, T`.
pub fn normal_form(p: &MPoly) -> RingPolyT {
    let ctx = p.ctx();
    let p = if p.degree_in(W) > 0 {
        let mut img: [MPoly; NVARS] = std::array::from_fn(|i| MPoly::var(ctx, i));
        img[W] = MPoly::one(ctx).sub(&MPoly::var(ctx, X));
        p.compose(&img)
    } else {
        p.clone()
    };
    RingPolyT(reduce_mod_relation(&p))
}

/// Common arithmetic for [`RingElement`] and [`RingPolyT`], so that matrices
/// and sections can be written once for both.
pub trait RingLike: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn ctx(&self) -> FieldCtx;
    fn zero_in(ctx: FieldCtx) -> Self;
    fn one_in(ctx: FieldCtx) -> Self;
    fn from_ring(r: &RingElement) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &FieldElem) -> Self;
    fn is_zero(&self) -> bool;
    fn as_poly(&self) -> &MPoly;
    /// Restriction to the basepoint, as a polynomial in `T` (constant for `R`).
    fn basepoint_curve(&self) -> Vec<FieldElem>;
    fn tau(&self) -> Self;
}

macro_rules! ring_common {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(ctx: FieldCtx) -> Self {
                $ty(MPoly::zero(ctx))
            }

            pub fn one(ctx: FieldCtx) -> Self {
                $ty(MPoly::one(ctx))
            }

            pub fn constant(c: FieldElem) -> Self {
                $ty(MPoly::constant(c))
            }

            pub fn from_i64(ctx: FieldCtx, n: i64) -> Self {
                $ty(MPoly::constant(ctx.from_i64(n)))
            }

            pub fn x(ctx: FieldCtx) -> Self {
                $ty(MPoly::var(ctx, X))
            }

            pub fn y(ctx: FieldCtx) -> Self {
                $ty(MPoly::var(ctx, Y))
            }

            pub fn z(ctx: FieldCtx) -> Self {
                $ty(MPoly::var(ctx, Z))
            }

            /// `w = 1 - x`.
            pub fn w(ctx: FieldCtx) -> Self {
                $ty(MPoly::one(ctx).sub(&MPoly::var(ctx, X)))
            }

            pub fn ctx(&self) -> FieldCtx {
                self.0.ctx()
            }

            pub fn poly(&self) -> &MPoly {
                &self.0
            }

            pub fn is_zero(&self) -> bool {
                self.0.is_zero()
            }

            pub fn is_constant(&self) -> bool {
                self.0.is_constant()
            }

            pub fn add(&self, o: &Self) -> Self {
                $ty(self.0.add(&o.0))
            }

            pub fn sub(&self, o: &Self) -> Self {
                $ty(self.0.sub(&o.0))
            }

            pub fn neg(&self) -> Self {
                $ty(self.0.neg())
            }

            pub fn scale(&self, c: &FieldElem) -> Self {
                $ty(self.0.scale(c))
            }

            pub fn mul(&self, o: &Self) -> Self {
                $ty(reduce_mod_relation(&self.0.mul(&o.0)))
            }

            pub fn pow(&self, e: u32) -> Self {
                let mut acc = Self::one(self.ctx());
                let mut base = self.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc.mul(&base);
                    }
                    base = base.mul(&base);
                    e >>= 1;
                }
                acc
            }

            /// The involution swapping `y` and `z`.
            pub fn tau(&self) -> Self {
                let mut out = MPoly::zero(self.ctx());
                for (m, c) in self.0.terms() {
                    let mut e = m.0;
                    e.swap(Y, Z);
                    out.add_term(Monomial(e), c);
                }
                $ty(out)
            }

            /// The split `(a, b)` with `self = a + x*b`.
            pub fn parts(&self) -> (MPoly, MPoly) {
                let ctx = self.ctx();
                let (mut a, mut b) = (MPoly::zero(ctx), MPoly::zero(ctx));
                for (m, c) in self.0.terms() {
                    if m.0[X] == 0 {
                        a.add_term(*m, c);
                    } else {
                        let mut e = m.0;
                        e[X] = 0;
                        b.add_term(Monomial(e), c);
                    }
                }
                (a, b)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

/// An element of `R` in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement(MPoly);

/// An element of `R[T]` in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPolyT(MPoly);

ring_common!(RingElement);
ring_common!(RingPolyT);

impl RingElement {
    /// Normal form of a `T`-free expression.
    pub fn normal_form(p: &MPoly) -> Result<Self, RingError> {
        if p.degree_in(T) > 0 {
            return Err(RingError::UnexpectedT);
        }
        Ok(RingElement(normal_form(p).0))
    }

    /// Wraps a polynomial already in normal form (no `w`, no `T`, `x`-degree <= 1).
    pub fn from_normal_poly(p: MPoly) -> Self {
        debug_assert!(p.degree_in(X) <= 1 && p.degree_in(W) == 0 && p.degree_in(T) == 0);
        RingElement(p)
    }

    pub fn eval_basepoint(&self) -> FieldElem {
        let ctx = self.ctx();
        self.eval(&ctx.one(), &ctx.zero(), &ctx.zero())
    }

    /// Value at a point `(x, y, z)` of the variety; `w` is implied.
    pub fn eval(&self, x: &FieldElem, y: &FieldElem, z: &FieldElem) -> FieldElem {
        let zero = x.ctx().zero();
        self.0.eval(&[x.clone(), y.clone(), z.clone(), zero.clone(), zero])
    }

    /// The nonzero constant this element equals, if it is a unit of `R`.
    pub fn as_unit(&self) -> Option<FieldElem> {
        (self.is_constant() && !self.is_zero()).then(|| self.0.constant_term())
    }

    pub fn to_t(&self) -> RingPolyT {
        RingPolyT(self.0.clone())
    }

    /// Pullback along a chart of the variety.
    ///
    /// The result is a polynomial in two chart coordinates, stored in the
    /// `x` and `y` slots of [`MPoly`]: `(a, b)` for [`Chart::Phi0`] and `(s, t)`
    /// for [`Chart::Phi1`].
    pub fn chart_pullback(&self, chart: Chart) -> MPoly {
        let ctx = self.ctx();
        let one = MPoly::one(ctx);
        let u = MPoly::var(ctx, X);
        let v = MPoly::var(ctx, Y);
        let uv = u.mul(&v);
        let mut img: [MPoly; NVARS] = std::array::from_fn(|_| MPoly::zero(ctx));
        match chart {
            Chart::Phi0 => {
                // x = 1 - ab, y = a(1 - ab), z = b
                img[X] = one.sub(&uv);
                img[Y] = u.mul(&one.sub(&uv));
                img[Z] = v;
            }
            Chart::Phi1 => {
                // x = st, y = t, z = s(1 - st)
                img[X] = uv.clone();
                img[Y] = v;
                img[Z] = u.mul(&one.sub(&uv));
            }
        }
        self.0.compose(&img)
    }
}

/// The two affine charts covering the variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Phi0,
    Phi1,
}

impl RingPolyT {
    pub fn t(ctx: FieldCtx) -> Self {
        RingPolyT(MPoly::var(ctx, T))
    }

    pub fn from_normal_poly(p: MPoly) -> Self {
        debug_assert!(p.degree_in(X) <= 1 && p.degree_in(W) == 0);
        RingPolyT(p)
    }

    pub fn degree_t(&self) -> u16 {
        self.0.degree_in(T)
    }

    /// Coefficient of `T^i`.
    pub fn coeff(&self, i: u16) -> RingElement {
        let mut out = MPoly::zero(self.ctx());
        for (m, c) in self.0.terms() {
            if m.0[T] == i {
                let mut e = m.0;
                e[T] = 0;
                out.add_term(Monomial(e), c);
            }
        }
        RingElement(out)
    }

    /// Dense list of coefficients of `1, T, T^2, ...`.
    pub fn coeffs(&self) -> Vec<RingElement> {
        (0..=self.degree_t()).map(|i| self.coeff(i)).collect()
    }

    pub fn from_coeffs(coeffs: &[RingElement], ctx: FieldCtx) -> Self {
        let mut out = MPoly::zero(ctx);
        for (i, c) in coeffs.iter().enumerate() {
            let mut t = Monomial::ONE;
            t.0[T] = i as u16;
            for (m, a) in c.0.terms() {
                out.add_term(m.mul(&t), a);
            }
        }
        RingPolyT(out)
    }

    pub fn eval_t(&self, t: &FieldElem) -> RingElement {
        let ctx = self.ctx();
        let mut out = MPoly::zero(ctx);
        let mut cache = vec![ctx.one()];
        for (m, c) in self.0.terms() {
            let k = m.0[T] as usize;
            while cache.len() <= k {
                let next = cache.last().unwrap() * t;
                cache.push(next);
            }
            let mut e = m.0;
            e[T] = 0;
            out.add_term(Monomial(e), &(c * &cache[k]));
        }
        RingElement(out)
    }

    /// Substitutes `T -> a*T + b`.
    pub fn reparametrize(&self, a: &FieldElem, b: &FieldElem) -> Self {
        let ctx = self.ctx();
        let mut img: [MPoly; NVARS] = std::array::from_fn(|i| MPoly::var(ctx, i));
        img[T] = MPoly::var(ctx, T).scale(a).add(&MPoly::constant(b.clone()));
        RingPolyT(self.0.compose(&img))
    }

    /// Restriction to `j' = j x A^1`: coefficients of `1, T, ...` (trailing zeros trimmed).
    pub fn basepoint_curve(&self) -> Vec<FieldElem> {
        let mut out: Vec<FieldElem> = self.coeffs().iter().map(RingElement::eval_basepoint).collect();
        while out.last().is_some_and(FieldElem::is_zero) {
            out.pop();
        }
        out
    }
}

macro_rules! ring_like_impl {
    ($ty:ident, $from:expr, $curve:expr) => {
        impl RingLike for $ty {
            fn ctx(&self) -> FieldCtx {
                $ty::ctx(self)
            }
            fn zero_in(ctx: FieldCtx) -> Self {
                $ty::zero(ctx)
            }
            fn one_in(ctx: FieldCtx) -> Self {
                $ty::one(ctx)
            }
            fn from_ring(r: &RingElement) -> Self {
                $from(r)
            }
            fn add(&self, o: &Self) -> Self {
                $ty::add(self, o)
            }
            fn sub(&self, o: &Self) -> Self {
                $ty::sub(self, o)
            }
            fn mul(&self, o: &Self) -> Self {
                $ty::mul(self, o)
            }
            fn neg(&self) -> Self {
                $ty::neg(self)
            }
            fn scale(&self, c: &FieldElem) -> Self {
                $ty::scale(self, c)
            }
            fn is_zero(&self) -> bool {
                $ty::is_zero(self)
            }
            fn as_poly(&self) -> &MPoly {
                &self.0
            }
            fn basepoint_curve(&self) -> Vec<FieldElem> {
                $curve(self)
            }
            fn tau(&self) -> Self {
                $ty::tau(self)
            }
        }
    };
}

ring_like_impl!(RingElement, |r: &RingElement| r.clone(), |r: &RingElement| {
    let v = r.eval_basepoint();
    if v.is_zero() {
        vec![]
    } else {
        vec![v]
    }
});
ring_like_impl!(RingPolyT, RingElement::to_t, RingPolyT::basepoint_curve);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_poly;
    use proptest::prelude::*;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn nf(s: &str) -> RingElement {
        RingElement::normal_form(&parse_poly(q(), s).unwrap()).unwrap()
    }

    #[test]
    fn relations_vanish() {
        assert!(nf("x + w - 1").is_zero());
        assert!(nf("x*w - y*z").is_zero());
        assert_eq!(nf("x^2"), nf("x - y*z"));
    }

    #[test]
    fn worked_normal_forms() {
        assert_eq!(nf("(2*x - 1)^2 + 4*y*z"), RingElement::one(q()));
        assert_eq!(nf("w^2"), nf("1 - x - y*z"));
        assert_eq!(nf("x^3").to_string(), "-x*y*z - y*z + x");
    }

    #[test]
    fn basepoint_evaluation() {
        let ctx = q();
        assert!(RingElement::x(ctx).eval_basepoint().is_one());
        assert!(RingElement::w(ctx).eval_basepoint().is_zero());
        assert!(RingElement::y(ctx).eval_basepoint().is_zero());
    }

    #[test]
    fn tau_swaps_and_involutes() {
        let e = nf("x*y^2 - 3*z + w");
        assert_eq!(e.tau(), nf("x*z^2 - 3*y + w"));
        assert_eq!(e.tau().tau(), e);
    }

    #[test]
    fn chart_pullbacks_kill_relations() {
        let ctx = q();
        for chart in [Chart::Phi0, Chart::Phi1] {
            let x = RingElement::x(ctx).chart_pullback(chart);
            let w = RingElement::w(ctx).chart_pullback(chart);
            let y = RingElement::y(ctx).chart_pullback(chart);
            let z = RingElement::z(ctx).chart_pullback(chart);
            assert!(x.mul(&w).sub(&y.mul(&z)).is_zero());
        }
        assert_eq!(RingElement::y(ctx).chart_pullback(Chart::Phi1), MPoly::var(ctx, Y));
    }

    /// Pulls back through both charts at a point of the overlap and compares.
    #[test]
    fn charts_agree_on_overlap() {
        let ctx = q();
        let e = nf("3*x^2*y - z^3 + 2*x*z*w - 7");
        for (a, b) in [(2, 3), (-1, 5), (3, -2), (1, 4)] {
            let (a, b) = (ctx.from_i64(a), ctx.from_i64(b));
            let one = ctx.one();
            let x = &one - &(&a * &b);
            let y = &a * &x;
            assert!(!y.is_zero());
            let (s, t) = (&x / &y, y.clone());
            let lhs = e.chart_pullback(Chart::Phi0).eval(&[a, b, ctx.zero(), ctx.zero(), ctx.zero()]);
            let rhs = e.chart_pullback(Chart::Phi1).eval(&[s, t, ctx.zero(), ctx.zero(), ctx.zero()]);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn t_polynomials() {
        let ctx = q();
        let p = RingPolyT::t(ctx).mul(&RingPolyT::x(ctx)).add(&RingPolyT::y(ctx));
        assert_eq!(p.coeffs(), vec![RingElement::y(ctx), RingElement::x(ctx)]);
        assert_eq!(p.basepoint_curve(), vec![ctx.zero(), ctx.one()]);
        assert_eq!(p.eval_t(&ctx.from_i64(2)), nf("2*x + y"));
        assert_eq!(RingPolyT::from_coeffs(&p.coeffs(), ctx), p);
    }

    fn arb_expr() -> impl Strategy<Value = MPoly> {
        prop::collection::vec((0u16..3, 0u16..3, 0u16..3, 0u16..3, -4i64..5), 0..6).prop_map(|ts| {
            let mut p = MPoly::zero(FieldCtx::Rationals);
            for (a, b, c, d, k) in ts {
                p.add_term(Monomial([a, b, c, d, 0]), &FieldCtx::Rationals.from_i64(k));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn normal_form_is_a_homomorphism(e1 in arb_expr(), e2 in arb_expr()) {
            let (n1, n2) = (RingElement::normal_form(&e1).unwrap(), RingElement::normal_form(&e2).unwrap());
            prop_assert_eq!(RingElement::normal_form(&e1.mul(&e2)).unwrap(), n1.mul(&n2));
            prop_assert_eq!(RingElement::normal_form(&e1.add(&e2)).unwrap(), n1.add(&n2));
        }

        #[test]
        fn normal_form_is_idempotent(e in arb_expr()) {
            let n = RingElement::normal_form(&e).unwrap();
            prop_assert_eq!(RingElement::normal_form(n.poly()).unwrap(), n);
        }

        #[test]
        fn tau_is_a_ring_automorphism(e1 in arb_expr(), e2 in arb_expr()) {
            let (n1, n2) = (RingElement::normal_form(&e1).unwrap(), RingElement::normal_form(&e2).unwrap());
            prop_assert_eq!(n1.mul(&n2).tau(), n1.tau().mul(&n2.tau()));
        }
    }
}
