//! Seeded random inputs shared by the acceptance suite, the self-test and the
//! benchmarks.

use rand::Rng;

use crate::field::{FieldCtx, FieldElem};
use crate::jring::RingElement;
use crate::morphism::{g_uv, m_uv, pullback_rational, JMap, RationalMapP1};
use crate::sl2::{act, Mat2, PointedSL2};

pub fn small_scalar<R: Rng>(rng: &mut R, ctx: FieldCtx) -> FieldElem {
    ctx.from_i64(rng.gen_range(-3..=3))
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R, ctx: FieldCtx) -> FieldElem {
    loop {
        let c = small_scalar(rng, ctx);
        if !c.is_zero() {
            return c;
        }
    }
}

/// `a y + b z + c w`, which vanishes at the basepoint.
pub fn vanishing_linear<R: Rng>(rng: &mut R, ctx: FieldCtx) -> RingElement {
    let mut acc = RingElement::zero(ctx);
    for v in [RingElement::y(ctx), RingElement::z(ctx), RingElement::w(ctx)] {
        acc = acc.add(&v.scale(&small_scalar(rng, ctx)));
    }
    acc
}

/// A ring element of total degree at most `d` in `x, y, z`, `x`-degree at most one.
pub fn ring_element<R: Rng>(rng: &mut R, ctx: FieldCtx, d: u32) -> RingElement {
    let (x, y, z) = (RingElement::x(ctx), RingElement::y(ctx), RingElement::z(ctx));
    let mut acc = RingElement::zero(ctx);
    for i in 0..=d {
        for j in 0..=d - i {
            let m = y.pow(i).mul(&z.pow(j));
            if rng.gen_bool(0.5) {
                acc = acc.add(&m.scale(&small_scalar(rng, ctx)));
            }
            if i + j < d && rng.gen_bool(0.5) {
                acc = acc.add(&x.mul(&m).scale(&small_scalar(rng, ctx)));
            }
        }
    }
    acc
}

pub fn upper(ctx: FieldCtx, r: RingElement) -> Mat2<RingElement> {
    Mat2::new(RingElement::one(ctx), r, RingElement::zero(ctx), RingElement::one(ctx))
}

pub fn lower(ctx: FieldCtx, s: RingElement) -> Mat2<RingElement> {
    Mat2::new(RingElement::one(ctx), RingElement::zero(ctx), s, RingElement::one(ctx))
}

/// `E12(r) E21(s)` with `r, s` vanishing at the basepoint; entries of degree at most two.
pub fn pointed_sl2<R: Rng>(rng: &mut R, ctx: FieldCtx) -> PointedSL2 {
    let m = upper(ctx, vanishing_linear(rng, ctx)).mul(&lower(ctx, vanishing_linear(rng, ctx)));
    PointedSL2::new(m).expect("elementary product is pointed and special")
}

/// Either an elementary product or some `m_{u,v}`.
pub fn twist<R: Rng>(rng: &mut R, ctx: FieldCtx) -> PointedSL2 {
    if rng.gen_bool(0.5) {
        pointed_sl2(rng, ctx)
    } else {
        m_uv(&nonzero_scalar(rng, ctx), &nonzero_scalar(rng, ctx)).expect("nonzero parameters")
    }
}

pub fn rational_map<R: Rng>(rng: &mut R, ctx: FieldCtx, max_degree: usize) -> RationalMapP1 {
    loop {
        let n = rng.gen_range(1..=max_degree);
        let a: Vec<FieldElem> = (0..n).map(|_| small_scalar(rng, ctx)).collect();
        let b: Vec<FieldElem> = (0..n).map(|_| small_scalar(rng, ctx)).collect();
        if let Ok(f) = RationalMapP1::new(ctx, &a, &b) {
            return f;
        }
    }
}

/// `count` maps of degree 1..=3: pullbacks of random rational maps, every
/// other one twisted by a random pointed matrix.
pub fn map_corpus<R: Rng>(rng: &mut R, ctx: FieldCtx, count: usize) -> Vec<JMap> {
    (0..count)
        .map(|i| {
            let f = pullback_rational(&rational_map(rng, ctx, 3)).expect("nonzero resultant");
            if i % 2 == 1 {
                act(&twist(rng, ctx), &f).expect("positive degree")
            } else {
                f
            }
        })
        .collect()
}

/// Degree-zero maps: `g_{u,v}` and first columns of random pointed matrices.
pub fn row_corpus<R: Rng>(rng: &mut R, ctx: FieldCtx, count: usize) -> Vec<JMap> {
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                g_uv(&nonzero_scalar(rng, ctx), &nonzero_scalar(rng, ctx)).expect("nonzero parameters")
            } else {
                JMap::row_from_certified(pointed_sl2(rng, ctx).first_column()).expect("pointed column")
            }
        })
        .collect()
}
