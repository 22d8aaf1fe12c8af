//! Sections of the line bundles `P_n` and `Q_n`, the idempotents `M_n`, the
//! map `sigma` from binary forms, and Sylvester resultants.
//!
//! A section of `P_n` is written `a0*[x^n; z^n] + a1*[y^n; w^n]`, a section of
//! `Q_n` as `a0*[x^n; y^n] + a1*[z^n; w^n]`. Coefficient pairs are not unique,
//! so sections compare by their expanded components in `R^2`.

use std::collections::HashMap;

use thiserror::Error;

use crate::field::{binomial, FieldCtx};
use crate::jring::{RingElement, RingLike};
use crate::sl2::Mat2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("resultant is not a unit")]
    ResultantNotUnit,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("sections live on different bundles")]
    KindMismatch,
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BundleKind {
    /// The trivial bundle.
    O,
    P(u32),
    Q(u32),
}

impl BundleKind {
    /// `P_n` for positive `n`, `Q_{-n}` for negative, `O` for zero.
    pub fn for_degree(n: i32) -> Self {
        match n.signum() {
            1 => BundleKind::P(n as u32),
            -1 => BundleKind::Q(n.unsigned_abs()),
            _ => BundleKind::O,
        }
    }

    pub fn degree(&self) -> i32 {
        match *self {
            BundleKind::O => 0,
            BundleKind::P(n) => n as i32,
            BundleKind::Q(n) => -(n as i32),
        }
    }

    pub fn level(&self) -> u32 {
        self.degree().unsigned_abs()
    }
}

/// Expanded components of `a0*g0 + a1*g1` for the standard generators of `kind`.
pub fn expand<E: RingLike>(kind: BundleKind, a0: &E, a1: &E) -> (E, E) {
    let ctx = a0.ctx();
    let v = |r: RingElement| E::from_ring(&r);
    match kind {
        BundleKind::O => (a0.clone(), a0.clone()),
        BundleKind::P(n) | BundleKind::Q(n) => {
            let (x, y, z, w) = (
                RingElement::x(ctx).pow(n),
                RingElement::y(ctx).pow(n),
                RingElement::z(ctx).pow(n),
                RingElement::w(ctx).pow(n),
            );
            let (g00, g01, g10, g11) = match kind {
                BundleKind::P(_) => (x, y, z, w),
                _ => (x, z, y, w),
            };
            (a0.mul(&v(g00)).add(&a1.mul(&v(g01))), a0.mul(&v(g10)).add(&a1.mul(&v(g11))))
        }
    }
}

/// The mixed generator `[x^(n-i) y^i; z^(n-i) w^i]` of `P_n` (its `tau` image for `Q_n`).
pub fn generator(ctx: FieldCtx, kind: BundleKind, i: u32) -> (RingElement, RingElement) {
    let n = kind.level();
    let (x, y, z, w) = (RingElement::x(ctx), RingElement::y(ctx), RingElement::z(ctx), RingElement::w(ctx));
    let p = (x.pow(n - i).mul(&y.pow(i)), z.pow(n - i).mul(&w.pow(i)));
    match kind {
        BundleKind::Q(_) => (p.0.tau(), p.1.tau()),
        _ => p,
    }
}

#[derive(Debug, Clone)]
pub struct Section {
    kind: BundleKind,
    coeffs: (RingElement, RingElement),
    expanded: (RingElement, RingElement),
}

impl PartialEq for Section {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind && self.expanded == o.expanded
    }
}

impl Eq for Section {}

impl Section {
    pub fn new(kind: BundleKind, a0: RingElement, a1: RingElement) -> Self {
        let expanded = expand(kind, &a0, &a1);
        Section { kind, coeffs: (a0, a1), expanded }
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    pub fn coeffs(&self) -> (&RingElement, &RingElement) {
        (&self.coeffs.0, &self.coeffs.1)
    }

    pub fn expanded(&self) -> (&RingElement, &RingElement) {
        (&self.expanded.0, &self.expanded.1)
    }

    /// Entrywise `tau`, which carries `P_n` sections to `Q_n` sections and back.
    pub fn tau(&self) -> Section {
        let kind = match self.kind {
            BundleKind::P(n) => BundleKind::Q(n),
            BundleKind::Q(n) => BundleKind::P(n),
            BundleKind::O => BundleKind::O,
        };
        Section::new(kind, self.coeffs.0.tau(), self.coeffs.1.tau())
    }
}

/// Rewrites `sum c_i * generator_i` in the two-generator form.
///
/// Multiplying by `(x + w)^n = 1` splits each mixed generator into pieces
/// `x^(n-d) w^d [x^(n-i) y^i; z^(n-i) w^i]`, each of which is a multiple of
/// `[x^n; z^n]` when `i + d <= n` (and `i < n`) and of `[y^n; w^n]` otherwise.
pub fn normalize_section(kind: BundleKind, c: &[RingElement]) -> Result<Section, BundleError> {
    let n = kind.level();
    if n == 0 {
        return Err(BundleError::PreconditionViolated("bundle of nonzero degree"));
    }
    if c.len() != n as usize + 1 {
        return Err(BundleError::Length { expected: n as usize + 1, got: c.len() });
    }
    if let BundleKind::Q(_) = kind {
        let t: Vec<RingElement> = c.iter().map(RingElement::tau).collect();
        let p = normalize_section(BundleKind::P(n), &t)?;
        return Ok(Section::new(kind, p.coeffs.0.tau(), p.coeffs.1.tau()));
    }
    let ctx = c[0].ctx();
    let (x, y, z, w) = (RingElement::x(ctx), RingElement::y(ctx), RingElement::z(ctx), RingElement::w(ctx));
    let (mut a0, mut a1) = (RingElement::zero(ctx), RingElement::zero(ctx));
    for (i, ci) in c.iter().enumerate() {
        let i = i as u32;
        if ci.is_zero() {
            continue;
        }
        for d in 0..=n {
            let b = ctx.from_bigint(&binomial(n as u64, d as u64));
            let term = if i + d <= n && i < n {
                x.pow(n - i - d).mul(&y.pow(i)).mul(&w.pow(d))
            } else {
                x.pow(n - d).mul(&z.pow(n - i)).mul(&w.pow(d + i - n))
            };
            let term = term.mul(ci).scale(&b);
            if i + d <= n && i < n {
                a0 = a0.add(&term);
            } else {
                a1 = a1.add(&term);
            }
        }
    }
    Ok(Section::new(kind, a0, a1))
}

/// Componentwise product `P_n x P_m -> P_{n+m}` (and the same for `Q`).
pub fn mu_product(s: &Section, t: &Section) -> Result<Section, BundleError> {
    let kind = match (s.kind, t.kind) {
        (BundleKind::P(n), BundleKind::P(m)) => BundleKind::P(n + m),
        (BundleKind::Q(n), BundleKind::Q(m)) => BundleKind::Q(n + m),
        _ => return Err(BundleError::KindMismatch),
    };
    let (n, m) = (s.kind.level() as usize, t.kind.level() as usize);
    let ctx = s.coeffs.0.ctx();
    let mut c = vec![RingElement::zero(ctx); n + m + 1];
    for (i, a) in [(0, &s.coeffs.0), (n, &s.coeffs.1)] {
        for (j, b) in [(0, &t.coeffs.0), (m, &t.coeffs.1)] {
            c[i + j] = c[i + j].add(&a.mul(b));
        }
    }
    normalize_section(kind, &c)
}

/// The idempotents `M_n`, `M_n'` together with `A`, `B` satisfying `x^n A + w^n B = 1`.
#[derive(Debug, Clone)]
pub struct IdempotentPair {
    pub n: u32,
    pub m: Mat2<RingElement>,
    pub m_prime: Mat2<RingElement>,
    pub a: RingElement,
    pub b: RingElement,
}

pub fn mn_matrices(ctx: FieldCtx, n: u32) -> Result<IdempotentPair, BundleError> {
    if n == 0 {
        return Err(BundleError::PreconditionViolated("n >= 1"));
    }
    let (x, y, z, w) = (RingElement::x(ctx), RingElement::y(ctx), RingElement::z(ctx), RingElement::w(ctx));
    let big = 2 * n - 1;
    let coef = |k: u32| ctx.from_bigint(&binomial(big as u64, k as u64));
    let mut a = RingElement::zero(ctx);
    for k in 0..n {
        a = a.add(&x.pow(n - 1 - k).mul(&w.pow(k)).scale(&coef(k)));
    }
    let mut b = RingElement::zero(ctx);
    for k in n..=big {
        b = b.add(&x.pow(big - k).mul(&w.pow(k - n)).scale(&coef(k)));
    }
    let (xa, za, yb, wb) = (x.pow(n).mul(&a), z.pow(n).mul(&a), y.pow(n).mul(&b), w.pow(n).mul(&b));
    let ya = y.pow(n).mul(&a);
    let zb = z.pow(n).mul(&b);
    Ok(IdempotentPair { n, m: Mat2::new(xa.clone(), yb, za, wb.clone()), m_prime: Mat2::new(xa, zb, ya, wb), a, b })
}

/// Two binary forms of degree `n`; `s0[i]` is the coefficient of `alpha^i beta^(n-i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogPair {
    pub n: u32,
    pub s0: Vec<RingElement>,
    pub s1: Vec<RingElement>,
}

impl HomogPair {
    pub fn new(n: u32, s0: Vec<RingElement>, s1: Vec<RingElement>) -> Result<Self, BundleError> {
        for s in [&s0, &s1] {
            if s.len() != n as usize + 1 {
                return Err(BundleError::Length { expected: n as usize + 1, got: s.len() });
            }
        }
        Ok(HomogPair { n, s0, s1 })
    }

    /// `sigma(alpha^i beta^(n-i)) = [x^i y^(n-i); z^i w^(n-i)]`, applied to both forms.
    pub fn sigma(&self) -> Result<(Section, Section), BundleError> {
        let kind = BundleKind::P(self.n);
        let rev = |s: &[RingElement]| s.iter().rev().cloned().collect::<Vec<_>>();
        Ok((normalize_section(kind, &rev(&self.s0))?, normalize_section(kind, &rev(&self.s1))?))
    }

    /// Resultant of the dehomogenized pair in `X = alpha/beta`, both of formal degree `n`.
    pub fn resultant(&self) -> RingElement {
        resultant(&self.s0, &self.s1)
    }
}

/// Sylvester matrix of `f` and `g` (coefficients in ascending order, formal
/// degrees `len - 1`).
pub fn sylvester<E: RingLike>(f: &[E], g: &[E]) -> Vec<Vec<E>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let ctx = f[0].ctx();
    let mut rows = vec![vec![E::zero_in(ctx); size]; size];
    for r in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            rows[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            rows[n + r][r + k] = c.clone();
        }
    }
    rows
}

/// Determinant by Laplace expansion along rows, memoized on the set of
/// remaining columns. Division free, so it works over any commutative ring.
pub fn determinant<E: RingLike>(rows: &[Vec<E>], ctx: FieldCtx) -> E {
    let size = rows.len();
    if size == 0 {
        return E::one_in(ctx);
    }
    assert!(size <= 24, "determinant too large for Laplace expansion");
    fn go<E: RingLike>(rows: &[Vec<E>], r: usize, cols: u32, memo: &mut HashMap<u32, E>, ctx: FieldCtx) -> E {
        if r == rows.len() {
            return E::one_in(ctx);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = E::zero_in(ctx);
        let mut pos = 0;
        for c in 0..rows.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let a = &rows[r][c];
            if !a.is_zero() {
                let minor = go(rows, r + 1, cols & !(1 << c), memo, ctx);
                let t = a.mul(&minor);
                acc = if pos % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            pos += 1;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    go(rows, 0, (1u32 << size) - 1, &mut HashMap::new(), ctx)
}

pub fn resultant<E: RingLike>(f: &[E], g: &[E]) -> E {
    let ctx = f[0].ctx();
    determinant(&sylvester(f, g), ctx)
}

fn poly_mul(a: &[RingElement], b: &[RingElement]) -> Vec<RingElement> {
    let ctx = a[0].ctx();
    let mut out = vec![RingElement::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn poly_add(a: &[RingElement], b: &[RingElement]) -> Vec<RingElement> {
    let ctx = a[0].ctx();
    (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| RingElement::zero(ctx));
            let y = b.get(i).cloned().unwrap_or_else(|| RingElement::zero(ctx));
            x.add(&y)
        })
        .collect()
}

/// `U`, `V` with `A*U + B*V = 1`, `deg U < deg B`, `deg V < deg A`, by
/// Cramer's rule on the transposed Sylvester system.
pub fn bezout_from_unit_resultant(
    a: &[RingElement],
    b: &[RingElement],
) -> Result<(Vec<RingElement>, Vec<RingElement>), BundleError> {
    let ctx = a[0].ctx();
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    if size == 0 {
        return Err(BundleError::PreconditionViolated("positive total degree"));
    }
    // Column j < n holds X^j * A, column n + j holds X^j * B; row k is X^k.
    let mut cols = vec![vec![RingElement::zero(ctx); size]; size];
    for j in 0..n {
        for (k, c) in a.iter().enumerate() {
            cols[j + k][j] = c.clone();
        }
    }
    for j in 0..m {
        for (k, c) in b.iter().enumerate() {
            cols[j + k][n + j] = c.clone();
        }
    }
    let det = determinant(&cols, ctx);
    let inv = det.as_unit().ok_or(BundleError::ResultantNotUnit)?.inv().expect("unit");
    let solve = |j: usize| {
        let mut mat = cols.clone();
        for (k, row) in mat.iter_mut().enumerate() {
            row[j] = if k == 0 { RingElement::one(ctx) } else { RingElement::zero(ctx) };
        }
        determinant(&mat, ctx).scale(&inv)
    };
    let u: Vec<RingElement> = (0..n).map(solve).collect();
    let v: Vec<RingElement> = (n..size).map(solve).collect();
    let u = if u.is_empty() { vec![RingElement::zero(ctx)] } else { u };
    let v = if v.is_empty() { vec![RingElement::zero(ctx)] } else { v };
    debug_assert!({
        let s = poly_add(&poly_mul(a, &u), &poly_mul(b, &v));
        s[0] == RingElement::one(ctx) && s[1..].iter().all(RingElement::is_zero)
    });
    Ok((u, v))
}

/// Both sides of one resultant identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: RingElement,
    pub rhs: RingElement,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `res(rev A, rev B) = (-1)^n res(A, B)` for two forms of formal degree `n`.
pub fn reversal_identity(a: &[RingElement], b: &[RingElement]) -> Result<IdentityCheck, BundleError> {
    if a.len() != b.len() {
        return Err(BundleError::PreconditionViolated("equal formal degrees"));
    }
    let n = a.len() - 1;
    let rev = |p: &[RingElement]| p.iter().rev().cloned().collect::<Vec<_>>();
    let r = resultant(a, b);
    Ok(IdentityCheck { lhs: resultant(&rev(a), &rev(b)), rhs: if n.is_multiple_of(2) { r } else { r.neg() } })
}

/// `res(A + B*C, B) = res(A, B)` when `deg A >= deg(B*C)`.
pub fn shift_identity(a: &[RingElement], b: &[RingElement], c: &[RingElement]) -> Result<IdentityCheck, BundleError> {
    if a.len() < b.len() + c.len() - 1 {
        return Err(BundleError::PreconditionViolated("deg A >= deg BC"));
    }
    let ctx = a[0].ctx();
    let mut shifted = poly_add(a, &poly_mul(b, c));
    shifted.resize(a.len(), RingElement::zero(ctx));
    Ok(IdentityCheck { lhs: resultant(&shifted, b), rhs: resultant(a, b) })
}

/// `res(A*X - B/u, u*A) = (-1)^n * u * res(A, B)` for `A` monic of degree `n`
/// and `B` of formal degree `n` with unit resultant. For odd `n` this is the
/// familiar `-u * res(A, B)`; either way the left side is a unit.
pub fn conservation_identity(
    a: &[RingElement],
    b: &[RingElement],
    u: &crate::field::FieldElem,
) -> Result<IdentityCheck, BundleError> {
    let ctx = a[0].ctx();
    if a.len() != b.len() || a.last().map(|l| *l != RingElement::one(ctx)).unwrap_or(true) {
        return Err(BundleError::PreconditionViolated("A monic, deg A = deg B"));
    }
    let r = resultant(a, b);
    if r.as_unit().is_none() {
        return Err(BundleError::PreconditionViolated("res(A, B) a unit"));
    }
    let uinv = u.inv().map_err(|_| BundleError::PreconditionViolated("u a unit"))?;
    let mut ax = vec![RingElement::zero(ctx)];
    ax.extend(a.iter().cloned());
    let b_over_u: Vec<RingElement> = b.iter().map(|c| c.scale(&uinv)).collect();
    let lhs_f: Vec<RingElement> = poly_add(&ax, &b_over_u.iter().map(RingElement::neg).collect::<Vec<_>>());
    let ua: Vec<RingElement> = a.iter().map(|c| c.scale(u)).collect();
    let rhs = r.scale(u);
    let n = a.len() - 1;
    Ok(IdentityCheck { lhs: resultant(&lhs_f, &ua), rhs: if n % 2 == 1 { rhs.neg() } else { rhs } })
}
