//! Sparse multivariate polynomials in `x, y, z, w, T` over a [`FieldCtx`].
//!
//! This is the free polynomial ring underneath everything else. Terms are kept
//! in degree-reverse-lexicographic order with `x > y > z > w > T`, so the last
//! entry of the term map is the leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::field::{FieldCtx, FieldElem};

pub const NVARS: usize = 5;
pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const W: usize = 3;
pub const T: usize = 4;
pub const VAR_NAMES: [&str; NVARS] = ["x", "y", "z", "w", "T"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(i: usize) -> Self {
        let mut e = [0; NVARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| *a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient(&self, other: &Self) -> Self {
        let mut e = other.0;
        for (a, b) in e.iter_mut().zip(self.0) {
            *a -= b;
        }
        Monomial(e)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).max(b);
        }
        Monomial(e)
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0).all(|(a, b)| *a == 0 || b == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for i in (0..NVARS).rev() {
                match self.0[i].cmp(&other.0[i]) {
                    Ordering::Equal => continue,
                    ord => return ord.reverse(),
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    ctx: FieldCtx,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl MPoly {
    pub fn zero(ctx: FieldCtx) -> Self {
        MPoly { ctx, terms: BTreeMap::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn one(ctx: FieldCtx) -> Self {
        Self::constant(ctx.one())
    }

    pub fn var(ctx: FieldCtx, i: usize) -> Self {
        Self::term(ctx.one(), Monomial::var(i))
    }

    pub fn term(c: FieldElem, m: Monomial) -> Self {
        let mut p = MPoly::zero(c.ctx());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Monomial::ONE)
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.last_key_value()
    }

    /// Terms in descending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter().rev()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(*m, c);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MPoly { ctx: self.ctx, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.ctx);
        }
        MPoly { ctx: self.ctx, terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_term(&self, c: &FieldElem, mono: &Monomial) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.ctx);
        }
        MPoly { ctx: self.ctx, terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect() }
    }

    /// `self += c * t * g`.
    pub fn add_scaled_assign(&mut self, c: &FieldElem, t: &Monomial, g: &MPoly) {
        for (m, a) in &g.terms {
            self.add_term(m.mul(t), &(a * c));
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::zero(self.ctx);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = MPoly::one(self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes polynomials for every variable.
    pub fn compose(&self, images: &[MPoly; NVARS]) -> Self {
        let mut out = MPoly::zero(self.ctx);
        let mut cache: Vec<Vec<MPoly>> = images.iter().map(|p| vec![MPoly::one(p.ctx)]).collect();
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                while cache[v].len() <= e as usize {
                    let next = cache[v].last().unwrap().mul(&images[v]);
                    cache[v].push(next);
                }
                if e > 0 {
                    t = t.mul(&cache[v][e as usize]);
                }
            }
            out.add_assign(&t);
        }
        out
    }

    pub fn eval(&self, point: &[FieldElem; NVARS]) -> FieldElem {
        let mut acc = self.ctx.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &point[v].pow(e as i64).expect("nonnegative power");
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Makes the leading coefficient one. Returns the factor used.
    pub fn make_monic(&mut self) -> Option<FieldElem> {
        let lc = self.leading()?.1.clone();
        let inv = lc.inv().ok()?;
        *self = self.scale(&inv);
        Some(inv)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (v, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", VAR_NAMES[v])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text form: terms in descending order, `*` between factors,
/// unit coefficients omitted on non-constant terms.
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write_monomial(f, m)?;
            } else {
                write!(f, "{mag}*")?;
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}
