//! Canonical forms in the first Milnor-Witt K-group, and the matching
//! degree-zero representatives built from the `g_{u,1}` family.
//!
//! Over `F_p` a class is a residue mod `p - 1` (discrete log to the smallest
//! generator). Over `Q` we use the real normal form `n[-1] + [u]` with
//! `u > 0`, i.e. we compute in the group of the real field through `Q -> R`.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::homotopy::{scaling_witness, HomotopyError, HomotopyWitness};
use crate::jring::RingElement;
use crate::morphism::{g_uv, m_uv, make_row, JMap, MorphismError};
use crate::sl2::{row_sum, Sl2Error};
use crate::text::{Lexer, ParseError};

#[derive(Debug, Error)]
pub enum MwkError {
    #[error("symbol [0] is not allowed")]
    ZeroSymbol,
    #[error("{0} is not a prime field")]
    NotPrimeField(FieldCtx),
    #[error("{0} is a non-square; the square-scaling chain does not apply")]
    NotSquare(FieldElem),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    /// `[u]`
    Unit(FieldElem),
    /// `eta[u][v]`, which lies in degree one.
    Eta(FieldElem, FieldElem),
}

/// A formal integer combination of degree-one symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MWSymbolWord {
    pub ctx: FieldCtx,
    pub terms: Vec<(i64, Symbol)>,
}

impl MWSymbolWord {
    pub fn unit(u: FieldElem) -> Self {
        MWSymbolWord { ctx: u.ctx(), terms: vec![(1, Symbol::Unit(u))] }
    }

    /// Parses sums such as `[2][3]`, `2[3] - [1/2]` or `eta[-1][-1]`.
    /// Juxtaposed symbols are added.
    pub fn parse(ctx: FieldCtx, s: &str) -> Result<Self, MwkError> {
        let mut lx = Lexer::new(s);
        let mut terms = Vec::new();
        while !lx.at_end() {
            let sign = if lx.eat('-') {
                -1
            } else {
                lx.eat('+');
                1
            };
            let k = match lx.digits() {
                Some(d) => d.parse::<i64>().map_err(|_| ParseError::Invalid(format!("multiplicity {d}")))?,
                None => 1,
            };
            lx.eat('*');
            let sym = if lx.eat_word("eta") {
                let u = bracket(&mut lx, ctx)?;
                let v = bracket(&mut lx, ctx)?;
                Symbol::Eta(u, v)
            } else {
                Symbol::Unit(bracket(&mut lx, ctx)?)
            };
            terms.push((sign * k, sym));
        }
        if terms.is_empty() {
            return Err(ParseError::Invalid("empty word".into()).into());
        }
        Ok(MWSymbolWord { ctx, terms })
    }
}

fn bracket(lx: &mut Lexer<'_>, ctx: FieldCtx) -> Result<FieldElem, MwkError> {
    lx.expect('[')?;
    let inner = lx.take_until(&[']']);
    let u = ctx.parse_scalar(inner).map_err(ParseError::from)?;
    lx.expect(']')?;
    if u.is_zero() {
        return Err(MwkError::ZeroSymbol);
    }
    Ok(u)
}

impl fmt::Display for MWSymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, s)) in self.terms.iter().enumerate() {
            match (i, *k) {
                (0, 1) => {}
                (0, -1) => write!(f, "-")?,
                (0, k) => write!(f, "{k}")?,
                (_, 1) => write!(f, " + ")?,
                (_, -1) => write!(f, " - ")?,
                (_, k) if k < 0 => write!(f, " - {}", -k)?,
                (_, k) => write!(f, " + {k}")?,
            }
            match s {
                Symbol::Unit(u) => write!(f, "[{u}]")?,
                Symbol::Eta(u, v) => write!(f, "eta[{u}][{v}]")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum K1Canonical {
    /// `residue * [g]` in a cyclic group of order `p - 1`.
    Cyclic { residue: u64, order: u64, generator: FieldElem },
    /// `n[-1] + [u]` with `u > 0`.
    Real { n: i64, u: FieldElem },
}

impl K1Canonical {
    pub fn zero(ctx: FieldCtx) -> Result<Self, MwkError> {
        match ctx {
            FieldCtx::Rationals => Ok(K1Canonical::Real { n: 0, u: ctx.one() }),
            FieldCtx::PrimeField(_) => Ok(K1Canonical::Cyclic {
                residue: 0,
                order: k1_order(ctx)?,
                generator: ctx.multiplicative_generator().expect("prime field"),
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            K1Canonical::Cyclic { residue, .. } => *residue == 0,
            K1Canonical::Real { n, u } => *n == 0 && u.is_one(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (K1Canonical::Cyclic { residue: a, order, generator }, K1Canonical::Cyclic { residue: b, .. }) => {
                K1Canonical::Cyclic { residue: (a + b) % order, order: *order, generator: generator.clone() }
            }
            (K1Canonical::Real { n, u }, K1Canonical::Real { n: m, u: v }) => K1Canonical::Real { n: n + m, u: u * v },
            _ => panic!("adding canonical forms over different fields"),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        match self {
            K1Canonical::Cyclic { residue, order, generator } => {
                let r = (i128::from(k) * i128::from(*residue)).rem_euclid(i128::from(*order));
                K1Canonical::Cyclic { residue: r as u64, order: *order, generator: generator.clone() }
            }
            K1Canonical::Real { n, u } => K1Canonical::Real { n: n * k, u: u.pow(k).expect("positive") },
        }
    }
}

impl fmt::Display for K1Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            K1Canonical::Cyclic { residue, order, generator } => {
                write!(f, "{residue} mod {order} (generator {generator})")
            }
            K1Canonical::Real { n, u } => write!(f, "{n}[-1] + [{u}]"),
        }
    }
}

pub fn k1_order(ctx: FieldCtx) -> Result<u64, MwkError> {
    match ctx {
        FieldCtx::Rationals => Err(MwkError::NotPrimeField(ctx)),
        FieldCtx::PrimeField(p) => Ok(p - 1),
    }
}

fn symbol_class(u: &FieldElem) -> Result<K1Canonical, MwkError> {
    if u.is_zero() {
        return Err(MwkError::ZeroSymbol);
    }
    let ctx = u.ctx();
    match ctx {
        FieldCtx::Rationals => {
            let n = i64::from(u.is_negative());
            let abs = if u.is_negative() { u.neg() } else { u.clone() };
            Ok(K1Canonical::Real { n, u: abs })
        }
        FieldCtx::PrimeField(_) => {
            let g = ctx.multiplicative_generator().expect("prime field");
            let residue = ctx.discrete_log(&g, u).expect("nonzero residue");
            Ok(K1Canonical::Cyclic { residue, order: k1_order(ctx)?, generator: g })
        }
    }
}

/// Reduces a word to its canonical form. `eta[u][v]` is rewritten as
/// `[uv] - [u] - [v]`.
pub fn k1_canonical(word: &MWSymbolWord) -> Result<K1Canonical, MwkError> {
    let mut acc = K1Canonical::zero(word.ctx)?;
    for (k, s) in &word.terms {
        let class = match s {
            Symbol::Unit(u) => symbol_class(u)?,
            Symbol::Eta(u, v) => {
                symbol_class(&(u * v))?.add(&symbol_class(u)?.scale(-1)).add(&symbol_class(v)?.scale(-1))
            }
        };
        acc = acc.add(&class.scale(*k));
    }
    Ok(acc)
}

fn identity_row(ctx: FieldCtx) -> Result<JMap, MwkError> {
    Ok(make_row(RingElement::one(ctx), RingElement::zero(ctx))?)
}

/// `k` copies of `g` summed with `row_sum`; `k = 0` gives `(1, 0)`.
fn repeat_sum(g: &JMap, k: u64) -> Result<JMap, MwkError> {
    if k == 0 {
        return identity_row(g.ctx());
    }
    let mut acc = g.clone();
    for _ in 1..k {
        acc = row_sum(&acc, g)?;
    }
    Ok(acc)
}

/// The degree-zero representative of a canonical class: `r` copies of
/// `g_{g,1}` over `F_p`, and `n` copies of `g_{-1,1}` (or `-n` of `g_{1,-1}`)
/// followed by `g_{u,1}` over `Q`.
pub fn kappa_rep(class: &K1Canonical) -> Result<JMap, MwkError> {
    match class {
        K1Canonical::Cyclic { residue, generator, .. } => {
            let one = generator.ctx().one();
            repeat_sum(&g_uv(generator, &one)?, *residue)
        }
        K1Canonical::Real { n, u } => {
            let ctx = u.ctx();
            let (one, m1) = (ctx.one(), ctx.from_i64(-1));
            let sign = if *n >= 0 { g_uv(&m1, &one)? } else { g_uv(&one, &m1)? };
            let signs = repeat_sum(&sign, n.unsigned_abs())?;
            if u.is_one() {
                return Ok(signs);
            }
            let gu = g_uv(u, &one)?;
            if *n == 0 {
                Ok(gu)
            } else {
                Ok(row_sum(&signs, &gu)?)
            }
        }
    }
}

pub fn kappa_rep_word(word: &MWSymbolWord) -> Result<JMap, MwkError> {
    kappa_rep(&k1_canonical(word)?)
}

/// For a square `v = c^2`, a witness from `row_sum(g_{u,1}, g_{v,1})` to
/// `g_{uv,1}`: rescale `g_{v,1}` to `g_{1,1/v}` inside the sum, use
/// `m_{u,1} m_{1,1/v} = m_{u,1/v}`, then rescale `g_{u,1/v}` to `g_{uv,1}`.
pub fn square_sum_witness(u: &FieldElem, v: &FieldElem) -> Result<HomotopyWitness, MwkError> {
    let c = v.sqrt().filter(|c| !c.is_zero()).ok_or_else(|| MwkError::NotSquare(v.clone()))?;
    let one = u.ctx().one();
    let mu = m_uv(u, &one)?;
    let mv = m_uv(v, &one)?;
    let left = mu.matrix().to_t();
    let inner = scaling_witness(&mv, &c.inv().expect("nonzero"))?;
    let inner = HomotopyWitness::new(inner.segments.iter().map(|s| s.transform(&left)).collect())?;
    let vinv = v.inv().expect("nonzero");
    let outer = scaling_witness(&m_uv(u, &vinv)?, &c)?;
    Ok(inner.then(outer))
}
