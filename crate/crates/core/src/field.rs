//! Coefficient fields: the rationals and prime fields `F_p`.
//!
//! Every element carries its context, so mixing elements of different fields
//! is caught at the operation that would mix them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field context mismatch: {0} vs {1}")]
    ContextMismatch(FieldCtx, FieldCtx),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("{0} is not a square")]
    NotSquare(String),
}

/// Which field we are working over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldCtx {
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldCtx::Rationals => write!(f, "Q"),
            FieldCtx::PrimeField(p) => write!(f, "Fp={p}"),
        }
    }
}

impl FromStr for FieldCtx {
    type Err = FieldError;

    /// Accepts `Q` or `Fp=<p>`.
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldCtx::Rationals);
        }
        let p = s
            .strip_prefix("Fp=")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| FieldError::BadScalar(s.to_string()))?;
        FieldCtx::prime(p)
    }
}

impl FieldCtx {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime_u64(p) {
            Ok(FieldCtx::PrimeField(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldCtx::Rationals => 0,
            FieldCtx::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElem {
        match *self {
            FieldCtx::Rationals => FieldElem::Rational(BigRational::from_integer(n.into())),
            FieldCtx::PrimeField(p) => FieldElem::Residue { value: n.rem_euclid(p as i64) as u64, modulus: p },
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElem {
        match *self {
            FieldCtx::Rationals => FieldElem::Rational(BigRational::from_integer(n.clone())),
            FieldCtx::PrimeField(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                FieldElem::Residue { value: r.to_u64().expect("residue fits in u64"), modulus: p }
            }
        }
    }

    pub fn ratio(&self, num: i64, den: i64) -> Result<FieldElem, FieldError> {
        self.from_i64(num).try_div(&self.from_i64(den))
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElem, FieldError> {
        self.from_bigint(q.numer()).try_div(&self.from_bigint(q.denom()))
    }

    /// Parses `int` or `int/int`, with an optional leading minus.
    pub fn parse_scalar(&self, s: &str) -> Result<FieldElem, FieldError> {
        let bad = || FieldError::BadScalar(s.to_string());
        let (n, d) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        self.from_bigint(&n).try_div(&self.from_bigint(&d))
    }

    /// All elements of a prime field, in order `0, 1, ..., p-1`.
    pub fn elements(&self) -> Option<Vec<FieldElem>> {
        match *self {
            FieldCtx::Rationals => None,
            FieldCtx::PrimeField(p) => Some((0..p).map(|v| self.from_i64(v as i64)).collect()),
        }
    }

    /// Smallest generator of `F_p^×`. `None` over the rationals.
    pub fn multiplicative_generator(&self) -> Option<FieldElem> {
        let p = match *self {
            FieldCtx::Rationals => return None,
            FieldCtx::PrimeField(p) => p,
        };
        if p == 2 {
            return Some(self.one());
        }
        let factors = prime_factors(p - 1);
        (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).map(|g| self.from_i64(g as i64))
    }

    /// Discrete logarithm of `u` to the base `g` in `F_p^×`, by baby-step giant-step.
    pub fn discrete_log(&self, g: &FieldElem, u: &FieldElem) -> Option<u64> {
        let p = self.characteristic();
        let (g, u) = (g.residue()?, u.residue()?);
        if p == 0 || u == 0 || g == 0 {
            return None;
        }
        let order = p - 1;
        let m = (order as f64).sqrt().ceil() as u64 + 1;
        let mut table = std::collections::HashMap::with_capacity(m as usize);
        let mut cur = 1u64;
        for j in 0..m {
            table.entry(cur).or_insert(j);
            cur = mul_mod(cur, g, p);
        }
        let factor = pow_mod(inv_mod(g, p)?, m, p);
        let mut gamma = u;
        for i in 0..=m {
            if let Some(&j) = table.get(&gamma) {
                return Some((i * m + j) % order);
            }
            gamma = mul_mod(gamma, factor, p);
        }
        None
    }
}

/// A field element tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            FieldElem::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            FieldElem::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl FieldElem {
    pub fn ctx(&self) -> FieldCtx {
        match self {
            FieldElem::Rational(_) => FieldCtx::Rationals,
            FieldElem::Residue { modulus, .. } => FieldCtx::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_zero(),
            FieldElem::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_one(),
            FieldElem::Residue { value, .. } => *value == 1,
        }
    }

    fn residue(&self) -> Option<u64> {
        match self {
            FieldElem::Residue { value, .. } => Some(*value),
            FieldElem::Rational(_) => None,
        }
    }

    /// True for a rational with negative sign; residues are never negative.
    pub fn is_negative(&self) -> bool {
        matches!(self, FieldElem::Rational(q) if q.is_negative())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(q) => Some(q),
            FieldElem::Residue { .. } => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|q| q.to_f64())
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.ctx() == other.ctx() {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch(self.ctx(), other.ctx()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Residue { value: a, modulus: p }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue { value: ((*a as u128 + *b as u128) % *p as u128) as u64, modulus: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Residue { value: a, modulus: p }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue { value: mul_mod(*a, *b, *p), modulus: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn neg(&self) -> Self {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Residue { value, modulus } => {
                FieldElem::Residue { value: (modulus - value) % modulus, modulus: *modulus }
            }
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rational(a) => FieldElem::Rational(a.recip()),
            FieldElem::Residue { value, modulus } => FieldElem::Residue {
                value: inv_mod(*value, *modulus).expect("nonzero residue is invertible"),
                modulus: *modulus,
            },
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.ctx().one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// A square root, if one exists in the field.
    pub fn sqrt(&self) -> Option<Self> {
        match self {
            FieldElem::Rational(q) => {
                if q.is_negative() {
                    return None;
                }
                let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
                let r = BigRational::new(n, d);
                (&r * &r == *q).then_some(FieldElem::Rational(r))
            }
            FieldElem::Residue { value, modulus } => {
                tonelli_shanks(*value, *modulus).map(|r| FieldElem::Residue { value: r, modulus: *modulus })
            }
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$checked(rhs).expect("field operation")
            }
        }
    };
}
forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);
forward_op!(Div, div, try_div);

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(p as i128));
    (g.gcd == 1).then(|| g.x.rem_euclid(p as i128) as u64)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 || p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, q.div_ceil(2), p));
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_inverse() {
        let f7 = FieldCtx::prime(7).unwrap();
        let three = f7.from_i64(3);
        assert_eq!(three.inv().unwrap(), f7.from_i64(5));
    }

    #[test]
    fn rational_division() {
        let q = FieldCtx::Rationals;
        assert_eq!(&q.ratio(1, 2).unwrap() + &q.ratio(1, 3).unwrap(), q.ratio(5, 6).unwrap());
    }

    #[test]
    fn generators() {
        assert_eq!(
            FieldCtx::prime(5).unwrap().multiplicative_generator().unwrap(),
            FieldCtx::prime(5).unwrap().from_i64(2)
        );
        assert_eq!(
            FieldCtx::prime(7).unwrap().multiplicative_generator().unwrap(),
            FieldCtx::prime(7).unwrap().from_i64(3)
        );
        assert!(FieldCtx::prime(2).unwrap().multiplicative_generator().unwrap().is_one());
    }

    #[test]
    fn errors() {
        assert_eq!(FieldCtx::prime(4), Err(FieldError::NotPrime(4)));
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(f5.zero().inv(), Err(FieldError::DivisionByZero));
        let mixed = FieldCtx::Rationals.one().try_add(&f5.one());
        assert!(matches!(mixed, Err(FieldError::ContextMismatch(_, _))));
        assert_eq!(f5.parse_scalar("3/5"), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn squares() {
        let q = FieldCtx::Rationals;
        assert_eq!(q.ratio(9, 4).unwrap().sqrt(), Some(q.ratio(3, 2).unwrap()));
        assert!(!q.from_i64(2).is_square());
        assert!(!q.from_i64(-1).is_square());
        let f5 = FieldCtx::prime(5).unwrap();
        assert!(f5.from_i64(4).is_square());
        assert!(!f5.from_i64(2).is_square());
    }

    #[test]
    fn context_roundtrip() {
        for s in ["Q", "Fp=7", "Fp=101"] {
            assert_eq!(s.parse::<FieldCtx>().unwrap().to_string(), s);
        }
    }

    proptest! {
        #[test]
        fn field_axioms_mod_p(p in prop::sample::select(vec![2u64, 3, 5, 7, 101, 1_000_000_007]),
                              a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let k = FieldCtx::prime(p).unwrap();
            let (a, b, c) = (k.from_i64(a), k.from_i64(b), k.from_i64(c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn sqrt_is_a_root(p in prop::sample::select(vec![3u64, 5, 7, 13, 17, 101]), a in 0u64..1000) {
            let k = FieldCtx::prime(p).unwrap();
            let a = k.from_i64(a as i64);
            let sq = &a * &a;
            let r = sq.sqrt().unwrap();
            prop_assert_eq!(&r * &r, sq);
        }

        #[test]
        fn discrete_log_inverts_pow(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101, 65537]), e in 0u64..100_000) {
            let k = FieldCtx::prime(p).unwrap();
            let g = k.multiplicative_generator().unwrap();
            let u = g.pow(e as i64).unwrap();
            prop_assert_eq!(k.discrete_log(&g, &u), Some(e % (p - 1)));
        }
    }
}
