//! Text grammar for polynomials and the artifact formats built on it.
//!
//! ```text
//! poly   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' uint]
//! atom   := int ['/' int] | x | y | z | w | T | '(' poly ')'
//! ```
//!
//! The canonical printer emits a subset of this (no parentheses), and
//! printing then parsing is the identity on normal forms.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldError};
use crate::poly::{MPoly, T, W, X, Y, Z};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("at offset {pos}: expected {expected}, found {found}")]
    Unexpected { pos: usize, expected: String, found: String },
    #[error("bad scalar: {0}")]
    Scalar(#[from] FieldError),
    #[error("{0}")]
    Invalid(String),
}

pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub(crate) fn error(&mut self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        };
        ParseError::Unexpected { pos: self.pos, expected: expected.to_string(), found }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("{c:?}")))
        }
    }

    pub(crate) fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        let s = &self.rest()[..len];
        self.pos += len;
        Some(s)
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    /// Consumes text up to (not including) the first of `stops` at bracket depth zero.
    pub(crate) fn take_until(&mut self, stops: &[char]) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0i32;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ if depth == 0 && stops.contains(&c) => {
                    self.pos = start + i;
                    return &self.src[start..self.pos];
                }
                _ => {}
            }
        }
        self.pos = self.src.len();
        &self.src[start..]
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos
    }
}

struct PolyParser<'a> {
    lx: Lexer<'a>,
    ctx: FieldCtx,
}

impl PolyParser<'_> {
    fn poly(&mut self) -> Result<MPoly, ParseError> {
        let neg = self.lx.eat('-');
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.lx.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.lx.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.lx.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly, ParseError> {
        let base = self.atom()?;
        if self.lx.eat('^') {
            let e = self.lx.digits().ok_or_else(|| self.lx.error("exponent"))?;
            let e: u32 = e.parse().map_err(|_| ParseError::Invalid(format!("exponent {e} too large")))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly, ParseError> {
        let var = match self.lx.peek() {
            Some('x') => Some(X),
            Some('y') => Some(Y),
            Some('z') => Some(Z),
            Some('w') => Some(W),
            Some('T') => Some(T),
            _ => None,
        };
        if let Some(v) = var {
            self.lx.pos += 1;
            return Ok(MPoly::var(self.ctx, v));
        }
        if self.lx.eat('(') {
            let p = self.poly()?;
            self.lx.expect(')')?;
            return Ok(p);
        }
        let num = self.lx.digits().ok_or_else(|| self.lx.error("number, variable or '('"))?;
        let text = if self.lx.eat('/') {
            let den = self.lx.digits().ok_or_else(|| self.lx.error("denominator"))?;
            format!("{num}/{den}")
        } else {
            num.to_string()
        };
        Ok(MPoly::constant(self.ctx.parse_scalar(&text)?))
    }
}

/// Parses a polynomial expression in `x, y, z, w, T`.
pub fn parse_poly(ctx: FieldCtx, s: &str) -> Result<MPoly, ParseError> {
    let mut p = PolyParser { lx: Lexer::new(s), ctx };
    let out = p.poly()?;
    p.lx.finish()?;
    Ok(out)
}

/// The one-line header that opens every serialized artifact.
pub struct Header(pub FieldCtx);

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "jouanolou/v1 field={}", self.0)
    }
}

/// Reads a header line, returning the field it declares.
pub fn parse_header(line: &str) -> Result<FieldCtx, ParseError> {
    let field = line
        .trim()
        .strip_prefix("jouanolou/v1 field=")
        .ok_or_else(|| ParseError::Invalid(format!("bad header {line:?}")))?;
    Ok(field.parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use proptest::prelude::*;

    #[test]
    fn parses_grammar() {
        let q = FieldCtx::Rationals;
        let p = parse_poly(q, "-1 + 3*y*z").unwrap();
        assert_eq!(p.to_string(), "3*y*z - 1");
        let p = parse_poly(q, "x^2 - 1/2*x*T + 5").unwrap();
        assert_eq!(p.to_string(), "x^2 - 1/2*x*T + 5");
        assert_eq!(parse_poly(q, "(x + 1)^2").unwrap(), parse_poly(q, "x^2 + 2*x + 1").unwrap());
    }

    #[test]
    fn reports_errors() {
        let q = FieldCtx::Rationals;
        assert!(matches!(parse_poly(q, "x +"), Err(ParseError::Unexpected { .. })));
        assert!(matches!(parse_poly(q, "(x"), Err(ParseError::Unexpected { .. })));
        assert!(matches!(parse_poly(q, "x y"), Err(ParseError::Unexpected { .. })));
        assert!(matches!(parse_poly(q, "1/0"), Err(ParseError::Scalar(_))));
    }

    #[test]
    fn prime_field_coefficients() {
        let f7 = FieldCtx::prime(7).unwrap();
        assert_eq!(parse_poly(f7, "1/2*x").unwrap().to_string(), "4*x");
        assert_eq!(parse_poly(f7, "-x").unwrap().to_string(), "6*x");
    }

    fn arb_poly(ctx: FieldCtx) -> impl Strategy<Value = MPoly> {
        prop::collection::vec((0u16..3, 0u16..3, 0u16..3, 0u16..2, 0u16..2, -9i64..10, 1i64..4), 0..6).prop_map(
            move |ts| {
                let mut p = MPoly::zero(ctx);
                for (a, b, c, d, e, n, m) in ts {
                    let coeff = ctx.ratio(n, m).unwrap_or_else(|_| ctx.from_i64(n));
                    p.add_term(Monomial([a, b, c, d, e]), &coeff);
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip_q(p in arb_poly(FieldCtx::Rationals)) {
            let s = p.to_string();
            let back = parse_poly(FieldCtx::Rationals, &s).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), s);
        }

        #[test]
        fn print_parse_roundtrip_fp(p in arb_poly(FieldCtx::PrimeField(101))) {
            let k = FieldCtx::PrimeField(101);
            prop_assert_eq!(parse_poly(k, &p.to_string()).unwrap(), p);
        }
    }
}
