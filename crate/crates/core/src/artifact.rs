//! Literals and headered text artifacts for maps, matrices and witnesses.
//!
//! ```text
//! jouanolou/v1 field=Q
//! witness 2
//! segment 1 [1; 0 | 0; 1 + T*x]
//! cert [...; ...; ...; ...]
//! segment 1 [...]
//! ```
//!
//! `cert` lines are optional; a segment or map without one is certified
//! on load (maps) or during verification (segments).

use std::fmt::Write as _;

use thiserror::Error;

use crate::bundle::BundleKind;
use crate::field::FieldCtx;
use crate::homotopy::{HomotopyError, HomotopyWitness, Path, Segment};
use crate::jring::{RingElement, RingError, RingPolyT};
use crate::morphism::{make_map, make_row, GenCert, JMap, MorphismError, UnimodularRow};
use crate::poly::MPoly;
use crate::sl2::{Mat2, PointedSL2, Sl2Error};
use crate::text::{parse_header, parse_poly, Header, Lexer, ParseError};

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error("line {line}: {msg}")]
    Layout { line: usize, msg: String },
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::Unexpected { pos, expected, found } => ParseError::Unexpected { pos: pos + by, expected, found },
        e => e,
    }
}

/// `[p sep p sep ... p]` with exactly the given separators.
fn bracket_list(lx: &mut Lexer<'_>, ctx: FieldCtx, seps: &[char]) -> Result<Vec<MPoly>, ParseError> {
    lx.expect('[')?;
    let mut out = Vec::with_capacity(seps.len() + 1);
    for i in 0..=seps.len() {
        let text = lx.take_until(&[';', '|', ']']);
        let start = lx.offset() - text.len();
        out.push(parse_poly(ctx, text).map_err(|e| shift(e, start))?);
        match seps.get(i) {
            Some(&c) => lx.expect(c)?,
            None => lx.expect(']')?,
        }
    }
    Ok(out)
}

fn ring(p: &MPoly) -> Result<RingElement, RingError> {
    RingElement::normal_form(p)
}

fn int(lx: &mut Lexer<'_>) -> Result<i64, ParseError> {
    let neg = lx.eat('-');
    let d = lx.digits().ok_or_else(|| lx.error("integer"))?;
    let v: i64 = d.parse().map_err(|_| ParseError::Invalid(format!("integer {d} out of range")))?;
    Ok(if neg { -v } else { v })
}

pub fn parse_ring(ctx: FieldCtx, s: &str) -> Result<RingElement, ArtifactError> {
    Ok(ring(&parse_poly(ctx, s)?)?)
}

enum MapData {
    Row([RingElement; 2]),
    Sections(i32, [RingElement; 4]),
}

fn map_data(lx: &mut Lexer<'_>, ctx: FieldCtx) -> Result<MapData, ArtifactError> {
    if lx.eat_word("row") {
        let v = bracket_list(lx, ctx, &[';'])?;
        Ok(MapData::Row([ring(&v[0])?, ring(&v[1])?]))
    } else if lx.eat_word("map") {
        let n = int(lx)?;
        let n = i32::try_from(n).map_err(|_| ParseError::Invalid(format!("degree {n} out of range")))?;
        let v = bracket_list(lx, ctx, &[';', '|', ';'])?;
        Ok(MapData::Sections(n, [ring(&v[0])?, ring(&v[1])?, ring(&v[2])?, ring(&v[3])?]))
    } else {
        Err(lx.error("'row' or 'map'").into())
    }
}

/// Parses a map literal `row [A; B]` or `map n [a0; a1 | b0; b1]`, certifying
/// it with a Groebner computation.
pub fn parse_map(ctx: FieldCtx, s: &str) -> Result<JMap, ArtifactError> {
    let mut lx = Lexer::new(s);
    let data = map_data(&mut lx, ctx)?;
    lx.finish()?;
    Ok(match data {
        MapData::Row([a, b]) => make_row(a, b)?,
        MapData::Sections(n, [a0, a1, b0, b1]) => make_map(n, a0, a1, b0, b1)?,
    })
}

/// Parses `sl2 [A; -V | B; U]`.
pub fn parse_sl2(ctx: FieldCtx, s: &str) -> Result<PointedSL2, ArtifactError> {
    let mut lx = Lexer::new(s);
    if !lx.eat_word("sl2") {
        return Err(lx.error("'sl2'").into());
    }
    let v = bracket_list(&mut lx, ctx, &[';', '|', ';'])?;
    lx.finish()?;
    let m = Mat2::new(ring(&v[0])?, ring(&v[1])?, ring(&v[2])?, ring(&v[3])?);
    Ok(PointedSL2::new(m)?)
}

fn join<E: std::fmt::Display>(items: &[E]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn cert_of(f: &JMap) -> Vec<RingElement> {
    match f {
        JMap::Row(r) => vec![r.u.clone(), r.v.clone()],
        JMap::Sections(s) => s.cert.0.to_vec(),
    }
}

pub fn write_map(f: &JMap) -> String {
    format!("{}\n{f}\ncert [{}]\n", Header(f.ctx()), join(&cert_of(f)))
}

pub fn write_sl2(m: &PointedSL2) -> String {
    format!("{}\n{m}\n", Header(m.matrix().ctx()))
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn layout(line: usize, msg: impl Into<String>) -> ArtifactError {
    ArtifactError::Layout { line, msg: msg.into() }
}

fn at_line<T>(line: usize, r: Result<T, ParseError>) -> Result<T, ArtifactError> {
    r.map_err(|e| layout(line, e.to_string()))
}

fn cert_line(ctx: FieldCtx, line: usize, text: &str, len: usize) -> Result<Vec<MPoly>, ArtifactError> {
    let mut lx = Lexer::new(text);
    if !lx.eat_word("cert") {
        return Err(layout(line, "expected 'cert'"));
    }
    let v = at_line(line, bracket_list(&mut lx, ctx, &vec![';'; len - 1]))?;
    at_line(line, lx.finish())?;
    Ok(v)
}

/// Reads a map artifact. With a `cert` line the certificate is checked
/// instead of recomputed.
pub fn read_map(text: &str) -> Result<JMap, ArtifactError> {
    let mut it = lines(text);
    let (l0, h) = it.next().ok_or_else(|| layout(1, "empty artifact"))?;
    let ctx = at_line(l0, parse_header(h))?;
    let (l1, body) = it.next().ok_or_else(|| layout(l0 + 1, "missing map line"))?;
    let mut lx = Lexer::new(body);
    let data = map_data(&mut lx, ctx).map_err(|e| layout(l1, e.to_string()))?;
    at_line(l1, lx.finish())?;
    let cert = match it.next() {
        Some((l2, c)) => {
            let len = if matches!(data, MapData::Row(_)) { 2 } else { 4 };
            let v = cert_line(ctx, l2, c, len)?;
            Some(v.iter().map(ring).collect::<Result<Vec<_>, _>>()?)
        }
        None => None,
    };
    if let Some((l, _)) = it.next() {
        return Err(layout(l, "trailing content"));
    }
    Ok(match (data, cert) {
        (MapData::Row([a, b]), Some(c)) => {
            JMap::row_from_certified(UnimodularRow { a, b, u: c[0].clone(), v: c[1].clone() })?
        }
        (MapData::Row([a, b]), None) => make_row(a, b)?,
        (MapData::Sections(n, c), Some(k)) => {
            JMap::from_certified(n, c, GenCert([k[0].clone(), k[1].clone(), k[2].clone(), k[3].clone()]))?
        }
        (MapData::Sections(n, [a0, a1, b0, b1]), None) => make_map(n, a0, a1, b0, b1)?,
    })
}

pub fn read_sl2(text: &str) -> Result<PointedSL2, ArtifactError> {
    let mut it = lines(text);
    let (l0, h) = it.next().ok_or_else(|| layout(1, "empty artifact"))?;
    let ctx = at_line(l0, parse_header(h))?;
    let (l1, body) = it.next().ok_or_else(|| layout(l0 + 1, "missing matrix line"))?;
    if let Some((l, _)) = it.next() {
        return Err(layout(l, "trailing content"));
    }
    parse_sl2(ctx, body).map_err(|e| layout(l1, e.to_string()))
}

pub fn write_witness(w: &HomotopyWitness) -> String {
    let mut out = format!("{}\nwitness {}\n", Header(w.ctx()), w.segments.len());
    for s in &w.segments {
        match &s.path {
            Path::Row { a, b } => writeln!(out, "segment 0 [{a}; {b}]"),
            Path::Sections { kind, c } => {
                writeln!(out, "segment {} [{}; {} | {}; {}]", kind.degree(), c[0], c[1], c[2], c[3])
            }
        }
        .expect("string write");
        if let Some(c) = &s.cert {
            writeln!(out, "cert [{}]", join(c)).expect("string write");
        }
    }
    out
}

fn ring_t(p: &MPoly) -> RingPolyT {
    crate::jring::normal_form(p)
}

pub fn read_witness(text: &str) -> Result<HomotopyWitness, ArtifactError> {
    let all: Vec<(usize, &str)> = lines(text).collect();
    let (l0, h) = *all.first().ok_or_else(|| layout(1, "empty artifact"))?;
    let ctx = at_line(l0, parse_header(h))?;
    let (l1, count) = *all.get(1).ok_or_else(|| layout(l0 + 1, "missing segment count"))?;
    let count: usize = count
        .strip_prefix("witness")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| layout(l1, "expected 'witness <count>'"))?;
    let mut segments: Vec<Segment> = Vec::with_capacity(count);
    for &(ln, line) in &all[2..] {
        if line.starts_with("cert") {
            let seg = segments.last_mut().ok_or_else(|| layout(ln, "cert before any segment"))?;
            if seg.cert.is_some() {
                return Err(layout(ln, "segment already has a certificate"));
            }
            let len = match seg.path {
                Path::Row { .. } => 2,
                Path::Sections { .. } => 4,
            };
            seg.cert = Some(cert_line(ctx, ln, line, len)?.iter().map(ring_t).collect());
            continue;
        }
        let mut lx = Lexer::new(line);
        if !lx.eat_word("segment") {
            return Err(layout(ln, "expected 'segment' or 'cert'"));
        }
        let n = at_line(ln, int(&mut lx))?;
        let path = if n == 0 {
            let v = at_line(ln, bracket_list(&mut lx, ctx, &[';']))?;
            Path::Row { a: ring_t(&v[0]), b: ring_t(&v[1]) }
        } else {
            let n = i32::try_from(n).map_err(|_| layout(ln, "degree out of range"))?;
            let v = at_line(ln, bracket_list(&mut lx, ctx, &[';', '|', ';']))?;
            Path::Sections { kind: BundleKind::for_degree(n), c: [0, 1, 2, 3].map(|i| ring_t(&v[i])) }
        };
        at_line(ln, lx.finish())?;
        segments.push(Segment::new(path));
    }
    if segments.len() != count {
        return Err(layout(l1, format!("header announces {count} segments, found {}", segments.len())));
    }
    Ok(HomotopyWitness::new(segments)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::homgrp::{decompose, naive_sum_deg1, NegativeRefs, ReferenceFamily};
    use crate::homotopy::{example_homotopy, verify};
    use crate::morphism::{g_uv, m_uv, n_pi, pi, pi_tilde};

    const Q: FieldCtx = FieldCtx::Rationals;

    #[test]
    fn literal_examples() {
        let r = parse_ring(Q, "2*x - 1 + 3*y*z").unwrap();
        let (a, b) = r.parts();
        assert_eq!(a, parse_poly(Q, "-1 + 3*y*z").unwrap());
        assert_eq!(b, parse_poly(Q, "2").unwrap());
        assert_eq!(parse_map(Q, "map 1 [1; 0 | 0; 1]").unwrap(), pi(Q));
        assert_eq!(parse_map(Q, "map -1 [1; 0 | 0; -1]").unwrap(), pi_tilde(Q));
        let err = parse_map(Q, "row [2*x-1; 2*y").unwrap_err();
        assert!(matches!(err, ArtifactError::Parse(ParseError::Unexpected { pos: 15, .. })), "{err}");
        let err = parse_map(Q, "row [2*x-1; 2*y +]").unwrap_err();
        assert!(matches!(err, ArtifactError::Parse(ParseError::Unexpected { pos: 17, .. })), "{err}");
        assert!(matches!(parse_map(Q, "row [x; y]"), Err(ArtifactError::Morphism(_))));
    }

    #[test]
    fn map_artifacts_roundtrip() {
        let f7 = FieldCtx::prime(7).unwrap();
        let two = Q.from_i64(2);
        let maps = [
            pi(Q),
            pi_tilde(Q),
            n_pi(Q, 3).unwrap(),
            g_uv(&two, &Q.one()).unwrap(),
            n_pi(f7, 2).unwrap(),
            g_uv(&f7.from_i64(3), &f7.from_i64(5)).unwrap(),
        ];
        for f in maps {
            let text = write_map(&f);
            let g = read_map(&text).unwrap();
            assert_eq!(g, f);
            assert_eq!(write_map(&g), text);
            // Without the cert line the map is recertified and still equal.
            let bare: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
            assert_eq!(read_map(&bare).unwrap(), f);
        }
    }

    #[test]
    fn sl2_roundtrip() {
        let m = m_uv(&Q.from_i64(3), &Q.from_i64(-2)).unwrap();
        let text = write_sl2(&m);
        assert!(text.starts_with("jouanolou/v1 field=Q\nsl2 ["));
        assert_eq!(read_sl2(&text).unwrap(), m);
        assert!(parse_sl2(Q, "sl2 [2; 0 | 0; 1]").is_err());
    }

    #[test]
    fn witness_roundtrip() {
        let refs = ReferenceFamily::new(Q, NegativeRefs::QBasis);
        let f = n_pi(Q, 2).unwrap();
        let d = decompose(&f, &refs).unwrap();
        let u = Q.from_i64(3);
        let ws = [d.witness.clone(), example_homotopy(&u).unwrap(), naive_sum_deg1(&u, &pi(Q)).unwrap().1];
        let stripped = ws.iter().map(|w| (w.clone().strip_certs(), w.clone()));
        for (w, certified) in ws.iter().map(|w| (w.clone(), w.clone())).chain(stripped) {
            let text = write_witness(&w);
            let back = read_witness(&text).unwrap();
            assert_eq!(back.segments, w.segments);
            assert_eq!(write_witness(&back), text);
            let (s, e) = (certified.start_map().unwrap(), certified.end_map().unwrap());
            assert!(verify(&back, &s, &e).is_valid());
        }
    }

    #[test]
    fn witness_layout_errors() {
        let w = HomotopyWitness::constant(&pi(Q));
        let text = write_witness(&w);
        let bad_count = text.replace("witness 1", "witness 2");
        assert!(matches!(read_witness(&bad_count), Err(ArtifactError::Layout { line: 2, .. })));
        let bad_line = format!("{text}segment 1 [1; 0 | 0;\n");
        assert!(matches!(read_witness(&bad_line), Err(ArtifactError::Layout { line: 5, .. })));
        assert!(read_witness("jouanolou/v2 field=Q\nwitness 0\n").is_err());
    }
}
