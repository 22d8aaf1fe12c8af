//! The acceptance battery: eleven named criteria, each an exact or witnessed
//! check with an optional time limit. Shared by the `acceptance` test target
//! and `jou selftest`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifact::{read_witness, write_witness};
use crate::bundle::{
    bezout_from_unit_resultant, conservation_identity, generator, mn_matrices, normalize_section, reversal_identity,
    shift_identity, BundleKind,
};
use crate::corpus::{self, nonzero_scalar, small_scalar};
use crate::exec::Exec;
use crate::field::{FieldCtx, FieldElem};
use crate::homgrp::{decompose, naive_sum_deg1, oplus, NegativeRefs, ReferenceFamily};
use crate::homotopy::{
    example_homotopy, gu1_action_witness, interp_lift, lift_row_homotopy, scaling_witness, transpose_inverse_witness,
    verify_with, HomotopyWitness, Path, Segment,
};
use crate::jring::{RingElement, RingPolyT};
use crate::morphism::{g_uv, m_uv, make_map, make_row, map_equal, n_pi, pi, pi_tilde, pullback_rational, JMap};
use crate::mwk::{k1_canonical, k1_order, MWSymbolWord};
use crate::realize::winding_degree;
use crate::sl2::{act, boxplus_act, complete_pointed, PointedSL2};

/// The golden witness for the degree-two example homotopy at `u = 2` over `Q`.
pub const EXAMPLE_FIXTURE: &str = include_str!("../fixtures/example_u2.witness");

#[derive(Debug, Clone)]
pub struct Config {
    pub exec: Exec,
    pub seed: u64,
    /// Runs only criteria whose name or tag contains this string.
    pub filter: Option<String>,
    /// Text of the example-homotopy fixture.
    pub example_fixture: String,
}

impl Default for Config {
    fn default() -> Self {
        Config { exec: Exec::Parallel, seed: 0x6a6f75, filter: None, example_fixture: EXAMPLE_FIXTURE.to_string() }
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub tag: &'static str,
    pub limit: Option<Duration>,
    check: fn(&Config) -> Outcome,
}

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "m-products", tag: "sl2", limit: secs(2), check: c1_products },
        Criterion { id: 2, name: "g-acts-on-pi", tag: "morphism", limit: None, check: c2_gu1_pi },
        Criterion { id: 3, name: "example-homotopy", tag: "homotopy", limit: secs(10), check: c3_example },
        Criterion { id: 4, name: "idempotents", tag: "bundle", limit: None, check: c4_idempotents },
        Criterion { id: 5, name: "resultant-lemmas", tag: "bundle", limit: secs(30), check: c5_resultants },
        Criterion { id: 6, name: "decompose-roundtrip", tag: "homgrp", limit: None, check: c6_decompose },
        Criterion { id: 7, name: "real-degrees", tag: "realize", limit: secs(5), check: c7_degrees },
        Criterion { id: 8, name: "real-additivity", tag: "realize", limit: None, check: c8_additivity },
        Criterion { id: 9, name: "k1mw-cyclic", tag: "mwk", limit: None, check: c9_k1 },
        Criterion { id: 10, name: "witness-constructors", tag: "homotopy", limit: None, check: c10_witnesses },
        Criterion { id: 11, name: "normalize-section", tag: "bundle", limit: None, check: c11_normalize },
    ]
}

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{:>2}] {:<22} {:>8.3}s  {}", self.id, self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

impl Criterion {
    pub fn matches(&self, filter: &str) -> bool {
        match filter.parse::<u8>() {
            Ok(id) => self.id == id,
            Err(_) => self.name.contains(filter) || self.tag.contains(filter),
        }
    }

    pub fn run(&self, cfg: &Config) -> Report {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(|| (self.check)(cfg)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if let Some(limit) = self.limit {
            if passed && elapsed > limit {
                passed = false;
                detail = format!("over time limit {limit:?}: {detail}");
            }
        }
        Report { id: self.id, name: self.name, passed, detail, elapsed }
    }
}

/// Runs the selected criteria one after another, in order. Each criterion
/// parallelizes internally according to `cfg.exec`, so timings stay
/// meaningful.
pub fn run(cfg: &Config) -> Vec<Report> {
    criteria().iter().filter(|c| cfg.filter.as_deref().is_none_or(|f| c.matches(f))).map(|c| c.run(cfg)).collect()
}

fn rng(cfg: &Config, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn f(p: u64) -> FieldCtx {
    FieldCtx::prime(p).expect("prime")
}

fn units(ctx: FieldCtx) -> Vec<FieldElem> {
    ctx.elements().expect("finite").into_iter().filter(|e| !e.is_zero()).collect()
}

fn c1_products(_: &Config) -> Outcome {
    let q = FieldCtx::Rationals;
    let qs: Vec<FieldElem> = [1, -1, 2, -2, 3, 5].iter().map(|&v| q.from_i64(v)).collect();
    let f7 = units(f(7));
    let mut n = 0;
    for set in [&qs, &f7] {
        for u in set {
            for v in set {
                let muv = m_uv(u, v).map_err(|e| e.to_string())?;
                let mvu = m_uv(v, u).map_err(|e| e.to_string())?;
                ensure!(muv.mul(&mvu) == PointedSL2::identity(u.ctx()), "m_{{{u},{v}}} m_{{{v},{u}}} != 1");
                for s in set {
                    let lhs = muv.mul(&m_uv(v, s).map_err(|e| e.to_string())?);
                    ensure!(
                        lhs == m_uv(u, s).map_err(|e| e.to_string())?,
                        "m_{{{u},{v}}} m_{{{v},{s}}} != m_{{{u},{s}}}"
                    );
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} triples exact"))
}

fn c2_gu1_pi(_: &Config) -> Outcome {
    let q = FieldCtx::Rationals;
    let mut us: Vec<FieldElem> = vec![q.from_i64(2), q.from_i64(3), q.from_i64(-1), q.ratio(1, 2).expect("ratio")];
    us.extend(units(f(5)));
    for u in &us {
        let ctx = u.ctx();
        let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
        let lhs = act(&m_uv(u, &ctx.one()).map_err(|e| e.to_string())?, &pi(ctx)).map_err(|e| e.to_string())?;
        let mid = pullback_rational(&crate::morphism::RationalMapP1::x_over(u).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let rhs = make_map(1, one, zero.clone(), zero, RingElement::constant(u.clone())).map_err(|e| e.to_string())?;
        ensure!(map_equal(&lhs, &mid) && map_equal(&mid, &rhs), "u = {u} over {ctx}: {lhs} / {mid} / {rhs}");
    }
    Ok(format!("{} parameters", us.len()))
}

fn c3_example(cfg: &Config) -> Outcome {
    let q = FieldCtx::Rationals;
    let mut us: Vec<FieldElem> = vec![q.from_i64(2), q.from_i64(3), q.from_i64(-1), q.ratio(1, 2).expect("ratio")];
    us.extend([2, 3, 4].iter().map(|&v| f(5).from_i64(v)));
    let checks = cfg.exec.map(&us, |u| -> Outcome {
        let ctx = u.ctx();
        let refs = ReferenceFamily::new(ctx, NegativeRefs::QBasis);
        let w = example_homotopy(u).map_err(|e| e.to_string())?;
        let g = g_uv(u, &ctx.one()).map_err(|e| e.to_string())?;
        let start = oplus(&g, &n_pi(ctx, 2).map_err(|e| e.to_string())?, &refs).map_err(|e| e.to_string())?;
        let end = naive_sum_deg1(u, &pi(ctx)).map_err(|e| e.to_string())?.0;
        let verdict = verify_with(&w, &start, &end, Exec::Sequential);
        ensure!(verdict.is_valid(), "u = {u} over {ctx}: {verdict}");
        Ok(String::new())
    });
    for c in checks {
        c?;
    }
    // Golden fixture: bit-stable serialization, and it must verify on its own.
    let two = q.from_i64(2);
    let fresh = write_witness(&example_homotopy(&two).map_err(|e| e.to_string())?);
    ensure!(cfg.example_fixture == fresh, "example fixture differs from the serialized witness");
    let w = read_witness(&cfg.example_fixture).map_err(|e| format!("example fixture: {e}"))?;
    let refs = ReferenceFamily::new(q, NegativeRefs::QBasis);
    let g = g_uv(&two, &q.one()).map_err(|e| e.to_string())?;
    let start = oplus(&g, &n_pi(q, 2).map_err(|e| e.to_string())?, &refs).map_err(|e| e.to_string())?;
    let end = naive_sum_deg1(&two, &pi(q)).map_err(|e| e.to_string())?.0;
    let verdict = verify_with(&w, &start, &end, cfg.exec);
    ensure!(verdict.is_valid(), "example fixture: {verdict}");
    Ok(format!("{} parameters and the golden fixture verify", us.len()))
}

fn c4_idempotents(_: &Config) -> Outcome {
    for ctx in [FieldCtx::Rationals, f(7)] {
        for n in 1..=6u32 {
            let p = mn_matrices(ctx, n).map_err(|e| e.to_string())?;
            ensure!(p.m.mul(&p.m) == p.m, "M_{n}^2 != M_{n} over {ctx}");
            ensure!(p.m_prime.mul(&p.m_prime) == p.m_prime, "M'_{n}^2 != M'_{n} over {ctx}");
            let s = RingElement::x(ctx).pow(n).mul(&p.a).add(&RingElement::w(ctx).pow(n).mul(&p.b));
            ensure!(s == RingElement::one(ctx), "x^n A + w^n B != 1 for n = {n} over {ctx}");
        }
    }
    Ok("n = 1..6 over Q and F7".into())
}

fn scalars(rng: &mut ChaCha8Rng, ctx: FieldCtx, len: usize) -> Vec<RingElement> {
    (0..len).map(|_| RingElement::constant(small_scalar(rng, ctx))).collect()
}

fn ring_coeffs(rng: &mut ChaCha8Rng, ctx: FieldCtx, len: usize) -> Vec<RingElement> {
    (0..len).map(|_| corpus::ring_element(rng, ctx, 1)).collect()
}

fn poly_eval_identity(a: &[RingElement], u: &[RingElement], b: &[RingElement], v: &[RingElement]) -> bool {
    let ctx = a[0].ctx();
    let len = (a.len() + u.len()).max(b.len() + v.len());
    let mut acc = vec![RingElement::zero(ctx); len];
    for (p, q) in [(a, u), (b, v)] {
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                acc[i + j] = acc[i + j].add(&x.mul(y));
            }
        }
    }
    acc[0] == RingElement::one(ctx) && acc[1..].iter().all(RingElement::is_zero)
}

fn c5_resultants(cfg: &Config) -> Outcome {
    const DRAWS: usize = 100;
    let fields = [FieldCtx::Rationals, f(101)];
    let results = cfg.exec.map(&fields, |&ctx| -> Outcome {
        let mut rng = rng(cfg, 5 + ctx.characteristic());
        let (mut bez, mut rev, mut shift, mut cons, mut skipped) = (0, 0, 0, 0, 0);
        while bez < DRAWS {
            let (m, n) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
            if m + n == 0 {
                continue;
            }
            let (a, b) = (scalars(&mut rng, ctx, m + 1), scalars(&mut rng, ctx, n + 1));
            match bezout_from_unit_resultant(&a, &b) {
                Ok((u, v)) => {
                    ensure!(poly_eval_identity(&a, &u, &b, &v), "Bezout identity fails over {ctx}");
                    bez += 1;
                }
                Err(_) => skipped += 1,
            }
        }
        while rev < DRAWS {
            let n = rng.gen_range(1..=4);
            let (a, b) = (ring_coeffs(&mut rng, ctx, n + 1), ring_coeffs(&mut rng, ctx, n + 1));
            let c = reversal_identity(&a, &b).map_err(|e| e.to_string())?;
            ensure!(c.holds(), "reversal sign fails over {ctx} at n = {n}");
            rev += 1;
        }
        while shift < DRAWS {
            let (n, m) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            if m > n {
                skipped += 1;
                continue;
            }
            let k = rng.gen_range(0..=n - m);
            let a = ring_coeffs(&mut rng, ctx, n + 1);
            let b = ring_coeffs(&mut rng, ctx, m + 1);
            let c = ring_coeffs(&mut rng, ctx, k + 1);
            let chk = shift_identity(&a, &b, &c).map_err(|e| e.to_string())?;
            ensure!(chk.holds(), "shift invariance fails over {ctx}");
            shift += 1;
        }
        while cons < DRAWS {
            let n = rng.gen_range(1..=4);
            let mut a = scalars(&mut rng, ctx, n);
            a.push(RingElement::one(ctx));
            let b = scalars(&mut rng, ctx, n + 1);
            let u = nonzero_scalar(&mut rng, ctx);
            match conservation_identity(&a, &b, &u) {
                Ok(chk) => {
                    ensure!(chk.holds(), "conservation fails over {ctx} at n = {n}");
                    ensure!(chk.lhs.as_unit().is_some(), "conserved resultant not a unit");
                    cons += 1;
                }
                Err(_) => skipped += 1,
            }
        }
        Ok(format!("{ctx}: {skipped} skipped"))
    });
    let details: Vec<String> = results.into_iter().collect::<Result<_, _>>()?;
    Ok(format!("4 x {DRAWS} draws per field ({})", details.join(", ")))
}

fn c6_decompose(cfg: &Config) -> Outcome {
    let mut maps = Vec::new();
    for ctx in [FieldCtx::Rationals, f(7)] {
        let mut rng = rng(cfg, 6 + ctx.characteristic());
        maps.extend(corpus::map_corpus(&mut rng, ctx, 16));
    }
    let q = FieldCtx::Rationals;
    let (qrefs, frefs) =
        (ReferenceFamily::new(q, NegativeRefs::QBasis), ReferenceFamily::new(f(7), NegativeRefs::QBasis));
    let results = cfg.exec.map(&maps, |g| -> Outcome {
        let refs = if g.ctx() == q { &qrefs } else { &frefs };
        let d = decompose(g, refs).map_err(|e| format!("{g}: {e}"))?;
        ensure!(d.n == g.degree(), "{g}: degree {} != {}", d.n, g.degree());
        ensure!(
            d.m.matrix().is_pointed() && d.m.matrix().det() == RingElement::one(g.ctx()),
            "{g}: M_f not pointed SL2"
        );
        let start = act(&d.m, &refs.get(d.n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(
            d.witness.start_map().is_some_and(|s| map_equal(&s, &start)),
            "{g}: witness start is not act(M_f, ref(n))"
        );
        let verdict = verify_with(&d.witness, &start, g, Exec::Sequential);
        ensure!(verdict.is_valid(), "{g}: {verdict}");
        Ok(String::new())
    });
    for r in results {
        r?;
    }
    Ok(format!("{} maps (half twisted) over Q and F7", maps.len()))
}

fn f_row() -> JMap {
    let q = FieldCtx::Rationals;
    let two = q.from_i64(2);
    make_row(RingElement::x(q).scale(&two).sub(&RingElement::one(q)), RingElement::z(q).scale(&two))
        .expect("(2x - 1, 2z) is unimodular")
}

fn c7_degrees(_: &Config) -> Outcome {
    let q = FieldCtx::Rationals;
    let refs = ReferenceFamily::new(q, NegativeRefs::QBasis);
    let e = |e: &dyn fmt::Display| e.to_string();
    let (one, m1) = (q.one(), q.from_i64(-1));
    let g = g_uv(&one, &m1).map_err(|x| e(&x))?;
    let fm = complete_pointed(f_row().as_row().expect("row")).map_err(|x| e(&x))?;
    let cases: Vec<(&str, JMap, i64)> = vec![
        ("g_{1,-1}", g.clone(), 2),
        ("pi", pi(q), 1),
        ("g_{1,-1} + pi", oplus(&g, &pi(q), &refs).map_err(|x| e(&x))?, 3),
        ("pi~", pi_tilde(q), -1),
        ("F + pi~", oplus(&f_row(), &pi_tilde(q), &refs).map_err(|x| e(&x))?, 1),
        ("F boxplus pi", boxplus_act(&fm, &pi(q)).map_err(|x| e(&x))?, -1),
    ];
    let mut seen = Vec::new();
    for (name, map, want) in cases {
        let got = winding_degree(&map).map_err(|x| format!("{name}: {x}"))?;
        ensure!(got == want, "{name}: degree {got}, expected {want}");
        seen.push(format!("{name}={got}"));
    }
    Ok(seen.join(" "))
}

fn c8_additivity(cfg: &Config) -> Outcome {
    let q = FieldCtx::Rationals;
    let mut rng = rng(cfg, 8);
    let mut pool = corpus::map_corpus(&mut rng, q, 8);
    pool.extend(corpus::row_corpus(&mut rng, q, 4));
    pool.extend([pi(q), f_row()]);
    // The default negative references (1, 0; 0, 1)_n realize to n mod 2, so
    // mixed-sign pairs are only additive against the naive family, whose
    // members realize to n.
    let default = ReferenceFamily::new(q, NegativeRefs::QBasis);
    let naive = ReferenceFamily::new(q, NegativeRefs::Naive);
    let mut signed = pool.clone();
    signed.push(pi_tilde(q));
    for _ in 0..3 {
        signed.push(act(&corpus::twist(&mut rng, q), &pi_tilde(q)).map_err(|e| e.to_string())?);
    }
    signed.push(naive.get(-2).map_err(|e| e.to_string())?);
    let mut jobs = Vec::new();
    for (refs, maps) in [(&default, &pool), (&naive, &signed)] {
        for _ in 0..24 {
            jobs.push((refs, maps, rng.gen_range(0..maps.len()), rng.gen_range(0..maps.len())));
        }
    }
    let results = cfg.exec.map(&jobs, |&(refs, maps, i, j)| -> Result<(), String> {
        let (a, b) = (&maps[i], &maps[j]);
        let s = oplus(a, b, refs).map_err(|e| format!("{a} + {b}: {e}"))?;
        let deg = |f: &JMap| winding_degree(f).map_err(|e| format!("{f}: {e}"));
        let (da, db, ds) = (deg(a)?, deg(b)?, deg(&s)?);
        ensure!(ds == da + db, "deg({a} + {b}) = {ds} != {da} + {db}");
        Ok(())
    });
    for r in results {
        r?;
    }
    let fm = complete_pointed(f_row().as_row().expect("row")).map_err(|e| e.to_string())?;
    let boxed = winding_degree(&boxplus_act(&fm, &pi(q)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let sum = winding_degree(&f_row()).map_err(|e| e.to_string())? + 1;
    ensure!(boxed == -1 && sum == 3, "boxplus counterexample: {boxed} vs {sum}");
    Ok(format!("{} pairs additive (24 non-negative, 24 signed); boxplus gives {boxed} != {sum}", jobs.len()))
}

fn c9_k1(_: &Config) -> Outcome {
    let e = |x: crate::mwk::MwkError| x.to_string();
    for p in [2u64, 3, 5, 7, 11, 13] {
        let ctx = f(p);
        let order = k1_order(ctx).map_err(e)?;
        ensure!(order == p - 1, "order {order} for F{p}");
        let g = k1_canonical(&MWSymbolWord::unit(ctx.multiplicative_generator().expect("prime"))).map_err(e)?;
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..order {
            seen.insert(g.scale(k as i64).to_string());
        }
        ensure!(seen.len() as u64 == order, "[g] does not generate a group of order {order} over F{p}");
        ensure!(g.scale(order as i64).is_zero(), "(q - 1)[g] != 0 over F{p}");
        let all: Vec<FieldElem> = units(ctx);
        let nonsq: Vec<&FieldElem> = all.iter().filter(|u| !u.is_square()).collect();
        for a in &nonsq {
            for b in &nonsq {
                let lhs = k1_canonical(&MWSymbolWord::unit(*a * *b)).map_err(e)?;
                let rhs = k1_canonical(&MWSymbolWord::unit((*a).clone()))
                    .map_err(e)?
                    .add(&k1_canonical(&MWSymbolWord::unit((*b).clone())).map_err(e)?);
                ensure!(lhs == rhs, "[{a}{b}] != [{a}] + [{b}] over F{p}");
            }
        }
    }
    Ok("q in {2, 3, 5, 7, 11, 13}".into())
}

const PER_FIELD: usize = 50;

fn c10_witnesses(cfg: &Config) -> Outcome {
    let fields = [FieldCtx::Rationals, f(7)];
    let mut valid: Vec<(HomotopyWitness, JMap, JMap)> = Vec::new();
    for ctx in fields {
        let out = constructor_battery(cfg, ctx)?;
        valid.extend(out);
    }
    let (tried, caught) = fuzz(cfg, &valid, 1000);
    let rate = caught as f64 / tried as f64;
    ensure!(rate >= 0.999, "fuzz caught {caught}/{tried} mutations");
    Ok(format!("5 constructors x {PER_FIELD} inputs x 2 fields; fuzz caught {caught}/{tried}"))
}

type Triple = (HomotopyWitness, JMap, JMap);

fn row_of(m: &PointedSL2) -> JMap {
    JMap::row_from_certified(m.first_column()).expect("pointed column")
}

fn constructor_battery(cfg: &Config, ctx: FieldCtx) -> Result<Vec<Triple>, String> {
    let mut rng = rng(cfg, 10 + ctx.characteristic());
    let mats: Vec<PointedSL2> = (0..PER_FIELD).map(|_| corpus::twist(&mut rng, ctx)).collect();
    let params: Vec<FieldElem> = (0..PER_FIELD).map(|_| nonzero_scalar(&mut rng, ctx)).collect();
    let extras: Vec<(RingElement, RingElement, RingElement)> = (0..PER_FIELD)
        .map(|_| {
            let r = corpus::vanishing_linear(&mut rng, ctx);
            let s = corpus::vanishing_linear(&mut rng, ctx);
            (r, s, corpus::vanishing_linear(&mut rng, ctx))
        })
        .collect();
    let sources: Vec<JMap> = (0..PER_FIELD)
        .map(|_| pullback_rational(&corpus::rational_map(&mut rng, ctx, 1)).expect("nonzero resultant"))
        .collect();
    let idx: Vec<usize> = (0..PER_FIELD).collect();
    let results = cfg.exec.map(&idx, |&i| -> Result<Vec<Triple>, String> {
        let e = |x: &dyn fmt::Display| format!("{ctx} input {i}: {x}");
        let mut out = Vec::new();
        let m = &mats[i];
        let row = row_of(m);
        let c = m.first_column();

        // interp_lift between E21(s) E12(r) and E21(s) E12(r2).
        let (r, s, r2) = &extras[i];
        let l1 =
            PointedSL2::new(corpus::lower(ctx, s.clone()).mul(&corpus::upper(ctx, r.clone()))).map_err(|x| e(&x))?;
        let l2 =
            PointedSL2::new(corpus::lower(ctx, s.clone()).mul(&corpus::upper(ctx, r2.clone()))).map_err(|x| e(&x))?;
        let lrow = row_of(&l1);
        let w = interp_lift(&lrow, &l1, &l2).map_err(|x| e(&x))?;
        out.push((w, lrow.clone(), lrow));

        // transpose-inverse: (A, B) to (U, V).
        let w = transpose_inverse_witness(m);
        let target = make_row(c.u.clone(), c.v.clone()).map_err(|x| e(&x))?;
        out.push((w, row.clone(), target));

        // scaling: (A, B) to (A, u^2 B).
        let u = &params[i];
        let w = scaling_witness(m, u).map_err(|x| e(&x))?;
        let target = make_row(c.a.clone(), c.b.scale(&(u * u))).map_err(|x| e(&x))?;
        out.push((w.clone(), row.clone(), target));

        // lift_row_homotopy on every scaling segment.
        for seg in &w.segments {
            let p = lift_row_homotopy(seg).map_err(|x| e(&x))?;
            ensure!(p.det() == RingPolyT::one(ctx) && p.is_pointed(), "{}", e(&"lift is not pointed SL2"));
            let Path::Row { a, b } = &seg.path else { return Err(e(&"row segment expected")) };
            let k = a.basepoint_curve()[0].inv().map_err(|x| e(&x))?;
            ensure!(p.m[0][0] == a.scale(&k) && p.m[1][0] == b.scale(&k), "{}", e(&"lift first column"));
        }

        // gu1 action on a small pullback.
        let f = &sources[i];
        let w = gu1_action_witness(u, f).map_err(|x| e(&x))?;
        let h0 = naive_sum_deg1(u, f).map_err(|x| e(&x))?.0;
        let h1 = act(&m_uv(u, &ctx.one()).map_err(|x| e(&x))?, &naive_sum_deg1(&ctx.one(), f).map_err(|x| e(&x))?.0)
            .map_err(|x| e(&x))?;
        out.push((w, h0, h1));

        for (w, a, b) in &out {
            let v = verify_with(w, a, b, Exec::Sequential);
            ensure!(v.is_valid(), "{}", e(&v));
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for r in results {
        all.extend(r?);
    }
    Ok(all)
}

fn path_polys(p: &Path) -> Vec<&RingPolyT> {
    match p {
        Path::Row { a, b } => vec![a, b],
        Path::Sections { c, .. } => c.iter().collect(),
    }
}

/// Whether `b = lambda a` for a nonzero scalar, i.e. the same family of maps.
fn proportional(a: &[&RingPolyT], b: &[&RingPolyT]) -> bool {
    let Some(i) = a.iter().position(|p| !p.is_zero()) else { return false };
    let (m, ca) = a[i].poly().terms().next().expect("nonzero polynomial");
    let cb = b[i].poly().coeff(m);
    if cb.is_zero() {
        return false;
    }
    let lambda = &cb * &ca.inv().expect("nonzero coefficient");
    a.iter().zip(b).all(|(p, q)| &p.scale(&lambda) == *q)
}

/// Adds a random nonzero scalar to one coefficient of one path polynomial.
/// Mutations that only rescale a segment's path describe the same maps and
/// are redrawn.
pub fn mutate<R: Rng>(w: &HomotopyWitness, rng: &mut R) -> HomotopyWitness {
    let ctx = w.ctx();
    loop {
        let mut out = w.clone();
        let si = rng.gen_range(0..out.segments.len());
        let seg: &mut Segment = &mut out.segments[si];
        let polys: Vec<&mut RingPolyT> = match &mut seg.path {
            Path::Row { a, b } => vec![a, b],
            Path::Sections { c, .. } => c.iter_mut().collect(),
        };
        let pi = rng.gen_range(0..polys.len());
        let p = polys.into_iter().nth(pi).expect("index in range");
        let monos: Vec<_> = p.poly().terms().map(|(m, _)| *m).collect();
        let mono = if monos.is_empty() { crate::poly::Monomial::ONE } else { monos[rng.gen_range(0..monos.len())] };
        let mut poly = p.poly().clone();
        poly.add_term(mono, &nonzero_scalar(rng, ctx));
        *p = RingPolyT::from_normal_poly(poly);
        if !proportional(&path_polys(&w.segments[si].path), &path_polys(&out.segments[si].path)) {
            return out;
        }
    }
}

fn fuzz(cfg: &Config, valid: &[Triple], count: usize) -> (usize, usize) {
    let mut rng = rng(cfg, 0xf022);
    let jobs: Vec<(HomotopyWitness, usize)> = (0..count)
        .map(|_| {
            let k = rng.gen_range(0..valid.len());
            (mutate(&valid[k].0, &mut rng), k)
        })
        .collect();
    let caught = cfg
        .exec
        .map(&jobs, |(w, k)| !verify_with(w, &valid[*k].1, &valid[*k].2, Exec::Sequential).is_valid())
        .into_iter()
        .filter(|&c| c)
        .count();
    (count, caught)
}

fn c11_normalize(cfg: &Config) -> Outcome {
    let mut checked = 0;
    let mut check = |kind: BundleKind, c: &[RingElement]| -> Result<(), String> {
        let ctx = c[0].ctx();
        let s = normalize_section(kind, c).map_err(|e| e.to_string())?;
        let mut brute = (RingElement::zero(ctx), RingElement::zero(ctx));
        for (i, ci) in c.iter().enumerate() {
            let g = generator(ctx, kind, i as u32);
            brute = (brute.0.add(&ci.mul(&g.0)), brute.1.add(&ci.mul(&g.1)));
        }
        ensure!((s.expanded().0, s.expanded().1) == (&brute.0, &brute.1), "{kind:?} {c:?}");
        checked += 1;
        Ok(())
    };
    for ctx in [FieldCtx::Rationals, f(5)] {
        for n in 1..=5u32 {
            for kind in [BundleKind::P(n), BundleKind::Q(n)] {
                for i in 0..=n as usize {
                    let mut c = vec![RingElement::zero(ctx); n as usize + 1];
                    c[i] = RingElement::one(ctx);
                    check(kind, &c)?;
                }
            }
        }
    }
    let ctx = f(5);
    let mut rng = rng(cfg, 11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5u32);
        let kind = if rng.gen_bool(0.5) { BundleKind::P(n) } else { BundleKind::Q(n) };
        let c: Vec<RingElement> = (0..=n).map(|_| corpus::ring_element(&mut rng, ctx, 2)).collect();
        check(kind, &c)?;
    }
    Ok(format!("{checked} sections"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_select_by_id_or_tag() {
        let all = criteria();
        assert_eq!(all.iter().filter(|c| c.matches("1")).count(), 1);
        assert_eq!(all.iter().filter(|c| c.matches("realize")).map(|c| c.id).collect::<Vec<_>>(), vec![7, 8]);
    }

    #[test]
    fn corrupted_fixture_fails_its_criterion() {
        let cfg = Config {
            filter: Some("3".into()),
            example_fixture: EXAMPLE_FIXTURE.replacen("1/2", "1/3", 1),
            ..Config::default()
        };
        let reports = run(&cfg);
        assert_eq!(reports.len(), 1);
        assert!(!reports[0].passed);
    }

    #[test]
    fn mutations_change_the_maps() {
        let q = FieldCtx::Rationals;
        let w = example_homotopy(&q.from_i64(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = mutate(&w, &mut rng);
            let changed = w.segments.iter().zip(&m.segments).filter(|(a, b)| a.path != b.path).count();
            assert_eq!(changed, 1);
        }
        let row = HomotopyWitness::constant(&make_row(RingElement::one(q), RingElement::zero(q)).unwrap());
        let m = mutate(&row, &mut rng);
        let Path::Row { b, .. } = &m.segments[0].path else { panic!("row path") };
        assert!(!b.is_zero(), "only rescaling the constant row is not a mutation");
    }
}
