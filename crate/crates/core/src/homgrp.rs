//! The group operation on pointed maps, computed on representatives.
//!
//! A map `f` of degree `n` is decomposed as `f ~ M_f . ref(n)` for a pointed
//! matrix `M_f` and a fixed reference family. Sums multiply the matrices and
//! act on the reference map of the summed degree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::bundle::{expand, mn_matrices, BundleError, BundleKind};
use crate::field::{FieldCtx, FieldElem};
use crate::homotopy::{gu1_action_witness, HomotopyError, HomotopyWitness, Segment};
use crate::jring::{RingElement, RingPolyT};
use crate::morphism::{n_pi, GenCert, JMap, MorphismError};
use crate::sl2::{act, completion, Mat2, PointedSL2, Sl2Error};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomGroupError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// Which representative stands for `n` times the class of `pi` when `n < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeRefs {
    /// `(1, 0; 0, 1)_n` in the `Q_|n|` basis.
    #[default]
    QBasis,
    /// `tau` of `|n| pi` with the second section negated; gives `pi~` at `n = -1`.
    Naive,
}

impl std::str::FromStr for NegativeRefs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qbasis" => Ok(NegativeRefs::QBasis),
            "naive" => Ok(NegativeRefs::Naive),
            other => Err(format!("unknown reference family `{other}`")),
        }
    }
}

/// `(1, 0; 0, 1)_n`, certified through `x^n A + w^n B = 1`.
pub fn unit_map(ctx: FieldCtx, n: i32) -> Result<JMap, HomGroupError> {
    let pair = mn_matrices(ctx, n.unsigned_abs())?;
    let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
    let cert = GenCert([pair.a, zero.clone(), zero.clone(), pair.b]);
    Ok(JMap::from_certified(n, [one.clone(), zero.clone(), zero, one], cert)?)
}

/// Factorization of a map against `(1, 0; 0, 1)_n`: `f ~ M . unit` via the
/// segment `(a0 - T e b0, a1 - T e b1; b0, b1)` from `f` to `M . unit`.
#[derive(Debug, Clone)]
pub struct UnitFactor {
    pub m: PointedSL2,
    pub segment: Segment,
}

/// The matrix `[[a0 + c k1 + c' k2], [b - d k1 - d' k2]]` whose determinant is
/// forced to one by the generation certificate, where `k1, k2` span relations
/// between the two generators; then the basepoint shear is removed.
pub fn factor_through_unit(f: &JMap) -> Result<UnitFactor, HomGroupError> {
    let s = f.as_sections().ok_or(Sl2Error::DegreeZero)?;
    let ctx = f.ctx();
    let kind = s.s0.kind();
    let (one, zero) = (RingElement::one(ctx), RingElement::zero(ctx));
    let g0 = expand(kind, &one, &zero);
    let g1 = expand(kind, &zero, &one);
    let k1 = (g1.0.clone(), g0.0.neg());
    let k2 = (g1.1.clone(), g0.1.neg());
    let [a0, a1, b0, b1] = s.coeffs();
    let t = one.sub(&a0.mul(&b1).sub(&a1.mul(&b0)));
    let [e0, e1, e2, e3] = s.cert.0.clone().map(|e| e.mul(&t));
    let (d, d2, c, c2) = (e0, e1, e2, e3);
    let m00 = a0.add(&c.mul(&k1.0)).add(&c2.mul(&k2.0));
    let m01 = a1.add(&c.mul(&k1.1)).add(&c2.mul(&k2.1));
    let m10 = b0.sub(&d.mul(&k1.0)).sub(&d2.mul(&k2.0));
    let m11 = b1.sub(&d.mul(&k1.1)).sub(&d2.mul(&k2.1));
    let e = m01.eval_basepoint();
    let m_prime = Mat2::new(m00, m01, m10, m11);
    debug_assert_eq!(m_prime.det(), one);
    let shear = Mat2::new(one.clone(), RingElement::constant(e.neg()), zero.clone(), one.clone());
    let m = PointedSL2::new(shear.mul(&m_prime))?;
    let t_var = RingPolyT::t(ctx);
    let e_t = Mat2::new(RingPolyT::one(ctx), t_var.scale(&e.neg()), RingPolyT::zero(ctx), RingPolyT::one(ctx));
    Ok(UnitFactor { m, segment: Segment::constant(f).transform(&e_t) })
}

struct RefEntry {
    map: JMap,
    factor: Option<UnitFactor>,
}

/// Reference maps `ref(n)`, built lazily and cached.
pub struct ReferenceFamily {
    ctx: FieldCtx,
    negative: NegativeRefs,
    cache: Mutex<HashMap<i32, Arc<RefEntry>>>,
}

impl ReferenceFamily {
    pub fn new(ctx: FieldCtx, negative: NegativeRefs) -> Self {
        ReferenceFamily { ctx, negative, cache: Mutex::new(HashMap::new()) }
    }

    pub fn ctx(&self) -> FieldCtx {
        self.ctx
    }

    fn build(&self, n: i32) -> Result<JMap, HomGroupError> {
        if n > 0 {
            return Ok(n_pi(self.ctx, n as u32)?);
        }
        match self.negative {
            NegativeRefs::QBasis => unit_map(self.ctx, n),
            NegativeRefs::Naive => {
                let p = n_pi(self.ctx, n.unsigned_abs())?;
                let s = p.as_sections().expect("positive degree");
                let [a0, a1, b0, b1] = s.coeffs().map(|e| e.tau());
                let [c0, c1, c2, c3] = s.cert.0.clone().map(|e| e.tau());
                let cert = GenCert([c0, c1, c2.neg(), c3.neg()]);
                Ok(JMap::from_certified(n, [a0, a1, b0.neg(), b1.neg()], cert)?)
            }
        }
    }

    fn entry(&self, n: i32) -> Result<Arc<RefEntry>, HomGroupError> {
        if let Some(e) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(e.clone());
        }
        let (map, factor) = if n == 0 {
            (JMap::Row(PointedSL2::identity(self.ctx).first_column()), None)
        } else {
            let map = self.build(n)?;
            let factor = factor_through_unit(&map)?;
            (map, Some(factor))
        };
        let e = Arc::new(RefEntry { map, factor });
        self.cache.lock().expect("cache lock").insert(n, e.clone());
        Ok(e)
    }

    pub fn get(&self, n: i32) -> Result<JMap, HomGroupError> {
        Ok(self.entry(n)?.map.clone())
    }
}

/// `f ~ M . ref(n)` with a witness running from `M . ref(n)` to `f`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub m: PointedSL2,
    pub n: i32,
    pub witness: HomotopyWitness,
}

pub fn decompose(f: &JMap, refs: &ReferenceFamily) -> Result<Decomposition, HomGroupError> {
    let n = f.degree();
    if n == 0 {
        return Ok(Decomposition { m: completion(f)?, n, witness: HomotopyWitness::constant(f) });
    }
    let entry = refs.entry(n)?;
    let r = entry.factor.as_ref().expect("nonzero degree");
    let own = factor_through_unit(f)?;
    let m = own.m.mul(&r.m.inverse());
    // M . ref  ->  M . (M_r . unit) = M_f' . unit  ->  f
    let first = r.segment.transform(&m.matrix().to_t());
    let second = own.segment.reversed();
    Ok(Decomposition { m, n, witness: HomotopyWitness::new(vec![first, second])? })
}

/// `[f] (+) [g]`: decompose both, multiply the matrices, act on `ref(n + m)`.
pub fn oplus(f: &JMap, g: &JMap, refs: &ReferenceFamily) -> Result<JMap, HomGroupError> {
    let (df, dg) = (decompose(f, refs)?, decompose(g, refs)?);
    let m = df.m.mul(&dg.m);
    let n = df.n + dg.n;
    if n == 0 {
        return Ok(JMap::Row(m.first_column()));
    }
    Ok(act(&m, &refs.get(n)?)?)
}

/// The pullback of the Cazanave sum `X/u (+) f`, with the witness connecting
/// it to `m_{u,1} . naive_sum_deg1(1, f)`.
pub fn naive_sum_deg1(u: &FieldElem, f: &JMap) -> Result<(JMap, HomotopyWitness), HomGroupError> {
    if u.is_zero() {
        return Err(MorphismError::ZeroParameter.into());
    }
    let w = gu1_action_witness(u, f)?;
    let start = w.start_map().ok_or(HomotopyError::NoCertificate)?;
    Ok((start, w))
}

/// A degree-`n` map under `(1, 0; 0, 1)`-style data, used for tests and the CLI.
pub fn bundle_kind(n: i32) -> BundleKind {
    BundleKind::for_degree(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{example_homotopy, verify, Verdict};
    use crate::morphism::{g_uv, m_uv, make_map, pi, pi_tilde, pullback_rational, RationalMapP1};
    use crate::sl2::{row_inverse, row_sum};
    use crate::text::parse_poly;

    fn q() -> FieldCtx {
        FieldCtx::Rationals
    }

    fn r(ctx: FieldCtx, s: &str) -> RingElement {
        RingElement::normal_form(&parse_poly(ctx, s).unwrap()).unwrap()
    }

    fn check(f: &JMap, refs: &ReferenceFamily) -> Decomposition {
        let d = decompose(f, refs).unwrap();
        let start = act(&d.m, &refs.get(d.n).unwrap()).unwrap();
        assert_eq!(verify(&d.witness, &start, f), Verdict::Valid, "decomposition of {f}");
        assert_eq!(d.witness.start_map().unwrap(), start);
        d
    }

    #[test]
    fn unit_maps() {
        let k = q();
        assert_eq!(unit_map(k, 1).unwrap(), pi(k));
        for n in [-3, -1, 2, 4] {
            assert!(unit_map(k, n).unwrap().as_sections().unwrap().certificate_holds());
        }
    }

    #[test]
    fn decompose_examples() {
        let k = q();
        let refs = ReferenceFamily::new(k, NegativeRefs::QBasis);
        let u = k.from_i64(5);
        let f = pullback_rational(&RationalMapP1::x_over(&u).unwrap()).unwrap();
        let d = check(&f, &refs);
        assert_eq!(act(&d.m, &pi(k)).unwrap(), f);

        let sheared = make_map(1, r(k, "1"), r(k, "1"), r(k, "0"), r(k, "1")).unwrap();
        let d = check(&sheared, &refs);
        assert!(d.m.matrix().is_pointed());

        for n in [1, 2, 3, -1, -2] {
            let d = check(&refs.get(n).unwrap(), &refs);
            assert_eq!(d.m, PointedSL2::identity(k));
        }
        check(&pi_tilde(k), &refs);
        let naive = ReferenceFamily::new(k, NegativeRefs::Naive);
        assert_eq!(naive.get(-1).unwrap(), pi_tilde(k));
        check(&pi_tilde(k), &naive);
        check(&unit_map(k, -2).unwrap(), &naive);
    }

    #[test]
    fn decompose_over_prime_field() {
        let f7 = FieldCtx::prime(7).unwrap();
        let refs = ReferenceFamily::new(f7, NegativeRefs::QBasis);
        let g = RationalMapP1::new(f7, &[f7.from_i64(3), f7.from_i64(2)], &[f7.from_i64(1), f7.from_i64(4)]).unwrap();
        let f = pullback_rational(&g).unwrap();
        check(&f, &refs);
        let twisted = act(&m_uv(&f7.from_i64(3), &f7.from_i64(5)).unwrap(), &f).unwrap();
        check(&twisted, &refs);
    }

    #[test]
    fn oplus_examples() {
        let k = q();
        let refs = ReferenceFamily::new(k, NegativeRefs::QBasis);
        let u = k.from_i64(3);
        let g = g_uv(&u, &k.one()).unwrap();
        let want = pullback_rational(&RationalMapP1::x_over(&u).unwrap()).unwrap();
        assert_eq!(oplus(&g, &pi(k), &refs).unwrap(), want);
        assert_eq!(oplus(&pi(k), &pi(k), &refs).unwrap(), n_pi(k, 2).unwrap());
        let r32 = g_uv(&u, &k.from_i64(2)).unwrap();
        let one_row = JMap::Row(PointedSL2::identity(k).first_column());
        assert_eq!(oplus(&r32, &row_inverse(&r32).unwrap(), &refs).unwrap(), one_row);
        assert_eq!(oplus(&r32, &g, &refs).unwrap(), row_sum(&r32, &g).unwrap());
        let back = oplus(&pi(k), &pi_tilde(k), &refs).unwrap();
        assert_eq!(back.degree(), 0);
    }

    #[test]
    fn naive_sums() {
        let k = q();
        let refs = ReferenceFamily::new(k, NegativeRefs::QBasis);
        let (two, _) = naive_sum_deg1(&k.one(), &pi(k)).unwrap();
        assert_eq!(two, n_pi(k, 2).unwrap());
        for u in [k.from_i64(2), k.from_i64(-1), k.ratio(1, 2).unwrap()] {
            let (sum, w) = naive_sum_deg1(&u, &pi(k)).unwrap();
            let h0 = oplus(&g_uv(&u, &k.one()).unwrap(), &n_pi(k, 2).unwrap(), &refs).unwrap();
            assert_eq!(verify(&w, &sum, &h0), Verdict::Valid);
            let ex = example_homotopy(&u).unwrap();
            assert_eq!(verify(&ex, &h0, &sum), Verdict::Valid);
        }
        // the pullback of a Cazanave sum of X/u's, iterated
        let mut f = pi(k);
        for _ in 0..2 {
            let (next, w) = naive_sum_deg1(&k.one(), &f).unwrap();
            assert_eq!(verify(&w, &next, &next), Verdict::Valid);
            f = next;
        }
        assert_eq!(f.degree(), 3);
        assert_eq!(f, n_pi(k, 3).unwrap());
    }

    #[test]
    fn degree_is_additive() {
        let k = q();
        let refs = ReferenceFamily::new(k, NegativeRefs::QBasis);
        let maps = [pi(k), pi_tilde(k), n_pi(k, 2).unwrap(), g_uv(&k.from_i64(2), &k.one()).unwrap()];
        for f in &maps {
            for g in &maps {
                assert_eq!(oplus(f, g, &refs).unwrap().degree(), f.degree() + g.degree());
            }
        }
    }
}
