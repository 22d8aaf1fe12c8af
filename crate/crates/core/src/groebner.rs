//! Ideal membership with explicit certificates.
//!
//! Buchberger's algorithm over `k[x, y, z, T]` (degree reverse lexicographic,
//! `x > y > z > T`) with Gebauer-Möller pair pruning. Each basis element
//! remembers how it is built from the input generators, so a successful
//! membership test yields cofactors that anyone can check by expansion.
//!
//! With `with_relation` set, the defining relation `x^2 - x + yz` of the
//! variety (after eliminating `w`) joins the generators. Its cofactor is not
//! tracked during the run; it is recovered at the end by exact division.

use std::sync::OnceLock;

use thiserror::Error;

use crate::field::FieldCtx;
use crate::jring::reduce_mod_relation;
use crate::poly::{MPoly, Monomial, W};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("step budget of {0} reductions exhausted")]
    BudgetExceeded(u64),
    #[error("ideal problems must be stated without w; substitute w = 1 - x first")]
    ContainsW,
}

/// The reduction budget, overridable through `JOU_STEP_BUDGET`.
pub fn default_budget() -> u64 {
    static BUDGET: OnceLock<u64> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("JOU_STEP_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_STEP_BUDGET)
    })
}

/// `x^2 - x + yz`.
pub fn relation(ctx: FieldCtx) -> MPoly {
    let mut r = MPoly::zero(ctx);
    r.add_term(Monomial([2, 0, 0, 0, 0]), &ctx.one());
    r.add_term(Monomial([1, 0, 0, 0, 0]), &ctx.from_i64(-1));
    r.add_term(Monomial([0, 1, 1, 0, 0]), &ctx.one());
    r
}

#[derive(Debug, Clone)]
pub struct IdealProblem {
    pub generators: Vec<MPoly>,
    pub target: MPoly,
    pub with_relation: bool,
}

/// `target = sum(cofactors[i] * generators[i]) + relation * (x^2 - x + yz)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub cofactors: Vec<MPoly>,
    pub relation: Option<MPoly>,
}

impl Certificate {
    /// Checks the identity by expanding it in the free polynomial ring.
    pub fn verify(&self, problem: &IdealProblem) -> bool {
        if self.cofactors.len() != problem.generators.len() {
            return false;
        }
        let ctx = problem.target.ctx();
        let mut sum = MPoly::zero(ctx);
        for (c, g) in self.cofactors.iter().zip(&problem.generators) {
            sum.add_assign(&c.mul(g));
        }
        match (&self.relation, problem.with_relation) {
            (Some(r), true) => sum.add_assign(&r.mul(&relation(ctx))),
            (None, _) => {}
            (Some(_), false) => return false,
        }
        sum == problem.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member(Certificate),
    NotInIdeal,
}

impl Membership {
    pub fn certificate(self) -> Option<Certificate> {
        match self {
            Membership::Member(c) => Some(c),
            Membership::NotInIdeal => None,
        }
    }
}

pub fn express_in_ideal(problem: &IdealProblem) -> Result<Membership, GroebnerError> {
    express_in_ideal_with_budget(problem, default_budget())
}

pub fn express_in_ideal_with_budget(problem: &IdealProblem, budget: u64) -> Result<Membership, GroebnerError> {
    if problem.target.degree_in(W) > 0 || problem.generators.iter().any(|g| g.degree_in(W) > 0) {
        return Err(GroebnerError::ContainsW);
    }
    let mut engine = Engine::new(problem, budget);
    let Some(cofs) = engine.run(&problem.generators, &problem.target)? else {
        return Ok(Membership::NotInIdeal);
    };
    let relation_cof = if problem.with_relation {
        let mut diff = problem.target.clone();
        for (c, g) in cofs.iter().zip(&problem.generators) {
            diff = diff.sub(&c.mul(g));
        }
        Some(exact_divide_by_relation(&diff).expect("difference lies in the relation ideal"))
    } else {
        None
    };
    let cert = Certificate { cofactors: cofs, relation: relation_cof };
    debug_assert!(cert.verify(problem));
    Ok(Membership::Member(cert))
}

/// Convenience: a certificate that the generators (plus the relation) generate the unit ideal.
pub fn unit_certificate(generators: &[MPoly], with_relation: bool) -> Result<Option<Certificate>, GroebnerError> {
    let ctx = generators.first().map(MPoly::ctx).unwrap_or(FieldCtx::Rationals);
    let problem = IdealProblem { generators: generators.to_vec(), target: MPoly::one(ctx), with_relation };
    Ok(express_in_ideal(&problem)?.certificate())
}

fn exact_divide_by_relation(p: &MPoly) -> Option<MPoly> {
    let ctx = p.ctx();
    let r = relation(ctx);
    let lm = Monomial([2, 0, 0, 0, 0]);
    let mut rest = p.clone();
    let mut q = MPoly::zero(ctx);
    while let Some((m, c)) = rest.leading().map(|(m, c)| (*m, c.clone())) {
        if !lm.divides(&m) {
            return None;
        }
        let t = lm.quotient(&m);
        q.add_term(t, &c);
        rest = rest.sub(&r.mul_term(&c, &t));
    }
    Some(q)
}

struct Elem {
    poly: MPoly,
    lm: Monomial,
    /// `poly = sum(cof[i] * gen[i])`, modulo the relation when it is in play.
    cof: Vec<MPoly>,
}

struct Engine {
    ctx: FieldCtx,
    ngens: usize,
    with_relation: bool,
    basis: Vec<Elem>,
    active: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    steps: u64,
    budget: u64,
}

impl Engine {
    fn new(problem: &IdealProblem, budget: u64) -> Self {
        Engine {
            ctx: problem.target.ctx(),
            ngens: problem.generators.len(),
            with_relation: problem.with_relation,
            basis: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            steps: 0,
            budget,
        }
        .seeded()
    }

    fn seeded(mut self) -> Self {
        if self.with_relation {
            let r = relation(self.ctx);
            self.basis.push(Elem { lm: *r.leading().unwrap().0, poly: r, cof: self.zero_cof() });
            self.update(0);
        }
        self
    }

    fn zero_cof(&self) -> Vec<MPoly> {
        vec![MPoly::zero(self.ctx); self.ngens]
    }

    fn tidy(&self, p: &MPoly) -> MPoly {
        if self.with_relation {
            reduce_mod_relation(p)
        } else {
            p.clone()
        }
    }

    /// Full reduction of `p` by the basis. Returns the remainder and the
    /// generator combination that was subtracted.
    fn reduce(&mut self, p: &MPoly) -> Result<(MPoly, Vec<MPoly>), GroebnerError> {
        let mut work = p.clone();
        let mut rem = MPoly::zero(self.ctx);
        let mut taken = self.zero_cof();
        while let Some((m, c)) = work.leading().map(|(m, c)| (*m, c.clone())) {
            match self.basis.iter().position(|g| g.lm.divides(&m)) {
                Some(i) => {
                    self.steps += 1;
                    if self.steps > self.budget {
                        return Err(GroebnerError::BudgetExceeded(self.budget));
                    }
                    let g = &self.basis[i];
                    let t = g.lm.quotient(&m);
                    work.add_scaled_assign(&-&c, &t, &g.poly);
                    for (acc, gc) in taken.iter_mut().zip(&g.cof) {
                        acc.add_scaled_assign(&c, &t, gc);
                    }
                }
                None => {
                    rem.add_term(m, &c);
                    work.add_term(m, &-&c);
                }
            }
        }
        let taken = taken.iter().map(|c| self.tidy(c)).collect();
        Ok((rem, taken))
    }

    fn push(&mut self, mut poly: MPoly, cof: Vec<MPoly>) -> usize {
        let inv = poly.make_monic().expect("nonzero");
        let cof = cof.iter().map(|c| self.tidy(&c.scale(&inv))).collect();
        self.basis.push(Elem { lm: *poly.leading().unwrap().0, poly, cof });
        let h = self.basis.len() - 1;
        self.update(h);
        h
    }

    /// Gebauer-Möller installation of a new basis element.
    fn update(&mut self, h: usize) {
        let lm_h = self.basis[h].lm;
        let lcm = |this: &Self, a: usize, b: usize| this.basis[a].lm.lcm(&this.basis[b].lm);
        let mut c: Vec<usize> = self.active.clone();
        let mut d: Vec<usize> = Vec::new();
        while let Some(g1) = c.pop() {
            let l1 = lcm(self, h, g1);
            let coprime = lm_h.coprime(&self.basis[g1].lm);
            let dominated = c.iter().chain(d.iter()).any(|&g2| lcm(self, h, g2).divides(&l1));
            if coprime || !dominated {
                d.push(g1);
            }
        }
        let e: Vec<(usize, usize)> =
            d.into_iter().filter(|&g| !lm_h.coprime(&self.basis[g].lm)).map(|g| (g, h)).collect();
        let kept: Vec<(usize, usize)> = self
            .pairs
            .iter()
            .copied()
            .filter(|&(g1, g2)| {
                let l = lcm(self, g1, g2);
                !(lm_h.divides(&l) && lcm(self, g1, h) != l && lcm(self, h, g2) != l)
            })
            .collect();
        self.pairs = kept;
        self.pairs.extend(e);
        let active: Vec<usize> = self.active.iter().copied().filter(|&g| !lm_h.divides(&self.basis[g].lm)).collect();
        self.active = active;
        self.active.push(h);
    }

    fn next_pair(&mut self) -> Option<(usize, usize)> {
        let (idx, _) = self.pairs.iter().enumerate().min_by(|(_, a), (_, b)| {
            let la = self.basis[a.0].lm.lcm(&self.basis[a.1].lm);
            let lb = self.basis[b.0].lm.lcm(&self.basis[b.1].lm);
            la.cmp(&lb).then(a.cmp(b))
        })?;
        Some(self.pairs.swap_remove(idx))
    }

    fn spoly(&self, i: usize, j: usize) -> (MPoly, Vec<MPoly>) {
        let (gi, gj) = (&self.basis[i], &self.basis[j]);
        let l = gi.lm.lcm(&gj.lm);
        let (ti, tj) = (gi.lm.quotient(&l), gj.lm.quotient(&l));
        let one = self.ctx.one();
        let s = gi.poly.mul_term(&one, &ti).sub(&gj.poly.mul_term(&one, &tj));
        let cof = gi.cof.iter().zip(&gj.cof).map(|(a, b)| a.mul_term(&one, &ti).sub(&b.mul_term(&one, &tj))).collect();
        (s, cof)
    }

    /// Adds `rem` (whose combination is `cof - taken`) to the basis. Returns
    /// true when the basis has become the unit ideal.
    fn absorb(&mut self, rem: MPoly, cof: Vec<MPoly>, taken: Vec<MPoly>) -> Option<usize> {
        if rem.is_zero() {
            return None;
        }
        let cof: Vec<MPoly> = cof.iter().zip(&taken).map(|(c, t)| c.sub(t)).collect();
        let h = self.push(rem, cof);
        self.basis[h].poly.is_constant().then_some(h)
    }

    fn unit_answer(&self, h: usize, target: &MPoly) -> Vec<MPoly> {
        self.basis[h].cof.iter().map(|c| self.tidy(&c.mul(target))).collect()
    }

    /// Builds the basis, then reduces `target`. Returns generator cofactors on success.
    fn run(&mut self, gens: &[MPoly], target: &MPoly) -> Result<Option<Vec<MPoly>>, GroebnerError> {
        if target.is_zero() {
            return Ok(Some(self.zero_cof()));
        }
        for (i, g) in gens.iter().enumerate() {
            let mut cof = self.zero_cof();
            cof[i] = MPoly::one(self.ctx);
            let (rem, taken) = self.reduce(g)?;
            if let Some(h) = self.absorb(rem, cof, taken) {
                return Ok(Some(self.unit_answer(h, target)));
            }
        }
        while let Some((i, j)) = self.next_pair() {
            let (s, cof) = self.spoly(i, j);
            let (rem, taken) = self.reduce(&s)?;
            if let Some(h) = self.absorb(rem, cof, taken) {
                return Ok(Some(self.unit_answer(h, target)));
            }
        }
        let (rem, taken) = self.reduce(target)?;
        Ok(rem.is_zero().then_some(taken))
    }
}
