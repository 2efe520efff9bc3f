use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, Coeff, Q};
use crate::weights::{Grading, MultiIndex};

/// Truncation value of a polynomial known exactly.
pub const EXACT: i64 = i64::MAX / 4;

pub(crate) fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

/// The ring a polynomial lives in.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCtx<C: Coeff> {
    pub grading: Grading,
    /// Ring-wide truncation; `EXACT` for the polynomial ring itself.
    pub cap: i64,
    pub inner: C::Ctx,
}

impl<C: Coeff> PolyCtx<C> {
    pub fn new(grading: Grading, cap: i64, inner: C::Ctx) -> Self {
        Self { grading, cap, inner }
    }

    pub fn n(&self) -> usize {
        self.grading.n()
    }

    pub fn with_cap(&self, cap: i64) -> Self {
        Self { cap, ..self.clone() }
    }
}

impl PolyCtx<Q> {
    pub fn exact(w: &[u32]) -> Self {
        Self::new(Grading::new(w.to_vec()), EXACT, ())
    }

    pub fn capped(w: &[u32], cap: i64) -> Self {
        Self::new(Grading::new(w.to_vec()), cap, ())
    }
}

/// Sparse weighted polynomial with coefficients in `C`.
///
/// `trunc` records exactness: every monomial of weighted degree `<= trunc` is
/// known, nothing is claimed above it. Stored terms never exceed `trunc`.
#[derive(Clone, Debug)]
pub struct WPoly<C: Coeff = Q> {
    ctx: PolyCtx<C>,
    terms: BTreeMap<MultiIndex, C>,
    trunc: i64,
}

impl<C: Coeff> WPoly<C> {
    pub fn zero_in(ctx: &PolyCtx<C>) -> Self {
        Self { ctx: ctx.clone(), terms: BTreeMap::new(), trunc: ctx.cap }
    }

    pub fn constant_in(ctx: &PolyCtx<C>, c: C) -> Self {
        let mut p = Self::zero_in(ctx);
        if !c.is_zero() && ctx.cap >= 0 {
            p.terms.insert(vec![0; ctx.n()], c);
        }
        p
    }

    pub fn constant_q(ctx: &PolyCtx<C>, c: &Q) -> Self {
        Self::constant_in(ctx, C::from_q(&ctx.inner, c))
    }

    pub fn var(ctx: &PolyCtx<C>, i: usize) -> Self {
        Self::monomial(ctx, unit_index(ctx.n(), i), C::one(&ctx.inner))
    }

    pub fn monomial(ctx: &PolyCtx<C>, a: MultiIndex, c: C) -> Self {
        let mut p = Self::zero_in(ctx);
        assert_eq!(a.len(), ctx.n());
        if !c.is_zero() && (ctx.grading.degree(&a) as i64) <= ctx.cap {
            p.terms.insert(a, c);
        }
        p
    }

    /// Builds from terms; duplicate monomials are summed.
    pub fn from_terms(ctx: &PolyCtx<C>, terms: impl IntoIterator<Item = (MultiIndex, C)>, trunc: i64) -> Self {
        let trunc = trunc.min(ctx.cap);
        let mut p = Self { ctx: ctx.clone(), terms: BTreeMap::new(), trunc };
        for (a, c) in terms {
            assert_eq!(a.len(), ctx.n(), "monomial arity");
            p.add_term(a, c);
        }
        p
    }

    pub fn ctx(&self) -> &PolyCtx<C> {
        &self.ctx
    }

    pub fn grading(&self) -> &Grading {
        &self.ctx.grading
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, C> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero as far as known.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &[u32]) -> C {
        self.terms.get(a).cloned().unwrap_or_else(|| C::zero(&self.ctx.inner))
    }

    pub fn constant_coeff(&self) -> C {
        self.coeff(&vec![0; self.n()])
    }

    pub fn degree_of(&self, a: &[u32]) -> i64 {
        self.ctx.grading.degree(a) as i64
    }

    /// Least weighted degree of a stored term.
    pub fn ord(&self) -> Option<i64> {
        self.terms.keys().map(|a| self.degree_of(a)).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(|a| self.degree_of(a)).max()
    }

    /// Lower bound for the degree of every nonzero term of the true value.
    pub fn valuation(&self) -> i64 {
        match self.ord() {
            Some(o) => o,
            None => sat_add(self.trunc, 1),
        }
    }

    pub(crate) fn add_term(&mut self, a: MultiIndex, c: C) {
        if c.is_zero() || self.degree_of(&a) > self.trunc {
            return;
        }
        match self.terms.get_mut(&a) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&a);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(a, c);
            }
        }
    }

    /// Lowers the exactness bound to `n`, dropping terms above it.
    pub fn truncate(&self, n: i64) -> Self {
        let mut p = self.clone();
        p.truncate_mut(n);
        p
    }

    pub fn truncate_mut(&mut self, n: i64) {
        if n < self.trunc {
            self.trunc = n;
            let g = self.ctx.grading.clone();
            self.terms.retain(|a, _| (g.degree(a) as i64) <= n);
        }
    }

    /// Declares the polynomial exact (caller's guarantee).
    pub fn into_exact(mut self) -> Self {
        self.trunc = EXACT;
        self.ctx.cap = EXACT;
        self
    }

    pub fn with_trunc_claim(mut self, t: i64) -> Self {
        self.trunc = t;
        self
    }

    /// Moves into a ring with a different cap.
    pub fn recap(&self, cap: i64) -> Self {
        let mut p = self.clone();
        p.ctx.cap = cap;
        p.truncate_mut(cap);
        p
    }

    pub fn check_same_ring(&self, o: &Self) {
        debug_assert_eq!(self.ctx.grading, o.ctx.grading, "polynomials from different rings");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_same_ring(o);
        let trunc = self.trunc.min(o.trunc);
        let mut p = self.truncate(trunc);
        for (a, c) in &o.terms {
            p.add_term(a.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = v.neg();
        }
        p
    }

    pub fn scale(&self, c: &Q) -> Self {
        if Zero::is_zero(c) {
            let mut p = Self::zero_in(&self.ctx);
            p.trunc = EXACT.min(self.ctx.cap);
            return p;
        }
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = v.scale(c);
        }
        p
    }

    pub fn scale_c(&self, c: &C) -> Self {
        let terms = self.terms.iter().map(|(a, v)| (a.clone(), v.mul(c)));
        Self::from_terms(&self.ctx, terms, self.trunc)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_to(o, EXACT)
    }

    /// Product known up to `limit` at most.
    pub fn mul_to(&self, o: &Self, limit: i64) -> Self {
        self.check_same_ring(o);
        let trunc = sat_add(self.trunc, o.valuation())
            .min(sat_add(o.trunc, self.valuation()))
            .min(limit)
            .min(self.ctx.cap);
        let mut p = Self { ctx: self.ctx.clone(), terms: BTreeMap::new(), trunc };
        if trunc < 0 {
            return p;
        }
        let g = &self.ctx.grading;
        let db: Vec<(i64, &MultiIndex, &C)> = o.terms.iter().map(|(b, c)| (g.degree(b) as i64, b, c)).collect();
        for (a, ca) in &self.terms {
            let da = g.degree(a) as i64;
            if da > trunc {
                continue;
            }
            for (d, b, cb) in &db {
                if da + d > trunc {
                    continue;
                }
                let ab: MultiIndex = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
                p.add_term(ab, ca.mul(cb));
            }
        }
        p
    }

    pub fn pow_to(&self, e: u32, limit: i64) -> Self {
        let mut r = Self::constant_in(&self.ctx, C::one(&self.ctx.inner));
        for _ in 0..e {
            r = r.mul_to(self, limit);
        }
        r
    }

    /// Partial derivative in variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let wi = self.ctx.grading.w(i) as i64;
        let trunc = if self.trunc >= EXACT { EXACT } else { self.trunc - wi };
        let mut p = Self { ctx: self.ctx.clone(), terms: BTreeMap::new(), trunc };
        for (a, c) in &self.terms {
            if a[i] == 0 {
                continue;
            }
            let mut b = a.clone();
            b[i] -= 1;
            p.add_term(b, c.scale(&Q::from_integer(a[i].into())));
        }
        p
    }

    /// Terms of weighted degree exactly `d`.
    pub fn hom_part(&self, d: i64) -> Result<Self> {
        if d > self.trunc {
            return Err(Error::Truncation(format!("degree {d} requested, polynomial known to {}", self.trunc)));
        }
        let terms = self.terms.iter().filter(|(a, _)| self.degree_of(a) == d).map(|(a, c)| (a.clone(), c.clone()));
        Ok(Self::from_terms(&self.ctx.with_cap(EXACT), terms, EXACT).recap(self.ctx.cap))
    }

    /// Terms of weighted degree `<= d`, made exact.
    pub fn low_part(&self, d: i64) -> Self {
        let terms = self.terms.iter().filter(|(a, _)| self.degree_of(a) <= d).map(|(a, c)| (a.clone(), c.clone()));
        Self::from_terms(&self.ctx.with_cap(EXACT), terms, EXACT).recap(self.ctx.cap)
    }

    pub fn eval(&self, x: &[C]) -> C {
        assert_eq!(x.len(), self.n());
        let inner = &self.ctx.inner;
        let mut pows: Vec<Vec<C>> = x.iter().map(|xi| vec![C::one(inner), xi.clone()]).collect();
        let mut acc = C::zero(inner);
        for (a, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in a.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while pows[i].len() <= e as usize {
                    let nx = pows[i].last().unwrap().mul(&x[i]);
                    pows[i].push(nx);
                }
                t = t.mul(&pows[i][e as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Maps coefficients into another ring over the same variables.
    pub fn map_coeffs<D: Coeff>(&self, ctx: &PolyCtx<D>, f: impl Fn(&C) -> D) -> WPoly<D> {
        assert_eq!(ctx.grading, self.ctx.grading);
        let terms = self.terms.iter().map(|(a, c)| (a.clone(), f(c)));
        WPoly::from_terms(ctx, terms, self.trunc.min(ctx.cap))
    }

    /// Reinterprets the same terms in a ring with another grading of equal arity.
    pub fn regrade(&self, ctx: &PolyCtx<C>) -> Self {
        assert_eq!(ctx.n(), self.n());
        assert!(self.is_exact(), "regrading requires an exact polynomial");
        Self::from_terms(ctx, self.terms.clone(), EXACT)
    }

    /// Substitutes polynomials for the variables, keeping only what is
    /// certain up to weighted degree `target` of the output ring.
    ///
    /// Inner polynomials with constant terms are allowed only when `self` is
    /// exact.
    pub fn compose_to(&self, inner: &[WPoly<C>], target: i64) -> Result<WPoly<C>> {
        if inner.len() != self.n() {
            return Err(Error::Shape(format!("composing {} variables with {} polynomials", self.n(), inner.len())));
        }
        let out_ctx = match inner.first() {
            Some(p) => p.ctx.clone(),
            None => return Err(Error::Shape("empty substitution".into())),
        };
        let m: Vec<i64> = inner.iter().map(|p| p.valuation()).collect();
        let has_const = m.iter().any(|&v| v <= 0);
        if has_const && !self.is_exact() {
            return Err(Error::Precondition("inner map has a constant term while the outer jet is truncated".into()));
        }
        let mut limit = target.min(out_ctx.cap);
        if !self.is_exact() {
            let b = min_image_degree(self.ctx.grading.weights(), &m, self.trunc + 1);
            limit = limit.min(b - 1);
        }
        let mut acc = WPoly { ctx: out_ctx.clone(), terms: BTreeMap::new(), trunc: limit };
        let mut cache: Vec<Vec<WPoly<C>>> = inner
            .iter()
            .map(|_| vec![WPoly::constant_in(&out_ctx, C::one(&out_ctx.inner))])
            .collect();
        for (a, c) in &self.terms {
            let lower: i64 = a.iter().zip(&m).map(|(&e, &mi)| e as i64 * mi.max(0)).sum();
            if lower > limit {
                continue;
            }
            let mut t = WPoly::constant_in(&out_ctx, c.clone());
            for (i, &e) in a.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let nx = cache[i].last().unwrap().mul_to(&inner[i], limit);
                    cache[i].push(nx);
                }
                t = t.mul_to(&cache[i][e as usize], limit);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

/// `min { sum a_i m_i : sum a_i w_i >= need }` over multi-indices `a`.
pub(crate) fn min_image_degree(w: &[u32], m: &[i64], need: i64) -> i64 {
    if need >= EXACT {
        return EXACT;
    }
    if need <= 0 {
        return 0;
    }
    let need = need as usize;
    let mut f = vec![EXACT; need + 1];
    f[0] = 0;
    for s in 1..=need {
        for (&wi, &mi) in w.iter().zip(m) {
            let prev = s.saturating_sub(wi as usize);
            let v = sat_add(f[prev], mi.max(0));
            if v < f[s] {
                f[s] = v;
            }
        }
    }
    f[need]
}

pub fn unit_index(n: usize, i: usize) -> MultiIndex {
    let mut a = vec![0; n];
    a[i] = 1;
    a
}

impl<C: Coeff> PartialEq for WPoly<C> {
    /// Equality of the parts both sides know.
    fn eq(&self, o: &Self) -> bool {
        if self.ctx.grading != o.ctx.grading {
            return false;
        }
        let t = self.trunc.min(o.trunc);
        let a = self.truncate(t);
        let b = o.truncate(t);
        a.terms == b.terms
    }
}

impl<C: Coeff> Coeff for WPoly<C> {
    type Ctx = PolyCtx<C>;

    fn ctx(&self) -> PolyCtx<C> {
        self.ctx.clone()
    }
    fn zero(ctx: &PolyCtx<C>) -> Self {
        WPoly::zero_in(ctx)
    }
    fn from_q(ctx: &PolyCtx<C>, c: &Q) -> Self {
        WPoly::constant_q(ctx, c)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        WPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        WPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        WPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        WPoly::neg(self)
    }
    fn scale(&self, c: &Q) -> Self {
        WPoly::scale(self, c)
    }
    fn inv(&self) -> Option<Self> {
        let c0 = self.constant_coeff();
        let i0 = c0.inv()?;
        let nonconst = self.terms.len() > 1 || (self.terms.len() == 1 && c0.is_zero());
        if !nonconst {
            return Some(WPoly::constant_in(&self.ctx, i0).with_trunc_claim(self.trunc.min(self.ctx.cap)));
        }
        if self.ctx.cap >= EXACT && self.trunc >= EXACT {
            return None;
        }
        // 1/f = i0 * sum h^k with h = 1 - i0 f
        let one = WPoly::constant_in(&self.ctx, C::one(&self.ctx.inner));
        let h = one.sub(&self.scale_c(&i0));
        let limit = self.trunc.min(self.ctx.cap);
        let vh = h.valuation().max(1);
        let mut sum = one.clone();
        let mut term = one;
        let mut k = 0i64;
        loop {
            k += 1;
            if k * vh > limit {
                break;
            }
            term = term.mul_to(&h, limit);
            sum = sum.add(&term);
        }
        sum.truncate_mut(limit.min(k * vh - 1));
        Some(sum.scale_c(&i0))
    }
    fn constant(&self) -> Q {
        self.constant_coeff().constant()
    }
}

impl WPoly<Q> {
    pub fn eval_q(&self, x: &[Q]) -> Q {
        self.eval(x)
    }

    pub fn to_f64_eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let mut t = crate::scalar::q_to_f64(c);
                for (i, &e) in a.iter().enumerate() {
                    t *= x[i].powi(e as i32);
                }
                t
            })
            .sum()
    }
}

/// `x1^2*x3`, or `1` for the empty monomial.
pub fn fmt_monomial(a: &[u32], var: &str) -> String {
    let mono: Vec<String> = a
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{e}", i + 1) })
        .collect();
    if mono.is_empty() {
        "1".into()
    } else {
        mono.join("*")
    }
}

/// Human-readable form with variables `x1, x2, ...`.
pub fn fmt_poly(p: &WPoly<Q>, var: &str) -> String {
    if p.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (a, c)) in p.terms.iter().enumerate() {
        let mono: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{e}", i + 1) })
            .collect();
        let neg = c < &<Q as Zero>::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&fmt_q(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&fmt_q(&abs));
                out.push('*');
            }
            out.push_str(&mono.join("*"));
        }
    }
    out
}

impl fmt::Display for WPoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_poly(self, "x"))
    }
}
