//! Weighted polynomial jets: maps, vector fields, brackets, composition,
//! inversion, flows and parametrized remainders.

mod poly;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Coeff, Q};
use crate::weights::{Grading, MultiIndex};

pub use poly::{fmt_monomial, fmt_poly, unit_index, PolyCtx, WPoly, EXACT};
pub(crate) use poly::sat_add;

/// Weighted order of a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WOrder {
    Exact(i64),
    /// Zero up to the truncation; the order is at least this value.
    AtLeast(i64),
}

impl WOrder {
    pub fn at_least(self, m: i64) -> bool {
        match self {
            WOrder::Exact(o) | WOrder::AtLeast(o) => o >= m,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            WOrder::Exact(o) | WOrder::AtLeast(o) => o,
        }
    }
}

/// Polynomial map between graded spaces.
#[derive(Clone, Debug)]
pub struct WPolyMap<C: Coeff = Q> {
    source: PolyCtx<C>,
    target: Grading,
    comps: Vec<WPoly<C>>,
}

impl<C: Coeff> PartialEq for WPolyMap<C> {
    /// Componentwise agreement on the jets both sides know.
    fn eq(&self, o: &Self) -> bool {
        self.source.grading == o.source.grading && self.target == o.target && self.comps == o.comps
    }
}

impl<C: Coeff> WPolyMap<C> {
    pub fn new(source: &PolyCtx<C>, target: Grading, comps: Vec<WPoly<C>>) -> Self {
        assert_eq!(target.n(), comps.len(), "component count");
        for c in &comps {
            assert_eq!(c.grading(), &source.grading, "component ring");
        }
        Self { source: source.clone(), target, comps }
    }

    /// Map into a space graded like the source.
    pub fn endo(source: &PolyCtx<C>, comps: Vec<WPoly<C>>) -> Self {
        Self::new(source, source.grading.clone(), comps)
    }

    pub fn identity(ctx: &PolyCtx<C>) -> Self {
        let comps = (0..ctx.n()).map(|i| WPoly::var(ctx, i)).collect();
        Self::endo(ctx, comps)
    }

    /// `x -> M x + b`.
    pub fn affine(ctx: &PolyCtx<C>, target: Grading, m: &Mat<C>, b: Option<&[C]>) -> Self {
        assert_eq!(m.cols(), ctx.n());
        assert_eq!(m.rows(), target.n());
        let comps = (0..m.rows())
            .map(|k| {
                let mut p = match b {
                    Some(b) => WPoly::constant_in(ctx, b[k].clone()),
                    None => WPoly::zero_in(ctx),
                };
                for j in 0..m.cols() {
                    p = p.add(&WPoly::monomial(ctx, unit_index(ctx.n(), j), m.get(k, j).clone()));
                }
                p
            })
            .collect();
        Self::new(ctx, target, comps)
    }

    pub fn source(&self) -> &PolyCtx<C> {
        &self.source
    }

    pub fn target(&self) -> &Grading {
        &self.target
    }

    pub fn comps(&self) -> &[WPoly<C>] {
        &self.comps
    }

    pub fn comp(&self, k: usize) -> &WPoly<C> {
        &self.comps[k]
    }

    pub fn into_comps(self) -> Vec<WPoly<C>> {
        self.comps
    }

    pub fn n_source(&self) -> usize {
        self.source.n()
    }

    pub fn n_target(&self) -> usize {
        self.target.n()
    }

    pub fn trunc(&self) -> i64 {
        self.comps.iter().map(|c| c.trunc()).min().unwrap_or(EXACT)
    }

    pub fn is_exact(&self) -> bool {
        self.comps.iter().all(|c| c.is_exact())
    }

    pub fn into_exact(self) -> Self {
        let comps = self.comps.into_iter().map(|c| c.into_exact()).collect();
        let mut source = self.source;
        source.cap = EXACT;
        Self { source, target: self.target, comps }
    }

    pub fn truncate(&self, n: i64) -> Self {
        Self { comps: self.comps.iter().map(|c| c.truncate(n)).collect(), ..self.clone() }
    }

    pub fn recap(&self, cap: i64) -> Self {
        Self {
            source: self.source.with_cap(cap),
            comps: self.comps.iter().map(|c| c.recap(cap)).collect(),
            target: self.target.clone(),
        }
    }

    pub fn eval(&self, x: &[C]) -> Vec<C> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.target, o.target);
        Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.target, o.target);
        Self { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> Self {
        Self { comps: self.comps.iter().map(|a| a.neg()).collect(), ..self.clone() }
    }

    /// `self ∘ inner`, certain up to weighted degree `target` of the inner source.
    pub fn compose_to(&self, inner: &WPolyMap<C>, target: i64) -> Result<WPolyMap<C>> {
        if inner.n_target() != self.n_source() {
            return Err(Error::Shape(format!(
                "composing a map of {} variables after a map with {} components",
                self.n_source(),
                inner.n_target()
            )));
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose_to(&inner.comps, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(WPolyMap::new(&inner.source, self.target.clone(), comps))
    }

    /// Composition after a map that fixes the origin.
    pub fn compose(&self, inner: &WPolyMap<C>, target: i64) -> Result<WPolyMap<C>> {
        for (k, p) in inner.comps.iter().enumerate() {
            if !p.constant_coeff().is_zero() {
                return Err(Error::Precondition(format!("inner map does not fix the origin (component {})", k + 1)));
            }
        }
        self.compose_to(inner, target)
    }

    /// Component `k` collects the monomials with `<α> = l + w'_k`.
    pub fn hom_part(&self, l: i64) -> Result<WPolyMap<C>> {
        let wmax = self.target.max_weight() as i64;
        if l < -wmax {
            return Err(Error::Precondition(format!("homogeneous degree {l} below -{wmax}")));
        }
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let d = l + self.target.w(k) as i64;
                if d < 0 {
                    Ok(WPoly::zero_in(&self.source.with_cap(EXACT)).recap(self.source.cap))
                } else {
                    c.hom_part(d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { comps, ..self.clone() })
    }

    pub fn weighted_order(&self) -> WOrder {
        let mut known: Option<i64> = None;
        let mut bound = EXACT;
        for (k, c) in self.comps.iter().enumerate() {
            let wk = self.target.w(k) as i64;
            if let Some(o) = c.ord() {
                known = Some(known.map_or(o - wk, |m: i64| m.min(o - wk)));
            }
            if !c.is_exact() {
                bound = bound.min(c.trunc() + 1 - wk);
            }
        }
        match known {
            Some(k) if k < bound => WOrder::Exact(k),
            _ => WOrder::AtLeast(bound),
        }
    }

    /// Entry `(k, i)` is `∂_i Θ_k`.
    pub fn jacobian(&self) -> Mat<WPoly<C>> {
        Mat::from_fn(self.n_target(), self.n_source(), |k, i| self.comps[k].deriv(i))
    }

    /// Coefficients of the degree-one monomials.
    pub fn linear_part(&self) -> Mat<C> {
        let n = self.n_source();
        Mat::from_fn(self.n_target(), n, |k, i| self.comps[k].coeff(&unit_index(n, i)))
    }

    pub fn constant_part(&self) -> Vec<C> {
        self.comps.iter().map(|c| c.constant_coeff()).collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, ctx: &PolyCtx<D>, f: impl Fn(&C) -> D) -> WPolyMap<D> {
        WPolyMap::new(ctx, self.target.clone(), self.comps.iter().map(|c| c.map_coeffs(ctx, &f)).collect())
    }

    pub fn with_target(self, target: Grading) -> Self {
        assert_eq!(target.n(), self.comps.len());
        Self { target, ..self }
    }
}

/// Inverts a map fixing the origin with invertible linear part, up to
/// weighted degree `target`.
pub fn invert_map<C: Coeff>(phi: &WPolyMap<C>, target: i64) -> Result<WPolyMap<C>> {
    let n = phi.n_source();
    if phi.n_target() != n {
        return Err(Error::Shape("inverting a non-square map".into()));
    }
    for (k, p) in phi.comps.iter().enumerate() {
        if !p.constant_coeff().is_zero() {
            return Err(Error::Precondition(format!("map does not fix the origin (component {})", k + 1)));
        }
    }
    let l = phi.linear_part();
    let linv = l.inverse().map_err(|_| Error::Singular("linear part of the map is not invertible".into()))?;
    let ctx = phi.source.with_cap(phi.source.cap.min(target));
    // output ring is graded like the target space of phi
    let octx = PolyCtx::new(phi.target.clone(), ctx.cap, ctx.inner.clone());
    let lin = WPolyMap::affine(&phi.source, phi.target.clone(), &l, None);
    let nonlin = phi.sub(&lin);
    let id = WPolyMap::identity(&octx);
    let linv_map = |v: &WPolyMap<C>| -> WPolyMap<C> {
        let comps = (0..n)
            .map(|k| {
                let mut acc = WPoly::zero_in(&octx);
                for j in 0..n {
                    acc = acc.add(&v.comps[j].scale_c(linv.get(k, j)));
                }
                acc
            })
            .collect();
        WPolyMap::new(&octx, phi.source.grading.clone(), comps)
    };
    let mut psi = linv_map(&id);
    let max_iter = if target >= EXACT { 64 } else { target + 2 };
    for _ in 0..=max_iter {
        let nl = nonlin.compose_to(&psi, target)?;
        let next = linv_map(&id.sub(&nl.with_target(phi.target.clone())));
        if next.comps.iter().zip(&psi.comps).all(|(a, b)| a.terms() == b.terms() && a.trunc() == b.trunc()) {
            return Ok(next);
        }
        psi = next;
    }
    Err(Error::Truncation("map inversion did not stabilize".into()))
}

/// Polynomial vector field `Σ a_j ∂_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<C: Coeff = Q> {
    comps: Vec<WPoly<C>>,
}

impl<C: Coeff> VectorField<C> {
    pub fn new(comps: Vec<WPoly<C>>) -> Self {
        if let Some(c) = comps.first() {
            assert_eq!(c.n(), comps.len(), "vector field arity");
        }
        Self { comps }
    }

    pub fn coordinate(ctx: &PolyCtx<C>, j: usize) -> Self {
        Self::new(
            (0..ctx.n())
                .map(|l| if l == j { WPoly::constant_q(ctx, &Q::from_integer(1.into())) } else { WPoly::zero_in(ctx) })
                .collect(),
        )
    }

    pub fn zero(ctx: &PolyCtx<C>) -> Self {
        Self::new((0..ctx.n()).map(|_| WPoly::zero_in(ctx)).collect())
    }

    pub fn n(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[WPoly<C>] {
        &self.comps
    }

    pub fn comp(&self, l: usize) -> &WPoly<C> {
        &self.comps[l]
    }

    pub fn ctx(&self) -> &PolyCtx<C> {
        self.comps[0].ctx()
    }

    pub fn grading(&self) -> &Grading {
        self.comps[0].grading()
    }

    pub fn trunc(&self) -> i64 {
        self.comps.iter().map(|c| c.trunc()).min().unwrap_or(EXACT)
    }

    pub fn is_exact(&self) -> bool {
        self.comps.iter().all(|c| c.is_exact())
    }

    pub fn truncate(&self, n: i64) -> Self {
        Self::new(self.comps.iter().map(|c| c.truncate(n)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.comps.iter().map(|a| a.scale(c)).collect())
    }

    pub fn scale_c(&self, c: &C) -> Self {
        Self::new(self.comps.iter().map(|a| a.scale_c(c)).collect())
    }

    pub fn mul_poly(&self, f: &WPoly<C>) -> Self {
        Self::new(self.comps.iter().map(|a| a.mul(f)).collect())
    }

    pub fn eval(&self, x: &[C]) -> Vec<C> {
        self.comps.iter().map(|c| c.eval(x)).collect()
    }

    /// `X f = Σ a_j ∂_j f`.
    pub fn apply(&self, f: &WPoly<C>) -> WPoly<C> {
        let mut acc = WPoly::zero_in(f.ctx()).with_trunc_claim(EXACT.min(f.ctx().cap));
        for (j, a) in self.comps.iter().enumerate() {
            acc = acc.add(&a.mul(&f.deriv(j)));
        }
        acc
    }

    /// Degree of the term `x^α ∂_l` is `<α> - w_l`.
    pub fn hom_part(&self, l: i64) -> Result<Self> {
        let g = self.grading().clone();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let d = l + g.w(k) as i64;
                if d < 0 {
                    Ok(WPoly::zero_in(&c.ctx().with_cap(EXACT)).recap(c.ctx().cap))
                } else {
                    c.hom_part(d)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(comps))
    }

    /// Largest degree up to which every homogeneous component is known.
    pub fn known_degree(&self) -> i64 {
        let g = self.grading();
        self.comps
            .iter()
            .enumerate()
            .map(|(k, c)| if c.is_exact() { EXACT } else { c.trunc() - g.w(k) as i64 })
            .min()
            .unwrap_or(EXACT)
    }

    /// Nonzero homogeneous components, keyed by degree.
    pub fn components(&self) -> BTreeMap<i64, Self> {
        let g = self.grading().clone();
        let mut degs: Vec<i64> = Vec::new();
        for (k, c) in self.comps.iter().enumerate() {
            for a in c.terms().keys() {
                degs.push(g.degree(a) as i64 - g.w(k) as i64);
            }
        }
        degs.sort_unstable();
        degs.dedup();
        degs.into_iter().map(|l| (l, self.hom_part(l).expect("stored degree is known"))).collect()
    }

    /// Least degree of a nonzero component.
    pub fn weight(&self) -> Option<i64> {
        self.components().keys().next().copied()
    }

    pub fn map_coeffs<D: Coeff>(&self, ctx: &PolyCtx<D>, f: impl Fn(&C) -> D) -> VectorField<D> {
        VectorField::new(self.comps.iter().map(|c| c.map_coeffs(ctx, &f)).collect())
    }

    pub fn as_map(&self) -> WPolyMap<C> {
        WPolyMap::endo(self.ctx(), self.comps.clone())
    }
}

pub fn lie_bracket<C: Coeff>(x: &VectorField<C>, y: &VectorField<C>) -> Result<VectorField<C>> {
    if x.n() != y.n() {
        return Err(Error::Shape(format!("bracket of fields in dimensions {} and {}", x.n(), y.n())));
    }
    let comps = (0..x.n()).map(|k| x.apply(&y.comps[k]).sub(&y.apply(&x.comps[k]))).collect();
    Ok(VectorField::new(comps))
}

impl VectorField<Q> {
    /// `δ_t^* X`: the component `x^α ∂_l` is multiplied by `t^{<α> - w_l}`.
    pub fn pullback_dilation(&self, t: &Q) -> Self {
        let g = self.grading().clone();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let terms = c.terms().iter().map(|(a, v)| {
                    let e = g.degree(a) as i64 - g.w(k) as i64;
                    let f = if e >= 0 { crate::scalar::q_pow(t, e as u32) } else { crate::scalar::q_pow(&t.recip(), (-e) as u32) };
                    (a.clone(), v * f)
                });
                WPoly::from_terms(c.ctx(), terms, c.trunc())
            })
            .collect();
        Self::new(comps)
    }
}

/// Flow `exp(Σ c_j X_j)(start)` at time one, as a jet in the variables of
/// `coeffs` and `start`, certain up to weighted degree `target`.
///
/// Picard iteration with an auxiliary time variable τ; stops at the fixpoint.
/// Each `c_j` must vanish at the origin.
pub fn flow_exp<C: Coeff>(
    fields: &[VectorField<C>],
    coeffs: &[WPoly<C>],
    start: &[WPoly<C>],
    target: i64,
    max_iter: Option<usize>,
) -> Result<Vec<WPoly<C>>> {
    if fields.len() != coeffs.len() {
        return Err(Error::Shape("one coefficient per field".into()));
    }
    let n = start.len();
    if fields.iter().any(|f| f.n() != n) {
        return Err(Error::Shape("field dimension differs from the start point".into()));
    }
    if coeffs.iter().any(|c| c.valuation() < 1) {
        return Err(Error::Precondition("flow coefficients must vanish at the origin".into()));
    }
    let vctx = start[0].ctx().clone();
    let nv = vctx.n();
    // τ has weight zero: truncation only sees the flow variables
    let jw: Vec<u32> = vctx.grading.weights().iter().copied().chain([0]).collect();
    let jctx = PolyCtx::new(Grading::new(jw), vctx.cap, vctx.inner.clone());
    let embed = |p: &WPoly<C>| -> WPoly<C> {
        let terms = p.terms().iter().map(|(a, c)| {
            let mut b = a.clone();
            b.push(0);
            (b, c.clone())
        });
        WPoly::from_terms(&jctx, terms, p.trunc())
    };
    let jstart: Vec<WPoly<C>> = start.iter().map(&embed).collect();
    let jcoeffs: Vec<WPoly<C>> = coeffs.iter().map(&embed).collect();
    let integrate = |p: &WPoly<C>| -> WPoly<C> {
        let terms = p.terms().iter().map(|(a, c)| {
            let mut b = a.clone();
            b[nv] += 1;
            let e = b[nv] as i64;
            (b, c.scale(&Q::new(1.into(), e.into())))
        });
        WPoly::from_terms(&jctx, terms, p.trunc())
    };
    let max_iter = max_iter.unwrap_or(if target >= EXACT { 64 } else { target as usize + 2 });
    let mut e = jstart.clone();
    for _ in 0..=max_iter {
        let mut next = Vec::with_capacity(n);
        for l in 0..n {
            let mut rhs = WPoly::zero_in(&jctx);
            for (x, c) in fields.iter().zip(&jcoeffs) {
                let xl = x.comp(l).compose_to(&e, target)?;
                rhs = rhs.add(&c.mul_to(&xl, target));
            }
            next.push(jstart[l].add(&integrate(&rhs)).truncate(target));
        }
        let done = next.iter().zip(&e).all(|(a, b)| a.terms() == b.terms() && a.trunc() == b.trunc());
        e = next;
        if done {
            let out: Vec<WPoly<C>> = e.iter().map(|p| eval_last_at_one(p, &vctx)).collect();
            return Ok(out);
        }
    }
    Err(Error::Truncation(format!("flow did not stabilize within {max_iter} iterations")))
}

fn eval_last_at_one<C: Coeff>(p: &WPoly<C>, vctx: &PolyCtx<C>) -> WPoly<C> {
    let nv = vctx.n();
    let terms = p.terms().iter().map(|(a, c)| (a[..nv].to_vec(), c.clone()));
    WPoly::from_terms(vctx, terms.collect::<Vec<_>>(), p.trunc())
}

/// Flow of `Σ x_j X_j` from the origin; the coefficients `x_j` are graded by `w`.
pub fn flow_exp_canonical<C: Coeff>(
    fields: &[VectorField<C>],
    w: &Grading,
    target: i64,
    inner: &C::Ctx,
) -> Result<WPolyMap<C>> {
    let ctx = PolyCtx::new(w.clone(), target, inner.clone());
    let n = fields.first().map_or(0, |f| f.n());
    let coeffs: Vec<WPoly<C>> = (0..fields.len()).map(|j| WPoly::var(&ctx, j)).collect();
    let start: Vec<WPoly<C>> = (0..n).map(|_| WPoly::zero_in(&ctx.with_cap(EXACT)).recap(target)).collect();
    let comps = flow_exp(fields, &coeffs, &start, target, None)?;
    let target_grading = fields[0].grading().clone();
    Ok(WPolyMap::new(&ctx, target_grading, comps))
}

/// `Θ̃` with `t^{-1}·Θ(x, t·y) = t^m Θ̃(x, y, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamRemainder<C: Coeff = Q> {
    pub m: i64,
    /// Number of parameter variables `x` leading the source.
    pub n_params: usize,
    /// Map in `(x, y, t)`, `t` of weight one.
    pub theta: WPolyMap<C>,
}

impl<C: Coeff> ParamRemainder<C> {
    /// `Θ̃` at `t = 0`, as a map in `(x, y)`.
    pub fn at_t_zero(&self, xy: &PolyCtx<C>) -> WPolyMap<C> {
        let nt = xy.n();
        let comps = self
            .theta
            .comps()
            .iter()
            .map(|c| {
                let terms = c.terms().iter().filter(|(a, _)| a[nt] == 0).map(|(a, v)| (a[..nt].to_vec(), v.clone()));
                WPoly::from_terms(xy, terms.collect::<Vec<_>>(), c.trunc())
            })
            .collect();
        WPolyMap::new(xy, self.theta.target().clone(), comps)
    }

    pub fn is_zero(&self) -> bool {
        self.theta.comps().iter().all(|c| c.is_zero())
    }
}

pub fn param_remainder<C: Coeff>(theta: &WPolyMap<C>, n_params: usize, m: i64) -> Result<ParamRemainder<C>> {
    let src = theta.source().clone();
    let g = src.grading.clone();
    let mut w: Vec<u32> = g.weights().to_vec();
    w.push(1);
    let octx = PolyCtx::new(Grading::new(w), EXACT, src.inner.clone());
    let mut comps = Vec::with_capacity(theta.n_target());
    for (k, c) in theta.comps().iter().enumerate() {
        let wk = theta.target().w(k) as i64;
        let mut terms: Vec<(MultiIndex, C)> = Vec::with_capacity(c.len());
        for (a, v) in c.terms() {
            let dy: i64 = a[n_params..].iter().zip(&g.weights()[n_params..]).map(|(&e, &wi)| (e * wi) as i64).sum();
            let e = dy - wk - m;
            if e < 0 {
                return Err(Error::Precondition(format!(
                    "order violation in component {} at monomial {:?}: t-exponent {}",
                    k + 1,
                    a,
                    dy - wk
                )));
            }
            let mut b = a.clone();
            b.push(e as u32);
            terms.push((b, v.clone()));
        }
        let t = if c.is_exact() { EXACT } else { c.trunc() - wk - m };
        comps.push(WPoly::from_terms(&octx, terms, t));
    }
    Ok(ParamRemainder { m, n_params, theta: WPolyMap::new(&octx, theta.target().clone(), comps) })
}

/// Joint polynomial in `(outer, inner)` variables from a polynomial with
/// polynomial coefficients.
pub fn flatten<C: Coeff>(p: &WPoly<WPoly<C>>) -> WPoly<C> {
    let outer = p.ctx();
    let inner = &outer.inner;
    let g = outer.grading.concat(&inner.grading);
    let mut trunc = p.trunc().min(inner.cap);
    for (a, c) in p.terms() {
        let da = outer.grading.degree(a) as i64;
        trunc = trunc.min(sat_add(da, c.trunc()));
    }
    let jctx = PolyCtx::new(g, EXACT, inner.inner.clone());
    let mut terms = Vec::new();
    for (a, c) in p.terms() {
        for (b, v) in c.terms() {
            let mut ab = a.clone();
            ab.extend_from_slice(b);
            terms.push((ab, v.clone()));
        }
    }
    WPoly::from_terms(&jctx, terms, trunc)
}

/// Inverse of [`flatten`]: the first `outer.n()` variables become the outer ones.
pub fn unflatten<C: Coeff>(p: &WPoly<C>, outer: &PolyCtx<WPoly<C>>) -> WPoly<WPoly<C>> {
    let no = outer.n();
    let ictx = &outer.inner;
    let mut groups: BTreeMap<MultiIndex, Vec<(MultiIndex, C)>> = BTreeMap::new();
    for (ab, v) in p.terms() {
        groups.entry(ab[..no].to_vec()).or_default().push((ab[no..].to_vec(), v.clone()));
    }
    let og = &outer.grading;
    let terms: Vec<(MultiIndex, WPoly<C>)> = groups
        .into_iter()
        .map(|(a, t)| {
            let ct = if p.is_exact() { EXACT } else { p.trunc() - og.degree(&a) as i64 };
            (a, WPoly::from_terms(ictx, t, ct))
        })
        .collect();
    WPoly::from_terms(outer, terms, p.trunc())
}

pub fn flatten_map<C: Coeff>(m: &WPolyMap<WPoly<C>>) -> WPolyMap<C> {
    let comps: Vec<WPoly<C>> = m.comps().iter().map(flatten).collect();
    let ctx = match comps.first() {
        Some(c) => c.ctx().clone(),
        None => {
            let o = m.source();
            PolyCtx::new(o.grading.concat(&o.inner.grading), EXACT, o.inner.inner.clone())
        }
    };
    WPolyMap::new(&ctx, m.target().clone(), comps)
}
