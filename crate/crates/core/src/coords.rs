//! Privileged, Carnot and ε-Carnot coordinates.
//!
//! Coordinate changes are stored recentred: `forward` is a jet in
//! `z = x - base` and `inverse` returns `z`, so both fix the origin.

use std::collections::BTreeMap;

use crate::carnot_structure::HFrame;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nilgroup::{GradedNilpotentAlgebra, NilpotentGroup};
use crate::report::Report;
use crate::scalar::{Coeff, Q};
use crate::weights::{MultiIndex, WeightSequence};
use crate::wpoly::{
    flatten_map, flow_exp_canonical, fmt_monomial, invert_map, PolyCtx, VectorField, WOrder, WPoly, WPolyMap, EXACT,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange<C: Coeff = Q> {
    pub base: Vec<C>,
    /// `z -> u`.
    pub forward: WPolyMap<C>,
    /// `u -> z`.
    pub inverse: WPolyMap<C>,
}

impl<C: Coeff> CoordinateChange<C> {
    pub fn identity(ctx: &PolyCtx<C>, base: Vec<C>) -> Self {
        let id = WPolyMap::identity(ctx);
        Self { base, forward: id.clone(), inverse: id }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let z: Vec<C> = x.iter().zip(&self.base).map(|(a, b)| a.sub(b)).collect();
        self.forward.eval(&z)
    }

    pub fn unapply(&self, u: &[C]) -> Vec<C> {
        self.inverse.eval(u).iter().zip(&self.base).map(|(z, b)| z.add(b)).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.forward.is_exact() && self.inverse.is_exact()
    }

    /// `next` after `self`; `next` must be based at the origin.
    pub fn then(&self, next: &CoordinateChange<C>, target: i64) -> Result<Self> {
        if !next.base.iter().all(|c| c.is_zero()) {
            return Err(Error::Precondition("the second change must be based at the origin".into()));
        }
        Ok(Self {
            base: self.base.clone(),
            forward: next.forward.compose(&self.forward, target)?,
            inverse: self.inverse.compose(&next.inverse, target)?,
        })
    }

    /// The forward map as a jet in the uncentred variable `x` of `xctx`.
    pub fn forward_in(&self, xctx: &PolyCtx<C>) -> Result<WPolyMap<C>> {
        let shift: Vec<WPoly<C>> = (0..self.n())
            .map(|i| WPoly::var(xctx, i).sub(&WPoly::constant_in(xctx, self.base[i].clone())))
            .collect();
        let comps = self.forward.comps().iter().map(|c| c.compose_to(&shift, EXACT)).collect::<Result<Vec<_>>>()?;
        Ok(WPolyMap::new(xctx, self.forward.target().clone(), comps))
    }

    /// `u -> base + inverse(u)` as a jet in the variables of `uctx`.
    pub fn inverse_in(&self, uctx: &PolyCtx<C>) -> Result<WPolyMap<C>> {
        let vars: Vec<WPoly<C>> = (0..self.n()).map(|i| WPoly::var(uctx, i)).collect();
        let comps = self
            .inverse
            .comps()
            .iter()
            .zip(&self.base)
            .map(|(c, b)| Ok(c.compose_to(&vars, EXACT)?.add(&WPoly::constant_in(uctx, b.clone()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(WPolyMap::new(uctx, self.inverse.target().clone(), comps))
    }
}

/// `x -> M(a)^{-1}(x - a)`: afterwards `X_j(0) = ∂_j`.
pub fn linearly_adapt<C: Coeff>(f: &HFrame<C>, a: &[C]) -> Result<CoordinateChange<C>> {
    let m = f.frame_matrix_at(a);
    let minv = m.inverse().map_err(|_| Error::Singular("frame matrix is not invertible at the point".into()))?;
    let ctx = f.ctx().with_cap(EXACT);
    let g = f.weights().grading();
    Ok(CoordinateChange {
        base: a.to_vec(),
        forward: WPolyMap::affine(&ctx, g.clone(), &minv, None),
        inverse: WPolyMap::affine(&ctx, g, &m, None),
    })
}

/// The frame in the coordinates `u`, based at `u = 0`, certain up to `cap`.
pub fn pushforward_frame<C: Coeff>(f: &HFrame<C>, chg: &CoordinateChange<C>, cap: i64) -> Result<HFrame<C>> {
    let n = f.n();
    let xs = f.centered_at(&chg.base, EXACT.min(f.ctx().cap))?;
    let psi = chg.inverse.comps();
    let moved: Vec<Vec<WPoly<C>>> = xs
        .iter()
        .map(|x| x.comps().iter().map(|c| c.compose_to(psi, cap)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let jac: Mat<WPoly<C>> = if chg.forward.is_exact() {
        let j = chg.forward.jacobian();
        let comp = (0..n * n)
            .map(|e| j.get(e / n, e % n).compose_to(psi, cap))
            .collect::<Result<Vec<_>>>()?;
        Mat::from_fn(n, n, |k, i| comp[k * n + i].clone())
    } else {
        if cap >= EXACT {
            return Err(Error::Truncation("pushing forward through a truncated change needs a finite cap".into()));
        }
        let j = chg.inverse.jacobian().map(|p| p.recap(cap));
        j.inverse().map_err(|_| Error::Singular("coordinate change is not invertible".into()))?
    };
    let fields: Vec<VectorField<C>> = moved.iter().map(|x| VectorField::new(jac.mul_vec(x))).collect();
    let zero = vec![C::zero(&f.ctx().inner); n];
    HFrame::new(f.weights().clone(), fields, zero)
}

fn frame_at_origin<C: Coeff>(f: &HFrame<C>) -> Result<Vec<VectorField<C>>> {
    f.centered(f.ctx().cap)
}

/// Linear adaptation and, per field, homogeneous components of degree
/// below `-w_j`. An empty report means privileged coordinates.
pub fn is_privileged<C: Coeff>(f: &HFrame<C>) -> Report {
    let mut rep = Report::new();
    let n = f.n();
    let xs = match frame_at_origin(f) {
        Ok(xs) => xs,
        Err(e) => {
            rep.push("frame", e.to_string());
            return rep;
        }
    };
    let inner = &f.ctx().inner;
    let zero = vec![C::zero(inner); n];
    for (j, x) in xs.iter().enumerate() {
        let v = x.eval(&zero);
        for (l, vl) in v.iter().enumerate() {
            let expect = if l == j { C::one(inner) } else { C::zero(inner) };
            if *vl != expect {
                rep.push("not_adapted", format!("X_{}(0) is not ∂_{}", j + 1, j + 1));
                break;
            }
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for (j, x) in xs.iter().enumerate() {
        let wj = f.weights().get(j) as i64;
        for (l, comp) in x.components() {
            if l >= -wj {
                break;
            }
            let (k, mono) = comp
                .comps()
                .iter()
                .enumerate()
                .find_map(|(k, c)| c.terms().keys().next().map(|a| (k, fmt_monomial(a, "x"))))
                .unwrap_or((0, String::new()));
            rep.push(
                "not_privileged",
                format!("X_{} has a component of degree {} < -{} ({} ∂_{})", j + 1, l, wj, mono, k + 1),
            );
        }
    }
    rep
}

/// Degree `-w_j` part of each `X_j`.
pub fn model_vector_fields<C: Coeff>(f: &HFrame<C>) -> Result<Vec<VectorField<C>>> {
    let rep = is_privileged(f);
    if !rep.is_ok() {
        return Err(Error::Precondition(format!("coordinates are not privileged: {}", rep.summary())));
    }
    let xs = frame_at_origin(f)?;
    xs.iter().enumerate().map(|(j, x)| x.hom_part(-(f.weights().get(j) as i64))).collect()
}

/// Privileged, and the model fields are the left-invariant frame of the
/// group of `alg`. An empty report means Carnot coordinates.
pub fn is_carnot<C: Coeff>(f: &HFrame<C>, alg: &GradedNilpotentAlgebra<C>) -> Report {
    let rep = is_privileged(f);
    if !rep.is_ok() {
        return rep;
    }
    let mut rep = Report::new();
    let model = match model_vector_fields(f) {
        Ok(m) => m,
        Err(e) => {
            rep.push("not_privileged", e.to_string());
            return rep;
        }
    };
    let xa = NilpotentGroup::new(alg.clone()).left_invariant_frame();
    for (j, (m, x)) in model.iter().zip(&xa).enumerate() {
        if m != x {
            rep.push("not_carnot", format!("model field of X_{} differs from the left-invariant field X_{}^a", j + 1, j + 1));
        }
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpMode {
    /// Inverse of `x -> exp(Σ x_j X_j)(a)`.
    Canonical,
    /// `x -> exp(Σ x_j X_j^{(a)})(0)` from the model fields of a privileged frame.
    Conversion,
}

pub fn exp_coordinates<C: Coeff>(f: &HFrame<C>, a: &[C], mode: ExpMode, trunc: i64) -> Result<CoordinateChange<C>> {
    let w = f.weights().grading();
    let inner = f.ctx().inner.clone();
    match mode {
        ExpMode::Canonical => {
            let xs = f.centered_at(a, EXACT.min(f.ctx().cap))?;
            let e = flow_exp_canonical(&xs, &w, trunc, &inner)?;
            let fwd = invert_map(&e, trunc)?;
            Ok(CoordinateChange { base: a.to_vec(), forward: fwd, inverse: e })
        }
        ExpMode::Conversion => {
            let model = model_vector_fields(&f.with_basepoint(a.to_vec())?)?;
            // every component is homogeneous of degree w_k <= r
            let r = f.weights().r() as i64;
            let phi = flow_exp_canonical(&model, &w, r, &inner)?.into_exact();
            let inv = invert_map(&phi, r)?.into_exact();
            Ok(CoordinateChange { base: a.to_vec(), forward: inv, inverse: phi })
        }
    }
}

/// Multi-indices with `|α| >= 2` and `<α> <= d`, by total degree then
/// lexicographically.
pub fn nonlinear_monomials(w: &[u32], d: u32) -> Vec<MultiIndex> {
    fn rec(w: &[u32], i: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if i == w.len() {
            if cur.iter().sum::<u32>() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        let mut e = 0;
        while e * w[i] <= left {
            cur[i] = e;
            rec(w, i + 1, left - e * w[i], cur, out);
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(w, 0, d, &mut vec![0; w.len()], &mut out);
    out.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| b.cmp(a)));
    out
}

/// `ε_a = ε̂ ∘ T` with `T(x) = M(a)^{-1}(x - a)` and
/// `ε̂_k(y) = y_k + Σ d_{kα} y^α` over `|α| >= 2`, `<α> <= w_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsCarnotMap<C: Coeff = Q> {
    pub base: Vec<C>,
    /// Frame matrix at the basepoint.
    pub m: Mat<C>,
    pub m_inv: Mat<C>,
    pub hat: WPolyMap<C>,
    pub hat_inv: WPolyMap<C>,
    pub d: BTreeMap<(usize, MultiIndex), C>,
    pub algebra: GradedNilpotentAlgebra<C>,
}

/// Builds the ε-Carnot map at `a`.
///
/// Carnot charts at `a` agree up to weighted order one, and canonical
/// coordinates of the first kind are Carnot. With `G = T ∘ exp(Σ u_j X_j)(a)`
/// the coefficients `d_k` are the unique solution of the linear system
/// `ε̂_k(G(u)) = u_k` modulo degree `w_k + 1`.
pub fn eps_carnot<C: Coeff>(f: &HFrame<C>, a: &[C]) -> Result<EpsCarnotMap<C>> {
    let n = f.n();
    let w = f.weights().clone();
    let inner = f.ctx().inner.clone();
    let m = f.frame_matrix_at(a);
    let m_inv = m.inverse().map_err(|_| Error::Singular("frame matrix is not invertible at the basepoint".into()))?;
    let algebra = f.tangent_algebra_at(a)?;
    let xs = f.centered_at(a, EXACT.min(f.ctx().cap))?;
    let r = w.r();
    let e = flow_exp_canonical(&xs, &w.grading(), r as i64, &inner)?;
    let uctx = e.source().clone();
    let g: Vec<WPoly<C>> = (0..n)
        .map(|k| {
            let mut acc = WPoly::zero_in(&uctx);
            for l in 0..n {
                acc = acc.add(&e.comp(l).scale_c(m_inv.get(k, l)));
            }
            acc
        })
        .collect();
    let yctx = PolyCtx::new(w.grading(), EXACT, inner.clone());
    let mut d = BTreeMap::new();
    let mut hat = Vec::with_capacity(n);
    for k in 0..n {
        let wk = w.get(k);
        let alphas = nonlinear_monomials(w.as_slice(), wk);
        let mut hk = WPoly::var(&yctx, k);
        if !alphas.is_empty() {
            let powers: Vec<WPoly<C>> = alphas
                .iter()
                .map(|al| {
                    let mut p = WPoly::constant_in(&uctx, C::one(&inner));
                    for (i, &ei) in al.iter().enumerate() {
                        for _ in 0..ei {
                            p = p.mul_to(&g[i], wk as i64);
                        }
                    }
                    p
                })
                .collect();
            let sys = Mat::from_fn(alphas.len(), alphas.len(), |b, c| powers[c].coeff(&alphas[b]));
            let rhs: Vec<C> = alphas.iter().map(|b| g[k].coeff(b).neg()).collect();
            let sol = sys.solve(&rhs).map_err(|e| Error::Internal(format!("ε-Carnot system for component {}: {e}", k + 1)))?;
            for (al, c) in alphas.into_iter().zip(sol) {
                if !c.is_zero() {
                    hk = hk.add(&WPoly::monomial(&yctx, al.clone(), c.clone()));
                    d.insert((k, al), c);
                }
            }
        }
        hat.push(hk);
    }
    let hat = WPolyMap::endo(&yctx, hat);
    let hat_inv = invert_map(&hat, EXACT)?;
    Ok(EpsCarnotMap { base: a.to_vec(), m, m_inv, hat, hat_inv, d, algebra })
}

impl<C: Coeff> EpsCarnotMap<C> {
    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        let z: Vec<C> = x.iter().zip(&self.base).map(|(a, b)| a.sub(b)).collect();
        self.hat.eval(&self.m_inv.mul_vec(&z))
    }

    pub fn apply_inverse(&self, u: &[C]) -> Vec<C> {
        self.m.mul_vec(&self.hat_inv.eval(u)).iter().zip(&self.base).map(|(z, b)| z.add(b)).collect()
    }

    /// `ε_a` as a coordinate change based at `a`.
    pub fn chart(&self) -> Result<CoordinateChange<C>> {
        let ctx = self.hat.source().clone();
        let g = ctx.grading.clone();
        let t = WPolyMap::affine(&ctx, g.clone(), &self.m_inv, None);
        let tinv = WPolyMap::affine(&ctx, g, &self.m, None);
        Ok(CoordinateChange {
            base: self.base.clone(),
            forward: self.hat.compose(&t, EXACT)?,
            inverse: tinv.compose(&self.hat_inv, EXACT)?,
        })
    }

    /// All `d_{kα}` are zero and `T` is the identity.
    pub fn is_trivial(&self) -> bool {
        let ctx = self.m.get(0, 0).ctx();
        self.d.is_empty() && self.m == Mat::identity(self.n(), &ctx)
    }
}

/// `R(x, y) = ε_y(x) - (-y)·x` and `ε_y^{-1}(x) - y·x` with their weighted
/// orders, for a frame already in Carnot coordinates at the origin.
#[derive(Clone, Debug)]
pub struct Osculation {
    pub residual: WPolyMap<Q>,
    pub order: WOrder,
    pub inverse_residual: WPolyMap<Q>,
    pub inverse_order: WOrder,
}

impl Osculation {
    pub fn is_ok(&self) -> bool {
        self.order.at_least(1) && self.inverse_order.at_least(1)
    }

    pub fn is_zero(&self) -> bool {
        self.residual.comps().iter().all(|c| c.is_zero()) && self.inverse_residual.comps().iter().all(|c| c.is_zero())
    }
}

/// Runs the ε-Carnot family at a symbolic basepoint `y`, as series in `y`
/// truncated at weighted degree `cap`.
pub fn osculation_residual(f: &HFrame<Q>, group: &NilpotentGroup<Q>, cap: i64) -> Result<Osculation> {
    let n = f.n();
    let w: WeightSequence = f.weights().clone();
    let rep = is_carnot(f, group.algebra());
    if !rep.is_ok() {
        return Err(Error::Precondition(format!("frame is not in Carnot coordinates: {}", rep.summary())));
    }
    let fc = HFrame::new(w.clone(), frame_at_origin(f)?, vec![Q::from_integer(0.into()); n])?;
    if !fc.is_exact() {
        return Err(Error::Truncation("osculation needs an exact frame".into()));
    }
    let yctx: PolyCtx<Q> = PolyCtx::new(w.grading(), cap, ());
    let octx: PolyCtx<WPoly<Q>> = PolyCtx::new(w.grading(), EXACT, yctx.clone());
    let ys: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&yctx, i)).collect();
    let fy = fc.map_coeffs(&octx, |c| WPoly::constant_q(&yctx, c), ys.clone());
    let eps = eps_carnot(&fy, &ys)?;
    let chart = eps.chart()?;
    let fam = flatten_map(&chart.forward_in(&octx)?);
    let inv_fam = flatten_map(&chart.inverse_in(&octx)?);
    let jctx = fam.source().clone();
    let xj: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&jctx, i)).collect();
    let yj: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&jctx, n + i)).collect();
    let law = group.product_jet();
    let mut neg_y_x: Vec<WPoly<Q>> = yj.iter().map(|p| p.neg()).collect();
    neg_y_x.extend(xj.iter().cloned());
    let mut y_x = yj.clone();
    y_x.extend(xj.iter().cloned());
    let p1 = WPolyMap::new(&jctx, w.grading(), law.comps().iter().map(|c| c.compose_to(&neg_y_x, EXACT)).collect::<Result<_>>()?);
    let p2 = WPolyMap::new(&jctx, w.grading(), law.comps().iter().map(|c| c.compose_to(&y_x, EXACT)).collect::<Result<_>>()?);
    let residual = fam.sub(&p1);
    let inverse_residual = inv_fam.sub(&p2);
    Ok(Osculation {
        order: residual.weighted_order(),
        inverse_order: inverse_residual.weighted_order(),
        residual,
        inverse_residual,
    })
}

/// The ε-Carnot maps at the symbolic basepoints `p0 + p`, jointly in
/// `(p, ξ)` with the parameters first and `ξ = x - p0`.
#[derive(Clone, Debug)]
pub struct EpsFamily {
    pub p0: Vec<Q>,
    /// `(p, ξ) -> ε_{p0+p}(p0 + ξ)`.
    pub forward: WPolyMap<Q>,
    /// `(p, v) -> ε_{p0+p}^{-1}(v) - p0`.
    pub inverse: WPolyMap<Q>,
}

impl EpsFamily {
    pub fn n(&self) -> usize {
        self.p0.len()
    }

    /// Joint ring of `(p, ξ)`.
    pub fn ctx(&self) -> &PolyCtx<Q> {
        self.forward.source()
    }
}

/// Series in `p` are truncated at weighted degree `cap`.
pub fn eps_family(f: &HFrame<Q>, p0: &[Q], cap: i64) -> Result<EpsFamily> {
    let n = f.n();
    if !f.is_exact() {
        return Err(Error::Truncation("an ε-family needs an exact frame".into()));
    }
    let g = f.weights().grading();
    let yctx: PolyCtx<Q> = PolyCtx::new(g.clone(), cap, ());
    let octx: PolyCtx<WPoly<Q>> = PolyCtx::new(g.clone(), EXACT, yctx.clone());
    let b: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&yctx, i).add(&WPoly::constant_q(&yctx, &p0[i]))).collect();
    let fy = f.map_coeffs(&octx, |c| WPoly::constant_q(&yctx, c), b.clone());
    let chart = eps_carnot(&fy, &b)?.chart()?;
    // flattened maps live in (z, p); move p to the front
    let fwd = flatten_map(&chart.forward);
    let inv = flatten_map(&chart.inverse);
    let jctx = PolyCtx::new(g.concat(&g), EXACT, ());
    let pv: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&jctx, i)).collect();
    let xv: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&jctx, n + i)).collect();
    let mut sub_f: Vec<WPoly<Q>> = (0..n).map(|i| xv[i].sub(&pv[i])).collect();
    sub_f.extend(pv.iter().cloned());
    let mut sub_i: Vec<WPoly<Q>> = xv.clone();
    sub_i.extend(pv.iter().cloned());
    let forward = WPolyMap::new(&jctx, g.clone(), fwd.comps().iter().map(|c| c.compose_to(&sub_f, EXACT)).collect::<Result<_>>()?);
    let inverse = WPolyMap::new(
        &jctx,
        g,
        inv.comps().iter().zip(&pv).map(|(c, p)| Ok(c.compose_to(&sub_i, EXACT)?.add(p))).collect::<Result<_>>()?,
    );
    Ok(EpsFamily { p0: p0.to_vec(), forward, inverse })
}

/// ε-Carnot chart at the basepoint and the frame pushed into it.
pub fn carnot_chart(f: &HFrame<Q>) -> Result<(EpsCarnotMap<Q>, HFrame<Q>)> {
    let eps = eps_carnot(f, f.basepoint())?;
    let pushed = pushforward_frame(f, &eps.chart()?, EXACT)?;
    Ok((eps, pushed))
}

#[cfg(test)]
mod tests;
