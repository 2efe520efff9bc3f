//! The tangent groupoid of a Carnot manifold: elements, H-charts, transition
//! maps, multiplication and inversion on both strata.
//!
//! Elements of the `t = 0` stratum carry `ξ` in the coordinates of the
//! tangent group built from the reference frame.

use crate::carnot_map::{carnot_differential, fit_slope, frame_decompose, CarnotMapJet};
use crate::carnot_structure::HFrame;
use crate::coords::{eps_carnot, eps_family, pushforward_frame, CoordinateChange, EpsCarnotMap};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nilgroup::NilpotentGroup;
use crate::report::Report;
use crate::scalar::{fmt_q, q_to_f64, Q};
use crate::weights::{dilate_inv_q, dilate_q};
use crate::wpoly::{param_remainder, ParamRemainder, PolyCtx, WPoly, WPolyMap, EXACT};
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub enum GroupoidElement {
    Pair { x: Vec<Q>, y: Vec<Q>, t: Q },
    Tangent { x: Vec<Q>, xi: Vec<Q> },
}

impl GroupoidElement {
    pub fn pair(x: Vec<Q>, y: Vec<Q>, t: Q) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::Precondition("pair elements need t != 0".into()));
        }
        if x.len() != y.len() {
            return Err(Error::Shape("points of different dimension".into()));
        }
        Ok(Self::Pair { x, y, t })
    }

    pub fn unit(x: Vec<Q>, t: Q) -> Self {
        if t.is_zero() {
            let n = x.len();
            Self::Tangent { x, xi: vec![Q::zero(); n] }
        } else {
            Self::Pair { y: x.clone(), x, t }
        }
    }

    pub fn t(&self) -> Q {
        match self {
            Self::Pair { t, .. } => t.clone(),
            Self::Tangent { .. } => Q::zero(),
        }
    }

    /// `r(g)` as a point of `M × R`.
    pub fn range(&self) -> (Vec<Q>, Q) {
        match self {
            Self::Pair { x, t, .. } => (x.clone(), t.clone()),
            Self::Tangent { x, .. } => (x.clone(), Q::zero()),
        }
    }

    /// `s(g)` as a point of `M × R`.
    pub fn source(&self) -> (Vec<Q>, Q) {
        match self {
            Self::Pair { y, t, .. } => (y.clone(), t.clone()),
            Self::Tangent { x, .. } => (x.clone(), Q::zero()),
        }
    }

    pub fn describe(&self) -> String {
        let p = |v: &[Q]| format!("({})", v.iter().map(fmt_q).collect::<Vec<_>>().join(","));
        match self {
            Self::Pair { x, y, t } => format!("pair x={} y={} t={}", p(x), p(y), fmt_q(t)),
            Self::Tangent { x, xi } => format!("tangent x={} xi={}", p(x), p(xi)),
        }
    }
}

/// `g1 · g2`, with `s(g1) = r(g2)`; the `t = 0` product is taken in the
/// tangent group of `frame` at `x`.
pub fn compose_elements(frame: &HFrame<Q>, g1: &GroupoidElement, g2: &GroupoidElement) -> Result<GroupoidElement> {
    match (g1, g2) {
        (GroupoidElement::Pair { x, y, t }, GroupoidElement::Pair { x: y2, y: z, t: t2 }) => {
            if t != t2 {
                return Err(Error::Precondition(format!("not composable: t = {} and t = {}", fmt_q(t), fmt_q(t2))));
            }
            if y != y2 {
                return Err(Error::Precondition("not composable: source of the first is not the range of the second".into()));
            }
            Ok(GroupoidElement::Pair { x: x.clone(), y: z.clone(), t: t.clone() })
        }
        (GroupoidElement::Tangent { x, xi }, GroupoidElement::Tangent { x: x2, xi: eta }) => {
            if x != x2 {
                return Err(Error::Precondition("not composable: different basepoints".into()));
            }
            let g = NilpotentGroup::new(frame.tangent_algebra_at(x)?);
            Ok(GroupoidElement::Tangent { x: x.clone(), xi: g.mul(xi, eta) })
        }
        _ => Err(Error::Precondition("not composable: elements lie in different strata".into())),
    }
}

pub fn invert_element(g: &GroupoidElement) -> GroupoidElement {
    match g {
        GroupoidElement::Pair { x, y, t } => GroupoidElement::Pair { x: y.clone(), y: x.clone(), t: t.clone() },
        GroupoidElement::Tangent { x, xi } => GroupoidElement::Tangent { x: x.clone(), xi: xi.iter().map(|c| -c.clone()).collect() },
    }
}

/// Chart coordinates `(x, y, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub x: Vec<Q>,
    pub y: Vec<Q>,
    pub t: Q,
}

impl ChartPoint {
    pub fn new(x: Vec<Q>, y: Vec<Q>, t: Q) -> Self {
        Self { x, y, t }
    }
}

/// An H-chart: a polynomial coordinate map `κ` with polynomial inverse and
/// the H-frame used on it.
#[derive(Clone, Debug)]
pub struct GroupoidChart {
    pub name: String,
    /// Frame defining the tangent groups of the stratum `t = 0`.
    pub reference: HFrame<Q>,
    /// Frame of the chart, before `κ`.
    pub frame: HFrame<Q>,
    pub kappa: CoordinateChange<Q>,
    /// `frame` in the chart coordinates.
    pub frame_k: HFrame<Q>,
    jet: CarnotMapJet,
}

fn domain(e: Error) -> Error {
    match e {
        Error::Singular(m) => Error::Domain(m),
        e => e,
    }
}

impl GroupoidChart {
    pub fn new(name: &str, reference: HFrame<Q>, frame: HFrame<Q>, kappa: CoordinateChange<Q>) -> Result<Self> {
        let n = reference.n();
        if frame.n() != n || kappa.n() != n || frame.weights() != reference.weights() {
            return Err(Error::Shape("chart frame, reference frame and κ must share dimension and weights".into()));
        }
        if !kappa.base.iter().all(|c| c.is_zero()) || !kappa.is_exact() {
            return Err(Error::Precondition("κ must be a polynomial map with polynomial inverse".into()));
        }
        let ctx = kappa.forward.source().clone();
        let id = WPolyMap::identity(&ctx);
        if kappa.forward.compose_to(&kappa.inverse, EXACT)? != id {
            return Err(Error::Precondition("κ inverse does not invert κ".into()));
        }
        let frame_k = pushforward_frame(&frame, &kappa, EXACT)?;
        let jet = CarnotMapJet::new(reference.clone(), frame_k.clone(), kappa.forward.clone(), vec![Q::zero(); n])?;
        let (_, rep) = frame_decompose(&jet)?;
        if !rep.is_ok() {
            return Err(Error::Precondition(format!("chart frame does not span the filtration of the reference frame: {}", rep.summary())));
        }
        Ok(Self { name: name.into(), reference, frame, kappa, frame_k, jet })
    }

    /// `κ = id`, the chart frame equal to the reference frame.
    pub fn identity(name: &str, frame: &HFrame<Q>) -> Result<Self> {
        let ctx = PolyCtx::new(frame.weights().grading(), EXACT, ());
        let kappa = CoordinateChange::identity(&ctx, vec![Q::zero(); frame.n()]);
        Self::new(name, frame.clone(), frame.clone(), kappa)
    }

    pub fn n(&self) -> usize {
        self.reference.n()
    }

    pub fn weights(&self) -> &[u32] {
        self.reference.weights().as_slice()
    }

    pub fn kappa(&self, x: &[Q]) -> Vec<Q> {
        self.kappa.apply(x)
    }

    pub fn kappa_inv(&self, u: &[Q]) -> Vec<Q> {
        self.kappa.unapply(u)
    }

    /// ε-Carnot map of the chart frame at `u`.
    pub fn eps_at(&self, u: &[Q]) -> Result<EpsCarnotMap<Q>> {
        eps_carnot(&self.frame_k, u).map_err(domain)
    }

    /// `κ̂'(x)`: from the tangent group of the reference frame at `x` to that
    /// of the chart frame at `κ(x)`.
    pub fn differential_at(&self, x: &[Q]) -> Result<Mat<Q>> {
        Ok(carnot_differential(&self.jet.with_base(x.to_vec())?).map_err(domain)?.matrix)
    }

    /// Product of the tangent group of the chart frame at `u`.
    pub fn fiber_group(&self, u: &[Q]) -> Result<NilpotentGroup<Q>> {
        Ok(NilpotentGroup::new(self.frame_k.tangent_algebra_at(u).map_err(domain)?))
    }

    pub fn chart_coords(&self, g: &GroupoidElement) -> Result<ChartPoint> {
        match g {
            GroupoidElement::Pair { x, y, t } => {
                let u = self.kappa(x);
                let v = self.eps_at(&u)?.apply(&self.kappa(y));
                Ok(ChartPoint::new(u, dilate_inv_q(t, &v, self.weights()), t.clone()))
            }
            GroupoidElement::Tangent { x, xi } => {
                let d = self.differential_at(x)?;
                Ok(ChartPoint::new(self.kappa(x), d.mul_vec(xi), Q::zero()))
            }
        }
    }

    pub fn chart_inverse(&self, p: &ChartPoint) -> Result<GroupoidElement> {
        let x = self.kappa_inv(&p.x);
        if p.t.is_zero() {
            let d = self.differential_at(&x)?;
            let dinv = d.inverse().map_err(|_| Error::Domain("chart differential is not invertible".into()))?;
            return Ok(GroupoidElement::Tangent { xi: dinv.mul_vec(&p.y), x });
        }
        let v = dilate_q(&p.t, &p.y, self.weights());
        let y = self.kappa_inv(&self.eps_at(&p.x)?.apply_inverse(&v));
        Ok(GroupoidElement::Pair { x, y, t: p.t.clone() })
    }

    /// Product of `(x, y, t)` and the element with chart coordinates
    /// `(ε_x^{-1}(t·y), z, t)`; returns its fibre coordinate.
    pub fn chart_mult(&self, x: &[Q], y: &[Q], z: &[Q], t: &Q) -> Result<Vec<Q>> {
        if t.is_zero() {
            return Ok(self.fiber_group(x)?.mul(y, z));
        }
        let w = self.weights();
        let ex = self.eps_at(x)?;
        let x2 = ex.apply_inverse(&dilate_q(t, y, w));
        let p = self.eps_at(&x2)?.apply_inverse(&dilate_q(t, z, w));
        Ok(dilate_inv_q(t, &ex.apply(&p), w))
    }

    /// Chart coordinates of the inverse of `(x, y, t)`.
    pub fn chart_invert(&self, x: &[Q], y: &[Q], t: &Q) -> Result<ChartPoint> {
        if t.is_zero() {
            return Ok(ChartPoint::new(x.to_vec(), y.iter().map(|c| -c.clone()).collect(), Q::zero()));
        }
        let w = self.weights();
        let x2 = self.eps_at(x)?.apply_inverse(&dilate_q(t, y, w));
        let v = self.eps_at(&x2)?.apply(x);
        Ok(ChartPoint::new(x2, dilate_inv_q(t, &v, w), t.clone()))
    }

    /// The composite `κ_2 ∘ κ^{-1}` between chart coordinates.
    pub fn change_to(&self, other: &GroupoidChart) -> Result<WPolyMap<Q>> {
        other.kappa.forward.compose_to(&self.kappa.inverse, EXACT)
    }
}

/// `γ_2 ∘ γ_1^{-1}`.
pub fn transition(c1: &GroupoidChart, c2: &GroupoidChart, p: &ChartPoint) -> Result<ChartPoint> {
    c2.chart_coords(&c1.chart_inverse(p)?)
}

/// A rescaled chart operation `F(x, y, t)` written as
/// `at_zero(x, y) + t Θ(x, y, t)`, with `Θ` a jet in `(x, y, t)`.
#[derive(Clone, Debug)]
pub struct Remainder {
    pub at_zero: WPolyMap<Q>,
    pub theta: WPolyMap<Q>,
}

impl Remainder {
    fn from_param(pr: &ParamRemainder<Q>, xy: &PolyCtx<Q>) -> Self {
        let at_zero = pr.at_t_zero(xy);
        let nt = xy.n();
        let tctx = pr.theta.source().clone();
        let comps = pr
            .theta
            .comps()
            .iter()
            .map(|c| {
                let terms = c.terms().iter().filter(|(a, _)| a[nt] > 0).map(|(a, v)| {
                    let mut b = a.clone();
                    b[nt] -= 1;
                    (b, v.clone())
                });
                let tr = if c.is_exact() { EXACT } else { c.trunc() - 1 };
                WPoly::from_terms(&tctx, terms.collect::<Vec<_>>(), tr)
            })
            .collect();
        Self { at_zero, theta: WPolyMap::new(&tctx, pr.theta.target().clone(), comps) }
    }

    pub fn theta_is_zero(&self) -> bool {
        self.theta.comps().iter().all(|c| c.is_zero())
    }

    /// `at_zero + t Θ` at a point.
    pub fn eval(&self, x: &[Q], y: &[Q], t: &Q) -> Vec<Q> {
        let mut xy = x.to_vec();
        xy.extend_from_slice(y);
        let a = self.at_zero.eval(&xy);
        xy.push(t.clone());
        a.iter().zip(self.theta.eval(&xy)).map(|(a, b)| a.clone() + t.clone() * b).collect()
    }
}

fn joint_ctx(w: &[u32], blocks: usize) -> PolyCtx<Q> {
    let ws: Vec<u32> = (0..blocks).flat_map(|_| w.iter().copied()).collect();
    PolyCtx::new(crate::weights::Grading::new(ws), EXACT, ())
}

fn vars(ctx: &PolyCtx<Q>, block: usize, n: usize) -> Vec<WPoly<Q>> {
    (0..n).map(|i| WPoly::var(ctx, block * n + i)).collect()
}

fn subst(m: &WPolyMap<Q>, args: &[WPoly<Q>]) -> Result<Vec<WPoly<Q>>> {
    m.comps().iter().map(|c| c.compose_to(args, EXACT)).collect()
}

fn cat(a: &[WPoly<Q>], b: &[WPoly<Q>]) -> Vec<WPoly<Q>> {
    a.iter().chain(b).cloned().collect()
}

/// Fibre part of the transition `γ_2 ∘ γ_1^{-1}` near `x = 0`, as series in
/// `x` truncated at `cap`.
pub fn transition_remainder(c1: &GroupoidChart, c2: &GroupoidChart, cap: i64) -> Result<Remainder> {
    let n = c1.n();
    let w = c1.weights().to_vec();
    let phi = c1.change_to(c2)?;
    let zero = vec![Q::zero(); n];
    let p0 = phi.eval(&zero);
    let f1 = eps_family(&c1.frame_k, &zero, cap)?;
    let f2 = eps_family(&c2.frame_k, &p0, cap)?;
    let jc = joint_ctx(&w, 2);
    let (u, v) = (vars(&jc, 0, n), vars(&jc, 1, n));
    let shift = |p: Vec<WPoly<Q>>| -> Vec<WPoly<Q>> { p.iter().zip(&p0).map(|(c, a)| c.sub(&WPoly::constant_q(&jc, a))).collect() };
    let a = subst(&f1.inverse, &cat(&u, &v))?;
    let b = shift(subst(&phi, &a)?);
    let pu = shift(subst(&phi, &u)?);
    let res = WPolyMap::new(&jc, f2.forward.target().clone(), subst(&f2.forward, &cat(&pu, &b))?);
    let pr = param_remainder(&res, n, 0)?;
    Ok(Remainder::from_param(&pr, &jc))
}

/// Fibre part of `chart_mult` near `x = 0`, in `(x, y, z, t)`.
pub fn mult_remainder(c: &GroupoidChart, cap: i64) -> Result<Remainder> {
    let n = c.n();
    let w = c.weights().to_vec();
    let f = eps_family(&c.frame_k, &vec![Q::zero(); n], cap)?;
    let jc = joint_ctx(&w, 3);
    let (x, y, z) = (vars(&jc, 0, n), vars(&jc, 1, n), vars(&jc, 2, n));
    let x2 = subst(&f.inverse, &cat(&x, &y))?;
    let p = subst(&f.inverse, &cat(&x2, &z))?;
    let res = WPolyMap::new(&jc, f.forward.target().clone(), subst(&f.forward, &cat(&x, &p))?);
    let pr = param_remainder(&res, n, 0)?;
    Ok(Remainder::from_param(&pr, &jc))
}

/// Fibre part of `chart_invert` near `x = 0`, in `(x, y, t)`.
pub fn invert_remainder(c: &GroupoidChart, cap: i64) -> Result<Remainder> {
    let n = c.n();
    let w = c.weights().to_vec();
    let f = eps_family(&c.frame_k, &vec![Q::zero(); n], cap)?;
    let jc = joint_ctx(&w, 2);
    let (x, y) = (vars(&jc, 0, n), vars(&jc, 1, n));
    let x2 = subst(&f.inverse, &cat(&x, &y))?;
    let res = WPolyMap::new(&jc, f.forward.target().clone(), subst(&f.forward, &cat(&x2, &x))?);
    let pr = param_remainder(&res, n, 0)?;
    Ok(Remainder::from_param(&pr, &jc))
}

/// Fitted exponent of `|F(t) - F(0)|` over `t = 2^{-3}, ..., 2^{-10}`;
/// `None` when the difference vanishes identically.
pub fn remainder_slope(f: impl Fn(&Q) -> Result<Vec<Q>>) -> Result<Option<f64>> {
    let base = f(&Q::zero())?;
    let mut ts = Vec::new();
    let mut errs = Vec::new();
    for k in 3..=10u32 {
        let t = Q::new(1.into(), (1i64 << k).into());
        let v = f(&t)?;
        let e = v.iter().zip(&base).fold(0.0f64, |acc, (a, b)| acc.max(q_to_f64(&(a.clone() - b)).abs()));
        ts.push(q_to_f64(&t));
        errs.push(e);
    }
    if errs.iter().all(|&e| e == 0.0) {
        return Ok(None);
    }
    Ok(fit_slope(&ts, &errs))
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub converged: bool,
    /// Limit basepoint in the coordinates of `M`.
    pub x: Vec<Q>,
    /// Limit in the tangent group of the reference frame.
    pub xi: Option<Vec<Q>>,
    /// Rescaled chart coordinates along the sequence.
    pub rescaled: Vec<Vec<f64>>,
    pub diagnostics: String,
}

fn neville_q(ts: &[Q], vs: &[Q]) -> Q {
    let mut p = vs.to_vec();
    let k = ts.len();
    for m in 1..k {
        for i in 0..k - m {
            p[i] = (ts[i + m].clone() * &p[i] - ts[i].clone() * &p[i + 1]) / (ts[i + m].clone() - &ts[i]);
        }
    }
    p[0].clone()
}

fn extrapolate(ts: &[Q], pts: &[Vec<Q>]) -> Vec<Q> {
    (0..pts[0].len()).map(|k| neville_q(ts, &pts.iter().map(|p| p[k].clone()).collect::<Vec<_>>())).collect()
}

/// Decides whether pairs `(x_l, y_l, t_l)` with `t_l -> 0` converge to an
/// element of the `t = 0` stratum, and reports the limit.
pub fn convergence_probe(c: &GroupoidChart, seq: &[(Vec<Q>, Vec<Q>, Q)]) -> Result<ProbeResult> {
    if seq.len() < 4 {
        return Err(Error::Precondition("a probe needs at least four terms".into()));
    }
    if seq.iter().any(|s| s.2 <= Q::zero()) || seq.windows(2).any(|p| p[1].2 >= p[0].2) {
        return Err(Error::Precondition("t must be positive and strictly decreasing".into()));
    }
    let mut us = Vec::with_capacity(seq.len());
    let mut vs = Vec::with_capacity(seq.len());
    for (x, y, t) in seq {
        let p = c.chart_coords(&GroupoidElement::pair(x.clone(), y.clone(), t.clone())?)?;
        us.push(p.x);
        vs.push(p.y);
    }
    let ts: Vec<Q> = seq.iter().map(|s| s.2.clone()).collect();
    let rescaled: Vec<Vec<f64>> = vs.iter().map(|v| v.iter().map(q_to_f64).collect()).collect();
    let norms: Vec<f64> = rescaled.iter().map(|v| v.iter().fold(0.0f64, |a, b| a.max(b.abs()))).collect();
    let tf: Vec<f64> = ts.iter().map(q_to_f64).collect();
    let tail = seq.len() / 2;
    if norms[tail..].iter().all(|&m| m > 0.0) {
        if let Some(s) = fit_slope(&tf[tail..], &norms[tail..]) {
            if s < -0.25 {
                let x = c.kappa_inv(&extrapolate(&ts, &us));
                return Ok(ProbeResult {
                    converged: false,
                    x,
                    xi: None,
                    rescaled,
                    diagnostics: format!("rescaled coordinates grow like t^{s:.3}"),
                });
            }
        }
    }
    let u = extrapolate(&ts, &us);
    let v = extrapolate(&ts, &vs);
    let k = seq.len() - 1;
    let v_prev = extrapolate(&ts[..k], &vs[..k]);
    let gap = v.iter().zip(&v_prev).fold(0.0f64, |a, (p, q)| a.max(q_to_f64(&(p.clone() - q)).abs()));
    let x = c.kappa_inv(&u);
    let converged = gap <= 1e-9 * (1.0 + v.iter().fold(0.0f64, |a, b| a.max(q_to_f64(b).abs())));
    if !converged {
        return Ok(ProbeResult { converged, x, xi: None, rescaled, diagnostics: format!("extrapolated limits differ by {gap:e}") });
    }
    let d = c.differential_at(&x)?;
    let dinv = d.inverse().map_err(|_| Error::Domain("chart differential is not invertible".into()))?;
    let diagnostics = if gap == 0.0 { "limit is exact".into() } else { format!("extrapolation gap {gap:e}") };
    Ok(ProbeResult { converged, xi: Some(dinv.mul_vec(&v)), x, rescaled, diagnostics })
}

/// `t_l = 4^{-l}` for `l = 1..=len`.
pub fn probe_times(len: usize) -> Vec<Q> {
    (1..=len).map(|l| Q::new(1.into(), num_bigint::BigInt::from(4).pow(l as u32))).collect()
}

/// The groupoid morphism induced by a Carnot manifold map.
pub fn morphism_apply(m: &CarnotMapJet, g: &GroupoidElement) -> Result<GroupoidElement> {
    match g {
        GroupoidElement::Pair { x, y, t } => Ok(GroupoidElement::Pair { x: m.apply(x), y: m.apply(y), t: t.clone() }),
        GroupoidElement::Tangent { x, xi } => {
            let d = carnot_differential(&m.with_base(x.clone())?)?;
            Ok(GroupoidElement::Tangent { x: m.apply(x), xi: d.apply(xi) })
        }
    }
}

/// Unit, inverse and associativity laws on both strata, chart round trips,
/// and the same laws through the chart operations.
pub fn axioms_report(c: &GroupoidChart, points: &[Vec<Q>], fibres: &[Vec<Q>], ts: &[Q]) -> Result<Report> {
    let mut rep = Report::new();
    let f = &c.reference;
    let mut checked = 0usize;
    for x in points {
        for t in ts {
            let u = GroupoidElement::unit(x.clone(), t.clone());
            let elems: Vec<GroupoidElement> = if t.is_zero() {
                fibres.iter().map(|xi| GroupoidElement::Tangent { x: x.clone(), xi: xi.clone() }).collect()
            } else {
                points.iter().map(|y| GroupoidElement::Pair { x: x.clone(), y: y.clone(), t: t.clone() }).collect()
            };
            for g in &elems {
                checked += 1;
                let (sx, st) = g.source();
                let us = GroupoidElement::unit(sx, st);
                if compose_elements(f, &u, g)? != *g || compose_elements(f, g, &us)? != *g {
                    rep.push("unit", format!("unit law fails at {}", g.describe()));
                }
                let gi = invert_element(g);
                if compose_elements(f, g, &gi)? != u || invert_element(&gi) != *g {
                    rep.push("inverse", format!("inverse law fails at {}", g.describe()));
                }
                let p = c.chart_coords(g)?;
                if c.chart_inverse(&p)? != *g {
                    rep.push("round_trip", format!("chart round trip fails at {}", g.describe()));
                }
                let inv = c.chart_invert(&p.x, &p.y, &p.t)?;
                if inv != c.chart_coords(&gi)? {
                    rep.push("chart_invert", format!("chart inversion disagrees at {}", g.describe()));
                }
                for h in &elems {
                    let h = match (g, h) {
                        (GroupoidElement::Pair { y, .. }, GroupoidElement::Pair { y: z, t, .. }) => {
                            GroupoidElement::Pair { x: y.clone(), y: z.clone(), t: t.clone() }
                        }
                        _ => h.clone(),
                    };
                    let gh = compose_elements(f, g, &h)?;
                    let q = c.chart_coords(&h)?;
                    let prod = c.chart_mult(&p.x, &p.y, &q.y, &p.t)?;
                    if prod != c.chart_coords(&gh)?.y {
                        rep.push("chart_mult", format!("chart product disagrees at {} · {}", g.describe(), h.describe()));
                    }
                    for k in elems.iter().take(3) {
                        let k = match (&h, k) {
                            (GroupoidElement::Pair { y, .. }, GroupoidElement::Pair { y: z, t, .. }) => {
                                GroupoidElement::Pair { x: y.clone(), y: z.clone(), t: t.clone() }
                            }
                            _ => k.clone(),
                        };
                        let l = compose_elements(f, &gh, &k)?;
                        let r = compose_elements(f, g, &compose_elements(f, &h, &k)?)?;
                        if l != r {
                            rep.push("associativity", format!("associativity fails at {}", g.describe()));
                        }
                    }
                }
            }
        }
    }
    rep.note("elements_checked", checked);
    Ok(rep)
}

#[cfg(test)]
mod tests;
