//! Carnot manifold maps: the `c_jk` decomposition, Carnot differentials,
//! tangent approximation and Pansu derivatives.

use crate::carnot_structure::HFrame;
use crate::coords::{is_carnot, pushforward_frame, CoordinateChange};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nilgroup::{GradedNilpotentAlgebra, NilpotentGroup};
use crate::report::Report;
use crate::scalar::{fmt_q, q_to_f64, Q};
use crate::wpoly::{fmt_poly, invert_map, WOrder, WPoly, WPolyMap, EXACT};
use num_traits::{One, Zero};

/// A polynomial map `φ` between two H-framed patches, based at `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CarnotMapJet {
    pub source: HFrame<Q>,
    pub target: HFrame<Q>,
    /// Uncentred components `φ_k(x)`.
    pub phi: WPolyMap<Q>,
    pub base: Vec<Q>,
    /// Weighted degree up to which series quantities are computed.
    pub trunc: i64,
}

fn fmt_point(x: &[Q]) -> String {
    format!("({})", x.iter().map(fmt_q).collect::<Vec<_>>().join(","))
}

impl CarnotMapJet {
    pub fn new(source: HFrame<Q>, target: HFrame<Q>, phi: WPolyMap<Q>, base: Vec<Q>) -> Result<Self> {
        if phi.n_source() != source.n() || phi.n_target() != target.n() {
            return Err(Error::Shape(format!(
                "map R^{} -> R^{} between frames of dimension {} and {}",
                phi.n_source(),
                phi.n_target(),
                source.n(),
                target.n()
            )));
        }
        if base.len() != source.n() {
            return Err(Error::Shape("basepoint length differs from the source dimension".into()));
        }
        if !phi.is_exact() {
            return Err(Error::Precondition("map components must be polynomials".into()));
        }
        if phi.source().grading != source.weights().grading() || phi.target() != &target.weights().grading() {
            return Err(Error::Shape("map grading differs from the frame weights".into()));
        }
        let r = source.weights().r().max(target.weights().r());
        Ok(Self { source, target, phi, base, trunc: 2 * r as i64 })
    }

    pub fn with_trunc(mut self, trunc: i64) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_base(&self, a: Vec<Q>) -> Result<Self> {
        if a.len() != self.source.n() {
            return Err(Error::Shape("basepoint length differs from the source dimension".into()));
        }
        Ok(Self { base: a, ..self.clone() })
    }

    /// `a' = φ(a)`.
    pub fn image_base(&self) -> Vec<Q> {
        self.phi.eval(&self.base)
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.phi.eval(x)
    }

    /// `z -> φ(a + z) - φ(a)`.
    pub fn centered(&self) -> Result<WPolyMap<Q>> {
        let ctx = self.phi.source().clone();
        let shift: Vec<WPoly<Q>> =
            (0..self.source.n()).map(|i| WPoly::var(&ctx, i).add(&WPoly::constant_q(&ctx, &self.base[i]))).collect();
        let ab = self.image_base();
        let comps = self
            .phi
            .comps()
            .iter()
            .zip(&ab)
            .map(|(c, b)| Ok(c.compose_to(&shift, EXACT)?.sub(&WPoly::constant_q(&ctx, b))))
            .collect::<Result<Vec<_>>>()?;
        Ok(WPolyMap::new(&ctx, self.phi.target().clone(), comps))
    }

    /// `next ∘ self`, based at `a`.
    pub fn then(&self, next: &CarnotMapJet) -> Result<CarnotMapJet> {
        if self.target.weights() != next.source.weights() || self.target.fields() != next.source.fields() {
            return Err(Error::Precondition("maps are not composable: frames differ".into()));
        }
        let comps = next.phi.comps().iter().map(|c| c.compose_to(self.phi.comps(), EXACT)).collect::<Result<Vec<_>>>()?;
        let phi = WPolyMap::new(self.phi.source(), next.phi.target().clone(), comps);
        Ok(CarnotMapJet {
            source: self.source.clone(),
            target: next.target.clone(),
            phi,
            base: self.base.clone(),
            trunc: self.trunc.max(next.trunc),
        })
    }

    /// The inverse jet based at `φ(a)`; a polynomial when the inverse is one.
    pub fn inverse(&self) -> Result<CarnotMapJet> {
        if self.source.n() != self.target.n() || self.source.weights() != self.target.weights() {
            return Err(Error::Precondition("only maps between equally graded patches can be inverted".into()));
        }
        let c = self.centered()?;
        let inv = invert_map(&c, EXACT).or_else(|_| invert_map(&c, self.trunc))?;
        if !inv.is_exact() {
            return Err(Error::Truncation("inverse jet is not a polynomial".into()));
        }
        let ab = self.image_base();
        let ctx = self.phi.source().clone();
        let shift: Vec<WPoly<Q>> =
            (0..ab.len()).map(|i| WPoly::var(&ctx, i).sub(&WPoly::constant_q(&ctx, &ab[i]))).collect();
        let comps = inv
            .comps()
            .iter()
            .zip(&self.base)
            .map(|(p, a)| Ok(p.compose_to(&shift, EXACT)?.add(&WPoly::constant_q(&ctx, a))))
            .collect::<Result<Vec<_>>>()?;
        let phi = WPolyMap::new(&ctx, self.source.weights().grading(), comps);
        Ok(CarnotMapJet { source: self.target.clone(), target: self.source.clone(), phi, base: ab, trunc: self.trunc })
    }
}

/// `φ'(x) X_j = Σ_k c_jk(x) X'_k(φ(x))` around the basepoint.
#[derive(Clone, Debug)]
pub struct CDecomposition {
    pub w: Vec<u32>,
    pub w_target: Vec<u32>,
    /// Entry `(k, j)` is `c_jk` as a series in `z = x - a`.
    pub ct: Mat<WPoly<Q>>,
}

impl CDecomposition {
    pub fn get(&self, j: usize, k: usize) -> &WPoly<Q> {
        self.ct.get(k, j)
    }

    pub fn at_base(&self) -> Mat<Q> {
        Mat::from_fn(self.ct.rows(), self.ct.cols(), |k, j| self.ct.get(k, j).constant_coeff())
    }
}

/// Solves for `c_jk` and reports the entries with `w'_k > w_j` that do not
/// vanish; an empty report means a Carnot manifold map.
pub fn frame_decompose(m: &CarnotMapJet) -> Result<(CDecomposition, Report)> {
    let n = m.source.n();
    let n2 = m.target.n();
    let cap = m.trunc;
    let ab = m.image_base();
    let xs = m.source.centered_at(&m.base, cap)?;
    let phc = m.centered()?.recap(cap);
    let jac = phc.jacobian();
    let jx: Mat<WPoly<Q>> = Mat::from_fn(n2, n, |k, j| {
        let mut acc = WPoly::zero_in(phc.source());
        for i in 0..n {
            acc = acc.add(&jac.get(k, i).mul_to(xs[j].comp(i), cap));
        }
        acc
    });
    let ys = m.target.centered_at(&ab, EXACT)?;
    let mut entries = Vec::with_capacity(n2 * n2);
    for l in 0..n2 {
        for y in &ys {
            entries.push(y.comp(l).compose_to(phc.comps(), cap)?);
        }
    }
    let mt = Mat::from_fn(n2, n2, |l, k| entries[l * n2 + k].clone());
    let mt_inv = mt.inverse().map_err(|_| Error::Singular("target frame is not invertible along the map".into()))?;
    let ct = mt_inv.mul(&jx);
    let w = m.source.weights().as_slice().to_vec();
    let w2 = m.target.weights().as_slice().to_vec();
    let mut rep = Report::new();
    for j in 0..n {
        for k in 0..n2 {
            let c = ct.get(k, j);
            if w2[k] > w[j] && !c.is_zero() {
                rep.push(
                    "not_carnot_map",
                    format!(
                        "c_{}{} = {} is nonzero but w'_{} = {} > w_{} = {}",
                        j + 1,
                        k + 1,
                        fmt_poly(c, "z"),
                        k + 1,
                        w2[k],
                        j + 1,
                        w[j]
                    ),
                );
            }
        }
    }
    Ok((CDecomposition { w, w_target: w2, ct }, rep))
}

/// `φ̂'(a)`: entry `(k, j)` is `c_jk(a)` when `w_j = w'_k`, zero otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct CarnotDifferential {
    pub matrix: Mat<Q>,
    pub source: GradedNilpotentAlgebra<Q>,
    pub target: GradedNilpotentAlgebra<Q>,
}

impl CarnotDifferential {
    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        self.matrix.mul_vec(x)
    }

    pub fn with_matrix(&self, matrix: Mat<Q>) -> Self {
        Self { matrix, ..self.clone() }
    }
}

pub fn carnot_differential(m: &CarnotMapJet) -> Result<CarnotDifferential> {
    let (dec, rep) = frame_decompose(m)?;
    if !rep.is_ok() {
        return Err(Error::Precondition(format!("not a Carnot manifold map: {}", rep.summary())));
    }
    let c = dec.at_base();
    let matrix = Mat::from_fn(c.rows(), c.cols(), |k, j| if dec.w[j] == dec.w_target[k] { c.get(k, j).clone() } else { Q::zero() });
    Ok(CarnotDifferential {
        matrix,
        source: m.source.tangent_algebra_at(&m.base)?,
        target: m.target.tangent_algebra_at(&m.image_base())?,
    })
}

/// Grid `{-2, -1, 0, 1/2, 1, 2}^n`, unit vectors first.
pub fn sample_points(n: usize, limit: usize) -> Vec<Vec<Q>> {
    let vals = [Q::from_integer((-2).into()), Q::from_integer((-1).into()), Q::zero(), Q::new(1.into(), 2.into()), Q::one(), Q::from_integer(2.into())];
    let mut out: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    let total = vals.len().pow(n as u32);
    let stride = (total / limit.max(1)).max(1);
    let mut idx = 0;
    while idx < total && out.len() < limit + n {
        let mut r = idx;
        let p: Vec<Q> = (0..n)
            .map(|_| {
                let v = vals[r % vals.len()].clone();
                r /= vals.len();
                v
            })
            .collect();
        if !out.contains(&p) {
            out.push(p);
        }
        idx += stride;
    }
    out
}

/// Block structure, Lie-algebra map, and group map both on the Dynkin jets
/// and on all pairs of `samples`.
pub fn differential_checks(d: &CarnotDifferential, samples: &[Vec<Q>]) -> Report {
    let mut rep = Report::new();
    let w = d.source.weights().as_slice();
    let w2 = d.target.weights().as_slice();
    let a = &d.matrix;
    for k in 0..a.rows() {
        for j in 0..a.cols() {
            if w[j] != w2[k] && !a.get(k, j).is_zero() {
                rep.push("block", format!("entry ({},{}) is nonzero but w_{} != w'_{}", k + 1, j + 1, j + 1, k + 1));
            }
        }
    }
    let n = d.source.n();
    let unit = |i: usize| -> Vec<Q> { (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
    'lie: for i in 0..n {
        for j in i + 1..n {
            let lhs = d.apply(&d.source.bracket(&unit(i), &unit(j)));
            let rhs = d.target.bracket(&d.apply(&unit(i)), &d.apply(&unit(j)));
            if lhs != rhs {
                rep.push("lie_homomorphism", format!("D[e_{}, e_{}] != [D e_{}, D e_{}]", i + 1, j + 1, i + 1, j + 1));
                break 'lie;
            }
        }
    }
    let g = NilpotentGroup::new(d.source.clone());
    let g2 = NilpotentGroup::new(d.target.clone());
    let xy = g.product_ctx().clone();
    let xv: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&xy, i)).collect();
    let yv: Vec<WPoly<Q>> = (0..n).map(|i| WPoly::var(&xy, n + i)).collect();
    let lin = |v: &[WPoly<Q>]| -> Vec<WPoly<Q>> {
        (0..a.rows())
            .map(|k| (0..n).fold(WPoly::zero_in(&xy), |acc, j| acc.add(&v[j].scale(a.get(k, j)))))
            .collect()
    };
    let dp = lin(g.product_jet().comps());
    let mut args = lin(&xv);
    args.extend(lin(&yv));
    match g2.product_jet().comps().iter().map(|c| c.compose_to(&args, EXACT)).collect::<Result<Vec<_>>>() {
        Ok(pd) => {
            if let Some(k) = (0..pd.len()).find(|&k| pd[k] != dp[k]) {
                rep.push("group_homomorphism", format!("D(x·y) and D(x)·D(y) differ symbolically in component {}", k + 1));
            }
        }
        Err(e) => rep.push("group_homomorphism", e.to_string()),
    }
    let mut checked = 0usize;
    'grid: for x in samples {
        for y in samples {
            checked += 1;
            if d.apply(&g.mul(x, y)) != g2.mul(&d.apply(x), &d.apply(y)) {
                rep.push("group_homomorphism", format!("D(x·y) != D(x)·D(y) at x={}, y={}", fmt_point(x), fmt_point(y)));
                break 'grid;
            }
        }
    }
    rep.note("pairs_checked", checked);
    rep
}

/// `ψ̂'(φ(a)) φ̂'(a) = (ψ∘φ)̂'(a)`.
pub fn chain_rule_check(phi: &CarnotMapJet, psi: &CarnotMapJet) -> Result<Report> {
    let psi = psi.with_base(phi.image_base())?;
    let d1 = carnot_differential(phi)?;
    let d2 = carnot_differential(&psi)?;
    let d12 = carnot_differential(&phi.then(&psi)?)?;
    let mut rep = Report::new();
    if d2.matrix.mul(&d1.matrix) != d12.matrix {
        rep.push("chain_rule", "differential of the composite differs from the product of differentials");
    }
    Ok(rep)
}

/// `(φ^{-1})̂'(φ(a)) = φ̂'(a)^{-1}`.
pub fn inverse_rule_check(phi: &CarnotMapJet) -> Result<Report> {
    let d = carnot_differential(phi)?;
    let di = carnot_differential(&phi.inverse()?)?;
    let mut rep = Report::new();
    match d.matrix.inverse() {
        Ok(inv) if inv == di.matrix => {}
        Ok(_) => rep.push("inverse_rule", "differential of the inverse differs from the inverse differential"),
        Err(_) => rep.push("inverse_rule", "differential is not invertible"),
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct MapOsculation {
    /// `z -> φ(a + z) - φ(a) - φ̂'(a) z`.
    pub residual: WPolyMap<Q>,
    pub order: WOrder,
    pub differential: Mat<Q>,
    pub report: Report,
    /// Fitted exponent of `|t^{-1}·φ(t·x) - φ̂'(a)x|`; `None` when it vanishes.
    pub slope: Option<f64>,
}

fn require_carnot_chart(f: &HFrame<Q>, at: &[Q], what: &str) -> Result<GradedNilpotentAlgebra<Q>> {
    let fa = f.with_basepoint(at.to_vec())?;
    let alg = fa.tangent_algebra_at(at)?;
    let rep = is_carnot(&fa, &alg);
    if !rep.is_ok() {
        return Err(Error::Precondition(format!("{what} coordinates are not Carnot coordinates: {}", rep.summary())));
    }
    Ok(alg)
}

/// Least-squares slope of `log e` against `log t`.
pub fn fit_slope(ts: &[f64], errs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ts.iter().zip(errs).filter(|(_, &e)| e > 1e-300).map(|(t, e)| (t.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Default probe parameters `2^{-3}, ..., 2^{-10}`.
pub fn default_t_seq() -> Vec<f64> {
    (3..=10).map(|k| 0.5f64.powi(k)).collect()
}

fn dilate_f64(t: f64, x: &[f64], w: &[u32]) -> Vec<f64> {
    x.iter().zip(w).map(|(v, &wi)| v * t.powi(wi as i32)).collect()
}

/// Tangent approximation in Carnot coordinates on both sides.
pub fn map_osculation_residual(m: &CarnotMapJet) -> Result<MapOsculation> {
    require_carnot_chart(&m.source, &m.base, "source")?;
    require_carnot_chart(&m.target, &m.image_base(), "target")?;
    let d = carnot_differential(m)?;
    let phc = m.centered()?;
    let ctx = phc.source().clone();
    let lin = WPolyMap::affine(&ctx, phc.target().clone(), &d.matrix, None);
    let residual = phc.sub(&lin);
    let mut rep = Report::new();
    let wmax = phc.target().max_weight() as i64;
    for l in -wmax..0 {
        let h = phc.hom_part(l)?;
        if !h.comps().iter().all(|c| c.is_zero()) {
            rep.push("negative_part", format!("homogeneous part of degree {l} does not vanish"));
        }
    }
    if phc.hom_part(0)? != lin {
        rep.push("degree_zero", "homogeneous part of degree 0 differs from the Carnot differential");
    }
    let order = residual.weighted_order();
    if !order.at_least(1) {
        rep.push("order", format!("residual has weighted order {}", order.value()));
    }
    let w = m.source.weights().as_slice().to_vec();
    let w2 = m.target.weights().as_slice().to_vec();
    let x = vec![1.0; w.len()];
    let ts = default_t_seq();
    let errs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let v: Vec<f64> = residual.comps().iter().map(|c| c.to_f64_eval(&dilate_f64(t, &x, &w))).collect();
            dilate_f64(1.0 / t, &v, &w2).iter().fold(0.0, |a: f64, b| a.max(b.abs()))
        })
        .collect();
    let slope = fit_slope(&ts, &errs);
    if let Some(s) = slope {
        rep.note("slope", s);
    }
    Ok(MapOsculation { residual, order, differential: d.matrix, report: rep, slope })
}

/// `φ̂'(a) ∘ κ ∘ φ^{-1}` for a Carnot chart `κ` at `a`, with the verdict of
/// the Carnot coordinate check at `φ(a)`.
pub fn act_on_chart(m: &CarnotMapJet, kappa: &CoordinateChange<Q>) -> Result<(CoordinateChange<Q>, Report)> {
    if kappa.base != m.base {
        return Err(Error::Precondition("chart is not based at the basepoint of the map".into()));
    }
    let fa = m.source.with_basepoint(m.base.clone())?;
    let pushed = pushforward_frame(&fa, kappa, if kappa.forward.is_exact() { EXACT } else { m.trunc })?;
    let alg = fa.tangent_algebra_at(&m.base)?;
    let rep = is_carnot(&pushed, &alg);
    if !rep.is_ok() {
        return Err(Error::Precondition(format!("chart is not a Carnot chart: {}", rep.summary())));
    }
    let d = carnot_differential(m)?;
    let dinv = d.matrix.inverse().map_err(|_| Error::Singular("map jet is not invertible".into()))?;
    let phc = m.centered()?;
    let inv = invert_map(&phc, EXACT).or_else(|_| invert_map(&phc, m.trunc))?;
    let ctx = phc.source().clone();
    let g = phc.target().clone();
    let dl = WPolyMap::affine(&ctx, g.clone(), &d.matrix, None);
    let dil = WPolyMap::affine(&ctx, g, &dinv, None);
    let cap = if inv.is_exact() && kappa.is_exact() { EXACT } else { m.trunc };
    let forward = dl.compose(&kappa.forward.compose(&inv, cap)?, cap)?;
    let inverse = phc.compose(&kappa.inverse.compose(&dil, cap)?, cap)?;
    let ab = m.image_base();
    let chart = CoordinateChange { base: ab.clone(), forward, inverse };
    let target = m.target.with_basepoint(ab.clone())?;
    let pcap = if chart.forward.is_exact() { EXACT } else { m.trunc };
    let moved = pushforward_frame(&target, &chart, pcap)?;
    let verdict = is_carnot(&moved, &target.tangent_algebra_at(&ab)?);
    Ok((chart, verdict))
}

#[derive(Clone, Debug)]
pub struct PansuProbe {
    pub ts: Vec<f64>,
    /// `δ_t^{-1}[φ(a)^{-1}·φ(a·δ_t y)]` for each `t`.
    pub values: Vec<Vec<f64>>,
    pub deviations: Vec<f64>,
    /// Exact limit from the degree-zero part of `y -> φ(a)^{-1}·φ(a·y)`.
    pub prediction: Vec<Q>,
    /// Extrapolation of `values` to `t = 0`.
    pub limit: Vec<f64>,
    pub limit_deviation: f64,
    pub slope: Option<f64>,
    pub report: Report,
}

impl PansuProbe {
    /// Remainder identically zero: the values equal the limit at every `t`.
    pub fn is_exact(&self) -> bool {
        self.deviations.iter().all(|&e| e <= 1e-12)
    }

    pub fn passes(&self, tol: f64, min_slope: f64) -> bool {
        self.report.is_ok() && self.limit_deviation <= tol && (self.is_exact() || self.slope.is_some_and(|s| s >= min_slope))
    }
}

fn neville_at_zero(ts: &[f64], vs: &[f64]) -> f64 {
    let mut p = vs.to_vec();
    let k = ts.len();
    for m in 1..k {
        for i in 0..k - m {
            p[i] = (ts[i + m] * p[i] - ts[i] * p[i + 1]) / (ts[i + m] - ts[i]);
        }
    }
    p[0]
}

fn group_of(f: &HFrame<Q>) -> Result<NilpotentGroup<Q>> {
    let zero = vec![Q::zero(); f.n()];
    let g = NilpotentGroup::new(f.tangent_algebra_at(&zero)?);
    if g.left_invariant_frame() != f.fields() {
        return Err(Error::Precondition("frame is not the left-invariant frame of a group in exponential coordinates".into()));
    }
    Ok(g)
}

/// Numeric Pansu difference quotients at `a` in direction `y`, compared with
/// the exact limit and with the Carnot differential.
pub fn pansu_numeric(m: &CarnotMapJet, a: &[Q], y: &[Q], t_seq: &[f64]) -> Result<PansuProbe> {
    if t_seq.is_empty() || t_seq.iter().any(|&t| !(t > 0.0)) || t_seq.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::Precondition("t sequence must be strictly decreasing and positive".into()));
    }
    let g = group_of(&m.source)?;
    let g2 = group_of(&m.target)?;
    let m = m.with_base(a.to_vec())?;
    let pa = m.image_base();
    let la = g.left_translation_jet(a);
    let comps = m.phi.comps().iter().map(|c| c.compose_to(la.comps(), EXACT)).collect::<Result<Vec<_>>>()?;
    let psi0 = WPolyMap::new(la.source(), m.phi.target().clone(), comps);
    let lb = g2.left_translation_jet(&g2.inverse(&pa));
    let comps = lb.comps().iter().map(|c| c.compose_to(psi0.comps(), EXACT)).collect::<Result<Vec<_>>>()?;
    let psi = WPolyMap::new(psi0.source(), lb.target().clone(), comps);
    let mut report = Report::new();
    let wmax = psi.target().max_weight() as i64;
    for l in -wmax..0 {
        if !psi.hom_part(l)?.comps().iter().all(|c| c.is_zero()) {
            report.push("negative_part", format!("difference quotient has a part of degree {l}"));
        }
    }
    let prediction = psi.hom_part(0)?.eval(y);
    let d = carnot_differential(&m)?;
    if d.apply(y) != prediction {
        report.push("differential_mismatch", "limit differs from the Carnot differential");
    }
    let w = g.weights().as_slice().to_vec();
    let w2 = g2.weights().as_slice().to_vec();
    let af: Vec<f64> = a.iter().map(q_to_f64).collect();
    let yf: Vec<f64> = y.iter().map(q_to_f64).collect();
    let painv: Vec<f64> = g2.inverse(&pa).iter().map(q_to_f64).collect();
    let mul_f = |g: &NilpotentGroup<Q>, x: &[f64], z: &[f64]| -> Vec<f64> {
        let mut arg = x.to_vec();
        arg.extend_from_slice(z);
        g.product_jet().comps().iter().map(|c| c.to_f64_eval(&arg)).collect()
    };
    let pred_f: Vec<f64> = prediction.iter().map(q_to_f64).collect();
    let mut values = Vec::with_capacity(t_seq.len());
    let mut deviations = Vec::with_capacity(t_seq.len());
    for &t in t_seq {
        let x = mul_f(&g, &af, &dilate_f64(t, &yf, &w));
        let px: Vec<f64> = m.phi.comps().iter().map(|c| c.to_f64_eval(&x)).collect();
        let v = dilate_f64(1.0 / t, &mul_f(&g2, &painv, &px), &w2);
        deviations.push(v.iter().zip(&pred_f).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs())));
        values.push(v);
    }
    let limit: Vec<f64> = (0..pred_f.len())
        .map(|k| neville_at_zero(t_seq, &values.iter().map(|v| v[k]).collect::<Vec<_>>()))
        .collect();
    let limit_deviation = limit.iter().zip(&pred_f).fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()));
    let slope = if deviations.iter().all(|&e| e <= 1e-12) { None } else { fit_slope(t_seq, &deviations) };
    Ok(PansuProbe { ts: t_seq.to_vec(), values, deviations, prediction, limit, limit_deviation, slope, report })
}
