//! Carnot structures given by H-frames of polynomial vector fields.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nilgroup::{Entry, GradedNilpotentAlgebra};
use crate::report::Report;
use crate::scalar::{Coeff, Q};
use crate::weights::WeightSequence;
use crate::wpoly::{fmt_monomial, lie_bracket, PolyCtx, VectorField, WPoly};

/// `n` vector fields `X_1..X_n` on a patch of `R^n`, `X_j` of weight `w_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HFrame<C: Coeff = Q> {
    w: WeightSequence,
    ctx: PolyCtx<C>,
    fields: Vec<VectorField<C>>,
    basepoint: Vec<C>,
}

impl<C: Coeff> HFrame<C> {
    /// Checks shapes and invertibility of the frame matrix at the basepoint.
    pub fn new(w: WeightSequence, fields: Vec<VectorField<C>>, basepoint: Vec<C>) -> Result<Self> {
        let f = Self::new_unchecked(w, fields, basepoint)?;
        f.frame_matrix_at(&f.basepoint)
            .inverse()
            .map_err(|_| Error::Singular("frame matrix is not invertible at the basepoint".into()))?;
        Ok(f)
    }

    /// Checks shapes only.
    pub fn new_unchecked(w: WeightSequence, fields: Vec<VectorField<C>>, basepoint: Vec<C>) -> Result<Self> {
        let n = w.n();
        if fields.len() != n {
            return Err(Error::Shape(format!("{} fields for dimension {n}", fields.len())));
        }
        if basepoint.len() != n {
            return Err(Error::Shape(format!("basepoint of length {} for dimension {n}", basepoint.len())));
        }
        for (j, x) in fields.iter().enumerate() {
            if x.n() != n {
                return Err(Error::Shape(format!("field {} has {} components", j + 1, x.n())));
            }
            if x.grading() != &w.grading() {
                return Err(Error::Shape(format!("field {} is graded differently from the frame", j + 1)));
            }
        }
        let ctx = fields[0].ctx().clone();
        Ok(Self { w, ctx, fields, basepoint })
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn ctx(&self) -> &PolyCtx<C> {
        &self.ctx
    }

    pub fn fields(&self) -> &[VectorField<C>] {
        &self.fields
    }

    pub fn field(&self, j: usize) -> &VectorField<C> {
        &self.fields[j]
    }

    pub fn basepoint(&self) -> &[C] {
        &self.basepoint
    }

    pub fn is_exact(&self) -> bool {
        self.fields.iter().all(|x| x.is_exact())
    }

    pub fn with_basepoint(&self, b: Vec<C>) -> Result<Self> {
        Self::new(self.w.clone(), self.fields.clone(), b)
    }

    pub fn map_coeffs<D: Coeff>(&self, ctx: &PolyCtx<D>, f: impl Fn(&C) -> D, basepoint: Vec<D>) -> HFrame<D> {
        HFrame {
            w: self.w.clone(),
            ctx: ctx.clone(),
            fields: self.fields.iter().map(|x| x.map_coeffs(ctx, &f)).collect(),
            basepoint,
        }
    }

    /// Columns are `X_j(x)`.
    pub fn frame_matrix_at(&self, x: &[C]) -> Mat<C> {
        let n = self.n();
        let vals: Vec<Vec<C>> = self.fields.iter().map(|f| f.eval(x)).collect();
        Mat::from_fn(n, n, |l, j| vals[j][l].clone())
    }

    /// The fields as functions of `z = x - basepoint`, in a ring capped at `cap`.
    pub fn centered(&self, cap: i64) -> Result<Vec<VectorField<C>>> {
        self.centered_at(&self.basepoint, cap)
    }

    /// The fields as functions of `z = x - b`.
    pub fn centered_at(&self, b: &[C], cap: i64) -> Result<Vec<VectorField<C>>> {
        if b.iter().all(|c| c.is_zero()) {
            return Ok(self.fields.iter().map(|x| VectorField::new(x.comps().iter().map(|c| c.recap(cap)).collect())).collect());
        }
        let ctx = self.ctx.with_cap(cap);
        let shift: Vec<WPoly<C>> =
            (0..self.n()).map(|i| WPoly::var(&ctx, i).add(&WPoly::constant_in(&ctx, b[i].clone()))).collect();
        self.fields
            .iter()
            .map(|x| Ok(VectorField::new(x.comps().iter().map(|c| c.compose_to(&shift, cap)).collect::<Result<Vec<_>>>()?)))
            .collect()
    }

    /// Solves `[X_i, X_j] = Σ L_ij^k(z) X_k` around the basepoint modulo
    /// weighted degree `cap`, reporting components with `w_k > w_i + w_j`.
    pub fn bracket_decomposition(&self, cap: i64) -> Result<(FrameBracketCoefficients<C>, Report)> {
        let n = self.n();
        let z = self.centered(cap)?;
        let m = Mat::from_fn(n, n, |l, j| z[j].comp(l).clone());
        let minv = m.inverse().map_err(|_| Error::Singular("frame matrix is not invertible at the basepoint".into()))?;
        let mut table = BTreeMap::new();
        let mut rep = Report::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = lie_bracket(&z[i], &z[j])?;
                let l = minv.mul_vec(b.comps());
                for (k, lk) in l.into_iter().enumerate() {
                    if lk.is_zero() {
                        continue;
                    }
                    if self.w.get(k) <= self.w.get(i) + self.w.get(j) {
                        table.insert((i, j, k), lk);
                    } else {
                        let mono = lk.terms().keys().next().map(|a| fmt_monomial(a, "z")).unwrap_or_default();
                        rep.push(
                            "filtration",
                            format!(
                                "not a Carnot filtration: [X_{}, X_{}] has an X_{} component (w_{} > w_{} + w_{}) at monomial {}",
                                i + 1,
                                j + 1,
                                k + 1,
                                k + 1,
                                i + 1,
                                j + 1,
                                mono
                            ),
                        );
                    }
                }
            }
        }
        Ok((FrameBracketCoefficients { w: self.w.clone(), table }, rep))
    }

    pub fn bracket_coefficients(&self, cap: i64) -> Result<FrameBracketCoefficients<C>> {
        let (l, rep) = self.bracket_decomposition(cap)?;
        if !rep.is_ok() {
            return Err(Error::Precondition(rep.summary()));
        }
        Ok(l)
    }

    /// Structure constants `L_ij^k(a)` with `w_k = w_i + w_j`.
    pub fn tangent_algebra_at(&self, a: &[C]) -> Result<GradedNilpotentAlgebra<C>> {
        let n = self.n();
        if a.len() != n {
            return Err(Error::Shape(format!("point of length {} for dimension {n}", a.len())));
        }
        if !self.is_exact() && !a.iter().all(|c| c.is_zero()) {
            return Err(Error::Truncation("a truncated frame can only be evaluated at the origin".into()));
        }
        let minv = self
            .frame_matrix_at(a)
            .inverse()
            .map_err(|_| Error::Singular("frame matrix is not invertible at the evaluation point".into()))?;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let b = lie_bracket(&self.fields[i], &self.fields[j])?.eval(a);
                let l = minv.mul_vec(&b);
                for (k, lk) in l.into_iter().enumerate() {
                    if lk.is_zero() {
                        continue;
                    }
                    let (wi, wj, wk) = (self.w.get(i), self.w.get(j), self.w.get(k));
                    if wk > wi + wj {
                        return Err(Error::Precondition(format!(
                            "not a Carnot filtration at the given point: [X_{}, X_{}] has an X_{} component",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                    if wk == wi + wj {
                        entries.push(Entry::new(i, j, k, lk));
                    }
                }
            }
        }
        let ctx = a.first().map(|c| c.ctx()).unwrap_or_else(|| self.ctx.inner.clone());
        Ok(GradedNilpotentAlgebra::from_entries_unchecked(self.w.clone(), &entries, &ctx))
    }
}

/// The functions `L_ij^k(z)`, `i < j`, `w_k <= w_i + w_j`, in the variable
/// centered at the basepoint.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBracketCoefficients<C: Coeff = Q> {
    w: WeightSequence,
    table: BTreeMap<(usize, usize, usize), WPoly<C>>,
}

impl<C: Coeff> FrameBracketCoefficients<C> {
    /// `L_ij^k`, antisymmetric in `(i, j)`; `None` when identically zero.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<WPoly<C>> {
        if i < j {
            self.table.get(&(i, j, k)).cloned()
        } else {
            self.table.get(&(j, i, k)).map(|p| p.neg())
        }
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(usize, usize, usize), &WPoly<C>)> {
        self.table.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }
}

impl HFrame<Q> {
    /// Invertibility at the basepoint and bracket residuals; whether the
    /// weight-one fields generate is recorded as information only.
    pub fn validate_filtration(&self, cap: i64) -> Report {
        let mut rep = Report::new();
        if self.frame_matrix_at(&self.basepoint).inverse().is_err() {
            rep.push("singular", "frame matrix is not invertible at the basepoint");
            return rep;
        }
        match self.bracket_decomposition(cap) {
            Ok((_, r)) => rep.merge(r),
            Err(e) => rep.push("bracket", e.to_string()),
        }
        rep.note("step", self.w.r());
        rep.note("bracket_generating", self.bracket_generating());
        rep
    }

    /// Do iterated brackets of the weight-one fields span at the basepoint?
    pub fn bracket_generating(&self) -> bool {
        let n = self.n();
        let first: Vec<VectorField<Q>> = (0..n).filter(|&j| self.w.get(j) == 1).map(|j| self.fields[j].clone()).collect();
        let mut all = first.clone();
        let mut layer = first.clone();
        for _ in 1..n {
            let mut next = Vec::new();
            for x in &first {
                for y in &layer {
                    let b = lie_bracket(x, y).expect("same dimension");
                    if !b.comps().iter().all(|c| c.is_zero()) {
                        next.push(b);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        let vals: Vec<Vec<Q>> = all.iter().map(|x| x.eval(&self.basepoint)).collect();
        if vals.is_empty() {
            return false;
        }
        Mat::from_rows(vals).rank() == n
    }
}

/// Lifts to `M × R` with the new coordinate `s` of weight two: the
/// weight-one fields are pulled back and `∂_s` is inserted right after them.
pub fn heat_lift(f: &HFrame<Q>) -> Result<HFrame<Q>> {
    let n = f.n();
    let p = (0..n).filter(|&j| f.weights().get(j) == 1).count();
    let mut w: Vec<u32> = f.weights().as_slice().to_vec();
    w.insert(p, 2);
    let ws = WeightSequence::new(w)?;
    let ctx = PolyCtx::new(ws.grading(), f.ctx().cap, ());
    let lift_poly = |c: &WPoly<Q>| -> WPoly<Q> {
        let terms = c.terms().iter().map(|(a, v)| {
            let mut b = a.clone();
            b.insert(p, 0);
            (b, v.clone())
        });
        WPoly::from_terms(&ctx, terms, c.trunc())
    };
    let mut fields: Vec<VectorField<Q>> = f
        .fields()
        .iter()
        .map(|x| {
            let mut comps: Vec<WPoly<Q>> = x.comps().iter().map(lift_poly).collect();
            comps.insert(p, WPoly::zero_in(&ctx));
            VectorField::new(comps)
        })
        .collect();
    fields.insert(p, VectorField::coordinate(&ctx, p));
    let mut b = f.basepoint().to_vec();
    b.insert(p, Q::from_integer(0.into()));
    HFrame::new(ws, fields, b)
}

/// Default truncation: twice the step.
pub fn default_trunc(w: &WeightSequence) -> i64 {
    2 * w.r() as i64
}
