//! Graded nilpotent Lie algebras and the groups they integrate to.
//!
//! Group elements are written in exponential coordinates, so the product is
//! the (finite) Dynkin series and the inverse is negation.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::report::Report;
use crate::scalar::{fmt_q, Coeff, Q};
use crate::weights::{dilate, WeightSequence};
use crate::wpoly::{PolyCtx, VectorField, WPoly, WPolyMap, EXACT};

/// A raw structure constant `[e_i, e_j] ∋ c e_k`, indices from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry<C: Coeff = Q> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: C,
}

impl<C: Coeff> Entry<C> {
    pub fn new(i: usize, j: usize, k: usize, c: C) -> Self {
        Self { i, j, k, c }
    }
}

fn lookup<C: Coeff>(entries: &[Entry<C>], i: usize, j: usize, k: usize) -> Option<C> {
    entries.iter().filter(|e| e.i == i && e.j == j && e.k == k).fold(None, |acc, e| match acc {
        None => Some(e.c.clone()),
        Some(a) => Some(a.add(&e.c)),
    })
}

/// Checks antisymmetry, grading support and the Jacobi identity.
pub fn validate_algebra<C: Coeff>(w: &WeightSequence, entries: &[Entry<C>], ctx: &C::Ctx) -> Report {
    let n = w.n();
    let mut rep = Report::new();
    for e in entries {
        if e.i >= n || e.j >= n || e.k >= n {
            rep.push("shape", format!("index ({},{},{}) out of range 1..{}", e.i + 1, e.j + 1, e.k + 1, n));
        }
    }
    if !rep.is_ok() {
        return rep;
    }
    for e in entries {
        if e.c.is_zero() {
            continue;
        }
        if e.i == e.j {
            rep.push("antisymmetry", format!("L_{}{}^{} is nonzero", e.i + 1, e.j + 1, e.k + 1));
            continue;
        }
        if e.i > e.j {
            if let Some(o) = lookup(entries, e.j, e.i, e.k) {
                if !e.c.add(&o).is_zero() {
                    rep.push(
                        "antisymmetry",
                        format!("L_{}{}^{} != -L_{}{}^{}", e.j + 1, e.i + 1, e.k + 1, e.i + 1, e.j + 1, e.k + 1),
                    );
                }
            }
        }
        if w.get(e.i) + w.get(e.j) != w.get(e.k) {
            rep.push(
                "grading",
                format!(
                    "L_{}{}^{} is nonzero but w_{} + w_{} != w_{}",
                    e.i + 1,
                    e.j + 1,
                    e.k + 1,
                    e.i + 1,
                    e.j + 1,
                    e.k + 1
                ),
            );
        }
    }
    // raw bilinear map: given entries win, the missing order is completed
    let raw = |i: usize, j: usize| -> Vec<C> {
        (0..n)
            .map(|k| match lookup(entries, i, j, k) {
                Some(c) => c,
                None => lookup(entries, j, i, k).map(|c| c.neg()).unwrap_or_else(|| C::zero(ctx)),
            })
            .collect()
    };
    let table: Vec<Vec<Vec<C>>> = (0..n).map(|i| (0..n).map(|j| raw(i, j)).collect()).collect();
    let br = |u: usize, v: &[C]| -> Vec<C> {
        let mut out = vec![C::zero(ctx); n];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for k in 0..n {
                out[k] = out[k].add(&table[u][j][k].mul(vj));
            }
        }
        out
    };
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let a = br(i, &table[j][l]);
                let b = br(j, &table[l][i]);
                let c = br(l, &table[i][j]);
                for k in 0..n {
                    if !a[k].add(&b[k]).add(&c[k]).is_zero() {
                        rep.push("jacobi", format!("Jacobi fails on (e_{}, e_{}, e_{}) in component {}", i + 1, j + 1, l + 1, k + 1));
                        break;
                    }
                }
            }
        }
    }
    rep
}

/// Graded nilpotent Lie algebra on `R^n` with basis `e_1..e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedNilpotentAlgebra<C: Coeff = Q> {
    w: WeightSequence,
    ctx: C::Ctx,
    /// `(i, j) -> [(k, L_ij^k)]` for `i < j`.
    table: BTreeMap<(usize, usize), Vec<(usize, C)>>,
}

impl<C: Coeff> GradedNilpotentAlgebra<C> {
    /// Validates and builds; any violation is an error carrying the report.
    pub fn new(w: WeightSequence, entries: &[Entry<C>], ctx: &C::Ctx) -> Result<Self> {
        let rep = validate_algebra(&w, entries, ctx);
        if !rep.is_ok() {
            return Err(Error::Precondition(format!("invalid structure constants: {}", rep.summary())));
        }
        Ok(Self::from_entries_unchecked(w, entries, ctx))
    }

    /// Keeps `i < j` entries, completing from `j > i` ones where needed.
    pub fn from_entries_unchecked(w: WeightSequence, entries: &[Entry<C>], ctx: &C::Ctx) -> Self {
        let mut acc: BTreeMap<(usize, usize, usize), C> = BTreeMap::new();
        for e in entries {
            if e.i == e.j {
                continue;
            }
            let (key, c) = if e.i < e.j { ((e.i, e.j, e.k), e.c.clone()) } else { ((e.j, e.i, e.k), e.c.neg()) };
            if e.i > e.j && lookup(entries, e.j, e.i, e.k).is_some() {
                continue;
            }
            let v = acc.remove(&key).map_or(c.clone(), |a| a.add(&c));
            acc.insert(key, v);
        }
        let mut table: BTreeMap<(usize, usize), Vec<(usize, C)>> = BTreeMap::new();
        for ((i, j, k), c) in acc {
            if !c.is_zero() {
                table.entry((i, j)).or_default().push((k, c));
            }
        }
        Self { w, ctx: ctx.clone(), table }
    }

    pub fn abelian(w: WeightSequence, ctx: &C::Ctx) -> Self {
        Self { w, ctx: ctx.clone(), table: BTreeMap::new() }
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn coeff_ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    /// `L_ij^k` with antisymmetric completion.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> C {
        let (a, b, s) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self
            .table
            .get(&(a, b))
            .and_then(|row| row.iter().find(|(kk, _)| *kk == k))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| C::zero(&self.ctx));
        if s {
            v.neg()
        } else {
            v
        }
    }

    /// Nonzero constants with `i < j`.
    pub fn entries(&self) -> Vec<Entry<C>> {
        self.table.iter().flat_map(|(&(i, j), row)| row.iter().map(move |(k, c)| Entry::new(i, j, *k, c.clone()))).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.table.is_empty()
    }

    /// Bracket of coordinate vectors over any ring the constants lift into.
    pub fn bracket_with<E: Coeff>(&self, u: &[E], v: &[E], lift: &impl Fn(&C) -> E) -> Vec<E> {
        let n = self.n();
        let ectx = u[0].ctx();
        let mut out = vec![E::zero(&ectx); n];
        for (&(i, j), row) in &self.table {
            let s = u[i].mul(&v[j]).sub(&u[j].mul(&v[i]));
            if s.is_zero() {
                continue;
            }
            for (k, c) in row {
                out[*k] = out[*k].add(&s.mul(&lift(c)));
            }
        }
        out
    }

    pub fn bracket(&self, u: &[C], v: &[C]) -> Vec<C> {
        self.bracket_with(u, v, &|c: &C| c.clone())
    }

    /// Matrix of `ad_x`: `A_kj = sum_i L_ij^k x_i`.
    pub fn adjoint_matrix(&self, x: &[C]) -> Mat<C> {
        let n = self.n();
        let mut a: Mat<C> = Mat::zeros(n, n, &self.ctx);
        for (&(i, j), row) in &self.table {
            for (k, c) in row {
                let v = a.get(*k, j).add(&c.mul(&x[i]));
                a.set(*k, j, v);
                let v = a.get(*k, i).sub(&c.mul(&x[j]));
                a.set(*k, i, v);
            }
        }
        a
    }

    pub fn map_coeffs<D: Coeff>(&self, ctx: &D::Ctx, f: impl Fn(&C) -> D) -> GradedNilpotentAlgebra<D> {
        let mut table = BTreeMap::new();
        for (key, row) in &self.table {
            let r: Vec<(usize, D)> = row.iter().map(|(k, c)| (*k, f(c))).filter(|(_, c)| !c.is_zero()).collect();
            if !r.is_empty() {
                table.insert(*key, r);
            }
        }
        GradedNilpotentAlgebra { w: self.w.clone(), ctx: ctx.clone(), table }
    }

    pub fn validate(&self) -> Report {
        validate_algebra(&self.w, &self.entries(), &self.ctx)
    }
}

impl GradedNilpotentAlgebra<Q> {
    /// `(i, j, k, c)` with one-based indices and `c` as "p/q".
    pub fn to_strings(&self) -> Vec<(usize, usize, usize, String)> {
        self.entries().into_iter().map(|e| (e.i + 1, e.j + 1, e.k + 1, fmt_q(&e.c))).collect()
    }
}

/// Dynkin coefficients keyed by words in `{X = false, Y = true}`, for words
/// of length at most `r` whose right-nested bracket is not trivially zero.
pub fn dynkin_coefficients(r: u32) -> BTreeMap<Vec<bool>, Q> {
    let r = r as usize;
    let mut fact = vec![Q::from_integer(1.into())];
    for k in 1..=r {
        let next = fact[k - 1].clone() * Q::from_integer((k as i64).into());
        fact.push(next);
    }
    let mut out: BTreeMap<Vec<bool>, Q> = BTreeMap::new();
    // blocks (r_i, s_i) with r_i + s_i >= 1
    fn rec(
        r: usize,
        blocks: &mut Vec<(usize, usize)>,
        used: usize,
        fact: &[Q],
        out: &mut BTreeMap<Vec<bool>, Q>,
    ) {
        if !blocks.is_empty() {
            let m = blocks.len() as i64;
            let nn = used as i64;
            let mut den = Q::from_integer((m * nn).into());
            let mut word = Vec::with_capacity(used);
            for &(a, b) in blocks.iter() {
                den *= &fact[a] * &fact[b];
                word.extend(std::iter::repeat_n(false, a));
                word.extend(std::iter::repeat_n(true, b));
            }
            let sign = if m % 2 == 1 { 1 } else { -1 };
            let c = Q::from_integer(sign.into()) / den;
            let trivially_zero = word.len() >= 2 && word[word.len() - 1] == word[word.len() - 2];
            if !trivially_zero {
                let e = out.entry(word).or_insert_with(|| Q::from_integer(0.into()));
                *e += c;
            }
        }
        for a in 0..=(r - used) {
            for b in 0..=(r - used - a) {
                if a + b == 0 {
                    continue;
                }
                blocks.push((a, b));
                rec(r, blocks, used + a + b, fact, out);
                blocks.pop();
            }
        }
    }
    rec(r, &mut Vec::new(), 0, &fact, &mut out);
    out.retain(|_, c| !num_traits::Zero::is_zero(c));
    out
}

/// Evaluates the Dynkin series `log(exp X exp Y)` over a ring `E`.
pub fn dynkin_series<C: Coeff, E: Coeff>(
    alg: &GradedNilpotentAlgebra<C>,
    coeffs: &BTreeMap<Vec<bool>, Q>,
    x: &[E],
    y: &[E],
    lift: &impl Fn(&C) -> E,
) -> Vec<E> {
    let n = alg.n();
    let ectx = x[0].ctx();
    let mut memo: HashMap<Vec<bool>, Vec<E>> = HashMap::new();
    fn value<C: Coeff, E: Coeff>(
        word: &[bool],
        alg: &GradedNilpotentAlgebra<C>,
        x: &[E],
        y: &[E],
        lift: &impl Fn(&C) -> E,
        memo: &mut HashMap<Vec<bool>, Vec<E>>,
    ) -> Vec<E> {
        if let Some(v) = memo.get(word) {
            return v.clone();
        }
        let head = if word[0] { y } else { x };
        let v = if word.len() == 1 {
            head.to_vec()
        } else {
            let tail = value(&word[1..], alg, x, y, lift, memo);
            alg.bracket_with(head, &tail, lift)
        };
        memo.insert(word.to_vec(), v.clone());
        v
    }
    let mut out = vec![E::zero(&ectx); n];
    for (word, c) in coeffs {
        let v = value(word, alg, x, y, lift, &mut memo);
        for k in 0..n {
            if !v[k].is_zero() {
                out[k] = out[k].add(&v[k].scale(c));
            }
        }
    }
    out
}

/// The simply connected group of a graded nilpotent algebra, with its
/// product cached as an exact polynomial map in `(x, y)`.
#[derive(Clone, Debug)]
pub struct NilpotentGroup<C: Coeff = Q> {
    algebra: GradedNilpotentAlgebra<C>,
    xy: PolyCtx<C>,
    product: WPolyMap<C>,
}

impl<C: Coeff> NilpotentGroup<C> {
    pub fn new(algebra: GradedNilpotentAlgebra<C>) -> Self {
        let n = algebra.n();
        let w = algebra.weights().grading();
        let xy = PolyCtx::new(w.concat(&w), EXACT, algebra.coeff_ctx().clone());
        let xs: Vec<WPoly<C>> = (0..n).map(|i| WPoly::var(&xy, i)).collect();
        let ys: Vec<WPoly<C>> = (0..n).map(|i| WPoly::var(&xy, n + i)).collect();
        let coeffs = dynkin_coefficients(algebra.weights().r());
        let lift = |c: &C| WPoly::constant_in(&xy, c.clone());
        let comps = dynkin_series(&algebra, &coeffs, &xs, &ys, &lift);
        let product = WPolyMap::new(&xy, w, comps);
        Self { algebra, xy, product }
    }

    pub fn algebra(&self) -> &GradedNilpotentAlgebra<C> {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.algebra.n()
    }

    pub fn weights(&self) -> &WeightSequence {
        self.algebra.weights()
    }

    /// The product `P(x, y)` in `2n` variables graded by `(w, w)`.
    pub fn product_jet(&self) -> &WPolyMap<C> {
        &self.product
    }

    pub fn product_ctx(&self) -> &PolyCtx<C> {
        &self.xy
    }

    pub fn mul(&self, x: &[C], y: &[C]) -> Vec<C> {
        let mut arg = x.to_vec();
        arg.extend_from_slice(y);
        self.product.eval(&arg)
    }

    pub fn inverse(&self, x: &[C]) -> Vec<C> {
        x.iter().map(|v| v.neg()).collect()
    }

    pub fn identity(&self) -> Vec<C> {
        vec![C::zero(self.algebra.coeff_ctx()); self.n()]
    }

    pub fn dilate(&self, t: &C, x: &[C]) -> Vec<C> {
        dilate(t, x, self.weights().as_slice())
    }

    fn space_ctx(&self) -> PolyCtx<C> {
        PolyCtx::new(self.weights().grading(), EXACT, self.algebra.coeff_ctx().clone())
    }

    /// `X_j^a = d/ds x·(s e_j)` at `s = 0`.
    pub fn left_invariant_frame(&self) -> Vec<VectorField<C>> {
        let n = self.n();
        let sp = self.space_ctx();
        let mut inner: Vec<WPoly<C>> = (0..n).map(|i| WPoly::var(&sp, i)).collect();
        inner.extend((0..n).map(|_| WPoly::zero_in(&sp)));
        (0..n)
            .map(|j| {
                let comps = self
                    .product
                    .comps()
                    .iter()
                    .map(|p| p.deriv(n + j).compose_to(&inner, EXACT).expect("exact substitution"))
                    .collect();
                VectorField::new(comps)
            })
            .collect()
    }

    /// `y -> a·y`.
    pub fn left_translation_jet(&self, a: &[C]) -> WPolyMap<C> {
        let n = self.n();
        let sp = self.space_ctx();
        let mut inner: Vec<WPoly<C>> = a.iter().map(|c| WPoly::constant_in(&sp, c.clone())).collect();
        inner.extend((0..n).map(|i| WPoly::var(&sp, i)));
        let comps = self.product.comps().iter().map(|p| p.compose_to(&inner, EXACT).expect("exact substitution")).collect();
        WPolyMap::endo(&sp, comps)
    }
}
