//! Named structures used by the tests, the CLI and the acceptance suite.

use crate::carnot_map::CarnotMapJet;
use crate::carnot_structure::HFrame;
use crate::coords::CoordinateChange;
use crate::groupoid::GroupoidChart;
use crate::nilgroup::{Entry, GradedNilpotentAlgebra, NilpotentGroup};
use crate::scalar::{q, qf, Q};
use crate::weights::WeightSequence;
use crate::wpoly::{PolyCtx, VectorField, WPoly, WPolyMap, EXACT};

fn ws(w: &[u32]) -> WeightSequence {
    WeightSequence::new(w.to_vec()).expect("fixture weights")
}

/// Polynomial from `(exponents, numerator, denominator)` triples.
pub fn poly(ctx: &PolyCtx<Q>, terms: &[(&[u32], i64, i64)]) -> WPoly<Q> {
    WPoly::from_terms(ctx, terms.iter().map(|(a, n, d)| (a.to_vec(), qf(*n, *d))), EXACT)
}

fn frame(w: &[u32], fields: Vec<Vec<Vec<(&[u32], i64, i64)>>>) -> HFrame<Q> {
    let w = ws(w);
    let ctx = PolyCtx::new(w.grading(), EXACT, ());
    let fields = fields.into_iter().map(|f| VectorField::new(f.iter().map(|c| poly(&ctx, c)).collect())).collect();
    let n = w.n();
    HFrame::new(w, fields, vec![q(0); n]).expect("fixture frame")
}

fn group_frame(alg: GradedNilpotentAlgebra<Q>) -> HFrame<Q> {
    let n = alg.n();
    let g = NilpotentGroup::new(alg.clone());
    HFrame::new(alg.weights().clone(), g.left_invariant_frame(), vec![q(0); n]).expect("group frame")
}

/// Coordinate frame on `R^n`, all weights one.
pub fn abelian(n: usize) -> HFrame<Q> {
    let w = ws(&vec![1; n]);
    let ctx = PolyCtx::new(w.grading(), EXACT, ());
    HFrame::new(w, (0..n).map(|j| VectorField::coordinate(&ctx, j)).collect(), vec![q(0); n]).expect("abelian")
}

pub fn heisenberg_algebra() -> GradedNilpotentAlgebra<Q> {
    GradedNilpotentAlgebra::new(ws(&[1, 1, 2]), &[Entry::new(0, 1, 2, q(1))], &()).expect("heisenberg")
}

pub fn engel_algebra() -> GradedNilpotentAlgebra<Q> {
    GradedNilpotentAlgebra::new(ws(&[1, 1, 2, 3]), &[Entry::new(0, 1, 2, q(1)), Entry::new(0, 2, 3, q(1))], &()).expect("engel")
}

/// Left-invariant Heisenberg frame: `∂_1 - x_2/2 ∂_3`, `∂_2 + x_1/2 ∂_3`, `∂_3`.
pub fn heisenberg3() -> HFrame<Q> {
    frame(
        &[1, 1, 2],
        vec![
            vec![vec![(&[0, 0, 0], 1, 1)], vec![], vec![(&[0, 1, 0], -1, 2)]],
            vec![vec![], vec![(&[0, 0, 0], 1, 1)], vec![(&[1, 0, 0], 1, 2)]],
            vec![vec![], vec![], vec![(&[0, 0, 0], 1, 1)]],
        ],
    )
}

/// Engel structure: `∂_1`, `∂_2 + x_1 ∂_3 + x_1^2/2 ∂_4`, `∂_3 + x_1 ∂_4`, `∂_4`.
pub fn engel4() -> HFrame<Q> {
    frame(
        &[1, 1, 2, 3],
        vec![
            vec![vec![(&[0, 0, 0, 0], 1, 1)], vec![], vec![], vec![]],
            vec![vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![(&[1, 0, 0, 0], 1, 1)], vec![(&[2, 0, 0, 0], 1, 2)]],
            vec![vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![(&[1, 0, 0, 0], 1, 1)]],
            vec![vec![], vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)]],
        ],
    )
}

/// Left-invariant frame of the Engel group in exponential coordinates.
pub fn engel_group() -> HFrame<Q> {
    group_frame(engel_algebra())
}

/// Heisenberg frame with `x_3 ∂_1` added to `X_1`; not a group.
pub fn perturbed_heisenberg() -> HFrame<Q> {
    frame(
        &[1, 1, 2],
        vec![
            vec![vec![(&[0, 0, 0], 1, 1), (&[0, 0, 1], 1, 1)], vec![], vec![(&[0, 1, 0], -1, 2)]],
            vec![vec![], vec![(&[0, 0, 0], 1, 1)], vec![(&[1, 0, 0], 1, 2)]],
            vec![vec![], vec![], vec![(&[0, 0, 0], 1, 1)]],
        ],
    )
}

/// `∂_1 - x_2 ∂_3`, `∂_2`, `∂_3`: privileged, Heisenberg tangent algebra,
/// but not Carnot coordinates.
pub fn asymmetric_heisenberg() -> HFrame<Q> {
    frame(
        &[1, 1, 2],
        vec![
            vec![vec![(&[0, 0, 0], 1, 1)], vec![], vec![(&[0, 1, 0], -1, 1)]],
            vec![vec![], vec![(&[0, 0, 0], 1, 1)], vec![]],
            vec![vec![], vec![], vec![(&[0, 0, 0], 1, 1)]],
        ],
    )
}

/// `∂_1`, `∂_2 + x_1(1 + x_2) ∂_3`, `∂_3`: `L_12^3 = 1 + x_2`.
pub fn variable_heisenberg() -> HFrame<Q> {
    frame(
        &[1, 1, 2],
        vec![
            vec![vec![(&[0, 0, 0], 1, 1)], vec![], vec![]],
            vec![vec![], vec![(&[0, 0, 0], 1, 1)], vec![(&[1, 0, 0], 1, 1), (&[1, 1, 0], 1, 1)]],
            vec![vec![], vec![], vec![(&[0, 0, 0], 1, 1)]],
        ],
    )
}

/// Weights `(1,1,2,3)` with `[X_1, X_2] = X_4`: violates `[H_1, H_1] ⊂ H_2`.
pub fn non_carnot_filtration() -> HFrame<Q> {
    frame(
        &[1, 1, 2, 3],
        vec![
            vec![vec![(&[0, 0, 0, 0], 1, 1)], vec![], vec![], vec![]],
            vec![vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![], vec![(&[1, 0, 0, 0], 1, 1)]],
            vec![vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![]],
            vec![vec![], vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)]],
        ],
    )
}

/// Linearly adapted but not privileged: `X_1 = ∂_1 + x_1 ∂_4` has a term of
/// degree `-2`.
pub fn non_privileged() -> HFrame<Q> {
    frame(
        &[1, 1, 2, 3],
        vec![
            vec![vec![(&[0, 0, 0, 0], 1, 1)], vec![], vec![], vec![(&[1, 0, 0, 0], 1, 1)]],
            vec![vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![(&[1, 0, 0, 0], 1, 1)], vec![]],
            vec![vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)], vec![]],
            vec![vec![], vec![], vec![], vec![(&[0, 0, 0, 0], 1, 1)]],
        ],
    )
}

/// Every frame fixture that defines a Carnot structure, by name.
pub fn all_frames() -> Vec<(&'static str, HFrame<Q>)> {
    vec![
        ("abelian2", abelian(2)),
        ("heisenberg3", heisenberg3()),
        ("engel4", engel4()),
        ("engel_group", engel_group()),
        ("perturbed_heisenberg", perturbed_heisenberg()),
        ("asymmetric_heisenberg", asymmetric_heisenberg()),
        ("variable_heisenberg", variable_heisenberg()),
    ]
}

/// Group fixtures: left-invariant frames in exponential coordinates.
pub fn group_fixtures() -> Vec<(&'static str, HFrame<Q>, GradedNilpotentAlgebra<Q>)> {
    vec![
        ("abelian2", abelian(2), GradedNilpotentAlgebra::abelian(ws(&[1, 1]), &())),
        ("heisenberg3", heisenberg3(), heisenberg_algebra()),
        ("engel_group", engel_group(), engel_algebra()),
    ]
}

fn map_between(source: HFrame<Q>, target: HFrame<Q>, comps: Vec<Vec<(&[u32], i64, i64)>>) -> CarnotMapJet {
    let ctx = PolyCtx::new(source.weights().grading(), EXACT, ());
    let phi = WPolyMap::new(&ctx, target.weights().grading(), comps.iter().map(|c| poly(&ctx, c)).collect());
    let n = source.n();
    CarnotMapJet::new(source, target, phi, vec![q(0); n]).expect("fixture map")
}

fn heisenberg_map(comps: Vec<Vec<(&[u32], i64, i64)>>) -> CarnotMapJet {
    map_between(heisenberg3(), heisenberg3(), comps)
}

pub fn identity_map(f: &HFrame<Q>) -> CarnotMapJet {
    let ctx = PolyCtx::new(f.weights().grading(), EXACT, ());
    CarnotMapJet::new(f.clone(), f.clone(), WPolyMap::identity(&ctx), vec![q(0); f.n()]).expect("identity map")
}

/// `δ_λ` on the Heisenberg group.
pub fn heisenberg_dilation(l: i64) -> CarnotMapJet {
    heisenberg_map(vec![vec![(&[1, 0, 0], l, 1)], vec![(&[0, 1, 0], l, 1)], vec![(&[0, 0, 1], l * l, 1)]])
}

/// `(x_2, x_1, -x_3)`.
pub fn heisenberg_swap() -> CarnotMapJet {
    heisenberg_map(vec![vec![(&[0, 1, 0], 1, 1)], vec![(&[1, 0, 0], 1, 1)], vec![(&[0, 0, 1], -1, 1)]])
}

/// `(x_1, x_2 + x_1^2, x_3 + x_1^3/6)`: a contact diffeomorphism that is not
/// a group map.
pub fn heisenberg_contact() -> CarnotMapJet {
    heisenberg_map(vec![
        vec![(&[1, 0, 0], 1, 1)],
        vec![(&[0, 1, 0], 1, 1), (&[2, 0, 0], 1, 1)],
        vec![(&[0, 0, 1], 1, 1), (&[3, 0, 0], 1, 6)],
    ])
}

/// `(x_1, x_2, x_3 + x_1^3)`: moves `X_1` out of the horizontal bundle.
pub fn heisenberg_cubic() -> CarnotMapJet {
    heisenberg_map(vec![vec![(&[1, 0, 0], 1, 1)], vec![(&[0, 1, 0], 1, 1)], vec![(&[0, 0, 1], 1, 1), (&[3, 0, 0], 1, 1)]])
}

/// `(0, 0, x_1)`: sends the `X_1` direction to weight two.
pub fn heisenberg_collapse() -> CarnotMapJet {
    heisenberg_map(vec![vec![], vec![], vec![(&[1, 0, 0], 1, 1)]])
}

/// Quotient of the Engel group by its centre, onto the Heisenberg group.
pub fn engel_projection() -> CarnotMapJet {
    map_between(engel_group(), heisenberg3(), vec![vec![(&[1, 0, 0, 0], 1, 1)], vec![(&[0, 1, 0, 0], 1, 1)], vec![(&[0, 0, 1, 0], 1, 1)]])
}

/// `δ_λ` on the Engel group.
pub fn engel_dilation(l: i64) -> CarnotMapJet {
    map_between(
        engel_group(),
        engel_group(),
        vec![
            vec![(&[1, 0, 0, 0], l, 1)],
            vec![(&[0, 1, 0, 0], l, 1)],
            vec![(&[0, 0, 1, 0], l * l, 1)],
            vec![(&[0, 0, 0, 1], l * l * l, 1)],
        ],
    )
}

/// Carnot manifold maps between group fixtures, by name.
pub fn map_fixtures() -> Vec<(&'static str, CarnotMapJet)> {
    vec![
        ("heisenberg_identity", identity_map(&heisenberg3())),
        ("heisenberg_dilation2", heisenberg_dilation(2)),
        ("heisenberg_swap", heisenberg_swap()),
        ("heisenberg_contact", heisenberg_contact()),
        ("engel_projection", engel_projection()),
        ("engel_dilation3", engel_dilation(3)),
    ]
}

fn change(ctx: &PolyCtx<Q>, fwd: Vec<WPoly<Q>>, inv: Vec<WPoly<Q>>) -> CoordinateChange<Q> {
    let n = fwd.len();
    CoordinateChange { base: vec![q(0); n], forward: WPolyMap::endo(ctx, fwd), inverse: WPolyMap::endo(ctx, inv) }
}

/// `u = (x_1, x_2, x_3 + x_1 x_2)`.
pub fn heisenberg_shear() -> CoordinateChange<Q> {
    let ctx = PolyCtx::new(heisenberg3().weights().grading(), EXACT, ());
    let x = |i| WPoly::var(&ctx, i);
    change(&ctx, vec![x(0), x(1), x(2).add(&x(0).mul(&x(1)))], vec![x(0), x(1), x(2).sub(&x(0).mul(&x(1)))])
}

/// `(X_1, X_2 + x_1 X_1, X_3 + x_2 X_1)` for the Heisenberg group frame.
pub fn heisenberg_reframed() -> HFrame<Q> {
    let f = heisenberg3();
    let ctx = f.ctx().clone();
    let x1 = f.field(0).clone();
    let x2 = f.field(1).add(&x1.mul_poly(&WPoly::var(&ctx, 0)));
    let x3 = f.field(2).add(&x1.mul_poly(&WPoly::var(&ctx, 1)));
    HFrame::new(f.weights().clone(), vec![x1, x2, x3], vec![q(0); 3]).expect("reframed heisenberg")
}

/// `u = (x_1, x_2 + x_1^2)` on the plane.
pub fn plane_bend() -> CoordinateChange<Q> {
    let ctx = PolyCtx::new(abelian(2).weights().grading(), EXACT, ());
    let x = |i| WPoly::var(&ctx, i);
    change(&ctx, vec![x(0), x(1).add(&x(0).mul(&x(0)))], vec![x(0), x(1).sub(&x(0).mul(&x(0)))])
}

/// The coordinate frame of the chart `κ`, pulled back to the plane.
pub fn plane_bend_frame() -> HFrame<Q> {
    let f = abelian(2);
    let k = plane_bend();
    let back = CoordinateChange { base: k.base.clone(), forward: k.inverse.clone(), inverse: k.forward.clone() };
    crate::coords::pushforward_frame(&f, &back, EXACT).expect("pulled back frame")
}

/// Pairs of H-charts on the same reference frame, by name.
pub fn chart_pairs() -> Vec<(&'static str, GroupoidChart, GroupoidChart)> {
    let h = heisenberg3();
    let id = |name: &str, f: &HFrame<Q>| GroupoidChart::identity(name, f).expect("identity chart");
    vec![
        (
            "heisenberg_shear",
            id("heisenberg_id", &h),
            GroupoidChart::new("heisenberg_shear", h.clone(), h.clone(), heisenberg_shear()).expect("shear chart"),
        ),
        (
            "heisenberg_reframed",
            id("heisenberg_id", &h),
            GroupoidChart::new("heisenberg_reframed", h.clone(), heisenberg_reframed(), {
                let ctx = PolyCtx::new(h.weights().grading(), EXACT, ());
                CoordinateChange::identity(&ctx, vec![q(0); 3])
            })
            .expect("reframed chart"),
        ),
        (
            "variable_heisenberg_shear",
            id("variable_heisenberg_id", &variable_heisenberg()),
            GroupoidChart::new("variable_heisenberg_shear", variable_heisenberg(), variable_heisenberg(), heisenberg_shear())
                .expect("variable shear chart"),
        ),
        (
            "plane_bend",
            id("plane_id", &abelian(2)),
            GroupoidChart::new("plane_bend", abelian(2), plane_bend_frame(), plane_bend()).expect("bent chart"),
        ),
    ]
}
