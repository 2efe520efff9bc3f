use super::*;
use crate::fixtures::{self, poly};
use crate::scalar::{q, qf};

fn qs(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn group(alg: GradedNilpotentAlgebra<Q>) -> NilpotentGroup<Q> {
    NilpotentGroup::new(alg)
}

#[test]
fn heisenberg_eps_matches_closed_form() {
    let f = fixtures::heisenberg3();
    let y = vec![q(1), qf(-2, 3), q(5)];
    let eps = eps_carnot(&f, &y).unwrap();
    assert!(eps.d.is_empty());
    for x in [qs(&[0, 0, 0]), qs(&[2, -1, 3]), vec![qf(1, 2), q(4), qf(-7, 3)]] {
        let expect = vec![
            x[0].clone() - &y[0],
            x[1].clone() - &y[1],
            x[2].clone() - &y[2] - (y[0].clone() * &x[1] - y[1].clone() * &x[0]) / q(2),
        ];
        assert_eq!(eps.apply(&x), expect);
        assert_eq!(eps.apply_inverse(&expect), x);
    }
}

#[test]
fn eps_is_trivial_at_the_identity_of_a_group() {
    for (name, f, _) in fixtures::group_fixtures() {
        let eps = eps_carnot(&f, f.basepoint()).unwrap();
        assert!(eps.is_trivial(), "{name}");
    }
}

#[test]
fn eps_chart_gives_carnot_coordinates() {
    for (name, f) in fixtures::all_frames() {
        for a in [vec![q(0); f.n()], (1..=f.n() as i64).map(|i| qf(i, 3)).collect::<Vec<_>>()] {
            let (eps, pushed) = carnot_chart(&f.with_basepoint(a.clone()).unwrap()).unwrap();
            let rep = is_carnot(&pushed, &eps.algebra);
            assert!(rep.is_ok(), "{name} at {a:?}: {}", rep.summary());
            let chart = eps.chart().unwrap();
            let u = chart.apply(&a);
            assert!(u.iter().all(|c| *c == q(0)), "{name}");
        }
    }
}

#[test]
fn asymmetric_gauge_is_privileged_but_not_carnot() {
    let f = fixtures::asymmetric_heisenberg();
    assert!(is_privileged(&f).is_ok());
    let rep = is_carnot(&f, &fixtures::heisenberg_algebra());
    assert!(rep.has("not_carnot"));
    assert!(rep.violations[0].message.contains("X_1"), "{}", rep.summary());
    let eps = eps_carnot(&f, f.basepoint()).unwrap();
    // ε̂_3 = y_3 + y_1 y_2 / 2
    assert_eq!(eps.d.len(), 1);
    assert_eq!(eps.d[&(2, vec![1, 1, 0])], qf(1, 2));
}

#[test]
fn privileged_failures_are_reported() {
    let rep = is_privileged(&fixtures::non_privileged());
    assert!(rep.has("not_privileged"));
    assert!(rep.violations[0].message.starts_with("X_1"), "{}", rep.summary());
    assert!(model_vector_fields(&fixtures::non_privileged()).is_err());

    let f = fixtures::heisenberg3().with_basepoint(qs(&[1, 1, 1])).unwrap();
    assert!(is_privileged(&f).has("not_adapted"));
    let lin = linearly_adapt(&f, f.basepoint()).unwrap();
    assert!(is_privileged(&pushforward_frame(&f, &lin, EXACT).unwrap()).is_ok());
}

#[test]
fn linear_adaptation_of_a_scaled_frame() {
    let w = WeightSequence::new(vec![1, 1, 2]).unwrap();
    let ctx = PolyCtx::new(w.grading(), EXACT, ());
    let fields = vec![
        VectorField::new(vec![poly(&ctx, &[(&[0, 0, 0], 2, 1)]), poly(&ctx, &[]), poly(&ctx, &[])]),
        VectorField::new(vec![poly(&ctx, &[]), poly(&ctx, &[(&[0, 0, 0], 3, 1)]), poly(&ctx, &[(&[1, 0, 0], 3, 1)])]),
        VectorField::new(vec![poly(&ctx, &[]), poly(&ctx, &[]), poly(&ctx, &[(&[0, 0, 0], 6, 1)])]),
    ];
    let f = HFrame::new(w, fields, qs(&[0, 0, 0])).unwrap();
    assert!(is_privileged(&f).has("not_adapted"));
    let chg = linearly_adapt(&f, &qs(&[0, 0, 0])).unwrap();
    assert_eq!(chg.apply(&qs(&[2, 3, 6])), qs(&[1, 1, 1]));
    let pushed = pushforward_frame(&f, &chg, EXACT).unwrap();
    assert!(is_privileged(&pushed).is_ok());
    // X_2 = ∂_2 + x_1 ∂_3 in the adapted coordinates
    assert_eq!(pushed.field(1).comp(2), &poly(pushed.ctx(), &[(&[1, 0, 0], 1, 1)]));
    assert_eq!(pushed.tangent_algebra_at(&qs(&[0, 0, 0])).unwrap().constant(0, 1, 2), q(1));
}

#[test]
fn heisenberg_shear_keeps_the_structure_constant() {
    let f = fixtures::heisenberg3();
    let ctx = f.ctx().clone();
    let x = |i| WPoly::var(&ctx, i);
    let fwd = WPolyMap::endo(&ctx, vec![x(0), x(1), x(2).add(&x(0).mul(&x(1)))]);
    let inv = WPolyMap::endo(&ctx, vec![x(0), x(1), x(2).sub(&x(0).mul(&x(1)))]);
    let chg = CoordinateChange { base: qs(&[0, 0, 0]), forward: fwd, inverse: inv };
    let g = pushforward_frame(&f, &chg, EXACT).unwrap();
    assert!(is_privileged(&g).is_ok());
    let alg = g.tangent_algebra_at(&qs(&[0, 0, 0])).unwrap();
    assert_eq!(alg.constant(0, 1, 2), q(1));
    assert!(is_carnot(&g, &alg).has("not_carnot"));
    let (_, back) = carnot_chart(&g).unwrap();
    assert!(is_carnot(&back, &alg).is_ok());
}

#[test]
fn carnot_charts_agree_to_first_order() {
    for (name, f) in fixtures::all_frames() {
        let a: Vec<Q> = (0..f.n() as i64).map(|i| qf(i - 1, 2)).collect();
        let fa = f.with_basepoint(a.clone()).unwrap();
        let eps = eps_carnot(&fa, &a).unwrap().chart().unwrap();
        let r = f.weights().r() as i64;
        let can = exp_coordinates(&fa, &a, ExpMode::Canonical, r + 1).unwrap();
        let diff = eps.forward.compose(&can.inverse, r + 1).unwrap();
        let ctx = diff.source().clone();
        let disc = diff.sub(&WPolyMap::identity(&ctx));
        assert!(disc.weighted_order().at_least(1), "{name}: {:?}", disc.weighted_order());
    }
}

#[test]
fn conversion_coordinates_of_a_group_are_the_identity() {
    for (name, f, _) in fixtures::group_fixtures() {
        let chg = exp_coordinates(&f, f.basepoint(), ExpMode::Conversion, EXACT).unwrap();
        assert_eq!(chg.forward, WPolyMap::identity(f.ctx()), "{name}");
        let can = exp_coordinates(&f, f.basepoint(), ExpMode::Canonical, 2 * f.weights().r() as i64).unwrap();
        assert_eq!(can.forward.truncate(f.weights().r() as i64), WPolyMap::identity(f.ctx()).truncate(f.weights().r() as i64), "{name}");
    }
}

#[test]
fn osculation_vanishes_for_groups() {
    for (name, f, alg) in fixtures::group_fixtures() {
        let osc = osculation_residual(&f, &group(alg), 6).unwrap();
        assert!(osc.is_zero(), "{name}");
    }
}

#[test]
fn osculation_has_order_one_off_groups() {
    for f in [fixtures::perturbed_heisenberg(), fixtures::variable_heisenberg()] {
        let (eps, fc) = carnot_chart(&f).unwrap();
        let osc = osculation_residual(&fc, &group(eps.algebra.clone()), 4).unwrap();
        assert!(osc.is_ok(), "{:?} {:?}", osc.order, osc.inverse_order);
        assert!(!osc.is_zero());
    }
}

#[test]
fn nonlinear_monomials_are_ordered() {
    let m = nonlinear_monomials(&[1, 1, 2], 2);
    assert_eq!(m, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0]]);
    assert!(nonlinear_monomials(&[1, 1, 2], 1).is_empty());
    // three of degree 2, six of degree 3
    assert_eq!(nonlinear_monomials(&[1, 1, 2, 3], 3).len(), 9);
}

#[test]
fn coordinate_change_composition() {
    let f = fixtures::variable_heisenberg();
    let a = vec![q(1), q(2), q(0)];
    let fa = f.with_basepoint(a.clone()).unwrap();
    let lin = linearly_adapt(&fa, &a).unwrap();
    let pushed = pushforward_frame(&fa, &lin, EXACT).unwrap();
    let eps = eps_carnot(&pushed, pushed.basepoint()).unwrap().chart().unwrap();
    let total = lin.then(&eps, EXACT).unwrap();
    let x = vec![qf(1, 3), q(-1), q(2)];
    assert_eq!(total.unapply(&total.apply(&x)), x);
    assert_eq!(total.apply(&x), eps.apply(&lin.apply(&x)));
}

#[test]
fn eps_family_matches_pointwise_maps() {
    let f = fixtures::variable_heisenberg();
    let p0 = vec![q(1), q(0), q(2)];
    let fam = eps_family(&f, &p0, 8).unwrap();
    let p = vec![qf(1, 10), qf(-1, 10), q(0)];
    let b: Vec<Q> = p0.iter().zip(&p).map(|(a, c)| a.clone() + c).collect();
    let eps = eps_carnot(&f, &b).unwrap();
    let xi = vec![qf(1, 5), qf(1, 5), qf(1, 7)];
    let x: Vec<Q> = p0.iter().zip(&xi).map(|(a, c)| a.clone() + c).collect();
    let mut arg = p.clone();
    arg.extend(xi.clone());
    let sym: Vec<f64> = fam.forward.comps().iter().map(|c| crate::scalar::q_to_f64(&c.eval(&arg))).collect();
    let num: Vec<f64> = eps.apply(&x).iter().map(crate::scalar::q_to_f64).collect();
    for (s, v) in sym.iter().zip(&num) {
        assert!((s - v).abs() < 1e-4, "{sym:?} {num:?}");
    }
    let fam = eps_family(&fixtures::heisenberg3(), &p0, 4).unwrap();
    let u = vec![q(1), q(2), q(3)];
    let mut arg = vec![q(0); 3];
    arg.extend(u.clone());
    let back: Vec<Q> = fam.inverse.comps().iter().map(|c| c.eval(&arg)).collect();
    let expect: Vec<Q> = eps_carnot(&fixtures::heisenberg3(), &p0).unwrap().apply_inverse(&u).iter().zip(&p0).map(|(a, b)| a.clone() - b).collect();
    assert_eq!(back, expect);
}
