use carnot_core::carnot_map::{carnot_differential, chain_rule_check};
use carnot_core::coords::{eps_carnot, is_carnot, nonlinear_monomials, pushforward_frame};
use carnot_core::fixtures;
use carnot_core::groupoid::{compose_elements, ChartPoint, GroupoidElement};
use carnot_core::io::{self, PolyJson};
use carnot_core::nilgroup::{validate_algebra, NilpotentGroup};
use carnot_core::scalar::{q, qf};
use carnot_core::weights::{dilate_q, pseudo_norm, weighted_degree, WeightSequence};
use carnot_core::wpoly::{invert_map, lie_bracket, PolyCtx, VectorField, WPoly, WPolyMap, EXACT};
use carnot_core::Q;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn nonzero() -> impl Strategy<Value = Q> {
    rat().prop_filter("nonzero", |t| *t != q(0))
}

fn point(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rat(), n)
}

/// Polynomial on weights `(1,1,2)` with exponents below 3.
fn poly3() -> impl Strategy<Value = WPoly<Q>> {
    prop::collection::vec((prop::collection::vec(0u32..3, 3), rat()), 0..5).prop_map(|terms| WPoly::from_terms(&PolyCtx::exact(&[1, 1, 2]), terms, EXACT))
}

fn field3() -> impl Strategy<Value = VectorField<Q>> {
    prop::collection::vec(poly3(), 3).prop_map(VectorField::new)
}

fn groups() -> Vec<NilpotentGroup<Q>> {
    fixtures::group_fixtures().into_iter().map(|(_, _, a)| NilpotentGroup::new(a)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dilations_compose(s in rat(), t in rat(), x in point(4)) {
        let w = [1, 1, 2, 3];
        prop_assert_eq!(dilate_q(&s, &dilate_q(&t, &x, &w), &w), dilate_q(&(s.clone() * &t), &x, &w));
    }

    #[test]
    fn pseudo_norm_is_homogeneous(t in nonzero(), x in point(4)) {
        let w = [1, 1, 2, 3];
        let lhs = pseudo_norm(&dilate_q(&t, &x, &w), &w);
        let rhs = carnot_core::scalar::q_to_f64(&t).abs() * pseudo_norm(&x, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn weighted_degree_is_additive(a in prop::collection::vec(0u32..5, 4), b in prop::collection::vec(0u32..5, 4)) {
        let w = WeightSequence::new(vec![1, 1, 2, 3]).unwrap();
        let c: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert_eq!(weighted_degree(&c, &w).unwrap(), weighted_degree(&a, &w).unwrap() + weighted_degree(&b, &w).unwrap());
    }

    #[test]
    fn homogeneous_parts_reconstruct(p in poly3()) {
        let mut sum = WPoly::zero_in(p.ctx());
        for l in 0..=12 {
            sum = sum.add(&p.hom_part(l).unwrap());
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn homogeneous_fields_scale_under_dilation(x in field3(), t in nonzero()) {
        for (l, part) in x.components() {
            let expect = part.scale(&if l >= 0 { carnot_core::scalar::q_pow(&t, l as u32) } else { carnot_core::scalar::q_pow(&t.recip(), (-l) as u32) });
            prop_assert_eq!(part.pullback_dilation(&t), expect);
        }
    }

    #[test]
    fn brackets_satisfy_jacobi(x in field3(), y in field3(), z in field3()) {
        let b = |u: &VectorField<Q>, v: &VectorField<Q>| lie_bracket(u, v).unwrap();
        let s = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
        prop_assert!(s.comps().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn inverse_jets_invert(p in poly3(), c in rat()) {
        // (x1, x2 + c x1^2, x3 + p) with p of order at least three in (x1, x2)
        let ctx = PolyCtx::exact(&[1, 1, 2]);
        let x = |i| WPoly::var(&ctx, i);
        let high: WPoly<Q> = WPoly::from_terms(&ctx, p.terms().iter().filter(|(a, _)| a[2] == 0 && a[0] + a[1] >= 3).map(|(a, v)| (a.clone(), v.clone())), EXACT);
        let phi = WPolyMap::endo(&ctx, vec![x(0), x(1).add(&x(0).mul(&x(0)).scale(&c)), x(2).add(&high)]);
        let inv = invert_map(&phi, 8).unwrap();
        let id = phi.compose(&inv, 8).unwrap();
        prop_assert_eq!(id.truncate(8), WPolyMap::identity(&ctx).truncate(8));
    }

    #[test]
    fn group_laws(x in point(4), y in point(4), z in point(4), t in rat()) {
        for g in groups() {
            let n = g.n();
            let (x, y, z) = (&x[..n], &y[..n], &z[..n]);
            prop_assert_eq!(g.mul(&g.mul(x, y), z), g.mul(x, &g.mul(y, z)));
            prop_assert_eq!(g.mul(x, &g.inverse(x)), g.identity());
            prop_assert_eq!(g.mul(&g.identity(), x), x.to_vec());
            let w = g.weights().as_slice().to_vec();
            prop_assert_eq!(dilate_q(&t, &g.mul(x, y), &w), g.mul(&dilate_q(&t, x, &w), &dilate_q(&t, y, &w)));
        }
    }

    #[test]
    fn adjoint_is_nilpotent(x in point(4)) {
        for g in groups() {
            let a = g.algebra().adjoint_matrix(&x[..g.n()]);
            let mut p = a.clone();
            for _ in 1..g.weights().r() {
                p = p.mul(&a);
            }
            prop_assert!(p.is_zero());
        }
    }

    #[test]
    fn tangent_algebras_are_lie_algebras(a in point(3)) {
        // the perturbed frame degenerates on x_3 = -1
        prop_assume!(a[2] != q(-1));
        for f in [fixtures::variable_heisenberg(), fixtures::perturbed_heisenberg(), fixtures::asymmetric_heisenberg()] {
            let alg = f.tangent_algebra_at(&a).unwrap();
            prop_assert!(validate_algebra(alg.weights(), &alg.entries(), &()).is_ok());
        }
    }

    #[test]
    fn eps_gives_carnot_coordinates(a in point(3)) {
        prop_assume!(a[2] != q(-1));
        for f in [fixtures::variable_heisenberg(), fixtures::perturbed_heisenberg()] {
            let fa = f.with_basepoint(a.clone()).unwrap();
            let e = eps_carnot(&fa, &a).unwrap();
            let pushed = pushforward_frame(&fa, &e.chart().unwrap(), EXACT).unwrap();
            prop_assert!(is_carnot(&pushed, &e.algebra).is_ok());
        }
    }

    #[test]
    fn eps_coefficients_are_unique(a in point(4), pick in 0usize..64, c in nonzero()) {
        let f = fixtures::engel4();
        let fa = f.with_basepoint(a.clone()).unwrap();
        let e = eps_carnot(&fa, &a).unwrap();
        let w = f.weights().as_slice().to_vec();
        let slots: Vec<(usize, Vec<u32>)> = (0..4).flat_map(|k| nonlinear_monomials(&w, w[k]).into_iter().map(move |m| (k, m))).collect();
        let (k, m) = slots[pick % slots.len()].clone();
        let mut j = io::eps_to_json(&e);
        let old = e.d.get(&(k, m.clone())).cloned().unwrap_or_else(|| q(0));
        j.d.retain(|t| !(t.k == k + 1 && t.m == m));
        j.d.push(io::DTermJson { k: k + 1, m, c: carnot_core::scalar::fmt_q(&(old + c)) });
        let bad = io::eps_from_json(&j).unwrap();
        let pushed = pushforward_frame(&fa, &bad.chart().unwrap(), EXACT).unwrap();
        prop_assert!(!is_carnot(&pushed, &e.algebra).is_ok());
    }

    #[test]
    fn differentials_commute_with_dilations(a in point(3), x in point(3), t in rat()) {
        for m in [fixtures::heisenberg_contact(), fixtures::heisenberg_swap()] {
            let d = carnot_differential(&m.with_base(a.clone()).unwrap()).unwrap();
            let w = [1, 1, 2];
            prop_assert_eq!(d.apply(&dilate_q(&t, &x, &w)), dilate_q(&t, &d.apply(&x), &w));
        }
    }

    #[test]
    fn chain_rule_at_random_points(a in point(3)) {
        let f = fixtures::heisenberg_contact().with_base(a).unwrap();
        prop_assert!(chain_rule_check(&f, &fixtures::heisenberg_swap()).unwrap().is_ok());
    }

    #[test]
    fn fibre_products_associate(x in point(3), a in point(3), b in point(3), c in point(3)) {
        let f = fixtures::variable_heisenberg();
        let e = |xi: &Vec<Q>| GroupoidElement::Tangent { x: x.clone(), xi: xi.clone() };
        let l = compose_elements(&f, &compose_elements(&f, &e(&a), &e(&b)).unwrap(), &e(&c)).unwrap();
        let r = compose_elements(&f, &e(&a), &compose_elements(&f, &e(&b), &e(&c)).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn chart_coordinates_round_trip(x in point(3), y in point(3), t in nonzero()) {
        for (_, c1, c2) in fixtures::chart_pairs().into_iter().filter(|p| p.1.n() == 3) {
            for c in [&c1, &c2] {
                let g = GroupoidElement::pair(x.clone(), y.clone(), t.clone()).unwrap();
                prop_assert_eq!(c.chart_inverse(&c.chart_coords(&g).unwrap()).unwrap(), g);
                let p = ChartPoint::new(x.clone(), y.clone(), q(0));
                prop_assert_eq!(c.chart_coords(&c.chart_inverse(&p).unwrap()).unwrap(), p);
            }
        }
    }

    #[test]
    fn polynomials_round_trip_through_json(p in poly3()) {
        let j: PolyJson = io::poly_to_json(&p);
        let s = serde_json::to_string(&j).unwrap();
        let back: PolyJson = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(io::poly_from_json(p.ctx(), &back, "p").unwrap(), p);
    }
}
