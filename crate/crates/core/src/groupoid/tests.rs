use super::*;
use crate::fixtures;
use crate::scalar::{q, qf};

fn qs(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn heis_id() -> GroupoidChart {
    GroupoidChart::identity("heisenberg_id", &fixtures::heisenberg3()).unwrap()
}

#[test]
fn units_map_to_the_zero_section() {
    for (_, c1, c2) in fixtures::chart_pairs() {
        for c in [&c1, &c2] {
            let x = vec![qf(1, 2); c.n()];
            let p = c.chart_coords(&GroupoidElement::unit(x.clone(), qf(1, 3))).unwrap();
            assert_eq!(p.x, c.kappa(&x));
            assert!(p.y.iter().all(|v| v.is_zero()));
            assert_eq!(c.chart_inverse(&ChartPoint::new(p.x.clone(), p.y, q(2))).unwrap(), GroupoidElement::unit(x, q(2)));
        }
    }
}

#[test]
fn heisenberg_chart_rescales_by_dilation() {
    let c = heis_id();
    let t = qf(1, 4);
    let g = GroupoidElement::pair(qs(&[0, 0, 0]), vec![t.clone(), t.clone(), t.clone() * &t * q(5)], t.clone()).unwrap();
    assert_eq!(c.chart_coords(&g).unwrap(), ChartPoint::new(qs(&[0, 0, 0]), qs(&[1, 1, 5]), t));
}

#[test]
fn abelian_chart_is_the_classical_one() {
    let (_, c1, c2) = fixtures::chart_pairs().into_iter().find(|p| p.0 == "plane_bend").unwrap();
    let x = vec![qf(1, 2), q(-1)];
    let y = vec![q(2), qf(1, 3)];
    let t = qf(1, 5);
    for c in [&c1, &c2] {
        let p = c.chart_coords(&GroupoidElement::pair(x.clone(), y.clone(), t.clone()).unwrap()).unwrap();
        let ku = c.kappa(&x);
        let kv = c.kappa(&y);
        let expect: Vec<Q> = kv.iter().zip(&ku).map(|(a, b)| (a.clone() - b) / &t).collect();
        assert_eq!(p, ChartPoint::new(ku, expect, t.clone()));
    }
}

#[test]
fn tangent_branch_uses_the_inverse_differential() {
    let (_, _, c) = fixtures::chart_pairs().into_iter().find(|p| p.0 == "heisenberg_reframed").unwrap();
    let x = qs(&[1, 2, 0]);
    let d = c.differential_at(&x).unwrap();
    // X_2 = X'_2 - x_1 X'_1
    assert_eq!(d.get(0, 1), &q(-1));
    let g = c.chart_inverse(&ChartPoint::new(x.clone(), qs(&[1, 1, 1]), q(0))).unwrap();
    assert_eq!(g, GroupoidElement::Tangent { x: x.clone(), xi: qs(&[2, 1, 1]) });
    assert_eq!(c.chart_coords(&g).unwrap().y, qs(&[1, 1, 1]));
}

#[test]
fn chart_round_trips() {
    for (_, c1, c2) in fixtures::chart_pairs() {
        let n = c1.n();
        let pts: Vec<Vec<Q>> = vec![vec![q(0); n], (0..n as i64).map(|i| qf(i + 1, 3)).collect(), vec![q(-1); n]];
        for c in [&c1, &c2] {
            for x in &pts {
                for y in &pts {
                    for t in [q(1), qf(-1, 2), qf(1, 7)] {
                        let g = GroupoidElement::pair(x.clone(), y.clone(), t).unwrap();
                        assert_eq!(c.chart_inverse(&c.chart_coords(&g).unwrap()).unwrap(), g);
                    }
                    let g = GroupoidElement::Tangent { x: x.clone(), xi: y.clone() };
                    assert_eq!(c.chart_inverse(&c.chart_coords(&g).unwrap()).unwrap(), g);
                }
            }
        }
    }
}

#[test]
fn fibre_composition_and_guards() {
    let f = fixtures::heisenberg3();
    let g = GroupoidElement::Tangent { x: qs(&[0, 0, 0]), xi: qs(&[1, 0, 0]) };
    let h = GroupoidElement::Tangent { x: qs(&[0, 0, 0]), xi: qs(&[0, 1, 0]) };
    assert_eq!(compose_elements(&f, &g, &h).unwrap(), GroupoidElement::Tangent { x: qs(&[0, 0, 0]), xi: vec![q(1), q(1), qf(1, 2)] });
    let a = GroupoidElement::pair(qs(&[0, 0, 0]), qs(&[1, 0, 0]), q(1)).unwrap();
    let b = GroupoidElement::pair(qs(&[1, 0, 0]), qs(&[1, 1, 0]), q(2)).unwrap();
    assert!(compose_elements(&f, &a, &b).is_err());
    assert!(compose_elements(&f, &a, &g).is_err());
    assert!(GroupoidElement::pair(qs(&[0, 0, 0]), qs(&[0, 0, 0]), q(0)).is_err());
    assert_eq!(invert_element(&a), GroupoidElement::pair(qs(&[1, 0, 0]), qs(&[0, 0, 0]), q(1)).unwrap());
    assert_eq!(invert_element(&invert_element(&g)), g);
}

#[test]
fn chart_operations_at_t_zero() {
    let c = heis_id();
    let x = qs(&[1, 0, 0]);
    assert_eq!(c.chart_mult(&x, &qs(&[1, 0, 0]), &qs(&[0, 1, 0]), &q(0)).unwrap(), vec![q(1), q(1), qf(1, 2)]);
    assert_eq!(c.chart_invert(&x, &qs(&[1, 2, 3]), &q(0)).unwrap(), ChartPoint::new(x.clone(), qs(&[-1, -2, -3]), q(0)));
    let y = qs(&[2, -1, 1]);
    assert_eq!(c.chart_mult(&x, &y, &qs(&[0, 0, 0]), &qf(1, 3)).unwrap(), y);
}

#[test]
fn group_charts_have_vanishing_remainders() {
    let c = heis_id();
    assert!(mult_remainder(&c, 4).unwrap().theta_is_zero());
    assert!(invert_remainder(&c, 4).unwrap().theta_is_zero());
    let r = transition_remainder(&c, &c, 4).unwrap();
    assert!(r.theta_is_zero());
    let x = vec![q(0); 3];
    let y = qs(&[1, 2, 3]);
    assert_eq!(r.eval(&x, &y, &q(0)), y);
    for t in [qf(1, 2), q(1)] {
        let inv = c.chart_invert(&qs(&[1, 1, 0]), &y, &t).unwrap();
        assert_eq!(inv.y, y.iter().map(|v| -v.clone()).collect::<Vec<_>>());
    }
}

#[test]
fn transition_remainder_is_a_polynomial_witness() {
    for (name, c1, c2) in fixtures::chart_pairs() {
        let r = transition_remainder(&c1, &c2, 6).unwrap();
        let n = c1.n();
        let x: Vec<Q> = (0..n as i64).map(|i| qf(2 - i, 2)).collect();
        let u = c1.kappa(&x);
        let d = c2.differential_at(&x).unwrap().mul(&c1.differential_at(&x).unwrap().inverse().unwrap());
        let y: Vec<Q> = (0..n as i64).map(|i| qf(i + 1, 2)).collect();
        assert_eq!(r.eval(&u, &y, &q(0)), d.mul_vec(&y), "{name}");
        let p = transition(&c1, &c2, &ChartPoint::new(u.clone(), y.clone(), q(0))).unwrap();
        assert_eq!(p.y, d.mul_vec(&y), "{name}");
        let slope = remainder_slope(|t| Ok(transition(&c1, &c2, &ChartPoint::new(u.clone(), y.clone(), t.clone()))?.y)).unwrap();
        if r.theta_is_zero() {
            assert!(slope.is_none(), "{name}");
        } else {
            assert!(slope.is_some_and(|s| s >= 0.9), "{name}: {slope:?}");
        }
    }
}

#[test]
fn connes_transition_on_the_plane() {
    let (_, c1, c2) = fixtures::chart_pairs().into_iter().find(|p| p.0 == "plane_bend").unwrap();
    let x = vec![qf(1, 2), q(1)];
    let y = vec![q(1), q(-2)];
    let t = qf(1, 3);
    let p = transition(&c1, &c2, &ChartPoint::new(x.clone(), y.clone(), t.clone())).unwrap();
    let phi = |v: &[Q]| c2.kappa(&c1.kappa_inv(v));
    let moved: Vec<Q> = x.iter().zip(&y).map(|(a, b)| a.clone() + t.clone() * b).collect();
    let expect: Vec<Q> = phi(&moved).iter().zip(phi(&x)).map(|(a, b)| (a.clone() - b) / &t).collect();
    assert_eq!(p, ChartPoint::new(phi(&x), expect, t.clone()));
    let z = vec![q(3), qf(1, 2)];
    let sum: Vec<Q> = y.iter().zip(&z).map(|(a, b)| a.clone() + b).collect();
    assert_eq!(c2.chart_mult(&x, &y, &z, &t).unwrap(), sum);
    let inv = c2.chart_invert(&x, &y, &t).unwrap();
    assert_eq!(inv.x, moved);
    assert_eq!(inv.y, y.iter().map(|v| -v.clone()).collect::<Vec<_>>());
}

#[test]
fn convergence_probe_examples() {
    let c = heis_id();
    let ts = probe_times(10);
    let seq: Vec<_> = ts.iter().map(|t| (qs(&[0, 0, 0]), vec![t.clone(), q(0), q(0)], t.clone())).collect();
    let r = convergence_probe(&c, &seq).unwrap();
    assert!(r.converged);
    assert_eq!(r.xi, Some(qs(&[1, 0, 0])));
    let seq: Vec<_> = (1..=10u32)
        .map(|l| {
            let s = Q::new(1.into(), num_bigint::BigInt::from(2).pow(l));
            (qs(&[0, 0, 0]), vec![s.clone(), q(0), q(0)], s.clone() * &s)
        })
        .collect();
    let r = convergence_probe(&c, &seq).unwrap();
    assert!(!r.converged, "{}", r.diagnostics);
    // constant in rescaled coordinates of another chart
    for (name, c1, c2) in fixtures::chart_pairs() {
        let n = c1.n();
        let x: Vec<Q> = (0..n as i64).map(|i| qf(i, 4)).collect();
        let xi: Vec<Q> = (0..n as i64).map(|i| qf(1 - i, 3)).collect();
        let u = c2.kappa(&x);
        let v = c2.differential_at(&x).unwrap().mul_vec(&xi);
        let seq: Vec<_> = ts
            .iter()
            .map(|t| match c2.chart_inverse(&ChartPoint::new(u.clone(), v.clone(), t.clone())).unwrap() {
                GroupoidElement::Pair { x, y, t } => (x, y, t),
                _ => unreachable!(),
            })
            .collect();
        let r1 = convergence_probe(&c1, &seq).unwrap();
        let r2 = convergence_probe(&c2, &seq).unwrap();
        assert!(r1.converged && r2.converged, "{name}: {} / {}", r1.diagnostics, r2.diagnostics);
        assert_eq!(r2.xi.as_ref(), Some(&xi), "{name}");
        assert_eq!(r1.xi, r2.xi, "{name}");
        assert_eq!(r1.x, x);
    }
}

#[test]
fn morphisms_respect_composition() {
    let f = fixtures::heisenberg3();
    let m = fixtures::heisenberg_dilation(3);
    let g = GroupoidElement::Tangent { x: qs(&[0, 0, 0]), xi: qs(&[1, 0, 0]) };
    assert_eq!(morphism_apply(&m, &g).unwrap(), GroupoidElement::Tangent { x: qs(&[0, 0, 0]), xi: qs(&[3, 0, 0]) });
    let id = fixtures::identity_map(&f);
    let p = GroupoidElement::pair(qs(&[1, 0, 0]), qs(&[0, 1, 2]), qf(1, 2)).unwrap();
    assert_eq!(morphism_apply(&id, &p).unwrap(), p);
    for m in [fixtures::heisenberg_contact(), fixtures::heisenberg_swap()] {
        for x in [qs(&[0, 0, 0]), qs(&[1, -1, 2])] {
            let a = GroupoidElement::Tangent { x: x.clone(), xi: qs(&[1, 2, 0]) };
            let b = GroupoidElement::Tangent { x: x.clone(), xi: vec![q(0), qf(1, 2), q(1)] };
            let lhs = morphism_apply(&m, &compose_elements(&f, &a, &b).unwrap()).unwrap();
            let rhs = compose_elements(&f, &morphism_apply(&m, &a).unwrap(), &morphism_apply(&m, &b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let pa = GroupoidElement::pair(x.clone(), qs(&[0, 1, 0]), q(2)).unwrap();
            let pb = GroupoidElement::pair(qs(&[0, 1, 0]), qs(&[1, 1, 1]), q(2)).unwrap();
            let lhs = morphism_apply(&m, &compose_elements(&f, &pa, &pb).unwrap()).unwrap();
            let rhs = compose_elements(&f, &morphism_apply(&m, &pa).unwrap(), &morphism_apply(&m, &pb).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        let mm = m.then(&m).unwrap();
        let g = GroupoidElement::Tangent { x: qs(&[1, 0, 0]), xi: qs(&[1, 1, 1]) };
        assert_eq!(morphism_apply(&mm, &g).unwrap(), morphism_apply(&m, &morphism_apply(&m, &g).unwrap()).unwrap());
    }
}

#[test]
fn axioms_hold_on_both_strata() {
    for (name, c1, c2) in fixtures::chart_pairs() {
        let n = c1.n();
        let pts = vec![vec![q(0); n], (0..n as i64).map(|i| qf(i + 1, 2)).collect()];
        let fib = vec![(0..n as i64).map(|i| q(i - 1)).collect(), vec![qf(1, 2); n]];
        for c in [&c1, &c2] {
            let rep = axioms_report(c, &pts, &fib, &[q(0), qf(1, 2)]).unwrap();
            assert!(rep.is_ok(), "{name}: {}", rep.summary());
        }
    }
}

