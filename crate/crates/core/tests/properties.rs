use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use obstruct8::bundles::{su_adjoint_bundle, ComplexBundleData, RealBundleData};
use obstruct8::catalog::{builtin_model, ManifoldModel, BUILTIN_NAMES};
use obstruct8::cohomology::expr::parse_affine;
use obstruct8::criteria::*;
use obstruct8::search::{default_periods, residue_summary, sweep, BoxSlot, Parameter, SearchSpace, SweepOptions};
use obstruct8::{IntClass, Mod2Class};

fn models() -> &'static Vec<ManifoldModel> {
    static M: OnceLock<Vec<ManifoldModel>> = OnceLock::new();
    M.get_or_init(|| BUILTIN_NAMES.iter().map(|n| builtin_model(n).unwrap()).collect())
}

fn by_name(name: &str) -> &'static ManifoldModel {
    models().iter().find(|m| m.name == name).unwrap()
}

/// A class of `degree` from raw coordinates, cycled to the right length.
fn class(m: &ManifoldModel, degree: usize, raw: &[i64]) -> IntClass {
    let g = m.ring.group(degree);
    let at = |i: usize| BigInt::from(raw[i % raw.len()]);
    let free = (0..g.free_rank).map(at).collect();
    let tors = (0..g.torsion.len()).map(|i| at(g.free_rank + i)).collect();
    m.ring.reduce(IntClass::from_parts(degree, free, tors))
}

fn mod2(m: &ManifoldModel, degree: usize, raw: &[bool]) -> Mod2Class {
    Mod2Class::new(degree, (0..m.ring.mod2_dim(degree)).map(|i| raw[i % raw.len()]).collect())
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-4i64..=4, 4)
}

fn bits() -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), 4)
}

fn model_index() -> impl Strategy<Value = usize> {
    0..BUILTIN_NAMES.len()
}

fn even_pair() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(2usize, 2usize), (2, 4), (2, 6), (4, 4), (4, 2), (6, 2)])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cup_is_bilinear_and_commutative(mi in model_index(), (a, b) in even_pair(), x in coords(), y in coords(), z in coords()) {
        let m = &models()[mi];
        let r = &m.ring;
        let (x, z, y) = (class(m, a, &x), class(m, a, &z), class(m, b, &y));
        let xy = r.cup(&x, &y).unwrap();
        prop_assert_eq!(&xy, &r.cup(&y, &x).unwrap());
        let left = r.cup(&r.add(&x, &z).unwrap(), &y).unwrap();
        prop_assert_eq!(left, r.add(&xy, &r.cup(&z, &y).unwrap()).unwrap());
    }

    #[test]
    fn rho2_is_a_ring_map(mi in model_index(), (a, b) in even_pair(), x in coords(), y in coords(), z in coords()) {
        let m = &models()[mi];
        let r = &m.ring;
        let (x, z, y) = (class(m, a, &x), class(m, a, &z), class(m, b, &y));
        prop_assert_eq!(r.rho2(&r.add(&x, &z).unwrap()), r.add2(&r.rho2(&x), &r.rho2(&z)).unwrap());
        prop_assert_eq!(r.rho2(&r.cup(&x, &y).unwrap()), r.cup2(&r.rho2(&x), &r.rho2(&y)).unwrap());
    }

    #[test]
    fn sq2_is_additive_and_wu_on_degree_6(mi in model_index(), d in prop::sample::select(vec![2usize, 4, 6]), p in bits(), q in bits()) {
        let m = &models()[mi];
        let r = &m.ring;
        let (p, q) = (mod2(m, d, &p), mod2(m, d, &q));
        let sum = r.sq2(&r.add2(&p, &q).unwrap()).unwrap();
        prop_assert_eq!(sum, r.add2(&r.sq2(&p).unwrap(), &r.sq2(&q).unwrap()).unwrap());
        if d == 6 {
            prop_assert_eq!(r.sq2(&p).unwrap(), r.cup2(r.w2(), &p).unwrap());
        }
    }

    #[test]
    fn evaluation_is_linear(mi in model_index(), x in coords(), y in coords(), n in -5i64..=5, d in 1i64..=12) {
        let m = &models()[mi];
        let r = &m.ring;
        let (x, y) = (class(m, 8, &x), class(m, 8, &y));
        let lhs = r.evaluate(&r.add(&r.scale(&BigInt::from(n), &x), &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, BigInt::from(n) * r.evaluate(&x).unwrap() + r.evaluate(&y).unwrap());
        let v = r.evaluate(&x).unwrap();
        let q = r.eval_rational(&x, &BigInt::from(d)).unwrap();
        prop_assert_eq!(q.is_integer, (&v % d).is_zero());
    }

    #[test]
    fn u3_verdict_is_twist_invariant(name in prop::sample::select(vec!["CP4", "CP2xCP2", "Gr24", "S2xS6", "V6"]),
                                     c in proptest::collection::vec(coords(), 3), mv in coords()) {
        let m = by_name(name);
        let r = &m.ring;
        let lines: Vec<ComplexBundleData> =
            c.iter().map(|v| ComplexBundleData::line(r, &class(m, 2, v)).unwrap()).collect();
        let z = lines[1..].iter().fold(lines[0].clone(), |acc, b| ComplexBundleData::whitney_sum(r, &acc, b).unwrap());
        let xi = su_adjoint_bundle(r, &z).unwrap();
        let (l, u, v) = (z.c1.clone(), z.c2.clone(), z.c3.clone());
        let mm = class(m, 2, &mv);
        let sq = |a: &IntClass, b: &IntClass| r.cup(a, b).unwrap();
        let l2 = r.combo(&[(1, &l), (3, &mm)]).unwrap();
        let lm = sq(&l, &mm);
        let m2 = sq(&mm, &mm);
        let u2 = r.combo(&[(1, &u), (2, &lm), (3, &m2)]).unwrap();
        let (um, lm2, m3) = (sq(&u, &mm), sq(&l, &m2), sq(&mm, &m2));
        let v2 = r.combo(&[(1, &v), (1, &um), (1, &lm2), (1, &m3)]).unwrap();
        let a = u3_adjoint(m, &xi, &l, &u, &v).map(|x| x.verdict);
        let b = u3_adjoint(m, &xi, &l2, &u2, &v2).map(|x| x.verdict);
        prop_assert!(a.is_ok(), "{:?}", a);
        prop_assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn tangent_congruences_hold(mi in model_index(), lv in coords()) {
        let m = &models()[mi];
        let r = &m.ring;
        let t = m.tangent.as_real_bundle();
        // Move l onto the coset of lifts of w2(M).
        let l = r.add(&m.tangent.c, &r.scale(&BigInt::from(2), &class(m, 2, &lv))).unwrap();
        prop_assert!(congruence_4b(m, &t, &l).unwrap().verdict.is_pass());
        prop_assert!(mod3_combination(m, &t, &l).unwrap().verdict.is_pass());
    }

    #[test]
    fn triality_keeps_q1_and_the_p2_relation(name in prop::sample::select(vec!["S8", "HP2", "S4xS4", "Gr24", "V6", "CP2xCP2"]),
                                              q in coords(), e in coords(), q2 in coords()) {
        // A spin bundle assembled from (q1, e, q2) with p2 = q1^2 + 2e + 4 q2.
        let m = by_name(name);
        let r = &m.ring;
        let (q1, e, q2) = (class(m, 4, &q), class(m, 8, &e), class(m, 8, &q2));
        let q1sq = r.cup(&q1, &q1).unwrap();
        let p2 = r.combo(&[(1, &q1sq), (2, &e), (4, &q2)]).unwrap();
        let mut xi = RealBundleData::trivial(r, 8);
        xi.p1 = r.scale(&BigInt::from(2), &q1);
        xi.w4 = r.rho2(&q1);
        xi.p2 = p2;
        xi.e = Some(e.clone());
        xi.q1 = Some(obstruct8::bundles::SpinLift { lift: r.zero(2), q1: q1.clone() });
        let img = triality_transform(r, &xi).unwrap();
        prop_assert_eq!(&img.q1, &q1);
        prop_assert_eq!(&img.q2, &q2);
        prop_assert_eq!(img.image.e.clone().unwrap(), r.neg(&q2));
        prop_assert_eq!(&img.image_q2, &r.neg(&e));
        let after = r.combo(&[(1, &q1sq), (2, img.image.e.as_ref().unwrap()), (4, &img.image_q2)]).unwrap();
        prop_assert_eq!(&after, &img.image.p2);
        let back = triality_transform(r, &img.image).unwrap();
        prop_assert_eq!(back.image.e.unwrap(), e);
        prop_assert_eq!(back.image_q2, q2);
    }

    #[test]
    fn reports_are_deterministic(mi in model_index(), kind in prop::sample::select(CriterionKind::ALL.to_vec()),
                                 raw in proptest::collection::vec(coords(), 4)) {
        let m = &models()[mi];
        let mut inp = Inputs { xi: Some(m.tangent.as_real_bundle()), other: Some(m.tangent.as_real_bundle()),
                               complex: m.tangent.chern.clone(), ..Inputs::default() };
        for (i, (name, d)) in kind.slots().iter().enumerate() {
            inp.classes.insert(name.to_string(), class(m, *d, &raw[i]));
        }
        let a = evaluate(kind, m, &inp);
        let b = evaluate(kind, m, &inp);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
                prop_assert_eq!(a, b);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }
}

fn three_dim_space(m: &ManifoldModel, lo: i64, hi: i64) -> SearchSpace {
    let slot = |name: &str, degree: usize| BoxSlot {
        name: name.into(),
        degree,
        bounds: vec![(lo, hi); m.ring.group(degree).free_rank],
        include_torsion: true,
    };
    SearchSpace { parameter: None, boxes: vec![slot("l", 2), slot("u", 4)] }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parallel_sweep_equals_serial(name in prop::sample::select(vec!["CP4", "V6", "S2xS6"]), lo in -4i64..=0, w in 0i64..=4) {
        let m = by_name(name);
        let space = three_dim_space(m, lo, lo + w);
        let base = Inputs::default();
        let par = sweep(CriterionKind::ThreeDim, m, &base, &space, SweepOptions::default()).unwrap();
        let ser = sweep(CriterionKind::ThreeDim, m, &base, &space, SweepOptions { parallel: false, ..SweepOptions::default() }).unwrap();
        prop_assert_eq!(serde_json::to_string(&par).unwrap(), serde_json::to_string(&ser).unwrap());
    }

    #[test]
    fn enlarging_bounds_keeps_solutions(name in prop::sample::select(vec!["CP4", "V6", "Gr24"]), lo in -3i64..=0, w in 0i64..=3, grow in 1i64..=2) {
        let m = by_name(name);
        let base = Inputs::default();
        let key = |s: &obstruct8::search::SolutionSet| -> BTreeSet<String> {
            s.solutions.iter().map(|p| format!("{:?}", p.witnesses)).collect()
        };
        let small = three_dim_space(m, lo, lo + w);
        let big = three_dim_space(m, lo - grow, lo + w + grow);
        let a = key(&sweep(CriterionKind::ThreeDim, m, &base, &small, SweepOptions::default()).unwrap());
        let b = key(&sweep(CriterionKind::ThreeDim, m, &base, &big, SweepOptions::default()).unwrap());
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn residue_summary_matches_membership(lo in -60i64..=-20, len in 50i64..=90) {
        let m = by_name("HP2");
        let mut base = Inputs { xi: Some(m.tangent.as_real_bundle()), ..Inputs::default() };
        base.classes.insert("l".into(), m.ring.zero(2));
        let u = parse_affine(&m.ring, "k*a", 4).unwrap();
        let space = SearchSpace {
            parameter: Some(Parameter { lo, hi: lo + len, stride: 1, slots: vec![("u".into(), u)] }),
            boxes: vec![],
        };
        let sol = sweep(CriterionKind::Halpha, m, &base, &space, SweepOptions::default()).unwrap();
        let sol = residue_summary(sol, &default_periods(12)).unwrap();
        let s = sol.summary.clone().unwrap();
        prop_assert_eq!(s.modulus, 24);
        let passing: BTreeSet<i64> = sol.passing_k().into_iter().collect();
        for k in lo..=lo + len {
            prop_assert_eq!(passing.contains(&k), s.residues.contains(&(k.rem_euclid(24) as u64)));
        }
    }
}

#[test]
fn window_too_small_is_an_error() {
    let m = by_name("HP2");
    let mut base = Inputs { xi: Some(m.tangent.as_real_bundle()), ..Inputs::default() };
    base.classes.insert("l".into(), m.ring.zero(2));
    let u = parse_affine(&m.ring, "k*a", 4).unwrap();
    let space = SearchSpace {
        parameter: Some(Parameter { lo: 0, hi: 10, stride: 1, slots: vec![("u".into(), u)] }),
        boxes: vec![],
    };
    let sol = sweep(CriterionKind::Halpha, m, &base, &space, SweepOptions::default()).unwrap();
    assert!(matches!(
        residue_summary(sol, &[24]),
        Err(obstruct8::Error::WindowTooSmall { window: 11, needed: 48 })
    ));
}

#[test]
fn cap_is_enforced() {
    let m = by_name("CP2xCP2");
    let space = SearchSpace {
        parameter: None,
        boxes: vec![BoxSlot { name: "u".into(), degree: 4, bounds: vec![(-100, 100); 3], include_torsion: true }],
    };
    let base = Inputs::default();
    let err = sweep(CriterionKind::ThreeDim, m, &base, &space, SweepOptions::default()).map(|s| s.points);
    assert!(matches!(err, Err(obstruct8::Error::SpaceTooLarge { size: 8_120_601, .. })), "{err:?}");
}
