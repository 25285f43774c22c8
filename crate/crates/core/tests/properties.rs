use num_bigint::BigInt;
use proptest::prelude::*;

use orbitlab_core::dynamics::{orbit, orbit_sequence, torus_map, Budget, MapEval, RationalSelfMap};
use orbitlab_core::exact_numbers::{pow_big, rat, ratio, ExactRational};
use orbitlab_core::holonomic::{interleave, min_cfinite_annihilator, section, CFiniteRecurrence, Expand};
use orbitlab_core::multgroup::MultSubgroup;
use orbitlab_core::poly::{Evaluation, MultiPoly, RatFunc};
use orbitlab_core::structure::{
    ap_decompose, membership_set, torus_model_from_values, verify_torus_model, MembershipSet, StructureParams,
    TorusReport,
};

fn small_rational() -> impl Strategy<Value = ExactRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = ExactRational> {
    small_rational().prop_filter("nonzero", |q| *q != rat(0))
}

/// Polynomial maps of dimension 2 with small coefficients and degree ≤ 2.
fn poly_map() -> impl Strategy<Value = RationalSelfMap> {
    let coord = prop::collection::vec((0u32..=2, 0u32..=1, -3i64..=3), 1..4).prop_map(|terms| {
        terms.into_iter().fold(MultiPoly::zero(2), |acc, (a, b, c)| acc.add(&MultiPoly::monomial(vec![a, b], rat(c))))
    });
    (coord.clone(), coord).prop_map(|(f, g)| RationalSelfMap::new(vec![RatFunc::from_poly(f), RatFunc::from_poly(g)]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbit_semigroup_law(phi in poly_map(), x in small_rational(), y in small_rational(), m in 0usize..3, k in 0usize..3) {
        let x0 = vec![x, y];
        let full = orbit(&phi, &x0, m + k, Budget::unlimited()).unwrap();
        let head = orbit(&phi, &x0, m, Budget::unlimited()).unwrap();
        let tail = orbit(&phi, &head.points[m], k, Budget::unlimited()).unwrap();
        prop_assert_eq!(&full.points[m + k], &tail.points[k]);
    }

    #[test]
    fn composition_matches_iterated_evaluation(phi in poly_map(), psi in poly_map(), x in small_rational(), y in small_rational()) {
        let x0 = vec![x, y];
        let composed = phi.compose(&psi).unwrap();
        let MapEval::Point(inner) = psi.eval(&x0).unwrap() else { unreachable!("polynomial map") };
        let MapEval::Point(outer) = phi.eval(&inner).unwrap() else { unreachable!("polynomial map") };
        prop_assert_eq!(composed.eval(&x0).unwrap(), MapEval::Point(outer));
    }

    #[test]
    fn ratfunc_evaluation_agrees_with_arithmetic(a in nonzero_rational(), b in small_rational(), x in small_rational()) {
        // f = (a·x + b) / (x^2 + 1), built two ways
        let var = RatFunc::var(1, 0);
        let num = var.mul(&RatFunc::constant(1, a.clone())).add(&RatFunc::constant(1, b.clone()));
        let den = var.pow(2).unwrap().add(&RatFunc::constant(1, rat(1)));
        let f = num.div(&den).unwrap();
        let expected = (&a * &x + &b) / (&x * &x + rat(1));
        prop_assert_eq!(f.eval(std::slice::from_ref(&x)), Evaluation::Value(expected.clone()));
        let composed = f.compose(&[RatFunc::constant(1, x)]).unwrap();
        prop_assert_eq!(composed.numerator().as_constant().unwrap() / composed.denominator().as_constant().unwrap(), expected);
    }

    #[test]
    fn torus_orbits_stay_in_group(
        e in prop::collection::vec(-2i64..=2, 4),
        k in prop::collection::vec(-2i64..=2, 4),
        sx in prop::bool::ANY,
    ) {
        let g = MultSubgroup::new(vec![rat(2), rat(3)]).unwrap();
        let c1 = pow_big(&rat(2), &BigInt::from(k[0])) * pow_big(&rat(3), &BigInt::from(k[1]));
        let c2 = pow_big(&rat(2), &BigInt::from(k[2])) * pow_big(&rat(3), &BigInt::from(k[3]));
        let c1 = if sx { -c1 } else { c1 };
        let phi = torus_map(&[c1, c2], &[vec![e[0], e[1]], vec![e[2], e[3]]]).unwrap();
        let observable = RatFunc::var(2, 0).mul(&RatFunc::var(2, 1));
        let rec = orbit_sequence(&phi, &observable, &[rat(2), ratio(1, 3)], 6, Budget::digits(5000)).unwrap();
        let set = membership_set(&rec.values, &g);
        for (i, v) in rec.values.iter().enumerate() {
            let value = v.finite().unwrap();
            prop_assert!(set.contains(i) || g.contains(&-value).is_ok());
        }
    }

    #[test]
    fn section_and_interleave_are_inverse(terms in prop::collection::vec(small_rational(), 0..30), l in 1usize..5) {
        let parts: Vec<Vec<ExactRational>> = (0..l).map(|j| section(&terms, l, j).unwrap()).collect();
        let merged = interleave(&parts);
        prop_assert_eq!(&merged[..terms.len()], &terms[..]);
    }

    #[test]
    fn ap_decomposition_reconstructs(bits in prop::collection::vec(prop::bool::ANY, 1..200), l_max in 1usize..10) {
        let set = MembershipSet::from_bits(bits.clone(), vec![false; bits.len()]);
        let params = StructureParams { l_max, ..StructureParams::default() };
        let ap = ap_decompose(&set, &params);
        prop_assert!(!ap.overflow);
        prop_assert_eq!(ap.reconstruct(), bits);
    }

    #[test]
    fn annihilator_is_sound(
        coeffs in prop::collection::vec(-3i64..=3, 1..4),
        init in prop::collection::vec(-3i64..=3, 3),
    ) {
        prop_assume!(*coeffs.last().unwrap() != 0);
        let d = coeffs.len();
        let rec = CFiniteRecurrence::new(coeffs.iter().map(|&c| rat(c)).collect(), init[..d].iter().map(|&c| rat(c)).collect()).unwrap();
        let terms = rec.to_precurrence().expand(2 * d + 10).unwrap();
        let found = min_cfinite_annihilator(&terms).unwrap();
        prop_assert!(found.order() <= d);
        prop_assert_eq!(found.first_violation(&terms), None);
    }

    #[test]
    fn torus_model_reproduces_affine_exponents(
        a in prop::collection::vec(-1i64..=1, 4),
        p in prop::collection::vec(-2i64..=2, 2),
        v0 in prop::collection::vec(-2i64..=2, 2),
        negate in prop::bool::ANY,
    ) {
        let g = MultSubgroup::new(vec![rat(2), rat(3)]).unwrap();
        let mut v = v0.clone();
        let mut values = Vec::new();
        for _ in 0..10 {
            let mut x = pow_big(&rat(2), &BigInt::from(v[0])) * pow_big(&rat(3), &BigInt::from(v[1]));
            if negate {
                x = -x;
            }
            values.push(x);
            v = vec![a[0] * v[0] + a[1] * v[1] + p[0], a[2] * v[0] + a[3] * v[1] + p[1]];
        }
        let model = torus_model_from_values(&values, &g).unwrap();
        let model = model.expect("affine data admit a model");
        prop_assert_eq!(verify_torus_model(&model, &values, 9).unwrap(), TorusReport::Verified { horizon: 9 });
    }

    #[test]
    fn membership_witness_evaluates_back(k1 in -12i64..=12, k2 in -12i64..=12, neg in prop::bool::ANY) {
        let g = MultSubgroup::new(vec![ratio(4, 9), rat(6)]).unwrap();
        let mut x = pow_big(&ratio(4, 9), &BigInt::from(k1)) * pow_big(&rat(6), &BigInt::from(k2));
        if neg {
            x = -x;
        }
        match g.contains(&x) {
            Ok(w) => prop_assert_eq!(g.evaluate(&w), x),
            Err(_) => prop_assert!(neg),
        }
    }
}
