use carnot_core::algebra::AlgebraVector;
use carnot_core::constructors::{build_example2_algebra, build_unit_upper_triangular, engel, ideal_closure, quotient};
use carnot_core::fields::{left_invariant_fields, PolyVectorField};
use carnot_core::group::{dilate, GroupPoint};
use carnot_core::hall::{build_free_nilpotent, DEFAULT_DIMENSION_CAP};
use carnot_core::poly::Polynomial;
use carnot_core::scalar::{format_rational, parse_rational};
use carnot_core::star::{chio_det_identity, free_star_quotient, is_type_star_basis, star_decompose, BasisChange};
use carnot_core::{Algebra, GroupLaw, Matrix, Rational, Ring};
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::OnceLock;

type Q = Rational;

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn positive() -> impl Strategy<Value = Q> {
    (1i64..=9, 1i64..=4).prop_map(|(n, d)| Q::from_ratio(n, d))
}

fn fleet() -> &'static [Algebra] {
    static FLEET: OnceLock<Vec<Algebra>> = OnceLock::new();
    FLEET.get_or_init(|| {
        vec![
            build_unit_upper_triangular(3).unwrap(),
            engel(),
            build_free_nilpotent(2, 4, DEFAULT_DIMENSION_CAP).unwrap(),
            build_free_nilpotent(3, 3, DEFAULT_DIMENSION_CAP).unwrap(),
            build_example2_algebra(Q::from_int(2)).unwrap(),
        ]
    })
}

fn laws() -> &'static [GroupLaw] {
    static LAWS: OnceLock<Vec<GroupLaw>> = OnceLock::new();
    LAWS.get_or_init(|| fleet().iter().map(|a| GroupLaw::derive(a).unwrap()).collect())
}

fn vector(values: &[Q], n: usize) -> AlgebraVector<Q> {
    AlgebraVector::from_dense(&values[..n])
}

fn coords() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(), 14)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_bilinear_antisymmetric_jacobi(k in 0usize..5, a in coords(), b in coords(), c in coords(), s in rational()) {
        let alg = &fleet()[k];
        let n = alg.dim();
        let (x, y, z) = (vector(&a, n), vector(&b, n), vector(&c, n));
        let br = |u: &AlgebraVector<Q>, v: &AlgebraVector<Q>| alg.bracket(u, v).unwrap();
        prop_assert_eq!(br(&x, &y), br(&y, &x).scale(&-Q::from_int(1)));
        prop_assert_eq!(br(&(x.clone() + y.scale(&s)), &z), br(&x, &z) + br(&y, &z).scale(&s));
        let jacobi = br(&x, &br(&y, &z)) + br(&y, &br(&z, &x)) + br(&z, &br(&x, &y));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn group_axioms(k in 0usize..5, a in coords(), b in coords(), c in coords()) {
        let law = &laws()[k];
        let n = law.dim();
        let (x, y, z) = (GroupPoint::new(a[..n].to_vec()), GroupPoint::new(b[..n].to_vec()), GroupPoint::new(c[..n].to_vec()));
        let e = GroupPoint::identity(n);
        prop_assert_eq!(
            law.multiply(&law.multiply(&x, &y).unwrap(), &z).unwrap(),
            law.multiply(&x, &law.multiply(&y, &z).unwrap()).unwrap()
        );
        prop_assert_eq!(law.multiply(&e, &x).unwrap(), x.clone());
        prop_assert_eq!(law.multiply(&x, &law.inverse(&x).unwrap()).unwrap(), e);
    }

    #[test]
    fn dilation_is_an_automorphism(k in 0usize..5, a in coords(), b in coords(), l in positive()) {
        let alg = &fleet()[k];
        let law = &laws()[k];
        let n = alg.dim();
        let (x, y) = (GroupPoint::new(a[..n].to_vec()), GroupPoint::new(b[..n].to_vec()));
        let d = |p: &GroupPoint<Q>| dilate(alg, &l, p).unwrap();
        prop_assert_eq!(d(&law.multiply(&x, &y).unwrap()), law.multiply(&d(&x), &d(&y)).unwrap());
        // on the algebra as well
        let (u, v) = (AlgebraVector::from_dense(&x.coords), AlgebraVector::from_dense(&y.coords));
        let du = AlgebraVector::from_dense(&d(&x).coords);
        let dv = AlgebraVector::from_dense(&d(&y).coords);
        let lhs = AlgebraVector::from_dense(&d(&GroupPoint::new(alg.bracket(&u, &v).unwrap().to_dense(n))).coords);
        prop_assert_eq!(lhs, alg.bracket(&du, &dv).unwrap());
    }

    #[test]
    fn vector_fields_are_derivations(
        c1 in prop::collection::vec(rational(), 4),
        c2 in prop::collection::vec(rational(), 4),
        e1 in prop::collection::vec(0u32..3, 4),
        e2 in prop::collection::vec(0u32..3, 4),
    ) {
        let law = &laws()[1];
        let fields = left_invariant_fields(law);
        let f = Polynomial::from_terms(c1.iter().enumerate().map(|(i, c)| {
            let mut m = vec![0; 4];
            m[i] = e1[i];
            (m, c.clone())
        }));
        let g = Polynomial::from_terms(c2.iter().enumerate().map(|(i, c)| {
            let mut m = e2.clone();
            m[i] += 1;
            (m, c.clone())
        }));
        for x in &fields {
            prop_assert!(x.leibniz_holds(&f, &g));
        }
        // commutator of fields is again a derivation, and antisymmetric
        let w = fields[0].commutator(&fields[1]);
        prop_assert!(w.leibniz_holds(&f, &g));
        prop_assert_eq!(w.add(&fields[1].commutator(&fields[0])), PolyVectorField::zero(4));
    }

    #[test]
    fn projection_is_a_homomorphism(a in coords(), b in coords()) {
        let (q, p) = free_star_quotient().unwrap();
        let f33 = build_free_nilpotent::<Q>(3, 3, DEFAULT_DIMENSION_CAP).unwrap();
        let n = f33.dim();
        let (x, y) = (vector(&a, n), vector(&b, n));
        let lhs = p.project(&f33.bracket(&x, &y).unwrap()).unwrap();
        let rhs = q.bracket(&p.project(&x).unwrap(), &p.project(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chio_identity(rows in prop::collection::vec(prop::collection::vec(rational(), 6), 6), m in 2usize..=6) {
        let mut rows: Vec<Vec<Q>> = rows.into_iter().take(m).map(|r| r.into_iter().take(m).collect()).collect();
        if rows[0][0].is_zero() {
            rows[0][0] = Q::from_int(1);
        }
        let a = Matrix::from_rows(rows).unwrap();
        prop_assert!(chio_det_identity(&a).unwrap().equal);
    }

    #[test]
    fn lemma3_on_g4(rows in prop::collection::vec(prop::collection::vec(rational(), 4), 4)) {
        let g4 = build_unit_upper_triangular::<Q>(4).unwrap();
        let a = Matrix::from_rows(rows).unwrap();
        prop_assume!(!a.det().unwrap().is_zero());
        let change = BasisChange::new(a).unwrap();
        for p in 1..4 {
            let d = star_decompose(&g4, &change, p).unwrap();
            prop_assert!(d.reconstructs(&g4, &change).unwrap());
        }
    }

    #[test]
    fn rational_text_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }
}

#[test]
fn algebra_json_round_trip() {
    for alg in fleet() {
        let back = Algebra::from_json_str(&alg.to_json_string()).unwrap();
        assert_eq!(&back, alg);
    }
}

#[test]
fn quotient_by_third_layer_is_step_two() {
    let f33 = build_free_nilpotent::<Q>(3, 3, DEFAULT_DIMENSION_CAP).unwrap();
    let gens: Vec<_> = f33.layer_range(3).map(AlgebraVector::basis).collect();
    let ideal = ideal_closure(&f33, &gens).unwrap();
    let (q, _) = quotient(&f33, &ideal).unwrap();
    assert_eq!(q.layer_dims(), &[3, 3]);
    assert!(is_type_star_basis(&q, None).unwrap().holds);
}
