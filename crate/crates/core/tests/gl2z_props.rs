use gm4::gl2z::{classify, classify_with_conjugator, conjugate_in, Ambient, Mat2};
use proptest::prelude::*;

fn generator(i: u8) -> Mat2 {
    match i % 6 {
        0 => Mat2::r(),
        1 => Mat2::unipotent(-1),
        2 => Mat2::l(),
        3 => Mat2::new(1, 0, -1, 1),
        4 => Mat2::s(),
        _ => -Mat2::identity(),
    }
}

fn word(gens: &[u8]) -> Mat2 {
    gens.iter()
        .fold(Mat2::identity(), |acc, &g| acc.compose(&generator(g)))
}

fn sl2z() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(any::<u8>(), 0..14).prop_map(|g| word(&g))
}

fn gl2z() -> impl Strategy<Value = Mat2> {
    (sl2z(), any::<bool>()).prop_map(|(m, flip)| {
        if flip {
            m.compose(&Mat2::reflection())
        } else {
            m
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn group_axioms(a in gl2z(), b in gl2z(), c in gl2z()) {
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        prop_assert!(a.compose(&a.inverse().unwrap()).is_identity());
        prop_assert_eq!(a.compose(&b).det(), a.det() * b.det());
    }

    #[test]
    fn witness_reaches_representative(m in sl2z()) {
        let (class, p) = classify_with_conjugator(&m).unwrap();
        prop_assert!(p.det() == 1.into());
        prop_assert_eq!(m.conjugated_by(&p), class.representative());
    }

    #[test]
    fn class_is_conjugation_invariant(m in sl2z(), c in sl2z()) {
        let n = m.conjugated_by(&c);
        prop_assert_eq!(classify(&m).unwrap(), classify(&n).unwrap());
        let w = conjugate_in(&m, &n, Ambient::Sl2z).unwrap().unwrap();
        prop_assert_eq!(m.conjugated_by(&w), n);
    }

    #[test]
    fn gl_conjugacy_witness(m in gl2z(), c in gl2z()) {
        let n = m.conjugated_by(&c);
        let w = conjugate_in(&m, &n, Ambient::Gl2z).unwrap().unwrap();
        prop_assert!(w.is_unimodular());
        prop_assert_eq!(m.conjugated_by(&w), n);
    }

    #[test]
    fn conjugate_in_is_sound(m in gl2z(), n in gl2z()) {
        if let Some(w) = conjugate_in(&m, &n, Ambient::Gl2z).unwrap() {
            prop_assert_eq!(m.conjugated_by(&w), n.clone());
        }
        if m.det() == 1.into() && n.det() == 1.into() {
            if let Some(w) = conjugate_in(&m, &n, Ambient::Sl2z).unwrap() {
                prop_assert!(w.det() == 1.into());
                prop_assert_eq!(m.conjugated_by(&w), n);
            }
        }
    }
}
