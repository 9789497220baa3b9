use acs6::char_class::{tensor_line_chern, whitney_complement, PolyRing};
use acs6::degree::MapFamily;
use acs6::homotopy::{Atom, GroupExpr, Pi7Table};
use acs6::{Octonion, Rational, Scalar};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| Rational::from_ratio(n, d))
}

fn octonion() -> impl Strategy<Value = Octonion<Rational>> {
    prop::collection::vec(rational(), 8).prop_map(|c| Octonion::from_slice(&c))
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        Just(Atom::Z),
        (2u64..60).prop_map(Atom::Cyclic),
        (1u32..40).prop_map(Atom::PiS7),
    ]
}

fn group() -> impl Strategy<Value = GroupExpr> {
    prop::collection::vec(atom(), 0..7).prop_map(GroupExpr::from_atoms)
}

fn concrete_group() -> impl Strategy<Value = GroupExpr> {
    prop::collection::vec(
        prop_oneof![Just(Atom::Z), (2u64..60).prop_map(Atom::Cyclic)],
        0..3,
    )
    .prop_map(GroupExpr::from_atoms)
}

fn table(entries: &[(u32, GroupExpr)]) -> Pi7Table {
    let mut text = String::from("m,group,source\n");
    for (m, g) in entries {
        text.push_str(&format!("{m},{g},generated\n"));
    }
    Pi7Table::from_reader(text.as_bytes()).unwrap()
}

fn map_name() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("identity".to_string()),
        Just("squaring".to_string()),
        Just("conjugation".to_string()),
        Just("rp7-cube".to_string()),
        (1u32..=32).prop_map(|k| format!("power:{k}")),
    ];
    let inner = prop_oneof![
        leaf.clone(),
        Just("theta-circle".to_string()),
        Just("cylinder-loop".to_string()),
        Just("cylinder-collapse".to_string()),
    ];
    (prop::collection::vec(leaf, 0..4), inner).prop_map(|(outer, inner)| {
        let mut parts = outer;
        parts.push(inner);
        parts.join("*")
    })
}

proptest! {
    #[test]
    fn composition_and_moufang(x in octonion(), y in octonion(), z in octonion()) {
        let xy = x.mul(&y);
        prop_assert_eq!(xy.norm_sq(), x.norm_sq() * y.norm_sq());
        prop_assert_eq!(xy.conjugate(), y.conjugate().mul(&x.conjugate()));
        prop_assert_eq!(x.mul(&y).mul(&z.mul(&x)), x.mul(&y.mul(&z).mul(&x)));
        prop_assert_eq!(x.mul(&y.mul(&x.mul(&z))), x.mul(&y).mul(&x).mul(&z));
        prop_assert_eq!(z.mul(&x).mul(&y).mul(&x), z.mul(&x.mul(&y.mul(&x))));
    }

    #[test]
    fn powers_of_one_octonion_associate(x in octonion(), a in 0i64..5, b in 0i64..5) {
        prop_assert_eq!(x.power(a).unwrap().mul(&x.power(b).unwrap()), x.power(a + b).unwrap());
    }

    #[test]
    fn inverse_is_two_sided(x in octonion()) {
        prop_assume!(!x.is_zero());
        let inv = x.inverse().unwrap();
        prop_assert_eq!(x.mul(&inv), Octonion::one());
        prop_assert_eq!(inv.mul(&x), Octonion::one());
    }

    #[test]
    fn scalar_strings_round_trip(q in rational(), f in -1e6f64..1e6) {
        prop_assert_eq!(Rational::parse_scalar(&q.to_scalar_string()).unwrap(), q);
        prop_assert_eq!(f64::parse_scalar(&f.to_scalar_string()).unwrap(), f);
    }

    #[test]
    fn whitney_inverse_times_total_is_one(k1 in -5i64..=5, k2 in -5i64..=5, l1 in -5i64..=5, sign in prop::bool::ANY) {
        let ring = PolyRing::new(&[("a", 2), ("b", 2)], Some(6)).unwrap();
        let a = ring.var("a").unwrap();
        let b = ring.var("b").unwrap();
        let total = ring
            .one()
            .add(&a.scale(k1).unwrap())
            .unwrap()
            .add(&a.pow(2).unwrap().scale(k2).unwrap())
            .unwrap()
            .add(&a.mul(&b).unwrap().scale(l1).unwrap())
            .unwrap();
        let total = if sign { total } else { total.neg() };
        let inverse = whitney_complement(&total, 2).unwrap();
        prop_assert_eq!(total.mul(&inverse).unwrap(), ring.one());
    }

    #[test]
    fn tensor_formula_is_symmetric_and_matches_roots(a in -9i64..=9, b in -9i64..=9, c in -9i64..=9) {
        let t = tensor_line_chern().unwrap();
        let scalars = PolyRing::new(&[], None).unwrap();
        let k = |n: i64| scalars.constant(n);
        let at_roots = t.roots_product.substitute(&[k(a), k(b), k(c)]).unwrap();
        let swapped = t.roots_product.substitute(&[k(a), k(c), k(b)]).unwrap();
        let via_classes = t.formula.substitute(&[k(a), k(b + c), k(b * c)]).unwrap();
        prop_assert_eq!(&at_roots, &swapped);
        prop_assert_eq!(&at_roots, &via_classes);
        prop_assert_eq!(at_roots.constant_term(), (a + b) * (a + c));
    }

    #[test]
    fn group_strings_round_trip(g in group()) {
        let text = g.to_string();
        prop_assert_eq!(text.parse::<GroupExpr>().unwrap(), g);
    }

    #[test]
    fn resolution_is_substitution(
        g in group(),
        h in group(),
        entries in prop::collection::btree_map(1u32..40, concrete_group(), 0..10),
    ) {
        let entries: Vec<(u32, GroupExpr)> = entries.into_iter().collect();
        let t = table(&entries);
        prop_assert_eq!(g.sum(&h).resolve(&t), g.resolve(&t).sum(&h.resolve(&t)));
        for (m, value) in &entries {
            prop_assert_eq!(&GroupExpr::pi(*m).resolve(&t), value);
        }
        let resolved = g.resolve(&t);
        prop_assert!(resolved
            .summands()
            .iter()
            .all(|a| !matches!(a, Atom::PiS7(m) if entries.iter().any(|(k, _)| k == m))));
    }

    #[test]
    fn map_specs_round_trip(name in map_name()) {
        let map: MapFamily = name.parse().unwrap();
        let again: MapFamily = map.to_string().parse().unwrap();
        prop_assert_eq!(again, map);
    }
}
