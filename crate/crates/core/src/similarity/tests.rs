use super::*;
use crate::literal::{parse_element, parse_element_with};

fn el(t: &SimilarityTriple, s: &str) -> WreathElement {
    parse_element_with(t.group(), t.generators(), s).unwrap()
}

fn all_names() -> Vec<String> {
    vec![
        "adding-machine".into(),
        "lamplighter".into(),
        "thm2-Z".into(),
        "zwrz-pair-2".into(),
        "zwrz-pair-generic(4)".into(),
    ]
}

#[test]
fn adding_machine_lift() {
    let p = adding_machine();
    assert_eq!(p.index(), BigUint::from(2u32));
    assert!(p.simple_claimed());
    let t = lift_pair(&p).unwrap();
    assert_eq!(t.index(), 2);
    assert!(validate_triple(&t, 100, 0).passed());
    assert_eq!(t.coset_index(&el(&t, "e")).unwrap(), 1);
    assert_eq!(t.coset_index(&el(&t, "t")).unwrap(), 2);
    assert_eq!(t.apply_f(&el(&t, "t^2")).unwrap(), el(&t, "t"));
    assert_eq!(t.apply_f(&el(&t, "t^-6")).unwrap(), el(&t, "t^-3"));
    assert!(t.apply_f(&el(&t, "t")).is_err());
}

#[test]
fn zwrz_pair_images() {
    let t = zwrz_pair(2).unwrap();
    assert_eq!(t.index(), 2);
    assert!(validate_triple(&t, 200, 1).passed());
    assert_eq!(t.apply_f(&el(&t, "t^2")).unwrap(), el(&t, "t"));
    assert_eq!(t.apply_f(&el(&t, "b")).unwrap(), el(&t, "b"));
    assert_eq!(t.apply_f(&el(&t, "t b t^-1")).unwrap(), el(&t, "e"));
    for k in -4i64..=4 {
        let g = el(&t, &format!("t^{} b t^{}", 2 * k, -2 * k));
        let want = el(&t, &format!("t^{} b t^{}", k, -k));
        assert_eq!(t.apply_f(&g).unwrap(), want, "k = {}", k);
        let odd = el(&t, &format!("t^{} b t^{}", 2 * k + 1, -2 * k - 1));
        assert!(t.apply_f(&odd).unwrap().is_identity());
    }
}

#[test]
fn zwrz_generic_four() {
    let t = zwrz_pair(4).unwrap();
    assert_eq!(t.index(), 4);
    assert!(validate_triple(&t, 100, 2).passed());
    assert_eq!(t.apply_f(&el(&t, "t^4")).unwrap(), el(&t, "t"));
    for i in 1..4 {
        let g = el(&t, &format!("t^{} b t^-{}", i, i));
        assert!(t.apply_f(&g).unwrap().is_identity());
    }
    assert_eq!(t.apply_f(&el(&t, "t^8 b t^-8")).unwrap(), el(&t, "t^2 b t^-2"));
}

#[test]
fn lamplighter_pair() {
    let t = lamplighter();
    assert_eq!(t.index(), 2);
    assert!(validate_triple(&t, 200, 3).passed());
    assert_eq!(t.apply_f(&el(&t, "t")).unwrap(), el(&t, "t"));
    assert_eq!(t.apply_f(&el(&t, "b t b t^-1")).unwrap(), el(&t, "b"));
    assert!(t.apply_f(&el(&t, "b")).is_err());
    assert_eq!(t.coset_index(&el(&t, "b")).unwrap(), 2);
    assert_eq!(t.coset_index(&el(&t, "t b t^-1")).unwrap(), 2);
}

#[test]
fn theorem2_instance() {
    let t = thm2_z();
    let d = t.group();
    assert_eq!(t.index(), 4);
    assert!(validate_triple(&t, 200, 4).passed());
    // beta_2 = (3, 4, 5) at position 1 maps to (4, 3, 5).
    let b2 = parse_element(d, "base{1:{0:3, 1:4, 2:5}} top(0)").unwrap();
    let want = parse_element(d, "base{1:{0:4, 1:3, 2:5}} top(0)").unwrap();
    assert_eq!(t.apply_f(&b2).unwrap(), want);
    // beta_1 = (2, 5, 7) maps to (1 + 5, 7).
    let b1 = parse_element(d, "base{0:{0:2, 1:5, 2:7}} top(0)").unwrap();
    let want = parse_element(d, "base{0:{0:6, 1:7}} top(0)").unwrap();
    assert_eq!(t.apply_f(&b1).unwrap(), want);
    // Coset index follows (beta_11 mod 2, x) lexicographically.
    for (c, x, idx) in [(0, 0, 1), (0, 1, 2), (1, 0, 3), (1, 1, 4), (3, 1, 4), (-2, 0, 1)] {
        let g = parse_element(d, &format!("base{{0:{{0:{}, 4:9}}, 1:{{1:2}}}} top({})", c, x)).unwrap();
        assert_eq!(t.coset_index(&g).unwrap(), idx);
    }
}

#[test]
fn theorem2_membership_is_exactly_beta11_in_m() {
    let t = thm2_z();
    let d = t.group();
    for c in -3i64..=3 {
        let g = parse_element(d, &format!("base{{0:{{0:{}, 1:1}}, 1:{{0:5}}}} top(0)", c)).unwrap();
        assert_eq!(t.apply_f(&g).is_ok(), c % 2 == 0, "beta_11 = {}", c);
    }
    let top = parse_element(d, "base{} top(1)").unwrap();
    assert!(t.apply_f(&top).is_err());
}

#[test]
fn theorem2_index_formula() {
    let l = AbelianDescriptor::free(1);
    for n in 1..=4i64 {
        let m = SubgroupLattice::new(vec![vec![BigInt::from(n)]], l.clone()).unwrap();
        let img = l.from_vector(&[BigInt::from(1)]).unwrap();
        let p = AbelianPair::new(m, vec![img], n > 1).unwrap();
        let t = theorem2_build(&p).unwrap();
        assert_eq!(t.index(), 2 * n as usize);
        assert!(t.transversal_coherent().is_ok());
    }
    let z3 = AbelianDescriptor::cyclic(3);
    let full = SubgroupLattice::full(&z3).unwrap();
    let id = z3.from_vector(&[BigInt::from(1)]).unwrap();
    let p = AbelianPair::new(full, vec![id], false).unwrap();
    let t = theorem2_build(&p).unwrap();
    assert_eq!(t.index(), 2);
    assert!(validate_triple(&t, 50, 5).passed());
}

#[test]
fn corrupted_transversal_fails_coherence() {
    let mut spec = zwrz_pair(2).unwrap().spec().clone();
    let d = spec.group.clone();
    spec.transversal[1] = parse_element(&d, "base{} top(2)").unwrap();
    let t = SimilarityTriple::new(spec).unwrap();
    assert!(t.transversal_coherent().is_err());
    let r = validate_triple(&t, 20, 0);
    let e = r.entry("coset coherence").unwrap();
    assert!(!e.passed);
    assert!(e.counterexample.is_some());
}

#[test]
fn ill_defined_data_is_rejected() {
    // Sum image incompatible with the twist by t^2.
    let mut spec = zwrz_pair(2).unwrap().spec().clone();
    let d = spec.group.clone();
    spec.residues[0].images[0] = parse_element(&d, "base{1:1} top(0)").unwrap().base;
    spec.diffs.push(DiffSpec {
        residue: spec.residues[0].residue.clone(),
        coord: 0,
        y: spec.y_generators[0].clone(),
        image: BaseMap::default(),
    });
    assert!(matches!(
        SimilarityTriple::new(spec),
        Err(SimilarityError::IllDefined(_))
    ));

    // Missing difference image when b is not in S_r.
    let mut spec = lamplighter().spec().clone();
    spec.diffs.clear();
    assert!(matches!(
        SimilarityTriple::new(spec),
        Err(SimilarityError::IllDefined(_))
    ));

    // A difference for the order-2 coordinate that has infinite order.
    let xd = XDescriptor::free(1);
    let bd = crate::literal::parse_abelian_descriptor("Z/2, Z").unwrap();
    let d = GroupDescriptor::new(bd.clone(), xd.clone());
    let gen1 = crate::literal::parse_abelian(&bd, "(0,1)").unwrap();
    let spec = TripleSpec {
        group: d.clone(),
        y_generators: vec![xs(&xd, &[1])],
        y_images: vec![xs(&xd, &[1])],
        residues: vec![ResidueSpec {
            residue: xs(&xd, &[0]),
            window: None,
            generators: vec![gen1],
            images: vec![BaseMap::default()],
            tail: None,
        }],
        diffs: vec![DiffSpec {
            residue: xs(&xd, &[0]),
            coord: 0,
            y: xs(&xd, &[1]),
            image: crate::literal::parse_base(&d, "base{0:(0,1)}").unwrap(),
        }],
        transversal: vec![d.identity()],
        generators: Vec::new(),
    };
    let err = SimilarityTriple::new(spec.clone()).unwrap_err();
    assert!(err.to_string().contains("order 2"), "{}", err);
    let mut fixed = spec;
    fixed.diffs[0].image = crate::literal::parse_base(&d, "base{0:(1,0)}").unwrap();
    assert!(SimilarityTriple::new(fixed).is_ok());
}

#[test]
fn config_round_trip() {
    for name in all_names() {
        let t = catalog_triple(&name).unwrap();
        let text = format_config(t.spec());
        let back = parse_config(&text).unwrap();
        assert_eq!(&back, t.spec(), "{}\n{}", name, text);
        assert_eq!(format_config(&back), text);
        let rebuilt = SimilarityTriple::new(back).unwrap();
        assert_eq!(rebuilt.index(), t.index());
    }
}

#[test]
fn config_errors_carry_line_numbers() {
    let text = "[group]\nbase = Z\ntop = Z\n[subgroup]\ny = 2\n[endomorphism]\ny 3 -> 1\n";
    match parse_config(text) {
        Err(SimilarityError::Config { line, .. }) => assert_eq!(line, 7),
        other => panic!("unexpected {:?}", other),
    }
    assert!(parse_config("[nonsense]\n").is_err());
    assert!(parse_config("base = Z\n").is_err());
}

#[test]
fn catalog_names() {
    for name in all_names() {
        assert!(catalog(&name).is_ok(), "{}", name);
    }
    assert!(matches!(catalog("adding-machine").unwrap(), CatalogEntry::Pair(_)));
    assert_eq!(catalog_triple("zwrz-pair-generic:3").unwrap().index(), 3);
    assert!(matches!(catalog("nope"), Err(SimilarityError::UnknownCatalog(_))));
    assert_eq!(catalog_entries().len(), CATALOG_NAMES.len());
}

#[test]
fn projection_lands_in_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for name in all_names() {
        let t = catalog_triple(&name).unwrap();
        for _ in 0..100 {
            let h = t.random_subgroup_element(&mut rng, 4);
            assert!(t.in_subgroup(&h));
            assert_eq!(t.coset_index(&h).unwrap(), 1);
            let a = t.random_base_subgroup_element(&mut rng, 4);
            assert!(a.top.is_identity() && t.in_subgroup(&a));
        }
    }
}
