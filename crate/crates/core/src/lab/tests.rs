use num_bigint::BigInt;

use super::*;
use crate::abelian::{AbelianDescriptor, SubgroupLattice};
use crate::literal::parse_element_with;
use crate::similarity::{catalog_triple, lift_pair, AbelianPair};

fn xs1(v: &[i64]) -> Vec<XElement> {
    let xd = XDescriptor::free(1);
    v.iter().map(|&k| xd.from_ints(&[k]).unwrap()).collect()
}

fn el(t: &SimilarityTriple, s: &str) -> WreathElement {
    parse_element_with(t.group(), t.generators(), s).unwrap()
}

#[test]
fn disjoint_shift_examples() {
    let xd = XDescriptor::free(1);
    let z = xd.from_ints(&[1]).unwrap();
    assert_eq!(find_disjoint_shift(&xd, &z, &xs1(&[0]), &xs1(&[0, 1, 2])).unwrap(), -1);
    assert_eq!(find_disjoint_shift(&xd, &z, &xs1(&[0]), &xs1(&[-1, 0, 1, 2])).unwrap(), -2);
    assert_eq!(find_disjoint_shift(&xd, &z, &xs1(&[0]), &xs1(&[-2, -1, 0, 1, 2])).unwrap(), 3);
    assert_eq!(find_disjoint_shift(&xd, &z, &xs1(&[0, 4]), &[]).unwrap(), 0);
    let x2 = XDescriptor::free(2);
    let z2 = x2.from_ints(&[1, 0]).unwrap();
    let o = x2.from_ints(&[0, 0]).unwrap();
    let far = x2.from_ints(&[5, 7]).unwrap();
    assert_eq!(find_disjoint_shift(&x2, &z2, &[o], &[far]).unwrap(), 0);
    assert!(matches!(
        find_disjoint_shift(&xd, &xd.identity(), &xs1(&[0]), &xs1(&[0])),
        Err(LabError::FiniteOrderShift)
    ));
}

#[test]
fn lemma4_examples() {
    let t = catalog_triple("zwrz-pair-2").unwrap();
    let x = xs1(&[1]).remove(0);
    let r = lemma4_check(&t, &x).unwrap();
    assert!(r.passed);
    assert_eq!(r.image, el(&t, "t"));
    assert!(lemma4_check(&catalog_triple("lamplighter").unwrap(), &x).unwrap().passed);

    let l = AbelianDescriptor::free(1);
    let m = SubgroupLattice::new(vec![vec![BigInt::from(2)]], l.clone()).unwrap();
    let zero = l.from_vector(&[BigInt::from(0)]).unwrap();
    let collapsing = lift_pair(&AbelianPair::new(m, vec![zero], false).unwrap()).unwrap();
    assert!(!lemma4_check(&collapsing, &x).unwrap().passed);

    assert!(matches!(
        lemma4_check(&catalog_triple("thm2-Z").unwrap(), &XDescriptor::cyclic(2).from_ints(&[1]).unwrap()),
        Err(LabError::OutOfHypothesis(_))
    ));
}

#[test]
fn lemma5_examples() {
    for name in ["zwrz-pair-2", "lamplighter", "adding-machine", "zwrz-pair-generic(4)"] {
        let t = catalog_triple(name).unwrap();
        let r = lemma5_check(&t, 10).unwrap();
        assert!(r.passed(), "{}", name);
        assert!(r.exhaustive, "{}", name);
        assert_eq!(r.skipped(), 0);
        assert_eq!(r.entries.len(), 21 * t.group().base_group().rank());
    }
    let t = catalog_triple("lamplighter").unwrap();
    assert!(lemma5_check(&t, 10).unwrap().entries.iter().all(|e| e.image.as_ref().unwrap().is_identity()));
}

#[test]
fn lemma5_is_monotone_in_window() {
    let t = catalog_triple("zwrz-pair-2").unwrap();
    let big = lemma5_check(&t, 6).unwrap();
    for w in 0..6 {
        let small = lemma5_check(&t, w).unwrap();
        assert!(small.passed());
        for e in &small.entries {
            assert!(big
                .entries
                .iter()
                .any(|f| f.shift == e.shift && f.coord == e.coord && f.image == e.image));
        }
    }
    assert!(!lemma5_check(&t, 0).unwrap().exhaustive);
}

#[test]
fn lemma2_examples() {
    let r = lemma2_branch(&catalog_triple("zwrz-pair-2").unwrap(), 100, 0).unwrap();
    assert!(!r.bm_trivial);
    assert_eq!(r.branch, Lemma2Branch::A0fInA);
    assert_eq!(r.in_a, 100);
    assert!(!r.l_intersection.is_empty());

    let r = lemma2_branch(&catalog_triple("lamplighter").unwrap(), 100, 0).unwrap();
    assert!(r.bm_trivial);
    assert_eq!(r.branch, Lemma2Branch::BmTrivial);

    assert!(matches!(
        lemma2_branch(&catalog_triple("thm2-Z").unwrap(), 10, 0),
        Err(LabError::OutOfHypothesis(_))
    ));
}

#[test]
fn core_witness_examples() {
    for (name, m) in [("zwrz-pair-2", 2), ("zwrz-pair-generic(4)", 4)] {
        let t = catalog_triple(name).unwrap();
        let c = core_witness(&t, 10, 10, 0).unwrap();
        let c = c.certificate().expect("certificate");
        assert_eq!(c.description, format!("A^{}", m));
        assert_eq!(c.witness, el(&t, &format!("b^{}", m)));
        assert!(c.passed(), "{:?}", c.checks.iter().filter(|e| !e.passed).collect::<Vec<_>>());
        assert!(c.checks.iter().any(|e| e.kind == CheckKind::Kernel && e.passed));
    }
    let t = catalog_triple("lamplighter").unwrap();
    match core_witness(&t, 10, 10, 0).unwrap() {
        CoreOutcome::TorsionBranch { exponent, m } => {
            assert_eq!(exponent, BigUint::from(2u32));
            assert_eq!(m, 2);
        }
        other => panic!("unexpected {:?}", other),
    }
}

#[test]
fn report_sections() {
    let t = catalog_triple("zwrz-pair-2").unwrap();
    let r = run_lab(&t, LabParams::default()).unwrap();
    assert!(r.certified());
    let text = r.render(t.group());
    for section in ["[lemma2]", "[lemma4]", "[lemma5]", "[certificate]", "subgroup: A^2", "result: certified"] {
        assert!(text.contains(section), "{}", section);
    }
    assert_eq!(text, run_lab(&t, LabParams::default()).unwrap().render(t.group()));

    let t = catalog_triple("thm2-Z").unwrap();
    let r = run_lab(&t, LabParams::default()).unwrap();
    assert_eq!(r.out_of_hypothesis.as_deref(), Some("X has torsion"));
    assert!(r.lemma2.is_none() && r.lemma5.is_none() && r.core.is_none());

    let t = catalog_triple("lamplighter").unwrap();
    let text = run_lab(&t, LabParams::default()).unwrap().render(t.group());
    assert!(text.contains("torsion exponent 2 branch"));
}
