use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim::lab::{core_witness, find_disjoint_shift, lemma5_check, shift_order};
use selfsim::similarity::catalog_triple;
use selfsim::tree::{kernel_search, portrait, CompileSession};
use selfsim::wreath::{XDescriptor, XElement};

fn disjoint(xd: &XDescriptor, z: &XElement, k: i64, zs: &[XElement], xs: &[XElement]) -> bool {
    let kz = xd.scale(z, &k.into());
    let forbidden: HashSet<&XElement> = xs.iter().collect();
    zs.iter().all(|y| !forbidden.contains(&xd.add(y, &kz)))
}

#[test]
fn disjoint_shift_against_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let dim = 1 + case % 2;
        let xd = XDescriptor::free(dim);
        let point = |rng: &mut ChaCha8Rng| {
            let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-10..=10)).collect();
            xd.from_ints(&v).unwrap()
        };
        let z = loop {
            let z = point(&mut rng);
            if !z.is_identity() {
                break z;
            }
        };
        let zs: Vec<_> = (0..rng.gen_range(0..=5)).map(|_| point(&mut rng)).collect();
        let xs: Vec<_> = (0..rng.gen_range(0..=5)).map(|_| point(&mut rng)).collect();
        let k = find_disjoint_shift(&xd, &z, &zs, &xs).unwrap();
        assert!(disjoint(&xd, &z, k, &zs, &xs));
        let brute = shift_order()
            .take_while(|j| j.abs() <= 200)
            .find(|&j| disjoint(&xd, &z, j, &zs, &xs))
            .unwrap();
        assert_eq!(k, brute);
        for j in -k.abs() + 1..k.abs() {
            assert!(!disjoint(&xd, &z, j, &zs, &xs));
        }
    }
}

#[test]
fn certificates_are_sound() {
    for (name, radius) in [("zwrz-pair-2", 2), ("zwrz-pair-generic(4)", 4), ("zwrz-pair-generic(3)", 3)] {
        let t = catalog_triple(name).unwrap();
        let d = t.group();
        let outcome = core_witness(&t, 6, 8, 0).unwrap();
        let c = outcome.certificate().expect("certificate");
        assert!(c.passed(), "{}", name);
        let m = (c.m as u64).into();
        // Nontrivial, in H, trivial image, and f maps it back into A^m.
        assert!(!c.witness.is_identity());
        assert_eq!(t.coset_index(&c.witness).unwrap(), 1);
        let s = CompileSession::new(Arc::new(t.clone())).unwrap();
        assert!(portrait(&s.compile(&c.witness).unwrap(), 8).is_trivial());
        assert!(d.normal_closure_power_member(&t.apply_f(&c.witness).unwrap(), &m));
        // The compiler finds the same element as a kernel witness.
        let gens: Vec<_> = t.generators().iter().map(|(_, g)| g.clone()).collect();
        let found = kernel_search(&t, &gens, radius, 8).unwrap();
        assert!(found.iter().any(|w| w.element == c.witness), "{}", name);
    }
}

#[test]
fn lemma5_windows_nest() {
    let t = catalog_triple("zwrz-pair-generic(3)").unwrap();
    let wide = lemma5_check(&t, 5).unwrap();
    assert!(wide.passed() && wide.exhaustive);
    for w in 0..5 {
        let narrow = lemma5_check(&t, w).unwrap();
        assert!(narrow.passed());
        assert!(narrow.entries.len() < wide.entries.len());
        assert_eq!(narrow.exhaustive, 2 * w + 1 >= 3);
    }
}
