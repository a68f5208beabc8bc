use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim::similarity::{catalog_triple, SimilarityTriple};
use selfsim::tree::{
    act, bisim_equal, compose, invert, kernel_search_in, portrait, section_at, trivial_to_depth,
    BisimResult, CompileSession,
};

const NAMES: [&str; 5] = [
    "adding-machine",
    "lamplighter",
    "thm2-Z",
    "zwrz-pair-2",
    "zwrz-pair-generic(4)",
];

fn setup(name: &str) -> (SimilarityTriple, Arc<CompileSession>) {
    let t = catalog_triple(name).unwrap();
    let s = CompileSession::new(Arc::new(t.clone())).unwrap();
    (t, s)
}

fn random_word(rng: &mut ChaCha8Rng, m: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(1..=m)).collect()
}

#[test]
fn compile_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in NAMES {
        let (t, s) = setup(name);
        let d = t.group();
        for _ in 0..50 {
            let g = t.random_element(&mut rng, 3);
            let h = t.random_element(&mut rng, 3);
            let gh = s.compile(&d.mul(&g, &h)).unwrap();
            let prod = compose(&s.compile(&g).unwrap(), &s.compile(&h).unwrap()).unwrap();
            assert_eq!(portrait(&gh, 4), portrait(&prod, 4), "{}", name);
            assert!(!matches!(bisim_equal(&gh, &prod, 10_000), BisimResult::DistinctAt(_)), "{}", name);
            let inv = s.compile(&d.inverse(&g)).unwrap();
            assert_eq!(portrait(&inv, 4), portrait(&invert(&s.compile(&g).unwrap()), 4));
        }
    }
}

#[test]
fn action_preserves_length_and_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for name in NAMES {
        let (t, s) = setup(name);
        let m = t.index();
        for _ in 0..40 {
            let a = s.compile(&t.random_element(&mut rng, 3)).unwrap();
            let b = s.compile(&t.random_element(&mut rng, 3)).unwrap();
            let w = random_word(&mut rng, m, 7);
            let img = act(&a, &w).unwrap();
            assert_eq!(img.len(), w.len());
            for k in 0..w.len() {
                assert_eq!(act(&a, &w[..k]).unwrap(), img[..k]);
            }
            let ab = compose(&a, &b).unwrap();
            assert_eq!(act(&ab, &w).unwrap(), act(&b, &img).unwrap());
        }
    }
}

#[test]
fn sections_follow_the_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for name in NAMES {
        let (t, s) = setup(name);
        let d = t.group();
        let xs = t.transversal();
        for _ in 0..30 {
            let g = t.random_element(&mut rng, 3);
            let a = s.compile(&g).unwrap();
            let p = a.root_perm();
            for i in 1..=t.index() {
                let j = p.apply(i);
                assert_eq!(t.coset_index(&d.mul(&xs[i - 1], &g)).unwrap(), j);
                let h = d.mul(&d.mul(&xs[i - 1], &g), &d.inverse(&xs[j - 1]));
                let direct = s.compile(&t.apply_f(&h).unwrap()).unwrap();
                let sec = section_at(&a, &[i]).unwrap();
                assert_eq!(portrait(&sec, 4), portrait(&direct, 4));
            }
        }
    }
}

#[test]
fn subgroup_elements_fix_the_first_letter() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for name in NAMES {
        let (t, s) = setup(name);
        for _ in 0..200 {
            let h = t.random_subgroup_element(&mut rng, 4);
            let a = s.compile(&h).unwrap();
            assert_eq!(a.root_perm().apply(1), 1, "{}", name);
        }
        // Elements outside H move letter 1.
        for _ in 0..50 {
            let g = t.random_element(&mut rng, 4);
            let a = s.compile(&g).unwrap();
            assert_eq!(a.root_perm().apply(1) == 1, t.in_subgroup(&g));
        }
    }
}

#[test]
fn kernel_is_normal_and_f_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for name in ["zwrz-pair-2", "zwrz-pair-generic(4)"] {
        let (t, s) = setup(name);
        let d = t.group();
        let gens: Vec<_> = t.generators().iter().map(|(_, g)| g.clone()).collect();
        let found = kernel_search_in(&s, &gens, 2, 8).unwrap();
        assert!(!found.is_empty());
        for w in &found {
            for _ in 0..10 {
                let by = t.random_element(&mut rng, 3);
                let c = d.conjugate(&w.element, &by);
                assert!(trivial_to_depth(&s.compile(&c).unwrap(), w.depth_checked));
                if t.in_subgroup(&c) {
                    let f = t.apply_f(&c).unwrap();
                    assert!(trivial_to_depth(&s.compile(&f).unwrap(), w.depth_checked));
                }
            }
        }
    }
}
