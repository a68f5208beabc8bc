//! Built-in instances and the two triple builders.

use num_bigint::BigInt;

use super::{
    xs, AbelianPair, DiffSpec, ResidueSpec, SimilarityError, SimilarityTriple, Tail, TripleSpec,
};
use crate::abelian::{AbelianDescriptor, AbelianElement, Coord, SubgroupLattice};
use crate::wreath::{BaseMap, GroupDescriptor, WreathElement, XDescriptor};

pub const CATALOG_NAMES: [&str; 5] = [
    "adding-machine",
    "lamplighter",
    "thm2-Z",
    "zwrz-pair-2",
    "zwrz-pair-generic(m)",
];

#[derive(Clone, Debug)]
pub enum CatalogEntry {
    Pair(AbelianPair),
    Triple(SimilarityTriple),
}

impl CatalogEntry {
    /// The triple itself, or the lift of a pair to `1 wr L`.
    pub fn into_triple(self) -> Result<SimilarityTriple, SimilarityError> {
        match self {
            CatalogEntry::Pair(p) => lift_pair(&p),
            CatalogEntry::Triple(t) => Ok(t),
        }
    }
}

/// `(Z, 2Z, x -> x/2)`.
pub fn adding_machine() -> AbelianPair {
    let l = AbelianDescriptor::free(1);
    let m = SubgroupLattice::new(vec![vec![BigInt::from(2)]], l.clone()).expect("valid lattice");
    let half = l.from_vector(&[BigInt::from(1)]).expect("rank 1");
    AbelianPair::new(m, vec![half], true).expect("well-defined pair")
}

/// `Z/2 wr Z` with `H = A0·X`, `A0` the elements with coordinate sum 0,
/// `f(t) = t` and `f(b + b↶t) = b`; transversal `{e, b}`.
pub fn lamplighter() -> SimilarityTriple {
    let xd = XDescriptor::free(1);
    let d = GroupDescriptor::new(AbelianDescriptor::cyclic(2), xd.clone());
    let b = d.delta(Coord::fg(0), &xs(&xd, &[0])).expect("generator");
    let t = d.top_element(xs(&xd, &[1]));
    let spec = TripleSpec {
        group: d.clone(),
        y_generators: vec![xs(&xd, &[1])],
        y_images: vec![xs(&xd, &[1])],
        residues: Vec::new(),
        diffs: vec![DiffSpec {
            residue: xs(&xd, &[0]),
            coord: 0,
            y: xs(&xd, &[1]),
            image: b.base.clone(),
        }],
        transversal: vec![d.identity(), b.clone()],
        generators: vec![("t".into(), t), ("b".into(), b)],
    };
    SimilarityTriple::new(spec).expect("lamplighter data is consistent")
}

/// `Z wr Z` with `H = A·<t^m>`, `f(t^m) = t`, `f(b) = b`, `f(b↶t^i) = e`
/// for `0 < i < m`.
pub fn zwrz_pair(m: u64) -> Result<SimilarityTriple, SimilarityError> {
    if m < 2 {
        return Err(SimilarityError::Unsupported("zwrz pair needs m >= 2".into()));
    }
    let xd = XDescriptor::free(1);
    let bd = AbelianDescriptor::free(1);
    let d = GroupDescriptor::new(bd.clone(), xd.clone());
    let one = bd.generator(Coord::fg(0))?;
    let b = d.delta(Coord::fg(0), &xs(&xd, &[0]))?;
    let residues = (0..m as i64)
        .map(|r| ResidueSpec {
            residue: xs(&xd, &[r]),
            window: None,
            generators: vec![one.clone()],
            images: vec![if r == 0 { b.base.clone() } else { BaseMap::default() }],
            tail: None,
        })
        .collect();
    let spec = TripleSpec {
        group: d.clone(),
        y_generators: vec![xs(&xd, &[m as i64])],
        y_images: vec![xs(&xd, &[1])],
        residues,
        diffs: Vec::new(),
        transversal: (0..m as i64).map(|i| d.top_element(xs(&xd, &[i]))).collect(),
        generators: vec![("b".into(), b), ("t".into(), d.top_element(xs(&xd, &[1])))],
    };
    SimilarityTriple::new(spec)
}

/// The pair as a triple on `1 wr L ≅ L`: `Y = M`, `f|Y = phi`.
pub fn lift_pair(p: &AbelianPair) -> Result<SimilarityTriple, SimilarityError> {
    let l = p.l();
    let xd = XDescriptor::from_abelian(l)?;
    let d = GroupDescriptor::new(AbelianDescriptor::trivial(), xd.clone());
    let y_generators = p
        .m()
        .basis()
        .iter()
        .map(|v| xd.element(v.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let y_images = p
        .phi()
        .generator_images()
        .iter()
        .map(|a| xd.element(l.to_vector(a, 0)))
        .collect::<Result<Vec<_>, _>>()?;
    let transversal = p
        .m()
        .transversal_vectors()?
        .into_iter()
        .map(|v| Ok(d.top_element(xd.element(v)?)))
        .collect::<Result<Vec<_>, SimilarityError>>()?;
    let basis = xd.basis();
    let generators = basis
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let name = if basis.len() == 1 {
                "t".to_string()
            } else {
                format!("t{}", i + 1)
            };
            (name, d.top_element(x.clone()))
        })
        .collect();
    SimilarityTriple::new(TripleSpec {
        group: d,
        y_generators,
        y_images,
        residues: Vec::new(),
        diffs: Vec::new(),
        transversal,
        generators,
    })
}

/// `L^ω wr C_2` with `H = (M ⊕ L ⊕ L ⊕ ...) × L^ω` and
/// `f(β1, β2) = ((φ(β11) + β12, β13, ...), (β22, β21, β23, ...))`.
pub fn theorem2_build(p: &AbelianPair) -> Result<SimilarityTriple, SimilarityError> {
    let l = p.l();
    let bd = AbelianDescriptor::omega(l.clone())?;
    let xd = XDescriptor::cyclic(2);
    let d = GroupDescriptor::new(bd.clone(), xd.clone());
    let pos0 = xs(&xd, &[0]);
    let pos1 = xs(&xd, &[1]);
    let at_copy = |copy: usize, a: &AbelianElement| -> Result<AbelianElement, SimilarityError> {
        Ok(bd.element(a.iter().map(|(c, v)| (Coord::new(copy, c.inner), v.clone())))?)
    };
    let rank = l.rank();

    let mut gens0 = Vec::new();
    for row in p.m().basis() {
        gens0.push(at_copy(0, &l.from_vector(row)?)?);
    }
    let mut images0 = Vec::new();
    for img in p.phi().generator_images() {
        images0.push(d.base_at(&at_copy(0, img)?, &pos0));
    }
    let mut gens1 = Vec::new();
    let mut images1 = Vec::new();
    for copy in 0..2 {
        for i in 0..rank {
            gens1.push(bd.generator(Coord::new(copy, i))?);
            images1.push(d.base_at(&bd.generator(Coord::new(1 - copy, i))?, &pos1));
        }
    }
    let residues = vec![
        ResidueSpec {
            residue: pos0.clone(),
            window: Some(1),
            generators: gens0,
            images: images0,
            tail: Some(Tail {
                shift: -1,
                target: pos0.clone(),
            }),
        },
        ResidueSpec {
            residue: pos1.clone(),
            window: Some(2),
            generators: gens1,
            images: images1,
            tail: Some(Tail {
                shift: 0,
                target: pos1.clone(),
            }),
        },
    ];

    let mut transversal = Vec::new();
    for c in p.m().transversal()? {
        for e in 0..2 {
            transversal.push(WreathElement {
                base: d.base_at(&at_copy(0, &c)?, &pos0),
                top: xs(&xd, &[e]),
            });
        }
    }

    let suffix = |i: usize| if rank == 1 { String::new() } else { format!("_{}", i + 1) };
    let mut generators = Vec::new();
    for i in 0..rank {
        let g0 = bd.generator(Coord::new(0, i))?;
        let g1 = bd.generator(Coord::new(1, i))?;
        generators.push((format!("b1{}", suffix(i)), d.base_element(d.base_at(&g0, &pos0))));
        generators.push((format!("b2{}", suffix(i)), d.base_element(d.base_at(&g1, &pos0))));
    }
    generators.push(("s".to_string(), d.top_element(pos1.clone())));
    for i in 0..rank {
        let g0 = bd.generator(Coord::new(0, i))?;
        let diag = d.base_sum(&d.base_at(&g0, &pos0), &d.base_at(&g0, &pos1));
        generators.push((format!("d{}", suffix(i)), d.base_element(diag)));
    }

    SimilarityTriple::new(TripleSpec {
        group: d,
        y_generators: Vec::new(),
        y_images: Vec::new(),
        residues,
        diffs: Vec::new(),
        transversal,
        generators,
    })
}

/// `theorem2_build(adding_machine())`.
pub fn thm2_z() -> SimilarityTriple {
    theorem2_build(&adding_machine()).expect("adding machine has finite index")
}

fn generic_parameter(name: &str) -> Option<u64> {
    let rest = name.strip_prefix("zwrz-pair-generic")?;
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| rest.strip_prefix(':'))?;
    inner.trim().parse().ok()
}

pub fn catalog(name: &str) -> Result<CatalogEntry, SimilarityError> {
    Ok(match name {
        "adding-machine" => CatalogEntry::Pair(adding_machine()),
        "lamplighter" => CatalogEntry::Triple(lamplighter()),
        "thm2-Z" => CatalogEntry::Triple(thm2_z()),
        "zwrz-pair-2" => CatalogEntry::Triple(zwrz_pair(2)?),
        _ => match generic_parameter(name) {
            Some(m) => CatalogEntry::Triple(zwrz_pair(m)?),
            None => return Err(SimilarityError::UnknownCatalog(name.into())),
        },
    })
}

pub fn catalog_triple(name: &str) -> Result<SimilarityTriple, SimilarityError> {
    catalog(name)?.into_triple()
}

/// `(name, shape, index, note)` for every catalog entry.
pub fn catalog_entries() -> Vec<(String, String, String, String)> {
    let row = |n: &str, shape: &str, m: &str, note: &str| {
        (n.to_string(), shape.to_string(), m.to_string(), note.to_string())
    };
    vec![
        row(
            "adding-machine",
            "pair (Z, 2Z, x -> x/2); as a triple 1 wr Z",
            "2",
            "binary odometer",
        ),
        row(
            "lamplighter",
            "Z/2 wr Z",
            "2",
            "H = A0·X with A0 the zero-sum elements, f(t) = t, f(b + b^t) = b",
        ),
        row(
            "thm2-Z",
            "omega(Z) wr Z/2",
            "4",
            "countable direct sum construction over the adding machine",
        ),
        row(
            "zwrz-pair-2",
            "Z wr Z",
            "2",
            "H = A·<t^2>, f(t^2) = t, f(b) = b, f(b^t) = e; nontrivial f-core",
        ),
        row(
            "zwrz-pair-generic(m)",
            "Z wr Z",
            "m",
            "H = A·<t^m>, f(t^m) = t, f(b) = b, f(b^(t^i)) = e for 0 < i < m",
        ),
    ]
}
