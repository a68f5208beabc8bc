//! Similarity triples `(G, H, f)` for `G = B wr X`.
//!
//! `H` is stored in the normalized shape `H = A0·Y` with `Y ≤ X` of finite
//! index and
//!
//! ```text
//! A0 = { a in A : for every residue r of X/Y, sum_{p in r+Y} a(p) ∈ S_r }
//! ```
//!
//! for finite-index subgroups `S_r ≤ B`. The virtual endomorphism is given
//! by finite data: the images of the `Y` generators in `X`, the images of
//! the generators of each `S_r` (placed at the residue `r`), and the images
//! `F(c, r, y_i)` of the differences `b_c@(r+y_i) − b_c@r`. Everything else
//! follows from the twist rule `f(a↶y) = f(a)↶f(y)`.
//!
//! For a countable direct sum `B = L^ω` only trivial `Y` is supported; each
//! `S_r` is then a lattice on the first `window` copies, and the copies past
//! the window are moved by a fixed copy shift (the tail rule).

mod catalog;
mod config;

pub use catalog::{
    adding_machine, catalog, catalog_entries, catalog_triple, lamplighter, lift_pair,
    theorem2_build, thm2_z, zwrz_pair, CatalogEntry, CATALOG_NAMES,
};
pub use config::{format_config, parse_config};

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abelian::{
    AbelianDescriptor, AbelianElement, AbelianError, AbelianHom, Coord, Index, SubgroupLattice,
};
use crate::literal::{format_element, format_x, LiteralError};
use crate::wreath::{BaseMap, GroupDescriptor, WreathElement, WreathError, XDescriptor, XElement};

/// Largest index for which transversals are enumerated.
pub const MAX_INDEX: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimilarityError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Wreath(#[from] WreathError),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("subgroup has infinite index")]
    InfiniteIndex,
    #[error("index {0} is too large to enumerate")]
    IndexTooLarge(BigUint),
    #[error("element is not in H: {0}")]
    NotInSubgroup(String),
    #[error("ill-defined endomorphism: {0}")]
    IllDefined(String),
    #[error("incoherent transversal: {0}")]
    IncoherentTransversal(String),
    #[error("unsupported triple: {0}")]
    Unsupported(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),
}

/// Copies `j >= window` of a residue sum go to copy `j + shift` at `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tail {
    pub shift: i64,
    pub target: XElement,
}

/// Congruence data and endomorphism images for one residue of `X/Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSpec {
    pub residue: XElement,
    pub window: Option<usize>,
    pub generators: Vec<AbelianElement>,
    pub images: Vec<BaseMap>,
    pub tail: Option<Tail>,
}

/// `f(b_coord@(residue + y) − b_coord@residue) = image` for a `Y` generator `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSpec {
    pub residue: XElement,
    pub coord: usize,
    pub y: XElement,
    pub image: BaseMap,
}

/// Raw triple data, exactly as read from a config file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSpec {
    pub group: GroupDescriptor,
    pub y_generators: Vec<XElement>,
    pub y_images: Vec<XElement>,
    pub residues: Vec<ResidueSpec>,
    pub diffs: Vec<DiffSpec>,
    pub transversal: Vec<WreathElement>,
    pub generators: Vec<(String, WreathElement)>,
}

/// `S_r ≤ B`.
#[derive(Clone, Debug)]
pub enum Congruence {
    Lattice(SubgroupLattice),
    Window {
        copies: usize,
        lattice: SubgroupLattice,
    },
}

impl Congruence {
    pub fn lattice(&self) -> &SubgroupLattice {
        match self {
            Congruence::Lattice(l) => l,
            Congruence::Window { lattice, .. } => lattice,
        }
    }

    fn vector(&self, b: &AbelianDescriptor, s: &AbelianElement) -> Vec<BigInt> {
        match self {
            Congruence::Lattice(_) => b.to_vector(s, 0),
            Congruence::Window { copies, .. } => b.to_vector(s, *copies),
        }
    }

    pub fn contains(&self, b: &AbelianDescriptor, s: &AbelianElement) -> bool {
        self.lattice().contains_vector(&self.vector(b, s))
    }

    /// Canonical representative of `s + S_r`.
    pub fn class(&self, b: &AbelianDescriptor, s: &AbelianElement) -> Vec<BigInt> {
        self.lattice().coset_rep(&self.vector(b, s))
    }

    pub fn index(&self) -> &Index {
        self.lattice().index()
    }
}

/// `H = A0·Y`: the lattice `Y ≤ X` and one congruence per residue.
#[derive(Clone, Debug)]
pub struct WreathSubgroupSpec {
    y: SubgroupLattice,
    residues: Vec<XElement>,
    residue_keys: HashMap<Vec<BigInt>, usize>,
    congruences: Vec<Congruence>,
}

impl WreathSubgroupSpec {
    pub fn y_lattice(&self) -> &SubgroupLattice {
        &self.y
    }

    pub fn residues(&self) -> &[XElement] {
        &self.residues
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    fn canonical_residue(&self, xd: &XDescriptor, r: &XElement) -> Result<usize, SimilarityError> {
        xd.check(r)?;
        let i = self.residue_position(r);
        if self.residues[i] != *r {
            return Err(SimilarityError::Unsupported(format!(
                "residue {} is not the canonical representative {}",
                format_x(r),
                format_x(&self.residues[i])
            )));
        }
        Ok(i)
    }

    fn residue_position(&self, p: &XElement) -> usize {
        self.residue_keys[&self.y.coset_rep(p.coords())]
    }
}

/// Finite data for `f: H -> G`.
#[derive(Clone, Debug)]
pub struct VirtualEndo {
    on_y: AbelianHom,
    y_images: Vec<XElement>,
    sum_images: Vec<Vec<BaseMap>>,
    tails: Vec<Option<Tail>>,
    /// `diffs[r][c][i] = F(c, r, y_i)`.
    diffs: Vec<Vec<Vec<BaseMap>>>,
}

impl VirtualEndo {
    pub fn on_y(&self) -> &AbelianHom {
        &self.on_y
    }

    pub fn y_images(&self) -> &[XElement] {
        &self.y_images
    }
}

/// Complete invariant of the right coset `H·g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetKey {
    pub top: Vec<BigInt>,
    pub classes: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct SimilarityTriple {
    spec: TripleSpec,
    group: GroupDescriptor,
    subgroup: WreathSubgroupSpec,
    endo: VirtualEndo,
    index: usize,
    transversal_keys: HashMap<CosetKey, usize>,
    duplicate: Option<(usize, usize)>,
}

fn sum_image(
    d: &GroupDescriptor,
    cong: &Congruence,
    images: &[BaseMap],
    tail: Option<&Tail>,
    s: &AbelianElement,
) -> BaseMap {
    let b = d.base_group();
    let v = cong.vector(b, s);
    let coeffs = cong
        .lattice()
        .basis_coefficients(&v)
        .expect("residue sum lies in its congruence subgroup");
    let mut out = BaseMap::default();
    for (k, img) in coeffs.iter().zip(images) {
        d.base_add_scaled(&mut out, k, img);
    }
    if let (Congruence::Window { copies, .. }, Some(tail)) = (cong, tail) {
        let moved: Vec<(Coord, BigInt)> = s
            .iter()
            .filter(|(c, _)| c.copy >= *copies)
            .map(|(c, v)| {
                let copy = (c.copy as i64 + tail.shift) as usize;
                (Coord::new(copy, c.inner), v.clone())
            })
            .collect();
        let e = b.element(moved).expect("tail copies exist");
        d.base_add_at(&mut out, &tail.target, &BigInt::one(), &e);
    }
    out
}

fn ill(msg: impl Into<String>) -> SimilarityError {
    SimilarityError::IllDefined(msg.into())
}

impl SimilarityTriple {
    pub fn new(spec: TripleSpec) -> Result<Self, SimilarityError> {
        let d = spec.group.clone();
        let b = d.base_group().clone();
        let xd = d.top_group().clone();
        let xa = xd.as_abelian();

        for y in spec.y_generators.iter().chain(&spec.y_images) {
            xd.check(y)?;
        }
        if spec.y_images.len() != spec.y_generators.len() {
            return Err(ill(format!(
                "{} Y generators but {} images",
                spec.y_generators.len(),
                spec.y_images.len()
            )));
        }
        let y = SubgroupLattice::new(
            spec.y_generators.iter().map(|y| y.coords().to_vec()).collect(),
            xa.clone(),
        )?;
        let x_index = y.index().finite().cloned().ok_or(SimilarityError::InfiniteIndex)?;
        let on_y = AbelianHom::new(
            y.clone(),
            xa.clone(),
            spec.y_images
                .iter()
                .map(|x| xa.from_vector(x.coords()))
                .collect::<Result<_, _>>()?,
        )?;
        if b.is_omega() && spec.y_generators.iter().any(|y| !y.is_identity()) {
            return Err(SimilarityError::Unsupported(
                "a countable direct sum base needs trivial Y".into(),
            ));
        }

        let residues: Vec<XElement> = y
            .transversal_vectors()?
            .into_iter()
            .map(|v| xd.element(v))
            .collect::<Result<_, _>>()?;
        let residue_keys: HashMap<Vec<BigInt>, usize> = residues
            .iter()
            .enumerate()
            .map(|(i, r)| (y.coset_rep(r.coords()), i))
            .collect();
        let mut subgroup = WreathSubgroupSpec {
            y,
            residues,
            residue_keys,
            congruences: Vec::new(),
        };

        let n = subgroup.residues.len();
        let mut congruences: Vec<Option<Congruence>> = vec![None; n];
        let mut sum_images: Vec<Vec<BaseMap>> = vec![Vec::new(); n];
        let mut tails: Vec<Option<Tail>> = vec![None; n];
        for rs in &spec.residues {
            let r = subgroup.canonical_residue(&xd, &rs.residue)?;
            if congruences[r].is_some() {
                return Err(ill(format!("residue {} given twice", format_x(&rs.residue))));
            }
            for g in &rs.generators {
                b.check(g)?;
            }
            if rs.images.len() != rs.generators.len() {
                return Err(ill(format!(
                    "residue {}: {} generators but {} images",
                    format_x(&rs.residue),
                    rs.generators.len(),
                    rs.images.len()
                )));
            }
            for img in &rs.images {
                d.check(&d.base_element(img.clone()))?;
            }
            let cong = if b.is_omega() {
                let copies = rs.window.filter(|&w| w > 0).ok_or_else(|| {
                    ill(format!("residue {} needs a positive window", format_x(&rs.residue)))
                })?;
                let tail = rs.tail.as_ref().ok_or_else(|| {
                    ill(format!("residue {} needs a tail rule", format_x(&rs.residue)))
                })?;
                xd.check(&tail.target)?;
                if copies as i64 + tail.shift < 0 {
                    return Err(ill(format!(
                        "residue {}: tail shift {} moves copy {} below 0",
                        format_x(&rs.residue),
                        tail.shift,
                        copies
                    )));
                }
                if rs.generators.iter().any(|g| g.support().any(|c| c.copy >= copies)) {
                    return Err(ill(format!(
                        "residue {}: generator outside the window",
                        format_x(&rs.residue)
                    )));
                }
                let lattice = SubgroupLattice::new(
                    rs.generators.iter().map(|g| b.to_vector(g, copies)).collect(),
                    b.window(copies)?,
                )?;
                Congruence::Window { copies, lattice }
            } else {
                if rs.window.is_some() || rs.tail.is_some() {
                    return Err(ill("window and tail rules need a countable direct sum base"));
                }
                Congruence::Lattice(SubgroupLattice::new(
                    rs.generators.iter().map(|g| b.to_vector(g, 0)).collect(),
                    b.clone(),
                )?)
            };
            if cong.index().finite().is_none() {
                return Err(SimilarityError::InfiniteIndex);
            }
            for rel in cong.lattice().basis_relations() {
                let mut acc = BaseMap::default();
                for (k, img) in rel.iter().zip(&rs.images) {
                    d.base_add_scaled(&mut acc, k, img);
                }
                if !acc.is_identity() {
                    return Err(ill(format!(
                        "residue {}: images violate a relation among the generators",
                        format_x(&rs.residue)
                    )));
                }
            }
            congruences[r] = Some(cong);
            sum_images[r] = rs.images.clone();
            tails[r] = rs.tail.clone();
        }
        subgroup.congruences = congruences
            .into_iter()
            .enumerate()
            .map(|(i, c)| match c {
                Some(c) => Ok(c),
                None if b.is_omega() => Err(ill(format!(
                    "residue {} needs a window",
                    format_x(&subgroup.residues[i])
                ))),
                None => {
                    let l = SubgroupLattice::new(Vec::new(), b.clone())?;
                    if l.index().finite().is_none() {
                        return Err(SimilarityError::InfiniteIndex);
                    }
                    Ok(Congruence::Lattice(l))
                }
            })
            .collect::<Result<_, SimilarityError>>()?;

        let mut index = x_index;
        for c in &subgroup.congruences {
            index *= c.index().finite().expect("finite");
        }
        let index_usize = index
            .to_usize()
            .filter(|&m| m <= MAX_INDEX)
            .ok_or_else(|| SimilarityError::IndexTooLarge(index.clone()))?;

        let y_images = spec.y_images.clone();
        let ny = y_images.len();

        // Difference images: given, or derived when b_c lies in S_r.
        let diffs = if b.is_omega() {
            if !spec.diffs.is_empty() {
                return Err(ill("difference images need a finitely generated base"));
            }
            vec![Vec::new(); n]
        } else {
            let rank = b.rank();
            let mut given: Vec<Vec<Vec<Option<BaseMap>>>> = vec![vec![vec![None; ny]; rank]; n];
            for ds in &spec.diffs {
                let r = subgroup.canonical_residue(&xd, &ds.residue)?;
                if ds.coord >= rank {
                    return Err(ill(format!("difference coordinate {} out of range", ds.coord)));
                }
                let i = spec
                    .y_generators
                    .iter()
                    .position(|y| *y == ds.y)
                    .ok_or_else(|| ill(format!("{} is not a Y generator", format_x(&ds.y))))?;
                d.check(&d.base_element(ds.image.clone()))?;
                let slot = &mut given[r][ds.coord][i];
                if slot.is_some() {
                    return Err(ill("difference image given twice"));
                }
                *slot = Some(ds.image.clone());
            }
            let mut diffs = Vec::with_capacity(n);
            for (r, per_r) in given.into_iter().enumerate() {
                let cong = &subgroup.congruences[r];
                let mut rows = Vec::with_capacity(rank);
                for (c, per_c) in per_r.into_iter().enumerate() {
                    let e = b.generator(Coord::fg(c))?;
                    let mut row = Vec::with_capacity(ny);
                    for (i, slot) in per_c.into_iter().enumerate() {
                        let v = match slot {
                            Some(v) => v,
                            None if cong.contains(&b, &e) => {
                                let s = sum_image(&d, cong, &sum_images[r], None, &e);
                                d.base_sub(&d.shift(&s, &y_images[i]), &s)
                            }
                            None => {
                                return Err(ill(format!(
                                    "missing difference image for residue {}, coordinate {}, y {}",
                                    format_x(&subgroup.residues[r]),
                                    c,
                                    format_x(&spec.y_generators[i])
                                )))
                            }
                        };
                        row.push(v);
                    }
                    rows.push(row);
                }
                diffs.push(rows);
            }
            diffs
        };

        let endo = VirtualEndo {
            on_y,
            y_images,
            sum_images,
            tails,
            diffs,
        };
        let mut t = SimilarityTriple {
            spec,
            group: d,
            subgroup,
            endo,
            index: index_usize,
            transversal_keys: HashMap::new(),
            duplicate: None,
        };
        t.check_difference_data()?;
        for g in t.spec.transversal.iter().chain(t.spec.generators.iter().map(|(_, g)| g)) {
            t.group.check(g)?;
        }
        let mut keys = HashMap::new();
        for (i, x) in t.spec.transversal.iter().enumerate() {
            let k = t.coset_key(x);
            if let Some(&j) = keys.get(&k) {
                t.duplicate.get_or_insert((j, i));
            } else {
                keys.insert(k, i);
            }
        }
        t.transversal_keys = keys;
        Ok(t)
    }

    fn check_difference_data(&self) -> Result<(), SimilarityError> {
        let d = &self.group;
        let b = d.base_group();
        if b.is_omega() {
            return Ok(());
        }
        let ny = self.endo.y_images.len();
        let rname = |r: usize| format_x(&self.subgroup.residues[r]);
        for (r, rows) in self.endo.diffs.iter().enumerate() {
            for (c, row) in rows.iter().enumerate() {
                let n = b.factors()[c].modulus();
                if !n.is_zero() {
                    for (i, v) in row.iter().enumerate() {
                        if !d.base_scale(v, &BigInt::from(n.clone())).is_identity() {
                            return Err(ill(format!(
                                "residue {}, coordinate {}, y {}: image is not killed by the order {}",
                                rname(r),
                                c,
                                i,
                                n
                            )));
                        }
                    }
                }
            }
            let cong = &self.subgroup.congruences[r];
            for (j, s) in cong.lattice().basis().iter().enumerate() {
                let img = &self.endo.sum_images[r][j];
                for i in 0..ny {
                    let mut lhs = BaseMap::default();
                    for (c, k) in s.iter().enumerate() {
                        d.base_add_scaled(&mut lhs, k, &rows[c][i]);
                    }
                    let rhs = d.base_sub(&d.shift(img, &self.endo.y_images[i]), img);
                    if lhs != rhs {
                        return Err(ill(format!(
                            "residue {}: generator {} of S_r is incompatible with the twist by y {}",
                            rname(r),
                            j,
                            i
                        )));
                    }
                }
            }
            for (c, row) in rows.iter().enumerate() {
                for i in 0..ny {
                    for j in (i + 1)..ny {
                        let fi = &self.endo.y_images[i];
                        let fj = &self.endo.y_images[j];
                        let a = d.base_sum(&d.shift(&row[j], fi), &row[i]);
                        let bb = d.base_sum(&d.shift(&row[i], fj), &row[j]);
                        if a != bb {
                            return Err(ill(format!(
                                "residue {}, coordinate {}: y generators {} and {} do not commute",
                                rname(r),
                                c,
                                i,
                                j
                            )));
                        }
                    }
                }
                for rel in self.subgroup.y.basis_relations() {
                    if !self.walk(r, c, &rel).is_identity() {
                        return Err(ill(format!(
                            "residue {}, coordinate {}: a relation of Y has nonzero image",
                            rname(r),
                            c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `F(c, r, sum_i k_i y_i)` by the cocycle recursion.
    fn walk(&self, r: usize, c: usize, k: &[BigInt]) -> BaseMap {
        let d = &self.group;
        let xd = d.top_group();
        let mut acc = BaseMap::default();
        for (i, ki) in k.iter().enumerate() {
            if ki.is_zero() {
                continue;
            }
            let step = &self.endo.diffs[r][c][i];
            let fy = &self.endo.y_images[i];
            let steps = ki.magnitude().to_u64().expect("walk length fits in u64");
            if ki > &BigInt::zero() {
                for _ in 0..steps {
                    acc = d.base_sum(&d.shift(&acc, fy), step);
                }
            } else {
                let back = xd.neg(fy);
                for _ in 0..steps {
                    acc = d.shift(&d.base_sub(&acc, step), &back);
                }
            }
        }
        acc
    }

    fn difference_image(&self, r: usize, c: usize, y: &XElement) -> BaseMap {
        if y.is_identity() {
            return BaseMap::default();
        }
        let k = self
            .subgroup
            .y
            .basis_coefficients(y.coords())
            .expect("offset lies in Y");
        self.walk(r, c, &k)
    }

    pub fn spec(&self) -> &TripleSpec {
        &self.spec
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn subgroup(&self) -> &WreathSubgroupSpec {
        &self.subgroup
    }

    pub fn endo(&self) -> &VirtualEndo {
        &self.endo
    }

    /// `m = [G:H]`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn transversal(&self) -> &[WreathElement] {
        &self.spec.transversal
    }

    pub fn generators(&self) -> &[(String, WreathElement)] {
        &self.spec.generators
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.spec.generators.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Residue index of `p` and the offset `p − r ∈ Y`.
    pub fn residue_of(&self, p: &XElement) -> (usize, XElement) {
        let r = self.subgroup.residue_position(p);
        let y = self.group.top_group().sub(p, &self.subgroup.residues[r]);
        (r, y)
    }

    /// `sigma_r(a) = sum_{p in r+Y} a(p)` for every residue.
    pub fn residue_sums(&self, base: &BaseMap) -> Vec<AbelianElement> {
        let b = self.group.base_group();
        let mut out = vec![b.zero(); self.subgroup.residues.len()];
        for (p, v) in base.iter() {
            let r = self.subgroup.residue_position(p);
            b.add_scaled_into(&mut out[r], &BigInt::one(), v);
        }
        out
    }

    pub fn coset_key(&self, g: &WreathElement) -> CosetKey {
        let b = self.group.base_group();
        let classes = self
            .residue_sums(&g.base)
            .iter()
            .zip(&self.subgroup.congruences)
            .map(|(s, c)| c.class(b, s))
            .collect();
        CosetKey {
            top: self.subgroup.y.coset_rep(g.top.coords()),
            classes,
        }
    }

    pub fn in_subgroup(&self, g: &WreathElement) -> bool {
        let b = self.group.base_group();
        self.subgroup.y.contains_vector(g.top.coords())
            && self
                .residue_sums(&g.base)
                .iter()
                .zip(&self.subgroup.congruences)
                .all(|(s, c)| c.contains(b, s))
    }

    /// The `j` (1-based) with `g ∈ H·x_j`.
    pub fn coset_index(&self, g: &WreathElement) -> Result<usize, SimilarityError> {
        let k = self.coset_key(g);
        self.transversal_keys.get(&k).map(|i| i + 1).ok_or_else(|| {
            SimilarityError::IncoherentTransversal(format!(
                "no transversal element in the coset of {}",
                format_element(&self.group, g)
            ))
        })
    }

    /// Succeeds iff the transversal has `m` elements in distinct cosets and
    /// starts with an element of `H`.
    pub fn transversal_coherent(&self) -> Result<(), SimilarityError> {
        let t = &self.spec.transversal;
        if t.len() != self.index {
            return Err(SimilarityError::IncoherentTransversal(format!(
                "{} elements for index {}",
                t.len(),
                self.index
            )));
        }
        if let Some((i, j)) = self.duplicate {
            return Err(SimilarityError::IncoherentTransversal(format!(
                "elements {} and {} lie in the same coset",
                i + 1,
                j + 1
            )));
        }
        if !self.in_subgroup(&t[0]) {
            return Err(SimilarityError::IncoherentTransversal(
                "first element is not in H".into(),
            ));
        }
        Ok(())
    }

    pub fn apply_on_y(&self, y: &XElement) -> Result<XElement, SimilarityError> {
        let xa = self.endo.on_y.codomain();
        let img = self.endo.on_y.apply_vector(y.coords()).ok_or_else(|| {
            SimilarityError::NotInSubgroup(format!("top {} is not in Y", format_x(y)))
        })?;
        Ok(self.group.top_group().element(xa.to_vector(&img, 0))?)
    }

    /// `f(h)` for `h ∈ H`.
    pub fn apply_f(&self, h: &WreathElement) -> Result<WreathElement, SimilarityError> {
        if !self.in_subgroup(h) {
            return Err(SimilarityError::NotInSubgroup(format_element(&self.group, h)));
        }
        let d = &self.group;
        let one = BigInt::one();
        let mut out = BaseMap::default();
        for (r, s) in self.residue_sums(&h.base).iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            let img = sum_image(
                d,
                &self.subgroup.congruences[r],
                &self.endo.sum_images[r],
                self.endo.tails[r].as_ref(),
                s,
            );
            d.base_add_scaled(&mut out, &one, &img);
        }
        if !self.endo.y_images.is_empty() {
            for (p, v) in h.base.iter() {
                let (r, y) = self.residue_of(p);
                if y.is_identity() {
                    continue;
                }
                for (c, k) in v.iter() {
                    let img = self.difference_image(r, c.inner, &y);
                    d.base_add_scaled(&mut out, k, &img);
                }
            }
        }
        let top = self.apply_on_y(&h.top)?;
        Ok(WreathElement { base: out, top })
    }

    /// `g·x⁻¹` for a top-and-residue correction `x`, landing in `H`.
    pub fn project_to_subgroup(&self, g: &WreathElement) -> WreathElement {
        let d = &self.group;
        let b = d.base_group();
        let xd = d.top_group();
        let top_rep = xd
            .element(self.subgroup.y.coset_rep(g.top.coords()))
            .expect("coset representative is an X element");
        let top = xd.sub(&g.top, &top_rep);
        let mut base = g.base.clone();
        for (r, s) in self.residue_sums(&g.base).iter().enumerate() {
            let cong = &self.subgroup.congruences[r];
            let class = cong.class(b, s);
            let rep = match cong {
                Congruence::Lattice(_) => b.from_vector(&class).expect("dimension"),
                Congruence::Window { .. } => b.from_window_vector(&class),
            };
            d.base_add_at(&mut base, &self.subgroup.residues[r], &BigInt::from(-1), &rep);
        }
        WreathElement { base, top }
    }

    fn random_x<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> XElement {
        let xd = self.group.top_group();
        let mut v: Vec<BigInt> = (0..xd.free_rank())
            .map(|_| BigInt::from(rng.gen_range(-radius..=radius)))
            .collect();
        for n in xd.torsion() {
            let n = n.to_u64().unwrap_or(u64::MAX);
            v.push(BigInt::from(rng.gen_range(0..n)));
        }
        xd.element(v).expect("dimension")
    }

    fn random_b<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> AbelianElement {
        let b = self.group.base_group();
        let pairs: Vec<(Coord, BigInt)> = if b.is_omega() {
            (0..rng.gen_range(1..=2))
                .map(|_| {
                    let c = Coord::new(rng.gen_range(0..4), rng.gen_range(0..b.rank()));
                    (c, BigInt::from(rng.gen_range(-radius..=radius)))
                })
                .collect()
        } else {
            (0..b.rank())
                .map(|i| (Coord::fg(i), BigInt::from(rng.gen_range(-radius..=radius))))
                .collect()
        };
        b.element(pairs).expect("coordinates exist")
    }

    /// Random element with top and support coordinates in `[-radius, radius]`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> WreathElement {
        let d = &self.group;
        let top = self.random_x(rng, radius);
        let mut base = BaseMap::default();
        for _ in 0..rng.gen_range(0..=3) {
            let p = self.random_x(rng, radius);
            let v = self.random_b(rng, radius);
            d.base_add_at(&mut base, &p, &BigInt::one(), &v);
        }
        WreathElement { base, top }
    }

    pub fn random_subgroup_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> WreathElement {
        let g = self.random_element(rng, radius);
        self.project_to_subgroup(&g)
    }

    /// Random element of `A0 = A ∩ H`.
    pub fn random_base_subgroup_element<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        radius: i64,
    ) -> WreathElement {
        let mut g = self.random_element(rng, radius);
        g.top = self.group.top_group().identity();
        self.project_to_subgroup(&g)
    }
}

/// AbelianPair `(L, M, phi)` with `phi: M -> L`.
#[derive(Clone, Debug)]
pub struct AbelianPair {
    phi: AbelianHom,
    simple_claimed: bool,
}

impl AbelianPair {
    pub fn new(
        m: SubgroupLattice,
        images: Vec<AbelianElement>,
        simple_claimed: bool,
    ) -> Result<Self, SimilarityError> {
        if m.index().finite().is_none() {
            return Err(SimilarityError::InfiniteIndex);
        }
        let l = m.ambient().clone();
        let phi = AbelianHom::new(m, l, images)?;
        Ok(AbelianPair {
            phi,
            simple_claimed,
        })
    }

    pub fn l(&self) -> &AbelianDescriptor {
        self.phi.codomain()
    }

    pub fn m(&self) -> &SubgroupLattice {
        self.phi.domain()
    }

    pub fn phi(&self) -> &AbelianHom {
        &self.phi
    }

    pub fn simple_claimed(&self) -> bool {
        self.simple_claimed
    }

    /// `[L:M]`.
    pub fn index(&self) -> BigUint {
        self.m().index().finite().cloned().expect("finite index")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationEntry {
    pub axiom: String,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<WreathElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, axiom: &str) -> Option<&ValidationEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }

    pub fn render(&self, d: &GroupDescriptor) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let mark = if e.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("{} {}: {}", mark, e.axiom, e.detail));
            if let Some(g) = &e.counterexample {
                out.push_str(&format!(" [witness {}]", format_element(d, g)));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let mark = if e.passed { "pass" } else { "FAIL" };
            writeln!(f, "{} {}: {}", mark, e.axiom, e.detail)?;
        }
        Ok(())
    }
}

fn entry(axiom: &str, passed: bool, detail: String, witness: Option<WreathElement>) -> ValidationEntry {
    ValidationEntry {
        axiom: axiom.into(),
        passed,
        detail,
        counterexample: witness,
    }
}

/// Checks the triple axioms; randomized checks use `samples` draws from a
/// generator seeded with `seed`.
pub fn validate_triple(t: &SimilarityTriple, samples: usize, seed: u64) -> ValidationReport {
    let d = t.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let tr = t.transversal();

    entries.push(entry(
        "transversal size",
        tr.len() == t.index(),
        format!("{} elements, index {}", tr.len(), t.index()),
        None,
    ));
    let first_ok = tr.first().is_some_and(|x| x.is_identity());
    entries.push(entry(
        "transversal starts at identity",
        first_ok,
        if first_ok { "x_1 = e".into() } else { "x_1 is not the identity".into() },
        tr.first().filter(|_| !first_ok).cloned(),
    ));

    let mut coherence = entry("coset coherence", true, String::new(), None);
    if let Some((i, j)) = t.duplicate {
        coherence.passed = false;
        coherence.detail = format!("x_{} and x_{} lie in the same coset", i + 1, j + 1);
        coherence.counterexample = Some(tr[j].clone());
    } else if let Some((i, _)) = tr
        .iter()
        .enumerate()
        .find(|(i, x)| t.coset_index(x).ok() != Some(i + 1))
    {
        coherence.passed = false;
        coherence.detail = format!("coset_index(x_{}) != {}", i + 1, i + 1);
        coherence.counterexample = Some(tr[i].clone());
    } else {
        for _ in 0..samples {
            let g = t.random_element(&mut rng, 3);
            let h = t.random_subgroup_element(&mut rng, 3);
            let hg = d.mul(&h, &g);
            match (t.coset_index(&g), t.coset_index(&hg)) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(_), Ok(_)) => {
                    coherence.passed = false;
                    coherence.detail = "coset_index(h·g) != coset_index(g)".into();
                    coherence.counterexample = Some(g);
                    break;
                }
                _ => {
                    coherence.passed = false;
                    coherence.detail = "element outside every transversal coset".into();
                    coherence.counterexample = Some(g);
                    break;
                }
            }
        }
        if coherence.passed {
            coherence.detail = format!("{} distinct cosets, {} samples", tr.len(), samples);
        }
    }
    entries.push(coherence);

    let mut hom = entry("f homomorphism", true, String::new(), None);
    for _ in 0..samples {
        let h1 = t.random_subgroup_element(&mut rng, 3);
        let h2 = t.random_subgroup_element(&mut rng, 3);
        let lhs = t.apply_f(&d.mul(&h1, &h2));
        let rhs = t
            .apply_f(&h1)
            .and_then(|a| t.apply_f(&h2).map(|b| d.mul(&a, &b)));
        if lhs.is_err() || lhs != rhs {
            hom.passed = false;
            hom.detail = format!("f(h1·h2) != f(h1)·f(h2) with h2 = {}", format_element(d, &h2));
            hom.counterexample = Some(h1);
            break;
        }
    }
    if hom.passed {
        hom.detail = format!("{} sampled pairs", samples);
    }
    entries.push(hom);

    let mut gens = entry("generators in G", true, format!("{} generators", t.generators().len()), None);
    for (name, g) in t.generators() {
        if let Err(e) = d.check(g) {
            gens.passed = false;
            gens.detail = format!("{}: {}", name, e);
        }
    }
    entries.push(gens);

    ValidationReport { entries }
}

/// Builds `x` in a top group from small integers.
pub(crate) fn xs(xd: &XDescriptor, v: &[i64]) -> XElement {
    xd.from_ints(v).expect("valid top coordinates")
}

#[cfg(test)]
mod tests;
