//! Exact arithmetic in finitely generated abelian groups and in countable
//! direct sums of copies of one, plus finite-index subgroups (via Hermite
//! normal form), coset transversals, and homomorphisms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::hnf::{hermite_form, HermiteForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("subgroup has infinite index")]
    InfiniteIndex,
    #[error("element {0} is outside the domain")]
    OutsideDomain(String),
    #[error("homomorphism is not well defined: relation {0} does not map to zero")]
    IllDefined(String),
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// One cyclic factor; modulus 0 is the infinite cyclic group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicFactor {
    modulus: BigUint,
}

impl CyclicFactor {
    pub fn new(modulus: impl Into<BigUint>) -> Self {
        CyclicFactor {
            modulus: modulus.into(),
        }
    }

    pub fn integers() -> Self {
        CyclicFactor::new(0u32)
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_infinite(&self) -> bool {
        self.modulus.is_zero()
    }

    pub fn reduce(&self, v: BigInt) -> BigInt {
        if self.is_infinite() {
            v
        } else {
            v.mod_floor(&BigInt::from(self.modulus.clone()))
        }
    }
}

impl fmt::Display for CyclicFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "Z")
        } else {
            write!(f, "Z/{}", self.modulus)
        }
    }
}

/// Coordinate of an abelian element. Finitely generated groups only use
/// `copy == 0`; in a countable direct sum `copy` indexes the summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub copy: usize,
    pub inner: usize,
}

impl Coord {
    pub fn new(copy: usize, inner: usize) -> Self {
        Coord { copy, inner }
    }

    pub fn fg(inner: usize) -> Self {
        Coord { copy: 0, inner }
    }
}

/// Either a finite list of cyclic factors or the countable direct sum of
/// copies of a finitely generated descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianDescriptor {
    factors: Vec<CyclicFactor>,
    omega_of: Option<Box<AbelianDescriptor>>,
}

impl AbelianDescriptor {
    pub fn finite(factors: Vec<CyclicFactor>) -> Result<Self, AbelianError> {
        if factors.is_empty() {
            return Err(AbelianError::InvalidDescriptor(
                "a finitely generated descriptor needs at least one factor (use Z/1 for the trivial group)".into(),
            ));
        }
        Ok(AbelianDescriptor {
            factors,
            omega_of: None,
        })
    }

    pub fn omega(inner: AbelianDescriptor) -> Result<Self, AbelianError> {
        if inner.is_omega() {
            return Err(AbelianError::InvalidDescriptor(
                "nested countable direct sums are not supported".into(),
            ));
        }
        Ok(AbelianDescriptor {
            factors: Vec::new(),
            omega_of: Some(Box::new(inner)),
        })
    }

    /// `Z^rank`, `rank >= 1`.
    pub fn free(rank: usize) -> Self {
        assert!(rank > 0, "free abelian descriptor needs positive rank");
        AbelianDescriptor::finite(vec![CyclicFactor::integers(); rank]).unwrap()
    }

    pub fn cyclic(modulus: u64) -> Self {
        AbelianDescriptor::finite(vec![CyclicFactor::new(modulus)]).unwrap()
    }

    pub fn trivial() -> Self {
        AbelianDescriptor::cyclic(1)
    }

    pub fn is_omega(&self) -> bool {
        self.omega_of.is_some()
    }

    pub fn omega_inner(&self) -> Option<&AbelianDescriptor> {
        self.omega_of.as_deref()
    }

    /// Factors of the finitely generated part (of the summand, for omega).
    pub fn factors(&self) -> &[CyclicFactor] {
        match &self.omega_of {
            Some(inner) => inner.factors(),
            None => &self.factors,
        }
    }

    /// Number of coordinates per copy.
    pub fn rank(&self) -> usize {
        self.factors().len()
    }

    pub fn factor(&self, coord: Coord) -> Option<&CyclicFactor> {
        if !self.is_omega() && coord.copy != 0 {
            return None;
        }
        self.factors().get(coord.inner)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors().iter().all(|f| f.modulus().is_one())
    }

    /// Exponent of the group; `None` when it is infinite.
    pub fn exponent(&self) -> Option<BigUint> {
        let mut e = BigUint::one();
        for f in self.factors() {
            if f.is_infinite() {
                return None;
            }
            e = e.lcm(f.modulus());
        }
        Some(e)
    }

    /// Whether `m·B` is the trivial group.
    pub fn multiple_is_trivial(&self, m: &BigInt) -> bool {
        match self.exponent() {
            None => false,
            Some(e) => (m.magnitude() % &e).is_zero(),
        }
    }

    /// The descriptor of the first `copies` summands, flattened.
    pub fn window(&self, copies: usize) -> Result<AbelianDescriptor, AbelianError> {
        let inner = self
            .omega_of
            .as_deref()
            .ok_or_else(|| AbelianError::InvalidDescriptor("window of a non-omega group".into()))?;
        let mut factors = Vec::with_capacity(copies * inner.rank());
        for _ in 0..copies {
            factors.extend(inner.factors.iter().cloned());
        }
        AbelianDescriptor::finite(factors)
    }

    pub fn zero(&self) -> AbelianElement {
        AbelianElement::default()
    }

    pub fn generator(&self, coord: Coord) -> Result<AbelianElement, AbelianError> {
        self.element([(coord, BigInt::one())])
    }

    /// Builds a reduced element from coordinate/value pairs (values at
    /// repeated coordinates are summed).
    pub fn element<I>(&self, pairs: I) -> Result<AbelianElement, AbelianError>
    where
        I: IntoIterator<Item = (Coord, BigInt)>,
    {
        let mut out = AbelianElement::default();
        for (c, v) in pairs {
            if self.factor(c).is_none() {
                return Err(AbelianError::DescriptorMismatch(format!(
                    "coordinate ({}, {}) does not exist in {}",
                    c.copy, c.inner, self
                )));
            }
            self.add_at(&mut out, c, &v);
        }
        Ok(out)
    }

    /// Element of a finitely generated group from its dense coordinates.
    pub fn from_vector(&self, v: &[BigInt]) -> Result<AbelianElement, AbelianError> {
        if self.is_omega() {
            return Err(AbelianError::InvalidDescriptor("dense vector for omega group".into()));
        }
        if v.len() != self.rank() {
            return Err(AbelianError::Dimension {
                expected: self.rank(),
                got: v.len(),
            });
        }
        self.element(v.iter().enumerate().map(|(i, x)| (Coord::fg(i), x.clone())))
    }

    /// Dense coordinates of `a`, restricted to the first `copies` summands
    /// for omega groups (`copies` is ignored otherwise).
    pub fn to_vector(&self, a: &AbelianElement, copies: usize) -> Vec<BigInt> {
        let rank = self.rank();
        let width = if self.is_omega() { copies * rank } else { rank };
        let mut v = vec![BigInt::zero(); width];
        for (c, x) in &a.coords {
            let idx = if self.is_omega() {
                if c.copy >= copies {
                    continue;
                }
                c.copy * rank + c.inner
            } else {
                c.inner
            };
            if idx < width {
                v[idx] = x.clone();
            }
        }
        v
    }

    /// Inverse of [`to_vector`](Self::to_vector) for the window.
    pub fn from_window_vector(&self, v: &[BigInt]) -> AbelianElement {
        let rank = self.rank().max(1);
        let mut out = AbelianElement::default();
        for (idx, x) in v.iter().enumerate() {
            let c = if self.is_omega() {
                Coord::new(idx / rank, idx % rank)
            } else {
                Coord::fg(idx)
            };
            self.add_at(&mut out, c, x);
        }
        out
    }

    /// Checks that every stored coordinate exists, is reduced and nonzero.
    pub fn check(&self, a: &AbelianElement) -> Result<(), AbelianError> {
        for (c, v) in &a.coords {
            let f = self.factor(*c).ok_or_else(|| {
                AbelianError::DescriptorMismatch(format!(
                    "coordinate ({}, {}) does not exist in {}",
                    c.copy, c.inner, self
                ))
            })?;
            if v.is_zero() || f.reduce(v.clone()) != *v {
                return Err(AbelianError::DescriptorMismatch(format!(
                    "coordinate ({}, {}) holds unreduced value {}",
                    c.copy, c.inner, v
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn add_at(&self, a: &mut AbelianElement, c: Coord, v: &BigInt) {
        if v.is_zero() {
            return;
        }
        let f = self.factor(c).expect("coordinate exists");
        let cur = a.coords.remove(&c).unwrap_or_default();
        let next = f.reduce(cur + v);
        if !next.is_zero() {
            a.coords.insert(c, next);
        }
    }

    /// `a + k·b`, no validation.
    pub(crate) fn add_scaled_into(&self, a: &mut AbelianElement, k: &BigInt, b: &AbelianElement) {
        if k.is_zero() {
            return;
        }
        for (c, v) in &b.coords {
            self.add_at(a, *c, &(k * v));
        }
    }

    pub fn add(&self, a: &AbelianElement, b: &AbelianElement) -> Result<AbelianElement, AbelianError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sum(a, b))
    }

    /// Unchecked group law.
    pub fn sum(&self, a: &AbelianElement, b: &AbelianElement) -> AbelianElement {
        let mut out = a.clone();
        self.add_scaled_into(&mut out, &BigInt::one(), b);
        out
    }

    pub fn neg(&self, a: &AbelianElement) -> AbelianElement {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn sub(&self, a: &AbelianElement, b: &AbelianElement) -> AbelianElement {
        let mut out = a.clone();
        self.add_scaled_into(&mut out, &BigInt::from(-1), b);
        out
    }

    pub fn scale(&self, a: &AbelianElement, k: &BigInt) -> AbelianElement {
        let mut out = AbelianElement::default();
        self.add_scaled_into(&mut out, k, a);
        out
    }

    /// Whether `a` lies in `m·B`: each coordinate is divisible by
    /// `gcd(m, modulus)`.
    pub fn in_multiple(&self, a: &AbelianElement, m: &BigInt) -> bool {
        a.coords.iter().all(|(c, v)| {
            let f = self.factor(*c).expect("coordinate exists");
            let g = m.gcd(&BigInt::from(f.modulus().clone()));
            if g.is_zero() {
                v.is_zero()
            } else {
                v.is_multiple_of(&g)
            }
        })
    }
}

impl fmt::Display for AbelianDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.omega_of {
            Some(inner) => write!(f, "omega({})", inner),
            None => {
                for (i, x) in self.factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", x)?;
                }
                Ok(())
            }
        }
    }
}

/// Finite-support element; every stored value is reduced and nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianElement {
    coords: BTreeMap<Coord, BigInt>,
}

impl AbelianElement {
    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn get(&self, c: Coord) -> BigInt {
        self.coords.get(&c).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Coord, &BigInt)> {
        self.coords.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Coord> {
        self.coords.keys()
    }
}

/// Index of a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(BigUint),
    Infinite,
}

impl Index {
    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{}", n),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

/// Subgroup of a finitely generated abelian group, given by generator rows
/// in ambient coordinates.
///
/// Torsion is handled by lifting to `Z^r`: the relation rows `n_i e_i` of
/// the ambient are stacked under the basis before reduction, so the cached
/// Hermite form describes the preimage lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupLattice {
    ambient: AbelianDescriptor,
    basis: Vec<Vec<BigInt>>,
    form: HermiteForm,
    index: Index,
}

/// Computes the Hermite normal form of `basis` inside `ambient`.
pub fn hnf_reduce(
    basis: Vec<Vec<BigInt>>,
    ambient: &AbelianDescriptor,
) -> Result<SubgroupLattice, AbelianError> {
    SubgroupLattice::new(basis, ambient.clone())
}

impl SubgroupLattice {
    pub fn new(basis: Vec<Vec<BigInt>>, ambient: AbelianDescriptor) -> Result<Self, AbelianError> {
        if ambient.is_omega() {
            return Err(AbelianError::InvalidDescriptor(
                "lattices live in finitely generated groups".into(),
            ));
        }
        let r = ambient.rank();
        for row in &basis {
            if row.len() != r {
                return Err(AbelianError::Dimension {
                    expected: r,
                    got: row.len(),
                });
            }
        }
        let mut stacked: Vec<Vec<BigInt>> = basis.clone();
        for (i, f) in ambient.factors().iter().enumerate() {
            if !f.is_infinite() {
                let mut row = vec![BigInt::zero(); r];
                row[i] = BigInt::from(f.modulus().clone());
                stacked.push(row);
            }
        }
        let form = hermite_form(&stacked, r);
        let index = if form.pivots.len() == r {
            Index::Finite(
                form.rows
                    .iter()
                    .zip(&form.pivots)
                    .map(|(row, &p)| row[p].magnitude().clone())
                    .product(),
            )
        } else {
            Index::Infinite
        };
        Ok(SubgroupLattice {
            ambient,
            basis,
            form,
            index,
        })
    }

    /// The whole ambient group.
    pub fn full(ambient: &AbelianDescriptor) -> Result<Self, AbelianError> {
        let r = ambient.rank();
        let basis = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        SubgroupLattice::new(basis, ambient.clone())
    }

    pub fn ambient(&self) -> &AbelianDescriptor {
        &self.ambient
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.form.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.form.pivots
    }

    pub fn index(&self) -> &Index {
        &self.index
    }

    /// Coefficients of the `k`-th Hermite row in terms of the user basis.
    pub fn hnf_row_in_basis(&self, k: usize) -> &[BigInt] {
        &self.form.transform[k][..self.basis.len()]
    }

    /// Integer relations among the user basis rows, as coefficient vectors.
    pub fn basis_relations(&self) -> Vec<Vec<BigInt>> {
        self.form
            .kernel
            .iter()
            .map(|row| row[..self.basis.len()].to_vec())
            .filter(|row| row.iter().any(|x| !x.is_zero()))
            .collect()
    }

    /// Coefficients of `v` with respect to the Hermite rows, or `None` if
    /// `v` is outside the subgroup.
    pub fn coefficients(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut v = v.to_vec();
        let mut q = Vec::with_capacity(self.form.rows.len());
        for (row, &p) in self.form.rows.iter().zip(&self.form.pivots) {
            let (k, rem) = v[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return None;
            }
            sub_row(&mut v, row, &k);
            q.push(k);
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(q)
        } else {
            None
        }
    }

    /// Coefficients of `v` with respect to the user basis.
    pub fn basis_coefficients(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let q = self.coefficients(v)?;
        let mut out = vec![BigInt::zero(); self.basis.len()];
        for (k, qk) in q.iter().enumerate() {
            if qk.is_zero() {
                continue;
            }
            for (j, t) in self.hnf_row_in_basis(k).iter().enumerate() {
                out[j] += qk * t;
            }
        }
        Some(out)
    }

    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        self.coefficients(v).is_some()
    }

    /// Canonical representative of the coset of `v`: every pivot entry is
    /// brought into `[0, pivot)`.
    pub fn coset_rep(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut v = v.to_vec();
        for (row, &p) in self.form.rows.iter().zip(&self.form.pivots) {
            let k = v[p].div_floor(&row[p]);
            sub_row(&mut v, row, &k);
        }
        v
    }

    fn diagonal(&self) -> Result<Vec<BigInt>, AbelianError> {
        if self.index == Index::Infinite {
            return Err(AbelianError::InfiniteIndex);
        }
        Ok(self
            .form
            .rows
            .iter()
            .zip(&self.form.pivots)
            .map(|(row, &p)| row[p].clone())
            .collect())
    }

    /// Coset representatives as dense vectors, lexicographic on the
    /// residues `0 <= c_k < d_k` of the Hermite diagonal.
    pub fn transversal_vectors(&self) -> Result<Vec<Vec<BigInt>>, AbelianError> {
        let d = self.diagonal()?;
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
        for dk in &d {
            let mut next = Vec::new();
            for prefix in &out {
                let mut c = BigInt::zero();
                while &c < dk {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    next.push(v);
                    c += 1;
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Deterministic transversal; the first element is the identity.
    pub fn transversal(&self) -> Result<Vec<AbelianElement>, AbelianError> {
        self.transversal_vectors()?
            .iter()
            .map(|v| self.ambient.from_vector(v))
            .collect()
    }

    /// Position of the coset of `v` in [`transversal`](Self::transversal).
    pub fn transversal_position(&self, v: &[BigInt]) -> Result<usize, AbelianError> {
        let d = self.diagonal()?;
        let rep = self.coset_rep(v);
        let mut pos = BigInt::zero();
        for (k, dk) in d.iter().enumerate() {
            pos = pos * dk + &rep[k];
        }
        Ok(usize::try_from(pos).expect("transversal position fits in usize"))
    }

    pub fn member(&self, a: &AbelianElement) -> bool {
        self.contains_vector(&self.ambient.to_vector(a, 0))
    }
}

fn sub_row(v: &mut [BigInt], row: &[BigInt], k: &BigInt) {
    if k.is_zero() {
        return;
    }
    for (x, r) in v.iter_mut().zip(row) {
        if !r.is_zero() {
            *x -= k * r;
        }
    }
}

/// Membership of `a` in the subgroup `l`.
pub fn member(l: &SubgroupLattice, a: &AbelianElement) -> bool {
    l.member(a)
}

/// Homomorphism from a subgroup of a finitely generated group into another
/// finitely generated group, determined by the images of the domain's
/// basis rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianHom {
    domain: SubgroupLattice,
    codomain: AbelianDescriptor,
    generator_images: Vec<AbelianElement>,
    images: Vec<AbelianElement>,
}

impl AbelianHom {
    pub fn new(
        domain: SubgroupLattice,
        codomain: AbelianDescriptor,
        generator_images: Vec<AbelianElement>,
    ) -> Result<Self, AbelianError> {
        if generator_images.len() != domain.basis().len() {
            return Err(AbelianError::Dimension {
                expected: domain.basis().len(),
                got: generator_images.len(),
            });
        }
        for img in &generator_images {
            codomain.check(img)?;
        }
        let combine = |coeffs: &[BigInt]| {
            let mut acc = codomain.zero();
            for (c, img) in coeffs.iter().zip(&generator_images) {
                codomain.add_scaled_into(&mut acc, c, img);
            }
            acc
        };
        for rel in domain.basis_relations() {
            if !combine(&rel).is_zero() {
                return Err(AbelianError::IllDefined(format_vector(&rel)));
            }
        }
        let images = (0..domain.hnf().len())
            .map(|k| combine(domain.hnf_row_in_basis(k)))
            .collect();
        Ok(AbelianHom {
            domain,
            codomain,
            generator_images,
            images,
        })
    }

    pub fn domain(&self) -> &SubgroupLattice {
        &self.domain
    }

    pub fn codomain(&self) -> &AbelianDescriptor {
        &self.codomain
    }

    /// Images of the Hermite rows of the domain.
    pub fn images(&self) -> &[AbelianElement] {
        &self.images
    }

    pub fn generator_images(&self) -> &[AbelianElement] {
        &self.generator_images
    }

    pub fn apply(&self, a: &AbelianElement) -> Result<AbelianElement, AbelianError> {
        let v = self.domain.ambient().to_vector(a, 0);
        self.apply_vector(&v)
            .ok_or_else(|| AbelianError::OutsideDomain(format_vector(&v)))
    }

    pub fn apply_vector(&self, v: &[BigInt]) -> Option<AbelianElement> {
        let q = self.domain.coefficients(v)?;
        let mut acc = self.codomain.zero();
        for (k, img) in q.iter().zip(&self.images) {
            self.codomain.add_scaled_into(&mut acc, k, img);
        }
        Some(acc)
    }
}

/// Applies `h` to `a`.
pub fn apply_hom(h: &AbelianHom, a: &AbelianElement) -> Result<AbelianElement, AbelianError> {
    h.apply(a)
}

pub(crate) fn format_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter().map(|row| row.iter().map(|&x| bi(x)).collect()).collect()
    }

    #[test]
    fn add_identity_and_mod_two() {
        let z = AbelianDescriptor::free(1);
        let a = z.from_vector(&[bi(5)]).unwrap();
        assert_eq!(z.add(&a, &z.zero()).unwrap(), a);

        let v4 = AbelianDescriptor::finite(vec![CyclicFactor::new(2u32), CyclicFactor::new(2u32)]).unwrap();
        let x = v4.from_vector(&[bi(1), bi(1)]).unwrap();
        let y = v4.from_vector(&[bi(1), bi(0)]).unwrap();
        assert_eq!(v4.add(&x, &y).unwrap(), v4.from_vector(&[bi(0), bi(1)]).unwrap());
    }

    #[test]
    fn add_does_not_overflow() {
        let z = AbelianDescriptor::free(1);
        let big: BigInt = BigInt::from(1u8) << 64;
        let a = z.from_vector(std::slice::from_ref(&big)).unwrap();
        let s = z.add(&a, &a).unwrap();
        assert_eq!(s.get(Coord::fg(0)), BigInt::from(1u8) << 65);
    }

    #[test]
    fn add_rejects_foreign_coordinates() {
        let z = AbelianDescriptor::free(1);
        let z2 = AbelianDescriptor::free(2);
        let a = z2.from_vector(&[bi(0), bi(1)]).unwrap();
        assert!(matches!(z.add(&a, &z.zero()), Err(AbelianError::DescriptorMismatch(_))));
    }

    #[test]
    fn hnf_indices() {
        let z = AbelianDescriptor::free(1);
        assert_eq!(hnf_reduce(rows(&[&[2]]), &z).unwrap().index(), &Index::Finite(2u32.into()));
        assert_eq!(hnf_reduce(vec![], &z).unwrap().index(), &Index::Infinite);
        let z2 = AbelianDescriptor::free(2);
        assert_eq!(
            hnf_reduce(rows(&[&[2, 0], &[0, 3]]), &z2).unwrap().index(),
            &Index::Finite(6u32.into())
        );
    }

    #[test]
    fn empty_basis_in_trivial_ambient_has_index_one() {
        let t = AbelianDescriptor::trivial();
        assert_eq!(hnf_reduce(vec![], &t).unwrap().index(), &Index::Finite(1u32.into()));
    }

    #[test]
    fn torsion_columns_are_reduced_by_relations() {
        let c6 = AbelianDescriptor::cyclic(6);
        let l = hnf_reduce(rows(&[&[4]]), &c6).unwrap();
        // <4> = <2> in Z/6
        assert_eq!(l.index(), &Index::Finite(2u32.into()));
        assert!(l.member(&c6.from_vector(&[bi(2)]).unwrap()));
        assert!(!l.member(&c6.from_vector(&[bi(3)]).unwrap()));
    }

    #[test]
    fn membership() {
        let z = AbelianDescriptor::free(1);
        let two_z = hnf_reduce(rows(&[&[2]]), &z).unwrap();
        assert!(member(&two_z, &z.from_vector(&[bi(4)]).unwrap()));
        assert!(!member(&two_z, &z.from_vector(&[bi(3)]).unwrap()));
        let z2 = AbelianDescriptor::free(2);
        let l = hnf_reduce(rows(&[&[2, 0], &[0, 3]]), &z2).unwrap();
        assert!(!l.member(&z2.from_vector(&[bi(1), bi(1)]).unwrap()));
        assert!(l.member(&z2.from_vector(&[bi(-4), bi(9)]).unwrap()));
    }

    #[test]
    fn transversals() {
        let z = AbelianDescriptor::free(1);
        let two_z = hnf_reduce(rows(&[&[2]]), &z).unwrap();
        let t = two_z.transversal().unwrap();
        assert_eq!(t, vec![z.zero(), z.from_vector(&[bi(1)]).unwrap()]);

        let z2 = AbelianDescriptor::free(2);
        let l = hnf_reduce(rows(&[&[2, 0], &[0, 3]]), &z2).unwrap();
        let t = l.transversal_vectors().unwrap();
        let mut expected = Vec::new();
        for a in 0..2 {
            for b in 0..3 {
                expected.push(vec![bi(a), bi(b)]);
            }
        }
        assert_eq!(t, expected);

        let full = SubgroupLattice::full(&z2).unwrap();
        assert_eq!(full.transversal().unwrap(), vec![z2.zero()]);
        assert_eq!(
            hnf_reduce(vec![], &z).unwrap().transversal(),
            Err(AbelianError::InfiniteIndex)
        );
    }

    #[test]
    fn transversal_position_matches_listing() {
        let z2 = AbelianDescriptor::free(2);
        let l = hnf_reduce(rows(&[&[2, 1], &[0, 3]]), &z2).unwrap();
        for (i, v) in l.transversal_vectors().unwrap().iter().enumerate() {
            assert_eq!(l.transversal_position(v).unwrap(), i);
            let shifted: Vec<BigInt> = v.iter().zip([bi(6), bi(-9)]).map(|(a, b)| a + b).collect();
            assert_eq!(l.transversal_position(&shifted).unwrap(), i);
        }
    }

    #[test]
    fn halving_hom() {
        let z = AbelianDescriptor::free(1);
        let two_z = hnf_reduce(rows(&[&[2]]), &z).unwrap();
        let half = AbelianHom::new(two_z, z.clone(), vec![z.from_vector(&[bi(1)]).unwrap()]).unwrap();
        assert_eq!(apply_hom(&half, &z.from_vector(&[bi(6)]).unwrap()).unwrap(), z.from_vector(&[bi(3)]).unwrap());
        assert_eq!(apply_hom(&half, &z.zero()).unwrap(), z.zero());
        assert!(matches!(
            apply_hom(&half, &z.from_vector(&[bi(3)]).unwrap()),
            Err(AbelianError::OutsideDomain(_))
        ));
    }

    #[test]
    fn ill_defined_hom_is_rejected() {
        let c2 = AbelianDescriptor::cyclic(2);
        let z = AbelianDescriptor::free(1);
        let full = SubgroupLattice::full(&c2).unwrap();
        let err = AbelianHom::new(full, z.clone(), vec![z.from_vector(&[bi(1)]).unwrap()]);
        assert!(matches!(err, Err(AbelianError::IllDefined(_))));
    }

    #[test]
    fn dependent_generators_must_agree() {
        let z = AbelianDescriptor::free(1);
        let l = hnf_reduce(rows(&[&[2], &[4]]), &z).unwrap();
        let ok = AbelianHom::new(
            l.clone(),
            z.clone(),
            vec![z.from_vector(&[bi(1)]).unwrap(), z.from_vector(&[bi(2)]).unwrap()],
        );
        assert!(ok.is_ok());
        let bad = AbelianHom::new(
            l,
            z.clone(),
            vec![z.from_vector(&[bi(1)]).unwrap(), z.from_vector(&[bi(3)]).unwrap()],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn exponent_and_multiples() {
        let b = AbelianDescriptor::finite(vec![CyclicFactor::new(2u32), CyclicFactor::new(3u32)]).unwrap();
        assert_eq!(b.exponent(), Some(6u32.into()));
        assert!(b.multiple_is_trivial(&bi(6)));
        assert!(!b.multiple_is_trivial(&bi(2)));
        assert_eq!(AbelianDescriptor::free(1).exponent(), None);
        let z = AbelianDescriptor::free(1);
        assert!(z.in_multiple(&z.from_vector(&[bi(4)]).unwrap(), &bi(2)));
        assert!(!z.in_multiple(&z.from_vector(&[bi(3)]).unwrap(), &bi(2)));
        let c2 = AbelianDescriptor::cyclic(2);
        assert!(!c2.in_multiple(&c2.from_vector(&[bi(1)]).unwrap(), &bi(2)));
        assert!(c2.in_multiple(&c2.zero(), &bi(2)));
    }

    #[test]
    fn omega_windows() {
        let w = AbelianDescriptor::omega(AbelianDescriptor::free(1)).unwrap();
        let a = w
            .element([(Coord::new(0, 0), bi(2)), (Coord::new(1, 0), bi(5)), (Coord::new(2, 0), bi(7))])
            .unwrap();
        assert_eq!(w.to_vector(&a, 2), vec![bi(2), bi(5)]);
        assert_eq!(w.window(2).unwrap(), AbelianDescriptor::free(2));
        assert!(w.generator(Coord::new(40, 0)).is_ok());
        assert!(w.generator(Coord::new(0, 1)).is_err());
        assert!(AbelianDescriptor::omega(w).is_err());
    }

    #[test]
    fn descriptor_validation() {
        assert!(AbelianDescriptor::finite(vec![]).is_err());
        assert!(AbelianDescriptor::trivial().is_trivial());
    }
}
