//! Elements and group law of `G = B wr X = (sum_{x in X} B^x) ⋊ X` for an
//! abelian base `B` and a finitely generated abelian top group `X`.
//!
//! Convention: `(α, x)(β, y) = (α + β↶x, x + y)` with `(β↶x)(z) = β(z − x)`,
//! so shifting by `x` translates the support by `+x`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::abelian::{AbelianDescriptor, AbelianElement, AbelianError, Coord, CyclicFactor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WreathError {
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("invalid top group: {0}")]
    InvalidTop(String),
}

/// `Z^free_rank ⊕ Z/n_1 ⊕ ... ⊕ Z/n_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XDescriptor {
    free_rank: usize,
    torsion: Vec<BigUint>,
}

impl XDescriptor {
    pub fn new(free_rank: usize, torsion: Vec<BigUint>) -> Result<Self, WreathError> {
        if free_rank == 0 && torsion.is_empty() {
            return Err(WreathError::InvalidTop("top group has no coordinates".into()));
        }
        if torsion.iter().any(|n| n <= &BigUint::one()) {
            return Err(WreathError::InvalidTop("torsion moduli must exceed 1".into()));
        }
        Ok(XDescriptor { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        XDescriptor::new(rank, Vec::new()).expect("positive rank")
    }

    pub fn cyclic(order: u64) -> Self {
        XDescriptor::new(0, vec![BigUint::from(order)]).expect("order > 1")
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// The same group as an [`AbelianDescriptor`] (free factors first).
    pub fn as_abelian(&self) -> AbelianDescriptor {
        let mut factors = vec![CyclicFactor::integers(); self.free_rank];
        factors.extend(self.torsion.iter().map(|n| CyclicFactor::new(n.clone())));
        AbelianDescriptor::finite(factors).expect("nonempty")
    }

    /// Converts an abelian descriptor without `Z/1` factors; free factors
    /// must come first.
    pub fn from_abelian(d: &AbelianDescriptor) -> Result<Self, WreathError> {
        if d.is_omega() {
            return Err(WreathError::InvalidTop("top group must be finitely generated".into()));
        }
        let mut free_rank = 0;
        let mut torsion = Vec::new();
        for f in d.factors() {
            if f.is_infinite() {
                if !torsion.is_empty() {
                    return Err(WreathError::InvalidTop("free factors must precede torsion".into()));
                }
                free_rank += 1;
            } else {
                torsion.push(f.modulus().clone());
            }
        }
        XDescriptor::new(free_rank, torsion)
    }

    fn reduce_at(&self, i: usize, v: BigInt) -> BigInt {
        if i < self.free_rank {
            v
        } else {
            v.mod_floor(&BigInt::from(self.torsion[i - self.free_rank].clone()))
        }
    }

    pub fn identity(&self) -> XElement {
        XElement {
            coords: vec![BigInt::zero(); self.dim()],
        }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> Result<XElement, WreathError> {
        if coords.len() != self.dim() {
            return Err(WreathError::DescriptorMismatch(format!(
                "top element has {} coordinates, expected {}",
                coords.len(),
                self.dim()
            )));
        }
        Ok(XElement {
            coords: coords
                .into_iter()
                .enumerate()
                .map(|(i, v)| self.reduce_at(i, v))
                .collect(),
        })
    }

    pub fn from_ints(&self, coords: &[i64]) -> Result<XElement, WreathError> {
        self.element(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn basis(&self) -> Vec<XElement> {
        (0..self.dim())
            .map(|i| {
                let mut e = self.identity();
                e.coords[i] = self.reduce_at(i, BigInt::one());
                e
            })
            .collect()
    }

    pub fn check(&self, x: &XElement) -> Result<(), WreathError> {
        if x.coords.len() != self.dim() {
            return Err(WreathError::DescriptorMismatch(format!(
                "top element has {} coordinates, expected {}",
                x.coords.len(),
                self.dim()
            )));
        }
        for (i, v) in x.coords.iter().enumerate() {
            if self.reduce_at(i, v.clone()) != *v {
                return Err(WreathError::DescriptorMismatch(format!(
                    "top coordinate {} holds unreduced value {}",
                    i, v
                )));
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &XElement, b: &XElement) -> XElement {
        XElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .enumerate()
                .map(|(i, (x, y))| self.reduce_at(i, x + y))
                .collect(),
        }
    }

    pub fn neg(&self, a: &XElement) -> XElement {
        self.scale(a, &BigInt::from(-1))
    }

    pub fn sub(&self, a: &XElement, b: &XElement) -> XElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &XElement, k: &BigInt) -> XElement {
        XElement {
            coords: a
                .coords
                .iter()
                .enumerate()
                .map(|(i, x)| self.reduce_at(i, x * k))
                .collect(),
        }
    }
}

impl fmt::Display for XDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_abelian())
    }
}

/// Element of `X`: free coordinates followed by reduced torsion residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XElement {
    coords: Vec<BigInt>,
}

impl XElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// Finite-support map `X -> B`; identity values are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseMap {
    entries: BTreeMap<XElement, AbelianElement>,
}

impl BaseMap {
    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, x: &XElement) -> Option<&AbelianElement> {
        self.entries.get(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&XElement, &AbelianElement)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &XElement> {
        self.entries.keys()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }
}

/// `(base, top)` with `base ∈ A = sum_x B^x` and `top ∈ X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElement {
    pub base: BaseMap,
    pub top: XElement,
}

impl WreathElement {
    pub fn is_identity(&self) -> bool {
        self.base.is_identity() && self.top.is_identity()
    }
}

/// `B wr X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    base_group: AbelianDescriptor,
    top_group: XDescriptor,
}

impl GroupDescriptor {
    pub fn new(base_group: AbelianDescriptor, top_group: XDescriptor) -> Self {
        GroupDescriptor {
            base_group,
            top_group,
        }
    }

    pub fn base_group(&self) -> &AbelianDescriptor {
        &self.base_group
    }

    pub fn top_group(&self) -> &XDescriptor {
        &self.top_group
    }

    pub fn identity(&self) -> WreathElement {
        WreathElement {
            base: BaseMap::default(),
            top: self.top_group.identity(),
        }
    }

    pub fn top_element(&self, x: XElement) -> WreathElement {
        WreathElement {
            base: BaseMap::default(),
            top: x,
        }
    }

    pub fn base_element(&self, base: BaseMap) -> WreathElement {
        WreathElement {
            base,
            top: self.top_group.identity(),
        }
    }

    /// `b` placed at position `x`, trivial top.
    pub fn base_at(&self, b: &AbelianElement, x: &XElement) -> BaseMap {
        let mut m = BaseMap::default();
        self.base_add_at(&mut m, x, &BigInt::one(), b);
        m
    }

    /// Builds a base map from position/value pairs, validating both.
    pub fn base_map<I>(&self, pairs: I) -> Result<BaseMap, WreathError>
    where
        I: IntoIterator<Item = (XElement, AbelianElement)>,
    {
        let mut m = BaseMap::default();
        for (x, b) in pairs {
            self.top_group.check(&x)?;
            self.base_group.check(&b)?;
            self.base_add_at(&mut m, &x, &BigInt::one(), &b);
        }
        Ok(m)
    }

    pub fn check(&self, g: &WreathElement) -> Result<(), WreathError> {
        self.top_group.check(&g.top)?;
        for (x, b) in g.base.iter() {
            self.top_group.check(x)?;
            self.base_group.check(b)?;
            if b.is_zero() {
                return Err(WreathError::DescriptorMismatch("identity entry stored in base".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn base_add_at(&self, m: &mut BaseMap, x: &XElement, k: &BigInt, b: &AbelianElement) {
        if k.is_zero() || b.is_zero() {
            return;
        }
        let entry = m.entries.remove(x).unwrap_or_default();
        let mut next = entry;
        self.base_group.add_scaled_into(&mut next, k, b);
        if !next.is_zero() {
            m.entries.insert(x.clone(), next);
        }
    }

    /// `a += k·b`.
    pub fn base_add_scaled(&self, a: &mut BaseMap, k: &BigInt, b: &BaseMap) {
        for (x, v) in b.iter() {
            self.base_add_at(a, x, k, v);
        }
    }

    pub fn base_sum(&self, a: &BaseMap, b: &BaseMap) -> BaseMap {
        let mut out = a.clone();
        self.base_add_scaled(&mut out, &BigInt::one(), b);
        out
    }

    pub fn base_sub(&self, a: &BaseMap, b: &BaseMap) -> BaseMap {
        let mut out = a.clone();
        self.base_add_scaled(&mut out, &BigInt::from(-1), b);
        out
    }

    pub fn base_scale(&self, a: &BaseMap, k: &BigInt) -> BaseMap {
        let mut out = BaseMap::default();
        self.base_add_scaled(&mut out, k, a);
        out
    }

    /// `β↶x`: the support moves by `+x`.
    pub fn shift(&self, b: &BaseMap, x: &XElement) -> BaseMap {
        if x.is_identity() {
            return b.clone();
        }
        let mut out = BaseMap::default();
        for (z, v) in b.iter() {
            let key = self.top_group.add(z, x);
            self.base_add_at(&mut out, &key, &BigInt::one(), v);
        }
        out
    }

    /// Unchecked group law.
    pub fn mul(&self, g: &WreathElement, h: &WreathElement) -> WreathElement {
        let mut base = g.base.clone();
        let shifted = self.shift(&h.base, &g.top);
        self.base_add_scaled(&mut base, &BigInt::one(), &shifted);
        WreathElement {
            base,
            top: self.top_group.add(&g.top, &h.top),
        }
    }

    pub fn multiply(&self, g: &WreathElement, h: &WreathElement) -> Result<WreathElement, WreathError> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inverse(&self, g: &WreathElement) -> WreathElement {
        let top = self.top_group.neg(&g.top);
        let base = self.base_scale(&self.shift(&g.base, &top), &BigInt::from(-1));
        WreathElement { base, top }
    }

    /// `by · g · by⁻¹`.
    pub fn conjugate(&self, g: &WreathElement, by: &WreathElement) -> WreathElement {
        self.mul(&self.mul(by, g), &self.inverse(by))
    }

    /// Square-and-multiply; negative exponents go through the inverse.
    pub fn power(&self, g: &WreathElement, n: &BigInt) -> WreathElement {
        let mut base = if n.is_negative() {
            self.inverse(g)
        } else {
            g.clone()
        };
        let mut e = n.magnitude().clone();
        let mut acc = self.identity();
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if !e.is_zero() {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Membership in `A^m = sum_x (m·B)^x`: trivial top and every base entry
    /// in `m·B`.
    pub fn normal_closure_power_member(&self, g: &WreathElement, m: &BigInt) -> bool {
        g.top.is_identity() && g.base.iter().all(|(_, b)| self.base_group.in_multiple(b, m))
    }

    /// Generator of `B` at coordinate `c`, placed at position `x`.
    pub fn delta(&self, c: Coord, x: &XElement) -> Result<WreathElement, WreathError> {
        let b = self.base_group.generator(c)?;
        Ok(self.base_element(self.base_at(&b, x)))
    }
}

/// Free function form of [`GroupDescriptor::multiply`].
pub fn multiply(
    d: &GroupDescriptor,
    g: &WreathElement,
    h: &WreathElement,
) -> Result<WreathElement, WreathError> {
    d.multiply(g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lamplighter() -> GroupDescriptor {
        GroupDescriptor::new(AbelianDescriptor::cyclic(2), XDescriptor::free(1))
    }

    fn zwrz() -> GroupDescriptor {
        GroupDescriptor::new(AbelianDescriptor::free(1), XDescriptor::free(1))
    }

    fn x(d: &GroupDescriptor, v: i64) -> XElement {
        d.top_group().from_ints(&[v]).unwrap()
    }

    fn delta(d: &GroupDescriptor, at: i64) -> BaseMap {
        d.base_at(&d.base_group().generator(Coord::fg(0)).unwrap(), &x(d, at))
    }

    #[test]
    fn identity_is_neutral() {
        let d = lamplighter();
        let g = WreathElement {
            base: delta(&d, 3),
            top: x(&d, -2),
        };
        assert_eq!(d.multiply(&d.identity(), &g).unwrap(), g);
    }

    #[test]
    fn lamplighter_product_shifts_second_factor() {
        let d = lamplighter();
        let g = WreathElement {
            base: delta(&d, 0),
            top: x(&d, 1),
        };
        let h = WreathElement {
            base: delta(&d, 0),
            top: x(&d, -1),
        };
        let expected = WreathElement {
            base: d.base_sum(&delta(&d, 0), &delta(&d, 1)),
            top: x(&d, 0),
        };
        assert_eq!(d.mul(&g, &h), expected);
    }

    #[test]
    fn inverses() {
        let d = lamplighter();
        assert_eq!(d.inverse(&d.identity()), d.identity());
        let g = WreathElement {
            base: delta(&d, 0),
            top: x(&d, 1),
        };
        let inv = d.inverse(&g);
        assert_eq!(inv.base, delta(&d, -1));
        assert_eq!(inv.top, x(&d, -1));
        assert!(d.mul(&g, &inv).is_identity());
        assert!(d.mul(&inv, &g).is_identity());
        let t = d.top_element(x(&d, 4));
        assert_eq!(d.inverse(&t), d.top_element(x(&d, -4)));
    }

    #[test]
    fn conjugation_by_top_shifts() {
        let d = zwrz();
        let b = d.base_element(delta(&d, 0));
        let t = d.top_element(x(&d, 3));
        assert_eq!(d.conjugate(&b, &t), d.base_element(delta(&d, 3)));
    }

    #[test]
    fn powers() {
        let d = zwrz();
        let b = d.base_element(delta(&d, 0));
        assert_eq!(
            d.power(&b, &BigInt::from(5)),
            d.base_element(d.base_scale(&delta(&d, 0), &BigInt::from(5)))
        );
        let g = WreathElement {
            base: delta(&d, 0),
            top: x(&d, 1),
        };
        let sq = d.power(&g, &BigInt::from(2));
        assert_eq!(sq, d.mul(&g, &g));
        assert_eq!(
            sq,
            WreathElement {
                base: d.base_sum(&delta(&d, 0), &delta(&d, 1)),
                top: x(&d, 2),
            }
        );
        assert_eq!(d.power(&g, &BigInt::from(-3)), d.inverse(&d.power(&g, &BigInt::from(3))));
        assert_eq!(d.power(&g, &BigInt::zero()), d.identity());
    }

    #[test]
    fn normal_closure_power_membership() {
        let d = zwrz();
        let b2 = d.base_element(d.base_scale(&delta(&d, 0), &BigInt::from(2)));
        assert!(d.normal_closure_power_member(&b2, &BigInt::from(2)));
        let b = d.base_element(delta(&d, 0));
        assert!(!d.normal_closure_power_member(&b, &BigInt::from(2)));

        let l = lamplighter();
        let lb = l.base_element(delta(&l, 0));
        assert!(!l.normal_closure_power_member(&lb, &BigInt::from(2)));
        assert!(l.normal_closure_power_member(&l.identity(), &BigInt::from(2)));
    }

    #[test]
    fn multiply_rejects_mismatched_elements() {
        let d = zwrz();
        let other = GroupDescriptor::new(AbelianDescriptor::free(1), XDescriptor::free(2));
        let g = other.top_element(other.top_group().from_ints(&[1, 1]).unwrap());
        assert!(d.multiply(&g, &d.identity()).is_err());
    }

    #[test]
    fn torsion_top_reduces() {
        let c2 = XDescriptor::cyclic(2);
        let s = c2.from_ints(&[1]).unwrap();
        assert!(c2.add(&s, &s).is_identity());
        assert_eq!(c2.from_ints(&[3]).unwrap(), s);
    }
}
