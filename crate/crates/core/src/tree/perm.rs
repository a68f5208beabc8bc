use std::fmt;

use super::TreeError;

/// Bijection of the letters `1..=m`, stored zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (0..m).collect(),
        }
    }

    /// From one-based images: `images[i-1]` is the image of letter `i`.
    pub fn new(images: &[usize]) -> Result<Self, TreeError> {
        let m = images.len();
        let mut seen = vec![false; m];
        let mut zero = Vec::with_capacity(m);
        for &x in images {
            if x == 0 || x > m || seen[x - 1] {
                return Err(TreeError::NotAPermutation(format!("{:?}", images)));
            }
            seen[x - 1] = true;
            zero.push(x - 1);
        }
        Ok(Permutation { images: zero })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &x)| i == x)
        });
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a one-based letter.
    pub fn apply(&self, letter: usize) -> usize {
        self.images[letter - 1] + 1
    }

    pub(crate) fn image0(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// Nontrivial cycles, each starting at its smallest letter (one-based).
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }
}

/// Cycle notation, `e` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation() {
        assert_eq!(Permutation::identity(3).to_string(), "e");
        assert_eq!(Permutation::new(&[2, 1]).unwrap().to_string(), "(1 2)");
        assert_eq!(Permutation::new(&[2, 3, 1, 4]).unwrap().to_string(), "(1 2 3)");
        assert_eq!(Permutation::new(&[2, 1, 4, 3]).unwrap().to_string(), "(1 2)(3 4)");
        assert!(Permutation::new(&[1, 1]).is_err());
        assert!(Permutation::new(&[0, 1]).is_err());
    }

    #[test]
    fn then_applies_left_first() {
        let a = Permutation::new(&[2, 3, 1]).unwrap();
        let b = Permutation::new(&[1, 3, 2]).unwrap();
        let ab = a.then(&b);
        for i in 1..=3 {
            assert_eq!(ab.apply(i), b.apply(a.apply(i)));
        }
        assert!(a.then(&a.inverse()).is_identity());
    }
}
