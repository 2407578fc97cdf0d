use std::fmt;
use std::ops::{Index, IndexMut};

use smallvec::SmallVec;

/// Exponent vector of a monomial in `2n` variables, ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, len))
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut m = Self::zero(len);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(exps: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(exps))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` unless `other <= self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, factor: u32) -> Self {
        MultiIndex(self.0.iter().map(|e| e * factor).collect())
    }

    /// Exponents divided by `d`, if all are divisible.
    pub fn div_exact(&self, d: u32) -> Option<Self> {
        if self.0.iter().all(|e| e % d == 0) {
            Some(MultiIndex(self.0.iter().map(|e| e / d).collect()))
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &u32> {
        self.0.iter()
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl IndexMut<usize> for MultiIndex {
    fn index_mut(&mut self, i: usize) -> &mut u32 {
        &mut self.0[i]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// All exponent vectors of length `len` with every entry `< bound`, in
/// lexicographic order.
pub fn boxed_indices(len: usize, bound: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = MultiIndex::zero(len);
    if bound == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < bound {
                break;
            }
            cur[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxed_enumeration() {
        let all = boxed_indices(2, 3);
        assert_eq!(all.len(), 9);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(boxed_indices(0, 3).len(), 1);
    }

    #[test]
    fn arithmetic() {
        let a = MultiIndex::from_slice(&[1, 2]);
        let b = MultiIndex::from_slice(&[0, 1]);
        assert_eq!(a.add(&b), MultiIndex::from_slice(&[1, 3]));
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::from_slice(&[1, 1])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.scale(3).div_exact(3), Some(a.clone()));
        assert_eq!(a.div_exact(2), None);
    }
}
