//! Fixed-width point sets.
//!
//! Every carrier handled by the workbench has at most [`MAX_POINTS`] points, so
//! a subset fits in a single `u128`.

use std::fmt;

/// Largest carrier a [`PointSet`] can index.
pub const MAX_POINTS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u128);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> PointSet {
        debug_assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u128::MAX)
        } else {
            PointSet((1u128 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> PointSet {
        PointSet(1u128 << i)
    }

    pub fn from_bits(bits: u128) -> PointSet {
        PointSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_POINTS && (self.0 >> i) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u128 << i);
    }

    pub fn with(self, i: usize) -> PointSet {
        PointSet(self.0 | (1u128 << i))
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn inter(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn minus(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    /// Complement relative to a carrier of `n` points.
    pub fn complement(self, n: usize) -> PointSet {
        PointSet(!self.0 & PointSet::full(n).0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: PointSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Members as a sorted vector of indices.
    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of a carrier of `n` points, in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = PointSet> {
        assert!(n < 64, "subset enumeration over {n} points");
        (0u64..(1u64 << n)).map(|b| PointSet(b as u128))
    }
}

pub struct Iter(u128);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = PointSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Lexicographic comparison on sorted member lists.
pub fn lex_cmp(a: PointSet, b: PointSet) -> std::cmp::Ordering {
    a.to_vec().cmp(&b.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: PointSet = [0, 2, 5].into_iter().collect();
        let b: PointSet = [2, 3].into_iter().collect();
        assert_eq!(a.inter(b).to_vec(), vec![2]);
        assert_eq!(a.union(b).to_vec(), vec![0, 2, 3, 5]);
        assert_eq!(a.minus(b).to_vec(), vec![0, 5]);
        assert_eq!(b.complement(4).to_vec(), vec![0, 1]);
        assert!(PointSet::singleton(2).is_subset(a));
        assert_eq!(PointSet::full(128).len(), 128);
        assert_eq!(PointSet::all_subsets(3).count(), 8);
    }

    #[test]
    fn lex_order() {
        let a: PointSet = [0, 3].into_iter().collect();
        let b: PointSet = [1].into_iter().collect();
        assert_eq!(lex_cmp(a, b), std::cmp::Ordering::Less);
        assert_eq!(lex_cmp(PointSet::EMPTY, a), std::cmp::Ordering::Less);
    }
}
