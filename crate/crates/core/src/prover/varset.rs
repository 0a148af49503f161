use core::fmt;
use core::ops::{BitAnd, BitOr, BitOrAssign, Sub};

/// A set of ground random variables, as a bitmask over their indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(pub u128);

pub const MAX_GROUND_VARS: usize = 128;

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    #[inline]
    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_GROUND_VARS);
        VarSet(1u128 << i)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_GROUND_VARS && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, |acc, i| acc | VarSet::singleton(i))
    }
}

impl BitOr for VarSet {
    type Output = VarSet;
    #[inline]
    fn bitor(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 | rhs.0)
    }
}

impl BitOrAssign for VarSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: VarSet) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for VarSet {
    type Output = VarSet;
    #[inline]
    fn bitand(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 & rhs.0)
    }
}

impl Sub for VarSet {
    type Output = VarSet;
    #[inline]
    fn sub(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
