//! Prime-field arithmetic over GF(q).
//!
//! Elements are plain `u32` residues wrapped in [`Fe`]; every operation goes
//! through a [`Field`] that carries the modulus. The default field is
//! GF(257), which embeds bytes directly.

use crate::error::{Error, Result};
use core::fmt;

pub const DEFAULT_MODULUS: u32 = 257;

/// A field element, always reduced into `[0, q)` by the owning [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field GF(q) for a prime `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u32,
}

impl Default for Field {
    fn default() -> Self {
        Field { q: DEFAULT_MODULUS }
    }
}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut f = 3u64;
    while f * f <= q as u64 {
        if (q as u64).is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe((v % self.q as u64) as u32)
    }

    /// Checked constructor: `v` must already be a residue.
    pub fn try_elem(&self, v: u32) -> Result<Fe> {
        if v < self.q {
            Ok(Fe(v))
        } else {
            Err(Error::InvalidParams(alloc::format!(
                "symbol {v} out of range for GF({})",
                self.q
            )))
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a.0 as u64 + b.0 as u64;
        Fe((s % self.q as u64) as u32)
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            a
        } else {
            Fe(self.q - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(((a.0 as u64 * b.0 as u64) % self.q as u64) as u32)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero(self.q));
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Inner product of two equal-length slices.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        debug_assert_eq!(a.len(), b.len());
        let q = self.q as u64;
        let mut acc = 0u64;
        for (x, y) in a.iter().zip(b) {
            acc = (acc + x.0 as u64 * y.0 as u64) % q;
        }
        Fe(acc as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_in_gf257() {
        let f = Field::default();
        assert_eq!(f.add(Fe(200), Fe(100)), Fe(43));
        assert_eq!(f.inv(Fe(2)).unwrap(), Fe(129));
        for x in 0..257 {
            assert_eq!(f.mul(Fe::ONE, Fe(x)), Fe(x));
        }
        assert_eq!(f.inv(Fe::ZERO), Err(Error::DivisionByZero(257)));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::new(256), Err(Error::NotPrime(256)));
        assert_eq!(Field::new(1), Err(Error::NotPrime(1)));
        assert!(Field::new(65537).is_ok());
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for q in [2u32, 3, 5, 7, 13] {
            let f = Field::new(q).unwrap();
            for a in 0..q {
                let a = Fe(a);
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                }
                for b in 0..q {
                    let b = Fe(b);
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        let c = Fe(c);
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn every_nonzero_element_of_gf257_is_invertible() {
        let f = Field::default();
        for a in 1..257 {
            let inv = f.inv(Fe(a)).unwrap();
            assert_eq!(f.mul(Fe(a), inv), Fe::ONE);
            assert_eq!(f.inv(inv).unwrap(), Fe(a));
        }
        for a in 0..257 {
            for b in 0..257 {
                let s = f.add(Fe(a), Fe(b));
                assert_eq!(s.0, (a + b) % 257);
                assert_eq!(f.sub(s, Fe(b)), Fe(a));
            }
        }
    }
}
