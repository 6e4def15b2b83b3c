//! Word-sized prime fields.
//!
//! Every element is stored as a canonical residue `0 <= e < p`. The modulus is
//! restricted to primes below `2^32` so that a product of two residues fits in a
//! `u64`; reductions use a precomputed Barrett constant instead of a hardware
//! division, which matters in the elimination kernels.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The Mersenne prime `2^31 - 1`.
pub const DEFAULT_MODULUS: u64 = 2_147_483_647;

/// A prime field `GF(p)` with `p < 2^32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    modulus: u64,
    // floor(2^64 / modulus)
    barrett: u64,
}

impl FieldSpec {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus < 2 || modulus >= 1 << 32 || !is_prime(modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        let barrett = ((1u128 << 64) / modulus as u128) as u64;
        Ok(Self { modulus, barrett })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduces any `u64` to its canonical residue.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let r = x - q * self.modulus;
        if r >= self.modulus {
            r - self.modulus
        } else {
            r
        }
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        let p = self.modulus as i64;
        x.rem_euclid(p) as u64
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    /// `a + b * c`
    #[inline(always)]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        self.reduce(a + b * c)
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    ///
    /// Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.modulus != 0, "inverse of zero in GF({})", self.modulus);
        let (mut old_r, mut r) = (a as i64, self.modulus as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        self.from_i64(old_s)
    }

    /// Uniform residue.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.modulus)
    }

    /// Uniform nonzero residue.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.modulus)
    }

    pub(crate) fn check_same(&self, other: &FieldSpec) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::FieldMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::new(DEFAULT_MODULUS).expect("default modulus is prime")
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.modulus)
    }
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;

    fn try_from(modulus: u64) -> Result<Self> {
        Self::new(modulus)
    }
}

impl From<FieldSpec> for u64 {
    fn from(f: FieldSpec) -> u64 {
        f.modulus
    }
}

/// Trial division; the modulus is below `2^32`, so at most 65536 divisions.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}
