//! Arithmetic in the prime field `F_p`.
//!
//! [`FpContext`] validates the prime once and precomputes factorials for
//! arguments `0..=4p`. Factorials of arguments `>= p` are stored as zero,
//! which is what the closed-form evaluators rely on when a formula should
//! vanish. Inverse factorials only exist below `p`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// An element of `F_p`, always kept in canonical form `0..p`.
///
/// The modulus travels with the value so that the usual operator traits can
/// be implemented; mixing elements of different fields is a logic error and
/// panics.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u32,
    p: u32,
}

impl Fp {
    pub fn new(value: i64, p: u32) -> Self {
        let m = p as i64;
        Fp {
            value: value.rem_euclid(m) as u32,
            p,
        }
    }

    pub fn zero(p: u32) -> Self {
        Fp { value: 0, p }
    }

    pub fn one(p: u32) -> Self {
        Fp { value: 1 % p, p }
    }

    /// `(-1)^k`.
    pub fn sign(k: i64, p: u32) -> Self {
        if k.rem_euclid(2) == 0 {
            Fp::one(p)
        } else {
            Fp::new(-1, p)
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            // Fermat: x^(p-2) = x^(-1).
            Some(self.pow(self.p as u64 - 2))
        }
    }

    pub fn try_div(self, rhs: Fp) -> Result<Fp> {
        self.check(rhs);
        rhs.inv()
            .map(|r| self * r)
            .ok_or(Error::DivisionByZero { p: self.p })
    }

    #[inline]
    fn check(self, rhs: Fp) {
        assert_eq!(self.p, rhs.p, "mixing elements of F_{} and F_{}", self.p, rhs.p);
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let s = self.value as u64 + rhs.value as u64;
        Fp {
            value: (s % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self + (-rhs)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.value == 0 {
            self
        } else {
            Fp {
                value: self.p - self.value,
                p: self.p,
            }
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let m = self.value as u64 * rhs.value as u64;
        Fp {
            value: (m % self.p as u64) as u32,
            p: self.p,
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

/// A validated odd prime together with factorial tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FpContext {
    p: u32,
    /// `n! mod p` for `n` in `0..=4p`; zero from `p` onwards.
    fact: Vec<u32>,
    /// `(n!)^{-1} mod p` for `n` in `0..p`.
    inv_fact: Vec<u32>,
}

impl fmt::Debug for FpContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FpContext").field("p", &self.p).finish()
    }
}

/// Largest prime accepted. Keeps every product of two residues inside `u64`
/// and the factorial tables small.
pub const MAX_PRIME: u64 = 1 << 20;

impl FpContext {
    pub fn new(p: u64) -> Result<Self> {
        if !(3..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let pu = p as u32;
        let len = 4 * p as usize + 1;
        let mut fact = Vec::with_capacity(len);
        let mut acc = Fp::one(pu);
        for n in 0..len {
            if n > 0 {
                acc *= Fp::new(n as i64, pu);
            }
            fact.push(acc.value());
        }
        let mut inv_fact = vec![0u32; p as usize];
        let mut inv = Fp::new(fact[p as usize - 1] as i64, pu)
            .inv()
            .expect("(p-1)! is a unit");
        for n in (0..p as usize).rev() {
            inv_fact[n] = inv.value();
            inv *= Fp::new(n.max(1) as i64, pu);
        }
        Ok(FpContext {
            p: pu,
            fact,
            inv_fact,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduce an integer into the field.
    pub fn elem(&self, v: i64) -> Fp {
        Fp::new(v, self.p)
    }

    pub fn zero(&self) -> Fp {
        Fp::zero(self.p)
    }

    pub fn one(&self) -> Fp {
        Fp::one(self.p)
    }

    /// Largest factorial argument covered by the table (`4p`).
    pub fn factorial_bound(&self) -> u64 {
        4 * self.p as u64
    }

    /// `n! mod p`, which is zero exactly when `n >= p`.
    pub fn factorial(&self, n: u64) -> Result<Fp> {
        self.fact
            .get(n as usize)
            .filter(|_| n <= self.factorial_bound())
            .map(|&v| Fp {
                value: v,
                p: self.p,
            })
            .ok_or(Error::FactorialRange {
                n,
                max: self.factorial_bound(),
            })
    }

    /// `(n!)^{-1}` for `0 <= n < p`.
    pub fn inv_factorial(&self, n: u64) -> Result<Fp> {
        if n >= self.p as u64 {
            return Err(Error::DivisionByZero { p: self.p });
        }
        Ok(Fp {
            value: self.inv_fact[n as usize],
            p: self.p,
        })
    }

    pub fn inverse(&self, x: Fp) -> Result<Fp> {
        assert_eq!(x.modulus(), self.p);
        x.inv().ok_or(Error::DivisionByZero { p: self.p })
    }

    /// Binomial coefficient of two digits `0 <= m, n < p`.
    fn small_binomial(&self, n: u64, m: u64) -> Fp {
        if m > n {
            return self.zero();
        }
        let f = |k: u64| Fp {
            value: self.fact[k as usize],
            p: self.p,
        };
        let fi = |k: u64| Fp {
            value: self.inv_fact[k as usize],
            p: self.p,
        };
        f(n) * fi(m) * fi(n - m)
    }

    /// `C(n, m) mod p` by Lucas' theorem, multiplying the binomials of the
    /// base-`p` digits. `C(n, m) = 0` when `m > n`.
    pub fn binomial_lucas(&self, mut n: u64, mut m: u64) -> Fp {
        if m > n {
            return self.zero();
        }
        let p = self.p as u64;
        let mut acc = self.one();
        while m > 0 || n > 0 {
            let (nd, md) = (n % p, m % p);
            if md > nd {
                return self.zero();
            }
            acc *= self.small_binomial(nd, md);
            n /= p;
            m /= p;
        }
        acc
    }

    /// Signed variant: zero for negative arguments.
    pub fn binomial_signed(&self, n: i64, m: i64) -> Fp {
        if n < 0 || m < 0 {
            self.zero()
        } else {
            self.binomial_lucas(n as u64, m as u64)
        }
    }
}
