//! Exact integer and modular arithmetic shared by the rest of the crate.
//!
//! Residues are always canonical, i.e. in `[0, r - 1]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Prime factorization `r = 2^two_exponent * prod p_i^alpha_i` with the odd
/// primes listed in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub two_exponent: u32,
    pub odd_primes: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn smallest_odd_prime(&self) -> Option<u64> {
        self.odd_primes.first().map(|&(p, _)| p)
    }

    /// Maximal prime powers dividing the factored integer, two first.
    pub fn prime_powers(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.odd_primes.len() + 1);
        if self.two_exponent > 0 {
            out.push(1u64 << self.two_exponent);
        }
        out.extend(self.odd_primes.iter().map(|&(p, a)| p.pow(a)));
        out
    }

    pub fn value(&self) -> u64 {
        self.odd_primes
            .iter()
            .fold(1u64 << self.two_exponent, |acc, &(p, a)| acc * p.pow(a))
    }

    /// The odd part of the factored integer.
    pub fn odd_part(&self) -> u64 {
        self.odd_primes.iter().map(|&(p, a)| p.pow(a)).product()
    }
}

/// Canonical residue of `a` modulo `r`.
pub fn reduce(a: i64, r: u64) -> u64 {
    (a as i128).rem_euclid(r as i128) as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `r`, in `[0, r - 1]`.
pub fn mod_inverse(a: i64, r: u64) -> Result<u64> {
    if r <= 1 {
        return Err(Error::BadModulus(r));
    }
    let a_red = reduce(a, r) as i128;
    let ext = a_red.extended_gcd(&(r as i128));
    if ext.gcd != 1 {
        return Err(Error::NonUnit { a, modulus: r });
    }
    Ok(ext.x.rem_euclid(r as i128) as u64)
}

/// Trial division; adequate for the moduli this crate works with.
pub fn factorize(r: u64) -> Result<Factorization> {
    if r <= 1 {
        return Err(Error::BadModulus(r));
    }
    let mut rest = r;
    let two_exponent = rest.trailing_zeros();
    rest >>= two_exponent;
    let mut odd_primes = Vec::new();
    let mut p = 3u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            odd_primes.push((p, e));
        }
        p += 2;
    }
    if rest > 1 {
        odd_primes.push((rest, 1));
    }
    Ok(Factorization {
        two_exponent,
        odd_primes,
    })
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Units of `Z/rZ` in increasing order.
pub fn units(r: u64) -> Vec<u64> {
    (1..r).filter(|&a| gcd(a, r) == 1).collect()
}

/// Exact binomial coefficient; zero when `b > a`.
pub fn binomial(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    // acc stays integral: after step i it equals C(a - b + i, i).
    for i in 1..=b {
        acc *= a - b + i;
        acc /= i;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

pub fn padic_valuation(x: &BigInt, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if x.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut rest = x.abs();
    loop {
        let (q, rem) = rest.div_rem(&p);
        if !rem.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        rest = q;
        v += 1;
    }
}

/// Canonical residue of a big integer modulo `k`.
pub fn big_mod(x: &BigInt, k: u64) -> u64 {
    let k = BigInt::from(k);
    let r = x.mod_floor(&k);
    u64::try_from(r).expect("residue fits in u64")
}
