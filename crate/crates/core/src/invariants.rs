//! Modular invariants of path-count matrices: the window-product signature,
//! divisibility certificates, the corner congruence, and the closed-form
//! class counts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lensgraph::LensParams;
use crate::numtheory::{
    big_mod, binomial, factorize, is_prime, mod_inverse, padic_valuation, Valuation,
};
use crate::pathmatrix::{count_matrix, PathMatrix};

/// For every odd prime `p` of `r` (increasing), the residues
/// `[m_{t+1} * ... * m_{t+p-1}]_p` for `t = 1 ..= n - p`.
///
/// Equal signatures are necessary for equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub primes: Vec<u64>,
    pub windows: Vec<Vec<u64>>,
}

pub fn signature(params: &LensParams) -> Signature {
    let f = factorize(params.r()).expect("r > 2");
    let n = params.n();
    let mut primes = Vec::new();
    let mut windows = Vec::new();
    for &(p, _) in &f.odd_primes {
        primes.push(p);
        let p_us = p as usize;
        let tuple = if n > p_us {
            (1..=n - p_us)
                .map(|t| {
                    (t + 1..=t + p_us - 1).fold(1u64, |acc, l| acc * (params.entry(l) % p) % p)
                })
                .collect()
        } else {
            Vec::new()
        };
        windows.push(tuple);
    }
    Signature { primes, windows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `p^alpha` divides `<a, b>` whenever `0 < b - a < p`.
    PrimePowerDivides { p: u64, alpha: u32 },
    /// `2^t` divides `<a, a + 3>` when `2^t | r`, `t > 1`.
    TwoPowerDivides { t: u32 },
    /// `2^(t-2)` exactly divides `<a, a + 4>` when `2^t || r`, `t > 1`.
    TwoValuationExact { t: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityCheck {
    pub claim: Claim,
    pub row: usize,
    pub col: usize,
    pub entry: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityReport {
    pub r: u64,
    pub m: Vec<u64>,
    pub checks: Vec<DivisibilityCheck>,
}

impl DivisibilityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn check_divisibility(params: &LensParams) -> DivisibilityReport {
    check_divisibility_of(params, &count_matrix(params))
}

/// As [`check_divisibility`] with a precomputed matrix.
pub fn check_divisibility_of(params: &LensParams, matrix: &PathMatrix) -> DivisibilityReport {
    let f = factorize(params.r()).expect("r > 2");
    let n = params.n();
    let mut checks = Vec::new();
    let mut push = |claim: Claim, row: usize, col: usize, pass: bool| {
        checks.push(DivisibilityCheck {
            claim,
            row,
            col,
            entry: matrix.get(row, col).to_string(),
            pass,
        });
    };
    for &(p, alpha) in &f.odd_primes {
        let q = BigInt::from(p.pow(alpha));
        for a in 1..=n {
            for b in a + 1..=n.min(a + p as usize - 1) {
                let pass = matrix.get(a, b).is_multiple_of(&q);
                push(Claim::PrimePowerDivides { p, alpha }, a, b, pass);
            }
        }
    }
    let t = f.two_exponent;
    if t > 1 {
        let q = BigInt::from(1u64 << t);
        for a in 1..=n.saturating_sub(3) {
            let pass = matrix.get(a, a + 3).is_multiple_of(&q);
            push(Claim::TwoPowerDivides { t }, a, a + 3, pass);
        }
        for a in 1..=n.saturating_sub(4) {
            let v = padic_valuation(matrix.get(a, a + 4), 2).expect("2 is prime");
            push(
                Claim::TwoValuationExact { t },
                a,
                a + 4,
                v == Valuation::Finite(t - 2),
            );
        }
    }
    DivisibilityReport {
        r: params.r(),
        m: params.m().to_vec(),
        checks,
    }
}

/// Both sides of the corner congruence reduced modulo `p^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub modulus: u64,
    pub lhs: u64,
    pub rhs: u64,
}

impl Congruence {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `<1, n> == C(r + n - 2, n - 1) * prod_{k=2}^{n-1} m_k^{-1} (mod p^alpha)`
/// for `p^alpha | r`, `n <= p + 1`, provided `p^alpha` divides every
/// `<1, a>` with `1 < a < n`.
pub fn congruence_main(params: &LensParams, p: u64, alpha: u32) -> Result<Congruence> {
    congruence_main_of(params, &count_matrix(params), p, alpha)
}

pub fn congruence_main_of(
    params: &LensParams,
    matrix: &PathMatrix,
    p: u64,
    alpha: u32,
) -> Result<Congruence> {
    let r = params.r();
    let n = params.n();
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 {
        return Err(Error::InvalidParams("exponent must be at least 1".into()));
    }
    let modulus = p
        .checked_pow(alpha)
        .filter(|q| r.is_multiple_of(*q))
        .ok_or_else(|| Error::InvalidParams(format!("{p}^{alpha} does not divide {r}")))?;
    if n as u64 > p + 1 {
        return Err(Error::InvalidParams(format!(
            "n = {n} exceeds p + 1 = {}",
            p + 1
        )));
    }
    let q = BigInt::from(modulus);
    for a in 2..n {
        if !matrix.get(1, a).is_multiple_of(&q) {
            return Err(Error::HypothesisUnmet(format!(
                "{modulus} does not divide <1, {a}> = {}",
                matrix.get(1, a)
            )));
        }
    }
    let lhs = big_mod(matrix.get(1, n), modulus);
    let mut rhs = big_mod(&binomial(r + n as u64 - 2, n as u64 - 1), modulus) as u128;
    for k in 2..n {
        let inv = mod_inverse(params.entry(k) as i64, modulus)? as u128;
        rhs = rhs * inv % modulus as u128;
    }
    Ok(Congruence {
        modulus,
        lhs,
        rhs: rhs as u64,
    })
}

/// `prod_i ceil((p_i - 1)^(n - p_i))` over the odd primes of `r`; a factor
/// is 1 when `n <= p_i`.
pub fn lower_bound_classes(r: u64, n: usize) -> Result<BigInt> {
    if r <= 2 {
        return Err(Error::BadModulus(r));
    }
    let f = factorize(r)?;
    Ok(f.odd_primes.iter().fold(BigInt::one(), |acc, &(p, _)| {
        if n as u64 > p {
            acc * BigInt::from(p - 1).pow((n as u64 - p) as u32)
        } else {
            acc
        }
    }))
}

/// The least dimension with more than one class: `p + 1` when `4 ∤ r`,
/// `min(6, p + 1)` when `4 | r`, where `p` is the smallest odd prime of `r`
/// (taken as absent, giving 6, for powers of two).
pub fn phitilde_formula(r: u64) -> Result<usize> {
    if r <= 2 {
        return Err(Error::BadModulus(r));
    }
    let f = factorize(r)?;
    let p = f.smallest_odd_prime();
    Ok(match (r.is_multiple_of(4), p) {
        (false, Some(p)) => p as usize + 1,
        (true, Some(p)) => (p as usize + 1).min(6),
        (_, None) => 6,
    })
}
