//! Local behaviour modulo a prime `p`: permutation profiles, the exclusion
//! predicates for trinomials `x^d + x^e + c`, the circulant constant term,
//! parity restrictions and the density of primes they remove.
//!
//! A prime `p` with `p ∤ c` lies in `D` exactly when `f` acts on `Z/pZ` as a
//! single `p`-cycle, so any obstruction to `f` being a cyclic permutation
//! excludes `p`.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, multiplicative_order, pow_mod, reduce_i64};
use crate::error::{Error, Result};
use crate::orbit::orbit_mod;
use crate::poly::{IntPolynomial, ModPoly};
use crate::primes::prime_sieve;

/// Largest prime accepted by [`profile_mod_p`].
pub const PROFILE_PRIME_LIMIT: u64 = 1_000_000;
/// Largest prime accepted by [`circulant_bruteforce`].
pub const BRUTEFORCE_PRIME_LIMIT: u64 = 101;
/// Largest prime accepted by [`injectivity_resultant_check`].
pub const INJECTIVITY_PRIME_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
    NotApplicable,
}

impl Parity {
    /// Sign of a permutation of `points` elements with `cycles` cycles.
    pub fn of_cycles(points: u64, cycles: u64) -> Parity {
        if (points - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Product of signs; `NotApplicable` absorbs.
    pub fn compose(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::NotApplicable, _) | (_, Parity::NotApplicable) => Parity::NotApplicable,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationProfile {
    pub p: u64,
    pub is_permutation: bool,
    /// Lengths of the cycles of `x -> f(x) mod p`, ascending. For a
    /// permutation they sum to `p`; otherwise they cover the cyclic points.
    pub cycle_type: Vec<u64>,
    pub image_size: u64,
    pub parity: Parity,
    /// Steps from 0 before its orbit enters a cycle.
    pub zero_tail: u64,
    /// Length of the cycle the orbit of 0 ends in.
    pub zero_cycle: u64,
}

impl PermutationProfile {
    pub fn is_cyclic(&self) -> bool {
        self.cycle_type == [self.p]
    }
}

fn value_table(f: &IntPolynomial, p: u64) -> Result<Vec<u64>> {
    let g: ModPoly = f.reduce_mod(p)?;
    Ok((0..p).map(|x| g.eval(x)).collect())
}

fn check_prime(p: u64, limit: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if p > limit {
        return Err(Error::Precondition(format!("prime {p} exceeds the limit {limit}")));
    }
    Ok(())
}

/// Enumerates `x -> f(x) mod p` and decomposes its functional graph.
pub fn profile_mod_p(f: &IntPolynomial, p: u64) -> Result<PermutationProfile> {
    check_prime(p, PROFILE_PRIME_LIMIT)?;
    let table = value_table(f, p)?;
    Ok(profile_table(p, &table))
}

fn profile_table(p: u64, table: &[u64]) -> PermutationProfile {
    let n = table.len();
    let mut hit = vec![false; n];
    for &y in table {
        hit[y as usize] = true;
    }
    let image_size = hit.iter().filter(|&&h| h).count() as u64;

    // 0 unvisited, 1 on the current walk, 2 finished
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    let mut walk = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut x = start;
        while state[x] == 0 {
            state[x] = 1;
            walk.push(x);
            x = table[x] as usize;
        }
        if state[x] == 1 {
            let pos = walk.iter().rposition(|&w| w == x).expect("x is on the walk");
            cycles.push((walk.len() - pos) as u64);
        }
        for &w in &walk {
            state[w] = 2;
        }
        walk.clear();
    }
    cycles.sort_unstable();

    let mut seen = vec![u64::MAX; n];
    let mut x = 0usize;
    let mut step = 0u64;
    while seen[x] == u64::MAX {
        seen[x] = step;
        x = table[x] as usize;
        step += 1;
    }
    let zero_tail = seen[x];
    let zero_cycle = step - seen[x];

    let is_permutation = image_size == p;
    let parity = if is_permutation {
        Parity::of_cycles(p, cycles.len() as u64)
    } else {
        Parity::NotApplicable
    };
    PermutationProfile {
        p,
        is_permutation,
        cycle_type: cycles,
        image_size,
        parity,
        zero_tail,
        zero_cycle,
    }
}

/// `p ∈ D(f)` read off the orbit of 0 mod `p`: 0 must be periodic with
/// period 1 or `p`.
pub fn prime_in_divset_via_period(f: &IntPolynomial, p: u64) -> Result<bool> {
    let rank = orbit_mod(f, p)?.rank_of_apparition();
    Ok(matches!(rank, Some(t) if t == 1 || t == p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Restriction {
    /// An exponent is even and `p ∤ c`.
    EvenExponent,
    /// `(p-1)/k` is even, `k = gcd(d-e, p-1)`.
    EvenQuotient,
    /// `ord_p(2) ∤ k`.
    OrderNotDividing,
    /// `k < log2 p`.
    GcdTooSmall,
    /// `d ≡ e ≡ 1 (mod p-1)`, so `f ≡ 2x + c`.
    LinearCase,
    /// `d ≡ e (mod p-1)` and `f ≡ 2x^d + c` is an odd permutation.
    ParityRestriction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub p: u64,
    /// Exponents reduced into `[1, p-1]`.
    pub reduced: (u64, u64),
    pub fired: Vec<Restriction>,
    pub excluded: bool,
}

/// `x` reduced mod `p-1` into `[1, p-1]`.
fn reduce_exponent(x: u64, p: u64) -> u64 {
    (x - 1) % (p - 1) + 1
}

/// Evaluates every exclusion predicate for `x^d + x^e + c` at `p`. Nothing
/// fires when `p | c`.
pub fn restriction_predicates(d: u64, e: u64, c: i64, p: u64) -> Result<RestrictionReport> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if d == 0 || e == 0 {
        return Err(Error::Precondition("exponents must be positive".into()));
    }
    let (rd, re) = (reduce_exponent(d, p), reduce_exponent(e, p));
    let mut fired = Vec::new();
    if reduce_i64(c, p) != 0 {
        if d != e && d.min(e) >= 2 && (d % 2 == 0 || e % 2 == 0) {
            fired.push(Restriction::EvenExponent);
        }
        if rd != re && rd % 2 == 1 && re % 2 == 1 {
            let k = gcd(rd.abs_diff(re), p - 1);
            if ((p - 1) / k) % 2 == 0 {
                fired.push(Restriction::EvenQuotient);
            }
            if multiplicative_order(2, p).is_some_and(|o| k % o != 0) {
                fired.push(Restriction::OrderNotDividing);
            }
            if k < 64 && (1u64 << k) < p {
                fired.push(Restriction::GcdTooSmall);
            }
        }
        if rd == re {
            if rd == 1 && linear_case_predicate(2, c, p) == Exclusion::Excluded {
                fired.push(Restriction::LinearCase);
            }
            if parity_restriction(2, rd, c, p) == Exclusion::Excluded {
                fired.push(Restriction::ParityRestriction);
            }
        }
    }
    Ok(RestrictionReport {
        p,
        reduced: (rd, re),
        excluded: !fired.is_empty(),
        fired,
    })
}

/// Closed form of the constant term of `res(x^d + x^e + c, x^{p-1} - 1)`
/// as a polynomial in `c`: with `k = gcd(d-e, p-1)`, it is 0 when `(p-1)/k`
/// is even and `(-1)^e 2^k` otherwise.
pub fn circulant_constant(d: u64, e: u64, p: u64) -> Result<BigInt> {
    check_exponents(d, e, p)?;
    let k = gcd(d - e, p - 1);
    if ((p - 1) / k) % 2 == 0 {
        return Ok(BigInt::from(0));
    }
    let magnitude = BigInt::one() << k;
    Ok(if e % 2 == 0 { magnitude } else { -magnitude })
}

/// Determinant mod `p` of the `(p-1) × (p-1)` circulant matrix of
/// `x^d + x^e`, by Gaussian elimination over `Z/pZ`.
pub fn circulant_bruteforce(d: u64, e: u64, p: u64) -> Result<u64> {
    check_prime(p, BRUTEFORCE_PRIME_LIMIT)?;
    check_exponents(d, e, p)?;
    let n = (p - 1) as usize;
    let mut first = vec![0u64; n];
    first[d as usize % n] += 1;
    first[e as usize % n] += 1;
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| first[(j + n - i) % n] % p).collect())
        .collect();
    Ok(determinant_mod(&mut m, p))
}

/// Exponents only matter mod `p - 1`, so `d >= p` is accepted.
fn check_exponents(d: u64, e: u64, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    if !(0 < e && e < d) {
        return Err(Error::Precondition(format!("need 0 < e < d, got e={e}, d={d}")));
    }
    Ok(())
}

fn determinant_mod(m: &mut [Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if pivot != col {
            m.swap(pivot, col);
            det = (p - det) % p;
        }
        det = det * m[col][col] % p;
        let inv = pow_mod(m[col][col], p - 2, p);
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower {
            let factor = row[col] * inv % p;
            if factor == 0 {
                continue;
            }
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = (*x + p * p - factor * y) % p;
            }
        }
    }
    det
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityCheck {
    pub injective: bool,
    /// `res(f, x^{p-1} - 1) mod p`, i.e. the product of `f(a)` over `a ≠ 0`.
    pub resultant: u64,
    /// Whether the resultant is `≡ c^{p-1} - 1 (mod p)`. Implied by
    /// injectivity; the converse can fail.
    pub congruence_holds: bool,
}

/// Injectivity mod `p` by enumerating the image, with the resultant
/// congruence computed alongside.
pub fn injectivity_resultant_check(f: &IntPolynomial, p: u64) -> Result<InjectivityCheck> {
    check_prime(p, INJECTIVITY_PRIME_LIMIT)?;
    let table = value_table(f, p)?;
    let mut hit = vec![false; p as usize];
    for &y in &table {
        hit[y as usize] = true;
    }
    let injective = hit.iter().all(|&h| h);
    let resultant = table[1..].iter().fold(1u64, |acc, &y| acc * y % p);
    let c = table[0];
    let expected = (pow_mod(c, p - 1, p) + p - 1) % p;
    Ok(InjectivityCheck {
        injective,
        resultant,
        congruence_holds: resultant == expected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exclusion {
    Excluded,
    NotExcluded,
    NotApplicable,
}

/// For `f ≡ ax + c (mod p)`: `p ∈ D` needs `a ≡ 1` or `c ≡ 0`.
pub fn linear_case_predicate(a: i64, c: i64, p: u64) -> Exclusion {
    if reduce_i64(a, p) != 1 % p && reduce_i64(c, p) != 0 {
        Exclusion::Excluded
    } else {
        Exclusion::NotExcluded
    }
}

/// Sign of `x -> x^d` on `Z/pZ` for `p ≡ 1 (mod 4)`: odd iff `d ≡ 3 (mod 4)`.
pub fn power_map_parity(d: u64, p: u64) -> Result<Parity> {
    if !is_prime(p) || p % 4 != 1 {
        return Err(Error::Precondition(format!("{p} is not a prime ≡ 1 (mod 4)")));
    }
    if gcd(d, p - 1) != 1 {
        return Err(Error::Precondition(format!("x^{d} is not a permutation mod {p}")));
    }
    Ok(if d % 4 == 3 { Parity::Odd } else { Parity::Even })
}

/// For `f ≡ a x^d + c (mod p)` with `p ∤ c`: `p ∉ D` when `p ≡ 1 (mod 4)`,
/// `d ≡ 3 (mod 4)` and `ord_p(a)` is odd. If `x^d` is a permutation, `f` is
/// an odd one; if not, `f` is no permutation at all.
pub fn parity_restriction(a: i64, d: u64, c: i64, p: u64) -> Exclusion {
    let a = reduce_i64(a, p);
    let applies = is_prime(p)
        && reduce_i64(c, p) != 0
        && p % 4 == 1
        && d % 4 == 3
        && multiplicative_order(a, p).is_some_and(|o| o % 2 == 1);
    if applies {
        Exclusion::Excluded
    } else {
        Exclusion::NotApplicable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityScan {
    pub bound: u64,
    pub primes: u64,
    pub qualifying: u64,
    pub fraction: f64,
}

/// Whether `ord_p(2)` is odd, i.e. `2^m ≡ 1` for the odd part `m` of `p-1`.
fn order_of_two_is_odd(p: u64) -> bool {
    let m = (p - 1) >> (p - 1).trailing_zeros();
    pow_mod(2, m, p) == 1
}

/// Fraction of primes `p <= bound` with `p ≡ 1 (mod 8)` and `ord_p(2)` odd.
pub fn density_scan(bound: u64) -> DensityScan {
    let primes = prime_sieve(bound);
    let qualifying = primes
        .par_iter()
        .filter(|&&p| p % 8 == 1 && order_of_two_is_odd(p))
        .count() as u64;
    let total = primes.len() as u64;
    DensityScan {
        bound,
        primes: total,
        qualifying,
        fraction: if total == 0 { 0.0 } else { qualifying as f64 / total as f64 },
    }
}
