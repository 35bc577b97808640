//! Word-size modular arithmetic and small-integer factoring.
//!
//! Moduli are `u64`; products go through `u128` so any modulus below 2^64 is
//! safe. Factoring is trial division, which is all the callers need: the
//! largest numbers factored here are `p - 1` for primes below 10^7 and window
//! indices below a few tens of thousands.

/// `a * b mod m`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a + b mod m` for already reduced `a`, `b`.
#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

/// `base^exp mod m`, with `x^0 = 1 mod m` (so 0 when `m == 1`).
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduce a signed value into `[0, m)`.
#[inline]
pub fn reduce_i64(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// Prime factorization by trial division, primes ascending with multiplicity.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut p = 17u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 || n % (p + 2) == 0 {
            return false;
        }
        p += 6;
    }
    true
}

pub fn smallest_prime_factor(n: u64) -> Option<u64> {
    factorize(n).first().map(|&(p, _)| p)
}

pub fn largest_prime_factor(n: u64) -> Option<u64> {
    factorize(n).last().map(|&(p, _)| p)
}

/// Exponent of the prime `p` in `n` (`n > 0`).
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Multiplicative order of `a` modulo the prime `p`, or `None` when
/// `p | a`. Factors `p - 1` and strips each prime from the exponent while
/// `a^exp` stays 1.
pub fn multiplicative_order(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    if p == 2 {
        return Some(1);
    }
    let mut order = p - 1;
    for (q, e) in factorize(p - 1) {
        for _ in 0..e {
            if pow_mod(a, order / q, p) == 1 {
                order /= q;
            } else {
                break;
            }
        }
    }
    Some(order)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_two() {
        assert_eq!(multiplicative_order(2, 73), Some(9));
        assert_eq!(multiplicative_order(2, 17), Some(8));
        assert_eq!(multiplicative_order(2, 31), Some(5));
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(14, 7), None);
        assert_eq!(multiplicative_order(1, 13), Some(1));
    }

    #[test]
    fn order_matches_brute_force() {
        for p in (3..400u64).filter(|&p| is_prime(p)) {
            for a in 1..p {
                let mut x = a;
                let mut k = 1;
                while x != 1 {
                    x = x * a % p;
                    k += 1;
                }
                assert_eq!(multiplicative_order(a, p), Some(k), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn factoring() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(155), vec![(5, 1), (31, 1)]);
        assert_eq!(factorize(9_999_991), vec![(9_999_991, 1)]);
        assert_eq!(divisors(60).len(), 12);
        assert_eq!(divisors(1), vec![1]);
    }

    #[test]
    fn signed_reduction() {
        assert_eq!(reduce_i64(-1, 7), 6);
        assert_eq!(reduce_i64(-14, 7), 0);
        assert_eq!(pow_mod(5, 0, 1), 0);
        assert_eq!(pow_mod(2, 10, 341), 1);
    }
}
