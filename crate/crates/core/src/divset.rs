//! Windows of the index divisibility set `D(f) = {n : n | f^n(0)}` and
//! mechanical checks of its closure properties.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, largest_prime_factor, smallest_prime_factor, valuation_u64};
use crate::error::{Error, Result};
use crate::orbit::{
    classify_zero, has_rigidity_witness, iterate_index_reduced, orbit_mod, rank_of_apparition,
    valuation_of_term, Valuation, ZeroOrbit,
};
use crate::poly::IntPolynomial;
use crate::primes::prime_sieve;

/// Whether `n | f^n(0)`. Index 0 is never a member.
pub fn in_div_set(f: &IntPolynomial, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let g = f.reduce_mod(n).expect("nonzero modulus");
    iterate_index_reduced(&g, n) == 0
}

/// The members of `D(f)` in `[1, bound]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilitySetWindow {
    pub f: IntPolynomial,
    pub bound: u64,
    pub members: Vec<u64>,
    /// 0 is periodic over `Z`, so `f^n(0) = 0` for every multiple `n` of
    /// its period and those `n` are members because `n | 0`.
    pub degenerate: bool,
}

impl DivisibilitySetWindow {
    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    /// Membership bitmap indexed by `n` (entry 0 unused).
    pub fn bitmap(&self) -> Vec<bool> {
        let mut bits = vec![false; self.bound as usize + 1];
        for &n in &self.members {
            bits[n as usize] = true;
        }
        bits
    }
}

/// Scans `1..=bound`, one modular orbit per index, in parallel.
pub fn div_set_window(f: &IntPolynomial, bound: u64) -> DivisibilitySetWindow {
    let members: Vec<u64> = (1..=bound).into_par_iter().filter(|&n| in_div_set(f, n)).collect();
    let degenerate = matches!(
        classify_zero(f),
        Ok(c) if matches!(c.orbit, ZeroOrbit::Preperiodic { tail: 0, .. })
    );
    DivisibilitySetWindow {
        f: f.clone(),
        bound,
        members,
        degenerate,
    }
}

/// Tail and cycle of 0 modulo a member, as reported by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberPeriod {
    pub n: u64,
    pub tail: usize,
    pub cycle: usize,
}

pub fn member_periods(window: &DivisibilitySetWindow) -> Vec<MemberPeriod> {
    window
        .members
        .par_iter()
        .map(|&n| {
            let o = orbit_mod(&window.f, n).expect("members are positive");
            MemberPeriod {
                n,
                tail: o.tail(),
                cycle: o.cycle(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClosureProperty {
    /// `n | f(0)` implies `n in D`.
    DividesConstant,
    /// For even `f`, every prime member divides `f(0)`.
    EvenFunctionPrimes,
    /// `n in D` and `v_p(n) < v_p(f^n(0))` imply `np in D`.
    ValuationLift,
    /// `m, n in D` coprime imply `mn in D`.
    CoprimeProduct,
    /// `m | n` in `D`, `p` the least prime of `n/m`, `p ∤ m` imply `mp in D`.
    SmallestPrimeStep,
    /// The least prime factor of a member is a member.
    SmallestPrimeFactor,
    /// Rigid case: `m | n` in `D`, `p` the least prime of `n/m` imply `mp in D`.
    RigidSmallestPrime,
    /// Rigid case: `n in D`, `p` its largest prime imply `n/p in D`.
    RigidLargestPrime,
    /// Empirical rigidity: `v_p(f^{tk}(0)) = v_p(f^t(0))` for `t` the rank
    /// of `p`, small `p`, `t` and `k`.
    RigidValuationConstancy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyTally {
    pub property: ClosureProperty,
    pub instances: u64,
    /// Each witness lists the integers of the failing instance, e.g.
    /// `[m, n, mn]`.
    pub counterexamples: Vec<Vec<u64>>,
}

impl PropertyTally {
    fn new(property: ClosureProperty) -> Self {
        PropertyTally {
            property,
            instances: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, holds: bool, witness: impl FnOnce() -> Vec<u64>) {
        self.instances += 1;
        if !holds {
            self.counterexamples.push(witness());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub rigidity_witness: bool,
    pub even_function: bool,
    pub tallies: Vec<PropertyTally>,
    /// Observed rigidity, reported separately: a failure here is a finding
    /// about `f`, not a broken implication.
    pub rigidity_empirical: PropertyTally,
}

impl ClosureReport {
    /// True when no closure implication failed. The empirical rigidity
    /// tally is not included.
    pub fn all_pass(&self) -> bool {
        self.tallies.iter().all(|t| t.counterexamples.is_empty())
    }

    pub fn tally(&self, property: ClosureProperty) -> Option<&PropertyTally> {
        self.tallies
            .iter()
            .chain(std::iter::once(&self.rigidity_empirical))
            .find(|t| t.property == property)
    }
}

/// Limits for the empirical rigidity check.
const RIGIDITY_PRIME_BOUND: u64 = 200;
const RIGIDITY_RANK_BOUND: u64 = 50;
const RIGIDITY_MULTIPLES: u64 = 5;

/// Checks every instance of each closure implication whose hypothesis and
/// conclusion both fall inside the window.
pub fn check_closure_properties(f: &IntPolynomial, window: &DivisibilitySetWindow) -> Result<ClosureReport> {
    if window.f != *f {
        return Err(Error::Precondition("window was computed for a different polynomial".into()));
    }
    let bound = window.bound;
    let member = window.bitmap();
    let is_member = |n: u64| n <= bound && member[n as usize];
    let primes = prime_sieve(bound);
    let c = f.constant_term();
    let even = f.is_even_function();
    let rigid = has_rigidity_witness(f);
    let mut tallies = Vec::new();

    let mut t = PropertyTally::new(ClosureProperty::DividesConstant);
    for n in 1..=bound {
        if (&c % BigInt::from(n)).is_zero() {
            t.record(is_member(n), || vec![n]);
        }
    }
    tallies.push(t);

    if even {
        let mut t = PropertyTally::new(ClosureProperty::EvenFunctionPrimes);
        for &p in window.members.iter().filter(|&&n| is_prime(n)) {
            t.record((&c % BigInt::from(p)).is_zero(), || vec![p]);
        }
        tallies.push(t);
    }

    tallies.push(valuation_lift(f, window, &primes, &is_member)?);

    let mut t = PropertyTally::new(ClosureProperty::CoprimeProduct);
    for (i, &m) in window.members.iter().enumerate() {
        for &n in &window.members[i..] {
            if m.saturating_mul(n) > bound {
                break;
            }
            if gcd(m, n) == 1 {
                t.record(is_member(m * n), || vec![m, n, m * n]);
            }
        }
    }
    tallies.push(t);

    let mut step = PropertyTally::new(ClosureProperty::SmallestPrimeStep);
    let mut rigid_step = PropertyTally::new(ClosureProperty::RigidSmallestPrime);
    for &n in &window.members {
        for &m in window.members.iter().take_while(|&&m| m < n) {
            if n % m != 0 {
                continue;
            }
            let p = smallest_prime_factor(n / m).expect("n/m > 1");
            if m % p != 0 {
                step.record(is_member(m * p), || vec![m, n, m * p]);
            }
            if rigid {
                rigid_step.record(is_member(m * p), || vec![m, n, m * p]);
            }
        }
    }
    tallies.push(step);

    let mut t = PropertyTally::new(ClosureProperty::SmallestPrimeFactor);
    for &n in window.members.iter().filter(|&&n| n > 1) {
        let p = smallest_prime_factor(n).expect("n > 1");
        t.record(is_member(p), || vec![n, p]);
    }
    tallies.push(t);

    if rigid {
        tallies.push(rigid_step);
        let mut t = PropertyTally::new(ClosureProperty::RigidLargestPrime);
        for &n in window.members.iter().filter(|&&n| n > 1) {
            let p = largest_prime_factor(n).expect("n > 1");
            t.record(is_member(n / p), || vec![n, p, n / p]);
        }
        tallies.push(t);
    }

    Ok(ClosureReport {
        rigidity_witness: rigid,
        even_function: even,
        tallies,
        rigidity_empirical: rigidity_constancy(f, bound.min(RIGIDITY_PRIME_BOUND))?,
    })
}

fn valuation_lift(
    f: &IntPolynomial,
    window: &DivisibilitySetWindow,
    primes: &[u64],
    is_member: &(dyn Fn(u64) -> bool + Sync),
) -> Result<PropertyTally> {
    let bound = window.bound;
    let per_member: Vec<Result<Vec<(u64, u64, bool)>>> = window
        .members
        .par_iter()
        .map(|&n| {
            let mut hits = Vec::new();
            for &p in primes.iter().take_while(|&&p| p <= bound / n) {
                let v = if n % p == 0 { valuation_u64(n, p) } else { 0 };
                let val = valuation_of_term(f, p, n, v + 1)?;
                if val.exceeds(v) == Some(true) {
                    hits.push((n, p, is_member(n * p)));
                }
            }
            Ok(hits)
        })
        .collect();
    let mut t = PropertyTally::new(ClosureProperty::ValuationLift);
    for hits in per_member {
        for (n, p, holds) in hits? {
            t.record(holds, || vec![n, p, n * p]);
        }
    }
    Ok(t)
}

/// Largest cap with `p^cap < 2^63`, at most 8.
fn valuation_cap(p: u64) -> u32 {
    let mut cap = 1;
    while cap < 8 && p.checked_pow(cap + 1).is_some_and(|q| q < 1 << 63) {
        cap += 1;
    }
    cap
}

/// Empirical check of the first rigidity axiom on primes `p <= prime_bound`
/// whose rank of apparition is at most 50.
pub fn rigidity_constancy(f: &IntPolynomial, prime_bound: u64) -> Result<PropertyTally> {
    let mut t = PropertyTally::new(ClosureProperty::RigidValuationConstancy);
    for p in prime_sieve(prime_bound) {
        let Some(rank) = rank_of_apparition(f, p)? else {
            continue;
        };
        if rank > RIGIDITY_RANK_BOUND {
            continue;
        }
        let cap = valuation_cap(p);
        let base = valuation_of_term(f, p, rank, cap)?;
        for k in 2..=RIGIDITY_MULTIPLES {
            let v = valuation_of_term(f, p, rank * k, cap)?;
            t.record(v == base, || {
                let enc = |v: Valuation| match v {
                    Valuation::Exact(x) | Valuation::AtLeast(x) => x as u64,
                };
                vec![p, rank, k, enc(base), enc(v)]
            });
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeConstraint {
    Admissible,
    /// `d` or `e` is even and `p ∤ c`, so `p` is not in `D`.
    ExcludedByParity,
}

/// For `x^d + x^e + c` with `d > e >= 2`: a prime can only be a member
/// when it divides `c` or both exponents are odd.
pub fn trinomial_prime_constraint(d: u64, e: u64, c: i64, p: u64) -> Result<PrimeConstraint> {
    if !(d > e && e >= 2) {
        return Err(Error::Precondition(format!("need d > e >= 2, got d={d} e={e}")));
    }
    let divides = c % p as i64 == 0;
    Ok(if (d % 2 == 0 || e % 2 == 0) && !divides {
        PrimeConstraint::ExcludedByParity
    } else {
        PrimeConstraint::Admissible
    })
}

/// Given `p in D_{d,e,c}`, checks `p in D_{d + k1 (p-1), e + k2 (p-1), c}`
/// directly on the shifted trinomial. The shifted exponents need
/// `d' >= 3` and `e' >= 2`; their order does not matter.
pub fn check_exponent_shift(d: u64, e: u64, c: i64, p: u64, k1: i64, k2: i64) -> Result<bool> {
    if !in_div_set(&IntPolynomial::trinomial(d as usize, e as usize, c), p) {
        return Err(Error::Precondition(format!("{p} is not in D_{{{d},{e},{c}}}")));
    }
    let shift = |x: u64, k: i64| (x as i128) + (k as i128) * (p as i128 - 1);
    let (d2, e2) = (shift(d, k1), shift(e, k2));
    if d2 < 3 || e2 < 2 {
        return Err(Error::Precondition(format!(
            "shifted exponents d={d2} e={e2} need d >= 3 and e >= 2"
        )));
    }
    let (d2, e2) = (
        usize::try_from(d2).map_err(|_| Error::Precondition("shifted exponent too large".into()))?,
        usize::try_from(e2).map_err(|_| Error::Precondition("shifted exponent too large".into()))?,
    );
    Ok(in_div_set(&IntPolynomial::trinomial(d2, e2, c), p))
}
