//! The orbit of 0: exact prefixes, modular orbits with tail/cycle structure,
//! valuations of orbit terms, preperiodicity and the rank of apparition.
//!
//! Terms are 1-indexed: `a_n = f^n(0)` for `n >= 1`, with `f^0(0) = 0`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::valuation_u64;
use crate::error::{Error, Result};
use crate::poly::{IntPolynomial, ModPoly};

/// Default per-term bit budget for exact orbit prefixes.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// Below this index, `f^n(0) mod m` is computed by direct iteration rather
/// than through a [`ModularOrbit`].
const DIRECT_ITERATION_LIMIT: u64 = 64;

/// The first terms `f(0), f^2(0), ...` computed exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPrefix {
    f: IntPolynomial,
    terms: Vec<BigInt>,
}

impl OrbitPrefix {
    pub fn polynomial(&self) -> &IntPolynomial {
        &self.f
    }

    /// `terms()[n - 1] = f^n(0)`.
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    /// `f^n(0)` for `1 <= n <= len`.
    pub fn term(&self, n: usize) -> Option<&BigInt> {
        n.checked_sub(1).and_then(|i| self.terms.get(i))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The absolute-value sequence `|f^n(0)|`.
    pub fn abs_terms(&self) -> Vec<BigInt> {
        self.terms.iter().map(|t| t.abs()).collect()
    }

    /// Re-derives every term from its predecessor.
    pub fn is_consistent(&self) -> bool {
        let mut prev = BigInt::zero();
        self.terms.iter().all(|t| {
            let ok = self.f.eval_exact(&prev) == *t;
            prev = t.clone();
            ok
        })
    }
}

/// Exact terms `f^1(0) ..= f^{n_max}(0)`, refusing any term longer than
/// `bit_budget` bits.
pub fn orbit_exact(f: &IntPolynomial, n_max: usize, bit_budget: Option<u64>) -> Result<OrbitPrefix> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let budget = bit_budget.unwrap_or(u64::MAX);
    let degree = f.degree().unwrap_or(0) as u64;
    let radius = escape_radius(f);
    let mut terms: Vec<BigInt> = Vec::with_capacity(n_max);
    let mut x = BigInt::zero();
    for n in 1..=n_max {
        let over = || Error::BitBudgetExceeded {
            last_safe_index: n - 1,
            next_index: n,
            budget_bits: budget,
        };
        // Past the escape radius |f(x)| > |x|^(d-1), which bounds the size of
        // the next term without computing it.
        if degree >= 2 && radius.as_ref().is_some_and(|r| x.abs() > *r) {
            let floor_bits = (degree - 1).saturating_mul(x.bits() - 1);
            if floor_bits > budget {
                return Err(over());
            }
        }
        x = f.eval_exact(&x);
        if x.bits() > budget {
            return Err(over());
        }
        terms.push(x.clone());
    }
    Ok(OrbitPrefix { f: f.clone(), terms })
}

/// The orbit of 0 under `x -> f(x) mod m`.
///
/// `tail` counts the terms `f^n(0)`, `n >= 1`, that precede the cycle, and
/// `table[n - 1] = f^n(0) mod m` for `1 <= n <= tail + cycle`. For
/// `n > tail`, the residue at `n` equals the one at
/// `tail + ((n - tail - 1) mod cycle) + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularOrbit {
    modulus: u64,
    tail: usize,
    cycle: usize,
    zero_periodic: bool,
    table: Vec<u64>,
}

impl ModularOrbit {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// True when 0 itself lies on the cycle, i.e. `f^cycle(0) = 0 mod m`.
    pub fn zero_periodic(&self) -> bool {
        self.zero_periodic
    }

    /// `f^n(0) mod m` in O(1).
    pub fn residue(&self, n: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        let (tail, cycle) = (self.tail as u64, self.cycle as u64);
        let idx = if n <= tail + cycle {
            n
        } else {
            tail + (n - tail - 1) % cycle + 1
        };
        self.table[(idx - 1) as usize]
    }

    /// Least `n >= 1` with `f^n(0) = 0 mod m`. Since 0 starts the orbit, it
    /// recurs exactly when it lies on the cycle, and then first at `cycle`.
    pub fn rank_of_apparition(&self) -> Option<u64> {
        self.zero_periodic.then_some(self.cycle as u64)
    }
}

/// Tail and cycle of 0 modulo `m` by Brent's cycle detection, followed by
/// one pass that fills the residue table.
pub fn orbit_mod(f: &IntPolynomial, m: u64) -> Result<ModularOrbit> {
    Ok(orbit_mod_reduced(&f.reduce_mod(m)?))
}

pub fn orbit_mod_reduced(g: &ModPoly) -> ModularOrbit {
    let (mu, lambda) = brent(|x| g.eval(x), 0);
    let tail = mu.saturating_sub(1);
    let mut table = Vec::with_capacity(tail + lambda);
    let mut x = 0;
    for _ in 0..tail + lambda {
        x = g.eval(x);
        table.push(x);
    }
    ModularOrbit {
        modulus: g.modulus(),
        tail,
        cycle: lambda,
        zero_periodic: mu == 0,
        table,
    }
}

/// Brent's algorithm: returns `(mu, lambda)` with `x_mu` the first element
/// of the cycle of the sequence `x_0, step(x_0), ...`.
pub(crate) fn brent(step: impl Fn(u64) -> u64, x0: u64) -> (usize, usize) {
    brent_bounded(step, x0, u64::MAX).expect("unbounded search terminates on a finite set")
}

/// Brent's algorithm giving up after roughly `limit` evaluations per phase.
pub(crate) fn brent_bounded(step: impl Fn(u64) -> u64, x0: u64, limit: u64) -> Option<(usize, usize)> {
    let mut power = 1usize;
    let mut lambda = 1usize;
    let mut tortoise = x0;
    let mut hare = step(x0);
    let mut spent = 1u64;
    while tortoise != hare {
        if spent >= limit {
            return None;
        }
        if power == lambda {
            tortoise = hare;
            power *= 2;
            lambda = 0;
        }
        hare = step(hare);
        lambda += 1;
        spent += 1;
    }
    let mut tortoise = x0;
    let mut hare = x0;
    for _ in 0..lambda {
        hare = step(hare);
    }
    let mut mu = 0;
    while tortoise != hare {
        tortoise = step(tortoise);
        hare = step(hare);
        mu += 1;
    }
    Some((mu, lambda))
}

/// `f^n(0) mod m`.
pub fn iterate_index_mod(f: &IntPolynomial, m: u64, n: u64) -> Result<u64> {
    Ok(iterate_index_reduced(&f.reduce_mod(m)?, n))
}

/// Direct iteration costs `n` steps and a full orbit `tail + cycle`, which
/// can be far larger when the modulus is big. Cycle detection is given a
/// budget of `n` steps and the index is folded into the cycle when it
/// succeeds; otherwise the remaining steps are iterated directly.
pub fn iterate_index_reduced(g: &ModPoly, n: u64) -> u64 {
    let step = |x| g.eval(x);
    if n <= DIRECT_ITERATION_LIMIT {
        return (0..n).fold(0, |x, _| step(x));
    }
    let idx = match brent_bounded(step, 0, n) {
        Some((mu, lambda)) => {
            let (mu, lambda) = (mu as u64, lambda as u64);
            if n < mu {
                n
            } else {
                mu + (n - mu) % lambda
            }
        }
        None => n,
    };
    (0..idx).fold(0, |x, _| step(x))
}

/// Least `n >= 1` with `m | f^n(0)`, or `None` if 0 never recurs mod `m`.
pub fn rank_of_apparition(f: &IntPolynomial, m: u64) -> Result<Option<u64>> {
    Ok(orbit_mod(f, m)?.rank_of_apparition())
}

/// A p-adic valuation known exactly, or only bounded below by a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

impl Valuation {
    /// Whether the valuation is strictly greater than `v`; `None` when the
    /// saturation cap leaves it undetermined.
    pub fn exceeds(self, v: u32) -> Option<bool> {
        match self {
            Valuation::Exact(x) => Some(x > v),
            Valuation::AtLeast(c) if c > v => Some(true),
            Valuation::AtLeast(_) => None,
        }
    }

    pub fn is_positive(self) -> bool {
        self != Valuation::Exact(0)
    }
}

/// `v_p(f^n(0))` read off `f^n(0) mod p^cap`, saturating at `cap`. A zero
/// term (0 periodic over `Z`) is saturated at every cap.
pub fn valuation_of_term(f: &IntPolynomial, p: u64, n: u64, cap: u32) -> Result<Valuation> {
    if cap == 0 {
        return Err(Error::Precondition("valuation cap must be at least 1".into()));
    }
    let modulus = p.checked_pow(cap).ok_or(Error::ModulusOverflow { p, cap })?;
    let r = iterate_index_mod(f, modulus, n)?;
    Ok(if r == 0 {
        Valuation::AtLeast(cap)
    } else {
        Valuation::Exact(valuation_u64(r, p))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroOrbit {
    Wandering,
    /// `f^{tail + period}(0) = f^tail(0)` with both minimal; tail 0 means 0
    /// is periodic.
    Preperiodic { tail: usize, period: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassificationMethod {
    /// Closed form for `x^d + x^e + c`, `d > e >= 2`.
    TrinomialClosedForm,
    /// Exact repeat found while iterating.
    RepeatFound,
    /// An iterate passed the escape radius beyond which `|f^n(0)|` provably
    /// increases forever.
    EscapeRadius,
    /// Growth heuristic: large and strictly increasing for several steps.
    /// Not a proof.
    GrowthHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroClassification {
    pub orbit: ZeroOrbit,
    pub method: ClassificationMethod,
}

impl ZeroClassification {
    pub fn is_wandering(&self) -> bool {
        self.orbit == ZeroOrbit::Wandering
    }

    /// False only for the growth heuristic.
    pub fn is_certain(&self) -> bool {
        self.method != ClassificationMethod::GrowthHeuristic
    }
}

/// Iteration budget for [`classify_zero`] on non-trinomials.
pub const CLASSIFY_STEPS: usize = 64;

/// Wandering or preperiodic. Exact for trinomials `x^d + x^e + c`; for any
/// other `f`, iterates exactly with repeat detection.
pub fn classify_zero(f: &IntPolynomial) -> Result<ZeroClassification> {
    if let Some((d, e, c)) = f.as_trinomial() {
        return Ok(classify_trinomial(d, e, &c));
    }
    classify_by_iteration(f, CLASSIFY_STEPS, DEFAULT_BIT_BUDGET)
}

fn classify_trinomial(d: usize, e: usize, c: &BigInt) -> ZeroClassification {
    let orbit = if c.is_zero() {
        ZeroOrbit::Preperiodic { tail: 0, period: 1 }
    } else if *c == -BigInt::one() && (d % 2 == 0 || e % 2 == 0) {
        // 0 -> -1 -> -1 when exactly one exponent is even;
        // 0 -> -1 -> 1 -> 1 when both are.
        let tail = if d % 2 == 0 && e % 2 == 0 { 2 } else { 1 };
        ZeroOrbit::Preperiodic { tail, period: 1 }
    } else {
        ZeroOrbit::Wandering
    };
    ZeroClassification {
        orbit,
        method: ClassificationMethod::TrinomialClosedForm,
    }
}

/// Radius beyond which `|f(x)| > |x|` holds and is inherited by `f(x)`.
fn escape_radius(f: &IntPolynomial) -> Option<BigInt> {
    let d = f.degree()?;
    let lead = f.coeff(d).abs();
    let lower: BigInt = f.coeffs()[..d].iter().map(|c| c.abs()).sum();
    match d {
        0 => None,
        // |a x + b| >= 2|x| - |b| > |x| once |x| > |b|
        1 if lead >= BigInt::from(2) => Some(lower),
        1 => None,
        // |f(x)| >= |x|^(d-1) (|x| - S) > |x|^(d-1) once |x| > S + 1
        _ => Some(lower + 1),
    }
}

fn classify_by_iteration(f: &IntPolynomial, steps: usize, bit_budget: u64) -> Result<ZeroClassification> {
    let radius = escape_radius(f);
    let growth_floor = f.height() * 2;
    let translation = f.degree() == Some(1) && f.coeff(1).is_one() && !f.constant_term().is_zero();
    if translation {
        return Ok(ZeroClassification {
            orbit: ZeroOrbit::Wandering,
            method: ClassificationMethod::EscapeRadius,
        });
    }
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut x = BigInt::zero();
    seen.insert(x.clone(), 0);
    let mut streak = 0;
    for n in 1..=steps {
        let next = f.eval_exact(&x);
        if next.bits() > bit_budget {
            break;
        }
        if let Some(&first) = seen.get(&next) {
            return Ok(ZeroClassification {
                orbit: ZeroOrbit::Preperiodic {
                    tail: first,
                    period: n - first,
                },
                method: ClassificationMethod::RepeatFound,
            });
        }
        let (abs_next, abs_prev) = (next.abs(), x.abs());
        if radius.as_ref().is_some_and(|r| abs_next > *r) {
            return Ok(ZeroClassification {
                orbit: ZeroOrbit::Wandering,
                method: ClassificationMethod::EscapeRadius,
            });
        }
        streak = if abs_next > abs_prev { streak + 1 } else { 0 };
        if streak >= 3 && abs_next > growth_floor {
            return Ok(ZeroClassification {
                orbit: ZeroOrbit::Wandering,
                method: ClassificationMethod::GrowthHeuristic,
            });
        }
        seen.insert(next.clone(), n);
        x = next;
    }
    Err(Error::Undecided { steps })
}

/// Zero linear coefficient and 0 wandering: the sufficient condition under
/// which the orbit of 0 is a rigid divisibility sequence.
pub fn has_rigidity_witness(f: &IntPolynomial) -> bool {
    f.linear_coefficient().is_zero() && classify_zero(f).is_ok_and(|c| c.is_wandering())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn p(s: &str) -> IntPolynomial {
        parse_poly(s).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn exact_prefixes() {
        let o = orbit_exact(&p("x^3+x^2+1"), 4, None).unwrap();
        assert_eq!(o.terms(), ints(&[1, 3, 37, 52023]).as_slice());
        assert!(o.is_consistent());
        assert_eq!(orbit_exact(&p("x^3+x^2-1"), 3, None).unwrap().terms(), ints(&[-1, -1, -1]).as_slice());
        assert_eq!(orbit_exact(&p("x^13+x^3+5"), 1, None).unwrap().terms(), ints(&[5]).as_slice());
        assert_eq!(orbit_exact(&p("x^3+x^2+2"), 3, None).unwrap().term(3), Some(&BigInt::from(2942)));
    }

    #[test]
    fn bit_budget_reports_last_safe_index() {
        // terms: 1, 3, 37, 52023 (16 bits), then ~47 bits
        let err = orbit_exact(&p("x^3+x^2+1"), 10, Some(20)).unwrap_err();
        assert_eq!(
            err,
            Error::BitBudgetExceeded { last_safe_index: 4, next_index: 5, budget_bits: 20 }
        );
        assert!(orbit_exact(&p("x^3+x^2+1"), 0, None).is_err());
    }

    #[test]
    fn modular_orbits() {
        let o = orbit_mod(&p("x^3+x^2+1"), 2).unwrap();
        assert_eq!((o.tail(), o.cycle(), o.table()), (0, 1, &[1u64][..]));
        assert!(!o.zero_periodic());
        let one = orbit_mod(&p("x^3+x^2+1"), 1).unwrap();
        assert_eq!((one.tail(), one.cycle(), one.table()), (0, 1, &[0u64][..]));
        let g = orbit_mod(&p("x^13+x^3+5"), 31).unwrap();
        assert!(g.zero_periodic());
        assert_eq!(g.cycle(), 31);
        assert_eq!(g.residue(31), 0);
        assert_eq!(orbit_mod(&p("x"), 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn indexed_residues() {
        assert_eq!(iterate_index_mod(&p("x^13+x^3+5"), 31, 31).unwrap(), 0);
        assert_eq!(iterate_index_mod(&p("x^5+x+3"), 1, 1000).unwrap(), 0);
        assert_eq!(iterate_index_mod(&p("x^3+x^2+1"), 2, 5).unwrap(), 1);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_of_apparition(&p("x^3+x^2+1"), 3).unwrap(), Some(2));
        assert_eq!(rank_of_apparition(&p("x^13+x^3+5"), 5).unwrap(), Some(1));
        assert_eq!(rank_of_apparition(&p("x^13+x^3+5"), 31).unwrap(), Some(31));
        assert_eq!(rank_of_apparition(&p("x^3+x^2+1"), 2).unwrap(), None);
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation_of_term(&p("x^3+x^2+2"), 2, 3, 4).unwrap(), Valuation::Exact(1));
        assert_eq!(valuation_of_term(&p("x^13+x^3+5"), 5, 7, 3).unwrap(), Valuation::Exact(1));
        assert_eq!(valuation_of_term(&p("x^3+x^2+1"), 2, 4, 5).unwrap(), Valuation::Exact(0));
        assert_eq!(valuation_of_term(&p("x^2"), 7, 3, 2).unwrap(), Valuation::AtLeast(2));
        assert_eq!(valuation_of_term(&p("x^2+1"), 1_000_003, 3, 4), Err(Error::ModulusOverflow { p: 1_000_003, cap: 4 }));
        assert_eq!(Valuation::AtLeast(2).exceeds(1), Some(true));
        assert_eq!(Valuation::AtLeast(2).exceeds(2), None);
        assert_eq!(Valuation::Exact(1).exceeds(1), Some(false));
    }

    #[test]
    fn trinomial_classification() {
        let c = classify_zero(&p("x^4+x^2")).unwrap();
        assert_eq!(c.orbit, ZeroOrbit::Preperiodic { tail: 0, period: 1 });
        assert_eq!(
            classify_zero(&p("x^4+x^2-1")).unwrap().orbit,
            ZeroOrbit::Preperiodic { tail: 2, period: 1 }
        );
        assert_eq!(
            classify_zero(&p("x^3+x^2-1")).unwrap().orbit,
            ZeroOrbit::Preperiodic { tail: 1, period: 1 }
        );
        assert!(classify_zero(&p("x^13+x^3+5")).unwrap().is_wandering());
        assert!(classify_zero(&p("x^5+x^3-1")).unwrap().is_wandering());
    }

    #[test]
    fn closed_form_matches_iteration() {
        for d in 3..=8 {
            for e in 2..d {
                for c in -4..=4 {
                    let f = IntPolynomial::trinomial(d, e, c);
                    let closed = classify_zero(&f).unwrap().orbit;
                    let iterated = classify_by_iteration(&f, CLASSIFY_STEPS, DEFAULT_BIT_BUDGET).unwrap();
                    assert!(iterated.is_certain());
                    assert_eq!(closed, iterated.orbit, "d={d} e={e} c={c}");
                }
            }
        }
    }

    #[test]
    fn general_classification() {
        assert_eq!(classify_zero(&p("-x+3")).unwrap().orbit, ZeroOrbit::Preperiodic { tail: 0, period: 2 });
        assert_eq!(classify_zero(&p("x")).unwrap().orbit, ZeroOrbit::Preperiodic { tail: 0, period: 1 });
        assert_eq!(classify_zero(&p("7")).unwrap().orbit, ZeroOrbit::Preperiodic { tail: 1, period: 1 });
        assert!(classify_zero(&p("x^3+x+1")).unwrap().is_wandering());
        assert!(classify_zero(&p("2*x+2")).unwrap().is_wandering());
        assert!(classify_zero(&p("x+5")).unwrap().is_wandering());
        // x^2 - 2: 0 -> -2 -> 2 -> 2
        assert_eq!(classify_zero(&p("x^2-2")).unwrap().orbit, ZeroOrbit::Preperiodic { tail: 2, period: 1 });
        assert!(has_rigidity_witness(&p("x^13+x^3+5")));
        assert!(!has_rigidity_witness(&p("x^3+x+2")));
        assert!(!has_rigidity_witness(&p("x^4+x^2")));
    }

    #[test]
    fn increasing_for_large_constant() {
        for d in 3..=6 {
            for e in 2..d {
                for c in (-6..=6i64).filter(|c| c.abs() > 1) {
                    let o = orbit_exact(&IntPolynomial::trinomial(d, e, c), 5, Some(DEFAULT_BIT_BUDGET)).unwrap();
                    let abs = o.abs_terms();
                    assert!(abs.windows(2).all(|w| w[0] < w[1]), "d={d} e={e} c={c}");
                }
            }
        }
    }

    #[test]
    fn divisibility_sequence_on_exact_prefixes() {
        for f in ["x^3+x^2+1", "x^3+x+2", "x^4+x+3", "x^2+2*x+1", "x^3-3*x^2+2"] {
            let o = orbit_exact(&p(f), 8, None).unwrap();
            for m in 1..=8 {
                for n in (m..=8).step_by(m) {
                    let (am, an) = (o.term(m).unwrap(), o.term(n).unwrap());
                    assert!(am.is_zero() && an.is_zero() || !am.is_zero() && an.is_multiple_of(am), "{f}: a_{m} | a_{n}");
                }
            }
        }
    }

    fn arb_small_poly() -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-50i64..=50, 1..=5).prop_map(|c| IntPolynomial::from_i64(&c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn orbit_residues_match_eval_chain(f in arb_small_poly(), m in 1u64..=10_000) {
            let orbit = orbit_mod(&f, m).unwrap();
            prop_assert!(orbit.tail() + orbit.cycle() <= m as usize);
            let g = f.reduce_mod(m).unwrap();
            let mut x = 0;
            for n in 1..=1000u64 {
                x = g.eval(x);
                prop_assert_eq!(orbit.residue(n), x);
                if n <= 70 || n % 97 == 0 {
                    prop_assert_eq!(iterate_index_mod(&f, m, n).unwrap(), x);
                }
            }
        }
    }
}
