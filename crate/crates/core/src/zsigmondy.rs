//! Primitive parts of orbit terms, Zsigmondy sets, growth bounds and the
//! finiteness verdict for trinomials.
//!
//! For a rigid divisibility sequence `a_n = f^n(0)`, the non-primitive part of
//! `a_n` is `N_n = P_d` multiplied over the proper divisors `d` of `n`, so
//! the primitive parts follow by exact division with no factoring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::divisors;
use crate::divset::div_set_window;
use crate::error::{Error, Result};
use crate::orbit::{classify_zero, has_rigidity_witness, orbit_exact, ZeroOrbit};
use crate::poly::IntPolynomial;

/// Default prefix length for primitive splits.
pub const DEFAULT_N_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveSplit {
    pub n: usize,
    #[serde(with = "decimal")]
    pub primitive: BigInt,
    #[serde(with = "decimal")]
    pub nonprimitive: BigInt,
}

/// Big integers as decimal strings in records.
mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Splits `|f^n(0)|` for `1 <= n <= n_max`. Requires a zero linear
/// coefficient and 0 wandering.
pub fn primitive_split_prefix(f: &IntPolynomial, n_max: usize, bit_budget: Option<u64>) -> Result<Vec<PrimitiveSplit>> {
    if !has_rigidity_witness(f) {
        return Err(Error::Precondition(format!(
            "{f} needs a zero linear coefficient and a wandering orbit of 0"
        )));
    }
    let prefix = orbit_exact(f, n_max, bit_budget)?;
    primitive_split_terms(prefix.terms())
}

/// The divisor recursion on an arbitrary sequence `terms[n - 1] = a_n`.
/// Fails with [`Error::NonExactDivision`] at the first `n` where the proper
/// divisors' primitive parts do not divide `|a_n|`.
pub fn primitive_split_terms(terms: &[BigInt]) -> Result<Vec<PrimitiveSplit>> {
    let mut splits: Vec<PrimitiveSplit> = Vec::with_capacity(terms.len());
    for (i, term) in terms.iter().enumerate() {
        let n = i + 1;
        if term.is_zero() {
            return Err(Error::Precondition(format!("term {n} is zero")));
        }
        let nonprimitive: BigInt = divisors(n as u64)
            .into_iter()
            .filter(|&d| d < n as u64)
            .map(|d| &splits[d as usize - 1].primitive)
            .product();
        let (primitive, rem) = term.abs().div_rem(&nonprimitive);
        if !rem.is_zero() {
            return Err(Error::NonExactDivision { n });
        }
        splits.push(PrimitiveSplit { n, primitive, nonprimitive });
    }
    Ok(splits)
}

/// Indices `n <= n_max` whose term has no primitive prime divisor.
pub fn zsigmondy_window(f: &IntPolynomial, n_max: usize, bit_budget: Option<u64>) -> Result<Vec<usize>> {
    Ok(primitive_split_prefix(f, n_max, bit_budget)?
        .into_iter()
        .filter(|s| s.primitive.is_one())
        .map(|s| s.n)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    /// `|a_n| > |a_{n-1}| (|a_{n-1}| - 1)^2`
    pub step_bound: bool,
    /// `log2 |a_n| - log2` of the step bound's right side.
    pub step_margin_bits: f64,
    /// `|a_1 a_2 ... a_{n-1}| < |a_n|`
    pub product_bound: bool,
    pub product_margin_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub f: IntPolynomial,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.step_bound && r.product_bound)
    }
}

/// Checks both growth inequalities for `3 <= n <= n_max` on the exact prefix.
pub fn check_growth(f: &IntPolynomial, n_max: usize, bit_budget: Option<u64>) -> Result<GrowthReport> {
    if f.as_trinomial().is_none() {
        return Err(Error::Precondition(format!("{f} is not a trinomial x^d+x^e+c")));
    }
    if !classify_zero(f)?.is_wandering() {
        return Err(Error::Precondition(format!("0 is preperiodic under {f}")));
    }
    let terms = orbit_exact(f, n_max, bit_budget)?.abs_terms();
    let mut rows = Vec::new();
    let mut product: BigInt = terms.iter().take(2).product();
    for n in 3..=n_max {
        let (prev, cur) = (&terms[n - 2], &terms[n - 1]);
        let pm1 = prev - 1;
        let step_rhs = prev * &pm1 * &pm1;
        rows.push(GrowthRow {
            n,
            step_bound: *cur > step_rhs,
            step_margin_bits: log2(cur) - log2(&step_rhs),
            product_bound: product < *cur,
            product_margin_bits: log2(cur) - log2(&product),
        });
        product *= cur;
    }
    Ok(GrowthReport { f: f.clone(), rows })
}

/// `log2 |x|`, `-inf` for zero.
pub fn log2(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(53);
    let top: BigInt = x.abs() >> shift;
    top.to_f64().expect("at most 53 bits").log2() + shift as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinitenessClass {
    /// `c = ±1` with 0 wandering: `D = {1}`.
    FiniteTrivial,
    /// `|c| >= 2`.
    Infinite,
    /// `c = 0`, or 0 preperiodic.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessEvidence {
    pub bound: u64,
    pub members: Vec<u64>,
    /// Every divisor of `|c|` up to the bound is a member.
    pub contains_divisors_of_c: bool,
    /// Least member larger than `|c|`.
    pub member_exceeding_c: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    pub d: usize,
    pub e: usize,
    pub c: i64,
    pub classification: FinitenessClass,
    pub evidence: FinitenessEvidence,
}

impl FinitenessVerdict {
    /// Whether the window agrees with the classification.
    pub fn window_agrees(&self) -> bool {
        match self.classification {
            FinitenessClass::FiniteTrivial => self.evidence.members == [1],
            FinitenessClass::Infinite => self.evidence.contains_divisors_of_c,
            FinitenessClass::Degenerate => true,
        }
    }
}

/// Classifies `D(x^d + x^e + c)` and gathers window evidence up to `bound`.
pub fn finiteness_verdict(d: usize, e: usize, c: i64, bound: u64) -> Result<FinitenessVerdict> {
    if !(d > e && e >= 2) {
        return Err(Error::Precondition(format!("need d > e >= 2, got d={d}, e={e}")));
    }
    let f = IntPolynomial::trinomial(d, e, c);
    let orbit = classify_zero(&f)?.orbit;
    let classification = match (orbit, c.unsigned_abs()) {
        (ZeroOrbit::Preperiodic { .. }, _) | (_, 0) => FinitenessClass::Degenerate,
        (_, 1) => FinitenessClass::FiniteTrivial,
        _ => FinitenessClass::Infinite,
    };
    let window = div_set_window(&f, bound);
    let abs_c = c.unsigned_abs();
    let contains_divisors_of_c =
        abs_c == 0 || divisors(abs_c).into_iter().filter(|&m| m <= bound).all(|m| window.contains(m));
    let member_exceeding_c = window.members.iter().copied().find(|&m| m > abs_c);
    Ok(FinitenessVerdict {
        d,
        e,
        c,
        classification,
        evidence: FinitenessEvidence {
            bound,
            members: window.members,
            contains_divisors_of_c,
            member_exceeding_c,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn p(s: &str) -> IntPolynomial {
        parse_poly(s).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn split_small_cubic() {
        let s = primitive_split_prefix(&p("x^3+x^2+1"), 4, None).unwrap();
        let prim: Vec<BigInt> = s.iter().map(|x| x.primitive.clone()).collect();
        assert_eq!(prim, big(&[1, 3, 37, 17341]));
        assert_eq!(s[3].nonprimitive, BigInt::from(3));
    }

    #[test]
    fn split_prime_constant() {
        for c in [2i64, 3, 7, -5, 13] {
            let s = primitive_split_prefix(&IntPolynomial::trinomial(4, 3, c), 1, None).unwrap();
            assert_eq!(s[0].primitive, BigInt::from(c.abs()));
        }
        let s = primitive_split_prefix(&p("x^13+x^3+5"), 2, None).unwrap();
        assert_eq!(s[0].primitive, BigInt::from(5));
        assert_eq!(s[1].nonprimitive, BigInt::from(5));
    }

    #[test]
    fn recursion_product_identity() {
        for f in ["x^3+x^2+1", "x^3+x^2+2", "x^5+x^3-1", "x^4+x^2+6", "x^5+x^2-3"] {
            let f = p(f);
            let terms = orbit_exact(&f, 7, None).unwrap().abs_terms();
            let s = primitive_split_prefix(&f, 7, None).unwrap();
            for n in 1..=7usize {
                let prod: BigInt = divisors(n as u64).iter().map(|&d| &s[d as usize - 1].primitive).product();
                assert_eq!(prod, terms[n - 1]);
                assert_eq!(&s[n - 1].primitive * &s[n - 1].nonprimitive, terms[n - 1]);
            }
        }
    }

    fn small_primes(x: u64) -> Vec<u64> {
        crate::arith::factorize(x).into_iter().map(|(q, _)| q).collect()
    }

    #[test]
    fn factor_cross_check_small_terms() {
        for f in ["x^3+x^2+1", "x^3+x^2+2", "x^3+x^2-3", "x^4+x^3+2"] {
            let f = p(f);
            let terms = orbit_exact(&f, 4, None).unwrap().abs_terms();
            let s = primitive_split_prefix(&f, 4, None).unwrap();
            for split in &s {
                let earlier = &terms[..split.n - 1];
                let Some(pn) = split.primitive.to_u64() else { continue };
                for q in small_primes(pn) {
                    assert!(earlier.iter().all(|t| !(t % q).is_zero()), "{f} n={} q={q}", split.n);
                }
                let nn = split.nonprimitive.to_u64().unwrap();
                for q in small_primes(nn) {
                    assert!(earlier.iter().any(|t| (t % q).is_zero()), "{f} n={} q={q}", split.n);
                }
            }
        }
    }

    #[test]
    fn non_exact_division_reported() {
        assert_eq!(
            primitive_split_terms(&big(&[1, 4, 2, 4, 1, 4])),
            Err(Error::NonExactDivision { n: 6 })
        );
        assert!(primitive_split_terms(&big(&[1, 0])).is_err());
    }

    #[test]
    fn gated_on_rigidity_witness() {
        assert!(matches!(
            primitive_split_prefix(&p("x^3+x+1"), 3, None),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            primitive_split_prefix(&p("x^3+x^2-1"), 3, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zsigmondy_windows() {
        assert_eq!(zsigmondy_window(&p("x^3+x^2+1"), 6, None).unwrap(), vec![1]);
        assert_eq!(zsigmondy_window(&p("x^5+x^3-1"), 6, None).unwrap(), vec![1]);
        assert!(zsigmondy_window(&p("x^13+x^3+5"), 5, None).unwrap().is_empty());
    }

    #[test]
    fn budget_exceeded() {
        let r = primitive_split_prefix(&p("x^13+x^3+5"), 8, Some(1 << 16));
        assert!(matches!(r, Err(Error::BitBudgetExceeded { .. })));
    }

    #[test]
    fn growth() {
        let r = check_growth(&p("x^3+x^2+1"), 4, None).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.rows.len(), 2);
        let last = &r.rows[1];
        assert!(last.step_bound && last.product_bound);
        assert!((last.step_margin_bits - (52023f64 / 47952f64).log2()).abs() < 1e-9);
        assert!((last.product_margin_bits - (52023f64 / 111f64).log2()).abs() < 1e-9);
        assert!(check_growth(&p("x^13+x^3+5"), 3, None).unwrap().all_hold());
        for (d, e, c) in [(3, 2, 2), (5, 3, -1), (4, 3, -7), (6, 2, 3)] {
            assert!(check_growth(&IntPolynomial::trinomial(d, e, c), 6, None).unwrap().all_hold());
        }
        assert!(check_growth(&p("x^3+x+1"), 4, None).is_err());
        assert!(check_growth(&p("x^4+x^2-1"), 4, None).is_err());
    }

    #[test]
    fn split_record_round_trip() {
        let s = primitive_split_prefix(&p("x^3+x^2+1"), 4, None).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"primitive\":\"17341\""));
        let back: Vec<PrimitiveSplit> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn log2_precision() {
        assert_eq!(log2(&BigInt::from(1024)), 10.0);
        assert!((log2(&(BigInt::one() << 300u32)) - 300.0).abs() < 1e-12);
        assert_eq!(log2(&BigInt::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn verdicts() {
        for c in [1, -1] {
            let v = finiteness_verdict(5, 3, c, 2000).unwrap();
            assert_eq!(v.classification, FinitenessClass::FiniteTrivial);
            assert_eq!(v.evidence.members, vec![1]);
            assert!(v.window_agrees());
        }
        let v = finiteness_verdict(13, 3, 5, 200).unwrap();
        assert_eq!(v.classification, FinitenessClass::Infinite);
        for m in [1, 5, 31, 155] {
            assert!(v.evidence.members.contains(&m));
        }
        assert_eq!(v.evidence.member_exceeding_c, Some(31));
        assert!(v.window_agrees());
        assert_eq!(finiteness_verdict(4, 2, -1, 50).unwrap().classification, FinitenessClass::Degenerate);
        assert_eq!(finiteness_verdict(4, 3, 0, 50).unwrap().classification, FinitenessClass::Degenerate);
        assert!(finiteness_verdict(3, 3, 1, 50).is_err());
    }
}
