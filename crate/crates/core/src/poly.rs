//! Integer polynomials: dense representation, the text grammar, and exact
//! and modular evaluation.
//!
//! The grammar is a sum of signed monomials `k`, `x`, `x^e` and `k*x^e`
//! (also `k*x`), e.g. `x^13+x^3+5` or `-2*x^4 + x - 7`. Whitespace between
//! tokens is ignored. Like terms are summed. [`parse_poly_with_param`] also
//! accepts a named integer parameter wherever a coefficient may appear, which
//! is how polynomial families such as `x^3+x+c` are written.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod};
use crate::error::{Error, Result};

/// Largest exponent the parser accepts. Storage is dense.
pub const MAX_DEGREE: usize = 1 << 20;

/// A polynomial in `Z[x]`; `coeffs[i]` is the coefficient of `x^i`.
///
/// Always canonical: no trailing zero coefficients, and the zero polynomial
/// has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x^d + x^e + c`. Exponents may coincide or be zero; terms are summed.
    pub fn trinomial(d: usize, e: usize, c: i64) -> Self {
        let mut coeffs = vec![BigInt::zero(); d.max(e) + 1];
        coeffs[d] += 1;
        coeffs[e] += 1;
        coeffs[0] += c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    pub fn linear_coefficient(&self) -> BigInt {
        self.coeff(1)
    }

    /// True when only even powers of `x` appear, i.e. `f(-x) = f(x)`.
    pub fn is_even_function(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i % 2 == 0 || c.is_zero())
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Recognizes `x^d + x^e + c` with `d > e >= 2`, returning `(d, e, c)`.
    pub fn as_trinomial(&self) -> Option<(usize, usize, BigInt)> {
        let d = self.degree()?;
        let mut middle = None;
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            if !c.is_one() {
                return None;
            }
            if i != d {
                if middle.is_some() {
                    return None;
                }
                middle = Some(i);
            }
        }
        let e = middle?;
        (e >= 2).then(|| (d, e, self.constant_term()))
    }

    /// Exact value `f(x)` by Horner's rule.
    pub fn eval_exact(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `f(x) mod m` in `[0, m)`.
    pub fn eval_mod(&self, x: u64, m: u64) -> Result<u64> {
        Ok(self.reduce_mod(m)?.eval(x % m))
    }

    /// Coefficients reduced into `[0, m)` for repeated modular evaluation.
    pub fn reduce_mod(&self, m: u64) -> Result<ModPoly> {
        if m == 0 {
            return Err(Error::ZeroModulus);
        }
        let big_m = BigInt::from(m);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&big_m).to_u64().expect("residue fits modulus"))
            .collect();
        Ok(ModPoly { coeffs, modulus: m })
    }
}

/// A polynomial with coefficients reduced modulo a fixed `u64` modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    modulus: u64,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `f(x) mod m` for `x` already in `[0, m)`.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = add_mod(mul_mod(acc, x, m), c, m);
        }
        acc
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.sign() == Sign::Minus { "-" } else { "+" };
            if !first || sign == "-" {
                f.write_str(sign)?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

impl TryFrom<String> for IntPolynomial {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        parse_poly(&s)
    }
}

impl From<IntPolynomial> for String {
    fn from(p: IntPolynomial) -> String {
        p.to_string()
    }
}

pub fn parse_poly(text: &str) -> Result<IntPolynomial> {
    Parser::new(text, None).parse()
}

/// Parse with `name` standing for the integer `value` in coefficient
/// position (`x^3+x+c`, `-c`, `c*x^2`).
pub fn parse_poly_with_param(text: &str, name: char, value: &BigInt) -> Result<IntPolynomial> {
    if name == 'x' {
        return Err(Error::Precondition("parameter name cannot be 'x'".into()));
    }
    Parser::new(text, Some((name, value))).parse()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    param: Option<(char, &'a BigInt)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, param: Option<(char, &'a BigInt)>) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            param,
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<IntPolynomial> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut first = true;
        while let Some(b) = self.peek() {
            let negative = match b {
                b'+' | b'-' => {
                    self.pos += 1;
                    b == b'-'
                }
                _ if first => false,
                _ => return self.err("expected '+' or '-'"),
            };
            first = false;
            let (mut coeff, exp) = self.term()?;
            if negative {
                coeff = -coeff;
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += coeff;
        }
        Ok(IntPolynomial::new(coeffs))
    }

    /// One unsigned monomial: `k`, `x`, `x^e`, `k*x`, `k*x^e`.
    fn term(&mut self) -> Result<(BigInt, usize)> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((BigInt::one(), self.exponent()?))
            }
            Some(b) if b.is_ascii_digit() || self.is_param(b) => {
                let k = self.coefficient()?;
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if self.peek() != Some(b'x') {
                        return self.err("expected 'x' after '*'");
                    }
                    self.pos += 1;
                    Ok((k, self.exponent()?))
                } else {
                    Ok((k, 0))
                }
            }
            Some(_) => self.err("expected a coefficient or 'x'"),
            None => self.err("unexpected end of input"),
        }
    }

    fn is_param(&self, b: u8) -> bool {
        self.param.is_some_and(|(name, _)| name as u32 == b as u32)
    }

    fn coefficient(&mut self) -> Result<BigInt> {
        let b = self.bytes[self.pos];
        if self.is_param(b) {
            self.pos += 1;
            return Ok(self.param.expect("checked").1.clone());
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("nonempty digit run"))
    }

    /// Optional `^e` after an `x`; absent means exponent 1.
    fn exponent(&mut self) -> Result<usize> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a decimal exponent after '^'");
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        match digits.parse::<usize>() {
            Ok(e) if e <= MAX_DEGREE => Ok(e),
            _ => Err(Error::ExponentOverflow { pos: start }),
        }
    }
}
