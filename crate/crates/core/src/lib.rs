//! Index divisibility sets `D(f) = {n : n | f^n(0)}` of integer polynomials.
//!
//! The crate computes windows of `D(f)`, builds and classifies index
//! divisibility graphs, splits orbit terms into primitive and non-primitive
//! parts, and evaluates the local (mod p) criteria that admit or exclude
//! primes from `D` for trinomials `x^d + x^e + c`.
//!
//! ```
//! use idxdiv::{divset::div_set_window, parse_poly};
//!
//! let f = parse_poly("x^13+x^3+5").unwrap();
//! assert_eq!(div_set_window(&f, 200).members, vec![1, 5, 31, 155]);
//! ```

pub mod arith;
pub mod divgraph;
pub mod divset;
pub mod error;
pub mod orbit;
pub mod permlocal;
pub mod poly;
pub mod primes;
pub mod zsigmondy;

pub use error::{Error, Result};
pub use poly::{parse_poly, IntPolynomial};
