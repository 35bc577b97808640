//! Acceptance gate. Runs every check, prints one PASS/FAIL line for each
//! and exits nonzero if any failed.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::One;

use idxdiv::arith::{divisors, is_prime, pow_mod};
use idxdiv::divgraph::{build_graph, open_question_scan, reconstruct_from_set};
use idxdiv::divset::{div_set_window, in_div_set, rigidity_constancy};
use idxdiv::orbit::{classify_zero, has_rigidity_witness};
use idxdiv::permlocal::{circulant_bruteforce, circulant_constant, density_scan, prime_in_divset_via_period, restriction_predicates};
use idxdiv::primes::prime_sieve;
use idxdiv::zsigmondy::{primitive_split_prefix, zsigmondy_window};
use idxdiv::{parse_poly, IntPolynomial};

const BIT_BUDGET: u64 = 1 << 20;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed <= limit,
        format!("{detail}, {:.2?}", elapsed),
        format!("{detail}, but took {:.2?} (limit {:.0?})", elapsed, limit),
    )
}

fn survey() -> Outcome {
    let start = Instant::now();
    let mut family = Vec::new();
    for c in 1..=100 {
        family.push(IntPolynomial::from_i64(&[c, 1, 0, 1]));
        family.push(IntPolynomial::from_i64(&[c, 1, 0, 0, 1]));
    }
    let report = open_question_scan(&family, 5000).map_err(|e| e.to_string())?;
    let edges: usize = report.entries.iter().map(|e| e.edges).sum();
    let bad = report.counterexample_count();
    if bad > 0 {
        let first = report.entries.iter().find(|e| !e.counterexamples.is_empty()).unwrap();
        return Err(format!("{bad} untyped edges, first in {}: {:?}", first.f, first.counterexamples[0]));
    }
    within(
        start.elapsed(),
        Duration::from_secs(600),
        format!("200 polynomials, {edges} edges, all type 1 or type 2"),
    )
}

fn explicit_primes() -> Outcome {
    let mut lines = Vec::new();
    for (f, q) in [("x^13+x^3+5", 31), ("x^107+x^3+60", 157), ("x^77+x^3+74", 223)] {
        let start = Instant::now();
        let member = in_div_set(&parse_poly(f).unwrap(), q);
        let t = start.elapsed();
        if !member {
            return Err(format!("{q} not found in D({f})"));
        }
        if t > Duration::from_secs(1) {
            return Err(format!("{q} in D({f}) took {t:.2?}"));
        }
        lines.push(format!("{q} in D({f})"));
    }
    Ok(lines.join(", "))
}

fn finiteness() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for d in 4..=7usize {
        for e in 3..d {
            for c in [1i64, -1] {
                let f = IntPolynomial::trinomial(d, e, c);
                if !classify_zero(&f).map_err(|e| e.to_string())?.is_wandering() {
                    continue;
                }
                let w = div_set_window(&f, 2000);
                if w.members != [1] {
                    failures.push(format!("D({f}) = {:?}", w.members));
                }
                checked += 1;
            }
            for m in 2..=10i64 {
                for c in [m, -m] {
                    let f = IntPolynomial::trinomial(d, e, c);
                    let w = div_set_window(&f, 2000);
                    if let Some(q) = divisors(m as u64).into_iter().find(|&q| !w.contains(q)) {
                        failures.push(format!("{f} lacks divisor {q}"));
                    } else if !w.members.iter().any(|&n| n > m as u64) {
                        failures.push(format!("{f} has {:?}", w.members));
                    }
                    checked += 1;
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!("{checked} trinomials checked"),
        format!(
            "{} of {checked} trinomials fail at N = 2000: {}",
            failures.len(),
            failures.join("; ")
        ),
    )
}

fn rigid_samples() -> Vec<IntPolynomial> {
    [
        "x^3+x^2+2",
        "x^5+x^3+6",
        "x^13+x^3+5",
        "x^4+x^2+12",
        "x^5+x^2-10",
        "x^3+x^2-30",
        "x^7+x^5+3",
        "2*x^3-x^2+6",
        "x^4+3*x^2+20",
        "x^6+x^3+x^2-42",
    ]
    .iter()
    .map(|s| parse_poly(s).unwrap())
    .collect()
}

fn vertices_match() -> Outcome {
    for f in rigid_samples() {
        let g = build_graph(&f, 2000).map_err(|e| e.to_string())?;
        let w = div_set_window(&f, 2000);
        if g.vertices != w.members {
            return Err(format!("{f}: graph has {} vertices, window {} members", g.vertices.len(), w.members.len()));
        }
    }
    Ok("10 samples, vertex sets equal at N = 2000".into())
}

fn reconstruction() -> Outcome {
    let mut total = 0;
    for f in rigid_samples() {
        let g = build_graph(&f, 2000).map_err(|e| e.to_string())?;
        let pairs = reconstruct_from_set(&div_set_window(&f, 2000));
        if g.edge_pairs() != pairs {
            return Err(format!("{f}: edge sets differ"));
        }
        total += pairs.len();
    }
    Ok(format!("10 samples, {total} edges, edge sets equal"))
}

fn zsigmondy() -> Outcome {
    let mut samples = Vec::new();
    for d in 3..=5usize {
        for e in 2..d {
            for c in [1i64, -1, 2, -3, 5, 7] {
                let f = IntPolynomial::trinomial(d, e, c);
                if has_rigidity_witness(&f) {
                    samples.push((f, c));
                }
            }
        }
    }
    if samples.len() < 20 {
        return Err(format!("only {} wandering samples", samples.len()));
    }
    let stride = samples.len() as f64 / 20.0;
    let samples: Vec<_> = (0..20).map(|i| samples[(i as f64 * stride) as usize].clone()).collect();
    for (f, c) in &samples {
        let splits = primitive_split_prefix(f, 8, Some(BIT_BUDGET)).map_err(|e| format!("{f}: {e}"))?;
        if let Some(s) = splits.iter().find(|s| s.n >= 2 && s.primitive.is_one()) {
            return Err(format!("{f}: no primitive part at n = {}", s.n));
        }
        let z = zsigmondy_window(f, 8, Some(BIT_BUDGET)).map_err(|e| e.to_string())?;
        let expected: Vec<usize> = if c.abs() == 1 { vec![1] } else { vec![] };
        if z != expected {
            return Err(format!("{f}: Zsigmondy window {z:?}"));
        }
    }
    Ok(format!("{} trinomials, n <= 8", samples.len()))
}

fn circulant() -> Outcome {
    let mut cases = 0;
    for q in prime_sieve(31) {
        for d in 2..q {
            for e in 1..d {
                let closed = circulant_constant(d, e, q).map_err(|e| e.to_string())?;
                let closed = u64::try_from(((closed % q) + q) % q).unwrap();
                let brute = circulant_bruteforce(d, e, q).map_err(|e| e.to_string())?;
                if closed != brute {
                    return Err(format!("d={d} e={e} p={q}: closed form {closed}, determinant {brute}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (d, e, p) triples agree"))
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let primes = prime_sieve(200);
    let odd: Vec<u64> = (1..=13).step_by(2).collect();
    let (mut fired, mut checked) = (0u64, 0u64);
    for &d in &odd {
        for &e in odd.iter().filter(|&&e| e < d) {
            for c in -20..=20i64 {
                let f = IntPolynomial::trinomial(d as usize, e as usize, c);
                for &q in &primes {
                    if c % q as i64 == 0 {
                        continue;
                    }
                    checked += 1;
                    let r = restriction_predicates(d, e, c, q).map_err(|e| e.to_string())?;
                    if !r.excluded {
                        continue;
                    }
                    fired += 1;
                    if prime_in_divset_via_period(&f, q).map_err(|e| e.to_string())? {
                        return Err(format!("{:?} fired for {f} at p = {q}, but p is in D", r.fired));
                    }
                }
            }
        }
    }
    within(
        start.elapsed(),
        Duration::from_secs(300),
        format!("{fired} exclusions over {checked} (f, p) pairs, no violations"),
    )
}

fn rigidity() -> Outcome {
    let mut instances = 0;
    for f in rigid_samples() {
        let t = rigidity_constancy(&f, 200).map_err(|e| e.to_string())?;
        if let Some(w) = t.counterexamples.first() {
            return Err(format!("{f}: [p, rank, k, v_base, v_k] = {w:?}"));
        }
        instances += t.instances;
    }
    Ok(format!("{instances} (p, k) instances constant"))
}

fn density() -> Outcome {
    let start = Instant::now();
    let s = density_scan(1_000_000);
    let target = 1.0 / 24.0;
    let rel = (s.fraction - target).abs() / target;
    let detail = format!("{}/{} = {:.6}, {:.1}% from 1/24", s.qualifying, s.primes, s.fraction, rel * 100.0);
    if rel > 0.20 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(120), detail)
}

fn fermat() -> Outcome {
    let f = parse_poly("2*x+2").unwrap();
    let w = div_set_window(&f, 5000);
    let odd_members: BTreeSet<u64> = w.members.iter().copied().filter(|n| n % 2 == 1).collect();
    let expected: BTreeSet<u64> = (1..=5000u64)
        .step_by(2)
        .filter(|&n| n == 1 || pow_mod(2, n - 1, n) == 1)
        .collect();
    let psp: Vec<u64> = expected.iter().copied().filter(|&n| n > 1 && !is_prime(n)).collect();
    for n in [341, 561, 645] {
        if !psp.contains(&n) {
            return Err(format!("reference set lacks pseudoprime {n}"));
        }
    }
    let missing = expected.difference(&odd_members).count();
    let extra: Vec<u64> = odd_members.difference(&expected).copied().collect();
    check(
        missing == 0 && extra.is_empty(),
        format!("{} odd members match primes and {} pseudoprimes", odd_members.len(), psp.len()),
        format!(
            "odd members {:?}; expected {} values (primes and {} pseudoprimes), {missing} missing",
            odd_members,
            expected.len(),
            psp.len()
        ),
    )
}

fn main() -> ExitCode {
    let checks: [Check; 11] = [
        ("survey of x^3+x+c and x^4+x+c", survey),
        ("explicit prime memberships", explicit_primes),
        ("finiteness desk check", finiteness),
        ("graph vertices equal the window", vertices_match),
        ("edge reconstruction from the set", reconstruction),
        ("primitive divisors", zsigmondy),
        ("circulant closed form vs determinant", circulant),
        ("restriction predicate soundness", soundness),
        ("valuation rigidity", rigidity),
        ("density of parity-excluded primes", density),
        ("Fermat pseudoprime correspondence", fermat),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in checks.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
