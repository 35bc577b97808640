//! Sieve of Eratosthenes, plain below [`SEGMENT_THRESHOLD`] and segmented
//! above it.

/// Bounds above this are sieved in segments of this many integers.
pub const SEGMENT_THRESHOLD: u64 = 10_000_000;

/// All primes `<= bound`, ascending.
pub fn prime_sieve(bound: u64) -> Vec<u64> {
    if bound <= SEGMENT_THRESHOLD {
        simple_sieve(bound)
    } else {
        segmented_sieve(bound, SEGMENT_THRESHOLD)
    }
}

fn simple_sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Segmented sieve with a caller-chosen segment length.
pub fn segmented_sieve(bound: u64, segment: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let segment = segment.max(1);
    let root = (bound as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);
    let mut out = Vec::new();
    let mut lo = 2u64;
    while lo <= bound {
        let hi = lo.saturating_add(segment - 1).min(bound);
        let mut composite = vec![false; (hi - lo + 1) as usize];
        for &p in &base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                composite[(j - lo) as usize] = true;
                j += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    out
}
