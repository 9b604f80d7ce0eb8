//! Fixed inputs shared by the benchmarks.

use tensorpure::enumerate::{enumerate_extensions, enumerate_modules};
use tensorpure::{Conflation, FiniteModule, RingSpec};

pub fn ring(n: u64) -> RingSpec {
    RingSpec::new(n).expect("valid modulus")
}

pub fn module(n: u64, factors: &[u64]) -> FiniteModule {
    FiniteModule::new(ring(n), factors.to_vec()).expect("valid factors")
}

/// Every enumerated conflation with both end terms of order at most
/// `max_end` over `Z/n`.
pub fn conflations(n: u64, max_end: u128) -> Vec<Conflation> {
    let ends = enumerate_modules(ring(n), max_end);
    let mut out = Vec::new();
    for k in &ends {
        for f in &ends {
            out.extend(enumerate_extensions(k, f));
        }
    }
    out
}

/// A dense integer matrix with entries in `[0, n)`, deterministic in its
/// shape.
pub fn matrix(n: u64, rows: usize, cols: usize) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| ((i * 7 + j * 13 + i * j * 5 + 3) as u64) % n)
                .collect()
        })
        .collect()
}
