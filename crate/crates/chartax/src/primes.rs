//! Segmented smallest-prime-factor sieve and the prime-reciprocal sums
//! every other module consumes.
//!
//! A [`PrimeTable`] is immutable once built and cheap to share; callers
//! never observe a partially built table. Real accumulations over primes
//! use deterministic pairwise summation so repeated runs are bit-identical.

use crate::error::{Error, Result};
use crate::numeric::PairwiseAcc;

/// Default cap on the sieve limit (memory budget: 4 bytes per integer).
pub const DEFAULT_LIMIT_CAP: u64 = 100_000_000;

/// Default segment length for the sieve marking phase.
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 18;

/// Primes, smallest prime factors, and cached logs up to a fixed limit.
#[derive(Debug)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    ln_primes: Vec<f64>,
    spf: Vec<u32>,
}

impl PrimeTable {
    /// Sieve up to `limit` with the default memory cap and segment size.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with(limit, DEFAULT_LIMIT_CAP, DEFAULT_SEGMENT_LEN)
    }

    /// Sieve up to `limit` with an explicit cap and segment length.
    pub fn build_with(limit: u64, cap: u64, segment_len: usize) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!(
                "sieve limit must be >= 2, got {limit}"
            )));
        }
        if limit > cap.min(u64::from(u32::MAX)) {
            return Err(Error::resource(format!(
                "sieve limit {limit} exceeds configured cap {} (spf entries are 32-bit)",
                cap.min(u64::from(u32::MAX))
            )));
        }
        let segment_len = segment_len.max(64);
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();

        // Phase 1: simple sieve over [2, sqrt(limit)].
        let root = (limit as f64).sqrt() as u64 + 1;
        let root = root.min(limit) as usize;
        for p in 2..=root {
            if spf[p] == 0 {
                spf[p] = p as u32;
                primes.push(p as u32);
                let mut m = p * p;
                while m <= root {
                    if spf[m] == 0 {
                        spf[m] = p as u32;
                    }
                    m += p;
                }
            }
        }
        let small_count = primes.len();

        // Phase 2: mark the rest in cache-sized segments, smallest prime
        // first so each composite keeps its minimal factor.
        let mut lo = root + 1;
        while lo <= n {
            let hi = (lo + segment_len - 1).min(n);
            for &sp in &primes[..small_count] {
                let p = sp as usize;
                if p * p > hi {
                    break;
                }
                let mut m = p * p;
                if m < lo {
                    m = lo.div_ceil(p) * p;
                }
                while m <= hi {
                    if spf[m] == 0 {
                        spf[m] = p as u32;
                    }
                    m += p;
                }
            }
            #[allow(clippy::needless_range_loop)]
            for m in lo..=hi {
                if spf[m] == 0 {
                    spf[m] = m as u32;
                    primes.push(m as u32);
                }
            }
            lo = hi + 1;
        }

        let ln_primes = primes.iter().map(|&p| f64::from(p).ln()).collect();
        Ok(PrimeTable {
            limit,
            primes,
            ln_primes,
            spf,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Natural logs of the primes, aligned with [`Self::primes`].
    pub fn ln_primes(&self) -> &[f64] {
        &self.ln_primes
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] == n as u32
    }

    /// Smallest prime factor of `n` (2 <= n <= limit).
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit {
            return Err(Error::invalid(format!(
                "spf requires 2 <= n <= {}, got {n}",
                self.limit
            )));
        }
        Ok(u64::from(self.spf[n as usize]))
    }

    /// Raw spf array, indexed 0..=limit with entries 0 for n < 2.
    pub fn spf_slice(&self) -> &[u32] {
        &self.spf
    }

    /// Index range into `primes()` covering the window `(d, x]`.
    pub fn prime_index_range(&self, d: u64, x: u64) -> std::ops::Range<usize> {
        let start = self.primes.partition_point(|&p| u64::from(p) <= d);
        let end = self.primes.partition_point(|&p| u64::from(p) <= x);
        start..end
    }

    /// `L = Σ_{d < p <= x} 1/p`, pairwise-summed.
    pub fn reciprocal_sum(&self, d: u64, x: u64) -> Result<f64> {
        if d < 2 || d > x || x > self.limit {
            return Err(Error::invalid(format!(
                "reciprocal_sum requires 2 <= D <= x <= {}, got D={d}, x={x}",
                self.limit
            )));
        }
        let mut acc = PairwiseAcc::new();
        for i in self.prime_index_range(d, x) {
            acc.push(1.0 / f64::from(self.primes[i]));
        }
        Ok(acc.total())
    }

    /// Complete factorization of `n` by repeated spf division.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        if n == 0 || n > self.limit {
            return Err(Error::invalid(format!(
                "factorize requires 1 <= n <= {}, got {n}",
                self.limit
            )));
        }
        let mut out = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Euler phi of `n <= limit`, from the factorization.
    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        let mut phi = n;
        for (p, _) in self.factorize(n)? {
            phi -= phi / p;
        }
        Ok(phi)
    }
}
