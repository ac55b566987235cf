//! Prime tables and smallest-prime-factor tables.
//!
//! [`PrimeTable`] is built by a segmented sieve of Eratosthenes over odd
//! numbers only: bit `i` of the bitmap stands for `2i + 1`, and 2 is
//! special-cased. Segments are independent, so they may be sieved on any
//! number of workers; the finished table is immutable.
//!
//! The bitmap can be cached on disk. Layout, all little-endian:
//!
//! ```text
//! offset 0   b"GWSV"
//! offset 4   version: u32  (= 1)
//! offset 8   limit:   u64
//! offset 16  ceil(((limit + 1) / 2) / 8) bytes of odd-only bitmap,
//!            bit i of the stream (LSB first within each byte) = 2i + 1
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Largest supported table limit (tables store values as `u32`).
pub const MAX_LIMIT: u64 = u32::MAX as u64;

pub const CACHE_MAGIC: [u8; 4] = *b"GWSV";
pub const CACHE_VERSION: u32 = 1;

/// 2^15 words = 256 KiB of bitmap, about 4.2 million integers per segment.
const SEGMENT_WORDS: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    primes: Vec<u64>,
    log_weights: Vec<f64>,
}

/// Number of odd-only bitmap positions for `limit`: odd numbers `1..=limit`.
fn odd_slots(limit: u64) -> usize {
    limit.div_ceil(2) as usize
}

fn check_limit(limit: u64) -> Result<()> {
    if limit < 2 {
        return Err(Error::invalid(format!("table limit must be at least 2, got {limit}")));
    }
    if limit > MAX_LIMIT {
        return Err(Error::invalid(format!(
            "table limit {limit} exceeds the supported maximum {MAX_LIMIT}"
        )));
    }
    Ok(())
}

fn alloc_vec<T: Clone>(len: usize, fill: T, what: &str) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|e| Error::Resource(format!("allocating {what} ({len} entries): {e}")))?;
    v.resize(len, fill);
    Ok(v)
}

/// Odd primes up to `bound` by a plain sieve; `bound` is about sqrt(limit).
fn small_odd_primes(bound: u64) -> Vec<u64> {
    let bound = bound as usize;
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for i in 2..=bound {
        if composite[i] {
            continue;
        }
        if i > 2 {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= bound {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Clears composite bits in one segment. `first_word` is the global index of
/// `seg[0]`.
fn sieve_segment(seg: &mut [u64], first_word: usize, base: &[u64]) {
    let first_slot = first_word as u64 * 64;
    let slots = seg.len() as u64 * 64;
    let lo_num = 2 * first_slot + 1;
    for &q in base {
        let mut m = q * q;
        if m < lo_num {
            m = lo_num.div_ceil(q) * q;
            if m % 2 == 0 {
                m += q;
            }
        }
        let mut idx = (m - 1) / 2 - first_slot;
        while idx < slots {
            seg[(idx / 64) as usize] &= !(1u64 << (idx % 64));
            idx += q;
        }
    }
}

impl PrimeTable {
    /// Sequential build; see [`PrimeTable::build_with`].
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with(limit, &Exec::sequential())
    }

    /// Segmented sieve up to `limit` inclusive. Segments are distributed over
    /// `exec`; the result is identical for every worker count.
    pub fn build_with(limit: u64, exec: &Exec) -> Result<Self> {
        check_limit(limit)?;
        let slots = odd_slots(limit);
        let words = slots.div_ceil(64);
        let mut bits = alloc_vec(words, u64::MAX, "prime bitmap")?;
        // the number 1 is not prime
        bits[0] &= !1;
        mask_tail(&mut bits, slots);

        let base = small_odd_primes(limit.isqrt());
        exec.for_each_chunk_mut(&mut bits, SEGMENT_WORDS, |i, seg| {
            sieve_segment(seg, i * SEGMENT_WORDS, &base);
        });
        Self::from_bits(limit, bits)
    }

    fn from_bits(limit: u64, bits: Vec<u64>) -> Result<Self> {
        let estimate = prime_count_upper_bound(limit);
        let mut primes = Vec::new();
        primes
            .try_reserve_exact(estimate)
            .map_err(|e| Error::Resource(format!("allocating prime list: {e}")))?;
        primes.push(2);
        for (w, &word) in bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let b = x.trailing_zeros() as u64;
                primes.push(2 * (w as u64 * 64 + b) + 1);
                x &= x - 1;
            }
        }
        let log_weights = primes.iter().map(|&p| (p as f64).ln()).collect();
        Ok(Self {
            limit,
            bits,
            primes,
            log_weights,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Primality of `k` for `k <= limit`.
    #[inline]
    pub fn is_prime(&self, k: u64) -> bool {
        debug_assert!(k <= self.limit, "{k} beyond table limit {}", self.limit);
        if k % 2 == 0 {
            return k == 2;
        }
        let i = (k / 2) as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// All primes `<= limit`, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `ln p` aligned with [`PrimeTable::primes`].
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// pi(x) for `x <= limit`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Serializes the bitmap in the `GWSV` layout.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        let nbytes = odd_slots(self.limit).div_ceil(8);
        let mut bytes = Vec::with_capacity(self.bits.len() * 8);
        for word in &self.bits {
            bytes.extend_from_slice(&word.to_le_bytes());
        }
        w.write_all(&bytes[..nbytes])?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)
            .map_err(|e| Error::Format(format!("sieve cache header: {e}")))?;
        if header[0..4] != CACHE_MAGIC {
            return Err(Error::Format("sieve cache: bad magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::Format(format!("sieve cache: unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(header[8..16].try_into().unwrap());
        check_limit(limit).map_err(|e| Error::Format(format!("sieve cache: {e}")))?;
        let slots = odd_slots(limit);
        let nbytes = slots.div_ceil(8);
        let mut bytes = alloc_vec(nbytes, 0u8, "sieve cache")?;
        r.read_exact(&mut bytes)
            .map_err(|e| Error::Format(format!("sieve cache: truncated bitmap: {e}")))?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("sieve cache: trailing bytes".into()));
        }
        let words = slots.div_ceil(64);
        let mut bits = alloc_vec(words, 0u64, "prime bitmap")?;
        for (w, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            bits[w] = u64::from_le_bytes(buf);
        }
        mask_tail(&mut bits, slots);
        Self::from_bits(limit, bits)
    }

    /// Reads the cache at `path` when it holds a table for exactly `limit`;
    /// otherwise builds the table and (re)writes the cache.
    pub fn load_or_build(limit: u64, path: &Path, exec: &Exec) -> Result<Self> {
        if let Ok(file) = fs::File::open(path) {
            let cached = Self::read_cache(std::io::BufReader::new(file))?;
            if cached.limit == limit {
                return Ok(cached);
            }
        }
        let table = Self::build_with(limit, exec)?;
        let file = fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        table.write_cache(&mut w)?;
        w.flush()?;
        Ok(table)
    }
}

fn mask_tail(bits: &mut [u64], slots: usize) {
    let rem = slots % 64;
    if rem != 0 {
        if let Some(last) = bits.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

/// Rosser-Schoenfeld style bound, only used for a capacity hint.
fn prime_count_upper_bound(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.25506 * x / x.ln()) as usize + 1
}

/// Cache file for a table to `limit` inside `dir`.
pub fn cache_file(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("primes_{limit}.gwsv"))
}

pub fn build_prime_table(limit: u64) -> Result<PrimeTable> {
    PrimeTable::build(limit)
}

/// Smallest-prime-factor table: `spf[k]` for `2 <= k <= limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn build(limit: u64) -> Result<Self> {
        check_limit(limit)?;
        let n = limit as usize;
        let mut spf = alloc_vec(n + 1, 0u32, "spf table")?;
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            spf[i] = i as u32;
            let Some(start) = i.checked_mul(i) else { continue };
            let mut j = start;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        Ok(Self { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `k`, `2 <= k <= limit`.
    #[inline]
    pub fn spf(&self, k: u64) -> u64 {
        self.spf[k as usize] as u64
    }

    pub(crate) fn check(&self, k: u64, what: &str) -> Result<()> {
        if k == 0 || k > self.limit {
            return Err(Error::invalid(format!(
                "{what} = {k} outside the table range [1, {}]",
                self.limit
            )));
        }
        Ok(())
    }

    /// Iterates `(prime, exponent)` of `k` in increasing prime order; empty
    /// for `k = 1`. `k` must be within the table.
    #[inline]
    pub fn factors(&self, k: u64) -> Factors<'_> {
        debug_assert!(k >= 1 && k <= self.limit);
        Factors { table: self, rest: k }
    }
}

pub struct Factors<'a> {
    table: &'a SpfTable,
    rest: u64,
}

impl Iterator for Factors<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<(u64, u32)> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.table.spf(self.rest);
        let mut e = 0;
        while self.rest % p == 0 {
            self.rest /= p;
            e += 1;
        }
        Some((p, e))
    }
}

pub fn build_spf_table(limit: u64) -> Result<SpfTable> {
    SpfTable::build(limit)
}

/// Prime factorization of `2 <= k <= spf.limit()` as ascending
/// `(prime, exponent)` pairs.
pub fn factorize(k: u64, spf: &SpfTable) -> Result<Vec<(u64, u32)>> {
    if k < 2 || k > spf.limit() {
        return Err(Error::invalid(format!(
            "cannot factorize {k}: expected 2 <= k <= {}",
            spf.limit()
        )));
    }
    Ok(spf.factors(k).collect())
}
