//! Weighted representation sums over prime pairs `p1 + p2 = n`.
//!
//! Pairs are ordered: `(3, 7)` and `(7, 3)` both count, and `p1 = p2 = n/2`
//! counts once. A pair contributes `w(p1) ln p1 ln p2`, evaluated as
//! `(w * ln p1) * ln p2`, with `w` one of
//!
//! * `1` for `J(n)`,
//! * `r(p1 - 1)` for `R(n)`,
//! * `tau(p1 - 1)` for `T(n)`,
//! * `sum chi(d)` over `d | p1 - 1` in one of three ranges for `S1..S3`.
//!
//! The direct path sums each row in increasing `p1` with compensated
//! summation, so a row of [`batch_profiles`] is bit-identical to the
//! single-`n` functions here, for any worker count. The convolution path
//! gets every row at once from real FFT convolutions of length
//! `L = next_pow2(2N + 1)`; its absolute error per row is on the order of
//! `eps * log2(L) * |a|_2 * |b|_2` for the two input arrays.

use std::io::{Read, Write};
use std::str::FromStr;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arith::{chi_divisor_sum, chi_signed, r_via_character, tau, totient};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::CompensatedSum;
use crate::series::{fmt17, SeriesContext};
use crate::sieve::{PrimeTable, SpfTable};

pub const PROFILE_MAGIC: [u8; 4] = *b"GWPR";
pub const PROFILE_VERSION: u32 = 1;

/// Even rows per work item of the direct batch.
const BLOCK_ROWS: u64 = 4096;

/// Prime and factor tables to a common limit `N`, with `r(p - 1)` and
/// `tau(p - 1)` precomputed for every prime `p <= N`.
#[derive(Debug, Clone)]
pub struct Tables {
    primes: PrimeTable,
    spf: SpfTable,
    r_weights: Vec<f64>,
    tau_weights: Vec<f64>,
}

impl Tables {
    pub fn build(limit: u64, exec: &Exec) -> Result<Self> {
        let primes = PrimeTable::build_with(limit, exec)?;
        Self::from_prime_table(primes, exec)
    }

    pub fn from_prime_table(primes: PrimeTable, exec: &Exec) -> Result<Self> {
        let spf = SpfTable::build(primes.limit())?;
        let weights = exec.map(primes.primes(), |&p| {
            let m = p - 1;
            (
                r_via_character(m, &spf).unwrap() as f64,
                tau(m, &spf).unwrap() as f64,
            )
        });
        let (r_weights, tau_weights) = weights.into_iter().unzip();
        Ok(Self {
            primes,
            spf,
            r_weights,
            tau_weights,
        })
    }

    pub fn limit(&self) -> u64 {
        self.primes.limit()
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    pub fn spf(&self) -> &SpfTable {
        &self.spf
    }

    /// `r(p - 1)` aligned with the prime list.
    pub fn r_weights(&self) -> &[f64] {
        &self.r_weights
    }

    /// `tau(p - 1)` aligned with the prime list.
    pub fn tau_weights(&self) -> &[f64] {
        &self.tau_weights
    }

    /// Overwrites one precomputed `r(p - 1)` entry. Exists for fault
    /// injection in the verification suite.
    pub fn set_r_weight(&mut self, prime_index: usize, value: f64) {
        self.r_weights[prime_index] = value;
    }

    fn check_n(&self, n: u64) -> Result<()> {
        if n > self.limit() {
            return Err(Error::invalid(format!("n = {n} beyond the table limit {}", self.limit())));
        }
        Ok(())
    }

    /// Index range of primes `p` with `lo <= p <= hi`.
    fn prime_index_range(&self, lo: u64, hi: u64) -> std::ops::Range<usize> {
        let ps = self.primes.primes();
        let a = ps.partition_point(|&p| p < lo);
        let b = ps.partition_point(|&p| p <= hi);
        a..b.max(a)
    }
}

/// A subinterval `[lo, hi]` of `[1, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub lo: u64,
    pub hi: u64,
}

impl IntervalSpec {
    pub fn new(lo: u64, hi: u64, n_limit: u64) -> Result<Self> {
        if lo < 1 || lo > hi || hi > n_limit {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] is not a subinterval of [1, {n_limit}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn full(n_limit: u64) -> Self {
        Self { lo: 1, hi: n_limit.max(1) }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Number of `m1` in the interval with `m2 = n - m1 >= 1`.
pub fn phi_interval(n: u64, interval: IntervalSpec) -> u64 {
    let top = interval.hi.min(n.saturating_sub(1));
    if top < interval.lo {
        0
    } else {
        top - interval.lo + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Unit,
    R,
    Tau,
}

impl WeightKind {
    fn weight(self, tables: &Tables, i: usize) -> f64 {
        match self {
            WeightKind::Unit => 1.0,
            WeightKind::R => tables.r_weights[i],
            WeightKind::Tau => tables.tau_weights[i],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Convolution,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "convolution" => Ok(Method::Convolution),
            other => Err(Error::invalid(format!("unknown method '{other}' (expected direct or convolution)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Convolution => "convolution",
        })
    }
}

fn check_even_rep(n: u64, tables: &Tables) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::invalid(format!("n = {n} must be even")));
    }
    if n < 4 {
        return Err(Error::invalid(format!("n = {n} must be at least 4")));
    }
    tables.check_n(n)
}

/// Calls `f(i1, p1, ln p1, ln p2)` for every ordered prime pair summing to
/// `n`, in increasing `p1`.
fn for_each_pair(tables: &Tables, n: u64, mut f: impl FnMut(usize, u64, f64, f64)) {
    let primes = tables.primes.primes();
    let logs = tables.primes.log_weights();
    for (i, &p1) in primes.iter().enumerate() {
        if p1 + 2 > n {
            break;
        }
        let p2 = n - p1;
        if tables.primes.is_prime(p2) {
            let j = primes.partition_point(|&q| q < p2);
            f(i, p1, logs[i], logs[j]);
        }
    }
}

/// Exact sum over `p1 + p2 = n` of `w(p1 - 1) ln p1 ln p2`.
pub fn weighted_rep_direct(n: u64, kind: WeightKind, tables: &Tables) -> Result<f64> {
    check_even_rep(n, tables)?;
    let mut s = CompensatedSum::new();
    for_each_pair(tables, n, |i, _, l1, l2| s.add(kind.weight(tables, i) * l1 * l2));
    Ok(s.value())
}

/// Integer thresholds realizing the ranges `d <= D`, `D < d < N/D` and
/// `d >= N/D` for integer `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitThresholds {
    /// `floor(D)`: `d <= D` iff `d <= lower`
    pub lower: u64,
    /// `ceil(N/D)`: `d >= N/D` iff `d >= upper`
    pub upper: u64,
}

impl SplitThresholds {
    pub fn new(n_limit: u64, d_param: f64) -> Result<Self> {
        let n = n_limit as f64;
        if !(d_param > 1.0) || !(d_param < n / d_param) {
            return Err(Error::invalid(format!("D = {d_param} must satisfy 1 < D < N/D for N = {n_limit}")));
        }
        Ok(Self {
            lower: d_param.floor() as u64,
            upper: (n / d_param).ceil() as u64,
        })
    }

    /// `(sum chi(d) for d <= D, for D < d < N/D, for d >= N/D)` over
    /// `d | m`.
    pub fn chi_split(&self, m: u64, spf: &SpfTable) -> (i64, i64, i64) {
        let s1 = chi_divisor_sum(m, spf, |d| d <= self.lower);
        let s2 = chi_divisor_sum(m, spf, |d| d > self.lower && d < self.upper);
        let s3 = chi_divisor_sum(m, spf, |d| d >= self.upper);
        (s1, s2, s3)
    }

    /// The `d >= N/D` sum written over complementary divisors `m = (p-1)/d`:
    /// `sum_{j = +-1} chi(j) #{even m <= (p-1)/ceil(N/D) : p = 1 + jm mod 4m}`.
    pub fn complementary_s3_weight(&self, p: u64) -> i64 {
        let mut w = 0i64;
        let m_max = (p - 1) / self.upper;
        let mut m = 2;
        while m <= m_max {
            let modulus = 4 * m;
            for j in [1i64, -1] {
                let residue = (1 + j * m as i64).rem_euclid(modulus as i64) as u64;
                if p % modulus == residue {
                    w += chi_signed(j).value() as i64;
                }
            }
            m += 2;
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSplit {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

/// `S1(n), S2(n), S3(n)` with the cut `D` and `N` = table limit.
pub fn s_split(n: u64, d_param: f64, tables: &Tables) -> Result<SSplit> {
    check_even_rep(n, tables)?;
    let th = SplitThresholds::new(tables.limit(), d_param)?;
    let (mut a, mut b, mut c) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for_each_pair(tables, n, |_, p1, l1, l2| {
        let (w1, w2, w3) = th.chi_split(p1 - 1, &tables.spf);
        a.add(w1 as f64 * l1 * l2);
        b.add(w2 as f64 * l1 * l2);
        c.add(w3 as f64 * l1 * l2);
    });
    Ok(SSplit { s1: a.value(), s2: b.value(), s3: c.value() })
}

/// `S3(n)` through complementary divisors. Enumerates the same divisor set
/// as [`s_split`], so the two agree exactly.
pub fn s3_complementary(n: u64, d_param: f64, tables: &Tables) -> Result<f64> {
    check_even_rep(n, tables)?;
    let th = SplitThresholds::new(tables.limit(), d_param)?;
    let mut s = CompensatedSum::new();
    for_each_pair(tables, n, |_, p1, l1, l2| {
        s.add(th.complementary_s3_weight(p1) as f64 * l1 * l2);
    });
    Ok(s.value())
}

/// `S3(n) = sum_{even m <= D} sum_{j = +-1} chi(j) J_{4m, 1+jm}(n; I_m)` with
/// `I_m = [1 + m N/D, N]`.
pub fn s3_via_progressions(n: u64, d_param: f64, tables: &Tables) -> Result<f64> {
    check_even_rep(n, tables)?;
    let th = SplitThresholds::new(tables.limit(), d_param)?;
    let n_limit = tables.limit();
    let mut s = CompensatedSum::new();
    for m in (2..=th.lower).step_by(2) {
        let lo = 1 + m * th.upper;
        if lo > n_limit {
            break;
        }
        let interval = IntervalSpec { lo, hi: n_limit };
        for j in [1i64, -1] {
            let l = 1 + j * m as i64;
            let v = j_kl_interval(4 * m, l, n, interval, tables)?;
            s.add(chi_signed(j).as_f64() * v);
        }
    }
    Ok(s.value())
}

/// Sum over `p1 + p2 = n`, `p1 = l (mod k)`, `p1` in `interval` of
/// `ln p1 ln p2`.
pub fn j_kl_interval(k: u64, l: i64, n: u64, interval: IntervalSpec, tables: &Tables) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("modulus k must be positive"));
    }
    tables.check_n(n)?;
    let residue = l.rem_euclid(k as i64) as u64;
    let mut s = CompensatedSum::new();
    for_each_pair(tables, n, |_, p1, l1, l2| {
        if p1 % k == residue && interval.contains(p1) {
            s.add(l1 * l2);
        }
    });
    Ok(s.value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S3PrimeTerm {
    pub value: f64,
    /// Sum of the positive terms, the scale for the cancellation check.
    pub positive_part: f64,
}

/// `sum_{even m <= D} sum_{j = +-1} chi(j) S_{4m,1+jm}(n) / phi(4m) * Phi(n; I_m)`.
pub fn s3_prime_term(n: u64, d_param: f64, tables: &Tables, ctx: &SeriesContext) -> Result<S3PrimeTerm> {
    tables.check_n(n)?;
    if n < 2 {
        return Err(Error::invalid(format!("n = {n} must be at least 2")));
    }
    let th = SplitThresholds::new(tables.limit(), d_param)?;
    let n_limit = tables.limit();
    let mut s = CompensatedSum::new();
    let mut pos = CompensatedSum::new();
    for m in (2..=th.lower).step_by(2) {
        let k = 4 * m;
        let phi_k = totient(k, &tables.spf)? as f64;
        let lo = 1 + m * th.upper;
        let phi_n = if lo > n_limit { 0 } else { phi_interval(n, IntervalSpec { lo, hi: n_limit }) };
        for j in [1i64, -1] {
            let sing = ctx.singular_kl(k, 1 + j * m as i64, n, &tables.spf)?;
            let term = chi_signed(j).as_f64() * sing / phi_k * phi_n as f64;
            s.add(term);
            if term > 0.0 {
                pos.add(term);
            }
        }
    }
    Ok(S3PrimeTerm { value: s.value(), positive_part: pos.value() })
}

/// Per-even-`n` columns `J, R, T, S1, S2, S3`. Vectors are indexed by
/// `n / 2` for `n = 0, 2, ..., N`; rows with `n < 4` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedProfile {
    pub limit: u64,
    pub d_param: f64,
    pub j: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub s3: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub n: u64,
    pub j: f64,
    pub r: f64,
    pub t: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl WeightedProfile {
    pub const CSV_HEADER: &'static str = "n,j,r,t,s1,s2,s3";

    fn zeroed(limit: u64, d_param: f64) -> Self {
        let rows = (limit / 2 + 1) as usize;
        Self {
            limit,
            d_param,
            j: vec![0.0; rows],
            r: vec![0.0; rows],
            t: vec![0.0; rows],
            s1: vec![0.0; rows],
            s2: vec![0.0; rows],
            s3: vec![0.0; rows],
        }
    }

    pub fn columns(&self) -> [(&'static str, &[f64]); 6] {
        [
            ("j", &self.j),
            ("r", &self.r),
            ("t", &self.t),
            ("s1", &self.s1),
            ("s2", &self.s2),
            ("s3", &self.s3),
        ]
    }

    pub fn row(&self, n: u64) -> Option<ProfileRow> {
        if n % 2 != 0 || n > self.limit {
            return None;
        }
        let i = (n / 2) as usize;
        Some(ProfileRow {
            n,
            j: self.j[i],
            r: self.r[i],
            t: self.t[i],
            s1: self.s1[i],
            s2: self.s2[i],
            s3: self.s3[i],
        })
    }

    /// Even `n` in `[4, N]`.
    pub fn even_rows(&self) -> impl Iterator<Item = ProfileRow> + '_ {
        (2..=self.limit / 2).map(move |h| self.row(2 * h).unwrap())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in self.even_rows() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.n,
                fmt17(r.j),
                fmt17(r.r),
                fmt17(r.t),
                fmt17(r.s1),
                fmt17(r.s2),
                fmt17(r.s3)
            )?;
        }
        Ok(())
    }

    /// `GWPR` binary: magic, version u32, N u64, D f64 (all little-endian),
    /// then for each even `n = 4, 6, ..., N` the six doubles
    /// `j, r, t, s1, s2, s3`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&PROFILE_MAGIC)?;
        w.write_all(&PROFILE_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.d_param.to_le_bytes())?;
        for r in self.even_rows() {
            for x in [r.j, r.r, r.t, r.s1, r.s2, r.s3] {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 24];
        r.read_exact(&mut header)
            .map_err(|e| Error::Format(format!("profile header: {e}")))?;
        if header[0..4] != PROFILE_MAGIC {
            return Err(Error::Format("profile: bad magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != PROFILE_VERSION {
            return Err(Error::Format(format!("profile: unsupported version {version}")));
        }
        let limit = u64::from_le_bytes(header[8..16].try_into().unwrap());
        let d_param = f64::from_le_bytes(header[16..24].try_into().unwrap());
        if limit < 4 || limit > crate::sieve::MAX_LIMIT {
            return Err(Error::Format(format!("profile: implausible limit {limit}")));
        }
        let mut p = Self::zeroed(limit, d_param);
        let mut buf = [0u8; 8];
        for h in 2..=(limit / 2) as usize {
            for col in [&mut p.j, &mut p.r, &mut p.t, &mut p.s1, &mut p.s2, &mut p.s3] {
                r.read_exact(&mut buf)
                    .map_err(|e| Error::Format(format!("profile: truncated rows: {e}")))?;
                col[h] = f64::from_le_bytes(buf);
            }
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Format("profile: trailing bytes".into()));
        }
        Ok(p)
    }
}

/// Per-prime weights for the six columns, aligned with the prime list.
struct PrimeWeights {
    cols: [Vec<f64>; 6],
}

impl PrimeWeights {
    fn new(tables: &Tables, th: &SplitThresholds, exec: &Exec) -> Self {
        let splits = exec.map(tables.primes.primes(), |&p| th.chi_split(p - 1, &tables.spf));
        let n = splits.len();
        let unit = vec![1.0; n];
        let s1 = splits.iter().map(|s| s.0 as f64).collect();
        let s2 = splits.iter().map(|s| s.1 as f64).collect();
        let s3 = splits.iter().map(|s| s.2 as f64).collect();
        Self {
            cols: [unit, tables.r_weights.clone(), tables.tau_weights.clone(), s1, s2, s3],
        }
    }
}

/// Fills every column for all even `n <= N`.
pub fn batch_profiles(tables: &Tables, method: Method, d_param: f64, exec: &Exec) -> Result<WeightedProfile> {
    let n_limit = tables.limit();
    if n_limit < 4 {
        return Err(Error::invalid(format!("profile limit must be at least 4, got {n_limit}")));
    }
    let th = SplitThresholds::new(n_limit, d_param)?;
    let weights = PrimeWeights::new(tables, &th, exec);
    let mut profile = WeightedProfile::zeroed(n_limit, d_param);
    match method {
        Method::Direct => direct_fill(tables, &weights, &mut profile, exec),
        Method::Convolution => convolution_fill(tables, &weights, &mut profile)?,
    }
    Ok(profile)
}

fn direct_fill(tables: &Tables, weights: &PrimeWeights, profile: &mut WeightedProfile, exec: &Exec) {
    let n_limit = tables.limit();
    let rows_total = n_limit / 2 + 1;
    let blocks = rows_total.div_ceil(BLOCK_ROWS);
    let primes = tables.primes.primes();
    let logs = tables.primes.log_weights();

    let results = exec.map_range(0..blocks as usize, |b| {
        let h_lo = b as u64 * BLOCK_ROWS;
        let h_hi = (h_lo + BLOCK_ROWS).min(rows_total);
        let (n_lo, n_hi) = (2 * h_lo, 2 * (h_hi - 1));
        let mut acc = vec![[CompensatedSum::new(); 6]; (h_hi - h_lo) as usize];
        let mut add = |i1: usize, i2: usize, n: u64| {
            let row = &mut acc[((n - n_lo) / 2) as usize];
            for c in 0..6 {
                row[c].add(weights.cols[c][i1] * logs[i1] * logs[i2]);
            }
        };
        // the only even sum involving 2 is 2 + 2
        if n_lo <= 4 && 4 <= n_hi {
            add(0, 0, 4);
        }
        for (i1, &p1) in primes.iter().enumerate().skip(1) {
            if p1 + 3 > n_hi {
                break;
            }
            let lo = n_lo.saturating_sub(p1).max(3);
            let range = tables.prime_index_range(lo, n_hi - p1);
            for i2 in range {
                add(i1, i2, p1 + primes[i2]);
            }
        }
        acc.into_iter()
            .map(|row| {
                let mut out = [0.0; 6];
                for c in 0..6 {
                    out[c] = row[c].value();
                }
                out
            })
            .collect::<Vec<_>>()
    });

    let mut h = 0usize;
    for block in results {
        for row in block {
            profile.j[h] = row[0];
            profile.r[h] = row[1];
            profile.t[h] = row[2];
            profile.s1[h] = row[3];
            profile.s2[h] = row[4];
            profile.s3[h] = row[5];
            h += 1;
        }
    }
}

fn convolution_fill(tables: &Tables, weights: &PrimeWeights, profile: &mut WeightedProfile) -> Result<()> {
    let n_limit = tables.limit() as usize;
    let len = (2 * n_limit + 1).next_power_of_two();
    let primes = tables.primes.primes();
    let logs = tables.primes.log_weights();

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);

    let zero = Complex::new(0.0, 0.0);
    let mut kernel = Vec::new();
    kernel
        .try_reserve_exact(len)
        .map_err(|e| Error::Resource(format!("FFT buffer of length {len}: {e}")))?;
    kernel.resize(len, zero);
    for (&p, &l) in primes.iter().zip(logs) {
        kernel[p as usize] = Complex::new(l, 0.0);
    }
    fwd.process(&mut kernel);

    let scale = 1.0 / len as f64;
    let mut buf = vec![zero; len];
    // two real weight arrays ride in one complex transform: the kernel is
    // real, so the real and imaginary parts of the product stay separate
    for (a, b) in [(0, 1), (2, 3), (4, 5)] {
        buf.fill(zero);
        for (i, &p) in primes.iter().enumerate() {
            buf[p as usize] = Complex::new(weights.cols[a][i] * logs[i], weights.cols[b][i] * logs[i]);
        }
        fwd.process(&mut buf);
        for (x, k) in buf.iter_mut().zip(&kernel) {
            *x *= k;
        }
        inv.process(&mut buf);
        for h in 2..=n_limit / 2 {
            let v = buf[2 * h] * scale;
            let (ca, cb) = column_pair(profile, a);
            ca[h] = v.re;
            cb[h] = v.im;
        }
    }
    // J, R, T are sums of nonnegative terms; drop FFT noise below zero
    for col in [&mut profile.j, &mut profile.r, &mut profile.t] {
        for x in col.iter_mut() {
            *x = x.max(0.0);
        }
    }
    Ok(())
}

fn column_pair(p: &mut WeightedProfile, first: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    match first {
        0 => (&mut p.j, &mut p.r),
        2 => (&mut p.t, &mut p.s1),
        _ => (&mut p.s2, &mut p.s3),
    }
}
