//! Euler products with explicit truncation: the twin-prime-type constant,
//! the Titchmarsh constant, the progression singular series, `F_n(0)` and
//! the main terms `M_R(n)`, `M_T(n)`.
//!
//! Generic factors `1 + x_p` with `x_p = O(1/p^2)` are multiplied over
//! primes `p <= P` only. Products of more than [`DIRECT_PRODUCT_MAX`]
//! factors are accumulated as compensated sums of `ln_1p(x_p)` and
//! exponentiated once.
//!
//! Factors for primes dividing `n(n-1)` are always included exactly,
//! whatever their size; only the generic tail over `p > P` is dropped.

use std::f64::consts::{E, LN_2, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{chi, lambda_of_primes, lambda_weight};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::{gcd, CompensatedSum};
use crate::sieve::{PrimeTable, SpfTable};

pub const DEFAULT_PRIME_CUTOFF: u64 = 1_000_000;

/// Products with at most this many factors are multiplied directly.
pub const DIRECT_PRODUCT_MAX: usize = 1000;

/// The value printed next to the closed form of theta_0 in the source
/// literature; kept only so reports can show both side by side.
pub const THETA_ZERO_PRINTED: f64 = 0.0029;

/// Truncation point of every Euler product and a bound on what the
/// dropped tail can change.
///
/// `tail_bound` bounds `|ln(true / truncated)|` for every product this
/// module evaluates at this cutoff. The largest tail is the one of
/// `M_R(n)`: `sum_{p>P} 1/(p-1)^2` from the twin constant plus
/// `sum_{p>P} 2/(p(p-2))` from the generic factor, each term below
/// `2/p^2` resp. `4/p^2`, so the total is below `6/P` by comparison with
/// `sum_{m>P} 1/m^2 < 1/P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub prime_cutoff: u64,
    pub tail_bound: f64,
}

impl TruncationConfig {
    pub fn new(prime_cutoff: u64) -> Result<Self> {
        if prime_cutoff < 2 {
            return Err(Error::invalid(format!("prime cutoff must be at least 2, got {prime_cutoff}")));
        }
        Ok(Self {
            prime_cutoff,
            tail_bound: 6.0 / prime_cutoff as f64,
        })
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self::new(DEFAULT_PRIME_CUTOFF).unwrap()
    }
}

/// `prod (1 + x)` over the given deviations.
pub(crate) fn euler_product(deltas: impl IntoIterator<Item = f64>) -> f64 {
    let deltas: Vec<f64> = deltas.into_iter().collect();
    if deltas.len() <= DIRECT_PRODUCT_MAX {
        deltas.iter().map(|x| 1.0 + x).product()
    } else {
        deltas.iter().map(|x| x.ln_1p()).collect::<CompensatedSum>().value().exp()
    }
}

fn cutoff_primes<'a>(config: &TruncationConfig, primes: &'a PrimeTable) -> Result<&'a [u64]> {
    if primes.limit() < config.prime_cutoff {
        return Err(Error::invalid(format!(
            "prime table to {} cannot serve cutoff {}",
            primes.limit(),
            config.prime_cutoff
        )));
    }
    Ok(&primes.primes()[..primes.count_up_to(config.prime_cutoff)])
}

/// `2 prod_{2 < p <= P} (1 - 1/(p-1)^2)`.
pub fn twin_constant(config: &TruncationConfig, primes: &PrimeTable) -> Result<f64> {
    if config.prime_cutoff < 3 {
        return Err(Error::invalid("twin constant needs a cutoff of at least 3"));
    }
    let ps = cutoff_primes(config, primes)?;
    Ok(2.0 * euler_product(ps.iter().filter(|&&p| p > 2).map(|&p| {
        let q = (p - 1) as f64;
        -1.0 / (q * q)
    })))
}

/// `prod_{p <= P} (1 + 1/(p(p-1)))`.
pub fn titchmarsh_constant(config: &TruncationConfig, primes: &PrimeTable) -> Result<f64> {
    let ps = cutoff_primes(config, primes)?;
    Ok(euler_product(ps.iter().map(|&p| {
        let p = p as f64;
        1.0 / (p * (p - 1.0))
    })))
}

/// `1/2 - e ln 2 / 4`.
pub fn theta_zero() -> f64 {
    0.5 - 0.25 * E * LN_2
}

/// Default divisor cut `D = sqrt(N) / (ln N)^3`, raised to 4 where that
/// falls below 4 (every `N` below about 2e9). With `D <= 2` no odd
/// `d >= N/D` divides `p - 1` for `p <= N`, so `S3` would vanish. Tiny
/// `N <= 16` get 2 so that `D < N/D` still holds.
pub fn default_d_param(n_limit: u64) -> f64 {
    let n = n_limit as f64;
    let floor = if n_limit > 16 { 4.0 } else { 2.0 };
    (n.sqrt() / n.ln().powi(3)).max(floor)
}

/// Generic deviation of the chi-twisted factor `1 + 2 chi(p)/(p(p-2))`.
#[inline]
fn chi_generic(p: u64) -> f64 {
    let pf = p as f64;
    2.0 * chi(p).as_f64() / (pf * (pf - 2.0))
}

/// Generic deviation of the untwisted factor `1 + 2/(p(p-2))`.
#[inline]
fn plain_generic(p: u64) -> f64 {
    let pf = p as f64;
    2.0 / (pf * (pf - 2.0))
}

fn check_even(n: u64, min: u64, spf: &SpfTable) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::invalid(format!("n = {n} must be even")));
    }
    if n < min {
        return Err(Error::invalid(format!("n = {n} must be at least {min}")));
    }
    if n > spf.limit() {
        return Err(Error::invalid(format!("n = {n} beyond the table limit {}", spf.limit())));
    }
    Ok(())
}

/// Distinct primes of `n(n-1)`: those of `n - 1` then those of `n`.
fn local_primes(n: u64, spf: &SpfTable) -> (Vec<u64>, Vec<u64>) {
    let below: Vec<u64> = spf.factors(n - 1).map(|(p, _)| p).collect();
    let at: Vec<u64> = spf.factors(n).map(|(p, _)| p).collect();
    (below, at)
}

/// The n-local part of `F_n(0) / (pi/4)`:
/// `prod_{p | n-1} (1 - chi(p)/p) prod_{p | n} (1 + chi(p)/(p(p-1)))`.
fn f_zero_local(below: &[u64], at: &[u64]) -> f64 {
    let a: f64 = below.iter().map(|&p| 1.0 - chi(p).as_f64() / p as f64).product();
    let b: f64 = at
        .iter()
        .map(|&p| {
            let pf = p as f64;
            1.0 + chi(p).as_f64() / (pf * (pf - 1.0))
        })
        .product();
    a * b
}

/// `prod_{p | n-1} (1 - chi(p)/p) prod_{p | n, p > 2} (1 + (p + chi(p))/(p(p-2)))`.
fn main_r_local(below: &[u64], at: &[u64]) -> f64 {
    let a: f64 = below.iter().map(|&p| 1.0 - chi(p).as_f64() / p as f64).product();
    let b: f64 = at
        .iter()
        .filter(|&&p| p > 2)
        .map(|&p| {
            let pf = p as f64;
            1.0 + (pf + chi(p).as_f64()) / (pf * (pf - 2.0))
        })
        .product();
    a * b
}

/// `prod_{p | n-1} (1 - 1/p) prod_{p | n, p > 2} (1 + (p + 1)/(p(p-2)))`.
fn main_t_local(below: &[u64], at: &[u64]) -> f64 {
    let a: f64 = below.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
    let b: f64 = at
        .iter()
        .filter(|&&p| p > 2)
        .map(|&p| {
            let pf = p as f64;
            1.0 + (pf + 1.0) / (pf * (pf - 2.0))
        })
        .product();
    a * b
}

/// Shared state for Euler-product evaluation at one truncation point.
#[derive(Debug, Clone)]
pub struct SeriesContext {
    config: TruncationConfig,
    primes: PrimeTable,
    twin: f64,
    titchmarsh: f64,
    /// `sum_{3 <= p <= P} ln(1 + 2 chi(p)/(p(p-2)))`
    chi_log: f64,
    /// `sum_{3 <= p <= P} ln(1 + 2/(p(p-2)))`
    plain_log: f64,
}

impl SeriesContext {
    pub fn new(config: TruncationConfig) -> Result<Self> {
        Self::new_with(config, &Exec::sequential())
    }

    pub fn new_with(config: TruncationConfig, exec: &Exec) -> Result<Self> {
        let primes = PrimeTable::build_with(config.prime_cutoff.max(3), exec)?;
        let ps = cutoff_primes(&config, &primes)?;
        let twin = if config.prime_cutoff >= 3 { twin_constant(&config, &primes)? } else { 2.0 };
        let titchmarsh = titchmarsh_constant(&config, &primes)?;
        let odd = ps.iter().filter(|&&p| p > 2);
        let chi_log = odd.clone().map(|&p| chi_generic(p).ln_1p()).collect::<CompensatedSum>().value();
        let plain_log = odd.map(|&p| plain_generic(p).ln_1p()).collect::<CompensatedSum>().value();
        Ok(Self {
            config,
            primes,
            twin,
            titchmarsh,
            chi_log,
            plain_log,
        })
    }

    pub fn config(&self) -> &TruncationConfig {
        &self.config
    }

    /// Twin-prime-type constant `c0` at this cutoff.
    pub fn twin_constant(&self) -> f64 {
        self.twin
    }

    pub fn titchmarsh_constant(&self) -> f64 {
        self.titchmarsh
    }

    fn generic_primes(&self) -> impl Iterator<Item = u64> + '_ {
        let ps = &self.primes.primes()[..self.primes.count_up_to(self.config.prime_cutoff)];
        ps.iter().copied().filter(|&p| p > 2)
    }

    /// Generic product over `3 <= p <= P`, `p` not in `skip`, multiplied
    /// out from scratch.
    fn generic_fresh(&self, skip_a: &[u64], skip_b: &[u64], delta: fn(u64) -> f64) -> f64 {
        euler_product(
            self.generic_primes()
                .filter(|p| !skip_a.contains(p) && !skip_b.contains(p))
                .map(delta),
        )
    }

    /// Generic product from the shared log-sum, removing the factors of the
    /// primes in `skip`.
    fn generic_shared(&self, skip_a: &[u64], skip_b: &[u64], log_sum: f64, delta: fn(u64) -> f64) -> f64 {
        let p_max = self.config.prime_cutoff;
        let mut s = CompensatedSum::new();
        s.add(log_sum);
        for &p in skip_a.iter().chain(skip_b) {
            if p > 2 && p <= p_max {
                s.add(-delta(p).ln_1p());
            }
        }
        s.value().exp()
    }

    /// `S_{k,l}(n)`: `c0 lambda(nk)` if `gcd(k, n - l) = 1` and `n` is even,
    /// exactly zero otherwise.
    pub fn singular_kl(&self, k: u64, l: i64, n: u64, spf: &SpfTable) -> Result<f64> {
        spf.check(k, "k")?;
        spf.check(n, "n")?;
        if gcd(k, l.unsigned_abs()) != 1 {
            return Err(Error::invalid(format!("singular series needs gcd(k, l) = 1, got k={k} l={l}")));
        }
        if n % 2 != 0 {
            return Ok(0.0);
        }
        let diff = (n as i128 - l as i128).unsigned_abs() as u64;
        if gcd(k, diff) != 1 {
            return Ok(0.0);
        }
        let mut ps: Vec<u64> = spf.factors(n).chain(spf.factors(k)).map(|(p, _)| p).collect();
        ps.sort_unstable();
        ps.dedup();
        Ok(self.twin * lambda_of_primes(ps))
    }

    /// `F_n(0)` for even `n`.
    pub fn f_n_zero(&self, n: u64, spf: &SpfTable) -> Result<f64> {
        check_even(n, 2, spf)?;
        let (below, at) = local_primes(n, spf);
        let generic = self.generic_fresh(&below, &at, chi_generic);
        Ok(PI / 4.0 * f_zero_local(&below, &at) * generic)
    }

    /// `M_R(n) = pi c0 n * local factors * generic chi-twisted product`.
    pub fn main_term_r(&self, n: u64, spf: &SpfTable) -> Result<f64> {
        check_even(n, 4, spf)?;
        let (below, at) = local_primes(n, spf);
        let generic = self.generic_fresh(&below, &at, chi_generic);
        Ok(PI * self.twin * n as f64 * main_r_local(&below, &at) * generic)
    }

    /// `M_T(n) = c n ln n * local factors * generic product`, with `c` the
    /// Titchmarsh constant.
    pub fn main_term_t(&self, n: u64, spf: &SpfTable) -> Result<f64> {
        check_even(n, 4, spf)?;
        let (below, at) = local_primes(n, spf);
        let generic = self.generic_fresh(&below, &at, plain_generic);
        let nf = n as f64;
        Ok(self.titchmarsh * nf * nf.ln() * main_t_local(&below, &at) * generic)
    }

    fn table_row(&self, n: u64, spf: &SpfTable) -> MainTermRow {
        let (below, at) = local_primes(n, spf);
        let g_chi = self.generic_shared(&below, &at, self.chi_log, chi_generic);
        let g_plain = self.generic_shared(&below, &at, self.plain_log, plain_generic);
        let nf = n as f64;
        MainTermRow {
            n,
            m_r: PI * self.twin * nf * main_r_local(&below, &at) * g_chi,
            m_t: self.titchmarsh * nf * nf.ln() * main_t_local(&below, &at) * g_plain,
            lambda_n: lambda_of_primes(at.iter().copied()),
            f_zero: PI / 4.0 * f_zero_local(&below, &at) * g_chi,
        }
    }

    /// Main terms for every even `4 <= n <= limit`, sharing the generic
    /// log-sums across rows.
    pub fn build_main_term_table(&self, limit: u64, spf: &SpfTable, exec: &Exec) -> Result<MainTermTable> {
        if limit > spf.limit() {
            return Err(Error::invalid(format!(
                "main-term table to {limit} needs an spf table at least that large (have {})",
                spf.limit()
            )));
        }
        if limit < 4 {
            return Err(Error::invalid(format!("main-term table limit must be at least 4, got {limit}")));
        }
        let rows = exec.map_range(2..(limit / 2 + 1) as usize, |h| self.table_row(2 * h as u64, spf));
        Ok(MainTermTable {
            limit,
            config: self.config,
            rows,
        })
    }
}

/// `sum_{d <= D, gcd(d, n-1) = 1} f_n(d)`, exactly, for even `n`.
pub fn truncated_f_sum(n: u64, d_param: f64, spf: &SpfTable) -> Result<f64> {
    check_even(n, 2, spf)?;
    if !(d_param >= 1.0) {
        return Err(Error::invalid(format!("D must be at least 1, got {d_param}")));
    }
    let d_max = d_param.floor() as u64;
    if d_max > spf.limit() {
        return Err(Error::invalid(format!("D = {d_param} beyond the table limit {}", spf.limit())));
    }
    let mut s = CompensatedSum::new();
    // even d have chi(d) = 0
    for d in (1..=d_max).step_by(2) {
        if gcd(d, n - 1) == 1 {
            s.add(crate::arith::f_weight(d, n, spf)?);
        }
    }
    Ok(s.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermRow {
    pub n: u64,
    pub m_r: f64,
    pub m_t: f64,
    pub lambda_n: f64,
    pub f_zero: f64,
}

/// Main terms for all even `4 <= n <= limit`, ascending in `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainTermTable {
    pub limit: u64,
    pub config: TruncationConfig,
    pub rows: Vec<MainTermRow>,
}

impl MainTermTable {
    pub const CSV_HEADER: &'static str = "n,m_R,m_T,lambda_n,f_zero";

    pub fn row(&self, n: u64) -> Option<&MainTermRow> {
        if n < 4 || n % 2 != 0 || n > self.limit {
            return None;
        }
        self.rows.get((n / 2 - 2) as usize)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.n,
                fmt17(r.m_r),
                fmt17(r.m_t),
                fmt17(r.lambda_n),
                fmt17(r.f_zero)
            )?;
        }
        Ok(())
    }

    /// Checks that the lambda column agrees with [`lambda_weight`].
    pub fn lambda_consistent(&self, spf: &SpfTable) -> bool {
        self.rows
            .iter()
            .all(|r| lambda_weight(r.n, spf).map(|l| l == r.lambda_n).unwrap_or(false))
    }
}

/// 17 significant digits, round-trip safe for `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
