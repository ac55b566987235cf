//! Empirical meters for the four lemmas behind the main theorems.
//!
//! `L = ln N` throughout. Each meter has a reference envelope, the
//! lemma's bound shape at `N` with implied constant 1, and reports the
//! ratio of the two.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{chi_divisor_sum, divisors_unchecked, totient};
use crate::conv::{phi_interval, IntervalSpec, Tables};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numeric::{gcd, isqrt, CompensatedSum};
use crate::series::{theta_zero, SeriesContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum LemmaId {
    L1,
    L2,
    L3,
    L4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    #[serde(rename = "N")]
    pub n_limit: u64,
    pub params: BTreeMap<String, Value>,
    pub measured: f64,
    pub envelope: f64,
    pub ratio: f64,
}

impl LemmaReport {
    fn new(lemma: LemmaId, n_limit: u64, params: Value, measured: f64, envelope: f64) -> Self {
        let params = match params {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Self {
            lemma,
            n_limit,
            params,
            measured,
            envelope,
            ratio: measured / envelope,
        }
    }
}

fn check_limit(n_limit: u64, tables: &Tables) -> Result<()> {
    if n_limit > tables.limit() {
        return Err(Error::invalid(format!("N = {n_limit} beyond the table limit {}", tables.limit())));
    }
    Ok(())
}

/// `(L, ln L)` for `N`; needs `ln ln N > 0`.
fn logs(n_limit: u64) -> Result<(f64, f64)> {
    if n_limit < 16 {
        return Err(Error::invalid(format!("lemma envelopes need N >= 16, got {n_limit}")));
    }
    let l = (n_limit as f64).ln();
    Ok((l, l.ln()))
}

/// Ordered prime pairs `p1, p2 <= N` with `p1 - p2 = h`.
pub fn pair_difference_count(n_limit: u64, h: i64, tables: &Tables) -> Result<u64> {
    check_limit(n_limit, tables)?;
    if h == 0 || h.unsigned_abs() > n_limit {
        return Err(Error::invalid(format!("difference h = {h} must satisfy 0 < |h| <= N = {n_limit}")));
    }
    let h = h.unsigned_abs();
    let primes = tables.primes();
    let top = primes.primes().partition_point(|&p| p <= n_limit);
    Ok(primes.primes()[..top]
        .iter()
        .take_while(|&&p| p + h <= n_limit)
        .filter(|&&p| primes.is_prime(p + h))
        .count() as u64)
}

/// Counts for every difference: entry `h` is the number of prime pairs
/// `p2 < p1 <= N` with `p1 - p2 = h`.
pub fn pair_difference_profile(n_limit: u64, tables: &Tables, exec: &Exec) -> Result<Vec<u64>> {
    check_limit(n_limit, tables)?;
    let ps = tables.primes().primes();
    let ps = &ps[..ps.partition_point(|&p| p <= n_limit)];
    let stripes = exec.workers().max(1);
    let partial = exec.map_range(0..stripes, |s| {
        let mut counts = vec![0u64; n_limit as usize + 1];
        for (i, &p1) in ps.iter().enumerate().skip(s).step_by(stripes) {
            for &p2 in &ps[..i] {
                counts[(p1 - p2) as usize] += 1;
            }
        }
        counts
    });
    let mut total = vec![0u64; n_limit as usize + 1];
    for counts in partial {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    Ok(total)
}

/// Primes `p <= N` with a divisor of `p - 1` strictly inside
/// `(sqrt(N) L^-omega, sqrt(N) L^omega)`.
pub fn f_omega_count(n_limit: u64, omega: f64, tables: &Tables) -> Result<u64> {
    check_limit(n_limit, tables)?;
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("omega = {omega} must be positive")));
    }
    let (lo, hi) = omega_window(n_limit, omega);
    let ps = tables.primes().primes();
    let ps = &ps[..ps.partition_point(|&p| p <= n_limit)];
    Ok(ps
        .iter()
        .filter(|&&p| divisors_unchecked(p - 1, tables.spf()).iter().any(|&d| lo < d as f64 && (d as f64) < hi))
        .count() as u64)
}

pub fn omega_window(n_limit: u64, omega: f64) -> (f64, f64) {
    let root = (n_limit as f64).sqrt();
    let l = (n_limit as f64).ln();
    (root * l.powf(-omega), root * l.powf(omega))
}

/// `sum_{p <= N} (sum_{d | p-1, lo < d < hi} chi(d))^2`, exactly.
pub fn char_divisor_moment(n_limit: u64, lo: f64, hi: f64, tables: &Tables, exec: &Exec) -> Result<u64> {
    check_limit(n_limit, tables)?;
    if !(lo >= 1.0) || !(lo <= hi) {
        return Err(Error::invalid(format!("window ({lo}, {hi}) needs 1 <= lo <= hi")));
    }
    let ps = tables.primes().primes();
    let ps = &ps[..ps.partition_point(|&p| p <= n_limit)];
    let spf = tables.spf();
    let squares = exec.map(ps, |&p| {
        let s = chi_divisor_sum(p - 1, spf, |d| lo < d as f64 && (d as f64) < hi);
        (s * s) as u64
    });
    Ok(squares.into_iter().sum())
}

/// `sum_{k <= K} max_{(l,k)=1} sum_{n <= N} |J_{k,l}(n) - S_{k,l}(n) (n-1) / phi(k)|`
/// over `N^2`, with the interval fixed to `[1, N]`. The full quantity takes
/// a further max over subintervals, so this is a lower bound for it.
pub fn bv_discrepancy(n_limit: u64, modulus_bound: u64, tables: &Tables, ctx: &SeriesContext, exec: &Exec) -> Result<f64> {
    check_limit(n_limit, tables)?;
    if modulus_bound == 0 || modulus_bound > isqrt(n_limit) {
        return Err(Error::invalid(format!(
            "modulus bound K = {modulus_bound} must satisfy 1 <= K <= sqrt(N) for N = {n_limit}"
        )));
    }
    let ps = tables.primes().primes();
    let count = ps.partition_point(|&p| p <= n_limit);
    let (ps, logs) = (&ps[..count], &tables.primes().log_weights()[..count]);
    let full = IntervalSpec::full(n_limit);
    let spf = tables.spf();

    let per_k = exec.map_range(1..modulus_bound as usize + 1, |k| -> Result<f64> {
        let k = k as u64;
        let phi_k = totient(k, spf)? as f64;
        let mut worst = 0.0f64;
        let mut j = vec![0.0f64; n_limit as usize + 1];
        for l in 0..k {
            if gcd(k, l) != 1 {
                continue;
            }
            j.fill(0.0);
            for (i1, &p1) in ps.iter().enumerate() {
                if p1 % k != l {
                    continue;
                }
                for (i2, &p2) in ps.iter().enumerate() {
                    if p1 + p2 > n_limit {
                        break;
                    }
                    j[(p1 + p2) as usize] += logs[i1] * logs[i2];
                }
            }
            let mut s = CompensatedSum::new();
            for n in 1..=n_limit {
                let sing = ctx.singular_kl(k, l as i64, n, spf)?;
                let main = sing * phi_interval(n, full) as f64 / phi_k;
                s.add((j[n as usize] - main).abs());
            }
            worst = worst.max(s.value());
        }
        Ok(worst)
    });
    let mut total = CompensatedSum::new();
    for v in per_k {
        total.add(v?);
    }
    let n = n_limit as f64;
    Ok(total.value() / (n * n))
}

pub fn lemma1_report(n_limit: u64, modulus_bound: u64, tables: &Tables, ctx: &SeriesContext, exec: &Exec) -> Result<LemmaReport> {
    let (l, _) = logs(n_limit)?;
    let measured = bv_discrepancy(n_limit, modulus_bound, tables, ctx, exec)?;
    let params = json!({
        "modulus_bound": modulus_bound,
        "A": 1.0,
        "interval": "[1,N]",
        "lower_bound": true,
    });
    Ok(LemmaReport::new(LemmaId::L1, n_limit, params, measured, 1.0 / l))
}

/// With `h` given, the count for that difference; otherwise the maximum
/// over `1 <= h <= N`.
pub fn lemma2_report(n_limit: u64, h: Option<i64>, tables: &Tables, exec: &Exec) -> Result<LemmaReport> {
    let (l, ll) = logs(n_limit)?;
    let envelope = n_limit as f64 * ll / (l * l);
    let (measured, params) = match h {
        Some(h) => (pair_difference_count(n_limit, h, tables)?, json!({ "h": h })),
        None => {
            let profile = pair_difference_profile(n_limit, tables, exec)?;
            let (arg, max) = profile
                .iter()
                .enumerate()
                .skip(1)
                .fold((1, 0), |best, (h, &c)| if c > best.1 { (h, c) } else { best });
            (max, json!({ "h_scan": [1, n_limit], "h_argmax": arg }))
        }
    };
    Ok(LemmaReport::new(LemmaId::L2, n_limit, params, measured as f64, envelope))
}

pub fn lemma3_report(n_limit: u64, omega: f64, tables: &Tables) -> Result<LemmaReport> {
    let (l, ll) = logs(n_limit)?;
    let theta = theta_zero();
    let measured = f_omega_count(n_limit, omega, tables)?;
    let envelope = n_limit as f64 * l.powf(-1.0 - 2.0 * theta) * ll.powi(3);
    let params = json!({ "omega": omega, "theta0": theta });
    Ok(LemmaReport::new(LemmaId::L3, n_limit, params, measured as f64, envelope))
}

pub fn lemma4_report(n_limit: u64, omega: f64, tables: &Tables, exec: &Exec) -> Result<LemmaReport> {
    let (l, ll) = logs(n_limit)?;
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("omega = {omega} must be positive")));
    }
    let (lo, hi) = omega_window(n_limit, omega);
    let measured = char_divisor_moment(n_limit, lo.max(1.0), hi.max(1.0), tables, exec)?;
    let envelope = n_limit as f64 * ll.powi(7) / l;
    let params = json!({ "omega": omega, "window": [lo, hi] });
    Ok(LemmaReport::new(LemmaId::L4, n_limit, params, measured as f64, envelope))
}
