//! Self-contained invariant suite behind the `verify` command. Every check
//! rebuilds what it needs at a small limit and compares against a
//! brute-force or independent route.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::arith::{chi, lambda_weight, r_via_character, r_via_lattice};
use crate::conv::{
    batch_profiles, s3_complementary, s3_prime_term, s_split, weighted_rep_direct, Method, Tables, WeightKind,
};
use crate::error::Result;
use crate::exec::Exec;
use crate::hooley::{char_divisor_moment, f_omega_count, omega_window, pair_difference_count};
use crate::series::{SeriesContext, TruncationConfig};
use crate::sieve::factorize;

pub const QUICK_LIMIT: u64 = 1 << 10;
pub const FULL_LIMIT: u64 = 1 << 14;

/// Deliberate corruption, to confirm the suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Adds 4 to the stored `r(p - 1)` of `p = 5`.
    RTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: Vec<String>) -> CheckResult {
    let passed = failures.is_empty();
    let detail = match failures.len() {
        0 => "ok".to_string(),
        1 => failures[0].clone(),
        k => format!("{} (and {} more)", failures[0], k - 1),
    };
    CheckResult { name, passed, detail }
}

fn is_prime_trial(k: u64) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

fn rel_close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs.max(rel * a.abs().max(b.abs()))
}

pub fn run_suite(quick: bool, fault: Option<Fault>, cutoff: u64, exec: &Exec) -> Result<Vec<CheckResult>> {
    let n_limit = if quick { QUICK_LIMIT } else { FULL_LIMIT };
    let small = n_limit.min(1000);
    let mut tables = Tables::build(n_limit, exec)?;
    if fault == Some(Fault::RTable) {
        let v = tables.r_weights()[2];
        tables.set_r_weight(2, v + 4.0);
    }
    let ctx = SeriesContext::new_with(TruncationConfig::new(cutoff)?, exec)?;
    let spf = tables.spf();
    let d_param = (n_limit as f64).sqrt() / 2.0;
    let mut out = Vec::new();

    out.push(check(
        "sieve matches trial division",
        (0..=n_limit)
            .filter(|&k| tables.primes().is_prime(k) != is_prime_trial(k))
            .map(|k| format!("k={k}"))
            .collect(),
    ));

    out.push(check(
        "factorization multiplies back",
        (2..=n_limit)
            .filter(|&k| {
                let f = factorize(k, spf).unwrap();
                f.iter().map(|&(p, e)| p.pow(e)).product::<u64>() != k || f.iter().any(|&(p, _)| !is_prime_trial(p))
            })
            .map(|k| format!("k={k}"))
            .collect(),
    ));

    out.push(check(
        "r via character equals lattice count",
        (1..=n_limit)
            .filter(|&k| r_via_character(k, spf).unwrap() != r_via_lattice(k))
            .map(|k| format!("k={k}"))
            .collect(),
    ));

    out.push(check(
        "stored r(p-1) equals lattice count",
        tables
            .primes()
            .primes()
            .iter()
            .zip(tables.r_weights())
            .filter(|&(&p, &w)| w != r_via_lattice(p - 1) as f64)
            .map(|(p, w)| format!("p={p} stored {w}"))
            .collect(),
    ));

    let mut rep_fail = Vec::new();
    for n in (4..=small).step_by(2) {
        let (mut r, mut t) = (0.0, 0.0);
        for p1 in 2..n - 1 {
            if is_prime_trial(p1) && is_prime_trial(n - p1) {
                let w = (p1 as f64).ln() * ((n - p1) as f64).ln();
                r += r_via_lattice(p1 - 1) as f64 * w;
                t += (1..p1).filter(|d| (p1 - 1) % d == 0).count() as f64 * w;
            }
        }
        let got_r = weighted_rep_direct(n, WeightKind::R, &tables)?;
        let got_t = weighted_rep_direct(n, WeightKind::Tau, &tables)?;
        if !rel_close(got_r, r, 1e-12, 1e-12) || !rel_close(got_t, t, 1e-12, 1e-12) {
            rep_fail.push(format!("n={n}"));
        }
    }
    out.push(check("R and T match brute-force pair loop", rep_fail));

    let direct = batch_profiles(&tables, Method::Direct, d_param, exec)?;
    let conv = batch_profiles(&tables, Method::Convolution, d_param, exec)?;

    out.push(check(
        "4 (S1 + S2 + S3) equals R",
        direct
            .even_rows()
            .filter(|row| !rel_close(4.0 * (row.s1 + row.s2 + row.s3), row.r, 1e-9, 0.0))
            .map(|row| format!("n={}", row.n))
            .collect(),
    ));

    let mut dual_fail = Vec::new();
    for ((name, a), (_, b)) in direct.columns().iter().zip(conv.columns().iter()) {
        for (h, (x, y)) in a.iter().zip(b.iter()).enumerate().skip(2) {
            if !rel_close(*x, *y, 1e-9, 1e-6) {
                dual_fail.push(format!("{name} n={}", 2 * h));
            }
        }
    }
    out.push(check("direct and convolution batches agree", dual_fail));

    let mut batch_fail = Vec::new();
    for n in (4..=n_limit).step_by(2).filter(|n| n % 98 == 0 || *n <= 64) {
        let row = direct.row(n).unwrap();
        let s = s_split(n, d_param, &tables)?;
        if row.j != weighted_rep_direct(n, WeightKind::Unit, &tables)?
            || row.r != weighted_rep_direct(n, WeightKind::R, &tables)?
            || (row.s1, row.s2, row.s3) != (s.s1, s.s2, s.s3)
        {
            batch_fail.push(format!("n={n}"));
        }
    }
    out.push(check("batch rows equal single-n sums", batch_fail));

    let mut s3_fail = Vec::new();
    for n in (4..=n_limit).step_by(2).filter(|n| n % 34 == 0) {
        if s_split(n, d_param, &tables)?.s3 != s3_complementary(n, d_param, &tables)? {
            s3_fail.push(format!("n={n} complementary route"));
        }
        let p = s3_prime_term(n, d_param, &tables, &ctx)?;
        if p.value.abs() > 1e-9 * p.positive_part {
            s3_fail.push(format!("n={n} S3' = {}", p.value));
        }
    }
    out.push(check("S3 routes agree and S3' cancels", s3_fail));

    let mut sing_fail = Vec::new();
    for m in (2..=(n_limit / 4).min(200)).step_by(2) {
        for n in (2..=n_limit).step_by(2) {
            let k = 4 * m;
            let a = ctx.singular_kl(k, 1 + m as i64, n, spf)?;
            let b = ctx.singular_kl(k, 1 - m as i64, n, spf)?;
            if a.to_bits() != b.to_bits() {
                sing_fail.push(format!("m={m} n={n}"));
            }
        }
    }
    out.push(check("singular series independent of the sign j", sing_fail));

    let mains = ctx.build_main_term_table(n_limit, spf, exec)?;
    let mut main_fail = Vec::new();
    for m in mains.rows.iter().filter(|m| m.n % 62 == 0 || m.n <= 40) {
        let r = ctx.main_term_r(m.n, spf)?;
        let t = ctx.main_term_t(m.n, spf)?;
        let f0 = ctx.f_n_zero(m.n, spf)?;
        let lam = lambda_weight(m.n, spf)?;
        let via_f0 = 4.0 * m.n as f64 * ctx.twin_constant() * lam * f0;
        if !rel_close(m.m_r, r, 1e-12, 0.0) || !rel_close(m.m_t, t, 1e-12, 0.0) || !rel_close(r, via_f0, 1e-12, 0.0) {
            main_fail.push(format!("n={}", m.n));
        }
    }
    if !mains.lambda_consistent(spf) {
        main_fail.push("lambda column".into());
    }
    out.push(check("main-term table matches single evaluations", main_fail));

    let e = Exec::sequential();
    let mut lemma_fail = Vec::new();
    let primes: Vec<u64> = (2..=small).filter(|&p| is_prime_trial(p)).collect();
    for h in [1i64, 2, 4, 6, 30, -2] {
        let brute = primes
            .iter()
            .filter(|&&p| p as i64 + h >= 2 && p as i64 + h <= small as i64 && is_prime_trial((p as i64 + h) as u64))
            .count() as u64;
        if pair_difference_count(small, h, &tables)? != brute {
            lemma_fail.push(format!("pair difference h={h}"));
        }
    }
    for omega in [0.2, 1.0] {
        let (lo, hi) = omega_window(small, omega);
        let in_window = |d: u64| lo < d as f64 && (d as f64) < hi;
        let brute_f = primes
            .iter()
            .filter(|&&p| (1..p).any(|d| (p - 1) % d == 0 && in_window(d)))
            .count() as u64;
        if f_omega_count(small, omega, &tables)? != brute_f {
            lemma_fail.push(format!("F_omega omega={omega}"));
        }
        let brute_m: u64 = primes
            .iter()
            .map(|&p| {
                let s: i64 = (1..p).filter(|&d| (p - 1) % d == 0 && in_window(d)).map(|d| chi(d).value() as i64).sum();
                (s * s) as u64
            })
            .sum();
        if char_divisor_moment(small, lo.max(1.0), hi, &tables, &e)? != brute_m {
            lemma_fail.push(format!("moment omega={omega}"));
        }
    }
    out.push(check("lemma meters match brute force", lemma_fail));

    Ok(out)
}

pub fn write_table<W: Write>(results: &[CheckResult], mut w: W) -> std::io::Result<()> {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for r in results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        writeln!(w, "{mark}  {:width$}  {}", r.name, r.detail)?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(w, "{} checks, {} failed", results.len(), failed)
}
