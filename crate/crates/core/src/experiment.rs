//! Error sums, exceptional sets and multi-`N` scaling runs built from
//! profiles and main-term tables.
//!
//! Logs are natural (`L = ln N`). Dyadic means are over even
//! `n` in `(N/2, N]`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arith::{chi, totient};
use crate::conv::{batch_profiles, Method, Tables, WeightedProfile};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hooley::{lemma1_report, lemma2_report, lemma3_report, lemma4_report, LemmaReport};
use crate::numeric::CompensatedSum;
use crate::series::{default_d_param, fmt17, theta_zero, truncated_f_sum, MainTermTable, SeriesContext, THETA_ZERO_PRINTED};
use crate::sieve::{cache_file, PrimeTable, SpfTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSums {
    pub e_total: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub t_total: f64,
}

fn check_compatible(profile: &WeightedProfile, mains: &MainTermTable) -> Result<()> {
    if profile.limit != mains.limit {
        return Err(Error::invalid(format!(
            "profile limit {} does not match main-term limit {}",
            profile.limit, mains.limit
        )));
    }
    Ok(())
}

/// Sums over even `4 <= n <= N` of `|R - M_R|`, `|4 S1 - M_R|`, `|S2|`,
/// `|S3|` and `|T - M_T|`.
pub fn error_sums(profile: &WeightedProfile, mains: &MainTermTable) -> Result<ErrorSums> {
    check_compatible(profile, mains)?;
    let mut s = [CompensatedSum::new(); 5];
    for (row, m) in profile.even_rows().zip(&mains.rows) {
        s[0].add((row.r - m.m_r).abs());
        s[1].add((4.0 * row.s1 - m.m_r).abs());
        s[2].add(row.s2.abs());
        s[3].add(row.s3.abs());
        s[4].add((row.t - m.m_t).abs());
    }
    Ok(ErrorSums {
        e_total: s[0].value(),
        e1: s[1].value(),
        e2: s[2].value(),
        e3: s[3].value(),
        t_total: s[4].value(),
    })
}

/// `#{even n <= N : |R(n) - M_R(n)| > N L^-theta}`.
pub fn exceptional_count(profile: &WeightedProfile, mains: &MainTermTable, theta: f64) -> Result<u64> {
    check_compatible(profile, mains)?;
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::invalid(format!("theta = {theta} must lie in (0, 1/2)")));
    }
    let n = profile.limit as f64;
    let threshold = n * n.ln().powf(-theta);
    Ok(profile
        .even_rows()
        .zip(&mains.rows)
        .filter(|(row, m)| (row.r - m.m_r).abs() > threshold)
        .count() as u64)
}

/// `S1'(n) = c0 lambda(n) sum_{d <= D} f_n(d)`.
pub fn s1_prime(n: u64, d_param: f64, lambda_n: f64, ctx: &SeriesContext, spf: &SpfTable) -> Result<f64> {
    Ok(ctx.twin_constant() * lambda_n * truncated_f_sum(n, d_param, spf)?)
}

/// `sum_{d <= D} chi(d) S_{d,1}(n) / phi(d)`, the same quantity as
/// [`s1_prime`] summed straight from the singular series.
pub fn s1_prime_from_series(n: u64, d_param: f64, ctx: &SeriesContext, spf: &SpfTable) -> Result<f64> {
    let mut s = CompensatedSum::new();
    for d in (1..=d_param.floor() as u64).step_by(2) {
        let c = chi(d).as_f64();
        s.add(c * ctx.singular_kl(d, 1, n, spf)? / totient(d, spf)? as f64);
    }
    Ok(s.value())
}

/// `E1` against its split `E1' = sum |4 (n-1) S1' - M_R|` and
/// `E1* = sum 4 |S1 - (n-1) S1'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct E1Split {
    pub e1: f64,
    pub e1_prime: f64,
    pub e1_star: f64,
}

pub fn e1_split(profile: &WeightedProfile, mains: &MainTermTable, ctx: &SeriesContext, spf: &SpfTable) -> Result<E1Split> {
    check_compatible(profile, mains)?;
    let mut e1 = CompensatedSum::new();
    let mut e1p = CompensatedSum::new();
    let mut e1s = CompensatedSum::new();
    for (row, m) in profile.even_rows().zip(&mains.rows) {
        let main_s1 = (row.n - 1) as f64 * s1_prime(row.n, profile.d_param, m.lambda_n, ctx, spf)?;
        e1.add((4.0 * row.s1 - m.m_r).abs());
        e1p.add((4.0 * main_s1 - m.m_r).abs());
        e1s.add(4.0 * (row.s1 - main_s1).abs());
    }
    Ok(E1Split {
        e1: e1.value(),
        e1_prime: e1p.value(),
        e1_star: e1s.value(),
    })
}

/// Means of `|R/M_R - 1|` and `|T/M_T - 1|` over even `n` in `(N/2, N]`.
pub fn dyadic_deviation(profile: &WeightedProfile, mains: &MainTermTable) -> Result<(f64, f64)> {
    check_compatible(profile, mains)?;
    let half = profile.limit / 2;
    let mut r = CompensatedSum::new();
    let mut t = CompensatedSum::new();
    let mut count = 0u64;
    for (row, m) in profile.even_rows().zip(&mains.rows).filter(|(row, _)| row.n > half) {
        r.add((row.r / m.m_r - 1.0).abs());
        t.add((row.t / m.m_t - 1.0).abs());
        count += 1;
    }
    let c = count.max(1) as f64;
    Ok((r.value() / c, t.value() / c))
}

/// `n,r,m_R,abs_err,rel_err,t,m_T` for even `4 <= n <= N`.
pub fn write_residual_csv<W: Write>(profile: &WeightedProfile, mains: &MainTermTable, mut w: W) -> Result<()> {
    check_compatible(profile, mains)?;
    writeln!(w, "n,r,m_R,abs_err,rel_err,t,m_T")?;
    for (row, m) in profile.even_rows().zip(&mains.rows) {
        let abs = (row.r - m.m_r).abs();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            row.n,
            fmt17(row.r),
            fmt17(m.m_r),
            fmt17(abs),
            fmt17(abs / m.m_r),
            fmt17(row.t),
            fmt17(m.m_t)
        )?;
    }
    Ok(())
}

/// Knobs for [`run_single`] and [`scaling_study`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    /// `None` picks [`default_d_param`] for each `N`.
    pub d_param: Option<f64>,
    pub method: Method,
    pub theta: f64,
    /// Run the lemma meters with this modulus bound and omega.
    pub lemmas: Option<LemmaOptions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaOptions {
    pub modulus_bound: u64,
    pub omega: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            d_param: None,
            method: Method::Direct,
            theta: theta_zero() / 2.0,
            lemmas: Some(LemmaOptions { modulus_bound: 8, omega: 1.0 }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_limit: u64,
    pub d_param: f64,
    pub e_total: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub t_total: f64,
    pub normalized_r: f64,
    /// `normalized_r` with the printed `theta0 = 0.0029`
    pub normalized_r_printed_theta0: f64,
    pub normalized_t: f64,
    pub mean_rel_dev_r: f64,
    pub mean_rel_dev_t: f64,
    pub exceptional_count: u64,
    /// exceptional count at half the printed `theta0`
    pub exceptional_count_printed_theta0: u64,
    pub lemmas: Vec<LemmaReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n_limit: u64,
    pub d_param: f64,
    pub theta: f64,
    pub theta0: f64,
    pub theta0_printed: f64,
    pub log_base: String,
    pub e_total: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub t_total: f64,
    pub normalized_r: f64,
    pub normalized_t: f64,
    pub exceptional_count: u64,
    #[serde(rename = "rows_per_N")]
    pub rows_per_n: Vec<ScalingRow>,
}

/// One `N`: tables, profile, main terms and the derived row.
pub struct SingleRun {
    pub tables: Tables,
    pub profile: WeightedProfile,
    pub mains: MainTermTable,
    pub row: ScalingRow,
}

pub fn run_single(n_limit: u64, opts: &StudyOptions, ctx: &SeriesContext, exec: &Exec, cache_dir: Option<&Path>) -> Result<SingleRun> {
    let primes = match cache_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            PrimeTable::load_or_build(n_limit, &cache_file(dir, n_limit), exec)?
        }
        None => PrimeTable::build_with(n_limit, exec)?,
    };
    let tables = Tables::from_prime_table(primes, exec)?;
    let d_param = opts.d_param.unwrap_or_else(|| default_d_param(n_limit));
    let profile = batch_profiles(&tables, opts.method, d_param, exec)?;
    let mains = ctx.build_main_term_table(n_limit, tables.spf(), exec)?;
    let sums = error_sums(&profile, &mains)?;
    let (dev_r, dev_t) = dyadic_deviation(&profile, &mains)?;

    let n = n_limit as f64;
    let (l, ll) = (n.ln(), n.ln().ln());
    let norm_r = |theta0: f64| sums.e_total / (n * n * l.powf(-theta0) * ll.powi(6));
    let lemmas = match opts.lemmas {
        Some(lo) => vec![
            lemma1_report(n_limit, lo.modulus_bound, &tables, ctx, exec)?,
            lemma2_report(n_limit, None, &tables, exec)?,
            lemma3_report(n_limit, lo.omega, &tables)?,
            lemma4_report(n_limit, lo.omega, &tables, exec)?,
        ],
        None => Vec::new(),
    };
    let row = ScalingRow {
        n_limit,
        d_param,
        e_total: sums.e_total,
        e1: sums.e1,
        e2: sums.e2,
        e3: sums.e3,
        t_total: sums.t_total,
        normalized_r: norm_r(theta_zero()),
        normalized_r_printed_theta0: norm_r(THETA_ZERO_PRINTED),
        normalized_t: sums.t_total / (n * n * ll.powi(3)),
        mean_rel_dev_r: dev_r,
        mean_rel_dev_t: dev_t,
        exceptional_count: exceptional_count(&profile, &mains, opts.theta)?,
        exceptional_count_printed_theta0: exceptional_count(&profile, &mains, THETA_ZERO_PRINTED / 2.0)?,
        lemmas,
    };
    Ok(SingleRun { tables, profile, mains, row })
}

/// Runs every `N` in `limits` (ascending); the headline fields describe the
/// last one. Also returns the last run for residual output.
pub fn scaling_study(
    limits: &[u64],
    opts: &StudyOptions,
    ctx: &SeriesContext,
    exec: &Exec,
    cache_dir: Option<&Path>,
) -> Result<(ExperimentReport, SingleRun)> {
    if limits.is_empty() {
        return Err(Error::invalid("scaling study needs at least one N"));
    }
    if limits.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("scaling limits must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(limits.len());
    let mut last = None;
    for &n in limits {
        let run = run_single(n, opts, ctx, exec, cache_dir)?;
        rows.push(run.row.clone());
        last = Some(run);
    }
    let last = last.unwrap();
    let top = &last.row;
    let report = ExperimentReport {
        n_limit: top.n_limit,
        d_param: top.d_param,
        theta: opts.theta,
        theta0: theta_zero(),
        theta0_printed: THETA_ZERO_PRINTED,
        log_base: "e".into(),
        e_total: top.e_total,
        e1: top.e1,
        e2: top.e2,
        e3: top.e3,
        t_total: top.t_total,
        normalized_r: top.normalized_r,
        normalized_t: top.normalized_t,
        exceptional_count: top.exceptional_count,
        rows_per_n: rows,
    };
    Ok((report, last))
}
