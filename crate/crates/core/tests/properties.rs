use goldweight::arith::{chi, f_weight, lambda_weight, totient};
use goldweight::conv::{s3_complementary, s_split, weighted_rep_direct, Tables, WeightKind};
use goldweight::numeric::gcd;
use goldweight::series::{SeriesContext, TruncationConfig};
use goldweight::sieve::{factorize, PrimeTable, SpfTable};
use goldweight::Exec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn is_prime_trial(k: u64) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

#[test]
fn sieve_spot_checks_and_counts() {
    let t = PrimeTable::build(10_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let k = rng.gen_range(0..=10_000_000u64);
        assert_eq!(t.is_prime(k), is_prime_trial(k), "k={k}");
    }
    for n in [1_000u64, 10_000, 100_000] {
        let trial = (2..=n).filter(|&k| is_prime_trial(k)).count();
        assert_eq!(t.count_up_to(n), trial);
    }
}

#[test]
fn factorize_multiplies_back() {
    let spf = SpfTable::build(200_000).unwrap();
    for k in 2..=200_000u64 {
        let f = factorize(k, &spf).unwrap();
        assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), k);
        assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

#[test]
fn chi_and_f_multiplicative_on_random_pairs() {
    let spf = SpfTable::build(1_000_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut coprime = 0;
    while coprime < 10_000 {
        let a = rng.gen_range(1..1000u64);
        let b = rng.gen_range(1..1000u64);
        assert_eq!(chi(a * b), chi(a) * chi(b));
        if gcd(a, b) != 1 {
            continue;
        }
        coprime += 1;
        let n = 2 * rng.gen_range(1..500_000u64);
        let lhs = f_weight(a * b, n, &spf).unwrap();
        let rhs = f_weight(a, n, &spf).unwrap() * f_weight(b, n, &spf).unwrap();
        assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1e-300), "a={a} b={b} n={n}");
        let bound = lambda_weight(a * b, &spf).unwrap() / totient(a * b, &spf).unwrap() as f64;
        assert!(lhs.abs() <= bound * (1.0 + 1e-14));
    }
}

#[test]
fn decomposition_identity_at_both_cuts() {
    // D = n/10 needs N > (n/10)^2, so the tables reach past 1e6
    let tables = Tables::build(1_000_100, &Exec::sequential()).unwrap();
    for n in (12..=10_000u64).step_by(2) {
        let r = weighted_rep_direct(n, WeightKind::R, &tables).unwrap();
        for d in [(n as f64).sqrt(), n as f64 / 10.0] {
            let s = s_split(n, d, &tables).unwrap();
            let sum = 4.0 * (s.s1 + s.s2 + s.s3);
            assert!((sum - r).abs() <= 1e-9 * r.abs(), "n={n} D={d}: {sum} vs {r}");
            assert_eq!(s.s3.to_bits(), s3_complementary(n, d, &tables).unwrap().to_bits());
        }
    }
}

#[test]
fn unit_profile_is_symmetric_under_swap() {
    let tables = Tables::build(3000, &Exec::sequential()).unwrap();
    let ps = tables.primes().primes();
    for n in (4..=3000u64).step_by(2) {
        // reversed pair order gives the same multiset of terms
        let mut rev = 0.0;
        for &p in ps.iter().rev().filter(|&&p| p < n) {
            if tables.primes().is_prime(n - p) {
                rev += (p as f64).ln() * ((n - p) as f64).ln();
            }
        }
        let j = weighted_rep_direct(n, WeightKind::Unit, &tables).unwrap();
        assert!((j - rev).abs() <= 1e-12 * j.max(1.0));
    }
}

#[test]
fn singular_series_zero_is_exact() {
    let ctx = SeriesContext::new(TruncationConfig::new(100_000).unwrap()).unwrap();
    let spf = SpfTable::build(10_000).unwrap();
    for k in 1..=60u64 {
        for l in -60i64..=60 {
            if gcd(k, l.unsigned_abs()) != 1 {
                assert!(ctx.singular_kl(k, l, 100, &spf).is_err());
                continue;
            }
            for n in 1..=300u64 {
                let v = ctx.singular_kl(k, l, n, &spf).unwrap();
                let excluded = n % 2 == 1 || gcd(k, (n as i64 - l).unsigned_abs()) != 1;
                if excluded {
                    assert_eq!(v.to_bits(), 0f64.to_bits(), "k={k} l={l} n={n}");
                } else {
                    assert!(v > 0.0);
                }
            }
        }
    }
}

#[test]
fn truncation_changes_products_within_tail_bound() {
    let spf = SpfTable::build(5000).unwrap();
    let cutoffs = [1_000u64, 10_000, 100_000, 1_000_000];
    let ctxs: Vec<_> = cutoffs
        .iter()
        .map(|&p| SeriesContext::new(TruncationConfig::new(p).unwrap()).unwrap())
        .collect();
    for w in ctxs.windows(2) {
        let bound = w[0].config().tail_bound.exp();
        let ratio = |a: f64, b: f64| if a > b { a / b } else { b / a };
        assert!(ratio(w[0].twin_constant(), w[1].twin_constant()) <= bound);
        assert!(ratio(w[0].titchmarsh_constant(), w[1].titchmarsh_constant()) <= bound);
        for n in (4..=5000u64).step_by(142) {
            assert!(ratio(w[0].main_term_r(n, &spf).unwrap(), w[1].main_term_r(n, &spf).unwrap()) <= bound);
            assert!(ratio(w[0].main_term_t(n, &spf).unwrap(), w[1].main_term_t(n, &spf).unwrap()) <= bound);
        }
    }
}

fn shared_tables() -> &'static Tables {
    static T: std::sync::OnceLock<Tables> = std::sync::OnceLock::new();
    T.get_or_init(|| Tables::build(20_000, &Exec::sequential()).unwrap())
}

proptest! {
    #[test]
    fn split_sums_to_r_for_any_admissible_cut(h in 2u64..10_000, d in 1.01f64..141.0) {
        let tables = shared_tables();
        let n = 2 * h;
        let r = weighted_rep_direct(n, WeightKind::R, tables).unwrap();
        let s = s_split(n, d, tables).unwrap();
        prop_assert!((4.0 * (s.s1 + s.s2 + s.s3) - r).abs() <= 1e-9 * r.abs().max(1e-300));
    }

    #[test]
    fn weighted_sums_are_nonnegative_and_ordered(h in 2u64..10_000) {
        let tables = shared_tables();
        let n = 2 * h;
        let j = weighted_rep_direct(n, WeightKind::Unit, tables).unwrap();
        let t = weighted_rep_direct(n, WeightKind::Tau, tables).unwrap();
        let r = weighted_rep_direct(n, WeightKind::R, tables).unwrap();
        prop_assert!(j >= 0.0 && r >= 0.0);
        // tau(p - 1) >= 1 for every p, and >= 2 once p > 2
        prop_assert!(t >= j);
    }
}
