//! Arithmetic functions: the non-principal character mod 4, the two-squares
//! count `r`, the divisor count `tau`, the local weight `lambda`, the
//! multiplicative weight `f_n(d)` and range-restricted divisor enumeration.

use crate::error::{Error, Result};
use crate::numeric::gcd;
use crate::sieve::SpfTable;

/// A value of the character mod 4: -1, 0 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharValue(i8);

impl CharValue {
    pub const ZERO: CharValue = CharValue(0);
    pub const ONE: CharValue = CharValue(1);
    pub const MINUS_ONE: CharValue = CharValue(-1);

    #[inline]
    pub fn value(self) -> i32 {
        self.0 as i32
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl std::ops::Mul for CharValue {
    type Output = CharValue;
    fn mul(self, rhs: CharValue) -> CharValue {
        CharValue(self.0 * rhs.0)
    }
}

/// chi(k) for the non-principal character modulo 4.
#[inline]
pub fn chi(k: u64) -> CharValue {
    match k % 4 {
        1 => CharValue::ONE,
        3 => CharValue::MINUS_ONE,
        _ => CharValue::ZERO,
    }
}

/// chi on all integers (chi(-1) = -1).
#[inline]
pub fn chi_signed(k: i64) -> CharValue {
    chi(k.rem_euclid(4) as u64)
}

/// All divisors of `k`, ascending.
pub fn divisors(k: u64, spf: &SpfTable) -> Result<Vec<u64>> {
    spf.check(k, "k")?;
    Ok(divisors_unchecked(k, spf))
}

pub(crate) fn divisors_unchecked(k: u64, spf: &SpfTable) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in spf.factors(k) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Sum of chi(d) over the divisors of `k` accepted by `keep`.
pub(crate) fn chi_divisor_sum(k: u64, spf: &SpfTable, keep: impl Fn(u64) -> bool) -> i64 {
    // chi vanishes on even d, so only divisors of the odd part matter
    let odd = k >> k.trailing_zeros();
    let mut divs = vec![1u64];
    for (p, e) in spf.factors(odd) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.into_iter()
        .filter(|&d| keep(d))
        .map(|d| chi(d).value() as i64)
        .sum()
}

/// r(k) computed as `4 * sum_{d | k} chi(d)`.
pub fn r_via_character(k: u64, spf: &SpfTable) -> Result<u64> {
    spf.check(k, "k")?;
    let s = chi_divisor_sum(k, spf, |_| true);
    debug_assert!(s >= 0);
    Ok(4 * s as u64)
}

/// r(k) by direct lattice-point enumeration: ordered integer pairs
/// `(x, y)`, signs and zeros included, with `x^2 + y^2 = k`.
pub fn r_via_lattice(k: u64) -> u64 {
    if k == 0 {
        return 1;
    }
    let mult = |v: u64| if v == 0 { 1 } else { 2 };
    let mut count = 0;
    for x in 0..=k.isqrt() {
        let rest = k - x * x;
        let y = rest.isqrt();
        if y * y == rest {
            count += mult(x) * mult(y);
        }
    }
    count
}

/// Number of positive divisors of `k`.
pub fn tau(k: u64, spf: &SpfTable) -> Result<u64> {
    spf.check(k, "k")?;
    Ok(spf.factors(k).map(|(_, e)| e as u64 + 1).product())
}

/// One end of a real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub value: f64,
    pub inclusive: bool,
}

impl Endpoint {
    pub fn inclusive(value: f64) -> Self {
        Self { value, inclusive: true }
    }

    pub fn strict(value: f64) -> Self {
        Self { value, inclusive: false }
    }
}

/// A real interval with per-endpoint strictness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorRange {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl DivisorRange {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lo: Endpoint::inclusive(lo), hi: Endpoint::inclusive(hi) }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self { lo: Endpoint::strict(lo), hi: Endpoint::strict(hi) }
    }

    #[inline]
    pub fn contains(&self, d: u64) -> bool {
        let x = d as f64;
        let above = if self.lo.inclusive { x >= self.lo.value } else { x > self.lo.value };
        let below = if self.hi.inclusive { x <= self.hi.value } else { x < self.hi.value };
        above && below
    }
}

/// Divisors of `k` inside `range`, ascending.
pub fn divisors_in_range(k: u64, range: DivisorRange, spf: &SpfTable) -> Result<Vec<u64>> {
    spf.check(k, "k")?;
    if range.lo.value.is_nan() || range.hi.value.is_nan() || range.lo.value > range.hi.value {
        return Err(Error::invalid(format!(
            "divisor range needs lo <= hi, got [{}, {}]",
            range.lo.value, range.hi.value
        )));
    }
    let mut d = divisors_unchecked(k, spf);
    d.retain(|&x| range.contains(x));
    Ok(d)
}

/// Product of (p-1)/(p-2) over the given odd primes; 2 contributes nothing.
pub(crate) fn lambda_of_primes(primes: impl IntoIterator<Item = u64>) -> f64 {
    primes
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| (p - 1) as f64 / (p - 2) as f64)
        .product()
}

/// lambda(k) = prod over odd primes p | k of (p-1)/(p-2).
pub fn lambda_weight(k: u64, spf: &SpfTable) -> Result<f64> {
    spf.check(k, "k")?;
    Ok(lambda_of_primes(spf.factors(k).map(|(p, _)| p)))
}

/// lambda(k) as an exact unreduced fraction `(prod (p-1), prod (p-2))`.
pub fn lambda_ratio(k: u64, spf: &SpfTable) -> Result<(u128, u128)> {
    spf.check(k, "k")?;
    Ok(spf
        .factors(k)
        .filter(|&(p, _)| p > 2)
        .fold((1u128, 1u128), |(n, d), (p, _)| (n * (p - 1) as u128, d * (p - 2) as u128)))
}

/// Euler's totient.
pub fn totient(k: u64, spf: &SpfTable) -> Result<u64> {
    spf.check(k, "k")?;
    Ok(spf.factors(k).fold(k, |acc, (p, _)| acc / p * (p - 1)))
}

/// f_n(d) = chi(d) lambda(d) / (phi(d) lambda(gcd(n, d))).
pub fn f_weight(d: u64, n: u64, spf: &SpfTable) -> Result<f64> {
    spf.check(d, "d")?;
    spf.check(n, "n")?;
    let c = chi(d);
    if c == CharValue::ZERO {
        return Ok(0.0);
    }
    let g = gcd(n, d);
    let phi = spf.factors(d).fold(d, |acc, (p, _)| acc / p * (p - 1));
    let lam_d = lambda_of_primes(spf.factors(d).map(|(p, _)| p));
    let lam_g = lambda_of_primes(spf.factors(g).map(|(p, _)| p));
    Ok(c.as_f64() * lam_d / (phi as f64 * lam_g))
}
