//! Exact evaluation of `(1 - 5^-f)^(2r)`, its worst case `(4/5)^(2 deg)`, and
//! the cyclotomic envelope `(1 - 1/(n+1))^(2n / log_5(n+1))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numfield::{normalize, splitting_of_5, RawDescriptor, SplittingData};

/// Significant digits in [`BoundResult::decimal`].
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub e: u32,
    pub f: u32,
    pub r: u32,
    #[serde(serialize_with = "serialize_ratio")]
    pub exact: BigRational,
    pub decimal: String,
    pub note: &'static str,
}

fn serialize_ratio<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(x))
}

/// `num/den` in lowest terms.
pub fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

const E_UNUSED: &str = "depends only on f and r; e is carried for reference";

impl BoundResult {
    /// `((5^f - 1) / 5^f)^(2r)` written as a power, e.g. `(24/25)^2`.
    pub fn power_form(&self) -> String {
        let q = BigInt::from(5u32).pow(self.f);
        format!("({}/{})^{}", &q - 1u32, q, 2 * self.r as u64)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.exact)
    }
}

/// Nearest `f64` to a positive rational. Exact when numerator and
/// denominator both fit in 53 bits, since IEEE division rounds correctly.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    const EXACT: u64 = 1 << 53;
    match (x.numer().to_u64(), x.denom().to_u64()) {
        (Some(n), Some(d)) if n < EXACT && d < EXACT => n as f64 / d as f64,
        _ => x.to_f64().unwrap_or(f64::NAN),
    }
}

/// Round a rational in `(0, 1]` to `digits` significant digits (half-up) and
/// print it in positional notation, or scientific when it is below `1e-6`.
/// Trailing zeros are dropped.
pub fn format_decimal(x: &BigRational, digits: usize) -> String {
    assert!(x.is_positive(), "format_decimal expects a positive value");
    let ten = BigInt::from(10u32);
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(ten.clone().pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), ten.clone().pow((-e) as u32))
        }
    };
    // find k with 10^(k-1) <= x < 10^k
    let mut k: i64 = 0;
    while *x >= pow10(k) {
        k += 1;
    }
    while *x < pow10(k - 1) {
        k -= 1;
    }
    // x = 0.d1 d2 ... * 10^k; take `digits` digits of the mantissa
    let shift = digits as i64 - k;
    let m = x * pow10(shift);
    let (q, rem) = m.numer().div_rem(m.denom());
    let mut mantissa = if BigRational::new(rem * 2, m.denom().clone()) >= BigRational::one() {
        q + 1
    } else {
        q
    };
    if mantissa == ten.clone().pow(digits as u32) {
        mantissa /= &ten;
        k += 1;
    }
    let mut s = mantissa.to_string();
    debug_assert_eq!(s.len(), digits);
    while s.len() > 1 && s.ends_with('0') {
        s.pop();
    }
    if k >= 1 {
        let k = k as usize;
        if s.len() <= k {
            format!("{}{}", s, "0".repeat(k - s.len()))
        } else {
            format!("{}.{}", &s[..k], &s[k..])
        }
    } else if k > -6 {
        format!("0.{}{}", "0".repeat((-k) as usize), s)
    } else {
        let (head, tail) = s.split_at(1);
        let dot = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        format!("{head}{dot}e{}", k - 1)
    }
}

fn bound_value(f: u32, r: u32) -> BigRational {
    let q = BigInt::from(5u32).pow(f);
    let base = BigRational::new(&q - 1u32, q);
    Pow::pow(base, 2 * r as u64)
}

/// `(1 - 5^-f)^(2r)` as an exact rational.
pub fn lower_bound(s: SplittingData) -> BoundResult {
    let exact = bound_value(s.f, s.r);
    BoundResult {
        e: s.e,
        f: s.f,
        r: s.r,
        decimal: format_decimal(&exact, DECIMAL_DIGITS),
        exact,
        note: E_UNUSED,
    }
}

/// Worst case over all splittings of 5 in a CM field of the given degree:
/// `(4/5)^(2 deg)`, reported with `(e, f, r) = (1, 1, deg)`.
pub fn generic_bound(degree: u32) -> Result<BoundResult> {
    if degree == 0 || degree % 2 == 1 {
        return Err(Error::invalid(format!(
            "CM fields have even degree; got {degree}"
        )));
    }
    Ok(lower_bound(SplittingData {
        e: 1,
        f: 1,
        r: degree,
    }))
}

/// Natural log of `(1 - 5^-f)^(2r)`, for comparisons where the exact value
/// would be needlessly large.
pub fn lower_bound_ln(f: u32, r: u32) -> f64 {
    2.0 * r as f64 * (-(5f64).powi(-(f as i32))).ln_1p()
}

/// `k` with `n + 1 = 5^k`, if any.
fn log5_exact(n: u64) -> Option<u32> {
    let mut m = n + 1;
    let mut k = 0;
    while m % 5 == 0 {
        m /= 5;
        k += 1;
    }
    (m == 1 && k > 0).then_some(k)
}

/// Exact envelope when the exponent `2n / log_5(n+1)` is an integer.
pub fn envelope_exact(n: u64) -> Option<BigRational> {
    let k = log5_exact(n)? as u64;
    if (2 * n) % k != 0 {
        return None;
    }
    let base = BigRational::new(BigInt::from(n), BigInt::from(n + 1));
    Some(Pow::pow(base, 2 * n / k))
}

/// `(1 - 1/(n+1))^(2n / log_5(n+1))` for `n >= 2`.
///
/// Computed as `exp(e * ln_1p(-1/(n+1)))`, relative error well under
/// `1e-12`; when the exponent is an integer the correctly rounded exact value
/// is returned instead.
pub fn envelope(n: u64) -> f64 {
    assert!(n >= 1, "envelope is defined for n >= 1");
    if let Some(exact) = envelope_exact(n) {
        return ratio_to_f64(&exact);
    }
    let x = (n + 1) as f64;
    let exponent = 2.0 * n as f64 * 5f64.ln() / x.ln();
    (exponent * (-1.0 / x).ln_1p()).exp()
}

/// The cyclotomic bound for `Q(zeta_n)` with `5 ∤ n`, `n >= 3`.
pub fn cyclotomic_bound(n: u64) -> Result<BoundResult> {
    let d = normalize(RawDescriptor::Cyclotomic(n))?;
    Ok(lower_bound(splitting_of_5(&d)))
}

/// Whether `envelope(n)` is at most the exact cyclotomic bound, compared as
/// exact rationals.
pub fn envelope_below_bound(n: u64) -> Result<bool> {
    let bound = cyclotomic_bound(n)?;
    let env = BigRational::from_float(envelope(n)).expect("finite envelope");
    Ok(env <= bound.exact)
}

/// Admissible `n` in `3..=max` (5 ∤ n, `Q(zeta_n) != Q`) whose envelope
/// exceeds the exact bound. Empty when the inequality holds throughout.
pub fn envelope_violations(max: u64) -> Vec<u64> {
    (3..=max)
        .into_par_iter()
        .filter(|&n| n % 5 != 0)
        .filter(|&n| matches!(envelope_below_bound(n), Ok(false)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub eps: f64,
    pub level: f64,
    pub scan_max: u64,
    /// Minimal `N` with `envelope(n) >= level` for every `n` in `N..=scan_max`.
    pub n: u64,
    pub envelope_at_n: f64,
    /// Smallest `n0` such that the envelope strictly increases on `n0..=scan_max`.
    pub monotone_from: u64,
    /// Number of `n` in `3..=scan_max` with `envelope(n) <= envelope(n - 1)`.
    pub decreases: u64,
}

/// [`threshold_for_level`] with `level = 1 - eps`.
pub fn threshold(eps: f64, scan_max: u64) -> Result<ThresholdReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut report = threshold_for_level(1.0 - eps, scan_max)?;
    report.eps = eps;
    Ok(report)
}

/// Scan `2..=scan_max` for the last `n` whose envelope falls below `level`.
pub fn threshold_for_level(level: f64, scan_max: u64) -> Result<ThresholdReport> {
    if scan_max < 2 {
        return Err(Error::invalid("scan_max must be at least 2"));
    }
    let values: Vec<f64> = (2..=scan_max).into_par_iter().map(envelope).collect();
    let at = |n: u64| values[(n - 2) as usize];
    if at(scan_max) < level {
        return Err(Error::invalid(format!(
            "scan_max {scan_max} is insufficient: envelope({scan_max}) = {} < {level}",
            at(scan_max)
        )));
    }
    let n = (2..=scan_max)
        .rev()
        .find(|&n| at(n) < level)
        .map_or(2, |last_fail| last_fail + 1);
    let mut monotone_from = 2;
    let mut decreases = 0;
    for k in 3..=scan_max {
        if at(k) <= at(k - 1) {
            decreases += 1;
            monotone_from = k;
        }
    }
    Ok(ThresholdReport {
        eps: 1.0 - level,
        level,
        scan_max,
        n,
        envelope_at_n: at(n),
        monotone_from,
        decreases,
    })
}
