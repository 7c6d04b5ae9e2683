//! Exact bound values and monotonicity, envelope comparisons.

use cmbound::bounds::{
    envelope, envelope_exact, envelope_violations, generic_bound, lower_bound, threshold,
};
use cmbound::numfield::SplittingData;
use num_bigint::BigInt;
use num_rational::BigRational;

fn direct(f: u32, r: u32) -> BigRational {
    let q = BigInt::from(5).pow(f);
    let num = (&q - BigInt::from(1)).pow(2 * r);
    let den = q.pow(2 * r);
    BigRational::new(num, den)
}

#[test]
fn bound_matches_direct_formula() {
    for f in 1..=20 {
        for r in 1..=20 {
            let b = lower_bound(SplittingData::new(1, f, r).unwrap());
            assert_eq!(b.exact, direct(f, r));
        }
    }
}

#[test]
fn bound_monotone_in_f_and_r() {
    for f in 1..=20u32 {
        for r in 1..=20u32 {
            let here = direct(f, r);
            assert!(direct(f + 1, r) > here, "f={f} r={r}");
            assert!(direct(f, r + 1) < here, "f={f} r={r}");
            assert!(here > BigRational::from_integer(0.into()));
            assert!(here < BigRational::from_integer(1.into()));
        }
    }
}

#[test]
fn generic_bound_is_worst_case() {
    for deg in (2..=24u32).step_by(2) {
        let g = generic_bound(deg).unwrap();
        let four_fifths = BigRational::new(4.into(), 5.into());
        assert_eq!(g.exact, num_traits::Pow::pow(four_fifths, 2 * deg as u64));
        // any (e, f, r) with e f r = deg is at least as large
        for e in 1..=deg {
            for f in 1..=deg {
                if deg % (e * f) == 0 {
                    let r = deg / (e * f);
                    assert!(direct(f, r) >= g.exact);
                }
            }
        }
    }
}

#[test]
fn envelope_exact_points() {
    let eighth = num_traits::Pow::pow(BigRational::new(4.into(), 5.into()), 8u32);
    assert_eq!(envelope_exact(4), Some(eighth.clone()));
    assert_eq!(envelope(4), 65536.0 / 390625.0);
    assert!(envelope_exact(24).is_some());
    assert!(envelope_exact(7).is_none());
}

#[test]
fn envelope_below_exact_bound() {
    assert_eq!(envelope_violations(2000), Vec::<u64>::new());
}

#[test]
fn threshold_is_minimal() {
    for eps in [0.9, 0.5, 0.25] {
        let t = threshold(eps, 100_000).unwrap();
        assert!(envelope(t.n) >= 1.0 - eps);
        assert!(envelope(t.n - 1) < 1.0 - eps);
        assert_eq!(t.decreases, 0);
    }
    assert!(threshold(0.0, 100).is_err());
    assert!(threshold(0.01, 100).is_err());
}
