//! Census and classification against naive `(x, y)` point counts.

use cmbound::ffcurves::{census, census_cross_checked, classify, count_points, CurveClass, FFPair};
use cmbound::ffield::make_field;

/// Affine solutions of `y^2 = x^3 + Ax + B` by double loop, plus infinity.
fn naive_points(pair: &FFPair<'_>) -> u64 {
    let s = pair.spec();
    let mut n = 1;
    for x in s.enumerate() {
        let rhs = x * x * x + pair.a * x + pair.b;
        n += s.enumerate().filter(|&y| y * y == rhs).count() as u64;
    }
    n
}

#[test]
fn census_matches_exhaustive_classification() {
    for f in 1..=2usize {
        let s = make_field(5, f).unwrap();
        let q = s.size() as u64;
        let (mut sing, mut ss, mut ord) = (0u64, 0u64, 0u64);
        for a in s.enumerate() {
            for b in s.enumerate() {
                let pair = FFPair { a, b };
                let disc = s.from_int(4) * a * a * a + s.from_int(27) * b * b;
                if disc.is_zero() {
                    sing += 1;
                    assert_eq!(classify(&pair), CurveClass::Singular);
                    continue;
                }
                let n = naive_points(&pair);
                assert_eq!(count_points(&pair).unwrap(), n);
                let t = q as i64 + 1 - n as i64;
                assert!(t * t <= 4 * q as i64, "Hasse bound");
                let supersingular = t.rem_euclid(5) == 0;
                if supersingular {
                    ss += 1;
                } else {
                    ord += 1;
                }
                let expected = if supersingular {
                    CurveClass::Supersingular
                } else {
                    CurveClass::Ordinary
                };
                assert_eq!(classify(&pair), expected);
            }
        }
        let c = census(f).unwrap();
        assert_eq!(
            (c.total, c.singular, c.supersingular, c.ordinary),
            (q * q, sing, ss, ord)
        );
        assert_eq!((sing, ss, ord), (q, q - 1, (q - 1) * (q - 1)));
    }
}

#[test]
fn cross_check_through_degree_three() {
    for f in 1..=3usize {
        let (c, x) = census_cross_checked(f).unwrap();
        let q = c.q;
        assert_eq!(
            (c.singular, c.supersingular, c.ordinary),
            (q, q - 1, (q - 1) * (q - 1))
        );
        assert_eq!(x.checked, q * q - q);
        assert_eq!((x.disagreements, x.hasse_violations), (0, 0));
    }
    assert!(census_cross_checked(4).is_err());
}

#[test]
fn census_degree_limits() {
    assert!(census(0).is_err());
    assert!(census(6).is_err());
    let c = census(4).unwrap();
    assert_eq!(c.ordinary, 624 * 624);
}

#[test]
fn other_characteristics_count_naively() {
    for (p, f) in [(7u32, 1usize), (11, 1), (7, 2)] {
        let s = make_field(p, f).unwrap();
        for a in s.enumerate().step_by(3) {
            for b in s.enumerate().step_by(5) {
                let pair = FFPair { a, b };
                match count_points(&pair) {
                    Ok(n) => assert_eq!(n, naive_points(&pair)),
                    Err(_) => assert_eq!(classify(&pair), CurveClass::Singular),
                }
            }
        }
    }
}
