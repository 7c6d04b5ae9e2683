//! Short-Weierstrass curves `y^2 = x^3 + Ax + B` over `F_q`: discriminant,
//! Deuring-coefficient supersingularity test, naive point counts, and the
//! exhaustive census over `F_{5^f}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{make_field, FFElem, FieldSpec};

/// Largest degree `f` accepted by [`census`].
pub const CENSUS_MAX_DEGREE: usize = 5;
/// Largest degree for which the census also cross-checks by point counting.
pub const CROSS_CHECK_MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FFPair<'a> {
    pub a: FFElem<'a>,
    pub b: FFElem<'a>,
}

impl<'a> FFPair<'a> {
    pub fn new(a: FFElem<'a>, b: FFElem<'a>) -> Result<Self> {
        if a.spec() != b.spec() {
            return Err(Error::MixedFields);
        }
        Ok(FFPair { a, b })
    }

    pub fn from_ints(spec: &'a FieldSpec, a: i64, b: i64) -> Self {
        FFPair {
            a: spec.from_int(a),
            b: spec.from_int(b),
        }
    }

    pub fn spec(&self) -> &'a FieldSpec {
        self.a.spec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveClass {
    Singular,
    Supersingular,
    Ordinary,
}

/// `-16(4A^3 + 27B^2)`.
pub fn discriminant<'a>(pair: &FFPair<'a>) -> FFElem<'a> {
    let s = pair.spec();
    let a3 = pair.a * pair.a * pair.a;
    let b2 = pair.b * pair.b;
    s.from_int(-16) * (s.from_int(4) * a3 + s.from_int(27) * b2)
}

/// Coefficient of `x^(p-1)` in `(x^3 + Ax + B)^((p-1)/2)`.
///
/// The power is taken with every intermediate product truncated above degree
/// `p - 1`, which leaves the wanted coefficient unchanged.
pub fn deuring_coefficient<'a>(pair: &FFPair<'a>) -> FFElem<'a> {
    let s = pair.spec();
    let top = s.characteristic() as usize - 1;
    let cubic = [pair.b, pair.a, s.zero(), s.one()];
    let mut acc = vec![s.zero(); top + 1];
    acc[0] = s.one();
    for _ in 0..top / 2 {
        let mut next = vec![s.zero(); top + 1];
        for (i, &c) in acc.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, &d) in cubic.iter().enumerate() {
                if i + j > top {
                    break;
                }
                if !d.is_zero() {
                    next[i + j] = next[i + j] + c * d;
                }
            }
        }
        acc = next;
    }
    acc[top]
}

pub fn classify(pair: &FFPair<'_>) -> CurveClass {
    if discriminant(pair).is_zero() {
        CurveClass::Singular
    } else if deuring_coefficient(pair).is_zero() {
        CurveClass::Supersingular
    } else {
        CurveClass::Ordinary
    }
}

/// Number of projective points, `1 + sum_x (1 + chi(x^3 + Ax + B))`.
pub fn count_points(pair: &FFPair<'_>) -> Result<u64> {
    let chi = pair.spec().quadratic_character_table();
    count_points_with(pair, &chi)
}

/// [`count_points`] with a precomputed quadratic character table, for loops
/// that count many curves over one field.
pub fn count_points_with(pair: &FFPair<'_>, chi: &[i8]) -> Result<u64> {
    if discriminant(pair).is_zero() {
        return Err(Error::Singular);
    }
    let s = pair.spec();
    let mut total: i64 = 1 + s.size() as i64;
    for x in s.enumerate() {
        let rhs = x * x * x + pair.a * x + pair.b;
        total += chi[rhs.index() as usize] as i64;
    }
    Ok(total as u64)
}

/// Frobenius trace `q + 1 - N`.
pub fn trace(pair: &FFPair<'_>) -> Result<i64> {
    let n = count_points(pair)?;
    Ok(pair.spec().size() as i64 + 1 - n as i64)
}

/// Supersingular iff the Frobenius trace vanishes mod `p`.
pub fn is_supersingular_trace(pair: &FFPair<'_>) -> Result<bool> {
    let t = trace(pair)?;
    Ok(t.rem_euclid(pair.spec().characteristic() as i64) == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    pub q: u64,
    pub total: u64,
    pub singular: u64,
    pub supersingular: u64,
    pub ordinary: u64,
}

/// Outcome of checking Deuring classification against the trace test on
/// every nonsingular pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub checked: u64,
    pub disagreements: u64,
    pub hasse_violations: u64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    singular: u64,
    supersingular: u64,
    ordinary: u64,
    checked: u64,
    disagreements: u64,
    hasse_violations: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            singular: self.singular + o.singular,
            supersingular: self.supersingular + o.supersingular,
            ordinary: self.ordinary + o.ordinary,
            checked: self.checked + o.checked,
            disagreements: self.disagreements + o.disagreements,
            hasse_violations: self.hasse_violations + o.hasse_violations,
        }
    }
}

fn census_field(f: usize, cross_check: bool) -> Result<FieldSpec> {
    if f == 0 || f > CENSUS_MAX_DEGREE {
        return Err(Error::invalid(format!(
            "census degree must be in 1..={CENSUS_MAX_DEGREE}, got {f}"
        )));
    }
    if cross_check && f > CROSS_CHECK_MAX_DEGREE {
        return Err(Error::invalid(format!(
            "point-count cross-check needs f <= {CROSS_CHECK_MAX_DEGREE}, got {f}"
        )));
    }
    make_field(5, f)
}

fn run_census(spec: &FieldSpec, cross_check: bool) -> Tally {
    let q = spec.size();
    let chi = cross_check.then(|| spec.quadratic_character_table());
    let bound_sq = 4 * q as i64; // Hasse: t^2 <= 4q
    (0..q)
        .into_par_iter()
        .map(|ia| {
            let a = spec.element(ia);
            let mut t = Tally::default();
            for b in spec.enumerate() {
                let pair = FFPair { a, b };
                let class = classify(&pair);
                match class {
                    CurveClass::Singular => t.singular += 1,
                    CurveClass::Supersingular => t.supersingular += 1,
                    CurveClass::Ordinary => t.ordinary += 1,
                }
                if let (Some(chi), false) = (&chi, class == CurveClass::Singular) {
                    let n = count_points_with(&pair, chi).expect("nonsingular");
                    let tr = q as i64 + 1 - n as i64;
                    t.checked += 1;
                    if (tr % 5 == 0) != (class == CurveClass::Supersingular) {
                        t.disagreements += 1;
                    }
                    if tr * tr > bound_sq {
                        t.hasse_violations += 1;
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// Classify every pair in `F_{5^f}^2`.
pub fn census(f: usize) -> Result<CensusResult> {
    let spec = census_field(f, false)?;
    Ok(to_result(&spec, run_census(&spec, false)))
}

/// Census plus the point-count cross-check (`f <= 3`).
pub fn census_cross_checked(f: usize) -> Result<(CensusResult, CrossCheck)> {
    let spec = census_field(f, true)?;
    let t = run_census(&spec, true);
    Ok((
        to_result(&spec, t),
        CrossCheck {
            checked: t.checked,
            disagreements: t.disagreements,
            hasse_violations: t.hasse_violations,
        },
    ))
}

fn to_result(spec: &FieldSpec, t: Tally) -> CensusResult {
    let q = spec.size() as u64;
    CensusResult {
        q,
        total: q * q,
        singular: t.singular,
        supersingular: t.supersingular,
        ordinary: t.ordinary,
    }
}
