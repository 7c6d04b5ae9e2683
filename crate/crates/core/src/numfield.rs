//! Imaginary quadratic and cyclotomic fields: descriptors, the splitting of 5,
//! and reduction maps from the ring of integers onto the residue fields above 5.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{
    euler_phi, is_squarefree, legendre, multiplicative_order, pow_mod, prime_factors,
};
use crate::error::{Error, Result};
use crate::ffield::{make_field, FFElem, FieldSpec, FpPoly};

/// A supported Galois CM field.
///
/// `Quadratic { m }` is `Q(sqrt(-m))` with integral basis `{1, w}`, where
/// `w = sqrt(-m)` unless `m = 3 (mod 4)`, in which case `w = (1 + sqrt(-m))/2`.
/// `Cyclotomic { n }` is `Q(zeta_n)` with power basis, `n` normalized so that
/// `n != 2 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Quadratic { m: u64 },
    Cyclotomic { n: u64 },
}

/// Unvalidated field request, as parsed from user input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawDescriptor {
    Quadratic(u64),
    Cyclotomic(u64),
}

impl RawDescriptor {
    /// Whether the requested field contains a primitive 5th root of unity.
    /// Quadratic fields never do; `Q(zeta_n)` does exactly when `5 | n`.
    pub fn contains_zeta5(&self) -> bool {
        match *self {
            RawDescriptor::Quadratic(_) => false,
            RawDescriptor::Cyclotomic(n) => n % 5 == 0,
        }
    }
}

/// Validate and canonicalize a field request.
pub fn normalize(raw: RawDescriptor) -> Result<FieldDescriptor> {
    match raw {
        RawDescriptor::Quadratic(m) => {
            if m == 0 || !is_squarefree(m) {
                return Err(Error::invalid(format!(
                    "m = {m} is not a positive squarefree integer"
                )));
            }
            Ok(FieldDescriptor::Quadratic { m })
        }
        RawDescriptor::Cyclotomic(n) => {
            let n = if n % 4 == 2 { n / 2 } else { n };
            if n < 3 {
                return Err(Error::invalid(format!("Q(zeta_{n}) = Q is not a CM field")));
            }
            if raw.contains_zeta5() {
                return Err(Error::Inadmissible(format!("Q(zeta_{n}) contains zeta_5")));
            }
            Ok(FieldDescriptor::Cyclotomic { n })
        }
    }
}

impl FromStr for RawDescriptor {
    type Err = Error;

    /// Accepts `Q(sqrt-<m>)` and `Q(zeta<n>)`, also `Q(zeta <n>)` and `Q(zeta_<n>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("unrecognized field descriptor {s:?}"));
        let inner = s
            .strip_prefix("Q(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        if let Some(m) = inner.strip_prefix("sqrt-") {
            Ok(RawDescriptor::Quadratic(
                m.trim().parse().map_err(|_| bad())?,
            ))
        } else if let Some(n) = inner.strip_prefix("zeta") {
            let n = n.trim_start_matches([' ', '_']);
            Ok(RawDescriptor::Cyclotomic(n.parse().map_err(|_| bad())?))
        } else {
            Err(bad())
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        normalize(s.parse()?)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Quadratic { m } => write!(f, "Q(sqrt-{m})"),
            FieldDescriptor::Cyclotomic { n } => write!(f, "Q(zeta{n})"),
        }
    }
}

/// Shape of `5 O_K = (p_1 ... p_r)^e` with residue degree `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SplittingData {
    pub e: u32,
    pub f: u32,
    pub r: u32,
}

impl SplittingData {
    pub fn new(e: u32, f: u32, r: u32) -> Result<Self> {
        if e == 0 || f == 0 || r == 0 {
            return Err(Error::invalid("e, f, r must all be positive"));
        }
        Ok(SplittingData { e, f, r })
    }

    pub fn degree(&self) -> u64 {
        self.e as u64 * self.f as u64 * self.r as u64
    }

    pub fn kind(&self) -> &'static str {
        match (self.e, self.f, self.r) {
            (1, 1, _) => "split",
            (1, _, 1) => "inert",
            (e, 1, 1) if e > 1 => "ramified",
            _ => "mixed",
        }
    }
}

/// Element of `O_K` as integer coordinates in the integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OKElement {
    pub coords: Vec<i64>,
}

impl OKElement {
    pub fn new(coords: Vec<i64>) -> Self {
        OKElement { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("O_K coordinate overflow")
}

impl FieldDescriptor {
    pub fn degree(&self) -> u64 {
        match *self {
            FieldDescriptor::Quadratic { .. } => 2,
            FieldDescriptor::Cyclotomic { n } => euler_phi(n),
        }
    }

    /// Every field handled here is Galois and CM.
    pub fn is_galois_cm(&self) -> bool {
        true
    }

    /// Always false for a normalized descriptor; `normalize` rejects the rest.
    pub fn contains_zeta5(&self) -> bool {
        matches!(*self, FieldDescriptor::Cyclotomic { n } if n % 5 == 0)
    }

    /// Field discriminant for quadratic fields.
    pub fn quadratic_discriminant(&self) -> Option<i64> {
        match *self {
            FieldDescriptor::Quadratic { m } if m % 4 == 3 => Some(-(m as i64)),
            FieldDescriptor::Quadratic { m } => Some(-4 * m as i64),
            FieldDescriptor::Cyclotomic { .. } => None,
        }
    }

    /// Rational primes dividing the discriminant.
    pub fn ramified_primes(&self) -> Vec<u64> {
        match *self {
            FieldDescriptor::Quadratic { .. } => {
                prime_factors(self.quadratic_discriminant().unwrap().unsigned_abs())
            }
            FieldDescriptor::Cyclotomic { n } => prime_factors(n),
        }
    }

    /// Integer minimal polynomial of the basis generator, low-to-high.
    pub fn minimal_polynomial(&self) -> Vec<i64> {
        match *self {
            FieldDescriptor::Quadratic { m } if m % 4 == 3 => vec![(1 + m as i64) / 4, -1, 1],
            FieldDescriptor::Quadratic { m } => vec![m as i64, 0, 1],
            FieldDescriptor::Cyclotomic { n } => cyclotomic_polynomial(n),
        }
    }

    pub fn element(&self, coords: Vec<i64>) -> Result<OKElement> {
        if coords.len() as u64 != self.degree() {
            return Err(Error::invalid(format!(
                "{self} needs {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(OKElement::new(coords))
    }

    pub fn from_int(&self, n: i64) -> OKElement {
        let mut coords = vec![0; self.degree() as usize];
        coords[0] = n;
        OKElement::new(coords)
    }

    pub fn add(&self, a: &OKElement, b: &OKElement) -> OKElement {
        OKElement::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    /// Product in `O_K`, reducing by the monic minimal polynomial.
    pub fn mul(&self, a: &OKElement, b: &OKElement) -> OKElement {
        let d = self.degree() as usize;
        let mut prod = vec![0i128; 2 * d - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            for (j, &y) in b.coords.iter().enumerate() {
                prod[i + j] += x as i128 * y as i128;
            }
        }
        let minpoly = self.minimal_polynomial();
        for k in (d..2 * d - 1).rev() {
            let t = prod[k];
            if t == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                prod[k - d + i] -= t * minpoly[i] as i128;
            }
        }
        OKElement::new(prod[..d].iter().map(|&c| narrow(c)).collect())
    }

    /// Whether the odd prime `l` (coprime to the discriminant) splits
    /// completely in `K`.
    pub fn splits_completely(&self, l: u64) -> bool {
        if l == 2 || self.ramified_primes().contains(&l) {
            return false;
        }
        match *self {
            FieldDescriptor::Quadratic { .. } => {
                legendre(self.quadratic_discriminant().unwrap(), l) == 1
            }
            FieldDescriptor::Cyclotomic { n } => l % n == 1,
        }
    }

    /// Roots in `F_l` of the minimal polynomial, ascending. For a prime that
    /// splits completely these index the degree-1 primes above `l`.
    pub fn degree_one_roots(&self, l: u64) -> Vec<u64> {
        match *self {
            FieldDescriptor::Quadratic { .. } => {
                let poly = self.minimal_polynomial();
                (0..l).filter(|&x| eval_mod(&poly, x, l) == 0).collect()
            }
            FieldDescriptor::Cyclotomic { n } => {
                if (l - 1) % n != 0 {
                    return Vec::new();
                }
                let g = crate::arith::primitive_root(l);
                let zeta = pow_mod(g, (l - 1) / n, l);
                let mut roots: Vec<u64> = (1..n)
                    .filter(|&k| num_integer::gcd(k, n) == 1)
                    .map(|k| pow_mod(zeta, k, l))
                    .collect();
                roots.sort_unstable();
                roots
            }
        }
    }
}

/// Evaluate an integer polynomial at `x` modulo `l`.
pub fn eval_mod(poly: &[i64], x: u64, l: u64) -> u64 {
    let l128 = l as i128;
    poly.iter().rev().fold(0i128, |acc, &c| {
        (acc * x as i128 + c as i128).rem_euclid(l128)
    }) as u64
}

/// The `n`-th cyclotomic polynomial over `Z`, low-to-high, via
/// `prod_{d | n} (x^d - 1)^mu(n/d)`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    let mut poly: Vec<i128> = vec![1];
    let mut divide_by = Vec::new();
    for d in crate::arith::divisors(n) {
        match mobius(n / d) {
            1 => {
                // multiply by x^d - 1
                let mut next = vec![0i128; poly.len() + d as usize];
                for (i, &c) in poly.iter().enumerate() {
                    next[i + d as usize] += c;
                    next[i] -= c;
                }
                poly = next;
            }
            -1 => divide_by.push(d as usize),
            _ => {}
        }
    }
    for d in divide_by {
        // exact division by x^d - 1: q_i = q_{i-d} - p_i, read from the top
        let deg = poly.len() - 1;
        let mut quot = vec![0i128; deg + 1 - d];
        let mut rem = poly.clone();
        for k in (d..=deg).rev() {
            let t = rem[k];
            quot[k - d] = t;
            rem[k] = 0;
            rem[k - d] += t;
        }
        debug_assert!(rem.iter().all(|&c| c == 0));
        poly = quot;
    }
    poly.into_iter().map(narrow).collect()
}

fn mobius(n: u64) -> i32 {
    if !is_squarefree(n) {
        return 0;
    }
    if prime_factors(n).len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn splitting_of_5(d: &FieldDescriptor) -> SplittingData {
    match *d {
        FieldDescriptor::Quadratic { m } => {
            if m % 5 == 0 {
                SplittingData { e: 2, f: 1, r: 1 }
            } else if legendre(-(m as i64), 5) == 1 {
                SplittingData { e: 1, f: 1, r: 2 }
            } else {
                SplittingData { e: 1, f: 2, r: 1 }
            }
        }
        FieldDescriptor::Cyclotomic { n } => {
            let f = multiplicative_order(5, n).expect("5 does not divide n");
            SplittingData {
                e: 1,
                f: f as u32,
                r: (euler_phi(n) / f) as u32,
            }
        }
    }
}

/// Monic irreducible factors of `Phi_n` over `F_5`, in ascending order.
///
/// Roots of one factor form an orbit of `zeta -> zeta^5`. For every orbit `O`
/// of multiplication by 5 on `Z/n`, the orbit sum `h_O = sum_{k in O} x^k` is
/// Frobenius-invariant, so it takes a value in `F_5` at each factor's roots;
/// splitting by `gcd(g, h_O - c)` over enough orbits separates the factors.
pub fn cyclotomic_factor_mod5(n: u64) -> Result<Vec<FpPoly>> {
    if n == 0 || n % 5 == 0 {
        return Err(Error::invalid(format!("5 must not divide n = {n}")));
    }
    let phi = FpPoly::from_i64(5, &cyclotomic_polynomial(n));
    let f = multiplicative_order(5, n).unwrap() as usize;
    let mut factors = vec![phi];
    let mut seen = vec![false; n as usize];
    for t in 1..n {
        if factors.iter().all(|g| g.degree() == Some(f)) {
            break;
        }
        if seen[t as usize] {
            continue;
        }
        let mut coeffs = vec![0u32; n as usize];
        let mut k = t;
        while !seen[k as usize] {
            seen[k as usize] = true;
            coeffs[k as usize] = 1;
            k = k * 5 % n;
        }
        let h = FpPoly::new(5, coeffs);
        factors = factors
            .into_iter()
            .flat_map(|g| {
                if g.degree() == Some(f) {
                    return vec![g];
                }
                let hr = h.rem(&g);
                (0..5)
                    .map(|c| g.gcd(&hr.sub(&FpPoly::new(5, vec![c]))))
                    .filter(|piece| piece.degree().unwrap_or(0) > 0)
                    .collect()
            })
            .collect();
    }
    factors.sort();
    debug_assert!(factors.iter().all(|g| g.degree() == Some(f)));
    Ok(factors)
}

/// Reduction `O_K -> O_K / p_i = F_{5^f}` determined by the image of the
/// basis generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    target: FieldSpec,
    image_index: u32,
    prime_index: usize,
}

/// Evaluate an `F_p` polynomial at a field element.
fn eval_poly<'a>(poly: &FpPoly, x: FFElem<'a>) -> FFElem<'a> {
    let s = x.spec();
    poly.coeffs()
        .iter()
        .rev()
        .fold(s.zero(), |acc, &c| acc * x + s.from_int(c as i64))
}

fn first_root(target: &FieldSpec, poly: &FpPoly) -> u32 {
    target
        .enumerate()
        .find(|&x| eval_poly(poly, x).is_zero())
        .map(|x| x.index())
        .expect("factor has a root in its residue field")
}

impl ReductionMap {
    pub fn target(&self) -> &FieldSpec {
        &self.target
    }

    pub fn generator_image(&self) -> FFElem<'_> {
        self.target.element(self.image_index)
    }

    pub fn prime_index(&self) -> usize {
        self.prime_index
    }

    /// Whether the field generator's minimal polynomial vanishes at the image.
    pub fn is_consistent(&self, d: &FieldDescriptor) -> bool {
        let poly = FpPoly::from_i64(5, &d.minimal_polynomial());
        eval_poly(&poly, self.generator_image()).is_zero()
    }

    /// Image of a single coordinate vector.
    pub fn reduce<'s>(&'s self, a: &OKElement) -> FFElem<'s> {
        let g = self.generator_image();
        a.coords.iter().rev().fold(self.target.zero(), |acc, &c| {
            acc * g + self.target.from_int(c)
        })
    }
}

pub fn reduce_element<'s>(a: &OKElement, map: &'s ReductionMap) -> FFElem<'s> {
    map.reduce(a)
}

/// One reduction map per prime above 5, in canonical order.
pub fn reduction_maps(d: &FieldDescriptor) -> Result<Vec<ReductionMap>> {
    let split = splitting_of_5(d);
    let target = make_field(5, split.f as usize)?;
    let factors: Vec<FpPoly> = match *d {
        FieldDescriptor::Quadratic { .. } => {
            let minpoly = FpPoly::from_i64(5, &d.minimal_polynomial());
            match split.kind() {
                "split" => (0..5u32)
                    .filter(|&c| minpoly.eval(c) == 0)
                    .map(|c| FpPoly::from_i64(5, &[-(c as i64), 1]))
                    .collect(),
                _ => vec![minpoly],
            }
        }
        FieldDescriptor::Cyclotomic { n } => cyclotomic_factor_mod5(n)?,
    };
    Ok(factors
        .iter()
        .enumerate()
        .map(|(i, g)| ReductionMap {
            image_index: first_root(&target, g),
            target: target.clone(),
            prime_index: i,
        })
        .collect())
}
