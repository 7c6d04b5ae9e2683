//! Arithmetic in `F_q = F_p[x]/(g)` for odd primes `p >= 5`.
//!
//! Fields are built deterministically: the modulus `g` is the smallest monic
//! irreducible of degree `f` when its lower coefficients are read as the
//! base-`p` integer `c_0 + c_1 p + ... + c_{f-1} p^(f-1)`. Elements are
//! enumerated in the same order, so index 0 is zero and index 1 is one.

mod poly;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

pub use poly::FpPoly;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Largest supported field size.
pub const FIELD_SIZE_CAP: u64 = 1 << 20;

/// Largest extension degree representable under the cap with `p >= 5`.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldSpec {
    p: u32,
    f: usize,
    q: u32,
    #[serde(serialize_with = "serialize_poly")]
    modulus: FpPoly,
}

fn serialize_poly<S: serde::Serializer>(poly: &FpPoly, s: S) -> Result<S::Ok, S::Error> {
    poly.coeffs().serialize(s)
}

/// Build `F_{p^f}` with the canonical modulus.
pub fn make_field(p: u32, f: usize) -> Result<FieldSpec> {
    if !is_prime(p as u64) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p < 5 {
        return Err(Error::invalid(format!(
            "characteristic {p} is not supported (need p >= 5)"
        )));
    }
    if f == 0 {
        return Err(Error::invalid("extension degree must be at least 1"));
    }
    let q = (p as u64)
        .checked_pow(f as u32)
        .filter(|&q| q <= FIELD_SIZE_CAP);
    let Some(q) = q else {
        return Err(Error::cap(format!("field size {p}^{f}"), FIELD_SIZE_CAP));
    };
    let modulus = smallest_irreducible(p, f, q);
    Ok(FieldSpec {
        p,
        f,
        q: q as u32,
        modulus,
    })
}

fn smallest_irreducible(p: u32, f: usize, q: u64) -> FpPoly {
    (0..q)
        .map(|idx| {
            let mut coeffs = digits(idx as u32, p, f);
            coeffs.push(1);
            FpPoly::new(p, coeffs)
        })
        .find(FpPoly::is_irreducible)
        .expect("irreducible polynomials exist in every degree")
}

fn digits(mut idx: u32, p: u32, f: usize) -> Vec<u32> {
    (0..f)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

impl FieldSpec {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    pub fn zero(&self) -> FFElem<'_> {
        FFElem {
            spec: self,
            coeffs: [0; MAX_DEGREE],
        }
    }

    pub fn one(&self) -> FFElem<'_> {
        self.from_int(1)
    }

    /// Image of a rational integer.
    pub fn from_int(&self, n: i64) -> FFElem<'_> {
        let mut e = self.zero();
        e.coeffs[0] = n.rem_euclid(self.p as i64) as u32;
        e
    }

    /// Element with the given low-to-high coefficients (reduced mod `p`).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FFElem<'_>> {
        if coeffs.len() > self.f {
            return Err(Error::invalid(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.f
            )));
        }
        let mut e = self.zero();
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *slot = c.rem_euclid(self.p as i64) as u32;
        }
        Ok(e)
    }

    /// Reduce an arbitrary polynomial over `F_p` into the field.
    pub fn from_poly(&self, poly: &FpPoly) -> FFElem<'_> {
        assert_eq!(
            poly.characteristic(),
            self.p,
            "polynomial over wrong prime field"
        );
        let r = poly.rem(&self.modulus);
        let mut e = self.zero();
        for (slot, &c) in e.coeffs.iter_mut().zip(r.coeffs()) {
            *slot = c;
        }
        e
    }

    /// Element number `index` in enumeration order.
    pub fn element(&self, index: u32) -> FFElem<'_> {
        assert!(
            index < self.q,
            "index {index} out of range for F_{}",
            self.q
        );
        let mut e = self.zero();
        for (slot, d) in e.coeffs.iter_mut().zip(digits(index, self.p, self.f)) {
            *slot = d;
        }
        e
    }

    /// All `q` elements, zero first, then one.
    pub fn enumerate(&self) -> impl Iterator<Item = FFElem<'_>> + '_ {
        (0..self.q).map(move |i| self.element(i))
    }

    /// Quadratic character indexed by element index: `0` at zero, `1` on
    /// nonzero squares, `-1` elsewhere.
    pub fn quadratic_character_table(&self) -> Vec<i8> {
        let mut table = vec![-1i8; self.q as usize];
        table[0] = 0;
        for a in self.enumerate().skip(1) {
            table[(a * a).index() as usize] = 1;
        }
        table
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}[x]/({})", self.p, self.modulus)
        }
    }
}

/// Element of a [`FieldSpec`].
#[derive(Clone, Copy)]
pub struct FFElem<'a> {
    spec: &'a FieldSpec,
    coeffs: [u32; MAX_DEGREE],
}

fn same_field(a: &FieldSpec, b: &FieldSpec) -> bool {
    std::ptr::eq(a, b) || a == b
}

impl<'a> FFElem<'a> {
    pub fn spec(&self) -> &'a FieldSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs[..self.spec.f]
    }

    /// Position in enumeration order.
    pub fn index(&self) -> u32 {
        self.coeffs()
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.spec.p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(self.spec, other.spec) {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.add_unchecked(-other))
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(self, other: Self) -> Self {
        let p = self.spec.p;
        let mut out = self;
        for (a, b) in out.coeffs.iter_mut().zip(other.coeffs) {
            *a = (*a + b) % p;
        }
        out
    }

    fn mul_unchecked(self, other: Self) -> Self {
        let p = self.spec.p as u64;
        let f = self.spec.f;
        if f == 1 {
            let mut out = self;
            out.coeffs[0] = (self.coeffs[0] as u64 * other.coeffs[0] as u64 % p) as u32;
            return out;
        }
        let mut prod = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..f {
            let a = self.coeffs[i] as u64;
            if a == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a * other.coeffs[j] as u64) % p;
            }
        }
        // x^f = -(m_0 + m_1 x + ... + m_{f-1} x^{f-1})
        let m = self.spec.modulus.coeffs();
        for k in (f..2 * f - 1).rev() {
            let t = prod[k];
            if t == 0 {
                continue;
            }
            for i in 0..f {
                let idx = k - f + i;
                prod[idx] = (prod[idx] + t * (p - m[i] as u64)) % p;
            }
        }
        let mut out = self;
        for i in 0..f {
            out.coeffs[i] = prod[i] as u32;
        }
        out
    }

    /// Square-and-multiply.
    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = self.spec.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.spec.q as u64 - 2))
    }

    /// Euler's criterion, `a^((q-1)/2) = 1`. Zero is outside the contract.
    pub fn is_square(self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::invalid("is_square is undefined at zero"));
        }
        Ok(self.pow((self.spec.q as u64 - 1) / 2).is_one())
    }
}

impl PartialEq for FFElem<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && same_field(self.spec, other.spec)
    }
}

impl Eq for FFElem<'_> {}

impl Hash for FFElem<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FFElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FFElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.f == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let poly = FpPoly::new(self.spec.p, self.coeffs().to_vec());
        write!(f, "{poly}")
    }
}

impl<'a> Add for FFElem<'a> {
    type Output = FFElem<'a>;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("mixed-field addition")
    }
}

impl<'a> Sub for FFElem<'a> {
    type Output = FFElem<'a>;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("mixed-field subtraction")
    }
}

impl<'a> Mul for FFElem<'a> {
    type Output = FFElem<'a>;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("mixed-field multiplication")
    }
}

impl<'a> Neg for FFElem<'a> {
    type Output = FFElem<'a>;
    fn neg(self) -> Self {
        let p = self.spec.p;
        let mut out = self;
        for c in out.coeffs.iter_mut() {
            *c = (p - *c) % p;
        }
        out
    }
}
