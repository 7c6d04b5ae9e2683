//! Residue equidistribution of curve coefficients over imaginary quadratic
//! fields, and the density of pairs `(A, B)` that pass the good-ordinary
//! residue criterion at every prime above 5.
//!
//! `A` ranges over `|sigma(A)| < X^4` and `B` over `|sigma(B)| < X^6`. Disk
//! membership is decided exactly in integers: an element `x + y w` is stored
//! in doubled coordinates `(a, b)` with `x + y w = (a + b sqrt(-m)) / 2`, so
//! `4 |x + y w|^2 = a^2 + m b^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{exact_sqrt, isqrt};
use crate::bounds::{lower_bound, ratio_string, ratio_to_f64, BoundResult};
use crate::error::{Error, Result};
use crate::ffcurves::{discriminant, FFPair};
use crate::ffield::FieldSpec;
use crate::numfield::{reduction_maps, splitting_of_5, FieldDescriptor, OKElement, ReductionMap};

/// Largest disk (in lattice points) that exact operations will scan.
pub const DISK_POINT_CAP: u64 = 1_000_000_000;

/// Monte Carlo samples drawn per independent ChaCha stream.
pub const MC_BATCH: u64 = 1024;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Ring of integers of `Q(sqrt(-m))` in doubled coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadRing {
    m: i128,
    half: bool,
}

impl QuadRing {
    pub fn new(d: &FieldDescriptor) -> Result<Self> {
        match *d {
            FieldDescriptor::Quadratic { m } => Ok(QuadRing {
                m: m as i128,
                half: m % 4 == 3,
            }),
            FieldDescriptor::Cyclotomic { .. } => Err(Error::invalid(
                "archimedean disks are only supported over imaginary quadratic fields",
            )),
        }
    }

    /// Basis coordinates `(x, y)` to doubled coordinates.
    pub fn doubled(&self, x: i128, y: i128) -> (i128, i128) {
        if self.half {
            (2 * x + y, y)
        } else {
            (2 * x, 2 * y)
        }
    }

    /// Doubled coordinates back to the basis, if the element is integral.
    pub fn basis(&self, a: i128, b: i128) -> Option<(i128, i128)> {
        if self.half {
            ((a - b) % 2 == 0).then_some(((a - b) / 2, b))
        } else {
            (a % 2 == 0 && b % 2 == 0).then_some((a / 2, b / 2))
        }
    }

    /// `4 |alpha|^2` for doubled coordinates.
    pub fn norm4(&self, a: i128, b: i128) -> i128 {
        a * a + self.m * b * b
    }

    /// Product of doubled coordinates.
    pub fn mul(&self, (a1, b1): (i128, i128), (a2, b2): (i128, i128)) -> (i128, i128) {
        let re = a1 * a2 - self.m * b1 * b2;
        let im = a1 * b2 + a2 * b1;
        debug_assert!(re % 2 == 0 && im % 2 == 0);
        (re / 2, im / 2)
    }

    /// `4A^3 + 27B^2` in doubled coordinates.
    pub fn discriminant_core(&self, a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
        let a3 = self.mul(self.mul(a, a), a);
        let b2 = self.mul(b, b);
        (4 * a3.0 + 27 * b2.0, 4 * a3.1 + 27 * b2.1)
    }

    /// Square roots in `O_K` of a doubled-coordinate element.
    pub fn sqrt(&self, (c, d): (i128, i128)) -> Vec<(i128, i128)> {
        // alpha = (a + b sqrt(-m))/2 with alpha^2 = (c + d sqrt(-m))/2 forces
        // a^2 + m b^2 = 4s, a^2 - m b^2 = 2c, ab = d where s^2 = N(alpha^2).
        let n4 = c * c + self.m * d * d;
        if n4 % 4 != 0 {
            return Vec::new();
        }
        let Some(s) = exact_sqrt(n4 / 4) else {
            return Vec::new();
        };
        let Some(a) = exact_sqrt(2 * s + c) else {
            return Vec::new();
        };
        let rest = 2 * s - c;
        if rest % self.m != 0 {
            return Vec::new();
        }
        let Some(b) = exact_sqrt(rest / self.m) else {
            return Vec::new();
        };
        let mut roots: Vec<(i128, i128)> = [(a, b), (a, -b), (-a, b), (-a, -b)]
            .into_iter()
            .filter(|&r| self.basis(r.0, r.1).is_some() && self.mul(r, r) == (c, d))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// Largest `|y|` with a point of the open disk of radius `radius` in row `y`.
    fn y_max(&self, radius: u64) -> i128 {
        let r2 = radius as i128 * radius as i128;
        let limit = if self.half { 4 * r2 - 1 } else { r2 - 1 };
        isqrt((limit / self.m) as u128) as i128
    }

    /// Inclusive `x` range of row `y` inside the open disk, if nonempty.
    fn row(&self, radius: u64, y: i128) -> Option<(i128, i128)> {
        let r2 = radius as i128 * radius as i128;
        if self.half {
            // (2x + y)^2 < 4Y^2 - m y^2
            let room = 4 * r2 - self.m * y * y;
            if room <= 0 {
                return None;
            }
            let s = isqrt((room - 1) as u128) as i128;
            let lo = (-s - y).div_euclid(2) + i128::from((-s - y).rem_euclid(2) != 0);
            let hi = (s - y).div_euclid(2);
            (lo <= hi).then_some((lo, hi))
        } else {
            let room = r2 - self.m * y * y;
            if room <= 0 {
                return None;
            }
            let s = isqrt((room - 1) as u128) as i128;
            Some((-s, s))
        }
    }
}

/// Open disk `{alpha in O_K : |sigma(alpha)| < radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiskSpec {
    pub descriptor: FieldDescriptor,
    pub radius: u64,
}

impl DiskSpec {
    pub fn new(descriptor: FieldDescriptor, radius: u64) -> Result<Self> {
        QuadRing::new(&descriptor)?;
        if radius < 1 {
            return Err(Error::invalid("disk radius must be at least 1"));
        }
        Ok(DiskSpec { descriptor, radius })
    }

    fn ring(&self) -> QuadRing {
        QuadRing::new(&self.descriptor).expect("checked at construction")
    }

    /// Exact lattice point count (row by row, no enumeration).
    pub fn count(&self) -> u64 {
        let ring = self.ring();
        let ym = ring.y_max(self.radius);
        (-ym..=ym)
            .into_par_iter()
            .map(|y| {
                ring.row(self.radius, y)
                    .map_or(0, |(lo, hi)| (hi - lo + 1) as u64)
            })
            .sum()
    }

    fn check_cap(&self) -> Result<u64> {
        // area pi Y^2 / sqrt(m) (or 2 pi Y^2 / sqrt(m)) bounds the count up to O(Y)
        let ring = self.ring();
        let scale = if ring.half { 2.0 } else { 1.0 };
        let estimate =
            scale * std::f64::consts::PI * (self.radius as f64).powi(2) / (ring.m as f64).sqrt();
        if estimate > DISK_POINT_CAP as f64 {
            return Err(Error::cap(
                format!("disk of radius {} over {}", self.radius, self.descriptor),
                DISK_POINT_CAP,
            ));
        }
        Ok(self.count())
    }
}

/// `max_sigma |sigma(a)|`; both complex embeddings have the same modulus.
pub fn embedding_abs(a: &OKElement, d: &FieldDescriptor) -> Result<f64> {
    let ring = QuadRing::new(d)?;
    let (x, y) = coords2(a)?;
    let (da, db) = ring.doubled(x, y);
    Ok((ring.norm4(da, db) as f64).sqrt() / 2.0)
}

fn coords2(a: &OKElement) -> Result<(i128, i128)> {
    match a.coords[..] {
        [x, y] => Ok((x as i128, y as i128)),
        _ => Err(Error::invalid("expected two integral-basis coordinates")),
    }
}

/// All lattice points of the disk, row by row (ascending `y`, then `x`).
pub fn enumerate_disk(spec: &DiskSpec) -> Result<impl Iterator<Item = OKElement>> {
    spec.check_cap()?;
    let ring = spec.ring();
    let radius = spec.radius;
    let ym = ring.y_max(radius);
    Ok((-ym..=ym).flat_map(move |y| {
        let (lo, hi) = ring.row(radius, y).unwrap_or((1, 0));
        (lo..=hi).map(move |x| OKElement::new(vec![x as i64, y as i64]))
    }))
}

/// Joint residue counts over the primes above 5. The tuple
/// `(t_0, ..., t_{r-1})` of element indices in `F_{5^f}` is stored at
/// `sum t_i q^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueDistribution {
    pub q: u32,
    pub primes: usize,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl ResidueDistribution {
    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    /// Residue indices of a joint class, one per prime.
    pub fn decode(&self, mut class: usize) -> Vec<u32> {
        (0..self.primes)
            .map(|_| {
                let t = class % self.q as usize;
                class /= self.q as usize;
                t as u32
            })
            .collect()
    }

    /// Largest over smallest class count; infinite when a class is empty.
    pub fn max_min_ratio(&self) -> f64 {
        let max = *self.counts.iter().max().unwrap_or(&0) as f64;
        let min = *self.counts.iter().min().unwrap_or(&0) as f64;
        max / min
    }
}

/// Per-row residue bookkeeping: image of `w` in each residue field.
struct ResidueMaps<'a> {
    maps: &'a [ReductionMap],
    q: u32,
}

impl ResidueMaps<'_> {
    /// Joint class of `x + y w`.
    fn class_of(&self, x: i128, y: i128) -> usize {
        let mut class = 0usize;
        for map in self.maps.iter().rev() {
            let t = map.target();
            let elem = t.from_int(x.rem_euclid(5) as i64)
                + t.from_int(y.rem_euclid(5) as i64) * map.generator_image();
            class = class * self.q as usize + elem.index() as usize;
        }
        class
    }
}

pub fn residue_distribution(spec: &DiskSpec, maps: &[ReductionMap]) -> Result<ResidueDistribution> {
    spec.check_cap()?;
    let ring = spec.ring();
    let q = maps.first().map_or(1, |m| m.target().size());
    let classes = (q as usize).pow(maps.len() as u32);
    let rm = ResidueMaps { maps, q };
    let ym = ring.y_max(spec.radius);
    let counts = (-ym..=ym)
        .into_par_iter()
        .fold(
            || vec![0u64; classes],
            |mut acc, y| {
                if let Some((lo, hi)) = ring.row(spec.radius, y) {
                    for t in 0..5i128 {
                        // x in [lo, hi] with x = t (mod 5)
                        let first = lo + (t - lo).rem_euclid(5);
                        if first > hi {
                            continue;
                        }
                        let n = ((hi - first) / 5 + 1) as u64;
                        acc[rm.class_of(t, y)] += n;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; classes],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = counts.iter().sum();
    Ok(ResidueDistribution {
        q,
        primes: maps.len(),
        counts,
        total,
    })
}

/// Whether `(A, B)` reduces to a nonsingular ordinary curve (`A != 0`,
/// `Delta != 0`) in the residue field, indexed by element indices.
fn good_ordinary_table(field: &FieldSpec) -> Vec<bool> {
    let q = field.size();
    let mut table = vec![false; (q * q) as usize];
    for a in field.enumerate().skip(1) {
        for b in field.enumerate() {
            let pair = FFPair { a, b };
            table[(a.index() * q + b.index()) as usize] = !discriminant(&pair).is_zero();
        }
    }
    table
}

/// Counts of the coefficient box `E'_X` and its discriminant-zero locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EXCounts {
    pub count_a: u64,
    pub count_b: u64,
    /// `|E'_X| = count_a * count_b`.
    pub pair_total: u128,
    pub delta_zero_pairs: u64,
    /// `|E_X| = pair_total - delta_zero_pairs`.
    pub nonsingular: u128,
}

impl EXCounts {
    pub fn nonsingular_ratio(&self) -> f64 {
        self.nonsingular as f64 / self.pair_total as f64
    }
}

fn radius_pow(x: u64, k: u32) -> Result<u64> {
    x.checked_pow(k)
        .ok_or_else(|| Error::cap(format!("X^{k} for X = {x}"), u64::MAX))
}

/// `|E'_X|` and `|E_X|`. For each `A` in the `X^4` disk, `Delta = 0` means
/// `B^2 = -4A^3/27`; the candidates are the square roots of that element in
/// `O_K` that fall inside the `X^6` disk.
#[allow(non_snake_case)]
pub fn count_EX(d: &FieldDescriptor, x: u64) -> Result<EXCounts> {
    let disk_a = DiskSpec::new(*d, radius_pow(x, 4)?)?;
    let disk_b = DiskSpec::new(*d, radius_pow(x, 6)?)?;
    let count_a = disk_a.check_cap()?;
    let count_b = disk_b.check_cap()?;
    let ring = disk_a.ring();
    let bound_b = 4 * disk_b.radius as i128 * disk_b.radius as i128;
    let ym = ring.y_max(disk_a.radius);
    let delta_zero_pairs: u64 = (-ym..=ym)
        .into_par_iter()
        .map(|y| {
            let Some((lo, hi)) = ring.row(disk_a.radius, y) else {
                return 0;
            };
            let mut n = 0;
            for xa in lo..=hi {
                let a = ring.doubled(xa, y);
                let a3 = ring.mul(ring.mul(a, a), a);
                let c = (-4 * a3.0, -4 * a3.1);
                if c.0 % 27 != 0 || c.1 % 27 != 0 {
                    continue;
                }
                n += ring
                    .sqrt((c.0 / 27, c.1 / 27))
                    .into_iter()
                    .filter(|&(ba, bb)| ring.norm4(ba, bb) < bound_b)
                    .count() as u64;
            }
            n
        })
        .sum();
    let pair_total = count_a as u128 * count_b as u128;
    Ok(EXCounts {
        count_a,
        count_b,
        pair_total,
        delta_zero_pairs,
        nonsingular: pair_total - delta_zero_pairs as u128,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub field: String,
    pub mode: &'static str,
    /// Always "residue-criterion density": pairs whose reductions at every
    /// prime above 5 have `A != 0` and `Delta != 0`.
    pub quantity: &'static str,
    #[serde(rename = "X")]
    pub x: u64,
    pub count_a: u64,
    pub count_b: u64,
    pub pair_total: u128,
    pub delta_zero_pairs: Option<u64>,
    pub nonsingular_pairs: Option<u128>,
    pub empirical_density: f64,
    /// Exact `num/den`, exact mode only.
    pub exact_density: Option<String>,
    pub theoretical: BoundResult,
    pub per_prime: Vec<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub ci95: Option<[f64; 2]>,
}

const QUANTITY: &str = "residue-criterion density";

/// Exact proportion of `E'_X` passing the residue criterion at every prime
/// above 5, from the product of the independent `A`- and `B`-disk residue
/// distributions.
pub fn ordinary_density_exact(d: &FieldDescriptor, x: u64) -> Result<DensityReport> {
    let maps = reduction_maps(d)?;
    let disk_a = DiskSpec::new(*d, radius_pow(x, 4)?)?;
    let disk_b = DiskSpec::new(*d, radius_pow(x, 6)?)?;
    let dist_a = residue_distribution(&disk_a, &maps)?;
    let dist_b = residue_distribution(&disk_b, &maps)?;
    let ex = count_EX(d, x)?;
    let good = good_ordinary_table(maps[0].target());
    let q = dist_a.q;

    let r = maps.len();
    let mut all = 0u128;
    let mut per_prime = vec![0u128; r];
    for (ca_idx, &ca) in dist_a.counts.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        let ta = dist_a.decode(ca_idx);
        for (cb_idx, &cb) in dist_b.counts.iter().enumerate() {
            if cb == 0 {
                continue;
            }
            let tb = dist_b.decode(cb_idx);
            let w = ca as u128 * cb as u128;
            let mut pass_all = true;
            for i in 0..r {
                if good[(ta[i] * q + tb[i]) as usize] {
                    per_prime[i] += w;
                } else {
                    pass_all = false;
                }
            }
            if pass_all {
                all += w;
            }
        }
    }
    let total = dist_a.total as u128 * dist_b.total as u128;
    let exact = BigRational::new(BigInt::from(all), BigInt::from(total));
    Ok(DensityReport {
        field: d.to_string(),
        mode: "exact",
        quantity: QUANTITY,
        x,
        count_a: dist_a.total,
        count_b: dist_b.total,
        pair_total: total,
        delta_zero_pairs: Some(ex.delta_zero_pairs),
        nonsingular_pairs: Some(ex.nonsingular),
        empirical_density: ratio_to_f64(&exact),
        exact_density: Some(ratio_string(&exact)),
        theoretical: lower_bound(splitting_of_5(d)),
        per_prime: per_prime
            .into_iter()
            .map(|n| n as f64 / total as f64)
            .collect(),
        samples: None,
        seed: None,
        ci95: None,
    })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> [f64; 2] {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    [(center - half).max(0.0), (center + half).min(1.0)]
}

/// Uniform sampler on the lattice points of a disk, by rejection from the
/// bounding box.
#[derive(Debug, Clone, Copy)]
pub struct DiskSampler {
    ring: QuadRing,
    radius: u64,
    y_max: i128,
    x_max: i128,
    bound: i128,
}

impl DiskSampler {
    pub fn new(spec: &DiskSpec) -> Self {
        let ring = spec.ring();
        let y_max = ring.y_max(spec.radius);
        let r = spec.radius as i128;
        let x_max = if ring.half { r + y_max / 2 + 1 } else { r };
        DiskSampler {
            ring,
            radius: spec.radius,
            y_max,
            x_max,
            bound: 4 * r * r,
        }
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// Basis coordinates of a uniformly chosen disk point.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (i128, i128) {
        loop {
            let y = rng.random_range(-(self.y_max as i64)..=self.y_max as i64) as i128;
            let x = rng.random_range(-(self.x_max as i64)..=self.x_max as i64) as i128;
            let (a, b) = self.ring.doubled(x, y);
            if self.ring.norm4(a, b) < self.bound {
                return (x, y);
            }
        }
    }
}

/// Generator for batch `index` of a seeded run. Each batch owns ChaCha stream
/// `index`, so results do not depend on how batches are scheduled.
pub fn batch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate of the residue-criterion density, `samples` pairs
/// drawn uniformly from `E'_X` with a Wilson 95% interval.
pub fn montecarlo_density(
    d: &FieldDescriptor,
    x: u64,
    samples: u64,
    seed: u64,
) -> Result<DensityReport> {
    if samples < 1000 {
        return Err(Error::invalid("Monte Carlo needs at least 1000 samples"));
    }
    let maps = reduction_maps(d)?;
    let disk_a = DiskSpec::new(*d, radius_pow(x, 4)?)?;
    let disk_b = DiskSpec::new(*d, radius_pow(x, 6)?)?;
    let (sa, sb) = (DiskSampler::new(&disk_a), DiskSampler::new(&disk_b));
    let good = good_ordinary_table(maps[0].target());
    let q = maps[0].target().size();
    let r = maps.len();
    let rm = ResidueMaps { maps: &maps, q };
    let batches = samples.div_ceil(MC_BATCH);
    let (all, per_prime) = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = batch_rng(seed, batch);
            let n = MC_BATCH.min(samples - batch * MC_BATCH);
            let mut all = 0u64;
            let mut per = vec![0u64; r];
            for _ in 0..n {
                let (ax, ay) = sa.sample(&mut rng);
                let (bx, by) = sb.sample(&mut rng);
                let ta = rm.class_of(ax, ay);
                let tb = rm.class_of(bx, by);
                let mut pass = true;
                let (mut ca, mut cb) = (ta, tb);
                for slot in per.iter_mut() {
                    let (ra, rb) = (ca % q as usize, cb % q as usize);
                    ca /= q as usize;
                    cb /= q as usize;
                    if good[ra * q as usize + rb] {
                        *slot += 1;
                    } else {
                        pass = false;
                    }
                }
                all += u64::from(pass);
            }
            (all, per)
        })
        .reduce(
            || (0, vec![0; r]),
            |(a, pa), (b, pb)| (a + b, pa.iter().zip(pb).map(|(x, y)| x + y).collect()),
        );
    let count_a = disk_a.count();
    let count_b = disk_b.count();
    Ok(DensityReport {
        field: d.to_string(),
        mode: "mc",
        quantity: QUANTITY,
        x,
        count_a,
        count_b,
        pair_total: count_a as u128 * count_b as u128,
        delta_zero_pairs: None,
        nonsingular_pairs: None,
        empirical_density: all as f64 / samples as f64,
        exact_density: None,
        theoretical: lower_bound(splitting_of_5(d)),
        per_prime: per_prime
            .into_iter()
            .map(|n| n as f64 / samples as f64)
            .collect(),
        samples: Some(samples),
        seed: Some(seed),
        ci95: Some(wilson_interval(all, samples)),
    })
}
