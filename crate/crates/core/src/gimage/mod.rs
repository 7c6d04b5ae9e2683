//! Mod-5 image certification from Frobenius traces at degree-1 primes,
//! decomposed generic primes, and the hypothesis checklist for a curve
//! `y^2 = x^3 + Ax + B` over a CM field.
//!
//! Certification is one-sided: a certified curve has image containing
//! `SL_2(F_5)` relative to the table checked by [`subgroup_oracle`]; an
//! uncertified one is merely inconclusive.

pub mod group;

pub use group::{
    dg_congruence, dg_equivalence_oracle, enumerate_subgroups, is_perfect_sl2, perfectness_sl2,
    subgroup_oracle, DgEquivalenceReport, Gl2F5, PerfectnessReport, SubgroupOracleReport,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::primes_up_to;
use crate::density::{batch_rng, wilson_interval, DiskSampler, DiskSpec, QuadRing};
use crate::error::{Error, Result};
use crate::ffcurves::{count_points_with, discriminant, FFPair};
use crate::ffield::{make_field, FieldSpec};
use crate::numfield::{eval_mod, reduction_maps, FieldDescriptor, OKElement};

/// Default certification depth.
pub const DEFAULT_SCAN_BOUND: u64 = 1000;

/// Nonsingular curve `y^2 = x^3 + Ax + B` with `A, B` in `O_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCurve {
    field: FieldDescriptor,
    a: OKElement,
    b: OKElement,
}

impl KCurve {
    pub fn new(field: FieldDescriptor, a: OKElement, b: OKElement) -> Result<Self> {
        let a = field.element(a.coords)?;
        let b = field.element(b.coords)?;
        let c = KCurve { field, a, b };
        if c.discriminant_core().is_zero() {
            return Err(Error::Singular);
        }
        Ok(c)
    }

    /// Curve with rational integer coefficients.
    pub fn from_ints(field: FieldDescriptor, a: i64, b: i64) -> Result<Self> {
        KCurve::new(field, field.from_int(a), field.from_int(b))
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn a(&self) -> &OKElement {
        &self.a
    }

    pub fn b(&self) -> &OKElement {
        &self.b
    }

    /// `4A^3 + 27B^2`.
    pub fn discriminant_core(&self) -> OKElement {
        let d = &self.field;
        let a3 = d.mul(&d.mul(&self.a, &self.a), &self.a);
        let b2 = d.mul(&self.b, &self.b);
        let four = d.from_int(4);
        let tw7 = d.from_int(27);
        d.add(&d.mul(&four, &a3), &d.mul(&tw7, &b2))
    }

    /// `Q(sqrt-1):[1,0];[1,0]`.
    pub fn id(&self) -> String {
        let show = |e: &OKElement| {
            let parts: Vec<String> = e.coords.iter().map(|c| c.to_string()).collect();
            format!("[{}]", parts.join(","))
        };
        format!("{}:{};{}", self.field, show(&self.a), show(&self.b))
    }
}

/// One Frobenius sample at a degree-1 prime `v | l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrobSample {
    pub l: u64,
    pub prime_index: usize,
    pub a: i64,
    #[serde(rename = "N")]
    pub n: u64,
}

/// Degree-1 primes of `K` up to a bound with their residue fields, shared
/// across all curves scanned over the same field.
pub struct PrimeTable {
    field: FieldDescriptor,
    bound: u64,
    entries: Vec<PrimeEntry>,
}

struct PrimeEntry {
    l: u64,
    roots: Vec<u64>,
    residue: FieldSpec,
    chi: Vec<i8>,
}

impl PrimeTable {
    /// Rational primes `l <= bound` that split completely in `K` with
    /// `l` prime to `10 disc(K)`. `l = 3` is skipped: residue fields here
    /// have characteristic at least 5.
    pub fn new(field: FieldDescriptor, bound: u64) -> Self {
        let ramified = field.ramified_primes();
        let entries = primes_up_to(bound)
            .into_par_iter()
            .filter(|&l| l > 5 && !ramified.contains(&l) && field.splits_completely(l))
            .map(|l| {
                let residue = make_field(l as u32, 1).expect("prime field below the cap");
                let chi = residue.quadratic_character_table();
                PrimeEntry {
                    l,
                    roots: field.degree_one_roots(l),
                    residue,
                    chi,
                }
            })
            .collect();
        PrimeTable {
            field,
            bound,
            entries,
        }
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.l).collect()
    }

    fn check_field(&self, curve: &KCurve) -> Result<()> {
        if curve.field != self.field {
            return Err(Error::invalid(format!(
                "curve over {} scanned with primes of {}",
                curve.field, self.field
            )));
        }
        Ok(())
    }

    fn entry(&self, l: u64) -> Option<&PrimeEntry> {
        self.entries
            .binary_search_by_key(&l, |e| e.l)
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Degree-1 primes in the table where the curve has good reduction at
    /// every prime above `l`.
    pub fn good_primes(&self, curve: &KCurve) -> Result<Vec<u64>> {
        self.check_field(curve)?;
        let delta = curve.discriminant_core();
        Ok(self
            .entries
            .iter()
            .filter(|e| {
                e.roots
                    .iter()
                    .all(|&r| eval_mod(&delta.coords, r, e.l) != 0)
            })
            .map(|e| e.l)
            .collect())
    }

    /// Frobenius samples at every prime above `l`, by point counting over
    /// `F_l`.
    pub fn samples_at(&self, curve: &KCurve, l: u64) -> Result<Vec<FrobSample>> {
        self.check_field(curve)?;
        let e = self.entry(l).ok_or_else(|| {
            Error::invalid(format!(
                "{l} is not a degree-1 prime of {} up to {}",
                self.field, self.bound
            ))
        })?;
        e.roots
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let am = eval_mod(&curve.a.coords, r, l);
                let bm = eval_mod(&curve.b.coords, r, l);
                let pair = FFPair::from_ints(&e.residue, am as i64, bm as i64);
                let n = count_points_with(&pair, &e.chi).map_err(|_| Error::BadReduction)?;
                Ok(FrobSample {
                    l,
                    prime_index: i,
                    a: l as i64 + 1 - n as i64,
                    n,
                })
            })
            .collect()
    }
}

pub fn good_degree1_primes(curve: &KCurve, bound: u64) -> Result<Vec<u64>> {
    PrimeTable::new(curve.field, bound).good_primes(curve)
}

/// Reduce through the `prime_index`-th degree-1 prime above `l` and count.
pub fn frob_trace(curve: &KCurve, l: u64, prime_index: usize) -> Result<FrobSample> {
    let table = PrimeTable::new(curve.field, l);
    let samples = table.samples_at(curve, l)?;
    samples
        .get(prime_index)
        .copied()
        .ok_or_else(|| Error::invalid(format!("prime index {prime_index} out of range at {l}")))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WitnessFlags {
    pub square_witness: bool,
    pub nonsquare_witness: bool,
    pub exceptional_witness: bool,
}

impl WitnessFlags {
    pub fn merge(self, o: WitnessFlags) -> WitnessFlags {
        WitnessFlags {
            square_witness: self.square_witness || o.square_witness,
            nonsquare_witness: self.nonsquare_witness || o.nonsquare_witness,
            exceptional_witness: self.exceptional_witness || o.exceptional_witness,
        }
    }

    pub fn all(&self) -> bool {
        self.square_witness && self.nonsquare_witness && self.exceptional_witness
    }

    pub fn missing(&self) -> Vec<&'static str> {
        let mut m = Vec::new();
        if !self.square_witness {
            m.push("square");
        }
        if !self.nonsquare_witness {
            m.push("nonsquare");
        }
        if !self.exceptional_witness {
            m.push("exceptional");
        }
        m
    }
}

/// Witness contribution of a Frobenius with trace `a` and determinant `l`.
pub fn witness_flags(a: i64, l: u64) -> WitnessFlags {
    witness_flags_mod5(a, (l % 5) as i64)
}

pub(crate) fn witness_flags_mod5(a: i64, det: i64) -> WitnessFlags {
    let a = a.rem_euclid(5);
    let det = det.rem_euclid(5);
    let disc = (a * a - 4 * det).rem_euclid(5);
    WitnessFlags {
        square_witness: matches!(disc, 1 | 4) && a != 0,
        nonsquare_witness: matches!(disc, 2 | 3),
        exceptional_witness: (a * a - 3 * det).rem_euclid(5) == 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub curve: String,
    pub flags: WitnessFlags,
    pub certified: bool,
    /// Frobenius samples examined before the scan stopped.
    pub samples_used: u64,
    pub scan_bound: u64,
}

/// Walk the good degree-1 primes in increasing order, stopping as soon as
/// all three witness types have appeared.
pub fn certify_with(table: &PrimeTable, curve: &KCurve) -> Result<ScanReport> {
    let mut flags = WitnessFlags::default();
    let mut used = 0;
    for l in table.good_primes(curve)? {
        for s in table.samples_at(curve, l)? {
            used += 1;
            flags = flags.merge(witness_flags(s.a, s.l));
        }
        if flags.all() {
            break;
        }
    }
    Ok(ScanReport {
        curve: curve.id(),
        flags,
        certified: flags.all(),
        samples_used: used,
        scan_bound: table.bound(),
    })
}

pub fn certify_sl2(curve: &KCurve, bound: u64) -> Result<ScanReport> {
    certify_with(&PrimeTable::new(curve.field, bound), curve)
}

/// A decomposed generic prime and the traces that qualified it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DgPrime {
    pub l: u64,
    pub traces: Vec<i64>,
}

pub fn dg_find_with(table: &PrimeTable, curve: &KCurve) -> Result<Option<DgPrime>> {
    for l in table.good_primes(curve)? {
        let samples = table.samples_at(curve, l)?;
        if samples.iter().all(|s| dg_congruence(s.a, l as i64)) {
            return Ok(Some(DgPrime {
                l,
                traces: samples.iter().map(|s| s.a).collect(),
            }));
        }
    }
    Ok(None)
}

/// Smallest decomposed generic `l <= bound`, or `None`.
pub fn dg_find(curve: &KCurve, bound: u64) -> Result<Option<DgPrime>> {
    dg_find_with(&PrimeTable::new(curve.field, bound), curve)
}

/// Residue criterion at each prime above 5: `A != 0` and `Delta != 0`.
pub fn residue_criterion(curve: &KCurve) -> Result<Vec<bool>> {
    let maps = reduction_maps(&curve.field)?;
    Ok(maps
        .iter()
        .map(|m| {
            let pair = FFPair {
                a: m.reduce(&curve.a),
                b: m.reduce(&curve.b),
            };
            !pair.a.is_zero() && !discriminant(&pair).is_zero()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checklist {
    pub curve: String,
    pub scan_bound: u64,
    /// "certified" or "inconclusive".
    pub irreducibility: &'static str,
    /// "verified" or "inconclusive".
    pub ordinary_above_5: &'static str,
    /// "verified", "inferred from image certification" or "inconclusive".
    pub decomposed_generic: &'static str,
    pub dg_prime: Option<u64>,
    pub all_affirmative: bool,
    pub verdict: &'static str,
}

pub fn checklist(curve: &KCurve, bound: u64) -> Result<Checklist> {
    let table = PrimeTable::new(curve.field, bound);
    let scan = certify_with(&table, curve)?;
    let irreducibility = if scan.certified {
        "certified"
    } else {
        "inconclusive"
    };
    let ordinary_above_5 = if residue_criterion(curve)?.iter().all(|&ok| ok) {
        "verified"
    } else {
        "inconclusive"
    };
    let dg = dg_find_with(&table, curve)?;
    let decomposed_generic = match (&dg, scan.certified && curve.field.is_galois_cm()) {
        (Some(_), _) => "verified",
        (None, true) => "inferred from image certification",
        (None, false) => "inconclusive",
    };
    let all =
        scan.certified && ordinary_above_5 == "verified" && decomposed_generic != "inconclusive";
    Ok(Checklist {
        curve: curve.id(),
        scan_bound: bound,
        irreducibility,
        ordinary_above_5,
        decomposed_generic,
        dg_prime: dg.map(|p| p.l),
        all_affirmative: all,
        verdict: if all {
            "hypotheses empirically verified"
        } else {
            "not verified"
        },
    })
}

/// Uniform nonsingular pairs from `E_X` over an imaginary quadratic field.
/// Pair `i` is drawn from its own stream, so the list does not depend on
/// scheduling.
pub fn sample_curves(
    d: &FieldDescriptor,
    x: u64,
    count: u64,
    seed: u64,
    stream_base: u64,
) -> Result<Vec<KCurve>> {
    let ring = QuadRing::new(d)?;
    let pow = |k: u32| {
        x.checked_pow(k)
            .ok_or_else(|| Error::cap(format!("X^{k} for X = {x}"), u64::MAX))
    };
    let sa = DiskSampler::new(&DiskSpec::new(*d, pow(4)?)?);
    let sb = DiskSampler::new(&DiskSpec::new(*d, pow(6)?)?);
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = batch_rng(seed, stream_base + i);
            loop {
                let (ax, ay) = sa.sample(&mut rng);
                let (bx, by) = sb.sample(&mut rng);
                let core = ring.discriminant_core(ring.doubled(ax, ay), ring.doubled(bx, by));
                if core != (0, 0) {
                    let a = OKElement::new(vec![ax as i64, ay as i64]);
                    let b = OKElement::new(vec![bx as i64, by as i64]);
                    return KCurve::new(*d, a, b);
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub sampled: u64,
    pub uncertified: u64,
    pub fraction: f64,
    pub ci95: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightScan {
    pub field: String,
    pub scan_bound: u64,
    pub seed: u64,
    pub rows: Vec<HeightRow>,
    /// Each fraction is at most the previous one, or their intervals overlap.
    pub weakly_decreasing: bool,
}

/// Uncertified fraction of a fixed list of curves.
pub fn uncertified_fraction(table: &PrimeTable, curves: &[KCurve]) -> Result<(u64, u64)> {
    let reports: Vec<ScanReport> = curves
        .par_iter()
        .map(|c| certify_with(table, c))
        .collect::<Result<_>>()?;
    let bad = reports.iter().filter(|r| !r.certified).count() as u64;
    Ok((bad, curves.len() as u64))
}

pub fn scan_heights(
    d: &FieldDescriptor,
    xs: &[u64],
    samples: u64,
    seed: u64,
    bound: u64,
) -> Result<HeightScan> {
    if samples == 0 {
        return Err(Error::invalid("scan_heights needs at least one sample"));
    }
    let table = PrimeTable::new(*d, bound);
    let mut rows = Vec::new();
    for (k, &x) in xs.iter().enumerate() {
        let curves = sample_curves(d, x, samples, seed, (k as u64) << 32)?;
        let (bad, n) = uncertified_fraction(&table, &curves)?;
        rows.push(HeightRow {
            x,
            sampled: n,
            uncertified: bad,
            fraction: bad as f64 / n as f64,
            ci95: wilson_interval(bad, n),
        });
    }
    let weakly_decreasing = rows
        .windows(2)
        .all(|w| w[1].fraction <= w[0].fraction || w[1].ci95[0] <= w[0].ci95[1]);
    Ok(HeightScan {
        field: d.to_string(),
        scan_bound: bound,
        seed,
        rows,
        weakly_decreasing,
    })
}
