//! Brute-force group theory in `GL_2(F_5)`: subgroup lattice, witness
//! soundness, perfectness of `SL_2(F_5)`, and the eigenvalue-ratio check
//! behind the decomposed-generic congruences.

use std::collections::HashSet;

use serde::Serialize;

use super::{witness_flags_mod5, WitnessFlags};
use crate::ffield::make_field;

/// Matrix `[[a, b], [c, d]]` stored as `[a, b, c, d]` over `F_5`.
pub type Mat = [u8; 4];

/// Subset of `GL_2(F_5)` as a 480-bit set over element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet([u64; 8]);

impl ElemSet {
    pub fn empty() -> Self {
        ElemSet([0; 8])
    }

    pub fn insert(&mut self, x: u16) -> bool {
        let (w, b) = ((x / 64) as usize, x % 64);
        let fresh = self.0[w] & (1 << b) == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, x: u16) -> bool {
        self.0[(x / 64) as usize] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        (0..512u16).filter(move |&x| self.contains(x))
    }
}

/// `GL_2(F_5)` with a full multiplication table.
pub struct Gl2F5 {
    elems: Vec<Mat>,
    index: Vec<u16>,
    table: Vec<u16>,
    inverse: Vec<u16>,
}

fn code(m: Mat) -> usize {
    m[0] as usize + 5 * m[1] as usize + 25 * m[2] as usize + 125 * m[3] as usize
}

fn mat_mul(x: Mat, y: Mat) -> Mat {
    [
        (x[0] * y[0] + x[1] * y[2]) % 5,
        (x[0] * y[1] + x[1] * y[3]) % 5,
        (x[2] * y[0] + x[3] * y[2]) % 5,
        (x[2] * y[1] + x[3] * y[3]) % 5,
    ]
}

fn mat_det(m: Mat) -> u8 {
    ((m[0] as i32 * m[3] as i32 - m[1] as i32 * m[2] as i32).rem_euclid(5)) as u8
}

impl Default for Gl2F5 {
    fn default() -> Self {
        Self::new()
    }
}

impl Gl2F5 {
    pub fn new() -> Self {
        let mut elems = Vec::with_capacity(480);
        let mut index = vec![u16::MAX; 625];
        for c in 0..625usize {
            let m = [
                (c % 5) as u8,
                (c / 5 % 5) as u8,
                (c / 25 % 5) as u8,
                (c / 125) as u8,
            ];
            if mat_det(m) != 0 {
                index[c] = elems.len() as u16;
                elems.push(m);
            }
        }
        let n = elems.len();
        let mut table = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                table[i * n + j] = index[code(mat_mul(elems[i], elems[j]))];
            }
        }
        let identity = index[code([1, 0, 0, 1])];
        let inverse = (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| table[i * n + j] == identity)
                    .expect("group element has an inverse") as u16
            })
            .collect();
        Gl2F5 {
            elems,
            index,
            table,
            inverse,
        }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn identity(&self) -> u16 {
        self.index[code([1, 0, 0, 1])]
    }

    pub fn index_of(&self, m: Mat) -> Option<u16> {
        let i = self.index[code(m.map(|x| x % 5))];
        (i != u16::MAX).then_some(i)
    }

    pub fn matrix(&self, x: u16) -> Mat {
        self.elems[x as usize]
    }

    pub fn mul(&self, x: u16, y: u16) -> u16 {
        self.table[x as usize * self.elems.len() + y as usize]
    }

    pub fn inv(&self, x: u16) -> u16 {
        self.inverse[x as usize]
    }

    pub fn trace(&self, x: u16) -> u8 {
        let m = self.elems[x as usize];
        (m[0] + m[3]) % 5
    }

    pub fn det(&self, x: u16) -> u8 {
        mat_det(self.elems[x as usize])
    }

    pub fn all(&self) -> ElemSet {
        let mut s = ElemSet::empty();
        (0..self.order() as u16).for_each(|x| {
            s.insert(x);
        });
        s
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[u16]) -> ElemSet {
        let mut set = ElemSet::empty();
        let id = self.identity();
        set.insert(id);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push(y);
                }
            }
        }
        set
    }

    pub fn sl2(&self) -> ElemSet {
        let mut s = ElemSet::empty();
        (0..self.order() as u16)
            .filter(|&x| self.det(x) == 1)
            .for_each(|x| {
                s.insert(x);
            });
        s
    }

    /// Witness types produced by the elements of `set`, reading each
    /// element as a Frobenius with trace `tr` and determinant `det`.
    pub fn witnesses(&self, set: &ElemSet) -> WitnessFlags {
        set.iter().fold(WitnessFlags::default(), |acc, x| {
            acc.merge(witness_flags_mod5(self.trace(x) as i64, self.det(x) as i64))
        })
    }

    pub fn det_surjective(&self, set: &ElemSet) -> bool {
        let dets: HashSet<u8> = set.iter().map(|x| self.det(x)).collect();
        dets.len() == 4
    }
}

/// Every subgroup of `GL_2(F_5)`, sorted. Starts from the cyclic subgroups
/// and joins each known subgroup with each cyclic one until nothing new
/// appears; every finitely generated subgroup is reached this way.
pub fn enumerate_subgroups(g: &Gl2F5) -> Vec<ElemSet> {
    let mut cyclic: Vec<(ElemSet, u16)> = Vec::new();
    let mut seen = HashSet::new();
    for x in 0..g.order() as u16 {
        let c = g.closure(&[x]);
        if seen.insert(c) {
            cyclic.push((c, x));
        }
    }
    let mut known: HashSet<ElemSet> = seen;
    let mut frontier: Vec<(ElemSet, Vec<u16>)> =
        cyclic.iter().map(|&(c, x)| (c, vec![x])).collect();
    while let Some((h, gens)) = frontier.pop() {
        for &(c, x) in &cyclic {
            if c.is_subset(&h) {
                continue;
            }
            let mut joined = gens.clone();
            joined.push(x);
            let j = g.closure(&joined);
            if known.insert(j) {
                frontier.push((j, joined));
            }
        }
    }
    let mut all: Vec<ElemSet> = known.into_iter().collect();
    all.sort_by_key(|s| (s.len(), *s));
    all
}

/// A maximal determinant-surjective subgroup not containing `SL_2(F_5)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalRecord {
    pub order: usize,
    pub witnesses: WitnessFlags,
    pub missing: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupOracleReport {
    pub group_order: usize,
    pub subgroup_count: usize,
    pub det_surjective: usize,
    /// Det-surjective subgroups that do not contain `SL_2(F_5)`.
    pub det_surjective_proper: usize,
    /// Of those, how many show all three witness types (must be 0).
    pub violations: usize,
    pub full_group_witnesses: WitnessFlags,
    /// Maximal members of the det-surjective proper family, by order.
    pub maximal: Vec<MaximalRecord>,
    pub sound: bool,
}

pub fn subgroup_oracle() -> SubgroupOracleReport {
    let g = Gl2F5::new();
    let subgroups = enumerate_subgroups(&g);
    let sl2 = g.sl2();
    let surj: Vec<&ElemSet> = subgroups.iter().filter(|h| g.det_surjective(h)).collect();
    let proper: Vec<&ElemSet> = surj.iter().copied().filter(|h| !sl2.is_subset(h)).collect();
    let violations = proper.iter().filter(|h| g.witnesses(h).all()).count();
    let mut maximal: Vec<MaximalRecord> = proper
        .iter()
        .filter(|h| !proper.iter().any(|k| k.len() > h.len() && h.is_subset(k)))
        .map(|h| {
            let w = g.witnesses(h);
            MaximalRecord {
                order: h.len(),
                witnesses: w,
                missing: w.missing(),
            }
        })
        .collect();
    maximal.sort_by(|a, b| a.order.cmp(&b.order).then(a.missing.cmp(&b.missing)));
    let full = g.witnesses(&g.all());
    SubgroupOracleReport {
        group_order: g.order(),
        subgroup_count: subgroups.len(),
        det_surjective: surj.len(),
        det_surjective_proper: proper.len(),
        violations,
        full_group_witnesses: full,
        sound: violations == 0 && full.all(),
        maximal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PerfectnessReport {
    pub order: usize,
    pub commutators: usize,
    pub commutator_closure: usize,
    pub perfect: bool,
}

/// Generate `SL_2(F_5)`, collect all commutators and close them under
/// multiplication.
pub fn perfectness_sl2() -> PerfectnessReport {
    let g = Gl2F5::new();
    let sl2 = g.closure(&[
        g.index_of([1, 1, 0, 1]).expect("unipotent"),
        g.index_of([1, 0, 1, 1]).expect("unipotent"),
    ]);
    let mut comms = ElemSet::empty();
    for x in sl2.iter() {
        for y in sl2.iter() {
            let c = g.mul(g.mul(g.inv(x), g.inv(y)), g.mul(x, y));
            comms.insert(c);
        }
    }
    let gens: Vec<u16> = comms.iter().collect();
    let closed = g.closure(&gens);
    PerfectnessReport {
        order: sl2.len(),
        commutators: comms.len(),
        commutator_closure: closed.len(),
        perfect: closed == sl2 && sl2 == g.sl2(),
    }
}

pub fn is_perfect_sl2() -> bool {
    perfectness_sl2().perfect
}

/// Per `(a, det)` comparison of the two forms of the decomposed-generic
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DgCase {
    pub a: u8,
    pub det: u8,
    pub by_congruence: bool,
    pub by_eigenvalues: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DgEquivalenceReport {
    pub cases: Vec<DgCase>,
    pub mismatches: usize,
}

/// `a^2 != 4 det` and `a != +-(1 + det)` in `F_5`.
pub fn dg_congruence(a: i64, det: i64) -> bool {
    let (a, det) = (a.rem_euclid(5), det.rem_euclid(5));
    (a * a - 4 * det).rem_euclid(5) != 0
        && (a - 1 - det).rem_euclid(5) != 0
        && (a + 1 + det).rem_euclid(5) != 0
}

/// For every `(a, det)` in `F_5 x F_5^*`, find the roots of
/// `x^2 - a x + det` in `F_25` and test whether the eigenvalue ratio
/// avoids `{1, det, det^-1}`.
pub fn dg_equivalence_oracle() -> DgEquivalenceReport {
    let f25 = make_field(5, 2).expect("F_25 is within the field cap");
    let mut cases = Vec::new();
    for a in 0..5i64 {
        for det in 1..5i64 {
            let (ae, de) = (f25.from_int(a), f25.from_int(det));
            let roots: Vec<_> = f25
                .enumerate()
                .filter(|&x| (x * x - ae * x + de).is_zero())
                .collect();
            let alpha = roots[0];
            let beta = de * alpha.inv().expect("det is a unit");
            let ratio = alpha * beta.inv().expect("det is a unit");
            let excluded = [f25.one(), de, de.inv().expect("unit")];
            let ratios = [ratio, ratio.inv().expect("unit")];
            let by_eigenvalues = ratios.iter().all(|r| !excluded.contains(r));
            cases.push(DgCase {
                a: a as u8,
                det: det as u8,
                by_congruence: dg_congruence(a, det),
                by_eigenvalues,
            });
        }
    }
    let mismatches = cases
        .iter()
        .filter(|c| c.by_congruence != c.by_eigenvalues)
        .count();
    DgEquivalenceReport { cases, mismatches }
}
