//! Brute-force residue-criterion pair loop over imaginary quadratic fields,
//! independent of the library's field arithmetic.

#![allow(dead_code)]

/// Element `u + v s` of `F_5[s]/(s^2 + m)`; collapses to `F_5` when `s` is
/// a root in `F_5` (then `v` is always 0).
#[derive(Clone, Copy, PartialEq)]
struct R5 {
    u: i64,
    v: i64,
}

struct Residue {
    /// `s^2 = -m` reduced mod 5
    s2: i64,
    /// Some(r) when reducing through `s -> r` in `F_5`
    root: Option<i64>,
}

impl Residue {
    fn elem(&self, u: i64, v: i64) -> R5 {
        match self.root {
            Some(r) => R5 {
                u: (u + v * r).rem_euclid(5),
                v: 0,
            },
            None => R5 {
                u: u.rem_euclid(5),
                v: v.rem_euclid(5),
            },
        }
    }
    fn mul(&self, a: R5, b: R5) -> R5 {
        self.elem(a.u * b.u + self.s2 * a.v * b.v, a.u * b.v + a.v * b.u)
    }
    fn good(&self, a: R5, b: R5) -> bool {
        let zero = R5 { u: 0, v: 0 };
        if a == zero {
            return false;
        }
        let a3 = self.mul(self.mul(a, a), a);
        let b2 = self.mul(b, b);
        self.elem(4 * a3.u + 27 * b2.u, 4 * a3.v + 27 * b2.v) != zero
    }
}

/// One residue map per prime above 5.
fn residues(m: i64) -> Vec<Residue> {
    let s2 = (-m).rem_euclid(5);
    let roots: Vec<i64> = (0..5).filter(|r| (r * r - s2).rem_euclid(5) == 0).collect();
    if roots.is_empty() {
        vec![Residue { s2, root: None }]
    } else {
        roots
            .into_iter()
            .map(|r| Residue { s2, root: Some(r) })
            .collect()
    }
}

/// Disk points as `(u2, v)` with `x + y w = (u2 + v sqrt(-m)) / 2`.
pub fn disk(m: i64, radius: i64) -> Vec<(i64, i64)> {
    let half = m % 4 == 3;
    let mut pts = Vec::new();
    for y in -2 * radius..=2 * radius {
        for x in -2 * radius..=2 * radius {
            let (u2, v) = if half { (2 * x + y, y) } else { (2 * x, 2 * y) };
            if u2 * u2 + m * v * v < 4 * radius * radius {
                pts.push((u2, v));
            }
        }
    }
    pts
}

fn reduce(res: &Residue, (u2, v): (i64, i64)) -> R5 {
    // 1/2 = 3 mod 5
    res.elem(3 * u2, 3 * v)
}

/// Exact `4A^3 + 27B^2 == 0` with `A, B` in doubled coordinates.
pub fn delta_zero(m: i64, a: (i64, i64), b: (i64, i64)) -> bool {
    let mul = |p: (i128, i128), q: (i128, i128)| {
        (p.0 * q.0 - m as i128 * p.1 * q.1, p.0 * q.1 + p.1 * q.0)
    };
    let a = (a.0 as i128, a.1 as i128);
    let b = (b.0 as i128, b.1 as i128);
    // doubled coordinates: A^3 carries 1/8, B^2 carries 1/4
    let a3 = mul(mul(a, a), a);
    let b2 = mul(b, b);
    4 * a3.0 + 27 * 2 * b2.0 == 0 && 4 * a3.1 + 27 * 2 * b2.1 == 0
}

/// Counts over all pairs `(A, B)` with `|A| < X^4`, `|B| < X^6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairLoop {
    pub count_a: u64,
    pub count_b: u64,
    pub good: u64,
    pub delta_zero: u64,
}

pub fn pair_loop(m: i64, x: i64) -> PairLoop {
    let res = residues(m);
    let pa = disk(m, x.pow(4));
    let pb = disk(m, x.pow(6));
    let ra: Vec<Vec<R5>> = pa
        .iter()
        .map(|&p| res.iter().map(|r| reduce(r, p)).collect())
        .collect();
    let rb: Vec<Vec<R5>> = pb
        .iter()
        .map(|&p| res.iter().map(|r| reduce(r, p)).collect())
        .collect();
    let mut good = 0u64;
    let mut delta_zero_pairs = 0u64;
    for (ia, a) in ra.iter().enumerate() {
        for (ib, b) in rb.iter().enumerate() {
            if res.iter().enumerate().all(|(k, r)| r.good(a[k], b[k])) {
                good += 1;
            }
            if delta_zero(m, pa[ia], pb[ib]) {
                delta_zero_pairs += 1;
            }
        }
    }
    PairLoop {
        count_a: pa.len() as u64,
        count_b: pb.len() as u64,
        good,
        delta_zero: delta_zero_pairs,
    }
}
