//! Independent re-check of a decomposed generic prime: splitting by root
//! counting, reduction by Horner evaluation, point counts by double loop,
//! and eigenvalue ratios in `F_25 = F_5[s]/(s^2 - 2)`.

#![allow(dead_code)]

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn horner(poly: &[i64], x: i64, l: i64) -> i64 {
    poly.iter()
        .rev()
        .fold(0, |acc, &c| (acc * x + c).rem_euclid(l))
}

fn naive_count(a: i64, b: i64, l: i64) -> i64 {
    let mut n = 1;
    for x in 0..l {
        let rhs = (x * x % l * x + a * x + b).rem_euclid(l);
        n += (0..l).filter(|y| y * y % l == rhs).count() as i64;
    }
    n
}

type F25 = (i64, i64);

fn f25_mul(x: F25, y: F25) -> F25 {
    (
        (x.0 * y.0 + 2 * x.1 * y.1).rem_euclid(5),
        (x.0 * y.1 + x.1 * y.0).rem_euclid(5),
    )
}

fn f25_inv(x: F25) -> F25 {
    (0..25)
        .map(|k| (k % 5, k / 5))
        .find(|&y| f25_mul(x, y) == (1, 0))
        .expect("nonzero")
}

/// Eigenvalue ratio of `x^2 - a x + det` avoids `{1, det, 1/det}`.
pub fn ratio_generic(a: i64, det: i64) -> bool {
    let (a, det) = (a.rem_euclid(5), det.rem_euclid(5));
    let roots: Vec<F25> = (0..25)
        .map(|k| (k % 5, k / 5))
        .filter(|&x| {
            let x2 = f25_mul(x, x);
            (
                (x2.0 - a * x.0 + det).rem_euclid(5),
                (x2.1 - a * x.1).rem_euclid(5),
            ) == (0, 0)
        })
        .collect();
    let alpha = roots[0];
    let beta = f25_mul((det, 0), f25_inv(alpha));
    let ratio = f25_mul(alpha, f25_inv(beta));
    let det_inv = f25_inv((det, 0));
    ![(1, 0), (det, 0), det_inv].contains(&ratio)
}

/// Traces at every prime above `l`, if `l` is eligible: prime, not 2, 3
/// or 5, unramified, split completely, good reduction above `l`.
pub fn eligible_traces(
    minpoly: &[i64],
    ramified: &[u64],
    a: &[i64],
    b: &[i64],
    l: u64,
) -> Option<Vec<i64>> {
    if !is_prime(l) || l <= 5 || ramified.contains(&l) {
        return None;
    }
    let li = l as i64;
    let roots: Vec<i64> = (0..li).filter(|&x| horner(minpoly, x, li) == 0).collect();
    if roots.len() != minpoly.len() - 1 {
        return None;
    }
    let mut traces = Vec::new();
    for r in roots {
        let (am, bm) = (horner(a, r, li), horner(b, r, li));
        if (4 * am * am % li * am + 27 * bm * bm).rem_euclid(li) == 0 {
            return None;
        }
        traces.push(li + 1 - naive_count(am, bm, li));
    }
    Some(traces)
}

/// `Some(true)` when `l` is decomposed generic, `None` when ineligible.
pub fn is_dg_prime(
    minpoly: &[i64],
    ramified: &[u64],
    a: &[i64],
    b: &[i64],
    l: u64,
) -> Option<bool> {
    let traces = eligible_traces(minpoly, ramified, a, b, l)?;
    Some(traces.iter().all(|&t| ratio_generic(t, l as i64)))
}
