//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use ifsmetric::{AffineMap, BoxDomain, Ifs, PointSet};
use rand::Rng;

/// Random affine map sending `[0,1]^d` into itself with contractivity at
/// most `row_cap`.
///
/// Every entry is bounded by `row_cap / d`, so all row and column sums of
/// `|a_kj|` stay below `row_cap` and so does the spectral norm
/// (`||A||_2 <= sqrt(||A||_1 ||A||_inf)`); `b` is then drawn over the
/// admissible range.
pub fn unit_box_map<R: Rng>(rng: &mut R, d: usize, row_cap: f64) -> AffineMap {
    let mut a = vec![0.0; d * d];
    let mut b = vec![0.0; d];
    let cap = row_cap / d as f64;
    for k in 0..d {
        for j in 0..d {
            a[k * d + j] = rng.gen_range(-cap..=cap);
        }
        let low: f64 = (0..d).map(|j| a[k * d + j].min(0.0)).sum();
        let high: f64 = (0..d).map(|j| a[k * d + j].max(0.0)).sum();
        b[k] = rng.gen_range(-low..=1.0 - high);
    }
    AffineMap::new(a, b).expect("generated map is a contraction")
}

pub fn unit_box_ifs<R: Rng>(rng: &mut R, d: usize, n: usize, row_cap: f64) -> Ifs {
    let maps = (0..n).map(|_| unit_box_map(rng, d, row_cap)).collect();
    Ifs::new(BoxDomain::unit(d), maps).expect("generated IFS is valid")
}

pub fn random_points<R: Rng>(rng: &mut R, d: usize, count: usize, delta: f64) -> PointSet {
    let flat: Vec<f64> = (0..count * d).map(|_| rng.gen_range(0.0..=1.0)).collect();
    PointSet::from_flat(d, delta, &flat).unwrap()
}

/// All permutations of `0..n` by recursive insertion.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Minimum assignment cost by enumerating all `n!` permutations.
pub fn brute_assignment(cost: &[f64], n: usize) -> f64 {
    permutations(n)
        .iter()
        .map(|p| (0..n).map(|i| cost[i * n + p[i]]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

fn euclid(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Hausdorff distance by the double loop.
pub fn brute_hausdorff(a: &PointSet, b: &PointSet) -> f64 {
    let directed = |x: &PointSet, y: &PointSet| {
        x.iter()
            .map(|p| y.iter().map(|q| euclid(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Sup of `|f(x) - g(x)|` over a dense grid of `[0,1]^d` for 1-D/2-D maps.
pub fn grid_sup(f: &AffineMap, g: &AffineMap, per_axis: usize) -> f64 {
    let d = f.dim();
    let ticks: Vec<f64> = (0..per_axis).map(|i| i as f64 / (per_axis - 1) as f64).collect();
    let mut best = 0.0_f64;
    let mut visit = |x: &[f64]| {
        best = best.max(euclid(&f.eval(x).unwrap(), &g.eval(x).unwrap()));
    };
    if d == 1 {
        for &t in &ticks {
            visit(&[t]);
        }
    } else {
        for &s in &ticks {
            for &t in &ticks {
                visit(&[s, t]);
            }
        }
    }
    best
}

/// Ternary membership of `k / 3^levels` in the Cantor set: the expansion may
/// use only 0 and 2, where a terminal `…1000` is rewritten as `…0222`.
pub fn cantor_lattice_member(k: u64, levels: u32) -> bool {
    let mut digits = Vec::with_capacity(levels as usize);
    let mut v = k;
    for _ in 0..levels {
        digits.push(v % 3);
        v /= 3;
    }
    if v > 0 {
        // k == 3^levels, i.e. x = 1
        return k == 3u64.pow(levels);
    }
    digits.reverse();
    if let Some(last) = digits.iter().rposition(|&d| d != 0) {
        if digits[last] == 1 {
            digits[last] = 0;
            for d in &mut digits[last + 1..] {
                *d = 2;
            }
        }
    }
    digits.iter().all(|&d| d != 1)
}

/// Cantor endpoints of generation `levels` from the ternary test.
pub fn cantor_oracle(levels: u32, delta: f64) -> PointSet {
    let n = 3u64.pow(levels);
    let pts: Vec<f64> = (0..=n)
        .filter(|&k| cantor_lattice_member(k, levels))
        .map(|k| k as f64 / n as f64)
        .collect();
    PointSet::from_flat(1, delta, &pts).unwrap()
}

/// `S_j = {x/3 + 1/(3j), 2/3 + x/3}` on `[0,1]`.
pub fn cantor_term(j: usize) -> Ifs {
    Ifs::unit_interval(&[(1.0 / 3.0, 1.0 / (3.0 * j as f64)), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
}

pub fn cantor() -> Ifs {
    Ifs::unit_interval(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
}
