#![allow(dead_code)]

use cellmat::{GroupedVector, Permutation, PositiveVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random grouped vector with `k <= max_k` groups, sizes at least 2 and
/// `n <= max_n`, distinct values drawn from `[lo, hi]`.
pub fn grouped(rng: &mut impl Rng, max_k: usize, max_n: usize, lo: f64, hi: f64) -> GroupedVector {
    let k = rng.gen_range(1..=max_k);
    let per_group = max_n / k;
    let multiplicities: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=per_group)).collect();
    let mut values: Vec<f64> = Vec::with_capacity(k);
    while values.len() < k {
        let v = rng.gen_range(lo..=hi);
        if values.iter().all(|w| (w - v).abs() > 1e-3) {
            values.push(v);
        }
    }
    GroupedVector::new(values, multiplicities).unwrap()
}

pub fn shuffled(rng: &mut impl Rng, x: &PositiveVector) -> PositiveVector {
    let mut v = x.entries().to_vec();
    v.shuffle(rng);
    PositiveVector::new(v).unwrap()
}

pub fn positive_vector(rng: &mut impl Rng, min_n: usize, max_n: usize, lo: f64, hi: f64) -> PositiveVector {
    let n = rng.gen_range(min_n..=max_n);
    PositiveVector::new((0..n).map(|_| rng.gen_range(lo..=hi)).collect()).unwrap()
}

pub fn permutation(rng: &mut impl Rng, n: usize) -> Permutation {
    let mut mapping: Vec<usize> = (0..n).collect();
    mapping.shuffle(rng);
    Permutation::from_zero_based(mapping).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
