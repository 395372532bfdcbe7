#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensor_ginv::{Matrix, Shape, Tensor};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small axis blocks used for random shapes.
pub const BLOCKS: &[&[usize]] = &[&[2], &[3], &[2, 2], &[3, 2], &[2, 1, 2], &[1, 3]];

pub fn block(rng: &mut impl Rng) -> &'static [usize] {
    BLOCKS[rng.random_range(0..BLOCKS.len())]
}

pub fn random_tensor(rng: &mut impl Rng, rows: &[usize], cols: &[usize], complex: bool) -> Tensor {
    let shape = Shape::from_blocks(rows, cols).unwrap();
    let entries = (0..shape.len())
        .map(|_| {
            let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            Complex64::new(rng.random_range(-1.0..1.0), im)
        })
        .collect();
    Tensor::new(shape, entries).unwrap()
}

/// Product of random factors through an inner block of size `r`.
pub fn low_rank(rng: &mut impl Rng, rows: &[usize], cols: &[usize], r: usize, complex: bool) -> Tensor {
    let p = random_tensor(rng, rows, &[r], complex);
    let q = random_tensor(rng, &[r], cols, complex);
    p.dot(&q).unwrap()
}

/// All multi-indices of `extents`, first index fastest.
pub fn indices(extents: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = extents.iter().product();
    (0..total)
        .map(|mut k| {
            extents
                .iter()
                .map(|&n| {
                    let i = k % n;
                    k /= n;
                    i
                })
                .collect()
        })
        .collect()
}

/// Contraction by explicit summation over multi-indices.
pub fn einstein_oracle(a: &Tensor, b: &Tensor, n: usize) -> Vec<Complex64> {
    let lead = &a.shape().extents()[..a.shape().ndim() - n];
    let mid = &b.shape().extents()[..n];
    let trail = &b.shape().extents()[n..];
    let mut out = Vec::new();
    for k in indices(trail) {
        for i in indices(lead) {
            let mut s = Complex64::new(0.0, 0.0);
            for j in indices(mid) {
                let ai: Vec<usize> = i.iter().chain(&j).copied().collect();
                let bi: Vec<usize> = j.iter().chain(&k).copied().collect();
                s += a.get(&ai).unwrap() * b.get(&bi).unwrap();
            }
            out.push(s);
        }
    }
    out
}

pub fn max_abs_diff(x: &Tensor, y: &Tensor) -> f64 {
    assert_eq!(x.shape(), y.shape());
    x.entries()
        .iter()
        .zip(y.entries())
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

pub fn rel_diff(x: &Tensor, y: &Tensor) -> f64 {
    let d = x.sub(y).unwrap().frobenius_norm();
    let s = x.frobenius_norm().max(y.frobenius_norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

pub fn mat_rel_diff(x: &Matrix, y: &Matrix) -> f64 {
    let d = (x - y).norm();
    let s = x.norm().max(y.norm());
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

pub fn scaled(t: &Tensor, s: f64) -> Tensor {
    t.scale(Complex64::new(s, 0.0))
}
