//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the search or the LP solver: min K is found by
//! enumerating every subfamily of the power set, and simplex feasibility is
//! decided by Fourier–Motzkin elimination.

#![allow(dead_code)]

use fcforge::rational::{q, Q};
use fcforge::setfam::{GeneratorSystem, SetMask};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Minimum of `K_c` over every nonempty union-closed family on `[n]` that
/// absorbs `b`, by enumerating all `2^(2^n)` subfamilies. `n ≤ 4`.
pub fn brute_min_k(n: usize, b: &[u16], c: &[i64]) -> i64 {
    assert!(n <= 4 && c.len() == n);
    let masks = 1usize << n;
    let total: i64 = c.iter().sum();
    let contrib: Vec<i64> = (0..masks)
        .map(|x| {
            let inside: i64 = (0..n).filter(|i| x >> i & 1 == 1).map(|i| c[i]).sum();
            2 * inside - total
        })
        .collect();
    let mut best = i64::MAX;
    for fam in 1u32..(1u32 << masks) {
        let has = |x: usize| fam >> x & 1 == 1;
        let members: Vec<usize> = (0..masks).filter(|&x| has(x)).collect();
        let closed = members.iter().all(|&x| members.iter().all(|&y| has(x | y)));
        if !closed {
            continue;
        }
        let absorbs = members
            .iter()
            .all(|&x| b.iter().all(|&y| has(x | y as usize)));
        if !absorbs {
            continue;
        }
        let k: i64 = members.iter().map(|&x| contrib[x]).sum();
        best = best.min(k);
    }
    best
}

/// Is `{c ≥ 0, Σ c = 1, w·c ≥ 0 for every row}` nonempty?
pub fn fm_feasible(n: usize, rows: &[Vec<i64>]) -> bool {
    // Substitute c_n = 1 − Σ_{i<n} c_i; constraints are (a, b) meaning a·x ≥ b.
    let m = n - 1;
    let mut cons: Vec<(Vec<Q>, Q)> = Vec::new();
    for i in 0..m {
        let mut a = vec![Q::zero(); m];
        a[i] = q(1);
        cons.push((a, Q::zero()));
    }
    cons.push((vec![q(-1); m], q(-1)));
    for w in rows {
        let last = q(w[n - 1]);
        let a: Vec<Q> = (0..m).map(|i| q(w[i]) - &last).collect();
        cons.push((a, -last));
    }
    for v in (0..m).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in cons {
            if a[v].is_positive() {
                pos.push((a, b));
            } else if a[v].is_negative() {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let (sp, sn) = (-an[v].clone(), ap[v].clone());
                let a: Vec<Q> = ap.iter().zip(an).map(|(x, y)| x * &sp + y * &sn).collect();
                rest.push((a, bp * &sp + bn * &sn));
            }
        }
        cons = dedup(rest);
    }
    cons.iter().all(|(_, b)| !b.is_positive())
}

fn dedup(cons: Vec<(Vec<Q>, Q)>) -> Vec<(Vec<Q>, Q)> {
    let mut out: Vec<(Vec<Q>, Q)> = Vec::new();
    for (a, b) in cons {
        let scale = a
            .iter()
            .chain(std::iter::once(&b))
            .map(|x| x.abs())
            .fold(Q::zero(), |m, x| if x > m { x } else { m });
        let (a, b) = if scale.is_zero() {
            (a, b)
        } else {
            (a.iter().map(|x| x / &scale).collect(), b / &scale)
        };
        if !out.contains(&(a.clone(), b.clone())) {
            out.push((a, b));
        }
    }
    out
}

pub fn random_mask(rng: &mut ChaCha8Rng, n: usize) -> SetMask {
    loop {
        let bits = rng.gen_range(1..(1u32 << n));
        if let Ok(m) = SetMask::new(bits, n) {
            return m;
        }
    }
}

/// One to four distinct random nonempty generators covering `[n]`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> GeneratorSystem {
    let k = rng.gen_range(1..=4);
    let mut gens: Vec<SetMask> = (0..k).map(|_| random_mask(rng, n)).collect();
    let cover = gens.iter().fold(SetMask::EMPTY, |u, g| u.union(*g));
    if cover != SetMask::full(n) {
        gens[0] = gens[0].union(SetMask::new(!cover.bits() as u32 & ((1 << n) - 1), n).unwrap());
    }
    gens.sort_unstable();
    gens.dedup();
    GeneratorSystem::new(n, gens).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut c: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
    if c.iter().all(|&x| x == 0) {
        c[0] = 1;
    }
    c
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let m = rng.gen_range(1..=6);
    (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect())
        .collect()
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
