//! Counting bounds and level checks: binomial cascades, shadow thresholds,
//! the level comparison for families rich in 2-sets, window contributions,
//! lower-bound constructions and pigeonhole reductions.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::setfam::{check_ground, Family, GeneratorSystem, SetMask};

/// `C(a, b)`, zero when `b < 0` or `a < b`.
pub fn binom(a: i64, b: i64) -> u128 {
    if b < 0 || a < b {
        return 0;
    }
    let b = b.min(a - b) as u128;
    let a = a as u128;
    (0..b).fold(1u128, |acc, i| acc * (a - i) / (i + 1))
}

fn binom_big(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    (0..b).fold(BigUint::one(), |acc, i| acc * (a - i) / (i + 1))
}

/// `r = C(a_k,k) + C(a_{k−1},k−1) + … + C(a_t,t)` with `a_k > … > a_t ≥ t ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cascade {
    pub k: usize,
    /// `a_k, a_{k−1}, …, a_t`.
    pub terms: Vec<usize>,
}

impl Cascade {
    /// Index of the last term.
    pub fn t(&self) -> usize {
        self.k + 1 - self.terms.len()
    }

    /// Pairs `(a_i, i)` from the top level down.
    pub fn indexed(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.terms.iter().enumerate().map(|(j, &a)| (a, self.k - j))
    }

    pub fn value(&self) -> u128 {
        self.indexed().map(|(a, i)| binom(a as i64, i as i64)).sum()
    }
}

impl fmt::Display for Cascade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indexed().map(|(a, i)| format!("C({a},{i})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Greedy cascade of `r` at level `k`.
pub fn cascade(r: u128, k: usize) -> Result<Cascade> {
    if r == 0 {
        return Err(Error::Range("cascade needs r ≥ 1".into()));
    }
    if k == 0 {
        return Err(Error::Range("cascade needs k ≥ 1".into()));
    }
    let mut rest = r;
    let mut terms = Vec::new();
    for i in (1..=k).rev() {
        let mut a = i;
        while binom(a as i64 + 1, i as i64) <= rest {
            a += 1;
        }
        terms.push(a);
        rest -= binom(a as i64, i as i64);
        if rest == 0 {
            break;
        }
    }
    debug_assert_eq!(rest, 0);
    Ok(Cascade { k, terms })
}

/// `d_j(n,k,r) = C(n,j) − C(a_k,j) − C(a_{k−1},j−1) − … − C(a_t,t−k+j)`.
pub fn d_j(n: usize, k: usize, r: u128, j: usize) -> Result<i128> {
    if k == 0 || k > n {
        return Err(Error::Range(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    if j == 0 || j > k {
        return Err(Error::Range(format!("need 1 ≤ j ≤ k, got j={j}, k={k}")));
    }
    let top = binom(n as i64, k as i64);
    if r == 0 || r > top {
        return Err(Error::Range(format!(
            "need 1 ≤ r ≤ C({n},{k}) = {top}, got {r}"
        )));
    }
    let c = cascade(r, k)?;
    let shadow: u128 = c
        .indexed()
        .map(|(a, i)| binom(a as i64, i as i64 - k as i64 + j as i64))
        .sum();
    Ok(binom(n as i64, j as i64) as i128 - shadow as i128)
}

/// `C(n−1,j−1) − C(n−k−1,j−1) + 1`: enough `j`-sets through every element
/// to force all `(n−k)`-sets.
pub fn shadow_threshold(n: usize, k: usize, j: usize) -> Result<u128> {
    if j == 0 || j + k > n {
        return Err(Error::Range(format!(
            "need 1 ≤ j ≤ n−k, got j={j}, n={n}, k={k}"
        )));
    }
    let (n, k, j) = (n as i64, k as i64, j as i64);
    Ok(binom(n - 1, j - 1) - binom(n - k - 1, j - 1) + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelCheck {
    /// Hypothesis held and every `(n−k)`-set is present.
    Witnessed,
    /// Hypothesis failed for the given element.
    Vacuous { element: usize },
    /// Hypothesis held but the conclusion failed.
    Violated,
}

/// Tests the shadow-threshold implication on a concrete union-closed family.
pub fn full_level_check(a: &Family, k: usize, j: usize) -> Result<LevelCheck> {
    let n = a.ground();
    let need = shadow_threshold(n, k, j)?;
    if !a.is_union_closed() {
        return Err(Error::NotUnionClosed);
    }
    for i in 1..=n {
        let t = a.iter().filter(|m| m.len() == j && m.contains(i)).count() as u128;
        if t < need {
            return Ok(LevelCheck::Vacuous { element: i });
        }
    }
    let profile = a.size_profile();
    if profile[n - k] as u128 == binom(n as i64, (n - k) as i64) {
        Ok(LevelCheck::Witnessed)
    } else {
        Ok(LevelCheck::Violated)
    }
}

/// True iff `a` has at most `C(n−1,2)` 2-sets or `n_{n−k} ≥ n_k` for every
/// `0 ≤ k ≤ ⌊n/2⌋`.
pub fn vcj_holds(a: &Family) -> Result<bool> {
    if !a.is_union_closed() {
        return Err(Error::NotUnionClosed);
    }
    let n = a.ground();
    let p = a.size_profile();
    if n < 2 || (p[2] as u128) <= binom(n as i64 - 1, 2) {
        return Ok(true);
    }
    Ok((0..=n / 2).all(|k| p[n - k] >= p[k]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VcjMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcjReport {
    pub n: usize,
    pub mode: VcjMode,
    pub checked: u64,
    /// Families meeting the 2-set hypothesis (all of them, by construction).
    pub hypothesis_met: u64,
    pub violations: u64,
    /// First violating family in generation order.
    pub first_violation: Option<Family>,
}

impl VcjReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }

    pub fn machine_lines(&self) -> Vec<String> {
        let mut out = vec![format!("n={}", self.n)];
        match self.mode {
            VcjMode::Exhaustive => out.push("mode=exhaustive".into()),
            VcjMode::Sampled { samples, seed } => {
                out.push("mode=sampled".into());
                out.push(format!("samples={samples}"));
                out.push(format!("seed={seed}"));
            }
        }
        out.push(format!("checked={}", self.checked));
        out.push(format!("hypothesis_met={}", self.hypothesis_met));
        out.push(format!("violations={}", self.violations));
        if let Some(f) = &self.first_violation {
            out.push("violation:".into());
            out.extend(f.to_string().lines().map(str::to_string));
        }
        out
    }
}

impl fmt::Display for VcjReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "OK" } else { "VIOLATED" };
        match self.mode {
            VcjMode::Exhaustive => write!(
                f,
                "vcj n={} exhaustive {} checked={} violations={}",
                self.n, verdict, self.checked, self.violations
            ),
            VcjMode::Sampled { samples, seed } => write!(
                f,
                "vcj n={} sampled {} samples={} seed={} violations={}",
                self.n, verdict, samples, seed, self.violations
            ),
        }
    }
}

fn k_sets(n: usize, k: usize) -> Vec<SetMask> {
    (1..=n)
        .combinations(k)
        .map(|c| SetMask::from_elements(&c, n).expect("in range"))
        .collect()
}

fn check_one(n: usize, gens: Vec<SetMask>) -> (bool, bool, Family) {
    let fam = GeneratorSystem::new(n, gens)
        .expect("distinct nonempty generators")
        .close();
    let p = fam.size_profile();
    let hyp = (p[2] as u128) > binom(n as i64 - 1, 2);
    let ok = vcj_holds(&fam).expect("closures are union-closed");
    (hyp, ok, fam)
}

fn fold_results(
    n: usize,
    mode: VcjMode,
    results: impl Iterator<Item = (bool, bool, Family)>,
) -> VcjReport {
    let mut report = VcjReport {
        n,
        mode,
        checked: 0,
        hypothesis_met: 0,
        violations: 0,
        first_violation: None,
    };
    for (hyp, ok, fam) in results {
        report.checked += 1;
        report.hypothesis_met += hyp as u64;
        if !ok {
            report.violations += 1;
            report.first_violation.get_or_insert(fam);
        }
    }
    report
}

/// Every family generated by an edge set above the threshold together with
/// any subset of the `k`-sets, for `1 ≤ k ≤ ⌊n/2⌋`.
pub fn vcj_exhaustive(n: usize) -> Result<VcjReport> {
    check_ground(n)?;
    if !(2..=6).contains(&n) {
        return Err(Error::Unsupported(format!(
            "exhaustive level check supports 2 ≤ n ≤ 6, got {n}"
        )));
    }
    let edges = k_sets(n, 2);
    let min_edges = binom(n as i64 - 1, 2) as usize + 1;
    let edge_sets: Vec<Vec<SetMask>> = (min_edges..=edges.len())
        .flat_map(|s| edges.iter().copied().combinations(s))
        .collect();
    let mut jobs: Vec<(usize, usize, u64)> = Vec::new();
    for e in 0..edge_sets.len() {
        for k in 1..=n / 2 {
            if k == 2 {
                jobs.push((e, k, 0));
                continue;
            }
            let count = 1u64 << binom(n as i64, k as i64);
            jobs.extend((0..count).map(|bits| (e, k, bits)));
        }
    }
    let level: Vec<Vec<SetMask>> = (0..=n / 2).map(|k| k_sets(n, k)).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(e, k, bits)| {
            let mut gens = edge_sets[e].clone();
            gens.extend(
                level[k]
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, &m)| m),
            );
            check_one(n, gens)
        })
        .collect();
    Ok(fold_results(n, VcjMode::Exhaustive, results.into_iter()))
}

const SAMPLE_BATCH: u64 = 1000;

fn sample_gens(n: usize, rng: &mut ChaCha8Rng, edges: &[SetMask]) -> Vec<SetMask> {
    let min_edges = binom(n as i64 - 1, 2) as usize + 1;
    let size = rng.gen_range(min_edges..=edges.len());
    let mut gens: Vec<SetMask> = rand::seq::index::sample(rng, edges.len(), size)
        .into_iter()
        .map(|i| edges[i])
        .collect();
    let k = rng.gen_range(1..=n / 2);
    if k != 2 {
        let density: f64 = rng.gen();
        gens.extend(k_sets(n, k).into_iter().filter(|_| rng.gen_bool(density)));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let bits: u32 = rng.gen_range(1..(1u32 << n));
        let m = SetMask::new(bits, n).expect("in range");
        if !gens.contains(&m) {
            gens.push(m);
        }
    }
    gens
}

/// Seeded random families over edge sets above the threshold plus random
/// extra generators. Batches of 1000 use independent streams of one seed.
pub fn vcj_sampled(n: usize, samples: u64, seed: u64) -> Result<VcjReport> {
    check_ground(n)?;
    if n < 2 {
        return Err(Error::Range("level check needs n ≥ 2".into()));
    }
    let edges = k_sets(n, 2);
    let batches = samples.div_ceil(SAMPLE_BATCH);
    let results: Vec<Vec<_>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = SAMPLE_BATCH.min(samples - b * SAMPLE_BATCH);
            (0..len)
                .map(|_| check_one(n, sample_gens(n, &mut rng, &edges)))
                .collect()
        })
        .collect();
    Ok(fold_results(
        n,
        VcjMode::Sampled { samples, seed },
        results.into_iter().flatten(),
    ))
}

/// `(2r − n) / C(n−r, w−r)`: the share of an `r`-set's all-ones contribution
/// assigned to each of the `w`-sets containing it.
pub fn window_contribution(r: usize, n: usize, w: usize) -> Result<Q> {
    if r > w || w > n {
        return Err(Error::Range(format!(
            "need 0 ≤ r ≤ w ≤ n, got r={r}, w={w}, n={n}"
        )));
    }
    let d = binom((n - r) as i64, (w - r) as i64);
    Ok(q(2 * r as i64 - n as i64) / Q::from_integer(d.into()))
}

/// `Σ_W Σ_{X ∈ 𝒜, X ⊆ W} window_contribution(|X|, n, w)` over all `w`-sets `W`.
pub fn window_sum(a: &Family, w: usize) -> Result<Q> {
    let n = a.ground();
    if w > n {
        return Err(Error::Range(format!("window {w} exceeds ground set {n}")));
    }
    let share: Vec<Q> = (0..=w)
        .map(|r| window_contribution(r, n, w))
        .collect::<Result<_>>()?;
    let mut total = Q::zero();
    for win in k_sets(n, w) {
        for m in a.iter().filter(|m| m.is_subset_of(win)) {
            total += &share[m.len()];
        }
    }
    Ok(total)
}

/// `(n−2)·C(n−2,k−2) < 2·Σ_{i=0}^{k−3} C(n−2,i)`.
pub fn non_fc_threshold(n: usize, k: usize) -> Result<bool> {
    if k < 2 || n < k {
        return Err(Error::Range(format!("need 2 ≤ k ≤ n, got k={k}, n={n}")));
    }
    let m = (n - 2) as u64;
    let lhs = BigUint::from(m) * binom_big(m, (k - 2) as u64);
    let rhs: BigUint = (0..k.saturating_sub(2) as u64)
        .map(|i| binom_big(m, i))
        .sum::<BigUint>()
        * 2u32;
    Ok(lhs < rhs)
}

/// The `k`-sets whose three smallest elements are `{4i+1,4i+2,4i+3}` or
/// `{4i+1,4i+2,4i+4}` for some `0 ≤ i < r`.
pub fn construct_b(n: usize, k: usize, r: usize) -> Result<GeneratorSystem> {
    check_ground(n)?;
    if k < 3 || k > n {
        return Err(Error::Range(format!("need 3 ≤ k ≤ n, got k={k}, n={n}")));
    }
    if r == 0 || 4 * r > n {
        return Err(Error::Range(format!(
            "need 1 ≤ r and 4r ≤ n, got r={r}, n={n}"
        )));
    }
    let triples: Vec<[usize; 3]> = (0..r)
        .flat_map(|i| {
            [
                [4 * i + 1, 4 * i + 2, 4 * i + 3],
                [4 * i + 1, 4 * i + 2, 4 * i + 4],
            ]
        })
        .collect();
    let gens: Vec<SetMask> = (1..=n)
        .combinations(k)
        .filter(|c| triples.iter().any(|t| c[..3] == t[..]))
        .map(|c| SetMask::from_elements(&c, n).expect("in range"))
        .collect();
    GeneratorSystem::new(n, gens)
}

/// The 3-uniform lower-bound system: `ℬ(n,3,r)`, plus `{4r−1,4r+1,4r+2}`
/// when `n = 4r+2` or `n = 4r+3`.
pub fn construct_b3(n: usize) -> Result<GeneratorSystem> {
    let r = n / 4;
    let base = construct_b(n, 3, r)?;
    if n % 4 < 2 {
        return Ok(base);
    }
    let mut gens = base.gens().to_vec();
    gens.push(SetMask::from_elements(
        &[4 * r - 1, 4 * r + 1, 4 * r + 2],
        n,
    )?);
    GeneratorSystem::new(n, gens)
}

/// All `k`-subsets of `[n]` as generators.
pub fn all_k_sets(n: usize, k: usize) -> Result<GeneratorSystem> {
    check_ground(n)?;
    if k == 0 || k > n {
        return Err(Error::Range(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    GeneratorSystem::new(n, k_sets(n, k))
}

/// `m` `k`-sets in `[n]` leave at least `m − ⌊mk/n⌋` of them avoiding an
/// element of minimum degree.
pub fn pigeonhole_reduce(k: usize, n: usize, m: u64) -> Result<(usize, usize, u64)> {
    if n == 0 {
        return Err(Error::Range("need n ≥ 1".into()));
    }
    Ok((k, n - 1, m - m * k as u64 / n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;

    #[test]
    fn cascades() {
        assert_eq!(cascade(1, 5).unwrap().terms, vec![5]);
        assert_eq!(cascade(2, 5).unwrap().terms, vec![5, 4]);
        assert_eq!(cascade(10, 4).unwrap().terms, vec![5, 4, 2]);
        assert!(cascade(0, 3).is_err());
    }

    #[test]
    fn shadow_bound_values() {
        assert_eq!(d_j(6, 5, 1, 1).unwrap(), 1);
        assert_eq!(d_j(6, 5, 2, 1).unwrap(), 0);
        for r in 1..=10 {
            assert!(d_j(6, 4, r, 2).unwrap() <= 10 - r as i128);
        }
        assert!(d_j(6, 4, 16, 2).is_err());
    }

    #[test]
    fn thresholds() {
        for n in 4..10 {
            for k in 1..n - 2 {
                assert_eq!(shadow_threshold(n, k, 2).unwrap(), k as u128 + 1);
            }
        }
        let k5 = GeneratorSystem::new(5, k_sets(5, 2)).unwrap().close();
        assert_eq!(full_level_check(&k5, 2, 2).unwrap(), LevelCheck::Witnessed);
        let one = GeneratorSystem::from_lists(5, &[&[1, 2]]).unwrap().close();
        assert!(matches!(
            full_level_check(&one, 2, 2).unwrap(),
            LevelCheck::Vacuous { .. }
        ));
    }

    #[test]
    fn level_comparison_examples() {
        let k5 = GeneratorSystem::new(5, k_sets(5, 2)).unwrap().close();
        assert_eq!(k5.size_profile(), vec![1, 0, 10, 10, 5, 1]);
        assert!(vcj_holds(&k5).unwrap());
        assert!(vcj_holds(&Family::powerset(4).unwrap()).unwrap());
        let bad = Family::from_lists(3, &[&[1], &[2]]).unwrap();
        assert_eq!(vcj_holds(&bad), Err(Error::NotUnionClosed));
    }

    #[test]
    fn windows() {
        let expect = [
            (7, q(5)),
            (6, q(1)),
            (5, q_frac(1, 6)),
            (4, q_frac(-1, 10)),
            (3, q_frac(-1, 5)),
        ];
        for (r, v) in expect {
            assert_eq!(window_contribution(r, 9, 7).unwrap(), v);
        }
        assert!(window_contribution(8, 9, 7).is_err());
    }

    #[test]
    fn threshold_arithmetic() {
        assert!(!non_fc_threshold(4, 3).unwrap());
        assert!(non_fc_threshold(4, 4).unwrap());
        assert!(!non_fc_threshold(3, 2).unwrap());
        assert!(non_fc_threshold(3, 4).is_err());
    }

    #[test]
    fn constructions() {
        let b = construct_b(8, 3, 2).unwrap();
        let want =
            GeneratorSystem::from_lists(8, &[&[1, 2, 3], &[1, 2, 4], &[5, 6, 7], &[5, 6, 8]])
                .unwrap();
        assert_eq!(b, want);
        let b6 = construct_b3(6).unwrap();
        let want6 = GeneratorSystem::from_lists(6, &[&[1, 2, 3], &[1, 2, 4], &[3, 5, 6]]).unwrap();
        assert_eq!(b6, want6);
        for n in 4..=12 {
            assert_eq!(construct_b(n, 4, 1).unwrap().gens().len(), 2 * n - 7);
        }
        assert!(construct_b(7, 3, 2).is_err());
    }

    #[test]
    fn pigeonhole() {
        assert_eq!(pigeonhole_reduce(3, 7, 6).unwrap(), (3, 6, 4));
        assert_eq!(pigeonhole_reduce(4, 7, 18).unwrap(), (4, 6, 8));
        assert_eq!(pigeonhole_reduce(3, 6, 4).unwrap(), (3, 5, 2));
    }
}
