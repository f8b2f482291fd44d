//! Exact minimum of `K_c(𝒜)` over every nonempty union-closed `𝒜 ⊆ 𝒫(n)`
//! with `𝒜 ⊎ ℬ ⊆ 𝒜`.
//!
//! Families are `u128` bitsets indexed by mask value, so `n ≤ 7`. Only masks
//! with negative contribution `2c(X) − c([n])` are branched on: any
//! admissible family can drop its nonnegative members that are not forced by
//! negative ones without raising `K`. Masks are visited by ascending
//! contribution, which is a linear extension of inclusion because weights
//! are nonnegative; so including `X` forces only later masks, namely
//! `X ⊎ (𝒜 ∪ ℬ)`, and an exclusion can never be contradicted afterwards.
//! Every state is therefore admissible, and the bound is the committed `K`
//! plus the negative contributions still undecided.
//!
//! The top levels are expanded breadth-first to whole contribution groups,
//! frontier states equivalent under the stabilizer of `(ℬ, c)` are merged
//! (first in search order kept), and the remaining subtrees are solved
//! independently, so the result and the node count do not depend on the
//! thread count.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{check_base, WeightVector};
use crate::error::{Error, Result};
use crate::rational::{clear_denominators, Q};
use crate::setfam::{all_permutations, Family, SetMask};

pub const MAX_SEARCH_GROUND: usize = 7;
const FRONTIER_TARGET: usize = 64;

/// Best `K` found in a subtree and the family attaining it.
type Best = (i64, Option<u128>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchOrder {
    IncludeFirst,
    ExcludeFirst,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Node limit; exceeding it yields [`SearchOutcome::Exhausted`].
    pub budget: u64,
    pub threads: usize,
    pub symmetry: bool,
    pub order: BranchOrder,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 100_000_000,
            threads: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            symmetry: true,
            order: BranchOrder::IncludeFirst,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// `witness` is the first minimizer in search order; when the minimum is
    /// zero and nothing beats the initial incumbent it is `𝒫(n)`.
    Complete {
        min_k: Q,
        witness: Family,
        nodes: u64,
    },
    Exhausted {
        nodes: u64,
        best_k: Q,
        best_family: Family,
    },
}

impl SearchOutcome {
    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Complete { nodes, .. } | SearchOutcome::Exhausted { nodes, .. } => {
                *nodes
            }
        }
    }
}

struct Abort;

#[derive(Clone, Copy)]
struct State {
    pos: usize,
    fam: u128,
    k: i64,
}

struct Ctx {
    n: usize,
    contrib: Vec<i64>,
    order: Vec<u16>,
    /// Bitset of `order[p..]`.
    suffix: Vec<u128>,
    has_bit: [u128; MAX_SEARCH_GROUND],
    base: u128,
    branch: BranchOrder,
    budget: u64,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

impl Ctx {
    fn tick(&self) -> std::result::Result<(), Abort> {
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.budget || self.aborted.load(Ordering::Relaxed) {
            self.aborted.store(true, Ordering::Relaxed);
            return Err(Abort);
        }
        Ok(())
    }

    /// `{x ∪ s : s ∈ set}`.
    fn shift_union(&self, x: u16, mut set: u128) -> u128 {
        for i in 0..self.n {
            if x >> i & 1 == 1 {
                let h = self.has_bit[i];
                set = (set & h) | ((set & !h) << (1u32 << i));
            }
        }
        set
    }

    fn weight(&self, mut set: u128) -> i64 {
        let mut s = 0;
        while set != 0 {
            let b = set.trailing_zeros() as usize;
            s += self.contrib[b];
            set &= set - 1;
        }
        s
    }

    fn include(&self, st: State, x: u16) -> State {
        let added = self.shift_union(x, st.fam | self.base) & !st.fam;
        State {
            pos: st.pos + 1,
            fam: st.fam | added,
            k: st.k + self.weight(added),
        }
    }

    fn bound(&self, st: &State) -> i64 {
        st.k + self.weight(self.suffix[st.pos] & !st.fam)
    }

    fn skip_forced(&self, st: &mut State, end: usize) {
        while st.pos < end && st.fam >> self.order[st.pos] & 1 == 1 {
            st.pos += 1;
        }
    }

    fn children(&self, st: State) -> [State; 2] {
        let x = self.order[st.pos];
        let inc = self.include(st, x);
        let exc = State {
            pos: st.pos + 1,
            ..st
        };
        match self.branch {
            BranchOrder::IncludeFirst => [inc, exc],
            BranchOrder::ExcludeFirst => [exc, inc],
        }
    }

    fn dfs(&self, mut st: State, best: &mut Best) -> std::result::Result<(), Abort> {
        self.tick()?;
        self.skip_forced(&mut st, self.order.len());
        if st.pos == self.order.len() {
            if st.k < best.0 {
                *best = (st.k, Some(st.fam));
            }
            return Ok(());
        }
        if self.bound(&st) >= best.0 {
            return Ok(());
        }
        for child in self.children(st) {
            self.dfs(child, best)?;
        }
        Ok(())
    }

    /// Expands `st` through every position before `end`, emitting states at `end`.
    fn expand(
        &self,
        mut st: State,
        end: usize,
        incumbent: i64,
        out: &mut Vec<State>,
    ) -> std::result::Result<(), Abort> {
        self.tick()?;
        self.skip_forced(&mut st, end);
        if self.bound(&st) >= incumbent {
            return Ok(());
        }
        if st.pos == end {
            out.push(st);
            return Ok(());
        }
        for child in self.children(st) {
            self.expand(child, end, incumbent, out)?;
        }
        Ok(())
    }

    fn group_end(&self, pos: usize) -> usize {
        let c = self.contrib[self.order[pos] as usize];
        let mut e = pos;
        while e < self.order.len() && self.contrib[self.order[e] as usize] == c {
            e += 1;
        }
        e
    }

    fn to_family(&self, fam: u128) -> Family {
        let members = (0..1u32 << self.n)
            .filter(|&m| fam >> m & 1 == 1)
            .map(|m| SetMask::from_bits_unchecked(m as u16));
        Family::new(self.n, members).expect("search masks lie in the ground set")
    }
}

/// Permutations of `[n]` fixing `ℬ` and the scaled weights, as mask tables.
fn stabilizer(n: usize, weights: &[i64], base: u128) -> Vec<Vec<u16>> {
    let size = 1usize << n;
    let mut out = Vec::new();
    for perm in all_permutations(n) {
        if (0..n).any(|i| weights[perm[i]] != weights[i]) {
            continue;
        }
        let table: Vec<u16> = (0..size)
            .map(|m| SetMask::from_bits_unchecked(m as u16).permute(&perm).bits())
            .collect();
        if image(&table, base) == base {
            out.push(table);
        }
    }
    out
}

fn image(table: &[u16], mut set: u128) -> u128 {
    let mut out = 0u128;
    while set != 0 {
        let b = set.trailing_zeros() as usize;
        out |= 1u128 << table[b];
        set &= set - 1;
    }
    out
}

fn scaled_weights(c: &WeightVector) -> Result<(Vec<i64>, BigInt)> {
    let (ints, scale) = clear_denominators(c.as_slice());
    let ints = ints
        .into_iter()
        .map(|v| {
            i64::try_from(v)
                .ok()
                .filter(|v| v.abs() < 1 << 40)
                .ok_or_else(|| Error::Unsupported("weights too large for the search".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ints, scale))
}

/// Minimum of `K_c` over admissible families for `ℬ`.
pub fn min_k_search(b: &Family, c: &WeightVector, opts: &SearchOptions) -> Result<SearchOutcome> {
    let n = b.ground();
    if n > MAX_SEARCH_GROUND {
        return Err(Error::Unsupported(format!(
            "search over 𝒫({n}); at most {MAX_SEARCH_GROUND} supported"
        )));
    }
    if c.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: c.len(),
        });
    }
    check_base(b)?;
    let (weights, scale) = scaled_weights(c)?;
    let total: i64 = weights.iter().sum();
    let size = 1usize << n;
    let contrib: Vec<i64> = (0..size)
        .map(|m| {
            let inside: i64 = (0..n).filter(|i| m >> i & 1 == 1).map(|i| weights[i]).sum();
            2 * inside - total
        })
        .collect();
    let mut order: Vec<u16> = (0..size as u16)
        .filter(|&m| contrib[m as usize] < 0)
        .collect();
    order.sort_by_key(|&m| (contrib[m as usize], m.count_ones(), m));
    let mut suffix = vec![0u128; order.len() + 1];
    for p in (0..order.len()).rev() {
        suffix[p] = suffix[p + 1] | 1u128 << order[p];
    }
    let mut has_bit = [0u128; MAX_SEARCH_GROUND];
    for (i, h) in has_bit.iter_mut().enumerate().take(n) {
        for m in 0..size {
            if m >> i & 1 == 1 {
                *h |= 1u128 << m;
            }
        }
    }
    let base = b.iter().fold(0u128, |acc, m| acc | 1u128 << m.bits());
    let ctx = Ctx {
        n,
        contrib,
        order,
        suffix,
        has_bit,
        base,
        branch: opts.order,
        budget: opts.budget,
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
    };

    let full = (size - 1) as u16;
    let powerset = if size == 128 {
        u128::MAX
    } else {
        (1u128 << size) - 1
    };
    // 𝒫(n) has K = 0 for every c.
    let incumbent = (0i64, powerset);
    let root = State {
        pos: 0,
        fam: 1u128 << full,
        k: ctx.contrib[full as usize],
    };

    let stab = if opts.symmetry {
        stabilizer(n, &weights, base)
    } else {
        Vec::new()
    };

    let run = || -> std::result::Result<Vec<Best>, (Abort, Vec<Best>)> {
        let mut frontier = vec![root];
        loop {
            let pos = frontier[0].pos;
            if frontier.len() >= FRONTIER_TARGET || pos == ctx.order.len() {
                break;
            }
            let end = ctx.group_end(pos);
            let mut next = Vec::new();
            for st in &frontier {
                if ctx.expand(*st, end, incumbent.0, &mut next).is_err() {
                    return Err((Abort, Vec::new()));
                }
            }
            if stab.len() > 1 {
                let mut seen = HashSet::new();
                next.retain(|st| {
                    let key = stab.iter().map(|t| image(t, st.fam)).min().unwrap();
                    seen.insert(key)
                });
            }
            if next.is_empty() {
                return Ok(Vec::new());
            }
            frontier = next;
        }
        let solve = |st: &State| {
            let mut best = (incumbent.0, None);
            let r = ctx.dfs(*st, &mut best);
            (r.is_ok(), best)
        };
        let results: Vec<(bool, Best)> = if opts.threads <= 1 {
            frontier.iter().map(solve).collect()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.threads)
                .build()
                .expect("thread pool");
            pool.install(|| frontier.par_iter().map(solve).collect())
        };
        let complete = results.iter().all(|r| r.0);
        let bests = results.into_iter().map(|r| r.1).collect();
        if complete {
            Ok(bests)
        } else {
            Err((Abort, bests))
        }
    };

    let to_q = |k: i64| Q::new(BigInt::from(k), scale.clone());
    let pick = |bests: &[Best]| {
        let mut out = (incumbent.0, incumbent.1);
        for (k, fam) in bests {
            if let Some(f) = fam {
                if *k < out.0 {
                    out = (*k, *f);
                }
            }
        }
        out
    };
    match run() {
        Ok(bests) => {
            let (k, fam) = pick(&bests);
            Ok(SearchOutcome::Complete {
                min_k: to_q(k),
                witness: ctx.to_family(fam),
                nodes: ctx.nodes.load(Ordering::Relaxed).min(opts.budget),
            })
        }
        Err((_, bests)) => {
            let (k, fam) = pick(&bests);
            Ok(SearchOutcome::Exhausted {
                nodes: opts.budget,
                best_k: to_q(k),
                best_family: ctx.to_family(fam),
            })
        }
    }
}
