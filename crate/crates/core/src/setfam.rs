//! Set families over a small ground set `[n]`, with every set stored as a bitmask.
//!
//! Element `i` (1-based, as printed) corresponds to bit `i - 1`. Families keep
//! their members sorted by `(cardinality, mask value)`, which is also the order
//! used by the text format.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: usize = 12;

pub(crate) fn check_ground(n: usize) -> Result<()> {
    if (1..=MAX_GROUND).contains(&n) {
        Ok(())
    } else {
        Err(Error::GroundSize(n))
    }
}

/// A subset of `[n]`. Ordered by cardinality first, then by numeric value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SetMask(u16);

impl SetMask {
    pub const EMPTY: SetMask = SetMask(0);

    pub fn new(bits: u32, n: usize) -> Result<Self> {
        check_ground(n)?;
        if bits >= (1u32 << n) {
            return Err(Error::MaskOutOfRange { bits, n });
        }
        Ok(SetMask(bits as u16))
    }

    pub(crate) const fn from_bits_unchecked(bits: u16) -> Self {
        SetMask(bits)
    }

    /// Builds a set from 1-based element labels.
    pub fn from_elements(elems: &[usize], n: usize) -> Result<Self> {
        check_ground(n)?;
        let mut bits = 0u16;
        for &e in elems {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { elem: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SetMask(bits))
    }

    /// The whole ground set `[n]`.
    pub fn full(n: usize) -> Self {
        SetMask(((1u32 << n) - 1) as u16)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Membership of the 1-based element `i`.
    pub fn contains(self, i: usize) -> bool {
        (1..=16).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn union(self, other: SetMask) -> SetMask {
        SetMask(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// 1-based elements in ascending order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..16).filter(move |b| bits & (1 << b) != 0).map(|b| b + 1)
    }

    /// Relabels through `perm`, where `perm[i]` is the 0-based image of the
    /// 0-based element `i`.
    pub fn permute(self, perm: &[usize]) -> SetMask {
        let mut out = 0u16;
        let mut bits = self.0;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            out |= 1 << perm[b];
            bits &= bits - 1;
        }
        SetMask(out)
    }
}

impl Ord for SetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl PartialOrd for SetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.elements().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Dense membership table over all `2^n` masks.
#[derive(Clone, Debug)]
pub(crate) struct MaskTable {
    words: Vec<u64>,
}

impl MaskTable {
    pub(crate) fn new(n: usize) -> Self {
        MaskTable {
            words: vec![0; (1usize << n).div_ceil(64)],
        }
    }

    pub(crate) fn get(&self, m: u16) -> bool {
        self.words[m as usize >> 6] >> (m & 63) & 1 == 1
    }

    /// Inserts `m`, returning whether it was newly added.
    pub(crate) fn insert(&mut self, m: u16) -> bool {
        let w = &mut self.words[m as usize >> 6];
        let bit = 1u64 << (m & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }
}

/// A finite family of distinct subsets of `[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    n: usize,
    members: Vec<SetMask>,
}

impl Family {
    /// Builds a family, sorting and deduplicating the members.
    pub fn new(n: usize, members: impl IntoIterator<Item = SetMask>) -> Result<Self> {
        check_ground(n)?;
        let limit = 1u32 << n;
        let mut members: Vec<SetMask> = members.into_iter().collect();
        if let Some(m) = members.iter().find(|m| m.0 as u32 >= limit) {
            return Err(Error::MaskOutOfRange {
                bits: m.0 as u32,
                n,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { n, members })
    }

    pub(crate) fn from_sorted_unchecked(n: usize, members: Vec<SetMask>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Family { n, members }
    }

    /// Family from lists of 1-based elements.
    pub fn from_lists(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let members = sets
            .iter()
            .map(|s| SetMask::from_elements(s, n))
            .collect::<Result<Vec<_>>>()?;
        Family::new(n, members)
    }

    /// All `2^n` subsets of `[n]`.
    pub fn powerset(n: usize) -> Result<Self> {
        check_ground(n)?;
        Family::new(n, (0..1u16 << n).map(SetMask))
    }

    /// All subsets of `[n] \ {i}`; never adds anything beyond those `2^(n-1)` sets.
    pub fn powerset_without(n: usize, i: usize) -> Result<Self> {
        check_ground(n)?;
        if i == 0 || i > n {
            return Err(Error::ElementOutOfRange { elem: i, n });
        }
        let bit = 1u16 << (i - 1);
        Family::new(n, (0..1u16 << n).filter(|m| m & bit == 0).map(SetMask))
    }

    pub fn ground(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SetMask] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = SetMask> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: SetMask) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.n == other.n && self.iter().all(|m| other.contains(m))
    }

    /// `|{A : i ∈ A}|` for the 1-based element `i`.
    pub fn freq(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::ElementOutOfRange { elem: i, n: self.n });
        }
        Ok(self.iter().filter(|m| m.contains(i)).count())
    }

    /// Element frequencies for `1..=n`, in order.
    pub fn frequencies(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for m in self.iter() {
            for e in m.elements() {
                out[e - 1] += 1;
            }
        }
        out
    }

    /// `n_0, …, n_n`: member counts by cardinality.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut out = vec![0; self.n + 1];
        for m in self.iter() {
            out[m.len()] += 1;
        }
        out
    }

    pub fn is_union_closed(&self) -> bool {
        let table = self.table();
        self.members
            .iter()
            .enumerate()
            .all(|(k, a)| self.members[k + 1..].iter().all(|b| table.get(a.0 | b.0)))
    }

    /// Whether `self ⊎ b ⊆ self`.
    pub fn absorbs(&self, b: &Family) -> bool {
        if self.n != b.n {
            return false;
        }
        let table = self.table();
        self.iter().all(|x| b.iter().all(|g| table.get(x.0 | g.0)))
    }

    /// `{A ∪ B : A ∈ self, B ∈ other}`.
    pub fn uplus(&self, other: &Family) -> Result<Family> {
        if self.n != other.n {
            return Err(Error::GroundMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut table = MaskTable::new(self.n);
        let mut out = Vec::new();
        for a in self.iter() {
            for b in other.iter() {
                let u = a.0 | b.0;
                if table.insert(u) {
                    out.push(SetMask(u));
                }
            }
        }
        Family::new(self.n, out)
    }

    pub fn union_with(&self, other: &Family) -> Result<Family> {
        if self.n != other.n {
            return Err(Error::GroundMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Family::new(self.n, self.iter().chain(other.iter()))
    }

    /// Image under the 0-based permutation `perm` of `[n]`.
    pub fn permute(&self, perm: &[usize]) -> Family {
        let members: Vec<SetMask> = self.iter().map(|m| m.permute(perm)).collect();
        Family::new(self.n, members).expect("permutation preserves the ground set")
    }

    pub(crate) fn table(&self) -> MaskTable {
        let mut t = MaskTable::new(self.n);
        for m in self.iter() {
            t.insert(m.0);
        }
        t
    }

    /// Lowercase hex SHA-256 of the text form, truncated to 16 digits.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The nonempty members that are not unions of smaller members.
    pub fn join_irreducibles(&self) -> Vec<SetMask> {
        self.iter()
            .filter(|&m| {
                if m.is_empty() {
                    return false;
                }
                let below = self
                    .iter()
                    .filter(|&s| s != m && s.is_subset_of(m))
                    .fold(0u16, |acc, s| acc | s.0);
                below != m.0
            })
            .collect()
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Family(n={}, ", self.n)?;
        f.debug_set().entries(self.members.iter()).finish()?;
        write!(f, ")")
    }
}

fn write_sets(f: &mut fmt::Formatter<'_>, n: usize, sets: &[SetMask]) -> fmt::Result {
    writeln!(f, "n={n}")?;
    for m in sets {
        writeln!(f, "{m}")?;
    }
    Ok(())
}

/// Parses the shared text format. Returns the ground size and the sets in file order.
fn parse_sets(text: &str) -> Result<(usize, Vec<SetMask>)> {
    let mut lines = text.lines().enumerate();
    let skip = |l: &str| l.is_empty() || l.starts_with('#');
    let n = loop {
        match lines.next() {
            Some((_, l)) if skip(l.trim()) => continue,
            Some((k, l)) => {
                let v = l.trim().strip_prefix("n=").ok_or_else(|| Error::Parse {
                    line: k + 1,
                    msg: "expected header `n=<int>`".into(),
                })?;
                let n: usize = v.trim().parse().map_err(|_| Error::Parse {
                    line: k + 1,
                    msg: format!("bad ground size `{v}`"),
                })?;
                check_ground(n).map_err(|e| Error::Parse {
                    line: k + 1,
                    msg: e.to_string(),
                })?;
                break n;
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "missing header `n=<int>`".into(),
                })
            }
        }
    };
    let mut sets = Vec::new();
    for (k, raw) in lines {
        let l = raw.trim();
        if skip(l) {
            continue;
        }
        if l == "-" {
            sets.push(SetMask::EMPTY);
            continue;
        }
        let mut elems = Vec::new();
        for tok in l.split(',') {
            let e: usize = tok.trim().parse().map_err(|_| Error::Parse {
                line: k + 1,
                msg: format!("bad element `{}`", tok.trim()),
            })?;
            elems.push(e);
        }
        let m = SetMask::from_elements(&elems, n).map_err(|e| Error::Parse {
            line: k + 1,
            msg: e.to_string(),
        })?;
        sets.push(m);
    }
    Ok((n, sets))
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, self.n, &self.members)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, sets) = parse_sets(s)?;
        Family::new(n, sets)
    }
}

/// A nonempty list of distinct nonempty generating sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSystem {
    n: usize,
    gens: Vec<SetMask>,
}

impl GeneratorSystem {
    pub fn new(n: usize, gens: impl IntoIterator<Item = SetMask>) -> Result<Self> {
        check_ground(n)?;
        let mut gens: Vec<SetMask> = gens.into_iter().collect();
        if gens.is_empty() {
            return Err(Error::Generators("no generators".into()));
        }
        if gens.iter().any(|g| g.is_empty()) {
            return Err(Error::Generators("empty generator".into()));
        }
        if let Some(g) = gens.iter().find(|g| g.0 as u32 >= 1 << n) {
            return Err(Error::MaskOutOfRange {
                bits: g.0 as u32,
                n,
            });
        }
        gens.sort_unstable();
        if gens.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Generators("duplicate generator".into()));
        }
        Ok(GeneratorSystem { n, gens })
    }

    /// Generators from lists of 1-based elements.
    pub fn from_lists(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let gens = sets
            .iter()
            .map(|s| SetMask::from_elements(s, n))
            .collect::<Result<Vec<_>>>()?;
        GeneratorSystem::new(n, gens)
    }

    pub fn ground(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[SetMask] {
        &self.gens
    }

    pub fn support(&self) -> SetMask {
        SetMask(self.gens.iter().fold(0, |acc, g| acc | g.0))
    }

    /// The family generated by the system: `∅` together with every union of
    /// a nonempty subfamily of generators.
    pub fn close(&self) -> Family {
        let mut table = MaskTable::new(self.n);
        table.insert(0);
        let mut members = vec![SetMask::EMPTY];
        let mut cursor = 0;
        while cursor < members.len() {
            let x = members[cursor];
            cursor += 1;
            for g in &self.gens {
                let u = x.0 | g.0;
                if table.insert(u) {
                    members.push(SetMask(u));
                }
            }
        }
        members.sort_unstable();
        Family::from_sorted_unchecked(self.n, members)
    }

    pub fn permute(&self, perm: &[usize]) -> GeneratorSystem {
        GeneratorSystem::new(self.n, self.gens.iter().map(|g| g.permute(perm)))
            .expect("permutation preserves validity")
    }

    /// Same generators over a larger ground set.
    pub fn widen(&self, n: usize) -> Result<GeneratorSystem> {
        if n < self.n {
            return Err(Error::GroundMismatch {
                left: self.n,
                right: n,
            });
        }
        GeneratorSystem::new(n, self.gens.iter().copied())
    }

    /// Lexicographically least relabeling over all permutations of `[n]`.
    ///
    /// Only the support is permuted: relabeling the support onto `{1..s}`
    /// never increases any mask and preserves their relative order, so the
    /// minimum is attained there.
    pub fn canonical(&self) -> Result<GeneratorSystem> {
        let support: Vec<usize> = self.support().elements().map(|e| e - 1).collect();
        let s = support.len();
        if s > 10 {
            return Err(Error::Unsupported(format!(
                "canonical form of a system with support {s} > 10"
            )));
        }
        let mut pos = [0usize; 16];
        for (k, &e) in support.iter().enumerate() {
            pos[e] = k;
        }
        // Generators rewritten over support positions.
        let local: Vec<Vec<usize>> = self
            .gens
            .iter()
            .map(|g| g.elements().map(|e| pos[e - 1]).collect())
            .collect();
        let mut perm: Vec<usize> = (0..s).collect();
        let relabel = |perm: &[usize], buf: &mut Vec<SetMask>| {
            buf.clear();
            for g in &local {
                let mut bits = 0u16;
                for &k in g {
                    bits |= 1 << perm[k];
                }
                buf.push(SetMask(bits));
            }
            buf.sort_unstable();
        };
        let mut best = Vec::with_capacity(local.len());
        relabel(&perm, &mut best);
        let mut cur = Vec::with_capacity(local.len());
        // Heap's algorithm.
        let mut c = vec![0usize; s];
        let mut i = 1;
        while i < s {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                relabel(&perm, &mut cur);
                if cur < best {
                    std::mem::swap(&mut cur, &mut best);
                }
                c[i] += 1;
                i = 1;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        Ok(GeneratorSystem {
            n: self.n,
            gens: best,
        })
    }

    /// Finds an injection `φ` of the pattern's ground set into this system's
    /// ground set such that every pattern generator maps onto a member of
    /// `close(self)`. `φ[i]` is the 0-based image of the 0-based element `i`.
    /// The lexicographically first such map is returned.
    pub fn embeds(&self, pattern: &GeneratorSystem) -> Option<Vec<usize>> {
        if pattern.n > self.n {
            return None;
        }
        let closed = self.close();
        embed_into(pattern, &closed.table(), self.n)
    }
}

/// Embedding search against a precomputed membership table over `[n]`.
pub(crate) fn embed_into(
    pattern: &GeneratorSystem,
    target: &MaskTable,
    n: usize,
) -> Option<Vec<usize>> {
    let k = pattern.n;
    if k > n {
        return None;
    }
    // Generators grouped by their highest element: checkable once it is assigned.
    let mut due: Vec<Vec<SetMask>> = vec![Vec::new(); k];
    for g in &pattern.gens {
        let top = 15 - g.0.leading_zeros() as usize;
        due[top].push(*g);
    }
    let mut phi = vec![usize::MAX; k];
    let mut used = 0u16;

    fn rec(
        e: usize,
        k: usize,
        n: usize,
        due: &[Vec<SetMask>],
        target: &MaskTable,
        phi: &mut Vec<usize>,
        used: &mut u16,
    ) -> bool {
        if e == k {
            return true;
        }
        for img in 0..n {
            if *used & (1 << img) != 0 {
                continue;
            }
            phi[e] = img;
            *used |= 1 << img;
            let ok = due[e].iter().all(|g| target.get(g.permute(phi).0));
            if ok && rec(e + 1, k, n, due, target, phi, used) {
                return true;
            }
            *used &= !(1 << img);
        }
        phi[e] = usize::MAX;
        false
    }

    if rec(0, k, n, &due, target, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}

impl fmt::Debug for GeneratorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gens(n={}, ", self.n)?;
        f.debug_set().entries(self.gens.iter()).finish()?;
        write!(f, ")")
    }
}

impl fmt::Display for GeneratorSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, self.n, &self.gens)
    }
}

impl FromStr for GeneratorSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, sets) = parse_sets(s)?;
        GeneratorSystem::new(n, sets)
    }
}

/// Formats a 0-based injection as `1↦5,2↦6,…`.
pub fn format_injection(phi: &[usize]) -> String {
    phi.iter()
        .enumerate()
        .map(|(i, j)| format!("{}↦{}", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(",")
}

/// Every permutation of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next_permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(f: &Family) -> Vec<Vec<usize>> {
        f.iter().map(|m| m.elements().collect()).collect()
    }

    #[test]
    fn close_single_generator() {
        let s = GeneratorSystem::from_lists(1, &[&[1]]).unwrap();
        assert_eq!(sets(&s.close()), vec![vec![], vec![1]]);
    }

    #[test]
    fn close_two_overlapping_pairs() {
        let s = GeneratorSystem::from_lists(3, &[&[1, 2], &[2, 3]]).unwrap();
        let f = s.close();
        assert_eq!(
            sets(&f),
            vec![vec![], vec![1, 2], vec![2, 3], vec![1, 2, 3]]
        );
        assert_eq!(f.size_profile(), vec![1, 0, 2, 1]);
    }

    #[test]
    fn close_matches_subset_union_oracle() {
        let s = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]]).unwrap();
        let g = s.gens();
        let mut oracle = vec![SetMask::EMPTY];
        for pick in 1u32..(1 << g.len()) {
            let u = (0..g.len())
                .filter(|k| pick >> k & 1 == 1)
                .fold(SetMask::EMPTY, |acc, k| acc.union(g[k]));
            oracle.push(u);
        }
        let oracle = Family::new(5, oracle).unwrap();
        assert_eq!(s.close(), oracle);
        assert_eq!(
            sets(&oracle),
            vec![
                vec![],
                vec![1, 2, 3],
                vec![1, 2, 4],
                vec![3, 4, 5],
                vec![1, 2, 3, 4],
                vec![1, 2, 3, 4, 5]
            ]
        );
    }

    #[test]
    fn uplus_examples() {
        let a = Family::from_lists(2, &[&[], &[1]]).unwrap();
        let b = Family::from_lists(2, &[&[2]]).unwrap();
        assert_eq!(sets(&a.uplus(&b).unwrap()), vec![vec![2], vec![1, 2]]);

        let p = Family::powerset_without(5, 1).unwrap();
        let e = Family::from_lists(5, &[&[]]).unwrap();
        assert_eq!(p.uplus(&e).unwrap(), p);

        let a = Family::from_lists(5, &[&[1, 2]]).unwrap();
        let b = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]])
            .unwrap()
            .close();
        let u = a.uplus(&b).unwrap();
        let twelve = SetMask::from_elements(&[1, 2], 5).unwrap();
        assert!(u.iter().all(|m| twelve.is_subset_of(m)));
        let mut direct: Vec<SetMask> = b.iter().map(|x| x.union(twelve)).collect();
        direct.sort();
        direct.dedup();
        assert_eq!(u.members(), &direct[..]);
    }

    #[test]
    fn uplus_ground_mismatch() {
        let a = Family::powerset(2).unwrap();
        let b = Family::powerset(3).unwrap();
        assert!(matches!(a.uplus(&b), Err(Error::GroundMismatch { .. })));
    }

    #[test]
    fn powerset_without_sizes() {
        assert_eq!(
            sets(&Family::powerset_without(2, 1).unwrap()),
            vec![vec![], vec![2]]
        );
        let f = Family::powerset_without(5, 3).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f.iter().all(|m| !m.contains(3)));
        assert_eq!(Family::powerset_without(6, 6).unwrap().len(), 32);
        assert!(Family::powerset_without(4, 5).is_err());
        assert!(Family::powerset_without(4, 0).is_err());
    }

    #[test]
    fn freq_of_powerset() {
        let p = Family::powerset(3).unwrap();
        assert_eq!(p.freq(1).unwrap(), 4);
        assert!(p.freq(4).is_err());
    }

    #[test]
    fn freq_of_six_set_probe_by_direct_count() {
        let gens = GeneratorSystem::from_lists(
            6,
            &[
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 3, 6],
                &[1, 2, 4, 5],
                &[1, 2, 4, 6],
                &[1, 2, 5, 6],
                &[1, 3, 4, 5],
                &[2, 3, 4, 6],
            ],
        )
        .unwrap();
        let a = Family::powerset_without(6, 1)
            .unwrap()
            .uplus(&gens.close())
            .unwrap();
        let counted = a.iter().filter(|m| m.bits() & 1 == 1).count();
        assert_eq!(a.freq(1).unwrap(), counted);
        // Sets avoiding 1 survive only through ∅ ∈ B, so exactly 32 of them.
        assert_eq!(a.len() - counted, 32);
    }

    #[test]
    fn canonical_relabels_to_smallest() {
        let s = GeneratorSystem::from_lists(5, &[&[2, 3, 5]]).unwrap();
        let c = s.canonical().unwrap();
        assert_eq!(c, GeneratorSystem::from_lists(5, &[&[1, 2, 3]]).unwrap());
    }

    #[test]
    fn canonical_is_invariant_over_all_permutations() {
        let s = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 4, 5], &[2, 3, 4, 5]]).unwrap();
        let c = s.canonical().unwrap();
        for p in all_permutations(5) {
            assert_eq!(s.permute(&p).canonical().unwrap(), c);
        }
    }

    #[test]
    fn embeds_relabeling() {
        let pattern =
            GeneratorSystem::from_lists(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4]]).unwrap();
        let target = GeneratorSystem::from_lists(9, &[&[5, 6, 7], &[5, 6, 8], &[5, 7, 8]]).unwrap();
        assert_eq!(target.embeds(&pattern), Some(vec![4, 5, 6, 7]));
        assert_eq!(format_injection(&[4, 5, 6, 7]), "1↦5,2↦6,3↦7,4↦8");
        assert_eq!(pattern.embeds(&pattern), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn text_round_trip() {
        let f = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[3, 4, 5]])
            .unwrap()
            .close();
        let text = f.to_string();
        assert_eq!(text, "n=5\n-\n1,2,3\n3,4,5\n1,2,3,4,5\n");
        let back: Family = text.parse().unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g: GeneratorSystem = "# three triples\n\nn=5\n1,2,3\n# middle\n\n1,2,4\n"
            .parse()
            .unwrap();
        assert_eq!(
            g,
            GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 2, 4]]).unwrap()
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = "n=3\n1,2\n1,x\n".parse::<Family>().unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                msg: "bad element `x`".into()
            }
        );
        let err = "n=3\n4\n".parse::<Family>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!("1,2\n".parse::<Family>().is_err());
        assert!("n=13\n".parse::<Family>().is_err());
        assert!("n=3\n-\n".parse::<GeneratorSystem>().is_err());
    }

    #[test]
    fn observation_absorbing_with_empty_contains_b() {
        let b = GeneratorSystem::from_lists(4, &[&[1, 2], &[3, 4]])
            .unwrap()
            .close();
        let a = Family::powerset_without(4, 1).unwrap().uplus(&b).unwrap();
        assert!(a.contains(SetMask::EMPTY));
        assert!(a.absorbs(&b));
        assert!(b.is_subfamily_of(&a));
    }

    #[test]
    fn join_irreducibles_recover_generators() {
        let s = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]]).unwrap();
        assert_eq!(s.close().join_irreducibles(), s.gens().to_vec());
    }
}
