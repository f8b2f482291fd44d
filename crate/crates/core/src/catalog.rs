//! Known FC and non-FC generator systems as data, a detector for FC
//! subconfigurations, and the five-triples scan.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_traits::Signed;
use rayon::prelude::*;

use crate::error::Result;
use crate::poonen::{
    default_probes, k_value, min_k_search, prove_not_fc, verify_fc, SearchOptions, SearchOutcome,
    Verdict, WeightVector,
};
use crate::rational::{fmt_q, Q};
use crate::setfam::{embed_into, Family, GeneratorSystem, SetMask};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Fc {
        c: Vec<i64>,
    },
    NotFc,
    /// Weights that pass every default probe yet fail on some admissible family.
    Counterexample {
        c: Vec<i64>,
    },
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub generators: GeneratorSystem,
    pub status: Status,
    pub note: &'static str,
}

impl CatalogEntry {
    pub fn ground(&self) -> usize {
        self.generators.ground()
    }

    pub fn family(&self) -> Family {
        self.generators.close()
    }
}

fn entry(
    id: &'static str,
    n: usize,
    gens: &[&[usize]],
    status: Status,
    note: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        id,
        generators: GeneratorSystem::from_lists(n, gens).expect("catalog data is valid"),
        status,
        note,
    }
}

fn fc(c: &[i64]) -> Status {
    Status::Fc { c: c.to_vec() }
}

/// The catalog, in priority order within each ground-set size.
pub fn entries() -> Vec<CatalogEntry> {
    use Status::NotFc;
    vec![
        entry("fc1", 1, &[&[1]], fc(&[1]), "a singleton"),
        entry("fc2", 2, &[&[1, 2]], fc(&[1, 1]), "a 2-set"),
        entry(
            "fc34",
            4,
            &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4]],
            fc(&[1, 1, 1, 1]),
            "three 3-sets in a 4-set",
        ),
        entry(
            "thm1a_1",
            5,
            &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 5]],
            fc(&[3, 3, 2, 2, 2]),
            "three 3-sets in a 5-set",
        ),
        entry(
            "thm1a_2",
            5,
            &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 5]],
            fc(&[6, 5, 5, 3, 3]),
            "three 3-sets in a 5-set",
        ),
        entry(
            "thm1a_3",
            5,
            &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]],
            fc(&[2, 2, 2, 2, 1]),
            "three 3-sets in a 5-set",
        ),
        entry(
            "thm1b",
            5,
            &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4, 5]],
            fc(&[24, 22, 19, 19, 4]),
            "two 3-sets and a 4-set",
        ),
        entry(
            "thm1c",
            5,
            &[&[1, 2, 3], &[1, 4, 5], &[2, 3, 4, 5]],
            fc(&[4, 3, 3, 3, 3]),
            "two 3-sets and a 4-set",
        ),
        entry(
            "thm1d",
            5,
            &[
                &[1, 2, 3],
                &[1, 4, 5],
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
                &[1, 3, 4, 5],
            ],
            fc(&[4, 3, 3, 3, 3]),
            "two 3-sets and four 4-sets",
        ),
        entry(
            "thm1e",
            5,
            &[&[1, 2, 3], &[1, 2, 4, 5], &[1, 3, 4, 5], &[2, 3, 4, 5]],
            fc(&[14, 14, 14, 9, 9]),
            "a 3-set and three 4-sets",
        ),
        entry(
            "thm1f",
            5,
            &[
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
                &[1, 3, 4, 5],
                &[2, 3, 4, 5],
            ],
            fc(&[1, 1, 1, 1, 1]),
            "all five 4-sets of a 5-set",
        ),
        entry(
            "nonfc1",
            5,
            &[
                &[1, 2, 3],
                &[1, 4, 5],
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
            ],
            NotFc,
            "not FC",
        ),
        entry(
            "nonfc2",
            5,
            &[
                &[1, 2, 3],
                &[1, 2, 4],
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
            ],
            NotFc,
            "not FC",
        ),
        entry(
            "nonfc3",
            5,
            &[
                &[1, 2, 3],
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
                &[1, 3, 4, 5],
            ],
            NotFc,
            "not FC",
        ),
        entry(
            "counterexample7",
            5,
            &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]],
            Status::Counterexample {
                c: vec![9, 7, 12, 12, 8],
            },
            "weights that pass all default probes but are not valid",
        ),
        entry(
            "fc36a",
            6,
            &[&[1, 2, 3], &[1, 2, 4], &[3, 5, 6], &[4, 5, 6]],
            fc(&[1, 1, 1, 1, 1, 1]),
            "four 3-sets in a 6-set with no three in a 5-set",
        ),
        entry(
            "fc36b",
            6,
            &[&[1, 2, 3], &[1, 4, 5], &[2, 4, 6], &[3, 5, 6]],
            fc(&[1, 1, 1, 1, 1, 1]),
            "four 3-sets in a 6-set with no three in a 5-set",
        ),
        entry(
            "lb36",
            6,
            &[&[1, 2, 3], &[1, 2, 4], &[3, 5, 6]],
            NotFc,
            "three 3-sets in a 6-set that are not FC",
        ),
        entry(
            "lb46",
            6,
            &[
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 3, 6],
                &[1, 2, 4, 5],
                &[1, 2, 4, 6],
                &[1, 2, 5, 6],
            ],
            NotFc,
            "six 4-sets in a 6-set that are not FC",
        ),
        entry(
            "claim1",
            6,
            &[
                &[1, 2, 3, 4],
                &[1, 2, 3, 5],
                &[1, 2, 4, 5],
                &[1, 3, 4, 5],
                &[1, 2, 3, 6],
                &[1, 2, 4, 6],
                &[1, 3, 5, 6],
                &[2, 4, 5, 6],
            ],
            fc(&[11, 9, 9, 9, 9, 9]),
            "representative of the eight-4-set class with a dominant element",
        ),
        entry(
            "claim2",
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
            fc(&[8, 8, 7, 7, 7, 7]),
            "eight 4-sets with two dominant elements",
        ),
    ]
}

pub fn find(id: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.id == id)
}

/// Eight 4-sets of `[6]`: at least seven contain 1, no other element lies in
/// more than six, and four lie inside `{1,…,5}`. The setting also assumes
/// every element lies in at least four of them, the closure has at least
/// five 5-sets, and no 5-set holds all five of its 4-sets; systems outside
/// that setting are handled by other entries.
pub fn claim1_constraints(s: &GeneratorSystem) -> bool {
    let gens = s.gens();
    if s.ground() != 6 || gens.len() != 8 || gens.iter().any(|g| g.len() != 4) {
        return false;
    }
    let deg = |i: usize| gens.iter().filter(|g| g.contains(i)).count();
    let inside = |w: SetMask| gens.iter().filter(|g| g.is_subset_of(w)).count();
    let five_sets: Vec<SetMask> = (1..=6)
        .map(|i| {
            SetMask::new(u32::from(SetMask::full(6).bits()) & !(1 << (i - 1)), 6).expect("in range")
        })
        .collect();
    deg(1) >= 7
        && (2..=6).all(|i| deg(i) <= 6)
        && inside(SetMask::full(5)) >= 4
        && (1..=6).all(|i| deg(i) >= 4)
        && five_sets.iter().all(|&w| inside(w) < 5)
        && s.close().iter().filter(|m| m.len() == 5).count() >= 5
}

/// Every eight-4-set system on `[6]` satisfying [`claim1_constraints`].
pub fn claim1_class() -> Vec<GeneratorSystem> {
    let fours: Vec<SetMask> = (1..=6)
        .combinations(4)
        .map(|c| SetMask::from_elements(&c, 6).expect("in range"))
        .collect();
    fours
        .into_iter()
        .combinations(8)
        .map(|gs| GeneratorSystem::new(6, gs).expect("distinct 4-sets"))
        .filter(claim1_constraints)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detection {
    pub id: &'static str,
    /// 0-based image of each pattern element.
    pub injection: Vec<usize>,
}

/// `k`-sets of the family lying inside some `w`-set; returns the first such
/// `w`-set (in combination order) holding at least `need` of them.
fn dense_window(fam: &Family, k: usize, w: usize, need: usize) -> Option<SetMask> {
    let n = fam.ground();
    if n < w {
        return None;
    }
    let level: Vec<SetMask> = fam.iter().filter(|m| m.len() == k).collect();
    if level.len() < need {
        return None;
    }
    (1..=n)
        .combinations(w)
        .map(|c| SetMask::from_elements(&c, n).expect("in range"))
        .find(|win| level.iter().filter(|m| m.is_subset_of(*win)).count() >= need)
}

/// Finds an FC catalog entry whose relabeled generators all lie in
/// `close(s)`. Entries are tried by ground-set size, then catalog order;
/// the rules `fc36` (four 3-sets in a 6-set) and `fc46` (eight 4-sets in a
/// 6-set) follow the 6-element entries.
pub fn detect_fc(s: &GeneratorSystem) -> Option<Detection> {
    let n = s.ground();
    let fam = s.close();
    let table = fam.table();
    let mut pats: Vec<CatalogEntry> = entries()
        .into_iter()
        .filter(|e| matches!(e.status, Status::Fc { .. }))
        .collect();
    pats.sort_by_key(|e| e.ground());
    let mut rules_done = false;
    for e in &pats {
        if e.ground() > 6 && !rules_done {
            if let Some(d) = window_rules(&fam) {
                return Some(d);
            }
            rules_done = true;
        }
        if e.ground() > n {
            break;
        }
        if let Some(injection) = embed_into(&e.generators, &table, n) {
            return Some(Detection {
                id: e.id,
                injection,
            });
        }
    }
    if rules_done {
        None
    } else {
        window_rules(&fam)
    }
}

fn window_rules(fam: &Family) -> Option<Detection> {
    let as_injection = |w: SetMask| w.elements().map(|e| e - 1).collect::<Vec<_>>();
    if let Some(w) = dense_window(fam, 3, 6, 4) {
        return Some(Detection {
            id: "fc36",
            injection: as_injection(w),
        });
    }
    dense_window(fam, 4, 6, 8).map(|w| Detection {
        id: "fc46",
        injection: as_injection(w),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    FcVerified {
        min_k: Q,
        nodes: u64,
    },
    NotFcCertified {
        rows: usize,
    },
    /// Default probes all nonnegative, yet an admissible family is negative.
    CounterexampleReproduced {
        probe_k: Vec<Q>,
        min_k: Q,
        nodes: u64,
    },
    Mismatch(String),
    Inconclusive {
        nodes: u64,
    },
}

#[derive(Clone, Debug)]
pub struct EntryResult {
    pub id: &'static str,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

impl EntryResult {
    pub fn ok(&self) -> bool {
        !matches!(
            self.outcome,
            Outcome::Mismatch(_) | Outcome::Inconclusive { .. }
        )
    }
}

impl fmt::Display for EntryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.id)?;
        match &self.outcome {
            Outcome::FcVerified { min_k, nodes } => {
                write!(f, "FCVerified minK={} nodes={}", fmt_q(min_k), nodes)
            }
            Outcome::NotFcCertified { rows } => write!(f, "NotFC certified rows={rows}"),
            Outcome::CounterexampleReproduced {
                probe_k,
                min_k,
                nodes,
            } => write!(
                f,
                "Counterexample probesK={} minK={} nodes={}",
                probe_k.iter().map(fmt_q).join(","),
                fmt_q(min_k),
                nodes
            ),
            Outcome::Mismatch(why) => write!(f, "MISMATCH {why}"),
            Outcome::Inconclusive { nodes } => write!(f, "Inconclusive nodes={nodes}"),
        }
    }
}

pub fn check_entry(e: &CatalogEntry, opts: &SearchOptions) -> Result<EntryResult> {
    let start = Instant::now();
    let b = e.family();
    let outcome = match &e.status {
        Status::Fc { c } => match verify_fc(&b, &WeightVector::from_ints(c)?, opts)? {
            Verdict::FcVerified { min_k, nodes, .. } => Outcome::FcVerified { min_k, nodes },
            Verdict::Inconclusive { nodes, .. } => Outcome::Inconclusive { nodes },
            v => Outcome::Mismatch(format!("expected FC, got {v}")),
        },
        Status::NotFc => match prove_not_fc(&b, &[])? {
            Some(w) if w.recheck(&b) => Outcome::NotFcCertified { rows: w.rows.len() },
            Some(_) => Outcome::Mismatch("certificate failed to re-verify".into()),
            None => Outcome::Mismatch("default probes are feasible".into()),
        },
        Status::Counterexample { c } => {
            let c = WeightVector::from_ints(c)?;
            let probe_k = default_probes(&b)
                .iter()
                .map(|p| k_value(p, &c))
                .collect::<Result<Vec<_>>>()?;
            match min_k_search(&b, &c, opts)? {
                SearchOutcome::Complete { min_k, nodes, .. } => {
                    if probe_k.iter().any(|k| k.is_negative()) {
                        Outcome::Mismatch("a default probe is negative".into())
                    } else if !min_k.is_negative() {
                        Outcome::Mismatch("no negative admissible family".into())
                    } else {
                        Outcome::CounterexampleReproduced {
                            probe_k,
                            min_k,
                            nodes,
                        }
                    }
                }
                SearchOutcome::Exhausted { nodes, .. } => Outcome::Inconclusive { nodes },
            }
        }
    };
    Ok(EntryResult {
        id: e.id,
        outcome,
        elapsed: start.elapsed(),
    })
}

/// Checks every entry (or only `id`) in catalog order.
pub fn verify_catalog(id: Option<&str>, opts: &SearchOptions) -> Result<Vec<EntryResult>> {
    entries()
        .iter()
        .filter(|e| id.is_none_or(|id| e.id == id))
        .map(|e| check_entry(e, opts))
        .collect()
}

/// Isomorphism key of a 3-uniform system on `[9]`: over all orderings of
/// the edges, the least sorted list of per-vertex incidence masks.
fn iso_key(edges: &[SetMask], perms: &[Vec<usize>]) -> Vec<u8> {
    let mut best: Option<Vec<u8>> = None;
    let mut cur = vec![0u8; 9];
    for p in perms {
        cur.iter_mut().for_each(|x| *x = 0);
        for (slot, &ei) in p.iter().enumerate() {
            for v in edges[ei].elements() {
                cur[v - 1] |= 1 << slot;
            }
        }
        cur.sort_unstable();
        if best.as_ref().is_none_or(|b| cur < *b) {
            best = Some(cur.clone());
        }
    }
    best.unwrap_or_default()
}

/// One representative per isomorphism class of `m` distinct 3-subsets of
/// `[9]`, built edge by edge, in discovery order.
pub fn triple_classes(m: usize) -> Vec<Vec<SetMask>> {
    let triples: Vec<SetMask> = (1..=9)
        .combinations(3)
        .map(|c| SetMask::from_elements(&c, 9).expect("in range"))
        .collect();
    let mut level: Vec<Vec<SetMask>> = vec![Vec::new()];
    for size in 1..=m {
        let perms = crate::setfam::all_permutations(size);
        let mut seen: HashMap<Vec<u8>, ()> = HashMap::new();
        let mut next = Vec::new();
        for rep in &level {
            for &t in &triples {
                if rep.contains(&t) {
                    continue;
                }
                let mut edges = rep.clone();
                edges.push(t);
                edges.sort_unstable();
                if seen.insert(iso_key(&edges, &perms), ()).is_none() {
                    next.push(edges);
                }
            }
        }
        level = next;
    }
    level
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub classes: usize,
    pub fc_detected: usize,
    /// Classes with some union of generators of exactly seven elements.
    pub seven_exact: usize,
    /// Classes with some union of at least seven elements.
    pub seven_or_more: usize,
    /// Classes with neither an FC detection nor an exact 7-union.
    pub violators: Vec<GeneratorSystem>,
    /// Violators under the "at least seven" reading.
    pub violators_ge7: usize,
}

impl ScanReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("classes={}", self.classes),
            format!("fc_detected={}", self.fc_detected),
            format!("seven_exact={}", self.seven_exact),
            format!("seven_or_more={}", self.seven_or_more),
            format!("violators={}", self.violators.len()),
            format!("violators_ge7={}", self.violators_ge7),
        ];
        for v in &self.violators {
            out.push("violator:".into());
            out.extend(v.to_string().lines().map(str::to_string));
        }
        out
    }
}

fn union_sizes(gens: &[SetMask]) -> u16 {
    // Bit s set iff some nonempty subfamily has a union of size s.
    let mut sizes = 0u16;
    for sub in 1u32..(1 << gens.len()) {
        let u = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| sub >> i & 1 == 1)
            .fold(SetMask::EMPTY, |acc, (_, &g)| acc.union(g));
        sizes |= 1 << u.len();
    }
    sizes
}

/// Five 3-sets of `[9]`: each class either contains an FC configuration or
/// has a union of exactly seven elements.
pub fn lemma_5_2_scan() -> ScanReport {
    let classes = triple_classes(5);
    let rows: Vec<(bool, bool, bool)> = classes
        .par_iter()
        .map(|edges| {
            let s = GeneratorSystem::new(9, edges.clone()).expect("distinct triples");
            let sizes = union_sizes(edges);
            let exact = sizes >> 7 & 1 == 1;
            let ge7 = sizes >> 7 != 0;
            (detect_fc(&s).is_some(), exact, ge7)
        })
        .collect();
    let mut report = ScanReport {
        classes: classes.len(),
        fc_detected: 0,
        seven_exact: 0,
        seven_or_more: 0,
        violators: Vec::new(),
        violators_ge7: 0,
    };
    for (edges, &(fc, exact, ge7)) in classes.iter().zip(&rows) {
        report.fc_detected += fc as usize;
        report.seven_exact += exact as usize;
        report.seven_or_more += ge7 as usize;
        if !fc && !exact {
            report
                .violators
                .push(GeneratorSystem::new(9, edges.clone()).expect("distinct triples"));
        }
        if !fc && !ge7 {
            report.violators_ge7 += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(n: usize, sets: &[&[usize]]) -> GeneratorSystem {
        GeneratorSystem::from_lists(n, sets).unwrap()
    }

    #[test]
    fn ids_are_unique() {
        let ids: Vec<_> = entries().iter().map(|e| e.id).collect();
        assert_eq!(ids.iter().unique().count(), ids.len());
    }

    #[test]
    fn eight_set_representative_is_in_class() {
        let rep = find("claim1").unwrap().generators;
        assert!(claim1_constraints(&rep));
        assert!(claim1_class().contains(&rep));
    }

    #[test]
    fn detector_examples() {
        let d = detect_fc(&gs(9, &[&[2, 4, 6], &[2, 4, 7], &[2, 6, 7]])).unwrap();
        assert_eq!(d.id, "fc34");
        assert_eq!(d.injection, vec![1, 3, 5, 6]);
        assert_eq!(detect_fc(&gs(3, &[&[1, 2, 3]])), None);
        assert_eq!(detect_fc(&gs(9, &[&[5]])).unwrap().id, "fc1");
    }

    #[test]
    fn detector_skips_non_fc_systems() {
        for id in ["nonfc1", "nonfc2", "nonfc3", "lb36"] {
            assert_eq!(detect_fc(&find(id).unwrap().generators), None, "{id}");
        }
    }

    #[test]
    fn small_class_counts() {
        // Two 3-sets on 9 points: meeting in 0, 1 or 2 points.
        assert_eq!(triple_classes(2).len(), 3);
        assert_eq!(triple_classes(1).len(), 1);
    }

    #[test]
    fn seven_set_example() {
        let s = [
            &[1, 2, 3][..],
            &[4, 5, 6],
            &[6, 7, 8],
            &[1, 4, 5],
            &[6, 7, 9],
        ];
        let masks: Vec<SetMask> = s
            .iter()
            .map(|e| SetMask::from_elements(e, 9).unwrap())
            .collect();
        assert!(union_sizes(&masks) >> 7 & 1 == 1);
    }
}
