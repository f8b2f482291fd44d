//! Verdicts, certificates, and the counterexample-guided weight search.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::search::{min_k_search, SearchOptions, SearchOutcome};
use super::{check_admissible, check_base, inequality_of, InequalityRow, WeightVector};
use crate::error::{Error, Result};
use crate::rational::{fmt_q, fmt_q_list, parse_q, parse_q_list, Q};
use crate::ratlp::{feasible, verify_farkas, FarkasCertificate, Feasibility, FeasibilityProblem};
use crate::setfam::Family;

/// `𝒫([n] \ {i}) ⊎ ℬ` for `i = 1..n`.
pub fn default_probes(b: &Family) -> Vec<Family> {
    (1..=b.ground())
        .map(|i| {
            Family::powerset_without(b.ground(), i)
                .and_then(|p| p.uplus(b))
                .expect("probe shares the ground set of B")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcWitness {
    pub n: usize,
    /// Coprime integer weights.
    pub c: Vec<BigInt>,
    pub min_k: Q,
    pub nodes: u64,
    /// Inequality rows that shaped the weights (probes plus counterexamples).
    pub rounds: usize,
}

impl FcWitness {
    pub fn weights(&self) -> WeightVector {
        WeightVector::new(self.c.iter().map(|v| Q::from_integer(v.clone())).collect())
            .expect("witness weights are valid")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotFcWitness {
    pub n: usize,
    pub probes: Vec<Family>,
    pub rows: Vec<InequalityRow>,
    pub certificate: FarkasCertificate,
}

impl NotFcWitness {
    pub fn problem(&self) -> FeasibilityProblem {
        FeasibilityProblem::new(self.n, self.rows.iter().map(|r| r.w.clone()).collect())
            .expect("rows share the ground set")
    }

    /// Re-derives every row from its probe, re-checks admissibility against
    /// `b`, and re-verifies the multipliers.
    pub fn recheck(&self, b: &Family) -> bool {
        self.probes.len() == self.rows.len()
            && self.probes.iter().zip(&self.rows).all(|(p, r)| {
                check_admissible(p, b).is_ok() && inequality_of(p).map(|x| x == *r).unwrap_or(false)
            })
            && verify_farkas(&self.problem(), &self.certificate).unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Fc(FcWitness),
    NotFc(NotFcWitness),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Fc(w) => {
                let c: Vec<String> = w.c.iter().map(|v| v.to_string()).collect();
                write!(
                    f,
                    "FC n={} c={} minK={} nodes={}",
                    w.n,
                    c.join(","),
                    fmt_q(&w.min_k),
                    w.nodes
                )
            }
            Certificate::NotFc(w) => {
                let refs: Vec<String> = w.probes.iter().map(|p| p.content_hash()).collect();
                write!(
                    f,
                    "NOTFC n={} probes={} lambda={}",
                    w.n,
                    refs.join(","),
                    fmt_q_list(&w.certificate.lambda)
                )
            }
        }
    }
}

/// A certificate line with its probes referenced by content hash.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateLine {
    Fc {
        n: usize,
        c: Vec<BigInt>,
        min_k: Q,
        nodes: u64,
    },
    NotFc {
        n: usize,
        probe_hashes: Vec<String>,
        lambda: Vec<Q>,
    },
}

impl FromStr for CertificateLine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: msg.to_string(),
        };
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| bad("empty certificate"))?;
        let mut fields = std::collections::BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| bad(&format!("missing `{k}`")))
        };
        let n: usize = get("n")?.parse().map_err(|_| bad("bad n"))?;
        match kind {
            "FC" => Ok(CertificateLine::Fc {
                n,
                c: get("c")?
                    .split(',')
                    .map(|x| x.parse::<BigInt>().map_err(|_| bad("bad weight")))
                    .collect::<Result<_>>()?,
                min_k: parse_q(get("minK")?)?,
                nodes: get("nodes")?.parse().map_err(|_| bad("bad nodes"))?,
            }),
            "NOTFC" => Ok(CertificateLine::NotFc {
                n,
                probe_hashes: get("probes")?.split(',').map(str::to_string).collect(),
                lambda: parse_q_list(get("lambda")?)?,
            }),
            _ => Err(bad("expected FC or NOTFC")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    FcVerified {
        c: WeightVector,
        min_k: Q,
        nodes: u64,
    },
    NotFc(NotFcWitness),
    CounterexampleFound {
        c: WeightVector,
        family: Family,
        k: Q,
        nodes: u64,
    },
    Inconclusive {
        nodes: u64,
        best_k: Option<Q>,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::FcVerified { min_k, nodes, .. } => {
                write!(f, "FCVerified minK={} nodes={}", fmt_q(min_k), nodes)
            }
            Verdict::NotFc(w) => write!(f, "NotFC {}", Certificate::NotFc(w.clone())),
            Verdict::CounterexampleFound {
                k, nodes, family, ..
            } => write!(
                f,
                "CounterexampleFound K={} nodes={} family={}",
                fmt_q(k),
                nodes,
                family.content_hash()
            ),
            Verdict::Inconclusive { nodes, best_k } => match best_k {
                Some(k) => write!(f, "Inconclusive nodes={} bestK={}", nodes, fmt_q(k)),
                None => write!(f, "Inconclusive nodes={nodes}"),
            },
        }
    }
}

/// Decides whether `c` satisfies the weighted condition for every admissible family.
pub fn verify_fc(b: &Family, c: &WeightVector, opts: &SearchOptions) -> Result<Verdict> {
    Ok(match min_k_search(b, c, opts)? {
        SearchOutcome::Complete {
            min_k,
            witness,
            nodes,
        } => {
            if min_k.is_negative() {
                Verdict::CounterexampleFound {
                    c: c.clone(),
                    family: witness,
                    k: min_k,
                    nodes,
                }
            } else {
                Verdict::FcVerified {
                    c: c.clone(),
                    min_k,
                    nodes,
                }
            }
        }
        SearchOutcome::Exhausted {
            nodes,
            best_k,
            best_family,
        } => {
            if best_k.is_negative() {
                // A negative family is a definitive answer even without the exact minimum.
                Verdict::CounterexampleFound {
                    c: c.clone(),
                    family: best_family,
                    k: best_k,
                    nodes,
                }
            } else {
                Verdict::Inconclusive {
                    nodes,
                    best_k: Some(best_k),
                }
            }
        }
    })
}

fn certify(b: &Family, probes: Vec<Family>) -> Result<Option<NotFcWitness>> {
    let rows = probes
        .iter()
        .map(inequality_of)
        .collect::<Result<Vec<_>>>()?;
    let problem = FeasibilityProblem::new(b.ground(), rows.iter().map(|r| r.w.clone()).collect())?;
    match feasible(&problem) {
        Feasibility::Point { .. } => Ok(None),
        Feasibility::Infeasible(certificate) => Ok(Some(NotFcWitness {
            n: b.ground(),
            probes,
            rows,
            certificate,
        })),
    }
}

fn checked_probes(b: &Family, probes: &[Family]) -> Result<Vec<Family>> {
    for (index, p) in probes.iter().enumerate() {
        check_admissible(p, b).map_err(|reason| Error::InadmissibleProbe { index, reason })?;
    }
    Ok(probes.to_vec())
}

/// Farkas certificate that no weights satisfy the probe inequalities.
/// `None` does not imply that `ℬ` is FC. An empty probe list means the
/// default probes.
pub fn prove_not_fc(b: &Family, probes: &[Family]) -> Result<Option<NotFcWitness>> {
    check_base(b)?;
    let probes = if probes.is_empty() {
        default_probes(b)
    } else {
        checked_probes(b, probes)?
    };
    certify(b, probes)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discovery {
    Certified(Certificate),
    Inconclusive { rounds: usize, nodes: u64 },
}

/// Counterexample-guided search for weights: solve the LP over the current
/// rows, verify the resulting point, and add the row of any negative family.
/// User probes are added to the default probes.
pub fn find_c(b: &Family, probes: &[Family], opts: &SearchOptions) -> Result<Discovery> {
    check_base(b)?;
    let mut families = default_probes(b);
    families.extend(checked_probes(b, probes)?);
    let mut nodes_total = 0u64;
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        let rows = families
            .iter()
            .map(inequality_of)
            .collect::<Result<Vec<_>>>()?;
        let problem =
            FeasibilityProblem::new(b.ground(), rows.iter().map(|r| r.w.clone()).collect())?;
        let point = match feasible(&problem) {
            Feasibility::Infeasible(certificate) => {
                return Ok(Discovery::Certified(Certificate::NotFc(NotFcWitness {
                    n: b.ground(),
                    probes: families,
                    rows,
                    certificate,
                })))
            }
            Feasibility::Point { c, .. } => c,
        };
        let c = WeightVector::new(point)?;
        let remaining = opts.budget.saturating_sub(nodes_total);
        if remaining == 0 {
            return Ok(Discovery::Inconclusive {
                rounds,
                nodes: nodes_total,
            });
        }
        let sub = SearchOptions {
            budget: remaining,
            ..opts.clone()
        };
        match verify_fc(b, &c, &sub)? {
            Verdict::FcVerified { min_k, nodes, .. } => {
                nodes_total += nodes;
                return Ok(Discovery::Certified(Certificate::Fc(FcWitness {
                    n: b.ground(),
                    c: c.to_integers(),
                    min_k,
                    nodes: nodes_total,
                    rounds,
                })));
            }
            Verdict::CounterexampleFound { family, nodes, .. } => {
                nodes_total += nodes;
                debug_assert!(!families.contains(&family));
                families.push(family);
            }
            Verdict::Inconclusive { nodes, .. } => {
                return Ok(Discovery::Inconclusive {
                    rounds,
                    nodes: nodes_total + nodes,
                })
            }
            Verdict::NotFc(_) => unreachable!("verify_fc never certifies non-FC"),
        }
    }
}

impl Verdict {
    pub fn is_fc_verified(&self) -> bool {
        matches!(self, Verdict::FcVerified { .. })
    }
}

impl CertificateLine {
    pub fn min_k_is_nonneg(&self) -> bool {
        match self {
            CertificateLine::Fc { min_k, .. } => !min_k.is_negative(),
            CertificateLine::NotFc { .. } => false,
        }
    }

    pub fn lambda_nonzero(&self) -> bool {
        match self {
            CertificateLine::NotFc { lambda, .. } => lambda.iter().any(|l| !l.is_zero()),
            CertificateLine::Fc { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::setfam::GeneratorSystem;

    fn opts() -> SearchOptions {
        SearchOptions {
            threads: 1,
            ..SearchOptions::default()
        }
    }

    fn gens(n: usize, sets: &[&[usize]]) -> Family {
        GeneratorSystem::from_lists(n, sets).unwrap().close()
    }

    #[test]
    fn pair_is_fc_with_equal_weights() {
        let b = gens(2, &[&[1, 2]]);
        match find_c(&b, &[], &opts()).unwrap() {
            Discovery::Certified(Certificate::Fc(w)) => {
                assert_eq!(w.c, vec![BigInt::from(1), BigInt::from(1)]);
                assert_eq!(w.min_k, q(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_bound_triple_system_is_not_fc() {
        let b = gens(6, &[&[1, 2, 3], &[1, 2, 4], &[3, 5, 6]]);
        match find_c(&b, &[], &opts()).unwrap() {
            Discovery::Certified(Certificate::NotFc(w)) => assert!(w.recheck(&b)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inadmissible_probe_is_named() {
        let b = gens(3, &[&[1, 2, 3]]);
        let bad = Family::from_lists(3, &[&[1]]).unwrap();
        let good = Family::powerset(3).unwrap();
        assert!(matches!(
            prove_not_fc(&b, &[good, bad]),
            Err(Error::InadmissibleProbe { index: 1, .. })
        ));
    }

    #[test]
    fn single_triple_is_not_fc() {
        let b = gens(3, &[&[1, 2, 3]]);
        let w = prove_not_fc(&b, &[]).unwrap().expect("certificate");
        assert!(w.recheck(&b));
    }

    #[test]
    fn certificate_lines_round_trip() {
        let b = gens(3, &[&[1, 2, 3]]);
        let w = prove_not_fc(&b, &[]).unwrap().unwrap();
        let text = Certificate::NotFc(w.clone()).to_string();
        let parsed: CertificateLine = text.parse().unwrap();
        match parsed {
            CertificateLine::NotFc {
                n,
                probe_hashes,
                lambda,
            } => {
                assert_eq!(n, 3);
                assert_eq!(lambda, w.certificate.lambda);
                assert_eq!(probe_hashes.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        let fc = "FC n=5 c=3,3,2,2,2 minK=0 nodes=17"
            .parse::<CertificateLine>()
            .unwrap();
        assert!(fc.min_k_is_nonneg());
        assert!("XX n=1".parse::<CertificateLine>().is_err());
    }
}
