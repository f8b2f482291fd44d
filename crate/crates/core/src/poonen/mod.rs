//! Weighted surplus `K(𝒜)`, inequality rows, and the machinery that decides
//! whether a union-closed family `ℬ` admits a weight vector `c` with
//! `K_c(𝒜) ≥ 0` for every union-closed `𝒜` absorbing `ℬ`.

mod cegis;
mod search;

pub use cegis::{
    default_probes, find_c, prove_not_fc, verify_fc, Certificate, CertificateLine, Discovery,
    FcWitness, NotFcWitness, Verdict,
};
pub use search::{min_k_search, BranchOrder, SearchOptions, SearchOutcome, MAX_SEARCH_GROUND};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q_list, parse_q_list, q, Q};
use crate::setfam::Family;

/// Nonnegative weights `c_1..c_n`, not all zero. Only the direction matters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    c: Vec<Q>,
}

impl WeightVector {
    pub fn new(c: Vec<Q>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Weights("empty weight vector".into()));
        }
        if c.iter().any(|x| x.is_negative()) {
            return Err(Error::Weights("negative weight".into()));
        }
        if c.iter().all(|x| x.is_zero()) {
            return Err(Error::Weights("all weights are zero".into()));
        }
        Ok(WeightVector { c })
    }

    pub fn from_ints(c: &[i64]) -> Result<Self> {
        WeightVector::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn ones(n: usize) -> Self {
        WeightVector {
            c: vec![q(1); n.max(1)],
        }
    }

    /// Parses `a,b,…` where each entry is an integer or `p/q`.
    pub fn parse(s: &str) -> Result<Self> {
        WeightVector::new(parse_q_list(s)?)
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn as_slice(&self) -> &[Q] {
        &self.c
    }

    /// Weights moved along the 0-based permutation: `π(c)[π(i)] = c[i]`.
    pub fn permute(&self, perm: &[usize]) -> WeightVector {
        let mut out = vec![Q::zero(); self.c.len()];
        for (i, x) in self.c.iter().enumerate() {
            out[perm[i]] = x.clone();
        }
        WeightVector { c: out }
    }

    /// Scaled to the simplex.
    pub fn normalized(&self) -> Vec<Q> {
        let total: Q = self.c.iter().sum();
        self.c.iter().map(|x| x / &total).collect()
    }

    /// Coprime integer representative.
    pub fn to_integers(&self) -> Vec<BigInt> {
        crate::rational::to_coprime_integers(&self.c)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.c.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: self.c.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_q_list(&self.c))
    }
}

/// `K_c(𝒜) = Σ_i c_i (2|𝒜_i| − |𝒜|)`.
pub fn k_value(a: &Family, c: &WeightVector) -> Result<Q> {
    c.check_dim(a.ground())?;
    let m = a.len() as i64;
    Ok(a.frequencies()
        .iter()
        .zip(c.as_slice())
        .map(|(&f, ci)| ci * q(2 * f as i64 - m))
        .sum())
}

/// `N_0, …, N_n`: the contribution of the sets of each cardinality to `K`.
pub fn k_by_size(a: &Family, c: &WeightVector) -> Result<Vec<Q>> {
    c.check_dim(a.ground())?;
    let total: Q = c.as_slice().iter().sum();
    let mut out = vec![Q::zero(); a.ground() + 1];
    for m in a.iter() {
        let inside: Q = m.elements().map(|e| c.as_slice()[e - 1].clone()).sum();
        out[m.len()] += inside * q(2) - &total;
    }
    Ok(out)
}

/// The linear constraint `w · c ≥ 0` that a family imposes on the weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityRow {
    pub w: Vec<i64>,
    /// Content hash of the family the row came from.
    pub source: String,
}

impl InequalityRow {
    pub fn eval(&self, c: &WeightVector) -> Q {
        self.w
            .iter()
            .zip(c.as_slice())
            .map(|(&w, x)| q(w) * x)
            .sum()
    }
}

/// Row `w_i = 2·freq_i(𝒜) − |𝒜|`.
pub fn inequality_of(a: &Family) -> Result<InequalityRow> {
    if a.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let m = a.len() as i64;
    Ok(InequalityRow {
        w: a.frequencies().iter().map(|&f| 2 * f as i64 - m).collect(),
        source: a.content_hash(),
    })
}

/// Nonempty, union-closed and absorbing `b`.
pub fn check_admissible(a: &Family, b: &Family) -> std::result::Result<(), String> {
    if a.ground() != b.ground() {
        return Err(format!(
            "ground set {} differs from {}",
            a.ground(),
            b.ground()
        ));
    }
    if a.is_empty() {
        return Err("empty family".into());
    }
    if !a.is_union_closed() {
        return Err("not union-closed".into());
    }
    if !a.absorbs(b) {
        return Err("does not absorb B".into());
    }
    Ok(())
}

/// Preconditions on `ℬ`: union-closed, contains `∅` and `[n]`.
pub(crate) fn check_base(b: &Family) -> Result<()> {
    use crate::setfam::SetMask;
    if !b.contains(SetMask::EMPTY) {
        return Err(Error::Precondition("B must contain ∅".into()));
    }
    if !b.contains(SetMask::full(b.ground())) {
        return Err(Error::Precondition(
            "largest set of B must be the whole ground set".into(),
        ));
    }
    if !b.is_union_closed() {
        return Err(Error::Precondition("B must be union-closed".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfam::GeneratorSystem;

    #[test]
    fn k_of_powerset_is_zero() {
        let p = Family::powerset(3).unwrap();
        assert_eq!(k_value(&p, &WeightVector::ones(3)).unwrap(), q(0));
    }

    #[test]
    fn k_of_singleton_family() {
        let a = Family::from_lists(1, &[&[1]]).unwrap();
        assert_eq!(k_value(&a, &WeightVector::ones(1)).unwrap(), q(1));
    }

    #[test]
    fn k_decomposes_by_size() {
        let b = GeneratorSystem::from_lists(5, &[&[1, 2, 3], &[1, 2, 4], &[3, 4, 5]])
            .unwrap()
            .close();
        let c = WeightVector::from_ints(&[2, 2, 2, 2, 1]).unwrap();
        let a = Family::powerset_without(5, 5).unwrap().uplus(&b).unwrap();
        let k = k_value(&a, &c).unwrap();
        let parts: Q = k_by_size(&a, &c).unwrap().into_iter().sum();
        assert_eq!(k, parts);
        // Direct summation over members.
        let direct: Q = a
            .iter()
            .map(|m| {
                (1..=5)
                    .map(|i| {
                        let ci = c.as_slice()[i - 1].clone();
                        if m.contains(i) {
                            ci
                        } else {
                            -ci
                        }
                    })
                    .sum::<Q>()
            })
            .sum();
        assert_eq!(k, direct);
        assert!(k >= q(0));
    }

    #[test]
    fn rows_of_small_families() {
        let p = Family::powerset(2).unwrap();
        assert_eq!(inequality_of(&p).unwrap().w, vec![0, 0]);
        let a = Family::from_lists(5, &[&[1, 2, 3]]).unwrap();
        assert_eq!(inequality_of(&a).unwrap().w, vec![1, 1, 1, -1, -1]);
        assert_eq!(
            inequality_of(&Family::new(3, []).unwrap()),
            Err(Error::EmptyFamily)
        );
    }

    #[test]
    fn dimension_mismatch() {
        let p = Family::powerset(2).unwrap();
        assert!(k_value(&p, &WeightVector::ones(3)).is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(WeightVector::from_ints(&[0, 0]).is_err());
        assert!(WeightVector::from_ints(&[1, -1]).is_err());
        assert_eq!(
            WeightVector::parse("1/2,1/3").unwrap().to_integers(),
            vec![BigInt::from(3), BigInt::from(2)]
        );
    }
}
