//! Exact linear feasibility over the probability simplex.
//!
//! A [`FeasibilityProblem`] asks for `c ≥ 0`, `Σ c = 1` with `w_j · c ≥ 0`
//! for every row. The solver maximizes the minimum slack `min_j w_j · c`
//! with a dense rational simplex (Bland's rule, two phases). A negative
//! optimum means the system is infeasible, and the dual problem, solved
//! explicitly, yields multipliers `λ` whose combination `Σ λ_j w_j` is
//! strictly negative in every coordinate.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q_list, q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityProblem {
    n: usize,
    rows: Vec<Vec<i64>>,
}

impl FeasibilityProblem {
    pub fn new(n: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Range("feasibility problem needs n ≥ 1".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: r.len(),
            });
        }
        Ok(FeasibilityProblem { n, rows })
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// `w_j · c` for every row.
    pub fn slacks(&self, c: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(c).map(|(w, x)| q(*w) * x).sum())
            .collect()
    }
}

/// Nonnegative multipliers, one per row, with `Σ λ_j w_j < 0` componentwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub lambda: Vec<Q>,
}

impl fmt::Display for FarkasCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_q_list(&self.lambda))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A simplex point maximizing the minimum slack.
    Point {
        c: Vec<Q>,
        min_slack: Q,
    },
    Infeasible(FarkasCertificate),
}

/// Decides the problem, returning either a max-min-slack point (the
/// lexicographically greatest among optimal points) or a Farkas certificate.
pub fn feasible(p: &FeasibilityProblem) -> Feasibility {
    let n = p.n;
    if p.rows.is_empty() {
        return Feasibility::Point {
            c: vec![Q::new(1.into(), (n as i64).into()); n],
            min_slack: Q::zero(),
        };
    }
    // Columns: c_0..c_{n-1}, t+, t-.
    let tp = n;
    let tm = n + 1;
    let mut lp = Lp::new(n + 2);
    for r in &p.rows {
        let mut coef: Vec<Q> = r.iter().map(|&w| q(w)).collect();
        coef.push(-Q::one());
        coef.push(Q::one());
        lp.push(coef, Sense::Ge, Q::zero());
    }
    let mut simplex = vec![Q::one(); n];
    simplex.extend([Q::zero(), Q::zero()]);
    lp.push(simplex, Sense::Eq, Q::one());

    let mut obj = vec![Q::zero(); n + 2];
    obj[tp] = Q::one();
    obj[tm] = -Q::one();
    let (_, t_star) = match lp.maximize(&obj) {
        LpOutcome::Optimal { x, value } => (x, value),
        other => unreachable!("slack LP is feasible and bounded: {other:?}"),
    };

    if !t_star.is_negative() {
        // Fix the slack, then push each coordinate up in turn.
        let mut fix = vec![Q::zero(); n + 2];
        fix[tp] = Q::one();
        fix[tm] = -Q::one();
        lp.push(fix, Sense::Ge, t_star.clone());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let mut obj = vec![Q::zero(); n + 2];
            obj[i] = Q::one();
            let v = match lp.maximize(&obj) {
                LpOutcome::Optimal { value, .. } => value,
                other => unreachable!("refinement LP stays feasible: {other:?}"),
            };
            let mut pin = vec![Q::zero(); n + 2];
            pin[i] = Q::one();
            lp.push(pin, Sense::Eq, v.clone());
            c.push(v);
        }
        debug_assert!(p.slacks(&c).iter().all(|s| s >= &t_star));
        return Feasibility::Point {
            c,
            min_slack: t_star,
        };
    }

    // Dual: minimize s subject to Σ_j λ_j w_{j,i} ≤ s, λ in the row simplex.
    let m = p.rows.len();
    let sp = m;
    let sm = m + 1;
    let mut dual = Lp::new(m + 2);
    for i in 0..n {
        let mut coef: Vec<Q> = p.rows.iter().map(|r| q(r[i])).collect();
        coef.push(-Q::one());
        coef.push(Q::one());
        dual.push(coef, Sense::Le, Q::zero());
    }
    let mut simplex = vec![Q::one(); m];
    simplex.extend([Q::zero(), Q::zero()]);
    dual.push(simplex, Sense::Eq, Q::one());
    let mut obj = vec![Q::zero(); m + 2];
    obj[sp] = -Q::one();
    obj[sm] = Q::one();
    let (x, neg_s) = match dual.maximize(&obj) {
        LpOutcome::Optimal { x, value } => (x, value),
        other => unreachable!("dual LP is feasible and bounded: {other:?}"),
    };
    debug_assert_eq!(-neg_s, t_star, "strong duality");
    let cert = FarkasCertificate {
        lambda: x[..m].to_vec(),
    };
    debug_assert!(verify_farkas(p, &cert).unwrap_or(false));
    Feasibility::Infeasible(cert)
}

/// True iff `λ ≥ 0`, `Σ λ > 0` and every coordinate of `Σ λ_j w_j` is negative.
pub fn verify_farkas(p: &FeasibilityProblem, cert: &FarkasCertificate) -> Result<bool> {
    if cert.lambda.len() != p.rows.len() {
        return Err(Error::Dimension {
            expected: p.rows.len(),
            found: cert.lambda.len(),
        });
    }
    if cert.lambda.iter().any(|l| l.is_negative()) {
        return Ok(false);
    }
    if cert.lambda.iter().all(|l| l.is_zero()) {
        return Ok(false);
    }
    Ok((0..p.n).all(|i| {
        let s: Q = p
            .rows
            .iter()
            .zip(&cert.lambda)
            .map(|(r, l)| q(r[i]) * l)
            .sum();
        s.is_negative()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

/// `max obj · x` subject to the pushed rows and `x ≥ 0`.
#[derive(Clone, Debug)]
pub(crate) struct Lp {
    vars: usize,
    rows: Vec<(Vec<Q>, Sense, Q)>,
}

impl Lp {
    pub(crate) fn new(vars: usize) -> Self {
        Lp {
            vars,
            rows: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, coef: Vec<Q>, sense: Sense, rhs: Q) {
        assert_eq!(coef.len(), self.vars);
        self.rows.push((coef, sense, rhs));
    }

    pub(crate) fn maximize(&self, obj: &[Q]) -> LpOutcome {
        let m = self.rows.len();
        let nv = self.vars;
        // Normalize to nonnegative right-hand sides.
        let rows: Vec<(Vec<Q>, Sense, Q)> = self
            .rows
            .iter()
            .map(|(a, s, b)| {
                if b.is_negative() {
                    let flipped = match s {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    (a.iter().map(|x| -x).collect(), flipped, -b)
                } else {
                    (a.clone(), *s, b.clone())
                }
            })
            .collect();
        let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
        let art0 = nv + n_slack;
        let total = art0 + n_art;
        let mut t = Tableau {
            a: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
            cols: total,
        };
        let (mut si, mut ai) = (nv, art0);
        for (coef, sense, rhs) in &rows {
            let mut row = vec![Q::zero(); total + 1];
            row[..nv].clone_from_slice(coef);
            row[total] = rhs.clone();
            match sense {
                Sense::Le => {
                    row[si] = Q::one();
                    t.basis.push(si);
                    si += 1;
                }
                Sense::Ge => {
                    row[si] = -Q::one();
                    si += 1;
                    row[ai] = Q::one();
                    t.basis.push(ai);
                    ai += 1;
                }
                Sense::Eq => {
                    row[ai] = Q::one();
                    t.basis.push(ai);
                    ai += 1;
                }
            }
            t.a.push(row);
        }

        if n_art > 0 {
            let mut phase1 = vec![Q::zero(); total];
            for c in phase1.iter_mut().skip(art0) {
                *c = -Q::one();
            }
            let allowed = vec![true; total];
            if t.optimize(&phase1, &allowed).is_err() {
                unreachable!("phase one is bounded");
            }
            if t.a
                .iter()
                .zip(&t.basis)
                .any(|(r, &b)| b >= art0 && !r[total].is_zero())
            {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis where possible.
            for r in 0..t.a.len() {
                if t.basis[r] >= art0 {
                    if let Some(c) = (0..art0).find(|&c| !t.a[r][c].is_zero()) {
                        t.pivot(r, c);
                    }
                }
            }
            // Rows still held by an artificial are redundant.
            let keep: Vec<bool> = t.basis.iter().map(|&b| b < art0).collect();
            let mut k = 0;
            t.a.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            t.basis.retain(|&b| b < art0);
        }

        let mut phase2 = vec![Q::zero(); total];
        phase2[..nv].clone_from_slice(obj);
        let allowed: Vec<bool> = (0..total).map(|c| c < art0).collect();
        if t.optimize(&phase2, &allowed).is_err() {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); nv];
        for (r, &b) in t.basis.iter().enumerate() {
            if b < nv {
                x[b] = t.a[r][total].clone();
            }
        }
        let value = x.iter().zip(obj).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

struct Tableau {
    a: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

struct Unbounded;

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c].clone();
        for v in self.a[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, lowest-index leaving basic variable.
    fn optimize(&mut self, obj: &[Q], allowed: &[bool]) -> std::result::Result<(), Unbounded> {
        let rhs = self.cols;
        loop {
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut d = obj[j].clone();
                for (row, &b) in self.a.iter().zip(&self.basis) {
                    if !row[j].is_zero() && !obj[b].is_zero() {
                        d -= &obj[b] * &row[j];
                    }
                }
                d.is_positive()
            });
            let Some(j) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Q)> = None;
            for (r, row) in self.a.iter().enumerate() {
                if row[j].is_positive() {
                    let ratio = &row[rhs] / &row[j];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Unbounded);
            };
            self.pivot(r, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;

    fn prob(n: usize, rows: &[&[i64]]) -> FeasibilityProblem {
        FeasibilityProblem::new(n, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn symmetric_pair_is_feasible_at_center() {
        let p = prob(2, &[&[1, -1], &[-1, 1]]);
        match feasible(&p) {
            Feasibility::Point { c, min_slack } => {
                assert_eq!(c, vec![q_frac(1, 2), q_frac(1, 2)]);
                assert_eq!(min_slack, Q::zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collapsed_second_system_is_infeasible() {
        // x ≤ y, 2x ≥ 3y, 16x + 14y ≥ 13(x + y + z).
        let p = prob(3, &[&[-1, 1, 0], &[2, -3, 0], &[3, 1, -13]]);
        match feasible(&p) {
            Feasibility::Infeasible(cert) => assert!(verify_farkas(&p, &cert).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collapsed_six_four_sets_system_is_infeasible() {
        // 38x + 46y ≥ 43(x + y), 92x + 67y ≥ 78(x + y).
        let p = prob(2, &[&[-5, 3], &[14, -11]]);
        match feasible(&p) {
            Feasibility::Infeasible(cert) => assert!(verify_farkas(&p, &cert).unwrap()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn verify_farkas_cases() {
        let p = prob(1, &[&[-1]]);
        assert!(verify_farkas(&p, &FarkasCertificate { lambda: vec![q(1)] }).unwrap());
        let z = prob(2, &[&[0, 0]]);
        assert!(!verify_farkas(&z, &FarkasCertificate { lambda: vec![q(3)] }).unwrap());
        assert!(!verify_farkas(&p, &FarkasCertificate { lambda: vec![q(0)] }).unwrap());
        assert!(verify_farkas(&p, &FarkasCertificate { lambda: vec![] }).is_err());
    }

    #[test]
    fn zero_rows_gives_uniform_point() {
        let p = prob(4, &[]);
        match feasible(&p) {
            Feasibility::Point { c, .. } => assert_eq!(c, vec![q_frac(1, 4); 4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lexicographically_greatest_among_optimal() {
        // Single row c_1 ≥ 0 trivially: optimum slack 1 at c = (1, 0).
        let p = prob(2, &[&[1, 0]]);
        match feasible(&p) {
            Feasibility::Point { c, min_slack } => {
                assert_eq!(min_slack, q(1));
                assert_eq!(c, vec![q(1), q(0)]);
            }
            other => panic!("{other:?}"),
        }
        // Both rows zero: every point optimal, lex-greatest is e_1.
        let p = prob(3, &[&[0, 0, 0]]);
        match feasible(&p) {
            Feasibility::Point { c, .. } => assert_eq!(c, vec![q(1), q(0), q(0)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(FeasibilityProblem::new(2, vec![vec![1, 2, 3]]).is_err());
    }

    #[test]
    fn general_lp_infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.push(vec![q(1)], Sense::Ge, q(2));
        lp.push(vec![q(1)], Sense::Le, q(1));
        assert_eq!(lp.maximize(&[q(1)]), LpOutcome::Infeasible);
        let mut lp = Lp::new(1);
        lp.push(vec![q(1)], Sense::Ge, q(2));
        assert_eq!(lp.maximize(&[q(1)]), LpOutcome::Unbounded);
    }
}
