//! Exact LP relaxations and branch-and-cut with SOS1 branching.

mod bnc;
pub mod simplex;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, LinearInequality, Point, VarRef};
use crate::Rational;

pub use bnc::{branch_and_cut, NodeTrace, SeparationMode, SolveConfig, SolveReport, SolveStatus};

/// `max objective.x` over `rows`, `0 <= x <= 1`, with some variables forced to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub vars: Vec<VarRef>,
    pub rows: Vec<LinearInequality>,
    pub objective: BTreeMap<VarRef, Rational>,
    pub forced_zero: BTreeSet<VarRef>,
}

impl LpProblem {
    /// Knapsack row only, profits as objective.
    pub fn relaxation(instance: &Instance) -> Self {
        LpProblem {
            vars: instance.vars().collect(),
            rows: vec![instance.knapsack_row()],
            objective: instance.profit_objective(),
            forced_zero: BTreeSet::new(),
        }
    }

    fn dense(&self) -> Result<simplex::DenseLp<Rational>> {
        let index: BTreeMap<VarRef, usize> = self.vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        let position = |v: &VarRef| {
            index.get(v).copied().ok_or(Error::VarOutOfRange {
                group: v.group,
                slot: v.slot,
            })
        };
        let n = self.vars.len();
        let mut objective = vec![Rational::zero(); n];
        for (v, c) in &self.objective {
            objective[position(v)?] = c.clone();
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut coeffs = vec![Rational::zero(); n];
            for (v, a) in r.terms() {
                coeffs[position(v)?] = a.clone();
            }
            rows.push((coeffs, r.rhs().clone()));
        }
        let upper = self
            .vars
            .iter()
            .map(|v| {
                if self.forced_zero.contains(v) {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            })
            .collect();
        Ok(simplex::DenseLp { objective, rows, upper })
    }
}

/// Dual multipliers proving an LP optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub row_duals: Vec<Rational>,
    pub bound_duals: BTreeMap<VarRef, Rational>,
    /// Whether the multipliers were checked to close the gap exactly.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Optimal {
        value: Rational,
        point: Point,
        certificate: Certificate,
        pivots: usize,
    },
    Infeasible {
        pivots: usize,
    },
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpResult> {
    let dense = problem.dense()?;
    match simplex::solve(&dense) {
        simplex::LpOutcome::Optimal(sol) => {
            let verified = simplex::verify_certificate(&dense, &sol);
            debug_assert!(verified, "simplex certificate failed");
            let mut point = Point::zero();
            for (v, x) in problem.vars.iter().zip(&sol.x) {
                point.set(*v, x.clone())?;
            }
            let bound_duals = problem.vars.iter().copied().zip(sol.bound_duals).collect();
            Ok(LpResult::Optimal {
                value: sol.value,
                point,
                certificate: Certificate {
                    row_duals: sol.row_duals,
                    bound_duals,
                    verified,
                },
                pivots: sol.pivots,
            })
        }
        simplex::LpOutcome::Infeasible { pivots } => Ok(LpResult::Infeasible { pivots }),
        // Every variable is boxed, so the relaxation cannot be unbounded.
        simplex::LpOutcome::Unbounded { .. } => unreachable!("boxed LP reported unbounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;
    use crate::numeric::int;

    fn optimum(r: LpResult) -> (Rational, Point, Certificate) {
        match r {
            LpResult::Optimal {
                value,
                point,
                certificate,
                ..
            } => (value, point, certificate),
            LpResult::Infeasible { .. } => panic!("infeasible"),
        }
    }

    #[test]
    fn single_bounded_variable() {
        let inst = Instance::with_profits_equal_weights(vec![vec![int(2)]], int(21)).unwrap();
        let (v, p, cert) = optimum(solve_lp(&LpProblem::relaxation(&inst)).unwrap());
        assert_eq!(v, int(2));
        assert_eq!(p.get(VarRef::new(1, 1)), int(1));
        assert!(cert.verified);

        let mut lp = LpProblem::relaxation(&inst);
        lp.objective = BTreeMap::from([(VarRef::new(1, 1), int(1))]);
        assert_eq!(optimum(solve_lp(&lp).unwrap()).0, int(1));
    }

    #[test]
    fn capacity_forced_value() {
        let inst = parse_instance(
            "ckp 1\nb 21\ngroup 1 a 2 c 2\ngroup 1 a 4 c 4\ngroup 1 a 8 c 8\ngroup 2 a 10 6 c 10 6\ngroup 2 a 8 4 c 8 4\n",
        )
        .unwrap();
        let (v, p, cert) = optimum(solve_lp(&LpProblem::relaxation(&inst)).unwrap());
        assert_eq!(v, int(21));
        assert_eq!(inst.knapsack_row().lhs(&p), int(21));
        assert!(cert.verified);
    }

    #[test]
    fn zero_rhs_and_full_forcing_give_zero() {
        let inst = Instance::with_profits_equal_weights(vec![vec![int(3), int(1)]], int(2)).unwrap();
        let mut lp = LpProblem::relaxation(&inst);
        lp.rows[0].set_rhs(int(0));
        let (v, p, _) = optimum(solve_lp(&lp).unwrap());
        assert_eq!(v, int(0));
        assert_eq!(p, Point::zero());

        lp.forced_zero = inst.vars().collect();
        lp.rows[0].set_rhs(int(2));
        assert_eq!(optimum(solve_lp(&lp).unwrap()).0, int(0));
    }

    #[test]
    fn infeasible_rows() {
        let inst = Instance::with_profits_equal_weights(vec![vec![int(1)]], int(1)).unwrap();
        let mut lp = LpProblem::relaxation(&inst);
        lp.rows
            .push(LinearInequality::from_terms([(VarRef::new(1, 1), int(-1))], int(-2)));
        assert!(matches!(solve_lp(&lp).unwrap(), LpResult::Infeasible { .. }));
    }
}
