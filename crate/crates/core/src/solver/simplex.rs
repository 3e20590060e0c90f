//! Dense two-phase tableau simplex over an exact field, Bland's rule.
//!
//! Solves `max c.x  s.t.  A x <= b, 0 <= x <= u` and returns dual multipliers
//! that certify optimality: `y >= 0`, `A'^T y >= c`, `b'.y = c.x`, where
//! `(A', b')` stacks the rows and the upper-bound rows.

use crate::numeric::ExactField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseLp<T> {
    pub objective: Vec<T>,
    /// `(coefficients, rhs)` for each `<=` row.
    pub rows: Vec<(Vec<T>, T)>,
    pub upper: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution<T> {
    pub value: T,
    pub x: Vec<T>,
    /// One multiplier per row of `rows`.
    pub row_duals: Vec<T>,
    /// One multiplier per upper bound.
    pub bound_duals: Vec<T>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible { pivots: usize },
    Unbounded { pivots: usize },
}

struct Tableau<T> {
    /// Constraint rows; the last entry of each row is the rhs.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Reduced-cost row `c_j - z_j`; the last entry is `-objective value`.
    cost: Vec<T>,
    pivots: usize,
}

impl<T: ExactField> Tableau<T> {
    fn width(&self) -> usize {
        self.cost.len() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        self.pivots += 1;
        let lead = self.rows[row][col].clone();
        if !lead.is_one() {
            for entry in self.rows[row].iter_mut() {
                if !entry.is_zero() {
                    *entry = entry.clone() / lead.clone();
                }
            }
        }
        let pivot_row = self.rows[row].clone();
        let eliminate = |target: &mut Vec<T>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t = t.clone() - factor.clone() * p.clone();
                }
            }
        };
        for (k, r) in self.rows.iter_mut().enumerate() {
            if k != row {
                eliminate(r);
            }
        }
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }

    /// Maximizes the current cost row over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            // Bland: smallest improving column, then smallest basic index among ties.
            let Some(col) = (0..allowed).find(|&j| self.cost[j].is_positive()) else {
                return true;
            };
            let rhs_col = self.width();
            let mut best: Option<(usize, T)> = None;
            for (k, r) in self.rows.iter().enumerate() {
                if !r[col].is_positive() {
                    continue;
                }
                let ratio = r[rhs_col].clone() / r[col].clone();
                let better = match &best {
                    None => true,
                    Some((bk, br)) => ratio < *br || (ratio == *br && self.basis[k] < self.basis[*bk]),
                };
                if better {
                    best = Some((k, ratio));
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

pub fn solve<T: ExactField>(lp: &DenseLp<T>) -> LpOutcome<T> {
    let n = lp.objective.len();
    // Upper bounds become ordinary rows after the constraint rows.
    let mut all_rows: Vec<(Vec<T>, T)> = lp.rows.clone();
    for (j, u) in lp.upper.iter().enumerate() {
        let mut row = vec![T::zero(); n];
        row[j] = T::one();
        all_rows.push((row, u.clone()));
    }
    let m = all_rows.len();
    let flipped: Vec<bool> = all_rows.iter().map(|(_, b)| b.is_negative()).collect();
    let artificial: Vec<usize> = (0..m).filter(|&i| flipped[i]).collect();
    let width = n + m + artificial.len();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_k = 0;
    for (i, (coeffs, b)) in all_rows.iter().enumerate() {
        let mut row = vec![T::zero(); width + 1];
        let sign = if flipped[i] { -T::one() } else { T::one() };
        for (j, a) in coeffs.iter().enumerate() {
            row[j] = sign.clone() * a.clone();
        }
        row[n + i] = sign.clone();
        row[width] = sign * b.clone();
        if flipped[i] {
            row[n + m + art_k] = T::one();
            basis.push(n + m + art_k);
            art_k += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis,
        cost: vec![T::zero(); width + 1],
        pivots: 0,
    };

    if !artificial.is_empty() {
        // Phase one: maximize -(sum of artificials), priced out against the basis.
        for (k, r) in tab.rows.iter().enumerate() {
            if tab.basis[k] >= n + m {
                for (c, e) in tab.cost.iter_mut().zip(r) {
                    *c = c.clone() + e.clone();
                }
            }
        }
        for c in &mut tab.cost[n + m..width] {
            *c = T::zero();
        }
        tab.optimize(width);
        if tab.cost[width].is_positive() {
            return LpOutcome::Infeasible { pivots: tab.pivots };
        }
        // Drive zero-level artificials out of the basis where possible.
        for k in 0..tab.rows.len() {
            if tab.basis[k] < n + m {
                continue;
            }
            if let Some(col) = (0..n + m).find(|&j| !tab.rows[k][j].is_zero()) {
                tab.pivot(k, col);
            }
        }
    }

    // Phase two cost row: c_j - c_B B^{-1} A_j.
    let mut cost = vec![T::zero(); width + 1];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[j] = c.clone();
    }
    for (k, r) in tab.rows.iter().enumerate() {
        let bj = tab.basis[k];
        if bj < n && !lp.objective[bj].is_zero() {
            let cb = lp.objective[bj].clone();
            for (c, e) in cost.iter_mut().zip(r) {
                if !e.is_zero() {
                    *c = c.clone() - cb.clone() * e.clone();
                }
            }
        }
    }
    // Artificials never re-enter.
    for c in &mut cost[n + m..width] {
        *c = T::zero();
    }
    tab.cost = cost;
    if !tab.optimize(n + m) {
        return LpOutcome::Unbounded { pivots: tab.pivots };
    }

    let mut x = vec![T::zero(); n];
    for (k, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rows[k][width].clone();
        }
    }
    let value = -tab.cost[width].clone();
    // y_i = -(reduced cost of slack i), whatever the row's sign convention.
    let duals: Vec<T> = (0..m).map(|i| -tab.cost[n + i].clone()).collect();
    let (row_duals, bound_duals) = duals.split_at(lp.rows.len());
    LpOutcome::Optimal(LpSolution {
        value,
        x,
        row_duals: row_duals.to_vec(),
        bound_duals: bound_duals.to_vec(),
        pivots: tab.pivots,
    })
}

/// Checks a solution's primal feasibility, dual feasibility and zero gap exactly.
pub fn verify_certificate<T: ExactField>(lp: &DenseLp<T>, sol: &LpSolution<T>) -> bool {
    let n = lp.objective.len();
    let dot = |a: &[T], b: &[T]| {
        a.iter()
            .zip(b)
            .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
    };
    let primal = sol.x.iter().zip(&lp.upper).all(|(x, u)| !x.is_negative() && x <= u)
        && lp.rows.iter().all(|(a, b)| dot(a, &sol.x) <= *b);
    let duals_nonneg = sol.row_duals.iter().chain(&sol.bound_duals).all(|y| !y.is_negative());
    let dual_feasible = (0..n).all(|j| {
        let col = lp
            .rows
            .iter()
            .zip(&sol.row_duals)
            .fold(T::zero(), |acc, ((a, _), y)| acc + a[j].clone() * y.clone())
            + sol.bound_duals[j].clone();
        col >= lp.objective[j]
    });
    let dual_value = lp
        .rows
        .iter()
        .zip(&sol.row_duals)
        .fold(T::zero(), |acc, ((_, b), y)| acc + b.clone() * y.clone())
        + dot(&lp.upper, &sol.bound_duals);
    primal && duals_nonneg && dual_feasible && dual_value == sol.value && dot(&lp.objective, &sol.x) == sol.value
}
