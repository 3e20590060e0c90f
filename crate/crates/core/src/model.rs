//! Instance data, sparse inequalities and points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Variable `x_{ij}`: `group` is `i`, `slot` is `j`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub group: usize,
    pub slot: usize,
}

impl VarRef {
    pub const fn new(group: usize, slot: usize) -> Self {
        Self { group, slot }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.group, self.slot)
    }
}

/// One SOS1 set: at most one of its variables may be positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    weights: Vec<Rational>,
    profits: Vec<Rational>,
}

impl Group {
    pub fn new(weights: Vec<Rational>, profits: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Validation("group must have at least one variable".into()));
        }
        if weights.len() != profits.len() {
            return Err(Error::Validation(format!(
                "group has {} weights but {} profits",
                weights.len(),
                profits.len()
            )));
        }
        Ok(Self { weights, profits })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn profits(&self) -> &[Rational] {
        &self.profits
    }
}

/// A complementarity knapsack instance.
///
/// Construction enforces `m >= 1`, `b > 0` and nonnegative weights and
/// profits. Slot order is whatever the caller supplied; see [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    groups: Vec<Group>,
    capacity: Rational,
}

impl Instance {
    pub fn new(groups: Vec<Group>, capacity: Rational) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Validation("instance needs at least one group".into()));
        }
        if !capacity.is_positive() {
            return Err(Error::Validation(format!("capacity b = {capacity} must be positive")));
        }
        for (gi, group) in groups.iter().enumerate() {
            for (sj, (a, c)) in group.weights.iter().zip(&group.profits).enumerate() {
                if a.is_negative() {
                    return Err(Error::Validation(format!(
                        "weight a_({},{}) = {a} is negative",
                        gi + 1,
                        sj + 1
                    )));
                }
                if c.is_negative() {
                    return Err(Error::Validation(format!(
                        "profit c_({},{}) = {c} is negative",
                        gi + 1,
                        sj + 1
                    )));
                }
            }
        }
        Ok(Self { groups, capacity })
    }

    /// Builds an instance whose profits equal its weights.
    pub fn with_profits_equal_weights(weights: Vec<Vec<Rational>>, capacity: Rational) -> Result<Self> {
        let groups = weights
            .into_iter()
            .map(|w| Group::new(w.clone(), w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(groups, capacity)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn capacity(&self) -> &Rational {
        &self.capacity
    }

    /// Number of groups `m`.
    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    /// `n_i` for the 1-based group `i`.
    pub fn group_len(&self, group: usize) -> usize {
        self.groups[group - 1].len()
    }

    /// Total variable count `d`.
    pub fn dimension(&self) -> usize {
        self.groups.iter().map(Group::len).sum()
    }

    pub fn contains(&self, v: VarRef) -> bool {
        v.group >= 1 && v.group <= self.groups.len() && v.slot >= 1 && v.slot <= self.group_len(v.group)
    }

    pub fn check_var(&self, v: VarRef) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::VarOutOfRange {
                group: v.group,
                slot: v.slot,
            })
        }
    }

    pub fn weight(&self, v: VarRef) -> &Rational {
        &self.groups[v.group - 1].weights[v.slot - 1]
    }

    pub fn profit(&self, v: VarRef) -> &Rational {
        &self.groups[v.group - 1].profits[v.slot - 1]
    }

    /// Groups with a single variable.
    pub fn is_singleton(&self, group: usize) -> bool {
        self.group_len(group) == 1
    }

    pub fn m0(&self) -> BTreeSet<usize> {
        (1..=self.num_groups()).filter(|&i| self.is_singleton(i)).collect()
    }

    /// All variables in (group, slot) order; this order also fixes the
    /// coordinate layout of dense point vectors.
    pub fn vars(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.groups
            .iter()
            .enumerate()
            .flat_map(|(gi, g)| (1..=g.len()).map(move |j| VarRef::new(gi + 1, j)))
    }

    pub fn group_vars(&self, group: usize) -> impl Iterator<Item = VarRef> {
        (1..=self.group_len(group)).map(move |j| VarRef::new(group, j))
    }

    /// Weights are non-increasing within every group.
    pub fn is_normalized(&self) -> bool {
        self.groups.iter().all(|g| g.weights.windows(2).all(|w| w[0] >= w[1]))
    }

    /// The knapsack row `sum a_ij x_ij <= b`.
    pub fn knapsack_row(&self) -> LinearInequality {
        let mut row = LinearInequality::new(self.capacity.clone());
        for v in self.vars() {
            row.add_term(v, self.weight(v).clone());
        }
        row
    }

    /// The profit objective `c` as a sparse map.
    pub fn profit_objective(&self) -> BTreeMap<VarRef, Rational> {
        self.vars()
            .filter(|&v| !self.profit(v).is_zero())
            .map(|v| (v, self.profit(v).clone()))
            .collect()
    }

    pub fn objective_value(&self, point: &Point) -> Rational {
        point
            .iter()
            .map(|(v, x)| self.profit(*v).clone() * x.clone())
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// Membership in `S`: knapsack row, bounds and complementarity.
    pub fn is_feasible(&self, point: &Point) -> bool {
        point.iter().all(|(v, _)| self.contains(*v))
            && self.satisfies_knapsack(point)
            && point.satisfies_complementarity()
    }

    pub fn satisfies_knapsack(&self, point: &Point) -> bool {
        let load = point
            .iter()
            .map(|(v, x)| self.weight(*v).clone() * x.clone())
            .fold(Rational::zero(), |acc, t| acc + t);
        load <= self.capacity
    }
}

/// Sparse `sum coeff * x <= rhs`. Stored coefficients are never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearInequality {
    coeffs: BTreeMap<VarRef, Rational>,
    rhs: Rational,
}

impl LinearInequality {
    pub fn new(rhs: Rational) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            rhs,
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (VarRef, Rational)>, rhs: Rational) -> Self {
        let mut ineq = Self::new(rhs);
        for (v, c) in terms {
            ineq.add_term(v, c);
        }
        ineq
    }

    /// Adds `coeff` to the coefficient of `v`, dropping it if the sum is zero.
    pub fn add_term(&mut self, v: VarRef, coeff: Rational) {
        let entry = self.coeffs.entry(v).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn coeff(&self, v: VarRef) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<VarRef, Rational> {
        &self.coeffs
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    pub fn set_rhs(&mut self, rhs: Rational) {
        self.rhs = rhs;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarRef, &Rational)> {
        self.coeffs.iter()
    }

    /// Left-hand side at `point`.
    pub fn lhs(&self, point: &Point) -> Rational {
        // Iterate the sparser side.
        if point.values.len() < self.coeffs.len() {
            point
                .iter()
                .filter_map(|(v, x)| self.coeffs.get(v).map(|c| c.clone() * x.clone()))
                .fold(Rational::zero(), |acc, t| acc + t)
        } else {
            self.coeffs
                .iter()
                .filter_map(|(v, c)| point.values.get(v).map(|x| c.clone() * x.clone()))
                .fold(Rational::zero(), |acc, t| acc + t)
        }
    }
}

/// Sparse point with entries in `[0, 1]`; absent entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point {
    values: BTreeMap<VarRef, Rational>,
}

impl Point {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (VarRef, Rational)>) -> Result<Self> {
        let mut p = Self::zero();
        for (v, x) in entries {
            p.set(v, x)?;
        }
        Ok(p)
    }

    /// Sets an entry; values outside `[0, 1]` are rejected.
    pub fn set(&mut self, v: VarRef, x: Rational) -> Result<()> {
        if x.is_negative() || x > Rational::one() {
            return Err(Error::Validation(format!("point entry {v} = {x} is outside [0, 1]")));
        }
        if x.is_zero() {
            self.values.remove(&v);
        } else {
            self.values.insert(v, x);
        }
        Ok(())
    }

    pub fn get(&self, v: VarRef) -> Rational {
        self.values.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarRef, &Rational)> {
        self.values.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = VarRef> + '_ {
        self.values.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries strictly between 0 and 1.
    pub fn fractional(&self) -> impl Iterator<Item = (&VarRef, &Rational)> {
        self.values.iter().filter(|(_, x)| !x.is_one())
    }

    pub fn satisfies_complementarity(&self) -> bool {
        let mut last = None;
        for v in self.values.keys() {
            if last == Some(v.group) {
                return false;
            }
            last = Some(v.group);
        }
        true
    }

    /// Dense coordinates in the instance's variable order.
    pub fn to_dense(&self, instance: &Instance) -> Vec<Rational> {
        instance.vars().map(|v| self.get(v)).collect()
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn convex_combination(&self, other: &Point, alpha: &Rational) -> Result<Point> {
        let keys: BTreeSet<VarRef> = self.values.keys().chain(other.values.keys()).copied().collect();
        let beta = Rational::one() - alpha.clone();
        Point::from_entries(
            keys.into_iter()
                .map(|v| (v, alpha.clone() * self.get(v) + beta.clone() * other.get(v))),
        )
    }
}

/// Exact sparse evaluation of an inequality at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub lhs: Rational,
    /// `lhs - rhs`; positive means the point violates the inequality.
    pub violation: Rational,
}

/// Evaluates `ineq` at `point`, checking every referenced variable exists.
pub fn evaluate(instance: &Instance, ineq: &LinearInequality, point: &Point) -> Result<Evaluation> {
    for v in ineq.coeffs.keys().chain(point.values.keys()) {
        instance.check_var(*v)?;
    }
    let lhs = ineq.lhs(point);
    let violation = lhs.clone() - ineq.rhs.clone();
    Ok(Evaluation { lhs, violation })
}

/// Result of [`normalize`]: the reordered instance plus, per group, the map
/// from normalized slot (index) to input slot (value, 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub instance: Instance,
    pub permutations: Vec<Vec<usize>>,
}

/// Sorts each group by non-increasing weight; ties by non-increasing profit,
/// then by original slot.
pub fn normalize(instance: &Instance) -> Normalization {
    let mut groups = Vec::with_capacity(instance.num_groups());
    let mut permutations = Vec::with_capacity(instance.num_groups());
    for g in &instance.groups {
        let mut order: Vec<usize> = (0..g.len()).collect();
        order.sort_by(|&x, &y| {
            g.weights[y]
                .cmp(&g.weights[x])
                .then_with(|| g.profits[y].cmp(&g.profits[x]))
                .then_with(|| x.cmp(&y))
        });
        groups.push(Group {
            weights: order.iter().map(|&k| g.weights[k].clone()).collect(),
            profits: order.iter().map(|&k| g.profits[k].clone()).collect(),
        });
        permutations.push(order.into_iter().map(|k| k + 1).collect());
    }
    Normalization {
        instance: Instance {
            groups,
            capacity: instance.capacity.clone(),
        },
        permutations,
    }
}

impl Normalization {
    pub fn is_identity(&self) -> bool {
        self.permutations
            .iter()
            .all(|p| p.iter().enumerate().all(|(k, &s)| s == k + 1))
    }

    /// Normalized variable to input variable.
    pub fn to_original_var(&self, v: VarRef) -> VarRef {
        VarRef::new(v.group, self.permutations[v.group - 1][v.slot - 1])
    }

    /// Input variable to normalized variable.
    pub fn to_normalized_var(&self, v: VarRef) -> VarRef {
        let slot = self.permutations[v.group - 1]
            .iter()
            .position(|&s| s == v.slot)
            .expect("slot present in permutation")
            + 1;
        VarRef::new(v.group, slot)
    }

    pub fn point_to_original(&self, p: &Point) -> Point {
        Point {
            values: p
                .values
                .iter()
                .map(|(v, x)| (self.to_original_var(*v), x.clone()))
                .collect(),
        }
    }

    pub fn point_to_normalized(&self, instance: &Instance, p: &Point) -> Result<Point> {
        for v in p.support() {
            instance.check_var(v)?;
        }
        Ok(Point {
            values: p
                .values
                .iter()
                .map(|(v, x)| (self.to_normalized_var(*v), x.clone()))
                .collect(),
        })
    }

    pub fn inequality_to_original(&self, ineq: &LinearInequality) -> LinearInequality {
        LinearInequality {
            coeffs: ineq
                .coeffs
                .iter()
                .map(|(v, c)| (self.to_original_var(*v), c.clone()))
                .collect(),
            rhs: ineq.rhs.clone(),
        }
    }
}

/// Outcome of checking the two standing assumptions on a normalized instance:
/// some group has two or more slots, and the heaviest slots overflow `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    /// Groups with `n_i = 1`.
    pub m0_set: BTreeSet<usize>,
    /// Some group has at least two variables.
    pub assumption1_holds: bool,
    /// `sum_i max_j a_ij > b`.
    pub assumption2_holds: bool,
    /// Populated when assumption 2 fails: every group's best-profit slot at 1.
    pub trivial_optimum: Option<(Rational, Point)>,
}

pub fn validate_assumptions(instance: &Instance) -> AssumptionReport {
    let m0_set = instance.m0();
    let assumption1_holds = m0_set.len() < instance.num_groups();
    let heaviest: Rational = instance
        .groups
        .iter()
        .map(|g| g.weights.iter().max().cloned().unwrap_or_else(Rational::zero))
        .fold(Rational::zero(), |acc, a| acc + a);
    let assumption2_holds = heaviest > instance.capacity;
    let trivial_optimum = (!assumption2_holds).then(|| {
        let mut point = Point::zero();
        let mut value = Rational::zero();
        for (gi, g) in instance.groups.iter().enumerate() {
            // First slot among the maximal profits.
            let (slot, best) =
                g.profits.iter().enumerate().fold(
                    (0, &g.profits[0]),
                    |(bj, bc), (j, c)| if c > bc { (j, c) } else { (bj, bc) },
                );
            value += best.clone();
            point
                .set(VarRef::new(gi + 1, slot + 1), Rational::one())
                .expect("unit entry is in range");
        }
        (value, point)
    });
    AssumptionReport {
        m0_set,
        assumption1_holds,
        assumption2_holds,
        trivial_optimum,
    }
}
