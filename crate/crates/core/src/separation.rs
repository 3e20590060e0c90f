//! Separating fractional points with the cut families, and the partition
//! reduction that produces hard separation inputs.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cuts::{
    for_each_admissible, is_maximal_switching_pack, is_pack, spec_for, CutSpec, Family, GeneratedCut, ItemSet,
};
use crate::error::{Error, Result};
use crate::model::{Instance, Point, VarRef};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Found {
    pub cut: GeneratedCut,
    /// `lhs - rhs` at the separated point; always positive.
    pub violation: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeparationStats {
    /// Family members whose violation was evaluated.
    pub candidates: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationResult {
    pub outcome: Option<Found>,
    pub stats: SeparationStats,
}

impl SeparationResult {
    pub fn found(&self) -> Option<&Found> {
        self.outcome.as_ref()
    }
}

/// Bounds plus the knapsack row.
fn check_lp_feasible(instance: &Instance, point: &Point) -> Result<()> {
    for v in point.support() {
        instance.check_var(v)?;
    }
    if !instance.satisfies_knapsack(point) {
        return Err(Error::precondition("point violates the knapsack row"));
    }
    Ok(())
}

/// Keeps the most violated candidate; ties go to the smaller provenance.
struct Best<'a> {
    instance: &'a Instance,
    point: &'a Point,
    best: Option<(Rational, CutSpec)>,
    candidates: u64,
}

impl<'a> Best<'a> {
    fn new(instance: &'a Instance, point: &'a Point) -> Self {
        Self {
            instance,
            point,
            best: None,
            candidates: 0,
        }
    }

    fn offer(&mut self, spec: &CutSpec) {
        self.candidates += 1;
        let lhs = self
            .point
            .iter()
            .map(|(v, x)| spec.coefficient(self.instance, *v) * x)
            .fold(Rational::zero(), |acc, t| acc + t);
        let violation = lhs - spec.rhs();
        if !violation.is_positive() {
            return;
        }
        let better = match &self.best {
            None => true,
            Some((v, s)) => match violation.cmp(v) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => spec.provenance().cmp_key(s.provenance()) == Ordering::Less,
            },
        };
        if better {
            self.best = Some((violation, spec.clone()));
        }
    }

    fn finish(self, started: Instant) -> SeparationResult {
        let instance = self.instance;
        SeparationResult {
            outcome: self.best.map(|(violation, spec)| Found {
                cut: spec.materialize(instance),
                violation,
            }),
            stats: SeparationStats {
                candidates: self.candidates,
                elapsed: started.elapsed(),
            },
        }
    }
}

/// Exhaustive separation over every admissible member of `families`.
///
/// Returns a maximum-violation cut (ties broken by shortlex provenance) or
/// none when no member is violated. Exponential by nature; refuses inputs
/// whose pattern space exceeds `limit`.
pub fn separate_exact(instance: &Instance, point: &Point, families: &[Family], limit: u64) -> Result<SeparationResult> {
    let started = Instant::now();
    check_lp_feasible(instance, point)?;
    let mut best = Best::new(instance, point);
    for_each_admissible(instance, families, limit, |spec| best.offer(spec))?;
    Ok(best.finish(started))
}

/// Greedy pack heuristic.
///
/// Groups are ranked by their weighted load `sum_j a_ij x_ij` (ties by group
/// index) and their last-slot items are added while the running weight stays
/// below `b`. The resulting pack, and the packs obtained from it by dropping
/// one singleton item, feed every requested pack family. Sound but not
/// complete; the cover families are not searched.
pub fn separate_greedy(instance: &Instance, point: &Point, families: &[Family]) -> Result<SeparationResult> {
    let started = Instant::now();
    check_lp_feasible(instance, point)?;
    if !instance.is_normalized() {
        return Err(Error::precondition("instance is not normalized"));
    }
    let mut ranked: Vec<(Rational, usize)> = (1..=instance.num_groups())
        .map(|g| {
            let load = instance
                .group_vars(g)
                .map(|v| instance.weight(v).clone() * point.get(v))
                .fold(Rational::zero(), |acc, t| acc + t);
            (load, g)
        })
        .collect();
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));

    let b = instance.capacity();
    let mut items = Vec::new();
    let mut weight = Rational::zero();
    for (_, g) in &ranked {
        let last = VarRef::new(*g, instance.group_len(*g));
        let next = weight.clone() + instance.weight(last);
        if next < *b {
            weight = next;
            items.push(last);
        }
    }
    let mut best = Best::new(instance, point);
    if items.is_empty() {
        return Ok(best.finish(started));
    }
    let pack = ItemSet::new(instance, items)?;
    let mut packs = vec![pack.clone()];
    if is_maximal_switching_pack(instance, &pack) {
        for v in pack.items().iter().filter(|v| instance.is_singleton(v.group)) {
            if let Some(rest) = pack.without_group(instance, v.group) {
                packs.push(rest);
            }
        }
    }
    for p in &packs {
        debug_assert!(is_pack(instance, p));
        offer_pack_family(instance, p, families, &mut best);
    }
    Ok(best.finish(started))
}

fn offer_pack_family(instance: &Instance, pack: &ItemSet, families: &[Family], best: &mut Best<'_>) {
    if families.contains(&Family::Pack1) {
        if let Ok(spec) = spec_for(instance, Family::Pack1, pack, None, None, None) {
            best.offer(&spec);
        }
    }
    let pivots = pack
        .items()
        .iter()
        .copied()
        .filter(|v| !instance.is_singleton(v.group) && v.slot == instance.group_len(v.group));
    let tilts: Vec<usize> = pack
        .items()
        .iter()
        .filter(|v| instance.is_singleton(v.group))
        .map(|v| v.group)
        .collect();
    for p in pivots {
        if families.contains(&Family::Pack2) {
            if let Ok(spec) = spec_for(instance, Family::Pack2, pack, Some(p), None, None) {
                best.offer(&spec);
            }
        }
        if families.contains(&Family::Pack3) {
            for &t in &tilts {
                if let Ok(spec) = spec_for(instance, Family::Pack3, pack, Some(p), Some(t), None) {
                    best.offer(&spec);
                }
            }
        }
    }
}

/// A partition-problem input: positive integers summing to `2 * beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionInput {
    alphas: Vec<u64>,
    beta: u64,
}

impl PartitionInput {
    pub fn new(alphas: Vec<u64>, beta: u64) -> Result<Self> {
        if alphas.is_empty() || alphas.contains(&0) {
            return Err(Error::precondition("alphas must be positive integers"));
        }
        if beta == 0 {
            return Err(Error::precondition("beta must be positive"));
        }
        let total: u128 = alphas.iter().map(|&a| a as u128).sum();
        if total != 2 * beta as u128 {
            return Err(Error::precondition(format!(
                "alphas sum to {total}, expected 2 * beta = {}",
                2 * beta as u128
            )));
        }
        Ok(Self { alphas, beta })
    }

    pub fn alphas(&self) -> &[u64] {
        &self.alphas
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }
}

/// Builds the reduction instance and its LP-optimal point.
///
/// Groups `1..=k` are singletons with weights `alpha_i`; group `k+1` has
/// `beta + 1` slots weighing `(3, 1, ..., 1)`; `b = beta + 2` and `c = a`.
/// The point sets `x_i1 = (2 beta - 3) / (6 beta)` for `i <= k`,
/// `x_{k+1,1} = 1` and `1/3` on the remaining slots; it fills the knapsack
/// row exactly.
pub fn build_partition_reduction(input: &PartitionInput) -> Result<(Instance, Point)> {
    let beta = input.beta;
    if beta < 2 {
        return Err(Error::precondition(format!(
            "beta = {beta} would make the reduction point negative; beta >= 2 is required"
        )));
    }
    let int = |x: u64| Rational::from_integer(BigInt::from(x));
    let mut weights: Vec<Vec<Rational>> = input.alphas.iter().map(|&a| vec![int(a)]).collect();
    let mut tail = vec![int(3)];
    tail.extend((0..beta).map(|_| Rational::one()));
    weights.push(tail);
    let instance = Instance::with_profits_equal_weights(weights, int(beta + 2))?;

    let k = input.alphas.len();
    let share = Rational::new(BigInt::from(2 * beta - 3), BigInt::from(6 * beta));
    let third = Rational::new(BigInt::from(1), BigInt::from(3));
    let mut point = Point::zero();
    for i in 1..=k {
        point.set(VarRef::new(i, 1), share.clone())?;
    }
    point.set(VarRef::new(k + 1, 1), Rational::one())?;
    for j in 2..=beta as usize + 1 {
        point.set(VarRef::new(k + 1, j), third.clone())?;
    }
    debug_assert_eq!(instance.knapsack_row().lhs(&point), *instance.capacity());
    Ok((instance, point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};
    use crate::oracle::DEFAULT_ENUM_LIMIT;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn v(i: usize, j: usize) -> VarRef {
        VarRef::new(i, j)
    }

    fn ex45() -> Instance {
        Instance::with_profits_equal_weights(
            vec![ints(&[1]), ints(&[6]), ints(&[14, 10]), ints(&[13, 9]), ints(&[12, 8])],
            int(36),
        )
        .unwrap()
    }

    fn ex45_point() -> Point {
        Point::from_entries([
            (v(1, 1), int(1)),
            (v(2, 1), int(1)),
            (v(3, 2), int(1)),
            (v(4, 2), int(1)),
            (v(5, 2), int(1)),
            (v(3, 1), ratio(1, 7)),
        ])
        .unwrap()
    }

    #[test]
    fn reduction_small() {
        let (inst, x) = build_partition_reduction(&PartitionInput::new(vec![1, 1, 2], 2).unwrap()).unwrap();
        assert_eq!(inst.num_groups(), 4);
        assert_eq!(*inst.capacity(), int(4));
        assert_eq!(inst.groups()[3].weights(), ints(&[3, 1, 1]).as_slice());
        for i in 1..=3 {
            assert_eq!(x.get(v(i, 1)), ratio(1, 12));
        }
        assert_eq!(x.get(v(4, 1)), int(1));
        assert_eq!(x.get(v(4, 2)), ratio(1, 3));
        assert_eq!(x.get(v(4, 3)), ratio(1, 3));
        assert_eq!(inst.knapsack_row().lhs(&x), int(4));

        let (inst, x) = build_partition_reduction(&PartitionInput::new(vec![2, 2, 2], 3).unwrap()).unwrap();
        assert_eq!(*inst.capacity(), int(5));
        assert_eq!(inst.groups()[3].weights(), ints(&[3, 1, 1, 1]).as_slice());
        assert_eq!(x.get(v(1, 1)), ratio(1, 6));
        assert_eq!(x.get(v(4, 4)), ratio(1, 3));
    }

    #[test]
    fn reduction_rejects_bad_input() {
        assert!(PartitionInput::new(vec![1, 2], 2).is_err());
        assert!(PartitionInput::new(vec![0, 2], 1).is_err());
        let one = PartitionInput::new(vec![1, 1], 1).unwrap();
        assert!(build_partition_reduction(&one).is_err());
    }

    #[test]
    fn exact_separation_on_reduction() {
        let (inst, x) = build_partition_reduction(&PartitionInput::new(vec![1, 1, 2], 2).unwrap()).unwrap();
        let res = separate_exact(&inst, &x, &[Family::LiftedCover1], DEFAULT_ENUM_LIMIT).unwrap();
        let found = res.found().expect("yes-instance separates");
        assert_eq!(found.violation, ratio(1, 2));
        assert_eq!(found.cut.provenance.items.items(), &[v(3, 1), v(4, 1)]);
        let res = separate_exact(&inst, &x, &[Family::LiftedCover2], DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(res.found().unwrap().violation, ratio(1, 2));
    }

    #[test]
    fn zero_point_is_never_separated() {
        let inst = ex45();
        let res = separate_exact(&inst, &Point::zero(), &Family::ALL, DEFAULT_ENUM_LIMIT).unwrap();
        assert!(res.outcome.is_none());
        assert!(res.stats.candidates > 0);
        assert!(separate_greedy(&inst, &Point::zero(), &Family::ALL)
            .unwrap()
            .outcome
            .is_none());
    }

    #[test]
    fn example_4_5_point() {
        let inst = ex45();
        let x = ex45_point();
        let exact = separate_exact(&inst, &x, &[Family::Pack2], DEFAULT_ENUM_LIMIT).unwrap();
        let exact = exact.found().unwrap();
        assert!(exact.violation >= ratio(5, 3));

        let greedy = separate_greedy(&inst, &x, &Family::ALL).unwrap();
        let greedy = greedy.found().unwrap();
        assert!(greedy.violation >= ratio(5, 3));
        let pack2_only = separate_greedy(&inst, &x, &[Family::Pack2]).unwrap();
        let g2 = pack2_only.found().unwrap();
        assert_eq!(g2.violation, int(2));
        assert_eq!(exact.violation, int(2));
        assert_eq!(g2.cut.provenance.items.items(), &[v(1, 1), v(3, 2), v(4, 2), v(5, 2)]);

        let p1 = ItemSet::new(&inst, [v(1, 1), v(2, 1), v(3, 2), v(4, 2), v(5, 2)]).unwrap();
        let cut = crate::cuts::pack_inequality_2(&inst, &p1, v(3, 2)).unwrap();
        assert_eq!(
            crate::model::evaluate(&inst, &cut.inequality, &x).unwrap().violation,
            ratio(5, 3)
        );
    }

    #[test]
    fn integral_points_are_never_separated() {
        let inst = ex45();
        let p = Point::from_entries([(v(1, 1), int(1)), (v(3, 1), int(1)), (v(4, 2), int(1))]).unwrap();
        assert!(inst.is_feasible(&p));
        assert!(separate_greedy(&inst, &p, &Family::ALL).unwrap().outcome.is_none());
        assert!(separate_exact(&inst, &p, &Family::ALL, DEFAULT_ENUM_LIMIT)
            .unwrap()
            .outcome
            .is_none());
    }

    #[test]
    fn infeasible_point_rejected() {
        let inst = ex45();
        let p = Point::from_entries([(v(3, 1), int(1)), (v(4, 1), int(1)), (v(5, 1), int(1))]).unwrap();
        assert!(matches!(
            separate_greedy(&inst, &p, &Family::ALL),
            Err(Error::Precondition(_))
        ));
        assert!(separate_exact(&inst, &p, &Family::ALL, DEFAULT_ENUM_LIMIT).is_err());
    }

    #[test]
    fn limit_is_reported() {
        let inst = ex45();
        let err = separate_exact(&inst, &Point::zero(), &Family::ALL, 10).unwrap_err();
        assert!(matches!(
            err,
            Error::ResourceLimit {
                estimated: 108,
                limit: 10
            }
        ));
    }
}
