//! Ground truth over the feasible set `S` by exhaustive support enumeration.
//!
//! A vertex of `PS` has at most one fractional entry, and a fractional entry
//! forces the knapsack row to be tight. Enumerating every SOS1 support pattern
//! and, within it, the all-ones assignment plus each single "filler" variable
//! therefore yields a finite superset of the vertices whose convex hull is
//! `PS`. Validity and face dimensions are computed against that set.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, LinearInequality, Point, VarRef};
use crate::numeric::affine_rank;
use crate::Rational;

pub const DEFAULT_ENUM_LIMIT: u64 = 1_000_000;

/// `prod (n_i + 1)`, saturating.
pub fn pattern_count(instance: &Instance) -> u128 {
    instance
        .groups()
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1))
}

pub(crate) fn check_limit(estimated: u128, limit: u64) -> Result<()> {
    if estimated > limit as u128 {
        Err(Error::ResourceLimit { estimated, limit })
    } else {
        Ok(())
    }
}

/// Odometer over per-group option lists, last group fastest. Option lists
/// must be sorted; `0` encodes "no variable".
pub(crate) struct PatternWalker {
    options: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    done: bool,
}

impl PatternWalker {
    pub(crate) fn new(options: Vec<Vec<usize>>) -> Self {
        let done = options.iter().any(Vec::is_empty);
        let cursor = vec![0; options.len()];
        Self { options, cursor, done }
    }

    pub(crate) fn full(instance: &Instance) -> Self {
        Self::new(instance.groups().iter().map(|g| (0..=g.len()).collect()).collect())
    }

    pub(crate) fn count(&self) -> u128 {
        self.options
            .iter()
            .fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128))
    }

    /// Calls `f` with each pattern (slot per group, 0 = none) in lexicographic order.
    pub(crate) fn for_each(mut self, mut f: impl FnMut(&[usize])) {
        let mut current: Vec<usize> = self.options.iter().map(|o| o.first().copied().unwrap_or(0)).collect();
        while !self.done {
            f(&current);
            // advance
            let mut k = self.options.len();
            loop {
                if k == 0 {
                    self.done = true;
                    break;
                }
                k -= 1;
                self.cursor[k] += 1;
                if self.cursor[k] < self.options[k].len() {
                    current[k] = self.options[k][self.cursor[k]];
                    break;
                }
                self.cursor[k] = 0;
                current[k] = self.options[k][0];
            }
        }
    }
}

/// Deduplicated candidate vertices; `conv` of the set equals `PS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    points: Vec<Point>,
}

impl VertexSet {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Best point for `objective` by scanning the set.
    pub fn maximize(&self, objective: &LinearInequality) -> (Rational, Point) {
        let mut best: Option<(Rational, &Point)> = None;
        for p in &self.points {
            let value = objective.lhs(p);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, p));
            }
        }
        let (value, p) = best.expect("zero point is always a candidate");
        (value, p.clone())
    }

    /// Dimension of the face `{x in PS : ineq tight}`, assuming `ineq` is valid.
    pub fn face_dimension(&self, instance: &Instance, ineq: &LinearInequality) -> Result<Face> {
        let tight: Vec<Vec<Rational>> = self
            .points
            .iter()
            .filter(|p| ineq.lhs(p) == *ineq.rhs())
            .map(|p| p.to_dense(instance))
            .collect();
        let dimension = if tight.is_empty() {
            -1
        } else {
            affine_rank(&tight)? as isize
        };
        Ok(Face {
            dimension,
            ambient: instance.dimension(),
            tight_points: tight.len(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    /// `-1` for the empty face.
    pub dimension: isize,
    /// `d`, the dimension of `PS`.
    pub ambient: usize,
    pub tight_points: usize,
}

impl Face {
    pub fn is_facet(&self) -> bool {
        self.dimension == self.ambient as isize - 1
    }
}

pub fn enumerate_candidate_vertices(instance: &Instance, limit: u64) -> Result<VertexSet> {
    let walker = PatternWalker::full(instance);
    check_limit(walker.count(), limit)?;
    let b = instance.capacity();
    let mut seen = BTreeSet::new();
    let mut chosen = Vec::with_capacity(instance.num_groups());
    walker.for_each(|pattern| {
        chosen.clear();
        chosen.extend(
            pattern
                .iter()
                .enumerate()
                .filter(|(_, &j)| j != 0)
                .map(|(gi, &j)| VarRef::new(gi + 1, j)),
        );
        let load = chosen.iter().fold(Rational::zero(), |acc, v| acc + instance.weight(*v));
        if load <= *b {
            let ones =
                Point::from_entries(chosen.iter().map(|v| (*v, Rational::one()))).expect("unit entries are in range");
            seen.insert(ones);
        }
        for (k, filler) in chosen.iter().enumerate() {
            let a = instance.weight(*filler);
            if a.is_zero() {
                continue;
            }
            let rest = load.clone() - a;
            let value = (b.clone() - rest) / a;
            if value.is_positive() && value < Rational::one() {
                let entries = chosen
                    .iter()
                    .enumerate()
                    .map(|(t, v)| (*v, if t == k { value.clone() } else { Rational::one() }));
                seen.insert(Point::from_entries(entries).expect("entries are in range"));
            }
        }
    });
    Ok(VertexSet {
        points: seen.into_iter().collect(),
    })
}

/// Exact `max { objective . x : x in S }`.
///
/// Every support pattern is solved as a fractional knapsack over its chosen
/// variables. Only slots with a positive objective coefficient are enumerated;
/// any other choice yields the same point as a lexicographically smaller
/// pattern, so the tie-break (smallest pattern wins) is unaffected.
pub fn maximize_over_s(
    instance: &Instance,
    objective: &BTreeMap<VarRef, Rational>,
    limit: u64,
) -> Result<(Rational, Point)> {
    for v in objective.keys() {
        instance.check_var(*v)?;
    }
    let mut options: Vec<Vec<usize>> = vec![vec![0]; instance.num_groups()];
    for (v, c) in objective {
        if c.is_positive() {
            options[v.group - 1].push(v.slot);
        }
    }
    let walker = PatternWalker::new(options);
    check_limit(walker.count(), limit)?;

    // Greedy order: zero-weight items first, then ratio descending, then VarRef.
    let mut order: Vec<(VarRef, &Rational, Option<Rational>)> = objective
        .iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(v, c)| {
            let a = instance.weight(*v);
            let ratio = (!a.is_zero()).then(|| c.clone() / a);
            (*v, c, ratio)
        })
        .collect();
    order.sort_by(|x, y| match (&x.2, &y.2) {
        (None, None) => x.0.cmp(&y.0),
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(rx), Some(ry)) => ry.cmp(rx).then_with(|| x.0.cmp(&y.0)),
    });

    let b = instance.capacity();
    let mut best: Option<(Rational, Vec<(VarRef, Rational)>)> = None;
    walker.for_each(|pattern| {
        let mut room = b.clone();
        let mut value = Rational::zero();
        let mut entries = Vec::new();
        for (v, c, _) in &order {
            if pattern[v.group - 1] != v.slot {
                continue;
            }
            let a = instance.weight(*v);
            if a.is_zero() || *a <= room {
                room -= a;
                value += *c;
                entries.push((*v, Rational::one()));
            } else {
                if room.is_positive() {
                    let x = room.clone() / a;
                    value += (*c).clone() * x.clone();
                    entries.push((*v, x));
                }
                break;
            }
        }
        if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
            best = Some((value, entries));
        }
    });
    let (value, entries) = best.expect("at least the empty pattern is visited");
    Ok((value, Point::from_entries(entries)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A point of `S` at which the inequality fails.
    Violated(Point),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

pub fn check_validity(instance: &Instance, ineq: &LinearInequality, limit: u64) -> Result<Validity> {
    let (value, argmax) = maximize_over_s(instance, ineq.coeffs(), limit)?;
    Ok(if value <= *ineq.rhs() {
        Validity::Valid
    } else {
        Validity::Violated(argmax)
    })
}

/// Dimension of the face induced by a valid inequality.
pub fn face_dimension(instance: &Instance, ineq: &LinearInequality, limit: u64) -> Result<Face> {
    if let Validity::Violated(witness) = check_validity(instance, ineq, limit)? {
        return Err(Error::NotValid { witness });
    }
    enumerate_candidate_vertices(instance, limit)?.face_dimension(instance, ineq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Group;
    use crate::numeric::{int, ratio};
    use proptest::prelude::*;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn ex43() -> Instance {
        Instance::with_profits_equal_weights(
            vec![ints(&[2]), ints(&[4]), ints(&[8]), ints(&[10, 6]), ints(&[8, 4])],
            int(21),
        )
        .unwrap()
    }

    fn ineq(terms: &[(usize, usize, Rational)], rhs: Rational) -> LinearInequality {
        LinearInequality::from_terms(terms.iter().map(|(i, j, c)| (VarRef::new(*i, *j), c.clone())), rhs)
    }

    /// Independent candidate generator: recursion over variables with values
    /// drawn from {0, 1, filler}, filtered by feasibility and the one-filler rule.
    fn brute_candidates(instance: &Instance) -> BTreeSet<Point> {
        let vars: Vec<VarRef> = instance.vars().collect();
        let mut out = BTreeSet::new();
        fn rec(
            instance: &Instance,
            vars: &[VarRef],
            k: usize,
            assigned: &mut Vec<(VarRef, u8)>,
            out: &mut BTreeSet<Point>,
        ) {
            if k == vars.len() {
                let fillers: Vec<_> = assigned.iter().filter(|(_, t)| *t == 2).collect();
                if fillers.len() > 1 {
                    return;
                }
                let ones: Rational = assigned
                    .iter()
                    .filter(|(_, t)| *t == 1)
                    .map(|(v, _)| instance.weight(*v).clone())
                    .sum();
                let mut p = Point::zero();
                for (v, t) in assigned.iter() {
                    if *t == 1 {
                        p.set(*v, Rational::one()).unwrap();
                    }
                }
                if let Some((v, _)) = fillers.first() {
                    let a = instance.weight(*v);
                    if a.is_zero() {
                        return;
                    }
                    let x = (instance.capacity().clone() - ones) / a;
                    if !(x.is_positive() && x < Rational::one()) {
                        return;
                    }
                    p.set(*v, x).unwrap();
                }
                if instance.is_feasible(&p) {
                    out.insert(p);
                }
                return;
            }
            for t in 0..3u8 {
                let v = vars[k];
                if t > 0 && assigned.iter().any(|(w, s)| w.group == v.group && *s > 0) {
                    continue;
                }
                assigned.push((v, t));
                rec(instance, vars, k + 1, assigned, out);
                assigned.pop();
            }
        }
        rec(instance, &vars, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn single_variable_vertices() {
        let inst = Instance::with_profits_equal_weights(vec![ints(&[2])], int(1)).unwrap();
        let vs = enumerate_candidate_vertices(&inst, DEFAULT_ENUM_LIMIT).unwrap();
        let expected = vec![
            Point::zero(),
            Point::from_entries([(VarRef::new(1, 1), ratio(1, 2))]).unwrap(),
        ];
        assert_eq!(vs.points(), expected.as_slice());
    }

    #[test]
    fn example_4_3_candidate_count_matches_brute_force() {
        let inst = ex43();
        let vs = enumerate_candidate_vertices(&inst, DEFAULT_ENUM_LIMIT).unwrap();
        let brute = brute_candidates(&inst);
        assert_eq!(vs.points().iter().cloned().collect::<BTreeSet<_>>(), brute);
        // Frozen from the brute-force enumerator above.
        assert_eq!(vs.len(), 105);
    }

    #[test]
    fn example_4_4_candidates_satisfy_the_vertex_lemma() {
        let inst = Instance::with_profits_equal_weights(
            vec![ints(&[2]), ints(&[14, 10]), ints(&[13, 9]), ints(&[9, 6])],
            int(22),
        )
        .unwrap();
        let vs = enumerate_candidate_vertices(&inst, DEFAULT_ENUM_LIMIT).unwrap();
        for p in vs.points() {
            assert!(inst.is_feasible(p));
            let fractional = p.fractional().count();
            assert!(fractional <= 1);
            if fractional == 1 {
                assert_eq!(inst.knapsack_row().lhs(p), int(22));
            }
        }
    }

    #[test]
    fn limit_is_enforced() {
        let err = enumerate_candidate_vertices(&ex43(), 10).unwrap_err();
        assert!(matches!(
            err,
            Error::ResourceLimit {
                estimated: 72,
                limit: 10
            }
        ));
    }

    #[test]
    fn maximize_small_cases() {
        let inst = ex43();
        let (v, p) = maximize_over_s(&inst, &BTreeMap::new(), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(v, int(0));
        assert_eq!(p, Point::zero());

        let single = Instance::new(vec![Group::new(ints(&[2]), ints(&[3])).unwrap()], int(1)).unwrap();
        let (v, p) = maximize_over_s(&single, &single.profit_objective(), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(v, ratio(3, 2));
        assert_eq!(p.get(VarRef::new(1, 1)), ratio(1, 2));

        let (v, p) = maximize_over_s(&inst, &inst.profit_objective(), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(v, int(21));
        assert!(inst.is_feasible(&p));
        assert_eq!(inst.objective_value(&p), int(21));
    }

    #[test]
    fn validity_examples() {
        let inst = ex43();
        let p1 = ineq(
            &[
                (1, 1, int(2)),
                (3, 1, int(8)),
                (4, 1, int(10)),
                (4, 2, int(7)),
                (5, 1, int(8)),
                (5, 2, int(5)),
            ],
            int(22),
        );
        assert!(check_validity(&inst, &p1, DEFAULT_ENUM_LIMIT).unwrap().is_valid());

        let bad = ineq(&[(1, 1, int(2))], int(1));
        let Validity::Violated(w) = check_validity(&inst, &bad, DEFAULT_ENUM_LIMIT).unwrap() else {
            panic!("2x11 <= 1 must fail");
        };
        assert_eq!(w, Point::from_entries([(VarRef::new(1, 1), int(1))]).unwrap());
        assert!(matches!(
            face_dimension(&inst, &bad, DEFAULT_ENUM_LIMIT),
            Err(Error::NotValid { .. })
        ));

        let lc = ineq(
            &[
                (2, 1, int(4)),
                (4, 1, int(10)),
                (4, 2, int(9)),
                (5, 1, int(8)),
                (5, 2, int(7)),
            ],
            int(21),
        );
        assert!(check_validity(&inst, &lc, DEFAULT_ENUM_LIMIT).unwrap().is_valid());
        assert_eq!(face_dimension(&inst, &lc, DEFAULT_ENUM_LIMIT).unwrap().dimension, 6);
    }

    #[test]
    fn face_dimensions_example_4_4() {
        let inst = Instance::with_profits_equal_weights(
            vec![ints(&[2]), ints(&[14, 10]), ints(&[13, 9]), ints(&[9, 6])],
            int(22),
        )
        .unwrap();
        let p2 = ineq(
            &[(2, 1, int(14)), (2, 2, int(13)), (3, 1, int(13)), (3, 2, int(12))],
            int(25),
        );
        assert_eq!(face_dimension(&inst, &p2, DEFAULT_ENUM_LIMIT).unwrap().dimension, 5);
        let p1 = ineq(
            &[
                (1, 1, int(2)),
                (2, 1, int(14)),
                (2, 2, int(11)),
                (3, 1, int(13)),
                (3, 2, int(10)),
            ],
            int(23),
        );
        let face = face_dimension(&inst, &p1, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(face.dimension, 6);
        assert!(face.is_facet());
    }

    #[test]
    fn trivial_inequality_gives_full_dimension() {
        let inst = ex43();
        let face = face_dimension(&inst, &LinearInequality::new(int(0)), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(face.dimension, 7);
        let slack = face_dimension(&inst, &LinearInequality::new(int(1)), DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(slack.dimension, -1);
    }

    fn random_instance() -> impl Strategy<Value = Instance> {
        (
            prop::collection::vec(prop::collection::vec((0i64..=12, 0i64..=12), 1..=3), 1..=4),
            1i64..=25,
        )
            .prop_map(|(groups, b)| {
                let groups = groups
                    .into_iter()
                    .map(|g| {
                        let (a, c): (Vec<_>, Vec<_>) = g.into_iter().map(|(a, c)| (int(a), int(c))).unzip();
                        Group::new(a, c).unwrap()
                    })
                    .collect();
                Instance::new(groups, int(b)).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn candidates_feasible_and_lemma(inst in random_instance()) {
            let vs = enumerate_candidate_vertices(&inst, DEFAULT_ENUM_LIMIT).unwrap();
            let row = inst.knapsack_row();
            for p in vs.points() {
                prop_assert!(inst.is_feasible(p));
                let frac = p.fractional().count();
                prop_assert!(frac <= 1);
                if frac == 1 {
                    prop_assert_eq!(&row.lhs(p), inst.capacity());
                }
            }
            prop_assert!(check_validity(&inst, &row, DEFAULT_ENUM_LIMIT).unwrap().is_valid());
            let tight: Vec<_> = vs.points().iter().filter(|p| row.lhs(p) == *row.rhs()).map(|p| p.to_dense(&inst)).collect();
            let expect = if tight.is_empty() { -1 } else { affine_rank(&tight).unwrap() as isize };
            prop_assert_eq!(vs.face_dimension(&inst, &row).unwrap().dimension, expect);
        }

        #[test]
        fn greedy_optimum_matches_vertex_scan(
            inst in random_instance(),
            obj in prop::collection::vec(-5i64..=15, 12),
        ) {
            let objective: BTreeMap<VarRef, Rational> = inst.vars().zip(obj).map(|(v, c)| (v, int(c))).collect();
            let (value, argmax) = maximize_over_s(&inst, &objective, DEFAULT_ENUM_LIMIT).unwrap();
            prop_assert!(inst.is_feasible(&argmax));
            let as_ineq = LinearInequality::from_terms(objective.clone(), int(0));
            prop_assert_eq!(as_ineq.lhs(&argmax), value.clone());
            let vs = enumerate_candidate_vertices(&inst, DEFAULT_ENUM_LIMIT).unwrap();
            prop_assert_eq!(vs.maximize(&as_ineq).0, value);
        }

        #[test]
        fn optimum_invariant_under_normalization(inst in random_instance()) {
            let norm = crate::model::normalize(&inst);
            let (v0, _) = maximize_over_s(&inst, &inst.profit_objective(), DEFAULT_ENUM_LIMIT).unwrap();
            let (v1, p1) = maximize_over_s(&norm.instance, &norm.instance.profit_objective(), DEFAULT_ENUM_LIMIT).unwrap();
            prop_assert_eq!(&v0, &v1);
            let back = norm.point_to_original(&p1);
            prop_assert!(inst.is_feasible(&back));
            prop_assert_eq!(inst.objective_value(&back), v0);
        }

        #[test]
        fn raising_rhs_keeps_validity(inst in random_instance(), extra in 1i64..5) {
            let mut row = inst.knapsack_row();
            row.set_rhs(row.rhs().clone() + int(extra));
            prop_assert!(check_validity(&inst, &row, DEFAULT_ENUM_LIMIT).unwrap().is_valid());
            prop_assert_eq!(face_dimension(&inst, &row, DEFAULT_ENUM_LIMIT).unwrap().dimension, -1);
        }
    }
}
