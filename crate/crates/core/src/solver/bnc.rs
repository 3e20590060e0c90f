use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_traits::{Signed, Zero};

use super::{solve_lp, LpProblem, LpResult};
use crate::cuts::{Family, GeneratedCut};
use crate::error::Result;
use crate::format::write_inequality;
use crate::model::{normalize, validate_assumptions, AssumptionReport, Instance, Point, VarRef};
use crate::oracle::DEFAULT_ENUM_LIMIT;
use crate::separation::{separate_exact, separate_greedy};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationMode {
    Greedy,
    /// Greedy first, exhaustive search when greedy finds nothing.
    GreedyWithExactFallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub families: Vec<Family>,
    pub max_cuts_per_node: usize,
    pub node_limit: u64,
    pub separation: SeparationMode,
    /// Pattern budget for exact separation.
    pub enum_limit: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            families: Family::ALL.to_vec(),
            max_cuts_per_node: 10,
            node_limit: 100_000,
            separation: SeparationMode::Greedy,
            enum_limit: DEFAULT_ENUM_LIMIT,
        }
    }
}

impl SolveConfig {
    pub fn without_cuts() -> Self {
        SolveConfig {
            families: Vec::new(),
            ..SolveConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NodeLimit,
}

/// One solved node, in processing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTrace {
    pub id: u64,
    pub parent: Option<u64>,
    /// Bound inherited from the parent's final LP.
    pub parent_bound: Option<Rational>,
    /// Final LP value at this node, `None` if the LP was infeasible.
    pub lp_bound: Option<Rational>,
    /// Every LP solved at the node carried an exactly verified dual certificate.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub value: Rational,
    /// In input coordinates.
    pub point: Point,
    pub best_bound: Rational,
    pub nodes: u64,
    pub cuts_per_family: BTreeMap<Family, usize>,
    pub lp_pivots: u64,
    /// Cuts added, in input coordinates, in the order they were found.
    pub cuts: Vec<GeneratedCut>,
    pub trace: Vec<NodeTrace>,
    pub assumptions: AssumptionReport,
}

struct Node {
    id: u64,
    parent: Option<u64>,
    bound: Option<Rational>,
    forced: BTreeSet<VarRef>,
}

/// Heap entry: larger bound first, then earlier id.
struct Queued(Node);

impl Queued {
    fn key(&self) -> (Option<&Rational>, Reverse<u64>) {
        (self.0.bound.as_ref(), Reverse(self.0.id))
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Keeps, per group, the entry with the largest profit contribution.
fn round_to_s(instance: &Instance, point: &Point) -> Point {
    let mut best: BTreeMap<usize, (Rational, VarRef)> = BTreeMap::new();
    for (v, x) in point.iter() {
        let gain = instance.profit(*v).clone() * x;
        match best.get(&v.group) {
            Some((g, _)) if *g >= gain => {}
            _ => {
                best.insert(v.group, (gain, *v));
            }
        }
    }
    let mut out = Point::zero();
    for (_, v) in best.values() {
        out.set(*v, point.get(*v)).expect("entry copied from a valid point");
    }
    out
}

/// Group with at least two positive entries and the largest total, smallest index on ties.
fn branching_group(point: &Point) -> Option<usize> {
    let mut per_group: BTreeMap<usize, (usize, Rational)> = BTreeMap::new();
    for (v, x) in point.iter() {
        let e = per_group.entry(v.group).or_insert((0, Rational::zero()));
        e.0 += 1;
        e.1 += x;
    }
    let mut best: Option<(usize, Rational)> = None;
    for (g, (count, total)) in per_group {
        if count >= 2 && best.as_ref().is_none_or(|(_, t)| total > *t) {
            best = Some((g, total));
        }
    }
    best.map(|(g, _)| g)
}

/// Exact optimum of `max c.x` over the complementarity knapsack set.
///
/// Works on the normalized instance; the reported point and cuts are mapped
/// back to input slots. Stops with [`SolveStatus::NodeLimit`] once
/// `config.node_limit` nodes have been solved with open nodes remaining.
pub fn branch_and_cut(instance: &Instance, config: &SolveConfig) -> Result<SolveReport> {
    let norm = normalize(instance);
    let inst = &norm.instance;
    let assumptions = validate_assumptions(inst);
    let mut report = SolveReport {
        status: SolveStatus::Optimal,
        value: Rational::zero(),
        point: Point::zero(),
        best_bound: Rational::zero(),
        nodes: 0,
        cuts_per_family: BTreeMap::new(),
        lp_pivots: 0,
        cuts: Vec::new(),
        trace: Vec::new(),
        assumptions: assumptions.clone(),
    };
    if let Some((value, point)) = &assumptions.trivial_optimum {
        report.value = value.clone();
        report.best_bound = value.clone();
        report.point = norm.point_to_original(point);
        return Ok(report);
    }
    if !assumptions.assumption1_holds {
        // All groups are singletons: the LP relaxation is the problem.
        match solve_lp(&LpProblem::relaxation(inst))? {
            LpResult::Optimal {
                value, point, pivots, ..
            } => {
                report.lp_pivots = pivots as u64;
                report.best_bound = value.clone();
                report.value = value;
                report.point = norm.point_to_original(&point);
            }
            LpResult::Infeasible { .. } => unreachable!("the zero point is feasible"),
        }
        return Ok(report);
    }

    let mut lp = LpProblem::relaxation(inst);
    let mut pool: BTreeSet<String> = BTreeSet::new();
    let mut incumbent = (Rational::zero(), Point::zero());
    let mut queue = BinaryHeap::new();
    let mut next_id = 0u64;
    queue.push(Queued(Node {
        id: next_id,
        parent: None,
        bound: None,
        forced: BTreeSet::new(),
    }));
    next_id += 1;

    while let Some(Queued(node)) = queue.pop() {
        if node.bound.as_ref().is_some_and(|b| *b <= incumbent.0) {
            continue;
        }
        if report.nodes >= config.node_limit {
            queue.push(Queued(node));
            break;
        }
        report.nodes += 1;
        lp.forced_zero = node.forced.clone();
        let mut trace = NodeTrace {
            id: node.id,
            parent: node.parent,
            parent_bound: node.bound.clone(),
            lp_bound: None,
            certified: true,
        };
        let mut cuts_here = 0;
        let (value, point) = loop {
            let (value, point) = match solve_lp(&lp)? {
                LpResult::Optimal {
                    value,
                    point,
                    certificate,
                    pivots,
                } => {
                    report.lp_pivots += pivots as u64;
                    trace.certified &= certificate.verified;
                    (value, point)
                }
                LpResult::Infeasible { pivots } => {
                    report.lp_pivots += pivots as u64;
                    break (None, Point::zero());
                }
            };
            if value <= incumbent.0 || point.satisfies_complementarity() || cuts_here >= config.max_cuts_per_node {
                break (Some(value), point);
            }
            let mut found = separate_greedy(inst, &point, &config.families)?.outcome;
            if found.is_none() && config.separation == SeparationMode::GreedyWithExactFallback {
                found = separate_exact(inst, &point, &config.families, config.enum_limit)?.outcome;
            }
            let Some(found) = found else {
                break (Some(value), point);
            };
            if !pool.insert(write_inequality(&found.cut.inequality)) {
                break (Some(value), point);
            }
            *report.cuts_per_family.entry(found.cut.family).or_default() += 1;
            lp.rows.push(found.cut.inequality.clone());
            report.cuts.push(found.cut.to_original(&norm));
            cuts_here += 1;
        };
        trace.lp_bound = value.clone();
        report.trace.push(trace);
        let Some(value) = value else { continue };
        if value <= incumbent.0 {
            continue;
        }
        if point.satisfies_complementarity() {
            incumbent = (value, point);
            continue;
        }
        let rounded = round_to_s(inst, &point);
        let rounded_value = inst.objective_value(&rounded);
        if rounded_value > incumbent.0 {
            incumbent = (rounded_value, rounded);
        }
        let group = branching_group(&point).expect("complementarity is violated somewhere");
        let first = point
            .support()
            .find(|v| v.group == group)
            .expect("group has positive entries")
            .slot;
        for keep_low in [false, true] {
            let mut forced = node.forced.clone();
            for j in 1..=inst.group_len(group) {
                if (j <= first) != keep_low {
                    forced.insert(VarRef::new(group, j));
                }
            }
            queue.push(Queued(Node {
                id: next_id,
                parent: Some(node.id),
                bound: Some(value.clone()),
                forced,
            }));
            next_id += 1;
        }
    }

    let open_bound = queue
        .into_iter()
        .filter_map(|q| q.0.bound)
        .filter(|b| *b > incumbent.0)
        .max();
    report.status = if open_bound.is_some() {
        SolveStatus::NodeLimit
    } else {
        SolveStatus::Optimal
    };
    report.best_bound = open_bound.unwrap_or_else(|| incumbent.0.clone());
    debug_assert!(!incumbent.0.is_negative());
    report.value = incumbent.0;
    report.point = norm.point_to_original(&incumbent.1);
    Ok(report)
}
