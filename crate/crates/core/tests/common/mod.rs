#![allow(dead_code)]

use ckp::model::{Group, Instance, LinearInequality, VarRef};
use ckp::oracle::pattern_count;
use ckp::Rational;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    std::fs::read_to_string(format!("{path}{name}")).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn v(i: usize, j: usize) -> VarRef {
    VarRef::new(i, j)
}

/// Builds `sum coeffs . x <= rhs` over the variables listed in `vars`, skipping zeros.
pub fn ineq(vars: &[(usize, usize)], coeffs: &[Rational], rhs: Rational) -> LinearInequality {
    assert_eq!(vars.len(), coeffs.len());
    LinearInequality::from_terms(vars.iter().zip(coeffs).map(|(&(i, j), c)| (v(i, j), c.clone())), rhs)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_groups: usize,
    pub max_slots: usize,
    pub max_data: i64,
    /// Cap on `prod (n_i + 1)`.
    pub max_patterns: u128,
}

impl Shape {
    /// Up to five groups of at most three slots, integer data up to 20.
    pub const SMALL: Shape = Shape {
        max_groups: 5,
        max_slots: 3,
        max_data: 20,
        max_patterns: u128::MAX,
    };
}

/// Random normalized instance: weights in `1..=max_data`, profits in
/// `0..=max_data`, capacity in `1..=max_data` and below the sum of the
/// heaviest slots. At least one group has two or more slots, so both
/// standing assumptions hold.
pub fn random_instance(rng: &mut impl Rng, shape: Shape) -> Instance {
    loop {
        let m = rng.gen_range(1..=shape.max_groups);
        let mut groups = Vec::with_capacity(m);
        let mut heaviest = 0i64;
        for _ in 0..m {
            let n = rng.gen_range(1..=shape.max_slots);
            let mut a: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=shape.max_data)).collect();
            a.sort_unstable_by(|x, y| y.cmp(x));
            heaviest += a[0];
            let c = (0..n).map(|_| int(rng.gen_range(0..=shape.max_data))).collect();
            groups.push(Group::new(a.into_iter().map(int).collect(), c).unwrap());
        }
        if heaviest < 2 || groups.iter().all(|g| g.len() == 1) {
            continue;
        }
        let b = rng.gen_range(1..heaviest.min(shape.max_data + 1));
        let inst = Instance::new(groups, int(b)).unwrap();
        if pattern_count(&inst) <= shape.max_patterns {
            return inst;
        }
    }
}

/// The same instance with the slots of every group shuffled.
pub fn shuffled(rng: &mut impl Rng, inst: &Instance) -> Instance {
    let groups = inst
        .groups()
        .iter()
        .map(|g| {
            let mut order: Vec<usize> = (0..g.len()).collect();
            order.shuffle(rng);
            Group::new(
                order.iter().map(|&k| g.weights()[k].clone()).collect(),
                order.iter().map(|&k| g.profits()[k].clone()).collect(),
            )
            .unwrap()
        })
        .collect();
    Instance::new(groups, inst.capacity().clone()).unwrap()
}

/// Whether some sub-multiset of `alphas` sums to `target`.
pub fn subset_sum(alphas: &[u64], target: u64) -> bool {
    let t = target as usize;
    let mut reach = vec![false; t + 1];
    reach[0] = true;
    for &a in alphas {
        let a = a as usize;
        for s in (a..=t).rev() {
            reach[s] |= reach[s - a];
        }
    }
    reach[t]
}

/// Random partition input with `2..=max_k` entries in `1..=max_alpha` and an even total of at least 4.
pub fn random_partition(rng: &mut impl Rng, max_k: usize, max_alpha: u64) -> (Vec<u64>, u64) {
    loop {
        let k = rng.gen_range(2..=max_k);
        let alphas: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=max_alpha)).collect();
        let total: u64 = alphas.iter().sum();
        if total.is_multiple_of(2) && total >= 4 {
            return (alphas, total / 2);
        }
    }
}
