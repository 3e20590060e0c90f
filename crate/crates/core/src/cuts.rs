//! Covers, packs and the five inequality families built from them.
//!
//! | family    | item set | extra indices            |
//! |-----------|----------|--------------------------|
//! | `lcover1` | cover    | lifting witness `(i',j')`|
//! | `lcover2` | cover    | special item `i'j'`      |
//! | `pack1`   | pack     |                          |
//! | `pack2`   | pack     | pivot `i*j*`             |
//! | `pack3`   | pack     | pivot `i*j*`, tilt `i'`  |
//!
//! Every generator expects a normalized instance (weights non-increasing
//! within each group) and refuses item sets that miss the family's
//! hypotheses. `facet_guaranteed` is set only when the known sufficient
//! condition for a facet holds; otherwise the facet status is unknown.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Instance, LinearInequality, Normalization, VarRef};
use crate::oracle::{check_limit, PatternWalker};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    LiftedCover1,
    LiftedCover2,
    Pack1,
    Pack2,
    Pack3,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Pack1,
        Family::Pack2,
        Family::Pack3,
        Family::LiftedCover1,
        Family::LiftedCover2,
    ];

    /// Short token used on the command line.
    pub fn token(self) -> &'static str {
        match self {
            Family::LiftedCover1 => "lcover1",
            Family::LiftedCover2 => "lcover2",
            Family::Pack1 => "pack1",
            Family::Pack2 => "pack2",
            Family::Pack3 => "pack3",
        }
    }

    pub fn is_cover_family(self) -> bool {
        matches!(self, Family::LiftedCover1 | Family::LiftedCover2)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::LiftedCover1 => "lifted-cover-1",
            Family::LiftedCover2 => "lifted-cover-2",
            Family::Pack1 => "pack-1",
            Family::Pack2 => "pack-2",
            Family::Pack3 => "pack-3",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.token() == s)
            .ok_or_else(|| format!("unknown family `{s}` (expected pack1, pack2, pack3, lcover1 or lcover2)"))
    }
}

/// At most one variable per group, sorted by group, with cached weight sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ItemSet {
    items: Vec<VarRef>,
    weight: Rational,
}

impl ItemSet {
    pub fn new(instance: &Instance, items: impl IntoIterator<Item = VarRef>) -> Result<Self> {
        let mut items: Vec<VarRef> = items.into_iter().collect();
        if items.is_empty() {
            return Err(Error::precondition("item set is empty"));
        }
        items.sort();
        for v in &items {
            instance.check_var(*v)?;
        }
        if let Some(w) = items.windows(2).find(|w| w[0].group == w[1].group) {
            return Err(Error::precondition(format!(
                "items {} and {} share group {}",
                w[0], w[1], w[0].group
            )));
        }
        let weight = items.iter().map(|v| instance.weight(*v)).sum();
        Ok(Self { items, weight })
    }

    pub fn items(&self) -> &[VarRef] {
        &self.items
    }

    /// `s`, the total weight of the items.
    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `M_T`.
    pub fn groups(&self) -> BTreeSet<usize> {
        self.items.iter().map(|v| v.group).collect()
    }

    pub fn item_in_group(&self, group: usize) -> Option<VarRef> {
        self.items
            .binary_search_by(|v| v.group.cmp(&group))
            .ok()
            .map(|k| self.items[k])
    }

    pub fn contains(&self, v: VarRef) -> bool {
        self.item_in_group(v.group) == Some(v)
    }

    /// Removes the item of `group`; `None` if that would leave the set empty.
    pub fn without_group(&self, instance: &Instance, group: usize) -> Option<ItemSet> {
        let rest: Vec<VarRef> = self.items.iter().copied().filter(|v| v.group != group).collect();
        (!rest.is_empty()).then(|| ItemSet::new(instance, rest).expect("subset of a valid item set"))
    }

    /// Items whose group has more than one variable (`M_T - M_0`).
    fn switchable<'a>(&'a self, instance: &'a Instance) -> impl Iterator<Item = VarRef> + 'a {
        self.items.iter().copied().filter(|v| !instance.is_singleton(v.group))
    }

    fn display_items(&self) -> String {
        self.items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
    }
}

pub fn is_cover(instance: &Instance, set: &ItemSet) -> bool {
    set.weight > *instance.capacity()
}

pub fn is_pack(instance: &Instance, set: &ItemSet) -> bool {
    set.weight < *instance.capacity()
}

/// Every item sits in its group's last slot, and moving any non-singleton item
/// one slot up (to the next heavier variable) overflows the capacity.
pub fn is_maximal_switching_pack(instance: &Instance, set: &ItemSet) -> bool {
    if !is_pack(instance, set) {
        return false;
    }
    let b = instance.capacity();
    set.items.iter().all(|v| v.slot == instance.group_len(v.group))
        && set.switchable(instance).all(|v| {
            let up = VarRef::new(v.group, v.slot - 1);
            set.weight.clone() - instance.weight(v) + instance.weight(up) > *b
        })
}

/// Where a generated cut came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub items: ItemSet,
    /// `i*j*` for the pack-2 and pack-3 families.
    pub pivot: Option<VarRef>,
    /// `i'` for the pack-3 family.
    pub tilt: Option<usize>,
    /// `i'j'` for the lifted-cover-2 family.
    pub special: Option<VarRef>,
    /// Lexicographically smallest `(i', j')` satisfying the lifted-cover-1 hypothesis.
    pub witness: Option<VarRef>,
}

impl Provenance {
    fn new(items: ItemSet) -> Self {
        Self {
            items,
            pivot: None,
            tilt: None,
            special: None,
            witness: None,
        }
    }

    /// Shortlex order on the item list, then the auxiliary indices.
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.items
            .len()
            .cmp(&other.items.len())
            .then_with(|| self.items.items.cmp(&other.items.items))
            .then_with(|| self.pivot.cmp(&other.pivot))
            .then_with(|| self.tilt.cmp(&other.tilt))
            .then_with(|| self.special.cmp(&other.special))
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "items {}", self.items.display_items())?;
        if let Some(p) = self.pivot {
            write!(f, " pivot {p}")?;
        }
        if let Some(t) = self.tilt {
            write!(f, " tilt {t}")?;
        }
        if let Some(s) = self.special {
            write!(f, " special {s}")?;
        }
        if let Some(w) = self.witness {
            write!(f, " witness {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratedCut {
    pub inequality: LinearInequality,
    pub family: Family,
    pub provenance: Provenance,
    pub facet_guaranteed: bool,
}

impl GeneratedCut {
    /// The same cut with every variable renamed into input slots.
    pub fn to_original(&self, norm: &Normalization) -> GeneratedCut {
        let map = |v: VarRef| norm.to_original_var(v);
        let p = &self.provenance;
        GeneratedCut {
            inequality: norm.inequality_to_original(&self.inequality),
            family: self.family,
            provenance: Provenance {
                items: ItemSet {
                    items: p.items.items.iter().map(|v| map(*v)).collect(),
                    weight: p.items.weight.clone(),
                },
                pivot: p.pivot.map(map),
                tilt: p.tilt,
                special: p.special.map(map),
                witness: p.witness.map(map),
            },
            facet_guaranteed: self.facet_guaranteed,
        }
    }
}

/// Family-specific data needed to produce coefficients on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Recipe {
    Pack1,
    Pack2 {
        pivot_weight: Rational,
        denom: Rational,
    },
    Pack3 {
        pivot_weight: Rational,
        denom: Rational,
        lambda: Rational,
    },
    /// Per item: `b - (s - a_{i r_i})`.
    Cover1 {
        thresholds: Vec<Rational>,
    },
    /// `b - T` for the special group and, per other item, its denominator.
    Cover2 {
        special_threshold: Rational,
        denoms: Vec<Rational>,
    },
}

/// A fully checked member of one family. Coefficients can be evaluated
/// lazily, which separation uses to score candidates on a point's support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSpec {
    family: Family,
    provenance: Provenance,
    facet_guaranteed: bool,
    slack: Rational,
    rhs: Rational,
    recipe: Recipe,
}

impl CutSpec {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn facet_guaranteed(&self) -> bool {
        self.facet_guaranteed
    }

    pub fn rhs(&self) -> &Rational {
        &self.rhs
    }

    /// Coefficient of `v` in the cut.
    pub fn coefficient(&self, instance: &Instance, v: VarRef) -> Rational {
        let items = &self.provenance.items;
        let Ok(pos) = items.items.binary_search_by(|w| w.group.cmp(&v.group)) else {
            return Rational::zero();
        };
        let member = items.items[pos];
        let a = instance.weight(v);
        let switchable = !instance.is_singleton(v.group);
        match &self.recipe {
            Recipe::Pack1 => {
                if member == v && switchable {
                    a.clone() + &self.slack
                } else {
                    a.clone()
                }
            }
            Recipe::Pack2 { pivot_weight, denom } => {
                let pivot = self.provenance.pivot.expect("pack-2 pivot");
                if v.group == pivot.group {
                    pivot_coefficient(v, pivot, a, pivot_weight, denom)
                } else if member == v && switchable {
                    a.clone() + &self.slack
                } else {
                    a.clone()
                }
            }
            Recipe::Pack3 {
                pivot_weight,
                denom,
                lambda,
            } => {
                let pivot = self.provenance.pivot.expect("pack-3 pivot");
                let tilt = self.provenance.tilt.expect("pack-3 tilt");
                if v.group == tilt {
                    pivot_weight.clone() * a / denom
                } else if v.group == pivot.group {
                    pivot_coefficient(v, pivot, a, pivot_weight, denom)
                } else if member == v && switchable {
                    a.clone() + self.slack.clone() * (Rational::one() + lambda)
                } else {
                    a.clone()
                }
            }
            Recipe::Cover1 { thresholds } => {
                if v.slot < member.slot {
                    instance.weight(member).clone()
                } else {
                    a.clone().max(thresholds[pos].clone())
                }
            }
            Recipe::Cover2 {
                special_threshold,
                denoms,
            } => {
                let special = self.provenance.special.expect("lifted-cover-2 special item");
                if v.group == special.group {
                    a.clone().max(special_threshold.clone())
                } else if v.slot <= member.slot {
                    let base = instance.weight(member);
                    let scaled = a.clone() / &denoms[pos];
                    if scaled > Rational::one() {
                        base.clone() * scaled
                    } else {
                        base.clone()
                    }
                } else {
                    a.clone()
                }
            }
        }
    }

    /// Builds the sparse inequality over every variable of the item set's groups.
    pub fn materialize(&self, instance: &Instance) -> GeneratedCut {
        let mut ineq = LinearInequality::new(self.rhs.clone());
        for item in self.provenance.items.items() {
            for v in instance.group_vars(item.group) {
                ineq.add_term(v, self.coefficient(instance, v));
            }
        }
        GeneratedCut {
            inequality: ineq,
            family: self.family,
            provenance: self.provenance.clone(),
            facet_guaranteed: self.facet_guaranteed,
        }
    }
}

/// `a*` on the pivot, `a* * max(1, a_{i*j} / denom)` on the other slots of its group.
fn pivot_coefficient(v: VarRef, pivot: VarRef, a: &Rational, pivot_weight: &Rational, denom: &Rational) -> Rational {
    if v == pivot {
        return pivot_weight.clone();
    }
    let scaled = a.clone() / denom;
    if scaled > Rational::one() {
        pivot_weight.clone() * scaled
    } else {
        pivot_weight.clone()
    }
}

fn require_normalized(instance: &Instance) -> Result<()> {
    if instance.is_normalized() {
        Ok(())
    } else {
        Err(Error::precondition(
            "instance is not normalized (weights must be non-increasing within each group)",
        ))
    }
}

fn excess_groups(instance: &Instance, set: &ItemSet) -> usize {
    set.switchable(instance).count()
}

fn pack1_spec(instance: &Instance, pack: &ItemSet) -> Result<CutSpec> {
    if !is_pack(instance, pack) {
        return Err(Error::precondition(format!(
            "item set has weight {} which is not below b = {}",
            pack.weight,
            instance.capacity()
        )));
    }
    let b = instance.capacity();
    let slack = b.clone() - &pack.weight;
    let k = excess_groups(instance, pack) as i64;
    // k = 0 gives rhs = s, still valid.
    let rhs = b.clone() + slack.clone() * Rational::from_integer((k - 1).into());
    let msp = is_maximal_switching_pack(instance, pack);
    let touches_m0 = pack.items.iter().any(|v| instance.is_singleton(v.group));
    Ok(CutSpec {
        family: Family::Pack1,
        provenance: Provenance::new(pack.clone()),
        facet_guaranteed: msp && touches_m0 && k >= 1,
        slack,
        rhs,
        recipe: Recipe::Pack1,
    })
}

/// Shared checks for the pivoted pack families. Returns `(slack, k, a*, a* + b - s)`.
fn pivot_checks(instance: &Instance, pack: &ItemSet, pivot: VarRef) -> Result<(Rational, usize, Rational, Rational)> {
    if !is_pack(instance, pack) {
        return Err(Error::precondition(format!(
            "item set has weight {} which is not below b = {}",
            pack.weight,
            instance.capacity()
        )));
    }
    let k = excess_groups(instance, pack);
    if k < 2 {
        return Err(Error::precondition(format!(
            "pack has {k} non-singleton groups, at least 2 are required"
        )));
    }
    if !pack.contains(pivot) {
        return Err(Error::precondition(format!("pivot {pivot} is not an item of the pack")));
    }
    if instance.is_singleton(pivot.group) {
        return Err(Error::precondition(format!(
            "pivot group {} is a singleton group",
            pivot.group
        )));
    }
    if pivot.slot != instance.group_len(pivot.group) {
        return Err(Error::precondition(format!(
            "pivot {pivot} is not the last slot of its group"
        )));
    }
    let slack = instance.capacity().clone() - &pack.weight;
    let pivot_weight = instance.weight(pivot).clone();
    let denom = pivot_weight.clone() + &slack;
    Ok((slack, k, pivot_weight, denom))
}

fn pack2_spec(instance: &Instance, pack: &ItemSet, pivot: VarRef) -> Result<CutSpec> {
    let (slack, k, pivot_weight, denom) = pivot_checks(instance, pack, pivot)?;
    let rhs = instance.capacity().clone() + slack.clone() * Rational::from_integer((k as i64 - 2).into());
    let mut provenance = Provenance::new(pack.clone());
    provenance.pivot = Some(pivot);
    Ok(CutSpec {
        family: Family::Pack2,
        provenance,
        facet_guaranteed: is_maximal_switching_pack(instance, pack),
        slack,
        rhs,
        recipe: Recipe::Pack2 { pivot_weight, denom },
    })
}

fn pack3_spec(instance: &Instance, pack: &ItemSet, pivot: VarRef, tilt: usize) -> Result<CutSpec> {
    let (slack, k, pivot_weight, denom) = pivot_checks(instance, pack, pivot)?;
    if pack.item_in_group(tilt).is_none() {
        return Err(Error::precondition(format!(
            "tilt group {tilt} is not covered by the pack"
        )));
    }
    if !instance.is_singleton(tilt) {
        return Err(Error::precondition(format!(
            "tilt group {tilt} is not a singleton group"
        )));
    }
    let tilt_weight = instance.weight(VarRef::new(tilt, 1));
    let lambda = tilt_weight.clone() / &denom;
    let rhs = instance.capacity().clone()
        + slack.clone() * Rational::from_integer((k as i64 - 2).into()) * (Rational::one() + &lambda);
    let facet = pack
        .without_group(instance, tilt)
        .is_some_and(|rest| is_maximal_switching_pack(instance, &rest));
    let mut provenance = Provenance::new(pack.clone());
    provenance.pivot = Some(pivot);
    provenance.tilt = Some(tilt);
    Ok(CutSpec {
        family: Family::Pack3,
        provenance,
        facet_guaranteed: facet,
        slack,
        rhs,
        recipe: Recipe::Pack3 {
            pivot_weight,
            denom,
            lambda,
        },
    })
}

fn cover1_spec(instance: &Instance, cover: &ItemSet) -> Result<CutSpec> {
    if !is_cover(instance, cover) {
        return Err(Error::precondition(format!(
            "item set has weight {} which does not exceed b = {}",
            cover.weight,
            instance.capacity()
        )));
    }
    let b = instance.capacity();
    // Lexicographically smallest (i', j') with r_i' < j' and
    // s - a_{i' r_i'} + a_{i'j'} < b.
    let witness = cover.items.iter().find_map(|r| {
        let others = cover.weight.clone() - instance.weight(*r);
        (r.slot + 1..=instance.group_len(r.group))
            .map(|j| VarRef::new(r.group, j))
            .find(|w| others.clone() + instance.weight(*w) < *b)
    });
    let Some(witness) = witness else {
        return Err(Error::precondition("lifting condition violated"));
    };
    let thresholds = cover
        .items
        .iter()
        .map(|r| b.clone() - (cover.weight.clone() - instance.weight(*r)))
        .collect();
    let mut provenance = Provenance::new(cover.clone());
    provenance.witness = Some(witness);
    Ok(CutSpec {
        family: Family::LiftedCover1,
        facet_guaranteed: cover.items.iter().all(|r| r.slot == 1),
        provenance,
        slack: Rational::zero(),
        rhs: b.clone(),
        recipe: Recipe::Cover1 { thresholds },
    })
}

fn cover2_spec(instance: &Instance, cover: &ItemSet, special: VarRef) -> Result<CutSpec> {
    if !is_cover(instance, cover) {
        return Err(Error::precondition(format!(
            "item set has weight {} which does not exceed b = {}",
            cover.weight,
            instance.capacity()
        )));
    }
    if !cover.contains(special) {
        return Err(Error::precondition(format!(
            "special item {special} is not in the cover"
        )));
    }
    let last = instance.group_len(special.group);
    if special.slot >= last {
        return Err(Error::precondition(format!(
            "special item {special} must not be the last slot of its group"
        )));
    }
    let b = instance.capacity();
    let others = cover.weight.clone() - instance.weight(special);
    let last_weight = instance.weight(VarRef::new(special.group, last));
    if others.clone() + last_weight >= *b {
        return Err(Error::precondition(format!(
            "lifting condition violated: {} + {} is not below b = {b}",
            others, last_weight
        )));
    }
    let denoms = cover
        .items
        .iter()
        .map(|t| b.clone() - (others.clone() - instance.weight(*t)) - last_weight)
        .collect();
    let facet = cover
        .items
        .iter()
        .filter(|t| t.group != special.group)
        .all(|t| t.slot == instance.group_len(t.group));
    let mut provenance = Provenance::new(cover.clone());
    provenance.special = Some(special);
    Ok(CutSpec {
        family: Family::LiftedCover2,
        facet_guaranteed: facet,
        provenance,
        slack: Rational::zero(),
        rhs: b.clone(),
        recipe: Recipe::Cover2 {
            special_threshold: b.clone() - others,
            denoms,
        },
    })
}

/// Checks the hypotheses of `family` for the given item set and indices and
/// returns the lazily evaluated cut. Unused indices must be `None`.
pub fn spec_for(
    instance: &Instance,
    family: Family,
    items: &ItemSet,
    pivot: Option<VarRef>,
    tilt: Option<usize>,
    special: Option<VarRef>,
) -> Result<CutSpec> {
    require_normalized(instance)?;
    let missing = |what: &str| Error::precondition(format!("{family} needs {what}"));
    match family {
        Family::Pack1 => pack1_spec(instance, items),
        Family::Pack2 => pack2_spec(instance, items, pivot.ok_or_else(|| missing("a pivot"))?),
        Family::Pack3 => pack3_spec(
            instance,
            items,
            pivot.ok_or_else(|| missing("a pivot"))?,
            tilt.ok_or_else(|| missing("a tilt group"))?,
        ),
        Family::LiftedCover1 => cover1_spec(instance, items),
        Family::LiftedCover2 => cover2_spec(instance, items, special.ok_or_else(|| missing("a special item"))?),
    }
}

/// Pack inequality over all variables of the pack's groups, with the in-pack
/// coefficients of non-singleton groups raised by `b - s`.
pub fn pack_inequality_1(instance: &Instance, pack: &ItemSet) -> Result<GeneratedCut> {
    require_normalized(instance)?;
    Ok(pack1_spec(instance, pack)?.materialize(instance))
}

/// Pivoted pack inequality: the pivot group keeps `a_{i*j*}` and scales its
/// heavier slots by `max(1, a_{i*j} / (a_{i*j*} + b - s))`.
pub fn pack_inequality_2(instance: &Instance, pack: &ItemSet, pivot: VarRef) -> Result<GeneratedCut> {
    require_normalized(instance)?;
    Ok(pack2_spec(instance, pack, pivot)?.materialize(instance))
}

/// Pivoted pack inequality tilted around the singleton group `tilt`.
pub fn pack_inequality_3(instance: &Instance, pack: &ItemSet, pivot: VarRef, tilt: usize) -> Result<GeneratedCut> {
    require_normalized(instance)?;
    Ok(pack3_spec(instance, pack, pivot, tilt)?.materialize(instance))
}

/// Sequentially lifted cover inequality; `r_i` is the slot of each cover item.
pub fn lifted_cover_inequality_1(instance: &Instance, cover: &ItemSet) -> Result<GeneratedCut> {
    require_normalized(instance)?;
    Ok(cover1_spec(instance, cover)?.materialize(instance))
}

/// Lifted cover inequality around the special item `i'j'`; `t_i` is the slot
/// of every other cover item.
pub fn lifted_cover_inequality_2(instance: &Instance, cover: &ItemSet, special: VarRef) -> Result<GeneratedCut> {
    require_normalized(instance)?;
    Ok(cover2_spec(instance, cover, special)?.materialize(instance))
}

/// Applies the tilting steps to a pack-2 cut `(pack, pivot)`:
/// the `x_{i'1}` coefficient loses `(b-s) * a_{i'1} / (a_{i*j*} + b - s)`,
/// every pack item of a non-singleton group other than the pivot gains the
/// same amount, and the `(|M_P - M_0| - 2)(b - s)` part of the right-hand side
/// is scaled by `1 + a_{i'1} / (a_{i*j*} + b - s)`.
pub fn tilt_pack_inequality(
    instance: &Instance,
    pack: &ItemSet,
    pivot: VarRef,
    tilt: usize,
    pivoted: &LinearInequality,
) -> Result<LinearInequality> {
    let (slack, k, _, denom) = pivot_checks(instance, pack, pivot)?;
    let tilt_var = VarRef::new(tilt, 1);
    if !pack.contains(tilt_var) || !instance.is_singleton(tilt) {
        return Err(Error::precondition(format!(
            "tilt group {tilt} is not a singleton group of the pack"
        )));
    }
    let lambda = instance.weight(tilt_var).clone() / &denom;
    let shift = slack.clone() * &lambda;
    let mut out = pivoted.clone();
    out.add_term(tilt_var, -shift.clone());
    for v in pack.switchable(instance).filter(|v| v.group != pivot.group) {
        out.add_term(v, shift.clone());
    }
    let excess = slack * Rational::from_integer((k as i64 - 2).into());
    let base = pivoted.rhs().clone() - &excess;
    out.set_rhs(base + excess * (Rational::one() + lambda));
    Ok(out)
}

/// All maximal switching packs, in shortlex order of their group sets.
pub fn enumerate_maximal_switching_packs(instance: &Instance, limit: u64) -> Result<Vec<ItemSet>> {
    require_normalized(instance)?;
    let m = instance.num_groups();
    check_limit(1u128.checked_shl(m as u32).unwrap_or(u128::MAX), limit)?;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << m) {
        let items = (0..m)
            .filter(|g| mask >> g & 1 == 1)
            .map(|g| VarRef::new(g + 1, instance.group_len(g + 1)));
        let set = ItemSet::new(instance, items)?;
        if is_maximal_switching_pack(instance, &set) {
            out.push(set);
        }
    }
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.items.cmp(&y.items)));
    Ok(out)
}

/// Calls `f` with every admissible member of `families`: every one-slot-per-group
/// item set paired with every admissible auxiliary index. Visiting order is the
/// lexicographic order of support patterns, then family, then indices.
pub fn for_each_admissible(
    instance: &Instance,
    families: &[Family],
    limit: u64,
    mut f: impl FnMut(&CutSpec),
) -> Result<u128> {
    require_normalized(instance)?;
    let walker = PatternWalker::full(instance);
    let count = walker.count();
    check_limit(count, limit)?;
    let want = |fam: Family| families.contains(&fam);
    let b = instance.capacity().clone();
    walker.for_each(|pattern| {
        let items: Vec<VarRef> = pattern
            .iter()
            .enumerate()
            .filter(|(_, &j)| j != 0)
            .map(|(g, &j)| VarRef::new(g + 1, j))
            .collect();
        if items.is_empty() {
            return;
        }
        let set = ItemSet::new(instance, items).expect("pattern is a valid item set");
        match set.weight.cmp(&b) {
            Ordering::Greater => {
                if want(Family::LiftedCover1) {
                    if let Ok(spec) = cover1_spec(instance, &set) {
                        f(&spec);
                    }
                }
                if want(Family::LiftedCover2) {
                    for &special in &set.items {
                        if let Ok(spec) = cover2_spec(instance, &set, special) {
                            f(&spec);
                        }
                    }
                }
            }
            Ordering::Less => {
                if want(Family::Pack1) {
                    f(&pack1_spec(instance, &set).expect("pack"));
                }
                if excess_groups(instance, &set) < 2 {
                    return;
                }
                let pivots: Vec<VarRef> = set
                    .switchable(instance)
                    .filter(|v| v.slot == instance.group_len(v.group))
                    .collect();
                if want(Family::Pack2) {
                    for &p in &pivots {
                        f(&pack2_spec(instance, &set, p).expect("admissible pivot"));
                    }
                }
                if want(Family::Pack3) {
                    for &p in &pivots {
                        for tilt in set.items.iter().filter(|v| instance.is_singleton(v.group)) {
                            f(&pack3_spec(instance, &set, p, tilt.group).expect("admissible tilt"));
                        }
                    }
                }
            }
            Ordering::Equal => {}
        }
    });
    Ok(count)
}

/// The members of `family` whose facet condition can hold, built from the
/// structured sets the facet conditions talk about:
/// maximal switching packs for the pack families, first-slot covers for
/// `lcover1`, and last-slot covers around a special item for `lcover2`.
pub fn facet_candidates(instance: &Instance, family: Family, limit: u64) -> Result<Vec<GeneratedCut>> {
    require_normalized(instance)?;
    let m = instance.num_groups();
    let subsets = 1u128.checked_shl(m as u32).unwrap_or(u128::MAX);
    check_limit(subsets.saturating_mul(instance.dimension() as u128), limit)?;
    let mut out = Vec::new();
    match family {
        Family::Pack1 => {
            for pack in enumerate_maximal_switching_packs(instance, limit)? {
                out.push(pack_inequality_1(instance, &pack)?);
            }
        }
        Family::Pack2 => {
            for pack in enumerate_maximal_switching_packs(instance, limit)? {
                if excess_groups(instance, &pack) < 2 {
                    continue;
                }
                for pivot in pack.switchable(instance).collect::<Vec<_>>() {
                    out.push(pack_inequality_2(instance, &pack, pivot)?);
                }
            }
        }
        Family::Pack3 => {
            for base in enumerate_maximal_switching_packs(instance, limit)? {
                if excess_groups(instance, &base) < 2 {
                    continue;
                }
                for tilt in instance.m0() {
                    if base.item_in_group(tilt).is_some() {
                        continue;
                    }
                    let pack = ItemSet::new(instance, base.items.iter().copied().chain([VarRef::new(tilt, 1)]))?;
                    if !is_pack(instance, &pack) {
                        continue;
                    }
                    for pivot in pack.switchable(instance).collect::<Vec<_>>() {
                        out.push(pack_inequality_3(instance, &pack, pivot, tilt)?);
                    }
                }
            }
        }
        Family::LiftedCover1 => {
            for mask in 1u64..(1u64 << m) {
                let cover = ItemSet::new(
                    instance,
                    (0..m).filter(|g| mask >> g & 1 == 1).map(|g| VarRef::new(g + 1, 1)),
                )?;
                if let Ok(spec) = cover1_spec(instance, &cover) {
                    out.push(spec.materialize(instance));
                }
            }
        }
        Family::LiftedCover2 => {
            for mask in 1u64..(1u64 << m) {
                let groups: Vec<usize> = (0..m).filter(|g| mask >> g & 1 == 1).map(|g| g + 1).collect();
                for &sg in &groups {
                    for sj in 1..instance.group_len(sg) {
                        let special = VarRef::new(sg, sj);
                        let items = groups.iter().map(|&g| {
                            if g == sg {
                                special
                            } else {
                                VarRef::new(g, instance.group_len(g))
                            }
                        });
                        let cover = ItemSet::new(instance, items)?;
                        if let Ok(spec) = cover2_spec(instance, &cover, special) {
                            out.push(spec.materialize(instance));
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| x.provenance.cmp_key(&y.provenance));
    Ok(out)
}
