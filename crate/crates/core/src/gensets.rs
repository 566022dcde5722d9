//! Generating sets: certification, rank, enumeration of inclusion-minimal
//! generating sets, and maximization of (symmetric) diameter over them.
//!
//! Adding a generator never lengthens a shortest word, so the maximum
//! diameter over all generating sets is attained on an inclusion-minimal
//! one. Every irredundant generating set has at most `⌊log₂|G|⌋` elements
//! (each element at least doubles the subgroup generated so far), which
//! bounds the enumeration depth. For p-groups all minimal generating sets
//! have size `rank(G)`, the dimension of the Frattini quotient.

use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::bound_babai;
use crate::group::{
    closure, closure_into, commutator_subgroup, derived_series, greedy_generators, quotient,
    ElemId, FiniteGroup, GroupError, Subgroup, IDENTITY,
};
use crate::wordlen::diameter;

/// Default cap on enumeration candidates.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GensetError {
    #[error("enumeration needs {candidates} candidates, budget is {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A set of elements together with its generation certificate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GenSet {
    pub elements: Vec<ElemId>,
    pub generates: bool,
    pub minimal: bool,
}

impl GenSet {
    /// Sorts, dedups and certifies `elements`.
    pub fn certify(group: &FiniteGroup, elements: &[ElemId]) -> GenSet {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        let generates = is_generating(group, &elements);
        let minimal = generates && is_irredundant(group, &elements);
        GenSet {
            elements,
            generates,
            minimal,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn is_generating(group: &FiniteGroup, set: &[ElemId]) -> bool {
    let mut scratch = FixedBitSet::with_capacity(group.len());
    closure_into(group, set, &mut scratch) == group.len()
}

/// No element lies in the subgroup generated by the others.
fn is_irredundant(group: &FiniteGroup, set: &[ElemId]) -> bool {
    let mut scratch = FixedBitSet::with_capacity(group.len());
    let mut others = Vec::with_capacity(set.len());
    (0..set.len()).all(|skip| {
        others.clear();
        others.extend(
            set.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &e)| e),
        );
        closure_into(group, &others, &mut scratch);
        !scratch.contains(set[skip] as usize)
    })
}

/// Generating and irredundant.
pub fn is_minimal_generating(group: &FiniteGroup, set: &[ElemId]) -> bool {
    is_generating(group, set) && is_irredundant(group, set)
}

/// Size of a smallest generating set, by exhaustive increasing-size search.
pub fn rank(group: &FiniteGroup) -> u32 {
    rank_with_budget(group, u64::MAX).expect("unbounded budget")
}

/// As [`rank`], failing once more than `budget` subsets have been closed.
pub fn rank_with_budget(group: &FiniteGroup, budget: u64) -> Result<u32, GensetError> {
    if group.is_trivial() {
        return Ok(0);
    }
    let mut nodes = 0u64;
    for k in 1.. {
        let mut chosen = Vec::with_capacity(k);
        if generating_subset_exists(group, k, &mut chosen, &mut nodes, budget)? {
            return Ok(k as u32);
        }
    }
    unreachable!("the whole group generates itself")
}

fn generating_subset_exists(
    group: &FiniteGroup,
    k: usize,
    chosen: &mut Vec<ElemId>,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, GensetError> {
    let n = group.len();
    let mut current = FixedBitSet::with_capacity(n);
    let size = closure_into(group, chosen, &mut current);
    if size == n {
        return Ok(true);
    }
    let remaining = k - chosen.len();
    if remaining == 0 {
        return Ok(false);
    }
    let start = chosen.last().map_or(1, |&x| x + 1);
    for x in start..group.order() {
        if current.contains(x as usize) {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(GensetError::BudgetExceeded {
                candidates: *nodes as u128,
                budget,
            });
        }
        chosen.push(x);
        let found = generating_subset_exists(group, k, chosen, nodes, budget)?;
        chosen.pop();
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Frattini subgroup `G^p G'` of a p-group.
pub fn frattini_subgroup_pgroup(group: &FiniteGroup, p: u32) -> Subgroup {
    let derived = commutator_subgroup(group, &Subgroup::whole(group));
    let mut gens = crate::group::generators_of(group, &derived);
    gens.extend(
        greedy_generators(group)
            .into_iter()
            .map(|g| group.pow(g, p as u64)),
    );
    closure(group, &gens)
}

/// Rank of a p-group as `log_p |G/Φ(G)|`; `None` if `G` is not a p-group.
pub fn pgroup_rank(group: &FiniteGroup) -> Option<u32> {
    let p = group.prime_power_base()?;
    let index = group.len() / frattini_subgroup_pgroup(group, p).order();
    let mut d = 0;
    let mut m = 1;
    while m < index {
        m *= p as usize;
        d += 1;
    }
    Some(d)
}

/// `rank(G/G')`.
pub fn abelianization_rank(group: &FiniteGroup) -> Result<u32, GroupError> {
    let derived = commutator_subgroup(group, &Subgroup::whole(group));
    Ok(rank(quotient(group, &derived)?.group()))
}

fn floor_log2(n: usize) -> u32 {
    usize::BITS - 1 - n.max(1).leading_zeros()
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of non-identity subsets with sizes in `sizes`.
pub fn candidate_count(order: usize, sizes: std::ops::RangeInclusive<u32>) -> u128 {
    sizes.map(|k| binomial(order as u64 - 1, k as u64)).sum()
}

struct Frame {
    closure: FixedBitSet,
    next: ElemId,
}

/// Lexicographic stream of the inclusion-minimal generating sets with at
/// most `size_cap` elements.
///
/// Depth-first over increasing element ids. A branch is cut when the new
/// element already lies in the prefix's closure (it would be redundant),
/// when the prefix already generates, or at depth `size_cap`.
pub struct MinimalGensets<'g> {
    group: &'g FiniteGroup,
    cap: usize,
    first_only: Option<ElemId>,
    stack: Vec<Frame>,
    chosen: Vec<ElemId>,
    nodes: u64,
}

impl<'g> MinimalGensets<'g> {
    pub fn new(group: &'g FiniteGroup, size_cap: u32) -> Self {
        let mut root = FixedBitSet::with_capacity(group.len());
        root.insert(IDENTITY as usize);
        let stack = if group.is_trivial() {
            Vec::new()
        } else {
            vec![Frame {
                closure: root,
                next: 1,
            }]
        };
        MinimalGensets {
            group,
            cap: size_cap as usize,
            first_only: None,
            stack,
            chosen: Vec::new(),
            nodes: 0,
        }
    }

    /// Restricts the stream to sets whose smallest element is `first`.
    pub fn with_first(mut self, first: ElemId) -> Self {
        self.first_only = Some(first);
        self
    }

    /// Subsets closed so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}

impl Iterator for MinimalGensets<'_> {
    type Item = GenSet;

    fn next(&mut self) -> Option<GenSet> {
        let n = self.group.len();
        loop {
            let depth = self.stack.len().checked_sub(1)?;
            let frame = self.stack.last_mut().expect("non-empty");
            let mut x = frame.next;
            while (x as usize) < n && frame.closure.contains(x as usize) {
                x += 1;
            }
            if depth == 0 {
                if let Some(first) = self.first_only {
                    x = if x <= first && !frame.closure.contains(first as usize) {
                        first
                    } else {
                        n as ElemId
                    };
                }
            }
            if x as usize >= n {
                self.stack.pop();
                self.chosen.pop();
                continue;
            }
            frame.next = x + 1;
            self.chosen.push(x);
            self.nodes += 1;
            let mut next_closure = FixedBitSet::with_capacity(n);
            if closure_into(self.group, &self.chosen, &mut next_closure) == n {
                let minimal = is_irredundant(self.group, &self.chosen);
                let elements = self.chosen.clone();
                self.chosen.pop();
                if minimal {
                    return Some(GenSet {
                        elements,
                        generates: true,
                        minimal: true,
                    });
                }
                continue;
            }
            if self.chosen.len() < self.cap {
                self.stack.push(Frame {
                    closure: next_closure,
                    next: x + 1,
                });
            } else {
                self.chosen.pop();
            }
        }
    }
}

/// Every inclusion-minimal generating set of size at most `size_cap`, each
/// once, in lexicographic order.
pub fn enumerate_minimal_gensets(group: &FiniteGroup, size_cap: u32) -> MinimalGensets<'_> {
    MinimalGensets::new(group, size_cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: u64,
    /// Largest set size in exact mode; default `⌊log₂|G|⌋`.
    pub size_cap: Option<u32>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            size_cap: None,
            threads: None,
        }
    }
}

/// Per-generating-set check of `diam ≤ 2(diamˢ+1)(|X|+1) ln|G|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BabaiTally {
    pub checked: u64,
    pub violations: u64,
    /// Largest `diam / bound` seen.
    pub max_ratio: f64,
}

impl Default for BabaiTally {
    fn default() -> Self {
        BabaiTally {
            checked: 0,
            violations: 0,
            max_ratio: 0.0,
        }
    }
}

/// Relative slack for comparisons against real-valued bounds.
pub const REAL_GUARD: f64 = 1e-9;

impl BabaiTally {
    fn record(&mut self, diam: u32, diam_s: u32, gens: usize, order: u32) {
        let Ok(bound) = bound_babai(diam_s, gens as u32, order) else {
            return;
        };
        self.checked += 1;
        if diam as f64 > bound * (1.0 + REAL_GUARD) {
            self.violations += 1;
        }
        self.max_ratio = self.max_ratio.max(diam as f64 / bound);
    }

    fn merge(self, other: BabaiTally) -> BabaiTally {
        BabaiTally {
            checked: self.checked + other.checked,
            violations: self.violations + other.violations,
            max_ratio: self.max_ratio.max(other.max_ratio),
        }
    }
}

/// Maximum positive and symmetric diameters with the generating sets
/// attaining them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterCertificate {
    pub group: String,
    pub order: u32,
    pub value_positive: u32,
    pub value_symmetric: u32,
    pub argmax_positive: GenSet,
    pub argmax_symmetric: GenSet,
    /// True when every inclusion-minimal generating set was visited.
    pub exhaustive: bool,
    pub gensets_visited: u64,
    pub candidates: u128,
    pub babai: BabaiTally,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
struct Best {
    positive: Option<(u32, Vec<ElemId>)>,
    symmetric: Option<(u32, Vec<ElemId>)>,
    visited: u64,
    babai: BabaiTally,
}

/// Larger value wins; equal values go to the lexicographically smaller set.
fn better(candidate: &(u32, Vec<ElemId>), incumbent: &Option<(u32, Vec<ElemId>)>) -> bool {
    match incumbent {
        None => true,
        Some((v, set)) => candidate.0 > *v || (candidate.0 == *v && candidate.1 < *set),
    }
}

impl Best {
    fn visit(&mut self, group: &FiniteGroup, set: &[ElemId]) {
        let dp = diameter(group, set, false).expect("generating set");
        let ds = diameter(group, set, true).expect("generating set");
        self.visited += 1;
        self.babai.record(dp, ds, set.len(), group.order());
        let p = (dp, set.to_vec());
        if better(&p, &self.positive) {
            self.positive = Some(p);
        }
        let s = (ds, set.to_vec());
        if better(&s, &self.symmetric) {
            self.symmetric = Some(s);
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if let Some(p) = other.positive {
            if better(&p, &self.positive) {
                self.positive = Some(p);
            }
        }
        if let Some(s) = other.symmetric {
            if better(&s, &self.symmetric) {
                self.symmetric = Some(s);
            }
        }
        self.visited += other.visited;
        self.babai = self.babai.merge(other.babai);
        self
    }
}

/// Set sizes searched in exact mode and whether that range is exhaustive.
fn exact_sizes(
    group: &FiniteGroup,
    size_cap: Option<u32>,
) -> (std::ops::RangeInclusive<u32>, bool) {
    if let Some(d) = pgroup_rank(group) {
        return (d..=d, true);
    }
    let full = floor_log2(group.len());
    let cap = size_cap.unwrap_or(full);
    (1..=cap, cap >= full)
}

/// `D(G)` and `Dˢ(G)`: exact over all minimal generating sets, or a
/// seeded lower bound from random minimal generating sets.
pub fn max_diameters(
    group: &FiniteGroup,
    strategy: Strategy,
    options: &SearchOptions,
) -> Result<DiameterCertificate, GensetError> {
    let run = || match strategy {
        Strategy::Exact => exact_max(group, options),
        Strategy::Sampled { samples, seed } => Ok(sampled_max(group, samples, seed)),
    };
    match options.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_or_else(|_| run(), |pool| pool.install(run)),
        None => run(),
    }
}

fn exact_max(
    group: &FiniteGroup,
    options: &SearchOptions,
) -> Result<DiameterCertificate, GensetError> {
    if group.is_trivial() {
        return Ok(certificate(group, Best::default(), true, 0, None));
    }
    let (sizes, exhaustive) = exact_sizes(group, options.size_cap);
    let candidates = candidate_count(group.len(), sizes.clone());
    if candidates > options.budget as u128 {
        return Err(GensetError::BudgetExceeded {
            candidates,
            budget: options.budget,
        });
    }
    let cap = *sizes.end();
    let nodes = AtomicU64::new(0);
    let best = (1..group.order())
        .into_par_iter()
        .map(|first| {
            let mut best = Best::default();
            let mut stream = enumerate_minimal_gensets(group, cap).with_first(first);
            for set in stream.by_ref() {
                best.visit(group, &set.elements);
            }
            nodes.fetch_add(stream.nodes(), Ordering::Relaxed);
            best
        })
        .reduce(Best::default, Best::merge);
    log::debug!(
        "{}: {} subsets closed, {} minimal generating sets",
        group.name(),
        nodes.into_inner(),
        best.visited
    );
    Ok(certificate(group, best, exhaustive, candidates, None))
}

/// A random minimal generating set: add random elements outside the
/// current closure until it generates, then drop redundant ones in random
/// order.
pub fn random_minimal_genset<R: Rng>(group: &FiniteGroup, rng: &mut R) -> Vec<ElemId> {
    let n = group.len();
    if n == 1 {
        return Vec::new();
    }
    let mut set = Vec::new();
    let mut current = FixedBitSet::with_capacity(n);
    let mut size = closure_into(group, &set, &mut current);
    while size < n {
        let x = rng.random_range(1..group.order());
        if !current.contains(x as usize) {
            set.push(x);
            size = closure_into(group, &set, &mut current);
        }
    }
    set.shuffle(rng);
    let mut i = 0;
    while i < set.len() {
        let removed = set.remove(i);
        if is_generating(group, &set) {
            continue;
        }
        set.insert(i, removed);
        i += 1;
    }
    set.sort_unstable();
    set
}

fn sampled_max(group: &FiniteGroup, samples: usize, seed: u64) -> DiameterCertificate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = Best::default();
    if !group.is_trivial() {
        for _ in 0..samples {
            let set = random_minimal_genset(group, &mut rng);
            best.visit(group, &set);
        }
    }
    certificate(group, best, group.is_trivial(), 0, Some(seed))
}

fn certificate(
    group: &FiniteGroup,
    best: Best,
    exhaustive: bool,
    candidates: u128,
    seed: Option<u64>,
) -> DiameterCertificate {
    let genset = |set: Vec<ElemId>| GenSet {
        generates: true,
        minimal: true,
        elements: set,
    };
    let (vp, sp) = best.positive.unwrap_or((0, Vec::new()));
    let (vs, ss) = best.symmetric.unwrap_or((0, Vec::new()));
    DiameterCertificate {
        group: group.name().to_string(),
        order: group.order(),
        value_positive: vp,
        value_symmetric: vs,
        argmax_positive: genset(sp),
        argmax_symmetric: genset(ss),
        exhaustive,
        gensets_visited: best.visited,
        candidates,
        babai: best.babai,
        seed,
    }
}

/// Outcome of checking `k·rank(G/G') ≤ rank(G^k) ≤ k·rank(G)` together with
/// the power-rank equalities for solvable groups and for groups with
/// `rank(G) = rank(G/G')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub k: u32,
    pub alpha: u32,
    pub beta: u32,
    pub rank_power: u32,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub solvable: bool,
    pub nilpotent: bool,
    /// `Some` when `G` is solvable, non-trivial and `k ≥ α/β`.
    pub solvable_power_rank_holds: Option<bool>,
    /// `Some` when `α = β`: `rank(G^k) = k·α`.
    pub equal_rank_power_holds: Option<bool>,
}

impl RankReport {
    pub fn all_hold(&self) -> bool {
        self.lower_holds
            && self.upper_holds
            && self.solvable_power_rank_holds.unwrap_or(true)
            && self.equal_rank_power_holds.unwrap_or(true)
            && (!self.nilpotent || self.alpha == self.beta)
    }
}

pub fn rank_bounds_check(
    group: &FiniteGroup,
    k: u32,
    max_elements: u64,
    budget: u64,
) -> Result<RankReport, GensetError> {
    let alpha = rank_with_budget(group, budget)?;
    let beta = abelianization_rank(group)?;
    let power = FiniteGroup::direct_power(group, k, max_elements)?;
    let rank_power = rank_with_budget(&power, budget)?;
    let solvable = derived_series(group).is_solvable();
    let nilpotent = crate::group::is_nilpotent(group);
    let solvable_power_rank_holds =
        (solvable && beta > 0 && k * beta >= alpha).then_some(rank_power == beta * k);
    let equal_rank_power_holds = (alpha == beta).then_some(rank_power == k * alpha);
    Ok(RankReport {
        k,
        alpha,
        beta,
        rank_power,
        lower_holds: k * beta <= rank_power,
        upper_holds: rank_power <= k * alpha,
        solvable,
        nilpotent,
        solvable_power_rank_holds,
        equal_rank_power_holds,
    })
}
