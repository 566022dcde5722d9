//! Finite group kernel.
//!
//! Elements are dense ids `0..order` with the identity fixed at id 0. Two
//! backends exist: an explicit multiplication table (orders up to
//! [`MAX_TABLE_ORDER`]) and a direct power `G^n` whose elements are
//! mixed-radix encodings of `n`-tuples of base ids, component 0 least
//! significant. Powers never materialize a table.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Element id inside a [`FiniteGroup`].
pub type ElemId = u32;

/// Every backend puts the identity at id 0.
pub const IDENTITY: ElemId = 0;

/// Largest order for which a dense multiplication table is built.
pub const MAX_TABLE_ORDER: usize = 4096;

/// Default cap on the element count of a direct power.
pub const DEFAULT_MAX_ELEMENTS: u64 = 1_000_000;

/// Orders up to this value get a full associativity check.
const FULL_ASSOCIATIVITY_ORDER: usize = 256;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("element id {id} out of range for group of order {order}")]
    OutOfRange { id: ElemId, order: u32 },
    #[error("group order must be positive")]
    EmptyGroup,
    #[error("multiplication table needs {expected} entries, found {found}")]
    TableSize { expected: usize, found: usize },
    #[error("table entry at row {row}, column {col} is {value}, outside 0..{order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: ElemId,
        order: u32,
    },
    #[error("identity law fails at row {row}, column {col}: element 0 must be the identity")]
    IdentityLaw { row: usize, col: usize },
    #[error("Latin-square violation: row {row} repeats element {value} (column {col})")]
    LatinRow {
        row: usize,
        col: usize,
        value: ElemId,
    },
    #[error("Latin-square violation: column {col} repeats element {value} (row {row})")]
    LatinColumn {
        row: usize,
        col: usize,
        value: ElemId,
    },
    #[error("associativity fails for ({a}*{b})*{c}")]
    Associativity { a: ElemId, b: ElemId, c: ElemId },
    #[error("operation is not closed on the supplied elements")]
    NotClosed,
    #[error("no identity element among the supplied elements")]
    NoIdentity,
    #[error("dense table of order {order} exceeds the cap of {cap}")]
    TableTooLarge { order: u64, cap: usize },
    #[error("direct power of order {base}^{exponent} exceeds the element limit {limit}")]
    PowerTooLarge {
        base: u32,
        exponent: u32,
        limit: u64,
    },
    #[error("direct power exponent must be at least 1")]
    ZeroExponent,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is not solvable: derived series stabilizes at order {order}")]
    NotSolvable { order: usize },
    #[error("power backend failed to round-trip element {id}")]
    Encoding { id: ElemId },
}

#[derive(Debug, Clone)]
enum Backend {
    Table {
        table: Arc<Vec<ElemId>>,
        inverse: Arc<Vec<ElemId>>,
    },
    Power {
        base: Arc<FiniteGroup>,
        exponent: u32,
    },
}

/// A finite group given by a multiplication oracle over ids `0..order`.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    order: u32,
    backend: Backend,
    labels: Option<Arc<Vec<String>>>,
}

impl FiniteGroup {
    /// Builds a dense-table group from a row-major table and validates it.
    pub fn from_table(
        name: impl Into<String>,
        order: usize,
        table: Vec<ElemId>,
    ) -> Result<Self, GroupError> {
        let group = Self::from_table_unvalidated(name, order, table)?;
        group.verify_axioms()?;
        Ok(group)
    }

    /// Structural checks only (size, range, identity, Latin square).
    /// Used for tables produced internally from a known group.
    pub(crate) fn from_table_unvalidated(
        name: impl Into<String>,
        order: usize,
        table: Vec<ElemId>,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::EmptyGroup);
        }
        if order > MAX_TABLE_ORDER {
            return Err(GroupError::TableTooLarge {
                order: order as u64,
                cap: MAX_TABLE_ORDER,
            });
        }
        if table.len() != order * order {
            return Err(GroupError::TableSize {
                expected: order * order,
                found: table.len(),
            });
        }
        for (idx, &v) in table.iter().enumerate() {
            if v as usize >= order {
                return Err(GroupError::EntryOutOfRange {
                    row: idx / order,
                    col: idx % order,
                    value: v,
                    order: order as u32,
                });
            }
        }
        let mut inverse = vec![u32::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if table[a * order + b] == IDENTITY {
                    inverse[a] = b as ElemId;
                    break;
                }
            }
        }
        let group = FiniteGroup {
            name: name.into(),
            order: order as u32,
            backend: Backend::Table {
                table: Arc::new(table),
                inverse: Arc::new(inverse),
            },
            labels: None,
        };
        group.check_latin_and_identity()?;
        Ok(group)
    }

    /// Builds a dense-table group from an explicit element list and operation.
    /// The identity is located and relabeled to id 0; the remaining elements
    /// keep their relative order.
    pub fn from_elements<T, F>(
        name: impl Into<String>,
        elements: Vec<T>,
        op: F,
    ) -> Result<Self, GroupError>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let ordered = canonical_element_order(&elements, &op)?;
        let index: HashMap<&T, ElemId> = ordered
            .iter()
            .enumerate()
            .map(|(i, e)| (e, i as ElemId))
            .collect();
        let order = ordered.len();
        if order > MAX_TABLE_ORDER {
            return Err(GroupError::TableTooLarge {
                order: order as u64,
                cap: MAX_TABLE_ORDER,
            });
        }
        let mut table = Vec::with_capacity(order * order);
        for a in &ordered {
            for b in &ordered {
                let c = op(a, b);
                table.push(*index.get(&c).ok_or(GroupError::NotClosed)?);
            }
        }
        Self::from_table(name, order, table)
    }

    /// The `exponent`-fold direct power of `base`, capped at `max_elements`.
    pub fn direct_power(
        base: &FiniteGroup,
        exponent: u32,
        max_elements: u64,
    ) -> Result<Self, GroupError> {
        if exponent == 0 {
            return Err(GroupError::ZeroExponent);
        }
        let too_large = GroupError::PowerTooLarge {
            base: base.order,
            exponent,
            limit: max_elements,
        };
        let order = (base.order as u64)
            .checked_pow(exponent)
            .ok_or(too_large.clone())?;
        if order > max_elements || order > u32::MAX as u64 {
            return Err(too_large);
        }
        let name = if exponent == 1 {
            base.name.clone()
        } else {
            format!("{}^{}", base.name, exponent)
        };
        Ok(FiniteGroup {
            name,
            order: order as u32,
            backend: Backend::Power {
                base: Arc::new(base.clone()),
                exponent,
            },
            labels: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches human-readable element names (one per id).
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order as usize, "one label per element");
        self.labels = Some(Arc::new(labels));
        self
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.order as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = ElemId> + Clone {
        0..self.order
    }

    pub fn is_power(&self) -> bool {
        matches!(self.backend, Backend::Power { .. })
    }

    /// Base group and exponent for the power backend.
    pub fn power_parts(&self) -> Option<(&FiniteGroup, u32)> {
        match &self.backend {
            Backend::Power { base, exponent } => Some((base, *exponent)),
            Backend::Table { .. } => None,
        }
    }

    /// Row-major table for the dense backend.
    pub fn table(&self) -> Option<&[ElemId]> {
        match &self.backend {
            Backend::Table { table, .. } => Some(table),
            Backend::Power { .. } => None,
        }
    }

    #[inline]
    pub fn contains(&self, a: ElemId) -> bool {
        a < self.order
    }

    fn check(&self, a: ElemId) -> Result<(), GroupError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(GroupError::OutOfRange {
                id: a,
                order: self.order,
            })
        }
    }

    /// Product `a * b`. Ids must be in range.
    #[inline]
    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.backend {
            Backend::Table { table, .. } => table[a as usize * self.order as usize + b as usize],
            Backend::Power { base, exponent } => {
                let radix = base.order;
                let (mut a, mut b) = (a, b);
                let mut out = 0;
                let mut place = 1;
                for _ in 0..*exponent {
                    out += base.mul(a % radix, b % radix) * place;
                    a /= radix;
                    b /= radix;
                    place = place.wrapping_mul(radix);
                }
                out
            }
        }
    }

    pub fn try_mul(&self, a: ElemId, b: ElemId) -> Result<ElemId, GroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    #[inline]
    pub fn inv(&self, a: ElemId) -> ElemId {
        debug_assert!(self.contains(a));
        match &self.backend {
            Backend::Table { inverse, .. } => inverse[a as usize],
            Backend::Power { base, exponent } => {
                let radix = base.order;
                let mut a = a;
                let mut out = 0;
                let mut place = 1;
                for _ in 0..*exponent {
                    out += base.inv(a % radix) * place;
                    a /= radix;
                    place = place.wrapping_mul(radix);
                }
                out
            }
        }
    }

    pub fn pow(&self, a: ElemId, k: u64) -> ElemId {
        let (mut acc, mut base, mut k) = (IDENTITY, a, k);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Commutator `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: ElemId, b: ElemId) -> ElemId {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// `g⁻¹ h g`.
    pub fn conjugate(&self, h: ElemId, g: ElemId) -> ElemId {
        self.mul(self.mul(self.inv(g), h), g)
    }

    /// Smallest `m ≥ 1` with `a^m = 1`.
    pub fn element_order(&self, a: ElemId) -> Result<u32, GroupError> {
        self.check(a)?;
        let mut x = a;
        let mut m = 1;
        while x != IDENTITY {
            x = self.mul(x, a);
            m += 1;
        }
        Ok(m)
    }

    /// Exponent of the group (lcm of element orders).
    pub fn exponent(&self) -> u32 {
        match &self.backend {
            Backend::Power { base, .. } => base.exponent(),
            Backend::Table { .. } => self
                .elements()
                .map(|a| self.element_order(a).expect("valid id"))
                .fold(1, |acc, m| acc / gcd(acc, m) * m),
        }
    }

    /// Splits a power-backend id into its base components (component 0 first).
    pub fn decode(&self, a: ElemId) -> Vec<ElemId> {
        match &self.backend {
            Backend::Power { base, exponent } => {
                let mut a = a;
                (0..*exponent)
                    .map(|_| {
                        let c = a % base.order;
                        a /= base.order;
                        c
                    })
                    .collect()
            }
            Backend::Table { .. } => vec![a],
        }
    }

    /// Inverse of [`decode`](Self::decode).
    pub fn encode(&self, components: &[ElemId]) -> ElemId {
        match &self.backend {
            Backend::Power { base, exponent } => {
                assert_eq!(components.len(), *exponent as usize);
                components
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| acc * base.order + c)
            }
            Backend::Table { .. } => {
                assert_eq!(components.len(), 1);
                components[0]
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        match &self.backend {
            Backend::Power { base, .. } => base.is_abelian(),
            Backend::Table { .. } => {
                let gens = greedy_generators(self);
                gens.iter().enumerate().all(|(i, &a)| {
                    gens[i + 1..]
                        .iter()
                        .all(|&b| self.mul(a, b) == self.mul(b, a))
                })
            }
        }
    }

    /// `Some(p)` when the order is a power of the prime `p` (and > 1).
    pub fn prime_power_base(&self) -> Option<u32> {
        prime_power_base(self.order as u64).map(|p| p as u32)
    }

    /// Display name of an element.
    pub fn label(&self, a: ElemId) -> String {
        if let Some(labels) = &self.labels {
            return labels[a as usize].clone();
        }
        match &self.backend {
            Backend::Power { base, .. } => {
                let parts: Vec<String> =
                    self.decode(a).into_iter().map(|c| base.label(c)).collect();
                format!("({})", parts.join(","))
            }
            Backend::Table { .. } => a.to_string(),
        }
    }

    /// Resolves an element name or a decimal id.
    pub fn parse_element(&self, text: &str) -> Option<ElemId> {
        let text = text.trim();
        if let Some(labels) = &self.labels {
            if let Some(pos) = labels.iter().position(|l| l == text) {
                return Some(pos as ElemId);
            }
        }
        if let Ok(id) = text.parse::<ElemId>() {
            return self.contains(id).then_some(id);
        }
        if let Backend::Power { base, exponent } = &self.backend {
            let inner = text.strip_prefix('(')?.strip_suffix(')')?;
            let parts = split_top_level(inner, ',');
            if parts.len() != *exponent as usize {
                return None;
            }
            let comps: Option<Vec<ElemId>> = parts.iter().map(|p| base.parse_element(p)).collect();
            return comps.map(|c| self.encode(&c));
        }
        None
    }

    /// Checks the group axioms. Dense tables: Latin square, identity,
    /// inverses, and associativity (full up to order 256, otherwise 10⁴
    /// seeded random triples). Powers: the base axioms plus encode/decode.
    pub fn verify_axioms(&self) -> Result<(), GroupError> {
        match &self.backend {
            Backend::Power { base, .. } => {
                base.verify_axioms()?;
                for a in self.elements() {
                    if self.encode(&self.decode(a)) != a {
                        return Err(GroupError::Encoding { id: a });
                    }
                }
                Ok(())
            }
            Backend::Table { .. } => {
                self.check_latin_and_identity()?;
                let n = self.order;
                let assoc = |a, b, c| {
                    if self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)) {
                        Ok(())
                    } else {
                        Err(GroupError::Associativity { a, b, c })
                    }
                };
                if (n as usize) <= FULL_ASSOCIATIVITY_ORDER {
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                assoc(a, b, c)?;
                            }
                        }
                    }
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(0xA550C);
                    for _ in 0..SAMPLED_TRIPLES {
                        assoc(
                            rng.random_range(0..n),
                            rng.random_range(0..n),
                            rng.random_range(0..n),
                        )?;
                    }
                }
                Ok(())
            }
        }
    }

    fn check_latin_and_identity(&self) -> Result<(), GroupError> {
        let Backend::Table { table, .. } = &self.backend else {
            return Ok(());
        };
        let n = self.order as usize;
        for a in 0..n {
            if table[a] as usize != a {
                return Err(GroupError::IdentityLaw { row: 0, col: a });
            }
            if table[a * n] as usize != a {
                return Err(GroupError::IdentityLaw { row: a, col: 0 });
            }
        }
        let mut seen = FixedBitSet::with_capacity(n);
        for row in 0..n {
            seen.clear();
            for col in 0..n {
                let v = table[row * n + col];
                if seen.put(v as usize) {
                    return Err(GroupError::LatinRow { row, col, value: v });
                }
            }
        }
        for col in 0..n {
            seen.clear();
            for row in 0..n {
                let v = table[row * n + col];
                if seen.put(v as usize) {
                    return Err(GroupError::LatinColumn { row, col, value: v });
                }
            }
        }
        Ok(())
    }
}

fn canonical_element_order<T, F>(elements: &[T], op: &F) -> Result<Vec<T>, GroupError>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let first = elements.first().ok_or(GroupError::EmptyGroup)?;
    let id_pos = elements
        .iter()
        .position(|e| op(e, first) == *first && op(first, e) == *first)
        .ok_or(GroupError::NoIdentity)?;
    let mut ordered = Vec::with_capacity(elements.len());
    ordered.push(elements[id_pos].clone());
    ordered.extend(
        elements
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id_pos)
            .map(|(_, e)| e.clone()),
    );
    Ok(ordered)
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

/// Splits on `sep` outside parentheses.
pub fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts
}

/// A subgroup stored as a sorted id list plus a membership bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    elements: Vec<ElemId>,
    members: FixedBitSet,
}

impl Subgroup {
    pub fn trivial(group: &FiniteGroup) -> Self {
        Self::from_members(Self::bitset_with(group, [IDENTITY]))
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        let mut members = FixedBitSet::with_capacity(group.len());
        members.insert_range(..);
        Self::from_members(members)
    }

    fn bitset_with(group: &FiniteGroup, ids: impl IntoIterator<Item = ElemId>) -> FixedBitSet {
        let mut members = FixedBitSet::with_capacity(group.len());
        for id in ids {
            members.insert(id as usize);
        }
        members
    }

    pub(crate) fn from_members(members: FixedBitSet) -> Self {
        let elements = members.ones().map(|i| i as ElemId).collect();
        Subgroup { elements, members }
    }

    /// Sorted element ids.
    pub fn elements(&self) -> &[ElemId] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn contains(&self, a: ElemId) -> bool {
        self.members.contains(a as usize)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_whole(&self, group: &FiniteGroup) -> bool {
        self.elements.len() == group.len()
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Materializes the subgroup as a dense-table group. Sorted relabeling
    /// keeps the identity at 0; `embedding[k]` is the parent id of new id `k`.
    pub fn to_group(
        &self,
        parent: &FiniteGroup,
        name: impl Into<String>,
    ) -> Result<(FiniteGroup, Vec<ElemId>), GroupError> {
        let n = self.order();
        if n > MAX_TABLE_ORDER {
            return Err(GroupError::TableTooLarge {
                order: n as u64,
                cap: MAX_TABLE_ORDER,
            });
        }
        let index: HashMap<ElemId, ElemId> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as ElemId))
            .collect();
        let mut table = Vec::with_capacity(n * n);
        for &a in &self.elements {
            for &b in &self.elements {
                table.push(*index.get(&parent.mul(a, b)).ok_or(GroupError::NotClosed)?);
            }
        }
        let mut group = FiniteGroup::from_table_unvalidated(name, n, table)?;
        if parent.labels.is_some() || parent.is_power() {
            group = group.with_labels(self.elements.iter().map(|&e| parent.label(e)).collect());
        }
        Ok((group, self.elements.clone()))
    }
}

/// Smallest subgroup containing `generators`. Positive words suffice in a
/// finite group, so this is a BFS from the identity under right
/// multiplication by the generators.
pub fn closure(group: &FiniteGroup, generators: &[ElemId]) -> Subgroup {
    let mut members = FixedBitSet::with_capacity(group.len());
    closure_into(group, generators, &mut members);
    Subgroup::from_members(members)
}

/// Fills `members` with `⟨generators⟩` and returns its order.
pub(crate) fn closure_into(
    group: &FiniteGroup,
    generators: &[ElemId],
    members: &mut FixedBitSet,
) -> usize {
    members.clear();
    members.grow(group.len());
    members.insert(IDENTITY as usize);
    let mut queue = Vec::with_capacity(16);
    queue.push(IDENTITY);
    let mut head = 0;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        for &s in generators {
            let next = group.mul(e, s);
            if !members.put(next as usize) {
                queue.push(next);
            }
        }
    }
    queue.len()
}

/// A generating set found greedily: scan ids in order, keep any element
/// not yet in the running closure.
pub fn greedy_generators(group: &FiniteGroup) -> Vec<ElemId> {
    generators_of(group, &Subgroup::whole(group))
}

/// Greedy generating set for a subgroup.
pub fn generators_of(group: &FiniteGroup, subgroup: &Subgroup) -> Vec<ElemId> {
    let mut gens = Vec::new();
    let mut current = FixedBitSet::with_capacity(group.len());
    let mut size = closure_into(group, &gens, &mut current);
    for &e in subgroup.elements() {
        if size == subgroup.order() {
            break;
        }
        if !current.contains(e as usize) {
            gens.push(e);
            size = closure_into(group, &gens, &mut current);
        }
    }
    gens
}

/// Normal closure of `seeds` under conjugation by `conjugators`.
fn normal_closure(group: &FiniteGroup, seeds: Vec<ElemId>, conjugators: &[ElemId]) -> Subgroup {
    let mut gens: Vec<ElemId> = seeds.into_iter().filter(|&s| s != IDENTITY).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut members = FixedBitSet::with_capacity(group.len());
    closure_into(group, &gens, &mut members);
    let mut i = 0;
    while i < gens.len() {
        let g = gens[i];
        for &y in conjugators {
            let c = group.conjugate(g, y);
            if !members.contains(c as usize) {
                gens.push(c);
                closure_into(group, &gens, &mut members);
            }
        }
        i += 1;
    }
    Subgroup::from_members(members)
}

/// `[H, H]`: the subgroup generated by all commutators of elements of `H`.
/// Computed as the normal closure in `H` of commutators of a generating set of `H`.
pub fn commutator_subgroup(group: &FiniteGroup, subgroup: &Subgroup) -> Subgroup {
    let gens = generators_of(group, subgroup);
    let mut seeds = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            seeds.push(group.commutator(a, b));
        }
    }
    normal_closure(group, seeds, &gens)
}

/// `[N, G]` for `N` normal in `G`.
fn commutator_with_whole(
    group: &FiniteGroup,
    normal: &Subgroup,
    group_gens: &[ElemId],
) -> Subgroup {
    let gens = generators_of(group, normal);
    let seeds = gens
        .iter()
        .flat_map(|&a| group_gens.iter().map(move |&y| group.commutator(a, y)))
        .collect();
    normal_closure(group, seeds, group_gens)
}

/// Whether `g⁻¹ h g ∈ H` for all `g ∈ G`, `h ∈ H`. Checked on generators
/// of both, which is equivalent for finite groups.
pub fn is_normal(group: &FiniteGroup, subgroup: &Subgroup) -> bool {
    is_normalized_by(group, subgroup, &greedy_generators(group))
}

/// Whether every element of `conjugators` normalizes `subgroup`.
pub fn is_normalized_by(group: &FiniteGroup, subgroup: &Subgroup, conjugators: &[ElemId]) -> bool {
    let hgens = generators_of(group, subgroup);
    conjugators.iter().all(|&g| {
        hgens
            .iter()
            .all(|&h| subgroup.contains(group.conjugate(h, g)))
    })
}

/// Derived series `G = G^(0) ⊳ G^(1) ⊳ …`, stopped at the trivial subgroup
/// or at the first repeated term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSeries {
    terms: Vec<Subgroup>,
}

impl DerivedSeries {
    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    pub fn is_solvable(&self) -> bool {
        self.terms.last().is_some_and(Subgroup::is_trivial)
    }

    /// Number of steps to the trivial subgroup.
    pub fn derived_length(&self) -> Result<u32, GroupError> {
        if self.is_solvable() {
            Ok(self.terms.len() as u32 - 1)
        } else {
            Err(GroupError::NotSolvable {
                order: self.terms.last().map_or(0, Subgroup::order),
            })
        }
    }

    /// `|G^(0)|, |G^(1)|, …`.
    pub fn orders(&self) -> Vec<usize> {
        self.terms.iter().map(Subgroup::order).collect()
    }
}

pub fn derived_series(group: &FiniteGroup) -> DerivedSeries {
    let mut terms = vec![Subgroup::whole(group)];
    loop {
        let last = terms.last().expect("non-empty");
        if last.is_trivial() {
            break;
        }
        let next = commutator_subgroup(group, last);
        if next == *last {
            break;
        }
        terms.push(next);
    }
    DerivedSeries { terms }
}

/// Lower central series `γ1 = G, γ_{i+1} = [γ_i, G]`, stopped at
/// stabilization.
pub fn lower_central_series(group: &FiniteGroup) -> Vec<Subgroup> {
    let gens = greedy_generators(group);
    let mut terms = vec![Subgroup::whole(group)];
    loop {
        let last = terms.last().expect("non-empty");
        if last.is_trivial() {
            break;
        }
        let next = commutator_with_whole(group, last, &gens);
        if next == *last {
            break;
        }
        terms.push(next);
    }
    terms
}

pub fn is_nilpotent(group: &FiniteGroup) -> bool {
    lower_central_series(group)
        .last()
        .is_some_and(Subgroup::is_trivial)
}

/// Quotient by a normal subgroup.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    group: FiniteGroup,
    projection: Vec<ElemId>,
    representatives: Vec<ElemId>,
}

impl QuotientGroup {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn into_group(self) -> FiniteGroup {
        self.group
    }

    #[inline]
    pub fn project(&self, g: ElemId) -> ElemId {
        self.projection[g as usize]
    }

    pub fn projection(&self) -> &[ElemId] {
        &self.projection
    }

    /// Canonical (minimum-id) representative of each coset.
    pub fn representatives(&self) -> &[ElemId] {
        &self.representatives
    }
}

/// Labels each element with its coset of `normal`; coset ids follow the
/// order of their minimum elements, so the subgroup itself is coset 0.
pub(crate) fn coset_labels(group: &FiniteGroup, normal: &Subgroup) -> (Vec<ElemId>, Vec<ElemId>) {
    let mut label = vec![u32::MAX; group.len()];
    let mut reps = Vec::with_capacity(group.len() / normal.order());
    for g in group.elements() {
        if label[g as usize] != u32::MAX {
            continue;
        }
        let id = reps.len() as ElemId;
        reps.push(g);
        for &h in normal.elements() {
            label[group.mul(h, g) as usize] = id;
        }
    }
    (label, reps)
}

pub fn quotient(group: &FiniteGroup, normal: &Subgroup) -> Result<QuotientGroup, GroupError> {
    if !is_normal(group, normal) {
        return Err(GroupError::NotNormal);
    }
    let q = group.len() / normal.order();
    if q > MAX_TABLE_ORDER {
        return Err(GroupError::TableTooLarge {
            order: q as u64,
            cap: MAX_TABLE_ORDER,
        });
    }
    let (projection, representatives) = coset_labels(group, normal);
    let mut table = Vec::with_capacity(q * q);
    for &a in &representatives {
        for &b in &representatives {
            table.push(projection[group.mul(a, b) as usize]);
        }
    }
    let name = format!("{}/N{}", group.name(), normal.order());
    let quotient = FiniteGroup::from_table_unvalidated(name, q, table)?;
    Ok(QuotientGroup {
        group: quotient,
        projection,
        representatives,
    })
}

/// Conjugacy classes, each sorted, ordered by minimum element.
pub fn conjugacy_classes(group: &FiniteGroup) -> Vec<Vec<ElemId>> {
    let mut seen = FixedBitSet::with_capacity(group.len());
    let mut classes = Vec::new();
    for x in group.elements() {
        if seen.contains(x as usize) {
            continue;
        }
        let mut class: Vec<ElemId> = group.elements().map(|g| group.conjugate(x, g)).collect();
        class.sort_unstable();
        class.dedup();
        for &c in &class {
            seen.insert(c as usize);
        }
        classes.push(class);
    }
    classes
}

/// All normal subgroups, sorted by order then elements. Quadratic in the
/// group order; intended for small groups.
pub fn normal_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let classes = conjugacy_classes(group);
    let mut found = vec![Subgroup::trivial(group)];
    let mut i = 0;
    while i < found.len() {
        let base = found[i].clone();
        for class in &classes {
            if base.contains(class[0]) {
                continue;
            }
            let mut gens = generators_of(group, &base);
            gens.extend_from_slice(class);
            let candidate = closure(group, &gens);
            if !found.contains(&candidate) {
                found.push(candidate);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.elements().cmp(b.elements()))
    });
    found
}
