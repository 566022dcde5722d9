//! Coset transversals with stored words, Schreier generators, and
//! certified decompositions `g = h·t` down a normal series.
//!
//! All constructions take an ambient subgroup `⟨X⟩` of a parent group
//! `G`, so the same code serves one level `H ⊲ G` and every step of a
//! derived series. Words are always over the list `X` of that level.
//!
//! Positive mode writes `t⁻¹` as `t^(o(t)−1)`, so every emitted word uses
//! only positive letters. Symmetric mode uses formal inverses.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::group::{
    closure, is_normalized_by, DerivedSeries, ElemId, FiniteGroup, GroupError, Subgroup, IDENTITY,
};
use crate::wordlen::{eval_word, length_table, shortest_word, LengthTable, Token, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchreierError {
    #[error("generating list does not generate the group")]
    NotGenerating,
    #[error("subgroup is not contained in the group generated by the list")]
    NotContained,
    #[error("subgroup is not normalized by the generating list")]
    NotNormal,
    #[error("element {0} is outside the group")]
    OutsideGroup(ElemId),
    #[error("series does not start at the whole group")]
    BadSeries,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetRep {
    /// Minimum element of the coset.
    pub key: ElemId,
    pub element: ElemId,
    pub word: Word,
}

/// One representative per right coset `Hg` of the ambient group, each with
/// a word over `gens` no longer than the coset's distance in the quotient.
#[derive(Debug, Clone)]
pub struct Transversal {
    gens: Vec<ElemId>,
    symmetric: bool,
    normal_order: usize,
    coset_of: Vec<u32>,
    reps: Vec<CosetRep>,
}

const OUTSIDE: u32 = u32::MAX;

impl Transversal {
    pub fn gens(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Representatives in coset-id order; coset 0 is `H` itself, with the
    /// identity and the empty word.
    pub fn reps(&self) -> &[CosetRep] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn normal_order(&self) -> usize {
        self.normal_order
    }

    pub fn coset_of(&self, g: ElemId) -> Option<usize> {
        self.coset_of
            .get(g as usize)
            .copied()
            .filter(|&c| c != OUTSIDE)
            .map(|c| c as usize)
    }

    pub fn rep_of(&self, g: ElemId) -> Option<&CosetRep> {
        self.coset_of(g).map(|c| &self.reps[c])
    }

    /// Longest representative word.
    pub fn max_word_len(&self) -> usize {
        self.reps.iter().map(|r| r.word.len()).max().unwrap_or(0)
    }
}

/// Right transversal for `⟨X⟩` mod `H` by BFS on cosets over `X` (and
/// `X⁻¹` when symmetric), first discovery wins.
pub fn transversal_within(
    group: &FiniteGroup,
    normal: &Subgroup,
    gens: &[ElemId],
    symmetric: bool,
) -> Result<Transversal, SchreierError> {
    let ambient = closure(group, gens);
    if !normal.is_subset_of(&ambient) {
        return Err(SchreierError::NotContained);
    }
    if !is_normalized_by(group, normal, gens) {
        return Err(SchreierError::NotNormal);
    }
    let mut coset_of = vec![OUTSIDE; group.len()];
    let mut keys = Vec::new();
    for &g in ambient.elements() {
        if coset_of[g as usize] != OUTSIDE {
            continue;
        }
        let id = keys.len() as u32;
        keys.push(g);
        for &h in normal.elements() {
            coset_of[group.mul(h, g) as usize] = id;
        }
    }
    let mut steps: Vec<(Token, ElemId)> = gens
        .iter()
        .enumerate()
        .map(|(i, &x)| (Token::pos(i as u32), x))
        .collect();
    if symmetric {
        steps.extend(
            gens.iter()
                .enumerate()
                .map(|(i, &x)| (Token::neg(i as u32), group.inv(x))),
        );
    }
    let mut slots: Vec<Option<CosetRep>> = vec![None; keys.len()];
    slots[0] = Some(CosetRep {
        key: keys[0],
        element: IDENTITY,
        word: Word::empty(),
    });
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let c = queue[head];
        head += 1;
        let (rep, word) = {
            let r = slots[c].as_ref().expect("queued cosets have reps");
            (r.element, r.word.clone())
        };
        for &(token, step) in &steps {
            let next = group.mul(rep, step);
            let nc = coset_of[next as usize] as usize;
            if slots[nc].is_none() {
                let mut w = word.clone();
                w.push(token);
                slots[nc] = Some(CosetRep {
                    key: keys[nc],
                    element: next,
                    word: w,
                });
                queue.push(nc);
            }
        }
    }
    let reps = slots
        .into_iter()
        .map(|s| s.expect("⟨X⟩ reaches every coset"))
        .collect();
    Ok(Transversal {
        gens: gens.to_vec(),
        symmetric,
        normal_order: normal.order(),
        coset_of,
        reps,
    })
}

/// Transversal for `G` mod a normal subgroup `H`; `gens` must generate `G`.
pub fn coset_transversal(
    group: &FiniteGroup,
    normal: &Subgroup,
    gens: &[ElemId],
    symmetric: bool,
) -> Result<Transversal, SchreierError> {
    if !crate::gensets::is_generating(group, gens) {
        return Err(SchreierError::NotGenerating);
    }
    transversal_within(group, normal, gens, symmetric)
}

/// Words for `t⁻¹`, one per representative. Positive mode repeats the
/// word of `t` `o(t) − 1` times; symmetric mode takes the formal inverse.
pub fn inverse_rep_words(group: &FiniteGroup, transversal: &Transversal) -> Vec<Word> {
    transversal
        .reps
        .iter()
        .map(|r| {
            if transversal.symmetric {
                r.word.formal_inverse()
            } else {
                let order = group.element_order(r.element).expect("valid element");
                r.word.repeated(order as usize - 1)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchreierGenerator {
    pub element: ElemId,
    /// `word(t) · x · word(t₁⁻¹)` over the transversal's generating list.
    pub word: Word,
    pub rep: usize,
    pub generator: u32,
}

/// `{ t x t₁⁻¹ : t ∈ T, x ∈ X }` where `t₁` represents the coset of `tx`.
/// Deduplicated by element, keeping the first `(t, x)` in transversal and
/// list order.
pub fn schreier_generators(
    group: &FiniteGroup,
    transversal: &Transversal,
) -> Vec<SchreierGenerator> {
    let inverse_words = inverse_rep_words(group, transversal);
    schreier_with_inverses(group, transversal, &inverse_words)
}

fn schreier_with_inverses(
    group: &FiniteGroup,
    transversal: &Transversal,
    inverse_words: &[Word],
) -> Vec<SchreierGenerator> {
    let mut seen = FixedBitSet::with_capacity(group.len());
    let mut out = Vec::new();
    for (ri, rep) in transversal.reps.iter().enumerate() {
        for (xi, &x) in transversal.gens.iter().enumerate() {
            let tx = group.mul(rep.element, x);
            let target = transversal.coset_of[tx as usize] as usize;
            let t1 = transversal.reps[target].element;
            let s = group.mul(tx, group.inv(t1));
            if seen.put(s as usize) {
                continue;
            }
            let mut word = rep.word.clone();
            word.push(Token::pos(xi as u32));
            word.append(&inverse_words[target]);
            out.push(SchreierGenerator {
                element: s,
                word,
                rep: ri,
                generator: xi as u32,
            });
        }
    }
    out
}

/// `g = h·t` with a word over the level's generating list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub target: ElemId,
    pub h: ElemId,
    pub t: ElemId,
    pub word: Word,
    pub certified_bound: u64,
}

/// One step `H ⊲ ⟨X⟩`: transversal, Schreier generators of `H` with their
/// words, and a length table for `H` over those generators.
#[derive(Debug, Clone)]
pub struct SchreierLevel {
    transversal: Transversal,
    inverse_words: Vec<Word>,
    schreier: Vec<SchreierGenerator>,
    sub_gens: Vec<ElemId>,
    sub_words: Vec<Word>,
    sub_table: LengthTable,
}

impl SchreierLevel {
    /// Builds the level for `H` normalized by `gens`, inside `⟨gens⟩`.
    pub fn build(
        group: &FiniteGroup,
        normal: &Subgroup,
        gens: &[ElemId],
        symmetric: bool,
    ) -> Result<Self, SchreierError> {
        let transversal = transversal_within(group, normal, gens, symmetric)?;
        let inverse_words = inverse_rep_words(group, &transversal);
        let schreier = schreier_with_inverses(group, &transversal, &inverse_words);
        let (sub_gens, sub_words): (Vec<ElemId>, Vec<Word>) = schreier
            .iter()
            .filter(|s| s.element != IDENTITY)
            .map(|s| (s.element, s.word.clone()))
            .unzip();
        let sub_table = length_table(group, &sub_gens, symmetric);
        debug_assert_eq!(sub_table.reached(), normal.order());
        Ok(SchreierLevel {
            transversal,
            inverse_words,
            schreier,
            sub_gens,
            sub_words,
            sub_table,
        })
    }

    pub fn transversal(&self) -> &Transversal {
        &self.transversal
    }

    pub fn schreier(&self) -> &[SchreierGenerator] {
        &self.schreier
    }

    pub fn inverse_words(&self) -> &[Word] {
        &self.inverse_words
    }

    /// Non-identity Schreier generators: the generating list handed to `H`.
    pub fn sub_gens(&self) -> &[ElemId] {
        &self.sub_gens
    }

    pub fn sub_words(&self) -> &[Word] {
        &self.sub_words
    }

    /// Diameter of `H` over its Schreier generators.
    pub fn sub_diameter(&self) -> u32 {
        self.sub_table.diameter()
    }

    /// `Ml(T⁻¹)`.
    pub fn max_inverse_word_len(&self) -> usize {
        self.inverse_words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// `Ml(T) + (Ml(T) + 1 + Ml(T⁻¹)) · sub_bound`. In symmetric mode
    /// `Ml(T⁻¹) = Ml(T)`, which gives `2·Ml·d + Ml + d`.
    pub fn level_bound(&self, sub_bound: u64) -> u64 {
        let ml = self.transversal.max_word_len() as u64;
        ml + (ml + 1 + self.max_inverse_word_len() as u64) * sub_bound
    }

    pub fn certified_bound(&self) -> u64 {
        self.level_bound(self.sub_diameter() as u64)
    }

    /// `h·t` for `g`, where `t` is the representative of `g`'s coset.
    pub fn split(
        &self,
        group: &FiniteGroup,
        g: ElemId,
    ) -> Result<(ElemId, &CosetRep), SchreierError> {
        let rep = self
            .transversal
            .rep_of(g)
            .ok_or(SchreierError::OutsideGroup(g))?;
        Ok((group.mul(g, group.inv(rep.element)), rep))
    }

    /// Word for `g` over the level's list, via a shortest word for `h`
    /// over the Schreier generators.
    pub fn decompose(
        &self,
        group: &FiniteGroup,
        g: ElemId,
    ) -> Result<Decomposition, SchreierError> {
        let (h, rep) = self.split(group, g)?;
        let h_word = shortest_word(group, &self.sub_table, h)?;
        let mut word = h_word.substitute(&self.sub_words);
        word.append(&rep.word);
        Ok(Decomposition {
            target: g,
            h,
            t: rep.element,
            word,
            certified_bound: self.certified_bound(),
        })
    }
}

/// Decomposition of `g` over `X` for `H ⊲ G`.
pub fn decompose(
    group: &FiniteGroup,
    normal: &Subgroup,
    gens: &[ElemId],
    symmetric: bool,
    g: ElemId,
) -> Result<Decomposition, SchreierError> {
    if !crate::gensets::is_generating(group, gens) {
        return Err(SchreierError::NotGenerating);
    }
    SchreierLevel::build(group, normal, gens, symmetric)?.decompose(group, g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesDecomposition {
    pub target: ElemId,
    pub word: Word,
    pub certified_bound: u64,
}

/// Recursive decomposition down a derived series. Level `i` splits
/// `G^(i)` over `G^(i+1)`; its Schreier generators become the list for
/// level `i+1`. The last (abelian) term uses shortest words directly.
#[derive(Debug, Clone)]
pub struct SeriesDecomposer {
    gens: Vec<ElemId>,
    levels: Vec<SchreierLevel>,
    bottom: LengthTable,
    bounds: Vec<u64>,
}

impl SeriesDecomposer {
    pub fn new(
        group: &FiniteGroup,
        gens: &[ElemId],
        series: &DerivedSeries,
        symmetric: bool,
    ) -> Result<Self, SchreierError> {
        let l = series.derived_length()? as usize;
        if series.terms().first().is_none_or(|t| !t.is_whole(group)) {
            return Err(SchreierError::BadSeries);
        }
        if !crate::gensets::is_generating(group, gens) {
            return Err(SchreierError::NotGenerating);
        }
        let mut levels = Vec::new();
        let mut current = gens.to_vec();
        for i in 0..l.saturating_sub(1) {
            let level = SchreierLevel::build(group, &series.terms()[i + 1], &current, symmetric)?;
            current = level.sub_gens().to_vec();
            levels.push(level);
        }
        let bottom = length_table(group, &current, symmetric);
        let mut bounds = vec![bottom.diameter() as u64];
        for level in levels.iter().rev() {
            let below = *bounds.last().expect("non-empty");
            bounds.push(level.level_bound(below));
        }
        bounds.reverse();
        Ok(SeriesDecomposer {
            gens: gens.to_vec(),
            levels,
            bottom,
            bounds,
        })
    }

    pub fn gens(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn levels(&self) -> &[SchreierLevel] {
        &self.levels
    }

    /// Telescoped bound on every emitted word length.
    pub fn certified_bound(&self) -> u64 {
        self.bounds[0]
    }

    /// Bound at each level, top first; the last entry is the bottom diameter.
    pub fn level_bounds(&self) -> &[u64] {
        &self.bounds
    }

    pub fn decompose(
        &self,
        group: &FiniteGroup,
        g: ElemId,
    ) -> Result<SeriesDecomposition, SchreierError> {
        if !group.contains(g) {
            return Err(SchreierError::OutsideGroup(g));
        }
        let word = self.word_at(group, 0, g)?;
        Ok(SeriesDecomposition {
            target: g,
            word,
            certified_bound: self.certified_bound(),
        })
    }

    fn word_at(&self, group: &FiniteGroup, depth: usize, g: ElemId) -> Result<Word, SchreierError> {
        let Some(level) = self.levels.get(depth) else {
            return Ok(shortest_word(group, &self.bottom, g)?);
        };
        let (h, rep) = level.split(group, g)?;
        let mut word = self
            .word_at(group, depth + 1, h)?
            .substitute(level.sub_words());
        word.append(&rep.word);
        Ok(word)
    }

    /// Decomposes and checks the word evaluates to `g` within the bound.
    pub fn certify(&self, group: &FiniteGroup, g: ElemId) -> Result<bool, SchreierError> {
        let d = self.decompose(group, g)?;
        Ok(eval_word(group, &self.gens, &d.word)? == g && d.word.len() as u64 <= d.certified_bound)
    }
}

/// One-shot form of [`SeriesDecomposer::decompose`].
pub fn decompose_via_series(
    group: &FiniteGroup,
    gens: &[ElemId],
    series: &DerivedSeries,
    symmetric: bool,
    g: ElemId,
) -> Result<SeriesDecomposition, SchreierError> {
    SeriesDecomposer::new(group, gens, series, symmetric)?.decompose(group, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::resolve_group;
    use crate::group::{derived_series, Subgroup};

    fn q8_setup() -> (FiniteGroup, Subgroup, Vec<ElemId>) {
        let q = resolve_group("Q8").unwrap();
        let center = closure(&q, &[q.parse_element("-1").unwrap()]);
        let gens = vec![q.parse_element("i").unwrap(), q.parse_element("j").unwrap()];
        (q, center, gens)
    }

    #[test]
    fn quaternion_transversal() {
        let (q, center, gens) = q8_setup();
        let t = coset_transversal(&q, &center, &gens, false).unwrap();
        assert_eq!(t.len(), 4);
        let mut lens: Vec<usize> = t.reps().iter().map(|r| r.word.len()).collect();
        lens.sort_unstable();
        assert_eq!(lens, vec![0, 1, 1, 2]);
        assert_eq!(t.reps()[0].element, IDENTITY);
        let reps: Vec<String> = t.reps().iter().map(|r| q.label(r.element)).collect();
        assert_eq!(reps, vec!["1", "i", "j", "k"]);
        for r in t.reps() {
            assert_eq!(eval_word(&q, &gens, &r.word).unwrap(), r.element);
        }
    }

    #[test]
    fn transversal_edge_cases() {
        let (q, _, gens) = q8_setup();
        let whole = coset_transversal(&q, &Subgroup::whole(&q), &gens, false).unwrap();
        assert_eq!(whole.len(), 1);
        assert!(whole.reps()[0].word.is_empty());
        let trivial = coset_transversal(&q, &Subgroup::trivial(&q), &gens, false).unwrap();
        assert_eq!(trivial.len(), 8);
        assert_eq!(
            trivial.max_word_len() as u32,
            crate::wordlen::diameter(&q, &gens, false).unwrap()
        );
        assert!(matches!(
            coset_transversal(&q, &Subgroup::trivial(&q), &gens[..1], false),
            Err(SchreierError::NotGenerating)
        ));
    }

    #[test]
    fn quaternion_schreier_generators() {
        let (q, center, gens) = q8_setup();
        let t = coset_transversal(&q, &center, &gens, false).unwrap();
        let s = schreier_generators(&q, &t);
        let minus_one = q.parse_element("-1").unwrap();
        assert!(s.iter().any(|g| g.element == minus_one));
        let elems: Vec<ElemId> = s.iter().map(|g| g.element).collect();
        assert_eq!(closure(&q, &elems), center);
        for g in &s {
            assert!(g.word.is_positive());
            assert_eq!(eval_word(&q, &gens, &g.word).unwrap(), g.element);
        }
        let inv = inverse_rep_words(&q, &t);
        assert!(inv[0].is_empty());
        let i_rep = t.reps().iter().position(|r| r.element == gens[0]).unwrap();
        assert_eq!(inv[i_rep].len(), 3);
        assert!(inv.iter().map(Word::len).max().unwrap() <= 6);
    }

    #[test]
    fn schreier_edge_cases() {
        let (q, _, gens) = q8_setup();
        let whole = coset_transversal(&q, &Subgroup::whole(&q), &gens, false).unwrap();
        let s: Vec<ElemId> = schreier_generators(&q, &whole)
            .iter()
            .map(|g| g.element)
            .collect();
        assert_eq!(s, gens);
        let z6 = resolve_group("Z6").unwrap();
        let t = coset_transversal(&z6, &Subgroup::trivial(&z6), &[1], false).unwrap();
        assert!(schreier_generators(&z6, &t)
            .iter()
            .all(|g| g.element == IDENTITY));
    }

    #[test]
    fn quaternion_decompositions() {
        let (q, center, gens) = q8_setup();
        let level = SchreierLevel::build(&q, &center, &gens, false).unwrap();
        assert_eq!(level.sub_diameter(), 1);
        assert!(level.certified_bound() <= 11);
        let id = decompose(&q, &center, &gens, false, IDENTITY).unwrap();
        assert_eq!((id.h, id.t), (IDENTITY, IDENTITY));
        assert!(id.word.is_empty());
        let minus_k = q.parse_element("-k").unwrap();
        let d = level.decompose(&q, minus_k).unwrap();
        assert_eq!(q.label(d.h), "-1");
        assert_eq!(q.label(d.t), "k");
        assert_eq!(eval_word(&q, &gens, &d.word).unwrap(), minus_k);
        for g in q.elements() {
            let d = level.decompose(&q, g).unwrap();
            assert_eq!(eval_word(&q, &gens, &d.word).unwrap(), g);
            assert!(d.word.len() as u64 <= d.certified_bound);
            assert!(d.word.is_positive());
        }
    }

    #[test]
    fn series_decomposition_of_q8_and_abelian() {
        let (q, _, gens) = q8_setup();
        let series = derived_series(&q);
        for symmetric in [false, true] {
            let dec = SeriesDecomposer::new(&q, &gens, &series, symmetric).unwrap();
            assert!(dec.certified_bound() <= 72);
            for g in q.elements() {
                assert!(dec.certify(&q, g).unwrap());
            }
        }
        let z6 = resolve_group("Z6").unwrap();
        let dec = SeriesDecomposer::new(&z6, &[1], &derived_series(&z6), false).unwrap();
        assert!(dec.levels().is_empty());
        assert_eq!(dec.certified_bound(), 5);
        assert_eq!(dec.decompose(&z6, 4).unwrap().word.len(), 4);
        let a5 = resolve_group("A5").unwrap();
        let gens = crate::group::greedy_generators(&a5);
        assert!(matches!(
            SeriesDecomposer::new(&a5, &gens, &derived_series(&a5), false),
            Err(SchreierError::Group(GroupError::NotSolvable { .. }))
        ));
    }
}
