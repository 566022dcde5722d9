//! Word lengths over a generating list by breadth-first search on the
//! right Cayley graph.

use serde::Serialize;

use crate::group::{ElemId, FiniteGroup, IDENTITY};

/// Marker for elements not reached from the identity.
pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("token refers to generator {index}, but only {len} generators were given")]
    BadIndex { index: u32, len: usize },
    #[error("element {0} is not reachable from the generating list")]
    Unreachable(ElemId),
    #[error("element id {0} out of range")]
    OutOfRange(ElemId),
}

/// One letter: a generator index, possibly inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Token {
    pub generator: u32,
    pub inverse: bool,
}

impl Token {
    pub fn pos(generator: u32) -> Self {
        Token {
            generator,
            inverse: false,
        }
    }

    pub fn neg(generator: u32) -> Self {
        Token {
            generator,
            inverse: true,
        }
    }

    pub fn inverted(self) -> Self {
        Token {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Word {
    tokens: Vec<Token>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        Word { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.tokens.iter().all(|t| !t.inverse)
    }

    pub fn push(&mut self, token: Token) {
        self.tokens.push(token);
    }

    pub fn append(&mut self, other: &Word) {
        self.tokens.extend_from_slice(&other.tokens);
    }

    /// Reversed with every sign flipped.
    pub fn formal_inverse(&self) -> Word {
        Word {
            tokens: self.tokens.iter().rev().map(|t| t.inverted()).collect(),
        }
    }

    pub fn repeated(&self, times: usize) -> Word {
        Word {
            tokens: self.tokens.repeat(times),
        }
    }

    /// Replaces every token by a word over another alphabet. Inverted
    /// tokens expand to the formal inverse of their image.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out = Word::empty();
        for t in &self.tokens {
            let image = &images[t.generator as usize];
            if t.inverse {
                out.append(&image.formal_inverse());
            } else {
                out.append(image);
            }
        }
        out
    }

    pub fn render(&self, group: &FiniteGroup, gens: &[ElemId]) -> String {
        if self.tokens.is_empty() {
            return "1".to_string();
        }
        self.tokens
            .iter()
            .map(|t| {
                let name = gens
                    .get(t.generator as usize)
                    .map_or_else(|| format!("#{}", t.generator), |&g| group.label(g));
                if t.inverse {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Left-to-right product of `gens[idx]^sign`.
pub fn eval_word(group: &FiniteGroup, gens: &[ElemId], word: &Word) -> Result<ElemId, WordError> {
    let mut acc = IDENTITY;
    for t in word.tokens() {
        let &g = gens.get(t.generator as usize).ok_or(WordError::BadIndex {
            index: t.generator,
            len: gens.len(),
        })?;
        if !group.contains(g) {
            return Err(WordError::OutOfRange(g));
        }
        acc = group.mul(acc, if t.inverse { group.inv(g) } else { g });
    }
    Ok(acc)
}

/// Shortest-word lengths from the identity, with parent pointers for word
/// reconstruction.
#[derive(Debug, Clone)]
pub struct LengthTable {
    gens: Vec<ElemId>,
    symmetric: bool,
    lengths: Vec<u32>,
    parent: Vec<ElemId>,
    via: Vec<Token>,
    diameter: u32,
    witness: ElemId,
    reached: usize,
}

impl LengthTable {
    pub fn gens(&self) -> &[ElemId] {
        &self.gens
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    /// Word length of `g`, or `None` if unreached.
    pub fn length(&self, g: ElemId) -> Option<u32> {
        self.lengths
            .get(g as usize)
            .copied()
            .filter(|&d| d != UNREACHED)
    }

    /// Largest finite length.
    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    /// Element attaining the diameter (smallest id among ties).
    pub fn witness(&self) -> ElemId {
        self.witness
    }

    /// Number of elements reached, i.e. the order of the generated subgroup.
    pub fn reached(&self) -> usize {
        self.reached
    }

    pub fn generates(&self) -> bool {
        self.reached == self.lengths.len()
    }

    /// Generator element and the step element for a token.
    fn step(&self, group: &FiniteGroup, t: Token) -> ElemId {
        let g = self.gens[t.generator as usize];
        if t.inverse {
            group.inv(g)
        } else {
            g
        }
    }
}

fn tokens_for(gens: &[ElemId], symmetric: bool) -> Vec<Token> {
    let mut tokens: Vec<Token> = (0..gens.len() as u32).map(Token::pos).collect();
    if symmetric {
        tokens.extend((0..gens.len() as u32).map(Token::neg));
    }
    tokens
}

/// BFS from the identity over right multiplication by `gens` (and their
/// inverses when `symmetric`). Generators are explored in list order and
/// the first-discovered parent is kept.
pub fn length_table(group: &FiniteGroup, gens: &[ElemId], symmetric: bool) -> LengthTable {
    if gens.contains(&IDENTITY) {
        log::warn!(
            "generating list for {} contains the identity; it never shortens a word",
            group.name()
        );
    }
    let n = group.len();
    let tokens = tokens_for(gens, symmetric);
    let steps: Vec<ElemId> = tokens
        .iter()
        .map(|t| {
            if t.inverse {
                group.inv(gens[t.generator as usize])
            } else {
                gens[t.generator as usize]
            }
        })
        .collect();
    let mut lengths = vec![UNREACHED; n];
    let mut parent = vec![IDENTITY; n];
    let mut via = vec![Token::pos(0); n];
    lengths[IDENTITY as usize] = 0;
    let mut queue = Vec::with_capacity(n);
    queue.push(IDENTITY);
    let mut head = 0;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        let d = lengths[e as usize] + 1;
        for (t, &s) in tokens.iter().zip(&steps) {
            let next = group.mul(e, s);
            if lengths[next as usize] == UNREACHED {
                lengths[next as usize] = d;
                parent[next as usize] = e;
                via[next as usize] = *t;
                queue.push(next);
            }
        }
    }
    let (mut diameter, mut witness) = (0, IDENTITY);
    for (g, &d) in lengths.iter().enumerate() {
        if d != UNREACHED && d > diameter {
            diameter = d;
            witness = g as ElemId;
        }
    }
    LengthTable {
        gens: gens.to_vec(),
        symmetric,
        lengths,
        parent,
        via,
        diameter,
        witness,
        reached: queue.len(),
    }
}

/// Diameter without parent pointers; `None` when `gens` does not generate.
pub fn diameter(group: &FiniteGroup, gens: &[ElemId], symmetric: bool) -> Option<u32> {
    let n = group.len();
    let mut steps = gens.to_vec();
    if symmetric {
        steps.extend(gens.iter().map(|&g| group.inv(g)));
    }
    let mut lengths = vec![UNREACHED; n];
    lengths[IDENTITY as usize] = 0;
    let mut queue = Vec::with_capacity(n);
    queue.push(IDENTITY);
    let mut head = 0;
    let mut diam = 0;
    while head < queue.len() {
        let e = queue[head];
        head += 1;
        let d = lengths[e as usize] + 1;
        for &s in &steps {
            let next = group.mul(e, s);
            if lengths[next as usize] == UNREACHED {
                lengths[next as usize] = d;
                diam = d;
                queue.push(next);
            }
        }
    }
    (queue.len() == n).then_some(diam)
}

/// `max { l(s) : s ∈ subset }`.
pub fn max_length_over(table: &LengthTable, subset: &[ElemId]) -> Result<u32, WordError> {
    subset.iter().try_fold(0, |acc, &s| {
        let d = *table
            .lengths
            .get(s as usize)
            .ok_or(WordError::OutOfRange(s))?;
        if d == UNREACHED {
            Err(WordError::Unreachable(s))
        } else {
            Ok(acc.max(d))
        }
    })
}

/// A word of length exactly `table.length(g)` evaluating to `g`.
pub fn shortest_word(
    group: &FiniteGroup,
    table: &LengthTable,
    g: ElemId,
) -> Result<Word, WordError> {
    let d = *table
        .lengths
        .get(g as usize)
        .ok_or(WordError::OutOfRange(g))?;
    if d == UNREACHED {
        return Err(WordError::Unreachable(g));
    }
    let mut tokens = Vec::with_capacity(d as usize);
    let mut cur = g;
    while cur != IDENTITY {
        let t = table.via[cur as usize];
        tokens.push(t);
        cur = table.parent[cur as usize];
    }
    tokens.reverse();
    let word = Word::from_tokens(tokens);
    debug_assert_eq!(word.len() as u32, d);
    debug_assert_eq!(
        word.tokens()
            .iter()
            .fold(IDENTITY, |acc, &t| group.mul(acc, table.step(group, t))),
        g
    );
    Ok(word)
}
