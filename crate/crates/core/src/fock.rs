//! Words over a finite alphabet and the truncated full Fock space.
//!
//! The Fock space over `C^d` truncated at word length `N`, tensored with a
//! multiplicity space of dimension `m`, is modelled as `C^(count * m)` where
//! `count` is the number of words of length at most `N`. Basis vectors are
//! ordered word-major: the block of word `w` occupies coordinates
//! `w_index * m .. (w_index + 1) * m`, and words are enumerated in
//! length-lexicographic order (shorter words first), so level blocks are
//! contiguous. Index 0 is the vacuum.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use ndarray::s;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

/// A word in the free monoid over the alphabet `{1, ..., d}`.
///
/// The empty word is the monoid unit. Letters are 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, checking every letter against the alphabet size.
    pub fn new(letters: &[u8], d: usize) -> Result<Self> {
        for &l in letters {
            if l == 0 || l as usize > d {
                return Err(Error::LetterOutOfRange { letter: l, d });
            }
        }
        Ok(Word(letters.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Concatenation: `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Prepends a single letter.
    pub fn prepend(&self, letter: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Appends a single letter.
    pub fn append(&self, letter: u8) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Splits off the first letter: `(head, tail)` with `self = head . tail`.
    pub fn split_first(&self) -> Option<(u8, Word)> {
        self.0.split_first().map(|(&h, t)| (h, Word(t.to_vec())))
    }

    /// All splittings `self = prefix . suffix`, including the trivial ones.
    pub fn splittings(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.0.len()).map(move |k| (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec())))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Length-lexicographic order: by length first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Number of words of length at most `max_len` over `d` letters.
pub fn word_count(d: usize, max_len: usize) -> usize {
    if d == 1 {
        return max_len + 1;
    }
    // (d^(N+1) - 1) / (d - 1)
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=max_len {
        total += level;
        level *= d;
    }
    total
}

/// All words of length at most `max_len` in length-lexicographic order.
/// Index 0 is the empty word, and the enumeration is prefix-closed.
pub fn enumerate_words(d: usize, max_len: usize) -> Result<Vec<Word>> {
    if d == 0 {
        return Err(Error::ZeroAlphabet);
    }
    if d > u8::MAX as usize {
        return Err(Error::InvalidInput(format!(
            "alphabet size {d} exceeds the supported maximum {}",
            u8::MAX
        )));
    }
    let mut words = Vec::with_capacity(word_count(d, max_len));
    words.push(Word::empty());
    let mut level_start = 0;
    for _ in 1..=max_len {
        let level_end = words.len();
        for idx in level_start..level_end {
            let base = words[idx].clone();
            for l in 1..=d as u8 {
                words.push(base.append(l));
            }
        }
        level_start = level_end;
    }
    Ok(words)
}

/// Index data for the truncated Fock space `Gamma_N(C^d) (x) C^m`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    d: usize,
    max_len: usize,
    mult: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    level_offsets: Vec<usize>,
}

impl FockBasis {
    /// `d`: alphabet size (>= 1); `max_len`: truncation length N;
    /// `mult`: multiplicity dimension (0 is allowed and gives a
    /// zero-dimensional space).
    pub fn new(d: usize, max_len: usize, mult: usize) -> Result<Self> {
        let words = enumerate_words(d, max_len)?;
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let mut level_offsets = Vec::with_capacity(max_len + 2);
        let mut off = 0;
        let mut level = 1usize;
        for _ in 0..=max_len {
            level_offsets.push(off);
            off += level;
            level *= d;
        }
        level_offsets.push(off);
        Ok(FockBasis {
            d,
            max_len,
            mult,
            words,
            index,
            level_offsets,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn mult(&self) -> usize {
        self.mult
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Total dimension `word_count * mult`.
    pub fn dim(&self) -> usize {
        self.words.len() * self.mult
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &Word {
        &self.words[idx]
    }

    pub fn word_index(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Offset of the first word of length `n` in the enumeration.
    pub fn level_offset(&self, n: usize) -> usize {
        self.level_offsets[n]
    }

    /// Word-index range of level `n`.
    pub fn level_range(&self, n: usize) -> std::ops::Range<usize> {
        self.level_offsets[n]..self.level_offsets[n + 1]
    }

    /// Matrix of the truncated creation operator `L_i (x) 1`, sending the
    /// block of word `w` to the block of word `i.w` and compressing the top
    /// level (`|w| = N`) to zero.
    pub fn creation_matrix(&self, letter: u8) -> Result<CMat> {
        if letter == 0 || letter as usize > self.d {
            return Err(Error::LetterOutOfRange { letter, d: self.d });
        }
        let n = self.dim();
        let mut out = CMat::zeros((n, n));
        for (src, w) in self.words.iter().enumerate() {
            if w.len() == self.max_len {
                continue;
            }
            let dst = self.index[&w.prepend(letter)];
            for k in 0..self.mult {
                out[(dst * self.mult + k, src * self.mult + k)] = c(1.0, 0.0);
            }
        }
        Ok(out)
    }

    /// All truncated creation operators, in letter order.
    pub fn creation_all(&self) -> Result<Vec<CMat>> {
        (1..=self.d as u8)
            .map(|l| self.creation_matrix(l))
            .collect()
    }

    /// Orthogonal projection onto the levels `lo..=hi`.
    pub fn level_projection(&self, lo: usize, hi: usize) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros((n, n));
        for (idx, w) in self.words.iter().enumerate() {
            if w.len() >= lo && w.len() <= hi {
                for k in 0..self.mult {
                    let p = idx * self.mult + k;
                    out[(p, p)] = c(1.0, 0.0);
                }
            }
        }
        out
    }

    /// Copies the block of `word_idx` out of a vector on this space.
    pub fn block_of<'a>(
        &self,
        vec: &'a ndarray::Array1<crate::linalg::C64>,
        word_idx: usize,
    ) -> ndarray::ArrayView1<'a, crate::linalg::C64> {
        vec.slice(s![word_idx * self.mult..(word_idx + 1) * self.mult])
    }
}
