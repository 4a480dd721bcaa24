//! Alphabets and the free word algebra over them.
//!
//! A word is a finite sequence of signed generator letters. Nothing here knows
//! about relators: all operations act on words as strings over `S ∪ S⁻¹`.

use std::fmt;

use crate::error::{Error, Result};

/// A signed generator letter.
///
/// Encoded as `2 * generator + inverse` so that the derived ordering is the
/// shortlex letter order `a < A < b < B < …` and inversion is a bit flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < MAX_GENERATORS);
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// +1 for a generator, -1 for its inverse.
    pub fn sign(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2 * rank`, following the letter order.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub const MAX_GENERATORS: usize = 26;

/// An ordered set of generator symbols (single lowercase Latin letters).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if symbols.len() > MAX_GENERATORS {
            return Err(Error::InvalidAlphabet(format!(
                "{} generators, at most {MAX_GENERATORS} allowed",
                symbols.len()
            )));
        }
        for (i, &c) in symbols.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::InvalidAlphabet(format!(
                    "generator '{c}' is not a lowercase latin letter"
                )));
            }
            if symbols[..i].contains(&c) {
                return Err(Error::InvalidAlphabet(format!("duplicate generator '{c}'")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    /// All `2 * rank` letters in shortlex order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.rank()).flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
    }

    pub fn symbol(&self, letter: Letter) -> char {
        let c = self.symbols[letter.generator()];
        if letter.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::with_capacity(text.len());
        for (i, ch) in text.chars().enumerate() {
            let lower = ch.to_ascii_lowercase();
            let generator = self
                .symbols
                .iter()
                .position(|&s| s == lower)
                .filter(|_| ch.is_ascii_alphabetic())
                .ok_or(Error::UnknownLetter { ch, position: i + 1 })?;
            letters.push(Letter::new(generator, ch.is_ascii_uppercase()));
        }
        Ok(Word { letters })
    }

    /// Checks that every letter of `word` names a generator of this alphabet.
    pub fn check(&self, word: &Word) -> Result<()> {
        match word.letters().iter().find(|l| l.generator() >= self.rank()) {
            Some(l) => Err(Error::AlphabetMismatch {
                generator: l.generator(),
                rank: self.rank(),
            }),
            None => Ok(()),
        }
    }

    pub fn render(&self, word: &Word) -> String {
        word.letters().iter().map(|&l| self.symbol(l)).collect()
    }

    pub fn display<'a>(&'a self, word: &'a Word) -> DisplayWord<'a> {
        DisplayWord { alphabet: self, word }
    }
}

pub struct DisplayWord<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in self.word.letters() {
            write!(f, "{}", self.alphabet.symbol(l))?;
        }
        Ok(())
    }
}

/// An immutable word over some alphabet. The empty word is the identity.
///
/// The derived ordering is lexicographic on letters; use [`Word::shortlex_cmp`]
/// for the shortlex order used by normal forms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letter(letter: Letter) -> Self {
        Word { letters: vec![letter] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    /// Number of letters, without any reduction.
    pub fn lgr(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inverse())
    }

    /// Freely reduced with no cancellation across the cyclic seam.
    pub fn is_cyclically_freely_reduced(&self) -> bool {
        self.is_freely_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(&first), Some(&last)) => self.letters.len() == 1 || first != last.inverse(),
                _ => true,
            }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.lgr() + other.lgr());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// `|n|` copies of the word, or of its inverse when `n < 0`.
    pub fn power(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        Word {
            letters: base.letters.repeat(n.unsigned_abs() as usize),
        }
    }

    /// Moves the first `i` letters to the end.
    pub fn rotation(&self, i: usize) -> Result<Word> {
        let bound = self.lgr().max(1);
        if i >= bound {
            return Err(Error::RotationOutOfRange { index: i, len: self.lgr() });
        }
        let mut letters = self.letters[i..].to_vec();
        letters.extend_from_slice(&self.letters[..i]);
        Ok(Word { letters })
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word::from_letters(self.letters[..len].to_vec())
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word::from_letters(self.letters[start..start + len].to_vec())
    }

    /// Appends one letter, returning a new word.
    pub fn with_letter(&self, letter: Letter) -> Word {
        let mut letters = Vec::with_capacity(self.lgr() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(letter);
        Word { letters }
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i32> {
        let mut sums = vec![0; rank];
        for l in &self.letters {
            sums[l.generator()] += l.sign();
        }
        sums
    }

    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.lgr()
            .cmp(&other.lgr())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

/// Free reduction followed by removal of inverse pairs across the seam.
///
/// Returns `(conjugator, core)` with `free_reduce(w) = conjugator · core · conjugator⁻¹`.
pub fn cyclic_free_reduction(w: &Word) -> (Word, Word) {
    let reduced = w.free_reduce();
    let letters = reduced.letters();
    let (mut lo, mut hi) = (0, letters.len());
    while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    (
        Word::from_letters(letters[..lo].to_vec()),
        Word::from_letters(letters[lo..hi].to_vec()),
    )
}
