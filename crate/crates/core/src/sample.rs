//! Seeded random words.
//!
//! All sampling uses ChaCha8 seeded from a single `u64`, so a seed fully
//! determines every sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::GroupPresentation;
use crate::words::{cyclic_free_reduction, Letter, Word};

pub struct WordSampler {
    rng: ChaCha8Rng,
    rank: usize,
}

impl WordSampler {
    pub fn new(seed: u64, rank: usize) -> Self {
        WordSampler { rng: ChaCha8Rng::seed_from_u64(seed), rank }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn letter(&mut self) -> Letter {
        Letter::new(self.below(self.rank), self.rng.random())
    }

    /// Uniform letters, possibly with cancellations.
    pub fn word(&mut self, len: usize) -> Word {
        Word::from_letters((0..len).map(|_| self.letter()).collect())
    }

    /// A freely reduced word of exactly `len` letters.
    pub fn reduced_word(&mut self, len: usize) -> Word {
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = self.letter();
            if letters.last() != Some(&l.inverse()) {
                letters.push(l);
            }
        }
        Word::from_letters(letters)
    }

    /// A cyclically freely reduced word of exactly `len ≥ 1` letters.
    pub fn cyclically_reduced_word(&mut self, len: usize) -> Word {
        loop {
            let w = self.reduced_word(len);
            if w.is_cyclically_freely_reduced() {
                return w;
            }
        }
    }

    /// A word of length at most `max_len` whose cyclic free reduction is
    /// nonempty, i.e. a nontrivial element of the free group.
    pub fn infinite_order_free_word(&mut self, max_len: usize) -> Word {
        loop {
            let len = 1 + self.below(max_len);
            let w = self.word(len);
            if !cyclic_free_reduction(&w).1.is_empty() {
                return w;
            }
        }
    }

    /// A random conjugate `c · r^{±1} · c⁻¹` of a relator, with `lgr(c) ≤ max_conj`.
    pub fn relator_conjugate(&mut self, p: &GroupPresentation, max_conj: usize) -> Word {
        let relators = p.relators();
        if relators.is_empty() {
            return Word::empty();
        }
        let r = &relators[self.below(relators.len())];
        let r = if self.rng.random() { r.clone() } else { r.invert() };
        let c_len = self.below(max_conj + 1);
        let c = self.word(c_len);
        c.concat(&r).concat(&c.invert())
    }

    /// `w` with `count` relator conjugates spliced in at random positions.
    /// The result spells the same group element.
    pub fn with_relator_noise(&mut self, p: &GroupPresentation, w: &Word, count: usize) -> Word {
        let mut out = w.clone();
        for _ in 0..count {
            let at = self.below(out.lgr() + 1);
            let noise = self.relator_conjugate(p, 2);
            let mut letters = out.letters()[..at].to_vec();
            letters.extend_from_slice(noise.letters());
            letters.extend_from_slice(&out.letters()[at..]);
            out = Word::from_letters(letters);
        }
        out
    }
}
