//! Group presentations and the word-problem oracle.
//!
//! Free groups are handled by free reduction. Presentations with relators use
//! Dehn's algorithm, which is only trusted once the presentation has been
//! certified to satisfy the metric small cancellation condition C'(1/6).

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::words::{Alphabet, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Free,
    Dehn,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Free => "free",
            Strategy::Dehn => "dehn",
        })
    }
}

/// All cyclic rotations of the relators and their inverses, deduplicated and
/// kept in shortlex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedRelators {
    words: Vec<Word>,
    // indices into `words`, bucketed by first letter
    by_first_letter: Vec<Vec<usize>>,
}

impl SymmetrizedRelators {
    fn new(relators: &[Word], letter_count: usize) -> Self {
        let set: BTreeSet<Word> = cyclic_positions(relators).collect();
        let mut words: Vec<Word> = set.into_iter().collect();
        words.sort_by(|a, b| a.shortlex_cmp(b));
        let mut by_first_letter = vec![Vec::new(); letter_count];
        for (i, w) in words.iter().enumerate() {
            by_first_letter[w.letters()[0].index()].push(i);
        }
        SymmetrizedRelators { words, by_first_letter }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Finds the longest subword of `w` that is more than half of some
    /// symmetrized relator, leftmost on ties. Returns `(start, matched, relator)`.
    fn longest_half_match(&self, w: &[crate::words::Letter]) -> Option<(usize, usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for start in 0..w.len() {
            for &ri in &self.by_first_letter[w[start].index()] {
                let r = self.words[ri].letters();
                let matched = r
                    .iter()
                    .zip(&w[start..])
                    .take_while(|(x, y)| x == y)
                    .count();
                if 2 * matched > r.len() && best.is_none_or(|(_, m, _)| matched > m) {
                    best = Some((start, matched, ri));
                }
            }
        }
        best
    }
}

/// Every cyclic position of every relator and of its inverse, with repeats.
fn cyclic_positions(relators: &[Word]) -> impl Iterator<Item = Word> + '_ {
    relators.iter().flat_map(|r| {
        let inv = r.invert();
        (0..r.lgr()).flat_map(move |i| {
            [
                r.rotation(i).expect("rotation index in range"),
                inv.rotation(i).expect("rotation index in range"),
            ]
        })
    })
}

/// A finite presentation together with the choice of word-problem algorithm.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    strategy: Strategy,
    delta: Option<Rational>,
    symmetrized: Option<SymmetrizedRelators>,
    certified: bool,
}

impl PartialEq for GroupPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.relators == other.relators
            && self.strategy == other.strategy
            && self.delta == other.delta
    }
}

impl Eq for GroupPresentation {}

impl GroupPresentation {
    pub fn free(alphabet: Alphabet) -> Self {
        GroupPresentation {
            alphabet,
            relators: Vec::new(),
            strategy: Strategy::Free,
            delta: None,
            symmetrized: None,
            certified: true,
        }
    }

    pub fn new(alphabet: Alphabet, relators: Vec<Word>, strategy: Strategy) -> Result<Self> {
        match strategy {
            Strategy::Free if !relators.is_empty() => {
                return Err(Error::InvalidPresentation(
                    "free strategy takes no relators".into(),
                ))
            }
            Strategy::Free => return Ok(Self::free(alphabet)),
            Strategy::Dehn if relators.is_empty() => {
                return Err(Error::InvalidPresentation(
                    "dehn strategy needs at least one relator".into(),
                ))
            }
            Strategy::Dehn => {}
        }
        for r in &relators {
            alphabet.check(r)?;
            if r.is_empty() {
                return Err(Error::InvalidPresentation("empty relator".into()));
            }
            if !r.is_cyclically_freely_reduced() {
                return Err(Error::InvalidPresentation(format!(
                    "relator {} is not cyclically freely reduced",
                    alphabet.render(r)
                )));
            }
        }
        let symmetrized = SymmetrizedRelators::new(&relators, 2 * alphabet.rank());
        let certified = satisfies_c_prime_sixth(&relators);
        Ok(GroupPresentation {
            alphabet,
            relators,
            strategy,
            delta: None,
            symmetrized: Some(symmetrized),
            certified,
        })
    }

    pub fn with_delta(mut self, delta: Rational) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidPresentation(format!(
                "delta must be nonnegative, got {delta}"
            )));
        }
        self.delta = Some(delta);
        Ok(self)
    }

    /// `F1`, `F2`, `F3` (free, delta 0) and `surface2` (genus-2 surface group,
    /// no delta).
    pub fn builtin(name: &str) -> Result<Self> {
        let free = |gens: &str| -> Result<Self> {
            Self::free(Alphabet::new(gens)?).with_delta(rational::int(0))
        };
        match name {
            "F1" => free("a"),
            "F2" => free("ab"),
            "F3" => free("abc"),
            "surface2" => {
                let alphabet = Alphabet::new("abcd")?;
                let relator = alphabet.parse_word("abABcdCD")?;
                Self::new(alphabet, vec![relator], Strategy::Dehn)
            }
            other => Err(Error::InvalidPresentation(format!(
                "unknown built-in group '{other}'"
            ))),
        }
    }

    /// Parses the line-based presentation file format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut generators = None;
        let mut relators_text = None;
        let mut strategy = None;
        let mut delta = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| {
                Error::InvalidPresentation(format!("line {}: expected 'key: value'", lineno + 1))
            })?;
            let value = value.trim();
            match key.trim() {
                "generators" => generators = Some(value.to_string()),
                "relators" => relators_text = Some(value.to_string()),
                "strategy" => {
                    strategy = Some(match value {
                        "free" => Strategy::Free,
                        "dehn" => Strategy::Dehn,
                        other => {
                            return Err(Error::InvalidPresentation(format!(
                                "line {}: unknown strategy '{other}'",
                                lineno + 1
                            )))
                        }
                    })
                }
                "delta" => delta = Some(rational::parse(value)?),
                other => {
                    return Err(Error::InvalidPresentation(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        let alphabet = Alphabet::new(
            &generators.ok_or_else(|| Error::InvalidPresentation("missing generators".into()))?,
        )?;
        let relators = match relators_text {
            Some(t) if !t.is_empty() => t
                .split(',')
                .map(|r| alphabet.parse_word(r.trim()))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        let strategy = strategy.unwrap_or(if relators.is_empty() {
            Strategy::Free
        } else {
            Strategy::Dehn
        });
        let p = Self::new(alphabet, relators, strategy)?;
        match delta {
            Some(d) => p.with_delta(d),
            None => Ok(p),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Built-in name, or else a path to a presentation file.
    pub fn resolve(source: &str) -> Result<Self> {
        match Self::builtin(source) {
            Ok(p) => Ok(p),
            Err(_) if Path::new(source).exists() => Self::load(Path::new(source)),
            Err(e) => Err(e),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("generators: {}\n", self.alphabet.symbols().iter().collect::<String>());
        if !self.relators.is_empty() {
            let rels: Vec<String> = self.relators.iter().map(|r| self.alphabet.render(r)).collect();
            out += &format!("relators: {}\n", rels.join(","));
        }
        out += &format!("strategy: {}\n", self.strategy);
        if let Some(d) = &self.delta {
            out += &format!("delta: {}\n", rational::to_decimal(d, 12));
        }
        out
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn delta(&self) -> Option<&Rational> {
        self.delta.as_ref()
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn render(&self, w: &Word) -> String {
        self.alphabet.render(w)
    }

    pub fn symmetrize(&self) -> Result<&SymmetrizedRelators> {
        self.symmetrized.as_ref().ok_or(Error::NoRelators)
    }

    pub fn verify_small_cancellation(&self) -> Result<bool> {
        self.symmetrize()?;
        Ok(self.certified)
    }

    /// Greedy Dehn reduction. For free presentations this is free reduction.
    pub fn dehn_reduce(&self, w: &Word) -> Word {
        let mut current = w.free_reduce();
        let Some(sym) = &self.symmetrized else {
            return current;
        };
        while let Some((start, matched, ri)) = sym.longest_half_match(current.letters()) {
            let r = sym.words[ri].letters();
            let letters = current.letters();
            let mut next = Vec::with_capacity(letters.len());
            next.extend_from_slice(&letters[..start]);
            next.extend(r[matched..].iter().rev().map(|l| l.inverse()));
            next.extend_from_slice(&letters[start + matched..]);
            current = Word::from_letters(next).free_reduce();
        }
        current
    }

    fn check_oracle(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::Uncertified)
        }
    }

    pub fn is_identity(&self, w: &Word) -> Result<bool> {
        self.check_oracle()?;
        Ok(self.dehn_reduce(w).is_empty())
    }

    pub fn equal(&self, w1: &Word, w2: &Word) -> Result<bool> {
        self.is_identity(&w1.concat(&w2.invert()))
    }

    /// True when every relator has even length, so word length parity is an
    /// invariant of group elements.
    pub fn preserves_parity(&self) -> bool {
        self.relators.iter().all(|r| r.lgr() % 2 == 0)
    }

    /// Generators whose exponent sum vanishes on every relator. Their exponent
    /// sums are invariants of group elements.
    pub fn invariant_generators(&self) -> Vec<usize> {
        let rank = self.alphabet.rank();
        let sums: Vec<Vec<i32>> = self.relators.iter().map(|r| r.exponent_sums(rank)).collect();
        (0..rank).filter(|&g| sums.iter().all(|s| s[g] == 0)).collect()
    }
}

/// Metric small cancellation C'(1/6): every piece is shorter than a sixth of
/// each relator containing it. Pieces are common prefixes of two distinct
/// cyclic positions, so proper powers and repeated relators fail.
fn satisfies_c_prime_sixth(relators: &[Word]) -> bool {
    let positions: Vec<Word> = cyclic_positions(relators).collect();
    for (i, p) in positions.iter().enumerate() {
        for q in &positions[i + 1..] {
            let piece = p
                .letters()
                .iter()
                .zip(q.letters())
                .take_while(|(x, y)| x == y)
                .count();
            if 6 * piece >= p.lgr() || 6 * piece >= q.lgr() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::Strategy;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn surface2() -> GroupPresentation {
        GroupPresentation::builtin("surface2").unwrap()
    }

    fn f2() -> GroupPresentation {
        GroupPresentation::builtin("F2").unwrap()
    }

    fn dehn(gens: &str, rels: &[&str]) -> Result<GroupPresentation> {
        let alphabet = Alphabet::new(gens)?;
        let rels = rels
            .iter()
            .map(|r| alphabet.parse_word(r))
            .collect::<Result<Vec<_>>>()?;
        GroupPresentation::new(alphabet, rels, Strategy::Dehn)
    }

    /// Brute force: every rotation of every relator and inverse, into a set.
    fn symmetrize_by_hand(p: &GroupPresentation) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for r in p.relators() {
            let text = p.render(r);
            let inv = p.render(&r.invert());
            for i in 0..text.len() {
                out.insert(format!("{}{}", &text[i..], &text[..i]));
                out.insert(format!("{}{}", &inv[i..], &inv[..i]));
            }
        }
        out
    }

    #[test]
    fn symmetrize_commutator_gives_eight_words() {
        let p = dehn("ab", &["abAB"]).unwrap();
        let sym = p.symmetrize().unwrap();
        assert_eq!(sym.len(), 8);
        let got: BTreeSet<String> = sym.words().iter().map(|w| p.render(w)).collect();
        assert_eq!(got, symmetrize_by_hand(&p));
    }

    #[test]
    fn symmetrize_square_dedupes_rotations() {
        let p = dehn("a", &["aa"]).unwrap();
        let got: Vec<String> = p.symmetrize().unwrap().words().iter().map(|w| p.render(w)).collect();
        assert_eq!(got, ["aa", "AA"]);
    }

    #[test]
    fn symmetrize_surface_relator() {
        let p = surface2();
        let sym = p.symmetrize().unwrap();
        assert_eq!(sym.len(), 16);
        let got: BTreeSet<String> = sym.words().iter().map(|w| p.render(w)).collect();
        assert_eq!(got, symmetrize_by_hand(&p));
        assert!(sym.words().iter().all(|w| w.lgr() == 8));
    }

    #[test]
    fn construction_rejects_invalid_presentations() {
        assert!(dehn("ab", &[]).is_err());
        assert!(dehn("ab", &["aAb"]).is_err());
        assert!(dehn("ab", &["abA"]).is_err());
        assert!(dehn("ab", &["ac"]).is_err());
        let alphabet = Alphabet::new("ab").unwrap();
        let r = alphabet.parse_word("ab").unwrap();
        assert!(GroupPresentation::new(alphabet, vec![r], Strategy::Free).is_err());
        assert!(f2().with_delta(rational::int(-1)).is_err());
        assert_eq!(f2().symmetrize().unwrap_err(), Error::NoRelators);
        assert!(f2().verify_small_cancellation().is_err());
    }

    /// Brute force piece enumeration over all pairs of cyclic positions.
    fn max_piece_ratio_ok(p: &GroupPresentation) -> bool {
        let mut positions = Vec::new();
        for r in p.relators() {
            let text = p.render(r);
            let inv = p.render(&r.invert());
            for i in 0..text.len() {
                positions.push(format!("{}{}", &text[i..], &text[..i]));
                positions.push(format!("{}{}", &inv[i..], &inv[..i]));
            }
        }
        let mut ok = true;
        for i in 0..positions.len() {
            for j in 0..positions.len() {
                if i == j {
                    continue;
                }
                let (x, y) = (positions[i].as_bytes(), positions[j].as_bytes());
                let piece = (0..x.len().min(y.len())).take_while(|&k| x[k] == y[k]).count();
                ok &= (piece as f64) < x.len() as f64 / 6.0;
            }
        }
        ok
    }

    #[test]
    fn small_cancellation_examples() {
        let s = surface2();
        assert!(s.verify_small_cancellation().unwrap());
        assert!(max_piece_ratio_ok(&s));
        let cube = dehn("a", &["aaa"]).unwrap();
        assert!(!cube.verify_small_cancellation().unwrap());
        assert!(!max_piece_ratio_ok(&cube));
        let long = dehn("abcdefghijkl", &["abcdefghijkla"]).unwrap();
        assert!(long.verify_small_cancellation().unwrap());
        assert!(max_piece_ratio_ok(&long));
        let commutator = dehn("ab", &["abAB"]).unwrap();
        assert!(!commutator.verify_small_cancellation().unwrap());
    }

    #[test]
    fn uncertified_oracle_refuses() {
        let p = dehn("ab", &["abAB"]).unwrap();
        assert_eq!(p.is_identity(&Word::empty()), Err(Error::Uncertified));
        assert_eq!(
            p.equal(&Word::empty(), &Word::empty()),
            Err(Error::Uncertified)
        );
    }

    #[test]
    fn dehn_reduce_examples() {
        let s = surface2();
        assert!(s.dehn_reduce(&s.parse_word("abABcdCD").unwrap()).is_empty());
        assert!(s.dehn_reduce(&s.parse_word("aA").unwrap()).is_empty());
        assert!(f2().dehn_reduce(&f2().parse_word("aA").unwrap()).is_empty());
        let w = f2().parse_word("abAB").unwrap();
        assert_eq!(f2().dehn_reduce(&w), w);
    }

    #[test]
    fn dehn_replaces_long_half_by_complement() {
        let s = surface2();
        // five letters of the relator become the inverse of the other three
        let w = s.parse_word("abABc").unwrap();
        assert_eq!(s.render(&s.dehn_reduce(&w)), "dcD");
        // exactly half is left alone
        let half = s.parse_word("abAB").unwrap();
        assert_eq!(s.dehn_reduce(&half), half);
    }

    #[test]
    fn is_identity_examples() {
        let s = surface2();
        assert!(s.is_identity(&Word::empty()).unwrap());
        assert!(!f2().is_identity(&f2().parse_word("abAB").unwrap()).unwrap());
        // a · [a,b][c,d] · a⁻¹
        assert!(s.is_identity(&s.parse_word("aabABcdCDA").unwrap()).unwrap());
        assert!(!s.is_identity(&s.parse_word("abAB").unwrap()).unwrap());
    }

    #[test]
    fn equal_examples() {
        let f = f2();
        let w = |t: &str| f.parse_word(t).unwrap();
        assert!(f.equal(&w("ab"), &w("ab")).unwrap());
        assert!(!f.equal(&w("ab"), &w("ba")).unwrap());
        assert!(f.equal(&w("ba"), &w("babB")).unwrap());
    }

    #[test]
    fn invariants_of_surface_group() {
        let s = surface2();
        assert!(s.preserves_parity());
        assert_eq!(s.invariant_generators(), vec![0, 1, 2, 3]);
        let p = dehn("ab", &["aabbb"]).unwrap();
        assert!(!p.preserves_parity());
        assert!(p.invariant_generators().is_empty());
    }

    #[test]
    fn file_format_round_trip() {
        let text = "# genus two\ngenerators: abcd\nrelators: abABcdCD\nstrategy: dehn\ndelta: 0.5\n";
        let p = GroupPresentation::parse(text).unwrap();
        assert_eq!(p.strategy(), Strategy::Dehn);
        assert_eq!(p.delta(), Some(&rational::ratio(1, 2)));
        assert_eq!(p.relators().len(), 1);
        assert_eq!(GroupPresentation::parse(&p.to_text()).unwrap(), p);

        let free = GroupPresentation::parse("generators: ab\nstrategy: free\n").unwrap();
        assert_eq!(free.strategy(), Strategy::Free);
        assert_eq!(free.delta(), None);

        assert!(GroupPresentation::parse("generators: ab\nrelators: ac\n").is_err());
        assert!(GroupPresentation::parse("generators: ab\ncolour: red\n").is_err());
        assert!(GroupPresentation::parse("relators: ab\n").is_err());
        assert!(GroupPresentation::parse("generators: ab\nstrategy: knuth\n").is_err());
        assert!(GroupPresentation::parse("generators: ab\ndelta: -1\n").is_err());
    }

    #[test]
    fn builtins() {
        for (name, rank) in [("F1", 1), ("F2", 2), ("F3", 3), ("surface2", 4)] {
            let p = GroupPresentation::builtin(name).unwrap();
            assert_eq!(p.alphabet().rank(), rank);
        }
        assert_eq!(f2().delta(), Some(&rational::int(0)));
        assert_eq!(surface2().delta(), None);
        assert!(GroupPresentation::builtin("F9").is_err());
    }

    fn surface_word() -> impl proptest::strategy::Strategy<Value = Word> {
        prop::collection::vec((0usize..4, any::<bool>()), 0..14).prop_map(|v| {
            Word::from_letters(
                v.into_iter()
                    .map(|(g, i)| crate::words::Letter::new(g, i))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn dehn_reduce_shortens_and_is_idempotent(w in surface_word()) {
            let s = surface2();
            let r = s.dehn_reduce(&w);
            prop_assert!(r.lgr() <= w.lgr());
            prop_assert_eq!(s.dehn_reduce(&r), r.clone());
            prop_assert!(s.equal(&w, &r).unwrap());
        }

        #[test]
        fn free_strategy_is_free_reduction(w in surface_word()) {
            let f4 = GroupPresentation::free(Alphabet::new("abcd").unwrap());
            prop_assert_eq!(f4.dehn_reduce(&w), w.free_reduce());
        }

        #[test]
        fn conjugated_relators_are_trivial(c in prop::collection::vec((0usize..4, any::<bool>()), 0..=3), inverse in any::<bool>()) {
            let s = surface2();
            let c = Word::from_letters(c.into_iter().map(|(g, i)| crate::words::Letter::new(g, i)).collect());
            let r = s.relators()[0].power(if inverse { -1 } else { 1 });
            prop_assert!(s.is_identity(&c.concat(&r).concat(&c.invert())).unwrap());
        }

        #[test]
        fn equal_is_an_equivalence(x in surface_word(), y in surface_word(), z in surface_word()) {
            let s = surface2();
            prop_assert!(s.equal(&x, &x).unwrap());
            prop_assert_eq!(s.equal(&x, &y).unwrap(), s.equal(&y, &x).unwrap());
            if s.equal(&x, &y).unwrap() && s.equal(&y, &z).unwrap() {
                prop_assert!(s.equal(&x, &z).unwrap());
            }
        }
    }
}
