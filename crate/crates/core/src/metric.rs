//! The word metric, realized by breadth-first search in the Cayley graph.
//!
//! Balls are grown level by level. A candidate vertex `e·x` is admitted only
//! if the word-problem oracle finds it equal to no entry already present; the
//! first word found for an element is its shortlex-least geodesic.
//!
//! Element lengths in Dehn presentations are computed meet-in-the-middle: an
//! element of length `t` splits as `h · x` with `|h| = ⌈t/2⌉` and
//! `|x| = ⌊t/2⌋`, so a ball of radius `⌈R_max/2⌉` answers every length up to
//! `R_max`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::group::{GroupPresentation, Strategy};
use crate::rational::{self, Rational};
use crate::words::Word;

pub const DEFAULT_RMAX: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallEntry {
    pub normal_form: Word,
    pub length: usize,
}

/// A Cayley ball around the identity with an equality index.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    entries: Vec<BallEntry>,
    // entries of length l live in entries[level_starts[l]..level_starts[l + 1]]
    level_starts: Vec<usize>,
    // exponent sums over invariant generators -> entry indices, ascending
    index: HashMap<Vec<i32>, Vec<usize>>,
    invariant_generators: Vec<usize>,
    parity: bool,
}

impl Ball {
    fn unit(p: &GroupPresentation) -> Self {
        let invariant_generators = p.invariant_generators();
        let mut ball = Ball {
            radius: 0,
            entries: Vec::new(),
            level_starts: vec![0],
            index: HashMap::new(),
            invariant_generators,
            parity: p.preserves_parity(),
        };
        ball.push(Word::empty(), 0);
        ball.level_starts.push(1);
        ball
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries of exactly the given length.
    pub fn sphere(&self, length: usize) -> &[BallEntry] {
        if length > self.radius {
            return &[];
        }
        &self.entries[self.level_starts[length]..self.level_starts[length + 1]]
    }

    fn key(&self, w: &Word) -> Vec<i32> {
        let rank = w.letters().iter().map(|l| l.generator() + 1).max().unwrap_or(0);
        let sums = w.exponent_sums(rank);
        self.invariant_generators
            .iter()
            .map(|&g| sums.get(g).copied().unwrap_or(0))
            .collect()
    }

    fn push(&mut self, w: Word, length: usize) {
        let key = self.key(&w);
        self.index.entry(key).or_default().push(self.entries.len());
        self.entries.push(BallEntry { normal_form: w, length });
    }

    /// Index of the entry equal to `w` among those whose length lies in
    /// `lengths`.
    fn find_among(
        &self,
        p: &GroupPresentation,
        w: &Word,
        lengths: std::ops::RangeInclusive<usize>,
    ) -> Result<Option<usize>> {
        let Some(bucket) = self.index.get(&self.key(w)) else {
            return Ok(None);
        };
        for &i in bucket {
            let e = &self.entries[i];
            if !lengths.contains(&e.length) {
                continue;
            }
            if self.parity && (e.length + w.lgr()) % 2 == 1 {
                continue;
            }
            if p.equal(w, &e.normal_form)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// The entry representing the same element as `w`, if any.
    pub fn find(&self, p: &GroupPresentation, w: &Word) -> Result<Option<&BallEntry>> {
        Ok(self
            .find_among(p, w, 0..=self.radius)?
            .map(|i| &self.entries[i]))
    }

    fn grow(&mut self, p: &GroupPresentation, radius: usize) -> Result<()> {
        let letters: Vec<_> = p.alphabet().letters().collect();
        while self.radius < radius {
            let level = self.radius + 1;
            let previous = self.level_starts[level - 1]..self.level_starts[level];
            for ei in previous {
                for &x in &letters {
                    let e = &self.entries[ei].normal_form;
                    if e.letters().last() == Some(&x.inverse()) {
                        continue;
                    }
                    let candidate = e.with_letter(x);
                    if p.dehn_reduce(&candidate).lgr() < level {
                        continue;
                    }
                    let lowest = level.saturating_sub(2);
                    if self.find_among(p, &candidate, lowest..=level)?.is_none() {
                        self.push(candidate, level);
                    }
                }
            }
            self.level_starts.push(self.entries.len());
            self.radius = level;
        }
        Ok(())
    }

    /// The sub-ball of entries with length at most `radius`.
    pub fn truncate(&self, radius: usize) -> Ball {
        if radius >= self.radius {
            return self.clone();
        }
        let end = self.level_starts[radius + 1];
        let mut index: HashMap<Vec<i32>, Vec<usize>> = HashMap::new();
        for (key, ids) in &self.index {
            let kept: Vec<usize> = ids.iter().copied().filter(|&i| i < end).collect();
            if !kept.is_empty() {
                index.insert(key.clone(), kept);
            }
        }
        Ball {
            radius,
            entries: self.entries[..end].to_vec(),
            level_starts: self.level_starts[..radius + 2].to_vec(),
            index,
            invariant_generators: self.invariant_generators.clone(),
            parity: self.parity,
        }
    }
}

/// The bi-infinite path traced by repeating a period word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPath {
    period: Word,
}

impl PeriodicPath {
    pub fn new(period: Word) -> Result<Self> {
        if period.is_empty() || !period.is_freely_reduced() {
            return Err(Error::InvalidPresentation(
                "a periodic path needs a nonempty freely reduced period".into(),
            ));
        }
        Ok(PeriodicPath { period })
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn window(&self, periods: usize) -> Word {
        self.period.power(periods as i64)
    }
}

/// Word metric of a presentation, with a shared, growing ball cache.
#[derive(Debug)]
pub struct WordMetric {
    presentation: GroupPresentation,
    rmax: usize,
    cache: RwLock<Arc<Ball>>,
}

impl WordMetric {
    pub fn new(presentation: GroupPresentation) -> Result<Self> {
        Self::with_rmax(presentation, DEFAULT_RMAX)
    }

    pub fn with_rmax(presentation: GroupPresentation, rmax: usize) -> Result<Self> {
        if !presentation.is_certified() {
            return Err(Error::Uncertified);
        }
        let cache = RwLock::new(Arc::new(Ball::unit(&presentation)));
        Ok(WordMetric { presentation, rmax, cache })
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn rmax(&self) -> usize {
        self.rmax
    }

    fn check(&self, w: &Word) -> Result<()> {
        self.presentation.alphabet().check(w)
    }

    /// A cached ball of radius at least `radius`.
    fn cached_ball(&self, radius: usize) -> Result<Arc<Ball>> {
        {
            let ball = self.cache.read().unwrap_or_else(|e| e.into_inner());
            if ball.radius >= radius {
                return Ok(Arc::clone(&ball));
            }
        }
        let mut slot = self.cache.write().unwrap_or_else(|e| e.into_inner());
        if slot.radius < radius {
            let mut grown = (**slot).clone();
            grown.grow(&self.presentation, radius)?;
            *slot = Arc::new(grown);
        }
        Ok(Arc::clone(&slot))
    }

    pub fn ball(&self, radius: usize) -> Result<Ball> {
        if radius > self.rmax {
            return Err(Error::RadiusTooLarge { radius, rmax: self.rmax });
        }
        Ok(self.cached_ball(radius)?.truncate(radius))
    }

    /// `|g|` for the element `g` spelled by `w`.
    ///
    /// Free presentations answer exactly by free reduction, with no radius
    /// limit.
    pub fn element_length(&self, w: &Word) -> Result<usize> {
        self.check(w)?;
        let p = &self.presentation;
        let reduced = p.dehn_reduce(w);
        if p.strategy() == Strategy::Free || reduced.is_empty() {
            return Ok(reduced.lgr());
        }
        let upper = reduced.lgr();
        let target = upper.min(self.rmax);
        let ball = self.cached_ball(target.div_ceil(2))?;

        let rank = p.alphabet().rank();
        let sums = reduced.exponent_sums(rank);
        let invariant = p.invariant_generators();
        let lower: usize = invariant.iter().map(|&g| sums[g].unsigned_abs() as usize).sum();
        let step = if p.preserves_parity() { 2 } else { 1 };
        let start = if step == 2 && (lower + upper) % 2 == 1 { lower + 1 } else { lower };

        for t in (start..=target).step_by(step) {
            let head = t.div_ceil(2);
            let tail = t - head;
            for h in ball.sphere(head) {
                let hs = h.normal_form.exponent_sums(rank);
                let gap: usize = invariant
                    .iter()
                    .map(|&g| (sums[g] - hs[g]).unsigned_abs() as usize)
                    .sum();
                if gap > tail {
                    continue;
                }
                let rest = h.normal_form.invert().concat(&reduced);
                if ball.find_among(p, &rest, tail..=tail)?.is_some() {
                    return Ok(t);
                }
            }
        }
        Err(Error::LengthExceeded { rmax: self.rmax })
    }

    pub fn distance(&self, w1: &Word, w2: &Word) -> Result<usize> {
        self.element_length(&w1.invert().concat(w2))
    }

    pub fn is_geodesic(&self, w: &Word) -> Result<bool> {
        if self.presentation.dehn_reduce(w).lgr() < w.lgr() {
            self.check(w)?;
            return Ok(false);
        }
        Ok(self.element_length(w)? == w.lgr())
    }

    /// Every cyclic conjugate is geodesic.
    pub fn is_cyclically_reduced(&self, w: &Word) -> Result<bool> {
        for i in 0..w.lgr().max(1) {
            if !self.is_geodesic(&w.rotation(i)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every subpath of length at most `k` of the periodic path is geodesic.
    ///
    /// By periodicity it suffices to look at length-`k` subwords starting in
    /// the first period of a window of `⌈k/lgr⌉ + 1` periods; shorter subpaths
    /// are subwords of these.
    pub fn is_k_local_geodesic(&self, path: &PeriodicPath, k: usize) -> Result<bool> {
        if k == 0 {
            return Err(Error::InvalidConstants("k must be at least 1".into()));
        }
        let len = path.period().lgr();
        let window = path.window(k.div_ceil(len) + 1);
        for offset in 0..len {
            if !self.is_geodesic(&window.subword(offset, k))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `n·lgr(w) ≤ λ·|wⁿ| + ε`.
    pub fn quasigeodesic_check(
        &self,
        w: &Word,
        n: usize,
        lambda: &Rational,
        eps: &Rational,
    ) -> Result<bool> {
        if n == 0 {
            return Err(Error::InvalidConstants("n must be at least 1".into()));
        }
        let len = self.element_length(&w.power(n as i64))?;
        let lhs = rational::int((n * w.lgr()) as i64);
        Ok(lhs <= lambda * rational::int(len as i64) + eps)
    }

    /// Shortlex-least geodesic for the element of `w`.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let p = &self.presentation;
        if p.strategy() == Strategy::Free {
            self.check(w)?;
            return Ok(w.free_reduce());
        }
        let length = self.element_length(w)?;
        {
            let ball = self.cache.read().unwrap_or_else(|e| e.into_inner());
            if ball.radius >= length {
                let entry = ball
                    .find_among(p, w, length..=length)?
                    .expect("element of known length is in the ball");
                return Ok(ball.entries[entry].normal_form.clone());
            }
        }
        // greedy: the least first letter that stays on a geodesic
        let mut remaining = p.dehn_reduce(w);
        let mut out = Vec::with_capacity(length);
        for left in (0..length).rev() {
            let mut next = None;
            for x in p.alphabet().letters() {
                let rest = Word::letter(x.inverse()).concat(&remaining);
                if self.element_length(&rest)? == left {
                    next = Some((x, rest));
                    break;
                }
            }
            let (x, rest) = next.expect("some letter lies on a geodesic");
            out.push(x);
            remaining = p.dehn_reduce(&rest);
        }
        Ok(Word::from_letters(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use std::collections::HashSet;

    fn metric(name: &str) -> WordMetric {
        WordMetric::new(GroupPresentation::builtin(name).unwrap()).unwrap()
    }

    fn w(m: &WordMetric, text: &str) -> Word {
        m.presentation().parse_word(text).unwrap()
    }

    /// Independent BFS for free groups: enumerate freely reduced words.
    fn free_ball_size(rank: usize, radius: usize) -> usize {
        let alphabet = Alphabet::new(&"abcdefgh"[..rank]).unwrap();
        let letters: Vec<_> = alphabet.letters().collect();
        let mut seen: HashSet<Word> = HashSet::from([Word::empty()]);
        let mut frontier = vec![Word::empty()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for v in &frontier {
                for &x in &letters {
                    let u = v.with_letter(x).free_reduce();
                    if seen.insert(u.clone()) {
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        seen.len()
    }

    #[test]
    fn free_ball_sizes() {
        let m = metric("F2");
        let b1 = m.ball(1).unwrap();
        let names: Vec<String> = b1
            .entries()
            .iter()
            .map(|e| m.presentation().render(&e.normal_form))
            .collect();
        assert_eq!(names, ["", "a", "A", "b", "B"]);
        for r in 0..=4 {
            let expected = 2 * 3usize.pow(r as u32) - 1;
            assert_eq!(free_ball_size(2, r), expected);
            assert_eq!(m.ball(r).unwrap().len(), expected);
        }
        assert_eq!(m.ball(2).unwrap().len(), 17);
    }

    #[test]
    fn surface_ball_radius_one() {
        let m = metric("surface2");
        assert_eq!(m.ball(1).unwrap().len(), 9);
        assert!(matches!(m.ball(9), Err(Error::RadiusTooLarge { radius: 9, rmax: 8 })));
    }

    #[test]
    fn ball_entries_are_sorted_geodesic_and_distinct() {
        let m = WordMetric::with_rmax(GroupPresentation::builtin("surface2").unwrap(), 4).unwrap();
        let ball = m.ball(3).unwrap();
        let p = m.presentation();
        for pair in ball.entries().windows(2) {
            assert!(pair[0].normal_form.shortlex_cmp(&pair[1].normal_form).is_lt());
        }
        for (i, e) in ball.entries().iter().enumerate() {
            assert_eq!(e.length, e.normal_form.lgr());
            for f in &ball.entries()[..i] {
                assert!(!p.equal(&e.normal_form, &f.normal_form).unwrap());
            }
        }
        assert_eq!(ball.entries()[0].normal_form, Word::empty());
    }

    #[test]
    fn ball_nesting() {
        let m = WordMetric::with_rmax(GroupPresentation::builtin("surface2").unwrap(), 4).unwrap();
        let big = m.ball(3).unwrap();
        for r in 0..3 {
            let small = m.ball(r).unwrap();
            let expected: Vec<&BallEntry> =
                big.entries().iter().filter(|e| e.length <= r).collect();
            assert_eq!(small.entries().iter().collect::<Vec<_>>(), expected);
        }
    }

    #[test]
    fn element_length_examples() {
        let f = metric("F2");
        assert_eq!(f.element_length(&Word::empty()).unwrap(), 0);
        assert_eq!(f.element_length(&w(&f, "abA")).unwrap(), 3);
        let s = metric("surface2");
        assert_eq!(s.element_length(&w(&s, "abABcdCDaa")).unwrap(), 2);
        assert_eq!(s.element_length(&w(&s, "aaaaaaaa")).unwrap(), 8);
        // half a relator can be traded for the other half
        assert_eq!(s.element_length(&w(&s, "abAB")).unwrap(), 4);
        assert_eq!(s.element_length(&w(&s, "abABc")).unwrap(), 3);
        assert!(matches!(
            s.element_length(&w(&s, "aaaaaaaaa")),
            Err(Error::LengthExceeded { rmax: 8 })
        ));
    }

    #[test]
    fn element_length_agrees_with_ball() {
        let s = WordMetric::with_rmax(GroupPresentation::builtin("surface2").unwrap(), 4).unwrap();
        let ball = s.ball(4).unwrap();
        for e in ball.entries().iter().step_by(7) {
            assert_eq!(s.element_length(&e.normal_form).unwrap(), e.length);
        }
    }

    #[test]
    fn distance_examples() {
        let f = metric("F2");
        assert_eq!(f.distance(&w(&f, "ab"), &w(&f, "ab")).unwrap(), 0);
        assert_eq!(f.distance(&w(&f, "a"), &w(&f, "b")).unwrap(), 2);
        assert_eq!(f.distance(&Word::empty(), &w(&f, "ab")).unwrap(), 2);
    }

    #[test]
    fn geodesic_examples() {
        let f = metric("F2");
        assert!(f.is_geodesic(&w(&f, "ab")).unwrap());
        assert!(!f.is_geodesic(&w(&f, "aA")).unwrap());
        let s = metric("surface2");
        assert!(!s.is_geodesic(&w(&s, "abABcdCD")).unwrap());
        assert!(s.is_geodesic(&w(&s, "abAB")).unwrap());
    }

    #[test]
    fn cyclically_reduced_examples() {
        let f = metric("F2");
        assert!(f.is_cyclically_reduced(&w(&f, "ab")).unwrap());
        assert!(!f.is_cyclically_reduced(&w(&f, "abA")).unwrap());
        assert!(f.is_cyclically_reduced(&w(&f, "abAB")).unwrap());
        assert!(f.is_cyclically_reduced(&Word::empty()).unwrap());
    }

    #[test]
    fn local_geodesic_examples() {
        let f = metric("F2");
        let path = |t: &str| PeriodicPath::new(w(&f, t)).unwrap();
        assert!(f.is_k_local_geodesic(&path("ab"), 2).unwrap());
        assert!(!f.is_k_local_geodesic(&path("abA"), 2).unwrap());
        assert!(f.is_k_local_geodesic(&path("abAB"), 4).unwrap());
        assert!(PeriodicPath::new(Word::empty()).is_err());
        assert!(f.is_k_local_geodesic(&path("ab"), 0).is_err());
    }

    /// Brute force over every offset and every length up to k.
    #[test]
    fn local_geodesic_matches_brute_force() {
        let f = metric("F2");
        for text in ["abAB", "abA", "aab", "ab", "a", "aBBa"] {
            let period = w(&f, text);
            let Ok(path) = PeriodicPath::new(period.clone()) else { continue };
            for k in 1..=6 {
                let long = period.power(20);
                let mut expected = true;
                for start in 0..period.lgr() {
                    for len in 1..=k {
                        expected &= long.subword(start, len).is_freely_reduced();
                    }
                }
                assert_eq!(f.is_k_local_geodesic(&path, k).unwrap(), expected, "{text} k={k}");
            }
        }
    }

    #[test]
    fn quasigeodesic_examples() {
        let f = metric("F2");
        let one = rational::int(1);
        let zero = rational::int(0);
        assert!(f.quasigeodesic_check(&w(&f, "ab"), 3, &one, &zero).unwrap());
        assert!(!f.quasigeodesic_check(&w(&f, "aA"), 1, &one, &zero).unwrap());
        assert!(f.quasigeodesic_check(&w(&f, "aA"), 1, &one, &rational::int(2)).unwrap());
        assert!(f.quasigeodesic_check(&w(&f, "ab"), 0, &one, &zero).is_err());
    }

    #[test]
    fn normal_forms() {
        let s = metric("surface2");
        // abAB = dcDC in the group; the shortlex-least spelling wins
        assert_eq!(s.presentation().render(&s.normal_form(&w(&s, "dcDC")).unwrap()), "abAB");
        // an element beyond the cached ball goes through the greedy path
        let long = w(&s, "cdCDaabAB");
        let nf = s.normal_form(&long).unwrap();
        assert!(s.presentation().equal(&nf, &long).unwrap());
        assert_eq!(nf.lgr(), s.element_length(&long).unwrap());
        let fresh = WordMetric::new(GroupPresentation::builtin("surface2").unwrap()).unwrap();
        let ball = fresh.ball(4).unwrap();
        let e = ball.entries().iter().find(|e| e.length == 4).unwrap();
        let cold = WordMetric::new(GroupPresentation::builtin("surface2").unwrap()).unwrap();
        assert_eq!(cold.normal_form(&e.normal_form).unwrap(), e.normal_form);
    }

    #[test]
    fn uncertified_presentations_are_refused() {
        let alphabet = Alphabet::new("ab").unwrap();
        let r = alphabet.parse_word("abAB").unwrap();
        let p = GroupPresentation::new(alphabet, vec![r], Strategy::Dehn).unwrap();
        assert!(matches!(WordMetric::new(p), Err(Error::Uncertified)));
    }

    #[test]
    fn concurrent_queries_share_the_cache() {
        let s = Arc::new(metric("surface2"));
        let words = ["abAB", "cdCD", "aacc", "abcd", "DCBA", "bbbb"];
        std::thread::scope(|scope| {
            for text in words {
                let s = Arc::clone(&s);
                scope.spawn(move || {
                    let word = w(&s, text);
                    assert_eq!(s.element_length(&word).unwrap(), 4);
                });
            }
        });
    }
}
