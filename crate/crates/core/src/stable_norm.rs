//! Stable norm `[[g]] = lim |gⁿ|/n`: cyclic reduction, two-sided estimates,
//! and checkers for conjugacy invariance and homogeneity.

use std::fmt;

use num_traits::Zero;

use crate::bound::{self, LocalGeodesicConstants, LowerBoundMethod};
use crate::error::{Error, Result};
use crate::group::{GroupPresentation, Strategy};
use crate::metric::WordMetric;
use crate::rational::{self, Rational};
use crate::words::{cyclic_free_reduction, Word};

/// `u_1, …, u_N` with `u_{n+m} ≤ u_n + u_m` whenever `n + m ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubadditiveSequence {
    values: Vec<Rational>,
}

impl SubadditiveSequence {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.iter().any(|v| v < &Rational::zero()) {
            return Err(Error::InvalidConstants("sequence values must be nonnegative".into()));
        }
        for n in 1..=values.len() {
            for m in 1..=values.len() - n {
                if values[n + m - 1] > &values[n - 1] + &values[m - 1] {
                    return Err(Error::NotSubadditive { n, m });
                }
            }
        }
        Ok(SubadditiveSequence { values })
    }

    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        Self::new(lengths.iter().map(|&u| rational::int(u as i64)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `min u_m / m`, an upper bound for the limit of `u_n / n`.
pub fn fekete_upper(seq: &SubadditiveSequence) -> Result<Rational> {
    seq.values()
        .iter()
        .enumerate()
        .map(|(i, u)| u / rational::int(i as i64 + 1))
        .min()
        .ok_or_else(|| Error::InvalidConstants("fekete bound needs N >= 1".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableNormEstimate {
    pub lower: Rational,
    pub upper: Rational,
    pub terms_used: usize,
    pub lower_method: LowerBoundMethod,
}

impl StableNormEstimate {
    pub fn intersects(&self, other: &StableNormEstimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    pub fn scaled(&self, factor: usize) -> StableNormEstimate {
        let f = rational::int(factor as i64);
        StableNormEstimate {
            lower: &self.lower * &f,
            upper: &self.upper * &f,
            terms_used: self.terms_used,
            lower_method: self.lower_method,
        }
    }
}

impl fmt::Display for StableNormEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lower={} upper={} N={} method={}",
            rational::to_decimal(&self.lower, 6),
            rational::to_decimal(&self.upper, 6),
            self.terms_used,
            self.lower_method
        )
    }
}

/// Result of [`cyclically_reduce`]: `w = conjugator · reduced · conjugator⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReduction {
    pub geodesic: Word,
    pub reduced: Word,
    pub conjugator: Word,
}

pub fn geodesic_representative(metric: &WordMetric, w: &Word) -> Result<Word> {
    metric.normal_form(w)
}

/// Rotates to strictly shorter conjugates until every rotation is geodesic.
///
/// Each step moves to the leftmost rotation whose element is shorter than the
/// current word, replaced by its geodesic normal form. Lengths strictly drop,
/// so there are at most `|w|` steps.
pub fn cyclically_reduce(metric: &WordMetric, w: &Word) -> Result<CyclicReduction> {
    let geodesic = metric.normal_form(w)?;
    let mut current = geodesic.clone();
    let mut conjugator = Word::empty();
    'outer: loop {
        let len = current.lgr();
        for i in 1..len {
            let rotated = current.rotation(i)?;
            if metric.element_length(&rotated)? < len {
                conjugator = conjugator.concat(&current.prefix(i)).free_reduce();
                current = metric.normal_form(&rotated)?;
                continue 'outer;
            }
        }
        break;
    }
    Ok(CyclicReduction { geodesic, reduced: current, conjugator })
}

/// `|wⁿ|` for `n = 1..=terms`.
pub fn power_lengths(metric: &WordMetric, w: &Word, terms: usize) -> Result<Vec<usize>> {
    (1..=terms)
        .map(|n| metric.element_length(&w.power(n as i64)))
        .collect()
}

/// Brackets `[[w]]` between a certified lower bound (when constants are given)
/// and the Fekete upper bound over the first `terms` powers.
pub fn stable_norm_estimate(
    metric: &WordMetric,
    w: &Word,
    terms: usize,
    constants: Option<&LocalGeodesicConstants>,
) -> Result<StableNormEstimate> {
    if terms == 0 {
        return Err(Error::InvalidConstants("N must be at least 1".into()));
    }
    let lengths = power_lengths(metric, w, terms)?;
    if let Some(n) = lengths.iter().position(|&u| u == 0) {
        return Err(Error::FiniteOrder { power: n + 1 });
    }
    let upper = fekete_upper(&SubadditiveSequence::from_lengths(&lengths)?)?;
    let (lower, lower_method) = match constants {
        Some(c) => bound::element_lower_bound(metric, w, c)?,
        None => (Rational::zero(), LowerBoundMethod::None),
    };
    if lower > upper {
        return Err(Error::InconsistentBracket {
            lower: lower.to_string(),
            upper: upper.to_string(),
        });
    }
    Ok(StableNormEstimate { lower, upper, terms_used: terms, lower_method })
}

/// `||uⁿ| − |vⁿ|| ≤ 2|a|` for `v = a·u·a⁻¹` and every `n ≤ terms`.
pub fn check_conjugacy_invariance(
    metric: &WordMetric,
    u: &Word,
    a: &Word,
    terms: usize,
) -> Result<bool> {
    let v = a.concat(u).concat(&a.invert());
    let slack = 2 * metric.element_length(a)?;
    let us = power_lengths(metric, u, terms)?;
    let vs = power_lengths(metric, &v, terms)?;
    Ok(us.iter().zip(&vs).all(|(x, y)| x.abs_diff(*y) <= slack))
}

/// Interval form of `[[wᵐ]] = m·[[w]]`: the estimate for `wᵐ` over `terms`
/// powers must meet `m` times the estimate for `w` over `terms·m` powers.
pub fn check_homogeneity(
    metric: &WordMetric,
    w: &Word,
    m: usize,
    terms: usize,
    constants: Option<&LocalGeodesicConstants>,
) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidConstants("m must be at least 1".into()));
    }
    let of_power = stable_norm_estimate(metric, &w.power(m as i64), terms, constants)?;
    let of_word = stable_norm_estimate(metric, w, terms * m, constants)?;
    Ok(of_power.intersects(&of_word.scaled(m)))
}

/// Exact stable norm in a free group: the length of the cyclic free reduction.
pub fn free_oracle_stable_norm(p: &GroupPresentation, w: &Word) -> Result<usize> {
    if p.strategy() != Strategy::Free {
        return Err(Error::NotFree("the free-group stable norm oracle"));
    }
    p.alphabet().check(w)?;
    let (_, core) = cyclic_free_reduction(w);
    if core.is_empty() {
        return Err(Error::Identity);
    }
    Ok(core.lgr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn f2() -> WordMetric {
        WordMetric::new(GroupPresentation::builtin("F2").unwrap()).unwrap()
    }

    fn surface2() -> WordMetric {
        WordMetric::new(GroupPresentation::builtin("surface2").unwrap()).unwrap()
    }

    fn w(m: &WordMetric, t: &str) -> Word {
        m.presentation().parse_word(t).unwrap()
    }

    fn text(m: &WordMetric, word: &Word) -> String {
        m.presentation().render(word)
    }

    #[test]
    fn geodesic_representative_examples() {
        let f = f2();
        assert!(geodesic_representative(&f, &w(&f, "aA")).unwrap().is_empty());
        assert_eq!(text(&f, &geodesic_representative(&f, &w(&f, "bAa")).unwrap()), "b");
        let s = surface2();
        assert!(geodesic_representative(&s, &w(&s, "abABcdCD")).unwrap().is_empty());
    }

    #[test]
    fn cyclically_reduce_examples() {
        let f = f2();
        let r = cyclically_reduce(&f, &w(&f, "abA")).unwrap();
        assert_eq!((text(&f, &r.reduced), text(&f, &r.conjugator)), ("b".into(), "a".into()));
        let r = cyclically_reduce(&f, &w(&f, "ab")).unwrap();
        assert_eq!((text(&f, &r.reduced), text(&f, &r.conjugator)), ("ab".into(), "".into()));
        let r = cyclically_reduce(&f, &w(&f, "aabAA")).unwrap();
        assert_eq!((text(&f, &r.reduced), text(&f, &r.conjugator)), ("b".into(), "aa".into()));
        let r = cyclically_reduce(&f, &w(&f, "aA")).unwrap();
        assert!(r.reduced.is_empty() && r.conjugator.is_empty());
    }

    #[test]
    fn cyclically_reduce_in_surface_group() {
        let s = surface2();
        let word = w(&s, "cabAC");
        let r = cyclically_reduce(&s, &word).unwrap();
        assert!(s.is_cyclically_reduced(&r.reduced).unwrap());
        let back = r.conjugator.concat(&r.reduced).concat(&r.conjugator.invert());
        assert!(s.presentation().equal(&word, &back).unwrap());
        assert_eq!(text(&s, &r.reduced), "b");
        assert_eq!(text(&s, &r.conjugator), "ca");
    }

    #[test]
    fn fekete_examples() {
        let seq = SubadditiveSequence::from_lengths(&[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(fekete_upper(&seq).unwrap(), int(1));
        let shifted: Vec<usize> = (1..=10).map(|n| n + 2).collect();
        let seq = SubadditiveSequence::from_lengths(&shifted).unwrap();
        assert_eq!(fekete_upper(&seq).unwrap(), ratio(6, 5));
        let seq = SubadditiveSequence::from_lengths(&[3]).unwrap();
        assert_eq!(fekete_upper(&seq).unwrap(), int(3));
        let empty = SubadditiveSequence::from_lengths(&[]).unwrap();
        assert!(fekete_upper(&empty).is_err());
    }

    #[test]
    fn subadditivity_is_checked_on_construction() {
        assert_eq!(
            SubadditiveSequence::from_lengths(&[1, 3]),
            Err(Error::NotSubadditive { n: 1, m: 1 })
        );
        assert!(SubadditiveSequence::new(vec![int(-1)]).is_err());
    }

    #[test]
    fn fekete_upper_is_monotone_in_n() {
        let f = f2();
        let lengths = power_lengths(&f, &w(&f, "aabAbA"), 12).unwrap();
        let mut last: Option<Rational> = None;
        for n in 1..=lengths.len() {
            let up = fekete_upper(&SubadditiveSequence::from_lengths(&lengths[..n]).unwrap()).unwrap();
            if let Some(prev) = &last {
                assert!(&up <= prev);
            }
            last = Some(up);
        }
    }

    #[test]
    fn estimate_examples() {
        let f = f2();
        let c = LocalGeodesicConstants::from_delta(&int(0)).unwrap();
        let e = stable_norm_estimate(&f, &w(&f, "ab"), 5, Some(&c)).unwrap();
        assert_eq!((e.lower, e.upper), (int(2), int(2)));
        assert_eq!(e.lower_method, LowerBoundMethod::Quasigeodesic);

        let e = stable_norm_estimate(&f, &w(&f, "abA"), 10, None).unwrap();
        assert_eq!(e.upper, ratio(6, 5));
        assert_eq!(e.lower, int(0));
        assert_eq!(e.lower_method, LowerBoundMethod::None);
        assert_eq!(e.to_string(), "lower=0 upper=1.2 N=10 method=none");

        let e = stable_norm_estimate(&f, &w(&f, "abA"), 10, Some(&c)).unwrap();
        assert_eq!(e.lower, int(1));
        assert_eq!(e.lower_method, LowerBoundMethod::BoundCertificate);

        assert_eq!(
            stable_norm_estimate(&f, &w(&f, "aA"), 10, None),
            Err(Error::FiniteOrder { power: 1 })
        );
        assert!(stable_norm_estimate(&f, &w(&f, "ab"), 0, None).is_err());
    }

    #[test]
    fn conjugacy_invariance_examples() {
        let f = f2();
        assert!(check_conjugacy_invariance(&f, &w(&f, "ab"), &Word::empty(), 6).unwrap());
        assert!(check_conjugacy_invariance(&f, &w(&f, "ab"), &w(&f, "a"), 6).unwrap());
        // |aa bⁿ AA| - |bⁿ| = 4 = 2|aa| exactly
        let u = w(&f, "b");
        let a = w(&f, "aa");
        let v = a.concat(&u).concat(&a.invert());
        for (x, y) in power_lengths(&f, &u, 6).unwrap().iter().zip(power_lengths(&f, &v, 6).unwrap()) {
            assert_eq!(y - x, 4);
        }
        assert!(check_conjugacy_invariance(&f, &u, &a, 6).unwrap());
    }

    #[test]
    fn homogeneity_examples() {
        let f = f2();
        let c = LocalGeodesicConstants::from_delta(&int(0)).unwrap();
        let ab = w(&f, "ab");
        assert!(check_homogeneity(&f, &ab, 3, 10, Some(&c)).unwrap());
        let cube = stable_norm_estimate(&f, &ab.power(3), 10, Some(&c)).unwrap();
        assert_eq!((cube.lower, cube.upper), (int(6), int(6)));
        assert!(check_homogeneity(&f, &w(&f, "abbA"), 1, 10, None).unwrap());

        let aba = w(&f, "abA");
        assert!(check_homogeneity(&f, &aba, 2, 10, None).unwrap());
        let squared = stable_norm_estimate(&f, &aba.power(2), 10, None).unwrap();
        assert_eq!(squared.upper, ratio(11, 5));
        let scaled = stable_norm_estimate(&f, &aba, 20, None).unwrap().scaled(2);
        assert_eq!(scaled.upper, ratio(11, 5));
    }

    #[test]
    fn free_oracle_examples() {
        let f = f2();
        let p = f.presentation();
        assert_eq!(free_oracle_stable_norm(p, &w(&f, "abA")).unwrap(), 1);
        assert_eq!(free_oracle_stable_norm(p, &w(&f, "ab")).unwrap(), 2);
        assert_eq!(free_oracle_stable_norm(p, &w(&f, "aabAA")).unwrap(), 1);
        assert_eq!(free_oracle_stable_norm(p, &w(&f, "aA")), Err(Error::Identity));
        let s = surface2();
        assert!(matches!(
            free_oracle_stable_norm(s.presentation(), &w(&s, "a")),
            Err(Error::NotFree(_))
        ));
    }

    #[test]
    fn finite_order_detection_in_surface_group() {
        let s = surface2();
        let e = stable_norm_estimate(&s, &w(&s, "abABcdCDa"), 4, None).unwrap();
        assert_eq!(e.upper, int(1));
        assert_eq!(
            stable_norm_estimate(&s, &w(&s, "abABcdCD"), 4, None),
            Err(Error::FiniteOrder { power: 1 })
        );
    }
}
