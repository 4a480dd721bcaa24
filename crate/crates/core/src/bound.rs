//! The uniform lower bound `K = k / (λ · n_max)` for stable norms.
//!
//! Every `k`-local geodesic is a `(λ, ε)`-quasigeodesic. A cyclically reduced
//! word `ω` of length at least `k` therefore has `[[ω]] ≥ |ω|/λ ≥ k/λ`. Shorter
//! conjugacy representatives live in the ball of radius `k − 1`; for each
//! element `g` there the power process finds the first `n_g` with a
//! cyclically reduced `g^{n_g}` of length at least `k`, and homogeneity gives
//! `[[g]] ≥ k / (λ · n_g)`.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Strategy;
use crate::metric::WordMetric;
use crate::rational::{self, Rational};
use crate::stable_norm::{self, cyclically_reduce};
use crate::words::{Alphabet, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantsSource {
    FromDelta(Rational),
    UserSupplied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalGeodesicConstants {
    pub k: usize,
    pub lambda: Rational,
    pub eps: Rational,
    pub source: ConstantsSource,
}

impl LocalGeodesicConstants {
    /// `k = max(2, ⌈8δ⌉ + 1)`, `λ = (k + 4δ)/(k − 4δ)`, `ε = 2δ`.
    pub fn from_delta(delta: &Rational) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidConstants(format!(
                "delta must be nonnegative, got {delta}"
            )));
        }
        let eight_delta = (delta * rational::int(8)).ceil().to_integer();
        let k = eight_delta
            .to_usize()
            .and_then(|c| c.checked_add(1))
            .ok_or_else(|| Error::InvalidConstants(format!("delta {delta} is too large")))?
            .max(2);
        let kr = rational::int(k as i64);
        let four_delta = delta * rational::int(4);
        Ok(LocalGeodesicConstants {
            k,
            lambda: (&kr + &four_delta) / (&kr - &four_delta),
            eps: delta * rational::int(2),
            source: ConstantsSource::FromDelta(delta.clone()),
        })
    }

    pub fn user(k: usize, lambda: Rational, eps: Rational) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConstants(format!("k must be at least 2, got {k}")));
        }
        if lambda < rational::int(1) {
            return Err(Error::InvalidConstants(format!(
                "lambda must be at least 1, got {lambda}"
            )));
        }
        if eps.is_negative() {
            return Err(Error::InvalidConstants(format!(
                "eps must be nonnegative, got {eps}"
            )));
        }
        Ok(LocalGeodesicConstants { k, lambda, eps, source: ConstantsSource::UserSupplied })
    }

    /// Parses `k,lambda,eps`, e.g. `9,13/5,2` or `4,1,0`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [k, lambda, eps] = parts.as_slice() else {
            return Err(Error::InvalidConstants(format!("expected k,lambda,eps, got '{text}'")));
        };
        let k = k
            .parse()
            .map_err(|_| Error::InvalidConstants(format!("k must be a natural number, got '{k}'")))?;
        Self::user(k, rational::parse(lambda)?, rational::parse(eps)?)
    }
}

impl fmt::Display for LocalGeodesicConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} lambda={} eps={} source=", self.k, self.lambda, self.eps)?;
        match &self.source {
            ConstantsSource::FromDelta(d) => write!(f, "delta:{d}"),
            ConstantsSource::UserSupplied => write!(f, "user"),
        }
    }
}

/// How a stable-norm lower bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LowerBoundMethod {
    /// `|ω|/λ` for a cyclically reduced representative of length at least `k`.
    Quasigeodesic,
    /// `k/(λ·n_ω)` through the power process.
    BoundCertificate,
    None,
}

impl fmt::Display for LowerBoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowerBoundMethod::Quasigeodesic => "quasigeodesic",
            LowerBoundMethod::BoundCertificate => "bound_certificate",
            LowerBoundMethod::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NgOutcome {
    /// First power whose cyclic reduction has length at least `k`.
    Power(usize),
    /// The given power is the identity.
    FiniteOrder { at: usize },
    Identity,
}

impl fmt::Display for NgOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NgOutcome::Power(n) => write!(f, "n_g={n}"),
            NgOutcome::FiniteOrder { .. } => f.write_str("finite_order"),
            NgOutcome::Identity => f.write_str("identity"),
        }
    }
}

/// `1 + #{freely reduced words of length ≤ k − 1}`.
///
/// Each unfinished iteration of the power process leaves a distinct
/// cyclically reduced word of length below `k`, so more iterations than this
/// mean the inputs are not what they claim to be.
pub fn pigeonhole_cap(rank: usize, k: usize) -> usize {
    let letters = 2 * rank;
    let mut total: usize = 1;
    let mut sphere: usize = letters;
    for _ in 1..k {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(letters - 1);
    }
    total.saturating_add(1)
}

/// Runs the power process on `g`: the first `i ≥ 2` such that the cyclic
/// reduction of `gⁱ` has length at least `k`.
pub fn ng_process(
    metric: &WordMetric,
    g: &Word,
    constants: &LocalGeodesicConstants,
    cap: usize,
) -> Result<NgOutcome> {
    if metric.presentation().dehn_reduce(g).is_empty() {
        metric.presentation().alphabet().check(g)?;
        return Ok(NgOutcome::Identity);
    }
    let mut i = 2;
    loop {
        if i > cap {
            return Err(Error::CapExceeded { cap });
        }
        let reduced = cyclically_reduce(metric, &g.power(i as i64))?.reduced;
        if reduced.lgr() >= constants.k {
            return Ok(NgOutcome::Power(i));
        }
        if reduced.is_empty() {
            return Ok(NgOutcome::FiniteOrder { at: i });
        }
        i += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    pub constants: LocalGeodesicConstants,
    pub ball_radius: usize,
    pub table: Vec<(Word, NgOutcome)>,
    pub n_max: usize,
    pub k_bound: Rational,
}

impl BoundCertificate {
    /// The line-based certificate report.
    pub fn report(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        out += &format!("constants {}\n", self.constants);
        out += &format!("ball radius={} size={}\n", self.ball_radius, self.table.len());
        for (w, outcome) in &self.table {
            out += &format!("entry {} outcome={}\n", alphabet.render(w), outcome);
        }
        out += &format!("nmax={}\n", self.n_max);
        out += &format!("K={}\n", self.k_bound);
        out
    }

    /// Reads a report back. Finite-order entries come back with `at = 0`,
    /// since the report does not record the power.
    pub fn parse_report(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidConstants(format!("certificate report: {msg}"));
        let mut lines = text.lines();
        let constants_line = lines
            .next()
            .and_then(|l| l.strip_prefix("constants "))
            .ok_or_else(|| bad("missing constants line"))?;
        let fields = key_values(constants_line);
        let field = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| bad(&format!("missing {key}")))
        };
        let k: usize = field("k")?.parse().map_err(|_| bad("bad k"))?;
        let lambda = rational::parse(field("lambda")?)?;
        let eps = rational::parse(field("eps")?)?;
        let source = match field("source")? {
            "user" => ConstantsSource::UserSupplied,
            s => ConstantsSource::FromDelta(rational::parse(
                s.strip_prefix("delta:").ok_or_else(|| bad("bad source"))?,
            )?),
        };
        let constants = LocalGeodesicConstants { k, lambda, eps, source };

        let ball_line = lines
            .next()
            .and_then(|l| l.strip_prefix("ball "))
            .ok_or_else(|| bad("missing ball line"))?;
        let ball_fields = key_values(ball_line);
        let ball_radius: usize = ball_fields
            .iter()
            .find(|(k, _)| *k == "radius")
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| bad("bad ball radius"))?;
        let size: usize = ball_fields
            .iter()
            .find(|(k, _)| *k == "size")
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| bad("bad ball size"))?;

        let mut table = Vec::with_capacity(size);
        let mut n_max = None;
        let mut k_bound = None;
        for line in lines {
            if let Some(rest) = line.strip_prefix("entry ") {
                let (word, outcome) = rest
                    .rsplit_once(" outcome=")
                    .ok_or_else(|| bad("bad entry line"))?;
                let outcome = match outcome {
                    "identity" => NgOutcome::Identity,
                    "finite_order" => NgOutcome::FiniteOrder { at: 0 },
                    o => NgOutcome::Power(
                        o.strip_prefix("n_g=")
                            .and_then(|n| n.parse().ok())
                            .ok_or_else(|| bad("bad outcome"))?,
                    ),
                };
                table.push((alphabet.parse_word(word)?, outcome));
            } else if let Some(n) = line.strip_prefix("nmax=") {
                n_max = Some(n.parse().map_err(|_| bad("bad nmax"))?);
            } else if let Some(kb) = line.strip_prefix("K=") {
                k_bound = Some(rational::parse(kb)?);
            } else if !line.is_empty() {
                return Err(bad(&format!("unexpected line '{line}'")));
            }
        }
        if table.len() != size {
            return Err(bad("entry count does not match ball size"));
        }
        Ok(BoundCertificate {
            constants,
            ball_radius,
            table,
            n_max: n_max.ok_or_else(|| bad("missing nmax"))?,
            k_bound: k_bound.ok_or_else(|| bad("missing K"))?,
        })
    }
}

fn key_values(line: &str) -> Vec<(&str, &str)> {
    line.split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect()
}

/// Runs the power process over the ball of radius `k − 1` and assembles
/// `n_max` and `K`.
pub fn compute_certificate(
    metric: &WordMetric,
    constants: &LocalGeodesicConstants,
) -> Result<BoundCertificate> {
    let radius = constants.k - 1;
    let ball = metric.ball(radius)?;
    let cap = pigeonhole_cap(metric.presentation().alphabet().rank(), constants.k);
    let outcomes: Vec<Result<NgOutcome>> = ball
        .entries()
        .par_iter()
        .map(|e| ng_process(metric, &e.normal_form, constants, cap))
        .collect();
    let mut table = Vec::with_capacity(outcomes.len());
    for (entry, outcome) in ball.entries().iter().zip(outcomes) {
        table.push((entry.normal_form.clone(), outcome?));
    }
    let n_max = table
        .iter()
        .filter_map(|(_, o)| match o {
            NgOutcome::Power(n) => Some(*n),
            _ => None,
        })
        .max()
        .ok_or_else(|| {
            Error::Degenerate(format!("no infinite-order element in the ball of radius {radius}"))
        })?;
    let k_bound = rational::int(constants.k as i64) / (&constants.lambda * rational::int(n_max as i64));
    Ok(BoundCertificate {
        constants: constants.clone(),
        ball_radius: radius,
        table,
        n_max,
        k_bound,
    })
}

/// A sound lower bound for `[[w]]`, and which route produced it.
pub fn element_lower_bound(
    metric: &WordMetric,
    w: &Word,
    constants: &LocalGeodesicConstants,
) -> Result<(Rational, LowerBoundMethod)> {
    let reduced = cyclically_reduce(metric, w)?.reduced;
    if reduced.is_empty() {
        return Err(Error::Identity);
    }
    if reduced.lgr() >= constants.k {
        let bound = rational::int(reduced.lgr() as i64) / &constants.lambda;
        return Ok((bound, LowerBoundMethod::Quasigeodesic));
    }
    let cap = pigeonhole_cap(metric.presentation().alphabet().rank(), constants.k);
    match ng_process(metric, &reduced, constants, cap)? {
        NgOutcome::Power(n) => {
            let bound = rational::int(constants.k as i64)
                / (&constants.lambda * rational::int(n as i64));
            Ok((bound, LowerBoundMethod::BoundCertificate))
        }
        NgOutcome::FiniteOrder { at } => Err(Error::FiniteOrder { power: at }),
        NgOutcome::Identity => Err(Error::Identity),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerificationStatus {
    Checked {
        lower: Rational,
        oracle: Option<usize>,
        upper: Rational,
        violations: Vec<String>,
    },
    Excluded(String),
    Unresolved(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationEntry {
    pub word: Word,
    pub status: VerificationStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
}

impl VerificationReport {
    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match &e.status {
                VerificationStatus::Checked { violations, .. } => violations.len(),
                _ => 0,
            })
            .sum()
    }

    pub fn excluded(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.status, VerificationStatus::Excluded(_)))
            .count()
    }

    pub fn checked(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.status, VerificationStatus::Checked { .. }))
            .count()
    }
}

/// Checks `[[w]] ≥ K` empirically on a sample: the per-element lower bound,
/// the free-group oracle where one exists, and the Fekete upper bound over
/// `terms` powers must all clear `K`.
pub fn verify_certificate(
    metric: &WordMetric,
    cert: &BoundCertificate,
    sample: &[Word],
    terms: usize,
) -> VerificationReport {
    let p = metric.presentation();
    let entries = sample
        .iter()
        .map(|w| {
            let status = match element_lower_bound(metric, w, &cert.constants) {
                Err(e @ (Error::Identity | Error::FiniteOrder { .. })) => {
                    VerificationStatus::Excluded(e.to_string())
                }
                Err(e) => VerificationStatus::Unresolved(e.to_string()),
                Ok((lower, _)) => {
                    let mut violations = Vec::new();
                    if lower < cert.k_bound {
                        violations.push(format!("lower bound {lower} < K"));
                    }
                    let oracle = match p.strategy() {
                        Strategy::Free => stable_norm::free_oracle_stable_norm(p, w).ok(),
                        Strategy::Dehn => None,
                    };
                    if let Some(o) = oracle {
                        if rational::int(o as i64) < cert.k_bound {
                            violations.push(format!("oracle value {o} < K"));
                        }
                        if lower > rational::int(o as i64) {
                            violations.push(format!("lower bound {lower} exceeds oracle {o}"));
                        }
                    }
                    match stable_norm::power_lengths(metric, w, terms.max(1)) {
                        Ok(lengths) => {
                            let upper = lengths
                                .iter()
                                .enumerate()
                                .map(|(i, &u)| rational::ratio(u as i64, i as i64 + 1))
                                .min()
                                .unwrap_or_else(Rational::zero);
                            if upper < cert.k_bound {
                                violations.push(format!("upper bound {upper} < K"));
                            }
                            VerificationStatus::Checked { lower, oracle, upper, violations }
                        }
                        Err(e) => VerificationStatus::Unresolved(e.to_string()),
                    }
                }
            };
            VerificationEntry { word: w.clone(), status }
        })
        .collect();
    VerificationReport { entries }
}
