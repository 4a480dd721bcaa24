//! Invariant suites, run on one presentation at the scale its metric allows.
//!
//! Each family draws words from its own seeded sampler, so output is a pure
//! function of (presentation, R_max, N, constants, seed).

use std::fmt;

use crate::bound::{self, LocalGeodesicConstants};
use crate::error::{Error, Result};
use crate::group::Strategy;
use crate::metric::{PeriodicPath, WordMetric};
use crate::rational::{self, Rational};
use crate::sample::WordSampler;
use crate::stable_norm::{self, SubadditiveSequence};
use crate::words::{cyclic_free_reduction, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyOutcome {
    Pass { name: &'static str, cases: usize },
    Fail { name: &'static str, detail: String },
    Skip { name: &'static str, reason: &'static str },
}

impl FamilyOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, FamilyOutcome::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, FamilyOutcome::Pass { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyOutcome::Pass { name, .. }
            | FamilyOutcome::Fail { name, .. }
            | FamilyOutcome::Skip { name, .. } => name,
        }
    }
}

impl fmt::Display for FamilyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyOutcome::Pass { name, cases } => write!(f, "PASS {name} {cases}"),
            FamilyOutcome::Fail { name, detail } => write!(f, "FAIL {name} {detail}"),
            FamilyOutcome::Skip { name, reason } => write!(f, "SKIP {name} {reason}"),
        }
    }
}

/// What a family reports: how many cases ran, or why it could not run.
enum Run {
    Cases(usize),
    Skipped(&'static str),
}

/// Fails a family with a message.
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Error::CheckFailed(format!($($msg)+)));
        }
    };
}

struct Ctx<'a> {
    metric: &'a WordMetric,
    constants: Option<&'a LocalGeodesicConstants>,
    terms: usize,
    seed: u64,
    free: bool,
}

impl Ctx<'_> {
    fn sampler(&self, family: u64) -> WordSampler {
        let seed = self.seed ^ family.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        WordSampler::new(seed, self.metric.presentation().alphabet().rank())
    }

    fn render(&self, w: &Word) -> String {
        let text = self.metric.presentation().render(w);
        if text.is_empty() {
            "ε".into()
        } else {
            text
        }
    }

    /// Largest word length whose pairwise distances stay within R_max.
    fn half_scale(&self) -> usize {
        if self.free {
            12
        } else {
            (self.metric.rmax() / 2).max(1)
        }
    }

    /// An infinite-order element: a random free word, or in a Dehn group a
    /// generator hidden under relator noise (so its powers stay short).
    fn element(&self, s: &mut WordSampler, max_len: usize) -> Word {
        if self.free {
            s.infinite_order_free_word(max_len)
        } else {
            let g = s.word(1);
            s.with_relator_noise(self.metric.presentation(), &g, 1)
        }
    }

    /// Power horizon that keeps `|gⁿ|` within R_max for elements from
    /// [`Ctx::element`].
    fn power_horizon(&self, wanted: usize) -> usize {
        if self.free {
            wanted
        } else {
            wanted.min(self.metric.rmax())
        }
    }
}

type Family = fn(&Ctx) -> Result<Run>;

const FAMILIES: &[(&str, Family)] = &[
    ("words.free_reduce", words_free_reduce),
    ("words.invert", words_invert),
    ("words.rotation", words_rotation),
    ("words.power", words_power),
    ("group.dehn_reduce", group_dehn_reduce),
    ("group.equal_equivalence", group_equal_equivalence),
    ("group.conjugated_relators", group_conjugated_relators),
    ("metric.ball_nesting", metric_ball_nesting),
    ("metric.triangle", metric_triangle),
    ("metric.subadditivity", metric_subadditivity),
    ("metric.free_oracle", metric_free_oracle),
    ("metric.local_geodesic", metric_local_geodesic),
    ("stable_norm.cyclic_reduction", stable_norm_cyclic_reduction),
    ("stable_norm.fekete_monotone", stable_norm_fekete_monotone),
    ("stable_norm.conjugacy_invariance", stable_norm_conjugacy_invariance),
    ("stable_norm.homogeneity", stable_norm_homogeneity),
    ("stable_norm.free_oracle_bracket", stable_norm_free_oracle_bracket),
    ("bound.certificate", bound_certificate),
    ("bound.soundness", bound_soundness),
    ("bound.quasigeodesic", bound_quasigeodesic),
];

pub fn family_names() -> impl Iterator<Item = &'static str> {
    FAMILIES.iter().map(|(name, _)| *name)
}

pub fn run_suite(
    metric: &WordMetric,
    constants: Option<&LocalGeodesicConstants>,
    terms: usize,
    seed: u64,
) -> Vec<FamilyOutcome> {
    let ctx = Ctx {
        metric,
        constants,
        terms: terms.max(1),
        seed,
        free: metric.presentation().strategy() == Strategy::Free,
    };
    FAMILIES
        .iter()
        .map(|(name, family)| match family(&ctx) {
            Ok(Run::Cases(cases)) => FamilyOutcome::Pass { name, cases },
            Ok(Run::Skipped(reason)) => FamilyOutcome::Skip { name, reason },
            Err(e) => FamilyOutcome::Fail { name, detail: e.to_string() },
        })
        .collect()
}

fn words_free_reduce(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(1);
    for _ in 0..100 {
        let len = s.below(17);
        let w = s.word(len);
        let r = w.free_reduce();
        ensure!(r.free_reduce() == r, "not idempotent on {}", ctx.render(&w));
        ensure!(r.lgr() <= w.lgr() && (w.lgr() - r.lgr()).is_multiple_of(2), "length on {}", ctx.render(&w));
    }
    Ok(Run::Cases(100))
}

fn words_invert(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(2);
    for _ in 0..100 {
        let len = s.below(17);
        let w = s.word(len);
        ensure!(w.invert().invert() == w, "not an involution on {}", ctx.render(&w));
        ensure!(w.concat(&w.invert()).free_reduce().is_empty(), "w·w⁻¹ ≠ 1 for {}", ctx.render(&w));
    }
    Ok(Run::Cases(100))
}

fn words_rotation(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(3);
    let mut cases = 0;
    for _ in 0..100 {
        let len = 1 + s.below(16);
        let w = s.word(len);
        for i in 0..w.lgr() {
            let r = w.rotation(i)?;
            let expected = Word::from_letters(w.letters()[i..].to_vec()).concat(&w.prefix(i));
            ensure!(r == expected && r.lgr() == w.lgr(), "rotation {i} of {}", ctx.render(&w));
            cases += 1;
        }
    }
    Ok(Run::Cases(cases))
}

fn words_power(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(4);
    for _ in 0..100 {
        let len = s.below(8);
        let w = s.word(len);
        let (n, m) = (s.below(5) as i64, s.below(5) as i64);
        ensure!(w.power(n + m) == w.power(n).concat(&w.power(m)), "powers of {}", ctx.render(&w));
    }
    Ok(Run::Cases(100))
}

fn group_dehn_reduce(ctx: &Ctx) -> Result<Run> {
    let p = ctx.metric.presentation();
    let mut s = ctx.sampler(5);
    for _ in 0..100 {
        let len = s.below(9);
        let base = s.word(len);
        let noise = s.below(3);
        let w = s.with_relator_noise(p, &base, noise);
        let r = p.dehn_reduce(&w);
        ensure!(r.lgr() <= w.lgr(), "dehn_reduce lengthened {}", ctx.render(&w));
        ensure!(p.dehn_reduce(&r) == r, "dehn_reduce not idempotent on {}", ctx.render(&w));
        ensure!(p.equal(&w, &r)?, "dehn_reduce changed the element of {}", ctx.render(&w));
        if ctx.free {
            ensure!(r == w.free_reduce(), "free strategy differs from free reduction");
        }
    }
    Ok(Run::Cases(100))
}

fn group_equal_equivalence(ctx: &Ctx) -> Result<Run> {
    let p = ctx.metric.presentation();
    let mut s = ctx.sampler(6);
    for _ in 0..50 {
        let len = s.below(4);
        let x = s.word(len);
        let y = if s.below(2) == 0 { s.with_relator_noise(p, &x, 1) } else { s.word(len) };
        let z = if s.below(2) == 0 { s.with_relator_noise(p, &y, 1) } else { s.word(len) };
        ensure!(p.equal(&x, &x)?, "not reflexive at {}", ctx.render(&x));
        ensure!(p.equal(&x, &y)? == p.equal(&y, &x)?, "not symmetric");
        if p.equal(&x, &y)? && p.equal(&y, &z)? {
            ensure!(p.equal(&x, &z)?, "not transitive");
        }
        let noisy = s.with_relator_noise(p, &x, 2);
        ensure!(p.equal(&x, &noisy)?, "relator noise changed {}", ctx.render(&x));
    }
    Ok(Run::Cases(50))
}

fn group_conjugated_relators(ctx: &Ctx) -> Result<Run> {
    let p = ctx.metric.presentation();
    if p.relators().is_empty() {
        return Ok(Run::Skipped("no relators"));
    }
    let mut s = ctx.sampler(7);
    for _ in 0..50 {
        let w = s.relator_conjugate(p, 3);
        ensure!(p.is_identity(&w)?, "{} is not trivial", ctx.render(&w));
    }
    for r in p.relators() {
        ensure!(p.is_identity(r)?, "relator {} is not trivial", ctx.render(r));
    }
    Ok(Run::Cases(50 + p.relators().len()))
}

fn metric_ball_nesting(ctx: &Ctx) -> Result<Run> {
    let top = ctx.metric.rmax().min(if ctx.free { 6 } else { 4 });
    let big = ctx.metric.ball(top)?;
    for r in 0..top {
        let fresh = WordMetric::with_rmax(ctx.metric.presentation().clone(), r)?.ball(r)?;
        let expected: Vec<_> = big.entries().iter().filter(|e| e.length <= r).collect();
        ensure!(
            fresh.entries().iter().collect::<Vec<_>>() == expected,
            "ball({r}) is not the radius-{r} part of ball({top})"
        );
        for e in fresh.entries() {
            ensure!(e.length == e.normal_form.lgr(), "entry length mismatch in ball({r})");
        }
    }
    Ok(Run::Cases(top))
}

fn metric_triangle(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(9);
    let scale = ctx.half_scale();
    for _ in 0..100 {
        let (a, b, c) = (s.below(scale + 1), s.below(scale + 1), s.below(scale + 1));
        let (x, y, z) = (s.reduced_word(a), s.reduced_word(b), s.reduced_word(c));
        let m = ctx.metric;
        ensure!(
            m.distance(&x, &z)? <= m.distance(&x, &y)? + m.distance(&y, &z)?,
            "triangle inequality fails for {}, {}, {}",
            ctx.render(&x),
            ctx.render(&y),
            ctx.render(&z)
        );
    }
    Ok(Run::Cases(100))
}

fn metric_subadditivity(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(10);
    let horizon = ctx.power_horizon(8);
    let mut cases = 0;
    for _ in 0..50 {
        let g = ctx.element(&mut s, 12);
        let lengths = stable_norm::power_lengths(ctx.metric, &g, horizon)?;
        for n in 1..horizon {
            for m in 1..=horizon - n {
                ensure!(
                    lengths[n + m - 1] <= lengths[n - 1] + lengths[m - 1],
                    "|g^{}| > |g^{n}| + |g^{m}| for {}",
                    n + m,
                    ctx.render(&g)
                );
                cases += 1;
            }
        }
    }
    Ok(Run::Cases(cases))
}

fn metric_free_oracle(ctx: &Ctx) -> Result<Run> {
    if !ctx.free {
        return Ok(Run::Skipped("not a free presentation"));
    }
    let radius = ctx.metric.rmax().min(6);
    let ball = ctx.metric.ball(radius)?;
    let p = ctx.metric.presentation();
    let mut s = ctx.sampler(11);
    for _ in 0..100 {
        let len = s.below(13);
        let w = s.word(len);
        let reduced = w.free_reduce();
        ensure!(
            ctx.metric.is_geodesic(&w)? == w.is_freely_reduced(),
            "geodesic test disagrees with free reduction on {}",
            ctx.render(&w)
        );
        ensure!(ctx.metric.element_length(&w)? == reduced.lgr(), "length of {}", ctx.render(&w));
        if reduced.lgr() <= radius {
            let entry = ball.find(p, &w)?;
            ensure!(
                entry.map(|e| &e.normal_form) == Some(&reduced),
                "ball lookup of {} disagrees with free reduction",
                ctx.render(&w)
            );
        }
    }
    Ok(Run::Cases(100))
}

fn metric_local_geodesic(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(12);
    let max_len = if ctx.free { 12 } else { ctx.metric.rmax().min(4) };
    if max_len < 2 {
        return Ok(Run::Skipped("R_max below 2"));
    }
    let mut cases = 0;
    let mut attempts = 0;
    while cases < 50 && attempts < 2000 {
        attempts += 1;
        let len = 2 + s.below(max_len - 1);
        let w = s.cyclically_reduced_word(len);
        if !ctx.metric.is_cyclically_reduced(&w)? {
            continue;
        }
        let path = PeriodicPath::new(w.clone())?;
        for k in [2, w.lgr()] {
            ensure!(
                ctx.metric.is_k_local_geodesic(&path, k)?,
                "{} is cyclically reduced but not {k}-local geodesic",
                ctx.render(&w)
            );
        }
        cases += 1;
    }
    Ok(Run::Cases(cases))
}

fn stable_norm_cyclic_reduction(ctx: &Ctx) -> Result<Run> {
    let p = ctx.metric.presentation();
    let mut s = ctx.sampler(13);
    let max_len = if ctx.free { 12 } else { ctx.metric.rmax() };
    for _ in 0..50 {
        let len = s.below(max_len + 1);
        let w = s.word(len);
        let r = stable_norm::cyclically_reduce(ctx.metric, &w)?;
        ensure!(
            ctx.metric.is_cyclically_reduced(&r.reduced)?,
            "cyclic reduction of {} is not cyclically reduced",
            ctx.render(&w)
        );
        let back = r.conjugator.concat(&r.reduced).concat(&r.conjugator.invert());
        ensure!(p.equal(&w, &back)?, "conjugation does not recover {}", ctx.render(&w));
        ensure!(r.reduced.lgr() <= r.geodesic.lgr(), "cyclic reduction lengthened {}", ctx.render(&w));
    }
    Ok(Run::Cases(50))
}

fn stable_norm_fekete_monotone(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(14);
    let horizon = ctx.power_horizon(ctx.terms);
    for _ in 0..30 {
        let g = ctx.element(&mut s, 10);
        let lengths = stable_norm::power_lengths(ctx.metric, &g, horizon)?;
        let mut previous: Option<Rational> = None;
        for n in 1..=horizon {
            let seq = SubadditiveSequence::from_lengths(&lengths[..n])?;
            let upper = stable_norm::fekete_upper(&seq)?;
            if let Some(prev) = &previous {
                ensure!(&upper <= prev, "fekete bound increased at N={n} for {}", ctx.render(&g));
            }
            previous = Some(upper);
        }
    }
    Ok(Run::Cases(30))
}

fn stable_norm_conjugacy_invariance(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(15);
    let (horizon, conj_len) = if ctx.free {
        (ctx.terms, 4)
    } else if ctx.metric.rmax() >= 3 {
        (ctx.metric.rmax() - 2, 1)
    } else {
        return Ok(Run::Skipped("R_max below 3"));
    };
    for _ in 0..50 {
        let u = if ctx.free { s.infinite_order_free_word(8) } else { s.word(1) };
        let len = s.below(conj_len + 1);
        let a = s.word(len);
        ensure!(
            stable_norm::check_conjugacy_invariance(ctx.metric, &u, &a, horizon)?,
            "conjugacy inequality fails for u={}, a={}",
            ctx.render(&u),
            ctx.render(&a)
        );
    }
    Ok(Run::Cases(50))
}

fn stable_norm_homogeneity(ctx: &Ctx) -> Result<Run> {
    let mut s = ctx.sampler(16);
    let (terms, powers): (usize, &[usize]) = if ctx.free {
        (ctx.terms, &[1, 2, 3])
    } else if ctx.metric.rmax() >= 2 {
        (ctx.metric.rmax() / 2, &[1, 2])
    } else {
        return Ok(Run::Skipped("R_max below 2"));
    };
    let constants = if ctx.free { ctx.constants } else { None };
    let mut cases = 0;
    for _ in 0..30 {
        let w = if ctx.free { s.infinite_order_free_word(8) } else { s.word(1) };
        for &m in powers {
            ensure!(
                stable_norm::check_homogeneity(ctx.metric, &w, m, terms, constants)?,
                "homogeneity intervals miss for {} and m={m}",
                ctx.render(&w)
            );
            cases += 1;
        }
    }
    Ok(Run::Cases(cases))
}

fn stable_norm_free_oracle_bracket(ctx: &Ctx) -> Result<Run> {
    if !ctx.free {
        return Ok(Run::Skipped("not a free presentation"));
    }
    let p = ctx.metric.presentation();
    let mut s = ctx.sampler(17);
    for _ in 0..100 {
        let w = s.infinite_order_free_word(12);
        let oracle = stable_norm::free_oracle_stable_norm(p, &w)?;
        let oracle_r = rational::int(oracle as i64);
        let (conjugator, _) = cyclic_free_reduction(&w);
        let e = stable_norm::stable_norm_estimate(ctx.metric, &w, ctx.terms, ctx.constants)?;
        let slack = rational::ratio(2 * conjugator.lgr() as i64, ctx.terms as i64);
        ensure!(oracle_r <= e.upper, "upper bound below oracle for {}", ctx.render(&w));
        ensure!(e.upper <= &oracle_r + slack, "upper bound too loose for {}", ctx.render(&w));
        ensure!(e.lower <= oracle_r, "lower bound above oracle for {}", ctx.render(&w));
        for m in [2, 3, 5] {
            ensure!(
                stable_norm::free_oracle_stable_norm(p, &w.power(m))? == m as usize * oracle,
                "oracle not homogeneous for {}",
                ctx.render(&w)
            );
        }
    }
    Ok(Run::Cases(100))
}

fn bound_certificate(ctx: &Ctx) -> Result<Run> {
    let Some(c) = ctx.constants else {
        return Ok(Run::Skipped("no constants"));
    };
    let cert = bound::compute_certificate(ctx.metric, c)?;
    let again = bound::compute_certificate(ctx.metric, c)?;
    ensure!(cert == again, "certificate is not deterministic");
    let ball = ctx.metric.ball(c.k - 1)?;
    ensure!(cert.table.len() == ball.len(), "certificate does not cover the ball");
    ensure!(cert.n_max >= 2, "n_max below 2");
    ensure!(cert.k_bound > rational::int(0), "K is not positive");
    let ceiling = rational::int(c.k as i64) / (&c.lambda * rational::int(2));
    ensure!(cert.k_bound <= ceiling, "K exceeds k/(2λ)");
    Ok(Run::Cases(cert.table.len()))
}

fn bound_soundness(ctx: &Ctx) -> Result<Run> {
    let Some(c) = ctx.constants else {
        return Ok(Run::Skipped("no constants"));
    };
    let cert = bound::compute_certificate(ctx.metric, c)?;
    let mut s = ctx.sampler(19);
    let sample: Vec<Word> = (0..100).map(|_| ctx.element(&mut s, 12)).collect();
    let terms = ctx.power_horizon(ctx.terms);
    let report = bound::verify_certificate(ctx.metric, &cert, &sample, terms);
    ensure!(report.violations() == 0, "{} violations of K", report.violations());
    let unresolved = report.entries.len() - report.checked() - report.excluded();
    ensure!(unresolved == 0, "{unresolved} sample words could not be checked");
    Ok(Run::Cases(report.checked()))
}

fn bound_quasigeodesic(ctx: &Ctx) -> Result<Run> {
    let Some(c) = ctx.constants else {
        return Ok(Run::Skipped("no constants"));
    };
    let max_len = if ctx.free { c.k + 10 } else { ctx.metric.rmax() };
    if max_len < c.k {
        return Ok(Run::Skipped("R_max below k"));
    }
    let mut s = ctx.sampler(20);
    let mut cases = 0;
    for _ in 0..50 {
        let len = c.k + s.below(max_len - c.k + 1);
        let w = s.cyclically_reduced_word(len);
        if !ctx.metric.is_cyclically_reduced(&w)? {
            continue;
        }
        let horizon = if ctx.free { 8 } else { (ctx.metric.rmax() / w.lgr()).max(1) };
        for n in 1..=horizon {
            ensure!(
                ctx.metric.quasigeodesic_check(&w, n, &c.lambda, &c.eps)?,
                "quasigeodesic inequality fails for {} at n={n}",
                ctx.render(&w)
            );
            cases += 1;
        }
    }
    Ok(Run::Cases(cases))
}
