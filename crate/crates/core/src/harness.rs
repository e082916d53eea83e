//! Verification campaigns over the registry.
//!
//! Points are drawn serially from a seeded generator and then evaluated in
//! parallel, so a campaign is a pure function of its [`SampleSpec`].

use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::curious::{abel_from_rothe_probe, bns_shift_chain, vwp_limit_probe};
use crate::error::{Error, Result};
use crate::identity::{lookup, registry, Backend, Draw, IdentityRecord, Kind, Q_RANGE};
use crate::inversion::{
    cor1_pair, cor2_pair, krattenthaler_pair, product_identity, reconstruct_transfer,
    specialized_krattenthaler, verify_orthogonality, InversePair, PairKind,
};
use crate::qcore::{
    sum_series, AdaptiveConfig, Guard, IntSym, Mode, ParameterPoint, PointRecord, Rational, Scalar,
    SeriesKind, Sym, TermSeries, Truncation, Value, Wide,
};

/// Relative residual above which a float sample fails.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative truncation target of series and products.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;
/// Rejection-sampling attempts per point.
pub const MAX_ATTEMPTS: usize = 10_000;
/// Largest terminating index used by sweeps.
pub const N_MAX: i64 = 8;

/// Pole pre-check window: every `k` with `|q|^|k| > 1e-18`, at most this many.
const POLE_SCAN_CAP: i64 = 200;
const POLE_SCAN_FLOOR: f64 = 1e-18;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub id: String,
    pub count: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Accepted range of `|q|`.
    pub q_range: (f64, f64),
    /// Cap on every convergence ratio.
    pub margin: f64,
    /// Smallest admissible modulus of a denominator factor while sampling.
    pub pole_margin: f64,
    /// Terminating index; drawn from `0..=8` when absent.
    pub fixed_n: Option<i64>,
    pub tol: f64,
    pub series_tol: f64,
    /// Relative factor applied to every summand, for fault injection.
    pub perturb: Option<f64>,
    /// Float mode: a point is rejected unless its certified error budget,
    /// relative to the larger side, is at most `certify`.
    #[serde(default = "default_certify")]
    pub certify: f64,
}

fn default_certify() -> f64 {
    DEFAULT_TOL / 10.0
}

impl SampleSpec {
    /// Defaults: 50 exact or 100 float samples, seed 0.
    pub fn new(id: &str, mode: Mode) -> Self {
        SampleSpec {
            id: id.to_string(),
            count: if mode == Mode::Exact { 50 } else { 100 },
            seed: 0,
            mode,
            q_range: Q_RANGE,
            margin: 0.9,
            pole_margin: 1e-6,
            fixed_n: None,
            tol: DEFAULT_TOL,
            series_tol: DEFAULT_SERIES_TOL,
            perturb: None,
            certify: default_certify(),
        }
    }

    /// Exact for terminating identities, float otherwise.
    pub fn default_for(rec: &IdentityRecord) -> Self {
        Self::new(rec.id, if rec.supports_exact() { Mode::Exact } else { Mode::Float })
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n(mut self, n: i64) -> Self {
        self.fixed_n = Some(n);
        self
    }

    pub fn with_perturb(mut self, rel: f64) -> Self {
        self.perturb = Some(rel);
        self
    }
}

/// Summation range of `rec` at `p` for the pole pre-check.
fn scan_range<S: Scalar>(rec: &IdentityRecord, p: &ParameterPoint<S>) -> Result<(i64, i64)> {
    let k = (POLE_SCAN_FLOOR.log2() / p.q().log2_abs()).ceil();
    let k = if k.is_finite() { (k as i64).clamp(1, POLE_SCAN_CAP) } else { POLE_SCAN_CAP };
    Ok(match rec.kind {
        Kind::Terminating => (0, p.int(IntSym::N)?),
        Kind::Unilateral => (0, k),
        Kind::Bilateral => (-k, k),
    })
}

fn draw_one<S: Backend>(
    rec: &IdentityRecord,
    spec: &SampleSpec,
    rng: &mut ChaCha8Rng,
    guard: &Guard,
) -> Result<ParameterPoint<S>> {
    let p = (rec.sides::<S>().sample)(&mut Draw::new(rng, spec.fixed_n))?;
    let aq = p.q().abs_f64();
    if aq < spec.q_range.0 || aq > spec.q_range.1 {
        return Err(Error::InvalidParameter(format!("|q| = {aq} outside the sampling range")));
    }
    for c in rec.constraints(&p)? {
        if !(c.value <= spec.margin) {
            return Err(Error::InvalidParameter(format!("|{}| = {} above margin", c.label, c.value)));
        }
    }
    (rec.sides::<S>().lhs)(&p, guard)?;
    let (lo, hi) = scan_range(rec, &p)?;
    for k in lo..=hi {
        rec.term(&p, k, guard)?;
    }
    if !S::is_exact() {
        // Cancellation and slow tails can push the attainable accuracy of
        // binary64 above the tolerance; such points cannot certify anything.
        let s = evaluate_sides(rec, spec, &p, None)?;
        let scale = s.lhs.abs_f64().max(s.rhs.abs_f64());
        let budget = s.lhs_tail + s.rhs_tail + rounding_bound::<S>(&s);
        if !(budget <= spec.certify * scale) {
            return Err(Error::InvalidParameter(format!(
                "ill-conditioned: error budget {budget:e} against |value| {scale:e}"
            )));
        }
    }
    Ok(p)
}

/// Draws `spec.count` points inside the identity's domain, each with every
/// convergence ratio at most `margin` and every denominator factor at least
/// `pole_margin` away from zero (exactly nonzero in exact mode). Float points
/// must also have a relative error budget of at most `spec.certify`.
pub fn sample<S: Backend>(spec: &SampleSpec) -> Result<Vec<ParameterPoint<S>>> {
    let rec = lookup(&spec.id)?;
    if S::is_exact() && !rec.supports_exact() {
        return Err(Error::Mode(format!("`{}` is not terminating; use float mode", rec.id)));
    }
    let guard = if S::is_exact() {
        Guard::STRICT
    } else {
        Guard::with_margin(spec.pole_margin)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    while out.len() < spec.count {
        let mut last = String::new();
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            match draw_one::<S>(rec, spec, &mut rng, &guard) {
                Ok(p) => {
                    found = Some(p);
                    break;
                }
                Err(e) => last = e.to_string(),
            }
        }
        match found {
            Some(p) => out.push(p),
            None => {
                return Err(Error::SamplingExhausted {
                    id: rec.id.to_string(),
                    attempts: MAX_ATTEMPTS,
                    last,
                })
            }
        }
    }
    Ok(out)
}

/// One evaluated sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub index: usize,
    pub point: PointRecord,
    pub lhs: Option<Value>,
    pub rhs: Option<Value>,
    pub abs_residual: Option<f64>,
    /// `|lhs - rhs| / max(|lhs|, |rhs|, 1e-300)`.
    pub rel_residual: Option<f64>,
    /// Truncation bound of the closed form's infinite products.
    pub lhs_tail_bound: f64,
    /// Series truncation bound plus the product bounds inside the summands.
    pub rhs_tail_bound: f64,
    /// `10 u (1 + terms) (Σ|t_k| + |lhs|)`.
    pub rounding_bound: f64,
    pub terms_used: usize,
    /// The absolute residual is within tails plus rounding.
    pub within_budget: bool,
    pub passed: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub point: PointRecord,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub samples: usize,
    pub max_rel_residual: f64,
    pub max_abs_residual: f64,
    /// Samples whose residual exceeds the error budget.
    pub budget_violations: usize,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub spec: SampleSpec,
    pub samples: Vec<SampleResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    fn from_samples(id: &str, spec: SampleSpec, samples: Vec<SampleResult>) -> Self {
        let failures = samples
            .iter()
            .filter(|s| !s.passed)
            .map(|s| Failure {
                index: s.index,
                point: s.point.clone(),
                reason: s.error.clone().unwrap_or_else(|| {
                    format!("relative residual {:e} above {:e}", s.rel_residual.unwrap_or(f64::NAN), spec.tol)
                }),
            })
            .collect::<Vec<_>>();
        let fold = |f: fn(&SampleResult) -> Option<f64>| samples.iter().filter_map(f).fold(0.0, f64::max);
        let summary = Summary {
            samples: samples.len(),
            max_rel_residual: fold(|s| s.rel_residual),
            max_abs_residual: fold(|s| s.abs_residual),
            budget_violations: samples.iter().filter(|s| s.error.is_none() && !s.within_budget).count(),
            passed: failures.is_empty() && !samples.is_empty(),
            failures,
        };
        VerificationReport {
            id: id.to_string(),
            spec,
            samples,
            summary,
        }
    }
}

struct Sides<S> {
    lhs: S,
    rhs: S,
    lhs_tail: f64,
    rhs_tail: f64,
    abs_sum: f64,
    terms: usize,
}

fn perturbation<S: Scalar>(rel: Option<f64>) -> S {
    match rel {
        None => S::one(),
        Some(r) => {
            const SCALE: i64 = 1_000_000_000_000_000;
            S::from_ratio(SCALE + (r * SCALE as f64).round() as i64, SCALE)
        }
    }
}

fn rounding_bound<S: Scalar>(s: &Sides<S>) -> f64 {
    10.0 * S::rounding_unit() * (1 + s.terms) as f64 * (s.abs_sum + s.lhs.abs_f64())
}

fn evaluate_sides<S: Backend>(
    rec: &IdentityRecord,
    spec: &SampleSpec,
    p: &ParameterPoint<S>,
    perturb: Option<f64>,
) -> Result<Sides<S>> {
    let q = p.q();
    let g = Guard::STRICT;
    let product_tol = spec.series_tol / 4.0;
    let factor: S = perturbation(perturb);
    let lhs_term = (rec.sides::<S>().lhs)(p, &g)?;
    let (lhs, lhs_tail) = if S::is_exact() {
        (lhs_term.reduce(q)?.into_exact()?, 0.0)
    } else {
        let e = lhs_term.evaluate(q, product_tol, &g)?;
        (e.value, e.error_bound)
    };
    let product_err = Mutex::new(0.0f64);
    let summand = |k: i64| -> Result<S> {
        let t = rec.term(p, k, &g)?;
        let v = if S::is_exact() {
            t.reduce(q)?.into_exact()?
        } else {
            let e = t.evaluate(q, product_tol, &g)?;
            *product_err.lock().expect("unpoisoned") += e.error_bound;
            e.value
        };
        Ok(v * factor.clone())
    };
    let kind = match rec.kind {
        Kind::Terminating => SeriesKind::Terminating(p.int(IntSym::N)?.max(0) as u64),
        Kind::Unilateral => SeriesKind::Unilateral,
        Kind::Bilateral => SeriesKind::Bilateral,
    };
    let cfg = AdaptiveConfig {
        tol: spec.series_tol,
        ..Default::default()
    };
    let s = sum_series(&TermSeries::new(kind, Truncation::Adaptive(cfg), summand))?;
    let product_err = product_err.into_inner().expect("unpoisoned");
    Ok(Sides {
        lhs,
        rhs: s.value,
        lhs_tail,
        rhs_tail: s.tail_bound + product_err,
        abs_sum: s.abs_sum,
        terms: s.terms_used,
    })
}

fn evaluate_sample<S: Backend>(
    rec: &IdentityRecord,
    spec: &SampleSpec,
    index: usize,
    p: &ParameterPoint<S>,
) -> SampleResult {
    let mut r = SampleResult {
        index,
        point: p.to_record(),
        lhs: None,
        rhs: None,
        abs_residual: None,
        rel_residual: None,
        lhs_tail_bound: 0.0,
        rhs_tail_bound: 0.0,
        rounding_bound: 0.0,
        terms_used: 0,
        within_budget: false,
        passed: false,
        error: None,
    };
    let s = match evaluate_sides(rec, spec, p, spec.perturb) {
        Ok(s) => s,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    let diff = s.lhs.clone() - s.rhs.clone();
    let abs = diff.abs_f64();
    let scale = s.lhs.abs_f64().max(s.rhs.abs_f64()).max(1e-300);
    let rel = abs / scale;
    r.lhs = Some(s.lhs.to_value());
    r.rhs = Some(s.rhs.to_value());
    r.lhs_tail_bound = s.lhs_tail;
    r.rhs_tail_bound = s.rhs_tail;
    r.rounding_bound = rounding_bound(&s);
    r.terms_used = s.terms;
    if !abs.is_finite() {
        r.error = Some("non-finite residual".into());
        return r;
    }
    r.abs_residual = Some(abs);
    r.rel_residual = Some(rel);
    r.within_budget = abs <= s.lhs_tail + s.rhs_tail + r.rounding_bound;
    r.passed = if S::is_exact() { diff.is_zero() } else { rel <= spec.tol };
    r
}

fn run<S: Backend>(spec: &SampleSpec) -> Result<VerificationReport> {
    let rec = lookup(&spec.id)?;
    let points = sample::<S>(spec)?;
    let samples = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate_sample(rec, spec, i, p))
        .collect();
    Ok(VerificationReport::from_samples(rec.id, spec.clone(), samples))
}

/// Samples and checks one identity. Per-sample poles and nonconvergence are
/// recorded as failures; only an unusable spec is an error.
pub fn verify(spec: &SampleSpec) -> Result<VerificationReport> {
    match spec.mode {
        Mode::Exact => run::<Rational>(spec),
        Mode::Float => run::<Wide>(spec),
    }
}

/// `spec.count` samples for every terminating index `0..=n_max`, merged
/// into one report. Seeds are `spec.seed + n`.
pub fn verify_sweep(spec: &SampleSpec, n_max: i64) -> Result<VerificationReport> {
    let mut samples = Vec::new();
    for n in 0..=n_max {
        let sub = spec.clone().with_n(n).with_seed(spec.seed.wrapping_add(n as u64));
        let rep = verify(&sub)?;
        let base = samples.len();
        samples.extend(rep.samples.into_iter().map(|mut s| {
            s.index += base;
            s
        }));
    }
    let mut merged = spec.clone();
    merged.fixed_n = None;
    merged.count = samples.len();
    Ok(VerificationReport::from_samples(&spec.id, merged, samples))
}

// Degenerations

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub source: String,
    pub target: String,
    pub substitution: String,
    /// Index range of the termwise comparison.
    pub k_range: (i64, i64),
    pub cases: usize,
    /// Largest relative difference of the closed forms (float check).
    pub max_lhs_dev: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationConfig {
    pub seed: u64,
    /// Points per auxiliary index.
    pub samples: usize,
    /// Terms `-k_max..=k_max` are compared.
    pub k_max: i64,
    /// Auxiliary indices `0..=aux_max`.
    pub aux_max: i64,
    pub lhs_tol: f64,
}

impl Default for DegenerationConfig {
    fn default() -> Self {
        DegenerationConfig {
            seed: 0,
            samples: 4,
            k_max: 8,
            aux_max: N_MAX,
            lhs_tol: 1e-10,
        }
    }
}

/// One link instance. The outer error rejects the point (a pole somewhere);
/// the inner result is the closed-form deviation or the reason for a mismatch.
fn check_link(
    rec: &IdentityRecord,
    target: &IdentityRecord,
    map: crate::identity::LinkFn,
    rng: &mut ChaCha8Rng,
    aux: i64,
    cfg: &DegenerationConfig,
) -> Result<std::result::Result<f64, String>> {
    let p = (rec.exact.sample)(&mut Draw::new(rng, Some(aux)))?;
    let lp = map(&p, aux)?;
    let g = Guard::STRICT;
    let q = lp.source.q();
    // Evaluate everything first so that a pole rejects the point.
    let mut pairs = Vec::new();
    for k in -cfg.k_max..=cfg.k_max {
        let s = rec.term(&lp.source, k, &g)?;
        let t = target.term(&lp.target, k, &g)?.mul(&lp.factor);
        pairs.push((k, s, t));
    }
    let ls = (rec.exact.lhs)(&lp.source, &g)?;
    let lt = (target.exact.lhs)(&lp.target, &g)?.mul(&lp.factor);
    let fq = q.to_wide();
    let lsw = ls.map(Scalar::to_wide).evaluate(&fq, 1e-16, &g)?.value;
    let ltw = lt.map(Scalar::to_wide).evaluate(&fq, 1e-16, &g)?.value;
    for (k, s, t) in pairs {
        if !s.equals(&t, q)? {
            return Ok(Err(format!("k = {k} differs at {:?} (aux {aux})", lp.source.to_record())));
        }
    }
    if ls.equals(&lt, q)? {
        return Ok(Ok(0.0));
    }
    let dev = (lsw - ltw).abs() / lsw.abs().max(ltw.abs()).max(1e-300);
    if dev > cfg.lhs_tol {
        return Ok(Err(format!("closed forms differ by {dev:e} at {:?}", lp.source.to_record())));
    }
    Ok(Ok(dev))
}

/// Checks every registered degeneration `source(p, k) = K · target(p', k)`
/// termwise in exact arithmetic and the closed forms numerically.
pub fn degeneration_suite(cfg: &DegenerationConfig) -> Vec<DegenerationReport> {
    let mut jobs = Vec::new();
    for rec in registry() {
        for (i, link) in rec.degenerations.iter().enumerate() {
            jobs.push((rec, i, *link));
        }
    }
    jobs.par_iter()
        .enumerate()
        .map(|(j, (rec, _, link))| {
            let mut rep = DegenerationReport {
                source: rec.id.to_string(),
                target: link.target.to_string(),
                substitution: link.substitution.to_string(),
                k_range: (-cfg.k_max, cfg.k_max),
                cases: 0,
                max_lhs_dev: 0.0,
                failures: Vec::new(),
                passed: false,
            };
            let target = match lookup(link.target) {
                Ok(t) => t,
                Err(e) => {
                    rep.failures.push(e.to_string());
                    return rep;
                }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(j as u64));
            for aux in 0..=cfg.aux_max {
                for _ in 0..cfg.samples {
                    let mut last = String::new();
                    let mut done = false;
                    for _ in 0..MAX_ATTEMPTS / 10 {
                        match check_link(rec, target, link.map, &mut rng, aux, cfg) {
                            Ok(Ok(dev)) => {
                                rep.max_lhs_dev = rep.max_lhs_dev.max(dev);
                                done = true;
                            }
                            Ok(Err(reason)) => {
                                rep.failures.push(reason);
                                done = true;
                            }
                            Err(e) => last = e.to_string(),
                        }
                        if done {
                            break;
                        }
                    }
                    if done {
                        rep.cases += 1;
                    } else {
                        rep.failures.push(format!("no admissible point for aux {aux}: {last}"));
                    }
                }
            }
            rep.passed = rep.failures.is_empty() && rep.cases > 0;
            rep
        })
        .collect()
}

// The e = q^l chain

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCase {
    pub point: PointRecord,
    pub l: i64,
    pub max_rel_deviation: f64,
    pub passed: bool,
    pub error: Option<String>,
}

/// Points `(q, b, c, d)` at which the chain is evaluated.
///
/// `q` is a signed power of two so that `q^l q^{-l}` is exactly one in
/// binary64; otherwise the terms below `k = -l` survive as rounding noise
/// and the bilateral sum diverges.
pub const CHAIN_POINTS: [(f64, f64, f64, f64); 3] = [
    (0.5, 0.2, 5.0, 1.0 / 3.0),
    (0.25, -0.45, 2.5, 0.7),
    (-0.5, 0.35, -3.0, -0.25),
];

/// Evaluates the `e = q^l` reduction chain of the bilateral theorem for
/// `l = 0..=l_max` and compares every stage with the closed form.
pub fn shift_chain_suite(l_max: i64, tol: f64) -> Vec<ChainCase> {
    let w = Wide::from_real;
    let mut out = Vec::new();
    for (q, b, c, d) in CHAIN_POINTS {
        let p = match ParameterPoint::new(w(q)) {
            Ok(p) => p.with(Sym::B, w(b)).with(Sym::C, w(c)).with(Sym::D, w(d)),
            Err(_) => continue,
        };
        for l in 0..=l_max {
            let (dev, error) = match bns_shift_chain(&p, l, DEFAULT_SERIES_TOL / 10.0) {
                Ok(ch) => (ch.max_rel_deviation(), None),
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            out.push(ChainCase {
                point: p.to_record(),
                l,
                max_rel_deviation: if dev.is_finite() { dev } else { f64::MAX },
                passed: error.is_none() && dev <= tol,
                error,
            });
        }
    }
    out
}

// Limit probes

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub source: String,
    pub target: String,
    /// The growing parameter (`B` or `m`) at the two probes.
    pub x: (f64, f64),
    pub deviation: (f64, f64),
    /// `deviation.1 / deviation.0`; `0.5` for `1/x` decay at `x, 2x`.
    pub ratio: f64,
    pub passed: bool,
    pub error: Option<String>,
}

/// Pairs of the large-`b` limits.
pub const LIMIT_PAIRS: [(&str, &str); 5] = [
    ("thm_ts", "65s"),
    ("thm_tns", "55ns"),
    ("thm_tnsc", "55ns"),
    ("thm_bns", "46s"),
    ("thm_bnsc", "46s"),
];

/// Tolerance on the decay ratio `0.5`.
pub const RATIO_TOL: f64 = 0.05;

fn probe_report(source: &str, target: &str, x: f64, f: impl Fn(f64) -> Result<f64>) -> ProbeReport {
    let res = f(x).and_then(|d1| Ok((d1, f(2.0 * x)?)));
    let (deviation, error) = match res {
        Ok(d) => (d, None),
        Err(e) => ((0.0, 0.0), Some(e.to_string())),
    };
    let ratio = if deviation.0 > 0.0 { deviation.1 / deviation.0 } else { 0.0 };
    ProbeReport {
        source: source.to_string(),
        target: target.to_string(),
        x: (x, 2.0 * x),
        deviation,
        ratio,
        passed: error.is_none() && (ratio - 0.5).abs() <= RATIO_TOL,
        error,
    }
}

/// `O(1/B)` decay of the large-`b` limits at `B` and `2B`.
pub fn limit_probe_suite(big_b: f64) -> Vec<ProbeReport> {
    LIMIT_PAIRS
        .iter()
        .map(|(s, t)| {
            probe_report(s, t, big_b, |x| vwp_limit_probe(lookup(s)?, lookup(t)?, x))
        })
        .collect()
}

/// `O(1/m)` decay of the scaled Hagen–Rothe sum towards Abel's, at `m` and `2m`.
pub fn abel_probe(m: i64) -> ProbeReport {
    let (a, b, c) = (Rational::from_int(1), Rational::from_int(2), Rational::from_int(3));
    probe_report("hagen_rothe", "abel", m as f64, |x| {
        abel_from_rothe_probe(&a, &b, &c, 3, x as i64)
    })
}

// Orthogonality

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalitySuiteReport {
    pub pair: PairKind,
    pub mode: Mode,
    pub contexts: usize,
    pub windows: Vec<(i64, i64)>,
    pub max_offdiag: f64,
    pub max_diag_dev: f64,
    /// Diagonal transfer from the general pair (specialisations only).
    pub transfer_checked: bool,
    /// Entries of the worked product identity compared (specialisations only).
    pub product_entries: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityConfig {
    pub seed: u64,
    pub contexts: usize,
    /// Each window is checked on all of its sub-windows.
    pub windows: Vec<(i64, i64)>,
    /// Largest `k - l` in the product identity.
    pub product_span: i64,
    pub tol: f64,
}

impl Default for OrthogonalityConfig {
    fn default() -> Self {
        OrthogonalityConfig {
            seed: 0,
            contexts: 25,
            windows: vec![(0, 8), (3, 11)],
            product_span: 6,
            tol: 1e-12,
        }
    }
}

fn rational(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Rational {
    <Rational as Backend>::draw(rng, lo, hi)
}

/// Random rational context `(a, b, c, q)` for the specialisations.
fn cor_context(rng: &mut ChaCha8Rng) -> [Rational; 4] {
    [
        rational(rng, 0.1, 3.0),
        rational(rng, 0.1, 3.0),
        rational(rng, 0.2, 9.0),
        rational(rng, Q_RANGE.0, Q_RANGE.1),
    ]
}

fn to_mode<S: Scalar>(x: &Rational) -> S {
    S::from_value(&x.to_value()).unwrap_or_else(|| S::from_value(&x.to_wide().to_value()).expect("float value"))
}

/// Builds the pair for one random context; the general pair gets random
/// sequences `a_j`, `c_j` of the window's length.
fn random_pair<S: Scalar>(kind: PairKind, rng: &mut ChaCha8Rng, len: usize) -> (InversePair<S>, [Rational; 4]) {
    match kind {
        PairKind::Krattenthaler => {
            let a: Vec<S> = (0..len).map(|_| to_mode(&rational(rng, 0.2, 5.0))).collect();
            let c: Vec<S> = (0..len).map(|_| to_mode(&rational(rng, 0.2, 5.0))).collect();
            let d = rational(rng, 0.2, 5.0);
            let ctx = [Rational::zero(), Rational::zero(), Rational::zero(), d.clone()];
            let p = krattenthaler_pair(
                move |j| a[j as usize].clone(),
                move |j| c[j as usize].clone(),
                to_mode(&d),
            );
            (p, ctx)
        }
        PairKind::Cor1 | PairKind::Cor2 => {
            let ctx = cor_context(rng);
            let [a, b, c, q] = ctx.clone().map(|x| to_mode::<S>(&x));
            let p = if kind == PairKind::Cor1 {
                cor1_pair(a, b, c, q)
            } else {
                cor2_pair(a, b, c, q)
            };
            (p.expect("q drawn nonzero"), ctx)
        }
    }
}

fn check_context<S: Scalar>(
    kind: PairKind,
    pair: &InversePair<S>,
    ctx: &[Rational; 4],
    cfg: &OrthogonalityConfig,
    rep: &mut OrthogonalitySuiteReport,
) -> Result<()> {
    let mut found = Vec::new();
    for &(l, n) in &cfg.windows {
        let o = verify_orthogonality(pair, l, n)?;
        rep.max_offdiag = rep.max_offdiag.max(o.max_offdiag);
        rep.max_diag_dev = rep.max_diag_dev.max(o.diag_dev);
        if !o.passes(cfg.tol) {
            found.push(format!("window ({l}, {n}) at {ctx:?}: offdiag {:e}, diag {:e}", o.max_offdiag, o.diag_dev));
        }
    }
    if kind != PairKind::Krattenthaler {
        let [a, b, c, q] = ctx.clone().map(|x| to_mode::<S>(&x));
        let general = specialized_krattenthaler(a.clone(), b.clone(), c.clone(), q.clone())?;
        let size = cfg.windows.iter().map(|w| w.1 - w.0).max().unwrap_or(0).min(N_MAX);
        let t = reconstruct_transfer(&general, pair, size)?;
        if !t.consistent(cfg.tol) {
            found.push(format!("diagonal transfer inconsistent ({:e}) at {ctx:?}", t.max_dev));
        }
        rep.transfer_checked = true;
        for l in 0..=3 {
            for k in l..=l + cfg.product_span {
                let (x, y) = product_identity(&a, &b, &c, &q, l, k)?;
                let dev = (x.clone() - y.clone()).abs_f64();
                let ok = if S::is_exact() { dev == 0.0 } else { dev <= cfg.tol * x.abs_f64().max(1.0) };
                if !ok {
                    found.push(format!("product identity at (l, k) = ({l}, {k}) fails at {ctx:?}"));
                }
                rep.product_entries += 1;
            }
        }
    }
    rep.failures.extend(found);
    Ok(())
}

fn orthogonality_run<S: Scalar>(kind: PairKind, cfg: &OrthogonalityConfig) -> OrthogonalitySuiteReport {
    let mut rep = OrthogonalitySuiteReport {
        pair: kind,
        mode: S::MODE,
        contexts: 0,
        windows: cfg.windows.clone(),
        max_offdiag: 0.0,
        max_diag_dev: 0.0,
        transfer_checked: false,
        product_entries: 0,
        failures: Vec::new(),
        passed: false,
    };
    let len = cfg.windows.iter().map(|w| w.1 + 1).max().unwrap_or(1).max(1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(kind as u64));
    let mut attempts = 0;
    while rep.contexts < cfg.contexts {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            rep.failures.push("no pole-free context found".into());
            break;
        }
        let (pair, ctx) = random_pair::<S>(kind, &mut rng, len);
        let mut trial = rep.clone();
        trial.failures.clear();
        match check_context(kind, &pair, &ctx, cfg, &mut trial) {
            Ok(()) => {
                trial.failures.splice(0..0, rep.failures.drain(..));
                rep = trial;
                rep.contexts += 1;
            }
            // a vanishing denominator: the context is not pole-free
            Err(Error::DegenerateInput(_)) => {}
            Err(e) => {
                rep.failures.push(e.to_string());
                rep.contexts += 1;
            }
        }
    }
    rep.passed = rep.failures.is_empty() && rep.contexts == cfg.contexts;
    rep
}

/// Both orthogonality relations of one pair over random pole-free contexts,
/// plus the diagonal transfer and product identity for the specialisations.
pub fn orthogonality_suite(kind: PairKind, mode: Mode, cfg: &OrthogonalityConfig) -> OrthogonalitySuiteReport {
    match mode {
        Mode::Exact => orthogonality_run::<Rational>(kind, cfg),
        Mode::Float => orthogonality_run::<Wide>(kind, cfg),
    }
}

// Full campaign

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    /// Exact samples per identity and terminating index.
    pub exact_count: usize,
    pub float_count: usize,
    pub tol: f64,
    pub series_tol: f64,
    /// Restrict the identity campaigns to one id.
    pub only: Option<String>,
    /// Inject a relative fault into one identity's summand.
    pub perturb: Option<(String, f64)>,
    pub orthogonality: OrthogonalityConfig,
    pub degenerations: DegenerationConfig,
    pub limit_b: f64,
    pub abel_m: i64,
    pub chain_l_max: i64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            exact_count: 50,
            float_count: 100,
            tol: DEFAULT_TOL,
            series_tol: DEFAULT_SERIES_TOL,
            only: None,
            perturb: None,
            orthogonality: OrthogonalityConfig::default(),
            degenerations: DegenerationConfig::default(),
            limit_b: 1e6,
            abel_m: 1_000_000,
            chain_l_max: 5,
        }
    }
}

impl CampaignConfig {
    /// The spec used for `rec` by [`verify_all`].
    pub fn spec_for(&self, rec: &IdentityRecord) -> SampleSpec {
        let mut s = SampleSpec::default_for(rec).with_seed(self.seed);
        s.count = if s.mode == Mode::Exact { self.exact_count } else { self.float_count };
        s.tol = self.tol;
        s.series_tol = self.series_tol;
        if let Some((id, rel)) = &self.perturb {
            if id == rec.id {
                s.perturb = Some(*rel);
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityOutcome {
    pub id: String,
    pub mode: Mode,
    pub samples: usize,
    pub max_rel_residual: f64,
    pub failures: Vec<Failure>,
    pub error: Option<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: CampaignConfig,
    pub identities: Vec<IdentityOutcome>,
    pub orthogonality: Vec<OrthogonalitySuiteReport>,
    pub degenerations: Vec<DegenerationReport>,
    pub shift_chain: Vec<ChainCase>,
    pub probes: Vec<ProbeReport>,
    pub passed: bool,
}

/// Campaign for one identity as run by [`verify_all`]: terminating
/// identities exactly for every `n` in `0..=8`, the others in float mode.
pub fn verify_identity(rec: &IdentityRecord, cfg: &CampaignConfig) -> IdentityOutcome {
    let spec = cfg.spec_for(rec);
    let res = if spec.mode == Mode::Exact {
        verify_sweep(&spec, N_MAX)
    } else {
        verify(&spec)
    };
    match res {
        Ok(r) => IdentityOutcome {
            id: r.id,
            mode: spec.mode,
            samples: r.summary.samples,
            max_rel_residual: r.summary.max_rel_residual,
            passed: r.summary.passed,
            failures: r.summary.failures,
            error: None,
        },
        Err(e) => IdentityOutcome {
            id: rec.id.to_string(),
            mode: spec.mode,
            samples: 0,
            max_rel_residual: 0.0,
            failures: Vec::new(),
            error: Some(e.to_string()),
            passed: false,
        },
    }
}

/// Every identity campaign plus the orthogonality, degeneration, chain and
/// probe suites. Passes iff every part passes.
pub fn verify_all(cfg: &CampaignConfig) -> SuiteReport {
    let identities: Vec<IdentityOutcome> = registry()
        .iter()
        .filter(|r| cfg.only.as_deref().is_none_or(|id| id == r.id))
        .map(|r| verify_identity(r, cfg))
        .collect();
    let mut ocfg = cfg.orthogonality.clone();
    ocfg.seed = ocfg.seed.wrapping_add(cfg.seed);
    let orthogonality = PairKind::ALL
        .iter()
        .map(|k| orthogonality_suite(*k, Mode::Exact, &ocfg))
        .collect::<Vec<_>>();
    let mut dcfg = cfg.degenerations;
    dcfg.seed = dcfg.seed.wrapping_add(cfg.seed);
    let degenerations = degeneration_suite(&dcfg);
    let shift_chain = shift_chain_suite(cfg.chain_l_max, cfg.tol);
    let mut probes = limit_probe_suite(cfg.limit_b);
    probes.push(abel_probe(cfg.abel_m));
    let passed = identities.iter().all(|r| r.passed)
        && orthogonality.iter().all(|r| r.passed)
        && degenerations.iter().all(|r| r.passed)
        && shift_chain.iter().all(|r| r.passed)
        && probes.iter().all(|r| r.passed);
    SuiteReport {
        config: cfg.clone(),
        identities,
        orthogonality,
        degenerations,
        shift_chain,
        probes,
        passed,
    }
}

// Serialisation

/// Canonical JSON: keys sorted, floats in shortest round-trip form, so that
/// parsing and re-serialising reproduces the same bytes.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let v = serde_json::to_value(x).map_err(|e| Error::Report(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Report(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Report(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_chain_agrees_at_every_point() {
        let cases = shift_chain_suite(5, 1e-9);
        assert_eq!(cases.len(), 3 * 6);
        for c in &cases {
            assert!(c.passed, "l={} dev={:e} err={:?}", c.l, c.max_rel_deviation, c.error);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let spec = SampleSpec::new("thm_bns", Mode::Float).with_count(20).with_seed(42);
        let a = sample::<Wide>(&spec).unwrap();
        let b = sample::<Wide>(&spec).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let [bb, c, d, e] = p.vals([Sym::B, Sym::C, Sym::D, Sym::E]).unwrap();
            assert!(d.abs() <= (0.9 + 1e-12) * c.abs());
            assert!(e.abs() <= (0.9 + 1e-12) * bb.abs());
        }
    }

    #[test]
    fn exact_sampling_yields_small_rationals() {
        use num_traits::ToPrimitive;
        let spec = SampleSpec::new("thm_ts", Mode::Exact).with_count(10).with_seed(1);
        for p in sample::<Rational>(&spec).unwrap() {
            for (_, v) in p.params() {
                assert!(v.numer().to_i64().is_some() && v.denom().to_i64().is_some());
            }
        }
        let nonterm = SampleSpec::new("thm_bns", Mode::Exact);
        assert!(matches!(sample::<Rational>(&nonterm), Err(Error::Mode(_))));
    }

    #[test]
    fn exact_campaign_has_zero_residual() {
        let spec = SampleSpec::new("thm_ts", Mode::Exact).with_count(10).with_seed(3);
        let rep = verify(&spec).unwrap();
        assert!(rep.passed(), "{:?}", rep.summary.failures);
        assert_eq!(rep.summary.max_abs_residual, 0.0);
    }

    #[test]
    fn float_campaign_within_tolerance_and_budget() {
        let spec = SampleSpec::new("1psi1", Mode::Float).with_count(30).with_seed(5);
        let rep = verify(&spec).unwrap();
        assert!(rep.passed(), "{:?}", rep.summary.failures);
        assert!(rep.summary.max_rel_residual < 1e-9);
        assert_eq!(rep.summary.budget_violations, 0);
    }

    #[test]
    fn fault_injection_is_detected() {
        let spec = SampleSpec::new("qgauss", Mode::Float).with_count(10).with_perturb(1e-6);
        assert!(!verify(&spec).unwrap().passed());
        let spec = SampleSpec::new("qps", Mode::Exact).with_count(5).with_n(3).with_perturb(1e-6);
        assert!(!verify(&spec).unwrap().passed());
    }

    #[test]
    fn unknown_identity_is_rejected() {
        assert!(matches!(verify(&SampleSpec::new("nosuch", Mode::Float)), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn degenerations_hold() {
        let cfg = DegenerationConfig {
            samples: 1,
            aux_max: 3,
            ..Default::default()
        };
        let reps = degeneration_suite(&cfg);
        assert!(reps.len() >= 10);
        for r in &reps {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn orthogonality_suite_small() {
        let cfg = OrthogonalityConfig {
            contexts: 3,
            windows: vec![(0, 4)],
            product_span: 3,
            ..Default::default()
        };
        for k in PairKind::ALL {
            let r = orthogonality_suite(k, Mode::Exact, &cfg);
            assert!(r.passed, "{r:?}");
            let r = orthogonality_suite(k, Mode::Float, &cfg);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn report_json_round_trips() {
        let spec = SampleSpec::new("qps", Mode::Exact).with_count(3);
        let rep = verify(&spec).unwrap();
        let s = to_json(&rep).unwrap();
        let back: VerificationReport = from_json(&s).unwrap();
        assert_eq!(back, rep);
        assert_eq!(to_json(&back).unwrap(), s);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap(), s);
    }
}
