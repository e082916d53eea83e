//! Identities as data: both sides, convergence domain, sampling recipe and
//! degeneration links.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{Guard, IntSym, ParameterPoint, Rational, Scalar, Sym, Term, Wide};
use crate::{classical, curious};

/// Shape of the series side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// `k = 0..=n` with `n` the integer parameter `n`.
    Terminating,
    Unilateral,
    Bilateral,
}

pub type LhsFn<S> = fn(&ParameterPoint<S>, &Guard) -> Result<Term<S>>;
pub type SummandFn<S> = fn(&ParameterPoint<S>, i64, &Guard) -> Result<Term<S>>;
pub type SampleFn<S> = fn(&mut Draw) -> Result<ParameterPoint<S>>;

/// One arithmetic backend's view of an identity.
#[derive(Clone, Copy)]
pub struct Sides<S> {
    /// The closed form.
    pub lhs: LhsFn<S>,
    pub summand: SummandFn<S>,
    pub sample: SampleFn<S>,
}

/// A convergence constraint `|value| < 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: &'static str,
    pub value: f64,
}

pub type DomainFn = fn(&ParameterPoint<Wide>) -> Result<Vec<Constraint>>;

/// `source(p_src, k) = K · target(p_tgt, k)` for every `k`, with `K` independent of `k`.
pub struct LinkPoints {
    pub source: ParameterPoint<Rational>,
    pub target: ParameterPoint<Rational>,
    pub factor: Term<Rational>,
}

/// Maps a sampled source point (and an auxiliary integer, used as the
/// terminating index where the substitution needs one) to a link instance.
pub type LinkFn = fn(&ParameterPoint<Rational>, i64) -> Result<LinkPoints>;

#[derive(Clone, Copy)]
pub struct Degeneration {
    pub target: &'static str,
    pub substitution: &'static str,
    pub map: LinkFn,
}

pub struct IdentityRecord {
    pub id: &'static str,
    pub title: &'static str,
    pub params: &'static [Sym],
    pub ints: &'static [IntSym],
    pub needs_sqrt_a: bool,
    pub kind: Kind,
    pub domain_text: &'static str,
    pub domain: DomainFn,
    pub exact: Sides<Rational>,
    pub float: Sides<Wide>,
    pub degenerations: Vec<Degeneration>,
}

impl IdentityRecord {
    pub fn sides<S: Backend>(&self) -> &Sides<S> {
        S::sides(self)
    }

    /// Terminating identities are checked in exact arithmetic.
    pub fn supports_exact(&self) -> bool {
        self.kind == Kind::Terminating
    }

    /// Convergence ratios at `p`; empty for terminating and everywhere-convergent series.
    pub fn constraints<S: Scalar>(&self, p: &ParameterPoint<S>) -> Result<Vec<Constraint>> {
        (self.domain)(&p.map(Scalar::to_wide))
    }

    /// `|ratio| < 1` for every constraint.
    pub fn in_domain<S: Scalar>(&self, p: &ParameterPoint<S>) -> Result<bool> {
        Ok(self.constraints(p)?.iter().all(|c| c.value < 1.0))
    }

    /// Summand with the series' index range applied: zero outside `0..=n`
    /// (terminating) or below 0 (unilateral).
    pub fn term<S: Backend>(&self, p: &ParameterPoint<S>, k: i64, guard: &Guard) -> Result<Term<S>> {
        let outside = match self.kind {
            Kind::Bilateral => false,
            Kind::Unilateral => k < 0,
            Kind::Terminating => k < 0 || k > p.int(IntSym::N)?,
        };
        if outside {
            Ok(Term::scalar(S::zero()))
        } else {
            (self.sides::<S>().summand)(p, k, guard)
        }
    }
}

/// Arithmetic backends the registry is instantiated for.
pub trait Backend: Scalar {
    fn sides(rec: &IdentityRecord) -> &Sides<Self>;
    /// Random value with modulus roughly in `[lo, hi]`.
    fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self;
}

/// Largest denominator of sampled exact rationals.
const MAX_DEN: i64 = 12;

impl Backend for Rational {
    fn sides(rec: &IdentityRecord) -> &Sides<Self> {
        &rec.exact
    }

    /// `±num/den` with `den <= 12`, redrawn until the modulus is in range.
    fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self {
        loop {
            let m = rng.random_range(lo..=hi);
            let den = rng.random_range(1..=MAX_DEN);
            let num = (m * den as f64).round() as i64;
            let v = num as f64 / den as f64;
            if num != 0 && v >= lo && v <= hi {
                let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                return Rational::from_ratio(sign * num, den);
            }
        }
    }
}

impl Backend for Wide {
    fn sides(rec: &IdentityRecord) -> &Sides<Self> {
        &rec.float
    }

    /// Uniform modulus and uniform phase.
    fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Self {
        let m = rng.random_range(lo..=hi);
        let t = rng.random_range(0.0..TAU);
        Wide::new(m * t.cos(), m * t.sin())
    }
}

/// Random source handed to sampling recipes.
pub struct Draw<'a> {
    rng: &'a mut ChaCha8Rng,
    fixed_n: Option<i64>,
}

/// Range of `|q|` used by sampling.
pub const Q_RANGE: (f64, f64) = (0.1, 0.7);

impl<'a> Draw<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng, fixed_n: Option<i64>) -> Self {
        Draw { rng, fixed_n }
    }

    pub fn value<S: Backend>(&mut self, lo: f64, hi: f64) -> S {
        S::draw(self.rng, lo, hi)
    }

    pub fn base<S: Backend>(&mut self) -> Result<ParameterPoint<S>> {
        ParameterPoint::new(self.value(Q_RANGE.0, Q_RANGE.1))
    }

    /// The terminating index: fixed if requested, else uniform in `0..=hi`.
    pub fn n(&mut self, hi: i64) -> i64 {
        self.fixed_n.unwrap_or_else(|| self.rng.random_range(0..=hi))
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }
}

/// Every registered identity, classical first.
pub fn registry() -> &'static [IdentityRecord] {
    static REG: OnceLock<Vec<IdentityRecord>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut v = classical::records();
        v.extend(curious::records());
        v
    })
}

pub fn lookup(id: &str) -> Result<&'static IdentityRecord> {
    registry()
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Builds the [`Sides`] of both backends from generic functions.
macro_rules! sides {
    ($lhs:ident, $summand:ident, $sample:ident) => {
        (
            $crate::identity::Sides::<$crate::qcore::Rational> {
                lhs: $lhs::<$crate::qcore::Rational>,
                summand: $summand::<$crate::qcore::Rational>,
                sample: $sample::<$crate::qcore::Rational>,
            },
            $crate::identity::Sides::<$crate::qcore::Wide> {
                lhs: $lhs::<$crate::qcore::Wide>,
                summand: $summand::<$crate::qcore::Wide>,
                sample: $sample::<$crate::qcore::Wide>,
            },
        )
    };
}
pub(crate) use sides;

/// `|x|` of a float-mode expression, for domain predicates.
pub(crate) fn ratio(label: &'static str, x: Wide) -> Constraint {
    Constraint {
        label,
        value: x.abs(),
    }
}

pub(crate) fn no_constraints(_: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    Ok(Vec::new())
}

pub(crate) fn div<S: Scalar>(x: &S, y: &S, what: &str) -> Result<S> {
    x.checked_div(y).ok_or_else(|| Error::Pole(format!("{what}: division by zero")))
}
