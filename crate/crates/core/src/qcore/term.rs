//! Summand values in factored form.
//!
//! A [`Term`] is `coeff · ∏ (x_i;q)_∞^{e_i}`. Keeping the infinite products
//! symbolic lets exact mode compare summands that contain them (equal
//! arguments cancel exactly), while float mode evaluates them with certified
//! truncation.

use super::infinite::{infinite_product, Tolerance};
use super::pochhammer::{
    infinite_product_vanishes, qpoch_finite, qpoch_guarded, qpoch_recip, Guard,
};
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Term<S> {
    coeff: S,
    infinite: Vec<(S, i32)>,
}

impl<S: Scalar> Term<S> {
    pub fn scalar(coeff: S) -> Self {
        Term {
            coeff,
            infinite: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::scalar(S::one())
    }

    pub fn coeff(&self) -> &S {
        &self.coeff
    }

    pub fn infinite_factors(&self) -> &[(S, i32)] {
        &self.infinite
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// No infinite products left after cancellation.
    pub fn is_finite(&self) -> bool {
        self.infinite.is_empty()
    }

    fn push(&mut self, x: S, e: i32) {
        if e == 0 || x.is_zero() || self.coeff.is_zero() {
            return;
        }
        if let Some(pos) = self.infinite.iter().position(|(y, _)| *y == x) {
            self.infinite[pos].1 += e;
            if self.infinite[pos].1 == 0 {
                self.infinite.swap_remove(pos);
            }
        } else {
            self.infinite.push((x, e));
        }
    }

    pub fn scale(mut self, x: S) -> Self {
        self.coeff = self.coeff * x;
        if self.coeff.is_zero() {
            self.infinite.clear();
        }
        self
    }

    pub fn mul(mut self, other: &Term<S>) -> Self {
        self = self.scale(other.coeff.clone());
        for (x, e) in &other.infinite {
            self.push(x.clone(), *e);
        }
        self
    }

    /// The same factored form in another backend.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Term<T> {
        let mut t = Term::scalar(f(&self.coeff));
        for (x, e) in &self.infinite {
            t.push(f(x), *e);
        }
        t
    }

    pub fn recip(&self) -> Option<Self> {
        Some(Term {
            coeff: self.coeff.recip()?,
            infinite: self.infinite.iter().map(|(x, e)| (x.clone(), -e)).collect(),
        })
    }

    /// The plain value; fails in exact mode when infinite products remain.
    pub fn into_exact(self) -> Result<S> {
        if self.infinite.is_empty() {
            Ok(self.coeff)
        } else {
            Err(Error::Mode(format!(
                "term keeps {} infinite q-product(s); exact evaluation impossible",
                self.infinite.len()
            )))
        }
    }

    /// Structural equality: equal coefficients and equal product multisets.
    /// Exact in exact mode; in float mode arguments must match bit for bit.
    pub fn same_as(&self, other: &Term<S>) -> bool {
        if self.coeff.is_zero() || other.coeff.is_zero() {
            return self.coeff.is_zero() && other.coeff.is_zero();
        }
        if self.coeff != other.coeff || self.infinite.len() != other.infinite.len() {
            return false;
        }
        self.infinite
            .iter()
            .all(|(x, e)| other.infinite.iter().any(|(y, f)| x == y && e == f))
    }

    /// Rewrites products whose arguments differ by an integral power of `q`
    /// onto one representative, using `(xq^m;q)_∞ = (x;q)_∞ / (x;q)_m`.
    pub fn reduce(mut self, q: &S) -> Result<Self> {
        let log2_q = q.log2_abs();
        let mut i = 0;
        while i < self.infinite.len() {
            let (x, _) = self.infinite[i].clone();
            let lx = x.log2_abs();
            let mut j = i + 1;
            while j < self.infinite.len() {
                let (y, f) = self.infinite[j].clone();
                let est = ((y.log2_abs() - lx) / log2_q).round();
                let found = if est.is_finite() && est.abs() < 1e6 {
                    let m0 = est as i64;
                    (m0 - 1..=m0 + 1).find(|m| q.powi(*m).is_some_and(|qm| x.clone() * qm == y))
                } else {
                    None
                };
                match found {
                    Some(m) => {
                        let p = qpoch_finite(&x, q, m)?;
                        let p = p
                            .powi(-(f as i64))
                            .ok_or_else(|| Error::Pole(format!("({x};q)_{m} vanishes")))?;
                        self.coeff = self.coeff * p;
                        self.infinite.swap_remove(j);
                        self.infinite[i].1 += f;
                    }
                    None => j += 1,
                }
            }
            if self.infinite[i].1 == 0 {
                self.infinite.swap_remove(i);
            } else {
                i += 1;
            }
        }
        if self.coeff.is_zero() {
            self.infinite.clear();
        }
        Ok(self)
    }

    /// Equality after [`Term::reduce`]; exact in exact mode.
    pub fn equals(&self, other: &Term<S>, q: &S) -> Result<bool> {
        if self.coeff.is_zero() || other.coeff.is_zero() {
            return Ok(self.coeff.is_zero() && other.coeff.is_zero());
        }
        let ratio = self.clone().mul(&other.recip().expect("nonzero")).reduce(q)?;
        Ok(ratio.is_finite() && ratio.coeff == S::one())
    }

    /// Value and an absolute bound on the product truncation error.
    pub fn evaluate(&self, q: &S, rel_tol: f64, guard: &Guard) -> Result<Evaluated<S>> {
        if self.infinite.is_empty() || self.coeff.is_zero() {
            return Ok(Evaluated {
                value: self.coeff.clone(),
                error_bound: 0.0,
            });
        }
        let mut value = self.coeff.clone();
        let mut rel = 0.0f64;
        for (x, e) in &self.infinite {
            let g = if *e < 0 { Some(guard) } else { None };
            let p = infinite_product(x, q, Tolerance::Relative(rel_tol), g)?;
            let r = if p.value.is_zero() {
                0.0
            } else {
                p.tail_bound / p.value.abs_f64()
            };
            let factor = if *e > 0 {
                p.value.powi(*e as i64).expect("positive power")
            } else {
                p.value
                    .powi(*e as i64)
                    .ok_or_else(|| Error::Pole(format!("({x};q)_inf vanishes in a denominator")))?
            };
            let r = if *e < 0 { r / (1.0 - r) } else { r };
            rel = (1.0 + rel) * (1.0 + r).powi(e.abs()) - 1.0;
            value = value * factor;
        }
        let error_bound = value.abs_f64() * rel;
        Ok(Evaluated { value, error_bound })
    }
}

#[derive(Clone, Debug)]
pub struct Evaluated<S> {
    pub value: S,
    pub error_bound: f64,
}

/// Incremental construction of a [`Term`] from q-series building blocks.
///
/// Every denominator goes through the builder's [`Guard`].
pub struct TermBuilder<'a, S> {
    q: &'a S,
    guard: Guard,
    term: Term<S>,
}

impl<'a, S: Scalar> TermBuilder<'a, S> {
    pub fn new(q: &'a S, guard: Guard) -> Self {
        TermBuilder {
            q,
            guard,
            term: Term::one(),
        }
    }

    pub fn q(&self) -> &'a S {
        self.q
    }

    pub fn guard(&self) -> &Guard {
        &self.guard
    }

    pub fn mul(&mut self, x: S) -> &mut Self {
        let t = std::mem::replace(&mut self.term, Term::one());
        self.term = t.scale(x);
        self
    }

    /// Divide by a linear factor; pole if it vanishes (or is within the margin).
    pub fn div(&mut self, x: &S, what: &str) -> Result<&mut Self> {
        self.guard.check(x, || format!("{what} = {x}"))?;
        Ok(self.mul(x.recip().expect("checked nonzero")))
    }

    pub fn pow(&mut self, x: &S, k: i64) -> Result<&mut Self> {
        let p = x
            .powi(k)
            .ok_or_else(|| Error::Pole(format!("negative power {k} of zero")))?;
        Ok(self.mul(p))
    }

    /// Multiply by `(x;q)_k`.
    pub fn poch(&mut self, x: &S, k: i64) -> Result<&mut Self> {
        let p = qpoch_guarded(x, self.q, k, &self.guard)?;
        Ok(self.mul(p))
    }

    /// Divide by `(x;q)_k`.
    pub fn rpoch(&mut self, x: &S, k: i64) -> Result<&mut Self> {
        let p = qpoch_recip(x, self.q, k, &self.guard)?;
        Ok(self.mul(p))
    }

    /// Multiply by `(x;q)_∞`.
    pub fn inf(&mut self, x: &S) -> Result<&mut Self> {
        if S::is_exact() && infinite_product_vanishes(x, self.q) {
            self.term = Term::scalar(S::zero());
            return Ok(self);
        }
        self.term.push(x.clone(), 1);
        Ok(self)
    }

    /// Divide by `(x;q)_∞`.
    ///
    /// In float mode the leading factors (those with `|xq^j| >= 1/2`) are
    /// checked against the guard margin.
    pub fn rinf(&mut self, x: &S) -> Result<&mut Self> {
        if S::is_exact() {
            if infinite_product_vanishes(x, self.q) {
                return Err(Error::Pole(format!("({x};q)_inf vanishes in a denominator")));
            }
        } else {
            let one = S::one();
            let mut t = x.clone();
            let mut j = 0;
            while t.log2_abs() >= -1.0 {
                let f = one.clone() - t.clone();
                self.guard.check(&f, || format!("factor {j} of ({x};q)_inf vanishes"))?;
                t = t * self.q.clone();
                j += 1;
            }
        }
        self.term.push(x.clone(), -1);
        Ok(self)
    }

    pub fn finish(self) -> Term<S> {
        self.term
    }
}
