//! `(a;q)_∞` with a certified truncation bound.

use serde::{Deserialize, Serialize};

use super::pochhammer::Guard;
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QPochResult<S> {
    pub value: S,
    /// Upper bound on `|(a;q)_∞ - value|`, rounding excluded.
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Tolerance kind for [`infinite_product`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

const MAX_FACTORS: usize = 1 << 22;

/// `(a;q)_∞ = ∏_{j≥0} (1 - a q^j)` with `tail_bound < tol`.
///
/// Float mode only: exact mode has no finite representation of the product.
pub fn qpoch_infinite<S: Scalar>(a: &S, q: &S, tol: f64) -> Result<QPochResult<S>> {
    infinite_product(a, q, Tolerance::Absolute(tol), None)
}

/// Truncate at `J` factors, starting at `J = max(20, ⌈log tol / log|q|⌉)` and
/// doubling until the tail bound is met.
///
/// With `x = |a||q|^J < 1/2`,
/// `|log ∏_{j≥J} (1 - a q^j)| <= Σ_{j≥J} |a||q|^j / (1 - x) = x / ((1-|q|)(1-x))`,
/// so the truncation error is at most `|value| (exp(L) - 1)`.
pub fn infinite_product<S: Scalar>(
    a: &S,
    q: &S,
    tol: Tolerance,
    guard: Option<&Guard>,
) -> Result<QPochResult<S>> {
    if S::is_exact() {
        return Err(Error::Mode("infinite q-products are not available in exact mode".into()));
    }
    let log2_q = q.log2_abs();
    if !(log2_q < 0.0) {
        return Err(Error::Nonconvergence(format!("(a;q)_inf needs |q| < 1, got q = {q}")));
    }
    if a.is_zero() {
        return Ok(QPochResult {
            value: S::one(),
            tail_bound: 0.0,
            terms_used: 0,
        });
    }
    let abs_q = log2_q.exp2();
    let log2_a = a.log2_abs();
    let tol_value = match tol {
        Tolerance::Absolute(t) | Tolerance::Relative(t) => t,
    };
    let start = if tol_value > 0.0 && tol_value < 1.0 {
        (tol_value.log2() / log2_q).ceil() as usize
    } else {
        0
    };
    let mut target = start.max(20);

    let one = S::one();
    let mut value = S::one();
    let mut t = a.clone();
    let mut used = 0usize;
    loop {
        while used < target {
            let f = one.clone() - t.clone();
            if let Some(g) = guard {
                g.check(&f, || format!("factor {used} of ({a};q)_inf vanishes"))?;
            }
            value = value * f;
            t = t * q.clone();
            used += 1;
        }
        if value.is_zero() {
            return Ok(QPochResult {
                value,
                tail_bound: 0.0,
                terms_used: used,
            });
        }
        let log2_x = log2_a + used as f64 * log2_q;
        if log2_x < -1.0 {
            let x = log2_x.exp2();
            let l = x / ((1.0 - abs_q) * (1.0 - x));
            let rel = l.exp_m1();
            let bound = match tol {
                Tolerance::Absolute(_) => value.abs_f64() * rel,
                Tolerance::Relative(_) => rel,
            };
            if bound < tol_value {
                let tail_bound = value.abs_f64() * rel;
                return Ok(QPochResult {
                    value,
                    tail_bound,
                    terms_used: used,
                });
            }
        }
        if target >= MAX_FACTORS {
            return Err(Error::Nonconvergence(format!(
                "({a};q)_inf tail bound not reached within {MAX_FACTORS} factors"
            )));
        }
        target *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{qpoch_finite, Rational, Wide};

    #[test]
    fn zero_argument_is_one() {
        let r = qpoch_infinite(&Wide::ZERO, &Wide::from_real(0.3), 1e-12).unwrap();
        assert_eq!(r.value, Wide::from_real(1.0));
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn first_factor_vanishes() {
        let r = qpoch_infinite(&Wide::from_real(1.0), &Wide::from_real(0.37), 1e-12).unwrap();
        assert!(r.value.is_zero());
    }

    #[test]
    fn half_base_constant() {
        // 30-digit product of 200 factors: 0.288788095086602421278899721929...
        let q = Wide::from_real(0.5);
        let r = qpoch_infinite(&q, &q, 1e-15).unwrap();
        assert!(r.tail_bound < 1e-15);
        assert!((r.value.to_complex().re - 0.288_788_095_086_602_4).abs() < 1e-15);
    }

    #[test]
    fn exact_mode_rejected() {
        let q = Rational::from_ratio(1, 2);
        assert!(matches!(qpoch_infinite(&q, &q, 1e-10), Err(Error::Mode(_))));
    }

    #[test]
    fn quotient_relation_with_finite_index() {
        let q = Wide::new(0.45, 0.2);
        let a = Wide::new(-1.3, 0.7);
        let full = qpoch_infinite(&a, &q, 1e-15).unwrap();
        for k in -6..=6 {
            let shifted = a * q.powi(k).unwrap();
            let tail = qpoch_infinite(&shifted, &q, 1e-15).unwrap();
            let lhs = qpoch_finite(&a, &q, k).unwrap() * tail.value;
            let diff = (lhs - full.value).abs();
            assert!(diff < 1e-13 * full.value.abs(), "k={k} diff={diff}");
        }
    }
}
